//! Value parsers for flags and config entries.

use lidstone_fem::experiments::Measurement;
use lidstone_fem::mesh::MeshKind;

/// A whole comma-list flag value; keeps clap from treating the flag as repeatable.
#[derive(Debug, Clone, PartialEq)]
pub struct List<T>(pub Vec<T>);

pub fn float_flag(s: &str) -> Result<List<f64>, String> {
    float_list(s).map(List)
}

pub fn int_flag(s: &str) -> Result<List<usize>, String> {
    int_list(s).map(List)
}

pub fn mesh_flag(s: &str) -> Result<List<MeshKind>, String> {
    mesh_kinds(s).map(List)
}

pub fn float_list(s: &str) -> Result<Vec<f64>, String> {
    s.split(',')
        .map(str::trim)
        .filter(|t| !t.is_empty())
        .map(|t| {
            t.parse::<f64>()
                .map_err(|_| format!("`{t}` is not a number"))
        })
        .collect()
}

/// Comma list of integers, or `start..end` for the doubling sequence
/// `start, 2 start, ..., end`.
pub fn int_list(s: &str) -> Result<Vec<usize>, String> {
    if let Some((a, b)) = s.split_once("..") {
        let start = parse_int(a.trim())?;
        let end = parse_int(b.trim())?;
        if start == 0 || end < start {
            return Err(format!("bad range `{s}` (need 0 < start <= end)"));
        }
        return Ok(lidstone_fem::experiments::doubling(start, end));
    }
    s.split(',')
        .map(str::trim)
        .filter(|t| !t.is_empty())
        .map(parse_int)
        .collect()
}

fn parse_int(t: &str) -> Result<usize, String> {
    t.parse::<usize>()
        .map_err(|_| format!("`{t}` is not a non-negative integer"))
}

pub fn poly(s: &str) -> Result<[f64; 3], String> {
    let v = float_list(s)?;
    <[f64; 3]>::try_from(v.as_slice())
        .map_err(|_| format!("expected three coefficients c0,c1,c2, got {}", v.len()))
}

/// `uniform`, `shishkin` or `both`.
pub fn mesh_kinds(s: &str) -> Result<Vec<MeshKind>, String> {
    if s.eq_ignore_ascii_case("both") {
        return Ok(vec![MeshKind::Uniform, MeshKind::Shishkin]);
    }
    s.parse::<MeshKind>()
        .map(|k| vec![k])
        .map_err(|_| format!("unknown mesh `{s}` (expected uniform, shishkin or both)"))
}

pub fn measurement(s: &str) -> Result<Measurement, String> {
    s.parse::<Measurement>()
        .map_err(|_| format!("unknown measurement `{s}` (expected nodes or nodes+mid)"))
}
