//! CSV emission and the `table` pretty-printer.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::Path;

use lidstone_fem::experiments::RunRecord;

use crate::error::{CliError, Result};

pub const SWEEP_HEADER: [&str; 8] = [
    "epsilon",
    "N",
    "mesh",
    "max_error",
    "rate",
    "assembly_s",
    "solve_s",
    "assumption_ok",
];

/// Scientific notation with seven significant digits.
pub fn sci(v: f64) -> String {
    format!("{v:.6e}")
}

pub fn opt_sci(v: Option<f64>) -> String {
    v.map(sci).unwrap_or_default()
}

/// Destination named by `--output`, or stdout.
pub fn open_output(path: Option<&Path>) -> Result<Box<dyn Write>> {
    match path {
        Some(p) => {
            let file = File::create(p)
                .map_err(|e| CliError::io(format!("opening output {}", p.display()), e))?;
            Ok(Box::new(BufWriter::new(file)))
        }
        None => Ok(Box::new(BufWriter::new(io::stdout().lock()))),
    }
}

pub fn csv_writer<W: Write>(out: W) -> csv::Writer<W> {
    csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(out)
}

pub fn csv_error(context: &str, e: csv::Error) -> CliError {
    let kind = e.kind();
    let source = match kind {
        csv::ErrorKind::Io(inner) => io::Error::new(inner.kind(), inner.to_string()),
        _ => io::Error::new(io::ErrorKind::InvalidData, e.to_string()),
    };
    CliError::io(context.to_string(), source)
}

pub fn sweep_row(r: &RunRecord) -> [String; 8] {
    [
        sci(r.epsilon),
        r.n_intervals.to_string(),
        r.mesh_kind.as_str().to_string(),
        opt_sci(r.max_error),
        opt_sci(r.rate),
        sci(r.assembly_seconds),
        sci(r.solve_seconds),
        r.assumption_ok.to_string(),
    ]
}

pub fn write_sweep<W: Write>(out: W, records: &[RunRecord]) -> Result<()> {
    let mut w = csv_writer(out);
    w.write_record(SWEEP_HEADER)
        .map_err(|e| csv_error("writing sweep", e))?;
    for r in records {
        w.write_record(sweep_row(r))
            .map_err(|e| csv_error("writing sweep", e))?;
    }
    w.flush().map_err(|e| CliError::io("writing sweep", e))
}

/// A CSV held as header plus string cells.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

pub fn read_table(path: &Path) -> Result<Table> {
    let context = format!("reading {}", path.display());
    let mut reader = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .from_path(path)
        .map_err(|e| csv_error(&context, e))?;
    let header = reader
        .headers()
        .map_err(|e| csv_error(&context, e))?
        .iter()
        .map(str::to_string)
        .collect();
    let mut rows = Vec::new();
    for rec in reader.records() {
        let rec = rec.map_err(|e| csv_error(&context, e))?;
        rows.push(rec.iter().map(str::to_string).collect());
    }
    Ok(Table { header, rows })
}

impl Table {
    fn column(&self, name: &str) -> Result<usize> {
        self.header.iter().position(|h| h == name).ok_or_else(|| {
            CliError::flag(
                "--pivot",
                format!(
                    "input has no `{name}` column (columns: {})",
                    self.header.join(", ")
                ),
            )
        })
    }

    /// One row per `N`, one column per `(epsilon, mesh)` series, holding
    /// `value` cells.
    pub fn pivot(&self, value: &str) -> Result<Table> {
        let (ce, cn, cm, cv) = (
            self.column("epsilon")?,
            self.column("N")?,
            self.column("mesh")?,
            self.column(value)?,
        );
        let mut series: Vec<(String, String)> = Vec::new();
        let mut ns: Vec<String> = Vec::new();
        for row in &self.rows {
            let key = (row[ce].clone(), row[cm].clone());
            if !series.contains(&key) {
                series.push(key);
            }
            if !ns.contains(&row[cn]) {
                ns.push(row[cn].clone());
            }
        }
        ns.sort_by_key(|n| n.parse::<u64>().unwrap_or(u64::MAX));
        let mut header = vec!["N".to_string()];
        header.extend(series.iter().map(|(e, m)| format!("{m} eps={e}")));
        let rows = ns
            .iter()
            .map(|n| {
                let mut out = vec![n.clone()];
                for (e, m) in &series {
                    let cell = self
                        .rows
                        .iter()
                        .find(|r| &r[cn] == n && &r[ce] == e && &r[cm] == m)
                        .map(|r| r[cv].clone())
                        .unwrap_or_default();
                    out.push(cell);
                }
                out
            })
            .collect();
        Ok(Table { header, rows })
    }

    /// Right-aligned columns separated by two spaces.
    pub fn render(&self) -> String {
        let cols = self.header.len();
        let mut widths: Vec<usize> = self.header.iter().map(|h| h.len()).collect();
        for row in &self.rows {
            for (i, cell) in row.iter().enumerate().take(cols) {
                widths[i] = widths[i].max(cell.len());
            }
        }
        let line = |cells: &[String]| {
            let parts: Vec<String> = (0..cols)
                .map(|i| {
                    let c = cells.get(i).map_or("", String::as_str);
                    format!("{c:>w$}", w = widths[i])
                })
                .collect();
            parts.join("  ").trim_end().to_string() + "\n"
        };
        let mut out = line(&self.header);
        let rule: Vec<String> = widths.iter().map(|&w| "-".repeat(w)).collect();
        out.push_str(&(rule.join("  ") + "\n"));
        for row in &self.rows {
            out.push_str(&line(row));
        }
        out
    }
}
