//! Error measurement, convergence rates, sweeps and timing fits.

use std::sync::Arc;

use rayon::prelude::*;

use crate::assembly::{ProblemCoefficients, StageTwoLoad};
use crate::error::{Error, Result};
use crate::mesh::{self, MeshKind, ShishkinParams};
use crate::oracle::ExactModel;
use crate::solver::{solve_fourth_order_with, FemSolution};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Measurement {
    #[default]
    NodesOnly,
    NodesAndMidpoints,
}

impl std::str::FromStr for Measurement {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "nodes" => Ok(Measurement::NodesOnly),
            "nodes+mid" | "nodes+midpoints" => Ok(Measurement::NodesAndMidpoints),
            other => Err(Error::invalid(
                "measurement",
                format!("unknown mode `{other}` (expected nodes or nodes+mid)"),
            )),
        }
    }
}

/// Right-hand side `f` of the fourth-order problem.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub enum Source {
    /// `f = 1`, the model problem with a closed-form solution.
    #[default]
    Model,
    /// `f = c0 + c1 x + c2 x^2`.
    Polynomial([f64; 3]),
}

impl Source {
    pub fn eval(&self, x: f64) -> f64 {
        match *self {
            Source::Model => 1.0,
            Source::Polynomial([c0, c1, c2]) => c0 + x * (c1 + x * c2),
        }
    }
}

/// `max |u(x) - u_n(x)|` over the nodes, optionally also over element midpoints.
pub fn max_error(u_n: &FemSolution, model: &ExactModel, measurement: Measurement) -> f64 {
    let x = u_n.mesh().nodes();
    let v = u_n.values();
    let nodal = x
        .iter()
        .zip(v)
        .map(|(&xi, vi)| (model.u(xi) - vi).abs())
        .fold(0.0, f64::max);
    match measurement {
        Measurement::NodesOnly => nodal,
        Measurement::NodesAndMidpoints => x
            .windows(2)
            .zip(v.windows(2))
            .map(|(xs, vs)| (model.u(0.5 * (xs[0] + xs[1])) - 0.5 * (vs[0] + vs[1])).abs())
            .fold(nodal, f64::max),
    }
}

/// Observed order `log2(error_coarse / error_fine)` for one mesh doubling;
/// `None` when either error is not positive.
pub fn convergence_rate(error_fine: f64, error_coarse: f64) -> Option<f64> {
    if error_fine > 0.0 && error_coarse > 0.0 && error_fine.is_finite() && error_coarse.is_finite()
    {
        Some((error_coarse / error_fine).ln() / std::f64::consts::LN_2)
    } else {
        None
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunRecord {
    pub n_intervals: usize,
    pub epsilon: f64,
    pub mesh_kind: MeshKind,
    /// `None` when the run has no closed-form reference (non-model coefficients or source).
    pub max_error: Option<f64>,
    pub rate: Option<f64>,
    pub assembly_seconds: f64,
    pub solve_seconds: f64,
    pub assumption_ok: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepConfig {
    pub epsilons: Vec<f64>,
    pub n_values: Vec<usize>,
    pub mesh_kinds: Vec<MeshKind>,
    pub sigma: f64,
    pub alpha: f64,
    pub a: f64,
    pub b: f64,
    pub source: Source,
    pub measurement: Measurement,
    pub stage_two_load: StageTwoLoad,
    /// Timing repetitions per cell; the median is reported.
    pub repetitions: usize,
    /// Constant `C` in the regime check `eps <= C / N`.
    pub assumption_constant: f64,
    /// Worker threads; `1` runs the cells sequentially.
    pub jobs: usize,
}

impl Default for SweepConfig {
    fn default() -> Self {
        Self {
            epsilons: Vec::new(),
            n_values: Vec::new(),
            mesh_kinds: vec![MeshKind::Uniform, MeshKind::Shishkin],
            sigma: mesh::DEFAULT_SIGMA,
            alpha: 1.0,
            a: 1.0,
            b: 1.0,
            source: Source::Model,
            measurement: Measurement::NodesOnly,
            stage_two_load: StageTwoLoad::Lumped,
            repetitions: 5,
            assumption_constant: 1.0,
            jobs: 1,
        }
    }
}

/// Doubling sequence `start, 2 start, ..., end`.
pub fn doubling(start: usize, end: usize) -> Vec<usize> {
    std::iter::successors(Some(start), |&n| Some(n * 2))
        .take_while(|&n| n <= end)
        .collect()
}

impl SweepConfig {
    pub fn validate(&self) -> Result<()> {
        if self.epsilons.is_empty() {
            return Err(Error::invalid("epsilons", "at least one value required"));
        }
        for &eps in &self.epsilons {
            mesh::validate_epsilon(eps)?;
        }
        for &n in &self.n_values {
            mesh::validate_intervals(n)?;
        }
        if self.n_values.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::invalid("n_values", "must be strictly ascending"));
        }
        if self.mesh_kinds.is_empty() {
            return Err(Error::invalid(
                "mesh_kinds",
                "at least one mesh kind required",
            ));
        }
        if self.repetitions == 0 {
            return Err(Error::invalid("repetitions", "must be >= 1"));
        }
        if self.jobs == 0 {
            return Err(Error::invalid("jobs", "must be >= 1"));
        }
        if !(self.assumption_constant.is_finite() && self.assumption_constant > 0.0) {
            return Err(Error::invalid("assumption_constant", "must be > 0"));
        }
        ShishkinParams::new(4, 1.0)
            .with_alpha(self.alpha)
            .with_sigma(self.sigma)
            .validate()?;
        ProblemCoefficients::new(1.0, self.a, self.b)?;
        Ok(())
    }

    /// Whether errors can be measured against the closed-form model solution.
    pub fn has_reference(&self) -> bool {
        self.a == 1.0 && self.b == 1.0 && self.source == Source::Model
    }
}

struct Cell {
    epsilon: f64,
    n: usize,
    kind: MeshKind,
}

fn median(mut samples: Vec<f64>) -> f64 {
    samples.sort_by(f64::total_cmp);
    let mid = samples.len() / 2;
    if samples.len() % 2 == 1 {
        samples[mid]
    } else {
        0.5 * (samples[mid - 1] + samples[mid])
    }
}

fn run_cell(config: &SweepConfig, cell: &Cell) -> Result<RunRecord> {
    let params = ShishkinParams::new(cell.n, cell.epsilon)
        .with_alpha(config.alpha)
        .with_sigma(config.sigma);
    let mesh = Arc::new(mesh::build(cell.kind, &params)?);
    let coeffs = ProblemCoefficients::new(cell.epsilon, config.a, config.b)?;
    let source = config.source;

    let mut assembly = Vec::with_capacity(config.repetitions);
    let mut solve = Vec::with_capacity(config.repetitions);
    let mut last = None;
    for _ in 0..config.repetitions {
        let sol =
            solve_fourth_order_with(&mesh, &coeffs, |x| source.eval(x), config.stage_two_load)?;
        assembly.push(sol.timings.assembly_seconds());
        solve.push(sol.timings.solve_seconds());
        last = Some(sol);
    }
    let sol = last.expect("at least one repetition");

    let max_error = if config.has_reference() {
        let model = ExactModel::new(cell.epsilon)?;
        Some(max_error(&sol.u, &model, config.measurement))
    } else {
        None
    };

    Ok(RunRecord {
        n_intervals: cell.n,
        epsilon: cell.epsilon,
        mesh_kind: cell.kind,
        max_error,
        rate: None,
        assembly_seconds: median(assembly),
        solve_seconds: median(solve),
        assumption_ok: mesh::check_assumption(&params, config.assumption_constant),
    })
}

/// Runs every `(eps, kind, N)` cell and chains rates along each series.
///
/// Records come back ordered by epsilon (as given), then mesh kind (as given),
/// then ascending `N`, independent of `jobs`.
pub fn run_sweep(config: &SweepConfig) -> Result<Vec<RunRecord>> {
    config.validate()?;
    let cells: Vec<Cell> = config
        .epsilons
        .iter()
        .flat_map(|&epsilon| {
            config.mesh_kinds.iter().flat_map(move |&kind| {
                config
                    .n_values
                    .iter()
                    .map(move |&n| Cell { epsilon, n, kind })
            })
        })
        .collect();

    let mut records = if config.jobs == 1 {
        cells
            .iter()
            .map(|c| run_cell(config, c))
            .collect::<Result<Vec<_>>>()?
    } else {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(config.jobs)
            .build()
            .map_err(|e| Error::invalid("jobs", e.to_string()))?;
        pool.install(|| {
            cells
                .par_iter()
                .map(|c| run_cell(config, c))
                .collect::<Result<Vec<_>>>()
        })?
    };

    let series = config.n_values.len();
    if series > 0 {
        for chunk in records.chunks_mut(series) {
            for i in 1..chunk.len() {
                if chunk[i].n_intervals != 2 * chunk[i - 1].n_intervals {
                    continue;
                }
                if let (Some(fine), Some(coarse)) = (chunk[i].max_error, chunk[i - 1].max_error) {
                    chunk[i].rate = convergence_rate(fine, coarse);
                }
            }
        }
    }
    Ok(records)
}

/// Least-squares slope of `ln(solve_seconds)` against `ln N`.
pub fn timing_scaling(records: &[RunRecord]) -> Result<f64> {
    let points: Vec<(f64, f64)> = records
        .iter()
        .filter(|r| r.solve_seconds > 0.0)
        .map(|r| ((r.n_intervals as f64).ln(), r.solve_seconds.ln()))
        .collect();
    if points.len() < 4 {
        return Err(Error::InsufficientData(format!(
            "need at least 4 timed records, got {}",
            points.len()
        )));
    }
    let (lo, hi) = points
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), p| {
            (lo.min(p.0), hi.max(p.0))
        });
    if (hi - lo) / std::f64::consts::LN_2 < 3.0 - 1e-9 {
        return Err(Error::InsufficientData(
            "records must span at least 3 octaves of N".into(),
        ));
    }
    let n = points.len() as f64;
    let mx = points.iter().map(|p| p.0).sum::<f64>() / n;
    let my = points.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = points.iter().map(|p| (p.0 - mx).powi(2)).sum();
    Ok(sxy / sxx)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::build_uniform;

    fn synthetic(n: usize, seconds: f64) -> RunRecord {
        RunRecord {
            n_intervals: n,
            epsilon: 1.0,
            mesh_kind: MeshKind::Uniform,
            max_error: None,
            rate: None,
            assembly_seconds: 0.0,
            solve_seconds: seconds,
            assumption_ok: false,
        }
    }

    #[test]
    fn rate_examples() {
        let r = convergence_rate(0.0040, 0.0153).unwrap();
        assert!((r - 1.936).abs() < 1e-3);
        assert_eq!(convergence_rate(0.01, 0.01), Some(0.0));
        assert_eq!(convergence_rate(1e-4, 4e-4), Some(2.0));
        assert_eq!(convergence_rate(0.0, 1e-3), None);
        assert_eq!(convergence_rate(1e-3, -1.0), None);
    }

    #[test]
    fn exact_nodal_values_have_zero_error() {
        let mesh = Arc::new(build_uniform(32).unwrap());
        let model = ExactModel::new(1e-2).unwrap();
        let u = FemSolution::interpolate(mesh, |x| model.u(x));
        // Boundary values are pinned to 0 while u(1) is zero only to round-off.
        assert!(max_error(&u, &model, Measurement::NodesOnly) < 1e-14);
        assert!(max_error(&u, &model, Measurement::NodesAndMidpoints) > 0.0);
    }

    #[test]
    fn sweep_shape_and_rates() {
        let config = SweepConfig {
            epsilons: vec![1.0, 1e-6],
            n_values: vec![8, 16, 32],
            repetitions: 1,
            ..SweepConfig::default()
        };
        let records = run_sweep(&config).unwrap();
        assert_eq!(records.len(), 12);
        assert_eq!(records[0].epsilon, 1.0);
        assert_eq!(records[0].mesh_kind, MeshKind::Uniform);
        assert_eq!(records[3].mesh_kind, MeshKind::Shishkin);
        for chunk in records.chunks(3) {
            assert!(chunk[0].rate.is_none());
            assert!(chunk[1].rate.is_some() && chunk[2].rate.is_some());
            assert_eq!(
                chunk.iter().map(|r| r.n_intervals).collect::<Vec<_>>(),
                vec![8, 16, 32]
            );
        }
    }

    #[test]
    fn sweep_is_deterministic_across_job_counts() {
        let base = SweepConfig {
            epsilons: vec![1e-8, 1e-2],
            n_values: doubling(4, 256),
            repetitions: 1,
            ..SweepConfig::default()
        };
        let seq = run_sweep(&base).unwrap();
        let par = run_sweep(&SweepConfig { jobs: 4, ..base }).unwrap();
        assert_eq!(seq.len(), par.len());
        for (a, b) in seq.iter().zip(&par) {
            assert_eq!(
                (a.epsilon, a.n_intervals, a.mesh_kind, a.max_error, a.rate),
                (b.epsilon, b.n_intervals, b.mesh_kind, b.max_error, b.rate)
            );
        }
    }

    #[test]
    fn empty_n_values_give_no_records() {
        let config = SweepConfig {
            epsilons: vec![1.0],
            ..SweepConfig::default()
        };
        assert!(run_sweep(&config).unwrap().is_empty());
    }

    #[test]
    fn non_doubling_steps_have_no_rate() {
        let config = SweepConfig {
            epsilons: vec![1.0],
            n_values: vec![8, 12, 24],
            mesh_kinds: vec![MeshKind::Uniform],
            repetitions: 1,
            ..SweepConfig::default()
        };
        let records = run_sweep(&config).unwrap();
        assert!(records[1].rate.is_none());
        assert!(records[2].rate.is_some());
    }

    #[test]
    fn non_model_runs_have_no_error() {
        let config = SweepConfig {
            epsilons: vec![1e-3],
            n_values: vec![8, 16],
            a: 2.0,
            repetitions: 1,
            ..SweepConfig::default()
        };
        let records = run_sweep(&config).unwrap();
        assert!(records
            .iter()
            .all(|r| r.max_error.is_none() && r.rate.is_none()));
    }

    #[test]
    fn sweep_validation() {
        let bad = [
            SweepConfig {
                epsilons: vec![],
                ..SweepConfig::default()
            },
            SweepConfig {
                epsilons: vec![1.0],
                n_values: vec![16, 8],
                ..SweepConfig::default()
            },
            SweepConfig {
                epsilons: vec![1.0],
                n_values: vec![7],
                ..SweepConfig::default()
            },
            SweepConfig {
                epsilons: vec![0.0],
                ..SweepConfig::default()
            },
            SweepConfig {
                epsilons: vec![1.0],
                sigma: 1.0,
                ..SweepConfig::default()
            },
        ];
        for config in bad {
            assert!(run_sweep(&config).is_err(), "{config:?}");
        }
    }

    #[test]
    fn slope_of_synthetic_timings() {
        let ns = doubling(1 << 10, 1 << 16);
        let linear: Vec<_> = ns.iter().map(|&n| synthetic(n, 1e-8 * n as f64)).collect();
        assert!((timing_scaling(&linear).unwrap() - 1.0).abs() < 0.01);
        let quad: Vec<_> = ns
            .iter()
            .map(|&n| synthetic(n, 1e-12 * (n as f64).powi(2)))
            .collect();
        assert!((timing_scaling(&quad).unwrap() - 2.0).abs() < 0.01);
    }

    #[test]
    fn slope_needs_enough_data() {
        let few: Vec<_> = [16, 32, 64].iter().map(|&n| synthetic(n, 1.0)).collect();
        assert!(matches!(
            timing_scaling(&few),
            Err(Error::InsufficientData(_))
        ));
        let narrow: Vec<_> = [16, 20, 24, 28]
            .iter()
            .map(|&n| synthetic(n, 1.0))
            .collect();
        assert!(matches!(
            timing_scaling(&narrow),
            Err(Error::InsufficientData(_))
        ));
    }

    #[test]
    fn source_polynomial() {
        assert_eq!(Source::Model.eval(0.3), 1.0);
        assert_eq!(Source::Polynomial([1.0, 2.0, 3.0]).eval(2.0), 17.0);
    }
}
