//! The two-stage pipeline: a Poisson solve for `w`, then a
//! reaction-convection-diffusion solve for `u` with `w` as its source.

use std::sync::Arc;
use std::time::{Duration, Instant};

use crate::assembly::{
    assemble_cdr, assemble_poisson, cdr_row_excess, load_vector, poisson_row_excess,
    stage_two_load, AssembledSystem, ProblemCoefficients, StageTwoLoad,
};
use crate::error::{Error, Result};
use crate::mesh::Mesh1D;
use crate::tridiag::inf_norm;

/// Residual bound accepted for every direct solve, relative to `1 + ||rhs||`.
pub const RESIDUAL_TOLERANCE: f64 = 1e-10;

/// Multiple of `|| |A| |x| ||` added to the residual bound: a few units of
/// rounding per row.
pub const ROUNDING_ALLOWANCE: f64 = 16.0 * f64::EPSILON;

/// Continuous piecewise-linear function given by its nodal values.
#[derive(Debug, Clone, PartialEq)]
pub struct FemSolution {
    mesh: Arc<Mesh1D>,
    values: Vec<f64>,
}

impl FemSolution {
    /// `values` must have one entry per node and vanish at both ends.
    pub fn new(mesh: Arc<Mesh1D>, values: Vec<f64>) -> Result<Self> {
        if values.len() != mesh.nodes().len() {
            return Err(Error::DimensionMismatch {
                context: "nodal values",
                expected: mesh.nodes().len(),
                found: values.len(),
            });
        }
        if values[0] != 0.0 || values[values.len() - 1] != 0.0 {
            return Err(Error::invalid(
                "values",
                "boundary values must be exactly zero",
            ));
        }
        Ok(Self { mesh, values })
    }

    pub fn zeros(mesh: Arc<Mesh1D>) -> Self {
        let values = vec![0.0; mesh.nodes().len()];
        Self { mesh, values }
    }

    fn from_interior(mesh: Arc<Mesh1D>, interior: &[f64]) -> Self {
        let mut values = Vec::with_capacity(interior.len() + 2);
        values.push(0.0);
        values.extend_from_slice(interior);
        values.push(0.0);
        Self { mesh, values }
    }

    /// Nodal interpolant of `g` with the boundary values pinned to zero.
    pub fn interpolate(mesh: Arc<Mesh1D>, g: impl Fn(f64) -> f64) -> Self {
        let x = mesh.nodes();
        let interior: Vec<f64> = x[1..x.len() - 1].iter().map(|&xi| g(xi)).collect();
        Self::from_interior(mesh, &interior)
    }

    pub fn mesh(&self) -> &Arc<Mesh1D> {
        &self.mesh
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn interior(&self) -> &[f64] {
        &self.values[1..self.values.len() - 1]
    }

    pub fn is_on(&self, mesh: &Mesh1D) -> bool {
        std::ptr::eq(self.mesh.as_ref(), mesh) || self.mesh.nodes() == mesh.nodes()
    }

    /// Linear interpolation between nodes; `x` outside `[0, 1]` is an error.
    pub fn evaluate(&self, x: f64) -> Result<f64> {
        if !(0.0..=1.0).contains(&x) {
            return Err(Error::invalid("x", format!("must lie in [0, 1], got {x}")));
        }
        let nodes = self.mesh.nodes();
        let e = self.mesh.locate(x);
        let (xl, xr) = (nodes[e], nodes[e + 1]);
        if x == xl {
            return Ok(self.values[e]);
        }
        if x == xr {
            return Ok(self.values[e + 1]);
        }
        let s = (x - xl) / (xr - xl);
        Ok((1.0 - s) * self.values[e] + s * self.values[e + 1])
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct StageTimings {
    pub assembly: Duration,
    pub solve: Duration,
}

#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct PipelineTimings {
    pub poisson: StageTimings,
    pub cdr: StageTimings,
}

impl PipelineTimings {
    pub fn assembly_seconds(&self) -> f64 {
        (self.poisson.assembly + self.cdr.assembly).as_secs_f64()
    }

    pub fn solve_seconds(&self) -> f64 {
        (self.poisson.solve + self.cdr.solve).as_secs_f64()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DecoupledSolution {
    pub w: FemSolution,
    pub u: FemSolution,
    pub timings: PipelineTimings,
}

impl DecoupledSolution {
    pub fn mesh(&self) -> &Arc<Mesh1D> {
        self.u.mesh()
    }
}

fn solve_system(mesh: &Arc<Mesh1D>, system: &AssembledSystem) -> Result<(FemSolution, Duration)> {
    let start = Instant::now();
    let interior = system.solve()?;
    let elapsed = start.elapsed();
    let residual = system.matrix.residual_norm(&interior, &system.rhs)?;
    // Storing x in f64 alone leaves a residual of about u |A| |x|, which
    // exceeds the fixed tolerance once 1/h reaches ~1e12.
    let floor = ROUNDING_ALLOWANCE * system.matrix.abs_product_norm(&interior)?;
    let bound = RESIDUAL_TOLERANCE * (1.0 + inf_norm(&system.rhs)) + floor;
    if residual.is_nan() || residual > bound {
        return Err(Error::ResidualTooLarge { residual, bound });
    }
    Ok((FemSolution::from_interior(mesh.clone(), &interior), elapsed))
}

pub fn assemble_poisson_system(mesh: &Mesh1D, f: impl Fn(f64) -> f64) -> AssembledSystem {
    AssembledSystem {
        matrix: assemble_poisson(mesh),
        rhs: load_vector(mesh, f),
        row_excess: poisson_row_excess(mesh),
    }
}

pub fn assemble_cdr_system(
    mesh: &Mesh1D,
    coeffs: &ProblemCoefficients,
    source: &FemSolution,
    load: StageTwoLoad,
) -> Result<AssembledSystem> {
    Ok(AssembledSystem {
        matrix: assemble_cdr(mesh, coeffs)?,
        rhs: stage_two_load(mesh, source, load)?,
        row_excess: cdr_row_excess(mesh, coeffs)?,
    })
}

fn timed_poisson(
    mesh: &Arc<Mesh1D>,
    f: impl Fn(f64) -> f64,
) -> Result<(FemSolution, StageTimings)> {
    let start = Instant::now();
    let system = assemble_poisson_system(mesh, f);
    let assembly = start.elapsed();
    let (w, solve) = solve_system(mesh, &system)?;
    Ok((w, StageTimings { assembly, solve }))
}

fn timed_cdr(
    mesh: &Arc<Mesh1D>,
    coeffs: &ProblemCoefficients,
    source: &FemSolution,
    load: StageTwoLoad,
) -> Result<(FemSolution, StageTimings)> {
    let start = Instant::now();
    let system = assemble_cdr_system(mesh, coeffs, source, load)?;
    let assembly = start.elapsed();
    let (u, solve) = solve_system(mesh, &system)?;
    Ok((u, StageTimings { assembly, solve }))
}

/// `-w'' = f`, `w(0) = w(1) = 0`.
pub fn solve_poisson(mesh: &Arc<Mesh1D>, f: impl Fn(f64) -> f64) -> Result<FemSolution> {
    timed_poisson(mesh, f).map(|(w, _)| w)
}

/// `-eps u'' - a u' + b u = source`, `u(0) = u(1) = 0`, with the default load rule.
pub fn solve_cdr(
    mesh: &Arc<Mesh1D>,
    coeffs: &ProblemCoefficients,
    source: &FemSolution,
) -> Result<FemSolution> {
    solve_cdr_with(mesh, coeffs, source, StageTwoLoad::default())
}

pub fn solve_cdr_with(
    mesh: &Arc<Mesh1D>,
    coeffs: &ProblemCoefficients,
    source: &FemSolution,
    load: StageTwoLoad,
) -> Result<FemSolution> {
    timed_cdr(mesh, coeffs, source, load).map(|(u, _)| u)
}

/// Approximates `-eps u'''' - a u''' + b u'' = -f` with `u = u'' = 0` at both
/// ends by solving `-w'' = f` and then `-eps u'' - a u' + b u = w_n` on the
/// same mesh.
pub fn solve_fourth_order(
    mesh: &Arc<Mesh1D>,
    coeffs: &ProblemCoefficients,
    f: impl Fn(f64) -> f64,
) -> Result<DecoupledSolution> {
    solve_fourth_order_with(mesh, coeffs, f, StageTwoLoad::default())
}

pub fn solve_fourth_order_with(
    mesh: &Arc<Mesh1D>,
    coeffs: &ProblemCoefficients,
    f: impl Fn(f64) -> f64,
    load: StageTwoLoad,
) -> Result<DecoupledSolution> {
    coeffs.validate()?;
    let (w, poisson) = timed_poisson(mesh, f)?;
    let (u, cdr) = timed_cdr(mesh, coeffs, &w, load)?;
    Ok(DecoupledSolution {
        w,
        u,
        timings: PipelineTimings { poisson, cdr },
    })
}
