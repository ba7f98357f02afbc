//! Linear finite element assembly on arbitrary partitions of `[0, 1]`.
//!
//! Both stages use continuous piecewise-linear hat functions with the two
//! Dirichlet nodes eliminated, so every system lives on the `N - 1` interior
//! nodes. The reaction-convection-diffusion stage uses the weak form
//!
//! ```text
//! eps (u', v') - a (u', v) + b (u, v) = (w, v)
//! ```

use crate::error::{Error, Result};
use crate::mesh::Mesh1D;
use crate::solver::FemSolution;
use crate::tridiag::TridiagonalMatrix;

/// Constant coefficients of `-eps u'' - a u' + b u = w`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProblemCoefficients {
    pub epsilon: f64,
    pub a: f64,
    pub b: f64,
}

impl ProblemCoefficients {
    pub fn new(epsilon: f64, a: f64, b: f64) -> Result<Self> {
        let coeffs = Self { epsilon, a, b };
        coeffs.validate()?;
        Ok(coeffs)
    }

    /// `a = b = 1`, the model problem.
    pub fn model(epsilon: f64) -> Result<Self> {
        Self::new(epsilon, 1.0, 1.0)
    }

    pub fn validate(&self) -> Result<()> {
        crate::mesh::validate_epsilon(self.epsilon)?;
        if !(self.a.is_finite() && self.a > 0.0) {
            return Err(Error::invalid("a", format!("must be > 0, got {}", self.a)));
        }
        if !(self.b.is_finite() && self.b >= 0.0) {
            return Err(Error::invalid("b", format!("must be >= 0, got {}", self.b)));
        }
        Ok(())
    }
}

pub type Local = [[f64; 2]; 2];

/// Element matrices on one element of length `h`; entry `[i][j]` pairs
/// test function `i` with trial function `j`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ElementMatrices {
    /// `int phi_j' phi_i'`
    pub stiffness: Local,
    /// `int phi_j' phi_i`
    pub convection: Local,
    /// `int phi_j phi_i`
    pub mass: Local,
}

pub fn element_matrices(h: f64) -> Result<ElementMatrices> {
    if !(h.is_finite() && h > 0.0) {
        return Err(Error::invalid(
            "h",
            format!("element length must be > 0, got {h}"),
        ));
    }
    let k = 1.0 / h;
    let m = h / 6.0;
    Ok(ElementMatrices {
        stiffness: [[k, -k], [-k, k]],
        convection: [[-0.5, 0.5], [-0.5, 0.5]],
        mass: [[2.0 * m, m], [m, 2.0 * m]],
    })
}

impl ElementMatrices {
    /// `eps K - a C + b M`.
    pub fn combined(&self, coeffs: &ProblemCoefficients) -> Local {
        let mut out = [[0.0; 2]; 2];
        for (i, row) in out.iter_mut().enumerate() {
            for (j, v) in row.iter_mut().enumerate() {
                *v = coeffs.epsilon * self.stiffness[i][j] - coeffs.a * self.convection[i][j]
                    + coeffs.b * self.mass[i][j];
            }
        }
        out
    }
}

/// Interior-node operator plus right-hand side.
#[derive(Debug, Clone, PartialEq)]
pub struct AssembledSystem {
    pub matrix: TridiagonalMatrix,
    pub rhs: Vec<f64>,
    /// `diag[i] - |sub[i - 1]| - |sup[i]|`, from element row sums.
    pub row_excess: Vec<f64>,
}

impl AssembledSystem {
    pub fn solve(&self) -> Result<Vec<f64>> {
        self.matrix.solve_with_excess(&self.rhs, &self.row_excess)
    }
}

/// Scatters element contributions into the interior-node matrix.
fn assemble_with(mesh: &Mesh1D, local: impl Fn(f64) -> Local) -> TridiagonalMatrix {
    let n = mesh.n_intervals();
    let mut matrix = TridiagonalMatrix::zeros(n - 1);
    for (e, &h) in mesh.element_lengths().iter().enumerate() {
        let block = local(h);
        // Element e joins global nodes e and e + 1, i.e. interior rows e - 1 and e.
        let rows = [e.checked_sub(1), (e + 1 < n).then_some(e)];
        for (i, gi) in rows.iter().enumerate() {
            let Some(gi) = *gi else { continue };
            for (j, gj) in rows.iter().enumerate() {
                let Some(gj) = *gj else { continue };
                matrix.add(gi, gj, block[i][j]);
            }
        }
    }
    matrix
}

/// Row excesses of the matrix built by [`assemble_with`], accumulated per
/// element from the exact row sum `row_sum(h)` of the element block rather
/// than from the rounded entries.
fn excess_with(mesh: &Mesh1D, local: impl Fn(f64) -> (Local, f64)) -> Vec<f64> {
    let n = mesh.n_intervals();
    let mut excess = vec![0.0; n - 1];
    for (e, &h) in mesh.element_lengths().iter().enumerate() {
        let (block, row_sum) = local(h);
        let rows = [e.checked_sub(1), (e + 1 < n).then_some(e)];
        for r in 0..2 {
            let Some(gi) = rows[r] else { continue };
            let s = 1 - r;
            excess[gi] += match rows[s] {
                None => block[r][r],
                Some(_) if block[r][s] <= 0.0 => row_sum,
                Some(_) => row_sum - 2.0 * block[r][s],
            };
        }
    }
    excess
}

pub fn poisson_row_excess(mesh: &Mesh1D) -> Vec<f64> {
    excess_with(mesh, |h| {
        let k = 1.0 / h;
        ([[k, -k], [-k, k]], 0.0)
    })
}

/// Stiffness and convection rows sum to zero, mass rows to `h/2`.
pub fn cdr_row_excess(mesh: &Mesh1D, coeffs: &ProblemCoefficients) -> Result<Vec<f64>> {
    coeffs.validate()?;
    Ok(excess_with(mesh, |h| {
        let block = element_matrices(h)
            .expect("mesh element lengths are positive")
            .combined(coeffs);
        (block, coeffs.b * h * 0.5)
    }))
}

/// Operator of `(w', v')`.
pub fn assemble_poisson(mesh: &Mesh1D) -> TridiagonalMatrix {
    assemble_with(mesh, |h| {
        let k = 1.0 / h;
        [[k, -k], [-k, k]]
    })
}

/// Operator of `eps (u', v') - a (u', v) + b (u, v)`.
pub fn assemble_cdr(mesh: &Mesh1D, coeffs: &ProblemCoefficients) -> Result<TridiagonalMatrix> {
    coeffs.validate()?;
    Ok(assemble_with(mesh, |h| {
        element_matrices(h)
            .expect("mesh element lengths are positive")
            .combined(coeffs)
    }))
}

/// Operator of `(u, v)`.
pub fn assemble_mass(mesh: &Mesh1D) -> TridiagonalMatrix {
    assemble_with(mesh, |h| {
        let m = h / 6.0;
        [[2.0 * m, m], [m, 2.0 * m]]
    })
}

/// `(f, phi_i)` for interior hats, by two-point Gauss quadrature per element.
pub fn load_vector(mesh: &Mesh1D, f: impl Fn(f64) -> f64) -> Vec<f64> {
    let n = mesh.n_intervals();
    let x = mesh.nodes();
    let offset = 0.5 / 3f64.sqrt();
    let mut rhs = vec![0.0; n - 1];
    for (e, &h) in mesh.element_lengths().iter().enumerate() {
        let mid = 0.5 * (x[e] + x[e + 1]);
        let mut left = 0.0;
        let mut right = 0.0;
        for t in [-offset, offset] {
            // Local coordinate s in [0, 1]: phi_left = 1 - s, phi_right = s.
            let s = 0.5 + t;
            let fx = f(mid + t * h);
            left += fx * (1.0 - s);
            right += fx * s;
        }
        if e >= 1 {
            rhs[e - 1] += 0.5 * h * left;
        }
        if e + 1 < n {
            rhs[e] += 0.5 * h * right;
        }
    }
    rhs
}

/// How the stage-two load `(w_n, phi_i)` is integrated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum StageTwoLoad {
    /// Nodal (trapezoidal) quadrature: `(h_i + h_{i+1}) / 2 * w_i`.
    #[default]
    Lumped,
    /// Exact integration with the consistent mass matrix.
    Consistent,
}

impl std::str::FromStr for StageTwoLoad {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "lumped" => Ok(StageTwoLoad::Lumped),
            "consistent" => Ok(StageTwoLoad::Consistent),
            other => Err(Error::invalid(
                "load",
                format!("unknown stage-two load `{other}` (expected lumped or consistent)"),
            )),
        }
    }
}

/// Stage-two load vector for the chosen integration rule.
pub fn stage_two_load(mesh: &Mesh1D, w: &FemSolution, rule: StageTwoLoad) -> Result<Vec<f64>> {
    match rule {
        StageTwoLoad::Lumped => load_vector_lumped(mesh, w),
        StageTwoLoad::Consistent => load_vector_from_solution(mesh, w),
    }
}

/// `(w, phi_i)` by the trapezoidal rule on each element, i.e. the lumped mass matrix.
pub fn load_vector_lumped(mesh: &Mesh1D, w: &FemSolution) -> Result<Vec<f64>> {
    if !w.is_on(mesh) {
        return Err(Error::MeshMismatch);
    }
    let h = mesh.element_lengths();
    Ok(w.interior()
        .iter()
        .enumerate()
        .map(|(k, wi)| 0.5 * (h[k] + h[k + 1]) * wi)
        .collect())
}

/// `(w, phi_i)` for a piecewise-linear `w`, evaluated exactly with the mass matrix.
pub fn load_vector_from_solution(mesh: &Mesh1D, w: &FemSolution) -> Result<Vec<f64>> {
    if !w.is_on(mesh) {
        return Err(Error::MeshMismatch);
    }
    let n = mesh.n_intervals();
    let v = w.values();
    let h = mesh.element_lengths();
    Ok((1..n)
        .map(|i| h[i - 1] / 6.0 * (v[i - 1] + 2.0 * v[i]) + h[i] / 6.0 * (2.0 * v[i] + v[i + 1]))
        .collect())
}
