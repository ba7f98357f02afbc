//! Uniform and Shishkin partitions of the unit interval.
//!
//! A Shishkin mesh splits `[0, 1]` at a transition point `tau` and places
//! half of the elements in the layer region `[0, tau]` and the other half in
//! `[tau, 1]`, equidistant within each part. The layer is assumed to sit at
//! `x = 0`, which is where it forms for a positive convection coefficient in
//! `-eps u'' - a u' + b u = w`.

use crate::error::{Error, Result};

/// Default Shishkin mesh constant, `k + 1` for linear elements.
pub const DEFAULT_SIGMA: f64 = 2.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum MeshKind {
    Uniform,
    Shishkin,
}

impl MeshKind {
    pub fn as_str(self) -> &'static str {
        match self {
            MeshKind::Uniform => "uniform",
            MeshKind::Shishkin => "shishkin",
        }
    }
}

impl std::fmt::Display for MeshKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for MeshKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "uniform" => Ok(MeshKind::Uniform),
            "shishkin" => Ok(MeshKind::Shishkin),
            other => Err(Error::invalid(
                "mesh",
                format!("unknown mesh kind `{other}` (expected uniform or shishkin)"),
            )),
        }
    }
}

/// Parameters of a Shishkin mesh.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ShishkinParams {
    pub n_intervals: usize,
    pub epsilon: f64,
    /// Lower bound of the convection coefficient.
    pub alpha: f64,
    pub sigma: f64,
}

impl ShishkinParams {
    pub fn new(n_intervals: usize, epsilon: f64) -> Self {
        Self {
            n_intervals,
            epsilon,
            alpha: 1.0,
            sigma: DEFAULT_SIGMA,
        }
    }

    pub fn with_alpha(mut self, alpha: f64) -> Self {
        self.alpha = alpha;
        self
    }

    pub fn with_sigma(mut self, sigma: f64) -> Self {
        self.sigma = sigma;
        self
    }

    pub fn validate(&self) -> Result<()> {
        validate_intervals(self.n_intervals)?;
        validate_epsilon(self.epsilon)?;
        if !(self.alpha.is_finite() && self.alpha > 0.0) {
            return Err(Error::invalid(
                "alpha",
                format!("must be > 0, got {}", self.alpha),
            ));
        }
        if !(self.sigma.is_finite() && self.sigma >= 2.0) {
            return Err(Error::invalid(
                "sigma",
                format!("must be >= 2, got {}", self.sigma),
            ));
        }
        Ok(())
    }

    /// `tau = min(1/2, sigma / alpha * eps * ln N)`.
    pub fn transition_point(&self) -> f64 {
        let n = self.n_intervals as f64;
        (self.sigma / self.alpha * self.epsilon * n.ln()).min(0.5)
    }
}

pub(crate) fn validate_intervals(n: usize) -> Result<()> {
    if n < 4 {
        return Err(Error::invalid("n", format!("must be >= 4, got {n}")));
    }
    if !n.is_multiple_of(2) {
        return Err(Error::invalid("n", format!("must be even, got {n}")));
    }
    Ok(())
}

pub(crate) fn validate_epsilon(eps: f64) -> Result<()> {
    if !(eps.is_finite() && eps > 0.0 && eps <= 1.0) {
        return Err(Error::invalid(
            "epsilon",
            format!("must lie in (0, 1], got {eps}"),
        ));
    }
    Ok(())
}

/// Ordered partition `0 = x_0 < x_1 < ... < x_N = 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct Mesh1D {
    nodes: Vec<f64>,
    element_lengths: Vec<f64>,
    kind: MeshKind,
    tau: Option<f64>,
}

impl Mesh1D {
    fn from_nodes(nodes: Vec<f64>, kind: MeshKind, tau: Option<f64>) -> Self {
        // Differences of neighbouring nodes are exact in floating point, so the
        // running sum of the lengths reproduces the node coordinates.
        let element_lengths = nodes.windows(2).map(|w| w[1] - w[0]).collect();
        Self {
            nodes,
            element_lengths,
            kind,
            tau,
        }
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn element_lengths(&self) -> &[f64] {
        &self.element_lengths
    }

    pub fn kind(&self) -> MeshKind {
        self.kind
    }

    /// Transition point; `None` for uniform meshes.
    pub fn tau(&self) -> Option<f64> {
        self.tau
    }

    pub fn n_intervals(&self) -> usize {
        self.element_lengths.len()
    }

    /// Number of interior nodes (unknowns once the Dirichlet nodes are removed).
    pub fn n_interior(&self) -> usize {
        self.nodes.len() - 2
    }

    pub fn max_element_length(&self) -> f64 {
        self.element_lengths.iter().copied().fold(0.0, f64::max)
    }

    /// Index of the element containing `x` (right-closed except for the first).
    pub fn locate(&self, x: f64) -> usize {
        let idx = self.nodes.partition_point(|&node| node < x);
        idx.clamp(1, self.n_intervals()) - 1
    }
}

/// Piecewise-equidistant Shishkin mesh with the fine half on `[0, tau]`.
pub fn build_shishkin(params: &ShishkinParams) -> Result<Mesh1D> {
    params.validate()?;
    let n = params.n_intervals;
    let half = n / 2;
    let tau = params.transition_point();
    let fine = 2.0 * tau / n as f64;
    let coarse = 2.0 * (1.0 - tau) / n as f64;

    let mut nodes = Vec::with_capacity(n + 1);
    nodes.extend((0..=half).map(|i| i as f64 * fine));
    nodes[half] = tau;
    nodes.extend((1..=half).map(|j| tau + j as f64 * coarse));
    nodes[n] = 1.0;

    Ok(Mesh1D::from_nodes(nodes, MeshKind::Shishkin, Some(tau)))
}

pub fn build_uniform(n_intervals: usize) -> Result<Mesh1D> {
    validate_intervals(n_intervals)?;
    let h = 1.0 / n_intervals as f64;
    let mut nodes: Vec<f64> = (0..=n_intervals).map(|i| i as f64 * h).collect();
    nodes[n_intervals] = 1.0;
    Ok(Mesh1D::from_nodes(nodes, MeshKind::Uniform, None))
}

/// Builds a mesh of the requested kind; `params.epsilon` etc. are ignored for uniform meshes.
pub fn build(kind: MeshKind, params: &ShishkinParams) -> Result<Mesh1D> {
    match kind {
        MeshKind::Uniform => build_uniform(params.n_intervals),
        MeshKind::Shishkin => build_shishkin(params),
    }
}

/// Whether `eps <= c / N`, the convection-dominated regime the Shishkin analysis assumes.
pub fn check_assumption(params: &ShishkinParams, c: f64) -> bool {
    params.epsilon <= c / params.n_intervals as f64
}
