//! Closed-form solution of the model problem
//!
//! ```text
//! -eps u'''' - u''' + u'' = -1,   u(0) = u(1) = u''(0) = u''(1) = 0
//! ```
//!
//! split into `-w'' = 1` and `-eps u'' - u' + u = w`, whose solutions are
//! `w = x(1 - x)/2` and
//! `u = c1 exp(r1 x) + c2 exp(r2 x) - (x^2 + x + 1)/2 - eps`.

use crate::error::{Error, Result};
use crate::mesh::validate_epsilon;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExactModel {
    pub epsilon: f64,
    /// Slow root of `eps r^2 + r - 1 = 0`, close to 1.
    pub r1: f64,
    /// Fast negative root, about `-1/eps`; drives the layer at `x = 0`.
    pub r2: f64,
    pub c1: f64,
    pub c2: f64,
}

impl ExactModel {
    pub fn new(epsilon: f64) -> Result<Self> {
        validate_epsilon(epsilon)?;
        let root = (1.0 + 4.0 * epsilon).sqrt();
        let r1 = 2.0 / (1.0 + root);
        // Same root as 2 / (1 - root), without the cancellation in the denominator.
        let r2 = -(1.0 + root) / (2.0 * epsilon);
        let e1 = r1.exp();
        // exp(r2) underflows to 0 for small eps, which is the correct limit.
        let e2 = r2.exp();
        let c2 = (e1 * (0.5 + epsilon) - (1.5 + epsilon)) / (e1 - e2);
        let c1 = -c2 + (0.5 + epsilon);
        Ok(Self {
            epsilon,
            r1,
            r2,
            c1,
            c2,
        })
    }

    pub fn u(&self, x: f64) -> f64 {
        self.c1 * (self.r1 * x).exp() + self.c2 * (self.r2 * x).exp()
            - (x * x + x + 1.0) / 2.0
            - self.epsilon
    }

    /// Domain-checked evaluation of `u`.
    pub fn exact_u(&self, x: f64) -> Result<f64> {
        check_domain(x)?;
        Ok(self.u(x))
    }

    pub fn du(&self, x: f64) -> f64 {
        self.c1 * self.r1 * (self.r1 * x).exp() + self.c2 * self.r2 * (self.r2 * x).exp() - x - 0.5
    }

    pub fn d2u(&self, x: f64) -> f64 {
        self.c1 * self.r1 * self.r1 * (self.r1 * x).exp()
            + self.c2 * self.r2 * self.r2 * (self.r2 * x).exp()
            - 1.0
    }

    /// `-eps u'' - u' + u - w` from the analytic derivatives, divided by
    /// `max(1, sum of the magnitudes of the individual terms)`.
    ///
    /// For small `eps` the terms `eps r2^2 exp(r2 x)` are of size `1/eps` near
    /// the layer, so an unscaled residual only measures how well `r2` can be
    /// represented in floating point.
    pub fn stage_two_residual(&self, x: f64) -> f64 {
        let eps = self.epsilon;
        let mut scale = 1.0f64;
        let mut residual = 0.0;
        for (c, r) in [(self.c1, self.r1), (self.c2, self.r2)] {
            let e = c * (r * x).exp();
            residual += e * (-eps * r * r - r + 1.0);
            scale += (e * eps * r * r).abs() + (e * r).abs() + e.abs();
        }
        let p = -(x * x + x + 1.0) / 2.0 - eps;
        let dp = -x - 0.5;
        let d2p = -1.0;
        residual += -eps * d2p - dp + p - w(x);
        scale += eps + dp.abs() + p.abs() + w(x);
        residual / scale.max(1.0)
    }

    /// `eps r^2 + r - 1` relative to `1 + |eps r^2| + |r|`, for each root.
    pub fn root_residuals(&self) -> [f64; 2] {
        let eps = self.epsilon;
        [self.r1, self.r2].map(|r| (eps * r * r + r - 1.0) / (1.0 + (eps * r * r).abs() + r.abs()))
    }
}

pub fn make_exact_model(epsilon: f64) -> Result<ExactModel> {
    ExactModel::new(epsilon)
}

fn check_domain(x: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&x) {
        return Err(Error::invalid("x", format!("must lie in [0, 1], got {x}")));
    }
    Ok(())
}

fn w(x: f64) -> f64 {
    x * (1.0 - x) / 2.0
}

/// Exact Poisson-stage solution `x(1 - x)/2`.
pub fn exact_w(x: f64) -> Result<f64> {
    check_domain(x)?;
    Ok(w(x))
}

/// Model right-hand side, identically one.
pub fn exact_f(_x: f64) -> f64 {
    1.0
}
