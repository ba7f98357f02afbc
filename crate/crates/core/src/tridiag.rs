//! Three-band matrices and the Thomas direct solver.

use crate::error::{Error, Result};

/// Pivots smaller than this in magnitude are treated as a breakdown.
pub const PIVOT_FLOOR: f64 = 1e-30;

/// Square tridiagonal matrix stored as three bands.
///
/// `sub[i]` is entry `(i + 1, i)` and `sup[i]` is entry `(i, i + 1)`.
#[derive(Debug, Clone, PartialEq)]
pub struct TridiagonalMatrix {
    sub: Vec<f64>,
    diag: Vec<f64>,
    sup: Vec<f64>,
}

impl TridiagonalMatrix {
    pub fn new(sub: Vec<f64>, diag: Vec<f64>, sup: Vec<f64>) -> Result<Self> {
        let n = diag.len();
        if n == 0 {
            return Err(Error::invalid("diag", "matrix needs at least one row"));
        }
        for (context, band) in [("sub band", &sub), ("sup band", &sup)] {
            if band.len() != n - 1 {
                return Err(Error::DimensionMismatch {
                    context,
                    expected: n - 1,
                    found: band.len(),
                });
            }
        }
        if !sub.iter().chain(&diag).chain(&sup).all(|v| v.is_finite()) {
            return Err(Error::invalid("entries", "matrix entries must be finite"));
        }
        Ok(Self { sub, diag, sup })
    }

    pub fn identity(n: usize) -> Result<Self> {
        Self::new(
            vec![0.0; n.saturating_sub(1)],
            vec![1.0; n],
            vec![0.0; n.saturating_sub(1)],
        )
    }

    /// Matrix with constant bands `(lower, center, upper)`.
    pub fn from_stencil(n: usize, lower: f64, center: f64, upper: f64) -> Result<Self> {
        Self::new(
            vec![lower; n.saturating_sub(1)],
            vec![center; n],
            vec![upper; n.saturating_sub(1)],
        )
    }

    pub(crate) fn zeros(n: usize) -> Self {
        Self {
            sub: vec![0.0; n - 1],
            diag: vec![0.0; n],
            sup: vec![0.0; n - 1],
        }
    }

    pub fn n(&self) -> usize {
        self.diag.len()
    }

    pub fn sub(&self) -> &[f64] {
        &self.sub
    }

    pub fn diag(&self) -> &[f64] {
        &self.diag
    }

    pub fn sup(&self) -> &[f64] {
        &self.sup
    }

    /// Entry `(i, j)`, zero outside the bands.
    pub fn get(&self, i: usize, j: usize) -> f64 {
        if i == j {
            self.diag[i]
        } else if i == j + 1 {
            self.sub[j]
        } else if j == i + 1 {
            self.sup[i]
        } else {
            0.0
        }
    }

    /// Adds `value` to entry `(i, j)`; `(i, j)` must lie on a band.
    pub(crate) fn add(&mut self, i: usize, j: usize, value: f64) {
        if i == j {
            self.diag[i] += value;
        } else if i == j + 1 {
            self.sub[j] += value;
        } else if j == i + 1 {
            self.sup[i] += value;
        } else {
            unreachable!("({i}, {j}) is outside the tridiagonal bands");
        }
    }

    pub fn transpose(&self) -> Self {
        Self {
            sub: self.sup.clone(),
            diag: self.diag.clone(),
            sup: self.sub.clone(),
        }
    }

    pub fn scaled(&self, factor: f64) -> Self {
        let scale = |band: &[f64]| band.iter().map(|v| v * factor).collect();
        Self {
            sub: scale(&self.sub),
            diag: scale(&self.diag),
            sup: scale(&self.sup),
        }
    }

    pub fn add_matrix(&self, other: &Self) -> Result<Self> {
        self.check_len("matrix sum", other.n())?;
        let sum = |a: &[f64], b: &[f64]| a.iter().zip(b).map(|(x, y)| x + y).collect();
        Ok(Self {
            sub: sum(&self.sub, &other.sub),
            diag: sum(&self.diag, &other.diag),
            sup: sum(&self.sup, &other.sup),
        })
    }

    pub fn is_symmetric(&self) -> bool {
        self.sub == self.sup
    }

    /// Row-major dense copy, intended for tests and small diagnostics.
    pub fn to_dense(&self) -> Vec<Vec<f64>> {
        let n = self.n();
        (0..n)
            .map(|i| (0..n).map(|j| self.get(i, j)).collect())
            .collect()
    }

    fn check_len(&self, context: &'static str, found: usize) -> Result<()> {
        if found != self.n() {
            return Err(Error::DimensionMismatch {
                context,
                expected: self.n(),
                found,
            });
        }
        Ok(())
    }

    /// `y = A x`.
    pub fn matvec(&self, x: &[f64]) -> Result<Vec<f64>> {
        self.check_len("matvec", x.len())?;
        let n = self.n();
        let mut y: Vec<f64> = self.diag.iter().zip(x).map(|(d, xi)| d * xi).collect();
        for i in 0..n - 1 {
            y[i] += self.sup[i] * x[i + 1];
            y[i + 1] += self.sub[i] * x[i];
        }
        Ok(y)
    }

    /// Solves `A x = rhs` by forward elimination and back substitution, without pivoting.
    pub fn solve(&self, rhs: &[f64]) -> Result<Vec<f64>> {
        self.check_len("solve", rhs.len())?;
        let n = self.n();
        // Modified super-diagonal and right-hand side after elimination.
        let mut upper = vec![0.0; n];
        let mut x = vec![0.0; n];

        let mut pivot = self.diag[0];
        if pivot.abs() < PIVOT_FLOOR || !pivot.is_finite() {
            return Err(Error::SingularPivot { row: 0, pivot });
        }
        if n > 1 {
            upper[0] = self.sup[0] / pivot;
        }
        x[0] = rhs[0] / pivot;

        for i in 1..n {
            pivot = self.diag[i] - self.sub[i - 1] * upper[i - 1];
            if pivot.abs() < PIVOT_FLOOR || !pivot.is_finite() {
                return Err(Error::SingularPivot { row: i, pivot });
            }
            if i < n - 1 {
                upper[i] = self.sup[i] / pivot;
            }
            x[i] = (rhs[i] - self.sub[i - 1] * x[i - 1]) / pivot;
        }

        for i in (0..n - 1).rev() {
            x[i] -= upper[i] * x[i + 1];
        }
        Ok(x)
    }

    /// `|| |A| |x| ||_inf`, the scale against which residuals of `x` are rounded.
    pub fn abs_product_norm(&self, x: &[f64]) -> Result<f64> {
        self.check_len("abs product", x.len())?;
        let n = self.n();
        let mut worst = 0.0f64;
        for i in 0..n {
            let mut row = (self.diag[i] * x[i]).abs();
            if i > 0 {
                row += (self.sub[i - 1] * x[i - 1]).abs();
            }
            if i + 1 < n {
                row += (self.sup[i] * x[i + 1]).abs();
            }
            worst = worst.max(row);
        }
        Ok(worst)
    }

    /// Solves `A x = rhs` for a matrix with positive diagonal, given the row
    /// excesses `excess[i] = diag[i] - |sub[i - 1]| - |sup[i]|`.
    ///
    /// When the excesses are known more accurately than the difference of the
    /// rounded entries (FEM rows whose entries sum to nearly zero), the pivots
    /// are formed from sums of nonnegative terms only and keep full relative
    /// accuracy. Falls back to [`TridiagonalMatrix::solve`] if any excess is
    /// negative or any diagonal entry is not positive.
    pub fn solve_with_excess(&self, rhs: &[f64], excess: &[f64]) -> Result<Vec<f64>> {
        self.check_len("solve", rhs.len())?;
        self.check_len("row excess", excess.len())?;
        let dominant =
            excess.iter().all(|&v| v >= 0.0 && v.is_finite()) && self.diag.iter().all(|&d| d > 0.0);
        if !dominant {
            return self.solve(rhs);
        }
        let n = self.n();
        let sup_abs = |i: usize| if i + 1 < n { self.sup[i].abs() } else { 0.0 };
        let mut pivots = vec![0.0; n];
        let mut x = vec![0.0; n];

        // Excess of the current row once its sub-diagonal entry is eliminated.
        let mut reduced = excess[0];
        pivots[0] = reduced + sup_abs(0);
        x[0] = rhs[0];
        for i in 1..n {
            let prev = pivots[i - 1];
            if prev < PIVOT_FLOOR || !prev.is_finite() {
                return Err(Error::SingularPivot {
                    row: i - 1,
                    pivot: prev,
                });
            }
            let l = self.sub[i - 1];
            let u = self.sup[i - 1];
            let gain = if l * u >= 0.0 {
                reduced
            } else {
                prev + u.abs()
            };
            reduced = excess[i] + l.abs() * gain / prev;
            pivots[i] = reduced + sup_abs(i);
            x[i] = rhs[i] - l / prev * x[i - 1];
        }
        let last = pivots[n - 1];
        if last < PIVOT_FLOOR || !last.is_finite() {
            return Err(Error::SingularPivot {
                row: n - 1,
                pivot: last,
            });
        }

        x[n - 1] /= last;
        for i in (0..n - 1).rev() {
            x[i] = (x[i] - self.sup[i] * x[i + 1]) / pivots[i];
        }
        Ok(x)
    }

    /// `||A x - b||_inf`, each row accumulated with error-free products and
    /// compensated summation.
    pub fn residual_norm(&self, x: &[f64], rhs: &[f64]) -> Result<f64> {
        self.check_len("residual", x.len())?;
        self.check_len("residual", rhs.len())?;
        let n = self.n();
        let mut worst = 0.0f64;
        for i in 0..n {
            let mut acc = CompensatedSum::default();
            acc.add_product(self.diag[i], x[i]);
            if i > 0 {
                acc.add_product(self.sub[i - 1], x[i - 1]);
            }
            if i + 1 < n {
                acc.add_product(self.sup[i], x[i + 1]);
            }
            acc.add(-rhs[i]);
            worst = worst.max(acc.value().abs());
        }
        Ok(worst)
    }
}

/// Neumaier summation fed with exact product splits.
#[derive(Default)]
struct CompensatedSum {
    sum: f64,
    correction: f64,
}

impl CompensatedSum {
    fn add(&mut self, v: f64) {
        let t = self.sum + v;
        if self.sum.abs() >= v.abs() {
            self.correction += (self.sum - t) + v;
        } else {
            self.correction += (v - t) + self.sum;
        }
        self.sum = t;
    }

    fn add_product(&mut self, a: f64, b: f64) {
        let p = a * b;
        self.add(p);
        self.add(a.mul_add(b, -p));
    }

    fn value(&self) -> f64 {
        self.sum + self.correction
    }
}

pub fn inf_norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x.abs()).fold(0.0, f64::max)
}
