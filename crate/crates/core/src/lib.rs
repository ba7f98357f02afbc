//! Finite element solver for fourth-order singularly perturbed two-point
//! boundary value problems with Lidstone boundary conditions,
//!
//! ```text
//! -eps u'''' - a u''' + b u'' = -f  on (0, 1),   u = u'' = 0 at x = 0, 1,
//! ```
//!
//! solved by splitting into a Poisson problem `-w'' = f` and a singularly
//! perturbed second-order problem `-eps u'' - a u' + b u = w`, each
//! discretised with linear elements on a uniform or Shishkin mesh and solved
//! directly in `O(N)`.
//!
//! ```
//! use std::sync::Arc;
//! use lidstone_fem::{mesh, oracle, solver, assembly::ProblemCoefficients};
//!
//! let eps = 1e-8;
//! let mesh = Arc::new(mesh::build_shishkin(&mesh::ShishkinParams::new(64, eps)).unwrap());
//! let coeffs = ProblemCoefficients::model(eps).unwrap();
//! let sol = solver::solve_fourth_order(&mesh, &coeffs, oracle::exact_f).unwrap();
//! let exact = oracle::make_exact_model(eps).unwrap();
//! let err = lidstone_fem::experiments::max_error(&sol.u, &exact, Default::default());
//! assert!(err < 1e-3);
//! ```

pub mod assembly;
pub mod error;
pub mod experiments;
pub mod mesh;
pub mod oracle;
pub mod solver;
pub mod tridiag;

pub use error::{Error, Result};
