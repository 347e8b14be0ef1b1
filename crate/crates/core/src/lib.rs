//! Low-tubal-rank tensor completion.
//!
//! The crate provides third-order tensor algebra under the t-product, a
//! deterministic complex Jacobi SVD, a family of nonconvex sparsity-inducing
//! regularizers with closed-form thresholding functions (HOP, HOW, HOC, plus
//! the soft-threshold baseline), the generalized tensor singular value
//! thresholding operator built on them, and an ADMM completion solver. The
//! [`experiments`] module holds the synthetic-data and image-metric harnesses.
//!
//! ```
//! use tubalkit::{experiments::data, solver, RegularizerKind};
//!
//! let truth = data::gen_lowrank(10, 10, 10, 1, 3).unwrap();
//! let mask = data::random_mask(truth.dims(), 0.8, 4).unwrap();
//! let observed = mask.apply(&truth).unwrap();
//! let config = solver::SolverConfig::new(RegularizerKind::hoc());
//! let sol = solver::solve(&observed, &mask, &config, Some(&truth)).unwrap();
//! assert!(sol.trace.last().unwrap().rre < 1e-3);
//! ```

pub mod error;
pub mod experiments;
pub mod format;
pub mod gtsvt;
pub mod linalg;
pub mod regularizer;
pub mod rng;
pub mod solver;
pub mod tensor;

pub use error::{Error, Result};
pub use regularizer::{RegularizerKind, RegularizerSpec};
pub use solver::{solve, SolverConfig, StopReason};
pub use tensor::{Mask, SpectralTensor3, Tensor3};
