//! Synthetic-data protocol, image metrics and the experiment harnesses.

pub mod convergence;
pub mod data;
pub mod metrics;
pub mod phase;

pub use data::{gen_lowrank, random_mask, stripe_mask, SyntheticInstance};
pub use metrics::{psnr, rmse, rre, ssim, MetricsReport};
pub use phase::{phase_transition, PhaseGrid, PhaseRecord};
