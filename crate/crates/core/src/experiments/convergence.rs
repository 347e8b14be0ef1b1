//! Per-regularizer convergence traces on a single synthetic instance.

use rayon::prelude::*;

use super::data::SyntheticInstance;
use crate::error::Result;
use crate::regularizer::RegularizerKind;
use crate::solver::{solve, Solution, SolverConfig};

#[derive(Debug, Clone)]
pub struct ConvergenceRun {
    pub spec: RegularizerKind,
    pub solution: Solution,
}

impl ConvergenceRun {
    /// File-system friendly label, e.g. `hop-0.3`.
    pub fn file_stem(&self) -> String {
        self.spec.to_string().replace(':', "-")
    }
}

/// Solve `instance` once per spec, keeping the full traces.
pub fn convergence_run(
    instance: &SyntheticInstance,
    specs: &[RegularizerKind],
    base: &SolverConfig,
) -> Result<Vec<ConvergenceRun>> {
    specs
        .par_iter()
        .map(|&spec| {
            let config = SolverConfig { kind: spec, ..*base };
            let solution = solve(&instance.observed, &instance.mask, &config, Some(&instance.truth))?;
            Ok(ConvergenceRun { spec, solution })
        })
        .collect()
}
