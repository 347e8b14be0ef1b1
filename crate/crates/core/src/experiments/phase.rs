//! Recovery phase diagrams over (tubal rank, sampling rate).

use std::time::Instant;

use rayon::prelude::*;

use super::data::SyntheticInstance;
use crate::error::{Error, Result};
use crate::regularizer::RegularizerKind;
use crate::rng::derive_seed;
use crate::solver::{solve, SolverConfig};

/// A trial counts as a success when its final RRE is at most this.
pub const DEFAULT_SUCCESS_THRESHOLD: f64 = 1e-4;

pub const PHASE_CSV_HEADER: &str = "r,sr,spec,trial,rre,success,iters,seconds";

#[derive(Debug, Clone, PartialEq)]
pub struct PhaseGrid {
    pub ranks: Vec<usize>,
    pub sampling_rates: Vec<f64>,
    pub trials: usize,
    pub success_threshold: f64,
}

impl PhaseGrid {
    pub fn new(ranks: Vec<usize>, sampling_rates: Vec<f64>, trials: usize) -> Self {
        Self {
            ranks,
            sampling_rates,
            trials,
            success_threshold: DEFAULT_SUCCESS_THRESHOLD,
        }
    }

    pub fn validate(&self, n: usize) -> Result<()> {
        if self.ranks.is_empty() || self.sampling_rates.is_empty() || self.trials == 0 {
            return Err(Error::InvalidParam(
                "phase grid needs ranks, rates and at least one trial".into(),
            ));
        }
        if let Some(&r) = self.ranks.iter().find(|&&r| r == 0 || r > n) {
            return Err(Error::RankTooLarge { rank: r, max: n });
        }
        if let Some(&sr) = self.sampling_rates.iter().find(|&&sr| !(sr > 0.0 && sr <= 1.0)) {
            return Err(Error::InvalidRate(sr));
        }
        if self.success_threshold.is_nan() || self.success_threshold <= 0.0 {
            return Err(Error::InvalidParam("success threshold must be positive".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PhaseRecord {
    pub rank: usize,
    pub sr: f64,
    pub spec: RegularizerKind,
    pub trial: usize,
    pub rre: f64,
    pub success: bool,
    pub iters: usize,
    pub seconds: f64,
}

/// Run every (rank, rate, trial, spec) combination on `n x n x n` data.
///
/// All specs in a cell see the same instance; cell seeds are
/// `derive_seed(seed, [rank index, rate index, trial])`, so results do not
/// depend on scheduling. Records come back in grid order: rank, rate,
/// trial, then spec.
pub fn phase_transition(
    grid: &PhaseGrid,
    n: usize,
    specs: &[RegularizerKind],
    base: &SolverConfig,
    seed: u64,
) -> Result<Vec<PhaseRecord>> {
    grid.validate(n)?;
    if specs.is_empty() {
        return Err(Error::InvalidParam("no regularizers given".into()));
    }
    for s in specs {
        s.validate()?;
    }
    base.validate()?;

    let mut jobs = Vec::new();
    for (ri, &rank) in grid.ranks.iter().enumerate() {
        for (si, &sr) in grid.sampling_rates.iter().enumerate() {
            for trial in 0..grid.trials {
                for &spec in specs {
                    jobs.push((ri, rank, si, sr, trial, spec));
                }
            }
        }
    }
    jobs.par_iter()
        .map(|&(ri, rank, si, sr, trial, spec)| {
            let cell_seed = derive_seed(seed, &[ri as u64, si as u64, trial as u64]);
            let inst = SyntheticInstance::generate((n, n, n), rank, sr, cell_seed)?;
            let config = SolverConfig { kind: spec, ..*base };
            let start = Instant::now();
            let sol = solve(&inst.observed, &inst.mask, &config, Some(&inst.truth))?;
            let seconds = start.elapsed().as_secs_f64();
            let rre = super::metrics::rre(&sol.estimate, &inst.truth)?;
            Ok(PhaseRecord {
                rank,
                sr,
                spec,
                trial,
                rre,
                success: rre <= grid.success_threshold,
                iters: sol.iterations(),
                seconds,
            })
        })
        .collect()
}

/// Phase table as CSV. Wall-clock seconds are written only when
/// `with_timing` is set; otherwise the column holds 0 and the output is
/// reproducible byte for byte.
pub fn phase_csv(records: &[PhaseRecord], with_timing: bool) -> String {
    let mut out = String::from(PHASE_CSV_HEADER);
    out.push('\n');
    for r in records {
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{}\n",
            r.rank,
            r.sr,
            r.spec,
            r.trial,
            r.rre,
            u8::from(r.success),
            r.iters,
            if with_timing { r.seconds } else { 0.0 }
        ));
    }
    out
}

/// Number of successful trials per spec, in the order of `specs`.
pub fn success_counts(records: &[PhaseRecord], specs: &[RegularizerKind]) -> Vec<usize> {
    specs
        .iter()
        .map(|s| records.iter().filter(|r| r.spec == *s && r.success).count())
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_validation() {
        assert!(PhaseGrid::new(vec![1, 2], vec![0.5], 1).validate(10).is_ok());
        assert!(PhaseGrid::new(vec![], vec![0.5], 1).validate(10).is_err());
        assert!(PhaseGrid::new(vec![11], vec![0.5], 1).validate(10).is_err());
        assert!(PhaseGrid::new(vec![1], vec![0.0], 1).validate(10).is_err());
        assert!(PhaseGrid::new(vec![1], vec![0.5], 0).validate(10).is_err());
    }

    #[test]
    fn small_grid_layout_and_determinism() {
        let grid = PhaseGrid::new(vec![1, 2], vec![0.5, 0.9], 2);
        let specs = [RegularizerKind::Soft, RegularizerKind::hoc()];
        let cfg = SolverConfig::default();
        let a = phase_transition(&grid, 6, &specs, &cfg, 11).unwrap();
        assert_eq!(a.len(), 2 * 2 * 2 * 2);
        assert_eq!(
            (a[0].rank, a[0].sr, a[0].trial, a[0].spec),
            (1, 0.5, 0, RegularizerKind::Soft)
        );
        assert_eq!(a[1].spec, RegularizerKind::hoc());
        let b = phase_transition(&grid, 6, &specs, &cfg, 11).unwrap();
        assert_eq!(phase_csv(&a, false), phase_csv(&b, false));
        let csv = phase_csv(&a, false);
        assert!(csv.starts_with("r,sr,spec,trial,rre,success,iters,seconds\n"));
        assert!(csv.contains(",soft,") && csv.contains(",hoc,"));
        assert_eq!(success_counts(&a, &specs).len(), 2);
    }
}
