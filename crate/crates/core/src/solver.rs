//! ADMM solver for low-tubal-rank tensor completion.
//!
//! Solves `min ‖M‖_φ  s.t.  M + E = X, E_Ω = 0` with the iteration
//!
//! ```text
//! E_{n+1} = -M_n + P_n / ρ_n        on Ω^c, 0 on Ω
//! M_{n+1} = GTSVT(X - E_{n+1} + P_n / ρ_n, λ = 1/ρ_n)
//! P_{n+1} = P_n + ρ_n (X - M_{n+1} - E_{n+1})
//! ρ_{n+1} = µ ρ_n
//! ```
//!
//! stopping once the ℓ∞ changes of `M`, `E` and the residual `X - M - E` all
//! fall to `ξ`, or after `max_iters` iterations.

use std::fmt;
use std::time::Instant;

use crate::error::{Error, Result};
use crate::experiments::metrics::rre;
use crate::gtsvt::gtsvt;
use crate::regularizer::{RegularizerKind, RegularizerSpec};
use crate::tensor::{Mask, Tensor3};

/// Slack added to the multiplier bound `‖P‖²_F ≤ min(n1, n2)`.
pub const MULTIPLIER_BOUND_SLACK: f64 = 1e-6;
/// The loop gives up (reporting `MaxIters`) once ρ passes this.
pub const RHO_LIMIT: f64 = 1e30;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverConfig {
    pub kind: RegularizerKind,
    pub rho0: f64,
    pub mu: f64,
    /// Stopping tolerance ξ.
    pub xi: f64,
    pub max_iters: usize,
}

impl SolverConfig {
    pub fn new(kind: RegularizerKind) -> Self {
        Self {
            kind,
            rho0: 1e-4,
            mu: 1.2,
            xi: 1e-4,
            max_iters: 500,
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.kind.validate()?;
        if !(self.rho0 > 0.0 && self.rho0.is_finite()) {
            return Err(Error::InvalidParam(format!("rho0 must be positive, got {}", self.rho0)));
        }
        if !(self.mu > 1.0 && self.mu.is_finite()) {
            return Err(Error::InvalidParam(format!("mu must exceed 1, got {}", self.mu)));
        }
        if !(self.xi > 0.0 && self.xi.is_finite()) {
            return Err(Error::InvalidParam(format!("xi must be positive, got {}", self.xi)));
        }
        if self.max_iters == 0 {
            return Err(Error::InvalidParam("max_iters must be at least 1".into()));
        }
        Ok(())
    }

    /// Penalty after `n` completed iterations, `ρ0 µ^n`.
    pub fn rho_at(&self, n: usize) -> f64 {
        self.rho0 * self.mu.powi(n as i32)
    }

    /// Regularizer used in iteration `n` (0-based), `λ = 1/ρ_n`.
    pub fn spec_at(&self, n: usize) -> Result<RegularizerSpec> {
        RegularizerSpec::new(self.kind, 1.0 / self.rho_at(n))
    }
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self::new(RegularizerKind::Soft)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolverState {
    /// Estimate M.
    pub m: Tensor3,
    /// Complement fill E, zero on Ω.
    pub e: Tensor3,
    /// Multiplier P.
    pub p: Tensor3,
    pub rho: f64,
    /// Completed iterations.
    pub iter: usize,
}

impl SolverState {
    /// `M_0 = X_Ω`, `E_0 = 0`, `P_0 = 0`.
    pub fn initial(x_obs: &Tensor3, rho0: f64) -> Self {
        let (n1, n2, n3) = x_obs.dims();
        Self {
            m: x_obs.clone(),
            e: Tensor3::zeros(n1, n2, n3),
            p: Tensor3::zeros(n1, n2, n3),
            rho: rho0,
            iter: 0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TraceRow {
    pub iter: usize,
    /// ρ used during this iteration.
    pub rho: f64,
    /// NaN when no ground truth was supplied.
    pub rre: f64,
    pub chg_m: f64,
    pub chg_e: f64,
    pub chg_x: f64,
    /// `‖P_{n+1}‖²_F`
    pub p_norm: f64,
}

impl TraceRow {
    pub fn chg(&self) -> f64 {
        self.chg_m.max(self.chg_e).max(self.chg_x)
    }
}

pub const TRACE_CSV_HEADER: &str = "iter,rho,rre,chg_m,chg_e,chg_x,p_norm";

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Trace {
    pub rows: Vec<TraceRow>,
}

impl Trace {
    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn last(&self) -> Option<&TraceRow> {
        self.rows.last()
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::with_capacity(64 * (self.rows.len() + 1));
        out.push_str(TRACE_CSV_HEADER);
        out.push('\n');
        for r in &self.rows {
            out.push_str(&format!(
                "{},{},{},{},{},{},{}\n",
                r.iter, r.rho, r.rre, r.chg_m, r.chg_e, r.chg_x, r.p_norm
            ));
        }
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StopReason {
    Converged,
    MaxIters,
}

impl fmt::Display for StopReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            StopReason::Converged => "Converged",
            StopReason::MaxIters => "MaxIters",
        })
    }
}

#[derive(Debug, Clone)]
pub struct Solution {
    pub estimate: Tensor3,
    pub trace: Trace,
    pub stop_reason: StopReason,
    pub state: SolverState,
    pub runtime_seconds: f64,
}

impl Solution {
    pub fn iterations(&self) -> usize {
        self.trace.len()
    }
}

/// Closed-form E-step: `-M + P/ρ` off Ω, zero on Ω.
pub fn update_e(state: &SolverState, x_obs: &Tensor3, mask: &Mask) -> Result<Tensor3> {
    mask.check_dims(x_obs)?;
    state.m.check_same_dims(x_obs)?;
    state.p.check_same_dims(x_obs)?;
    let inv_rho = 1.0 / state.rho;
    let data = state
        .m
        .data()
        .iter()
        .zip(state.p.data())
        .zip(mask.as_slice())
        .map(|((&m, &p), &obs)| if obs { 0.0 } else { -m + p * inv_rho })
        .collect();
    Tensor3::from_vec(x_obs.dims(), data)
}

/// `R = X - E_{n+1} + P_n / ρ_n`
pub fn shrinkage_target(state: &SolverState, x_obs: &Tensor3, e_next: &Tensor3) -> Result<Tensor3> {
    x_obs.check_same_dims(e_next)?;
    state.p.check_same_dims(x_obs)?;
    let inv_rho = 1.0 / state.rho;
    let data = x_obs
        .data()
        .iter()
        .zip(e_next.data())
        .zip(state.p.data())
        .map(|((&x, &e), &p)| x - e + p * inv_rho)
        .collect();
    Tensor3::from_vec(x_obs.dims(), data)
}

/// M-step: GTSVT of the shrinkage target with `λ = 1/ρ_n`.
pub fn update_m(state: &SolverState, x_obs: &Tensor3, e_next: &Tensor3, kind: RegularizerKind) -> Result<Tensor3> {
    let target = shrinkage_target(state, x_obs, e_next)?;
    let spec = RegularizerSpec::new(kind, 1.0 / state.rho)?;
    gtsvt(&target, &spec)
}

/// Multiplier ascent `P + ρ (X - M - E)`, then the bound
/// `‖P‖²_F ≤ min(n1, n2)` is re-checked.
pub fn update_p(state: &SolverState, x_obs: &Tensor3, m_next: &Tensor3, e_next: &Tensor3) -> Result<Tensor3> {
    x_obs.check_same_dims(m_next)?;
    x_obs.check_same_dims(e_next)?;
    let rho = state.rho;
    let data: Vec<f64> = state
        .p
        .data()
        .iter()
        .zip(x_obs.data())
        .zip(m_next.data().iter().zip(e_next.data()))
        .map(|((&p, &x), (&m, &e))| p + rho * (x - m - e))
        .collect();
    let p = Tensor3::from_vec(x_obs.dims(), data)?;
    check_multiplier_bound(&p, state.iter + 1)?;
    Ok(p)
}

pub fn multiplier_bound(dims: (usize, usize, usize)) -> f64 {
    dims.0.min(dims.1) as f64
}

fn check_multiplier_bound(p: &Tensor3, iter: usize) -> Result<f64> {
    let norm_sq = p.frob_norm().powi(2);
    let bound = multiplier_bound(p.dims());
    if norm_sq > bound + MULTIPLIER_BOUND_SLACK || !norm_sq.is_finite() {
        return Err(Error::MultiplierBoundViolated { norm_sq, bound, iter });
    }
    Ok(norm_sq)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KktResiduals {
    /// `‖X − M − E‖_F`
    pub feasibility: f64,
    /// `‖M_{Ω^c} + E_{Ω^c}‖_F`
    pub complement: f64,
}

pub fn kkt_residuals(state: &SolverState, x_obs: &Tensor3, mask: &Mask) -> Result<KktResiduals> {
    mask.check_dims(x_obs)?;
    state.m.check_same_dims(x_obs)?;
    state.e.check_same_dims(x_obs)?;
    let mut feas = 0.0;
    let mut comp = 0.0;
    for (((&x, &m), &e), &obs) in x_obs
        .data()
        .iter()
        .zip(state.m.data())
        .zip(state.e.data())
        .zip(mask.as_slice())
    {
        let r = x - m - e;
        feas += r * r;
        if !obs {
            comp += (m + e) * (m + e);
        }
    }
    Ok(KktResiduals {
        feasibility: feas.sqrt(),
        complement: comp.sqrt(),
    })
}

/// Run the completion loop. `x_obs` must vanish outside Ω.
pub fn solve(x_obs: &Tensor3, mask: &Mask, config: &SolverConfig, ground_truth: Option<&Tensor3>) -> Result<Solution> {
    config.validate()?;
    mask.check_dims(x_obs)?;
    if let Some(gt) = ground_truth {
        gt.check_same_dims(x_obs)?;
        if gt.frob_norm() == 0.0 {
            return Err(Error::ZeroReference);
        }
    }
    if x_obs
        .data()
        .iter()
        .zip(mask.as_slice())
        .any(|(&v, &obs)| !obs && v != 0.0)
    {
        return Err(Error::InvalidParam(
            "observed tensor must be zero outside the mask".into(),
        ));
    }
    if !x_obs.is_finite() {
        return Err(Error::InvalidParam("observed tensor has non-finite entries".into()));
    }

    let start = Instant::now();
    let mut state = SolverState::initial(x_obs, config.rho0);
    let mut trace = Trace::default();
    let mut stop_reason = StopReason::MaxIters;

    while state.iter < config.max_iters {
        let n = state.iter;
        state.rho = config.rho_at(n);
        if state.rho > RHO_LIMIT {
            break;
        }
        let e_next = update_e(&state, x_obs, mask)?;
        let m_next = update_m(&state, x_obs, &e_next, config.kind)?;
        let p_next = update_p(&state, x_obs, &m_next, &e_next)?;

        let chg_m = m_next.max_abs_diff(&state.m)?;
        let chg_e = e_next.max_abs_diff(&state.e)?;
        let chg_x = x_obs
            .data()
            .iter()
            .zip(m_next.data().iter().zip(e_next.data()))
            .fold(0.0_f64, |acc, (&x, (&m, &e))| acc.max((x - m - e).abs()));
        let p_norm = p_next.frob_norm().powi(2);
        let row_rre = match ground_truth {
            Some(gt) => rre(&m_next, gt)?,
            None => f64::NAN,
        };
        trace.rows.push(TraceRow {
            iter: n + 1,
            rho: state.rho,
            rre: row_rre,
            chg_m,
            chg_e,
            chg_x,
            p_norm,
        });

        state.m = m_next;
        state.e = e_next;
        state.p = p_next;
        state.iter = n + 1;

        if chg_m <= config.xi && chg_e <= config.xi && chg_x <= config.xi {
            stop_reason = StopReason::Converged;
            break;
        }
    }
    state.rho = config.rho_at(state.iter);

    Ok(Solution {
        estimate: state.m.clone(),
        trace,
        stop_reason,
        state,
        runtime_seconds: start.elapsed().as_secs_f64(),
    })
}
