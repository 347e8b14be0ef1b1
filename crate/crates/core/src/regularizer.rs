//! Hybrid ordinary losses and their closed-form thresholding functions.
//!
//! Each loss is quadratic on `[-λ, λ]` and concave outside, glued so that it is
//! continuously differentiable at the knee:
//!
//! | kind | loss for `|x| > λ` | threshold for `|x| > λ` |
//! |------|--------------------|--------------------------|
//! | soft | `λ|x| - λ²/2` (Huber) | `|x| - λ` |
//! | HOP  | `λ^{2-p}|x|^p / p + λ²/2 - λ²/p` | `|x| - λ^{2-p}|x|^{p-1}` |
//! | HOW  | `σ²/2 (1 - e^{(λ²-x²)/σ²}) + λ²/2` | `|x| - |x| e^{(λ²-x²)/σ²}` |
//! | HOC  | `(γ²+λ²)/2 ln(1 + x²/γ²) + b` | `|x| - (γ²+λ²)|x| / (γ²+x²)` |
//!
//! with `b = λ²/2 - (γ²+λ²)/2 ln(1 + λ²/γ²)`. Thresholds are clamped at zero
//! and carry the sign of `x`; they vanish identically on `[-λ, λ]`.
//!
//! `σ` and `γ` are stored as ratios to `λ`, so the concavity conditions
//! `σ ≤ √2 λ` and `γ ≤ λ` survive the solver's per-iteration rescaling of `λ`.

use std::f64::consts::SQRT_2;
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum RegularizerKind {
    /// ℓ1 / soft thresholding, the convex TNN baseline.
    Soft,
    /// Hybrid ordinary-ℓp.
    Hop { p: f64 },
    /// Hybrid ordinary-Welsch, kernel size `σ = sigma_ratio * λ`.
    How { sigma_ratio: f64 },
    /// Hybrid ordinary-Cauchy, scale `γ = gamma_ratio * λ`.
    Hoc { gamma_ratio: f64 },
}

impl RegularizerKind {
    pub const DEFAULT_HOP_P: f64 = 0.6;
    pub const DEFAULT_SIGMA_RATIO: f64 = SQRT_2;
    pub const DEFAULT_GAMMA_RATIO: f64 = 1.0;

    pub fn how() -> Self {
        Self::How {
            sigma_ratio: Self::DEFAULT_SIGMA_RATIO,
        }
    }

    pub fn hoc() -> Self {
        Self::Hoc {
            gamma_ratio: Self::DEFAULT_GAMMA_RATIO,
        }
    }

    /// The five configurations compared throughout the experiments.
    pub fn standard_set() -> Vec<Self> {
        vec![
            Self::Soft,
            Self::Hop { p: 0.6 },
            Self::Hop { p: 0.3 },
            Self::how(),
            Self::hoc(),
        ]
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            Self::Soft => Ok(()),
            Self::Hop { p } if p > 0.0 && p <= 1.0 => Ok(()),
            Self::Hop { p } => Err(Error::InvalidParam(format!("HOP exponent p = {p} outside (0, 1]"))),
            Self::How { sigma_ratio } if sigma_ratio > 0.0 && sigma_ratio <= SQRT_2 => Ok(()),
            Self::How { sigma_ratio } => Err(Error::InvalidParam(format!(
                "HOW needs 0 < σ/λ ≤ √2, got {sigma_ratio}"
            ))),
            Self::Hoc { gamma_ratio } if gamma_ratio > 0.0 && gamma_ratio <= 1.0 => Ok(()),
            Self::Hoc { gamma_ratio } => Err(Error::InvalidParam(format!("HOC needs 0 < γ/λ ≤ 1, got {gamma_ratio}"))),
        }
    }

    pub fn with_lambda(self, lambda: f64) -> Result<RegularizerSpec> {
        RegularizerSpec::new(self, lambda)
    }
}

impl fmt::Display for RegularizerKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            Self::Soft => write!(f, "soft"),
            Self::Hop { p } => write!(f, "hop:{p}"),
            Self::How { sigma_ratio } if sigma_ratio == Self::DEFAULT_SIGMA_RATIO => write!(f, "how"),
            Self::How { sigma_ratio } => write!(f, "how:{sigma_ratio}"),
            Self::Hoc { gamma_ratio } if gamma_ratio == Self::DEFAULT_GAMMA_RATIO => write!(f, "hoc"),
            Self::Hoc { gamma_ratio } => write!(f, "hoc:{gamma_ratio}"),
        }
    }
}

/// Parses `soft`, `hop[:p]`, `how[:σ/λ]`, `hoc[:γ/λ]` and validates the result.
impl FromStr for RegularizerKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim().to_ascii_lowercase();
        let (name, arg) = match s.split_once(':') {
            Some((n, a)) => (n, Some(a)),
            None => (s.as_str(), None),
        };
        let num = |default: f64| -> Result<f64> {
            match arg {
                None => Ok(default),
                Some(a) => a
                    .parse::<f64>()
                    .map_err(|_| Error::InvalidParam(format!("bad regularizer parameter '{a}'"))),
            }
        };
        let kind = match name {
            "soft" | "tnn" => {
                if arg.is_some() {
                    return Err(Error::InvalidParam("soft takes no parameter".into()));
                }
                Self::Soft
            }
            "hop" => Self::Hop {
                p: num(Self::DEFAULT_HOP_P)?,
            },
            "how" => Self::How {
                sigma_ratio: num(Self::DEFAULT_SIGMA_RATIO)?,
            },
            "hoc" => Self::Hoc {
                gamma_ratio: num(Self::DEFAULT_GAMMA_RATIO)?,
            },
            other => return Err(Error::InvalidParam(format!("unknown regularizer '{other}'"))),
        };
        kind.validate()?;
        Ok(kind)
    }
}

/// A regularizer kind bound to a threshold `λ`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RegularizerSpec {
    pub kind: RegularizerKind,
    pub lambda: f64,
}

impl RegularizerSpec {
    pub fn new(kind: RegularizerKind, lambda: f64) -> Result<Self> {
        let spec = Self { kind, lambda };
        spec.validate()?;
        Ok(spec)
    }

    /// Skips validation. Out-of-regime specs may lose monotonicity, which the
    /// thresholding operators rely on; solver entry points re-validate.
    pub fn new_unchecked(kind: RegularizerKind, lambda: f64) -> Self {
        Self { kind, lambda }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.lambda > 0.0 && self.lambda.is_finite()) {
            return Err(Error::InvalidParam(format!(
                "λ must be positive and finite, got {}",
                self.lambda
            )));
        }
        self.kind.validate()
    }

    pub fn sigma(&self) -> Option<f64> {
        match self.kind {
            RegularizerKind::How { sigma_ratio } => Some(sigma_ratio * self.lambda),
            _ => None,
        }
    }

    pub fn gamma(&self) -> Option<f64> {
        match self.kind {
            RegularizerKind::Hoc { gamma_ratio } => Some(gamma_ratio * self.lambda),
            _ => None,
        }
    }

    /// Continuity constants `(a, b)` of the outer branch `a·h(|x|) + b`.
    ///
    /// `h` is `|x|` (soft), `|x|^p` (HOP), the Welsch function
    /// `σ²/2 (1 - e^{-x²/σ²})` (HOW) or `ln(1 + x²/γ²)` (HOC). Recomputed on
    /// every call from `(kind, λ)`.
    pub fn continuity_constants(&self) -> (f64, f64) {
        let l = self.lambda;
        let l2 = l * l;
        match self.kind {
            RegularizerKind::Soft => (l, -l2 / 2.0),
            RegularizerKind::Hop { p } => (l.powf(2.0 - p) / p, l2 / 2.0 - l2 / p),
            RegularizerKind::How { sigma_ratio } => {
                let s2 = (sigma_ratio * l).powi(2);
                // a·σ²/2 (1 - e^{-x²/σ²}) + b with a = e^{λ²/σ²}
                let a = (l2 / s2).exp();
                (a, s2 / 2.0 * (1.0 - a) + l2 / 2.0)
            }
            RegularizerKind::Hoc { gamma_ratio } => {
                let g2 = (gamma_ratio * l).powi(2);
                let a = (g2 + l2) / 2.0;
                (a, l2 / 2.0 - a * (1.0 + l2 / g2).ln())
            }
        }
    }

    /// `φ_{h,λ}(x)`
    pub fn loss(&self, x: f64) -> f64 {
        let l = self.lambda;
        let ax = x.abs();
        if ax <= l {
            return x * x / 2.0;
        }
        let l2 = l * l;
        match self.kind {
            RegularizerKind::Soft => l * ax - l2 / 2.0,
            RegularizerKind::Hop { p } => l.powf(2.0 - p) * ax.powf(p) / p + l2 / 2.0 - l2 / p,
            RegularizerKind::How { sigma_ratio } => {
                let s2 = (sigma_ratio * l).powi(2);
                s2 / 2.0 * (1.0 - ((l2 - ax * ax) / s2).exp()) + l2 / 2.0
            }
            RegularizerKind::Hoc { .. } => {
                let (a, b) = self.continuity_constants();
                let g2 = self.gamma().unwrap().powi(2);
                a * (1.0 + ax * ax / g2).ln() + b
            }
        }
    }

    /// `φ'(|x|) = |x| - P(|x|)` for `|x| > λ` before clamping; the amount of
    /// shrinkage applied to a magnitude above the knee.
    fn shrinkage(&self, ax: f64) -> f64 {
        let l = self.lambda;
        match self.kind {
            RegularizerKind::Soft => l,
            RegularizerKind::Hop { p } => l.powf(2.0 - p) * ax.powf(p - 1.0),
            RegularizerKind::How { sigma_ratio } => {
                let s2 = (sigma_ratio * l).powi(2);
                ax * ((l * l - ax * ax) / s2).exp()
            }
            RegularizerKind::Hoc { gamma_ratio } => {
                let g2 = (gamma_ratio * l).powi(2);
                (g2 + l * l) * ax / (g2 + ax * ax)
            }
        }
    }

    /// Proximity operator `P_{φ_{h,λ}}(x) = max{0, |x| - a h'(|x|)} sign(x)`.
    pub fn threshold(&self, x: f64) -> f64 {
        let ax = x.abs();
        if ax <= self.lambda {
            return 0.0;
        }
        (ax - self.shrinkage(ax)).max(0.0).copysign(x)
    }

    /// Bias `x - P(x)` for `x ≥ λ`.
    pub fn bias_gap(&self, x: f64) -> Result<f64> {
        if x.is_nan() || x < self.lambda {
            return Err(Error::DomainError { x, lambda: self.lambda });
        }
        if x == self.lambda {
            return Ok(x);
        }
        // Closed form rather than x - P(x), which can round above λ.
        Ok(self.shrinkage(x).min(x))
    }
}

/// Half-quadratic map of the Welsch loss, `x - x e^{-x²/σ²}`. Zero only at the
/// origin, so it never produces sparse output.
pub fn welsch_map(sigma: f64, x: f64) -> f64 {
    x - x * (-(x * x) / (sigma * sigma)).exp()
}

/// Parameters for the proximity-operator comparison table.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CurveParams {
    pub lambda: f64,
    pub p: f64,
    pub sigma_ratio: f64,
    pub gamma_ratio: f64,
}

impl Default for CurveParams {
    fn default() -> Self {
        Self {
            lambda: 1.0,
            p: 0.3,
            sigma_ratio: SQRT_2,
            gamma_ratio: 1.0,
        }
    }
}

impl CurveParams {
    pub fn specs(&self) -> Result<[RegularizerSpec; 4]> {
        Ok([
            RegularizerSpec::new(RegularizerKind::Soft, self.lambda)?,
            RegularizerSpec::new(RegularizerKind::Hop { p: self.p }, self.lambda)?,
            RegularizerSpec::new(
                RegularizerKind::How {
                    sigma_ratio: self.sigma_ratio,
                },
                self.lambda,
            )?,
            RegularizerSpec::new(
                RegularizerKind::Hoc {
                    gamma_ratio: self.gamma_ratio,
                },
                self.lambda,
            )?,
        ])
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CurveRow {
    pub x: f64,
    pub soft: f64,
    pub hard: f64,
    pub hop: f64,
    pub how: f64,
    pub hoc: f64,
}

pub const CURVE_CSV_HEADER: &str = "x,soft,hard,hop_p,how,hoc";

/// Evaluate every thresholding function (plus hard thresholding) on `grid`.
pub fn curve_table(params: &CurveParams, grid: &[f64]) -> Result<Vec<CurveRow>> {
    let [soft, hop, how, hoc] = params.specs()?;
    if let Some(bad) = grid.iter().find(|x| !x.is_finite()) {
        return Err(Error::InvalidParam(format!("non-finite grid point {bad}")));
    }
    Ok(grid
        .iter()
        .map(|&x| CurveRow {
            x,
            soft: soft.threshold(x),
            hard: if x.abs() <= params.lambda { 0.0 } else { x },
            hop: hop.threshold(x),
            how: how.threshold(x),
            hoc: hoc.threshold(x),
        })
        .collect())
}

pub fn curve_csv(rows: &[CurveRow]) -> String {
    let mut out = String::with_capacity(rows.len() * 64);
    out.push_str(CURVE_CSV_HEADER);
    out.push('\n');
    for r in rows {
        out.push_str(&format!(
            "{},{},{},{},{},{}\n",
            r.x, r.soft, r.hard, r.hop, r.how, r.hoc
        ));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec(kind: RegularizerKind, lambda: f64) -> RegularizerSpec {
        RegularizerSpec::new(kind, lambda).unwrap()
    }

    #[test]
    fn validation_boundaries() {
        assert!(spec_ok(RegularizerKind::How { sigma_ratio: SQRT_2 }));
        assert!(!spec_ok(RegularizerKind::How { sigma_ratio: 2.0 }));
        assert!(!spec_ok(RegularizerKind::Hop { p: 0.0 }));
        assert!(spec_ok(RegularizerKind::Hop { p: 1.0 }));
        assert!(!spec_ok(RegularizerKind::Hop { p: 1.01 }));
        assert!(spec_ok(RegularizerKind::Hoc { gamma_ratio: 1.0 }));
        assert!(!spec_ok(RegularizerKind::Hoc { gamma_ratio: 1.5 }));
        assert!(RegularizerSpec::new(RegularizerKind::Soft, 0.0).is_err());
        assert!(RegularizerSpec::new(RegularizerKind::Soft, f64::NAN).is_err());
    }

    fn spec_ok(kind: RegularizerKind) -> bool {
        RegularizerSpec::new(kind, 1.0).is_ok()
    }

    #[test]
    fn loss_examples() {
        for kind in RegularizerKind::standard_set() {
            let s = spec(kind, 1.7);
            assert!((s.loss(1.7) - 1.7 * 1.7 / 2.0).abs() < 1e-15);
            assert!((s.loss(1.7 + 1e-9) - s.loss(1.7)).abs() < 1e-8);
        }
        let huber = spec(RegularizerKind::Hop { p: 1.0 }, 1.0);
        assert!((huber.loss(3.0) - 2.5).abs() < 1e-15);
        let how = spec(RegularizerKind::how(), 1.0);
        assert!((how.loss(50.0) - 1.5).abs() < 1e-12);
    }

    #[test]
    fn threshold_examples() {
        let soft = spec(RegularizerKind::Soft, 1.0);
        assert_eq!(soft.threshold(2.0), 1.0);
        let hop = spec(RegularizerKind::Hop { p: 0.5 }, 1.0);
        assert!((hop.threshold(4.0) - 3.5).abs() < 1e-15);
        let how = spec(RegularizerKind::how(), 1.0);
        // 2 - 2 e^{-1.5}
        assert!((how.threshold(2.0) - 1.553_739_679_703_140_4).abs() < 1e-12);
        let hoc = spec(RegularizerKind::hoc(), 1.0);
        assert!((hoc.threshold(2.0) - 1.2).abs() < 1e-15);
        assert_eq!(hoc.threshold(1.0), 0.0);
        assert_eq!(hoc.threshold(-2.0), -hoc.threshold(2.0));
    }

    #[test]
    fn bias_gap_examples() {
        let soft = spec(RegularizerKind::Soft, 0.7);
        for x in [0.8, 1.0, 5.0, 100.0] {
            assert!((soft.bias_gap(x).unwrap() - 0.7).abs() < 1e-12);
        }
        let how = spec(RegularizerKind::how(), 1.0);
        let g = how.bias_gap(2.0).unwrap();
        assert!((g - 0.446_260_320_296_859_6).abs() < 1e-12);
        assert!(g < 1.0);
        for kind in RegularizerKind::standard_set() {
            let s = spec(kind, 2.0);
            assert_eq!(s.bias_gap(2.0).unwrap(), 2.0);
            assert!(matches!(s.bias_gap(1.9), Err(Error::DomainError { .. })));
        }
    }

    #[test]
    fn welsch_map_is_not_sparse() {
        assert_eq!(welsch_map(1.0, 0.0), 0.0);
        assert!((welsch_map(1.0, 1.0) - 0.632_120_558_828_557_7).abs() < 1e-12);
        for i in 1..=400 {
            let x = i as f64 * 0.01;
            assert!(welsch_map(1.0, x) != 0.0 && welsch_map(1.0, -x) != 0.0);
        }
    }

    #[test]
    fn continuity_constants_match_loss_at_knee() {
        for kind in RegularizerKind::standard_set() {
            for lambda in [0.5, 1.0, 3.0] {
                let s = spec(kind, lambda);
                let (a, b) = s.continuity_constants();
                let h = |x: f64| match kind {
                    RegularizerKind::Soft => x,
                    RegularizerKind::Hop { p } => x.powf(p),
                    RegularizerKind::How { sigma_ratio } => {
                        let s2 = (sigma_ratio * lambda).powi(2);
                        s2 / 2.0 * (1.0 - (-x * x / s2).exp())
                    }
                    RegularizerKind::Hoc { gamma_ratio } => (1.0 + (x / (gamma_ratio * lambda)).powi(2)).ln(),
                };
                for x in [lambda, 1.5 * lambda, 4.0 * lambda] {
                    let outer = a * h(x) + b;
                    let want = if x == lambda { lambda * lambda / 2.0 } else { s.loss(x) };
                    assert!((outer - want).abs() < 1e-11 * want.max(1.0), "{kind} λ={lambda} x={x}");
                }
            }
        }
    }

    #[test]
    fn parse_and_display_round_trip() {
        for kind in RegularizerKind::standard_set() {
            let parsed: RegularizerKind = kind.to_string().parse().unwrap();
            assert_eq!(parsed, kind);
        }
        assert_eq!(
            "hop".parse::<RegularizerKind>().unwrap(),
            RegularizerKind::Hop { p: 0.6 }
        );
        assert!("how:2".parse::<RegularizerKind>().is_err());
        assert!("lasso".parse::<RegularizerKind>().is_err());
    }

    #[test]
    fn curve_table_examples() {
        let p = CurveParams::default();
        let rows = curve_table(&p, &[0.0]).unwrap();
        let r = rows[0];
        assert_eq!([r.soft, r.hard, r.hop, r.how, r.hoc], [0.0; 5]);
        assert_eq!(curve_table(&p, &[2.0]).unwrap()[0].soft, 1.0);

        let r = curve_table(&p, &[10.0]).unwrap()[0];
        // HOW is within 1e-20 of the identity at x = 10; HOC keeps
        // (γ² + λ²) x / (γ² + x²) = 20/101.
        assert!(10.0 - r.how < 0.05);
        assert!((10.0 - r.hoc - 20.0 / 101.0).abs() < 1e-12);
        assert!(curve_table(&p, &[f64::INFINITY]).is_err());

        let csv = curve_csv(&curve_table(&p, &[-1.0, 0.5]).unwrap());
        assert!(csv.starts_with("x,soft,hard,hop_p,how,hoc\n"));
        assert_eq!(csv.lines().count(), 3);
    }
}
