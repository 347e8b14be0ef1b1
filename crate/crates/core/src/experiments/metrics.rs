//! Reconstruction quality metrics. Image metrics assume data in `[0, 1]` and
//! are averaged over frontal slices.

use crate::error::{Error, Result};
use crate::tensor::Tensor3;

/// PSNR reported for identical slices.
pub const PSNR_CAP: f64 = 100.0;

pub const SSIM_WINDOW: usize = 11;
pub const SSIM_SIGMA: f64 = 1.5;
pub const SSIM_K1: f64 = 0.01;
pub const SSIM_K2: f64 = 0.03;

/// `‖m − x‖_F / ‖x‖_F`
pub fn rre(m: &Tensor3, x: &Tensor3) -> Result<f64> {
    let denom = x.frob_norm();
    if denom == 0.0 {
        return Err(Error::ZeroReference);
    }
    Ok(m.frob_dist(x)? / denom)
}

fn per_slice(m: &Tensor3, x: &Tensor3, f: impl Fn(&[f64], &[f64], usize, usize) -> f64) -> Result<f64> {
    m.check_same_dims(x)?;
    let (n1, n2, n3) = x.dims();
    Ok((0..n3).map(|k| f(m.slice(k), x.slice(k), n1, n2)).sum::<f64>() / n3 as f64)
}

/// Mean over slices of `10 log10(1 / mse)`, peak 1.0, capped at [`PSNR_CAP`].
pub fn psnr(m: &Tensor3, x: &Tensor3) -> Result<f64> {
    per_slice(m, x, |a, b, _, _| {
        let mse = a.iter().zip(b).map(|(p, q)| (p - q) * (p - q)).sum::<f64>() / a.len() as f64;
        if mse == 0.0 {
            PSNR_CAP
        } else {
            (10.0 * (1.0 / mse).log10()).min(PSNR_CAP)
        }
    })
}

/// Mean over slices of `‖M^(j) − X^(j)‖_F / sqrt(n1 n2)`.
pub fn rmse(m: &Tensor3, x: &Tensor3) -> Result<f64> {
    per_slice(m, x, |a, b, n1, n2| {
        a.iter().zip(b).map(|(p, q)| (p - q) * (p - q)).sum::<f64>().sqrt() / ((n1 * n2) as f64).sqrt()
    })
}

/// Mean over slices of single-scale SSIM: 11x11 Gaussian window with
/// σ = 1.5, `K1 = 0.01`, `K2 = 0.03`, dynamic range 1, averaged over the
/// positions where the window fits. On slices smaller than 11 in some
/// direction the window is truncated to the slice size along it.
pub fn ssim(m: &Tensor3, x: &Tensor3) -> Result<f64> {
    per_slice(m, x, ssim_slice)
}

fn gaussian_window(len: usize) -> Vec<f64> {
    let c = (len as f64 - 1.0) / 2.0;
    let w: Vec<f64> = (0..len)
        .map(|i| (-((i as f64 - c).powi(2)) / (2.0 * SSIM_SIGMA * SSIM_SIGMA)).exp())
        .collect();
    let s: f64 = w.iter().sum();
    w.into_iter().map(|v| v / s).collect()
}

fn ssim_slice(a: &[f64], b: &[f64], n1: usize, n2: usize) -> f64 {
    let c1 = SSIM_K1 * SSIM_K1;
    let c2 = SSIM_K2 * SSIM_K2;
    let (wr, wc) = (SSIM_WINDOW.min(n1), SSIM_WINDOW.min(n2));
    let gr = gaussian_window(wr);
    let gc = gaussian_window(wc);
    let mut total = 0.0;
    let mut count = 0usize;
    for r0 in 0..=n1 - wr {
        for c0 in 0..=n2 - wc {
            let (mut mx, mut my, mut sxx, mut syy, mut sxy) = (0.0, 0.0, 0.0, 0.0, 0.0);
            for (dr, &wy) in gr.iter().enumerate() {
                for (dc, &wx) in gc.iter().enumerate() {
                    let w = wy * wx;
                    let o = (r0 + dr) * n2 + c0 + dc;
                    let (p, q) = (a[o], b[o]);
                    mx += w * p;
                    my += w * q;
                    sxx += w * p * p;
                    syy += w * q * q;
                    sxy += w * p * q;
                }
            }
            let vx = sxx - mx * mx;
            let vy = syy - my * my;
            let cxy = sxy - mx * my;
            total += ((2.0 * mx * my + c1) * (2.0 * cxy + c2)) / ((mx * mx + my * my + c1) * (vx + vy + c2));
            count += 1;
        }
    }
    total / count as f64
}

/// Summary written as the metrics JSON artifact.
#[derive(Debug, Clone, PartialEq)]
pub struct MetricsReport {
    pub rre: Option<f64>,
    pub psnr: Option<f64>,
    pub ssim: Option<f64>,
    pub rmse: Option<f64>,
    pub runtime_seconds: f64,
    pub stop_reason: String,
}

impl MetricsReport {
    /// Image metrics of an estimate against the reference in `[0, 1]`.
    pub fn image(estimate: &Tensor3, reference: &Tensor3, runtime_seconds: f64, stop_reason: String) -> Result<Self> {
        Ok(Self {
            rre: Some(rre(estimate, reference)?),
            psnr: Some(psnr(estimate, reference)?),
            ssim: Some(ssim(estimate, reference)?),
            rmse: Some(rmse(estimate, reference)?),
            runtime_seconds,
            stop_reason,
        })
    }

    /// JSON object with every number printed to 17 significant digits;
    /// absent or non-finite values become `null`.
    pub fn to_json(&self) -> String {
        fn num(v: Option<f64>) -> String {
            match v {
                Some(x) if x.is_finite() => format!("{x:.16e}"),
                _ => "null".to_string(),
            }
        }
        format!(
            "{{\"rre\": {}, \"psnr\": {}, \"ssim\": {}, \"rmse\": {}, \"runtime_seconds\": {}, \"stop_reason\": \"{}\"}}\n",
            num(self.rre),
            num(self.psnr),
            num(self.ssim),
            num(self.rmse),
            num(Some(self.runtime_seconds)),
            self.stop_reason
        )
    }
}
