//! t-SVD, tubal rank, tensor nuclear norm and generalized tensor singular
//! value thresholding (GTSVT).
//!
//! Everything runs in the Fourier domain. Only the first `⌈(n3 + 1) / 2⌉`
//! frontal slices are factorized; the rest are conjugates of their mirror
//! partners, which keeps the inverse transform real.

use rayon::prelude::*;

use crate::error::Result;
use crate::linalg::{svd_complex, CMatrix, MatrixSvd};
use crate::regularizer::RegularizerSpec;
use crate::tensor::{fft_mode3, ifft_mode3, independent_slices, mirror_conjugate, SpectralTensor3, Tensor3};

/// Default relative tolerance for [`tubal_rank`].
pub const DEFAULT_RANK_TOL: f64 = 1e-8;

/// `A = U * S * Vᵀ` under the t-product.
#[derive(Debug, Clone, PartialEq)]
pub struct TubalSvd {
    pub u: Tensor3,
    /// f-diagonal.
    pub s: Tensor3,
    pub v: Tensor3,
}

impl TubalSvd {
    pub fn reconstruct(&self) -> Result<Tensor3> {
        let us = crate::tensor::tprod(&self.u, &self.s)?;
        crate::tensor::tprod(&us, &crate::tensor::conj_transpose(&self.v))
    }
}

fn slice_svds(spec: &SpectralTensor3) -> Result<Vec<MatrixSvd>> {
    let (_, _, n3) = spec.dims();
    (0..independent_slices(n3))
        .into_par_iter()
        .map(|k| svd_complex(&spec.slice_matrix(k)))
        .collect()
}

/// Economy t-SVD: `U: n1 x r x n3`, `S: r x r x n3`, `V: n2 x r x n3`,
/// `r = min(n1, n2)`.
pub fn tsvd(a: &Tensor3) -> Result<TubalSvd> {
    let (n1, n2, n3) = a.dims();
    let r = n1.min(n2);
    let fa = fft_mode3(a);
    let svds = slice_svds(&fa)?;

    let mut fu = SpectralTensor3::zeros(n1, r, n3);
    let mut fs = SpectralTensor3::zeros(r, r, n3);
    let mut fv = SpectralTensor3::zeros(n2, r, n3);
    for (k, svd) in svds.iter().enumerate() {
        fu.set_slice_matrix(k, &svd.u);
        fv.set_slice_matrix(k, &svd.v);
        let diag: Vec<_> = svd.s.iter().map(|&x| x.into()).collect();
        fs.set_slice_matrix(k, &CMatrix::diag(&diag));
    }
    mirror_conjugate(&mut fu);
    mirror_conjugate(&mut fs);
    mirror_conjugate(&mut fv);
    Ok(TubalSvd {
        u: ifft_mode3(&fu)?,
        s: ifft_mode3(&fs)?,
        v: ifft_mode3(&fv)?,
    })
}

/// Full t-SVD with orthogonal `U: n1 x n1 x n3`, `V: n2 x n2 x n3` and
/// f-diagonal `S: n1 x n2 x n3`.
pub fn tsvd_full(a: &Tensor3) -> Result<TubalSvd> {
    let (n1, n2, n3) = a.dims();
    let fa = fft_mode3(a);
    let svds = slice_svds(&fa)?;

    let mut fu = SpectralTensor3::zeros(n1, n1, n3);
    let mut fs = SpectralTensor3::zeros(n1, n2, n3);
    let mut fv = SpectralTensor3::zeros(n2, n2, n3);
    for (k, svd) in svds.into_iter().enumerate() {
        let (u, s, v) = svd.into_full();
        fu.set_slice_matrix(k, &u);
        fv.set_slice_matrix(k, &v);
        let mut d = CMatrix::zeros(n1, n2);
        for (i, &x) in s.iter().enumerate() {
            d[(i, i)] = x.into();
        }
        fs.set_slice_matrix(k, &d);
    }
    mirror_conjugate(&mut fu);
    mirror_conjugate(&mut fs);
    mirror_conjugate(&mut fv);
    Ok(TubalSvd {
        u: ifft_mode3(&fu)?,
        s: ifft_mode3(&fs)?,
        v: ifft_mode3(&fv)?,
    })
}

/// Singular values of every Fourier-domain frontal slice, `n3` rows of
/// `min(n1, n2)` nonincreasing values.
pub fn spectral_singular_values(a: &Tensor3) -> Result<Vec<Vec<f64>>> {
    let n3 = a.dims().2;
    let svds = slice_svds(&fft_mode3(a))?;
    let half = svds.len();
    let mut out: Vec<Vec<f64>> = svds.into_iter().map(|s| s.s).collect();
    for k in half..n3 {
        out.push(out[n3 - k].clone());
    }
    Ok(out)
}

/// Number of singular tubes whose largest spectral magnitude exceeds
/// `tol` times the largest singular value.
pub fn tubal_rank(a: &Tensor3, tol: f64) -> Result<usize> {
    let sv = spectral_singular_values(a)?;
    let r = sv[0].len();
    let tube_max: Vec<f64> = (0..r).map(|i| sv.iter().fold(0.0, |m: f64, s| m.max(s[i]))).collect();
    let top = tube_max.iter().cloned().fold(0.0, f64::max);
    Ok(tube_max.iter().filter(|&&m| m > tol * top).count())
}

/// Tensor nuclear norm `(1/n3) Σ_k Σ_i σ_i(Ā^(k))`.
pub fn tnn(a: &Tensor3) -> Result<f64> {
    let n3 = a.dims().2;
    let sv = spectral_singular_values(a)?;
    Ok(sv.iter().flatten().sum::<f64>() / n3 as f64)
}

/// `U diag(P(s)) Vᴴ`: the thresholding function applied to the singular values
/// of a complex matrix.
pub fn gsvt_matrix(x: &CMatrix, spec: &RegularizerSpec) -> Result<CMatrix> {
    spec.validate()?;
    let svd = svd_complex(x)?;
    Ok(apply_threshold(&svd, spec))
}

fn apply_threshold(svd: &MatrixSvd, spec: &RegularizerSpec) -> CMatrix {
    // P is nondecreasing, so the thresholded values stay sorted.
    let shrunk: Vec<f64> = svd.s.iter().map(|&s| spec.threshold(s)).collect();
    svd.compose(&shrunk)
}

/// Generalized tensor singular value thresholding,
/// `argmin_Y λ‖Y‖_φ + ½‖X − Y‖²_F`.
pub fn gtsvt(x: &Tensor3, spec: &RegularizerSpec) -> Result<Tensor3> {
    spec.validate()?;
    let (n1, n2, n3) = x.dims();
    let fx = fft_mode3(x);
    let slices: Vec<CMatrix> = (0..independent_slices(n3))
        .into_par_iter()
        .map(|k| gsvt_matrix(&fx.slice_matrix(k), spec))
        .collect::<Result<_>>()?;
    let mut fy = SpectralTensor3::zeros(n1, n2, n3);
    for (k, y) in slices.iter().enumerate() {
        fy.set_slice_matrix(k, y);
    }
    mirror_conjugate(&mut fy);
    ifft_mode3(&fy)
}
