//! Dense third-order tensors and the t-product algebra.
//!
//! Storage is slice-major: frontal slice `k` occupies a contiguous block of
//! `n1 * n2` entries, row-major within the slice. Entry `(i, j, k)` lives at
//! `k * n1 * n2 + i * n2 + j`. The binary tensor format relies on this layout.
//!
//! The DFT along mode 3 is unnormalized in the forward direction and scaled
//! by `1 / n3` on the inverse, so that `<A, B> = <Ā, B̄> / n3`.

use num_complex::Complex64;
use rustfft::FftPlanner;

use crate::error::{Error, Result};
use crate::linalg::CMatrix;

/// Imaginary residue allowed on the inverse transform, relative to the
/// Frobenius norm of the spectral input.
pub const IMAG_RESIDUE_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub struct Tensor3 {
    n1: usize,
    n2: usize,
    n3: usize,
    data: Vec<f64>,
}

impl Tensor3 {
    pub fn zeros(n1: usize, n2: usize, n3: usize) -> Self {
        assert!(n1 > 0 && n2 > 0 && n3 > 0, "tensor dimensions must be positive");
        Self {
            n1,
            n2,
            n3,
            data: vec![0.0; n1 * n2 * n3],
        }
    }

    pub fn from_vec(dims: (usize, usize, usize), data: Vec<f64>) -> Result<Self> {
        let (n1, n2, n3) = dims;
        if n1 == 0 || n2 == 0 || n3 == 0 {
            return Err(Error::DimMismatch(format!("zero dimension in {n1}x{n2}x{n3}")));
        }
        if data.len() != n1 * n2 * n3 {
            return Err(Error::DimMismatch(format!(
                "{} values for a {n1}x{n2}x{n3} tensor",
                data.len()
            )));
        }
        if data.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidParam("tensor entries must be finite".into()));
        }
        Ok(Self { n1, n2, n3, data })
    }

    pub fn from_fn(n1: usize, n2: usize, n3: usize, mut f: impl FnMut(usize, usize, usize) -> f64) -> Self {
        let mut t = Self::zeros(n1, n2, n3);
        for k in 0..n3 {
            for i in 0..n1 {
                for j in 0..n2 {
                    t.data[k * n1 * n2 + i * n2 + j] = f(i, j, k);
                }
            }
        }
        t
    }

    #[inline]
    pub fn dims(&self) -> (usize, usize, usize) {
        (self.n1, self.n2, self.n3)
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.data.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    #[inline]
    pub fn data(&self) -> &[f64] {
        &self.data
    }

    #[inline]
    pub fn data_mut(&mut self) -> &mut [f64] {
        &mut self.data
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.data
    }

    #[inline]
    pub fn offset(&self, i: usize, j: usize, k: usize) -> usize {
        debug_assert!(i < self.n1 && j < self.n2 && k < self.n3);
        k * self.n1 * self.n2 + i * self.n2 + j
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize, k: usize) -> f64 {
        self.data[self.offset(i, j, k)]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, k: usize, v: f64) {
        let o = self.offset(i, j, k);
        self.data[o] = v;
    }

    /// Frontal slice `k` as a row-major `n1 x n2` block.
    pub fn slice(&self, k: usize) -> &[f64] {
        let s = self.n1 * self.n2;
        &self.data[k * s..(k + 1) * s]
    }

    pub fn slice_mut(&mut self, k: usize) -> &mut [f64] {
        let s = self.n1 * self.n2;
        &mut self.data[k * s..(k + 1) * s]
    }

    pub fn frob_norm(&self) -> f64 {
        self.data.iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    pub fn linf_norm(&self) -> f64 {
        self.data.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn inner_product(&self, other: &Tensor3) -> Result<f64> {
        self.check_same_dims(other)?;
        Ok(self.data.iter().zip(&other.data).map(|(a, b)| a * b).sum())
    }

    pub fn scale(&self, alpha: f64) -> Tensor3 {
        self.map(|v| alpha * v)
    }

    pub fn map(&self, mut f: impl FnMut(f64) -> f64) -> Tensor3 {
        Tensor3 {
            n1: self.n1,
            n2: self.n2,
            n3: self.n3,
            data: self.data.iter().map(|&v| f(v)).collect(),
        }
    }

    /// Entrywise `f(self, other)`.
    pub fn zip_with(&self, other: &Tensor3, f: impl Fn(f64, f64) -> f64) -> Result<Tensor3> {
        self.check_same_dims(other)?;
        Ok(Tensor3 {
            n1: self.n1,
            n2: self.n2,
            n3: self.n3,
            data: self.data.iter().zip(&other.data).map(|(&a, &b)| f(a, b)).collect(),
        })
    }

    pub fn add(&self, other: &Tensor3) -> Result<Tensor3> {
        self.zip_with(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &Tensor3) -> Result<Tensor3> {
        self.zip_with(other, |a, b| a - b)
    }

    /// `‖self − other‖_∞`
    pub fn max_abs_diff(&self, other: &Tensor3) -> Result<f64> {
        self.check_same_dims(other)?;
        Ok(self
            .data
            .iter()
            .zip(&other.data)
            .fold(0.0, |m, (a, b)| m.max((a - b).abs())))
    }

    /// `‖self − other‖_F`
    pub fn frob_dist(&self, other: &Tensor3) -> Result<f64> {
        self.check_same_dims(other)?;
        Ok(self
            .data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b) * (a - b))
            .sum::<f64>()
            .sqrt())
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|v| v.is_finite())
    }

    pub(crate) fn check_same_dims(&self, other: &Tensor3) -> Result<()> {
        if self.dims() != other.dims() {
            return Err(Error::DimMismatch(format!("{:?} vs {:?}", self.dims(), other.dims())));
        }
        Ok(())
    }
}

/// Complex tensor produced by the mode-3 DFT. Same layout as [`Tensor3`].
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralTensor3 {
    n1: usize,
    n2: usize,
    n3: usize,
    data: Vec<Complex64>,
}

impl SpectralTensor3 {
    pub fn zeros(n1: usize, n2: usize, n3: usize) -> Self {
        assert!(n1 > 0 && n2 > 0 && n3 > 0, "tensor dimensions must be positive");
        Self {
            n1,
            n2,
            n3,
            data: vec![Complex64::new(0.0, 0.0); n1 * n2 * n3],
        }
    }

    pub fn from_vec(dims: (usize, usize, usize), data: Vec<Complex64>) -> Result<Self> {
        let (n1, n2, n3) = dims;
        if n1 == 0 || n2 == 0 || n3 == 0 || data.len() != n1 * n2 * n3 {
            return Err(Error::DimMismatch(format!(
                "{} values for a {n1}x{n2}x{n3} spectral tensor",
                data.len()
            )));
        }
        Ok(Self { n1, n2, n3, data })
    }

    #[inline]
    pub fn dims(&self) -> (usize, usize, usize) {
        (self.n1, self.n2, self.n3)
    }

    #[inline]
    pub fn data(&self) -> &[Complex64] {
        &self.data
    }

    #[inline]
    pub fn data_mut(&mut self) -> &mut [Complex64] {
        &mut self.data
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize, k: usize) -> Complex64 {
        self.data[k * self.n1 * self.n2 + i * self.n2 + j]
    }

    pub fn slice(&self, k: usize) -> &[Complex64] {
        let s = self.n1 * self.n2;
        &self.data[k * s..(k + 1) * s]
    }

    pub fn slice_mut(&mut self, k: usize) -> &mut [Complex64] {
        let s = self.n1 * self.n2;
        &mut self.data[k * s..(k + 1) * s]
    }

    pub fn slice_matrix(&self, k: usize) -> CMatrix {
        CMatrix::from_row_major(self.n1, self.n2, self.slice(k).to_vec())
    }

    pub fn set_slice_matrix(&mut self, k: usize, m: &CMatrix) {
        assert_eq!((m.rows(), m.cols()), (self.n1, self.n2));
        self.slice_mut(k).copy_from_slice(m.as_slice());
    }

    /// Modulus-based Frobenius norm.
    pub fn frob_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// `Σ conj(a) b`; real whenever both operands come from real tensors.
    pub fn inner_product(&self, other: &SpectralTensor3) -> Result<Complex64> {
        if self.dims() != other.dims() {
            return Err(Error::DimMismatch(format!("{:?} vs {:?}", self.dims(), other.dims())));
        }
        Ok(self.data.iter().zip(&other.data).map(|(a, b)| a.conj() * b).sum())
    }

    /// Largest violation of `slice(k) = conj(slice(n3 - k))` (0-based),
    /// relative to the tensor norm.
    pub fn conjugate_symmetry_error(&self) -> f64 {
        let scale = self.frob_norm().max(f64::MIN_POSITIVE);
        let mut worst: f64 = 0.0;
        for k in 1..self.n3 {
            let mirror = self.n3 - k;
            for (a, b) in self.slice(k).iter().zip(self.slice(mirror)) {
                worst = worst.max((a - b.conj()).norm());
            }
        }
        worst / scale
    }
}

/// Observation pattern Ω. `true` marks an observed entry.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Mask {
    n1: usize,
    n2: usize,
    n3: usize,
    observed: Vec<bool>,
}

impl Mask {
    pub fn full(n1: usize, n2: usize, n3: usize) -> Self {
        Self {
            n1,
            n2,
            n3,
            observed: vec![true; n1 * n2 * n3],
        }
    }

    pub fn empty(n1: usize, n2: usize, n3: usize) -> Self {
        Self {
            n1,
            n2,
            n3,
            observed: vec![false; n1 * n2 * n3],
        }
    }

    pub fn from_vec(dims: (usize, usize, usize), observed: Vec<bool>) -> Result<Self> {
        let (n1, n2, n3) = dims;
        if observed.len() != n1 * n2 * n3 {
            return Err(Error::DimMismatch(format!(
                "{} mask entries for {n1}x{n2}x{n3}",
                observed.len()
            )));
        }
        Ok(Self { n1, n2, n3, observed })
    }

    #[inline]
    pub fn dims(&self) -> (usize, usize, usize) {
        (self.n1, self.n2, self.n3)
    }

    #[inline]
    pub fn as_slice(&self) -> &[bool] {
        &self.observed
    }

    #[inline]
    pub fn is_observed(&self, i: usize, j: usize, k: usize) -> bool {
        self.observed[k * self.n1 * self.n2 + i * self.n2 + j]
    }

    pub fn set(&mut self, i: usize, j: usize, k: usize, v: bool) {
        self.observed[k * self.n1 * self.n2 + i * self.n2 + j] = v;
    }

    /// |Ω|
    pub fn observed_count(&self) -> usize {
        self.observed.iter().filter(|&&b| b).count()
    }

    pub fn check_dims(&self, t: &Tensor3) -> Result<()> {
        if self.dims() != t.dims() {
            return Err(Error::DimMismatch(format!(
                "mask {:?} vs tensor {:?}",
                self.dims(),
                t.dims()
            )));
        }
        Ok(())
    }

    /// `X_Ω`: observed entries kept, the rest set to zero.
    pub fn apply(&self, t: &Tensor3) -> Result<Tensor3> {
        self.check_dims(t)?;
        let data = t
            .data()
            .iter()
            .zip(&self.observed)
            .map(|(&v, &o)| if o { v } else { 0.0 })
            .collect();
        Tensor3::from_vec(t.dims(), data)
    }
}

/// Unnormalized forward DFT of every tube `A(i, j, :)`.
pub fn fft_mode3(t: &Tensor3) -> SpectralTensor3 {
    let (n1, n2, n3) = t.dims();
    let plane = n1 * n2;
    let mut tubes = vec![Complex64::new(0.0, 0.0); plane * n3];
    for (p, tube) in tubes.chunks_exact_mut(n3).enumerate() {
        for (k, z) in tube.iter_mut().enumerate() {
            *z = Complex64::new(t.data[k * plane + p], 0.0);
        }
    }
    if n3 > 1 {
        FftPlanner::new().plan_fft_forward(n3).process(&mut tubes);
    }
    let mut out = SpectralTensor3::zeros(n1, n2, n3);
    for (p, tube) in tubes.chunks_exact(n3).enumerate() {
        for (k, z) in tube.iter().enumerate() {
            out.data[k * plane + p] = *z;
        }
    }
    out
}

/// Inverse DFT along mode 3 with `1 / n3` scaling.
///
/// Fails with [`Error::ResidualImaginary`] when the imaginary part of the
/// result has Frobenius norm above `1e-9 * ‖s‖_F`.
pub fn ifft_mode3(s: &SpectralTensor3) -> Result<Tensor3> {
    let (n1, n2, n3) = s.dims();
    let plane = n1 * n2;
    let mut tubes = vec![Complex64::new(0.0, 0.0); plane * n3];
    for (p, tube) in tubes.chunks_exact_mut(n3).enumerate() {
        for (k, z) in tube.iter_mut().enumerate() {
            *z = s.data[k * plane + p];
        }
    }
    if n3 > 1 {
        FftPlanner::new().plan_fft_inverse(n3).process(&mut tubes);
    }
    let scale = 1.0 / n3 as f64;
    let mut out = Tensor3::zeros(n1, n2, n3);
    let mut residue = 0.0;
    for (p, tube) in tubes.chunks_exact(n3).enumerate() {
        for (k, z) in tube.iter().enumerate() {
            out.data[k * plane + p] = z.re * scale;
            residue += (z.im * scale) * (z.im * scale);
        }
    }
    let residue = residue.sqrt();
    let tolerance = IMAG_RESIDUE_TOL * s.frob_norm();
    if residue > tolerance || !residue.is_finite() {
        return Err(Error::ResidualImaginary { residue, tolerance });
    }
    Ok(out)
}

/// Number of leading frontal slices that are computed explicitly in the
/// Fourier domain; the remainder follow by conjugate symmetry.
#[inline]
pub fn independent_slices(n3: usize) -> usize {
    // ⌈(n3 + 1) / 2⌉
    n3 / 2 + 1
}

/// Fill slices `independent_slices(n3)..n3` with conjugates of their mirror
/// partners `n3 - k`.
pub(crate) fn mirror_conjugate(s: &mut SpectralTensor3) {
    let (n1, n2, n3) = s.dims();
    let plane = n1 * n2;
    for k in independent_slices(n3)..n3 {
        let src = n3 - k;
        for p in 0..plane {
            s.data[k * plane + p] = s.data[src * plane + p].conj();
        }
    }
}

/// t-product `A * B`, evaluated slice by slice in the Fourier domain.
pub fn tprod(a: &Tensor3, b: &Tensor3) -> Result<Tensor3> {
    let (n1, n2, n3) = a.dims();
    let (m1, l, m3) = b.dims();
    if n2 != m1 || n3 != m3 {
        return Err(Error::DimMismatch(format!(
            "t-product of {:?} and {:?}",
            a.dims(),
            b.dims()
        )));
    }
    let fa = fft_mode3(a);
    let fb = fft_mode3(b);
    let mut fc = SpectralTensor3::zeros(n1, l, n3);
    for k in 0..independent_slices(n3) {
        let c = fa.slice_matrix(k).matmul(&fb.slice_matrix(k));
        fc.set_slice_matrix(k, &c);
    }
    mirror_conjugate(&mut fc);
    ifft_mode3(&fc)
}

/// t-product through the literal `fold(bcirc(A) · unfold(B))` construction.
/// Cost is cubic in `n3`; intended as a reference for small tensors.
pub fn tprod_bcirc(a: &Tensor3, b: &Tensor3) -> Result<Tensor3> {
    let (n1, n2, n3) = a.dims();
    let (m1, l, m3) = b.dims();
    if n2 != m1 || n3 != m3 {
        return Err(Error::DimMismatch(format!(
            "t-product of {:?} and {:?}",
            a.dims(),
            b.dims()
        )));
    }
    // bcirc(A): (n1 n3) x (n2 n3), block (p, q) = A^(p - q mod n3)
    let rows = n1 * n3;
    let cols = n2 * n3;
    let mut bc = vec![0.0; rows * cols];
    for p in 0..n3 {
        for q in 0..n3 {
            let slice = a.slice((p + n3 - q) % n3);
            for i in 0..n1 {
                for j in 0..n2 {
                    bc[(p * n1 + i) * cols + q * n2 + j] = slice[i * n2 + j];
                }
            }
        }
    }
    // unfold(B): (n2 n3) x l, slices stacked vertically
    let unfolded = b.data();
    let mut prod = vec![0.0; rows * l];
    for r in 0..rows {
        for c in 0..cols {
            let x = bc[r * cols + c];
            if x == 0.0 {
                continue;
            }
            for j in 0..l {
                prod[r * l + j] += x * unfolded[c * l + j];
            }
        }
    }
    // fold: stacked (n1 n3) x l back into n1 x l x n3, which is exactly the
    // slice-major layout
    Tensor3::from_vec((n1, l, n3), prod)
}

/// Tensor transpose: every frontal slice transposed, slices `2..n3` reversed.
pub fn conj_transpose(a: &Tensor3) -> Tensor3 {
    let (n1, n2, n3) = a.dims();
    let mut out = Tensor3::zeros(n2, n1, n3);
    for k in 0..n3 {
        let src = if k == 0 { 0 } else { n3 - k };
        for i in 0..n1 {
            for j in 0..n2 {
                out.set(j, i, k, a.get(i, j, src));
            }
        }
    }
    out
}

/// `n x n x n3` tensor whose first frontal slice is the identity matrix.
pub fn identity_tensor(n: usize, n3: usize) -> Tensor3 {
    let mut t = Tensor3::zeros(n, n, n3);
    for i in 0..n {
        t.set(i, i, 0, 1.0);
    }
    t
}

pub fn inner_product(a: &Tensor3, b: &Tensor3) -> Result<f64> {
    a.inner_product(b)
}

pub fn frob_norm(a: &Tensor3) -> f64 {
    a.frob_norm()
}

pub fn linf_norm(a: &Tensor3) -> f64 {
    a.linf_norm()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::SplitMix64;

    fn random(n1: usize, n2: usize, n3: usize, seed: u64) -> Tensor3 {
        let mut rng = SplitMix64::new(seed);
        Tensor3::from_fn(n1, n2, n3, |_, _, _| rng.next_normal())
    }

    fn rel(a: &Tensor3, b: &Tensor3) -> f64 {
        a.frob_dist(b).unwrap() / b.frob_norm().max(1e-300)
    }

    #[test]
    fn fft_of_single_slice_is_identity() {
        let a = random(3, 4, 1, 1);
        let f = fft_mode3(&a);
        for (z, v) in f.data().iter().zip(a.data()) {
            assert_eq!(z.re, *v);
            assert_eq!(z.im, 0.0);
        }
    }

    #[test]
    fn fft_of_constant_tube_is_impulse() {
        let a = Tensor3::from_fn(1, 1, 5, |_, _, _| 2.5);
        let f = fft_mode3(&a);
        assert!((f.get(0, 0, 0) - Complex64::new(12.5, 0.0)).norm() < 1e-12);
        for k in 1..5 {
            assert!(f.get(0, 0, k).norm() < 1e-12);
        }
    }

    #[test]
    fn fft_round_trip() {
        let a = random(5, 4, 6, 2);
        let f = fft_mode3(&a);
        assert!(f.conjugate_symmetry_error() < 1e-10);
        let back = ifft_mode3(&f).unwrap();
        assert!(rel(&back, &a) < 1e-12);
    }

    #[test]
    fn ifft_of_zero_is_zero() {
        let z = SpectralTensor3::zeros(2, 3, 4);
        assert_eq!(ifft_mode3(&z).unwrap(), Tensor3::zeros(2, 3, 4));
    }

    #[test]
    fn ifft_rejects_asymmetric_spectrum() {
        let mut s = SpectralTensor3::zeros(1, 1, 2);
        s.data_mut()[1] = Complex64::new(0.0, 1.0);
        assert!(matches!(ifft_mode3(&s), Err(Error::ResidualImaginary { .. })));
    }

    #[test]
    fn identity_is_neutral() {
        let a = random(4, 3, 5, 3);
        let id = identity_tensor(3, 5);
        assert!(rel(&tprod(&a, &id).unwrap(), &a) < 1e-12);
        assert!(rel(&tprod_bcirc(&a, &id).unwrap(), &a) < 1e-15);
        let ii = tprod(&identity_tensor(4, 3), &identity_tensor(4, 3)).unwrap();
        assert!(rel(&ii, &identity_tensor(4, 3)) < 1e-12);
        assert_eq!(conj_transpose(&identity_tensor(4, 3)), identity_tensor(4, 3));
    }

    #[test]
    fn identity_spectrum_is_identity_in_every_slice() {
        let f = fft_mode3(&identity_tensor(3, 4));
        for k in 0..4 {
            for i in 0..3 {
                for j in 0..3 {
                    let want = if i == j { 1.0 } else { 0.0 };
                    assert!((f.get(i, j, k) - Complex64::new(want, 0.0)).norm() < 1e-14);
                }
            }
        }
    }

    #[test]
    fn single_slice_tprod_is_matrix_product() {
        let a = random(3, 2, 1, 4);
        let b = random(2, 4, 1, 5);
        let c = tprod(&a, &b).unwrap();
        for i in 0..3 {
            for j in 0..4 {
                let want: f64 = (0..2).map(|p| a.get(i, p, 0) * b.get(p, j, 0)).sum();
                assert!((c.get(i, j, 0) - want).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn tprod_matches_bcirc_on_rectangular_case() {
        let a = random(4, 3, 5, 6);
        let b = random(3, 6, 5, 7);
        let fast = tprod(&a, &b).unwrap();
        let slow = tprod_bcirc(&a, &b).unwrap();
        assert_eq!(fast.dims(), (4, 6, 5));
        assert!(rel(&fast, &slow) < 1e-10);
    }

    #[test]
    fn scalar_tubes_multiply_by_circular_convolution() {
        let a = Tensor3::from_vec((1, 1, 2), vec![1.0, 2.0]).unwrap();
        let b = Tensor3::from_vec((1, 1, 2), vec![3.0, 5.0]).unwrap();
        // c[0] = a0 b0 + a1 b1, c[1] = a0 b1 + a1 b0
        let c = tprod_bcirc(&a, &b).unwrap();
        assert_eq!(c.data(), &[13.0, 11.0]);
        let c = tprod(&a, &b).unwrap();
        assert!((c.get(0, 0, 0) - 13.0).abs() < 1e-12);
        assert!((c.get(0, 0, 1) - 11.0).abs() < 1e-12);
    }

    #[test]
    fn tprod_rejects_mismatched_dims() {
        let a = random(2, 3, 4, 8);
        assert!(matches!(tprod(&a, &random(2, 3, 4, 9)), Err(Error::DimMismatch(_))));
        assert!(matches!(
            tprod_bcirc(&a, &random(3, 3, 5, 9)),
            Err(Error::DimMismatch(_))
        ));
    }

    #[test]
    fn conj_transpose_properties() {
        let a = random(3, 4, 5, 10);
        assert_eq!(conj_transpose(&conj_transpose(&a)), a);
        let m = random(3, 4, 1, 11);
        let mt = conj_transpose(&m);
        assert_eq!(mt.dims(), (4, 3, 1));
        assert_eq!(mt.get(2, 1, 0), m.get(1, 2, 0));

        let b = random(4, 2, 5, 12);
        let lhs = conj_transpose(&tprod_bcirc(&a, &b).unwrap());
        let rhs = tprod_bcirc(&conj_transpose(&b), &conj_transpose(&a)).unwrap();
        assert!(rel(&lhs, &rhs) < 1e-10);
    }

    #[test]
    fn norms_and_inner_product() {
        let a = random(3, 3, 3, 13);
        let ip = inner_product(&a, &a).unwrap();
        assert!((ip - frob_norm(&a).powi(2)).abs() < 1e-12 * ip);
        assert_eq!(linf_norm(&Tensor3::zeros(2, 2, 2)), 0.0);
        assert!(matches!(
            inner_product(&a, &random(3, 3, 2, 1)),
            Err(Error::DimMismatch(_))
        ));
    }

    #[test]
    fn spectral_inner_product_scales_by_n3() {
        let a = random(4, 3, 6, 14);
        let b = random(4, 3, 6, 15);
        let spectral = fft_mode3(&a).inner_product(&fft_mode3(&b)).unwrap();
        let direct = inner_product(&a, &b).unwrap();
        assert!((spectral.re / 6.0 - direct).abs() < 1e-10 * direct.abs().max(1.0));
        assert!(spectral.im.abs() < 1e-10 * spectral.re.abs().max(1.0));
    }

    #[test]
    fn mask_apply_zeroes_unobserved() {
        let a = random(2, 2, 1, 16);
        let m = Mask::from_vec((2, 2, 1), vec![true, false, false, true]).unwrap();
        let x = m.apply(&a).unwrap();
        assert_eq!(x.data(), &[a.data()[0], 0.0, 0.0, a.data()[3]]);
        assert_eq!(m.observed_count(), 2);
        assert!(Tensor3::from_vec((1, 1, 1), vec![f64::NAN]).is_err());
    }

    #[test]
    fn independent_slice_count() {
        // ⌈(n3 + 1) / 2⌉
        for (n3, want) in [(1, 1), (2, 2), (3, 2), (4, 3), (5, 3), (6, 4), (7, 4)] {
            assert_eq!(independent_slices(n3), want, "n3 = {n3}");
        }
    }
}
