//! Small dense complex matrices and a one-sided Jacobi SVD.

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Rotation is skipped once `|a_iᴴ a_j| <= JACOBI_TOL * ‖a_i‖ ‖a_j‖`.
pub const JACOBI_TOL: f64 = 1e-13;
pub const MAX_SWEEPS: usize = 60;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Row-major complex matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct CMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Complex64>,
}

impl CMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![ZERO; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = Complex64::new(1.0, 0.0);
        }
        m
    }

    pub fn from_row_major(rows: usize, cols: usize, data: Vec<Complex64>) -> Self {
        assert_eq!(data.len(), rows * cols, "buffer does not match {rows}x{cols}");
        Self { rows, cols, data }
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Complex64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Self { rows, cols, data }
    }

    pub fn from_real(rows: usize, cols: usize, data: &[f64]) -> Self {
        assert_eq!(data.len(), rows * cols);
        Self {
            rows,
            cols,
            data: data.iter().map(|&v| Complex64::new(v, 0.0)).collect(),
        }
    }

    pub fn diag(values: &[Complex64]) -> Self {
        let n = values.len();
        let mut m = Self::zeros(n, n);
        for (i, &v) in values.iter().enumerate() {
            m[(i, i)] = v;
        }
        m
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn as_slice(&self) -> &[Complex64] {
        &self.data
    }

    pub fn column(&self, j: usize) -> Vec<Complex64> {
        (0..self.rows).map(|i| self[(i, j)]).collect()
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> CMatrix {
        CMatrix::from_fn(self.cols, self.rows, |i, j| self[(j, i)].conj())
    }

    pub fn conj(&self) -> CMatrix {
        CMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|z| z.conj()).collect(),
        }
    }

    pub fn scale(&self, alpha: Complex64) -> CMatrix {
        CMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|z| z * alpha).collect(),
        }
    }

    pub fn sub(&self, other: &CMatrix) -> CMatrix {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        CMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&other.data).map(|(a, b)| a - b).collect(),
        }
    }

    pub fn matmul(&self, other: &CMatrix) -> CMatrix {
        assert_eq!(self.cols, other.rows, "inner dimensions differ");
        let mut out = CMatrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for p in 0..self.cols {
                let a = self.data[i * self.cols + p];
                if a == ZERO {
                    continue;
                }
                let row = &other.data[p * other.cols..(p + 1) * other.cols];
                let dst = &mut out.data[i * other.cols..(i + 1) * other.cols];
                for (d, b) in dst.iter_mut().zip(row) {
                    *d += a * b;
                }
            }
        }
        out
    }

    pub fn frob_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|z| z.re.is_finite() && z.im.is_finite())
    }
}

impl std::ops::Index<(usize, usize)> for CMatrix {
    type Output = Complex64;

    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &Complex64 {
        &self.data[i * self.cols + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for CMatrix {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex64 {
        &mut self.data[i * self.cols + j]
    }
}

/// Economy SVD `A = U diag(s) Vᴴ` with `U: m x r`, `V: n x r`, `r = min(m, n)`.
#[derive(Debug, Clone, PartialEq)]
pub struct MatrixSvd {
    pub u: CMatrix,
    pub s: Vec<f64>,
    pub v: CMatrix,
}

impl MatrixSvd {
    pub fn rank_bound(&self) -> usize {
        self.s.len()
    }

    /// `U diag(values) Vᴴ` for an arbitrary replacement spectrum.
    pub fn compose(&self, values: &[f64]) -> CMatrix {
        assert_eq!(values.len(), self.s.len());
        let (m, n) = (self.u.rows(), self.v.rows());
        let mut out = CMatrix::zeros(m, n);
        for (t, &sv) in values.iter().enumerate() {
            if sv == 0.0 {
                continue;
            }
            for i in 0..m {
                let ui = self.u[(i, t)] * sv;
                for j in 0..n {
                    out[(i, j)] += ui * self.v[(j, t)].conj();
                }
            }
        }
        out
    }

    pub fn reconstruct(&self) -> CMatrix {
        self.compose(&self.s)
    }

    /// Square unitary factors: `U` extended to `m x m`, `V` to `n x n`.
    /// The trailing columns of each are completed from the standard basis.
    pub fn into_full(self) -> (CMatrix, Vec<f64>, CMatrix) {
        (extend_unitary(&self.u), self.s, extend_unitary(&self.v))
    }
}

fn extend_unitary(q: &CMatrix) -> CMatrix {
    let (m, r) = (q.rows(), q.cols());
    let mut cols: Vec<Option<Vec<Complex64>>> = (0..r).map(|j| Some(q.column(j))).collect();
    cols.resize(m, None);
    complete_orthonormal(&mut cols, m);
    CMatrix::from_fn(m, m, |i, j| cols[j].as_ref().expect("completed")[i])
}

/// Deterministic economy SVD of a complex matrix by one-sided Jacobi.
///
/// Singular values come out nonincreasing, ties in original column order. Each
/// left singular vector is rotated so that its largest-magnitude entry (first
/// one on ties) is real and nonnegative; the matching right vector gets the same
/// phase.
pub fn svd_complex(a: &CMatrix) -> Result<MatrixSvd> {
    if !a.is_finite() {
        return Err(Error::InvalidParam("SVD input has non-finite entries".into()));
    }
    let mut svd = if a.rows() >= a.cols() {
        jacobi_tall(a)?
    } else {
        let t = jacobi_tall(&a.adjoint())?;
        MatrixSvd { u: t.v, s: t.s, v: t.u }
    };
    fix_phases(&mut svd);
    Ok(svd)
}

fn jacobi_tall(a: &CMatrix) -> Result<MatrixSvd> {
    let (m, n) = (a.rows(), a.cols());
    let mut w: Vec<Vec<Complex64>> = (0..n).map(|j| a.column(j)).collect();
    let mut v: Vec<Vec<Complex64>> = (0..n)
        .map(|j| {
            let mut e = vec![ZERO; n];
            e[j] = Complex64::new(1.0, 0.0);
            e
        })
        .collect();

    let mut converged = n < 2;
    for _ in 0..MAX_SWEEPS {
        if converged {
            break;
        }
        let mut rotated = false;
        for i in 0..n {
            for j in i + 1..n {
                let (alpha, beta, gamma) = gram_pair(&w[i], &w[j]);
                let g = gamma.norm();
                let scale = (alpha * beta).sqrt();
                if g == 0.0 || scale == 0.0 || g <= JACOBI_TOL * scale {
                    continue;
                }
                rotated = true;
                let phase_conj = (gamma / g).conj();
                let zeta = (beta - alpha) / (2.0 * g);
                let t = zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = c * t;
                rotate(&mut w, i, j, c, s, phase_conj);
                rotate(&mut v, i, j, c, s, phase_conj);
            }
        }
        if !rotated {
            converged = true;
        }
    }
    if !converged {
        return Err(Error::NoConvergence { sweeps: MAX_SWEEPS });
    }

    let norms: Vec<f64> = w
        .iter()
        .map(|col| col.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt())
        .collect();
    let mut order: Vec<usize> = (0..n).collect();
    // stable: ties keep column order
    order.sort_by(|&x, &y| norms[y].partial_cmp(&norms[x]).unwrap_or(std::cmp::Ordering::Equal));

    let mut u_cols: Vec<Option<Vec<Complex64>>> = Vec::with_capacity(n);
    let mut s = Vec::with_capacity(n);
    for &idx in &order {
        let sigma = norms[idx];
        s.push(sigma);
        if sigma > 0.0 && sigma.is_normal() {
            u_cols.push(Some(w[idx].iter().map(|z| z / sigma).collect()));
        } else {
            u_cols.push(None);
        }
    }
    complete_orthonormal(&mut u_cols, m);

    let mut u = CMatrix::zeros(m, n);
    let mut vm = CMatrix::zeros(n, n);
    for (t, &idx) in order.iter().enumerate() {
        let col = u_cols[t].as_ref().expect("completed");
        for i in 0..m {
            u[(i, t)] = col[i];
        }
        for i in 0..n {
            vm[(i, t)] = v[idx][i];
        }
    }
    Ok(MatrixSvd { u, s, v: vm })
}

#[inline]
fn gram_pair(x: &[Complex64], y: &[Complex64]) -> (f64, f64, Complex64) {
    let mut alpha = 0.0;
    let mut beta = 0.0;
    let mut gamma = ZERO;
    for (a, b) in x.iter().zip(y) {
        alpha += a.norm_sqr();
        beta += b.norm_sqr();
        gamma += a.conj() * b;
    }
    (alpha, beta, gamma)
}

/// `[x_i, x_j] <- [c x_i - s e^{-iφ} x_j, s x_i + c e^{-iφ} x_j]`
#[inline]
fn rotate(cols: &mut [Vec<Complex64>], i: usize, j: usize, c: f64, s: f64, phase_conj: Complex64) {
    let (head, tail) = cols.split_at_mut(j);
    let xi = &mut head[i];
    let xj = &mut tail[0];
    for (a, b) in xi.iter_mut().zip(xj.iter_mut()) {
        let ai = *a;
        let bj = *b * phase_conj;
        *a = ai * c - bj * s;
        *b = ai * s + bj * c;
    }
}

/// Fill missing columns with unit vectors orthogonal to the present ones.
/// Each is the standard basis vector with the largest residual after two
/// Gram–Schmidt passes (first on ties); that residual has norm at least
/// `sqrt((m - k) / m)` with `k` columns present.
fn complete_orthonormal(cols: &mut [Option<Vec<Complex64>>], m: usize) {
    let residual = |cols: &[Option<Vec<Complex64>>], c: usize| {
        let mut e = vec![ZERO; m];
        e[c] = Complex64::new(1.0, 0.0);
        for _ in 0..2 {
            for q in cols.iter().flatten() {
                let proj: Complex64 = q.iter().zip(&e).map(|(a, b)| a.conj() * b).sum();
                for (x, qv) in e.iter_mut().zip(q) {
                    *x -= proj * qv;
                }
            }
        }
        let norm = e.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        (e, norm)
    };
    for t in 0..cols.len() {
        if cols[t].is_some() {
            continue;
        }
        let (e, norm) =
            (0..m).map(|c| residual(cols, c)).fold(
                (Vec::new(), -1.0),
                |best, cand| if cand.1 > best.1 { cand } else { best },
            );
        cols[t] = Some(e.into_iter().map(|z| z / norm).collect());
    }
}

fn fix_phases(svd: &mut MatrixSvd) {
    let (m, n, r) = (svd.u.rows(), svd.v.rows(), svd.s.len());
    for t in 0..r {
        let mut best = 0;
        let mut best_mag = -1.0;
        for i in 0..m {
            let mag = svd.u[(i, t)].norm();
            if mag > best_mag {
                best_mag = mag;
                best = i;
            }
        }
        if best_mag <= 0.0 {
            continue;
        }
        let phase = svd.u[(best, t)] / best_mag;
        let fix = phase.conj();
        for i in 0..m {
            svd.u[(i, t)] *= fix;
        }
        svd.u[(best, t)] = Complex64::new(svd.u[(best, t)].norm(), 0.0);
        for j in 0..n {
            svd.v[(j, t)] *= fix;
        }
    }
}
