use crate::error::{Error, Result};
use crate::rng::{derive_seed, SplitMix64};
use crate::tensor::{tprod, Mask, Tensor3};

/// Tubal-rank-`r` tensor `A * B` with i.i.d. standard normal factors
/// `A: n1 x r x n3` and `B: r x n2 x n3`, both drawn (in storage order, `A`
/// first) from one SplitMix64 stream seeded with `seed`.
pub fn gen_lowrank(n1: usize, n2: usize, n3: usize, r: usize, seed: u64) -> Result<Tensor3> {
    if n1 == 0 || n2 == 0 || n3 == 0 {
        return Err(Error::InvalidParam(format!("invalid dimensions {n1}x{n2}x{n3}")));
    }
    if r == 0 {
        return Err(Error::InvalidParam("rank must be at least 1".into()));
    }
    if r > n1.min(n2) {
        return Err(Error::RankTooLarge {
            rank: r,
            max: n1.min(n2),
        });
    }
    let mut rng = SplitMix64::new(seed);
    let a = Tensor3::from_vec((n1, r, n3), (0..n1 * r * n3).map(|_| rng.next_normal()).collect())?;
    let b = Tensor3::from_vec((r, n2, n3), (0..r * n2 * n3).map(|_| rng.next_normal()).collect())?;
    tprod(&a, &b)
}

/// Uniformly random Ω with exactly `round(sr * n1 n2 n3)` observed entries
/// (partial Fisher–Yates over linear indices).
pub fn random_mask(dims: (usize, usize, usize), sr: f64, seed: u64) -> Result<Mask> {
    if !(sr > 0.0 && sr <= 1.0) {
        return Err(Error::InvalidRate(sr));
    }
    let total = dims.0 * dims.1 * dims.2;
    let count = ((sr * total as f64).round() as usize).min(total);
    let mut idx: Vec<usize> = (0..total).collect();
    let mut rng = SplitMix64::new(seed);
    for i in 0..count {
        let j = i + rng.next_below((total - i) as u64) as usize;
        idx.swap(i, j);
    }
    let mut observed = vec![false; total];
    for &i in &idx[..count] {
        observed[i] = true;
    }
    Mask::from_vec(dims, observed)
}

/// Vertical stripes: column `j` is missing in every row and slice when
/// `j mod period < stripe_width`.
pub fn stripe_mask(dims: (usize, usize, usize), stripe_width: usize, period: usize) -> Result<Mask> {
    let (n1, n2, n3) = dims;
    if !(stripe_width > 0 && stripe_width < period && period <= n2) {
        return Err(Error::InvalidPattern(format!(
            "need 0 < width ({stripe_width}) < period ({period}) <= n2 ({n2})"
        )));
    }
    let mut mask = Mask::full(n1, n2, n3);
    for k in 0..n3 {
        for i in 0..n1 {
            for j in (0..n2).filter(|j| j % period < stripe_width) {
                mask.set(i, j, k, false);
            }
        }
    }
    Ok(mask)
}

/// Ground truth, sampling pattern and observation for one synthetic trial.
#[derive(Debug, Clone)]
pub struct SyntheticInstance {
    pub truth: Tensor3,
    pub mask: Mask,
    pub observed: Tensor3,
}

impl SyntheticInstance {
    /// Data from `derive_seed(seed, [0])`, mask from `derive_seed(seed, [1])`.
    pub fn generate(dims: (usize, usize, usize), rank: usize, sr: f64, seed: u64) -> Result<Self> {
        let truth = gen_lowrank(dims.0, dims.1, dims.2, rank, derive_seed(seed, &[0]))?;
        let mask = random_mask(dims, sr, derive_seed(seed, &[1]))?;
        let observed = mask.apply(&truth)?;
        Ok(Self { truth, mask, observed })
    }
}
