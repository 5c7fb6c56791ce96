//! Block Grams, block orthogonality and block coherence.
//!
//! Blocks of width `d` are runs of `d` consecutive columns. With `d | n` each
//! block lies inside one native block (one GES column).

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use super::{max_overlap, spectral::spectral_norm, AnalysisError};
use crate::arith::prime_power;
use crate::matrix::BinarySensingMatrix;
use crate::Rational;

const MAX_BLOCK: usize = 64;

fn block_count(m: &BinarySensingMatrix, d: usize) -> Result<usize, AnalysisError> {
    if d == 0 || m.cols() % d != 0 {
        return Err(AnalysisError::BlockPartitionInvalid(format!(
            "block length {d} does not divide {} columns",
            m.cols()
        )));
    }
    Ok(m.cols() / d)
}

/// Unscaled cross-Gram `Φ[ℓ]ᵀΦ[r]` of width-`d` blocks, row-major.
pub fn block_gram(
    m: &BinarySensingMatrix,
    l: usize,
    r: usize,
    d: usize,
) -> Result<Vec<u32>, AnalysisError> {
    let blocks = block_count(m, d)?;
    for index in [l, r] {
        if index >= blocks {
            return Err(AnalysisError::IndexOutOfRange { index, blocks });
        }
    }
    let mut g = Vec::with_capacity(d * d);
    for a in 0..d {
        for b in 0..d {
            g.push(m.overlap(l * d + a, r * d + b) as u32);
        }
    }
    Ok(g)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct OrthWitness {
    pub a: usize,
    pub b: usize,
    pub overlap: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct BlockOrthReport {
    pub d: usize,
    pub blocks: usize,
    pub passed: bool,
    /// Two columns of one block that share a row.
    pub witness: Option<OrthWitness>,
}

/// Checks that every width-`d` block of `Φ/√k` has identity Gram, i.e. the
/// columns of a block are pairwise disjoint.
pub fn verify_block_orthogonality(
    m: &BinarySensingMatrix,
    d: usize,
) -> Result<BlockOrthReport, AnalysisError> {
    if d == 0 || m.block_width() % d != 0 {
        return Err(AnalysisError::BlockPartitionInvalid(format!(
            "block length {d} does not divide the native block width {}",
            m.block_width()
        )));
    }
    let blocks = m.cols() / d;
    let mut owner = vec![usize::MAX; m.rows()];
    for block in 0..blocks {
        for a in block * d..(block + 1) * d {
            for &r in m.column(a) {
                let prev = owner[r as usize];
                if prev != usize::MAX && prev / d == block {
                    return Ok(BlockOrthReport {
                        d,
                        blocks,
                        passed: false,
                        witness: Some(OrthWitness {
                            a: prev,
                            b: a,
                            overlap: m.overlap(prev, a),
                        }),
                    });
                }
                owner[r as usize] = a;
            }
        }
    }
    Ok(BlockOrthReport {
        d,
        blocks,
        passed: true,
        witness: None,
    })
}

/// Shape of an integer cross-Gram.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum GramPattern {
    Zero,
    AllOnes,
    /// Zero diagonal, ones elsewhere (`J - I`).
    HollowOnes,
    Other,
}

impl GramPattern {
    pub fn classify(g: &[u32], d: usize) -> GramPattern {
        if g.iter().all(|&v| v == 0) {
            GramPattern::Zero
        } else if g.iter().all(|&v| v == 1) {
            GramPattern::AllOnes
        } else if g
            .iter()
            .enumerate()
            .all(|(i, &v)| v == u32::from(i / d != i % d))
        {
            GramPattern::HollowOnes
        } else {
            GramPattern::Other
        }
    }

    /// Spectral norm of the unscaled pattern, when known in closed form.
    pub fn norm(self, d: usize) -> Option<u64> {
        match self {
            GramPattern::Zero => Some(0),
            GramPattern::AllOnes => Some(d as u64),
            GramPattern::HollowOnes => Some(d as u64 - 1),
            GramPattern::Other => None,
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct GramHistogram {
    pub zero: u64,
    pub all_ones: u64,
    pub hollow_ones: u64,
    pub other: u64,
}

impl GramHistogram {
    fn record(&mut self, p: GramPattern) {
        match p {
            GramPattern::Zero => self.zero += 1,
            GramPattern::AllOnes => self.all_ones += 1,
            GramPattern::HollowOnes => self.hollow_ones += 1,
            GramPattern::Other => self.other += 1,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum BlockPath {
    /// Closed-form norms for recognized Gram patterns, Jacobi otherwise.
    Structural,
    /// Jacobi on every cross-Gram.
    Numeric,
    /// Structural for `t = 1`, numeric otherwise.
    Auto,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct BlockCoherenceReport {
    pub d: usize,
    pub blocks: usize,
    pub block_pairs: u64,
    pub path: BlockPath,
    pub mu_b: f64,
    /// Exact value when every cross-Gram had a closed-form norm.
    #[cfg_attr(feature = "serde", serde(with = "crate::serde_ratio::option"))]
    pub mu_b_exact: Option<Rational>,
    /// Largest spectral norm over cross-Grams of the scaled matrix.
    pub max_norm: f64,
    /// Smallest block pair attaining `max_norm`.
    pub witness: Option<(usize, usize)>,
    pub histogram: GramHistogram,
    #[cfg_attr(feature = "serde", serde(with = "crate::serde_ratio"))]
    pub mu: Rational,
    /// `t / k`.
    #[cfg_attr(feature = "serde", serde(with = "crate::serde_ratio"))]
    pub bound: Rational,
    /// `μ_B ≤ μ ≤ t/k`.
    pub within_bounds: bool,
    /// `1/(p-1)` when the Euler-square equality applies: `t = 1`,
    /// `k = n - 1`, `n` a prime power and `d | n`.
    #[cfg_attr(feature = "serde", serde(with = "crate::serde_ratio::option"))]
    pub equality_claim: Option<Rational>,
    pub equality_holds: Option<bool>,
}

pub fn block_coherence(
    m: &BinarySensingMatrix,
    d: usize,
) -> Result<BlockCoherenceReport, AnalysisError> {
    block_coherence_with(m, d, BlockPath::Auto)
}

pub fn block_coherence_with(
    m: &BinarySensingMatrix,
    d: usize,
    path: BlockPath,
) -> Result<BlockCoherenceReport, AnalysisError> {
    let blocks = block_count(m, d)?;
    if blocks < 2 {
        return Err(AnalysisError::BlockPartitionInvalid(format!(
            "block length {d} leaves fewer than two blocks"
        )));
    }
    if d > MAX_BLOCK {
        return Err(AnalysisError::TooLarge(d));
    }
    let path = match path {
        BlockPath::Auto if m.t() == 1 => BlockPath::Structural,
        BlockPath::Auto => BlockPath::Numeric,
        p => p,
    };
    let k = m.k();
    let mut histogram = GramHistogram::default();
    let mut exact_max: Option<u64> = Some(0);
    let mut max_norm = -1.0f64;
    let mut witness = None;
    let mut scaled = vec![0.0; d * d];
    for l in 0..blocks {
        for r in l + 1..blocks {
            let g = block_gram(m, l, r, d)?;
            let pattern = GramPattern::classify(&g, d);
            histogram.record(pattern);
            let closed = match path {
                BlockPath::Structural => pattern.norm(d),
                _ => None,
            };
            let norm = match closed {
                Some(v) => {
                    exact_max = exact_max.map(|e| e.max(v));
                    v as f64 / k as f64
                }
                None => {
                    exact_max = None;
                    for (s, &v) in scaled.iter_mut().zip(&g) {
                        *s = f64::from(v) / k as f64;
                    }
                    spectral_norm(&scaled, d)?
                }
            };
            if norm > max_norm {
                max_norm = norm;
                witness = Some((l, r));
            }
        }
    }
    let mu_b = max_norm / d as f64;
    let mu_b_exact = exact_max.map(|v| Rational::new(v, (d * k) as u64));
    let ov = max_overlap(m);
    let mu = Rational::new(ov.max as u64, k as u64);
    let bound = Rational::new(u64::from(m.t()), k as u64);
    let mu_f = *mu.numer() as f64 / *mu.denom() as f64;
    let within_bounds = mu_b <= mu_f + 1e-12 && mu <= bound;
    let n = u64::from(m.n());
    let equality_claim = (m.t() == 1
        && k as u64 == n - 1
        && prime_power(n).is_some()
        && n % d as u64 == 0
        && (d as u64) < n)
        .then(|| Rational::new(1, n - 1));
    let equality_holds = equality_claim.map(|c| match mu_b_exact {
        Some(e) => e == c,
        None => (mu_b - 1.0 / (n - 1) as f64).abs() <= 1e-9,
    });
    Ok(BlockCoherenceReport {
        d,
        blocks,
        block_pairs: (blocks as u64) * (blocks as u64 - 1) / 2,
        path,
        mu_b,
        mu_b_exact,
        max_norm,
        witness,
        histogram,
        mu,
        bound,
        within_bounds,
        equality_claim,
        equality_holds,
    })
}
