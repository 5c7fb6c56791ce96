//! OMP, Block-OMP and the block-sparse recovery guarantee.
//!
//! Both solvers see the normalized matrix `Φ/√k`. Each iteration picks the
//! column (or width-`d` block) with the largest correlation to the residual,
//! ties going to the smallest index, then re-fits every selected column by
//! least squares. The normal equations use the exact Gram `overlap / k` and
//! are solved by Cholesky.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use thiserror::Error;

use crate::ges::GesError;
use crate::matrix::{BinarySensingMatrix, MatrixError};
use crate::rng::SplitMix64;
use crate::Rational;

mod experiment;

pub use experiment::{
    experiment_array, run_recovery_experiment, Experiment, ExperimentConfig, RecoveryStats,
    SStats, Solver, SupportMode, TrialOutcome, EXACT_TOL,
};

/// Pivot threshold for the Cholesky factorization.
const PIVOT_TOL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum RecoveryError {
    #[error("selected columns are linearly dependent (pivot {pivot:e} at column {column})")]
    SingularSubproblem { column: usize, pivot: f64 },
    #[error("parameter violation: {0}")]
    ParameterViolation(String),
    #[error("hypothesis violated: {0}")]
    HypothesisViolated(String),
    #[error("guarantee violated at s={s}: {failures} of {trials} trials inexact")]
    GuaranteeViolated { s: usize, failures: u64, trials: u64 },
    #[error(transparent)]
    Matrix(#[from] MatrixError),
    #[error(transparent)]
    Ges(#[from] GesError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "lowercase"))]
pub enum ValueDist {
    Gaussian,
    Rademacher,
}

/// A signal of `len` entries split into blocks of `d`, nonzero on `support`.
#[derive(Debug, Clone, PartialEq)]
pub struct BlockSparseSignal {
    pub d: usize,
    /// Sorted block indices.
    pub support: Vec<usize>,
    pub values: Vec<f64>,
}

impl BlockSparseSignal {
    /// Number of blocks with nonzero norm, `‖x‖_{2,0}`.
    pub fn block_sparsity(&self) -> usize {
        self.values
            .chunks(self.d)
            .filter(|b| b.iter().any(|&v| v != 0.0))
            .count()
    }

    /// Fills the given blocks with draws from `dist`.
    pub fn on_support(
        len: usize,
        d: usize,
        support: Vec<usize>,
        dist: ValueDist,
        rng: &mut SplitMix64,
    ) -> Result<Self, RecoveryError> {
        if d == 0 || len % d != 0 {
            return Err(RecoveryError::ParameterViolation(format!(
                "block length {d} does not divide signal length {len}"
            )));
        }
        if let Some(&b) = support.iter().find(|&&b| b >= len / d) {
            return Err(RecoveryError::ParameterViolation(format!(
                "block {b} out of range ({} blocks)",
                len / d
            )));
        }
        let mut values = vec![0.0; len];
        for &b in &support {
            let block = &mut values[b * d..(b + 1) * d];
            loop {
                for v in block.iter_mut() {
                    *v = match dist {
                        ValueDist::Gaussian => rng.next_gaussian(),
                        ValueDist::Rademacher => {
                            if rng.next_u64() >> 63 == 0 {
                                1.0
                            } else {
                                -1.0
                            }
                        }
                    };
                }
                if block.iter().any(|&v| v != 0.0) {
                    break;
                }
            }
        }
        Ok(BlockSparseSignal { d, support, values })
    }
}

/// Random block `s`-sparse signal of length `len`.
pub fn gen_block_sparse(
    len: usize,
    d: usize,
    s: usize,
    dist: ValueDist,
    seed: u64,
) -> Result<BlockSparseSignal, RecoveryError> {
    if d == 0 || len % d != 0 || s > len / d {
        return Err(RecoveryError::ParameterViolation(format!(
            "need d | len and s <= len/d, got len={len}, d={d}, s={s}"
        )));
    }
    let mut rng = SplitMix64::new(seed);
    let support: Vec<usize> = rng
        .subset((len / d) as u64, s)
        .into_iter()
        .map(|b| b as usize)
        .collect();
    BlockSparseSignal::on_support(len, d, support, dist, &mut rng)
}

#[derive(Debug, Clone, PartialEq)]
pub struct Estimate {
    pub x: Vec<f64>,
    /// Selected columns (OMP) or blocks (BOMP), in selection order.
    pub selected: Vec<usize>,
    pub residual: Vec<f64>,
    pub residual_norm: f64,
}

impl Estimate {
    pub fn sorted_support(&self) -> Vec<usize> {
        let mut s = self.selected.clone();
        s.sort_unstable();
        s
    }
}

fn norm(v: &[f64]) -> f64 {
    libm::sqrt(v.iter().map(|x| x * x).sum())
}

/// In-place Cholesky `A = LLᵀ` of a row-major `n × n` matrix; returns `L`.
fn cholesky(a: &[f64], n: usize) -> Result<Vec<f64>, RecoveryError> {
    let mut l = vec![0.0; n * n];
    for j in 0..n {
        let mut diag = a[j * n + j];
        for p in 0..j {
            diag -= l[j * n + p] * l[j * n + p];
        }
        if !(diag > PIVOT_TOL) {
            return Err(RecoveryError::SingularSubproblem {
                column: j,
                pivot: diag,
            });
        }
        let ljj = libm::sqrt(diag);
        l[j * n + j] = ljj;
        for i in j + 1..n {
            let mut v = a[i * n + j];
            for p in 0..j {
                v -= l[i * n + p] * l[j * n + p];
            }
            l[i * n + j] = v / ljj;
        }
    }
    Ok(l)
}

fn cholesky_solve(l: &[f64], n: usize, b: &[f64]) -> Vec<f64> {
    let mut z = b.to_vec();
    for i in 0..n {
        for p in 0..i {
            z[i] -= l[i * n + p] * z[p];
        }
        z[i] /= l[i * n + i];
    }
    for i in (0..n).rev() {
        for p in i + 1..n {
            z[i] -= l[p * n + i] * z[p];
        }
        z[i] /= l[i * n + i];
    }
    z
}

/// Least-squares fit of `y` on the normalized columns `cols`; returns the
/// coefficients and the residual.
fn refit(
    m: &BinarySensingMatrix,
    y: &[f64],
    cols: &[usize],
) -> Result<(Vec<f64>, Vec<f64>), RecoveryError> {
    let n = cols.len();
    let k = m.k() as f64;
    let scale = m.scale();
    let mut gram = vec![0.0; n * n];
    for (a, &i) in cols.iter().enumerate() {
        for (b, &j) in cols.iter().enumerate() {
            gram[a * n + b] = m.overlap(i, j) as f64 / k;
        }
    }
    let rhs: Vec<f64> = cols
        .iter()
        .map(|&j| m.column(j).iter().map(|&r| y[r as usize]).sum::<f64>() * scale)
        .collect();
    let l = cholesky(&gram, n)?;
    let z = cholesky_solve(&l, n, &rhs);
    let mut residual = y.to_vec();
    for (&j, &zj) in cols.iter().zip(&z) {
        for &r in m.column(j) {
            residual[r as usize] -= zj * scale;
        }
    }
    Ok((z, residual))
}

fn check_measurement(m: &BinarySensingMatrix, y: &[f64]) -> Result<(), RecoveryError> {
    if y.len() != m.rows() {
        return Err(MatrixError::DimensionMismatch {
            expected: m.rows(),
            got: y.len(),
        }
        .into());
    }
    Ok(())
}

/// Orthogonal Matching Pursuit: at most `s` iterations, stopping early once
/// the residual norm drops below `tol`.
pub fn omp(
    m: &BinarySensingMatrix,
    y: &[f64],
    s: usize,
    tol: f64,
) -> Result<Estimate, RecoveryError> {
    bomp(m, y, 1, s, tol)
}

/// Block OMP over consecutive blocks of `d` columns.
pub fn bomp(
    m: &BinarySensingMatrix,
    y: &[f64],
    d: usize,
    s: usize,
    tol: f64,
) -> Result<Estimate, RecoveryError> {
    check_measurement(m, y)?;
    if d == 0 || m.cols() % d != 0 {
        return Err(RecoveryError::ParameterViolation(format!(
            "block length {d} does not divide {} columns",
            m.cols()
        )));
    }
    let blocks = m.cols() / d;
    if s * d > m.rows() || s > blocks {
        return Err(RecoveryError::ParameterViolation(format!(
            "s={s} blocks of {d} exceed the {} measurements",
            m.rows()
        )));
    }
    let mut selected: Vec<usize> = Vec::with_capacity(s);
    let mut chosen = vec![false; blocks];
    let mut cols: Vec<usize> = Vec::with_capacity(s * d);
    let mut coef: Vec<f64> = Vec::new();
    let mut residual = y.to_vec();
    let mut rnorm = norm(&residual);
    while selected.len() < s && rnorm >= tol {
        let corr = m.apply_adjoint(&residual, true)?;
        let mut best: Option<(usize, f64)> = None;
        for (b, c) in corr.chunks(d).enumerate() {
            if chosen[b] {
                continue;
            }
            let score: f64 = c.iter().map(|v| v * v).sum();
            if best.map_or(true, |(_, s)| score > s) {
                best = Some((b, score));
            }
        }
        let Some((b, _)) = best else { break };
        chosen[b] = true;
        selected.push(b);
        cols.extend(b * d..(b + 1) * d);
        let (z, r) = refit(m, y, &cols)?;
        coef = z;
        residual = r;
        rnorm = norm(&residual);
    }
    let mut x = vec![0.0; m.cols()];
    for (&j, &v) in cols.iter().zip(&coef) {
        x[j] = v;
    }
    Ok(Estimate {
        x,
        selected,
        residual,
        residual_norm: rnorm,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "lowercase"))]
pub enum Family {
    /// Euler-square matrices, `t = 1`.
    Es,
    Ges,
}

#[derive(Debug, Clone, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct BompGuarantee {
    /// Recovery holds for every block sparsity `s < bound`.
    #[cfg_attr(feature = "serde", serde(with = "crate::serde_ratio"))]
    pub bound: Rational,
    /// Largest integer strictly below `bound`.
    pub s_star: u64,
    /// `(1/μ_B + d) / (2d)` for a supplied `μ_B`.
    #[cfg_attr(feature = "serde", serde(with = "crate::serde_ratio::option"))]
    pub generic_bound: Option<Rational>,
    pub generic_s_star: Option<u64>,
}

fn below(bound: Rational) -> u64 {
    (bound.numer() - 1) / bound.denom()
}

/// Largest block sparsity with guaranteed BOMP recovery:
/// `s < (1 + k/(d·t)) / 2`, with `t = 1` for the Euler-square family.
pub fn bomp_guarantee(
    k: u64,
    d: u64,
    t: u64,
    family: Family,
    mu_b: Option<Rational>,
) -> Result<BompGuarantee, RecoveryError> {
    if d == 0 || t == 0 {
        return Err(RecoveryError::ParameterViolation("d and t must be >= 1".into()));
    }
    let t = match family {
        Family::Es => {
            if d > k {
                return Err(RecoveryError::HypothesisViolated(format!(
                    "block length d={d} exceeds k={k}"
                )));
            }
            1
        }
        Family::Ges => {
            if d > k / t {
                return Err(RecoveryError::HypothesisViolated(format!(
                    "block length d={d} exceeds floor(k/t)={}",
                    k / t
                )));
            }
            t
        }
    };
    let bound = Rational::new(d * t + k, 2 * d * t);
    let generic_bound = match mu_b {
        Some(mu) if *mu.numer() == 0 => None,
        Some(mu) => Some(Rational::new(
            mu.denom() + d * mu.numer(),
            2 * d * mu.numer(),
        )),
        None => None,
    };
    Ok(BompGuarantee {
        bound,
        s_star: below(bound),
        generic_bound,
        generic_s_star: generic_bound.map(below),
    })
}
