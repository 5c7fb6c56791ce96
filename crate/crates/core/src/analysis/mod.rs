//! Coherence, RIP and column-count bounds, and block structure of `Φ`.

use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::ops::Range;

use thiserror::Error;

use crate::arith::binomial;
use crate::matrix::BinarySensingMatrix;
use crate::Rational;

mod block;
mod spectral;

pub use block::{
    block_coherence, block_coherence_with, block_gram, verify_block_orthogonality,
    BlockCoherenceReport, BlockOrthReport, BlockPath, GramHistogram, GramPattern,
};
pub use spectral::{jacobi_eigenvalues, spectral_norm};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AnalysisError {
    #[error("invalid block partition: {0}")]
    BlockPartitionInvalid(String),
    #[error("block index {index} out of range (have {blocks})")]
    IndexOutOfRange { index: usize, blocks: usize },
    #[error("non-finite matrix input")]
    NonFiniteInput,
    #[error("matrix dimension {0} is too large")]
    TooLarge(usize),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

/// Largest overlap between two distinct columns.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct OverlapResult {
    pub max: usize,
    /// Lexicographically smallest pair attaining `max`.
    pub witness: Option<(usize, usize)>,
    pub pairs_checked: u128,
}

impl OverlapResult {
    /// Combines results over disjoint anchor ranges.
    pub fn merge(self, other: OverlapResult) -> OverlapResult {
        let pairs_checked = self.pairs_checked + other.pairs_checked;
        let pick = match (self.witness, other.witness) {
            (None, _) => other,
            (_, None) => self,
            (Some(a), Some(b)) => {
                if self.max > other.max || (self.max == other.max && a < b) {
                    self
                } else {
                    other
                }
            }
        };
        OverlapResult {
            pairs_checked,
            ..pick
        }
    }
}

/// Row-to-columns incidence lists used for overlap accumulation.
#[derive(Debug, Clone)]
pub struct OverlapIndex<'a> {
    m: &'a BinarySensingMatrix,
    starts: Vec<usize>,
    incident: Vec<u32>,
}

impl<'a> OverlapIndex<'a> {
    pub fn new(m: &'a BinarySensingMatrix) -> Self {
        let mut counts = vec![0usize; m.rows() + 1];
        for &r in m.entries() {
            counts[r as usize + 1] += 1;
        }
        for i in 0..m.rows() {
            counts[i + 1] += counts[i];
        }
        let mut fill = counts.clone();
        let mut incident = vec![0u32; m.nnz()];
        // Columns are visited in increasing order, so each list is sorted.
        for j in 0..m.cols() {
            for &r in m.column(j) {
                incident[fill[r as usize]] = j as u32;
                fill[r as usize] += 1;
            }
        }
        OverlapIndex {
            m,
            starts: counts,
            incident,
        }
    }

    /// Columns with a one in row `r`, ascending.
    pub fn row(&self, r: usize) -> &[u32] {
        &self.incident[self.starts[r]..self.starts[r + 1]]
    }

    /// Maximum overlap over pairs `(i, j)` with `i` in `anchors` and `j > i`.
    ///
    /// For each anchor the overlaps with all later columns are accumulated
    /// along the anchor's rows into a dense counter.
    pub fn scan(&self, anchors: Range<usize>) -> OverlapResult {
        let cols = self.m.cols();
        let mut counter = vec![0u32; cols];
        let mut touched: Vec<usize> = Vec::new();
        let mut best = OverlapResult {
            max: 0,
            witness: None,
            pairs_checked: 0,
        };
        for i in anchors {
            if i + 1 >= cols {
                continue;
            }
            best.pairs_checked += (cols - i - 1) as u128;
            for &r in self.m.column(i) {
                let row = self.row(r as usize);
                let from = row.partition_point(|&j| j as usize <= i);
                for &j in &row[from..] {
                    let c = &mut counter[j as usize];
                    if *c == 0 {
                        touched.push(j as usize);
                    }
                    *c += 1;
                }
            }
            // Pairs that share nothing still count: seed the witness with (i, i+1).
            if best.witness.is_none() {
                best.witness = Some((i, i + 1));
                best.max = counter[i + 1] as usize;
            }
            let mut top: Option<(usize, usize)> = None;
            for &j in &touched {
                let c = counter[j] as usize;
                if top.is_none_or(|(tc, tj)| c > tc || (c == tc && j < tj)) {
                    top = Some((c, j));
                }
                counter[j] = 0;
            }
            if let Some((c, j)) = top.filter(|&(c, _)| c > best.max) {
                best.max = c;
                best.witness = Some((i, j));
            }
            touched.clear();
        }
        best
    }
}

/// Exact maximum pairwise column overlap.
pub fn max_overlap(m: &BinarySensingMatrix) -> OverlapResult {
    OverlapIndex::new(m).scan(0..m.cols())
}

/// Direct `O(cols² · k)` comparison of every column pair.
pub fn max_overlap_naive(m: &BinarySensingMatrix) -> OverlapResult {
    let mut best = OverlapResult {
        max: 0,
        witness: None,
        pairs_checked: 0,
    };
    for i in 0..m.cols() {
        for j in i + 1..m.cols() {
            let c = m
                .column(i)
                .iter()
                .filter(|r| m.column(j).contains(r))
                .count();
            best.pairs_checked += 1;
            if best.witness.is_none() || c > best.max {
                best.max = c;
                best.witness = Some((i, j));
            }
        }
    }
    best
}

#[derive(Debug, Clone, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct CoherenceReport {
    /// `max_overlap / k`.
    #[cfg_attr(feature = "serde", serde(with = "crate::serde_ratio"))]
    pub mu: Rational,
    pub max_overlap: usize,
    /// `t / k`.
    #[cfg_attr(feature = "serde", serde(with = "crate::serde_ratio"))]
    pub bound: Rational,
    pub certified: bool,
    pub witness_pair: Option<(usize, usize)>,
    pub pairs_checked: u128,
}

impl CoherenceReport {
    pub fn from_overlap(k: usize, t: u32, ov: OverlapResult) -> Self {
        let mu = Rational::new(ov.max as u64, k as u64);
        let bound = Rational::new(u64::from(t), k as u64);
        CoherenceReport {
            mu,
            max_overlap: ov.max,
            bound,
            certified: mu <= bound,
            witness_pair: ov.witness,
            pairs_checked: ov.pairs_checked,
        }
    }
}

/// Coherence of `Φ/√k`.
pub fn coherence(m: &BinarySensingMatrix) -> CoherenceReport {
    CoherenceReport::from_overlap(m.k(), m.t(), max_overlap(m))
}

#[derive(Debug, Clone, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct RipReport {
    pub order: u64,
    /// `(order - 1) · mu`.
    #[cfg_attr(feature = "serde", serde(with = "crate::serde_ratio"))]
    pub delta: Rational,
    #[cfg_attr(feature = "serde", serde(with = "crate::serde_ratio"))]
    pub mu_used: Rational,
    pub valid_regime: bool,
}

/// RIP constant implied by coherence: `δ = (order - 1) · μ`.
pub fn rip_bound(mu: Rational, order: u64) -> Result<RipReport, AnalysisError> {
    if order == 0 {
        return Err(AnalysisError::InvalidArgument("RIP order must be >= 1".into()));
    }
    let delta = mu * (order - 1);
    Ok(RipReport {
        order,
        delta,
        mu_used: mu,
        valid_regime: delta < Rational::from_integer(1),
    })
}

/// Upper bound `C(m, t+1) / C(k, t+1)` on the columns of any binary `m`-row
/// matrix with `k` ones per column and overlaps at most `t`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ColumnBound {
    pub numerator: u128,
    pub denominator: u128,
    pub floor: u128,
}

impl ColumnBound {
    /// `columns / bound` as an exact fraction `(num, den)` in lowest terms.
    pub fn ratio(&self, columns: u128) -> (u128, u128) {
        let (num, den) = (columns * self.denominator, self.numerator);
        let g = num_integer::gcd(num, den);
        (num / g, den / g)
    }
}

pub fn max_column_bound(mrows: u64, k: u64, t: u64) -> Result<ColumnBound, AnalysisError> {
    if !(k > t && mrows >= k) {
        return Err(AnalysisError::InvalidArgument(alloc::format!(
            "column bound requires mrows >= k >= t+1, got mrows={mrows}, k={k}, t={t}"
        )));
    }
    let too_large = || AnalysisError::TooLarge(mrows as usize);
    let numerator = binomial(mrows, t + 1).ok_or_else(too_large)?;
    let denominator = binomial(k, t + 1).ok_or_else(too_large)?;
    Ok(ColumnBound {
        numerator,
        denominator,
        floor: numerator / denominator,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ges::{construct_es, construct_ges, Provenance};
    use crate::matrix::build_matrix;

    fn phi(n: u64, k: usize, t: u32) -> BinarySensingMatrix {
        build_matrix(&construct_ges(n, k, t).unwrap()).unwrap()
    }

    #[test]
    fn overlap_examples() {
        let m = build_matrix(&construct_es(3, 2).unwrap()).unwrap();
        let ov = max_overlap(&m);
        assert_eq!((ov.max, ov.pairs_checked), (1, 36));
        assert_eq!(ov, max_overlap_naive(&m));
        let m = phi(5, 4, 2);
        let ov = max_overlap(&m);
        assert_eq!((ov.max, ov.pairs_checked), (2, 7750));
        assert_eq!(ov, max_overlap_naive(&m));
    }

    #[test]
    fn duplicate_column_overlap() {
        let m = build_matrix(&construct_es(3, 2).unwrap()).unwrap();
        let mut e = m.entries().to_vec();
        e.copy_within(0..2, 14);
        let dup = BinarySensingMatrix::from_columns(3, 2, 1, e, Provenance::default()).unwrap();
        let ov = max_overlap(&dup);
        assert_eq!((ov.max, ov.witness), (2, Some((0, 7))));
        assert_eq!(ov, max_overlap_naive(&dup));
    }

    #[test]
    fn accumulation_matches_naive() {
        for (n, k, t) in [(3u64, 2usize, 1u32), (4, 3, 1), (5, 2, 1), (5, 4, 1), (7, 6, 1), (4, 3, 2), (5, 3, 2)] {
            let m = phi(n, k, t);
            assert_eq!(max_overlap(&m), max_overlap_naive(&m), "({n},{k},{t})");
        }
        let m = phi(5, 4, 2);
        let split = OverlapIndex::new(&m);
        let merged = split.scan(0..40).merge(split.scan(40..125));
        assert_eq!(merged, max_overlap(&m));
    }

    #[test]
    fn coherence_examples() {
        let r = coherence(&build_matrix(&construct_es(3, 2).unwrap()).unwrap());
        assert_eq!((r.mu, r.bound, r.certified), (Rational::new(1, 2), Rational::new(1, 2), true));
        let r = coherence(&phi(5, 4, 2));
        assert_eq!(r.mu, Rational::new(1, 2));
        assert!(r.certified);
        let r = coherence(&build_matrix(&construct_es(7, 6).unwrap()).unwrap());
        assert_eq!(r.mu, Rational::new(1, 6));
    }

    #[test]
    fn rip_examples() {
        assert_eq!(rip_bound(Rational::new(1, 2), 2).unwrap().delta, Rational::new(1, 2));
        assert_eq!(rip_bound(Rational::new(3, 7), 1).unwrap().delta, Rational::from_integer(0));
        let r = rip_bound(Rational::new(1, 6), 7).unwrap();
        assert_eq!(r.delta, Rational::from_integer(1));
        assert!(!r.valid_regime);
        assert!(rip_bound(Rational::new(1, 6), 6).unwrap().valid_regime);
        assert!(rip_bound(Rational::new(1, 6), 0).is_err());
    }

    #[test]
    fn column_bound_examples() {
        assert_eq!(max_column_bound(6, 2, 1).unwrap().floor, 15);
        let b = max_column_bound(20, 4, 2).unwrap();
        assert_eq!((b.numerator, b.denominator, b.floor), (1140, 4, 285));
        assert_eq!(b.ratio(125), (25, 57));
        assert_eq!(max_column_bound(30, 3, 2).unwrap().floor, 4060);
        assert!(max_column_bound(3, 4, 2).is_err());
    }
}
