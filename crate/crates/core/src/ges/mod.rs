//! Generalized Euler squares as rectangular arrays of k-tuples.
//!
//! A GES(n, k, t) is stored as an `n × n^t` grid. For a prime power `q`,
//! column `c` holds the polynomial `P = Σ_{m=1..t} c_m x^m` (zero constant
//! term, digits of `c` in base `q`, `c_1` least significant) and row `j`
//! holds the translate `P + f_j`. Each cell is the tuple `(P + f_j)(S_k)` with
//! `S_k = (f_1, …, f_k)`, relabelled by canonical index.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::ops::Deref;

use thiserror::Error;

use crate::field::FieldError;

mod construct;
mod lazy;
mod verify;

pub(crate) use verify::agreeing_pair;

pub use construct::{compose, construct_es, construct_ges, construct_prime_power_ges, truncate};
pub use lazy::{LazyGes, TupleSource};
pub use verify::{
    verify_ges, verify_ges_projection, verify_ges_sampled, verify_ges_with, AxiomCheck,
    AxiomReport, CellRef, VerifyMode, Witness,
};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GesError {
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error("{q} is not a prime power")]
    NotPrimePower { q: u64 },
    #[error("parameter violation: {0}")]
    ParameterViolation(String),
    #[error("tuple length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },
    #[error("invalid array shape: {0}")]
    InvalidShape(String),
}

/// Ordered k-ad of values in `{0, …, n-1}`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(transparent))]
pub struct KTuple(Vec<u32>);

impl KTuple {
    pub fn new(values: Vec<u32>) -> Self {
        KTuple(values)
    }

    pub fn into_inner(self) -> Vec<u32> {
        self.0
    }
}

impl Deref for KTuple {
    type Target = [u32];

    fn deref(&self) -> &[u32] {
        &self.0
    }
}

impl From<&[u32]> for KTuple {
    fn from(v: &[u32]) -> Self {
        KTuple(v.to_vec())
    }
}

/// Number of positions where two tuples hold the same value.
pub fn intersection(a: &[u32], b: &[u32]) -> Result<usize, GesError> {
    if a.len() != b.len() {
        return Err(GesError::LengthMismatch {
            left: a.len(),
            right: b.len(),
        });
    }
    Ok(count_agreements(a, b))
}

#[inline]
pub(crate) fn count_agreements(a: &[u32], b: &[u32]) -> usize {
    a.iter().zip(b).filter(|(x, y)| x == y).count()
}

/// One prime-power factor used in a construction.
#[derive(Debug, Clone, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Component {
    /// Field order `q = p^r`.
    pub q: u32,
    pub p: u32,
    pub r: u32,
    /// Reduction modulus, lowest degree first (empty for prime fields).
    pub modulus: Vec<u32>,
    /// Canonical indices of the evaluation points `S_k`.
    pub eval_points: Vec<u32>,
}

/// How an array was obtained.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Provenance {
    /// Prime-power components in composition (fold) order.
    pub components: Vec<Component>,
    /// Euler-square layout: rows indexed by the slope, columns by the
    /// constant term (the transpose of the polynomial-column layout).
    #[cfg_attr(feature = "serde", serde(default))]
    pub transposed: bool,
    /// Original tuple length when the array was truncated.
    #[cfg_attr(feature = "serde", serde(default))]
    pub truncated_from: Option<usize>,
}

/// An `n × n^t` array of k-tuples, stored row-major.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GesArray {
    n: u32,
    k: usize,
    t: u32,
    cols: usize,
    values: Vec<u32>,
    provenance: Provenance,
}

/// `n^t` as a column count, or `None` on overflow.
pub(crate) fn column_count(n: u32, t: u32) -> Option<usize> {
    (n as usize).checked_pow(t)
}

pub(crate) fn check_index(n: u32, k: usize, t: u32) -> Result<(), GesError> {
    if t == 0 || (k as u64) <= u64::from(t) || u64::from(n) <= k as u64 {
        return Err(GesError::ParameterViolation(format!(
            "GES index requires n > k > t >= 1, got n={n}, k={k}, t={t}"
        )));
    }
    Ok(())
}

impl GesArray {
    /// Assembles an array from raw row-major values (and validates the shape,
    /// not the axioms; use [`verify_ges`] for that).
    pub fn from_parts(
        n: u32,
        k: usize,
        t: u32,
        values: Vec<u32>,
        provenance: Provenance,
    ) -> Result<Self, GesError> {
        check_index(n, k, t)?;
        let cols = column_count(n, t)
            .ok_or_else(|| GesError::InvalidShape(format!("{n}^{t} columns overflow")))?;
        let expected = (n as usize)
            .checked_mul(cols)
            .and_then(|c| c.checked_mul(k))
            .ok_or_else(|| GesError::InvalidShape(String::from("array too large")))?;
        if values.len() != expected {
            return Err(GesError::InvalidShape(format!(
                "expected {expected} values ({n} rows x {cols} columns x k={k}), got {}",
                values.len()
            )));
        }
        Ok(GesArray {
            n,
            k,
            t,
            cols,
            values,
            provenance,
        })
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn t(&self) -> u32 {
        self.t
    }

    pub fn rows(&self) -> usize {
        self.n as usize
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    /// Total number of tuples, `n^(t+1)`.
    pub fn len(&self) -> usize {
        self.rows() * self.cols
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn provenance(&self) -> &Provenance {
        &self.provenance
    }

    /// Row-major flat values, `k` per cell.
    pub fn values(&self) -> &[u32] {
        &self.values
    }

    pub fn tuple(&self, row: usize, col: usize) -> &[u32] {
        let start = (row * self.cols + col) * self.k;
        &self.values[start..start + self.k]
    }

    /// Tuple by flat row-major position `row * cols + col`.
    pub fn tuple_at(&self, pos: usize) -> &[u32] {
        &self.values[pos * self.k..(pos + 1) * self.k]
    }

    /// Iterates the tuples of one column in row order.
    pub fn column(&self, col: usize) -> impl Iterator<Item = &[u32]> + '_ {
        (0..self.rows()).map(move |row| self.tuple(row, col))
    }

    /// Cells in row-major order.
    pub fn tuples(&self) -> impl Iterator<Item = &[u32]> + '_ {
        self.values.chunks_exact(self.k)
    }

    /// Swaps rows and columns; only square arrays (t = 1) can be transposed.
    pub fn transpose(&self) -> Result<GesArray, GesError> {
        if self.t != 1 {
            return Err(GesError::ParameterViolation(format!(
                "only t = 1 arrays are square, got t={}",
                self.t
            )));
        }
        let n = self.rows();
        let mut values = Vec::with_capacity(self.values.len());
        for row in 0..n {
            for col in 0..n {
                values.extend_from_slice(self.tuple(col, row));
            }
        }
        let mut provenance = self.provenance.clone();
        provenance.transposed = !provenance.transposed;
        GesArray::from_parts(self.n, self.k, self.t, values, provenance)
    }
}
