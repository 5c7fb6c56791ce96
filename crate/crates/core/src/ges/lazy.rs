//! On-demand tuple evaluation for arrays too large to materialize.

use alloc::vec::Vec;

use super::construct::field_for;
use super::{GesArray, GesError};
use crate::arith;
use crate::field::{FieldElement, FieldSpec};

/// Anything that can produce the tuple at `(row, col)` of a GES-shaped array.
pub trait TupleSource {
    fn n(&self) -> u32;
    fn k(&self) -> usize;
    fn t(&self) -> u32;
    fn rows(&self) -> u64;
    fn cols(&self) -> u64;
    fn write_tuple(&self, row: u64, col: u64, out: &mut [u32]);
}

impl TupleSource for GesArray {
    fn n(&self) -> u32 {
        GesArray::n(self)
    }

    fn k(&self) -> usize {
        GesArray::k(self)
    }

    fn t(&self) -> u32 {
        GesArray::t(self)
    }

    fn rows(&self) -> u64 {
        GesArray::rows(self) as u64
    }

    fn cols(&self) -> u64 {
        GesArray::cols(self) as u64
    }

    fn write_tuple(&self, row: u64, col: u64, out: &mut [u32]) {
        out.copy_from_slice(self.tuple(row as usize, col as usize));
    }
}

/// GES(n, k, t) evaluated cell by cell, matching [`super::construct_ges`]
/// without storing the `n^(t+1)` tuples.
#[derive(Debug, Clone)]
pub struct LazyGes {
    n: u32,
    k: usize,
    t: u32,
    cols: u64,
    fields: Vec<FieldSpec>,
}

impl LazyGes {
    pub fn new(n: u64, k: usize, t: u32) -> Result<Self, GesError> {
        if n < 2 || t == 0 || k as u64 <= u64::from(t) {
            return Err(GesError::ParameterViolation(alloc::format!(
                "GES index requires n > k > t >= 1, got n={n}, k={k}, t={t}"
            )));
        }
        let comps = arith::prime_power_components(n);
        if let Some(&small) = comps.iter().find(|&&q| k as u64 >= q) {
            return Err(GesError::ParameterViolation(alloc::format!(
                "prime-power component {small} of n={n} requires t < k < {small}, got k={k}, t={t}"
            )));
        }
        let cols = n.checked_pow(t).ok_or_else(|| {
            GesError::ParameterViolation(alloc::format!("{n}^{t} columns overflow"))
        })?;
        let fields = comps
            .iter()
            .map(|&q| field_for(q))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(LazyGes {
            n: n as u32,
            k,
            t,
            cols,
            fields,
        })
    }

    pub fn total(&self) -> u128 {
        u128::from(self.n) * u128::from(self.cols)
    }
}

impl TupleSource for LazyGes {
    fn n(&self) -> u32 {
        self.n
    }

    fn k(&self) -> usize {
        self.k
    }

    fn t(&self) -> u32 {
        self.t
    }

    fn rows(&self) -> u64 {
        u64::from(self.n)
    }

    fn cols(&self) -> u64 {
        self.cols
    }

    fn write_tuple(&self, row: u64, col: u64, out: &mut [u32]) {
        let n = u64::from(self.n);
        let t = self.t as usize;
        let mut digits: Vec<u64> = Vec::with_capacity(t);
        let mut rest = col;
        for _ in 0..t {
            digits.push(rest % n);
            rest /= n;
        }
        let mut row_rest = row;
        out.iter_mut().for_each(|v| *v = 0);
        let mut weight = 1u32;
        let mut coeffs = Vec::with_capacity(t + 1);
        for field in &self.fields {
            let q = u64::from(field.order());
            let constant = FieldElement::from_index((row_rest % q) as u32);
            row_rest /= q;
            coeffs.clear();
            coeffs.push(constant);
            for d in digits.iter_mut() {
                coeffs.push(FieldElement::from_index((*d % q) as u32));
                *d /= q;
            }
            for (l, v) in out.iter_mut().enumerate() {
                let x = FieldElement::from_index(l as u32 + 1);
                *v += weight * field.eval_poly(&coeffs, x).idx();
            }
            weight *= field.order();
        }
    }
}
