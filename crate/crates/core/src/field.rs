//! Finite fields GF(p^r) with a canonical element order.
//!
//! Elements are identified by their canonical index: the element with
//! polynomial representation `c_{r-1} x^{r-1} + … + c_1 x + c_0` has index
//! `Σ c_j p^j`. Index 0 is the additive identity and index 1 the
//! multiplicative identity. The same index doubles as the relabelled value
//! written into GES tuples.

use alloc::vec;
use alloc::vec::Vec;

use thiserror::Error;

use crate::arith;

/// Above this order the addition/multiplication tables are not cached.
const TABLE_LIMIT: u32 = 256;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FieldError {
    #[error("field order must be at least 2, got {0}")]
    InvalidOrder(u64),
    #[error("{q} is not a prime power")]
    NotPrimePower { q: u64 },
    #[error("division by zero")]
    DivisionByZero,
    #[error("element index {idx} out of range for GF({q})")]
    ElementOutOfRange { idx: u32, q: u32 },
}

/// An element of a [`FieldSpec`], stored as its canonical index.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct FieldElement(u32);

impl FieldElement {
    pub const ZERO: FieldElement = FieldElement(0);
    pub const ONE: FieldElement = FieldElement(1);

    /// Wraps a canonical index without range checking; see [`FieldSpec::element`].
    pub const fn from_index(idx: u32) -> Self {
        FieldElement(idx)
    }

    pub const fn idx(self) -> u32 {
        self.0
    }
}

/// GF(p^r): characteristic, degree, order and reduction modulus.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FieldSpec {
    p: u32,
    r: u32,
    q: u32,
    modulus: Vec<u32>,
    add_table: Option<Vec<u32>>,
    mul_table: Option<Vec<u32>>,
}

/// Builds GF(q) for a prime power `q`.
///
/// For `q = p^r` with `r ≥ 2` the modulus is the smallest monic irreducible
/// polynomial of degree `r` (see [`find_irreducible`]).
pub fn make_field(q: u64) -> Result<FieldSpec, FieldError> {
    if q < 2 {
        return Err(FieldError::InvalidOrder(q));
    }
    let (p, r) = arith::prime_power(q).ok_or(FieldError::NotPrimePower { q })?;
    if q > u64::from(u32::MAX) {
        return Err(FieldError::InvalidOrder(q));
    }
    let (p, q) = (p as u32, q as u32);
    let modulus = if r == 1 { Vec::new() } else { find_irreducible(p, r) };
    let mut field = FieldSpec {
        p,
        r,
        q,
        modulus,
        add_table: None,
        mul_table: None,
    };
    if q <= TABLE_LIMIT {
        let n = q as usize;
        let mut add = vec![0; n * n];
        let mut mul = vec![0; n * n];
        for a in 0..q {
            for b in 0..q {
                let i = a as usize * n + b as usize;
                add[i] = field.add_slow(a, b);
                mul[i] = field.mul_slow(a, b);
            }
        }
        field.add_table = Some(add);
        field.mul_table = Some(mul);
    }
    Ok(field)
}

/// Smallest monic irreducible polynomial of degree `r ≥ 2` over GF(p),
/// returned as `r + 1` coefficients, lowest degree first.
///
/// Candidates are ordered by the integer `Σ c_j p^j` of their lower
/// coefficients, i.e. compared from `c_{r-1}` down to `c_0`. This gives
/// `x² + x + 1`, `x³ + x + 1` and `x² + 1` for GF(4), GF(8) and GF(9).
/// Irreducibility is decided by trial division by every monic polynomial of
/// degree `1..=r/2`.
pub fn find_irreducible(p: u32, r: u32) -> Vec<u32> {
    assert!(r >= 2, "find_irreducible needs degree >= 2");
    let r = r as usize;
    let count = (p as u64).pow(r as u32);
    for code in 0..count {
        // `code = Σ c_j p^j`, so higher-degree coefficients weigh more.
        let mut poly = vec![0u32; r + 1];
        let mut rest = code;
        for c in poly.iter_mut().take(r) {
            *c = (rest % u64::from(p)) as u32;
            rest /= u64::from(p);
        }
        poly[r] = 1;
        if is_irreducible(&poly, p) {
            return poly;
        }
    }
    unreachable!("an irreducible polynomial exists for every degree")
}

/// Trial-division irreducibility test for a monic polynomial over GF(p).
pub fn is_irreducible(poly: &[u32], p: u32) -> bool {
    let deg = poly.len() - 1;
    if deg == 0 {
        return false;
    }
    for d in 1..=deg / 2 {
        let count = (p as u64).pow(d as u32);
        for code in 0..count {
            let mut divisor = vec![0u32; d + 1];
            let mut rest = code;
            for c in divisor.iter_mut().take(d) {
                *c = (rest % u64::from(p)) as u32;
                rest /= u64::from(p);
            }
            divisor[d] = 1;
            if poly_rem(poly, &divisor, p).iter().all(|&c| c == 0) {
                return false;
            }
        }
    }
    true
}

/// Remainder of `a` modulo the monic polynomial `m` over GF(p).
fn poly_rem(a: &[u32], m: &[u32], p: u32) -> Vec<u32> {
    let dm = m.len() - 1;
    let mut rem = a.to_vec();
    while rem.len() > dm {
        let lead = *rem.last().unwrap();
        let shift = rem.len() - 1 - dm;
        if lead != 0 {
            for (i, &mc) in m.iter().enumerate() {
                let sub = (lead as u64 * mc as u64 % p as u64) as u32;
                rem[shift + i] = (rem[shift + i] + p - sub) % p;
            }
        }
        rem.pop();
    }
    rem
}

impl FieldSpec {
    pub fn p(&self) -> u32 {
        self.p
    }

    pub fn r(&self) -> u32 {
        self.r
    }

    pub fn order(&self) -> u32 {
        self.q
    }

    /// Reduction modulus, `r + 1` coefficients lowest degree first; empty for prime fields.
    pub fn modulus(&self) -> &[u32] {
        &self.modulus
    }

    pub fn element(&self, idx: u32) -> Result<FieldElement, FieldError> {
        if idx < self.q {
            Ok(FieldElement(idx))
        } else {
            Err(FieldError::ElementOutOfRange { idx, q: self.q })
        }
    }

    /// All elements in canonical order `f_0 = 0, f_1, …, f_{q-1}`.
    pub fn elements(&self) -> impl Iterator<Item = FieldElement> {
        (0..self.q).map(FieldElement)
    }

    /// Base-p coefficient vector `(c_0, …, c_{r-1})` of an element.
    pub fn coefficients(&self, a: FieldElement) -> Vec<u32> {
        let mut out = Vec::with_capacity(self.r as usize);
        let mut rest = a.0;
        for _ in 0..self.r {
            out.push(rest % self.p);
            rest /= self.p;
        }
        out
    }

    fn from_coefficients(&self, coeffs: &[u32]) -> u32 {
        coeffs.iter().rev().fold(0, |acc, &c| acc * self.p + c)
    }

    fn add_slow(&self, a: u32, b: u32) -> u32 {
        if self.r == 1 {
            return (a + b) % self.p;
        }
        let (ca, cb) = (
            self.coefficients(FieldElement(a)),
            self.coefficients(FieldElement(b)),
        );
        let sum: Vec<u32> = ca.iter().zip(&cb).map(|(x, y)| (x + y) % self.p).collect();
        self.from_coefficients(&sum)
    }

    fn mul_slow(&self, a: u32, b: u32) -> u32 {
        if self.r == 1 {
            return (u64::from(a) * u64::from(b) % u64::from(self.p)) as u32;
        }
        let (ca, cb) = (
            self.coefficients(FieldElement(a)),
            self.coefficients(FieldElement(b)),
        );
        let p = u64::from(self.p);
        let mut prod = vec![0u32; ca.len() + cb.len() - 1];
        for (i, &x) in ca.iter().enumerate() {
            for (j, &y) in cb.iter().enumerate() {
                prod[i + j] = ((u64::from(prod[i + j]) + u64::from(x) * u64::from(y)) % p) as u32;
            }
        }
        let mut rem = poly_rem(&prod, &self.modulus, self.p);
        rem.resize(self.r as usize, 0);
        self.from_coefficients(&rem)
    }

    pub fn add(&self, a: FieldElement, b: FieldElement) -> FieldElement {
        debug_assert!(a.0 < self.q && b.0 < self.q);
        FieldElement(match &self.add_table {
            Some(t) => t[a.0 as usize * self.q as usize + b.0 as usize],
            None => self.add_slow(a.0, b.0),
        })
    }

    pub fn mul(&self, a: FieldElement, b: FieldElement) -> FieldElement {
        debug_assert!(a.0 < self.q && b.0 < self.q);
        FieldElement(match &self.mul_table {
            Some(t) => t[a.0 as usize * self.q as usize + b.0 as usize],
            None => self.mul_slow(a.0, b.0),
        })
    }

    pub fn neg(&self, a: FieldElement) -> FieldElement {
        let neg: Vec<u32> = self
            .coefficients(a)
            .iter()
            .map(|&c| (self.p - c) % self.p)
            .collect();
        FieldElement(self.from_coefficients(&neg))
    }

    pub fn sub(&self, a: FieldElement, b: FieldElement) -> FieldElement {
        self.add(a, self.neg(b))
    }

    /// Multiplicative inverse by exhaustive search.
    pub fn inv(&self, a: FieldElement) -> Result<FieldElement, FieldError> {
        if a == FieldElement::ZERO {
            return Err(FieldError::DivisionByZero);
        }
        self.elements()
            .find(|&b| self.mul(a, b) == FieldElement::ONE)
            .ok_or(FieldError::DivisionByZero)
    }

    /// Horner evaluation of `Σ coeffs[j] x^j`. An empty coefficient list is
    /// the zero polynomial.
    pub fn eval_poly(&self, coeffs: &[FieldElement], x: FieldElement) -> FieldElement {
        coeffs
            .iter()
            .rev()
            .fold(FieldElement::ZERO, |acc, &c| self.add(self.mul(acc, x), c))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn e(i: u32) -> FieldElement {
        FieldElement::from_index(i)
    }

    /// Naive power-sum evaluation, independent of Horner.
    fn eval_naive(f: &FieldSpec, coeffs: &[FieldElement], x: FieldElement) -> FieldElement {
        let mut acc = FieldElement::ZERO;
        for (j, &c) in coeffs.iter().enumerate() {
            let mut pow = FieldElement::ONE;
            for _ in 0..j {
                pow = f.mul(pow, x);
            }
            acc = f.add(acc, f.mul(c, pow));
        }
        acc
    }

    #[test]
    fn make_field_cases() {
        let f3 = make_field(3).unwrap();
        assert_eq!((f3.p(), f3.r(), f3.order()), (3, 1, 3));
        assert!(f3.modulus().is_empty());

        let f4 = make_field(4).unwrap();
        assert_eq!((f4.p(), f4.r()), (2, 2));
        assert_eq!(f4.modulus(), &[1, 1, 1]);

        assert_eq!(make_field(6), Err(FieldError::NotPrimePower { q: 6 }));
        assert_eq!(make_field(1), Err(FieldError::InvalidOrder(1)));
    }

    #[test]
    fn irreducible_choices() {
        // Brute-force root/factor scans: the expected polynomials below are the
        // first candidates with no monic factor of degree <= r/2.
        assert_eq!(find_irreducible(2, 2), [1, 1, 1]);
        assert_eq!(find_irreducible(2, 3), [1, 1, 0, 1]);
        assert_eq!(find_irreducible(3, 2), [1, 0, 1]);
        for &(p, r) in &[(2u32, 2u32), (2, 3), (2, 4), (2, 5), (2, 6), (3, 2), (3, 3), (5, 2), (7, 2)] {
            let m = find_irreducible(p, r);
            assert_eq!(m.len(), r as usize + 1);
            assert_eq!(m[r as usize], 1);
            // no roots in GF(p)
            for x in 0..p {
                let v = m.iter().rev().fold(0u64, |acc, &c| (acc * x as u64 + c as u64) % p as u64);
                assert_ne!(v, 0, "root {x} of {m:?} over GF({p})");
            }
        }
    }

    #[test]
    fn small_products() {
        let f3 = make_field(3).unwrap();
        assert_eq!(f3.mul(e(2), e(2)), e(1));
        let f4 = make_field(4).unwrap();
        // x * (x + 1) = x^2 + x = 1 mod x^2 + x + 1
        assert_eq!(f4.mul(e(2), e(3)), e(1));
        let f5 = make_field(5).unwrap();
        assert_eq!(f5.inv(e(2)), Ok(e(3)));
        assert_eq!(f5.inv(e(0)), Err(FieldError::DivisionByZero));
        assert_eq!(f5.element(5), Err(FieldError::ElementOutOfRange { idx: 5, q: 5 }));
    }

    #[test]
    fn gf4_table_is_a_field() {
        let f = make_field(4).unwrap();
        // Full multiplication table against hand-reduced products.
        let expected = [[0, 0, 0, 0], [0, 1, 2, 3], [0, 2, 3, 1], [0, 3, 1, 2]];
        for a in 0..4 {
            for b in 0..4 {
                assert_eq!(f.mul(e(a), e(b)).idx(), expected[a as usize][b as usize]);
                assert_eq!(f.add(e(a), e(b)).idx(), a ^ b);
            }
        }
    }

    #[test]
    fn field_axioms_exhaustive_up_to_64() {
        for q in 2..=64u64 {
            let Ok(f) = make_field(q) else { continue };
            let q = q as u32;
            for a in 0..q {
                let a = e(a);
                assert_eq!(f.add(a, FieldElement::ZERO), a);
                assert_eq!(f.mul(a, FieldElement::ONE), a);
                assert_eq!(f.add(a, f.neg(a)), FieldElement::ZERO);
                if a != FieldElement::ZERO {
                    assert_eq!(f.mul(a, f.inv(a).unwrap()), FieldElement::ONE);
                }
                for b in 0..q {
                    let b = e(b);
                    assert_eq!(f.add(a, b), f.add(b, a));
                    assert_eq!(f.mul(a, b), f.mul(b, a));
                    for c in 0..q {
                        let c = e(c);
                        assert_eq!(f.add(f.add(a, b), c), f.add(a, f.add(b, c)));
                        assert_eq!(f.mul(f.mul(a, b), c), f.mul(a, f.mul(b, c)));
                        assert_eq!(f.mul(a, f.add(b, c)), f.add(f.mul(a, b), f.mul(a, c)));
                    }
                }
            }
        }
    }

    #[test]
    fn uncached_arithmetic_matches_tables() {
        // GF(3^6) = 729 has no tables; spot-check inverse and distributivity.
        let f = make_field(729).unwrap();
        assert!(f.mul_table.is_none());
        for a in [1u32, 2, 5, 100, 728] {
            let inv = f.inv(e(a)).unwrap();
            assert_eq!(f.mul(e(a), inv), FieldElement::ONE);
            assert_eq!(f.mul(e(a), f.add(e(7), e(300))), f.add(f.mul(e(a), e(7)), f.mul(e(a), e(300))));
        }
    }

    #[test]
    fn eval_examples() {
        let f3 = make_field(3).unwrap();
        assert_eq!(f3.eval_poly(&[e(1), e(2)], e(2)), e(2));
        let f5 = make_field(5).unwrap();
        assert_eq!(f5.eval_poly(&[e(0), e(3), e(4)], e(1)), e(2));
        for x in 0..5 {
            assert_eq!(f5.eval_poly(&[e(4)], e(x)), e(4));
        }
    }

    proptest::proptest! {
        #[test]
        fn horner_matches_power_sum(qi in 0usize..8, coeffs in proptest::collection::vec(0u32..1024, 1..6), x in 0u32..1024) {
            let q = [2u64, 3, 4, 5, 8, 9, 16, 27][qi];
            let f = make_field(q).unwrap();
            let q = q as u32;
            let coeffs: Vec<FieldElement> = coeffs.iter().map(|&c| e(c % q)).collect();
            let x = e(x % q);
            proptest::prop_assert_eq!(f.eval_poly(&coeffs, x), eval_naive(&f, &coeffs, x));
        }
    }
}
