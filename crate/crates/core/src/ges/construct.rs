use alloc::format;
use alloc::vec::Vec;

use super::{check_index, column_count, Component, GesArray, GesError, Provenance};
use crate::arith;
use crate::field::{make_field, FieldElement, FieldError, FieldSpec};

pub(crate) fn field_for(q: u64) -> Result<FieldSpec, GesError> {
    make_field(q).map_err(|e| match e {
        FieldError::NotPrimePower { q } => GesError::NotPrimePower { q },
        other => GesError::Field(other),
    })
}

pub(crate) fn component_of(field: &FieldSpec, k: usize) -> Component {
    Component {
        q: field.order(),
        p: field.p(),
        r: field.r(),
        modulus: field.modulus().to_vec(),
        eval_points: (1..=k as u32).collect(),
    }
}

/// Values `P_c(f_1), …, P_c(f_k)` of the zero-constant polynomial of column `c`.
pub(crate) fn column_profile(field: &FieldSpec, k: usize, t: u32, col: usize, out: &mut [u32]) {
    let q = field.order() as usize;
    let mut coeffs = Vec::with_capacity(t as usize + 1);
    coeffs.push(FieldElement::ZERO);
    let mut rest = col;
    for _ in 0..t {
        coeffs.push(FieldElement::from_index((rest % q) as u32));
        rest /= q;
    }
    for (l, slot) in out.iter_mut().enumerate().take(k) {
        *slot = field
            .eval_poly(&coeffs, FieldElement::from_index(l as u32 + 1))
            .idx();
    }
}

/// GES(q, k, t) for a prime power `q` by polynomial evaluation, `t < k ≤ q - 1`.
///
/// Column `c` ↔ polynomial with coefficients `(c_1, …, c_t)` (base-`q` digits
/// of `c`, `c_1` fastest); row `j` ↔ constant term `f_j`.
pub fn construct_prime_power_ges(q: u64, k: usize, t: u32) -> Result<GesArray, GesError> {
    let field = field_for(q)?;
    if t == 0 || k as u64 <= u64::from(t) || k as u64 > q - 1 {
        return Err(GesError::ParameterViolation(format!(
            "prime-power GES requires t < k <= q - 1, got q={q}, k={k}, t={t}"
        )));
    }
    let n = field.order();
    let cols = column_count(n, t).ok_or_else(|| {
        GesError::ParameterViolation(format!("{n}^{t} columns do not fit in memory"))
    })?;
    let rows = n as usize;
    let mut values = alloc::vec![0u32; rows * cols * k];
    let mut profile = alloc::vec![0u32; k];
    for col in 0..cols {
        column_profile(&field, k, t, col, &mut profile);
        for row in 0..rows {
            let constant = FieldElement::from_index(row as u32);
            let start = (row * cols + col) * k;
            for (slot, &v) in values[start..start + k].iter_mut().zip(&profile) {
                *slot = field.add(FieldElement::from_index(v), constant).idx();
            }
        }
    }
    let provenance = Provenance {
        components: alloc::vec![component_of(&field, k)],
        transposed: false,
        truncated_from: None,
    };
    GesArray::from_parts(n, k, t, values, provenance)
}

/// Euler square ES(q, k) for a prime power `q`, `2 ≤ k ≤ q - 1`.
///
/// Row `i` holds the slope `f_i` and column `j` the constant `f_j`, so cell
/// `(i, j)` is `(f_i x + f_j)(S_k)`. This is the transpose of
/// `construct_prime_power_ges(q, k, 1)`; both layouts satisfy GES 1–4.
pub fn construct_es(q: u64, k: usize) -> Result<GesArray, GesError> {
    if k < 2 {
        return Err(GesError::ParameterViolation(format!(
            "Euler square as GES(n, k, 1) needs k >= 2, got k={k}"
        )));
    }
    construct_prime_power_ges(q, k, 1)?.transpose()
}

/// Mixed-radix combination of GES(p', k, t) and GES(p'', k, t) into
/// GES(p'p'', k, t).
///
/// Row `m = i + p'·j`, each column digit `γ_s = α_s + p'·β_s`, and each value
/// `c = c' + p'·c''` (0-based).
pub fn compose(a: &GesArray, b: &GesArray) -> Result<GesArray, GesError> {
    if a.k() != b.k() || a.t() != b.t() {
        return Err(GesError::ParameterViolation(format!(
            "compose needs equal (k, t), got ({}, {}) and ({}, {})",
            a.k(),
            a.t(),
            b.k(),
            b.t()
        )));
    }
    let (k, t) = (a.k(), a.t());
    if a.provenance().transposed || b.provenance().transposed {
        return Err(GesError::ParameterViolation(
            "compose expects the polynomial-column layout, not the transposed Euler-square layout"
                .into(),
        ));
    }
    let min = a.n().min(b.n());
    if (t as usize) >= k || k >= min as usize {
        return Err(GesError::ParameterViolation(format!(
            "compose requires t < k < min(p', p''), got k={k}, t={t}, p'={}, p''={}",
            a.n(),
            b.n()
        )));
    }
    let (pa, pb) = (a.n() as usize, b.n() as usize);
    let n = a
        .n()
        .checked_mul(b.n())
        .ok_or_else(|| GesError::ParameterViolation("p'p'' overflows".into()))?;
    let cols = column_count(n, t)
        .ok_or_else(|| GesError::ParameterViolation(format!("{n}^{t} columns overflow")))?;
    let rows = n as usize;
    let mut values = alloc::vec![0u32; rows * cols * k];
    let nn = n as usize;
    // Split every composite column into its (a, b) column pair once.
    let split: Vec<(usize, usize)> = (0..cols)
        .map(|col| {
            let (mut rest, mut ca, mut cb, mut wa, mut wb) = (col, 0, 0, 1, 1);
            for _ in 0..t {
                let digit = rest % nn;
                rest /= nn;
                ca += (digit % pa) * wa;
                cb += (digit / pa) * wb;
                wa *= pa;
                wb *= pb;
            }
            (ca, cb)
        })
        .collect();
    for row in 0..rows {
        let (i, j) = (row % pa, row / pa);
        for (col, &(ca, cb)) in split.iter().enumerate() {
            let (ta, tb) = (a.tuple(i, ca), b.tuple(j, cb));
            let start = (row * cols + col) * k;
            for (r, slot) in values[start..start + k].iter_mut().enumerate() {
                *slot = ta[r] + a.n() * tb[r];
            }
        }
    }
    let mut components = a.provenance().components.clone();
    components.extend(b.provenance().components.iter().cloned());
    let provenance = Provenance {
        components,
        transposed: false,
        truncated_from: None,
    };
    GesArray::from_parts(n, k, t, values, provenance)
}

/// GES(n, k, t) for any `n`: one polynomial GES per maximal prime-power
/// component, folded through [`compose`] in ascending component order.
pub fn construct_ges(n: u64, k: usize, t: u32) -> Result<GesArray, GesError> {
    if n < 2 {
        return Err(GesError::ParameterViolation(format!("n must be >= 2, got {n}")));
    }
    if t == 0 || k as u64 <= u64::from(t) {
        return Err(GesError::ParameterViolation(format!(
            "GES index requires k > t >= 1, got k={k}, t={t}"
        )));
    }
    let components = arith::prime_power_components(n);
    if let Some(&small) = components.iter().find(|&&q| k as u64 >= q) {
        return Err(GesError::ParameterViolation(format!(
            "prime-power component {small} of n={n} requires t < k < {small}, got k={k}, t={t}"
        )));
    }
    let mut parts = components.iter();
    let first = *parts.next().expect("n >= 2 has a component");
    let mut acc = construct_prime_power_ges(first, k, t)?;
    for &q in parts {
        let next = construct_prime_power_ges(q, k, t)?;
        acc = compose(&acc, &next)?;
    }
    Ok(acc)
}

/// Keeps the first `k'` coordinates of every tuple, `t < k' < k`.
pub fn truncate(g: &GesArray, k_new: usize) -> Result<GesArray, GesError> {
    if (g.t() as usize) >= k_new || k_new >= g.k() {
        return Err(GesError::ParameterViolation(format!(
            "truncate requires t < k' < k, got t={}, k'={k_new}, k={}",
            g.t(),
            g.k()
        )));
    }
    let values: Vec<u32> = g
        .tuples()
        .flat_map(|tup| tup[..k_new].iter().copied())
        .collect();
    let mut provenance = g.provenance().clone();
    provenance.truncated_from.get_or_insert(g.k());
    for c in &mut provenance.components {
        c.eval_points.truncate(k_new);
    }
    check_index(g.n(), k_new, g.t())?;
    GesArray::from_parts(g.n(), k_new, g.t(), values, provenance)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ges::verify_ges;
    use alloc::vec;

    fn rows_of(g: &GesArray) -> Vec<Vec<Vec<u32>>> {
        (0..g.rows())
            .map(|r| (0..g.cols()).map(|c| g.tuple(r, c).to_vec()).collect())
            .collect()
    }

    #[test]
    fn prime_power_es_3_2() {
        let g = construct_prime_power_ges(3, 2, 1).unwrap();
        assert_eq!(
            rows_of(&g),
            vec![
                vec![vec![0, 0], vec![1, 2], vec![2, 1]],
                vec![vec![1, 1], vec![2, 0], vec![0, 2]],
                vec![vec![2, 2], vec![0, 1], vec![1, 0]],
            ]
        );
    }

    #[test]
    fn euler_layout_is_transpose() {
        let es = construct_es(3, 2).unwrap();
        // Column 0 of the Euler-square layout: the constant-0 polynomials 0, x, 2x.
        let col0: Vec<Vec<u32>> = es.column(0).map(|t| t.to_vec()).collect();
        assert_eq!(col0, vec![vec![0, 0], vec![1, 2], vec![2, 1]]);
        for q in [3u64, 4, 5, 7, 8] {
            for k in 2..q as usize {
                let es = construct_es(q, k).unwrap();
                let g = construct_prime_power_ges(q, k, 1).unwrap();
                for i in 0..g.rows() {
                    for j in 0..g.cols() {
                        assert_eq!(es.tuple(i, j), g.tuple(j, i));
                    }
                }
                assert!(verify_ges(&es).passed());
            }
        }
        assert!(construct_es(5, 1).is_err());
    }

    #[test]
    fn ges_5_4_2_columns() {
        let g = construct_prime_power_ges(5, 4, 2).unwrap();
        assert_eq!((g.rows(), g.cols()), (5, 25));
        let col = |c: usize| -> Vec<Vec<u32>> { g.column(c).map(|t| t.to_vec()).collect() };
        assert_eq!(
            col(0),
            vec![vec![0, 0, 0, 0], vec![1, 1, 1, 1], vec![2, 2, 2, 2], vec![3, 3, 3, 3], vec![4, 4, 4, 4]]
        );
        assert_eq!(
            col(1),
            vec![vec![1, 2, 3, 4], vec![2, 3, 4, 0], vec![3, 4, 0, 1], vec![4, 0, 1, 2], vec![0, 1, 2, 3]]
        );
        // 4x^2 + 3x is column 3 + 5*4 = 23, 4x^2 + 4x is column 24.
        assert_eq!(col(23)[0], vec![2, 2, 0, 1]);
        assert_eq!(col(24)[0], vec![3, 4, 3, 0]);
    }

    #[test]
    fn prime_power_parameter_checks() {
        assert!(matches!(construct_prime_power_ges(6, 2, 1), Err(GesError::NotPrimePower { q: 6 })));
        assert!(matches!(construct_prime_power_ges(5, 5, 1), Err(GesError::ParameterViolation(_))));
        assert!(matches!(construct_prime_power_ges(5, 2, 2), Err(GesError::ParameterViolation(_))));
        assert!(matches!(construct_prime_power_ges(5, 3, 0), Err(GesError::ParameterViolation(_))));
    }

    #[test]
    fn gf4_es_passes() {
        let g = construct_prime_power_ges(4, 2, 1).unwrap();
        let report = verify_ges(&g);
        assert!(report.passed());
        assert_eq!(report.max_overall, 1);
    }

    #[test]
    fn compose_small() {
        let a = construct_prime_power_ges(3, 2, 1).unwrap();
        let b = construct_prime_power_ges(5, 2, 1).unwrap();
        let c = compose(&a, &b).unwrap();
        assert_eq!((c.n(), c.rows(), c.cols()), (15, 15, 15));
        // Row m = i + 3j, value c' + 3c''.
        let (i, j, ca, cb) = (2, 4, 1, 3);
        let row = i + 3 * j;
        let col = ca + 3 * cb;
        let expect: Vec<u32> = a
            .tuple(i, ca)
            .iter()
            .zip(b.tuple(j, cb))
            .map(|(x, y)| x + 3 * y)
            .collect();
        assert_eq!(c.tuple(row, col), expect.as_slice());
        assert!(c.values().iter().all(|&v| v < 15));
        let report = verify_ges(&c);
        assert!(report.passed(), "{report:?}");
        assert_eq!(report.max_overall, 1);
        assert_eq!(c.provenance().components.len(), 2);
    }

    #[test]
    fn compose_rejects_mismatch() {
        let a = construct_prime_power_ges(3, 2, 1).unwrap();
        let b = construct_prime_power_ges(5, 3, 1).unwrap();
        assert!(compose(&a, &b).is_err());
        let es = construct_es(5, 2).unwrap();
        assert!(compose(&a, &es).is_err());
    }

    #[test]
    fn construct_ges_composite() {
        let g = construct_ges(15, 2, 1).unwrap();
        assert_eq!((g.rows(), g.cols()), (15, 15));
        assert!(verify_ges(&g).passed());
        let g = construct_ges(20, 3, 2).unwrap();
        assert_eq!((g.rows(), g.cols()), (20, 400));
        let comps: Vec<u32> = g.provenance().components.iter().map(|c| c.q).collect();
        assert_eq!(comps, [4, 5]);
        match construct_ges(6, 2, 1) {
            Err(GesError::ParameterViolation(msg)) => assert!(msg.contains("component 2"), "{msg}"),
            other => panic!("{other:?}"),
        }
        // A single component delegates to the polynomial construction.
        assert_eq!(construct_ges(7, 3, 1).unwrap(), construct_prime_power_ges(7, 3, 1).unwrap());
    }

    #[test]
    fn truncation() {
        let g = construct_prime_power_ges(5, 4, 2).unwrap();
        let tr = truncate(&g, 3).unwrap();
        let col0: Vec<Vec<u32>> = tr.column(0).map(|t| t.to_vec()).collect();
        assert_eq!(col0[0], vec![0, 0, 0]);
        assert_eq!(col0[1], vec![1, 1, 1]);
        assert_eq!(tr.provenance().truncated_from, Some(4));
        assert!(verify_ges(&tr).passed());
        let g7 = construct_prime_power_ges(7, 5, 1).unwrap();
        assert!(verify_ges(&truncate(&g7, 3).unwrap()).passed());
        assert!(matches!(truncate(&g, 2), Err(GesError::ParameterViolation(_))));
        assert!(matches!(truncate(&g, 4), Err(GesError::ParameterViolation(_))));
    }

    #[test]
    fn deterministic() {
        assert_eq!(construct_ges(20, 3, 2).unwrap(), construct_ges(20, 3, 2).unwrap());
    }
}
