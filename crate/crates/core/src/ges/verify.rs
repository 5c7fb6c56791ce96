//! Axiom checks for GES arrays.
//!
//! * GES 1: every value lies in `{0, …, n-1}`.
//! * GES 2: distinct tuples of one column never agree.
//! * GES 3: distinct tuples of one row agree in at most `t - 1` places.
//! * GES 4: any two distinct tuples agree in at most `t` places.
//!
//! [`verify_ges`] compares every pair of tuples. [`verify_ges_projection`]
//! reaches the same verdict by projecting tuples onto coordinate subsets:
//! two tuples agree in `≥ m` places iff they collide on some `m`-subset.
//! [`verify_ges_sampled`] checks random pairs of a lazily evaluated array.

use alloc::vec;
use alloc::vec::Vec;

use super::lazy::TupleSource;
use super::{count_agreements, GesArray};
use crate::rng::SplitMix64;

/// Position of a tuple in the array.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct CellRef {
    pub row: u64,
    pub col: u64,
}

#[derive(Debug, Clone, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(tag = "kind", rename_all = "snake_case"))]
pub enum Witness {
    OutOfRange {
        cell: CellRef,
        coordinate: usize,
        value: u32,
    },
    Pair {
        a: CellRef,
        b: CellRef,
        intersections: usize,
    },
}

#[derive(Debug, Clone, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct AxiomCheck {
    pub passed: bool,
    pub witness: Option<Witness>,
}

impl AxiomCheck {
    fn pass() -> Self {
        AxiomCheck {
            passed: true,
            witness: None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(tag = "mode", rename_all = "snake_case"))]
pub enum VerifyMode {
    /// All pairs compared directly.
    Exhaustive,
    /// Coordinate-subset projections; exact, certifies all pairs.
    Projection,
    /// Random pairs only; not a proof.
    Sampled { pairs: u64, seed: u64 },
}

#[derive(Debug, Clone, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct AxiomReport {
    pub n: u32,
    pub k: usize,
    pub t: u32,
    pub ges1: AxiomCheck,
    pub ges2: AxiomCheck,
    pub ges3: AxiomCheck,
    pub ges4: AxiomCheck,
    pub max_same_row: usize,
    pub max_same_column: usize,
    pub max_overall: usize,
    pub pairs_checked: u128,
    /// True when every pair is covered (exhaustive or projection mode).
    pub complete: bool,
    pub mode: VerifyMode,
}

impl AxiomReport {
    pub fn passed(&self) -> bool {
        self.ges1.passed && self.ges2.passed && self.ges3.passed && self.ges4.passed
    }

    /// Names of the failing axioms, e.g. `["GES 2", "GES 4"]`.
    pub fn failed_axioms(&self) -> Vec<&'static str> {
        [
            ("GES 1", &self.ges1),
            ("GES 2", &self.ges2),
            ("GES 3", &self.ges3),
            ("GES 4", &self.ges4),
        ]
        .into_iter()
        .filter(|(_, c)| !c.passed)
        .map(|(name, _)| name)
        .collect()
    }
}

fn check_range(g: &GesArray) -> AxiomCheck {
    for (pos, tup) in g.tuples().enumerate() {
        if let Some((coordinate, &value)) = tup.iter().enumerate().find(|(_, &v)| v >= g.n()) {
            return AxiomCheck {
                passed: false,
                witness: Some(Witness::OutOfRange {
                    cell: cell_of(g, pos),
                    coordinate,
                    value,
                }),
            };
        }
    }
    AxiomCheck::pass()
}

fn cell_of(g: &GesArray, pos: usize) -> CellRef {
    CellRef {
        row: (pos / g.cols()) as u64,
        col: (pos % g.cols()) as u64,
    }
}

fn pair_check(bound: usize, max: usize, witness: Option<Witness>) -> AxiomCheck {
    if max <= bound {
        AxiomCheck::pass()
    } else {
        AxiomCheck {
            passed: false,
            witness,
        }
    }
}

/// Exhaustive pairwise check, `O(n^(2(t+1)) · k)`.
pub fn verify_ges(g: &GesArray) -> AxiomReport {
    let total = g.len();
    let cols = g.cols();
    let t = g.t() as usize;
    let (mut max_row, mut max_col, mut max_all) = (0usize, 0usize, 0usize);
    // First violating pair per axiom, in lexicographic pair order.
    let (mut w2, mut w3, mut w4) = (None, None, None);
    for a in 0..total {
        let ta = g.tuple_at(a);
        let (ra, ca) = (a / cols, a % cols);
        for b in a + 1..total {
            let c = count_agreements(ta, g.tuple_at(b));
            let (rb, cb) = (b / cols, b % cols);
            let pair = || Witness::Pair {
                a: cell_of(g, a),
                b: cell_of(g, b),
                intersections: c,
            };
            if ca == cb {
                max_col = max_col.max(c);
                if c > 0 && w2.is_none() {
                    w2 = Some(pair());
                }
            }
            if ra == rb {
                max_row = max_row.max(c);
                if c + 1 > t && w3.is_none() {
                    w3 = Some(pair());
                }
            }
            max_all = max_all.max(c);
            if c > t && w4.is_none() {
                w4 = Some(pair());
            }
        }
    }
    AxiomReport {
        n: g.n(),
        k: g.k(),
        t: g.t(),
        ges1: check_range(g),
        ges2: pair_check(0, max_col, w2),
        ges3: pair_check(t.saturating_sub(1), max_row, w3),
        ges4: pair_check(t, max_all, w4),
        max_same_row: max_row,
        max_same_column: max_col,
        max_overall: max_all,
        pairs_checked: (total as u128) * (total as u128 - 1) / 2,
        complete: true,
        mode: VerifyMode::Exhaustive,
    }
}

/// Dispatches on `mode`; `Sampled` draws from the materialized array.
pub fn verify_ges_with(g: &GesArray, mode: VerifyMode) -> AxiomReport {
    match mode {
        VerifyMode::Exhaustive => verify_ges(g),
        VerifyMode::Projection => verify_ges_projection(g),
        VerifyMode::Sampled { pairs, seed } => verify_ges_sampled(g, pairs, seed),
    }
}

#[derive(Clone, Copy)]
enum Group {
    Row(usize),
    Column(usize),
    All,
}

/// Collision finder over coordinate-subset projections.
struct Projector<'a> {
    g: &'a GesArray,
    radix: u64,
    /// Dense table tagged with a generation counter: `(gen << 32) | (pos + 1)`.
    slots: Vec<u64>,
    generation: u64,
    keyed: Vec<(u64, u32)>,
}

/// Dense collision table size cap (entries).
const DENSE_LIMIT: u64 = 1 << 22;

impl<'a> Projector<'a> {
    fn new(g: &'a GesArray) -> Self {
        let max_val = g.values().iter().copied().max().unwrap_or(0);
        Projector {
            g,
            radix: u64::from(g.n().max(max_val + 1)),
            slots: Vec::new(),
            generation: 0,
            keyed: Vec::new(),
        }
    }

    fn positions(&self, group: Group) -> (usize, usize, usize) {
        // (start, step, count)
        let (rows, cols) = (self.g.rows(), self.g.cols());
        match group {
            Group::Row(r) => (r * cols, 1, cols),
            Group::Column(c) => (c, cols, rows),
            Group::All => (0, 1, rows * cols),
        }
    }

    /// Some colliding pair of `group` on the coordinates `subset`.
    fn collision(&mut self, group: Group, subset: &[usize]) -> Option<(usize, usize)> {
        let (start, step, count) = self.positions(group);
        if count < 2 {
            return None;
        }
        if subset.is_empty() {
            return Some((start, start + step));
        }
        let key_space = self.radix.checked_pow(subset.len() as u32);
        let key = |tup: &[u32]| -> u64 {
            subset
                .iter()
                .fold(0u64, |acc, &l| acc.wrapping_mul(self.radix) + u64::from(tup[l]))
        };
        match key_space {
            Some(space) if space <= DENSE_LIMIT.max(2 * count as u64) && space <= 1 << 26 => {
                if (self.slots.len() as u64) < space {
                    self.slots.resize(space as usize, 0);
                }
                self.generation += 1;
                let tag = self.generation << 32;
                for i in 0..count {
                    let pos = start + i * step;
                    let slot = &mut self.slots[key(self.g.tuple_at(pos)) as usize];
                    if *slot >> 32 == self.generation {
                        return Some((((*slot & 0xFFFF_FFFF) - 1) as usize, pos));
                    }
                    *slot = tag | (pos as u64 + 1);
                }
                None
            }
            Some(_) => {
                self.keyed.clear();
                for i in 0..count {
                    let pos = start + i * step;
                    self.keyed.push((key(self.g.tuple_at(pos)), pos as u32));
                }
                self.keyed.sort_unstable();
                self.keyed
                    .windows(2)
                    .find(|w| w[0].0 == w[1].0)
                    .map(|w| (w[0].1 as usize, w[1].1 as usize))
            }
            None => {
                let mut order: Vec<usize> = (0..count).map(|i| start + i * step).collect();
                let g = self.g;
                let proj = |p: usize| subset.iter().map(move |&l| g.tuple_at(p)[l]);
                order.sort_unstable_by(|&a, &b| proj(a).cmp(proj(b)));
                order
                    .windows(2)
                    .find(|w| proj(w[0]).eq(proj(w[1])))
                    .map(|w| (w[0], w[1]))
            }
        }
    }

    /// Some pair within one of `groups` agreeing on at least `m` coordinates.
    fn agreeing_pair(&mut self, groups: &[Group], m: usize) -> Option<(usize, usize)> {
        let k = self.g.k();
        if m > k {
            return None;
        }
        let mut subset: Vec<usize> = (0..m).collect();
        loop {
            for &group in groups {
                if let Some(pair) = self.collision(group, &subset) {
                    return Some(pair);
                }
            }
            if !next_combination(&mut subset, k) {
                return None;
            }
        }
    }

    /// Largest agreement within the groups plus a pair attaining it.
    fn max_agreement(&mut self, groups: &[Group], bound: usize) -> (usize, Option<(usize, usize)>) {
        let k = self.g.k();
        if let Some(mut pair) = self.agreeing_pair(groups, bound + 1) {
            let mut m = bound + 1;
            while m < k {
                match self.agreeing_pair(groups, m + 1) {
                    Some(p) => {
                        pair = p;
                        m += 1;
                    }
                    None => break,
                }
            }
            return (m, Some(pair));
        }
        for m in (0..=bound.min(k)).rev() {
            if let Some(pair) = self.agreeing_pair(groups, m) {
                return (m, Some(pair));
            }
        }
        (0, None)
    }
}

/// Advances `subset` (strictly increasing, values `< k`) to the next
/// combination in lexicographic order.
fn next_combination(subset: &mut [usize], k: usize) -> bool {
    let m = subset.len();
    for i in (0..m).rev() {
        if subset[i] < k - m + i {
            subset[i] += 1;
            for j in i + 1..m {
                subset[j] = subset[j - 1] + 1;
            }
            return true;
        }
    }
    false
}

/// Some pair of tuples (flat positions) agreeing in at least `m` places.
pub(crate) fn agreeing_pair(g: &GesArray, m: usize) -> Option<(usize, usize)> {
    Projector::new(g).agreeing_pair(&[Group::All], m)
}

/// Exact check via projections, `O(C(k, t+1) · n^(t+1))` for valid arrays.
pub fn verify_ges_projection(g: &GesArray) -> AxiomReport {
    let t = g.t() as usize;
    let mut proj = Projector::new(g);
    let columns: Vec<Group> = (0..g.cols()).map(Group::Column).collect();
    let rows: Vec<Group> = (0..g.rows()).map(Group::Row).collect();
    let (max_col, p2) = proj.max_agreement(&columns, 0);
    let (max_row, p3) = proj.max_agreement(&rows, t - 1);
    let (max_all, p4) = proj.max_agreement(&[Group::All], t);
    let witness = |pair: Option<(usize, usize)>, c: usize| {
        pair.map(|(a, b)| Witness::Pair {
            a: cell_of(g, a.min(b)),
            b: cell_of(g, a.max(b)),
            intersections: count_agreements(g.tuple_at(a), g.tuple_at(b)).max(c),
        })
    };
    let total = g.len() as u128;
    AxiomReport {
        n: g.n(),
        k: g.k(),
        t: g.t(),
        ges1: check_range(g),
        ges2: pair_check(0, max_col, witness(p2, max_col)),
        ges3: pair_check(t - 1, max_row, witness(p3, max_row)),
        ges4: pair_check(t, max_all, witness(p4, max_all)),
        max_same_row: max_row,
        max_same_column: max_col,
        max_overall: max_all,
        pairs_checked: total * (total - 1) / 2,
        complete: true,
        mode: VerifyMode::Projection,
    }
}

/// Random-pair check over any [`TupleSource`]. Pairs are drawn in equal
/// thirds from a shared column, a shared row, and anywhere in the array.
pub fn verify_ges_sampled<S: TupleSource + ?Sized>(src: &S, pairs: u64, seed: u64) -> AxiomReport {
    let (n, k, t) = (src.n(), src.k(), src.t() as usize);
    let (rows, cols) = (src.rows(), src.cols());
    let mut rng = SplitMix64::new(seed);
    let (mut ta, mut tb) = (vec![0u32; k], vec![0u32; k]);
    let (mut max_row, mut max_col, mut max_all) = (0, 0, 0);
    let (mut w1, mut w2, mut w3, mut w4) = (None, None, None, None);
    let distinct = |rng: &mut SplitMix64, range: u64| -> (u64, u64) {
        let a = rng.below(range);
        let mut b = rng.below(range - 1);
        if b >= a {
            b += 1;
        }
        (a, b)
    };
    for i in 0..pairs {
        let (a, b) = match i % 3 {
            0 => {
                let col = rng.below(cols);
                let (ra, rb) = distinct(&mut rng, rows);
                (CellRef { row: ra, col }, CellRef { row: rb, col })
            }
            1 if cols > 1 => {
                let row = rng.below(rows);
                let (ca, cb) = distinct(&mut rng, cols);
                (CellRef { row, col: ca }, CellRef { row, col: cb })
            }
            _ => loop {
                let a = CellRef {
                    row: rng.below(rows),
                    col: rng.below(cols),
                };
                let b = CellRef {
                    row: rng.below(rows),
                    col: rng.below(cols),
                };
                if a != b {
                    break (a, b);
                }
            },
        };
        src.write_tuple(a.row, a.col, &mut ta);
        src.write_tuple(b.row, b.col, &mut tb);
        if w1.is_none() {
            for (cell, tup) in [(a, &ta), (b, &tb)] {
                if let Some((coordinate, &value)) = tup.iter().enumerate().find(|(_, &v)| v >= n) {
                    w1 = Some(Witness::OutOfRange {
                        cell,
                        coordinate,
                        value,
                    });
                    break;
                }
            }
        }
        let c = count_agreements(&ta, &tb);
        let (a, b) = (a.min(b), a.max(b));
        let pair = Witness::Pair {
            a,
            b,
            intersections: c,
        };
        if a.col == b.col {
            max_col = max_col.max(c);
            if c > 0 && w2.is_none() {
                w2 = Some(pair.clone());
            }
        }
        if a.row == b.row {
            max_row = max_row.max(c);
            if c + 1 > t && w3.is_none() {
                w3 = Some(pair.clone());
            }
        }
        max_all = max_all.max(c);
        if c > t && w4.is_none() {
            w4 = Some(pair);
        }
    }
    AxiomReport {
        n,
        k,
        t: t as u32,
        ges1: AxiomCheck {
            passed: w1.is_none(),
            witness: w1,
        },
        ges2: pair_check(0, max_col, w2),
        ges3: pair_check(t.saturating_sub(1), max_row, w3),
        ges4: pair_check(t, max_all, w4),
        max_same_row: max_row,
        max_same_column: max_col,
        max_overall: max_all,
        pairs_checked: u128::from(pairs),
        complete: false,
        mode: VerifyMode::Sampled { pairs, seed },
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ges::{construct_es, construct_ges, construct_prime_power_ges, LazyGes, Provenance};

    #[test]
    fn combinations_enumerate_all() {
        let mut s = vec![0, 1];
        let mut count = 1;
        while next_combination(&mut s, 5) {
            count += 1;
        }
        assert_eq!(count, 10);
        assert_eq!(s, [3, 4]);
        let mut empty: Vec<usize> = vec![];
        assert!(!next_combination(&mut empty, 3));
    }

    #[test]
    fn es_3_2_report() {
        let g = construct_prime_power_ges(3, 2, 1).unwrap();
        let r = verify_ges(&g);
        assert!(r.passed());
        assert_eq!(r.max_overall, 1);
        assert_eq!((r.max_same_row, r.max_same_column), (0, 0));
        assert_eq!(r.pairs_checked, 36);
    }

    #[test]
    fn ges_5_4_2_report() {
        let g = construct_prime_power_ges(5, 4, 2).unwrap();
        let r = verify_ges(&g);
        assert!(r.passed(), "{r:?}");
        assert_eq!(r.max_same_row, 1);
        assert_eq!(r.max_overall, 2);
        assert_eq!(r.max_same_column, 0);
    }

    #[test]
    fn planted_duplicate_fails_ges2() {
        let g = construct_prime_power_ges(5, 3, 1).unwrap();
        let mut values = g.values().to_vec();
        // Copy cell (0, 2) onto cell (3, 2).
        let k = 3;
        let cols = g.cols();
        let src = 2 * k;
        let dst = (3 * cols + 2) * k;
        for i in 0..k {
            values[dst + i] = values[src + i];
        }
        let bad = GesArray::from_parts(5, 3, 1, values, Provenance::default()).unwrap();
        for report in [verify_ges(&bad), verify_ges_projection(&bad)] {
            assert!(!report.ges2.passed);
            assert_eq!(report.max_same_column, 3);
            assert!(report.failed_axioms().contains(&"GES 2"));
            match report.ges2.witness {
                Some(Witness::Pair { a, b, intersections }) => {
                    assert_eq!((a.col, b.col), (2, 2));
                    assert_eq!(intersections, 3);
                }
                ref w => panic!("{w:?}"),
            }
        }
    }

    #[test]
    fn out_of_range_fails_ges1() {
        let g = construct_prime_power_ges(3, 2, 1).unwrap();
        let mut values = g.values().to_vec();
        values[5] = 7;
        let bad = GesArray::from_parts(3, 2, 1, values, Provenance::default()).unwrap();
        let r = verify_ges(&bad);
        assert!(!r.ges1.passed);
        assert_eq!(
            r.ges1.witness,
            Some(Witness::OutOfRange {
                cell: CellRef { row: 0, col: 2 },
                coordinate: 1,
                value: 7
            })
        );
        assert!(!verify_ges_projection(&bad).ges1.passed);
    }

    #[test]
    fn projection_agrees_with_pairwise() {
        let params = [
            (3u64, 2usize, 1u32),
            (4, 3, 1),
            (4, 3, 2),
            (5, 4, 2),
            (5, 4, 3),
            (7, 3, 1),
            (7, 6, 2),
            (8, 5, 2),
            (9, 4, 2),
            (12, 2, 1),
            (15, 2, 1),
        ];
        for (n, k, t) in params {
            let g = construct_ges(n, k, t).unwrap();
            let a = verify_ges(&g);
            let b = verify_ges_projection(&g);
            assert!(a.passed() && b.passed(), "({n},{k},{t})");
            assert_eq!(
                (a.max_same_row, a.max_same_column, a.max_overall),
                (b.max_same_row, b.max_same_column, b.max_overall),
                "({n},{k},{t})"
            );
        }
        let es = construct_es(5, 4).unwrap();
        assert_eq!(verify_ges(&es).max_overall, verify_ges_projection(&es).max_overall);
    }

    #[test]
    fn sampled_on_lazy_source() {
        let lazy = LazyGes::new(13, 12, 9).unwrap();
        let r = verify_ges_sampled(&lazy, 3000, 5);
        assert!(r.passed(), "{r:?}");
        assert!(!r.complete);
        // In a GES(7,3,1) every off-row, off-column pair meets at most once.
        let g = construct_ges(7, 3, 1).unwrap();
        let r = verify_ges_sampled(&g, 5000, 1);
        assert!(r.passed());
        assert!(r.max_overall <= 1);
    }
}
