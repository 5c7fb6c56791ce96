//! The `analyze` report and its text rendering.

use std::fmt::Write;

use ges_core::analysis::{
    block_coherence, max_column_bound, rip_bound, verify_block_orthogonality, AnalysisError,
    BlockCoherenceReport, BlockOrthReport, CoherenceReport, ColumnBound, OverlapResult, RipReport,
};
use ges_core::{BinarySensingMatrix, Rational};
use serde::Serialize;

#[derive(Debug, Clone, Serialize)]
pub struct MatrixSummary {
    pub n: u32,
    pub k: usize,
    pub t: u32,
    pub rows: usize,
    pub cols: usize,
    pub nnz: usize,
    pub block_width: usize,
    /// `k / (nk) = 1/n`.
    #[serde(with = "ges_core::serde_ratio")]
    pub density: Rational,
}

impl MatrixSummary {
    pub fn of(m: &BinarySensingMatrix) -> Self {
        MatrixSummary {
            n: m.n(),
            k: m.k(),
            t: m.t(),
            rows: m.rows(),
            cols: m.cols(),
            nnz: m.nnz(),
            block_width: m.block_width(),
            density: Rational::new(m.nnz() as u64, (m.rows() * m.cols()) as u64),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ColumnCheck {
    pub columns: u128,
    pub bound: ColumnBound,
    pub holds: bool,
    /// `columns / bound`, exact.
    pub ratio: (u128, u128),
}

#[derive(Debug, Clone, Serialize)]
pub struct BlockSection {
    pub orthogonality: BlockOrthReport,
    pub coherence: BlockCoherenceReport,
}

#[derive(Debug, Clone, Serialize)]
pub struct AnalysisReport {
    pub matrix: MatrixSummary,
    pub coherence: CoherenceReport,
    /// Orders `2..=ceil(k/t)`.
    pub rip: Vec<RipReport>,
    pub column_bound: ColumnCheck,
    pub native_blocks: BlockOrthReport,
    pub blocks: Option<BlockSection>,
    pub certified: bool,
    pub failures: Vec<String>,
}

impl AnalysisReport {
    /// `overlap` must be the exact maximum overlap of `m`.
    pub fn build(
        m: &BinarySensingMatrix,
        overlap: OverlapResult,
        d: Option<usize>,
    ) -> Result<Self, AnalysisError> {
        let (k, t) = (m.k(), m.t());
        let coherence = CoherenceReport::from_overlap(k, t, overlap);
        let top = (k as u64).div_ceil(u64::from(t));
        let rip = (2..=top)
            .map(|order| rip_bound(coherence.mu, order))
            .collect::<Result<Vec<_>, _>>()?;
        let bound = max_column_bound(m.rows() as u64, k as u64, u64::from(t))?;
        let columns = m.cols() as u128;
        let column_bound = ColumnCheck {
            columns,
            bound,
            holds: columns * bound.denominator <= bound.numerator,
            ratio: bound.ratio(columns),
        };
        let native_blocks = verify_block_orthogonality(m, m.block_width())?;
        let blocks = match d {
            Some(d) => Some(BlockSection {
                orthogonality: verify_block_orthogonality(m, d)?,
                coherence: block_coherence(m, d)?,
            }),
            None => None,
        };

        let mut failures = Vec::new();
        if !coherence.certified {
            let (a, b) = coherence.witness_pair.unwrap_or_default();
            failures.push(format!(
                "coherence {} exceeds t/k = {}: columns {a} and {b} overlap in {} rows",
                coherence.mu, coherence.bound, coherence.max_overlap
            ));
        }
        if !column_bound.holds {
            failures.push(format!(
                "{columns} columns exceed the bound {}/{}",
                bound.numerator, bound.denominator
            ));
        }
        let mut orth = |r: &BlockOrthReport| {
            if let Some(w) = r.witness {
                failures.push(format!(
                    "width-{} block {} is not orthogonal: columns {} and {} overlap in {} rows",
                    r.d,
                    w.a / r.d,
                    w.a,
                    w.b,
                    w.overlap
                ));
            }
        };
        orth(&native_blocks);
        if let Some(b) = &blocks {
            orth(&b.orthogonality);
            let c = &b.coherence;
            if !c.within_bounds {
                failures.push(format!(
                    "block coherence {:.12} or coherence {} exceeds its bound {}",
                    c.mu_b, c.mu, c.bound
                ));
            }
            if c.equality_holds == Some(false) {
                failures.push(format!(
                    "block coherence {:.12} differs from {}",
                    c.mu_b,
                    c.equality_claim.unwrap_or_default()
                ));
            }
        }
        Ok(AnalysisReport {
            matrix: MatrixSummary::of(m),
            coherence,
            rip,
            column_bound,
            native_blocks,
            blocks,
            certified: failures.is_empty(),
            failures,
        })
    }

    pub fn to_text(&self) -> String {
        let m = &self.matrix;
        let c = &self.coherence;
        let mut out = String::new();
        let _ = writeln!(
            out,
            "Phi(n={}, k={}, t={}): {} x {}, {} nonzeros, density {}",
            m.n, m.k, m.t, m.rows, m.cols, m.nnz, m.density
        );
        let _ = writeln!(
            out,
            "coherence  mu = {} (max overlap {}), bound t/k = {}  {}",
            c.mu,
            c.max_overlap,
            c.bound,
            verdict(c.certified)
        );
        let _ = writeln!(out, "\n  k'  delta_k'  delta < 1");
        for r in &self.rip {
            let _ = writeln!(
                out,
                "{:>4}  {:>8}  {}",
                r.order,
                r.delta.to_string(),
                if r.valid_regime { "yes" } else { "no" }
            );
        }
        let cb = &self.column_bound;
        let _ = writeln!(
            out,
            "\ncolumns    {} <= C({}, {})/C({}, {}) = {}  {}  (ratio {}/{})",
            cb.columns,
            m.rows,
            m.t + 1,
            m.k,
            m.t + 1,
            if cb.bound.numerator % cb.bound.denominator == 0 {
                cb.bound.floor.to_string()
            } else {
                format!("{}/{}", cb.bound.numerator, cb.bound.denominator)
            },
            verdict(cb.holds),
            cb.ratio.0,
            cb.ratio.1
        );
        let nb = &self.native_blocks;
        let _ = writeln!(
            out,
            "blocks     {} blocks of width {} orthonormal  {}",
            nb.blocks,
            nb.d,
            verdict(nb.passed)
        );
        if let Some(b) = &self.blocks {
            let bc = &b.coherence;
            let _ = writeln!(
                out,
                "d = {}      {} blocks orthonormal  {}",
                bc.d,
                b.orthogonality.blocks,
                verdict(b.orthogonality.passed)
            );
            let exact = bc
                .mu_b_exact
                .map(|r| format!(" = {r}"))
                .unwrap_or_default();
            let _ = writeln!(
                out,
                "           mu_B = {:.12}{exact} ({:?} path, {} block pairs)  {}",
                bc.mu_b,
                bc.path,
                bc.block_pairs,
                verdict(bc.within_bounds)
            );
            if let (Some(claim), Some(holds)) = (bc.equality_claim, bc.equality_holds) {
                let _ = writeln!(out, "           mu_B == {claim}  {}", verdict(holds));
            }
        }
        for f in &self.failures {
            let _ = writeln!(out, "FAIL: {f}");
        }
        let _ = writeln!(
            out,
            "{}",
            if self.certified { "certified" } else { "NOT certified" }
        );
        out
    }
}

fn verdict(ok: bool) -> &'static str {
    if ok {
        "ok"
    } else {
        "VIOLATED"
    }
}
