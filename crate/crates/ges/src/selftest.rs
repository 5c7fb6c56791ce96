//! Golden examples, a small property grid and deterministic artifacts.

use std::path::Path;

use ges_core::analysis::{block_coherence, max_column_bound, verify_block_orthogonality};
use ges_core::ges::{verify_ges_with, Provenance, VerifyMode};
use ges_core::recovery::{Experiment, ExperimentConfig};
use ges_core::{
    build_matrix, construct_es, construct_ges, construct_prime_power_ges, BinarySensingMatrix,
    GesArray, Rational,
};
use rayon::ThreadPool;
use serde::Serialize;
use serde_json::{json, Map, Value};

use crate::config::{Params, RunConfig};
use crate::error::CliError;
use crate::formats::{self, ges_json, mtx, phi_json};
use crate::report::AnalysisReport;
use crate::{doc, parallel};

#[derive(Debug, Clone, Serialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

#[derive(Debug, Clone)]
pub struct Artifact {
    pub name: String,
    pub text: String,
    pub hash: String,
}

#[derive(Debug, Default)]
pub struct Outcome {
    pub checks: Vec<Check>,
    pub artifacts: Vec<Artifact>,
}

impl Outcome {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    fn check(&mut self, name: impl Into<String>, passed: bool, detail: impl Into<String>) {
        self.checks.push(Check {
            name: name.into(),
            passed,
            detail: detail.into(),
        });
    }

    fn json(&mut self, name: &str, v: &Value) {
        let hash = doc::hash_of(v).unwrap_or_default().to_string();
        self.artifacts.push(Artifact {
            name: name.into(),
            text: doc::render(v),
            hash,
        });
    }

    fn raw(&mut self, name: &str, text: String, hash: String) {
        self.artifacts.push(Artifact {
            name: name.into(),
            text,
            hash,
        });
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for c in &self.checks {
            let tag = if c.passed { "PASS" } else { "FAIL" };
            out.push_str(&format!("{tag} {}: {}\n", c.name, c.detail));
        }
        for a in &self.artifacts {
            out.push_str(&format!("artifact {} {}\n", a.name, a.hash));
        }
        let ok = self.checks.iter().filter(|c| c.passed).count();
        out.push_str(&format!("selftest: {ok}/{} checks passed\n", self.checks.len()));
        out
    }
}

fn tuples(rows: &[&[[u32; 2]]]) -> Vec<Vec<Vec<u32>>> {
    rows.iter()
        .map(|r| r.iter().map(|t| t.to_vec()).collect())
        .collect()
}

fn rows_of(g: &GesArray) -> Vec<Vec<Vec<u32>>> {
    (0..g.rows())
        .map(|r| (0..g.cols()).map(|c| g.tuple(r, c).to_vec()).collect())
        .collect()
}

fn rc(params: Params, output: &str) -> RunConfig {
    RunConfig {
        params,
        outputs: vec![output.to_string()],
        ..RunConfig::new("selftest")
    }
}

fn nkt(n: u64, k: usize, t: u32) -> Params {
    Params {
        n: Some(n),
        k: Some(k),
        t: Some(t),
        ..Params::default()
    }
}

/// Composition with the value rule `c' + p'·(c'' - 1)` (clamped at zero),
/// a deliberately broken variant used to show the verifier catches it.
pub fn faulty_compose(a: &GesArray, b: &GesArray) -> GesArray {
    let (na, nb) = (a.n(), b.n());
    let n = na * nb;
    let mut values = Vec::with_capacity((n * n) as usize * a.k());
    for row in 0..n as usize {
        let (i, j) = (row % na as usize, row / na as usize);
        for col in 0..n as usize {
            let (ca, cb) = (col % na as usize, col / na as usize);
            for (x, y) in a.tuple(i, ca).iter().zip(b.tuple(j, cb)) {
                values.push(x + na * y.saturating_sub(1));
            }
        }
    }
    GesArray::from_parts(n, a.k(), 1, values, Provenance::default())
        .expect("shape follows from the factors")
}

fn golden(out: &mut Outcome) -> Result<(), CliError> {
    let es = construct_es(3, 2).map_err(invariant)?;
    let want = tuples(&[
        &[[0, 0], [1, 1], [2, 2]],
        &[[1, 2], [2, 0], [0, 1]],
        &[[2, 1], [0, 2], [1, 0]],
    ]);
    out.check("golden ES(3,2)", rows_of(&es) == want, "Euler-square layout, 3x3 pairs");

    let g = construct_ges(3, 2, 1).map_err(invariant)?;
    let want = tuples(&[
        &[[0, 0], [1, 2], [2, 1]],
        &[[1, 1], [2, 0], [0, 2]],
        &[[2, 2], [0, 1], [1, 0]],
    ]);
    out.check("golden GES(3,2,1)", rows_of(&g) == want, "polynomial layout, 3x3 pairs");

    let m = build_matrix(&es).map_err(invariant)?;
    let blocks: [[u8; 6]; 9] = [
        [1, 0, 0, 1, 0, 0],
        [0, 1, 0, 0, 0, 1],
        [0, 0, 1, 0, 1, 0],
        [0, 1, 0, 0, 1, 0],
        [0, 0, 1, 1, 0, 0],
        [1, 0, 0, 0, 0, 1],
        [0, 0, 1, 0, 0, 1],
        [1, 0, 0, 0, 1, 0],
        [0, 1, 0, 1, 0, 0],
    ];
    let same = (0..9).all(|j| m.dense_column(j) == blocks[j]);
    out.check("golden Phi(3,2) blocks", same, "three 6x3 blocks, bit-exact");

    let g = construct_prime_power_ges(5, 4, 2).map_err(invariant)?;
    let col = |c: usize| -> Vec<Vec<u32>> { g.column(c).map(|t| t.to_vec()).collect() };
    let ok = col(0) == (0..5).map(|v| vec![v; 4]).collect::<Vec<_>>()
        && col(1)[0] == [1, 2, 3, 4]
        && col(23)[0] == [2, 2, 0, 1]
        && col(24)[0] == [3, 4, 3, 0];
    out.check("golden GES(5,4,2)", ok, "columns 0, x, 4x^2+3x, 4x^2+4x");
    Ok(())
}

fn invariant(e: impl std::fmt::Display) -> CliError {
    CliError::Selftest(e.to_string())
}

/// Exact axiom, overlap, block and column-count checks on one array.
fn grid_entry(pool: &ThreadPool, g: &GesArray) -> Result<Vec<String>, CliError> {
    let mut errs = Vec::new();
    let (n, k, t) = (g.n(), g.k(), g.t());
    let report = verify_ges_with(g, VerifyMode::Projection);
    if !report.passed() {
        errs.push(format!("fails {}", report.failed_axioms().join(", ")));
        return Ok(errs);
    }
    let m = build_matrix(g).map_err(invariant)?;
    let ov = parallel::max_overlap(pool, &m);
    if ov.max > t as usize {
        errs.push(format!("max overlap {} > t", ov.max));
    }
    let orth = verify_block_orthogonality(&m, n as usize).map_err(invariant)?;
    if !orth.passed {
        errs.push("block not orthonormal".into());
    }
    let cb = max_column_bound(m.rows() as u64, k as u64, u64::from(t)).map_err(invariant)?;
    if m.cols() as u128 * cb.denominator > cb.numerator {
        errs.push("column bound exceeded".into());
    }
    Ok(errs)
}

fn grid(pool: &ThreadPool, out: &mut Outcome, inject_fault: bool) -> Result<(), CliError> {
    let mut count = 0;
    let mut failures = Vec::new();
    for q in [3u64, 4, 5, 7] {
        for t in 1..=2u32 {
            for k in t as usize + 1..q as usize {
                let g = construct_ges(q, k, t).map_err(invariant)?;
                count += 1;
                for e in grid_entry(pool, &g)? {
                    failures.push(format!("GES({q},{k},{t}) {e}"));
                }
            }
        }
    }
    out.check(
        "property grid",
        failures.is_empty(),
        if failures.is_empty() {
            format!("{count} arrays: GES 1-4, overlap <= t, orthonormal blocks, column bound")
        } else {
            failures.join("; ")
        },
    );

    let composite = if inject_fault {
        let a = construct_prime_power_ges(3, 2, 1).map_err(invariant)?;
        let b = construct_prime_power_ges(5, 2, 1).map_err(invariant)?;
        faulty_compose(&a, &b)
    } else {
        construct_ges(15, 2, 1).map_err(invariant)?
    };
    let report = verify_ges_with(&composite, VerifyMode::Exhaustive);
    let detail = if report.passed() {
        format!("{} pairs checked", report.pairs_checked)
    } else {
        format!("violates {}", report.failed_axioms().join(", "))
    };
    let name = if inject_fault {
        "composite GES(15,2,1) [fault injected]"
    } else {
        "composite GES(15,2,1)"
    };
    out.check(name, report.passed(), detail);
    Ok(())
}

fn block_equality(out: &mut Outcome) -> Result<(), CliError> {
    for (p, d) in [(4u64, 2usize), (9, 3)] {
        let m = build_matrix(&construct_es(p, p as usize - 1).map_err(invariant)?)
            .map_err(invariant)?;
        let r = block_coherence(&m, d).map_err(invariant)?;
        let want = Rational::new(1, p - 1);
        let ok = r.mu_b_exact == Some(want) && r.equality_holds == Some(true);
        out.check(
            format!("block coherence ES({p}) d={d}"),
            ok,
            format!("mu_B = {:.12}, expected {want}", r.mu_b),
        );
    }
    Ok(())
}

pub fn run(pool: &ThreadPool, inject_fault: bool) -> Result<Outcome, CliError> {
    let mut out = Outcome::default();
    golden(&mut out)?;
    grid(pool, &mut out, inject_fault)?;
    block_equality(&mut out)?;

    let cfg = ExperimentConfig::new(7, 6, 1, 1, vec![1, 2, 3], 40, 7);
    let exp = Experiment::new(cfg.clone()).map_err(invariant)?;
    let stats = parallel::run_experiment(pool, &exp).map_err(invariant)?;
    out.check(
        "OMP recovery Phi(7,6,1)",
        stats.check_guarantee().is_ok() && stats.exact_successes == stats.trials,
        format!("{}/{} exact for s = 1..3", stats.exact_successes, stats.trials),
    );

    for (name, g, p) in [
        ("es_3_2.ges.json", construct_es(3, 2), nkt(3, 2, 1)),
        ("ges_3_2_1.ges.json", construct_ges(3, 2, 1), nkt(3, 2, 1)),
        ("ges_5_4_2.ges.json", construct_ges(5, 4, 2), nkt(5, 4, 2)),
        ("ges_15_2_1.ges.json", construct_ges(15, 2, 1), nkt(15, 2, 1)),
    ] {
        let g = g.map_err(invariant)?;
        out.json(name, &ges_json::to_value(&g, Some(&rc(p, name))));
    }

    let m = build_matrix(&construct_ges(3, 2, 1).map_err(invariant)?).map_err(invariant)?;
    let body = mtx::render(&m);
    let meta = mtx::render_meta(&m, &body, &rc(nkt(3, 2, 1), "phi_3_2_1.mtx"));
    out.raw("phi_3_2_1.mtx", body.clone(), mtx::body_hash(&body));
    let meta_v: Value = serde_json::from_str(&meta).map_err(invariant)?;
    out.json("phi_3_2_1.meta.json", &meta_v);
    let phi: Value =
        serde_json::from_str(&phi_json::render(&m, &rc(nkt(3, 2, 1), "phi_3_2_1.phi.json")))
            .map_err(invariant)?;
    out.json("phi_3_2_1.phi.json", &phi);

    let m: BinarySensingMatrix =
        build_matrix(&construct_es(4, 3).map_err(invariant)?).map_err(invariant)?;
    let report = AnalysisReport::build(&m, parallel::max_overlap(pool, &m), Some(2))
        .map_err(invariant)?;
    let name = "analysis_4_3_1_d2.json";
    let params = Params {
        d: Some(2),
        ..nkt(4, 3, 1)
    };
    out.json(name, &analysis_doc(&report, &rc(params, name)));

    let name = "recovery_7_6_1.json";
    let params = Params {
        d: Some(1),
        s: Some(cfg.s.clone()),
        trials: Some(cfg.trials),
        seed: Some(cfg.seed),
        ..nkt(7, 6, 1)
    };
    out.json(name, &recovery_doc(&stats, &rc(params, name)));

    let mut summary = Map::new();
    summary.insert("format".into(), json!("ges-selftest"));
    summary.insert("passed".into(), json!(out.passed()));
    summary.insert("checks".into(), json!(out.checks));
    summary.insert(
        "artifacts".into(),
        Value::Object(
            out.artifacts
                .iter()
                .map(|a| (a.name.clone(), json!(a.hash)))
                .collect(),
        ),
    );
    summary.insert("run_config".into(), json!(rc(Params::default(), "selftest.json")));
    out.json("selftest.json", &doc::seal(summary));
    Ok(out)
}

pub fn analysis_doc(report: &AnalysisReport, rc: &RunConfig) -> Value {
    let mut map = Map::new();
    map.insert("format".into(), json!("ges-analysis"));
    if let Value::Object(body) = json!(report) {
        map.extend(body);
    }
    map.insert("run_config".into(), json!(rc));
    doc::seal(map)
}

pub fn recovery_doc(stats: &ges_core::RecoveryStats, rc: &RunConfig) -> Value {
    let mut map = Map::new();
    map.insert("format".into(), json!("ges-recovery"));
    if let Value::Object(body) = json!(stats) {
        map.extend(body);
    }
    map.insert("run_config".into(), json!(rc));
    doc::seal(map)
}

pub fn write_artifacts(out: &Outcome, dir: &Path) -> Result<(), CliError> {
    std::fs::create_dir_all(dir).map_err(|e| CliError::io(dir.display().to_string(), e))?;
    for a in &out.artifacts {
        formats::write(&dir.join(&a.name), &a.text)?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use ges_core::verify_ges;

    #[test]
    fn fault_names_ges_4() {
        let a = construct_prime_power_ges(3, 2, 1).unwrap();
        let b = construct_prime_power_ges(5, 2, 1).unwrap();
        let report = verify_ges(&faulty_compose(&a, &b));
        assert!(report.failed_axioms().contains(&"GES 4"), "{:?}", report.failed_axioms());
    }
}
