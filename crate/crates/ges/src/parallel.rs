//! Worker pool sized by `GES_THREADS` (unset or 0 = one per core).
//!
//! Work is split into fixed chunks and results are combined in chunk order,
//! so output never depends on the thread count.

use ges_core::analysis::{OverlapIndex, OverlapResult};
use ges_core::recovery::{Experiment, RecoveryError, RecoveryStats, TrialOutcome};
use ges_core::BinarySensingMatrix;
use rayon::prelude::*;
use rayon::ThreadPool;

use crate::error::CliError;

pub const THREADS_VAR: &str = "GES_THREADS";

pub fn thread_count() -> Result<usize, CliError> {
    match std::env::var(THREADS_VAR) {
        Err(_) => Ok(0),
        Ok(v) => v.trim().parse().map_err(|_| {
            CliError::Param(format!("{THREADS_VAR} must be a non-negative integer, got {v:?}"))
        }),
    }
}

pub fn pool() -> Result<ThreadPool, CliError> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(thread_count()?)
        .build()
        .map_err(|e| CliError::Param(format!("cannot start worker pool: {e}")))
}

const ANCHOR_CHUNK: usize = 256;

/// Same result as [`ges_core::max_overlap`], anchors split across workers.
pub fn max_overlap(pool: &ThreadPool, m: &BinarySensingMatrix) -> OverlapResult {
    let index = OverlapIndex::new(m);
    let cols = m.cols();
    let chunks: Vec<OverlapResult> = pool.install(|| {
        (0..cols.div_ceil(ANCHOR_CHUNK))
            .into_par_iter()
            .map(|c| index.scan(c * ANCHOR_CHUNK..((c + 1) * ANCHOR_CHUNK).min(cols)))
            .collect()
    });
    chunks
        .into_iter()
        .reduce(OverlapResult::merge)
        .unwrap_or(OverlapResult {
            max: 0,
            witness: None,
            pairs_checked: 0,
        })
}

/// Same result as [`Experiment::run`], trials split across workers.
pub fn run_experiment(pool: &ThreadPool, exp: &Experiment) -> Result<RecoveryStats, RecoveryError> {
    let mut jobs = Vec::new();
    for &s in &exp.config.s {
        for i in 0..exp.trial_count(s)? {
            jobs.push((s, i));
        }
    }
    let outcomes: Vec<TrialOutcome> = pool.install(|| {
        jobs.par_iter()
            .map(|&(s, i)| exp.run_trial(s, i))
            .collect::<Result<_, _>>()
    })?;
    Ok(RecoveryStats::aggregate(
        &exp.config,
        exp.guarantee.clone(),
        outcomes,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use ges_core::recovery::ExperimentConfig;
    use ges_core::{build_matrix, construct_ges};

    fn fixed(threads: usize) -> ThreadPool {
        rayon::ThreadPoolBuilder::new().num_threads(threads).build().unwrap()
    }

    #[test]
    fn overlap_matches_serial() {
        let m = build_matrix(&construct_ges(7, 4, 2).unwrap()).unwrap();
        let serial = ges_core::max_overlap(&m);
        assert_eq!(max_overlap(&fixed(1), &m), serial);
        assert_eq!(max_overlap(&fixed(4), &m), serial);
    }

    #[test]
    fn experiment_matches_serial() {
        let cfg = ExperimentConfig::new(5, 4, 1, 1, vec![1, 2, 3], 20, 9);
        let exp = Experiment::new(cfg).unwrap();
        let serial = exp.run().unwrap();
        let par = run_experiment(&fixed(3), &exp).unwrap();
        assert_eq!(format!("{serial:?}"), format!("{par:?}"));
    }
}
