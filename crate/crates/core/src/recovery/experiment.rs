//! Seeded recovery experiments.
//!
//! Trial `i` at block sparsity `s` draws from its own stream
//! `SplitMix64::stream(seed, (s << 40) | i)`, so trials can run in any order
//! or in parallel and still aggregate to identical statistics.

use alloc::format;
use alloc::vec::Vec;

use super::{bomp, bomp_guarantee, BlockSparseSignal, BompGuarantee, Family, RecoveryError, ValueDist};
use crate::arith::binomial;
use crate::ges::{construct_ges, GesArray, GesError};
use crate::matrix::{build_matrix, BinarySensingMatrix};
use crate::rng::SplitMix64;

/// Exactness threshold on `‖x̂ - x‖∞`.
pub const EXACT_TOL: f64 = 1e-6;

/// Cap on exhaustively enumerated supports per sparsity.
const MAX_EXHAUSTIVE: u128 = 10_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "lowercase"))]
pub enum Solver {
    Omp,
    Bomp,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "lowercase"))]
pub enum SupportMode {
    /// `trials` uniformly random supports.
    Random,
    /// Every `s`-subset of blocks once, in lexicographic order.
    Exhaustive,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(deny_unknown_fields))]
pub struct ExperimentConfig {
    pub n: u64,
    pub k: usize,
    pub t: u32,
    #[cfg_attr(feature = "serde", serde(default = "one"))]
    pub d: usize,
    /// Block sparsities to test.
    pub s: Vec<usize>,
    #[cfg_attr(feature = "serde", serde(default = "default_trials"))]
    pub trials: u64,
    #[cfg_attr(feature = "serde", serde(default))]
    pub seed: u64,
    #[cfg_attr(feature = "serde", serde(default = "default_solver"))]
    pub solver: Solver,
    #[cfg_attr(feature = "serde", serde(default = "default_dist"))]
    pub value_dist: ValueDist,
    #[cfg_attr(feature = "serde", serde(default = "default_supports"))]
    pub supports: SupportMode,
    #[cfg_attr(feature = "serde", serde(default = "default_tol"))]
    pub tol: f64,
}

#[cfg(feature = "serde")]
fn one() -> usize {
    1
}
#[cfg(feature = "serde")]
fn default_trials() -> u64 {
    100
}
#[cfg(feature = "serde")]
fn default_solver() -> Solver {
    Solver::Bomp
}
#[cfg(feature = "serde")]
fn default_dist() -> ValueDist {
    ValueDist::Gaussian
}
#[cfg(feature = "serde")]
fn default_supports() -> SupportMode {
    SupportMode::Random
}
#[cfg(feature = "serde")]
fn default_tol() -> f64 {
    1e-10
}

impl ExperimentConfig {
    pub fn new(n: u64, k: usize, t: u32, d: usize, s: Vec<usize>, trials: u64, seed: u64) -> Self {
        ExperimentConfig {
            n,
            k,
            t,
            d,
            s,
            trials,
            seed,
            solver: if d == 1 { Solver::Omp } else { Solver::Bomp },
            value_dist: ValueDist::Gaussian,
            supports: SupportMode::Random,
            tol: 1e-10,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct TrialOutcome {
    pub s: usize,
    pub index: u64,
    pub support_match: bool,
    pub exact: bool,
    pub singular: bool,
    pub residual_norm: f64,
    /// `‖x̂ - x‖∞`.
    pub max_error: f64,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct SStats {
    pub s: usize,
    pub trials: u64,
    pub exact: u64,
    pub max_residual: f64,
    pub max_error: f64,
    /// Whether `s` lies inside the recovery guarantee.
    pub guaranteed: bool,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct RecoveryStats {
    pub config: ExperimentConfig,
    pub guarantee: Option<BompGuarantee>,
    pub trials: u64,
    pub exact_successes: u64,
    pub max_residual: f64,
    pub per_s: Vec<SStats>,
    pub outcomes: Vec<TrialOutcome>,
}

impl RecoveryStats {
    /// Summarizes outcomes, which must be ordered by `(s, index)`.
    pub fn aggregate(
        config: &ExperimentConfig,
        guarantee: Option<BompGuarantee>,
        outcomes: Vec<TrialOutcome>,
    ) -> Self {
        let per_s = config
            .s
            .iter()
            .map(|&s| {
                let mine = outcomes.iter().filter(|o| o.s == s);
                let mut st = SStats {
                    s,
                    trials: 0,
                    exact: 0,
                    max_residual: 0.0,
                    max_error: 0.0,
                    guaranteed: guarantee.as_ref().is_some_and(|g| s as u64 <= g.s_star),
                };
                for o in mine {
                    st.trials += 1;
                    st.exact += u64::from(o.exact);
                    st.max_residual = st.max_residual.max(o.residual_norm);
                    st.max_error = st.max_error.max(o.max_error);
                }
                st
            })
            .collect::<Vec<_>>();
        RecoveryStats {
            config: config.clone(),
            guarantee,
            trials: outcomes.len() as u64,
            exact_successes: outcomes.iter().filter(|o| o.exact).count() as u64,
            max_residual: outcomes.iter().fold(0.0, |m, o| m.max(o.residual_norm)),
            per_s,
            outcomes,
        }
    }

    /// Fails when a sparsity inside the guarantee saw an inexact trial.
    pub fn check_guarantee(&self) -> Result<(), RecoveryError> {
        match self.per_s.iter().find(|st| st.guaranteed && st.exact < st.trials) {
            Some(st) => Err(RecoveryError::GuaranteeViolated {
                s: st.s,
                failures: st.trials - st.exact,
                trials: st.trials,
            }),
            None => Ok(()),
        }
    }
}

/// The array behind an experiment matrix: Euler-square layout for `t = 1`,
/// polynomial-column layout otherwise.
pub fn experiment_array(n: u64, k: usize, t: u32) -> Result<GesArray, GesError> {
    let g = construct_ges(n, k, t)?;
    if t == 1 {
        g.transpose()
    } else {
        Ok(g)
    }
}

/// A prepared experiment: matrix built, guarantee evaluated.
#[derive(Debug, Clone)]
pub struct Experiment {
    pub config: ExperimentConfig,
    pub matrix: BinarySensingMatrix,
    pub guarantee: Option<BompGuarantee>,
}

impl Experiment {
    pub fn new(config: ExperimentConfig) -> Result<Self, RecoveryError> {
        let matrix = build_matrix(&experiment_array(config.n, config.k, config.t)?)?;
        let d = config.d;
        if d == 0 || matrix.cols() % d != 0 {
            return Err(RecoveryError::ParameterViolation(format!(
                "block length {d} does not divide {} columns",
                matrix.cols()
            )));
        }
        if config.solver == Solver::Omp && d != 1 {
            return Err(RecoveryError::ParameterViolation(format!(
                "omp works on single columns; use bomp for d={d}"
            )));
        }
        let blocks = matrix.cols() / d;
        if let Some(&s) = config.s.iter().find(|&&s| s > blocks || s * d > matrix.rows()) {
            return Err(RecoveryError::ParameterViolation(format!(
                "s={s} is too large for {blocks} blocks of {d} and {} rows",
                matrix.rows()
            )));
        }
        let family = if config.t == 1 { Family::Es } else { Family::Ges };
        let guarantee =
            bomp_guarantee(config.k as u64, d as u64, u64::from(config.t), family, None).ok();
        let exp = Experiment {
            config,
            matrix,
            guarantee,
        };
        for &s in &exp.config.s {
            exp.trial_count(s)?;
        }
        Ok(exp)
    }

    pub fn blocks(&self) -> usize {
        self.matrix.cols() / self.config.d
    }

    pub fn trial_count(&self, s: usize) -> Result<u64, RecoveryError> {
        match self.config.supports {
            SupportMode::Random => Ok(self.config.trials),
            SupportMode::Exhaustive => match binomial(self.blocks() as u64, s as u64) {
                Some(c) if c <= MAX_EXHAUSTIVE => Ok(c as u64),
                _ => Err(RecoveryError::ParameterViolation(format!(
                    "too many supports to enumerate for s={s}"
                ))),
            },
        }
    }

    /// Runs trial `index` at block sparsity `s`.
    pub fn run_trial(&self, s: usize, index: u64) -> Result<TrialOutcome, RecoveryError> {
        let cfg = &self.config;
        let mut rng = SplitMix64::stream(cfg.seed, ((s as u64) << 40) | index);
        let support: Vec<usize> = match cfg.supports {
            SupportMode::Random => rng
                .subset(self.blocks() as u64, s)
                .into_iter()
                .map(|b| b as usize)
                .collect(),
            SupportMode::Exhaustive => unrank_combination(self.blocks(), s, u128::from(index)),
        };
        let sig = BlockSparseSignal::on_support(
            self.matrix.cols(),
            cfg.d,
            support,
            cfg.value_dist,
            &mut rng,
        )?;
        let y = self.matrix.apply(&sig.values, true)?;
        let outcome = match bomp(&self.matrix, &y, cfg.d, s, cfg.tol) {
            Ok(est) => {
                let support_match = est.sorted_support() == sig.support;
                let max_error = est
                    .x
                    .iter()
                    .zip(&sig.values)
                    .fold(0.0f64, |m, (a, b)| m.max((a - b).abs()));
                TrialOutcome {
                    s,
                    index,
                    support_match,
                    exact: support_match && max_error <= EXACT_TOL,
                    singular: false,
                    residual_norm: est.residual_norm,
                    max_error,
                }
            }
            Err(RecoveryError::SingularSubproblem { .. }) => TrialOutcome {
                s,
                index,
                support_match: false,
                exact: false,
                singular: true,
                residual_norm: f64::INFINITY,
                max_error: f64::INFINITY,
            },
            Err(e) => return Err(e),
        };
        Ok(outcome)
    }

    /// All trials in `(s, index)` order, serially.
    pub fn run(&self) -> Result<RecoveryStats, RecoveryError> {
        let mut outcomes = Vec::new();
        for &s in &self.config.s {
            for i in 0..self.trial_count(s)? {
                outcomes.push(self.run_trial(s, i)?);
            }
        }
        Ok(RecoveryStats::aggregate(
            &self.config,
            self.guarantee.clone(),
            outcomes,
        ))
    }
}

pub fn run_recovery_experiment(config: &ExperimentConfig) -> Result<RecoveryStats, RecoveryError> {
    Experiment::new(config.clone())?.run()
}

/// The `rank`-th `s`-subset of `0..m` in lexicographic order.
fn unrank_combination(m: usize, s: usize, mut rank: u128) -> Vec<usize> {
    let mut out = Vec::with_capacity(s);
    let mut next = 0;
    for left in (1..=s).rev() {
        loop {
            let with = binomial((m - next - 1) as u64, (left - 1) as u64).unwrap_or(u128::MAX);
            if rank < with {
                break;
            }
            rank -= with;
            next += 1;
        }
        out.push(next);
        next += 1;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::mix64;
    use alloc::vec;

    #[test]
    fn unrank_enumerates_in_order() {
        let all: Vec<Vec<usize>> = (0..10).map(|r| unrank_combination(5, 3, r)).collect();
        assert_eq!(all[0], [0, 1, 2]);
        assert_eq!(all[1], [0, 1, 3]);
        assert_eq!(all[9], [2, 3, 4]);
        assert!(all.windows(2).all(|w| w[0] < w[1]));
        assert_eq!(unrank_combination(4, 0, 0), Vec::<usize>::new());
    }

    #[test]
    fn in_guarantee_es_omp() {
        let cfg = ExperimentConfig::new(7, 6, 1, 1, vec![1, 3], 40, 11);
        let stats = run_recovery_experiment(&cfg).unwrap();
        assert_eq!(stats.guarantee.as_ref().unwrap().s_star, 3);
        assert_eq!(stats.exact_successes, 80);
        stats.check_guarantee().unwrap();
        assert_eq!(stats, run_recovery_experiment(&cfg).unwrap());
    }

    #[test]
    fn order_independent_trials() {
        let mut cfg = ExperimentConfig::new(8, 7, 1, 2, vec![2], 10, mix64(5));
        cfg.value_dist = ValueDist::Rademacher;
        let exp = Experiment::new(cfg).unwrap();
        let forward: Vec<_> = (0..10).map(|i| exp.run_trial(2, i).unwrap()).collect();
        let mut backward: Vec<_> = (0..10).rev().map(|i| exp.run_trial(2, i).unwrap()).collect();
        backward.reverse();
        assert_eq!(forward, backward);
    }

    #[test]
    fn outside_guarantee_is_reported_not_asserted() {
        let cfg = ExperimentConfig::new(8, 7, 1, 2, vec![5], 20, 3);
        let stats = run_recovery_experiment(&cfg).unwrap();
        assert!(!stats.per_s[0].guaranteed);
        stats.check_guarantee().unwrap();
    }

    #[test]
    fn config_errors() {
        let mut cfg = ExperimentConfig::new(8, 7, 1, 2, vec![2], 1, 0);
        cfg.solver = Solver::Omp;
        assert!(Experiment::new(cfg).is_err());
        let cfg = ExperimentConfig::new(8, 7, 1, 3, vec![2], 1, 0);
        assert!(Experiment::new(cfg).is_err());
        let mut cfg = ExperimentConfig::new(8, 7, 2, 1, vec![4], 1, 0);
        cfg.supports = SupportMode::Exhaustive;
        assert!(Experiment::new(cfg).is_err());
    }
}
