//! Deterministic binary compressed-sensing matrices built from Euler squares
//! and generalized Euler squares (GES).
//!
//! The pipeline is:
//!
//! 1. [`field`]: exact arithmetic in GF(p^r) with a canonical element order.
//! 2. [`ges`]: GES(n, k, t) arrays from polynomial evaluation over a field,
//!    composed across prime-power factors for composite `n`, plus a
//!    brute-force axiom verifier.
//! 3. [`matrix`]: the `nk × n^(t+1)` binary matrix whose columns are grouped
//!    into `n^t` orthonormal blocks.
//! 4. [`analysis`]: coherence, RIP and column-count bounds, block Gram
//!    structure and block coherence.
//! 5. [`recovery`]: OMP / Block-OMP, the block-sparse recovery guarantee and a
//!    seeded experiment harness.
//!
//! The crate is `no_std` and only needs `alloc`.

#![no_std]
#![warn(missing_debug_implementations)]

extern crate alloc;

#[cfg(test)]
extern crate std;

pub mod analysis;
pub mod arith;
pub mod field;
pub mod ges;
pub mod matrix;
pub mod recovery;
pub mod rng;

#[cfg(feature = "serde")]
pub mod serde_ratio;

pub use analysis::{
    block_coherence, block_gram, coherence, max_column_bound, max_overlap, rip_bound,
    spectral_norm, verify_block_orthogonality, AnalysisError, BlockCoherenceReport,
    CoherenceReport, RipReport,
};
pub use field::{find_irreducible, make_field, FieldElement, FieldError, FieldSpec};
pub use ges::{
    compose, construct_es, construct_ges, construct_prime_power_ges, intersection, truncate,
    verify_ges, AxiomReport, GesArray, GesError, KTuple, LazyGes, TupleSource,
};
pub use matrix::{build_matrix, column_vector, BinarySensingMatrix, MatrixError};
pub use recovery::{
    bomp, bomp_guarantee, gen_block_sparse, omp, run_recovery_experiment, BlockSparseSignal,
    ExperimentConfig, RecoveryError, RecoveryStats,
};

/// Exact rational used for coherence, RIP constants and bounds.
pub type Rational = num_rational::Ratio<u64>;
