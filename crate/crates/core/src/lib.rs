//! Quantum channels and superfidelity-based distance measures.
//!
//! The crate provides:
//! * a small dense complex-matrix kernel with the decompositions the rest of
//!   the library needs ([`linalg`]);
//! * channels in Kraus / superoperator / dynamical-matrix / Bloch-affine
//!   form with cached conversions, composition and tensor products
//!   ([`channel`]);
//! * fidelity, superfidelity, trace distance and the metrics derived from
//!   them, for states and for channels via their Jamiołkowski states
//!   ([`metrics`]);
//! * named channel families with closed-form measures ([`families`]);
//! * seeded random states, unitaries and channels ([`random`]);
//! * a measurement-circuit route to the same quantities, with a shot-noise
//!   estimator ([`circuit`]);
//! * distribution benchmarks over random states ([`bench`]), a JSON channel
//!   interchange format ([`spec_file`]) and self-check suites ([`verify`]).

pub mod bench;
pub mod channel;
pub mod circuit;
pub mod error;
pub mod families;
pub mod linalg;
pub mod metrics;
pub mod random;
pub mod spec_file;
pub mod verify;

pub use channel::{
    tensor_permutation, Channel, DynamicalMatrix, JamiolkowskiState, KrausSet, Repr,
    Superoperator, ValidationReport,
};
pub use error::{QchanError, Result};
pub use families::{
    dephasing, dephasing_qubit, depolarizing, pauli_channel, weyl_operator, werner_holevo,
    AffineQubit,
};
pub use linalg::{ComplexMatrix, HermitianEigensystem, Subsystem, C64};
pub use metrics::{
    derived_metrics, fidelity, fidelity_commuting, process_metrics, process_metrics_unvalidated,
    superfidelity, superfidelity_commuting, trace_distance, DensityMatrix, DerivedMetrics,
    MetricReport,
};
pub use random::{
    ginibre, random_channel, random_channel_with_rank, random_density, random_density_with_rank,
    random_unitary, RandomSource,
};
