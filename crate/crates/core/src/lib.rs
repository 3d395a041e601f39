//! Darboux transformations of Jacobi (three-term) operators on a half-infinite
//! lattice, their supersymmetric pairing, and the free-particle model in the
//! harmonic-oscillator basis.

pub mod darboux;
pub mod error;
pub mod io;
pub mod jacobi;
pub mod models;
pub mod probes;
pub mod seq;
pub mod susy;

pub use darboux::{
    apply_transform, build_transform, build_transform_scaled, interior_rows, missing_states, missing_states_scaled,
    verify_transform, DarbouxOperator, Direction, MissingStatePair, ScaledMissingStates, Transform, TransformOptions,
    TransformReport, VerifyReport,
};
pub use error::{Error, Result};
pub use jacobi::{
    apply_jacobi, eigen_residual, scaled_eigen_residual, second_solution, solve_recurrence, solve_recurrence_scaled,
    wronskians, JacobiOperator, RecurrenceMode, SecondSolution, WronskianReport,
};
pub use seq::{l2_inner, LogMagnitude, ScaledSeq, Seq, SeqKind, MAGNITUDE_CAP};
pub use susy::{apply_supercharge, superalgebra_check, Charge, SuperReport, SuperSystem, SuperVec};
