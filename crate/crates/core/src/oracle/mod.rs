//! Dense density-matrix ground truth for the parametric formulas.
//!
//! Everything here is exact linear algebra on explicit `2^m x 2^m` complex
//! matrices. Registers are capped (10 qubits by default) so the two-copy map
//! is available up to n = 5.

mod matrix;
mod protocols;
mod verify;

pub use matrix::{hadamard, projector_x, projector_z, DensityMatrix, Mat2, PureState, PAULI_X, PAULI_Y, PAULI_Z};
pub use protocols::{
    bbpssw_step_oracle, build_state, diag_ghz, extract_weights, isotropic_pair, lambda_oracle,
    lambda_pair, prepare_pair_oracle, teleport_channel_state, teleport_explicit, teleport_oracle,
    BbpsswOutcome, ExplicitTeleport, FamilyFit, LambdaOutput, OracleCap, PairPreparation,
};
pub use verify::{
    bbpssw_checks, lambda_identity_checks, preparation_checks, random_weights, recurrence_checks,
    success_probability_checks, teleport_checks, verify_lambda_identities, Check, VerificationReport,
    BBPSSW_GRID, DEFAULT_SEED, RANDOM_SAMPLES,
};
