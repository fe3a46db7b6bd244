//! Consensus and synchronization of linear systems over prime finite fields.
//!
//! The crate decides whether a communication graph matrix over GF(p) admits
//! consensus, synthesizes nilpotent-placing feedback gains for LTI agents,
//! simulates the resulting exact dynamics, and generates or exhaustively
//! enumerates admissible transformation matrices together with the
//! closed-form cardinalities of the spaces they live in.
//!
//! All arithmetic is exact: entries are residues in `[0, p)`, counts are
//! big integers, and densities are exact rationals.

pub mod admissibility;
pub mod dynamics;
pub mod error;
pub mod field;
pub mod generators;
pub mod matrix;
pub mod textio;

pub use admissibility::{
    check_admissible, consensus_alpha, laplacian, seed_admissible, similar_transform,
    AdmissibilityReport, GraphSpec,
};
pub use dynamics::{
    closed_loop, nilpotent_gain_candidates, simulate_lti, simulate_scalar, stabilizing_gain,
    staircase, verify_closed_loop_spectrum, AgentSystem, SimulationTrace, StabilizabilityVerdict,
    StaircaseDecomposition,
};
pub use error::{Error, Result};
pub use field::{FieldSpec, Residue};
pub use generators::{
    cardinalities, coset_representatives, enumerate_gl_count, enumerate_sets, gen_sar,
    gen_stabilizer, gen_tf, generate_matrix, perm_equiv_lex, perm_equiv_naive, row_perm_equiv,
    stabilizer_conjugate, CardinalityReport, EnumeratedSets, GenConfig, GenVariant, SarRejection,
    StabilizerConstruction, Triangle,
};
pub use matrix::{CharPoly, FMatrix, MatrixFlags};
