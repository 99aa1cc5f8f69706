//! Stabilizer contextuality witnesses for prime-dimensional qudits.
//!
//! The crate builds the two-qudit stabilizer projector sets whose sum acts as
//! a contextuality witness for a chosen facet of the simulable polytope,
//! assembles their exclusivity graphs, computes independence numbers exactly,
//! and classifies single-qudit states against the stabilizer and simulable
//! polytopes.
//!
//! Modules, bottom up:
//!
//! * [`ffield`] - exact arithmetic over Z_p and SL(2, Z_p) coset coordinates;
//! * [`weyl`] - displacement operators, symplectic unitaries, entangled
//!   two-qudit stabilizer states;
//! * [`mub`] - mutually unbiased bases, phase-point / facet operators, the
//!   stabilizer and simulable polytopes, reference magic states;
//! * [`witness`] - the witness projector sets and symbolic + numeric
//!   orthogonality backends;
//! * [`graph`] - exclusivity graphs with their basis (clique) partition and
//!   DIMACS / JSON serialization;
//! * [`mis`] - exact maximum-independent-set search, the phase-space
//!   independent-set construction, and the sandwich certificate;
//! * [`classify`] - state classification, slice scans, and the witness
//!   bijection check;
//! * [`verify`] - the end-to-end verification suite used by the CLI and the
//!   acceptance tests.

pub mod classify;
pub mod error;
pub mod ffield;
pub mod graph;
pub mod mis;
pub mod mub;
pub mod verify;
pub mod weyl;
pub mod witness;

pub use classify::{Classification, SliceSpec, StateClass};
pub use error::{Error, Result};
pub use ffield::{coset_decompose, coset_rep, symp_conjugate, BpElement, CosetLabel, Fp, SympMatrix};
pub use graph::{Backend, ExclusivityGraph};
pub use mis::{IndependentSet, SandwichCertificate, SolveOptions, SolveOutcome};
pub use mub::{FacetVector, MubIndex, PhaseSpace};
pub use weyl::{CMatrix, CVector, Displacement};
pub use witness::{StabProjector, WitnessSet};
