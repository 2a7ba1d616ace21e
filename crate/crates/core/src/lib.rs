//! Knot Floer homology surgery formulas over GF(2).
//!
//! A knot in a homology sphere is modelled by its reduced filtered complex
//! [`KnotComplex`]. From it this crate computes the knot Floer homology of the
//! induced knot after positive integral surgery (mapping cones), the Heegaard
//! Floer homology of the surgered manifold (glued cones), decides whether the
//! induced knot has simple knot Floer homology, and recognizes the staircase
//! complexes that characterize when it does.

pub mod classify;
pub mod format;
pub mod gf2;
pub mod knotcx;
pub mod surgery;

pub use classify::{
    alexander, delta_sequence, enumerate_staircases, make_staircase, random_symmetric_complex,
    recognize_staircase, run_suite, AlexanderPoly, ClassifyError, InstanceSource, NotStaircase, StaircaseSpec, Suite, SuiteFailure,
    SuiteParams, SuiteReport,
};
pub use format::{parse, serialize, FormatError};
pub use gf2::{BitMatrix, BitVec, Gf2Error, Subquotient, Subspace};
pub use knotcx::{
    Degree, Generator, KnotComplex, KnotError, Level, RankReport, RawComplex, SliceComplex,
    SliceKind, Violation,
};
pub use surgery::{
    build_cone, epsilon, epsilons, glue, hf_ranks, hfk_rank_reduced, hfk_ranks, is_simple,
    large_surgery_ranks, upsilon, ConeComplex, Epsilon, GluedComplex, LargeSurgeryRanks,
    Simplicity, Slot, SurgeryError, Upsilon,
};
