//! Local topology of planar incompressible flows near degenerate singular
//! points.
//!
//! The crate works on exact polynomial vector fields `(u, v)` and covers:
//!
//! * [`vecfield`]: representation, evaluation, frame changes and symmetry tests;
//! * [`singular`]: root isolation, Jacobian classification and the degenerate
//!   invariants `(α, β, λ, k, n)` with their index case;
//! * [`index`]: winding number of a field along closed curves;
//! * [`bifurcation`]: prediction and numerical verification of the local
//!   structural bifurcation of a first-order family `u⁰ + (t − t₀) u¹`;
//! * [`topology`]: streamlines, separatrices and separatrix-graph signatures.
//!
//! Everything here is `no_std` with `alloc`; file formats and the command line
//! live in the `flowtopo` crate.
#![no_std]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod bifurcation;
pub mod geom;
pub mod index;
pub mod poly;
pub mod singular;
pub mod topology;
pub mod vecfield;

mod math;

pub use bifurcation::{
    branch_asymptotics, check_generic_membership, decide, extract_perturbation, predict, verify,
    BifurcationError, BifurcationReport, Branch, BranchLabel, Decision, GenericCondition,
    GenericMembership, PerturbationData, Prediction, Regime, Symmetry, Verdict, VerifyOptions,
};
pub use geom::{Mat2, Rect, Vec2};
pub use index::{index_sum, winding_index, IndexError, IndexResult, WindingOptions};
pub use poly::Poly;
pub use singular::{
    classify_case, classify_nondegenerate, extract_degeneracy, find_singular_points,
    make_normal_form, CaseLabel, DegeneracyData, ExtractOptions, Invariants, PointIndex,
    PointKind, SearchOptions, SingularError, SingularPoint,
};
pub use topology::{
    equivalent, integrate_streamline, separatrices, signature, Orbit, OrbitEnd, SignatureOptions,
    StreamlineOptions, TopologyError, TopologySignature,
};
pub use vecfield::{DivergenceReport, FieldError, Frame, PolyVectorField, TimeFamily};
