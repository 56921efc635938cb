//! One-dimensional few-particle quantum simulator built on exact Gaussian
//! wavepacket algebra.
//!
//! The crate models physics relative to quantum reference frames: a particle
//! of finite mass is promoted to the role of observer, the state is rewritten
//! in centre-of-mass plus relative coordinates, and the inaccessible
//! centre of mass is traced out. Everything downstream of that trace
//! (purities, interference fringes, detector statistics, shift-operator
//! phase estimates) is computed in closed form from Gaussian overlaps, so
//! grids only ever appear for rendering and in independent test oracles.
//!
//! Module map:
//! - [`packets`]: Gaussian packets, superposed product states, free
//!   evolution and Weyl shifts.
//! - [`canon`]: linear canonical coordinate machinery (centre-of-mass and
//!   relative maps, conjugate operator sets, commutators, exact vs
//!   approximate state transformation).
//! - [`reduce`]: partial traces, reduced-density diagnostics, shift-operator
//!   expectation values.
//! - [`scenarios`]: turn-key reproductions of the interferometer, quantum
//!   rocket, third-particle and external-frame thought experiments.
//!
//! The crate is `no_std` (with `alloc`); all IO lives in the companion
//! `qref` crate.

#![cfg_attr(not(test), no_std)]

extern crate alloc;

pub mod canon;
pub mod error;
mod linalg;
pub mod packets;
pub mod reduce;
pub mod scenarios;

pub use canon::{
    cm_relative_map, commutator, conjugate_momenta, conjugate_positions, relative_momentum_forms,
    transform_state, ExactTransformReport, LinearCoordinateMap, LinearPhaseSpaceForm,
    TransformMode, TransformOutcome,
};
pub use error::{Error, Result};
pub use packets::{
    apply_weyl, evolve_free, gram_and_normalize, Branch, CoordinateTag, GaussianPacket,
    MassConfig, SuperposedState, WeylShift,
};
pub use reduce::{
    coherence_coefficient, detector_probabilities, expectation_weyl, fringe_profile,
    mirror_probabilities, partial_trace, purity, visibility, FringeProfile,
    GaussianMixtureOperator, GridSpec, MixtureTerm,
};
pub use scenarios::{
    appendix_analysis, run_frames, run_interferometer, run_rocket, run_third_particle,
    AppendixConfig, FrameF2, InterferometerConfig, InterferometerSetup, RocketConfig,
    ScenarioReport, SweepRow, SweepTable, ThirdParticleConfig,
};
