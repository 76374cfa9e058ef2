//! Asymptotic lattices: synthetic generation, good labelling, and recovery
//! of the underlying chart from labelled joint spectra.
//!
//! An asymptotic lattice is a family of finite point sets
//! `L_ℏ = G_ℏ(ℏℤ² ∩ U) + O(ℏ^∞)` indexed by a decreasing sequence of `ℏ`,
//! where `G_ℏ = G₀ + ℏG₁ + …` is a smooth chart. The crate
//!
//! * generates lattices with known labels from polynomial charts ([`synth`]),
//! * labels each slice by a local walk and corrects the labels across slices
//!   so they vary coherently with `ℏ` ([`labelling`]),
//! * decides equivalence of labellings under `SL(2, ℤ) ⋉ ℤ²`
//!   ([`equivalence`]),
//! * fits the chart jet back from a labelled lattice and evaluates its
//!   Jacobian and the rotation number ([`recovery`]).
//!
//! The runnable programs in `examples/` walk through each step; the
//! `asylat` binary wraps the same operations in a command line ([`cli`]).

pub mod chart;
pub mod cli;
pub mod equivalence;
pub mod error;
pub mod geometry;
pub mod labelling;
pub mod lattice;
pub mod recovery;
pub mod spatial;
pub mod synth;

pub use chart::{ChartJet, PolyMap};
pub use equivalence::{labelling_equivalent, Equivalence, Witness};
pub use error::{Error, Result};
pub use geometry::{IMat2, Label, Mat2, Point, Rect};
pub use labelling::{label_sequence, label_single, LabellingConfig, SequenceConfig, SequenceOutcome};
pub use lattice::{AsymptoticLattice, LabelEntry, LabelMap, LatticeSample, LinearLabelling, Region};
pub use recovery::{fit_chart, jacobian_field, rotation_number, FitOptions, RecoveryReport};
pub use synth::{generate, GroundTruth, ModelSystem, NoiseModel};
