//! Hard unit squares on a `p × q` grid.
//!
//! The crate builds the discrete configuration complex of `n` unlabelled hard
//! squares, computes its integer homology through Smith normal form, runs a
//! Farley–Sabalka discrete gradient field over it, derives commutator
//! presentations of the fundamental group `B_{pq-2}(p×q)` through verified
//! Tietze moves, and certifies the HNN-over-RAAG description of the `q = 3`
//! groups with a Britton-reduction word-problem solver.
//!
//! Modules follow the pipeline:
//!
//! * [`grid`]: grid graph, square complex, configuration cells and boundaries.
//! * [`matrix`], [`homology`]: exact integer linear algebra and Betti numbers.
//! * [`morse`]: spanning trees, gradient fields, critical census, Morse homology.
//! * [`word`], [`presentation`]: free-group words and finite presentations.
//! * [`tietze`]: sound Tietze moves and the scripted simplification pipeline.
//! * [`raag`], [`hnn`]: RAAG normal forms, HNN extensions and certification.
//! * [`report`]: consolidated verification reports.

pub mod error;
pub mod families;
pub mod grid;
pub mod hnn;
pub mod homology;
pub mod matrix;
pub mod morse;
pub mod presentation;
pub mod raag;
pub mod report;
pub mod tietze;
pub mod word;

pub use error::{Error, Result};
