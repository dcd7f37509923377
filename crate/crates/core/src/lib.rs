//! Exact symbolic workbench for étale groupoids of germs.
//!
//! Spaces are finite discrete sets or the Cantor space `Σ^ω`; open sets of
//! the latter are regular unions of cylinders. On top of the topology
//! engine sit partial homeomorphisms, finite inverse semigroups, germ
//! systems presenting groupoids, freeness analysis, the convolution algebra
//! of sections with scalar coefficients, and orbit representations.

#![allow(clippy::needless_range_loop)]

pub mod error;
pub mod freeness;
pub mod gallery;
pub mod groupoid;
pub mod orbit;
pub mod partial_map;
pub mod random;
pub mod report;
pub mod scalar;
pub mod scenario;
pub mod section;
pub mod selftest;
pub mod semigroup;
pub mod topology;

pub use error::{Error, Result};
