//! Spherical 2-design orbits of finite orthogonal group actions.
//!
//! The crate enumerates a finite matrix group from generators, splits its
//! representation into isotypic components of type ℝ, ℂ or ℍ, identifies
//! each component with a space of D-matrices, and uses that structure to
//! verify, classify and construct orbits whose second moment is isotropic.

pub mod construct;
pub mod dalg;
pub mod design;
pub mod error;
pub mod fixtures;
pub mod group;
pub mod io;
pub mod linalg;
pub mod repdec;
pub mod schur;

pub use error::{Error, Result};
