//! Symmetry fractionalization in quantum double PEPS.
//!
//! The crate classifies how a global symmetry `Q` can act on the anyons of a
//! discrete gauge theory with group `G` (as group extensions of `Q` by `G`),
//! builds the corresponding symmetric PEPS, and evaluates local order
//! parameters that detect the fractionalization class, either analytically,
//! through a compiled loop expression, or by brute-force contraction.

pub mod character;
pub mod classes;
pub mod group;
pub mod rep;

pub use classes::ConjugacyClasses;
pub use group::{automorphisms, is_isomorphic, preset, Automorphism, FiniteGroup, GroupError};
pub use character::{CharacterError, CharacterTable, Irrep};
pub use rep::{CMatrix, RepError, Representation};
pub mod extension;
pub mod peps;
pub mod scenarios;
pub mod trs;
pub mod verify;
