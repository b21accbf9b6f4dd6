//! Differential calculus on the Moyal algebra built from derivations.
//!
//! The crate works on the subalgebra of polynomial × plane-wave functions,
//! where the star product closes and is computed exactly. On top of it sit the
//! derivation algebras, connections and curvatures, their Z₂-graded
//! counterparts, and a one-loop evaluator for the infrared behaviour of the
//! vacuum polarisation.

pub mod config;
pub mod connections;
pub mod derivations;
pub mod element;
pub mod graded;
pub mod oneloop;
pub mod random;
pub mod error;
pub mod expr;
pub mod symplectic;
pub mod verify;

pub use connections::{Basis, ConnectionForm, CurvatureTable};
pub use derivations::{DerivationAlgebra, Generator, GeneratorCombination};
pub use element::{is_unitary, star_term, MoyalElement, Term, C64};
pub use error::{Error, Result};
pub use graded::{GradedAlgebra, GradedConnectionForm, GradedElement, GradedGenerator};
pub use expr::{format_element, parse_expression};
pub use symplectic::SymplecticStructure;
