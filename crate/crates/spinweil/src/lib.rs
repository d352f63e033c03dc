//! Exact multilinear algebra for spin representations attached to abelian
//! varieties: Clifford algebras of `V = H^1(X) + H^1(X^)`, pure spinors and
//! secant planes, the Igusa quartic, Weil-type hermitian forms, the Chevalley
//! and Orlov cohomological isomorphisms, theta-ring Chern characters, and a
//! Dolbeault model for polyvector contractions.

pub mod chevalley;
pub mod clifford;
pub mod error;
pub mod exterior;
pub mod hodgemodel;
pub mod igusa;
pub mod json;
pub mod lattice;
pub mod linalg;
pub mod scalars;
pub mod spinors;
pub mod thetaring;
pub mod weil;

pub use error::{Error, Result};
pub use scalars::{QuadExt, Rat, Scalar};
