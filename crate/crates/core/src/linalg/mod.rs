//! Exact linear algebra over the rationals and prime fields.

mod cohomology;
mod field;
mod matrix;
mod sparse;

pub use cohomology::{cohomology_data, cohomology_dim, induced_map, ChainMapSlot, CohomologyData};
pub use field::{is_prime, Field, FieldSpec, PrimeField, Rational, Rationals};
pub use matrix::ExactMatrix;
pub use sparse::SparseMatrix;
