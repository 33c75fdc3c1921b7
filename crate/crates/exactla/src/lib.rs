//! Exact sparse integer linear algebra.
//!
//! Boundary matrices of cell complexes are stored as [`SparseIntMatrix`].
//! Ranks over prime fields come from sparse Markowitz elimination, invariant
//! factors from unit-pivot pre-elimination followed by a dense Smith normal
//! form on the remaining core, and [`homology_of_pair`] combines the two.

pub mod elim;
pub mod error;
pub mod factor;
pub mod homology;
pub mod matrix;
pub mod rank;
pub mod snf;

pub use error::{ExactLaError, Result};
pub use factor::{factor_integer, factor_torsion, is_probable_prime, Factorization};
pub use homology::{homology_of_pair, homology_of_pair_with, Homology, HomologyOptions, CERT_PRIMES};
pub use matrix::SparseIntMatrix;
pub use rank::rank_mod_p;
pub use snf::{smith_normal_form, smith_normal_form_with, ElementaryDivisors, SnfOptions};
