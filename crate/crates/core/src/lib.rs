//! Number fields and their integer rings, perfect Hermitian forms, the
//! Voronoi-Koecher cell complex, equivariant chain complexes for congruence
//! subgroups, and the analytic limit constants that homology growth is
//! compared against.

pub mod algebra;
pub mod analytics;
pub mod complex;
pub mod error;
pub mod linalg;
pub mod voronoi;

pub use error::{CoreError, Result};
