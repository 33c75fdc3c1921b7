//! Perfect Hermitian forms over the base field and the Koecher fan they
//! span: minimal vectors, the neighbor walk, facet descent and cell
//! stabilizers.

pub mod cells;
pub mod cone;
pub mod forms;
pub mod isometry;
pub mod lattice;
pub mod perfect;

pub use cells::{cell_complex, CellOrbit, FacetRef, Fan};
pub use forms::{FormPoint, FormSpace, OMat, Vector};
pub use isometry::{isometries, stabilizer, Configuration};
pub use lattice::{minimal_vectors, short_vectors};
pub use perfect::{enumerate_perfect_forms, is_perfect, PerfectForm};
