//! The Voronoi-Koecher chain complex of Gamma_0(n): coset enumeration on
//! bottom rows, orientation bookkeeping per cell orbit and sparse boundary
//! assembly with an exact d^2 = 0 gate.

pub mod assemble;
pub mod cosets;

pub use assemble::{assemble_complex, orientation_character, voronoi_homology, OrientedGenerator, VoronoiComplex};
pub use cosets::{gamma0_cosets, CosetSpace};
