//! Base fields from a fixed catalog, ideals of their rings of integers,
//! residue rings and zeta values.

pub mod field;
pub mod ideal;
pub mod poly;
pub mod residue;
pub mod zeta;

pub use field::{field, Elt, NumberField};
pub use ideal::{ideal_factor, ideals_in_norm_range, ideals_of_norm, primes_above, OIdeal, PrimeIdeal};
pub use residue::ResidueRing;
pub use zeta::{dedekind_zeta, regulator, riemann_zeta, unit_index, ZetaValue};
