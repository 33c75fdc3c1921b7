//! Closed-form invariants of the groups (deficiency, symmetric space
//! dimension, torsion primes, limit constants) and the classification of
//! computed torsion into torsion, congruence and exotic primes.

pub mod constants;
pub mod group;
pub mod reports;

pub use constants::{bv_limit, bv_limit_with, sl3_l2torsion, vol_so3, vol_su, BoundedReal};
pub use group::{deficiency, group_descriptor, symmetric_space_dim, torsion_primes, GroupDescriptor};
pub use reports::{
    classify_primes, euler_characteristic_series, filter_series, ratio_series, reference_for, shared_exotic_report, EulerPoint,
    LevelFilter, Ordering, PrimeTag, Reference, Series, SeriesPoint, TorsionReport,
};
