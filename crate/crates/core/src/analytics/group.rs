use serde::{Deserialize, Serialize};

use crate::algebra::field::{field, NumberField};
use crate::error::{CoreError, Result};

/// GL_n over the ring of integers of a catalog field, with the invariants
/// that govern torsion growth.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GroupDescriptor {
    pub field: String,
    pub n: usize,
    pub deficiency: i64,
    pub sym_dim: i64,
    pub torsion_primes: Vec<u64>,
    pub vcd_top_voronoi_degree: i64,
    pub cuspidal_top_voronoi_degree: i64,
}

/// Dimension of the symmetric space of GL_n over the archimedean places.
pub fn symmetric_space_dim(k: &NumberField, n: usize) -> i64 {
    let (r, s, n) = (k.r as i64, k.s as i64, n as i64);
    ((r + 2 * s) * n * n + r * n - 2) / 2
}

/// rank G - rank K summed over places, for the derived group SL_n.
pub fn deficiency(k: &NumberField, n: usize) -> i64 {
    let n = n as i64;
    k.r as i64 * (n - 1 - n / 2) + k.s as i64 * (n - 1)
}

fn is_prime(p: u64) -> bool {
    p >= 2 && (2..).take_while(|d| d * d <= p).all(|d| p % d != 0)
}

/// Primes that can divide the order of a finite subgroup of GL_n(O): an
/// element of order p needs the degree of Q(zeta_p) over the part of it
/// inside the base field to be at most n.
pub fn torsion_primes(k: &NumberField, n: usize) -> Vec<u64> {
    let deg = k.degree as u64;
    let disc = k.discriminant.unsigned_abs();
    (2..=n as u64 * deg + 1)
        .filter(|&p| is_prime(p))
        .filter(|&p| {
            let g = if deg > 1 && disc == p.pow(deg as u32 - 1) && (p - 1) % deg == 0 { deg } else { 1 };
            (p - 1) / g <= n as u64
        })
        .collect()
}

pub fn group_descriptor(k: &NumberField, n: usize) -> Result<GroupDescriptor> {
    if n == 0 {
        return Err(CoreError::InvalidInput("rank must be positive".into()));
    }
    let d = symmetric_space_dim(k, n);
    let delta = deficiency(k, n);
    let flat = (k.r + k.s) as i64 - 1;
    let ss = d - flat;
    let cusp_top = (ss + delta) / 2 + flat;
    Ok(GroupDescriptor {
        field: k.label.clone(),
        n,
        deficiency: delta,
        sym_dim: d,
        torsion_primes: torsion_primes(k, n),
        vcd_top_voronoi_degree: n as i64 - 1,
        cuspidal_top_voronoi_degree: d - cusp_top,
    })
}

impl GroupDescriptor {
    pub fn lookup(label: &str, n: usize) -> Result<Self> {
        group_descriptor(field(label)?, n)
    }

    pub fn number_field(&self) -> Result<&'static NumberField> {
        field(&self.field)
    }

    /// Cohomological degree matching a Voronoi homology degree.
    pub fn cohomological_degree(&self, voronoi: i64) -> i64 {
        self.sym_dim - voronoi
    }

    pub fn label(&self) -> String {
        format!("GL{}({})", self.n, self.field)
    }
}
