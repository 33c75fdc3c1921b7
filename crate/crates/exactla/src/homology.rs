use rayon::prelude::*;

use crate::error::{ExactLaError, Result};
use crate::matrix::SparseIntMatrix;
use crate::rank::rank_mod_p;
use crate::snf::{smith_normal_form_with, ElementaryDivisors, SnfOptions};

/// Large word-sized primes used to certify ranks.
pub const CERT_PRIMES: [u64; 3] = [2_147_483_647, 2_147_483_629, 2_147_483_587];

#[derive(Clone, Debug)]
pub struct HomologyOptions {
    pub snf: SnfOptions,
    pub cert_primes: Vec<u64>,
    /// Check `d_k * d_{k+1} = 0` exactly before computing anything.
    pub check_composition: bool,
}

impl Default for HomologyOptions {
    fn default() -> Self {
        HomologyOptions {
            snf: SnfOptions::default(),
            cert_primes: CERT_PRIMES.to_vec(),
            check_composition: true,
        }
    }
}

/// Homology at the middle term of `V_{k+1} --d_{k+1}--> V_k --d_k--> V_{k-1}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Homology {
    pub betti: usize,
    /// Invariant factors of `d_{k+1}`; the nontrivial ones are the torsion
    /// subgroup of `H_k`.
    pub torsion: ElementaryDivisors,
    pub rank_in: usize,
    pub rank_out: usize,
}

pub fn homology_of_pair(d_k: &SparseIntMatrix, d_k_plus_1: &SparseIntMatrix) -> Result<Homology> {
    homology_of_pair_with(d_k, d_k_plus_1, &HomologyOptions::default())
}

pub fn homology_of_pair_with(
    d_k: &SparseIntMatrix,
    d_k_plus_1: &SparseIntMatrix,
    opts: &HomologyOptions,
) -> Result<Homology> {
    let dim = d_k.cols();
    if d_k_plus_1.rows() != dim {
        return Err(ExactLaError::DimensionMismatch(format!(
            "d_k has {} columns but d_(k+1) has {} rows",
            dim,
            d_k_plus_1.rows()
        )));
    }
    if opts.check_composition {
        let prod = d_k.mul(d_k_plus_1)?;
        if let Some((r, c, v)) = prod.entries().first() {
            return Err(ExactLaError::NonzeroComposition {
                row: *r,
                col: *c,
                value: v.to_string(),
            });
        }
    }

    let (torsion, out_ranks) = rayon::join(
        || smith_normal_form_with(d_k_plus_1, &opts.snf),
        || {
            opts.cert_primes
                .par_iter()
                .map(|&p| (p, rank_mod_p(d_k, p), rank_mod_p(d_k_plus_1, p)))
                .collect::<Vec<_>>()
        },
    );
    let torsion = torsion?;
    for &(p, _, r_in) in &out_ranks {
        if torsion.rank_mod(p) != r_in {
            return Err(ExactLaError::DimensionMismatch(format!(
                "rank certification failed at p = {p}: elimination gives {r_in}, invariant factors give {}",
                torsion.rank_mod(p)
            )));
        }
    }

    let rank_out = if d_k.is_zero() {
        0
    } else {
        let ranks: Vec<usize> = out_ranks.iter().map(|x| x.1).collect();
        if !ranks.is_empty() && ranks.iter().all(|&r| r == ranks[0]) {
            ranks[0]
        } else {
            smith_normal_form_with(d_k, &opts.snf)?.rank()
        }
    };
    let rank_in = torsion.rank();
    let betti = dim
        .checked_sub(rank_out + rank_in)
        .ok_or_else(|| ExactLaError::DimensionMismatch("ranks exceed chain dimension".into()))?;
    Ok(Homology {
        betti,
        torsion,
        rank_in,
        rank_out,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigUint;

    #[test]
    fn zero_maps_give_free_homology() {
        let d_k = SparseIntMatrix::zeros(0, 4);
        let d_k1 = SparseIntMatrix::zeros(4, 0);
        let h = homology_of_pair(&d_k, &d_k1).unwrap();
        assert_eq!(h.betti, 4);
        assert!(h.torsion.is_torsion_free());
    }

    #[test]
    fn multiplication_by_two() {
        let d_k = SparseIntMatrix::zeros(0, 1);
        let d_k1 = SparseIntMatrix::from_dense(&[[2]]);
        let h = homology_of_pair(&d_k, &d_k1).unwrap();
        assert_eq!(h.betti, 0);
        assert_eq!(h.torsion.torsion(), &[BigUint::from(2u32)]);
    }

    #[test]
    fn nonzero_composition_is_rejected() {
        let d_k = SparseIntMatrix::from_dense(&[[1]]);
        let d_k1 = SparseIntMatrix::from_dense(&[[1]]);
        assert!(matches!(
            homology_of_pair(&d_k, &d_k1),
            Err(ExactLaError::NonzeroComposition { .. })
        ));
    }

    #[test]
    fn circle_boundary() {
        // triangle boundary: 3 vertices, 3 edges, no 2-cells
        let d1 = SparseIntMatrix::from_dense(&[[-1, 0, 1], [1, -1, 0], [0, 1, -1]]);
        let h1 = homology_of_pair(&d1, &SparseIntMatrix::zeros(3, 0)).unwrap();
        assert_eq!(h1.betti, 1);
        let h0 = homology_of_pair(&SparseIntMatrix::zeros(0, 3), &d1).unwrap();
        assert_eq!(h0.betti, 1);
        assert!(h0.torsion.is_torsion_free());
    }
}
