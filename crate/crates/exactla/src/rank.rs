use num_bigint::BigInt;
use num_traits::ToPrimitive;

use crate::elim::{Eliminator, Fp};
use crate::matrix::SparseIntMatrix;

/// Rank of `m` over the field with `p` elements.
///
/// `p` must be prime; values are reduced into `[0, p)` before a sparse
/// Markowitz elimination.
pub fn rank_mod_p(m: &SparseIntMatrix, p: u64) -> usize {
    assert!(p >= 2, "modulus must be a prime");
    let pb = BigInt::from(p);
    let mut rows: Vec<Vec<(u32, u64)>> = vec![Vec::new(); m.rows()];
    for (r, c, v) in m.entries() {
        let mut x = v % &pb;
        if x < BigInt::from(0) {
            x += &pb;
        }
        let x = x.to_u64().expect("residue fits in u64");
        if x != 0 {
            rows[*r].push((*c as u32, x));
        }
    }
    let mut e = Eliminator::new(Fp(p), m.cols(), rows);
    // every nonzero value is a unit, so this runs to completion
    let _ = e.run(None, |_| false);
    e.pivots
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_has_full_rank() {
        assert_eq!(rank_mod_p(&SparseIntMatrix::identity(3), 5), 3);
    }

    #[test]
    fn even_matrix_vanishes_mod_two() {
        let m = SparseIntMatrix::from_dense(&[[2, 4], [6, 8]]);
        assert_eq!(rank_mod_p(&m, 2), 0);
        assert_eq!(rank_mod_p(&m, 3), 2);
    }

    #[test]
    fn negative_entries_reduce() {
        let m = SparseIntMatrix::from_dense(&[[1, -1], [-1, 1]]);
        assert_eq!(rank_mod_p(&m, 7), 1);
    }

    #[test]
    fn large_prime_modulus() {
        let m = SparseIntMatrix::from_dense(&[[3, 1, 0], [1, 3, 1], [0, 1, 3]]);
        assert_eq!(rank_mod_p(&m, 2_147_483_647), 3);
        // det = 21, so the rank drops at 3 and 7
        assert_eq!(rank_mod_p(&m, 7), 2);
        assert_eq!(rank_mod_p(&m, 3), 2);
    }
}
