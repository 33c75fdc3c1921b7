use num_bigint::{BigInt, BigUint};
use num_traits::{One, Zero};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use vk_exactla::{
    homology_of_pair, rank_mod_p, smith_normal_form, smith_normal_form_with, SnfOptions, SparseIntMatrix,
};

fn to_dense(m: &SparseIntMatrix) -> Vec<Vec<BigInt>> {
    m.to_dense()
}

fn random_matrix(rng: &mut ChaCha8Rng, rows: usize, cols: usize, density: f64, range: i64) -> Vec<Vec<i64>> {
    (0..rows)
        .map(|_| {
            (0..cols)
                .map(|_| if rng.gen_bool(density) { rng.gen_range(-range..=range) } else { 0 })
                .collect()
        })
        .collect()
}

fn elementary_ops(rng: &mut ChaCha8Rng, n: usize, count: usize) -> Vec<Vec<i64>> {
    let mut u: Vec<Vec<i64>> = (0..n).map(|i| (0..n).map(|j| i64::from(i == j)).collect()).collect();
    if n < 2 {
        return u;
    }
    for _ in 0..count {
        let i = rng.gen_range(0..n);
        let mut j = rng.gen_range(0..n);
        while j == i {
            j = rng.gen_range(0..n);
        }
        match rng.gen_range(0..3) {
            0 => {
                let f = rng.gen_range(-2..=2);
                for k in 0..n {
                    u[i][k] += f * u[j][k];
                }
            }
            1 => u.swap(i, j),
            _ => {
                for k in 0..n {
                    u[i][k] = -u[i][k];
                }
            }
        }
    }
    u
}

fn dense_mul(a: &[Vec<i64>], b: &[Vec<i64>]) -> Vec<Vec<i64>> {
    let inner = b.len();
    let cols = b.first().map_or(0, |r| r.len());
    a.iter()
        .map(|r| (0..cols).map(|j| (0..inner).map(|k| r[k] * b[k][j]).sum()).collect())
        .collect()
}

fn chain_is_valid(divs: &[BigUint]) -> bool {
    divs.windows(2).all(|w| (&w[1] % &w[0]).is_zero())
}

#[test]
fn snf_is_invariant_under_unimodular_transformations() {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0001);
    for _ in 0..100 {
        let rows = rng.gen_range(1..=40);
        let cols = rng.gen_range(1..=40);
        let m = random_matrix(&mut rng, rows, cols, 0.3, 9);
        let u = elementary_ops(&mut rng, rows, 20);
        let v = elementary_ops(&mut rng, cols, 20);
        let umv = dense_mul(&dense_mul(&u, &m), &v);
        let a = smith_normal_form(&SparseIntMatrix::from_dense(&m));
        let b = smith_normal_form(&SparseIntMatrix::from_dense(&umv));
        assert_eq!(a, b);
        assert!(chain_is_valid(&a.divisors()));
    }
}

#[test]
fn snf_matches_textbook_oracle() {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0002);
    for _ in 0..60 {
        let rows = rng.gen_range(1..=15);
        let cols = rng.gen_range(1..=15);
        let m = SparseIntMatrix::from_dense(&random_matrix(&mut rng, rows, cols, 0.5, 6));
        let ours: Vec<BigInt> = smith_normal_form(&m).divisors().into_iter().map(BigInt::from).collect();
        assert_eq!(ours, vk_oracles::snf_diagonal(&to_dense(&m)));
    }
}

#[test]
fn sparse_and_dense_strategies_agree() {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0003);
    let sparse_first = SnfOptions {
        dense_density: 1.1,
        dense_max_cols: 0,
        ..SnfOptions::default()
    };
    let dense_first = SnfOptions {
        dense_density: 0.0,
        dense_max_cols: usize::MAX,
        ..SnfOptions::default()
    };
    for _ in 0..50 {
        let m = SparseIntMatrix::from_dense(&random_matrix(&mut rng, 25, 30, 0.15, 3));
        assert_eq!(
            smith_normal_form_with(&m, &sparse_first).unwrap(),
            smith_normal_form_with(&m, &dense_first).unwrap()
        );
    }
}

#[test]
fn rank_mod_p_matches_dense_elimination() {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0004);
    for t in 0..100 {
        let m = SparseIntMatrix::from_dense(&random_matrix(&mut rng, 30, 30, 0.1, 5));
        let p = [2, 3, 5, 7, 1009, 2_147_483_647][t % 6];
        assert_eq!(rank_mod_p(&m, p), vk_oracles::rank_mod_p(&to_dense(&m), p));
    }
}

#[test]
fn rank_mod_p_bounded_by_snf_rank_at_six_primes() {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0005);
    for _ in 0..50 {
        let m = SparseIntMatrix::from_dense(&random_matrix(&mut rng, 20, 24, 0.2, 9));
        let snf = smith_normal_form(&m);
        for p in [2u64, 3, 5, 7, 11, 1009] {
            let r = rank_mod_p(&m, p);
            assert!(r <= snf.rank());
            assert_eq!(r, snf.rank_mod(p), "p = {p}");
        }
    }
}

/// Random chain complex `C_{k+1} -> C_k -> C_{k-1}` with `d_k d_{k+1} = 0`
/// built as `d_k = A P`, `d_{k+1} = Q B` where `P Q = 0`.
fn random_complex(rng: &mut ChaCha8Rng) -> (Vec<Vec<i64>>, Vec<Vec<i64>>) {
    let dim = rng.gen_range(1..=8);
    let split = rng.gen_range(0..=dim);
    let out = rng.gen_range(0..=6);
    let inn = rng.gen_range(0..=6);
    // P projects onto the first `split` coordinates after a unimodular change,
    // Q lands in the remaining ones.
    let u = elementary_ops(rng, dim, 12);
    let uinv = invert_unimodular(&u);
    let a = random_matrix(rng, out, split, 0.6, 3);
    let b = random_matrix(rng, dim - split, inn, 0.6, 3);
    // d_k = [A | 0] U,  d_{k+1} = U^{-1} [0 ; B]
    let mut left: Vec<Vec<i64>> = a.iter().map(|r| {
        let mut r = r.clone();
        r.resize(dim, 0);
        r
    }).collect();
    if out == 0 {
        left = Vec::new();
    }
    let mut right: Vec<Vec<i64>> = vec![vec![0; inn]; split];
    right.extend(b);
    let d_k = if left.is_empty() { Vec::new() } else { dense_mul(&left, &u) };
    let d_k1 = dense_mul(&uinv, &right);
    (d_k, d_k1)
}

fn invert_unimodular(u: &[Vec<i64>]) -> Vec<Vec<i64>> {
    let n = u.len();
    let mut a: Vec<Vec<i64>> = u.to_vec();
    let mut inv: Vec<Vec<i64>> = (0..n).map(|i| (0..n).map(|j| i64::from(i == j)).collect()).collect();
    for c in 0..n {
        loop {
            let rows: Vec<usize> = (c..n).filter(|&r| a[r][c] != 0).collect();
            let piv = *rows.iter().min_by_key(|&&r| a[r][c].abs()).unwrap();
            a.swap(c, piv);
            inv.swap(c, piv);
            let mut clean = true;
            for r in 0..n {
                if r != c && a[r][c] != 0 {
                    let q = a[r][c].div_euclid(a[c][c]);
                    for k in 0..n {
                        a[r][k] -= q * a[c][k];
                        inv[r][k] -= q * inv[c][k];
                    }
                    if a[r][c] != 0 {
                        clean = false;
                    }
                }
            }
            if clean {
                break;
            }
        }
        if a[c][c] < 0 {
            for k in 0..n {
                a[c][k] = -a[c][k];
                inv[c][k] = -inv[c][k];
            }
        }
    }
    inv
}

#[test]
fn homology_matches_full_presentation_oracle_on_random_complexes() {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0006);
    for _ in 0..200 {
        let (dk, dk1) = random_complex(&mut rng);
        let dim = dk1.len();
        let inn = dk1.first().map_or(0, |r| r.len());
        let sk = if dk.is_empty() { SparseIntMatrix::zeros(0, dim) } else { SparseIntMatrix::from_dense(&dk) };
        let sk1 = if inn == 0 { SparseIntMatrix::zeros(dim, 0) } else { SparseIntMatrix::from_dense(&dk1) };
        let h = homology_of_pair(&sk, &sk1).unwrap();
        let (betti, torsion) = vk_oracles::homology(&to_dense(&sk), &to_dense(&sk1), dim, inn);
        assert_eq!(h.betti, betti);
        let ours: Vec<BigInt> = h.torsion.torsion().iter().cloned().map(BigInt::from).collect();
        assert_eq!(ours, torsion);
    }
}

#[test]
fn triple_format_round_trip() {
    let m = SparseIntMatrix::from_dense(&[[0, -3, 0], [7, 0, 1]]);
    let big = SparseIntMatrix::from_triplets(1, 1, [(0, 0, BigInt::from(10).pow(40) + BigInt::one())]).unwrap();
    for mat in [m, big] {
        let mut buf = Vec::new();
        mat.write_triples(&mut buf, &[("field", "Q".into())]).unwrap();
        let (back, meta) = SparseIntMatrix::read_triples(buf.as_slice()).unwrap();
        assert_eq!(back, mat);
        assert_eq!(meta, vec![("field".to_string(), "Q".to_string())]);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn divisibility_chain_always_holds(entries in proptest::collection::vec(-9i64..=9, 1..=64), cols in 1usize..=8) {
        let rows = entries.len().div_ceil(cols);
        let mut data = entries.clone();
        data.resize(rows * cols, 0);
        let dense: Vec<Vec<i64>> = data.chunks(cols).map(|c| c.to_vec()).collect();
        let ed = smith_normal_form(&SparseIntMatrix::from_dense(&dense));
        prop_assert!(chain_is_valid(&ed.divisors()));
        prop_assert_eq!(ed.rank(), vk_oracles::rank_q(&vk_oracles::dense_from_i64(&dense)));
    }

    #[test]
    fn transpose_preserves_invariant_factors(entries in proptest::collection::vec(-5i64..=5, 1..=36), cols in 1usize..=6) {
        let rows = entries.len().div_ceil(cols);
        let mut data = entries.clone();
        data.resize(rows * cols, 0);
        let dense: Vec<Vec<i64>> = data.chunks(cols).map(|c| c.to_vec()).collect();
        let m = SparseIntMatrix::from_dense(&dense);
        prop_assert_eq!(smith_normal_form(&m), smith_normal_form(&m.transpose()));
    }
}
