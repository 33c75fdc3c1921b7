use num_bigint::BigInt;
use num_traits::ToPrimitive;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use vk_core::algebra::{field, ideals_of_norm, OIdeal};
use vk_core::complex::{assemble_complex, gamma0_cosets, orientation_character, voronoi_homology, CosetSpace, VoronoiComplex};
use vk_core::voronoi::{cell_complex, Fan, FormSpace, OMat};
use vk_exactla::rank_mod_p;
use vk_oracles::{homology, projective_count};

fn fan(label: &str, n: usize) -> (FormSpace, Fan) {
    let s = FormSpace::new(field(label).unwrap(), n).unwrap();
    let f = cell_complex(&s).unwrap();
    (s, f)
}

fn dense(c: &VoronoiComplex, k: usize) -> Vec<Vec<BigInt>> {
    c.boundary(k).to_dense()
}

fn levels(label: &str, max_norm: u64) -> Vec<OIdeal> {
    let k = field(label).unwrap();
    (1..=max_norm).flat_map(|m| ideals_of_norm(k, m)).collect()
}

#[test]
fn coset_counts_match_brute_force() {
    let q = field("Q").unwrap();
    for n in 2..=3 {
        let top = if n == 2 { 30 } else { 12 };
        for m in 1..=top {
            let c = gamma0_cosets(q, n, &OIdeal::from_integer(q, m as i64).unwrap()).unwrap();
            assert_eq!(c.index as u64, projective_count(n, m), "n={n} m={m}");
        }
    }
}

#[test]
fn gaussian_coset_counts() {
    // |P^1(O/n)| = N(n) prod (1 + 1/N(p))
    let k = field("Q(sqrt-1)").unwrap();
    for level in levels("Q(sqrt-1)", 50) {
        let c = gamma0_cosets(k, 2, &level).unwrap();
        let mut num = level.norm;
        let mut den = 1;
        for (p, _) in vk_core::algebra::ideal_factor(k, &level).unwrap() {
            num *= p.ideal.norm + 1;
            den *= p.ideal.norm;
        }
        assert_eq!(c.index as u64, num / den);
    }
}

#[test]
fn coset_action_permutes_points() {
    let (s, f) = fan("Q(sqrt-1)", 2);
    let k = s.field;
    for level in levels("Q(sqrt-1)", 26) {
        let c = gamma0_cosets(k, 2, &level).unwrap();
        for cell in f.cells.iter().flatten() {
            for g in &cell.stabilizer {
                let mut img: Vec<usize> = (0..c.index).map(|x| c.act(x, g).unwrap()).collect();
                img.sort();
                assert_eq!(img, (0..c.index).collect::<Vec<_>>());
            }
        }
        // locate inverts point on the bottom rows
        for x in 0..c.index {
            let rows = c.point(x);
            if rows.len() == 1 {
                assert_eq!(c.locate(&rows[0]).unwrap(), x);
            }
        }
    }
}

/// Generator counts from the full stabilizer (not a generating set): a
/// coset orbit survives unless some element fixes a point and reverses
/// the orientation.
fn oracle_counts(f: &Fan, c: &CosetSpace) -> Vec<usize> {
    f.cells
        .iter()
        .map(|orbits| {
            let mut total = 0;
            for cell in orbits {
                let mut seen = vec![false; c.index];
                for x in 0..c.index {
                    if seen[x] {
                        continue;
                    }
                    let mut keep = true;
                    for (g, &o) in cell.stabilizer.iter().zip(&cell.orientation) {
                        let y = c.act(x, g).unwrap();
                        seen[y] = true;
                        if y == x && o < 0 {
                            keep = false;
                        }
                    }
                    if keep {
                        total += 1;
                    }
                }
            }
            total
        })
        .collect()
}

#[test]
fn generator_counts_match_full_stabilizer_oracle() {
    for (label, n, max) in [("Q", 2, 30), ("Q(sqrt-1)", 2, 26), ("Q", 3, 6)] {
        let (s, f) = fan(label, n);
        for level in levels(label, max) {
            let c = gamma0_cosets(s.field, n, &level).unwrap();
            let vc = assemble_complex(&f, &c).unwrap();
            assert_eq!(vc.ranks(), oracle_counts(&f, &c), "{label} level {level}");
        }
    }
}

#[test]
fn level_one_gl2_over_q_is_zero() {
    // the edge and the Farey triangle both carry orientation reversing stabilizers
    let (s, f) = fan("Q", 2);
    let c = gamma0_cosets(s.field, 2, &OIdeal::unit(s.field)).unwrap();
    assert_eq!(c.index, 1);
    let vc = assemble_complex(&f, &c).unwrap();
    assert_eq!(vc.ranks(), vec![0, 0, 0]);
    for k in 0..=2 {
        let (b, t) = voronoi_homology(&vc, k).unwrap();
        assert_eq!(b, 0);
        assert!(t.torsion().is_empty());
    }
}

#[test]
fn level_three_gl2_over_q() {
    // P^1(F_3) has 4 points; only one edge class survives
    let (s, f) = fan("Q", 2);
    let c = gamma0_cosets(s.field, 2, &OIdeal::from_integer(s.field, 3).unwrap()).unwrap();
    assert_eq!(c.index, 4);
    let vc = assemble_complex(&f, &c).unwrap();
    assert_eq!(vc.ranks(), vec![0, 1, 0]);
    assert_eq!(voronoi_homology(&vc, 1).unwrap().0, 1);
}

#[test]
fn orientation_character_basics() {
    let (s, f) = fan("Q", 2);
    let id: OMat = vec![vec![vec![1], vec![0]], vec![vec![0], vec![1]]];
    for cell in f.cells.iter().flatten() {
        assert_eq!(orientation_character(&s, &id, cell).unwrap(), 1);
    }
    let shear: OMat = vec![vec![vec![1], vec![5]], vec![vec![0], vec![1]]];
    assert!(orientation_character(&s, &shear, &f.cells[2][0]).is_err());
}

fn check_against_dense(vc: &VoronoiComplex) {
    let r = vc.ranks();
    for k in 0..=vc.top_dim() {
        let (betti, tor) = voronoi_homology(vc, k).unwrap();
        let dim_in = r.get(k + 1).copied().unwrap_or(0);
        let (ob, ot) = homology(&dense(vc, k), &dense(vc, k + 1), r[k], dim_in);
        assert_eq!(betti, ob, "betti at {k}");
        let got: Vec<BigInt> = tor.torsion().iter().map(|x| BigInt::from(x.clone())).collect();
        assert_eq!(got, ot, "torsion at {k}");
        // rank-nullity
        let rk = |m: &vk_exactla::SparseIntMatrix| rank_mod_p(m, 1_000_000_007);
        assert_eq!(betti, r[k] - rk(&vc.boundary(k)) - rk(&vc.boundary(k + 1)));
    }
}

#[test]
fn level_one_complexes_match_dense_oracle() {
    for (label, n) in [("Q", 2), ("Q(sqrt-1)", 2), ("Q", 3), ("Q(sqrt-2)", 2), ("Q(sqrt-3)", 2)] {
        let (s, f) = fan(label, n);
        let c = gamma0_cosets(s.field, n, &OIdeal::unit(s.field)).unwrap();
        let vc = assemble_complex(&f, &c).unwrap();
        check_against_dense(&vc);
    }
    // H^0 of GL_3(Z) and GL_2(Z[i]) in the top Voronoi degree
    let (s, f) = fan("Q", 3);
    let vc = assemble_complex(&f, &gamma0_cosets(s.field, 3, &OIdeal::unit(s.field)).unwrap()).unwrap();
    assert_eq!(voronoi_homology(&vc, 5).unwrap().0, 1);
}

#[test]
fn small_levels_match_dense_oracle() {
    for (label, n, max) in [("Q", 2, 20), ("Q(sqrt-1)", 2, 20), ("Q", 3, 4)] {
        let (s, f) = fan(label, n);
        for level in levels(label, max) {
            let vc = assemble_complex(&f, &gamma0_cosets(s.field, n, &level).unwrap()).unwrap();
            check_against_dense(&vc);
        }
    }
}

#[test]
fn boundary_squares_vanish() {
    for (label, n, max) in [("Q", 2, 30), ("Q(sqrt-1)", 2, 50), ("Q", 3, 8)] {
        let (s, f) = fan(label, n);
        for level in levels(label, max) {
            let vc = assemble_complex(&f, &gamma0_cosets(s.field, n, &level).unwrap()).unwrap();
            for k in 1..vc.top_dim() {
                assert!(vc.boundary(k).mul(&vc.boundary(k + 1)).unwrap().is_zero());
            }
        }
    }
}

#[test]
fn homology_is_invariant_under_coset_relabelling() {
    let mut rng = ChaCha8Rng::seed_from_u64(0xc05e7);
    let sample = [("Q", 2, 23u64), ("Q", 2, 30), ("Q(sqrt-1)", 2, 25), ("Q(sqrt-1)", 2, 29), ("Q(sqrt-1)", 2, 50), ("Q", 3, 7)];
    for (label, n, norm) in sample {
        let (s, f) = fan(label, n);
        for level in ideals_of_norm(s.field, norm).into_iter().take(2) {
            let c = gamma0_cosets(s.field, n, &level).unwrap();
            let mut perm: Vec<usize> = (0..c.index).collect();
            perm.shuffle(&mut rng);
            let a = assemble_complex(&f, &c).unwrap();
            let b = assemble_complex(&f, &c.clone().relabelled(&perm).unwrap()).unwrap();
            assert_eq!(a.ranks(), b.ranks());
            for k in 0..=a.top_dim() {
                let (ba, ta) = voronoi_homology(&a, k).unwrap();
                let (bb, tb) = voronoi_homology(&b, k).unwrap();
                assert_eq!(ba, bb);
                assert_eq!(ta.torsion(), tb.torsion());
            }
        }
    }
}

#[test]
fn relabelling_rejects_non_permutations() {
    let q = field("Q").unwrap();
    let c = gamma0_cosets(q, 2, &OIdeal::from_integer(q, 2).unwrap()).unwrap();
    assert!(c.clone().relabelled(&[0, 0, 1]).is_err());
    assert!(c.relabelled(&[0, 1]).is_err());
}

#[test]
fn mismatched_fan_and_cosets_are_rejected() {
    let (_, f) = fan("Q", 2);
    let q = field("Q").unwrap();
    let c = gamma0_cosets(q, 3, &OIdeal::unit(q)).unwrap();
    assert!(assemble_complex(&f, &c).is_err());
}

#[test]
fn known_gl3_level_torsion() {
    // H_3 of Gamma_0(49) in GL_3(Z): torsion 7
    let (s, f) = fan("Q", 3);
    let vc = assemble_complex(&f, &gamma0_cosets(s.field, 3, &OIdeal::from_integer(s.field, 49).unwrap()).unwrap()).unwrap();
    let (_, t) = voronoi_homology(&vc, 3).unwrap();
    assert_eq!(t.torsion_order().to_u64(), Some(7));
}
