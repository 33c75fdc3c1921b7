use std::collections::BTreeSet;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use vk_core::algebra::{field, Elt};
use vk_core::voronoi::perfect::gram_determinant;
use vk_core::voronoi::{cell_complex, enumerate_perfect_forms, isometries, Configuration, FormSpace, OMat, Vector};
use vk_oracles::{box_minimal_vectors, unimodular_box};

fn space(label: &str, n: usize) -> FormSpace {
    FormSpace::new(field(label).unwrap(), n).unwrap()
}

fn rat(a: i64, b: i64) -> BigRational {
    BigRational::new(a.into(), b.into())
}

/// (number of minimal vectors, det / min^n) per class.
fn fingerprints(label: &str, n: usize) -> BTreeSet<(usize, BigRational)> {
    let s = space(label, n);
    enumerate_perfect_forms(&s, 50)
        .unwrap()
        .iter()
        .map(|f| {
            let scale = f.minimum.pow(f.point.gram.len() as i32);
            (f.minimal_vectors.len(), gram_determinant(f) / scale)
        })
        .collect()
}

#[test]
fn perfect_form_classes_over_q() {
    // root lattices: A2, A3, then D4 and A4
    assert_eq!(fingerprints("Q", 2), BTreeSet::from([(6, rat(3, 4))]));
    assert_eq!(fingerprints("Q", 3), BTreeSet::from([(12, rat(1, 2))]));
    assert_eq!(fingerprints("Q", 4), BTreeSet::from([(24, rat(1, 4)), (20, rat(5, 16))]));
}

#[test]
fn minimal_vectors_agree_with_box_search() {
    for n in 2..=4 {
        let s = space("Q", n);
        for f in enumerate_perfect_forms(&s, 50).unwrap() {
            let den = f.point.gram.iter().flatten().fold(BigInt::one(), |a, x| num_integer::Integer::lcm(&a, x.denom()));
            let g: Vec<Vec<i64>> = f
                .point
                .gram
                .iter()
                .map(|r| r.iter().map(|x| i64::try_from((x * BigRational::from_integer(den.clone())).to_integer()).unwrap()).collect())
                .collect();
            let reach = f.minimal_vectors.iter().flatten().map(|x| x.abs()).max().unwrap();
            let (m, vs) = box_minimal_vectors(&g, reach + 1);
            assert_eq!(BigRational::new(m.into(), den.clone()), f.minimum);
            let mut want: Vec<Vector> = vs;
            want.sort();
            assert_eq!(want, f.minimal_vectors);
        }
    }
}

/// Brute-force search of a matrix with small entries carrying one ray set
/// onto another; independent of the production isometry search.
fn box_equivalent(s: &FormSpace, a: &[Vector], b: &[Vector], entries: &[Elt]) -> bool {
    let n = s.n;
    let norm = |vs: &[Vector]| -> BTreeSet<Vector> { vs.iter().map(|v| s.normalize_ray(v)).collect() };
    let target = norm(b);
    let total = n * n;
    let mut idx = vec![0usize; total];
    loop {
        let g: OMat = (0..n).map(|i| (0..n).map(|j| entries[idx[i * n + j]].clone()).collect()).collect();
        let det = vk_core::voronoi::isometry::omat_det(s, &g);
        if s.field.is_unit(&det) && norm(&a.iter().map(|v| s.mat_vec(&g, v)).collect::<Vec<_>>()) == target {
            return true;
        }
        let mut i = 0;
        while i < total && idx[i] + 1 == entries.len() {
            idx[i] = 0;
            i += 1;
        }
        if i == total {
            return false;
        }
        idx[i] += 1;
    }
}

#[test]
fn farey_triangle_is_the_top_cell() {
    let s = space("Q", 2);
    let fan = cell_complex(&s).unwrap();
    assert_eq!(fan.cells[2].len(), 1);
    let top = &fan.cells[2][0];
    let farey: Vec<Vector> = vec![vec![1, 0], vec![0, 1], vec![1, 1]];
    assert_eq!(top.vectors.len(), 3);
    let entries: Vec<Elt> = (-2..=2).map(|x| vec![x]).collect();
    assert!(box_equivalent(&s, &top.vectors, &farey, &entries));
    let a = Configuration::new(&s, top.vectors.clone()).unwrap();
    let b = Configuration::new(&s, farey).unwrap();
    assert!(!isometries(&s, &a, &b, true, 100_000).unwrap().is_empty());
    // the box search sees every unimodular matrix with entries in [-1, 1]
    let small = unimodular_box(2, 1);
    assert!(small.iter().any(|g| *g == vec![vec![0, 1], vec![1, 0]]));
}

#[test]
fn octahedron_is_the_top_cell_over_gaussian_integers() {
    let s = space("Q(sqrt-1)", 2);
    let fan = cell_complex(&s).unwrap();
    assert_eq!(fan.top_dim(), 3);
    assert_eq!(fan.cells[3].len(), 1);
    let top = &fan.cells[3][0];
    assert_eq!(top.vectors.len(), 6);
    // cusps inf, 0, 1, i, 1+i, (1+i)/2 = 1/(1-i) as primitive (a, c) with x = (re, im)
    let oct: Vec<Vector> = vec![
        vec![1, 0, 0, 0],
        vec![0, 0, 1, 0],
        vec![1, 0, 1, 0],
        vec![0, 1, 1, 0],
        vec![1, 1, 1, 0],
        vec![1, 0, 1, -1],
    ];
    let entries: Vec<Elt> = (-1..=1).flat_map(|a| (-1..=1).map(move |b| vec![a, b])).collect();
    assert!(box_equivalent(&s, &top.vectors, &oct, &entries));
    // an octahedron: 8 triangular facets, all in one orbit
    assert_eq!(top.facets.len(), 8);
    assert!(top.facets.iter().all(|f| f.orbit == 0));
    assert_eq!(fan.orbit_counts(), vec![0, 1, 1, 1]);
}

fn random_elt(rng: &mut ChaCha8Rng, m: usize, r: i64) -> Elt {
    (0..m).map(|_| rng.gen_range(-r..=r)).collect()
}

fn random_unimodular(s: &FormSpace, rng: &mut ChaCha8Rng) -> OMat {
    let k = s.field;
    let n = s.n;
    let mut g: OMat = (0..n).map(|i| (0..n).map(|j| if i == j { k.one() } else { k.zero() }).collect()).collect();
    for _ in 0..rng.gen_range(1..6) {
        let i = rng.gen_range(0..n);
        let mut j = rng.gen_range(0..n);
        while j == i {
            j = rng.gen_range(0..n);
        }
        let a = random_elt(rng, s.m, 2);
        // row_i += a row_j, then a random unit on a random row
        let rj = g[j].clone();
        for (x, y) in g[i].iter_mut().zip(&rj) {
            *x = k.add(x, &k.mul(&a, y));
        }
        let units = k.roots_of_unity();
        let u = &units[rng.gen_range(0..units.len())];
        let r = rng.gen_range(0..n);
        for x in g[r].iter_mut() {
            *x = k.mul(u, x);
        }
    }
    g
}

#[test]
fn q_map_is_equivariant() {
    let mut rng = ChaCha8Rng::seed_from_u64(0x51ed);
    let cases = [("Q", 2), ("Q", 3), ("Q", 4), ("Q(sqrt-1)", 2), ("Q(sqrt-3)", 2), ("Q(sqrt-2)", 3), ("Q(sqrt-7)", 2), ("Q(zeta5)", 2)];
    let mut checked = 0;
    for t in 0..1000 {
        let (label, n) = cases[t % cases.len()];
        let s = space(label, n);
        let g = random_unimodular(&s, &mut rng);
        assert!(s.field.is_unit(&vk_core::voronoi::isometry::omat_det(&s, &g)));
        let mut x: Vec<Elt> = (0..n).map(|_| random_elt(&mut rng, s.m, 5)).collect();
        if x.iter().all(|e| s.field.is_zero(e)) {
            x[0] = s.field.one();
        }
        let gx: Vec<Elt> = s.split(&s.mat_vec(&g, &s.flatten(&x)));
        assert_eq!(s.q_map(&gx).unwrap(), s.act(&g, &s.q_map(&x).unwrap()));
        checked += 1;
    }
    assert_eq!(checked, 1000);
}

#[test]
fn q_map_rejects_zero_and_is_hermitian() {
    let s = space("Q(sqrt-1)", 2);
    assert!(s.q_map(&[vec![0, 0], vec![0, 0]]).is_err());
    let h = s.q_map(&[vec![1, 2], vec![3, -1]]).unwrap();
    assert_eq!(h, s.conj_transpose(&h));
    // x x^* has entries x_i conj(x_j): (1+2i)(3+i) = 1+7i
    assert_eq!(h[0][1], vec![1, 7]);
}

#[test]
fn stabilizers_are_groups_with_a_character() {
    for (label, n) in [("Q", 2), ("Q", 3), ("Q(sqrt-1)", 2), ("Q(sqrt-3)", 2)] {
        let s = space(label, n);
        let fan = cell_complex(&s).unwrap();
        for cell in fan.cells.iter().flatten() {
            let st: BTreeSet<&OMat> = cell.stabilizer.iter().collect();
            assert_eq!(st.len(), cell.stabilizer.len());
            let id: OMat = (0..n).map(|i| (0..n).map(|j| if i == j { s.field.one() } else { s.field.zero() }).collect()).collect();
            assert!(st.contains(&id));
            for (a, oa) in cell.stabilizer.iter().zip(&cell.orientation) {
                for (b, ob) in cell.stabilizer.iter().zip(&cell.orientation) {
                    let ab = s.mat_mul(a, b);
                    let pos = cell.stabilizer.iter().position(|h| *h == ab).expect("closed under products");
                    assert_eq!(cell.orientation[pos], oa * ob);
                }
            }
            assert_eq!(cell.orientation_sign(&s, &id).unwrap(), 1);
        }
    }
}

#[test]
fn minus_identity_fixes_every_cell_orientation() {
    let s = space("Q", 2);
    let fan = cell_complex(&s).unwrap();
    let minus: OMat = vec![vec![vec![-1], vec![0]], vec![vec![0], vec![-1]]];
    for cell in fan.cells.iter().flatten() {
        assert_eq!(cell.orientation_sign(&s, &minus).unwrap(), 1);
    }
    // a ray transposition of the Farey triangle is odd
    let top = &fan.cells[2][0];
    let odd = top.stabilizer.iter().zip(&top.orientation).filter(|(_, &o)| o < 0).count();
    assert_eq!(odd * 2, top.stabilizer.len());
    let swap: OMat = vec![vec![vec![0], vec![1]], vec![vec![1], vec![0]]];
    if top.stabilizer.contains(&swap) {
        assert_eq!(cell_sign(&s, top, &swap), -1);
    }
}

fn cell_sign(s: &FormSpace, c: &vk_core::voronoi::CellOrbit, g: &OMat) -> i8 {
    c.orientation_sign(s, g).unwrap()
}

#[test]
fn facets_are_images_of_lower_orbits() {
    for (label, n) in [("Q", 3), ("Q(sqrt-1)", 2), ("Q(sqrt-2)", 2)] {
        let s = space(label, n);
        let fan = cell_complex(&s).unwrap();
        for d in 1..fan.cells.len() {
            for cell in &fan.cells[d] {
                let own: BTreeSet<Vector> = cell.vectors.iter().map(|v| s.normalize_ray(v)).collect();
                for f in &cell.facets {
                    let tau = &fan.cells[d - 1][f.orbit];
                    assert_eq!(tau.dim + 1, cell.dim);
                    for v in &tau.vectors {
                        assert!(own.contains(&s.normalize_ray(&s.mat_vec(&f.gamma, v))));
                    }
                    assert!(f.sign == 1 || f.sign == -1);
                }
            }
        }
    }
}

#[test]
fn gl3_orbit_counts() {
    // faces of the A3 simplex meeting the interior, modulo its symmetry:
    // bases (1), 4-cycles and triangle-plus-edge (2), 5 of the 6 roots (1), all (1)
    let s = space("Q", 3);
    let fan = cell_complex(&s).unwrap();
    assert_eq!(fan.orbit_counts(), vec![0, 0, 1, 2, 1, 1]);
    assert_eq!(fan.cells[5][0].stabilizer.len(), 48);
}

#[test]
fn gl4_orbit_counts() {
    let s = space("Q", 4);
    let fan = cell_complex(&s).unwrap();
    assert_eq!(fan.orbit_counts(), vec![0, 0, 0, 1, 3, 4, 4, 2, 2, 2]);
}

#[test]
fn perfect_forms_are_positive_with_unit_minimum() {
    let s = space("Q(sqrt-1)", 2);
    for f in enumerate_perfect_forms(&s, 10).unwrap() {
        assert!(vk_core::voronoi::lattice::is_positive_definite(&f.point.gram));
        assert!(!f.minimum.is_zero());
        assert!(vk_core::voronoi::is_perfect(&s, &f.point).unwrap());
    }
}
