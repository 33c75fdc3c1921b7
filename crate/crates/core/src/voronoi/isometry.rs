use std::collections::{BTreeSet, HashSet};

use num_traits::Zero;

use super::forms::{FormSpace, OMat, Vector};
use crate::algebra::field::Elt;
use crate::error::{CoreError, Result};
use crate::linalg::Rat;

type KElt = Vec<Rat>;
type KMat = Vec<Vec<KElt>>;

/// Data attached to a set of vectors of O^n (taken up to roots of unity)
/// that is invariant under GL_n(O): the Hermitian products
/// `a_i^* S^{-1} a_j` with `S = sum a a^*`.
#[derive(Clone, Debug)]
pub struct Configuration {
    pub vectors: Vec<Vector>,
    gram: Vec<Vec<KElt>>,
    norms: Vec<Vec<Rat>>,
    pub fingerprint: Vec<Vec<Rat>>,
}

fn kzero(m: usize) -> KElt {
    vec![Rat::zero(); m]
}

fn kmat_inverse(s: &FormSpace, a: &KMat) -> Option<KMat> {
    let k = s.field;
    let n = a.len();
    let m = s.m;
    let mut left = a.clone();
    let mut right: KMat = (0..n)
        .map(|i| (0..n).map(|j| if i == j { k.to_q(&k.one()) } else { kzero(m) }).collect())
        .collect();
    for c in 0..n {
        let p = (c..n).find(|&r| left[r][c].iter().any(|x| !x.is_zero()))?;
        left.swap(c, p);
        right.swap(c, p);
        let inv = k.inv_q(&left[c][c])?;
        for j in 0..n {
            left[c][j] = k.mul_q(&left[c][j], &inv);
            right[c][j] = k.mul_q(&right[c][j], &inv);
        }
        for r in 0..n {
            if r == c || left[r][c].iter().all(|x| x.is_zero()) {
                continue;
            }
            let f = left[r][c].clone();
            for j in 0..n {
                let t = k.mul_q(&f, &left[c][j]);
                left[r][j] = sub(&left[r][j], &t);
                let t = k.mul_q(&f, &right[c][j]);
                right[r][j] = sub(&right[r][j], &t);
            }
        }
    }
    Some(right)
}

fn sub(a: &KElt, b: &KElt) -> KElt {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

fn add(a: &KElt, b: &KElt) -> KElt {
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

fn kmat_mul(s: &FormSpace, a: &KMat, b: &KMat) -> KMat {
    let k = s.field;
    (0..a.len())
        .map(|i| {
            (0..b[0].len())
                .map(|j| (0..b.len()).fold(kzero(s.m), |acc, l| add(&acc, &k.mul_q(&a[i][l], &b[l][j]))))
                .collect()
        })
        .collect()
}

fn to_kvec(s: &FormSpace, v: &[i64]) -> Vec<KElt> {
    s.split(v).iter().map(|e| s.field.to_q(e)).collect()
}

/// `x^* M y` for column vectors over K.
fn sesquilinear(s: &FormSpace, x: &[KElt], mm: &KMat, y: &[KElt]) -> KElt {
    let k = s.field;
    let mut acc = kzero(s.m);
    for i in 0..x.len() {
        let xc = k.conj_q(&x[i]);
        for j in 0..y.len() {
            if mm[i][j].iter().all(|t| t.is_zero()) {
                continue;
            }
            acc = add(&acc, &k.mul_q(&k.mul_q(&xc, &mm[i][j]), &y[j]));
        }
    }
    acc
}

impl Configuration {
    /// Requires the vectors to span K^n.
    pub fn new(s: &FormSpace, vectors: Vec<Vector>) -> Result<Self> {
        let k = s.field;
        let n = s.n;
        let kv: Vec<Vec<KElt>> = vectors.iter().map(|v| to_kvec(s, v)).collect();
        let mut sum: KMat = vec![vec![kzero(s.m); n]; n];
        for x in &kv {
            for i in 0..n {
                for j in 0..n {
                    sum[i][j] = add(&sum[i][j], &k.mul_q(&x[i], &k.conj_q(&x[j])));
                }
            }
        }
        let sinv = kmat_inverse(s, &sum).ok_or_else(|| CoreError::InvalidInput("vectors do not span K^n".into()))?;
        let gram: Vec<Vec<KElt>> = kv.iter().map(|x| kv.iter().map(|y| sesquilinear(s, x, &sinv, y)).collect()).collect();
        let norms: Vec<Vec<Rat>> = gram.iter().map(|r| r.iter().map(|e| k.norm_q(&k.mul_q(e, &k.conj_q(e)))).collect()).collect();
        let mut fingerprint: Vec<Vec<Rat>> = norms
            .iter()
            .enumerate()
            .map(|(i, r)| {
                let mut row = r.clone();
                let d = row.remove(i);
                row.sort();
                row.insert(0, d);
                row
            })
            .collect();
        fingerprint.sort();
        Ok(Configuration {
            vectors,
            gram,
            norms,
            fingerprint,
        })
    }
}

/// Indices of the first K-linearly independent vectors forming a basis.
fn independent_basis(s: &FormSpace, vectors: &[Vector]) -> Vec<usize> {
    let mut chosen: Vec<usize> = Vec::new();
    for i in 0..vectors.len() {
        let mut trial = chosen.clone();
        trial.push(i);
        if k_rank(s, &trial.iter().map(|&t| vectors[t].clone()).collect::<Vec<_>>()) == trial.len() {
            chosen = trial;
            if chosen.len() == s.n {
                break;
            }
        }
    }
    chosen
}

/// Rank over K of a list of vectors of O^n.
pub fn k_rank(s: &FormSpace, vectors: &[Vector]) -> usize {
    let k = s.field;
    let mut rows: Vec<Vec<KElt>> = vectors.iter().map(|v| to_kvec(s, v)).collect();
    let n = s.n;
    let mut rank = 0;
    for c in 0..n {
        let Some(p) = (rank..rows.len()).find(|&r| rows[r][c].iter().any(|x| !x.is_zero())) else { continue };
        rows.swap(rank, p);
        let inv = k.inv_q(&rows[rank][c]).expect("nonzero");
        for r in 0..rows.len() {
            if r == rank || rows[r][c].iter().all(|x| x.is_zero()) {
                continue;
            }
            let f = k.mul_q(&rows[r][c], &inv);
            for j in c..n {
                let t = k.mul_q(&f, &rows[rank][j]);
                rows[r][j] = sub(&rows[r][j], &t);
            }
        }
        rank += 1;
    }
    rank
}

/// All (or the first) `g` in GL_n(O) with `g a = b` as sets of vectors up to
/// roots of unity, with the image of the first basis vector fixed exactly
/// (so the full solution set is this list times the central roots of unity).
pub fn isometries(s: &FormSpace, a: &Configuration, b: &Configuration, first_only: bool, budget: usize) -> Result<Vec<OMat>> {
    if a.vectors.len() != b.vectors.len() || a.fingerprint != b.fingerprint {
        return Ok(Vec::new());
    }
    let k = s.field;
    let basis = independent_basis(s, &a.vectors);
    if basis.len() != s.n {
        return Err(CoreError::InvalidInput("configuration does not span".into()));
    }
    let roots: Vec<KElt> = k.roots_of_unity().iter().map(|z| k.to_q(z)).collect();
    let one = k.to_q(&k.one());
    let target: HashSet<Vector> = b.vectors.iter().map(|v| s.normalize_ray(v)).collect();
    let src: KMat = (0..s.n).map(|i| basis.iter().map(|&t| to_kvec(s, &a.vectors[t])[i].clone()).collect()).collect();
    let src_inv = kmat_inverse(s, &src).expect("independent basis");

    let mut out = Vec::new();
    let mut steps = 0usize;
    let mut chosen: Vec<(usize, KElt)> = Vec::new();
    search(
        s,
        a,
        b,
        &basis,
        &roots,
        &one,
        &mut chosen,
        &mut |chosen| -> Option<OMat> {
            let img: KMat = (0..s.n)
                .map(|i| chosen.iter().map(|(j, mu)| k.mul_q(mu, &to_kvec(s, &b.vectors[*j])[i])).collect())
                .collect();
            let g = kmat_mul(s, &img, &src_inv);
            let gi: Option<OMat> = g.iter().map(|row| row.iter().map(|e| k.to_integral(e)).collect::<Option<Vec<Elt>>>()).collect();
            let gi = gi?;
            let det = omat_det(s, &gi);
            if !k.is_unit(&det) {
                return None;
            }
            a.vectors.iter().all(|v| target.contains(&s.normalize_ray(&s.mat_vec(&gi, v)))).then_some(gi)
        },
        &mut out,
        first_only,
        &mut steps,
        budget,
    )?;
    Ok(out)
}

#[allow(clippy::too_many_arguments)]
fn search(
    s: &FormSpace,
    a: &Configuration,
    b: &Configuration,
    basis: &[usize],
    roots: &[KElt],
    one: &KElt,
    chosen: &mut Vec<(usize, KElt)>,
    finish: &mut impl FnMut(&[(usize, KElt)]) -> Option<OMat>,
    out: &mut Vec<OMat>,
    first_only: bool,
    steps: &mut usize,
    budget: usize,
) -> Result<bool> {
    *steps += 1;
    if *steps > budget {
        return Err(CoreError::SearchBudget(format!("{} vectors", a.vectors.len())));
    }
    let t = chosen.len();
    if t == basis.len() {
        if let Some(g) = finish(chosen) {
            out.push(g);
            return Ok(first_only);
        }
        return Ok(false);
    }
    let k = s.field;
    let at = basis[t];
    for j in 0..b.vectors.len() {
        if chosen.iter().any(|(c, _)| *c == j) || b.norms[j][j] != a.norms[at][at] {
            continue;
        }
        if chosen.iter().zip(basis).any(|((c, _), &bs)| b.norms[*c][j] != a.norms[bs][at]) {
            continue;
        }
        let mus: Vec<&KElt> = if t == 0 { vec![one] } else { roots.iter().collect() };
        for mu in mus {
            // conj(mu_s) mu b_{c_s}^* S^{-1} b_j must equal the source value
            let ok = chosen.iter().zip(basis).all(|((c, mus), &bs)| {
                let v = k.mul_q(&k.mul_q(&k.conj_q(mus), mu), &b.gram[*c][j]);
                v == a.gram[bs][at]
            });
            if !ok {
                continue;
            }
            chosen.push((j, mu.clone()));
            let stop = search(s, a, b, basis, roots, one, chosen, finish, out, first_only, steps, budget)?;
            chosen.pop();
            if stop {
                return Ok(true);
            }
        }
    }
    Ok(false)
}

/// Determinant over O by cofactor expansion (n is small).
pub fn omat_det(s: &FormSpace, g: &OMat) -> Elt {
    let k = s.field;
    let n = g.len();
    if n == 1 {
        return g[0][0].clone();
    }
    let mut acc = k.zero();
    for c in 0..n {
        let minor: OMat = g[1..].iter().map(|r| r.iter().enumerate().filter(|(j, _)| *j != c).map(|(_, e)| e.clone()).collect()).collect();
        let t = k.mul(&g[0][c], &omat_det(s, &minor));
        acc = if c % 2 == 0 { k.add(&acc, &t) } else { k.sub(&acc, &t) };
    }
    acc
}

pub fn omat_identity(s: &FormSpace) -> OMat {
    let k = s.field;
    (0..s.n).map(|i| (0..s.n).map(|j| if i == j { k.one() } else { k.zero() }).collect()).collect()
}

/// Full stabilizer of a configuration: the search result times the central
/// roots of unity.
pub fn stabilizer(s: &FormSpace, c: &Configuration, budget: usize) -> Result<Vec<OMat>> {
    let base = isometries(s, c, c, false, budget)?;
    let k = s.field;
    let mut all: BTreeSet<OMat> = BTreeSet::new();
    for z in k.roots_of_unity() {
        for g in &base {
            all.insert(g.iter().map(|r| r.iter().map(|e| k.mul(z, e)).collect()).collect());
        }
    }
    Ok(all.into_iter().collect())
}

/// A small generating set, added greedily while the generated group grows.
pub fn generators(s: &FormSpace, elements: &[OMat]) -> Vec<OMat> {
    let mut gens: Vec<OMat> = Vec::new();
    let mut group: BTreeSet<OMat> = BTreeSet::new();
    group.insert(omat_identity(s));
    for e in elements {
        if group.contains(e) {
            continue;
        }
        gens.push(e.clone());
        // closure by right multiplication with generators
        let mut frontier: Vec<OMat> = group.iter().cloned().collect();
        while let Some(x) = frontier.pop() {
            for g in &gens {
                let y = s.mat_mul(&x, g);
                if group.insert(y.clone()) {
                    frontier.push(y);
                }
            }
        }
    }
    gens
}
