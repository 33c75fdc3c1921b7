use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::cone;
use super::forms::{FormPoint, FormSpace, Vector};
use super::isometry::{isometries, Configuration};
use super::lattice;
use crate::error::{CoreError, Result};
use crate::linalg::{self, Rat};

#[derive(Clone, Debug)]
pub struct PerfectForm {
    pub point: FormPoint,
    pub minimum: Rat,
    /// All minimal vectors (closed under roots of unity).
    pub minimal_vectors: Vec<Vector>,
    /// One minimal vector per ray, normalized and sorted.
    pub rays: Vec<Vector>,
}

/// Rays `q(w)` modulo roots of unity, as normalized sorted vectors.
pub fn ray_representatives(s: &FormSpace, vectors: &[Vector]) -> Vec<Vector> {
    let mut r: Vec<Vector> = vectors.iter().map(|v| s.normalize_ray(v)).collect();
    r.sort();
    r.dedup();
    r
}

pub fn is_perfect(s: &FormSpace, p: &FormPoint) -> Result<bool> {
    let (_, mv) = lattice::minimal_vectors(&p.gram)?;
    let rays: Vec<Vec<BigInt>> = mv.iter().map(|v| s.ray(v)).collect();
    Ok(linalg::rank_int(&rays) == s.dim)
}

fn perfect_form(s: &FormSpace, coeffs: Vec<Rat>) -> Result<PerfectForm> {
    let point = s.point(coeffs);
    let (minimum, minimal_vectors) = lattice::minimal_vectors(&point.gram)?;
    let rays = ray_representatives(s, &minimal_vectors);
    Ok(PerfectForm {
        point,
        minimum,
        minimal_vectors,
        rays,
    })
}

fn add_scaled(a: &[Rat], b: &[Rat], t: &Rat) -> Vec<Rat> {
    a.iter().zip(b).map(|(x, y)| x + y * t).collect()
}

/// Floating semidefiniteness test used only to pick a search direction.
fn looks_semidefinite(s: &FormSpace, r: &[Rat]) -> bool {
    let g = s.point(r.to_vec()).gram;
    let n = g.len();
    let mut a: Vec<Vec<f64>> = g.iter().map(|row| row.iter().map(|x| x.to_f64().unwrap_or(0.0)).collect()).collect();
    let scale = a.iter().flatten().fold(0.0f64, |m, x| m.max(x.abs())).max(1e-300);
    for (i, row) in a.iter_mut().enumerate() {
        row[i] += 1e-9 * scale;
    }
    for i in 0..n {
        if a[i][i] <= 0.0 {
            return false;
        }
        let d = a[i][i].sqrt();
        for j in i..n {
            a[j][i] /= d;
        }
        for j in i + 1..n {
            for l in i + 1..=j {
                a[j][l] -= a[j][i] * a[l][i];
            }
        }
    }
    true
}

/// Move from `p` in direction `r` (which vanishes on the minimal vectors
/// to keep) until new vectors reach the minimum.
fn step(s: &FormSpace, p: &[Rat], lambda: &Rat, r: &[Rat]) -> Result<Vec<Rat>> {
    let two = Rat::from_integer(2.into());
    let mut u = Rat::one();
    let mut lo = Rat::zero();
    let mut hi: Option<Rat> = None;
    // bracket: p + u r positive definite with minimum below lambda
    let mut found = false;
    for _ in 0..400 {
        let q = s.point(add_scaled(p, r, &u));
        if !lattice::is_positive_definite(&q.gram) {
            hi = Some(u.clone());
            u = (&lo + &u) / &two;
            continue;
        }
        let (m, _) = lattice::minimal_vectors(&q.gram)?;
        if m < *lambda {
            found = true;
            break;
        }
        lo = u.clone();
        u = match &hi {
            Some(h) => (&lo + h) / &two,
            None => &u * &two,
        };
    }
    if !found {
        return Err(CoreError::InvalidInput("neighbor step found no bracket".into()));
    }
    loop {
        let q = s.point(add_scaled(p, r, &u));
        let (m, mv) = lattice::minimal_vectors(&q.gram)?;
        if m == *lambda {
            return Ok(q.coeffs);
        }
        if m > *lambda {
            return Err(CoreError::InvalidInput("neighbor step overshot".into()));
        }
        let sv = lattice::short_vectors(&q.gram, lambda)?;
        let mut best: Option<Rat> = None;
        for v in sv.iter().chain(&mv) {
            let rv = s.value(r, v);
            if rv.is_negative() {
                let t = (s.value(p, v) - lambda) / (-rv);
                if best.as_ref().is_none_or(|b| t < *b) {
                    best = Some(t);
                }
            }
        }
        u = best.ok_or_else(|| CoreError::InvalidInput("no descending vector in neighbor step".into()))?;
    }
}

/// Voronoi's perfection: from a positive definite form, repeatedly move
/// inside the subspace fixing the current minimal values until the
/// minimal vectors determine the form.
pub fn perfect_from(s: &FormSpace, start: Vec<Rat>) -> Result<PerfectForm> {
    let mut c = start;
    let g = s.point(c.clone()).gram;
    let (m0, _) = lattice::minimal_vectors(&g)?;
    let inv = m0.recip();
    c = c.into_iter().map(|x| x * &inv).collect();
    let lambda = Rat::one();
    loop {
        let f = perfect_form(s, c.clone())?;
        let rays: Vec<Vec<Rat>> = f.rays.iter().map(|v| s.ray(v).into_iter().map(Rat::from_integer).collect()).collect();
        let ns = linalg::nullspace(&rays, s.dim);
        if ns.is_empty() {
            return Ok(f);
        }
        let mut r = ns[0].clone();
        if looks_semidefinite(s, &r) {
            r = r.into_iter().map(|x| -x).collect();
        }
        c = step(s, &c, &lambda, &r)?;
    }
}

/// Inner facet normals of the perfect pyramid.
pub fn pyramid_facets(s: &FormSpace, f: &PerfectForm) -> Result<Vec<(Vec<usize>, Vec<Rat>)>> {
    let rays: Vec<Vec<BigInt>> = f.rays.iter().map(|v| s.ray(v)).collect();
    let piv = cone::span_coordinates(&rays);
    let facets = cone::facets(&rays)?;
    facets
        .into_iter()
        .map(|fc| {
            let n = cone::ambient_normal(&fc.normal, &piv, s.dim)
                .ok_or_else(|| CoreError::FacetEnumeration("perfect pyramid is not full-dimensional".into()))?;
            Ok((fc.rays, n.into_iter().map(Rat::from_integer).collect()))
        })
        .collect()
}

/// The perfect form on the other side of a facet of the pyramid of `f`.
pub fn neighbor(s: &FormSpace, f: &PerfectForm, normal: &[Rat]) -> Result<PerfectForm> {
    let c = step(s, &f.point.coeffs, &f.minimum, normal)?;
    perfect_form(s, c)
}

/// One perfect form per GL_n(O) class, by walking across pyramid facets.
pub fn enumerate_perfect_forms(s: &FormSpace, max_forms: usize) -> Result<Vec<PerfectForm>> {
    let seed = perfect_from(s, s.identity())?;
    let mut reps: Vec<(PerfectForm, Configuration)> = Vec::new();
    let conf = Configuration::new(s, seed.rays.clone())?;
    reps.push((seed, conf));
    let mut next = 0;
    while next < reps.len() {
        if reps.len() > max_forms {
            return Err(CoreError::IncompleteEnumeration {
                explored: next,
                frontier: reps.len() - next,
            });
        }
        let current = reps[next].0.clone();
        for (_, normal) in pyramid_facets(s, &current)? {
            let nb = neighbor(s, &current, &normal)?;
            let conf = Configuration::new(s, nb.rays.clone())?;
            let mut known = false;
            for (_, c) in &reps {
                if !isometries(s, c, &conf, true, 5_000_000)?.is_empty() {
                    known = true;
                    break;
                }
            }
            if !known {
                reps.push((nb, conf));
            }
        }
        next += 1;
    }
    Ok(reps.into_iter().map(|(f, _)| f).collect())
}

/// Determinant of the trace Gram matrix (a class invariant up to scale).
pub fn gram_determinant(f: &PerfectForm) -> Rat {
    let n = f.point.gram.len();
    let l = f.point.gram.iter().flatten().fold(BigInt::one(), |acc, x| num_integer::Integer::lcm(&acc, x.denom()));
    let lr = Rat::from_integer(l.clone());
    let g: Vec<Vec<BigInt>> = f.point.gram.iter().map(|r| r.iter().map(|x| (x * &lr).to_integer()).collect()).collect();
    Rat::new(linalg::det(&g), l.pow(n as u32))
}

pub fn is_zero_vec(v: &[Rat]) -> bool {
    v.iter().all(|x| x.is_zero())
}
