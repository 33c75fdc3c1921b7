use num_bigint::BigInt;
use num_traits::{Signed, Zero};

use crate::error::{CoreError, Result};
use crate::linalg::{self, Rat};

/// A facet of a polyhedral cone: the generating rays it contains and an
/// inner normal in the coordinates returned by [`span_coordinates`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Facet {
    pub rays: Vec<usize>,
    pub normal: Vec<BigInt>,
}

/// Pivot columns of the row span; projecting onto them is injective on
/// the span.
pub fn span_coordinates(rays: &[Vec<BigInt>]) -> Vec<usize> {
    let q: Vec<Vec<Rat>> = rays.iter().map(|r| r.iter().cloned().map(Rat::from_integer).collect()).collect();
    linalg::echelon(&q).1
}

#[derive(Clone)]
struct Gen {
    y: Vec<BigInt>,
    zeros: Vec<u64>,
}

fn bit(set: &[u64], i: usize) -> bool {
    set[i / 64] >> (i % 64) & 1 == 1
}

fn set_bit(set: &mut [u64], i: usize) {
    set[i / 64] |= 1 << (i % 64);
}

fn subset(a: &[u64], b: &[u64]) -> bool {
    a.iter().zip(b).all(|(x, y)| x & !y == 0)
}

/// Facets of the cone spanned by `rays`, by double description on the
/// dual cone inside the linear span of the rays.
pub fn facets(rays: &[Vec<BigInt>]) -> Result<Vec<Facet>> {
    if rays.is_empty() {
        return Ok(Vec::new());
    }
    let piv = span_coordinates(rays);
    let k = piv.len();
    let a: Vec<Vec<BigInt>> = rays.iter().map(|r| piv.iter().map(|&c| r[c].clone()).collect()).collect();
    let nr = a.len();
    if k == 1 {
        // a ray; its only face is the apex
        return Ok(vec![Facet {
            rays: Vec::new(),
            normal: vec![a[0][0].signum()],
        }]);
    }
    let words = nr.div_ceil(64);

    // initial simplex from the first independent rays
    let mut basis: Vec<usize> = Vec::new();
    for i in 0..nr {
        let mut rows: Vec<Vec<BigInt>> = basis.iter().map(|&b| a[b].clone()).collect();
        rows.push(a[i].clone());
        if linalg::rank_int(&rows) == rows.len() {
            basis.push(i);
            if basis.len() == k {
                break;
            }
        }
    }
    let m: Vec<Vec<Rat>> = basis.iter().map(|&b| a[b].iter().cloned().map(Rat::from_integer).collect()).collect();
    let inv = linalg::inverse(&m).ok_or_else(|| CoreError::FacetEnumeration("singular initial simplex".into()))?;
    let dot = |y: &[BigInt], i: usize| linalg::dot(y, &a[i]);
    let mut processed: Vec<usize> = basis.clone();
    let mut gens: Vec<Gen> = (0..k)
        .map(|j| {
            let col: Vec<Rat> = (0..k).map(|r| inv[r][j].clone()).collect();
            let y = linalg::primitive_integer(&col);
            let mut zeros = vec![0u64; words];
            for &b in &basis {
                if dot(&y, b).is_zero() {
                    set_bit(&mut zeros, b);
                }
            }
            Gen { y, zeros }
        })
        .collect();

    for i in 0..nr {
        if basis.contains(&i) {
            continue;
        }
        let s: Vec<BigInt> = gens.iter().map(|g| dot(&g.y, i)).collect();
        let pos: Vec<usize> = (0..gens.len()).filter(|&j| s[j].is_positive()).collect();
        let neg: Vec<usize> = (0..gens.len()).filter(|&j| s[j].is_negative()).collect();
        let mut next: Vec<Gen> = Vec::new();
        for j in 0..gens.len() {
            if !s[j].is_negative() {
                let mut g = gens[j].clone();
                if s[j].is_zero() {
                    set_bit(&mut g.zeros, i);
                }
                next.push(g);
            }
        }
        for &p in &pos {
            for &q in &neg {
                let common: Vec<u64> = gens[p].zeros.iter().zip(&gens[q].zeros).map(|(x, y)| x & y).collect();
                let count: u32 = common.iter().map(|w| w.count_ones()).sum();
                if (count as usize) + 2 < k {
                    continue;
                }
                // combinatorial adjacency test
                let blocked = (0..gens.len()).any(|r| r != p && r != q && subset(&common, &gens[r].zeros));
                if blocked {
                    continue;
                }
                let y: Vec<BigInt> = gens[q].y.iter().zip(&gens[p].y).map(|(yq, yp)| &s[p] * yq - &s[q] * yp).collect();
                let y = linalg::make_primitive(y);
                let mut zeros = common;
                set_bit(&mut zeros, i);
                next.push(Gen { y, zeros });
            }
        }
        gens = next;
        processed.push(i);
    }

    let mut out: Vec<Facet> = gens
        .into_iter()
        .map(|g| {
            let rays: Vec<usize> = (0..nr).filter(|&i| bit(&g.zeros, i) || dot(&g.y, i).is_zero()).collect();
            Facet { rays, normal: g.y }
        })
        .collect();
    for f in &out {
        let sub: Vec<Vec<BigInt>> = f.rays.iter().map(|&i| a[i].clone()).collect();
        if linalg::rank_int(&sub) + 1 != k {
            return Err(CoreError::FacetEnumeration(format!("facet {:?} has the wrong rank", f.rays)));
        }
    }
    out.sort_by(|x, y| x.rays.cmp(&y.rays));
    Ok(out)
}

/// Lift a normal from span coordinates back to the ambient space when the
/// cone is full-dimensional.
pub fn ambient_normal(normal: &[BigInt], piv: &[usize], ambient: usize) -> Option<Vec<BigInt>> {
    (piv.len() == ambient).then(|| {
        let mut out = vec![BigInt::zero(); ambient];
        for (v, &c) in normal.iter().zip(piv) {
            out[c] = v.clone();
        }
        out
    })
}
