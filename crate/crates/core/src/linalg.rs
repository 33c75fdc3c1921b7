//! Small dense exact linear algebra over Z and Q.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

pub type Rat = BigRational;

pub fn rat(n: i64) -> Rat {
    Rat::from_integer(BigInt::from(n))
}

/// Bareiss fraction-free determinant.
pub fn det(m: &[Vec<BigInt>]) -> BigInt {
    let n = m.len();
    if n == 0 {
        return BigInt::one();
    }
    let mut a: Vec<Vec<BigInt>> = m.to_vec();
    let mut sign = 1i32;
    let mut prev = BigInt::one();
    for k in 0..n - 1 {
        if a[k][k].is_zero() {
            let Some(s) = (k + 1..n).find(|&i| !a[i][k].is_zero()) else {
                return BigInt::zero();
            };
            a.swap(k, s);
            sign = -sign;
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let v = (&a[i][j] * &a[k][k] - &a[i][k] * &a[k][j]) / &prev;
                a[i][j] = v;
            }
        }
        prev = a[k][k].clone();
    }
    if sign < 0 {
        -a[n - 1][n - 1].clone()
    } else {
        a[n - 1][n - 1].clone()
    }
}

/// Leading principal minors, each computed exactly.
pub fn leading_minors(m: &[Vec<BigInt>]) -> Vec<BigInt> {
    // Bareiss without pivoting yields the leading minors on the diagonal
    // as long as none vanishes; fall back to direct determinants otherwise.
    let n = m.len();
    let mut a: Vec<Vec<BigInt>> = m.to_vec();
    let mut prev = BigInt::one();
    let mut out = Vec::with_capacity(n);
    for k in 0..n {
        out.push(a[k][k].clone());
        if a[k][k].is_zero() {
            for j in k + 1..n {
                let sub: Vec<Vec<BigInt>> = m[..=j].iter().map(|r| r[..=j].to_vec()).collect();
                out.push(det(&sub));
            }
            return out;
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let v = (&a[i][j] * &a[k][k] - &a[i][k] * &a[k][j]) / &prev;
                a[i][j] = v;
            }
        }
        prev = a[k][k].clone();
    }
    out
}

/// Row echelon form over Q; returns (echelon rows, pivot columns).
pub fn echelon(rows: &[Vec<Rat>]) -> (Vec<Vec<Rat>>, Vec<usize>) {
    let mut a: Vec<Vec<Rat>> = rows.to_vec();
    let ncols = a.first().map_or(0, |r| r.len());
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..ncols {
        let Some(p) = (r..a.len()).find(|&i| !a[i][c].is_zero()) else { continue };
        a.swap(r, p);
        let inv = a[r][c].recip();
        for v in a[r].iter_mut() {
            *v = &*v * &inv;
        }
        for i in 0..a.len() {
            if i != r && !a[i][c].is_zero() {
                let f = a[i][c].clone();
                for j in c..ncols {
                    let t = &a[r][j] * &f;
                    a[i][j] -= t;
                }
            }
        }
        pivots.push(c);
        r += 1;
        if r == a.len() {
            break;
        }
    }
    a.truncate(r);
    (a, pivots)
}

pub fn rank_q(rows: &[Vec<Rat>]) -> usize {
    echelon(rows).1.len()
}

pub fn rank_int(rows: &[Vec<BigInt>]) -> usize {
    let q: Vec<Vec<Rat>> = rows.iter().map(|r| r.iter().cloned().map(Rat::from_integer).collect()).collect();
    rank_q(&q)
}

/// Basis of `{x : rows * x = 0}`.
pub fn nullspace(rows: &[Vec<Rat>], ncols: usize) -> Vec<Vec<Rat>> {
    let (e, piv) = echelon(rows);
    let free: Vec<usize> = (0..ncols).filter(|c| !piv.contains(c)).collect();
    free.iter()
        .map(|&f| {
            let mut x = vec![Rat::zero(); ncols];
            x[f] = Rat::one();
            for (i, &p) in piv.iter().enumerate() {
                x[p] = -e[i][f].clone();
            }
            x
        })
        .collect()
}

/// Inverse of a square rational matrix.
pub fn inverse(m: &[Vec<Rat>]) -> Option<Vec<Vec<Rat>>> {
    let n = m.len();
    let aug: Vec<Vec<Rat>> = m
        .iter()
        .enumerate()
        .map(|(i, r)| {
            let mut r = r.clone();
            r.extend((0..n).map(|j| if i == j { Rat::one() } else { Rat::zero() }));
            r
        })
        .collect();
    let (e, piv) = echelon(&aug);
    if piv.len() < n || piv[n - 1] != n - 1 {
        return None;
    }
    Some(e.into_iter().map(|r| r[n..].to_vec()).collect())
}

/// Scale a rational vector to a primitive integer vector with the same direction.
pub fn primitive_integer(v: &[Rat]) -> Vec<BigInt> {
    let l = v.iter().fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
    let ints: Vec<BigInt> = v.iter().map(|x| (x * Rat::from_integer(l.clone())).to_integer()).collect();
    make_primitive(ints)
}

pub fn make_primitive(v: Vec<BigInt>) -> Vec<BigInt> {
    let g = v.iter().fold(BigInt::zero(), |acc, x| acc.gcd(x));
    if g.is_zero() || g.is_one() {
        return v;
    }
    v.into_iter().map(|x| x / &g).collect()
}

pub fn dot(a: &[BigInt], b: &[BigInt]) -> BigInt {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn dot_rat(a: &[BigInt], b: &[Rat]) -> Rat {
    a.iter().zip(b).map(|(x, y)| y * Rat::from_integer(x.clone())).sum()
}

/// Row-style Hermite normal form of a full-rank integer lattice given by
/// generators: upper triangular, positive diagonal, entries above each
/// pivot reduced into `[0, pivot)`.
pub fn hnf_full_rank(gens: &[Vec<BigInt>], dim: usize) -> Option<Vec<Vec<BigInt>>> {
    let mut rows: Vec<Vec<BigInt>> = gens.iter().filter(|r| r.iter().any(|x| !x.is_zero())).cloned().collect();
    let mut out: Vec<Vec<BigInt>> = Vec::with_capacity(dim);
    for c in 0..dim {
        // gcd-combine column c among remaining rows
        loop {
            let nz: Vec<usize> = (0..rows.len()).filter(|&i| !rows[i][c].is_zero()).collect();
            if nz.len() <= 1 {
                break;
            }
            let p = *nz.iter().min_by_key(|&&i| rows[i][c].abs()).unwrap();
            for &i in &nz {
                if i != p {
                    let q = rows[i][c].div_floor(&rows[p][c]);
                    let pr = rows[p].clone();
                    for (x, y) in rows[i].iter_mut().zip(&pr) {
                        *x -= &q * y;
                    }
                }
            }
        }
        let p = (0..rows.len()).find(|&i| !rows[i][c].is_zero())?;
        let mut pr = rows.swap_remove(p);
        if pr[c].is_negative() {
            for x in pr.iter_mut() {
                *x = -&*x;
            }
        }
        rows.retain(|r| r.iter().any(|x| !x.is_zero()));
        out.push(pr);
    }
    if rows.iter().any(|r| r.iter().any(|x| !x.is_zero())) {
        return None;
    }
    for c in 0..dim {
        for i in 0..c {
            let q = out[i][c].div_floor(&out[c][c]);
            if !q.is_zero() {
                let pr = out[c].clone();
                for (x, y) in out[i].iter_mut().zip(&pr) {
                    *x -= &q * y;
                }
            }
        }
    }
    Some(out)
}
