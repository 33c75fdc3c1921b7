//! Integer polynomials and their factorization modulo small primes.
//!
//! Coefficient vectors are stored lowest degree first.

use num_bigint::BigInt;
use num_complex::Complex64;

use crate::linalg;

pub type PolyP = Vec<u64>;

fn trim(mut a: PolyP) -> PolyP {
    while a.last() == Some(&0) {
        a.pop();
    }
    a
}

fn mulmod(a: u64, b: u64, p: u64) -> u64 {
    ((a as u128 * b as u128) % p as u128) as u64
}

pub fn inv_mod(a: u64, p: u64) -> u64 {
    pow_mod(a, p - 2, p)
}

pub fn pow_mod(mut b: u64, mut e: u64, p: u64) -> u64 {
    let mut r = 1 % p;
    b %= p;
    while e > 0 {
        if e & 1 == 1 {
            r = mulmod(r, b, p);
        }
        b = mulmod(b, b, p);
        e >>= 1;
    }
    r
}

pub fn reduce(f: &[i64], p: u64) -> PolyP {
    trim(f.iter().map(|&c| c.rem_euclid(p as i64) as u64).collect())
}

fn mul(a: &[u64], b: &[u64], p: u64) -> PolyP {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![0u64; a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        for (j, &y) in b.iter().enumerate() {
            out[i + j] = (out[i + j] + mulmod(x, y, p)) % p;
        }
    }
    trim(out)
}

fn sub(a: &[u64], b: &[u64], p: u64) -> PolyP {
    let n = a.len().max(b.len());
    trim(
        (0..n)
            .map(|i| (a.get(i).copied().unwrap_or(0) + p - b.get(i).copied().unwrap_or(0)) % p)
            .collect(),
    )
}

/// Quotient and remainder; `b` must be nonzero.
pub fn divrem(a: &[u64], b: &[u64], p: u64) -> (PolyP, PolyP) {
    let b = trim(b.to_vec());
    let mut r = trim(a.to_vec());
    if r.len() < b.len() {
        return (Vec::new(), r);
    }
    let lead_inv = inv_mod(*b.last().unwrap(), p);
    let mut q = vec![0u64; r.len() - b.len() + 1];
    while r.len() >= b.len() && !r.is_empty() {
        let shift = r.len() - b.len();
        let c = mulmod(*r.last().unwrap(), lead_inv, p);
        q[shift] = c;
        for (i, &bc) in b.iter().enumerate() {
            r[shift + i] = (r[shift + i] + p - mulmod(c, bc, p)) % p;
        }
        r = trim(r);
    }
    (trim(q), r)
}

fn monic(a: PolyP, p: u64) -> PolyP {
    match a.last() {
        Some(&l) if l != 1 => {
            let i = inv_mod(l, p);
            a.into_iter().map(|c| mulmod(c, i, p)).collect()
        }
        _ => a,
    }
}

pub fn gcd(a: &[u64], b: &[u64], p: u64) -> PolyP {
    let mut a = trim(a.to_vec());
    let mut b = trim(b.to_vec());
    while !b.is_empty() {
        let r = divrem(&a, &b, p).1;
        a = b;
        b = r;
    }
    monic(a, p)
}

fn powmod_poly(base: &[u64], mut e: u128, m: &[u64], p: u64) -> PolyP {
    let mut r: PolyP = vec![1];
    let mut b = divrem(base, m, p).1;
    while e > 0 {
        if e & 1 == 1 {
            r = divrem(&mul(&r, &b, p), m, p).1;
        }
        b = divrem(&mul(&b, &b, p), m, p).1;
        e >>= 1;
    }
    r
}

fn eval(f: &[u64], x: u64, p: u64) -> u64 {
    f.iter().rev().fold(0, |acc, &c| (mulmod(acc, x, p) + c) % p)
}

/// Monic irreducible factors of `f` modulo `p` with multiplicities, sorted by
/// (degree, coefficients). Supports degree at most 4.
pub fn factor_mod_p(f: &[i64], p: u64) -> Vec<(PolyP, u32)> {
    let mut g = monic(reduce(f, p), p);
    assert!(g.len() <= 5, "factorization mod p implemented for degree <= 4");
    let mut out: Vec<(PolyP, u32)> = Vec::new();
    // linear factors by exhaustive root search
    let mut roots = Vec::new();
    if g.len() > 1 {
        for x in 0..p {
            if eval(&g, x, p) == 0 {
                roots.push(x);
                if roots.len() == g.len() - 1 {
                    break;
                }
            }
        }
    }
    for x in roots {
        let lin = vec![(p - x) % p, 1];
        let mut e = 0;
        loop {
            let (q, r) = divrem(&g, &lin, p);
            if !r.is_empty() {
                break;
            }
            g = q;
            e += 1;
        }
        out.push((lin, e));
    }
    match g.len() {
        0 | 1 => {}
        3 | 4 => out.push((g, 1)),
        5 => {
            // no roots: irreducible quartic, a square, or two quadratics
            let x: PolyP = vec![0, 1];
            let xp2 = powmod_poly(&x, (p as u128) * (p as u128), &g, p);
            let h = gcd(&g, &sub(&xp2, &x, p), p);
            if h.len() == 1 {
                out.push((g, 1));
            } else {
                for q in split_quadratics(&g, p) {
                    if let Some(entry) = out.iter_mut().find(|(f, _)| *f == q) {
                        entry.1 += 1;
                    } else {
                        out.push((q, 1));
                    }
                }
            }
        }
        _ => unreachable!(),
    }
    out.sort_by(|a, b| (a.0.len(), &a.0).cmp(&(b.0.len(), &b.0)));
    out
}

/// Split a monic quartic without roots that is a product of two quadratics.
fn split_quadratics(g: &[u64], p: u64) -> Vec<PolyP> {
    if p == 2 {
        // the only irreducible quadratic over F_2
        let q = vec![1, 1, 1];
        return vec![q.clone(), q];
    }
    let deriv: PolyP = trim(g.iter().enumerate().skip(1).map(|(i, &c)| mulmod(c, i as u64 % p, p)).collect());
    let d = gcd(g, &deriv, p);
    if d.len() == 3 {
        return vec![d.clone(), d];
    }
    let e = ((p as u128) * (p as u128) - 1) / 2;
    for t in 0..p {
        let a: PolyP = vec![t, 1];
        let h = sub(&powmod_poly(&a, e, g, p), &[1], p);
        let d = gcd(g, &h, p);
        if d.len() == 3 {
            let other = monic(divrem(g, &d, p).0, p);
            return vec![d, other];
        }
    }
    unreachable!("equal-degree splitting failed")
}

/// Discriminant of a monic integer polynomial via the Sylvester resultant.
pub fn discriminant(f: &[i64]) -> BigInt {
    let m = f.len() - 1;
    if m == 1 {
        return BigInt::from(1);
    }
    let df: Vec<i64> = f.iter().enumerate().skip(1).map(|(i, &c)| c * i as i64).collect();
    let size = 2 * m - 1;
    let mut syl = vec![vec![BigInt::from(0); size]; size];
    // rows of f (m - 1 of them), then rows of f' (m of them), highest degree first
    for i in 0..m - 1 {
        for (k, &c) in f.iter().rev().enumerate() {
            syl[i][i + k] = BigInt::from(c);
        }
    }
    for i in 0..m {
        for (k, &c) in df.iter().rev().enumerate() {
            syl[m - 1 + i][i + k] = BigInt::from(c);
        }
    }
    let res = linalg::det(&syl);
    if (m * (m - 1) / 2) % 2 == 1 {
        -res
    } else {
        res
    }
}

/// All complex roots by Aberth iteration, polished in f64.
pub fn complex_roots(f: &[i64]) -> Vec<Complex64> {
    let m = f.len() - 1;
    let coeffs: Vec<f64> = f.iter().map(|&c| c as f64).collect();
    let evalc = |z: Complex64| coeffs.iter().rev().fold(Complex64::new(0.0, 0.0), |acc, &c| acc * z + c);
    let deval = |z: Complex64| {
        coeffs
            .iter()
            .enumerate()
            .skip(1)
            .rev()
            .fold(Complex64::new(0.0, 0.0), |acc, (i, &c)| acc * z + c * i as f64)
    };
    let bound = 1.0 + coeffs[..m].iter().fold(0.0f64, |a, c| a.max(c.abs()));
    let mut z: Vec<Complex64> = (0..m)
        .map(|k| Complex64::from_polar(bound * 0.5, 0.4 + 2.0 * std::f64::consts::PI * k as f64 / m as f64))
        .collect();
    for _ in 0..500 {
        let mut delta = 0.0f64;
        for i in 0..m {
            let ratio = evalc(z[i]) / deval(z[i]);
            let s: Complex64 = (0..m).filter(|&j| j != i).map(|j| (z[i] - z[j]).inv()).sum();
            let w = ratio / (Complex64::new(1.0, 0.0) - ratio * s);
            z[i] -= w;
            delta = delta.max(w.norm());
        }
        if delta < 1e-17 {
            break;
        }
    }
    z
}

/// Exact irreducibility over Q for monic integer polynomials of degree <= 4.
pub fn is_irreducible(f: &[i64]) -> bool {
    let m = f.len() - 1;
    if m <= 1 {
        return m == 1;
    }
    // integer roots divide the constant term
    let c0 = f[0];
    if c0 == 0 {
        return false;
    }
    let eval_i = |x: i64| f.iter().rev().fold(0i128, |acc, &c| acc * x as i128 + c as i128);
    for d in 1..=c0.unsigned_abs() as i64 {
        if c0 % d == 0 && (eval_i(d) == 0 || eval_i(-d) == 0) {
            return false;
        }
    }
    if m <= 3 {
        return true;
    }
    assert!(m == 4, "irreducibility test implemented for degree <= 4");
    // quadratic factor x^2 - s x + t with s, t integers from a pair of roots
    let roots = complex_roots(f);
    for i in 0..4 {
        for j in i + 1..4 {
            let s = roots[i] + roots[j];
            let t = roots[i] * roots[j];
            if s.im.abs() > 1e-6 || t.im.abs() > 1e-6 {
                continue;
            }
            let (s, t) = (s.re.round() as i64, t.re.round() as i64);
            let q = [t, -s, 1];
            if divides_exactly(&q, f) {
                return false;
            }
        }
    }
    true
}

fn divides_exactly(q: &[i64], f: &[i64]) -> bool {
    let mut r: Vec<i64> = f.to_vec();
    while r.len() >= q.len() {
        let shift = r.len() - q.len();
        let c = *r.last().unwrap();
        for (i, &qc) in q.iter().enumerate() {
            r[shift + i] -= c * qc;
        }
        r.pop();
    }
    r.iter().all(|&c| c == 0)
}
