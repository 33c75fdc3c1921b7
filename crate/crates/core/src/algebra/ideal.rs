use std::fmt;

use num_bigint::BigInt;
use num_traits::{Signed, ToPrimitive};

use super::field::{Elt, NumberField};
use super::poly;
use crate::error::{CoreError, Result};
use crate::linalg;

/// Nonzero ideal of O, stored by its row Hermite normal form in the integral
/// basis.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct OIdeal {
    pub field: String,
    pub hnf: Vec<Vec<i64>>,
    pub norm: u64,
}

impl fmt::Display for OIdeal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rows: Vec<String> = self
            .hnf
            .iter()
            .map(|r| r.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(","))
            .collect();
        write!(f, "[{}]", rows.join(";"))
    }
}

impl OIdeal {
    /// Ideal generated over Z by the given elements together with their
    /// O-multiples.
    pub fn generated_by(k: &NumberField, gens: &[Elt]) -> Result<Self> {
        let m = k.degree;
        let mut rows: Vec<Vec<BigInt>> = Vec::new();
        for g in gens {
            for j in 0..m {
                let mut e = vec![0; m];
                e[j] = 1;
                rows.push(k.mul(g, &e).into_iter().map(BigInt::from).collect());
            }
        }
        Self::from_lattice_rows(k, &rows)
    }

    fn from_lattice_rows(k: &NumberField, rows: &[Vec<BigInt>]) -> Result<Self> {
        let h = linalg::hnf_full_rank(rows, k.degree).ok_or_else(|| CoreError::InvalidInput("zero ideal".into()))?;
        let hnf: Vec<Vec<i64>> = h
            .iter()
            .map(|r| r.iter().map(|x| x.to_i64().expect("ideal basis fits in i64")).collect())
            .collect();
        let norm = hnf.iter().enumerate().map(|(i, r)| r[i] as u64).product();
        Ok(OIdeal {
            field: k.label.clone(),
            hnf,
            norm,
        })
    }

    pub fn principal(k: &NumberField, a: &[i64]) -> Result<Self> {
        Self::generated_by(k, &[a.to_vec()])
    }

    pub fn from_integer(k: &NumberField, n: i64) -> Result<Self> {
        Self::principal(k, &k.from_int(n))
    }

    pub fn unit(k: &NumberField) -> Self {
        Self::from_integer(k, 1).expect("unit ideal")
    }

    /// Parse `a,b;c,d` row syntax and check it is an ideal in HNF.
    pub fn parse_hnf(k: &NumberField, s: &str) -> Result<Self> {
        let s = s.trim().trim_start_matches('[').trim_end_matches(']');
        let rows: Vec<Vec<BigInt>> = s
            .split(';')
            .map(|r| {
                r.split(',')
                    .map(|t| t.trim().parse::<i64>().map(BigInt::from))
                    .collect::<std::result::Result<Vec<_>, _>>()
            })
            .collect::<std::result::Result<_, _>>()
            .map_err(|e| CoreError::InvalidInput(format!("bad ideal `{s}`: {e}")))?;
        if rows.len() != k.degree || rows.iter().any(|r| r.len() != k.degree) {
            return Err(CoreError::InvalidInput(format!("ideal `{s}` needs a {0}x{0} basis", k.degree)));
        }
        let id = Self::from_lattice_rows(k, &rows)?;
        if !id.is_ideal(k) {
            return Err(CoreError::InvalidInput(format!("lattice `{s}` is not an ideal")));
        }
        Ok(id)
    }

    pub fn degree(&self) -> usize {
        self.hnf.len()
    }

    pub fn is_unit_ideal(&self) -> bool {
        self.norm == 1
    }

    /// Reduce coordinates into the fundamental domain `0 <= x_i < h_ii`.
    pub fn reduce(&self, x: &[i64]) -> Elt {
        let mut v = x.to_vec();
        for i in 0..self.hnf.len() {
            let d = self.hnf[i][i];
            let q = v[i].div_euclid(d);
            if q != 0 {
                for (vj, hj) in v.iter_mut().zip(&self.hnf[i]) {
                    *vj -= q * hj;
                }
            }
        }
        v
    }

    pub fn contains(&self, x: &[i64]) -> bool {
        self.reduce(x).iter().all(|&c| c == 0)
    }

    pub fn contains_ideal(&self, other: &OIdeal) -> bool {
        other.hnf.iter().all(|r| self.contains(r))
    }

    fn is_ideal(&self, k: &NumberField) -> bool {
        let m = k.degree;
        self.hnf.iter().all(|r| {
            (0..m).all(|j| {
                let mut e = vec![0; m];
                e[j] = 1;
                self.contains(&k.mul(r, &e))
            })
        })
    }

    pub fn mul(&self, k: &NumberField, other: &OIdeal) -> OIdeal {
        let mut rows = Vec::new();
        for a in &self.hnf {
            for b in &other.hnf {
                rows.push(k.mul(a, b).into_iter().map(BigInt::from).collect());
            }
        }
        Self::from_lattice_rows(k, &rows).expect("product of nonzero ideals")
    }

    pub fn pow(&self, k: &NumberField, e: u32) -> OIdeal {
        let mut r = OIdeal::unit(k);
        for _ in 0..e {
            r = r.mul(k, self);
        }
        r
    }

    /// Sum (gcd) of two ideals.
    pub fn add(&self, k: &NumberField, other: &OIdeal) -> OIdeal {
        let rows: Vec<Vec<BigInt>> = self
            .hnf
            .iter()
            .chain(&other.hnf)
            .map(|r| r.iter().map(|&x| BigInt::from(x)).collect())
            .collect();
        Self::from_lattice_rows(k, &rows).expect("nonzero sum")
    }

    /// True when the ideal is prime (its factorization is a single prime
    /// to the first power).
    pub fn is_prime(&self, k: &NumberField) -> bool {
        let f = ideal_factor(k, self).unwrap_or_default();
        f.len() == 1 && f[0].1 == 1
    }

    /// Smallest positive integer in the ideal.
    pub fn minimum(&self) -> i64 {
        let h0 = self.hnf[0][0];
        let mut v = vec![0; self.hnf.len()];
        let mut l = h0;
        loop {
            v[0] = l;
            if self.contains(&v) {
                return l;
            }
            l += h0;
        }
    }
}

/// A prime ideal above a rational prime, from a factor of the defining
/// polynomial modulo p.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct PrimeIdeal {
    pub p: u64,
    pub residue_degree: u32,
    pub ramification: u32,
    pub ideal: OIdeal,
}

/// Primes of O above `p` (Dedekind-Kummer on the monogenic generator).
pub fn primes_above(k: &NumberField, p: u64) -> Vec<PrimeIdeal> {
    let factors = poly::factor_mod_p(&k.poly, p);
    factors
        .into_iter()
        .map(|(g, e)| {
            // g(theta) by Horner, since g may have the full degree
            let mut theta = k.zero();
            if k.degree > 1 {
                theta[1] = 1;
            } else {
                theta[0] = -k.poly[0];
            }
            let mut gel: Elt = k.zero();
            for &c in g.iter().rev() {
                gel = k.add(&k.mul(&gel, &theta), &k.from_int(c as i64));
            }
            let ideal = OIdeal::generated_by(k, &[k.from_int(p as i64), gel]).expect("nonzero prime");
            PrimeIdeal {
                p,
                residue_degree: (g.len() - 1) as u32,
                ramification: e,
                ideal,
            }
        })
        .collect()
}

fn rational_prime_factors(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut d = 2;
    while d * d <= n {
        if n % d == 0 {
            out.push(d);
            while n % d == 0 {
                n /= d;
            }
        }
        d += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

/// Prime factorization of a nonzero ideal.
pub fn ideal_factor(k: &NumberField, level: &OIdeal) -> Result<Vec<(PrimeIdeal, u32)>> {
    if level.norm == 0 {
        return Err(CoreError::InvalidInput("zero ideal".into()));
    }
    let mut out = Vec::new();
    for p in rational_prime_factors(level.norm) {
        for pr in primes_above(k, p) {
            let mut e = 0;
            let mut power = pr.ideal.clone();
            while power.contains_ideal(level) {
                e += 1;
                power = power.mul(k, &pr.ideal);
            }
            if e > 0 {
                out.push((pr, e));
            }
        }
    }
    Ok(out)
}

/// All ideals of norm exactly `n`, by enumerating Hermite normal forms.
pub fn ideals_of_norm(k: &NumberField, n: u64) -> Vec<OIdeal> {
    let m = k.degree;
    let mut out = Vec::new();
    let mut diag = vec![0i64; m];
    enumerate_diagonals(n, 0, m, &mut diag, &mut |d| {
        // above-diagonal entries range over [0, d_j)
        let slots: Vec<(usize, usize)> = (0..m).flat_map(|i| (i + 1..m).map(move |j| (i, j))).collect();
        let mut vals = vec![0i64; slots.len()];
        loop {
            let mut h = vec![vec![0i64; m]; m];
            for i in 0..m {
                h[i][i] = d[i];
            }
            for (s, &(i, j)) in slots.iter().enumerate() {
                h[i][j] = vals[s];
            }
            let cand = OIdeal {
                field: k.label.clone(),
                hnf: h,
                norm: n,
            };
            if cand.is_ideal(k) {
                out.push(cand);
            }
            let mut s = 0;
            while s < slots.len() {
                vals[s] += 1;
                if vals[s] < d[slots[s].1] {
                    break;
                }
                vals[s] = 0;
                s += 1;
            }
            if s == slots.len() {
                break;
            }
        }
    });
    out.sort();
    out
}

fn enumerate_diagonals(n: u64, i: usize, m: usize, diag: &mut Vec<i64>, f: &mut impl FnMut(&[i64])) {
    if i == m - 1 {
        diag[i] = n as i64;
        f(diag);
        return;
    }
    for d in 1..=n {
        if n % d == 0 {
            diag[i] = d as i64;
            enumerate_diagonals(n / d, i + 1, m, diag, f);
        }
    }
}

/// Ideals with norm in `[lo, hi]`, ordered by norm and then HNF.
pub fn ideals_in_norm_range(k: &NumberField, lo: u64, hi: u64) -> Vec<OIdeal> {
    (lo.max(1)..=hi).flat_map(|n| ideals_of_norm(k, n)).collect()
}

/// `|N(a)|` as an unsigned integer.
pub fn abs_norm(k: &NumberField, a: &[i64]) -> u64 {
    k.norm(a).abs().to_u64().expect("norm fits in u64")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::field::field;

    #[test]
    fn five_splits_in_gaussian_integers() {
        let k = field("Q(sqrt-1)").unwrap();
        let five = OIdeal::from_integer(k, 5).unwrap();
        let f = ideal_factor(k, &five).unwrap();
        assert_eq!(f.len(), 2);
        assert!(f.iter().all(|(p, e)| p.ideal.norm == 5 && *e == 1));
        let prod = f[0].0.ideal.mul(k, &f[1].0.ideal);
        assert_eq!(prod, five);
        // (2+i) is one of them
        let g = OIdeal::principal(k, &[2, 1]).unwrap();
        assert!(f.iter().any(|(p, _)| p.ideal == g));
    }

    #[test]
    fn unit_ideal_has_no_factors() {
        let k = field("Q").unwrap();
        assert!(ideal_factor(k, &OIdeal::unit(k)).unwrap().is_empty());
        let four = OIdeal::from_integer(k, 4).unwrap();
        let f = ideal_factor(k, &four).unwrap();
        assert_eq!(f.len(), 1);
        assert_eq!((f[0].0.p, f[0].1), (2, 2));
    }

    #[test]
    fn ramified_two_in_gaussian_integers() {
        let k = field("Q(sqrt-1)").unwrap();
        let f = ideal_factor(k, &OIdeal::from_integer(k, 2).unwrap()).unwrap();
        assert_eq!(f.len(), 1);
        assert_eq!(f[0].1, 2);
    }

    #[test]
    fn ideal_counts_match_splitting() {
        let k = field("Q(sqrt-1)").unwrap();
        assert_eq!(ideals_of_norm(k, 5).len(), 2);
        assert_eq!(ideals_of_norm(k, 3).len(), 0);
        assert_eq!(ideals_of_norm(k, 9).len(), 1);
        assert_eq!(ideals_of_norm(k, 25).len(), 3);
        assert_eq!(ideals_of_norm(k, 2).len(), 1);
    }

    #[test]
    fn parse_round_trip() {
        let k = field("Q(sqrt-1)").unwrap();
        let g = OIdeal::principal(k, &[2, 1]).unwrap();
        assert_eq!(OIdeal::parse_hnf(k, &g.to_string()).unwrap(), g);
        assert!(OIdeal::parse_hnf(k, "1,0;0,2").is_err());
    }
}
