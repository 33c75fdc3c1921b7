use std::collections::BTreeMap;
use std::time::{Duration, Instant};

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};

use crate::snf::ElementaryDivisors;

/// Prime factorization of a torsion order, possibly partial.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Factorization {
    pub primes: BTreeMap<BigUint, u32>,
    /// Composite cofactors left unsplit when the time budget ran out.
    pub residuals: Vec<BigUint>,
}

impl Factorization {
    pub fn is_complete(&self) -> bool {
        self.residuals.is_empty()
    }

    /// Product of all prime powers and residuals.
    pub fn value(&self) -> BigUint {
        let mut v = BigUint::one();
        for (p, e) in &self.primes {
            v *= p.pow(*e);
        }
        for r in &self.residuals {
            v *= r;
        }
        v
    }

    fn add_prime(&mut self, p: BigUint, e: u32) {
        *self.primes.entry(p).or_insert(0) += e;
    }

    fn merge(&mut self, other: Factorization) {
        for (p, e) in other.primes {
            self.add_prime(p, e);
        }
        self.residuals.extend(other.residuals);
    }

    /// `2^3 11 R:323`-style rendering.
    pub fn render(&self) -> String {
        let mut parts: Vec<String> = self
            .primes
            .iter()
            .map(|(p, e)| if *e == 1 { p.to_string() } else { format!("{p}^{e}") })
            .collect();
        parts.extend(self.residuals.iter().map(|r| format!("R:{r}")));
        parts.join(" ")
    }
}

const SMALL_PRIMES_LIMIT: u32 = 10_000;

fn small_primes() -> Vec<u32> {
    let n = SMALL_PRIMES_LIMIT as usize;
    let mut sieve = vec![true; n + 1];
    sieve[0] = false;
    sieve[1] = false;
    let mut i = 2;
    while i * i <= n {
        if sieve[i] {
            let mut j = i * i;
            while j <= n {
                sieve[j] = false;
                j += i;
            }
        }
        i += 1;
    }
    (2..=n).filter(|&k| sieve[k]).map(|k| k as u32).collect()
}

/// Deterministic for n < 3.3e24, probabilistic with fixed bases beyond.
pub fn is_probable_prime(n: &BigUint) -> bool {
    let two = BigUint::from(2u32);
    if n < &two {
        return false;
    }
    const BASES: [u32; 13] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41];
    for &b in &BASES {
        let b = BigUint::from(b);
        if n == &b {
            return true;
        }
        if (n % &b).is_zero() {
            return false;
        }
    }
    let n_minus_1 = n - 1u32;
    let s = n_minus_1.trailing_zeros().unwrap_or(0);
    let d = &n_minus_1 >> s;
    'witness: for &b in &BASES {
        let mut x = BigUint::from(b).modpow(&d, n);
        if x.is_one() || x == n_minus_1 {
            continue;
        }
        for _ in 1..s {
            x = (&x * &x) % n;
            if x == n_minus_1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// Brent's variant of Pollard rho; `None` when the deadline passes.
fn pollard_brent(n: &BigUint, deadline: Instant) -> Option<BigUint> {
    if n.is_even() {
        return Some(BigUint::from(2u32));
    }
    let m = 128u32;
    for c in 1u32.. {
        let c = BigUint::from(c);
        let f = |x: &BigUint| (x * x + &c) % n;
        let mut y = BigUint::from(2u32);
        let mut r = 1u64;
        let mut q = BigUint::one();
        let mut g = BigUint::one();
        let mut x = y.clone();
        let mut ys = y.clone();
        while g.is_one() {
            x = y.clone();
            for _ in 0..r {
                y = f(&y);
            }
            let mut k = 0u64;
            while k < r && g.is_one() {
                if Instant::now() >= deadline {
                    return None;
                }
                ys = y.clone();
                for _ in 0..m.min((r - k) as u32) {
                    y = f(&y);
                    let diff = if x > y { &x - &y } else { &y - &x };
                    q = (q * diff) % n;
                }
                g = q.gcd(n);
                k += m as u64;
            }
            r *= 2;
        }
        if &g == n {
            loop {
                ys = f(&ys);
                let diff = if x > ys { &x - &ys } else { &ys - &x };
                g = diff.gcd(n);
                if !g.is_one() {
                    break;
                }
            }
        }
        if &g != n {
            return Some(g);
        }
    }
    None
}

/// Factor `n` by trial division and Pollard rho within `budget`.
pub fn factor_integer(n: &BigUint, budget: Duration) -> Factorization {
    let deadline = Instant::now() + budget;
    let mut out = Factorization::default();
    if n.is_zero() {
        out.residuals.push(BigUint::zero());
        return out;
    }
    let mut m = n.clone();
    for p in small_primes() {
        if m.is_one() {
            break;
        }
        let pb = BigUint::from(p);
        let mut e = 0;
        while (&m % &pb).is_zero() {
            m /= &pb;
            e += 1;
        }
        if e > 0 {
            out.add_prime(pb, e);
        }
        if m.to_u64().is_some_and(|v| v < (p as u64) * (p as u64)) {
            break;
        }
    }
    if !m.is_one() {
        out.merge(split(m, deadline));
    }
    out
}

fn split(m: BigUint, deadline: Instant) -> Factorization {
    let mut out = Factorization::default();
    let mut stack = vec![m];
    while let Some(m) = stack.pop() {
        if m.is_one() {
            continue;
        }
        if is_probable_prime(&m) {
            out.add_prime(m, 1);
            continue;
        }
        if let Some(r) = perfect_power_root(&m) {
            let (root, k) = r;
            let sub = split(root, deadline);
            for (p, e) in sub.primes {
                out.add_prime(p, e * k);
            }
            for res in sub.residuals {
                for _ in 0..k {
                    out.residuals.push(res.clone());
                }
            }
            continue;
        }
        match pollard_brent(&m, deadline) {
            Some(d) => {
                let other = &m / &d;
                stack.push(d);
                stack.push(other);
            }
            None => out.residuals.push(m),
        }
    }
    out.residuals.sort();
    out
}

fn perfect_power_root(m: &BigUint) -> Option<(BigUint, u32)> {
    let bits = m.bits() as u32;
    for k in (2..=bits.max(2)).rev() {
        let r = m.nth_root(k);
        if r > BigUint::one() && r.pow(k) == *m {
            return Some((r, k));
        }
    }
    None
}

/// Factor the torsion order of `divisors`, splitting each invariant factor.
pub fn factor_torsion(divisors: &ElementaryDivisors, budget: Duration) -> Factorization {
    let deadline = Instant::now() + budget;
    let mut out = Factorization::default();
    for d in divisors.torsion() {
        let left = deadline.saturating_duration_since(Instant::now());
        out.merge(factor_integer(d, left));
    }
    out.residuals.sort();
    out
}
