use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{CoreError, Result};
use crate::linalg::{self, Rat};

fn integer_scaled(gram: &[Vec<Rat>]) -> (Vec<Vec<BigInt>>, BigInt) {
    let l = gram.iter().flatten().fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
    let lr = Rat::from_integer(l.clone());
    (gram.iter().map(|r| r.iter().map(|x| (x * &lr).to_integer()).collect()).collect(), l)
}

/// Exact certificate: all leading principal minors are positive.
pub fn check_positive_definite(gram: &[Vec<Rat>]) -> Result<()> {
    let (g, _) = integer_scaled(gram);
    for (i, m) in linalg::leading_minors(&g).into_iter().enumerate() {
        if !m.is_positive() {
            return Err(CoreError::NotPositiveDefinite {
                index: i + 1,
                value: m.to_string(),
            });
        }
    }
    Ok(())
}

pub fn is_positive_definite(gram: &[Vec<Rat>]) -> bool {
    check_positive_definite(gram).is_ok()
}

/// Exact value `v^T G v` for a Gram matrix scaled to integers.
fn eval_int(g: &[Vec<BigInt>], v: &[i64]) -> BigInt {
    let mut acc = BigInt::zero();
    for (i, gi) in g.iter().enumerate() {
        if v[i] == 0 {
            continue;
        }
        let mut row = BigInt::zero();
        for (j, gij) in gi.iter().enumerate() {
            if v[j] != 0 {
                row += gij * v[j];
            }
        }
        acc += row * v[i];
    }
    acc
}

pub fn evaluate(gram: &[Vec<Rat>], v: &[i64]) -> Rat {
    let (g, l) = integer_scaled(gram);
    Rat::new(eval_int(&g, v), l)
}

/// All nonzero integer vectors with `v^T G v <= bound` (Fincke-Pohst in
/// floating point with a safety margin, then filtered exactly). The
/// result is closed under negation.
pub fn short_vectors(gram: &[Vec<Rat>], bound: &Rat) -> Result<Vec<Vec<i64>>> {
    check_positive_definite(gram)?;
    let n = gram.len();
    let gf: Vec<Vec<f64>> = gram.iter().map(|r| r.iter().map(|x| x.to_f64().unwrap_or(f64::NAN)).collect()).collect();
    // q[i][i] and q[i][j] (j > i) with Q(x) = sum_i q_ii (x_i + sum_{j>i} q_ij x_j)^2
    let mut q = gf.clone();
    for i in 0..n {
        for j in i + 1..n {
            q[j][i] = q[i][j];
            q[i][j] /= q[i][i];
        }
        for k in i + 1..n {
            for l in k..n {
                q[k][l] -= q[k][i] * q[i][l];
            }
        }
    }
    if (0..n).any(|i| !(q[i][i] > 0.0)) {
        return Err(CoreError::NotPositiveDefinite {
            index: 0,
            value: "floating Cholesky breakdown".into(),
        });
    }
    let c = bound.to_f64().unwrap_or(f64::INFINITY);
    let c = c * (1.0 + 1e-9) + 1e-9;
    let (gi, l) = integer_scaled(gram);
    let lim = bound * Rat::from_integer(l);
    let mut out = Vec::new();
    let mut x = vec![0i64; n];
    enumerate(&q, n, c, &mut x, &mut |v| {
        if v.iter().all(|&a| a == 0) {
            return;
        }
        if Rat::from_integer(eval_int(&gi, v)) <= lim {
            out.push(v.to_vec());
        }
    });
    Ok(out)
}

fn enumerate(q: &[Vec<f64>], i: usize, remaining: f64, x: &mut Vec<i64>, f: &mut impl FnMut(&[i64])) {
    if i == 0 {
        f(x);
        return;
    }
    let i = i - 1;
    let n = q.len();
    let center: f64 = -(i + 1..n).map(|j| q[i][j] * x[j] as f64).sum::<f64>();
    let r = (remaining.max(0.0) / q[i][i]).sqrt();
    let lo = (center - r).ceil() as i64;
    let hi = (center + r).floor() as i64;
    for t in lo..=hi {
        let d = t as f64 - center;
        let rest = remaining - q[i][i] * d * d;
        if rest < -1e-9 * remaining.abs().max(1.0) {
            continue;
        }
        x[i] = t;
        enumerate(q, i, rest, x, f);
    }
    x[i] = 0;
}

/// Minimum over nonzero lattice vectors and the vectors attaining it.
pub fn minimal_vectors(gram: &[Vec<Rat>]) -> Result<(Rat, Vec<Vec<i64>>)> {
    check_positive_definite(gram)?;
    let bound = (0..gram.len()).map(|i| gram[i][i].clone()).min().expect("nonempty form");
    let sv = short_vectors(gram, &bound)?;
    let vals: Vec<Rat> = sv.iter().map(|v| evaluate(gram, v)).collect();
    let min = vals.iter().min().cloned().expect("basis vectors lie within the bound");
    let mut vs: Vec<Vec<i64>> = sv.into_iter().zip(vals).filter(|(_, x)| *x == min).map(|(v, _)| v).collect();
    vs.sort();
    Ok((min, vs))
}
