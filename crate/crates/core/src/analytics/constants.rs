use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::group::deficiency;
use crate::algebra::field::{field, NumberField};
use crate::algebra::zeta::{dedekind_zeta, regulator};
use crate::error::{CoreError, Result};

/// Digits requested from the zeta evaluations feeding the constants.
pub const CONSTANT_DIGITS: u32 = 20;

/// A real constant with an absolute error bound.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundedReal {
    pub value: f64,
    pub error_bound: f64,
}

impl BoundedReal {
    fn new(value: f64, relative: f64) -> Self {
        // relative error from the inputs plus a few roundings
        BoundedReal {
            value,
            error_bound: value.abs() * (relative + 16.0 * f64::EPSILON),
        }
    }
}

fn zeta_rel(k: &NumberField, s: u32, digits: u32) -> Result<(f64, f64)> {
    let z = dedekind_zeta(k, s, digits)?;
    Ok((z.value, z.error_bound / z.value.abs()))
}

fn factorial(n: u64) -> f64 {
    (1..=n).map(|k| k as f64).product()
}

/// Volume of SU(n) for the metric induced by the trace form.
pub fn vol_su(n: u32) -> f64 {
    let n64 = n as f64;
    let e = (n * n + n - 2) as f64 / 2.0;
    let denom: f64 = (1..n as u64).map(factorial).product();
    n64.sqrt() * (2.0 * PI).powf(e) / denom
}

/// Volume of SO(3) for the same normalization: SU(2)/{+-1} with lengths
/// doubled under the covering map.
pub fn vol_so3() -> f64 {
    16.0 * 2f64.sqrt() * PI * PI
}

/// Covolume of SL_n(Z) in SL_n(R).
pub fn vol_sln_quotient(n: u32, digits: u32) -> Result<BoundedReal> {
    let q = field("Q")?;
    let mut v = 2f64.powf((n as f64 - 1.0) / 2.0);
    let mut rel = 0.0;
    for k in 2..=n {
        let (z, r) = zeta_rel(q, k, digits)?;
        v *= z;
        rel += r;
    }
    Ok(BoundedReal::new(v, rel))
}

fn gl_n_z(n: u32, digits: u32) -> Result<BoundedReal> {
    let rn = match n {
        3 => 0.5,
        4 => 124.0 / 45.0,
        _ => return Err(CoreError::Unsupported(format!("no limit constant for GL_{n}(Z)"))),
    };
    let q = field("Q")?;
    let mut prod = 1.0;
    let mut rel = 0.0;
    for k in 2..=n {
        let (z, r) = zeta_rel(q, k, digits)?;
        prod *= factorial(k as u64 - 1) * z;
        rel += r;
    }
    let nn = n as f64;
    let denom = 2f64.powf((nn * nn - 1.0) / 2.0) * PI.powf((nn * nn + nn - 2.0) / 2.0) * nn.sqrt();
    Ok(BoundedReal::new(PI * rn * prod / denom, rel))
}

/// The conjectured limit of log|H_tors| / index in the critical degree,
/// for the deficiency-one groups with a known closed form.
pub fn bv_limit(k: &NumberField, n: usize) -> Result<BoundedReal> {
    bv_limit_with(k, n, CONSTANT_DIGITS)
}

pub fn bv_limit_with(k: &NumberField, n: usize, digits: u32) -> Result<BoundedReal> {
    let delta = deficiency(k, n);
    if delta != 1 {
        return Err(CoreError::DeficiencyNotOne(delta));
    }
    let disc = (k.discriminant.unsigned_abs() as f64).powf(1.5);
    match (k.degree, k.r, k.s, n) {
        (1, _, _, 3 | 4) => gl_n_z(n as u32, digits),
        (2, 0, 1, 2) => {
            let (z, r) = zeta_rel(k, 2, digits)?;
            Ok(BoundedReal::new(disc * z / (48.0 * PI.powi(3)), r))
        }
        (3, 1, 1, 2) => {
            let (z, r) = zeta_rel(k, 2, digits)?;
            let reg = regulator(k)?;
            // the regulator is a double precision log determinant
            Ok(BoundedReal::new(disc * reg * z / (48.0 * PI.powi(5)), r + 64.0 * f64::EPSILON))
        }
        _ => Err(CoreError::Unsupported(format!("no limit constant for GL_{n} over {}", k.label))),
    }
}

/// L2 torsion of SL_3(R) for the representation of highest weight
/// (p, q, r), p >= q >= r.
pub fn sl3_l2torsion(p: i64, q: i64, r: i64) -> Result<f64> {
    if !(p >= q && q >= r) {
        return Err(CoreError::InvalidInput(format!("weight ({p}, {q}, {r}) is not dominant")));
    }
    Ok(sl3_prefactor() * sl3_bracket(p as f64, q as f64, r as f64, None))
}

pub fn sl3_prefactor() -> f64 {
    PI * vol_so3() / vol_su(3)
}

/// The bracketed polynomial; `branch` forces one side of the C2 split.
pub fn sl3_bracket(p: f64, q: f64, r: f64, branch: Option<bool>) -> f64 {
    let a1 = (p + 1.0 - q) / 2.0;
    let a2 = (p - r + 2.0) / 2.0;
    let a3 = (q - r + 1.0) / 2.0;
    let c1 = (p + q - 2.0 * r + 3.0) / 3.0;
    let c2 = (p + r - 2.0 * q) / 3.0;
    let c3 = (2.0 * p - q - r + 3.0) / 3.0;
    let upper = branch.unwrap_or(c2 >= 0.0);
    let tail = if upper { a3 * c3 } else { a1 * c1 };
    2.0 * a1 * a3 * c1 * c3 + 2.0 * a2 * c2.abs() * tail
}
