use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num_bigint::BigUint;
use num_traits::{ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use vk_exactla::Factorization;

use super::constants::bv_limit;
use super::group::GroupDescriptor;
use crate::algebra::field::field;
use crate::algebra::ideal::{ideal_factor, OIdeal};
use crate::error::{CoreError, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum PrimeTag {
    Torsion,
    Congruence,
    Exotic,
}

impl fmt::Display for PrimeTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            PrimeTag::Torsion => "torsion",
            PrimeTag::Congruence => "congruence",
            PrimeTag::Exotic => "exotic",
        })
    }
}

impl std::str::FromStr for PrimeTag {
    type Err = CoreError;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "torsion" => Ok(PrimeTag::Torsion),
            "congruence" => Ok(PrimeTag::Congruence),
            "exotic" => Ok(PrimeTag::Exotic),
            _ => Err(CoreError::InvalidInput(format!("unknown prime tag `{s}`"))),
        }
    }
}

pub const RESIDUAL_TAG: &str = "unclassified-residual";

/// Torsion in one Voronoi degree at one level, with its primes classified.
#[derive(Clone, Debug, PartialEq)]
pub struct TorsionReport {
    pub group: GroupDescriptor,
    pub level: OIdeal,
    pub level_norm: u64,
    pub index: u64,
    pub degree: usize,
    pub betti: usize,
    pub torsion_factored: Factorization,
    pub classification: BTreeMap<BigUint, PrimeTag>,
    pub log_ratio: f64,
    pub is_prime_level: bool,
}

/// Natural logarithm of an arbitrarily large integer.
pub fn big_ln(x: &BigUint) -> f64 {
    if x.is_zero() {
        return f64::NEG_INFINITY;
    }
    let bits = x.bits();
    if bits < 1000 {
        return x.to_f64().expect("finite").ln();
    }
    let shift = bits - 64;
    (x >> shift).to_f64().expect("finite").ln() + shift as f64 * std::f64::consts::LN_2
}

/// Primes dividing Norm(p) - 1 for the prime ideals p of the level.
pub fn congruence_moduli(level: &OIdeal) -> Result<Vec<u64>> {
    let k = field(&level.field)?;
    Ok(ideal_factor(k, level)?.into_iter().map(|(p, _)| p.ideal.norm - 1).collect())
}

pub fn classify_primes(
    group: &GroupDescriptor,
    level: &OIdeal,
    index: u64,
    degree: usize,
    betti: usize,
    torsion: Factorization,
) -> Result<TorsionReport> {
    let k = group.number_field()?;
    if level.field != group.field {
        return Err(CoreError::InvalidInput(format!("level over {} for a group over {}", level.field, group.field)));
    }
    let moduli = congruence_moduli(level)?;
    let classification = torsion
        .primes
        .keys()
        .map(|p| {
            let tag = if p.to_u64().is_some_and(|q| group.torsion_primes.contains(&q)) {
                PrimeTag::Torsion
            } else if moduli.iter().any(|&m| m > 0 && (BigUint::from(m) % p).is_zero()) {
                PrimeTag::Congruence
            } else {
                PrimeTag::Exotic
            };
            (p.clone(), tag)
        })
        .collect();
    let log_ratio = if index == 0 { 0.0 } else { big_ln(&torsion.value()) / index as f64 };
    Ok(TorsionReport {
        group: group.clone(),
        level: level.clone(),
        level_norm: level.norm,
        index,
        degree,
        betti,
        torsion_factored: torsion,
        classification,
        log_ratio,
        is_prime_level: level.is_prime(k),
    })
}

impl TorsionReport {
    pub fn exotic(&self) -> BTreeMap<BigUint, u32> {
        self.classification
            .iter()
            .filter(|(_, t)| **t == PrimeTag::Exotic)
            .map(|(p, _)| (p.clone(), self.torsion_factored.primes[p]))
            .collect()
    }

    /// Torsion order with the torsion primes of the group removed.
    pub fn torsion_away_from_small_primes(&self) -> BigUint {
        let mut v = BigUint::from(1u32);
        for (p, e) in &self.torsion_factored.primes {
            if self.classification.get(p) != Some(&PrimeTag::Torsion) {
                v *= p.pow(*e);
            }
        }
        for r in &self.torsion_factored.residuals {
            v *= r;
        }
        v
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Ordering {
    ByIndex,
    ByLevelNorm,
}

/// Horizontal reference line for a series.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum Reference {
    Limit(f64),
    ConjecturallyZero,
    Unavailable,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SeriesPoint {
    pub x: u64,
    pub y: f64,
    pub level: String,
    pub is_prime: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Series {
    pub points: Vec<SeriesPoint>,
    pub reference: Reference,
}

pub fn reference_for(group: &GroupDescriptor) -> Reference {
    if group.deficiency != 1 {
        return Reference::ConjecturallyZero;
    }
    match group.number_field().and_then(|k| bv_limit(k, group.n)) {
        Ok(v) => Reference::Limit(v.value),
        Err(_) => Reference::Unavailable,
    }
}

fn same_group(reports: &[TorsionReport]) -> Result<Option<&GroupDescriptor>> {
    let Some(first) = reports.first() else { return Ok(None) };
    if reports.iter().any(|r| r.group != first.group) {
        return Err(CoreError::InvalidInput("series mixes different groups".into()));
    }
    Ok(Some(&first.group))
}

fn sort_points(points: &mut [SeriesPoint]) {
    points.sort_by(|a, b| a.x.cmp(&b.x).then(a.level.cmp(&b.level)));
}

/// (index or level norm, log torsion / index) for one degree.
pub fn ratio_series(reports: &[TorsionReport], degree: usize, ordering: Ordering) -> Result<Series> {
    let group = same_group(reports)?;
    let mut points: Vec<SeriesPoint> = reports
        .iter()
        .filter(|r| r.degree == degree)
        .map(|r| SeriesPoint {
            x: match ordering {
                Ordering::ByIndex => r.index,
                Ordering::ByLevelNorm => r.level_norm,
            },
            y: r.log_ratio,
            level: r.level.to_string(),
            is_prime: r.is_prime_level,
        })
        .collect();
    sort_points(&mut points);
    Ok(Series {
        points,
        reference: group.map_or(Reference::Unavailable, reference_for),
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EulerPoint {
    pub point: SeriesPoint,
    /// Degrees of the window with no report at this level (counted as 0).
    pub missing: Vec<usize>,
}

/// Per level: sum over degrees i of (-1)^(i + i0) log|H_i,tors| / index.
pub fn euler_characteristic_series(reports: &[TorsionReport], sign_origin_degree: usize, ordering: Ordering) -> Result<Vec<EulerPoint>> {
    same_group(reports)?;
    let Some(lo) = reports.iter().map(|r| r.degree).min() else { return Ok(Vec::new()) };
    let hi = reports.iter().map(|r| r.degree).max().expect("nonempty");
    let mut by_level: BTreeMap<&OIdeal, Vec<&TorsionReport>> = BTreeMap::new();
    for r in reports {
        by_level.entry(&r.level).or_default().push(r);
    }
    let mut out: Vec<EulerPoint> = by_level
        .into_values()
        .map(|rs| {
            let first = rs[0];
            let mut y = 0.0;
            let mut missing = Vec::new();
            for i in lo..=hi {
                match rs.iter().find(|r| r.degree == i) {
                    Some(r) => {
                        let sign = if (i + sign_origin_degree) % 2 == 0 { 1.0 } else { -1.0 };
                        y += sign * r.log_ratio;
                    }
                    None => missing.push(i),
                }
            }
            EulerPoint {
                point: SeriesPoint {
                    x: match ordering {
                        Ordering::ByIndex => first.index,
                        Ordering::ByLevelNorm => first.level_norm,
                    },
                    y,
                    level: first.level.to_string(),
                    is_prime: first.is_prime_level,
                },
                missing,
            }
        })
        .collect();
    out.sort_by(|a, b| a.point.x.cmp(&b.point.x).then(a.point.level.cmp(&b.point.level)));
    Ok(out)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum LevelFilter {
    All,
    Prime,
    /// Powers of a seed ideal.
    Tower(OIdeal),
}

impl LevelFilter {
    pub fn keeps(&self, level: &OIdeal) -> Result<bool> {
        match self {
            LevelFilter::All => Ok(true),
            LevelFilter::Prime => Ok(level.is_prime(field(&level.field)?)),
            LevelFilter::Tower(seed) => {
                if seed.field != level.field || seed.norm <= 1 {
                    return Ok(false);
                }
                let k = field(&level.field)?;
                let mut p = seed.clone();
                while p.norm <= level.norm {
                    if p == *level {
                        return Ok(true);
                    }
                    p = p.mul(k, seed);
                }
                Ok(false)
            }
        }
    }
}

pub fn filter_series(reports: &[TorsionReport], filter: &LevelFilter) -> Result<Vec<TorsionReport>> {
    let mut out = Vec::new();
    for r in reports {
        if filter.keeps(&r.level)? {
            out.push(r.clone());
        }
    }
    Ok(out)
}

/// Primes exotic in both reports, with their exponents in each.
pub fn shared_exotic_report(a: &TorsionReport, b: &TorsionReport) -> Result<BTreeMap<BigUint, (u32, u32)>> {
    if a.level.field != "Q" || b.level.field != "Q" || a.level_norm != b.level_norm {
        return Err(CoreError::InvalidInput("shared exotic report needs the same rational level".into()));
    }
    let ea = a.exotic();
    let eb = b.exotic();
    let common: BTreeSet<&BigUint> = ea.keys().filter(|p| eb.contains_key(*p)).collect();
    Ok(common.into_iter().map(|p| (p.clone(), (ea[p], eb[p]))).collect())
}

/// Row-local recheck of a classification from its own level and torsion.
pub fn reclassify(report: &TorsionReport) -> Result<BTreeMap<BigUint, PrimeTag>> {
    Ok(classify_primes(
        &report.group,
        &report.level,
        report.index,
        report.degree,
        report.betti,
        report.torsion_factored.clone(),
    )?
    .classification)
}
