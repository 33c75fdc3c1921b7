//! The report CSV: one row per (group, level, Voronoi degree).

use std::collections::{BTreeMap, BTreeSet};
use std::path::Path;

use num_bigint::BigUint;
use vk_core::algebra::OIdeal;
use vk_core::analytics::reports::RESIDUAL_TAG;
use vk_core::analytics::{GroupDescriptor, PrimeTag, TorsionReport};
use vk_exactla::Factorization;

use crate::error::{PipelineError, Result};
use crate::fsutil::write_atomic;
use crate::job::lookup_field;

pub const COLUMNS: [&str; 11] = [
    "field_label",
    "n",
    "level_norm",
    "level_hnf",
    "index",
    "voronoi_degree",
    "betti",
    "torsion_factored",
    "log_ratio",
    "prime_tags",
    "is_prime_level",
];

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ReportRow {
    pub field_label: String,
    pub n: usize,
    pub level_norm: u64,
    pub level_hnf: String,
    pub index: u64,
    pub voronoi_degree: usize,
    pub betti: usize,
    pub torsion_factored: String,
    pub log_ratio: String,
    pub prime_tags: String,
    pub is_prime_level: bool,
}

/// 17 significant digits.
pub fn format_ratio(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn parse_factorization(s: &str) -> std::result::Result<Factorization, String> {
    let mut f = Factorization::default();
    for tok in s.split_whitespace() {
        if let Some(r) = tok.strip_prefix("R:") {
            f.residuals.push(r.parse().map_err(|_| format!("bad residual `{tok}`"))?);
            continue;
        }
        let (p, e) = match tok.split_once('^') {
            Some((p, e)) => (p, e.parse::<u32>().map_err(|_| format!("bad exponent in `{tok}`"))?),
            None => (tok, 1),
        };
        let p: BigUint = p.parse().map_err(|_| format!("bad prime `{tok}`"))?;
        if e == 0 || f.primes.insert(p, e).is_some() {
            return Err(format!("repeated or empty factor `{tok}`"));
        }
    }
    Ok(f)
}

pub fn render_tags(r: &TorsionReport) -> String {
    let mut parts: Vec<String> = r.classification.iter().map(|(p, t)| format!("{p}:{t}")).collect();
    parts.extend(r.torsion_factored.residuals.iter().map(|x| format!("{x}:{RESIDUAL_TAG}")));
    parts.join(" ")
}

/// Classification of the primes, ignoring residual entries.
pub fn parse_tags(s: &str) -> std::result::Result<BTreeMap<BigUint, PrimeTag>, String> {
    let mut out = BTreeMap::new();
    for tok in s.split_whitespace() {
        let (p, t) = tok.rsplit_once(':').ok_or_else(|| format!("bad tag `{tok}`"))?;
        if t == RESIDUAL_TAG {
            continue;
        }
        let tag: PrimeTag = t.parse().map_err(|_| format!("unknown tag in `{tok}`"))?;
        out.insert(p.parse().map_err(|_| format!("bad prime in `{tok}`"))?, tag);
    }
    Ok(out)
}

impl ReportRow {
    pub fn from_report(r: &TorsionReport) -> Self {
        ReportRow {
            field_label: r.group.field.clone(),
            n: r.group.n,
            level_norm: r.level_norm,
            level_hnf: r.level.to_string(),
            index: r.index,
            voronoi_degree: r.degree,
            betti: r.betti,
            torsion_factored: r.torsion_factored.render(),
            log_ratio: format_ratio(r.log_ratio),
            prime_tags: render_tags(r),
            is_prime_level: r.is_prime_level,
        }
    }

    /// Sort key: level norm, then HNF, then degree.
    pub fn key(&self) -> (u64, String, usize) {
        (self.level_norm, self.level_hnf.clone(), self.voronoi_degree)
    }

    fn record(&self) -> [String; 11] {
        [
            self.field_label.clone(),
            self.n.to_string(),
            self.level_norm.to_string(),
            self.level_hnf.clone(),
            self.index.to_string(),
            self.voronoi_degree.to_string(),
            self.betti.to_string(),
            self.torsion_factored.clone(),
            self.log_ratio.clone(),
            self.prime_tags.clone(),
            u8::from(self.is_prime_level).to_string(),
        ]
    }

    /// Rebuilds the report; the classification is taken from the row.
    pub fn to_report(&self) -> std::result::Result<TorsionReport, (&'static str, String)> {
        let k = lookup_field(&self.field_label).map_err(|e| ("field_label", e.to_string()))?;
        let group = GroupDescriptor::lookup(&self.field_label, self.n).map_err(|e| ("n", e.to_string()))?;
        let level = OIdeal::parse_hnf(k, &self.level_hnf).map_err(|e| ("level_hnf", e.to_string()))?;
        if level.norm != self.level_norm {
            return Err(("level_norm", format!("HNF has norm {}", level.norm)));
        }
        let torsion_factored = parse_factorization(&self.torsion_factored).map_err(|e| ("torsion_factored", e))?;
        let classification = parse_tags(&self.prime_tags).map_err(|e| ("prime_tags", e))?;
        let log_ratio: f64 = self.log_ratio.parse().map_err(|_| ("log_ratio", format!("not a number: `{}`", self.log_ratio)))?;
        Ok(TorsionReport {
            group,
            level,
            level_norm: self.level_norm,
            index: self.index,
            degree: self.voronoi_degree,
            betti: self.betti,
            torsion_factored,
            classification,
            log_ratio,
            is_prime_level: self.is_prime_level,
        })
    }
}

pub fn to_csv_bytes(rows: &[ReportRow]) -> Result<Vec<u8>> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(COLUMNS)?;
    for r in rows {
        w.write_record(r.record())?;
    }
    w.into_inner().map_err(|e| PipelineError::Csv(e.into_error().into()))
}

pub fn write_csv(path: &Path, rows: &[ReportRow]) -> Result<()> {
    write_atomic(path, &to_csv_bytes(rows)?)
}

fn schema_error(path: &Path, msg: String) -> PipelineError {
    PipelineError::Schema { path: path.to_path_buf(), msg }
}

pub fn read_csv(path: &Path) -> Result<Vec<ReportRow>> {
    let mut rd = csv::Reader::from_path(path).map_err(|e| schema_error(path, e.to_string()))?;
    let headers: Vec<String> = rd.headers()?.iter().map(str::to_string).collect();
    let have: BTreeSet<&str> = headers.iter().map(String::as_str).collect();
    let missing: Vec<&str> = COLUMNS.iter().copied().filter(|c| !have.contains(c)).collect();
    let extra: Vec<&str> = headers.iter().map(String::as_str).filter(|h| !COLUMNS.contains(h)).collect();
    if !missing.is_empty() || !extra.is_empty() {
        return Err(schema_error(path, format!("missing columns {missing:?}, unexpected columns {extra:?}")));
    }
    let pos: Vec<usize> = COLUMNS.iter().map(|c| headers.iter().position(|h| h == c).expect("checked")).collect();
    let mut rows = Vec::new();
    for (i, rec) in rd.records().enumerate() {
        let rec = rec?;
        let row = i + 1;
        let get = |c: usize| rec.get(pos[c]).unwrap_or("");
        let num = |c: usize| -> Result<u64> {
            get(c).parse().map_err(|_| PipelineError::Row {
                path: path.to_path_buf(),
                row,
                column: COLUMNS[c],
                msg: format!("not a nonnegative integer: `{}`", get(c)),
            })
        };
        let is_prime_level = match get(10) {
            "0" => false,
            "1" => true,
            v => {
                return Err(PipelineError::Row {
                    path: path.to_path_buf(),
                    row,
                    column: COLUMNS[10],
                    msg: format!("expected 0 or 1, found `{v}`"),
                })
            }
        };
        rows.push(ReportRow {
            field_label: get(0).to_string(),
            n: num(1)? as usize,
            level_norm: num(2)?,
            level_hnf: get(3).to_string(),
            index: num(4)?,
            voronoi_degree: num(5)? as usize,
            betti: num(6)? as usize,
            torsion_factored: get(7).to_string(),
            log_ratio: get(8).to_string(),
            prime_tags: get(9).to_string(),
            is_prime_level,
        });
    }
    Ok(rows)
}

/// Parses every row back into a report, naming the offending column on failure.
pub fn reports_from_rows(path: &Path, rows: &[ReportRow]) -> Result<Vec<TorsionReport>> {
    rows.iter()
        .enumerate()
        .map(|(i, r)| {
            r.to_report().map_err(|(column, msg)| PipelineError::Row {
                path: path.to_path_buf(),
                row: i + 1,
                column,
                msg,
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn factorization_round_trip() {
        for s in ["", "5^3", "2 3^2 11 R:323", "R:91"] {
            assert_eq!(parse_factorization(s).unwrap().render(), s);
        }
        assert!(parse_factorization("2 2").is_err());
        assert!(parse_factorization("x").is_err());
        assert!(parse_factorization("3^0").is_err());
    }

    #[test]
    fn ratio_has_seventeen_digits() {
        let s = format_ratio(0.000732476036628005);
        let mantissa = s.split('e').next().unwrap().replace('.', "");
        assert_eq!(mantissa.len(), 17);
        assert_eq!(s.parse::<f64>().unwrap(), 0.000732476036628005);
    }

    #[test]
    fn tags() {
        let t = parse_tags("2:torsion 23:exotic 323:unclassified-residual").unwrap();
        assert_eq!(t.len(), 2);
        assert_eq!(t[&BigUint::from(23u32)], PrimeTag::Exotic);
        assert!(parse_tags("5:weird").is_err());
    }
}
