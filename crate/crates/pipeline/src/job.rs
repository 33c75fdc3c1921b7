use std::path::PathBuf;

use vk_core::algebra::{field, NumberField};
use vk_core::analytics::GroupDescriptor;

use crate::error::{PipelineError, Result};

/// Parses `GL3(Q)` or `GL2(Q(sqrt-1))` into a field label and a rank.
pub fn parse_group(s: &str) -> Result<(String, usize)> {
    let bad = || PipelineError::Usage(format!("group `{s}` is not of the form GL<n>(<field>)"));
    let rest = s.trim().strip_prefix("GL").ok_or_else(bad)?;
    let open = rest.find('(').ok_or_else(bad)?;
    let n: usize = rest[..open].parse().map_err(|_| bad())?;
    let label = rest[open + 1..].strip_suffix(')').ok_or_else(bad)?;
    if n == 0 || label.is_empty() {
        return Err(bad());
    }
    Ok((label.to_string(), n))
}

pub fn lookup_field(label: &str) -> Result<&'static NumberField> {
    field(label).map_err(|_| PipelineError::Usage(format!("unknown field `{label}`")))
}

/// File-name-safe form of a label.
pub fn slug(s: &str) -> String {
    let mut out = String::new();
    for c in s.chars() {
        match c {
            c if c.is_ascii_alphanumeric() => out.push(c),
            '-' => out.push('m'),
            _ if !out.ends_with('_') => out.push('_'),
            _ => {}
        }
    }
    out.trim_matches('_').to_string()
}

/// Parses `all`, `3`, `2,3` or `1-3`; `None` means every degree of the complex.
pub fn parse_degrees(s: &str) -> Result<Option<Vec<usize>>> {
    let s = s.trim();
    if s.eq_ignore_ascii_case("all") {
        return Ok(None);
    }
    let bad = || PipelineError::Usage(format!("bad degree list `{s}`"));
    let mut out = Vec::new();
    for part in s.split(',') {
        match part.split_once('-') {
            Some((a, b)) => {
                let (a, b): (usize, usize) = (a.trim().parse().map_err(|_| bad())?, b.trim().parse().map_err(|_| bad())?);
                if a > b {
                    return Err(bad());
                }
                out.extend(a..=b);
            }
            None => out.push(part.trim().parse().map_err(|_| bad())?),
        }
    }
    out.sort_unstable();
    out.dedup();
    Ok(Some(out))
}

/// One sweep over a norm range for a fixed group.
#[derive(Clone, Debug)]
pub struct JobSpec {
    pub field: String,
    pub n: usize,
    pub min_norm: u64,
    pub max_norm: u64,
    /// Voronoi degrees; `None` for all degrees carrying cells.
    pub degrees: Option<Vec<usize>>,
    pub budget_sec: Option<f64>,
    pub budget_mem: Option<u64>,
    pub out: PathBuf,
    pub cache: PathBuf,
}

impl JobSpec {
    pub fn validate(&self) -> Result<GroupDescriptor> {
        let k = lookup_field(&self.field)?;
        if self.n == 0 {
            return Err(PipelineError::Usage("--n must be positive".into()));
        }
        if self.min_norm == 0 || self.max_norm == 0 {
            return Err(PipelineError::Usage("norm bounds must be positive".into()));
        }
        let g = vk_core::analytics::group_descriptor(k, self.n)?;
        if let Some(ds) = &self.degrees {
            if let Some(d) = ds.iter().find(|&&d| d as i64 > g.sym_dim) {
                return Err(PipelineError::Usage(format!("degree {d} exceeds the symmetric space dimension {}", g.sym_dim)));
            }
        }
        if self.budget_sec.is_some_and(|b| !(b >= 0.0)) {
            return Err(PipelineError::Usage("--budget-sec must be nonnegative".into()));
        }
        Ok(g)
    }

    pub fn group_slug(&self) -> String {
        format!("GL{}_{}", self.n, slug(&self.field))
    }
}
