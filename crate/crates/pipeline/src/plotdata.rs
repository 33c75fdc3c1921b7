//! Plot-data files: a `# key=value` header followed by `x,y,is_prime,tower` rows.

use std::fmt::Write as _;
use std::path::PathBuf;

use vk_core::algebra::OIdeal;
use vk_core::analytics::{
    euler_characteristic_series, filter_series, ratio_series, reference_for, LevelFilter, Ordering, Reference, SeriesPoint,
};

use crate::error::{PipelineError, Result};
use crate::job::lookup_field;
use crate::table::{read_csv, reports_from_rows};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Mode {
    Ratio,
    Euler,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum FilterSpec {
    All,
    Prime,
    /// Seed given as an integer or as an HNF like `[2,0;0,1]`.
    Tower(String),
}

impl std::str::FromStr for FilterSpec {
    type Err = PipelineError;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "all" => Ok(FilterSpec::All),
            "prime" => Ok(FilterSpec::Prime),
            _ => match s.strip_prefix("tower:") {
                Some(seed) if !seed.is_empty() => Ok(FilterSpec::Tower(seed.to_string())),
                _ => Err(PipelineError::Usage(format!("filter `{s}` is not all, prime or tower:<seed>"))),
            },
        }
    }
}

impl std::fmt::Display for FilterSpec {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            FilterSpec::All => f.write_str("all"),
            FilterSpec::Prime => f.write_str("prime"),
            FilterSpec::Tower(s) => write!(f, "tower:{s}"),
        }
    }
}

#[derive(Clone, Debug)]
pub struct PlotSpec {
    pub csv: PathBuf,
    /// The plotted degree in ratio mode; the degree counted with sign +1 in
    /// Euler mode.
    pub degree: usize,
    pub ordering: Ordering,
    pub filter: FilterSpec,
    pub mode: Mode,
}

fn level_filter(spec: &FilterSpec, field_label: &str) -> Result<LevelFilter> {
    Ok(match spec {
        FilterSpec::All => LevelFilter::All,
        FilterSpec::Prime => LevelFilter::Prime,
        FilterSpec::Tower(seed) => {
            let k = lookup_field(field_label)?;
            let ideal = match seed.parse::<i64>() {
                Ok(m) => OIdeal::from_integer(k, m),
                Err(_) => OIdeal::parse_hnf(k, seed),
            }
            .map_err(|e| PipelineError::Usage(format!("tower seed `{seed}`: {e}")))?;
            LevelFilter::Tower(ideal)
        }
    })
}

fn push_row(out: &mut String, p: &SeriesPoint, tower: &str) {
    let _ = writeln!(out, "{},{},{},{tower}", p.x, p.y, u8::from(p.is_prime));
}

/// Renders the plot-data file for one CSV.
pub fn cmd_plotdata(spec: &PlotSpec) -> Result<String> {
    let rows = read_csv(&spec.csv)?;
    let reports = reports_from_rows(&spec.csv, &rows)?;
    if let Some(r) = reports.iter().find(|r| r.group != reports[0].group) {
        return Err(PipelineError::Schema {
            path: spec.csv.clone(),
            msg: format!("rows mix {} and {}", reports[0].group.label(), r.group.label()),
        });
    }
    let group = reports.first().map(|r| r.group.clone());
    let filter = match &group {
        Some(g) => level_filter(&spec.filter, &g.field)?,
        None => LevelFilter::All,
    };
    let kept = filter_series(&reports, &filter)?;
    let tower = match &spec.filter {
        FilterSpec::Tower(s) => s.as_str(),
        _ => "",
    };
    let mut out = String::new();
    let mut header = |k: &str, v: String| {
        let _ = writeln!(out, "# {k}={v}");
    };
    header("group", group.as_ref().map_or("none".into(), |g| g.label()));
    header("degree", spec.degree.to_string());
    header(
        "mode",
        match spec.mode {
            Mode::Ratio => "ratio".into(),
            Mode::Euler => "euler".into(),
        },
    );
    header(
        "ordering",
        match spec.ordering {
            Ordering::ByIndex => "index".into(),
            Ordering::ByLevelNorm => "norm".into(),
        },
    );
    header("filter", spec.filter.to_string());
    let reference = group.as_ref().map_or(Reference::Unavailable, reference_for);
    let (value, kind) = match (spec.mode, reference) {
        // the alternating sum has no published limit line
        (Mode::Euler, _) | (_, Reference::Unavailable) => ("none".to_string(), "unavailable"),
        (Mode::Ratio, Reference::Limit(v)) => (v.to_string(), "limit"),
        (Mode::Ratio, Reference::ConjecturallyZero) => ("0".to_string(), "conjecturally-zero"),
    };
    header("reference", value);
    header("reference_kind", kind.into());
    match spec.mode {
        Mode::Ratio => {
            let series = ratio_series(&kept, spec.degree, spec.ordering)?;
            out.push_str("x,y,is_prime,tower\n");
            for p in &series.points {
                push_row(&mut out, p, tower);
            }
        }
        Mode::Euler => {
            let series = euler_characteristic_series(&kept, spec.degree, spec.ordering)?;
            let gaps = series.iter().filter(|e| !e.missing.is_empty()).count();
            let _ = writeln!(out, "# levels_with_missing_degrees={gaps}");
            out.push_str("x,y,is_prime,tower\n");
            for e in &series {
                push_row(&mut out, &e.point, tower);
            }
        }
    }
    Ok(out)
}
