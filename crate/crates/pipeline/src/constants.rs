use std::fmt::Write as _;

use vk_core::analytics::{bv_limit, group_descriptor};
use vk_core::CoreError;

use crate::error::Result;
use crate::job::{lookup_field, parse_group};

/// Summary line followed by `key=value` lines.
pub fn cmd_constants(group: &str) -> Result<String> {
    let (label, n) = parse_group(group)?;
    let k = lookup_field(&label)?;
    let g = group_descriptor(k, n)?;
    let primes: Vec<String> = g.torsion_primes.iter().map(u64::to_string).collect();
    let limit = match bv_limit(k, n) {
        Ok(v) => Ok(v),
        Err(CoreError::DeficiencyNotOne(_)) => Err("conjecturally zero (deficiency is not 1)".to_string()),
        Err(e) => Err(e.to_string()),
    };
    let mut out = String::new();
    let _ = write!(
        out,
        "# {}: deficiency {}, symmetric space dimension {}, torsion primes {}",
        g.label(),
        g.deficiency,
        g.sym_dim,
        primes.join(" ")
    );
    match &limit {
        Ok(v) => {
            let _ = writeln!(out, ", limit constant {:.15e}", v.value);
        }
        Err(note) => {
            let _ = writeln!(out, ", no limit constant: {note}");
        }
    }
    let mut kv = |key: &str, v: String| {
        let _ = writeln!(out, "{key}={v}");
    };
    kv("group", g.label());
    kv("field", g.field.clone());
    kv("n", n.to_string());
    kv("deficiency", g.deficiency.to_string());
    kv("sym_dim", g.sym_dim.to_string());
    kv("torsion_primes", primes.join(","));
    kv("vcd_top_voronoi_degree", g.vcd_top_voronoi_degree.to_string());
    kv("cuspidal_top_voronoi_degree", g.cuspidal_top_voronoi_degree.to_string());
    match limit {
        Ok(v) => {
            kv("bv_limit", v.value.to_string());
            kv("bv_limit_error", format!("{:e}", v.error_bound));
        }
        Err(note) => {
            kv("bv_limit", "none".into());
            kv("note", note);
        }
    }
    Ok(out)
}
