//! On-disk caches: one JSON record per fan, one directory of sparse
//! triple files per assembled complex.

use std::fmt::Write as _;
use std::fs;
use std::io::BufReader;
use std::path::{Path, PathBuf};

use log::{info, warn};
use serde::{Deserialize, Serialize};
use vk_core::algebra::{NumberField, OIdeal};
use vk_core::complex::{assemble_complex, gamma0_cosets, OrientedGenerator, VoronoiComplex};
use vk_core::voronoi::{cell_complex, Fan, FormSpace};
use vk_exactla::SparseIntMatrix;

use crate::error::{IoContext, PipelineError, Result};
use crate::fsutil::{sha256_hex, write_atomic};
use crate::job::slug;

pub const FAN_FORMAT: &str = "vk-fan";
pub const COMPLEX_FORMAT: &str = "vk-complex";
pub const CACHE_VERSION: u32 = 1;

#[derive(Serialize, Deserialize)]
struct FanRecord {
    format: String,
    version: u32,
    field: String,
    n: usize,
    catalog_sha256: String,
    fan: Fan,
}

#[derive(Clone, Debug)]
pub struct CachedFan {
    pub fan: Fan,
    /// Hash of the cache file contents.
    pub sha256: String,
    pub path: PathBuf,
}

pub fn fan_path(cache: &Path, k: &NumberField, n: usize) -> PathBuf {
    cache.join(format!("fan-{}-n{n}.json", slug(&k.label)))
}

fn read_fan(path: &Path, k: &NumberField, n: usize) -> Result<CachedFan> {
    let bytes = fs::read(path).at(path)?;
    let bad = |msg: String| PipelineError::Cache { path: path.to_path_buf(), msg };
    let rec: FanRecord = serde_json::from_slice(&bytes).map_err(|e| bad(e.to_string()))?;
    if rec.format != FAN_FORMAT || rec.version != CACHE_VERSION {
        return Err(bad(format!("format {} v{} is not {FAN_FORMAT} v{CACHE_VERSION}", rec.format, rec.version)));
    }
    if rec.field != k.label || rec.n != n || rec.fan.field != k.label || rec.fan.n != n {
        return Err(bad(format!("holds GL{}({}), wanted GL{n}({})", rec.n, rec.field, k.label)));
    }
    if rec.catalog_sha256 != sha256_hex(k.record.as_bytes()) {
        return Err(bad("catalog entry changed since the fan was built".into()));
    }
    Ok(CachedFan {
        fan: rec.fan,
        sha256: sha256_hex(&bytes),
        path: path.to_path_buf(),
    })
}

/// Loads the fan of GL_n over `k`, rebuilding it when the cache is
/// missing, stale or corrupt.
pub fn load_or_build_fan(cache: &Path, k: &'static NumberField, n: usize) -> Result<CachedFan> {
    let path = fan_path(cache, k, n);
    if path.exists() {
        match read_fan(&path, k, n) {
            Ok(f) => return Ok(f),
            Err(e) => warn!("{e}; rebuilding"),
        }
    }
    info!("building the fan of GL{n}({})", k.label);
    let fan = cell_complex(&FormSpace::new(k, n)?)?;
    let rec = FanRecord {
        format: FAN_FORMAT.into(),
        version: CACHE_VERSION,
        field: k.label.clone(),
        n,
        catalog_sha256: sha256_hex(k.record.as_bytes()),
        fan,
    };
    let bytes = serde_json::to_vec(&rec)?;
    write_atomic(&path, &bytes)?;
    Ok(CachedFan {
        fan: rec.fan,
        sha256: sha256_hex(&bytes),
        path,
    })
}

#[derive(Clone, Debug)]
pub struct CachedComplex {
    pub complex: VoronoiComplex,
    /// Hash over the header, generator table and boundary files.
    pub sha256: String,
}

pub fn complex_dir(cache: &Path, k: &NumberField, n: usize, level: &OIdeal) -> PathBuf {
    cache.join(format!("complex-{}-n{n}-N{}-{}", slug(&k.label), level.norm, slug(&level.to_string())))
}

struct ComplexFiles {
    header: String,
    generators: String,
    boundaries: Vec<Vec<u8>>,
}

impl ComplexFiles {
    fn sha256(&self) -> String {
        let mut all = Vec::new();
        all.extend_from_slice(self.header.as_bytes());
        all.extend_from_slice(self.generators.as_bytes());
        for b in &self.boundaries {
            all.extend_from_slice(b);
        }
        sha256_hex(&all)
    }
}

fn encode_complex(c: &VoronoiComplex, fan_sha256: &str) -> Result<ComplexFiles> {
    let ranks: Vec<String> = c.ranks().iter().map(|r| r.to_string()).collect();
    let header = format!(
        "format={COMPLEX_FORMAT}\nversion={CACHE_VERSION}\nfield={}\nn={}\nlevel_hnf={}\nlevel_norm={}\nindex={}\nfan_sha256={fan_sha256}\nranks={}\n",
        c.field,
        c.n,
        c.level,
        c.level.norm,
        c.index,
        ranks.join(",")
    );
    let mut generators = String::new();
    for (k, gens) in c.generators.iter().enumerate() {
        for g in gens {
            let _ = writeln!(generators, "{k} {} {}", g.cell_orbit, g.coset);
        }
    }
    let meta = |k: usize| {
        vec![
            ("field", c.field.clone()),
            ("n", c.n.to_string()),
            ("level_hnf", c.level.to_string()),
            ("degree", k.to_string()),
        ]
    };
    let boundaries = c
        .boundaries
        .iter()
        .enumerate()
        .map(|(k, d)| {
            let mut buf = Vec::new();
            d.write_triples(&mut buf, &meta(k))?;
            Ok(buf)
        })
        .collect::<Result<_>>()?;
    Ok(ComplexFiles { header, generators, boundaries })
}

fn header_map(text: &str) -> std::collections::BTreeMap<&str, &str> {
    text.lines().filter_map(|l| l.split_once('=')).collect()
}

fn read_complex(dir: &Path, k: &NumberField, n: usize, level: &OIdeal, fan_sha256: &str) -> Result<CachedComplex> {
    let bad = |msg: String| PipelineError::Cache { path: dir.to_path_buf(), msg };
    let header_path = dir.join("header.txt");
    let header = fs::read_to_string(&header_path).at(&header_path)?;
    let h = header_map(&header);
    let want = [
        ("format", COMPLEX_FORMAT.to_string()),
        ("version", CACHE_VERSION.to_string()),
        ("field", k.label.clone()),
        ("n", n.to_string()),
        ("level_hnf", level.to_string()),
        ("fan_sha256", fan_sha256.to_string()),
    ];
    for (key, v) in &want {
        if h.get(key) != Some(&v.as_str()) {
            return Err(bad(format!("header `{key}` is {:?}, expected {v}", h.get(key))));
        }
    }
    let index: usize = h.get("index").and_then(|s| s.parse().ok()).ok_or_else(|| bad("bad index".into()))?;
    let ranks: Vec<usize> = h
        .get("ranks")
        .ok_or_else(|| bad("missing ranks".into()))?
        .split(',')
        .map(|s| s.parse().map_err(|_| bad(format!("bad rank `{s}`"))))
        .collect::<Result<_>>()?;
    let gen_path = dir.join("generators.txt");
    let gen_text = fs::read_to_string(&gen_path).at(&gen_path)?;
    let mut generators: Vec<Vec<OrientedGenerator>> = vec![Vec::new(); ranks.len()];
    for line in gen_text.lines() {
        let v: Vec<usize> = line
            .split_whitespace()
            .map(|s| s.parse().map_err(|_| bad(format!("bad generator line `{line}`"))))
            .collect::<Result<_>>()?;
        let [k, cell_orbit, coset] = v[..] else {
            return Err(bad(format!("bad generator line `{line}`")));
        };
        generators.get_mut(k).ok_or_else(|| bad(format!("degree {k} out of range")))?.push(OrientedGenerator { cell_orbit, coset });
    }
    if generators.iter().map(Vec::len).ne(ranks.iter().copied()) {
        return Err(bad("generator table disagrees with the header ranks".into()));
    }
    let mut boundaries = Vec::new();
    let mut files = Vec::new();
    for kk in 0..ranks.len() {
        let p = dir.join(format!("d{kk}.txt"));
        let bytes = fs::read(&p).at(&p)?;
        let (m, _) = SparseIntMatrix::read_triples(BufReader::new(bytes.as_slice()))?;
        let rows = if kk == 0 { 0 } else { ranks[kk - 1] };
        if m.rows() != rows || m.cols() != ranks[kk] {
            return Err(bad(format!("d{kk} is {}x{}, expected {rows}x{}", m.rows(), m.cols(), ranks[kk])));
        }
        boundaries.push(m);
        files.push(bytes);
    }
    let complex = VoronoiComplex {
        field: k.label.clone(),
        n,
        level: level.clone(),
        index,
        generators,
        boundaries,
    };
    for kk in 1..complex.top_dim() {
        if !complex.boundary(kk).mul(&complex.boundary(kk + 1))?.is_zero() {
            return Err(bad(format!("cached d{kk} d{} is nonzero", kk + 1)));
        }
    }
    let sha256 = ComplexFiles {
        header,
        generators: gen_text,
        boundaries: files,
    }
    .sha256();
    Ok(CachedComplex { complex, sha256 })
}

fn write_complex(dir: &Path, files: &ComplexFiles) -> Result<()> {
    let tmp = dir.with_extension(format!("tmp{}", std::process::id()));
    if tmp.exists() {
        fs::remove_dir_all(&tmp).at(&tmp)?;
    }
    fs::create_dir_all(&tmp).at(&tmp)?;
    let put = |name: &str, bytes: &[u8]| {
        let p = tmp.join(name);
        fs::write(&p, bytes).at(&p)
    };
    put("generators.txt", files.generators.as_bytes())?;
    for (k, b) in files.boundaries.iter().enumerate() {
        put(&format!("d{k}.txt"), b)?;
    }
    // header last: a directory without one is never trusted
    put("header.txt", files.header.as_bytes())?;
    if dir.exists() {
        fs::remove_dir_all(dir).at(dir)?;
    }
    fs::rename(&tmp, dir).at(dir)
}

/// Loads or assembles the complex of Gamma_0(level).
pub fn load_or_build_complex(cache: &Path, fan: &CachedFan, k: &'static NumberField, level: &OIdeal) -> Result<CachedComplex> {
    let n = fan.fan.n;
    let dir = complex_dir(cache, k, n, level);
    if dir.exists() {
        match read_complex(&dir, k, n, level, &fan.sha256) {
            Ok(c) => return Ok(c),
            Err(e) => warn!("{e}; rebuilding"),
        }
    }
    let cosets = gamma0_cosets(k, n, level)?;
    let complex = assemble_complex(&fan.fan, &cosets)?;
    let files = encode_complex(&complex, &fan.sha256)?;
    write_complex(&dir, &files)?;
    Ok(CachedComplex {
        sha256: files.sha256(),
        complex,
    })
}
