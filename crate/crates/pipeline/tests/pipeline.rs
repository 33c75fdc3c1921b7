use std::fs;
use std::path::Path;
use std::process::Command;

use num_bigint::BigInt;
use vk_core::algebra::{field, OIdeal};
use vk_core::analytics::reports::reclassify;
use vk_core::complex::{assemble_complex, gamma0_cosets};
use vk_core::voronoi::{cell_complex, FormSpace};
use vk_pipeline::table::{format_ratio, reports_from_rows, write_csv};
use vk_pipeline::{cmd_constants, cmd_plotdata, cmd_run, read_csv, FilterSpec, JobSpec, Mode, PipelineError, PlotSpec, ReportRow, Status};
use vk_core::analytics::Ordering;

fn spec(dir: &Path, field: &str, n: usize, max_norm: u64) -> JobSpec {
    JobSpec {
        field: field.into(),
        n,
        min_norm: 1,
        max_norm,
        degrees: None,
        budget_sec: None,
        budget_mem: None,
        out: dir.join("out"),
        cache: dir.join("cache"),
    }
}

fn kv(text: &str, key: &str) -> Option<String> {
    text.lines().find_map(|l| l.strip_prefix(&format!("{key}=")).map(str::to_string))
}

#[test]
fn constants_command() {
    let t = cmd_constants("GL3(Q)").unwrap();
    let v: f64 = kv(&t, "bv_limit").unwrap().parse().unwrap();
    assert!((v - 0.000732476036628005).abs() < 1e-12);
    let t = cmd_constants("GL2(Q(sqrt-1))").unwrap();
    assert_eq!(kv(&t, "deficiency").as_deref(), Some("1"));
    assert_eq!(kv(&t, "sym_dim").as_deref(), Some("3"));
    assert_eq!(kv(&t, "torsion_primes").as_deref(), Some("2,3"));
    let t = cmd_constants("GL5(Q)").unwrap();
    assert_eq!(kv(&t, "deficiency").as_deref(), Some("2"));
    assert_eq!(kv(&t, "bv_limit").as_deref(), Some("none"));
    assert!(kv(&t, "note").unwrap().contains("conjecturally zero"));
    assert!(matches!(cmd_constants("GL3(nope)"), Err(PipelineError::Usage(_))));
    assert!(matches!(cmd_constants("SL3(Q)"), Err(PipelineError::Usage(_))));
}

#[test]
fn gl2_sweep_matches_dense_oracle() {
    let dir = tempfile::tempdir().unwrap();
    let o = cmd_run(&spec(dir.path(), "Q", 2, 20)).unwrap();
    assert_eq!(o.ledger.entries.len(), 40);
    assert_eq!(o.ledger.count(Status::Done), 40);
    let rows = read_csv(&o.csv_path).unwrap();
    assert_eq!(rows.len(), 40);
    let q = field("Q").unwrap();
    let fan = cell_complex(&FormSpace::new(q, 2).unwrap()).unwrap();
    for r in &rows {
        let level = OIdeal::parse_hnf(q, &r.level_hnf).unwrap();
        let c = assemble_complex(&fan, &gamma0_cosets(q, 2, &level).unwrap()).unwrap();
        let k = r.voronoi_degree;
        let ranks = c.ranks();
        let dim_in = ranks.get(k + 1).copied().unwrap_or(0);
        let (betti, torsion) = vk_oracles::homology(&c.boundary(k).to_dense(), &c.boundary(k + 1).to_dense(), ranks[k], dim_in);
        assert_eq!(r.betti, betti);
        let order: BigInt = torsion.iter().product();
        let ours = vk_pipeline::table::parse_factorization(&r.torsion_factored).unwrap().value();
        assert_eq!(BigInt::from(ours), order, "level {}", r.level_hnf);
        assert_eq!(r.index, c.index as u64);
    }
}

#[test]
fn empty_range_gives_empty_ledger() {
    let dir = tempfile::tempdir().unwrap();
    let mut s = spec(dir.path(), "Q", 3, 4);
    s.min_norm = 5;
    let o = cmd_run(&s).unwrap();
    assert!(o.ledger.entries.is_empty());
    assert!(read_csv(&o.csv_path).unwrap().is_empty());
}

#[test]
fn tiny_budgets_skip_every_level() {
    let dir = tempfile::tempdir().unwrap();
    let mut s = spec(dir.path(), "Q", 2, 12);
    s.budget_mem = Some(1);
    let o = cmd_run(&s).unwrap();
    assert!(!o.ledger.entries.is_empty());
    assert!(o.ledger.entries.iter().all(|e| e.status == Status::SkippedBudget));
    assert!(read_csv(&o.csv_path).unwrap().is_empty());

    let dir = tempfile::tempdir().unwrap();
    let mut s = spec(dir.path(), "Q", 2, 12);
    s.budget_sec = Some(0.0);
    let o = cmd_run(&s).unwrap();
    assert!(o.ledger.entries.iter().all(|e| e.status == Status::SkippedBudget));

    // a later run with room finishes the skipped levels
    s.budget_sec = None;
    let o = cmd_run(&s).unwrap();
    assert_eq!(o.ledger.count(Status::Done), o.ledger.entries.len());
}

#[test]
fn rerun_is_idempotent() {
    let dir = tempfile::tempdir().unwrap();
    let s = spec(dir.path(), "Q(sqrt-1)", 2, 20);
    let a = cmd_run(&s).unwrap();
    let csv_a = fs::read(&a.csv_path).unwrap();
    let b = cmd_run(&s).unwrap();
    assert_eq!(b.levels_computed, 0);
    assert_eq!(fs::read(&b.csv_path).unwrap(), csv_a);
}

#[test]
fn resuming_matches_an_uninterrupted_run() {
    let whole = tempfile::tempdir().unwrap();
    let full = cmd_run(&spec(whole.path(), "Q", 3, 10)).unwrap();
    let want = fs::read(&full.csv_path).unwrap();

    // stopped after norm 6
    let parts = tempfile::tempdir().unwrap();
    cmd_run(&spec(parts.path(), "Q", 3, 6)).unwrap();
    let o = cmd_run(&spec(parts.path(), "Q", 3, 10)).unwrap();
    assert_eq!(o.levels_computed, 4);
    assert_eq!(fs::read(&o.csv_path).unwrap(), want);

    // killed mid-level: rows lost, ledger entries left pending
    let mut ledger = o.ledger.clone();
    for e in ledger.entries.iter_mut().filter(|e| e.level_norm >= 8) {
        e.status = Status::Pending;
    }
    ledger.save(&o.ledger_path).unwrap();
    let rows: Vec<ReportRow> = read_csv(&o.csv_path).unwrap().into_iter().filter(|r| r.level_norm < 9).collect();
    write_csv(&o.csv_path, &rows).unwrap();
    let o = cmd_run(&spec(parts.path(), "Q", 3, 10)).unwrap();
    assert_eq!(o.levels_computed, 3);
    assert_eq!(fs::read(&o.csv_path).unwrap(), want);
}

#[test]
fn corrupt_caches_are_rebuilt() {
    let dir = tempfile::tempdir().unwrap();
    let s = spec(dir.path(), "Q", 2, 8);
    let first = fs::read(cmd_run(&s).unwrap().csv_path).unwrap();
    let cache = dir.path().join("cache");
    fs::write(cache.join("fan-Q-n2.json"), b"{ not json").unwrap();
    let complex = fs::read_dir(&cache).unwrap().map(|e| e.unwrap().path()).find(|p| p.is_dir()).unwrap();
    fs::write(complex.join("d1.txt"), b"garbage").unwrap();
    fs::remove_dir_all(dir.path().join("out")).unwrap();
    let again = cmd_run(&s).unwrap();
    assert_eq!(fs::read(again.csv_path).unwrap(), first);
    let text = fs::read_to_string(cache.join("fan-Q-n2.json")).unwrap();
    assert!(text.starts_with("{\"format\":\"vk-fan\""));
}

#[test]
fn rows_reclassify_from_their_own_columns() {
    let dir = tempfile::tempdir().unwrap();
    let o = cmd_run(&spec(dir.path(), "Q", 3, 16)).unwrap();
    let rows = read_csv(&o.csv_path).unwrap();
    let reports = reports_from_rows(&o.csv_path, &rows).unwrap();
    assert!(reports.iter().any(|r| !r.classification.is_empty()));
    for r in &reports {
        assert_eq!(reclassify(r).unwrap(), r.classification);
        assert_eq!(r.classification.len(), r.torsion_factored.primes.len());
    }
}

#[test]
fn degree_selection_and_validation() {
    let dir = tempfile::tempdir().unwrap();
    let mut s = spec(dir.path(), "Q", 3, 5);
    s.degrees = Some(vec![3]);
    let o = cmd_run(&s).unwrap();
    assert!(o.ledger.entries.iter().all(|e| e.degree == 3));
    s.degrees = Some(vec![6]);
    assert!(matches!(cmd_run(&s), Err(PipelineError::Usage(_))));
    s.degrees = None;
    s.min_norm = 0;
    assert!(matches!(cmd_run(&s), Err(PipelineError::Usage(_))));
}

fn synthetic_row(norm: u64, degree: usize, index: u64, ratio: f64, torsion: &str, tags: &str) -> ReportRow {
    ReportRow {
        field_label: "Q".into(),
        n: 3,
        level_norm: norm,
        level_hnf: format!("[{norm}]"),
        index,
        voronoi_degree: degree,
        betti: 0,
        torsion_factored: torsion.into(),
        log_ratio: format_ratio(ratio),
        prime_tags: tags.into(),
        is_prime_level: [2, 3, 5, 7, 11, 13].contains(&norm),
    }
}

fn plot(csv: &Path, degree: usize, filter: FilterSpec, mode: Mode) -> Result<String, PipelineError> {
    cmd_plotdata(&PlotSpec {
        csv: csv.to_path_buf(),
        degree,
        ordering: Ordering::ByIndex,
        filter,
        mode,
    })
}

fn data_rows(text: &str) -> Vec<Vec<String>> {
    text.lines()
        .filter(|l| !l.starts_with('#') && !l.starts_with("x,"))
        .map(|l| l.split(',').map(str::to_string).collect())
        .collect()
}

#[test]
fn plotdata_constant_series_and_filters() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("s.csv");
    let c = 0.0123;
    let rows: Vec<ReportRow> = [2u64, 3, 4, 5, 6, 8]
        .iter()
        .map(|&m| synthetic_row(m, 3, 10 * m, c, "5", "5:exotic"))
        .collect();
    write_csv(&csv, &rows).unwrap();
    let text = plot(&csv, 3, FilterSpec::All, Mode::Ratio).unwrap();
    let limit = kv(&cmd_constants("GL3(Q)").unwrap(), "bv_limit").unwrap();
    assert!(text.contains(&format!("# reference={limit}\n")));
    assert!(text.contains("# group=GL3(Q)\n"));
    let pts = data_rows(&text);
    assert_eq!(pts.len(), 6);
    assert!(pts.iter().all(|p| p[1].parse::<f64>().unwrap() == c));
    let xs: Vec<u64> = pts.iter().map(|p| p[0].parse().unwrap()).collect();
    assert!(xs.windows(2).all(|w| w[0] <= w[1]));

    let primes = data_rows(&plot(&csv, 3, FilterSpec::Prime, Mode::Ratio).unwrap());
    assert_eq!(primes.iter().map(|p| p[0].as_str()).collect::<Vec<_>>(), ["20", "30", "50"]);
    assert!(primes.iter().all(|p| p[2] == "1"));

    let tower = data_rows(&plot(&csv, 3, "tower:2".parse().unwrap(), Mode::Ratio).unwrap());
    assert_eq!(tower.iter().map(|p| p[0].as_str()).collect::<Vec<_>>(), ["20", "40", "80"]);
    assert!(tower.iter().all(|p| p[3] == "2"));
}

#[test]
fn plotdata_euler_cancellation() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("e.csv");
    let mut rows = Vec::new();
    for m in 2..=9u64 {
        let r = (m as f64).ln() / 7.0;
        rows.push(synthetic_row(m, 2, 7 * m, r, "7", "7:exotic"));
        rows.push(synthetic_row(m, 3, 7 * m, r, "7", "7:exotic"));
    }
    write_csv(&csv, &rows).unwrap();
    let text = plot(&csv, 3, FilterSpec::All, Mode::Euler).unwrap();
    assert!(text.contains("# mode=euler\n"));
    let pts = data_rows(&text);
    assert_eq!(pts.len(), 8);
    assert!(pts.iter().all(|p| p[1] == "0"));
}

#[test]
fn plotdata_reports_schema_problems() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("bad.csv");
    fs::write(&csv, "field_label,n,level_norm\nQ,3,2\n").unwrap();
    let err = plot(&csv, 3, FilterSpec::All, Mode::Ratio).unwrap_err().to_string();
    assert!(err.contains("level_hnf") && err.contains("missing"), "{err}");
    let mut rows = vec![synthetic_row(2, 3, 7, 0.0, "", "")];
    rows[0].log_ratio = "abc".into();
    write_csv(&csv, &rows).unwrap();
    let err = plot(&csv, 3, FilterSpec::All, Mode::Ratio).unwrap_err().to_string();
    assert!(err.contains("log_ratio"), "{err}");
    assert!("tower:".parse::<FilterSpec>().is_err());
}

#[test]
fn cli_end_to_end() {
    let dir = tempfile::tempdir().unwrap();
    let bin = env!("CARGO_BIN_EXE_vk");
    let out = Command::new(bin).args(["constants", "GL4(Q)"]).output().unwrap();
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let v: f64 = kv(&text, "bv_limit").unwrap().parse().unwrap();
    assert!((v - 0.0000205999884056289).abs() < 1e-12);

    let run = Command::new(bin)
        .args(["run", "--group", "Q", "--n", "2", "--max-norm", "6", "--degrees", "1", "--out"])
        .arg(dir.path().join("out"))
        .env("VK_CACHE_DIR", dir.path().join("envcache"))
        .output()
        .unwrap();
    assert!(run.status.success(), "{}", String::from_utf8_lossy(&run.stderr));
    assert!(dir.path().join("envcache/fan-Q-n2.json").exists());
    let plot = Command::new(bin)
        .args(["plotdata", "--degree", "1", "--order", "norm", "--filter", "prime", "--csv"])
        .arg(dir.path().join("out/GL2_Q.csv"))
        .output()
        .unwrap();
    assert!(plot.status.success());
    let text = String::from_utf8(plot.stdout).unwrap();
    assert!(text.contains("# reference=0\n# reference_kind=conjecturally-zero"));
    assert_eq!(data_rows(&text).len(), 3);

    let bad = Command::new(bin).args(["constants", "GL3(nowhere)"]).output().unwrap();
    assert_eq!(bad.status.code(), Some(2));
}
