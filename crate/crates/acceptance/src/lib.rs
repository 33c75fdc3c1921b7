//! Reporter for the acceptance suite. Each criterion prints one
//! `PASS`/`FAIL` line directly to standard output, bypassing the test
//! harness capture.

use std::io::Write;
use std::panic::{catch_unwind, UnwindSafe};
use std::time::{Duration, Instant};

/// Runs `body`, prints the verdict line and panics on failure.
///
/// `body` returns a short detail string on success; a panic or an `Err`
/// is a failure, and so is overrunning `limit`.
pub fn criterion<F>(suite: &str, name: &str, limit: Duration, body: F)
where
    F: FnOnce() -> Result<String, String> + UnwindSafe,
{
    let start = Instant::now();
    let outcome = match catch_unwind(body) {
        Ok(r) => r,
        Err(p) => Err(p
            .downcast_ref::<String>()
            .cloned()
            .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
            .unwrap_or_else(|| "panicked".into())),
    };
    let took = start.elapsed();
    let outcome = match outcome {
        Ok(d) if took > limit => Err(format!("{d}; took {:.1} s, limit {} s", took.as_secs_f64(), limit.as_secs())),
        other => other,
    };
    let (verdict, detail) = match &outcome {
        Ok(d) => ("PASS", d.as_str()),
        Err(e) => ("FAIL", e.as_str()),
    };
    let line = format!("{verdict} [{suite}] {name} ({:.2} s): {detail}\n", took.as_secs_f64());
    let mut out = std::io::stdout().lock();
    let _ = out.write_all(line.as_bytes());
    let _ = out.flush();
    if let Err(e) = outcome {
        panic!("{suite}/{name}: {e}");
    }
}

/// `Err` with a message unless `cond` holds.
pub fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}
