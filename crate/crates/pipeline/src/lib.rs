//! Driver for torsion sweeps over congruence levels: cached fans and
//! complexes, budgeted per-level homology, a resumable report CSV with its
//! run ledger, limit constants and plot-data files.

pub mod cache;
pub mod constants;
pub mod error;
pub mod fsutil;
pub mod job;
pub mod ledger;
pub mod plotdata;
pub mod run;
pub mod table;

pub use constants::cmd_constants;
pub use error::{PipelineError, Result};
pub use job::{parse_degrees, parse_group, JobSpec};
pub use ledger::{LedgerEntry, RunLedger, Status};
pub use plotdata::{cmd_plotdata, FilterSpec, Mode, PlotSpec};
pub use run::{cmd_run, RunOutcome};
pub use table::{read_csv, ReportRow, COLUMNS};
