//! Task-file front end for `mcalg`: parse declarations and tasks, run them,
//! and write or replay JSON reports.

pub mod ops;
pub mod report;
pub mod taskfile;

pub use ops::Config;
pub use report::{replay, run, Report, RunOptions};
pub use taskfile::{ParseError, TaskFile};
