//! Configuration, batch commands and file formats.

pub mod config;
pub mod plot;
pub mod run;
pub mod snapshot;
pub mod tables;

pub use config::{Command, MomentumSpec, Overrides, RunConfig};
pub use plot::{render_plot, write_plot};
pub use run::{error_record, run_command, write_error_record, RunOutcome};
pub use snapshot::{read_field, write_field};
pub use tables::{read_table, write_trajectory};
