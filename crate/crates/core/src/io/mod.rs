//! Configuration, serialization, checkpoints and sweeps.

pub mod checkpoint;
pub mod config;
pub mod csv;
pub mod sweep;

pub use checkpoint::{checkpoint_read, checkpoint_write};
pub use config::{parse_config, RunConfig};
pub use csv::{read_timeseries, write_timeseries};
pub use sweep::{parse_sweep_config, run_sweep, SweepConfig};
