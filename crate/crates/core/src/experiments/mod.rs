//! Experiment harness: instance families, batch runs, result files, fits
//! and resource counts.

mod alpha;
mod batch;
mod fit;
mod persist;
mod resources;
mod tts;

pub use alpha::{estimate_alpha_bar, threshold_grid, AlphaMode, PerStartInstance, ThresholdSweepResult};
pub use batch::{instance_seed, per_start_path, run_batch, SK_TAG, BatchConfig, Family, InstanceResult, SolverSpec};
pub use fit::{density_table, fit_density, linear_fit, success_rate, DensityPoint, FitResult};
pub use persist::{read_per_start, read_results, write_per_start, write_results, PerStartRow};
pub use resources::{cnot_count, Topology};
pub use tts::{fit_exponent, time_sizes, time_solver, tts_benchmark, TtsConfig, TtsReport, TtsRow, MIN_MEASUREMENT_S};
