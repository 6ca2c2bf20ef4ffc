//! Image IO, experiment configuration and the command line for
//! [`toposnake_core`].

pub mod cli;
pub mod config;
pub mod experiment;
pub mod io;
pub mod presets;

pub use config::{ExperimentConfig, Input, Scene, SolverKind};
pub use experiment::{run_experiment, write_outputs, RegionCounts, SegmentationReport};
