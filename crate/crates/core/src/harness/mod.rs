//! Experiment configuration, seeded runs with manifests, and figure rendering.

mod config;
mod experiments;
mod render;
mod run;

pub use config::{Experiment, ExperimentConfig, DEFAULT_EXTENT, KEYS};
pub use experiments::{dimension_scales, whitney_depth, whitney_root, FAN_BRANCHES};
pub use render::{color_map, render, render_png, RenderStyle, MARKER, TARGET_SIZE};
pub use run::{rerun, run, sha256_hex, OutputFile, RunManifest, Timings, MANIFEST_NAME};
