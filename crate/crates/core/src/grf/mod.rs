//! Discrete Gaussian free fields and the quantities built from them.

mod circle;
mod field;
mod harmonic;
mod io;
mod measure;
mod sample;

pub use circle::circle_average;
pub use field::{centered_origin, BoundaryKind, GridField, MIN_GRID_SIZE};
pub use harmonic::{
    good_scale_report, harmonic_decomposition, harmonic_oscillation, is_m_good, max_feasible_scales, GoodScaleReport,
    HarmonicDecomposition,
};
pub use io::{field_from_bytes, field_to_bytes, read_field, write_field, write_field_csv};
pub use measure::lqg_measure;
pub use sample::{sample_whole_plane_gff, sample_zero_boundary_gff, WHOLE_PLANE_NOTE, ZERO_BOUNDARY_NOTE};
