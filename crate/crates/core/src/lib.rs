//! Discrete Liouville quantum gravity laboratory: Gaussian free fields,
//! first-passage-percolation metrics and geodesics, SLE traces, and the
//! annulus-crossing, dimension and removability statistics that tell them apart.

pub mod analysis;
pub mod crossings;
pub mod error;
pub mod geom;
pub mod grf;
pub mod harness;
pub mod lfpp;
pub mod loewner;
pub mod path;
pub mod rng;

pub use error::{LabError, Result};
pub use geom::{Point, Rect};
pub use path::{PathKind, PlanarPath};
