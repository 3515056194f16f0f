//! Regularity of paths: Hölder modulus, box-counting dimension, Whitney
//! decompositions of the complement, and harmonic-measure shadow sums.

mod boxcount;
mod holder;
mod shadow;
mod whitney;

pub use boxcount::{box_counting_dimension, BoxCounting, FIT_SCALES};
pub use holder::{holder_modulus, write_modulus_csv};
pub use shadow::{
    shadow_sum_estimate, DepthTotal, ShadowEstimate, ShadowSum, HIT_TOLERANCE, MAX_WALKER_STEPS, MIN_WALKERS,
};
pub use whitney::{whitney_decomposition, WhitneyCube, WhitneyDecomposition};
