//! Mergeable sketches built in one pass over the rows.
//!
//! * [`HyperplaneSketch`] / [`SignVector`]: random hyperplane signs per numeric
//!   column; the Hamming distance between two sign vectors estimates the angle
//!   between the centered columns and hence their correlation.
//! * [`FrequentItemsSketch`]: Space-Saving counters for heavy hitters.
//! * [`Reservoir`]: uniform sample backing approximate quantiles for box plots.

mod bits;
mod frequent;
mod hyperplane;
mod persist;
mod reservoir;

pub use bits::{estimate_all_pairs, estimate_correlation, hamming, SignVector, SymmetricMatrix};
pub use frequent::{FrequentItemsSketch, ItemCounter};
pub use hyperplane::{
    build_hyperplane, build_hyperplanes, build_hyperplanes_sequential, merge_hyperplane,
    HyperplaneConfig, HyperplaneSketch, NormalStream,
};
pub use persist::{read_sketch, write_sketch, SKETCH_MAGIC, SKETCH_VERSION};
pub use reservoir::{quantile_estimates, quantiles_of_sorted, Reservoir, DEFAULT_RESERVOIR};
