//! Benchmark companion of the `ips4o` crate: input generators for ten
//! distributions and six element types, an out-of-place samplesort baseline,
//! validated timing runs and the slowdown statistics used to compare sorters.

pub mod baseline;
pub mod checksum;
pub mod gen;
pub mod runner;
pub mod stats;
pub mod types;

pub use checksum::{checksum, is_sorted};
pub use gen::{generate, Distribution};
pub use runner::{run_benchmark, Algorithm, RunConfig, RunRecord};
pub use types::{Bytes100, DataType, Element, Pair, Quartet};
