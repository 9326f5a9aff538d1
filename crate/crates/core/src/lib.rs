//! In-place parallel super scalar samplesort (IPS⁴o) and its radix sibling
//! (IPS²Ra).
//!
//! Both sorters share one blockwise k-way partitioning engine: elements are
//! classified into per-thread buffer blocks, the blocks are permuted into
//! their bucket regions using per-bucket read/write pointer pairs, and a
//! cleanup pass moves the leftovers. Only `O(k·b)` extra memory is needed per
//! thread, independent of the input size.
//!
//! The crate is `no_std` (it needs `alloc`). The threaded scheduler lives
//! behind the default `std` feature; without it only the sequential sorters
//! are available.
//!
//! ```
//! let mut v = vec![5u64, 3, 9, 1, 1, 0];
//! ips4o::sort(&mut v, |a, b| a < b, 1, &ips4o::SortConfig::default()).unwrap();
//! assert_eq!(v, [0, 1, 1, 3, 5, 9]);
//! ```
#![cfg_attr(not(feature = "std"), no_std)]
#![cfg_attr(not(feature = "std"), allow(dead_code))]
#![forbid(unsafe_op_in_unsafe_fn)]

extern crate alloc;

pub mod classifier;
pub mod config;
pub mod element;
mod error;
pub mod partition;
pub mod scheduler;
pub mod trace;
mod util;

pub use config::{block_elements, effective_bucket_count, SortConfig};
pub use element::{ByKey, ByLess, ElementModel};
pub use error::Error;
pub use scheduler::{
    assign_task, base_case_sort, detect_easy_input, is_base_case, sort, sort_ips2ra, sort_ips4o,
    sort_radix, Assignment, EasyInput,
};
#[cfg(feature = "std")]
pub use scheduler::{sort_ips2ra_traced, sort_ips4o_traced};
