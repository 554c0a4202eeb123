//! Random walks on finitely generated groups.
//!
//! `potlab-core` holds the algorithmic half of potlab: group models with
//! canonical element keys, finitely supported probability measures and their
//! convolution powers, truncated Green functions with Martin kernels, the
//! harmonic-function pipeline built on them, and an exact lattice laboratory
//! for exit measures of simple random walk on grid domains.
//!
//! The crate is `no_std` and only needs `alloc`. File formats, configuration
//! and the command line live in the `potlab` crate.
//!
//! ```
//! use potlab_core::groups::GroupModel;
//! use potlab_core::measures::Measure;
//!
//! let f2 = GroupModel::free(2).unwrap();
//! let mu = Measure::simple_random_walk(&f2);
//! let mu2 = mu.convolve(&f2, &mu, 1_000).unwrap();
//! assert!((mu2.mass(&f2.identity()) - 0.25).abs() < 1e-15);
//! ```

#![no_std]
#![forbid(unsafe_code)]

extern crate alloc;
#[cfg(test)]
extern crate std;

mod codec;
pub mod error;
pub mod gridlab;
pub mod groups;
pub mod harmonic;
pub mod measures;
pub mod potential;

pub use error::{Error, ErrorKind, Result};
