use alloc::vec::Vec;

use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};

use super::domain::{GridDomain, Point};
use super::solve::ExitKernel;
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq)]
pub struct McResult {
    pub paths: usize,
    /// Exits per boundary point.
    pub counts: Vec<u64>,
    pub empirical: Vec<f64>,
    /// Total-variation distance to the exact exit distribution.
    pub tv: f64,
}

/// Exit point (boundary index) of path number `path`. Each path draws from
/// its own ChaCha8 stream, so results do not depend on evaluation order.
pub fn sample_exit(d: &GridDomain, x: Point, seed: u64, path: u64) -> usize {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(path);
    let (dirs, bits): (&[(i64, i64)], u32) = if d.dim() == 1 {
        (&[(-1, 0), (1, 0)], 1)
    } else {
        (&[(0, -1), (-1, 0), (1, 0), (0, 1)], 2)
    };
    let mask = (1u64 << bits) - 1;
    let mut p = x;
    let mut word = 0u64;
    let mut left = 0u32;
    while d.is_interior(p) {
        if left < bits {
            word = rng.next_u64();
            left = 64;
        }
        let (dx, dy) = dirs[(word & mask) as usize];
        word >>= bits;
        left -= bits;
        p = (p.0 + dx, p.1 + dy);
    }
    d.boundary_index(p).expect("walk leaves the interior onto the boundary")
}

/// Monte Carlo exit distribution from `x`, compared with the exact kernel.
pub fn mc_exit_sampler(
    d: &GridDomain,
    kernel: &ExitKernel,
    x: Point,
    seed: u64,
    paths: usize,
) -> Result<McResult> {
    if paths == 0 {
        return Err(Error::usage("paths must be at least 1"));
    }
    let exact = kernel
        .distribution(d, x)
        .ok_or_else(|| Error::usage("start point is not interior"))?;
    let mut counts = alloc::vec![0u64; d.boundary().len()];
    for path in 0..paths as u64 {
        counts[sample_exit(d, x, seed, path)] += 1;
    }
    Ok(summarize(counts, exact))
}

/// Empirical distribution and TV distance from exit counts.
pub fn summarize(counts: Vec<u64>, exact: &[f64]) -> McResult {
    let paths: u64 = counts.iter().sum();
    let empirical: Vec<f64> = counts.iter().map(|&c| c as f64 / paths as f64).collect();
    let tv = 0.5
        * empirical
            .iter()
            .zip(exact)
            .map(|(a, b)| libm::fabs(a - b))
            .sum::<f64>();
    McResult {
        paths: paths as usize,
        counts,
        empirical,
        tv,
    }
}
