//! Exact exit measures of simple random walk on finite lattice domains.
//!
//! A domain is a finite set of cells in `Z` or `Z²`. Interior cells have all
//! `2·dim` lattice neighbours inside the domain; the rest form the boundary.
//! Exit distributions come from a direct banded LU solve of the discrete
//! Dirichlet problem with interior points in row-major order.

mod checks;
mod domain;
mod mc;
mod solve;

pub use checks::{
    eps_ratio, harmonic_extension, mean_value_residual, nested_monotonicity, side_masses,
    smp_check, solve_dirichlet, EpsRatio, FaceMass, SideMasses,
};
pub use domain::{DomainSpec, Face, GridDomain, Point, Side};
pub use mc::{mc_exit_sampler, sample_exit, summarize, McResult};
pub use solve::{exit_kernel, ExitKernel};

/// Interior points beyond this many are refused.
pub const INTERIOR_BUDGET: usize = 250_000;
