use alloc::string::String;
use alloc::vec::Vec;

use super::domain::{DomainSpec, GridDomain, Point, Side};
use super::solve::{dirichlet, exit_kernel, ExitKernel};
use crate::error::{Error, Result};

/// `u(x) = Σ_b ε_x(b) f(b)` for boundary data `f` aligned with the boundary.
pub fn harmonic_extension(d: &GridDomain, kernel: &ExitKernel, f: &[f64]) -> Result<Vec<f64>> {
    if f.len() != d.boundary().len() {
        return Err(Error::usage(alloc::format!(
            "boundary data has {} values for {} boundary points",
            f.len(),
            d.boundary().len()
        )));
    }
    Ok((0..kernel.rows())
        .map(|i| kernel.row(i).iter().zip(f).map(|(e, v)| e * v).sum())
        .collect())
}

/// Largest `|u(x) − mean of u over the neighbours of x|` over the interior.
pub fn mean_value_residual(d: &GridDomain, u: &[f64], f: &[f64]) -> f64 {
    let deg = 2.0 * d.dim() as f64;
    let mut worst: f64 = 0.0;
    for (i, p) in d.interior().iter().enumerate() {
        let mean: f64 = d
            .neighbours(*p)
            .map(|q| match d.interior_index(q) {
                Some(j) => u[j],
                None => f[d.boundary_index(q).expect("neighbour of interior is a cell")],
            })
            .sum::<f64>()
            / deg;
        worst = worst.max(libm::fabs(u[i] - mean));
    }
    worst
}

fn interior_or_err(d: &GridDomain, x: Point, name: &str) -> Result<usize> {
    d.interior_index(x)
        .ok_or_else(|| Error::usage(alloc::format!("{name} = {x:?} is not an interior point")))
}

/// `max_b |ε_x^{D2}(b) − Σ_z ε_z^{D2}(b) ε_x^{D1}(z)|` over `b ∈ ∂D2`.
pub fn smp_check(d1: &GridDomain, d2: &GridDomain, x: Point) -> Result<f64> {
    if !d1.nested_in(d2) {
        return Err(Error::usage("strong Markov check needs D1 nested in D2"));
    }
    let i1 = interior_or_err(d1, x, "x")?;
    let k1 = exit_kernel(d1)?;
    let k2 = exit_kernel(d2)?;
    let direct = k2.row(interior_or_err(d2, x, "x")?);
    let mut via = alloc::vec![0.0; d2.boundary().len()];
    for (z, w) in d1.boundary().iter().zip(k1.row(i1)) {
        if *w == 0.0 {
            continue;
        }
        match d2.interior_index(*z) {
            Some(j) => {
                for (v, e) in via.iter_mut().zip(k2.row(j)) {
                    *v += w * e;
                }
            }
            None => via[d2.boundary_index(*z).expect("nested boundary")] += w,
        }
    }
    Ok(direct
        .iter()
        .zip(&via)
        .map(|(a, b)| libm::fabs(a - b))
        .fold(0.0, f64::max))
}

#[derive(Clone, Debug, PartialEq)]
pub struct EpsRatio {
    /// `max_b |ε_x(b)/ε_y(b) − 1|`.
    pub value: f64,
    pub witness: Option<Point>,
    /// `[min, max]` of `ε_x(b)/ε_y(b)` over the compared points.
    pub harnack: (f64, f64),
    /// Some boundary point charged by `x` but not by `y` was left out.
    pub restricted: bool,
}

/// `ε(D; x, y)` over boundary points charged by `y`.
pub fn eps_ratio(d: &GridDomain, kernel: &ExitKernel, x: Point, y: Point) -> Result<EpsRatio> {
    let ex = kernel.row(interior_or_err(d, x, "x")?);
    let ey = kernel.row(interior_or_err(d, y, "y")?);
    let mut out = EpsRatio {
        value: 0.0,
        witness: None,
        harnack: (f64::INFINITY, 0.0),
        restricted: false,
    };
    for (b, (a, c)) in ex.iter().zip(ey).enumerate() {
        if *c == 0.0 {
            out.restricted |= *a > 0.0;
            continue;
        }
        let r = a / c;
        out.harnack = (out.harnack.0.min(r), out.harnack.1.max(r));
        let dev = libm::fabs(r - 1.0);
        if out.witness.is_none() || dev > out.value {
            out.value = dev;
            out.witness = Some(d.boundary()[b]);
        }
    }
    Ok(out)
}

/// `ε(D2; x, y) ≤ ε(D1; x, y) + 1e-10` for nested domains.
pub fn nested_monotonicity(d1: &GridDomain, d2: &GridDomain, x: Point, y: Point) -> Result<bool> {
    if !d1.nested_in(d2) {
        return Err(Error::usage("monotonicity check needs D1 nested in D2"));
    }
    let r1 = eps_ratio(d1, &exit_kernel(d1)?, x, y)?;
    let r2 = eps_ratio(d2, &exit_kernel(d2)?, x, y)?;
    Ok(r2.value <= r1.value + 1e-10)
}

#[derive(Clone, Debug, PartialEq)]
pub struct FaceMass {
    pub label: String,
    pub tile: i64,
    pub side: Side,
    pub mass: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SideMasses {
    pub faces: Vec<FaceMass>,
    /// Total exit mass per tile.
    pub tile_masses: Vec<(i64, f64)>,
    /// Smallest side mass of a single tile seen from its centre.
    pub base_tile_c: f64,
    /// Largest number of closed tile sides through one boundary point.
    pub overlap: usize,
    /// Passage factors from the tile of `x` to the far end: factor `j` is the
    /// probability of reaching the next tile interface before exiting, given
    /// the previous one was reached.
    pub chain: Vec<f64>,
    pub chain_product: f64,
    /// Direct exit mass of the far end face.
    pub far_mass: f64,
}

/// Exit mass per labelled face, plus the interface decomposition of the far
/// end mass along the strip.
pub fn side_masses(d: &GridDomain, x: Point) -> Result<SideMasses> {
    let (faces, t) = match (d.faces(), d.tiles()) {
        (Some(f), Some(t)) => (f, t),
        _ => return Err(Error::usage("side masses need a domain with labelled faces")),
    };
    let kernel = exit_kernel(d)?;
    let row = kernel.row(interior_or_err(d, x, "x")?);
    let face_masses: Vec<FaceMass> = faces
        .iter()
        .map(|f| FaceMass {
            label: f.label(),
            tile: f.tile,
            side: f.side,
            mass: f.points.iter().map(|&b| row[b]).sum(),
        })
        .collect();
    let mut tile_masses: Vec<(i64, f64)> = Vec::new();
    for f in &face_masses {
        match tile_masses.last_mut() {
            Some(last) if last.0 == f.tile => last.1 += f.mass,
            _ => tile_masses.push((f.tile, f.mass)),
        }
    }

    let base = GridDomain::build(&DomainSpec::Tiles { w: t.w, h: t.h, count: 1 })?;
    let centre = (t.w / 2, t.h / 2);
    let base_kernel = exit_kernel(&base)?;
    let base_row = base_kernel.row(interior_or_err(&base, centre, "tile centre")?);
    let base_tile_c = base
        .faces()
        .expect("tiled")
        .iter()
        .map(|f| f.points.iter().map(|&b| base_row[b]).sum::<f64>())
        .fold(f64::INFINITY, f64::min);

    let overlap = d
        .boundary()
        .iter()
        .map(|&(px, py)| {
            (0..t.count)
                .map(|i| {
                    let (lo, hi) = (i * t.w, (i + 1) * t.w);
                    let on_row = (py == 0 || py == t.h) && (lo..=hi).contains(&px);
                    let on_col = (px == lo || px == hi) && (0..=t.h).contains(&py);
                    usize::from(on_row && t.h > 0) + usize::from(on_col)
                })
                .sum::<usize>()
        })
        .max()
        .unwrap_or(0);

    let far = faces
        .iter()
        .find(|f| f.tile == t.count - 1 && f.side == Side::Right)
        .expect("strip has a right end");
    let far_mass: f64 = far.points.iter().map(|&b| row[b]).sum();

    let t0 = (x.0 / t.w).min(t.count - 1);
    let mut chain = Vec::new();
    let mut start: Vec<(Point, f64)> = alloc::vec![(x, 1.0)];
    for j in t0 + 1..=t.count {
        let sub = GridDomain::build(&DomainSpec::Tiles { w: t.w, h: t.h, count: j })?;
        let k = exit_kernel(&sub)?;
        let col = j * t.w;
        let targets: Vec<usize> = sub
            .boundary()
            .iter()
            .enumerate()
            .filter(|(_, p)| p.0 == col && (t.h == 0 || (p.1 > 0 && p.1 < t.h)))
            .map(|(b, _)| b)
            .collect();
        let mut next = alloc::vec![0.0; targets.len()];
        for (p, w) in &start {
            let r = k.row(interior_or_err(&sub, *p, "interface point")?);
            for (n, &b) in next.iter_mut().zip(&targets) {
                *n += w * r[b];
            }
        }
        let mass: f64 = next.iter().sum();
        chain.push(mass);
        if mass == 0.0 {
            break;
        }
        start = targets
            .iter()
            .zip(&next)
            .map(|(&b, &m)| (sub.boundary()[b], m / mass))
            .collect();
    }
    let chain_product = chain.iter().product();
    Ok(SideMasses {
        faces: face_masses,
        tile_masses,
        base_tile_c,
        overlap,
        chain,
        chain_product,
        far_mass,
    })
}

/// Harmonic extension by a single solve, without forming the kernel.
pub fn solve_dirichlet(d: &GridDomain, f: &[f64]) -> Result<Vec<f64>> {
    if f.len() != d.boundary().len() {
        return Err(Error::usage("boundary data length does not match the boundary"));
    }
    dirichlet(d, f)
}
