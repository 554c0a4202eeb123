use alloc::vec::Vec;

use super::domain::{GridDomain, Point};
use crate::error::{Error, Result};

/// Exit distributions `ε_x(b)`: one row per interior point, one column per
/// boundary point, both in the domain's row-major order.
#[derive(Clone, Debug)]
pub struct ExitKernel {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl ExitKernel {
    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    /// `ε_x` for an interior point `x`.
    pub fn distribution(&self, d: &GridDomain, x: Point) -> Option<&[f64]> {
        d.interior_index(x).map(|i| self.row(i))
    }
}

/// `I − P` restricted to the interior, LU-factorized in band storage.
/// No pivoting: the matrix is an irreducibly diagonally dominant M-matrix.
pub(crate) struct BandedLu {
    n: usize,
    bw: usize,
    a: Vec<f64>,
}

impl BandedLu {
    pub(crate) fn factor(d: &GridDomain) -> Result<Self> {
        let n = d.interior().len();
        let deg = 2.0 * d.dim() as f64;
        let mut bw = 0;
        for (i, p) in d.interior().iter().enumerate() {
            for q in d.neighbours(*p) {
                if let Some(j) = d.interior_index(q) {
                    bw = bw.max(i.abs_diff(j));
                }
            }
        }
        let width = 2 * bw + 1;
        let mut a = alloc::vec![0.0; n * width];
        for (i, p) in d.interior().iter().enumerate() {
            a[i * width + bw] = 1.0;
            for q in d.neighbours(*p) {
                if let Some(j) = d.interior_index(q) {
                    a[i * width + j + bw - i] -= 1.0 / deg;
                }
            }
        }
        let mut lu = BandedLu { n, bw, a };
        lu.eliminate()?;
        Ok(lu)
    }

    fn at(&self, i: usize, j: usize) -> usize {
        i * (2 * self.bw + 1) + j + self.bw - i
    }

    fn eliminate(&mut self) -> Result<()> {
        let (n, bw) = (self.n, self.bw);
        for k in 0..n {
            let pivot = self.a[self.at(k, k)];
            if !(pivot > 1e-300) {
                return Err(Error::Singular);
            }
            let last = (k + bw).min(n - 1);
            for i in k + 1..=last {
                let ik = self.at(i, k);
                let l = self.a[ik] / pivot;
                if l == 0.0 {
                    continue;
                }
                self.a[ik] = l;
                for j in k + 1..=last {
                    let kj = self.a[self.at(k, j)];
                    let ij = self.at(i, j);
                    self.a[ij] -= l * kj;
                }
            }
        }
        Ok(())
    }

    /// Solves in place.
    pub(crate) fn solve(&self, x: &mut [f64]) {
        let (n, bw) = (self.n, self.bw);
        for i in 0..n {
            let mut s = x[i];
            for j in i.saturating_sub(bw)..i {
                s -= self.a[self.at(i, j)] * x[j];
            }
            x[i] = s;
        }
        for i in (0..n).rev() {
            let mut s = x[i];
            for j in i + 1..=(i + bw).min(n - 1) {
                s -= self.a[self.at(i, j)] * x[j];
            }
            x[i] = s / self.a[self.at(i, i)];
        }
    }
}

/// Solves the Dirichlet problem once per boundary point.
pub fn exit_kernel(d: &GridDomain) -> Result<ExitKernel> {
    let lu = BandedLu::factor(d)?;
    let rows = d.interior().len();
    let cols = d.boundary().len();
    let deg = 2.0 * d.dim() as f64;
    let mut data = alloc::vec![0.0; rows * cols];
    let mut rhs = alloc::vec![0.0; rows];
    for (b, p) in d.boundary().iter().enumerate() {
        rhs.iter_mut().for_each(|v| *v = 0.0);
        let mut any = false;
        for q in d.neighbours(*p) {
            if let Some(i) = d.interior_index(q) {
                rhs[i] += 1.0 / deg;
                any = true;
            }
        }
        if !any {
            continue;
        }
        lu.solve(&mut rhs);
        for (i, v) in rhs.iter().enumerate() {
            data[i * cols + b] = *v;
        }
    }
    Ok(ExitKernel { rows, cols, data })
}

/// Harmonic function with boundary data `f` (aligned with the boundary).
pub(crate) fn dirichlet(d: &GridDomain, f: &[f64]) -> Result<Vec<f64>> {
    let lu = BandedLu::factor(d)?;
    let deg = 2.0 * d.dim() as f64;
    let mut rhs = alloc::vec![0.0; d.interior().len()];
    for (i, p) in d.interior().iter().enumerate() {
        for q in d.neighbours(*p) {
            if let Some(b) = d.boundary_index(q) {
                rhs[i] += f[b] / deg;
            }
        }
    }
    lu.solve(&mut rhs);
    Ok(rhs)
}
