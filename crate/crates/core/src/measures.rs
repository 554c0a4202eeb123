//! Finitely supported probability measures on a group model.

use alloc::format;
use alloc::vec::Vec;

use hashbrown::HashMap;

use crate::error::{Error, Result};
use crate::groups::{GroupElement, GroupModel, Key, WordBall, ELEMENT_BUDGET};

/// Default cap on the support size of a convolution.
pub const SUPPORT_BUDGET: usize = 5_000_000;

const MASS_TOL: f64 = 1e-12;

/// A probability measure with finite support, stored as atoms sorted by key.
#[derive(Clone, Debug, PartialEq)]
pub struct Measure {
    model: u64,
    atoms: Vec<(Key, f64)>,
}

impl Measure {
    /// Builds a measure from weighted elements. Duplicates are merged, zero
    /// weights dropped, and the rest normalized to total mass one.
    pub fn new(
        model: &GroupModel,
        pairs: impl IntoIterator<Item = (GroupElement, f64)>,
    ) -> Result<Self> {
        let mut acc: Vec<(Key, f64)> = Vec::new();
        for (g, w) in pairs {
            if g.model_id() != model.id() {
                return Err(Error::usage("measure mixes elements of different models"));
            }
            if !w.is_finite() || w < 0.0 {
                return Err(Error::usage(format!("invalid weight {w}")));
            }
            if w > 0.0 {
                acc.push((g.into_key(), w));
            }
        }
        acc.sort_by(|a, b| a.0.cmp(&b.0));
        let mut atoms: Vec<(Key, f64)> = Vec::with_capacity(acc.len());
        for (k, w) in acc {
            match atoms.last_mut() {
                Some(last) if last.0 == k => last.1 += w,
                _ => atoms.push((k, w)),
            }
        }
        let total: f64 = atoms.iter().map(|a| a.1).sum();
        if atoms.is_empty() || total <= 0.0 {
            return Err(Error::usage("measure needs at least one positive weight"));
        }
        for a in &mut atoms {
            a.1 /= total;
        }
        Ok(Measure {
            model: model.id(),
            atoms,
        })
    }

    /// Uniform measure on the generating set.
    pub fn simple_random_walk(model: &GroupModel) -> Self {
        Self::new(model, model.generators().into_iter().map(|g| (g, 1.0)))
            .expect("generating set is nonempty")
    }

    /// Mass `p` at the identity, the rest uniform on the generators.
    pub fn lazy(model: &GroupModel, p: f64) -> Result<Self> {
        if !(0.0..1.0).contains(&p) {
            return Err(Error::usage("laziness must lie in [0, 1)"));
        }
        let n = model.num_generators() as f64;
        let gens = model.generators().into_iter().map(|g| (g, (1.0 - p) / n));
        Self::new(model, core::iter::once((model.identity(), p)).chain(gens))
    }

    pub fn dirac(g: &GroupElement) -> Self {
        Measure {
            model: g.model_id(),
            atoms: alloc::vec![(g.key().into(), 1.0)],
        }
    }

    pub fn model_id(&self) -> u64 {
        self.model
    }

    /// Number of atoms.
    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    pub fn mass(&self, g: &GroupElement) -> f64 {
        if g.model_id() != self.model {
            return 0.0;
        }
        self.mass_of_key(g.key())
    }

    pub(crate) fn mass_of_key(&self, key: &[u8]) -> f64 {
        self.atoms
            .binary_search_by(|a| a.0.as_slice().cmp(key))
            .map_or(0.0, |i| self.atoms[i].1)
    }

    pub fn total_mass(&self) -> f64 {
        self.atoms.iter().map(|a| a.1).sum()
    }

    /// Atoms in key order.
    pub fn support(&self) -> impl Iterator<Item = (GroupElement, f64)> + '_ {
        self.atoms
            .iter()
            .map(move |(k, w)| (GroupElement::from_key(self.model, k.clone()), *w))
    }

    pub(crate) fn atoms(&self) -> &[(Key, f64)] {
        &self.atoms
    }

    fn check(&self, model: &GroupModel) -> Result<()> {
        if self.model != model.id() {
            return Err(Error::ModelMismatch {
                expected: model.id(),
                found: self.model,
            });
        }
        Ok(())
    }

    /// `μ(g) = μ(g⁻¹)` for every atom, up to `1e-12`.
    pub fn is_symmetric(&self, model: &GroupModel) -> Result<bool> {
        self.check(model)?;
        for (k, w) in &self.atoms {
            let ki = model.inv_key(k)?;
            if (self.mass_of_key(&ki) - w).abs() > MASS_TOL {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// Largest word length of a support element.
    pub fn support_radius(&self, model: &GroupModel) -> Result<usize> {
        self.check(model)?;
        let mut r = 1;
        loop {
            let ball = WordBall::enumerate_within(model, r, ELEMENT_BUDGET);
            let lens: Option<Vec<usize>> = self
                .atoms
                .iter()
                .map(|(k, _)| ball.index_of_key(k).map(|i| ball.length_at(i)))
                .collect();
            if let Some(lens) = lens {
                return Ok(lens.into_iter().max().unwrap_or(0));
            }
            if ball.radius() < r || ball.is_closed() {
                return Err(Error::Budget {
                    what: "element",
                    limit: ELEMENT_BUDGET,
                    achieved: ball.radius(),
                });
            }
            r *= 2;
        }
    }

    /// `μ_x(y) = μ(x⁻¹y)`: the measure pushed forward by left translation.
    pub fn translate(&self, model: &GroupModel, x: &GroupElement) -> Result<Self> {
        self.check(model)?;
        if x.model_id() != self.model {
            return Err(Error::ModelMismatch {
                expected: self.model,
                found: x.model_id(),
            });
        }
        let mut atoms = self
            .atoms
            .iter()
            .map(|(k, w)| Ok((model.mul_keys(x.key(), k)?, *w)))
            .collect::<Result<Vec<_>>>()?;
        atoms.sort_by(|a, b| a.0.cmp(&b.0));
        Ok(Measure {
            model: self.model,
            atoms,
        })
    }

    /// `(μ∗ν)(z) = Σ_y μ(y) ν(y⁻¹z)`. Contributions are added in key order of
    /// `(y, y⁻¹z)`, so results are bit-reproducible.
    pub fn convolve(&self, model: &GroupModel, other: &Measure, budget: usize) -> Result<Self> {
        self.check(model)?;
        other.check(model)?;
        let mut acc: HashMap<Key, f64> = HashMap::with_capacity(self.len() * other.len() / 2);
        for (y, wy) in &self.atoms {
            for (u, wu) in &other.atoms {
                *acc.entry(model.mul_keys(y, u)?).or_insert(0.0) += wy * wu;
                if acc.len() > budget {
                    return Err(Error::Budget {
                        what: "support",
                        limit: budget,
                        achieved: 0,
                    });
                }
            }
        }
        let mut atoms: Vec<(Key, f64)> = acc.into_iter().filter(|a| a.1 > 0.0).collect();
        atoms.sort_unstable_by(|a, b| a.0.cmp(&b.0));
        Ok(Measure {
            model: self.model,
            atoms,
        })
    }

    /// `μᵏ` by iterated left-to-right convolution. On budget overflow the
    /// error reports the largest order that was completed.
    pub fn power(&self, model: &GroupModel, k: usize, budget: usize) -> Result<ConvolutionPower> {
        self.check(model)?;
        let mut result = Measure::dirac(&model.identity());
        for j in 0..k {
            result = result.convolve(model, self, budget).map_err(|e| match e {
                Error::Budget { what, limit, .. } => Error::Budget {
                    what,
                    limit,
                    achieved: j,
                },
                e => e,
            })?;
        }
        Ok(ConvolutionPower {
            base: self.clone(),
            k,
            result,
        })
    }

    /// Checks that the semigroup generated by the support covers `W_R`.
    ///
    /// Products are explored inside `W_{R+2L}`, `L` the support radius, so
    /// the verdict is exact only up to that radius.
    pub fn nondegenerate(&self, model: &GroupModel, radius: usize) -> Result<Nondegeneracy> {
        let l = self.support_radius(model)?;
        let explore = radius + 2 * l;
        let ball = WordBall::enumerate(model, explore, ELEMENT_BUDGET)?;
        let steps: Vec<&Key> = self.atoms.iter().map(|a| &a.0).collect();
        let mut reached = alloc::vec![false; ball.len()];
        reached[0] = true;
        let mut stack = alloc::vec![0usize];
        while let Some(i) = stack.pop() {
            for s in &steps {
                let k = model.mul_keys(ball.key(i), s)?;
                if let Some(j) = ball.index_of_key(&k) {
                    if !reached[j] {
                        reached[j] = true;
                        stack.push(j);
                    }
                }
            }
        }
        let target = ball.sizes()[radius];
        let uncovered: Vec<GroupElement> =
            (0..target).filter(|&i| !reached[i]).map(|i| ball.element(i)).collect();
        Ok(Nondegeneracy {
            covered: uncovered.is_empty(),
            radius,
            explore_radius: explore,
            uncovered,
        })
    }

    /// Spectral radius estimate `max_{k even ≤ kmax} μᵏ(e)^{1/k}` for a
    /// symmetric measure, using `μ^{2j}(e) = Σ_z μʲ(z)²`.
    pub fn spectral_radius(&self, model: &GroupModel, kmax: usize) -> Result<f64> {
        let est = self.spectral_radius_within(model, kmax, SUPPORT_BUDGET)?;
        if est.k_reached < kmax - kmax % 2 {
            return Err(Error::Budget {
                what: "support",
                limit: SUPPORT_BUDGET,
                achieved: est.k_reached,
            });
        }
        Ok(est.rho)
    }

    /// Like [`Measure::spectral_radius`] but stops early when the support of
    /// `μʲ` outgrows `budget`, reporting how far it got.
    pub fn spectral_radius_within(
        &self,
        model: &GroupModel,
        kmax: usize,
        budget: usize,
    ) -> Result<SpectralEstimate> {
        if kmax < 4 {
            return Err(Error::usage("spectral radius needs kmax >= 4"));
        }
        if !self.is_symmetric(model)? {
            return Err(Error::usage(
                "spectral radius estimate needs a symmetric measure",
            ));
        }
        let mut rho: f64 = 0.0;
        let mut returns = Vec::new();
        let mut cur = self.clone();
        let mut k_reached = 0;
        for j in 1..=kmax / 2 {
            if j > 1 {
                match cur.convolve(model, self, budget) {
                    Ok(next) => cur = next,
                    Err(Error::Budget { .. }) => break,
                    Err(e) => return Err(e),
                }
            }
            let ret: f64 = cur.atoms.iter().map(|a| a.1 * a.1).sum();
            rho = rho.max(libm::pow(ret, 1.0 / (2 * j) as f64));
            returns.push((2 * j, ret));
            k_reached = 2 * j;
        }
        Ok(SpectralEstimate {
            rho: rho.min(1.0),
            k_reached,
            returns,
        })
    }
}

/// `μᵏ` together with its base measure.
#[derive(Clone, Debug)]
pub struct ConvolutionPower {
    pub base: Measure,
    pub k: usize,
    pub result: Measure,
}

impl ConvolutionPower {
    /// `μₓᵏ(y) = μᵏ(x⁻¹y)`.
    pub fn mass_at(&self, model: &GroupModel, x: &GroupElement, y: &GroupElement) -> Result<f64> {
        let z = model.mul(&model.inv(x)?, y)?;
        Ok(self.result.mass(&z))
    }
}

#[derive(Clone, Debug)]
pub struct Nondegeneracy {
    pub covered: bool,
    pub radius: usize,
    pub explore_radius: usize,
    /// Elements of `W_R` not reached, in ball order.
    pub uncovered: Vec<GroupElement>,
}

#[derive(Clone, Debug)]
pub struct SpectralEstimate {
    pub rho: f64,
    /// Largest even order whose return probability entered the estimate.
    pub k_reached: usize,
    /// `(k, μᵏ(e))` for each even `k` used.
    pub returns: Vec<(usize, f64)>,
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn normalizes_and_drops_zeros() {
        let f2 = GroupModel::free(2).unwrap();
        let a = f2.parse_element("a").unwrap();
        let b = f2.parse_element("b").unwrap();
        let m = Measure::new(&f2, [(a.clone(), 2.0), (b.clone(), 2.0), (f2.identity(), 0.0)]).unwrap();
        assert_eq!(m.len(), 2);
        assert_eq!(m.mass(&a), 0.5);
        assert!(Measure::new(&f2, [(a, 0.0)]).is_err());
        let z = GroupModel::free_abelian(1).unwrap();
        assert!(Measure::new(&f2, [(z.identity(), 1.0)]).is_err());
    }

    #[test]
    fn lazy_measure() {
        let f2 = GroupModel::free(2).unwrap();
        let m = Measure::lazy(&f2, 0.5).unwrap();
        assert_eq!(m.mass(&f2.identity()), 0.5);
        assert_eq!(m.mass(&f2.parse_element("B").unwrap()), 0.125);
        assert!(m.is_symmetric(&f2).unwrap());
    }

    #[test]
    fn translate_point_mass() {
        let f2 = GroupModel::free(2).unwrap();
        let a = f2.parse_element("a").unwrap();
        let b = f2.parse_element("b").unwrap();
        let t = Measure::dirac(&a).translate(&f2, &b).unwrap();
        assert_eq!(t.mass(&f2.parse_element("ba").unwrap()), 1.0);
        let mu = Measure::simple_random_walk(&f2);
        assert_eq!(mu.translate(&f2, &f2.identity()).unwrap(), mu);
    }

    #[test]
    fn support_radius_and_symmetry() {
        let f2 = GroupModel::free(2).unwrap();
        let m = Measure::new(
            &f2,
            [(f2.parse_element("ab").unwrap(), 1.0), (f2.parse_element("aba").unwrap(), 1.0)],
        )
        .unwrap();
        assert_eq!(m.support_radius(&f2).unwrap(), 3);
        assert!(!m.is_symmetric(&f2).unwrap());
        assert!(m.spectral_radius(&f2, 10).is_err());
    }

    #[test]
    fn power_budget_reports_order() {
        let f2 = GroupModel::free(2).unwrap();
        let mu = Measure::simple_random_walk(&f2);
        match mu.power(&f2, 10, 100) {
            Err(Error::Budget { achieved, .. }) => assert_eq!(achieved, 3),
            other => panic!("{:?}", other.map(|p| p.k)),
        }
    }
}
