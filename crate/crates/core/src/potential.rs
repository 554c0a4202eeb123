//! Green function, Green metric, Martin kernels and the deviation statistic.
//!
//! A [`GreenField`] holds the truncated series `G(w) = Σ_{k≤K} μᵏ(w)` on a
//! finite domain: every element within `margin` left-multiplications of the
//! identity or of a seed element. The series is computed by the recursion
//! `v_{k+1}(u) = Σ_s μ(s) v_k(s⁻¹u)` with `v_k` set to zero off the domain,
//! so the partial sums satisfy `S_K = δ_e + μ∗S_{K-1}` exactly on the
//! domain's interior. Everything else (`g(x,y) = G(x⁻¹y)`, the metric, Martin
//! kernels) is read off this one table.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::groups::index::KeyIndex;
use crate::groups::{GroupElement, GroupModel, Key, WordBall, ELEMENT_BUDGET};
use crate::measures::Measure;

const RECURRENCE_RHO: f64 = 0.999;
const RECURRENCE_SUM: f64 = 50.0;

/// How the upper end of a [`GreenValue`] was obtained.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TailMode {
    /// Symmetric measure: the tail uses a return-probability spectral estimate.
    GeometricBound,
    /// Non-symmetric measure: only the observed decay ratio is available.
    Heuristic,
}

impl TailMode {
    pub fn as_str(self) -> &'static str {
        match self {
            TailMode::GeometricBound => "geometric-bound",
            TailMode::Heuristic => "heuristic",
        }
    }
}

#[derive(Clone, Debug)]
pub struct GreenOptions {
    /// Truncation order `K`.
    pub trunc: usize,
    /// Domain radius around the identity and the seeds. `None` grows the
    /// domain layer by layer until `domain_budget` would be exceeded.
    pub margin: Option<usize>,
    pub domain_budget: usize,
    /// Largest even order used for the spectral-radius estimate.
    pub rho_kmax: usize,
    /// Skip the transience gate and the recurrence check.
    pub allow_recurrent: bool,
}

impl Default for GreenOptions {
    fn default() -> Self {
        GreenOptions {
            trunc: 200,
            margin: None,
            domain_budget: 2_000_000,
            rho_kmax: 32,
            allow_recurrent: false,
        }
    }
}

/// Bracket `lower ≤ g ≤ upper` for one Green value.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GreenValue {
    pub lower: f64,
    pub upper: f64,
    pub trunc: usize,
    pub tail_mode: TailMode,
}

impl GreenValue {
    pub fn midpoint(&self) -> f64 {
        0.5 * (self.lower + self.upper)
    }

    pub fn halfwidth(&self) -> f64 {
        0.5 * (self.upper - self.lower)
    }
}

/// A derived quantity with the half-width of its propagated bracket.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Estimate {
    pub value: f64,
    pub halfwidth: f64,
}

/// `B_g(r)` restricted to a word ball.
#[derive(Clone, Debug)]
pub struct MetricBall {
    pub r: f64,
    pub elements: Vec<GroupElement>,
    pub search_radius: usize,
    /// Every element of the outer sphere has lower-bracket distance above `r`.
    pub complete: bool,
}

impl MetricBall {
    pub fn count(&self) -> usize {
        self.elements.len()
    }
}

/// Which elements a deviation scan leaves out.
#[derive(Clone, Debug)]
pub enum Exclusion {
    /// The word ball `W_n`.
    Ball(usize),
    Elements(Vec<GroupElement>),
}

#[derive(Clone, Debug)]
pub struct DeviationStat {
    pub value: f64,
    pub window: usize,
    pub argmax: GroupElement,
    /// Number of elements scanned.
    pub scanned: usize,
}

/// Truncated Green function on a finite domain, with tail brackets.
pub struct GreenField {
    model: GroupModel,
    mu: Measure,
    domain: KeyIndex,
    margin: usize,
    closed: bool,
    lower: Vec<f64>,
    tail: Vec<f64>,
    trunc: usize,
    rho_spectral: f64,
    rho: f64,
    tail_mode: TailMode,
}

impl GreenField {
    /// Computes the field on the `margin`-neighbourhood of `{e} ∪ seeds`.
    pub fn compute(
        model: &GroupModel,
        mu: &Measure,
        seeds: &[GroupElement],
        opts: &GreenOptions,
    ) -> Result<Self> {
        if mu.model_id() != model.id() {
            return Err(Error::ModelMismatch {
                expected: model.id(),
                found: mu.model_id(),
            });
        }
        if !opts.allow_recurrent {
            if let Some(d) = model.virtual_abelian_rank() {
                if d <= 2 {
                    let what = match d {
                        0 => String::from("finite groups"),
                        _ => format!("virtually Z^{d} groups ({})", model.descriptor()),
                    };
                    return Err(Error::ExcludedModel(what));
                }
            }
        }
        if opts.trunc < 2 {
            return Err(Error::usage("truncation order must be at least 2"));
        }
        let reach = opts.trunc.saturating_mul(mu.support_radius(model)?.max(1));
        let (domain, margin, closed) = build_domain(model, seeds, opts, reach)?;
        if closed && !opts.allow_recurrent {
            return Err(Error::RecurrentWalk {
                partial_sum: f64::INFINITY,
                rho: 1.0,
            });
        }

        let atoms = mu.atoms();
        let ns = atoms.len();
        let inv_atoms: Vec<Key> = atoms
            .iter()
            .map(|(k, _)| model.inv_key(k))
            .collect::<Result<_>>()?;
        let weights: Vec<f64> = atoms.iter().map(|a| a.1).collect();
        let n = domain.len();
        // Off-domain predecessors point at a sentinel slot that stays zero.
        let mut pred = alloc::vec![n as u32; n * ns];
        for u in 0..n {
            for (j, s) in inv_atoms.iter().enumerate() {
                let w = model.mul_keys(s, domain.key(u))?;
                if let Some(i) = domain.find(&w) {
                    pred[u * ns + j] = i as u32;
                }
            }
        }

        let symmetric = mu.is_symmetric(model)?;
        let (rho_spectral, tail_mode) = if symmetric {
            let est = mu.spectral_radius_within(model, opts.rho_kmax.max(4), opts.domain_budget)?;
            (est.rho, TailMode::GeometricBound)
        } else {
            (0.0, TailMode::Heuristic)
        };

        let k_max = opts.trunc;
        let mut v = alloc::vec![0.0; n + 1];
        v[0] = 1.0;
        let mut next = alloc::vec![0.0; n + 1];
        let mut lower = v[..n].to_vec();
        let mut top = lower.clone();
        // ‖v_k‖₂² for the last three orders
        let mut norms = [0.0, 0.0, 1.0];
        let mut rho = rho_spectral;
        let mut ratio_seen: f64 = 0.0;
        for k in 1..=k_max {
            let mut norm2 = 0.0;
            for (u, row) in pred.chunks_exact(ns).enumerate() {
                let mut acc = 0.0;
                for (p, w) in row.iter().zip(&weights) {
                    acc += w * v[*p as usize];
                }
                next[u] = acc;
                norm2 += acc * acc;
            }
            core::mem::swap(&mut v, &mut next);
            norms = [norms[1], norms[2], norm2];
            if k >= 2 && norms[0] > 0.0 {
                let r = libm::sqrt(libm::sqrt(norms[2] / norms[0]));
                if symmetric || 2 * k >= k_max {
                    ratio_seen = ratio_seen.max(r);
                }
            }
            rho = rho_spectral.max(ratio_seen).min(1.0);
            // The tail scale is the largest v_j ρ^{k-j} over the second half
            // of the series; early terms would swamp it on amenable groups.
            let decay = if 2 * k <= k_max { 0.0 } else { rho };
            for ((l, t), x) in lower.iter_mut().zip(top.iter_mut()).zip(&v) {
                *l += x;
                *t = x.max(decay * *t);
            }
        }
        let tail: Vec<f64> = if rho < 1.0 {
            let f = rho / (1.0 - rho);
            top.iter().map(|t| f * t).collect()
        } else {
            alloc::vec![f64::INFINITY; n]
        };

        if !opts.allow_recurrent && rho > RECURRENCE_RHO && lower[0] > RECURRENCE_SUM {
            return Err(Error::RecurrentWalk {
                partial_sum: lower[0],
                rho,
            });
        }

        Ok(GreenField {
            model: model.clone(),
            mu: mu.clone(),
            domain,
            margin,
            closed,
            lower,
            tail,
            trunc: k_max,
            rho_spectral,
            rho,
            tail_mode,
        })
    }

    pub fn model(&self) -> &GroupModel {
        &self.model
    }

    pub fn measure(&self) -> &Measure {
        &self.mu
    }

    pub fn trunc(&self) -> usize {
        self.trunc
    }

    /// Radius of the domain around the identity and the seeds.
    pub fn margin(&self) -> usize {
        self.margin
    }

    pub fn domain_len(&self) -> usize {
        self.domain.len()
    }

    /// True if the domain exhausted the group.
    pub fn is_closed(&self) -> bool {
        self.closed
    }

    /// Return-probability estimate of the spectral radius (0 if not symmetric).
    pub fn rho_spectral(&self) -> f64 {
        self.rho_spectral
    }

    /// Decay rate used for the tail: the larger of the spectral estimate and
    /// the observed two-step norm ratio of the killed iteration.
    pub fn rho(&self) -> f64 {
        self.rho
    }

    pub fn tail_mode(&self) -> TailMode {
        self.tail_mode
    }

    pub fn contains(&self, w: &GroupElement) -> bool {
        w.model_id() == self.model.id() && self.domain.find(w.key()).is_some()
    }

    fn index(&self, w: &GroupElement) -> Result<usize> {
        if w.model_id() != self.model.id() {
            return Err(Error::ModelMismatch {
                expected: self.model.id(),
                found: w.model_id(),
            });
        }
        self.domain.find(w.key()).ok_or_else(|| {
            Error::InsufficientTruncation(format!(
                "{} lies outside the Green domain (radius {} around the seeds)",
                self.model.format(w),
                self.margin
            ))
        })
    }

    fn bracket(&self, i: usize) -> GreenValue {
        GreenValue {
            lower: self.lower[i],
            upper: self.lower[i] + self.tail[i],
            trunc: self.trunc,
            tail_mode: self.tail_mode,
        }
    }

    /// `g(e, w)`.
    pub fn value(&self, w: &GroupElement) -> Result<GreenValue> {
        Ok(self.bracket(self.index(w)?))
    }

    /// `g(x, y) = g(e, x⁻¹y)`.
    pub fn green(&self, x: &GroupElement, y: &GroupElement) -> Result<GreenValue> {
        let w = self.model.mul(&self.model.inv(x)?, y)?;
        self.value(&w)
    }

    fn positive(&self, g: GreenValue, what: impl FnOnce() -> String) -> Result<GreenValue> {
        if g.lower > 0.0 {
            Ok(g)
        } else {
            Err(Error::InsufficientTruncation(format!(
                "g{} is zero at truncation {}",
                what(),
                self.trunc
            )))
        }
    }

    /// `d_g(x, y) = ln g(e,e) − ln g(x,y)` as the midpoint of its log bracket.
    pub fn metric(&self, x: &GroupElement, y: &GroupElement) -> Result<Estimate> {
        let ge = self.bracket(0);
        let g = self.green(x, y)?;
        let g = self.positive(g, || self.pair(x, y))?;
        Ok(log_bracket(ge, g))
    }

    /// `K_y(x, z) = g(x,z) / g(y,z)`, a ratio of bracket midpoints.
    pub fn martin(&self, x: &GroupElement, z: &GroupElement, y: &GroupElement) -> Result<Estimate> {
        let num = self.green(x, z)?;
        let num = self.positive(num, || self.pair(x, z))?;
        let den = self.green(y, z)?;
        let den = self.positive(den, || self.pair(y, z))?;
        Ok(ratio(num, den))
    }

    fn pair(&self, x: &GroupElement, y: &GroupElement) -> String {
        format!("({}, {})", self.model.format(x), self.model.format(y))
    }

    /// `B_g(r) ∩ W_N`, keeping `x` when the upper end of its `d_g(e,x)`
    /// bracket is at most `r`.
    pub fn ball(&self, r: f64, search_radius: usize) -> Result<MetricBall> {
        let ball = WordBall::enumerate(&self.model, search_radius, ELEMENT_BUDGET)?;
        self.ball_in(r, &ball)
    }

    pub fn ball_in(&self, r: f64, ball: &WordBall) -> Result<MetricBall> {
        if !(r > 0.0) {
            return Err(Error::usage("Green ball radius must be positive"));
        }
        let ge = self.bracket(0);
        let mut elements = Vec::new();
        let mut outer_min = f64::INFINITY;
        let n = ball.radius();
        for i in 0..ball.len() {
            let x = ball.element(i);
            let g = self.value(&x)?;
            let (lo, hi) = if g.lower > 0.0 {
                let d = log_bracket(ge, g);
                (d.value - d.halfwidth, d.value + d.halfwidth)
            } else {
                (f64::INFINITY, f64::INFINITY)
            };
            if hi <= r {
                elements.push(x);
            }
            if ball.length_at(i) == n {
                outer_min = outer_min.min(lo);
            }
        }
        Ok(MetricBall {
            r,
            elements,
            search_radius: n,
            complete: outer_min > r,
        })
    }

    /// `sup |K_y(x,z) − 1|` over `z ∈ W_window ∖ S`.
    pub fn deviation(
        &self,
        excluded: &Exclusion,
        x: &GroupElement,
        y: &GroupElement,
        window: usize,
    ) -> Result<DeviationStat> {
        let ball = WordBall::enumerate(&self.model, window, ELEMENT_BUDGET)?;
        self.deviation_in(excluded, x, y, &ball)
    }

    /// [`GreenField::deviation`] over a prebuilt window.
    pub fn deviation_in(
        &self,
        excluded: &Exclusion,
        x: &GroupElement,
        y: &GroupElement,
        window: &WordBall,
    ) -> Result<DeviationStat> {
        let skip: Vec<Key> = match excluded {
            Exclusion::Ball(_) => Vec::new(),
            Exclusion::Elements(list) => {
                let mut v: Vec<Key> = list.iter().map(|g| Key::from(g.key())).collect();
                v.sort();
                v
            }
        };
        let xi = self.model.inv(x)?;
        let yi = self.model.inv(y)?;
        let mut best: Option<(f64, GroupElement)> = None;
        let mut scanned = 0;
        for i in 0..window.len() {
            if let Exclusion::Ball(n) = excluded {
                if window.length_at(i) <= *n {
                    continue;
                }
            }
            let z = window.element(i);
            if skip.binary_search_by(|k| k.as_slice().cmp(z.key())).is_ok() {
                continue;
            }
            scanned += 1;
            let num = self.value(&self.model.mul(&xi, &z)?)?;
            let num = self.positive(num, || self.pair(x, &z))?;
            let den = self.value(&self.model.mul(&yi, &z)?)?;
            let den = self.positive(den, || self.pair(y, &z))?;
            let dev = libm::fabs(ratio(num, den).value - 1.0);
            let better = match &best {
                None => true,
                Some((v, arg)) => dev > *v || (dev == *v && z < *arg),
            };
            if better {
                best = Some((dev, z));
            }
        }
        let (value, argmax) =
            best.ok_or_else(|| Error::usage("deviation window minus the excluded set is empty"))?;
        Ok(DeviationStat {
            value,
            window: window.radius(),
            argmax,
            scanned,
        })
    }
}

/// Log-space ratio of two brackets: midpoint ratio and half-width of the
/// interval `[lo₁/hi₂, hi₁/lo₂]`.
fn ratio(num: GreenValue, den: GreenValue) -> Estimate {
    let value = libm::exp(libm::log(num.midpoint()) - libm::log(den.midpoint()));
    let lo = libm::exp(libm::log(num.lower) - libm::log(den.upper));
    let hi = libm::exp(libm::log(num.upper) - libm::log(den.lower));
    Estimate {
        value,
        halfwidth: 0.5 * (hi - lo),
    }
}

fn log_bracket(ge: GreenValue, g: GreenValue) -> Estimate {
    let lo = libm::log(ge.lower) - libm::log(g.upper);
    let hi = libm::log(ge.upper) - libm::log(g.lower);
    Estimate {
        value: 0.5 * (lo + hi),
        halfwidth: 0.5 * (hi - lo),
    }
}

/// Breadth-first neighbourhood of `{e} ∪ seeds` under left multiplication by
/// generators. Returns the domain, its radius, and whether it closed up.
fn build_domain(
    model: &GroupModel,
    seeds: &[GroupElement],
    opts: &GreenOptions,
    reach: usize,
) -> Result<(KeyIndex, usize, bool)> {
    let mut domain = KeyIndex::default();
    domain.insert(model.identity().into_key());
    let mut start: Vec<&GroupElement> = seeds.iter().collect();
    start.sort();
    for s in start {
        if s.model_id() != model.id() {
            return Err(Error::ModelMismatch {
                expected: model.id(),
                found: s.model_id(),
            });
        }
        domain.insert(Key::from(s.key()));
    }
    if domain.len() > opts.domain_budget {
        return Err(Error::Budget {
            what: "Green domain",
            limit: opts.domain_budget,
            achieved: 0,
        });
    }
    let gens: Vec<Key> = model.generators().into_iter().map(|g| g.into_key()).collect();
    let target = opts.margin.unwrap_or(reach);
    let mut layer = 0..domain.len();
    let mut radius = 0;
    while radius < target {
        let mut fresh = KeyIndex::default();
        for u in layer.clone() {
            for g in &gens {
                let w = model.mul_keys(g, domain.key(u))?;
                if domain.find(&w).is_none() {
                    fresh.insert(w);
                }
            }
        }
        if fresh.len() == 0 {
            return Ok((domain, radius, true));
        }
        if domain.len() + fresh.len() > opts.domain_budget {
            if opts.margin.is_some() {
                return Err(Error::Budget {
                    what: "Green domain",
                    limit: opts.domain_budget,
                    achieved: radius,
                });
            }
            break;
        }
        let mut order: Vec<usize> = (0..fresh.len()).collect();
        order.sort_unstable_by(|&a, &b| fresh.key(a).cmp(fresh.key(b)));
        let first = domain.len();
        for i in order {
            domain.insert(fresh.key(i).clone());
        }
        layer = first..domain.len();
        radius += 1;
    }
    Ok((domain, radius, false))
}
