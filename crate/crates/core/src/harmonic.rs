//! Harmonicity tests, Martin-limit candidates, and the growth obstruction.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::groups::{growth_rate, GroupElement, GroupModel, WordBall};
use crate::measures::Measure;
use crate::potential::{Exclusion, GreenField};

/// Budget for the word balls this module enumerates on its own.
const BALL_BUDGET: usize = 2_000_000;

/// A real function on a word ball.
#[derive(Clone)]
pub struct WindowFunction {
    window: WordBall,
    values: Vec<f64>,
}

impl WindowFunction {
    /// `values[i]` belongs to `window.element(i)`.
    pub fn new(window: WordBall, values: Vec<f64>) -> Result<Self> {
        if values.len() != window.len() {
            return Err(Error::usage(format!(
                "{} values for a window of {} elements",
                values.len(),
                window.len()
            )));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::usage("window function values must be finite"));
        }
        Ok(WindowFunction { window, values })
    }

    pub fn from_fn(window: WordBall, mut f: impl FnMut(&GroupElement) -> f64) -> Result<Self> {
        let values = window.elements().map(|g| f(&g)).collect();
        Self::new(window, values)
    }

    pub fn window(&self) -> &WordBall {
        &self.window
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn get(&self, g: &GroupElement) -> Option<f64> {
        self.window.index_of(g).map(|i| self.values[i])
    }
}

/// `|f(x) − Σ_y μ(x⁻¹y) f(y)|`.
pub fn harmonic_residual(
    model: &GroupModel,
    f: &WindowFunction,
    x: &GroupElement,
    mu: &Measure,
) -> Result<f64> {
    let fx = f
        .get(x)
        .ok_or_else(|| Error::usage(format!("{} is outside the window", model.format(x))))?;
    let mut avg = 0.0;
    let mut missing = Vec::new();
    for (s, w) in mu.support() {
        let y = model.mul(x, &s)?;
        match f.get(&y) {
            Some(v) => avg += w * v,
            None => missing.push(model.format(&y)),
        }
    }
    if !missing.is_empty() {
        return Err(Error::usage(format!(
            "x·supp(μ) leaves the window at {}",
            missing.join(", ")
        )));
    }
    Ok(libm::fabs(fx - avg))
}

#[derive(Clone, Debug)]
pub struct MartinDiagnostics {
    /// Per window element, the largest change over the last three terms.
    pub deltas: Vec<f64>,
    pub max_delta: f64,
    /// Word lengths strictly increase and no element repeats.
    pub diverging: bool,
    pub terms: usize,
}

/// Evaluates `K_y(·, z_n)` on `W_window` for each term of `zseq`; the
/// candidate is the last term.
pub fn martin_limit(
    field: &GreenField,
    zseq: &[GroupElement],
    y: &GroupElement,
    window: usize,
) -> Result<(WindowFunction, MartinDiagnostics)> {
    let model = field.model();
    if zseq.is_empty() {
        return Err(Error::usage("empty z sequence"));
    }
    let ball = WordBall::enumerate(model, window, BALL_BUDGET)?;
    let start = zseq.len().saturating_sub(3);
    let mut rows: Vec<Vec<f64>> = Vec::new();
    for z in &zseq[start..] {
        let row = ball
            .elements()
            .map(|x| field.martin(&x, z, y).map(|k| k.value))
            .collect::<Result<Vec<_>>>()?;
        rows.push(row);
    }
    let deltas: Vec<f64> = (0..ball.len())
        .map(|i| {
            rows.windows(2)
                .map(|w| libm::fabs(w[1][i] - w[0][i]))
                .fold(0.0, f64::max)
        })
        .collect();
    let max_delta = deltas.iter().copied().fold(0.0, f64::max);
    let diverging = is_diverging(model, zseq);
    let values = rows.pop().expect("at least one term");
    let candidate = WindowFunction::new(ball, values)?;
    Ok((
        candidate,
        MartinDiagnostics {
            deltas,
            max_delta,
            diverging,
            terms: zseq.len(),
        },
    ))
}

fn is_diverging(model: &GroupModel, zseq: &[GroupElement]) -> bool {
    if zseq.len() < 2 {
        return false;
    }
    let mut sorted: Vec<&GroupElement> = zseq.iter().collect();
    sorted.sort();
    if sorted.windows(2).any(|w| w[0] == w[1]) {
        return false;
    }
    let ball = WordBall::enumerate_within(model, 64, BALL_BUDGET);
    // Elements beyond the enumerated ball count as longer than all inside it.
    let len = |z: &GroupElement| ball.length_of(z).unwrap_or(usize::MAX);
    zseq.windows(2).all(|w| {
        let (a, b) = (len(&w[0]), len(&w[1]));
        a < b || (a == usize::MAX && b == usize::MAX)
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct Classification {
    pub positive: bool,
    pub nonconstant: bool,
    /// max/min over the window (infinite if some value is not positive).
    pub ratio: f64,
    pub max_residual: f64,
    /// Number of interior points the residual was taken over.
    pub interior: usize,
}

/// Positivity, non-constancy (`max/min > 1 + tol`) and the largest harmonic
/// residual over points whose whole `μ`-neighbourhood lies in the window.
pub fn classify(
    model: &GroupModel,
    candidate: &WindowFunction,
    mu: &Measure,
    tol: f64,
) -> Result<Classification> {
    let l = mu.support_radius(model)?;
    let ball = candidate.window();
    if ball.radius() < l {
        return Err(Error::usage("window has no interior points for this measure"));
    }
    let inner = ball.sizes()[ball.radius() - l];
    let mut max_residual: f64 = 0.0;
    for i in 0..inner {
        max_residual = max_residual.max(harmonic_residual(model, candidate, &ball.element(i), mu)?);
    }
    let vals = candidate.values();
    let positive = vals.iter().all(|&v| v > 0.0);
    let max = vals.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let min = vals.iter().copied().fold(f64::INFINITY, f64::min);
    let ratio = if positive { max / min } else { f64::INFINITY };
    Ok(Classification {
        positive,
        nonconstant: if positive { ratio > 1.0 + tol } else { max - min > tol },
        ratio,
        max_residual,
        interior: inner,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Verdict {
    ObstructionWitnessed,
    ConsistentWithLiouville,
    Inconclusive,
}

impl Verdict {
    pub fn as_str(self) -> &'static str {
        match self {
            Verdict::ObstructionWitnessed => "obstruction-witnessed",
            Verdict::ConsistentWithLiouville => "consistent-with-Liouville",
            Verdict::Inconclusive => "inconclusive",
        }
    }
}

#[derive(Clone, Debug)]
pub struct ObstructionParams {
    pub n0: usize,
    /// Word radius of the deviation scan; must exceed `n0`.
    pub window: usize,
    /// Word radius used to measure growth.
    pub growth_radius: usize,
    /// Absolute separation required between rates.
    pub margin: f64,
    /// Also rescan at `window + 2` as a stability diagnostic.
    pub wide_window: bool,
}

impl ObstructionParams {
    pub fn new(n0: usize, window: usize) -> Self {
        ObstructionParams {
            n0,
            window,
            growth_radius: 30,
            margin: 0.05,
            wide_window: true,
        }
    }
}

/// Result of checking `∂W_n ⊂ B_g(r(n))` for `n0 < n ≤ window`.
#[derive(Clone, Debug, PartialEq)]
pub struct Containment {
    pub checked: usize,
    pub violations: usize,
    /// `min (r(n) − d_g(e,x))` over checked `x`; negative on violation.
    pub worst_slack: f64,
}

#[derive(Clone, Debug)]
pub struct ObstructionReport {
    pub n0: usize,
    pub window: usize,
    pub trunc: usize,
    /// `max_h sup_{z ∈ W_window ∖ W_n0} |K_h(e,z) − 1|` over generators `h`.
    pub delta_hat: f64,
    pub delta_generator: String,
    pub delta_witness: String,
    /// The same statistic at `window + 2`, if requested.
    pub delta_hat_wide: Option<f64>,
    /// `min_{h, z ∈ W_n0} K_h(e,z)`.
    pub c_hat: f64,
    pub growth_word: f64,
    pub growth_radius: usize,
    /// `−ln(1 − δ̂)`, infinite when `δ̂ ≥ 1`.
    pub bound_rate: f64,
    pub margin: f64,
    pub containment: Option<Containment>,
    pub verdict: Verdict,
}

impl ObstructionReport {
    /// `r(n) = −(n − n0) ln(1 − δ̂) − n0 ln ĉ`.
    pub fn r_of(&self, n: usize) -> f64 {
        let n0 = self.n0 as f64;
        (n as f64 - n0) * self.bound_rate - n0 * libm::log(self.c_hat)
    }
}

/// Assembles `δ̂`, `ĉ`, `r(n)` and compares `−ln(1−δ̂)` with the measured
/// word growth.
pub fn obstruction_report(field: &GreenField, params: &ObstructionParams) -> Result<ObstructionReport> {
    let model = field.model();
    let mu = field.measure();
    let n0 = params.n0;
    if n0 == 0 || params.window <= n0 {
        return Err(Error::usage("obstruction needs 1 <= n0 < window"));
    }
    let nd = mu.nondegenerate(model, n0)?;
    if !nd.covered {
        return Err(Error::usage(format!(
            "measure is degenerate: {} is not reached within radius {}",
            model.format(&nd.uncovered[0]),
            n0
        )));
    }
    let e = model.identity();
    let gens = model.generators();

    let scan = |window: usize| -> Result<(f64, usize, GroupElement)> {
        let ball = WordBall::enumerate(model, window, BALL_BUDGET)?;
        let mut best: Option<(f64, usize, GroupElement)> = None;
        for (gi, h) in gens.iter().enumerate() {
            let d = field.deviation_in(&Exclusion::Ball(n0), &e, h, &ball)?;
            if best.as_ref().map_or(true, |b| d.value > b.0) {
                best = Some((d.value, gi, d.argmax));
            }
        }
        Ok(best.expect("nonempty generating set"))
    };
    let (delta_hat, gi, witness) = scan(params.window)?;
    let delta_hat_wide = if params.wide_window {
        Some(scan(params.window + 2)?.0)
    } else {
        None
    };

    let inner = WordBall::enumerate(model, n0, BALL_BUDGET)?;
    let mut c_hat = f64::INFINITY;
    for h in &gens {
        for z in inner.elements() {
            c_hat = c_hat.min(field.martin(&e, &z, h)?.value);
        }
    }

    let growth_ball = WordBall::enumerate_within(model, params.growth_radius, BALL_BUDGET);
    let growth_word = growth_rate(&growth_ball.sizes())?.rate;
    let bound_rate = if delta_hat < 1.0 {
        -libm::log(1.0 - delta_hat)
    } else {
        f64::INFINITY
    };

    let mut report = ObstructionReport {
        n0,
        window: params.window,
        trunc: field.trunc(),
        delta_hat,
        delta_generator: model.generator_names()[gi].clone(),
        delta_witness: model.format(&witness),
        delta_hat_wide,
        c_hat,
        growth_word,
        growth_radius: growth_ball.radius(),
        bound_rate,
        margin: params.margin,
        containment: None,
        verdict: Verdict::Inconclusive,
    };

    if delta_hat < 1.0 {
        let ball = WordBall::enumerate(model, params.window, BALL_BUDGET)?;
        let mut c = Containment {
            checked: 0,
            violations: 0,
            worst_slack: f64::INFINITY,
        };
        for i in inner.len()..ball.len() {
            let x = ball.element(i);
            let d = field.metric(&e, &x)?.value;
            let slack = report.r_of(ball.length_at(i)) - d;
            c.checked += 1;
            if slack < 0.0 {
                c.violations += 1;
            }
            c.worst_slack = c.worst_slack.min(slack);
        }
        report.containment = Some(c);
    }

    let contained = report.containment.as_ref().map_or(true, |c| c.violations == 0);
    report.verdict = if delta_hat >= 1.0 || bound_rate < growth_word - params.margin {
        Verdict::ObstructionWitnessed
    } else if bound_rate >= growth_word + params.margin && contained {
        Verdict::ConsistentWithLiouville
    } else {
        Verdict::Inconclusive
    };
    Ok(report)
}

/// Relative gap between `g(e,x)` and `g(e,e) Π_i K_{h_{i+1}}(e, x_i⁻¹x)` for
/// `x = h_1⋯h_n`, `x_i = h_1⋯h_i`.
pub fn product_identity_check(field: &GreenField, word: &[usize]) -> Result<f64> {
    let model = field.model();
    if word.is_empty() {
        return Err(Error::usage("product identity needs a nonempty word"));
    }
    let e = model.identity();
    let x = model.eval_word(word)?;
    let mut log_prod = libm::log(field.value(&e)?.midpoint());
    for i in 0..word.len() {
        let suffix = model.eval_word(&word[i..])?;
        let h = model.generator(word[i]);
        log_prod += libm::log(field.martin(&e, &suffix, &h)?.value);
    }
    let g = field.value(&x)?;
    if g.lower <= 0.0 {
        return Err(Error::InsufficientTruncation(format!(
            "g(e, {}) is zero at truncation {}",
            model.format(&x),
            field.trunc()
        )));
    }
    let target = g.midpoint();
    Ok(libm::fabs(libm::exp(log_prod) - target) / target)
}
