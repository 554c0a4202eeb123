//! The six scenario pipelines. Each resolves its parameters (filling in
//! defaults), runs, and returns a bundle whose config echo reproduces it.

use potlab_core::gridlab::{
    eps_ratio, exit_kernel, harmonic_extension, mean_value_residual, nested_monotonicity,
    sample_exit, side_masses, smp_check, summarize, GridDomain, Point,
};
use potlab_core::groups::{GroupElement, GroupModel, WordBall, ELEMENT_BUDGET};
use potlab_core::harmonic::{classify, martin_limit, obstruction_report, ObstructionParams};
use potlab_core::measures::Measure;
use potlab_core::potential::{Exclusion, GreenField, GreenOptions};
use rayon::prelude::*;
use serde_json::{json, Value};

use crate::bundle::{fmt, num, Bundle, Curve, Table};
use crate::config::{required, Config, GreenSection, ModelSection, Params, Scenario};
use crate::error::{CliError, Result};
use crate::spec::{parse_domain, parse_measure, parse_model, parse_point};

pub fn run_scenario(cfg: &Config) -> Result<Bundle> {
    match cfg.scenario()? {
        Scenario::Growth => growth(cfg),
        Scenario::Green => green(cfg),
        Scenario::Martin => martin(cfg),
        Scenario::Deviation => deviation(cfg),
        Scenario::Obstruct => obstruct(cfg),
        Scenario::Grid => grid(cfg),
    }
}

struct Walk {
    model: GroupModel,
    mu: Measure,
    section: ModelSection,
}

fn walk(cfg: &Config) -> Result<Walk> {
    let spec = required(&cfg.model.spec, "model.spec")?;
    let model = parse_model(&spec)?;
    let measure = cfg.model.measure.clone().unwrap_or_else(|| "srw".into());
    let mu = parse_measure(&model, &measure)?;
    Ok(Walk {
        model,
        mu,
        section: ModelSection {
            spec: Some(spec),
            measure: Some(measure),
            allow_recurrent: cfg.model.allow_recurrent,
        },
    })
}

fn field(cfg: &Config, w: &Walk, seeds: &[GroupElement]) -> Result<(GreenField, GreenSection)> {
    let defaults = GreenOptions::default();
    let opts = GreenOptions {
        trunc: cfg.green.trunc.unwrap_or(defaults.trunc),
        margin: cfg.green.margin,
        domain_budget: cfg.green.budget.unwrap_or(defaults.domain_budget),
        allow_recurrent: cfg.model.allow_recurrent.unwrap_or(false),
        ..defaults
    };
    let gf = GreenField::compute(&w.model, &w.mu, seeds, &opts)?;
    let section = GreenSection {
        trunc: Some(opts.trunc),
        margin: opts.margin,
        budget: Some(opts.domain_budget),
    };
    Ok((gf, section))
}

fn green_provenance(gf: &GreenField) -> Value {
    json!({
        "trunc": gf.trunc(),
        "domain_margin": gf.margin(),
        "domain_elements": gf.domain_len(),
        "rho": num(gf.rho()),
        "rho_spectral": num(gf.rho_spectral()),
        "tail_mode": gf.tail_mode().as_str(),
    })
}

fn element(model: &GroupModel, word: &str, key: &str) -> Result<GroupElement> {
    model
        .parse_element(word)
        .map_err(|e| CliError::usage(format!("{key}: {e}")))
}

fn first_generator(model: &GroupModel) -> String {
    model.generator_names()[0].clone()
}

fn growth(cfg: &Config) -> Result<Bundle> {
    let spec = required(&cfg.model.spec, "model.spec")?;
    let model = parse_model(&spec)?;
    let n = cfg.params.n.unwrap_or(12);
    let ball = WordBall::enumerate(&model, n, ELEMENT_BUDGET)?;
    let sizes = ball.sizes();
    let spheres = ball.sphere_sizes();
    let mut table = Table::new("growth.csv", &["n", "ball", "sphere"]);
    let mut curve = Curve {
        name: "growth_curve.csv".into(),
        x: "n".into(),
        y: "ln_ball_over_n".into(),
        points: Vec::new(),
    };
    for (i, (b, s)) in sizes.iter().zip(&spheres).enumerate() {
        table.push(vec![i.to_string(), b.to_string(), s.to_string()]);
        if i > 0 {
            curve.points.push((i as f64, (*b as f64).ln() / i as f64));
        }
    }
    let rate = ball.growth_rate().ok();
    let echo = Config {
        scenario: Some(Scenario::Growth),
        model: ModelSection {
            spec: Some(spec),
            ..Default::default()
        },
        params: Params {
            n: Some(n),
            ..Default::default()
        },
        ..Default::default()
    };
    Ok(Bundle {
        config: echo,
        results: json!({
            "model": model.descriptor(),
            "ball_sizes": sizes,
            "sphere_sizes": spheres,
            "closed": ball.is_closed(),
            "growth_rate": rate.as_ref().map(|r| num(r.rate)),
        }),
        provenance: json!({ "radius": n, "estimator": "least-squares slope of ln|W_n| over the tail half" }),
        tables: vec![table],
        curves: vec![curve],
    })
}

fn green(cfg: &Config) -> Result<Bundle> {
    let w = walk(cfg)?;
    let n = cfg.params.n.unwrap_or(3);
    let radii = cfg.params.radii.clone().unwrap_or_else(|| vec![1.0, 2.0, 3.0, 4.0]);
    let search = cfg.params.search.unwrap_or(4);
    let (gf, green_section) = field(cfg, &w, &[])?;
    let e = w.model.identity();

    let mut table = Table::new("green.csv", &["x", "y", "K", "lower", "upper"]);
    let listed = WordBall::enumerate(&w.model, n, ELEMENT_BUDGET)?;
    for y in listed.elements() {
        let g = gf.value(&y)?;
        table.push(vec![
            "e".into(),
            w.model.format(&y),
            g.trunc.to_string(),
            fmt(g.lower),
            fmt(g.upper),
        ]);
    }

    let mut balls = Table::new("ball.csv", &["r", "count", "complete", "search_radius"]);
    let mut curve = Curve {
        name: "ball_curve.csv".into(),
        x: "r".into(),
        y: "ln_count_over_r".into(),
        points: Vec::new(),
    };
    let scan = WordBall::enumerate(&w.model, search, ELEMENT_BUDGET)?;
    for &r in &radii {
        let b = gf.ball_in(r, &scan)?;
        balls.push(vec![
            fmt(r),
            b.count().to_string(),
            b.complete.to_string(),
            search.to_string(),
        ]);
        curve.points.push((r, (b.count() as f64).ln() / r));
    }

    let ge = gf.value(&e)?;
    let echo = Config {
        scenario: Some(Scenario::Green),
        model: w.section.clone(),
        green: green_section,
        params: Params {
            n: Some(n),
            radii: Some(radii),
            search: Some(search),
            ..Default::default()
        },
        ..Default::default()
    };
    Ok(Bundle {
        config: echo,
        results: json!({
            "model": w.model.descriptor(),
            "g_identity": { "lower": num(ge.lower), "upper": num(ge.upper) },
            "elements_listed": listed.len(),
        }),
        provenance: green_provenance(&gf),
        tables: vec![table, balls],
        curves: vec![curve],
    })
}

fn martin(cfg: &Config) -> Result<Bundle> {
    let w = walk(cfg)?;
    let m = &w.model;
    let z_word = cfg.params.z.clone().unwrap_or_else(|| first_generator(m));
    let terms = cfg.params.terms.unwrap_or(12);
    let y_word = cfg.params.y.clone().unwrap_or_else(|| "e".into());
    let window = cfg.params.window.unwrap_or(2);
    let tol = cfg.params.tol.unwrap_or(1e-6);
    if terms == 0 {
        return Err(CliError::usage("params.terms must be at least 1"));
    }
    let z = element(m, &z_word, "params.z")?;
    let y = element(m, &y_word, "params.y")?;
    let mut zs = vec![z.clone()];
    for _ in 1..terms {
        let next = m.mul(zs.last().expect("nonempty"), &z)?;
        zs.push(next);
    }
    let (gf, green_section) = field(cfg, &w, &zs)?;
    let (cand, diag) = martin_limit(&gf, &zs, &y, window)?;
    let class = classify(m, &cand, &w.mu, tol)?;

    let mut table = Table::new("martin.csv", &["x", "value", "cauchy_delta"]);
    for (i, x) in cand.window().elements().enumerate() {
        table.push(vec![m.format(&x), fmt(cand.values()[i]), fmt(diag.deltas[i])]);
    }
    let probe = m.generator(0);
    let mut curve = Curve {
        name: "martin_curve.csv".into(),
        x: "n".into(),
        y: format!("K_y({}, z_n)", m.generator_names()[0]),
        points: Vec::new(),
    };
    for (i, zn) in zs.iter().enumerate() {
        curve.points.push(((i + 1) as f64, gf.martin(&probe, zn, &y)?.value));
    }

    let echo = Config {
        scenario: Some(Scenario::Martin),
        model: w.section.clone(),
        green: green_section,
        params: Params {
            z: Some(z_word),
            terms: Some(terms),
            y: Some(y_word),
            window: Some(window),
            tol: Some(tol),
            ..Default::default()
        },
        ..Default::default()
    };
    Ok(Bundle {
        config: echo,
        results: json!({
            "model": m.descriptor(),
            "diverging": diag.diverging,
            "max_cauchy_delta": num(diag.max_delta),
            "positive": class.positive,
            "nonconstant": class.nonconstant,
            "max_over_min": num(class.ratio),
            "max_residual": num(class.max_residual),
            "interior_points": class.interior,
        }),
        provenance: green_provenance(&gf),
        tables: vec![table],
        curves: vec![curve],
    })
}

fn deviation(cfg: &Config) -> Result<Bundle> {
    let w = walk(cfg)?;
    let m = &w.model;
    let x_word = cfg.params.x.clone().unwrap_or_else(|| first_generator(m));
    let y_word = cfg.params.y.clone().unwrap_or_else(|| "e".into());
    let n_from = cfg.params.n_from.unwrap_or(2);
    let n_to = cfg.params.n_to.unwrap_or(6);
    let offset = cfg.params.window_offset.unwrap_or(4);
    if n_to < n_from || offset == 0 {
        return Err(CliError::usage("deviation needs n_from <= n_to and window_offset >= 1"));
    }
    let x = element(m, &x_word, "params.x")?;
    let y = element(m, &y_word, "params.y")?;
    let (gf, green_section) = field(cfg, &w, &[])?;

    let widest = WordBall::enumerate(m, n_to + offset + 2, ELEMENT_BUDGET)?;
    let mut table = Table::new("deviation.csv", &["n", "window", "value", "witness"]);
    let mut curve = Curve {
        name: "deviation_curve.csv".into(),
        x: "n".into(),
        y: "deviation".into(),
        points: Vec::new(),
    };
    let mut rows = Vec::new();
    for n in n_from..=n_to {
        let mut pair = Vec::new();
        for window in [n + offset, n + offset + 2] {
            let ball = WordBall::enumerate_within(m, window, widest.len());
            let d = gf.deviation_in(&Exclusion::Ball(n), &x, &y, &ball)?;
            table.push(vec![
                n.to_string(),
                window.to_string(),
                fmt(d.value),
                m.format(&d.argmax),
            ]);
            pair.push(d.value);
        }
        curve.points.push((n as f64, pair[0]));
        rows.push(json!({
            "n": n,
            "value": num(pair[0]),
            "value_wide": num(pair[1]),
            "stability": num((pair[1] - pair[0]).abs()),
        }));
    }
    let echo = Config {
        scenario: Some(Scenario::Deviation),
        model: w.section.clone(),
        green: green_section,
        params: Params {
            x: Some(x_word),
            y: Some(y_word),
            n_from: Some(n_from),
            n_to: Some(n_to),
            window_offset: Some(offset),
            ..Default::default()
        },
        ..Default::default()
    };
    Ok(Bundle {
        config: echo,
        results: json!({ "model": m.descriptor(), "sweep": rows }),
        provenance: green_provenance(&gf),
        tables: vec![table],
        curves: vec![curve],
    })
}

fn obstruct(cfg: &Config) -> Result<Bundle> {
    let w = walk(cfg)?;
    let n0 = cfg.params.n0.unwrap_or(3);
    let window = cfg.params.window.unwrap_or(n0 + 4);
    let mut params = ObstructionParams::new(n0, window);
    params.growth_radius = cfg.params.growth_radius.unwrap_or(params.growth_radius);
    params.margin = cfg.params.rate_margin.unwrap_or(params.margin);
    let (gf, green_section) = field(cfg, &w, &[])?;
    let r = obstruction_report(&gf, &params)?;

    let mut curve = Curve {
        name: "bound_curve.csv".into(),
        x: "n".into(),
        y: "r_of_n".into(),
        points: Vec::new(),
    };
    if r.delta_hat < 1.0 {
        for n in n0..=window {
            curve.points.push((n as f64, r.r_of(n)));
        }
    }
    let containment = r.containment.as_ref().map(|c| {
        json!({
            "checked": c.checked,
            "violations": c.violations,
            "worst_slack": num(c.worst_slack),
        })
    });
    let echo = Config {
        scenario: Some(Scenario::Obstruct),
        model: w.section.clone(),
        green: green_section,
        params: Params {
            n0: Some(n0),
            window: Some(window),
            growth_radius: Some(params.growth_radius),
            rate_margin: Some(params.margin),
            ..Default::default()
        },
        ..Default::default()
    };
    let mut provenance = green_provenance(&gf);
    provenance["window"] = json!(window);
    provenance["wide_window"] = json!(window + 2);
    provenance["growth_radius"] = json!(r.growth_radius);
    Ok(Bundle {
        config: echo,
        results: json!({
            "model": w.model.descriptor(),
            "n0": r.n0,
            "delta_hat": num(r.delta_hat),
            "delta_generator": r.delta_generator,
            "delta_witness": r.delta_witness,
            "delta_hat_wide": r.delta_hat_wide.map(num),
            "c_hat": num(r.c_hat),
            "growth_word": num(r.growth_word),
            "bound_rate": num(r.bound_rate),
            "margin": num(r.margin),
            "containment": containment,
            "verdict": r.verdict.as_str(),
            "empirical": true,
        }),
        provenance,
        tables: Vec::new(),
        curves: if curve.points.is_empty() { Vec::new() } else { vec![curve] },
    })
}

fn point_label(d: &GridDomain, p: Point) -> String {
    if d.dim() == 1 {
        p.0.to_string()
    } else {
        format!("{},{}", p.0, p.1)
    }
}

/// Rows of `exit.csv` are written for every interior point up to this many.
const EXIT_ROWS_ALL: usize = 1024;

fn grid(cfg: &Config) -> Result<Bundle> {
    let spec = required(&cfg.grid.domain, "grid.domain")?;
    let d = parse_domain(&spec)?;
    let from = match &cfg.grid.from {
        Some(t) => parse_point(t)?,
        None => d.center().ok_or_else(|| CliError::usage("domain has no interior centre; set grid.from"))?,
    };
    if !d.is_interior(from) {
        return Err(CliError::usage(format!("grid.from {from:?} is not an interior point")));
    }
    let paths = cfg.grid.paths.unwrap_or(0);
    let seed = cfg.seed.unwrap_or(0);
    let kernel = exit_kernel(&d)?;
    let xi = d.interior_index(from).expect("checked interior");

    let mut exit = Table::new("exit.csv", &["x", "boundary_point", "mass"]);
    let rows: Vec<usize> = if d.interior().len() <= EXIT_ROWS_ALL {
        (0..d.interior().len()).collect()
    } else {
        vec![xi]
    };
    for &i in &rows {
        for (b, mass) in kernel.row(i).iter().enumerate() {
            exit.push(vec![
                point_label(&d, d.interior()[i]),
                point_label(&d, d.boundary()[b]),
                fmt(*mass),
            ]);
        }
    }

    let mut checks = Table::new("checks.csv", &["check", "residual", "verdict"]);
    let verdict = |ok: bool| if ok { "pass" } else { "fail" }.to_string();
    let row_sum = (0..kernel.rows())
        .map(|i| (kernel.row(i).iter().sum::<f64>() - 1.0).abs())
        .fold(0.0, f64::max);
    checks.push(vec!["row_sums".into(), fmt(row_sum), verdict(row_sum < 1e-10)]);
    let negative = (0..kernel.rows())
        .flat_map(|i| kernel.row(i).iter().copied())
        .fold(0.0f64, |a, v| a.max(-v));
    checks.push(vec!["nonnegative".into(), fmt(negative), verdict(negative == 0.0)]);
    let f: Vec<f64> = d
        .boundary()
        .iter()
        .map(|&(x, y)| (7 * x + 3 * y).rem_euclid(5) as f64)
        .collect();
    let u = harmonic_extension(&d, &kernel, &f)?;
    let mv = mean_value_residual(&d, &u, &f);
    checks.push(vec!["mean_value".into(), fmt(mv), verdict(mv < 1e-10)]);

    let partner = [(1, 0), (-1, 0), (0, 1), (0, -1)]
        .iter()
        .map(|(dx, dy)| (from.0 + dx, from.1 + dy))
        .find(|p| d.is_interior(*p));
    let mut results = json!({
        "domain": spec,
        "interior_points": d.interior().len(),
        "boundary_points": d.boundary().len(),
        "from": point_label(&d, from),
    });
    if let Some(y) = partner {
        let r = eps_ratio(&d, &kernel, from, y)?;
        checks.push(vec!["eps_ratio".into(), fmt(r.value), "info".into()]);
        results["eps_ratio"] = json!({
            "y": point_label(&d, y),
            "value": num(r.value),
            "witness": r.witness.map(|p| point_label(&d, p)),
            "harnack_min": num(r.harnack.0),
            "harnack_max": num(r.harnack.1),
            "restricted": r.restricted,
        });
    }

    // Nested pair: the domain and its own interior.
    let inner = GridDomain::from_cells(d.dim(), d.interior().iter().copied()).ok();
    match inner.as_ref().filter(|i| i.is_interior(from)) {
        Some(inner) => {
            let smp = smp_check(inner, &d, from)?;
            checks.push(vec!["strong_markov".into(), fmt(smp), verdict(smp < 1e-10)]);
            match partner.filter(|y| inner.is_interior(*y)) {
                Some(y) => {
                    let ok = nested_monotonicity(inner, &d, from, y)?;
                    checks.push(vec!["monotonicity".into(), String::new(), verdict(ok)]);
                }
                None => checks.push(vec!["monotonicity".into(), String::new(), "skipped".into()]),
            }
        }
        None => {
            checks.push(vec!["strong_markov".into(), String::new(), "skipped".into()]);
            checks.push(vec!["monotonicity".into(), String::new(), "skipped".into()]);
        }
    }

    let mut tables = vec![exit];
    if d.faces().is_some() {
        let s = side_masses(&d, from)?;
        let mut faces = Table::new("faces.csv", &["face", "tile", "side", "mass"]);
        for f in &s.faces {
            faces.push(vec![f.label.clone(), f.tile.to_string(), f.side.as_str().into(), fmt(f.mass)]);
        }
        tables.push(faces);
        let gap = (s.chain_product - s.far_mass).abs();
        checks.push(vec!["interface_product".into(), fmt(gap), verdict(gap <= 1e-12 * s.far_mass.max(1e-300) + 1e-15)]);
        results["side_masses"] = json!({
            "base_tile_c": num(s.base_tile_c),
            "overlap": s.overlap,
            "chain": s.chain.iter().map(|&c| num(c)).collect::<Vec<_>>(),
            "chain_product": num(s.chain_product),
            "far_mass": num(s.far_mass),
        });
    }

    if paths > 0 {
        let chunk = 4096u64;
        let total = paths as u64;
        let nb = d.boundary().len();
        let counts = (0..total.div_ceil(chunk))
            .into_par_iter()
            .map(|c| {
                let mut local = vec![0u64; nb];
                for p in c * chunk..((c + 1) * chunk).min(total) {
                    local[sample_exit(&d, from, seed, p)] += 1;
                }
                local
            })
            .reduce(
                || vec![0u64; nb],
                |mut a, b| {
                    a.iter_mut().zip(b).for_each(|(x, y)| *x += y);
                    a
                },
            );
        let mc = summarize(counts, kernel.row(xi));
        checks.push(vec!["mc_tv".into(), fmt(mc.tv), "info".into()]);
        results["monte_carlo"] = json!({ "paths": mc.paths, "tv": num(mc.tv) });
        let mut t = Table::new("mc.csv", &["boundary_point", "count", "empirical", "exact"]);
        for (b, p) in d.boundary().iter().enumerate() {
            t.push(vec![
                point_label(&d, *p),
                mc.counts[b].to_string(),
                fmt(mc.empirical[b]),
                fmt(kernel.row(xi)[b]),
            ]);
        }
        tables.push(t);
    }
    tables.push(checks);

    let echo = Config {
        scenario: Some(Scenario::Grid),
        seed: Some(seed),
        grid: crate::config::GridSection {
            domain: Some(spec),
            from: Some(point_label(&d, from)),
            paths: Some(paths),
        },
        ..Default::default()
    };
    Ok(Bundle {
        config: echo,
        results,
        provenance: json!({
            "solver": "banded LU, row-major interior order",
            "exit_rows": if rows.len() == 1 { "from" } else { "all" },
            "seed": seed,
            "rng": "ChaCha8, one stream per path index",
        }),
        tables,
        curves: Vec::new(),
    })
}
