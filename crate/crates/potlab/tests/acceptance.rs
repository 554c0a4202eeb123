//! Acceptance run: one line per criterion, nonzero exit if any fails.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;
use std::process::{Command, Stdio};
use std::time::{Duration, Instant};

use potlab_core::gridlab::{
    exit_kernel, harmonic_extension, mc_exit_sampler, mean_value_residual, nested_monotonicity,
    smp_check, DomainSpec, GridDomain,
};
use potlab_core::groups::{word_ball, GroupElement, GroupModel};
use potlab_core::harmonic::{
    classify, martin_limit, obstruction_report, product_identity_check, ObstructionParams, Verdict,
};
use potlab_core::measures::Measure;
use potlab_core::potential::{Exclusion, GreenField, GreenOptions};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        pass,
        detail: detail.into(),
    }
}

fn report(id: u32, name: &str, limit: Duration, run: impl FnOnce() -> Outcome) -> bool {
    let start = Instant::now();
    let o = run();
    let t = start.elapsed();
    let in_time = t <= limit;
    let pass = o.pass && in_time;
    println!(
        "criterion {id} [{name}]: {} ({}; {:.1}s of {}s)",
        if pass { "PASS" } else { "FAIL" },
        o.detail,
        t.as_secs_f64(),
        limit.as_secs()
    );
    pass
}

fn srw_field(model: &GroupModel, seeds: &[GroupElement], opts: GreenOptions) -> GreenField {
    GreenField::compute(model, &Measure::simple_random_walk(model), seeds, &opts).unwrap()
}

/// `g(e,w)` for SRW on the 4-regular tree from `F = 1/4 + (3/4)F²`.
fn tree_green(len: usize) -> f64 {
    let f = (1.0 - (1.0f64 - 0.75).sqrt()) / 1.5;
    f.powi(len as i32) / (1.0 - f)
}

fn busemann(model: &GroupModel, g: &GroupElement) -> i32 {
    let w = model.format(g);
    let w = if w == "e" { String::new() } else { w };
    let lead = w.chars().take_while(|&c| c == 'a').count();
    2 * lead as i32 - w.len() as i32
}

fn powers(model: &GroupModel, word: &str, n: usize) -> Vec<GroupElement> {
    (1..=n)
        .map(|k| model.parse_element(&word.repeat(k)).unwrap())
        .collect()
}

fn criterion_1(f2: &GreenField) -> Outcome {
    let m = f2.model();
    let ball = word_ball(m, 4).unwrap();
    let mut worst: f64 = 0.0;
    for i in 0..ball.len() {
        let g = f2.value(&ball.element(i)).unwrap();
        worst = worst.max((g.midpoint() - tree_green(ball.length_at(i))).abs());
    }
    let ge = f2.value(&m.identity()).unwrap().midpoint();
    outcome(
        worst < 1e-3 && f2.trunc() == 200,
        format!("g(e,e) = {ge:.7}, max |g - tree| over W_4 = {worst:.2e}, K = {}", f2.trunc()),
    )
}

fn criterion_2() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let opts = GreenOptions {
        margin: Some(10),
        ..Default::default()
    };
    let mut details = Vec::new();
    let mut pass = true;
    for model in [
        GroupModel::free(2).unwrap(),
        GroupModel::heisenberg().unwrap(),
        GroupModel::lamplighter().unwrap(),
    ] {
        let field = srw_field(&model, &[], opts.clone());
        let k = model.num_generators();
        let mut worst: f64 = 0.0;
        for _ in 0..50 {
            let len = rng.random_range(1..=8);
            let word: Vec<usize> = (0..len).map(|_| rng.random_range(0..k)).collect();
            worst = worst.max(product_identity_check(&field, &word).unwrap());
        }
        pass &= worst < 1e-6;
        details.push(format!("{} {worst:.1e}", model.descriptor()));
    }
    outcome(pass, format!("max relative residual: {}", details.join(", ")))
}

fn criterion_3(f2: &GreenField) -> Outcome {
    let scan = word_ball(f2.model(), 8).unwrap();
    let mut pts = Vec::new();
    let mut complete = true;
    for i in 0..=24 {
        let r = 2.0 + 0.25 * i as f64;
        let b = f2.ball_in(r, &scan).unwrap();
        complete &= b.complete;
        pts.push((r, (b.count() as f64).ln()));
    }
    let n = pts.len() as f64;
    let (sx, sy) = pts.iter().fold((0.0, 0.0), |a, p| (a.0 + p.0, a.1 + p.1));
    let (mx, my) = (sx / n, sy / n);
    let slope = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum::<f64>()
        / pts.iter().map(|p| (p.0 - mx).powi(2)).sum::<f64>();
    let end = pts.last().unwrap().1 / 8.0;
    let (lo, hi) = pts
        .iter()
        .map(|p| p.1 / p.0)
        .fold((f64::INFINITY, 0.0f64), |a, v| (a.0.min(v), a.1.max(v)));
    let ok = |v: f64| (0.85..=1.15).contains(&v);
    outcome(
        complete && ok(slope) && ok(end),
        format!(
            "slope of ln|B_g(r)| on [2,8] = {slope:.4}, (1/8) ln|B_g(8)| = {end:.4}, pointwise range [{lo:.3}, {hi:.3}], complete = {complete}"
        ),
    )
}

fn criterion_4_model(model: &GroupModel, z: &str, terms: usize, trunc: usize) -> (bool, String) {
    let zs = powers(model, z, terms);
    let field = srw_field(
        model,
        &zs,
        GreenOptions {
            trunc,
            ..Default::default()
        },
    );
    let e = model.identity();
    let (cand, _) = martin_limit(&field, &zs, &e, 2).unwrap();
    let c = classify(model, &cand, field.measure(), 1e-6).unwrap();
    let mut pass = c.positive && c.ratio > 2.0 && c.max_residual < 1e-3;
    let mut detail = format!(
        "{}: ratio {:.2}, residual {:.1e}",
        model.descriptor(),
        c.ratio,
        c.max_residual
    );
    if model.descriptor() == "free:2" {
        let worst = cand
            .window()
            .elements()
            .zip(cand.values())
            .map(|(g, v)| (v / 3f64.powi(busemann(model, &g)) - 1.0).abs())
            .fold(0.0, f64::max);
        pass &= worst < 0.05;
        detail.push_str(&format!(", Busemann gap {worst:.1e}"));
    }
    (pass, detail)
}

fn criterion_4() -> Outcome {
    let cases = [
        (GroupModel::free(2).unwrap(), "a", 12, 200),
        (GroupModel::lamplighter().unwrap(), "t", 12, 800),
        (GroupModel::baumslag_solitar(2).unwrap(), "t", 10, 800),
    ];
    let mut pass = true;
    let mut details = Vec::new();
    for (model, z, terms, trunc) in &cases {
        let start = Instant::now();
        let (ok, d) = criterion_4_model(model, z, *terms, *trunc);
        let ok = ok && start.elapsed() < Duration::from_secs(300);
        pass &= ok;
        details.push(format!("{d} [{:.0}s]", start.elapsed().as_secs_f64()));
    }
    outcome(pass, details.join("; "))
}

fn criterion_5(z3: &GreenField) -> Outcome {
    let m = z3.model();
    let a = m.parse_element("a").unwrap();
    let e = m.identity();
    let vals: Vec<f64> = (2..=8)
        .map(|n| z3.deviation(&Exclusion::Ball(n), &a, &e, n + 4).unwrap().value)
        .collect();
    let monotone = vals.windows(2).all(|w| w[1] <= w[0]);
    let last = *vals.last().unwrap();
    let shown: Vec<String> = vals.iter().map(|v| format!("{v:.4}")).collect();
    outcome(
        monotone && last < 0.3,
        format!("deviation n=2..8: [{}], K = {}", shown.join(", "), z3.trunc()),
    )
}

fn criterion_6(f2: &GreenField, z3: &GreenField) -> Outcome {
    let r = obstruction_report(f2, &ObstructionParams::new(3, 7)).unwrap();
    let free_ok = r.delta_hat >= 1.0 && r.verdict == Verdict::ObstructionWitnessed;
    let s = obstruction_report(z3, &ObstructionParams::new(6, 10)).unwrap();
    let z3_ok = s.delta_hat < 0.5
        && s.bound_rate > s.growth_word
        && s.growth_word < 0.2
        && s.verdict == Verdict::ConsistentWithLiouville;
    outcome(
        free_ok && z3_ok,
        format!(
            "free:2 delta {:.3} -> {}; abelian:3 delta {:.3}, bound {:.3} vs growth {:.3} -> {}",
            r.delta_hat,
            r.verdict.as_str(),
            s.delta_hat,
            s.bound_rate,
            s.growth_word,
            s.verdict.as_str()
        ),
    )
}

fn criterion_7() -> Outcome {
    let mut ruin: f64 = 0.0;
    for n in [4, 10, 25, 60] {
        let d = GridDomain::build(&DomainSpec::Interval(n)).unwrap();
        let k = exit_kernel(&d).unwrap();
        let top = d.boundary_index((n, 0)).unwrap();
        for x in 1..n {
            let e = k.distribution(&d, (x, 0)).unwrap()[top];
            ruin = ruin.max((e - x as f64 / n as f64).abs());
        }
    }

    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut smp: f64 = 0.0;
    let mut monotone = 0;
    let mut mean_value: f64 = 0.0;
    for _ in 0..20 {
        let (w, h) = (rng.random_range(2..8), rng.random_range(2..8));
        let (x0, y0) = (rng.random_range(0..5), rng.random_range(0..5));
        let grow = |rng: &mut ChaCha8Rng| rng.random_range(0..5);
        let (l, b, r, t) = (grow(&mut rng), grow(&mut rng), grow(&mut rng), grow(&mut rng));
        let d1 = GridDomain::build(&DomainSpec::RectangleAt { x0, y0, w, h }).unwrap();
        let d2 = GridDomain::build(&DomainSpec::RectangleAt {
            x0: x0 - l,
            y0: y0 - b,
            w: w + l + r,
            h: h + b + t,
        })
        .unwrap();
        let pick = |rng: &mut ChaCha8Rng| d1.interior()[rng.random_range(0..d1.interior().len())];
        let (x, y) = (pick(&mut rng), pick(&mut rng));
        smp = smp.max(smp_check(&d1, &d2, x).unwrap());
        monotone += usize::from(nested_monotonicity(&d1, &d2, x, y).unwrap());
        let k2 = exit_kernel(&d2).unwrap();
        let f: Vec<f64> = d2.boundary().iter().map(|_| rng.random::<f64>()).collect();
        let u = harmonic_extension(&d2, &k2, &f).unwrap();
        mean_value = mean_value.max(mean_value_residual(&d2, &u, &f));
    }
    outcome(
        ruin < 1e-12 && smp < 1e-10 && monotone == 20 && mean_value < 1e-10,
        format!(
            "ruin {ruin:.1e}, strong Markov {smp:.1e} on 20 pairs, monotone {monotone}/20, mean value {mean_value:.1e}"
        ),
    )
}

fn criterion_8() -> Outcome {
    let d = GridDomain::build(&DomainSpec::Rectangle { w: 5, h: 5 }).unwrap();
    let k = exit_kernel(&d).unwrap();
    let x = d.center().unwrap();
    let r = mc_exit_sampler(&d, &k, x, 2024, 100_000).unwrap();
    outcome(r.tv < 0.02, format!("TV = {:.4} from {x:?}, 1e5 paths, seed 2024", r.tv))
}

fn bundle(dir: &Path) -> BTreeMap<String, Vec<u8>> {
    fs::read_dir(dir)
        .unwrap()
        .map(|e| e.unwrap())
        .filter(|e| e.file_name() != "timing.json")
        .map(|e| (e.file_name().into_string().unwrap(), fs::read(e.path()).unwrap()))
        .collect()
}

fn criterion_9() -> Outcome {
    let tmp = tempfile::tempdir().unwrap();
    let scenarios: [&[&str]; 6] = [
        &["growth", "--model", "lamplighter", "--n", "8"],
        &["green", "--model", "free:2", "--margin", "9", "--trunc", "100"],
        &["martin", "--model", "free:2", "--z", "a", "--terms", "6", "--margin", "8", "--trunc", "100"],
        &["deviation", "--model", "heisenberg", "--margin", "9", "--trunc", "100", "--n-to", "3", "--window-offset", "2"],
        &["obstruct", "--model", "free:2", "--margin", "10", "--trunc", "100"],
        &["grid", "--domain", "tiles:4,4,3", "--paths", "20000", "--seed", "5"],
    ];
    let mut identical = 0;
    for (i, args) in scenarios.iter().enumerate() {
        let mut dirs = Vec::new();
        for (run, threads) in ["1", "3"].iter().enumerate() {
            let out = tmp.path().join(format!("{i}-{run}"));
            let status = Command::new(env!("CARGO_BIN_EXE_potlab"))
                .args(*args)
                .args(["--threads", threads, "--out", out.to_str().unwrap()])
                .stdout(Stdio::null())
                .status()
                .unwrap();
            assert!(status.success(), "{args:?}");
            dirs.push(out);
        }
        identical += usize::from(bundle(&dirs[0]) == bundle(&dirs[1]));
    }
    outcome(
        identical == scenarios.len(),
        format!("{identical}/{} scenarios byte-identical across two runs", scenarios.len()),
    )
}

fn main() {
    let mins = |m: u64| Duration::from_secs(60 * m);
    let mut results = Vec::new();

    let mut f2 = None;
    results.push(report(1, "free group Green values", Duration::from_secs(30), || {
        let field = srw_field(&GroupModel::free(2).unwrap(), &[], GreenOptions::default());
        let o = criterion_1(&field);
        f2 = Some(field);
        o
    }));
    let f2 = f2.unwrap();
    results.push(report(2, "telescoping identity", mins(2), criterion_2));
    results.push(report(3, "Green-ball growth", mins(1), || criterion_3(&f2)));
    results.push(report(4, "non-constant positive harmonic candidates", mins(15), criterion_4));

    let mut z3 = None;
    results.push(report(5, "deviation decay on Z^3", mins(5), || {
        let opts = GreenOptions {
            trunc: 400,
            margin: Some(40),
            ..Default::default()
        };
        let field = srw_field(&GroupModel::free_abelian(3).unwrap(), &[], opts);
        let o = criterion_5(&field);
        z3 = Some(field);
        o
    }));
    let z3 = z3.unwrap();
    results.push(report(6, "obstruction verdicts", mins(5), || criterion_6(&f2, &z3)));
    results.push(report(7, "lattice exactness", mins(1), criterion_7));
    results.push(report(8, "Monte Carlo cross-check", mins(1), criterion_8));
    results.push(report(9, "determinism", mins(5), criterion_9));

    let passed = results.iter().filter(|&&p| p).count();
    println!("acceptance: {passed}/{} criteria passed", results.len());
    if passed != results.len() {
        std::process::exit(1);
    }
}
