use potlab_core::groups::{word_ball, FiniteTable, GroupElement, GroupModel};
use potlab_core::harmonic::{
    classify, harmonic_residual, martin_limit, obstruction_report, product_identity_check,
    ObstructionParams, Verdict, WindowFunction,
};
use potlab_core::measures::Measure;
use potlab_core::potential::{GreenField, GreenOptions};
use potlab_core::Error;

/// Busemann function of the free group towards `a^∞`: twice the number of
/// leading `a`s minus the length.
fn busemann(model: &GroupModel, g: &GroupElement) -> i32 {
    let w = model.format(g);
    let w = if w == "e" { String::new() } else { w };
    let lead = w.chars().take_while(|&c| c == 'a').count();
    2 * lead as i32 - w.len() as i32
}

fn busemann_candidate(model: &GroupModel, radius: usize) -> WindowFunction {
    WindowFunction::from_fn(word_ball(model, radius).unwrap(), |g| {
        3f64.powi(busemann(model, g))
    })
    .unwrap()
}

#[test]
fn residuals_by_hand() {
    let f2 = GroupModel::free(2).unwrap();
    let mu = Measure::simple_random_walk(&f2);
    let one = WindowFunction::from_fn(word_ball(&f2, 2).unwrap(), |_| 1.0).unwrap();
    let e = f2.identity();
    assert_eq!(harmonic_residual(&f2, &one, &e, &mu).unwrap(), 0.0);

    let b = busemann_candidate(&f2, 2);
    assert_eq!(b.get(&f2.parse_element("a").unwrap()), Some(3.0));
    assert_eq!(b.get(&f2.parse_element("B").unwrap()), Some(1.0 / 3.0));
    let r = harmonic_residual(&f2, &b, &e, &mu).unwrap();
    assert!(r < 1e-15, "{r}");
    let b3 = busemann_candidate(&f2, 3);
    for w in ["a", "A", "b", "aB"] {
        let x = f2.parse_element(w).unwrap();
        assert!(harmonic_residual(&f2, &b3, &x, &mu).unwrap() < 1e-14);
    }
    // The support of x = aa leaves the radius-2 window.
    let err = harmonic_residual(&f2, &b, &f2.parse_element("aa").unwrap(), &mu).unwrap_err();
    assert!(matches!(err, Error::Usage(ref m) if m.contains("aaa")), "{err}");

    let z = GroupModel::free_abelian(1).unwrap();
    let mu = Measure::simple_random_walk(&z);
    let ind = WindowFunction::from_fn(word_ball(&z, 1).unwrap(), |g| {
        f64::from(u8::from(*g == z.identity()))
    })
    .unwrap();
    assert_eq!(harmonic_residual(&z, &ind, &z.identity(), &mu).unwrap(), 1.0);
}

#[test]
fn classification_cases() {
    let f2 = GroupModel::free(2).unwrap();
    let mu = Measure::simple_random_walk(&f2);
    let one = WindowFunction::from_fn(word_ball(&f2, 2).unwrap(), |_| 1.0).unwrap();
    let c = classify(&f2, &one, &mu, 1e-6).unwrap();
    assert!(c.positive && !c.nonconstant);
    assert_eq!(c.max_residual, 0.0);
    assert_eq!(c.interior, 5);

    let b = busemann_candidate(&f2, 2);
    let c = classify(&f2, &b, &mu, 1e-6).unwrap();
    assert!(c.positive && c.nonconstant);
    assert!(c.max_residual < 1e-3);
    let a = b.get(&f2.parse_element("a").unwrap()).unwrap();
    let inv = b.get(&f2.parse_element("A").unwrap()).unwrap();
    assert!((a / inv - 9.0).abs() < 1e-12);

    let zero = WindowFunction::from_fn(word_ball(&f2, 2).unwrap(), |g| {
        if f2.format(g) == "ab" {
            0.0
        } else {
            1.0
        }
    })
    .unwrap();
    assert!(!classify(&f2, &zero, &mu, 1e-6).unwrap().positive);

    let tiny = WindowFunction::from_fn(word_ball(&f2, 0).unwrap(), |_| 1.0).unwrap();
    assert!(classify(&f2, &tiny, &mu, 1e-6).is_err());
}

#[test]
fn free_group_martin_limit_is_busemann() {
    let f2 = GroupModel::free(2).unwrap();
    let mu = Measure::simple_random_walk(&f2);
    let zs: Vec<_> = (1..=12)
        .map(|n| f2.parse_element(&"a".repeat(n)).unwrap())
        .collect();
    let field = GreenField::compute(&f2, &mu, &zs, &GreenOptions::default()).unwrap();
    let e = f2.identity();
    let (cand, diag) = martin_limit(&field, &zs, &e, 2).unwrap();
    assert!(diag.diverging);
    assert_eq!(diag.terms, 12);
    assert!(diag.max_delta < 1e-3, "{}", diag.max_delta);
    assert_eq!(cand.get(&e), Some(1.0));
    let exact = busemann_candidate(&f2, 2);
    for (got, want) in cand.values().iter().zip(exact.values()) {
        assert!((got / want - 1.0).abs() < 0.05, "{got} vs {want}");
    }
    let c = classify(&f2, &cand, &mu, 1e-6).unwrap();
    assert!(c.positive && c.nonconstant && c.max_residual < 1e-3);
    assert!(c.ratio > 2.0);

    let constant = vec![zs[4].clone(); 3];
    let (cand, diag) = martin_limit(&field, &constant, &e, 1).unwrap();
    assert!(!diag.diverging);
    assert_eq!(diag.max_delta, 0.0);
    let a = f2.parse_element("a").unwrap();
    assert_eq!(cand.get(&a), Some(field.martin(&a, &zs[4], &e).unwrap().value));
}

#[test]
fn obstruction_on_free_group() {
    let f2 = GroupModel::free(2).unwrap();
    let mu = Measure::simple_random_walk(&f2);
    let opts = GreenOptions {
        margin: Some(10),
        ..Default::default()
    };
    let field = GreenField::compute(&f2, &mu, &[], &opts).unwrap();
    let r = obstruction_report(&field, &ObstructionParams::new(3, 7)).unwrap();
    assert!((r.delta_hat - 2.0).abs() < 0.1, "{}", r.delta_hat);
    assert_eq!(r.verdict, Verdict::ObstructionWitnessed);
    assert!(r.bound_rate.is_infinite());
    assert!(r.c_hat > 0.0 && (r.c_hat - 1.0 / 3.0).abs() < 1e-3);
    assert!((r.growth_word - 3f64.ln()).abs() < 0.01);
    assert!(r.containment.is_none());
    assert!(obstruction_report(&field, &ObstructionParams::new(3, 3)).is_err());
}

#[test]
fn obstruction_on_z3() {
    let z3 = GroupModel::free_abelian(3).unwrap();
    let mu = Measure::simple_random_walk(&z3);
    let opts = GreenOptions {
        trunc: 400,
        margin: Some(40),
        ..Default::default()
    };
    let field = GreenField::compute(&z3, &mu, &[], &opts).unwrap();
    let r = obstruction_report(&field, &ObstructionParams::new(6, 10)).unwrap();
    assert!(r.delta_hat < 0.5);
    assert!(r.bound_rate < 0.7);
    assert!(r.growth_word < 0.2);
    assert!(r.bound_rate > r.growth_word);
    let c = r.containment.as_ref().unwrap();
    assert!(c.checked > 0 && c.violations == 0);
    assert_eq!(r.verdict, Verdict::ConsistentWithLiouville);
    let n0 = r.n0 as f64;
    assert!((r.r_of(8) - ((8.0 - n0) * r.bound_rate - n0 * r.c_hat.ln())).abs() < 1e-12);
}

#[test]
fn finite_group_is_refused() {
    let c6 = GroupModel::finite(FiniteTable::cyclic(6).unwrap(), None).unwrap();
    let mu = Measure::simple_random_walk(&c6);
    let err = GreenField::compute(&c6, &mu, &[], &GreenOptions::default()).err().unwrap();
    assert!(matches!(err, Error::ExcludedModel(_)));
}

#[test]
fn product_identity_telescopes() {
    let f2 = GroupModel::free(2).unwrap();
    let opts = GreenOptions {
        trunc: 100,
        margin: Some(8),
        ..Default::default()
    };
    let field = GreenField::compute(&f2, &Measure::simple_random_walk(&f2), &[], &opts).unwrap();
    assert!(product_identity_check(&field, &[0]).unwrap() < 1e-15);
    // a b a B
    assert!(product_identity_check(&field, &[0, 2, 0, 3]).unwrap() < 1e-9);
    assert!(product_identity_check(&field, &[]).is_err());

    for model in [GroupModel::lamplighter().unwrap(), GroupModel::heisenberg().unwrap()] {
        let field =
            GreenField::compute(&model, &Measure::simple_random_walk(&model), &[], &opts).unwrap();
        let k = model.num_generators();
        let word: Vec<usize> = (0..6).map(|i| (i * 7 + 3) % k).collect();
        let r = product_identity_check(&field, &word).unwrap();
        assert!(r < 1e-6, "{}: {r}", model.descriptor());
    }
}
