use std::sync::OnceLock;

use potlab_core::error::Error;
use potlab_core::groups::{word_ball, FiniteTable, GroupModel};
use potlab_core::measures::Measure;
use potlab_core::potential::{Exclusion, GreenField, GreenOptions, TailMode};

/// First-passage oracle for SRW on the 4-regular tree: `F = 1/4 + (3/4) F²`
/// solved by fixed-point iteration, `g(e,w) = F^|w| / (1 − F)`.
fn tree_green(len: usize) -> f64 {
    let mut f = 0.0f64;
    for _ in 0..200 {
        f = 0.25 + 0.75 * f * f;
    }
    f.powi(len as i32) / (1.0 - f)
}

fn free2() -> &'static GreenField {
    static FIELD: OnceLock<GreenField> = OnceLock::new();
    FIELD.get_or_init(|| {
        let f2 = GroupModel::free(2).unwrap();
        let mu = Measure::simple_random_walk(&f2);
        let opts = GreenOptions {
            margin: Some(10),
            ..Default::default()
        };
        GreenField::compute(&f2, &mu, &[], &opts).unwrap()
    })
}

#[test]
fn free_group_values_match_tree_oracle() {
    let gf = free2();
    let m = gf.model();
    assert_eq!(gf.tail_mode(), TailMode::GeometricBound);
    for w in ["", "a", "B", "ab", "aBA", "abab", "bbbb"] {
        let x = m.parse_element(w).unwrap();
        let g = gf.value(&x).unwrap();
        let want = tree_green(w.len());
        assert!(g.lower <= g.upper);
        assert!((g.midpoint() - want).abs() < 1e-3, "{w}: {g:?} vs {want}");
    }
    let e = m.identity();
    let a = m.parse_element("a").unwrap();
    let ratio = gf.value(&a).unwrap().midpoint() / gf.value(&e).unwrap().midpoint();
    assert!((ratio - 1.0 / 3.0).abs() < 1e-3);
}

#[test]
fn short_truncation_still_brackets() {
    let f2 = GroupModel::free(2).unwrap();
    let mu = Measure::simple_random_walk(&f2);
    let opts = GreenOptions {
        trunc: 60,
        margin: Some(8),
        ..Default::default()
    };
    let gf = GreenField::compute(&f2, &mu, &[], &opts).unwrap();
    let g = gf.value(&f2.identity()).unwrap();
    assert!((g.midpoint() - 1.5).abs() < 1e-3, "{g:?}");
}

#[test]
fn left_invariance_is_exact() {
    let gf = free2();
    let m = gf.model();
    let e = m.identity();
    let ge = gf.green(&e, &e).unwrap();
    for (h, x, y) in [("a", "b", "ab"), ("BA", "", "a"), ("ab", "A", "bb")] {
        let (h, x, y) = (
            m.parse_element(h).unwrap(),
            m.parse_element(x).unwrap(),
            m.parse_element(y).unwrap(),
        );
        let hx = m.mul(&h, &x).unwrap();
        let hy = m.mul(&h, &y).unwrap();
        assert_eq!(gf.green(&hx, &hy).unwrap(), gf.green(&x, &y).unwrap());
        assert_eq!(gf.green(&hx, &hx).unwrap(), ge);
    }
}

#[test]
fn partial_sums_grow_with_truncation() {
    let f2 = GroupModel::free(2).unwrap();
    let mu = Measure::simple_random_walk(&f2);
    let ball = word_ball(&f2, 3).unwrap();
    let fields: Vec<GreenField> = [10, 20, 40]
        .iter()
        .map(|&trunc| {
            let opts = GreenOptions {
                trunc,
                margin: Some(6),
                ..Default::default()
            };
            GreenField::compute(&f2, &mu, &[], &opts).unwrap()
        })
        .collect();
    for x in ball.elements() {
        let g: Vec<_> = fields.iter().map(|f| f.value(&x).unwrap()).collect();
        for w in g.windows(2) {
            assert!(w[0].lower <= w[1].lower);
        }
    }
}

#[test]
fn metric_is_word_length_times_ln3() {
    let gf = free2();
    let m = gf.model();
    let e = m.identity();
    assert_eq!(gf.metric(&e, &e).unwrap().value, 0.0);
    let d = gf.metric(&e, &m.parse_element("a").unwrap()).unwrap();
    assert!((d.value - 3f64.ln()).abs() < 1e-2);
    for w in ["ab", "BBa", "abAB"] {
        let d = gf.metric(&e, &m.parse_element(w).unwrap()).unwrap();
        assert!((d.value - w.len() as f64 * 3f64.ln()).abs() < 2e-2, "{w}");
    }
}

#[test]
fn green_ball_is_word_ball() {
    let gf = free2();
    let ball = gf.ball(2.5 * 3f64.ln(), 4).unwrap();
    assert_eq!(ball.count(), 17);
    assert!(ball.complete);
    let tiny = gf.ball(0.5, 2).unwrap();
    assert_eq!(tiny.elements, vec![gf.model().identity()]);
    assert!(gf.ball(0.0, 2).is_err());
}

#[test]
fn martin_kernel_on_tree() {
    let gf = free2();
    let m = gf.model();
    let e = m.identity();
    let a = m.parse_element("a").unwrap();
    let k = gf.martin(&a, &m.parse_element("aaaaa").unwrap(), &e).unwrap();
    assert!((k.value - 3.0).abs() < 0.05, "{k:?}");
    let k = gf.martin(&a, &m.parse_element("bbbbb").unwrap(), &e).unwrap();
    assert!((k.value - 1.0 / 3.0).abs() < 0.02, "{k:?}");
    let z = m.parse_element("abBA").unwrap();
    assert_eq!(gf.martin(&e, &z, &e).unwrap().value, 1.0);
}

#[test]
fn deviation_on_free_group() {
    let gf = free2();
    let m = gf.model();
    let e = m.identity();
    let a = m.parse_element("a").unwrap();
    let d = gf.deviation(&Exclusion::Ball(3), &a, &e, 7).unwrap();
    assert!((d.value - 2.0).abs() < 0.1, "{d:?}");
    assert!(m.format(&d.argmax).starts_with('a'));
    assert_eq!(gf.deviation(&Exclusion::Ball(3), &e, &e, 7).unwrap().value, 0.0);
    let inner = gf.deviation(&Exclusion::Ball(5), &a, &e, 7).unwrap();
    assert!(inner.value <= d.value);
    assert!(gf.deviation(&Exclusion::Ball(7), &a, &e, 7).is_err());
}

#[test]
fn transience_gate() {
    let z2 = GroupModel::free_abelian(2).unwrap();
    let mu = Measure::simple_random_walk(&z2);
    let err = GreenField::compute(&z2, &mu, &[], &GreenOptions::default()).err().unwrap();
    assert!(matches!(err, Error::ExcludedModel(_)));

    let c5 = GroupModel::finite(FiniteTable::cyclic(5).unwrap(), None).unwrap();
    let mu = Measure::simple_random_walk(&c5);
    let err = GreenField::compute(&c5, &mu, &[], &GreenOptions::default()).err().unwrap();
    assert!(matches!(err, Error::ExcludedModel(_)));
}

#[test]
fn recurrence_is_detected_when_gate_is_off() {
    let c5 = GroupModel::finite(FiniteTable::cyclic(5).unwrap(), None).unwrap();
    let mu = Measure::simple_random_walk(&c5);
    let opts = GreenOptions {
        trunc: 400,
        allow_recurrent: true,
        ..Default::default()
    };
    // With the gate off the field is computed; the mass never leaves.
    let gf = GreenField::compute(&c5, &mu, &[], &opts).unwrap();
    assert!(gf.is_closed());
    assert!(gf.value(&c5.identity()).unwrap().lower > 50.0);
    assert!(gf.value(&c5.identity()).unwrap().upper.is_infinite());
}

/// Killed Green function of SRW on Z³ restricted to `|x|₁ ≤ r`, computed on a
/// dense grid.
fn z3_killed(r: i64, k: usize) -> impl Fn(i64, i64, i64) -> f64 {
    let p = r + 1;
    let n = (2 * p + 1) as usize;
    let idx = move |x: i64, y: i64, z: i64| (((x + p) as usize * n) + (y + p) as usize) * n + (z + p) as usize;
    let inside = move |x: i64, y: i64, z: i64| x.abs() + y.abs() + z.abs() <= r;
    let mut v = vec![0.0; n * n * n];
    v[idx(0, 0, 0)] = 1.0;
    let mut s = v.clone();
    let mut next = vec![0.0; n * n * n];
    for _ in 0..k {
        for x in -r..=r {
            for y in -r..=r {
                for z in -r..=r {
                    if !inside(x, y, z) {
                        continue;
                    }
                    let sum = v[idx(x - 1, y, z)]
                        + v[idx(x + 1, y, z)]
                        + v[idx(x, y - 1, z)]
                        + v[idx(x, y + 1, z)]
                        + v[idx(x, y, z - 1)]
                        + v[idx(x, y, z + 1)];
                    next[idx(x, y, z)] = sum / 6.0;
                }
            }
        }
        std::mem::swap(&mut v, &mut next);
        for (a, b) in s.iter_mut().zip(&v) {
            *a += b;
        }
    }
    move |x, y, z| if inside(x, y, z) { s[idx(x, y, z)] } else { 0.0 }
}

fn z3_field() -> GreenField {
    let z3 = GroupModel::free_abelian(3).unwrap();
    let mu = Measure::simple_random_walk(&z3);
    let opts = GreenOptions {
        trunc: 400,
        margin: Some(40),
        ..Default::default()
    };
    GreenField::compute(&z3, &mu, &[], &opts).unwrap()
}

#[test]
fn z3_partial_sums_match_grid_oracle() {
    let gf = z3_field();
    let oracle = z3_killed(40, 400);
    let m = gf.model();
    assert_eq!(gf.domain_len(), 88_641);
    for x in word_ball(m, 4).unwrap().elements() {
        let c: Vec<i64> = m
            .format(&x)
            .trim_matches(|c| c == '(' || c == ')')
            .split(',')
            .map(|t| t.parse().unwrap())
            .collect();
        let want = oracle(c[0], c[1], c[2]);
        let got = gf.value(&x).unwrap().lower;
        assert!((got - want).abs() < 1e-12 * want, "{c:?}: {got} vs {want}");
    }
}

// Values below come from a dense numpy re-implementation of the same
// truncation, tail rule and deviation scan.
#[test]
fn z3_frozen_values() {
    let gf = z3_field();
    let m = gf.model();
    let e = m.identity();
    let g = gf.value(&e).unwrap();
    assert!((g.lower - 1.483452).abs() < 1e-6, "{g:?}");
    assert!((g.upper - 1.536513).abs() < 1e-6, "{g:?}");
    assert!((gf.rho() - 0.99754).abs() < 1e-5);
    assert!((gf.rho_spectral() - 0.83847).abs() < 1e-5);

    let a = m.parse_element("a").unwrap();
    let want = [0.5905, 0.4342, 0.3561, 0.3055, 0.2681, 0.2378, 0.2239];
    for (n, w) in (2..=8).zip(want) {
        let d = gf.deviation(&Exclusion::Ball(n), &a, &e, n + 4).unwrap();
        assert!((d.value - w).abs() < 1e-4, "n={n}: {}", d.value);
    }

    let z = m.parse_element(&"a".repeat(10)).unwrap();
    let k_a = gf.martin(&a, &z, &e).unwrap().value;
    let k_inv = gf.martin(&m.parse_element("A").unwrap(), &z, &e).unwrap().value;
    assert!((k_a - 1.2114).abs() < 1e-4, "{k_a}");
    assert!((k_inv - 0.8280).abs() < 1e-4, "{k_inv}");
    let worst = word_ball(m, 3)
        .unwrap()
        .elements()
        .map(|x| (gf.martin(&x, &z, &e).unwrap().value - 1.0).abs())
        .fold(0.0, f64::max);
    assert!((worst - 0.792).abs() < 1e-3, "{worst}");
}
