use expanse_core::quadrature::integrate;
use expanse_core::{Extended, ScaleFactor, ScaleFactorParams};
use proptest::prelude::*;

fn params() -> impl Strategy<Value = ScaleFactorParams> {
    (
        1u32..=4,
        prop_oneof![3 => -2.0..2.0f64, 1 => Just(-1.0)],
        0.2..5.0f64,
        prop_oneof![4 => -2.0..2.0f64, 1 => Just(0.0)],
    )
        .prop_map(|(n, sigma, a0, a1)| ScaleFactorParams { n, sigma, a0, a1 })
}

/// Usable span: `0.9·T₀` (or 10), shortened so that `a(t)/a₀` stays inside
/// `[1e−2, 1e2]`; beyond that `s(t)` saturates in double precision.
fn span(sf: &ScaleFactor) -> f64 {
    let a0 = sf.params.a0;
    let inside = |t: f64| {
        let r = sf.eval_a(t).unwrap() / a0;
        (1e-2..=1e2).contains(&r)
    };
    let mut hi = sf.t0.finite().map_or(10.0, |t0| (0.9 * t0).min(10.0));
    if inside(hi) {
        return hi;
    }
    let mut lo = 0.0;
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if inside(mid) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    lo
}

fn time_in(sf: &ScaleFactor, frac: f64) -> f64 {
    span(sf) * frac
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(400))]

    #[test]
    fn s_is_strictly_increasing(p in params(), f1 in 0.0..1.0f64, f2 in 0.0..1.0f64) {
        prop_assume!((f1 - f2).abs() > 1e-6);
        let sf = ScaleFactor::new(p).unwrap();
        let (t1, t2) = (time_in(&sf, f1.min(f2)), time_in(&sf, f1.max(f2)));
        prop_assert!(sf.time_to_s(t1).unwrap() < sf.time_to_s(t2).unwrap());
    }

    #[test]
    fn closed_form_matches_quadrature(p in params(), f in 0.0..1.0f64) {
        let sf = ScaleFactor::new(p).unwrap();
        let t = time_in(&sf, f);
        let s = sf.time_to_s(t).unwrap();
        let q = integrate(|x| sf.eval_a(x).unwrap().powi(-2), 0.0, t, 0.0, 1e-13);
        prop_assert!((s - q).abs() <= 1e-10 * (1.0 + s), "s = {s}, quadrature = {q}");
    }

    #[test]
    fn round_trip(p in params(), f in 0.0..1.0f64) {
        let sf = ScaleFactor::new(p).unwrap();
        let t = time_in(&sf, f);
        let back = sf.s_to_time(sf.time_to_s(t).unwrap()).unwrap();
        prop_assert!((back - t).abs() <= 1e-12 * t.max(1e-300) + 1e-300, "{t} -> {back}");
    }

    #[test]
    fn ds_dt_is_inverse_square_scale(p in params(), f in 0.05..1.0f64) {
        let sf = ScaleFactor::new(p).unwrap();
        let t = time_in(&sf, f);
        let h = 1e-5 * t.max(1e-3);
        let fd = (sf.time_to_s(t + h).unwrap() - sf.time_to_s(t - h).unwrap()) / (2.0 * h);
        let exact = sf.eval_a(t).unwrap().powi(-2);
        prop_assert!((fd - exact).abs() <= 1e-6 * exact);
    }

    #[test]
    fn initial_values_and_weight(p in params(), f in 0.0..1.0f64) {
        let sf = ScaleFactor::new(p).unwrap();
        prop_assert_eq!(sf.time_to_s(0.0).unwrap(), 0.0);
        prop_assert!((sf.eval_a(0.0).unwrap() - p.a0).abs() <= 1e-14 * p.a0);
        let h = 1e-6;
        let dadt = (sf.eval_a(h).unwrap() - sf.eval_a(0.0).unwrap()) / h;
        prop_assert!((dadt - p.a1).abs() <= 1e-4 * (1.0 + p.a1.abs()));
        let t = time_in(&sf, f);
        let w = sf.eval_w(t).unwrap();
        let expected = (p.a0 / sf.eval_a(t).unwrap()).powf(p.n as f64 / 2.0);
        prop_assert!(w > 0.0);
        prop_assert!((w - expected).abs() <= 1e-12 * expected);
    }

    #[test]
    fn conformal_power_weight_is_constant(p in params(), f in 0.0..1.0f64) {
        let sf = ScaleFactor::new(p).unwrap();
        let s = sf.time_to_s(time_in(&sf, f)).unwrap();
        let pw = 1.0 + 4.0 / p.n as f64;
        let g = sf.nonlinear_weight(s, pw).unwrap();
        prop_assert!((g - p.a0 * p.a0).abs() <= 1e-10 * p.a0 * p.a0, "g = {g}");
    }

    #[test]
    fn horizon_formula(p in params()) {
        let n = p.n as f64;
        let k = p.a1 * (4.0 - n * (1.0 + p.sigma));
        let expected = if k > 0.0 {
            Extended::Finite(2.0 / (p.a0 * p.a1 * (4.0 - n * (1.0 + p.sigma))))
        } else {
            Extended::Infinite
        };
        match (p.horizon_s0(), expected) {
            (Extended::Finite(a), Extended::Finite(b)) => prop_assert!((a - b).abs() <= 1e-12 * b),
            (a, b) => prop_assert_eq!(a, b),
        }
        let t0 = p.horizon_t0();
        if (1.0 + p.sigma) * p.a1 >= 0.0 {
            prop_assert_eq!(t0, Extended::Infinite);
        } else {
            let want = -2.0 * p.a0 / (n * (1.0 + p.sigma) * p.a1);
            prop_assert!((t0.to_f64() - want).abs() <= 1e-12 * want);
        }
    }
}

#[test]
fn s_approaches_the_horizon() {
    // Finite S₀ with T₀ = ∞ and with T₀ < ∞.
    for p in [
        ScaleFactorParams::new(1, 0.0, 1.0, 0.5).unwrap(),
        ScaleFactorParams::new(2, -0.5, 2.0, 1.0).unwrap(),
        ScaleFactorParams::new(3, -1.0, 1.0, 0.3).unwrap(),
        ScaleFactorParams::new(1, -2.0, 1.0, 0.4).unwrap(),
    ] {
        let sf = ScaleFactor::new(p).unwrap();
        let s0 = sf.s0.finite().unwrap();
        let t_far = match sf.t0 {
            Extended::Finite(t0) => t0 * (1.0 - 1e-12),
            Extended::Infinite => 1e12,
        };
        let s = sf.time_to_s(t_far).unwrap();
        assert!((s - s0).abs() <= 1e-6 * s0, "{p:?}: {s} vs {s0}");
    }
}
