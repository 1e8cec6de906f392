use expanse_core::classifier::{
    eval_a, eval_a_quadrature, p1_crit, p_crit, q_mu0, theorem1_verdict, Condition, ProblemSpec, Window,
};
use expanse_core::{Extended, ScaleFactor, ScaleFactorParams, Sign};
use num_complex::Complex64;
use proptest::prelude::*;

fn spec(n: u32, sigma: f64, a0: f64, a1: f64, p: f64, mu0: f64) -> ProblemSpec {
    ProblemSpec {
        background: ScaleFactorParams { n, sigma, a0, a1 },
        lambda: Complex64::new(-1.0, 0.0),
        omega: 0.0,
        sign: Sign::Plus,
        p,
        mu0,
    }
}

/// Admissible specs with `p ∈ (1, p(μ₀)]`; `p` stays away from `p(μ₀)` unless
/// it sits exactly on it, so that `q(μ₀)` is moderate.
fn specs() -> impl Strategy<Value = ProblemSpec> {
    (
        1u32..=4,
        prop_oneof![3 => -2.0..2.0f64, 1 => Just(-1.0)],
        0.5..2.0f64,
        prop_oneof![4 => -1.5..1.5f64, 1 => Just(0.0)],
        prop_oneof![4 => 0.02..0.9f64, 1 => Just(1.0)],
        prop_oneof![3 => 0.0..0.95f64, 1 => Just(0.0)],
    )
        .prop_map(|(n, sigma, a0, a1, pf, mf)| {
            let mu0 = mf * n as f64 / 2.0;
            let pc = p_crit(n, mu0);
            let p = if pf == 1.0 { pc } else { 1.0 + pf * (pc - 1.0) };
            spec(n, sigma, a0, a1, p, mu0)
        })
}

/// Finite s-window end inside `(0, 0.9·S₀]`, capped at 10 and shortened so
/// that `a/a₀` stays inside `[1e−2, 1e2]`.
fn s_end(sp: &ProblemSpec, frac: f64) -> f64 {
    let sf = ScaleFactor::new(sp.background).unwrap();
    let inside = |s: f64| (1e-2..=1e2).contains(&(sf.a_at_s(s).unwrap() / sp.background.a0));
    let mut hi = sf.s0.finite().map_or(10.0, |s0| (0.9 * s0).min(10.0));
    if !inside(hi) {
        let mut lo = 0.0;
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if inside(mid) {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        hi = lo;
    }
    frac * hi
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn closed_form_matches_quadrature(sp in specs(), f in 0.05..1.0f64) {
        let s = s_end(&sp, f);
        let closed = eval_a(&sp, Window::S(Extended::Finite(s))).unwrap();
        let quad = eval_a_quadrature(&sp, s).unwrap();
        let closed = closed.finite().unwrap();
        prop_assert!((closed - quad).abs() <= 1e-8 * quad.abs().max(1e-300), "{closed} vs {quad} for {sp:?}");
    }

    #[test]
    fn a_grows_with_the_window(sp in specs(), f1 in 0.0..1.0f64, f2 in 0.0..1.0f64) {
        let (lo, hi) = (s_end(&sp, f1.min(f2)), s_end(&sp, f1.max(f2)));
        let a_lo = eval_a(&sp, Window::S(Extended::Finite(lo))).unwrap().to_f64();
        let a_hi = eval_a(&sp, Window::S(Extended::Finite(hi))).unwrap().to_f64();
        prop_assert!(a_lo <= a_hi * (1.0 + 1e-12), "{a_lo} > {a_hi}");
        let full = eval_a(&sp, Window::S(sp.background.horizon_s0())).unwrap().to_f64();
        prop_assert!(a_hi <= full * (1.0 + 1e-12));
    }

    #[test]
    fn thresholds_are_ordered(n in 1u32..=4, mf in 0.01..0.99f64, sigma in -0.99..3.0f64) {
        let mu0 = mf * n as f64 / 2.0;
        let p1 = p1_crit(n, mu0, sigma).unwrap();
        prop_assert!(p_crit(n, mu0) > p1 && p1 > 1.0);
    }

    #[test]
    fn verdicts_are_sound(sp in specs()) {
        let v = theorem1_verdict(&sp).unwrap();
        prop_assume!(v.local_wellposed);
        let full = eval_a(&sp, Window::S(sp.background.horizon_s0())).unwrap();
        let fired = v.fired.iter().any(|c| matches!(
            c,
            Condition::I | Condition::Ii | Condition::Iii | Condition::Iv | Condition::V | Condition::Vi
        ));
        prop_assert_eq!(full.is_finite(), fired, "{:?}: A = {}, fired {:?}", sp, full, v.fired);
    }
}

#[test]
fn p1_tends_to_p_as_mu0_vanishes() {
    for n in 1..=4 {
        for sigma in [-0.5, 0.0, 1.0 / 3.0, 2.0] {
            let pc = p_crit(n, 0.0);
            assert_eq!(p1_crit(n, 0.0, sigma), Some(pc));
            let mut last = f64::INFINITY;
            for mu0 in [1e-2, 1e-4, 1e-6, 1e-8] {
                let gap = (p1_crit(n, mu0, sigma).unwrap() - p_crit(n, mu0)).abs();
                assert!(gap < last);
                last = gap;
            }
            assert!(last < 1e-6);
        }
    }
}

#[test]
fn alpha_one_branch_sits_at_p1() {
    for (n, mu0, sigma) in [(3u32, 1.0, 0.0), (2, 0.5, 1.0 / 3.0), (4, 1.2, -0.5), (1, 0.2, 2.0)] {
        let alpha = |p: f64| {
            let q = q_mu0(n, mu0, p).unwrap().to_f64();
            2.0 * (p - 1.0) * mu0 * q / (n as f64 * (1.0 + sigma))
        };
        let (mut lo, mut hi) = (1.0 + 1e-12, p_crit(n, mu0) - 1e-12);
        assert!(alpha(lo) < 1.0 && alpha(hi) > 1.0);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if alpha(mid) < 1.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let p1 = p1_crit(n, mu0, sigma).unwrap();
        assert!((lo - p1).abs() < 1e-10, "bisection {lo} vs p1 {p1}");

        // A is continuous across the logarithmic branch.
        let sf = ScaleFactor::new(ScaleFactorParams::new(n, sigma, 1.0, 0.4).unwrap()).unwrap();
        let s = sf.s0.finite().map_or(3.0, |s0| 0.5 * s0);
        let at = |p: f64| eval_a(&spec(n, sigma, 1.0, 0.4, p, mu0), Window::S(Extended::Finite(s))).unwrap().to_f64();
        let centre = at(p1);
        for dp in [-1e-7, 1e-7] {
            assert!((at(p1 + dp) - centre).abs() <= 1e-5 * centre);
        }
        let quad = eval_a_quadrature(&spec(n, sigma, 1.0, 0.4, p1, mu0), s).unwrap();
        assert!((centre - quad).abs() <= 1e-8 * quad);
    }
}
