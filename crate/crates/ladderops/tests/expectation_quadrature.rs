//! Numerical-quadrature oracle for the closed-form expectation functional.
//!
//! The oracle integrates `∫ x^n φ_k(x) φ_{k-m}(x) dx` per mode with a
//! trapezoid rule over a wide window; on Gaussians that converges far past
//! the 1e-8 relative tolerance demanded here, and it never touches the
//! closed-form path it checks.

mod common;

use ladderops::{
    expectation, gaussian_moment, state_inner, Complex64, GaussianState, ModeIndex, OperatorExpr,
};
use proptest::prelude::*;

/// Trapezoid rule; spectrally accurate for the analytic integrands here.
fn trapezoid(f: impl Fn(f64) -> f64, lo: f64, hi: f64, steps: usize) -> f64 {
    let h = (hi - lo) / steps as f64;
    let mut sum = 0.5 * (f(lo) + f(hi));
    for i in 1..steps {
        sum += f(lo + i as f64 * h);
    }
    sum * h
}

fn phi(k: f64, x: f64) -> f64 {
    std::f64::consts::PI.powf(-0.25) * (-(x - k) * (x - k) / 2.0).exp()
}

/// `⟨φ_k, x^n T^m φ_k⟩ = ∫ x^n φ_k(x) φ_{k-m}(x) dx` by quadrature.
fn quad_mode_factor(n: u32, m: i32, k: f64) -> f64 {
    let center_lo = k.min(k - m as f64) - 12.0;
    let center_hi = k.max(k - m as f64) + 12.0;
    trapezoid(
        |x| x.powi(n as i32) * phi(k, x) * phi(k - m as f64, x),
        center_lo,
        center_hi,
        4000,
    )
}

fn quad_expectation(state: &GaussianState, a: &OperatorExpr) -> Complex64 {
    let mut total = Complex64::new(0.0, 0.0);
    for term in a.terms() {
        let mut modes: Vec<ModeIndex> = term.modes().collect();
        modes.sort_unstable();
        modes.dedup();
        let mut factor = 1.0;
        for mode in modes {
            let k = state.center(mode).expect("center present");
            factor *= quad_mode_factor(term.xpart.power(mode), term.shift.exponent(mode), k);
        }
        total += term.coeff * factor;
    }
    total
}

#[test]
fn moment_recursion_matches_quadrature() {
    // ∫ x² e^{-(x-1)²} dx / √π = 1.5 and friends
    let weight = |c: f64, n: u32| {
        trapezoid(
            |x| x.powi(n as i32) * (-(x - c) * (x - c)).exp(),
            c - 12.0,
            c + 12.0,
            4000,
        ) / std::f64::consts::PI.sqrt()
    };
    assert!((weight(1.0, 2) - 1.5).abs() < 1e-12);
    for &c in &[0.0, 0.7, 1.0, 2.5, 4.0] {
        for n in 0..=6u32 {
            let q = weight(c, n);
            let m = gaussian_moment(n, c);
            assert!(
                (q - m).abs() <= 1e-10 * (1.0 + m.abs()),
                "n={n} c={c}: quadrature {q} vs recursion {m}"
            );
        }
    }
}

#[test]
fn reference_overlaps_via_quadrature() {
    // single-mode overlap of neighbor Gaussians is e^{-1/4}
    let ov = trapezoid(|x| phi(1.0, x) * phi(0.0, x), -12.0, 13.0, 4000);
    assert!((ov - (-0.25f64).exp()).abs() < 1e-12);
    // two-mode ⟨φ_{1,0}, φ_{0,1}⟩ = e^{-1/2}, matching the closed form
    let a = GaussianState::new([(ModeIndex(1), 1.0), (ModeIndex(3), 0.0)]).unwrap();
    let b = GaussianState::new([(ModeIndex(1), 0.0), (ModeIndex(3), 1.0)]).unwrap();
    assert!((state_inner(&a, &b).unwrap() - ov * ov).abs() < 1e-12);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn expectation_matches_quadrature(
        term in common::arb_term(3, 2, 3),
        k1 in 0.0f64..5.0,
        k2 in 0.0f64..5.0,
        k3 in 0.0f64..5.0,
    ) {
        let state = GaussianState::new([
            (ModeIndex(1), k1),
            (ModeIndex(2), k2),
            (ModeIndex(3), k3),
        ]).unwrap();
        let expr = OperatorExpr::from_terms([term]);
        let closed = expectation(&state, &expr).unwrap();
        let quad = quad_expectation(&state, &expr);
        let scale = 1.0 + closed.norm().max(quad.norm());
        prop_assert!(
            (closed - quad).norm() <= 1e-8 * scale,
            "closed {closed} vs quadrature {quad}"
        );
    }

    #[test]
    fn expectation_is_linear_and_star_compatible(
        a in common::arb_expr(3, 2, 2, 3),
        b in common::arb_expr(3, 2, 2, 3),
        re in -2.0f64..2.0,
        im in -2.0f64..2.0,
    ) {
        let state = GaussianState::new([
            (ModeIndex(1), 1.0),
            (ModeIndex(2), 0.5),
            (ModeIndex(3), 2.0),
        ]).unwrap();
        let c = Complex64::new(re, im);
        let lhs = expectation(&state, &(&a + &b.scale(c))).unwrap();
        let rhs = expectation(&state, &a).unwrap() + c * expectation(&state, &b).unwrap();
        prop_assert!((lhs - rhs).norm() < 1e-10 * (1.0 + lhs.norm()));

        let adj = expectation(&state, &a.adjoint()).unwrap();
        let direct = expectation(&state, &a).unwrap();
        prop_assert!((adj - direct.conj()).norm() < 1e-10 * (1.0 + direct.norm()));
    }

    #[test]
    fn hermitian_expectations_are_real(a in common::arb_expr(3, 2, 2, 3)) {
        let state = GaussianState::new([
            (ModeIndex(1), 0.3),
            (ModeIndex(2), 1.7),
            (ModeIndex(3), 3.0),
        ]).unwrap();
        let h = &a + &a.adjoint();
        let v = expectation(&state, &h).unwrap();
        prop_assert!(v.im.abs() < 1e-12 * (1.0 + v.re.abs()));
    }
}
