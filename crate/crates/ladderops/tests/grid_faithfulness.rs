//! The algebra and the grid must tell the same story: applying a canonical
//! product `A·B` to a grid function equals applying `B` then `A`, away from
//! the absorbing boundary where truncation breaks composition.

mod common;

use ladderops::{
    apply_hamiltonian, discretize_state, grid_inner, mean_x, propagate, GaussianState, GridConfig,
    GridState, ModeIndex, OperatorExpr, QuadraticPP,
};
use proptest::prelude::*;

const M1: ModeIndex = ModeIndex(1);
const M2: ModeIndex = ModeIndex(2);

fn test_grid() -> (GridConfig, GridState) {
    let cfg = GridConfig::symmetric([M1, M2], 6.0, 4).unwrap();
    let state = GaussianState::new([(M1, 0.5), (M2, -0.5)]).unwrap();
    let psi = discretize_state(&state, &cfg).unwrap();
    (cfg, psi)
}

/// Largest per-mode translation reach of any term, in grid cells.
fn reach_cells(a: &OperatorExpr, s: u32) -> usize {
    a.terms()
        .iter()
        .flat_map(|t| t.shift.exponents().map(|(_, m)| m.unsigned_abs() as usize))
        .max()
        .unwrap_or(0)
        * s as usize
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn product_application_composes_on_interior(
        a in common::arb_expr(2, 2, 2, 3),
        b in common::arb_expr(2, 2, 2, 3),
    ) {
        let (_cfg, psi) = test_grid();
        let s = 4u32;
        let composed = apply_hamiltonian(&apply_hamiltonian(&psi, &b).unwrap(), &a).unwrap();
        let direct = apply_hamiltonian(&psi, &a.mul(&b)).unwrap();

        let margin = reach_cells(&a, s) + reach_cells(&b, s);
        let n = 48usize; // 12 units × 4 cells
        let scale = 1.0
            + composed.amplitudes().iter().map(|v| v.norm()).fold(0.0, f64::max);
        for (flat, (x, y)) in direct
            .amplitudes()
            .iter()
            .zip(composed.amplitudes())
            .enumerate()
        {
            let (i, j) = (flat / n, flat % n);
            let interior = i >= margin && i < n - margin && j >= margin && j < n - margin;
            if interior {
                prop_assert!(
                    (x - y).norm() <= 1e-10 * scale,
                    "cell ({i},{j}): product {x} vs composition {y}"
                );
            }
        }
    }

    #[test]
    fn hermitian_forms_have_real_grid_expectations(a in common::arb_expr(2, 2, 2, 3)) {
        let (_cfg, psi) = test_grid();
        let h = &a + &a.adjoint();
        let hpsi = apply_hamiltonian(&psi, &h).unwrap();
        let v = grid_inner(&psi, &hpsi);
        prop_assert!(v.im.abs() <= 1e-10 * (1.0 + v.re.abs()));
    }
}

#[test]
fn grid_expectations_match_closed_form() {
    // same functional, two very different evaluation paths
    let cfg = GridConfig::symmetric([M1, M2], 8.0, 8).unwrap();
    let state = GaussianState::new([(M1, 1.5), (M2, 0.5)]).unwrap();
    let psi = discretize_state(&state, &cfg).unwrap();
    let exprs: Vec<OperatorExpr> = [
        "x1",
        "x1^2",
        "T1*T2^-1",
        "x1*T2 + x1*T2^-1",
        "(0+1i)*T1 + (0-1i)*T1^-1",
    ]
    .iter()
    .map(|s| s.parse().unwrap())
    .collect();
    for expr in &exprs {
        let closed = ladderops::expectation(&state, expr).unwrap();
        let grid = grid_inner(&psi, &apply_hamiltonian(&psi, expr).unwrap());
        assert!(
            (closed - grid).norm() < 1e-8 * (1.0 + closed.norm()),
            "{expr}: closed {closed} vs grid {grid}"
        );
    }
}

#[test]
fn refinement_improves_trajectories_at_integrator_order() {
    // quadratic preset against its closed form with (dt, s) and (dt/2, 2s)
    let model = QuadraticPP::new(3.0, 1.0, 3.0).unwrap();
    let state = GaussianState::new([
        (ladderops::models::PREDATOR, 2.0),
        (ladderops::models::PREY, 2.0),
    ])
    .unwrap();
    let times = [0.25, 0.5];

    let run = |s: u32, dt: f64| -> f64 {
        let mut cfg = GridConfig::symmetric(
            [ladderops::models::PREDATOR, ladderops::models::PREY],
            10.0,
            s,
        )
        .unwrap();
        cfg.dt = dt;
        // the coarse run is deliberately inaccurate; loosen the health
        // guards so the error can be measured instead of aborted on
        cfg.boundary_mass_threshold = 1e-3;
        let psi = discretize_state(&state, &cfg).unwrap();
        let prop = propagate(&psi, &model.hamiltonian(), &times, &cfg).unwrap();
        let mut worst = 0.0f64;
        for (i, &t) in times.iter().enumerate() {
            let (r1, r3) = model.mean_reference(2.0, 2.0, t).unwrap();
            worst = worst.max((prop.means[&ladderops::models::PREDATOR][i] - r1).abs());
            worst = worst.max((prop.means[&ladderops::models::PREY][i] - r3).abs());
        }
        worst
    };

    let coarse = run(4, 0.02);
    let fine = run(8, 0.01);
    assert!(
        coarse > 6.0 * fine,
        "expected at least ~8x improvement, got coarse {coarse:.3e} vs fine {fine:.3e}"
    );
}

#[test]
fn mean_x_on_product_state_reads_each_axis() {
    let cfg = GridConfig::symmetric([M1, M2], 8.0, 8).unwrap();
    let state = GaussianState::new([(M1, 3.0), (M2, -1.5)]).unwrap();
    let psi = discretize_state(&state, &cfg).unwrap();
    assert!((mean_x(&psi, M1) - 3.0).abs() < 1e-8);
    assert!((mean_x(&psi, M2) + 1.5).abs() < 1e-8);
}

#[test]
fn drops_amplitude_pushed_past_the_edge() {
    // a big shift throws mass out; the remaining amplitudes are untouched
    let cfg = GridConfig::symmetric([M1], 6.0, 4).unwrap();
    let state = GaussianState::new([(M1, 2.0)]).unwrap();
    let psi = discretize_state(&state, &cfg).unwrap();
    let shifted = apply_hamiltonian(&psi, &ladderops::shift_op(M1, -5)).unwrap();
    let norm_kept = shifted.norm();
    assert!(norm_kept < 1.0);
    // ψ(x - 5) centered at 7 on a grid ending at 6: the surviving mass is
    // the left tail only
    assert!(norm_kept > 0.0 && norm_kept < 0.5);
    let back = apply_hamiltonian(&shifted, &ladderops::shift_op(M1, 5)).unwrap();
    let overlap = grid_inner(&psi, &back).re;
    assert!((overlap - norm_kept * norm_kept).abs() < 1e-10);
}

#[test]
fn complex_hamiltonian_coefficients_round_trip_through_grid() {
    // i(T_1 - T_1^†) is Hermitian; its grid expectation is real and
    // matches the closed form
    let cfg = GridConfig::symmetric([M1], 8.0, 8).unwrap();
    let state = GaussianState::new([(M1, 1.0)]).unwrap();
    let psi = discretize_state(&state, &cfg).unwrap();
    let h: OperatorExpr = "(0+1i)*T1 + (0-1i)*T1^-1".parse().unwrap();
    let grid = grid_inner(&psi, &apply_hamiltonian(&psi, &h).unwrap());
    let closed = ladderops::expectation(&state, &h).unwrap();
    assert!(grid.im.abs() < 1e-12);
    assert!((grid - closed).norm() < 1e-8);
    assert!(closed.norm() < 1e-12); // ⟨i(T - T^†)⟩ = i(e^{-1/4} - e^{-1/4}) = 0
}
