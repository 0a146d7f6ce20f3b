//! The concrete systems shipped as presets: the quadratic predator–prey
//! exchange model, the cubic three-agent model with a mediating agent, the
//! gated cubic model whose interaction switches off without predators, and
//! a small fermionic two-mode baseline for comparison.
//!
//! The same Hamiltonians read as decision-making ("love affair") models
//! under a relabeling of the agents; the CLI exposes alias preset names
//! for that reading, the math is identical.

mod fermi;
mod riccati;

pub use fermi::FermiPP;
pub use riccati::RiccatiData;

use std::collections::BTreeMap;

use num_complex::Complex64;
use thiserror::Error;

use crate::algebra::{shift_op, x_op, ModeIndex, OperatorExpr, ShiftWord};
use crate::dynamics::SolvableModel;
use crate::oracle::{discretize_state, propagate, GridConfig, OracleError};
use crate::states::GaussianState;

/// Mode labels shared by all presets: 1 = predator, 2 = mediating agent,
/// 3 = prey.
pub const PREDATOR: ModeIndex = ModeIndex(1);
pub const MEDIATOR: ModeIndex = ModeIndex(2);
pub const PREY: ModeIndex = ModeIndex(3);

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ModelError {
    #[error("frequencies must be strictly positive and finite")]
    NonPositiveFrequency,
    #[error("parameter is not finite")]
    NonFiniteParameter,
    #[error("frequency gap is zero; the closed form degenerates")]
    DegenerateGap,
    #[error("a word frequency is zero; the closed form degenerates")]
    ZeroWordFrequency,
    #[error("4λ² = Ω²: the square-root branch degenerates")]
    RiccatiDegenerate,
    #[error("δ = 0: the fermionic closed form degenerates")]
    DegenerateDelta,
    #[error("fermionic occupations must be 0 or 1")]
    InvalidOccupation,
}

fn check_pos(omega: f64) -> Result<f64, ModelError> {
    if omega.is_finite() && omega > 0.0 {
        Ok(omega)
    } else {
        Err(ModelError::NonPositiveFrequency)
    }
}

fn check_finite(v: f64) -> Result<f64, ModelError> {
    if v.is_finite() {
        Ok(v)
    } else {
        Err(ModelError::NonFiniteParameter)
    }
}

/// Two species exchanging population through `T_1^† T_3 + T_3^† T_1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadraticPP {
    pub omega1: f64,
    pub omega3: f64,
    pub lambda: f64,
}

impl QuadraticPP {
    pub fn new(omega1: f64, omega3: f64, lambda: f64) -> Result<Self, ModelError> {
        Ok(Self {
            omega1: check_pos(omega1)?,
            omega3: check_pos(omega3)?,
            lambda: check_finite(lambda)?,
        })
    }

    /// Fix the gap `Ω = ω_1 - ω_3` directly with `ω_3 = 1`; the mean
    /// trajectories depend on the frequencies only through the gap.
    pub fn with_gap(gap: f64, lambda: f64) -> Result<Self, ModelError> {
        Self::new(1.0 + gap, 1.0, lambda)
    }

    /// `Ω = ω_1 - ω_3`.
    pub fn gap(&self) -> f64 {
        self.omega1 - self.omega3
    }

    pub fn is_degenerate(&self) -> bool {
        self.gap() == 0.0
    }

    pub fn model(&self) -> SolvableModel {
        let lam = Complex64::new(self.lambda, 0.0);
        SolvableModel::new(
            BTreeMap::from([(PREDATOR, self.omega1), (PREY, self.omega3)]),
            vec![
                (lam, ShiftWord::from_exponents([(PREDATOR, -1), (PREY, 1)])),
                (lam, ShiftWord::from_exponents([(PREDATOR, 1), (PREY, -1)])),
            ],
        )
        .expect("validated parameters")
    }

    pub fn hamiltonian(&self) -> OperatorExpr {
        self.model().hamiltonian()
    }

    /// Golden closed form for the mean values:
    /// `x_1(t) = k_1 - (2λ/(Ω√e))(cos Ωt - 1)` and the mirrored `x_3`.
    pub fn mean_reference(&self, k1: f64, k3: f64, t: f64) -> Result<(f64, f64), ModelError> {
        let gap = self.gap();
        if gap == 0.0 {
            return Err(ModelError::DegenerateGap);
        }
        let swing = 2.0 * self.lambda / gap * (-0.5f64).exp() * ((gap * t).cos() - 1.0);
        Ok((k1 - swing, k3 + swing))
    }
}

/// Three agents with the exchange mediated by agent 2; the interaction is
/// cubic in the translations yet still exactly solvable.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CubicPP3 {
    pub omega1: f64,
    pub omega2: f64,
    pub omega3: f64,
    pub lambda1: f64,
    pub lambda2: f64,
}

impl CubicPP3 {
    pub fn new(
        omega1: f64,
        omega2: f64,
        omega3: f64,
        lambda1: f64,
        lambda2: f64,
    ) -> Result<Self, ModelError> {
        Ok(Self {
            omega1: check_pos(omega1)?,
            omega2: check_pos(omega2)?,
            omega3: check_pos(omega3)?,
            lambda1: check_finite(lambda1)?,
            lambda2: check_finite(lambda2)?,
        })
    }

    /// Fix the word frequencies `Ω_1 = ω_1 - ω_2 - ω_3` and
    /// `Ω_2 = ω_1 + ω_2 - ω_3` directly with `ω_3 = 1`. Requires
    /// `Ω_2 > Ω_1` (forced anyway by `ω_2 > 0`).
    pub fn with_gaps(gap1: f64, gap2: f64, lambda1: f64, lambda2: f64) -> Result<Self, ModelError> {
        let omega2 = (gap2 - gap1) / 2.0;
        let omega1 = 1.0 + (gap1 + gap2) / 2.0;
        Self::new(omega1, omega2, 1.0, lambda1, lambda2)
    }

    pub fn gap1(&self) -> f64 {
        self.omega1 - self.omega2 - self.omega3
    }

    pub fn gap2(&self) -> f64 {
        self.omega1 + self.omega2 - self.omega3
    }

    pub fn model(&self) -> SolvableModel {
        let l1 = Complex64::new(self.lambda1, 0.0);
        let l2 = Complex64::new(self.lambda2, 0.0);
        let w = |e1: i32, e2: i32, e3: i32| {
            ShiftWord::from_exponents([(PREDATOR, e1), (MEDIATOR, e2), (PREY, e3)])
        };
        SolvableModel::new(
            BTreeMap::from([
                (PREDATOR, self.omega1),
                (MEDIATOR, self.omega2),
                (PREY, self.omega3),
            ]),
            vec![
                (l1, w(-1, 1, 1)),
                (l1, w(1, -1, -1)),
                (l2, w(-1, -1, 1)),
                (l2, w(1, 1, -1)),
            ],
        )
        .expect("validated parameters")
    }

    pub fn hamiltonian(&self) -> OperatorExpr {
        self.model().hamiltonian()
    }

    /// Oscillation envelope
    /// `V(t) = λ_1/Ω_1 (cos Ω_1 t - 1) + λ_2/Ω_2 (cos Ω_2 t - 1)`.
    pub fn envelope_v(&self, t: f64) -> Result<f64, ModelError> {
        let (g1, g2) = (self.gap1(), self.gap2());
        if g1 == 0.0 || g2 == 0.0 {
            return Err(ModelError::ZeroWordFrequency);
        }
        Ok(self.lambda1 / g1 * ((g1 * t).cos() - 1.0)
            + self.lambda2 / g2 * ((g2 * t).cos() - 1.0))
    }

    /// Supremum of the envelope's swing,
    /// `Δ = 2(λ_1/|Ω_1| + λ_2/|Ω_2|)`; attained exactly only when the two
    /// cosines can reach -1 simultaneously, approached from below
    /// otherwise.
    pub fn amplitude_delta(&self) -> Result<f64, ModelError> {
        let (g1, g2) = (self.gap1(), self.gap2());
        if g1 == 0.0 || g2 == 0.0 {
            return Err(ModelError::ZeroWordFrequency);
        }
        Ok(2.0 * (self.lambda1 / g1.abs() + self.lambda2 / g2.abs()))
    }

    /// Numerically maximized `(min V, max V)` over `[0, horizon]`: a dense
    /// scan followed by golden-section refinement of both extrema.
    pub fn envelope_range(&self, horizon: f64, samples: usize) -> Result<(f64, f64), ModelError> {
        let v = |t: f64| self.envelope_v(t).expect("gaps checked below");
        let (g1, g2) = (self.gap1(), self.gap2());
        if g1 == 0.0 || g2 == 0.0 {
            return Err(ModelError::ZeroWordFrequency);
        }
        let n = samples.max(16);
        let step = horizon / n as f64;
        let (mut tmin, mut tmax) = (0.0f64, 0.0f64);
        let (mut vmin, mut vmax) = (v(0.0), v(0.0));
        for i in 1..=n {
            let t = i as f64 * step;
            let val = v(t);
            if val < vmin {
                vmin = val;
                tmin = t;
            }
            if val > vmax {
                vmax = val;
                tmax = t;
            }
        }
        let refine = |t0: f64, sign: f64| -> f64 {
            // golden-section on [t0 - step, t0 + step] for sign·V maximal
            let phi = (5.0f64.sqrt() - 1.0) / 2.0;
            let (mut a, mut b) = ((t0 - step).max(0.0), (t0 + step).min(horizon));
            let mut c = b - phi * (b - a);
            let mut d = a + phi * (b - a);
            for _ in 0..200 {
                if sign * v(c) > sign * v(d) {
                    b = d;
                } else {
                    a = c;
                }
                c = b - phi * (b - a);
                d = a + phi * (b - a);
            }
            v((a + b) / 2.0)
        };
        Ok((refine(tmin, -1.0), refine(tmax, 1.0)))
    }

    /// Golden closed form for the three mean values; the asymmetric
    /// combination in `x_2` and the shared `e^{-3/4}` overlap factor come
    /// with it.
    pub fn mean_reference(
        &self,
        k1: f64,
        k2: f64,
        k3: f64,
        t: f64,
    ) -> Result<(f64, f64, f64), ModelError> {
        let (g1, g2) = (self.gap1(), self.gap2());
        if g1 == 0.0 || g2 == 0.0 {
            return Err(ModelError::ZeroWordFrequency);
        }
        let overlap = (-0.75f64).exp();
        let a = self.lambda1 / g1 * ((g1 * t).cos() - 1.0);
        let b = self.lambda2 / g2 * ((g2 * t).cos() - 1.0);
        Ok((
            k1 - 2.0 * overlap * (a + b),
            k2 + 2.0 * overlap * (a - b),
            k3 + 2.0 * overlap * (a + b),
        ))
    }
}

/// Gated variant: the exchange is multiplied by `x_1`, so without
/// predators the interaction is inert. Not in the solvable class (the
/// interaction carries a position factor); the grid propagator is the
/// ground truth and the perturbative/Riccati treatments live alongside.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GatedPP {
    pub omega1: f64,
    pub omega3: f64,
    pub lambda: f64,
}

impl GatedPP {
    pub fn new(omega1: f64, omega3: f64, lambda: f64) -> Result<Self, ModelError> {
        Ok(Self {
            omega1: check_pos(omega1)?,
            omega3: check_pos(omega3)?,
            lambda: check_finite(lambda)?,
        })
    }

    pub fn with_gap(gap: f64, lambda: f64) -> Result<Self, ModelError> {
        Self::new(1.0 + gap, 1.0, lambda)
    }

    pub fn gap(&self) -> f64 {
        self.omega1 - self.omega3
    }

    /// `ω_1 x_1 + ω_3 x_3 + λ(x_1 T_1^† T_3 + T_1 T_3^† x_1)`; Hermitian by
    /// construction.
    pub fn hamiltonian(&self) -> OperatorExpr {
        let free = &x_op(PREDATOR).scale(Complex64::new(self.omega1, 0.0))
            + &x_op(PREY).scale(Complex64::new(self.omega3, 0.0));
        let gate = &x_op(PREDATOR)
            .mul(&shift_op(PREDATOR, -1))
            .mul(&shift_op(PREY, 1))
            + &shift_op(PREDATOR, 1)
                .mul(&shift_op(PREY, -1))
                .mul(&x_op(PREDATOR));
        &free + &gate.scale(Complex64::new(self.lambda, 0.0))
    }

    /// First order in `λ`:
    /// `x_1(t) = k_1 - (2λ/(Ω√e))(k_1 + 1/2)(cos Ωt - 1)`; the amplitude
    /// now depends on the initial condition through `k_1 + 1/2`.
    pub fn perturbative_x1(&self, k1: f64, t: f64) -> Result<f64, ModelError> {
        let gap = self.gap();
        if gap == 0.0 {
            return Err(ModelError::DegenerateGap);
        }
        Ok(k1 - 2.0 * self.lambda / gap
            * (-0.5f64).exp()
            * (k1 + 0.5)
            * ((gap * t).cos() - 1.0))
    }

    pub fn riccati(&self) -> Result<RiccatiData, ModelError> {
        RiccatiData::for_model(self)
    }

    /// Ground-truth `⟨x_1⟩(t)` via the grid propagator; the formal closed
    /// form for this model is not evaluated symbolically.
    pub fn exact_mean_x1(
        &self,
        state: &GaussianState,
        times: &[f64],
        cfg: &GridConfig,
    ) -> Result<Vec<f64>, OracleError> {
        let psi0 = discretize_state(state, cfg)?;
        let prop = propagate(&psi0, &self.hamiltonian(), times, cfg)?;
        Ok(prop.means[&PREDATOR].clone())
    }
}
