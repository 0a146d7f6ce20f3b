//! Riccati treatment of the gated model's translation dynamics.
//!
//! In the gated model only `T_1` obeys a nonlinear equation,
//!
//! ```text
//! dT_1/dt = -iω_1 T_1(t) - iλ e^{-iω_3 t} T_3 - iλ e^{iω_3 t} T_1²(t) T_3^†,
//! ```
//!
//! an operator Riccati equation in the commutative subalgebra of shift
//! words. The two-exponential candidate assembled here,
//! `T_1(t) = c_+ e^{β_+ t} + c_- e^{β_- t}`, is *not* assumed to solve it:
//! [`RiccatiData::residual_at`] substitutes it back and the callers measure
//! the residual on probe states. What is exact is the regime structure:
//! `Re β_± = 0` when `4λ² < Ω²` (purely oscillatory) and
//! `Re β_± = ±p` with `p = √(4λ² - Ω²)/2` in the growth/decay regime.

use num_complex::Complex64;

use crate::algebra::{shift_op, OperatorExpr};
use crate::states::{expectation, GaussianState, StateError};

use super::{GatedPP, ModelError, PREDATOR, PREY};

/// Branch data and operator coefficients of the two-exponential candidate.
#[derive(Debug, Clone)]
pub struct RiccatiData {
    pub alpha_plus: Complex64,
    pub alpha_minus: Complex64,
    pub beta_plus: Complex64,
    pub beta_minus: Complex64,
    /// `Re √(4λ² - Ω²)/2`: zero in the oscillatory regime, the growth rate
    /// otherwise.
    pub p: f64,
    /// `5Ω/2`, the oscillation rate of the driving terms.
    pub q: f64,
    pub c_plus: OperatorExpr,
    pub c_minus: OperatorExpr,
    pub d_plus: OperatorExpr,
    pub d_minus: OperatorExpr,
    pub oscillatory: bool,
    omega1: f64,
    omega3: f64,
    lambda: f64,
    sqrt_disc: Complex64,
}

impl RiccatiData {
    pub(super) fn for_model(m: &GatedPP) -> Result<Self, ModelError> {
        let gap = m.gap();
        let lambda = m.lambda;
        let disc = 4.0 * lambda * lambda - gap * gap;
        if disc == 0.0 {
            return Err(ModelError::RiccatiDegenerate);
        }
        let sqrt_disc = if disc > 0.0 {
            Complex64::new(disc.sqrt(), 0.0)
        } else {
            Complex64::new(0.0, (-disc).sqrt())
        };
        let i = Complex64::new(0.0, 1.0);
        let alpha_plus = (-i * gap + sqrt_disc) / 2.0;
        let alpha_minus = (-i * gap - sqrt_disc) / 2.0;
        let shift_back = -i * (m.omega1 + gap);
        let beta_plus = alpha_plus + shift_back;
        let beta_minus = alpha_minus + shift_back;

        // c_± = ∓(i/√(4λ²-Ω²)) (λ T_3^{-1} + i α_± T_1)
        let t1 = shift_op(PREDATOR, 1);
        let t3_inv = shift_op(PREY, -1);
        let core = |alpha: Complex64| -> OperatorExpr {
            &t3_inv.scale(Complex64::new(lambda, 0.0)) + &t1.scale(i * alpha)
        };
        let c_plus = core(alpha_plus).scale(-i / sqrt_disc);
        let c_minus = core(alpha_minus).scale(i / sqrt_disc);
        let d_plus = c_plus.mul(&t3_inv);
        let d_minus = c_minus.mul(&t3_inv);

        Ok(Self {
            alpha_plus,
            alpha_minus,
            beta_plus,
            beta_minus,
            p: sqrt_disc.re / 2.0,
            q: 2.5 * gap,
            c_plus,
            c_minus,
            d_plus,
            d_minus,
            oscillatory: disc < 0.0,
            omega1: m.omega1,
            omega3: m.omega3,
            lambda,
            sqrt_disc,
        })
    }

    /// The candidate `T_1(t) = c_+ e^{β_+ t} + c_- e^{β_- t}`; at `t = 0`
    /// the branch coefficients sum to `T_1` identically.
    pub fn t1_at(&self, t: f64) -> OperatorExpr {
        &self.c_plus.scale((self.beta_plus * t).exp())
            + &self.c_minus.scale((self.beta_minus * t).exp())
    }

    fn t1_derivative_at(&self, t: f64) -> OperatorExpr {
        &self.c_plus.scale(self.beta_plus * (self.beta_plus * t).exp())
            + &self
                .c_minus
                .scale(self.beta_minus * (self.beta_minus * t).exp())
    }

    /// Left over when the candidate is substituted into the `T_1`
    /// equation; identically zero would mean the candidate is exact.
    pub fn residual_at(&self, t: f64) -> OperatorExpr {
        let i = Complex64::new(0.0, 1.0);
        let t1 = self.t1_at(t);
        let drive = shift_op(PREY, 1)
            .scale(i * self.lambda * (Complex64::new(0.0, -self.omega3 * t)).exp());
        let quad = t1
            .mul(&t1)
            .mul(&shift_op(PREY, -1))
            .scale(i * self.lambda * (Complex64::new(0.0, self.omega3 * t)).exp());
        let linear = t1.scale(i * self.omega1);
        &(&(&self.t1_derivative_at(t) + &linear) + &drive) + &quad
    }

    /// Largest `|⟨φ, residual φ⟩|` over a probe family and a time list;
    /// reported, not asserted.
    pub fn residual_on_probe(
        &self,
        probe: &[GaussianState],
        times: &[f64],
    ) -> Result<f64, StateError> {
        let mut worst = 0.0f64;
        for &t in times {
            let r = self.residual_at(t);
            for state in probe {
                worst = worst.max(expectation(state, &r)?.norm());
            }
        }
        Ok(worst)
    }

    /// Driving operator `r(t) = iλ(d_+ e^{(p-iq)t} + d_- e^{-(p+iq)t})`
    /// with the exact complex branch exponents.
    pub fn r_at(&self, t: f64) -> OperatorExpr {
        let i = Complex64::new(0.0, 1.0);
        let (e_plus, e_minus) = self.drive_exponents();
        &self.d_plus.scale(i * self.lambda * (e_plus * t).exp())
            + &self.d_minus.scale(i * self.lambda * (e_minus * t).exp())
    }

    /// Multiplying operator
    /// `v(t) = iλ(d_+ e^{(p-iq)t} + d_- e^{-(p+iq)t} - d_+^† e^{(p+iq)t} - d_-^† e^{-(p-iq)t})`.
    pub fn v_at(&self, t: f64) -> OperatorExpr {
        let i = Complex64::new(0.0, 1.0);
        let (e_plus, e_minus) = self.drive_exponents();
        let direct = &self.d_plus.scale(i * self.lambda * (e_plus * t).exp())
            + &self.d_minus.scale(i * self.lambda * (e_minus * t).exp());
        let mirrored = &self
            .d_plus
            .adjoint()
            .scale(i * self.lambda * (e_plus.conj() * t).exp())
            + &self
                .d_minus
                .adjoint()
                .scale(i * self.lambda * (e_minus.conj() * t).exp());
        &direct - &mirrored
    }

    /// `β_± + iω_3 = ±√(4λ²-Ω²)/2 - i·5Ω/2`, i.e. `±p - iq` in the growth
    /// regime.
    fn drive_exponents(&self) -> (Complex64, Complex64) {
        let iq = Complex64::new(0.0, self.q);
        (self.sqrt_disc / 2.0 - iq, -self.sqrt_disc / 2.0 - iq)
    }
}
