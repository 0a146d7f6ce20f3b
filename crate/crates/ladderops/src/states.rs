//! Shifted-Gaussian product states and the closed-form expectation
//! functional that projects operator expressions to numbers.
//!
//! Each mode carries the unit-width Gaussian `φ_0(x) = π^{-1/4} e^{-x²/2}`
//! translated to a real center `k_j`; the state is the product over modes.
//! For a normal term `x^n T^m` the per-mode expectation factor is
//! `e^{-m²/4} · M_n(k - m/2)` where `M_n(c)` is the n-th moment of the
//! normalized Gaussian weight `e^{-(x-c)²}/√π`. Other reference profiles
//! are possible in principle but are not implemented here.

use std::collections::BTreeMap;

use num_complex::Complex64;
use thiserror::Error;

use crate::algebra::{ModeIndex, OperatorExpr};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum StateError {
    #[error("no center declared for mode {0}")]
    MissingCenter(ModeIndex),
    #[error("states are defined on different mode sets")]
    ModeMismatch,
    #[error("center for mode {0} is not finite")]
    NonFiniteCenter(ModeIndex),
}

/// Product of unit-width Gaussians with per-mode real centers.
///
/// Normalized by construction; centers may be any finite reals even though
/// the population presets only ever use nonnegative ones.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussianState {
    centers: BTreeMap<ModeIndex, f64>,
}

impl GaussianState {
    pub fn new<I: IntoIterator<Item = (ModeIndex, f64)>>(centers: I) -> Result<Self, StateError> {
        let centers: BTreeMap<ModeIndex, f64> = centers.into_iter().collect();
        for (&mode, &k) in &centers {
            if !k.is_finite() {
                return Err(StateError::NonFiniteCenter(mode));
            }
        }
        Ok(Self { centers })
    }

    pub fn center(&self, mode: ModeIndex) -> Option<f64> {
        self.centers.get(&mode).copied()
    }

    pub fn centers(&self) -> impl Iterator<Item = (ModeIndex, f64)> + '_ {
        self.centers.iter().map(|(&j, &k)| (j, k))
    }

    pub fn modes(&self) -> impl Iterator<Item = ModeIndex> + '_ {
        self.centers.keys().copied()
    }
}

/// `M_n(c) = ∫ x^n e^{-(x-c)²} dx / √π` by the three-term recursion
/// `M_0 = 1`, `M_1 = c`, `M_n = c·M_{n-1} + (n-1)/2·M_{n-2}`.
pub fn gaussian_moment(n: u32, c: f64) -> f64 {
    match n {
        0 => 1.0,
        1 => c,
        _ => {
            let (mut prev, mut cur) = (1.0, c);
            for k in 2..=n {
                let next = c * cur + (k - 1) as f64 / 2.0 * prev;
                prev = cur;
                cur = next;
            }
            cur
        }
    }
}

/// Exact expectation `⟨φ, a φ⟩` on a shifted-Gaussian product state.
///
/// Linear in `a`, conjugated under the adjoint, and real for Hermitian
/// expressions. Every mode appearing in `a` must have a declared center.
pub fn expectation(state: &GaussianState, a: &OperatorExpr) -> Result<Complex64, StateError> {
    let mut total = Complex64::new(0.0, 0.0);
    for term in a.terms() {
        let mut factor = 1.0;
        let mut modes: Vec<ModeIndex> = term.modes().collect();
        modes.sort_unstable();
        modes.dedup();
        for mode in modes {
            let k = state
                .center(mode)
                .ok_or(StateError::MissingCenter(mode))?;
            let n = term.xpart.power(mode);
            let m = term.shift.exponent(mode) as f64;
            factor *= (-m * m / 4.0).exp() * gaussian_moment(n, k - m / 2.0);
        }
        total += term.coeff * factor;
    }
    Ok(total)
}

/// Overlap `⟨φ_a, φ_b⟩ = ∏_j e^{-(k_j^a - k_j^b)²/4}` of two product states
/// over the same modes.
pub fn state_inner(a: &GaussianState, b: &GaussianState) -> Result<f64, StateError> {
    if !a.centers.keys().eq(b.centers.keys()) {
        return Err(StateError::ModeMismatch);
    }
    let mut overlap = 1.0;
    for ((_, ka), (_, kb)) in a.centers().zip(b.centers()) {
        let d = ka - kb;
        overlap *= (-d * d / 4.0).exp();
    }
    Ok(overlap)
}
