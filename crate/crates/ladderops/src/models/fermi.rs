//! Two-mode fermionic baseline: the same exchange Hamiltonian written with
//! anticommuting ladder operators, solved in closed form and checked
//! against an explicit 4×4 matrix representation.

use nalgebra::{Matrix2, Matrix4, Vector4};
use num_complex::Complex64;

use super::ModelError;

/// `H = ω_1 n̂_1 + ω_3 n̂_3 + λ(b_1^† b_3 + b_3^† b_1)` on number states
/// with occupations `n_1, n_3 ∈ {0, 1}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FermiPP {
    pub omega1: f64,
    pub omega3: f64,
    pub lambda: f64,
    pub n1: u8,
    pub n3: u8,
}

impl FermiPP {
    pub fn new(omega1: f64, omega3: f64, lambda: f64, n1: u8, n3: u8) -> Result<Self, ModelError> {
        if !(omega1.is_finite() && omega1 > 0.0 && omega3.is_finite() && omega3 > 0.0) {
            return Err(ModelError::NonPositiveFrequency);
        }
        if !lambda.is_finite() {
            return Err(ModelError::NonFiniteParameter);
        }
        if n1 > 1 || n3 > 1 {
            return Err(ModelError::InvalidOccupation);
        }
        let m = Self { omega1, omega3, lambda, n1, n3 };
        if m.delta() == 0.0 {
            return Err(ModelError::DegenerateDelta);
        }
        Ok(m)
    }

    /// `δ = √((ω_1 - ω_3)² + 4λ²)`, the Rabi rate of the exchange.
    pub fn delta(&self) -> f64 {
        let d = self.omega1 - self.omega3;
        (d * d + 4.0 * self.lambda * self.lambda).sqrt()
    }

    /// Intermediates of the closed-form derivation; they combine into the
    /// densities below but are occasionally useful on their own.
    pub fn phi_plus(&self, t: f64) -> Complex64 {
        let envelope = Complex64::new(0.0, -t * (self.omega1 + self.omega3) / 2.0).exp();
        2.0 * envelope * (self.delta() * t / 2.0).cos()
    }

    pub fn phi_minus(&self, t: f64) -> Complex64 {
        let envelope = Complex64::new(0.0, -t * (self.omega1 + self.omega3) / 2.0).exp();
        Complex64::new(0.0, -2.0) * envelope * (self.delta() * t / 2.0).sin()
    }

    /// Closed-form densities: a static fraction `(ω_1-ω_3)²/δ²` plus a
    /// `4λ²/δ²` fraction Rabi-oscillating between the two occupations.
    /// Their sum is `n_1 + n_3` for every `t`.
    pub fn density(&self, t: f64) -> (f64, f64) {
        let (n1, n3) = (self.n1 as f64, self.n3 as f64);
        let gap2 = (self.omega1 - self.omega3).powi(2);
        let d2 = self.delta() * self.delta();
        let static_frac = gap2 / d2;
        let mixing = 4.0 * self.lambda * self.lambda / d2;
        let c2 = (self.delta() * t / 2.0).cos().powi(2);
        let s2 = (self.delta() * t / 2.0).sin().powi(2);
        (
            n1 * static_frac + mixing * (n1 * c2 + n3 * s2),
            n3 * static_frac + mixing * (n3 * c2 + n1 * s2),
        )
    }

    /// Jordan–Wigner representation `b_1 = σ⁻ ⊗ 1`, `b_3 = σ_z ⊗ σ⁻` on the
    /// basis `|n_1 n_3⟩` with flat index `2 n_1 + n_3`. Any representation
    /// faithful to the anticommutation relations gives the same densities.
    pub fn matrices() -> (Matrix4<f64>, Matrix4<f64>) {
        let lower = Matrix2::new(0.0, 1.0, 0.0, 0.0);
        let sz = Matrix2::new(1.0, 0.0, 0.0, -1.0);
        let id = Matrix2::identity();
        (lower.kronecker(&id), sz.kronecker(&lower))
    }

    /// The 4×4 (real symmetric) Hamiltonian matrix.
    pub fn hamiltonian_matrix(&self) -> Matrix4<f64> {
        let (b1, b3) = Self::matrices();
        let n1 = b1.transpose() * b1;
        let n3 = b3.transpose() * b3;
        self.omega1 * n1 + self.omega3 * n3
            + self.lambda * (b1.transpose() * b3 + b3.transpose() * b1)
    }

    /// Number state `Φ_{n_1 n_3} = (b_1^†)^{n_1} (b_3^†)^{n_3} Φ_0`.
    pub fn number_state(&self) -> Vector4<f64> {
        let (b1, b3) = Self::matrices();
        let mut phi = Vector4::new(1.0, 0.0, 0.0, 0.0);
        if self.n3 == 1 {
            phi = b3.transpose() * phi;
        }
        if self.n1 == 1 {
            phi = b1.transpose() * phi;
        }
        phi
    }

    /// Densities via the matrix exponential `e^{-iHt}` applied to the
    /// number state; independent of the closed form above.
    pub fn density_via_matrices(&self, t: f64) -> (f64, f64) {
        let h = self.hamiltonian_matrix();
        let eig = h.symmetric_eigen();
        let y = eig.eigenvectors.transpose() * self.number_state();
        let mut psi = [Complex64::new(0.0, 0.0); 4];
        for j in 0..4 {
            let phase = Complex64::new(0.0, -eig.eigenvalues[j] * t).exp();
            for (i, amp) in psi.iter_mut().enumerate() {
                *amp += eig.eigenvectors[(i, j)] * y[j] * phase;
            }
        }
        // n̂_1 and n̂_3 are diagonal in this basis: occupation of index
        // 2 n_1 + n_3.
        let mut d1 = 0.0;
        let mut d3 = 0.0;
        for (i, amp) in psi.iter().enumerate() {
            let w = amp.norm_sqr();
            if i & 2 != 0 {
                d1 += w;
            }
            if i & 1 != 0 {
                d3 += w;
            }
        }
        (d1, d3)
    }
}
