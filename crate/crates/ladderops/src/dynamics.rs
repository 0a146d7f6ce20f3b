//! Exact Heisenberg-picture dynamics for the solvable class: a free part
//! `Σ_j ω_j x_j` plus a Hermitian combination of pure shift words.
//!
//! For such Hamiltonians every translation evolves freely,
//! `T_j(t) = e^{-iω_j t} T_j`, because shift words commute among
//! themselves. The position equations `d x_j/dt = i[H, x_j](t)` then
//! integrate termwise: each interaction word contributes an oscillatory
//! profile `coeff·(e^{-iΩt} - 1)`, or a secular profile `coeff·t` when its
//! frequency vanishes (resonance). The secular branch is kept explicit
//! instead of taking the Ω → 0 limit of the oscillatory formula, which is
//! numerically ill-conditioned.

use std::collections::BTreeMap;

use num_complex::Complex64;
use thiserror::Error;

use crate::algebra::{commutator, x_op, ModeIndex, NormalTerm, OperatorExpr, ShiftWord, XMonomial};
use crate::states::{expectation, GaussianState, StateError};

/// Word frequencies below this (relative to the largest `ω_j`) are treated
/// as exact resonances.
const RESONANCE_EPS: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum DynamicsError {
    #[error("mode {0} has no frequency")]
    MissingFrequency(ModeIndex),
    #[error("frequency for mode {0} must be strictly positive")]
    NonPositiveFrequency(ModeIndex),
    #[error("interaction is not Hermitian")]
    NonHermitianInteraction,
    #[error("interaction contains a position factor; not in the solvable class")]
    InteractionContainsX,
    #[error("expression is not of the solvable form `Σ ω_j x_j + shift words`")]
    NotSolvable,
}

/// `i[H, A]`, the right-hand side of the Heisenberg equation
/// `dA/dt = i[H, A]`.
pub fn heisenberg_rhs(h: &OperatorExpr, a: &OperatorExpr) -> OperatorExpr {
    commutator(h, a).scale(Complex64::new(0.0, 1.0))
}

/// Free-evolution frequency of a shift word, `Ω_w = -Σ_j m_j ω_j`; the word
/// picks up the phase `e^{iΩ_w t}` under the free Hamiltonian. With this
/// sign `T_1^† T_3` has frequency `ω_1 - ω_3` and `T_1^† T_2 T_3` has
/// `ω_1 - ω_2 - ω_3`.
pub fn word_frequency(
    word: &ShiftWord,
    omegas: &BTreeMap<ModeIndex, f64>,
) -> Result<f64, DynamicsError> {
    let mut freq = 0.0;
    for (mode, m) in word.exponents() {
        let omega = omegas
            .get(&mode)
            .copied()
            .ok_or(DynamicsError::MissingFrequency(mode))?;
        freq -= m as f64 * omega;
    }
    Ok(freq)
}

/// Free frequencies plus a Hermitian list of pure shift-word interaction
/// terms; the exactly solvable class.
#[derive(Debug, Clone, PartialEq)]
pub struct SolvableModel {
    omegas: BTreeMap<ModeIndex, f64>,
    interaction: Vec<(Complex64, ShiftWord)>,
}

impl SolvableModel {
    pub fn new(
        omegas: BTreeMap<ModeIndex, f64>,
        interaction: Vec<(Complex64, ShiftWord)>,
    ) -> Result<Self, DynamicsError> {
        for (&mode, &omega) in &omegas {
            if omega.is_nan() || omega <= 0.0 {
                return Err(DynamicsError::NonPositiveFrequency(mode));
            }
        }
        for (_, word) in &interaction {
            for mode in word.modes() {
                if !omegas.contains_key(&mode) {
                    return Err(DynamicsError::MissingFrequency(mode));
                }
            }
        }
        let model = Self { omegas, interaction };
        if !model.interaction_expr().is_hermitian() {
            return Err(DynamicsError::NonHermitianInteraction);
        }
        Ok(model)
    }

    /// Split a raw expression into frequencies and interaction words.
    /// Rejects anything with a position factor attached to a shift word or
    /// with position degree above one.
    pub fn from_expr(h: &OperatorExpr) -> Result<Self, DynamicsError> {
        let mut omegas = BTreeMap::new();
        let mut interaction = Vec::new();
        for term in h.terms() {
            match (term.xpart.degree(), term.shift.is_identity()) {
                (0, true) => {} // constant shift of H; no effect on dynamics
                (0, false) => interaction.push((term.coeff, term.shift.clone())),
                (1, true) => {
                    if term.coeff.im.abs() > 1e-12 * (1.0 + term.coeff.norm()) {
                        return Err(DynamicsError::NotSolvable);
                    }
                    let mode = term.xpart.modes().next().expect("degree-one monomial");
                    omegas.insert(mode, term.coeff.re);
                }
                (_, false) => return Err(DynamicsError::InteractionContainsX),
                (_, true) => return Err(DynamicsError::NotSolvable),
            }
        }
        Self::new(omegas, interaction)
    }

    pub fn omegas(&self) -> &BTreeMap<ModeIndex, f64> {
        &self.omegas
    }

    pub fn interaction(&self) -> &[(Complex64, ShiftWord)] {
        &self.interaction
    }

    fn interaction_expr(&self) -> OperatorExpr {
        OperatorExpr::from_terms(self.interaction.iter().map(|(c, w)| {
            NormalTerm::new(*c, XMonomial::one(), w.clone())
        }))
    }

    /// The assembled Hamiltonian `Σ ω_j x_j + Σ α_k W_k`.
    pub fn hamiltonian(&self) -> OperatorExpr {
        let mut h = self.interaction_expr();
        for (&mode, &omega) in &self.omegas {
            h = &h + &x_op(mode).scale(Complex64::new(omega, 0.0));
        }
        h
    }
}

/// Time profile of one trajectory term.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Profile {
    /// Contributes `coeff · (e^{-i omega t} - 1)`.
    Oscillatory { omega: f64 },
    /// Contributes `coeff · t` (resonant word).
    Secular,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrajectoryTerm {
    pub coeff: Complex64,
    pub word: ShiftWord,
    pub profile: Profile,
}

impl TrajectoryTerm {
    fn scalar_at(&self, t: f64) -> Complex64 {
        match self.profile {
            Profile::Oscillatory { omega } => {
                self.coeff * (Complex64::new(0.0, -omega * t).exp() - 1.0)
            }
            Profile::Secular => self.coeff * t,
        }
    }

    fn scalar_derivative_at(&self, t: f64) -> Complex64 {
        match self.profile {
            Profile::Oscillatory { omega } => {
                self.coeff * Complex64::new(0.0, -omega) * Complex64::new(0.0, -omega * t).exp()
            }
            Profile::Secular => self.coeff,
        }
    }
}

/// Closed-form Heisenberg trajectory of one position operator:
/// `x_j(t) = x_j + Σ_k scalar_k(t) · W_k`.
#[derive(Debug, Clone, PartialEq)]
pub struct ClosedFormTrajectory {
    mode: ModeIndex,
    terms: Vec<TrajectoryTerm>,
}

impl ClosedFormTrajectory {
    pub fn mode(&self) -> ModeIndex {
        self.mode
    }

    pub fn terms(&self) -> &[TrajectoryTerm] {
        &self.terms
    }

    /// The operator `x_j(t)` as an expression; equals `x_j` at `t = 0` and
    /// is Hermitian for every `t`.
    pub fn operator_at(&self, t: f64) -> OperatorExpr {
        let mut expr = x_op(self.mode);
        for term in &self.terms {
            expr = &expr
                + &OperatorExpr::from_terms([NormalTerm::new(
                    term.scalar_at(t),
                    XMonomial::one(),
                    term.word.clone(),
                )]);
        }
        expr
    }

    /// `d x_j(t)/dt` as an expression; used by the residual checks against
    /// [`heisenberg_rhs`].
    pub fn derivative_at(&self, t: f64) -> OperatorExpr {
        OperatorExpr::from_terms(self.terms.iter().map(|term| {
            NormalTerm::new(term.scalar_derivative_at(t), XMonomial::one(), term.word.clone())
        }))
    }
}

/// Integrate the Heisenberg equations of a solvable model in closed form,
/// one trajectory per mode.
pub fn evolve_positions(
    model: &SolvableModel,
) -> BTreeMap<ModeIndex, ClosedFormTrajectory> {
    let omega_scale = model.omegas.values().fold(0.0f64, |a, &b| a.max(b));
    let mut out = BTreeMap::new();
    for &mode in model.omegas.keys() {
        let mut terms = Vec::new();
        for (alpha, word) in &model.interaction {
            let m_j = word.exponent(mode);
            if m_j == 0 {
                continue;
            }
            // Phase of the word under free evolution: e^{-i nu t}.
            let nu: f64 = word
                .exponents()
                .map(|(l, m)| m as f64 * model.omegas[&l])
                .sum();
            let term = if nu.abs() <= RESONANCE_EPS * (1.0 + omega_scale) {
                TrajectoryTerm {
                    coeff: Complex64::new(0.0, 1.0) * alpha * m_j as f64,
                    word: word.clone(),
                    profile: Profile::Secular,
                }
            } else {
                TrajectoryTerm {
                    coeff: -alpha * m_j as f64 / nu,
                    word: word.clone(),
                    profile: Profile::Oscillatory { omega: nu },
                }
            };
            terms.push(term);
        }
        out.insert(mode, ClosedFormTrajectory { mode, terms });
    }
    out
}

/// Mean values `⟨x_j(t)⟩` of a closed-form trajectory on a product state.
/// Word expectations are evaluated once; per-time work is scalar.
pub fn mean_trajectory(
    traj: &ClosedFormTrajectory,
    state: &GaussianState,
    times: &[f64],
) -> Result<Vec<f64>, StateError> {
    let k = expectation(state, &x_op(traj.mode))?.re;
    let word_means: Vec<Complex64> = traj
        .terms
        .iter()
        .map(|term| {
            expectation(
                state,
                &OperatorExpr::from_terms([NormalTerm::new(
                    Complex64::new(1.0, 0.0),
                    XMonomial::one(),
                    term.word.clone(),
                )]),
            )
        })
        .collect::<Result<_, _>>()?;
    Ok(times
        .iter()
        .map(|&t| {
            let mut v = Complex64::new(k, 0.0);
            for (term, mean) in traj.terms.iter().zip(&word_means) {
                v += term.scalar_at(t) * mean;
            }
            debug_assert!(v.im.abs() < 1e-10 * (1.0 + v.re.abs()));
            v.re
        })
        .collect())
}

/// Basis of linear conserved quantities `Σ_j α_j x_j` of a solvable model:
/// the exact rational null space of the interaction words' exponent matrix,
/// scaled to coprime integers with positive leading entry.
pub fn conserved_linear(model: &SolvableModel) -> (Vec<ModeIndex>, Vec<Vec<f64>>) {
    let modes: Vec<ModeIndex> = model.omegas.keys().copied().collect();
    let rows: Vec<Vec<i64>> = model
        .interaction
        .iter()
        .map(|(_, word)| modes.iter().map(|&j| word.exponent(j) as i64).collect())
        .collect();
    let basis = rational::null_space(&rows, modes.len());
    (modes, basis)
}

/// Exact rational linear algebra for the tiny exponent matrices of
/// [`conserved_linear`].
mod rational {
    #[derive(Debug, Clone, Copy, PartialEq, Eq)]
    struct Rat {
        num: i128,
        den: i128, // always > 0
    }

    fn gcd(a: i128, b: i128) -> i128 {
        let (mut a, mut b) = (a.abs(), b.abs());
        while b != 0 {
            let r = a % b;
            a = b;
            b = r;
        }
        a
    }

    impl Rat {
        fn new(num: i128, den: i128) -> Self {
            debug_assert!(den != 0);
            let sign = if den < 0 { -1 } else { 1 };
            let g = gcd(num, den).max(1);
            Self { num: sign * num / g, den: sign * den / g }
        }
        fn from_int(v: i128) -> Self {
            Self { num: v, den: 1 }
        }
        fn is_zero(self) -> bool {
            self.num == 0
        }
        fn sub(self, o: Self) -> Self {
            Self::new(self.num * o.den - o.num * self.den, self.den * o.den)
        }
        fn mul(self, o: Self) -> Self {
            Self::new(self.num * o.num, self.den * o.den)
        }
        fn div(self, o: Self) -> Self {
            Self::new(self.num * o.den, self.den * o.num)
        }
    }

    /// Null-space basis of an integer matrix, one coprime integer vector
    /// per free column, ordered by free-column index.
    pub fn null_space(rows: &[Vec<i64>], ncols: usize) -> Vec<Vec<f64>> {
        if ncols == 0 {
            return Vec::new();
        }
        let mut m: Vec<Vec<Rat>> = rows
            .iter()
            .map(|r| r.iter().map(|&v| Rat::from_int(v as i128)).collect())
            .collect();

        // Gauss-Jordan to reduced row echelon form.
        let mut pivots: Vec<(usize, usize)> = Vec::new(); // (row, col)
        let mut rank = 0;
        for col in 0..ncols {
            let Some(prow) = (rank..m.len()).find(|&r| !m[r][col].is_zero()) else {
                continue;
            };
            m.swap(rank, prow);
            let p = m[rank][col];
            for v in m[rank].iter_mut() {
                *v = v.div(p);
            }
            let pivot_row = m[rank].clone();
            for (r, row) in m.iter_mut().enumerate() {
                if r != rank && !row[col].is_zero() {
                    let f = row[col];
                    for (dst, &pv) in row.iter_mut().zip(&pivot_row) {
                        *dst = dst.sub(pv.mul(f));
                    }
                }
            }
            pivots.push((rank, col));
            rank += 1;
        }

        let pivot_cols: Vec<usize> = pivots.iter().map(|&(_, c)| c).collect();
        let mut basis = Vec::new();
        for free in (0..ncols).filter(|c| !pivot_cols.contains(c)) {
            let mut v = vec![Rat::from_int(0); ncols];
            v[free] = Rat::from_int(1);
            for &(row, col) in &pivots {
                v[col] = Rat::from_int(0).sub(m[row][free]);
            }
            // scale to coprime integers, first nonzero positive
            let lcm = v.iter().fold(1i128, |acc, r| {
                if r.is_zero() { acc } else { acc / gcd(acc, r.den) * r.den }
            });
            let mut ints: Vec<i128> = v.iter().map(|r| r.num * (lcm / r.den)).collect();
            let g = ints.iter().fold(0i128, |acc, &v| gcd(acc, v)).max(1);
            for i in ints.iter_mut() {
                *i /= g;
            }
            if let Some(first) = ints.iter().find(|&&v| v != 0) {
                if *first < 0 {
                    for i in ints.iter_mut() {
                        *i = -*i;
                    }
                }
            }
            basis.push(ints.into_iter().map(|v| v as f64).collect());
        }
        basis
    }
}
