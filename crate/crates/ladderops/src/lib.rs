//! Operator-algebra dynamics for macroscopic "ladder" models.
//!
//! The crate is organized around one currency type, [`OperatorExpr`]: a
//! normal-form sum of complex coefficients times `x`-monomials times
//! translation words, generated by position operators `x_j` and unit
//! translations `T_j` with `[T_j, x_j] = T_j`.
//!
//! - [`algebra`] — the normal-form engine (products, adjoints,
//!   commutators) and a plain-text round-trip syntax.
//! - [`states`] — shifted-Gaussian product states and the closed-form
//!   expectation functional.
//! - [`dynamics`] — exact Heisenberg trajectories for Hamiltonians
//!   `Σ ω_j x_j + (Hermitian shift words)`, plus linear conserved
//!   quantities.
//! - [`models`] — concrete predator–prey presets (quadratic, cubic
//!   three-agent, gated cubic with perturbative and Riccati treatments)
//!   and a small fermionic two-mode baseline.
//! - [`oracle`] — an independent Schrödinger-picture grid propagator used
//!   as ground truth for everything above.
//!
//! Expressions and states are immutable values; everything here is safe to
//! share across threads.

pub mod algebra;
pub mod dynamics;
pub mod models;
pub mod oracle;
pub mod states;

pub use algebra::{
    anticommutator, commutator, shift_op, x_op, ModeIndex, NormalTerm, OperatorExpr, ShiftWord,
    XMonomial,
};
pub use dynamics::{
    conserved_linear, evolve_positions, heisenberg_rhs, mean_trajectory, word_frequency,
    ClosedFormTrajectory, DynamicsError, Profile, SolvableModel,
};
pub use models::{CubicPP3, FermiPP, GatedPP, ModelError, QuadraticPP, RiccatiData};
pub use num_complex::Complex64;
pub use oracle::{
    apply_hamiltonian, boundary_mass, discretize_state, grid_inner, mean_x, propagate,
    propagate_observed, read_trajectory, write_trajectory, GridConfig, GridState, Integrator,
    OracleError, Propagation,
};
pub use states::{expectation, gaussian_moment, state_inner, GaussianState, StateError};
