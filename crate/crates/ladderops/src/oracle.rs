//! Independent Schrödinger-picture ground truth on a truncated grid.
//!
//! Position operators multiply by the coordinate, unit translations are
//! exact `s`-cell index displacements (no interpolation), and amplitudes
//! shifted past the edge are dropped. Absorbing truncation is used instead
//! of periodic wrap-around because wrapping would alias translations and
//! corrupt `⟨x⟩`; the lost mass is monitored and a run aborts when the
//! boundary mass or the norm drift exceeds its threshold.
//!
//! The default production resolution used throughout the tests and the CLI
//! is extent ±12 per mode, 8 cells per unit, `dt = 1e-3`, RK4; three-mode
//! runs reduce the extent to ±8 to bound memory.

use std::collections::BTreeMap;
use std::io::{Read, Write};
use std::path::Path;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rayon::prelude::*;
use thiserror::Error;

use crate::algebra::{ModeIndex, OperatorExpr};
use crate::states::GaussianState;

#[derive(Debug, Error)]
pub enum OracleError {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),
    #[error("center of mode {0} is closer than 4 units to a grid boundary")]
    CenterTooCloseToBoundary(ModeIndex),
    #[error("state and grid are defined on different mode sets")]
    ModeMismatch,
    #[error("expression references mode {0} which is not on the grid")]
    ModeNotOnGrid(ModeIndex),
    #[error("Hamiltonian is not Hermitian")]
    NonHermitianHamiltonian,
    #[error("truncation breach at t = {t}: boundary mass {mass:.3e} exceeds {threshold:.3e}")]
    TruncationBreach { t: f64, mass: f64, threshold: f64 },
    #[error("norm drift {drift:.3e} at t = {t} exceeds {limit:.3e}")]
    NormDrift { t: f64, drift: f64, limit: f64 },
    #[error("integration unstable at t = {t} (norm {norm:.3e})")]
    Unstable { t: f64, norm: f64 },
    #[error("sample times must be nondecreasing and start at t >= 0")]
    BadTimes,
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error("bad trajectory dump: {0}")]
    BadDump(String),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Integrator {
    RungeKutta4,
    KrylovExp { subspace_dim: usize },
}

/// Discretization and stepping parameters for one run.
#[derive(Debug, Clone, PartialEq)]
pub struct GridConfig {
    extents: BTreeMap<ModeIndex, (f64, f64)>,
    cells_per_unit: u32,
    pub dt: f64,
    pub integrator: Integrator,
    /// Relative mass allowed within one unit of any boundary before a run
    /// aborts; norm drift is allowed up to ten times this.
    pub boundary_mass_threshold: f64,
}

impl GridConfig {
    pub fn new(
        extents: BTreeMap<ModeIndex, (f64, f64)>,
        cells_per_unit: u32,
        dt: f64,
        integrator: Integrator,
        boundary_mass_threshold: f64,
    ) -> Result<Self, OracleError> {
        if extents.is_empty() {
            return Err(OracleError::InvalidGrid("no modes".into()));
        }
        if cells_per_unit < 4 {
            return Err(OracleError::InvalidGrid(
                "cells_per_unit must be at least 4".into(),
            ));
        }
        if dt.is_nan() || dt <= 0.0 || dt.is_infinite() {
            return Err(OracleError::InvalidGrid("dt must be positive".into()));
        }
        if boundary_mass_threshold.is_nan()
            || boundary_mass_threshold <= 0.0
            || boundary_mass_threshold >= 1.0
        {
            return Err(OracleError::InvalidGrid(
                "boundary_mass_threshold must lie in (0, 1)".into(),
            ));
        }
        if let Integrator::KrylovExp { subspace_dim } = integrator {
            if subspace_dim < 2 {
                return Err(OracleError::InvalidGrid(
                    "Krylov subspace dimension must be at least 2".into(),
                ));
            }
        }
        for (&mode, &(lo, hi)) in &extents {
            let span = hi - lo;
            if span.is_nan() || span <= 0.0 {
                return Err(OracleError::InvalidGrid(format!(
                    "mode {mode} has empty extent"
                )));
            }
            let cells = span * cells_per_unit as f64;
            if (cells - cells.round()).abs() > 1e-9 {
                return Err(OracleError::InvalidGrid(format!(
                    "extent of mode {mode} is not a whole number of cells"
                )));
            }
        }
        Ok(Self {
            extents,
            cells_per_unit,
            dt,
            integrator,
            boundary_mass_threshold,
        })
    }

    /// Symmetric extent `[-half, half]` on every mode with the default
    /// stepping (`dt = 1e-3`, RK4, boundary threshold `1e-4`).
    pub fn symmetric(
        modes: impl IntoIterator<Item = ModeIndex>,
        half_extent: f64,
        cells_per_unit: u32,
    ) -> Result<Self, OracleError> {
        Self::new(
            modes
                .into_iter()
                .map(|m| (m, (-half_extent, half_extent)))
                .collect(),
            cells_per_unit,
            1e-3,
            Integrator::RungeKutta4,
            1e-4,
        )
    }

    pub fn cells_per_unit(&self) -> u32 {
        self.cells_per_unit
    }

    pub fn extents(&self) -> &BTreeMap<ModeIndex, (f64, f64)> {
        &self.extents
    }

    fn geometry(&self) -> GridGeometry {
        let modes: Vec<ModeIndex> = self.extents.keys().copied().collect();
        let x_min: Vec<f64> = modes.iter().map(|m| self.extents[m].0).collect();
        let n: Vec<usize> = modes
            .iter()
            .map(|m| {
                let (lo, hi) = self.extents[m];
                ((hi - lo) * self.cells_per_unit as f64).round() as usize
            })
            .collect();
        let mut strides = vec![1usize; n.len()];
        for a in (0..n.len().saturating_sub(1)).rev() {
            strides[a] = strides[a + 1] * n[a + 1];
        }
        GridGeometry {
            modes,
            x_min,
            n,
            strides,
            s: self.cells_per_unit,
        }
    }
}

/// Tensor-product lattice: points `x = x_min + i/s` along each mode,
/// row-major flattening.
#[derive(Debug, Clone, PartialEq)]
pub struct GridGeometry {
    modes: Vec<ModeIndex>,
    x_min: Vec<f64>,
    n: Vec<usize>,
    strides: Vec<usize>,
    s: u32,
}

impl GridGeometry {
    pub fn modes(&self) -> &[ModeIndex] {
        &self.modes
    }

    pub fn cell_count(&self) -> usize {
        self.n.iter().product()
    }

    fn axis_of(&self, mode: ModeIndex) -> Option<usize> {
        self.modes.iter().position(|&m| m == mode)
    }

    fn coord(&self, axis: usize, i: usize) -> f64 {
        self.x_min[axis] + i as f64 / self.s as f64
    }

    /// Cell volume `(1/s)^d`.
    fn volume(&self) -> f64 {
        (1.0 / self.s as f64).powi(self.n.len() as i32)
    }
}

/// Complex amplitudes on the lattice of a [`GridGeometry`].
#[derive(Debug, Clone, PartialEq)]
pub struct GridState {
    geom: GridGeometry,
    amps: Vec<Complex64>,
}

impl GridState {
    pub fn geometry(&self) -> &GridGeometry {
        &self.geom
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn norm(&self) -> f64 {
        (self.amps.iter().map(|a| a.norm_sqr()).sum::<f64>() * self.geom.volume()).sqrt()
    }
}

/// Volume-weighted inner product `⟨a, b⟩`; states must share a geometry.
pub fn grid_inner(a: &GridState, b: &GridState) -> Complex64 {
    assert_eq!(a.geom, b.geom, "states live on different grids");
    a.amps
        .iter()
        .zip(&b.amps)
        .map(|(x, y)| x.conj() * y)
        .sum::<Complex64>()
        * a.geom.volume()
}

/// Sample a shifted-Gaussian product state on the grid and renormalize.
pub fn discretize_state(
    state: &GaussianState,
    cfg: &GridConfig,
) -> Result<GridState, OracleError> {
    let geom = cfg.geometry();
    let state_modes: Vec<ModeIndex> = state.modes().collect();
    if state_modes != geom.modes {
        return Err(OracleError::ModeMismatch);
    }
    for &mode in &geom.modes {
        let k = state.center(mode).expect("mode sets match");
        let (lo, hi) = cfg.extents[&mode];
        if k - lo < 4.0 || hi - k < 4.0 {
            return Err(OracleError::CenterTooCloseToBoundary(mode));
        }
    }

    // Per-axis 1D profiles; the product state fills the tensor grid.
    let profiles: Vec<Vec<f64>> = geom
        .modes
        .iter()
        .enumerate()
        .map(|(axis, &mode)| {
            let k = state.center(mode).expect("mode sets match");
            (0..geom.n[axis])
                .map(|i| {
                    let x = geom.coord(axis, i);
                    (-(x - k) * (x - k) / 2.0).exp()
                })
                .collect()
        })
        .collect();

    let total = geom.cell_count();
    let mut amps = Vec::with_capacity(total);
    let mut idx = vec![0usize; geom.n.len()];
    for _ in 0..total {
        let mut v = 1.0;
        for (axis, &i) in idx.iter().enumerate() {
            v *= profiles[axis][i];
        }
        amps.push(Complex64::new(v, 0.0));
        for axis in (0..idx.len()).rev() {
            idx[axis] += 1;
            if idx[axis] < geom.n[axis] {
                break;
            }
            idx[axis] = 0;
        }
    }
    let mut psi = GridState { geom, amps };
    let norm = psi.norm();
    for a in psi.amps.iter_mut() {
        *a /= norm;
    }
    Ok(psi)
}

/// `⟨x_j⟩` of a grid state, normalized by the state's current mass so the
/// readout stays meaningful under absorbing truncation.
pub fn mean_x(psi: &GridState, mode: ModeIndex) -> f64 {
    let geom = &psi.geom;
    let axis = geom
        .axis_of(mode)
        .unwrap_or_else(|| panic!("mode {mode} not on grid"));
    let block = geom.strides[axis];
    let n = geom.n[axis];
    let mut weighted = 0.0;
    let mut total = 0.0;
    for (flat, a) in psi.amps.iter().enumerate() {
        let i = flat / block % n;
        let w = a.norm_sqr();
        weighted += w * geom.coord(axis, i);
        total += w;
    }
    weighted / total
}

/// Fraction of the state's mass within one unit (`s` cells) of any
/// boundary.
pub fn boundary_mass(psi: &GridState) -> f64 {
    let geom = &psi.geom;
    let s = geom.s as usize;
    let mut edge = 0.0;
    let mut total = 0.0;
    for (flat, a) in psi.amps.iter().enumerate() {
        let w = a.norm_sqr();
        total += w;
        for axis in 0..geom.n.len() {
            let i = flat / geom.strides[axis] % geom.n[axis];
            if i < s || i >= geom.n[axis] - s {
                edge += w;
                break;
            }
        }
    }
    if total > 0.0 {
        edge / total
    } else {
        0.0
    }
}

/// One compiled normal term: scale, per-axis cell shifts, and per-axis
/// coordinate-power lookup tables.
struct TermPlan {
    scale: Complex64,
    shifts: Vec<isize>,
    xpows: Vec<Option<Vec<f64>>>,
}

fn compile(
    h: &OperatorExpr,
    geom: &GridGeometry,
    scale: Complex64,
) -> Result<Vec<TermPlan>, OracleError> {
    let d = geom.n.len();
    let mut plans = Vec::with_capacity(h.terms().len());
    for term in h.terms() {
        let mut shifts = vec![0isize; d];
        let mut xpows: Vec<Option<Vec<f64>>> = vec![None; d];
        for (mode, m) in term.shift.exponents() {
            let axis = geom.axis_of(mode).ok_or(OracleError::ModeNotOnGrid(mode))?;
            shifts[axis] = m as isize * geom.s as isize;
        }
        for (mode, p) in term.xpart.powers() {
            let axis = geom.axis_of(mode).ok_or(OracleError::ModeNotOnGrid(mode))?;
            xpows[axis] = Some(
                (0..geom.n[axis])
                    .map(|i| geom.coord(axis, i).powi(p as i32))
                    .collect(),
            );
        }
        plans.push(TermPlan {
            scale: term.coeff * scale,
            shifts,
            xpows,
        });
    }
    Ok(plans)
}

fn apply_plan_rec(
    plan: &TermPlan,
    geom: &GridGeometry,
    axis: usize,
    out: &mut [Complex64],
    inp: &[Complex64],
    factor: Complex64,
) {
    let n = geom.n[axis];
    let sh = plan.shifts[axis];
    let lo = (-sh).max(0) as usize;
    let hi = ((n as isize).min(n as isize - sh)).max(0) as usize;
    if axis + 1 == geom.n.len() {
        match &plan.xpows[axis] {
            Some(p) => {
                for i in lo..hi {
                    out[i] += factor * p[i] * inp[(i as isize + sh) as usize];
                }
            }
            None => {
                for i in lo..hi {
                    out[i] += factor * inp[(i as isize + sh) as usize];
                }
            }
        }
    } else {
        let b = geom.strides[axis];
        for i in lo..hi {
            let f = match &plan.xpows[axis] {
                Some(p) => factor * p[i],
                None => factor,
            };
            let j = (i as isize + sh) as usize;
            apply_plan_rec(
                plan,
                geom,
                axis + 1,
                &mut out[i * b..(i + 1) * b],
                &inp[j * b..(j + 1) * b],
                f,
            );
        }
    }
}

fn apply_plans_into(
    plans: &[TermPlan],
    geom: &GridGeometry,
    inp: &[Complex64],
    out: &mut [Complex64],
) {
    out.fill(Complex64::new(0.0, 0.0));
    let d = geom.n.len();
    if d == 1 || geom.cell_count() < (1 << 14) {
        for plan in plans {
            apply_plan_rec(plan, geom, 0, out, inp, plan.scale);
        }
        return;
    }
    // Parallelize over the outermost axis; every output chunk is written by
    // exactly one task, so the result is deterministic.
    let b = geom.strides[0];
    let n0 = geom.n[0] as isize;
    out.par_chunks_mut(b).enumerate().for_each(|(i0, chunk)| {
        for plan in plans {
            let j0 = i0 as isize + plan.shifts[0];
            if j0 < 0 || j0 >= n0 {
                continue;
            }
            let f = match &plan.xpows[0] {
                Some(p) => plan.scale * p[i0],
                None => plan.scale,
            };
            apply_plan_rec(
                plan,
                geom,
                1,
                chunk,
                &inp[j0 as usize * b..(j0 as usize + 1) * b],
                f,
            );
        }
    });
}

/// Matrix-free application of a normal-form expression to a grid state:
/// x-monomials multiply by coordinates, shift words displace indices, and
/// out-of-range amplitudes are dropped.
pub fn apply_hamiltonian(psi: &GridState, h: &OperatorExpr) -> Result<GridState, OracleError> {
    let plans = compile(h, &psi.geom, Complex64::new(1.0, 0.0))?;
    let mut out = vec![Complex64::new(0.0, 0.0); psi.amps.len()];
    apply_plans_into(&plans, &psi.geom, &psi.amps, &mut out);
    Ok(GridState {
        geom: psi.geom.clone(),
        amps: out,
    })
}

struct Rk4Buffers {
    k1: Vec<Complex64>,
    k2: Vec<Complex64>,
    k3: Vec<Complex64>,
    k4: Vec<Complex64>,
    tmp: Vec<Complex64>,
}

impl Rk4Buffers {
    fn new(len: usize) -> Self {
        let z = vec![Complex64::new(0.0, 0.0); len];
        Self {
            k1: z.clone(),
            k2: z.clone(),
            k3: z.clone(),
            k4: z.clone(),
            tmp: z,
        }
    }
}

fn saxpy(out: &mut [Complex64], base: &[Complex64], scale: f64, dir: &[Complex64]) {
    for ((o, b), d) in out.iter_mut().zip(base).zip(dir) {
        *o = b + scale * d;
    }
}

/// One RK4 step of `dψ/dt = -iHψ`; `plans` already carry the `-i`.
fn rk4_step(
    plans: &[TermPlan],
    geom: &GridGeometry,
    psi: &mut [Complex64],
    dt: f64,
    buf: &mut Rk4Buffers,
) {
    apply_plans_into(plans, geom, psi, &mut buf.k1);
    saxpy(&mut buf.tmp, psi, dt / 2.0, &buf.k1);
    apply_plans_into(plans, geom, &buf.tmp, &mut buf.k2);
    saxpy(&mut buf.tmp, psi, dt / 2.0, &buf.k2);
    apply_plans_into(plans, geom, &buf.tmp, &mut buf.k3);
    saxpy(&mut buf.tmp, psi, dt, &buf.k3);
    apply_plans_into(plans, geom, &buf.tmp, &mut buf.k4);
    let w = dt / 6.0;
    for ((((p, k1), k2), k3), k4) in psi
        .iter_mut()
        .zip(&buf.k1)
        .zip(&buf.k2)
        .zip(&buf.k3)
        .zip(&buf.k4)
    {
        *p += w * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    }
}

/// One Lanczos/Krylov step `ψ ← e^{-i dt H} ψ` with full
/// reorthogonalization; exact on the subspace, so steps can be much larger
/// than RK4's as long as `dim` covers the spectrum reached in `dt`.
fn krylov_step(
    plans: &[TermPlan], // plans of H itself (no -i folded in)
    geom: &GridGeometry,
    psi: &mut [Complex64],
    dt: f64,
    dim: usize,
) {
    let len = psi.len();
    let beta0 = psi.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
    if beta0 == 0.0 {
        return;
    }
    let mut basis: Vec<Vec<Complex64>> = Vec::with_capacity(dim + 1);
    basis.push(psi.iter().map(|a| a / beta0).collect());
    let mut alphas: Vec<f64> = Vec::with_capacity(dim);
    let mut betas: Vec<f64> = Vec::with_capacity(dim);
    let mut w = vec![Complex64::new(0.0, 0.0); len];
    for j in 0..dim {
        apply_plans_into(plans, geom, &basis[j], &mut w);
        for (i, v) in basis.iter().enumerate() {
            let c: Complex64 = v.iter().zip(&w).map(|(a, b)| a.conj() * b).sum();
            for (wi, vi) in w.iter_mut().zip(v) {
                *wi -= c * vi;
            }
            if i == j {
                alphas.push(c.re);
            }
        }
        let beta = w.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        if beta < 1e-12 {
            break; // invariant subspace reached
        }
        betas.push(beta);
        basis.push(w.iter().map(|a| a / beta).collect());
    }
    let m = alphas.len();
    let mut tri = DMatrix::<f64>::zeros(m, m);
    for j in 0..m {
        tri[(j, j)] = alphas[j];
        if j + 1 < m {
            tri[(j, j + 1)] = betas[j];
            tri[(j + 1, j)] = betas[j];
        }
    }
    let eig = tri.symmetric_eigen();
    // u = Q e^{-i dt Λ} Qᵀ e_1
    let mut u = vec![Complex64::new(0.0, 0.0); m];
    for col in 0..m {
        let phase = Complex64::new(0.0, -dt * eig.eigenvalues[col]).exp();
        let q0 = eig.eigenvectors[(0, col)];
        for (row, dst) in u.iter_mut().enumerate() {
            *dst += eig.eigenvectors[(row, col)] * phase * q0;
        }
    }
    psi.fill(Complex64::new(0.0, 0.0));
    for (j, v) in basis.iter().take(m).enumerate() {
        let c = u[j] * beta0;
        for (p, vi) in psi.iter_mut().zip(v) {
            *p += c * vi;
        }
    }
}

/// Result of one propagation: `⟨x_j⟩` per sample together with the health
/// diagnostics and resource numbers of the run.
#[derive(Debug, Clone, PartialEq)]
pub struct Propagation {
    pub times: Vec<f64>,
    pub means: BTreeMap<ModeIndex, Vec<f64>>,
    pub norms: Vec<f64>,
    pub boundary_masses: Vec<f64>,
    pub cell_count: usize,
    pub state_bytes: usize,
}

impl Propagation {
    pub fn max_norm_drift(&self) -> f64 {
        self.norms.iter().map(|&n| (n - 1.0).abs()).fold(0.0, f64::max)
    }

    pub fn max_boundary_mass(&self) -> f64 {
        self.boundary_masses.iter().copied().fold(0.0, f64::max)
    }
}

/// Propagate `ψ(t) = e^{-iHt} ψ0` and hand every sampled state to the
/// observer. Aborts with a diagnostic when the boundary mass exceeds the
/// configured threshold, the norm drifts by more than ten times it, or the
/// step blows up.
pub fn propagate_observed(
    psi0: &GridState,
    h: &OperatorExpr,
    times: &[f64],
    cfg: &GridConfig,
    mut observe: impl FnMut(f64, &GridState),
) -> Result<(), OracleError> {
    if times.is_empty() || times[0] < 0.0 || times.windows(2).any(|w| w[1] < w[0]) {
        return Err(OracleError::BadTimes);
    }
    if !h.is_hermitian() {
        return Err(OracleError::NonHermitianHamiltonian);
    }
    let geom = &psi0.geom;
    let (plans, krylov_dim) = match cfg.integrator {
        Integrator::RungeKutta4 => (compile(h, geom, Complex64::new(0.0, -1.0))?, None),
        Integrator::KrylovExp { subspace_dim } => {
            (compile(h, geom, Complex64::new(1.0, 0.0))?, Some(subspace_dim))
        }
    };
    let mut psi = psi0.clone();
    let mut buf = match krylov_dim {
        None => Some(Rk4Buffers::new(psi.amps.len())),
        Some(_) => None,
    };

    let eps = cfg.boundary_mass_threshold;
    let mut t = 0.0f64;
    for &target in times {
        // integer full steps plus one remainder step lands exactly on target
        while target - t > 1e-12 {
            let step = cfg.dt.min(target - t);
            match krylov_dim {
                None => rk4_step(&plans, geom, &mut psi.amps, step, buf.as_mut().unwrap()),
                Some(dim) => krylov_step(&plans, geom, &mut psi.amps, step, dim),
            }
            t += step;
        }
        let norm = psi.norm();
        if !norm.is_finite() || norm > 2.0 {
            return Err(OracleError::Unstable { t: target, norm });
        }
        let drift = (norm - 1.0).abs();
        if drift > 10.0 * eps {
            return Err(OracleError::NormDrift {
                t: target,
                drift,
                limit: 10.0 * eps,
            });
        }
        let bmass = boundary_mass(&psi);
        if bmass > eps {
            return Err(OracleError::TruncationBreach {
                t: target,
                mass: bmass,
                threshold: eps,
            });
        }
        observe(target, &psi);
    }
    Ok(())
}

/// Propagate and record `⟨x_j⟩` for every grid mode at every sample time.
pub fn propagate(
    psi0: &GridState,
    h: &OperatorExpr,
    times: &[f64],
    cfg: &GridConfig,
) -> Result<Propagation, OracleError> {
    let modes = psi0.geom.modes.clone();
    let mut out = Propagation {
        times: Vec::with_capacity(times.len()),
        means: modes.iter().map(|&m| (m, Vec::new())).collect(),
        norms: Vec::new(),
        boundary_masses: Vec::new(),
        cell_count: psi0.geom.cell_count(),
        state_bytes: psi0.amps.len() * std::mem::size_of::<Complex64>(),
    };
    propagate_observed(psi0, h, times, cfg, |t, psi| {
        out.times.push(t);
        for &mode in &modes {
            out.means.get_mut(&mode).unwrap().push(mean_x(psi, mode));
        }
        out.norms.push(psi.norm());
        out.boundary_masses.push(boundary_mass(psi));
    })?;
    Ok(out)
}

const DUMP_MAGIC: &[u8; 4] = b"LTRJ";
const DUMP_VERSION: u32 = 1;

/// Mean-trajectory series as stored in the binary dump format.
#[derive(Debug, Clone, PartialEq)]
pub struct TrajectoryDump {
    pub modes: Vec<ModeIndex>,
    pub times: Vec<f64>,
    pub means: BTreeMap<ModeIndex, Vec<f64>>,
}

/// Write a propagation's mean series in the little-endian binary layout:
/// magic `LTRJ`, `u32` version, `u32` mode count, `u32` sample count, the
/// mode ids as `u32`s, then one record per sample of `f64` time followed by
/// one `f64` mean per mode.
pub fn write_trajectory(path: &Path, prop: &Propagation) -> Result<(), OracleError> {
    let mut f = std::io::BufWriter::new(std::fs::File::create(path)?);
    f.write_all(DUMP_MAGIC)?;
    f.write_all(&DUMP_VERSION.to_le_bytes())?;
    f.write_all(&(prop.means.len() as u32).to_le_bytes())?;
    f.write_all(&(prop.times.len() as u32).to_le_bytes())?;
    for &mode in prop.means.keys() {
        f.write_all(&mode.0.to_le_bytes())?;
    }
    for (i, &t) in prop.times.iter().enumerate() {
        f.write_all(&t.to_le_bytes())?;
        for series in prop.means.values() {
            f.write_all(&series[i].to_le_bytes())?;
        }
    }
    f.flush()?;
    Ok(())
}

pub fn read_trajectory(path: &Path) -> Result<TrajectoryDump, OracleError> {
    let mut f = std::io::BufReader::new(std::fs::File::open(path)?);
    let mut magic = [0u8; 4];
    f.read_exact(&mut magic)?;
    if &magic != DUMP_MAGIC {
        return Err(OracleError::BadDump("wrong magic".into()));
    }
    fn read_u32(f: &mut impl Read) -> Result<u32, OracleError> {
        let mut buf = [0u8; 4];
        f.read_exact(&mut buf)?;
        Ok(u32::from_le_bytes(buf))
    }
    fn read_f64(f: &mut impl Read) -> Result<f64, OracleError> {
        let mut buf = [0u8; 8];
        f.read_exact(&mut buf)?;
        Ok(f64::from_le_bytes(buf))
    }
    let version = read_u32(&mut f)?;
    if version != DUMP_VERSION {
        return Err(OracleError::BadDump(format!("unknown version {version}")));
    }
    let n_modes = read_u32(&mut f)? as usize;
    let n_samples = read_u32(&mut f)? as usize;
    let mut modes = Vec::with_capacity(n_modes);
    for _ in 0..n_modes {
        modes.push(ModeIndex(read_u32(&mut f)?));
    }
    let mut times = Vec::with_capacity(n_samples);
    let mut means: BTreeMap<ModeIndex, Vec<f64>> = modes
        .iter()
        .map(|&m| (m, Vec::with_capacity(n_samples)))
        .collect();
    for _ in 0..n_samples {
        times.push(read_f64(&mut f)?);
        for &mode in &modes {
            means.get_mut(&mode).unwrap().push(read_f64(&mut f)?);
        }
    }
    Ok(TrajectoryDump { modes, times, means })
}
