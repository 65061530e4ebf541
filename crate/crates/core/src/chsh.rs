//! Born-rule correlators, the CHSH functional and its maximization.
//!
//! The functional is `S = E11 + E12 + E21 - E22` with `Ejk = ⟨A_j B_k⟩`.
//! `S` is reported signed; bound checks use `|S|`.
//!
//! Substituting the singlet correlator `-â·b̂` gives
//! `S = -[â₁·(b̂₁ + b̂₂) + â₂·(b̂₁ - b̂₂)]`, with `â₂` (not `â₁`) in the
//! second term.

use std::cell::Cell;
use std::f64::consts::{FRAC_1_SQRT_2, PI, SQRT_2, TAU};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::observables::{spin_observable, PolarAngles, SpinObservable, UnitVector3};
use crate::simplex::NelderMead;
use crate::states::{werner, DensityMatrix};

/// Local-realistic bound on `|S|`.
pub const CLASSICAL_BOUND: f64 = 2.0;
/// Quantum bound on `|S|`, `2√2`.
pub const TSIRELSON_BOUND: f64 = 2.0 * SQRT_2;
/// Slack on [`TSIRELSON_BOUND`] when checking quantum results.
pub const TSIRELSON_TOL: f64 = 1e-8;
/// `|S|` must exceed `2 + VIOLATION_TOL` to count as a violation.
pub const VIOLATION_TOL: f64 = 1e-12;
/// Largest imaginary part tolerated in a Born-rule trace.
pub const IMAGINARY_TOL: f64 = 1e-10;
/// Absolute tolerance of the Werner threshold bisection.
pub const THRESHOLD_TOL: f64 = 1e-6;

/// The four measurement directions of one CHSH run.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct MeasurementSettings {
    pub a1: UnitVector3,
    pub a2: UnitVector3,
    pub b1: UnitVector3,
    pub b2: UnitVector3,
}

impl MeasurementSettings {
    pub fn new(a1: UnitVector3, a2: UnitVector3, b1: UnitVector3, b2: UnitVector3) -> Self {
        Self { a1, a2, b1, b2 }
    }

    /// `â₁ = ẑ, â₂ = x̂, b̂₁ = -(ẑ + x̂)/√2, b̂₂ = (x̂ - ẑ)/√2`, which gives
    /// `S = 2√2` on the singlet.
    pub fn optimal() -> Self {
        let h = FRAC_1_SQRT_2;
        Self {
            a1: UnitVector3::Z,
            a2: UnitVector3::X,
            b1: UnitVector3::new(-h, 0.0, -h).expect("unit"),
            b2: UnitVector3::new(h, 0.0, -h).expect("unit"),
        }
    }

    /// All four directions along `ẑ`.
    pub fn aligned() -> Self {
        let z = UnitVector3::Z;
        Self::new(z, z, z, z)
    }

    pub fn from_polar(angles: [PolarAngles; 4]) -> Self {
        let [a1, a2, b1, b2] = angles.map(crate::observables::from_polar);
        Self { a1, a2, b1, b2 }
    }

    /// Directions in the order `a1, a2, b1, b2`.
    pub fn to_polar(&self) -> [PolarAngles; 4] {
        [self.a1, self.a2, self.b1, self.b2].map(|n| PolarAngles::from_direction(&n))
    }

    fn from_params(x: &[f64]) -> Self {
        let d = |k: usize| UnitVector3::from_angles(x[2 * k], x[2 * k + 1]);
        Self::new(d(0), d(1), d(2), d(3))
    }

    fn to_params(self) -> Vec<f64> {
        self.to_polar()
            .iter()
            .flat_map(|a| [a.theta(), a.phi()])
            .collect()
    }
}

/// The four correlators `⟨A_j B_k⟩`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct CorrelatorTable {
    pub e11: f64,
    pub e12: f64,
    pub e21: f64,
    pub e22: f64,
}

impl CorrelatorTable {
    pub fn new(e11: f64, e12: f64, e21: f64, e22: f64) -> Self {
        Self { e11, e12, e21, e22 }
    }

    /// Entry for settings `j, k ∈ {1, 2}`.
    pub fn get(&self, j: u8, k: u8) -> f64 {
        match (j, k) {
            (1, 1) => self.e11,
            (1, 2) => self.e12,
            (2, 1) => self.e21,
            (2, 2) => self.e22,
            _ => panic!("setting indices must be 1 or 2, got ({j}, {k})"),
        }
    }

    pub fn to_array(&self) -> [f64; 4] {
        [self.e11, self.e12, self.e21, self.e22]
    }

    /// Rejects entries outside `[-1, 1]` (with `1e-10` slack).
    pub fn check_range(&self) -> Result<()> {
        match self.to_array().into_iter().find(|e| !(e.abs() <= 1.0 + 1e-10)) {
            Some(e) => Err(Error::CorrelatorOutOfRange(e)),
            None => Ok(()),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ChshResult {
    pub s_value: f64,
    pub table: CorrelatorTable,
    pub settings: MeasurementSettings,
    pub violates_classical: bool,
    pub within_tsirelson: bool,
}

impl ChshResult {
    fn from_table(table: CorrelatorTable, settings: MeasurementSettings) -> Self {
        let s_value = chsh_value(&table);
        Self {
            s_value,
            table,
            settings,
            violates_classical: s_value.abs() > CLASSICAL_BOUND + VIOLATION_TOL,
            within_tsirelson: s_value.abs() <= TSIRELSON_BOUND + TSIRELSON_TOL,
        }
    }
}

/// `Re Tr(ρ (A ⊗ B))`.
pub fn quantum_correlator(rho: &DensityMatrix, a: &SpinObservable, b: &SpinObservable) -> Result<f64> {
    let joint = a.matrix().tensor_product(b.matrix())?;
    let value = rho.matrix().trace_of_product(&joint)?;
    if value.im.abs() > IMAGINARY_TOL {
        return Err(Error::ImaginaryResidue {
            residue: value.im.abs(),
        });
    }
    Ok(value.re)
}

/// `-â·b̂`, the singlet correlator in closed form.
pub fn singlet_correlator_analytic(a: &UnitVector3, b: &UnitVector3) -> f64 {
    -a.dot(b)
}

pub fn chsh_value(t: &CorrelatorTable) -> f64 {
    t.e11 + t.e12 + t.e21 - t.e22
}

pub fn correlator_table(rho: &DensityMatrix, s: &MeasurementSettings) -> Result<CorrelatorTable> {
    let [a1, a2, b1, b2] = [s.a1, s.a2, s.b1, s.b2].map(spin_observable);
    Ok(CorrelatorTable {
        e11: quantum_correlator(rho, &a1, &b1)?,
        e12: quantum_correlator(rho, &a1, &b2)?,
        e21: quantum_correlator(rho, &a2, &b1)?,
        e22: quantum_correlator(rho, &a2, &b2)?,
    })
}

pub fn chsh_quantum(rho: &DensityMatrix, s: &MeasurementSettings) -> Result<ChshResult> {
    Ok(ChshResult::from_table(correlator_table(rho, s)?, *s))
}

/// True iff every result satisfies `|S| ≤ 2√2 + 1e-8`.
///
/// Only meaningful for results produced by [`chsh_quantum`]; a hand-made
/// table such as `(1, 1, 1, -1)` is not a quantum result.
pub fn tsirelson_check(results: &[ChshResult]) -> bool {
    results
        .iter()
        .all(|r| r.s_value.abs() <= TSIRELSON_BOUND + TSIRELSON_TOL)
}

#[derive(Clone, Debug)]
pub struct OptimizerConfig {
    /// Polar-angle divisions of the coarse grid over `[0, π]`.
    pub grid_theta: usize,
    /// Azimuthal divisions of the coarse grid over `[0, 2π)`.
    pub grid_phi: usize,
    /// Relative tolerance of the simplex refinement.
    pub ftol_rel: f64,
    pub max_evaluations: usize,
    /// Simplex restarts after the first convergence.
    pub max_restarts: usize,
    /// When set, the grid is shifted by a random sub-cell offset.
    pub seed: Option<u64>,
}

impl Default for OptimizerConfig {
    fn default() -> Self {
        Self {
            grid_theta: 24,
            grid_phi: 48,
            ftol_rel: 1e-8,
            max_evaluations: 20_000,
            max_restarts: 3,
            seed: None,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct OptimizationDiagnostics {
    pub grid_directions: usize,
    pub grid_pairs: usize,
    /// Best `|S|` found on the grid.
    pub grid_best: f64,
    pub refinement_rounds: usize,
    pub iterations: usize,
    pub evaluations: usize,
    pub converged: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct Optimization {
    pub result: ChshResult,
    pub diagnostics: OptimizationDiagnostics,
}

fn grid_directions(config: &OptimizerConfig, theta0: f64, phi0: f64) -> Vec<UnitVector3> {
    let d_theta = PI / config.grid_theta.max(1) as f64;
    let d_phi = TAU / config.grid_phi.max(1) as f64;
    let mut out = Vec::new();
    for i in 0..=config.grid_theta {
        let theta = theta0 + i as f64 * d_theta;
        if theta > PI {
            break;
        }
        if theta.sin() < 1e-12 {
            out.push(UnitVector3::from_angles(theta, 0.0));
            continue;
        }
        for j in 0..config.grid_phi.max(1) {
            out.push(UnitVector3::from_angles(theta, phi0 + j as f64 * d_phi));
        }
    }
    out
}

/// `v` with `vᵢ = Tr(ρ (σ·a ⊗ σᵢ))`, so that `⟨A B⟩ = v·b̂` for every `b̂`.
fn response_vector(rho: &DensityMatrix, a: &UnitVector3) -> Result<[f64; 3]> {
    let obs = spin_observable(*a);
    Ok([
        quantum_correlator(rho, &obs, &spin_observable(UnitVector3::X))?,
        quantum_correlator(rho, &obs, &spin_observable(UnitVector3::Y))?,
        quantum_correlator(rho, &obs, &spin_observable(UnitVector3::Z))?,
    ])
}

fn norm3(v: [f64; 3]) -> f64 {
    (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt()
}

/// Best `b̂` for the linear response `v`, falling back to `ẑ` when `v = 0`.
fn align(v: [f64; 3]) -> UnitVector3 {
    UnitVector3::normalize(v[0], v[1], v[2]).unwrap_or(UnitVector3::Z)
}

/// Maximizes `|S|` over the four directions.
///
/// A coarse grid covers Akbar's pair `(â₁, â₂)`; for each grid pair Birbal's
/// directions follow from the linearity of `⟨A B⟩` in `b̂`, giving
/// `max |S| = |v₁ + v₂| + |v₁ - v₂|`. The best grid point seeds a Nelder–Mead
/// refinement over all eight angles, restarted until it stops improving.
pub fn optimize_settings_with(rho: &DensityMatrix, config: &OptimizerConfig) -> Result<Optimization> {
    let (theta0, phi0) = match config.seed {
        Some(seed) => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let t: f64 = rng.random();
            let p: f64 = rng.random();
            (
                t * PI / config.grid_theta.max(1) as f64,
                p * TAU / config.grid_phi.max(1) as f64,
            )
        }
        None => (0.0, 0.0),
    };
    let dirs = grid_directions(config, theta0, phi0);
    let responses = dirs
        .iter()
        .map(|a| response_vector(rho, a))
        .collect::<Result<Vec<_>>>()?;

    let m = dirs.len();
    let score = |i: usize, j: usize| {
        let (u, v) = (responses[i], responses[j]);
        norm3([u[0] + v[0], u[1] + v[1], u[2] + v[2]])
            + norm3([u[0] - v[0], u[1] - v[1], u[2] - v[2]])
    };
    // Ties resolve to the smallest (i, j) so the outcome does not depend on
    // the thread schedule.
    let better = |x: (f64, usize, usize), y: (f64, usize, usize)| {
        if y.0 > x.0 || (y.0 == x.0 && (y.1, y.2) < (x.1, x.2)) {
            y
        } else {
            x
        }
    };
    let (grid_best, bi, bj) = (0..m)
        .into_par_iter()
        .map(|i| {
            (i..m)
                .map(|j| (score(i, j), i, j))
                .fold((f64::NEG_INFINITY, usize::MAX, usize::MAX), better)
        })
        .reduce(|| (f64::NEG_INFINITY, usize::MAX, usize::MAX), better);

    let (v1, v2) = (responses[bi], responses[bj]);
    let start = MeasurementSettings::new(
        dirs[bi],
        dirs[bj],
        align([v1[0] + v2[0], v1[1] + v2[1], v1[2] + v2[2]]),
        align([v1[0] - v2[0], v1[1] - v2[1], v1[2] - v2[2]]),
    );

    let failure: Cell<Option<Error>> = Cell::new(None);
    let objective = |x: &[f64]| match chsh_quantum(rho, &MeasurementSettings::from_params(x)) {
        Ok(r) => -r.s_value.abs(),
        Err(e) => {
            failure.set(Some(e));
            f64::INFINITY
        }
    };

    let nm = NelderMead {
        ftol_rel: config.ftol_rel,
        ftol_abs: 1e-14,
        max_evaluations: config.max_evaluations,
    };
    let base_steps: Vec<f64> = (0..8)
        .map(|k| {
            if k % 2 == 0 {
                0.5 * PI / config.grid_theta.max(1) as f64
            } else {
                0.5 * TAU / config.grid_phi.max(1) as f64
            }
        })
        .collect();

    let mut x = start.to_params();
    let mut best = objective(&x);
    let mut diagnostics = OptimizationDiagnostics {
        grid_directions: m,
        grid_pairs: m * (m + 1) / 2,
        grid_best,
        refinement_rounds: 0,
        iterations: 0,
        evaluations: 1,
        converged: false,
    };
    let mut scale = 1.0;
    for _ in 0..=config.max_restarts {
        let steps: Vec<f64> = base_steps.iter().map(|s| s * scale).collect();
        let found = nm.minimize(objective, &x, &steps);
        diagnostics.refinement_rounds += 1;
        diagnostics.iterations += found.iterations;
        diagnostics.evaluations += found.evaluations;
        diagnostics.converged = found.converged;
        if let Some(e) = failure.take() {
            return Err(e);
        }
        let gain = best - found.value;
        if found.value < best {
            best = found.value;
            x = found.x;
        }
        if gain <= config.ftol_rel * best.abs().max(1e-300) {
            break;
        }
        scale *= 0.1;
    }

    let result = chsh_quantum(rho, &MeasurementSettings::from_params(&x))?;
    Ok(Optimization {
        result,
        diagnostics,
    })
}

/// [`optimize_settings_with`] using the default configuration.
pub fn optimize_settings(rho: &DensityMatrix) -> Result<ChshResult> {
    optimize_settings_with(rho, &OptimizerConfig::default()).map(|o| o.result)
}

/// Whether the optimized Werner state at visibility `p` violates `|S| ≤ 2`.
pub fn werner_violates(p: f64, config: &OptimizerConfig) -> Result<bool> {
    Ok(optimize_settings_with(&werner(p)?, config)?
        .result
        .violates_classical)
}

#[derive(Clone, Debug, Serialize)]
pub struct Threshold {
    pub critical_p: f64,
    /// Largest probed visibility without violation.
    pub lower: f64,
    /// Smallest probed visibility with violation.
    pub upper: f64,
    pub steps: usize,
}

/// Bisects `p ∈ [0, 1]` for the onset of CHSH violation by Werner states.
pub fn werner_threshold_with(config: &OptimizerConfig) -> Result<Threshold> {
    let (mut lower, mut upper) = (0.0_f64, 1.0_f64);
    let mut steps = 0;
    while upper - lower > THRESHOLD_TOL {
        let mid = 0.5 * (lower + upper);
        if werner_violates(mid, config)? {
            upper = mid;
        } else {
            lower = mid;
        }
        steps += 1;
    }
    Ok(Threshold {
        critical_p: 0.5 * (lower + upper),
        lower,
        upper,
        steps,
    })
}

pub fn werner_threshold() -> Result<f64> {
    werner_threshold_with(&OptimizerConfig::default()).map(|t| t.critical_p)
}
