//! Local hidden-variable models and simulated Bell experiments.
//!
//! A model is a finite list of hidden states `λ`, each carrying a probability
//! weight and predetermined outcomes for both of Akbar's settings and both of
//! Birbal's. The correlator integral over `λ` becomes a weighted sum. Any
//! distribution over hidden variables acts on CHSH statistics through a
//! distribution over the 16 deterministic response patterns, so the finite
//! representation loses nothing.
//!
//! Pattern index `i ∈ 0..16` encodes `(A₁, A₂, B₁, B₂)` in its bits
//! `(8, 4, 2, 1)`; a set bit means `-1`. Pattern 0 is `(+1, +1, +1, +1)`.

use std::fmt;

use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Serialize, Serializer};

use crate::chsh::{chsh_value, correlator_table, CorrelatorTable, MeasurementSettings, CLASSICAL_BOUND};
use crate::error::{Error, Result};
use crate::linalg::{identity2, pauli_x, pauli_y, pauli_z};
use crate::rng::{stream, TRIALS_PER_STREAM};
use crate::states::DensityMatrix;

/// Tolerance on `|Σ weights - 1|`.
pub const WEIGHT_SUM_TOL: f64 = 1e-12;
/// Largest single-party expectation accepted by [`sample_quantum_for_state`].
pub const MARGINAL_TOL: f64 = 1e-10;

/// A ±1 measurement outcome.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Outcome {
    Plus,
    Minus,
}

impl Outcome {
    pub fn value(self) -> i8 {
        match self {
            Outcome::Plus => 1,
            Outcome::Minus => -1,
        }
    }

    pub fn from_value(v: i64) -> Option<Self> {
        match v {
            1 => Some(Outcome::Plus),
            -1 => Some(Outcome::Minus),
            _ => None,
        }
    }

    fn from_bit(minus: bool) -> Self {
        if minus {
            Outcome::Minus
        } else {
            Outcome::Plus
        }
    }

    fn flip(self) -> Self {
        Self::from_bit(self == Outcome::Plus)
    }
}

impl fmt::Display for Outcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Outcome::Plus => "+1",
            Outcome::Minus => "-1",
        })
    }
}

impl Serialize for Outcome {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_i8(self.value())
    }
}

/// Predetermined outcomes of one hidden state. Akbar's outcomes do not depend
/// on Birbal's setting and vice versa.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct Response {
    pub a1: Outcome,
    pub a2: Outcome,
    pub b1: Outcome,
    pub b2: Outcome,
}

impl Response {
    pub fn from_pattern(index: usize) -> Result<Self> {
        if index >= 16 {
            return Err(Error::IndexOutOfRange { index, len: 16 });
        }
        let bit = |b: usize| Outcome::from_bit(index & b != 0);
        Ok(Self {
            a1: bit(8),
            a2: bit(4),
            b1: bit(2),
            b2: bit(1),
        })
    }

    pub fn pattern_index(&self) -> usize {
        [self.a1, self.a2, self.b1, self.b2]
            .iter()
            .fold(0, |acc, o| 2 * acc + usize::from(*o == Outcome::Minus))
    }

    pub fn a(&self, setting: u8) -> Outcome {
        if setting == 1 {
            self.a1
        } else {
            self.a2
        }
    }

    pub fn b(&self, setting: u8) -> Outcome {
        if setting == 1 {
            self.b1
        } else {
            self.b2
        }
    }

    /// All four outcomes negated.
    pub fn flipped(&self) -> Self {
        Self {
            a1: self.a1.flip(),
            a2: self.a2.flip(),
            b1: self.b1.flip(),
            b2: self.b2.flip(),
        }
    }

    /// `A₁(B₁ + B₂) + A₂(B₁ - B₂)`; always `±2`.
    pub fn bell_integrand(&self) -> f64 {
        let v = |o: Outcome| f64::from(o.value());
        v(self.a1) * (v(self.b1) + v(self.b2)) + v(self.a2) * (v(self.b1) - v(self.b2))
    }
}

impl fmt::Display for Response {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for o in [self.a1, self.a2, self.b1, self.b2] {
            f.write_str(if o == Outcome::Plus { "+" } else { "-" })?;
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct HiddenState {
    pub label: String,
    pub weight: f64,
    pub response: Response,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LhvModel {
    states: Vec<HiddenState>,
}

impl LhvModel {
    pub fn new(states: Vec<HiddenState>) -> Result<Self> {
        if states.is_empty() {
            return Err(Error::InvalidModel("no hidden states".into()));
        }
        if let Some(s) = states.iter().find(|s| !(s.weight >= 0.0) || !s.weight.is_finite()) {
            return Err(Error::InvalidModel(format!(
                "weight {} of '{}' is not a nonnegative number",
                s.weight, s.label
            )));
        }
        let total: f64 = states.iter().map(|s| s.weight).sum();
        if (total - 1.0).abs() > WEIGHT_SUM_TOL {
            return Err(Error::InvalidModel(format!("weights sum to {total}, not 1")));
        }
        Ok(Self { states })
    }

    /// One hidden state per deterministic pattern, labeled by its signs.
    pub fn from_pattern_weights(weights: &[f64; 16]) -> Result<Self> {
        Self::new(
            weights
                .iter()
                .enumerate()
                .map(|(i, &weight)| {
                    let response = Response::from_pattern(i).expect("i < 16");
                    HiddenState {
                        label: response.to_string(),
                        weight,
                        response,
                    }
                })
                .collect(),
        )
    }

    /// A single hidden state with the given response.
    pub fn deterministic(response: Response) -> Self {
        Self {
            states: vec![HiddenState {
                label: response.to_string(),
                weight: 1.0,
                response,
            }],
        }
    }

    /// Equal weight on all 16 patterns.
    pub fn uniform16() -> Self {
        Self::from_pattern_weights(&[1.0 / 16.0; 16]).expect("uniform weights are normalized")
    }

    pub fn states(&self) -> &[HiddenState] {
        &self.states
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }
}

/// `Ejk = Σ_λ w(λ) A_j(λ) B_k(λ)`.
pub fn lhv_correlators_exact(m: &LhvModel) -> CorrelatorTable {
    let e = |j: u8, k: u8| -> f64 {
        m.states
            .iter()
            .map(|s| s.weight * f64::from(s.response.a(j).value() * s.response.b(k).value()))
            .sum()
    };
    CorrelatorTable::new(e(1, 1), e(1, 2), e(2, 1), e(2, 2))
}

pub fn bell_operator_integrand(m: &LhvModel, lambda_index: usize) -> Result<f64> {
    m.states
        .get(lambda_index)
        .map(|s| s.response.bell_integrand())
        .ok_or(Error::IndexOutOfRange {
            index: lambda_index,
            len: m.len(),
        })
}

#[derive(Clone, Debug, Serialize)]
pub struct PatternValue {
    pub pattern: usize,
    pub response: String,
    pub s_value: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct ExhaustiveBound {
    /// `max |S|` over the 16 deterministic patterns.
    pub max_abs_s: f64,
    pub patterns: Vec<PatternValue>,
}

/// Enumerates the 16 deterministic local strategies.
pub fn classical_bound_exhaustive() -> ExhaustiveBound {
    let patterns: Vec<PatternValue> = (0..16)
        .map(|i| {
            let response = Response::from_pattern(i).expect("i < 16");
            let s = chsh_value(&lhv_correlators_exact(&LhvModel::deterministic(response)));
            PatternValue {
                pattern: i,
                response: response.to_string(),
                s_value: s,
            }
        })
        .collect();
    let max_abs_s = patterns.iter().map(|p| p.s_value.abs()).fold(0.0, f64::max);
    ExhaustiveBound {
        max_abs_s,
        patterns,
    }
}

/// One simulated run: settings in `{1, 2}` and the two outcomes.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct TrialRecord {
    pub trial: u64,
    pub a_setting: u8,
    pub b_setting: u8,
    pub a_outcome: Outcome,
    pub b_outcome: Outcome,
}

/// Correlators estimated from trials, in the order `(11, 12, 21, 22)`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EstimatedTable {
    pub table: CorrelatorTable,
    pub counts: [u64; 4],
    /// `sqrt((1 - ê²)/n)` per entry; infinite where a setting pair got no trials.
    pub std_errors: [f64; 4],
    pub s_value: f64,
    /// Per-entry errors combined in quadrature.
    pub s_std_error: f64,
}

impl EstimatedTable {
    pub fn from_trials(trials: &[TrialRecord]) -> Self {
        let mut sums = [0i64; 4];
        let mut counts = [0u64; 4];
        for t in trials {
            let k = pair_index(t.a_setting, t.b_setting);
            sums[k] += i64::from(t.a_outcome.value() * t.b_outcome.value());
            counts[k] += 1;
        }
        let mut means = [0.0; 4];
        let mut std_errors = [f64::INFINITY; 4];
        for k in 0..4 {
            if counts[k] > 0 {
                let n = counts[k] as f64;
                means[k] = sums[k] as f64 / n;
                std_errors[k] = ((1.0 - means[k] * means[k]).max(0.0) / n).sqrt();
            }
        }
        let table = CorrelatorTable::new(means[0], means[1], means[2], means[3]);
        Self {
            s_value: chsh_value(&table),
            s_std_error: std_errors.iter().map(|e| e * e).sum::<f64>().sqrt(),
            table,
            counts,
            std_errors,
        }
    }
}

fn pair_index(j: u8, k: u8) -> usize {
    2 * usize::from(j - 1) + usize::from(k - 1)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Experiment {
    pub estimate: EstimatedTable,
    #[serde(skip)]
    pub trials: Vec<TrialRecord>,
}

/// Runs `n_trials` trials in chunks of [`TRIALS_PER_STREAM`], chunk `c` using
/// random stream `c`. Each trial draws its settings first, then calls `draw`.
fn run_trials<F>(n_trials: usize, seed: u64, draw: F) -> Result<Experiment>
where
    F: Fn(&mut ChaCha8Rng, u8, u8) -> (Outcome, Outcome) + Sync,
{
    if n_trials == 0 {
        return Err(Error::NoTrials);
    }
    let chunks = n_trials.div_ceil(TRIALS_PER_STREAM);
    let trials: Vec<TrialRecord> = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut rng = stream(seed, c as u64);
            let start = c * TRIALS_PER_STREAM;
            let end = (start + TRIALS_PER_STREAM).min(n_trials);
            (start..end)
                .map(|t| {
                    let a_setting = 1 + u8::from(rng.random::<bool>());
                    let b_setting = 1 + u8::from(rng.random::<bool>());
                    let (a_outcome, b_outcome) = draw(&mut rng, a_setting, b_setting);
                    TrialRecord {
                        trial: t as u64,
                        a_setting,
                        b_setting,
                        a_outcome,
                        b_outcome,
                    }
                })
                .collect::<Vec<_>>()
        })
        .flatten()
        .collect();
    Ok(Experiment {
        estimate: EstimatedTable::from_trials(&trials),
        trials,
    })
}

/// Simulates a Bell experiment on a local model: settings uniform and
/// independent, and a fresh `λ` drawn from the weights for every trial.
pub fn sample_lhv_experiment(m: &LhvModel, n_trials: usize, seed: u64) -> Result<Experiment> {
    let lambda = WeightedIndex::new(m.states.iter().map(|s| s.weight))
        .map_err(|e| Error::InvalidModel(e.to_string()))?;
    run_trials(n_trials, seed, |rng, j, k| {
        let r = &m.states[lambda.sample(rng)].response;
        (r.a(j), r.b(k))
    })
}

/// Samples joint outcomes with `P(a, b) = (1 + a·b·Ejk)/4` for every setting
/// pair. Only valid for states whose single-party marginals vanish.
pub fn sample_quantum_experiment(table: &CorrelatorTable, n_trials: usize, seed: u64) -> Result<Experiment> {
    table.check_range()?;
    run_trials(n_trials, seed, |rng, j, k| {
        let e = table.get(j, k).clamp(-1.0, 1.0);
        let same = rng.random::<f64>() < 0.5 * (1.0 + e);
        let a = Outcome::from_bit(rng.random::<bool>());
        (a, if same { a } else { a.flip() })
    })
}

/// Largest `|Tr ρ(σᵢ ⊗ 𝕀)|` or `|Tr ρ(𝕀 ⊗ σᵢ)|`.
pub fn max_marginal(rho: &DensityMatrix) -> f64 {
    let id = identity2();
    [pauli_x(), pauli_y(), pauli_z()]
        .iter()
        .flat_map(|p| [p.tensor_product(&id), id.tensor_product(p)])
        .map(|op| {
            rho.matrix()
                .trace_of_product(&op.expect("2x2 factors"))
                .expect("4x4")
                .norm()
        })
        .fold(0.0, f64::max)
}

/// Computes the Born-rule table for `settings` and samples it.
pub fn sample_quantum_for_state(
    rho: &DensityMatrix,
    settings: &MeasurementSettings,
    n_trials: usize,
    seed: u64,
) -> Result<Experiment> {
    let marginal = max_marginal(rho);
    if marginal > MARGINAL_TOL {
        return Err(Error::NonVanishingMarginals(marginal));
    }
    sample_quantum_experiment(&correlator_table(rho, settings)?, n_trials, seed)
}

/// Whether `|S| ≤ 2` holds for the exact correlators of `m` up to rounding.
pub fn obeys_classical_bound(m: &LhvModel) -> bool {
    chsh_value(&lhv_correlators_exact(m)).abs() <= CLASSICAL_BOUND + 1e-12
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chsh::TSIRELSON_BOUND;
    use crate::states::{make_singlet, werner};

    fn resp(v: [i64; 4]) -> Response {
        let o = |x| Outcome::from_value(x).unwrap();
        Response {
            a1: o(v[0]),
            a2: o(v[1]),
            b1: o(v[2]),
            b2: o(v[3]),
        }
    }

    #[test]
    fn pattern_encoding_round_trips() {
        for i in 0..16 {
            assert_eq!(Response::from_pattern(i).unwrap().pattern_index(), i);
        }
        assert_eq!(Response::from_pattern(0).unwrap(), resp([1, 1, 1, 1]));
        assert_eq!(Response::from_pattern(5).unwrap(), resp([1, -1, 1, -1]));
        assert!(Response::from_pattern(16).is_err());
    }

    #[test]
    fn exact_correlator_examples() {
        let single = LhvModel::deterministic(resp([1, 1, 1, 1]));
        let t = lhv_correlators_exact(&single);
        assert_eq!(t, CorrelatorTable::new(1.0, 1.0, 1.0, 1.0));
        assert_eq!(chsh_value(&t), 2.0);

        let r = resp([1, -1, 1, 1]);
        let flip_pair = LhvModel::new(vec![
            HiddenState { label: "a".into(), weight: 0.5, response: r },
            HiddenState { label: "b".into(), weight: 0.5, response: r.flipped() },
        ])
        .unwrap();
        assert_eq!(lhv_correlators_exact(&flip_pair), lhv_correlators_exact(&LhvModel::deterministic(r)));

        assert_eq!(
            lhv_correlators_exact(&LhvModel::uniform16()),
            CorrelatorTable::new(0.0, 0.0, 0.0, 0.0)
        );
    }

    #[test]
    fn model_validation() {
        let mut w = [0.0; 16];
        w[0] = 0.5;
        assert!(matches!(LhvModel::from_pattern_weights(&w), Err(Error::InvalidModel(_))));
        w[1] = 0.6;
        w[2] = -0.1;
        assert!(LhvModel::from_pattern_weights(&w).is_err());
        assert!(LhvModel::new(vec![]).is_err());
    }

    #[test]
    fn integrand_examples() {
        let m = LhvModel::deterministic(resp([1, 1, 1, 1]));
        assert_eq!(bell_operator_integrand(&m, 0).unwrap(), 2.0);
        let m = LhvModel::deterministic(resp([1, -1, 1, -1]));
        assert_eq!(bell_operator_integrand(&m, 0).unwrap(), -2.0);
        assert!(matches!(
            bell_operator_integrand(&m, 1),
            Err(Error::IndexOutOfRange { index: 1, len: 1 })
        ));
        for i in 0..16 {
            let v = Response::from_pattern(i).unwrap().bell_integrand();
            assert!(v == 2.0 || v == -2.0);
        }
    }

    #[test]
    fn exhaustive_bound_is_two() {
        let b = classical_bound_exhaustive();
        assert_eq!(b.max_abs_s, 2.0);
        assert_eq!(b.patterns.len(), 16);
        assert!(b.patterns.iter().all(|p| p.s_value.abs() == 2.0));
    }

    #[test]
    fn deterministic_sampling_is_exact() {
        let m = LhvModel::deterministic(resp([1, -1, -1, 1]));
        let exp = sample_lhv_experiment(&m, 5000, 3).unwrap();
        assert_eq!(exp.estimate.table, lhv_correlators_exact(&m));
        assert_eq!(exp.estimate.std_errors, [0.0; 4]);
        assert_eq!(exp.trials.len(), 5000);
    }

    #[test]
    fn zero_trials_rejected() {
        assert_eq!(sample_lhv_experiment(&LhvModel::uniform16(), 0, 1), Err(Error::NoTrials));
        let t = CorrelatorTable::new(0.0, 0.0, 0.0, 0.0);
        assert_eq!(sample_quantum_experiment(&t, 0, 1), Err(Error::NoTrials));
    }

    #[test]
    fn uniform16_sampling_centres_on_zero() {
        let exp = sample_lhv_experiment(&LhvModel::uniform16(), 100_000, 11).unwrap();
        for (e, se) in exp.estimate.table.to_array().iter().zip(exp.estimate.std_errors) {
            assert!(e.abs() <= 4.0 * se, "{e} vs {se}");
        }
    }

    #[test]
    fn perfect_anticorrelation() {
        let t = CorrelatorTable::new(-1.0, 0.3, 1.0, 0.0);
        let exp = sample_quantum_experiment(&t, 20_000, 5).unwrap();
        for r in &exp.trials {
            match (r.a_setting, r.b_setting) {
                (1, 1) => assert_ne!(r.a_outcome, r.b_outcome),
                (2, 1) => assert_eq!(r.a_outcome, r.b_outcome),
                _ => {}
            }
        }
    }

    #[test]
    fn out_of_range_table_rejected() {
        let t = CorrelatorTable::new(-1.5, 0.0, 0.0, 0.0);
        assert!(matches!(sample_quantum_experiment(&t, 10, 1), Err(Error::CorrelatorOutOfRange(_))));
    }

    #[test]
    fn quantum_sampling_near_tsirelson() {
        let exp =
            sample_quantum_for_state(&make_singlet(), &MeasurementSettings::optimal(), 200_000, 1).unwrap();
        let est = &exp.estimate;
        assert!((est.s_value - TSIRELSON_BOUND).abs() <= 4.0 * est.s_std_error);

        let exp = sample_quantum_for_state(&werner(0.6).unwrap(), &MeasurementSettings::optimal(), 200_000, 2)
            .unwrap();
        assert!(exp.estimate.s_value.abs() < 2.0);
    }

    #[test]
    fn estimate_handles_empty_pairs() {
        let trials = [TrialRecord {
            trial: 0,
            a_setting: 2,
            b_setting: 1,
            a_outcome: Outcome::Plus,
            b_outcome: Outcome::Minus,
        }];
        let est = EstimatedTable::from_trials(&trials);
        assert_eq!(est.counts, [0, 0, 1, 0]);
        assert_eq!(est.table.e21, -1.0);
        assert!(est.std_errors[0].is_infinite());
        assert_eq!(est.std_errors[2], 0.0);
    }
}
