//! Bell/CHSH analysis of two-qubit states.
//!
//! * [`linalg`]: 2x2 and 4x4 complex matrices, Kronecker products and a
//!   Hermitian eigenvalue solver.
//! * [`states`]: the singlet and the Werner family.
//! * [`observables`]: measurement directions and spin observables `σ⃗·n̂`.
//! * [`chsh`]: Born-rule correlators, the CHSH functional, the search for the
//!   maximal violation and the Werner visibility threshold.
//! * [`lhv`]: finite local hidden-variable models, the classical bound and
//!   simulated experiments with seeded, replayable trial streams.

pub mod chsh;
pub mod error;
pub mod lhv;
pub mod linalg;
pub mod observables;
pub mod rng;
pub mod simplex;
pub mod states;
pub mod trial_log;

pub use chsh::{
    chsh_quantum, chsh_value, optimize_settings, optimize_settings_with, quantum_correlator,
    singlet_correlator_analytic, tsirelson_check, werner_threshold, werner_threshold_with,
    ChshResult, CorrelatorTable, MeasurementSettings, Optimization, OptimizerConfig, Threshold,
    CLASSICAL_BOUND, TSIRELSON_BOUND,
};
pub use error::{Error, Result};
pub use lhv::{
    bell_operator_integrand, classical_bound_exhaustive, lhv_correlators_exact,
    sample_lhv_experiment, sample_quantum_experiment, sample_quantum_for_state, EstimatedTable,
    Experiment, LhvModel, Outcome, Response, TrialRecord,
};
pub use linalg::{Complex, ComplexMatrix};
pub use observables::{from_polar, spin_observable, PolarAngles, SpinObservable, UnitVector3};
pub use states::{make_singlet, make_werner, validate, werner, DensityMatrix, Visibility};
