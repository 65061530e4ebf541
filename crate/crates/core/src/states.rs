//! The singlet and the Werner family of two-qubit states.
//!
//! Basis order is (↑↑, ↑↓, ↓↑, ↓↓) with Akbar's spin on the left, so the
//! singlet `(|↑↓⟩ - |↓↑⟩)/√2` lives on indices 1 and 2.

use crate::error::{Error, Result};
use crate::linalg::{identity4, Complex, ComplexMatrix, HERMITIAN_TOL};
use serde::Serialize;

/// Tolerance on `|Tr ρ - 1|`.
pub const TRACE_TOL: f64 = 1e-10;
/// Most negative eigenvalue a density matrix may carry.
pub const POSITIVITY_TOL: f64 = 1e-10;
/// Slack allowed on the visibility range `[-1/3, 1]`.
pub const VISIBILITY_SLACK: f64 = 1e-12;

pub const VISIBILITY_MIN: f64 = -1.0 / 3.0;
pub const VISIBILITY_MAX: f64 = 1.0;

/// Singlet weight `p` of a Werner state.
#[derive(Clone, Copy, Debug, PartialEq, PartialOrd, Serialize)]
pub struct Visibility(f64);

impl Visibility {
    pub fn new(p: f64) -> Result<Self> {
        if p.is_finite()
            && p >= VISIBILITY_MIN - VISIBILITY_SLACK
            && p <= VISIBILITY_MAX + VISIBILITY_SLACK
        {
            Ok(Self(p))
        } else {
            Err(Error::VisibilityOutOfRange(p))
        }
    }

    pub fn value(self) -> f64 {
        self.0
    }
}

/// A validated two-qubit density matrix: Hermitian, unit trace and positive
/// semidefinite, each within `1e-10`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DensityMatrix {
    matrix: ComplexMatrix,
}

/// Outcome of checking the three density-matrix invariants.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Validation {
    pub hermiticity_defect: f64,
    pub trace: Complex,
    /// `None` when the matrix is too far from Hermitian to diagonalize.
    pub min_eigenvalue: Option<f64>,
    pub hermitian: bool,
    pub unit_trace: bool,
    pub positive: bool,
}

impl Validation {
    pub fn is_valid(&self) -> bool {
        self.hermitian && self.unit_trace && self.positive
    }

    /// Human-readable list of the failed invariants.
    pub fn failures(&self) -> Vec<String> {
        let mut out = Vec::new();
        if !self.hermitian {
            out.push(format!("not Hermitian (defect {:e})", self.hermiticity_defect));
        }
        if !self.unit_trace {
            out.push(format!("trace {} != 1", self.trace));
        }
        if !self.positive {
            match self.min_eigenvalue {
                Some(l) => out.push(format!("negative eigenvalue {l:e}")),
                None => out.push("spectrum undefined".to_string()),
            }
        }
        out
    }
}

/// Checks a 4x4 matrix against the density-matrix invariants.
pub fn validate(matrix: &ComplexMatrix) -> Validation {
    let hermiticity_defect = matrix.hermiticity_defect();
    let trace = matrix.trace();
    let hermitian = matrix.dim() == 4 && hermiticity_defect <= HERMITIAN_TOL;
    let min_eigenvalue = if hermitian {
        matrix.min_eigenvalue_hermitian().ok()
    } else {
        None
    };
    Validation {
        hermiticity_defect,
        trace,
        min_eigenvalue,
        hermitian,
        unit_trace: (trace - Complex::ONE).norm() <= TRACE_TOL,
        positive: min_eigenvalue.is_some_and(|l| l >= -POSITIVITY_TOL),
    }
}

impl DensityMatrix {
    pub fn new(matrix: ComplexMatrix) -> Result<Self> {
        let report = validate(&matrix);
        if report.is_valid() {
            Ok(Self { matrix })
        } else {
            Err(Error::InvalidState(report.failures().join("; ")))
        }
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    /// `Tr ρ²`.
    pub fn purity(&self) -> f64 {
        self.matrix
            .trace_of_product(&self.matrix)
            .expect("same dimension")
            .re
    }

    /// The maximally mixed state `𝕀₄/4`.
    pub fn white_noise() -> Self {
        Self {
            matrix: identity4().scale(Complex::new(0.25, 0.0)),
        }
    }
}

/// `|ψ⁻⟩⟨ψ⁻|` as a raw matrix.
pub fn singlet_projector() -> ComplexMatrix {
    let h = Complex::new(0.5, 0.0);
    ComplexMatrix::from_fn(4, |i, j| match (i, j) {
        (1, 1) | (2, 2) => h,
        (1, 2) | (2, 1) => -h,
        _ => Complex::ZERO,
    })
    .expect("4x4 is supported")
}

/// The singlet `(|↑↓⟩ - |↓↑⟩)/√2`.
pub fn make_singlet() -> DensityMatrix {
    DensityMatrix {
        matrix: singlet_projector(),
    }
}

/// `p|ψ⁻⟩⟨ψ⁻| + (1 - p)/4 · 𝕀₄` evaluated for any real `p`, without checking
/// positivity.
pub fn werner_matrix(p: f64) -> ComplexMatrix {
    singlet_projector()
        .scale(Complex::new(p, 0.0))
        .add(&identity4().scale(Complex::new(0.25 * (1.0 - p), 0.0)))
        .expect("both 4x4")
}

/// Werner state with visibility `p`.
pub fn make_werner(p: Visibility) -> Result<DensityMatrix> {
    DensityMatrix::new(werner_matrix(p.value()))
}

/// Convenience: validate `p` and build the Werner state in one step.
pub fn werner(p: f64) -> Result<DensityMatrix> {
    make_werner(Visibility::new(p)?)
}
