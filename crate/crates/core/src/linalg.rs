//! Fixed-size complex linear algebra for one and two qubits.
//!
//! Matrices are dense, row-major and restricted to dimension 2 or 4.
//! Two-qubit operators are ordered with Akbar's (A) subsystem on the left:
//! basis index `2 * a + b` for single-qubit indices `a`, `b`.

use crate::error::{Error, Result};
use serde::Serialize;

pub use num_complex::Complex64 as Complex;

/// Entrywise tolerance used when checking Hermiticity.
pub const HERMITIAN_TOL: f64 = 1e-10;

const JACOBI_MAX_SWEEPS: usize = 64;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ComplexMatrix {
    dim: usize,
    entries: Vec<Complex>,
}

fn check_dim(dim: usize) -> Result<()> {
    match dim {
        2 | 4 => Ok(()),
        other => Err(Error::UnsupportedDimension(other)),
    }
}

impl ComplexMatrix {
    /// Builds a matrix from row-major entries.
    pub fn new(dim: usize, entries: Vec<Complex>) -> Result<Self> {
        check_dim(dim)?;
        if entries.len() != dim * dim {
            return Err(Error::EntryCount {
                dim,
                expected: dim * dim,
                got: entries.len(),
            });
        }
        if let Some(k) = entries.iter().position(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::NonFinite {
                row: k / dim,
                col: k % dim,
            });
        }
        Ok(Self { dim, entries })
    }

    pub fn from_fn(dim: usize, mut f: impl FnMut(usize, usize) -> Complex) -> Result<Self> {
        check_dim(dim)?;
        let entries = (0..dim * dim).map(|k| f(k / dim, k % dim)).collect();
        Self::new(dim, entries)
    }

    /// Builds a 2x2 matrix from rows. Panics on non-finite entries.
    pub fn from_rows2(rows: [[Complex; 2]; 2]) -> Self {
        Self::new(2, rows.concat()).expect("2x2 matrix entries must be finite")
    }

    pub fn identity(dim: usize) -> Result<Self> {
        Self::from_fn(dim, |i, j| if i == j { Complex::ONE } else { Complex::ZERO })
    }

    pub fn zeros(dim: usize) -> Result<Self> {
        Self::from_fn(dim, |_, _| Complex::ZERO)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn entries(&self) -> &[Complex] {
        &self.entries
    }

    #[inline]
    pub fn get(&self, row: usize, col: usize) -> Complex {
        self.entries[row * self.dim + col]
    }

    fn same_dim(&self, other: &Self) -> Result<()> {
        if self.dim == other.dim {
            Ok(())
        } else {
            Err(Error::DimensionMismatch {
                left: self.dim,
                right: other.dim,
            })
        }
    }

    pub fn matmul(&self, other: &Self) -> Result<Self> {
        self.same_dim(other)?;
        let n = self.dim;
        Ok(Self {
            dim: n,
            entries: (0..n * n)
                .map(|k| {
                    let (i, j) = (k / n, k % n);
                    (0..n).map(|l| self.get(i, l) * other.get(l, j)).sum()
                })
                .collect(),
        })
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> Self {
        let n = self.dim;
        Self {
            dim: n,
            entries: (0..n * n).map(|k| self.get(k % n, k / n).conj()).collect(),
        }
    }

    /// Kronecker product `self ⊗ other` of two 2x2 matrices; `self` acts on
    /// the left (A) factor.
    pub fn tensor_product(&self, other: &Self) -> Result<Self> {
        if self.dim != 2 || other.dim != 2 {
            return Err(Error::DimensionMismatch {
                left: self.dim,
                right: other.dim,
            });
        }
        Ok(Self {
            dim: 4,
            entries: (0..16)
                .map(|k| {
                    let (i, j) = (k / 4, k % 4);
                    self.get(i / 2, j / 2) * other.get(i % 2, j % 2)
                })
                .collect(),
        })
    }

    pub fn trace(&self) -> Complex {
        (0..self.dim).map(|i| self.get(i, i)).sum()
    }

    /// `Tr(self · other)` without forming the product.
    pub fn trace_of_product(&self, other: &Self) -> Result<Complex> {
        self.same_dim(other)?;
        let n = self.dim;
        Ok((0..n)
            .flat_map(|i| (0..n).map(move |j| (i, j)))
            .map(|(i, j)| self.get(i, j) * other.get(j, i))
            .sum())
    }

    pub fn scale(&self, factor: Complex) -> Self {
        Self {
            dim: self.dim,
            entries: self.entries.iter().map(|z| z * factor).collect(),
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.same_dim(other)?;
        Ok(Self {
            dim: self.dim,
            entries: self.entries.iter().zip(&other.entries).map(|(a, b)| a + b).collect(),
        })
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.scale(-Complex::ONE))
    }

    /// Largest entrywise modulus of `self - other`.
    pub fn max_abs_diff(&self, other: &Self) -> Result<f64> {
        self.same_dim(other)?;
        Ok(self
            .entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max))
    }

    /// Largest entrywise modulus of `self - self†`.
    pub fn hermiticity_defect(&self) -> f64 {
        let n = self.dim;
        (0..n)
            .flat_map(|i| (i..n).map(move |j| (i, j)))
            .map(|(i, j)| (self.get(i, j) - self.get(j, i).conj()).norm())
            .fold(0.0, f64::max)
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.hermiticity_defect() <= tol
    }

    /// All eigenvalues of a Hermitian matrix in ascending order, via cyclic
    /// complex Jacobi rotations.
    pub fn eigenvalues_hermitian(&self) -> Result<Vec<f64>> {
        let defect = self.hermiticity_defect();
        if defect > HERMITIAN_TOL {
            return Err(Error::NotHermitian { defect });
        }
        let n = self.dim;
        // Symmetrize so rotations see an exactly Hermitian matrix.
        let mut a: Vec<Complex> = (0..n * n)
            .map(|k| {
                let (i, j) = (k / n, k % n);
                (self.get(i, j) + self.get(j, i).conj()) * 0.5
            })
            .collect();
        let scale = a.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt().max(f64::MIN_POSITIVE);

        for _ in 0..JACOBI_MAX_SWEEPS {
            let off: f64 = (0..n)
                .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
                .map(|(i, j)| a[i * n + j].norm_sqr())
                .sum::<f64>()
                .sqrt();
            if off <= 1e-15 * scale {
                break;
            }
            for p in 0..n {
                for q in p + 1..n {
                    jacobi_rotate(&mut a, n, p, q);
                }
            }
        }

        let mut eig: Vec<f64> = (0..n).map(|i| a[i * n + i].re).collect();
        eig.sort_by(f64::total_cmp);
        Ok(eig)
    }

    pub fn min_eigenvalue_hermitian(&self) -> Result<f64> {
        Ok(self.eigenvalues_hermitian()?[0])
    }
}

/// Zeroes `a[p][q]` (and `a[q][p]`) with the unitary `J = D·R`, where `D`
/// removes the phase of `a[p][q]` and `R` is a real Givens rotation.
fn jacobi_rotate(a: &mut [Complex], n: usize, p: usize, q: usize) {
    let apq = a[p * n + q];
    let r = apq.norm();
    if r == 0.0 {
        return;
    }
    let phase = apq / r;
    let app = a[p * n + p].re;
    let aqq = a[q * n + q].re;
    let theta = 0.5 * (2.0 * r).atan2(aqq - app);
    let (s, c) = theta.sin_cos();

    // Columns of J: J[:, p] = (c at p, -s·e^{-iφ} at q); J[:, q] = (s at p, c·e^{-iφ} at q).
    let jpp = Complex::new(c, 0.0);
    let jpq = Complex::new(s, 0.0);
    let jqp = -phase.conj() * s;
    let jqq = phase.conj() * c;

    // A <- A J (columns p, q)
    for i in 0..n {
        let aip = a[i * n + p];
        let aiq = a[i * n + q];
        a[i * n + p] = aip * jpp + aiq * jqp;
        a[i * n + q] = aip * jpq + aiq * jqq;
    }
    // A <- J† A (rows p, q)
    for j in 0..n {
        let apj = a[p * n + j];
        let aqj = a[q * n + j];
        a[p * n + j] = jpp.conj() * apj + jqp.conj() * aqj;
        a[q * n + j] = jpq.conj() * apj + jqq.conj() * aqj;
    }
    a[p * n + q] = Complex::ZERO;
    a[q * n + p] = Complex::ZERO;
}

/// The 2x2 identity.
pub fn identity2() -> ComplexMatrix {
    ComplexMatrix::identity(2).expect("dimension 2 is supported")
}

/// The 4x4 identity.
pub fn identity4() -> ComplexMatrix {
    ComplexMatrix::identity(4).expect("dimension 4 is supported")
}

pub fn pauli_x() -> ComplexMatrix {
    let (o, l) = (Complex::ZERO, Complex::ONE);
    ComplexMatrix::from_rows2([[o, l], [l, o]])
}

pub fn pauli_y() -> ComplexMatrix {
    let (o, i) = (Complex::ZERO, Complex::I);
    ComplexMatrix::from_rows2([[o, -i], [i, o]])
}

pub fn pauli_z() -> ComplexMatrix {
    let (o, l) = (Complex::ZERO, Complex::ONE);
    ComplexMatrix::from_rows2([[l, o], [o, -l]])
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex {
        Complex::new(re, im)
    }

    #[test]
    fn rejects_unsupported_dims() {
        assert_eq!(ComplexMatrix::identity(3), Err(Error::UnsupportedDimension(3)));
        assert!(matches!(
            ComplexMatrix::new(2, vec![Complex::ONE; 3]),
            Err(Error::EntryCount { .. })
        ));
        assert!(matches!(
            ComplexMatrix::new(2, vec![c(f64::NAN, 0.0); 4]),
            Err(Error::NonFinite { row: 0, col: 0 })
        ));
    }

    #[test]
    fn matmul_examples() {
        assert_eq!(identity2().matmul(&identity2()).unwrap(), identity2());
        assert_eq!(pauli_x().matmul(&pauli_x()).unwrap(), identity2());
        let xy = pauli_x().matmul(&pauli_y()).unwrap();
        assert_eq!(xy, pauli_z().scale(Complex::I));
        assert!(matches!(
            identity2().matmul(&identity4()),
            Err(Error::DimensionMismatch { left: 2, right: 4 })
        ));
    }

    #[test]
    fn adjoint_examples() {
        assert_eq!(identity2().adjoint(), identity2());
        assert_eq!(pauli_y().adjoint(), pauli_y());
        let upper = ComplexMatrix::from_rows2([[c(0.0, 0.0), c(1.0, 1.0)], [c(0.0, 0.0), c(0.0, 0.0)]]);
        let lower = ComplexMatrix::from_rows2([[c(0.0, 0.0), c(0.0, 0.0)], [c(1.0, -1.0), c(0.0, 0.0)]]);
        assert_eq!(upper.adjoint(), lower);
    }

    fn diag4(d: [f64; 4]) -> ComplexMatrix {
        ComplexMatrix::from_fn(4, |i, j| if i == j { c(d[i], 0.0) } else { Complex::ZERO }).unwrap()
    }

    #[test]
    fn tensor_product_examples() {
        assert_eq!(identity2().tensor_product(&identity2()).unwrap(), identity4());
        assert_eq!(
            pauli_z().tensor_product(&identity2()).unwrap(),
            diag4([1.0, 1.0, -1.0, -1.0])
        );
        assert_eq!(
            pauli_z().tensor_product(&pauli_z()).unwrap(),
            diag4([1.0, -1.0, -1.0, 1.0])
        );
        assert!(identity4().tensor_product(&identity2()).is_err());
    }

    #[test]
    fn trace_examples() {
        assert_eq!(identity4().trace(), c(4.0, 0.0));
        assert_eq!(pauli_x().trace(), Complex::ZERO);
    }

    #[test]
    fn min_eigenvalue_examples() {
        assert!((identity4().min_eigenvalue_hermitian().unwrap() - 1.0).abs() < 1e-12);
        let zi = pauli_z().tensor_product(&identity2()).unwrap();
        assert!((zi.min_eigenvalue_hermitian().unwrap() + 1.0).abs() < 1e-12);
    }

    #[test]
    fn eigenvalues_of_pauli_y() {
        let eig = pauli_y().eigenvalues_hermitian().unwrap();
        assert!((eig[0] + 1.0).abs() < 1e-12 && (eig[1] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn non_hermitian_rejected() {
        let m = ComplexMatrix::from_rows2([[c(0.0, 0.0), c(1.0, 0.0)], [c(0.0, 0.0), c(0.0, 0.0)]]);
        assert!(matches!(m.min_eigenvalue_hermitian(), Err(Error::NotHermitian { .. })));
    }

    #[test]
    fn trace_of_product_matches_matmul() {
        let a = pauli_x().tensor_product(&pauli_y()).unwrap();
        let b = pauli_z().tensor_product(&pauli_x()).unwrap().add(&identity4()).unwrap();
        let direct = a.matmul(&b).unwrap().trace();
        assert!((a.trace_of_product(&b).unwrap() - direct).norm() < 1e-15);
    }
}
