use bell_core::linalg::{Complex, ComplexMatrix};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn random_matrix(rng: &mut impl Rng, dim: usize) -> ComplexMatrix {
    ComplexMatrix::from_fn(dim, |_, _| {
        Complex::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
    })
    .unwrap()
}

fn random_hermitian(rng: &mut impl Rng, dim: usize) -> ComplexMatrix {
    let m = random_matrix(rng, dim);
    m.add(&m.adjoint()).unwrap().scale(Complex::new(0.5, 0.0))
}

/// Determinant by cofactor expansion along the first row.
fn det(m: &[Vec<Complex>]) -> Complex {
    let n = m.len();
    if n == 1 {
        return m[0][0];
    }
    (0..n)
        .map(|col| {
            let minor: Vec<Vec<Complex>> = m[1..]
                .iter()
                .map(|row| {
                    row.iter()
                        .enumerate()
                        .filter(|(c, _)| *c != col)
                        .map(|(_, v)| *v)
                        .collect()
                })
                .collect();
            let sign = if col % 2 == 0 { 1.0 } else { -1.0 };
            m[0][col] * det(&minor) * sign
        })
        .sum()
}

/// `det(A - λI)`, real for Hermitian `A`.
fn char_poly(a: &ComplexMatrix, lambda: f64) -> f64 {
    let n = a.dim();
    let rows: Vec<Vec<Complex>> = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| a.get(i, j) - if i == j { Complex::new(lambda, 0.0) } else { Complex::ZERO })
                .collect()
        })
        .collect();
    det(&rows).re
}

/// Roots of the characteristic polynomial located by a sign-change scan and
/// refined by bisection.
fn eigenvalues_by_scan(a: &ComplexMatrix) -> Vec<f64> {
    let bound = a.entries().iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt() + 1.0;
    let steps = 20_000;
    let h = 2.0 * bound / steps as f64;
    let mut roots = Vec::new();
    let mut x0 = -bound;
    let mut f0 = char_poly(a, x0);
    for k in 1..=steps {
        let x1 = -bound + k as f64 * h;
        let f1 = char_poly(a, x1);
        if f0 == 0.0 {
            roots.push(x0);
        } else if f0 * f1 < 0.0 {
            let (mut lo, mut hi, mut flo) = (x0, x1, f0);
            for _ in 0..100 {
                let mid = 0.5 * (lo + hi);
                let fm = char_poly(a, mid);
                if fm * flo <= 0.0 {
                    hi = mid;
                } else {
                    lo = mid;
                    flo = fm;
                }
            }
            roots.push(0.5 * (lo + hi));
        }
        x0 = x1;
        f0 = f1;
    }
    roots
}

#[test]
fn min_eigenvalue_matches_characteristic_polynomial_scan() {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    for _ in 0..100 {
        let a = random_hermitian(&mut rng, 4);
        let oracle = eigenvalues_by_scan(&a);
        assert_eq!(oracle.len(), 4, "expected four simple roots");
        let eig = a.eigenvalues_hermitian().unwrap();
        for (x, y) in eig.iter().zip(&oracle) {
            assert!((x - y).abs() < 1e-8, "{eig:?} vs {oracle:?}");
        }
        assert!((a.min_eigenvalue_hermitian().unwrap() - oracle[0]).abs() < 1e-8);
    }
}

#[test]
fn eigenvalues_reconstruct_trace_and_frobenius_norm() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for _ in 0..200 {
        let a = random_hermitian(&mut rng, 4);
        let eig = a.eigenvalues_hermitian().unwrap();
        assert!((eig.iter().sum::<f64>() - a.trace().re).abs() < 1e-12);
        let frob: f64 = a.entries().iter().map(|z| z.norm_sqr()).sum();
        assert!((eig.iter().map(|l| l * l).sum::<f64>() - frob).abs() < 1e-11);
    }
}

#[test]
fn degenerate_spectrum() {
    // Werner-like spectrum {1, 0, 0, 0} has a triple root the scan cannot see.
    let eig = bell_core::states::singlet_projector().eigenvalues_hermitian().unwrap();
    let expected = [0.0, 0.0, 0.0, 1.0];
    for (x, y) in eig.iter().zip(expected) {
        assert!((x - y).abs() < 1e-12);
    }
}

fn seeded() -> impl Strategy<Value = ChaCha8Rng> {
    any::<u64>().prop_map(ChaCha8Rng::seed_from_u64)
}

proptest! {
    #[test]
    fn tensor_product_trace_factorizes(mut rng in seeded()) {
        let a = random_hermitian(&mut rng, 2);
        let b = random_hermitian(&mut rng, 2);
        let t = a.tensor_product(&b).unwrap().trace();
        prop_assert!((t - a.trace() * b.trace()).norm() < 1e-12);
    }

    #[test]
    fn adjoint_is_an_involution(mut rng in seeded(), four in any::<bool>()) {
        let a = random_matrix(&mut rng, if four { 4 } else { 2 });
        prop_assert_eq!(a.adjoint().adjoint(), a);
    }

    #[test]
    fn matmul_is_associative(mut rng in seeded()) {
        let (a, b, c) = (random_matrix(&mut rng, 4), random_matrix(&mut rng, 4), random_matrix(&mut rng, 4));
        let left = a.matmul(&b).unwrap().matmul(&c).unwrap();
        let right = a.matmul(&b.matmul(&c).unwrap()).unwrap();
        prop_assert!(left.max_abs_diff(&right).unwrap() < 1e-12);
    }
}
