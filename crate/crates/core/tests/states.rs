use bell_core::linalg::{identity2, pauli_x, pauli_y, pauli_z};
use bell_core::states::{make_singlet, validate, werner, werner_matrix, Visibility};
use proptest::prelude::*;

fn werner_spectrum(p: f64) -> [f64; 4] {
    let low = (1.0 - p) / 4.0;
    let mut s = [(1.0 + 3.0 * p) / 4.0, low, low, low];
    s.sort_by(f64::total_cmp);
    s
}

proptest! {
    #[test]
    fn werner_states_in_range_are_valid(p in -1.0f64 / 3.0..=1.0) {
        let rho = werner(p).unwrap();
        prop_assert!(validate(rho.matrix()).is_valid());
    }

    #[test]
    fn werner_spectrum_matches_closed_form(p in -1.0f64 / 3.0..=1.0) {
        let rho = werner(p).unwrap();
        let eig = rho.matrix().eigenvalues_hermitian().unwrap();
        for (x, y) in eig.iter().zip(werner_spectrum(p)) {
            prop_assert!((x - y).abs() < 1e-10);
        }
        // Independent of the solver: trace and Tr ρ² fix the two distinct eigenvalues.
        let purity = rho.purity();
        let expected: f64 = werner_spectrum(p).iter().map(|l| l * l).sum();
        prop_assert!((purity - expected).abs() < 1e-12);
        prop_assert!((rho.matrix().min_eigenvalue_hermitian().unwrap() - werner_spectrum(p)[0]).abs() < 1e-10);
    }

    #[test]
    fn out_of_range_visibility_rejected(p in prop_oneof![-10.0f64..-0.3334, 1.0001f64..10.0]) {
        prop_assert!(Visibility::new(p).is_err());
        prop_assert!(!validate(&werner_matrix(p)).is_valid());
    }
}

#[test]
fn singlet_reduced_states_are_maximally_mixed() {
    let rho = make_singlet();
    for x in [pauli_x(), pauli_y(), pauli_z()] {
        let op = x.tensor_product(&identity2()).unwrap();
        assert!(rho.matrix().trace_of_product(&op).unwrap().norm() < 1e-15);
    }
}
