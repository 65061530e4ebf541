//! Nelder–Mead downhill simplex minimization.

use std::cell::Cell;

use serde::Serialize;

/// Settings for [`NelderMead::minimize`].
#[derive(Clone, Debug)]
pub struct NelderMead {
    /// Stop once `f_worst - f_best <= ftol_rel * (|f_best| + |f_worst|) / 2`.
    pub ftol_rel: f64,
    /// Absolute floor on the same spread, for minima at zero.
    pub ftol_abs: f64,
    pub max_evaluations: usize,
}

impl Default for NelderMead {
    fn default() -> Self {
        Self {
            ftol_rel: 1e-8,
            ftol_abs: 1e-14,
            max_evaluations: 20_000,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Minimum {
    pub x: Vec<f64>,
    pub value: f64,
    pub iterations: usize,
    pub evaluations: usize,
    pub converged: bool,
}

const REFLECT: f64 = 1.0;
const EXPAND: f64 = 2.0;
const CONTRACT: f64 = 0.5;
const SHRINK: f64 = 0.5;

impl NelderMead {
    /// Minimizes `f` from the simplex `x0, x0 + steps[i]·e_i`.
    pub fn minimize<F>(&self, mut f: F, x0: &[f64], steps: &[f64]) -> Minimum
    where
        F: FnMut(&[f64]) -> f64,
    {
        let n = x0.len();
        assert!(n >= 1 && steps.len() == n, "one step per coordinate");

        let evaluations = Cell::new(0);
        let mut eval = |x: &[f64]| {
            evaluations.set(evaluations.get() + 1);
            f(x)
        };

        let mut simplex: Vec<(Vec<f64>, f64)> = Vec::with_capacity(n + 1);
        simplex.push((x0.to_vec(), eval(x0)));
        for (i, step) in steps.iter().enumerate() {
            let mut x = x0.to_vec();
            x[i] += step;
            let fx = eval(&x);
            simplex.push((x, fx));
        }

        let mut iterations = 0;
        let mut converged = false;
        loop {
            simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
            let best = simplex[0].1;
            let worst = simplex[n].1;
            let spread = worst - best;
            if spread <= self.ftol_rel * 0.5 * (best.abs() + worst.abs()) || spread <= self.ftol_abs
            {
                converged = true;
                break;
            }
            if evaluations.get() >= self.max_evaluations {
                break;
            }
            iterations += 1;

            let mut centroid = vec![0.0; n];
            for (x, _) in &simplex[..n] {
                for (c, xi) in centroid.iter_mut().zip(x) {
                    *c += xi / n as f64;
                }
            }
            let along = |t: f64| -> Vec<f64> {
                centroid
                    .iter()
                    .zip(&simplex[n].0)
                    .map(|(c, w)| c + t * (c - w))
                    .collect()
            };

            let xr = along(REFLECT);
            let fr = eval(&xr);
            if fr < simplex[0].1 {
                let xe = along(EXPAND);
                let fe = eval(&xe);
                simplex[n] = if fe < fr { (xe, fe) } else { (xr, fr) };
                continue;
            }
            if fr < simplex[n - 1].1 {
                simplex[n] = (xr, fr);
                continue;
            }
            let (xc, fc) = if fr < simplex[n].1 {
                let xc = along(CONTRACT);
                let fc = eval(&xc);
                (xc, fc)
            } else {
                let xc = along(-CONTRACT);
                let fc = eval(&xc);
                (xc, fc)
            };
            if fc < fr.min(simplex[n].1) {
                simplex[n] = (xc, fc);
                continue;
            }
            let x_best = simplex[0].0.clone();
            for vertex in simplex.iter_mut().skip(1) {
                for (xi, bi) in vertex.0.iter_mut().zip(&x_best) {
                    *xi = bi + SHRINK * (*xi - bi);
                }
                vertex.1 = eval(&vertex.0);
            }
        }

        let (x, value) = simplex.swap_remove(0);
        Minimum {
            x,
            value,
            iterations,
            evaluations: evaluations.get(),
            converged,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quadratic_bowl() {
        let m = NelderMead::default().minimize(
            |x| (x[0] - 1.0).powi(2) + 3.0 * (x[1] + 2.0).powi(2) + 1.0,
            &[0.0, 0.0],
            &[0.5, 0.5],
        );
        assert!(m.converged);
        assert!((m.value - 1.0).abs() < 1e-8);
        assert!((m.x[0] - 1.0).abs() < 1e-3 && (m.x[1] + 2.0).abs() < 1e-3);
    }

    #[test]
    fn rosenbrock() {
        let nm = NelderMead {
            ftol_rel: 1e-14,
            ftol_abs: 1e-20,
            max_evaluations: 50_000,
        };
        let m = nm.minimize(
            |x| 100.0 * (x[1] - x[0] * x[0]).powi(2) + (1.0 - x[0]).powi(2),
            &[-1.2, 1.0],
            &[0.1, 0.1],
        );
        assert!(m.value < 1e-10, "{m:?}");
    }

    #[test]
    fn respects_evaluation_budget() {
        let nm = NelderMead {
            max_evaluations: 10,
            ..NelderMead::default()
        };
        let m = nm.minimize(|x| x.iter().map(|v| v.sin()).sum(), &[0.3; 4], &[1.0; 4]);
        assert!(!m.converged);
        assert!(m.evaluations < 10 + 4 + 2);
    }
}
