//! Gauss-Laguerre quadrature for integrals of the form
//! `\int_0^\infty f(x) e^{-x} dx ~= sum_k w_k f(x_k)`.
//!
//! Nodes are the roots of the Laguerre polynomial `L_n`, located by Newton
//! iteration from the classical spacing estimates; weights follow from the
//! derivative at the root, `w_k = 1 / (x_k * L_n'(x_k)^2)`. The recurrence
//! is evaluated in the exponentially scaled form `L~_k(x) = L_k(x) e^{-x/2}`
//! so that nothing overflows and — crucially — far-tail weights come out
//! with small *relative* error. (An eigenvalue-based construction puts an
//! absolute error floor under the exponentially small weights, which is
//! fatal for integrands that grow toward the tail before their weight
//! suppression, as the truncated Fock mixtures here do.)
//!
//! An n-point rule integrates polynomials of degree up to 2n-1 exactly,
//! which is what makes it the right tool for the Gaussian-weighted radial
//! integrals in this crate: truncated Fock expansions are polynomials in
//! the radial variable.

use crate::error::{usage, Error, Result};
use crate::scalar::Real;

/// An n-point Gauss-Laguerre rule (weight function `e^{-x}` on `[0, inf)`),
/// nodes sorted ascending.
#[derive(Debug, Clone)]
pub(crate) struct GaussLaguerre<T> {
    pub nodes: Vec<T>,
    pub weights: Vec<T>,
}

/// Scaled Laguerre values `(L~_n(x), L~_{n-1}(x))` with
/// `L~_k = L_k e^{-x/2}`, via the three-term recurrence
/// `(k+1) L_{k+1} = (2k+1-x) L_k - k L_{k-1}` (scaling is per-`x`, so the
/// recurrence is unchanged).
fn scaled_laguerre_pair<T: Real>(n: usize, x: T) -> (T, T) {
    let mut pm = T::zero(); // L~_{k-1}
    let mut p = (-x / T::of(2.0)).exp(); // L~_0
    for k in 0..n {
        let kf = T::of_usize(k);
        let next = ((T::of_usize(2 * k + 1) - x) * p - kf * pm) / (kf + T::one());
        pm = p;
        p = next;
    }
    (p, pm)
}

impl<T: Real> GaussLaguerre<T> {
    pub(crate) fn new(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(usage("quadrature rule needs at least one node"));
        }
        let nf = T::of_usize(n);
        let tol = T::epsilon() * T::of(16.0);
        let max_newton = 60;

        let mut nodes = Vec::with_capacity(n);
        let mut weights = Vec::with_capacity(n);
        let mut z = T::zero();
        for k in 0..n {
            // Classical initial guesses for the k-th smallest root.
            z = match k {
                0 => T::of(3.0) / (T::one() + T::of(2.4) * nf),
                1 => z + T::of(15.0) / (T::one() + T::of(2.5) * nf),
                _ => {
                    let ai = T::of_usize(k - 1);
                    z + (T::one() + T::of(2.55) * ai) / (T::of(1.9) * ai)
                        * (z - nodes[k - 2])
                }
            };
            let mut converged = false;
            let mut prev_step = T::infinity();
            for it in 0..max_newton {
                let (p, pm) = scaled_laguerre_pair(n, z);
                // L_n'(x) = n (L_n - L_{n-1}) / x, same relation for the
                // scaled values.
                let dp = nf * (p - pm) / z;
                if dp == T::zero() {
                    break;
                }
                let step = p / dp;
                z = z - step;
                let sa = step.abs();
                if sa <= tol * z.abs() {
                    converged = true;
                    break;
                }
                // Once the residual hits the recurrence's rounding floor the
                // steps stop shrinking and oscillate; accept that point.
                if it >= 3 && sa >= prev_step {
                    converged = true;
                    break;
                }
                prev_step = sa;
            }
            if !(converged && z.is_finite() && z > T::zero()) {
                return Err(Error::Internal(format!(
                    "Laguerre root {k} of {n} failed to converge"
                )));
            }
            let (p, pm) = scaled_laguerre_pair(n, z);
            // At a root p ~ 0, so L~' = n (p - pm) / z is cancellation-free.
            let dp = nf * (p - pm) / z;
            // w = 1 / (x L_n'(x)^2); in scaled terms the e^{-x} rejoins the
            // derivative, keeping the relative error small even where the
            // weight is exponentially tiny. Far-tail underflow to zero is
            // benign (the node just drops out).
            let w = (-z).exp() / (z * dp * dp);
            if !(w.is_finite() && w >= T::zero()) {
                return Err(Error::Internal(format!(
                    "Laguerre weight {k} of {n} is not finite"
                )));
            }
            nodes.push(z);
            weights.push(w);
        }
        Ok(Self { nodes, weights })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::{assert_abs_diff_eq, assert_relative_eq};

    #[test]
    fn two_point_rule_is_the_textbook_one() {
        // Nodes 2 -+ sqrt(2), weights (2 +- sqrt(2))/4.
        let rule = GaussLaguerre::<f64>::new(2).unwrap();
        let s = 2.0f64.sqrt();
        assert_abs_diff_eq!(rule.nodes[0], 2.0 - s, epsilon = 1e-14);
        assert_abs_diff_eq!(rule.nodes[1], 2.0 + s, epsilon = 1e-14);
        assert_abs_diff_eq!(rule.weights[0], (2.0 + s) / 4.0, epsilon = 1e-14);
        assert_abs_diff_eq!(rule.weights[1], (2.0 - s) / 4.0, epsilon = 1e-14);
    }

    #[test]
    fn moments_are_exact_up_to_degree_2n_minus_1() {
        // \int x^k e^{-x} dx = k!; a 12-point rule must nail k <= 23.
        let rule = GaussLaguerre::<f64>::new(12).unwrap();
        let mut factorial = 1.0f64;
        for k in 0..=23usize {
            if k > 0 {
                factorial *= k as f64;
            }
            let approx: f64 = rule
                .nodes
                .iter()
                .zip(&rule.weights)
                .map(|(x, w)| w * x.powi(k as i32))
                .sum();
            assert_abs_diff_eq!(approx / factorial, 1.0, epsilon = 1e-10);
        }
    }

    #[test]
    fn large_rules_stay_finite_and_normalized() {
        for n in [80usize, 200] {
            let rule = GaussLaguerre::<f64>::new(n).unwrap();
            assert!(rule.nodes.iter().all(|x| x.is_finite() && *x > 0.0));
            assert!(rule.weights.iter().all(|w| w.is_finite() && *w >= 0.0));
            assert!(rule.nodes.windows(2).all(|p| p[0] < p[1]));
            let mass: f64 = rule.weights.iter().sum();
            assert_abs_diff_eq!(mass, 1.0, epsilon = 1e-12);
            // Geometric check: \int e^{-2x} dx = 1/2 with f = e^{-x}.
            let half: f64 = rule
                .nodes
                .iter()
                .zip(&rule.weights)
                .map(|(x, w)| w * (-x).exp())
                .sum();
            assert_abs_diff_eq!(half, 0.5, epsilon = 1e-9);
        }
    }

    #[test]
    fn tail_weights_have_relative_accuracy() {
        // The far weights must track e^{-x} down to the underflow floor, not
        // sit on an absolute-error plateau: check the largest node against
        // the analytic one-term bound w_k < x_k e^{-x_k} (loose but
        // exponentially falling), and check a tail-weighted growing moment.
        let rule = GaussLaguerre::<f64>::new(60).unwrap();
        let last = rule.nodes.len() - 1;
        let x = rule.nodes[last];
        let w = rule.weights[last];
        assert!(x > 200.0);
        assert!(w > 0.0 && w < x * (-x).exp() * 1e6);
        // sum w_k e^{x_k/2} = \int e^{-x/2} = 2 requires relative tail
        // accuracy; junk-floor weights blow it up by many orders.
        let grow: f64 = rule
            .nodes
            .iter()
            .zip(&rule.weights)
            .map(|(x, w)| w * (x / 2.0).exp())
            .sum();
        assert_relative_eq!(grow, 2.0, epsilon = 1e-6);
    }
}
