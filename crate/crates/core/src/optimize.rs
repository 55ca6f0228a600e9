//! One-dimensional maximization: coarse grid scan followed by
//! golden-section refinement.
//!
//! Every optimization in this crate is a smooth scalar function on a known
//! interval whose optimum may sit at an interior stationary point or at an
//! endpoint. A grid scan localizes the best bracket (robust against
//! multiple local optima), and golden-section polishes it to tolerance.

use crate::scalar::Real;

/// Golden-section search for the maximum of `f` on `[lo, hi]`.
/// Returns `(argmax, max)`. Assumes `f` is unimodal on the bracket.
pub(crate) fn golden_max<T: Real, F: Fn(T) -> T>(f: &F, lo: T, hi: T, tol: T) -> (T, T) {
    debug_assert!(lo <= hi);
    // inv_phi = (sqrt(5) - 1) / 2
    let inv_phi = (T::of(5.0).sqrt() - T::one()) / T::of(2.0);
    let mut a = lo;
    let mut b = hi;
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let mut fc = f(c);
    let mut fd = f(d);
    while (b - a).abs() > tol {
        if fc >= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d);
        }
    }
    let mid = (a + b) / T::of(2.0);
    (mid, f(mid))
}

/// Maximum of `f` on `[lo, hi]`: scan `grid_n` equally spaced points to find
/// the best bracket, then golden-section within it. Handles endpoints and
/// non-unimodal `f` (as long as the grid resolves the global basin).
pub(crate) fn grid_refine_max<T: Real, F: Fn(T) -> T>(
    f: &F,
    lo: T,
    hi: T,
    grid_n: usize,
    tol: T,
) -> (T, T) {
    debug_assert!(grid_n >= 2);
    if !(hi > lo) {
        return (lo, f(lo));
    }
    let step = (hi - lo) / T::of_usize(grid_n - 1);
    let mut best_i = 0usize;
    let mut best_v = T::neg_infinity();
    let mut best_x = lo;
    for i in 0..grid_n {
        let x = if i + 1 == grid_n { hi } else { lo + step * T::of_usize(i) };
        let v = f(x);
        if v > best_v {
            best_v = v;
            best_i = i;
            best_x = x;
        }
    }
    let bl = if best_i == 0 { lo } else { lo + step * T::of_usize(best_i - 1) };
    let bh = if best_i + 1 >= grid_n {
        hi
    } else {
        lo + step * T::of_usize(best_i + 1)
    };
    let (x, v) = golden_max(f, bl, bh, tol);
    if v >= best_v {
        (x, v)
    } else {
        (best_x, best_v) // refinement can only lose if f is pathological; keep the grid best
    }
}

/// Minimum of `f` on `[lo, hi]` via the maximization path on `-f`.
pub(crate) fn grid_refine_min<T: Real, F: Fn(T) -> T>(
    f: &F,
    lo: T,
    hi: T,
    grid_n: usize,
    tol: T,
) -> (T, T) {
    let neg = |x: T| -f(x);
    let (x, v) = grid_refine_max(&neg, lo, hi, grid_n, tol);
    (x, -v)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn finds_interior_maximum_of_a_parabola() {
        let f = |x: f64| -(x - 0.3).powi(2) + 2.0;
        let (x, v) = grid_refine_max(&f, -1.0, 1.0, 33, 1e-12);
        // Near a quadratic optimum the argmax is only locatable to about
        // sqrt(machine eps): comparisons lose resolution once the function
        // is flat to rounding. The value itself is quadratically tighter.
        assert_abs_diff_eq!(x, 0.3, epsilon = 1e-7);
        assert_abs_diff_eq!(v, 2.0, epsilon = 1e-15);
    }

    #[test]
    fn finds_endpoint_maximum() {
        let f = |x: f64| 3.0 * x;
        let (x, v) = grid_refine_max(&f, 0.0, 2.0, 17, 1e-12);
        assert_abs_diff_eq!(x, 2.0, epsilon = 1e-9);
        assert_abs_diff_eq!(v, 6.0, epsilon = 1e-8);
    }

    #[test]
    fn grid_rescues_a_two_basin_function() {
        // Two local maxima; the global one at x = 2.7 is narrow.
        let f = |x: f64| (-(x - 0.4).powi(2)).exp() + 1.5 * (-30.0 * (x - 2.7).powi(2)).exp();
        let (x, _) = grid_refine_max(&f, 0.0, 3.0, 64, 1e-12);
        // The broad component's tail shifts the true maximum slightly left
        // of the narrow basin's center.
        assert_abs_diff_eq!(x, 2.6997420319, epsilon = 1e-6);
    }

    #[test]
    fn min_variant_finds_the_valley() {
        let f = |x: f64| (x - 1.25).powi(2) + 0.5;
        let (x, v) = grid_refine_min(&f, 0.0, 3.0, 32, 1e-12);
        assert_abs_diff_eq!(x, 1.25, epsilon = 1e-7);
        assert_abs_diff_eq!(v, 0.5, epsilon = 1e-15);
    }
}
