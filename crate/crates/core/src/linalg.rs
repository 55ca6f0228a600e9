//! Small dense linear algebra: cyclic Jacobi eigensolvers and helpers.
//!
//! Matrices here are tiny (4x4 covariance blocks) or moderate (Fock blocks up
//! to the truncation dimension), so the quadratically convergent Jacobi
//! iteration is both fast enough and accurate to a few ulps. Row-major
//! storage throughout; eigenvectors are returned column-wise.

use num_complex::Complex;

use crate::error::{domain, Error, Result};
use crate::scalar::Real;

const MAX_SWEEPS: usize = 64;

/// Eigenvalues (and optionally eigenvectors) of a real symmetric matrix.
/// `a` is destroyed. Eigenvector `k` is column `k` of the returned matrix.
pub(crate) fn sym_eigen<T: Real>(
    a: &mut [T],
    n: usize,
    mut vecs: Option<&mut [T]>,
) -> Result<Vec<T>> {
    debug_assert_eq!(a.len(), n * n);
    if let Some(v) = vecs.as_deref_mut() {
        debug_assert_eq!(v.len(), n * n);
        v.fill(T::zero());
        for i in 0..n {
            v[i * n + i] = T::one();
        }
    }
    if n == 1 {
        return Ok(vec![a[0]]);
    }

    let frob = a.iter().map(|x| *x * *x).sum::<T>().sqrt();
    let stop = frob * T::epsilon() * T::of_usize(n);

    for sweep in 0..MAX_SWEEPS {
        let mut off = T::zero();
        for p in 0..n {
            for q in (p + 1)..n {
                off = off + a[p * n + q] * a[p * n + q];
            }
        }
        let off = off.sqrt() * T::of(2.0).sqrt();
        if off <= stop || off == T::zero() {
            return Ok((0..n).map(|i| a[i * n + i]).collect());
        }
        // Skip tiny pivots early on so the first sweeps attack the bulk.
        let thresh = if sweep < 3 {
            off * T::of(0.2) / T::of_usize(n * n)
        } else {
            T::zero()
        };

        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a[p * n + q];
                if apq.abs() <= thresh {
                    continue;
                }
                let app = a[p * n + p];
                let aqq = a[q * n + q];
                // Rotation that annihilates a_pq (stable two-branch form).
                let theta = (aqq - app) / (T::of(2.0) * apq);
                let t = if theta.abs() > T::of(1e18) {
                    (T::of(2.0) * theta).recip()
                } else {
                    let sgn = if theta >= T::zero() { T::one() } else { -T::one() };
                    sgn / (theta.abs() + (T::one() + theta * theta).sqrt())
                };
                let c = (T::one() + t * t).sqrt().recip();
                let s = t * c;

                for k in 0..n {
                    if k == p || k == q {
                        continue;
                    }
                    let akp = a[k * n + p];
                    let akq = a[k * n + q];
                    let new_p = c * akp - s * akq;
                    let new_q = s * akp + c * akq;
                    a[k * n + p] = new_p;
                    a[p * n + k] = new_p;
                    a[k * n + q] = new_q;
                    a[q * n + k] = new_q;
                }
                a[p * n + p] = app - t * apq;
                a[q * n + q] = aqq + t * apq;
                a[p * n + q] = T::zero();
                a[q * n + p] = T::zero();

                if let Some(v) = vecs.as_deref_mut() {
                    for k in 0..n {
                        let vkp = v[k * n + p];
                        let vkq = v[k * n + q];
                        v[k * n + p] = c * vkp - s * vkq;
                        v[k * n + q] = s * vkp + c * vkq;
                    }
                }
            }
        }
    }
    Err(Error::Internal(format!(
        "Jacobi eigensolve failed to converge for a {n}x{n} symmetric matrix"
    )))
}

/// Eigenvalues of a complex Hermitian matrix (values only). `a` is destroyed.
pub(crate) fn herm_eigenvalues<T: Real>(a: &mut [Complex<T>], n: usize) -> Result<Vec<T>> {
    debug_assert_eq!(a.len(), n * n);
    if n == 1 {
        return Ok(vec![a[0].re]);
    }

    let frob = a.iter().map(|x| x.norm_sqr()).sum::<T>().sqrt();
    let stop = frob * T::epsilon() * T::of_usize(n);

    for sweep in 0..MAX_SWEEPS {
        let mut off = T::zero();
        for p in 0..n {
            for q in (p + 1)..n {
                off = off + a[p * n + q].norm_sqr();
            }
        }
        let off = off.sqrt() * T::of(2.0).sqrt();
        if off <= stop || off == T::zero() {
            return Ok((0..n).map(|i| a[i * n + i].re).collect());
        }
        let thresh = if sweep < 3 {
            off * T::of(0.2) / T::of_usize(n * n)
        } else {
            T::zero()
        };

        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a[p * n + q];
                let mag = apq.norm_sqr().sqrt();
                if mag <= thresh || mag == T::zero() {
                    continue;
                }
                // Factor out the phase so the pivot reduces to the real case:
                // with a_pq = |a_pq| e^{i phi}, rotate in the (p, q e^{i phi})
                // frame by the classic symmetric-Jacobi angle.
                let phase = apq / Complex::new(mag, T::zero());
                let app = a[p * n + p].re;
                let aqq = a[q * n + q].re;
                let theta = (aqq - app) / (T::of(2.0) * mag);
                let t = if theta.abs() > T::of(1e18) {
                    (T::of(2.0) * theta).recip()
                } else {
                    let sgn = if theta >= T::zero() { T::one() } else { -T::one() };
                    sgn / (theta.abs() + (T::one() + theta * theta).sqrt())
                };
                let c = (T::one() + t * t).sqrt().recip();
                let s = t * c;
                let s_pos = phase * Complex::new(s, T::zero()); // multiplies column q into p
                let s_neg = phase.conj() * Complex::new(s, T::zero());

                for k in 0..n {
                    if k == p || k == q {
                        continue;
                    }
                    let akp = a[k * n + p];
                    let akq = a[k * n + q];
                    let new_p = akp * c + akq * s_neg;
                    let new_q = akq * c - akp * s_pos;
                    a[k * n + p] = new_p;
                    a[p * n + k] = new_p.conj();
                    a[k * n + q] = new_q;
                    a[q * n + k] = new_q.conj();
                }
                let app_new = c * c * app + T::of(2.0) * c * s * mag + s * s * aqq;
                let aqq_new = s * s * app - T::of(2.0) * c * s * mag + c * c * aqq;
                a[p * n + p] = Complex::new(app_new, T::zero());
                a[q * n + q] = Complex::new(aqq_new, T::zero());
                a[p * n + q] = Complex::new(T::zero(), T::zero());
                a[q * n + p] = Complex::new(T::zero(), T::zero());
            }
        }
    }
    Err(Error::Internal(format!(
        "Jacobi eigensolve failed to converge for a {n}x{n} Hermitian matrix"
    )))
}

/// Connected components of the nonzero pattern of a Hermitian matrix.
/// Operators with a photon-number selection rule split into many small
/// blocks; solving them independently is still a dense eigensolve per block.
pub(crate) fn connected_components<T: Real>(a: &[Complex<T>], n: usize) -> Vec<Vec<usize>> {
    let mut seen = vec![false; n];
    let mut components = Vec::new();
    let mut stack = Vec::new();
    for start in 0..n {
        if seen[start] {
            continue;
        }
        let mut comp = Vec::new();
        seen[start] = true;
        stack.push(start);
        while let Some(i) = stack.pop() {
            comp.push(i);
            for j in 0..n {
                if !seen[j] && !(a[i * n + j].re == T::zero() && a[i * n + j].im == T::zero()) {
                    seen[j] = true;
                    stack.push(j);
                }
            }
        }
        comp.sort_unstable();
        components.push(comp);
    }
    components
}

// ---------------------------------------------------------------------------
// Fixed 4x4 real helpers for the covariance algebra.

pub(crate) type Mat4<T> = [[T; 4]; 4];

pub(crate) fn mat4_identity<T: Real>() -> Mat4<T> {
    let mut m = [[T::zero(); 4]; 4];
    for i in 0..4 {
        m[i][i] = T::one();
    }
    m
}

pub(crate) fn mat4_mul<T: Real>(a: &Mat4<T>, b: &Mat4<T>) -> Mat4<T> {
    let mut out = [[T::zero(); 4]; 4];
    for i in 0..4 {
        for k in 0..4 {
            let aik = a[i][k];
            for j in 0..4 {
                out[i][j] = out[i][j] + aik * b[k][j];
            }
        }
    }
    out
}

pub(crate) fn mat4_transpose<T: Real>(a: &Mat4<T>) -> Mat4<T> {
    let mut out = [[T::zero(); 4]; 4];
    for i in 0..4 {
        for j in 0..4 {
            out[i][j] = a[j][i];
        }
    }
    out
}

pub(crate) fn mat4_max_abs_diff<T: Real>(a: &Mat4<T>, b: &Mat4<T>) -> T {
    let mut worst = T::zero();
    for i in 0..4 {
        for j in 0..4 {
            worst = worst.max((a[i][j] - b[i][j]).abs());
        }
    }
    worst
}

pub(crate) fn mat4_max_abs<T: Real>(a: &Mat4<T>) -> T {
    let mut worst = T::zero();
    for row in a {
        for x in row {
            worst = worst.max(x.abs());
        }
    }
    worst
}

/// Determinant by cofactor expansion; exact enough for 4x4 symplectic checks.
pub(crate) fn mat4_det<T: Real>(m: &Mat4<T>) -> T {
    let det3 = |a: T, b: T, c: T, d: T, e: T, f: T, g: T, h: T, i: T| {
        a * (e * i - f * h) - b * (d * i - f * g) + c * (d * h - e * g)
    };
    let mut det = T::zero();
    for col in 0..4 {
        let mut sub = [T::zero(); 9];
        let mut idx = 0;
        for r in 1..4 {
            for c in 0..4 {
                if c == col {
                    continue;
                }
                sub[idx] = m[r][c];
                idx += 1;
            }
        }
        let minor = det3(
            sub[0], sub[1], sub[2], sub[3], sub[4], sub[5], sub[6], sub[7], sub[8],
        );
        let signed = if col % 2 == 0 { minor } else { -minor };
        det = det + m[0][col] * signed;
    }
    det
}

/// Symmetric positive-definite square root of a 4x4 matrix.
pub(crate) fn sym4_sqrt<T: Real>(m: &Mat4<T>) -> Result<Mat4<T>> {
    let mut flat = [T::zero(); 16];
    for i in 0..4 {
        for j in 0..4 {
            flat[i * 4 + j] = m[i][j];
        }
    }
    let mut vecs = [T::zero(); 16];
    let vals = sym_eigen(&mut flat, 4, Some(&mut vecs))?;
    for (k, v) in vals.iter().enumerate() {
        if *v <= T::zero() {
            return Err(domain(format!(
                "matrix is not positive definite (eigenvalue {k} = {v})"
            )));
        }
    }
    let mut out = [[T::zero(); 4]; 4];
    for i in 0..4 {
        for j in 0..4 {
            let mut acc = T::zero();
            for k in 0..4 {
                acc = acc + vecs[i * 4 + k] * vals[k].sqrt() * vecs[j * 4 + k];
            }
            out[i][j] = acc;
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn jacobi_matches_hand_solved_2x2() {
        // [[2, 1], [1, 2]] has eigenvalues 1 and 3.
        let mut a = vec![2.0, 1.0, 1.0, 2.0];
        let mut v = vec![0.0; 4];
        let mut vals = sym_eigen(&mut a, 2, Some(&mut v)).unwrap();
        vals.sort_by(|x, y| x.partial_cmp(y).unwrap());
        assert_abs_diff_eq!(vals[0], 1.0, epsilon = 1e-14);
        assert_abs_diff_eq!(vals[1], 3.0, epsilon = 1e-14);
    }

    #[test]
    fn jacobi_reconstructs_random_symmetric() {
        // Deterministic pseudo-random symmetric 8x8; check V D V^T == A.
        let n = 8;
        let mut a = vec![0.0f64; n * n];
        let mut state = 0x9e3779b97f4a7c15u64;
        let mut next = || {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1);
            ((state >> 11) as f64) / ((1u64 << 53) as f64) - 0.5
        };
        for i in 0..n {
            for j in 0..=i {
                let x = next();
                a[i * n + j] = x;
                a[j * n + i] = x;
            }
        }
        let orig = a.clone();
        let mut v = vec![0.0f64; n * n];
        let vals = sym_eigen(&mut a, n, Some(&mut v)).unwrap();
        for i in 0..n {
            for j in 0..n {
                let mut acc = 0.0;
                for k in 0..n {
                    acc += v[i * n + k] * vals[k] * v[j * n + k];
                }
                assert_abs_diff_eq!(acc, orig[i * n + j], epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn hermitian_eigenvalues_match_real_case_and_phase_invariance() {
        // Pauli-like [[1, i], [-i, 1]] has eigenvalues 0 and 2.
        let i = Complex::new(0.0, 1.0);
        let one = Complex::new(1.0, 0.0);
        let mut a = vec![one, i, -i, one];
        let mut vals = herm_eigenvalues(&mut a, 2).unwrap();
        vals.sort_by(|x, y| x.partial_cmp(y).unwrap());
        assert_abs_diff_eq!(vals[0], 0.0, epsilon = 1e-14);
        assert_abs_diff_eq!(vals[1], 2.0, epsilon = 1e-14);
    }

    #[test]
    fn components_split_a_block_pattern() {
        let z = Complex::new(0.0, 0.0);
        let o = Complex::new(1.0, 0.0);
        // indices {0,2} coupled, {1,3} coupled
        let a = vec![o, z, o, z, z, o, z, o, o, z, o, z, z, o, z, o];
        let comps = connected_components(&a, 4);
        assert_eq!(comps, vec![vec![0, 2], vec![1, 3]]);
    }

    #[test]
    fn det4_of_identity_and_scaled() {
        let id = mat4_identity::<f64>();
        assert_abs_diff_eq!(mat4_det(&id), 1.0, epsilon = 1e-15);
        let mut two = id;
        for i in 0..4 {
            two[i][i] = 2.0;
        }
        assert_abs_diff_eq!(mat4_det(&two), 16.0, epsilon = 1e-12);
    }

    #[test]
    fn sqrt_squares_back() {
        let m = [
            [4.0, 1.0, 0.0, 0.5],
            [1.0, 3.0, 0.2, 0.0],
            [0.0, 0.2, 2.0, 0.1],
            [0.5, 0.0, 0.1, 5.0],
        ];
        let r = sym4_sqrt(&m).unwrap();
        let sq = mat4_mul(&r, &r);
        assert!(mat4_max_abs_diff(&sq, &m) < 1e-12);
    }
}
