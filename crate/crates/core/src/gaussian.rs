//! Two-mode Gaussian covariance algebra.
//!
//! Everything here operates on 4x4 real covariance matrices over the
//! quadrature ordering `(x_A, p_A, x_B, p_B)`, with the vacuum normalized to
//! the identity. The central objects are Gaussian coherent-state mixtures
//! parameterized by an inverse width `s` and a second-mode amplitude scale
//! `kappa`: the module builds their covariance matrices, computes symplectic
//! (Williamson) eigenvalues both generically and in closed form, and produces
//! the symplectic transform — a two-mode squeezer or a beamsplitter — that
//! diagonalizes each family into a product of thermal states.

use crate::error::{domain, usage, Error, Result};
use crate::linalg::{
    mat4_det, mat4_identity, mat4_max_abs, mat4_max_abs_diff, mat4_mul, mat4_transpose, sym4_sqrt,
    sym_eigen, Mat4,
};
use crate::optimize::grid_refine_min;
use crate::scalar::Real;

/// Absolute slack allowed when checking physicality conditions such as
/// `nu >= 1`; covers dense-eigensolver noise.
const PHYSICALITY_SLACK: f64 = 1e-10;

// ---------------------------------------------------------------------------
// Types

/// 4x4 real symmetric second-moment matrix of a two-mode Gaussian operator,
/// quadrature ordering `(x_A, p_A, x_B, p_B)`, vacuum variance = 1.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CovarianceMatrix<T> {
    entries: Mat4<T>,
}

impl<T: Real> CovarianceMatrix<T> {
    /// Validates symmetry (to machine precision, relative to the largest
    /// entry) and positive definiteness.
    pub fn new(entries: [[T; 4]; 4]) -> Result<Self> {
        for row in &entries {
            for x in row {
                if !x.is_finite() {
                    return Err(domain("covariance matrix entries must be finite"));
                }
            }
        }
        let scale = mat4_max_abs(&entries).max(T::one());
        let tol = T::validation_eps(1e-12) * scale;
        for i in 0..4 {
            for j in (i + 1)..4 {
                if (entries[i][j] - entries[j][i]).abs() > tol {
                    return Err(domain(format!(
                        "covariance matrix is not symmetric at ({i},{j})"
                    )));
                }
            }
        }
        let mut flat = [T::zero(); 16];
        for i in 0..4 {
            for j in 0..4 {
                flat[i * 4 + j] = entries[i][j];
            }
        }
        let vals = sym_eigen(&mut flat, 4, None)?;
        if vals.iter().any(|v| *v <= T::zero()) {
            return Err(domain("covariance matrix is not positive definite"));
        }
        Ok(Self { entries })
    }

    pub(crate) fn from_entries_unchecked(entries: Mat4<T>) -> Self {
        Self { entries }
    }

    pub fn entries(&self) -> &[[T; 4]; 4] {
        &self.entries
    }

    /// Congruence transform `S gamma S^T` (how covariance matrices move under
    /// a symplectic transformation of the quadratures). The result is
    /// re-symmetrized to remove floating-point asymmetry.
    pub fn transformed_by(&self, s: &SymplecticMatrix<T>) -> CovarianceMatrix<T> {
        let st = mat4_transpose(&s.entries);
        let mut m = mat4_mul(&mat4_mul(&s.entries, &self.entries), &st);
        for i in 0..4 {
            for j in (i + 1)..4 {
                let avg = (m[i][j] + m[j][i]) / T::of(2.0);
                m[i][j] = avg;
                m[j][i] = avg;
            }
        }
        CovarianceMatrix::from_entries_unchecked(m)
    }

    /// Largest absolute entry; useful as a scale for residual tolerances.
    pub fn max_abs(&self) -> T {
        mat4_max_abs(&self.entries)
    }
}

/// The standard symplectic form `Omega = diag([[0,1],[-1,0]], [[0,1],[-1,0]])`
/// encoding the canonical commutation relations in the `(x, p)` ordering.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SymplecticForm<T> {
    entries: Mat4<T>,
}

impl<T: Real> SymplecticForm<T> {
    pub fn standard() -> Self {
        let mut m = [[T::zero(); 4]; 4];
        m[0][1] = T::one();
        m[1][0] = -T::one();
        m[2][3] = T::one();
        m[3][2] = -T::one();
        Self { entries: m }
    }

    pub fn entries(&self) -> &[[T; 4]; 4] {
        &self.entries
    }
}

/// A 4x4 real matrix `S` satisfying `S Omega S^T = Omega`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SymplecticMatrix<T> {
    entries: Mat4<T>,
}

impl<T: Real> SymplecticMatrix<T> {
    /// Validates the symplectic invariant within machine tolerance (scaled by
    /// the squared magnitude of the matrix, which is how the defect grows).
    pub fn new(entries: [[T; 4]; 4]) -> Result<Self> {
        let candidate = Self { entries };
        let scale = mat4_max_abs(&entries).max(T::one());
        let tol = T::validation_eps(1e-12) * scale * scale;
        if candidate.symplectic_defect() > tol {
            return Err(domain("matrix does not preserve the symplectic form"));
        }
        Ok(candidate)
    }

    pub(crate) fn from_entries_unchecked(entries: Mat4<T>) -> Self {
        Self { entries }
    }

    pub fn entries(&self) -> &[[T; 4]; 4] {
        &self.entries
    }

    /// Max-entry distance of `S Omega S^T` from `Omega`.
    pub fn symplectic_defect(&self) -> T {
        let omega = SymplecticForm::standard().entries;
        let st = mat4_transpose(&self.entries);
        let got = mat4_mul(&mat4_mul(&self.entries, &omega), &st);
        mat4_max_abs_diff(&got, &omega)
    }

    /// Matrix product `self * other` (apply `other` first).
    pub fn compose(&self, other: &SymplecticMatrix<T>) -> SymplecticMatrix<T> {
        SymplecticMatrix::from_entries_unchecked(mat4_mul(&self.entries, &other.entries))
    }
}

/// Result of diagonalizing a two-mode covariance matrix into a product of
/// thermal states: `diagonalizer * gamma * diagonalizer^T =
/// diag(nu_plus, nu_plus, nu_minus, nu_minus)` with mode A carrying the
/// larger eigenvalue.
#[derive(Debug, Clone)]
pub struct ThermalDecomposition<T> {
    pub nu_plus: T,
    pub nu_minus: T,
    /// Mean photon number of the hotter mode: `(nu_plus - 1) / 2`.
    pub nbar_plus: T,
    /// Mean photon number of the colder mode: `(nu_minus - 1) / 2`.
    pub nbar_minus: T,
    pub diagonalizer: SymplecticMatrix<T>,
}

/// Parameters of the Gaussian coherent-state mixture operators: a Gaussian
/// weight of inverse width `s` over coherent amplitudes, with mode B carrying
/// either the conjugated amplitude scaled by `kappa` (`conjugate_mode_b =
/// true`) or the amplitude itself (`false`). The two variants have different
/// photon-number selection rules and different diagonalizing transforms.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GaussianMixtureSpec<T> {
    s: T,
    kappa: T,
    conjugate_mode_b: bool,
}

impl<T: Real> GaussianMixtureSpec<T> {
    pub fn new(s: T, kappa: T, conjugate_mode_b: bool) -> Result<Self> {
        if !(s.is_finite() && s > T::zero()) {
            return Err(domain(format!(
                "mixture inverse width s must be positive and finite (got {s})"
            )));
        }
        if !(kappa.is_finite() && kappa >= T::zero()) {
            return Err(domain(format!(
                "mixture amplitude scale kappa must be nonnegative (got {kappa})"
            )));
        }
        Ok(Self {
            s,
            kappa,
            conjugate_mode_b,
        })
    }

    pub fn s(&self) -> T {
        self.s
    }

    pub fn kappa(&self) -> T {
        self.kappa
    }

    pub fn conjugate_mode_b(&self) -> bool {
        self.conjugate_mode_b
    }
}

// ---------------------------------------------------------------------------
// Operations

/// Covariance matrix of the mixture operator:
/// `I_4 + (2/s) * [[I_2, kappa*B], [kappa*B, kappa^2*I_2]]` with
/// `B = diag(1,-1)` for the conjugated variant and `B = I_2` otherwise.
pub fn mixture_covariance<T: Real>(spec: &GaussianMixtureSpec<T>) -> CovarianceMatrix<T> {
    let two_over_s = T::of(2.0) / spec.s;
    let a = T::one() + two_over_s;
    let b = T::one() + two_over_s * spec.kappa * spec.kappa;
    let c = two_over_s * spec.kappa;
    let mut m = [[T::zero(); 4]; 4];
    m[0][0] = a;
    m[1][1] = a;
    m[2][2] = b;
    m[3][3] = b;
    let (cxx, cpp) = if spec.conjugate_mode_b { (c, -c) } else { (c, c) };
    m[0][2] = cxx;
    m[2][0] = cxx;
    m[1][3] = cpp;
    m[3][1] = cpp;
    CovarianceMatrix::from_entries_unchecked(m)
}

/// The two-mode squeezing transform
/// `[[cosh(r)*I_2, sinh(r)*Z], [sinh(r)*Z, cosh(r)*I_2]]` with `Z = diag(1,-1)`.
pub fn two_mode_squeezer<T: Real>(r: T) -> SymplecticMatrix<T> {
    debug_assert!(r.is_finite());
    let ch = r.cosh();
    let sh = r.sinh();
    let mut m = [[T::zero(); 4]; 4];
    m[0][0] = ch;
    m[1][1] = ch;
    m[2][2] = ch;
    m[3][3] = ch;
    m[0][2] = sh;
    m[2][0] = sh;
    m[1][3] = -sh;
    m[3][1] = -sh;
    SymplecticMatrix::from_entries_unchecked(m)
}

/// Beamsplitter transform `[[cos(t)*I_2, sin(t)*I_2], [-sin(t)*I_2, cos(t)*I_2]]`.
fn beamsplitter<T: Real>(theta: T) -> SymplecticMatrix<T> {
    let c = theta.cos();
    let s = theta.sin();
    let mut m = [[T::zero(); 4]; 4];
    m[0][0] = c;
    m[1][1] = c;
    m[2][2] = c;
    m[3][3] = c;
    m[0][2] = s;
    m[1][3] = s;
    m[2][0] = -s;
    m[3][1] = -s;
    SymplecticMatrix::from_entries_unchecked(m)
}

/// Exchange of the two modes (swap `(x_A, p_A)` with `(x_B, p_B)`).
fn mode_swap<T: Real>() -> SymplecticMatrix<T> {
    let mut m = [[T::zero(); 4]; 4];
    m[0][2] = T::one();
    m[1][3] = T::one();
    m[2][0] = T::one();
    m[3][1] = T::one();
    SymplecticMatrix::from_entries_unchecked(m)
}

/// Squeeze parameter `r = atanh(2*kappa / (1 + s + kappa^2)) / 2` such that
/// `two_mode_squeezer(-r)` diagonalizes the conjugated-variant covariance.
///
/// The non-conjugated variant is diagonalized by a beamsplitter instead, so
/// requesting a squeeze parameter for it is a usage error.
pub fn diagonalizing_squeeze_param<T: Real>(spec: &GaussianMixtureSpec<T>) -> Result<T> {
    if !spec.conjugate_mode_b {
        return Err(usage(
            "the non-conjugated mixture is diagonalized by a beamsplitter, not a squeezer; \
             use thermal_decomposition instead",
        ));
    }
    let arg = T::of(2.0) * spec.kappa / (T::one() + spec.s + spec.kappa * spec.kappa);
    Ok(arg.atanh() / T::of(2.0))
}

/// Symplectic eigenvalues `(nu_plus, nu_minus)` of a covariance matrix,
/// sorted descending, via the generic route: the eigenvalues of
/// `-(gamma^{1/2} Omega gamma^{1/2})^2` are the squared symplectic
/// eigenvalues, each doubled.
pub fn symplectic_eigenvalues<T: Real>(gamma: &CovarianceMatrix<T>) -> Result<(T, T)> {
    let root = sym4_sqrt(&gamma.entries)?;
    let omega = SymplecticForm::standard().entries;
    let k = mat4_mul(&mat4_mul(&root, &omega), &root);
    // K is antisymmetric, so -K^2 = K K^T is symmetric positive semidefinite.
    let k2 = mat4_mul(&k, &k);
    let mut b = [T::zero(); 16];
    for i in 0..4 {
        for j in 0..4 {
            b[i * 4 + j] = -(k2[i][j] + k2[j][i]) / T::of(2.0);
        }
    }
    let mut vals = sym_eigen(&mut b, 4, None)?;
    vals.sort_by(|x, y| y.partial_cmp(x).expect("eigenvalues are finite"));
    if vals[3] < -T::validation_eps(PHYSICALITY_SLACK) {
        return Err(domain(
            "matrix has no symplectic spectrum (negative squared eigenvalue)",
        ));
    }
    let nu_plus = ((vals[0] + vals[1]) / T::of(2.0)).max(T::zero()).sqrt();
    let nu_minus = ((vals[2] + vals[3]) / T::of(2.0)).max(T::zero()).sqrt();
    Ok((nu_plus, nu_minus))
}

/// Closed-form symplectic eigenvalues of a mixture covariance, sorted
/// descending. Retained alongside the generic eigensolve so each can check
/// the other.
pub fn closed_form_symplectic_eigenvalues<T: Real>(spec: &GaussianMixtureSpec<T>) -> (T, T) {
    let s = spec.s;
    let k2 = spec.kappa * spec.kappa;
    if spec.conjugate_mode_b {
        let c = T::one() + s + k2;
        let w = (c * c - T::of(4.0) * k2).sqrt();
        let a = (w + (T::one() - k2)) / s;
        let b = (w - (T::one() - k2)) / s;
        if a >= b {
            (a, b)
        } else {
            (b, a)
        }
    } else {
        (T::one() + T::of(2.0) * (T::one() + k2) / s, T::one())
    }
}

/// Maximum eigenvalue `4 / ((nu_plus + 1) * (nu_minus + 1))` of a two-mode
/// Gaussian operator with the given symplectic eigenvalues (each thermal
/// factor contributes its ground-state occupancy `2 / (nu + 1)`).
pub fn gaussian_max_eigenvalue<T: Real>(nu_plus: T, nu_minus: T) -> Result<T> {
    let slack = T::validation_eps(PHYSICALITY_SLACK);
    for nu in [nu_plus, nu_minus] {
        if !(nu.is_finite() && nu >= T::one() - slack) {
            return Err(domain(format!(
                "symplectic eigenvalue must be >= 1 (got {nu})"
            )));
        }
    }
    Ok(T::of(4.0) / ((nu_plus + T::one()) * (nu_minus + T::one())))
}

/// Full thermal decomposition of a mixture covariance: symplectic
/// eigenvalues, mean photon numbers `nbar = (nu - 1)/2`, and the
/// diagonalizing symplectic matrix (a two-mode squeezer for the conjugated
/// variant, a numerically located beamsplitter for the other; composed with
/// a mode swap if needed so mode A always carries `nu_plus`).
pub fn thermal_decomposition<T: Real>(
    spec: &GaussianMixtureSpec<T>,
) -> Result<ThermalDecomposition<T>> {
    let gamma = mixture_covariance(spec);
    let (nu_plus, nu_minus) = symplectic_eigenvalues(&gamma)?;

    let mut diag = if spec.conjugate_mode_b {
        let r = diagonalizing_squeeze_param(spec)?;
        two_mode_squeezer(-r)
    } else {
        // The closed forms give only the eigenvalues; locate the angle that
        // kills the off-diagonal block numerically. The squared residual is
        // sinusoidal in 2*theta (not unimodal over the range), so scan a
        // dense grid before the golden-section polish.
        let objective = |theta: T| {
            let d = gamma.transformed_by(&beamsplitter(theta));
            let e = d.entries();
            let mut acc = T::zero();
            for i in 0..2 {
                for j in 2..4 {
                    acc = acc + e[i][j] * e[i][j];
                }
            }
            acc
        };
        let (theta, _) = grid_refine_min(
            &objective,
            T::zero(),
            T::FRAC_PI_2(),
            256,
            T::validation_eps(1e-13),
        );
        beamsplitter(theta)
    };

    let mut d = gamma.transformed_by(&diag);
    if d.entries()[0][0] < d.entries()[2][2] {
        diag = mode_swap().compose(&diag);
        d = gamma.transformed_by(&diag);
    }

    // Residual check: the decomposition is only returned if it actually
    // diagonalizes the input and reproduces the eigenvalues.
    let scale = gamma.max_abs();
    let tol = T::validation_eps(1e-10) * scale;
    let e = d.entries();
    for i in 0..4 {
        for j in 0..4 {
            let target = match (i, j) {
                _ if i == j && i < 2 => nu_plus,
                _ if i == j => nu_minus,
                _ => T::zero(),
            };
            if (e[i][j] - target).abs() > tol {
                return Err(Error::Internal(format!(
                    "thermal decomposition residual {:.3e} at ({i},{j}) exceeds tolerance {:.3e}",
                    (e[i][j] - target).abs(),
                    tol
                )));
            }
        }
    }

    let half = |nu: T| ((nu - T::one()) / T::of(2.0)).max(T::zero());
    Ok(ThermalDecomposition {
        nu_plus,
        nu_minus,
        nbar_plus: half(nu_plus),
        nbar_minus: half(nu_minus),
        diagonalizer: diag,
    })
}

/// Determinant helper exposed for symplectic sanity checks (`det S = 1`).
pub fn determinant<T: Real>(s: &SymplecticMatrix<T>) -> T {
    mat4_det(&s.entries)
}

/// Identity symplectic matrix.
pub fn identity_symplectic<T: Real>() -> SymplecticMatrix<T> {
    SymplecticMatrix::from_entries_unchecked(mat4_identity())
}
