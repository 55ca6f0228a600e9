//! Dense truncated photon-number-basis numerics.
//!
//! This module is the crate's independent verification route: states and
//! operators are represented by explicit amplitudes in a truncated number
//! basis, channels act through their Kraus representations, and eigenvalues
//! come from dense Hermitian eigensolves. Closed-form results elsewhere in
//! the crate are checked against these "by-the-definition" computations.
//!
//! Two-mode objects use row-major composite indexing: basis state
//! `(n_A, n_B)` lives at index `n_A * dim + n_B`.

use num_complex::Complex;

use crate::error::{domain, truncation, usage, Error, Result};
use crate::gaussian::GaussianMixtureSpec;
use crate::linalg::{connected_components, herm_eigenvalues, sym_eigen};
use crate::quadrature::GaussLaguerre;
use crate::scalar::Real;

/// Trace lost to truncation beyond this budget aborts operator-producing
/// routines with a truncation error.
pub const TRACE_DEFICIT_BUDGET: f64 = 1e-4;

/// Minimum radial node count accepted when integrating mixture operators.
pub const MIN_MIXTURE_NODES: usize = 20;

// ---------------------------------------------------------------------------
// Types

/// Photon-number-basis truncation: dimension per mode and the acceptable
/// probability mass beyond the cutoff.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TruncationSpec<T> {
    dim: usize,
    tail_tol: T,
}

impl<T: Real> TruncationSpec<T> {
    pub fn new(dim: usize, tail_tol: T) -> Result<Self> {
        if dim < 2 {
            return Err(usage(format!(
                "truncation dimension must be at least 2 (got {dim})"
            )));
        }
        if !(tail_tol.is_finite() && tail_tol > T::zero() && tail_tol < T::one()) {
            return Err(usage(format!(
                "tail tolerance must lie strictly between 0 and 1 (got {tail_tol})"
            )));
        }
        Ok(Self { dim, tail_tol })
    }

    /// The crate-default working size: 60 levels per mode, tail budget 1e-8.
    pub fn standard() -> Self {
        Self {
            dim: crate::DEFAULT_FOCK_DIM,
            tail_tol: T::of(crate::DEFAULT_TAIL_TOL),
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn tail_tol(&self) -> T {
        self.tail_tol
    }
}

/// State vector over one or two truncated modes.
#[derive(Debug, Clone, PartialEq)]
pub struct FockVector<T> {
    amplitudes: Vec<Complex<T>>,
    dim: usize,
    modes: u8,
}

impl<T: Real> FockVector<T> {
    pub(crate) fn new_raw(amplitudes: Vec<Complex<T>>, dim: usize, modes: u8) -> Self {
        debug_assert_eq!(amplitudes.len(), dim.pow(modes as u32));
        Self {
            amplitudes,
            dim,
            modes,
        }
    }

    /// Amplitudes in row-major composite index order (see module docs).
    pub fn amplitudes(&self) -> &[Complex<T>] {
        &self.amplitudes
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn modes(&self) -> u8 {
        self.modes
    }

    pub fn norm_sqr(&self) -> T {
        self.amplitudes
            .iter()
            .map(|a| a.norm_sqr())
            .fold(T::zero(), |acc, x| acc + x)
    }
}

/// Dense operator over one or two truncated modes.
#[derive(Debug, Clone, PartialEq)]
pub struct FockOperator<T> {
    entries: Vec<Complex<T>>,
    side: usize,
    dim: usize,
    modes: u8,
    hermitian: bool,
}

impl<T: Real> FockOperator<T> {
    pub(crate) fn new_raw(
        entries: Vec<Complex<T>>,
        dim: usize,
        modes: u8,
        hermitian: bool,
    ) -> Self {
        let side = dim.pow(modes as u32);
        debug_assert_eq!(entries.len(), side * side);
        Self {
            entries,
            side,
            dim,
            modes,
            hermitian,
        }
    }

    /// Row-major entries; the matrix side is `dim^modes`.
    pub fn entries(&self) -> &[Complex<T>] {
        &self.entries
    }

    pub fn entry(&self, row: usize, col: usize) -> Complex<T> {
        self.entries[row * self.side + col]
    }

    pub fn side(&self) -> usize {
        self.side
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn modes(&self) -> u8 {
        self.modes
    }

    /// Whether the operator was constructed as exactly Hermitian.
    pub fn hermitian(&self) -> bool {
        self.hermitian
    }

    pub fn trace(&self) -> Complex<T> {
        let mut acc = Complex::new(T::zero(), T::zero());
        for i in 0..self.side {
            acc = acc + self.entries[i * self.side + i];
        }
        acc
    }

    /// Rank-one projector `|v><v|` (trace equals the squared norm of `v`).
    pub fn pure_state(vec: &FockVector<T>) -> FockOperator<T> {
        let n = vec.amplitudes.len();
        let mut entries = vec![Complex::new(T::zero(), T::zero()); n * n];
        for i in 0..n {
            for j in 0..n {
                entries[i * n + j] = vec.amplitudes[i] * vec.amplitudes[j].conj();
            }
        }
        FockOperator::new_raw(entries, vec.dim, vec.modes, true)
    }
}

// ---------------------------------------------------------------------------
// State constructors

fn coherent_amplitudes<T: Real>(alpha: Complex<T>, dim: usize) -> Vec<Complex<T>> {
    let mut amps = Vec::with_capacity(dim);
    let a0 = (-alpha.norm_sqr() / T::of(2.0)).exp();
    amps.push(Complex::new(a0, T::zero()));
    for n in 1..dim {
        let prev = amps[n - 1];
        amps.push(prev * alpha.scale(T::one() / T::of_usize(n).sqrt()));
    }
    amps
}

/// Coherent state `|alpha>` truncated to `trunc.dim` levels. Errors if the
/// probability mass beyond the cutoff exceeds the tail tolerance.
pub fn coherent_vector<T: Real>(
    alpha: Complex<T>,
    trunc: TruncationSpec<T>,
) -> Result<FockVector<T>> {
    let v = coherent_vector_lenient(alpha, trunc);
    let deficit = T::one() - v.norm_sqr();
    if deficit > trunc.tail_tol {
        return Err(truncation(
            format!("coherent state with |alpha|^2 = {}", alpha.norm_sqr()),
            deficit,
            trunc.tail_tol,
        ));
    }
    Ok(v)
}

/// As [`coherent_vector`] but without the tail check; used by quadrature
/// kernels at far nodes where the truncation loss is weight-suppressed.
pub(crate) fn coherent_vector_lenient<T: Real>(
    alpha: Complex<T>,
    trunc: TruncationSpec<T>,
) -> FockVector<T> {
    FockVector::new_raw(coherent_amplitudes(alpha, trunc.dim), trunc.dim, 1)
}

/// Two-mode squeezed vacuum with parameter `xi` in `[0, 1)`: amplitudes
/// `sqrt(1 - xi^2) * xi^n` on the diagonal pairs `(n, n)`. The truncated
/// tail mass is exactly `xi^(2*dim)`.
pub fn two_mode_squeezed_vector<T: Real>(
    xi: T,
    trunc: TruncationSpec<T>,
) -> Result<FockVector<T>> {
    if !(xi.is_finite() && xi >= T::zero() && xi < T::one()) {
        return Err(domain(format!(
            "squeezing parameter must lie in [0, 1) (got {xi})"
        )));
    }
    let dim = trunc.dim;
    let deficit = xi.powi(2 * dim as i32);
    if deficit > trunc.tail_tol {
        return Err(truncation(
            format!("two-mode squeezed vacuum with xi = {xi}"),
            deficit,
            trunc.tail_tol,
        ));
    }
    let mut amps = vec![Complex::new(T::zero(), T::zero()); dim * dim];
    let norm = (T::one() - xi * xi).sqrt();
    let mut coeff = norm;
    for n in 0..dim {
        amps[n * dim + n] = Complex::new(coeff, T::zero());
        coeff = coeff * xi;
    }
    Ok(FockVector::new_raw(amps, dim, 2))
}

fn thermal_weights<T: Real>(nbar: T, dim: usize) -> (Vec<T>, T) {
    if nbar == T::zero() {
        let mut p = vec![T::zero(); dim];
        p[0] = T::one();
        return (p, T::zero());
    }
    let q = nbar / (T::one() + nbar);
    let mut p = Vec::with_capacity(dim);
    let mut w = T::one() / (T::one() + nbar);
    for _ in 0..dim {
        p.push(w);
        w = w * q;
    }
    (p, q.powi(dim as i32))
}

/// Thermal state with mean photon number `nbar`: diagonal geometric weights
/// `(1/(1+nbar)) * (nbar/(1+nbar))^n`. The truncated tail mass is exactly
/// `(nbar/(1+nbar))^dim`.
pub fn thermal_operator<T: Real>(nbar: T, trunc: TruncationSpec<T>) -> Result<FockOperator<T>> {
    if !(nbar.is_finite() && nbar >= T::zero()) {
        return Err(domain(format!(
            "mean photon number must be nonnegative (got {nbar})"
        )));
    }
    let dim = trunc.dim;
    let (p, deficit) = thermal_weights(nbar, dim);
    if deficit > trunc.tail_tol {
        return Err(truncation(
            format!("thermal state with nbar = {nbar}"),
            deficit,
            trunc.tail_tol,
        ));
    }
    let mut entries = vec![Complex::new(T::zero(), T::zero()); dim * dim];
    for n in 0..dim {
        entries[n * dim + n] = Complex::new(p[n], T::zero());
    }
    Ok(FockOperator::new_raw(entries, dim, 1, true))
}

// ---------------------------------------------------------------------------
// Mixture operator assembly

/// Builds the two-mode Gaussian coherent-state mixture operator in the
/// truncated number basis by radial Gauss-Laguerre integration.
///
/// The angular integral enforces an exact selection rule — entry
/// `((m1,m2),(n1,n2))` vanishes unless `m1 - n1 = m2 - n2` (conjugated
/// variant) or `m1 + m2 = n1 + n2` (direct variant) — so the operator is
/// block diagonal and all surviving entries are real and nonnegative-summed
/// (each block is a positively weighted sum of rank-one outer products).
///
/// The surviving radial integrands are polynomials of degree at most
/// `2*dim - 2` in the rescaled variable, so the rule is exact once the node
/// count reaches `dim`; the effective node count is raised to that floor.
pub fn build_mixture_operator<T: Real>(
    spec: &GaussianMixtureSpec<T>,
    trunc: TruncationSpec<T>,
    radial_nodes: usize,
) -> Result<FockOperator<T>> {
    if radial_nodes < MIN_MIXTURE_NODES {
        return Err(usage(format!(
            "mixture integration needs at least {MIN_MIXTURE_NODES} radial nodes (got {radial_nodes})"
        )));
    }
    let dim = trunc.dim;
    let nodes = radial_nodes.max(dim);
    let rule = GaussLaguerre::<T>::new(nodes)?;

    let s = spec.s();
    let kappa = spec.kappa();
    // After substituting u = |alpha|^2 and rescaling x = c*u, the radial
    // weight is exactly the Gauss-Laguerre one with c = s + 1 + kappa^2.
    let c = s + T::one() + kappa * kappa;
    let prefactor = s / c;

    // Per node: qa[m] = w^{1/4} (x/c)^{m/2} / sqrt(m!), qb[m] = kappa^m qa[m].
    // The quarter-power weight split keeps every factor at moderate
    // magnitude; each block accumulates w * (outer product) per node.
    let mut qa_all: Vec<Vec<T>> = Vec::with_capacity(nodes);
    let mut qb_all: Vec<Vec<T>> = Vec::with_capacity(nodes);
    let mut sqrt_idx = Vec::with_capacity(dim);
    for m in 0..dim {
        sqrt_idx.push(T::of_usize(m + 1).sqrt());
    }
    for k in 0..nodes {
        let w = rule.weights[k];
        let x = rule.nodes[k];
        let mut qa = vec![T::zero(); dim];
        let mut qb = vec![T::zero(); dim];
        if w > T::zero() {
            let w4 = w.sqrt().sqrt();
            let rt = (x / c).sqrt();
            qa[0] = w4;
            qb[0] = w4;
            for m in 0..dim - 1 {
                qa[m + 1] = qa[m] * rt / sqrt_idx[m];
                qb[m + 1] = qb[m] * rt * kappa / sqrt_idx[m];
            }
        }
        qa_all.push(qa);
        qb_all.push(qb);
    }

    let side = dim * dim;
    let mut entries = vec![Complex::new(T::zero(), T::zero()); side * side];

    // Enumerate the selection-rule blocks: lists of (m1, m2) basis pairs.
    let mut blocks: Vec<Vec<(usize, usize)>> = Vec::new();
    if spec.conjugate_mode_b() {
        for d in -(dim as isize - 1)..=(dim as isize - 1) {
            let mut blk = Vec::new();
            for m1 in 0..dim {
                let m2 = m1 as isize - d;
                if (0..dim as isize).contains(&m2) {
                    blk.push((m1, m2 as usize));
                }
            }
            blocks.push(blk);
        }
    } else {
        for t in 0..=(2 * dim - 2) {
            let mut blk = Vec::new();
            for m1 in 0..dim {
                if t >= m1 && t - m1 < dim {
                    blk.push((m1, t - m1));
                }
            }
            blocks.push(blk);
        }
    }

    let mut buf: Vec<T> = Vec::new();
    let mut v: Vec<T> = Vec::new();
    for blk in &blocks {
        let len = blk.len();
        buf.clear();
        buf.resize(len * len, T::zero());
        v.clear();
        v.resize(len, T::zero());
        for k in 0..nodes {
            let qa = &qa_all[k];
            let qb = &qb_all[k];
            if qa[0] == T::zero() {
                continue;
            }
            for (i, &(m1, m2)) in blk.iter().enumerate() {
                v[i] = qa[m1] * qb[m2];
            }
            for i in 0..len {
                let vi = v[i];
                if vi == T::zero() {
                    continue;
                }
                for j in i..len {
                    buf[i * len + j] = buf[i * len + j] + vi * v[j];
                }
            }
        }
        for i in 0..len {
            let (a1, a2) = blk[i];
            let row = a1 * dim + a2;
            for j in i..len {
                let (b1, b2) = blk[j];
                let col = b1 * dim + b2;
                let val = Complex::new(prefactor * buf[i * len + j], T::zero());
                entries[row * side + col] = val;
                entries[col * side + row] = val;
            }
        }
    }

    let op = FockOperator::new_raw(entries, dim, 2, true);
    let tr = op.trace().re;
    let deficit = T::one() - tr;
    let budget = T::of(TRACE_DEFICIT_BUDGET);
    if deficit > budget {
        return Err(truncation(
            format!("mixture operator (s = {s}, kappa = {kappa})"),
            deficit,
            budget,
        ));
    }
    if deficit < -T::of(1e-6) {
        return Err(Error::Internal(format!(
            "mixture operator trace exceeds 1 by {:.3e}; the radial quadrature is inconsistent",
            (-deficit).to_f64().unwrap_or(f64::NAN)
        )));
    }
    Ok(op)
}

// ---------------------------------------------------------------------------
// Eigenvalues

fn component_extrema<T: Real>(op: &FockOperator<T>, comp: &[usize]) -> Result<(T, T)> {
    let side = op.side;
    if comp.len() == 1 {
        let x = op.entries[comp[0] * side + comp[0]].re;
        return Ok((x, x));
    }
    let n = comp.len();
    let mut all_real = true;
    'outer: for &i in comp {
        for &j in comp {
            if op.entries[i * side + j].im != T::zero() {
                all_real = false;
                break 'outer;
            }
        }
    }
    let vals = if all_real {
        let mut block = vec![T::zero(); n * n];
        for (bi, &i) in comp.iter().enumerate() {
            for (bj, &j) in comp.iter().enumerate() {
                block[bi * n + bj] = op.entries[i * side + j].re;
            }
        }
        sym_eigen(&mut block, n, None)?
    } else {
        let mut block = vec![Complex::new(T::zero(), T::zero()); n * n];
        for (bi, &i) in comp.iter().enumerate() {
            for (bj, &j) in comp.iter().enumerate() {
                block[bi * n + bj] = op.entries[i * side + j];
            }
        }
        herm_eigenvalues(&mut block, n)?
    };
    let mut lo = vals[0];
    let mut hi = vals[0];
    for &x in &vals[1..] {
        lo = lo.min(x);
        hi = hi.max(x);
    }
    Ok((lo, hi))
}

/// Smallest and largest eigenvalues of a Hermitian operator. The matrix is
/// split into connected components of its exact sparsity pattern first, so
/// block-diagonal operators (such as the mixture operators) cost a dense
/// solve per block rather than one solve of the full side.
pub fn hermitian_eigenvalue_range<T: Real>(op: &FockOperator<T>) -> Result<(T, T)> {
    if !op.hermitian {
        return Err(usage(
            "eigenvalue routines require an operator constructed as Hermitian",
        ));
    }
    let comps = connected_components(&op.entries, op.side);
    let mut lo = T::infinity();
    let mut hi = T::neg_infinity();
    for comp in &comps {
        let (clo, chi) = component_extrema(op, comp)?;
        lo = lo.min(clo);
        hi = hi.max(chi);
    }
    Ok((lo, hi))
}

/// Largest eigenvalue of a Hermitian operator (see
/// [`hermitian_eigenvalue_range`] for the block strategy).
pub fn hermitian_max_eigenvalue<T: Real>(op: &FockOperator<T>) -> Result<T> {
    hermitian_eigenvalue_range(op).map(|(_, hi)| hi)
}

// ---------------------------------------------------------------------------
// Channel action and overlaps

/// Applies the phase-insensitive amplifier of gain `g >= 1` through its
/// number-basis Kraus operators: `K_k` maps `|n> -> c_k(n) |n+k>` with
/// `c_k(n) = sqrt(binom(n+k, k)) * t^k / ch^(n+1)`, `t = sqrt(1 - 1/g)`,
/// `ch = sqrt(g)`.
pub fn amplifier_apply<T: Real>(
    rho_in: &FockOperator<T>,
    g: T,
    trunc: TruncationSpec<T>,
) -> Result<FockOperator<T>> {
    if !(g.is_finite() && g >= T::one()) {
        return Err(domain(format!("amplifier gain must satisfy g >= 1 (got {g})")));
    }
    if rho_in.modes != 1 {
        return Err(usage("amplifier application expects a single-mode operator"));
    }
    if !rho_in.hermitian {
        return Err(usage("amplifier application expects a Hermitian (state) operator"));
    }
    let dim = trunc.dim;
    if rho_in.dim != dim {
        return Err(usage(format!(
            "operator dimension {} does not match truncation dimension {dim}",
            rho_in.dim
        )));
    }
    let tr_in = rho_in.trace();
    if (tr_in.re - T::one()).abs() > T::of(TRACE_DEFICIT_BUDGET)
        || tr_in.im.abs() > T::of(1e-9)
    {
        return Err(usage(format!(
            "amplifier input must have unit trace (got {} + {}i)",
            tr_in.re, tr_in.im
        )));
    }

    let ch = g.sqrt();
    let t = (T::one() - T::one() / g).sqrt();
    let inv_ch = T::one() / ch;

    // c_k(n) by upward recurrence in k: c_0(n) = ch^-(n+1),
    // c_{k+1}(n) = c_k(n) * t * sqrt((n+k+1)/(k+1)).
    let mut c0 = Vec::with_capacity(dim);
    let mut acc = inv_ch;
    for _ in 0..dim {
        c0.push(acc);
        acc = acc * inv_ch;
    }

    let mut out = vec![Complex::new(T::zero(), T::zero()); dim * dim];
    for n in 0..dim {
        for m in n..dim {
            let src = rho_in.entries[n * dim + m];
            if src == Complex::new(T::zero(), T::zero()) {
                continue;
            }
            let mut cn = c0[n];
            let mut cm = c0[m];
            let mut k = 0usize;
            loop {
                let (nn, mm) = (n + k, m + k);
                if nn >= dim || mm >= dim {
                    break;
                }
                let w = cn * cm;
                out[nn * dim + mm] = out[nn * dim + mm] + src.scale(w);
                if t == T::zero() {
                    break;
                }
                cn = cn * t * (T::of_usize(n + k + 1) / T::of_usize(k + 1)).sqrt();
                cm = cm * t * (T::of_usize(m + k + 1) / T::of_usize(k + 1)).sqrt();
                k += 1;
            }
        }
    }
    // Mirror the strict upper triangle (the diagonal was built Hermitian).
    for n in 0..dim {
        for m in (n + 1)..dim {
            out[m * dim + n] = out[n * dim + m].conj();
        }
    }

    let op = FockOperator::new_raw(out, dim, 1, true);
    let deficit = tr_in.re - op.trace().re;
    let budget = T::of(TRACE_DEFICIT_BUDGET);
    if deficit > budget {
        return Err(truncation(
            format!("amplifier output at gain g = {g}"),
            deficit,
            budget,
        ));
    }
    Ok(op)
}

/// Displaced thermal state `D(mu) T(nbar) D(mu)^dagger` in the truncated
/// basis. Columns of the displacement operator on number states are built by
/// recurrence from the coherent column `D(mu)|0>`.
pub(crate) fn displaced_thermal<T: Real>(
    mu: Complex<T>,
    nbar: T,
    trunc: TruncationSpec<T>,
) -> Result<FockOperator<T>> {
    if !(nbar.is_finite() && nbar >= T::zero()) {
        return Err(domain(format!(
            "mean photon number must be nonnegative (got {nbar})"
        )));
    }
    let dim = trunc.dim;
    let (p, _) = thermal_weights(nbar, dim);

    // cols[n][m] = <m| D(mu) |n>. Column 0 is the coherent state; then
    // D a^dag = (a^dag - conj(mu)) D gives
    // <m|D|n+1> = (sqrt(m) <m-1|D|n> - conj(mu) <m|D|n>) / sqrt(n+1).
    let mut col = coherent_amplitudes(mu, dim);
    let mu_bar = mu.conj();
    let mut entries = vec![Complex::new(T::zero(), T::zero()); dim * dim];
    let mut weighted_norm = T::zero();
    for n in 0..dim {
        let pn = p[n];
        if pn > T::zero() {
            weighted_norm = weighted_norm
                + pn * col.iter().map(|a| a.norm_sqr()).fold(T::zero(), |a, b| a + b);
            for i in 0..dim {
                let ci = col[i];
                if ci == Complex::new(T::zero(), T::zero()) {
                    continue;
                }
                for j in 0..dim {
                    entries[i * dim + j] = entries[i * dim + j] + ci.scale(pn) * col[j].conj();
                }
            }
        }
        if n + 1 < dim {
            let mut next = Vec::with_capacity(dim);
            let rn = T::one() / T::of_usize(n + 1).sqrt();
            for m in 0..dim {
                let lower = if m == 0 {
                    Complex::new(T::zero(), T::zero())
                } else {
                    col[m - 1].scale(T::of_usize(m).sqrt())
                };
                next.push((lower - mu_bar * col[m]).scale(rn));
            }
            col = next;
        }
    }

    let deficit = T::one() - weighted_norm;
    let budget = T::of(TRACE_DEFICIT_BUDGET);
    if deficit > budget {
        return Err(truncation(
            format!("displaced thermal state (|mu|^2 = {}, nbar = {nbar})", mu.norm_sqr()),
            deficit,
            budget,
        ));
    }
    Ok(FockOperator::new_raw(entries, dim, 1, true))
}

/// Expectation `<v| rho |v>` of a Hermitian operator in a normalized pure
/// state. Errors if shapes mismatch or the vector is not normalized.
pub fn pure_state_fidelity<T: Real>(vec: &FockVector<T>, op: &FockOperator<T>) -> Result<T> {
    if vec.dim != op.dim || vec.modes != op.modes {
        return Err(usage(format!(
            "shape mismatch: vector is {} mode(s) of dim {}, operator is {} mode(s) of dim {}",
            vec.modes, vec.dim, op.modes, op.dim
        )));
    }
    let miss = (vec.norm_sqr() - T::one()).abs();
    if miss > T::validation_eps(1e-6) {
        return Err(usage(format!(
            "state vector must be normalized (|norm^2 - 1| = {miss:.3e})"
        )));
    }
    Ok(fidelity_unchecked(vec, op))
}

/// `<v| rho |v>` without the normalization gate; quadrature kernels call this
/// with deliberately truncated coherent vectors.
pub(crate) fn fidelity_unchecked<T: Real>(vec: &FockVector<T>, op: &FockOperator<T>) -> T {
    let side = op.side;
    let v = &vec.amplitudes;
    let mut acc = Complex::new(T::zero(), T::zero());
    for i in 0..side {
        if v[i] == Complex::new(T::zero(), T::zero()) {
            continue;
        }
        let mut row = Complex::new(T::zero(), T::zero());
        for j in 0..side {
            row = row + op.entries[i * side + j] * v[j];
        }
        acc = acc + v[i].conj() * row;
    }
    acc.re
}
