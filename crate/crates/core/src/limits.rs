//! Fidelity limits for coherent-amplitude transformation tasks, the
//! channels that attain them, and the Gaussian witness family the limits
//! are extracted from.
//!
//! Conventions. A task `(n_in, eta, lambda, conjugate)` is *scale
//! covariant*: multiplying all three scalars by the same factor leaves the
//! optimal fidelity unchanged (substitute `alpha -> u*alpha` in the prior
//! average). The closed-form limits below are therefore stated in the
//! canonical frame with unit target strength, `(n', 1, lambda')` with
//! `n' = n_in/eta`, `lambda' = lambda/eta`; [`scale_task`] moves between
//! frames.
//!
//! The witness argument bounds the average fidelity of *any* channel by a
//! multiple of the largest eigenvalue of a two-mode Gaussian mixture
//! operator parametrized by `(s, kappa)` ([`WitnessParams`]); minimizing
//! over the free parameter `xi` recovers the closed-form limits at the
//! feasibility boundary `xi^2 = n'/(n' + lambda')`.

use serde::Serialize;

use crate::channels::{ChannelSpec, TaskSpec};
use crate::error::{domain, usage, Error, Result};
use crate::gaussian::GaussianMixtureSpec;
use crate::optimize::grid_refine_min;
use crate::scalar::Real;

/// Upper end of the witness search window: `xi` may approach but not reach 1
/// (the witness prior degenerates there).
const XI_CEILING_GAP: f64 = 1e-9;

/// Minimum grid resolution accepted by [`witness_bound_optimize`].
pub const MIN_WITNESS_GRID: usize = 64;

// ---------------------------------------------------------------------------
// Results

/// Whether a limit says something nontrivial or is clipped at 1.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundBranch {
    /// The limit is strictly below 1.
    Nontrivial,
    /// The limit saturates at 1 (perfect fidelity is either achievable or
    /// simply not excluded on this branch).
    SaturatedAtOne,
}

/// Whether the stated limit is known to be attained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Attainability {
    /// A concrete channel achieves the limit exactly.
    ProvenTight,
    /// No channel achieving the limit is known; the true optimum may lie
    /// below the stated value.
    TightnessUnknown,
}

/// The best concrete channel we can point to when a limit is not known to
/// be tight.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BestKnown<T> {
    pub channel: ChannelSpec<T>,
    pub fidelity: T,
}

/// A fidelity limit together with its attainability record.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BoundResult<T> {
    /// The limit itself: no channel exceeds this average fidelity.
    pub value: T,
    pub branch: BoundBranch,
    /// Channel attaining `value`, when one is proven to.
    pub attained_by: Option<ChannelSpec<T>>,
    pub attainability: Attainability,
    /// Populated exactly when `attainability` is `TightnessUnknown`: the
    /// best fidelity we know how to reach, for honest gap reporting.
    pub best_known: Option<BestKnown<T>>,
}

// ---------------------------------------------------------------------------
// Task rescaling

/// Rescales a task to a new input strength without changing its optimal
/// fidelity: `(n, eta, lambda) -> (c*n, c*eta, c*lambda)` with
/// `c = new_n_in / n_in`. Scaling back recovers the original task exactly
/// up to rounding.
pub fn scale_task<T: Real>(task: &TaskSpec<T>, new_n_in: T) -> Result<TaskSpec<T>> {
    if !(new_n_in.is_finite() && new_n_in > T::zero()) {
        return Err(domain(format!(
            "rescaled input strength must be positive and finite (got {new_n_in})"
        )));
    }
    let c = new_n_in / task.n_in();
    TaskSpec::new(
        new_n_in,
        task.eta() * c,
        task.lambda() * c,
        task.conjugate(),
    )
}

/// The canonical frame used by the closed-form limits: unit target
/// strength, `(n_in/eta, 1, lambda/eta)`.
fn canonical_frame<T: Real>(task: &TaskSpec<T>) -> (T, T) {
    (task.n_in() / task.eta(), task.lambda() / task.eta())
}

// ---------------------------------------------------------------------------
// Closed-form limits

fn check_bound_scalar<T: Real>(name: &str, v: T, allow_zero: bool) -> Result<()> {
    let ok = v.is_finite() && (v > T::zero() || (allow_zero && v == T::zero()));
    if !ok {
        let kind = if allow_zero { "nonnegative" } else { "positive" };
        return Err(domain(format!(
            "{name} must be {kind} and finite (got {v})"
        )));
    }
    Ok(())
}

/// Fidelity limit for amplification tasks `(1, eta, lambda)` (unit input
/// strength, direct target): `min(1, (1+lambda)/eta)`.
///
/// * `eta <= 1`: an attenuator (or the identity at `eta = 1`) is exact, so
///   the limit 1 is attained.
/// * `eta >= (1+lambda)^2`: the limit `(1+lambda)/eta` is attained by the
///   amplifier of gain `eta/(1+lambda)^2`.
/// * in between, the stated value is still a valid limit but no attaining
///   channel is known; `best_known` records the best gain-1 amplifier for
///   gap reporting.
///
/// `lambda = 0` (flat prior limit) is accepted.
pub fn amplification_bound<T: Real>(eta: T, lambda: T) -> Result<BoundResult<T>> {
    check_bound_scalar("eta", eta, false)?;
    check_bound_scalar("lambda", lambda, true)?;
    let one = T::one();

    if eta <= one {
        let attained = if eta == one {
            ChannelSpec::identity()
        } else {
            ChannelSpec::attenuator(eta)?
        };
        return Ok(BoundResult {
            value: one,
            branch: BoundBranch::SaturatedAtOne,
            attained_by: Some(attained),
            attainability: Attainability::ProvenTight,
            best_known: None,
        });
    }

    let raw = (one + lambda) / eta;
    if raw >= one {
        // 1 < eta <= 1 + lambda: the limit clips at 1 but nothing attains it.
        let (g, f) = best_gaussian_amplifier(eta, lambda)?;
        return Ok(BoundResult {
            value: one,
            branch: BoundBranch::SaturatedAtOne,
            attained_by: None,
            attainability: Attainability::TightnessUnknown,
            best_known: Some(BestKnown {
                channel: ChannelSpec::amplifier(g)?,
                fidelity: f,
            }),
        });
    }

    if eta >= (one + lambda) * (one + lambda) {
        let gain = eta / ((one + lambda) * (one + lambda));
        return Ok(BoundResult {
            value: raw,
            branch: BoundBranch::Nontrivial,
            attained_by: Some(ChannelSpec::amplifier(gain)?),
            attainability: Attainability::ProvenTight,
            best_known: None,
        });
    }

    // 1 + lambda < eta < (1+lambda)^2: valid limit, attainability open.
    let (g, f) = best_gaussian_amplifier(eta, lambda)?;
    Ok(BoundResult {
        value: raw,
        branch: BoundBranch::Nontrivial,
        attained_by: None,
        attainability: Attainability::TightnessUnknown,
        best_known: Some(BestKnown {
            channel: ChannelSpec::amplifier(g)?,
            fidelity: f,
        }),
    })
}

/// The best phase-insensitive amplifier for the task `(1, eta, lambda)`:
/// gain `g* = max(1, eta/(1+lambda)^2)` and its average fidelity. Requires
/// `lambda > 0` (the average under a flat prior is degenerate for any
/// mismatched gain).
pub fn best_gaussian_amplifier<T: Real>(eta: T, lambda: T) -> Result<(T, T)> {
    check_bound_scalar("eta", eta, false)?;
    if !(lambda.is_finite() && lambda > T::zero()) {
        return Err(usage(format!(
            "the best-amplifier average needs lambda > 0 (got {lambda})"
        )));
    }
    let one = T::one();
    let gain = (eta / ((one + lambda) * (one + lambda))).max(one);
    let chan = ChannelSpec::amplifier(gain)?;
    let task = TaskSpec::new(one, eta, lambda, false)?;
    let f = crate::channels::average_fidelity_closed(&chan, &task)?;
    Ok((gain, f))
}

/// Fidelity limit for conjugate-amplitude tasks `(n_in, 1, lambda)` (unit
/// target strength): `(n_in + lambda) / (n_in + lambda + 1)`, attained by
/// the measure-and-prepare conjugator with scale
/// `sqrt(n_in)/(n_in + lambda)`. `lambda = 0` is accepted.
pub fn conjugation_bound<T: Real>(n_in: T, lambda: T) -> Result<BoundResult<T>> {
    check_bound_scalar("n_in", n_in, false)?;
    check_bound_scalar("lambda", lambda, true)?;
    let m = n_in + lambda;
    let value = m / (m + T::one());
    Ok(BoundResult {
        value,
        branch: BoundBranch::Nontrivial,
        attained_by: Some(ChannelSpec::mp_conjugator(n_in.sqrt() / m)?),
        attainability: Attainability::ProvenTight,
        best_known: None,
    })
}

/// The best measure-and-prepare conjugator for the task
/// `(n_in, 1, lambda, conjugate)`: scale `c* = sqrt(n_in)/(n_in+lambda)`
/// and its average fidelity `(n_in+lambda)/(n_in+lambda+1)`. This channel
/// attains [`conjugation_bound`], so within the conjugate task class it is
/// optimal among *all* channels, not only within its family.
pub fn best_mp_conjugator<T: Real>(n_in: T, lambda: T) -> Result<(T, T)> {
    check_bound_scalar("n_in", n_in, false)?;
    if !(lambda.is_finite() && lambda > T::zero()) {
        return Err(usage(format!(
            "the best-conjugator average needs lambda > 0 (got {lambda})"
        )));
    }
    let m = n_in + lambda;
    Ok((n_in.sqrt() / m, m / (m + T::one())))
}

/// The best measure-and-prepare channel preparing *direct* amplitudes for
/// the task `(n_in, eta, lambda)`: scale `c* = sqrt(n_in*eta)/(n_in+lambda)`
/// and average fidelity `(n_in+lambda)/(n_in+lambda+eta)`.
///
/// Optimal within the measure-and-prepare family only — for direct targets
/// this is a baseline, not a limit (coherent channels beat it whenever the
/// task is close to attenuation or modest amplification).
pub fn best_mp_direct<T: Real>(n_in: T, eta: T, lambda: T) -> Result<(T, T)> {
    check_bound_scalar("n_in", n_in, false)?;
    check_bound_scalar("eta", eta, false)?;
    if !(lambda.is_finite() && lambda > T::zero()) {
        return Err(usage(format!(
            "the best-preparer average needs lambda > 0 (got {lambda})"
        )));
    }
    let m = n_in + lambda;
    Ok(((n_in * eta).sqrt() / m, m / (m + eta)))
}

/// Fidelity limit for attenuation-side direct tasks (`eta <= n_in`): the
/// trivial limit 1, attained exactly by the attenuator of transmission
/// `eta/n_in` (the identity when the ratio is 1).
pub fn attenuation_bound<T: Real>(task: &TaskSpec<T>) -> Result<BoundResult<T>> {
    if task.conjugate() {
        return Err(usage(
            "attenuation applies to direct targets; conjugate-amplitude tasks are \
             governed by the conjugation limit",
        ));
    }
    let t = task.eta() / task.n_in();
    if t > T::one() {
        return Err(usage(format!(
            "eta/n_in = {t} exceeds 1: this is an amplification task; use the \
             amplification limit"
        )));
    }
    let attained = if t == T::one() {
        ChannelSpec::identity()
    } else {
        ChannelSpec::attenuator(t)?
    };
    Ok(BoundResult {
        value: T::one(),
        branch: BoundBranch::SaturatedAtOne,
        attained_by: Some(attained),
        attainability: Attainability::ProvenTight,
        best_known: None,
    })
}

// ---------------------------------------------------------------------------
// Witness family

/// Parameters of the Gaussian witness operator certifying a fidelity limit
/// for a task at a given `xi`: prior width `s`, mode-B coupling `kappa`,
/// and the variant flag matching the task orientation.
///
/// At the feasibility boundary `xi^2 = n'/(n' + lambda')` the width `s`
/// degenerates to 0; the cancelled bound formulas in [`witness_bound`]
/// remain finite there, but the operator itself ([`Self::mixture_spec`])
/// requires `s > 0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct WitnessParams<T> {
    s: T,
    kappa: T,
    xi: T,
    lambda_canonical: T,
    mode_b_conjugated: bool,
}

impl<T: Real> WitnessParams<T> {
    /// Builds the witness parameters for `task` at the free parameter `xi`.
    ///
    /// Feasibility: `xi^2 >= n'/(n' + lambda')` always (so the induced width
    /// `s` is nonnegative), and additionally `kappa = sqrt(n')/xi <= 1` for
    /// direct-target tasks.
    pub fn for_task(task: &TaskSpec<T>, xi: T) -> Result<Self> {
        if !(xi.is_finite() && xi > T::zero() && xi < T::one()) {
            return Err(domain(format!(
                "witness parameter xi must lie strictly inside (0, 1) (got {xi})"
            )));
        }
        let (n, lam) = canonical_frame(task);
        let kappa = n.sqrt() / xi;
        let slack = T::validation_eps(1e-12) * (T::one() + lam.max(kappa * kappa));
        if !task.conjugate() && kappa > T::one() + slack {
            return Err(domain(format!(
                "direct-target witnesses need kappa = sqrt(n_in/eta)/xi <= 1, \
                 i.e. xi >= {}; got xi = {xi}",
                n.sqrt()
            )));
        }
        let s_raw = lam - (T::one() - xi * xi) * kappa * kappa;
        if s_raw < -slack {
            return Err(domain(format!(
                "xi^2 must be at least n'/(n' + lambda') = {} for the witness \
                 width to be nonnegative; got xi^2 = {}",
                n / (n + lam),
                xi * xi
            )));
        }
        // For direct tasks a kappa within rounding slack of 1 is accepted
        // above; pin it back onto the feasible edge.
        let kappa = if task.conjugate() {
            kappa
        } else {
            kappa.min(T::one())
        };
        Ok(Self {
            s: s_raw.max(T::zero()),
            kappa,
            xi,
            lambda_canonical: lam,
            mode_b_conjugated: !task.conjugate(),
        })
    }

    pub fn s(&self) -> T {
        self.s
    }

    pub fn kappa(&self) -> T {
        self.kappa
    }

    pub fn xi(&self) -> T {
        self.xi
    }

    /// Whether the witness operator's second mode carries the conjugated
    /// amplitude. Note the inversion: direct-target tasks are certified by
    /// the conjugated-mode operator and vice versa.
    pub fn mode_b_conjugated(&self) -> bool {
        self.mode_b_conjugated
    }

    /// The Gaussian mixture operator these parameters describe. Errors at
    /// the feasibility boundary where the width degenerates (`s = 0`).
    pub fn mixture_spec(&self) -> Result<GaussianMixtureSpec<T>> {
        if self.s <= T::zero() {
            return Err(domain(
                "witness width s degenerates to 0 at the feasibility boundary; \
                 the mixture operator needs s > 0",
            ));
        }
        GaussianMixtureSpec::new(self.s, self.kappa, self.mode_b_conjugated)
    }

    /// The factor multiplying the mixture-operator norm in the fidelity
    /// bound: `lambda' / (s * (1 - xi^2))`. Errors where `s = 0`.
    pub fn norm_prefactor(&self) -> Result<T> {
        if self.s <= T::zero() {
            return Err(domain(
                "the uncancelled witness bound is singular at the feasibility \
                 boundary (s = 0); use witness_bound, which cancels the factor",
            ));
        }
        Ok(self.lambda_canonical / (self.s * (T::one() - self.xi * self.xi)))
    }
}

/// The fidelity limit certified by the witness at parameter `xi`, in the
/// cancelled closed form (finite on the whole feasible window, including
/// the `s = 0` boundary):
///
/// * conjugate target: `lambda' / ((1 - xi^2) * (n' + lambda' + 1))`
/// * direct target:
///   `2*lambda' / ((1 - xi^2) * (n' + lambda' + 1 + sqrt((n'+lambda'+1)^2 - 4*n'/xi^2)))`
///
/// with `(n', lambda')` the canonical-frame task parameters. The
/// discriminant is nonnegative on the feasible window; tiny negative
/// rounding is clamped.
pub fn witness_bound<T: Real>(task: &TaskSpec<T>, xi: T) -> Result<T> {
    let params = WitnessParams::for_task(task, xi)?;
    let (n, lam) = canonical_frame(task);
    let one = T::one();
    let window = one - xi * xi;
    let m1 = n + lam + one;
    if task.conjugate() {
        Ok(lam / (window * m1))
    } else {
        let disc_raw = m1 * m1 - (T::of(4.0) * n) / (xi * xi);
        let clamp = T::validation_eps(1e-10) * m1 * m1;
        if disc_raw < -clamp {
            // Unreachable when for_task accepted xi (s >= 0 implies the
            // discriminant is at least (n'+lambda'-1)^2).
            return Err(Error::Internal(format!(
                "witness discriminant {disc_raw} is negative despite feasible \
                 parameters (s = {})",
                params.s()
            )));
        }
        let disc = disc_raw.max(T::zero());
        Ok(T::of(2.0) * lam / (window * (m1 + disc.sqrt())))
    }
}

/// Minimizes [`witness_bound`] over the feasible window of `xi` with a grid
/// scan (at least [`MIN_WITNESS_GRID`] points) plus golden-section
/// refinement. Returns `(xi_opt, bound)`.
///
/// The minimum sits at the lower feasibility edge, where the witness value
/// coincides with the closed-form limits; the numeric search is kept
/// deliberately assumption-free so that it would expose any window where
/// an interior `xi` did better.
pub fn witness_bound_optimize<T: Real>(
    task: &TaskSpec<T>,
    grid_points: usize,
) -> Result<(T, T)> {
    if grid_points < MIN_WITNESS_GRID {
        return Err(usage(format!(
            "witness optimization needs a grid of at least {MIN_WITNESS_GRID} \
             points (got {grid_points})"
        )));
    }
    let (n, lam) = canonical_frame(task);
    let mut lo = (n / (n + lam)).sqrt();
    if !task.conjugate() {
        lo = lo.max(n.sqrt());
    }
    let hi = T::one() - T::of(XI_CEILING_GAP);
    if !(lo < hi) {
        return Err(Error::Internal(format!(
            "witness feasible window is empty for this task (xi >= {lo} \
             required, ceiling {hi}); the task lies outside the regime the \
             witness family covers"
        )));
    }
    let f = |xi: T| witness_bound(task, xi).unwrap_or_else(|_| T::infinity());
    let tol = T::validation_eps(1e-12) * (T::one() + lo);
    let (xi_opt, value) = grid_refine_min(&f, lo, hi, grid_points, tol);
    if !value.is_finite() {
        return Err(Error::Internal(
            "witness minimization produced a non-finite value".into(),
        ));
    }
    Ok((xi_opt, value))
}
