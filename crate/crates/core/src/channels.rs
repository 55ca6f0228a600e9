//! Phase-insensitive channel families and transformation-task fidelities.
//!
//! A *task* asks a channel to turn coherent inputs `|sqrt(n_in) * alpha>`
//! into targets `|sqrt(eta) * alpha>` (or the conjugate target
//! `|sqrt(eta) * conj(alpha)>`), with task amplitudes drawn from the
//! isotropic Gaussian prior `p_lambda(alpha) = (lambda/pi) *
//! exp(-lambda*|alpha|^2)`. Every channel kind here maps coherent inputs to
//! displaced thermal states, so both the per-input and the prior-averaged
//! fidelities have closed forms of a common shape:
//!
//! ```text
//! f(alpha) = (1/a) * exp(-(b/a) * |alpha|^2),      F_avg = lambda / (lambda*a + b)
//! ```
//!
//! with per-kind coefficients `(a, b)`. The numeric routes (radial
//! quadrature, Monte Carlo, truncated number-basis simulation) exist to
//! check those closed forms rather than to replace them.

use num_complex::Complex;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{domain, usage, Result};
use crate::fock::{
    amplifier_apply, coherent_vector, coherent_vector_lenient, displaced_thermal,
    fidelity_unchecked, thermal_operator, FockOperator, TruncationSpec,
};
use crate::quadrature::GaussLaguerre;
use crate::scalar::Real;

/// Minimum radial node count accepted by the quadrature averaging routes.
pub const MIN_QUADRATURE_NODES: usize = 8;

/// Samples per Monte Carlo batch; the batch layout is fixed so estimates are
/// reproducible regardless of how batches are scheduled across threads.
const MC_BATCH: usize = 4096;

// ---------------------------------------------------------------------------
// Types

/// The channel families compared against the fidelity limits.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ChannelSpec<T> {
    /// Phase-insensitive amplifier of gain `g >= 1`.
    Amplifier { gain: T },
    /// Pure-loss attenuator of transmission `t` in `[0, 1]`.
    Attenuator { transmission: T },
    /// Measure-and-prepare channel: heterodyne the input, prepare the
    /// conjugated outcome rescaled by `c >= 0`.
    MpConjugator { scale: T },
    /// Measure-and-prepare channel preparing the (unconjugated) outcome
    /// rescaled by `c >= 0`.
    MpDirect { scale: T },
    /// The identity channel.
    Identity,
}

impl<T: Real> ChannelSpec<T> {
    pub fn amplifier(gain: T) -> Result<Self> {
        let c = Self::Amplifier { gain };
        c.validate()?;
        Ok(c)
    }

    pub fn attenuator(transmission: T) -> Result<Self> {
        let c = Self::Attenuator { transmission };
        c.validate()?;
        Ok(c)
    }

    pub fn mp_conjugator(scale: T) -> Result<Self> {
        let c = Self::MpConjugator { scale };
        c.validate()?;
        Ok(c)
    }

    pub fn mp_direct(scale: T) -> Result<Self> {
        let c = Self::MpDirect { scale };
        c.validate()?;
        Ok(c)
    }

    pub fn identity() -> Self {
        Self::Identity
    }

    /// Re-checks the parameter range (variants can be built literally, so
    /// consuming routines validate before use).
    pub fn validate(&self) -> Result<()> {
        match *self {
            Self::Amplifier { gain } => {
                if !(gain.is_finite() && gain >= T::one()) {
                    return Err(domain(format!(
                        "amplifier gain must satisfy g >= 1 (got {gain})"
                    )));
                }
            }
            Self::Attenuator { transmission } => {
                if !(transmission.is_finite()
                    && transmission >= T::zero()
                    && transmission <= T::one())
                {
                    return Err(domain(format!(
                        "attenuator transmission must lie in [0, 1] (got {transmission})"
                    )));
                }
            }
            Self::MpConjugator { scale } | Self::MpDirect { scale } => {
                if !(scale.is_finite() && scale >= T::zero()) {
                    return Err(domain(format!(
                        "measure-and-prepare scale must be nonnegative (got {scale})"
                    )));
                }
            }
            Self::Identity => {}
        }
        Ok(())
    }

    /// Stable lower-case label used in tabular output.
    pub fn label(&self) -> &'static str {
        match self {
            Self::Amplifier { .. } => "amplifier",
            Self::Attenuator { .. } => "attenuator",
            Self::MpConjugator { .. } => "mp_conjugator",
            Self::MpDirect { .. } => "mp_direct",
            Self::Identity => "identity",
        }
    }

    /// The single scalar parameter, if the kind has one.
    pub fn parameter(&self) -> Option<T> {
        match *self {
            Self::Amplifier { gain } => Some(gain),
            Self::Attenuator { transmission } => Some(transmission),
            Self::MpConjugator { scale } | Self::MpDirect { scale } => Some(scale),
            Self::Identity => None,
        }
    }
}

/// A coherent-amplitude transformation task: inputs `|sqrt(n_in)*alpha>`,
/// targets `|sqrt(eta)*alpha>` (or the conjugate when `conjugate` is set),
/// prior width parameter `lambda > 0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TaskSpec<T> {
    n_in: T,
    eta: T,
    lambda: T,
    conjugate: bool,
}

impl<T: Real> TaskSpec<T> {
    pub fn new(n_in: T, eta: T, lambda: T, conjugate: bool) -> Result<Self> {
        for (name, v) in [("n_in", n_in), ("eta", eta), ("lambda", lambda)] {
            if !(v.is_finite() && v > T::zero()) {
                return Err(domain(format!(
                    "task parameter {name} must be positive and finite (got {v})"
                )));
            }
        }
        Ok(Self {
            n_in,
            eta,
            lambda,
            conjugate,
        })
    }

    pub fn n_in(&self) -> T {
        self.n_in
    }

    pub fn eta(&self) -> T {
        self.eta
    }

    pub fn lambda(&self) -> T {
        self.lambda
    }

    pub fn conjugate(&self) -> bool {
        self.conjugate
    }
}

// ---------------------------------------------------------------------------
// Closed forms

/// The `(a, b)` coefficients of the common fidelity shape; errors when the
/// channel kind cannot address the task's target orientation.
fn fidelity_coefficients<T: Real>(chan: &ChannelSpec<T>, task: &TaskSpec<T>) -> Result<(T, T)> {
    chan.validate()?;
    let n = task.n_in;
    let eta = task.eta;
    let root = |x: T| x.sqrt();
    match (*chan, task.conjugate) {
        (ChannelSpec::Amplifier { gain }, false) => {
            let d = root(gain * n) - root(eta);
            Ok((gain, d * d))
        }
        (ChannelSpec::Attenuator { transmission }, false) => {
            let d = root(transmission * n) - root(eta);
            Ok((T::one(), d * d))
        }
        (ChannelSpec::Identity, false) => {
            let d = root(n) - root(eta);
            Ok((T::one(), d * d))
        }
        (ChannelSpec::MpConjugator { scale }, true) | (ChannelSpec::MpDirect { scale }, false) => {
            let d = root(eta) - scale * root(n);
            Ok((T::one() + scale * scale, d * d))
        }
        (ChannelSpec::MpConjugator { .. }, false) => Err(usage(
            "mp_conjugator produces conjugated amplitudes; the task targets the direct amplitude",
        )),
        (ChannelSpec::MpDirect { .. }, true) => Err(usage(
            "mp_direct produces direct amplitudes; the task targets the conjugate amplitude",
        )),
        (_, true) => Err(usage(format!(
            "{} is phase-covariant and cannot address a conjugate-amplitude target; \
             use a measure-and-prepare channel",
            chan.label()
        ))),
    }
}

/// Fidelity between the channel output on `|sqrt(n_in)*alpha>` and the
/// task target at the same `alpha`. Depends on `alpha` only through
/// `|alpha|^2`.
pub fn per_input_fidelity<T: Real>(
    chan: &ChannelSpec<T>,
    alpha: Complex<T>,
    task: &TaskSpec<T>,
) -> Result<T> {
    let (a, b) = fidelity_coefficients(chan, task)?;
    Ok((-(b / a) * alpha.norm_sqr()).exp() / a)
}

/// Prior-averaged fidelity in closed form: `lambda / (lambda*a + b)`.
pub fn average_fidelity_closed<T: Real>(chan: &ChannelSpec<T>, task: &TaskSpec<T>) -> Result<T> {
    let (a, b) = fidelity_coefficients(chan, task)?;
    Ok(task.lambda / (task.lambda * a + b))
}

/// Prior-averaged fidelity by radial Gauss-Laguerre quadrature of the
/// per-input closed form (the angular integral is exact by phase
/// invariance). Checks the averaging step independently of the closed-form
/// average.
pub fn average_fidelity_quadrature<T: Real>(
    chan: &ChannelSpec<T>,
    task: &TaskSpec<T>,
    radial_nodes: usize,
) -> Result<T> {
    if radial_nodes < MIN_QUADRATURE_NODES {
        return Err(usage(format!(
            "radial averaging needs at least {MIN_QUADRATURE_NODES} nodes (got {radial_nodes})"
        )));
    }
    let (a, b) = fidelity_coefficients(chan, task)?;
    let rule = GaussLaguerre::<T>::new(radial_nodes)?;
    let ratio = b / (a * task.lambda);
    let mut acc = T::zero();
    for k in 0..radial_nodes {
        acc = acc + rule.weights[k] * (-ratio * rule.nodes[k]).exp();
    }
    Ok(acc / a)
}

fn batch_seed(seed: u64, batch: u64) -> u64 {
    // SplitMix64 of (seed XOR golden-ratio-striped batch index): decorrelates
    // batches while keeping the layout independent of thread scheduling.
    let mut z = seed ^ batch.wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Monte Carlo estimate of the prior-averaged fidelity.
///
/// Returns `(mean, standard_error)`. Amplitudes are drawn from the task
/// prior with a ChaCha8 generator; samples are organized into fixed batches
/// of 4096, each batch seeded by a SplitMix64 derivation of `(seed, batch)`,
/// and batch statistics are merged in index order — so results are
/// bit-reproducible for a given `(samples, seed)` no matter how many threads
/// run the batches.
pub fn average_fidelity_mc<T: Real>(
    chan: &ChannelSpec<T>,
    task: &TaskSpec<T>,
    samples: usize,
    seed: u64,
) -> Result<(T, T)> {
    if samples < 1000 {
        return Err(usage(format!(
            "Monte Carlo averaging needs at least 1000 samples (got {samples})"
        )));
    }
    let (a, b) = fidelity_coefficients(chan, task)?;
    let a64 = a.to_f64().expect("finite coefficient");
    let ratio = (b / a).to_f64().expect("finite coefficient");
    let sigma = (1.0 / (2.0 * task.lambda.to_f64().expect("finite lambda"))).sqrt();

    let n_batches = samples.div_ceil(MC_BATCH);
    let stats: Vec<(f64, f64, f64)> = (0..n_batches)
        .into_par_iter()
        .map(|bi| {
            let count = MC_BATCH.min(samples - bi * MC_BATCH);
            let mut rng = ChaCha8Rng::seed_from_u64(batch_seed(seed, bi as u64));
            let mut n = 0.0f64;
            let mut mean = 0.0f64;
            let mut m2 = 0.0f64;
            for _ in 0..count {
                let re: f64 = rng.sample(StandardNormal);
                let im: f64 = rng.sample(StandardNormal);
                let norm_sqr = (re * re + im * im) * sigma * sigma;
                let f = (-ratio * norm_sqr).exp() / a64;
                n += 1.0;
                let delta = f - mean;
                mean += delta / n;
                m2 += delta * (f - mean);
            }
            (n, mean, m2)
        })
        .collect();

    let (mut n, mut mean, mut m2) = (0.0f64, 0.0f64, 0.0f64);
    for (nb, mb, m2b) in stats {
        if nb == 0.0 {
            continue;
        }
        let delta = mb - mean;
        let total = n + nb;
        mean += delta * nb / total;
        m2 += m2b + delta * delta * n * nb / total;
        n = total;
    }
    let se = if m2 > 0.0 {
        (m2 / (n * (n - 1.0))).sqrt()
    } else {
        0.0
    };
    Ok((T::of(mean), T::of(se)))
}

// ---------------------------------------------------------------------------
// Truncated-basis routes

/// Output state of a measure-and-prepare channel on the coherent input
/// `|alpha_in>`: a displaced thermal state with mean `c * conj(alpha_in)`
/// (conjugator) or `c * alpha_in` (direct) and thermal occupation `c^2`.
pub fn mp_output_state<T: Real>(
    chan: &ChannelSpec<T>,
    alpha_in: Complex<T>,
    trunc: TruncationSpec<T>,
) -> Result<FockOperator<T>> {
    chan.validate()?;
    let (mu, scale) = match *chan {
        ChannelSpec::MpConjugator { scale } => (alpha_in.conj().scale(scale), scale),
        ChannelSpec::MpDirect { scale } => (alpha_in.scale(scale), scale),
        _ => {
            return Err(usage(format!(
                "{} is not a measure-and-prepare channel",
                chan.label()
            )))
        }
    };
    displaced_thermal(mu, scale * scale, trunc)
}

/// Prior-averaged fidelity evaluated through the truncated number basis.
///
/// Every channel kind here sends coherent inputs to displaced thermal
/// states and commutes with displacements, so the radial average only needs
/// the channel's action on vacuum, overlapped with coherent vectors whose
/// amplitude carries the residual displacement `delta * |alpha|`. The
/// amplifier's vacuum action is computed through its Kraus representation
/// (not the closed form); the direct-input route at small amplitudes is
/// covered separately by tests, which justifies the displaced frame used
/// here at large ones where truncation would otherwise bite.
pub fn average_fidelity_fock<T: Real>(
    chan: &ChannelSpec<T>,
    task: &TaskSpec<T>,
    trunc: TruncationSpec<T>,
    radial_nodes: usize,
) -> Result<T> {
    if radial_nodes < MIN_QUADRATURE_NODES {
        return Err(usage(format!(
            "radial averaging needs at least {MIN_QUADRATURE_NODES} nodes (got {radial_nodes})"
        )));
    }
    // Validates parameter ranges and kind/orientation compatibility.
    let _ = fidelity_coefficients(chan, task)?;

    let n = task.n_in;
    let eta = task.eta;
    let (rho, delta) = match *chan {
        ChannelSpec::Amplifier { gain } => {
            let vac = FockOperator::pure_state(&coherent_vector(
                Complex::new(T::zero(), T::zero()),
                trunc,
            )?);
            let out = amplifier_apply(&vac, gain, trunc)?;
            (out, eta.sqrt() - (gain * n).sqrt())
        }
        ChannelSpec::Attenuator { transmission } => {
            let vac = FockOperator::pure_state(&coherent_vector(
                Complex::new(T::zero(), T::zero()),
                trunc,
            )?);
            (vac, (transmission * n).sqrt() - eta.sqrt())
        }
        ChannelSpec::Identity => {
            let vac = FockOperator::pure_state(&coherent_vector(
                Complex::new(T::zero(), T::zero()),
                trunc,
            )?);
            (vac, n.sqrt() - eta.sqrt())
        }
        ChannelSpec::MpConjugator { scale } | ChannelSpec::MpDirect { scale } => {
            let th = thermal_operator(scale * scale, trunc)?;
            (th, eta.sqrt() - scale * n.sqrt())
        }
    };

    let rule = GaussLaguerre::<T>::new(radial_nodes)?;
    let mut acc = T::zero();
    for k in 0..radial_nodes {
        let w = rule.weights[k];
        if w == T::zero() {
            continue;
        }
        let r = (rule.nodes[k] / task.lambda).sqrt();
        let v = coherent_vector_lenient(Complex::new(delta * r, T::zero()), trunc);
        acc = acc + w * fidelity_unchecked(&v, &rho);
    }
    Ok(acc)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn task(n: f64, eta: f64, lambda: f64, conj: bool) -> TaskSpec<f64> {
        TaskSpec::new(n, eta, lambda, conj).unwrap()
    }

    #[test]
    fn task_validation() {
        assert!(TaskSpec::new(1.0, 1.0, 0.0, false).is_err());
        assert!(TaskSpec::new(0.0, 1.0, 0.5, false).is_err());
        assert!(TaskSpec::new(1.0, -2.0, 0.5, false).is_err());
        assert!(TaskSpec::new(1.0, f64::NAN, 0.5, false).is_err());
    }

    #[test]
    fn channel_validation() {
        assert!(ChannelSpec::amplifier(0.99).is_err());
        assert!(ChannelSpec::attenuator(1.01).is_err());
        assert!(ChannelSpec::mp_conjugator(-0.1).is_err());
        assert!(ChannelSpec::amplifier(1.0).is_ok());
        assert!(ChannelSpec::attenuator(0.0).is_ok());
    }

    #[test]
    fn amplifier_per_input_spot_value() {
        let chan = ChannelSpec::amplifier(2.0).unwrap();
        let t = task(1.0, 4.0, 0.2, false);
        let f = per_input_fidelity(&chan, Complex::new(1.0, 0.0), &t).unwrap();
        let b = (2.0f64.sqrt() - 2.0).powi(2);
        assert_abs_diff_eq!(f, 0.5 * (-b / 2.0).exp(), epsilon = 1e-15);
        assert_abs_diff_eq!(f, 0.4211694400617696, epsilon = 1e-12);
        // Phase invariance.
        let g = per_input_fidelity(&chan, Complex::new(0.0, 1.0), &t).unwrap();
        assert_abs_diff_eq!(f, g, epsilon = 0.0);
    }

    #[test]
    fn gain_matched_amplifier_is_amplitude_independent() {
        let chan = ChannelSpec::amplifier(4.0).unwrap();
        let t = task(1.0, 4.0, 0.3, false);
        for alpha in [
            Complex::new(0.0, 0.0),
            Complex::new(1.0, 0.0),
            Complex::new(0.0, 2.0),
        ] {
            let f = per_input_fidelity(&chan, alpha, &t).unwrap();
            assert_abs_diff_eq!(f, 0.25, epsilon = 1e-15);
        }
    }

    #[test]
    fn closed_average_spot_values() {
        let amp = ChannelSpec::amplifier(2.0).unwrap();
        let f = average_fidelity_closed(&amp, &task(1.0, 4.0, 0.2, false)).unwrap();
        assert_abs_diff_eq!(f, 0.2 / (0.4 + (2.0f64.sqrt() - 2.0).powi(2)), epsilon = 1e-16);
        assert_abs_diff_eq!(f, 0.2691262, epsilon = 1e-7);

        // Vacuum-preparation limit of the conjugating channel.
        let mp = ChannelSpec::mp_conjugator(0.0).unwrap();
        let f = average_fidelity_closed(&mp, &task(1.0, 1.0, 0.5, true)).unwrap();
        assert_abs_diff_eq!(f, 1.0 / 3.0, epsilon = 1e-15);
    }

    #[test]
    fn orientation_mismatches_are_usage_errors() {
        use crate::error::Error;
        let t_conj = task(1.0, 1.0, 0.5, true);
        let t_dir = task(1.0, 1.0, 0.5, false);
        let cases: [(ChannelSpec<f64>, &TaskSpec<f64>); 4] = [
            (ChannelSpec::amplifier(2.0).unwrap(), &t_conj),
            (ChannelSpec::attenuator(0.5).unwrap(), &t_conj),
            (ChannelSpec::mp_conjugator(0.5).unwrap(), &t_dir),
            (ChannelSpec::mp_direct(0.5).unwrap(), &t_conj),
        ];
        for (chan, t) in cases {
            assert!(matches!(
                average_fidelity_closed(&chan, t).unwrap_err(),
                Error::Usage(_)
            ));
        }
    }

    #[test]
    fn quadrature_matches_closed_form() {
        let cases: [(ChannelSpec<f64>, TaskSpec<f64>); 3] = [
            (ChannelSpec::amplifier(2.0).unwrap(), task(1.0, 4.0, 0.2, false)),
            (
                ChannelSpec::mp_conjugator(2.0 / 3.0).unwrap(),
                task(1.0, 1.0, 0.5, true),
            ),
            (ChannelSpec::attenuator(0.7).unwrap(), task(2.0, 1.0, 0.8, false)),
        ];
        for (chan, t) in &cases {
            let closed = average_fidelity_closed(chan, t).unwrap();
            let quad = average_fidelity_quadrature(chan, t, 80).unwrap();
            assert_abs_diff_eq!(closed, quad, epsilon = 1e-10);
        }
        // Matched identity: integrand is exactly 1.
        let id = ChannelSpec::identity();
        let t = task(2.0, 2.0, 0.5, false);
        assert_eq!(average_fidelity_closed(&id, &t).unwrap(), 1.0);
        assert!(average_fidelity_quadrature(&id, &t, 80).unwrap() >= 1.0 - 1e-12);
    }

    #[test]
    fn quadrature_node_gate() {
        use crate::error::Error;
        let chan = ChannelSpec::amplifier(2.0).unwrap();
        assert!(matches!(
            average_fidelity_quadrature(&chan, &task(1.0, 4.0, 0.2, false), 7).unwrap_err(),
            Error::Usage(_)
        ));
    }

    #[test]
    fn mc_is_deterministic_and_consistent() {
        let chan = ChannelSpec::amplifier(2.0).unwrap();
        let t = task(1.0, 4.0, 0.2, false);
        let (m1, s1) = average_fidelity_mc(&chan, &t, 20_000, 42).unwrap();
        let (m2, s2) = average_fidelity_mc(&chan, &t, 20_000, 42).unwrap();
        assert_eq!(m1, m2);
        assert_eq!(s1, s2);
        let closed = average_fidelity_closed(&chan, &t).unwrap();
        assert!((m1 - closed).abs() < 4.0 * s1, "mc {m1} vs closed {closed} (se {s1})");
    }

    #[test]
    fn mc_constant_integrand_has_zero_error() {
        let id = ChannelSpec::identity();
        let t = task(1.5, 1.5, 0.4, false);
        let (m, s) = average_fidelity_mc(&id, &t, 4096, 7).unwrap();
        assert_eq!(m, 1.0);
        assert_eq!(s, 0.0);
    }

    #[test]
    fn mc_sample_gate() {
        use crate::error::Error;
        let chan = ChannelSpec::identity();
        assert!(matches!(
            average_fidelity_mc(&chan, &task(1.0, 1.0, 0.5, false), 999, 1).unwrap_err(),
            Error::Usage(_)
        ));
    }

    #[test]
    fn mp_output_reproduces_per_input_fidelity() {
        let trunc = TruncationSpec::new(60, 1e-8).unwrap();
        let chan = ChannelSpec::mp_conjugator(2.0 / 3.0).unwrap();
        let t = task(1.0, 1.0, 0.5, true);

        let rho = mp_output_state(&chan, Complex::new(1.0, 0.0), trunc).unwrap();
        let target = coherent_vector(Complex::new(1.0, 0.0), trunc).unwrap();
        let f_fock = crate::fock::pure_state_fidelity(&target, &rho).unwrap();
        let f_closed = per_input_fidelity(&chan, Complex::new(1.0, 0.0), &t).unwrap();
        assert_abs_diff_eq!(f_closed, (9.0 / 13.0) * (-1.0f64 / 13.0).exp(), epsilon = 1e-15);
        assert_abs_diff_eq!(f_fock, f_closed, epsilon = 1e-9);
    }

    #[test]
    fn mp_output_conjugates_the_phase() {
        let trunc = TruncationSpec::new(60, 1e-8).unwrap();
        let chan = ChannelSpec::mp_conjugator(2.0 / 3.0).unwrap();
        let t = task(1.0, 1.0, 0.5, true);
        let phase = std::f64::consts::FRAC_PI_3;
        let alpha_in = Complex::from_polar(1.0, phase);

        let rho = mp_output_state(&chan, alpha_in, trunc).unwrap();
        let target = coherent_vector(alpha_in.conj(), trunc).unwrap();
        let f_fock = crate::fock::pure_state_fidelity(&target, &rho).unwrap();
        let f_closed = per_input_fidelity(&chan, alpha_in, &t).unwrap();
        assert_abs_diff_eq!(f_fock, f_closed, epsilon = 1e-9);
        // An implementation preparing the unconjugated outcome would land far
        // away from the conjugate target.
        let wrong = mp_output_state(
            &ChannelSpec::mp_direct(2.0 / 3.0).unwrap(),
            alpha_in,
            trunc,
        )
        .unwrap();
        let f_wrong = crate::fock::pure_state_fidelity(&target, &wrong).unwrap();
        assert!((f_wrong - f_closed).abs() > 0.1);
    }

    #[test]
    fn mp_output_rejects_other_kinds() {
        use crate::error::Error;
        let trunc = TruncationSpec::new(20, 1e-8).unwrap();
        let chan = ChannelSpec::amplifier(2.0).unwrap();
        assert!(matches!(
            mp_output_state(&chan, Complex::new(0.0, 0.0), trunc).unwrap_err(),
            Error::Usage(_)
        ));
    }

    #[test]
    fn fock_average_matches_closed_form() {
        let trunc = TruncationSpec::new(60, 1e-8).unwrap();
        let cases: [(ChannelSpec<f64>, TaskSpec<f64>); 3] = [
            (ChannelSpec::amplifier(2.0).unwrap(), task(1.0, 4.0, 0.2, false)),
            (
                ChannelSpec::mp_conjugator(2.0 / 3.0).unwrap(),
                task(1.0, 1.0, 0.5, true),
            ),
            (ChannelSpec::attenuator(0.5).unwrap(), task(1.0, 0.5, 0.7, false)),
        ];
        for (chan, t) in &cases {
            let closed = average_fidelity_closed(chan, t).unwrap();
            let fock = average_fidelity_fock(chan, t, trunc, 200).unwrap();
            assert_abs_diff_eq!(closed, fock, epsilon = 1e-7 * closed);
        }
    }
}
