//! Shared plumbing for the subcommands: error/exit-code mapping, artifact
//! output, float formatting, and the little grammars for grids and channel
//! lists.

use std::fmt;
use std::fs;
use std::io::Write;
use std::path::PathBuf;

use fidelim::channels::ChannelSpec;

/// Every subcommand failure is either bad input (exit 2) or a failed
/// check/verdict (exit 1). Success paths return their own exit code so a
/// flagged-but-well-formed certification can still print its artifact.
#[derive(Debug)]
pub enum CliError {
    /// Invalid arguments, unreadable input, unwritable output. Exit 2.
    Usage(String),
    /// A numerical check failed. Exit 1.
    Check(String),
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(msg) | CliError::Check(msg) => write!(f, "{msg}"),
        }
    }
}

impl From<fidelim::Error> for CliError {
    fn from(e: fidelim::Error) -> Self {
        CliError::Usage(e.to_string())
    }
}

pub fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

/// Fixed-width scientific notation with 17 significant digits, enough to
/// round-trip any f64 exactly.
pub fn fmt_f(x: f64) -> String {
    format!("{x:.16e}")
}

/// Write a finished artifact to `--out` or stdout in one shot, so the bytes
/// are identical however many workers produced the rows.
pub fn emit(out: &Option<PathBuf>, content: &str) -> Result<(), CliError> {
    match out {
        Some(path) => fs::write(path, content)
            .map_err(|e| usage(format!("cannot write {}: {e}", path.display()))),
        None => {
            let stdout = std::io::stdout();
            let mut lock = stdout.lock();
            lock.write_all(content.as_bytes())
                .and_then(|()| lock.flush())
                .map_err(|e| usage(format!("cannot write to stdout: {e}")))
        }
    }
}

/// Inclusive linear grid from "min:max:steps"; "v" alone is a 1-point grid.
pub fn parse_grid(text: &str, what: &str) -> Result<Vec<f64>, CliError> {
    let bad = || {
        usage(format!(
            "{what} grid must be MIN:MAX:STEPS or a single value (got {text:?})"
        ))
    };
    let parts: Vec<&str> = text.split(':').collect();
    let parsed: Vec<f64> = parts
        .iter()
        .take(2)
        .map(|p| p.parse::<f64>())
        .collect::<Result<_, _>>()
        .map_err(|_| bad())?;
    match parts.len() {
        1 => {
            if !parsed[0].is_finite() {
                return Err(bad());
            }
            Ok(vec![parsed[0]])
        }
        3 => {
            let steps: usize = parts[2].parse().map_err(|_| bad())?;
            let (lo, hi) = (parsed[0], parsed[1]);
            if steps == 0 || !lo.is_finite() || !hi.is_finite() {
                return Err(bad());
            }
            if steps == 1 {
                return Ok(vec![lo]);
            }
            let h = (hi - lo) / (steps - 1) as f64;
            Ok((0..steps).map(|i| lo + h * i as f64).collect())
        }
        _ => Err(bad()),
    }
}

/// Task family selector shared by sweep and certify.
#[derive(Copy, Clone, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum TaskKind {
    /// Direct task: reproduce amplitude-scaled coherent states (gain eta).
    Amp,
    /// Conjugation task: reproduce conjugated coherent states at unit gain.
    Conj,
}

impl TaskKind {
    pub fn label(self) -> &'static str {
        match self {
            TaskKind::Amp => "amplification",
            TaskKind::Conj => "conjugation",
        }
    }
}

/// One entry of a `--channels` list. `opt` defers the parameter to the
/// per-task optimum of the family.
#[derive(Clone, Debug)]
pub enum ChannelChoice {
    Fixed(ChannelSpec<f64>),
    OptAmplifier,
    OptMp,
}

/// Parse one channel item. The bare family word `mp` resolves to the
/// measure-and-prepare variant matching the task orientation.
pub fn parse_channel(item: &str, kind: TaskKind) -> Result<ChannelChoice, CliError> {
    let mut split = item.splitn(2, ':');
    let family = split.next().unwrap_or("");
    let param = split.next();
    let need = |family: &str| -> Result<f64, CliError> {
        param
            .ok_or_else(|| usage(format!("channel {family:?} needs a parameter, e.g. {family}:2")))?
            .parse::<f64>()
            .map_err(|_| usage(format!("channel {item:?}: parameter is not a number")))
    };
    match (family, param) {
        ("identity", None) => {
            if kind == TaskKind::Conj {
                return Err(usage(
                    "identity cannot target the conjugation task; use mp channels",
                ));
            }
            Ok(ChannelChoice::Fixed(ChannelSpec::identity()))
        }
        ("amplifier", Some("opt")) => {
            if kind == TaskKind::Conj {
                return Err(usage(
                    "amplifier cannot target the conjugation task; use mp channels",
                ));
            }
            Ok(ChannelChoice::OptAmplifier)
        }
        ("mp", Some("opt")) => Ok(ChannelChoice::OptMp),
        ("amplifier", _) => {
            if kind == TaskKind::Conj {
                return Err(usage(
                    "amplifier cannot target the conjugation task; use mp channels",
                ));
            }
            Ok(ChannelChoice::Fixed(ChannelSpec::amplifier(need("amplifier")?)?))
        }
        ("attenuator", _) => {
            if kind == TaskKind::Conj {
                return Err(usage(
                    "attenuator cannot target the conjugation task; use mp channels",
                ));
            }
            Ok(ChannelChoice::Fixed(ChannelSpec::attenuator(need("attenuator")?)?))
        }
        ("mp", _) => {
            let c = need("mp")?;
            Ok(ChannelChoice::Fixed(match kind {
                TaskKind::Amp => ChannelSpec::mp_direct(c)?,
                TaskKind::Conj => ChannelSpec::mp_conjugator(c)?,
            }))
        }
        _ => Err(usage(format!(
            "unknown channel {item:?}; expected amplifier:G, attenuator:T, mp:C, \
             identity, or the families amplifier/mp with :opt"
        ))),
    }
}

/// Parse a comma-separated channel list; an empty string is an empty list.
pub fn parse_channels(list: &str, kind: TaskKind) -> Result<Vec<ChannelChoice>, CliError> {
    if list.trim().is_empty() {
        return Ok(Vec::new());
    }
    list.split(',')
        .map(|item| parse_channel(item.trim(), kind))
        .collect()
}
