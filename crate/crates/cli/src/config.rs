//! Experiment configuration shared by every subcommand.

use std::f64::consts::PI;
use std::fmt;
use std::path::PathBuf;

use disciso::{Isometry, IsometrySequence};
use serde::Serialize;

/// Invalid command-line input; the binary exits with status 2.
#[derive(Debug, Clone, PartialEq)]
pub struct UsageError(pub String);

impl fmt::Display for UsageError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for UsageError {}

fn usage(msg: impl Into<String>) -> anyhow::Error {
    anyhow::Error::new(UsageError(msg.into()))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum CommandKind {
    TauCurve,
    GammaImage,
    TauSingle,
    RhoMap,
    Validate,
    Translations,
    RotateImage,
    Equidistribution,
}

impl CommandKind {
    pub fn name(self) -> &'static str {
        match self {
            CommandKind::TauCurve => "tau-curve",
            CommandKind::GammaImage => "gamma-image",
            CommandKind::TauSingle => "tau-single",
            CommandKind::RhoMap => "rho-map",
            CommandKind::Validate => "validate",
            CommandKind::Translations => "translations",
            CommandKind::RotateImage => "rotate-image",
            CommandKind::Equidistribution => "equidistribution",
        }
    }

    /// Number of steps used when `--kmax` is not given.
    pub fn default_kmax(self) -> usize {
        match self {
            CommandKind::TauCurve => 200,
            CommandKind::GammaImage => 50,
            CommandKind::RotateImage => 10,
            _ => 1,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExperimentConfig {
    pub command: CommandKind,
    pub dim: usize,
    pub radius: f64,
    pub kmax: usize,
    pub trials: usize,
    pub seed: u64,
    pub theta: Option<f64>,
    pub pythagorean: Option<[i64; 3]>,
    pub vmax: Option<i64>,
    pub eps: Option<f64>,
    pub bins: usize,
    /// Several step counts for `gamma-image`, rendered from one sequence.
    pub ks: Option<Vec<usize>>,
    pub input: Option<PathBuf>,
    /// Destination; not echoed into file headers so that reruns to other
    /// paths produce identical bytes.
    #[serde(skip)]
    pub output: Option<PathBuf>,
}

pub const DEFAULT_SEED: u64 = 2024;

impl ExperimentConfig {
    pub fn new(command: CommandKind) -> Self {
        ExperimentConfig {
            command,
            dim: 2,
            radius: 500.0,
            kmax: command.default_kmax(),
            trials: 50,
            seed: DEFAULT_SEED,
            theta: None,
            pythagorean: None,
            vmax: None,
            eps: None,
            bins: 10,
            ks: None,
            input: None,
            output: None,
        }
    }

    pub fn check(&self) -> anyhow::Result<()> {
        if self.dim == 0 {
            return Err(usage("--dim must be at least 1"));
        }
        if !(self.radius > 0.0) || !self.radius.is_finite() {
            return Err(usage("--radius must be a positive number"));
        }
        if self.trials == 0 {
            return Err(usage("--trials must be at least 1"));
        }
        if self.bins < 2 {
            return Err(usage("--bins must be at least 2"));
        }
        if self.kmax == 0 && self.command != CommandKind::GammaImage {
            return Err(usage("--kmax must be at least 1"));
        }
        if matches!(self.vmax, Some(v) if v < 0) {
            return Err(usage("--vmax must be nonnegative"));
        }
        if matches!(self.eps, Some(e) if !(e > 0.0)) {
            return Err(usage("--eps must be positive"));
        }
        if self.theta.is_some() && self.pythagorean.is_some() {
            return Err(usage("--theta and --pythagorean are mutually exclusive"));
        }
        if (self.theta.is_some() || self.pythagorean.is_some()) && self.dim != 2 {
            return Err(usage("--theta and --pythagorean need --dim 2"));
        }
        if matches!(self.theta, Some(t) if !t.is_finite()) {
            return Err(usage("--theta must be finite"));
        }
        Ok(())
    }

    /// The fixed isometry selected by `--theta` or `--pythagorean`.
    pub fn fixed_isometry(&self) -> anyhow::Result<Option<Isometry>> {
        if let Some(t) = self.theta {
            return Ok(Some(Isometry::rotation2d(t)?));
        }
        if let Some([p, q, r]) = self.pythagorean {
            return Isometry::pythagorean(p, q, r).map(Some).map_err(|e| usage(e.to_string()));
        }
        Ok(None)
    }

    /// `k` copies of the fixed isometry, or `k` sampled isometries from
    /// substream `stream` of the seed.
    pub fn sequence(&self, k: usize, stream: u64) -> anyhow::Result<IsometrySequence> {
        Ok(match self.fixed_isometry()? {
            Some(p) => IsometrySequence::repeat(&p, k),
            None => IsometrySequence::sampled(self.dim, k, self.seed, stream)?,
        })
    }

    /// `key=value` lines describing the full configuration, in a fixed order.
    pub fn header_lines(&self) -> Vec<String> {
        let mut lines = vec![format!("disciso {} {}", self.command.name(), env!("CARGO_PKG_VERSION"))];
        if let Ok(serde_json::Value::Object(map)) = serde_json::to_value(self) {
            for (k, v) in map {
                let shown = match v {
                    serde_json::Value::Null => continue,
                    serde_json::Value::String(s) => s,
                    other => other.to_string(),
                };
                lines.push(format!("{k}={shown}"));
            }
        }
        lines
    }
}

/// Parses an angle in radians: a plain number or a multiple of π such as
/// `pi/4`, `-pi/6`, `3pi/4`, `2*pi/3` or `0.5pi`.
pub fn parse_angle(text: &str) -> Result<f64, String> {
    let t: String = text.chars().filter(|c| !c.is_whitespace()).collect::<String>().to_lowercase();
    let t = t.replace('π', "pi");
    let (num, den) = match t.split_once('/') {
        Some((a, b)) => (a, Some(b)),
        None => (t.as_str(), None),
    };
    let numerator = if let Some(coef) = num.strip_suffix("pi") {
        let coef = coef.strip_suffix('*').unwrap_or(coef);
        let c = match coef {
            "" | "+" => 1.0,
            "-" => -1.0,
            c => c.parse::<f64>().map_err(|_| format!("bad angle coefficient in {text:?}"))?,
        };
        c * PI
    } else {
        num.parse::<f64>().map_err(|_| format!("bad angle {text:?}"))?
    };
    let value = match den {
        Some(d) => {
            let d = d.parse::<f64>().map_err(|_| format!("bad angle denominator in {text:?}"))?;
            if d == 0.0 {
                return Err(format!("zero denominator in {text:?}"));
            }
            numerator / d
        }
        None => numerator,
    };
    if value.is_finite() {
        Ok(value)
    } else {
        Err(format!("angle {text:?} is not finite"))
    }
}

/// Parses `p,q,r`.
pub fn parse_triple(text: &str) -> Result<[i64; 3], String> {
    let parts: Vec<&str> = text.split(',').map(str::trim).collect();
    if parts.len() != 3 {
        return Err(format!("expected p,q,r, got {text:?}"));
    }
    let mut out = [0i64; 3];
    for (o, p) in out.iter_mut().zip(parts) {
        *o = p.parse().map_err(|_| format!("bad integer {p:?} in {text:?}"))?;
    }
    Ok(out)
}
