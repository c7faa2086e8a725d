//! One function per subcommand.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use disciso::density::{rational_rate, RationalMatrix, SequenceSource};
use disciso::discretize::ChainWalker;
use disciso::lattice::inner_extent;
use disciso::{
    bohr_mean, diff_histogram, equidistribution_discrepancy, find_translations, integer_ball, rate_convergence,
    rate_curve, rotate_raster, tau_geometric, tau_rotation_closed_form, Execution, Isometry, Raster, SamplingScheme,
    TorusSampler, WindowedSet,
};
use serde::Serialize;

use crate::config::{CommandKind, ExperimentConfig, UsageError};
use crate::output::{emit_text, emit_with_sidecar, read_file, with_header};
use crate::validate::{format_report, validation_checks};

/// What a command did: a short human-readable summary, the files written
/// and whether everything it checked passed.
#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub summary: String,
    pub files: Vec<PathBuf>,
    pub passed: bool,
}

impl Outcome {
    fn new(summary: String, files: Vec<PathBuf>) -> Self {
        Outcome { summary, files, passed: true }
    }
}

/// Runs the command selected in `config`.
pub fn run(config: &ExperimentConfig) -> anyhow::Result<Outcome> {
    config.check()?;
    match config.command {
        CommandKind::TauCurve => cmd_tau_curve(config),
        CommandKind::GammaImage => cmd_gamma_image(config),
        CommandKind::TauSingle => cmd_tau_single(config),
        CommandKind::RhoMap => cmd_rho_map(config),
        CommandKind::Validate => cmd_validate(config),
        CommandKind::Translations => cmd_translations(config),
        CommandKind::RotateImage => cmd_rotate_image(config),
        CommandKind::Equidistribution => cmd_equidistribution(config),
    }
}

fn require_output(config: &ExperimentConfig) -> anyhow::Result<&Path> {
    config
        .output
        .as_deref()
        .ok_or_else(|| anyhow::Error::new(UsageError(format!("{} needs --out", config.command.name()))))
}

/// Mean `τ^k` and its standard error for `k = 1..=kmax` as CSV.
pub fn cmd_tau_curve(config: &ExperimentConfig) -> anyhow::Result<Outcome> {
    let source = match config.fixed_isometry()? {
        Some(p) => SequenceSource::Fixed(p),
        None => SequenceSource::Sampled { dim: config.dim },
    };
    let curve = rate_curve(&source, config.seed, config.kmax, config.radius, config.trials, Execution::default())?;
    let mut body = String::from("k,tau_mean,tau_stderr\n");
    for e in &curve.entries {
        writeln!(body, "{},{},{}", e.k, e.tau, e.stderr)?;
    }
    let text = with_header(config, &[], &body);
    let files = emit_text(config, &text)?.into_iter().collect();
    let last = curve.entries.last().expect("kmax >= 1");
    Ok(Outcome::new(format!("tau^{} = {} (stderr {})", last.k, last.tau, last.stderr), files))
}

/// Black-on-white picture of `Γ_k ∩ [-R, R]²` (black = member).
fn gamma_raster(set: &WindowedSet, r: f64) -> Raster {
    let e = inner_extent(r).max(0);
    let side = (2 * e + 1) as usize;
    let mut img = Raster::new(side, side, 1, 255);
    for row in 0..side {
        for col in 0..side {
            let p = [col as i64 - e, e - row as i64];
            if set.bits().contains(&p) {
                img.set_pixel(col, row, &[0]);
            }
        }
    }
    img
}

#[derive(Serialize)]
struct GammaStats {
    k: usize,
    density: f64,
}

/// Output path for step `k` when several steps are rendered.
fn numbered(path: &Path, k: usize) -> PathBuf {
    let stem = path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    let name = match path.extension() {
        Some(ext) => format!("{stem}_k{k}.{}", ext.to_string_lossy()),
        None => format!("{stem}_k{k}"),
    };
    path.with_file_name(name)
}

/// PGM images of `Γ_k` for `k = kmax`, or for every `k` in `--ks`, all
/// prefixes of one sequence.
pub fn cmd_gamma_image(config: &ExperimentConfig) -> anyhow::Result<Outcome> {
    if config.dim != 2 {
        return Err(UsageError("gamma-image draws planar sets; use --dim 2".into()).into());
    }
    let out = require_output(config)?;
    let (ks, multi) = match &config.ks {
        Some(ks) if !ks.is_empty() => (ks.clone(), true),
        _ => (vec![config.kmax], false),
    };
    let kmax = ks.iter().copied().max().unwrap_or(0);
    let seq = config.sequence(kmax, 0)?;
    let mut files = Vec::new();
    let mut summary = String::new();
    for &k in &ks {
        let prefix = seq.prefix(k);
        let mut walker = ChainWalker::new(&prefix, config.radius, Execution::default())?;
        while walker.advance() {}
        let set = walker.current();
        let density = set.density_in_ball(config.radius)?;
        let path = if multi { numbered(out, k) } else { out.to_path_buf() };
        let img = gamma_raster(set, config.radius);
        let side = emit_with_sidecar(config, &path, &img.to_pnm_bytes(), &GammaStats { k, density })?;
        writeln!(summary, "k={k} density={density} -> {}", path.display())?;
        files.push(path);
        files.push(side);
    }
    Ok(Outcome::new(summary.trim_end().to_string(), files))
}

/// Rate of injectivity of one sequence with its convergence check and,
/// for a single step, the available predictions.
pub fn cmd_tau_single(config: &ExperimentConfig) -> anyhow::Result<Outcome> {
    let seq = config.sequence(config.kmax, 0)?;
    let conv = rate_convergence(&seq, config.radius)?;
    let mut lines = vec![
        format!("tau_R={}", conv.at_r),
        format!("tau_2R={}", conv.at_2r),
        format!("gap={}", conv.gap),
        format!("converged={}", conv.converged),
    ];
    if config.kmax == 1 {
        let p = &seq.items()[0];
        if let Some(t) = config.theta {
            lines.push(format!("closed_form={}", tau_rotation_closed_form(t)));
        }
        if let Some(m) = RationalMatrix::from_isometry(p) {
            lines.push(format!("residue_oracle={}", rational_rate(&m)));
        }
        if p.rational_rows().is_empty() {
            let sampler = TorusSampler::new(100_000, config.seed, SamplingScheme::LowDiscrepancy)?;
            let g = tau_geometric(p, &sampler);
            lines.push(format!("geometric={}", g.value));
            lines.push(format!("geometric_half_width={}", g.half_width));
        }
    }
    let mut body = lines.join("\n");
    body.push('\n');
    let text = with_header(config, &[], &body);
    let files = emit_text(config, &text)?.into_iter().collect();
    let mut out = Outcome::new(format!("tau^{} = {}", config.kmax, conv.at_r), files);
    if !conv.converged {
        out.summary.push_str(" (not converged: rates at R and 2R differ by more than 3/sqrt(R))");
    }
    Ok(out)
}

fn last_stage(config: &ExperimentConfig) -> anyhow::Result<WindowedSet> {
    let seq = config.sequence(config.kmax, 0)?;
    let mut walker = ChainWalker::new(&seq, config.radius, Execution::default())?;
    while walker.advance() {}
    Ok(walker.current().clone())
}

fn coords_csv(v: &[i64]) -> String {
    v.iter().map(|c| c.to_string()).collect::<Vec<_>>().join(",")
}

fn coord_names(n: usize) -> String {
    (1..=n).map(|i| format!("v{i}")).collect::<Vec<_>>().join(",")
}

/// Difference frequencies of `Γ_kmax` on `‖v‖_∞ ≤ vmax` (default 20).
pub fn cmd_rho_map(config: &ExperimentConfig) -> anyhow::Result<Outcome> {
    let set = last_stage(config)?;
    let h = diff_histogram(&set, config.vmax.unwrap_or(20))?;
    let mean = bohr_mean(&h);
    let mut body = format!("{},rho\n", coord_names(set.dim()));
    for (v, f) in &h.freqs {
        writeln!(body, "{},{f}", coords_csv(&v.0))?;
    }
    let extra = [
        format!("base_density={}", h.base_density),
        format!("bohr_mean={mean}"),
        format!("window_radius={}", h.window_radius),
    ];
    let text = with_header(config, &extra, &body);
    let files = emit_text(config, &text)?.into_iter().collect();
    Ok(Outcome::new(format!("bohr_mean={mean} base_density={}", h.base_density), files))
}

/// All ε-translations of `Γ_kmax` with `‖v‖_∞ ≤ vmax` (default 50).
pub fn cmd_translations(config: &ExperimentConfig) -> anyhow::Result<Outcome> {
    let set = last_stage(config)?;
    let eps = config.eps.unwrap_or(0.05);
    let search = config.vmax.unwrap_or(50) as f64;
    let found = find_translations(&set, eps, search)?;
    let mut body = format!("{},defect\n", coord_names(set.dim()));
    for t in &found {
        writeln!(body, "{},{}", coords_csv(&t.vector.0), t.defect)?;
    }
    let nonzero = found.iter().filter(|t| !t.vector.is_zero()).count();
    let text = with_header(config, &[format!("nonzero_translations={nonzero}")], &body);
    let files = emit_text(config, &text)?.into_iter().collect();
    Ok(Outcome::new(format!("{nonzero} nonzero translations with defect < {eps}"), files))
}

#[derive(Serialize)]
struct RotationSummary {
    hole_fraction: f64,
    collision_fraction: f64,
    step_density: Vec<f64>,
}

/// Applies the discretized sequence to a PGM/PPM raster.
pub fn cmd_rotate_image(config: &ExperimentConfig) -> anyhow::Result<Outcome> {
    if config.dim != 2 {
        return Err(UsageError("rotate-image needs --dim 2".into()).into());
    }
    let input =
        config.input.as_deref().ok_or_else(|| anyhow::Error::new(UsageError("rotate-image needs --in".into())))?;
    let out = require_output(config)?;
    let bytes = read_file(input)?;
    let img = Raster::from_pnm_bytes(&bytes).map_err(|e| anyhow::anyhow!("{}: {e}", input.display()))?;
    let seq = config.sequence(config.kmax, 0)?;
    let background = vec![255u8; img.channels];
    let (rotated, stats) = rotate_raster(&img, &seq, &background)?;
    let summary = RotationSummary {
        hole_fraction: stats.hole_fraction,
        collision_fraction: stats.collision_fraction,
        step_density: stats.step_density.clone(),
    };
    let side = emit_with_sidecar(config, out, &rotated.to_pnm_bytes(), &summary)?;
    let densities: Vec<String> = stats.step_density.iter().map(|d| format!("{d:.4}")).collect();
    Ok(Outcome::new(
        format!(
            "hole_fraction={} collision_fraction={} step_density=[{}]",
            stats.hole_fraction,
            stats.collision_fraction,
            densities.join(",")
        ),
        vec![out.to_path_buf(), side],
    ))
}

/// Box-counting discrepancy of `P·x mod Z^n` over the integer ball.
pub fn cmd_equidistribution(config: &ExperimentConfig) -> anyhow::Result<Outcome> {
    let p = match config.fixed_isometry()? {
        Some(p) => p,
        None => Isometry::sample(config.dim, config.seed)?,
    };
    let ball = integer_ball(config.radius, config.dim)?;
    let d = equidistribution_discrepancy(&p, &ball, config.bins)?;
    let text = with_header(config, &[], &format!("discrepancy={d}\n"));
    let files = emit_text(config, &text)?.into_iter().collect();
    Ok(Outcome::new(format!("discrepancy={d}"), files))
}

/// Runs the cross-validation checks and writes one line per check.
pub fn cmd_validate(config: &ExperimentConfig) -> anyhow::Result<Outcome> {
    let checks = validation_checks(config)?;
    let text = with_header(config, &[], &format_report(&checks));
    let files = emit_text(config, &text)?.into_iter().collect();
    let failed = checks.iter().filter(|c| !c.passed).count();
    Ok(Outcome { summary: format!("{} checks, {failed} failed", checks.len()), files, passed: failed == 0 })
}
