//! Cross-validation checks between counting estimators, geometric
//! predictions and exact oracles.

use std::f64::consts::{FRAC_PI_4, FRAC_PI_6};
use std::fmt::Write as _;

use disciso::density::{rational_rate, RationalMatrix};
use disciso::rng::{substream, unit_f64};
use disciso::{
    bohr_mean, diff_frequency, diff_histogram, diffusion_step, equidistribution_discrepancy, image_chain, integer_ball,
    phi, rate_of_injectivity, rho_geometric, tau_geometric, tau_rotation_closed_form, IntPoint, Isometry,
    IsometrySequence, RealVec, SamplingScheme, TorusSampler,
};

use crate::config::ExperimentConfig;

#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: String,
    pub measured: f64,
    pub expected: String,
    pub tolerance: f64,
    pub passed: bool,
}

impl Check {
    fn within(name: impl Into<String>, measured: f64, expected: f64, tolerance: f64) -> Self {
        Check {
            name: name.into(),
            measured,
            expected: expected.to_string(),
            tolerance,
            passed: (measured - expected).abs() <= tolerance,
        }
    }

    fn at_most(name: impl Into<String>, measured: f64, bound: f64, tolerance: f64) -> Self {
        Check {
            name: name.into(),
            measured,
            expected: format!("<= {bound}"),
            tolerance,
            passed: measured <= bound + tolerance,
        }
    }

    fn at_least(name: impl Into<String>, measured: f64, bound: f64, tolerance: f64) -> Self {
        Check {
            name: name.into(),
            measured,
            expected: format!(">= {bound}"),
            tolerance,
            passed: measured >= bound - tolerance,
        }
    }
}

pub fn format_report(checks: &[Check]) -> String {
    let mut out = String::new();
    for c in checks {
        let _ = writeln!(
            out,
            "{} measured={} expected={} tolerance={} {}",
            c.name,
            c.measured,
            c.expected,
            c.tolerance,
            if c.passed { "PASS" } else { "FAIL" }
        );
    }
    out
}

fn one_step(p: &Isometry) -> IsometrySequence {
    IsometrySequence::repeat(p, 1)
}

/// Counting radius for checks in dimension `n`; the stored windows grow
/// like `R^n`.
fn counting_radius(r: f64, n: usize) -> f64 {
    match n {
        0..=2 => r,
        3 => r.min(100.0),
        _ => r.min(20.0),
    }
}

/// The cross-validation suite. Rotation checks use `--theta` when given
/// (π/4 and π/6 otherwise); the rational check uses `--pythagorean`
/// (3,4,5 otherwise).
pub fn validation_checks(config: &ExperimentConfig) -> anyhow::Result<Vec<Check>> {
    let r = config.radius;
    let seed = config.seed;
    let vmax = config.vmax.unwrap_or(20);
    let mut checks = Vec::new();
    let sampler = TorusSampler::new(100_000, seed, SamplingScheme::LowDiscrepancy)?;

    let thetas = match config.theta {
        Some(t) => vec![t],
        None => vec![FRAC_PI_4, FRAC_PI_6],
    };
    for &t in &thetas {
        let p = Isometry::rotation2d(t)?;
        let exact = tau_rotation_closed_form(t);
        let counted = rate_of_injectivity(&one_step(&p), r)?;
        checks.push(Check::within(format!("tau-counting-vs-closed-form theta={t}"), counted, exact, 0.01));
        let g = tau_geometric(&p, &sampler);
        let mut c = Check::within(format!("tau-geometric-vs-closed-form theta={t}"), g.value, exact, g.half_width);
        c.passed = g.contains(exact);
        checks.push(c);
    }

    let n = config.dim;
    let p = Isometry::sample(n, seed)?;
    let rc = counting_radius(r, n);
    let counted = rate_of_injectivity(&one_step(&p), rc)?;
    let g = tau_geometric(&p, &sampler);
    checks.push(Check::within(format!("tau-geometric-vs-counting dim={n} R={rc}"), g.value, counted, 0.02));

    let [a, b, q] = config.pythagorean.unwrap_or([3, 4, 5]);
    let rat = Isometry::pythagorean(a, b, q)?;
    let oracle = rational_rate(&RationalMatrix::from_isometry(&rat).expect("pythagorean rotations are rational"));
    let counted = rate_of_injectivity(&one_step(&rat), r)?;
    let tol = if oracle == 1.0 { 0.0 } else { 3.0 / r };
    checks.push(Check::within(format!("tau-residue-oracle {a},{b},{q}"), counted, oracle, tol));

    let rot = Isometry::sample(2, seed)?;
    let chain = image_chain(&one_step(&rot), r)?;
    let gamma1 = chain.last();
    for v in [[1, 0], [2, -1], [3, 4]] {
        let v = IntPoint::new(v);
        let geo = rho_geometric(&rot, &v, &sampler)?.value;
        let counted = diff_frequency(gamma1, &v)?;
        checks.push(Check::within(format!("rho-geometric-vs-counting v={v}"), geo, counted, 0.02));
    }
    let asym = [[1, 0], [4, -3], [7, 2]]
        .into_iter()
        .map(|v| {
            let v = IntPoint::new(v);
            Ok((diff_frequency(gamma1, &v)? - diff_frequency(gamma1, &v.neg())?).abs())
        })
        .collect::<anyhow::Result<Vec<f64>>>()?
        .into_iter()
        .fold(0.0, f64::max);
    checks.push(Check::within("rho-symmetry", asym, 0.0, 0.0));

    let h1 = diff_histogram(gamma1, vmax)?;
    checks.push(Check::within("rho-at-zero", h1.get(&IntPoint::zero(2)).unwrap_or(0.0), 1.0, 0.0));
    checks.push(Check::within("bohr-mean-vs-density", bohr_mean(&h1), h1.base_density, 0.02));

    let h0 = diff_histogram(chain.stage(0), vmax)?;
    let bounds = diffusion_step(&h0, &rot)?;
    let ratio = h0.base_density / h1.base_density;
    let (mut over, mut under) = (f64::NEG_INFINITY, f64::NEG_INFINITY);
    for (u, up) in &bounds.upper {
        let measured = h1.get(u).unwrap_or(0.0);
        over = over.max(measured - ratio * up);
        under = under.max(bounds.collision_safe_lower(u, ratio).unwrap_or(0.0) - measured);
    }
    checks.push(Check::at_most("diffusion-upper-excess", over, 0.0, 0.03));
    checks.push(Check::at_most("diffusion-collision-safe-lower-excess", under, 0.0, 0.03));

    for k in [1usize, 2, 5] {
        let seq = IsometrySequence::sampled(2, k, seed, 1)?;
        let ch = image_chain(&seq, r)?;
        let d = ch.last().density_in_ball(r)?;
        if d < 0.2 {
            continue;
        }
        let radius = (16.0 * (1.0 / d).floor() / std::f64::consts::PI).sqrt();
        let h = diff_histogram(ch.last(), radius.ceil() as i64)?;
        let best = h
            .freqs
            .iter()
            .filter(|(v, _)| !v.is_zero() && (v.norm2_sq() as f64) <= radius * radius)
            .map(|(_, f)| *f)
            .fold(0.0, f64::max);
        checks.push(Check::at_least(format!("minkowski-bound k={k}"), best, d / 2.0, 0.02));
    }

    let ball = integer_ball(r, 2)?;
    let bins = config.bins;
    checks.push(Check::at_most("equidistribution-sampled", equidistribution_discrepancy(&rot, &ball, bins)?, 0.1, 0.0));
    let disc = equidistribution_discrepancy(&rat, &ball, bins)?;
    checks.push(Check {
        passed: disc > 1.0,
        ..Check::at_least(format!("equidistribution-rational {a},{b},{q}"), disc, 1.0, 0.0)
    });

    let mut rng = substream(seed, 99);
    let mut worst: f64 = 0.0;
    for _ in 0..10_000 {
        let u: Vec<f64> = (0..2).map(|_| 100.0 * unit_f64(&mut rng) - 50.0).collect();
        worst = worst.max((phi(&RealVec(u))?.total() - 1.0).abs());
    }
    checks.push(Check::at_most("phi-normalization", worst, 0.0, 1e-12));
    Ok(checks)
}
