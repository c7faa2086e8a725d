//! Counting estimators checked against the geometric predictions and
//! exact oracles.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, FRAC_PI_6};

use disciso::density::{rational_rate, RationalMatrix};
use disciso::{
    density_decrease_predicate, diff_frequency, diff_histogram, image_chain, rate_of_injectivity, rho_geometric,
    tau_geometric, tau_rotation_closed_form, IntPoint, Isometry, IsometrySequence, SamplingScheme, TorusSampler,
};

fn one_step(p: &Isometry) -> IsometrySequence {
    IsometrySequence::repeat(p, 1)
}

#[test]
fn counting_matches_closed_form_for_rotations() {
    for theta in [0.1, 0.35, FRAC_PI_6, FRAC_PI_4, 1.2, 2.0, -0.8] {
        let p = Isometry::rotation2d(theta).unwrap();
        let counted = rate_of_injectivity(&one_step(&p), 300.0).unwrap();
        let exact = tau_rotation_closed_form(theta);
        assert!((counted - exact).abs() < 0.02, "θ={theta}: {counted} vs {exact}");
    }
}

#[test]
fn integer_and_bijective_rotations_keep_full_density() {
    let q = Isometry::rotation2d(FRAC_PI_2).unwrap();
    assert_eq!(rate_of_injectivity(&one_step(&q), 100.0).unwrap(), 1.0);
    let p = Isometry::pythagorean(3, 4, 5).unwrap();
    let oracle = rational_rate(&RationalMatrix::from_isometry(&p).unwrap());
    for r in [100.0, 200.0] {
        assert_eq!(rate_of_injectivity(&one_step(&p), r).unwrap(), oracle);
    }
}

#[test]
fn geometric_tau_matches_counting_in_three_dimensions() {
    let sampler = TorusSampler::new(100_000, 17, SamplingScheme::LowDiscrepancy).unwrap();
    for seed in [3u64, 8] {
        let p = Isometry::sample(3, seed).unwrap();
        let geo = tau_geometric(&p, &sampler);
        let counted = rate_of_injectivity(&one_step(&p), 100.0).unwrap();
        assert!((geo.value - counted).abs() < 0.02, "seed {seed}: {} vs {counted}", geo.value);
    }
}

#[test]
fn geometric_rho_matches_counting() {
    let sampler = TorusSampler::new(100_000, 23, SamplingScheme::LowDiscrepancy).unwrap();
    let p = Isometry::rotation2d(FRAC_PI_4).unwrap();
    let chain = image_chain(&one_step(&p), 500.0).unwrap();
    for v in [[1, 0], [0, 1], [1, 1], [3, -2], [5, 5]] {
        let v = IntPoint::new(v);
        let geo = rho_geometric(&p, &v, &sampler).unwrap().value;
        let counted = diff_frequency(chain.last(), &v).unwrap();
        assert!((geo - counted).abs() < 0.02, "{v}: {geo} vs {counted}");
    }
}

/// On generic one-step chains a strict prediction goes with a visible drop
/// and the predicted loss never exceeds the measured one.
#[test]
fn decrease_predicate_matches_measured_drop() {
    let r = 400.0;
    let mut cases: Vec<Isometry> = (0..6).map(|s| Isometry::sample(2, 100 + s).unwrap()).collect();
    cases.push(Isometry::rotation2d(FRAC_PI_2).unwrap());
    cases.push(Isometry::identity(2));
    for p in cases {
        let chain = image_chain(&one_step(&p), r).unwrap();
        let h = diff_histogram(chain.stage(0), 4).unwrap();
        let pred = density_decrease_predicate(&h, &p).unwrap();
        let drop = chain.stage(0).density_in_ball(r).unwrap() - chain.last().density_in_ball(r).unwrap();
        assert_eq!(pred.strict, drop > 2.0 / r, "{:?}: drop {drop}", p.provenance());
        assert!(drop >= pred.lower_bound - 0.03, "{:?}: {drop} < {}", p.provenance(), pred.lower_bound);
    }
}
