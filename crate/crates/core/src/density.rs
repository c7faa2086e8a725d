//! Counting statistics on windowed lattice sets: uniform densities, rates
//! of injectivity, difference frequencies, ε-translations and Delone
//! parameters.
//!
//! Every estimator here only looks at points inside the trusted radius of
//! its input, so the counts are exact for the infinite set being sampled.
//! Suprema over centres are taken on a finite grid and are therefore lower
//! bounds of the true suprema.

use std::collections::{BTreeMap, HashSet};

use crate::discretize::ChainWalker;
use crate::error::{Error, Result};
use crate::lattice::{
    ball_cardinality, inner_extent, round_half_low_unchecked, IntPoint, Isometry, IsometrySequence, Provenance,
    WindowedSet,
};
use crate::par::{self, Execution};

/// Centres used when approximating `sup_x` in a uniform density.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct CenterSampling {
    /// Grid stride; `None` means `R/2`.
    pub stride: Option<f64>,
}

/// Max over sampled integer centres `c` (origin plus the stride grid, all
/// with `‖c‖_∞ + R ≤ trusted`) of `count(c, ⌈R⌉ − 1) / card[B_R]`.
fn sup_density(dim: usize, trusted: f64, r: f64, stride: f64, count: impl Fn(&[i64], i64) -> u64) -> Result<f64> {
    if !(r > 0.0) {
        return Err(Error::domain(format!("density radius must be positive, got {r}")));
    }
    if r > trusted + 1e-9 {
        return Err(Error::WindowExceeded { needed: r, trusted });
    }
    let denom = ball_cardinality(r, dim) as f64;
    let extent = inner_extent(r);
    let slack = trusted - r;
    let stride = if stride > 0.0 { stride } else { r / 2.0 };
    let imax = (slack / stride + 1e-9).floor().max(0.0) as i64;

    let mut best = count(&vec![0; dim], extent) as f64 / denom;
    let mut idx = vec![-imax; dim];
    if imax > 0 {
        loop {
            let c: Vec<i64> = idx.iter().map(|&i| round_half_low_unchecked(i as f64 * stride)).collect();
            let norm = c.iter().map(|x| x.abs()).max().unwrap_or(0) as f64;
            if norm + r <= trusted + 1e-9 {
                best = best.max(count(&c, extent) as f64 / denom);
            }
            let mut i = 0;
            loop {
                if i == dim {
                    return Ok(best);
                }
                idx[i] += 1;
                if idx[i] <= imax {
                    break;
                }
                idx[i] = -imax;
                i += 1;
            }
        }
    }
    Ok(best)
}

/// Uniform `R`-density `D_R^+(S)` estimated on a grid of centres.
pub fn uniform_r_density(s: &WindowedSet, r: f64, centers: CenterSampling) -> Result<f64> {
    let stride = centers.stride.unwrap_or(r / 2.0);
    sup_density(s.dim(), s.trusted_radius(), r, stride, |c, e| s.bits().count_box(c, e))
}

/// Finite-`R` rate of injectivity `card(Γ_k ∩ [B_R]) / card[B_R]`.
pub fn rate_of_injectivity(seq: &IsometrySequence, r: f64) -> Result<f64> {
    rate_of_injectivity_with(seq, r, Execution::default())
}

pub fn rate_of_injectivity_with(seq: &IsometrySequence, r: f64, exec: Execution) -> Result<f64> {
    let mut walker = ChainWalker::new(seq, r, exec)?;
    while walker.advance() {}
    walker.current().density_in_ball(r)
}

/// Rates of every prefix `k = 1..=len` from one chain.
pub fn prefix_rates(seq: &IsometrySequence, r: f64, exec: Execution) -> Result<Vec<f64>> {
    let mut walker = ChainWalker::new(seq, r, exec)?;
    let mut out = Vec::with_capacity(seq.len());
    while walker.advance() {
        out.push(walker.current().density_in_ball(r)?);
    }
    Ok(out)
}

/// Rates at `R` and `2R`; `converged` is false when they differ by more
/// than `3/√R`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConvergenceReport {
    pub at_r: f64,
    pub at_2r: f64,
    pub gap: f64,
    pub converged: bool,
}

pub fn rate_convergence(seq: &IsometrySequence, r: f64) -> Result<ConvergenceReport> {
    let at_r = rate_of_injectivity(seq, r)?;
    let at_2r = rate_of_injectivity(seq, 2.0 * r)?;
    let gap = (at_r - at_2r).abs();
    Ok(ConvergenceReport { at_r, at_2r, gap, converged: gap <= 3.0 / r.sqrt() })
}

/// Exact integer form `M / q` of a rational isometry.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RationalMatrix {
    pub dim: usize,
    pub numer: Vec<i64>,
    pub denom: i64,
}

impl RationalMatrix {
    /// Available for Pythagorean rotations and integer matrices.
    pub fn from_isometry(p: &Isometry) -> Option<Self> {
        match *p.provenance() {
            Provenance::Pythagorean { p: a, q: b, r } => {
                Some(RationalMatrix { dim: 2, numer: vec![a, -b, b, a], denom: r })
            }
            _ if p.is_integral() => {
                Some(RationalMatrix { dim: p.dim(), numer: p.entries().iter().map(|&e| e as i64).collect(), denom: 1 })
            }
            _ => None,
        }
    }

    /// `P̂(x)` in exact integer arithmetic: `⌈(2(Mx)_i − q) / 2q⌉`.
    pub fn apply_hat(&self, x: &[i64]) -> Vec<i64> {
        let n = self.dim;
        (0..n)
            .map(|i| {
                let a: i64 = (0..n).map(|j| self.numer[i * n + j] * x[j]).sum();
                let num = 2 * a - self.denom;
                let den = 2 * self.denom;
                num.div_euclid(den) + i64::from(num.rem_euclid(den) != 0)
            })
            .collect()
    }
}

/// Exact `τ(P)` for a rational orthogonal `P = M/q`.
///
/// `P̂(x + q·m) = P̂(x) + M·m`, so `P̂(Z^n)` is a union of cosets of the
/// lattice `L = M·Z^n` (index `q^n`) indexed by the residues `x mod q`.
/// Since `M⁻¹ = Mᵀ/q²`, two points are congruent mod `L` iff their images
/// under `Mᵀ` agree mod `q²`. The rate is the number of distinct cosets
/// reached divided by `q^n`.
pub fn rational_rate(m: &RationalMatrix) -> f64 {
    let n = m.dim;
    let q = m.denom;
    let q2 = q * q;
    let mut keys: HashSet<Vec<i64>> = HashSet::new();
    let mut x = vec![0i64; n];
    loop {
        let y = m.apply_hat(&x);
        let key: Vec<i64> =
            (0..n).map(|j| (0..n).map(|i| m.numer[i * n + j] * y[i]).sum::<i64>().rem_euclid(q2)).collect();
        keys.insert(key);
        let mut i = 0;
        loop {
            if i == n {
                return keys.len() as f64 / (q as f64).powi(n as i32);
            }
            x[i] += 1;
            if x[i] < q {
                break;
            }
            x[i] = 0;
            i += 1;
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CurveEntry {
    pub k: usize,
    pub tau: f64,
    pub stderr: f64,
}

/// Mean rate of injectivity per step over independent trials.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityCurve {
    pub entries: Vec<CurveEntry>,
    pub trials: usize,
    pub radius: f64,
}

/// How each trial's isometry sequence is produced.
#[derive(Debug, Clone, PartialEq)]
pub enum SequenceSource {
    /// Trial `t` uses `IsometrySequence::sampled(dim, kmax, seed, t)`.
    Sampled { dim: usize },
    /// Every step of every trial is this isometry.
    Fixed(Isometry),
}

/// Per-step mean and standard error of `τ^k`, `k = 1..=kmax`.
pub fn rate_curve(
    source: &SequenceSource,
    seed: u64,
    kmax: usize,
    r: f64,
    trials: usize,
    exec: Execution,
) -> Result<DensityCurve> {
    if kmax == 0 || trials == 0 {
        return Err(Error::domain("kmax and trials must be at least 1"));
    }
    let runs: Vec<Result<Vec<f64>>> = par::map_indexed(exec, trials, |t| {
        let seq = match source {
            SequenceSource::Sampled { dim } => IsometrySequence::sampled(*dim, kmax, seed, t as u64)?,
            SequenceSource::Fixed(p) => IsometrySequence::repeat(p, kmax),
        };
        prefix_rates(&seq, r, exec)
    });
    let runs = runs.into_iter().collect::<Result<Vec<_>>>()?;
    let entries = (0..kmax)
        .map(|j| {
            let vals: Vec<f64> = runs.iter().map(|run| run[j]).collect();
            let (mean, stderr) = mean_stderr(&vals);
            CurveEntry { k: j + 1, tau: mean, stderr }
        })
        .collect();
    Ok(DensityCurve { entries, trials, radius: r })
}

/// Sample mean and standard error (zero for a single value).
pub fn mean_stderr(vals: &[f64]) -> (f64, f64) {
    let n = vals.len() as f64;
    let mean = vals.iter().sum::<f64>() / n;
    if vals.len() < 2 {
        return (mean, 0.0);
    }
    let var = vals.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, (var / n).sqrt())
}

/// Pair counts `#{x ∈ S ∩ [B_r] : x ± v ∈ S}` summed over both signs.
fn symmetric_pair_count(s: &WindowedSet, v: &[i64], extent: i64) -> u64 {
    let origin = vec![0; s.dim()];
    let minus: Vec<i64> = v.iter().map(|c| -c).collect();
    let b = s.bits();
    b.pair_count(b, &origin, extent, v, |x, y| x & y) + b.pair_count(b, &origin, extent, &minus, |x, y| x & y)
}

/// Frequency of the difference `v`: the fraction of points `x` of
/// `S ∩ [B_R]`, `R = trusted − ‖v‖_∞`, with `x + v ∈ S`.
///
/// The count is averaged with the one for `−v`, which makes the estimate
/// exactly symmetric in `v` without changing its limit.
pub fn diff_frequency(s: &WindowedSet, v: &IntPoint) -> Result<f64> {
    if v.dim() != s.dim() {
        return Err(Error::DimensionMismatch { expected: s.dim(), found: v.dim() });
    }
    let r = s.trusted_radius() - v.norm_inf() as f64;
    if !(r > 0.0) {
        return Err(Error::WindowExceeded { needed: v.norm_inf() as f64, trusted: s.trusted_radius() });
    }
    let extent = inner_extent(r);
    let card = s.bits().count_box(&vec![0; s.dim()], extent);
    if card == 0 {
        return Ok(0.0);
    }
    Ok(symmetric_pair_count(s, &v.0, extent) as f64 / (2 * card) as f64)
}

/// Tabulated difference frequencies `ρ(v)` for `‖v‖_∞ ≤ diff_radius`.
#[derive(Debug, Clone, PartialEq)]
pub struct DiffHistogram {
    pub freqs: BTreeMap<IntPoint, f64>,
    /// Density of the set in `[B_{window_radius}]`.
    pub base_density: f64,
    /// Measurement radius shared by every entry.
    pub window_radius: f64,
    pub diff_radius: i64,
    /// `card(S ∩ [B_{window_radius}])`.
    pub window_count: u64,
}

impl DiffHistogram {
    pub fn dim(&self) -> usize {
        self.freqs.keys().next().map_or(0, |k| k.dim())
    }

    /// `ρ(v)`, or `None` outside the tabulated box.
    pub fn get(&self, v: &IntPoint) -> Option<f64> {
        self.freqs.get(v).copied()
    }
}

/// Every integer vector of `[-r, r]^n` in lexicographic order.
pub fn box_vectors(n: usize, r: i64) -> Vec<IntPoint> {
    let mut out = Vec::new();
    if r < 0 {
        return out;
    }
    let mut v = vec![-r; n];
    loop {
        out.push(IntPoint(v.clone()));
        let mut i = n;
        loop {
            if i == 0 {
                return out;
            }
            i -= 1;
            v[i] += 1;
            if v[i] <= r {
                break;
            }
            v[i] = -r;
        }
    }
}

/// [`diff_frequency`] over the whole box `‖v‖_∞ ≤ vmax`, all entries
/// measured on the common radius `trusted − vmax`.
pub fn diff_histogram(s: &WindowedSet, vmax: i64) -> Result<DiffHistogram> {
    diff_histogram_with(s, vmax, Execution::default())
}

pub fn diff_histogram_with(s: &WindowedSet, vmax: i64, exec: Execution) -> Result<DiffHistogram> {
    if vmax < 0 {
        return Err(Error::domain("vmax must be nonnegative"));
    }
    let r = s.trusted_radius() - vmax as f64;
    if !(r > 0.0) {
        return Err(Error::WindowExceeded { needed: vmax as f64, trusted: s.trusted_radius() });
    }
    let n = s.dim();
    let extent = inner_extent(r);
    let origin = vec![0; n];
    let card = s.bits().count_box(&origin, extent);
    let vectors = box_vectors(n, vmax);
    let b = s.bits();
    let one_sided: Vec<u64> = par::map_slice(exec, &vectors, |v| b.pair_count(b, &origin, extent, &v.0, |x, y| x & y));
    let index: BTreeMap<&IntPoint, usize> = vectors.iter().enumerate().map(|(i, v)| (v, i)).collect();
    let freqs = vectors
        .iter()
        .enumerate()
        .map(|(i, v)| {
            let j = index[&v.neg()];
            let f = if card == 0 { 0.0 } else { (one_sided[i] + one_sided[j]) as f64 / (2 * card) as f64 };
            (v.clone(), f)
        })
        .collect();
    Ok(DiffHistogram {
        freqs,
        base_density: card as f64 / ball_cardinality(r, n) as f64,
        window_radius: r,
        diff_radius: vmax,
        window_count: card,
    })
}

/// Average of `ρ` over the tabulated box.
pub fn bohr_mean(h: &DiffHistogram) -> f64 {
    if h.freqs.is_empty() {
        return 0.0;
    }
    h.freqs.values().sum::<f64>() / h.freqs.len() as f64
}

/// Estimated `D_R^+((S + v) Δ S)`, with the symmetric difference trusted
/// up to `trusted − ‖v‖_∞`.
pub fn symmetric_difference_density(s: &WindowedSet, v: &IntPoint, r: f64) -> Result<f64> {
    let trusted = s.trusted_radius() - v.norm_inf() as f64;
    let minus = v.neg();
    let b = s.bits();
    sup_density(s.dim(), trusted, r, r / 2.0, |c, e| b.pair_count(b, c, e, &minus.0, |x, y| x ^ y))
}

/// Count `card(((S + v) Δ S) ∩ [B_r])` centred at the origin.
pub fn symmetric_difference_count(s: &WindowedSet, v: &IntPoint, r: f64) -> Result<u64> {
    if r + v.norm_inf() as f64 > s.trusted_radius() + 1e-9 {
        return Err(Error::WindowExceeded { needed: r + v.norm_inf() as f64, trusted: s.trusted_radius() });
    }
    let b = s.bits();
    Ok(b.pair_count(b, &vec![0; s.dim()], inner_extent(r), &v.neg().0, |x, y| x ^ y))
}

/// A vector `v` with its measured defect `D_R^+((S + v) Δ S)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Translation {
    pub vector: IntPoint,
    pub defect: f64,
}

/// All `v` with `‖v‖_∞ ≤ search_radius` whose defect, measured at
/// `R = trusted − search_radius`, is below `eps`.
pub fn find_translations(s: &WindowedSet, eps: f64, search_radius: f64) -> Result<Vec<Translation>> {
    find_translations_with(s, eps, search_radius, Execution::default())
}

pub fn find_translations_with(
    s: &WindowedSet,
    eps: f64,
    search_radius: f64,
    exec: Execution,
) -> Result<Vec<Translation>> {
    if !(search_radius >= 0.0) {
        return Err(Error::domain("search radius must be nonnegative"));
    }
    let r = s.trusted_radius() - search_radius;
    if !(r > 0.0) {
        return Err(Error::WindowExceeded { needed: search_radius, trusted: s.trusted_radius() });
    }
    let sr = search_radius.floor() as i64;
    let vectors = box_vectors(s.dim(), sr);
    let trusted = s.trusted_radius() - search_radius;
    let b = s.bits();
    let defects: Vec<Result<f64>> = par::map_slice(exec, &vectors, |v| {
        let minus = v.neg();
        sup_density(s.dim(), trusted, r, r / 2.0, |c, e| b.pair_count(b, c, e, &minus.0, |x, y| x ^ y))
    });
    let mut out = Vec::new();
    for (v, d) in vectors.into_iter().zip(defects) {
        let d = d?;
        if d < eps {
            out.push(Translation { vector: v, defect: d });
        }
    }
    Ok(out)
}

/// Estimated Delone parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DeloneParameters {
    /// Half the smallest `‖·‖_∞` distance between two points of the set
    /// (`+∞` when no pair was found in the window).
    pub packing_radius: f64,
    /// Largest `‖·‖_∞` distance from an integer centre in `B(0, trusted/2)`
    /// to the nearest point of the set.
    pub covering_radius: f64,
}

pub fn delone_parameters(s: &WindowedSet) -> Result<DeloneParameters> {
    if s.is_empty() {
        return Err(Error::domain("Delone parameters of an empty set"));
    }
    let n = s.dim();
    let t = s.trusted_radius();
    let b = s.bits();
    let origin = vec![0; n];

    let mut packing = f64::INFINITY;
    let dmax = inner_extent(t);
    'search: for d in 1..=dmax.max(0) {
        let extent = inner_extent(t - d as f64);
        if extent < 0 {
            break;
        }
        for v in box_vectors(n, d).into_iter().filter(|v| v.norm_inf() == d) {
            if b.pair_count(b, &origin, extent, &v.0, |x, y| x & y) > 0 {
                packing = d as f64 / 2.0;
                break 'search;
            }
        }
    }

    let ce = inner_extent(t / 2.0).max(0);
    let target = ((2 * ce + 1) as u64).pow(n as u32);
    let mut grown = b.clone();
    let mut d = 0i64;
    loop {
        if grown.count_box(&origin, ce) == target {
            break;
        }
        d += 1;
        if (ce + d) as f64 >= t {
            return Err(Error::WindowExceeded { needed: (ce + d) as f64, trusted: t });
        }
        grown = grown.dilate();
    }
    Ok(DeloneParameters { packing_radius: packing, covering_radius: d as f64 })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::integer_ball;

    fn sublattice(n: usize, radius: f64, moduli: &[i64]) -> WindowedSet {
        let m = moduli.to_vec();
        WindowedSet::from_predicate(n, radius, move |p| p.iter().zip(&m).all(|(x, q)| x.rem_euclid(*q) == 0)).unwrap()
    }

    #[test]
    fn uniform_density_examples() {
        let z = integer_ball(30.0, 2).unwrap();
        assert_eq!(uniform_r_density(&z, 10.0, CenterSampling::default()).unwrap(), 1.0);
        let even = sublattice(2, 30.0, &[2, 2]);
        let d = uniform_r_density(&even, 10.0, CenterSampling::default()).unwrap();
        assert!((d - 0.25).abs() < 0.05, "{d}");
        assert!(matches!(uniform_r_density(&z, 31.0, CenterSampling::default()), Err(Error::WindowExceeded { .. })));
    }

    #[test]
    fn identity_rate_is_one() {
        let seq = IsometrySequence::repeat(&Isometry::identity(2), 3);
        assert_eq!(rate_of_injectivity(&seq, 25.0).unwrap(), 1.0);
        let rep = rate_convergence(&seq, 25.0).unwrap();
        assert!(rep.converged);
        assert_eq!(rep.gap, 0.0);
    }

    #[test]
    fn exact_rational_arithmetic_matches_float_projection() {
        let p = Isometry::pythagorean(3, 4, 5).unwrap();
        let m = RationalMatrix::from_isometry(&p).unwrap();
        for x in -7..=7 {
            for y in -7..=7 {
                let exact = m.apply_hat(&[x, y]);
                let float = crate::discretize::apply_hat(&p, &IntPoint::new([x, y])).unwrap();
                assert_eq!(exact, float.0);
            }
        }
        // rounding ties go down
        let half = RationalMatrix { dim: 1, numer: vec![1], denom: 2 };
        assert_eq!(half.apply_hat(&[1]), vec![0]);
        assert_eq!(half.apply_hat(&[-1]), vec![-1]);
    }

    /// Brute force over residues mod q with the quotient test done by
    /// solving M·m = a − b directly (Cramer's rule), independent of the
    /// transpose trick used in `rational_rate`.
    fn residue_oracle_2d(a: i64, b: i64, q: i64) -> f64 {
        let m = RationalMatrix { dim: 2, numer: vec![a, -b, b, a], denom: q };
        let det = a * a + b * b;
        let mut reps: Vec<Vec<i64>> = Vec::new();
        for x in 0..q {
            for y in 0..q {
                let img = m.apply_hat(&[x, y]);
                let congruent = |r: &Vec<i64>| {
                    let (dx, dy) = (img[0] - r[0], img[1] - r[1]);
                    // inverse of [[a,-b],[b,a]] is [[a,b],[-b,a]]/det
                    (a * dx + b * dy) % det == 0 && (-b * dx + a * dy) % det == 0
                };
                if !reps.iter().any(congruent) {
                    reps.push(img);
                }
            }
        }
        reps.len() as f64 / (q * q) as f64
    }

    #[test]
    fn rational_rate_matches_cramer_oracle() {
        for (a, b, q) in [(3, 4, 5), (5, 12, 13), (8, 15, 17), (20, 21, 29), (4, 3, 5)] {
            let m = RationalMatrix { dim: 2, numer: vec![a, -b, b, a], denom: q };
            assert_eq!(rational_rate(&m), residue_oracle_2d(a, b, q), "({a},{b},{q})");
        }
        let m = RationalMatrix::from_isometry(&Isometry::pythagorean(3, 4, 5).unwrap()).unwrap();
        assert_eq!(rational_rate(&m), 1.0);
    }

    #[test]
    fn counting_matches_rational_rate_for_small_triples() {
        for (a, b, q) in [(3, 4, 5), (5, 12, 13), (8, 15, 17)] {
            let p = Isometry::pythagorean(a, b, q).unwrap();
            let exact = rational_rate(&RationalMatrix::from_isometry(&p).unwrap());
            let seq = IsometrySequence::repeat(&p, 1);
            // window a multiple of q: count = exact fraction of the box up to boundary
            let counted = rate_of_injectivity(&seq, 120.0).unwrap();
            assert!((counted - exact).abs() < 0.02, "({a},{b},{q}) {counted} vs {exact}");
        }
    }

    #[test]
    fn mean_and_stderr() {
        assert_eq!(mean_stderr(&[0.5]), (0.5, 0.0));
        let (m, s) = mean_stderr(&[1.0, 2.0, 3.0, 4.0]);
        assert_eq!(m, 2.5);
        assert!((s - (5.0f64 / 3.0 / 4.0).sqrt()).abs() < 1e-15);
    }

    #[test]
    fn diff_frequency_examples() {
        let z = integer_ball(20.0, 2).unwrap();
        assert_eq!(diff_frequency(&z, &IntPoint::new([3, -2])).unwrap(), 1.0);
        let half = sublattice(2, 20.0, &[2, 1]);
        assert_eq!(diff_frequency(&half, &IntPoint::new([1, 0])).unwrap(), 0.0);
        assert_eq!(diff_frequency(&half, &IntPoint::new([2, 5])).unwrap(), 1.0);
        assert!(diff_frequency(&z, &IntPoint::new([20, 0])).is_err());
    }

    #[test]
    fn histogram_examples() {
        let z = integer_ball(20.0, 2).unwrap();
        let h = diff_histogram(&z, 3).unwrap();
        assert_eq!(h.freqs.len(), 49);
        assert!(h.freqs.values().all(|&f| f == 1.0));
        assert_eq!(bohr_mean(&h), 1.0);

        let even = sublattice(2, 40.0, &[2, 2]);
        let h = diff_histogram(&even, 4).unwrap();
        for (v, f) in &h.freqs {
            let on = v.0.iter().all(|c| c % 2 == 0);
            assert_eq!(*f, if on { 1.0 } else { 0.0 }, "{v}");
        }
        // 25 of 81 entries are 1
        assert!((bohr_mean(&h) - 25.0 / 81.0).abs() < 1e-15);
        assert!((h.base_density - 0.25).abs() < 0.02);
    }

    #[test]
    fn translations_of_periodic_sets() {
        let z = integer_ball(30.0, 2).unwrap();
        let t = find_translations(&z, 0.01, 5.0).unwrap();
        assert_eq!(t.len(), 121);

        let half = sublattice(2, 30.0, &[2, 1]);
        let t = find_translations(&half, 0.01, 4.0).unwrap();
        let got: Vec<IntPoint> = t.iter().map(|x| x.vector.clone()).collect();
        let want: Vec<IntPoint> = box_vectors(2, 4).into_iter().filter(|v| v.0[0] % 2 == 0).collect();
        assert_eq!(got, want);
    }

    #[test]
    fn delone_examples() {
        let z = integer_ball(20.0, 2).unwrap();
        let d = delone_parameters(&z).unwrap();
        assert_eq!(d.packing_radius, 0.5);
        assert!(d.covering_radius <= 0.5);

        let even = sublattice(2, 20.0, &[2, 2]);
        let d = delone_parameters(&even).unwrap();
        assert_eq!((d.packing_radius, d.covering_radius), (1.0, 1.0));

        let empty = WindowedSet::from_predicate(2, 5.0, |_| false).unwrap();
        assert!(delone_parameters(&empty).is_err());
    }

    #[test]
    fn box_vector_order() {
        let v = box_vectors(2, 1);
        assert_eq!(v.len(), 9);
        assert_eq!(v[0], IntPoint::new([-1, -1]));
        assert_eq!(v[1], IntPoint::new([-1, 0]));
        assert_eq!(v[8], IntPoint::new([1, 1]));
    }
}
