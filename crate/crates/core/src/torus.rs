//! Torus-measure predictions for discretized isometries.
//!
//! Write `Λ = P(Z^n)` and `U = Λ + [−½, ½)^n`. An integer point `x` lies in
//! `P̂(Z^n)` exactly when `x ∈ U` (rounding sends `y` to `x` iff
//! `x − y ∈ [−½, ½)^n`). When `Pᵀ` is totally irrational the classes of
//! integer points in `R^n/Λ` are equidistributed, so
//!
//! * `τ(P)` is the torus measure of `U`, estimated by sampling `z = P·u`
//!   with `u` uniform in `[0, 1)^n` and testing `z ∈ U`;
//! * `ρ(v)` for `Γ_1` is the conditional probability `P(z + v ∈ U | z ∈ U)`.
//!
//! The diffusion bounds push a difference histogram through `φ_{P·v}`, the
//! multilinear spreading of `P·v` over the corners of its unit cube.

use std::collections::BTreeMap;

use crate::density::{box_vectors, DiffHistogram};
use crate::error::{Error, Result};
use crate::lattice::{IntPoint, Isometry, RealVec, WindowedSet};
use crate::par::{self, Execution};
use crate::rng::{substream, unit_f64};

/// Weights of a real point on the corners of its enclosing unit cube.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseWeights {
    pub weights: BTreeMap<IntPoint, f64>,
}

impl SparseWeights {
    pub fn get(&self, v: &IntPoint) -> f64 {
        self.weights.get(v).copied().unwrap_or(0.0)
    }

    pub fn total(&self) -> f64 {
        self.weights.values().sum()
    }
}

/// `φ_u(v) = ∏ (1 − |u_i − v_i|)` on the corners `v` of the unit cube with
/// lower corner `⌊u⌋`; corners of weight zero are omitted.
pub fn phi(u: &RealVec) -> Result<SparseWeights> {
    if u.0.iter().any(|c| !c.is_finite()) {
        return Err(Error::domain("phi of a non-finite vector"));
    }
    let mut weights = BTreeMap::new();
    phi_for_each(&u.0, |v, w| {
        weights.insert(IntPoint(v.to_vec()), w);
    });
    Ok(SparseWeights { weights })
}

/// Visits the nonzero corners of `φ_u` without allocating a map.
fn phi_for_each(u: &[f64], mut f: impl FnMut(&[i64], f64)) {
    let n = u.len();
    let floor: Vec<i64> = u.iter().map(|c| c.floor() as i64).collect();
    let frac: Vec<f64> = u.iter().zip(&floor).map(|(c, f)| c - *f as f64).collect();
    let mut corner = vec![0i64; n];
    for mask in 0u32..(1 << n) {
        let mut w = 1.0;
        for i in 0..n {
            let up = mask >> i & 1 == 1;
            w *= if up { frac[i] } else { 1.0 - frac[i] };
            corner[i] = floor[i] + i64::from(up);
        }
        if w > 0.0 {
            f(&corner, w);
        }
    }
}

/// How sample points of `[0, 1)^n` are generated.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SamplingScheme {
    /// Independent uniforms; batch `b` draws from ChaCha8 substream `b`.
    PseudoRandom,
    /// Additive recurrence `frac(s + j·α)` with the generalized golden ratio
    /// `α` and a random shift `s` drawn from substream 0.
    LowDiscrepancy,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TorusSampler {
    pub samples: usize,
    pub seed: u64,
    pub scheme: SamplingScheme,
}

const BATCH: usize = 1 << 14;

impl TorusSampler {
    pub fn new(samples: usize, seed: u64, scheme: SamplingScheme) -> Result<Self> {
        if samples == 0 {
            return Err(Error::domain("sampler needs at least one sample"));
        }
        Ok(TorusSampler { samples, seed, scheme })
    }

    /// Runs `f` on every sample point (batched, possibly in parallel) and
    /// sums the returned counters in batch order.
    fn count<const K: usize>(&self, n: usize, exec: Execution, f: impl Fn(&[f64]) -> [u64; K] + Sync) -> [u64; K] {
        let batches = self.samples.div_ceil(BATCH);
        let alpha = kronecker_steps(n);
        let shift: Vec<f64> = {
            let mut rng = substream(self.seed, 0);
            (0..n).map(|_| unit_f64(&mut rng)).collect()
        };
        let parts = par::map_indexed(exec, batches, |b| {
            let lo = b * BATCH;
            let hi = (lo + BATCH).min(self.samples);
            let mut acc = [0u64; K];
            let mut u = vec![0.0; n];
            let mut rng = substream(self.seed, b as u64 + 1);
            for j in lo..hi {
                match self.scheme {
                    SamplingScheme::PseudoRandom => u.iter_mut().for_each(|c| *c = unit_f64(&mut rng)),
                    SamplingScheme::LowDiscrepancy => {
                        for i in 0..n {
                            let x = shift[i] + (j as f64 + 1.0) * alpha[i];
                            u[i] = x - x.floor();
                        }
                    }
                }
                let r = f(&u);
                for (a, c) in acc.iter_mut().zip(r) {
                    *a += c;
                }
            }
            acc
        });
        let mut total = [0u64; K];
        for part in parts {
            for (t, c) in total.iter_mut().zip(part) {
                *t += c;
            }
        }
        total
    }
}

/// `α_i = φ_n^{−i}` where `φ_n` is the positive root of `x^{n+1} = x + 1`.
fn kronecker_steps(n: usize) -> Vec<f64> {
    let mut g = 2.0f64;
    for _ in 0..64 {
        g = (1.0 + g).powf(1.0 / (n as f64 + 1.0));
    }
    (1..=n).map(|i| g.powi(-(i as i32))).collect()
}

/// Estimate with a 95% binomial half-width.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TorusEstimate {
    pub value: f64,
    pub half_width: f64,
    pub samples: u64,
}

impl TorusEstimate {
    fn binomial(hits: u64, trials: u64) -> Self {
        if trials == 0 {
            return TorusEstimate { value: 0.0, half_width: 1.0, samples: 0 };
        }
        let p = hits as f64 / trials as f64;
        TorusEstimate { value: p, half_width: 1.96 * (p * (1.0 - p) / trials as f64).sqrt(), samples: trials }
    }

    pub fn contains(&self, x: f64) -> bool {
        (x - self.value).abs() <= self.half_width
    }
}

/// Whether `z ∈ U`, i.e. `z − P·m ∈ [−½, ½)^n` for some integer `m`.
///
/// Such an `m` satisfies `‖Pᵀz − m‖₂ = ‖z − P·m‖₂ ≤ √n/2`, so only the
/// integer points of that box around `Pᵀz` are tried.
pub fn in_u(p: &Isometry, z: &[f64]) -> bool {
    let n = p.dim();
    let mut w = vec![0.0; n];
    p.apply_transpose_slice(z, &mut w);
    let reach = (n as f64).sqrt() / 2.0;
    let lo: Vec<i64> = w.iter().map(|c| (c - reach).ceil() as i64).collect();
    let hi: Vec<i64> = w.iter().map(|c| (c + reach).floor() as i64).collect();
    if lo.iter().zip(&hi).any(|(a, b)| a > b) {
        return false;
    }
    let mut m = lo.clone();
    let mut mf = vec![0.0; n];
    let mut pm = vec![0.0; n];
    loop {
        for i in 0..n {
            mf[i] = m[i] as f64;
        }
        p.apply_slice(&mf, &mut pm);
        if z.iter().zip(&pm).all(|(a, b)| {
            let d = a - b;
            (-0.5..0.5).contains(&d)
        }) {
            return true;
        }
        let mut i = 0;
        loop {
            if i == n {
                return false;
            }
            m[i] += 1;
            if m[i] <= hi[i] {
                break;
            }
            m[i] = lo[i];
            i += 1;
        }
    }
}

fn warn_if_rational(p: &Isometry) {
    if !p.rational_rows().is_empty() {
        log::warn!("isometry has rational rows {:?}; torus estimates assume total irrationality", p.rational_rows());
    }
}

/// Torus measure of `U`: the predicted rate of injectivity `τ(P)`.
pub fn tau_geometric(p: &Isometry, sampler: &TorusSampler) -> TorusEstimate {
    tau_geometric_with(p, sampler, Execution::default())
}

pub fn tau_geometric_with(p: &Isometry, sampler: &TorusSampler, exec: Execution) -> TorusEstimate {
    warn_if_rational(p);
    let n = p.dim();
    let [hits] = sampler.count(n, exec, |u| {
        let mut z = vec![0.0; n];
        p.apply_slice(u, &mut z);
        [u64::from(in_u(p, &z))]
    });
    TorusEstimate::binomial(hits, sampler.samples as u64)
}

/// `τ̄(R_θ) = 1 − (cos θ′ + sin θ′ − 1)²` with `θ′ = θ mod π/2`.
pub fn tau_rotation_closed_form(theta: f64) -> f64 {
    let t = theta.rem_euclid(std::f64::consts::FRAC_PI_2);
    let s = t.cos() + t.sin() - 1.0;
    1.0 - s * s
}

/// Predicted `ρ(v)` on `Γ_1 = P̂(Z^n)`: the share of sample points
/// `z = P·u ∈ U` with `z + v ∈ U`. The interval is binomial over the
/// samples that landed in `U`.
pub fn rho_geometric(p: &Isometry, v: &IntPoint, sampler: &TorusSampler) -> Result<TorusEstimate> {
    rho_geometric_with(p, v, sampler, Execution::default())
}

pub fn rho_geometric_with(
    p: &Isometry,
    v: &IntPoint,
    sampler: &TorusSampler,
    exec: Execution,
) -> Result<TorusEstimate> {
    p.check_dim(v.dim())?;
    warn_if_rational(p);
    let n = p.dim();
    let shift: Vec<f64> = v.0.iter().map(|&c| c as f64).collect();
    let [base, both] = sampler.count(n, exec, |u| {
        let mut z = vec![0.0; n];
        p.apply_slice(u, &mut z);
        if !in_u(p, &z) {
            return [0, 0];
        }
        for (a, b) in z.iter_mut().zip(&shift) {
            *a += b;
        }
        [1, u64::from(in_u(p, &z))]
    });
    Ok(TorusEstimate::binomial(both, base))
}

/// Bounds on the difference frequencies of `P̂(Γ)` from those of `Γ`,
/// before the density ratio `D(Γ)/D(P̂Γ)` is applied.
#[derive(Debug, Clone, PartialEq)]
pub struct FrequencyBounds {
    /// `max_v φ_{P·v}(u)·ρ(v)`.
    pub lower: BTreeMap<IntPoint, f64>,
    /// `Σ_v φ_{P·v}(u)·ρ(v)`.
    pub upper: BTreeMap<IntPoint, f64>,
    /// Every `u` with `‖u‖_∞ ≤ radius` receives all of its contributions
    /// from the tabulated box; larger `u` are not reported.
    pub radius: i64,
    /// Largest number of points that can share an image (see
    /// [`max_class_size`]).
    pub max_class: usize,
}

impl FrequencyBounds {
    /// Lower bound on `ρ_{P̂Γ}(u)` that survives collisions:
    /// `ratio·lower[u]/max_class`.
    ///
    /// Each pair `(x, x + v)` counted in `lower[u]` maps to a pair of `P̂Γ`
    /// with difference `u`, and at most `max_class` of them can map to the
    /// same pair. Without the divisor the bound already fails at `u = 0`
    /// whenever density is lost, since `ρ(0) = 1 < ratio`.
    pub fn collision_safe_lower(&self, u: &IntPoint, ratio: f64) -> Option<f64> {
        self.lower.get(u).map(|l| ratio * l / self.max_class as f64)
    }
}

/// One step of difference diffusion through `P`.
///
/// A vector `v` contributes to `u` only when `‖P·v − u‖_∞ < 1`, which forces
/// `‖v‖_∞ ≤ ‖v‖₂ < √n(‖u‖_∞ + 1)`. The output box is the largest one whose
/// contributors all lie inside the tabulated box; `Error::BoxTooSmall` is
/// returned when even `u = 0` is not covered.
pub fn diffusion_step(h: &DiffHistogram, p: &Isometry) -> Result<FrequencyBounds> {
    let n = p.dim();
    if h.dim() != n {
        return Err(Error::DimensionMismatch { expected: n, found: h.dim() });
    }
    let radius = ((h.diff_radius as f64 + 1.0) / (n as f64).sqrt()).floor() as i64 - 1;
    if radius < 0 {
        return Err(Error::BoxTooSmall(format!(
            "difference box of radius {} cannot cover u = 0 in dimension {n}",
            h.diff_radius
        )));
    }
    let mut lower: BTreeMap<IntPoint, f64> = box_vectors(n, radius).into_iter().map(|u| (u, 0.0)).collect();
    let mut upper = lower.clone();
    let mut image = vec![0.0; n];
    let mut vf = vec![0.0; n];
    for (v, &rho) in &h.freqs {
        if rho == 0.0 {
            continue;
        }
        for (a, &b) in vf.iter_mut().zip(&v.0) {
            *a = b as f64;
        }
        p.apply_slice(&vf, &mut image);
        phi_for_each(&image, |u, w| {
            if u.iter().all(|c| c.abs() <= radius) {
                let key = IntPoint(u.to_vec());
                let c = w * rho;
                *upper.get_mut(&key).expect("box entry") += c;
                let l = lower.get_mut(&key).expect("box entry");
                *l = l.max(c);
            }
        });
    }
    Ok(FrequencyBounds { lower, upper, radius, max_class: max_class_size(p) })
}

/// Prediction of whether one discretization step loses density.
#[derive(Debug, Clone, PartialEq)]
pub struct DecreasePrediction {
    /// Some tabulated `v₀ ≠ 0` has `ρ(v₀) > 0` and `‖P·v₀‖_∞ < 1`.
    pub strict: bool,
    pub witness: Option<IntPoint>,
    /// `S = Σ_v φ_{P·v}(0)·ρ(v)`: mean number of points sharing an image.
    pub collision_mass: f64,
    /// Largest possible number of points with a common image.
    pub max_class: usize,
    /// Lower bound on `D(Γ) − D(P̂Γ)`: `D(Γ)·max(0, S − 1)/max_class`.
    pub lower_bound: f64,
}

/// Decrease criterion for `Γ → P̂(Γ)` from a difference histogram of `Γ`.
///
/// If `c(x)` is the number of points of `Γ` sharing the image of `x`, then
/// `D(P̂Γ)/D(Γ)` is the mean of `1/c` and `S` is the mean of `c`. Points with
/// a common image differ pairwise by vectors of
/// `W = {w ≠ 0 : ‖P·w‖_∞ < 1}`, so `c` is at most the largest clique of
/// `{0} ∪ W` under "difference lies in `W`". On `[1, max_class]` the convex
/// function `1/c` lies below its chord, which gives
/// `mean(1/c) ≤ 1 − (S − 1)/max_class`.
pub fn density_decrease_predicate(h: &DiffHistogram, p: &Isometry) -> Result<DecreasePrediction> {
    let n = p.dim();
    if h.dim() != n {
        return Err(Error::DimensionMismatch { expected: n, found: h.dim() });
    }
    let reach = short_reach(n);
    if h.diff_radius < reach {
        return Err(Error::BoxTooSmall(format!(
            "difference box of radius {} must reach {reach} in dimension {n}",
            h.diff_radius
        )));
    }
    let mut witness = None;
    let mut mass = 0.0;
    for (w, img) in short_vectors(p) {
        let rho = h.get(&w).unwrap_or(0.0);
        mass += img.iter().map(|c| 1.0 - c.abs()).product::<f64>() * rho;
        if !w.is_zero() && rho > 0.0 && witness.is_none() {
            witness = Some(w);
        }
    }
    let max_class = max_class_size(p);
    let base = h.base_density;
    Ok(DecreasePrediction {
        strict: witness.is_some(),
        witness,
        collision_mass: mass,
        max_class,
        lower_bound: base * (mass - 1.0).max(0.0) / max_class as f64,
    })
}

/// Integer vectors `w` with `‖P·w‖_∞ < 1` (including `0`), with `P·w`.
/// They satisfy `‖w‖_∞ ≤ ‖w‖₂ < √n`.
fn short_vectors(p: &Isometry) -> Vec<(IntPoint, Vec<f64>)> {
    let n = p.dim();
    box_vectors(n, short_reach(n))
        .into_iter()
        .filter_map(|w| {
            let wf: Vec<f64> = w.0.iter().map(|&c| c as f64).collect();
            let mut img = vec![0.0; n];
            p.apply_slice(&wf, &mut img);
            img.iter().all(|c| c.abs() < 1.0).then_some((w, img))
        })
        .collect()
}

fn short_reach(n: usize) -> i64 {
    (n as f64).sqrt().ceil() as i64
}

/// Largest number of integer points that `P̂` can send to one point.
///
/// Points with a common image differ pairwise by vectors of
/// `W = {w ≠ 0 : ‖P·w‖_∞ < 1}`, so the answer is bounded by one plus the
/// largest subset of `W` whose pairwise differences also lie in `W`.
pub fn max_class_size(p: &Isometry) -> usize {
    let short = short_vectors(p);
    let cands: Vec<IntPoint> = short.iter().filter(|(w, _)| !w.is_zero()).map(|(w, _)| w.clone()).collect();
    let set: std::collections::BTreeSet<&IntPoint> = short.iter().map(|(w, _)| w).collect();
    let adjacent = |a: &IntPoint, b: &IntPoint| {
        let d = a.add(&b.neg());
        !d.is_zero() && set.contains(&d)
    };
    1 + max_clique(&cands, &adjacent)
}

/// Size of the largest pairwise-adjacent subset (simple branch and bound;
/// the candidate sets here have at most a few dozen members).
fn max_clique(items: &[IntPoint], adjacent: &impl Fn(&IntPoint, &IntPoint) -> bool) -> usize {
    fn grow(
        chosen: usize,
        pool: &[usize],
        items: &[IntPoint],
        adjacent: &impl Fn(&IntPoint, &IntPoint) -> bool,
        best: &mut usize,
    ) {
        *best = (*best).max(chosen);
        for (k, &i) in pool.iter().enumerate() {
            if chosen + pool.len() - k <= *best {
                return;
            }
            let next: Vec<usize> = pool[k + 1..].iter().copied().filter(|&j| adjacent(&items[i], &items[j])).collect();
            grow(chosen + 1, &next, items, adjacent, best);
        }
    }
    let pool: Vec<usize> = (0..items.len()).collect();
    let mut best = 0;
    grow(0, &pool, items, adjacent, &mut best);
    best
}

/// Sup-norm deviation of the box histogram of `{P·x mod Z^n : x ∈ S}` from
/// uniform, in density-ratio units: `max_b |mass_b − bins^{−n}|·bins^n`.
///
/// Uses every point of `S` inside its trusted radius. Bin indices get a
/// `1e−9` nudge so that values a rounding error below a bin edge (common
/// for rational `P`) land in the bin they belong to.
pub fn equidistribution_discrepancy(p: &Isometry, s: &WindowedSet, bins: usize) -> Result<f64> {
    equidistribution_discrepancy_with(p, s, bins, Execution::default())
}

pub fn equidistribution_discrepancy_with(p: &Isometry, s: &WindowedSet, bins: usize, exec: Execution) -> Result<f64> {
    let n = p.dim();
    p.check_dim(s.dim())?;
    if bins < 2 {
        return Err(Error::domain("bins must be at least 2"));
    }
    let cells = bins
        .checked_pow(n as u32)
        .filter(|c| *c <= 1 << 24)
        .ok_or_else(|| Error::domain(format!("{bins}^{n} bins is too many")))?;
    let extent = crate::lattice::inner_extent(s.trusted_radius());
    let bits = s.bits();
    let ranges = par::split_ranges(bits.rows(), par::chunk_count(exec));
    let parts: Vec<Vec<u64>> = par::map_slice(exec, &ranges, |range| {
        let mut hist = vec![0u64; cells];
        let mut x = vec![0.0; n];
        let mut y = vec![0.0; n];
        bits.for_each_in_rows(range.clone(), |x0, tail| {
            if x0.abs() > extent || tail.iter().any(|c| c.abs() > extent) {
                return;
            }
            x[0] = x0 as f64;
            for (a, &b) in x[1..].iter_mut().zip(tail) {
                *a = b as f64;
            }
            p.apply_slice(&x, &mut y);
            let mut cell = 0usize;
            for c in y.iter().rev() {
                let f = c - c.floor();
                let b = ((f * bins as f64 + 1e-9).floor() as i64).rem_euclid(bins as i64) as usize;
                cell = cell * bins + b;
            }
            hist[cell] += 1;
        });
        hist
    });
    let mut hist = vec![0u64; cells];
    for part in parts {
        for (h, c) in hist.iter_mut().zip(part) {
            *h += c;
        }
    }
    let total: u64 = hist.iter().sum();
    if total == 0 {
        return Err(Error::domain("discrepancy of an empty set"));
    }
    let uniform = 1.0 / cells as f64;
    Ok(hist.iter().map(|&c| (c as f64 / total as f64 - uniform).abs() * cells as f64).fold(0.0, f64::max))
}
