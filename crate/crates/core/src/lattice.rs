//! Integer-lattice primitives: rounding onto `Z^n`, finite windows of
//! lattice subsets, and orthogonal matrices carrying rationality metadata.

use std::collections::BTreeSet;
use std::f64::consts::{FRAC_PI_2, PI};
use std::fmt;

use nalgebra::DMatrix;
use rand::RngCore;
use rand_distr::{Distribution, StandardNormal};

use crate::bitmap::LatticeBitmap;
use crate::error::{Error, Result};
use crate::rng;

/// Maximum entry of `|AᵀA − Id|` accepted for an isometry.
pub const ORTHOGONALITY_TOL: f64 = 1e-12;

/// Nearest integer with halves sent down: the unique `k` with
/// `k − 1/2 < x ≤ k + 1/2`.
pub fn round_half_low(x: f64) -> Result<i64> {
    if !x.is_finite() {
        return Err(Error::domain(format!("cannot round non-finite value {x}")));
    }
    Ok(round_half_low_unchecked(x))
}

#[inline(always)]
pub(crate) fn round_half_low_unchecked(x: f64) -> i64 {
    (x - 0.5).ceil() as i64
}

/// A point of `Z^n`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct IntPoint(pub Vec<i64>);

impl IntPoint {
    pub fn new(coords: impl Into<Vec<i64>>) -> Self {
        IntPoint(coords.into())
    }

    pub fn zero(n: usize) -> Self {
        IntPoint(vec![0; n])
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn coords(&self) -> &[i64] {
        &self.0
    }

    pub fn norm_inf(&self) -> i64 {
        self.0.iter().map(|c| c.abs()).max().unwrap_or(0)
    }

    pub fn norm2_sq(&self) -> i64 {
        self.0.iter().map(|c| c * c).sum()
    }

    pub fn neg(&self) -> IntPoint {
        IntPoint(self.0.iter().map(|c| -c).collect())
    }

    pub fn add(&self, other: &IntPoint) -> IntPoint {
        IntPoint(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&c| c == 0)
    }
}

impl fmt::Display for IntPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, c) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, ")")
    }
}

/// A point of `R^n`.
#[derive(Debug, Clone, PartialEq)]
pub struct RealVec(pub Vec<f64>);

impl RealVec {
    pub fn new(coords: impl Into<Vec<f64>>) -> Self {
        RealVec(coords.into())
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn coords(&self) -> &[f64] {
        &self.0
    }

    pub fn norm2(&self) -> f64 {
        self.0.iter().map(|c| c * c).sum::<f64>().sqrt()
    }

    pub fn norm_inf(&self) -> f64 {
        self.0.iter().fold(0.0, |m, c| m.max(c.abs()))
    }
}

/// Coordinatewise [`round_half_low`]: the projection of `R^n` onto `Z^n`.
pub fn project(v: &RealVec) -> Result<IntPoint> {
    v.0.iter().map(|&x| round_half_low(x)).collect::<Result<Vec<_>>>().map(IntPoint)
}

/// Where an isometry came from.
#[derive(Debug, Clone, PartialEq)]
pub enum Provenance {
    Rotation2d { theta: f64 },
    Pythagorean { p: i64, q: i64, r: i64 },
    Sampled { seed: u64 },
    Explicit,
}

/// An `n×n` orthogonal matrix. `rational_rows` holds the (0-based) indices
/// of rows whose entries are all known to be rational; it is set from the
/// construction, never inferred from floating-point values.
#[derive(Debug, Clone, PartialEq)]
pub struct Isometry {
    dim: usize,
    matrix: Vec<f64>,
    rational_rows: BTreeSet<usize>,
    provenance: Provenance,
}

impl Isometry {
    /// Builds an isometry from row-major entries, checking orthogonality.
    pub fn explicit(dim: usize, entries: Vec<f64>, rational_rows: BTreeSet<usize>) -> Result<Self> {
        Self::checked(dim, entries, rational_rows, Provenance::Explicit)
    }

    fn checked(dim: usize, entries: Vec<f64>, rational_rows: BTreeSet<usize>, provenance: Provenance) -> Result<Self> {
        if dim == 0 {
            return Err(Error::domain("dimension must be at least 1"));
        }
        if entries.len() != dim * dim {
            return Err(Error::DimensionMismatch { expected: dim * dim, found: entries.len() });
        }
        if entries.iter().any(|e| !e.is_finite()) {
            return Err(Error::domain("matrix entries must be finite"));
        }
        if rational_rows.iter().any(|&i| i >= dim) {
            return Err(Error::domain("rational row index out of range"));
        }
        let iso = Isometry { dim, matrix: entries, rational_rows, provenance };
        let err = iso.orthogonality_error();
        if err > ORTHOGONALITY_TOL {
            return Err(Error::domain(format!("matrix is not orthogonal (max |AᵀA − Id| = {err:e})")));
        }
        Ok(iso)
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = vec![0.0; dim * dim];
        for i in 0..dim {
            m[i * dim + i] = 1.0;
        }
        Isometry { dim, matrix: m, rational_rows: (0..dim).collect(), provenance: Provenance::Explicit }
    }

    /// Rotation of the plane by `theta` radians. Multiples of `π/2` are
    /// snapped to their exact integer matrices and marked rational.
    pub fn rotation2d(theta: f64) -> Result<Self> {
        if !theta.is_finite() {
            return Err(Error::domain("rotation angle must be finite"));
        }
        let quarter = theta / FRAC_PI_2;
        let nearest = quarter.round();
        let (c, s, rational) = if (quarter - nearest).abs() < 1e-12 {
            match (nearest as i64).rem_euclid(4) {
                0 => (1.0, 0.0, true),
                1 => (0.0, 1.0, true),
                2 => (-1.0, 0.0, true),
                _ => (0.0, -1.0, true),
            }
        } else {
            (theta.cos(), theta.sin(), false)
        };
        Ok(Isometry {
            dim: 2,
            matrix: vec![c, -s, s, c],
            rational_rows: if rational { (0..2).collect() } else { BTreeSet::new() },
            provenance: Provenance::Rotation2d { theta },
        })
    }

    /// The rotation `[[p/r, −q/r], [q/r, p/r]]` for a Pythagorean triple.
    pub fn pythagorean(p: i64, q: i64, r: i64) -> Result<Self> {
        if r <= 0 || p * p + q * q != r * r {
            return Err(Error::domain(format!("({p},{q},{r}) is not a Pythagorean triple")));
        }
        let (c, s) = (p as f64 / r as f64, q as f64 / r as f64);
        Self::checked(2, vec![c, -s, s, c], (0..2).collect(), Provenance::Pythagorean { p, q, r })
    }

    /// Deterministic pseudo-random isometry of dimension `n` drawn from
    /// substream 0 of `seed`.
    ///
    /// * `n = 1`: `±1` with equal odds.
    /// * `n = 2`: rotation by an angle uniform in `[0, 2π)`.
    /// * `n > 2`: Householder QR of an `n×n` matrix of standard normals
    ///   (row-major draw order), with the columns of `Q` multiplied by the
    ///   signs of the diagonal of `R` so the factorization is unique.
    pub fn sample(n: usize, seed: u64) -> Result<Self> {
        if n == 0 {
            return Err(Error::domain("dimension must be at least 1"));
        }
        let mut rng = rng::substream(seed, 0);
        let provenance = Provenance::Sampled { seed };
        match n {
            1 => {
                let sign = if rng.next_u64() & 1 == 0 { 1.0 } else { -1.0 };
                Self::checked(1, vec![sign], BTreeSet::from([0]), provenance)
            }
            2 => {
                let theta = 2.0 * PI * rng::unit_f64(&mut rng);
                let (s, c) = theta.sin_cos();
                Self::checked(2, vec![c, -s, s, c], BTreeSet::new(), provenance)
            }
            _ => {
                let draws: Vec<f64> = (0..n * n).map(|_| StandardNormal.sample(&mut rng)).collect();
                let g = DMatrix::from_row_slice(n, n, &draws);
                let qr = g.qr();
                let mut q = qr.q();
                let r = qr.r();
                for j in 0..n {
                    if r[(j, j)] < 0.0 {
                        q.column_mut(j).neg_mut();
                    }
                }
                let entries: Vec<f64> =
                    (0..n).flat_map(|i| (0..n).map(move |j| (i, j))).map(|(i, j)| q[(i, j)]).collect();
                Self::checked(n, entries, BTreeSet::new(), provenance)
            }
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Entry `a_{i,j}` (0-based).
    #[inline]
    pub fn entry(&self, i: usize, j: usize) -> f64 {
        self.matrix[i * self.dim + j]
    }

    pub fn entries(&self) -> &[f64] {
        &self.matrix
    }

    pub fn rational_rows(&self) -> &BTreeSet<usize> {
        &self.rational_rows
    }

    pub fn provenance(&self) -> &Provenance {
        &self.provenance
    }

    /// Every entry is an integer (signed permutation matrices).
    pub fn is_integral(&self) -> bool {
        self.rational_rows.len() == self.dim && self.matrix.iter().all(|e| e.fract() == 0.0)
    }

    pub fn orthogonality_error(&self) -> f64 {
        let n = self.dim;
        let mut worst = 0.0f64;
        for i in 0..n {
            for j in 0..n {
                let dot: f64 = (0..n).map(|k| self.entry(k, i) * self.entry(k, j)).sum();
                let target = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((dot - target).abs());
            }
        }
        worst
    }

    /// `A·x` for a real vector given as a slice.
    pub fn apply_slice(&self, x: &[f64], out: &mut [f64]) {
        for (i, o) in out.iter_mut().enumerate() {
            *o = (0..self.dim).map(|j| self.entry(i, j) * x[j]).sum();
        }
    }

    /// `Aᵀ·x`.
    pub fn apply_transpose_slice(&self, x: &[f64], out: &mut [f64]) {
        for (j, o) in out.iter_mut().enumerate() {
            *o = (0..self.dim).map(|i| self.entry(i, j) * x[i]).sum();
        }
    }

    pub fn apply(&self, v: &RealVec) -> Result<RealVec> {
        self.check_dim(v.dim())?;
        let mut out = vec![0.0; self.dim];
        self.apply_slice(&v.0, &mut out);
        Ok(RealVec(out))
    }

    /// `A·x` for an integer point.
    pub fn apply_int(&self, x: &IntPoint) -> Result<RealVec> {
        self.check_dim(x.dim())?;
        let xf: Vec<f64> = x.0.iter().map(|&c| c as f64).collect();
        let mut out = vec![0.0; self.dim];
        self.apply_slice(&xf, &mut out);
        Ok(RealVec(out))
    }

    pub(crate) fn check_dim(&self, found: usize) -> Result<()> {
        if found != self.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, found });
        }
        Ok(())
    }
}

/// A finite prefix of a sequence of isometries sharing one dimension.
#[derive(Debug, Clone, PartialEq)]
pub struct IsometrySequence {
    dim: usize,
    items: Vec<Isometry>,
    master_seed: Option<u64>,
}

impl IsometrySequence {
    pub fn new(dim: usize, items: Vec<Isometry>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::domain("dimension must be at least 1"));
        }
        for it in &items {
            it.check_dim(dim)?;
        }
        Ok(IsometrySequence { dim, items, master_seed: None })
    }

    pub fn empty(dim: usize) -> Self {
        IsometrySequence { dim, items: Vec::new(), master_seed: None }
    }

    /// The same isometry repeated `k` times.
    pub fn repeat(iso: &Isometry, k: usize) -> Self {
        IsometrySequence { dim: iso.dim(), items: vec![iso.clone(); k], master_seed: None }
    }

    /// `k` independent draws: item `j` is `Isometry::sample(n, s_j)` where
    /// `s_j` is the `j`-th `u64` of substream `stream` of `master_seed`.
    pub fn sampled(n: usize, k: usize, master_seed: u64, stream: u64) -> Result<Self> {
        let mut rng = rng::substream(master_seed, stream);
        let items = (0..k).map(|_| Isometry::sample(n, rng.next_u64())).collect::<Result<Vec<_>>>()?;
        Ok(IsometrySequence { dim: n, items, master_seed: Some(master_seed) })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn items(&self) -> &[Isometry] {
        &self.items
    }

    pub fn len(&self) -> usize {
        self.items.len()
    }

    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }

    pub fn master_seed(&self) -> Option<u64> {
        self.master_seed
    }

    pub fn prefix(&self, k: usize) -> IsometrySequence {
        IsometrySequence {
            dim: self.dim,
            items: self.items[..k.min(self.items.len())].to_vec(),
            master_seed: self.master_seed,
        }
    }
}

/// A finite subset of `Z^n` together with the radius inside which it is
/// known to coincide with the (infinite) set it samples: for every `x`
/// with `‖x‖_∞ < trusted_radius`, membership is exact.
#[derive(Debug, Clone, PartialEq)]
pub struct WindowedSet {
    bits: LatticeBitmap,
    trusted_radius: f64,
}

/// Largest integer coordinate strictly inside an open ball of radius `r`.
pub fn inner_extent(r: f64) -> i64 {
    if r <= 0.0 {
        -1
    } else {
        r.ceil() as i64 - 1
    }
}

impl WindowedSet {
    pub fn from_bitmap(bits: LatticeBitmap, trusted_radius: f64) -> Self {
        WindowedSet { bits, trusted_radius }
    }

    /// Window of the set `{x ∈ Z^n : member(x)}` over `B_∞(0, radius)`.
    pub fn from_predicate(n: usize, radius: f64, member: impl Fn(&[i64]) -> bool) -> Result<Self> {
        if n == 0 {
            return Err(Error::domain("dimension must be at least 1"));
        }
        if !(radius >= 0.0) {
            return Err(Error::domain("radius must be nonnegative"));
        }
        let half = inner_extent(radius);
        let mut bits = LatticeBitmap::new(n, half.max(0));
        if half >= 0 {
            let full = LatticeBitmap::full(n, half);
            full.for_each_in_rows(0..full.rows(), |x0, tail| {
                let mut p = Vec::with_capacity(n);
                p.push(x0);
                p.extend_from_slice(tail);
                if member(&p) {
                    bits.insert(&p);
                }
            });
        }
        Ok(WindowedSet { bits, trusted_radius: radius })
    }

    pub fn dim(&self) -> usize {
        self.bits.dim()
    }

    pub fn trusted_radius(&self) -> f64 {
        self.trusted_radius
    }

    pub fn bits(&self) -> &LatticeBitmap {
        &self.bits
    }

    pub fn contains(&self, p: &IntPoint) -> bool {
        p.dim() == self.dim() && self.bits.contains(&p.0)
    }

    /// Number of recorded points (including any outside the trusted ball).
    pub fn len(&self) -> u64 {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }

    pub fn points(&self) -> Vec<IntPoint> {
        self.bits.points().into_iter().map(IntPoint).collect()
    }

    /// `card(S ∩ B_∞(0, r))` for the open ball; `r` must be trusted.
    pub fn count_in_ball(&self, r: f64) -> Result<u64> {
        self.require_radius(r)?;
        Ok(self.bits.count_box(&vec![0; self.dim()], inner_extent(r)))
    }

    /// Density `card(S ∩ [B_r]) / card[B_r]`; zero for an empty ball.
    pub fn density_in_ball(&self, r: f64) -> Result<f64> {
        let count = self.count_in_ball(r)?;
        let total = ball_cardinality(r, self.dim());
        Ok(if total == 0 { 0.0 } else { count as f64 / total as f64 })
    }

    pub(crate) fn require_radius(&self, r: f64) -> Result<()> {
        if r > self.trusted_radius + 1e-9 {
            return Err(Error::WindowExceeded { needed: r, trusted: self.trusted_radius });
        }
        Ok(())
    }
}

/// `card(Z^n ∩ B_∞(0, r))` for the open ball: `(2⌈r⌉ − 1)^n` when `r > 0`.
pub fn ball_cardinality(r: f64, n: usize) -> u64 {
    let e = inner_extent(r);
    if e < 0 {
        0
    } else {
        ((2 * e + 1) as u64).pow(n as u32)
    }
}

/// All `x ∈ Z^n` with `‖x‖_∞ < r` (open ball), trusted up to `r`.
pub fn integer_ball(r: f64, n: usize) -> Result<WindowedSet> {
    if n == 0 {
        return Err(Error::domain("dimension must be at least 1"));
    }
    if !(r >= 0.0) || !r.is_finite() {
        return Err(Error::domain(format!("ball radius must be finite and nonnegative, got {r}")));
    }
    let e = inner_extent(r);
    let bits = if e < 0 { LatticeBitmap::new(n, 0) } else { LatticeBitmap::full(n, e) };
    Ok(WindowedSet { bits, trusted_radius: r })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::FRAC_PI_4;

    #[test]
    fn rounding_boundaries() {
        assert_eq!(round_half_low(0.5).unwrap(), 0);
        assert_eq!(round_half_low(-0.5).unwrap(), -1);
        assert_eq!(round_half_low(1.49).unwrap(), 1);
        assert_eq!(round_half_low(7.0).unwrap(), 7);
        assert_eq!(round_half_low(1.5).unwrap(), 1);
        assert_eq!(round_half_low(-1.5).unwrap(), -2);
        assert!(round_half_low(f64::NAN).is_err());
        assert!(round_half_low(f64::INFINITY).is_err());
    }

    #[test]
    fn projection_examples() {
        assert_eq!(project(&RealVec::new([0.5, -0.5])).unwrap(), IntPoint::new([0, -1]));
        assert_eq!(project(&RealVec::new([3.0, 4.0])).unwrap(), IntPoint::new([3, 4]));
        assert_eq!(project(&RealVec::new([0.2, -1.7])).unwrap(), IntPoint::new([0, -2]));
        assert!(project(&RealVec::new([0.0, f64::NAN])).is_err());
    }

    #[test]
    fn rotation_constructors() {
        let id = Isometry::rotation2d(0.0).unwrap();
        assert_eq!(id.entries(), &[1.0, -0.0, 0.0, 1.0]);
        assert_eq!(id.rational_rows().len(), 2);

        let r = Isometry::rotation2d(FRAC_PI_4).unwrap();
        let h = 2f64.sqrt() / 2.0;
        for (a, b) in r.entries().iter().zip([h, -h, h, h]) {
            assert!((a - b).abs() < 1e-15);
        }
        assert!(r.rational_rows().is_empty());

        let p = Isometry::pythagorean(3, 4, 5).unwrap();
        assert_eq!(p.entries(), &[0.6, -0.8, 0.8, 0.6]);
        assert_eq!(p.rational_rows(), &BTreeSet::from([0, 1]));
        assert!(Isometry::pythagorean(3, 4, 6).is_err());

        let q = Isometry::rotation2d(3.0 * FRAC_PI_2).unwrap();
        assert!(q.is_integral());
        assert_eq!(q.entries(), &[0.0, 1.0, -1.0, 0.0]);
    }

    #[test]
    fn sampling_is_deterministic_and_orthogonal() {
        let a = Isometry::sample(2, 99).unwrap();
        let b = Isometry::sample(2, 99).unwrap();
        assert_eq!(a, b);
        let det = a.entry(0, 0) * a.entry(1, 1) - a.entry(0, 1) * a.entry(1, 0);
        assert!((det.abs() - 1.0).abs() < 1e-12);
        assert!(Isometry::sample(0, 1).is_err());
        let one = Isometry::sample(1, 5).unwrap();
        assert_eq!(one.entry(0, 0).abs(), 1.0);
    }

    #[test]
    fn sampled_3d_is_orthogonal_by_independent_product() {
        for seed in 0..20 {
            let a = Isometry::sample(3, seed).unwrap();
            assert_eq!(a, Isometry::sample(3, seed).unwrap());
            // AᵀA by an explicit triple loop
            for i in 0..3 {
                for j in 0..3 {
                    let mut s = 0.0;
                    for k in 0..3 {
                        s += a.entries()[k * 3 + i] * a.entries()[k * 3 + j];
                    }
                    let t = if i == j { 1.0 } else { 0.0 };
                    assert!((s - t).abs() <= 1e-12, "seed {seed}: ({i},{j}) = {s}");
                }
            }
        }
    }

    #[test]
    fn explicit_rejects_non_orthogonal() {
        assert!(Isometry::explicit(2, vec![1.0, 0.1, 0.0, 1.0], BTreeSet::new()).is_err());
        assert!(Isometry::explicit(2, vec![1.0, 0.0, 0.0], BTreeSet::new()).is_err());
        let swap = Isometry::explicit(2, vec![0.0, 1.0, 1.0, 0.0], BTreeSet::from([0, 1])).unwrap();
        assert!(swap.is_integral());
    }

    #[test]
    fn integer_ball_examples() {
        let b = integer_ball(1.5, 2).unwrap();
        assert_eq!(b.len(), 9);
        let b = integer_ball(0.4, 2).unwrap();
        assert_eq!(b.points(), vec![IntPoint::new([0, 0])]);
        let b = integer_ball(10.0, 1).unwrap();
        assert_eq!(b.len(), 19);
        assert!(!b.contains(&IntPoint::new([10])));
        assert!(b.contains(&IntPoint::new([-9])));
        assert!(integer_ball(0.0, 2).unwrap().is_empty());
        assert!(integer_ball(-1.0, 2).is_err());
        assert_eq!(ball_cardinality(10.0, 2), 361);
        assert_eq!(ball_cardinality(2.5, 3), 125);
    }

    #[test]
    fn window_radius_is_enforced() {
        let b = integer_ball(5.0, 2).unwrap();
        assert!(b.count_in_ball(6.0).is_err());
        assert_eq!(b.density_in_ball(5.0).unwrap(), 1.0);
    }
}
