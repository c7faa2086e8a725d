//! The discretization `P̂ = π ∘ P` on points and on windowed sets, and
//! composition along a sequence of isometries.
//!
//! # Window bookkeeping
//!
//! `P` preserves the Euclidean norm and rounding moves a point by at most
//! `√n/2` in that norm, so `‖P̂x‖₂ ≤ ‖x‖₂ + √n/2`. A point of `Γ_k` inside
//! `B_∞(0, R)` has Euclidean norm below `√n·R`, hence all of its preimages
//! at stage `j` lie in the Euclidean ball of radius
//! `e_j = √n·(R + (k − j)/2)`. Stage 0 is the integer ball of infinity
//! radius `e_0` (which contains that Euclidean ball), and stage `j + 1` is
//! the image of stage `j ∩ B₂(e_j)` restricted to `B₂(e_{j+1})`. By
//! induction each stored stage equals `Γ_j ∩ B₂(e_j)`, so it is exact on
//! `B_∞(0, e_j/√n)`.

use crate::bitmap::LatticeBitmap;
use crate::error::{Error, Result};
use crate::lattice::{integer_ball, round_half_low_unchecked, IntPoint, Isometry, IsometrySequence, WindowedSet};
use crate::par::{self, Execution};

/// `P̂(x) = π(P·x)`.
pub fn apply_hat(p: &Isometry, x: &IntPoint) -> Result<IntPoint> {
    let image = p.apply_int(x)?;
    crate::lattice::project(&image)
}

/// Starting window radius `√n·(R + k/2)` that makes `Γ_k ∩ B_R` exact.
pub fn safe_window_radius(r: f64, k: usize, n: usize) -> Result<f64> {
    if !(r >= 0.0) || !r.is_finite() {
        return Err(Error::domain(format!("radius must be finite and nonnegative, got {r}")));
    }
    if n == 0 {
        return Err(Error::domain("dimension must be at least 1"));
    }
    Ok((n as f64).sqrt() * (r + k as f64 / 2.0))
}

/// Euclidean keep-radius of stage `j` in a `k`-step chain aimed at `R`.
fn stage_radius(r: f64, k: usize, j: usize, n: usize) -> f64 {
    (n as f64).sqrt() * (r + (k - j) as f64 / 2.0)
}

/// `{P̂(x) : x ∈ src, ‖x‖₂ < in_radius}` restricted to `‖y‖₂ < out_radius`.
///
/// Norm tests carry a small slack; extra points are genuine members of the
/// image, so keeping a few more never breaks exactness.
pub fn map_set(src: &LatticeBitmap, p: &Isometry, in_radius: f64, out_radius: f64, exec: Execution) -> LatticeBitmap {
    let n = src.dim();
    assert_eq!(n, p.dim());
    let out_half = out_radius.ceil() as i64;
    let in_sq = in_radius * in_radius + 1e-6;
    let out_sq = out_radius * out_radius + 1e-6;
    let col0: Vec<f64> = (0..n).map(|i| p.entry(i, 0)).collect();

    let visit = |rows: std::ops::Range<usize>, emit: &mut dyn FnMut(&[i64])| {
        let mut base = vec![0.0; n];
        let mut y = vec![0i64; n];
        let mut tail_sq = 0i64;
        let mut last_tail: Vec<i64> = Vec::new();
        src.for_each_in_rows(rows, |x0, tail| {
            if tail != last_tail.as_slice() {
                last_tail = tail.to_vec();
                tail_sq = tail.iter().map(|c| c * c).sum();
                for (i, b) in base.iter_mut().enumerate() {
                    *b = (1..n).map(|j| p.entry(i, j) * tail[j - 1] as f64).sum();
                }
            }
            if ((x0 * x0 + tail_sq) as f64) >= in_sq {
                return;
            }
            let mut sq = 0i64;
            for i in 0..n {
                let v = round_half_low_unchecked(base[i] + col0[i] * x0 as f64);
                y[i] = v;
                sq += v * v;
            }
            if (sq as f64) < out_sq {
                emit(&y);
            }
        });
    };

    let mut out = LatticeBitmap::new(n, out_half);
    if exec.is_parallel() {
        let ranges = par::split_ranges(src.rows(), par::chunk_count(exec));
        let parts: Vec<Vec<usize>> = par::map_slice(exec, &ranges, |range| {
            let mut flat = Vec::new();
            visit(range.clone(), &mut |y| {
                if let Some(f) = out.flat_index(y) {
                    flat.push(f);
                }
            });
            flat
        });
        for part in parts {
            for f in part {
                out.set_flat(f);
            }
        }
    } else {
        let mut target = LatticeBitmap::new(n, out_half);
        visit(0..src.rows(), &mut |y| {
            target.insert(y);
        });
        out = target;
    }
    out
}

/// Successive images `Γ_0 = Z^n, Γ_{j+1} = P̂_{j+1}(Γ_j)`, each stored on a
/// finite window that is exact inside its trusted radius.
#[derive(Debug, Clone)]
pub struct ImageChain {
    sequence: IsometrySequence,
    stages: Vec<WindowedSet>,
    requested_radius: f64,
}

impl ImageChain {
    pub fn sequence(&self) -> &IsometrySequence {
        &self.sequence
    }

    pub fn stages(&self) -> &[WindowedSet] {
        &self.stages
    }

    pub fn stage(&self, j: usize) -> &WindowedSet {
        &self.stages[j]
    }

    pub fn last(&self) -> &WindowedSet {
        self.stages.last().expect("chain always has stage 0")
    }

    pub fn requested_radius(&self) -> f64 {
        self.requested_radius
    }

    pub fn steps(&self) -> usize {
        self.stages.len() - 1
    }
}

/// Streams the stages of a chain one at a time, keeping only the current
/// one in memory.
pub struct ChainWalker<'a> {
    sequence: &'a IsometrySequence,
    radius: f64,
    next_step: usize,
    current: WindowedSet,
    exec: Execution,
}

impl<'a> ChainWalker<'a> {
    pub fn new(sequence: &'a IsometrySequence, radius: f64, exec: Execution) -> Result<Self> {
        if !(radius > 0.0) || !radius.is_finite() {
            return Err(Error::domain(format!("chain radius must be positive, got {radius}")));
        }
        let n = sequence.dim();
        let start = safe_window_radius(radius, sequence.len(), n)?;
        Ok(ChainWalker { sequence, radius, next_step: 0, current: integer_ball(start, n)?, exec })
    }

    /// Current stage (stage 0 before the first call to `advance`).
    pub fn current(&self) -> &WindowedSet {
        &self.current
    }

    pub fn step_index(&self) -> usize {
        self.next_step
    }

    /// Moves to the next stage; returns `false` once the sequence is used up.
    pub fn advance(&mut self) -> bool {
        let k = self.sequence.len();
        if self.next_step >= k {
            return false;
        }
        let n = self.sequence.dim();
        let j = self.next_step;
        let e_in = stage_radius(self.radius, k, j, n);
        let e_out = stage_radius(self.radius, k, j + 1, n);
        let bits = map_set(self.current.bits(), &self.sequence.items()[j], e_in, e_out, self.exec);
        self.current = WindowedSet::from_bitmap(bits, e_out / (n as f64).sqrt());
        self.next_step += 1;
        true
    }
}

/// All stages of the chain, exact inside `B_∞(0, R)` (and beyond: stage
/// `j ≥ 1` is trusted to `R + (k − j)/2`, stage 0 to `√n·(R + k/2)`).
///
/// Memory is one bitmap per stage, about `(2√n(R + k/2))^n / 8` bytes each.
pub fn image_chain(seq: &IsometrySequence, r: f64) -> Result<ImageChain> {
    image_chain_with(seq, r, Execution::default())
}

pub fn image_chain_with(seq: &IsometrySequence, r: f64, exec: Execution) -> Result<ImageChain> {
    let mut walker = ChainWalker::new(seq, r, exec)?;
    let mut stages = vec![walker.current().clone()];
    while walker.advance() {
        stages.push(walker.current().clone());
    }
    Ok(ImageChain { sequence: seq.clone(), stages, requested_radius: r })
}
