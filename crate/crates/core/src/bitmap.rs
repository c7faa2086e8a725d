//! Dense bit storage for finite subsets of the box `[-half, half]^n ⊂ Z^n`.
//!
//! Axis 0 is the fast axis: each "row" (fixed values of coordinates
//! `1..n`) is stored as `words_per_row` consecutive `u64` words, bit `b` of
//! the row standing for `x_0 = b - half`. Bits past the end of a row are
//! always zero, which lets shifted reads and popcounts run word-at-a-time.

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LatticeBitmap {
    dim: usize,
    half: i64,
    side: usize,
    words_per_row: usize,
    rows: usize,
    words: Vec<u64>,
}

impl LatticeBitmap {
    /// Empty bitmap over `[-half, half]^dim`.
    pub fn new(dim: usize, half: i64) -> Self {
        assert!(dim >= 1, "dimension must be at least 1");
        let half = half.max(0);
        let side = (2 * half + 1) as usize;
        let words_per_row = side.div_ceil(64);
        let rows = side.pow((dim - 1) as u32);
        LatticeBitmap { dim, half, side, words_per_row, rows, words: vec![0; words_per_row * rows] }
    }

    /// Full box: every point of `[-half, half]^dim`.
    pub fn full(dim: usize, half: i64) -> Self {
        let mut b = Self::new(dim, half);
        let tail = b.side % 64;
        for r in 0..b.rows {
            let row = &mut b.words[r * b.words_per_row..(r + 1) * b.words_per_row];
            row.fill(u64::MAX);
            if tail != 0 {
                *row.last_mut().unwrap() = (1u64 << tail) - 1;
            }
        }
        b
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn half(&self) -> i64 {
        self.half
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    /// Row index for coordinates `1..n`, if inside the box.
    pub fn row_of(&self, tail: &[i64]) -> Option<usize> {
        debug_assert_eq!(tail.len(), self.dim - 1);
        let mut idx = 0usize;
        for &c in tail.iter().rev() {
            if c < -self.half || c > self.half {
                return None;
            }
            idx = idx * self.side + (c + self.half) as usize;
        }
        Some(idx)
    }

    /// Coordinates `1..n` of a row.
    pub fn row_coords(&self, mut row: usize, out: &mut [i64]) {
        for c in out.iter_mut() {
            *c = (row % self.side) as i64 - self.half;
            row /= self.side;
        }
    }

    fn locate(&self, p: &[i64]) -> Option<(usize, usize)> {
        debug_assert_eq!(p.len(), self.dim);
        let x0 = p[0];
        if x0 < -self.half || x0 > self.half {
            return None;
        }
        let row = self.row_of(&p[1..])?;
        Some((row, (x0 + self.half) as usize))
    }

    pub fn contains(&self, p: &[i64]) -> bool {
        match self.locate(p) {
            Some((row, bit)) => self.words[row * self.words_per_row + bit / 64] >> (bit % 64) & 1 == 1,
            None => false,
        }
    }

    /// Sets `p`; returns `false` when `p` lies outside the box.
    pub fn insert(&mut self, p: &[i64]) -> bool {
        match self.locate(p) {
            Some((row, bit)) => {
                self.words[row * self.words_per_row + bit / 64] |= 1u64 << (bit % 64);
                true
            }
            None => false,
        }
    }

    /// Flat bit position of `p`, used for deferred inserts.
    pub fn flat_index(&self, p: &[i64]) -> Option<usize> {
        self.locate(p).map(|(row, bit)| row * self.words_per_row * 64 + bit)
    }

    pub fn set_flat(&mut self, flat: usize) {
        self.words[flat / 64] |= 1u64 << (flat % 64);
    }

    pub fn len(&self) -> u64 {
        self.words.iter().map(|w| w.count_ones() as u64).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    /// Calls `f(x0, tail)` for every member of the rows in `rows`, in
    /// increasing row then increasing `x0` order.
    pub fn for_each_in_rows(&self, rows: std::ops::Range<usize>, mut f: impl FnMut(i64, &[i64])) {
        let mut tail = vec![0i64; self.dim - 1];
        for r in rows {
            let row = &self.words[r * self.words_per_row..(r + 1) * self.words_per_row];
            if row.iter().all(|&w| w == 0) {
                continue;
            }
            self.row_coords(r, &mut tail);
            for (wi, &w) in row.iter().enumerate() {
                let mut w = w;
                while w != 0 {
                    let b = w.trailing_zeros() as usize;
                    w &= w - 1;
                    f((wi * 64 + b) as i64 - self.half, &tail);
                }
            }
        }
    }

    pub fn points(&self) -> Vec<Vec<i64>> {
        let mut out = Vec::with_capacity(self.len() as usize);
        self.for_each_in_rows(0..self.rows, |x0, tail| {
            let mut p = Vec::with_capacity(self.dim);
            p.push(x0);
            p.extend_from_slice(tail);
            out.push(p);
        });
        out
    }

    #[inline]
    fn word(&self, row: usize, wi: i64) -> u64 {
        if wi < 0 || wi as usize >= self.words_per_row {
            0
        } else {
            self.words[row * self.words_per_row + wi as usize]
        }
    }

    /// 64 bits of `row` starting at axis-0 coordinate `x0_start`; bits
    /// outside the box read as zero.
    #[inline]
    pub fn read64(&self, row: usize, x0_start: i64) -> u64 {
        let local = x0_start + self.half;
        if local >= self.side as i64 || local + 64 <= 0 {
            return 0;
        }
        let wi = local.div_euclid(64);
        let off = local.rem_euclid(64) as u32;
        let lo = self.word(row, wi) >> off;
        if off == 0 {
            lo
        } else {
            lo | self.word(row, wi + 1) << (64 - off)
        }
    }

    /// Counts points `x` of the box `center + [-r, r]^n` for which
    /// `op(self(x), other(x + shift))` holds bitwise. Points outside either
    /// bitmap's storage read as absent.
    pub fn pair_count(
        &self,
        other: &LatticeBitmap,
        center: &[i64],
        r: i64,
        shift: &[i64],
        op: impl Fn(u64, u64) -> u64,
    ) -> u64 {
        assert_eq!(self.dim, other.dim);
        if r < 0 {
            return 0;
        }
        let n = self.dim;
        let width = (2 * r + 1) as usize;
        let nwords = width.div_ceil(64);
        let tail_bits = width % 64;
        let last_mask = if tail_bits == 0 { u64::MAX } else { (1u64 << tail_bits) - 1 };
        let x0_start = center[0] - r;

        let mut offs = vec![-r; n - 1];
        let mut a_tail = vec![0i64; n - 1];
        let mut b_tail = vec![0i64; n - 1];
        let mut total = 0u64;
        loop {
            for i in 0..n - 1 {
                a_tail[i] = center[i + 1] + offs[i];
                b_tail[i] = a_tail[i] + shift[i + 1];
            }
            let ra = self.row_of(&a_tail);
            let rb = other.row_of(&b_tail);
            for k in 0..nwords {
                let s = x0_start + 64 * k as i64;
                let wa = ra.map_or(0, |row| self.read64(row, s));
                let wb = rb.map_or(0, |row| other.read64(row, s + shift[0]));
                let mut v = op(wa, wb);
                if k + 1 == nwords {
                    v &= last_mask;
                }
                total += v.count_ones() as u64;
            }
            // odometer over coordinates 1..n
            let mut i = 0;
            loop {
                if i == n - 1 {
                    return total;
                }
                offs[i] += 1;
                if offs[i] <= r {
                    break;
                }
                offs[i] = -r;
                i += 1;
            }
        }
    }

    /// Members inside `center + [-r, r]^n`.
    pub fn count_box(&self, center: &[i64], r: i64) -> u64 {
        let zero = vec![0i64; self.dim];
        self.pair_count(self, center, r, &zero, |a, _| a)
    }

    /// Chebyshev dilation by one: every point within infinity-distance 1
    /// of a member becomes a member (clipped to the box).
    pub fn dilate(&self) -> LatticeBitmap {
        let mut cur = self.clone();
        // axis 0: shift within rows
        for r in 0..cur.rows {
            let base = r * cur.words_per_row;
            let row: Vec<u64> = cur.words[base..base + cur.words_per_row].to_vec();
            for wi in 0..cur.words_per_row {
                let w = row[wi];
                let left = w << 1 | if wi > 0 { row[wi - 1] >> 63 } else { 0 };
                let right = w >> 1 | if wi + 1 < row.len() { row[wi + 1] << 63 } else { 0 };
                cur.words[base + wi] = w | left | right;
            }
            let tail = cur.side % 64;
            if tail != 0 {
                cur.words[base + cur.words_per_row - 1] &= (1u64 << tail) - 1;
            }
        }
        // remaining axes: OR neighbouring rows
        let mut stride = 1usize;
        for _axis in 1..cur.dim {
            let prev = cur.words.clone();
            for r in 0..cur.rows {
                let coord = (r / stride) % cur.side;
                let base = r * cur.words_per_row;
                for wi in 0..cur.words_per_row {
                    let mut w = prev[base + wi];
                    if coord > 0 {
                        w |= prev[(r - stride) * cur.words_per_row + wi];
                    }
                    if coord + 1 < cur.side {
                        w |= prev[(r + stride) * cur.words_per_row + wi];
                    }
                    cur.words[base + wi] = w;
                }
            }
            stride *= cur.side;
        }
        cur
    }

    /// Bitwise union with a bitmap of identical geometry.
    pub fn union_with(&mut self, other: &LatticeBitmap) {
        assert_eq!((self.dim, self.half), (other.dim, other.half), "bitmap geometry mismatch");
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a |= *b;
        }
    }
}
