//! 8-bit rasters, binary PGM/PPM I/O, and naive discretized rotation of
//! images.

use std::collections::HashSet;
use std::io::Write;

use crate::discretize::apply_hat;
use crate::error::{Error, Result};
use crate::lattice::{IntPoint, IsometrySequence};

/// Row-major 8-bit image with 1 (gray) or 3 (RGB) channels.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Raster {
    pub width: usize,
    pub height: usize,
    pub channels: usize,
    pub data: Vec<u8>,
}

impl Raster {
    pub fn new(width: usize, height: usize, channels: usize, fill: u8) -> Self {
        assert!(channels == 1 || channels == 3);
        Raster { width, height, channels, data: vec![fill; width * height * channels] }
    }

    pub fn pixel(&self, col: usize, row: usize) -> &[u8] {
        let i = (row * self.width + col) * self.channels;
        &self.data[i..i + self.channels]
    }

    pub fn set_pixel(&mut self, col: usize, row: usize, value: &[u8]) {
        let i = (row * self.width + col) * self.channels;
        self.data[i..i + self.channels].copy_from_slice(value);
    }

    /// Lattice point of a pixel: the origin sits at pixel
    /// `(width/2, height/2)` (integer division) and the y axis points up.
    pub fn to_lattice(&self, col: usize, row: usize) -> IntPoint {
        let (cx, cy) = ((self.width / 2) as i64, (self.height / 2) as i64);
        IntPoint::new([col as i64 - cx, cy - row as i64])
    }

    pub fn from_lattice(&self, p: &IntPoint) -> Option<(usize, usize)> {
        let (cx, cy) = ((self.width / 2) as i64, (self.height / 2) as i64);
        let col = p.0[0] + cx;
        let row = cy - p.0[1];
        if col < 0 || row < 0 || col >= self.width as i64 || row >= self.height as i64 {
            None
        } else {
            Some((col as usize, row as usize))
        }
    }

    /// Binary PGM (P5) for gray rasters, binary PPM (P6) for RGB, maxval 255.
    pub fn to_pnm_bytes(&self) -> Vec<u8> {
        let magic = if self.channels == 1 { "P5" } else { "P6" };
        let mut out = Vec::with_capacity(self.data.len() + 32);
        write!(out, "{magic}\n{} {}\n255\n", self.width, self.height).unwrap();
        out.extend_from_slice(&self.data);
        out
    }

    /// Parses binary PGM (P5) or PPM (P6) data with maxval 255. Comments
    /// in the header are skipped.
    pub fn from_pnm_bytes(bytes: &[u8]) -> Result<Raster> {
        let mut pos = 0usize;
        if bytes.len() < 2 {
            return Err(parse_err(0, "file too short for a PNM header"));
        }
        let channels = match &bytes[0..2] {
            b"P5" => 1,
            b"P6" => 3,
            _ => return Err(parse_err(0, "expected magic number P5 or P6")),
        };
        pos += 2;
        let (width, _) = read_header_number(bytes, &mut pos)?;
        let (height, _) = read_header_number(bytes, &mut pos)?;
        let (maxval, maxval_at) = read_header_number(bytes, &mut pos)?;
        if maxval != 255 {
            return Err(parse_err(maxval_at, format!("unsupported maxval {maxval} (only 255)")));
        }
        match bytes.get(pos) {
            Some(b) if b.is_ascii_whitespace() => pos += 1,
            _ => return Err(parse_err(pos, "expected a single whitespace byte after maxval")),
        }
        let needed = width
            .checked_mul(height)
            .and_then(|p| p.checked_mul(channels))
            .ok_or_else(|| parse_err(pos, "image dimensions overflow"))?;
        let available = bytes.len() - pos;
        if available < needed {
            return Err(parse_err(
                bytes.len(),
                format!("truncated pixel data: need {needed} bytes, found {available}"),
            ));
        }
        Ok(Raster { width, height, channels, data: bytes[pos..pos + needed].to_vec() })
    }
}

fn parse_err(offset: usize, message: impl Into<String>) -> Error {
    Error::Parse { offset, message: message.into() }
}

/// Skips whitespace and comments, then reads a decimal number; returns it
/// with the offset of its first digit.
fn read_header_number(bytes: &[u8], pos: &mut usize) -> Result<(usize, usize)> {
    loop {
        match bytes.get(*pos) {
            Some(b'#') => {
                while let Some(&b) = bytes.get(*pos) {
                    *pos += 1;
                    if b == b'\n' || b == b'\r' {
                        break;
                    }
                }
            }
            Some(b) if b.is_ascii_whitespace() => *pos += 1,
            Some(_) => break,
            None => return Err(parse_err(*pos, "unexpected end of header")),
        }
    }
    let start = *pos;
    while matches!(bytes.get(*pos), Some(b) if b.is_ascii_digit()) {
        *pos += 1;
    }
    if start == *pos {
        return Err(parse_err(start, "expected a decimal number in header"));
    }
    std::str::from_utf8(&bytes[start..*pos])
        .ok()
        .and_then(|s| s.parse::<usize>().ok())
        .map(|v| (v, start))
        .ok_or_else(|| parse_err(start, "header number out of range"))
}

/// Loss statistics of a discretized rotation.
#[derive(Debug, Clone, PartialEq)]
pub struct RotationStats {
    /// Unhit pixels among those whose exact (continuous) preimage lies in
    /// the source rectangle, as a fraction of the latter.
    pub hole_fraction: f64,
    /// Source pixels landing inside the canvas on an already-hit pixel, as
    /// a fraction of all source pixels landing inside the canvas.
    pub collision_fraction: f64,
    /// For each step `j = 1..k`, distinct lattice positions after `j`
    /// steps divided by the number of source pixels.
    pub step_density: Vec<f64>,
}

/// Applies the composed discretization to every pixel centre. Output pixel
/// `y` takes the colour of the last source pixel (row-major scan) whose
/// chain image is `y`; pixels never hit keep the `background` colour.
pub fn rotate_raster(image: &Raster, seq: &IsometrySequence, background: &[u8]) -> Result<(Raster, RotationStats)> {
    if seq.dim() != 2 {
        return Err(Error::UnsupportedDimension(seq.dim()));
    }
    if background.len() != image.channels {
        return Err(Error::domain("background colour must match the raster's channel count"));
    }
    let mut positions: Vec<IntPoint> = (0..image.height)
        .flat_map(|row| (0..image.width).map(move |col| (col, row)))
        .map(|(col, row)| image.to_lattice(col, row))
        .collect();
    let sources = positions.len().max(1) as f64;
    let mut step_density = Vec::with_capacity(seq.len());
    for p in seq.items() {
        for x in positions.iter_mut() {
            *x = apply_hat(p, x)?;
        }
        let distinct: HashSet<&IntPoint> = positions.iter().collect();
        step_density.push(distinct.len() as f64 / sources);
    }

    let mut out = Raster::new(image.width, image.height, image.channels, 0);
    for i in 0..image.height * image.width {
        out.data[i * image.channels..(i + 1) * image.channels].copy_from_slice(background);
    }
    let mut hit = vec![false; image.width * image.height];
    let (mut landed, mut collisions) = (0usize, 0usize);
    for (idx, y) in positions.iter().enumerate() {
        let (col, row) = (idx % image.width, idx / image.width);
        if let Some((oc, or)) = out.from_lattice(y) {
            landed += 1;
            let h = &mut hit[or * image.width + oc];
            if *h {
                collisions += 1;
            }
            *h = true;
            out.set_pixel(oc, or, image.pixel(col, row));
        }
    }

    // continuous preimage of each output pixel under the composed rotation
    let mut total = [[1.0, 0.0], [0.0, 1.0]];
    for p in seq.items() {
        let m = [[p.entry(0, 0), p.entry(0, 1)], [p.entry(1, 0), p.entry(1, 1)]];
        total = [
            [m[0][0] * total[0][0] + m[0][1] * total[1][0], m[0][0] * total[0][1] + m[0][1] * total[1][1]],
            [m[1][0] * total[0][0] + m[1][1] * total[1][0], m[1][0] * total[0][1] + m[1][1] * total[1][1]],
        ];
    }
    let (cx, cy) = ((image.width / 2) as f64, (image.height / 2) as f64);
    let (xmin, xmax) = (-cx - 0.5, image.width as f64 - cx - 0.5);
    let (ymin, ymax) = (cy - image.height as f64 + 0.5, cy + 0.5);
    let (mut covered, mut holes) = (0usize, 0usize);
    for row in 0..image.height {
        for col in 0..image.width {
            let y = image.to_lattice(col, row);
            let (a, b) = (y.0[0] as f64, y.0[1] as f64);
            // inverse of an orthogonal matrix is its transpose
            let px = total[0][0] * a + total[1][0] * b;
            let py = total[0][1] * a + total[1][1] * b;
            if px >= xmin && px < xmax && py > ymin && py <= ymax {
                covered += 1;
                if !hit[row * image.width + col] {
                    holes += 1;
                }
            }
        }
    }
    let stats = RotationStats {
        hole_fraction: if covered == 0 { 0.0 } else { holes as f64 / covered as f64 },
        collision_fraction: if landed == 0 { 0.0 } else { collisions as f64 / landed as f64 },
        step_density,
    };
    Ok((out, stats))
}
