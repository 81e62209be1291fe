//! Bilateral image filtering as a graph filter.
//!
//! Pixels become vertices of a window graph whose weights combine spatial
//! and photometric closeness,
//! w_ij = exp(−‖p_i − p_j‖²/2σ_d²)·exp(−(x_i − x_j)²/2σ_i²),
//! and one bilateral pass is y = (I + D)⁻¹(I + A)x. With the variation
//! operator L and inner product Q = I + D this is exactly the one-hop
//! filter y = (I − Z)x in the fundamental matrix Z = (I + D)⁻¹L, so the
//! classical filter is a low-pass graph filter under a Q that weights
//! pixels by how much evidence their neighborhood carries.
//!
//! Intensities are kept in the raw sample range (0..maxval); σ_i is
//! expressed in those units.

use crate::error::{Error, Result};
use crate::gft::Fundamental;
use crate::graph::Graph;
use crate::operators::InnerProduct;
use nalgebra::DVector;
use std::fs;
use std::path::Path;

#[derive(Debug, Clone, PartialEq)]
pub struct Image {
    width: usize,
    height: usize,
    maxval: u32,
    /// Row-major samples, `data[y*width + x]`.
    data: Vec<f64>,
}

impl Image {
    pub fn new(width: usize, height: usize, maxval: u32, data: Vec<f64>) -> Result<Image> {
        if width == 0 || height == 0 {
            return Err(Error::Image("empty image".into()));
        }
        if maxval == 0 || maxval > 65535 {
            return Err(Error::Image(format!("maxval {maxval} out of range")));
        }
        if data.len() != width * height {
            return Err(Error::Image(format!(
                "{} samples for {}x{} image",
                data.len(),
                width,
                height
            )));
        }
        if data.iter().any(|v| !v.is_finite()) {
            return Err(Error::Image("non-finite sample".into()));
        }
        Ok(Image {
            width,
            height,
            maxval,
            data,
        })
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn maxval(&self) -> u32 {
        self.maxval
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn index(&self, x: usize, y: usize) -> usize {
        y * self.width + x
    }

    pub fn get(&self, x: usize, y: usize) -> f64 {
        self.data[self.index(x, y)]
    }

    pub fn as_vector(&self) -> DVector<f64> {
        DVector::from_column_slice(&self.data)
    }

    /// Same shape with replaced samples (clamped to [0, maxval] on write).
    pub fn with_samples(&self, v: &DVector<f64>) -> Result<Image> {
        if v.len() != self.data.len() {
            return Err(Error::Image("sample count mismatch".into()));
        }
        Image::new(self.width, self.height, self.maxval, v.iter().cloned().collect())
    }
}

fn is_pgm_space(b: u8) -> bool {
    matches!(b, b' ' | b'\t' | b'\n' | b'\r' | 11 | 12)
}

/// Pulls the next numeric token, skipping whitespace and `#` comments.
fn next_token(bytes: &[u8], pos: &mut usize, path: &Path) -> Result<u32> {
    loop {
        while *pos < bytes.len() && is_pgm_space(bytes[*pos]) {
            *pos += 1;
        }
        if *pos < bytes.len() && bytes[*pos] == b'#' {
            while *pos < bytes.len() && bytes[*pos] != b'\n' {
                *pos += 1;
            }
            continue;
        }
        break;
    }
    let start = *pos;
    while *pos < bytes.len() && bytes[*pos].is_ascii_digit() {
        *pos += 1;
    }
    if *pos == start {
        return Err(Error::parse(path, 0, "expected number in header"));
    }
    std::str::from_utf8(&bytes[start..*pos])
        .ok()
        .and_then(|s| s.parse().ok())
        .ok_or_else(|| Error::parse(path, 0, "bad number in header"))
}

/// Reads a P2 (ASCII) or P5 (binary) PGM file.
pub fn read_pgm(path: &Path) -> Result<Image> {
    let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
    if bytes.len() < 2 {
        return Err(Error::parse(path, 0, "truncated file"));
    }
    let magic = &bytes[0..2];
    let binary = match magic {
        b"P2" => false,
        b"P5" => true,
        _ => {
            return Err(Error::parse(
                path,
                0,
                format!("unsupported magic {:?}", String::from_utf8_lossy(magic)),
            ))
        }
    };
    let mut pos = 2;
    let width = next_token(&bytes, &mut pos, path)? as usize;
    let height = next_token(&bytes, &mut pos, path)? as usize;
    let maxval = next_token(&bytes, &mut pos, path)?;
    if maxval == 0 || maxval > 65535 {
        return Err(Error::parse(path, 0, format!("maxval {maxval} out of range")));
    }
    let count = width
        .checked_mul(height)
        .ok_or_else(|| Error::parse(path, 0, "image dimensions overflow"))?;
    let mut data = Vec::with_capacity(count);
    if binary {
        // exactly one whitespace byte separates the header from the raster
        if pos >= bytes.len() || !is_pgm_space(bytes[pos]) {
            return Err(Error::parse(path, 0, "missing raster separator"));
        }
        pos += 1;
        let wide = maxval > 255;
        let need = count * if wide { 2 } else { 1 };
        if bytes.len() < pos + need {
            return Err(Error::parse(path, 0, "truncated raster"));
        }
        for k in 0..count {
            let v = if wide {
                u16::from_be_bytes([bytes[pos + 2 * k], bytes[pos + 2 * k + 1]]) as u32
            } else {
                bytes[pos + k] as u32
            };
            data.push(v as f64);
        }
    } else {
        for _ in 0..count {
            data.push(next_token(&bytes, &mut pos, path)? as f64);
        }
    }
    if data.iter().any(|&v| v > maxval as f64) {
        return Err(Error::parse(path, 0, "sample exceeds maxval"));
    }
    Image::new(width, height, maxval, data)
}

/// Writes ASCII (P2) PGM; samples are clamped to [0, maxval] and rounded.
pub fn write_pgm(path: &Path, img: &Image) -> Result<()> {
    let mut out = format!("P2\n{} {}\n{}\n", img.width, img.height, img.maxval);
    for y in 0..img.height {
        let row: Vec<String> = (0..img.width)
            .map(|x| {
                let v = img.get(x, y).round().clamp(0.0, img.maxval as f64);
                format!("{}", v as u32)
            })
            .collect();
        out.push_str(&row.join(" "));
        out.push('\n');
    }
    fs::write(path, out).map_err(|e| Error::io(path, e))
}

/// Builds the bilateral window graph of an image.
///
/// Vertices are pixels in row-major order with coordinates (x, y); each
/// pair within Chebyshev distance `radius` is joined with the product of
/// the spatial and photometric Gaussian kernels.
pub fn bilateral_graph(img: &Image, radius: usize, sigma_d: f64, sigma_i: f64) -> Result<Graph> {
    if radius == 0 {
        return Err(Error::InvalidParameter("window radius must be positive".into()));
    }
    if !(sigma_d > 0.0 && sigma_d.is_finite() && sigma_i > 0.0 && sigma_i.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "sigma_d = {sigma_d}, sigma_i = {sigma_i}"
        )));
    }
    let (w, h) = (img.width as isize, img.height as isize);
    let r = radius as isize;
    let mut edges = Vec::new();
    for y in 0..h {
        for x in 0..w {
            let i = (y * w + x) as usize;
            // emit each pair once: scan the forward half of the window
            for dy in 0..=r {
                let lo = if dy == 0 { 1 } else { -r };
                for dx in lo..=r {
                    let (nx, ny) = (x + dx, y + dy);
                    if nx < 0 || nx >= w || ny >= h {
                        continue;
                    }
                    let j = (ny * w + nx) as usize;
                    let d2 = (dx * dx + dy * dy) as f64;
                    let di = img.data[i] - img.data[j];
                    let weight = (-d2 / (2.0 * sigma_d * sigma_d)).exp()
                        * (-di * di / (2.0 * sigma_i * sigma_i)).exp();
                    // the kernel underflows to 0 for wildly dissimilar
                    // pixels; that is "no edge", not an invalid weight
                    if weight > 0.0 {
                        edges.push((i, j, weight));
                    }
                }
            }
        }
    }
    let coords = (0..img.height)
        .flat_map(|y| (0..img.width).map(move |x| [x as f64, y as f64]))
        .collect();
    Graph::new(img.width * img.height, edges)?.with_coords(coords)
}

/// The bilateral pair (Z, Q): fundamental matrix Z = (I + D)⁻¹L and inner
/// product Q = I + D of the window graph.
pub fn bilateral_operator(g: &Graph) -> (Fundamental, InnerProduct) {
    let q = InnerProduct::identity_plus_degree(g);
    let lap = g.laplacian_csr();
    let inv = q.diagonal().expect("I+D is diagonal").map(|v| 1.0 / v);
    (Fundamental::Sparse(lap.scale_rows(&inv)), q)
}

/// One bilateral pass y = x − Zx = (I + D)⁻¹(I + A)x.
pub fn bilateral_pass(z: &Fundamental, x: &DVector<f64>) -> Result<DVector<f64>> {
    if x.len() != z.dim() {
        return Err(Error::InvalidParameter("signal/operator size mismatch".into()));
    }
    Ok(x - z.matvec(x))
}

/// Runs `passes` bilateral iterations on an image. The graph is built once
/// from the input intensities and reused across passes.
pub fn bilateral_filter(
    img: &Image,
    radius: usize,
    sigma_d: f64,
    sigma_i: f64,
    passes: usize,
) -> Result<Image> {
    if passes == 0 {
        return Err(Error::InvalidParameter("needs at least one pass".into()));
    }
    let g = bilateral_graph(img, radius, sigma_d, sigma_i)?;
    let (z, _) = bilateral_operator(&g);
    let mut x = img.as_vector();
    for _ in 0..passes {
        x = bilateral_pass(&z, &x)?;
    }
    img.with_samples(&x)
}
