//! Synthetic datasets, augmentation, and dataset directory I/O.
//!
//! Point generators produce non-linearly-separable 2D sets (XOR corner
//! blobs, concentric rings). The image generator produces blade-like
//! segmentation scenes: bright elongated quadrilaterals over a darker
//! textured sky gradient, optionally crossed by a dark shadow band that
//! darkens blade and background alike — the pixels no per-pixel color
//! rule can fully resolve.
//!
//! Everything is a pure function of (params, seed); splits draw from
//! split-tagged subseeds so they are disjoint by construction.

pub mod pnm;

use std::path::Path;

use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{DdaError, Result};
use crate::matrix::Matrix;
use crate::rng::{rng_from, subseed, subseed_indexed};
use pnm::{Gray8Image, Rgb8Image};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Split {
    Train,
    Val,
    Test,
}

impl Split {
    pub const ALL: [Split; 3] = [Split::Train, Split::Val, Split::Test];

    pub fn as_str(self) -> &'static str {
        match self {
            Split::Train => "train",
            Split::Val => "val",
            Split::Test => "test",
        }
    }
}

/// 2D (or d-dim) labeled point set.
#[derive(Debug, Clone, PartialEq)]
pub struct PointDataset {
    pub features: Matrix,
    pub labels: Vec<bool>,
    pub split: Split,
    pub seed: u64,
}

/// Four Gaussian blobs at (±1, ±1) with diagonal labeling: the quadrant
/// product sign decides the class, so no linear cut separates them.
pub fn gen_xor(n_per_cluster: usize, noise_sd: f64, seed: u64) -> PointDataset {
    assert!(n_per_cluster >= 1, "need at least one point per cluster");
    assert!(noise_sd >= 0.0, "noise must be non-negative");
    let mut rng = rng_from(seed);
    let centers = [(1.0, 1.0), (-1.0, -1.0), (1.0, -1.0), (-1.0, 1.0)];
    let mut rows = Vec::with_capacity(4 * n_per_cluster);
    let mut labels = Vec::with_capacity(4 * n_per_cluster);
    for (i, (cx, cy)) in centers.iter().enumerate() {
        for _ in 0..n_per_cluster {
            let (nx, ny) = normal_pair(&mut rng);
            rows.push(vec![cx + noise_sd * nx, cy + noise_sd * ny]);
            labels.push(i >= 2); // opposite-sign quadrants are class 1
        }
    }
    PointDataset {
        features: Matrix::from_rows(&rows),
        labels,
        split: Split::Train,
        seed,
    }
}

/// Two concentric rings; the inner ring is class 1.
pub fn gen_rings(n_per_ring: usize, radii: (f64, f64), noise_sd: f64, seed: u64) -> PointDataset {
    assert!(n_per_ring >= 1);
    assert!(radii.0 > 0.0 && radii.1 > radii.0, "need 0 < inner < outer");
    assert!(noise_sd >= 0.0);
    let mut rng = rng_from(seed);
    let mut rows = Vec::with_capacity(2 * n_per_ring);
    let mut labels = Vec::with_capacity(2 * n_per_ring);
    for (ring, &r) in [radii.0, radii.1].iter().enumerate() {
        for _ in 0..n_per_ring {
            let angle = rng.gen_range(0.0..std::f64::consts::TAU);
            let (noise, _) = normal_pair(&mut rng);
            let rr = r + noise_sd * noise;
            rows.push(vec![rr * angle.cos(), rr * angle.sin()]);
            labels.push(ring == 0);
        }
    }
    PointDataset {
        features: Matrix::from_rows(&rows),
        labels,
        split: Split::Train,
        seed,
    }
}

/// Box-Muller standard normal pair from uniform draws, so the stream is
/// fully pinned by our own code.
fn normal_pair(rng: &mut ChaCha8Rng) -> (f64, f64) {
    let u1: f64 = rng.gen_range(f64::MIN_POSITIVE..1.0);
    let u2: f64 = rng.gen_range(0.0..1.0);
    let r = (-2.0 * u1.ln()).sqrt();
    let t = std::f64::consts::TAU * u2;
    (r * t.cos(), r * t.sin())
}

/// Shadow band geometry recorded so measurements can exclude it.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ShadowSpec {
    pub cx: f64,
    pub cy: f64,
    /// Unit normal of the band axis; |(p − c)·n| ≤ half_width is inside.
    pub nx: f64,
    pub ny: f64,
    pub half_width: f64,
    pub factor: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    pub seed: u64,
    pub blades: usize,
    pub shadow: Option<ShadowSpec>,
}

/// One synthetic scene: channel-major RGB planes in [0, 1] plus the blade
/// mask.
#[derive(Debug, Clone, PartialEq)]
pub struct ImageExample {
    pub width: usize,
    pub height: usize,
    /// 3 × height × width, channel-major.
    pub image: Vec<f64>,
    /// height × width.
    pub mask: Vec<bool>,
    pub provenance: Provenance,
}

impl ImageExample {
    pub fn pixel_count(&self) -> usize {
        self.width * self.height
    }

    pub fn channel(&self, c: usize) -> &[f64] {
        let n = self.pixel_count();
        &self.image[c * n..(c + 1) * n]
    }

    /// Per-pixel feature rows: RGB, optionally followed by normalized
    /// (x, y) coordinates.
    pub fn pixel_features(&self, include_coords: bool) -> Matrix {
        let n = self.pixel_count();
        let d = if include_coords { 5 } else { 3 };
        let mut data = Vec::with_capacity(n * d);
        for y in 0..self.height {
            for x in 0..self.width {
                let p = y * self.width + x;
                data.push(self.image[p]);
                data.push(self.image[n + p]);
                data.push(self.image[2 * n + p]);
                if include_coords {
                    data.push(x as f64 / (self.width - 1).max(1) as f64);
                    data.push(y as f64 / (self.height - 1).max(1) as f64);
                }
            }
        }
        Matrix::new(n, d, data)
    }

    pub fn to_rgb8(&self) -> Rgb8Image {
        let n = self.pixel_count();
        let mut data = Vec::with_capacity(n * 3);
        for p in 0..n {
            for c in 0..3 {
                data.push(quantize(self.image[c * n + p]));
            }
        }
        Rgb8Image::new(self.width, self.height, data)
    }

    pub fn mask_to_gray8(&self) -> Gray8Image {
        Gray8Image::new(
            self.width,
            self.height,
            self.mask.iter().map(|&m| if m { 255 } else { 0 }).collect(),
        )
    }

    /// Rebuild from 8-bit planes, normalizing into the unit interval.
    pub fn from_planes(rgb: &Rgb8Image, mask: &Gray8Image, provenance: Provenance) -> Result<Self> {
        if rgb.width != mask.width || rgb.height != mask.height {
            return Err(DdaError::DimensionMismatch {
                expected: rgb.width * rgb.height,
                got: mask.width * mask.height,
            });
        }
        let n = rgb.width * rgb.height;
        let mut image = vec![0.0; 3 * n];
        for p in 0..n {
            for c in 0..3 {
                image[c * n + p] = f64::from(rgb.data[p * 3 + c]) / 255.0;
            }
        }
        Ok(Self {
            width: rgb.width,
            height: rgb.height,
            image,
            mask: mask.data.iter().map(|&v| v >= 128).collect(),
            provenance,
        })
    }
}

fn quantize(v: f64) -> u8 {
    (v.clamp(0.0, 1.0) * 255.0).round() as u8
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BladeParams {
    /// Acceptable blade-area fraction of the image.
    pub area_range: (f64, f64),
    pub shadow_prob: f64,
    /// Required mean-luminance margin of blade over background outside
    /// shadow bands.
    pub luminance_margin: f64,
    pub max_blades: usize,
}

impl Default for BladeParams {
    fn default() -> Self {
        Self {
            area_range: (0.1, 0.5),
            shadow_prob: 0.6,
            luminance_margin: 0.15,
            max_blades: 2,
        }
    }
}

struct Blade {
    cx: f64,
    cy: f64,
    ux: f64,
    uy: f64,
    half_len: f64,
    half_wid: f64,
    base_lum: f64,
    shade: f64,
}

impl Blade {
    /// (inside, position along axis in [0, 1])
    fn hit(&self, px: f64, py: f64) -> Option<f64> {
        let dx = px - self.cx;
        let dy = py - self.cy;
        let du = dx * self.ux + dy * self.uy;
        let dv = -dx * self.uy + dy * self.ux;
        if du.abs() <= self.half_len && dv.abs() <= self.half_wid {
            Some((du + self.half_len) / (2.0 * self.half_len))
        } else {
            None
        }
    }
}

/// Procedural blade-like scenes. Scenes are resampled until the blade area
/// fraction lands inside `params.area_range`, all from one seeded stream.
pub fn gen_blade_images(
    count: usize,
    size: usize,
    seed: u64,
    params: &BladeParams,
) -> Vec<ImageExample> {
    assert!(count >= 1, "need at least one image");
    assert!(size >= 8, "image size too small");
    (0..count)
        .map(|i| gen_blade_image(size, subseed_indexed(seed, "blade-image", i as u64), params))
        .collect()
}

fn gen_blade_image(size: usize, seed: u64, params: &BladeParams) -> ImageExample {
    let mut rng = rng_from(seed);
    let s = size as f64;
    let n = size * size;

    // sky/ground gradient with low-frequency sinusoidal texture
    let top = rng.gen_range(0.45..0.65);
    let bottom = rng.gen_range(0.30..0.50);
    let waves: Vec<(f64, f64, f64, f64)> = (0..3)
        .map(|_| {
            (
                rng.gen_range(0.02..0.06),                       // amplitude
                rng.gen_range(1.0..3.0) * std::f64::consts::TAU / s, // frequency
                rng.gen_range(0.0..std::f64::consts::TAU),       // phase
                rng.gen_range(0.0..std::f64::consts::TAU),       // orientation
            )
        })
        .collect();

    // sample blades until the union area fraction is acceptable
    let n_blades = rng.gen_range(1..=params.max_blades.max(1));
    let (blades, mask) = loop {
        let candidates: Vec<Blade> = (0..n_blades)
            .map(|_| {
                let angle = rng.gen_range(0.0..std::f64::consts::PI);
                Blade {
                    cx: rng.gen_range(0.3..0.7) * s,
                    cy: rng.gen_range(0.3..0.7) * s,
                    ux: angle.cos(),
                    uy: angle.sin(),
                    half_len: rng.gen_range(0.45..0.75) * s,
                    half_wid: rng.gen_range(0.07..0.16) * s,
                    base_lum: rng.gen_range(0.86..0.97),
                    shade: rng.gen_range(-0.05..0.05),
                }
            })
            .collect();
        let mut mask = vec![false; n];
        for y in 0..size {
            for x in 0..size {
                let (px, py) = (x as f64 + 0.5, y as f64 + 0.5);
                if candidates.iter().any(|b| b.hit(px, py).is_some()) {
                    mask[y * size + x] = true;
                }
            }
        }
        let fraction = mask.iter().filter(|&&m| m).count() as f64 / n as f64;
        if fraction >= params.area_range.0 && fraction <= params.area_range.1 {
            break (candidates, mask);
        }
    };

    let shadow = if rng.gen_bool(params.shadow_prob) {
        let angle = rng.gen_range(0.0..std::f64::consts::PI);
        Some(ShadowSpec {
            cx: rng.gen_range(0.2..0.8) * s,
            cy: rng.gen_range(0.2..0.8) * s,
            nx: -angle.sin(),
            ny: angle.cos(),
            half_width: rng.gen_range(0.05..0.125) * s,
            factor: rng.gen_range(0.45..0.65),
        })
    } else {
        None
    };

    let mut image = vec![0.0; 3 * n];
    for y in 0..size {
        for x in 0..size {
            let p = y * size + x;
            let (px, py) = (x as f64 + 0.5, y as f64 + 0.5);
            let (mut r, mut g, mut b);
            if mask[p] {
                // brightest blade wins where two overlap
                let mut lum: f64 = 0.0;
                for blade in &blades {
                    if let Some(t) = blade.hit(px, py) {
                        lum = lum.max(blade.base_lum + blade.shade * (t - 0.5));
                    }
                }
                r = lum;
                g = lum;
                b = (lum + 0.015).min(1.0);
            } else {
                let mut lum = top + (bottom - top) * (py / s);
                for &(amp, freq, phase, orient) in &waves {
                    let t = px * orient.cos() + py * orient.sin();
                    lum += amp * (freq * t + phase).sin();
                }
                r = lum * 0.94;
                g = lum * 0.97;
                b = lum * 1.05;
            }
            if let Some(sh) = &shadow {
                let d = (px - sh.cx) * sh.nx + (py - sh.cy) * sh.ny;
                if d.abs() <= sh.half_width {
                    r *= sh.factor;
                    g *= sh.factor;
                    b *= sh.factor;
                }
            }
            image[p] = r.clamp(0.0, 1.0);
            image[n + p] = g.clamp(0.0, 1.0);
            image[2 * n + p] = b.clamp(0.0, 1.0);
        }
    }

    ImageExample {
        width: size,
        height: size,
        image,
        mask,
        provenance: Provenance {
            seed,
            blades: blades.len(),
            shadow,
        },
    }
}

/// Fraction of the crop retained along each axis.
pub const CROP_FRACTION: f64 = 0.875;

/// Random horizontal/vertical flips (p = 0.5 each) and a random crop to
/// 87.5% resized back to the original resolution — bilinear for the image,
/// nearest for the mask, mask re-binarized afterwards. Image and mask go
/// through the same sampled geometry.
pub fn augment(example: &ImageExample, seed: u64) -> ImageExample {
    let mut rng = rng_from(seed);
    let (w, h) = (example.width, example.height);
    let n = w * h;
    let hflip = rng.gen_bool(0.5);
    let vflip = rng.gen_bool(0.5);
    let cw = ((w as f64 * CROP_FRACTION).round() as usize).max(1);
    let ch = ((h as f64 * CROP_FRACTION).round() as usize).max(1);
    let ox = rng.gen_range(0..=w - cw);
    let oy = rng.gen_range(0..=h - ch);

    let src = |x: usize, y: usize| -> (usize, usize) {
        let x = if hflip { w - 1 - x } else { x };
        let y = if vflip { h - 1 - y } else { y };
        (x, y)
    };

    // flipped then cropped planes
    let mut crop_img = vec![0.0; 3 * cw * ch];
    let mut crop_mask = vec![false; cw * ch];
    for y in 0..ch {
        for x in 0..cw {
            let (sx, sy) = src(x + ox, y + oy);
            let sp = sy * w + sx;
            for c in 0..3 {
                crop_img[c * cw * ch + y * cw + x] = example.image[c * n + sp];
            }
            crop_mask[y * cw + x] = example.mask[sp];
        }
    }

    // resize back: bilinear image, nearest mask
    let mut image = vec![0.0; 3 * n];
    let mut mask = vec![false; n];
    let sx_scale = cw as f64 / w as f64;
    let sy_scale = ch as f64 / h as f64;
    for y in 0..h {
        for x in 0..w {
            let fx = ((x as f64 + 0.5) * sx_scale - 0.5).clamp(0.0, (cw - 1) as f64);
            let fy = ((y as f64 + 0.5) * sy_scale - 0.5).clamp(0.0, (ch - 1) as f64);
            let (x0, y0) = (fx.floor() as usize, fy.floor() as usize);
            let (x1, y1) = ((x0 + 1).min(cw - 1), (y0 + 1).min(ch - 1));
            let (tx, ty) = (fx - x0 as f64, fy - y0 as f64);
            for c in 0..3 {
                let plane = &crop_img[c * cw * ch..(c + 1) * cw * ch];
                let v00 = plane[y0 * cw + x0];
                let v01 = plane[y0 * cw + x1];
                let v10 = plane[y1 * cw + x0];
                let v11 = plane[y1 * cw + x1];
                let v = v00 * (1.0 - tx) * (1.0 - ty)
                    + v01 * tx * (1.0 - ty)
                    + v10 * (1.0 - tx) * ty
                    + v11 * tx * ty;
                image[c * n + y * w + x] = v.clamp(0.0, 1.0);
            }
            let nx = (fx.round() as usize).min(cw - 1);
            let ny = (fy.round() as usize).min(ch - 1);
            // nearest keeps the mask binary; the >= 0.5 rule is a no-op here
            mask[y * w + x] = crop_mask[ny * cw + nx];
        }
    }

    ImageExample {
        width: w,
        height: h,
        image,
        mask,
        provenance: example.provenance.clone(),
    }
}

/// A materialized train/val/test triple of either points or images.
#[derive(Debug, Clone, PartialEq)]
pub enum SplitData {
    Points(PointDataset),
    Images(Vec<ImageExample>),
}

impl SplitData {
    pub fn len(&self) -> usize {
        match self {
            SplitData::Points(p) => p.labels.len(),
            SplitData::Images(v) => v.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    pub train: SplitData,
    pub val: SplitData,
    pub test: SplitData,
}

impl Dataset {
    pub fn split(&self, s: Split) -> &SplitData {
        match s {
            Split::Train => &self.train,
            Split::Val => &self.val,
            Split::Test => &self.test,
        }
    }

    /// XOR blobs; counts are per cluster per split.
    pub fn xor(counts: (usize, usize, usize), noise_sd: f64, seed: u64) -> Self {
        let gen = |split: Split, n: usize| {
            let mut d = gen_xor(n, noise_sd, subseed(seed, split.as_str()));
            d.split = split;
            SplitData::Points(d)
        };
        Self {
            train: gen(Split::Train, counts.0),
            val: gen(Split::Val, counts.1),
            test: gen(Split::Test, counts.2),
        }
    }

    /// Concentric rings; counts are per ring per split.
    pub fn rings(
        counts: (usize, usize, usize),
        radii: (f64, f64),
        noise_sd: f64,
        seed: u64,
    ) -> Self {
        let gen = |split: Split, n: usize| {
            let mut d = gen_rings(n, radii, noise_sd, subseed(seed, split.as_str()));
            d.split = split;
            SplitData::Points(d)
        };
        Self {
            train: gen(Split::Train, counts.0),
            val: gen(Split::Val, counts.1),
            test: gen(Split::Test, counts.2),
        }
    }

    /// Blade scenes; counts are images per split.
    pub fn blades(
        counts: (usize, usize, usize),
        size: usize,
        seed: u64,
        params: &BladeParams,
    ) -> Self {
        let gen = |split: Split, n: usize| {
            SplitData::Images(gen_blade_images(
                n,
                size,
                subseed(seed, split.as_str()),
                params,
            ))
        };
        Self {
            train: gen(Split::Train, counts.0),
            val: gen(Split::Val, counts.1),
            test: gen(Split::Test, counts.2),
        }
    }

    /// Deterministic per-epoch shuffle order for the training split.
    pub fn shuffled_train_indices(&self, seed: u64, epoch: usize) -> Vec<usize> {
        let mut idx: Vec<usize> = (0..self.train.len()).collect();
        let mut rng = rng_from(subseed_indexed(seed, "shuffle", epoch as u64));
        idx.shuffle(&mut rng);
        idx
    }
}

/// On-disk manifest describing how a dataset directory was produced.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub kind: String,
    pub seed: u64,
    pub rng: String,
    pub counts: [usize; 3],
    /// Generator parameters, kind-specific.
    pub params: serde_json::Value,
    /// Fully resolved configuration echo from the producing command.
    pub config: String,
}

pub fn write_manifest(root: &Path, manifest: &Manifest) -> Result<()> {
    std::fs::create_dir_all(root)?;
    let text = serde_json::to_string_pretty(manifest)?;
    std::fs::write(root.join("manifest.json"), text)?;
    Ok(())
}

pub fn read_manifest(root: &Path) -> Result<Manifest> {
    let text = std::fs::read_to_string(root.join("manifest.json"))?;
    Ok(serde_json::from_str(&text)?)
}

/// `<root>/<split>/img_%05d.ppm` and `msk_%05d.pgm`.
pub fn write_image_split(root: &Path, split: Split, examples: &[ImageExample]) -> Result<()> {
    let dir = root.join(split.as_str());
    std::fs::create_dir_all(&dir)?;
    for (i, ex) in examples.iter().enumerate() {
        pnm::write_ppm(&dir.join(format!("img_{i:05}.ppm")), &ex.to_rgb8())?;
        pnm::write_pgm(&dir.join(format!("msk_{i:05}.pgm")), &ex.mask_to_gray8())?;
    }
    Ok(())
}

pub fn read_image_split(root: &Path, split: Split) -> Result<Vec<ImageExample>> {
    let dir = root.join(split.as_str());
    let mut out = Vec::new();
    for i in 0.. {
        let img_path = dir.join(format!("img_{i:05}.ppm"));
        if !img_path.exists() {
            break;
        }
        let rgb = pnm::read_ppm(&img_path)?;
        let mask = pnm::read_pgm(&dir.join(format!("msk_{i:05}.pgm")))?;
        out.push(ImageExample::from_planes(
            &rgb,
            &mask,
            Provenance {
                seed: 0,
                blades: 0,
                shadow: None,
            },
        )?);
    }
    if out.is_empty() {
        return Err(DdaError::InvalidInput(format!(
            "no images found under {}",
            dir.display()
        )));
    }
    Ok(out)
}

/// `<root>/<split>/points.csv` with header x0,..,x{d-1},label.
pub fn write_point_split(root: &Path, split: Split, data: &PointDataset) -> Result<()> {
    let dir = root.join(split.as_str());
    std::fs::create_dir_all(&dir)?;
    let d = data.features.cols;
    let mut text = String::new();
    for j in 0..d {
        text.push_str(&format!("x{j},"));
    }
    text.push_str("label\n");
    for r in 0..data.features.rows {
        for v in data.features.row(r) {
            text.push_str(&format!("{v},"));
        }
        text.push_str(if data.labels[r] { "1\n" } else { "0\n" });
    }
    std::fs::write(dir.join("points.csv"), text)?;
    Ok(())
}

pub fn read_point_split(root: &Path, split: Split) -> Result<PointDataset> {
    let path = root.join(split.as_str()).join("points.csv");
    let text = std::fs::read_to_string(&path)?;
    let mut lines = text.lines();
    let header = lines
        .next()
        .ok_or_else(|| DdaError::InvalidInput(format!("{}: empty file", path.display())))?;
    let d = header.split(',').count() - 1;
    let mut rows = Vec::new();
    let mut labels = Vec::new();
    for (ln, line) in lines.enumerate() {
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != d + 1 {
            return Err(DdaError::InvalidInput(format!(
                "{}:{}: expected {} fields, got {}",
                path.display(),
                ln + 2,
                d + 1,
                fields.len()
            )));
        }
        let mut row = Vec::with_capacity(d);
        for f in &fields[..d] {
            row.push(f.parse::<f64>().map_err(|e| {
                DdaError::InvalidInput(format!("{}:{}: {e}", path.display(), ln + 2))
            })?);
        }
        rows.push(row);
        labels.push(fields[d] == "1");
    }
    Ok(PointDataset {
        features: Matrix::from_rows(&rows),
        labels,
        split,
        seed: 0,
    })
}

pub fn write_dataset(root: &Path, dataset: &Dataset, manifest: &Manifest) -> Result<()> {
    write_manifest(root, manifest)?;
    for split in Split::ALL {
        match dataset.split(split) {
            SplitData::Points(p) => write_point_split(root, split, p)?,
            SplitData::Images(v) => write_image_split(root, split, v)?,
        }
    }
    Ok(())
}

pub fn load_dataset(root: &Path) -> Result<Dataset> {
    let manifest = read_manifest(root)?;
    let image_kind = manifest.kind == "blades";
    let load = |split: Split| -> Result<SplitData> {
        if image_kind {
            Ok(SplitData::Images(read_image_split(root, split)?))
        } else {
            Ok(SplitData::Points(read_point_split(root, split)?))
        }
    };
    Ok(Dataset {
        train: load(Split::Train)?,
        val: load(Split::Val)?,
        test: load(Split::Test)?,
    })
}
