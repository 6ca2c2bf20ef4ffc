//! Grayscale image and mask files.
//!
//! Images load as fields in `[0, 1]`. Accepted inputs are 8-bit PGM (`P2`
//! or `P5`) and 8-bit grayscale or colour PNG, colour being reduced to luma.

use std::fs;
use std::io::{BufWriter, Write};
use std::path::Path;

use anyhow::{bail, Context, Result};
use image::{DynamicImage, GrayImage, ImageFormat, ImageReader, Rgb, RgbImage};

use toposnake_core::topology::BinaryMask;
use toposnake_core::{GridDims, ScalarField};

pub fn load_image(path: &Path) -> Result<ScalarField> {
    field_from_gray(&load_luma(path)?).with_context(|| path.display().to_string())
}

/// Decodes an accepted file to 8-bit luma.
pub fn load_luma(path: &Path) -> Result<GrayImage> {
    let reader = ImageReader::open(path)
        .with_context(|| format!("cannot open {}", path.display()))?
        .with_guessed_format()
        .with_context(|| format!("cannot read {}", path.display()))?;
    match reader.format() {
        Some(ImageFormat::Png | ImageFormat::Pnm) => {}
        Some(other) => bail!("{}: unsupported format {other:?}", path.display()),
        None => bail!("{}: unrecognized image format", path.display()),
    }
    let img = reader
        .decode()
        .with_context(|| format!("cannot decode {}", path.display()))?;
    to_luma(img).with_context(|| path.display().to_string())
}

fn to_luma(img: DynamicImage) -> Result<GrayImage> {
    Ok(match img {
        DynamicImage::ImageLuma8(g) => g,
        DynamicImage::ImageLumaA8(_) | DynamicImage::ImageRgb8(_) | DynamicImage::ImageRgba8(_) => {
            img.to_luma8()
        }
        other => bail!("only 8-bit images are supported, got {:?}", other.color()),
    })
}

/// Row-major intensities divided by 255.
pub fn normalized(gray: &GrayImage) -> Vec<f64> {
    gray.as_raw()
        .iter()
        .map(|&v| f64::from(v) / 255.0)
        .collect()
}

pub fn field_from_gray(gray: &GrayImage) -> Result<ScalarField> {
    let (w, h) = gray.dimensions();
    if w == 0 || h == 0 {
        bail!("image has zero size");
    }
    let dims = GridDims::new(h as usize, w as usize).context("image too small to segment")?;
    Ok(ScalarField::from_vec(dims, normalized(gray))?)
}

/// Rounds a `[0, 1]` field to 8 bits, clamping anything outside.
pub fn gray_from_field(f: &ScalarField) -> GrayImage {
    let d = f.dims();
    GrayImage::from_fn(d.cols() as u32, d.rows() as u32, |x, y| {
        image::Luma([quantize(f.get(y as usize, x as usize))])
    })
}

fn quantize(v: f64) -> u8 {
    (v.clamp(0.0, 1.0) * 255.0).round() as u8
}

/// Binary `P5` PGM.
pub fn save_pgm(path: &Path, f: &ScalarField) -> Result<()> {
    let d = f.dims();
    let mut out = BufWriter::new(
        fs::File::create(path).with_context(|| format!("cannot create {}", path.display()))?,
    );
    write!(out, "P5\n{} {}\n255\n", d.cols(), d.rows())?;
    let bytes: Vec<u8> = f.as_slice().iter().map(|&v| quantize(v)).collect();
    out.write_all(&bytes)?;
    out.flush()?;
    Ok(())
}

/// PGM or PNG by extension.
pub fn save_image(path: &Path, f: &ScalarField) -> Result<()> {
    match extension(path).as_deref() {
        Some("pgm") => save_pgm(path, f),
        Some("png") => gray_from_field(f)
            .save_with_format(path, ImageFormat::Png)
            .with_context(|| format!("cannot write {}", path.display())),
        _ => bail!("{}: output must end in .pgm or .png", path.display()),
    }
}

fn extension(path: &Path) -> Option<String> {
    path.extension()
        .and_then(|e| e.to_str())
        .map(str::to_ascii_lowercase)
}

/// Inside pixels white, the rest black.
pub fn save_mask(path: &Path, mask: &BinaryMask) -> Result<()> {
    let d = mask.dims();
    let img = GrayImage::from_fn(d.cols() as u32, d.rows() as u32, |x, y| {
        image::Luma([if mask.get(y as usize, x as usize) {
            255
        } else {
            0
        }])
    });
    img.save_with_format(path, ImageFormat::Png)
        .with_context(|| format!("cannot write {}", path.display()))
}

/// Pixels at or above mid-gray are set.
pub fn load_mask(path: &Path) -> Result<BinaryMask> {
    let f = load_image(path)?;
    Ok(BinaryMask::from_fn(f.dims(), |i, j| f.get(i, j) >= 0.5))
}

/// The image in gray with the boundary pixels of `mask` painted red.
pub fn overlay(image: &ScalarField, mask: &BinaryMask) -> RgbImage {
    let d = image.dims();
    let (rows, cols) = (d.rows(), d.cols());
    RgbImage::from_fn(cols as u32, rows as u32, |x, y| {
        let (i, j) = (y as usize, x as usize);
        let on_edge = mask.get(i, j)
            && [(-1isize, 0isize), (1, 0), (0, -1), (0, 1)]
                .iter()
                .any(|&(di, dj)| {
                    let (a, b) = (i as isize + di, j as isize + dj);
                    a < 0
                        || b < 0
                        || a >= rows as isize
                        || b >= cols as isize
                        || !mask.get(a as usize, b as usize)
                });
        if on_edge {
            Rgb([255, 0, 0])
        } else {
            let v = quantize(image.get(i, j));
            Rgb([v, v, v])
        }
    })
}

pub fn save_overlay(path: &Path, image: &ScalarField, mask: &BinaryMask) -> Result<()> {
    overlay(image, mask)
        .save_with_format(path, ImageFormat::Png)
        .with_context(|| format!("cannot write {}", path.display()))
}
