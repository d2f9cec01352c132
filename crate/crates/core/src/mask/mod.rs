//! Dense binary masks and the geometry every other module builds on.

mod affine;
mod components;
mod contour;
mod morphology;
mod overlap;

use std::path::Path;

use image::GrayImage;

use crate::error::{Error, Result};

pub use affine::{transform_component, Affine};
pub use components::{connected_components, BoundingBox, Component};
pub use contour::{rasterize, trace_boundary, PolygonRing};
pub use morphology::{dilate_square, erode_square};
pub use overlap::{f1, iou, ConfusionCounts};

/// Row-major boolean grid; `true` marks a building pixel.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct BinaryMask {
    width: usize,
    height: usize,
    pixels: Vec<bool>,
}

impl BinaryMask {
    /// All-background mask. Panics on a zero dimension.
    pub fn new(width: usize, height: usize) -> Self {
        assert!(width > 0 && height > 0, "mask dimensions must be positive");
        Self {
            width,
            height,
            pixels: vec![false; width * height],
        }
    }

    pub fn from_pixels(width: usize, height: usize, pixels: Vec<bool>) -> Result<Self> {
        if width == 0 || height == 0 {
            return Err(Error::invalid(format!(
                "mask dimensions must be positive, got {width}x{height}"
            )));
        }
        if pixels.len() != width * height {
            return Err(Error::invalid(format!(
                "{} pixels supplied for a {width}x{height} mask",
                pixels.len()
            )));
        }
        Ok(Self {
            width,
            height,
            pixels,
        })
    }

    /// Builds a mask from `(row, col)` coordinates; out-of-bounds points are ignored.
    pub fn from_coords<I>(width: usize, height: usize, coords: I) -> Self
    where
        I: IntoIterator<Item = (usize, usize)>,
    {
        let mut mask = Self::new(width, height);
        for (r, c) in coords {
            if r < height && c < width {
                mask.pixels[r * width + c] = true;
            }
        }
        mask
    }

    /// Parses rows of `#` (building) and `.` (background). Whitespace-only
    /// lines are skipped.
    pub fn from_ascii(art: &str) -> Result<Self> {
        let rows: Vec<&str> = art
            .lines()
            .map(str::trim)
            .filter(|l| !l.is_empty())
            .collect();
        let height = rows.len();
        let width = rows.first().map_or(0, |r| r.chars().count());
        let mut pixels = Vec::with_capacity(width * height);
        for row in &rows {
            if row.chars().count() != width {
                return Err(Error::invalid("ragged ascii mask"));
            }
            for ch in row.chars() {
                match ch {
                    '#' => pixels.push(true),
                    '.' => pixels.push(false),
                    other => {
                        return Err(Error::invalid(format!(
                            "unexpected {other:?} in ascii mask"
                        )))
                    }
                }
            }
        }
        Self::from_pixels(width, height, pixels)
    }

    #[inline]
    pub fn width(&self) -> usize {
        self.width
    }

    #[inline]
    pub fn height(&self) -> usize {
        self.height
    }

    #[inline]
    pub fn dims(&self) -> (usize, usize) {
        (self.width, self.height)
    }

    #[inline]
    pub fn get(&self, row: usize, col: usize) -> bool {
        self.pixels[row * self.width + col]
    }

    #[inline]
    pub fn set(&mut self, row: usize, col: usize, value: bool) {
        self.pixels[row * self.width + col] = value;
    }

    pub fn pixels(&self) -> &[bool] {
        &self.pixels
    }

    pub fn pixels_mut(&mut self) -> &mut [bool] {
        &mut self.pixels
    }

    /// Number of building pixels.
    pub fn count(&self) -> usize {
        self.pixels.iter().filter(|&&p| p).count()
    }

    /// True when the mask has no building pixel.
    pub fn is_blank(&self) -> bool {
        !self.pixels.iter().any(|&p| p)
    }

    /// `(row, col)` of every building pixel in row-major order.
    pub fn coords(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        let w = self.width;
        self.pixels
            .iter()
            .enumerate()
            .filter(|(_, &p)| p)
            .map(move |(i, _)| (i / w, i % w))
    }

    /// Sets every pixel of `other` that is on. Dimensions must agree.
    pub fn union_with(&mut self, other: &BinaryMask) -> Result<()> {
        ensure_same_dims(self, other)?;
        for (a, &b) in self.pixels.iter_mut().zip(&other.pixels) {
            *a |= b;
        }
        Ok(())
    }

    pub fn to_gray_image(&self) -> GrayImage {
        let raw = self
            .pixels
            .iter()
            .map(|&p| if p { 255 } else { 0 })
            .collect();
        GrayImage::from_raw(self.width as u32, self.height as u32, raw)
            .expect("buffer length matches dimensions")
    }

    /// Any nonzero luma counts as building.
    pub fn from_gray_image(img: &GrayImage) -> Result<Self> {
        let (w, h) = img.dimensions();
        Self::from_pixels(
            w as usize,
            h as usize,
            img.as_raw().iter().map(|&v| v != 0).collect(),
        )
    }

    /// Loads a single-channel PNG. Multi-channel inputs are converted to luma first.
    pub fn load_png(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let img = image::open(path).map_err(|source| Error::Image {
            path: path.to_path_buf(),
            source,
        })?;
        Self::from_gray_image(&img.into_luma8())
    }

    /// Writes an 8-bit grayscale PNG containing only 0 and 255.
    pub fn save_png(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        self.to_gray_image()
            .save_with_format(path, image::ImageFormat::Png)
            .map_err(|source| Error::Image {
                path: path.to_path_buf(),
                source,
            })
    }
}

impl std::fmt::Display for BinaryMask {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        for r in 0..self.height {
            for c in 0..self.width {
                f.write_str(if self.get(r, c) { "#" } else { "." })?;
            }
            f.write_str("\n")?;
        }
        Ok(())
    }
}

pub(crate) fn ensure_same_dims(a: &BinaryMask, b: &BinaryMask) -> Result<()> {
    if a.dims() != b.dims() {
        return Err(Error::DimensionMismatch {
            left_width: a.width,
            left_height: a.height,
            right_width: b.width,
            right_height: b.height,
        });
    }
    Ok(())
}
