use crate::error::{Error, Result};
use crate::histogram::Histogram;

/// A grayscale image with real-valued intensities stored row-major.
///
/// Gradient-ascent intermediates share this type with bin-valued images, so
/// intensities are not restricted to integers here.
#[derive(Debug, Clone, PartialEq)]
pub struct Image {
    width: usize,
    height: usize,
    data: Vec<f64>,
}

impl Image {
    pub fn new(width: usize, height: usize, data: Vec<f64>) -> Result<Self> {
        if width == 0 || height == 0 {
            return Err(Error::EmptyImage { width, height });
        }
        let expected = width * height;
        if data.len() != expected {
            return Err(Error::BufferLength {
                width,
                height,
                expected,
                actual: data.len(),
            });
        }
        if let Some((index, &value)) = data.iter().enumerate().find(|(_, v)| !v.is_finite()) {
            return Err(Error::NonFinite { index, value });
        }
        Ok(Self {
            width,
            height,
            data,
        })
    }

    pub fn filled(width: usize, height: usize, value: f64) -> Result<Self> {
        Self::new(width, height, vec![value; width * height])
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn dimensions(&self) -> (usize, usize) {
        (self.width, self.height)
    }

    /// Number of pixels.
    pub fn len(&self) -> usize {
        self.data.len()
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn into_data(self) -> Vec<f64> {
        self.data
    }

    pub fn get(&self, x: usize, y: usize) -> f64 {
        self.data[y * self.width + x]
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// `self + scale * direction`, computed pixelwise.
    pub fn add_scaled(&self, direction: &[f64], scale: f64) -> Result<Image> {
        if direction.len() != self.data.len() {
            return Err(Error::BufferLength {
                width: self.width,
                height: self.height,
                expected: self.data.len(),
                actual: direction.len(),
            });
        }
        let data = self
            .data
            .iter()
            .zip(direction)
            .map(|(y, g)| y + scale * g)
            .collect();
        Image::new(self.width, self.height, data)
    }

    pub(crate) fn same_dimensions(&self, other: &Image) -> Result<()> {
        if self.dimensions() != other.dimensions() {
            return Err(Error::DimensionMismatch {
                left: self.dimensions(),
                right: other.dimensions(),
            });
        }
        Ok(())
    }
}

/// An [`Image`] whose every intensity is an integer bin index in `0..levels`.
#[derive(Debug, Clone, PartialEq)]
pub struct QuantizedImage {
    image: Image,
    levels: usize,
}

impl QuantizedImage {
    pub fn new(width: usize, height: usize, data: Vec<f64>, levels: usize) -> Result<Self> {
        Self::from_image(Image::new(width, height, data)?, levels)
    }

    pub fn from_image(image: Image, levels: usize) -> Result<Self> {
        if levels == 0 {
            return Err(Error::NoLevels);
        }
        if let Some(index) = first_invalid(image.data(), levels) {
            return Err(Error::InvalidIntensity {
                index,
                value: image.data()[index],
                max: levels as u64 - 1,
            });
        }
        Ok(Self { image, levels })
    }

    /// Skips validation; callers guarantee every value is a bin index.
    pub(crate) fn from_bins(width: usize, height: usize, bins: Vec<f64>, levels: usize) -> Self {
        debug_assert!(first_invalid(&bins, levels).is_none());
        Self {
            image: Image {
                width,
                height,
                data: bins,
            },
            levels,
        }
    }

    pub fn levels(&self) -> usize {
        self.levels
    }

    pub fn image(&self) -> &Image {
        &self.image
    }

    pub fn into_image(self) -> Image {
        self.image
    }

    pub fn width(&self) -> usize {
        self.image.width
    }

    pub fn height(&self) -> usize {
        self.image.height
    }

    pub fn len(&self) -> usize {
        self.image.len()
    }

    pub fn is_empty(&self) -> bool {
        self.image.is_empty()
    }

    pub fn data(&self) -> &[f64] {
        self.image.data()
    }

    pub fn histogram(&self) -> Histogram {
        let mut counts = vec![0u64; self.levels];
        for &v in self.image.data() {
            counts[v as usize] += 1;
        }
        Histogram::from_counts(counts).expect("levels > 0")
    }
}

impl AsRef<Image> for QuantizedImage {
    fn as_ref(&self) -> &Image {
        &self.image
    }
}

fn first_invalid(data: &[f64], levels: usize) -> Option<usize> {
    let max = (levels - 1) as f64;
    data.iter()
        .position(|&v| !(v.fract() == 0.0 && (0.0..=max).contains(&v)))
}

/// Counts the pixels of `image` falling in each of `levels` integer bins.
///
/// Fails on the first pixel that is not an integer in `0..levels`.
pub fn compute_histogram(image: &Image, levels: usize) -> Result<Histogram> {
    Ok(QuantizedImage::from_image(image.clone(), levels)?.histogram())
}
