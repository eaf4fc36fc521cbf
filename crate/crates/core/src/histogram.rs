use crate::error::{Error, Result};

/// Intensity levels of an 8-bit image.
pub const DEFAULT_LEVELS: usize = 256;

/// Pixel counts per intensity bin; `counts().len()` is the number of levels.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Histogram {
    counts: Vec<u64>,
}

impl Histogram {
    pub fn from_counts(counts: Vec<u64>) -> Result<Self> {
        if counts.is_empty() {
            return Err(Error::NoLevels);
        }
        Ok(Self { counts })
    }

    /// Flat histogram of `pixel_count` pixels over `levels` bins, apportioned
    /// like [`rescale_histogram`] so the total is exact.
    pub fn uniform(levels: usize, pixel_count: u64) -> Result<Self> {
        rescale_histogram(&Self::from_counts(vec![1; levels])?, pixel_count)
    }

    pub fn counts(&self) -> &[u64] {
        &self.counts
    }

    pub fn levels(&self) -> usize {
        self.counts.len()
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().sum()
    }

    /// Pixels in bins `0..=bin`.
    pub fn cumulative_count(&self, bin: usize) -> u64 {
        self.counts[..=bin].iter().sum()
    }
}

/// Checks that `histogram` describes exactly `pixel_count` pixels.
pub fn validate_target(histogram: &Histogram, pixel_count: u64) -> Result<()> {
    let histogram_total = histogram.total();
    if histogram_total != pixel_count {
        return Err(Error::HistogramMismatch {
            histogram_total,
            pixel_count,
        });
    }
    Ok(())
}

/// Scales `histogram` to `target_total` pixels by largest-remainder
/// apportionment. Remainder ties go to the lower bin index.
pub fn rescale_histogram(histogram: &Histogram, target_total: u64) -> Result<Histogram> {
    let total = histogram.total();
    if total == 0 {
        return Err(Error::EmptyHistogram);
    }
    if total == target_total {
        return Ok(histogram.clone());
    }

    let total = total as u128;
    let target = target_total as u128;
    let mut counts = Vec::with_capacity(histogram.levels());
    let mut remainders = Vec::with_capacity(histogram.levels());
    for (bin, &c) in histogram.counts().iter().enumerate() {
        let scaled = c as u128 * target;
        counts.push((scaled / total) as u64);
        remainders.push((scaled % total, bin));
    }
    let assigned: u64 = counts.iter().sum();
    let leftover = (target_total - assigned) as usize;

    // Largest remainder first, then lowest bin.
    remainders.sort_unstable_by(|a, b| b.0.cmp(&a.0).then(a.1.cmp(&b.1)));
    for &(_, bin) in remainders.iter().take(leftover) {
        counts[bin] += 1;
    }
    Histogram::from_counts(counts)
}
