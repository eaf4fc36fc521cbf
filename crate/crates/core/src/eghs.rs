//! Classic exact global histogram specification: rank every pixel under a
//! strict total order, then fill the target bins in rank order.

use std::cmp::Ordering;

use crate::error::{Error, Result};
use crate::histogram::{validate_target, Histogram};
use crate::image::{Image, QuantizedImage};

/// Position of one pixel in the strict total order used by [`eghs`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PixelRank {
    pub pixel_index: usize,
    pub value: f64,
    pub rank: usize,
}

/// Orders by intensity, then by row-major index for equal intensities.
fn order(data: &[f64], a: usize, b: usize) -> Ordering {
    data[a].total_cmp(&data[b]).then(a.cmp(&b))
}

fn sorted_indices(image: &Image) -> Vec<usize> {
    let data = image.data();
    let mut idx: Vec<usize> = (0..data.len()).collect();
    idx.sort_unstable_by(|&a, &b| order(data, a, b));
    idx
}

/// Pixels of `image` listed in rank order.
pub fn pixel_ranks(image: &Image) -> Vec<PixelRank> {
    let data = image.data();
    sorted_indices(image)
        .into_iter()
        .enumerate()
        .map(|(rank, pixel_index)| PixelRank {
            pixel_index,
            value: data[pixel_index],
            rank,
        })
        .collect()
}

/// Bin that receives the pixel of rank `rank` when `histogram` is filled in
/// rank order: the smallest bin whose cumulative count exceeds `rank`.
pub fn cumulative_bin_of_rank(histogram: &Histogram, rank: u64) -> Result<usize> {
    let total = histogram.total();
    if rank >= total {
        return Err(Error::RankOutOfRange { rank, total });
    }
    let mut cumulative = 0u64;
    for (bin, &c) in histogram.counts().iter().enumerate() {
        cumulative += c;
        if cumulative > rank {
            return Ok(bin);
        }
    }
    unreachable!("rank < total")
}

/// Maps `image` onto the image whose histogram is exactly `target`, keeping
/// the pixel order of `image`.
///
/// Intensities are consumed as-is; values outside the bin range only affect
/// the ranking.
pub fn eghs(image: &Image, target: &Histogram) -> Result<QuantizedImage> {
    validate_target(target, image.len() as u64)?;
    let order = sorted_indices(image);
    let mut bins = vec![0.0; image.len()];
    let mut ranked = order.into_iter();
    for (bin, &count) in target.counts().iter().enumerate() {
        for pixel in ranked.by_ref().take(count as usize) {
            bins[pixel] = bin as f64;
        }
    }
    Ok(QuantizedImage::from_bins(
        image.width(),
        image.height(),
        bins,
        target.levels(),
    ))
}
