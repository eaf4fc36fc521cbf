//! Exact global histogram specification (EGHS) refined by SSIM gradient ascent.
//!
//! The pipeline starts from the classic rank-and-fill EGHS solution and then
//! alternates a step along the SSIM gradient with an EGHS projection back onto
//! the set of images whose histogram equals the target exactly.
//!
//! ```
//! use ssim_eghs::{optimize, Histogram, QuantizedImage, SsimParams, StepSizeStrategy, StoppingCriteria};
//!
//! let data: Vec<f64> = (0..256).map(|i| ((i * 7) % 64) as f64).collect();
//! let input = QuantizedImage::new(16, 16, data, 256).unwrap();
//! let target = Histogram::uniform(256, 256).unwrap();
//! let params = SsimParams::default();
//! let stop = StoppingCriteria::with_max_iterations(5);
//! let result = optimize(&input, &target, &params, &StepSizeStrategy::default(), &stop).unwrap();
//! assert_eq!(result.image.histogram(), target);
//! ```

pub mod cli;
pub mod eghs;
mod error;
mod histogram;
mod image;
pub mod optimizer;
pub mod ssim;

pub use eghs::{cumulative_bin_of_rank, eghs, pixel_ranks, PixelRank};
pub use error::{Error, Result};
pub use histogram::{rescale_histogram, validate_target, Histogram, DEFAULT_LEVELS};
pub use image::{compute_histogram, Image, QuantizedImage};
pub use optimizer::{
    iterate_once, optimize, IterationRecord, IterationTrace, OptimizationResult, StepSizeStrategy,
    StopReason, StoppingCriteria,
};
pub use ssim::{
    gaussian_kernel, hessian_vector_product, local_stats, ssim_gradient, ssim_map, GradientField,
    Kernel, LocalStats, SsimMap, SsimParams,
};
