//! Command-line front end: PGM and histogram-file I/O, target construction,
//! run configuration and CSV trace output.

mod pgm;

pub use pgm::{decode_pgm, encode_pgm, read_image, write_image};

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{ArgGroup, Parser, ValueEnum};

use crate::error::{Error, Result};
use crate::histogram::{rescale_histogram, Histogram, DEFAULT_LEVELS};
use crate::optimizer::{
    optimize, IterationTrace, OptimizationResult, StepSizeStrategy, StoppingCriteria,
};
use crate::ssim::{gaussian_kernel, SsimParams, DEFAULT_K, DEFAULT_KERNEL_SIDE, DEFAULT_SIGMA};

pub const TRACE_HEADER: &str =
    "iter,ssim_before,ssim_after,beta,grad_norm_sq,grad_max,beta_lo,beta_hi,first_order_term,stop_reason";

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum StepKind {
    Search,
    Newton,
    Fixed,
}

/// Exact histogram specification refined by SSIM gradient ascent.
#[derive(Debug, Parser)]
#[command(name = "ssim-eghs", version)]
#[command(group(ArgGroup::new("target").required(true).args(["target_image", "target_hist", "equalize"])))]
pub struct Args {
    /// Input image (binary PGM).
    #[arg(long)]
    pub input: PathBuf,
    /// Output image (binary PGM).
    #[arg(long)]
    pub output: PathBuf,
    /// Take the target histogram from this PGM image.
    #[arg(long)]
    pub target_image: Option<PathBuf>,
    /// Take the target histogram from a text file of 256 counts.
    #[arg(long)]
    pub target_hist: Option<PathBuf>,
    /// Use a flat target histogram.
    #[arg(long)]
    pub equalize: bool,
    #[arg(long, default_value_t = 50)]
    pub iterations: usize,
    #[arg(long)]
    pub quality_threshold: Option<f64>,
    #[arg(long, default_value_t = 1e-5)]
    pub growth_threshold: f64,
    #[arg(long, value_enum, default_value_t = StepKind::Search)]
    pub step: StepKind,
    /// Step size for `--step fixed`.
    #[arg(long)]
    pub beta: Option<f64>,
    #[arg(long, default_value_t = 16)]
    pub search_budget: usize,
    #[arg(long, default_value_t = DEFAULT_K)]
    pub k1: f64,
    #[arg(long, default_value_t = DEFAULT_K)]
    pub k2: f64,
    #[arg(long, default_value_t = DEFAULT_SIGMA)]
    pub sigma: f64,
    #[arg(long, default_value_t = DEFAULT_KERNEL_SIDE)]
    pub kernel_size: usize,
    /// Write a per-iteration CSV trace here.
    #[arg(long)]
    pub trace: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum TargetSource {
    ReferenceImage(PathBuf),
    HistogramFile(PathBuf),
    Equalize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub input: PathBuf,
    pub output: PathBuf,
    pub target: TargetSource,
    pub stop: StoppingCriteria,
    pub strategy: StepSizeStrategy,
    pub params: SsimParams,
    pub trace: Option<PathBuf>,
}

fn non_empty(path: &Path, flag: &str) -> Result<()> {
    if path.as_os_str().is_empty() {
        return Err(Error::Config(format!("{flag} must not be empty")));
    }
    Ok(())
}

impl RunConfig {
    pub fn from_args(args: Args) -> Result<Self> {
        non_empty(&args.input, "--input")?;
        non_empty(&args.output, "--output")?;
        let target = match (args.target_image, args.target_hist, args.equalize) {
            (Some(p), None, false) => TargetSource::ReferenceImage(p),
            (None, Some(p), false) => TargetSource::HistogramFile(p),
            (None, None, true) => TargetSource::Equalize,
            _ => {
                return Err(Error::Config(
                    "exactly one of --target-image, --target-hist, --equalize is required".into(),
                ))
            }
        };
        match &target {
            TargetSource::ReferenceImage(p) => non_empty(p, "--target-image")?,
            TargetSource::HistogramFile(p) => non_empty(p, "--target-hist")?,
            TargetSource::Equalize => {}
        }
        if let Some(p) = &args.trace {
            non_empty(p, "--trace")?;
        }

        let strategy = match (args.step, args.beta) {
            (StepKind::Fixed, Some(beta)) if beta.is_finite() && beta > 0.0 => {
                StepSizeStrategy::Fixed(beta)
            }
            (StepKind::Fixed, Some(beta)) => {
                return Err(Error::Config(format!(
                    "--beta must be positive, got {beta}"
                )))
            }
            (StepKind::Fixed, None) => {
                return Err(Error::Config("--step fixed requires --beta".into()))
            }
            (_, Some(_)) => {
                return Err(Error::Config("--beta only applies to --step fixed".into()))
            }
            (StepKind::Newton, None) => StepSizeStrategy::NewtonQuotient,
            (StepKind::Search, None) => {
                if args.search_budget == 0 {
                    return Err(Error::Config("--search-budget must be positive".into()));
                }
                StepSizeStrategy::BoundedSearch {
                    budget: args.search_budget,
                }
            }
        };

        if let Some(q) = args.quality_threshold {
            if !(q > 0.0 && q <= 1.0) {
                return Err(Error::Config(format!(
                    "--quality-threshold must be in (0, 1], got {q}"
                )));
            }
        }
        if !(args.growth_threshold >= 0.0 && args.growth_threshold.is_finite()) {
            return Err(Error::Config(format!(
                "--growth-threshold must be non-negative, got {}",
                args.growth_threshold
            )));
        }
        let stop = StoppingCriteria {
            quality_threshold: args.quality_threshold,
            growth_threshold: Some(args.growth_threshold),
            max_iterations: args.iterations,
        };

        let kernel = gaussian_kernel(args.sigma, args.kernel_size)
            .map_err(|e| Error::Config(e.to_string()))?;
        let params = SsimParams::new(args.k1, args.k2, DEFAULT_LEVELS, kernel)
            .map_err(|e| Error::Config(e.to_string()))?;

        Ok(Self {
            input: args.input,
            output: args.output,
            target,
            stop,
            strategy,
            params,
            trace: args.trace,
        })
    }
}

/// Parses a histogram file: one count per line, `#` comment lines and blank
/// lines ignored, exactly 256 counts.
pub fn parse_histogram_file(text: &str, path: &Path) -> Result<Histogram> {
    let err = |line: usize, message: String| Error::HistogramFile {
        path: path.to_path_buf(),
        line,
        message,
    };
    let mut counts = Vec::with_capacity(DEFAULT_LEVELS);
    let mut last_line = 0;
    for (i, raw) in text.lines().enumerate() {
        last_line = i + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let count: u64 = line.parse().map_err(|_| {
            err(
                i + 1,
                format!("expected a non-negative integer, found {line:?}"),
            )
        })?;
        if counts.len() == DEFAULT_LEVELS {
            return Err(err(i + 1, format!("more than {DEFAULT_LEVELS} counts")));
        }
        counts.push(count);
    }
    if counts.len() != DEFAULT_LEVELS {
        return Err(err(
            last_line,
            format!("expected {DEFAULT_LEVELS} counts, found {}", counts.len()),
        ));
    }
    Histogram::from_counts(counts)
}

pub fn read_histogram_file(path: &Path) -> Result<Histogram> {
    let text = fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    parse_histogram_file(&text, path)
}

/// Target histogram for an image of `pixel_count` pixels.
pub fn build_target(source: &TargetSource, pixel_count: u64) -> Result<Histogram> {
    match source {
        TargetSource::Equalize => Histogram::uniform(DEFAULT_LEVELS, pixel_count),
        TargetSource::ReferenceImage(path) => {
            rescale_histogram(&read_image(path)?.histogram(), pixel_count)
        }
        TargetSource::HistogramFile(path) => {
            rescale_histogram(&read_histogram_file(path)?, pixel_count)
        }
    }
}

fn real(out: &mut String, v: f64) {
    write!(out, ",{v:.16e}").expect("string write");
}

/// CSV rendering of `trace`, reals with 17 significant digits.
pub fn format_trace(trace: &IterationTrace) -> String {
    let mut out = String::from(TRACE_HEADER);
    out.push('\n');
    for r in &trace.records {
        write!(out, "{}", r.iteration).expect("string write");
        for v in [
            r.ssim_before,
            r.ssim_after,
            r.beta,
            r.grad_norm_sq,
            r.grad_max,
            r.beta_lo,
            r.beta_hi,
            r.first_order_term,
        ] {
            real(&mut out, v);
        }
        out.push(',');
        if let Some(reason) = r.stop_reason {
            out.push_str(reason.as_str());
        }
        out.push('\n');
    }
    out
}

pub fn write_trace(trace: &IterationTrace, path: &Path) -> Result<()> {
    fs::write(path, format_trace(trace)).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })
}

/// Reads the input, builds the target, optimizes and writes the outputs.
pub fn run(config: &RunConfig) -> Result<OptimizationResult> {
    let input = read_image(&config.input)?;
    let target = build_target(&config.target, input.len() as u64)?;
    let result = optimize(
        &input,
        &target,
        &config.params,
        &config.strategy,
        &config.stop,
    )?;
    write_image(&result.image, &config.output)?;
    if let Some(path) = &config.trace {
        write_trace(&result.trace, path)?;
    }
    Ok(result)
}
