//! SSIM-guided refinement of an exact histogram specification.
//!
//! Starting from the classic rank-and-fill solution, each iteration takes a
//! gradient-ascent step on SSIM against the input and projects the result
//! back onto the target histogram with [`eghs`](crate::eghs::eghs).

mod step;

pub use step::{
    beta_lower_bound, beta_newton, beta_search, beta_upper_bound, golden_section_max,
    newton_quotient, NewtonStep, SearchOutcome,
};

use std::fmt;

use crate::eghs::eghs;
use crate::error::{Error, Result};
use crate::histogram::{validate_target, Histogram};
use crate::image::QuantizedImage;
use crate::ssim::{SsimEvaluator, SsimParams};

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum StepSizeStrategy {
    Fixed(f64),
    NewtonQuotient,
    /// Golden-section search between the step bounds with `budget` SSIM evaluations.
    BoundedSearch {
        budget: usize,
    },
}

impl Default for StepSizeStrategy {
    fn default() -> Self {
        StepSizeStrategy::BoundedSearch { budget: 16 }
    }
}

impl StepSizeStrategy {
    fn validate(&self) -> Result<()> {
        match *self {
            StepSizeStrategy::Fixed(beta) if !(beta.is_finite() && beta > 0.0) => Err(
                Error::InvalidParameter(format!("fixed step must be positive, got {beta}")),
            ),
            StepSizeStrategy::BoundedSearch { budget: 0 } => Err(Error::InvalidParameter(
                "search budget must be positive".into(),
            )),
            _ => Ok(()),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StoppingCriteria {
    /// Stop once SSIM reaches this value.
    pub quality_threshold: Option<f64>,
    /// Stop once one iteration improves SSIM by less than this.
    pub growth_threshold: Option<f64>,
    pub max_iterations: usize,
}

impl Default for StoppingCriteria {
    fn default() -> Self {
        Self {
            quality_threshold: None,
            growth_threshold: Some(1e-5),
            max_iterations: 50,
        }
    }
}

impl StoppingCriteria {
    pub fn with_max_iterations(max_iterations: usize) -> Self {
        Self {
            quality_threshold: None,
            growth_threshold: None,
            max_iterations,
        }
    }

    fn validate(&self) -> Result<()> {
        if let Some(q) = self.quality_threshold {
            if !(q > 0.0 && q <= 1.0) {
                return Err(Error::InvalidParameter(format!(
                    "quality threshold must be in (0, 1], got {q}"
                )));
            }
        }
        if let Some(g) = self.growth_threshold {
            if !(g >= 0.0 && g.is_finite()) {
                return Err(Error::InvalidParameter(format!(
                    "growth threshold must be non-negative, got {g}"
                )));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StopReason {
    QualityReached,
    GrowthBelowThreshold,
    IterationLimit,
    GradientVanished,
    /// The projection returned the previous iterate unchanged.
    FixedPoint,
}

impl StopReason {
    pub fn as_str(&self) -> &'static str {
        match self {
            StopReason::QualityReached => "quality_reached",
            StopReason::GrowthBelowThreshold => "growth_below_threshold",
            StopReason::IterationLimit => "iteration_limit",
            StopReason::GradientVanished => "gradient_vanished",
            StopReason::FixedPoint => "fixed_point",
        }
    }
}

impl fmt::Display for StopReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct IterationRecord {
    /// 1-based.
    pub iteration: usize,
    pub ssim_before: f64,
    pub ssim_after: f64,
    /// Step applied; 0 when the gradient vanished or every backtracked step
    /// lowered SSIM.
    pub beta: f64,
    /// Step chosen by the strategy, before any backtracking.
    pub proposed_beta: f64,
    pub grad_norm_sq: f64,
    pub grad_max: f64,
    /// Dead-zone lower bound on β (NaN when the gradient vanished).
    pub beta_lo: f64,
    /// First-order upper bound on β (NaN when the gradient vanished).
    pub beta_hi: f64,
    /// `g · (Y' - Y)`.
    pub first_order_term: f64,
    pub bounds_inverted: bool,
    pub newton_fallback: bool,
    /// Times the step was halved after the projection lowered SSIM.
    pub backtracks: usize,
    pub stop_reason: Option<StopReason>,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct IterationTrace {
    pub records: Vec<IterationRecord>,
}

impl IterationTrace {
    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn stop_reason(&self) -> Option<StopReason> {
        self.records.last().and_then(|r| r.stop_reason)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct OptimizationResult {
    pub image: QuantizedImage,
    pub trace: IterationTrace,
    /// SSIM of the classic EGHS seed.
    pub initial_ssim: f64,
    pub final_ssim: f64,
}

fn check_levels(image: &QuantizedImage, target: &Histogram) -> Result<()> {
    if image.levels() != target.levels() {
        return Err(Error::LevelMismatch {
            expected: image.levels(),
            actual: target.levels(),
        });
    }
    Ok(())
}

fn step_once(
    eval: &SsimEvaluator,
    current: &QuantizedImage,
    target: &Histogram,
    strategy: &StepSizeStrategy,
    ssim_before: f64,
    iteration: usize,
) -> Result<(QuantizedImage, IterationRecord)> {
    let y = current.image();
    let g = eval.gradient(y)?;
    let mut record = IterationRecord {
        iteration,
        ssim_before,
        ssim_after: ssim_before,
        beta: 0.0,
        proposed_beta: 0.0,
        grad_norm_sq: g.norm_sq(),
        grad_max: g.max_abs(),
        beta_lo: f64::NAN,
        beta_hi: f64::NAN,
        first_order_term: 0.0,
        bounds_inverted: false,
        newton_fallback: false,
        backtracks: 0,
        stop_reason: None,
    };
    if g.is_zero() {
        record.stop_reason = Some(StopReason::GradientVanished);
        return Ok((current.clone(), record));
    }
    record.beta_lo = beta_lower_bound(&g)?;
    record.beta_hi = beta_upper_bound(ssim_before, &g)?;
    record.proposed_beta = match *strategy {
        StepSizeStrategy::Fixed(beta) => beta,
        StepSizeStrategy::NewtonQuotient => {
            let step = step::newton_with(eval, y, &g, ssim_before)?;
            record.newton_fallback = step.fallback;
            step.beta
        }
        StepSizeStrategy::BoundedSearch { budget } => {
            let found = step::search_with(eval, y, &g, ssim_before, budget)?;
            record.bounds_inverted = found.inverted;
            found.beta
        }
    };

    let project = |beta: f64| -> Result<(QuantizedImage, f64)> {
        let next = eghs(&y.add_scaled(g.data(), beta)?, target)?;
        let ssim = eval.mean(next.image())?;
        Ok((next, ssim))
    };
    let mut beta = record.proposed_beta;
    let (mut next, mut ssim_after) = project(beta)?;
    if !matches!(strategy, StepSizeStrategy::Fixed(_)) {
        // Overshoot: halve the step until the projected SSIM no longer drops.
        // Below the lower bound the projection is the identity.
        while ssim_after < ssim_before {
            record.backtracks += 1;
            beta *= 0.5;
            if beta < record.beta_lo {
                beta = 0.0;
                next = current.clone();
                ssim_after = ssim_before;
                break;
            }
            (next, ssim_after) = project(beta)?;
        }
    }
    record.beta = beta;
    record.first_order_term = next
        .data()
        .iter()
        .zip(y.data())
        .zip(g.data())
        .map(|((n, c), gi)| gi * (n - c))
        .sum();
    record.ssim_after = ssim_after;
    Ok((next, record))
}

/// One gradient-ascent step on SSIM against `reference` followed by the
/// projection onto `target`. `current` must already have histogram `target`.
///
/// A vanishing gradient returns `current` unchanged with the stop reason set
/// on the record.
pub fn iterate_once(
    reference: &QuantizedImage,
    current: &QuantizedImage,
    target: &Histogram,
    params: &SsimParams,
    strategy: &StepSizeStrategy,
) -> Result<(QuantizedImage, IterationRecord)> {
    strategy.validate()?;
    check_levels(current, target)?;
    if current.histogram() != *target {
        let actual = current.histogram();
        return Err(Error::InvalidParameter(format!(
            "current image does not have the target histogram ({} pixels, {} differing bins)",
            actual.total(),
            actual
                .counts()
                .iter()
                .zip(target.counts())
                .filter(|(a, b)| a != b)
                .count()
        )));
    }
    reference.image().same_dimensions(current.image())?;
    let eval = SsimEvaluator::new(reference.image(), params)?;
    let ssim = eval.mean(current.image())?;
    step_once(&eval, current, target, strategy, ssim, 1)
}

/// Exact histogram specification of `input` onto `target`, refined by
/// projected SSIM gradient ascent until a stopping criterion holds.
pub fn optimize(
    input: &QuantizedImage,
    target: &Histogram,
    params: &SsimParams,
    strategy: &StepSizeStrategy,
    stop: &StoppingCriteria,
) -> Result<OptimizationResult> {
    validate_target(target, input.len() as u64)?;
    check_levels(input, target)?;
    strategy.validate()?;
    stop.validate()?;

    let eval = SsimEvaluator::new(input.image(), params)?;
    let mut current = eghs(input.image(), target)?;
    let initial_ssim = eval.mean(current.image())?;
    let mut ssim = initial_ssim;
    let mut trace = IterationTrace::default();

    for iteration in 1..=stop.max_iterations {
        let (next, mut record) = step_once(&eval, &current, target, strategy, ssim, iteration)?;
        if record.stop_reason.is_none() {
            let growth = record.ssim_after - record.ssim_before;
            record.stop_reason = if stop
                .quality_threshold
                .is_some_and(|q| record.ssim_after >= q)
            {
                Some(StopReason::QualityReached)
            } else if next == current {
                Some(StopReason::FixedPoint)
            } else if stop.growth_threshold.is_some_and(|t| growth < t) {
                Some(StopReason::GrowthBelowThreshold)
            } else if iteration == stop.max_iterations {
                Some(StopReason::IterationLimit)
            } else {
                None
            };
        }
        ssim = record.ssim_after;
        current = next;
        let done = record.stop_reason.is_some();
        trace.records.push(record);
        if done {
            break;
        }
    }

    Ok(OptimizationResult {
        image: current,
        trace,
        initial_ssim,
        final_ssim: ssim,
    })
}
