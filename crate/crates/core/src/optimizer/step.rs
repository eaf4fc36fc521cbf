//! Step-size selection: the first-order upper bound, the dead-zone lower
//! bound, the Newton quotient, and a golden-section search between the bounds.

use crate::error::{Error, Result};
use crate::image::Image;
use crate::ssim::{GradientField, SsimEvaluator, SsimParams};

const INV_PHI: f64 = 0.618_033_988_749_894_9;

/// Largest step the first-order model allows before SSIM would exceed one:
/// `(1 - ssim) / ‖g‖²`.
pub fn beta_upper_bound(ssim: f64, gradient: &GradientField) -> Result<f64> {
    let norm_sq = gradient.norm_sq();
    if norm_sq == 0.0 {
        return Err(Error::VanishingGradient);
    }
    Ok((1.0 - ssim) / norm_sq)
}

/// Smallest step that moves some pixel by half a bin: `1 / (2 max|g|)`.
/// Any shorter step is undone by the projection.
pub fn beta_lower_bound(gradient: &GradientField) -> Result<f64> {
    let max = gradient.max_abs();
    if max == 0.0 {
        return Err(Error::VanishingGradient);
    }
    Ok(0.5 / max)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NewtonStep {
    pub beta: f64,
    /// `gᵀHg` along the gradient.
    pub curvature: f64,
    /// The curvature was not negative and `beta` is the upper bound instead.
    pub fallback: bool,
}

/// `-‖g‖² / gᵀHg`, or `upper` when the restriction to the gradient line is
/// not concave.
pub fn newton_quotient(norm_sq: f64, curvature: f64, upper: f64) -> NewtonStep {
    if curvature < 0.0 && curvature.is_finite() {
        NewtonStep {
            beta: -norm_sq / curvature,
            curvature,
            fallback: false,
        }
    } else {
        NewtonStep {
            beta: upper,
            curvature,
            fallback: true,
        }
    }
}

pub(crate) fn newton_with(
    eval: &SsimEvaluator,
    y: &Image,
    gradient: &GradientField,
    ssim: f64,
) -> Result<NewtonStep> {
    let upper = beta_upper_bound(ssim, gradient)?;
    let hg = eval.hessian_vector_product(y, gradient)?;
    Ok(newton_quotient(
        gradient.norm_sq(),
        gradient.dot(hg.data()),
        upper,
    ))
}

/// Newton step along the gradient for the unprojected objective
/// `SSIM(reference, candidate + β g)`.
pub fn beta_newton(
    reference: &Image,
    candidate: &Image,
    gradient: &GradientField,
    params: &SsimParams,
) -> Result<NewtonStep> {
    reference.same_dimensions(candidate)?;
    let eval = SsimEvaluator::new(reference, params)?;
    let ssim = eval.mean(candidate)?;
    newton_with(&eval, candidate, gradient, ssim)
}

#[derive(Debug, Clone, PartialEq)]
pub struct SearchOutcome {
    pub beta: f64,
    pub objective: f64,
    /// Interval actually searched.
    pub lo: f64,
    pub hi: f64,
    /// Raw bounds before any adjustment.
    pub lower_bound: f64,
    pub upper_bound: f64,
    /// The lower bound exceeded the upper bound; `[lo, 2 lo]` was searched.
    pub inverted: bool,
    /// Every `(β, f(β))` evaluated, in order.
    pub probes: Vec<(f64, f64)>,
}

/// Golden-section maximization of `f` on `[lo, hi]` using exactly `budget`
/// evaluations (or fewer when `lo == hi`). The endpoints are evaluated first;
/// the best probe is returned.
pub fn golden_section_max<F>(mut f: F, lo: f64, hi: f64, budget: usize) -> Result<Vec<(f64, f64)>>
where
    F: FnMut(f64) -> Result<f64>,
{
    let mut probes = Vec::with_capacity(budget);
    let mut eval = |x: f64, probes: &mut Vec<(f64, f64)>| -> Result<f64> {
        let v = f(x)?;
        probes.push((x, v));
        Ok(v)
    };
    if budget == 0 {
        return Ok(probes);
    }
    eval(lo, &mut probes)?;
    if budget == 1 || hi <= lo {
        return Ok(probes);
    }
    eval(hi, &mut probes)?;

    let (mut a, mut b) = (lo, hi);
    let mut remaining = budget - 2;
    if remaining == 0 {
        return Ok(probes);
    }
    let mut x1 = b - INV_PHI * (b - a);
    let mut f1 = eval(x1, &mut probes)?;
    remaining -= 1;
    if remaining == 0 {
        return Ok(probes);
    }
    let mut x2 = a + INV_PHI * (b - a);
    let mut f2 = eval(x2, &mut probes)?;
    remaining -= 1;

    while remaining > 0 {
        if f1 >= f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - INV_PHI * (b - a);
            f1 = eval(x1, &mut probes)?;
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + INV_PHI * (b - a);
            f2 = eval(x2, &mut probes)?;
        }
        remaining -= 1;
    }
    Ok(probes)
}

/// First probe attaining the largest objective value.
fn best(probes: &[(f64, f64)]) -> (f64, f64) {
    probes
        .iter()
        .copied()
        .fold((f64::NAN, f64::NEG_INFINITY), |acc, p| {
            if p.1 > acc.1 {
                p
            } else {
                acc
            }
        })
}

pub(crate) fn search_with(
    eval: &SsimEvaluator,
    y: &Image,
    gradient: &GradientField,
    ssim: f64,
    budget: usize,
) -> Result<SearchOutcome> {
    if budget == 0 {
        return Err(Error::InvalidParameter(
            "search budget must be positive".into(),
        ));
    }
    let lower_bound = beta_lower_bound(gradient)?;
    let upper_bound = beta_upper_bound(ssim, gradient)?;
    let inverted = lower_bound > upper_bound;
    let (lo, hi) = if inverted {
        (lower_bound, 2.0 * lower_bound)
    } else {
        (lower_bound, upper_bound)
    };
    let probes = golden_section_max(
        |beta| eval.mean(&y.add_scaled(gradient.data(), beta)?),
        lo,
        hi,
        budget,
    )?;
    let (beta, objective) = best(&probes);
    Ok(SearchOutcome {
        beta,
        objective,
        lo,
        hi,
        lower_bound,
        upper_bound,
        inverted,
        probes,
    })
}

/// Maximizes `SSIM(reference, candidate + β g)` over β between the dead-zone
/// lower bound and the first-order upper bound.
pub fn beta_search(
    reference: &Image,
    candidate: &Image,
    gradient: &GradientField,
    params: &SsimParams,
    budget: usize,
) -> Result<SearchOutcome> {
    reference.same_dimensions(candidate)?;
    let eval = SsimEvaluator::new(reference, params)?;
    let ssim = eval.mean(candidate)?;
    search_with(&eval, candidate, gradient, ssim, budget)
}
