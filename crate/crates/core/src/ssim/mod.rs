//! Structural similarity between a reference image and a candidate: local
//! statistics, the SSIM map, its gradient with respect to the candidate, and
//! a directional Hessian-vector product.
//!
//! Windowed statistics are evaluated at every pixel with symmetric boundary
//! extension, so all fields share the image dimensions. The gradient is the
//! exact adjoint of that computation.

mod filter;
mod kernel;

pub use kernel::{gaussian_kernel, Kernel};

use filter::WindowFilter;

use crate::error::{Error, Result};
use crate::histogram::DEFAULT_LEVELS;
use crate::image::Image;

pub const DEFAULT_K: f64 = 0.004;
pub const DEFAULT_SIGMA: f64 = 1.5;
pub const DEFAULT_KERNEL_SIDE: usize = 11;

/// Relative size of the finite-difference step used by the Hessian-vector product.
const HVP_STEP: f64 = 1e-3;

#[derive(Debug, Clone, PartialEq)]
pub struct SsimParams {
    k1: f64,
    k2: f64,
    levels: usize,
    kernel: Kernel,
}

impl SsimParams {
    pub fn new(k1: f64, k2: f64, levels: usize, kernel: Kernel) -> Result<Self> {
        for (name, k) in [("K1", k1), ("K2", k2)] {
            if !(k.is_finite() && k > 0.0) {
                return Err(Error::InvalidParameter(format!(
                    "{name} must be positive, got {k}"
                )));
            }
        }
        if levels == 0 {
            return Err(Error::NoLevels);
        }
        Ok(Self {
            k1,
            k2,
            levels,
            kernel,
        })
    }

    pub fn k1(&self) -> f64 {
        self.k1
    }

    pub fn k2(&self) -> f64 {
        self.k2
    }

    pub fn levels(&self) -> usize {
        self.levels
    }

    pub fn kernel(&self) -> &Kernel {
        &self.kernel
    }

    pub fn c1(&self) -> f64 {
        (self.k1 * self.levels as f64).powi(2)
    }

    pub fn c2(&self) -> f64 {
        (self.k2 * self.levels as f64).powi(2)
    }
}

impl Default for SsimParams {
    fn default() -> Self {
        Self {
            k1: DEFAULT_K,
            k2: DEFAULT_K,
            levels: DEFAULT_LEVELS,
            kernel: gaussian_kernel(DEFAULT_SIGMA, DEFAULT_KERNEL_SIDE).expect("valid default"),
        }
    }
}

/// Kernel-weighted local means, variances and covariance at every pixel.
#[derive(Debug, Clone, PartialEq)]
pub struct LocalStats {
    pub width: usize,
    pub height: usize,
    pub mu_x: Vec<f64>,
    pub mu_y: Vec<f64>,
    pub sigma_x_sq: Vec<f64>,
    pub sigma_y_sq: Vec<f64>,
    pub sigma_xy: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SsimMap {
    pub width: usize,
    pub height: usize,
    pub values: Vec<f64>,
    /// Mean of `values`: the scalar SSIM.
    pub mean: f64,
}

/// Per-pixel field with image dimensions; holds gradients and search directions.
#[derive(Debug, Clone, PartialEq)]
pub struct GradientField {
    width: usize,
    height: usize,
    data: Vec<f64>,
}

impl GradientField {
    pub fn new(width: usize, height: usize, data: Vec<f64>) -> Result<Self> {
        // Same shape and finiteness rules as an image.
        let img = Image::new(width, height, data)?;
        Ok(Self {
            width,
            height,
            data: img.into_data(),
        })
    }

    pub fn zeros(width: usize, height: usize) -> Self {
        Self {
            width,
            height,
            data: vec![0.0; width * height],
        }
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn norm_sq(&self) -> f64 {
        self.data.iter().map(|g| g * g).sum()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, g| m.max(g.abs()))
    }

    pub fn dot(&self, other: &[f64]) -> f64 {
        self.data.iter().zip(other).map(|(a, b)| a * b).sum()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|&g| g == 0.0)
    }
}

/// SSIM against a fixed reference image, with the reference's windowed
/// statistics cached. Line searches evaluate many candidates against the
/// same reference; this avoids refiltering it each time.
#[derive(Debug, Clone)]
pub struct SsimEvaluator {
    params: SsimParams,
    reference: Vec<f64>,
    width: usize,
    height: usize,
    filter: WindowFilter,
    mu_x: Vec<f64>,
    e_xx: Vec<f64>,
}

/// Per-pixel terms of one SSIM evaluation.
struct Terms {
    mu_y: Vec<f64>,
    e_yy: Vec<f64>,
    e_xy: Vec<f64>,
}

impl SsimEvaluator {
    pub fn new(reference: &Image, params: &SsimParams) -> Result<Self> {
        let (width, height) = reference.dimensions();
        let side = params.kernel().side();
        if width < side || height < side {
            return Err(Error::ImageTooSmall {
                width,
                height,
                side,
            });
        }
        let filter = WindowFilter::new(params.kernel(), width, height);
        let x = reference.data();
        let mu_x = filter.apply(x);
        let xx: Vec<f64> = x.iter().map(|v| v * v).collect();
        let e_xx = filter.apply(&xx);
        Ok(Self {
            params: params.clone(),
            reference: x.to_vec(),
            width,
            height,
            filter,
            mu_x,
            e_xx,
        })
    }

    pub fn params(&self) -> &SsimParams {
        &self.params
    }

    fn check(&self, candidate: &Image) -> Result<()> {
        if candidate.dimensions() != (self.width, self.height) {
            return Err(Error::DimensionMismatch {
                left: (self.width, self.height),
                right: candidate.dimensions(),
            });
        }
        Ok(())
    }

    fn terms(&self, y: &[f64]) -> Terms {
        let yy: Vec<f64> = y.iter().map(|v| v * v).collect();
        let xy: Vec<f64> = self.reference.iter().zip(y).map(|(a, b)| a * b).collect();
        Terms {
            mu_y: self.filter.apply(y),
            e_yy: self.filter.apply(&yy),
            e_xy: self.filter.apply(&xy),
        }
    }

    /// The four SSIM factors at pixel `p`: (A1, B1, A2, B2) with
    /// SSIM = A1·A2 / (B1·B2).
    fn factors(&self, t: &Terms, p: usize) -> (f64, f64, f64, f64, f64, f64) {
        let (c1, c2) = (self.params.c1(), self.params.c2());
        let mx = self.mu_x[p];
        let my = t.mu_y[p];
        let sxx = self.e_xx[p] - mx * mx;
        let syy = t.e_yy[p] - my * my;
        let sxy = t.e_xy[p] - mx * my;
        let a1 = 2.0 * mx * my + c1;
        let b1 = mx * mx + my * my + c1;
        let a2 = 2.0 * sxy + c2;
        let b2 = sxx + syy + c2;
        (mx, my, a1, b1, a2, b2)
    }

    pub fn local_stats(&self, candidate: &Image) -> Result<LocalStats> {
        self.check(candidate)?;
        let t = self.terms(candidate.data());
        let n = self.width * self.height;
        let mut stats = LocalStats {
            width: self.width,
            height: self.height,
            mu_x: self.mu_x.clone(),
            mu_y: t.mu_y.clone(),
            sigma_x_sq: Vec::with_capacity(n),
            sigma_y_sq: Vec::with_capacity(n),
            sigma_xy: Vec::with_capacity(n),
        };
        for p in 0..n {
            let (mx, my) = (self.mu_x[p], t.mu_y[p]);
            stats.sigma_x_sq.push(self.e_xx[p] - mx * mx);
            stats.sigma_y_sq.push(t.e_yy[p] - my * my);
            stats.sigma_xy.push(t.e_xy[p] - mx * my);
        }
        Ok(stats)
    }

    pub fn map(&self, candidate: &Image) -> Result<SsimMap> {
        self.check(candidate)?;
        let t = self.terms(candidate.data());
        let values: Vec<f64> = (0..self.width * self.height)
            .map(|p| {
                let (_, _, a1, b1, a2, b2) = self.factors(&t, p);
                (a1 * a2) / (b1 * b2)
            })
            .collect();
        let mean = values.iter().sum::<f64>() / values.len() as f64;
        Ok(SsimMap {
            width: self.width,
            height: self.height,
            values,
            mean,
        })
    }

    pub fn mean(&self, candidate: &Image) -> Result<f64> {
        Ok(self.map(candidate)?.mean)
    }

    /// Gradient of the mean SSIM with respect to every candidate pixel.
    pub fn gradient(&self, candidate: &Image) -> Result<GradientField> {
        self.check(candidate)?;
        let y = candidate.data();
        let x = &self.reference;
        let t = self.terms(y);
        let n = self.width * self.height;

        // Sensitivities of the per-pixel SSIM to mu_y, E[y^2] and (combined
        // with the E[xy] term) E[xy]. Grouped so every term cancels exactly
        // when the candidate equals the reference.
        let mut d_mu = Vec::with_capacity(n);
        let mut d_yy = Vec::with_capacity(n);
        let mut d_xy = Vec::with_capacity(n);
        for p in 0..n {
            let (mx, my, a1, b1, a2, b2) = self.factors(&t, p);
            let denom = b1 * b2;
            let s = (a1 * a2) / denom;
            d_mu.push(2.0 / denom * ((mx * a2 - s * my * b2) + (s * my * b1 - mx * a1)));
            d_yy.push(-s / b2);
            d_xy.push(2.0 * (a1 - s * b1) / denom);
        }
        let g_mu = self.filter.adjoint(&d_mu);
        let g_yy = self.filter.adjoint(&d_yy);
        let g_xy = self.filter.adjoint(&d_xy);

        let inv_m = 1.0 / n as f64;
        let data = (0..n)
            .map(|j| inv_m * (g_mu[j] + x[j] * g_xy[j] + 2.0 * (y[j] - x[j]) * g_yy[j]))
            .collect();
        Ok(GradientField {
            width: self.width,
            height: self.height,
            data,
        })
    }

    /// Central difference of the gradient along `direction`.
    pub fn hessian_vector_product(
        &self,
        candidate: &Image,
        direction: &GradientField,
    ) -> Result<GradientField> {
        self.check(candidate)?;
        let v_max = direction.max_abs();
        if v_max == 0.0 {
            return Ok(GradientField::zeros(self.width, self.height));
        }
        let eps = HVP_STEP * candidate.max_abs().max(1.0) / v_max;
        let g_plus = self.gradient(&candidate.add_scaled(direction.data(), eps)?)?;
        let g_minus = self.gradient(&candidate.add_scaled(direction.data(), -eps)?)?;
        let data = g_plus
            .data
            .iter()
            .zip(&g_minus.data)
            .map(|(a, b)| (a - b) / (2.0 * eps))
            .collect();
        Ok(GradientField {
            width: self.width,
            height: self.height,
            data,
        })
    }
}

fn evaluator(reference: &Image, candidate: &Image, params: &SsimParams) -> Result<SsimEvaluator> {
    reference.same_dimensions(candidate)?;
    SsimEvaluator::new(reference, params)
}

pub fn local_stats(
    reference: &Image,
    candidate: &Image,
    params: &SsimParams,
) -> Result<LocalStats> {
    evaluator(reference, candidate, params)?.local_stats(candidate)
}

pub fn ssim_map(reference: &Image, candidate: &Image, params: &SsimParams) -> Result<SsimMap> {
    evaluator(reference, candidate, params)?.map(candidate)
}

pub fn ssim_gradient(
    reference: &Image,
    candidate: &Image,
    params: &SsimParams,
) -> Result<GradientField> {
    evaluator(reference, candidate, params)?.gradient(candidate)
}

/// Approximates `H · direction`, with `H` the Hessian of the mean SSIM with
/// respect to the candidate, by a central difference of the gradient.
pub fn hessian_vector_product(
    reference: &Image,
    candidate: &Image,
    direction: &GradientField,
    params: &SsimParams,
) -> Result<GradientField> {
    if direction.width != candidate.width() || direction.height != candidate.height() {
        return Err(Error::DimensionMismatch {
            left: candidate.dimensions(),
            right: (direction.width, direction.height),
        });
    }
    evaluator(reference, candidate, params)?.hessian_vector_product(candidate, direction)
}
