use crate::error::{Error, Result};

/// Separable, normalized low-pass window: the 2-D weights are the outer
/// product of `taps` with itself.
#[derive(Debug, Clone, PartialEq)]
pub struct Kernel {
    taps: Vec<f64>,
}

impl Kernel {
    /// Builds a kernel from 1-D taps, renormalizing them to sum to one.
    pub fn from_taps(taps: Vec<f64>) -> Result<Self> {
        if taps.len().is_multiple_of(2) {
            return Err(Error::InvalidKernel(format!(
                "side must be odd, got {}",
                taps.len()
            )));
        }
        if taps.iter().any(|t| !t.is_finite() || *t < 0.0) {
            return Err(Error::InvalidKernel(
                "taps must be finite and non-negative".into(),
            ));
        }
        let sum: f64 = taps.iter().sum();
        if sum <= 0.0 {
            return Err(Error::InvalidKernel("taps sum to zero".into()));
        }
        Ok(Self {
            taps: taps.into_iter().map(|t| t / sum).collect(),
        })
    }

    pub fn side(&self) -> usize {
        self.taps.len()
    }

    pub fn radius(&self) -> usize {
        self.taps.len() / 2
    }

    pub fn taps(&self) -> &[f64] {
        &self.taps
    }

    /// Weight at row `i`, column `j` of the 2-D window.
    pub fn weight(&self, i: usize, j: usize) -> f64 {
        self.taps[i] * self.taps[j]
    }

    /// Row-major `side × side` weights.
    pub fn weights(&self) -> Vec<f64> {
        let n = self.side();
        (0..n * n).map(|k| self.weight(k / n, k % n)).collect()
    }
}

/// Sampled Gaussian of standard deviation `sigma`, truncated to
/// `side × side` and normalized.
pub fn gaussian_kernel(sigma: f64, side: usize) -> Result<Kernel> {
    if !(sigma.is_finite() && sigma > 0.0) {
        return Err(Error::InvalidKernel(format!(
            "sigma must be positive, got {sigma}"
        )));
    }
    if side == 0 || side.is_multiple_of(2) {
        return Err(Error::InvalidKernel(format!(
            "side must be odd and positive, got {side}"
        )));
    }
    let r = (side / 2) as f64;
    let taps = (0..side)
        .map(|i| {
            let d = i as f64 - r;
            (-d * d / (2.0 * sigma * sigma)).exp()
        })
        .collect();
    Kernel::from_taps(taps)
}
