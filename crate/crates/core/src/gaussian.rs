//! Diagonal Gaussian algebra used throughout the surrogate.
//!
//! All latent states, context encodings, and predictive distributions in
//! this crate are Gaussians with diagonal covariance, so every operation
//! here works coordinatewise on `(mean, var)` pairs in f64.

use crate::error::{Error, Result};

/// Lower bound applied to every variance this crate produces.
///
/// Keeps precisions (`1/var`) finite and densities bounded when encoders
/// or fusion drive a variance toward zero.
pub const VAR_FLOOR: f64 = 1e-6;

const LN_2PI: f64 = 1.8378770664093453;

/// Gaussian with diagonal covariance.
///
/// Invariants enforced by every constructor: `mean` and `var` have equal
/// length and every `var[i]` is finite and at least [`VAR_FLOOR`].
#[derive(Debug, Clone, PartialEq)]
pub struct DiagGaussian {
    mean: Vec<f64>,
    var: Vec<f64>,
}

impl DiagGaussian {
    /// Builds a Gaussian, clamping variances up to [`VAR_FLOOR`].
    ///
    /// Variances must be strictly positive and finite on input; values in
    /// `(0, VAR_FLOOR)` are raised to the floor rather than rejected.
    pub fn new(mean: Vec<f64>, var: Vec<f64>) -> Result<Self> {
        if mean.len() != var.len() {
            return Err(Error::DimensionMismatch(format!(
                "mean has {} components, var has {}",
                mean.len(),
                var.len()
            )));
        }
        if let Some(m) = mean.iter().find(|m| !m.is_finite()) {
            return Err(Error::Domain(format!("non-finite mean component {m}")));
        }
        if let Some(v) = var.iter().find(|v| !v.is_finite() || **v <= 0.0) {
            return Err(Error::Domain(format!(
                "variance component {v} is not strictly positive and finite"
            )));
        }
        let var = var.into_iter().map(|v| v.max(VAR_FLOOR)).collect();
        Ok(DiagGaussian { mean, var })
    }

    /// Standard normal `N(0, I)` of the given dimension.
    pub fn standard(dim: usize) -> Self {
        DiagGaussian { mean: vec![0.0; dim], var: vec![1.0; dim] }
    }

    pub fn dim(&self) -> usize {
        self.mean.len()
    }

    pub fn mean(&self) -> &[f64] {
        &self.mean
    }

    pub fn var(&self) -> &[f64] {
        &self.var
    }

    fn check_same_dim(&self, other: &DiagGaussian, what: &str) -> Result<()> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch(format!(
                "{what}: {} vs {} components",
                self.dim(),
                other.dim()
            )));
        }
        Ok(())
    }

    /// Log density at `v`.
    pub fn log_density(&self, v: &[f64]) -> Result<f64> {
        if v.len() != self.dim() {
            return Err(Error::DimensionMismatch(format!(
                "point has {} components, distribution has {}",
                v.len(),
                self.dim()
            )));
        }
        let mut acc = 0.0;
        for ((m, s2), x) in self.mean.iter().zip(&self.var).zip(v) {
            let d = x - m;
            acc += -0.5 * (LN_2PI + s2.ln() + d * d / s2);
        }
        Ok(acc)
    }

    /// `KL(self || other)` in nats. Always nonnegative.
    pub fn kl(&self, other: &DiagGaussian) -> Result<f64> {
        self.check_same_dim(other, "kl")?;
        let mut acc = 0.0;
        for i in 0..self.dim() {
            let (mp, vp) = (self.mean[i], self.var[i]);
            let (mq, vq) = (other.mean[i], other.var[i]);
            let d = mq - mp;
            acc += 0.5 * (vp / vq + d * d / vq - 1.0 + (vq / vp).ln());
        }
        // The exact value is nonnegative; rounding can leave a tiny
        // negative residue when the distributions nearly coincide.
        Ok(acc.max(0.0))
    }

    /// `0.5 * (KL(p||q) + KL(q||p))`; symmetric in its arguments.
    pub fn symmetrized_divergence(&self, other: &DiagGaussian) -> Result<f64> {
        Ok(0.5 * (self.kl(other)? + other.kl(self)?))
    }

    /// Deterministic reparameterization `mean + sqrt(var) * noise`.
    pub fn reparam_sample(&self, noise: &[f64]) -> Result<Vec<f64>> {
        if noise.len() != self.dim() {
            return Err(Error::DimensionMismatch(format!(
                "noise has {} components, distribution has {}",
                noise.len(),
                self.dim()
            )));
        }
        Ok(self
            .mean
            .iter()
            .zip(&self.var)
            .zip(noise)
            .map(|((m, v), e)| m + v.sqrt() * e)
            .collect())
    }

    /// Precision-weighted Bayesian fusion of independent Gaussian
    /// observations of a latent with prior `self`.
    ///
    /// Posterior precision is the sum of prior and observation precisions;
    /// the posterior mean shifts the prior mean by the variance-weighted
    /// sum of observation deviations. With no observations the prior is
    /// returned unchanged.
    pub fn fuse(&self, observations: &[DiagGaussian]) -> Result<DiagGaussian> {
        for (j, o) in observations.iter().enumerate() {
            self.check_same_dim(o, &format!("fuse observation {j}"))?;
        }
        if observations.is_empty() {
            return Ok(self.clone());
        }
        let d = self.dim();
        let mut prec = vec![0.0; d];
        let mut dev = vec![0.0; d];
        for o in observations {
            for i in 0..d {
                prec[i] += 1.0 / o.var[i];
                dev[i] += (o.mean[i] - self.mean[i]) / o.var[i];
            }
        }
        let mut var = vec![0.0; d];
        let mut mean = vec![0.0; d];
        for i in 0..d {
            var[i] = (1.0 / (1.0 / self.var[i] + prec[i])).max(VAR_FLOOR);
            mean[i] = self.mean[i] + var[i] * dev[i];
        }
        Ok(DiagGaussian { mean, var })
    }
}
