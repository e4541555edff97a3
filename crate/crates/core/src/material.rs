//! Plate parameters and the bending compliance in the rescaled system.

use crate::error::{DpgError, Result};

/// Rescaled Reissner–Mindlin parameters. Young's modulus drops out after
/// rescaling the static quantities; only thickness, Poisson ratio and shear
/// correction remain.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MaterialParams {
    /// Thickness relative to the domain diameter.
    pub thickness: f64,
    pub poisson: f64,
    pub shear_correction: f64,
}

impl Default for MaterialParams {
    fn default() -> Self {
        Self {
            thickness: 0.1,
            poisson: 0.3,
            shear_correction: 5.0 / 6.0,
        }
    }
}

impl MaterialParams {
    pub fn new(thickness: f64, poisson: f64, shear_correction: f64) -> Result<Self> {
        let m = Self {
            thickness,
            poisson,
            shear_correction,
        };
        m.validate()?;
        Ok(m)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.thickness > 0.0 && self.thickness <= 1.0) {
            return Err(DpgError::InvalidMaterial(format!(
                "thickness must lie in (0, 1], got {}",
                self.thickness
            )));
        }
        if !(0.0..0.5).contains(&self.poisson) {
            return Err(DpgError::InvalidMaterial(format!(
                "Poisson ratio must lie in [0, 0.5), got {}",
                self.poisson
            )));
        }
        if !(self.shear_correction > 0.0) {
            return Err(DpgError::InvalidMaterial(format!(
                "shear correction factor must be positive, got {}",
                self.shear_correction
            )));
        }
        Ok(())
    }

    /// `κ⁻¹ t²`, the weight of the shear force in the first constitutive law.
    pub fn shear_compliance(&self) -> f64 {
        self.thickness * self.thickness / self.shear_correction
    }
}

/// A 2×2 tensor stored row-major as `[[a11, a12], [a21, a22]]`.
pub type Tensor2 = [[f64; 2]; 2];

/// `C⁻¹τ = 6 (τ − ν/(1+ν) tr(τ) I)`.
pub fn compliance_inverse(tau: Tensor2, nu: f64) -> Tensor2 {
    let tr = tau[0][0] + tau[1][1];
    let c = nu / (1.0 + nu) * tr;
    [[6.0 * (tau[0][0] - c), 6.0 * tau[0][1]], [6.0 * tau[1][0], 6.0 * (tau[1][1] - c)]]
}

/// Inverse of [`compliance_inverse`]: `Cε = (ε + ν/(1−ν) tr(ε) I) / 6`.
pub fn compliance(eps: Tensor2, nu: f64) -> Tensor2 {
    let tr = eps[0][0] + eps[1][1];
    let c = nu / (1.0 - nu) * tr;
    [[(eps[0][0] + c) / 6.0, eps[0][1] / 6.0], [eps[1][0] / 6.0, (eps[1][1] + c) / 6.0]]
}

/// Frobenius product `a : b`.
pub fn ddot(a: &Tensor2, b: &Tensor2) -> f64 {
    a[0][0] * b[0][0] + a[0][1] * b[0][1] + a[1][0] * b[1][0] + a[1][1] * b[1][1]
}
