//! Dielectric response at imaginary frequency.
//!
//! Frequencies enter as the reduced `xi_hat = xi / c` (nm⁻¹), so a resonance
//! of wavelength `λ` sits at `2π / λ`.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Drude metal: `ε(iξ) = 1 + ω_P² / (ξ (ξ + γ))` with `ω_P = 2πc/λ_P`, `γ = gamma_ratio · ω_P`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DrudeParams {
    pub lambda_p_nm: f64,
    pub gamma_ratio: f64,
}

impl DrudeParams {
    /// Copper: λ_P = 136 nm, γ = 0.0033 ω_P.
    pub const COPPER: DrudeParams = DrudeParams {
        lambda_p_nm: 136.0,
        gamma_ratio: 0.0033,
    };

    pub fn new(lambda_p_nm: f64, gamma_ratio: f64) -> Result<Self> {
        let p = DrudeParams {
            lambda_p_nm,
            gamma_ratio,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.lambda_p_nm > 0.0 && self.lambda_p_nm.is_finite()) {
            return Err(Error::invalid("Drude plasma wavelength must be positive"));
        }
        if !(self.gamma_ratio >= 0.0 && self.gamma_ratio.is_finite()) {
            return Err(Error::invalid("Drude damping ratio must be non-negative"));
        }
        Ok(())
    }

    /// Reduced plasma frequency `ω_P / c` in nm⁻¹.
    pub fn plasma_xi_hat(&self) -> f64 {
        2.0 * PI / self.lambda_p_nm
    }
}

impl Default for DrudeParams {
    fn default() -> Self {
        DrudeParams::COPPER
    }
}

/// One Sellmeier oscillator: strength `B` and resonance wavelength `λ` (nm).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SellmeierTerm {
    pub strength: f64,
    pub lambda_nm: f64,
}

/// Undamped Sellmeier dielectric: `ε(iξ) = 1 + Σ B_i ω_i² / (ω_i² + ξ²)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SellmeierParams {
    pub terms: Vec<SellmeierTerm>,
}

impl SellmeierParams {
    /// Diamond: single term with B₁ = 4.91, λ₁ = 106 nm.
    pub fn diamond() -> Self {
        SellmeierParams {
            terms: vec![SellmeierTerm {
                strength: 4.91,
                lambda_nm: 106.0,
            }],
        }
    }

    pub fn new(terms: Vec<SellmeierTerm>) -> Result<Self> {
        let p = SellmeierParams { terms };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if self.terms.is_empty() {
            return Err(Error::invalid("Sellmeier model needs at least one term"));
        }
        for t in &self.terms {
            if !(t.strength > 0.0 && t.strength.is_finite()) {
                return Err(Error::invalid("Sellmeier strengths must be positive"));
            }
            if !(t.lambda_nm > 0.0 && t.lambda_nm.is_finite()) {
                return Err(Error::invalid("Sellmeier wavelengths must be positive"));
            }
        }
        Ok(())
    }

    /// Static permittivity `ε(0) = 1 + Σ B_i`.
    pub fn static_permittivity(&self) -> f64 {
        1.0 + self.terms.iter().map(|t| t.strength).sum::<f64>()
    }
}

impl Default for SellmeierParams {
    fn default() -> Self {
        SellmeierParams::diamond()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "model", rename_all = "lowercase")]
pub enum MaterialModel {
    Drude(DrudeParams),
    Sellmeier(SellmeierParams),
    Vacuum,
}

impl MaterialModel {
    pub fn copper() -> Self {
        MaterialModel::Drude(DrudeParams::COPPER)
    }

    pub fn diamond() -> Self {
        MaterialModel::Sellmeier(SellmeierParams::diamond())
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            MaterialModel::Drude(p) => p.validate(),
            MaterialModel::Sellmeier(p) => p.validate(),
            MaterialModel::Vacuum => Ok(()),
        }
    }

    /// `ε(iξ)` at reduced frequency `xi_hat` (nm⁻¹).
    ///
    /// The Drude pole at zero frequency is reported as
    /// [`Error::PermittivityDiverges`]; integrands never sample that point.
    pub fn permittivity(&self, xi_hat: f64) -> Result<f64> {
        Ok(1.0 + self.susceptibility(xi_hat)?)
    }

    /// `ε(iξ) - 1`, evaluated directly so that it keeps full relative
    /// precision at high frequency where `ε → 1`.
    pub fn susceptibility(&self, xi_hat: f64) -> Result<f64> {
        if xi_hat.is_nan() || xi_hat < 0.0 {
            return Err(Error::invalid(format!("xi_hat must be >= 0, got {xi_hat}")));
        }
        Ok(match self {
            MaterialModel::Vacuum => 0.0,
            MaterialModel::Drude(p) => {
                if xi_hat == 0.0 {
                    return Err(Error::PermittivityDiverges);
                }
                let wp = p.plasma_xi_hat();
                let gamma = p.gamma_ratio * wp;
                wp * wp / (xi_hat * (xi_hat + gamma))
            }
            MaterialModel::Sellmeier(p) => p
                .terms
                .iter()
                .map(|t| {
                    let w = 2.0 * PI / t.lambda_nm;
                    t.strength * w * w / (w * w + xi_hat * xi_hat)
                })
                .sum::<f64>(),
        })
    }

    /// Short stable identifier used in cache keys and provenance lines.
    pub fn label(&self) -> String {
        match self {
            MaterialModel::Vacuum => "vacuum".into(),
            MaterialModel::Drude(p) => format!("drude(lambda_p={},gamma={})", p.lambda_p_nm, p.gamma_ratio),
            MaterialModel::Sellmeier(p) => {
                let terms: Vec<String> = p
                    .terms
                    .iter()
                    .map(|t| format!("{}:{}", t.strength, t.lambda_nm))
                    .collect();
                format!("sellmeier({})", terms.join(";"))
            }
        }
    }
}
