//! Specular reflection on the plane at imaginary frequency.

use crate::error::{Error, Result};

/// Fresnel amplitudes for TE and TM polarization.
///
/// For `ε ≥ 1` at imaginary frequency `-1 ≤ r_te ≤ 0 ≤ r_tm ≤ 1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FresnelPair {
    pub r_te: f64,
    pub r_tm: f64,
}

/// Fresnel amplitudes at reduced frequency `xi_hat` and `κ = √(ξ̂² + k²)`.
pub fn fresnel(eps: f64, xi_hat: f64, kappa: f64) -> Result<FresnelPair> {
    if eps.is_nan() || eps < 1.0 {
        return Err(Error::invalid(format!("permittivity must be >= 1, got {eps}")));
    }
    if !(xi_hat > 0.0) {
        return Err(Error::invalid("xi_hat must be positive"));
    }
    if !(kappa >= xi_hat) {
        return Err(Error::invalid(format!(
            "kappa = {kappa} below xi_hat = {xi_hat} is unphysical"
        )));
    }
    Ok(fresnel_reduced(eps, kappa / xi_hat))
}

/// Same amplitudes in terms of `x = κ / ξ̂ ≥ 1`.
///
/// Written in the cancellation-free form
/// `r_te = -(ε-1) / (x + s)²`, `r_tm = (ε-1)((ε+1)x² - 1) / (εx + s)²`
/// with `s = √(x² + ε - 1)`, so both vanish linearly as `ε → 1`.
pub fn fresnel_reduced(eps: f64, x: f64) -> FresnelPair {
    fresnel_from_susceptibility(eps - 1.0, x)
}

/// [`fresnel_reduced`] taking `χ = ε - 1`, which keeps full precision when `ε → 1`.
pub fn fresnel_from_susceptibility(chi: f64, x: f64) -> FresnelPair {
    if chi.is_infinite() {
        return FresnelPair { r_te: -1.0, r_tm: 1.0 };
    }
    let em1 = chi;
    let eps = 1.0 + chi;
    let s = (x * x + em1).sqrt();
    let te_den = x + s;
    let tm_den = eps * x + s;
    FresnelPair {
        r_te: -em1 / (te_den * te_den),
        r_tm: em1 * ((eps + 1.0) * x * x - 1.0) / (tm_den * tm_den),
    }
}
