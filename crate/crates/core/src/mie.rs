//! Mie amplitudes of a homogeneous sphere at imaginary frequency.
//!
//! Convention: the Bohren-Huffman `a_ℓ`, `b_ℓ` continued to the imaginary
//! size parameter `x = i ξ̂R`. They are real there, with signs
//! `sgn a_ℓ = (-1)^ℓ` and `sgn b_ℓ = (-1)^{ℓ+1}` for every `ε > 1`.
//!
//! With `Ψ(s) = s i_ℓ(s)`, `Ξ(s) = s k_ℓ(s)`, `n = √ε` and the logarithmic
//! derivatives `D = Ψ'/Ψ`, `G = Ξ'/Ξ`:
//!
//! ```text
//! a_ℓ = -(-1)^ℓ · i_ℓ(s)/k_ℓ(s) · (n D(s) - D(ns)) / (n G(s) - D(ns))
//! b_ℓ = -(-1)^ℓ · i_ℓ(s)/k_ℓ(s) · (D(s) - n D(ns)) / (G(s) - n D(ns))
//! ```
//!
//! `D(z) = (ℓ+1)/z + i_{ℓ+1}(z)/i_ℓ(z)` removes the `1/z` cancellation that
//! would otherwise spoil `b_ℓ` for small spheres.

use serde::{Deserialize, Serialize};

use crate::bessel;
use crate::error::{Error, Result};

/// Highest multipole order the recurrences are trusted for.
pub const MAX_ELL: u32 = 1000;

#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
pub struct SizeParameter(f64);

impl SizeParameter {
    pub fn new(value: f64) -> Result<Self> {
        if !(value >= 0.0 && value.is_finite()) {
            return Err(Error::invalid(format!("size parameter must be >= 0, got {value}")));
        }
        Ok(SizeParameter(value))
    }

    /// `ξ̂ R`.
    pub fn from_radius(xi_hat: f64, radius_nm: f64) -> Result<Self> {
        Self::new(xi_hat * radius_nm)
    }

    pub fn value(self) -> f64 {
        self.0
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MieAmplitude {
    pub ell: u32,
    /// Electric amplitude `a_ℓ`.
    pub a: f64,
    /// Magnetic amplitude `b_ℓ`.
    pub b: f64,
}

/// Magnitudes of the Mie amplitudes in log form, scaled by `e^{-2s}`:
/// `|a_ℓ| = exp(ln_a[ℓ] + 2s)`. Index 0 is unused.
#[derive(Debug, Clone)]
pub(crate) struct MieLog {
    pub ln_a: Vec<f64>,
    pub ln_b: Vec<f64>,
}

pub(crate) fn mie_log_magnitudes(eps: f64, s: f64, ell_max: u32) -> Result<MieLog> {
    if eps.is_nan() || eps < 1.0 {
        return Err(Error::invalid(format!("sphere permittivity must be >= 1, got {eps}")));
    }
    if !(s > 0.0 && s.is_finite()) {
        return Err(Error::invalid(format!("size parameter must be positive, got {s}")));
    }
    if ell_max < 1 {
        return Err(Error::invalid("ell_max must be >= 1"));
    }
    if ell_max > MAX_ELL {
        return Err(Error::StabilityBudget {
            requested: ell_max,
            budget: MAX_ELL,
        });
    }
    let l_max = ell_max as usize;
    let n = eps.sqrt();
    let ns = n * s;

    let r_s = bessel::first_kind_ratios(s, l_max + 1)?;
    let r_ns = if eps == 1.0 {
        r_s.clone()
    } else {
        bessel::first_kind_ratios(ns, l_max + 1)?
    };
    let ln_i = bessel::ln_first_kind_scaled(s, &r_s);
    let (ln_k, rho) = bessel::second_kind_scaled(s, l_max)?;

    let mut ln_a = vec![f64::NEG_INFINITY; l_max + 1];
    let mut ln_b = vec![f64::NEG_INFINITY; l_max + 1];
    for l in 1..=l_max {
        let lf = l as f64;
        // ln(i_ℓ/k_ℓ) - 2s
        let ln_ratio = ln_i[l] - ln_k[l];
        let num_a = (lf + 1.0) * (eps - 1.0) / ns + n * r_s[l + 1] - r_ns[l + 1];
        let den_a = (lf + 1.0) / ns + r_ns[l + 1] + n / rho[l] + n * lf / s;
        let num_b = n * r_ns[l + 1] - r_s[l + 1];
        let den_b = 1.0 / rho[l] + (2.0 * lf + 1.0) / s + n * r_ns[l + 1];
        ln_a[l] = ln_ratio + (num_a.max(0.0) / den_a).ln();
        ln_b[l] = ln_ratio + (num_b.max(0.0) / den_b).ln();
        if ln_a[l].is_nan() || ln_b[l].is_nan() || ln_a[l] == f64::INFINITY || ln_b[l] == f64::INFINITY {
            return Err(Error::NonFinite("Mie amplitudes"));
        }
    }
    Ok(MieLog { ln_a, ln_b })
}

/// Full Mie amplitudes `a_ℓ, b_ℓ` for `ℓ = 1..=ell_max`.
pub fn mie_amplitudes(eps: f64, size: SizeParameter, ell_max: u32) -> Result<Vec<MieAmplitude>> {
    let s = size.value();
    let logs = mie_log_magnitudes(eps, s, ell_max)?;
    (1..=ell_max as usize)
        .map(|l| {
            let sign_a = if l % 2 == 0 { 1.0 } else { -1.0 };
            let a = sign_a * (logs.ln_a[l] + 2.0 * s).exp();
            let b = -sign_a * (logs.ln_b[l] + 2.0 * s).exp();
            if !(a.is_finite() && b.is_finite()) {
                return Err(Error::NonFinite("Mie amplitudes"));
            }
            Ok(MieAmplitude { ell: l as u32, a, b })
        })
        .collect()
}

fn double_factorial(n: u32) -> f64 {
    (1..=n).rev().step_by(2).map(f64::from).product()
}

/// Leading small-sphere behaviour of `a_ℓ` and `b_ℓ`.
pub fn mie_small_radius(eps: f64, size: SizeParameter, ell: u32) -> Result<MieAmplitude> {
    if eps.is_nan() || eps < 1.0 {
        return Err(Error::invalid("sphere permittivity must be >= 1"));
    }
    if ell < 1 {
        return Err(Error::invalid("ell must be >= 1"));
    }
    let s = size.value();
    let l = f64::from(ell);
    let sign = if ell.is_multiple_of(2) { 1.0 } else { -1.0 };
    let a = sign * (l + 1.0) / (l * eps + l + 1.0) * (eps - 1.0) * s.powi(2 * ell as i32 + 1)
        / (double_factorial(2 * ell + 1) * double_factorial(2 * ell - 1));
    let b = -sign * (eps - 1.0) * s.powi(2 * ell as i32 + 3)
        / (double_factorial(2 * ell + 3) * double_factorial(2 * ell + 1));
    Ok(MieAmplitude { ell, a, b })
}

/// Dynamical electric polarizability `α = (ε-1)/(ε+2)`; `αR³` is the reduced polarizability.
pub fn polarizability(eps: f64) -> f64 {
    if eps.is_infinite() {
        return 1.0;
    }
    (eps - 1.0) / (eps + 2.0)
}
