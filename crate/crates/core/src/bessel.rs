//! Modified spherical Bessel functions for real positive arguments.
//!
//! Normalization: `i_0(z) = sinh z / z`, `k_0(z) = e^{-z} / z`, both obeying
//! `f_{ℓ-1} - f_{ℓ+1} = ±(2ℓ+1)/z f_ℓ`. Values are handled as ratios and
//! exponentially scaled logarithms so that `ℓ ≤ 1000` and arguments from
//! `1e-8` to `1e6` never overflow.

use crate::error::{Error, Result};

/// `r[ℓ] = i_ℓ(z) / i_{ℓ-1}(z)` for `ℓ = 1..=n_max` (`r[0]` is unused and set to 0).
///
/// The top ratio comes from the continued fraction
/// `1/r_ℓ = (2ℓ+1)/z + r_{ℓ+1}` evaluated with modified Lentz; the rest by
/// the same relation run downwards, which is the stable direction.
pub fn first_kind_ratios(z: f64, n_max: usize) -> Result<Vec<f64>> {
    if !(z >= 0.0 && z.is_finite()) {
        return Err(Error::invalid(format!(
            "Bessel argument must be finite and >= 0, got {z}"
        )));
    }
    let mut r = vec![0.0; n_max + 1];
    if n_max == 0 || z == 0.0 {
        return Ok(r);
    }
    r[n_max] = top_ratio(z, n_max)?;
    for l in (1..n_max).rev() {
        r[l] = 1.0 / ((2 * l + 1) as f64 / z + r[l + 1]);
    }
    Ok(r)
}

fn top_ratio(z: f64, l: usize) -> Result<f64> {
    const TINY: f64 = 1e-300;
    let b = |j: usize| (2 * j + 1) as f64 / z;
    let mut f = b(l);
    if f == 0.0 {
        f = TINY;
    }
    let mut c = f;
    let mut d = 0.0;
    let max_iter = 10 * (z as usize + l) + 10_000;
    for j in (l + 1)..(l + 1 + max_iter) {
        d += b(j);
        if d == 0.0 {
            d = TINY;
        }
        c = b(j) + 1.0 / c;
        if c == 0.0 {
            c = TINY;
        }
        d = 1.0 / d;
        let delta = c * d;
        f *= delta;
        if (delta - 1.0).abs() < 1e-16 {
            return Ok(1.0 / f);
        }
    }
    Err(Error::NonFinite("Bessel continued fraction"))
}

/// `ln(e^{-z} i_ℓ(z))` for `ℓ = 0..=n_max`, given the ratios of [`first_kind_ratios`].
pub fn ln_first_kind_scaled(z: f64, ratios: &[f64]) -> Vec<f64> {
    let mut out = Vec::with_capacity(ratios.len());
    let ln_i0 = if z == 0.0 {
        -z
    } else if z < 1e-8 {
        -z + (z * z / 6.0).ln_1p()
    } else {
        (-(-2.0 * z).exp_m1()).ln() - (2.0 * z).ln()
    };
    out.push(ln_i0);
    let mut acc = ln_i0;
    for &r in &ratios[1..] {
        acc += r.ln();
        out.push(acc);
    }
    out
}

/// `(ln(e^{z} k_ℓ(z)), ρ)` for `ℓ = 0..=n_max` where `ρ[ℓ] = k_ℓ/k_{ℓ-1}` (`ρ[0]` unused).
///
/// Upward recurrence `ρ_{ℓ+1} = (2ℓ+1)/z + 1/ρ_ℓ`, stable for the decaying solution.
pub fn second_kind_scaled(z: f64, n_max: usize) -> Result<(Vec<f64>, Vec<f64>)> {
    if !(z > 0.0 && z.is_finite()) {
        return Err(Error::invalid(format!("k_ℓ needs a positive finite argument, got {z}")));
    }
    let mut ln_k = Vec::with_capacity(n_max + 1);
    let mut rho = vec![0.0; n_max + 1];
    let mut acc = -z.ln();
    ln_k.push(acc);
    for l in 1..=n_max {
        rho[l] = if l == 1 {
            1.0 + 1.0 / z
        } else {
            (2 * l - 1) as f64 / z + 1.0 / rho[l - 1]
        };
        acc += rho[l].ln();
        ln_k.push(acc);
    }
    if !acc.is_finite() {
        return Err(Error::NonFinite("k_ℓ recurrence"));
    }
    Ok((ln_k, rho))
}

/// `i_ℓ(z)`; overflows to infinity for very large arguments.
pub fn sph_i(l: usize, z: f64) -> Result<f64> {
    if z == 0.0 {
        return Ok(if l == 0 { 1.0 } else { 0.0 });
    }
    let r = first_kind_ratios(z, l)?;
    Ok((ln_first_kind_scaled(z, &r)[l] + z).exp())
}

/// `k_ℓ(z)`; overflows for tiny arguments at high order.
pub fn sph_k(l: usize, z: f64) -> Result<f64> {
    let (ln_k, _) = second_kind_scaled(z, l)?;
    Ok((ln_k[l] - z).exp())
}
