//! Angular functions `π̃_ℓm`, `τ̃_ℓm` continued to `x = κ/ξ̂ ≥ 1`.
//!
//! With `w = √(x²-1)` and `𝒫_ℓ^m(x) = w^m d^m P_ℓ/dx^m` (no Condon-Shortley
//! phase, positive for `x > 1`):
//!
//! ```text
//! π̃_ℓm = Λ_ℓm · m 𝒫_ℓ^m / w
//! τ̃_ℓm = Λ_ℓm · w d𝒫_ℓ^m/dx
//! Λ_ℓm = √((2ℓ+1)(ℓ-m)! / (ℓ(ℓ+1)(ℓ+m)!))
//! ```
//!
//! Internally the recurrence runs on `q_ℓ = √((2ℓ+1)(ℓ-m)!/(ℓ+m)!) 𝒫_ℓ^m / w`,
//! which stays O(1) in the normalization and only grows like `x^ℓ`. Values
//! are kept as mantissa plus log-scale because `x` can reach 1e5 and `ℓ` 100.

use crate::error::{Error, Result};

const RESCALE_AT: f64 = 1e150;
const RESCALE_BY: f64 = 1e-150;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AngularFunctions {
    pub pi_tilde: f64,
    pub tau_tilde: f64,
}

/// `π̃` and `τ̃` for `ℓ = ell_min..=ell_max` at one `(m, x)`.
///
/// Entry `j` belongs to `ℓ = ell_min + j`; its value is
/// `pi[j] · exp(ln_scale[j])` (same scale for `tau[j]`).
#[derive(Debug, Clone)]
pub struct AngularTable {
    pub m: u32,
    pub ell_min: u32,
    pub ell_max: u32,
    pub pi: Vec<f64>,
    pub tau: Vec<f64>,
    pub ln_scale: Vec<f64>,
}

impl AngularTable {
    pub fn len(&self) -> usize {
        self.pi.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pi.is_empty()
    }

    pub fn get(&self, ell: u32) -> AngularFunctions {
        let j = (ell - self.ell_min) as usize;
        let f = self.ln_scale[j].exp();
        AngularFunctions {
            pi_tilde: self.pi[j] * f,
            tau_tilde: self.tau[j] * f,
        }
    }
}

/// `ln √((2m+1)(2m-1)!!/(2m)!!)`, the normalized `q_m` without its `w^{m-1}`.
fn ln_start(m: u32) -> f64 {
    let mut acc = (2.0 * f64::from(m) + 1.0).ln();
    for k in 1..=m {
        let k = f64::from(k);
        acc += ((2.0 * k - 1.0) / (2.0 * k)).ln();
    }
    0.5 * acc
}

/// Builds the table for `m ≥ 1`; for `m = 0` the `m = 1` recurrence feeds
/// `τ̃_ℓ0 = w q_ℓ^{(1)}` since `Λ_ℓ0 = √((2ℓ+1)/(ℓ(ℓ+1)))` equals the `m = 1` prefactor.
pub fn angular_table(m: u32, ell_max: u32, x: f64) -> Result<AngularTable> {
    if !(x >= 1.0 && x.is_finite()) {
        return Err(Error::invalid(format!("angular functions need finite x >= 1, got {x}")));
    }
    let ell_min = m.max(1);
    if ell_max < ell_min {
        return Err(Error::invalid(format!("ell_max = {ell_max} below ell_min = {ell_min}")));
    }
    let n = (ell_max - ell_min + 1) as usize;
    let mut table = AngularTable {
        m,
        ell_min,
        ell_max,
        pi: Vec::with_capacity(n),
        tau: Vec::with_capacity(n),
        ln_scale: Vec::with_capacity(n),
    };
    let w = ((x - 1.0) * (x + 1.0)).sqrt();
    let mr = m.max(1);
    let mf = f64::from(mr);

    if w == 0.0 && (mr >= 2 || m == 0) {
        // every entry carries at least one power of w
        table.pi.resize(n, 0.0);
        table.tau.resize(n, 0.0);
        table.ln_scale.resize(n, 0.0);
        return Ok(table);
    }

    let mut scale = ln_start(mr);
    if mr >= 2 {
        scale += (mf - 1.0) * w.ln();
    }
    if m == 0 {
        scale += w.ln();
    }
    let mut prev = 0.0;
    let mut cur = 1.0;
    for ell in mr..=ell_max {
        let l = f64::from(ell);
        if ell > mr {
            let a = ((4.0 * l * l - 1.0) / (l * l - mf * mf)).sqrt();
            let b = if ell >= mr + 2 {
                ((2.0 * l + 1.0) * ((l - 1.0) * (l - 1.0) - mf * mf) / ((2.0 * l - 3.0) * (l * l - mf * mf))).sqrt()
            } else {
                0.0
            };
            let next = a * x * cur - b * prev;
            prev = cur;
            cur = next;
            if cur.abs() > RESCALE_AT {
                cur *= RESCALE_BY;
                prev *= RESCALE_BY;
                scale -= RESCALE_BY.ln();
            }
        }
        let norm = (l * (l + 1.0)).sqrt();
        if m == 0 {
            table.pi.push(0.0);
            table.tau.push(cur);
        } else {
            let c = ((2.0 * l + 1.0) * (l * l - mf * mf) / (2.0 * l - 1.0)).sqrt();
            table.pi.push(mf * cur / norm);
            table.tau.push((l * x * cur - c * prev) / norm);
        }
        table.ln_scale.push(scale);
    }
    if table.tau.iter().chain(&table.pi).any(|v| !v.is_finite()) {
        return Err(Error::NonFinite("angular function recurrence"));
    }
    Ok(table)
}

/// Single pair `(π̃_ℓm(x), τ̃_ℓm(x))`; may overflow to infinity at extreme `x^ℓ`.
pub fn angular_functions(ell: u32, m: u32, x: f64) -> Result<AngularFunctions> {
    if ell < 1 || m > ell {
        return Err(Error::invalid(format!(
            "need 1 <= ell and m <= ell, got ell = {ell}, m = {m}"
        )));
    }
    Ok(angular_table(m, ell, x)?.get(ell))
}
