//! Round-trip operator `M = R_S e^{-K𝓛} R_P e^{-K𝓛}` in the multipole basis.
//!
//! Rotational symmetry about the axis makes `M` block diagonal in `m`; each
//! block is indexed by `(ℓ, P)` with `P ∈ {E, M}` and `ℓ = max(1, m)..=ℓ_max`,
//! electric rows first.
//!
//! Entries are stored in the symmetric gauge
//!
//! ```text
//! M̃_ij = √|s_i s_j| ∫₁^∞ dx e^{-2ξ̂𝓛x} [ r_TM C^TM_i C^TM_j + |r_TE| C^TE_i C^TE_j ]
//! ```
//!
//! with `s = a_ℓ` (E) or `b_ℓ` (M), `C^TM_E = C^TE_M = τ̃`, `C^TM_M = C^TE_E = π̃`.
//! The physical block `-s_i K_ij p_j` (`p` the parity of the upgoing plane-wave
//! expansion) differs from `M̃` by a diagonal similarity, so determinants and
//! traces agree, and on the dipole diagonal the two coincide. In this gauge
//! `M̃ = G Gᵀ` with `G` one column per (x node, polarization): it is positive
//! semidefinite and `I - M̃` is symmetric positive definite whenever the round
//! trip is a contraction.
//!
//! The x integral uses Gauss-Laguerre in `y = 2ξ̂𝓛(x-1)`, which absorbs the
//! exponential exactly and leaves a polynomial in `y` times the smooth
//! Fresnel factors.

use std::io::Write;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::energy::Geometry;
use crate::error::{Error, Result};
use crate::fresnel;
use crate::legendre;
use crate::material::MaterialModel;
use crate::mie::{self, MieLog};
use crate::quadrature::{adaptive_integrate_half_line, GaussLaguerre};

/// Node count for the x integral of the round-trip elements.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct QuadratureSpec {
    pub x_nodes: usize,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        QuadratureSpec { x_nodes: 80 }
    }
}

impl QuadratureSpec {
    /// The integrand is a polynomial of degree up to `2ℓ_max` in `y`, so the
    /// rule never drops below `ℓ_max + 21` nodes.
    pub fn effective_nodes(&self, ell_max: u32) -> usize {
        self.x_nodes.max(ell_max as usize + 21)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Polarization {
    E,
    M,
}

#[derive(Debug, Clone)]
pub struct RoundTripBlock {
    pub m: u32,
    pub ell_min: u32,
    pub ell_max: u32,
    pub xi_hat: f64,
    pub matrix: DMatrix<f64>,
}

impl RoundTripBlock {
    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn index(&self, ell: u32, pol: Polarization) -> usize {
        let n = (self.ell_max - self.ell_min + 1) as usize;
        let j = (ell - self.ell_min) as usize;
        match pol {
            Polarization::E => j,
            Polarization::M => n + j,
        }
    }

    pub fn entry(&self, ell: u32, pol: Polarization, ell2: u32, pol2: Polarization) -> f64 {
        self.matrix[(self.index(ell, pol), self.index(ell2, pol2))]
    }

    /// Debug dump as `row,col,ell,pol,ell2,pol2,value`.
    pub fn write_csv<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        let n = (self.ell_max - self.ell_min + 1) as usize;
        let label = |i: usize| {
            if i < n {
                (self.ell_min as usize + i, 'E')
            } else {
                (self.ell_min as usize + i - n, 'M')
            }
        };
        writeln!(
            out,
            "# m={} xi_hat={:e} ell_min={} ell_max={}",
            self.m, self.xi_hat, self.ell_min, self.ell_max
        )?;
        writeln!(out, "row,col,ell,pol,ell2,pol2,value")?;
        for i in 0..self.dim() {
            for j in 0..self.dim() {
                let (l1, p1) = label(i);
                let (l2, p2) = label(j);
                writeln!(out, "{i},{j},{l1},{p1},{l2},{p2},{:e}", self.matrix[(i, j)])?;
            }
        }
        Ok(())
    }
}

/// Everything about one frequency node that does not depend on `m`:
/// Mie amplitudes, x nodes and the Fresnel-weighted quadrature factors.
#[derive(Debug, Clone)]
pub struct FrequencyContext {
    pub xi_hat: f64,
    pub ell_max: u32,
    mie: MieLog,
    /// `ξ̂R`
    size: f64,
    x: Vec<f64>,
    /// `½ ln(w_k r_TM e^{-2X} / 2X)` with `X = ξ̂𝓛`, and the same with `|r_TE|`.
    half_ln_tm: Vec<f64>,
    half_ln_te: Vec<f64>,
}

impl FrequencyContext {
    pub fn new(
        geom: &Geometry,
        plane: &MaterialModel,
        sphere: &MaterialModel,
        xi_hat: f64,
        ell_max: u32,
        quad: &QuadratureSpec,
    ) -> Result<Self> {
        if !(xi_hat > 0.0 && xi_hat.is_finite()) {
            return Err(Error::invalid(format!("xi_hat must be positive, got {xi_hat}")));
        }
        if ell_max < 1 {
            return Err(Error::invalid("ell_max must be >= 1"));
        }
        let size = xi_hat * geom.radius_nm;
        let eps_sphere = sphere.permittivity(xi_hat)?;
        let chi_plane = plane.susceptibility(xi_hat)?;
        let mie = mie::mie_log_magnitudes(eps_sphere, size, ell_max)?;

        let big_x = xi_hat * geom.script_l();
        let rule = GaussLaguerre::cached(quad.effective_nodes(ell_max));
        let base = -big_x - 0.5 * (2.0 * big_x).ln();
        let mut x = Vec::with_capacity(rule.len());
        let mut half_ln_tm = Vec::with_capacity(rule.len());
        let mut half_ln_te = Vec::with_capacity(rule.len());
        for (&y, &lw) in rule.nodes.iter().zip(&rule.ln_weights) {
            let xk = 1.0 + y / (2.0 * big_x);
            let r = fresnel::fresnel_from_susceptibility(chi_plane, xk);
            x.push(xk);
            half_ln_tm.push(0.5 * (lw + r.r_tm.ln()) + base);
            half_ln_te.push(0.5 * (lw + (-r.r_te).ln()) + base);
        }
        Ok(FrequencyContext {
            xi_hat,
            ell_max,
            mie,
            size,
            x,
            half_ln_tm,
            half_ln_te,
        })
    }

    pub fn x_nodes(&self) -> usize {
        self.x.len()
    }

    /// Factor `G` with `M̃^(m) = G Gᵀ`; columns are TM nodes then TE nodes.
    pub fn factor(&self, m: u32) -> Result<DMatrix<f64>> {
        if m > self.ell_max {
            return Err(Error::invalid(format!("m = {m} exceeds ell_max = {}", self.ell_max)));
        }
        let ell_min = m.max(1);
        let n = (self.ell_max - ell_min + 1) as usize;
        let k_count = self.x.len();
        let mut g = DMatrix::<f64>::zeros(2 * n, 2 * k_count);
        let half_ln_s = |ln: f64| 0.5 * ln + self.size;
        for (k, &xk) in self.x.iter().enumerate() {
            let table = legendre::angular_table(m, self.ell_max, xk)?;
            for j in 0..n {
                let ell = ell_min as usize + j;
                let sc = table.ln_scale[j];
                let (pi, tau) = (table.pi[j], table.tau[j]);
                let ea = half_ln_s(self.mie.ln_a[ell]) + sc;
                let eb = half_ln_s(self.mie.ln_b[ell]) + sc;
                g[(j, k)] = scaled(tau, ea + self.half_ln_tm[k]);
                g[(j, k_count + k)] = scaled(pi, ea + self.half_ln_te[k]);
                g[(n + j, k)] = scaled(pi, eb + self.half_ln_tm[k]);
                g[(n + j, k_count + k)] = scaled(tau, eb + self.half_ln_te[k]);
            }
        }
        if g.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("round-trip factor"));
        }
        Ok(g)
    }

    pub fn block(&self, m: u32) -> Result<RoundTripBlock> {
        let g = self.factor(m)?;
        Ok(RoundTripBlock {
            m,
            ell_min: m.max(1),
            ell_max: self.ell_max,
            xi_hat: self.xi_hat,
            matrix: &g * g.transpose(),
        })
    }

    /// `tr M^(m)` without forming the block.
    pub fn trace(&self, m: u32) -> Result<f64> {
        Ok(self.factor(m)?.norm_squared())
    }
}

fn scaled(mantissa: f64, ln_factor: f64) -> f64 {
    if mantissa == 0.0 {
        0.0
    } else {
        mantissa * ln_factor.exp()
    }
}

/// Block `M^(m)` at a single frequency node.
pub fn roundtrip_block(
    geom: &Geometry,
    plane: &MaterialModel,
    sphere: &MaterialModel,
    xi_hat: f64,
    m: u32,
    ell_max: u32,
    quad: &QuadratureSpec,
) -> Result<RoundTripBlock> {
    FrequencyContext::new(geom, plane, sphere, xi_hat, ell_max, quad)?.block(m)
}

/// Electric-dipole elements `(M_EE^(0), M_EE^(1))` from their explicit one-dimensional integrals,
/// with the propagation distance taken as the closest-approach distance `L`.
pub fn dipole_block_elements(
    geom: &Geometry,
    plane: &MaterialModel,
    sphere: &MaterialModel,
    xi_hat: f64,
) -> Result<(f64, f64)> {
    dipole_block_elements_at(geom.distance_nm, geom.radius_nm, plane, sphere, xi_hat)
}

/// As [`dipole_block_elements`] with an explicit distance in the exponent.
///
/// ```text
/// M_EE^(0) = -(3/2) a₁ ∫₁^∞ dx (x²-1) r_TM e^{-2ξ̂Dx}
/// M_EE^(1) =  (3/4) a₁ ∫₁^∞ dx (r_TE - x² r_TM) e^{-2ξ̂Dx}
/// ```
///
/// evaluated by adaptive Gauss-Kronrod, independently of the Laguerre path.
pub fn dipole_block_elements_at(
    distance_nm: f64,
    radius_nm: f64,
    plane: &MaterialModel,
    sphere: &MaterialModel,
    xi_hat: f64,
) -> Result<(f64, f64)> {
    if !(distance_nm > 0.0 && radius_nm > 0.0 && xi_hat > 0.0) {
        return Err(Error::invalid("distance, radius and xi_hat must be positive"));
    }
    let eps = sphere.permittivity(xi_hat)?;
    let size = mie::SizeParameter::from_radius(xi_hat, radius_nm)?;
    let a1 = mie::mie_amplitudes(eps, size, 1)?[0].a;
    if a1 == 0.0 {
        return Ok((0.0, 0.0));
    }
    let chi = plane.susceptibility(xi_hat)?;
    let two_d = 2.0 * xi_hat * distance_nm;
    // t = x - 1, the e^{-2ξ̂D} prefactor is pulled out
    let scale = 1.0 / two_d;
    let i0 = adaptive_integrate_half_line(
        |t| {
            let x = 1.0 + t;
            let r = fresnel::fresnel_from_susceptibility(chi, x);
            t * (x + 1.0) * r.r_tm * (-two_d * t).exp()
        },
        scale,
        1e-12,
        0.0,
    )?;
    let i1 = adaptive_integrate_half_line(
        |t| {
            let x = 1.0 + t;
            let r = fresnel::fresnel_from_susceptibility(chi, x);
            (r.r_te - x * x * r.r_tm) * (-two_d * t).exp()
        },
        scale,
        1e-12,
        0.0,
    )?;
    let pref = (-two_d).exp();
    Ok((-1.5 * a1 * i0 * pref, 0.75 * a1 * i1 * pref))
}
