//! Casimir energy from the frequency integral of `Σ'_m ln det(I - M^(m))`.
//!
//! `E = (ħc/π) ∫₀^∞ dξ̂ Σ'_m ln det(I - M^(m)(ξ̂))`, the primed sum counting
//! `m = 0` with weight ½ (the `±m` blocks are identical). The frequency
//! integral uses Gauss-Legendre on `ξ̂ = s₀ u / (1 - u)`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::material::MaterialModel;
use crate::parallel::{self, Execution};
use crate::quadrature::{GaussLegendre, HalfLineMap};
use crate::roundtrip::{FrequencyContext, QuadratureSpec, RoundTripBlock};
use crate::HBAR_C_EV_NM;

/// Nodes with `2ξ̂L` beyond this contribute less than `e^{-700}` and are skipped.
const SUPPRESSION_CUTOFF: f64 = 700.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Geometry {
    pub radius_nm: f64,
    pub distance_nm: f64,
}

impl Geometry {
    pub fn new(radius_nm: f64, distance_nm: f64) -> Result<Self> {
        let g = Geometry { radius_nm, distance_nm };
        g.validate()?;
        Ok(g)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.radius_nm > 0.0 && self.radius_nm.is_finite()) {
            return Err(Error::invalid(format!(
                "radius must be positive, got {}",
                self.radius_nm
            )));
        }
        if !(self.distance_nm > 0.0 && self.distance_nm.is_finite()) {
            return Err(Error::invalid(format!(
                "distance must be positive, got {}",
                self.distance_nm
            )));
        }
        Ok(())
    }

    /// Centre-to-plane distance `𝓛 = L + R`.
    pub fn script_l(&self) -> f64 {
        self.distance_nm + self.radius_nm
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct NumericsSpec {
    /// Multipole cutoff; `None` applies [`ell_max_policy`].
    pub ell_max: Option<u32>,
    /// m-sum stops after two consecutive terms below this fraction of the partial sum.
    pub m_rel_cutoff: f64,
    pub xi_nodes: usize,
    pub x_nodes: usize,
    pub target_rel_err: f64,
    /// Frequency map scale in units of `1/𝓛`.
    pub xi_scale: f64,
    /// Run the refinement pass that fills `rel_err_estimate`.
    pub refine: bool,
}

impl Default for NumericsSpec {
    fn default() -> Self {
        NumericsSpec {
            ell_max: None,
            m_rel_cutoff: 1e-6,
            xi_nodes: 40,
            x_nodes: 80,
            target_rel_err: 1e-4,
            xi_scale: 1.0,
            refine: true,
        }
    }
}

impl NumericsSpec {
    pub fn validate(&self) -> Result<()> {
        if self.ell_max == Some(0) {
            return Err(Error::invalid("ell_max must be >= 1"));
        }
        if let Some(l) = self.ell_max {
            if l > crate::mie::MAX_ELL {
                return Err(Error::StabilityBudget {
                    requested: l,
                    budget: crate::mie::MAX_ELL,
                });
            }
        }
        for (name, v) in [
            ("m_rel_cutoff", self.m_rel_cutoff),
            ("target_rel_err", self.target_rel_err),
        ] {
            if !(v > 0.0 && v < 1.0) {
                return Err(Error::invalid(format!("{name} must lie in (0, 1), got {v}")));
            }
        }
        if self.xi_nodes < 2 || self.x_nodes < 2 {
            return Err(Error::invalid("node counts must be >= 2"));
        }
        if !(self.xi_scale > 0.0 && self.xi_scale.is_finite()) {
            return Err(Error::invalid("xi_scale must be positive"));
        }
        Ok(())
    }

    pub fn resolved_ell_max(&self, geom: &Geometry) -> u32 {
        self.ell_max.unwrap_or_else(|| ell_max_policy(geom))
    }
}

/// `max(10, ⌈8R/L⌉ + 10)`, capped at 100.
pub fn ell_max_policy(geom: &Geometry) -> u32 {
    let scaled = (8.0 * geom.radius_nm / geom.distance_nm).ceil() + 10.0;
    (scaled.min(100.0) as u32).max(10)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnergyResult {
    pub energy_ev: f64,
    /// Energy in units of `ħc/nm`.
    pub energy_natural: f64,
    pub lmax_used: u32,
    /// Largest number of m terms summed at any frequency node.
    pub m_used: u32,
    pub nodes_used: usize,
    pub x_nodes_used: usize,
    pub rel_err_estimate: f64,
    pub converged: bool,
}

/// `ln det(I - M)` for one block.
///
/// In the symmetric gauge `I - M` is symmetric positive definite, so Gaussian
/// elimination needs no pivoting. It runs on `V = M` directly
/// (`A = I - V`, `v_jk += v_ji v_ik / (1 - v_ii)`) so each pivot is known as
/// `1 - v_ii` and `ln(1 - v_ii)` keeps full relative precision when `M ≪ 1`.
pub fn log_det_contribution(block: &RoundTripBlock) -> Result<f64> {
    log_det_i_minus(&block.matrix).ok_or(Error::SpectralRadius {
        m: block.m,
        xi_hat: block.xi_hat,
    })
}

pub(crate) fn log_det_i_minus(m: &nalgebra::DMatrix<f64>) -> Option<f64> {
    let n = m.nrows();
    let mut v = m.clone();
    let mut acc = 0.0;
    for i in 0..n {
        let pivot = 1.0 - v[(i, i)];
        if !(pivot > 0.0) {
            return None;
        }
        acc += (-v[(i, i)]).ln_1p();
        for j in (i + 1)..n {
            let f = v[(j, i)] / pivot;
            if f == 0.0 {
                continue;
            }
            for k in (i + 1)..n {
                v[(j, k)] += f * v[(i, k)];
            }
        }
    }
    acc.is_finite().then_some(acc)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Mode {
    LogDet,
    Trace,
}

struct Problem<'a> {
    geom: &'a Geometry,
    plane: &'a MaterialModel,
    sphere: &'a MaterialModel,
    m_rel_cutoff: f64,
}

/// `Σ'_m f_m` at one frequency, `f_m = ln det(I - M^(m))` or `-tr M^(m)`.
fn frequency_integrand(
    p: &Problem,
    xi_hat: f64,
    ell_max: u32,
    quad: &QuadratureSpec,
    mode: Mode,
) -> Result<(f64, u32)> {
    if 2.0 * xi_hat * p.geom.distance_nm > SUPPRESSION_CUTOFF {
        return Ok((0.0, 0));
    }
    let ctx = FrequencyContext::new(p.geom, p.plane, p.sphere, xi_hat, ell_max, quad)?;
    let mut partial = 0.0;
    let mut small = 0;
    let mut used = 0;
    for m in 0..=ell_max {
        let value = match mode {
            Mode::LogDet => log_det_contribution(&ctx.block(m)?)?,
            Mode::Trace => -ctx.trace(m)?,
        };
        let term = if m == 0 { 0.5 * value } else { value };
        partial += term;
        used = m + 1;
        if term.abs() <= p.m_rel_cutoff * partial.abs() {
            small += 1;
            if small == 2 {
                break;
            }
        } else {
            small = 0;
        }
    }
    Ok((partial, used))
}

struct Quadrature {
    value: f64,
    m_used: u32,
    /// `(ξ̂, w · f)` per node, in node order.
    samples: Vec<(f64, f64)>,
}

fn integrate_xi(
    p: &Problem,
    num: &NumericsSpec,
    nodes: usize,
    ell_max: u32,
    mode: Mode,
    exec: Execution,
) -> Result<Quadrature> {
    let map = HalfLineMap {
        scale: num.xi_scale / p.geom.script_l(),
    };
    let rule = GaussLegendre::cached(nodes);
    let points: Vec<(f64, f64)> = rule
        .unit_interval()
        .map(|(u, w)| (map.point(u), w * map.jacobian(u)))
        .collect();
    let quad = QuadratureSpec { x_nodes: num.x_nodes };
    let results = parallel::map_ordered(exec, &points, |&(xi, _)| {
        frequency_integrand(p, xi, ell_max, &quad, mode)
    });
    let mut value = 0.0;
    let mut m_used = 0;
    let mut samples = Vec::with_capacity(points.len());
    for (&(xi, w), r) in points.iter().zip(results) {
        let (f, m) = r?;
        value += w * f;
        m_used = m_used.max(m);
        samples.push((xi, w * f));
    }
    Ok(Quadrature { value, m_used, samples })
}

fn energy(
    geom: &Geometry,
    plane: &MaterialModel,
    sphere: &MaterialModel,
    num: &NumericsSpec,
    mode: Mode,
    exec: Execution,
) -> Result<EnergyResult> {
    geom.validate()?;
    plane.validate()?;
    sphere.validate()?;
    num.validate()?;
    let p = Problem {
        geom,
        plane,
        sphere,
        m_rel_cutoff: num.m_rel_cutoff,
    };
    let ell_max = num.resolved_ell_max(geom);
    let main = integrate_xi(&p, num, num.xi_nodes, ell_max, mode, exec)?;

    let mut rel_err = 0.0;
    if num.refine && main.value != 0.0 {
        // frequency rule: compare with half the nodes
        let coarse = integrate_xi(&p, num, (num.xi_nodes / 2).max(2), ell_max, mode, exec)?;
        rel_err += ((main.value - coarse.value) / main.value).abs();
        // truncation and x rule: double both at the dominant node
        let (k, _) = main
            .samples
            .iter()
            .enumerate()
            .max_by(|a, b| a.1 .1.abs().partial_cmp(&b.1 .1.abs()).unwrap())
            .unwrap();
        let xi = main.samples[k].0;
        let base = QuadratureSpec { x_nodes: num.x_nodes };
        let fine = QuadratureSpec {
            x_nodes: 2 * num.x_nodes,
        };
        let big_ell = (2 * ell_max).min(crate::mie::MAX_ELL);
        let (f0, _) = frequency_integrand(&p, xi, ell_max, &base, mode)?;
        let (f1, _) = frequency_integrand(&p, xi, big_ell, &fine, mode)?;
        if f1 != 0.0 {
            rel_err += ((f1 - f0) / f1).abs();
        }
    }

    let natural = main.value / std::f64::consts::PI;
    let result = EnergyResult {
        energy_ev: natural * HBAR_C_EV_NM,
        energy_natural: natural,
        lmax_used: ell_max,
        m_used: main.m_used,
        nodes_used: num.xi_nodes,
        x_nodes_used: QuadratureSpec { x_nodes: num.x_nodes }.effective_nodes(ell_max),
        rel_err_estimate: rel_err,
        converged: rel_err <= num.target_rel_err,
    };
    if !result.energy_ev.is_finite() {
        return Err(Error::NonFinite("energy"));
    }
    Ok(result)
}

/// Exact energy, parallel over frequency nodes when the feature is enabled.
pub fn casimir_energy_exact(
    geom: &Geometry,
    plane: &MaterialModel,
    sphere: &MaterialModel,
    num: &NumericsSpec,
) -> Result<EnergyResult> {
    energy(geom, plane, sphere, num, Mode::LogDet, Execution::default())
}

pub fn casimir_energy_exact_with(
    geom: &Geometry,
    plane: &MaterialModel,
    sphere: &MaterialModel,
    num: &NumericsSpec,
    exec: Execution,
) -> Result<EnergyResult> {
    energy(geom, plane, sphere, num, Mode::LogDet, exec)
}

/// Single-round-trip energy `-(ħc/π) ∫ dξ̂ Σ'_m tr M^(m)`.
pub fn casimir_energy_perturbative(
    geom: &Geometry,
    plane: &MaterialModel,
    sphere: &MaterialModel,
    num: &NumericsSpec,
) -> Result<EnergyResult> {
    energy(geom, plane, sphere, num, Mode::Trace, Execution::default())
}

pub fn casimir_energy_perturbative_with(
    geom: &Geometry,
    plane: &MaterialModel,
    sphere: &MaterialModel,
    num: &NumericsSpec,
    exec: Execution,
) -> Result<EnergyResult> {
    energy(geom, plane, sphere, num, Mode::Trace, exec)
}

/// The integrand `Σ'_m ln det(I - M^(m))` at a single frequency, exposed for diagnostics.
pub fn frequency_integrand_exact(
    geom: &Geometry,
    plane: &MaterialModel,
    sphere: &MaterialModel,
    xi_hat: f64,
    num: &NumericsSpec,
) -> Result<f64> {
    let p = Problem {
        geom,
        plane,
        sphere,
        m_rel_cutoff: num.m_rel_cutoff,
    };
    let quad = QuadratureSpec { x_nodes: num.x_nodes };
    Ok(frequency_integrand(&p, xi_hat, num.resolved_ell_max(geom), &quad, Mode::LogDet)?.0)
}
