//! Curve post-processing: force, logarithmic slopes and approximation ratios.

use serde::{Deserialize, Serialize};

use crate::asymptotic::{self, Coefficients};
use crate::energy::{self, Geometry, NumericsSpec};
use crate::error::{Error, Result};
use crate::material::MaterialModel;
use crate::parallel::{self, Execution};

/// Multiplicative radius step `e^{±h}` used by [`slope_mu`].
pub const MU_LOG_STEP: f64 = 0.05;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CurvePoint {
    /// L or R in nm.
    pub abscissa: f64,
    pub energy_ev: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Curve {
    pub points: Vec<CurvePoint>,
}

impl Curve {
    pub fn new(points: Vec<CurvePoint>) -> Result<Self> {
        if points.windows(2).any(|w| !(w[1].abscissa > w[0].abscissa)) {
            return Err(Error::invalid("curve abscissas must be strictly increasing"));
        }
        if points.iter().any(|p| !(p.abscissa > 0.0)) {
            return Err(Error::invalid("curve abscissas must be positive"));
        }
        Ok(Curve { points })
    }

    pub fn from_fn(abscissas: &[f64], mut f: impl FnMut(f64) -> f64) -> Result<Self> {
        Curve::new(
            abscissas
                .iter()
                .map(|&a| CurvePoint {
                    abscissa: a,
                    energy_ev: f(a),
                })
                .collect(),
        )
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

/// `n` log-spaced points from `lo` to `hi` inclusive.
pub fn log_grid(lo: f64, hi: f64, n: usize) -> Result<Vec<f64>> {
    if !(lo > 0.0 && hi > lo && n >= 2) {
        return Err(Error::invalid(format!(
            "log grid needs 0 < lo < hi and n >= 2 (got {lo}, {hi}, {n})"
        )));
    }
    let (a, b) = (lo.ln(), hi.ln());
    Ok((0..n)
        .map(|i| match i {
            0 => lo,
            i if i == n - 1 => hi,
            i => (a + (b - a) * i as f64 / (n - 1) as f64).exp(),
        })
        .collect())
}

/// `d ln|E| / d ln a` at every point: three-point differences on the
/// nonuniform log grid, one-sided at the ends. Exact for pure power laws.
fn log_derivative(curve: &Curve) -> Result<Vec<f64>> {
    let n = curve.len();
    if n < 3 {
        return Err(Error::invalid("slopes need at least three points"));
    }
    let mut t = Vec::with_capacity(n);
    let mut f = Vec::with_capacity(n);
    for p in &curve.points {
        if !(p.energy_ev < 0.0) {
            return Err(Error::invalid(format!(
                "energy must be negative, got {} at {}",
                p.energy_ev, p.abscissa
            )));
        }
        t.push(p.abscissa.ln());
        f.push((-p.energy_ev).ln());
    }
    let three = |i0: usize, at: usize| {
        let (x0, x1, x2) = (t[i0], t[i0 + 1], t[i0 + 2]);
        let x = t[at];
        // derivative of the interpolating parabola through three points
        let l0 = (2.0 * x - x1 - x2) / ((x0 - x1) * (x0 - x2));
        let l1 = (2.0 * x - x0 - x2) / ((x1 - x0) * (x1 - x2));
        let l2 = (2.0 * x - x0 - x1) / ((x2 - x0) * (x2 - x1));
        l0 * f[i0] + l1 * f[i0 + 1] + l2 * f[i0 + 2]
    };
    Ok((0..n)
        .map(|i| match i {
            0 => three(0, 0),
            i if i == n - 1 => three(n - 3, n - 1),
            i => three(i - 1, i),
        })
        .collect())
}

/// `ν = -∂ln|E|/∂ln L` for a curve sampled in `L`.
///
/// `|E|` must decrease along the curve; a rise is reported as
/// [`Error::NonMonotonic`] at the offending distance.
pub fn slope_nu(curve: &Curve) -> Result<Vec<(f64, f64)>> {
    for w in curve.points.windows(2) {
        if w[1].energy_ev.abs() >= w[0].energy_ev.abs() {
            return Err(Error::NonMonotonic(w[1].abscissa));
        }
    }
    let d = log_derivative(curve)?;
    Ok(curve.points.iter().zip(d).map(|(p, d)| (p.abscissa, -d)).collect())
}

/// Force `F = -∂E/∂L = ν E / L` (eV/nm) from a curve and its slopes.
pub fn force(curve: &Curve, nu: &[(f64, f64)]) -> Vec<f64> {
    curve
        .points
        .iter()
        .zip(nu)
        .map(|(p, &(_, v))| v * p.energy_ev / p.abscissa)
        .collect()
}

/// `μ = ∂ln|E|/∂ln R` by a centred difference at `R e^{±h}`.
pub fn slope_mu(mut energy_of_radius: impl FnMut(f64) -> Result<f64>, radius_nm: f64, h: f64) -> Result<f64> {
    if !(radius_nm > 0.0 && h > 0.0) {
        return Err(Error::invalid("slope_mu needs positive radius and step"));
    }
    let lo = energy_of_radius(radius_nm * (-h).exp())?;
    let hi = energy_of_radius(radius_nm * h.exp())?;
    if !(lo < 0.0 && hi < 0.0) {
        return Err(Error::invalid("energies must be negative for a log slope"));
    }
    Ok(((-hi).ln() - (-lo).ln()) / (2.0 * h))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RatioPoint {
    pub distance_nm: f64,
    pub energy_ev: f64,
    /// `E / Ē_CP`
    pub ratio_cp: f64,
    /// `E / Ē_vdW`
    pub ratio_vdw: f64,
    pub converged: bool,
}

/// Ratios of given energies to the Hamaker expressions at fixed radius.
pub fn ratios_from_energies(coeff: &Coefficients, radius_nm: f64, points: &[(f64, f64, bool)]) -> Vec<RatioPoint> {
    points
        .iter()
        .map(|&(l, e, converged)| {
            let (hv, hc) = asymptotic::hamaker_energies(coeff, radius_nm, l);
            RatioPoint {
                distance_nm: l,
                energy_ev: e,
                ratio_cp: e / hc,
                ratio_vdw: e / hv,
                converged,
            }
        })
        .collect()
}

/// Exact energies over a distance grid and their ratios to `Ē_CP` and `Ē_vdW`.
pub fn ratio_curves(
    radius_nm: f64,
    distances_nm: &[f64],
    plane: &MaterialModel,
    sphere: &MaterialModel,
    num: &NumericsSpec,
    coeff: &Coefficients,
) -> Result<Vec<RatioPoint>> {
    let results = parallel::map_ordered(Execution::default(), distances_nm, |&l| {
        let g = Geometry::new(radius_nm, l)?;
        energy::casimir_energy_exact(&g, plane, sphere, num)
    });
    let mut pts = Vec::with_capacity(results.len());
    for (&l, r) in distances_nm.iter().zip(results) {
        let r = r?;
        pts.push((l, r.energy_ev, r.converged));
    }
    Ok(ratios_from_energies(coeff, radius_nm, &pts))
}
