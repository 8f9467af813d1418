//! Quadrature rules: Gauss-Legendre, Gauss-Laguerre (with log-weights so that
//! orders of a few hundred stay representable), and an adaptive
//! Gauss-Kronrod integrator used by the oracle paths.

use std::collections::HashMap;
use std::f64::consts::PI;
use std::sync::{Arc, Mutex, OnceLock};

use nalgebra::{DMatrix, SymmetricEigen};

use crate::error::{Error, Result};

/// Gauss-Legendre rule on `[-1, 1]`.
#[derive(Debug, Clone)]
pub struct GaussLegendre {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl GaussLegendre {
    /// Rule with `n` nodes, cached process-wide.
    pub fn cached(n: usize) -> Arc<GaussLegendre> {
        static CACHE: OnceLock<Mutex<HashMap<usize, Arc<GaussLegendre>>>> = OnceLock::new();
        let cache = CACHE.get_or_init(Default::default);
        let mut map = cache.lock().unwrap();
        map.entry(n).or_insert_with(|| Arc::new(GaussLegendre::new(n))).clone()
    }

    pub fn new(n: usize) -> GaussLegendre {
        assert!(n >= 1, "Gauss-Legendre needs at least one node");
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        let m = n.div_ceil(2);
        for i in 0..m {
            // Tricomi initial guess, then Newton on P_n.
            let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (p, d) = legendre_p_and_derivative(n, x);
                dp = d;
                let dx = p / d;
                x -= dx;
                if dx.abs() <= 1e-16 * x.abs().max(1e-300) {
                    break;
                }
            }
            let (_, d) = legendre_p_and_derivative(n, x);
            if d.is_finite() {
                dp = d;
            }
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            nodes[i] = -x;
            nodes[n - 1 - i] = x;
            weights[i] = w;
            weights[n - 1 - i] = w;
        }
        if n % 2 == 1 {
            nodes[n / 2] = 0.0;
        }
        GaussLegendre { nodes, weights }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Nodes and weights mapped to the open unit interval `(0, 1)`.
    pub fn unit_interval(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(&x, &w)| (0.5 * (x + 1.0), 0.5 * w))
    }

    /// Integrate `f` over `[a, b]`.
    pub fn integrate<F: FnMut(f64) -> f64>(&self, a: f64, b: f64, mut f: F) -> f64 {
        let half = 0.5 * (b - a);
        let mid = 0.5 * (b + a);
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(&x, &w)| w * f(mid + half * x))
            .sum::<f64>()
            * half
    }
}

fn legendre_p_and_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=n {
        let k = k as f64;
        let p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
    }
    if n == 0 {
        return (1.0, 0.0);
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// Gauss-Laguerre rule for `∫₀^∞ e^{-y} g(y) dy ≈ Σ w_k g(y_k)`.
///
/// Weights are stored as `ln w_k`: for orders beyond ~150 the outer weights
/// underflow while the integrands they multiply (polynomials of comparable
/// degree) do not.
#[derive(Debug, Clone)]
pub struct GaussLaguerre {
    pub nodes: Vec<f64>,
    pub ln_weights: Vec<f64>,
}

impl GaussLaguerre {
    pub fn cached(n: usize) -> Arc<GaussLaguerre> {
        static CACHE: OnceLock<Mutex<HashMap<usize, Arc<GaussLaguerre>>>> = OnceLock::new();
        let cache = CACHE.get_or_init(Default::default);
        if let Some(rule) = cache.lock().unwrap().get(&n) {
            return rule.clone();
        }
        // Build outside the lock; a concurrent duplicate build is harmless.
        let rule = Arc::new(GaussLaguerre::new(n));
        cache.lock().unwrap().entry(n).or_insert(rule).clone()
    }

    pub fn new(n: usize) -> GaussLaguerre {
        assert!(n >= 1, "Gauss-Laguerre needs at least one node");
        // Golub-Welsch for the starting nodes, Newton polish on L_n.
        let mut jacobi = DMatrix::<f64>::zeros(n, n);
        for i in 0..n {
            jacobi[(i, i)] = 2.0 * i as f64 + 1.0;
            if i + 1 < n {
                jacobi[(i, i + 1)] = i as f64 + 1.0;
                jacobi[(i + 1, i)] = i as f64 + 1.0;
            }
        }
        let mut guesses: Vec<f64> = SymmetricEigen::new(jacobi).eigenvalues.iter().copied().collect();
        guesses.sort_by(|a, b| a.partial_cmp(b).unwrap());

        let mut nodes = Vec::with_capacity(n);
        let mut ln_weights = Vec::with_capacity(n);
        for mut y in guesses {
            y = y.max(1e-300);
            for _ in 0..50 {
                let (ln, lnm1, _) = scaled_laguerre(n, y);
                // L_n' = n (L_n - L_{n-1}) / y, so the Newton step is scale-free.
                let step = y * ln / (n as f64 * (ln - lnm1));
                let next = y - step;
                y = if next > 0.0 { next } else { 0.5 * y };
                if step.abs() <= 4e-16 * y {
                    break;
                }
            }
            let (_, lnm1, scale) = scaled_laguerre(n, y);
            // w = 1 / (y L_n'(y)^2) with L_n(y) = 0, i.e. L_n' = -n L_{n-1} / y.
            let ln_w = y.ln() - 2.0 * (n as f64).ln() - 2.0 * (lnm1.abs().ln() + scale);
            nodes.push(y);
            ln_weights.push(ln_w);
        }
        GaussLaguerre { nodes, ln_weights }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }
}

/// `(L_n(y), L_{n-1}(y), s)` with both polynomial values multiplied by `e^{-s}`.
fn scaled_laguerre(n: usize, y: f64) -> (f64, f64, f64) {
    let mut prev = 1.0;
    let mut cur = 1.0 - y;
    let mut scale = 0.0;
    if n == 1 {
        return (cur, prev, scale);
    }
    for k in 1..n {
        let k = k as f64;
        let next = ((2.0 * k + 1.0 - y) * cur - k * prev) / (k + 1.0);
        prev = cur;
        cur = next;
        let big = cur.abs().max(prev.abs());
        if big > 1e150 {
            cur *= 1e-150;
            prev *= 1e-150;
            scale += 150.0 * std::f64::consts::LN_10;
        }
    }
    (cur, prev, scale)
}

/// Map from the unit interval to the half line, `v = scale · u / (1 - u)`.
#[derive(Debug, Clone, Copy)]
pub struct HalfLineMap {
    pub scale: f64,
}

impl HalfLineMap {
    pub fn point(&self, u: f64) -> f64 {
        self.scale * u / (1.0 - u)
    }

    pub fn jacobian(&self, u: f64) -> f64 {
        self.scale / ((1.0 - u) * (1.0 - u))
    }
}

// QUADPACK G7-K15 tables with their full digits
#[allow(clippy::excessive_precision)]
const GK_XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_845_693_013,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.000_000_000_000_000_000_000_000_000_000_000,
];
#[allow(clippy::excessive_precision)]
const GK_WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];
#[allow(clippy::excessive_precision)]
const GK_WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

fn gauss_kronrod_15<F: FnMut(f64) -> f64>(f: &mut F, a: f64, b: f64) -> (f64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut kronrod = fc * GK_WGK[7];
    let mut gauss = fc * GK_WG[3];
    for j in 0..7 {
        let dx = h * GK_XGK[j];
        let s = f(c - dx) + f(c + dx);
        kronrod += GK_WGK[j] * s;
        if j % 2 == 1 {
            gauss += GK_WG[j / 2] * s;
        }
    }
    (kronrod * h, ((kronrod - gauss) * h).abs())
}

/// Globally adaptive Gauss-Kronrod (7/15) on a finite interval.
pub fn adaptive_integrate<F: FnMut(f64) -> f64>(mut f: F, a: f64, b: f64, rel_tol: f64, abs_tol: f64) -> Result<f64> {
    let mut intervals = vec![{
        let (v, e) = gauss_kronrod_15(&mut f, a, b);
        (a, b, v, e)
    }];
    for _ in 0..2000 {
        let total: f64 = intervals.iter().map(|s| s.2).sum();
        let err: f64 = intervals.iter().map(|s| s.3).sum();
        if !total.is_finite() {
            return Err(Error::NonFinite("adaptive quadrature"));
        }
        if err <= abs_tol.max(rel_tol * total.abs()) {
            return Ok(total);
        }
        let (idx, _) = intervals
            .iter()
            .enumerate()
            .max_by(|x, y| x.1 .3.partial_cmp(&y.1 .3).unwrap())
            .unwrap();
        let (lo, hi, _, _) = intervals.swap_remove(idx);
        let mid = 0.5 * (lo + hi);
        let (v1, e1) = gauss_kronrod_15(&mut f, lo, mid);
        let (v2, e2) = gauss_kronrod_15(&mut f, mid, hi);
        intervals.push((lo, mid, v1, e1));
        intervals.push((mid, hi, v2, e2));
    }
    let total: f64 = intervals.iter().map(|s| s.2).sum();
    let err: f64 = intervals.iter().map(|s| s.3).sum();
    Err(Error::Quadrature {
        context: "adaptive Gauss-Kronrod",
        rel_change: err / total.abs(),
        tolerance: rel_tol,
    })
}

/// Adaptive integral over `[0, ∞)` through `v = scale · u / (1 - u)`.
pub fn adaptive_integrate_half_line<F: FnMut(f64) -> f64>(
    mut f: F,
    scale: f64,
    rel_tol: f64,
    abs_tol: f64,
) -> Result<f64> {
    let map = HalfLineMap { scale };
    adaptive_integrate(
        |u| {
            if u >= 1.0 {
                return 0.0;
            }
            let v = f(map.point(u)) * map.jacobian(u);
            if v.is_finite() {
                v
            } else {
                0.0
            }
        },
        0.0,
        1.0,
        rel_tol,
        abs_tol,
    )
}
