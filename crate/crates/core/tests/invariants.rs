use casimir_scatter::analysis::{self, Curve};
use casimir_scatter::asymptotic;
use casimir_scatter::energy::{self, Geometry, NumericsSpec};
use casimir_scatter::{MaterialModel, Result};

fn materials() -> (MaterialModel, MaterialModel) {
    (MaterialModel::copper(), MaterialModel::diamond())
}

fn exact(r: f64, l: f64, num: &NumericsSpec) -> Result<f64> {
    let (p, s) = materials();
    Ok(energy::casimir_energy_exact(&Geometry::new(r, l)?, &p, &s, num)?.energy_ev)
}

#[test]
fn truncation_is_stable_at_the_policy() {
    let base = NumericsSpec {
        refine: false,
        ..NumericsSpec::default()
    };
    for (r, l) in [(5.0, 1.0), (20.0, 10.0), (2.0, 1.0)] {
        let g = Geometry::new(r, l).unwrap();
        let lmax = base.resolved_ell_max(&g);
        let e1 = exact(r, l, &base).unwrap();
        let e2 = exact(
            r,
            l,
            &NumericsSpec {
                ell_max: Some(2 * lmax),
                ..base.clone()
            },
        )
        .unwrap();
        assert!((e2 / e1 - 1.0).abs() < 1e-3, "R={r} L={l}: {e1} vs {e2}");
    }
}

#[test]
fn quadrature_is_stable_at_defaults() {
    let base = NumericsSpec {
        refine: false,
        ..NumericsSpec::default()
    };
    let doubled = NumericsSpec {
        xi_nodes: 2 * base.xi_nodes,
        x_nodes: 2 * base.x_nodes,
        ..base.clone()
    };
    for (r, l) in [(10.0, 1.0), (10.0, 30.0), (2.0, 500.0)] {
        let (a, b) = (exact(r, l, &base).unwrap(), exact(r, l, &doubled).unwrap());
        assert!((b / a - 1.0).abs() < 1e-4, "R={r} L={l}: {a} vs {b}");
    }
}

#[test]
fn refinement_estimate_reports_convergence() {
    let (p, s) = materials();
    let e = energy::casimir_energy_exact(&Geometry::new(10.0, 3.0).unwrap(), &p, &s, &NumericsSpec::default()).unwrap();
    assert!(e.converged);
    assert!(e.rel_err_estimate > 0.0 && e.rel_err_estimate < 1e-4);
    assert_eq!(e.energy_natural * casimir_scatter::HBAR_C_EV_NM, e.energy_ev);
}

/// Exact, single-round-trip and point-dipole energies converge on each other
/// as the sphere shrinks relative to its distance from the plane.
#[test]
fn exact_perturbative_dipole_agree_for_small_spheres() {
    let (p, s) = materials();
    let num = NumericsSpec::default();
    let mut last_spread = 0.0;
    for l in [20.0, 50.0, 100.0, 200.0].iter().rev() {
        let g = Geometry::new(1.0, *l).unwrap();
        let ex = energy::casimir_energy_exact(&g, &p, &s, &num).unwrap().energy_ev;
        let pt = energy::casimir_energy_perturbative(&g, &p, &s, &num).unwrap().energy_ev;
        let dp = asymptotic::casimir_polder_integral_at(g.script_l(), 1.0, &p, &s, &num).unwrap();
        let spread = [(ex / pt - 1.0).abs(), (ex / dp - 1.0).abs(), (pt / dp - 1.0).abs()]
            .into_iter()
            .fold(0.0, f64::max);
        if 1.0 / l < 0.02 {
            assert!(spread < 0.02, "L={l}: spread {spread}");
        }
        // walking from large to small L the disagreement only grows
        assert!(spread > last_spread, "L={l}: {spread} <= {last_spread}");
        last_spread = spread;
    }
}

#[test]
fn energy_decreases_in_magnitude_with_distance() {
    let num = NumericsSpec::default();
    for r in [2.0, 20.0] {
        let grid = analysis::log_grid(1.0, 500.0, 12).unwrap();
        let c = Curve::from_fn(&grid, |l| exact(r, l, &num).unwrap()).unwrap();
        assert!(c.points.iter().all(|p| p.energy_ev < 0.0));
        // slope_nu rejects curves where |E| does not fall
        for (_, nu) in analysis::slope_nu(&c).unwrap() {
            assert!(nu > 0.5 && nu < 4.5, "R={r}: nu {nu}");
        }
    }
}

#[test]
fn grid_refinement_moves_slopes_little() {
    let num = NumericsSpec::default();
    let coarse = analysis::log_grid(1.0, 500.0, 16).unwrap();
    let fine = analysis::log_grid(1.0, 500.0, 31).unwrap();
    let nu = |g: &[f64]| analysis::slope_nu(&Curve::from_fn(g, |l| exact(2.0, l, &num).unwrap()).unwrap()).unwrap();
    let (a, b) = (nu(&coarse), nu(&fine));
    // every coarse point is also on the fine grid
    for (i, &(l, v)) in a.iter().enumerate() {
        let (lf, vf) = b[2 * i];
        assert!((lf / l - 1.0).abs() < 1e-12);
        assert!((v - vf).abs() < 0.02, "L={l}: {v} vs {vf}");
    }
}

#[test]
fn sphere_vanishes_in_vacuum() {
    let g = Geometry::new(5.0, 5.0).unwrap();
    let e = energy::casimir_energy_exact(
        &g,
        &MaterialModel::copper(),
        &MaterialModel::Vacuum,
        &NumericsSpec::default(),
    )
    .unwrap();
    assert_eq!(e.energy_ev, 0.0);
}

/// At short distance the exact energy tends to the proximity-force result.
#[test]
fn proximity_force_limit() {
    let (p, s) = materials();
    let num = NumericsSpec::default();
    let r = 20.0;
    let mut ratios = Vec::new();
    for l in [2.0, 1.0] {
        let (e_pfa, _) = asymptotic::pfa_energy_and_c3prime(&p, &s, r, l, &num).unwrap();
        ratios.push(exact(r, l, &num).unwrap() / e_pfa);
    }
    assert!(ratios.iter().all(|x| *x > 0.7 && *x < 1.0), "{ratios:?}");
    assert!((ratios[1] - 1.0).abs() < (ratios[0] - 1.0).abs(), "{ratios:?}");
}
