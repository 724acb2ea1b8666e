use super::*;
use crate::dirichlet::{newton_solve, BoundaryData, SolverOptions};
use crate::linalg::HermMatrix;
use crate::prodgrid::{HermitianField, ScalarField};
use crate::symcone::{EigenVector, OperatorSpec};
use alloc::vec;
use core::f64::consts::TAU;

fn omega() -> Metric {
    Metric::identity(2)
}

#[test]
fn zero_potential_gives_zero_ratios() {
    let g = ladder_grid(8).unwrap();
    let u = ScalarField::constant(&g, 0.0);
    assert_eq!(boundary_estimate_ratio(&u, &g, &omega()).unwrap(), 0.0);
    assert_eq!(global_second_ratio(&u, &g, &omega()).unwrap(), 0.0);
}

#[test]
fn trivial_geodesic_has_zero_boundary_ratio() {
    let g = ladder_grid(8).unwrap();
    let u = ScalarField::from_fn(&g, |x| 0.7 * x[2]);
    assert!(boundary_estimate_ratio(&u, &g, &omega()).unwrap().abs() < 1e-12);
    assert!(global_second_ratio(&u, &g, &omega()).unwrap().abs() < 1e-12);
}

#[test]
fn quadratic_in_s_has_global_ratio_at_most_one() {
    // constant Hessian: interior and boundary norms agree
    let g = ladder_grid(8).unwrap();
    let u = ScalarField::from_fn(&g, |x| 0.3 * x[2] * x[2]);
    let r = global_second_ratio(&u, &g, &omega()).unwrap();
    assert!(r > 0.0 && r <= 1.0, "{r}");
}

#[test]
fn ratios_ignore_constants() {
    let m = manufactured(OperatorSpec::log_ma(2).unwrap(), 8, 3, PsiMode::SameGrid).unwrap();
    let g = &m.problem.grid;
    let shifted = ScalarField::new(m.exact.values().iter().map(|v| v + 5.0).collect());
    for (a, b) in [
        (boundary_estimate_ratio(&m.exact, g, &omega()).unwrap(), boundary_estimate_ratio(&shifted, g, &omega()).unwrap()),
        (global_second_ratio(&m.exact, g, &omega()).unwrap(), global_second_ratio(&shifted, g, &omega()).unwrap()),
    ] {
        assert!((a - b).abs() <= 1e-9 * a.abs().max(1.0), "{a} {b}");
    }
}

#[test]
fn guan_closed_form_pair() {
    let lm = OperatorSpec::log_ma(2).unwrap();
    let slack = guan_slack(&lm, &[1.0, 1.0], &[4.0, 0.25], 0.5).unwrap().unwrap();
    // (2.25) / (1 + 1/4 + 4)
    assert!((slack - 2.25 / 5.25).abs() < 1e-14, "{slack}");
    assert_eq!(guan_slack(&lm, &[1.0, 1.0], &[1.0, 1.0], 0.1).unwrap(), None);
    assert_eq!(guan_slack(&lm, &[1.0, 1.0], &[3.0, 3.0], 0.1).unwrap(), None);
}

#[test]
fn guan_probe_is_positive_for_every_family() {
    for n in [2, 3] {
        let mu = EigenVector::new(vec![1.0; n]).unwrap();
        let ops = [OperatorSpec::log_ma(n).unwrap(), OperatorSpec::sigma_k_root(2, n).unwrap(), OperatorSpec::hessian_quotient(2, 1, n).unwrap()];
        for op in ops {
            for beta in [0.1, 0.5] {
                let probe = guan_inequality_probe(&op, &mu, beta, 2000, 11).unwrap();
                assert!(probe.accepted > 0 && probe.positive(), "{op:?} {beta} {probe:?}");
            }
        }
    }
    let lm = OperatorSpec::log_ma(2).unwrap();
    let outside = EigenVector::new(vec![1.0, -1.0]).unwrap();
    assert_eq!(guan_inequality_probe(&lm, &outside, 0.1, 10, 0), Err(Error::OutsideCone));
    let far = guan_inequality_probe(&lm, &EigenVector::new(vec![1.0, 1.0]).unwrap(), 10.0, 50, 0).unwrap();
    assert_eq!(far.eps_hat, None);
}

#[test]
fn identity_metric_has_unit_margin() {
    let g = ladder_grid(8).unwrap();
    for op in [OperatorSpec::log_ma(2).unwrap(), OperatorSpec::sigma_k_root(2, 2).unwrap()] {
        let chi = HermitianField::constant(g.len(), &HermMatrix::identity(2));
        let prob = DirichletProblem::new(op, g.clone(), chi, omega(), ScalarField::constant(&g, 0.0), BoundaryData::constant(&g, 0.0, 0.0)).unwrap();
        let margin = admissibility_margin_field(&ScalarField::constant(&g, 0.0), &prob).unwrap();
        assert!(margin.values().iter().all(|m| (m - 1.0).abs() < 1e-14));
    }
}

#[test]
fn geodesic_margin_tracks_the_lift() {
    let c = 0.7;
    let prob = geodesic_problem(8, c).unwrap();
    for eps in [1e-1, 1e-2, 1e-3] {
        let u = geodesic_exact(&prob.grid, c, eps);
        let m = admissibility_margin_field(&u, &prob).unwrap();
        assert!(m.values().iter().all(|v| (v - eps * eps).abs() < 1e-12 * 1e2), "{eps}");
        let lifted = prob.lifted(eps);
        let r = newton_solve(&lifted, &u, &SolverOptions::default()).unwrap();
        assert_eq!(r.newton_iters, vec![0]);
    }
}

#[test]
fn analytic_and_discrete_psi_agree_to_truncation() {
    let lm = OperatorSpec::log_ma(2).unwrap();
    let coarse = |res| {
        let a = manufactured(lm, res, 2, PsiMode::SameGrid).unwrap();
        let b = manufactured(lm, res, 2, PsiMode::Analytic).unwrap();
        a.problem.psi.sup_distance(&b.problem.psi)
    };
    let (e8, e16) = (coarse(8), coarse(16));
    assert!(e16 < e8 / 3.0, "{e8} {e16}");
    // the continuous Hessian of the closed form
    let m = manufactured(lm, 8, 1, PsiMode::Analytic).unwrap();
    let a = m.amplitude;
    let node = m.problem.grid.node_on_line(0, 3);
    let mut c = vec![0.0; 4];
    m.problem.grid.coords(node, &mut c);
    let x = TAU * c[0];
    let t = TAU * c[3];
    let h11 = 0.25 * -TAU * TAU * a * (libm::cos(x) + 0.5 * libm::sin(x) * libm::sin(t));
    let h22 = 0.25 * (1.0 - TAU * TAU * a * (libm::cos(t) + 0.5 * libm::sin(x) * libm::sin(t)));
    // the off-diagonal entry is ¼ u_xθ times i
    let h12 = 0.25 * 0.5 * TAU * TAU * a * libm::cos(x) * libm::cos(t);
    let det = (1.0 + h11) * (1.0 + h22) - h12 * h12;
    assert!((m.problem.psi[node] - libm::log(det)).abs() < 1e-12, "{}", m.problem.psi[node]);
}

#[test]
fn probe_rows_and_verdict() {
    let mut p = EstimateProbe::new("demo");
    let row = |resolution, b, g| ProbeRow { resolution, ratio_boundary: b, ratio_global: g, margin_min: 0.5 };
    p.push(row(16, 0.20, 0.5)).unwrap();
    p.push(row(16, 0.30, 0.4)).unwrap();
    p.push(row(32, 0.31, 0.5)).unwrap();
    assert!(p.verdict().is_err());
    p.push(row(64, 0.33, 0.56)).unwrap();
    assert!(p.push(row(32, 0.1, 0.1)).is_err());
    assert!(p.push(row(128, f64::NAN, 0.1)).is_err());
    assert_eq!(p.ladder(), vec![16, 32, 64]);
    let v = p.verdict().unwrap();
    assert!(v.boundary_bounded && !v.global_bounded);
    let mut zero = EstimateProbe::new("zero");
    for res in [16, 32, 64] {
        zero.push(row(res, 0.0, 1e-12 * res as f64)).unwrap();
    }
    assert!(zero.verdict().unwrap().bounded());
}
