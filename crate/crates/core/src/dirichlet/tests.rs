use super::*;
use crate::prodgrid::{boundary_normal_derivative, build_grid, laplacian_and_gradient, GridConfig};
use alloc::vec;
use core::f64::consts::TAU;

fn small_grid() -> ProductGrid {
    build_grid(&GridConfig { p: 1, torus_res: vec![8, 4], s_res: 9, theta_res: 8 }).unwrap()
}

fn flat(grid: &ProductGrid, d: &[f64]) -> HermitianField {
    HermitianField::constant(grid.len(), &HermMatrix::from_real_diagonal(d))
}

fn problem(op: OperatorSpec, grid: &ProductGrid, chi: &[f64], psi: ScalarField, phi: BoundaryData) -> DirichletProblem {
    DirichletProblem::new(op, grid.clone(), flat(grid, chi), Metric::identity(grid.n()), psi, phi).unwrap()
}

#[test]
fn poisson_on_the_cylinder() {
    let opts = SolverOptions::default();
    for (s_res, t_res) in [(16, 16), (33, 12)] {
        let h = solve_poisson_s(s_res, t_res, 1.0, &opts).unwrap();
        let mut err: f64 = 0.0;
        for i in 0..s_res {
            let s = i as f64 / (s_res - 1) as f64;
            for j in 0..t_res {
                err = err.max((h.at(i, j) - 2.0 * s * (s - 1.0)).abs());
            }
        }
        assert!(err < 1e-10, "{err}");
    }
    let zero = solve_poisson_s(16, 8, 0.0, &opts).unwrap();
    assert!(zero.values.iter().all(|v| *v == 0.0));
    let g = build_grid(&GridConfig { p: 1, torus_res: vec![4], s_res: 16, theta_res: 8 }).unwrap();
    let h = solve_poisson_s(16, 8, 1.0, &opts).unwrap().lift(&g).unwrap();
    let nd = boundary_normal_derivative(&h, &g).unwrap();
    assert!(nd.values.iter().all(|v| (v + 2.0).abs() < 1e-8));
}

#[test]
fn subsolution_examples() {
    let g = small_grid();
    let opts = SolverOptions::default();
    let s2 = OperatorSpec::sigma_k_root(2, 2).unwrap();
    let zero_phi = BoundaryData::constant(&g, 0.0, 0.0);
    let prob = problem(s2, &g, &[1.0, 0.0], ScalarField::constant(&g, 1.0), zero_phi.clone());
    let sub = construct_subsolution(&prob, 0.1, &opts).unwrap();
    assert!(sub.t_star >= 1.21 && sub.t_star <= 1.21 * 1.05, "{}", sub.t_star);
    assert!(sub.margin >= 0.1 - 1e-12);
    assert!(sub.h_normal_max < 0.0);
    for v in g.boundary_nodes() {
        assert_eq!(sub.u_sub[v], 0.0);
    }

    let easy = problem(s2, &g, &[1.0, 1.0], ScalarField::constant(&g, 0.5), zero_phi.clone());
    let sub = construct_subsolution(&easy, 0.1, &opts).unwrap();
    assert_eq!(sub.t_star, 0.0);
    assert_eq!(sub.u_sub.sup_norm(), 0.0);

    let hopeless = problem(s2, &g, &[0.0, 0.0], ScalarField::constant(&g, 1.0), zero_phi);
    assert!(matches!(construct_subsolution(&hopeless, 0.1, &opts), Err(Error::NoSubsolution { .. })));
}

#[test]
fn supersolution_examples() {
    let g = small_grid();
    let opts = SolverOptions::default();
    let lm = OperatorSpec::log_ma(2).unwrap();
    let zero_phi = BoundaryData::constant(&g, 0.0, 0.0);
    let p0 = problem(lm, &g, &[0.0, 0.0], ScalarField::constant(&g, 0.0), zero_phi.clone());
    assert_eq!(solve_supersolution(&p0, &opts).unwrap().sup_norm(), 0.0);

    let p1 = problem(lm, &g, &[1.0, 1.0], ScalarField::constant(&g, 0.0), zero_phi);
    let up = solve_supersolution(&p1, &opts).unwrap();
    let exact = ScalarField::from_fn(&g, |c| 4.0 * c[2] * (1.0 - c[2]));
    assert!(up.sup_distance(&exact) < 1e-10, "{}", up.sup_distance(&exact));

    // generic χ and boundary data: plug back into the discrete operator
    let chi = HermitianField::constant(
        g.len(),
        &HermMatrix::from_rows(2, vec![
            num_complex::Complex64::new(1.5, 0.0),
            num_complex::Complex64::new(0.2, 0.3),
            num_complex::Complex64::new(0.2, -0.3),
            num_complex::Complex64::new(0.7, 0.0),
        ])
        .unwrap(),
    );
    let omega = Metric::new(HermMatrix::from_real_diagonal(&[1.0, 2.0])).unwrap();
    let phi = BoundaryData::from_fn(&g, |c| libm::sin(TAU * c[0]) * 0.1 + c[2] * libm::cos(TAU * c[3]));
    let p2 = DirichletProblem::new(lm, g.clone(), chi, omega.clone(), ScalarField::constant(&g, 0.0), phi.clone()).unwrap();
    let up = solve_supersolution(&p2, &opts).unwrap();
    let (lap, _) = laplacian_and_gradient(&up, &g, &omega).unwrap();
    let tr = omega.trace_of(&p2.chi.matrix(0));
    for v in 0..g.len() {
        if g.is_boundary(v) {
            continue;
        }
        assert!((lap[v] + tr).abs() < 1e-9 * (1.0 + tr.abs()), "{}", lap[v] + tr);
    }
    assert!(BoundaryData::from_field(&g, &up).sup_distance(&phi) < 1e-15);
}

#[test]
fn newton_examples() {
    let g = small_grid();
    let opts = SolverOptions::default();
    let lm = OperatorSpec::log_ma(2).unwrap();
    let psi = ScalarField::constant(&g, libm::log(2.0) + libm::log(3.0));
    let p = problem(lm, &g, &[2.0, 3.0], psi, BoundaryData::constant(&g, 0.0, 0.0));
    let r = newton_solve(&p, &ScalarField::constant(&g, 0.0), &opts).unwrap();
    assert_eq!(r.newton_iters, vec![0]);
    assert_eq!(r.u.sup_norm(), 0.0);

    // −s(1−s)·10 makes λ_2 = 3 − 5 < 0
    let bad = ScalarField::from_fn(&g, |c| -10.0 * c[2] * (c[2] - 1.0));
    assert!(matches!(newton_solve(&p, &bad, &opts), Err(Error::Precondition(_))));
}

fn manufactured(op: OperatorSpec, g: &ProductGrid) -> (DirichletProblem, ScalarField) {
    let u_star = ScalarField::from_fn(g, |c| 0.1 * (libm::cos(TAU * c[0]) + libm::cos(TAU * c[3]) + c[2] * c[2]));
    let id = flat(g, &[1.0, 1.0]);
    let psi = operator_values(&op, g, &id, &Metric::identity(2), &u_star).unwrap();
    let phi = BoundaryData::from_field(g, &u_star);
    (problem(op, g, &[1.0, 1.0], psi, phi), u_star)
}

#[test]
fn manufactured_solutions_are_recovered() {
    let g = small_grid();
    let opts = SolverOptions::default();
    for op in [OperatorSpec::log_ma(2).unwrap(), OperatorSpec::sigma_k_root(2, 2).unwrap()] {
        let (p, u_star) = manufactured(op, &g);
        let sub = construct_subsolution(&p, opts.margin_target, &opts).unwrap();
        let r = continuity_solve(&p, &sub, &opts).unwrap();
        assert!(r.residual_sup < 1e-9);
        assert_eq!(*r.t_path.last().unwrap(), 1.0);
        assert!(r.u.sup_distance(&u_star) < 1e-8, "{}", r.u.sup_distance(&u_star));
        assert!(r.admissibility_margin > 0.0);
        // sandwich against the barriers
        let upper = solve_supersolution(&p, &opts).unwrap();
        for v in 0..g.len() {
            assert!(sub.u_sub[v] - 1e-10 <= r.u[v] && r.u[v] <= upper[v] + 1e-10);
        }
        // Δu + tr χ > 0
        let (lap, _) = laplacian_and_gradient(&r.u, &g, &Metric::identity(2)).unwrap();
        assert!((0..g.len()).filter(|&v| !g.is_boundary(v)).all(|v| lap[v] + 2.0 > 0.0));
    }
}

#[test]
fn constant_path_needs_no_work() {
    let g = small_grid();
    let opts = SolverOptions::default();
    let lm = OperatorSpec::log_ma(2).unwrap();
    let (p, _) = manufactured(lm, &g);
    let sub = construct_subsolution(&p, opts.margin_target, &opts).unwrap();
    let psi = operator_values(&lm, &g, &flat(&g, &[1.0, 1.0]), &Metric::identity(2), &sub.u_sub).unwrap();
    let constant = p.with_psi(psi).unwrap();
    let r = continuity_solve(&constant, &sub, &opts).unwrap();
    assert!(r.newton_iters.iter().all(|&k| k <= 1), "{:?}", r.newton_iters);
    assert!(r.u.sup_distance(&sub.u_sub) < 1e-12);
    assert_eq!(r.t_path[0], 0.0);
}

#[test]
fn degenerate_guard() {
    let g = small_grid();
    let opts = SolverOptions::default();
    let s2 = OperatorSpec::sigma_k_root(2, 2).unwrap();
    let p = problem(s2, &g, &[1.0, 0.0], ScalarField::constant(&g, 0.0), BoundaryData::constant(&g, 0.0, 1.0));
    let sub = SubsolutionResult { u_sub: p.phi.extension(&g), t_star: 0.0, margin: 0.0, h: ScalarField::constant(&g, 0.0), h_normal_max: 0.0 };
    assert!(matches!(continuity_solve(&p, &sub, &opts), Err(Error::Precondition(_))));
}

#[test]
fn trivial_geodesic() {
    let g = small_grid();
    let opts = SolverOptions::default();
    let s2 = OperatorSpec::sigma_k_root(2, 2).unwrap();
    let c = 0.7;
    let p = problem(s2, &g, &[1.0, 0.0], ScalarField::constant(&g, 0.0), BoundaryData::constant(&g, 0.0, c));
    let line = ScalarField::from_fn(&g, |x| c * x[2]);
    let mut dist = Vec::new();
    let (report, table) = solve_degenerate(&p, &[1e-1, 1e-2, 1e-3, 1e-4, 1e-5], &opts, |_, u| dist.push(u.sup_distance(&line))).unwrap();
    assert!(dist.windows(2).all(|w| w[1] < w[0]), "{dist:?}");
    assert!(*dist.last().unwrap() < 1e-3);
    assert!(table.differences_decrease(), "{table:?}");
    assert!(table.margins_decrease_to_zero(), "{table:?}");
    assert!(report.residual_sup < 1e-9);

    let single = solve_degenerate(&p.lifted(0.3), &[1e-12], &opts, |_, _| {}).unwrap();
    assert_eq!(single.1.rows.len(), 1);
    assert!(solve_degenerate(&p, &[1e-2, 1e-1], &opts, |_, _| {}).is_err());
    let lm = problem(OperatorSpec::log_ma(2).unwrap(), &g, &[1.0, 1.0], ScalarField::constant(&g, 0.0), BoundaryData::constant(&g, 0.0, 0.0));
    assert!(matches!(solve_degenerate(&lm, &[0.1], &opts, |_, _| {}), Err(Error::Precondition(_))));
}

#[test]
fn jacobian_matches_differences() {
    let g = small_grid();
    for op in [OperatorSpec::log_ma(2).unwrap(), OperatorSpec::sigma_k_root(2, 2).unwrap(), OperatorSpec::hessian_quotient(2, 1, 2).unwrap()] {
        let (p, u_star) = manufactured(op, &g);
        let v = ScalarField::from_fn(&g, |c| libm::sin(TAU * (c[0] + 2.0 * c[1] - c[3])) * c[2] * (1.0 - c[2]) + 0.3 * libm::cos(TAU * c[3]));
        let err = jacobian_fd_check(&p, &u_star, &v, 1e-6).unwrap();
        assert!(err < 1e-5, "{op:?} {err}");
    }
}

#[test]
fn comparison_by_constant_shift() {
    let g = small_grid();
    let opts = SolverOptions::default();
    let (p, _) = manufactured(OperatorSpec::log_ma(2).unwrap(), &g);
    let delta = 0.25;
    let q = p.with_boundary(p.phi.shifted(delta)).unwrap();
    let solve = |prob: &DirichletProblem| {
        let sub = construct_subsolution(prob, opts.margin_target, &opts).unwrap();
        continuity_solve(prob, &sub, &opts).unwrap().u
    };
    let (u1, u2) = (solve(&p), solve(&q));
    let slack = comparison_check(&u1, &u2, &p.phi, &q.phi);
    assert!(slack.abs() <= 2.0 * opts.tol_newton, "{slack}");
}

