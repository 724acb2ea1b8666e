use super::*;
use crate::linalg::HermMatrix;
use approx::assert_relative_eq;
use core::f64::consts::TAU;

fn grid(p: usize, res: usize) -> ProductGrid {
    build_grid(&GridConfig::uniform(p, res)).unwrap()
}

#[test]
fn node_counts() {
    let g = grid(1, 8);
    assert_eq!(g.len(), 8 * 8 * 8 * 8);
    assert_eq!(g.boundary_nodes().len(), 2 * 8 * 8 * 8);
    assert!(build_grid(&GridConfig { p: 1, torus_res: vec![8], s_res: 2, theta_res: 8 }).is_err());
    assert!(build_grid(&GridConfig { p: 0, torus_res: vec![8], s_res: 8, theta_res: 8 }).is_err());
    assert!(build_grid(&GridConfig { p: 2, torus_res: vec![8, 8, 8], s_res: 8, theta_res: 8 }).is_err());
    let g2 = build_grid(&GridConfig { p: 2, torus_res: vec![4], s_res: 4, theta_res: 4 }).unwrap();
    assert_eq!(g2.n(), 3);
    let u = ScalarField::constant(&g2, 1.0);
    assert_eq!(complex_hessian(&u, &g2).unwrap().n(), 3);
    for node in [0, 17, 200, g2.len() - 1] {
        let line = g2.line_of(node);
        assert!(line < g2.line_count());
        assert_eq!(g2.node_on_line(line, g2.s_index(node)), node);
    }
}

/// Checks `∂∂̄u` against `expected(j, k)` at every node, boundary included.
fn assert_hessian(g: &ProductGrid, u: &ScalarField, expected: impl Fn(usize, usize) -> Complex64) {
    let h = complex_hessian(u, g).unwrap();
    for node in 0..g.len() {
        for j in 0..g.n() {
            for k in 0..g.n() {
                let (got, want) = (h.get(node, j, k), expected(j, k));
                assert!((got - want).norm() < 1e-9, "node {node} ({j},{k}): {got} vs {want}");
            }
        }
    }
}

/// Nodes whose torus stencils do not wrap around, where a non-periodic
/// polynomial is locally a valid test function.
fn off_seam(g: &ProductGrid, node: usize) -> bool {
    (0..2 * g.p()).all(|d| {
        let i = g.lattice().index_along(node, d);
        i >= 1 && i + 2 <= g.lattice().axes()[d].res()
    })
}

#[test]
fn hessian_of_quadratics() {
    let g = grid(1, 8);
    let zero = Complex64::new(0.0, 0.0);
    let u = ScalarField::from_fn(&g, |c| c[2] * c[2]);
    assert_hessian(&g, &u, |j, k| if (j, k) == (1, 1) { Complex64::new(0.5, 0.0) } else { zero });
    let u = ScalarField::from_fn(&g, |c| 2.0 * c[2] * c[2] - 2.0 * c[2]);
    assert_hessian(&g, &u, |j, k| if (j, k) == (1, 1) { Complex64::new(1.0, 0.0) } else { zero });

    // |z_1|² and Re(z_1²) = x² − y²
    let abs2 = ScalarField::from_fn(&g, |c| c[0] * c[0] + c[1] * c[1]);
    let re_sq = ScalarField::from_fn(&g, |c| c[0] * c[0] - c[1] * c[1] + c[2]);
    let (h1, h2) = (complex_hessian(&abs2, &g).unwrap(), complex_hessian(&re_sq, &g).unwrap());
    for node in (0..g.len()).filter(|&v| off_seam(&g, v)) {
        assert!((h1.get(node, 0, 0).re - 1.0).abs() < 1e-10);
        for (j, k) in [(0, 1), (1, 0), (1, 1)] {
            assert!(h1.get(node, j, k).norm() < 1e-10);
        }
        for (j, k) in [(0, 0), (0, 1), (1, 1)] {
            assert!(h2.get(node, j, k).norm() < 1e-10);
        }
    }
    let (lap, _) = laplacian_and_gradient(&abs2, &g, &Metric::identity(2)).unwrap();
    assert!((0..g.len()).filter(|&v| off_seam(&g, v)).all(|v| (lap[v] - 1.0).abs() < 1e-10));
}

#[test]
fn hessian_of_modes_on_the_torus() {
    // u = cos(2π x1)·s²: u_{11̄} = −π² cos(2πx1) s², u_{12̄} = ¼(∂x1∂s)u
    let g = build_grid(&GridConfig { p: 1, torus_res: vec![64, 4], s_res: 64, theta_res: 4 }).unwrap();
    let u = ScalarField::from_fn(&g, |c| libm::cos(TAU * c[0]) * c[2] * c[2]);
    let h = complex_hessian(&u, &g).unwrap();
    let mut err: f64 = 0.0;
    let mut c = vec![0.0; 4];
    for node in 0..g.len() {
        g.coords(node, &mut c);
        let exact11 = -0.25 * TAU * TAU * libm::cos(TAU * c[0]) * c[2] * c[2];
        let exact12 = Complex64::new(-0.25 * TAU * libm::sin(TAU * c[0]) * 2.0 * c[2], 0.0);
        err = err.max((h.get(node, 0, 0).re - exact11).abs()).max((h.get(node, 0, 1) - exact12).norm());
    }
    assert!(err < 2e-2, "{err}");
}

#[test]
fn hessian_converges_at_second_order() {
    let err_at = |res: usize| {
        let g = grid(1, res);
        let u = ScalarField::from_fn(&g, |c| libm::sin(TAU * (c[0] + c[1])) * libm::cos(TAU * c[3]) + libm::exp(c[2]));
        let h = complex_hessian(&u, &g).unwrap();
        let mut c = vec![0.0; 4];
        let mut err: f64 = 0.0;
        for node in 0..g.len() {
            g.coords(node, &mut c);
            // ¼(∂xx + ∂yy) of sin(2π(x+y)) cos(2πθ)
            let e00 = -0.5 * TAU * TAU * libm::sin(TAU * (c[0] + c[1])) * libm::cos(TAU * c[3]);
            err = err.max((h.get(node, 0, 0).re - e00).abs());
        }
        err
    };
    let ratio = err_at(8) / err_at(16);
    assert!(ratio > 3.5 && ratio < 4.5, "{ratio}");
}

#[test]
fn linear_field_is_flat() {
    let g = grid(1, 8);
    let u = ScalarField::from_fn(&g, |c| 3.0 * c[2] - 1.0);
    assert_hessian(&g, &u, |_, _| Complex64::new(0.0, 0.0));
}

#[test]
fn relative_eigenvalues() {
    let g = grid(1, 4);
    let omega = Metric::new(HermMatrix::from_real_diagonal(&[2.0, 1.0])).unwrap();
    let field = HermitianField::constant(g.len(), &HermMatrix::from_real_diagonal(&[2.0, 3.0]));
    let e = eigenvalues_rel(&field, &omega).unwrap();
    for l in e.iter() {
        assert_relative_eq!(l[0], 1.0, epsilon = 1e-14);
        assert_relative_eq!(l[1], 3.0, epsilon = 1e-14);
    }
    let same = HermitianField::constant(g.len(), omega.omega());
    assert!(eigenvalues_rel(&same, &omega).unwrap().iter().all(|l| l.iter().all(|x| (x - 1.0).abs() < 1e-14)));
    let t = HermitianField::constant(g.len(), &HermMatrix::from_real_diagonal(&[1.0, 7.5]));
    assert_eq!(eigenvalues_rel(&t, &Metric::identity(2)).unwrap().node(3), &[1.0, 7.5]);
    assert!(Metric::new(HermMatrix::from_real_diagonal(&[1.0, -1.0])).is_err());
}

#[test]
fn eigen_sum_matches_relative_trace() {
    let omega = Metric::new(
        HermMatrix::from_rows(
            2,
            vec![
                Complex64::new(2.0, 0.0),
                Complex64::new(0.3, 0.4),
                Complex64::new(0.3, -0.4),
                Complex64::new(1.5, 0.0),
            ],
        )
        .unwrap(),
    )
    .unwrap();
    let gm = HermMatrix::from_rows(
        2,
        vec![Complex64::new(1.0, 0.0), Complex64::new(-0.2, 0.7), Complex64::new(-0.2, -0.7), Complex64::new(4.0, 0.0)],
    )
    .unwrap();
    let field = HermitianField::constant(1, &gm);
    let e = eigenvalues_rel(&field, &omega).unwrap();
    assert!(e.node(0)[0] <= e.node(0)[1]);
    assert_relative_eq!(e.node(0).iter().sum::<f64>(), omega.trace_of(&gm), max_relative = 1e-10);
}

#[test]
fn laplacian_and_gradient_examples() {
    let g = grid(1, 8);
    let id = Metric::identity(2);
    let u = ScalarField::from_fn(&g, |c| 2.0 * c[2] * c[2] - 2.0 * c[2]);
    let (lap, grad) = laplacian_and_gradient(&u, &g, &id).unwrap();
    assert!(lap.values().iter().all(|v| (v - 1.0).abs() < 1e-10));
    // |∇u|² = 2·|½ ∂_s u|² = ½(4s − 2)²
    let mut c = vec![0.0; 4];
    for node in 0..g.len() {
        g.coords(node, &mut c);
        assert_relative_eq!(grad[node], libm::sqrt(0.5) * (4.0 * c[2] - 2.0).abs(), epsilon = 1e-10);
    }
    let (lap, grad) = laplacian_and_gradient(&ScalarField::constant(&g, 3.0), &g, &id).unwrap();
    assert_eq!(lap.sup_norm(), 0.0);
    assert_eq!(grad.sup_norm(), 0.0);
}

#[test]
fn laplacian_two_ways() {
    let g = grid(1, 16);
    let u = ScalarField::from_fn(&g, |c| libm::sin(TAU * c[0]) * libm::cos(TAU * c[1]) * c[2] + libm::cos(TAU * c[3]) * c[2] * c[2]);
    let (lap, _) = laplacian_and_gradient(&u, &g, &Metric::identity(2)).unwrap();
    let mut d2 = vec![0.0; 16];
    for node in 0..g.len() {
        g.real_second_derivatives(u.values(), node, &mut d2);
        let direct = 0.25 * (d2[0] + d2[5] + d2[10] + d2[15]);
        assert!((lap[node] - direct).abs() < 1e-12 * (1.0 + direct.abs()));
    }
}

#[test]
fn normal_derivatives() {
    let g = grid(1, 8);
    let check = |u: ScalarField, at0: f64, at1: f64| {
        let b = boundary_normal_derivative(&u, &g).unwrap();
        for (node, v) in b.nodes.iter().zip(&b.values) {
            let want = if g.s(*node) < 0.5 { at0 } else { at1 };
            assert!((v - want).abs() < 1e-12, "{v} vs {want}");
        }
    };
    check(ScalarField::from_fn(&g, |c| c[2]), 1.0, -1.0);
    check(ScalarField::from_fn(&g, |c| 2.0 * c[2] * c[2] - 2.0 * c[2]), -2.0, -2.0);
    check(ScalarField::constant(&g, 5.0), 0.0, 0.0);
}
