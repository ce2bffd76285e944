use super::torus::{assemble_polar_dense, assemble_torus, resolved_defect, solve_torus_gauge, PolarRule};
use super::*;
use crate::clifford::build_dirac;
use crate::geometry::{make_polar_disc_grid, make_s3_grid};
use crate::linalg::max_abs;

fn cr() -> DiracOperator {
    build_dirac(1).unwrap()
}

fn circle_c(n: usize) -> (BoundaryGrid, BoundaryOperator) {
    let g = make_circle_grid(n, 1.0).unwrap();
    let cc = assemble_cauchy(&cr(), &g).unwrap();
    (g, cc)
}

fn max_err(a: &CVec, b: &CVec) -> f64 {
    (a - b).camax()
}

#[test]
fn circle_modes_are_eigenvectors() {
    let (g, cc) = circle_c(256);
    for k in -5..=5i64 {
        let u = fourier_mode(&g, k);
        let cu = cc.apply(&u.values).unwrap();
        let lam = if k >= 0 { 0.5 } else { -0.5 };
        assert!(max_err(&cu, &(&u.values * c(lam, 0.0))) < 1e-10, "mode {k}");
    }
}

#[test]
fn constants_go_to_half() {
    let (_, cc) = circle_c(64);
    let u = CVec::from_element(64, c(0.3, -1.2));
    assert!(max_err(&cc.apply(&u).unwrap(), &(&u * c(0.5, 0.0))) < 1e-15);
}

#[test]
fn circle_defect_is_small() {
    let (_, cc) = circle_c(256);
    assert!(projection_defect(&cc).unwrap() < 1e-8);
}

/// The plain punctured trapezoid rule (all `j ≠ i`, unit weights) misses the
/// Nyquist-scale correction and leaves an O(1) defect.
fn punctured_circle(n: usize) -> BoundaryOperator {
    let g = make_circle_grid(n, 1.0).unwrap();
    let ctx = KernelContext::new(&cr());
    let mut m = CMat::zeros(n, n);
    for i in 0..n {
        let z = g.complex_node(i);
        let mut diag = c(0.5, 0.0);
        for j in (0..n).filter(|&j| j != i) {
            let kij = cauchy_kernel(&ctx, &z, &g.complex_node(j), &g.complex_normals[j]).unwrap()[(0, 0)] * g.weights[j];
            m[(i, j)] = kij;
            diag -= kij;
        }
        m[(i, i)] = diag;
    }
    BoundaryOperator::dense("C", 1, g.weights, m).unwrap()
}

#[test]
fn punctured_rule_has_order_one_defect() {
    let d = projection_defect(&punctured_circle(64)).unwrap();
    assert!(d > 0.2, "defect {d}");
}

#[test]
fn szego_matches_oracle() {
    let (_, cc) = circle_c(256);
    let p = szego_projection(&cc);
    let oracle = exact_szego_circle(256, 127).unwrap();
    let diff = p.to_dense().unwrap() - oracle.to_dense().unwrap();
    assert!(spectral_norm(&diff) < 1e-8);
    let band = circle_band_projector(256, 64);
    let o64 = exact_szego_circle(256, 64).unwrap();
    let diff = (p.to_dense().unwrap() - o64.to_dense().unwrap()) * &band;
    assert!(spectral_norm(&diff) < 1e-8);
}

#[test]
fn oracle_is_exact() {
    let o = exact_szego_circle(32, 10).unwrap();
    let g = make_circle_grid(32, 1.0).unwrap();
    let u = fourier_mode(&g, 3);
    assert!(max_err(&o.apply(&u.values).unwrap(), &u.values) < 1e-14);
    assert!(o.apply(&fourier_mode(&g, -1).values).unwrap().camax() < 1e-14);
    let cx = exact_cauchy_circle(32, 15).unwrap();
    let d = projection_defect(&cx).unwrap();
    assert!(d < 1e-13, "{d}");
    assert!(matches!(exact_szego_circle(8, 4), Err(Error::Aliasing(_))));
}

#[test]
fn idempotence_defect_equals_involution_defect() {
    let (_, cc) = circle_c(64);
    let p = szego_projection(&cc);
    let pp = p.compose(&p).unwrap();
    let lhs = pp.affine(c(1.0, 0.0), c(0.0, 0.0)).to_dense().unwrap() - p.to_dense().unwrap();
    let lhs = spectral_norm(&diag_similarity(&lhs, &p.weights));
    let rhs = projection_defect(&cc).unwrap();
    assert!((lhs - rhs).abs() < 1e-14, "{lhs} vs {rhs}");
}

#[test]
fn interior_reproduces_z_squared() {
    let g = make_circle_grid(256, 1.0).unwrap();
    let u = Density::from_fn(&g, 1, |z| CVec::from_element(1, z[0] * z[0]));
    let z = c(0.3, 0.1);
    let v = interior_eval(&cr(), &g, &u, &[z], None).unwrap();
    assert!((v[0] - z * z).norm() < 1e-10);
}

#[test]
fn interior_with_volume_term_reproduces_conj() {
    let g = make_circle_grid(256, 1.0).unwrap();
    let u = Density::from_fn(&g, 1, |z| CVec::from_element(1, z[0].conj()));
    let z = c(0.3, -0.2);
    let vg = make_polar_disc_grid(&g.domain, &[z.re, z.im], 64, 128).unwrap();
    let au = vec![CVec::from_element(1, c(1.0, 0.0)); vg.nodes.len()];
    let vol = VolumeTerm { grid: &vg, au };
    let v = interior_eval(&cr(), &g, &u, &[z], Some(&vol)).unwrap();
    assert!((v[0] - z.conj()).norm() < 1e-6, "{}", (v[0] - z.conj()).norm());
    // without the volume term the boundary integral alone is wrong
    let b = interior_eval(&cr(), &g, &u, &[z], None).unwrap();
    assert!((b[0] - z.conj()).norm() > 0.1);
}

#[test]
fn interior_guard_band() {
    let g = make_circle_grid(64, 1.0).unwrap();
    let u = Density::circle_fn(&g, |_| c(1.0, 0.0));
    assert!(matches!(interior_eval(&cr(), &g, &u, &[c(0.0, 0.99)], None), Err(Error::Domain(_))));
    assert!(matches!(interior_eval(&cr(), &g, &u, &[c(2.0, 0.0)], None), Err(Error::Domain(_))));
    assert!(matches!(exterior_vanishing(&cr(), &g, &u, &[c(0.1, 0.0)]), Err(Error::Domain(_))));
}

#[test]
fn exterior_vanishing_separates_hardy_space() {
    let g = make_circle_grid(256, 1.0).unwrap();
    let w = [c(2.0, 0.0)];
    let inside = Density::circle_fn(&g, |t| c((2.0 * t).cos(), (2.0 * t).sin()));
    assert!(exterior_vanishing(&cr(), &g, &inside, &w).unwrap() < 1e-10);
    let outside = fourier_mode(&g, -1);
    let r = exterior_vanishing(&cr(), &g, &outside, &w).unwrap();
    assert!((r - 0.5).abs() < 1e-10, "{r}");
}

#[test]
fn projected_random_density_is_in_hardy_space() {
    use rand::{Rng, SeedableRng};
    let (g, cc) = circle_c(128);
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
    let v = CVec::from_fn(128, |_, _| c(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5));
    let p = szego_projection(&cc);
    let u = p.apply_density(&Density::new(1, v).unwrap()).unwrap();
    let defect = projection_defect(&cc).unwrap().max(1e-15);
    let r = exterior_vanishing(&cr(), &g, &u, &[c(1.5, 0.5)]).unwrap();
    assert!(r <= 10.0 * defect.max(1e-12), "{r} vs {defect}");
}

#[test]
fn jump_residual_shrinks_towards_boundary() {
    let g = make_circle_grid(512, 1.0).unwrap();
    let u = Density::circle_fn(&g, |t| c((3.0 * t).cos() + 0.5, (3.0 * t).sin()));
    let h = g.spacing();
    // the offset limits converge at first order; |u'| = 3 sets the constant
    let ds = [0.2, 0.1, 0.05, 3.0 * h];
    let ladder: Vec<f64> = ds.iter().map(|&d| jump_residual(&cr(), &g, &u, 5, d).unwrap()).collect();
    assert!(ladder.windows(2).all(|w| w[0] > w[1]), "{ladder:?}");
    for (d, r) in ds.iter().zip(&ladder) {
        assert!(*r <= 3.5 * d, "{d} {r}");
    }
}

#[test]
fn dense_and_torus_agree() {
    let op = build_dirac(2).unwrap();
    let g = make_s3_grid(4, 4, 4).unwrap();
    let rule = PolarRule::for_grid(&g);
    let blocks = assemble_torus(&op, &g, &rule).unwrap();
    let dense = assemble_polar_dense(&op, &g, &rule).unwrap();
    let diff = max_abs(&(blocks.to_dense() - &dense));
    assert!(diff < 1e-11 * max_abs(&dense), "{diff}");
}

#[test]
fn gauge_matches_hand_solution() {
    let gauge = solve_torus_gauge(&build_dirac(2).unwrap()).unwrap();
    assert_eq!(gauge, vec![[0, 0], [-1, 1]]);
}

#[test]
fn torus_fft_round_trip() {
    let op = build_dirac(2).unwrap();
    let g = make_s3_grid(4, 6, 4).unwrap();
    let mut t = assemble_torus(&op, &g, &PolarRule::for_grid(&g)).unwrap();
    for b in t.blocks.iter_mut() {
        *b = CMat::identity(8, 8);
    }
    let u = CVec::from_fn(t.dim(), |i, _| c((i as f64).sin(), (0.3 * i as f64).cos()));
    assert!(max_err(&t.apply(&u), &u) < 1e-13);
}

fn s3_solution_error(n: usize, f: impl Fn(&[Complex64]) -> CVec) -> f64 {
    let op = build_dirac(2).unwrap();
    let g = make_s3_grid(n, n, n).unwrap();
    let cc = assemble_cauchy(&op, &g).unwrap();
    let u = Density::from_fn(&g, 2, f);
    let cu = cc.apply(&u.values).unwrap();
    max_err(&cu, &(&u.values * c(0.5, 0.0)))
}

#[test]
fn s3_constants_and_solutions() {
    let e1 = s3_solution_error(8, |_| CVec::from_vec(vec![c(1.0, 0.0), c(-2.0, 0.5)]));
    assert!(e1 < 1e-12, "{e1}");
    let z1 = s3_solution_error(8, |z| CVec::from_vec(vec![z[0], c(0.0, 0.0)]));
    let zb2 = s3_solution_error(8, |z| CVec::from_vec(vec![z[1].conj(), c(0.0, 0.0)]));
    assert!(z1 < 1e-3 && zb2 < 1e-3, "{z1} {zb2}");
}

#[test]
fn s3_interior_reproduction() {
    let op = build_dirac(2).unwrap();
    let z = [c(0.2, 0.0), c(0.1, 0.0)];
    let errs: Vec<f64> = [24, 32, 40]
        .iter()
        .map(|&m| {
            let g = make_s3_grid(m, m, m).unwrap();
            let u = Density::from_fn(&g, 2, |w| CVec::from_vec(vec![w[0], c(0.0, 0.0)]));
            let v = interior_eval(&op, &g, &u, &z, None).unwrap();
            (v - CVec::from_vec(vec![z[0], c(0.0, 0.0)])).norm()
        })
        .collect();
    // the product rule is exact on these traces; every level sits at roundoff
    assert!(errs.iter().all(|e| *e < 1e-12), "{errs:?}");
}

#[test]
fn resolved_defect_is_small() {
    let op = build_dirac(2).unwrap();
    let g = make_s3_grid(8, 8, 8).unwrap();
    let cc = assemble_cauchy(&op, &g).unwrap();
    let OperatorData::Torus(t) = &cc.data else { panic!() };
    let r = resolved_defect(t, 2, 4).unwrap();
    let full = projection_defect(&cc).unwrap();
    println!("resolved {r:.3e} full {full:.3e}");
    assert!(r < full);
}

#[test]
fn mismatched_dimensions_rejected() {
    let g = make_circle_grid(16, 1.0).unwrap();
    assert!(matches!(assemble_cauchy(&build_dirac(2).unwrap(), &g), Err(Error::InvalidArgument(_))));
}

