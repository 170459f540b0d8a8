use fbms::discretize::{apply_jacobi, BoundaryCondition, ModeProblem};
use fbms::spectra::{
    jharmonic_basis, mode_spectrum, morse_index, nonlocal_spectrum, steklov_spectrum, SteklovOperator,
};
use fbms::verify::{check_fsn, check_ipp, NumericFunction};
use fbms::SurfaceModel;

fn mode_values(surface: &SurfaceModel, m: u32, bc: BoundaryCondition, n: usize) -> Vec<f64> {
    let problem = ModeProblem::new(*surface, m, bc, n);
    mode_spectrum(&problem, 0).unwrap().1.eigenvalues
}

#[test]
fn robin_and_dirichlet_interlace() {
    for surface in [SurfaceModel::critical_catenoid(), SurfaceModel::flat_disk()] {
        // boundary circles met by one radial profile
        let gap = surface.boundary_parameters().len();
        for m in [0, 1, 3] {
            let robin = mode_values(&surface, m, BoundaryCondition::Robin, 256);
            let dirichlet = mode_values(&surface, m, BoundaryCondition::Dirichlet, 256);
            for k in 0..6 {
                assert!(robin[k] <= dirichlet[k] + 1e-9, "m={m} k={k}");
                assert!(dirichlet[k] <= robin[k + gap] + 1e-9, "m={m} k={k}");
            }
        }
    }
}

#[test]
fn mode_minima_increase_with_mode() {
    for surface in [SurfaceModel::critical_catenoid(), SurfaceModel::flat_disk()] {
        for bc in [BoundaryCondition::Robin, BoundaryCondition::Dirichlet] {
            let minima: Vec<f64> = (0..8).map(|m| mode_values(&surface, m, bc, 256)[0]).collect();
            assert!(minima.windows(2).all(|w| w[0] < w[1]), "{bc} {minima:?}");
        }
    }
}

#[test]
fn catenoid_index_and_nullity() {
    let report = morse_index(&SurfaceModel::critical_catenoid(), 8, &[256, 512, 1024], 1e-6).unwrap();
    assert!(report.certified);
    assert_eq!(report.count, 4);
    assert_eq!(report.nullity, 2);
    assert!(report.in_band.iter().all(|d| d.mode == 1 && d.matched));
    // two radial directions and the cos/sin pair of mode 1
    let mut modes: Vec<u32> = report.below.iter().map(|l| l.mode).collect();
    modes.sort_unstable();
    assert_eq!(modes, [0, 0, 1]);
    assert_eq!(report.below.iter().map(|l| l.multiplicity).sum::<usize>(), 4);
    for line in &report.below {
        assert!(line.order.is_some_and(|p| p > 1.8), "{line:?}");
    }
}

#[test]
fn disk_index() {
    let report = morse_index(&SurfaceModel::flat_disk(), 8, &[256, 512, 1024], 1e-6).unwrap();
    assert!(report.certified);
    assert_eq!(report.count, 1);
    assert_eq!(report.nullity, 2);
}

#[test]
fn uncertified_inside_guard_band() {
    // a huge band swallows the -2.17 mode-0 eigenvalue
    let surface = SurfaceModel::critical_catenoid();
    let report = fbms::spectra::index_below(&surface, -2.0, 8, &[256, 512, 1024], 0.3).unwrap();
    assert!(!report.band_certified);
    assert!(!report.certified);
}

#[test]
fn jharmonic_profiles_solve_the_jacobi_equation() {
    let surface = SurfaceModel::critical_catenoid();
    let n = 1024;
    for m in [0, 1, 2, 5] {
        let basis = jharmonic_basis(&surface, m, n).unwrap();
        let h = basis.nodes[1] - basis.nodes[0];
        for p in &basis.profiles {
            let ju = apply_jacobi(&surface, basis.nodes[0], h, &p.values, m);
            let worst = ju[1..ju.len() - 1].iter().fold(0.0_f64, |a, &x| a.max(x.abs()));
            assert!(worst < 1e-3, "m={m} residual {worst}");
        }
    }
}

#[test]
fn steklov_disk_eigenvalues_are_mode_numbers() {
    let (spec, _) = steklov_spectrum(&SurfaceModel::flat_disk(), SteklovOperator::Laplacian, 0..=5, 512).unwrap();
    let mut distinct: Vec<f64> = spec.multiplets().iter().map(|m| m.value).collect();
    distinct.truncate(6);
    for (k, sigma) in distinct.iter().enumerate() {
        assert!((sigma - k as f64).abs() < 1e-5, "σ_{k} = {sigma}");
    }
}

#[test]
fn nonlocal_forms_are_symmetric_and_gram_positive() {
    let spec = nonlocal_spectrum(&SurfaceModel::critical_catenoid(), 6, 1024).unwrap();
    for mode in &spec.per_mode {
        let (q, g) = (&mode.q, &mode.gram);
        for i in 0..q.len() {
            assert!(g[i][i] > 0.0);
            for j in 0..q.len() {
                assert!((q[i][j] - q[j][i]).abs() <= 1e-10 * (1.0 + q[i][j].abs()));
                assert!((g[i][j] - g[j][i]).abs() <= 1e-12 * (1.0 + g[i][j].abs()));
            }
        }
        if g.len() == 2 {
            assert!(g[0][0] * g[1][1] - g[0][1] * g[1][0] > 0.0, "m={}", mode.mode);
        }
    }
    assert!(spec.eigenvalues.windows(2).all(|w| w[0] <= w[1]));
}

#[test]
fn fsn_is_ipp_with_w_the_normal_part() {
    let surface = SurfaceModel::critical_catenoid();
    for v in [[1.0, 0.0, 0.0], [0.0, 0.0, 1.0], [0.6, -0.3, 0.2]] {
        let fsn = check_fsn(&surface, &v, 128);
        let w = NumericFunction(move |s, t| surface.normal_component(&v, s, t));
        let ipp = check_ipp(&surface, &v, &w, 128);
        assert!((fsn.left - ipp.left).abs() < 1e-8 * (1.0 + fsn.left.abs()));
        assert!((fsn.right - ipp.right).abs() < 1e-5 * (1.0 + fsn.right.abs()));
    }
}

#[test]
fn fsn_form_is_quadratic_in_v() {
    let surface = SurfaceModel::critical_catenoid();
    let q = |v: [f64; 3]| check_fsn(&surface, &v, 128).left;
    // rotational symmetry makes the x and y directions orthogonal for Q
    let (qx, qz) = (q([1.0, 0.0, 0.0]), q([0.0, 0.0, 1.0]));
    assert!((q([0.0, 1.0, 0.0]) - qx).abs() < 1e-8 * qx.abs());
    assert!((q([2.0, 0.0, 0.0]) - 4.0 * qx).abs() < 1e-8 * qx.abs());
    assert!((q([1.0, 0.0, 1.0]) - qx - qz).abs() < 1e-8 * (qx.abs() + qz.abs()));
}
