//! Property tests on random inputs.

use fbms::eigensolve::{cholesky, count_below, sym_eig, sym_generalized_eig, Matrix};
use fbms::geometry::SurfaceModel;
use proptest::prelude::*;

fn symmetric(n: usize, entries: &[f64]) -> Matrix {
    let mut m = Matrix::zeros(n);
    let mut k = 0;
    for i in 0..n {
        for j in 0..=i {
            m[(i, j)] = entries[k];
            m[(j, i)] = entries[k];
            k += 1;
        }
    }
    m
}

/// Number of negative pivots of symmetric Gaussian elimination without
/// pivoting (the inertia, when no leading minor vanishes).
fn negative_pivots(a: &Matrix) -> Option<usize> {
    let n = a.dim();
    let mut m = a.clone();
    let mut neg = 0;
    for k in 0..n {
        let p = m[(k, k)];
        if p.abs() < 1e-9 {
            return None;
        }
        neg += usize::from(p < 0.0);
        for i in k + 1..n {
            let f = m[(i, k)] / p;
            for j in k..n {
                m[(i, j)] -= f * m[(k, j)];
            }
        }
    }
    Some(neg)
}

proptest! {
    #[test]
    fn normal_component_is_linear(
        u in prop::array::uniform3(-3.0..3.0f64),
        v in prop::array::uniform3(-3.0..3.0f64),
        alpha in -2.0..2.0f64,
        s in -1.19..1.19f64,
        theta in 0.0..6.28f64,
    ) {
        for surf in [SurfaceModel::critical_catenoid(), SurfaceModel::flat_disk()] {
            let s = if surf.is_catenoid() { s } else { s.abs() / 1.2 };
            let w = [alpha * u[0] + v[0], alpha * u[1] + v[1], alpha * u[2] + v[2]];
            let lhs = surf.normal_component(&w, s, theta);
            let rhs = alpha * surf.normal_component(&u, s, theta) + surf.normal_component(&v, s, theta);
            prop_assert!((lhs - rhs).abs() <= 1e-12 * (1.0 + lhs.abs()));
        }
    }

    #[test]
    fn gram_spectrum_nonnegative(n in 1usize..12, seed in prop::collection::vec(-1.0..1.0f64, 144)) {
        let mut a = Matrix::zeros(n);
        for i in 0..n {
            for j in 0..n {
                a[(i, j)] = seed[i * 12 + j];
            }
        }
        let ata = a.transpose().matmul(&a);
        let spec = sym_eig(&ata).unwrap();
        prop_assert!(spec.eigenvalues.iter().all(|&v| v >= -1e-12));
    }

    #[test]
    fn congruence_preserves_negative_count(
        n in 2usize..9,
        k in prop::collection::vec(-1.0..1.0f64, 45),
        b in prop::collection::vec(-1.0..1.0f64, 81),
    ) {
        let kmat = symmetric(n, &k);
        // M = B Bᵀ + I is positive definite
        let mut bm = Matrix::zeros(n);
        for i in 0..n {
            for j in 0..n {
                bm[(i, j)] = b[i * 9 + j];
            }
        }
        let mut mmat = bm.matmul(&bm.transpose());
        for i in 0..n {
            mmat[(i, i)] += 1.0;
        }
        let gen = sym_generalized_eig(&kmat, &mmat).unwrap();
        let counted = count_below(&gen.eigenvalues, 0.0, 1e-9);
        // brute force: inertia of L⁻¹ K L⁻ᵀ by elimination, L from M = L Lᵀ
        let l = cholesky(&mmat).unwrap();
        let mut linv = Matrix::identity(n);
        for c in 0..n {
            for i in 0..n {
                let mut v = if i == c { 1.0 } else { 0.0 };
                for j in 0..i {
                    v -= l[(i, j)] * linv[(j, c)];
                }
                linv[(i, c)] = v / l[(i, i)];
            }
        }
        let reduced = linv.matmul(&kmat).matmul(&linv.transpose());
        if let (Some(neg), true) = (negative_pivots(&reduced), counted.certified) {
            prop_assert_eq!(counted.count, neg);
            prop_assert_eq!(negative_pivots(&kmat), Some(neg));
        }
    }
}
