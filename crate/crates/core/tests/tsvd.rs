mod common;

use common::*;
use nalgebra::DMatrix;
use polarpcp::tsvd::{reconstruct, singular_moduli, tsvd};
use polarpcp::{Complex64, Field, HyperMatrix, TransformKind, TubeTransform};
use proptest::prelude::*;

fn transforms(n: usize) -> Vec<TubeTransform> {
    let mut out = vec![TubeTransform::dft(n).unwrap(), TubeTransform::skew_dft(n).unwrap()];
    out.push(if n.is_power_of_two() {
        TubeTransform::walsh_hadamard(n).unwrap()
    } else {
        TubeTransform::group_dft(vec![n]).unwrap()
    });
    out
}

fn unitarity_error(u: &HyperMatrix, t: &TubeTransform) -> f64 {
    let uu = u.matmul_in(&u.conj_transpose_in(t).unwrap(), t).unwrap();
    uu.sub(&HyperMatrix::identity(u.rows(), u.n(), u.field())).unwrap().frobenius()
}

#[test]
fn factors_reconstruct_and_are_unitary() {
    let mut r = rng(1);
    for n in [2, 3, 4, 5] {
        for t in transforms(n) {
            for field in [Field::Real, Field::Complex] {
                let a = rand_matrix(&mut r, 8, 6, n, field);
                let f = tsvd(&a, &t).unwrap();
                assert_eq!(f.u.field(), field);
                assert!(hyper_rel_err(&reconstruct(&f).unwrap(), &a) < 1e-10, "{:?}", t.kind());
                assert!(unitarity_error(&f.u, &t) < 1e-10);
                assert!(unitarity_error(&f.v, &t) < 1e-10);
                let moduli = f.singular_moduli();
                assert!(moduli.windows(2).all(|w| w[0] >= w[1] - 1e-12));
                for i in 0..8 {
                    for k in 0..6 {
                        if i != k {
                            assert!(f.s.tube(i, k).iter().all(|z| z.norm() < 1e-12));
                        }
                    }
                }
            }
        }
    }
}

#[test]
fn singular_moduli_carry_the_frobenius_norm() {
    let mut r = rng(2);
    for n in [1, 2, 3, 6] {
        for t in transforms(n) {
            let a = rand_matrix(&mut r, 5, 7, n, Field::Complex);
            let moduli = singular_moduli(&a, &t).unwrap();
            let total: f64 = moduli.iter().map(|s| s * s).sum();
            assert!((total - a.frobenius().powi(2)).abs() < 1e-10 * total);
            let from_factors = tsvd(&a, &t).unwrap().singular_moduli();
            for (x, y) in moduli.iter().zip(&from_factors) {
                assert!((x - y).abs() < 1e-10 * moduli[0]);
            }
        }
    }
}

#[test]
fn rank_one_flat_matrix_has_one_singular_tube() {
    let u = [1.0, -2.0, 0.5, 3.0];
    let v = [2.0, 1.0, -1.0];
    let a = HyperMatrix::from_fn(4, 3, 4, Field::Real, |i, k, t| Complex64::new(if t == 0 { u[i] * v[k] } else { 0.0 }, 0.0));
    let moduli = singular_moduli(&a, &TubeTransform::dft(4).unwrap()).unwrap();
    assert!(moduli[0] > 1.0);
    assert!(moduli[1..].iter().all(|&s| s < 1e-12));
}

#[test]
fn adjoint_singular_values_are_the_pooled_slice_values() {
    let mut r = rng(3);
    for field in [Field::Real, Field::Complex] {
        let a = rand_matrix(&mut r, 5, 5, 4, field);
        let mut dense: Vec<f64> = dense_adjoint(&a).singular_values().iter().copied().collect();
        dense.sort_by(|x, y| y.total_cmp(x));
        // rebuild the pooled multiset from the tube moduli is impossible, so pool
        // the slice values of the spectrum directly
        let spec = a.cft();
        let mut pooled: Vec<f64> = spec.blocks().iter().flat_map(|b| b.singular_values().iter().copied().collect::<Vec<_>>()).collect();
        pooled.sort_by(|x, y| y.total_cmp(x));
        assert_eq!(dense.len(), pooled.len());
        for (x, y) in dense.iter().zip(&pooled) {
            assert!((x - y).abs() < 1e-10 * dense[0]);
        }
        // and the tube moduli are the per-index root mean squares of those values
        let moduli = singular_moduli(&a, &TubeTransform::dft(4).unwrap()).unwrap();
        for (i, m) in moduli.iter().enumerate() {
            let mean: f64 = spec.blocks().iter().map(|b| {
                let mut s: Vec<f64> = b.singular_values().iter().copied().collect();
                s.sort_by(|x, y| y.total_cmp(x));
                s[i] * s[i]
            }).sum::<f64>() / 4.0;
            assert!((m - mean.sqrt()).abs() < 1e-10 * moduli[0]);
        }
    }
}

#[test]
fn tessarine_svd_is_the_two_point_case() {
    let mut r = rng(4);
    let (l, m) = (5, 4);
    let a0 = rand_cmat(&mut r, l, m);
    let a1 = rand_cmat(&mut r, l, m);
    let a = HyperMatrix::from_fn(l, m, 2, Field::Complex, |i, k, t| if t == 0 { a0[(i, k)] } else { a1[(i, k)] });

    // change of basis, ordinary SVDs, and the back map
    let half = Complex64::new(0.5, 0.0);
    let plus = (&a0 + &a1).svd(true, true);
    let minus = (&a0 - &a1).svd(true, true);
    let f = tsvd(&a, &TubeTransform::dft(2).unwrap()).unwrap();
    let t = TubeTransform::dft(2).unwrap();
    for i in 0..m {
        let (sp, sm) = (plus.singular_values[i], minus.singular_values[i]);
        let tube = f.s.tube(i, i);
        assert!((tube[0] - Complex64::new((sp + sm) / 2.0, 0.0)).norm() < 1e-10);
        assert!((tube[1] - Complex64::new((sp - sm) / 2.0, 0.0)).norm() < 1e-10);

        // rank-one terms are free of the phase ambiguity of singular vectors
        let term_p = plus.u.as_ref().unwrap().column(i) * plus.v_t.as_ref().unwrap().row(i) * Complex64::new(sp, 0.0);
        let term_m = minus.u.as_ref().unwrap().column(i) * minus.v_t.as_ref().unwrap().row(i) * Complex64::new(sm, 0.0);
        let oracle0 = (&term_p + &term_m) * half;
        let oracle1 = (&term_p - &term_m) * half;

        let ui = HyperMatrix::from_fn(l, 1, 2, Field::Complex, |row, _, k| f.u.tube(row, i)[k]);
        let vi = HyperMatrix::from_fn(m, 1, 2, Field::Complex, |row, _, k| f.v.tube(row, i)[k]);
        let si = HyperMatrix::from_fn(1, 1, 2, Field::Complex, |_, _, k| tube[k]);
        let term = ui.matmul_in(&si, &t).unwrap().matmul_in(&vi.conj_transpose_in(&t).unwrap(), &t).unwrap();
        let got0 = DMatrix::from_fn(l, m, |row, col| term.tube(row, col)[0]);
        let got1 = DMatrix::from_fn(l, m, |row, col| term.tube(row, col)[1]);
        assert!((got0 - oracle0).norm() < 1e-10);
        assert!((got1 - oracle1).norm() < 1e-10);
    }
}

#[test]
fn truncation_error_is_the_discarded_energy() {
    let mut r = rng(5);
    for t in transforms(4) {
        let a = rand_matrix(&mut r, 7, 5, 4, Field::Real);
        let f = tsvd(&a, &t).unwrap();
        let moduli = f.singular_moduli();
        for keep in 0..=5 {
            let approx = reconstruct(&f.truncated(keep)).unwrap();
            let err = a.sub(&approx).unwrap().frobenius().powi(2);
            let tail: f64 = moduli[keep..].iter().map(|s| s * s).sum();
            assert!((err - tail).abs() < 1e-8 * a.frobenius().powi(2));
        }
    }
}

#[test]
fn skew_transform_is_unitary_with_the_stated_entries() {
    for n in [1, 2, 3, 5, 8] {
        let t = TubeTransform::new(TransformKind::SkewDft, n, polarpcp::Normalization::Unitary).unwrap();
        let w = t.matrix();
        let s = 1.0 / (n as f64).sqrt();
        for k in 0..n {
            for i in 0..n {
                let expected = Complex64::from_polar(s, -std::f64::consts::PI * (i * (2 * k + 1)) as f64 / n as f64);
                assert!((w[(k, i)] - expected).norm() < 1e-14);
            }
        }
        let gram = w.adjoint() * &w;
        assert!((gram - DMatrix::<Complex64>::identity(n, n)).norm() < 1e-12);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn von_neumann_extension(seed in any::<u64>(), n in 1usize..6, complex in prop::bool::ANY) {
        let field = if complex { Field::Complex } else { Field::Real };
        let mut r = rng(seed);
        let a = rand_matrix(&mut r, 4, 3, n, field);
        let b = rand_matrix(&mut r, 4, 3, n, field);
        let t = TubeTransform::dft(n).unwrap();
        let lhs = a.inner(&b).unwrap();
        let sa = singular_moduli(&a, &t).unwrap();
        let sb = singular_moduli(&b, &t).unwrap();
        let rhs: f64 = sa.iter().zip(&sb).map(|(x, y)| x * y).sum();
        prop_assert!(lhs <= rhs + 1e-9);
        // equality when both share singular vectors
        prop_assert!((a.inner(&a).unwrap() - sa.iter().map(|x| x * x).sum::<f64>()).abs() < 1e-9 * (1.0 + rhs));
    }

    #[test]
    fn tsvd_reconstructs(seed in any::<u64>(), l in 1usize..6, m in 1usize..6, n in 1usize..6, complex in prop::bool::ANY) {
        let field = if complex { Field::Complex } else { Field::Real };
        let a = rand_matrix(&mut rng(seed), l, m, n, field);
        for t in transforms(n) {
            let f = tsvd(&a, &t).unwrap();
            prop_assert!(hyper_rel_err(&reconstruct(&f).unwrap(), &a) < 1e-8);
            prop_assert!(unitarity_error(&f.u, &t) < 1e-8 * (l as f64));
            prop_assert!(unitarity_error(&f.v, &t) < 1e-8 * (m as f64));
        }
    }
}
