//! Dense-matrix oracles and shared fixtures for integration tests.
#![allow(dead_code)]

use darboux_core::models::{hermite_seed, laplacian, oscillator_model, split_even_odd};
use darboux_core::{
    build_transform, build_transform_scaled, solve_recurrence, DarbouxOperator, JacobiOperator, RecurrenceMode, Seq,
    SeqKind, Transform, TransformOptions,
};
use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

pub fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

pub fn dense_jacobi(op: &JacobiOperator) -> DMatrix<f64> {
    let n = op.n_sites();
    let mut m = DMatrix::zeros(n, n);
    for k in 0..n {
        m[(k, k)] = op.q()[k];
        if k + 1 < n {
            m[(k, k + 1)] = op.a()[k + 1];
            m[(k + 1, k)] = op.a()[k + 1];
        }
    }
    m
}

pub fn dense_complex(m: &DMatrix<f64>) -> DMatrix<Complex64> {
    m.map(c)
}

/// `L` as a dense upper-bidiagonal matrix.
pub fn dense_l(l: &DarbouxOperator) -> DMatrix<Complex64> {
    let n = l.n_sites();
    let mut m = DMatrix::from_element(n, n, c(0.0));
    for k in 0..n {
        m[(k, k)] = l.b_coef()[k];
        if k + 1 < n {
            m[(k, k + 1)] = l.a_coef()[k + 1];
        }
    }
    m
}

pub fn to_dvector(s: &Seq) -> DVector<Complex64> {
    DVector::from_column_slice(&s.values)
}

pub fn laplacian_seed(n: usize, lambda: f64) -> Seq {
    solve_recurrence(&laplacian(n), lambda, c(1.0), RecurrenceMode::Physical)
        .unwrap()
        .with_energy(lambda, SeqKind::Seed)
}

/// Discrete Laplacian on `n` sites transformed at `λ`.
pub fn laplacian_fixture(n: usize, lambda: f64) -> (JacobiOperator, Seq, Transform) {
    let h0 = laplacian(n);
    let seed = laplacian_seed(n, lambda);
    let t = build_transform(&h0, &seed, &TransformOptions::default()).unwrap();
    (h0, seed, t)
}

/// Even chain of the oscillator-basis free particle with `n` sites, transformed
/// with the Hermite seed at `λ`.
pub fn oscillator_even_fixture(n: usize, lambda: f64) -> (JacobiOperator, Transform) {
    let (even, _) = split_even_odd(&oscillator_model(2 * n).unwrap()).unwrap();
    let seed = hermite_seed(lambda, 2 * n).unwrap().restrict_parity(0);
    let t = build_transform_scaled(&even, &seed, &TransformOptions::default()).unwrap();
    (even, t)
}

/// Largest entry of `m` restricted to `rows`.
pub fn max_abs_rows(m: &DMatrix<Complex64>, rows: std::ops::Range<usize>) -> f64 {
    let mut worst: f64 = 0.0;
    for r in rows {
        for k in 0..m.ncols() {
            worst = worst.max(m[(r, k)].norm());
        }
    }
    worst
}

/// Eigenvalues of a symmetric tridiagonal matrix by Sturm-count bisection,
/// ascending. Unlike a general dense solver this never misses a pair.
pub fn tridiagonal_eigenvalues(op: &JacobiOperator) -> Vec<f64> {
    let n = op.n_sites();
    let (d, a) = (op.q(), op.a());
    let radius = |k: usize| a[k].abs() + op.a_at(k + 1).abs();
    let lo = (0..n).map(|k| d[k] - radius(k)).fold(f64::INFINITY, f64::min);
    let hi = (0..n).map(|k| d[k] + radius(k)).fold(f64::NEG_INFINITY, f64::max);
    let below = |x: f64| -> usize {
        let mut count = 0;
        let mut piv = 1.0;
        for k in 0..n {
            let off = if k > 0 { a[k] * a[k] / piv } else { 0.0 };
            piv = d[k] - x - off;
            if piv == 0.0 {
                piv = -f64::EPSILON * (hi - lo).max(1.0);
            }
            if piv < 0.0 {
                count += 1;
            }
        }
        count
    };
    (0..n)
        .map(|j| {
            let (mut l, mut h) = (lo, hi);
            for _ in 0..200 {
                let mid = 0.5 * (l + h);
                if mid == l || mid == h {
                    break;
                }
                if below(mid) > j {
                    h = mid;
                } else {
                    l = mid;
                }
            }
            0.5 * (l + h)
        })
        .collect()
}

/// Unit eigenvector for a known eigenvalue by inverse iteration.
pub fn tridiagonal_eigenvector(op: &JacobiOperator, eigenvalue: f64) -> DVector<f64> {
    let n = op.n_sites();
    let m = dense_jacobi(op);
    let shift = eigenvalue + 1e-10 * (1.0 + eigenvalue.abs());
    let lu = (m - DMatrix::identity(n, n) * shift).lu();
    let mut v = DVector::from_fn(n, |k, _| 1.0 + 0.1 * k as f64);
    for _ in 0..3 {
        v = lu.solve(&v).expect("shifted matrix is regular");
        v /= v.norm();
    }
    v
}

/// `⟨Lψ, Lψ⟩/⟨ψ, ψ⟩ - |A|(E - λ)` for every eigenvector of the leading
/// `n x n` block of `h0`, using a seed one site longer so the `n`-block
/// identities have no truncated rows.
pub fn norm_relation_defects(h0_long: &JacobiOperator, t_long: &Transform) -> Vec<(f64, f64)> {
    let n = h0_long.n_sites() - 1;
    let block = h0_long.truncated(n).unwrap();
    let l = dense_l(&t_long.darboux);
    let abs_a = t_long.darboux.const_a().abs();
    let lambda = t_long.darboux.lambda();
    tridiagonal_eigenvalues(&block)
        .into_iter()
        .map(|e| {
            let u = tridiagonal_eigenvector(&block, e);
            let mut v = DVector::from_element(n + 1, c(0.0));
            for k in 0..n {
                v[k] = c(u[k]);
            }
            let lv = &l * &v;
            let ratio = lv.dotc(&lv).re / v.dotc(&v).re;
            (e, ratio - abs_a * (e - lambda))
        })
        .collect()
}
