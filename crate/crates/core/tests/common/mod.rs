#![allow(dead_code)]

use std::f64::consts::PI;

use nalgebra::DMatrix;
use polarpcp::{Complex64, Field, HyperMatrix, PolarScalar};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

pub type CMat = DMatrix<Complex64>;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn gauss(rng: &mut ChaCha8Rng) -> f64 {
    rng.sample(StandardNormal)
}

pub fn rand_coeff(rng: &mut ChaCha8Rng, field: Field) -> Complex64 {
    match field {
        Field::Real => Complex64::new(gauss(rng), 0.0),
        Field::Complex => Complex64::new(gauss(rng), gauss(rng)),
    }
}

pub fn rand_scalar(rng: &mut ChaCha8Rng, n: usize, field: Field) -> PolarScalar {
    let coeffs = (0..n).map(|_| rand_coeff(rng, field)).collect();
    PolarScalar::new(coeffs, field).unwrap()
}

pub fn rand_matrix(rng: &mut ChaCha8Rng, l: usize, m: usize, n: usize, field: Field) -> HyperMatrix {
    let data = (0..l * m * n).map(|_| rand_coeff(rng, field)).collect();
    HyperMatrix::from_data(l, m, n, field, data).unwrap()
}

pub fn rand_cmat(rng: &mut ChaCha8Rng, l: usize, m: usize) -> CMat {
    DMatrix::from_fn(l, m, |_, _| Complex64::new(gauss(rng), gauss(rng)))
}

/// `c_{ik} = a_{(i - k) mod n}`, written out from the definition.
pub fn circulant(a: &[Complex64]) -> CMat {
    let n = a.len();
    DMatrix::from_fn(n, n, |i, k| a[(i + n - k) % n])
}

/// Direct circular convolution.
pub fn convolve(a: &[Complex64], b: &[Complex64]) -> Vec<Complex64> {
    let n = a.len();
    (0..n)
        .map(|t| (0..n).map(|i| a[i] * b[(t + n - i) % n]).sum())
        .collect()
}

/// Unitary DFT matrix `F_{ki} = exp(-2 pi j i k / n) / sqrt(n)`.
pub fn unitary_dft(n: usize) -> CMat {
    let s = 1.0 / (n as f64).sqrt();
    DMatrix::from_fn(n, n, |k, i| Complex64::from_polar(s, -2.0 * PI * (i * k) as f64 / n as f64))
}

/// Stride permutation straight from its index formula:
/// row `i` is row `i s - (m - 1) floor(i s / m)` of the identity.
pub fn stride_permutation(m: usize, s: usize) -> CMat {
    let mut p = DMatrix::zeros(m, m);
    for i in 0..m {
        let col = i * s - (m - 1) * ((i * s) / m);
        p[(i, col)] = Complex64::new(1.0, 0.0);
    }
    p
}

pub fn kron_identity(l: usize, f: &CMat) -> CMat {
    let n = f.nrows();
    let mut out = DMatrix::zeros(l * n, l * n);
    for b in 0..l {
        out.view_mut((b * n, b * n), (n, n)).copy_from(f);
    }
    out
}

/// Dense adjoint built entry by entry from circulant blocks.
pub fn dense_adjoint(a: &HyperMatrix) -> CMat {
    let n = a.n();
    let mut out = DMatrix::zeros(a.rows() * n, a.cols() * n);
    for i in 0..a.rows() {
        for k in 0..a.cols() {
            out.view_mut((i * n, k * n), (n, n)).copy_from(&circulant(a.tube(i, k)));
        }
    }
    out
}

/// Product computed entry by entry with explicit tube convolutions.
pub fn convolution_product(a: &HyperMatrix, b: &HyperMatrix) -> HyperMatrix {
    let n = a.n();
    let field = if a.field() == Field::Real && b.field() == Field::Real {
        Field::Real
    } else {
        Field::Complex
    };
    let mut out = HyperMatrix::zeros(a.rows(), b.cols(), n, field);
    for i in 0..a.rows() {
        for k in 0..b.cols() {
            let mut acc = vec![Complex64::default(); n];
            for r in 0..a.cols() {
                for (x, y) in acc.iter_mut().zip(convolve(a.tube(i, r), b.tube(r, k))) {
                    *x += y;
                }
            }
            if field == Field::Real {
                acc.iter_mut().for_each(|z| z.im = 0.0);
            }
            out.tube_mut(i, k).copy_from_slice(&acc);
        }
    }
    out
}

pub fn rel_err(a: &CMat, b: &CMat) -> f64 {
    (a - b).norm() / b.norm().max(1e-300)
}

pub fn hyper_rel_err(a: &HyperMatrix, b: &HyperMatrix) -> f64 {
    a.sub(b).unwrap().frobenius() / b.frobenius().max(1e-300)
}

pub fn to_cmat_real(m: &DMatrix<f64>) -> CMat {
    m.map(|x| Complex64::new(x, 0.0))
}

/// Nelder-Mead simplex minimization with restarts.
pub fn nelder_mead(f: impl Fn(&[f64]) -> f64, x0: &[f64], step: f64, restarts: usize) -> Vec<f64> {
    let mut best = x0.to_vec();
    let mut scale = step;
    for _ in 0..restarts {
        best = nelder_mead_once(&f, &best, scale, 4000);
        scale *= 0.3;
    }
    best
}

fn nelder_mead_once(f: &impl Fn(&[f64]) -> f64, x0: &[f64], step: f64, iters: usize) -> Vec<f64> {
    let d = x0.len();
    let mut simplex: Vec<Vec<f64>> = vec![x0.to_vec()];
    for i in 0..d {
        let mut v = x0.to_vec();
        v[i] += step;
        simplex.push(v);
    }
    let mut values: Vec<f64> = simplex.iter().map(|v| f(v)).collect();
    for _ in 0..iters {
        let mut order: Vec<usize> = (0..=d).collect();
        order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
        simplex = order.iter().map(|&i| simplex[i].clone()).collect();
        values = order.iter().map(|&i| values[i]).collect();
        if (values[d] - values[0]).abs() < 1e-15 {
            break;
        }
        let centroid: Vec<f64> = (0..d).map(|j| simplex[..d].iter().map(|v| v[j]).sum::<f64>() / d as f64).collect();
        let along = |t: f64| -> Vec<f64> { (0..d).map(|j| centroid[j] + t * (simplex[d][j] - centroid[j])).collect() };
        let reflected = along(-1.0);
        let fr = f(&reflected);
        if fr < values[0] {
            let expanded = along(-2.0);
            let fe = f(&expanded);
            if fe < fr {
                simplex[d] = expanded;
                values[d] = fe;
            } else {
                simplex[d] = reflected;
                values[d] = fr;
            }
        } else if fr < values[d - 1] {
            simplex[d] = reflected;
            values[d] = fr;
        } else {
            let contracted = if fr < values[d] { along(-0.5) } else { along(0.5) };
            let fc = f(&contracted);
            if fc < values[d].min(fr) {
                simplex[d] = contracted;
                values[d] = fc;
            } else {
                for i in 1..=d {
                    simplex[i] = (0..d).map(|j| simplex[0][j] + 0.5 * (simplex[i][j] - simplex[0][j])).collect();
                    values[i] = f(&simplex[i]);
                }
            }
        }
    }
    let i = (0..=d).min_by(|&a, &b| values[a].total_cmp(&values[b])).unwrap();
    simplex[i].clone()
}

/// Singular value thresholding of an ordinary complex matrix.
pub fn svt(m: &CMat, tau: f64) -> CMat {
    let svd = m.clone().svd(true, true);
    let u = svd.u.unwrap();
    let v_t = svd.v_t.unwrap();
    let mut out = DMatrix::zeros(m.nrows(), m.ncols());
    for (i, &s) in svd.singular_values.iter().enumerate() {
        if s > tau {
            out += u.column(i) * v_t.row(i) * Complex64::new(s - tau, 0.0);
        }
    }
    out
}

/// Textbook inexact-ALM robust PCA on an ordinary complex matrix.
pub struct ReferencePcp {
    pub l: CMat,
    pub s: CMat,
    pub iterations: usize,
}

pub fn reference_pcp(x: &CMat, lambda: f64, tol: f64, max_iters: usize) -> ReferencePcp {
    let norm2 = x.clone().singular_values().max();
    let norm_inf = x.iter().map(|z| z.norm()).fold(0.0, f64::max);
    let mut y = x / Complex64::new(norm2.max(norm_inf / lambda), 0.0);
    let mut mu = 1.25 / norm2;
    let mut s = DMatrix::zeros(x.nrows(), x.ncols());
    let mut l = s.clone();
    let xf = x.norm();
    let mut iterations = 0;
    while iterations < max_iters {
        iterations += 1;
        let inv_mu = Complex64::new(1.0 / mu, 0.0);
        l = svt(&(x - &s + &y * inv_mu), 1.0 / mu);
        let z = x - &l + &y * inv_mu;
        let t = lambda / mu;
        s = z.map(|w| {
            let r = w.norm();
            if r > t {
                w * ((r - t) / r)
            } else {
                Complex64::default()
            }
        });
        let gap = x - &l - &s;
        y += &gap * Complex64::new(mu, 0.0);
        if gap.norm() / xf < tol {
            break;
        }
        mu *= 1.5;
    }
    ReferencePcp { l, s, iterations }
}

/// `L0 + S0` in the cyclic algebra: `L0` a product of random `l x r` and
/// `r x m` factors, `S0` a sparse matrix with `rho` of its entries nonzero.
pub fn low_rank_plus_sparse(
    rng: &mut ChaCha8Rng,
    l: usize,
    m: usize,
    n: usize,
    field: Field,
    r: usize,
    rho: f64,
) -> (HyperMatrix, HyperMatrix, HyperMatrix) {
    let scale = 1.0 / (l.max(m) as f64).sqrt();
    let a = rand_matrix(rng, l, r, n, field).scale(scale);
    let b = rand_matrix(rng, r, m, n, field).scale(scale);
    let low = a.matmul(&b).unwrap();
    let mut sparse = HyperMatrix::zeros(l, m, n, field);
    for i in 0..l {
        for k in 0..m {
            if rng.random_bool(rho) {
                let tube: Vec<Complex64> = (0..n).map(|_| rand_coeff(rng, field)).collect();
                sparse.tube_mut(i, k).copy_from_slice(&tube);
            }
        }
    }
    (low.add(&sparse).unwrap(), low, sparse)
}
