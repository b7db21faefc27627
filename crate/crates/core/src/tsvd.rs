//! Transform-parameterized tensor SVD.
//!
//! Tubes are mapped to the spectral domain, every frontal slice is SVD'd on
//! its own, and the factors are mapped back. Singular values are paired across
//! slices by index, so the `i`-th singular tube gathers the `i`-th largest
//! singular value of every slice.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::hyperalgebra::{Field, PolarScalar};
use crate::hypermatrix::{HyperMatrix, SpectralMatrix};
use crate::linalg;
use crate::transform::{Normalization, TubeTransform};

/// `A = U S V^*` in the algebra diagonalized by `transform`.
#[derive(Debug, Clone)]
pub struct TSVDFactors {
    pub u: HyperMatrix,
    /// `l x m`, nonzero tubes only on the diagonal.
    pub s: HyperMatrix,
    pub v: HyperMatrix,
    pub transform: TubeTransform,
}

fn spectral_transform(a: &HyperMatrix, transform: &TubeTransform) -> Result<TubeTransform> {
    if transform.len() != a.n() {
        return Err(Error::DimensionMismatch(format!(
            "transform of length {} for tubes of length {}",
            transform.len(),
            a.n()
        )));
    }
    // Factors are assembled from unnormalized spectra so that slice-unitary
    // blocks map to algebra-unitary U and V.
    Ok(transform.with_normalization(Normalization::Unnormalized))
}

pub fn tsvd(a: &HyperMatrix, transform: &TubeTransform) -> Result<TSVDFactors> {
    let transform = spectral_transform(a, transform)?;
    let (l, m, _) = a.shape();
    let spec = a.to_spectral(&transform)?;
    let field = a.field();

    let slices = spec.distinct_slices();
    let parts: Vec<(usize, DMatrix<Complex64>, DMatrix<Complex64>, DMatrix<Complex64>)> = slices
        .par_iter()
        .map(|&k| {
            let real = spec.is_real_slice(k);
            let svd = linalg::svd(spec.block(k), real)?;
            let u = linalg::complete_unitary(&svd.u, real);
            let v = linalg::complete_unitary(&svd.v_t.adjoint(), real);
            let mut sigma = DMatrix::zeros(l, m);
            for (i, &s) in svd.s.iter().enumerate() {
                sigma[(i, i)] = Complex64::new(s, 0.0);
            }
            Ok((k, u, sigma, v))
        })
        .collect::<Result<_>>()?;

    let mut u_spec = SpectralMatrix::zeros(l, l, &transform, field);
    let mut s_spec = SpectralMatrix::zeros(l, m, &transform, field);
    let mut v_spec = SpectralMatrix::zeros(m, m, &transform, field);
    for (k, u, sigma, v) in parts {
        *u_spec.block_mut(k) = u;
        *s_spec.block_mut(k) = sigma;
        *v_spec.block_mut(k) = v;
    }
    u_spec.mirror_conjugates();
    s_spec.mirror_conjugates();
    v_spec.mirror_conjugates();

    Ok(TSVDFactors {
        u: u_spec.to_hyper_with_field(field),
        s: s_spec.to_hyper_with_field(field),
        v: v_spec.to_hyper_with_field(field),
        transform,
    })
}

/// Moduli `|sigma_i| = sqrt(sum_k sigma_i(A_k)^2 / n)` of the singular tubes, descending.
pub fn singular_moduli(a: &HyperMatrix, transform: &TubeTransform) -> Result<Vec<f64>> {
    let transform = spectral_transform(a, transform)?;
    let spec = a.to_spectral(&transform)?;
    let rank = a.rows().min(a.cols());
    let mut sums = vec![0.0; rank];
    for k in spec.distinct_slices() {
        let weight = if a.field() == Field::Real && transform.real_partner(k) != k {
            2.0
        } else {
            1.0
        };
        for (acc, s) in sums.iter_mut().zip(linalg::singular_values(spec.block(k))?) {
            *acc += weight * s * s;
        }
    }
    let n = a.n() as f64;
    let mut moduli: Vec<f64> = sums.into_iter().map(|s| (s / n).sqrt()).collect();
    // index pairing already yields a non-increasing sequence
    moduli.sort_by(|x, y| y.total_cmp(x));
    Ok(moduli)
}

impl TSVDFactors {
    /// Diagonal tubes of `S`.
    pub fn singular_tubes(&self) -> Vec<PolarScalar> {
        let rank = self.s.rows().min(self.s.cols());
        (0..rank).map(|i| self.s.get(i, i)).collect()
    }

    pub fn singular_moduli(&self) -> Vec<f64> {
        self.singular_tubes().iter().map(PolarScalar::modulus).collect()
    }

    /// Copy with singular tubes `keep..` set to zero.
    pub fn truncated(&self, keep: usize) -> Self {
        let mut out = self.clone();
        let rank = self.s.rows().min(self.s.cols());
        for i in keep.min(rank)..rank {
            out.s.tube_mut(i, i).fill(Complex64::default());
        }
        out
    }
}

/// `U S V^*` in the factors' algebra.
pub fn reconstruct(f: &TSVDFactors) -> Result<HyperMatrix> {
    let (l, m) = (f.s.rows(), f.s.cols());
    if f.u.shape() != (l, l, f.s.n()) || f.v.shape() != (m, m, f.s.n()) || f.transform.len() != f.s.n() {
        return Err(Error::DimensionMismatch("inconsistent t-SVD factors".into()));
    }
    let us = f.u.matmul_in(&f.s, &f.transform)?;
    let v_star = f.v.conj_transpose_in(&f.transform)?;
    us.matmul_in(&v_star, &f.transform)
}
