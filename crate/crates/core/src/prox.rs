//! Proximity operators for the hypercomplex l1 norm and trace norm.
//!
//! The l1 prox is group soft-thresholding with one group per entry (the real
//! unfolding of a scalar). The trace-norm prox shrinks the modulus of every
//! singular tube. Both have coefficient-domain and spectral-domain forms; the
//! spectral forms read the `sqrt(n)` gain from the spectrum's normalization.

use std::ops::Range;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::hyperalgebra::Field;
use crate::hypermatrix::{HyperMatrix, SpectralMatrix};
use crate::linalg;
use crate::transform::TubeTransform;
use crate::tsvd::{reconstruct, tsvd};

/// `sign(x) max(|x| - lambda, 0)`.
pub fn soft_threshold_real(x: f64, lambda: f64) -> f64 {
    if x > lambda {
        x - lambda
    } else if x < -lambda {
        x + lambda
    } else {
        0.0
    }
}

fn check_lambda(lambda: f64) -> Result<()> {
    if !(lambda >= 0.0) || !lambda.is_finite() {
        return Err(Error::InvalidParameter(format!("threshold must be finite and >= 0, got {lambda}")));
    }
    Ok(())
}

/// Shrinks one group towards zero by `lambda` in Euclidean norm.
///
/// Singleton groups go through [`soft_threshold_real`] so the scalar and group
/// forms agree bit for bit.
pub(crate) fn shrink_group(values: &mut [f64], lambda: f64) {
    if let [x] = values {
        *x = soft_threshold_real(*x, lambda);
        return;
    }
    let norm = values.iter().map(|v| v * v).sum::<f64>().sqrt();
    let factor = if norm > lambda { 1.0 - lambda / norm } else { 0.0 };
    if factor == 0.0 {
        values.fill(0.0);
    } else {
        values.iter_mut().for_each(|v| *v *= factor);
    }
}

/// Flat real vector partitioned into contiguous groups.
#[derive(Debug, Clone, PartialEq)]
pub struct GroupedVector {
    values: Vec<f64>,
    groups: Vec<Range<usize>>,
}

impl GroupedVector {
    pub fn new(values: Vec<f64>, groups: Vec<Range<usize>>) -> Result<Self> {
        let mut next = 0;
        for g in &groups {
            if g.start != next || g.end <= g.start {
                return Err(Error::InvalidParameter(format!(
                    "groups must be non-empty and contiguous, got {g:?} after index {next}"
                )));
            }
            next = g.end;
        }
        if next != values.len() {
            return Err(Error::InvalidParameter(format!(
                "groups cover {next} of {} values",
                values.len()
            )));
        }
        Ok(Self { values, groups })
    }

    /// Equal-size groups of `size` consecutive values.
    pub fn uniform(values: Vec<f64>, size: usize) -> Result<Self> {
        if size == 0 || values.len() % size != 0 {
            return Err(Error::InvalidParameter(format!(
                "cannot split {} values into groups of {size}",
                values.len()
            )));
        }
        let groups = (0..values.len() / size).map(|g| g * size..(g + 1) * size).collect();
        Self::new(values, groups)
    }

    /// One group per entry, laid out like the real unfolding of each scalar.
    pub fn from_entries(a: &HyperMatrix) -> Self {
        let size = a.slab_count();
        let values = entry_major_values(a);
        Self::uniform(values, size).expect("whole entries")
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn groups(&self) -> &[Range<usize>] {
        &self.groups
    }
}

/// Real coefficients of every entry in turn: `a_0 .. a_{n-1}` for `K_n`,
/// `Re a_0, Im a_0, .. , Re a_{n-1}, Im a_{n-1}` for `CK_n`.
fn entry_major_values(a: &HyperMatrix) -> Vec<f64> {
    match a.field() {
        Field::Real => a.data().iter().map(|z| z.re).collect(),
        Field::Complex => a.data().iter().flat_map(|z| [z.re, z.im]).collect(),
    }
}

/// Group-lasso prox: every group is scaled by `(1 - lambda / ||z_g||)_+`.
pub fn group_soft_threshold(z: &GroupedVector, lambda: f64) -> Result<GroupedVector> {
    check_lambda(lambda)?;
    let mut out = z.clone();
    for g in &z.groups {
        shrink_group(&mut out.values[g.clone()], lambda);
    }
    Ok(out)
}

/// Entrywise l1 prox `z -> (1 - lambda / |z|)_+ z` with `|.|` the algebra modulus.
pub fn prox_l1(z: &HyperMatrix, lambda: f64) -> Result<HyperMatrix> {
    check_lambda(lambda)?;
    let mut out = z.clone();
    let n = z.n();
    let mut buf = vec![0.0; z.slab_count()];
    for tube in out.data_mut().chunks_exact_mut(n) {
        match z.field() {
            Field::Real => {
                buf.iter_mut().zip(tube.iter()).for_each(|(b, a)| *b = a.re);
                shrink_group(&mut buf, lambda);
                tube.iter_mut().zip(&buf).for_each(|(a, &b)| a.re = b);
            }
            Field::Complex => {
                for (pair, a) in buf.chunks_exact_mut(2).zip(tube.iter()) {
                    pair[0] = a.re;
                    pair[1] = a.im;
                }
                shrink_group(&mut buf, lambda);
                for (pair, a) in buf.chunks_exact(2).zip(tube.iter_mut()) {
                    *a = Complex64::new(pair[0], pair[1]);
                }
            }
        }
    }
    Ok(out)
}

/// [`prox_l1`] applied to a spectrum: each entry's spectral tube is shrunk by
/// `lambda * gain`, which equals shrinking the coefficient tube by `lambda`.
pub fn prox_l1_spectral(z: &SpectralMatrix, lambda: f64) -> Result<SpectralMatrix> {
    check_lambda(lambda)?;
    let threshold = lambda * z.gain();
    let mut out = z.clone();
    let n = z.n();
    let mut buf = vec![0.0; 2 * n];
    for i in 0..z.rows() {
        for k in 0..z.cols() {
            for t in 0..n {
                let a = z.block(t)[(i, k)];
                buf[2 * t] = a.re;
                buf[2 * t + 1] = a.im;
            }
            shrink_group(&mut buf, threshold);
            for t in 0..n {
                out.block_mut(t)[(i, k)] = Complex64::new(buf[2 * t], buf[2 * t + 1]);
            }
        }
    }
    Ok(out)
}

/// Trace-norm prox in the coefficient domain: t-SVD, scale every singular
/// tube by `(1 - lambda / |sigma_i|)_+`, multiply back.
pub fn prox_trace(z: &HyperMatrix, lambda: f64, transform: &TubeTransform) -> Result<HyperMatrix> {
    check_lambda(lambda)?;
    let mut factors = tsvd(z, transform)?;
    let rank = z.rows().min(z.cols());
    for i in 0..rank {
        let tube = factors.s.tube_mut(i, i);
        let modulus = tube.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        let factor = if modulus > lambda { 1.0 - lambda / modulus } else { 0.0 };
        tube.iter_mut().for_each(|a| *a *= factor);
    }
    reconstruct(&factors)
}

/// How the singular values of the spectral slices are thresholded.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SliceShrink {
    /// Hypercomplex trace norm: the `i`-th singular values of all slices form
    /// one group (one singular tube).
    Tubes,
    /// Slice-wise nuclear norm of the unnormalized spectrum: every singular
    /// value is soft-thresholded on its own.
    Independent,
}

/// Trace-norm (or slice-wise nuclear-norm) prox computed entirely in the
/// spectral domain. Returns the result and the number of slice SVDs performed.
pub fn prox_trace_spectral(z: &SpectralMatrix, lambda: f64, shrink: SliceShrink) -> Result<(SpectralMatrix, usize)> {
    check_lambda(lambda)?;
    let slices = z.distinct_slices();
    let svds: Vec<(usize, linalg::SliceSvd)> = slices
        .par_iter()
        .map(|&k| Ok((k, linalg::svd(z.block(k), z.is_real_slice(k))?)))
        .collect::<Result<_>>()?;

    let n = z.n();
    let rank = z.rows().min(z.cols());
    // singular[k][i]; conjugate partner slices share singular values
    let mut singular = vec![Vec::new(); n];
    for (k, svd) in &svds {
        singular[*k] = svd.s.clone();
        let p = z.transform().real_partner(*k);
        if z.field() == Field::Real && p != *k {
            singular[p] = svd.s.clone();
        }
    }

    match shrink {
        SliceShrink::Tubes => {
            let threshold = lambda * z.gain();
            let mut group = vec![0.0; n];
            for i in 0..rank {
                for (g, s) in group.iter_mut().zip(&singular) {
                    *g = s[i];
                }
                shrink_group(&mut group, threshold);
                for (g, s) in group.iter().zip(singular.iter_mut()) {
                    s[i] = *g;
                }
            }
        }
        SliceShrink::Independent => {
            // the slice-wise nuclear norm is defined on the unnormalized spectrum
            let threshold = lambda * z.gain() / (n as f64).sqrt();
            for s in singular.iter_mut() {
                s.iter_mut().for_each(|x| *x = soft_threshold_real(*x, threshold));
            }
        }
    }

    let mut out = SpectralMatrix::zeros(z.rows(), z.cols(), z.transform(), z.field());
    for (k, svd) in &svds {
        *out.block_mut(*k) = low_rank_product(&svd.u, &singular[*k], &svd.v_t);
    }
    out.mirror_conjugates();
    Ok((out, svds.len()))
}

/// `U[:, :r] diag(s[:r]) V_t[:r, :]` over the nonzero values of `s`.
fn low_rank_product(u: &DMatrix<Complex64>, s: &[f64], v_t: &DMatrix<Complex64>) -> DMatrix<Complex64> {
    let r = s.iter().take_while(|&&x| x > 0.0).count();
    if r == 0 {
        return DMatrix::zeros(u.nrows(), v_t.ncols());
    }
    let mut scaled = u.columns(0, r).into_owned();
    for (mut col, &x) in scaled.column_iter_mut().zip(s) {
        col *= Complex64::new(x, 0.0);
    }
    scaled * v_t.rows(0, r)
}
