//! Thin wrappers over nalgebra's SVD used by the slice-wise algorithms.

use nalgebra::{ComplexField, DMatrix};
use num_complex::Complex64;

use crate::error::{Error, Result};

const SVD_EPS: f64 = 1e-15;
const SVD_MAX_ITERS: usize = 0; // 0 = until convergence

/// Thin SVD `M = U diag(s) V^*` with `s` sorted in descending order.
pub(crate) struct SliceSvd {
    pub u: DMatrix<Complex64>,
    pub s: Vec<f64>,
    pub v_t: DMatrix<Complex64>,
}

fn svd_generic<T: ComplexField<RealField = f64>>(m: DMatrix<T>) -> Result<(DMatrix<T>, Vec<f64>, DMatrix<T>)> {
    let (rows, cols) = m.shape();
    let svd = m
        .try_svd(true, true, SVD_EPS, SVD_MAX_ITERS)
        .ok_or(Error::SvdFailed { rows, cols })?;
    let s: Vec<f64> = svd.singular_values.iter().copied().collect();
    if !s.iter().all(|x| x.is_finite()) {
        return Err(Error::SvdFailed { rows, cols });
    }
    let u = svd.u.ok_or(Error::SvdFailed { rows, cols })?;
    let v_t = svd.v_t.ok_or(Error::SvdFailed { rows, cols })?;
    Ok((u, s, v_t))
}

fn complexify(m: &DMatrix<f64>) -> DMatrix<Complex64> {
    m.map(|x| Complex64::new(x, 0.0))
}

/// SVD of a slice. With `real = true` the imaginary parts are ignored and the
/// factors are computed in real arithmetic, so they come out exactly real.
pub(crate) fn svd(m: &DMatrix<Complex64>, real: bool) -> Result<SliceSvd> {
    let (u, s, v_t) = if real {
        let (u, s, v_t) = svd_generic(m.map(|z| z.re))?;
        (complexify(&u), s, complexify(&v_t))
    } else {
        svd_generic(m.clone())?
    };
    debug_assert!(s.windows(2).all(|w| w[0] >= w[1]));
    Ok(SliceSvd { u, s, v_t })
}

pub(crate) fn singular_values(m: &DMatrix<Complex64>) -> Result<Vec<f64>> {
    let (rows, cols) = m.shape();
    let mut s: Vec<f64> = m
        .clone()
        .try_svd(false, false, SVD_EPS, SVD_MAX_ITERS)
        .ok_or(Error::SvdFailed { rows, cols })?
        .singular_values
        .iter()
        .copied()
        .collect();
    s.sort_by(|a, b| b.total_cmp(a));
    Ok(s)
}

fn complete_generic<T: ComplexField<RealField = f64>>(q: &DMatrix<T>) -> DMatrix<T> {
    let (dim, p) = q.shape();
    if p >= dim {
        return q.clone();
    }
    let mut stacked = DMatrix::<T>::zeros(dim, p + dim);
    stacked.columns_mut(0, p).copy_from(q);
    stacked.columns_mut(p, dim).fill_with_identity();
    let full = stacked.qr().q();
    let mut out = DMatrix::zeros(dim, dim);
    out.columns_mut(0, p).copy_from(q);
    out.columns_mut(p, dim - p).copy_from(&full.columns(p, dim - p));
    out
}

/// Extends the orthonormal columns of `q` to a `dim x dim` unitary matrix.
/// The first columns are `q` itself; the rest come from a Householder QR of `[q | I]`.
pub(crate) fn complete_unitary(q: &DMatrix<Complex64>, real: bool) -> DMatrix<Complex64> {
    if real {
        complexify(&complete_generic(&q.map(|z| z.re)))
    } else {
        complete_generic(q)
    }
}
