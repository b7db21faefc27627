use std::cell::Cell;

use nalgebra::DMatrix;
use num_complex::Complex64;

use super::HyperMatrix;
use crate::error::{Error, Result};
use crate::hyperalgebra::Field;
use crate::transform::{Normalization, TubeTransform};

thread_local! {
    static MATRIX_TRANSFORMS: Cell<usize> = const { Cell::new(0) };
}

/// Number of whole-matrix forward or inverse tube transforms performed so far
/// on the current thread.
pub fn matrix_transform_count() -> usize {
    MATRIX_TRANSFORMS.with(Cell::get)
}

fn count_matrix_transform() {
    MATRIX_TRANSFORMS.with(|c| c.set(c.get() + 1));
}

/// Relative tolerance for deciding that a spectrum came from a real tensor.
const CONJ_SYMMETRY_RTOL: f64 = 1e-10;

/// Transform-domain form of a [`HyperMatrix`]: block `k` holds spectral index
/// `k` of every tube.
///
/// `field` records the field of the coefficient-domain matrix; for a real
/// field only the slices in [`distinct_slices`](Self::distinct_slices) carry
/// independent information and the rest are their complex conjugates.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralMatrix {
    rows: usize,
    cols: usize,
    field: Field,
    transform: TubeTransform,
    blocks: Vec<DMatrix<Complex64>>,
}

impl SpectralMatrix {
    pub fn from_hyper(a: &HyperMatrix, transform: &TubeTransform) -> Result<Self> {
        if transform.len() != a.n() {
            return Err(Error::DimensionMismatch(format!(
                "transform of length {} applied to tubes of length {}",
                transform.len(),
                a.n()
            )));
        }
        let (rows, cols, n) = a.shape();
        let mut buf = a.data().to_vec();
        transform.forward_in_place(&mut buf);
        count_matrix_transform();
        let blocks = (0..n)
            .map(|t| DMatrix::from_fn(rows, cols, |i, k| buf[(i * cols + k) * n + t]))
            .collect();
        Ok(Self {
            rows,
            cols,
            field: a.field(),
            transform: transform.clone(),
            blocks,
        })
    }

    pub fn from_blocks(blocks: Vec<DMatrix<Complex64>>, transform: &TubeTransform, field: Field) -> Result<Self> {
        if blocks.len() != transform.len() {
            return Err(Error::DimensionMismatch(format!(
                "{} blocks for a transform of length {}",
                blocks.len(),
                transform.len()
            )));
        }
        let (rows, cols) = blocks[0].shape();
        if blocks.iter().any(|b| b.shape() != (rows, cols)) {
            return Err(Error::DimensionMismatch("spectral blocks differ in shape".into()));
        }
        Ok(Self {
            rows,
            cols,
            field,
            transform: transform.clone(),
            blocks,
        })
    }

    pub fn zeros(rows: usize, cols: usize, transform: &TubeTransform, field: Field) -> Self {
        Self {
            rows,
            cols,
            field,
            transform: transform.clone(),
            blocks: vec![DMatrix::zeros(rows, cols); transform.len()],
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn n(&self) -> usize {
        self.blocks.len()
    }

    pub fn field(&self) -> Field {
        self.field
    }

    pub fn transform(&self) -> &TubeTransform {
        &self.transform
    }

    pub fn normalization(&self) -> Normalization {
        self.transform.normalization()
    }

    /// `||spectrum|| / ||coefficients||` for this spectrum's normalization.
    pub fn gain(&self) -> f64 {
        self.transform.gain()
    }

    pub fn blocks(&self) -> &[DMatrix<Complex64>] {
        &self.blocks
    }

    pub fn block(&self, k: usize) -> &DMatrix<Complex64> {
        &self.blocks[k]
    }

    pub fn block_mut(&mut self, k: usize) -> &mut DMatrix<Complex64> {
        &mut self.blocks[k]
    }

    pub fn into_blocks(self) -> Vec<DMatrix<Complex64>> {
        self.blocks
    }

    /// Slices that must be processed independently: all of them for a complex
    /// field, one representative per conjugate pair for a real field.
    pub fn distinct_slices(&self) -> Vec<usize> {
        distinct_slices(&self.transform, self.field)
    }

    /// Whether slice `k` is its own conjugate partner of a real-field spectrum,
    /// so that its entries are real.
    pub fn is_real_slice(&self, k: usize) -> bool {
        self.field == Field::Real && self.transform.real_partner(k) == k
    }

    /// Overwrites every non-representative slice with the conjugate of its partner.
    pub fn mirror_conjugates(&mut self) {
        if self.field != Field::Real {
            return;
        }
        for k in 0..self.n() {
            let p = self.transform.real_partner(k);
            if k < p {
                self.blocks[p] = self.blocks[k].map(|z| z.conj());
            }
        }
    }

    pub fn is_conjugate_symmetric(&self) -> bool {
        let scale = self
            .blocks
            .iter()
            .flat_map(|b| b.iter())
            .map(|z| z.norm())
            .fold(0.0, f64::max);
        let tol = CONJ_SYMMETRY_RTOL * scale.max(f64::MIN_POSITIVE);
        (0..self.n()).all(|k| {
            let p = self.transform.real_partner(k);
            self.blocks[k]
                .iter()
                .zip(self.blocks[p].iter())
                .all(|(a, b)| (a - b.conj()).norm() <= tol)
        })
    }

    /// Inverse transform; the result is real exactly when the spectrum is
    /// conjugate-symmetric.
    pub fn to_hyper(&self) -> HyperMatrix {
        let field = if self.is_conjugate_symmetric() {
            Field::Real
        } else {
            Field::Complex
        };
        self.to_hyper_with_field(field)
    }

    /// Inverse transform into the given field (imaginary parts are dropped for `Real`).
    pub fn to_hyper_with_field(&self, field: Field) -> HyperMatrix {
        let (rows, cols, n) = (self.rows, self.cols, self.n());
        let mut data = Vec::with_capacity(rows * cols * n);
        for i in 0..rows {
            for k in 0..cols {
                data.extend(self.blocks.iter().map(|b| b[(i, k)]));
            }
        }
        self.transform.inverse_in_place(&mut data);
        count_matrix_transform();
        if field == Field::Real {
            data.iter_mut().for_each(|z| z.im = 0.0);
        }
        HyperMatrix::from_data(rows, cols, n, field, data).expect("shape preserved")
    }

    fn check_compatible(&self, other: &Self) -> Result<()> {
        if self.transform != other.transform {
            return Err(Error::DimensionMismatch(format!(
                "spectra under {:?} and {:?}",
                self.transform, other.transform
            )));
        }
        if (self.rows, self.cols) != (other.rows, other.cols) {
            return Err(Error::DimensionMismatch(format!(
                "{}x{} vs {}x{} spectra",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        Ok(())
    }

    /// Blockwise product. Under unitary normalization each block product picks
    /// up the `sqrt(n)` factor of the convolution theorem.
    pub fn matmul(&self, other: &Self) -> Result<Self> {
        if self.transform != other.transform || self.cols != other.rows {
            return Err(Error::DimensionMismatch(format!(
                "cannot multiply {}x{} by {}x{} spectra",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let factor = (self.n() as f64).sqrt() / self.gain();
        let blocks = self
            .blocks
            .iter()
            .zip(&other.blocks)
            .map(|(a, b)| {
                let p = a * b;
                if factor == 1.0 {
                    p
                } else {
                    p * Complex64::new(factor, 0.0)
                }
            })
            .collect();
        Ok(Self {
            rows: self.rows,
            cols: other.cols,
            field: self.field.join(other.field),
            transform: self.transform.clone(),
            blocks,
        })
    }

    pub fn conj_transpose(&self) -> Self {
        Self {
            rows: self.cols,
            cols: self.rows,
            field: self.field,
            transform: self.transform.clone(),
            blocks: self.blocks.iter().map(|b| b.adjoint()).collect(),
        }
    }

    /// `self + alpha * other`.
    pub fn add_scaled(&self, other: &Self, alpha: f64) -> Result<Self> {
        self.check_compatible(other)?;
        let blocks = self
            .blocks
            .iter()
            .zip(&other.blocks)
            .map(|(a, b)| a.zip_map(b, |x, y| x + y * alpha))
            .collect();
        Ok(Self {
            blocks,
            field: self.field.join(other.field),
            ..self.clone()
        })
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.add_scaled(other, 1.0)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add_scaled(other, -1.0)
    }

    pub fn scale(&self, s: f64) -> Self {
        Self {
            blocks: self.blocks.iter().map(|b| b.map(|z| z * s)).collect(),
            ..self.clone()
        }
    }

    /// Operator norm of the algebra matrix: the largest singular value over
    /// the unnormalized spectral slices.
    pub fn operator_norm(&self) -> Result<f64> {
        let factor = (self.n() as f64).sqrt() / self.gain();
        let mut best = 0.0f64;
        for k in self.distinct_slices() {
            if let Some(&s) = crate::linalg::singular_values(&self.blocks[k])?.first() {
                best = best.max(s);
            }
        }
        Ok(best * factor)
    }

    /// Sum of squared moduli of all spectral entries.
    pub fn norm_sqr(&self) -> f64 {
        self.blocks.iter().flat_map(|b| b.iter()).map(|z| z.norm_sqr()).sum()
    }

    /// Frobenius norm of the coefficient-domain matrix, computed from the spectrum.
    pub fn coefficient_frobenius(&self) -> f64 {
        self.norm_sqr().sqrt() / self.gain()
    }
}

pub(crate) fn distinct_slice_count(transform: &TubeTransform, field: Field) -> usize {
    distinct_slices(transform, field).len()
}

pub(crate) fn distinct_slices(transform: &TubeTransform, field: Field) -> Vec<usize> {
    (0..transform.len())
        .filter(|&k| field == Field::Complex || k <= transform.real_partner(k))
        .collect()
}
