//! Matrices over `K_n` / `CK_n`.
//!
//! A [`HyperMatrix`] is an `l x m x n` coefficient tensor stored tube-contiguous
//! (the `n` coefficients of entry `(i, k)` are adjacent). Products, conjugate
//! transposes and norms are computed through the spectral form
//! [`SpectralMatrix`], which holds one `l x m` complex block per transform index.

mod pht;
mod spectral;

pub use pht::{read_pht, read_pht_file, write_pht, write_pht_file};
pub use spectral::{matrix_transform_count, SpectralMatrix};
pub(crate) use spectral::distinct_slice_count;

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::hyperalgebra::{Field, PolarScalar};
use crate::transform::TubeTransform;

#[derive(Debug, Clone, PartialEq)]
pub struct HyperMatrix {
    rows: usize,
    cols: usize,
    n: usize,
    field: Field,
    data: Vec<Complex64>,
}

impl HyperMatrix {
    pub fn zeros(rows: usize, cols: usize, n: usize, field: Field) -> Self {
        Self {
            rows,
            cols,
            n,
            field,
            data: vec![Complex64::default(); rows * cols * n],
        }
    }

    pub fn identity(size: usize, n: usize, field: Field) -> Self {
        let mut m = Self::zeros(size, size, n, field);
        for i in 0..size {
            m.tube_mut(i, i)[0] = Complex64::new(1.0, 0.0);
        }
        m
    }

    /// Builds from tube-contiguous data: index `((i * cols) + k) * n + t`.
    pub fn from_data(rows: usize, cols: usize, n: usize, field: Field, data: Vec<Complex64>) -> Result<Self> {
        if rows == 0 || cols == 0 || n == 0 {
            return Err(Error::InvalidParameter(format!(
                "hypermatrix dimensions must be positive, got {rows}x{cols}x{n}"
            )));
        }
        if data.len() != rows * cols * n {
            return Err(Error::DimensionMismatch(format!(
                "{} coefficients for a {rows}x{cols}x{n} tensor",
                data.len()
            )));
        }
        if field == Field::Real && data.iter().any(|c| c.im != 0.0) {
            return Err(Error::InvalidParameter(
                "real-field matrix has coefficients with nonzero imaginary part".into(),
            ));
        }
        Ok(Self {
            rows,
            cols,
            n,
            field,
            data,
        })
    }

    /// Entry `(i, k)` gets coefficient `t` from `f(i, k, t)`.
    pub fn from_fn(
        rows: usize,
        cols: usize,
        n: usize,
        field: Field,
        mut f: impl FnMut(usize, usize, usize) -> Complex64,
    ) -> Self {
        let mut data = Vec::with_capacity(rows * cols * n);
        for i in 0..rows {
            for k in 0..cols {
                for t in 0..n {
                    let mut c = f(i, k, t);
                    if field == Field::Real {
                        c.im = 0.0;
                    }
                    data.push(c);
                }
            }
        }
        Self {
            rows,
            cols,
            n,
            field,
            data,
        }
    }

    /// Stacks `n` frontal slices (slice `t` holds coefficient `t` of every entry).
    pub fn from_slices(slices: &[DMatrix<Complex64>], field: Field) -> Result<Self> {
        let Some(first) = slices.first() else {
            return Err(Error::InvalidParameter("no slices given".into()));
        };
        let (rows, cols) = first.shape();
        if slices.iter().any(|s| s.shape() != (rows, cols)) {
            return Err(Error::DimensionMismatch("slices differ in shape".into()));
        }
        let data = (0..rows)
            .flat_map(|i| (0..cols).flat_map(move |k| slices.iter().map(move |s| s[(i, k)])))
            .collect();
        Self::from_data(rows, cols, slices.len(), field, data)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    /// Algebra dimension (tube length).
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn shape(&self) -> (usize, usize, usize) {
        (self.rows, self.cols, self.n)
    }

    pub fn field(&self) -> Field {
        self.field
    }

    pub fn data(&self) -> &[Complex64] {
        &self.data
    }

    pub fn data_mut(&mut self) -> &mut [Complex64] {
        &mut self.data
    }

    pub fn into_data(self) -> Vec<Complex64> {
        self.data
    }

    fn offset(&self, i: usize, k: usize) -> usize {
        (i * self.cols + k) * self.n
    }

    pub fn tube(&self, i: usize, k: usize) -> &[Complex64] {
        let o = self.offset(i, k);
        &self.data[o..o + self.n]
    }

    pub fn tube_mut(&mut self, i: usize, k: usize) -> &mut [Complex64] {
        let o = self.offset(i, k);
        &mut self.data[o..o + self.n]
    }

    pub fn get(&self, i: usize, k: usize) -> PolarScalar {
        PolarScalar::new(self.tube(i, k).to_vec(), self.field).expect("tube invariants hold")
    }

    pub fn set(&mut self, i: usize, k: usize, p: &PolarScalar) -> Result<()> {
        if p.n() != self.n {
            return Err(Error::DimensionMismatch(format!("scalar of length {} into n = {}", p.n(), self.n)));
        }
        if self.field == Field::Real && p.field() == Field::Complex {
            return Err(Error::InvalidParameter("complex scalar into a real-field matrix".into()));
        }
        self.tube_mut(i, k).copy_from_slice(p.coeffs());
        Ok(())
    }

    /// Frontal slice `t`: the `l x m` matrix of coefficient `t`.
    pub fn slice(&self, t: usize) -> DMatrix<Complex64> {
        DMatrix::from_fn(self.rows, self.cols, |i, k| self.tube(i, k)[t])
    }

    /// Same coefficients viewed over `CK_n`.
    pub fn to_complex_field(&self) -> Self {
        Self {
            field: Field::Complex,
            ..self.clone()
        }
    }

    /// Reinterprets as `K_n`; fails if any coefficient has a nonzero imaginary part.
    pub fn to_real_field(&self) -> Result<Self> {
        Self::from_data(self.rows, self.cols, self.n, Field::Real, self.data.clone())
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|c| c.re.is_finite() && c.im.is_finite())
    }

    fn check_same_shape(&self, other: &Self) -> Result<()> {
        if self.shape() != other.shape() {
            return Err(Error::DimensionMismatch(format!(
                "{:?} vs {:?}",
                self.shape(),
                other.shape()
            )));
        }
        Ok(())
    }

    fn zip_with(&self, other: &Self, f: impl Fn(Complex64, Complex64) -> Complex64) -> Result<Self> {
        self.check_same_shape(other)?;
        Ok(Self {
            rows: self.rows,
            cols: self.cols,
            n: self.n,
            field: self.field.join(other.field),
            data: self.data.iter().zip(&other.data).map(|(&a, &b)| f(a, b)).collect(),
        })
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| a - b)
    }

    pub fn scale(&self, s: f64) -> Self {
        Self {
            data: self.data.iter().map(|a| a * s).collect(),
            ..self.clone()
        }
    }

    /// Adjoint (block-circulant) matrix of size `ln x mn`; block `(i, k)` is `chi(A_ik)`.
    pub fn adjoint(&self) -> DMatrix<Complex64> {
        let n = self.n;
        DMatrix::from_fn(self.rows * n, self.cols * n, |r, c| {
            let (i, p) = (r / n, r % n);
            let (k, q) = (c / n, c % n);
            self.tube(i, k)[(p + n - q) % n]
        })
    }

    /// Spectral form under an arbitrary tube transform.
    pub fn to_spectral(&self, transform: &TubeTransform) -> Result<SpectralMatrix> {
        SpectralMatrix::from_hyper(self, transform)
    }

    /// Circulant Fourier transform: the diagonal blocks of
    /// `P (I_l (x) F_n) chi(A) (I_m (x) F_n^*) Q^T` with unitary `F_n`, where `P`
    /// and `Q` gather rows and columns with stride `n` (`P = P_{ln,l}^T`).
    /// Block `k` is the unnormalized DFT coefficient `k` of every tube.
    pub fn cft(&self) -> SpectralMatrix {
        let dft = TubeTransform::dft(self.n).expect("n >= 1");
        SpectralMatrix::from_hyper(self, &dft).expect("matching length")
    }

    /// Product in the cyclic algebra.
    pub fn matmul(&self, other: &Self) -> Result<Self> {
        let dft = TubeTransform::dft(self.n)?;
        self.matmul_in(other, &dft)
    }

    /// Product in the algebra diagonalized by `transform`.
    pub fn matmul_in(&self, other: &Self, transform: &TubeTransform) -> Result<Self> {
        if self.cols != other.rows || self.n != other.n {
            return Err(Error::DimensionMismatch(format!(
                "cannot multiply {:?} by {:?}",
                self.shape(),
                other.shape()
            )));
        }
        let a = self.to_spectral(transform)?;
        let b = other.to_spectral(transform)?;
        Ok(a.matmul(&b)?.to_hyper_with_field(self.field.join(other.field)))
    }

    /// Conjugate transpose in the cyclic algebra: entry `(i, k)` is `conj(A_ki)`.
    pub fn conj_transpose(&self) -> Self {
        let n = self.n;
        let mut out = Self::zeros(self.cols, self.rows, n, self.field);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let src = self.tube(i, k);
                let dst = out.tube_mut(k, i);
                for (t, d) in dst.iter_mut().enumerate() {
                    *d = src[(n - t) % n].conj();
                }
            }
        }
        out
    }

    /// Conjugate transpose in the algebra diagonalized by `transform`.
    pub fn conj_transpose_in(&self, transform: &TubeTransform) -> Result<Self> {
        Ok(self.to_spectral(transform)?.conj_transpose().to_hyper_with_field(self.field))
    }

    /// `Re tr(A B^*)`, equal to the Euclidean inner product of all coefficients.
    pub fn inner(&self, other: &Self) -> Result<f64> {
        self.check_same_shape(other)?;
        Ok(self.data.iter().zip(&other.data).map(|(a, b)| (a * b.conj()).re).sum())
    }

    pub fn frobenius(&self) -> f64 {
        self.data.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Largest entry modulus (the `||X||_inf` used to scale the dual initializer).
    pub fn max_modulus(&self) -> f64 {
        self.data
            .chunks_exact(self.n)
            .map(|tube| tube.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt())
            .fold(0.0, f64::max)
    }

    /// Operator norm of the adjoint: the largest singular value over all CFT blocks.
    pub fn spectral_norm(&self) -> Result<f64> {
        self.cft().operator_norm()
    }

    /// Number of real slabs in [`unfold`](Self::unfold): `n` over `K_n`, `2n` over `CK_n`.
    pub fn slab_count(&self) -> usize {
        match self.field {
            Field::Real => self.n,
            Field::Complex => 2 * self.n,
        }
    }

    /// Real unfolding `[Im_0 A, ..., Im_{n-1} A]` (real field) or
    /// `[Re Im_0 A, Im Im_0 A, ..., Re Im_{n-1} A, Im Im_{n-1} A]` (complex field).
    pub fn unfold(&self) -> DMatrix<f64> {
        let slabs = self.slab_count();
        let cols = self.cols;
        DMatrix::from_fn(self.rows, cols * slabs, |i, c| {
            let (slab, k) = (c / cols, c % cols);
            let a = self.tube(i, k);
            match self.field {
                Field::Real => a[slab].re,
                Field::Complex if slab % 2 == 0 => a[slab / 2].re,
                Field::Complex => a[slab / 2].im,
            }
        })
    }

    /// Column-major vectorization of [`unfold`](Self::unfold).
    pub fn vec(&self) -> Vec<f64> {
        self.unfold().as_slice().to_vec()
    }
}

/// Stride-by-`s` permutation of order `m` as an index map: `(P x)_i = x[perm[i]]`
/// with `perm[i] = i s - (m - 1) floor(i s / m)`.
pub fn stride_perm(m: usize, s: usize) -> Result<Vec<usize>> {
    if m == 0 || s == 0 || m % s != 0 {
        return Err(Error::InvalidParameter(format!(
            "stride permutation needs s | m with m, s >= 1 (m = {m}, s = {s})"
        )));
    }
    Ok((0..m)
        .map(|i| {
            let is = i * s;
            is - (m - 1) * (is / m)
        })
        .collect())
}

/// Dense `m x m` form of [`stride_perm`].
pub fn stride_perm_matrix(m: usize, s: usize) -> Result<DMatrix<f64>> {
    let perm = stride_perm(m, s)?;
    Ok(DMatrix::from_fn(m, m, |i, k| if perm[i] == k { 1.0 } else { 0.0 }))
}
