//! Scalars of the polar n-complex algebra `K_n` (real coefficients) and the
//! polar n-bicomplex algebra `CK_n` (complex coefficients).
//!
//! Units multiply cyclically, `e_i e_k = e_{(i+k) mod n}`, so a product is a
//! circular convolution of coefficient tubes and every scalar is represented by
//! the circulant matrix `chi(p)_{ik} = a_{(i-k) mod n}`.

use std::f64::consts::{PI, SQRT_2};

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::transform::{Normalization, TransformKind, TubeTransform};

/// Coefficient field: `Real` gives `K_n`, `Complex` gives `CK_n`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Field {
    Real,
    Complex,
}

impl Field {
    /// Field of a product or sum of operands from `self` and `other`.
    pub fn join(self, other: Field) -> Field {
        if self == Field::Real && other == Field::Real {
            Field::Real
        } else {
            Field::Complex
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Field::Real => "real",
            Field::Complex => "complex",
        }
    }
}

/// Relative threshold below which a spectrum value counts as zero in [`PolarScalar::inv`].
pub const SINGULAR_RTOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct PolarScalar {
    coeffs: Vec<Complex64>,
    field: Field,
}

/// Modulus-free description of a `K_n` scalar's direction.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AngleSet {
    /// `phi_1 .. phi_{ceil(n/2)-1}` in `[0, 2 pi)`.
    pub azimuthal: Vec<f64>,
    /// `psi_1 .. psi_{ceil(n/2)-2}` in `[0, pi/2]`.
    pub planar: Vec<f64>,
    /// `theta_+` in `[0, pi]`.
    pub polar_plus: f64,
    /// `theta_-` in `[0, pi]`, only for even `n`.
    pub polar_minus: Option<f64>,
}

impl PolarScalar {
    pub fn new(coeffs: Vec<Complex64>, field: Field) -> Result<Self> {
        if coeffs.is_empty() {
            return Err(Error::InvalidParameter("a polar scalar needs n >= 1 coefficients".into()));
        }
        if field == Field::Real && coeffs.iter().any(|c| c.im != 0.0) {
            return Err(Error::InvalidParameter(
                "real-field scalar has a coefficient with nonzero imaginary part".into(),
            ));
        }
        Ok(Self { coeffs, field })
    }

    pub fn from_real(coeffs: &[f64]) -> Result<Self> {
        Self::new(coeffs.iter().map(|&a| Complex64::new(a, 0.0)).collect(), Field::Real)
    }

    pub fn from_complex(coeffs: Vec<Complex64>) -> Result<Self> {
        Self::new(coeffs, Field::Complex)
    }

    pub fn zero(n: usize, field: Field) -> Self {
        Self {
            coeffs: vec![Complex64::default(); n.max(1)],
            field,
        }
    }

    pub fn one(n: usize, field: Field) -> Self {
        Self::unit(n, 0, field)
    }

    /// The imaginary unit `e_k` (with `e_0 = 1`).
    pub fn unit(n: usize, k: usize, field: Field) -> Self {
        let mut p = Self::zero(n, field);
        let len = p.coeffs.len();
        p.coeffs[k % len] = Complex64::new(1.0, 0.0);
        p
    }

    pub fn n(&self) -> usize {
        self.coeffs.len()
    }

    pub fn field(&self) -> Field {
        self.field
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<Complex64> {
        self.coeffs
    }

    /// Same coefficients viewed in `CK_n`.
    pub fn to_complex_field(&self) -> Self {
        Self {
            coeffs: self.coeffs.clone(),
            field: Field::Complex,
        }
    }

    fn check_same_n(&self, other: &Self) -> Result<()> {
        if self.n() != other.n() {
            return Err(Error::DimensionMismatch(format!(
                "scalars of length {} and {}",
                self.n(),
                other.n()
            )));
        }
        Ok(())
    }

    /// Unnormalized DFT of the coefficient tube (eigenvalues of `chi(p)`).
    pub fn spectrum(&self) -> Vec<Complex64> {
        cyclic(self.n()).forward(&self.coeffs)
    }

    /// Inverse of [`spectrum`](Self::spectrum). Real spectra-of-real-tubes are
    /// returned in the requested field with imaginary rounding noise dropped.
    pub fn from_spectrum(spectrum: &[Complex64], field: Field) -> Result<Self> {
        let mut coeffs = cyclic(spectrum.len().max(1)).inverse(spectrum);
        if field == Field::Real {
            coeffs.iter_mut().for_each(|c| c.im = 0.0);
        }
        Self::new(coeffs, field)
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_same_n(other)?;
        let coeffs = self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a + b).collect();
        Ok(Self {
            coeffs,
            field: self.field.join(other.field),
        })
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.check_same_n(other)?;
        let coeffs = self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a - b).collect();
        Ok(Self {
            coeffs,
            field: self.field.join(other.field),
        })
    }

    pub fn scale(&self, s: f64) -> Self {
        Self {
            coeffs: self.coeffs.iter().map(|a| a * s).collect(),
            field: self.field,
        }
    }

    /// Product via pointwise multiplication of unnormalized spectra.
    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.check_same_n(other)?;
        let t = cyclic(self.n());
        let mut spec = t.forward(&self.coeffs);
        let rhs = t.forward(&other.coeffs);
        spec.iter_mut().zip(&rhs).for_each(|(a, b)| *a *= b);
        Self::from_spectrum(&spec, self.field.join(other.field))
    }

    /// Conjugate defined by `chi(conj p) = chi(p)^*`: `b_i = conj(a_{(n-i) mod n})`.
    pub fn conj(&self) -> Self {
        let n = self.n();
        let coeffs = (0..n).map(|i| self.coeffs[(n - i) % n].conj()).collect();
        Self {
            coeffs,
            field: self.field,
        }
    }

    pub fn modulus(&self) -> f64 {
        self.coeffs.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Scalar product `Re(p conj(q)) = sum_i Re(a_i conj(b_i))`.
    pub fn inner(&self, other: &Self) -> Result<f64> {
        self.check_same_n(other)?;
        Ok(self
            .coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(a, b)| (a * b.conj()).re)
            .sum())
    }

    /// Circulant representation `chi(p)` with entry `(i, k) = a_{(i-k) mod n}`.
    pub fn to_circulant(&self) -> DMatrix<Complex64> {
        let n = self.n();
        DMatrix::from_fn(n, n, |i, k| self.coeffs[(i + n - k) % n])
    }

    /// Multiplicative inverse; fails on zero divisors.
    pub fn inv(&self) -> Result<Self> {
        let spec = self.spectrum();
        let max = spec.iter().map(|s| s.norm()).fold(0.0, f64::max);
        let min = spec.iter().map(|s| s.norm()).fold(f64::INFINITY, f64::min);
        let tolerance = SINGULAR_RTOL * max;
        if max == 0.0 || min <= tolerance {
            return Err(Error::SingularScalar {
                min_modulus: min,
                tolerance,
            });
        }
        let inv: Vec<Complex64> = spec.iter().map(|s| s.inv()).collect();
        Self::from_spectrum(&inv, self.field)
    }

    /// Azimuthal, planar and polar angles from the unitary DFT of the tube.
    ///
    /// Zero spectrum values give `phi_k = 0`; the remaining angles use `atan2`
    /// and stay defined. For `n = 1` there is no `A_1` and `|A_1|` is taken as 0.
    pub fn angles(&self) -> Result<AngleSet> {
        if self.field != Field::Real {
            return Err(Error::InvalidParameter("angles are defined on K_n (real field) only".into()));
        }
        let n = self.n();
        let unitary = TubeTransform::new(TransformKind::Dft, n, Normalization::Unitary)
            .expect("n >= 1");
        let a = unitary.forward(&self.coeffs);
        let half = n.div_ceil(2);
        let a1 = if n > 1 { a[1].norm() } else { 0.0 };

        let azimuthal = (1..half)
            .map(|k| {
                if a[k].norm() == 0.0 {
                    0.0
                } else {
                    (-a[k].arg()).rem_euclid(2.0 * PI)
                }
            })
            .collect();
        let planar = (2..half).map(|k| a1.atan2(a[k].norm())).collect();
        let polar_plus = (SQRT_2 * a1).atan2(a[0].re);
        let polar_minus = (n % 2 == 0).then(|| (SQRT_2 * a1).atan2(a[n / 2].re));
        Ok(AngleSet {
            azimuthal,
            planar,
            polar_plus,
            polar_minus,
        })
    }
}

fn cyclic(n: usize) -> TubeTransform {
    TubeTransform::dft(n).expect("n >= 1")
}
