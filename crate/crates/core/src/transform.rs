//! Tube transforms that diagonalize the supported commutative algebras.
//!
//! Every transform is stored in its raw form `W` (entries of unit modulus,
//! `W W^* = n I`). The [`Normalization`] tag decides whether the forward map is
//! `W` itself or the unitary `W / sqrt(n)`.

use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Normalization {
    /// Forward map is `W / sqrt(n)`; spectra have the same Euclidean norm as tubes.
    Unitary,
    /// Forward map is the raw `W`; spectra carry an extra `sqrt(n)` gain.
    Unnormalized,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TransformKind {
    /// Cyclic algebra: `W_{ki} = exp(-2 pi j i k / n)`.
    Dft,
    /// Skew-cyclic algebra: `W_{ki} = exp(-pi j i (2k + 1) / n)`.
    SkewDft,
    /// Commutative group algebra `Z_{n_1} x ... x Z_{n_m}` diagonalized by
    /// `F_{n_1} (x) ... (x) F_{n_m}`; the first factor is the most significant digit.
    GroupDft(Vec<usize>),
}

impl fmt::Display for TransformKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TransformKind::Dft => write!(f, "dft"),
            TransformKind::SkewDft => write!(f, "skew-dft"),
            TransformKind::GroupDft(factors) if factors.iter().all(|&q| q == 2) => write!(f, "wht"),
            TransformKind::GroupDft(factors) => {
                let parts: Vec<String> = factors.iter().map(|q| q.to_string()).collect();
                write!(f, "group-dft({})", parts.join("x"))
            }
        }
    }
}

#[derive(Clone)]
enum Plan {
    Fft {
        forward: Arc<dyn Fft<f64>>,
        inverse: Arc<dyn Fft<f64>>,
    },
    Skew {
        forward: Arc<dyn Fft<f64>>,
        inverse: Arc<dyn Fft<f64>>,
        twiddle: Vec<Complex64>,
    },
    Group {
        factors: Vec<usize>,
        roots: Vec<Vec<Complex64>>,
    },
}

/// A length-`n` tube transform together with its normalization convention.
#[derive(Clone)]
pub struct TubeTransform {
    kind: TransformKind,
    n: usize,
    normalization: Normalization,
    plan: Plan,
}

impl fmt::Debug for TubeTransform {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("TubeTransform")
            .field("kind", &self.kind)
            .field("n", &self.n)
            .field("normalization", &self.normalization)
            .finish()
    }
}

impl PartialEq for TubeTransform {
    fn eq(&self, other: &Self) -> bool {
        self.kind == other.kind && self.n == other.n && self.normalization == other.normalization
    }
}

impl TubeTransform {
    pub fn new(kind: TransformKind, n: usize, normalization: Normalization) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidParameter("transform length must be >= 1".into()));
        }
        let plan = match &kind {
            TransformKind::Dft => {
                let mut planner = FftPlanner::new();
                Plan::Fft {
                    forward: planner.plan_fft_forward(n),
                    inverse: planner.plan_fft_inverse(n),
                }
            }
            TransformKind::SkewDft => {
                let mut planner = FftPlanner::new();
                let twiddle = (0..n)
                    .map(|i| Complex64::from_polar(1.0, -PI * i as f64 / n as f64))
                    .collect();
                Plan::Skew {
                    forward: planner.plan_fft_forward(n),
                    inverse: planner.plan_fft_inverse(n),
                    twiddle,
                }
            }
            TransformKind::GroupDft(factors) => {
                if factors.is_empty() || factors.contains(&0) {
                    return Err(Error::InvalidParameter(format!(
                        "group factors must be positive, got {factors:?}"
                    )));
                }
                let product: usize = factors.iter().product();
                if product != n {
                    return Err(Error::InvalidParameter(format!(
                        "group factors {factors:?} multiply to {product}, expected {n}"
                    )));
                }
                let roots = factors.iter().map(|&q| unit_roots(q)).collect();
                Plan::Group {
                    factors: factors.clone(),
                    roots,
                }
            }
        };
        Ok(Self {
            kind,
            n,
            normalization,
            plan,
        })
    }

    pub fn dft(n: usize) -> Result<Self> {
        Self::new(TransformKind::Dft, n, Normalization::Unnormalized)
    }

    pub fn skew_dft(n: usize) -> Result<Self> {
        Self::new(TransformKind::SkewDft, n, Normalization::Unnormalized)
    }

    /// Walsh-Hadamard transform; `n` must be a power of two.
    pub fn walsh_hadamard(n: usize) -> Result<Self> {
        if !n.is_power_of_two() {
            return Err(Error::InvalidParameter(format!(
                "Walsh-Hadamard transform needs a power-of-two length, got {n}"
            )));
        }
        let factors = vec![2; n.trailing_zeros() as usize];
        // n = 1 is the trivial group.
        let factors = if factors.is_empty() { vec![1] } else { factors };
        Self::new(TransformKind::GroupDft(factors), n, Normalization::Unnormalized)
    }

    pub fn group_dft(factors: Vec<usize>) -> Result<Self> {
        let n = factors.iter().product();
        Self::new(TransformKind::GroupDft(factors), n, Normalization::Unnormalized)
    }

    pub fn with_normalization(&self, normalization: Normalization) -> Self {
        Self {
            normalization,
            ..self.clone()
        }
    }

    pub fn kind(&self) -> &TransformKind {
        &self.kind
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn normalization(&self) -> Normalization {
        self.normalization
    }

    /// Ratio `||spectrum|| / ||tube||`: `sqrt(n)` when unnormalized, 1 when unitary.
    pub fn gain(&self) -> f64 {
        match self.normalization {
            Normalization::Unitary => 1.0,
            Normalization::Unnormalized => (self.n as f64).sqrt(),
        }
    }

    /// Spectral index holding the complex conjugate of index `k` whenever the
    /// input tube is real.
    pub fn real_partner(&self, k: usize) -> usize {
        let n = self.n;
        match &self.kind {
            TransformKind::Dft => (n - k) % n,
            TransformKind::SkewDft => n - 1 - k,
            TransformKind::GroupDft(factors) => {
                let mut rest = k;
                let mut digits = vec![0; factors.len()];
                for (slot, &q) in digits.iter_mut().zip(factors).rev() {
                    *slot = rest % q;
                    rest /= q;
                }
                digits
                    .iter()
                    .zip(factors)
                    .fold(0, |acc, (&d, &q)| acc * q + (q - d) % q)
            }
        }
    }

    /// Transforms every length-`n` chunk of `buf` in place.
    pub fn forward_in_place(&self, buf: &mut [Complex64]) {
        debug_assert_eq!(buf.len() % self.n, 0);
        if buf.is_empty() {
            return;
        }
        match &self.plan {
            Plan::Fft { forward, .. } => forward.process(buf),
            Plan::Skew {
                forward, twiddle, ..
            } => {
                for tube in buf.chunks_exact_mut(self.n) {
                    tube.iter_mut().zip(twiddle).for_each(|(a, w)| *a *= w);
                }
                forward.process(buf);
            }
            Plan::Group { factors, roots } => {
                let mut scratch = vec![Complex64::default(); self.n];
                for tube in buf.chunks_exact_mut(self.n) {
                    group_apply(tube, factors, roots, false, &mut scratch);
                }
            }
        }
        if self.normalization == Normalization::Unitary {
            let s = 1.0 / (self.n as f64).sqrt();
            buf.iter_mut().for_each(|a| *a *= s);
        }
    }

    /// Inverse of [`forward_in_place`](Self::forward_in_place) under the same normalization.
    pub fn inverse_in_place(&self, buf: &mut [Complex64]) {
        debug_assert_eq!(buf.len() % self.n, 0);
        if buf.is_empty() {
            return;
        }
        match &self.plan {
            Plan::Fft { inverse, .. } => inverse.process(buf),
            Plan::Skew {
                inverse, twiddle, ..
            } => {
                inverse.process(buf);
                for tube in buf.chunks_exact_mut(self.n) {
                    tube.iter_mut().zip(twiddle).for_each(|(a, w)| *a *= w.conj());
                }
            }
            Plan::Group { factors, roots } => {
                let mut scratch = vec![Complex64::default(); self.n];
                for tube in buf.chunks_exact_mut(self.n) {
                    group_apply(tube, factors, roots, true, &mut scratch);
                }
            }
        }
        let s = match self.normalization {
            Normalization::Unitary => 1.0 / (self.n as f64).sqrt(),
            Normalization::Unnormalized => 1.0 / self.n as f64,
        };
        buf.iter_mut().for_each(|a| *a *= s);
    }

    pub fn forward(&self, tube: &[Complex64]) -> Vec<Complex64> {
        let mut out = tube.to_vec();
        self.forward_in_place(&mut out);
        out
    }

    pub fn inverse(&self, spectrum: &[Complex64]) -> Vec<Complex64> {
        let mut out = spectrum.to_vec();
        self.inverse_in_place(&mut out);
        out
    }

    /// Dense `n x n` matrix of the forward map (column `i` is the image of `e_i`).
    pub fn matrix(&self) -> DMatrix<Complex64> {
        let n = self.n;
        let mut m = DMatrix::zeros(n, n);
        for i in 0..n {
            let mut unit = vec![Complex64::default(); n];
            unit[i] = Complex64::new(1.0, 0.0);
            self.forward_in_place(&mut unit);
            m.column_mut(i).iter_mut().zip(unit).for_each(|(d, s)| *d = s);
        }
        m
    }
}

fn unit_roots(q: usize) -> Vec<Complex64> {
    (0..q)
        .map(|t| match (4 * t) % (4 * q) {
            // exact values on the axes keep the +-1 structure of WHT bit-exact
            0 => Complex64::new(1.0, 0.0),
            x if x == 2 * q => Complex64::new(-1.0, 0.0),
            x if x == q => Complex64::new(0.0, -1.0),
            x if x == 3 * q => Complex64::new(0.0, 1.0),
            _ => Complex64::from_polar(1.0, -2.0 * PI * t as f64 / q as f64),
        })
        .collect()
}

/// Raw (unscaled) Kronecker DFT along each mixed-radix digit of the tube.
fn group_apply(
    tube: &mut [Complex64],
    factors: &[usize],
    roots: &[Vec<Complex64>],
    conjugate: bool,
    scratch: &mut [Complex64],
) {
    let n = tube.len();
    let mut stride = n;
    for (&q, w) in factors.iter().zip(roots) {
        stride /= q;
        if q == 1 {
            continue;
        }
        let block = q * stride;
        for base in (0..n).step_by(block) {
            for offset in 0..stride {
                for k in 0..q {
                    let mut acc = Complex64::default();
                    for i in 0..q {
                        let root = w[(i * k) % q];
                        let root = if conjugate { root.conj() } else { root };
                        acc += root * tube[base + offset + i * stride];
                    }
                    scratch[base + offset + k * stride] = acc;
                }
            }
        }
        tube.copy_from_slice(&scratch[..n]);
    }
}
