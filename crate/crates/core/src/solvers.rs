//! Principal component pursuit by the inexact augmented Lagrange multiplier
//! method, over `K_n` and `CK_n`.
//!
//! Three variants share one loop structure:
//! `Naive` runs every step in the coefficient domain, `Frequency` keeps all
//! state in the spectral domain, and `TensorRpca` is the slice-wise nuclear
//! norm baseline (also spectral).

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hypermatrix::{matrix_transform_count, HyperMatrix, SpectralMatrix};
use crate::prox::{self, SliceShrink};
use crate::transform::{Normalization, TransformKind, TubeTransform};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Variant {
    Naive,
    Frequency,
    TensorRpca,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolverConfig {
    /// `lambda = c / sqrt(max(l, m))`.
    pub c: f64,
    /// `mu_0 = mu0_scale / ||X||_2`.
    pub mu0_scale: f64,
    /// `mu_{k+1} = mu_growth * mu_k`.
    pub mu_growth: f64,
    pub tol: f64,
    pub max_iters: usize,
    pub variant: Variant,
    pub transform: TransformKind,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            c: 1.0,
            mu0_scale: 1.25,
            mu_growth: 1.5,
            tol: 1e-7,
            max_iters: 1000,
            variant: Variant::Frequency,
            transform: TransformKind::Dft,
        }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |what: &str, v: f64| Err(Error::InvalidParameter(format!("{what} = {v}")));
        if !(self.c > 0.0 && self.c.is_finite()) {
            return bad("c must be positive; c", self.c);
        }
        if !(self.mu0_scale > 0.0 && self.mu0_scale.is_finite()) {
            return bad("mu0 scale must be positive; mu0_scale", self.mu0_scale);
        }
        if !(self.mu_growth > 1.0 && self.mu_growth.is_finite()) {
            return bad("mu growth must exceed 1; mu_growth", self.mu_growth);
        }
        if !(self.tol > 0.0 && self.tol.is_finite()) {
            return bad("tolerance must be positive; tol", self.tol);
        }
        if self.max_iters == 0 {
            return Err(Error::InvalidParameter("max_iters must be >= 1".into()));
        }
        Ok(())
    }

    pub fn lambda(&self, rows: usize, cols: usize) -> f64 {
        self.c / (rows.max(cols) as f64).sqrt()
    }

    /// Unnormalized transform of length `n` for this config's kind.
    pub fn tube_transform(&self, n: usize) -> Result<TubeTransform> {
        TubeTransform::new(self.transform.clone(), n, Normalization::Unnormalized)
    }
}

/// Work done by one solver run.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct OpCounts {
    pub slice_svds: usize,
    /// Whole-matrix forward or inverse tube transforms.
    pub tube_transforms: usize,
}

#[derive(Debug, Clone)]
pub struct PcpResult {
    pub l: HyperMatrix,
    pub s: HyperMatrix,
    pub iterations: usize,
    /// Relative residual `||X - L - S||_F / ||X||_F` after every iteration.
    pub residual_history: Vec<f64>,
    pub converged: bool,
    pub lambda: f64,
    /// `mu_k` used in every iteration.
    pub mu_trace: Vec<f64>,
    pub ops: OpCounts,
}

/// `||X - L - S||_F / ||X||_F`, or the absolute residual when `X = 0`.
pub fn residual(x: &HyperMatrix, l: &HyperMatrix, s: &HyperMatrix) -> Result<f64> {
    let r = x.sub(l)?.sub(s)?.frobenius();
    let scale = x.frobenius();
    Ok(if scale > 0.0 { r / scale } else { r })
}

/// Geometric penalty sequence `mu_0, mu_0 rho, mu_0 rho^2, ...`.
#[derive(Debug, Clone)]
pub struct MuSchedule {
    next: f64,
    growth: f64,
}

impl Iterator for MuSchedule {
    type Item = f64;

    fn next(&mut self) -> Option<f64> {
        let mu = self.next;
        self.next *= self.growth;
        Some(mu)
    }
}

fn schedule_from_norm(norm: f64, cfg: &SolverConfig) -> Result<MuSchedule> {
    if !(norm > 0.0) {
        return Err(Error::InvalidParameter("penalty schedule needs a nonzero operator norm".into()));
    }
    Ok(MuSchedule {
        next: cfg.mu0_scale / norm,
        growth: cfg.mu_growth,
    })
}

pub fn mu_schedule(x: &HyperMatrix, cfg: &SolverConfig) -> Result<MuSchedule> {
    cfg.validate()?;
    let t = cfg.tube_transform(x.n())?;
    schedule_from_norm(x.to_spectral(&t)?.operator_norm()?, cfg)
}

fn check_input(x: &HyperMatrix, cfg: &SolverConfig) -> Result<()> {
    cfg.validate()?;
    if !x.is_finite() {
        return Err(Error::NonFinite);
    }
    Ok(())
}

fn zero_result(x: &HyperMatrix, lambda: f64) -> PcpResult {
    let zero = HyperMatrix::zeros(x.rows(), x.cols(), x.n(), x.field());
    PcpResult {
        l: zero.clone(),
        s: zero,
        iterations: 1,
        residual_history: vec![0.0],
        converged: true,
        lambda,
        mu_trace: Vec::new(),
        ops: OpCounts::default(),
    }
}

/// Principal component pursuit `min ||L||_* + lambda ||S||_1  s.t.  X = L + S`
/// with the hypercomplex trace norm. `cfg.variant` picks the implementation;
/// [`Variant::TensorRpca`] is routed to [`tensor_rpca`].
pub fn pcp_ialm(x: &HyperMatrix, cfg: &SolverConfig) -> Result<PcpResult> {
    check_input(x, cfg)?;
    match cfg.variant {
        Variant::Naive => naive(x, cfg),
        Variant::Frequency => spectral(x, cfg, SliceShrink::Tubes),
        Variant::TensorRpca => spectral(x, cfg, SliceShrink::Independent),
    }
}

/// Tensor RPCA baseline: the low-rank step soft-thresholds every spectral
/// slice's singular values independently. Ignores `cfg.variant`.
pub fn tensor_rpca(x: &HyperMatrix, cfg: &SolverConfig) -> Result<PcpResult> {
    check_input(x, cfg)?;
    spectral(x, cfg, SliceShrink::Independent)
}

fn naive(x: &HyperMatrix, cfg: &SolverConfig) -> Result<PcpResult> {
    let lambda = cfg.lambda(x.rows(), x.cols());
    if x.frobenius() == 0.0 {
        return Ok(zero_result(x, lambda));
    }
    let transforms_before = matrix_transform_count();
    let t = cfg.tube_transform(x.n())?;
    let norm = x.to_spectral(&t)?.operator_norm()?;
    let mut mus = schedule_from_norm(norm, cfg)?;
    let svds_per_iter = crate::hypermatrix::distinct_slice_count(&t, x.field());

    let mut y = x.scale(1.0 / norm.max(x.max_modulus() / lambda));
    let mut s = HyperMatrix::zeros(x.rows(), x.cols(), x.n(), x.field());
    let mut l = s.clone();
    let mut history = Vec::new();
    let mut mu_trace = Vec::new();
    let mut converged = false;

    while history.len() < cfg.max_iters {
        let mu = mus.next().expect("infinite schedule");
        mu_trace.push(mu);
        let y_mu = y.scale(1.0 / mu);
        l = prox::prox_trace(&x.sub(&s)?.add(&y_mu)?, 1.0 / mu, &t)?;
        s = prox::prox_l1(&x.sub(&l)?.add(&y_mu)?, lambda / mu)?;
        let gap = x.sub(&l)?.sub(&s)?;
        y = y.add(&gap.scale(mu))?;
        let r = gap.frobenius() / x.frobenius();
        if !r.is_finite() {
            return Err(Error::NonFinite);
        }
        history.push(r);
        if r < cfg.tol {
            converged = true;
            break;
        }
    }

    let iterations = history.len();
    Ok(PcpResult {
        l,
        s,
        iterations,
        residual_history: history,
        converged,
        lambda,
        mu_trace,
        ops: OpCounts {
            slice_svds: iterations * svds_per_iter,
            tube_transforms: matrix_transform_count() - transforms_before,
        },
    })
}

fn spectral(x: &HyperMatrix, cfg: &SolverConfig, shrink: SliceShrink) -> Result<PcpResult> {
    let lambda = cfg.lambda(x.rows(), x.cols());
    if x.frobenius() == 0.0 {
        return Ok(zero_result(x, lambda));
    }
    let transforms_before = matrix_transform_count();
    let t = cfg.tube_transform(x.n())?;
    let x_hat = x.to_spectral(&t)?;
    let norm = x_hat.operator_norm()?;
    let mut mus = schedule_from_norm(norm, cfg)?;

    // the dual initializer is a multiple of X, so its spectrum is too
    let mut y_hat = x_hat.scale(1.0 / norm.max(x.max_modulus() / lambda));
    let mut s_hat = SpectralMatrix::zeros(x.rows(), x.cols(), &t, x.field());
    let mut l_hat = s_hat.clone();
    let x_norm = x_hat.norm_sqr().sqrt();
    let mut history = Vec::new();
    let mut mu_trace = Vec::new();
    let mut slice_svds = 0;
    let mut converged = false;

    while history.len() < cfg.max_iters {
        let mu = mus.next().expect("infinite schedule");
        mu_trace.push(mu);
        let z = x_hat.sub(&s_hat)?.add_scaled(&y_hat, 1.0 / mu)?;
        let (low_rank, svds) = prox::prox_trace_spectral(&z, 1.0 / mu, shrink)?;
        l_hat = low_rank;
        slice_svds += svds;
        let z = x_hat.sub(&l_hat)?.add_scaled(&y_hat, 1.0 / mu)?;
        s_hat = prox::prox_l1_spectral(&z, lambda / mu)?;
        let gap = x_hat.sub(&l_hat)?.sub(&s_hat)?;
        y_hat = y_hat.add_scaled(&gap, mu)?;
        let r = gap.norm_sqr().sqrt() / x_norm;
        if !r.is_finite() {
            return Err(Error::NonFinite);
        }
        history.push(r);
        if r < cfg.tol {
            converged = true;
            break;
        }
    }

    let l = l_hat.to_hyper_with_field(x.field());
    let s = s_hat.to_hyper_with_field(x.field());
    let iterations = history.len();
    Ok(PcpResult {
        l,
        s,
        iterations,
        residual_history: history,
        converged,
        lambda,
        mu_trace,
        ops: OpCounts {
            slice_svds,
            tube_transforms: matrix_transform_count() - transforms_before,
        },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hyperalgebra::Field;
    use num_complex::Complex64;

    fn cfg(variant: Variant) -> SolverConfig {
        SolverConfig {
            variant,
            ..SolverConfig::default()
        }
    }

    #[test]
    fn zero_input_short_circuits() {
        for variant in [Variant::Naive, Variant::Frequency, Variant::TensorRpca] {
            let x = HyperMatrix::zeros(3, 4, 2, Field::Complex);
            let out = pcp_ialm(&x, &cfg(variant)).unwrap();
            assert_eq!(out.iterations, 1);
            assert!(out.converged);
            assert_eq!(out.residual_history, vec![0.0]);
            assert_eq!(out.l.frobenius() + out.s.frobenius(), 0.0);
        }
    }

    #[test]
    fn schedule_is_geometric() {
        let x = HyperMatrix::identity(3, 1, Field::Real).scale(1.25);
        let mus: Vec<f64> = mu_schedule(&x, &SolverConfig::default()).unwrap().take(4).collect();
        assert!((mus[0] - 1.0).abs() < 1e-15);
        assert!((mus[3] - 1.5f64.powi(3)).abs() < 1e-12);
        assert!(mu_schedule(&HyperMatrix::zeros(2, 2, 1, Field::Real), &SolverConfig::default()).is_err());
    }

    #[test]
    fn residual_edge_cases() {
        let x = HyperMatrix::from_fn(2, 3, 2, Field::Real, |i, k, t| Complex64::new((i + k + t) as f64 + 1.0, 0.0));
        let zero = HyperMatrix::zeros(2, 3, 2, Field::Real);
        assert_eq!(residual(&x, &x, &zero).unwrap(), 0.0);
        assert!((residual(&x, &zero, &zero).unwrap() - 1.0).abs() < 1e-15);
        let bump = zero.add(&HyperMatrix::from_fn(2, 3, 2, Field::Real, |_, _, _| Complex64::new(0.5, 0.0))).unwrap();
        assert!((residual(&zero, &bump, &zero).unwrap() - bump.frobenius()).abs() < 1e-15);
    }

    #[test]
    fn invalid_configs_are_rejected() {
        let x = HyperMatrix::identity(2, 2, Field::Real);
        for bad in [
            SolverConfig { c: 0.0, ..SolverConfig::default() },
            SolverConfig { tol: 0.0, ..SolverConfig::default() },
            SolverConfig { mu_growth: 1.0, ..SolverConfig::default() },
            SolverConfig { max_iters: 0, ..SolverConfig::default() },
        ] {
            assert!(matches!(pcp_ialm(&x, &bad), Err(Error::InvalidParameter(_))));
        }
        let mut nan = x.clone();
        nan.data_mut()[0] = Complex64::new(f64::NAN, 0.0);
        assert!(matches!(pcp_ialm(&nan, &SolverConfig::default()), Err(Error::NonFinite)));
    }

    #[test]
    fn frequency_variant_transforms_only_at_the_boundaries() {
        let x = HyperMatrix::from_fn(6, 5, 4, Field::Real, |i, k, t| {
            Complex64::new(((i * 7 + k * 3 + t * 5) % 11) as f64 - 5.0, 0.0)
        });
        let out = pcp_ialm(&x, &cfg(Variant::Frequency)).unwrap();
        assert!(out.iterations > 3);
        assert_eq!(out.ops.tube_transforms, 3);
        // slices 0 and 2 are self-conjugate, 1 and 3 are a pair
        assert_eq!(out.ops.slice_svds, 3 * out.iterations);
    }
}
