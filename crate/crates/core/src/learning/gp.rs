//! Exact Gaussian-process regression with an ARD RBF kernel.
//!
//! Inputs are standardized on the training set. The kernel is
//! `k(a, b) = σ_f² · exp(−½ Σ ((aᵢ − bᵢ)/ℓᵢ)²)` and the posterior is computed
//! from the Cholesky factor of `K + σ_n² I + jitter·I`.

use log::warn;
use nalgebra::{Cholesky, DMatrix, DVector, Dyn};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const BASE_JITTER: f64 = 1e-8;
const JITTER_ESCALATIONS: usize = 3;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct RbfKernelParams {
    /// One lengthscale per (standardized) feature; a single value broadcasts.
    pub lengthscale: Vec<f64>,
    pub signal_variance: f64,
    pub noise_variance: f64,
}

impl Default for RbfKernelParams {
    fn default() -> Self {
        RbfKernelParams {
            lengthscale: vec![1.0],
            signal_variance: 1.0,
            noise_variance: 0.01,
        }
    }
}

impl RbfKernelParams {
    pub fn isotropic(lengthscale: f64, signal_variance: f64, noise_variance: f64) -> Self {
        RbfKernelParams {
            lengthscale: vec![lengthscale],
            signal_variance,
            noise_variance,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.lengthscale.is_empty() || self.lengthscale.iter().any(|l| !(*l > 0.0)) {
            return Err(Error::Config("lengthscales must be > 0".into()));
        }
        if !(self.signal_variance > 0.0) || !(self.noise_variance > 0.0) {
            return Err(Error::Config(
                "signal and noise variances must be > 0".into(),
            ));
        }
        Ok(())
    }

    fn expanded(&self, dim: usize) -> Result<Vec<f64>> {
        match self.lengthscale.len() {
            1 => Ok(vec![self.lengthscale[0]; dim]),
            n if n == dim => Ok(self.lengthscale.clone()),
            n => Err(Error::DimensionMismatch {
                expected: dim,
                got: n,
            }),
        }
    }
}

/// Per-feature affine transform to zero mean and unit variance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Standardizer {
    pub mean: Vec<f64>,
    pub scale: Vec<f64>,
}

impl Standardizer {
    /// Features with zero spread keep a unit scale.
    pub fn fit(x: &[Vec<f64>]) -> Self {
        let d = x[0].len();
        let n = x.len() as f64;
        let mut mean = vec![0.0; d];
        for row in x {
            for (m, v) in mean.iter_mut().zip(row) {
                *m += v / n;
            }
        }
        let mut scale = vec![0.0; d];
        for row in x {
            for j in 0..d {
                scale[j] += (row[j] - mean[j]).powi(2) / n;
            }
        }
        for s in scale.iter_mut() {
            *s = s.sqrt();
            if !(*s > 1e-12) {
                *s = 1.0;
            }
        }
        Standardizer { mean, scale }
    }

    pub fn apply(&self, x: &[f64]) -> Vec<f64> {
        x.iter()
            .zip(self.mean.iter().zip(&self.scale))
            .map(|(v, (m, s))| (v - m) / s)
            .collect()
    }
}

#[derive(Debug, Clone)]
pub struct GpRegressor {
    params: RbfKernelParams,
    lengthscale: Vec<f64>,
    standardizer: Standardizer,
    /// Standardized training inputs, one row per sample.
    x: Vec<Vec<f64>>,
    y: Vec<f64>,
    chol: Cholesky<f64, Dyn>,
    alpha: DVector<f64>,
    jitter: f64,
}

fn rbf(a: &[f64], b: &[f64], ls: &[f64], signal: f64) -> f64 {
    let mut r2 = 0.0;
    for i in 0..a.len() {
        let d = (a[i] - b[i]) / ls[i];
        r2 += d * d;
    }
    signal * (-0.5 * r2).exp()
}

fn factorize(
    x: &[Vec<f64>],
    ls: &[f64],
    params: &RbfKernelParams,
) -> Result<(Cholesky<f64, Dyn>, f64)> {
    let n = x.len();
    let mut k = DMatrix::<f64>::zeros(n, n);
    for i in 0..n {
        for j in 0..=i {
            let v = rbf(&x[i], &x[j], ls, params.signal_variance);
            k[(i, j)] = v;
            k[(j, i)] = v;
        }
    }
    let mut jitter = BASE_JITTER;
    for attempt in 0..=JITTER_ESCALATIONS {
        let mut m = k.clone();
        for i in 0..n {
            m[(i, i)] += params.noise_variance + jitter;
        }
        if let Some(c) = Cholesky::new(m) {
            return Ok((c, jitter));
        }
        if attempt < JITTER_ESCALATIONS {
            jitter *= 100.0;
        }
    }
    Err(Error::IllConditioned { jitter })
}

impl GpRegressor {
    pub fn fit(x: &[Vec<f64>], y: &[f64], params: &RbfKernelParams) -> Result<Self> {
        params.validate()?;
        if x.len() < 2 {
            return Err(Error::InsufficientData(
                "GP regression needs at least 2 samples".into(),
            ));
        }
        if x.len() != y.len() {
            return Err(Error::DimensionMismatch {
                expected: x.len(),
                got: y.len(),
            });
        }
        let d = x[0].len();
        if let Some(bad) = x.iter().find(|r| r.len() != d) {
            return Err(Error::DimensionMismatch {
                expected: d,
                got: bad.len(),
            });
        }
        Self::fit_with(Standardizer::fit(x), x, y, params)
    }

    fn fit_with(
        standardizer: Standardizer,
        raw: &[Vec<f64>],
        y: &[f64],
        params: &RbfKernelParams,
    ) -> Result<Self> {
        let d = standardizer.mean.len();
        let ls = params.expanded(d)?;
        let xs: Vec<Vec<f64>> = raw.iter().map(|r| standardizer.apply(r)).collect();
        let (chol, jitter) = factorize(&xs, &ls, params)?;
        let alpha = chol.solve(&DVector::from_column_slice(y));
        Ok(GpRegressor {
            params: params.clone(),
            lengthscale: ls,
            standardizer,
            x: xs,
            y: y.to_vec(),
            chol,
            alpha,
            jitter,
        })
    }

    pub fn dim(&self) -> usize {
        self.standardizer.mean.len()
    }

    pub fn params(&self) -> &RbfKernelParams {
        &self.params
    }

    pub fn jitter(&self) -> f64 {
        self.jitter
    }

    pub fn alpha(&self) -> &[f64] {
        self.alpha.as_slice()
    }

    pub fn n_train(&self) -> usize {
        self.x.len()
    }

    fn cross(&self, xs: &[f64]) -> DVector<f64> {
        DVector::from_iterator(
            self.x.len(),
            self.x
                .iter()
                .map(|r| rbf(r, xs, &self.lengthscale, self.params.signal_variance)),
        )
    }

    /// Posterior mean at `x`.
    pub fn predict_mean(&self, x: &[f64]) -> Result<f64> {
        self.check_dim(x)?;
        let ks = self.cross(&self.standardizer.apply(x));
        Ok(ks.dot(&self.alpha))
    }

    /// Posterior mean and (latent) variance at `x`.
    pub fn predict(&self, x: &[f64]) -> Result<(f64, f64)> {
        self.check_dim(x)?;
        let xs = self.standardizer.apply(x);
        let ks = self.cross(&xs);
        let mean = ks.dot(&self.alpha);
        let v = self
            .chol
            .l_dirty()
            .solve_lower_triangular(&ks)
            .expect("Cholesky factor has a positive diagonal");
        let mut var = self.params.signal_variance - v.dot(&v);
        if var < 0.0 {
            if var < -1e-9 {
                warn!("clamping negative GP variance {var:e} to zero");
            }
            var = 0.0;
        }
        Ok((mean, var))
    }

    fn check_dim(&self, x: &[f64]) -> Result<()> {
        if x.len() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                got: x.len(),
            });
        }
        Ok(())
    }

    pub fn to_file(&self) -> GpModelFile {
        GpModelFile {
            params: self.params.clone(),
            standardizer: self.standardizer.clone(),
            x_train: self
                .x
                .iter()
                .map(|r| {
                    r.iter()
                        .zip(self.standardizer.mean.iter().zip(&self.standardizer.scale))
                        .map(|(v, (m, s))| v * s + m)
                        .collect()
                })
                .collect(),
            y_train: self.y.clone(),
            alpha: self.alpha.as_slice().to_vec(),
        }
    }

    /// Rebuilds the factorization and checks the stored weights.
    pub fn from_file(f: &GpModelFile) -> Result<Self> {
        let gp = Self::fit_with(f.standardizer.clone(), &f.x_train, &f.y_train, &f.params)?;
        let dev = max_abs_deviation(gp.alpha(), &f.alpha);
        if !(dev <= ALPHA_TOLERANCE) {
            return Err(Error::CorruptModel(dev));
        }
        Ok(gp)
    }
}

/// Agreement required between stored and recomputed weights on load.
pub const ALPHA_TOLERANCE: f64 = 1e-8;

pub fn max_abs_deviation(a: &[f64], b: &[f64]) -> f64 {
    if a.len() != b.len() {
        return f64::INFINITY;
    }
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max)
}

/// Persisted form. The Cholesky factor is recomputed on load.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GpModelFile {
    pub params: RbfKernelParams,
    pub standardizer: Standardizer,
    /// Raw (unstandardized) training inputs.
    pub x_train: Vec<Vec<f64>>,
    pub y_train: Vec<f64>,
    pub alpha: Vec<f64>,
}

impl Serialize for GpRegressor {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.to_file().serialize(s)
    }
}

impl<'de> Deserialize<'de> for GpRegressor {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let f = GpModelFile::deserialize(d)?;
        GpRegressor::from_file(&f).map_err(serde::de::Error::custom)
    }
}

pub fn rmse(pred: &[f64], truth: &[f64]) -> f64 {
    let n = pred.len() as f64;
    (pred
        .iter()
        .zip(truth)
        .map(|(p, t)| (p - t).powi(2))
        .sum::<f64>()
        / n)
        .sqrt()
}

/// Picks the isotropic lengthscale with the lowest validation RMSE.
pub fn select_lengthscale(
    x: &[Vec<f64>],
    y: &[f64],
    base: &RbfKernelParams,
    candidates: &[f64],
    validation_fraction: f64,
) -> Result<RbfKernelParams> {
    let n_val = ((x.len() as f64) * validation_fraction).round() as usize;
    if n_val == 0 || n_val + 2 > x.len() {
        return Ok(base.clone());
    }
    let split = x.len() - n_val;
    let mut best: Option<(f64, RbfKernelParams)> = None;
    for &ls in candidates {
        let p = RbfKernelParams {
            lengthscale: vec![ls],
            ..base.clone()
        };
        let gp = GpRegressor::fit(&x[..split], &y[..split], &p)?;
        let pred: Vec<f64> = x[split..]
            .iter()
            .map(|r| gp.predict_mean(r))
            .collect::<Result<_>>()?;
        let e = rmse(&pred, &y[split..]);
        if best.as_ref().is_none_or(|(b, _)| e < *b) {
            best = Some((e, p));
        }
    }
    Ok(best.map(|(_, p)| p).unwrap_or_else(|| base.clone()))
}
