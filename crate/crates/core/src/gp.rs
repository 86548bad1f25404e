//! Gaussian-process core: squared-exponential covariance, Gaussian entropy
//! and mutual information, posterior prediction and hyperparameter fitting.
//!
//! All logarithms are natural; entropies and informations are in nats.
//! Factorizations go through [`cholesky_jittered`], which retries with a
//! diagonal jitter of `1e-10·s`, escalating by ×10 up to `1e-6·s`, where `s`
//! is the signal variance (or the largest diagonal entry when no signal
//! variance is at hand).

use std::f64::consts::{E, PI};

use nalgebra::{Cholesky, DMatrix, DVector, Dyn};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::Point;
use crate::optim::{nelder_mead, NelderMeadOptions};

const JITTER_START: f64 = 1e-10;
const JITTER_MAX: f64 = 1e-6;

/// Hyperparameters of the non-isotropic squared-exponential kernel.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GpHyperparams {
    /// Signal standard deviation.
    pub sigma_f: f64,
    /// Measurement noise standard deviation.
    pub sigma_n: f64,
    /// Length scale along x and y (m).
    pub length_scales: [f64; 2],
}

impl GpHyperparams {
    pub fn isotropic(sigma_f: f64, sigma_n: f64, length_scale: f64) -> Self {
        Self { sigma_f, sigma_n, length_scales: [length_scale; 2] }
    }

    pub fn validate(&self) -> Result<()> {
        let ok = self.sigma_f > 0.0
            && self.sigma_f.is_finite()
            && self.sigma_n >= 0.0
            && self.sigma_n.is_finite()
            && self.length_scales.iter().all(|l| *l > 0.0 && l.is_finite());
        if ok {
            Ok(())
        } else {
            Err(Error::Config(format!("invalid GP hyperparameters {self:?}")))
        }
    }

    pub fn signal_variance(&self) -> f64 {
        self.sigma_f * self.sigma_f
    }

    pub fn noise_variance(&self) -> f64 {
        self.sigma_n * self.sigma_n
    }
}

/// `σ_f² exp(-½ Σ_d ((p_d - q_d) / ℓ_d)²)`
pub fn kernel(p: Point, q: Point, h: &GpHyperparams) -> f64 {
    let dx = (p.x - q.x) / h.length_scales[0];
    let dy = (p.y - q.y) / h.length_scales[1];
    h.signal_variance() * (-0.5 * (dx * dx + dy * dy)).exp()
}

/// Covariance matrix of `points`, optionally with `σ_n²` on the diagonal.
pub fn gram(points: &[Point], h: &GpHyperparams, add_noise: bool) -> DMatrix<f64> {
    let n = points.len();
    let mut k = DMatrix::zeros(n, n);
    for i in 0..n {
        for j in 0..=i {
            let v = kernel(points[i], points[j], h);
            k[(i, j)] = v;
            k[(j, i)] = v;
        }
        if add_noise {
            k[(i, i)] += h.noise_variance();
        }
    }
    k
}

/// Cross-covariance with rows indexed by `a` and columns by `b`.
pub fn cross_cov(a: &[Point], b: &[Point], h: &GpHyperparams) -> DMatrix<f64> {
    DMatrix::from_fn(a.len(), b.len(), |i, j| kernel(a[i], b[j], h))
}

/// Cholesky factor of `k`, retrying with escalating diagonal jitter.
pub fn cholesky_jittered(k: &DMatrix<f64>, scale: f64) -> Result<Cholesky<f64, Dyn>> {
    if let Some(c) = Cholesky::new(k.clone()) {
        return Ok(c);
    }
    let scale = if scale > 0.0 && scale.is_finite() { scale } else { 1.0 };
    let mut jitter = JITTER_START;
    while jitter <= JITTER_MAX * (1.0 + 1e-9) {
        let mut kj = k.clone();
        for i in 0..kj.nrows() {
            kj[(i, i)] += jitter * scale;
        }
        if let Some(c) = Cholesky::new(kj) {
            return Ok(c);
        }
        jitter *= 10.0;
    }
    Err(Error::Numeric(format!(
        "{0}x{0} matrix is not positive definite even with jitter {1:e}",
        k.nrows(),
        JITTER_MAX * scale
    )))
}

fn default_scale(k: &DMatrix<f64>) -> f64 {
    k.diagonal().iter().copied().fold(0.0, f64::max)
}

fn chol_log_det(c: &Cholesky<f64, Dyn>) -> f64 {
    2.0 * c.l_dirty().diagonal().iter().map(|d| d.ln()).sum::<f64>()
}

/// `ln det K` of a symmetric positive definite matrix.
pub fn log_det(k: &DMatrix<f64>) -> Result<f64> {
    if k.nrows() == 0 {
        return Ok(0.0);
    }
    Ok(chol_log_det(&cholesky_jittered(k, default_scale(k))?))
}

/// Differential entropy of `N(μ, K)`: `½ ln((2πe)^n det K)`.
pub fn entropy(k: &DMatrix<f64>) -> Result<f64> {
    let n = k.nrows() as f64;
    Ok(0.5 * (n * (2.0 * PI * E).ln() + log_det(k)?))
}

fn principal_submatrix(k: &DMatrix<f64>, idx: &[usize]) -> DMatrix<f64> {
    DMatrix::from_fn(idx.len(), idx.len(), |i, j| k[(idx[i], idx[j])])
}

/// `I(X₁; X₂) = ½ ln(det K₁ det K₂ / det K)` for a jointly Gaussian vector
/// whose indices are partitioned into `first` and `second`.
pub fn mutual_information(k: &DMatrix<f64>, first: &[usize], second: &[usize]) -> Result<f64> {
    let n = k.nrows();
    if k.ncols() != n {
        return Err(Error::Invalid("joint covariance must be square".into()));
    }
    let mut seen = vec![false; n];
    for &i in first.iter().chain(second) {
        if i >= n || seen[i] {
            return Err(Error::Invalid(format!("index {i} is out of range or repeated in the split")));
        }
        seen[i] = true;
    }
    if seen.iter().any(|s| !s) {
        return Err(Error::Invalid("split does not cover every index".into()));
    }
    let k1 = principal_submatrix(k, first);
    let k2 = principal_submatrix(k, second);
    Ok(0.5 * (log_det(&k1)? + log_det(&k2)? - log_det(k)?))
}

/// A Gaussian process with a constant mean and training data.
#[derive(Debug, Clone, PartialEq)]
pub struct GpModel {
    pub mean_const: f64,
    pub hyper: GpHyperparams,
    pub train_x: Vec<Point>,
    pub train_y: Vec<f64>,
}

impl GpModel {
    /// Builds a model whose constant mean is the empirical mean of `train_y`,
    /// or `prior_mean` when there is no data.
    pub fn new(hyper: GpHyperparams, train_x: Vec<Point>, train_y: Vec<f64>, prior_mean: f64) -> Result<Self> {
        if train_x.len() != train_y.len() {
            return Err(Error::Invalid(format!(
                "{} training inputs but {} targets",
                train_x.len(),
                train_y.len()
            )));
        }
        if train_y.iter().any(|y| !y.is_finite()) || train_x.iter().any(|p| !p.is_finite()) {
            return Err(Error::Invalid("training data must be finite".into()));
        }
        hyper.validate()?;
        let mean_const = if train_y.is_empty() {
            prior_mean
        } else {
            train_y.iter().sum::<f64>() / train_y.len() as f64
        };
        Ok(Self { mean_const, hyper, train_x, train_y })
    }

    pub fn with_hyper(&self, hyper: GpHyperparams) -> Self {
        Self { hyper, ..self.clone() }
    }

    fn factor(&self) -> Result<Cholesky<f64, Dyn>> {
        cholesky_jittered(&gram(&self.train_x, &self.hyper, true), self.hyper.signal_variance())
    }

    fn residuals(&self) -> DVector<f64> {
        DVector::from_iterator(self.train_y.len(), self.train_y.iter().map(|y| y - self.mean_const))
    }
}

/// Posterior mean and covariance over a set of query points.
#[derive(Debug, Clone, PartialEq)]
pub struct Posterior {
    pub mean: DVector<f64>,
    pub cov: DMatrix<f64>,
}

impl Posterior {
    pub fn variance(&self) -> Vec<f64> {
        self.cov.diagonal().iter().copied().collect()
    }
}

fn clamp_variance(v: f64) -> f64 {
    if v < 0.0 && v >= -1e-9 {
        0.0
    } else {
        v
    }
}

/// Posterior of the latent function at `query` given the model's data.
pub fn predict(model: &GpModel, query: &[Point]) -> Result<Posterior> {
    let h = &model.hyper;
    let k_oo = gram(query, h, false);
    if model.train_x.is_empty() {
        return Ok(Posterior { mean: DVector::from_element(query.len(), model.mean_const), cov: k_oo });
    }
    let chol = model.factor()?;
    let k_io = cross_cov(&model.train_x, query, h);
    let alpha = chol.solve(&model.residuals());
    let mean = k_io.tr_mul(&alpha).add_scalar(model.mean_const);
    let v = chol.l_dirty().solve_lower_triangular(&k_io).ok_or_else(|| {
        Error::Numeric("triangular solve failed".into())
    })?;
    let mut cov = k_oo - v.tr_mul(&v);
    // symmetrize and clamp round-off on the diagonal
    let n = cov.nrows();
    for i in 0..n {
        for j in 0..i {
            let s = 0.5 * (cov[(i, j)] + cov[(j, i)]);
            cov[(i, j)] = s;
            cov[(j, i)] = s;
        }
        cov[(i, i)] = clamp_variance(cov[(i, i)]);
    }
    Ok(Posterior { mean: DVector::from_vec(mean.iter().copied().collect()), cov })
}

/// Posterior mean and variance only, evaluated in parallel over chunks of
/// `query`. Every point is computed independently, so the output does not
/// depend on the chunking or the thread count.
pub fn predict_marginals(model: &GpModel, query: &[Point], chunk: usize) -> Result<(Vec<f64>, Vec<f64>)> {
    let h = model.hyper;
    if model.train_x.is_empty() {
        return Ok((vec![model.mean_const; query.len()], vec![h.signal_variance(); query.len()]));
    }
    let chol = model.factor()?;
    let alpha = chol.solve(&model.residuals());
    let l = chol.l_dirty();
    let parts: Vec<Result<Vec<(f64, f64)>>> = query
        .par_chunks(chunk.max(1))
        .map(|pts| {
            pts.iter()
                .map(|&q| {
                    let k = DVector::from_iterator(model.train_x.len(), model.train_x.iter().map(|&x| kernel(x, q, &h)));
                    let mean = model.mean_const + k.dot(&alpha);
                    let v = l
                        .solve_lower_triangular(&k)
                        .ok_or_else(|| Error::Numeric("triangular solve failed".into()))?;
                    Ok((mean, clamp_variance(h.signal_variance() - v.dot(&v))))
                })
                .collect()
        })
        .collect();
    let mut means = Vec::with_capacity(query.len());
    let mut vars = Vec::with_capacity(query.len());
    for part in parts {
        for (m, v) in part? {
            means.push(m);
            vars.push(v);
        }
    }
    Ok((means, vars))
}

/// `log p(y | X)` under `N(m·1, K + σ_n² I)`.
pub fn log_marginal_likelihood(model: &GpModel) -> Result<f64> {
    let n = model.train_y.len();
    if n == 0 {
        return Err(Error::Invalid("log marginal likelihood needs at least one training point".into()));
    }
    let chol = model.factor()?;
    let r = model.residuals();
    let alpha = chol.solve(&r);
    Ok(-0.5 * r.dot(&alpha) - 0.5 * chol_log_det(&chol) - 0.5 * n as f64 * (2.0 * PI).ln())
}

/// Maximizes the log marginal likelihood over `(ln σ_f, ln ℓ_x, ln ℓ_y)` with
/// `σ_n` held at `init.sigma_n`. Returns `init` unless the search finds a
/// strictly better likelihood.
pub fn fit_hyperparams(model: &GpModel, init: &GpHyperparams) -> Result<GpHyperparams> {
    fit_hyperparams_with(model, init, &NelderMeadOptions::default())
}

pub fn fit_hyperparams_with(
    model: &GpModel,
    init: &GpHyperparams,
    opts: &NelderMeadOptions,
) -> Result<GpHyperparams> {
    if model.train_x.len() < 2 {
        return Err(Error::Invalid("hyperparameter fitting needs at least two training points".into()));
    }
    init.validate()?;
    let decode = |x: &[f64]| GpHyperparams {
        sigma_f: x[0].exp(),
        sigma_n: init.sigma_n,
        length_scales: [x[1].exp(), x[2].exp()],
    };
    let objective = |x: &[f64]| {
        let h = decode(x);
        if h.validate().is_err() {
            return f64::INFINITY;
        }
        log_marginal_likelihood(&model.with_hyper(h)).map_or(f64::INFINITY, |v| -v)
    };
    let x0 = [init.sigma_f.ln(), init.length_scales[0].ln(), init.length_scales[1].ln()];
    let result = nelder_mead(objective, &x0, &[0.5, 0.5, 0.5], opts);
    let start = objective(&x0);
    if result.f < start {
        Ok(decode(&result.x))
    } else {
        Ok(*init)
    }
}
