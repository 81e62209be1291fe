//! Graph filters and Q-aware error analysis.
//!
//! A filter is given in one of three equivalent forms:
//! - `Matrix`: an explicit vertex-domain operator H
//! - `Spectral`: a per-mode response ĥ, applied as x ↦ U diag(ĥ) F x
//! - `Polynomial`: coefficients h_k of Σ_k h_k Z^k in the fundamental
//!   matrix Z, applied by iterated (sparse) multiplication
//!
//! For a basis with distinct frequencies the three descriptions coincide;
//! a spectral response that assigns different values to equal frequencies
//! is not polynomial-representable and [`spectral_to_polynomial`] reports
//! the infeasibility.
//!
//! Error analysis uses the Q-mean-squared error
//! MSE = ‖Hx − x‖²_Q + E‖Hn‖²_Q. Q-white noise (covariance σ²Q⁻¹) has a
//! flat spectrum in any (Δ, Q) basis, which gives the analytic shortcut
//! variance = σ²Σ_l |ĥ(l)|²; for any other noise inner product the
//! general trace formula σ²·tr(HᴴQHQ_n⁻¹) is evaluated instead.

use crate::error::{Error, Result};
use crate::gft::{Fundamental, GftBasis};
use crate::operators::InnerProduct;
use crate::seed::rng;
use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;

#[derive(Debug, Clone)]
pub enum FilterSpec {
    Matrix(DMatrix<f64>),
    Spectral(DVector<f64>),
    Polynomial(Vec<f64>),
}

impl FilterSpec {
    pub fn kind(&self) -> &'static str {
        match self {
            FilterSpec::Matrix(_) => "matrix",
            FilterSpec::Spectral(_) => "spectral",
            FilterSpec::Polynomial(_) => "polynomial",
        }
    }
}

/// Applies a spectral response through a basis.
pub fn apply_spectral(b: &GftBasis, response: &DVector<f64>, x: &DVector<f64>) -> Result<DVector<f64>> {
    if response.len() != b.num_modes() {
        return Err(Error::InvalidParameter(format!(
            "response has {} entries for {} modes",
            response.len(),
            b.num_modes()
        )));
    }
    let xhat = b.forward(x)?;
    b.inverse(&xhat.component_mul(response))
}

/// Applies Σ_k h_k Z^k x by Horner iteration; never densifies Z.
pub fn apply_polynomial(z: &Fundamental, coeffs: &[f64], x: &DVector<f64>) -> Result<DVector<f64>> {
    if coeffs.is_empty() {
        return Err(Error::InvalidParameter("empty polynomial".into()));
    }
    if x.len() != z.dim() {
        return Err(Error::InvalidParameter("signal/operator size mismatch".into()));
    }
    let mut y = x * *coeffs.last().unwrap();
    for &c in coeffs.iter().rev().skip(1) {
        y = z.matvec(&y) + x * c;
    }
    Ok(y)
}

/// Applies any filter form, given whichever context it needs.
pub fn apply_filter(
    spec: &FilterSpec,
    x: &DVector<f64>,
    basis: Option<&GftBasis>,
    z: Option<&Fundamental>,
) -> Result<DVector<f64>> {
    match spec {
        FilterSpec::Matrix(h) => {
            if h.ncols() != x.len() {
                return Err(Error::InvalidParameter("signal/operator size mismatch".into()));
            }
            Ok(h * x)
        }
        FilterSpec::Spectral(resp) => {
            let b = basis.ok_or_else(|| {
                Error::InvalidParameter("spectral filter needs a basis".into())
            })?;
            apply_spectral(b, resp, x)
        }
        FilterSpec::Polynomial(coeffs) => {
            if let Some(z) = z {
                apply_polynomial(z, coeffs, x)
            } else if let Some(b) = basis {
                // polynomial in Z acts spectrally as the polynomial in λ
                let resp = polynomial_response(b.freqs(), coeffs);
                apply_spectral(b, &resp, x)
            } else {
                Err(Error::InvalidParameter(
                    "polynomial filter needs a fundamental matrix or a basis".into(),
                ))
            }
        }
    }
}

/// ĥ(l) = Σ_k c_k λ_l^k evaluated with Horner's rule.
pub fn polynomial_response(freqs: &DVector<f64>, coeffs: &[f64]) -> DVector<f64> {
    freqs.map(|lam| {
        let mut acc = 0.0;
        for &c in coeffs.iter().rev() {
            acc = acc * lam + c;
        }
        acc
    })
}

/// Dense vertex-domain form H = U diag(ĥ) F of a spectral filter.
pub fn spectral_matrix(b: &GftBasis, response: &DVector<f64>) -> Result<DMatrix<f64>> {
    if response.len() != b.num_modes() {
        return Err(Error::InvalidParameter("response/mode count mismatch".into()));
    }
    let mut scaled = b.modes().clone();
    for c in 0..scaled.ncols() {
        let mut col = scaled.column_mut(c);
        col *= response[c];
    }
    Ok(scaled * b.analysis())
}

/// Checks Def.-3 invariance: H commutes with Z, relative to ‖H‖·‖Z‖.
pub fn is_invariance_filter(h: &DMatrix<f64>, z: &DMatrix<f64>) -> (bool, f64) {
    let comm = (h * z - z * h).norm();
    let scale = h.norm() * z.norm();
    if scale == 0.0 {
        return (true, 0.0);
    }
    let rel = comm / scale;
    (rel <= 1e-8, rel)
}

/// Ideal low-pass response: keeps modes 0..=cutoff, kills the rest.
pub fn ideal_lowpass_response(num_modes: usize, cutoff: usize) -> Result<DVector<f64>> {
    if cutoff >= num_modes {
        return Err(Error::InvalidParameter(format!(
            "cutoff {cutoff} out of range for {num_modes} modes"
        )));
    }
    Ok(DVector::from_fn(num_modes, |l, _| if l <= cutoff { 1.0 } else { 0.0 }))
}

/// Interpolates polynomial coefficients reproducing a spectral response.
///
/// Frequencies closer than `1e−9·max(1, λ_max)` are treated as equal; they
/// must carry equal responses (within the same scale) or no polynomial in Z
/// can realize the filter and an error is returned. The returned polynomial
/// has one coefficient per distinct frequency.
pub fn spectral_to_polynomial(freqs: &DVector<f64>, response: &DVector<f64>) -> Result<Vec<f64>> {
    if freqs.len() != response.len() || freqs.is_empty() {
        return Err(Error::InvalidParameter("frequency/response length mismatch".into()));
    }
    let max_f = freqs.amax().max(1.0);
    let tol = 1e-9 * max_f;
    let mut uniq: Vec<(f64, f64)> = Vec::new();
    for l in 0..freqs.len() {
        match uniq.iter().find(|(f, _)| (f - freqs[l]).abs() < tol) {
            Some(&(f, r)) => {
                if (r - response[l]).abs() > 1e-9 * response.amax().max(1.0) {
                    return Err(Error::Interpolation(format!(
                        "frequencies {f} and {} coincide but responses {r} and {} differ",
                        freqs[l], response[l]
                    )));
                }
            }
            None => uniq.push((freqs[l], response[l])),
        }
    }
    let k = uniq.len();
    let mut vand = DMatrix::zeros(k, k);
    for (r, &(f, _)) in uniq.iter().enumerate() {
        let mut p = 1.0;
        for c in 0..k {
            vand[(r, c)] = p;
            p *= f;
        }
    }
    let rhs = DVector::from_iterator(k, uniq.iter().map(|&(_, r)| r));
    let lu = vand.full_piv_lu();
    let sol = lu
        .solve(&rhs)
        .ok_or_else(|| Error::Interpolation("singular interpolation system".into()))?;
    Ok(sol.iter().cloned().collect())
}

/// Zero-mean Gaussian noise with covariance σ²Q⁻¹ (Q-white noise when Q
/// matches the basis inner product).
#[derive(Debug, Clone)]
pub struct NoiseModel {
    pub q: InnerProduct,
    pub sigma: f64,
    pub seed: u64,
}

impl NoiseModel {
    pub fn new(q: InnerProduct, sigma: f64, seed: u64) -> Result<NoiseModel> {
        if !(sigma.is_finite() && sigma >= 0.0) {
            return Err(Error::InvalidParameter(format!("sigma = {sigma}")));
        }
        Ok(NoiseModel { q, sigma, seed })
    }

    /// Draws realization `trial` deterministically (seed + trial index).
    pub fn sample(&self, trial: u64) -> DVector<f64> {
        let mut r = rng(self.seed.wrapping_add(trial));
        let n = self.q.dim();
        let z = DVector::from_fn(n, |_, _| r.sample::<f64, _>(StandardNormal));
        match &self.q {
            InnerProduct::Diagonal { q, .. } => {
                z.zip_map(q, |zi, qi| self.sigma * zi / qi.sqrt())
            }
            InnerProduct::General { chol_l, .. } => {
                // cov(L⁻ᵀz) = L⁻ᵀL⁻¹ = Q⁻¹
                chol_l
                    .transpose()
                    .solve_upper_triangular(&z)
                    .expect("positive-definite factor")
                    * self.sigma
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MsePath {
    /// Noise Q equals basis Q: variance = σ² Σ_l |ĥ(l)|².
    FlatSpectrum,
    /// General trace formula σ²·tr(HᴴQHQ_n⁻¹).
    GeneralTrace,
    /// No noise model supplied.
    Noiseless,
}

#[derive(Debug, Clone)]
pub struct MseReport {
    pub bias: f64,
    pub variance: f64,
    pub total: f64,
    pub path: MsePath,
}

fn spectral_response_of(b: &GftBasis, spec: &FilterSpec) -> Option<DVector<f64>> {
    match spec {
        FilterSpec::Spectral(r) => Some(r.clone()),
        FilterSpec::Polynomial(c) => Some(polynomial_response(b.freqs(), c)),
        FilterSpec::Matrix(_) => None,
    }
}

fn dense_form(b: &GftBasis, spec: &FilterSpec) -> Result<DMatrix<f64>> {
    match spec {
        FilterSpec::Matrix(h) => Ok(h.clone()),
        _ => spectral_matrix(b, &spectral_response_of(b, spec).expect("spectral form")),
    }
}

/// Analytic Q-MSE of a filter on signal `x`, decomposed as bias + variance.
///
/// Needs a full basis. Diagonal-response filters compute the bias in the
/// spectral domain, Σ_l |ĥ(l) − 1|²·|x̂(l)|², which is exact for an
/// all-pass response; matrix filters use ‖Hx − x‖²_Q directly.
pub fn q_mse(
    b: &GftBasis,
    spec: &FilterSpec,
    x: &DVector<f64>,
    noise: Option<&NoiseModel>,
) -> Result<MseReport> {
    if !b.is_full() {
        return Err(Error::InvalidParameter("Q-MSE needs a full basis".into()));
    }
    let bias = match spectral_response_of(b, spec) {
        Some(resp) => {
            let xhat = b.forward(x)?;
            (0..b.num_modes())
                .map(|l| (resp[l] - 1.0).powi(2) * xhat[l].powi(2))
                .sum()
        }
        None => {
            let y = apply_filter(spec, x, Some(b), None)?;
            let d = &y - x;
            b.q().inner(&d, &d)
        }
    };

    let (variance, path) = match noise {
        None => (0.0, MsePath::Noiseless),
        Some(model) => {
            let s2 = model.sigma * model.sigma;
            if model.q.same_as(b.q()) {
                if let Some(resp) = spectral_response_of(b, spec) {
                    (s2 * resp.iter().map(|h| h * h).sum::<f64>(), MsePath::FlatSpectrum)
                } else {
                    (general_trace_variance(b, spec, model)? * s2, MsePath::GeneralTrace)
                }
            } else {
                (general_trace_variance(b, spec, model)? * s2, MsePath::GeneralTrace)
            }
        }
    };
    Ok(MseReport {
        bias,
        variance,
        total: bias + variance,
        path,
    })
}

/// tr(HᴴQHQ_n⁻¹) without the σ² factor.
fn general_trace_variance(b: &GftBasis, spec: &FilterSpec, model: &NoiseModel) -> Result<f64> {
    if model.q.dim() != b.n() {
        return Err(Error::InvalidParameter("noise dimension mismatch".into()));
    }
    let h = dense_form(b, spec)?;
    let qb = b.q().matrix();
    let c = h.transpose() * qb * &h;
    let mut acc = 0.0;
    for j in 0..c.ncols() {
        let col = model.q.inv_apply(&c.column(j).into_owned());
        acc += col[j];
    }
    Ok(acc)
}

#[derive(Debug, Clone)]
pub struct MonteCarloMse {
    pub mean: f64,
    pub std_error: f64,
    pub trials: usize,
}

/// Monte-Carlo estimate of the Q-MSE: mean over `trials` of
/// ‖H(x + n_t) − x‖²_Q with per-trial seeds `seed + t`.
pub fn q_mse_monte_carlo(
    b: &GftBasis,
    spec: &FilterSpec,
    x: &DVector<f64>,
    noise: &NoiseModel,
    trials: usize,
) -> Result<MonteCarloMse> {
    if trials == 0 {
        return Err(Error::InvalidParameter("needs at least one trial".into()));
    }
    if !b.is_full() {
        return Err(Error::InvalidParameter("Q-MSE needs a full basis".into()));
    }
    // resolve spectral/polynomial forms once; matrix form applied directly
    let dense = match spec {
        FilterSpec::Matrix(h) => Some(h.clone()),
        _ => None,
    };
    let resp = spectral_response_of(b, spec);
    // per-trial seeds and an indexed collect keep the estimate independent
    // of the thread schedule
    let errs: Vec<f64> = (0..trials)
        .into_par_iter()
        .map(|t| {
            let y = x + noise.sample(t as u64);
            let fy = match (&dense, &resp) {
                (Some(h), _) => h * &y,
                (None, Some(r)) => apply_spectral(b, r, &y)?,
                _ => unreachable!(),
            };
            let d = &fy - x;
            Ok(b.q().inner(&d, &d))
        })
        .collect::<Result<Vec<f64>>>()?;
    let mut sum = 0.0;
    let mut sumsq = 0.0;
    for err in errs {
        sum += err;
        sumsq += err * err;
    }
    let mean = sum / trials as f64;
    let var = if trials > 1 {
        ((sumsq - sum * sum / trials as f64) / (trials as f64 - 1.0)).max(0.0)
    } else {
        0.0
    };
    Ok(MonteCarloMse {
        mean,
        std_error: (var / trials as f64).sqrt(),
        trials,
    })
}
