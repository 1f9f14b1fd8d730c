//! Binary logistic regression by maximum likelihood.
//!
//! Fitting is damped Newton / iteratively reweighted least squares: full
//! Newton steps with step-halving whenever the penalized deviance fails to
//! decrease. Convergence means the score vector's max-norm is within
//! [`FitOptions::tol`]. The fit reports the diagnostics downstream model
//! comparison needs: per-coefficient standard errors from the inverse
//! observed information, Wald chi-square statistics, residual deviance
//! (`-2 log L`), and AIC (`deviance + 2 k`).
//!
//! Separation is detected rather than silently reported: a coefficient
//! running past [`FitOptions::beta_bound`] while the deviance still improves,
//! or fitted probabilities pinned within 1e-8 of 0 or 1 at the stopping
//! point, mark the result not-converged with a diagnostic message.

use std::collections::BTreeMap;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::Error;
use crate::numfmt::round6;
use crate::Result;

/// Name of the implicit leading intercept column.
pub const INTERCEPT: &str = "intercept";

/// Chi-square(1) critical values for the significance stars.
const CHISQ1_CRIT_05: f64 = 3.8414588206941285;
const CHISQ1_CRIT_001: f64 = 10.827566170662733;
const CHISQ1_CRIT_0001: f64 = 15.136705226623397;

/// Probability floor/ceiling inside the deviance, so log(0) cannot occur.
const PROB_CLAMP: f64 = 1e-12;

/// Fitted probabilities closer than this to 0 or 1 indicate (quasi-)separation.
const DEGENERATE_PROB: f64 = 1e-8;

/// A named, validated design: intercept column first, then predictors, plus
/// the 0/1 response.
#[derive(Debug, Clone, PartialEq)]
pub struct DesignMatrix {
    names: Vec<String>,
    /// Column-major storage; `columns[j][i]` is observation `i` of column `j`.
    columns: Vec<Vec<f64>>,
    response: Vec<u8>,
}

impl DesignMatrix {
    /// Builds a design from named predictor columns; the intercept column of
    /// ones is prepended automatically.
    pub fn new(predictors: Vec<(String, Vec<f64>)>, response: Vec<u8>) -> Result<Self> {
        let n = response.len();
        if n == 0 {
            return Err(Error::Design("response is empty".into()));
        }
        if response.iter().any(|&y| y > 1) {
            return Err(Error::Design("response values must be 0 or 1".into()));
        }
        let mut names = vec![INTERCEPT.to_string()];
        let mut columns = vec![vec![1.0; n]];
        for (name, values) in predictors {
            if name == INTERCEPT || names.contains(&name) {
                return Err(Error::Design(format!("duplicate column name '{name}'")));
            }
            if values.len() != n {
                return Err(Error::Design(format!(
                    "column '{name}' has {} values for {n} observations",
                    values.len()
                )));
            }
            if values.iter().any(|v| !v.is_finite()) {
                return Err(Error::Design(format!(
                    "column '{name}' contains non-finite values"
                )));
            }
            names.push(name);
            columns.push(values);
        }
        Ok(DesignMatrix {
            names,
            columns,
            response,
        })
    }

    pub fn n_obs(&self) -> usize {
        self.response.len()
    }

    pub fn n_params(&self) -> usize {
        self.names.len()
    }

    /// Column names, intercept first.
    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn response(&self) -> &[u8] {
        &self.response
    }

    fn matrix(&self) -> DMatrix<f64> {
        let n = self.n_obs();
        let p = self.n_params();
        DMatrix::from_fn(n, p, |i, j| self.columns[j][i])
    }

    fn response_vector(&self) -> DVector<f64> {
        DVector::from_iterator(self.n_obs(), self.response.iter().map(|&y| f64::from(y)))
    }

    /// Columns linearly dependent on their predecessors, by twice-applied
    /// Gram-Schmidt with a relative residual threshold. The intercept comes
    /// first, so constant predictors get blamed, not the intercept.
    pub fn collinear_columns(&self) -> Vec<String> {
        let n = self.n_obs();
        let mut basis: Vec<DVector<f64>> = Vec::new();
        let mut dependent = Vec::new();
        for (name, col) in self.names.iter().zip(&self.columns) {
            let v = DVector::from_column_slice(col);
            let original_norm = v.norm();
            let mut r = v;
            for _ in 0..2 {
                for b in &basis {
                    let proj = b.dot(&r);
                    r.axpy(-proj, b, 1.0);
                }
            }
            let threshold = 1e-8 * original_norm.max(1.0) * (n as f64).sqrt();
            if original_norm == 0.0 || r.norm() <= threshold {
                dependent.push(name.clone());
            } else {
                let norm = r.norm();
                basis.push(r / norm);
            }
        }
        dependent
    }
}

/// Controls for the IRLS fit.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FitOptions {
    /// Convergence tolerance on the score vector's max-norm.
    pub tol: f64,
    pub max_iter: usize,
    /// A coefficient magnitude beyond this while the deviance still improves
    /// triggers the separation diagnostic.
    pub beta_bound: f64,
    /// Optional L2 penalty on non-intercept coefficients, for exploratory
    /// use near separation. Off by default; penalized fits are flagged in
    /// the model metadata.
    pub ridge: f64,
}

impl Default for FitOptions {
    fn default() -> Self {
        FitOptions {
            tol: 1e-8,
            max_iter: 100,
            beta_bound: 30.0,
            ridge: 0.0,
        }
    }
}

/// One fitted coefficient with its Wald diagnostics.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Coefficient {
    pub name: String,
    pub estimate: f64,
    pub std_error: f64,
    pub wald_chisq: f64,
}

/// A fitted logistic model: coefficients, diagnostics, and convergence state.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LogitModel {
    pub coefficients: Vec<Coefficient>,
    pub residual_deviance: f64,
    pub aic: f64,
    pub n_params: usize,
    pub n_obs: usize,
    pub converged: bool,
    pub iterations: usize,
    /// Present when the fit hit a separation diagnostic; such a model is
    /// never reported as converged.
    pub separation: Option<String>,
    /// Ridge penalty used, when nonzero.
    pub ridge: f64,
}

impl LogitModel {
    pub fn coefficient(&self, name: &str) -> Option<&Coefficient> {
        self.coefficients.iter().find(|c| c.name == name)
    }

    /// Predictor names, intercept excluded, in design order.
    pub fn predictor_names(&self) -> Vec<&str> {
        self.coefficients
            .iter()
            .filter(|c| c.name != INTERCEPT)
            .map(|c| c.name.as_str())
            .collect()
    }

    pub fn to_json(&self) -> String {
        let rounded = LogitModel {
            coefficients: self
                .coefficients
                .iter()
                .map(|c| Coefficient {
                    name: c.name.clone(),
                    estimate: round6(c.estimate),
                    std_error: round6(c.std_error),
                    wald_chisq: round6(c.wald_chisq),
                })
                .collect(),
            residual_deviance: round6(self.residual_deviance),
            aic: round6(self.aic),
            ..self.clone()
        };
        serde_json::to_string_pretty(&rounded).expect("model serializes")
    }

    pub fn from_json(json: &str) -> Result<Self> {
        let model: LogitModel =
            serde_json::from_str(json).map_err(|e| Error::Config(format!("model: {e}")))?;
        if model.coefficients.is_empty() || model.coefficients[0].name != INTERCEPT {
            return Err(Error::Config(
                "model must list the intercept coefficient first".into(),
            ));
        }
        if model.n_params != model.coefficients.len() {
            return Err(Error::Config(format!(
                "model declares {} parameters but lists {} coefficients",
                model.n_params,
                model.coefficients.len()
            )));
        }
        if model.coefficients.iter().any(|c| !c.estimate.is_finite()) {
            return Err(Error::Config("model has non-finite coefficients".into()));
        }
        Ok(model)
    }
}

/// Numerically stable logistic function.
pub fn logistic(eta: f64) -> f64 {
    if eta >= 0.0 {
        1.0 / (1.0 + (-eta).exp())
    } else {
        let e = eta.exp();
        e / (1.0 + e)
    }
}

fn linear_predictor(design: &DesignMatrix, beta: &DVector<f64>) -> DVector<f64> {
    design.matrix() * beta
}

/// Bernoulli log-likelihood at `beta`, with probabilities clamped away from
/// 0 and 1.
pub fn log_likelihood(design: &DesignMatrix, beta: &[f64]) -> f64 {
    let beta = DVector::from_column_slice(beta);
    let eta = linear_predictor(design, &beta);
    design
        .response
        .iter()
        .zip(eta.iter())
        .map(|(&y, &e)| {
            let p = logistic(e).clamp(PROB_CLAMP, 1.0 - PROB_CLAMP);
            if y == 1 {
                p.ln()
            } else {
                (1.0 - p).ln()
            }
        })
        .sum()
}

/// Score vector (log-likelihood gradient) at `beta`: `X^T (y - p)`.
pub fn score_vector(design: &DesignMatrix, beta: &[f64]) -> Vec<f64> {
    let beta = DVector::from_column_slice(beta);
    let eta = linear_predictor(design, &beta);
    let resid = design.response_vector() - eta.map(logistic);
    (design.matrix().transpose() * resid)
        .iter()
        .copied()
        .collect()
}

/// Residual deviance at `beta`: `-2 log L`.
pub fn deviance_at(design: &DesignMatrix, beta: &[f64]) -> f64 {
    -2.0 * log_likelihood(design, beta)
}

/// AIC from its parts: `deviance + 2 k`.
pub fn aic_from(residual_deviance: f64, n_params: usize) -> f64 {
    residual_deviance + 2.0 * n_params as f64
}

/// Significance stars against the chi-square(1) critical values at the
/// 0.05 / 0.001 / 0.0001 levels.
pub fn significance_stars(wald_chisq: f64) -> &'static str {
    if wald_chisq >= CHISQ1_CRIT_0001 {
        "***"
    } else if wald_chisq >= CHISQ1_CRIT_001 {
        "**"
    } else if wald_chisq >= CHISQ1_CRIT_05 {
        "*"
    } else {
        ""
    }
}

fn penalized_deviance(design: &DesignMatrix, beta: &DVector<f64>, ridge: f64) -> f64 {
    let mut dev = deviance_at(design, beta.as_slice());
    if ridge > 0.0 {
        dev += ridge * beta.iter().skip(1).map(|b| b * b).sum::<f64>();
    }
    dev
}

/// Maximum-likelihood fit of a logistic model on `design`.
///
/// Errors on a single-class response and on rank-deficient designs (naming
/// the collinear columns). Separation does not error: the result comes back
/// with `converged = false` and a diagnostic message.
pub fn fit(design: &DesignMatrix, options: &FitOptions) -> Result<LogitModel> {
    let n = design.n_obs();
    let p = design.n_params();
    if n <= p {
        return Err(Error::Design(format!(
            "{n} observations cannot identify {p} parameters"
        )));
    }
    let positives = design.response.iter().filter(|&&y| y == 1).count();
    if positives == 0 {
        return Err(Error::SingleClassResponse(0));
    }
    if positives == n {
        return Err(Error::SingleClassResponse(1));
    }
    let collinear = design.collinear_columns();
    if !collinear.is_empty() {
        return Err(Error::RankDeficient { columns: collinear });
    }

    let x = design.matrix();
    let y = design.response_vector();
    let mut beta: DVector<f64> = DVector::zeros(p);
    let mut dev = penalized_deviance(design, &beta, options.ridge);
    let mut converged = false;
    let mut iterations = 0usize;
    let mut separation: Option<String> = None;

    for _ in 0..options.max_iter {
        let eta = &x * &beta;
        let probs = eta.map(logistic);
        let mut grad = x.transpose() * (&y - &probs);
        if options.ridge > 0.0 {
            for j in 1..p {
                grad[j] -= options.ridge * beta[j];
            }
        }
        if grad.amax() <= options.tol {
            converged = true;
            break;
        }

        let info = information_matrix(&x, &probs, options.ridge);
        let chol = nalgebra::Cholesky::new(info)
            .ok_or_else(|| Error::Design("observed information is not positive definite".into()))?;
        let delta = chol.solve(&grad);

        let mut step = 1.0;
        let mut candidate;
        let mut dev_new;
        loop {
            candidate = &beta + &delta * step;
            dev_new = penalized_deviance(design, &candidate, options.ridge);
            if dev_new <= dev + 1e-10 || step < 1e-10 {
                break;
            }
            step *= 0.5;
        }
        beta = candidate;
        dev = dev_new;
        iterations += 1;

        let runaway: Vec<&String> = design
            .names
            .iter()
            .zip(beta.iter())
            .filter(|(_, b)| b.abs() > options.beta_bound)
            .map(|(name, _)| name)
            .collect();
        if !runaway.is_empty() {
            separation = Some(format!(
                "coefficient(s) {} exceeded the bound {} while the deviance was still improving; data are (quasi-)separated",
                runaway
                    .iter()
                    .map(|s| s.as_str())
                    .collect::<Vec<_>>()
                    .join(", "),
                options.beta_bound
            ));
            break;
        }
    }

    let eta = &x * &beta;
    let probs = eta.map(logistic);
    if separation.is_none() {
        let pinned = probs
            .iter()
            .filter(|&&pr| !(DEGENERATE_PROB..=1.0 - DEGENERATE_PROB).contains(&pr))
            .count();
        if pinned > 0 {
            separation = Some(format!(
                "{pinned} fitted probabilities within {DEGENERATE_PROB:.0e} of 0 or 1; data are (quasi-)separated"
            ));
        }
    }
    if separation.is_some() {
        converged = false;
    }

    let info = information_matrix(&x, &probs, options.ridge);
    let covariance = nalgebra::Cholesky::new(info)
        .ok_or_else(|| Error::Design("observed information is not positive definite".into()))?
        .inverse();

    let residual_deviance = deviance_at(design, beta.as_slice());
    let coefficients = design
        .names
        .iter()
        .enumerate()
        .map(|(j, name)| {
            let estimate = beta[j];
            let std_error = covariance[(j, j)].max(0.0).sqrt();
            let wald_chisq = if std_error > 0.0 {
                (estimate / std_error).powi(2)
            } else {
                0.0
            };
            Coefficient {
                name: name.clone(),
                estimate,
                std_error,
                wald_chisq,
            }
        })
        .collect();

    Ok(LogitModel {
        coefficients,
        residual_deviance,
        aic: aic_from(residual_deviance, p),
        n_params: p,
        n_obs: n,
        converged,
        iterations,
        separation,
        ridge: options.ridge,
    })
}

/// `X^T W X` with `W = diag(p(1-p))`, floored so the matrix stays positive
/// definite, plus the ridge term on non-intercept diagonals.
fn information_matrix(x: &DMatrix<f64>, probs: &DVector<f64>, ridge: f64) -> DMatrix<f64> {
    let mut weighted = x.clone();
    for (i, pr) in probs.iter().enumerate() {
        let w = (pr * (1.0 - pr)).max(1e-12);
        weighted.row_mut(i).scale_mut(w);
    }
    let mut info = x.transpose() * weighted;
    if ridge > 0.0 {
        for j in 1..info.nrows() {
            info[(j, j)] += ridge;
        }
    }
    info
}

/// Probability of a positive response for one named predictor row.
///
/// The row must supply exactly the model's non-intercept columns.
pub fn predict_prob(model: &LogitModel, row: &BTreeMap<String, f64>) -> Result<f64> {
    let expected = model.predictor_names();
    let missing: Vec<String> = expected
        .iter()
        .filter(|name| !row.contains_key(**name))
        .map(|s| s.to_string())
        .collect();
    let extra: Vec<String> = row
        .keys()
        .filter(|k| !expected.contains(&k.as_str()))
        .cloned()
        .collect();
    if !missing.is_empty() || !extra.is_empty() {
        return Err(Error::ColumnMismatch { missing, extra });
    }
    let mut eta = 0.0;
    for c in &model.coefficients {
        if c.name == INTERCEPT {
            eta += c.estimate;
        } else {
            let value = row[&c.name];
            if !value.is_finite() {
                return Err(Error::Invalid(format!(
                    "value for '{}' is not finite",
                    c.name
                )));
            }
            eta += c.estimate * value;
        }
    }
    Ok(logistic(eta))
}

/// Residual deviance of `model` evaluated on `design`; the design columns
/// must match the model columns by name and order.
pub fn deviance(model: &LogitModel, design: &DesignMatrix) -> Result<f64> {
    let model_names: Vec<&str> = model.coefficients.iter().map(|c| c.name.as_str()).collect();
    let design_names: Vec<&str> = design.names.iter().map(|s| s.as_str()).collect();
    if model_names != design_names {
        let missing = model_names
            .iter()
            .filter(|n| !design_names.contains(n))
            .map(|s| s.to_string())
            .collect();
        let extra = design_names
            .iter()
            .filter(|n| !model_names.contains(n))
            .map(|s| s.to_string())
            .collect();
        return Err(Error::ColumnMismatch { missing, extra });
    }
    let beta: Vec<f64> = model.coefficients.iter().map(|c| c.estimate).collect();
    Ok(deviance_at(design, &beta))
}

/// One row of the model-comparison ranking.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelRank {
    pub name: String,
    pub aic: f64,
    pub n_params: usize,
    pub residual_deviance: f64,
    /// Distance from the best model's AIC.
    pub delta_aic: f64,
    pub converged: bool,
}

/// Ranks models by ascending AIC; ties break toward fewer parameters, then
/// lexicographic name.
pub fn compare_models(models: &[(String, &LogitModel)]) -> Result<Vec<ModelRank>> {
    if models.len() < 2 {
        return Err(Error::Invalid(
            "model comparison needs at least two models".into(),
        ));
    }
    let mut ranks: Vec<ModelRank> = models
        .iter()
        .map(|(name, m)| ModelRank {
            name: name.clone(),
            aic: m.aic,
            n_params: m.n_params,
            residual_deviance: m.residual_deviance,
            delta_aic: 0.0,
            converged: m.converged,
        })
        .collect();
    ranks.sort_by(|a, b| {
        a.aic
            .total_cmp(&b.aic)
            .then(a.n_params.cmp(&b.n_params))
            .then(a.name.cmp(&b.name))
    });
    let best = ranks[0].aic;
    for r in &mut ranks {
        r.delta_aic = r.aic - best;
    }
    Ok(ranks)
}
