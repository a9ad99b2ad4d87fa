use std::collections::VecDeque;

use serde::{Deserialize, Serialize};

use super::SparseVector;
use crate::error::{Error, Result};

const HISTORY: usize = 10;
const ARMIJO: f64 = 1e-4;
const MAX_BACKTRACKS: usize = 50;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LogRegConfig {
    pub l2: f64,
    pub max_iter: usize,
    pub tol: f64,
}

impl Default for LogRegConfig {
    fn default() -> Self {
        LogRegConfig {
            l2: 1.0,
            max_iter: 200,
            tol: 1e-6,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LinearModel {
    pub weights: Vec<f64>,
    pub bias: f64,
    pub l2: f64,
    pub iterations: usize,
    pub final_objective: f64,
    /// Objective after each accepted optimizer step, starting at the origin.
    pub objective_trace: Vec<f64>,
}

impl LinearModel {
    pub fn zeros(dim: usize) -> Self {
        LinearModel {
            weights: vec![0.0; dim],
            bias: 0.0,
            l2: 0.0,
            iterations: 0,
            final_objective: 0.0,
            objective_trace: Vec::new(),
        }
    }

    pub fn dim(&self) -> usize {
        self.weights.len()
    }

    pub fn decision(&self, x: &SparseVector) -> Result<f64> {
        if x.dim() != self.dim() {
            return Err(Error::VectorDimension {
                expected: self.dim(),
                found: x.dim(),
            });
        }
        Ok(x.dot(&self.weights) + self.bias)
    }

    pub fn predict_proba(&self, x: &SparseVector) -> Result<f64> {
        Ok(probability(self.decision(x)?))
    }

    pub fn predict_proba_dense(&self, x: &[f64]) -> Result<f64> {
        if x.len() != self.dim() {
            return Err(Error::VectorDimension {
                expected: self.dim(),
                found: x.len(),
            });
        }
        let z: f64 = self.weights.iter().zip(x).map(|(w, v)| w * v).sum::<f64>() + self.bias;
        Ok(probability(z))
    }

    /// The model with every weight and the bias negated; its probabilities
    /// are the complements of this model's.
    pub fn negated(&self) -> Self {
        LinearModel {
            weights: self.weights.iter().map(|w| -w).collect(),
            bias: -self.bias,
            ..self.clone()
        }
    }
}

pub fn sigmoid(z: f64) -> f64 {
    if z >= 0.0 {
        1.0 / (1.0 + (-z).exp())
    } else {
        let e = z.exp();
        e / (1.0 + e)
    }
}

// Keeps the output strictly inside (0, 1).
fn probability(z: f64) -> f64 {
    sigmoid(z).clamp(f64::MIN_POSITIVE, 1.0 - f64::EPSILON / 2.0)
}

pub fn predict_proba(model: &LinearModel, x: &SparseVector) -> Result<f64> {
    model.predict_proba(x)
}

fn log1p_exp(z: f64) -> f64 {
    if z > 0.0 {
        z + (-z).exp().ln_1p()
    } else {
        z.exp().ln_1p()
    }
}

/// Penalized negative log-likelihood and its gradient at `params`, where the
/// last parameter is the bias:
/// `sum_i [log(1 + e^{z_i}) - y_i z_i] + l2/2 * (|w|^2 + b^2)`.
pub fn logistic_objective(
    x: &[SparseVector],
    y: &[bool],
    l2: f64,
    params: &[f64],
) -> (f64, Vec<f64>) {
    let dim = params.len() - 1;
    let (weights, bias) = (&params[..dim], params[dim]);
    let mut value = 0.0;
    let mut grad = vec![0.0; params.len()];
    for (row, &label) in x.iter().zip(y) {
        let z = row.dot(weights) + bias;
        let target = if label { 1.0 } else { 0.0 };
        value += log1p_exp(z) - target * z;
        let residual = sigmoid(z) - target;
        for &(i, v) in row.entries() {
            grad[i] += residual * v;
        }
        grad[dim] += residual;
    }
    for (g, p) in grad.iter_mut().zip(params) {
        value += 0.5 * l2 * p * p;
        *g += l2 * p;
    }
    (value, grad)
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

/// Fits an L2-regularized logistic regression with L-BFGS and a backtracking
/// Armijo line search. Stops when the gradient norm drops to `tol`, after
/// `max_iter` accepted steps, or when no step decreases the objective.
pub fn train_logreg(x: &[SparseVector], y: &[bool], config: &LogRegConfig) -> Result<LinearModel> {
    if x.is_empty() {
        return Err(Error::EmptyDataset);
    }
    if x.len() != y.len() {
        return Err(Error::Config(format!(
            "{} feature rows but {} labels",
            x.len(),
            y.len()
        )));
    }
    let dim = x[0].dim();
    for (r, row) in x.iter().enumerate() {
        if row.dim() != dim {
            return Err(Error::VectorDimension {
                expected: dim,
                found: row.dim(),
            });
        }
        if let Some(&(index, _)) = row.entries().iter().find(|(_, v)| !v.is_finite()) {
            return Err(Error::NonFiniteFeature { row: r, index });
        }
    }

    let l2 = config.l2;
    let mut params = vec![0.0; dim + 1];
    let (mut value, mut grad) = logistic_objective(x, y, l2, &params);
    let mut trace = vec![value];
    let mut history: VecDeque<(Vec<f64>, Vec<f64>, f64)> = VecDeque::with_capacity(HISTORY);
    let mut iterations = 0;

    while iterations < config.max_iter && norm(&grad) > config.tol {
        let mut direction = two_loop(&grad, &history);
        let mut slope = dot(&direction, &grad);
        if slope >= 0.0 {
            history.clear();
            direction = grad.iter().map(|g| -g).collect();
            slope = -dot(&grad, &grad);
        }
        let mut step = if history.is_empty() {
            (1.0 / norm(&grad)).min(1.0)
        } else {
            1.0
        };

        let mut accepted = None;
        for _ in 0..MAX_BACKTRACKS {
            let candidate: Vec<f64> = params
                .iter()
                .zip(&direction)
                .map(|(p, d)| p + step * d)
                .collect();
            let (v, g) = logistic_objective(x, y, l2, &candidate);
            if v <= value + ARMIJO * step * slope {
                accepted = Some((candidate, v, g));
                break;
            }
            step *= 0.5;
        }
        let Some((next, next_value, next_grad)) = accepted else {
            break;
        };

        let s: Vec<f64> = next.iter().zip(&params).map(|(a, b)| a - b).collect();
        let t: Vec<f64> = next_grad.iter().zip(&grad).map(|(a, b)| a - b).collect();
        let st = dot(&s, &t);
        if st > 1e-12 * dot(&t, &t) {
            if history.len() == HISTORY {
                history.pop_front();
            }
            history.push_back((s, t, 1.0 / st));
        }

        let decrease = value - next_value;
        params = next;
        value = next_value;
        grad = next_grad;
        trace.push(value);
        iterations += 1;
        if decrease <= 1e-15 * value.abs().max(1.0) {
            break;
        }
    }

    let bias = params.pop().unwrap();
    Ok(LinearModel {
        weights: params,
        bias,
        l2,
        iterations,
        final_objective: value,
        objective_trace: trace,
    })
}

fn two_loop(grad: &[f64], history: &VecDeque<(Vec<f64>, Vec<f64>, f64)>) -> Vec<f64> {
    let mut q = grad.to_vec();
    let mut alphas = Vec::with_capacity(history.len());
    for (s, t, rho) in history.iter().rev() {
        let a = rho * dot(s, &q);
        q.iter_mut().zip(t).for_each(|(qi, ti)| *qi -= a * ti);
        alphas.push(a);
    }
    if let Some((s, t, _)) = history.back() {
        let gamma = dot(s, t) / dot(t, t);
        q.iter_mut().for_each(|qi| *qi *= gamma);
    }
    for ((s, t, rho), a) in history.iter().zip(alphas.iter().rev()) {
        let b = rho * dot(t, &q);
        q.iter_mut().zip(s).for_each(|(qi, si)| *qi += (a - b) * si);
    }
    q.iter_mut().for_each(|qi| *qi = -*qi);
    q
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rows(values: &[f64]) -> Vec<SparseVector> {
        values
            .iter()
            .map(|&v| SparseVector::from_dense(&[v]))
            .collect()
    }

    #[test]
    fn zero_model_is_half() {
        let m = LinearModel::zeros(1);
        assert_eq!(m.predict_proba_dense(&[0.0]).unwrap(), 0.5);
        let mut m = LinearModel::zeros(1);
        m.weights[0] = 1.0;
        assert_eq!(m.predict_proba_dense(&[0.0]).unwrap(), 0.5);
        let mut last = 0.0;
        for x in [0.5, 1.0, 5.0, 20.0, 50.0, 1000.0] {
            let p = m.predict_proba_dense(&[x]).unwrap();
            assert!(p >= last && p < 1.0);
            last = p;
        }
        assert!(last > 0.999);
        assert!(matches!(
            m.predict_proba_dense(&[1.0, 2.0]),
            Err(Error::VectorDimension {
                expected: 1,
                found: 2
            })
        ));
    }

    #[test]
    fn balanced_zero_features() {
        let x = rows(&[0.0; 6]);
        let y = [true, false, true, false, true, false];
        let m = train_logreg(&x, &y, &LogRegConfig::default()).unwrap();
        assert!(m.weights[0].abs() < 1e-9 && m.bias.abs() < 1e-9);
        assert!((m.predict_proba_dense(&[3.0]).unwrap() - 0.5).abs() < 1e-9);
    }

    #[test]
    fn single_class_bias_only() {
        // Bias-only optimum of n*log(1+e^b) + l2/2 b^2 with n = 4, l2 = 1:
        // 4*sigmoid(b) + b = 0, solved by bisection below.
        let x = rows(&[0.0; 4]);
        let m = train_logreg(&x, &[false; 4], &LogRegConfig::default()).unwrap();
        let (mut lo, mut hi) = (-10.0f64, 0.0f64);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if 4.0 * sigmoid(mid) + mid > 0.0 {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        assert!((m.bias - lo).abs() < 1e-6, "{} vs {}", m.bias, lo);
        assert!(m.predict_proba_dense(&[0.0]).unwrap() < 0.5);
    }

    #[test]
    fn separable_one_dimensional() {
        let x = rows(&[-1.0, 1.0]);
        let y = [false, true];
        let cfg = LogRegConfig {
            l2: 0.01,
            ..LogRegConfig::default()
        };
        let m = train_logreg(&x, &y, &cfg).unwrap();
        let p = |v: f64| m.predict_proba_dense(&[v]).unwrap();
        assert!(p(1.0) > 0.9);
        assert!(p(-1.0) < p(0.0) && p(0.0) < p(1.0));
        // Stationarity: by symmetry b = 0 and w solves 2*sigmoid(-w) = l2*w.
        let (mut lo, mut hi) = (0.0f64, 100.0f64);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if 2.0 * sigmoid(-mid) - 0.01 * mid > 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        assert!(
            (m.weights[0] - lo).abs() < 1e-5,
            "{} vs {}",
            m.weights[0],
            lo
        );
        assert!(m.bias.abs() < 1e-6);
    }

    #[test]
    fn errors() {
        assert!(matches!(
            train_logreg(&[], &[], &LogRegConfig::default()),
            Err(Error::EmptyDataset)
        ));
        let bad = vec![SparseVector::from_dense(&[f64::NAN])];
        assert!(matches!(
            train_logreg(&bad, &[true], &LogRegConfig::default()),
            Err(Error::NonFiniteFeature { row: 0, index: 0 })
        ));
    }

    #[test]
    fn negated_model_complements() {
        let m = LinearModel {
            weights: vec![0.7, -1.3],
            bias: 0.2,
            ..LinearModel::zeros(2)
        };
        let n = m.negated();
        for x in [[0.0, 0.0], [1.0, 2.0], [-3.0, 0.5]] {
            let sum = m.predict_proba_dense(&x).unwrap() + n.predict_proba_dense(&x).unwrap();
            assert!((sum - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn trace_is_monotone() {
        let x: Vec<SparseVector> = (0..40)
            .map(|i| SparseVector::from_dense(&[(i as f64 * 0.37).sin(), (i as f64 * 0.11).cos()]))
            .collect();
        let y: Vec<bool> = (0..40).map(|i| (i * 7) % 3 == 0).collect();
        let m = train_logreg(&x, &y, &LogRegConfig::default()).unwrap();
        assert!(m.objective_trace.windows(2).all(|w| w[1] <= w[0]));
        assert_eq!(m.objective_trace.len(), m.iterations + 1);
    }
}
