//! Linear margin and probability models.
//!
//! The SVM minimizes `0.5 |w~|^2 + C sum max(0, 1 - y w~.x~)` where `x~`
//! appends a constant 1 so the bias is part of `w~` (and regularized). It is
//! solved in the dual by cyclic coordinate descent over a seeded permutation;
//! each step exactly minimizes the dual along one coordinate, so the dual
//! objective never increases. Training stops when the projected-gradient
//! spread drops below the tolerance.
//!
//! Logistic regression minimizes `0.5 |w|^2 + C sum log(1 + exp(-y (w.x + b)))`
//! with an unregularized bias, using L-BFGS with an Armijo backtracking line
//! search. Every accepted step strictly decreases the objective.

use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};

use crate::rng;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LinearModel {
    pub weights: Vec<f64>,
    pub bias: f64,
    /// Objective value after every optimizer iteration (dual objective for
    /// the SVM, primal objective for logistic regression).
    pub loss_history: Vec<f64>,
    /// Stopping statistic at exit (projected-gradient spread for the SVM,
    /// gradient 2-norm for logistic regression).
    pub final_gradient_norm: f64,
    pub converged: bool,
}

impl LinearModel {
    #[inline]
    pub fn margin(&self, x: &[f64]) -> f64 {
        dot(&self.weights, x) + self.bias
    }
}

#[inline]
pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

#[inline]
fn sign(label: bool) -> f64 {
    if label {
        1.0
    } else {
        -1.0
    }
}

pub struct SolverOptions {
    pub c: f64,
    pub tolerance: f64,
    pub max_iterations: usize,
    pub seed: u64,
}

/// Primal SVM objective for a bias-augmented weight vector.
pub fn svm_primal_objective(
    weights: &[f64],
    bias: f64,
    rows: &[Vec<f64>],
    labels: &[bool],
    c: f64,
) -> f64 {
    let reg = 0.5 * (dot(weights, weights) + bias * bias);
    let hinge: f64 = rows
        .iter()
        .zip(labels)
        .map(|(x, &y)| (1.0 - sign(y) * (dot(weights, x) + bias)).max(0.0))
        .sum();
    reg + c * hinge
}

pub fn train_svm(rows: &[Vec<f64>], labels: &[bool], opts: &SolverOptions) -> LinearModel {
    let n = rows.len();
    let d = rows.first().map_or(0, Vec::len);
    let mut w = vec![0.0; d];
    let mut b = 0.0;
    let mut alpha = vec![0.0; n];
    // diagonal of Q: |x~_i|^2
    let qd: Vec<f64> = rows.iter().map(|x| dot(x, x) + 1.0).collect();
    let y: Vec<f64> = labels.iter().map(|&l| sign(l)).collect();
    let c = opts.c;

    let mut order: Vec<usize> = (0..n).collect();
    let mut rng = rng::seeded(opts.seed);
    let mut history = Vec::new();
    let mut spread = f64::INFINITY;
    let mut converged = false;

    for _ in 0..opts.max_iterations {
        order.shuffle(&mut rng);
        let (mut pg_max, mut pg_min) = (f64::NEG_INFINITY, f64::INFINITY);
        for &i in &order {
            let g = y[i] * (dot(&w, &rows[i]) + b) - 1.0;
            let pg = if alpha[i] <= 0.0 {
                g.min(0.0)
            } else if alpha[i] >= c {
                g.max(0.0)
            } else {
                g
            };
            pg_max = pg_max.max(pg);
            pg_min = pg_min.min(pg);
            if pg != 0.0 {
                let old = alpha[i];
                alpha[i] = (old - g / qd[i]).clamp(0.0, c);
                let delta = (alpha[i] - old) * y[i];
                if delta != 0.0 {
                    for (wj, xj) in w.iter_mut().zip(&rows[i]) {
                        *wj += delta * xj;
                    }
                    b += delta;
                }
            }
        }
        // dual objective, in minimization form
        history.push(0.5 * (dot(&w, &w) + b * b) - alpha.iter().sum::<f64>());
        spread = pg_max - pg_min;
        if spread <= opts.tolerance {
            converged = true;
            break;
        }
    }

    LinearModel {
        weights: w,
        bias: b,
        loss_history: history,
        final_gradient_norm: spread,
        converged,
    }
}

#[inline]
fn softplus(z: f64) -> f64 {
    // log(1 + exp(z))
    if z > 0.0 {
        z + (-z).exp().ln_1p()
    } else {
        z.exp().ln_1p()
    }
}

#[inline]
pub fn sigmoid(z: f64) -> f64 {
    if z >= 0.0 {
        1.0 / (1.0 + (-z).exp())
    } else {
        let e = z.exp();
        e / (1.0 + e)
    }
}

/// Regularized logistic loss and its gradient. `params` holds the weights
/// followed by the bias.
pub fn logistic_objective(
    params: &[f64],
    rows: &[Vec<f64>],
    labels: &[bool],
    c: f64,
) -> (f64, Vec<f64>) {
    let d = params.len() - 1;
    let (w, b) = (&params[..d], params[d]);
    let mut loss = 0.5 * dot(w, w);
    let mut grad: Vec<f64> = w.to_vec();
    grad.push(0.0);
    for (x, &label) in rows.iter().zip(labels) {
        let y = sign(label);
        let z = y * (dot(w, x) + b);
        loss += c * softplus(-z);
        // d/dz log(1 + exp(-z)) = -sigmoid(-z)
        let coef = -c * y * sigmoid(-z);
        for (g, xj) in grad[..d].iter_mut().zip(x) {
            *g += coef * xj;
        }
        grad[d] += coef;
    }
    (loss, grad)
}

const LBFGS_MEMORY: usize = 10;

pub fn train_logistic(rows: &[Vec<f64>], labels: &[bool], opts: &SolverOptions) -> LinearModel {
    let d = rows.first().map_or(0, Vec::len);
    let f = |p: &[f64]| logistic_objective(p, rows, labels, opts.c);

    let mut x = vec![0.0; d + 1];
    let (mut fx, mut gx) = f(&x);
    let mut history = Vec::new();
    let mut s_hist: Vec<Vec<f64>> = Vec::new();
    let mut y_hist: Vec<Vec<f64>> = Vec::new();
    let mut gnorm = norm(&gx);
    let mut converged = gnorm <= opts.tolerance;

    for _ in 0..opts.max_iterations {
        if converged {
            break;
        }
        let mut dir = two_loop(&gx, &s_hist, &y_hist);
        let mut slope = dot(&dir, &gx);
        if slope >= 0.0 {
            // not a descent direction; restart from steepest descent
            s_hist.clear();
            y_hist.clear();
            dir = gx.iter().map(|g| -g).collect();
            slope = -dot(&gx, &gx);
        }

        let mut step = if s_hist.is_empty() {
            1.0 / gnorm.max(1.0)
        } else {
            1.0
        };
        let mut accepted = None;
        for _ in 0..60 {
            let trial: Vec<f64> = x.iter().zip(&dir).map(|(xi, di)| xi + step * di).collect();
            let (ft, gt) = f(&trial);
            if ft <= fx + 1e-4 * step * slope && ft < fx {
                accepted = Some((trial, ft, gt));
                break;
            }
            step *= 0.5;
        }
        let Some((x_new, f_new, g_new)) = accepted else {
            // no representable decrease left along any direction we can build
            break;
        };

        let s: Vec<f64> = x_new.iter().zip(&x).map(|(a, b)| a - b).collect();
        let yv: Vec<f64> = g_new.iter().zip(&gx).map(|(a, b)| a - b).collect();
        if dot(&s, &yv) > 1e-12 {
            if s_hist.len() == LBFGS_MEMORY {
                s_hist.remove(0);
                y_hist.remove(0);
            }
            s_hist.push(s);
            y_hist.push(yv);
        }
        x = x_new;
        fx = f_new;
        gx = g_new;
        gnorm = norm(&gx);
        history.push(fx);
        converged = gnorm <= opts.tolerance;
    }

    let bias = x.pop().unwrap_or(0.0);
    LinearModel {
        weights: x,
        bias,
        loss_history: history,
        final_gradient_norm: gnorm,
        converged,
    }
}

fn norm(v: &[f64]) -> f64 {
    dot(v, v).sqrt()
}

fn two_loop(grad: &[f64], s_hist: &[Vec<f64>], y_hist: &[Vec<f64>]) -> Vec<f64> {
    let mut q = grad.to_vec();
    let m = s_hist.len();
    let mut alphas = vec![0.0; m];
    for i in (0..m).rev() {
        let rho = 1.0 / dot(&y_hist[i], &s_hist[i]);
        alphas[i] = rho * dot(&s_hist[i], &q);
        for (qj, yj) in q.iter_mut().zip(&y_hist[i]) {
            *qj -= alphas[i] * yj;
        }
    }
    if m > 0 {
        let gamma = dot(&s_hist[m - 1], &y_hist[m - 1]) / dot(&y_hist[m - 1], &y_hist[m - 1]);
        q.iter_mut().for_each(|v| *v *= gamma);
    }
    for i in 0..m {
        let rho = 1.0 / dot(&y_hist[i], &s_hist[i]);
        let beta = rho * dot(&y_hist[i], &q);
        for (qj, sj) in q.iter_mut().zip(&s_hist[i]) {
            *qj += (alphas[i] - beta) * sj;
        }
    }
    q.iter_mut().for_each(|v| *v = -*v);
    q
}
