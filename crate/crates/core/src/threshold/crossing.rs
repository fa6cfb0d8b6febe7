use serde::Serialize;

use super::sweep::SweepCurve;
use crate::error::{Error, Result};

/// Points with spanning probability strictly inside this band, plus one
/// neighbor on each side, enter the logistic fit.
const WINDOW: (f64, f64) = (0.1, 0.9);

/// Slopes beyond this (in standardized grid units) mean the data are
/// separated and the fit has no finite optimum.
const MAX_SLOPE: f64 = 1e4;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum CrossingMethod {
    /// Binomial logistic regression over the window.
    Logistic,
    /// Logistic shape fitted to a coupled curve; error from the sampling
    /// distribution of the median.
    LogisticCoupled,
    /// Linear interpolation across the bracketing grid cell.
    Interpolated,
}

/// The parameter value where the spanning probability of one lattice size
/// crosses one half.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Crossing {
    #[serde(rename = "L")]
    pub side: usize,
    pub lambda: f64,
    pub err: f64,
    #[serde(skip)]
    pub method: CrossingMethod,
}

impl Crossing {
    pub fn new(side: usize, lambda: f64, err: f64) -> Self {
        Self {
            side,
            lambda,
            err,
            method: CrossingMethod::Logistic,
        }
    }
}

struct LogisticFit {
    /// Intercept and slope in standardized units.
    beta: [f64; 2],
    cov: [[f64; 2]; 2],
}

fn sigmoid(t: f64) -> f64 {
    if t >= 0.0 {
        1.0 / (1.0 + (-t).exp())
    } else {
        let e = t.exp();
        e / (1.0 + e)
    }
}

fn log_likelihood(beta: [f64; 2], z: &[f64], q: &[f64], n: &[f64]) -> f64 {
    z.iter()
        .zip(q)
        .zip(n)
        .map(|((&z, &q), &n)| {
            let t = beta[0] + beta[1] * z;
            // ln σ(t) = -ln(1 + e^{-t}); ln(1 - σ(t)) = -ln(1 + e^{t})
            let (lp, lq) = (-softplus(-t), -softplus(t));
            n * (q * lp + (1.0 - q) * lq)
        })
        .sum()
}

fn softplus(t: f64) -> f64 {
    if t > 0.0 {
        t + (-t).exp().ln_1p()
    } else {
        t.exp().ln_1p()
    }
}

fn invert2(m: [[f64; 2]; 2]) -> Option<[[f64; 2]; 2]> {
    let det = m[0][0] * m[1][1] - m[0][1] * m[1][0];
    if !det.is_finite() || det.abs() < 1e-300 {
        return None;
    }
    Some([
        [m[1][1] / det, -m[0][1] / det],
        [-m[1][0] / det, m[0][0] / det],
    ])
}

/// Newton-Raphson maximum likelihood with step halving. `None` when the data
/// are separated or the information matrix is singular.
fn fit_logistic(z: &[f64], q: &[f64], n: &[f64]) -> Option<LogisticFit> {
    let mut beta = [0.0, 1.0];
    let mut ll = log_likelihood(beta, z, q, n);
    for _ in 0..200 {
        let mut grad = [0.0; 2];
        let mut info = [[0.0; 2]; 2];
        for ((&z, &q), &n) in z.iter().zip(q).zip(n) {
            let p = sigmoid(beta[0] + beta[1] * z);
            let r = n * (q - p);
            grad[0] += r;
            grad[1] += r * z;
            let w = n * p * (1.0 - p);
            info[0][0] += w;
            info[0][1] += w * z;
            info[1][1] += w * z * z;
        }
        info[1][0] = info[0][1];
        let inv = invert2(info)?;
        let step = [
            inv[0][0] * grad[0] + inv[0][1] * grad[1],
            inv[1][0] * grad[0] + inv[1][1] * grad[1],
        ];
        let mut scale = 1.0;
        let (next, next_ll) = loop {
            let cand = [beta[0] + scale * step[0], beta[1] + scale * step[1]];
            let cand_ll = log_likelihood(cand, z, q, n);
            if cand_ll >= ll - 1e-12 || scale < 1e-6 {
                break (cand, cand_ll);
            }
            scale *= 0.5;
        };
        let moved = (next[0] - beta[0]).abs().max((next[1] - beta[1]).abs());
        beta = next;
        ll = next_ll;
        if beta[1].abs() > MAX_SLOPE || !beta[1].is_finite() {
            return None;
        }
        if moved < 1e-10 {
            let mut info = [[0.0; 2]; 2];
            for (&z, &n) in z.iter().zip(n) {
                let p = sigmoid(beta[0] + beta[1] * z);
                let w = n * p * (1.0 - p);
                info[0][0] += w;
                info[0][1] += w * z;
                info[1][1] += w * z * z;
            }
            info[1][0] = info[0][1];
            let cov = invert2(info)?;
            return (beta[1] > 0.0).then_some(LogisticFit { beta, cov });
        }
    }
    None
}

/// Locates the one-half crossing of `curve`.
///
/// Fits a logistic `q(x) = 1 / (1 + exp(-(b0 + b1 z)))` with `z` the
/// standardized grid value, over the grid points near the transition, and
/// solves `q = 1/2`. Curves with no point strictly inside the transition
/// band (a step) fall back to linear interpolation with half the bracketing
/// grid spacing as error.
pub fn find_crossing(curve: &SweepCurve) -> Result<Crossing> {
    let pts = &curve.points;
    if !curve.brackets_half() {
        return Err(Error::NoBracket {
            low: pts.first().map_or(f64::NAN, |p| p.param),
            high: pts.last().map_or(f64::NAN, |p| p.param),
        });
    }

    let inside: Vec<usize> = (0..pts.len())
        .filter(|&i| pts[i].spanning_prob > WINDOW.0 && pts[i].spanning_prob < WINDOW.1)
        .collect();
    if let (Some(&first), Some(&last)) = (inside.first(), inside.last()) {
        let lo = first.saturating_sub(1);
        let hi = (last + 1).min(pts.len() - 1);
        let window = &pts[lo..=hi];
        let xs: Vec<f64> = window.iter().map(|p| p.param).collect();
        let mean = xs.iter().sum::<f64>() / xs.len() as f64;
        let spread = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>().sqrt();
        if window.len() >= 2 && spread > 0.0 {
            let z: Vec<f64> = xs.iter().map(|x| (x - mean) / spread).collect();
            let q: Vec<f64> = window.iter().map(|p| p.spanning_prob).collect();
            let n: Vec<f64> = window.iter().map(|p| p.trials as f64).collect();
            if let Some(fit) = fit_logistic(&z, &q, &n) {
                let [b0, b1] = fit.beta;
                let z_star = -b0 / b1;
                let lambda = mean + spread * z_star;
                let err = match &curve.critical_samples {
                    // All grid points share the same trials, so the binomial
                    // covariance does not apply; use the spread of the sample
                    // median instead: sqrt(1/4n) / density at the crossing.
                    Some(samples) => {
                        let density = b1 / (4.0 * spread);
                        0.5 / ((samples.len() as f64).sqrt() * density)
                    }
                    None => {
                        let g = [-1.0 / b1, b0 / (b1 * b1)];
                        let var = g[0] * (fit.cov[0][0] * g[0] + fit.cov[0][1] * g[1])
                            + g[1] * (fit.cov[1][0] * g[0] + fit.cov[1][1] * g[1]);
                        spread * var.sqrt()
                    }
                };
                if lambda.is_finite() && err.is_finite() && err > 0.0 {
                    let method = if curve.critical_samples.is_some() {
                        CrossingMethod::LogisticCoupled
                    } else {
                        CrossingMethod::Logistic
                    };
                    return Ok(Crossing {
                        side: curve.side,
                        lambda,
                        err,
                        method,
                    });
                }
            }
        }
    }
    interpolate(curve)
}

fn interpolate(curve: &SweepCurve) -> Result<Crossing> {
    let pts = &curve.points;
    let i = (1..pts.len())
        .find(|&i| pts[i].spanning_prob >= 0.5 && pts[i - 1].spanning_prob < 0.5)
        .ok_or(Error::NoBracket {
            low: pts[0].param,
            high: pts[pts.len() - 1].param,
        })?;
    let (a, b) = (pts[i - 1], pts[i]);
    let t = (0.5 - a.spanning_prob) / (b.spanning_prob - a.spanning_prob);
    Ok(Crossing {
        side: curve.side,
        lambda: a.param + t * (b.param - a.param),
        err: 0.5 * (b.param - a.param),
        method: CrossingMethod::Interpolated,
    })
}
