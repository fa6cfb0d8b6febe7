use serde::Serialize;

use super::crossing::Crossing;
use crate::error::{Error, Result};

/// Bounds on the fitted correction exponent `θ = 1/ν`.
pub const EXPONENT_RANGE: (f64, f64) = (0.5, 2.0);

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum FitForm {
    /// `λ(L) = λ_c + a L^(-θ)` with `θ` fitted.
    PowerLaw,
    /// `λ(L) = λ_c + a / L`.
    InverseL,
    /// Some size never reached one half within the parameter range; the
    /// threshold is pinned to the upper end of that range.
    Saturated,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct FitDiagnostics {
    /// Fitted correction exponent `θ`; `ν = 1/θ`.
    pub exponent: Option<f64>,
    pub amplitude: f64,
    pub chi2: f64,
    pub dof: usize,
    /// Why the power-law fit was not used.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub fallback: Option<String>,
}

/// Spanning probability at the top of the parameter range, averaged over
/// sizes. Ranks lattices that never reach one half.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Saturation {
    pub spanning_prob: f64,
    pub stderr: f64,
}

/// Extrapolated threshold with the per-size crossings it came from.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ThresholdEstimate {
    pub lambda_c: f64,
    pub error: f64,
    pub fit_form: FitForm,
    pub crossings: Vec<Crossing>,
    pub diagnostics: FitDiagnostics,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub saturation: Option<Saturation>,
}

impl ThresholdEstimate {
    /// An estimate pinned at `upper`, for lattices that do not reach one half
    /// spanning probability inside the parameter range.
    pub fn saturated(upper: f64, crossings: Vec<Crossing>, saturation: Saturation) -> Self {
        Self {
            lambda_c: upper,
            error: 0.0,
            fit_form: FitForm::Saturated,
            crossings,
            diagnostics: FitDiagnostics::default(),
            saturation: Some(saturation),
        }
    }

    pub fn is_saturated(&self) -> bool {
        self.fit_form == FitForm::Saturated
    }
}

struct LinearFit {
    intercept: f64,
    slope: f64,
    cov: [[f64; 2]; 2],
    chi2: f64,
}

/// Weighted least squares of `y` on `(1, x)`.
fn linear_wls(x: &[f64], y: &[f64], w: &[f64]) -> Option<LinearFit> {
    let (mut s, mut sx, mut sxx, mut sy, mut sxy) = (0.0, 0.0, 0.0, 0.0, 0.0);
    for ((&x, &y), &w) in x.iter().zip(y).zip(w) {
        s += w;
        sx += w * x;
        sxx += w * x * x;
        sy += w * y;
        sxy += w * x * y;
    }
    let det = s * sxx - sx * sx;
    if !(det.is_finite() && det > 1e-12 * s * sxx) {
        return None;
    }
    let slope = (s * sxy - sx * sy) / det;
    let intercept = (sxx * sy - sx * sxy) / det;
    let chi2 = x
        .iter()
        .zip(y)
        .zip(w)
        .map(|((&x, &y), &w)| w * (y - intercept - slope * x).powi(2))
        .sum();
    Some(LinearFit {
        intercept,
        slope,
        cov: [[sxx / det, -sx / det], [-sx / det, s / det]],
        chi2,
    })
}

fn invert3(m: [[f64; 3]; 3]) -> Option<[[f64; 3]; 3]> {
    let c = |r: usize, k: usize| {
        let (r1, r2) = ((r + 1) % 3, (r + 2) % 3);
        let (k1, k2) = ((k + 1) % 3, (k + 2) % 3);
        m[r1][k1] * m[r2][k2] - m[r1][k2] * m[r2][k1]
    };
    let det = m[0][0] * c(0, 0) + m[0][1] * c(0, 1) + m[0][2] * c(0, 2);
    if !det.is_finite() || det.abs() < 1e-300 {
        return None;
    }
    let mut inv = [[0.0; 3]; 3];
    for (r, row) in inv.iter_mut().enumerate() {
        for (k, v) in row.iter_mut().enumerate() {
            *v = c(k, r) / det;
        }
    }
    Some(inv)
}

/// Scales errors up when the residuals exceed what the input errors allow.
fn birge(chi2: f64, dof: usize) -> f64 {
    if dof == 0 {
        1.0
    } else {
        (chi2 / dof as f64).max(1.0).sqrt()
    }
}

fn chi2_at(theta: f64, sides: &[f64], y: &[f64], w: &[f64]) -> f64 {
    let x: Vec<f64> = sides.iter().map(|l| l.powf(-theta)).collect();
    linear_wls(&x, y, w).map_or(f64::INFINITY, |f| f.chi2)
}

/// Fits `λ(L) = λ_c + a L^(-θ)` by weighted least squares, profiling the
/// exponent over [`EXPONENT_RANGE`]. Falls back to `θ = 1` when there are
/// fewer than four sizes, the exponent runs into a bound, the amplitude is
/// not significant, or the three-parameter fit is singular. Errors are
/// inflated by `sqrt(χ²/dof)` when that exceeds one.
pub fn extrapolate(crossings: &[Crossing]) -> Result<ThresholdEstimate> {
    let mut distinct: Vec<usize> = crossings.iter().map(|c| c.side).collect();
    distinct.sort_unstable();
    distinct.dedup();
    if distinct.len() < 3 {
        return Err(Error::TooFewSizes(distinct.len()));
    }
    if let Some(c) = crossings
        .iter()
        .find(|c| !(c.lambda.is_finite() && c.err > 0.0))
    {
        return Err(Error::InvalidParameter(format!(
            "crossing for L={} needs a finite value and positive error",
            c.side
        )));
    }
    let sides: Vec<f64> = crossings.iter().map(|c| c.side as f64).collect();
    let y: Vec<f64> = crossings.iter().map(|c| c.lambda).collect();
    let w: Vec<f64> = crossings.iter().map(|c| c.err.powi(-2)).collect();
    let n = crossings.len();

    let fallback = match power_law(&sides, &y, &w, distinct.len()) {
        Ok(fit) => {
            return Ok(ThresholdEstimate {
                lambda_c: fit.0,
                error: fit.1,
                fit_form: FitForm::PowerLaw,
                crossings: crossings.to_vec(),
                diagnostics: fit.2,
                saturation: None,
            })
        }
        Err(reason) => reason,
    };

    let x: Vec<f64> = sides.iter().map(|l| 1.0 / l).collect();
    let fit = linear_wls(&x, &y, &w).ok_or_else(|| {
        Error::InvalidParameter("degenerate sizes in threshold extrapolation".into())
    })?;
    let dof = n - 2;
    let scale = birge(fit.chi2, dof);
    Ok(ThresholdEstimate {
        lambda_c: fit.intercept,
        error: fit.cov[0][0].sqrt() * scale,
        fit_form: FitForm::InverseL,
        crossings: crossings.to_vec(),
        diagnostics: FitDiagnostics {
            exponent: Some(1.0),
            amplitude: fit.slope,
            chi2: fit.chi2,
            dof,
            fallback: Some(fallback),
        },
        saturation: None,
    })
}

fn power_law(
    sides: &[f64],
    y: &[f64],
    w: &[f64],
    distinct: usize,
) -> std::result::Result<(f64, f64, FitDiagnostics), String> {
    if distinct < 4 {
        return Err("fewer than four sizes".into());
    }
    let (lo, hi) = EXPONENT_RANGE;
    let steps = 150;
    let h = (hi - lo) / steps as f64;
    let profile: Vec<f64> = (0..=steps)
        .map(|i| chi2_at(lo + h * i as f64, sides, y, w))
        .collect();
    let best = (0..=steps)
        .min_by(|&a, &b| profile[a].total_cmp(&profile[b]))
        .expect("non-empty profile");
    if best == 0 || best == steps {
        return Err("exponent at the edge of its range".into());
    }
    // Golden-section refinement inside the bracketing cell pair.
    let (mut a, mut b) = (lo + h * (best - 1) as f64, lo + h * (best + 1) as f64);
    let g = (5f64.sqrt() - 1.0) / 2.0;
    while b - a > 1e-9 {
        let (c, d) = (b - g * (b - a), a + g * (b - a));
        if chi2_at(c, sides, y, w) < chi2_at(d, sides, y, w) {
            b = d;
        } else {
            a = c;
        }
    }
    let theta = 0.5 * (a + b);
    let x: Vec<f64> = sides.iter().map(|l| l.powf(-theta)).collect();
    let fit = linear_wls(&x, y, w).ok_or("singular power-law fit")?;
    if fit.slope.abs() < 2.0 * fit.cov[1][1].sqrt() {
        return Err("finite-size trend not significant".into());
    }

    let mut jtj = [[0.0; 3]; 3];
    for ((&l, &x), &w) in sides.iter().zip(&x).zip(w) {
        let j = [1.0, x, -fit.slope * l.ln() * x];
        for r in 0..3 {
            for k in 0..3 {
                jtj[r][k] += w * j[r] * j[k];
            }
        }
    }
    let cov = invert3(jtj).ok_or("singular power-law covariance")?;
    if !(cov[0][0].is_finite() && cov[0][0] > 0.0) {
        return Err("ill-conditioned power-law covariance".into());
    }
    let dof = sides.len() - 3;
    let error = cov[0][0].sqrt() * birge(fit.chi2, dof);
    Ok((
        fit.intercept,
        error,
        FitDiagnostics {
            exponent: Some(theta),
            amplitude: fit.slope,
            chi2: fit.chi2,
            dof,
            fallback: None,
        },
    ))
}
