//! Threshold estimation: spanning-probability sweeps, per-size one-half
//! crossings, and extrapolation to infinite size.

mod crossing;
mod extrapolate;
mod sweep;

use crate::error::{Error, Result};
use crate::lattice::{Boundary, LatticeRecipe};
use crate::percolation::{critical_values, DEFAULT_SPANNING_AXIS};
use crate::rng::TrialStreams;
use crate::sampling::PercolationModel;

pub use crossing::{find_crossing, Crossing, CrossingMethod};
pub use extrapolate::{
    extrapolate, FitDiagnostics, FitForm, Saturation, ThresholdEstimate, EXPONENT_RANGE,
};
pub use sweep::{linear_grid, spans, sweep, write_sweep_csv, SweepCurve, SweepMethod, SweepPoint};

pub const DEFAULT_TRIALS: usize = 1000;

/// Grid points per size in the curves built by [`estimate_threshold`].
pub const AUTO_GRID_POINTS: usize = 33;

/// Default lattice sizes; every ladder stays below 2·10^6 nodes.
pub fn default_sizes(dimension: usize) -> Vec<usize> {
    match dimension {
        0 | 1 => vec![],
        2 => vec![64, 128, 256, 512],
        3 => vec![16, 24, 32, 48],
        4 => vec![8, 12, 16, 24],
        5 => vec![6, 8, 10, 12],
        6 => vec![5, 6, 7, 8],
        d => {
            // Largest side with L^d <= 2e6, then a ladder of four below it.
            let top = (2e6f64.powf(1.0 / d as f64)).floor().max(4.0) as usize;
            (0..4).map(|i| (top - 3 + i).max(2)).collect()
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ThresholdConfig {
    pub sizes: Vec<usize>,
    pub trials: usize,
    pub seed: u64,
    pub boundary: Boundary,
    pub axis: usize,
}

impl ThresholdConfig {
    pub fn for_dimension(dimension: usize, seed: u64) -> Self {
        Self {
            sizes: default_sizes(dimension),
            trials: DEFAULT_TRIALS,
            seed,
            boundary: Boundary::Open,
            axis: DEFAULT_SPANNING_AXIS,
        }
    }
}

/// A threshold estimate together with the curves it was derived from.
#[derive(Clone, Debug, PartialEq)]
pub struct ThresholdRun {
    pub estimate: ThresholdEstimate,
    pub curves: Vec<SweepCurve>,
}

/// Seed of the trial streams used for side `side` under `seed`.
pub fn size_seed(seed: u64, side: usize) -> u64 {
    TrialStreams::new(seed).derive(side as u64).seed()
}

/// Runs coupled trials at every size, fits the crossings and extrapolates.
///
/// Each size gets its own stream family, so a size can be rerun alone and
/// reproduce the same curve. If any size fails to reach one half spanning
/// probability at parameter 1, the estimate is [`FitForm::Saturated`].
pub fn estimate_threshold(
    recipe: &LatticeRecipe,
    model: &PercolationModel,
    config: &ThresholdConfig,
) -> Result<ThresholdRun> {
    model.validate()?;
    if config.trials == 0 {
        return Err(Error::InvalidParameter("trials must be >= 1".into()));
    }
    let mut distinct = config.sizes.clone();
    distinct.sort_unstable();
    distinct.dedup();
    if distinct.len() < 3 {
        return Err(Error::TooFewSizes(distinct.len()));
    }
    let mut curves = Vec::with_capacity(config.sizes.len());
    let mut crossings = Vec::with_capacity(config.sizes.len());
    let mut saturated = false;
    let mut upper = Vec::with_capacity(config.sizes.len());
    for &side in &config.sizes {
        let lattice = recipe.build(side, config.boundary)?;
        if config.axis >= lattice.dimension() {
            return Err(Error::InvalidParameter(format!(
                "axis {} out of range",
                config.axis
            )));
        }
        let seed = size_seed(config.seed, side);
        let samples = critical_values(
            &lattice,
            model,
            config.trials,
            TrialStreams::new(seed),
            config.axis,
        );
        let spanning = samples.iter().filter(|&&c| c <= 1.0).count();
        upper.push(SweepPoint::new(1.0, spanning, samples.len()));
        let grid = auto_grid(&samples);
        let curve = SweepCurve::from_critical_samples(
            *model,
            recipe.label.clone(),
            lattice.dimension(),
            side,
            seed,
            &grid,
            samples,
        )?;
        log::debug!("L={side}: grid {:.5}..{:.5}", grid[0], grid[grid.len() - 1]);
        match find_crossing(&curve) {
            Ok(c) => crossings.push(c),
            Err(Error::NoBracket { .. }) => saturated = true,
            Err(e) => return Err(e),
        }
        curves.push(curve);
    }
    let estimate = if saturated {
        let k = upper.len() as f64;
        let saturation = Saturation {
            spanning_prob: upper.iter().map(|p| p.spanning_prob).sum::<f64>() / k,
            stderr: upper
                .iter()
                .map(|p| p.stderr * p.stderr)
                .sum::<f64>()
                .sqrt()
                / k,
        };
        ThresholdEstimate::saturated(1.0, crossings, saturation)
    } else {
        extrapolate(&crossings)?
    };
    Ok(ThresholdRun { estimate, curves })
}

/// A grid spanning the central part of the critical-value distribution,
/// capped at parameter 1.
fn auto_grid(samples: &[f64]) -> Vec<f64> {
    let mut sorted = samples.to_vec();
    sorted.sort_by(f64::total_cmp);
    let n = sorted.len();
    let at = |q: f64| sorted[((q * n as f64) as usize).min(n - 1)];
    let lo = at(0.05).min(1.0);
    let hi = at(0.95).min(1.0);
    if hi - lo < 1e-6 {
        let (a, b) = ((lo - 1e-4).max(0.0), (lo + 1e-4).min(1.0));
        return vec![a, b];
    }
    linear_grid(lo, hi, AUTO_GRID_POINTS)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::Family;

    #[test]
    fn default_ladders_fit_node_budget() {
        for d in 2..=8 {
            let sizes = default_sizes(d);
            assert!(sizes.len() >= 3, "d={d}");
            assert!(
                sizes.iter().all(|&l| (l as f64).powi(d as i32) <= 2e6),
                "d={d}: {sizes:?}"
            );
        }
    }

    #[test]
    fn chain_saturates() {
        // Edges only along axis 1 never connect the two axis-0 faces.
        let vectors = crate::lattice::ConnectionVectorSet::from_half(2, 1, &[vec![0, 1]]).unwrap();
        let recipe = LatticeRecipe::custom("chain", vectors);
        let config = ThresholdConfig {
            sizes: vec![8, 12, 16],
            trials: 20,
            ..ThresholdConfig::for_dimension(2, 1)
        };
        let run = estimate_threshold(&recipe, &PercolationModel::spin(), &config).unwrap();
        assert!(run.estimate.is_saturated());
        assert_eq!(run.estimate.lambda_c, 1.0);
        assert_eq!(run.estimate.saturation.unwrap().spanning_prob, 0.0);
    }

    #[test]
    fn square_bond_near_one_half() {
        let recipe = LatticeRecipe::family(Family::Hypercubic, 2).unwrap();
        let config = ThresholdConfig {
            sizes: vec![16, 32, 64],
            trials: 400,
            ..ThresholdConfig::for_dimension(2, 7)
        };
        let run = estimate_threshold(&recipe, &PercolationModel::Bond, &config).unwrap();
        assert!(
            (run.estimate.lambda_c - 0.5).abs() < 0.02,
            "{:?}",
            run.estimate
        );
        assert_eq!(run.curves.len(), 3);
    }
}
