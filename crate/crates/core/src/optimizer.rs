//! Greedy search over connection-vector sets for low loss thresholds.
//!
//! Starting from a single random pair `±z*`, pairs drawn from the reservoir
//! of unused candidates are added one at a time and kept only when the
//! threshold improves. A rejected pair becomes eligible again after the next
//! accepted move; the search ends once every remaining pair has been tried
//! against the current set, or when the evaluation budget runs out.

use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::lattice::{ConnectionVectorSet, LatticeRecipe};
use crate::rng::TrialStreams;
use crate::sampling::PercolationModel;
use crate::threshold::{estimate_threshold, FitForm, ThresholdConfig, ThresholdEstimate};

/// Default comparator margin in combined standard errors.
pub const DEFAULT_KAPPA: f64 = 1.0;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Comparison {
    Better,
    Worse,
    Indistinguishable,
}

/// Compares `a` against `b`: better iff `a.λ_c < b.λ_c - κ σ` with
/// `σ = sqrt(σ_a² + σ_b²)`, worse iff `a.λ_c > b.λ_c + κ σ`.
///
/// Two saturated estimates are ranked by their spanning probability at the
/// top of the parameter range instead (higher is better).
pub fn compare_thresholds(a: &ThresholdEstimate, b: &ThresholdEstimate, kappa: f64) -> Comparison {
    if let (Some(sa), Some(sb)) = (a.saturation, b.saturation) {
        let sigma = sa.stderr.hypot(sb.stderr);
        return classify(sb.spanning_prob - sa.spanning_prob, kappa * sigma);
    }
    let sigma = a.error.hypot(b.error);
    classify(a.lambda_c - b.lambda_c, kappa * sigma)
}

fn classify(delta: f64, margin: f64) -> Comparison {
    if delta < -margin {
        Comparison::Better
    } else if delta > margin {
        Comparison::Worse
    } else {
        Comparison::Indistinguishable
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    /// Start from one pair and add pairs.
    #[default]
    Grow,
    /// Start from every candidate pair and remove pairs.
    Shrink,
}

impl FromStr for Direction {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "grow" => Ok(Direction::Grow),
            "shrink" => Ok(Direction::Shrink),
            other => Err(Error::InvalidParameter(format!(
                "unknown direction `{other}`"
            ))),
        }
    }
}

impl fmt::Display for Direction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Direction::Grow => "grow",
            Direction::Shrink => "shrink",
        })
    }
}

/// Lattice sizes used while searching; much smaller than the defaults used
/// for final estimates.
pub fn search_sizes(dimension: usize) -> Vec<usize> {
    match dimension {
        0 | 1 => vec![],
        2 => vec![32, 48, 64],
        3 => vec![8, 12, 16],
        4 => vec![5, 6, 8],
        _ => vec![4, 5, 6],
    }
}

pub const SEARCH_TRIALS: usize = 300;

#[derive(Clone, Debug, PartialEq)]
pub struct OptimizerConfig {
    pub dimension: usize,
    pub k_bound: i32,
    pub model: PercolationModel,
    /// Maximum number of threshold evaluations, the initial one included.
    pub budget: usize,
    pub seed: u64,
    pub direction: Direction,
    pub kappa: f64,
    /// Fidelity of evaluations during the search.
    pub search: ThresholdConfig,
    /// Fidelity of the final re-evaluation; `None` skips it.
    pub last: Option<ThresholdConfig>,
}

impl OptimizerConfig {
    pub fn new(
        dimension: usize,
        k_bound: i32,
        model: PercolationModel,
        budget: usize,
        seed: u64,
    ) -> Self {
        let eval_seed = TrialStreams::new(seed).derive(0xE7A1).seed();
        Self {
            dimension,
            k_bound,
            model,
            budget,
            seed,
            direction: Direction::Grow,
            kappa: DEFAULT_KAPPA,
            search: ThresholdConfig {
                sizes: search_sizes(dimension),
                trials: SEARCH_TRIALS,
                ..ThresholdConfig::for_dimension(dimension, eval_seed)
            },
            last: Some(ThresholdConfig::for_dimension(dimension, eval_seed)),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Action {
    Initial,
    Add,
    Remove,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Decision {
    Initial,
    Accepted,
    Rejected,
}

/// One evaluated move of the search.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MoveRecord {
    pub step: usize,
    pub action: Action,
    /// Positive representative of the pair added or removed.
    pub pair: Option<Vec<i32>>,
    /// Positive half of the evaluated set.
    pub candidate: Vec<Vec<i32>>,
    pub lambda_c: f64,
    pub error: f64,
    pub fit_form: FitForm,
    pub comparison: Option<Comparison>,
    pub decision: Decision,
}

/// Current state of the search.
#[derive(Clone, Debug, PartialEq)]
pub struct SearchState {
    /// Current vector set `E`.
    pub current: ConnectionVectorSet,
    /// Positive representatives of the unused pairs `R`.
    pub reservoir: Vec<Vec<i32>>,
    pub best: ThresholdEstimate,
    pub history: Vec<MoveRecord>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct OptimizeResult {
    pub dimension: usize,
    pub k_bound: i32,
    pub model: String,
    pub seed: u64,
    pub budget: usize,
    pub direction: Direction,
    pub evaluations: usize,
    /// Set when the budget ran out before the search terminated.
    pub truncated: bool,
    /// Positive half of the final set.
    pub vectors: Vec<Vec<i32>>,
    /// Threshold of the final set at search fidelity.
    pub search_estimate: ThresholdEstimate,
    /// Threshold of the final set at full fidelity.
    pub final_estimate: Option<ThresholdEstimate>,
    /// Whether the two estimates agree within three combined standard errors.
    pub final_agrees: Option<bool>,
    pub history: Vec<MoveRecord>,
}

fn positive_half(set: &ConnectionVectorSet) -> Vec<Vec<i32>> {
    set.positive_half()
        .into_iter()
        .map(<[i32]>::to_vec)
        .collect()
}

/// Runs the search with the Monte Carlo threshold evaluator.
pub fn optimize(config: &OptimizerConfig) -> Result<(OptimizeResult, ConnectionVectorSet)> {
    let model = config.model;
    let search = config.search.clone();
    let (mut result, best) = optimize_with(config, |set| {
        let recipe = LatticeRecipe::custom("search", set.clone());
        Ok(estimate_threshold(&recipe, &model, &search)?.estimate)
    })?;
    if let Some(last) = &config.last {
        let recipe = LatticeRecipe::custom("final", best.clone());
        let est = estimate_threshold(&recipe, &model, last)?.estimate;
        let agrees = match (est.saturation, result.search_estimate.saturation) {
            (None, None) => {
                let sigma = est.error.hypot(result.search_estimate.error);
                (est.lambda_c - result.search_estimate.lambda_c).abs() <= 3.0 * sigma
            }
            (a, b) => a.is_some() == b.is_some(),
        };
        if !agrees {
            log::warn!(
                "final estimate {:.5}±{:.5} disagrees with search estimate {:.5}±{:.5}",
                est.lambda_c,
                est.error,
                result.search_estimate.lambda_c,
                result.search_estimate.error
            );
        }
        result.final_estimate = Some(est);
        result.final_agrees = Some(agrees);
    }
    Ok((result, best))
}

/// Runs the search with a caller-supplied threshold evaluator.
///
/// All random choices come from `config.seed`; with a deterministic
/// evaluator the whole move sequence is reproducible.
pub fn optimize_with<F>(
    config: &OptimizerConfig,
    mut evaluate: F,
) -> Result<(OptimizeResult, ConnectionVectorSet)>
where
    F: FnMut(&ConnectionVectorSet) -> Result<ThresholdEstimate>,
{
    if config.k_bound < 1 {
        return Err(Error::InvalidParameter("k_bound must be >= 1".into()));
    }
    if config.budget < 1 {
        return Err(Error::InvalidParameter(
            "budget must be >= 1 evaluation".into(),
        ));
    }
    if config.dimension < 1 {
        return Err(Error::InvalidParameter("dimension must be >= 1".into()));
    }
    let (d, k) = (config.dimension, config.k_bound);
    let candidates = ConnectionVectorSet::candidate_pairs(d, k);
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);

    let (current, reservoir) = match config.direction {
        Direction::Grow => {
            let first = candidates[rng.gen_range(0..candidates.len())].clone();
            let rest = candidates
                .iter()
                .filter(|z| **z != first)
                .cloned()
                .collect();
            (ConnectionVectorSet::from_half(d, k, &[first])?, rest)
        }
        Direction::Shrink => (
            ConnectionVectorSet::from_half(d, k, &candidates)?,
            Vec::new(),
        ),
    };
    let best = evaluate(&current)?;
    let mut state = SearchState {
        history: vec![MoveRecord {
            step: 0,
            action: Action::Initial,
            pair: None,
            candidate: positive_half(&current),
            lambda_c: best.lambda_c,
            error: best.error,
            fit_form: best.fit_form,
            comparison: None,
            decision: Decision::Initial,
        }],
        current,
        reservoir,
        best,
    };
    let mut evaluations = 1;

    // Pairs not yet tried against the current set.
    let movable = |s: &SearchState| -> Vec<Vec<i32>> {
        match config.direction {
            Direction::Grow => s.reservoir.clone(),
            Direction::Shrink if s.current.degree() > 2 => positive_half(&s.current),
            Direction::Shrink => Vec::new(),
        }
    };
    let mut untried = movable(&state);
    let mut truncated = false;
    while !untried.is_empty() {
        if evaluations >= config.budget {
            truncated = true;
            break;
        }
        let pair = untried.swap_remove(rng.gen_range(0..untried.len()));
        let (action, candidate) = match config.direction {
            Direction::Grow => (Action::Add, state.current.with_pair(&pair)?),
            Direction::Shrink => (Action::Remove, state.current.without_pair(&pair)?),
        };
        let est = evaluate(&candidate)?;
        evaluations += 1;
        let comparison = compare_thresholds(&est, &state.best, config.kappa);
        let accepted = comparison == Comparison::Better;
        log::info!(
            "step {evaluations}: {action:?} {pair:?} -> {:.5}±{:.5} ({comparison:?})",
            est.lambda_c,
            est.error
        );
        state.history.push(MoveRecord {
            step: evaluations - 1,
            action,
            pair: Some(pair.clone()),
            candidate: positive_half(&candidate),
            lambda_c: est.lambda_c,
            error: est.error,
            fit_form: est.fit_form,
            comparison: Some(comparison),
            decision: if accepted {
                Decision::Accepted
            } else {
                Decision::Rejected
            },
        });
        if accepted {
            match config.direction {
                Direction::Grow => state.reservoir.retain(|z| *z != pair),
                Direction::Shrink => state.reservoir.push(pair),
            }
            state.current = candidate;
            state.best = est;
            untried = movable(&state);
        }
    }

    let result = OptimizeResult {
        dimension: d,
        k_bound: k,
        model: config.model.to_string(),
        seed: config.seed,
        budget: config.budget,
        direction: config.direction,
        evaluations,
        truncated,
        vectors: positive_half(&state.current),
        search_estimate: state.best.clone(),
        final_estimate: None,
        final_agrees: None,
        history: state.history,
    };
    Ok((result, state.current))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::threshold::{Crossing, FitDiagnostics, Saturation};

    fn estimate(lambda_c: f64, error: f64) -> ThresholdEstimate {
        ThresholdEstimate {
            lambda_c,
            error,
            fit_form: FitForm::InverseL,
            crossings: vec![Crossing::new(8, lambda_c, error)],
            diagnostics: FitDiagnostics::default(),
            saturation: None,
        }
    }

    fn saturated(q: f64) -> ThresholdEstimate {
        ThresholdEstimate::saturated(
            1.0,
            vec![],
            Saturation {
                spanning_prob: q,
                stderr: 0.01,
            },
        )
    }

    #[test]
    fn comparator_examples() {
        let k = DEFAULT_KAPPA;
        assert_eq!(
            compare_thresholds(&estimate(0.930, 0.001), &estimate(0.940, 0.001), k),
            Comparison::Better
        );
        assert_eq!(
            compare_thresholds(&estimate(0.9344, 0.0001), &estimate(0.9362, 0.0003), k),
            Comparison::Better
        );
        assert_eq!(
            compare_thresholds(&estimate(0.930, 0.005), &estimate(0.931, 0.005), k),
            Comparison::Indistinguishable
        );
        assert_eq!(
            compare_thresholds(&estimate(0.940, 0.001), &estimate(0.930, 0.001), k),
            Comparison::Worse
        );
        assert_eq!(
            compare_thresholds(&estimate(0.99, 0.001), &saturated(0.2), k),
            Comparison::Better
        );
        assert_eq!(
            compare_thresholds(&saturated(0.4), &saturated(0.0), k),
            Comparison::Better
        );
        assert_eq!(
            compare_thresholds(&saturated(0.0), &saturated(0.0), k),
            Comparison::Indistinguishable
        );
    }

    /// Threshold falls with every added vector whose first component is
    /// non-zero; other vectors make it worse.
    fn synthetic(set: &ConnectionVectorSet) -> Result<ThresholdEstimate> {
        let good = set.positive_half().iter().filter(|z| z[0] != 0).count() as f64;
        let bad = set.positive_half().len() as f64 - good;
        Ok(estimate(0.99 - 0.01 * good + 0.02 * bad, 0.001))
    }

    fn config(budget: usize, seed: u64) -> OptimizerConfig {
        let mut c = OptimizerConfig::new(2, 1, PercolationModel::spin(), budget, seed);
        c.last = None;
        c
    }

    #[test]
    fn grow_keeps_only_improvements() {
        for seed in 0..20 {
            let (result, set) = optimize_with(&config(1000, seed), synthetic).unwrap();
            assert!(!result.truncated);
            // Accepted moves strictly decrease the threshold.
            let accepted: Vec<f64> = result
                .history
                .iter()
                .filter(|m| m.decision != Decision::Rejected)
                .map(|m| m.lambda_c)
                .collect();
            assert!(
                accepted.windows(2).all(|w| w[1] < w[0]),
                "seed {seed}: {accepted:?}"
            );
            assert!(result.search_estimate.lambda_c <= result.history[0].lambda_c);
            // Terminal state: no remaining pair improves the set.
            for z in ConnectionVectorSet::candidate_pairs(2, 1) {
                if !set.contains(&z) {
                    let est = synthetic(&set.with_pair(&z).unwrap()).unwrap();
                    assert_ne!(
                        compare_thresholds(&est, &result.search_estimate, 1.0),
                        Comparison::Better
                    );
                }
            }
        }
    }

    #[test]
    fn budget_truncates() {
        let (result, _) = optimize_with(&config(2, 3), synthetic).unwrap();
        assert_eq!(result.evaluations, 2);
        assert!(result.truncated);
        assert!(optimize_with(&config(0, 3), synthetic).is_err());
    }

    #[test]
    fn search_is_reproducible() {
        let (a, _) = optimize_with(&config(50, 11), synthetic).unwrap();
        let (b, _) = optimize_with(&config(50, 11), synthetic).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn shrink_removes_pairs() {
        let mut c = config(100, 5);
        c.direction = Direction::Shrink;
        let (result, set) = optimize_with(&c, synthetic).unwrap();
        assert!(set.positive_half().iter().all(|z| z[0] != 0));
        assert_eq!(result.history[0].candidate.len(), 4);
    }

    #[test]
    fn state_partitions_candidates() {
        let (result, set) = optimize_with(&config(1000, 8), synthetic).unwrap();
        for z in ConnectionVectorSet::candidate_pairs(2, 1) {
            let in_e = set.contains(&z);
            assert_eq!(in_e, result.vectors.contains(&z));
        }
    }
}
