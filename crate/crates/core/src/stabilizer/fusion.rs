//! Resource states and type-II fusion at the stabilizer level.

use std::fmt;
use std::str::FromStr;

use super::pauli::{Letter, PauliString};
use super::tableau::{Gate, MeasurementOutcome, SignMode, StabilizerTableau};
use crate::error::{Error, Result};

/// Star graph: `center` joined to every leaf. Generators `X_c Z^{⊗N}` and
/// `Z_c X_j`; the center is qubit 0.
pub fn labeled_star(center: &str, leaves: &[&str]) -> Result<StabilizerTableau> {
    if leaves.is_empty() {
        return Err(Error::InvalidParameter(
            "a star needs at least one leaf".into(),
        ));
    }
    let n = leaves.len() + 1;
    let labels: Vec<String> = std::iter::once(center)
        .chain(leaves.iter().copied())
        .map(String::from)
        .collect();
    let mut generators = vec![PauliString::from_letters(
        n,
        &std::iter::once((0, Letter::X))
            .chain((1..n).map(|j| (j, Letter::Z)))
            .collect::<Vec<_>>(),
    )];
    generators
        .extend((1..n).map(|j| PauliString::from_letters(n, &[(0, Letter::Z), (j, Letter::X)])));
    StabilizerTableau::new(labels, generators)
}

fn default_leaf_labels(leaves: usize) -> Vec<String> {
    (1..=leaves).map(|j| j.to_string()).collect()
}

/// Star state with center `s` and leaves `1..=N`.
pub fn star_state(leaves: usize) -> Result<StabilizerTableau> {
    let labels = default_leaf_labels(leaves);
    labeled_star("s", &labels.iter().map(String::as_str).collect::<Vec<_>>())
}

/// GHZ state on `s, 1..=N`: `X_s X^{⊗N}` and `Z_s Z_j`.
pub fn ghz_state(leaves: usize) -> Result<StabilizerTableau> {
    if leaves == 0 {
        return Err(Error::InvalidParameter(
            "a GHZ state needs at least one photon".into(),
        ));
    }
    let n = leaves + 1;
    let labels = std::iter::once("s".to_string())
        .chain(default_leaf_labels(leaves))
        .collect();
    let mut generators = vec![PauliString::from_letters(
        n,
        &(0..n).map(|q| (q, Letter::X)).collect::<Vec<_>>(),
    )];
    generators
        .extend((1..n).map(|j| PauliString::from_letters(n, &[(0, Letter::Z), (j, Letter::Z)])));
    StabilizerTableau::new(labels, generators)
}

/// Outcome of turning a GHZ state into a star with one gate per photon.
#[derive(Clone, Debug)]
pub struct GhzToStar {
    pub leaves: usize,
    pub matches: bool,
    pub transformed: Vec<String>,
    /// Canonical generators of the transformed state that are not in the
    /// star group (up to sign).
    pub offending: Vec<String>,
}

/// Applies `H` to every photon of the `N`-photon GHZ state and compares with
/// [`star_state`], signs included.
pub fn ghz_to_star(leaves: usize) -> Result<GhzToStar> {
    ghz_to_star_with(leaves, Gate::H)
}

/// Like [`ghz_to_star`] with `gate(q)` applied to each photon `q`.
pub fn ghz_to_star_with(leaves: usize, gate: impl Fn(usize) -> Gate) -> Result<GhzToStar> {
    let mut state = ghz_state(leaves)?;
    for q in 1..=leaves {
        state.apply(gate(q))?;
    }
    let star = star_state(leaves)?;
    let offending: Vec<String> = state
        .canonical()
        .iter()
        .filter(|g| star.contains(g) != Some(false))
        .map(|g| state.render_one(g))
        .collect();
    let matches = state.same_group(&star, SignMode::Exact);
    Ok(GhzToStar {
        leaves,
        matches,
        transformed: state.render(),
        offending,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FusionMode {
    Success,
    Failure,
    /// Handled by node removal in the percolation model, not here.
    Loss,
}

impl FromStr for FusionMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "success" => Ok(Self::Success),
            "failure" => Ok(Self::Failure),
            "loss" => Ok(Self::Loss),
            _ => Err(Error::InvalidParameter(format!(
                "unknown fusion mode `{s}`"
            ))),
        }
    }
}

/// Which single-qubit rotations precede the Bell measurement.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum FusionCircuit {
    /// `R` then `H` on qubit A: success measures `Z_A X_B`, `Y_A Z_B`;
    /// failure measures `Y_A` and `Z_B`, which keeps both centers.
    #[default]
    Rotated,
    /// Plain Bell measurement: success `X_A X_B`, `-Z_A Z_B`; failure `Z_A`, `Z_B`.
    Bell,
    /// `H` on qubit A: success `X_A Z_B`, `Z_A X_B`; failure `X_A`, `Z_B`.
    Hadamard,
}

impl FusionCircuit {
    /// Measured operators as `(letter on A, letter on B, negative)`.
    pub fn operators(self, mode: FusionMode) -> Result<[(Letter, Letter, bool); 2]> {
        use Letter::*;
        Ok(match (self, mode) {
            (_, FusionMode::Loss) => {
                return Err(Error::InvalidParameter(
                    "lost photons are removed by the sampling model, not measured".into(),
                ))
            }
            (Self::Rotated, FusionMode::Success) => [(Z, X, false), (Y, Z, false)],
            (Self::Rotated, FusionMode::Failure) => [(Y, I, false), (I, Z, false)],
            (Self::Bell, FusionMode::Success) => [(X, X, false), (Z, Z, true)],
            (Self::Bell, FusionMode::Failure) => [(Z, I, false), (I, Z, false)],
            (Self::Hadamard, FusionMode::Success) => [(X, Z, false), (Z, X, false)],
            (Self::Hadamard, FusionMode::Failure) => [(X, I, false), (I, Z, false)],
        })
    }
}

impl fmt::Display for FusionCircuit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Rotated => "rotated",
            Self::Bell => "bell",
            Self::Hadamard => "hadamard",
        })
    }
}

/// One line of a derivation: what was done and the generators afterwards.
#[derive(Clone, Debug)]
pub struct FusionStep {
    pub description: String,
    pub generators: Vec<String>,
}

#[derive(Clone, Debug)]
pub struct FusionResult {
    /// State after the measurements with the fusion qubits removed.
    pub state: StabilizerTableau,
    /// Labels of qubits that need an `R` gate to become a graph state.
    pub post_gates: Vec<String>,
    /// `state` with the post gates applied.
    pub corrected: StabilizerTableau,
    pub steps: Vec<FusionStep>,
}

/// Rotated fusion of `leaf_a` in `star_a` with `leaf_b` in `star_b`.
pub fn fuse(
    star_a: &StabilizerTableau,
    leaf_a: &str,
    star_b: &StabilizerTableau,
    leaf_b: &str,
    mode: FusionMode,
) -> Result<FusionResult> {
    fuse_with(star_a, leaf_a, star_b, leaf_b, mode, FusionCircuit::Rotated)
}

/// Fusion with the given circuit variant.
pub fn fuse_with(
    star_a: &StabilizerTableau,
    leaf_a: &str,
    star_b: &StabilizerTableau,
    leaf_b: &str,
    mode: FusionMode,
    circuit: FusionCircuit,
) -> Result<FusionResult> {
    let ops = circuit.operators(mode)?;
    star_a.qubit(leaf_a)?;
    star_b.qubit(leaf_b)?;
    let mut state = star_a.tensor(star_b)?;
    let (qa, qb) = (state.qubit(leaf_a)?, state.qubit(leaf_b)?);
    let mut steps = vec![FusionStep {
        description: "initial".into(),
        generators: state.render(),
    }];

    for (la, lb, negative) in ops {
        let op = PauliString::from_letters(state.len(), &[(qa, la), (qb, lb)]).with_sign(negative);
        let outcome = state.measure(&op)?;
        let kind = match outcome {
            MeasurementOutcome::Determined { .. } => "determined",
            MeasurementOutcome::Random { .. } => "random, +1 branch",
        };
        steps.push(FusionStep {
            description: format!("measure {} ({kind})", state.render_one(&op)),
            generators: state.render(),
        });
    }

    let state = state.discard(&[leaf_a, leaf_b])?;
    steps.push(FusionStep {
        description: format!("discard {leaf_a}, {leaf_b}"),
        generators: state.render(),
    });

    let mut corrected = state.clone();
    let post_gates: Vec<String> = match state.graph_form() {
        Some(form) => form
            .y_qubits
            .iter()
            .map(|&q| state.labels()[q].clone())
            .collect(),
        None => Vec::new(),
    };
    for label in &post_gates {
        corrected.apply(Gate::R(corrected.qubit(label)?))?;
    }
    if !post_gates.is_empty() {
        steps.push(FusionStep {
            description: format!("apply R on {}", post_gates.join(", ")),
            generators: corrected.render(),
        });
    }
    Ok(FusionResult {
        state,
        post_gates,
        corrected,
        steps,
    })
}

/// Fusion through the plain or Hadamard-rotated circuit, for comparison
/// with [`fuse`].
pub fn non_rotated_fusion_demo(
    star_a: &StabilizerTableau,
    leaf_a: &str,
    star_b: &StabilizerTableau,
    leaf_b: &str,
    mode: FusionMode,
    circuit: FusionCircuit,
) -> Result<FusionResult> {
    if circuit == FusionCircuit::Rotated {
        return Err(Error::InvalidParameter(
            "use `fuse` for the rotated circuit".into(),
        ));
    }
    fuse_with(star_a, leaf_a, star_b, leaf_b, mode, circuit)
}
