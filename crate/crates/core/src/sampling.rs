//! Percolation models applied to a [`Lattice`].
//!
//! The fusion model assigns every edge (two fusion photons) one of three
//! outcomes: loss with probability `1 - η²`, success with `η² p_s`, failure
//! with `η² (1 - p_s)`. A lost photon is heralded but not attributed, so both
//! endpoint nodes are removed (Z-measured). With a photonic central qubit each
//! node is additionally lost, unheralded, with probability `1 - η`; by
//! default that also removes every node it is fused to.

use std::fmt;
use std::str::FromStr;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::Lattice;

/// Default fusion success probability of a non-boosted rotated type-II fusion.
pub const DEFAULT_FUSION_SUCCESS: f64 = 0.5;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CentralQubit {
    /// Emitter spin: never lost.
    #[default]
    Spin,
    /// Photon subject to unheralded loss. A lost central photon removes its
    /// node and its graph neighbors (nodes joined to it by a successful
    /// fusion), which must be Z-measured like the neighborhood of a lost
    /// fusion photon.
    Photon,
    /// Photon subject to unheralded loss that removes only its own node.
    PhotonNodeOnly,
}

impl CentralQubit {
    pub fn name(self) -> &'static str {
        match self {
            CentralQubit::Spin => "spin",
            CentralQubit::Photon => "photon",
            CentralQubit::PhotonNodeOnly => "photon-node",
        }
    }

    pub fn is_photonic(self) -> bool {
        self != CentralQubit::Spin
    }
}

impl FromStr for CentralQubit {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "spin" => Ok(CentralQubit::Spin),
            "photon" | "photonic" => Ok(CentralQubit::Photon),
            "photon-node" => Ok(CentralQubit::PhotonNodeOnly),
            other => Err(Error::InvalidParameter(format!(
                "unknown central qubit `{other}`"
            ))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FusionModelParams {
    /// Photon efficiency `η = 1 - p_loss`.
    pub eta: f64,
    pub p_s: f64,
    pub central_qubit: CentralQubit,
    pub seed: u64,
}

impl FusionModelParams {
    pub fn new(eta: f64, p_s: f64, central_qubit: CentralQubit, seed: u64) -> Result<Self> {
        check_probability("eta", eta)?;
        check_probability("p_s", p_s)?;
        Ok(Self {
            eta,
            p_s,
            central_qubit,
            seed,
        })
    }

    pub fn from_loss(p_loss: f64, central_qubit: CentralQubit, seed: u64) -> Result<Self> {
        Self::new(1.0 - p_loss, DEFAULT_FUSION_SUCCESS, central_qubit, seed)
    }

    pub fn loss_probability(&self) -> f64 {
        1.0 - self.eta * self.eta
    }

    pub fn success_probability(&self) -> f64 {
        self.eta * self.eta * self.p_s
    }
}

pub(crate) fn check_probability(name: &str, p: f64) -> Result<()> {
    if (0.0..=1.0).contains(&p) {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!(
            "{name} must lie in [0, 1], got {p}"
        )))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
#[repr(u8)]
pub enum EdgeState {
    Success,
    Failure,
    Loss,
}

/// Per-trial survival state of every edge and node.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SampleOutcome {
    edge_state: Vec<EdgeState>,
    node_alive: Vec<bool>,
    surviving_edges: Vec<u32>,
}

impl SampleOutcome {
    /// Assembles an outcome, deriving the surviving edges: successful edges
    /// whose endpoints are both alive.
    pub fn new(
        lattice: &Lattice,
        edge_state: Vec<EdgeState>,
        node_alive: Vec<bool>,
    ) -> Result<Self> {
        if edge_state.len() != lattice.edge_count() || node_alive.len() != lattice.node_count() {
            return Err(Error::LatticeMismatch(format!(
                "{} edge states / {} nodes for a lattice with {} edges / {} nodes",
                edge_state.len(),
                node_alive.len(),
                lattice.edge_count(),
                lattice.node_count()
            )));
        }
        Ok(Self::assemble(lattice, edge_state, node_alive))
    }

    fn assemble(lattice: &Lattice, edge_state: Vec<EdgeState>, node_alive: Vec<bool>) -> Self {
        let surviving_edges = lattice
            .edges()
            .iter()
            .zip(&edge_state)
            .enumerate()
            .filter(|(_, (e, &s))| {
                s == EdgeState::Success && node_alive[e.a as usize] && node_alive[e.b as usize]
            })
            .map(|(i, _)| i as u32)
            .collect();
        Self {
            edge_state,
            node_alive,
            surviving_edges,
        }
    }

    pub fn edge_state(&self) -> &[EdgeState] {
        &self.edge_state
    }

    pub fn node_alive(&self) -> &[bool] {
        &self.node_alive
    }

    /// Indices into [`Lattice::edges`].
    pub fn surviving_edges(&self) -> &[u32] {
        &self.surviving_edges
    }

    pub fn alive_count(&self) -> usize {
        self.node_alive.iter().filter(|&&a| a).count()
    }
}

/// Samples the fusion/loss model: one uniform draw per edge, partitioned
/// into loss, success and failure intervals, followed (photonic centers
/// only) by one draw per node.
pub fn sample_fusion<R: Rng + ?Sized>(
    lattice: &Lattice,
    params: &FusionModelParams,
    rng: &mut R,
) -> SampleOutcome {
    let loss = params.loss_probability();
    let success_edge = loss + params.success_probability();
    let mut node_alive = vec![true; lattice.node_count()];
    let edge_state: Vec<EdgeState> = lattice
        .edges()
        .iter()
        .map(|e| {
            let u: f64 = rng.gen();
            if u < loss {
                node_alive[e.a as usize] = false;
                node_alive[e.b as usize] = false;
                EdgeState::Loss
            } else if u < success_edge {
                EdgeState::Success
            } else {
                EdgeState::Failure
            }
        })
        .collect();
    if params.central_qubit.is_photonic() {
        let central_loss = 1.0 - params.eta;
        let lost: Vec<bool> = (0..node_alive.len())
            .map(|_| rng.gen::<f64>() < central_loss)
            .collect();
        for (alive, &l) in node_alive.iter_mut().zip(&lost) {
            if l {
                *alive = false;
            }
        }
        if params.central_qubit == CentralQubit::Photon {
            for (e, &s) in lattice.edges().iter().zip(&edge_state) {
                if s == EdgeState::Success && (lost[e.a as usize] || lost[e.b as usize]) {
                    node_alive[e.a as usize] = false;
                    node_alive[e.b as usize] = false;
                }
            }
        }
    }
    SampleOutcome::assemble(lattice, edge_state, node_alive)
}

/// Classical bond percolation: every edge open with probability `p`.
pub fn sample_classical_bond<R: Rng + ?Sized>(
    lattice: &Lattice,
    p: f64,
    rng: &mut R,
) -> Result<SampleOutcome> {
    check_probability("p", p)?;
    let edge_state = (0..lattice.edge_count())
        .map(|_| {
            if rng.gen::<f64>() < p {
                EdgeState::Success
            } else {
                EdgeState::Failure
            }
        })
        .collect();
    Ok(SampleOutcome::assemble(
        lattice,
        edge_state,
        vec![true; lattice.node_count()],
    ))
}

/// Classical site percolation: every node present with probability `p`; an
/// edge survives iff both endpoints are present.
pub fn sample_classical_site<R: Rng + ?Sized>(
    lattice: &Lattice,
    p: f64,
    rng: &mut R,
) -> Result<SampleOutcome> {
    check_probability("p", p)?;
    let node_alive = (0..lattice.node_count())
        .map(|_| rng.gen::<f64>() < p)
        .collect();
    Ok(SampleOutcome::assemble(
        lattice,
        vec![EdgeState::Success; lattice.edge_count()],
        node_alive,
    ))
}

/// A percolation model with one free control parameter: `η` for the fusion
/// models, the occupation probability `p` for the classical ones.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum PercolationModel {
    Fusion {
        p_s: f64,
        central_qubit: CentralQubit,
    },
    Bond,
    Site,
}

impl PercolationModel {
    pub fn spin() -> Self {
        PercolationModel::Fusion {
            p_s: DEFAULT_FUSION_SUCCESS,
            central_qubit: CentralQubit::Spin,
        }
    }

    pub fn photon() -> Self {
        PercolationModel::Fusion {
            p_s: DEFAULT_FUSION_SUCCESS,
            central_qubit: CentralQubit::Photon,
        }
    }

    pub fn fusion(central_qubit: CentralQubit) -> Self {
        PercolationModel::Fusion {
            p_s: DEFAULT_FUSION_SUCCESS,
            central_qubit,
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            PercolationModel::Fusion { p_s, .. } => check_probability("p_s", *p_s),
            _ => Ok(()),
        }
    }

    /// Name of the swept parameter.
    pub fn parameter_name(&self) -> &'static str {
        match self {
            PercolationModel::Fusion { .. } => "eta",
            _ => "p",
        }
    }

    /// Samples one trial at parameter value `param`.
    pub fn sample<R: Rng + ?Sized>(
        &self,
        lattice: &Lattice,
        param: f64,
        rng: &mut R,
    ) -> Result<SampleOutcome> {
        match *self {
            PercolationModel::Fusion { p_s, central_qubit } => {
                let params = FusionModelParams::new(param, p_s, central_qubit, 0)?;
                Ok(sample_fusion(lattice, &params, rng))
            }
            PercolationModel::Bond => sample_classical_bond(lattice, param, rng),
            PercolationModel::Site => sample_classical_site(lattice, param, rng),
        }
    }
}

impl fmt::Display for PercolationModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PercolationModel::Fusion { p_s, central_qubit } => {
                let c = central_qubit.name();
                if *p_s == DEFAULT_FUSION_SUCCESS {
                    f.write_str(c)
                } else {
                    write!(f, "{c}(p_s={p_s})")
                }
            }
            PercolationModel::Bond => f.write_str("bond"),
            PercolationModel::Site => f.write_str("site"),
        }
    }
}

impl FromStr for PercolationModel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "spin" => Ok(Self::spin()),
            "photon" | "photonic" => Ok(Self::photon()),
            "photon-node" => Ok(Self::fusion(CentralQubit::PhotonNodeOnly)),
            "bond" => Ok(PercolationModel::Bond),
            "site" => Ok(PercolationModel::Site),
            other => Err(Error::InvalidParameter(format!("unknown model `{other}`"))),
        }
    }
}
