//! Monte Carlo engine for loss-tolerant fusion lattices.
//!
//! Star-shaped resource states sit on the nodes of a lattice on `Z^d`
//! described by a set of connection vectors; every edge is a rotated type-II
//! fusion of two photons. The crate builds such lattices, samples fusion
//! failure and photon loss, analyzes the resulting clusters, estimates loss
//! percolation thresholds with finite-size extrapolation, searches vector
//! sets for lower thresholds, and checks the underlying stabilizer algebra.
//!
//! ```
//! use fusionlat::lattice::{Boundary, Family, Lattice};
//! use fusionlat::percolation::analyze;
//! use fusionlat::rng::TrialStreams;
//! use fusionlat::sampling::{sample_fusion, CentralQubit, FusionModelParams};
//!
//! let lattice = Lattice::from_family(Family::Hypercubic, 3, 8, Boundary::Open).unwrap();
//! let params = FusionModelParams::new(0.97, 0.5, CentralQubit::Spin, 1).unwrap();
//! let outcome = sample_fusion(&lattice, &params, &mut TrialStreams::new(1).trial(0));
//! let clusters = analyze(&outcome, &lattice).unwrap();
//! assert!(clusters.largest_size <= lattice.node_count());
//! ```

pub mod error;
pub mod lattice;
pub mod optimizer;
pub mod percolation;
pub mod reference;
pub mod rng;
pub mod sampling;
pub mod stabilizer;
pub mod stats;
pub mod threshold;

pub use error::{Error, Result};
pub use lattice::{Boundary, ConnectionVectorSet, Family, Lattice, LatticeRecipe};
pub use percolation::{analyze, ComponentAnalysis};
pub use sampling::{CentralQubit, FusionModelParams, PercolationModel, SampleOutcome};
pub use threshold::{estimate_threshold, ThresholdConfig, ThresholdEstimate};
