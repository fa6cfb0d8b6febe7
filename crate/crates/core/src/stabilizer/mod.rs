//! Stabilizer tableaux for resource-state preparation and fusion.

pub mod fusion;
mod pauli;
mod tableau;
pub mod verify;

pub use fusion::{
    fuse, fuse_with, ghz_state, ghz_to_star, ghz_to_star_with, labeled_star,
    non_rotated_fusion_demo, star_state, FusionCircuit, FusionMode, FusionResult, FusionStep,
    GhzToStar,
};
pub use pauli::{Letter, PauliString};
pub use tableau::{Gate, GraphForm, MeasurementOutcome, SignMode, StabilizerTableau};
pub use verify::{verify_fusion, Check, VerificationReport};
