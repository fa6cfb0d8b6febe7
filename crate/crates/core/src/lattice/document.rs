use serde::{Deserialize, Serialize};

use super::vectors::{negate, ConnectionVectorSet, CUSTOM_K_BOUND};
use crate::error::{Error, Result};

/// On-disk JSON lattice description.
///
/// ```json
/// {"dimension": 2, "k_bound": 7, "vectors": [[5,7],[7,4]], "auto_negate": true, "diamond_filter": false}
/// ```
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LatticeDocument {
    pub dimension: usize,
    #[serde(default = "default_k_bound")]
    pub k_bound: i32,
    pub vectors: Vec<Vec<i32>>,
    #[serde(default = "default_true")]
    pub auto_negate: bool,
    #[serde(default)]
    pub diamond_filter: bool,
}

fn default_k_bound() -> i32 {
    CUSTOM_K_BOUND
}

fn default_true() -> bool {
    true
}

impl LatticeDocument {
    pub fn from_spec(spec: &ConnectionVectorSet, diamond_filter: bool) -> Self {
        Self {
            dimension: spec.dimension(),
            k_bound: spec.k_bound(),
            vectors: spec
                .positive_half()
                .into_iter()
                .map(<[i32]>::to_vec)
                .collect(),
            auto_negate: true,
            diamond_filter,
        }
    }
}

/// A validated lattice document.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LoadedSpec {
    pub vectors: ConnectionVectorSet,
    /// Set when negations had to be added to close the set.
    pub negation_completed: bool,
    pub diamond_filter: bool,
}

/// Parses and validates a JSON lattice document.
pub fn load_lattice_spec(document: &str) -> Result<LoadedSpec> {
    let doc: LatticeDocument = serde_json::from_str(document)?;
    if doc.vectors.is_empty() {
        return Err(Error::InvalidSpec("no connection vectors listed".into()));
    }
    let closed = doc.vectors.iter().all(|z| doc.vectors.contains(&negate(z)));
    let vectors = if doc.auto_negate {
        ConnectionVectorSet::from_half(doc.dimension, doc.k_bound, &doc.vectors)?
    } else {
        ConnectionVectorSet::new(doc.dimension, doc.k_bound, doc.vectors.clone())?
    };
    Ok(LoadedSpec {
        vectors,
        negation_completed: !closed,
        diamond_filter: doc.diamond_filter,
    })
}
