//! Finite fusion lattices on `{0..L-1}^d`.
//!
//! Every node is the central qubit of a star-shaped resource state and every
//! edge is one fusion (two photons). A lattice is fully determined by its
//! [`ConnectionVectorSet`], the side length, the boundary policy and the
//! diamond edge filter.

mod document;
mod vectors;

use std::collections::HashSet;
use std::sync::{Mutex, OnceLock};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use document::{load_lattice_spec, LatticeDocument, LoadedSpec};
pub use vectors::{
    vectors_for_family, ConnectionVectorSet, Family, CUSTOM_K_BOUND, NAMED_FAMILY_K_BOUND,
};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Boundary {
    /// Edges leaving the box are dropped.
    #[default]
    Open,
    /// Coordinates wrap modulo `L`.
    Periodic,
}

impl std::str::FromStr for Boundary {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "open" => Ok(Boundary::Open),
            "periodic" => Ok(Boundary::Periodic),
            other => Err(Error::InvalidParameter(format!(
                "unknown boundary `{other}`"
            ))),
        }
    }
}

/// An undirected fusion edge between two nodes.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Edge {
    pub a: u32,
    pub b: u32,
    /// Index into [`Lattice::edge_vectors`].
    pub vector: u16,
}

/// An immutable finite lattice. Safe to share read-only between trial workers.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Lattice {
    spec: ConnectionVectorSet,
    side: usize,
    boundary: Boundary,
    diamond_filter: bool,
    /// Row-major strides; the first coordinate is the most significant.
    strides: Vec<usize>,
    edge_vectors: Vec<Vec<i32>>,
    edges: Vec<Edge>,
}

impl Lattice {
    /// Builds the lattice. Each undirected edge is materialized once, from the
    /// tail node of a positive-half vector, in node-major order.
    pub fn build(
        spec: &ConnectionVectorSet,
        side: usize,
        boundary: Boundary,
        diamond_filter: bool,
    ) -> Result<Self> {
        let d = spec.dimension();
        if side < 2 {
            return Err(Error::InvalidParameter(format!(
                "side length must be >= 2, got {side}"
            )));
        }
        if diamond_filter && !spec.is_hypercubic() {
            return Err(Error::InvalidSpec(
                "the diamond filter only applies to the hypercubic vector set".into(),
            ));
        }
        if diamond_filter && boundary == Boundary::Periodic && side % 2 == 1 {
            return Err(Error::InvalidParameter(
                "periodic diamond lattices need an even side length".into(),
            ));
        }
        let node_count = (side as u64)
            .checked_pow(d as u32)
            .filter(|&n| n <= u32::MAX as u64)
            .ok_or_else(|| Error::InvalidParameter(format!("L^d too large for L={side}, d={d}")))?
            as usize;

        let mut strides = vec![1usize; d];
        for j in (0..d.saturating_sub(1)).rev() {
            strides[j] = strides[j + 1] * side;
        }
        let edge_vectors: Vec<Vec<i32>> = spec
            .positive_half()
            .into_iter()
            .map(<[i32]>::to_vec)
            .collect();
        if edge_vectors.len() > u16::MAX as usize {
            return Err(Error::InvalidSpec("too many connection vectors".into()));
        }
        // For the diamond filter: the single dimension each unit vector steps in.
        let step_dim: Vec<usize> = edge_vectors
            .iter()
            .map(|z| z.iter().position(|&c| c != 0).unwrap_or(0))
            .collect();

        let side_i = side as i64;
        let mut edges = Vec::with_capacity(node_count * edge_vectors.len());
        let mut coords = vec![0i64; d];
        let mut dropped_loops = 0usize;
        for node in 0..node_count {
            let coord_sum: i64 = coords.iter().sum();
            'vectors: for (vi, z) in edge_vectors.iter().enumerate() {
                if diamond_filter && step_dim[vi] > 0 && coord_sum % 2 == 0 {
                    continue;
                }
                let mut target = 0usize;
                for j in 0..d {
                    let mut c = coords[j] + z[j] as i64;
                    match boundary {
                        Boundary::Open => {
                            if c < 0 || c >= side_i {
                                continue 'vectors;
                            }
                        }
                        Boundary::Periodic => c = c.rem_euclid(side_i),
                    }
                    target += c as usize * strides[j];
                }
                if target == node {
                    dropped_loops += 1;
                    continue;
                }
                edges.push(Edge {
                    a: node as u32,
                    b: target as u32,
                    vector: vi as u16,
                });
            }
            // Odometer increment, last coordinate fastest.
            for j in (0..d).rev() {
                coords[j] += 1;
                if coords[j] < side_i {
                    break;
                }
                coords[j] = 0;
            }
        }
        if dropped_loops > 0 {
            log::warn!(
                "dropped {dropped_loops} self-loop edges: some vectors wrap onto themselves at L={side}"
            );
        }
        match spec.partition_count() {
            Some(1) => {}
            Some(n) if first_warning(spec) => {
                log::warn!("vector set {spec} splits Z^{d} into {n} unconnected partitions")
            }
            None if first_warning(spec) => log::warn!("vector set {spec} does not span Z^{d}"),
            _ => {}
        }
        Ok(Self {
            spec: spec.clone(),
            side,
            boundary,
            diamond_filter,
            strides,
            edge_vectors,
            edges,
        })
    }

    /// Convenience constructor for a named family.
    pub fn from_family(
        family: Family,
        dimension: usize,
        side: usize,
        boundary: Boundary,
    ) -> Result<Self> {
        let spec = vectors_for_family(family, dimension)?;
        Self::build(&spec, side, boundary, family.uses_diamond_filter())
    }

    pub fn spec(&self) -> &ConnectionVectorSet {
        &self.spec
    }

    pub fn dimension(&self) -> usize {
        self.spec.dimension()
    }

    pub fn side(&self) -> usize {
        self.side
    }

    pub fn boundary(&self) -> Boundary {
        self.boundary
    }

    pub fn diamond_filter(&self) -> bool {
        self.diamond_filter
    }

    pub fn node_count(&self) -> usize {
        self.strides.first().map_or(1, |s| s * self.side)
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    /// The positive-half vectors edges refer to via [`Edge::vector`].
    pub fn edge_vectors(&self) -> &[Vec<i32>] {
        &self.edge_vectors
    }

    /// Coordinate of `node` along `axis` (axis 0 is the first dimension).
    #[inline]
    pub fn coordinate(&self, node: usize, axis: usize) -> usize {
        (node / self.strides[axis]) % self.side
    }

    pub fn coordinates(&self, node: usize) -> Vec<usize> {
        (0..self.dimension())
            .map(|j| self.coordinate(node, j))
            .collect()
    }

    pub fn node_index(&self, coords: &[usize]) -> usize {
        coords.iter().zip(&self.strides).map(|(c, s)| c * s).sum()
    }

    /// Degree of every node.
    pub fn degrees(&self) -> Vec<u32> {
        let mut deg = vec![0u32; self.node_count()];
        for e in &self.edges {
            deg[e.a as usize] += 1;
            deg[e.b as usize] += 1;
        }
        deg
    }

    /// Per-node face membership along `axis`: bit 0 for coordinate 0, bit 1
    /// for coordinate `L-1`.
    pub fn face_flags(&self, axis: usize) -> Vec<u8> {
        (0..self.node_count())
            .map(|n| {
                let c = self.coordinate(n, axis);
                u8::from(c == 0) | (u8::from(c + 1 == self.side) << 1)
            })
            .collect()
    }
}

/// Whether `spec` has not been warned about yet in this process; a size
/// ladder would otherwise repeat the same warning for every side.
fn first_warning(spec: &ConnectionVectorSet) -> bool {
    static WARNED: OnceLock<Mutex<HashSet<ConnectionVectorSet>>> = OnceLock::new();
    WARNED
        .get_or_init(Default::default)
        .lock()
        .map_or(true, |mut seen| seen.insert(spec.clone()))
}

/// Everything needed to build a lattice at any side length.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct LatticeRecipe {
    /// Short name used in reports, e.g. `hc` or `L2da`.
    pub label: String,
    pub vectors: ConnectionVectorSet,
    pub diamond_filter: bool,
}

impl LatticeRecipe {
    pub fn family(family: Family, dimension: usize) -> Result<Self> {
        Ok(Self {
            label: family.name().to_string(),
            vectors: vectors_for_family(family, dimension)?,
            diamond_filter: family.uses_diamond_filter(),
        })
    }

    pub fn custom(label: impl Into<String>, vectors: ConnectionVectorSet) -> Self {
        Self {
            label: label.into(),
            vectors,
            diamond_filter: false,
        }
    }

    pub fn from_loaded(label: impl Into<String>, loaded: LoadedSpec) -> Self {
        Self {
            label: label.into(),
            vectors: loaded.vectors,
            diamond_filter: loaded.diamond_filter,
        }
    }

    pub fn dimension(&self) -> usize {
        self.vectors.dimension()
    }

    pub fn build(&self, side: usize, boundary: Boundary) -> Result<Lattice> {
        Lattice::build(&self.vectors, side, boundary, self.diamond_filter)
    }
}
