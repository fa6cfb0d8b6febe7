//! Cluster analysis of sampled lattices.

mod critical;
mod union_find;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::lattice::{Boundary, Lattice};
use crate::rng::TrialStreams;
use crate::sampling::{sample_fusion, FusionModelParams, SampleOutcome};
use crate::stats::{MeanAccumulator, MeanEstimate};

pub use critical::{critical_value, critical_values, CriticalScratch};
pub use union_find::UnionFind;

/// Axis along which spanning is tested unless configured otherwise.
pub const DEFAULT_SPANNING_AXIS: usize = 0;

/// Marker for dead nodes in [`ComponentAnalysis::component_id`].
pub const NO_COMPONENT: u32 = u32::MAX;

/// Connected components of the surviving graph. Dead nodes belong to no
/// component.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ComponentAnalysis {
    /// Component label per node, labels numbered by first appearance in node
    /// order; [`NO_COMPONENT`] for dead nodes.
    pub component_id: Vec<u32>,
    /// Node count per component label.
    pub sizes: Vec<u32>,
    pub largest_size: usize,
    /// `(axis, spans)` for each tested axis.
    pub spans: Vec<(usize, bool)>,
}

impl ComponentAnalysis {
    /// Spanning result along `axis`, if that axis was tested.
    pub fn spans_along(&self, axis: usize) -> Option<bool> {
        self.spans.iter().find(|(a, _)| *a == axis).map(|&(_, s)| s)
    }

    /// Spanning along the first tested axis.
    pub fn spans(&self) -> bool {
        self.spans.first().is_some_and(|&(_, s)| s)
    }
}

/// Analyzes an outcome along the default spanning axis.
pub fn analyze(outcome: &SampleOutcome, lattice: &Lattice) -> Result<ComponentAnalysis> {
    analyze_axes(outcome, lattice, &[DEFAULT_SPANNING_AXIS])
}

/// Union-find over the surviving edges; a component spans `axis` when it
/// holds a node at coordinate 0 and one at `L-1` along that axis.
pub fn analyze_axes(
    outcome: &SampleOutcome,
    lattice: &Lattice,
    axes: &[usize],
) -> Result<ComponentAnalysis> {
    let n = lattice.node_count();
    if outcome.node_alive().len() != n || outcome.edge_state().len() != lattice.edge_count() {
        return Err(Error::LatticeMismatch(format!(
            "outcome has {} nodes / {} edges, lattice {} / {}",
            outcome.node_alive().len(),
            outcome.edge_state().len(),
            n,
            lattice.edge_count()
        )));
    }
    if let Some(&bad) = axes.iter().find(|&&a| a >= lattice.dimension()) {
        return Err(Error::InvalidParameter(format!(
            "axis {bad} out of range for dimension {}",
            lattice.dimension()
        )));
    }
    let mut uf = UnionFind::new(n);
    let edges = lattice.edges();
    for &i in outcome.surviving_edges() {
        let e = edges[i as usize];
        uf.union(e.a, e.b);
    }

    let alive = outcome.node_alive();
    let mut root_label = vec![NO_COMPONENT; n];
    let mut component_id = vec![NO_COMPONENT; n];
    let mut sizes: Vec<u32> = Vec::new();
    for node in 0..n {
        if !alive[node] {
            continue;
        }
        let root = uf.find(node as u32) as usize;
        if root_label[root] == NO_COMPONENT {
            root_label[root] = sizes.len() as u32;
            sizes.push(0);
        }
        let label = root_label[root];
        component_id[node] = label;
        sizes[label as usize] += 1;
    }

    let side = lattice.side();
    let spans = axes
        .iter()
        .map(|&axis| {
            let mut flags = vec![0u8; sizes.len()];
            for node in 0..n {
                let label = component_id[node];
                if label == NO_COMPONENT {
                    continue;
                }
                let c = lattice.coordinate(node, axis);
                if c == 0 {
                    flags[label as usize] |= 1;
                }
                if c + 1 == side {
                    flags[label as usize] |= 2;
                }
            }
            (axis, flags.contains(&3))
        })
        .collect();

    let largest_size = sizes.iter().copied().max().unwrap_or(0) as usize;
    Ok(ComponentAnalysis {
        component_id,
        sizes,
        largest_size,
        spans,
    })
}

/// Mean of `largest_size / L^d` over `trials` fusion-model trials seeded from
/// `params.seed`. Meant for periodic lattices; open ones are computed with a
/// warning.
pub fn largest_component_fraction(
    lattice: &Lattice,
    params: &FusionModelParams,
    trials: usize,
) -> Result<MeanEstimate> {
    if trials == 0 {
        return Err(Error::InvalidParameter("trials must be >= 1".into()));
    }
    if lattice.boundary() != Boundary::Periodic {
        log::warn!(
            "largest-component fraction on an open-boundary lattice includes boundary effects"
        );
    }
    let streams = TrialStreams::new(params.seed);
    let n = lattice.node_count() as f64;
    let fractions: Vec<f64> = (0..trials as u64)
        .into_par_iter()
        .map(|t| {
            let outcome = sample_fusion(lattice, params, &mut streams.trial(t));
            let analysis = analyze_axes(&outcome, lattice, &[])?;
            Ok(analysis.largest_size as f64 / n)
        })
        .collect::<Result<_>>()?;
    Ok(fractions
        .into_iter()
        .collect::<MeanAccumulator>()
        .estimate())
}
