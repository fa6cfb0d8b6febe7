//! Per-trial critical parameter values.
//!
//! Each trial draws its randomness once in a form that is monotone in the
//! control parameter (η or p): every surviving edge gets an activation value
//! above which it is present. Adding edges in activation order to a
//! union-find with face flags yields the exact parameter at which the trial
//! first spans. The marginal law at any fixed parameter equals the one of the
//! direct samplers in [`crate::sampling`], but a single pass covers the whole
//! parameter range.
//!
//! For the fusion model an edge uses two uniforms: `u_loss` (lost iff
//! `u_loss < 1 - η²`) and `u_fuse` (success iff `u_fuse < p_s`). A node is
//! alive once η exceeds the loss thresholds of all incident edges (and, for a
//! photonic center, its own unheralded-loss threshold `1 - u_node` and, under
//! the neighborhood rule, those of the centers it is fused to).

use rand::RngCore;
use rayon::prelude::*;

use super::union_find::UnionFind;
use crate::lattice::Lattice;
use crate::rng::TrialStreams;
use crate::sampling::{CentralQubit, PercolationModel};

const TWO_POW_32: f64 = 4_294_967_296.0;

/// Reusable buffers for [`critical_value`].
#[derive(Debug, Default)]
pub struct CriticalScratch {
    node_threshold: Vec<f32>,
    center_threshold: Vec<f32>,
    keys: Vec<u64>,
    uf: UnionFind,
    flags: Vec<u8>,
}

#[inline]
fn unit_f64(bits: u64) -> f64 {
    (bits >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

/// The smallest parameter value at which this trial spans; `f64::INFINITY`
/// when it does not span even at parameter 1. `faces` comes from
/// [`Lattice::face_flags`].
pub fn critical_value<R: RngCore + ?Sized>(
    lattice: &Lattice,
    model: &PercolationModel,
    faces: &[u8],
    rng: &mut R,
    scratch: &mut CriticalScratch,
) -> f64 {
    let n = lattice.node_count();
    let edges = lattice.edges();
    let CriticalScratch {
        node_threshold,
        center_threshold,
        keys,
        uf,
        flags,
    } = scratch;
    node_threshold.clear();
    node_threshold.resize(n, 0.0);
    keys.clear();

    match *model {
        PercolationModel::Fusion { p_s, central_qubit } => {
            let fuse_cut = (p_s * TWO_POW_32) as u64;
            for (i, e) in edges.iter().enumerate() {
                let r = rng.next_u64();
                let u_loss = (r >> 32) as f64 / TWO_POW_32;
                let t = (1.0 - u_loss).sqrt() as f32;
                let (a, b) = (e.a as usize, e.b as usize);
                if node_threshold[a] < t {
                    node_threshold[a] = t;
                }
                if node_threshold[b] < t {
                    node_threshold[b] = t;
                }
                if (r & 0xFFFF_FFFF) < fuse_cut {
                    keys.push(i as u64);
                }
            }
            if central_qubit.is_photonic() {
                center_threshold.clear();
                center_threshold.extend((0..n).map(|_| (1.0 - unit_f64(rng.next_u64())) as f32));
                for (t, &own) in node_threshold.iter_mut().zip(center_threshold.iter()) {
                    if *t < own {
                        *t = own;
                    }
                }
                if central_qubit == CentralQubit::Photon {
                    for &k in keys.iter() {
                        let e = edges[k as usize];
                        let (a, b) = (e.a as usize, e.b as usize);
                        node_threshold[a] = node_threshold[a].max(center_threshold[b]);
                        node_threshold[b] = node_threshold[b].max(center_threshold[a]);
                    }
                }
            }
            for k in keys.iter_mut() {
                let e = edges[*k as usize];
                let t = node_threshold[e.a as usize].max(node_threshold[e.b as usize]);
                *k |= (t.to_bits() as u64) << 32;
            }
        }
        PercolationModel::Bond => {
            keys.extend((0..edges.len()).map(|i| {
                let t = unit_f64(rng.next_u64()) as f32;
                ((t.to_bits() as u64) << 32) | i as u64
            }));
        }
        PercolationModel::Site => {
            for t in node_threshold.iter_mut() {
                *t = unit_f64(rng.next_u64()) as f32;
            }
            keys.extend(edges.iter().enumerate().map(|(i, e)| {
                let t = node_threshold[e.a as usize].max(node_threshold[e.b as usize]);
                ((t.to_bits() as u64) << 32) | i as u64
            }));
        }
    }

    keys.sort_unstable();
    uf.reset(n);
    flags.clear();
    flags.extend_from_slice(faces);
    for &k in keys.iter() {
        let e = edges[(k & 0xFFFF_FFFF) as usize];
        let (ra, rb) = (uf.find(e.a), uf.find(e.b));
        if ra == rb {
            continue;
        }
        let merged = flags[ra as usize] | flags[rb as usize];
        let root = uf.union(ra, rb).expect("distinct roots");
        flags[root as usize] = merged;
        if merged == 3 {
            return f32::from_bits((k >> 32) as u32) as f64;
        }
    }
    f64::INFINITY
}

/// Critical values of `trials` independent trials along `axis`, in trial
/// order. Trial `t` uses stream `t` of `streams`.
pub fn critical_values(
    lattice: &Lattice,
    model: &PercolationModel,
    trials: usize,
    streams: TrialStreams,
    axis: usize,
) -> Vec<f64> {
    let faces = lattice.face_flags(axis);
    (0..trials as u64)
        .into_par_iter()
        .map_init(CriticalScratch::default, |scratch, t| {
            critical_value(lattice, model, &faces, &mut streams.trial(t), scratch)
        })
        .collect()
}
