//! Independent oracles shared by the integration and acceptance tests.
#![allow(dead_code)]

use std::collections::VecDeque;

use fusionlat::lattice::Lattice;
use fusionlat::stabilizer::{Letter, PauliString, StabilizerTableau};
use num_complex::Complex64;

const EPS: f64 = 1e-9;

/// Dense state vector; qubit `q` is bit `q` of the basis index.
#[derive(Clone, Debug)]
pub struct Dense {
    pub n: usize,
    pub amp: Vec<Complex64>,
}

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

impl Dense {
    pub fn zero(n: usize) -> Self {
        let mut amp = vec![c(0.0, 0.0); 1 << n];
        amp[0] = c(1.0, 0.0);
        Self { n, amp }
    }

    pub fn plus(n: usize) -> Self {
        let a = (1.0 / (1u64 << n) as f64).sqrt();
        Self {
            n,
            amp: vec![c(a, 0.0); 1 << n],
        }
    }

    /// `(|0...0> + |1...1>)/sqrt 2`, written down directly.
    pub fn ghz(n: usize) -> Self {
        let mut amp = vec![c(0.0, 0.0); 1 << n];
        amp[0] = c(std::f64::consts::FRAC_1_SQRT_2, 0.0);
        amp[(1 << n) - 1] = c(std::f64::consts::FRAC_1_SQRT_2, 0.0);
        Self { n, amp }
    }

    /// Graph state: `|+>^n` followed by CZ on every edge.
    pub fn graph(n: usize, edges: &[(usize, usize)]) -> Self {
        let mut s = Self::plus(n);
        for &(a, b) in edges {
            s.cz(a, b);
        }
        s
    }

    fn single(&mut self, q: usize, m: [[Complex64; 2]; 2]) {
        let bit = 1 << q;
        for i in 0..self.amp.len() {
            if i & bit == 0 {
                let (a0, a1) = (self.amp[i], self.amp[i | bit]);
                self.amp[i] = m[0][0] * a0 + m[0][1] * a1;
                self.amp[i | bit] = m[1][0] * a0 + m[1][1] * a1;
            }
        }
    }

    pub fn h(&mut self, q: usize) {
        let r = std::f64::consts::FRAC_1_SQRT_2;
        self.single(q, [[c(r, 0.0), c(r, 0.0)], [c(r, 0.0), c(-r, 0.0)]]);
    }

    pub fn r(&mut self, q: usize) {
        self.single(q, [[c(1.0, 0.0), c(0.0, 0.0)], [c(0.0, 0.0), c(0.0, 1.0)]]);
    }

    pub fn rdag(&mut self, q: usize) {
        self.single(q, [[c(1.0, 0.0), c(0.0, 0.0)], [c(0.0, 0.0), c(0.0, -1.0)]]);
    }

    pub fn cz(&mut self, a: usize, b: usize) {
        let mask = (1 << a) | (1 << b);
        for (i, x) in self.amp.iter_mut().enumerate() {
            if i & mask == mask {
                *x = -*x;
            }
        }
    }

    /// `P |psi>` for a Pauli operator.
    pub fn apply_pauli(&self, p: &PauliString) -> Self {
        let mut out = vec![c(0.0, 0.0); self.amp.len()];
        let phase = [c(1.0, 0.0), c(0.0, 1.0), c(-1.0, 0.0), c(0.0, -1.0)][p.phase() as usize];
        for (i, &a) in self.amp.iter().enumerate() {
            let mut j = i;
            let mut f = phase;
            for q in 0..self.n {
                let b = (i >> q) & 1 == 1;
                match p.letter(q) {
                    Letter::I => {}
                    Letter::X => j ^= 1 << q,
                    Letter::Z => {
                        if b {
                            f = -f;
                        }
                    }
                    Letter::Y => {
                        j ^= 1 << q;
                        // Y|0> = i|1>, Y|1> = -i|0>
                        f *= if b { c(0.0, -1.0) } else { c(0.0, 1.0) };
                    }
                }
            }
            out[j] += f * a;
        }
        Self {
            n: self.n,
            amp: out,
        }
    }

    pub fn norm(&self) -> f64 {
        self.amp.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
    }

    fn normalized(mut self) -> Option<Self> {
        let n = self.norm();
        if n < EPS {
            return None;
        }
        for a in &mut self.amp {
            *a /= n;
        }
        Some(self)
    }

    /// Projects on the `+1` eigenspace of `p`, or the `-1` one when the
    /// former is empty. Returns the observed sign.
    pub fn measure(&mut self, p: &PauliString) -> bool {
        let pp = self.apply_pauli(p);
        let plus = Self {
            n: self.n,
            amp: self
                .amp
                .iter()
                .zip(&pp.amp)
                .map(|(a, b)| (a + b) / 2.0)
                .collect(),
        };
        if let Some(s) = plus.normalized() {
            *self = s;
            return false;
        }
        let minus = Self {
            n: self.n,
            amp: self
                .amp
                .iter()
                .zip(&pp.amp)
                .map(|(a, b)| (a - b) / 2.0)
                .collect(),
        };
        *self = minus.normalized().expect("projector annihilated the state");
        true
    }

    pub fn inner(&self, other: &Self) -> Complex64 {
        self.amp
            .iter()
            .zip(&other.amp)
            .map(|(a, b)| a.conj() * b)
            .sum()
    }

    pub fn expectation(&self, p: &PauliString) -> Complex64 {
        self.inner(&self.apply_pauli(p))
    }

    /// `|<a|b>|`, one for equal states up to a global phase.
    pub fn overlap(&self, other: &Self) -> f64 {
        self.inner(other).norm()
    }

    /// The state stabilized by `t`: `prod (I + g)/2` applied to a fixed
    /// generic vector.
    pub fn from_tableau(t: &StabilizerTableau) -> Self {
        let n = t.len();
        let mut s = Self {
            n,
            amp: (0..1usize << n)
                .map(|i| c(1.0 + 0.37 * i as f64, 0.11 * (i * i % 7) as f64 - 0.3))
                .collect(),
        };
        for g in t.generators() {
            let gs = s.apply_pauli(g);
            s.amp = s
                .amp
                .iter()
                .zip(&gs.amp)
                .map(|(a, b)| (a + b) / 2.0)
                .collect();
        }
        s.normalized()
            .expect("generic vector has support on every stabilizer state")
    }
}

/// Every generator of `t` stabilizes `state`; with `exact_sign` false the
/// eigenvalue may be `-1`. With `t.len()` independent generators this fixes
/// the state, so it is an exact group comparison.
pub fn stabilizes(state: &Dense, t: &StabilizerTableau, exact_sign: bool) -> bool {
    state.n == t.len()
        && t.generators().iter().all(|g| {
            let e = state.expectation(g);
            if exact_sign {
                (e - c(1.0, 0.0)).norm() < 1e-7
            } else {
                (e.norm() - 1.0).abs() < 1e-7 && e.im.abs() < 1e-7
            }
        })
}

/// Component label per node via breadth-first search over `edges`, `None`
/// for dead nodes.
pub fn bfs_components(n: usize, edges: &[(usize, usize)], alive: &[bool]) -> Vec<Option<usize>> {
    let mut adj = vec![Vec::new(); n];
    for &(a, b) in edges {
        if alive[a] && alive[b] {
            adj[a].push(b);
            adj[b].push(a);
        }
    }
    let mut label = vec![None; n];
    let mut next = 0;
    for s in 0..n {
        if !alive[s] || label[s].is_some() {
            continue;
        }
        label[s] = Some(next);
        let mut queue = VecDeque::from([s]);
        while let Some(u) = queue.pop_front() {
            for &v in &adj[u] {
                if label[v].is_none() {
                    label[v] = Some(next);
                    queue.push_back(v);
                }
            }
        }
        next += 1;
    }
    label
}

/// Whether some component touches both faces `x_axis = 0` and `x_axis = L-1`.
pub fn bfs_spans(
    lattice: &Lattice,
    open_edges: &[(usize, usize)],
    alive: &[bool],
    axis: usize,
) -> bool {
    let labels = bfs_components(lattice.node_count(), open_edges, alive);
    let side = lattice.side();
    let low: Vec<usize> = (0..lattice.node_count())
        .filter(|&v| lattice.coordinate(v, axis) == 0)
        .filter_map(|v| labels[v])
        .collect();
    (0..lattice.node_count())
        .filter(|&v| lattice.coordinate(v, axis) + 1 == side)
        .filter_map(|v| labels[v])
        .any(|l| low.contains(&l))
}

#[derive(Clone, Copy, Debug)]
pub enum Center {
    Spin,
    /// A lost center kills itself and every node fused to it.
    Photon,
    /// A lost center kills only itself.
    PhotonNode,
}

/// Exact spanning probability of the fusion model by enumerating every
/// edge outcome (loss, success, failure) and, for photonic centers, every
/// center-loss pattern.
pub fn exact_fusion_spanning(lattice: &Lattice, eta: f64, p_s: f64, center: Center) -> f64 {
    let edges: Vec<(usize, usize)> = lattice
        .edges()
        .iter()
        .map(|e| (e.a as usize, e.b as usize))
        .collect();
    let (m, n) = (edges.len(), lattice.node_count());
    let probs = [1.0 - eta * eta, eta * eta * p_s, eta * eta * (1.0 - p_s)];
    let center_patterns = match center {
        Center::Spin => 1usize,
        _ => 1 << n,
    };
    let mut total = 0.0;
    let mut states = vec![0u8; m];
    for code in 0..3usize.pow(m as u32) {
        let mut k = code;
        let mut p_edges = 1.0;
        for s in states.iter_mut() {
            *s = (k % 3) as u8;
            k /= 3;
            p_edges *= probs[*s as usize];
        }
        if p_edges == 0.0 {
            continue;
        }
        for lost_mask in 0..center_patterns {
            let mut p = p_edges;
            let mut alive = vec![true; n];
            if !matches!(center, Center::Spin) {
                for (v, a) in alive.iter_mut().enumerate() {
                    if lost_mask >> v & 1 == 1 {
                        p *= 1.0 - eta;
                        *a = false;
                    } else {
                        p *= eta;
                    }
                }
            }
            if p == 0.0 {
                continue;
            }
            for (&(a, b), &s) in edges.iter().zip(&states) {
                if s == 0 {
                    alive[a] = false;
                    alive[b] = false;
                }
                if s == 1
                    && matches!(center, Center::Photon)
                    && (lost_mask >> a & 1 == 1 || lost_mask >> b & 1 == 1)
                {
                    alive[a] = false;
                    alive[b] = false;
                }
            }
            let open: Vec<(usize, usize)> = edges
                .iter()
                .zip(&states)
                .filter(|(_, &s)| s == 1)
                .map(|(&e, _)| e)
                .collect();
            if bfs_spans(lattice, &open, &alive, 0) {
                total += p;
            }
        }
    }
    total
}

/// Exact spanning probability of bond (`site = false`) or site percolation.
pub fn exact_classical_spanning(lattice: &Lattice, p: f64, site: bool) -> f64 {
    let edges: Vec<(usize, usize)> = lattice
        .edges()
        .iter()
        .map(|e| (e.a as usize, e.b as usize))
        .collect();
    let units = if site {
        lattice.node_count()
    } else {
        edges.len()
    };
    let mut total = 0.0;
    for mask in 0..1usize << units {
        let ones = mask.count_ones() as i32;
        let w = p.powi(ones) * (1.0 - p).powi(units as i32 - ones);
        let (open, alive): (Vec<(usize, usize)>, Vec<bool>) = if site {
            (
                edges.clone(),
                (0..units).map(|v| mask >> v & 1 == 1).collect(),
            )
        } else {
            (
                edges
                    .iter()
                    .enumerate()
                    .filter(|(i, _)| mask >> i & 1 == 1)
                    .map(|(_, &e)| e)
                    .collect(),
                vec![true; lattice.node_count()],
            )
        };
        if bfs_spans(lattice, &open, &alive, 0) {
            total += w;
        }
    }
    total
}
