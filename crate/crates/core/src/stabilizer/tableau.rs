use std::collections::HashSet;

use super::pauli::{Letter, PauliString};
use crate::error::{Error, Result};

/// A Clifford gate; conjugation `P -> U P U†`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Gate {
    /// Hadamard: X ↔ Z, Y -> -Y.
    H(usize),
    /// Phase gate `diag(1, i)`: X -> Y, Y -> -X, Z -> Z.
    R(usize),
    /// Inverse phase gate: X -> -Y, Y -> X.
    RDag(usize),
    /// Controlled-Z: X_a -> X_a Z_b, X_b -> Z_a X_b.
    Cz(usize, usize),
    /// Arbitrary single-qubit Clifford given by the images of X and Z as
    /// `(letter, negative)`.
    Single {
        qubit: usize,
        x_image: (Letter, bool),
        z_image: (Letter, bool),
    },
}

impl Gate {
    fn qubits(&self) -> Vec<usize> {
        match *self {
            Gate::H(q) | Gate::R(q) | Gate::RDag(q) | Gate::Single { qubit: q, .. } => vec![q],
            Gate::Cz(a, b) => vec![a, b],
        }
    }

    fn validate(&self, n: usize) -> Result<()> {
        let qubits = self.qubits();
        if let Some(q) = qubits.iter().find(|&&q| q >= n) {
            return Err(Error::Stabilizer(format!(
                "gate target {q} outside {n} qubits"
            )));
        }
        if let Gate::Cz(a, b) = *self {
            if a == b {
                return Err(Error::Stabilizer("CZ needs two distinct qubits".into()));
            }
        }
        if let Gate::Single {
            x_image, z_image, ..
        } = *self
        {
            let (xi, zi) = (x_image.0, z_image.0);
            if xi == Letter::I || zi == Letter::I || xi == zi {
                return Err(Error::Stabilizer(format!(
                    "images {xi:?}, {zi:?} do not define a Clifford gate"
                )));
            }
        }
        Ok(())
    }

    /// Image of `X_q` (`x = true`) or `Z_q` on `n` qubits.
    fn image(&self, n: usize, q: usize, x: bool) -> PauliString {
        let single = |l: Letter, neg: bool| {
            let p = PauliString::from_letters(n, &[(q, l)]);
            if neg {
                p.negated()
            } else {
                p
            }
        };
        let plain = single(if x { Letter::X } else { Letter::Z }, false);
        match *self {
            Gate::H(t) if t == q => single(if x { Letter::Z } else { Letter::X }, false),
            Gate::R(t) if t == q && x => single(Letter::Y, false),
            Gate::RDag(t) if t == q && x => single(Letter::Y, true),
            Gate::Single {
                qubit,
                x_image,
                z_image,
            } if qubit == q => {
                let (l, neg) = if x { x_image } else { z_image };
                single(l, neg)
            }
            Gate::Cz(a, b) if x && (q == a || q == b) => {
                let other = if q == a { b } else { a };
                PauliString::from_letters(n, &[(q, Letter::X), (other, Letter::Z)])
            }
            _ => plain,
        }
    }

    /// `U P U†`.
    pub fn conjugate(&self, p: &PauliString) -> PauliString {
        let n = p.len();
        let mut out = PauliString::identity(n);
        for _ in 0..p.phase() {
            out = out.times_i();
        }
        for q in 0..n {
            let img = match p.letter(q) {
                Letter::I => continue,
                Letter::X => self.image(n, q, true),
                Letter::Z => self.image(n, q, false),
                // Y = i X Z
                Letter::Y => self
                    .image(n, q, true)
                    .mul(&self.image(n, q, false))
                    .times_i(),
            };
            out = out.mul(&img);
        }
        out
    }
}

/// Result of measuring a Pauli operator.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MeasurementOutcome {
    /// The operator (up to sign) was already in the group; `negative`
    /// is set when the state has eigenvalue -1.
    Determined { negative: bool },
    /// Random outcome; the +1 branch was taken. `replaced` is the generator
    /// index now holding the measured operator.
    Random { replaced: usize },
}

/// Canonical graph-state form: after Gaussian elimination the generators
/// read `σ_i Π_j Z_j^{A_ij}` with `σ_i ∈ {X, Y}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GraphForm {
    pub adjacency: Vec<Vec<bool>>,
    /// Qubits whose own letter is `Y`; an `R` gate turns them into `X`.
    pub y_qubits: Vec<usize>,
}

impl GraphForm {
    pub fn edges(&self) -> Vec<(usize, usize)> {
        let n = self.adjacency.len();
        (0..n)
            .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
            .filter(|&(i, j)| self.adjacency[i][j])
            .collect()
    }
}

/// How signs enter group comparisons.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum SignMode {
    /// Compare stabilizer groups up to the signs of their elements.
    #[default]
    Ignore,
    Exact,
}

/// `n` independent, mutually commuting generators on `n` labeled qubits.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StabilizerTableau {
    labels: Vec<String>,
    generators: Vec<PauliString>,
}

/// Reduced row echelon form over the symplectic bits in `columns` order
/// (`(qubit, is_x)`), multiplying rows as operators so phases stay exact.
fn echelon(rows: &mut [PauliString], columns: &[(usize, bool)]) -> Vec<usize> {
    let bit =
        |p: &PauliString, (q, x): (usize, bool)| if x { p.x_bits()[q] } else { p.z_bits()[q] };
    let mut pivots = Vec::new();
    let mut r = 0;
    for &col in columns {
        if r == rows.len() {
            break;
        }
        let Some(p) = (r..rows.len()).find(|&i| bit(&rows[i], col)) else {
            continue;
        };
        rows.swap(r, p);
        for i in 0..rows.len() {
            if i != r && bit(&rows[i], col) {
                rows[i] = rows[i].mul_commuting(&rows[r]);
            }
        }
        pivots.push(r);
        r += 1;
    }
    pivots
}

/// GF(2) rank of the given rows over `columns`.
fn rank(rows: &[PauliString], columns: &[(usize, bool)]) -> usize {
    let bit =
        |p: &PauliString, (q, x): (usize, bool)| if x { p.x_bits()[q] } else { p.z_bits()[q] };
    let mut m: Vec<Vec<bool>> = rows
        .iter()
        .map(|p| columns.iter().map(|&c| bit(p, c)).collect())
        .collect();
    let mut r = 0;
    for c in 0..columns.len() {
        let Some(p) = (r..m.len()).find(|&i| m[i][c]) else {
            continue;
        };
        m.swap(r, p);
        for i in 0..m.len() {
            if i != r && m[i][c] {
                for k in c..columns.len() {
                    m[i][k] ^= m[r][k];
                }
            }
        }
        r += 1;
        if r == m.len() {
            break;
        }
    }
    r
}

fn standard_columns(n: usize) -> Vec<(usize, bool)> {
    (0..n)
        .map(|q| (q, true))
        .chain((0..n).map(|q| (q, false)))
        .collect()
}

impl StabilizerTableau {
    /// Validates labels and generators: `n` distinct labels, `n` Hermitian,
    /// commuting, independent generators.
    pub fn new(labels: Vec<String>, generators: Vec<PauliString>) -> Result<Self> {
        let t = Self { labels, generators };
        t.validate()?;
        Ok(t)
    }

    /// Builds a tableau from operator strings such as `"X_{a2} Z_{a1}"`.
    pub fn from_strings(labels: &[&str], generators: &[&str]) -> Result<Self> {
        let labels: Vec<String> = labels.iter().map(|s| s.to_string()).collect();
        let blank = Self {
            labels: labels.clone(),
            generators: vec![],
        };
        let generators = generators
            .iter()
            .map(|g| blank.parse_operator(g))
            .collect::<Result<_>>()?;
        Self::new(labels, generators)
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.labels.len();
        let distinct: HashSet<&String> = self.labels.iter().collect();
        if distinct.len() != n {
            return Err(Error::Stabilizer("duplicate qubit labels".into()));
        }
        if self.generators.len() != n {
            return Err(Error::Stabilizer(format!(
                "{} generators for {n} qubits",
                self.generators.len()
            )));
        }
        for (i, g) in self.generators.iter().enumerate() {
            if g.len() != n {
                return Err(Error::Stabilizer(format!("generator {i} has wrong length")));
            }
            if !g.is_hermitian() {
                return Err(Error::Stabilizer(format!(
                    "generator {} has phase ±i",
                    self.render_one(g)
                )));
            }
            for h in &self.generators[..i] {
                if !g.commutes_with(h) {
                    return Err(Error::Stabilizer(format!(
                        "generators {} and {} anticommute",
                        self.render_one(h),
                        self.render_one(g)
                    )));
                }
            }
        }
        if rank(&self.generators, &standard_columns(n)) != n {
            return Err(Error::Stabilizer("generators are not independent".into()));
        }
        Ok(())
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn generators(&self) -> &[PauliString] {
        &self.generators
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn qubit(&self, label: &str) -> Result<usize> {
        self.labels
            .iter()
            .position(|l| l == label)
            .ok_or_else(|| Error::Stabilizer(format!("no qubit labeled `{label}`")))
    }

    /// Parses `[-]L_{label}L_{label}...`; braces and whitespace are optional.
    pub fn parse_operator(&self, text: &str) -> Result<PauliString> {
        let mut s = text.trim();
        let negative = s.starts_with('-');
        s = s.trim_start_matches(['-', '+']).trim_start();
        let mut letters = Vec::new();
        let mut chars = s.chars().peekable();
        while let Some(c) = chars.next() {
            if c.is_whitespace() {
                continue;
            }
            let letter = Letter::from_char(c)
                .ok_or_else(|| Error::Stabilizer(format!("bad Pauli letter `{c}` in `{text}`")))?;
            if chars.next() != Some('_') {
                return Err(Error::Stabilizer(format!(
                    "expected `_` after {c} in `{text}`"
                )));
            }
            let mut label = String::new();
            if chars.peek() == Some(&'{') {
                chars.next();
                for c in chars.by_ref() {
                    if c == '}' {
                        break;
                    }
                    label.push(c);
                }
            } else {
                while let Some(&c) = chars.peek() {
                    if c.is_whitespace() || (Letter::from_char(c).is_some() && !label.is_empty()) {
                        break;
                    }
                    label.push(c);
                    chars.next();
                }
            }
            letters.push((self.qubit(&label)?, letter));
        }
        let mut seen = HashSet::new();
        if letters.iter().any(|(q, _)| !seen.insert(*q)) {
            return Err(Error::Stabilizer(format!("qubit repeated in `{text}`")));
        }
        let p = PauliString::from_letters(self.len(), &letters);
        Ok(if negative { p.negated() } else { p })
    }

    /// Tensor product; labels must stay distinct.
    pub fn tensor(&self, other: &Self) -> Result<Self> {
        let n = self.len() + other.len();
        let left: Vec<usize> = (0..self.len()).collect();
        let right: Vec<usize> = (self.len()..n).collect();
        let generators = self
            .generators
            .iter()
            .map(|g| g.embed(n, &left))
            .chain(other.generators.iter().map(|g| g.embed(n, &right)))
            .collect();
        let labels = self.labels.iter().chain(&other.labels).cloned().collect();
        Self::new(labels, generators)
    }

    pub fn apply(&mut self, gate: Gate) -> Result<()> {
        gate.validate(self.len())?;
        for g in &mut self.generators {
            *g = gate.conjugate(g);
        }
        Ok(())
    }

    /// Membership up to sign: `Some(negative)` when `±op` is in the group,
    /// with `negative` telling which sign the group contains.
    pub fn contains(&self, op: &PauliString) -> Option<bool> {
        let n = self.len();
        if op.len() != n {
            return None;
        }
        // Echelonize generators with an identity tag to recover the combination.
        let mut rows = self.generators.clone();
        let columns = standard_columns(n);
        echelon(&mut rows, &columns);
        let mut rest = op.clone();
        for row in &rows {
            let Some(&(q, x)) =
                columns
                    .iter()
                    .find(|&&(q, x)| if x { row.x_bits()[q] } else { row.z_bits()[q] })
            else {
                continue;
            };
            let set = if x {
                rest.x_bits()[q]
            } else {
                rest.z_bits()[q]
            };
            if set {
                rest = rest.mul(row);
            }
        }
        if rest.weight() != 0 {
            return None;
        }
        // rest = op · Π rows = i^k I; the group holds op with sign i^k.
        match rest.phase() {
            0 => Some(false),
            2 => Some(true),
            _ => None,
        }
    }

    /// Measures `op` and keeps the +1 branch when the outcome is random.
    pub fn measure(&mut self, op: &PauliString) -> Result<MeasurementOutcome> {
        if op.len() != self.len() || !op.is_hermitian() {
            return Err(Error::Stabilizer(
                "measured operator must be Hermitian on all qubits".into(),
            ));
        }
        let anti: Vec<usize> = (0..self.len())
            .filter(|&i| !self.generators[i].commutes_with(op))
            .collect();
        let Some((&first, others)) = anti.split_first() else {
            let negative = self
                .contains(op)
                .ok_or_else(|| Error::Stabilizer("commuting operator outside the group".into()))?;
            return Ok(MeasurementOutcome::Determined { negative });
        };
        for &j in others {
            self.generators[j] = self.generators[j].mul_commuting(&self.generators[first]);
        }
        self.generators[first] = op.clone();
        Ok(MeasurementOutcome::Random { replaced: first })
    }

    /// Removes qubits that are in a product state with the rest (e.g. after
    /// measuring them): the generators are reduced so that exactly
    /// `qubits.len()` of them act only on the removed qubits, and those are
    /// dropped. Fails if the removed qubits are still entangled.
    pub fn discard(&self, qubits: &[&str]) -> Result<Self> {
        let n = self.len();
        let gone: Vec<usize> = qubits
            .iter()
            .map(|l| self.qubit(l))
            .collect::<Result<_>>()?;
        let keep: Vec<usize> = (0..n).filter(|q| !gone.contains(q)).collect();
        let columns: Vec<(usize, bool)> = keep
            .iter()
            .flat_map(|&q| [(q, true), (q, false)])
            .chain(gone.iter().flat_map(|&q| [(q, true), (q, false)]))
            .collect();
        let mut rows = self.generators.clone();
        echelon(&mut rows, &columns);
        let (pure, mixed): (Vec<_>, Vec<_>) =
            rows.into_iter().partition(|r| r.is_identity_on(&keep));
        if pure.len() != gone.len() {
            return Err(Error::Stabilizer(format!(
                "qubits {qubits:?} are entangled with the rest ({} local generators)",
                pure.len()
            )));
        }
        if let Some(bad) = mixed.iter().find(|r| !r.is_identity_on(&gone)) {
            return Err(Error::Stabilizer(format!(
                "generator {} keeps support on discarded qubits",
                self.render_one(bad)
            )));
        }
        Self::new(
            keep.iter().map(|&q| self.labels[q].clone()).collect(),
            mixed.iter().map(|r| r.restrict(&keep)).collect(),
        )
    }

    /// Generators in reduced row echelon form (X bits before Z bits); the
    /// same for any generating set of the group.
    pub fn canonical(&self) -> Vec<PauliString> {
        let mut rows = self.generators.clone();
        echelon(&mut rows, &standard_columns(self.len()));
        rows
    }

    /// Same stabilizer group, after matching qubits by label.
    pub fn same_group(&self, other: &Self, signs: SignMode) -> bool {
        if self.len() != other.len() {
            return false;
        }
        let Ok(positions) = other
            .labels
            .iter()
            .map(|l| self.qubit(l))
            .collect::<Result<Vec<_>>>()
        else {
            return false;
        };
        let moved: Vec<PauliString> = other
            .generators
            .iter()
            .map(|g| g.embed(self.len(), &positions))
            .collect();
        let other = Self {
            labels: self.labels.clone(),
            generators: moved,
        };
        let (a, b) = (self.canonical(), other.canonical());
        match signs {
            SignMode::Exact => a == b,
            SignMode::Ignore => a
                .iter()
                .zip(&b)
                .all(|(p, q)| p.x_bits() == q.x_bits() && p.z_bits() == q.z_bits()),
        }
    }

    /// Canonical graph form, if the X part of the group has full rank and the
    /// resulting Z pattern is symmetric.
    pub fn graph_form(&self) -> Option<GraphForm> {
        let n = self.len();
        let rows = self.canonical();
        for (i, r) in rows.iter().enumerate() {
            if (0..n).any(|q| r.x_bits()[q] != (q == i)) {
                return None;
            }
        }
        let adjacency: Vec<Vec<bool>> = (0..n)
            .map(|i| (0..n).map(|j| i != j && rows[i].z_bits()[j]).collect())
            .collect();
        if (0..n).any(|i| (0..n).any(|j| adjacency[i][j] != adjacency[j][i])) {
            return None;
        }
        let y_qubits = (0..n).filter(|&i| rows[i].z_bits()[i]).collect();
        Some(GraphForm {
            adjacency,
            y_qubits,
        })
    }

    /// Entanglement entropy (in bits) of the qubits in `subset` with the
    /// rest: `rank(generators restricted to subset) - |subset|`.
    pub fn entanglement(&self, subset: &[usize]) -> usize {
        let columns: Vec<(usize, bool)> = subset
            .iter()
            .flat_map(|&q| [(q, true), (q, false)])
            .collect();
        rank(&self.generators, &columns) - subset.len()
    }

    /// Entanglement across every bipartition, indexed by the bitmask of the
    /// first side (qubit order of `labels`). Invariant under local Clifford
    /// gates, so differing profiles prove local inequivalence.
    pub fn cut_rank_profile(&self) -> Vec<usize> {
        let n = self.len();
        assert!(
            n <= 20,
            "cut-rank profile is exponential in the qubit count"
        );
        (0..1usize << n)
            .map(|mask| {
                let subset: Vec<usize> = (0..n).filter(|q| mask >> q & 1 == 1).collect();
                self.entanglement(&subset)
            })
            .collect()
    }

    /// Copy with qubits reordered to follow `labels`.
    pub fn reordered(&self, labels: &[&str]) -> Result<Self> {
        if labels.len() != self.len() {
            return Err(Error::Stabilizer("reordering must list every qubit".into()));
        }
        let positions: Vec<usize> = labels
            .iter()
            .map(|l| self.qubit(l))
            .collect::<Result<_>>()?;
        let n = self.len();
        let generators = self
            .generators
            .iter()
            .map(|g| {
                let mut out = PauliString::identity(n).with_sign(g.is_negative());
                for (new, &old) in positions.iter().enumerate() {
                    out.set(new, g.letter(old));
                }
                out
            })
            .collect();
        Self::new(labels.iter().map(|s| s.to_string()).collect(), generators)
    }

    pub fn render_one(&self, p: &PauliString) -> String {
        p.render(&self.labels)
    }

    pub fn render(&self) -> Vec<String> {
        self.generators.iter().map(|g| self.render_one(g)).collect()
    }
}
