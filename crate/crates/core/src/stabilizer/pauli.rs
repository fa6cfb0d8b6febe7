use std::fmt;

/// Single-qubit Pauli letter.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Letter {
    I,
    X,
    Y,
    Z,
}

impl Letter {
    pub fn bits(self) -> (bool, bool) {
        match self {
            Letter::I => (false, false),
            Letter::X => (true, false),
            Letter::Y => (true, true),
            Letter::Z => (false, true),
        }
    }

    pub fn from_bits(x: bool, z: bool) -> Self {
        match (x, z) {
            (false, false) => Letter::I,
            (true, false) => Letter::X,
            (true, true) => Letter::Y,
            (false, true) => Letter::Z,
        }
    }

    pub fn from_char(c: char) -> Option<Self> {
        match c {
            'I' => Some(Letter::I),
            'X' => Some(Letter::X),
            'Y' => Some(Letter::Y),
            'Z' => Some(Letter::Z),
            _ => None,
        }
    }

    pub fn as_char(self) -> char {
        match self {
            Letter::I => 'I',
            Letter::X => 'X',
            Letter::Y => 'Y',
            Letter::Z => 'Z',
        }
    }
}

/// Exponent of `i` picked up by the product of two letters: `a b = i^g c`.
fn phase_exponent(x1: bool, z1: bool, x2: bool, z2: bool) -> i32 {
    let (x2, z2) = (x2 as i32, z2 as i32);
    match (x1, z1) {
        (false, false) => 0,
        (true, true) => z2 - x2,
        (true, false) => z2 * (2 * x2 - 1),
        (false, true) => x2 * (1 - 2 * z2),
    }
}

/// A Pauli operator `i^phase ⊗_j σ_j` with Hermitian letters `σ_j`.
///
/// Stabilizer generators always carry an even phase (sign ±1); odd phases
/// only occur transiently and are rejected where a generator is expected.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct PauliString {
    phase: u8,
    x: Vec<bool>,
    z: Vec<bool>,
}

impl PauliString {
    pub fn identity(n: usize) -> Self {
        Self {
            phase: 0,
            x: vec![false; n],
            z: vec![false; n],
        }
    }

    /// Builds an operator from `(qubit, letter)` pairs on `n` qubits.
    pub fn from_letters(n: usize, letters: &[(usize, Letter)]) -> Self {
        let mut p = Self::identity(n);
        for &(q, l) in letters {
            p.set(q, l);
        }
        p
    }

    pub fn from_bits(x: Vec<bool>, z: Vec<bool>, negative: bool) -> Self {
        assert_eq!(x.len(), z.len());
        Self {
            phase: if negative { 2 } else { 0 },
            x,
            z,
        }
    }

    pub fn len(&self) -> usize {
        self.x.len()
    }

    pub fn is_empty(&self) -> bool {
        self.x.is_empty()
    }

    pub fn letter(&self, q: usize) -> Letter {
        Letter::from_bits(self.x[q], self.z[q])
    }

    pub fn set(&mut self, q: usize, l: Letter) {
        let (x, z) = l.bits();
        self.x[q] = x;
        self.z[q] = z;
    }

    pub fn x_bits(&self) -> &[bool] {
        &self.x
    }

    pub fn z_bits(&self) -> &[bool] {
        &self.z
    }

    /// Phase exponent `k` of `i^k`.
    pub fn phase(&self) -> u8 {
        self.phase
    }

    pub fn is_hermitian(&self) -> bool {
        self.phase % 2 == 0
    }

    /// True for sign -1. Panics on a non-Hermitian operator.
    pub fn is_negative(&self) -> bool {
        assert!(self.is_hermitian(), "operator with phase ±i has no sign");
        self.phase == 2
    }

    pub fn negated(mut self) -> Self {
        self.phase = (self.phase + 2) % 4;
        self
    }

    pub fn times_i(mut self) -> Self {
        self.phase = (self.phase + 1) % 4;
        self
    }

    pub fn with_sign(mut self, negative: bool) -> Self {
        assert!(self.is_hermitian());
        self.phase = if negative { 2 } else { 0 };
        self
    }

    pub fn weight(&self) -> usize {
        (0..self.len()).filter(|&q| self.x[q] || self.z[q]).count()
    }

    pub fn support(&self) -> Vec<usize> {
        (0..self.len())
            .filter(|&q| self.x[q] || self.z[q])
            .collect()
    }

    pub fn is_identity_on(&self, qubits: &[usize]) -> bool {
        qubits.iter().all(|&q| !self.x[q] && !self.z[q])
    }

    pub fn commutes_with(&self, other: &Self) -> bool {
        let mut odd = false;
        for q in 0..self.len() {
            odd ^= (self.x[q] & other.z[q]) ^ (self.z[q] & other.x[q]);
        }
        !odd
    }

    /// Operator product `self · other`.
    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(
            self.len(),
            other.len(),
            "operators act on different qubit counts"
        );
        let mut k = self.phase as i32 + other.phase as i32;
        let mut x = Vec::with_capacity(self.len());
        let mut z = Vec::with_capacity(self.len());
        for q in 0..self.len() {
            k += phase_exponent(self.x[q], self.z[q], other.x[q], other.z[q]);
            x.push(self.x[q] ^ other.x[q]);
            z.push(self.z[q] ^ other.z[q]);
        }
        Self {
            phase: k.rem_euclid(4) as u8,
            x,
            z,
        }
    }

    /// Product of two commuting Hermitian operators, which is Hermitian again.
    pub fn mul_commuting(&self, other: &Self) -> Self {
        let p = self.mul(other);
        assert!(
            p.is_hermitian(),
            "product of generators picked up a phase ±i"
        );
        p
    }

    /// The operator restricted to `keep`, in that order; the phase is kept.
    pub fn restrict(&self, keep: &[usize]) -> Self {
        Self {
            phase: self.phase,
            x: keep.iter().map(|&q| self.x[q]).collect(),
            z: keep.iter().map(|&q| self.z[q]).collect(),
        }
    }

    /// The operator extended to `n` qubits, mapping qubit `j` to `positions[j]`.
    pub fn embed(&self, n: usize, positions: &[usize]) -> Self {
        let mut out = Self::identity(n);
        out.phase = self.phase;
        for (j, &q) in positions.iter().enumerate() {
            out.x[q] = self.x[j];
            out.z[q] = self.z[j];
        }
        out
    }

    /// Renders as e.g. `-X_{a2}Z_{a1}`, listing non-identity letters in the
    /// order of `labels`.
    pub fn render(&self, labels: &[String]) -> String {
        let mut s = String::new();
        match self.phase {
            0 => {}
            1 => s.push('i'),
            2 => s.push('-'),
            _ => s.push_str("-i"),
        }
        let body: String = (0..self.len())
            .filter(|&q| self.x[q] || self.z[q])
            .map(|q| format!("{}_{{{}}}", self.letter(q).as_char(), labels[q]))
            .collect();
        if body.is_empty() {
            s.push('I');
        }
        s + &body
    }
}

impl fmt::Display for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sign = match self.phase {
            0 => "+",
            1 => "+i",
            2 => "-",
            _ => "-i",
        };
        let letters: String = (0..self.len()).map(|q| self.letter(q).as_char()).collect();
        write!(f, "{sign}{letters}")
    }
}
