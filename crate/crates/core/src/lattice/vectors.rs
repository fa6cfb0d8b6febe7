use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Default per-component bound for named families.
pub const NAMED_FAMILY_K_BOUND: i32 = 1;
/// Default per-component bound for custom sets and the optimizer search space.
pub const CUSTOM_K_BOUND: i32 = 7;

/// The neighborhood of every node of a fusion lattice on `Z^d`.
///
/// Invariants enforced at construction: no zero vector, no duplicates, closed
/// under negation, every component bounded by `k_bound`. The vectors are kept
/// in lexicographic order so that equal sets compare and hash identically.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct ConnectionVectorSet {
    dimension: usize,
    k_bound: i32,
    vectors: Vec<Vec<i32>>,
}

impl ConnectionVectorSet {
    pub fn new(dimension: usize, k_bound: i32, vectors: Vec<Vec<i32>>) -> Result<Self> {
        if dimension == 0 {
            return Err(Error::InvalidSpec("dimension must be positive".into()));
        }
        if k_bound < 1 {
            return Err(Error::InvalidSpec(format!(
                "k_bound must be positive, got {k_bound}"
            )));
        }
        let mut seen = BTreeSet::new();
        for z in &vectors {
            if z.len() != dimension {
                return Err(Error::InvalidSpec(format!(
                    "vector {z:?} has {} components, expected {dimension}",
                    z.len()
                )));
            }
            if z.iter().all(|&c| c == 0) {
                return Err(Error::InvalidSpec("zero vector is not a connection".into()));
            }
            if let Some(c) = z.iter().find(|c| c.abs() > k_bound) {
                return Err(Error::InvalidSpec(format!(
                    "component {c} of {z:?} exceeds k_bound {k_bound}"
                )));
            }
            if !seen.insert(z.clone()) {
                return Err(Error::InvalidSpec(format!("duplicate vector {z:?}")));
            }
        }
        for z in &seen {
            if !seen.contains(&negate(z)) {
                return Err(Error::InvalidSpec(format!(
                    "set is not closed under negation: {z:?} present without its negation"
                )));
            }
        }
        Ok(Self {
            dimension,
            k_bound,
            vectors: seen.into_iter().collect(),
        })
    }

    /// Builds a set from one representative per `±z` pair. Listing both `z`
    /// and `-z` is accepted; listing the same vector twice is not.
    pub fn from_half(dimension: usize, k_bound: i32, half: &[Vec<i32>]) -> Result<Self> {
        let mut listed = BTreeSet::new();
        for z in half {
            if !listed.insert(z.clone()) {
                return Err(Error::InvalidSpec(format!("duplicate vector {z:?}")));
            }
        }
        let mut all = listed.clone();
        for z in &listed {
            all.insert(negate(z));
        }
        Self::new(dimension, k_bound, all.into_iter().collect())
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn k_bound(&self) -> i32 {
        self.k_bound
    }

    pub fn vectors(&self) -> &[Vec<i32>] {
        &self.vectors
    }

    /// Vertex degree `d_v` (number of fusion photons per resource state).
    pub fn degree(&self) -> usize {
        self.vectors.len()
    }

    pub fn contains(&self, z: &[i32]) -> bool {
        self.vectors
            .binary_search_by(|v| v.as_slice().cmp(z))
            .is_ok()
    }

    /// One representative of each `±z` pair: the one whose first non-zero
    /// component is positive. Edges are generated from these only.
    pub fn positive_half(&self) -> Vec<&[i32]> {
        self.vectors
            .iter()
            .filter(|z| is_positive(z))
            .map(Vec::as_slice)
            .collect()
    }

    /// True iff the set is exactly `{±e_1, …, ±e_d}`.
    pub fn is_hypercubic(&self) -> bool {
        self.vectors.len() == 2 * self.dimension
            && self
                .vectors
                .iter()
                .all(|z| z.iter().map(|c| c.abs()).sum::<i32>() == 1)
    }

    /// Adds the pair `±z`.
    pub fn with_pair(&self, z: &[i32]) -> Result<Self> {
        if self.contains(z) {
            return Err(Error::InvalidSpec(format!("{z:?} already present")));
        }
        let mut vectors = self.vectors.clone();
        vectors.push(z.to_vec());
        vectors.push(negate(z));
        Self::new(self.dimension, self.k_bound, vectors)
    }

    /// Removes the pair `±z`.
    pub fn without_pair(&self, z: &[i32]) -> Result<Self> {
        if !self.contains(z) {
            return Err(Error::InvalidSpec(format!("{z:?} not present")));
        }
        let minus = negate(z);
        let vectors = self
            .vectors
            .iter()
            .filter(|v| v.as_slice() != z && **v != minus)
            .cloned()
            .collect();
        Self::new(self.dimension, self.k_bound, vectors)
    }

    pub fn union(&self, other: &Self) -> Result<Self> {
        if self.dimension != other.dimension {
            return Err(Error::InvalidSpec("dimension mismatch in union".into()));
        }
        let all: BTreeSet<Vec<i32>> = self
            .vectors
            .iter()
            .chain(other.vectors.iter())
            .cloned()
            .collect();
        Self::new(
            self.dimension,
            self.k_bound.max(other.k_bound),
            all.into_iter().collect(),
        )
    }

    /// Number of mutually unconnected copies of the lattice on `Z^d`, i.e. the
    /// index of the sublattice generated by the vectors. `None` when the
    /// vectors do not span `R^d` (infinitely many partitions).
    pub fn partition_count(&self) -> Option<u64> {
        let d = self.dimension;
        let mut rows: Vec<Vec<i64>> = self
            .positive_half()
            .iter()
            .map(|z| z.iter().map(|&c| c as i64).collect())
            .collect();
        let mut index: u64 = 1;
        let mut top = 0;
        for col in 0..d {
            loop {
                let pivot = (top..rows.len())
                    .filter(|&r| rows[r][col] != 0)
                    .min_by_key(|&r| rows[r][col].abs())?;
                rows.swap(top, pivot);
                let mut reduced_all = true;
                for r in top + 1..rows.len() {
                    if rows[r][col] != 0 {
                        let q = rows[r][col] / rows[top][col];
                        for c in col..d {
                            rows[r][c] -= q * rows[top][c];
                        }
                        if rows[r][col] != 0 {
                            reduced_all = false;
                        }
                    }
                }
                if reduced_all {
                    break;
                }
            }
            index *= rows[top][col].unsigned_abs();
            top += 1;
        }
        Some(index)
    }

    /// All candidate pairs `±z` with `|z_i| <= k_bound`, as positive representatives
    /// in lexicographic order. There are `((2k+1)^d - 1) / 2` of them.
    pub fn candidate_pairs(dimension: usize, k_bound: i32) -> Vec<Vec<i32>> {
        let side = (2 * k_bound + 1) as usize;
        let total = side.pow(dimension as u32);
        let mut out = Vec::with_capacity(total / 2);
        for code in 0..total {
            let mut rest = code;
            let mut z = vec![0; dimension];
            for c in z.iter_mut().rev() {
                *c = (rest % side) as i32 - k_bound;
                rest /= side;
            }
            if is_positive(&z) {
                out.push(z);
            }
        }
        out
    }
}

impl fmt::Display for ConnectionVectorSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let half: Vec<String> = self
            .positive_half()
            .iter()
            .map(|z| {
                format!(
                    "[{}]",
                    z.iter().map(i32::to_string).collect::<Vec<_>>().join(",")
                )
            })
            .collect();
        write!(f, "±{{{}}}", half.join(", "))
    }
}

pub(crate) fn negate(z: &[i32]) -> Vec<i32> {
    z.iter().map(|c| -c).collect()
}

/// First non-zero component is positive.
pub(crate) fn is_positive(z: &[i32]) -> bool {
    z.iter().find(|&&c| c != 0).is_some_and(|&c| c > 0)
}

/// Named lattice families built from `k = 1` connection vectors.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Family {
    /// Non-zero in exactly one dimension (`2d` vectors).
    Hypercubic,
    /// Non-zero in exactly two dimensions (`2d(d-1)` vectors).
    Fcc,
    /// Non-zero in every dimension (`2^d` vectors).
    Bcc,
    FccHc,
    BccHc,
    /// Hypercubic vectors with every second edge outside dimension 1 removed.
    Diamond,
    Custom,
}

impl Family {
    pub const NAMED: [Family; 6] = [
        Family::Hypercubic,
        Family::Fcc,
        Family::Bcc,
        Family::FccHc,
        Family::BccHc,
        Family::Diamond,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Family::Hypercubic => "hc",
            Family::Fcc => "fcc",
            Family::Bcc => "bcc",
            Family::FccHc => "fcc+hc",
            Family::BccHc => "bcc+hc",
            Family::Diamond => "diamond",
            Family::Custom => "custom",
        }
    }

    /// Whether lattices of this family are built with the diamond edge filter.
    pub fn uses_diamond_filter(self) -> bool {
        self == Family::Diamond
    }

    /// Closed-form vector count in dimension `d`.
    pub fn vector_count(self, d: usize) -> Option<usize> {
        let hc = 2 * d;
        let fcc = 2 * d * (d - 1);
        let bcc = 1usize << d;
        match self {
            Family::Hypercubic | Family::Diamond => Some(hc),
            Family::Fcc => Some(fcc),
            Family::Bcc => Some(bcc),
            // In d = 2 the fcc and bcc sets coincide with the diagonals.
            Family::FccHc => Some(hc + fcc),
            Family::BccHc => Some(hc + bcc),
            Family::Custom => None,
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "hc" | "hypercubic" | "sc" => Ok(Family::Hypercubic),
            "fcc" => Ok(Family::Fcc),
            "bcc" => Ok(Family::Bcc),
            "fcc+hc" | "fcc-hc" | "fcchc" => Ok(Family::FccHc),
            "bcc+hc" | "bcc-hc" | "bcchc" => Ok(Family::BccHc),
            "diamond" => Ok(Family::Diamond),
            "custom" => Ok(Family::Custom),
            other => Err(Error::InvalidParameter(format!(
                "unknown lattice family `{other}`"
            ))),
        }
    }
}

/// Vector set of a named family in dimension `d`.
pub fn vectors_for_family(family: Family, dimension: usize) -> Result<ConnectionVectorSet> {
    if dimension < 2 || family == Family::Custom {
        return Err(Error::UnsupportedFamily {
            family: family.name().into(),
            dimension,
        });
    }
    let with_support = |n: i32| -> Vec<Vec<i32>> {
        ConnectionVectorSet::candidate_pairs(dimension, 1)
            .into_iter()
            .filter(|z| z.iter().map(|c| c.abs()).sum::<i32>() == n)
            .collect()
    };
    let d = dimension as i32;
    let half = match family {
        Family::Hypercubic | Family::Diamond => with_support(1),
        Family::Fcc => with_support(2),
        Family::Bcc => with_support(d),
        Family::FccHc => [with_support(1), with_support(2)].concat(),
        Family::BccHc => [with_support(1), with_support(d)].concat(),
        Family::Custom => unreachable!(),
    };
    ConnectionVectorSet::from_half(dimension, NAMED_FAMILY_K_BOUND, &half)
}
