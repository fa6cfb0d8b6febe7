//! Published thresholds shipped with the crate, used by validation and the
//! acceptance tests.

use std::str::FromStr;
use std::sync::OnceLock;

use serde::Deserialize;

use crate::error::{Error, Result};
use crate::lattice::{ConnectionVectorSet, Family};
use crate::sampling::PercolationModel;

const TABLES: &str = include_str!("../data/reference_tables.toml");

/// A value with its one-sigma uncertainty.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Measured {
    pub value: f64,
    pub error: f64,
}

impl Measured {
    /// `|value - other| <= k * hypot(error, other_error)`.
    pub fn agrees_with(&self, value: f64, error: f64, k: f64) -> bool {
        (self.value - value).abs() <= k * self.error.hypot(error)
    }
}

/// Parses `0.6968(7)`, `0.40725395(3)`, `1/2`, `0.652703645...` and plain
/// decimals (exact). A leading `~` marks an approximate value whose error
/// is taken as one unit in the last digit.
impl FromStr for Measured {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::InvalidParameter(format!("cannot parse reference value `{s}`"));
        let t = s.trim();
        if let Some((num, den)) = t.split_once('/') {
            let (n, d): (f64, f64) = (
                num.parse().map_err(|_| bad())?,
                den.parse().map_err(|_| bad())?,
            );
            return Ok(Self {
                value: n / d,
                error: 0.0,
            });
        }
        let (approx, t) = match t.strip_prefix('~') {
            Some(rest) => (true, rest),
            None => (false, t),
        };
        let t = t.trim_end_matches("...");
        let (digits, err) = match t.split_once('(') {
            Some((d, e)) => (d, Some(e.strip_suffix(')').ok_or_else(bad)?)),
            None => (t, None),
        };
        let value: f64 = digits.parse().map_err(|_| bad())?;
        let decimals = digits.split_once('.').map_or(0, |(_, f)| f.len()) as i32;
        let unit = 10f64.powi(-decimals);
        let error = match err {
            Some(e) => e.parse::<f64>().map_err(|_| bad())? * unit,
            None if approx => unit,
            None => 0.0,
        };
        Ok(Self { value, error })
    }
}

#[derive(Deserialize)]
struct RawTables {
    classical: Vec<RawEntry>,
    loss: Vec<RawEntry>,
    optimized: Vec<RawOptimized>,
}

#[derive(Deserialize)]
struct RawEntry {
    model: String,
    family: String,
    dim: usize,
    value: String,
    literature: Option<String>,
}

#[derive(Deserialize)]
struct RawOptimized {
    name: String,
    model: String,
    vectors: Vec<Vec<i32>>,
    value: String,
}

#[derive(Clone, Debug)]
pub struct ReferenceEntry {
    pub model: PercolationModel,
    pub family: Family,
    pub dimension: usize,
    pub value: Measured,
    pub literature: Option<Measured>,
}

#[derive(Clone, Debug)]
pub struct OptimizedEntry {
    pub name: String,
    pub model: PercolationModel,
    pub vectors: ConnectionVectorSet,
    pub value: Measured,
}

#[derive(Clone, Debug)]
pub struct ReferenceTables {
    /// Site and bond thresholds.
    pub classical: Vec<ReferenceEntry>,
    /// Loss thresholds of the fusion model.
    pub loss: Vec<ReferenceEntry>,
    pub optimized: Vec<OptimizedEntry>,
}

impl ReferenceEntry {
    fn from_raw(raw: RawEntry) -> Result<Self> {
        Ok(Self {
            model: raw.model.parse()?,
            family: raw.family.parse()?,
            dimension: raw.dim,
            value: raw.value.parse()?,
            literature: raw.literature.as_deref().map(str::parse).transpose()?,
        })
    }
}

impl ReferenceTables {
    pub fn parse(document: &str) -> Result<Self> {
        let raw: RawTables = toml::from_str(document)?;
        let optimized = raw
            .optimized
            .into_iter()
            .map(|o| {
                let dimension = o.vectors.first().map_or(0, Vec::len);
                let k = o
                    .vectors
                    .iter()
                    .flatten()
                    .map(|c| c.abs())
                    .max()
                    .unwrap_or(1);
                Ok(OptimizedEntry {
                    model: o.model.parse()?,
                    vectors: ConnectionVectorSet::from_half(dimension, k, &o.vectors)?,
                    value: o.value.parse()?,
                    name: o.name,
                })
            })
            .collect::<Result<_>>()?;
        Ok(Self {
            classical: raw
                .classical
                .into_iter()
                .map(ReferenceEntry::from_raw)
                .collect::<Result<_>>()?,
            loss: raw
                .loss
                .into_iter()
                .map(ReferenceEntry::from_raw)
                .collect::<Result<_>>()?,
            optimized,
        })
    }

    fn find<'a>(
        entries: &'a [ReferenceEntry],
        model: &PercolationModel,
        family: Family,
        dimension: usize,
    ) -> Option<&'a ReferenceEntry> {
        entries
            .iter()
            .find(|e| e.model == *model && e.family == family && e.dimension == dimension)
    }

    pub fn classical_entry(
        &self,
        model: &PercolationModel,
        family: Family,
        dimension: usize,
    ) -> Option<&ReferenceEntry> {
        Self::find(&self.classical, model, family, dimension)
    }

    pub fn loss_entry(
        &self,
        model: &PercolationModel,
        family: Family,
        dimension: usize,
    ) -> Option<&ReferenceEntry> {
        Self::find(&self.loss, model, family, dimension)
    }

    pub fn optimized_entry(&self, name: &str) -> Option<&OptimizedEntry> {
        self.optimized.iter().find(|o| o.name == name)
    }
}

/// The tables embedded in the crate.
pub fn reference_tables() -> &'static ReferenceTables {
    static TABLES_CELL: OnceLock<ReferenceTables> = OnceLock::new();
    TABLES_CELL.get_or_init(|| {
        ReferenceTables::parse(TABLES).expect("embedded reference tables are valid")
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_notations() {
        let m: Measured = "0.6968(7)".parse().unwrap();
        assert!((m.value - 0.6968).abs() < 1e-12 && (m.error - 0.0007).abs() < 1e-12);
        let m: Measured = "0.1802875(10)".parse().unwrap();
        assert!((m.error - 1e-6).abs() < 1e-15);
        assert_eq!(
            "1/2".parse::<Measured>().unwrap(),
            Measured {
                value: 0.5,
                error: 0.0
            }
        );
        assert_eq!("0.652703645...".parse::<Measured>().unwrap().error, 0.0);
        assert!(("~0.136".parse::<Measured>().unwrap().error - 0.001).abs() < 1e-12);
        assert!("0.5(".parse::<Measured>().is_err());
    }

    #[test]
    fn embedded_tables_load() {
        let t = reference_tables();
        assert_eq!(t.classical.len(), 58);
        assert_eq!(t.loss.len(), 46);
        let sq = t
            .classical_entry(&PercolationModel::Bond, Family::Hypercubic, 2)
            .unwrap();
        assert_eq!(sq.literature.unwrap().value, 0.5);
        let spin = t
            .loss_entry(&PercolationModel::spin(), Family::Hypercubic, 3)
            .unwrap();
        assert_eq!(spin.value.value, 0.9435);
        let l2a = t.optimized_entry("L2d-a").unwrap();
        assert_eq!(l2a.vectors.degree(), 10);
        assert_eq!(t.optimized_entry("L3d-a").unwrap().vectors.degree(), 8);
    }
}
