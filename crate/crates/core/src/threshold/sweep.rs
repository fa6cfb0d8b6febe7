use std::io::Write;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::lattice::Lattice;
use crate::percolation::{critical_values, UnionFind};
use crate::rng::TrialStreams;
use crate::sampling::{PercolationModel, SampleOutcome};
use crate::stats::binomial_stderr;

/// How trials are drawn across the parameter grid.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum SweepMethod {
    /// Fresh trials at every grid point.
    #[default]
    Independent,
    /// One coupled draw per trial reused across the whole grid; the per-trial
    /// critical values are kept on the curve.
    Coupled,
}

impl std::str::FromStr for SweepMethod {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "independent" => Ok(Self::Independent),
            "coupled" => Ok(Self::Coupled),
            other => Err(Error::InvalidParameter(format!(
                "unknown sweep method `{other}`"
            ))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SweepPoint {
    pub param: f64,
    pub spanning_prob: f64,
    pub stderr: f64,
    pub trials: usize,
}

impl SweepPoint {
    pub fn new(param: f64, spanning: usize, trials: usize) -> Self {
        let q = spanning as f64 / trials as f64;
        Self {
            param,
            spanning_prob: q,
            stderr: binomial_stderr(q, trials),
            trials,
        }
    }
}

/// Spanning probability against the control parameter for one lattice size.
#[derive(Clone, Debug, PartialEq)]
pub struct SweepCurve {
    pub model: PercolationModel,
    /// Lattice label, e.g. `hc` or the name of a custom spec.
    pub family: String,
    pub dimension: usize,
    pub side: usize,
    pub seed: u64,
    pub points: Vec<SweepPoint>,
    /// Per-trial critical values (coupled sweeps only); `INFINITY` marks
    /// trials that never span.
    pub critical_samples: Option<Vec<f64>>,
}

impl SweepCurve {
    /// A curve from already-measured points, e.g. synthetic or loaded data.
    pub fn from_points(side: usize, points: Vec<SweepPoint>) -> Self {
        Self {
            model: PercolationModel::Bond,
            family: String::new(),
            dimension: 0,
            side,
            seed: 0,
            points,
            critical_samples: None,
        }
    }

    /// Builds the curve of a coupled sweep from per-trial critical values.
    pub fn from_critical_samples(
        model: PercolationModel,
        family: impl Into<String>,
        dimension: usize,
        side: usize,
        seed: u64,
        grid: &[f64],
        samples: Vec<f64>,
    ) -> Result<Self> {
        check_grid(grid)?;
        if samples.is_empty() {
            return Err(Error::InvalidParameter("trials must be >= 1".into()));
        }
        let mut sorted = samples.clone();
        sorted.sort_by(f64::total_cmp);
        let points = grid
            .iter()
            .map(|&x| SweepPoint::new(x, sorted.partition_point(|&c| c <= x), sorted.len()))
            .collect();
        Ok(Self {
            model,
            family: family.into(),
            dimension,
            side,
            seed,
            points,
            critical_samples: Some(samples),
        })
    }

    pub fn params(&self) -> impl Iterator<Item = f64> + '_ {
        self.points.iter().map(|p| p.param)
    }

    /// Whether some point is below one half and some point is at or above it.
    pub fn brackets_half(&self) -> bool {
        self.points.iter().any(|p| p.spanning_prob < 0.5)
            && self.points.iter().any(|p| p.spanning_prob >= 0.5)
    }
}

pub(crate) fn check_grid(grid: &[f64]) -> Result<()> {
    if grid.is_empty() {
        return Err(Error::InvalidParameter("empty parameter grid".into()));
    }
    if grid.iter().any(|x| !(0.0..=1.0).contains(x)) {
        return Err(Error::InvalidParameter(
            "grid values must lie in [0, 1]".into(),
        ));
    }
    if grid.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::InvalidParameter(
            "grid must be strictly ascending".into(),
        ));
    }
    Ok(())
}

/// Whether the surviving graph connects the two faces orthogonal to `axis`.
pub fn spans(outcome: &SampleOutcome, lattice: &Lattice, faces: &[u8], uf: &mut UnionFind) -> bool {
    uf.reset(lattice.node_count());
    let mut flags = faces.to_vec();
    let edges = lattice.edges();
    for &i in outcome.surviving_edges() {
        let e = edges[i as usize];
        let (ra, rb) = (uf.find(e.a), uf.find(e.b));
        if ra == rb {
            continue;
        }
        let merged = flags[ra as usize] | flags[rb as usize];
        let root = uf.union(ra, rb).expect("distinct roots");
        flags[root as usize] = merged;
        if merged == 3 {
            return true;
        }
    }
    false
}

/// Estimates the spanning probability along `axis` at every grid value.
///
/// Results depend only on `seed`, never on the worker count.
#[allow(clippy::too_many_arguments)]
pub fn sweep(
    lattice: &Lattice,
    family: &str,
    model: &PercolationModel,
    grid: &[f64],
    trials: usize,
    seed: u64,
    method: SweepMethod,
    axis: usize,
) -> Result<SweepCurve> {
    check_grid(grid)?;
    model.validate()?;
    if trials == 0 {
        return Err(Error::InvalidParameter("trials must be >= 1".into()));
    }
    if axis >= lattice.dimension() {
        return Err(Error::InvalidParameter(format!("axis {axis} out of range")));
    }
    let streams = TrialStreams::new(seed);
    match method {
        SweepMethod::Coupled => {
            let samples = critical_values(lattice, model, trials, streams, axis);
            SweepCurve::from_critical_samples(
                *model,
                family,
                lattice.dimension(),
                lattice.side(),
                seed,
                grid,
                samples,
            )
        }
        SweepMethod::Independent => {
            let faces = lattice.face_flags(axis);
            let hits: Vec<bool> = (0..grid.len() * trials)
                .into_par_iter()
                .map_init(UnionFind::default, |uf, job| {
                    let (point, trial) = (job / trials, job % trials);
                    let mut rng = streams.derive(point as u64).trial(trial as u64);
                    let outcome = model.sample(lattice, grid[point], &mut rng)?;
                    Ok(spans(&outcome, lattice, &faces, uf))
                })
                .collect::<Result<_>>()?;
            let points = grid
                .iter()
                .zip(hits.chunks(trials))
                .map(|(&x, chunk)| SweepPoint::new(x, chunk.iter().filter(|&&h| h).count(), trials))
                .collect();
            Ok(SweepCurve {
                model: *model,
                family: family.to_string(),
                dimension: lattice.dimension(),
                side: lattice.side(),
                seed,
                points,
                critical_samples: None,
            })
        }
    }
}

#[derive(Serialize)]
struct CsvRow<'a> {
    model: String,
    family: &'a str,
    dim: usize,
    #[serde(rename = "L")]
    side: usize,
    param: f64,
    spanning_prob: f64,
    stderr: f64,
    trials: usize,
    seed: u64,
}

/// Writes curves as CSV, one row per grid point.
pub fn write_sweep_csv<W: Write>(curves: &[SweepCurve], out: W) -> Result<()> {
    let mut writer = csv::Writer::from_writer(out);
    for curve in curves {
        for p in &curve.points {
            writer.serialize(CsvRow {
                model: curve.model.to_string(),
                family: &curve.family,
                dim: curve.dimension,
                side: curve.side,
                param: p.param,
                spanning_prob: p.spanning_prob,
                stderr: p.stderr,
                trials: p.trials,
                seed: curve.seed,
            })?;
        }
    }
    writer.flush()?;
    Ok(())
}

/// `count` evenly spaced values from `start` to `stop` inclusive.
pub fn linear_grid(start: f64, stop: f64, count: usize) -> Vec<f64> {
    match count {
        0 => Vec::new(),
        1 => vec![start],
        _ => (0..count)
            .map(|i| start + (stop - start) * i as f64 / (count - 1) as f64)
            .collect(),
    }
}
