//! Small statistics helpers shared by the Monte Carlo drivers.

use serde::Serialize;

/// Binomial standard error `sqrt(q(1-q)/n)`.
pub fn binomial_stderr(q: f64, trials: usize) -> f64 {
    if trials == 0 {
        return f64::NAN;
    }
    (q * (1.0 - q) / trials as f64).sqrt()
}

/// Running sums; merging two accumulators is commutative and associative.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct MeanAccumulator {
    pub count: usize,
    pub sum: f64,
    pub sum_sq: f64,
}

impl MeanAccumulator {
    pub fn push(&mut self, x: f64) {
        self.count += 1;
        self.sum += x;
        self.sum_sq += x * x;
    }

    pub fn merge(self, other: Self) -> Self {
        Self {
            count: self.count + other.count,
            sum: self.sum + other.sum,
            sum_sq: self.sum_sq + other.sum_sq,
        }
    }

    pub fn estimate(&self) -> MeanEstimate {
        let n = self.count as f64;
        let mean = self.sum / n;
        let var = if self.count > 1 {
            ((self.sum_sq - n * mean * mean) / (n - 1.0)).max(0.0)
        } else {
            0.0
        };
        MeanEstimate {
            mean,
            std_dev: var.sqrt(),
            stderr: (var / n).sqrt(),
            trials: self.count,
        }
    }
}

impl FromIterator<f64> for MeanAccumulator {
    fn from_iter<I: IntoIterator<Item = f64>>(iter: I) -> Self {
        let mut acc = Self::default();
        for x in iter {
            acc.push(x);
        }
        acc
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct MeanEstimate {
    pub mean: f64,
    pub std_dev: f64,
    pub stderr: f64,
    pub trials: usize,
}
