use serde::{Deserialize, Serialize};

/// Mean with a batch-means standard error, so autocorrelated
/// simulation output does not understate its own uncertainty.
#[derive(Debug, Clone)]
pub struct BatchMeans {
    batch_len: u64,
    batches: Vec<(f64, u64)>,
    seen: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MeanEstimate {
    pub mean: f64,
    pub stderr: f64,
    pub count: u64,
}

impl MeanEstimate {
    pub fn z_score(&self, value: f64) -> f64 {
        (self.mean - value).abs() / self.stderr
    }
}

impl BatchMeans {
    /// `expected` observations split into at most `batches` equal batches;
    /// any overflow lands in the last batch.
    pub fn new(expected: u64, batches: u64) -> Self {
        let count = batches.clamp(1, expected.max(1));
        Self {
            batch_len: (expected / count).max(1),
            batches: vec![(0.0, 0); count as usize],
            seen: 0,
        }
    }

    pub fn push(&mut self, x: f64) {
        let idx = ((self.seen / self.batch_len) as usize).min(self.batches.len() - 1);
        let b = &mut self.batches[idx];
        b.0 += x;
        b.1 += 1;
        self.seen += 1;
    }

    pub fn estimate(&self) -> MeanEstimate {
        let filled: Vec<f64> = self
            .batches
            .iter()
            .filter(|b| b.1 > 0)
            .map(|b| b.0 / b.1 as f64)
            .collect();
        let total: f64 = self.batches.iter().map(|b| b.0).sum();
        let mean = if self.seen > 0 {
            total / self.seen as f64
        } else {
            f64::NAN
        };
        let m = filled.len() as f64;
        let stderr = if filled.len() > 1 {
            let bm = filled.iter().sum::<f64>() / m;
            let var = filled.iter().map(|x| (x - bm).powi(2)).sum::<f64>() / (m - 1.0);
            (var / m).sqrt()
        } else {
            f64::NAN
        };
        MeanEstimate {
            mean,
            stderr,
            count: self.seen,
        }
    }
}
