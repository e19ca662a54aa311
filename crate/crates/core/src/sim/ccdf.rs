use crate::error::{Error, Result};
use crate::forkjoin::{validate_grid, CurveKind, CurveMetadata, CurvePoint, DelayCurve};

/// Width of the reported confidence band in binomial standard errors.
pub const DEFAULT_Z: f64 = 3.0;

/// Counts of samples strictly above each grid latency. Mergeable across runs.
#[derive(Debug, Clone, PartialEq)]
pub struct Exceedances {
    grid: Vec<f64>,
    exceed: Vec<u64>,
    total: u64,
}

impl Exceedances {
    pub fn new(grid: &[f64]) -> Result<Self> {
        validate_grid(grid)?;
        Ok(Self {
            grid: grid.to_vec(),
            exceed: vec![0; grid.len()],
            total: 0,
        })
    }

    pub fn from_samples(samples: &[f64], grid: &[f64]) -> Result<Self> {
        let mut out = Self::new(grid)?;
        // hist[i]: samples above grid[..i] and at or below grid[i]
        let mut hist = vec![0u64; grid.len() + 1];
        for &s in samples {
            hist[grid.partition_point(|&t| t < s)] += 1;
        }
        let mut above = 0;
        for i in (0..grid.len()).rev() {
            above += hist[i + 1];
            out.exceed[i] = above;
        }
        out.total = samples.len() as u64;
        Ok(out)
    }

    pub fn merge(&mut self, other: &Exceedances) -> Result<()> {
        if self.grid != other.grid {
            return Err(Error::invalid(
                "cannot merge exceedance counts on different grids",
            ));
        }
        for (a, b) in self.exceed.iter_mut().zip(&other.exceed) {
            *a += b;
        }
        self.total += other.total;
        Ok(())
    }

    pub fn total(&self) -> u64 {
        self.total
    }

    pub fn to_curve(&self, z: f64, mut metadata: CurveMetadata) -> Result<DelayCurve> {
        if self.total == 0 {
            return Err(Error::EmptySamples);
        }
        let m = self.total as f64;
        let points = self
            .grid
            .iter()
            .zip(&self.exceed)
            .map(|(&tau, &c)| {
                let p = c as f64 / m;
                CurvePoint {
                    tau,
                    tail: p,
                    ci_half_width: Some(z * (p * (1.0 - p) / m).sqrt()),
                }
            })
            .collect();
        metadata.sample_count = Some(self.total);
        metadata.z = Some(z);
        DelayCurve::new(CurveKind::Empirical, points, metadata)
    }
}

/// Fraction of samples above each grid latency, with a `z`-sigma binomial band.
pub fn empirical_ccdf(samples: &[f64], grid: &[f64], z: f64) -> Result<DelayCurve> {
    if samples.is_empty() {
        return Err(Error::EmptySamples);
    }
    Exceedances::from_samples(samples, grid)?.to_curve(z, CurveMetadata::default())
}
