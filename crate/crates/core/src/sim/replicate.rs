use rayon::prelude::*;

use super::ccdf::Exceedances;
use super::engine::{simulate, SimResult, SimSpec};
use crate::error::{Error, Result};
use crate::forkjoin::{CurveMetadata, DelayCurve};
use crate::rng::replication_seed;

#[derive(Debug, Clone)]
pub struct Replicated {
    pub runs: Vec<SimResult>,
    /// One pooled empirical curve per class, in class order.
    pub pooled: Vec<DelayCurve>,
}

/// Runs `replications` independent replications (in parallel) and pools
/// their per-class exceedance counts on `grid`.
///
/// Replication `r` runs with [`replication_seed`]`(base_seed, r)`, so the
/// output does not depend on scheduling.
pub fn replicate(
    spec: &SimSpec,
    replications: u32,
    base_seed: u64,
    grid: &[f64],
    z: f64,
) -> Result<Replicated> {
    if replications == 0 {
        return Err(Error::Config("need at least one replication".into()));
    }
    let runs: Vec<SimResult> = (0..replications)
        .into_par_iter()
        .map(|r| simulate(spec, replication_seed(base_seed, r as u64), r))
        .collect::<Result<_>>()?;

    let pooled = spec
        .classes
        .iter()
        .enumerate()
        .map(|(ci, class)| {
            let mut counts = Exceedances::new(grid)?;
            for run in &runs {
                counts.merge(&Exceedances::from_samples(&run.classes[ci].samples, grid)?)?;
            }
            let metadata = CurveMetadata {
                label: Some(class.name.clone()),
                arrival_rate: Some(class.arrival_rate),
                seed: Some(base_seed),
                replications: Some(replications),
                ..CurveMetadata::default()
            };
            counts.to_curve(z, metadata)
        })
        .collect::<Result<_>>()?;
    Ok(Replicated { runs, pooled })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sim::ccdf::empirical_ccdf;
    use crate::sim::model::{AllocationPolicy, FronthaulTopology, TrafficClass};

    fn mm1_spec(packets: u64) -> SimSpec {
        SimSpec {
            topology: FronthaulTopology::homogeneous(1, 2000.0),
            classes: vec![TrafficClass {
                name: "mm1".into(),
                packet_size_bits: 1.0,
                arrival_rate: 1000.0,
                n_alloc: 1,
                k: 1,
            }],
            policy: AllocationPolicy::NonOrthogonal,
            packets,
            warmup: packets / 10,
        }
    }

    #[test]
    fn single_replication_pools_to_itself() {
        let grid = [1e-4, 1e-3, 5e-3];
        let rep = replicate(&mm1_spec(20_000), 1, 9, &grid, 3.0).unwrap();
        let direct = empirical_ccdf(&rep.runs[0].classes[0].samples, &grid, 3.0).unwrap();
        assert_eq!(rep.pooled[0].points(), direct.points());
        assert_eq!(rep.runs[0].seed, replication_seed(9, 0));
    }

    #[test]
    fn repeated_campaign_is_identical() {
        let grid = [1e-4, 1e-3];
        let a = replicate(&mm1_spec(5_000), 2, 4, &grid, 3.0).unwrap();
        let b = replicate(&mm1_spec(5_000), 2, 4, &grid, 3.0).unwrap();
        assert_eq!(a.pooled, b.pooled);
        for (x, y) in a.runs.iter().zip(&b.runs) {
            assert_eq!(x.classes[0].samples, y.classes[0].samples);
        }
        assert_ne!(a.runs[0].classes[0].samples, a.runs[1].classes[0].samples);
    }

    #[test]
    fn zero_replications_rejected() {
        assert!(replicate(&mm1_spec(100), 0, 1, &[1.0], 3.0).is_err());
    }
}
