//! Event loop of the coded multi-path fronthaul.
//!
//! Packet arrivals of every class sit in one event queue ordered by
//! `(time, sequence number)`. Processing an arrival forks the packet into
//! `n_alloc` blocks, one per path queue. Each queue is a work-conserving
//! FIFO single server, so a block's departure follows from the Lindley
//! recursion `start = max(arrival, previous departure)` at enqueue time and
//! needs no event of its own. The packet is delivered at its `k`-th block
//! departure; the other blocks keep their servers busy (no purging).

use std::cmp::Ordering;
use std::collections::{BinaryHeap, VecDeque};

use serde::{Deserialize, Serialize};

use super::model::{plan_resources, AllocationPolicy, FronthaulTopology, TrafficClass};
use super::stats::{BatchMeans, MeanEstimate};
use crate::error::{Error, Result};
use crate::rng::{exponential, stream_rng, StreamRng};

/// Batches used for the batch-means error of per-class means.
const MEAN_BATCHES: u64 = 100;

/// Stream ids: class `c` draws arrivals from `c << 32` and the service
/// times of its blocks on path `p` from `(c << 32) + 1 + p`.
fn arrival_stream(class: usize) -> u64 {
    (class as u64) << 32
}

fn service_stream(class: usize, path: usize) -> u64 {
    ((class as u64) << 32) + 1 + path as u64
}

/// Everything a single replication needs except its seed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimSpec {
    pub topology: FronthaulTopology,
    pub classes: Vec<TrafficClass>,
    pub policy: AllocationPolicy,
    /// Packets generated per class.
    pub packets: u64,
    /// Leading packets per class excluded from the statistics.
    pub warmup: u64,
}

impl SimSpec {
    /// Warm-up used when none is configured: the first 10% of packets.
    pub fn default_warmup(packets: u64) -> u64 {
        packets / 10
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassOutcome {
    pub name: String,
    /// Packet delays in arrival order, warm-up excluded.
    #[serde(skip)]
    pub samples: Vec<f64>,
    pub delay: MeanEstimate,
    /// Blocks found in the queue (waiting or in service) by this class's
    /// blocks on arrival, averaged over the packet's paths.
    pub in_system_at_arrival: MeanEstimate,
    pub packets_generated: u64,
    pub blocks_enqueued: u64,
    /// Packets whose delivery instant did not see exactly `k` finished blocks.
    pub completion_mismatches: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QueueStats {
    pub blocks: u64,
    pub busy_time: f64,
    pub last_departure: f64,
    /// Blocks that started service before an earlier-enqueued block.
    pub fifo_violations: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimResult {
    pub seed: u64,
    pub replication: u32,
    pub packets: u64,
    pub warmup: u64,
    /// Time of the last processed arrival.
    pub horizon: f64,
    pub classes: Vec<ClassOutcome>,
    pub queues: Vec<QueueStats>,
}

#[derive(Debug, Clone, Copy)]
struct Arrival {
    time: f64,
    seq: u64,
    class: usize,
}

impl PartialEq for Arrival {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Arrival {}

impl PartialOrd for Arrival {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Arrival {
    // reversed: BinaryHeap is a max-heap
    fn cmp(&self, other: &Self) -> Ordering {
        other
            .time
            .total_cmp(&self.time)
            .then_with(|| other.seq.cmp(&self.seq))
    }
}

#[derive(Debug, Default)]
struct QueueState {
    last_start: f64,
    last_departure: f64,
    busy_time: f64,
    blocks: u64,
    fifo_violations: u64,
    /// Departure times of blocks still in the system, oldest first.
    in_system: VecDeque<f64>,
}

impl QueueState {
    /// Enqueues a block at `now`; returns (departure, blocks found in system).
    fn enqueue(&mut self, now: f64, service: f64) -> (f64, usize) {
        while self.in_system.front().is_some_and(|&d| d <= now) {
            self.in_system.pop_front();
        }
        let found = self.in_system.len();
        let start = now.max(self.last_departure);
        if start < self.last_start {
            self.fifo_violations += 1;
        }
        let departure = start + service;
        self.last_start = start;
        self.last_departure = departure;
        self.busy_time += service;
        self.blocks += 1;
        self.in_system.push_back(departure);
        (departure, found)
    }
}

struct ClassRun {
    arrivals: StreamRng,
    services: Vec<StreamRng>,
    generated: u64,
    delays: Vec<f64>,
    delay_stats: BatchMeans,
    found_stats: BatchMeans,
    blocks: u64,
    mismatches: u64,
}

/// Runs one replication of `spec` with the given seed.
pub fn simulate(spec: &SimSpec, seed: u64, replication: u32) -> Result<SimResult> {
    if spec.packets == 0 || spec.warmup >= spec.packets {
        return Err(Error::Config(format!(
            "need packets > warmup >= 0, got packets={} warmup={}",
            spec.packets, spec.warmup
        )));
    }
    let plan = plan_resources(&spec.topology, &spec.classes, &spec.policy)?;
    let recorded = spec.packets - spec.warmup;

    let mut queues: Vec<QueueState> = (0..plan.n_queues).map(|_| QueueState::default()).collect();
    let mut runs: Vec<ClassRun> = spec
        .classes
        .iter()
        .enumerate()
        .map(|(ci, _)| ClassRun {
            arrivals: stream_rng(seed, arrival_stream(ci)),
            services: plan.classes[ci]
                .paths
                .iter()
                .map(|&p| stream_rng(seed, service_stream(ci, p)))
                .collect(),
            generated: 0,
            delays: Vec::with_capacity(recorded as usize),
            delay_stats: BatchMeans::new(recorded, MEAN_BATCHES),
            found_stats: BatchMeans::new(recorded, MEAN_BATCHES),
            blocks: 0,
            mismatches: 0,
        })
        .collect();

    let mut events = BinaryHeap::with_capacity(spec.classes.len());
    let mut seq = 0u64;
    for (ci, c) in spec.classes.iter().enumerate() {
        let time = exponential(&mut runs[ci].arrivals, c.arrival_rate);
        events.push(Arrival {
            time,
            seq,
            class: ci,
        });
        seq += 1;
    }

    let max_alloc = spec.classes.iter().map(|c| c.n_alloc).max().unwrap_or(1);
    let mut block_delays = vec![0.0; max_alloc];
    let mut unfinished = spec.classes.len();
    let mut horizon = 0.0;

    // Classes that reach their packet count keep generating load until
    // every class has, so no class is measured against a thinning mix.
    while unfinished > 0 {
        let Some(ev) = events.pop() else { break };
        let now = ev.time;
        horizon = now;
        let class = &spec.classes[ev.class];
        let cplan = &plan.classes[ev.class];
        let run = &mut runs[ev.class];

        let delays = &mut block_delays[..class.n_alloc];
        let mut found_total = 0usize;
        for (b, slot) in delays.iter_mut().enumerate() {
            let service = exponential(&mut run.services[b], cplan.block_service_rate[b]);
            let (departure, found) = queues[cplan.queues[b]].enqueue(now, service);
            *slot = departure - now;
            found_total += found;
        }
        run.blocks += class.n_alloc as u64;
        let (_, kth, _) = delays.select_nth_unstable_by(class.k - 1, f64::total_cmp);
        let delay = *kth;
        let done = delays.iter().filter(|&&d| d <= delay).count();
        if done != class.k {
            run.mismatches += 1;
        }

        let index = run.generated;
        run.generated += 1;
        if index >= spec.warmup && index < spec.packets {
            run.delays.push(delay);
            run.delay_stats.push(delay);
            run.found_stats
                .push(found_total as f64 / class.n_alloc as f64);
        }
        if run.generated == spec.packets {
            unfinished -= 1;
        }
        let next = now + exponential(&mut run.arrivals, class.arrival_rate);
        events.push(Arrival {
            time: next,
            seq,
            class: ev.class,
        });
        seq += 1;
    }

    let classes = spec
        .classes
        .iter()
        .zip(runs)
        .map(|(c, r)| ClassOutcome {
            name: c.name.clone(),
            delay: r.delay_stats.estimate(),
            in_system_at_arrival: r.found_stats.estimate(),
            samples: r.delays,
            packets_generated: r.generated,
            blocks_enqueued: r.blocks,
            completion_mismatches: r.mismatches,
        })
        .collect();
    let queues = queues
        .into_iter()
        .map(|q| QueueStats {
            blocks: q.blocks,
            busy_time: q.busy_time,
            last_departure: q.last_departure,
            fifo_violations: q.fifo_violations,
        })
        .collect();
    Ok(SimResult {
        seed,
        replication,
        packets: spec.packets,
        warmup: spec.warmup,
        horizon,
        classes,
        queues,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Class whose blocks are served at `service_rate` on unit-capacity paths.
    fn single(rate: f64, service_rate: f64, n: usize, k: usize) -> TrafficClass {
        TrafficClass {
            name: "c".into(),
            packet_size_bits: k as f64 / service_rate,
            arrival_rate: rate,
            n_alloc: n,
            k,
        }
    }

    fn spec(
        classes: Vec<TrafficClass>,
        n_paths: usize,
        policy: AllocationPolicy,
        packets: u64,
    ) -> SimSpec {
        SimSpec {
            topology: FronthaulTopology::homogeneous(n_paths, 1.0),
            classes,
            policy,
            packets,
            warmup: packets / 10,
        }
    }

    #[test]
    fn mm1_mean_sojourn() {
        let s = spec(
            vec![single(1000.0, 2000.0, 1, 1)],
            1,
            AllocationPolicy::NonOrthogonal,
            400_000,
        );
        let r = simulate(&s, 3, 0).unwrap();
        let c = &r.classes[0];
        assert_eq!(c.samples.len() as u64, s.packets - s.warmup);
        assert!(c.delay.z_score(1e-3) < 4.0, "{:?}", c.delay);
        assert!(
            c.in_system_at_arrival.z_score(1.0) < 4.0,
            "{:?}",
            c.in_system_at_arrival
        );
    }

    #[test]
    fn deterministic_and_seed_sensitive() {
        let s = spec(
            vec![single(1.5, 2.0, 4, 2)],
            4,
            AllocationPolicy::NonOrthogonal,
            5_000,
        );
        let a = simulate(&s, 11, 0).unwrap();
        let b = simulate(&s, 11, 0).unwrap();
        let c = simulate(&s, 12, 0).unwrap();
        assert_eq!(a.classes[0].samples, b.classes[0].samples);
        assert_ne!(a.classes[0].samples, c.classes[0].samples);
    }

    #[test]
    fn conservation_and_fifo() {
        let classes = vec![
            TrafficClass {
                name: "u".into(),
                ..single(2.0, 4.0, 4, 2)
            },
            TrafficClass {
                name: "e".into(),
                ..single(1.0, 3.0, 3, 3)
            },
        ];
        let s = spec(classes, 5, AllocationPolicy::NonOrthogonal, 20_000);
        let r = simulate(&s, 5, 0).unwrap();
        for (c, class) in r.classes.iter().zip(&s.classes) {
            assert_eq!(c.samples.len() as u64, s.packets - s.warmup);
            assert!(c.packets_generated >= s.packets);
            assert_eq!(
                c.blocks_enqueued,
                c.packets_generated * class.n_alloc as u64
            );
            assert_eq!(c.completion_mismatches, 0);
        }
        let total_blocks: u64 = r.queues.iter().map(|q| q.blocks).sum();
        let enqueued: u64 = r.classes.iter().map(|c| c.blocks_enqueued).sum();
        assert_eq!(total_blocks, enqueued);
        assert!(r.queues.iter().all(|q| q.fifo_violations == 0));
        // path 4 is used by neither class (n_alloc 4 and 3 take paths 0..4)
        assert_eq!(r.queues[4].blocks, 0);
    }

    #[test]
    fn non_purging_keeps_servers_busy() {
        // (4, 1): each path serves every block, so utilization stays λ/μ
        // even though packets finish at the first block.
        let (lambda, mu) = (600.0, 1000.0);
        let s = spec(
            vec![single(lambda, mu, 4, 1)],
            4,
            AllocationPolicy::NonOrthogonal,
            200_000,
        );
        let r = simulate(&s, 8, 0).unwrap();
        for q in &r.queues {
            let util = q.busy_time / q.last_departure;
            assert!((util - lambda / mu).abs() < 0.01, "utilization {util}");
        }
        let mean_first = r.classes[0].delay.mean;
        assert!(mean_first < 1.0 / (mu - lambda));
    }

    #[test]
    fn rejects_bad_runs() {
        let mut s = spec(
            vec![single(3.0, 2.0, 1, 1)],
            1,
            AllocationPolicy::NonOrthogonal,
            100,
        );
        assert!(matches!(simulate(&s, 1, 0), Err(Error::Unstable { .. })));
        s.classes[0].arrival_rate = 1.0;
        s.warmup = 100;
        assert!(matches!(simulate(&s, 1, 0), Err(Error::Config(_))));
    }
}
