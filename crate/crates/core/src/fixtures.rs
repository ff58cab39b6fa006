//! Small reference graphs and random instances for tests and demos.

use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::contact_plan::{BandwidthSegment, Contact, ContactPlan};
use crate::eteg::{CycleGrid, Eteg, EtegBuilder};
use crate::time::{ms, Micros};
use crate::traffic::TrafficDemand;

/// Four satellites, three 5 ms cycles, `u0 -> u3`, `A_f = 4` Mb, `B_f = 15` ms.
/// The storage edge out of `u0^1` cannot carry the packet.
pub fn fig2_eteg() -> (Eteg, TrafficDemand) {
    let f = TrafficDemand::new(0, 0, 3, 0, ms(15), 4.0, ms(15)).expect("valid demand");
    let grid = CycleGrid::new(ms(5), 0, ms(15)).expect("valid grid");
    let mut b = EtegBuilder::new(4, grid, f).expect("valid builder");
    b.transmission(0, 1, 1, 10.0, ms(3)).unwrap();
    b.transmission(0, 2, 1, 10.0, ms(6)).unwrap();
    b.storage(0, 1, 1.0).unwrap();
    b.transmission(1, 2, 1, 10.0, ms(9)).unwrap();
    b.storage(2, 2, 10.0).unwrap();
    b.transmission(2, 3, 3, 10.0, ms(2)).unwrap();
    for h in 1..=3 {
        b.aggregation(h).unwrap();
    }
    (b.build(), f)
}

/// A contact plan whose ETEG reproduces [`fig2_eteg`]'s routing, with link
/// volumes and buffers equal to `A_f` on the optimal path. `u0`'s buffer in
/// the first cycle must be pre-reserved by 1 Mb to block its storage edge.
pub fn fig2_plan() -> ContactPlan {
    let c = |from, to, t0: u64, t1: u64, delay: u64| Contact {
        from,
        to,
        t_start: ms(t0),
        t_end: ms(t1),
        delay: ms(delay),
        bandwidth: vec![BandwidthSegment { t_from: ms(t0), t_to: ms(t1), mbps: 800.0 }],
    };
    let nodes = (0..4).map(|i| alloc::format!("u{i}")).collect();
    let contacts = vec![c(0, 1, 0, 5, 3), c(0, 2, 0, 5, 6), c(1, 2, 0, 5, 9), c(2, 3, 10, 15, 2)];
    ContactPlan::new(nodes, contacts, 0, ms(15), 4.0).expect("valid plan")
}

/// `u0` sends at the start of the first cycle, the packet reaches `u1` at
/// 6 ms (second cycle), waits there, and leaves for `u3` in the third.
pub fn remark1_eteg() -> (Eteg, TrafficDemand) {
    let f = TrafficDemand::new(1, 0, 3, 0, ms(15), 2.0, ms(15)).expect("valid demand");
    let grid = CycleGrid::new(ms(5), 0, ms(15)).expect("valid grid");
    let mut b = EtegBuilder::new(4, grid, f).expect("valid builder");
    b.transmission(0, 1, 1, 10.0, ms(6)).unwrap();
    b.storage(1, 2, 10.0).unwrap();
    b.transmission(1, 3, 3, 10.0, ms(2)).unwrap();
    b.transmission(0, 2, 1, 10.0, ms(4)).unwrap();
    b.transmission(2, 3, 1, 1.0, ms(1)).unwrap();
    for h in 1..=3 {
        b.aggregation(h).unwrap();
    }
    (b.build(), f)
}

/// One transmission edge `u0^1 -> u1^1` (4 ms) and its aggregation edge.
pub fn one_hop_eteg() -> (Eteg, TrafficDemand) {
    let f = TrafficDemand::new(2, 0, 1, 0, ms(10), 1.0, ms(10)).expect("valid demand");
    let grid = CycleGrid::new(ms(10), 0, ms(10)).expect("valid grid");
    let mut b = EtegBuilder::new(2, grid, f).expect("valid builder");
    b.transmission(0, 1, 1, 10.0, ms(4)).unwrap();
    b.aggregation(1).unwrap();
    (b.build(), f)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RandomEtegConfig {
    pub max_sats: usize,
    pub max_cycles: u32,
    pub cycle_len: Micros,
    /// Probability a directed link exists in a given cycle.
    pub link_prob: f64,
    /// Latency range in µs.
    pub latency: (Micros, Micros),
    pub capacity_max: f64,
    pub size_max: f64,
}

impl Default for RandomEtegConfig {
    fn default() -> Self {
        Self {
            max_sats: 6,
            max_cycles: 6,
            cycle_len: ms(5),
            link_prob: 0.35,
            latency: (ms(1) / 2, ms(12)),
            capacity_max: 10.0,
            size_max: 8.0,
        }
    }
}

/// Random small ETEG with random capacities, latencies and demand.
pub fn random_eteg(cfg: &RandomEtegConfig, seed: u64) -> (Eteg, TrafficDemand) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = rng.gen_range(2..=cfg.max_sats);
    let h = rng.gen_range(1..=cfg.max_cycles);
    let period = h as Micros * cfg.cycle_len;
    let source = rng.gen_range(0..n);
    let mut sink = rng.gen_range(0..n - 1);
    if sink >= source {
        sink += 1;
    }
    let size = rng.gen_range(0.5..=cfg.size_max);
    let bound = rng.gen_range(cfg.cycle_len / 2..=period);
    let f = TrafficDemand::new(seed as u32, source, sink, 0, period, size, bound).expect("valid demand");
    let grid = CycleGrid::new(cfg.cycle_len, 0, period).expect("valid grid");
    let mut b = EtegBuilder::new(n, grid, f).expect("valid builder");
    for c in 1..=h {
        for i in 0..n {
            for j in 0..n {
                if i != j && rng.gen_bool(cfg.link_prob) {
                    let cap = rng.gen_range(0.0..=cfg.capacity_max);
                    let lat = rng.gen_range(cfg.latency.0..=cfg.latency.1);
                    b.transmission(i, j, c, cap, lat).unwrap();
                }
            }
        }
        if c < h {
            for i in 0..n {
                let cap = rng.gen_range(0.0..=cfg.capacity_max);
                b.storage(i, c, cap).unwrap();
            }
        }
    }
    for c in 1..=grid.aggregation_limit(bound) {
        b.aggregation(c).unwrap();
    }
    (b.build(), f)
}

/// Node names `u0..u{n-1}`.
pub fn node_names(n: usize) -> Vec<String> {
    (0..n).map(|i| alloc::format!("u{i}")).collect()
}
