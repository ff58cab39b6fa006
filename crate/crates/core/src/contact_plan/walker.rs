//! Walker-delta constellation with +Grid inter-satellite links.

use alloc::format;
use alloc::vec::Vec;
use core::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{BandwidthSegment, Contact, ContactPlan, PlanError, SatId, DEFAULT_BUFFER_MB};
use crate::time::{ms, Micros};

const EARTH_RADIUS_KM: f64 = 6371.0;
const EARTH_MU_KM3_S2: f64 = 398_600.441_8;
const LIGHT_SPEED_KM_S: f64 = 299_792.458;
/// Inter-plane links are switched off above this latitude.
const INTER_PLANE_LAT_LIMIT_DEG: f64 = 45.0;
/// Sampling step for inter-plane link availability.
const VISIBILITY_STEP: Micros = ms(100);
/// Bandwidth segments follow this global grid.
const SEGMENT_LEN: Micros = ms(1000);

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DelayMode {
    /// Distance over the speed of light at contact start.
    Geometric,
    /// Uniform draw per contact, in milliseconds.
    Sampled { min_ms: f64, max_ms: f64 },
}

#[derive(Debug, Clone, PartialEq)]
pub struct WalkerConfig {
    pub planes: usize,
    pub sats_per_plane: usize,
    pub altitude_km: f64,
    pub inclination_deg: f64,
    pub horizon_ms: u64,
    pub bandwidth_mbps: (f64, f64),
    pub delay: DelayMode,
    pub buffer_mb: f64,
    pub seed: u64,
}

impl WalkerConfig {
    /// Starlink-like shell of the reference scenario: 12 x 14 satellites at
    /// 550 km / 53 deg, five minutes, 0.5-2 Gbps, 5-15 ms.
    pub fn reference(seed: u64) -> Self {
        Self {
            planes: 12,
            sats_per_plane: 14,
            altitude_km: 550.0,
            inclination_deg: 53.0,
            horizon_ms: 300_000,
            bandwidth_mbps: (500.0, 2000.0),
            delay: DelayMode::Sampled { min_ms: 5.0, max_ms: 15.0 },
            buffer_mb: DEFAULT_BUFFER_MB,
            seed,
        }
    }
}

struct Orbit {
    radius_km: f64,
    mean_motion: f64,
    inclination: f64,
}

impl Orbit {
    fn argument_of_latitude(&self, phase0: f64, t: Micros) -> f64 {
        phase0 + self.mean_motion * (t as f64 / 1e6)
    }

    fn latitude_deg(&self, phase0: f64, t: Micros) -> f64 {
        let u = self.argument_of_latitude(phase0, t);
        libm::asin(libm::sin(u) * libm::sin(self.inclination)) * 180.0 / PI
    }

    fn position(&self, raan: f64, phase0: f64, t: Micros) -> [f64; 3] {
        let u = self.argument_of_latitude(phase0, t);
        let (su, cu) = (libm::sin(u), libm::cos(u));
        let (so, co) = (libm::sin(raan), libm::cos(raan));
        let (si, ci) = (libm::sin(self.inclination), libm::cos(self.inclination));
        let r = self.radius_km;
        [r * (co * cu - so * su * ci), r * (so * cu + co * su * ci), r * su * si]
    }
}

pub fn generate_walker_constellation(cfg: &WalkerConfig) -> Result<ContactPlan, PlanError> {
    if cfg.planes == 0 || cfg.sats_per_plane == 0 {
        return Err(PlanError::InvalidArgument("planes and sats_per_plane must be positive"));
    }
    if cfg.horizon_ms == 0 {
        return Err(PlanError::InvalidArgument("horizon must be positive"));
    }
    if !(cfg.altitude_km > 0.0) {
        return Err(PlanError::InvalidArgument("altitude must be positive"));
    }
    let (bw_lo, bw_hi) = cfg.bandwidth_mbps;
    if !(bw_lo.is_finite() && bw_hi.is_finite() && bw_lo >= 0.0 && bw_lo <= bw_hi) {
        return Err(PlanError::InvalidArgument("empty or invalid bandwidth range"));
    }
    let delay_range_us = match cfg.delay {
        DelayMode::Sampled { min_ms, max_ms } => {
            if !(min_ms.is_finite() && max_ms.is_finite() && min_ms > 0.0 && min_ms <= max_ms) {
                return Err(PlanError::InvalidArgument("empty or invalid delay range"));
            }
            Some((libm::ceil(min_ms * 1e3) as Micros, libm::floor(max_ms * 1e3) as Micros))
        }
        DelayMode::Geometric => None,
    };
    if let Some((lo, hi)) = delay_range_us {
        if lo > hi {
            return Err(PlanError::InvalidArgument("delay range holds no whole microsecond"));
        }
    }

    let planes = cfg.planes;
    let per_plane = cfg.sats_per_plane;
    let n = planes * per_plane;
    if n < 2 {
        return Err(PlanError::TooFewNodes(n));
    }
    let horizon = ms(cfg.horizon_ms);
    let radius_km = EARTH_RADIUS_KM + cfg.altitude_km;
    let orbit = Orbit {
        radius_km,
        mean_motion: libm::sqrt(EARTH_MU_KM3_S2 / (radius_km * radius_km * radius_km)),
        inclination: cfg.inclination_deg * PI / 180.0,
    };
    let raan = |p: usize| 2.0 * PI * p as f64 / planes as f64;
    let phase = |p: usize, k: usize| {
        2.0 * PI * k as f64 / per_plane as f64 + 2.0 * PI * p as f64 / n as f64
    };
    let id = |p: usize, k: usize| -> SatId { p * per_plane + k };

    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut contacts = Vec::new();
    for p in 0..planes {
        for k in 0..per_plane {
            let from = id(p, k);
            let mut neigh: Vec<(SatId, bool)> = Vec::with_capacity(4);
            if per_plane > 1 {
                neigh.push((id(p, (k + 1) % per_plane), false));
                neigh.push((id(p, (k + per_plane - 1) % per_plane), false));
            }
            if planes > 1 {
                neigh.push((id((p + 1) % planes, k), true));
                neigh.push((id((p + planes - 1) % planes, k), true));
            }
            neigh.sort_unstable();
            neigh.dedup();
            for (to, inter_plane) in neigh {
                let (tp, tk) = (to / per_plane, to % per_plane);
                let windows = if inter_plane {
                    let visible = |t: Micros| {
                        libm::fabs(orbit.latitude_deg(phase(p, k), t)) <= INTER_PLANE_LAT_LIMIT_DEG
                            && libm::fabs(orbit.latitude_deg(phase(tp, tk), t))
                                <= INTER_PLANE_LAT_LIMIT_DEG
                    };
                    availability_windows(horizon, visible)
                } else {
                    alloc::vec![(0, horizon)]
                };
                for (t_start, t_end) in windows {
                    let delay = match delay_range_us {
                        Some((lo, hi)) => rng.gen_range(lo..=hi),
                        None => {
                            let a = orbit.position(raan(p), phase(p, k), t_start);
                            let b = orbit.position(raan(tp), phase(tp, tk), t_start);
                            let d = libm::sqrt((0..3).map(|i| (a[i] - b[i]) * (a[i] - b[i])).sum());
                            (libm::ceil(d / LIGHT_SPEED_KM_S * 1e6) as Micros).max(1)
                        }
                    };
                    let mut bandwidth = Vec::new();
                    let mut t = t_start;
                    while t < t_end {
                        let next = ((t / SEGMENT_LEN + 1) * SEGMENT_LEN).min(t_end);
                        let mbps = rng.gen_range(bw_lo..=bw_hi);
                        bandwidth.push(BandwidthSegment { t_from: t, t_to: next, mbps });
                        t = next;
                    }
                    contacts.push(Contact { from, to, t_start, t_end, delay, bandwidth });
                }
            }
        }
    }
    let nodes = (0..n).map(|i| format!("u{i}")).collect();
    ContactPlan::new(nodes, contacts, 0, horizon, cfg.buffer_mb)
}

/// Maximal runs of sampled visibility, each clipped to the horizon.
fn availability_windows(horizon: Micros, visible: impl Fn(Micros) -> bool) -> Vec<(Micros, Micros)> {
    let mut out = Vec::new();
    let mut open: Option<Micros> = None;
    let mut t = 0;
    while t < horizon {
        match (visible(t), open) {
            (true, None) => open = Some(t),
            (false, Some(s)) => {
                out.push((s, t));
                open = None;
            }
            _ => {}
        }
        t += VISIBILITY_STEP;
    }
    if let Some(s) = open {
        out.push((s, horizon));
    }
    out
}
