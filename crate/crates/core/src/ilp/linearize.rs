//! Scalar row templates shared by the model builder and the truth tables.
//!
//! Each template is `Σ coef[i] * slot[i]  (sense)  rhs` over a fixed slot
//! order; the builder expands each slot into a linear expression.

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sense {
    Le,
    Ge,
    Eq,
}

impl Sense {
    pub fn as_lp(&self) -> &'static str {
        match self {
            Sense::Le => "<=",
            Sense::Ge => ">=",
            Sense::Eq => "=",
        }
    }
}

/// Feasibility slack used when evaluating rows on rounded assignments.
pub const ROW_TOL: f64 = 1e-6;

/// Strictness margin for `S < |τ| g2` (ms); sums of whole-µs latencies
/// are never closer than this.
pub const FLOOR_MARGIN_MS: f64 = 1e-3;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Template<const K: usize> {
    pub coef: [f64; K],
    pub sense: Sense,
    pub rhs: f64,
}

impl<const K: usize> Template<K> {
    pub fn lhs(&self, vals: [f64; K]) -> f64 {
        self.coef.iter().zip(vals).map(|(c, v)| c * v).sum()
    }

    pub fn holds(&self, vals: [f64; K]) -> bool {
        holds(self.lhs(vals), self.sense, self.rhs)
    }
}

pub fn holds(lhs: f64, sense: Sense, rhs: f64) -> bool {
    match sense {
        Sense::Le => lhs <= rhs + ROW_TOL,
        Sense::Ge => lhs >= rhs - ROW_TOL,
        Sense::Eq => (lhs - rhs).abs() <= ROW_TOL,
    }
}

/// Slots `[g2, chi, active]`; `active` is the number of edges leaving the
/// satellite, so an unused satellite (`g2 = 0`) leaves `chi` unconstrained
/// at `h = H`.
pub fn chi_rows(h: u32, cycles: u32, eps: f64) -> [Template<3>; 2] {
    let (h, n) = (h as f64, cycles as f64);
    [
        // h - g2 >= (2-H) chi + eps (1-chi) - 1
        Template { coef: [-1.0, n - 2.0 + eps, 0.0], sense: Sense::Ge, rhs: eps - 1.0 - h },
        // h - g2 <= (H-1)(1-chi) - eps chi + H (1 - active)
        Template { coef: [-1.0, n - 1.0 + eps, n], sense: Sense::Le, rhs: 2.0 * n - 1.0 - h },
    ]
}

/// Slots `[chi, x, xt]`: `xt = chi * x`.
pub fn product_rows() -> [Template<3>; 3] {
    [
        Template { coef: [1.0, 1.0, -1.0], sense: Sense::Le, rhs: 1.0 },
        Template { coef: [-1.0, 0.0, 1.0], sense: Sense::Le, rhs: 0.0 },
        Template { coef: [0.0, -1.0, 1.0], sense: Sense::Le, rhs: 0.0 },
    ]
}

/// Slots `[S, g2, g1, delta]` with `S` in ms. `delta = 0` selects
/// `floor(S/|τ|) = g2 - 1`; `delta = 1` selects `g2 = g1`.
pub fn floor_rows(cycles: u32, tau_ms: f64, bound_ms: f64) -> [Template<4>; 4] {
    let n = cycles as f64;
    [
        Template { coef: [1.0, -tau_ms, 0.0, n * tau_ms], sense: Sense::Ge, rhs: -tau_ms },
        Template { coef: [1.0, -tau_ms, 0.0, -(bound_ms + tau_ms)], sense: Sense::Le, rhs: -FLOOR_MARGIN_MS },
        Template { coef: [0.0, 1.0, -1.0, n], sense: Sense::Le, rhs: n },
        Template { coef: [0.0, 1.0, -1.0, -n], sense: Sense::Ge, rhs: -n },
    ]
}

/// The cycle relation the floor rows encode, on exact integers:
/// `(cycle(S) - g2) * (g2 - g1) = 0` with `cycle(S) = floor(S/|τ|) + 1`.
pub fn cycle_relation_holds(s_us: u64, tau_us: u64, g1: i64, g2: i64) -> bool {
    let c = (s_us / tau_us) as i64 + 1;
    (c - g2) * (g2 - g1) == 0
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn chi_truth_table() {
        for cycles in 2..=5u32 {
            for g2 in 1..=cycles {
                for h in 1..=cycles {
                    let ok: alloc::vec::Vec<u8> = [0u8, 1]
                        .into_iter()
                        .filter(|&c| chi_rows(h, cycles, 0.5).iter().all(|t| t.holds([g2 as f64, c as f64, 1.0])))
                        .collect();
                    assert_eq!(ok, [(h + 1 <= g2) as u8]);
                }
            }
        }
    }

    #[test]
    fn unused_satellite_is_feasible() {
        for h in 1..=4 {
            assert!(chi_rows(h, 4, 0.5).iter().all(|t| t.holds([0.0, 0.0, 0.0])));
        }
    }

    #[test]
    fn product_truth_table() {
        for chi in 0..2 {
            for x in 0..2 {
                let ok: alloc::vec::Vec<i32> = (0..2)
                    .filter(|&xt| product_rows().iter().all(|t| t.holds([chi as f64, x as f64, xt as f64])))
                    .collect();
                assert_eq!(ok, [chi * x]);
            }
        }
    }
}
