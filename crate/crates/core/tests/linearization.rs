use detroute_core::ilp::{chi_rows, cycle_relation_holds, floor_rows, product_rows};

const TAU_US: u64 = 5_000;

#[test]
fn chi_rows_select_the_indicator() {
    for cycles in 2..=5u32 {
        for g2 in 1..=cycles {
            for h in 1..=cycles {
                let feasible: Vec<u32> = (0..=1)
                    .filter(|&c| chi_rows(h, cycles, 0.5).iter().all(|t| t.holds([g2 as f64, c as f64, 1.0])))
                    .collect();
                assert_eq!(feasible, vec![(h + 1 <= g2) as u32], "H={cycles} g2={g2} h={h}");
            }
        }
    }
}

#[test]
fn product_rows_select_the_product() {
    for chi in 0..=1 {
        for x in 0..=1 {
            let feasible: Vec<i32> = (0..=1)
                .filter(|&xt| product_rows().iter().all(|t| t.holds([chi as f64, x as f64, xt as f64])))
                .collect();
            assert_eq!(feasible, vec![chi * x]);
        }
    }
}

fn samples(span_us: u64) -> Vec<u64> {
    let mut s: Vec<u64> = (0..=span_us).step_by(250).collect();
    for k in 1..=span_us / TAU_US {
        s.extend([k * TAU_US - 1, k * TAU_US, k * TAU_US + 1]);
    }
    s.retain(|&v| v <= span_us);
    s
}

#[test]
fn floor_rows_encode_the_cycle_relation() {
    for cycles in 2..=5u32 {
        let bound_us = cycles as u64 * TAU_US;
        let rows = floor_rows(cycles, TAU_US as f64 / 1e3, bound_us as f64 / 1e3);
        for s in samples(bound_us) {
            for g1 in 0..=cycles as i64 {
                for g2 in 0..=cycles as i64 {
                    let some_delta = (0..=1)
                        .any(|d| rows.iter().all(|t| t.holds([s as f64 / 1e3, g2 as f64, g1 as f64, d as f64])));
                    assert_eq!(
                        some_delta,
                        cycle_relation_holds(s, TAU_US, g1, g2),
                        "H={cycles} S={s}us g1={g1} g2={g2}"
                    );
                }
            }
        }
    }
}
