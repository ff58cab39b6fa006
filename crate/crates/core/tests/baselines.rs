use detroute_core::baselines::{cgr_route, derive_snapshots, ospf_route, spr_route, Rejection};
use detroute_core::contact_plan::{generate_walker_constellation, WalkerConfig};
use detroute_core::fixtures::node_names;
use detroute_core::route::RoutingContext;
use detroute_core::time::ms;
use detroute_core::traffic::{generate_demands, DemandConfig};
use detroute_core::{BandwidthSegment, Contact, ContactPlan, ResourceLedger, Strategy, TrafficDemand};
use proptest::prelude::*;

fn contact(from: usize, to: usize, a: u64, b: u64, delay: u64) -> Contact {
    Contact {
        from,
        to,
        t_start: ms(a),
        t_end: ms(b),
        delay: ms(delay),
        bandwidth: vec![BandwidthSegment { t_from: ms(a), t_to: ms(b), mbps: 1000.0 }],
    }
}

fn demand(src: usize, dst: usize, size: f64, bound: u64) -> TrafficDemand {
    TrafficDemand::new(0, src, dst, 0, ms(100), size, ms(bound)).unwrap()
}

fn triangle() -> ContactPlan {
    let cs = vec![contact(0, 2, 0, 1000, 15), contact(0, 1, 0, 1000, 4), contact(1, 2, 0, 1000, 4)];
    ContactPlan::new(node_names(3), cs, 0, ms(1000), 100.0).unwrap()
}

fn eval(plan: &ContactPlan, s: Strategy, f: &TrafficDemand) -> Option<u64> {
    let ctx = RoutingContext::new(plan, ms(10));
    let ledger = ResourceLedger::new(plan, ms(10)).unwrap();
    ctx.evaluate(s, &ledger, f).unwrap().map(|a| a.delay)
}

#[test]
fn min_hop_differs_from_min_delay() {
    let plan = triangle();
    let f = demand(0, 2, 2.0, 50);
    assert_eq!(eval(&plan, Strategy::Ospf, &f), Some(ms(15)));
    assert_eq!(eval(&plan, Strategy::Detr, &f), Some(ms(8)));
    assert_eq!(eval(&plan, Strategy::Spr, &f), Some(ms(8)));
    assert_eq!(eval(&plan, Strategy::Cgr, &f), Some(ms(8)));
}

#[test]
fn static_plan_agrees_everywhere() {
    let cs = vec![contact(0, 1, 0, 1000, 5), contact(1, 2, 0, 1000, 5)];
    let plan = ContactPlan::new(node_names(3), cs, 0, ms(1000), 100.0).unwrap();
    let f = demand(0, 2, 2.0, 50);
    for s in [Strategy::Detr, Strategy::Ospf, Strategy::Spr, Strategy::Cgr] {
        assert_eq!(eval(&plan, s, &f), Some(ms(10)), "{s}");
    }
}

fn store_and_forward(buffer_mb: f64) -> ContactPlan {
    let cs = vec![contact(0, 1, 0, 50, 5), contact(1, 2, 60, 200, 5)];
    ContactPlan::new(node_names(3), cs, 0, ms(200), buffer_mb).unwrap()
}

#[test]
fn waiting_at_a_relay() {
    let plan = store_and_forward(100.0);
    let f = demand(0, 2, 2.0, 100);
    assert_eq!(eval(&plan, Strategy::Detr, &f), Some(ms(70)));
    assert_eq!(eval(&plan, Strategy::Cgr, &f), Some(ms(65)));
    assert_eq!(eval(&plan, Strategy::Ospf, &f), None);
    assert_eq!(eval(&plan, Strategy::Spr, &f), None);
}

#[test]
fn relay_buffer_too_small() {
    let plan = store_and_forward(1.0);
    let f = demand(0, 2, 2.0, 100);
    assert_eq!(eval(&plan, Strategy::Detr, &f), None);
    let ledger = ResourceLedger::new(&plan, ms(10)).unwrap();
    assert_eq!(cgr_route(&plan, &ledger, &f).unwrap_err(), Rejection::Capacity);
}

#[test]
fn link_vanishes_mid_transit() {
    let cs = vec![contact(0, 1, 0, 1000, 5), contact(1, 2, 0, 3, 5)];
    let plan = ContactPlan::new(node_names(3), cs, 0, ms(1000), 100.0).unwrap();
    let snaps = derive_snapshots(&plan);
    let ledger = ResourceLedger::new(&plan, ms(10)).unwrap();
    let err = ospf_route(&plan, &snaps, &ledger, &demand(0, 2, 2.0, 50)).unwrap_err();
    assert!(matches!(err, Rejection::LinkDown { from: 1, to: 2, .. }));
}

#[test]
fn single_snapshot_rule() {
    let seg = |a, b, mbps| BandwidthSegment { t_from: ms(a), t_to: ms(b), mbps };
    let mut c01 = contact(0, 1, 0, 1000, 10);
    c01.bandwidth = vec![seg(0, 15, 1000.0), seg(15, 1000, 900.0)];
    let plan = ContactPlan::new(node_names(3), vec![c01, contact(1, 2, 0, 1000, 10)], 0, ms(1000), 100.0).unwrap();
    let snaps = derive_snapshots(&plan);
    assert_eq!(snaps.len(), 2);
    let ledger = ResourceLedger::new(&plan, ms(10)).unwrap();
    assert_eq!(spr_route(&plan, &snaps, &ledger, &demand(0, 2, 2.0, 50)).unwrap().delay, ms(35));
    assert!(spr_route(&plan, &snaps, &ledger, &demand(0, 2, 2.0, 30)).is_err());
    assert_eq!(eval(&plan, Strategy::Detr, &demand(0, 2, 2.0, 30)), Some(ms(20)));
}

#[test]
fn walker_snapshots_tile_the_horizon() {
    let mut cfg = WalkerConfig::reference(5);
    (cfg.planes, cfg.sats_per_plane, cfg.horizon_ms) = (3, 4, 20_000);
    let plan = generate_walker_constellation(&cfg).unwrap();
    let snaps = derive_snapshots(&plan);
    assert_eq!(snaps.first().unwrap().t_start, 0);
    assert_eq!(snaps.last().unwrap().t_end, plan.horizon());
    assert!(snaps.windows(2).all(|w| w[0].t_end == w[1].t_start && w[0].t_start < w[0].t_end));
}

fn small_walker() -> ContactPlan {
    let mut cfg = WalkerConfig::reference(3);
    (cfg.planes, cfg.sats_per_plane, cfg.horizon_ms) = (3, 3, 5_000);
    cfg.bandwidth_mbps = (200.0, 800.0);
    generate_walker_constellation(&cfg).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn shared_ledger_dominance(seed in 0u64..1000) {
        let plan = small_walker();
        let ctx = RoutingContext::new(&plan, ms(10));
        let mut ledger = ResourceLedger::new(&plan, ms(10)).unwrap();
        for f in generate_demands(60, &plan, &DemandConfig::default(), seed).unwrap() {
            let detr = ctx.evaluate(Strategy::Detr, &ledger, &f).unwrap().map(|a| a.delay);
            for s in [Strategy::Ospf, Strategy::Spr] {
                if let Some(other) = ctx.evaluate(s, &ledger, &f).unwrap() {
                    prop_assert!(detr.is_some_and(|d| d <= other.delay), "{} beat detr on {:?}", s, f);
                }
            }
            ctx.route(Strategy::Detr, &mut ledger, &f).unwrap();
        }
    }

    #[test]
    fn ledger_conservation(seed in 0u64..1000) {
        let plan = small_walker();
        let ctx = RoutingContext::new(&plan, ms(10));
        let mut ledger = ResourceLedger::new(&plan, ms(10)).unwrap();
        let mut charged = std::collections::BTreeMap::new();
        for f in generate_demands(60, &plan, &DemandConfig::default(), seed).unwrap() {
            for s in [Strategy::Detr, Strategy::Cgr] {
                if let Some(a) = ctx.route(s, &mut ledger, &f).unwrap() {
                    let res = match &a.path {
                        detroute_core::RoutePath::TimeFeatured(p) => {
                            p.reservations(&detroute_core::CycleGrid::for_demand(&f, ms(10)).unwrap(), f.size_mb)
                        }
                        detroute_core::RoutePath::Static(r) => r.reservations.clone(),
                    };
                    for (r, amount) in res {
                        *charged.entry(r).or_insert(0.0) += amount;
                    }
                }
            }
        }
        for (r, total) in charged {
            let used = ledger.initial(r) - ledger.residual(r);
            prop_assert!((used - total).abs() < 1e-9, "{r}: used {used} vs charged {total}");
            prop_assert!(ledger.residual(r) >= 0.0 && ledger.residual(r) <= ledger.initial(r));
        }
    }
}
