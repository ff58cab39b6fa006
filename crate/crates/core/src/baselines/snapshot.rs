use alloc::collections::BTreeSet;
use alloc::vec::Vec;

use crate::contact_plan::{ContactPlan, SatId};
use crate::time::Micros;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SnapshotLink {
    pub to: SatId,
    pub delay: Micros,
    pub mbps: f64,
}

/// Static topology valid over `[t_start, t_end)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Snapshot {
    pub t_start: Micros,
    pub t_end: Micros,
    /// Out-links per node, sorted by destination.
    pub adjacency: Vec<Vec<SnapshotLink>>,
}

impl Snapshot {
    pub fn link_count(&self) -> usize {
        self.adjacency.iter().map(Vec::len).sum()
    }

    pub fn has_link(&self, from: SatId, to: SatId) -> bool {
        self.adjacency[from].iter().any(|l| l.to == to)
    }
}

/// Splits the horizon at every contact start/end and bandwidth change.
pub fn derive_snapshots(plan: &ContactPlan) -> Vec<Snapshot> {
    let mut cuts = BTreeSet::new();
    cuts.insert(0);
    cuts.insert(plan.horizon());
    for c in plan.contacts() {
        cuts.insert(c.t_start);
        cuts.insert(c.t_end);
        for s in &c.bandwidth {
            cuts.insert(s.t_from);
            cuts.insert(s.t_to);
        }
    }
    let cuts: Vec<Micros> = cuts.into_iter().filter(|&t| t <= plan.horizon()).collect();
    let n = plan.node_count();
    cuts.windows(2)
        .map(|w| {
            let (a, b) = (w[0], w[1]);
            let mut adjacency = alloc::vec![Vec::new(); n];
            for c in plan.contacts() {
                if c.t_start <= a && b <= c.t_end {
                    adjacency[c.from].push(SnapshotLink { to: c.to, delay: c.delay, mbps: c.bandwidth_at(a) });
                }
            }
            for adj in &mut adjacency {
                adj.sort_by_key(|l: &SnapshotLink| l.to);
            }
            Snapshot { t_start: a, t_end: b, adjacency }
        })
        .collect()
}

/// Index of the snapshot containing `t`.
pub fn snapshot_at(snaps: &[Snapshot], t: Micros) -> Option<usize> {
    let k = snaps.partition_point(|s| s.t_end <= t);
    (k < snaps.len() && snaps[k].t_start <= t).then_some(k)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::contact_plan::{BandwidthSegment, Contact};
    use crate::fixtures::node_names;
    use crate::time::ms;
    use alloc::vec;

    fn contact(from: usize, to: usize, a: u64, b: u64) -> Contact {
        Contact {
            from,
            to,
            t_start: ms(a),
            t_end: ms(b),
            delay: ms(1),
            bandwidth: vec![BandwidthSegment { t_from: ms(a), t_to: ms(b), mbps: 100.0 }],
        }
    }

    #[test]
    fn single_contact_single_snapshot() {
        let p = ContactPlan::new(node_names(2), vec![contact(0, 1, 0, 100)], 0, ms(100), 1.0).unwrap();
        let s = derive_snapshots(&p);
        assert_eq!(s.len(), 1);
        assert_eq!((s[0].t_start, s[0].t_end), (0, ms(100)));
        assert!(s[0].has_link(0, 1));
    }

    #[test]
    fn disjoint_contacts_two_snapshots() {
        let p = ContactPlan::new(node_names(3), vec![contact(0, 1, 0, 50), contact(1, 2, 50, 100)], 0, ms(100), 1.0)
            .unwrap();
        let s = derive_snapshots(&p);
        assert_eq!(s.len(), 2);
        assert!(s[0].has_link(0, 1) && !s[0].has_link(1, 2));
        assert!(s[1].has_link(1, 2) && !s[1].has_link(0, 1));
        assert_eq!(snapshot_at(&s, ms(50)), Some(1));
        assert_eq!(snapshot_at(&s, ms(49)), Some(0));
        assert_eq!(snapshot_at(&s, ms(100)), None);
    }
}
