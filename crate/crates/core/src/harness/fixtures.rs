//! Bundled instances.

use crate::decimal::{self, Rational};
use crate::model::{
    build_fat_tree, CrosstalkMatrix, FrameConfig, Instance, InstanceDoc, LinkDoc, Node, PlannerConfig, RequestDoc,
    Tier, TopologyDoc,
};
use crate::solve::{Assignment, LinkRef, Schedule, SlotRange};

pub const FIG2_JSON: &str = include_str!("../../fixtures/fig2.json");
pub const FIG4_JSON: &str = include_str!("../../fixtures/fig4.json");

fn request(id: &str, src: &str, dst: &str, gbps: Rational) -> RequestDoc {
    RequestDoc {
        id: id.into(),
        src: src.into(),
        dst: dst.into(),
        bandwidth_gbps: gbps,
    }
}

fn build(doc: InstanceDoc) -> Instance {
    Instance::from_doc(&doc).expect("bundled fixtures are valid")
}

/// Small three-tier fat-tree (4 edge, 2 aggregation, 2 core, 100 m fibers)
/// with four reference modes, a 20 ms frame of 5 ms slices, 10 Gb/s per
/// modal channel and a −13 dB receiver threshold.
pub fn fig2() -> Instance {
    let topo = build_fat_tree(4, 2, 2, 100.0).expect("valid shape");
    let reqs = [
        ("r1", "E1", "E3", 3),
        ("r2", "E2", "E4", 5),
        ("r3", "E3", "E1", 10),
        ("r4", "E4", "E2", 2),
        ("r5", "E1", "E2", 7),
        ("r6", "E2", "E3", 4),
        ("r7", "E3", "E4", 6),
        ("r8", "E4", "E1", 1),
    ];
    build(InstanceDoc {
        name: Some("fig2".into()),
        notes: Some("three-tier fat-tree: 4 edge, 2 aggregation, 2 core switches; 100 m duplex fibers".into()),
        topology: topo.to_doc(),
        modes: 4,
        crosstalk_db_per_100m: Some(CrosstalkMatrix::reference().rows().to_vec()),
        frame: FrameConfig::new(20, 5),
        planner: PlannerConfig::default(),
        requests: reqs
            .iter()
            .map(|&(id, s, d, b)| request(id, s, d, decimal::int(b)))
            .collect(),
    })
}

/// Link c of the bench scenario (aggregation switch A1 to E3), 500 m.
pub const FIG4_LINK_C: (&str, &str) = ("A1", "E3");

/// Seven 2.5 Gb/s flows from E1/E2 aggregated at A1 and carried over a
/// 500 m fiber to E3. Planning uses the 20 ms / 5 ms grid; the bench
/// timing (500 µs slices, 50 µs guard) is kept as display metadata.
pub fn fig4() -> Instance {
    let node = |id: &str, tier| Node { id: id.into(), tier };
    let link = |from: &str, to: &str, length_m| LinkDoc {
        from: from.into(),
        to: to.into(),
        length_m,
    };
    let flows = [
        ("A", "E1"),
        ("B", "E2"),
        ("C", "E2"),
        ("D", "E1"),
        ("E", "E1"),
        ("F", "E1"),
        ("G", "E2"),
    ];
    build(InstanceDoc {
        name: Some("fig4".into()),
        notes: Some(
            "links a=E1->A1, b=E2->A1, c=A1->E3 (500 m), d=A1->E1, e=A1->E2; \
             modes m1..m4 = LP01, LP11, LP02, LP31; bench timing 500 us slices, 50 us guard"
                .into(),
        ),
        topology: TopologyDoc {
            nodes: vec![
                node("E1", Tier::Edge),
                node("E2", Tier::Edge),
                node("A1", Tier::Aggregation),
                node("E3", Tier::Edge),
            ],
            links: vec![
                link("E1", "A1", 100.0),
                link("E2", "A1", 100.0),
                link("A1", "E3", 500.0),
                link("A1", "E1", 100.0),
                link("A1", "E2", 100.0),
            ],
        },
        modes: 4,
        crosstalk_db_per_100m: Some(CrosstalkMatrix::reference().rows().to_vec()),
        frame: FrameConfig {
            guard_us: Some(decimal::int(50)),
            ..FrameConfig::new(20, 5)
        },
        planner: PlannerConfig {
            granularity_gbps: Rational::new(1, 2),
            ..PlannerConfig::default()
        },
        requests: flows
            .iter()
            .map(|&(id, src)| request(id, src, "E3", Rational::new(5, 2)))
            .collect(),
    })
}

/// Slice placement on Link c: A, B, C take successive LP01 slices, G on
/// LP31 overlaps only A, F on LP31 overlaps only B, D and E on LP11/LP02.
pub fn fig4_placement(instance: &Instance) -> Schedule {
    let place = |id: &str, mode: usize, slot: usize| {
        let r = instance.request_index(id).expect("fig4 request");
        let src = instance.topology.node_id(instance.requests[r].source);
        Assignment {
            request_id: id.into(),
            path: vec![LinkRef::new(src, "A1"), LinkRef::new(FIG4_LINK_C.0, FIG4_LINK_C.1)],
            modes: vec![mode],
            slots: SlotRange::new(slot, slot + 1),
        }
    };
    let accepted = vec![
        place("A", 0, 0),
        place("B", 0, 1),
        place("C", 0, 2),
        place("D", 1, 3),
        place("E", 2, 2),
        place("F", 3, 1),
        place("G", 3, 0),
    ];
    Schedule::from_assignments(instance, accepted, false)
}

/// Two nodes `a`, `b` joined by a single directed link, the first `modes`
/// reference modes, `slots` slices of 5 ms and bandwidths in Gb/s.
pub fn single_link(modes: usize, slots: usize, requests: &[(&str, i64)], length_m: f64) -> Instance {
    single_link_with_modes(&(0..modes).collect::<Vec<_>>(), slots, requests, length_m)
}

pub fn single_link_with_modes(
    reference_modes: &[usize],
    slots: usize,
    requests: &[(&str, i64)],
    length_m: f64,
) -> Instance {
    build(InstanceDoc {
        name: None,
        notes: None,
        topology: TopologyDoc {
            nodes: vec![
                Node {
                    id: "a".into(),
                    tier: Tier::Edge,
                },
                Node {
                    id: "b".into(),
                    tier: Tier::Edge,
                },
            ],
            links: vec![LinkDoc {
                from: "a".into(),
                to: "b".into(),
                length_m,
            }],
        },
        modes: reference_modes.len(),
        crosstalk_db_per_100m: Some(CrosstalkMatrix::reference_subset(reference_modes).rows().to_vec()),
        frame: FrameConfig::new(5 * slots as i64, 5),
        planner: PlannerConfig::default(),
        requests: requests
            .iter()
            .map(|&(id, b)| request(id, "a", "b", decimal::int(b)))
            .collect(),
    })
}

/// Two 5 Gb/s requests over one 200 m link restricted to modes m2 and m3.
/// Co-propagating they exceed −13 dB; in disjoint slices both fit.
pub fn shared_200m_pair() -> Instance {
    let mut inst = single_link_with_modes(&[1, 2], 4, &[("A", 5), ("B", 5)], 200.0);
    inst.name = Some("pair".into());
    inst
}

/// Two-request, two-mode, two-slot model used for the LP golden files.
pub fn tiny() -> Instance {
    let mut inst = single_link(2, 2, &[("A", 5), ("B", 5)], 100.0);
    inst.name = Some("tiny".into());
    inst
}

pub fn by_name(name: &str) -> Option<Instance> {
    match name {
        "fig2" => Some(fig2()),
        "fig4" => Some(fig4()),
        "pair" => Some(shared_200m_pair()),
        "tiny" => Some(tiny()),
        _ => None,
    }
}

pub const NAMES: [&str; 4] = ["fig2", "fig4", "pair", "tiny"];

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::load_instance;

    #[test]
    fn committed_json_matches_builders() {
        assert_eq!(load_instance(FIG2_JSON).unwrap(), fig2());
        assert_eq!(load_instance(FIG4_JSON).unwrap(), fig4());
    }

    #[test]
    fn fig2_parameters() {
        let inst = load_instance(FIG2_JSON).unwrap();
        assert_eq!(inst.crosstalk, CrosstalkMatrix::reference());
        assert_eq!(inst.planner.xt_threshold_db, -13.0);
        assert_eq!(inst.planner.link_capacity_gbps, decimal::int(10));
        assert_eq!(inst.frame.frame_ms, decimal::int(20));
        assert_eq!(inst.frame.slice_ms, decimal::int(5));
        assert_eq!(inst.topology.links().len(), 24);
    }
}
