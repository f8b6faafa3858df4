use otss_core::harness::{fig4_copropagating, fig4_scenario, fixtures};
use otss_core::model::{Instance, REFERENCE_XT_DB_PER_100M};
use otss_core::solve::{Assignment, LinkRef, Schedule, SlotRange};
use otss_core::xtalk::{accumulate_for_request, coupled_power_ratio, XtLevel};

/// Linear-power sum written out from the table: victim column, one term per
/// aggressor row, scaled by length in hundreds of meters.
fn oracle_db(victim: usize, aggressors: &[usize], length_m: f64) -> f64 {
    let total: f64 = aggressors
        .iter()
        .map(|&a| length_m / 100.0 * 10f64.powf(REFERENCE_XT_DB_PER_100M[a][victim].unwrap() / 10.0))
        .sum();
    10.0 * total.log10()
}

/// Victim `V` on `victim_mode`, one aggressor per mode, all in slot 0 of a
/// single 100 m link.
fn one_slot(victim_mode: usize, aggressor_modes: &[usize]) -> (Instance, Schedule) {
    let mut reqs = vec![("V", 5)];
    let ids: Vec<String> = aggressor_modes.iter().map(|m| format!("X{m}")).collect();
    reqs.extend(ids.iter().map(|id| (id.as_str(), 5)));
    let inst = fixtures::single_link(4, 2, &reqs, 100.0);
    let place = |id: &str, mode: usize| Assignment {
        request_id: id.into(),
        path: vec![LinkRef::new("a", "b")],
        modes: vec![mode],
        slots: SlotRange::new(0, 1),
    };
    let mut accepted = vec![place("V", victim_mode)];
    accepted.extend(aggressor_modes.iter().zip(&ids).map(|(&m, id)| place(id, m)));
    let s = Schedule::from_assignments(&inst, accepted, false);
    (inst, s)
}

#[test]
fn m3_victim_with_three_aggressors_is_infeasible() {
    let (inst, s) = one_slot(2, &[0, 1, 3]);
    let report = accumulate_for_request("V", &s, &inst).unwrap();
    let want = oracle_db(2, &[0, 1, 3], 100.0);
    assert!((want - -12.87).abs() < 0.01);
    assert!((report.total_db.db() - want).abs() < 1e-9);
    assert!(!report.feasible);
    assert_eq!(report.terms.len(), 3);
}

#[test]
fn dropping_m2_makes_m3_feasible() {
    let (inst, s) = one_slot(2, &[0, 3]);
    let report = accumulate_for_request("V", &s, &inst).unwrap();
    let want = oracle_db(2, &[0, 3], 100.0);
    assert!((want - -15.96).abs() < 0.01);
    assert!((report.total_db.db() - want).abs() < 1e-9);
    assert!(report.feasible);
}

#[test]
fn lone_request_sees_no_crosstalk() {
    let (inst, s) = one_slot(2, &[]);
    let report = accumulate_for_request("V", &s, &inst).unwrap();
    assert_eq!(report.total_db, XtLevel::NoCrosstalk);
    assert!(report.feasible);
}

#[test]
fn bench_victim_matches_the_table() {
    let (inst, placement, facts) = fig4_scenario();
    let report = accumulate_for_request(facts.victim, &placement, &inst).unwrap();
    let link_c = fixtures::FIG4_LINK_C;
    let len = inst
        .topology
        .links()
        .iter()
        .find(|l| inst.topology.node_id(l.from) == link_c.0 && inst.topology.node_id(l.to) == link_c.1)
        .unwrap()
        .length_m;
    let want = oracle_db(3, &[0], len);
    assert!((want - facts.victim_total_db).abs() < 0.01);
    assert!((report.total_db.db() - want).abs() < 1e-9);
    assert_eq!(report.feasible, facts.victim_feasible);
    assert!(report.terms.iter().all(|t| t.aggressor_request == facts.aggressor));
}

#[test]
fn copropagating_bench_overloads_the_worst_receiver() {
    let (inst, _, facts) = fig4_scenario();
    let s = fig4_copropagating(&inst);
    let link_c = LinkRef::new(fixtures::FIG4_LINK_C.0, fixtures::FIG4_LINK_C.1);
    let report = accumulate_for_request(facts.forced_worst_victim, &s, &inst).unwrap();
    let on_c: f64 = report
        .terms
        .iter()
        .filter(|t| t.link == link_c)
        .map(|t| 10f64.powf(t.contribution_db / 10.0))
        .sum();
    let on_c_db = 10.0 * on_c.log10();
    assert!((on_c_db - facts.forced_worst_link_c_db).abs() < 0.01, "{on_c_db}");
    assert!((on_c_db - oracle_db(2, &[0, 1, 3], 500.0)).abs() < 1e-9);
    assert!(!report.feasible);
}

#[test]
fn tanh_is_log_linear_for_small_arguments() {
    for hz in [1e-4, 1e-3, 1e-2, 5e-2] {
        let gap = 10.0 * coupled_power_ratio(hz, 1.0).log10() - 10.0 * hz.log10();
        assert!(gap.abs() < 0.01, "{hz}: {gap}");
    }
}
