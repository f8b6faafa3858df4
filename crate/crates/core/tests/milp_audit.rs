mod common;

use std::path::PathBuf;

use common::micro_instance;
use otss_core::decimal;
use otss_core::harness::{fixtures, gen_uniform_traffic};
use otss_core::milp::{
    build_model, count_formulas, emit_lp, objective_value, schedule_values, violated_constraints, write_lp, Family,
    LpPhase, Objectives, VarGroup,
};
use otss_core::model::{build_fat_tree, ObjectiveMode};
use otss_core::solve::{solve_exact, solve_greedy, OrderPolicy, SolveLimits};
use proptest::prelude::*;

fn golden(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("tests/golden")
        .join(name)
}

fn check_golden(name: &str, text: &str) {
    let path = golden(name);
    if std::env::var_os("OTSS_BLESS").is_some() {
        std::fs::write(&path, text).unwrap();
    }
    let want = std::fs::read_to_string(&path).unwrap();
    assert!(want == text, "{name} differs from the golden file");
}

#[test]
fn tiny_model_matches_golden_files() {
    let inst = fixtures::tiny();
    let mut model = build_model(&inst).unwrap();
    let floor = solve_exact(&inst, &SolveLimits::default()).throughput_gbps;
    assert_eq!(floor, decimal::int(10));
    model.set_throughput_floor(decimal::to_f64(floor));
    check_golden("tiny.phase1.lp", &write_lp(&model, LpPhase::Phase1).unwrap());
    check_golden("tiny.phase2.lp", &write_lp(&model, LpPhase::Phase2).unwrap());
}

#[test]
fn emitting_twice_is_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let mut model = build_model(&fixtures::fig4()).unwrap();
    model.set_throughput_floor(15.0);
    let a = emit_lp(&model, &dir.path().join("a.lp")).unwrap();
    let b = emit_lp(
        &build_model(&fixtures::fig4())
            .map(|mut m| {
                m.set_throughput_floor(15.0);
                m
            })
            .unwrap(),
        &dir.path().join("b.lp"),
    )
    .unwrap();
    assert_eq!(a.len(), 2);
    assert!(a[0].ends_with("a.phase1.lp") && a[1].ends_with("a.phase2.lp"));
    for (x, y) in a.iter().zip(&b) {
        assert_eq!(std::fs::read(x).unwrap(), std::fs::read(y).unwrap());
    }
    let phase2 = std::fs::read_to_string(&a[1]).unwrap();
    assert!(phase2.contains("fix_throughput:"));
}

#[test]
fn weighted_model_is_one_file() {
    let mut inst = fixtures::tiny();
    inst.planner.objective_mode = ObjectiveMode::Weighted { eta1: None, eta2: None };
    let model = build_model(&inst).unwrap();
    assert!(matches!(model.objectives, Objectives::Weighted(_)));
    let dir = tempfile::tempdir().unwrap();
    let written = emit_lp(&model, &dir.path().join("w.lp")).unwrap();
    assert_eq!(written, vec![dir.path().join("w.lp")]);
}

#[test]
fn counts_match_closed_forms_on_varied_instances() {
    let mut instances: Vec<_> = (0..40).map(micro_instance).collect();
    for (i, (e, a, c)) in [(2, 1, 1), (3, 2, 1), (4, 2, 2)].into_iter().enumerate() {
        let mut inst = fixtures::fig2();
        inst.topology = build_fat_tree(e, a, c, 150.0).unwrap();
        let reqs = gen_uniform_traffic(
            &inst.topology,
            decimal::int(12),
            decimal::int(1),
            decimal::int(10),
            i as u64,
        )
        .unwrap();
        instances.push(inst.with_requests(reqs).unwrap());
    }
    instances.push(fixtures::fig4());
    instances.push(fixtures::shared_200m_pair());
    for inst in &instances {
        let model = build_model(inst).unwrap();
        assert_eq!(model.counts(), count_formulas(inst), "{:?}", inst.name);
        assert!(model.integrity_problems().is_empty());
    }
}

#[test]
fn fig2_lambda_count_is_the_full_index_set() {
    let inst = fixtures::fig2();
    let c = count_formulas(&inst);
    let (r, e, m, t) = (8, 24, 4, 4);
    assert_eq!(c.variables_in(VarGroup::Lambda), r * e * m * t);
    assert_eq!(c.constraints_in(Family::Eq7), e * m * t);
    assert_eq!(c.variables_in(VarGroup::Beta), r * (r - 1) * e * m * (m - 1) * t);
}

#[test]
fn weighted_optimum_keeps_lexicographic_throughput() {
    for seed in 0..60 {
        let lex = micro_instance(seed);
        let mut weighted = lex.clone();
        weighted.planner.objective_mode = ObjectiveMode::Weighted { eta1: None, eta2: None };
        let a = solve_exact(&lex, &SolveLimits::default());
        let b = solve_exact(&weighted, &SolveLimits::default());
        assert_eq!(a.throughput_gbps, b.throughput_gbps, "seed {seed}");
        assert_eq!(a.lambda_count, b.lambda_count, "seed {seed}");
    }
}

#[test]
fn phase_one_objective_is_schedule_throughput() {
    let inst = fixtures::fig4();
    let model = build_model(&inst).unwrap();
    let s = solve_greedy(&inst, &SolveLimits::default(), OrderPolicy::InputOrder);
    let x = schedule_values(&model, &inst, &s).unwrap();
    let Objectives::TwoPhase { throughput, usage, .. } = &model.objectives else {
        panic!()
    };
    assert_eq!(objective_value(throughput, &x), decimal::to_f64(s.throughput_gbps));
    assert_eq!(objective_value(usage, &x), s.lambda_count as f64);
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 64, ..ProptestConfig::default() })]

    #[test]
    fn solver_schedules_satisfy_the_model(seed in 0u64..100_000) {
        let inst = micro_instance(seed);
        prop_assume!(inst.planner.accumulation_model.is_monotone());
        let model = build_model(&inst).unwrap();
        for s in [
            solve_exact(&inst, &SolveLimits::default()),
            solve_greedy(&inst, &SolveLimits::default(), OrderPolicy::InputOrder),
        ] {
            let x = schedule_values(&model, &inst, &s).unwrap();
            let broken: Vec<String> = violated_constraints(&model, &x, 1e-9).iter().map(|c| c.name.clone()).collect();
            prop_assert!(broken.is_empty(), "{:?}", broken);
        }
    }

    #[test]
    fn counts_match_closed_forms(seed in 0u64..100_000) {
        let inst = micro_instance(seed);
        prop_assert_eq!(build_model(&inst).unwrap().counts(), count_formulas(&inst));
    }
}
