mod common;

use common::{invalidating_mutations, micro_instance, neutral_mutations, passes};
use otss_core::decimal;
use otss_core::harness::{fixtures, gen_uniform_traffic};
use otss_core::milp::{build_model, schedule_values, violated_constraints};
use otss_core::model::Instance;
use otss_core::solve::{
    solve_baseline_conventional, solve_exact, solve_greedy, ModeSubsets, OrderPolicy, Schedule, SolveLimits,
};

fn solver_outputs(inst: &Instance) -> Vec<(&'static str, Instance, Schedule)> {
    let limits = SolveLimits {
        node_budget: 50_000,
        mode_subsets: ModeSubsets::All,
        ..SolveLimits::default()
    };
    vec![
        ("exact", inst.clone(), solve_exact(inst, &limits)),
        (
            "greedy",
            inst.clone(),
            solve_greedy(inst, &limits, OrderPolicy::DescendingBandwidth),
        ),
        (
            "baseline",
            inst.collapsed_frame(),
            solve_baseline_conventional(inst, &limits),
        ),
    ]
}

fn fig2_with_load(load: i64, seed: u64) -> Instance {
    let t = fixtures::fig2();
    let reqs = gen_uniform_traffic(&t.topology, decimal::int(load), decimal::int(1), decimal::int(10), seed).unwrap();
    t.with_requests(reqs).unwrap()
}

#[test]
fn solver_output_passes_and_every_mutation_fails() {
    let mut instances: Vec<Instance> = (0..120).map(micro_instance).collect();
    instances.extend((0..6).map(|s| fig2_with_load(40 + 40 * s as i64, s)));
    for inst in &instances {
        for (solver, judged_on, schedule) in solver_outputs(inst) {
            let report = otss_core::validate::check_schedule(&judged_on, &schedule).unwrap();
            assert!(report.pass, "{solver} on {:?}: {:?}", inst.name, report.violations);
            for (label, mutated) in invalidating_mutations(&judged_on, &schedule) {
                assert!(
                    !passes(&judged_on, &mutated),
                    "{solver} on {:?}: '{label}' accepted",
                    inst.name
                );
            }
        }
    }
}

#[test]
fn validator_and_model_agree_on_shifted_schedules() {
    let mut checked = 0;
    for seed in 500..650 {
        let inst = micro_instance(seed);
        if !inst.planner.accumulation_model.is_monotone() {
            continue;
        }
        let model = build_model(&inst).unwrap();
        let base = solve_exact(&inst, &SolveLimits::default());
        for s in std::iter::once(base.clone()).chain(neutral_mutations(&inst, &base)) {
            let Ok(values) = schedule_values(&model, &inst, &s) else {
                continue;
            };
            let model_ok = violated_constraints(&model, &values, 1e-9).is_empty();
            assert_eq!(passes(&inst, &s), model_ok, "seed {seed}: {}", s.to_json());
            checked += 1;
        }
    }
    assert!(checked > 300, "{checked}");
}
