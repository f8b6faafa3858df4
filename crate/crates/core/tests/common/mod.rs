#![allow(dead_code)]

use otss_core::decimal;
use otss_core::model::{
    CrosstalkMatrix, FrameConfig, Instance, InstanceDoc, LinkDoc, Node, PlannerConfig, RequestDoc, Tier, TopologyDoc,
};
use otss_core::solve::{Assignment, LinkRef, Schedule, SlotRange};
use otss_core::validate::check_schedule;
use otss_core::xtalk::AccumulationModel;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub const LENGTHS: [f64; 5] = [50.0, 100.0, 200.0, 300.0, 500.0];

/// Random instance with at most 4 nodes, 3 requests, 3 modes and 4 slots.
pub fn micro_instance(seed: u64) -> Instance {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = rng.gen_range(2..=4);
    let ids: Vec<String> = (0..n).map(|i| format!("n{i}")).collect();
    let mut links = Vec::new();
    for a in 0..n {
        for b in 0..n {
            if a != b && rng.gen_bool(0.55) {
                links.push(LinkDoc {
                    from: ids[a].clone(),
                    to: ids[b].clone(),
                    length_m: *LENGTHS.choose(&mut rng).unwrap(),
                });
            }
        }
    }
    if links.is_empty() {
        links.push(LinkDoc {
            from: ids[0].clone(),
            to: ids[1].clone(),
            length_m: 100.0,
        });
    }
    let modes = rng.gen_range(1..=3);
    let mut pool = [0, 1, 2, 3];
    pool.shuffle(&mut rng);
    let mut subset: Vec<usize> = pool[..modes].to_vec();
    subset.sort();
    let slots = rng.gen_range(1..=4i64);
    let r = rng.gen_range(1..=3);
    let requests = (0..r)
        .map(|i| {
            let s = rng.gen_range(0..n);
            let mut d = rng.gen_range(0..n - 1);
            if d >= s {
                d += 1;
            }
            RequestDoc {
                id: format!("q{i}"),
                src: ids[s].clone(),
                dst: ids[d].clone(),
                bandwidth_gbps: decimal::int(rng.gen_range(1..=10)),
            }
        })
        .collect();
    let model = match rng.gen_range(0..10) {
        0 => AccumulationModel::Tanh {
            h_per_m: rng.gen_range(1e-5..1e-3),
        },
        1 => AccumulationModel::PaperLiteralDb,
        _ => AccumulationModel::LinearPower,
    };
    let doc = InstanceDoc {
        name: Some(format!("micro{seed}")),
        notes: None,
        topology: TopologyDoc {
            nodes: ids
                .iter()
                .map(|id| Node {
                    id: id.clone(),
                    tier: Tier::Edge,
                })
                .collect(),
            links,
        },
        modes,
        crosstalk_db_per_100m: Some(CrosstalkMatrix::reference_subset(&subset).rows().to_vec()),
        frame: FrameConfig::new(5 * slots, 5),
        planner: PlannerConfig {
            accumulation_model: model,
            ..PlannerConfig::default()
        },
        requests,
    };
    Instance::from_doc(&doc).expect("generated instance is valid")
}

/// Every simple path from `s` to `d` as link lists, shortest first, ties by
/// node-id sequence; the first `k` of them.
pub fn first_k_simple_paths(instance: &Instance, s: usize, d: usize, k: usize) -> Vec<Vec<usize>> {
    let topo = &instance.topology;
    let mut found: Vec<(f64, Vec<String>, Vec<usize>)> = Vec::new();
    let mut stack = vec![(s, vec![s], Vec::<usize>::new())];
    while let Some((at, nodes, links)) = stack.pop() {
        if at == d {
            let len = links.iter().map(|&l| topo.links()[l].length_m).sum();
            let ids = nodes.iter().map(|&v| topo.node_id(v).to_string()).collect();
            found.push((len, ids, links));
            continue;
        }
        for (l, link) in topo.links().iter().enumerate() {
            if link.from == at && !nodes.contains(&link.to) {
                let mut n2 = nodes.clone();
                n2.push(link.to);
                let mut l2 = links.clone();
                l2.push(l);
                stack.push((link.to, n2, l2));
            }
        }
    }
    found.sort_by(|a, b| a.0.total_cmp(&b.0).then_with(|| a.1.cmp(&b.1)));
    found.into_iter().take(k).map(|f| f.2).collect()
}

/// Minimal (path, modes, interval) options, built without the solver's
/// enumeration. Mode sets are every non-empty subset, or only runs of
/// consecutive modes when `contiguous`.
pub fn oracle_candidates(instance: &Instance, r: usize, k: usize, contiguous: bool) -> Vec<Assignment> {
    let req = &instance.requests[r];
    let topo = &instance.topology;
    let slot_gbps = instance.planner.link_capacity_gbps * instance.frame.slice_ms / instance.frame.frame_ms;
    let need = (req.bandwidth_gbps / slot_gbps).ceil().to_integer() as usize;
    let slots = instance.slot_count();
    let mut out = Vec::new();
    for path in first_k_simple_paths(instance, req.source, req.destination, k) {
        let refs: Vec<LinkRef> = path
            .iter()
            .map(|&l| {
                let link = &topo.links()[l];
                LinkRef::new(topo.node_id(link.from), topo.node_id(link.to))
            })
            .collect();
        for modes in mode_subsets(instance.modes) {
            let w = modes.len();
            if contiguous && modes.last().unwrap() - modes[0] + 1 != w {
                continue;
            }
            for start in 0..slots {
                for end in start + 1..=slots {
                    let len = end - start;
                    let supply = w * len;
                    let minimal = supply >= need && supply - w < need && supply - len < need;
                    if minimal {
                        out.push(Assignment {
                            request_id: req.id.clone(),
                            path: refs.clone(),
                            modes: modes.clone(),
                            slots: SlotRange::new(start, end),
                        });
                    }
                }
            }
        }
    }
    out
}

/// Every non-empty subset of `0..n`, each ascending.
fn mode_subsets(n: usize) -> Vec<Vec<usize>> {
    let mut out = vec![Vec::new()];
    for m in 0..n {
        let with: Vec<Vec<usize>> = out.iter().map(|s| [s.as_slice(), &[m]].concat()).collect();
        out.extend(with);
    }
    out.retain(|s| !s.is_empty());
    out
}

/// Best (throughput, fewest cells) over every joint choice of one oracle
/// candidate (any mode subset) or rejection per request, judged by the
/// validator.
pub fn brute_force_optimum(instance: &Instance, k: usize) -> (decimal::Rational, u64) {
    let options: Vec<Vec<Assignment>> = (0..instance.requests.len())
        .map(|r| oracle_candidates(instance, r, k, false))
        .collect();
    let mut best = (decimal::int(0), 0u64);
    let mut choice = vec![0usize; options.len()];
    loop {
        let picked: Vec<Assignment> = choice
            .iter()
            .zip(&options)
            .filter(|(&c, _)| c > 0)
            .map(|(&c, opts)| opts[c - 1].clone())
            .collect();
        let schedule = Schedule::from_assignments(instance, picked, false);
        let value = schedule.objective();
        let better = value.0 > best.0 || (value.0 == best.0 && value.1 < best.1);
        if better && check_schedule(instance, &schedule).unwrap().pass {
            best = value;
        }
        let mut i = 0;
        loop {
            if i == choice.len() {
                return best;
            }
            choice[i] += 1;
            if choice[i] <= options[i].len() {
                break;
            }
            choice[i] = 0;
            i += 1;
        }
    }
}

/// Single-field edits of a passing schedule, each guaranteed to break it
/// when applied to solver output (minimal candidates). Labels name the edit.
pub fn invalidating_mutations(instance: &Instance, schedule: &Schedule) -> Vec<(String, Schedule)> {
    let mut out = Vec::new();
    let slots = instance.slot_count();
    let mut edit = |label: String, f: &dyn Fn(&mut Schedule)| {
        let mut s = schedule.clone();
        f(&mut s);
        out.push((label, s));
    };
    for (i, a) in schedule.accepted.iter().enumerate() {
        let id = &a.request_id;
        edit(format!("{id}: drop last link"), &|s| {
            s.accepted[i].path.pop();
        });
        edit(format!("{id}: drop first link"), &|s| {
            s.accepted[i].path.remove(0);
        });
        edit(format!("{id}: shorten interval"), &|s| {
            s.accepted[i].slots.end -= 1;
        });
        edit(format!("{id}: drop a mode"), &|s| {
            s.accepted[i].modes.pop();
        });
        edit(format!("{id}: run past frame end"), &|s| {
            s.accepted[i].slots.end = slots + 1;
        });
        edit(format!("{id}: mode out of range"), &|s| {
            s.accepted[i].modes.push(instance.modes);
        });
        edit(format!("{id}: unknown request"), &|s| {
            s.accepted[i].request_id = "zz".into();
        });
        edit(format!("{id}: listed twice"), &|s| {
            let dup = s.accepted[i].clone();
            s.accepted.push(dup);
        });
        edit(format!("{id}: forgotten"), &|s| {
            s.accepted.remove(i);
        });
        edit(format!("{id}: also rejected"), &|s| {
            let id = s.accepted[i].request_id.clone();
            s.rejected.push(id);
        });
        for (j, b) in schedule.accepted.iter().enumerate() {
            if i != j && a.path.iter().any(|l| b.path.contains(l)) {
                edit(format!("{id}: copy cells of {}", b.request_id), &|s| {
                    s.accepted[i].modes = schedule.accepted[j].modes.clone();
                    s.accepted[i].slots = schedule.accepted[j].slots;
                });
            }
        }
    }
    edit("throughput misreported".into(), &|s| {
        s.throughput_gbps += decimal::int(1);
    });
    edit("cell count misreported".into(), &|s| {
        s.lambda_count += 1;
    });
    for id in &schedule.rejected {
        edit(format!("{id}: dropped from rejected"), &|s| {
            s.rejected.retain(|r| r != id);
        });
    }
    out
}

/// Pass/fail of the validator, with structural errors counted as failures.
pub fn passes(instance: &Instance, schedule: &Schedule) -> bool {
    check_schedule(instance, schedule).is_ok_and(|r| r.pass)
}

/// Shifts and swaps that may or may not stay feasible.
pub fn neutral_mutations(instance: &Instance, schedule: &Schedule) -> Vec<Schedule> {
    let slots = instance.slot_count();
    let mut out = Vec::new();
    for i in 0..schedule.accepted.len() {
        for delta in [-1i64, 1] {
            let a = &schedule.accepted[i];
            let start = a.slots.start as i64 + delta;
            let end = a.slots.end as i64 + delta;
            if start >= 0 && end as usize <= slots {
                let mut s = schedule.clone();
                s.accepted[i].slots = SlotRange::new(start as usize, end as usize);
                out.push(s);
            }
        }
        for m in 0..instance.modes {
            let a = &schedule.accepted[i];
            if !a.modes.contains(&m) {
                let mut s = schedule.clone();
                s.accepted[i].modes[0] = m;
                s.accepted[i].modes.sort();
                out.push(s);
            }
        }
        for j in i + 1..schedule.accepted.len() {
            let mut s = schedule.clone();
            let (si, sj) = (s.accepted[i].slots, s.accepted[j].slots);
            s.accepted[i].slots = sj;
            s.accepted[j].slots = si;
            out.push(s);
        }
    }
    out.into_iter()
        .map(|s| Schedule::from_assignments(instance, s.accepted, false))
        .collect()
}
