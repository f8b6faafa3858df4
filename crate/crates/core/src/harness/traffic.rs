use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::decimal::{self, Rational};
use crate::error::{Error, Result};
use crate::model::{RequestDoc, Tier, Topology};

/// Per-request bandwidth law, recorded in sweep metadata.
pub const BANDWIDTH_LAW: &str = "uniform over {g, 2g, ..., C} Gb/s; last request trimmed to the offered load";

/// Draws requests between uniformly chosen ordered pairs of distinct edge
/// switches, each with a bandwidth uniform on `{g, 2g, ..., C}`, until the
/// total reaches `offered_load_gbps`. The last request is trimmed so the
/// total is exact. Ids are `r1`, `r2`, ...
pub fn gen_uniform_traffic(
    topology: &Topology,
    offered_load_gbps: Rational,
    granularity_gbps: Rational,
    capacity_gbps: Rational,
    seed: u64,
) -> Result<Vec<RequestDoc>> {
    let edges: Vec<usize> = topology.nodes_in_tier(Tier::Edge).collect();
    if edges.len() < 2 {
        return Err(Error::InvalidTopology(format!(
            "traffic needs at least 2 edge switches, found {}",
            edges.len()
        )));
    }
    let zero = decimal::int(0);
    if granularity_gbps <= zero {
        return Err(Error::InvalidParameter("granularity must be positive".into()));
    }
    if offered_load_gbps < zero || !(offered_load_gbps / granularity_gbps).is_integer() {
        return Err(Error::InvalidParameter(format!(
            "offered load {} Gb/s is not a non-negative multiple of {} Gb/s",
            decimal::to_f64(offered_load_gbps),
            decimal::to_f64(granularity_gbps)
        )));
    }
    let steps = (capacity_gbps / granularity_gbps).floor().to_integer();
    if steps < 1 {
        return Err(Error::InvalidParameter("capacity is below one granularity step".into()));
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut requests = Vec::new();
    let mut total = zero;
    while total < offered_load_gbps {
        let src = rng.gen_range(0..edges.len());
        let mut dst = rng.gen_range(0..edges.len() - 1);
        if dst >= src {
            dst += 1;
        }
        let mut bandwidth = granularity_gbps * rng.gen_range(1..=steps);
        if total + bandwidth > offered_load_gbps {
            bandwidth = offered_load_gbps - total;
        }
        total += bandwidth;
        requests.push(RequestDoc {
            id: format!("r{}", requests.len() + 1),
            src: topology.node_id(edges[src]).to_string(),
            dst: topology.node_id(edges[dst]).to_string(),
            bandwidth_gbps: bandwidth,
        });
    }
    Ok(requests)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::build_fat_tree;

    fn fat_tree() -> Topology {
        build_fat_tree(4, 2, 2, 100.0).unwrap()
    }

    #[test]
    fn same_seed_same_requests() {
        let t = fat_tree();
        let a = gen_uniform_traffic(&t, decimal::int(200), decimal::int(1), decimal::int(10), 7).unwrap();
        let b = gen_uniform_traffic(&t, decimal::int(200), decimal::int(1), decimal::int(10), 7).unwrap();
        assert_eq!(a, b);
        let c = gen_uniform_traffic(&t, decimal::int(200), decimal::int(1), decimal::int(10), 8).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn unit_load_is_one_unit_request() {
        let r = gen_uniform_traffic(&fat_tree(), decimal::int(1), decimal::int(1), decimal::int(10), 3).unwrap();
        assert_eq!(r.len(), 1);
        assert_eq!(r[0].bandwidth_gbps, decimal::int(1));
    }

    #[test]
    fn zero_load_is_empty() {
        let r = gen_uniform_traffic(&fat_tree(), decimal::int(0), decimal::int(1), decimal::int(10), 3).unwrap();
        assert!(r.is_empty());
    }

    #[test]
    fn total_is_exact_and_bandwidths_in_range() {
        let r = gen_uniform_traffic(&fat_tree(), decimal::int(317), decimal::int(1), decimal::int(10), 11).unwrap();
        let total: Rational = r.iter().map(|q| q.bandwidth_gbps).sum();
        assert_eq!(total, decimal::int(317));
        assert!(r
            .iter()
            .all(|q| q.bandwidth_gbps >= decimal::int(1) && q.bandwidth_gbps <= decimal::int(10) && q.src != q.dst));
    }

    #[test]
    fn needs_two_edge_switches() {
        let t = build_fat_tree(1, 1, 1, 100.0).unwrap();
        let err = gen_uniform_traffic(&t, decimal::int(5), decimal::int(1), decimal::int(10), 0).unwrap_err();
        assert!(matches!(err, Error::InvalidTopology(_)));
    }
}
