use std::cmp::Ordering;
use std::collections::{BinaryHeap, HashSet};

use crate::model::Topology;

/// A simple directed path as node and link index sequences.
#[derive(Clone, Debug, PartialEq)]
pub struct Path {
    pub nodes: Vec<usize>,
    pub links: Vec<usize>,
    pub length_m: f64,
}

impl Path {
    fn from_nodes(topo: &Topology, nodes: Vec<usize>) -> Self {
        let links: Vec<usize> = nodes
            .windows(2)
            .map(|w| topo.link_between(w[0], w[1]).expect("path follows existing links"))
            .collect();
        let length_m = links.iter().map(|&l| topo.links()[l].length_m).sum();
        Self { nodes, links, length_m }
    }

    pub fn hops(&self) -> usize {
        self.links.len()
    }
}

fn same_length(a: f64, b: f64) -> bool {
    (a - b).abs() <= 1e-9 * a.abs().max(b.abs()).max(1.0)
}

/// Path order: total length, then node-id sequence.
pub fn compare_paths(topo: &Topology, a: &Path, b: &Path) -> Ordering {
    if !same_length(a.length_m, b.length_m) {
        return a.length_m.total_cmp(&b.length_m);
    }
    let ids = |p: &Path| p.nodes.iter().map(|&n| topo.node_id(n)).collect::<Vec<_>>();
    ids(a).cmp(&ids(b))
}

#[derive(PartialEq)]
struct Entry(f64, usize);

impl Eq for Entry {}

impl Ord for Entry {
    fn cmp(&self, other: &Self) -> Ordering {
        other.0.total_cmp(&self.0).then_with(|| other.1.cmp(&self.1))
    }
}

impl PartialOrd for Entry {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Shortest path from `src` to `dst` avoiding the banned nodes and links;
/// among equally short paths the one with the smallest node-id sequence.
fn shortest_lex(
    topo: &Topology,
    src: usize,
    dst: usize,
    banned_nodes: &HashSet<usize>,
    banned_links: &HashSet<usize>,
) -> Option<Path> {
    let n = topo.nodes().len();
    let usable = |link: usize| {
        let l = &topo.links()[link];
        !banned_links.contains(&link) && !banned_nodes.contains(&l.from) && !banned_nodes.contains(&l.to)
    };
    // Distances to dst over reversed links.
    let mut dist = vec![f64::INFINITY; n];
    dist[dst] = 0.0;
    let mut heap = BinaryHeap::from([Entry(0.0, dst)]);
    while let Some(Entry(d, v)) = heap.pop() {
        if d > dist[v] {
            continue;
        }
        for &link in topo.incoming(v) {
            if !usable(link) {
                continue;
            }
            let l = &topo.links()[link];
            let nd = d + l.length_m;
            if nd < dist[l.from] {
                dist[l.from] = nd;
                heap.push(Entry(nd, l.from));
            }
        }
    }
    if !dist[src].is_finite() || banned_nodes.contains(&src) {
        return None;
    }
    let mut nodes = vec![src];
    let mut at = src;
    while at != dst {
        let next = topo
            .outgoing(at)
            .iter()
            .filter(|&&link| usable(link))
            .map(|&link| &topo.links()[link])
            .filter(|l| dist[l.to].is_finite() && same_length(l.length_m + dist[l.to], dist[at]))
            .map(|l| l.to)
            .filter(|v| !nodes.contains(v))
            .min_by(|&a, &b| topo.node_id(a).cmp(topo.node_id(b)))?;
        nodes.push(next);
        at = next;
    }
    Some(Path::from_nodes(topo, nodes))
}

/// Up to `k` loopless paths in nondecreasing length (Yen), ties broken by
/// node-id sequence.
pub fn k_shortest_paths(topo: &Topology, src: usize, dst: usize, k: usize) -> Vec<Path> {
    if k == 0 || src == dst {
        return Vec::new();
    }
    let Some(first) = shortest_lex(topo, src, dst, &HashSet::new(), &HashSet::new()) else {
        return Vec::new();
    };
    let mut found = vec![first];
    let mut pending: Vec<Path> = Vec::new();
    while found.len() < k {
        let prev = found.last().expect("non-empty").clone();
        for j in 0..prev.links.len() {
            let spur = prev.nodes[j];
            let root = &prev.nodes[..=j];
            let banned_links: HashSet<usize> = found
                .iter()
                .filter(|p| p.nodes.len() > j + 1 && &p.nodes[..=j] == root)
                .map(|p| p.links[j])
                .collect();
            let banned_nodes: HashSet<usize> = root[..j].iter().copied().collect();
            if let Some(tail) = shortest_lex(topo, spur, dst, &banned_nodes, &banned_links) {
                let mut nodes = root[..j].to_vec();
                nodes.extend(tail.nodes);
                let candidate = Path::from_nodes(topo, nodes);
                if !found.iter().chain(pending.iter()).any(|p| p.nodes == candidate.nodes) {
                    pending.push(candidate);
                }
            }
        }
        let Some(best) = (0..pending.len()).min_by(|&a, &b| compare_paths(topo, &pending[a], &pending[b])) else {
            break;
        };
        found.push(pending.swap_remove(best));
    }
    found
}
