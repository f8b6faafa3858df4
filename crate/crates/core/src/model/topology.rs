use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, FieldError, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Tier {
    Edge,
    Aggregation,
    Core,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Node {
    pub id: String,
    pub tier: Tier,
}

/// A directed fiber link between two node indices.
#[derive(Clone, Debug, PartialEq)]
pub struct Link {
    pub from: usize,
    pub to: usize,
    pub length_m: f64,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LinkDoc {
    pub from: String,
    pub to: String,
    pub length_m: f64,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TopologyDoc {
    pub nodes: Vec<Node>,
    pub links: Vec<LinkDoc>,
}

/// Directed MMF network. A duplex fiber appears as two links.
#[derive(Clone, Debug, PartialEq)]
pub struct Topology {
    nodes: Vec<Node>,
    links: Vec<Link>,
    by_id: HashMap<String, usize>,
    by_ends: HashMap<(usize, usize), usize>,
    outgoing: Vec<Vec<usize>>,
    incoming: Vec<Vec<usize>>,
}

/// Identifiers end up inside LP variable names, so they are kept to ASCII
/// letters and digits.
pub fn valid_identifier(id: &str) -> bool {
    !id.is_empty() && id.chars().all(|c| c.is_ascii_alphanumeric())
}

impl Topology {
    pub fn from_doc(doc: &TopologyDoc) -> Result<Self> {
        let mut errors = Vec::new();
        let topo = Self::check_doc(doc, "topology", &mut errors);
        match topo {
            Some(t) if errors.is_empty() => Ok(t),
            _ => Err(Error::Validation(errors)),
        }
    }

    /// Builds the topology, appending every failed invariant to `errors`.
    pub(crate) fn check_doc(doc: &TopologyDoc, prefix: &str, errors: &mut Vec<FieldError>) -> Option<Self> {
        let start = errors.len();
        let mut by_id = HashMap::new();
        for (i, node) in doc.nodes.iter().enumerate() {
            if !valid_identifier(&node.id) {
                errors.push(FieldError::new(
                    format!("{prefix}.nodes[{i}].id"),
                    format!("'{}' must be non-empty ASCII alphanumeric", node.id),
                ));
            }
            if by_id.insert(node.id.clone(), i).is_some() {
                errors.push(FieldError::new(
                    format!("{prefix}.nodes[{i}].id"),
                    format!("duplicate node id '{}'", node.id),
                ));
            }
        }
        let mut links = Vec::with_capacity(doc.links.len());
        let mut by_ends = HashMap::new();
        for (i, l) in doc.links.iter().enumerate() {
            let path = format!("{prefix}.links[{i}]");
            let from = by_id.get(&l.from).copied();
            let to = by_id.get(&l.to).copied();
            if from.is_none() {
                errors.push(FieldError::new(
                    format!("{path}.from"),
                    format!("unknown node '{}'", l.from),
                ));
            }
            if to.is_none() {
                errors.push(FieldError::new(
                    format!("{path}.to"),
                    format!("unknown node '{}'", l.to),
                ));
            }
            if !(l.length_m.is_finite() && l.length_m > 0.0) {
                errors.push(FieldError::new(
                    format!("{path}.length_m"),
                    format!("length must be positive, got {}", l.length_m),
                ));
            }
            if l.from == l.to {
                errors.push(FieldError::new(path.clone(), format!("self-loop on '{}'", l.from)));
            }
            if let (Some(f), Some(t)) = (from, to) {
                if by_ends.insert((f, t), links.len()).is_some() {
                    errors.push(FieldError::new(
                        path.clone(),
                        format!("duplicate link {} -> {}", l.from, l.to),
                    ));
                }
                links.push(Link {
                    from: f,
                    to: t,
                    length_m: l.length_m,
                });
            }
        }
        if errors.len() > start {
            return None;
        }
        Some(Self::assemble(doc.nodes.clone(), links))
    }

    fn assemble(nodes: Vec<Node>, links: Vec<Link>) -> Self {
        let by_id = nodes.iter().enumerate().map(|(i, n)| (n.id.clone(), i)).collect();
        let by_ends = links.iter().enumerate().map(|(i, l)| ((l.from, l.to), i)).collect();
        let mut outgoing = vec![Vec::new(); nodes.len()];
        let mut incoming = vec![Vec::new(); nodes.len()];
        for (i, l) in links.iter().enumerate() {
            outgoing[l.from].push(i);
            incoming[l.to].push(i);
        }
        Self {
            nodes,
            links,
            by_id,
            by_ends,
            outgoing,
            incoming,
        }
    }

    pub fn to_doc(&self) -> TopologyDoc {
        TopologyDoc {
            nodes: self.nodes.clone(),
            links: self
                .links
                .iter()
                .map(|l| LinkDoc {
                    from: self.nodes[l.from].id.clone(),
                    to: self.nodes[l.to].id.clone(),
                    length_m: l.length_m,
                })
                .collect(),
        }
    }

    pub fn nodes(&self) -> &[Node] {
        &self.nodes
    }

    pub fn links(&self) -> &[Link] {
        &self.links
    }

    pub fn node_index(&self, id: &str) -> Option<usize> {
        self.by_id.get(id).copied()
    }

    pub fn node_id(&self, index: usize) -> &str {
        &self.nodes[index].id
    }

    pub fn link_between(&self, from: usize, to: usize) -> Option<usize> {
        self.by_ends.get(&(from, to)).copied()
    }

    pub fn outgoing(&self, node: usize) -> &[usize] {
        &self.outgoing[node]
    }

    pub fn incoming(&self, node: usize) -> &[usize] {
        &self.incoming[node]
    }

    pub fn degree(&self, node: usize) -> usize {
        self.outgoing[node].len() + self.incoming[node].len()
    }

    /// `FROM->TO` label for a link index.
    pub fn link_label(&self, link: usize) -> String {
        let l = &self.links[link];
        format!("{}->{}", self.nodes[l.from].id, self.nodes[l.to].id)
    }

    pub fn nodes_in_tier(&self, tier: Tier) -> impl Iterator<Item = usize> + '_ {
        self.nodes
            .iter()
            .enumerate()
            .filter(move |(_, n)| n.tier == tier)
            .map(|(i, _)| i)
    }
}

/// Three-tier fat-tree in a single pod: every edge switch connects to every
/// aggregation switch and every aggregation switch to every core switch.
/// Each physical fiber yields two directed links of `link_length_m`.
pub fn build_fat_tree(edge_count: usize, agg_count: usize, core_count: usize, link_length_m: f64) -> Result<Topology> {
    if edge_count == 0 || agg_count == 0 || core_count == 0 {
        return Err(Error::InvalidParameter(format!(
            "fat-tree tiers need at least one switch each, got {edge_count}/{agg_count}/{core_count}"
        )));
    }
    if !(link_length_m.is_finite() && link_length_m > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "link length must be positive, got {link_length_m}"
        )));
    }
    let mut nodes = Vec::with_capacity(edge_count + agg_count + core_count);
    let tiers = [
        (Tier::Edge, 'E', edge_count),
        (Tier::Aggregation, 'A', agg_count),
        (Tier::Core, 'C', core_count),
    ];
    for (tier, prefix, count) in tiers {
        for i in 1..=count {
            nodes.push(Node {
                id: format!("{prefix}{i}"),
                tier,
            });
        }
    }
    let agg0 = edge_count;
    let core0 = edge_count + agg_count;
    let mut links = Vec::with_capacity(2 * (edge_count * agg_count + agg_count * core_count));
    let mut duplex = |a: usize, b: usize| {
        links.push(Link {
            from: a,
            to: b,
            length_m: link_length_m,
        });
        links.push(Link {
            from: b,
            to: a,
            length_m: link_length_m,
        });
    };
    for e in 0..edge_count {
        for a in 0..agg_count {
            duplex(e, agg0 + a);
        }
    }
    for a in 0..agg_count {
        for c in 0..core_count {
            duplex(agg0 + a, core0 + c);
        }
    }
    Ok(Topology::assemble(nodes, links))
}
