use std::collections::{BTreeMap, HashMap};

use super::{fee_weight, MetricsError, Result};
use crate::codec::NodeId;
use crate::timemachine::RoutingView;

/// Simple directed graph with exact integer arc weights in compressed
/// sparse row form. Node `i` is `nodes()[i]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WeightedDigraph {
    pub as_of: u64,
    pub amount_msat: u64,
    nodes: Vec<NodeId>,
    offsets: Vec<usize>,
    targets: Vec<u32>,
    weights: Vec<u64>,
}

impl WeightedDigraph {
    /// Self-arcs are dropped and parallel arcs collapse to the minimum weight.
    pub fn new<I>(nodes: Vec<NodeId>, arcs: I) -> Result<Self>
    where
        I: IntoIterator<Item = (usize, usize, u64)>,
    {
        let n = nodes.len();
        let mut seen = HashMap::with_capacity(n);
        for (i, id) in nodes.iter().enumerate() {
            if seen.insert(*id, i).is_some() {
                return Err(MetricsError::DuplicateNode(*id));
            }
        }
        let mut best: BTreeMap<(usize, usize), u64> = BTreeMap::new();
        for (src, dst, w) in arcs {
            for index in [src, dst] {
                if index >= n {
                    return Err(MetricsError::NodeIndex { index, nodes: n });
                }
            }
            if src == dst {
                continue;
            }
            best.entry((src, dst))
                .and_modify(|cur| *cur = (*cur).min(w))
                .or_insert(w);
        }
        let mut offsets = vec![0usize; n + 1];
        for &(src, _) in best.keys() {
            offsets[src + 1] += 1;
        }
        for i in 0..n {
            offsets[i + 1] += offsets[i];
        }
        // BTreeMap iteration is already grouped by source and sorted by target.
        let targets = best.keys().map(|&(_, dst)| dst as u32).collect();
        let weights = best.values().copied().collect();
        Ok(WeightedDigraph {
            as_of: 0,
            amount_msat: 0,
            nodes,
            offsets,
            targets,
            weights,
        })
    }

    /// Accepts signed weights from external sources and rejects negatives.
    pub fn from_signed_arcs<I>(nodes: Vec<NodeId>, arcs: I) -> Result<Self>
    where
        I: IntoIterator<Item = (usize, usize, i64)>,
    {
        let arcs = arcs
            .into_iter()
            .map(|(src, dst, weight)| {
                u64::try_from(weight)
                    .map(|w| (src, dst, w))
                    .map_err(|_| MetricsError::NegativeWeight { src, dst, weight })
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(nodes, arcs)
    }

    pub fn with_context(mut self, as_of: u64, amount_msat: u64) -> Self {
        self.as_of = as_of;
        self.amount_msat = amount_msat;
        self
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn arc_count(&self) -> usize {
        self.targets.len()
    }

    pub fn nodes(&self) -> &[NodeId] {
        &self.nodes
    }

    pub fn out_arcs(&self, v: usize) -> impl Iterator<Item = (usize, u64)> + '_ {
        let range = self.offsets[v]..self.offsets[v + 1];
        self.targets[range.clone()]
            .iter()
            .zip(&self.weights[range])
            .map(|(&t, &w)| (t as usize, w))
    }

    pub fn arcs(&self) -> impl Iterator<Item = (usize, usize, u64)> + '_ {
        (0..self.node_count()).flat_map(move |v| self.out_arcs(v).map(move |(t, w)| (v, t, w)))
    }

    /// Same topology with every weight multiplied by `factor`.
    pub fn scaled(&self, factor: u64) -> Self {
        WeightedDigraph {
            weights: self.weights.iter().map(|w| w * factor).collect(),
            ..self.clone()
        }
    }
}

/// Weights every usable arc with the fee it charges for `amount_msat`.
/// With `enforce_htlc_bounds`, arcs whose HTLC limits exclude the amount are
/// left out.
pub fn build_graph(
    view: &RoutingView,
    amount_msat: u64,
    enforce_htlc_bounds: bool,
) -> Result<WeightedDigraph> {
    let index: HashMap<NodeId, usize> = view
        .nodes
        .iter()
        .enumerate()
        .map(|(i, id)| (*id, i))
        .collect();
    let mut arcs = Vec::with_capacity(view.arcs.len());
    for arc in &view.arcs {
        let p = &arc.policy;
        if enforce_htlc_bounds
            && (amount_msat < p.htlc_minimum_msat
                || p.htlc_maximum_msat.is_some_and(|max| amount_msat > max))
        {
            continue;
        }
        let (Some(&src), Some(&dst)) = (index.get(&arc.source), index.get(&arc.target)) else {
            continue;
        };
        arcs.push((src, dst, fee_weight(p, amount_msat)?));
    }
    Ok(WeightedDigraph::new(view.nodes.clone(), arcs)?.with_context(view.as_of, amount_msat))
}
