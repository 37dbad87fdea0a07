use std::cmp::Ordering;
use std::fmt::Write as _;

use serde::Serialize;

use super::{MetricsError, Result, WeightedDigraph};
use crate::codec::NodeId;

/// Betweenness of every node for one (snapshot, amount) pair.
#[derive(Debug, Clone, PartialEq)]
pub struct CentralityReport {
    pub as_of: u64,
    pub amount_msat: u64,
    /// One entry per node, in graph order.
    pub values: Vec<(NodeId, f64)>,
    /// Nodes scoring exactly zero.
    pub leaf_count: usize,
}

/// Descending by value, then ascending node id.
pub fn rank_order(a: &(NodeId, f64), b: &(NodeId, f64)) -> Ordering {
    b.1.total_cmp(&a.1).then_with(|| a.0.cmp(&b.0))
}

#[derive(Serialize)]
struct ReportDoc<'a> {
    amount_msat: u64,
    as_of: u64,
    leaf_count: usize,
    values: Vec<EntryDoc<'a>>,
}

#[derive(Serialize)]
struct EntryDoc<'a> {
    betweenness: f64,
    node_id: &'a str,
}

impl CentralityReport {
    pub fn from_values(graph: &WeightedDigraph, values: Vec<f64>) -> Self {
        Self::new(
            graph.as_of,
            graph.amount_msat,
            graph.nodes().iter().copied().zip(values).collect(),
        )
    }

    pub fn new(as_of: u64, amount_msat: u64, values: Vec<(NodeId, f64)>) -> Self {
        let leaf_count = values.iter().filter(|(_, v)| *v == 0.0).count();
        CentralityReport {
            as_of,
            amount_msat,
            values,
            leaf_count,
        }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn ranked(&self) -> Vec<(NodeId, f64)> {
        let mut out = self.values.clone();
        out.sort_by(rank_order);
        out
    }

    pub fn get(&self, node: &NodeId) -> Option<f64> {
        self.values
            .iter()
            .find(|(id, _)| id == node)
            .map(|(_, v)| *v)
    }

    /// `node_id,betweenness`, highest first. Values use the shortest
    /// representation that parses back to the same `f64`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("node_id,betweenness\n");
        for (id, v) in self.ranked() {
            let _ = writeln!(out, "{id},{v}");
        }
        out
    }

    pub fn from_csv(text: &str, as_of: u64, amount_msat: u64) -> Result<Self> {
        let mut lines = text.lines().enumerate();
        match lines.next() {
            Some((_, header)) if header.trim() == "node_id,betweenness" => {}
            _ => {
                return Err(MetricsError::BadReport {
                    line: 1,
                    reason: "expected header node_id,betweenness".into(),
                })
            }
        }
        let mut values = Vec::new();
        for (i, line) in lines {
            if line.trim().is_empty() {
                continue;
            }
            let bad = |reason: String| MetricsError::BadReport {
                line: i + 1,
                reason,
            };
            let (id, value) = line
                .split_once(',')
                .ok_or_else(|| bad("missing comma".into()))?;
            let id = NodeId::from_hex(id.trim()).map_err(|e| bad(e.to_string()))?;
            let value: f64 = value.trim().parse().map_err(|e| bad(format!("{e}")))?;
            if value.is_nan() || value < 0.0 {
                return Err(bad(format!(
                    "betweenness {value} is not a nonnegative number"
                )));
            }
            values.push((id, value));
        }
        let mut ids: Vec<_> = values.iter().map(|(id, _)| *id).collect();
        ids.sort_unstable();
        if let Some(w) = ids.windows(2).find(|w| w[0] == w[1]) {
            return Err(MetricsError::DuplicateNode(w[0]));
        }
        Ok(Self::new(as_of, amount_msat, values))
    }

    pub fn to_json(&self) -> String {
        let ranked = self.ranked();
        let hex: Vec<String> = ranked.iter().map(|(id, _)| id.to_hex()).collect();
        let doc = ReportDoc {
            amount_msat: self.amount_msat,
            as_of: self.as_of,
            leaf_count: self.leaf_count,
            values: ranked
                .iter()
                .zip(&hex)
                .map(|((_, v), id)| EntryDoc {
                    betweenness: *v,
                    node_id: id,
                })
                .collect(),
        };
        let mut out = serde_json::to_string_pretty(&doc).expect("report serializes");
        out.push('\n');
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn report() -> CentralityReport {
        CentralityReport::new(
            7,
            10,
            vec![
                (NodeId::synthetic(3), 0.0),
                (NodeId::synthetic(1), 2.5),
                (NodeId::synthetic(2), 2.5),
                (NodeId::synthetic(4), 0.1 + 0.2),
            ],
        )
    }

    #[test]
    fn ranking_breaks_ties_by_id() {
        let ids: Vec<_> = report().ranked().iter().map(|(id, _)| *id).collect();
        assert_eq!(
            ids,
            vec![
                NodeId::synthetic(1),
                NodeId::synthetic(2),
                NodeId::synthetic(4),
                NodeId::synthetic(3)
            ]
        );
        assert_eq!(report().leaf_count, 1);
    }

    #[test]
    fn csv_round_trip_is_exact() {
        let r = report();
        let text = r.to_csv();
        assert!(text.starts_with("node_id,betweenness\n"));
        let back = CentralityReport::from_csv(&text, 7, 10).unwrap();
        assert_eq!(back.ranked(), r.ranked());
        assert_eq!(back.to_csv(), text);
    }

    #[test]
    fn csv_errors() {
        assert!(CentralityReport::from_csv("id,value\n", 0, 0).is_err());
        let id = NodeId::synthetic(1).to_hex();
        let dup = format!("node_id,betweenness\n{id},1\n{id},2\n");
        assert!(matches!(
            CentralityReport::from_csv(&dup, 0, 0),
            Err(MetricsError::DuplicateNode(_))
        ));
        let neg = format!("node_id,betweenness\n{id},-1\n");
        assert!(matches!(
            CentralityReport::from_csv(&neg, 0, 0),
            Err(MetricsError::BadReport { line: 2, .. })
        ));
    }

    #[test]
    fn json_has_context_fields() {
        let json: serde_json::Value = serde_json::from_str(&report().to_json()).unwrap();
        assert_eq!(json["as_of"], 7);
        assert_eq!(json["amount_msat"], 10);
        assert_eq!(json["leaf_count"], 1);
        assert_eq!(json["values"][0]["betweenness"], 2.5);
    }
}
