//! Concentration of betweenness: Lorenz curves, Gini coefficients, top-share
//! statistics and rank timelines across snapshots.
//!
//! Zero-valued nodes are part of every population here. Sums and areas are
//! computed in exact rational arithmetic over the `f64` inputs and rounded
//! once at the end, so equal inputs in any order give bit-identical outputs.

use std::collections::{HashMap, HashSet};
use std::fmt::Write as _;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};
use thiserror::Error;

use crate::codec::NodeId;
use crate::metrics::{rank_order, CentralityReport};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum InequalityError {
    #[error("report has no nodes")]
    EmptyReport,
    #[error("fraction {0} outside (0, 1]")]
    InvalidFraction(f64),
    #[error("k must be at least 1")]
    InvalidK,
    #[error("anchor label {0:?} is not among the reports")]
    UnknownAnchor(String),
    #[error("duplicate snapshot label {0:?}")]
    DuplicateLabel(String),
    #[error("value {0} is not a finite nonnegative number")]
    InvalidValue(f64),
}

pub type Result<T> = std::result::Result<T, InequalityError>;

#[derive(Debug, Clone, PartialEq)]
pub struct LorenzSeries {
    /// `(population_fraction, cumulative_value_fraction)` from (0,0) to (1,1).
    pub points: Vec<(f64, f64)>,
    pub gini: f64,
    /// True when every value is zero; the curve is then the diagonal.
    pub degenerate: bool,
}

fn exact(v: f64) -> Result<BigRational> {
    if !v.is_finite() || v < 0.0 {
        return Err(InequalityError::InvalidValue(v));
    }
    Ok(BigRational::from_float(v).expect("finite"))
}

fn to_f64(r: &BigRational) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}

fn sorted_values(report: &CentralityReport) -> Result<Vec<f64>> {
    if report.is_empty() {
        return Err(InequalityError::EmptyReport);
    }
    let mut values: Vec<f64> = report.values.iter().map(|(_, v)| *v).collect();
    values.sort_by(f64::total_cmp);
    Ok(values)
}

/// Lorenz curve over all nodes sorted ascending, and
/// `gini = 1 - 2 * (trapezoidal area under the curve)`.
pub fn lorenz(report: &CentralityReport) -> Result<LorenzSeries> {
    let values = sorted_values(report)?;
    lorenz_of(&values)
}

pub fn lorenz_of(ascending: &[f64]) -> Result<LorenzSeries> {
    let n = ascending.len();
    if n == 0 {
        return Err(InequalityError::EmptyReport);
    }
    let mut cumulative = Vec::with_capacity(n + 1);
    let mut running = BigRational::zero();
    cumulative.push(running.clone());
    for &v in ascending {
        running += exact(v)?;
        cumulative.push(running.clone());
    }
    let total = running;
    let nf = n as f64;

    if total.is_zero() {
        let points = (0..=n).map(|i| (i as f64 / nf, i as f64 / nf)).collect();
        return Ok(LorenzSeries {
            points,
            gini: 0.0,
            degenerate: true,
        });
    }

    let points = cumulative
        .iter()
        .enumerate()
        .map(|(i, c)| (i as f64 / nf, to_f64(&(c / &total))))
        .collect();

    // Area = sum_i (1/n) * (C[i-1] + C[i]) / (2T), so
    // gini = 1 - sum_i (C[i-1] + C[i]) / (n T).
    let mut pair_sum = BigRational::zero();
    for w in cumulative.windows(2) {
        pair_sum += &w[0] + &w[1];
    }
    let gini = BigRational::from_integer(1.into()) - pair_sum / (total * BigInt::from(n));
    Ok(LorenzSeries {
        points,
        gini: to_f64(&gini),
        degenerate: false,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TopShare {
    pub fraction: f64,
    /// Number of top nodes counted, `ceil(fraction * n)`.
    pub count: usize,
    pub share: f64,
    /// Total value was zero; `share` is reported as 1.0.
    pub degenerate: bool,
}

/// Number of nodes making up the top `fraction` of `n`. A relative slack of
/// 1e-9 keeps decimal fractions such as 0.1 * 30 from rounding up to 4.
pub fn top_count(fraction: f64, n: usize) -> usize {
    let raw = fraction * n as f64;
    let k = (raw - raw.abs() * 1e-9).ceil() as usize;
    k.clamp(1, n)
}

pub fn top_share(report: &CentralityReport, fraction: f64) -> Result<TopShare> {
    if !(fraction > 0.0 && fraction <= 1.0) {
        return Err(InequalityError::InvalidFraction(fraction));
    }
    if report.is_empty() {
        return Err(InequalityError::EmptyReport);
    }
    let ranked = report.ranked();
    let count = top_count(fraction, ranked.len());
    let mut total = BigRational::zero();
    let mut top = BigRational::zero();
    for (i, (_, v)) in ranked.iter().enumerate() {
        let x = exact(*v)?;
        if i < count {
            top += &x;
        }
        total += x;
    }
    if total.is_zero() {
        return Ok(TopShare {
            fraction,
            count,
            share: 1.0,
            degenerate: true,
        });
    }
    Ok(TopShare {
        fraction,
        count,
        share: to_f64(&(top / total)),
        degenerate: false,
    })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RankTimeline {
    pub node: NodeId,
    /// `(label, rank)` for every report in input order; `None` where the node
    /// is absent from that snapshot.
    pub ranks: Vec<(String, Option<usize>)>,
}

fn check_labels<'a>(labels: impl Iterator<Item = &'a str>) -> Result<()> {
    let mut seen = HashSet::new();
    for label in labels {
        if !seen.insert(label) {
            return Err(InequalityError::DuplicateLabel(label.to_owned()));
        }
    }
    Ok(())
}

/// Tracks the top `k` nodes of the `anchor` snapshot through every snapshot.
pub fn rank_timelines(
    reports: &[(String, CentralityReport)],
    k: usize,
    anchor: &str,
) -> Result<Vec<RankTimeline>> {
    if k == 0 {
        return Err(InequalityError::InvalidK);
    }
    check_labels(reports.iter().map(|(l, _)| l.as_str()))?;
    let anchor_report = reports
        .iter()
        .find(|(label, _)| label == anchor)
        .map(|(_, r)| r)
        .ok_or_else(|| InequalityError::UnknownAnchor(anchor.to_owned()))?;

    let rank_maps: Vec<HashMap<NodeId, usize>> = reports
        .iter()
        .map(|(_, r)| {
            r.ranked()
                .iter()
                .enumerate()
                .map(|(i, (id, _))| (*id, i + 1))
                .collect()
        })
        .collect();

    let mut top = anchor_report.values.clone();
    top.sort_by(rank_order);
    Ok(top
        .iter()
        .take(k)
        .map(|(node, _)| RankTimeline {
            node: *node,
            ranks: reports
                .iter()
                .zip(&rank_maps)
                .map(|((label, _), ranks)| (label.clone(), ranks.get(node).copied()))
                .collect(),
        })
        .collect())
}

/// Gini coefficient per labeled report, in input order.
pub fn gini_trend(reports: &[(String, CentralityReport)]) -> Result<Vec<(String, f64)>> {
    check_labels(reports.iter().map(|(l, _)| l.as_str()))?;
    reports
        .iter()
        .map(|(label, r)| Ok((label.clone(), lorenz(r)?.gini)))
        .collect()
}

pub fn lorenz_csv(series: &LorenzSeries) -> String {
    let mut out = String::from("population_fraction,cumulative_share\n");
    for (x, y) in &series.points {
        let _ = writeln!(out, "{x},{y}");
    }
    out
}

pub fn gini_trend_csv(trend: &[(String, f64)]) -> String {
    let mut out = String::from("label,gini\n");
    for (label, gini) in trend {
        let _ = writeln!(out, "{label},{gini}");
    }
    out
}

/// Rank for display: ranks beyond `cap` show as `cap`, absent is empty.
pub fn display_rank(rank: Option<usize>, cap: Option<usize>) -> String {
    match (rank, cap) {
        (None, _) => String::new(),
        (Some(r), Some(c)) => r.min(c).to_string(),
        (Some(r), None) => r.to_string(),
    }
}

/// Rows are nodes in anchor-rank order, columns are snapshot labels.
pub fn rank_matrix_csv(
    timelines: &[RankTimeline],
    labels: &[String],
    cap: Option<usize>,
) -> String {
    let mut out = String::from("node_id");
    for label in labels {
        out.push(',');
        out.push_str(label);
    }
    out.push('\n');
    for t in timelines {
        out.push_str(&t.node.to_hex());
        for (_, rank) in &t.ranks {
            out.push(',');
            out.push_str(&display_rank(*rank, cap));
        }
        out.push('\n');
    }
    out
}
