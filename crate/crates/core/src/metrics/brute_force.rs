//! Reference betweenness by exhaustive simple-path enumeration. Exponential;
//! meant for checking the Brandes kernel on small graphs.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};

use super::{CentralityReport, MetricsError, Result, WeightedDigraph};

pub const BRUTE_FORCE_MAX_NODES: usize = 12;

pub fn brute_force_betweenness(graph: &WeightedDigraph) -> Result<CentralityReport> {
    let values = brute_force_exact(graph)?
        .iter()
        .map(|v| v.to_f64().unwrap_or(f64::NAN))
        .collect();
    Ok(CentralityReport::from_values(graph, values))
}

pub fn brute_force_exact(graph: &WeightedDigraph) -> Result<Vec<BigRational>> {
    let n = graph.node_count();
    if n > BRUTE_FORCE_MAX_NODES {
        return Err(MetricsError::TooLarge {
            nodes: n,
            max: BRUTE_FORCE_MAX_NODES,
        });
    }
    let adj: Vec<Vec<(usize, u64)>> = (0..n).map(|v| graph.out_arcs(v).collect()).collect();
    let mut result = vec![BigRational::zero(); n];

    for s in 0..n {
        // Per target: best cost, number of best paths, and per-node count of
        // best paths having that node strictly inside.
        let mut best: Vec<Option<u128>> = vec![None; n];
        let mut count = vec![0u64; n];
        let mut through = vec![vec![0u64; n]; n];
        let mut path = vec![s];
        let mut on_path = vec![false; n];
        on_path[s] = true;
        walk(
            &adj,
            s,
            0,
            &mut path,
            &mut on_path,
            &mut best,
            &mut count,
            &mut through,
        );

        for t in 0..n {
            if t == s || count[t] == 0 {
                continue;
            }
            for v in 0..n {
                if through[t][v] > 0 {
                    result[v] +=
                        BigRational::new(BigInt::from(through[t][v]), BigInt::from(count[t]));
                }
            }
        }
    }
    Ok(result)
}

#[allow(clippy::too_many_arguments)]
fn walk(
    adj: &[Vec<(usize, u64)>],
    u: usize,
    cost: u128,
    path: &mut Vec<usize>,
    on_path: &mut [bool],
    best: &mut [Option<u128>],
    count: &mut [u64],
    through: &mut [Vec<u64>],
) {
    for &(w, weight) in &adj[u] {
        if on_path[w] {
            continue;
        }
        let c = cost + u128::from(weight);
        match best[w] {
            Some(b) if c > b => {}
            Some(b) if c == b => {
                count[w] += 1;
                for &v in &path[1..] {
                    through[w][v] += 1;
                }
            }
            _ => {
                best[w] = Some(c);
                count[w] = 1;
                through[w].iter_mut().for_each(|x| *x = 0);
                for &v in &path[1..] {
                    through[w][v] = 1;
                }
            }
        }
        path.push(w);
        on_path[w] = true;
        walk(adj, w, c, path, on_path, best, count, through);
        on_path[w] = false;
        path.pop();
    }
}
