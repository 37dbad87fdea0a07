//! Centrality algorithms selectable by name.

use std::collections::BTreeMap;
use std::sync::Arc;

use num_rational::BigRational;
use num_traits::ToPrimitive;

use super::{betweenness_with, brute_force_exact, MetricsError, Result, WeightedDigraph};

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct ComputeOptions {
    /// Worker threads; `None` uses the ambient rayon pool.
    pub threads: Option<usize>,
}

pub trait CentralityAlgorithm: Send + Sync {
    fn name(&self) -> &'static str;

    fn description(&self) -> &'static str;

    /// Unnormalized betweenness indexed like `graph.nodes()`.
    fn compute(&self, graph: &WeightedDigraph, opts: &ComputeOptions) -> Result<Vec<f64>>;
}

fn with_pool<R: Send>(
    opts: &ComputeOptions,
    f: impl FnOnce(Option<&rayon::ThreadPool>) -> R + Send,
) -> Result<R> {
    match opts.threads {
        None => Ok(f(None)),
        Some(threads) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(threads.max(1))
                .build()
                .map_err(|e| MetricsError::ThreadPool(e.to_string()))?;
            Ok(f(Some(&pool)))
        }
    }
}

/// Brandes with `f64` accumulation over a fixed source partition.
pub struct BrandesParallel;

impl CentralityAlgorithm for BrandesParallel {
    fn name(&self) -> &'static str {
        "brandes"
    }

    fn description(&self) -> &'static str {
        "exact-cost Brandes, f64 accumulation, parallel over sources"
    }

    fn compute(&self, graph: &WeightedDigraph, opts: &ComputeOptions) -> Result<Vec<f64>> {
        with_pool(opts, |pool| betweenness_with::<f64>(graph, pool))?
    }
}

/// Brandes with arbitrary-precision rational accumulation.
pub struct BrandesExact;

impl CentralityAlgorithm for BrandesExact {
    fn name(&self) -> &'static str {
        "brandes-exact"
    }

    fn description(&self) -> &'static str {
        "exact-cost Brandes, rational accumulation (slow, bit-for-bit exact before rounding)"
    }

    fn compute(&self, graph: &WeightedDigraph, opts: &ComputeOptions) -> Result<Vec<f64>> {
        let exact = with_pool(opts, |pool| betweenness_with::<BigRational>(graph, pool))??;
        Ok(exact
            .iter()
            .map(|v| v.to_f64().unwrap_or(f64::NAN))
            .collect())
    }
}

pub struct BruteForce;

impl CentralityAlgorithm for BruteForce {
    fn name(&self) -> &'static str {
        "brute-force"
    }

    fn description(&self) -> &'static str {
        "simple-path enumeration oracle, at most 12 nodes"
    }

    fn compute(&self, graph: &WeightedDigraph, _opts: &ComputeOptions) -> Result<Vec<f64>> {
        Ok(brute_force_exact(graph)?
            .iter()
            .map(|v| v.to_f64().unwrap_or(f64::NAN))
            .collect())
    }
}

#[derive(Clone)]
pub struct AlgorithmRegistry {
    algorithms: BTreeMap<&'static str, Arc<dyn CentralityAlgorithm>>,
}

impl AlgorithmRegistry {
    pub fn empty() -> Self {
        AlgorithmRegistry {
            algorithms: BTreeMap::new(),
        }
    }

    pub fn register(&mut self, algorithm: Arc<dyn CentralityAlgorithm>) {
        self.algorithms.insert(algorithm.name(), algorithm);
    }

    pub fn get(&self, name: &str) -> Result<Arc<dyn CentralityAlgorithm>> {
        self.algorithms
            .get(name)
            .cloned()
            .ok_or_else(|| MetricsError::UnknownAlgorithm(name.to_owned()))
    }

    pub fn iter(&self) -> impl Iterator<Item = &Arc<dyn CentralityAlgorithm>> {
        self.algorithms.values()
    }
}

impl Default for AlgorithmRegistry {
    fn default() -> Self {
        let mut reg = Self::empty();
        reg.register(Arc::new(BrandesParallel));
        reg.register(Arc::new(BrandesExact));
        reg.register(Arc::new(BruteForce));
        reg
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::codec::NodeId;

    #[test]
    fn builtins_agree_on_small_graph() {
        let g = WeightedDigraph::new(
            (0..5).map(NodeId::synthetic).collect(),
            [
                (0, 1, 2),
                (1, 2, 2),
                (0, 3, 1),
                (3, 2, 3),
                (2, 4, 0),
                (4, 0, 9),
            ],
        )
        .unwrap();
        let reg = AlgorithmRegistry::default();
        let names: Vec<_> = reg.iter().map(|a| a.name()).collect();
        assert_eq!(names, vec!["brandes", "brandes-exact", "brute-force"]);
        let opts = ComputeOptions { threads: Some(2) };
        let reference = reg.get("brute-force").unwrap().compute(&g, &opts).unwrap();
        for algo in reg.iter() {
            assert_eq!(
                algo.compute(&g, &opts).unwrap(),
                reference,
                "{}",
                algo.name()
            );
        }
    }

    #[test]
    fn unknown_name() {
        assert!(matches!(
            AlgorithmRegistry::default().get("closeness"),
            Err(MetricsError::UnknownAlgorithm(_))
        ));
    }
}
