//! Exact weighted betweenness via Brandes' dependency accumulation.
//!
//! Path costs are compared as integers, so equal-fee routes are counted as
//! ties exactly. Zero-fee arcs make equal-distance nodes depend on each
//! other: each distance level is processed in topological order of its
//! zero-weight arcs. Where those arcs form a cycle, simple paths inside the
//! offending component are enumerated so that counts match the simple-path
//! definition.

use std::cmp::Reverse;
use std::collections::BinaryHeap;
use std::ops::{Add, Div, Mul};

use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use rayon::prelude::*;
use rayon::ThreadPool;

use super::{CentralityReport, MetricsError, Result, WeightedDigraph};

/// Sources per unit of parallel work. Fixed so that the summation order,
/// and therefore every floating-point result, is independent of the number
/// of threads.
const SOURCE_BLOCK: usize = 64;

/// Upper bound on enumerated in-level paths per (source, zero-weight cyclic
/// component).
pub const ZERO_CYCLE_BUDGET: usize = 4_000_000;

const NONE: u32 = u32::MAX;
const UNREACHED: u128 = u128::MAX;

/// Numeric type used for path counts and dependencies.
pub trait Accumulator:
    Clone + Send + Sync + Zero + One + Add<Output = Self> + Mul<Output = Self> + Div<Output = Self>
{
    fn to_f64(&self) -> f64;
}

impl Accumulator for f64 {
    fn to_f64(&self) -> f64 {
        *self
    }
}

impl Accumulator for BigRational {
    fn to_f64(&self) -> f64 {
        ToPrimitive::to_f64(self).unwrap_or(f64::NAN)
    }
}

/// Unnormalized betweenness for every node, `f64` accumulation.
pub fn betweenness(graph: &WeightedDigraph) -> Result<CentralityReport> {
    let values = betweenness_with::<f64>(graph, None)?;
    Ok(CentralityReport::from_values(graph, values))
}

/// Exact rational betweenness, one value per node index.
pub fn betweenness_exact(graph: &WeightedDigraph) -> Result<Vec<BigRational>> {
    betweenness_with(graph, None)
}

/// Runs the per-source loop on `pool` (or the ambient rayon pool).
pub fn betweenness_with<T: Accumulator>(
    graph: &WeightedDigraph,
    pool: Option<&ThreadPool>,
) -> Result<Vec<T>> {
    let n = graph.node_count();
    let blocks: Vec<(usize, usize)> = (0..n)
        .step_by(SOURCE_BLOCK)
        .map(|start| (start, (start + SOURCE_BLOCK).min(n)))
        .collect();
    let run = || {
        blocks
            .par_iter()
            .map(|&(start, end)| {
                let mut ws = Workspace::new(n);
                let mut acc = vec![T::zero(); n];
                for s in start..end {
                    ws.single_source(graph, s, &mut acc)?;
                }
                Ok(acc)
            })
            .collect::<Result<Vec<Vec<T>>>>()
    };
    let partials = match pool {
        Some(pool) => pool.install(run)?,
        None => run()?,
    };
    let mut total = vec![T::zero(); n];
    for part in partials {
        for (t, p) in total.iter_mut().zip(part) {
            *t = t.clone() + p;
        }
    }
    Ok(total)
}

enum Item {
    Node(u32),
    Cyclic(usize),
}

struct TrieNode {
    node: u32,
    parent: u32,
    root: u32,
}

/// A weakly connected zero-weight component containing a cycle, with every
/// simple in-component path from each entry node stored as a prefix trie.
struct CyclicComponent<T> {
    roots: Vec<(u32, T)>,
    trie: Vec<TrieNode>,
}

struct Workspace<T> {
    dist: Vec<u128>,
    settled: Vec<bool>,
    preds: Vec<Vec<u32>>,
    order: Vec<u32>,
    sigma: Vec<T>,
    delta: Vec<T>,
    /// Sum over shortest-path successors of their continuation value
    /// `(1 + delta) / sigma`.
    sum_a: Vec<T>,
    heap: BinaryHeap<Reverse<(u128, u32)>>,
    items: Vec<Item>,
    cyclic: Vec<CyclicComponent<T>>,
    // Level-local scratch.
    local: Vec<u32>,
    on_path: Vec<bool>,
}

impl<T: Accumulator> Workspace<T> {
    fn new(n: usize) -> Self {
        Workspace {
            dist: vec![UNREACHED; n],
            settled: vec![false; n],
            preds: vec![Vec::new(); n],
            order: Vec::with_capacity(n),
            sigma: vec![T::zero(); n],
            delta: vec![T::zero(); n],
            sum_a: vec![T::zero(); n],
            heap: BinaryHeap::new(),
            items: Vec::new(),
            cyclic: Vec::new(),
            local: vec![NONE; n],
            on_path: vec![false; n],
        }
    }

    fn reset(&mut self) {
        for &v in &self.order {
            let v = v as usize;
            self.dist[v] = UNREACHED;
            self.settled[v] = false;
            self.preds[v].clear();
            self.sigma[v] = T::zero();
            self.delta[v] = T::zero();
            self.sum_a[v] = T::zero();
        }
        self.order.clear();
        self.heap.clear();
        self.items.clear();
        self.cyclic.clear();
    }

    fn single_source(&mut self, g: &WeightedDigraph, s: usize, acc: &mut [T]) -> Result<()> {
        self.reset();
        self.shortest_paths(g, s);
        self.count_paths(s)?;
        self.accumulate(s);
        for &v in &self.order {
            let v = v as usize;
            if v != s {
                acc[v] = acc[v].clone() + self.delta[v].clone();
            }
        }
        Ok(())
    }

    /// Dijkstra recording every tight predecessor, including ones reached
    /// over zero-weight arcs after the target was settled.
    fn shortest_paths(&mut self, g: &WeightedDigraph, s: usize) {
        self.dist[s] = 0;
        self.heap.push(Reverse((0, s as u32)));
        while let Some(Reverse((d, v))) = self.heap.pop() {
            let vi = v as usize;
            if self.settled[vi] || d > self.dist[vi] {
                continue;
            }
            self.settled[vi] = true;
            self.order.push(v);
            for (w, weight) in g.out_arcs(vi) {
                let nd = d + u128::from(weight);
                if nd < self.dist[w] {
                    self.dist[w] = nd;
                    self.preds[w].clear();
                    self.preds[w].push(v);
                    self.heap.push(Reverse((nd, w as u32)));
                } else if nd == self.dist[w] {
                    self.preds[w].push(v);
                }
            }
        }
    }

    fn is_zero_pred(&self, p: u32, w: u32) -> bool {
        self.dist[p as usize] == self.dist[w as usize]
    }

    /// Forward pass: path counts, level by level.
    fn count_paths(&mut self, s: usize) -> Result<()> {
        let order = std::mem::take(&mut self.order);
        let mut start = 0;
        while start < order.len() {
            let d = self.dist[order[start] as usize];
            let end = start
                + order[start..]
                    .iter()
                    .take_while(|&&v| self.dist[v as usize] == d)
                    .count();
            self.plan_level(&order[start..end], s)?;
            start = end;
        }
        self.order = order;
        Ok(())
    }

    fn sigma_from_preds(&mut self, w: u32, s: usize) {
        let wi = w as usize;
        let mut sigma = if wi == s { T::one() } else { T::zero() };
        for &p in &self.preds[wi] {
            sigma = sigma + self.sigma[p as usize].clone();
        }
        self.sigma[wi] = sigma;
    }

    fn plan_level(&mut self, level: &[u32], s: usize) -> Result<()> {
        let has_zero_arcs = level.len() > 1
            && level.iter().any(|&w| {
                self.preds[w as usize]
                    .iter()
                    .any(|&p| self.is_zero_pred(p, w))
            });
        if !has_zero_arcs {
            for &w in level {
                self.sigma_from_preds(w, s);
                self.items.push(Item::Node(w));
            }
            return Ok(());
        }

        for (i, &v) in level.iter().enumerate() {
            self.local[v as usize] = i as u32;
        }
        let m = level.len();
        let mut succ: Vec<Vec<u32>> = vec![Vec::new(); m];
        let mut indeg = vec![0u32; m];
        let mut uf = UnionFind::new(m);
        for (i, &w) in level.iter().enumerate() {
            for &p in &self.preds[w as usize] {
                if self.is_zero_pred(p, w) {
                    let pl = self.local[p as usize] as usize;
                    succ[pl].push(i as u32);
                    indeg[i] += 1;
                    uf.union(pl, i);
                }
            }
        }

        // Kahn over the zero-weight arcs of this level.
        let mut topo: Vec<u32> = (0..m as u32).filter(|&i| indeg[i as usize] == 0).collect();
        let mut head = 0;
        while head < topo.len() {
            let u = topo[head] as usize;
            head += 1;
            for &w in &succ[u] {
                indeg[w as usize] -= 1;
                if indeg[w as usize] == 0 {
                    topo.push(w);
                }
            }
        }

        let mut cyclic_root = vec![false; m];
        if topo.len() < m {
            for i in 0..m {
                if indeg[i] > 0 {
                    cyclic_root[uf.find(i)] = true;
                }
            }
        }
        for &i in &topo {
            if !cyclic_root[uf.find(i as usize)] {
                self.sigma_from_preds(level[i as usize], s);
                self.items.push(Item::Node(level[i as usize]));
            }
        }
        if topo.len() < m {
            let mut members: Vec<Vec<u32>> = vec![Vec::new(); m];
            for i in 0..m {
                let r = uf.find(i);
                if cyclic_root[r] {
                    members[r].push(i as u32);
                }
            }
            for comp in members.into_iter().filter(|c| !c.is_empty()) {
                let component = self.enumerate_component(level, &comp, &succ, s)?;
                self.items.push(Item::Cyclic(self.cyclic.len()));
                self.cyclic.push(component);
            }
        }

        for &v in level {
            self.local[v as usize] = NONE;
        }
        Ok(())
    }

    fn enumerate_component(
        &mut self,
        level: &[u32],
        comp: &[u32],
        succ: &[Vec<u32>],
        s: usize,
    ) -> Result<CyclicComponent<T>> {
        let mut roots = Vec::new();
        for &x in comp {
            let xg = level[x as usize];
            let mut entry = if xg as usize == s {
                T::one()
            } else {
                T::zero()
            };
            for &p in &self.preds[xg as usize] {
                if !self.is_zero_pred(p, xg) {
                    entry = entry + self.sigma[p as usize].clone();
                }
            }
            if !entry.is_zero() {
                roots.push((x, entry));
            }
        }

        let mut trie = Vec::new();
        let mut stack: Vec<(u32, usize, u32)> = Vec::new();
        for (r, &(x, _)) in roots.iter().enumerate() {
            trie.push(TrieNode {
                node: x,
                parent: NONE,
                root: r as u32,
            });
            self.on_path[x as usize] = true;
            stack.push((x, 0, (trie.len() - 1) as u32));
            while let Some(top) = stack.last_mut() {
                let (u, i, k) = *top;
                if let Some(&w) = succ[u as usize].get(i) {
                    top.1 += 1;
                    if !self.on_path[w as usize] {
                        if trie.len() >= ZERO_CYCLE_BUDGET {
                            return Err(MetricsError::ZeroCycleBudget {
                                source_index: s,
                                budget: ZERO_CYCLE_BUDGET,
                            });
                        }
                        trie.push(TrieNode {
                            node: w,
                            parent: k,
                            root: r as u32,
                        });
                        self.on_path[w as usize] = true;
                        stack.push((w, 0, (trie.len() - 1) as u32));
                    }
                } else {
                    self.on_path[u as usize] = false;
                    stack.pop();
                }
            }
        }

        // Convert local indices to global ids and count paths.
        for t in &mut trie {
            t.node = level[t.node as usize];
        }
        for (x, _) in &mut roots {
            *x = level[*x as usize];
        }
        for t in &trie {
            let y = t.node as usize;
            self.sigma[y] = self.sigma[y].clone() + roots[t.root as usize].1.clone();
        }
        Ok(CyclicComponent { roots, trie })
    }

    /// Backward pass: dependencies in reverse processing order.
    fn accumulate(&mut self, _s: usize) {
        let items = std::mem::take(&mut self.items);
        for item in items.iter().rev() {
            match *item {
                Item::Node(w) => {
                    let wi = w as usize;
                    let delta = self.sigma[wi].clone() * self.sum_a[wi].clone();
                    let a = (T::one() + delta.clone()) / self.sigma[wi].clone();
                    self.delta[wi] = delta;
                    for &p in &self.preds[wi] {
                        let pi = p as usize;
                        self.sum_a[pi] = self.sum_a[pi].clone() + a.clone();
                    }
                }
                Item::Cyclic(c) => self.accumulate_component(c),
            }
        }
        self.items = items;
    }

    fn accumulate_component(&mut self, c: usize) {
        let comp = &self.cyclic[c];
        let m = comp.trie.len();
        let mut child_inv = vec![T::zero(); m];
        let mut sub_a = vec![T::zero(); m];
        let mut exit_sum = vec![T::zero(); comp.roots.len()];
        let mut delta_add: Vec<(usize, T)> = Vec::with_capacity(m);
        for k in (0..m).rev() {
            let t = &comp.trie[k];
            let y = t.node as usize;
            let entry = comp.roots[t.root as usize].1.clone();
            let c_inv = entry.clone() / self.sigma[y].clone();
            let a_total = sub_a[k].clone() + entry * self.sum_a[y].clone();
            delta_add.push((y, child_inv[k].clone() + a_total.clone()));
            let r = t.root as usize;
            exit_sum[r] =
                exit_sum[r].clone() + T::one() / self.sigma[y].clone() + self.sum_a[y].clone();
            if t.parent != NONE {
                let p = t.parent as usize;
                child_inv[p] = child_inv[p].clone() + child_inv[k].clone() + c_inv;
                sub_a[p] = sub_a[p].clone() + a_total;
            }
        }
        for (y, d) in delta_add {
            self.delta[y] = self.delta[y].clone() + d;
        }
        let comp = &self.cyclic[c];
        for (r, (x, _)) in comp.roots.iter().enumerate() {
            let xi = *x as usize;
            for &p in &self.preds[xi] {
                if self.dist[p as usize] != self.dist[xi] {
                    let pi = p as usize;
                    self.sum_a[pi] = self.sum_a[pi].clone() + exit_sum[r].clone();
                }
            }
        }
    }
}

struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    fn new(n: usize) -> Self {
        UnionFind {
            parent: (0..n).collect(),
        }
    }

    fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            self.parent[ra.max(rb)] = ra.min(rb);
        }
    }
}
