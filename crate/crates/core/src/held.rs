//! Compact, index-based view of a held sample for counting.

use std::collections::HashMap;

use crate::graph::NodeId;
use crate::sampler::SampleState;

pub(crate) struct HeldGraph {
    /// Horvitz-Thompson weight `1/p` per held edge.
    pub weights: Vec<f64>,
    /// Local endpoint indices per held edge.
    pub ends: Vec<(u32, u32)>,
    /// Per local node: `(neighbor, held edge)` sorted by neighbor.
    pub adj: Vec<Vec<(u32, u32)>>,
}

impl HeldGraph {
    pub fn new(state: &SampleState) -> HeldGraph {
        let mut local: HashMap<NodeId, u32> = HashMap::with_capacity(state.node_count());
        let mut intern = |n: NodeId, adj: &mut Vec<Vec<(u32, u32)>>| -> u32 {
            *local.entry(n).or_insert_with(|| {
                adj.push(Vec::new());
                (adj.len() - 1) as u32
            })
        };
        let mut adj = Vec::with_capacity(state.node_count());
        let mut ends = Vec::with_capacity(state.len());
        for (idx, sampled) in state.held().iter().enumerate() {
            let a = intern(sampled.edge.a, &mut adj);
            let b = intern(sampled.edge.b, &mut adj);
            adj[a as usize].push((b, idx as u32));
            adj[b as usize].push((a, idx as u32));
            ends.push((a, b));
        }
        for list in &mut adj {
            list.sort_unstable();
        }
        let weights = (0..state.len()).map(|i| state.weight(i)).collect();
        HeldGraph { weights, ends, adj }
    }

    /// Lists every triangle once as sorted held-edge indices. Edges are
    /// oriented from lower to higher (degree, id) rank; a triangle is found
    /// at its lowest-ranked node. Nodes are processed in `chunk`-sized
    /// groups, optionally in parallel; output order is deterministic.
    pub fn triangles(&self, parallel: bool) -> Vec<[u32; 3]> {
        let rank = |v: u32| (self.adj[v as usize].len(), v);
        let forward: Vec<Vec<(u32, u32)>> = self
            .adj
            .iter()
            .enumerate()
            .map(|(u, list)| {
                let ru = rank(u as u32);
                list.iter()
                    .copied()
                    .filter(|&(v, _)| rank(v) > ru)
                    .collect()
            })
            .collect();

        let at = |u: usize, out: &mut Vec<[u32; 3]>| {
            let fu = &forward[u];
            for &(v, e_uv) in fu {
                let fv = &forward[v as usize];
                let (mut i, mut j) = (0, 0);
                while i < fu.len() && j < fv.len() {
                    match fu[i].0.cmp(&fv[j].0) {
                        std::cmp::Ordering::Less => i += 1,
                        std::cmp::Ordering::Greater => j += 1,
                        std::cmp::Ordering::Equal => {
                            let mut t = [e_uv, fu[i].1, fv[j].1];
                            t.sort_unstable();
                            out.push(t);
                            i += 1;
                            j += 1;
                        }
                    }
                }
            }
        };

        if parallel {
            use rayon::prelude::*;
            let n = self.adj.len();
            let chunks: Vec<Vec<[u32; 3]>> = (0..n.div_ceil(CHUNK))
                .into_par_iter()
                .map(|c| {
                    let mut out = Vec::new();
                    for u in c * CHUNK..((c + 1) * CHUNK).min(n) {
                        at(u, &mut out);
                    }
                    out
                })
                .collect();
            chunks.concat()
        } else {
            let mut out = Vec::new();
            for u in 0..self.adj.len() {
                at(u, &mut out);
            }
            out
        }
    }
}

/// Work-partition size for parallel loops. Fixed so that partial sums are
/// combined in the same order however many threads run.
pub(crate) const CHUNK: usize = 1024;
