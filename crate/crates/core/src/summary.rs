//! All point and variance estimates for a sample in one pass over its
//! nodes, edges and triangles, without materializing wedge instances.
//!
//! The pairwise covariance sums are grouped per held edge `e`: if `s_e` and
//! `s2_e` are the sum and sum of squares of `1/P(J)` over instances
//! containing `e`, the ordered off-diagonal pairs through `e` contribute
//! `(1 - P(e)) (s_e^2 - s2_e)`. Each edge is independent of the others, so
//! the sums split across threads.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::estimators::{clustering_estimate, EstimateReport, Statistic};
use crate::graph::Mode;
use crate::held::{HeldGraph, CHUNK};
use crate::sampler::SampleState;
use crate::variance::var_clustering;

/// Triangle and wedge moments; undirected samples only.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ClosureMoments {
    pub triangles: f64,
    pub triangles_var: f64,
    pub wedges: f64,
    pub wedges_var: f64,
    pub cov: f64,
    /// Number of sampled triangles.
    pub sampled_triangles: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SampleEstimates {
    pub sample_size: usize,
    pub edges: f64,
    pub edges_var: f64,
    pub nodes: f64,
    pub closure: Option<ClosureMoments>,
}

fn chunked<const K: usize, F>(n: usize, parallel: bool, f: F) -> [f64; K]
where
    F: Fn(usize) -> [f64; K] + Sync,
{
    let add = |mut acc: [f64; K], x: [f64; K]| {
        for k in 0..K {
            acc[k] += x[k];
        }
        acc
    };
    if parallel {
        let parts: Vec<[f64; K]> = (0..n.div_ceil(CHUNK))
            .into_par_iter()
            .map(|c| {
                (c * CHUNK..((c + 1) * CHUNK).min(n))
                    .map(&f)
                    .fold([0.0; K], add)
            })
            .collect();
        parts.into_iter().fold([0.0; K], add)
    } else {
        (0..n).map(f).fold([0.0; K], add)
    }
}

impl SampleEstimates {
    pub fn compute(state: &SampleState, parallel: bool) -> SampleEstimates {
        let graph = HeldGraph::new(state);
        let w = &graph.weights;

        let [edges, edges_var] = chunked(w.len(), parallel, |e| [w[e], w[e] * (w[e] - 1.0)]);

        // Per-node power sums of incident weights.
        let sums: Vec<[f64; 3]> = graph
            .adj
            .iter()
            .map(|list| {
                list.iter().fold([0.0; 3], |[a, b, d], &(_, e)| {
                    let x = w[e as usize];
                    let x2 = x * x;
                    [a + x, b + x2, d + x2 * x2]
                })
            })
            .collect();

        let [nodes] = chunked(graph.adj.len(), parallel, |v| {
            let miss: f64 = graph.adj[v]
                .iter()
                .map(|&(_, e)| 1.0 - w[e as usize])
                .product();
            [1.0 - miss]
        });

        let closure =
            (state.mode() == Mode::Undirected).then(|| Self::closure(&graph, &sums, parallel));

        SampleEstimates {
            sample_size: state.len(),
            edges,
            edges_var,
            nodes,
            closure,
        }
    }

    fn closure(graph: &HeldGraph, sums: &[[f64; 3]], parallel: bool) -> ClosureMoments {
        let w = &graph.weights;
        let m = w.len();

        let [wedges, wedge_diag] = chunked(sums.len(), parallel, |v| {
            let [a, b, d] = sums[v];
            let pairs = (a * a - b) / 2.0;
            let squares = (b * b - d) / 2.0;
            [pairs, squares - pairs]
        });

        // Sum of wedge weights through each edge.
        let wedge_through = |e: usize| -> (f64, f64) {
            let (u, v) = graph.ends[e];
            let (wu, wv) = (sums[u as usize], sums[v as usize]);
            let x = w[e];
            let s = x * (wu[0] + wv[0] - 2.0 * x);
            let s2 = x * x * (wu[1] + wv[1] - 2.0 * x * x);
            (s, s2)
        };
        let [wedge_off] = chunked(m, parallel, |e| {
            let (s, s2) = wedge_through(e);
            [(1.0 - 1.0 / w[e]) * (s * s - s2)]
        });

        let triangles = graph.triangles(parallel);
        let mut tri_sum = vec![0.0; m];
        let mut tri_sq = vec![0.0; m];
        for t in &triangles {
            let wt = w[t[0] as usize] * w[t[1] as usize] * w[t[2] as usize];
            for &e in t {
                tri_sum[e as usize] += wt;
                tri_sq[e as usize] += wt * wt;
            }
        }

        let [tri_off] = chunked(m, parallel, |e| {
            [(1.0 - 1.0 / w[e]) * (tri_sum[e] * tri_sum[e] - tri_sq[e])]
        });

        let [tri_total, tri_diag, cov] = chunked(triangles.len(), parallel, |i| {
            let t = triangles[i];
            let [x, y, z] = t.map(|e| w[e as usize]);
            let wt = x * y * z;
            // wedges inside the triangle share two edges with it
            let internal = wt * ((x * y - 1.0) + (x * z - 1.0) + (y * z - 1.0));
            let mut external = 0.0;
            for (k, &e) in t.iter().enumerate() {
                let we = w[e as usize];
                let others: f64 = t
                    .iter()
                    .enumerate()
                    .filter(|&(j, _)| j != k)
                    .map(|(_, &f)| we * w[f as usize])
                    .sum();
                let (s, _) = wedge_through(e as usize);
                external += wt * (1.0 - 1.0 / we) * (s - others);
            }
            [wt, wt * (wt - 1.0), internal + external]
        });

        ClosureMoments {
            triangles: tri_total,
            triangles_var: tri_diag + tri_off,
            wedges,
            wedges_var: wedge_diag + wedge_off,
            cov,
            sampled_triangles: triangles.len(),
        }
    }

    /// Report for one statistic. Triangle, wedge and clustering statistics
    /// are unavailable on directed samples.
    pub fn report(&self, statistic: Statistic) -> Result<EstimateReport> {
        let closure = || {
            self.closure.ok_or(crate::error::Error::UnsupportedDirected(
                "triangle and wedge estimation",
            ))
        };
        match statistic {
            Statistic::Edges => {
                EstimateReport::with_variance(statistic, self.edges, self.edges_var)
            }
            Statistic::Nodes => Ok(EstimateReport::point(statistic, self.nodes)),
            Statistic::Triangles => {
                let c = closure()?;
                EstimateReport::with_variance(statistic, c.triangles, c.triangles_var)
            }
            Statistic::Wedges => {
                let c = closure()?;
                EstimateReport::with_variance(statistic, c.wedges, c.wedges_var)
            }
            Statistic::Clustering => {
                let c = closure()?;
                let Ok(alpha) = clustering_estimate(c.triangles, c.wedges) else {
                    return Ok(EstimateReport::undefined(statistic));
                };
                let v =
                    var_clustering(c.triangles, c.wedges, c.triangles_var, c.wedges_var, c.cov)?;
                let mut report = EstimateReport::with_variance(statistic, alpha, v.variance)?;
                report.variance_clamped = v.clamped;
                Ok(report)
            }
        }
    }

    pub fn reports(&self, statistics: &[Statistic]) -> Result<Vec<EstimateReport>> {
        statistics.iter().map(|&s| self.report(s)).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::estimators::{enumerate, node_estimate, subgraph_sum, SubgraphKind};
    use crate::graph::{Edge, EdgeStream};
    use crate::sampler::{run, ProbClass, SampledEdge, SamplerConfig};
    use crate::variance::{cov_triangle_wedge, var_family};

    fn close(a: f64, b: f64) -> bool {
        (a - b).abs() <= 1e-9 * a.abs().max(b.abs()).max(1.0)
    }

    fn dense_stream(n: u64, seed: u64) -> EdgeStream {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let mut pairs = Vec::new();
        for a in 0..n {
            for b in a + 1..n {
                if rng.gen_bool(0.3) {
                    pairs.push((a, b));
                }
            }
        }
        EdgeStream::from_pairs(Mode::Undirected, &pairs).unwrap()
    }

    #[test]
    fn matches_family_route() {
        let stream = dense_stream(40, 3);
        for (i, cfg) in [SamplerConfig::gsh_t(0.3, 0.5), SamplerConfig::gsh(0.6, 0.4)]
            .into_iter()
            .enumerate()
        {
            let state = run(&stream, cfg.with_seed(i as u64)).unwrap();
            let fast = SampleEstimates::compute(&state, false);
            let c = fast.closure.unwrap();

            let k = enumerate(&state, SubgraphKind::Edge).unwrap();
            let t = enumerate(&state, SubgraphKind::Triangle).unwrap();
            let l = enumerate(&state, SubgraphKind::Wedge).unwrap();
            assert!(close(fast.edges, subgraph_sum(&k)));
            assert!(close(fast.edges_var, var_family(&k, &state)));
            assert!(close(fast.nodes, node_estimate(&state)));
            assert!(close(c.triangles, subgraph_sum(&t)));
            assert!(close(c.triangles_var, var_family(&t, &state)));
            assert!(close(c.wedges, subgraph_sum(&l)));
            assert!(close(c.wedges_var, var_family(&l, &state)));
            assert!(close(c.cov, cov_triangle_wedge(&t, &l, &state).unwrap()));
            assert_eq!(c.sampled_triangles, t.len());
        }
    }

    #[test]
    fn parallel_matches_sequential() {
        let stream = dense_stream(120, 9);
        let state = run(&stream, SamplerConfig::gsh_t(0.4, 0.4).with_seed(1)).unwrap();
        let seq = SampleEstimates::compute(&state, false);
        let par = SampleEstimates::compute(&state, true);
        let (a, b) = (seq.closure.unwrap(), par.closure.unwrap());
        for (x, y) in [
            (seq.edges, par.edges),
            (seq.edges_var, par.edges_var),
            (seq.nodes, par.nodes),
            (a.triangles, b.triangles),
            (a.triangles_var, b.triangles_var),
            (a.wedges, b.wedges),
            (a.wedges_var, b.wedges_var),
            (a.cov, b.cov),
        ] {
            assert!(close(x, y), "{x} vs {y}");
        }
    }

    #[test]
    fn directed_reports_edges_only() {
        let cfg = SamplerConfig::gsh(0.5, 0.5);
        let state = SampleState::from_held(
            cfg,
            Mode::Directed,
            [SampledEdge {
                edge: Edge::directed(1, 2).unwrap(),
                class: ProbClass::P,
                arrival: 0,
            }],
        )
        .unwrap();
        let est = SampleEstimates::compute(&state, false);
        assert!(est.closure.is_none());
        let r = est.report(Statistic::Edges).unwrap();
        assert_eq!((r.estimate, r.variance), (Some(2.0), Some(2.0)));
        assert!(est.report(Statistic::Triangles).is_err());
        assert_eq!(est.report(Statistic::Nodes).unwrap().estimate, Some(4.0));
    }

    #[test]
    fn clustering_undefined_without_wedges() {
        let state = SampleState::new(SamplerConfig::gsh(0.5, 0.5), Mode::Undirected).unwrap();
        let est = SampleEstimates::compute(&state, false);
        let r = est.report(Statistic::Clustering).unwrap();
        assert_eq!(r.estimate, None);
        assert!(!r.covers(0.0));
    }
}
