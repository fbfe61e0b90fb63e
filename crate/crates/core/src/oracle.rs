//! Ground truth: exact counts on a full graph, and the complete outcome
//! distribution of the sampler on tiny streams.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{EdgeStream, Mode, NodeId};
use crate::sampler::{ProbClass, SampleState, SamplerConfig};

/// Largest stream [`enumerate_outcomes`] will branch over.
pub const MAX_OUTCOME_EDGES: usize = 20;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExactStats {
    /// Non-isolated nodes.
    pub n: u64,
    pub n_k: u64,
    pub n_t: u64,
    pub n_lambda: u64,
    /// `3 n_t / n_lambda`; `None` when there are no wedges.
    pub alpha: Option<f64>,
    pub density: f64,
}

/// Exact counts. Triangles and wedges are counted on the underlying simple
/// undirected graph, so for directed streams they ignore orientation.
pub fn exact_count(stream: &EdgeStream) -> ExactStats {
    let mut index: HashMap<NodeId, usize> = HashMap::new();
    let mut adj: Vec<Vec<usize>> = Vec::new();
    for edge in stream {
        let mut id = |n: NodeId| {
            *index.entry(n).or_insert_with(|| {
                adj.push(Vec::new());
                adj.len() - 1
            })
        };
        let (a, b) = (id(edge.a), id(edge.b));
        adj[a].push(b);
        adj[b].push(a);
    }
    for list in &mut adj {
        list.sort_unstable();
        list.dedup();
    }

    let n = adj.len();
    let n_lambda: u64 = adj
        .iter()
        .map(|l| {
            let d = l.len() as u64;
            d * d.saturating_sub(1) / 2
        })
        .sum();

    // Count u < v < w with v, w in N(u) and w in N(v).
    let mut mark = vec![false; n];
    let mut n_t = 0u64;
    for u in 0..n {
        for &v in &adj[u] {
            mark[v] = true;
        }
        for &v in adj[u].iter().filter(|&&v| v > u) {
            n_t += adj[v].iter().filter(|&&w| w > v && mark[w]).count() as u64;
        }
        for &v in &adj[u] {
            mark[v] = false;
        }
    }

    let n_k = stream.len() as u64;
    let pairs = n as f64 * (n as f64 - 1.0);
    let density = match stream.mode() {
        _ if n < 2 => 0.0,
        Mode::Undirected => 2.0 * n_k as f64 / pairs,
        Mode::Directed => n_k as f64 / pairs,
    };
    ExactStats {
        n: n as u64,
        n_k,
        n_t,
        n_lambda,
        alpha: (n_lambda > 0).then(|| 3.0 * n_t as f64 / n_lambda as f64),
        density,
    }
}

/// One leaf of the sampling decision tree.
#[derive(Clone, Debug)]
pub struct Outcome {
    /// Bit `i` set iff the `i`-th stream edge was selected.
    pub mask: u64,
    pub probability: f64,
    pub sample: SampleState,
}

impl Outcome {
    pub fn selected(&self, position: usize) -> bool {
        self.mask >> position & 1 == 1
    }

    pub fn classes(&self) -> Vec<ProbClass> {
        self.sample.held().iter().map(|s| s.class).collect()
    }
}

#[derive(Clone, Debug)]
pub struct OutcomeTree {
    pub stream: EdgeStream,
    pub outcomes: Vec<Outcome>,
}

/// Branches select/reject at every arrival, following the sampler's rules.
/// Zero-probability branches (rejecting a probability-1 edge) are pruned.
pub fn enumerate_outcomes(stream: &EdgeStream, config: SamplerConfig) -> Result<OutcomeTree> {
    if stream.len() > MAX_OUTCOME_EDGES {
        return Err(Error::StreamTooLarge {
            len: stream.len(),
            max: MAX_OUTCOME_EDGES,
        });
    }
    let root = SampleState::new(config, stream.mode())?;
    let mut outcomes = Vec::new();
    branch(stream, 0, root, 0, 1.0, &mut outcomes);
    Ok(OutcomeTree {
        stream: stream.clone(),
        outcomes,
    })
}

fn branch(
    stream: &EdgeStream,
    pos: usize,
    state: SampleState,
    mask: u64,
    probability: f64,
    out: &mut Vec<Outcome>,
) {
    let Some(&k) = stream.edges().get(pos) else {
        out.push(Outcome {
            mask,
            probability,
            sample: state,
        });
        return;
    };
    let class = state.classify(&k);
    let r = state.config().probability(class);
    let reject = 1.0 - r;
    if reject > 0.0 {
        let mut kept = state.clone();
        kept.force(k, pos, class);
        branch(stream, pos + 1, kept, mask | 1 << pos, probability * r, out);
        branch(stream, pos + 1, state, mask, probability * reject, out);
    } else {
        let mut kept = state;
        kept.force(k, pos, class);
        branch(stream, pos + 1, kept, mask | 1 << pos, probability * r, out);
    }
}

impl OutcomeTree {
    pub fn total_probability(&self) -> f64 {
        self.outcomes.iter().map(|o| o.probability).sum()
    }

    /// `E[f]` over the outcome distribution.
    pub fn expected_value(&self, f: impl Fn(&Outcome) -> f64) -> f64 {
        self.outcomes.iter().map(|o| o.probability * f(o)).sum()
    }

    /// `Var[f]`, computed about the exact mean.
    pub fn variance(&self, f: impl Fn(&Outcome) -> f64) -> f64 {
        self.covariance(&f, &f)
    }

    /// `Cov[f, g]`, computed about the exact means.
    pub fn covariance(&self, f: impl Fn(&Outcome) -> f64, g: impl Fn(&Outcome) -> f64) -> f64 {
        let values: Vec<(f64, f64, f64)> = self
            .outcomes
            .iter()
            .map(|o| (o.probability, f(o), g(o)))
            .collect();
        let mf: f64 = values.iter().map(|(p, x, _)| p * x).sum();
        let mg: f64 = values.iter().map(|(p, _, y)| p * y).sum();
        values.iter().map(|(p, x, y)| p * (x - mf) * (y - mg)).sum()
    }
}

/// Sum of held-edge weights at `node`, an unbiased estimate of its degree.
pub fn degree_estimate(sample: &SampleState, node: NodeId) -> f64 {
    sample
        .incident(node)
        .iter()
        .map(|&k| sample.weight(k))
        .sum()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn path() -> EdgeStream {
        EdgeStream::from_pairs(Mode::Undirected, &[(1, 2), (2, 3), (3, 4)]).unwrap()
    }

    #[test]
    fn exact_small_graphs() {
        let k3 = EdgeStream::from_pairs(Mode::Undirected, &[(1, 2), (2, 3), (3, 1)]).unwrap();
        let s = exact_count(&k3);
        assert_eq!((s.n, s.n_k, s.n_t, s.n_lambda), (3, 3, 1, 3));
        assert_eq!(s.alpha, Some(1.0));
        assert_eq!(s.density, 1.0);

        let s = exact_count(&path());
        assert_eq!((s.n_t, s.n_lambda), (0, 2));
        assert_eq!(s.alpha, Some(0.0));

        let single = EdgeStream::from_pairs(Mode::Undirected, &[(1, 2)]).unwrap();
        assert_eq!(exact_count(&single).alpha, None);
    }

    #[test]
    fn exact_k4_minus_edge() {
        let g = EdgeStream::from_pairs(Mode::Undirected, &[(0, 1), (0, 2), (0, 3), (1, 2), (1, 3)])
            .unwrap();
        let s = exact_count(&g);
        assert_eq!((s.n_t, s.n_lambda), (2, 8));
        assert_eq!(s.alpha, Some(0.75));
    }

    #[test]
    fn outcome_probabilities_path_gsh_p1() {
        let p = 0.5;
        let tree = enumerate_outcomes(&path(), SamplerConfig::gsh(p, 1.0)).unwrap();
        let mut probs: Vec<f64> = tree.outcomes.iter().map(|o| o.probability).collect();
        probs.sort_by(f64::total_cmp);
        let mut expected = vec![p, (1.0 - p) * p, (1.0 - p).powi(2) * p, (1.0 - p).powi(3)];
        expected.sort_by(f64::total_cmp);
        assert_eq!(probs, expected);
        assert!((tree.total_probability() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn single_outcome_at_full_probability() {
        let tree = enumerate_outcomes(&path(), SamplerConfig::gsh(1.0, 1.0)).unwrap();
        assert_eq!(tree.outcomes.len(), 1);
        assert_eq!(tree.outcomes[0].probability, 1.0);
        assert_eq!(tree.outcomes[0].mask, 0b111);
    }

    #[test]
    fn refuses_large_streams() {
        let pairs: Vec<(u64, u64)> = (0..21).map(|i| (i, i + 1)).collect();
        let big = EdgeStream::from_pairs(Mode::Undirected, &pairs).unwrap();
        assert!(matches!(
            enumerate_outcomes(&big, SamplerConfig::gsh(0.5, 0.5)),
            Err(Error::StreamTooLarge { len: 21, .. })
        ));
    }

    #[test]
    fn weights_have_unit_expectation() {
        let tree = enumerate_outcomes(&path(), SamplerConfig::gsh(0.3, 1.0)).unwrap();
        for pos in 0..3 {
            let e = tree.expected_value(|o| {
                o.sample
                    .held()
                    .iter()
                    .position(|s| s.arrival == pos)
                    .map_or(0.0, |i| o.sample.weight(i))
            });
            assert!((e - 1.0).abs() < 1e-12);
        }
        let deg_b = tree.expected_value(|o| degree_estimate(&o.sample, NodeId(2)));
        assert!((deg_b - 2.0).abs() < 1e-12);
    }
}
