//! Horvitz-Thompson estimation over the held sample.
//!
//! A subgraph `J` whose edges were all selected contributes `f(J)/P(J)`,
//! where `P(J)` is the product of the selection probabilities in force when
//! each of its edges arrived.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::held::HeldGraph;
use crate::sampler::SampleState;
use crate::variance::confidence_interval;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Statistic {
    #[serde(rename = "N_K")]
    Edges,
    #[serde(rename = "N_T")]
    Triangles,
    #[serde(rename = "N_Lambda")]
    Wedges,
    #[serde(rename = "alpha")]
    Clustering,
    #[serde(rename = "N_V")]
    Nodes,
}

impl Statistic {
    pub const ALL: [Statistic; 5] = [
        Statistic::Edges,
        Statistic::Triangles,
        Statistic::Wedges,
        Statistic::Clustering,
        Statistic::Nodes,
    ];

    /// The statistics reported when none are requested: everything with a
    /// confidence interval.
    pub const DEFAULT: [Statistic; 4] = [
        Statistic::Edges,
        Statistic::Triangles,
        Statistic::Wedges,
        Statistic::Clustering,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Statistic::Edges => "N_K",
            Statistic::Triangles => "N_T",
            Statistic::Wedges => "N_Lambda",
            Statistic::Clustering => "alpha",
            Statistic::Nodes => "N_V",
        }
    }

    pub fn needs_undirected(self) -> bool {
        matches!(
            self,
            Statistic::Triangles | Statistic::Wedges | Statistic::Clustering
        )
    }
}

impl fmt::Display for Statistic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Statistic {
    type Err = Error;

    fn from_str(s: &str) -> Result<Statistic> {
        Statistic::ALL
            .into_iter()
            .find(|st| st.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::Config(format!("unknown statistic {s:?}")))
    }
}

/// Point estimate with its variance estimate and 95% bounds.
///
/// `estimate` is `None` when the statistic is undefined for this sample
/// (clustering with no sampled wedges). Variance and bounds are `None` for
/// statistics without a variance estimator.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EstimateReport {
    pub statistic: Statistic,
    pub estimate: Option<f64>,
    pub variance: Option<f64>,
    pub lb: Option<f64>,
    pub ub: Option<f64>,
    /// The variance approximation came out negative and was clamped to 0.
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub variance_clamped: bool,
}

impl EstimateReport {
    pub fn with_variance(statistic: Statistic, estimate: f64, variance: f64) -> Result<Self> {
        let (lb, ub) = confidence_interval(estimate, variance)?;
        Ok(EstimateReport {
            statistic,
            estimate: Some(estimate),
            variance: Some(variance),
            lb: Some(lb),
            ub: Some(ub),
            variance_clamped: false,
        })
    }

    pub fn point(statistic: Statistic, estimate: f64) -> Self {
        EstimateReport {
            statistic,
            estimate: Some(estimate),
            variance: None,
            lb: None,
            ub: None,
            variance_clamped: false,
        }
    }

    pub fn undefined(statistic: Statistic) -> Self {
        EstimateReport {
            statistic,
            estimate: None,
            variance: None,
            lb: None,
            ub: None,
            variance_clamped: false,
        }
    }

    /// Whether the interval contains `actual`. False without an interval.
    pub fn covers(&self, actual: f64) -> bool {
        match (self.lb, self.ub) {
            (Some(lb), Some(ub)) => lb <= actual && actual <= ub,
            _ => false,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SubgraphKind {
    Edge,
    Wedge,
    Triangle,
}

impl SubgraphKind {
    pub fn size(self) -> usize {
        match self {
            SubgraphKind::Edge => 1,
            SubgraphKind::Wedge => 2,
            SubgraphKind::Triangle => 3,
        }
    }
}

/// A sampled subgraph: held-edge indices in arrival order and `1/P(J)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SubgraphInstance {
    pub kind: SubgraphKind,
    pub edges: Vec<usize>,
    pub inv_prob: f64,
}

impl SubgraphInstance {
    fn new(kind: SubgraphKind, mut edges: Vec<usize>, graph: &HeldGraph) -> Self {
        edges.sort_unstable();
        let inv_prob = edges.iter().map(|&e| graph.weights[e]).product();
        SubgraphInstance {
            kind,
            edges,
            inv_prob,
        }
    }

    pub fn probability(&self) -> f64 {
        1.0 / self.inv_prob
    }

    pub fn contains(&self, edge: usize) -> bool {
        self.edges.binary_search(&edge).is_ok()
    }

    /// Held edges shared with `other`, in arrival order.
    pub fn shared(&self, other: &SubgraphInstance) -> Vec<usize> {
        self.edges
            .iter()
            .copied()
            .filter(|&e| other.contains(e))
            .collect()
    }
}

/// All sampled instances of one kind, with an optional per-instance weight
/// `f(J)` (constant 1 when absent).
#[derive(Clone, Debug, PartialEq)]
pub struct SubgraphFamily {
    pub kind: SubgraphKind,
    pub instances: Vec<SubgraphInstance>,
    weights: Option<Vec<f64>>,
}

impl SubgraphFamily {
    /// Attaches `f(J)` to every instance.
    pub fn with_weights(mut self, f: impl Fn(&SubgraphInstance) -> f64) -> Self {
        self.weights = Some(self.instances.iter().map(f).collect());
        self
    }

    pub fn weight(&self, idx: usize) -> f64 {
        self.weights.as_ref().map_or(1.0, |w| w[idx])
    }

    pub fn len(&self) -> usize {
        self.instances.len()
    }

    pub fn is_empty(&self) -> bool {
        self.instances.is_empty()
    }
}

/// Enumerates every sampled subgraph of `kind` exactly once.
pub fn enumerate(state: &SampleState, kind: SubgraphKind) -> Result<SubgraphFamily> {
    if kind != SubgraphKind::Edge && state.mode().is_directed() {
        return Err(Error::UnsupportedDirected("wedge and triangle enumeration"));
    }
    let graph = HeldGraph::new(state);
    let instances = match kind {
        SubgraphKind::Edge => (0..state.len())
            .map(|e| SubgraphInstance::new(kind, vec![e], &graph))
            .collect(),
        SubgraphKind::Wedge => {
            let mut out = Vec::new();
            for list in &graph.adj {
                for (i, &(_, e1)) in list.iter().enumerate() {
                    for &(_, e2) in &list[i + 1..] {
                        out.push(SubgraphInstance::new(
                            kind,
                            vec![e1 as usize, e2 as usize],
                            &graph,
                        ));
                    }
                }
            }
            out
        }
        SubgraphKind::Triangle => graph
            .triangles(false)
            .into_iter()
            .map(|t| SubgraphInstance::new(kind, t.iter().map(|&e| e as usize).collect(), &graph))
            .collect(),
    };
    Ok(SubgraphFamily {
        kind,
        instances,
        weights: None,
    })
}

/// Unbiased estimate of `sum f(J)` over the whole graph: `sum f(J)/P(J)`
/// over the sampled instances.
pub fn subgraph_sum(family: &SubgraphFamily) -> f64 {
    family
        .instances
        .iter()
        .enumerate()
        .map(|(i, inst)| family.weight(i) * inst.inv_prob)
        .sum()
}

/// Unbiased estimate of the number of non-isolated nodes:
/// `sum_x (1 - prod_{k at x} (1 - 1/p_k))`.
pub fn node_estimate(state: &SampleState) -> f64 {
    state
        .nodes()
        .map(|x| {
            let miss: f64 = state
                .incident(x)
                .iter()
                .map(|&k| 1.0 - state.weight(k))
                .product();
            1.0 - miss
        })
        .sum()
}

/// Plug-in clustering estimate `3 N_T / N_Lambda`. Consistent-style, not
/// unbiased.
pub fn clustering_estimate(nt_hat: f64, nl_hat: f64) -> Result<f64> {
    if nl_hat == 0.0 {
        return Err(Error::Undefined("clustering coefficient"));
    }
    Ok(3.0 * nt_hat / nl_hat)
}
