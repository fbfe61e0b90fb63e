//! Variance and covariance estimation for subgraph-sum estimators.
//!
//! For two sampled subgraphs `J`, `J'` that share edges, the covariance
//! estimate is `(1/P(J ∪ J')) (1/P(J ∩ J') - 1)`, which simplifies to
//! `(1/P(J)) (1/P(J')) (1 - P(J ∩ J'))`. Disjoint pairs contribute nothing
//! and are never visited: pairs are found by grouping instances on the
//! held edges they contain.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::estimators::{SubgraphFamily, SubgraphInstance, SubgraphKind};
use crate::sampler::SampleState;

/// Normal quantile for two-sided 95% intervals.
pub const Z_95: f64 = 1.96;

/// `est ± 1.96 sqrt(var)`. Bounds are not truncated at zero.
pub fn confidence_interval(estimate: f64, variance: f64) -> Result<(f64, f64)> {
    if variance.is_nan() || variance < 0.0 {
        return Err(Error::NegativeVariance(variance));
    }
    let half = Z_95 * variance.sqrt();
    Ok((estimate - half, estimate + half))
}

/// Diagonal term `sum f(J)^2 (1/P(J)) (1/P(J) - 1)`. The full variance
/// estimate for edge counts, since distinct edges never overlap.
pub fn var_single(family: &SubgraphFamily) -> f64 {
    family
        .instances
        .iter()
        .enumerate()
        .map(|(i, inst)| {
            let f = family.weight(i);
            f * f * inst.inv_prob * (inst.inv_prob - 1.0)
        })
        .sum()
}

fn shared_probability(
    a: &SubgraphInstance,
    b: &SubgraphInstance,
    state: &SampleState,
) -> (usize, f64) {
    let shared = a.shared(b);
    let p = shared.iter().map(|&e| state.probability(e)).product();
    (shared[0], p)
}

fn by_edge(family: &SubgraphFamily, edges: usize) -> Vec<Vec<usize>> {
    let mut groups = vec![Vec::new(); edges];
    for (i, inst) in family.instances.iter().enumerate() {
        for &e in &inst.edges {
            groups[e].push(i);
        }
    }
    groups
}

/// Unbiased variance estimate of [`subgraph_sum`](crate::estimators::subgraph_sum):
/// the diagonal plus the covariance estimate over every ordered pair of
/// distinct, overlapping instances.
///
/// Pairs are visited per held edge: both members contain the edge, and a
/// pair is charged once, at the first edge it shares.
pub fn var_family(family: &SubgraphFamily, state: &SampleState) -> f64 {
    let groups = by_edge(family, state.len());
    let mut off = 0.0;
    for (e, group) in groups.iter().enumerate() {
        for (x, &i) in group.iter().enumerate() {
            let a = &family.instances[i];
            for &j in &group[x + 1..] {
                let b = &family.instances[j];
                let (first, p_shared) = shared_probability(a, b, state);
                if first != e {
                    continue;
                }
                off += family.weight(i)
                    * family.weight(j)
                    * a.inv_prob
                    * b.inv_prob
                    * (1.0 - p_shared);
            }
        }
    }
    var_single(family) + 2.0 * off
}

/// Covariance estimate between the triangle and wedge count estimators.
/// A wedge inside a triangle shares two edges with it; any other
/// overlapping wedge shares one.
pub fn cov_triangle_wedge(
    tri: &SubgraphFamily,
    wedge: &SubgraphFamily,
    state: &SampleState,
) -> Result<f64> {
    if tri.kind != SubgraphKind::Triangle || wedge.kind != SubgraphKind::Wedge {
        return Err(Error::Config(
            "covariance needs a triangle family and a wedge family".into(),
        ));
    }
    let groups = by_edge(wedge, state.len());
    let mut total = 0.0;
    for (i, tau) in tri.instances.iter().enumerate() {
        for &e in &tau.edges {
            for &j in &groups[e] {
                let l = &wedge.instances[j];
                let (first, p_shared) = shared_probability(tau, l, state);
                if first != e {
                    continue;
                }
                total +=
                    tri.weight(i) * wedge.weight(j) * tau.inv_prob * l.inv_prob * (1.0 - p_shared);
            }
        }
    }
    Ok(total)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ClusteringVariance {
    pub variance: f64,
    /// The approximation was negative and has been replaced by 0.
    pub clamped: bool,
}

/// Delta-method variance of `3 N_T / N_Lambda` with estimates plugged in:
/// `9 [var_t/nl^2 + nt^2 var_l/nl^4 - 2 nt cov/nl^3]`.
pub fn var_clustering(
    nt: f64,
    nl: f64,
    var_t: f64,
    var_l: f64,
    cov_tl: f64,
) -> Result<ClusteringVariance> {
    if nl == 0.0 {
        return Err(Error::Undefined("clustering variance"));
    }
    let nl2 = nl * nl;
    let ratio_var = var_t / nl2 + nt * nt * var_l / (nl2 * nl2) - 2.0 * nt * cov_tl / (nl2 * nl);
    let variance = 9.0 * ratio_var;
    Ok(if variance < 0.0 {
        ClusteringVariance {
            variance: 0.0,
            clamped: true,
        }
    } else {
        ClusteringVariance {
            variance,
            clamped: false,
        }
    })
}
