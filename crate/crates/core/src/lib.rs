//! Graph sample-and-hold: one pass over an edge stream keeps a small sample,
//! from which edge, triangle, wedge, clustering and node counts of the full
//! graph are estimated without bias, together with variance estimates and
//! 95% confidence bounds.
//!
//! ```
//! use gsh::{run, EdgeStream, Mode, SampleEstimates, SamplerConfig, Statistic};
//!
//! let stream = EdgeStream::from_pairs(Mode::Undirected, &[(1, 2), (2, 3), (3, 1)]).unwrap();
//! let sample = run(&stream, SamplerConfig::gsh_t(1.0, 1.0)).unwrap();
//! let est = SampleEstimates::compute(&sample, false);
//! assert_eq!(est.report(Statistic::Triangles).unwrap().estimate, Some(1.0));
//! ```

pub mod error;
pub mod estimators;
pub mod graph;
pub mod harness;
mod held;
pub mod oracle;
pub mod sampler;
pub mod summary;
pub mod variance;

pub use error::{Error, Result};
pub use estimators::{
    clustering_estimate, enumerate, node_estimate, subgraph_sum, EstimateReport, Statistic,
    SubgraphFamily, SubgraphInstance, SubgraphKind,
};
pub use graph::{adjacent, ingest_edge_list, Edge, EdgeStream, IngestReport, Mode, NodeId};
pub use oracle::{enumerate_outcomes, exact_count, ExactStats, Outcome, OutcomeTree};
pub use sampler::{
    run, sampling_fraction, ProbClass, SampleState, SampledEdge, Sampler, SamplerConfig, Step,
};
pub use summary::{ClosureMoments, SampleEstimates};
pub use variance::{
    confidence_interval, cov_triangle_wedge, var_clustering, var_family, var_single,
    ClusteringVariance,
};
