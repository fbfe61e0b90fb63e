//! Node and edge types, the adjacency predicate, edge-list ingestion and
//! stream permutation.

use std::collections::HashSet;
use std::fmt;
use std::io::BufRead;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct NodeId(pub u64);

impl fmt::Display for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

impl From<u64> for NodeId {
    fn from(id: u64) -> Self {
        NodeId(id)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Undirected,
    Directed,
}

impl Mode {
    pub fn is_directed(self) -> bool {
        self == Mode::Directed
    }
}

/// A stream edge. Undirected edges are kept canonical (`a < b`); directed
/// edges keep their orientation `a -> b`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Edge {
    pub a: NodeId,
    pub b: NodeId,
}

impl Edge {
    pub fn new(a: impl Into<NodeId>, b: impl Into<NodeId>, mode: Mode) -> Result<Edge> {
        let (a, b) = (a.into(), b.into());
        if a == b {
            return Err(Error::SelfLoop(a.0));
        }
        Ok(match mode {
            Mode::Undirected if b < a => Edge { a: b, b: a },
            _ => Edge { a, b },
        })
    }

    pub fn undirected(a: u64, b: u64) -> Result<Edge> {
        Edge::new(a, b, Mode::Undirected)
    }

    pub fn directed(a: u64, b: u64) -> Result<Edge> {
        Edge::new(a, b, Mode::Directed)
    }

    /// Re-canonicalizes under `mode`. Idempotent.
    pub fn canonical(self, mode: Mode) -> Edge {
        match mode {
            Mode::Undirected if self.b < self.a => Edge {
                a: self.b,
                b: self.a,
            },
            _ => self,
        }
    }

    pub fn endpoints(&self) -> [NodeId; 2] {
        [self.a, self.b]
    }

    pub fn contains(&self, node: NodeId) -> bool {
        self.a == node || self.b == node
    }

    /// The endpoint that is not `node`, if `node` is an endpoint.
    pub fn other(&self, node: NodeId) -> Option<NodeId> {
        if self.a == node {
            Some(self.b)
        } else if self.b == node {
            Some(self.a)
        } else {
            None
        }
    }
}

impl fmt::Display for Edge {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.a, self.b)
    }
}

/// Edge adjacency. Undirected: the edges share an endpoint. Directed: the
/// head of one is the tail of the other.
pub fn adjacent(k: &Edge, k2: &Edge, mode: Mode) -> bool {
    match mode {
        Mode::Undirected => k.contains(k2.a) || k.contains(k2.b),
        Mode::Directed => k.b == k2.a || k.a == k2.b,
    }
}

/// An ordered sequence of distinct edges; position in the sequence is the
/// arrival order.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EdgeStream {
    mode: Mode,
    edges: Vec<Edge>,
    order_seed: Option<u64>,
}

impl EdgeStream {
    /// Builds a stream from edges, dropping repeats. Edges are
    /// canonicalized under `mode`.
    pub fn from_edges(mode: Mode, edges: impl IntoIterator<Item = Edge>) -> EdgeStream {
        let mut seen = HashSet::new();
        let edges = edges
            .into_iter()
            .map(|e| e.canonical(mode))
            .filter(|e| seen.insert(*e))
            .collect();
        EdgeStream {
            mode,
            edges,
            order_seed: None,
        }
    }

    /// Convenience constructor from raw pairs; self-loops are rejected.
    pub fn from_pairs(mode: Mode, pairs: &[(u64, u64)]) -> Result<EdgeStream> {
        let edges = pairs
            .iter()
            .map(|&(a, b)| Edge::new(a, b, mode))
            .collect::<Result<Vec<_>>>()?;
        Ok(EdgeStream::from_edges(mode, edges))
    }

    pub fn mode(&self) -> Mode {
        self.mode
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn len(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }

    pub fn order_seed(&self) -> Option<u64> {
        self.order_seed
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Edge> {
        self.edges.iter()
    }

    /// Returns the stream reordered by the permutation `order`, where
    /// `order[i]` is the current position of the edge that arrives i-th.
    pub fn reordered(&self, order: &[usize]) -> Result<EdgeStream> {
        let mut used = vec![false; self.len()];
        if order.len() != self.len() {
            return Err(Error::Config(format!(
                "order has {} entries for a stream of {}",
                order.len(),
                self.len()
            )));
        }
        for &i in order {
            if i >= self.len() || std::mem::replace(&mut used[i], true) {
                return Err(Error::Config("order is not a permutation".into()));
            }
        }
        Ok(EdgeStream {
            mode: self.mode,
            edges: order.iter().map(|&i| self.edges[i]).collect(),
            order_seed: None,
        })
    }

    /// Uniformly random reordering (Fisher-Yates), deterministic in `seed`.
    pub fn permute(&self, seed: u64) -> EdgeStream {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut edges = self.edges.clone();
        edges.shuffle(&mut rng);
        EdgeStream {
            mode: self.mode,
            edges,
            order_seed: Some(seed),
        }
    }
}

impl<'a> IntoIterator for &'a EdgeStream {
    type Item = &'a Edge;
    type IntoIter = std::slice::Iter<'a, Edge>;

    fn into_iter(self) -> Self::IntoIter {
        self.edges.iter()
    }
}

/// Line accounting from [`ingest_edge_list`].
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct IngestReport {
    /// Non-blank, non-comment lines read.
    pub lines: usize,
    pub self_loops: usize,
    pub duplicates: usize,
}

impl IngestReport {
    pub fn dropped(&self) -> usize {
        self.self_loops + self.duplicates
    }
}

fn parse_node(token: &str, line: usize) -> Result<u64> {
    token.parse::<u64>().map_err(|_| Error::Parse {
        line,
        message: format!("node token {token:?} is not an unsigned integer"),
    })
}

/// Reads a whitespace-separated edge list. Lines starting with `#` or `%`
/// and blank lines are skipped; columns past the second are ignored.
pub fn ingest_edge_list<R: BufRead>(source: R, mode: Mode) -> Result<(EdgeStream, IngestReport)> {
    let mut report = IngestReport::default();
    let mut seen = HashSet::new();
    let mut edges = Vec::new();

    for (idx, line) in source.lines().enumerate() {
        let line = line?;
        let lineno = idx + 1;
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') || trimmed.starts_with('%') {
            continue;
        }
        report.lines += 1;

        let mut tokens = trimmed.split_whitespace();
        let (Some(a), Some(b)) = (tokens.next(), tokens.next()) else {
            return Err(Error::Parse {
                line: lineno,
                message: "expected two node tokens".into(),
            });
        };
        let (a, b) = (parse_node(a, lineno)?, parse_node(b, lineno)?);
        if a == b {
            report.self_loops += 1;
            continue;
        }
        let edge = Edge::new(a, b, mode)?;
        if seen.insert(edge) {
            edges.push(edge);
        } else {
            report.duplicates += 1;
        }
    }

    if edges.is_empty() {
        return Err(Error::EmptyGraph);
    }
    Ok((
        EdgeStream {
            mode,
            edges,
            order_seed: None,
        },
        report,
    ))
}
