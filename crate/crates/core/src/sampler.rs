//! Single-pass graph sample-and-hold.
//!
//! An arriving edge is selected with probability `p` when neither endpoint
//! touches the held sample, with probability `q` when it is adjacent to a
//! held edge, and (with triangle closure enabled) with probability 1 when it
//! would close a triangle among held edges. Rejected edges are gone for
//! good. Each held edge remembers only its [`ProbClass`]; the numeric
//! probability is resolved through the [`SamplerConfig`].

use std::collections::{HashMap, HashSet};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{Edge, EdgeStream, Mode, NodeId};

/// Smallest selection probability accepted by [`SamplerConfig::validate`].
pub const MIN_PROBABILITY: f64 = 1e-6;

/// Which selection rule admitted an edge. The discriminants are the 2-bit
/// storage codes.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[repr(u8)]
pub enum ProbClass {
    /// Fresh edge, selected with probability `p`.
    P = 0b00,
    /// Adjacent to the held sample, selected with probability `q`.
    Q = 0b01,
    /// Closes a held triangle, selected with probability 1.
    One = 0b10,
}

impl ProbClass {
    pub fn bits(self) -> u8 {
        self as u8
    }

    pub fn from_bits(bits: u8) -> Option<ProbClass> {
        match bits {
            0b00 => Some(ProbClass::P),
            0b01 => Some(ProbClass::Q),
            0b10 => Some(ProbClass::One),
            _ => None,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SamplerConfig {
    pub p: f64,
    pub q: f64,
    pub triangle_closure: bool,
    pub seed: u64,
}

impl SamplerConfig {
    /// gSH(p, q): no triangle closure.
    pub fn gsh(p: f64, q: f64) -> SamplerConfig {
        SamplerConfig {
            p,
            q,
            triangle_closure: false,
            seed: 0,
        }
    }

    /// gSH_T(p, q): triangle-closing edges are always kept.
    pub fn gsh_t(p: f64, q: f64) -> SamplerConfig {
        SamplerConfig {
            triangle_closure: true,
            ..SamplerConfig::gsh(p, q)
        }
    }

    pub fn with_seed(self, seed: u64) -> SamplerConfig {
        SamplerConfig { seed, ..self }
    }

    pub fn with_triangle_closure(self, triangle_closure: bool) -> SamplerConfig {
        SamplerConfig {
            triangle_closure,
            ..self
        }
    }

    pub fn probability(&self, class: ProbClass) -> f64 {
        match class {
            ProbClass::P => self.p,
            ProbClass::Q => self.q,
            ProbClass::One => 1.0,
        }
    }

    pub fn validate(&self, mode: Mode) -> Result<()> {
        for (name, value) in [("p", self.p), ("q", self.q)] {
            if !(MIN_PROBABILITY..=1.0).contains(&value) {
                return Err(Error::InvalidProbability {
                    name,
                    value,
                    min: MIN_PROBABILITY,
                });
            }
        }
        if self.triangle_closure && mode.is_directed() {
            return Err(Error::DirectedTriangleClosure);
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SampledEdge {
    pub edge: Edge,
    pub class: ProbClass,
    /// Zero-based position of the edge in the stream.
    pub arrival: usize,
}

#[derive(Clone, Debug, Default)]
struct NodeEntry {
    /// Indices into `held` of edges touching this node.
    incident: Vec<usize>,
    /// Undirected held neighbors, for triangle-closure checks.
    neighbors: HashSet<NodeId>,
    out_degree: usize,
    in_degree: usize,
}

/// The held sample plus the node index the selection rules consult.
#[derive(Clone, Debug)]
pub struct SampleState {
    config: SamplerConfig,
    mode: Mode,
    held: Vec<SampledEdge>,
    nodes: HashMap<NodeId, NodeEntry>,
}

/// Result of offering one edge to the sampler.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Step {
    pub selected: bool,
    pub class: ProbClass,
}

impl SampleState {
    pub fn new(config: SamplerConfig, mode: Mode) -> Result<SampleState> {
        config.validate(mode)?;
        Ok(SampleState {
            config,
            mode,
            held: Vec::new(),
            nodes: HashMap::new(),
        })
    }

    /// Rebuilds a state from an explicit held list, e.g. a sample read back
    /// from storage or a hand-built fixture. Classes are taken as given.
    pub fn from_held(
        config: SamplerConfig,
        mode: Mode,
        held: impl IntoIterator<Item = SampledEdge>,
    ) -> Result<SampleState> {
        let mut state = SampleState::new(config, mode)?;
        for sampled in held {
            state.hold(sampled);
        }
        Ok(state)
    }

    pub fn config(&self) -> &SamplerConfig {
        &self.config
    }

    pub fn mode(&self) -> Mode {
        self.mode
    }

    pub fn held(&self) -> &[SampledEdge] {
        &self.held
    }

    pub fn len(&self) -> usize {
        self.held.len()
    }

    pub fn is_empty(&self) -> bool {
        self.held.is_empty()
    }

    /// Selection probability of the held edge at `idx`.
    pub fn probability(&self, idx: usize) -> f64 {
        self.config.probability(self.held[idx].class)
    }

    /// Horvitz-Thompson weight `1/p` of the held edge at `idx`.
    pub fn weight(&self, idx: usize) -> f64 {
        1.0 / self.probability(idx)
    }

    /// Held-edge indices incident to `node`.
    pub fn incident(&self, node: NodeId) -> &[usize] {
        self.nodes
            .get(&node)
            .map(|n| n.incident.as_slice())
            .unwrap_or(&[])
    }

    /// Nodes touched by at least one held edge, in no particular order.
    pub fn nodes(&self) -> impl Iterator<Item = NodeId> + '_ {
        self.nodes.keys().copied()
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    fn closes_triangle(&self, k: &Edge) -> bool {
        let (Some(na), Some(nb)) = (self.nodes.get(&k.a), self.nodes.get(&k.b)) else {
            return false;
        };
        let (small, large) = if na.neighbors.len() <= nb.neighbors.len() {
            (&na.neighbors, &nb.neighbors)
        } else {
            (&nb.neighbors, &na.neighbors)
        };
        small.iter().any(|w| large.contains(w))
    }

    fn touches_sample(&self, k: &Edge) -> bool {
        match self.mode {
            Mode::Undirected => self.nodes.contains_key(&k.a) || self.nodes.contains_key(&k.b),
            // some held edge leaves k's head, or enters k's tail
            Mode::Directed => {
                self.nodes.get(&k.b).is_some_and(|n| n.out_degree > 0)
                    || self.nodes.get(&k.a).is_some_and(|n| n.in_degree > 0)
            }
        }
    }

    /// Selection rule in force for `k` against the current sample.
    pub fn classify(&self, k: &Edge) -> ProbClass {
        if self.config.triangle_closure && self.closes_triangle(k) {
            ProbClass::One
        } else if self.touches_sample(k) {
            ProbClass::Q
        } else {
            ProbClass::P
        }
    }

    fn hold(&mut self, sampled: SampledEdge) {
        let idx = self.held.len();
        let Edge { a, b } = sampled.edge;
        let tail = self.nodes.entry(a).or_default();
        tail.incident.push(idx);
        tail.neighbors.insert(b);
        tail.out_degree += 1;
        let head = self.nodes.entry(b).or_default();
        head.incident.push(idx);
        head.neighbors.insert(a);
        head.in_degree += 1;
        self.held.push(sampled);
    }

    /// Offers `k` (arriving at stream position `arrival`). Exactly one
    /// uniform is drawn from `rng` whatever the class.
    pub fn step<R: Rng + ?Sized>(&mut self, k: Edge, arrival: usize, rng: &mut R) -> Step {
        let class = self.classify(&k);
        let u: f64 = rng.gen();
        let selected = u < self.config.probability(class);
        if selected {
            self.hold(SampledEdge {
                edge: k,
                class,
                arrival,
            });
        }
        Step { selected, class }
    }

    /// Appends `k` with a forced decision. Used by exhaustive enumeration.
    pub(crate) fn force(&mut self, k: Edge, arrival: usize, class: ProbClass) {
        self.hold(SampledEdge {
            edge: k,
            class,
            arrival,
        });
    }
}

/// Streaming driver: owns the sample and the generator for one pass.
#[derive(Debug)]
pub struct Sampler {
    state: SampleState,
    rng: ChaCha8Rng,
    arrivals: usize,
}

impl Sampler {
    pub fn new(config: SamplerConfig, mode: Mode) -> Result<Sampler> {
        Ok(Sampler {
            state: SampleState::new(config, mode)?,
            rng: ChaCha8Rng::seed_from_u64(config.seed),
            arrivals: 0,
        })
    }

    pub fn offer(&mut self, k: Edge) -> Step {
        let arrival = self.arrivals;
        self.arrivals += 1;
        self.state.step(k, arrival, &mut self.rng)
    }

    pub fn state(&self) -> &SampleState {
        &self.state
    }

    pub fn arrivals(&self) -> usize {
        self.arrivals
    }

    pub fn finish(self) -> SampleState {
        self.state
    }
}

/// One pass over `stream` in order.
pub fn run(stream: &EdgeStream, config: SamplerConfig) -> Result<SampleState> {
    let mut sampler = Sampler::new(config, stream.mode())?;
    for &k in stream {
        sampler.offer(k);
    }
    Ok(sampler.finish())
}

/// Held edges over stream length.
pub fn sampling_fraction(state: &SampleState, stream: &EdgeStream) -> Result<f64> {
    if stream.is_empty() {
        return Err(Error::EmptyStream);
    }
    Ok(state.len() as f64 / stream.len() as f64)
}
