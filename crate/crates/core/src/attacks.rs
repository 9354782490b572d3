//! Attack samplers for the communication network.
//!
//! All samplers draw without replacement from the alive nodes. Targeted
//! attacks weight each node by its degree in the pre-attack graph; the
//! weights stay frozen while picks are made.

use rand::prelude::*;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::Graph;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum AttackError {
    #[error("cannot attack {requested} nodes, only {alive} alive")]
    TooManyNodes { requested: usize, alive: usize },
    #[error("unknown attack kind `{0}`")]
    UnknownKind(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AttackKind {
    Random,
    Targeted,
    Mixed,
}

impl AttackKind {
    pub const ALL: [AttackKind; 3] = [AttackKind::Random, AttackKind::Targeted, AttackKind::Mixed];

    pub fn as_str(self) -> &'static str {
        match self {
            AttackKind::Random => "random",
            AttackKind::Targeted => "targeted",
            AttackKind::Mixed => "mixed",
        }
    }
}

impl std::fmt::Display for AttackKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for AttackKind {
    type Err = AttackError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "random" => Ok(AttackKind::Random),
            "targeted" => Ok(AttackKind::Targeted),
            "mixed" => Ok(AttackKind::Mixed),
            other => Err(AttackError::UnknownKind(other.to_string())),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct AttackSpec {
    pub kind: AttackKind,
    pub count: usize,
    pub seed: u64,
}

impl AttackSpec {
    pub fn new(kind: AttackKind, count: usize, seed: u64) -> Self {
        AttackSpec { kind, count, seed }
    }
}

/// Attacked nodes in pick order, with the sampling weight each had when it
/// was picked (degree for targeted picks, 1 for uniform picks).
#[derive(Debug, Clone, PartialEq)]
pub struct AttackResult {
    pub attacked: Vec<usize>,
    pub weights_used: Vec<f64>,
}

impl AttackResult {
    fn with_capacity(n: usize) -> Self {
        AttackResult {
            attacked: Vec::with_capacity(n),
            weights_used: Vec::with_capacity(n),
        }
    }

    pub fn len(&self) -> usize {
        self.attacked.len()
    }

    pub fn is_empty(&self) -> bool {
        self.attacked.is_empty()
    }

    /// Newline-separated node indices.
    pub fn to_lines(&self) -> String {
        let mut out = String::new();
        for v in &self.attacked {
            out.push_str(&v.to_string());
            out.push('\n');
        }
        out
    }
}

/// Dispatches on `spec.kind`.
pub fn sample_attack(g: &Graph, spec: &AttackSpec) -> Result<AttackResult, AttackError> {
    match spec.kind {
        AttackKind::Random => sample_random(g, spec),
        AttackKind::Targeted => sample_targeted(g, spec),
        AttackKind::Mixed => sample_mixed(g, spec),
    }
}

fn check_count(g: &Graph, count: usize) -> Result<(), AttackError> {
    if count > g.alive_count() {
        return Err(AttackError::TooManyNodes {
            requested: count,
            alive: g.alive_count(),
        });
    }
    Ok(())
}

/// `count` alive nodes, uniformly without replacement.
pub fn sample_random(g: &Graph, spec: &AttackSpec) -> Result<AttackResult, AttackError> {
    check_count(g, spec.count)?;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let mut pool = Pool::new(g);
    let mut result = AttackResult::with_capacity(spec.count);
    pool.pick_uniform(spec.count, &mut rng, &mut result);
    Ok(result)
}

/// `count` alive nodes, picked one at a time with probability proportional
/// to degree among the nodes not yet picked.
pub fn sample_targeted(g: &Graph, spec: &AttackSpec) -> Result<AttackResult, AttackError> {
    check_count(g, spec.count)?;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let mut pool = Pool::new(g);
    let mut result = AttackResult::with_capacity(spec.count);
    pool.pick_weighted(spec.count, &mut rng, &mut result);
    Ok(result)
}

/// `ceil(count/2)` targeted picks followed by `floor(count/2)` uniform picks
/// from what is left.
pub fn sample_mixed(g: &Graph, spec: &AttackSpec) -> Result<AttackResult, AttackError> {
    check_count(g, spec.count)?;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let mut pool = Pool::new(g);
    let mut result = AttackResult::with_capacity(spec.count);
    let targeted = spec.count.div_ceil(2);
    pool.pick_weighted(targeted, &mut rng, &mut result);
    pool.pick_uniform(spec.count - targeted, &mut rng, &mut result);
    Ok(result)
}

/// Alive nodes still available for picking.
struct Pool {
    /// Degree of each node in the pre-attack graph, 0 for dead nodes.
    weights: Vec<u64>,
    available: Vec<bool>,
    /// Unpicked nodes, unordered. `slot[v]` is v's index here.
    remaining: Vec<usize>,
    slot: Vec<usize>,
    tree: Fenwick,
}

impl Pool {
    fn new(g: &Graph) -> Self {
        let weights = (0..g.node_count())
            .map(|v| {
                if g.is_alive(v) {
                    g.alive_degree(v) as u64
                } else {
                    0
                }
            })
            .collect();
        Self::with_weights(weights, g.alive_nodes())
    }

    fn with_weights(weights: Vec<u64>, alive: impl Iterator<Item = usize>) -> Self {
        let n = weights.len();
        let mut available = vec![false; n];
        let mut remaining = Vec::new();
        let mut slot = vec![usize::MAX; n];
        for v in alive {
            available[v] = true;
            slot[v] = remaining.len();
            remaining.push(v);
        }
        let tree = Fenwick::from_weights(&weights);
        Pool {
            weights,
            available,
            remaining,
            slot,
            tree,
        }
    }

    fn take(&mut self, v: usize) {
        debug_assert!(self.available[v]);
        self.available[v] = false;
        if self.weights[v] > 0 {
            self.tree.sub(v, self.weights[v]);
        }
        let i = self.slot[v];
        self.remaining.swap_remove(i);
        if let Some(&moved) = self.remaining.get(i) {
            self.slot[moved] = i;
        }
    }

    fn pick_uniform<R: Rng>(&mut self, count: usize, rng: &mut R, out: &mut AttackResult) {
        for _ in 0..count {
            let v = self.remaining[rng.gen_range(0..self.remaining.len())];
            self.take(v);
            out.attacked.push(v);
            out.weights_used.push(1.0);
        }
    }

    /// Degree-proportional picks. Once only zero-degree nodes remain, the
    /// rest are drawn uniformly from them.
    fn pick_weighted<R: Rng>(&mut self, count: usize, rng: &mut R, out: &mut AttackResult) {
        for _ in 0..count {
            let total = self.tree.total();
            let v = if total == 0 {
                self.remaining[rng.gen_range(0..self.remaining.len())]
            } else {
                self.tree.find(rng.gen_range(0..total))
            };
            let w = self.weights[v] as f64;
            self.take(v);
            out.attacked.push(v);
            out.weights_used.push(w);
        }
    }
}

/// Binary indexed tree over integer weights for O(log n) prefix-sum search.
struct Fenwick {
    tree: Vec<u64>,
    total: u64,
}

impl Fenwick {
    fn from_weights(weights: &[u64]) -> Self {
        let n = weights.len();
        let mut tree = vec![0u64; n + 1];
        tree[1..].copy_from_slice(weights);
        for i in 1..=n {
            let parent = i + (i & i.wrapping_neg());
            if parent <= n {
                tree[parent] += tree[i];
            }
        }
        Fenwick {
            tree,
            total: weights.iter().sum(),
        }
    }

    fn total(&self) -> u64 {
        self.total
    }

    fn sub(&mut self, index: usize, amount: u64) {
        self.total -= amount;
        let mut i = index + 1;
        while i < self.tree.len() {
            self.tree[i] -= amount;
            i += i & i.wrapping_neg();
        }
    }

    /// Smallest index whose inclusive prefix sum exceeds `target`.
    fn find(&self, mut target: u64) -> usize {
        let n = self.tree.len() - 1;
        let mut pos = 0;
        let mut step = n.next_power_of_two();
        while step > 0 {
            let next = pos + step;
            if next <= n && self.tree[next] <= target {
                pos = next;
                target -= self.tree[next];
            }
            step >>= 1;
        }
        pos
    }
}
