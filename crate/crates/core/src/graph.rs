//! Undirected simple graphs with an alive-mask.
//!
//! Nodes are never physically deleted. Removal flips the alive flag, so the
//! original degree sequence and node count stay available to the attack
//! samplers and to reporting, while traversals only see alive nodes.

use std::collections::{HashSet, VecDeque};
use std::fmt::Write as _;
use std::io::{self, Write};
use std::path::Path;

use thiserror::Error;

use crate::analytic::DegreeDistribution;

#[derive(Debug, Error)]
pub enum GraphError {
    #[error("edge ({u}, {v}) has an endpoint outside 0..{node_count}")]
    EndpointOutOfRange {
        u: usize,
        v: usize,
        node_count: usize,
    },
    #[error("self-loop on node {0}")]
    SelfLoop(usize),
    #[error("duplicate edge ({0}, {1})")]
    DuplicateEdge(usize, usize),
    #[error("base count must be positive")]
    ZeroBaseCount,
    #[error("graph has no alive nodes")]
    NoAliveNodes,
    #[error("edge list line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("cannot access {path}")]
    Io { path: String, source: io::Error },
}

/// An undirected simple graph on nodes `0..node_count`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graph {
    adjacency: Vec<Vec<usize>>,
    edges: Vec<(usize, usize)>,
    alive: Vec<bool>,
    alive_count: usize,
}

impl Graph {
    /// Builds a graph with every node alive. Self-loops, duplicate edges and
    /// out-of-range endpoints are rejected.
    pub fn new<I>(node_count: usize, edges: I) -> Result<Self, GraphError>
    where
        I: IntoIterator<Item = (usize, usize)>,
    {
        let mut adjacency = vec![Vec::new(); node_count];
        let mut seen = HashSet::new();
        let mut stored = Vec::new();
        for (u, v) in edges {
            if u >= node_count || v >= node_count {
                return Err(GraphError::EndpointOutOfRange { u, v, node_count });
            }
            if u == v {
                return Err(GraphError::SelfLoop(u));
            }
            let key = (u.min(v), u.max(v));
            if !seen.insert(key) {
                return Err(GraphError::DuplicateEdge(u, v));
            }
            adjacency[u].push(v);
            adjacency[v].push(u);
            stored.push(key);
        }
        Ok(Graph {
            adjacency,
            edges: stored,
            alive: vec![true; node_count],
            alive_count: node_count,
        })
    }

    pub fn node_count(&self) -> usize {
        self.adjacency.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    /// Edges as `(min, max)` pairs in insertion order.
    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.adjacency[v]
    }

    /// Degree in the original graph, ignoring the alive-mask.
    pub fn degree(&self, v: usize) -> usize {
        self.adjacency[v].len()
    }

    /// Number of alive neighbours of `v`.
    pub fn alive_degree(&self, v: usize) -> usize {
        self.adjacency[v].iter().filter(|&&w| self.alive[w]).count()
    }

    pub fn degrees(&self) -> Vec<usize> {
        self.adjacency.iter().map(Vec::len).collect()
    }

    pub fn is_alive(&self, v: usize) -> bool {
        self.alive[v]
    }

    pub fn alive_count(&self) -> usize {
        self.alive_count
    }

    pub fn alive_nodes(&self) -> impl Iterator<Item = usize> + '_ {
        self.alive
            .iter()
            .enumerate()
            .filter_map(|(v, &a)| a.then_some(v))
    }

    /// Marks `v` dead. Returns false if it already was.
    pub fn remove(&mut self, v: usize) -> bool {
        if self.alive[v] {
            self.alive[v] = false;
            self.alive_count -= 1;
            true
        } else {
            false
        }
    }

    /// Brings every node back to life.
    pub fn revive_all(&mut self) {
        self.alive.iter_mut().for_each(|a| *a = true);
        self.alive_count = self.node_count();
    }

    /// Connected components of the subgraph induced by alive nodes.
    ///
    /// Labels are handed out in order of each component's smallest node, so
    /// among equally large components the first label wins ties.
    pub fn components(&self) -> ComponentLabeling {
        let n = self.node_count();
        let mut component_id = vec![None; n];
        let mut component_sizes = Vec::new();
        let mut queue = VecDeque::new();
        for start in 0..n {
            if !self.alive[start] || component_id[start].is_some() {
                continue;
            }
            let label = component_sizes.len();
            component_id[start] = Some(label);
            queue.push_back(start);
            let mut size = 0;
            while let Some(v) = queue.pop_front() {
                size += 1;
                for &w in &self.adjacency[v] {
                    if self.alive[w] && component_id[w].is_none() {
                        component_id[w] = Some(label);
                        queue.push_back(w);
                    }
                }
            }
            component_sizes.push(size);
        }
        ComponentLabeling::new(component_id, component_sizes)
    }

    /// Alias kept for call sites that only care about the giant.
    pub fn largest_component(&self) -> ComponentLabeling {
        self.components()
    }

    /// Largest alive component size divided by `base_count`, normally the
    /// original network size rather than the number of survivors.
    pub fn giant_fraction(&self, base_count: usize) -> Result<f64, GraphError> {
        if base_count == 0 {
            return Err(GraphError::ZeroBaseCount);
        }
        Ok(self.components().largest_size() as f64 / base_count as f64)
    }

    /// Empirical degree distribution over alive nodes, counting only edges
    /// whose endpoints are both alive.
    pub fn degree_distribution(&self) -> Result<DegreeDistribution, GraphError> {
        if self.alive_count == 0 {
            return Err(GraphError::NoAliveNodes);
        }
        let degrees = self.alive_nodes().map(|v| self.alive_degree(v));
        Ok(DegreeDistribution::from_degrees(degrees))
    }

    /// Parses the edge-list text format: a `n <count>` header followed by
    /// one `u v` pair per line. Lines starting with `#` are comments.
    pub fn parse_edge_list(text: &str) -> Result<Self, GraphError> {
        let mut node_count = None;
        let mut edges = Vec::new();
        for (idx, raw) in text.lines().enumerate() {
            let line_no = idx + 1;
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let mut fields = line.split_whitespace();
            let first = fields.next().unwrap_or_default();
            let second = fields.next();
            if fields.next().is_some() {
                return Err(parse_error(line_no, "expected two fields"));
            }
            match node_count {
                None => {
                    if first != "n" {
                        return Err(parse_error(line_no, "missing `n <node_count>` header"));
                    }
                    let count = second
                        .ok_or_else(|| parse_error(line_no, "missing node count"))?
                        .parse::<usize>()
                        .map_err(|e| parse_error(line_no, &e.to_string()))?;
                    node_count = Some(count);
                }
                Some(_) => {
                    let second = second.ok_or_else(|| parse_error(line_no, "expected `u v`"))?;
                    let u = first
                        .parse::<usize>()
                        .map_err(|e| parse_error(line_no, &e.to_string()))?;
                    let v = second
                        .parse::<usize>()
                        .map_err(|e| parse_error(line_no, &e.to_string()))?;
                    edges.push((u, v));
                }
            }
        }
        let node_count = node_count.ok_or_else(|| parse_error(0, "empty edge list"))?;
        Graph::new(node_count, edges)
    }

    pub fn to_edge_list(&self) -> String {
        let mut out = String::with_capacity(16 * (self.edges.len() + 1));
        let _ = writeln!(out, "n {}", self.node_count());
        for &(u, v) in &self.edges {
            let _ = writeln!(out, "{u} {v}");
        }
        out
    }

    pub fn write_edge_list<W: Write>(&self, mut writer: W) -> io::Result<()> {
        writer.write_all(self.to_edge_list().as_bytes())
    }

    pub fn read_edge_list_file(path: &Path) -> Result<Self, GraphError> {
        let text = std::fs::read_to_string(path).map_err(|source| GraphError::Io {
            path: path.display().to_string(),
            source,
        })?;
        Self::parse_edge_list(&text)
    }

    pub fn write_edge_list_file(&self, path: &Path) -> Result<(), GraphError> {
        std::fs::write(path, self.to_edge_list()).map_err(|source| GraphError::Io {
            path: path.display().to_string(),
            source,
        })
    }
}

fn parse_error(line: usize, message: &str) -> GraphError {
    GraphError::Parse {
        line,
        message: message.to_string(),
    }
}

/// Component labels over the alive nodes of a [`Graph`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ComponentLabeling {
    component_id: Vec<Option<usize>>,
    component_sizes: Vec<usize>,
    giant: Option<usize>,
}

impl ComponentLabeling {
    fn new(component_id: Vec<Option<usize>>, component_sizes: Vec<usize>) -> Self {
        // First maximum, i.e. the component holding the lowest node index.
        let mut giant: Option<usize> = None;
        for (label, &size) in component_sizes.iter().enumerate() {
            if giant.is_none_or(|g| size > component_sizes[g]) {
                giant = Some(label);
            }
        }
        ComponentLabeling {
            component_id,
            component_sizes,
            giant,
        }
    }

    /// Label of `v`, or `None` for dead nodes.
    pub fn component_of(&self, v: usize) -> Option<usize> {
        self.component_id[v]
    }

    pub fn component_sizes(&self) -> &[usize] {
        &self.component_sizes
    }

    pub fn component_count(&self) -> usize {
        self.component_sizes.len()
    }

    pub fn largest_size(&self) -> usize {
        self.giant.map_or(0, |g| self.component_sizes[g])
    }

    pub fn giant_label(&self) -> Option<usize> {
        self.giant
    }

    pub fn in_giant(&self, v: usize) -> bool {
        self.giant.is_some() && self.component_id[v] == self.giant
    }

    pub fn members(&self, label: usize) -> Vec<usize> {
        self.component_id
            .iter()
            .enumerate()
            .filter_map(|(v, &c)| (c == Some(label)).then_some(v))
            .collect()
    }

    /// Members of the largest component if it holds at least
    /// `threshold * base_count` nodes, the "at least cn vertices" reading of
    /// a giant component. A threshold of 0 accepts any nonempty component.
    pub fn giant_members(&self, threshold: f64, base_count: usize) -> Option<Vec<usize>> {
        let giant = self.giant?;
        let size = self.component_sizes[giant] as f64;
        (size >= threshold * base_count as f64).then(|| self.members(giant))
    }
}
