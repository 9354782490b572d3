//! Network generators and the interdependent comm/power grid.

use std::collections::HashSet;
use std::fmt::Write as _;
use std::path::Path;

use rand::distributions::WeightedIndex;
use rand::prelude::*;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::analytic::DegreeDistribution;
use crate::graph::{Graph, GraphError};

pub const DEFAULT_ALPHA: f64 = 2.5;
pub const DEFAULT_MIN_DEGREE: usize = 2;

/// Upper bound on degree resamples while fixing sequence parity, and on
/// rewiring attempts while repairing self-loops and multi-edges.
const MAX_REPAIR_ATTEMPTS: usize = 100_000;

#[derive(Debug, Error)]
pub enum GenerationError {
    #[error("invalid recipe: {0}")]
    InvalidRecipe(String),
    #[error("could not realise a simple graph after {0} attempts")]
    Infeasible(usize),
    #[error("network must have at least one node")]
    EmptyNetwork,
    #[error("comm node {comm} is supported by power node {power}, but the power network has {power_count} nodes")]
    SupportOutOfRange {
        comm: usize,
        power: usize,
        power_count: usize,
    },
    #[error("expected {expected} interlinks, found {found}")]
    InterlinkCount { expected: usize, found: usize },
    #[error("interlink line {line}: {message}")]
    InterlinkParse { line: usize, message: String },
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error("cannot access {path}")]
    Io {
        path: String,
        source: std::io::Error,
    },
}

/// How to build one network. Serialized with a `kind` tag, e.g.
/// `{"kind": "scale_free", "n": 10000, "alpha": 2.5, "min_degree": 2, "seed": 1}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum NetworkRecipe {
    /// Configuration model over a power-law degree sequence truncated at
    /// `floor(sqrt(n))`.
    ScaleFree {
        n: usize,
        #[serde(default = "default_alpha")]
        alpha: f64,
        #[serde(default = "default_min_degree")]
        min_degree: usize,
        seed: u64,
    },
    /// G(n, p).
    ErdosRenyi { n: usize, p: f64, seed: u64 },
    /// Preferential attachment, `min_degree` edges per new node.
    BarabasiAlbert {
        n: usize,
        #[serde(default = "default_min_degree")]
        min_degree: usize,
        seed: u64,
    },
}

fn default_alpha() -> f64 {
    DEFAULT_ALPHA
}

fn default_min_degree() -> usize {
    DEFAULT_MIN_DEGREE
}

impl NetworkRecipe {
    pub fn scale_free(n: usize, alpha: f64, min_degree: usize, seed: u64) -> Self {
        NetworkRecipe::ScaleFree {
            n,
            alpha,
            min_degree,
            seed,
        }
    }

    pub fn erdos_renyi(n: usize, p: f64, seed: u64) -> Self {
        NetworkRecipe::ErdosRenyi { n, p, seed }
    }

    pub fn node_count(&self) -> usize {
        match *self {
            NetworkRecipe::ScaleFree { n, .. }
            | NetworkRecipe::ErdosRenyi { n, .. }
            | NetworkRecipe::BarabasiAlbert { n, .. } => n,
        }
    }

    pub fn seed(&self) -> u64 {
        match *self {
            NetworkRecipe::ScaleFree { seed, .. }
            | NetworkRecipe::ErdosRenyi { seed, .. }
            | NetworkRecipe::BarabasiAlbert { seed, .. } => seed,
        }
    }

    /// Same recipe with a different seed.
    pub fn with_seed(&self, seed: u64) -> Self {
        let mut out = self.clone();
        match &mut out {
            NetworkRecipe::ScaleFree { seed: s, .. }
            | NetworkRecipe::ErdosRenyi { seed: s, .. }
            | NetworkRecipe::BarabasiAlbert { seed: s, .. } => *s = seed,
        }
        out
    }

    pub fn validate(&self) -> Result<(), GenerationError> {
        let invalid = |msg: String| Err(GenerationError::InvalidRecipe(msg));
        match *self {
            NetworkRecipe::ScaleFree {
                n,
                alpha,
                min_degree,
                ..
            } => {
                if !alpha.is_finite() || alpha <= 1.0 {
                    return invalid(format!("alpha must exceed 1, got {alpha}"));
                }
                if min_degree == 0 {
                    return invalid("min_degree must be at least 1".into());
                }
                let max_degree = structural_cutoff(n);
                if max_degree < min_degree {
                    return invalid(format!(
                        "n = {n} gives degree cutoff {max_degree} below min_degree {min_degree}"
                    ));
                }
                Ok(())
            }
            NetworkRecipe::ErdosRenyi { n, p, .. } => {
                if n == 0 {
                    return invalid("n must be positive".into());
                }
                if !(0.0..=1.0).contains(&p) {
                    return invalid(format!("p must lie in [0, 1], got {p}"));
                }
                Ok(())
            }
            NetworkRecipe::BarabasiAlbert { n, min_degree, .. } => {
                if min_degree == 0 {
                    return invalid("min_degree must be at least 1".into());
                }
                if n <= min_degree {
                    return invalid(format!("n = {n} must exceed min_degree {min_degree}"));
                }
                Ok(())
            }
        }
    }
}

/// Degree cutoff `floor(sqrt(n))` for scale-free sequences.
pub fn structural_cutoff(n: usize) -> usize {
    (n as f64).sqrt().floor() as usize
}

/// Builds the network described by `recipe`. Deterministic in the seed.
pub fn generate_network(recipe: &NetworkRecipe) -> Result<Graph, GenerationError> {
    recipe.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(recipe.seed());
    match *recipe {
        NetworkRecipe::ScaleFree {
            n,
            alpha,
            min_degree,
            ..
        } => {
            let degrees = power_law_sequence(n, alpha, min_degree, &mut rng)?;
            configuration_model(&degrees, &mut rng)
        }
        NetworkRecipe::ErdosRenyi { n, p, .. } => erdos_renyi(n, p, &mut rng),
        NetworkRecipe::BarabasiAlbert { n, min_degree, .. } => {
            barabasi_albert(n, min_degree, &mut rng)
        }
    }
}

fn power_law_sequence<R: Rng>(
    n: usize,
    alpha: f64,
    min_degree: usize,
    rng: &mut R,
) -> Result<Vec<usize>, GenerationError> {
    let max_degree = structural_cutoff(n);
    let support: Vec<usize> = (min_degree..=max_degree).collect();
    let weights = support.iter().map(|&k| (k as f64).powf(-alpha));
    let dist =
        WeightedIndex::new(weights).map_err(|e| GenerationError::InvalidRecipe(e.to_string()))?;
    let mut degrees: Vec<usize> = (0..n).map(|_| support[dist.sample(rng)]).collect();
    let mut total: usize = degrees.iter().sum();
    let mut attempts = 0;
    while total % 2 == 1 {
        if attempts == MAX_REPAIR_ATTEMPTS {
            return Err(GenerationError::Infeasible(attempts));
        }
        attempts += 1;
        let v = rng.gen_range(0..n);
        total -= degrees[v];
        degrees[v] = support[dist.sample(rng)];
        total += degrees[v];
    }
    Ok(degrees)
}

/// Random simple graph with exactly the given degree sequence.
///
/// Stubs are shuffled and paired. Pairs that would form a self-loop or a
/// repeated edge are set aside and then placed by swapping with a random
/// existing edge `(a, b)` into `(u, a), (v, b)`, which keeps every degree.
pub fn configuration_model<R: Rng>(
    degrees: &[usize],
    rng: &mut R,
) -> Result<Graph, GenerationError> {
    let n = degrees.len();
    let mut stubs: Vec<usize> = degrees
        .iter()
        .enumerate()
        .flat_map(|(v, &d)| std::iter::repeat_n(v, d))
        .collect();
    if stubs.len() % 2 == 1 {
        return Err(GenerationError::InvalidRecipe(
            "degree sequence has odd sum".into(),
        ));
    }
    stubs.shuffle(rng);

    let key = |u: usize, v: usize| (u.min(v), u.max(v));
    let mut edges: Vec<(usize, usize)> = Vec::with_capacity(stubs.len() / 2);
    let mut present: HashSet<(usize, usize)> = HashSet::with_capacity(stubs.len() / 2);
    let mut leftover = Vec::new();
    for pair in stubs.chunks_exact(2) {
        let (u, v) = (pair[0], pair[1]);
        if u != v && present.insert(key(u, v)) {
            edges.push(key(u, v));
        } else {
            leftover.push((u, v));
        }
    }

    let mut attempts = 0;
    while let Some((u, v)) = leftover.pop() {
        if u != v && !present.contains(&key(u, v)) {
            present.insert(key(u, v));
            edges.push(key(u, v));
            continue;
        }
        loop {
            attempts += 1;
            if attempts > MAX_REPAIR_ATTEMPTS || edges.is_empty() {
                return Err(GenerationError::Infeasible(attempts));
            }
            let idx = rng.gen_range(0..edges.len());
            let (mut a, mut b) = edges[idx];
            if rng.gen::<bool>() {
                std::mem::swap(&mut a, &mut b);
            }
            if u == a || v == b || present.contains(&key(u, a)) || present.contains(&key(v, b)) {
                continue;
            }
            present.remove(&edges[idx]);
            edges.swap_remove(idx);
            for e in [key(u, a), key(v, b)] {
                present.insert(e);
                edges.push(e);
            }
            break;
        }
    }
    Ok(Graph::new(n, edges)?)
}

/// G(n, p) by geometric skipping over the lower-triangular pair sequence,
/// linear in the number of generated edges.
fn erdos_renyi<R: Rng>(n: usize, p: f64, rng: &mut R) -> Result<Graph, GenerationError> {
    let mut edges = Vec::new();
    if p >= 1.0 {
        for v in 1..n {
            edges.extend((0..v).map(|w| (w, v)));
        }
    } else if p > 0.0 {
        let log_q = (1.0 - p).ln();
        let mut v = 1usize;
        let mut w: i64 = -1;
        while v < n {
            let r: f64 = rng.gen();
            w += 1 + ((1.0 - r).ln() / log_q).floor() as i64;
            while w >= v as i64 && v < n {
                w -= v as i64;
                v += 1;
            }
            if v < n {
                edges.push((w as usize, v));
            }
        }
    }
    Ok(Graph::new(n, edges)?)
}

fn barabasi_albert<R: Rng>(n: usize, m: usize, rng: &mut R) -> Result<Graph, GenerationError> {
    let mut edges = Vec::new();
    // Each node appears once per incident edge.
    let mut endpoints = Vec::new();
    let seed_size = m + 1;
    for v in 1..seed_size {
        for w in 0..v {
            edges.push((w, v));
            endpoints.extend([w, v]);
        }
    }
    let mut targets = Vec::with_capacity(m);
    for v in seed_size..n {
        targets.clear();
        while targets.len() < m {
            let t = endpoints[rng.gen_range(0..endpoints.len())];
            if !targets.contains(&t) {
                targets.push(t);
            }
        }
        for &t in &targets {
            edges.push((t, v));
            endpoints.extend([t, v]);
        }
    }
    Ok(Graph::new(n, edges)?)
}

/// Communication network, power network and the support links between them.
///
/// Every comm node has exactly one supporting power node; a power node may
/// support any number of comm nodes (including none).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InterdependentGrid {
    comm: Graph,
    power: Graph,
    support_of_comm: Vec<usize>,
    supporters_of_power: Vec<Vec<usize>>,
}

impl InterdependentGrid {
    pub fn new(
        comm: Graph,
        power: Graph,
        support_of_comm: Vec<usize>,
    ) -> Result<Self, GenerationError> {
        if comm.node_count() == 0 || power.node_count() == 0 {
            return Err(GenerationError::EmptyNetwork);
        }
        if support_of_comm.len() != comm.node_count() {
            return Err(GenerationError::InterlinkCount {
                expected: comm.node_count(),
                found: support_of_comm.len(),
            });
        }
        let mut supporters_of_power = vec![Vec::new(); power.node_count()];
        for (a, &b) in support_of_comm.iter().enumerate() {
            if b >= power.node_count() {
                return Err(GenerationError::SupportOutOfRange {
                    comm: a,
                    power: b,
                    power_count: power.node_count(),
                });
            }
            supporters_of_power[b].push(a);
        }
        Ok(InterdependentGrid {
            comm,
            power,
            support_of_comm,
            supporters_of_power,
        })
    }

    pub fn comm(&self) -> &Graph {
        &self.comm
    }

    pub fn power(&self) -> &Graph {
        &self.power
    }

    pub fn comm_mut(&mut self) -> &mut Graph {
        &mut self.comm
    }

    pub fn power_mut(&mut self) -> &mut Graph {
        &mut self.power
    }

    /// The power node supporting comm node `a`.
    pub fn support_of(&self, a: usize) -> usize {
        self.support_of_comm[a]
    }

    /// Comm nodes supported by power node `b`.
    pub fn supporters_of(&self, b: usize) -> &[usize] {
        &self.supporters_of_power[b]
    }

    pub fn support_map(&self) -> &[usize] {
        &self.support_of_comm
    }

    /// Full scan of both support maps for mutual consistency.
    pub fn support_maps_consistent(&self) -> bool {
        let total: usize = self.supporters_of_power.iter().map(Vec::len).sum();
        total == self.comm.node_count()
            && self
                .supporters_of_power
                .iter()
                .enumerate()
                .all(|(b, list)| {
                    list.iter()
                        .all(|&a| self.support_of_comm.get(a) == Some(&b))
                })
    }

    /// Empirical distribution of supporters per power node.
    pub fn support_degree_distribution(&self) -> DegreeDistribution {
        DegreeDistribution::from_degrees(self.supporters_of_power.iter().map(Vec::len))
    }

    /// Revives every node on both sides.
    pub fn reset(&mut self) {
        self.comm.revive_all();
        self.power.revive_all();
    }

    /// Interlink text: one `a b` line per comm node (a supported by b).
    pub fn interlinks_to_string(&self) -> String {
        let mut out = String::with_capacity(12 * self.support_of_comm.len());
        for (a, b) in self.support_of_comm.iter().enumerate() {
            let _ = writeln!(out, "{a} {b}");
        }
        out
    }

    /// Parses interlink text for a comm network of `comm_count` nodes.
    /// Blank lines and `#` comments are skipped; every comm node must appear
    /// exactly once.
    pub fn parse_interlinks(text: &str, comm_count: usize) -> Result<Vec<usize>, GenerationError> {
        let mut support: Vec<Option<usize>> = vec![None; comm_count];
        let err = |line: usize, message: String| GenerationError::InterlinkParse { line, message };
        for (idx, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let fields: Vec<&str> = line.split_whitespace().collect();
            if fields.len() != 2 {
                return Err(err(idx + 1, "expected `a b`".into()));
            }
            let a: usize = fields[0]
                .parse()
                .map_err(|e| err(idx + 1, format!("{e}")))?;
            let b: usize = fields[1]
                .parse()
                .map_err(|e| err(idx + 1, format!("{e}")))?;
            let slot = support
                .get_mut(a)
                .ok_or_else(|| err(idx + 1, format!("comm node {a} out of range")))?;
            if slot.replace(b).is_some() {
                return Err(err(idx + 1, format!("comm node {a} listed twice")));
            }
        }
        let found = support.iter().filter(|s| s.is_some()).count();
        if found != comm_count {
            return Err(GenerationError::InterlinkCount {
                expected: comm_count,
                found,
            });
        }
        Ok(support.into_iter().flatten().collect())
    }

    /// Writes `comm.edges`, `power.edges` and `interlinks.txt` into `dir`.
    pub fn save(&self, dir: &Path) -> Result<(), GenerationError> {
        std::fs::create_dir_all(dir).map_err(|source| GenerationError::Io {
            path: dir.display().to_string(),
            source,
        })?;
        self.comm.write_edge_list_file(&dir.join(COMM_FILE))?;
        self.power.write_edge_list_file(&dir.join(POWER_FILE))?;
        let path = dir.join(INTERLINK_FILE);
        std::fs::write(&path, self.interlinks_to_string()).map_err(|source| GenerationError::Io {
            path: path.display().to_string(),
            source,
        })
    }

    pub fn load(dir: &Path) -> Result<Self, GenerationError> {
        let comm = Graph::read_edge_list_file(&dir.join(COMM_FILE))?;
        let power = Graph::read_edge_list_file(&dir.join(POWER_FILE))?;
        let path = dir.join(INTERLINK_FILE);
        let text = std::fs::read_to_string(&path).map_err(|source| GenerationError::Io {
            path: path.display().to_string(),
            source,
        })?;
        let support = Self::parse_interlinks(&text, comm.node_count())?;
        Self::new(comm, power, support)
    }
}

pub const COMM_FILE: &str = "comm.edges";
pub const POWER_FILE: &str = "power.edges";
pub const INTERLINK_FILE: &str = "interlinks.txt";

/// Gives every comm node one power supporter chosen uniformly at random,
/// independently (balls into bins).
pub fn assign_support_links(
    comm: Graph,
    power: Graph,
    seed: u64,
) -> Result<InterdependentGrid, GenerationError> {
    if comm.node_count() == 0 || power.node_count() == 0 {
        return Err(GenerationError::EmptyNetwork);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n_power = power.node_count();
    let support = (0..comm.node_count())
        .map(|_| rng.gen_range(0..n_power))
        .collect();
    InterdependentGrid::new(comm, power, support)
}

/// Generates both networks and the interlinks.
pub fn generate_grid(
    comm: &NetworkRecipe,
    power: &NetworkRecipe,
    support_seed: u64,
) -> Result<InterdependentGrid, GenerationError> {
    assign_support_links(
        generate_network(comm)?,
        generate_network(power)?,
        support_seed,
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn complete_graph_when_p_is_one() {
        let g = generate_network(&NetworkRecipe::erdos_renyi(10, 1.0, 3)).unwrap();
        assert_eq!(g.edge_count(), 45);
        let empty = generate_network(&NetworkRecipe::erdos_renyi(10, 0.0, 3)).unwrap();
        assert_eq!(empty.edge_count(), 0);
    }

    #[test]
    fn scale_free_respects_degree_bounds() {
        for seed in 0..5 {
            let g = generate_network(&NetworkRecipe::scale_free(2000, 2.5, 2, seed)).unwrap();
            let degrees = g.degrees();
            assert!(degrees.iter().all(|&d| (2..=44).contains(&d)));
        }
    }

    #[test]
    fn same_seed_same_network() {
        for recipe in [
            NetworkRecipe::scale_free(500, 2.5, 2, 11),
            NetworkRecipe::erdos_renyi(500, 0.01, 11),
            NetworkRecipe::BarabasiAlbert {
                n: 500,
                min_degree: 2,
                seed: 11,
            },
        ] {
            let a = generate_network(&recipe).unwrap();
            let b = generate_network(&recipe).unwrap();
            assert_eq!(a, b);
            let c = generate_network(&recipe.with_seed(12)).unwrap();
            assert_ne!(a, c);
        }
    }

    #[test]
    fn barabasi_albert_edge_count() {
        let g = generate_network(&NetworkRecipe::BarabasiAlbert {
            n: 100,
            min_degree: 3,
            seed: 1,
        })
        .unwrap();
        assert_eq!(g.edge_count(), 6 + 96 * 3);
        assert!(g.degrees().iter().all(|&d| d >= 3));
    }

    #[test]
    fn configuration_model_keeps_degrees() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        // Heavy-tailed sequence that forces many repairs.
        let mut degrees = vec![1usize; 60];
        degrees[0] = 20;
        degrees[1] = 20;
        degrees[2] = 11;
        let g = configuration_model(&degrees, &mut rng).unwrap();
        assert_eq!(g.degrees(), degrees);
    }

    #[test]
    fn infeasible_sequence_errors() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        // Two nodes cannot share three distinct edges.
        assert!(matches!(
            configuration_model(&[3, 3], &mut rng),
            Err(GenerationError::Infeasible(_))
        ));
    }

    #[test]
    fn recipe_validation() {
        assert!(NetworkRecipe::scale_free(100, 0.9, 2, 0)
            .validate()
            .is_err());
        assert!(NetworkRecipe::scale_free(100, 2.5, 0, 0)
            .validate()
            .is_err());
        assert!(NetworkRecipe::scale_free(3, 2.5, 2, 0).validate().is_err());
        assert!(NetworkRecipe::erdos_renyi(10, 1.5, 0).validate().is_err());
        assert!(NetworkRecipe::erdos_renyi(0, 0.5, 0).validate().is_err());
    }

    #[test]
    fn recipe_json() {
        let r: NetworkRecipe =
            serde_json::from_str(r#"{"kind":"scale_free","n":100,"seed":4}"#).unwrap();
        assert_eq!(r, NetworkRecipe::scale_free(100, 2.5, 2, 4));
        let r: NetworkRecipe =
            serde_json::from_str(r#"{"kind":"erdos_renyi","n":100,"p":0.01,"seed":4}"#).unwrap();
        assert_eq!(r, NetworkRecipe::erdos_renyi(100, 0.01, 4));
        // Parameters of another kind are rejected.
        assert!(serde_json::from_str::<NetworkRecipe>(
            r#"{"kind":"erdos_renyi","n":100,"p":0.01,"alpha":2.5,"seed":4}"#
        )
        .is_err());
    }

    #[test]
    fn single_power_node_supports_everything() {
        let comm = Graph::new(5, [(0, 1)]).unwrap();
        let power = Graph::new(1, []).unwrap();
        let grid = assign_support_links(comm, power, 9).unwrap();
        assert!((0..5).all(|a| grid.support_of(a) == 0));
        assert_eq!(grid.supporters_of(0).len(), 5);
        assert!(grid.support_maps_consistent());
    }

    #[test]
    fn support_distribution_counts() {
        let comm = Graph::new(4, []).unwrap();
        let power = Graph::new(2, []).unwrap();
        let grid = InterdependentGrid::new(comm.clone(), power.clone(), vec![0, 0, 1, 1]).unwrap();
        assert_eq!(grid.support_degree_distribution().probability(2), 1.0);
        let grid = InterdependentGrid::new(comm, power, vec![0, 0, 0, 0]).unwrap();
        let d = grid.support_degree_distribution();
        assert_eq!(d.probability(0), 0.5);
        assert_eq!(d.probability(4), 0.5);
    }

    #[test]
    fn grid_rejects_bad_support() {
        let comm = Graph::new(2, []).unwrap();
        let power = Graph::new(2, []).unwrap();
        assert!(InterdependentGrid::new(comm.clone(), power.clone(), vec![0, 2]).is_err());
        assert!(InterdependentGrid::new(comm.clone(), power.clone(), vec![0]).is_err());
        assert!(matches!(
            assign_support_links(comm, Graph::new(0, []).unwrap(), 1),
            Err(GenerationError::EmptyNetwork)
        ));
    }

    #[test]
    fn interlink_parsing() {
        assert_eq!(
            InterdependentGrid::parse_interlinks("# hdr\n1 0\n0 2\n", 2).unwrap(),
            vec![2, 0]
        );
        assert!(InterdependentGrid::parse_interlinks("0 1\n0 1\n", 2).is_err());
        assert!(InterdependentGrid::parse_interlinks("0 1\n", 2).is_err());
        assert!(InterdependentGrid::parse_interlinks("0 x\n", 1).is_err());
    }

    #[test]
    fn save_and_load() {
        let dir = tempfile::tempdir().unwrap();
        let grid = generate_grid(
            &NetworkRecipe::scale_free(300, 2.5, 2, 1),
            &NetworkRecipe::erdos_renyi(100, 0.05, 2),
            3,
        )
        .unwrap();
        grid.save(dir.path()).unwrap();
        assert_eq!(InterdependentGrid::load(dir.path()).unwrap(), grid);
    }
}
