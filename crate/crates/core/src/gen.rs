//! Random scale-free interdependent systems.
//!
//! Each layer grows by the extended Barabási–Albert process: at every step
//! the generator either adds `m` links between existing nodes (probability
//! `p`), rewires `m` links (probability `q`), or attaches a new node by `m`
//! links (the rest). Link ends are chosen preferentially, with weight
//! `degree + 1`. Disconnected layers are discarded and regrown from a fresh
//! random substream.
//!
//! The two layers are then paired by noisy degree-rank matching: nodes of
//! both layers are ranked by degree, rank `r` of layer B is relabelled to
//! rank `r` of layer A, and each adjacent pair of ranks is swapped with a
//! small probability.

use std::collections::BTreeSet;

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::graph::{InterdependentSystem, UndirectedGraph};

pub const DEFAULT_EDGES_PER_STEP: usize = 2;
pub const DEFAULT_LINK_ADDITION: f64 = 0.2;
pub const DEFAULT_SWAP_PROBABILITY: f64 = 0.1;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Which {
    A,
    B,
}

/// Mix probabilities of the extended Barabási–Albert process.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GrowthParams {
    /// Links added or rewired per step.
    pub m: usize,
    /// Probability of a link-addition step.
    pub p: f64,
    /// Probability of a rewiring step.
    pub q: f64,
}

impl GrowthParams {
    /// Mix for a target degree exponent. `beta = 3` is plain preferential
    /// attachment. Otherwise `p` is fixed and `q` solves the mean-field
    /// exponent `1 + (2m(1 - q) + 1 - p - q) / m` of the process for `beta`.
    pub fn for_exponent(beta: f64, m: usize) -> Result<Self> {
        if beta.is_nan() || beta <= 1.0 || m == 0 {
            return Err(invalid(format!("need beta > 1 and m >= 1, got beta = {beta}, m = {m}")));
        }
        if (beta - 3.0).abs() < 1e-9 {
            return Ok(GrowthParams { m, p: 0.0, q: 0.0 });
        }
        let p = DEFAULT_LINK_ADDITION;
        let mf = m as f64;
        let q = (2.0 * mf + 1.0 - p - mf * (beta - 1.0)) / (2.0 * mf + 1.0);
        let q = q.clamp(0.0, 0.95 - p);
        Ok(GrowthParams { m, p, q })
    }

    fn validate(&self) -> Result<()> {
        if self.m == 0 || self.p < 0.0 || self.q < 0.0 || self.p + self.q >= 1.0 {
            return Err(invalid(format!(
                "growth mix needs m >= 1, p, q >= 0 and p + q < 1, got {self:?}"
            )));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GenConfig {
    pub n: usize,
    pub beta_a: f64,
    pub beta_b: f64,
    pub seed: u64,
    pub max_retries: usize,
    /// Links per growth step.
    pub m: usize,
    /// Explicit mixes overriding the ones derived from the exponents.
    pub params_a: Option<GrowthParams>,
    pub params_b: Option<GrowthParams>,
    /// Adjacent-rank swap probability used when pairing the layers.
    pub swap_probability: f64,
}

impl Default for GenConfig {
    fn default() -> Self {
        GenConfig {
            n: 10,
            beta_a: 3.0,
            beta_b: 2.2,
            seed: 0,
            max_retries: 100,
            m: DEFAULT_EDGES_PER_STEP,
            params_a: None,
            params_b: None,
            swap_probability: DEFAULT_SWAP_PROBABILITY,
        }
    }
}

impl GenConfig {
    pub fn new(n: usize, seed: u64) -> Self {
        GenConfig {
            n,
            seed,
            ..Default::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n < 3 {
            return Err(invalid(format!("n must be at least 3, got {}", self.n)));
        }
        if !(self.beta_a > 1.0 && self.beta_b > 1.0) {
            return Err(invalid("exponents must exceed 1"));
        }
        if !(0.0..=1.0).contains(&self.swap_probability) {
            return Err(invalid("swap probability must lie in [0, 1]"));
        }
        Ok(())
    }

    pub fn params(&self, which: Which) -> Result<GrowthParams> {
        let (explicit, beta) = match which {
            Which::A => (self.params_a, self.beta_a),
            Which::B => (self.params_b, self.beta_b),
        };
        let params = match explicit {
            Some(p) => p,
            None => GrowthParams::for_exponent(beta, self.m)?,
        };
        params.validate()?;
        Ok(params)
    }
}

/// Independent stream per purpose and attempt.
fn substream(seed: u64, purpose: u64, attempt: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(purpose << 32 | attempt);
    rng
}

const STREAM_LAYER_A: u64 = 1;
const STREAM_LAYER_B: u64 = 2;
const STREAM_MATCH: u64 = 3;

struct Growth {
    adj: Vec<BTreeSet<usize>>,
}

impl Growth {
    /// Preferential pick among `0..t` minus `i` and its neighbours.
    fn preferential(&self, rng: &mut ChaCha8Rng, t: usize, i: Option<usize>, taken: &BTreeSet<usize>) -> Option<usize> {
        let allowed = |v: usize| Some(v) != i && !taken.contains(&v) && i.is_none_or(|i| !self.adj[i].contains(&v));
        let total: usize = (0..t).filter(|&v| allowed(v)).map(|v| self.adj[v].len() + 1).sum();
        if total == 0 {
            return None;
        }
        let mut ticket = rng.gen_range(0..total);
        for v in (0..t).filter(|&v| allowed(v)) {
            let w = self.adj[v].len() + 1;
            if ticket < w {
                return Some(v);
            }
            ticket -= w;
        }
        None
    }

    fn link(&mut self, a: usize, b: usize) {
        self.adj[a].insert(b);
        self.adj[b].insert(a);
    }

    fn unlink(&mut self, a: usize, b: usize) {
        self.adj[a].remove(&b);
        self.adj[b].remove(&a);
    }
}

fn grow(n: usize, params: GrowthParams, rng: &mut ChaCha8Rng) -> UndirectedGraph {
    let m = params.m;
    let m0 = (m + 1).min(n);
    let mut g = Growth {
        adj: vec![BTreeSet::new(); n],
    };
    for a in 0..m0 {
        for b in a + 1..m0 {
            g.link(a, b);
        }
    }
    let mut t = m0;
    while t < n {
        let r: f64 = rng.gen();
        if r < params.p {
            for _ in 0..m {
                let i = rng.gen_range(0..t);
                if let Some(j) = g.preferential(rng, t, Some(i), &BTreeSet::new()) {
                    g.link(i, j);
                }
            }
        } else if r < params.p + params.q {
            for _ in 0..m {
                let i = rng.gen_range(0..t);
                if g.adj[i].is_empty() {
                    continue;
                }
                let old = *g.adj[i].iter().nth(rng.gen_range(0..g.adj[i].len())).unwrap();
                if let Some(j) = g.preferential(rng, t, Some(i), &BTreeSet::new()) {
                    g.unlink(i, old);
                    g.link(i, j);
                }
            }
        } else {
            let mut targets = BTreeSet::new();
            for _ in 0..m.min(t) {
                if let Some(j) = g.preferential(rng, t, None, &targets) {
                    targets.insert(j);
                }
            }
            for j in targets {
                g.link(t, j);
            }
            t += 1;
        }
    }
    let edges = g
        .adj
        .iter()
        .enumerate()
        .flat_map(|(a, nb)| nb.iter().filter(move |&&b| b > a).map(move |&b| (a + 1, b + 1)));
    UndirectedGraph::new(n, edges).expect("growth produces a simple graph")
}

/// One connected layer grown for `which`'s exponent.
pub fn generate_layer(config: &GenConfig, which: Which) -> Result<UndirectedGraph> {
    config.validate()?;
    let params = config.params(which)?;
    let purpose = match which {
        Which::A => STREAM_LAYER_A,
        Which::B => STREAM_LAYER_B,
    };
    for attempt in 0..=config.max_retries {
        let mut rng = substream(config.seed, purpose, attempt as u64);
        let g = grow(config.n, params, &mut rng);
        if g.is_connected() {
            return Ok(g);
        }
    }
    Err(Error::RetryCapExceeded {
        attempts: config.max_retries + 1,
    })
}

/// Nodes sorted by degree, largest first, ties by id.
fn degree_ranking(g: &UndirectedGraph) -> Vec<usize> {
    let mut nodes: Vec<usize> = (1..=g.node_count()).collect();
    nodes.sort_by_key(|&v| (std::cmp::Reverse(g.degree(v)), v));
    nodes
}

/// Pairs `g_b`'s nodes with `g_a`'s by degree rank, with the default swap
/// probability.
pub fn match_layers(g_a: &UndirectedGraph, g_b: &UndirectedGraph, seed: u64) -> Result<InterdependentSystem> {
    match_layers_with(g_a, g_b, seed, DEFAULT_SWAP_PROBABILITY)
}

pub fn match_layers_with(
    g_a: &UndirectedGraph,
    g_b: &UndirectedGraph,
    seed: u64,
    swap_probability: f64,
) -> Result<InterdependentSystem> {
    let n = g_a.node_count();
    if g_b.node_count() != n {
        return Err(invalid(format!(
            "layers have {} and {} nodes",
            n,
            g_b.node_count()
        )));
    }
    let rank_a = degree_ranking(g_a);
    let mut rank_b = degree_ranking(g_b);
    let mut rng = substream(seed, STREAM_MATCH, 0);
    for r in 0..n.saturating_sub(1) {
        if rng.gen_bool(swap_probability) {
            rank_b.swap(r, r + 1);
        }
    }
    let mut relabel = vec![0; n + 1];
    for (&a, &b) in rank_a.iter().zip(&rank_b) {
        relabel[b] = a;
    }
    let edges_b = g_b.edges().map(|e| (relabel[e.lo()], relabel[e.hi()]));
    let g_b = UndirectedGraph::new(n, edges_b)?;
    InterdependentSystem::new(g_a.clone(), g_b)
}

/// Both layers plus their pairing, all determined by `config`.
pub fn generate_system(config: &GenConfig) -> Result<InterdependentSystem> {
    let a = generate_layer(config, Which::A)?;
    let b = generate_layer(config, Which::B)?;
    match_layers_with(&a, &b, config.seed, config.swap_probability)
}

fn average_ranks(xs: &[f64]) -> Vec<f64> {
    let mut order: Vec<usize> = (0..xs.len()).collect();
    order.sort_by(|&a, &b| xs[a].total_cmp(&xs[b]));
    let mut ranks = vec![0.0; xs.len()];
    let mut i = 0;
    while i < order.len() {
        let mut j = i;
        while j + 1 < order.len() && xs[order[j + 1]] == xs[order[i]] {
            j += 1;
        }
        let avg = (i + j) as f64 / 2.0 + 1.0;
        for &o in &order[i..=j] {
            ranks[o] = avg;
        }
        i = j + 1;
    }
    ranks
}

/// Spearman rank correlation with average ranks for ties. `None` when
/// either sequence is constant or the lengths differ.
pub fn spearman(xs: &[f64], ys: &[f64]) -> Option<f64> {
    if xs.len() != ys.len() || xs.len() < 2 {
        return None;
    }
    let rx = average_ranks(xs);
    let ry = average_ranks(ys);
    let mean = (xs.len() as f64 + 1.0) / 2.0;
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (a, b) in rx.iter().zip(&ry) {
        sxy += (a - mean) * (b - mean);
        sxx += (a - mean) * (a - mean);
        syy += (b - mean) * (b - mean);
    }
    if sxx == 0.0 || syy == 0.0 {
        return None;
    }
    Some(sxy / (sxx * syy).sqrt())
}

/// Spearman correlation of the two layers' degrees over shared nodes.
pub fn degree_correlation(system: &InterdependentSystem) -> Option<f64> {
    let n = system.node_count();
    let da: Vec<f64> = (1..=n).map(|v| system.graph_a().degree(v) as f64).collect();
    let db: Vec<f64> = (1..=n).map(|v| system.graph_b().degree(v) as f64).collect();
    spearman(&da, &db)
}
