//! Random regular bipartite graphs, routing simulation and seed search.

use std::any::Any;
use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use rand::seq::{index, SliceRandom};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gadgets::ceil_log2;

/// `m` left and `m` right vertices, every vertex of degree `d`. Edge `j` of
/// left vertex `u` is the `j`-th entry of its sorted neighbor list.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExpanderGraph {
    pub m: usize,
    pub d: usize,
    pub seed: u64,
    adj: Vec<u32>,
    /// incoming `(u, j)` per right vertex, sorted
    radj: Vec<(u32, u8)>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Exhaustive,
    Randomized,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub mode: Mode,
    pub trials: u64,
    pub failures: u64,
    pub max_iterations_observed: u32,
    /// Largest number of routed edges entering one facility.
    pub max_facility_load: u32,
}

impl ExpanderGraph {
    /// Union of `d` uniformly random perfect matchings drawn from `seed`.
    pub fn sample(m: usize, d: usize, seed: u64) -> Result<Self> {
        if m == 0 || d < 8 || !d.is_power_of_two() || d > 128 {
            return Err(Error::Param(format!(
                "expander needs m >= 1 and d a power of two in 8..=128 (m={m}, d={d})"
            )));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut adj = vec![0u32; m * d];
        let mut perm: Vec<u32> = (0..m as u32).collect();
        for k in 0..d {
            perm.shuffle(&mut rng);
            for u in 0..m {
                adj[u * d + k] = perm[u];
            }
        }
        for u in 0..m {
            adj[u * d..(u + 1) * d].sort_unstable();
        }
        let mut radj = vec![(0u32, 0u8); m * d];
        let mut fill = vec![0usize; m];
        for u in 0..m {
            for j in 0..d {
                let v = adj[u * d + j] as usize;
                radj[v * d + fill[v]] = (u as u32, j as u8);
                fill[v] += 1;
            }
        }
        Ok(ExpanderGraph {
            m,
            d,
            seed,
            adj,
            radj,
        })
    }

    /// Sorted right neighbors of left vertex `u` (with multiplicity).
    pub fn neighbors(&self, u: usize) -> &[u32] {
        &self.adj[u * self.d..(u + 1) * self.d]
    }

    /// Incoming `(u, j)` edges of right vertex `v`, sorted.
    pub fn incoming(&self, v: usize) -> &[(u32, u8)] {
        &self.radj[v * self.d..(v + 1) * self.d]
    }

    pub fn degrees_ok(&self) -> bool {
        let mut right = vec![0usize; self.m];
        for &v in &self.adj {
            right[v as usize] += 1;
        }
        right.iter().all(|&c| c == self.d) && self.adj.len() == self.m * self.d
    }

    /// For each `u1` ascending, every distinct `u2 != u1` sharing a right
    /// neighbor with it, ascending.
    pub fn two_hop_pairs(&self) -> Vec<(u32, u32)> {
        let csr = self.two_hop(false);
        let mut out = Vec::with_capacity(csr.targets.len());
        for u in 0..self.m {
            for &t in csr.of(u) {
                out.push((u as u32, t));
            }
        }
        out
    }

    /// Two-hop neighborhoods in CSR form; `upper` keeps only `u2 > u1`.
    pub fn two_hop(&self, upper: bool) -> TwoHop {
        let mut offsets = Vec::with_capacity(self.m + 1);
        let mut targets = Vec::new();
        let mut seen = vec![u32::MAX; self.m];
        let mut buf = Vec::new();
        offsets.push(0);
        for u in 0..self.m {
            buf.clear();
            for &v in self.neighbors(u) {
                for &(u2, _) in self.incoming(v as usize) {
                    let keep = if upper { u2 as usize > u } else { u2 as usize != u };
                    if keep && seen[u2 as usize] != u as u32 {
                        seen[u2 as usize] = u as u32;
                        buf.push(u2);
                    }
                }
            }
            buf.sort_unstable();
            targets.extend_from_slice(&buf);
            offsets.push(targets.len() as u32);
        }
        TwoHop { offsets, targets }
    }
}

#[derive(Clone, Debug)]
pub struct TwoHop {
    offsets: Vec<u32>,
    targets: Vec<u32>,
}

impl TwoHop {
    /// Every pair `u1 < u2` of `n` vertices.
    pub fn complete(n: usize) -> Self {
        let mut offsets = vec![0u32];
        let mut targets = Vec::with_capacity(n * n.saturating_sub(1) / 2);
        for u in 0..n {
            targets.extend(u as u32 + 1..n as u32);
            offsets.push(targets.len() as u32);
        }
        TwoHop { offsets, targets }
    }

    pub fn vertices(&self) -> usize {
        self.offsets.len() - 1
    }

    pub fn of(&self, u: usize) -> &[u32] {
        &self.targets[self.offsets[u] as usize..self.offsets[u + 1] as usize]
    }

    pub fn len(&self) -> usize {
        self.targets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.targets.is_empty()
    }
}

/// Result of one propose/accept/finalize run.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PafOutcome {
    pub all_satisfied: bool,
    /// Iteration (1-based) in which the last factory finalized; 0 if none.
    pub iterations: u32,
    /// Routed edge bits per dense factory, in the order given.
    pub beta: Vec<Vec<bool>>,
    pub max_facility_load: u32,
}

/// Runs the routing procedure for `ceil(log2 m)` rounds (at least one).
/// `dense` lists `(factory, load)` with distinct factories.
pub fn paf(g: &ExpanderGraph, dense: &[(usize, usize)]) -> PafOutcome {
    let d = g.d;
    let rounds = ceil_log2(g.m as u64).max(1);
    let mut unsat: Vec<bool> = vec![true; dense.len()];
    let mut beta = vec![vec![false; d]; dense.len()];
    let mut proposals = vec![0u32; g.m];
    let mut last = 0;
    for round in 1..=rounds {
        if !unsat.iter().any(|&x| x) {
            break;
        }
        for (k, &(u, _)) in dense.iter().enumerate() {
            if unsat[k] {
                for &v in g.neighbors(u) {
                    proposals[v as usize] += 1;
                }
            }
        }
        let cap = (d / 8) as u32;
        let mut newly = Vec::new();
        for (k, &(u, load)) in dense.iter().enumerate() {
            if !unsat[k] {
                continue;
            }
            let acc: Vec<bool> = g.neighbors(u).iter().map(|&v| proposals[v as usize] <= cap).collect();
            if acc.iter().filter(|&&a| a).count() >= d / 2 {
                let mut taken = 0;
                for (j, &a) in acc.iter().enumerate() {
                    if a && taken < load {
                        beta[k][j] = true;
                        taken += 1;
                    }
                }
                newly.push(k);
            }
        }
        for (k, &(u, _)) in dense.iter().enumerate() {
            if unsat[k] {
                for &v in g.neighbors(u) {
                    proposals[v as usize] = 0;
                }
            }
        }
        if !newly.is_empty() {
            last = round;
        }
        for k in newly {
            unsat[k] = false;
        }
    }
    let mut load = HashMap::<u32, u32>::new();
    for (k, &(u, _)) in dense.iter().enumerate() {
        for (j, &v) in g.neighbors(u).iter().enumerate() {
            if beta[k][j] {
                *load.entry(v).or_default() += 1;
            }
        }
    }
    PafOutcome {
        all_satisfied: !unsat.iter().any(|&x| x),
        iterations: last,
        beta,
        max_facility_load: load.values().copied().max().unwrap_or(0),
    }
}

fn binom(n: u64, k: u64) -> u64 {
    let mut r: u128 = 1;
    for i in 0..k {
        r = r * (n - i) as u128 / (i + 1) as u128;
        if r > u64::MAX as u128 {
            return u64::MAX;
        }
    }
    r as u64
}

/// Number of dense sets of size at most `k`.
pub fn census(m: usize, k: usize) -> u64 {
    (0..=k as u64).fold(0u64, |a, i| a.saturating_add(binom(m as u64, i)))
}

const EXHAUSTIVE_LIMIT: u64 = 1 << 20;

fn judge(g: &ExpanderGraph, dense: &[(usize, usize)], rep: &mut VerificationReport) {
    let out = paf(g, dense);
    rep.trials += 1;
    rep.max_iterations_observed = rep.max_iterations_observed.max(out.iterations);
    rep.max_facility_load = rep.max_facility_load.max(out.max_facility_load);
    if !out.all_satisfied || out.max_facility_load > (g.d / 8) as u32 {
        rep.failures += 1;
    }
}

/// Checks routing over dense sets of size at most `max_dense`: all of them
/// at full load when there are at most 2^20, otherwise `trials` random sets
/// with random loads in `d/8 + 1 ..= d/2`.
pub fn verify_routing_with(g: &ExpanderGraph, trials: u64, max_dense: usize, rng_seed: u64) -> VerificationReport {
    let mut rep = VerificationReport {
        mode: Mode::Exhaustive,
        trials: 0,
        failures: 0,
        max_iterations_observed: 0,
        max_facility_load: 0,
    };
    let k = max_dense.min(g.m);
    if census(g.m, k) <= EXHAUSTIVE_LIMIT {
        let full = g.d / 2;
        let mut set: Vec<usize> = Vec::new();
        fn rec(g: &ExpanderGraph, k: usize, start: usize, set: &mut Vec<usize>, full: usize, rep: &mut VerificationReport) {
            let dense: Vec<(usize, usize)> = set.iter().map(|&u| (u, full)).collect();
            judge(g, &dense, rep);
            if set.len() == k {
                return;
            }
            for u in start..g.m {
                set.push(u);
                rec(g, k, u + 1, set, full, rep);
                set.pop();
            }
        }
        rec(g, k, 0, &mut set, full, &mut rep);
        return rep;
    }
    rep.mode = Mode::Randomized;
    let mut rng = ChaCha8Rng::seed_from_u64(rng_seed ^ 0x5eed_0f_affe);
    for _ in 0..trials {
        let size = if rng.random_bool(0.5) { k } else { rng.random_range(1..=k) };
        let dense: Vec<(usize, usize)> = index::sample(&mut rng, g.m, size)
            .into_iter()
            .map(|u| (u, rng.random_range(g.d / 8 + 1..=g.d / 2)))
            .collect();
        judge(g, &dense, &mut rep);
    }
    rep
}

/// Routing check with the dense-set bound `floor(m / 32)`.
pub fn verify_routing(g: &ExpanderGraph, trials: u64) -> VerificationReport {
    verify_routing_with(g, trials, g.m / 32, g.seed)
}

/// Dense bound used when accepting graphs for circuits.
pub fn build_dense_bound(m: usize) -> usize {
    m / 16
}

/// Random trials used when accepting graphs for circuits.
pub const BUILD_TRIALS: u64 = 512;

/// Seeds tried before giving up.
pub const SEARCH_TRIES: u32 = 64;

#[derive(Debug)]
pub struct Accepted<R = VerificationReport> {
    pub graph: ExpanderGraph,
    pub report: R,
}

/// A check result that can accept or reject a graph.
pub trait Verdict {
    fn passed(&self) -> bool;
}

impl Verdict for VerificationReport {
    fn passed(&self) -> bool {
        self.failures == 0
    }
}

type Key = (&'static str, usize, usize, u64);
type Entry = Arc<dyn Any + Send + Sync>;

fn cache() -> &'static Mutex<HashMap<Key, Entry>> {
    static C: OnceLock<Mutex<HashMap<Key, Entry>>> = OnceLock::new();
    C.get_or_init(Default::default)
}

/// First graph from `base_seed` upward whose check passes. Results are
/// cached per `(kind, m, d, base_seed)`; a kind must always use the same
/// report type.
pub fn search<R: Verdict + Send + Sync + 'static>(
    kind: &'static str,
    m: usize,
    d: usize,
    base_seed: u64,
    check: impl Fn(&ExpanderGraph) -> R,
) -> Result<Arc<Accepted<R>>> {
    let key = (kind, m, d, base_seed);
    if let Some(a) = cache().lock().expect("expander cache").get(&key) {
        return Ok(a.clone().downcast::<Accepted<R>>().expect("one report type per kind"));
    }
    for t in 0..SEARCH_TRIES {
        let g = ExpanderGraph::sample(m, d, base_seed.wrapping_add(t as u64))?;
        let report = check(&g);
        if report.passed() {
            let a = Arc::new(Accepted { graph: g, report });
            cache().lock().expect("expander cache").insert(key, a.clone());
            return Ok(a);
        }
    }
    Err(Error::NoExpander {
        m,
        d,
        base_seed,
        tries: SEARCH_TRIES,
    })
}

/// The routing graph used by base loose compaction on `m` chunks.
pub fn routing_expander(m: usize, d: usize, base_seed: u64) -> Result<Arc<Accepted>> {
    search("route", m, d, base_seed, |g| {
        verify_routing_with(g, BUILD_TRIALS, build_dense_bound(g.m), g.seed)
    })
}
