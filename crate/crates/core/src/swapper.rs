//! Swapping opposite colors: one greedy pass over two-hop pairs of an
//! expander, then recursion on the compacted survivors with the compaction
//! routing played backwards.

use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::circuit::{Circuit, Probe, ProbeKind, WireId};
use crate::ctx::{Config, Ctx, Eps};
use crate::elem::Elem;
use crate::error::{Error, Result};
use crate::expander::{self, Accepted, TwoHop, Verdict};
use crate::route::Item;

/// Arrays up to this length pair every two positions.
pub const COMPLETE_UP_TO: usize = 128;

/// Random trials used when accepting a swap graph.
pub const SWAP_TRIALS: u64 = 64;

/// A loose compactor used inside the recursion.
pub type LcFn<'a> = dyn Fn(&mut Ctx, &[Elem]) -> Result<Vec<Elem>> + 'a;

/// An element of a swap instance inside a circuit.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Cel {
    pub colored: WireId,
    pub color: WireId,
    pub item: Item,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SwapReport {
    pub trials: u64,
    pub failures: u64,
    pub max_leftover: u64,
    pub cap: u64,
}

#[derive(Debug)]
pub struct SwapCheck {
    pub report: SwapReport,
    pub pairs: Arc<TwoHop>,
}

impl Verdict for SwapCheck {
    fn passed(&self) -> bool {
        self.report.failures == 0
    }
}

/// Colored elements allowed to survive one pass.
pub fn leftover_cap(n: usize, eps: &Eps) -> u64 {
    Eps::floor(n, 2.0 * eps.e1) as u64
}

/// Runs the sequential pass on plain bits; returns how many stay colored.
pub fn simulate(pairs: &TwoHop, colored: &mut [bool], color: &[bool]) -> u64 {
    for u in 0..pairs.vertices() {
        for &v in pairs.of(u) {
            let v = v as usize;
            if colored[u] && colored[v] && color[u] != color[v] {
                colored[u] = false;
                colored[v] = false;
            }
        }
    }
    colored.iter().filter(|&&c| c).count() as u64
}

/// A coloring as produced by tight compaction: position `i` is colored iff
/// its flag disagrees with `i < c`, and its color says which side it is on.
pub fn coloring_from_flags(flags: &[bool]) -> (Vec<bool>, Vec<bool>) {
    let c = flags.iter().filter(|&&f| f).count();
    flags
        .iter()
        .enumerate()
        .map(|(i, &f)| (f != (i < c), i >= c))
        .unzip()
}

/// A random balanced coloring, mixing scattered and clustered shapes.
pub fn random_coloring(rng: &mut impl Rng, n: usize) -> (Vec<bool>, Vec<bool>) {
    let flags: Vec<bool> = match rng.random_range(0..3) {
        0 => {
            let p: f64 = rng.random();
            (0..n).map(|_| rng.random_bool(p)).collect()
        }
        1 => {
            let len = rng.random_range(0..=n);
            let start = rng.random_range(0..=n - len);
            (0..n).map(|i| i >= start && i < start + len).collect()
        }
        _ => {
            let half = n / 2;
            (0..n).map(|i| (i >= half) ^ rng.random_bool(0.05)).collect()
        }
    };
    coloring_from_flags(&flags)
}

fn check_pairs(pairs: &TwoHop, n: usize, cap: u64, trials: u64, seed: u64) -> SwapReport {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5a5a_0f0f);
    let mut rep = SwapReport {
        trials,
        failures: 0,
        max_leftover: 0,
        cap,
    };
    for _ in 0..trials {
        let (mut colored, color) = random_coloring(&mut rng, n);
        let left = simulate(pairs, &mut colored, &color);
        rep.max_leftover = rep.max_leftover.max(left);
        if left > cap {
            rep.failures += 1;
        }
    }
    rep
}

/// Stage pairs for an array of length `n`, with the seed of the accepted
/// graph when one is used.
pub fn swap_pairs(n: usize, cfg: &Config) -> Result<(Arc<TwoHop>, Option<u64>)> {
    if n <= COMPLETE_UP_TO {
        return Ok((Arc::new(TwoHop::complete(n)), None));
    }
    let acc = swap_graph(n, cfg)?;
    Ok((acc.report.pairs.clone(), Some(acc.graph.seed)))
}

/// The accepted graph for a pass over `n > COMPLETE_UP_TO` elements.
pub fn swap_graph(n: usize, cfg: &Config) -> Result<Arc<Accepted<SwapCheck>>> {
    let cap = leftover_cap(n, &cfg.eps);
    expander::search("swap", n, cfg.degree, cfg.seed, |g| {
        let pairs = Arc::new(g.two_hop(true));
        let report = check_pairs(&pairs, n, cap, SWAP_TRIALS, g.seed);
        SwapCheck { report, pairs }
    })
}

/// One greedy pass: for each pair in order, two colored elements of
/// different colors exchange payloads and both lose their color.
pub fn loose_swap(ctx: &mut Ctx, xs: &mut [Cel], pairs: &TwoHop) {
    for u in 0..pairs.vertices() {
        for &v in pairs.of(u) {
            let v = v as usize;
            let (a, b) = (xs[u].clone(), xs[v].clone());
            let p = ctx.b.func1(&[a.colored, a.color, b.color], |r| r & 1 == 1 && (r >> 1 & 1) != (r >> 2 & 1));
            let o = ctx.b.func(&[p, a.colored, b.colored], 3, |r| {
                let (p, c1, c2) = (r & 1, r >> 1 & 1, r >> 2 & 1);
                let s = p & c2;
                s | (c1 & (1 - s)) << 1 | (c2 & (1 - p)) << 2
            });
            let ia = ctx.sel(o[0], &a.item, &b.item);
            let ib = ctx.sel(o[0], &b.item, &a.item);
            xs[u] = Cel {
                colored: o[1],
                color: a.color,
                item: ia,
            };
            xs[v] = Cel {
                colored: o[2],
                color: b.color,
                item: ib,
            };
        }
    }
}

/// Full swap: afterwards no element is colored. Requires as many colored
/// elements of each color.
pub fn swap(ctx: &mut Ctx, xs: &[Cel], lc: &LcFn) -> Result<Vec<Cel>> {
    let n = xs.len();
    ctx.b.probe(Probe::new(
        "unbalanced colors",
        ProbeKind::Balanced {
            colored: xs.iter().map(|x| x.colored).collect(),
            color: xs.iter().map(|x| x.color).collect(),
        },
    ));
    let (pairs, seed) = swap_pairs(n, &ctx.cfg)?;
    if let Some(s) = seed {
        ctx.expanders.insert(format!("swap:{n}:{}:{s}", ctx.cfg.degree));
    }
    let mut x1 = xs.to_vec();
    loose_swap(ctx, &mut x1, &pairs);
    if n <= COMPLETE_UP_TO {
        ctx.b.probe(Probe::new(
            "colors left after complete pass",
            ProbeKind::AllZero {
                wires: x1.iter().map(|x| x.colored).collect(),
            },
        ));
        let zero = ctx.b.zero();
        return Ok(x1
            .into_iter()
            .map(|x| Cel {
                colored: zero,
                ..x
            })
            .collect());
    }
    // compact the survivors, carrying their color
    let sources: Vec<Item> = x1.iter().map(|x| ctx.prepend(&[x.color], &x.item)).collect();
    let (lo, entries) = ctx.begin(&sources);
    let lc_in: Vec<Elem> = x1
        .iter()
        .zip(&entries)
        .map(|(x, e)| Elem {
            flag: x.colored,
            item: e.clone(),
        })
        .collect();
    let y = lc(ctx, &lc_in)?;
    let cap = ctx.end(lo);
    if y.len() >= n {
        return Err(Error::Param(format!("loose compactor did not shrink {n} elements")));
    }
    let sub: Vec<Cel> = y
        .iter()
        .map(|e| {
            let (c, rest) = ctx.detach(&e.item, 1);
            Cel {
                colored: e.flag,
                color: c[0],
                item: rest,
            }
        })
        .collect();
    let z = swap(ctx, &sub, lc)?;
    let sinks: Vec<Item> = y.iter().map(|e| e.item.clone()).collect();
    let seeds: Vec<Item> = z.iter().map(|c| ctx.prepend(&[c.color], &c.item)).collect();
    let back = ctx.reverse(cap, &entries, &sinks, &seeds);
    let zero = ctx.b.zero();
    let mut out = Vec::with_capacity(n);
    for (x, (item, _)) in x1.iter().zip(back) {
        let (_, payload) = ctx.detach(&item, 1);
        let merged = ctx.sel(x.colored, &x.item, &payload);
        out.push(Cel {
            colored: zero,
            color: x.color,
            item: merged,
        });
    }
    Ok(out)
}

/// Number of recursion levels on `n` elements for a compactor producing
/// `half(n)` outputs.
pub fn levels(mut n: usize, half: impl Fn(usize) -> usize) -> usize {
    let mut l = 1;
    while n > COMPLETE_UP_TO {
        n = half(n);
        l += 1;
    }
    l
}

/// A standalone swap circuit over `n` inputs of `2 + w` bits (colored,
/// color, payload), using the base loose compactor. Outputs have the same
/// shape.
pub fn build_swap(n: usize, w: usize, cfg: &Config) -> Result<Circuit> {
    cfg.validate()?;
    if n == 0 || w == 0 {
        return Err(Error::Param("swap needs n >= 1 and w >= 1".into()));
    }
    let mut ctx = Ctx::new(cfg.clone());
    let xs: Vec<Cel> = (0..n)
        .map(|_| {
            let b = ctx.b.input(2 + w);
            let payload = b.slice(2..2 + w);
            ctx.b.mark_payload(payload.wires());
            Cel {
                colored: b.get(0),
                color: b.get(1),
                item: ctx.leaf(payload),
            }
        })
        .collect();
    let out = swap(&mut ctx, &xs, &|c, e| crate::lc0::lc0(c, e))?;
    let d = ctx.cfg.degree;
    ctx.b.set_meta("family", "swap");
    ctx.b.set_meta("n", n);
    ctx.b.set_meta("w", w);
    ctx.b.set_meta("levels", levels(n, |k| crate::lc0::output_len(k, d)));
    let outs = out
        .iter()
        .map(|c| {
            let mut v = vec![c.colored, c.color];
            v.extend_from_slice(c.item.wires());
            v.into()
        })
        .collect();
    ctx.finish(outs)
}
