//! Base loose compaction over a bipartite expander.
//!
//! The input is cut into chunks of `d/2` slots, chunk `u` being factory `u`
//! of the routing graph. A chunk with more than `d/8` reals is dense. Dense
//! chunks ship their reals along edges chosen by the propose/accept/finalize
//! rounds, every facility receiving at most `d/8` of them. Afterwards every
//! chunk and every facility holds at most `d/8` reals and is squeezed to
//! `d/8` slots.

use crate::circuit::{Probe, ProbeKind, WireId};
use crate::ctx::Ctx;
use crate::elem::{self, Elem};
use crate::error::{Error, Result};
use crate::expander::{self, ExpanderGraph};
use crate::gadgets::{count_ones, eq, eq_const, first_match, ge_const, le, le_const, prefix_sum, Num};
use crate::route::Item;

/// Inputs below this length go through the direct compactor instead.
pub const BYPASS_BELOW: usize = 512;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LooseCompactParams {
    pub n: usize,
    pub w: usize,
    pub sparsity_num: u64,
    pub sparsity_denom: u64,
    pub d: usize,
    /// Inputs shorter than this use the direct compactor.
    pub bypass_below: usize,
}

impl LooseCompactParams {
    pub fn new(n: usize, w: usize, d: usize) -> Self {
        LooseCompactParams {
            n,
            w,
            sparsity_num: 1,
            sparsity_denom: 128,
            d,
            bypass_below: BYPASS_BELOW,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.d < 8 || !self.d.is_power_of_two() {
            return Err(Error::Param(format!("degree {} must be a power of two >= 8", self.d)));
        }
        if self.n < self.d / 2 {
            return Err(Error::Param(format!("n = {} is below the chunk size {}", self.n, self.d / 2)));
        }
        if self.n < self.d / 2 * 2 && self.n >= self.bypass_below {
            return Err(Error::Param(format!("n = {} needs at least two chunks", self.n)));
        }
        if self.w == 0 {
            return Err(Error::Param("payload width must be at least 1".into()));
        }
        if self.sparsity_denom == 0 || self.sparsity_num > self.sparsity_denom {
            return Err(Error::Param("sparsity must be a fraction in [0, 1]".into()));
        }
        Ok(())
    }

    pub fn max_real(&self) -> u64 {
        self.n as u64 * self.sparsity_num / self.sparsity_denom
    }
}

/// Output length of [`lc0`] on `n` inputs.
pub fn output_len(n: usize, d: usize) -> usize {
    output_len_with(n, d, BYPASS_BELOW)
}

pub fn output_len_with(n: usize, d: usize, bypass_below: usize) -> usize {
    if n < bypass_below {
        n.div_ceil(2)
    } else {
        n.div_ceil(d / 2) * (d / 2) / 2
    }
}

/// Slots computed by the small-input path; further outputs are dummies.
pub fn bypass_keep(n: usize) -> usize {
    n.div_ceil(2).min(n / 16 + 2)
}

/// Loose compaction of `xs`. Correct whenever the number of reals is small
/// enough that at most `m/16` chunks are dense and the small-input path
/// sees at most [`bypass_keep`] reals.
pub fn lc0(ctx: &mut Ctx, xs: &[Elem]) -> Result<Vec<Elem>> {
    lc0_with(ctx, xs, BYPASS_BELOW)
}

pub fn lc0_with(ctx: &mut Ctx, xs: &[Elem], bypass_below: usize) -> Result<Vec<Elem>> {
    let n = xs.len();
    let d = ctx.cfg.degree;
    if n < bypass_below {
        let mut out = crate::bootstrap::base_tc(ctx, xs, bypass_keep(n));
        out.truncate(n.div_ceil(2));
        return Ok(out);
    }
    let half = d / 2;
    let cap = d / 8;
    let mut xs = xs.to_vec();
    let m = n.div_ceil(half);
    elem::pad(ctx, &mut xs, m * half);
    let acc = expander::routing_expander(m, d, ctx.cfg.seed)?;
    let g = &acc.graph;
    ctx.expanders.insert(format!("route:{m}:{d}:{}", g.seed));

    // step 1: dense chunks
    let mut dense = Vec::with_capacity(m);
    let mut count = Vec::with_capacity(m);
    let mut psum = Vec::with_capacity(m);
    for u in 0..m {
        let f = elem::flags(&xs[u * half..(u + 1) * half]);
        let c = count_ones(&mut ctx.b, &f);
        let sparse = le_const(&mut ctx.b, &c, cap as u64);
        dense.push(ctx.b.not(sparse));
        count.push(c);
        psum.push(prefix_sum(&mut ctx.b, &f));
    }

    // step 2: edge selection
    let beta = paf(ctx, g, &dense, &count);

    // step 3: ship reals of dense chunks along selected edges
    let mut edge: Vec<Elem> = Vec::with_capacity(m * d);
    for u in 0..m {
        let chunk = &xs[u * half..(u + 1) * half];
        let items = elem::items(chunk);
        let pb = prefix_sum(&mut ctx.b, &beta[u]);
        for j in 0..d {
            let matches: Vec<WireId> = (0..half)
                .map(|i| {
                    let e = eq(&mut ctx.b, &psum[u][i], &pb[j]);
                    ctx.b.func1(&[e, chunk[i].flag, beta[u][j]], |r| r == 7)
                })
                .collect();
            let (flag, item) = first_match(ctx, &matches, &items);
            edge.push(Elem { flag, item });
        }
    }

    // step 4: dense chunks are emptied
    let mut left = Vec::with_capacity(m * half);
    for u in 0..m {
        for x in &xs[u * half..(u + 1) * half] {
            let flag = ctx.b.and_not(x.flag, dense[u]);
            left.push(Elem {
                flag,
                item: x.item.clone(),
            });
        }
    }

    // step 5: squeeze chunks and facilities
    let mut out = Vec::with_capacity(m * cap * 2);
    for u in 0..m {
        out.extend(compress(ctx, &left[u * half..(u + 1) * half], cap));
    }
    for v in 0..m {
        let slots: Vec<Elem> = g.incoming(v).iter().map(|&(u, j)| edge[u as usize * d + j as usize].clone()).collect();
        out.extend(compress(ctx, &slots, cap));
    }
    Ok(out)
}

/// The first `keep` reals of `xs`, in order, padded with dummies.
pub fn compress(ctx: &mut Ctx, xs: &[Elem], keep: usize) -> Vec<Elem> {
    let f = elem::flags(xs);
    let ps = prefix_sum(&mut ctx.b, &f);
    let items: Vec<Item> = elem::items(xs);
    (1..=keep as u64)
        .map(|t| {
            let matches: Vec<WireId> = ps
                .iter()
                .zip(&f)
                .map(|(p, &fl)| {
                    let e = eq_const(&mut ctx.b, p, t);
                    ctx.b.and(e, fl)
                })
                .collect();
            let (flag, item) = first_match(ctx, &matches, &items);
            Elem { flag, item }
        })
        .collect()
}

/// Propose/accept/finalize unrolled over `ceil(log2 m)` rounds. Returns the
/// selected edge bits per factory.
fn paf(ctx: &mut Ctx, g: &ExpanderGraph, dense: &[WireId], load: &[Num]) -> Vec<Vec<WireId>> {
    let (m, d) = (g.m, g.d);
    let rounds = crate::gadgets::ceil_log2(m as u64).max(1);
    let zero = ctx.b.zero();
    let mut beta = vec![vec![zero; d]; m];
    let mut unsat = dense.to_vec();
    for _ in 0..rounds {
        let accept: Vec<WireId> = (0..m)
            .map(|v| {
                let props: Vec<WireId> = g.incoming(v).iter().map(|&(u, _)| unsat[u as usize]).collect();
                let p = count_ones(&mut ctx.b, &props);
                le_const(&mut ctx.b, &p, (d / 8) as u64)
            })
            .collect();
        for u in 0..m {
            let a: Vec<WireId> = g.neighbors(u).iter().map(|&v| accept[v as usize]).collect();
            let total = count_ones(&mut ctx.b, &a);
            let ok = ge_const(&mut ctx.b, &total, (d / 2) as u64);
            let newly = ctx.b.and(unsat[u], ok);
            let ps = prefix_sum(&mut ctx.b, &a);
            for j in 0..d {
                let within = le(&mut ctx.b, &ps[j], &load[u]);
                let pick = ctx.b.and(within, a[j]);
                beta[u][j] = ctx.b.func1(&[beta[u][j], newly, pick], |r| r & 1 == 1 || r >> 1 == 3);
            }
            unsat[u] = ctx.b.and_not(unsat[u], ok);
        }
    }
    ctx.b.probe(Probe::new("PAF non-termination", ProbeKind::AllZero { wires: unsat }));
    let groups: Vec<Vec<WireId>> = (0..m)
        .map(|v| g.incoming(v).iter().map(|&(u, j)| beta[u as usize][j as usize]).collect())
        .collect();
    ctx.b.probe(Probe::new(
        "facility overload",
        ProbeKind::GroupCap {
            groups,
            cap: (d / 8) as u32,
        },
    ));
    beta
}

/// A standalone loose compaction circuit: `n` inputs of `1 + w` bits (real
/// flag first), `output_len(n, d)` outputs of the same shape.
pub fn build_lc0(p: &LooseCompactParams, cfg: &crate::ctx::Config) -> Result<crate::circuit::Circuit> {
    p.validate()?;
    cfg.validate()?;
    let mut cfg = cfg.clone();
    cfg.degree = p.d;
    let mut ctx = Ctx::new(cfg);
    let xs = elem::inputs(&mut ctx, p.n, p.w);
    let out = lc0_with(&mut ctx, &xs, p.bypass_below)?;
    ctx.b.set_meta("family", "lc0");
    ctx.b.set_meta("n", p.n);
    ctx.b.set_meta("w", p.w);
    ctx.b.set_meta("d", p.d);
    ctx.b.set_meta("seed", ctx.cfg.seed);
    ctx.b.set_meta("sparsity", format!("{}/{}", p.sparsity_num, p.sparsity_denom));
    let outs = elem::outputs(&out);
    ctx.finish(outs)
}
