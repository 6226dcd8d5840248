//! Rank selection by median of medians, partitioning with tight compaction.
//!
//! Values are compared directly, so no input wire is a payload wire.

use serde::{Deserialize, Serialize};

use crate::circuit::{Circuit, Probe, ProbeKind, WireId};
use crate::compact::{self, Strategy};
use crate::ctx::{Config, Ctx};
use crate::elem::Elem;
use crate::error::{Error, Result};
use crate::gadgets::{
    add, bits_for, compare, compex, count_ones, eq_const, first_match, ge_const, gt, le, prefix_sum, sort_network, sub_wrap,
    Num, MEDIAN5,
};
use crate::route::Item;

/// Arrays up to this length are sorted outright.
pub const SORT_UP_TO: usize = 100;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SelectParams {
    pub n: usize,
    pub w: usize,
    /// Rank, 1-based.
    pub m: usize,
    pub tc: Strategy,
}

impl SelectParams {
    pub fn validate(&self) -> Result<()> {
        if self.n == 0 || self.w == 0 || self.w > 63 {
            return Err(Error::Param(format!("select needs n >= 1 and 1 <= w <= 63 (n={}, w={})", self.n, self.w)));
        }
        if self.m == 0 || self.m > self.n {
            return Err(Error::Param(format!("rank m={} outside 1..={}", self.m, self.n)));
        }
        if self.tc == Strategy::Auto {
            return Err(Error::Param("select takes ladder, base or tiny compaction".into()));
        }
        Ok(())
    }
}

fn median_of(ctx: &mut Ctx, group: &[Item], w: usize) -> Item {
    let mut g = group.to_vec();
    if g.len() == 5 {
        for (i, j) in MEDIAN5 {
            compex(ctx, &mut g, i, j, w);
        }
        return g[2].clone();
    }
    sort_network(ctx, &mut g, w);
    g[(g.len() - 1) / 2].clone()
}

/// The value of rank `m` (a circuit number, `1 <= m <= len`) in `xs`.
pub fn select(ctx: &mut Ctx, xs: &[Item], m: &Num, tc: Strategy) -> Result<Item> {
    let n = xs.len();
    let w = xs[0].width();
    if n <= SORT_UP_TO {
        let mut s = xs.to_vec();
        sort_network(ctx, &mut s, w);
        let hits: Vec<WireId> = (0..n).map(|i| eq_const(&mut ctx.b, m, i as u64 + 1)).collect();
        return Ok(first_match(ctx, &hits, &s).1);
    }
    let meds: Vec<Item> = xs.chunks(5).map(|g| median_of(ctx, g, w)).collect();
    let half = Num::constant(&mut ctx.b, meds.len().div_ceil(2) as u64);
    let pivot = select(ctx, &meds, &half, tc)?;
    let pv = Num::wide(pivot.wires().to_vec());

    let np = 7 * n / 10 + 3;
    let need = n - np;
    let (mut less, mut same) = (Vec::with_capacity(n), Vec::with_capacity(n));
    for x in xs {
        let (e, g) = compare(&mut ctx.b, &pv, &Num::wide(x.wires().to_vec()));
        less.push(g);
        same.push(e);
    }
    let c_small = count_ones(&mut ctx.b, &less);
    let c_same = count_ones(&mut ctx.b, &same);
    let not_big = add(&mut ctx.b, &c_small, &c_same);

    // at least 3 (ceil(n/10) - 1) elements on each side of the pivot
    let bound = (n - 3 * (n.div_ceil(10) - 1)) as u64;
    ctx.b.probe(Probe::new(
        "pivot too low",
        ProbeKind::NumAtMost {
            bits: c_small.bits.clone(),
            cap: bound,
        },
    ));
    let enough = ge_const(&mut ctx.b, &not_big, n as u64 - bound);
    let short = ctx.b.not(enough);
    ctx.b.probe(Probe::new("pivot too high", ProbeKind::AllZero { wires: vec![short] }));

    // mark smaller values plus enough ties that the left part spans at
    // least n - n' slots; then X[..n'] holds every smaller value and
    // X[n-n'..] every bigger one
    let width = bits_for(n as u64);
    let under = crate::gadgets::le_const(&mut ctx.b, &c_small, need as u64);
    let needc = Num::constant(&mut ctx.b, need as u64);
    let diff = sub_wrap(&mut ctx.b, &needc, &c_small, width);
    let quota_bits: Vec<WireId> = diff.bits.iter().map(|&d| ctx.b.and(d, under)).collect();
    let quota = Num::new(quota_bits, need as u64);
    let tie_rank = prefix_sum(&mut ctx.b, &same);
    let marked: Vec<Elem> = xs
        .iter()
        .enumerate()
        .map(|(i, x)| {
            let within = le(&mut ctx.b, &tie_rank[i], &quota);
            let flag = ctx.b.func1(&[less[i], same[i], within], |r| r & 1 == 1 || r >> 1 & 3 == 3);
            Elem { flag, item: x.clone() }
        })
        .collect();
    let part = compact::tight(ctx, &marked, tc)?;

    let in_small = le(&mut ctx.b, m, &c_small);
    let in_big = gt(&mut ctx.b, m, &not_big);
    let sub: Vec<Item> = (0..np).map(|i| ctx.sel(in_big, &part[i].item, &part[n - np + i].item)).collect();
    let shifted = sub_wrap(&mut ctx.b, m, &needc, width);
    let shifted = Num::new(shifted.bits, m.max.min(np as u64));
    let m_rec = crate::gadgets::select_num(&mut ctx.b, in_big, m, &shifted);
    let m_rec = Num::new(m_rec.bits, m.max.min(np as u64).max(1));
    let r = select(ctx, &sub, &m_rec, tc)?;
    let middle = ctx.b.func1(&[in_small, in_big], |r| r == 0);
    Ok(ctx.sel(middle, &r, &pivot))
}

/// The `m` smallest values, in no particular order.
pub fn select_all(ctx: &mut Ctx, xs: &[Item], m: usize, tc: Strategy) -> Result<Vec<Item>> {
    let n = xs.len();
    let mc = Num::constant(&mut ctx.b, m as u64);
    let pivot = select(ctx, xs, &mc, tc)?;
    let pv = Num::wide(pivot.wires().to_vec());
    let (mut less, mut same) = (Vec::with_capacity(n), Vec::with_capacity(n));
    for x in xs {
        let (e, g) = compare(&mut ctx.b, &pv, &Num::wide(x.wires().to_vec()));
        less.push(g);
        same.push(e);
    }
    let c_small = count_ones(&mut ctx.b, &less);
    let quota = sub_wrap(&mut ctx.b, &mc, &c_small, bits_for(m as u64));
    let quota = Num::new(quota.bits, m as u64);
    let tie_rank = prefix_sum(&mut ctx.b, &same);
    let marked: Vec<Elem> = xs
        .iter()
        .enumerate()
        .map(|(i, x)| {
            let within = le(&mut ctx.b, &tie_rank[i], &quota);
            let flag = ctx.b.func1(&[less[i], same[i], within], |r| r & 1 == 1 || r >> 1 & 3 == 3);
            Elem { flag, item: x.clone() }
        })
        .collect();
    let mut part = compact::tight(ctx, &marked, tc)?;
    part.truncate(m);
    Ok(part.into_iter().map(|e| e.item).collect())
}

fn value_inputs(ctx: &mut Ctx, n: usize, w: usize) -> Vec<Item> {
    (0..n)
        .map(|_| {
            let b = ctx.b.input(w);
            ctx.leaf(b)
        })
        .collect()
}

fn tag(ctx: &mut Ctx, family: &str, p: &SelectParams) {
    ctx.b.set_meta("family", family);
    ctx.b.set_meta("n", p.n);
    ctx.b.set_meta("w", p.w);
    ctx.b.set_meta("m", p.m);
    ctx.b.set_meta("tc", p.tc);
}

/// `n` inputs of `w` bits; one output, the value of rank `m`.
pub fn build_select(p: &SelectParams, cfg: &Config) -> Result<Circuit> {
    p.validate()?;
    cfg.validate()?;
    let mut ctx = Ctx::new(cfg.clone());
    let xs = value_inputs(&mut ctx, p.n, p.w);
    let mc = Num::constant(&mut ctx.b, p.m as u64);
    let r = select(&mut ctx, &xs, &mc, p.tc)?;
    tag(&mut ctx, "select", p);
    ctx.finish(vec![r.b.clone()])
}

/// `n` inputs of `w` bits; `m` outputs, the `m` smallest values.
pub fn build_select_all(p: &SelectParams, cfg: &Config) -> Result<Circuit> {
    p.validate()?;
    cfg.validate()?;
    let mut ctx = Ctx::new(cfg.clone());
    let xs = value_inputs(&mut ctx, p.n, p.w);
    let out = select_all(&mut ctx, &xs, p.m, p.tc)?;
    tag(&mut ctx, "select_all", p);
    ctx.finish(out.into_iter().map(|i| i.b).collect())
}
