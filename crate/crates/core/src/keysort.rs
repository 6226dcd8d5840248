//! Sorting by keys from a small range: split at the median with tight
//! compaction, then recurse on the half with the narrower key range with
//! half the range bound, and on the other half with the full bound.
//!
//! Elements are items whose leading `k` wires hold the key.

use serde::{Deserialize, Serialize};

use crate::circuit::{Circuit, Probe, ProbeKind, WireId};
use crate::compact::{self, Strategy};
use crate::ctx::{Config, Ctx, Eps};
use crate::elem::Elem;
use crate::error::{Error, Result};
use crate::gadgets::{add, bits_for, ceil_log2, compare, count_ones, gt, le, lt, prefix_sum, select_num, sub_wrap, Num};
use crate::route::Item;
use crate::selection;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SortParams {
    pub n: usize,
    pub w: usize,
    /// Number of key values; keys are `0..k_values`.
    #[serde(rename = "K")]
    pub k_values: u64,
    pub eps: Eps,
}

impl SortParams {
    pub fn new(n: usize, w: usize, k_values: u64) -> Self {
        SortParams {
            n,
            w,
            k_values,
            eps: Eps::default(),
        }
    }

    /// Key width, `ceil(log2 K)` and at least one bit.
    pub fn key_bits(&self) -> usize {
        (ceil_log2(self.k_values.max(2)) as usize).max(1)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n == 0 || self.w == 0 || self.k_values == 0 {
            return Err(Error::Param(format!(
                "sort needs n, w, K >= 1 (n={}, w={}, K={})",
                self.n, self.w, self.k_values
            )));
        }
        if self.key_bits() + self.w > 64 {
            return Err(Error::Param("key plus payload wider than 64 bits".into()));
        }
        self.eps.validate()
    }
}

fn key(x: &Item, k: usize) -> Num {
    Num::wide(x.wires()[..k].to_vec())
}

/// Smallest and largest of `keys` through a comparator tree.
fn min_max(ctx: &mut Ctx, keys: &[Num]) -> (Num, Num) {
    let mut lo: Vec<Num> = Vec::with_capacity(keys.len().div_ceil(2));
    let mut hi: Vec<Num> = Vec::with_capacity(keys.len().div_ceil(2));
    for p in keys.chunks(2) {
        if let [a, b] = p {
            let c = gt(&mut ctx.b, a, b);
            lo.push(select_num(&mut ctx.b, c, a, b));
            hi.push(select_num(&mut ctx.b, c, b, a));
        } else {
            lo.push(p[0].clone());
            hi.push(p[0].clone());
        }
    }
    let fold = |ctx: &mut Ctx, mut v: Vec<Num>, pick_big: bool| {
        while v.len() > 1 {
            let mut next = Vec::with_capacity(v.len().div_ceil(2));
            for p in v.chunks(2) {
                next.push(match p {
                    [a, b] => {
                        let c = gt(&mut ctx.b, a, b);
                        if pick_big {
                            select_num(&mut ctx.b, c, b, a)
                        } else {
                            select_num(&mut ctx.b, c, a, b)
                        }
                    }
                    [a] => a.clone(),
                    _ => unreachable!(),
                });
            }
            v = next;
        }
        v.pop().expect("nonempty")
    };
    let mn = fold(ctx, lo, false);
    let mx = fold(ctx, hi, true);
    (mn, mx)
}

/// Inserts a marker bit after the key of every item.
fn with_marker(ctx: &mut Ctx, x: &Item, k: usize, marker: WireId) -> Item {
    let rest = x.width() - k;
    let parts = ctx.split(x, &[k, rest]);
    let m = ctx.leaf(vec![marker].into());
    ctx.concat(&[&parts[0], &m, &parts[1]])
}

fn drop_marker(ctx: &mut Ctx, x: &Item, k: usize) -> (WireId, Item) {
    let rest = x.width() - k - 1;
    let parts = ctx.split(x, &[k, 1, rest]);
    (parts[1].get(0), ctx.concat(&[&parts[0], &parts[2]]))
}

/// Sorts `xs` by key, given that their keys span at most `kv` consecutive
/// values.
pub fn sort(ctx: &mut Ctx, xs: &[Item], k: usize, kv: u64, tc: Strategy) -> Result<Vec<Item>> {
    let n = xs.len();
    if n <= 1 || kv <= 1 {
        return Ok(xs.to_vec());
    }
    let keys: Vec<Num> = xs.iter().map(|x| key(x, k)).collect();
    if kv == 2 {
        let (mn, _) = min_max(ctx, &keys);
        let marked: Vec<Elem> = xs
            .iter()
            .zip(&keys)
            .map(|(x, kx)| Elem {
                flag: crate::gadgets::eq(&mut ctx.b, kx, &mn),
                item: x.clone(),
            })
            .collect();
        return Ok(compact::tight(ctx, &marked, tc)?.into_iter().map(|e| e.item).collect());
    }
    let key_items: Vec<Item> = keys.iter().map(|kx| ctx.leaf(kx.bits.clone().into())).collect();
    let rank = Num::constant(&mut ctx.b, n.div_ceil(2) as u64);
    let med = selection::select(ctx, &key_items, &rank, tc)?;
    let mv = Num::wide(med.wires().to_vec());

    // odd lengths get one extra element keyed by the median, removed at the end
    let odd = n % 2 == 1;
    let mut items: Vec<Item> = xs.to_vec();
    let mut keys = keys;
    if odd {
        let zero = ctx.b.zero();
        let one = ctx.b.one();
        items = items.iter().map(|x| with_marker(ctx, x, k, zero)).collect();
        let pad = ctx.zeros_item(xs[0].width() - k);
        let mk = ctx.leaf(med.b.clone());
        let extra = ctx.concat(&[&mk, &pad]);
        items.push(with_marker(ctx, &extra, k, one));
        keys.push(mv.clone());
    }
    let len = items.len();
    let h = len / 2;

    let (mut less, mut same) = (Vec::with_capacity(len), Vec::with_capacity(len));
    for kx in &keys {
        let (e, g) = compare(&mut ctx.b, &mv, kx);
        less.push(g);
        same.push(e);
    }
    let c_small = count_ones(&mut ctx.b, &less);
    let hc = Num::constant(&mut ctx.b, h as u64);
    let quota = sub_wrap(&mut ctx.b, &hc, &c_small, bits_for(h as u64));
    let quota = Num::new(quota.bits, h as u64);
    let ties = prefix_sum(&mut ctx.b, &same);
    let marked: Vec<Elem> = items
        .iter()
        .enumerate()
        .map(|(i, x)| {
            let within = le(&mut ctx.b, &ties[i], &quota);
            let flag = ctx.b.func1(&[less[i], same[i], within], |r| r & 1 == 1 || r >> 1 & 3 == 3);
            Elem { flag, item: x.clone() }
        })
        .collect();
    let part: Vec<Item> = compact::tight(ctx, &marked, tc)?.into_iter().map(|e| e.item).collect();
    let (lower, upper) = part.split_at(h);

    let lk: Vec<Num> = lower.iter().map(|x| key(x, k)).collect();
    let uk: Vec<Num> = upper.iter().map(|x| key(x, k)).collect();
    let (lmin, lmax) = min_max(ctx, &lk);
    let (umin, umax) = min_max(ctx, &uk);
    // upper is good iff umax - umin < lmax - lmin; ties keep the lower half
    let a = add(&mut ctx.b, &umax, &lmin);
    let bsum = add(&mut ctx.b, &lmax, &umin);
    let swap = lt(&mut ctx.b, &a, &bsum);
    let good: Vec<Item> = (0..h).map(|i| ctx.sel(swap, &lower[i], &upper[i])).collect();
    let bad: Vec<Item> = (0..h).map(|i| ctx.sel(swap, &upper[i], &lower[i])).collect();

    let half = kv.div_ceil(2);
    let one = ctx.b.one();
    ctx.b.probe(Probe::new(
        "good half too wide",
        ProbeKind::DistinctAtMost {
            keys: good.iter().map(|x| x.wires()[..k].to_vec()).collect(),
            valid: vec![one; h],
            cap: half as u32,
        },
    ));
    let gs = sort(ctx, &good, k, half, tc)?;
    let bs = sort(ctx, &bad, k, kv, tc)?;
    let mut out: Vec<Item> = (0..h).map(|i| ctx.sel(swap, &gs[i], &bs[i])).collect();
    out.extend((0..h).map(|i| ctx.sel(swap, &bs[i], &gs[i])));

    if !odd {
        return Ok(out);
    }
    let (marks, plain): (Vec<WireId>, Vec<Item>) = out.iter().map(|x| drop_marker(ctx, x, k)).unzip();
    let mut seen = ctx.b.zero();
    let mut res = Vec::with_capacity(n);
    for i in 0..n {
        seen = ctx.b.or(seen, marks[i]);
        res.push(ctx.sel(seen, &plain[i], &plain[i + 1]));
    }
    Ok(res)
}

/// `n` inputs of `k + w` bits (key first); outputs are the same elements
/// with keys non-decreasing.
pub fn build_sort(p: &SortParams, cfg: &Config) -> Result<Circuit> {
    p.validate()?;
    let mut cfg = cfg.clone();
    cfg.eps = p.eps;
    cfg.validate()?;
    let k = p.key_bits();
    let mut ctx = Ctx::new(cfg);
    let xs: Vec<Item> = (0..p.n)
        .map(|_| {
            let b = ctx.b.input(k + p.w);
            ctx.b.mark_payload(&b.wires()[k..]);
            ctx.leaf(b)
        })
        .collect();
    for x in &xs {
        ctx.b.probe(Probe::new(
            "key out of range",
            ProbeKind::NumAtMost {
                bits: x.wires()[..k].to_vec(),
                cap: p.k_values - 1,
            },
        ));
    }
    let out = sort(&mut ctx, &xs, k, p.k_values, Strategy::Ladder)?;
    ctx.b.set_meta("family", "sort");
    ctx.b.set_meta("n", p.n);
    ctx.b.set_meta("w", p.w);
    ctx.b.set_meta("K", p.k_values);
    ctx.finish(out.into_iter().map(|x| x.b).collect())
}

/// Gate counts of `Sort^[K]` over a grid, without storing gates.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RecurrenceRow {
    pub n: usize,
    #[serde(rename = "K")]
    pub k_values: u64,
    pub bool_gates: u64,
    pub selector_gates: u64,
    pub lowered: u64,
}

pub fn measure_recurrence(ns: &[usize], ks: &[u64], w: usize, cfg: &Config) -> Result<Vec<RecurrenceRow>> {
    let mut rows = Vec::new();
    for &n in ns {
        for &kv in ks {
            let p = SortParams {
                eps: cfg.eps,
                ..SortParams::new(n, w, kv)
            };
            p.validate()?;
            let k = p.key_bits();
            let mut ctx = Ctx::counting(cfg.clone());
            let xs: Vec<Item> = (0..n)
                .map(|_| {
                    let b = ctx.b.input(k + w);
                    ctx.leaf(b)
                })
                .collect();
            sort(&mut ctx, &xs, k, kv, Strategy::Ladder)?;
            let s = ctx.b.into_stats();
            rows.push(RecurrenceRow {
                n,
                k_values: kv,
                bool_gates: s.bool_gates,
                selector_gates: s.selector_gates,
                lowered: s.lowered_estimate,
            });
        }
    }
    Ok(rows)
}
