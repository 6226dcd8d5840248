//! Arithmetic and routing building blocks.
//!
//! Numbers are unsigned and big-endian. A [`Num`] also carries an upper
//! bound on its value, which lets adders and counters drop carry bits that
//! can never be set.

use crate::circuit::{Builder, WireId};
use crate::ctx::Ctx;
use crate::route::Item;

/// Bits needed to hold values up to `max`.
pub fn bits_for(max: u64) -> usize {
    (64 - max.leading_zeros()) as usize
}

/// `ceil(log2(x))` for `x >= 1`.
pub fn ceil_log2(x: u64) -> u32 {
    assert!(x >= 1);
    64 - (x - 1).leading_zeros()
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Num {
    pub bits: Vec<WireId>,
    pub max: u64,
}

impl Num {
    pub fn new(bits: Vec<WireId>, max: u64) -> Self {
        debug_assert!(bits_for(max) <= bits.len() || bits.len() >= 64);
        Num { bits, max }
    }

    /// A number occupying all of `bits`.
    pub fn wide(bits: Vec<WireId>) -> Self {
        let max = if bits.len() >= 64 { u64::MAX } else { (1u64 << bits.len()) - 1 };
        Num { bits, max }
    }

    pub fn bit(w: WireId) -> Self {
        Num { bits: vec![w], max: 1 }
    }

    pub fn zero() -> Self {
        Num { bits: vec![], max: 0 }
    }

    pub fn constant(b: &mut Builder, v: u64) -> Self {
        let w = bits_for(v);
        Num {
            bits: b.const_num(v, w),
            max: v,
        }
    }

    pub fn width(&self) -> usize {
        self.bits.len()
    }

    /// Bit of significance `j` (the least significant bit is `j = 0`).
    pub fn lsb(&self, b: &mut Builder, j: usize) -> WireId {
        if j < self.bits.len() {
            self.bits[self.bits.len() - 1 - j]
        } else {
            b.zero()
        }
    }

    /// Zero-extends (or keeps) to exactly `w` bits; `w` must cover the bound.
    pub fn to_width(&self, b: &mut Builder, w: usize) -> Vec<WireId> {
        assert!(w >= bits_for(self.max).min(self.bits.len()), "width {w} too small");
        (0..w).rev().map(|j| self.lsb(b, j)).collect()
    }
}

/// `x + y`.
pub fn add(b: &mut Builder, x: &Num, y: &Num) -> Num {
    let max = x.max.saturating_add(y.max);
    let wout = bits_for(max);
    let mut out = vec![b.zero(); wout];
    let mut carry = b.zero();
    for j in 0..wout {
        let (xi, yi) = (x.lsb(b, j), y.lsb(b, j));
        let need_carry = j + 1 < wout;
        let o = b.func(&[xi, yi, carry], if need_carry { 2 } else { 1 }, |r| {
            let s = (r & 1) + (r >> 1 & 1) + (r >> 2 & 1);
            (s & 1) | (s >> 1) << 1
        });
        out[wout - 1 - j] = o[0];
        if need_carry {
            carry = o[1];
        }
    }
    Num::new(out, max)
}

/// `x - y mod 2^width`.
pub fn sub_wrap(b: &mut Builder, x: &Num, y: &Num, width: usize) -> Num {
    let mut out = vec![b.zero(); width];
    let mut borrow = b.zero();
    for j in 0..width {
        let (xi, yi) = (x.lsb(b, j), y.lsb(b, j));
        let need = j + 1 < width;
        let o = b.func(&[xi, yi, borrow], if need { 2 } else { 1 }, |r| {
            let (xv, yv, bv) = (r & 1, r >> 1 & 1, r >> 2 & 1);
            let d = xv ^ yv ^ bv;
            let nb = ((1 - xv) & (yv | bv)) | (yv & bv);
            d | nb << 1
        });
        out[width - 1 - j] = o[0];
        if need {
            borrow = o[1];
        }
    }
    Num::wide(out)
}

/// `x - y`, valid when `x >= y`; the bound is taken from `x`.
pub fn sub(b: &mut Builder, x: &Num, y: &Num) -> Num {
    let w = bits_for(x.max);
    let mut r = sub_wrap(b, x, y, w);
    r.max = x.max;
    r
}

fn chain(b: &mut Builder, x: &Num, y: &Num, init: impl Fn(u32, u32) -> bool, step: impl Fn(u32, u32, u32) -> bool) -> WireId {
    let k = x.width().max(y.width()).max(1);
    let (x0, y0) = (x.lsb(b, 0), y.lsb(b, 0));
    let mut acc = b.func1(&[x0, y0], |r| init(r & 1, r >> 1 & 1));
    for j in 1..k {
        let (xi, yi) = (x.lsb(b, j), y.lsb(b, j));
        acc = b.func1(&[xi, yi, acc], |r| step(r & 1, r >> 1 & 1, r >> 2 & 1));
    }
    acc
}

/// `x > y`, one gate per bit.
pub fn gt(b: &mut Builder, x: &Num, y: &Num) -> WireId {
    chain(b, x, y, |p, q| p > q, |p, q, g| p > q || (p == q && g == 1))
}

/// `x >= y`, one gate per bit.
pub fn ge(b: &mut Builder, x: &Num, y: &Num) -> WireId {
    chain(b, x, y, |p, q| p >= q, |p, q, g| p > q || (p == q && g == 1))
}

pub fn lt(b: &mut Builder, x: &Num, y: &Num) -> WireId {
    gt(b, y, x)
}

pub fn le(b: &mut Builder, x: &Num, y: &Num) -> WireId {
    ge(b, y, x)
}

/// `x == y`, one gate per bit.
pub fn eq(b: &mut Builder, x: &Num, y: &Num) -> WireId {
    chain(b, x, y, |p, q| p == q, |p, q, e| p == q && e == 1)
}

pub fn le_const(b: &mut Builder, x: &Num, c: u64) -> WireId {
    if x.max <= c {
        return b.one();
    }
    let c = Num::constant(b, c);
    le(b, x, &c)
}

pub fn ge_const(b: &mut Builder, x: &Num, c: u64) -> WireId {
    if c == 0 {
        return b.one();
    }
    if x.max < c {
        return b.zero();
    }
    let c = Num::constant(b, c);
    ge(b, x, &c)
}

pub fn eq_const(b: &mut Builder, x: &Num, c: u64) -> WireId {
    if x.max < c {
        return b.zero();
    }
    let c = Num::constant(b, c);
    eq(b, x, &c)
}

/// Three-way comparison as `(x == y, x > y)`, `2k - 1` gates.
pub fn compare(b: &mut Builder, x: &Num, y: &Num) -> (WireId, WireId) {
    let k = x.width().max(y.width()).max(1);
    let (x0, y0) = (x.lsb(b, 0), y.lsb(b, 0));
    let o = b.func(&[x0, y0], 2, |r| {
        let (p, q) = (r & 1, r >> 1 & 1);
        (p == q) as u32 | ((p > q) as u32) << 1
    });
    let (mut e, mut g) = (o[0], o[1]);
    for j in 1..k {
        let (xi, yi) = (x.lsb(b, j), y.lsb(b, j));
        let ne = b.func1(&[xi, yi, e], |r| (r & 1) == (r >> 1 & 1) && r >> 2 & 1 == 1);
        g = b.func1(&[xi, yi, g], |r| {
            let (p, q, h) = (r & 1, r >> 1 & 1, r >> 2 & 1);
            p > q || (p == q && h == 1)
        });
        e = ne;
    }
    (e, g)
}

/// Population count through a tree of adders; three single bits at a time
/// enter through one full-adder gate.
pub fn count_ones(b: &mut Builder, bits: &[WireId]) -> Num {
    let mut level: Vec<Num> = bits
        .chunks(3)
        .map(|c| match c {
            [x] => Num::bit(*x),
            _ => {
                let mut ins = c.to_vec();
                ins.resize(3, b.zero());
                let o = b.func(&ins, 2, |r| {
                    let s = r.count_ones();
                    (s >> 1) | (s & 1) << 1
                });
                let max = c.len() as u64;
                Num::new(if max >= 2 { o } else { vec![o[1]] }, max)
            }
        })
        .collect();
    if level.is_empty() {
        return Num::zero();
    }
    while level.len() > 1 {
        let mut next = Vec::with_capacity(level.len().div_ceil(2));
        let mut it = level.chunks(2);
        for pair in &mut it {
            next.push(match pair {
                [x, y] => add(b, x, y),
                [x] => x.clone(),
                _ => unreachable!(),
            });
        }
        level = next;
    }
    level.pop().expect("one number")
}

/// `x + bit`, one gate per bit of `x`.
pub fn increment(b: &mut Builder, x: &Num, bit: WireId) -> Num {
    add(b, x, &Num::bit(bit))
}

/// Inclusive running counts: entry `i` is the number of ones in `bits[..=i]`.
pub fn prefix_sum(b: &mut Builder, bits: &[WireId]) -> Vec<Num> {
    let mut out = Vec::with_capacity(bits.len());
    let mut acc = Num::zero();
    for &x in bits {
        acc = increment(b, &acc, x);
        out.push(acc.clone());
    }
    out
}

/// Selects between two numbers with one selector gate.
pub fn select_num(b: &mut Builder, c: WireId, x: &Num, y: &Num) -> Num {
    let w = x.width().max(y.width());
    if w == 0 {
        return Num::zero();
    }
    let xa = x.to_width(b, w);
    let ya = y.to_width(b, w);
    let o = b.select(c, &xa.into(), &ya.into());
    Num::new(o.0, x.max.max(y.max))
}

/// Binary to unary: `u[j] = 1` iff `j >= k`, for `j < n`. Values of `k`
/// above `n` give all zeros.
///
/// Labels flow down a binary tree over positions. A node spanning
/// `[s, s + 2^h)` holds `(m, v)`: `m` says the boundary `k` falls inside it,
/// otherwise every position in it has value `v`. The bit of `k` at that
/// level decides which child inherits the boundary.
pub fn binary_to_unary(b: &mut Builder, n: usize, k: &Num) -> Vec<WireId> {
    assert!(n >= 1);
    let levels = ceil_log2(n as u64) as usize;
    // root spans [0, 2^levels): boundary inside unless k >= 2^levels
    let mut top = b.zero();
    for j in levels..k.width() {
        let kb = k.lsb(b, j);
        top = b.or(top, kb);
    }
    let m = b.not(top);
    let v = b.zero();
    let mut out = vec![b.zero(); n];
    descend(b, k, levels, 0, m, v, n, &mut out);
    out
}

#[allow(clippy::too_many_arguments)]
fn descend(b: &mut Builder, k: &Num, h: usize, s: usize, m: WireId, v: WireId, n: usize, out: &mut [WireId]) {
    if h == 0 {
        out[s] = b.or(m, v);
        return;
    }
    let kb = k.lsb(b, h - 1);
    let half = 1usize << (h - 1);
    let right_live = s + half < n;
    if h == 1 {
        if right_live {
            let o = b.func(&[m, v, kb], 2, |r| {
                let (m, v, kb) = (r & 1, r >> 1 & 1, r >> 2 & 1);
                let left = if m == 1 { 1 - kb } else { v };
                left | (m | v) << 1
            });
            out[s] = o[0];
            out[s + 1] = o[1];
        } else {
            out[s] = b.func1(&[m, v, kb], |r| {
                let (m, v, kb) = (r & 1, r >> 1 & 1, r >> 2 & 1);
                if m == 1 {
                    kb == 0
                } else {
                    v == 1
                }
            });
        }
        return;
    }
    let lo = b.func(&[m, v, kb], 2, |r| {
        let (m, v, kb) = (r & 1, r >> 1 & 1, r >> 2 & 1);
        (m & (1 - kb)) | (v & (1 - m)) << 1
    });
    descend(b, k, h - 1, s, lo[0], lo[1], n, out);
    if right_live {
        let hi = b.func(&[m, v, kb], 2, |r| {
            let (m, v, kb) = (r & 1, r >> 1 & 1, r >> 2 & 1);
            (m & kb) | ((m & (1 - kb)) | ((1 - m) & v)) << 1
        });
        descend(b, k, h - 1, s + half, hi[0], hi[1], n, out);
    }
}

/// The first item whose `matches` bit is set, or zeros, plus a found bit.
/// One gate and one selector per item.
pub fn first_match(ctx: &mut Ctx, matches: &[WireId], items: &[Item]) -> (WireId, Item) {
    assert_eq!(matches.len(), items.len());
    assert!(!items.is_empty());
    let w = items[0].width();
    let mut acc = ctx.zeros_item(w);
    let mut found = ctx.b.zero();
    for (i, (&m, it)) in matches.iter().zip(items).enumerate() {
        let ctrl = if i == 0 {
            found = m;
            m
        } else {
            let o = ctx.b.func(&[m, found], 2, |r| {
                let (m, f) = (r & 1, r >> 1 & 1);
                (m & (1 - f)) | (m | f) << 1
            });
            found = o[1];
            o[0]
        };
        acc = ctx.sel(ctrl, &acc, it);
    }
    (found, acc)
}

/// First item whose label equals `target`, or zeros.
pub fn find_in_array(ctx: &mut Ctx, labels: &[Num], target: &Num, items: &[Item]) -> (WireId, Item) {
    let matches: Vec<WireId> = labels.iter().map(|l| eq(&mut ctx.b, l, target)).collect();
    first_match(ctx, &matches, items)
}

/// Comparator pairs of Batcher's odd-even merge sort for `n` inputs. Built
/// for the next power of two; pairs touching a padding slot are dropped,
/// which is sound when padding sorts last.
pub fn batcher_pairs(n: usize) -> Vec<(usize, usize)> {
    let mut pairs = Vec::new();
    if n < 2 {
        return pairs;
    }
    let size = n.next_power_of_two();
    let mut p = 1;
    while p < size {
        let mut k = p;
        while k >= 1 {
            let mut j = k % p;
            while j + k < size {
                for i in 0..k.min(size - j - k) {
                    let (a, c) = (i + j, i + j + k);
                    if a / (2 * p) == c / (2 * p) && c < n {
                        pairs.push((a, c));
                    }
                }
                j += 2 * k;
            }
            k /= 2;
        }
        p *= 2;
    }
    pairs
}

/// Compare-exchange on the leading `k` key wires: afterwards `items[i]`
/// has the smaller key.
pub fn compex(ctx: &mut Ctx, items: &mut [Item], i: usize, j: usize, k: usize) {
    let ki = Num::wide(items[i].wires()[..k].to_vec());
    let kj = Num::wide(items[j].wires()[..k].to_vec());
    let c = gt(&mut ctx.b, &ki, &kj);
    let lo = ctx.sel(c, &items[i], &items[j]);
    let hi = ctx.sel(c, &items[j], &items[i]);
    items[i] = lo;
    items[j] = hi;
}

/// Sorts by the leading `k` wires of each item (ascending).
pub fn sort_network(ctx: &mut Ctx, items: &mut [Item], k: usize) {
    for (i, j) in batcher_pairs(items.len()) {
        compex(ctx, items, i, j, k);
    }
}

/// Comparator pairs leaving the median of five at index 2.
pub const MEDIAN5: [(usize, usize); 7] = [(0, 1), (3, 4), (0, 3), (1, 4), (1, 2), (2, 3), (1, 2)];

#[cfg(test)]
mod tests;
