//! Compaction for tiny payloads by sorting extended values (flag and
//! payload read as one number) with a counting tree.
//!
//! The payload bits are computed on, so these circuits are outside the
//! indivisible model and mark no payload wires.

use crate::circuit::{Circuit, Probe, ProbeKind, WireId};
use crate::ctx::{Config, Ctx};
use crate::elem::Elem;
use crate::error::{Error, Result};
use crate::gadgets::{binary_to_unary, bits_for, count_ones, Num};

/// Largest payload width accepted.
pub const MAX_W: usize = 12;

/// A note when `w` exceeds `log log n`, where the ladder is usually smaller.
pub fn width_warning(n: usize, w: usize) -> Option<String> {
    let ll = (n.max(4) as f64).log2().log2();
    (w as f64 > ll + 1e-9).then(|| format!("w={w} exceeds log log n = {ll:.2}; tiny-w circuits grow as 2^w n"))
}

fn xor_all(ctx: &mut Ctx, ws: &[WireId]) -> WireId {
    let mut it = ws.iter().copied();
    let Some(mut acc) = it.next() else {
        return ctx.b.zero();
    };
    loop {
        match (it.next(), it.next()) {
            (Some(x), Some(y)) => acc = ctx.b.func1(&[acc, x, y], |r| r.count_ones() & 1 == 1),
            (Some(x), None) => return ctx.b.xor(acc, x),
            _ => return acc,
        }
    }
}

/// Splits counts of a node with `2h` leaves between its halves.
fn split(ctx: &mut Ctx, p: &Num, h: u64) -> (Num, Num) {
    let k = h.trailing_zeros() as usize;
    if p.max <= h {
        return (p.clone(), Num::zero());
    }
    let t = p.lsb(&mut ctx.b, k + 1);
    let hb = p.lsb(&mut ctx.b, k);
    let ge = ctx.b.or(t, hb);
    let mut left = vec![ge];
    let mut right = vec![t];
    for j in (0..k).rev() {
        let lj = p.lsb(&mut ctx.b, j);
        left.push(ctx.b.and_not(lj, ge));
        right.push(ctx.b.and(lj, hb));
    }
    (Num::new(left, h), Num::new(right, (p.max - h).min(h)))
}

/// First index holding a one of a monotone 0/1 vector of length `2^k`:
/// bit `j` is the parity of transitions inside blocks with bit `j` set.
fn decode(ctx: &mut Ctx, p: &[WireId]) -> Vec<WireId> {
    let k = p.len().trailing_zeros() as usize;
    (0..k)
        .rev()
        .map(|j| {
            let s = 1usize << j;
            let mut terms = Vec::new();
            let mut a = s;
            while a < p.len() {
                terms.push(p[a - 1]);
                terms.push(p[a + s - 1]);
                a += 2 * s;
            }
            xor_all(ctx, &terms)
        })
        .collect()
}

/// Sorts extended values of `bits` wires each, ascending.
pub fn sort_values(ctx: &mut Ctx, vals: &[Vec<WireId>], bits: usize) -> Vec<Vec<WireId>> {
    let n = vals.len();
    if n == 0 {
        return Vec::new();
    }
    let v = 1usize << bits;
    let size = n.next_power_of_two();
    let mut vals = vals.to_vec();
    let top = ctx.b.one();
    vals.resize(size, vec![top; bits]);
    let thermo: Vec<Vec<WireId>> = vals
        .iter()
        .map(|x| binary_to_unary(&mut ctx.b, v, &Num::wide(x.clone())))
        .collect();
    let psum: Vec<Num> = (0..v)
        .map(|c| {
            let col: Vec<WireId> = thermo.iter().map(|t| t[c]).collect();
            count_ones(&mut ctx.b, &col)
        })
        .collect();
    let width = bits_for(size as u64);
    let psum_bits: Vec<Vec<WireId>> = psum.iter().map(|p| p.to_width(&mut ctx.b, width)).collect();
    ctx.b.probe(Probe::new(
        "root counts",
        ProbeKind::PrefixCounts {
            values: vals.clone(),
            psum: psum_bits,
        },
    ));
    let mut level = vec![psum];
    let mut m = size as u64;
    while m > 1 {
        let h = m / 2;
        let mut next = Vec::with_capacity(level.len() * 2);
        for node in &level {
            let (l, r): (Vec<Num>, Vec<Num>) = node.iter().map(|p| split(ctx, p, h)).unzip();
            next.push(l);
            next.push(r);
        }
        level = next;
        m = h;
    }
    level
        .iter()
        .take(n)
        .map(|leaf| {
            let p: Vec<WireId> = leaf.iter().map(|x| x.lsb(&mut ctx.b, 0)).collect();
            decode(ctx, &p)
        })
        .collect()
}

/// Tight compaction of elements by sorting complemented-flag extended
/// values. Output items are fresh wires, not routed copies.
pub fn tinyw_compact(ctx: &mut Ctx, xs: &[Elem]) -> Result<Vec<Elem>> {
    let Some(first) = xs.first() else {
        return Ok(Vec::new());
    };
    let w = first.item.width();
    if w > MAX_W {
        return Err(Error::Param(format!("tiny-w compaction supports w <= {MAX_W}, got {w}")));
    }
    let vals: Vec<Vec<WireId>> = xs
        .iter()
        .map(|x| {
            let mut v = vec![ctx.b.not(x.flag)];
            v.extend_from_slice(x.item.wires());
            v
        })
        .collect();
    let sorted = sort_values(ctx, &vals, 1 + w);
    Ok(sorted
        .into_iter()
        .map(|s| {
            let flag = ctx.b.not(s[0]);
            let item = ctx.leaf(s[1..].to_vec().into());
            Elem { flag, item }
        })
        .collect())
}

/// Compaction of `n` elements of `1 + w` bits.
pub fn build_tinyw(n: usize, w: usize, cfg: &Config) -> Result<Circuit> {
    if n == 0 || w == 0 || w > MAX_W {
        return Err(Error::Param(format!("tiny-w needs n >= 1 and 1 <= w <= {MAX_W} (n={n}, w={w})")));
    }
    let mut ctx = Ctx::new(cfg.clone());
    let xs: Vec<Elem> = (0..n)
        .map(|_| {
            let b = ctx.b.input(1 + w);
            let item = ctx.leaf(b.slice(1..1 + w));
            Elem { flag: b.get(0), item }
        })
        .collect();
    let out = tinyw_compact(&mut ctx, &xs)?;
    ctx.b.set_meta("family", "tinyw");
    ctx.b.set_meta("n", n);
    ctx.b.set_meta("w", w);
    let outs = crate::elem::outputs(&out);
    ctx.finish(outs)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn decode_finds_first_one() {
        let mut ctx = Ctx::new(Config::default());
        let ins = ctx.b.input(8);
        let p: Vec<WireId> = ins.wires().to_vec();
        let out = decode(&mut ctx, &p);
        let c = ctx.finish(vec![out.into()]).unwrap();
        for first in 0..8 {
            let bits: Vec<bool> = (0..8).map(|v| v >= first).collect();
            let r = c.eval(&[bits]).unwrap();
            let got = r[0].iter().fold(0, |a, &b| a << 1 | usize::from(b));
            assert_eq!(got, first);
        }
    }
}
