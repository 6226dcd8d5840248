//! Direct tight compaction with quadratically many selectors.

use crate::ctx::Ctx;
use crate::elem::Elem;
use crate::gadgets::{add, binary_to_unary, bits_for, prefix_sum, select_num, sub_wrap, Num};

/// Tight compaction computing only the first `keep` output slots; slots
/// from `keep` on are dummies. Distinguished elements come first.
///
/// Each element gets its destination `e_j` (distinguished) or
/// `c + j - e_j` (otherwise), where `e_j` counts distinguished elements
/// before it. Slot `i` then picks the element whose destination is `i`.
pub fn base_tc(ctx: &mut Ctx, xs: &[Elem], keep: usize) -> Vec<Elem> {
    let n = xs.len();
    if n == 0 {
        return Vec::new();
    }
    let keep = keep.min(n);
    let w = xs[0].width();
    let flags: Vec<_> = xs.iter().map(|e| e.flag).collect();
    let ps = prefix_sum(&mut ctx.b, &flags);
    let c = ps[n - 1].clone();
    let u = binary_to_unary(&mut ctx.b, n, &c);
    let mut out: Vec<Elem> = Vec::with_capacity(n);
    if keep == 0 {
        (0..n).for_each(|_| out.push(Elem::dummy(ctx, w)));
        return out;
    }
    let width = bits_for(n as u64);
    let mut onehot: Vec<Vec<_>> = Vec::with_capacity(n);
    for j in 0..n {
        let excl = if j == 0 { Num::zero() } else { ps[j - 1].clone() };
        let cj = Num::constant(&mut ctx.b, j as u64);
        let cpj = add(&mut ctx.b, &c, &cj);
        let mut other = sub_wrap(&mut ctx.b, &cpj, &excl, width);
        other.max = (n - 1) as u64;
        let dest = select_num(&mut ctx.b, flags[j], &other, &excl);
        let ge = binary_to_unary(&mut ctx.b, keep, &dest);
        let mut hot = Vec::with_capacity(keep);
        for i in 0..keep {
            hot.push(if i == 0 { ge[0] } else { ctx.b.and_not(ge[i], ge[i - 1]) });
        }
        onehot.push(hot);
    }
    let items: Vec<_> = xs.iter().map(|e| e.item.clone()).collect();
    for i in 0..keep {
        let m: Vec<_> = onehot.iter().map(|h| h[i]).collect();
        let (_, it) = crate::gadgets::first_match(ctx, &m, &items);
        let flag = ctx.b.not(u[i]);
        out.push(Elem { flag, item: it });
    }
    for _ in keep..n {
        out.push(Elem::dummy(ctx, w));
    }
    out
}
