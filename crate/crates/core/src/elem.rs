//! Flagged elements: one metadata bit plus a routed payload.

use crate::circuit::{Bundle, WireId};
use crate::ctx::Ctx;
use crate::route::Item;

/// An element inside a circuit under construction. `flag` is the real or
/// distinguished bit; the payload travels through the router.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Elem {
    pub flag: WireId,
    pub item: Item,
}

impl Elem {
    pub fn dummy(ctx: &mut Ctx, w: usize) -> Elem {
        Elem {
            flag: ctx.b.zero(),
            item: ctx.zeros_item(w),
        }
    }

    pub fn width(&self) -> usize {
        self.item.width()
    }
}

/// Declares `n` input bundles of `1 + w` bits (flag first) and marks the
/// payload part.
pub fn inputs(ctx: &mut Ctx, n: usize, w: usize) -> Vec<Elem> {
    (0..n)
        .map(|_| {
            let b = ctx.b.input(1 + w);
            let payload = b.slice(1..1 + w);
            ctx.b.mark_payload(payload.wires());
            Elem {
                flag: b.get(0),
                item: ctx.leaf(payload),
            }
        })
        .collect()
}

/// Output bundles, flag first.
pub fn outputs(xs: &[Elem]) -> Vec<Bundle> {
    xs.iter()
        .map(|e| {
            let mut v = vec![e.flag];
            v.extend_from_slice(e.item.wires());
            Bundle(v)
        })
        .collect()
}

/// Pads with dummies up to `len`.
pub fn pad(ctx: &mut Ctx, xs: &mut Vec<Elem>, len: usize) {
    if xs.len() >= len {
        return;
    }
    let w = xs.first().map(Elem::width).unwrap_or(0);
    while xs.len() < len {
        let d = Elem::dummy(ctx, w);
        xs.push(d);
    }
}

pub fn flags(xs: &[Elem]) -> Vec<WireId> {
    xs.iter().map(|e| e.flag).collect()
}

pub fn items(xs: &[Elem]) -> Vec<Item> {
    xs.iter().map(|e| e.item.clone()).collect()
}
