//! Payload movement with recorded provenance.
//!
//! Every selector that moves elements goes through a [`Router`]. While a
//! capture is open, each move is logged as an op over node ids; a closed
//! capture can then be *reversed*: values placed on its outputs travel back
//! along the recorded decisions to the slots they came from, using reverse
//! selectors for forward selectors and vice versa.
//!
//! Reversal carries one extra "active" bit next to each value. Where a
//! forward node fanned out, the reverse contributions are merged with a
//! selector on that bit, so at most one contribution (the real one) wins.

use std::collections::{HashMap, HashSet};

use crate::circuit::{Builder, Bundle, WireId};

const NONE: u32 = u32::MAX;

/// A bundle together with the router node that produced it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Item {
    id: u32,
    pub b: Bundle,
}

impl Item {
    pub fn width(&self) -> usize {
        self.b.width()
    }

    pub fn get(&self, i: usize) -> WireId {
        self.b.get(i)
    }

    pub fn wires(&self) -> &[WireId] {
        self.b.wires()
    }
}

#[derive(Clone, Copy, Debug)]
enum Op {
    Sel { c: u32, a: u32, b: u32, out: u32 },
    Rsel { c: u32, input: u32, out0: u32, out1: u32, width: u32 },
    Concat { out: u32, start: u32, len: u32 },
    Split { input: u32, start: u32, len: u32 },
}

/// A closed range of the op log.
#[derive(Clone, Copy, Debug)]
pub struct Capture {
    lo: usize,
    hi: usize,
}

#[derive(Debug, Default)]
pub struct Router {
    depth: u32,
    next: u32,
    ops: Vec<Op>,
    /// (node, width) pairs referenced by concat and split ops
    arena: Vec<(u32, u32)>,
}

impl Router {
    fn fresh(&mut self) -> u32 {
        if self.depth == 0 {
            return NONE;
        }
        let id = self.next;
        self.next = self.next.checked_add(1).filter(|&n| n != NONE).expect("router node ids exhausted");
        id
    }

    fn log(&mut self, op: Op) {
        if self.depth > 0 {
            self.ops.push(op);
        }
    }

    pub fn is_capturing(&self) -> bool {
        self.depth > 0
    }

    /// An item with no routing history (constants, metadata, fresh inputs).
    pub fn leaf(&mut self, b: Bundle) -> Item {
        Item { id: self.fresh(), b }
    }

    /// `if c { y } else { x }`.
    pub fn sel(&mut self, bld: &mut Builder, c: WireId, x: &Item, y: &Item) -> Item {
        if x == y {
            return x.clone();
        }
        match bld.const_value(c) {
            Some(false) => return x.clone(),
            Some(true) => return y.clone(),
            None => {}
        }
        let b = bld.select(c, &x.b, &y.b);
        let out = self.fresh();
        self.log(Op::Sel {
            c: c.0,
            a: x.id,
            b: y.id,
            out,
        });
        Item { id: out, b }
    }

    /// `(x, 0)` if `c` is 0, `(0, x)` otherwise.
    pub fn rsel(&mut self, bld: &mut Builder, c: WireId, x: &Item) -> (Item, Item) {
        if let Some(v) = bld.const_value(c) {
            let z = bld.zeros(x.width());
            let z = self.leaf(z);
            return if v { (z, x.clone()) } else { (x.clone(), z) };
        }
        let (p, q) = bld.reverse_select(c, &x.b);
        let (out0, out1) = (self.fresh(), self.fresh());
        self.log(Op::Rsel {
            c: c.0,
            input: x.id,
            out0,
            out1,
            width: x.width() as u32,
        });
        (Item { id: out0, b: p }, Item { id: out1, b: q })
    }

    pub fn concat(&mut self, parts: &[&Item]) -> Item {
        let b = Bundle::concat(&parts.iter().map(|p| &p.b).collect::<Vec<_>>());
        let out = self.fresh();
        if self.depth > 0 {
            let start = self.arena.len() as u32;
            self.arena.extend(parts.iter().map(|p| (p.id, p.width() as u32)));
            self.log(Op::Concat {
                out,
                start,
                len: parts.len() as u32,
            });
        }
        Item { id: out, b }
    }

    /// Cuts `x` into consecutive pieces of the given widths.
    pub fn split(&mut self, x: &Item, widths: &[usize]) -> Vec<Item> {
        assert_eq!(widths.iter().sum::<usize>(), x.width(), "split widths");
        let mut at = 0;
        let mut parts = Vec::with_capacity(widths.len());
        for &w in widths {
            parts.push(Item {
                id: self.fresh(),
                b: x.b.slice(at..at + w),
            });
            at += w;
        }
        if self.depth > 0 {
            let start = self.arena.len() as u32;
            self.arena.extend(parts.iter().map(|p| (p.id, p.width() as u32)));
            self.log(Op::Split {
                input: x.id,
                start,
                len: parts.len() as u32,
            });
        }
        parts
    }

    /// Opens a capture. Returns entry items aliasing `sources`; routing that
    /// starts from them can later be reversed.
    pub fn begin(&mut self, sources: &[Item]) -> (usize, Vec<Item>) {
        // inside an enclosing capture the aliases are linked to their sources
        // so that the enclosing reversal can follow them
        let entries = if self.depth > 0 {
            sources.iter().map(|s| self.concat(&[s])).collect()
        } else {
            self.depth += 1;
            let e = sources.iter().map(|s| Item { id: self.fresh(), b: s.b.clone() }).collect();
            self.depth -= 1;
            e
        };
        self.depth += 1;
        (self.ops.len(), entries)
    }

    pub fn end(&mut self, lo: usize) -> Capture {
        assert!(self.depth > 0, "no open capture");
        self.depth -= 1;
        Capture {
            lo,
            hi: self.ops.len(),
        }
    }

    fn parts(&self, start: u32, len: u32) -> &[(u32, u32)] {
        &self.arena[start as usize..(start + len) as usize]
    }

    /// Sends `seeds[k]` back from `sinks[k]` through the captured routing.
    /// Returns, per entry item, the value that arrived there and a bit that
    /// is 1 iff something arrived.
    pub fn reverse(
        &mut self,
        bld: &mut Builder,
        cap: Capture,
        entries: &[Item],
        sinks: &[Item],
        seeds: &[Item],
    ) -> Vec<(Item, WireId)> {
        assert_eq!(sinks.len(), seeds.len());
        let ops: Vec<Op> = self.ops[cap.lo..cap.hi].to_vec();
        let mut reach: HashSet<u32> = entries.iter().map(|e| e.id).collect();
        reach.remove(&NONE);
        for op in &ops {
            match *op {
                Op::Sel { a, b, out, .. } => {
                    if reach.contains(&a) || reach.contains(&b) {
                        reach.insert(out);
                    }
                }
                Op::Rsel { input, out0, out1, .. } => {
                    if reach.contains(&input) {
                        reach.insert(out0);
                        reach.insert(out1);
                    }
                }
                Op::Concat { out, start, len } => {
                    if self.parts(start, len).iter().any(|(p, _)| reach.contains(p)) {
                        reach.insert(out);
                    }
                }
                Op::Split { input, start, len } => {
                    if reach.contains(&input) {
                        let ids: Vec<u32> = self.parts(start, len).iter().map(|p| p.0).collect();
                        reach.extend(ids);
                    }
                }
            }
        }
        let one = bld.one();
        let one = self.leaf(vec![one].into());
        let mut acc: HashMap<u32, Item> = HashMap::new();
        for (s, v) in sinks.iter().zip(seeds) {
            assert_eq!(s.width(), v.width(), "seed width must match its sink");
            if s.id != NONE && reach.contains(&s.id) {
                let item = self.concat(&[v, &one]);
                self.merge(bld, &mut acc, s.id, item);
            }
        }
        for op in ops.iter().rev() {
            match *op {
                Op::Sel { c, a, b, out } => {
                    let Some(v) = acc.remove(&out) else { continue };
                    let (x0, x1) = self.rsel(bld, WireId(c), &v);
                    if reach.contains(&a) {
                        self.merge(bld, &mut acc, a, x0);
                    }
                    if reach.contains(&b) {
                        self.merge(bld, &mut acc, b, x1);
                    }
                }
                Op::Rsel {
                    c,
                    input,
                    out0,
                    out1,
                    width,
                } => {
                    let (v0, v1) = (acc.remove(&out0), acc.remove(&out1));
                    if !reach.contains(&input) || (v0.is_none() && v1.is_none()) {
                        continue;
                    }
                    let fill = |v: Option<Item>, r: &mut Router, bld: &mut Builder| {
                        v.unwrap_or_else(|| {
                            let z = bld.zeros(width as usize + 1);
                            r.leaf(z)
                        })
                    };
                    let v0 = fill(v0, self, bld);
                    let v1 = fill(v1, self, bld);
                    let m = self.sel(bld, WireId(c), &v0, &v1);
                    self.merge(bld, &mut acc, input, m);
                }
                Op::Concat { out, start, len } => {
                    let Some(v) = acc.remove(&out) else { continue };
                    let parts = self.parts(start, len).to_vec();
                    let mut widths: Vec<usize> = parts.iter().map(|p| p.1 as usize).collect();
                    widths.push(1);
                    let pieces = self.split(&v, &widths);
                    let act = &pieces[pieces.len() - 1];
                    for ((id, _), piece) in parts.iter().zip(&pieces) {
                        if reach.contains(id) {
                            let item = self.concat(&[piece, act]);
                            self.merge(bld, &mut acc, *id, item);
                        }
                    }
                }
                Op::Split { input, start, len } => {
                    if !reach.contains(&input) {
                        continue;
                    }
                    let parts = self.parts(start, len).to_vec();
                    let got: Vec<Option<Item>> = parts.iter().map(|(id, _)| acc.remove(id)).collect();
                    if got.iter().all(Option::is_none) {
                        continue;
                    }
                    let mut vals = Vec::with_capacity(parts.len() + 1);
                    let mut act = None;
                    for ((_, w), g) in parts.iter().zip(got) {
                        let w = *w as usize;
                        match g {
                            Some(item) => {
                                let mut pieces = self.split(&item, &[w, 1]);
                                let a = pieces.pop().expect("two pieces");
                                act.get_or_insert(a);
                                vals.push(pieces.pop().expect("two pieces"));
                            }
                            None => {
                                let z = bld.zeros(w);
                                vals.push(self.leaf(z));
                            }
                        }
                    }
                    vals.push(act.expect("some part present"));
                    let refs: Vec<&Item> = vals.iter().collect();
                    let item = self.concat(&refs);
                    self.merge(bld, &mut acc, input, item);
                }
            }
        }
        let out = entries
            .iter()
            .map(|e| match acc.remove(&e.id) {
                Some(item) => {
                    let mut pieces = self.split(&item, &[e.width(), 1]);
                    let act = pieces.pop().expect("two pieces").get(0);
                    (pieces.pop().expect("two pieces"), act)
                }
                None => {
                    let z = bld.zeros(e.width());
                    (self.leaf(z), bld.zero())
                }
            })
            .collect();
        if self.depth == 0 {
            self.ops.truncate(cap.lo);
            let keep = self
                .ops
                .iter()
                .rev()
                .find_map(|op| match *op {
                    Op::Concat { start, len, .. } | Op::Split { start, len, .. } => Some((start + len) as usize),
                    _ => None,
                })
                .unwrap_or(0);
            self.arena.truncate(keep);
        }
        out
    }

    fn merge(&mut self, bld: &mut Builder, acc: &mut HashMap<u32, Item>, id: u32, item: Item) {
        let merged = match acc.remove(&id) {
            None => item,
            Some(prev) => {
                let act = item.get(item.width() - 1);
                self.sel(bld, act, &prev, &item)
            }
        };
        acc.insert(id, merged);
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reverse_of_a_swap_network_returns_items_home() {
        // two inputs routed through a conditional exchange, marked back
        let mut b = Builder::new();
        let mut r = Router::default();
        let c = b.input(1).get(0);
        let x = b.input(2);
        let y = b.input(2);
        let (x, y) = (r.leaf(x), r.leaf(y));
        let (lo, e) = r.begin(&[x, y]);
        let p = r.sel(&mut b, c, &e[0], &e[1]);
        let q = r.sel(&mut b, c, &e[1], &e[0]);
        let cap = r.end(lo);
        let s0 = b.input(2);
        let s1 = b.input(2);
        let (s0, s1) = (r.leaf(s0), r.leaf(s1));
        let back = r.reverse(&mut b, cap, &e, &[p, q], &[s0, s1]);
        let outs = vec![back[0].0.b.clone(), back[1].0.b.clone(), vec![back[0].1, back[1].1].into()];
        let circ = b.finish(outs).unwrap();
        let bits = |v: u32, w: usize| (0..w).rev().map(|i| v >> i & 1 == 1).collect::<Vec<_>>();
        for cv in 0..2 {
            let res = circ
                .eval(&[bits(cv, 1), bits(0, 2), bits(0, 2), bits(1, 2), bits(2, 2)])
                .unwrap();
            // sink 0 came from input cv; sink 1 from the other one
            let (home0, home1) = if cv == 0 { (1, 2) } else { (2, 1) };
            assert_eq!(res[0], bits(home0, 2));
            assert_eq!(res[1], bits(home1, 2));
            assert_eq!(res[2], vec![true, true]);
        }
    }

    #[test]
    fn outer_reverse_sees_through_a_nested_capture() {
        let mut b = Builder::new();
        let mut r = Router::default();
        let c = b.input(1).get(0);
        let x = b.input(2);
        let y = b.input(2);
        let (x, y) = (r.leaf(x), r.leaf(y));
        let (lo, e) = r.begin(&[x, y]);
        let (ilo, ie) = r.begin(&e);
        let p = r.sel(&mut b, c, &ie[0], &ie[1]);
        let q = r.sel(&mut b, c, &ie[1], &ie[0]);
        let icap = r.end(ilo);
        let back = r.reverse(&mut b, icap, &ie, &[p.clone(), q.clone()], &[p, q]);
        let (u, v) = (back[0].0.clone(), back[1].0.clone());
        let cap = r.end(lo);
        let s0 = b.input(2);
        let s1 = b.input(2);
        let (s0, s1) = (r.leaf(s0), r.leaf(s1));
        let home = r.reverse(&mut b, cap, &e, &[u, v], &[s0, s1]);
        let outs = vec![home[0].0.b.clone(), home[1].0.b.clone(), vec![home[0].1, home[1].1].into()];
        let circ = b.finish(outs).unwrap();
        let bits = |v: u32, w: usize| (0..w).rev().map(|i| v >> i & 1 == 1).collect::<Vec<_>>();
        for cv in 0..2 {
            let res = circ
                .eval(&[bits(cv, 1), bits(0, 2), bits(0, 2), bits(1, 2), bits(2, 2)])
                .unwrap();
            assert_eq!(res[0], bits(1, 2));
            assert_eq!(res[1], bits(2, 2));
            assert_eq!(res[2], vec![true, true]);
        }
    }
}
