//! Lowering to two-input AND/XOR and one-input INV gates.
//!
//! Bool gates are synthesized from a fixed-polarity Reed-Muller form: for
//! each of the `2^inputs` literal polarities the table is expanded into an
//! XOR of AND-monomials, monomials are shared between the outputs of one
//! gate, and the cheapest polarity wins. The search also runs over XOR-linear
//! changes of variables, which catches tables like "not all equal".

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use super::{Builder, Circuit, RawGate, TruthTable, WireId};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Op {
    And(u16, u16),
    Xor(u16, u16),
    Inv(u16),
    /// XOR of a node with itself; node `u16::MAX` means "some circuit input".
    Zero(u16),
}

/// Straight-line program over nodes: `0..inputs` are the gate inputs and
/// each op appends one node.
#[derive(Clone, Debug, Default)]
pub(crate) struct Prog {
    ops: Vec<Op>,
    outs: Vec<u16>,
}

fn anf(col: u32, n: usize) -> u32 {
    // Moebius transform of the column
    let mut c = col;
    for i in 0..n {
        for row in 0..1u32 << n {
            if row >> i & 1 == 1 && c >> (row ^ (1 << i)) & 1 == 1 {
                c ^= 1 << row;
            }
        }
    }
    c
}

fn synth_polarity(table: TruthTable, pol: u32) -> Prog {
    let n = table.inputs as usize;
    let rows = 1u32 << n;
    let mut ops: Vec<Op> = Vec::new();
    let node = |ops: &Vec<Op>| (n + ops.len()) as u16;
    // coefficients per output in the y = x ^ pol basis
    let coeffs: Vec<u32> = (0..table.outputs)
        .map(|j| {
            let col = table.column(j) as u32;
            let mut g = 0;
            for row in 0..rows {
                if col >> (row ^ pol) & 1 == 1 {
                    g |= 1 << row;
                }
            }
            anf(g, n)
        })
        .collect();
    let used: u32 = coeffs.iter().fold(0, |a, &c| a | c);
    let mut lit = [0u16; 3];
    for (i, l) in lit.iter_mut().enumerate().take(n) {
        *l = i as u16;
        let appears = (1..rows).any(|m| m >> i & 1 == 1 && used >> m & 1 == 1);
        if pol >> i & 1 == 1 && appears {
            let id = node(&ops);
            ops.push(Op::Inv(i as u16));
            *l = id;
        }
    }
    let mut mono = [u16::MAX; 8];
    for i in 0..n {
        mono[1 << i] = lit[i];
    }
    for m in 1..rows {
        if used >> m & 1 == 1 && m.count_ones() == 2 {
            let a = m.trailing_zeros() as usize;
            let b = 31 - m.leading_zeros() as usize;
            let id = node(&ops);
            ops.push(Op::And(lit[a], lit[b]));
            mono[m as usize] = id;
        }
    }
    if n == 3 && used >> 7 & 1 == 1 {
        let (pair, rest) = [(3u32, 2usize), (5, 1), (6, 0)]
            .into_iter()
            .find(|&(p, _)| mono[p as usize] != u16::MAX)
            .unwrap_or((3, 2));
        let base = match mono[pair as usize] {
            u16::MAX => {
                let id = node(&ops);
                ops.push(Op::And(lit[0], lit[1]));
                id
            }
            id => id,
        };
        let id = node(&ops);
        ops.push(Op::And(base, lit[rest]));
        mono[7] = id;
    }
    let mut outs = Vec::new();
    for &c in &coeffs {
        let terms: Vec<u16> = (1..rows)
            .filter(|m| c >> m & 1 == 1)
            .map(|m| mono[m as usize])
            .collect();
        let konst = c & 1 == 1;
        let out = if terms.is_empty() {
            let src = if n > 0 { 0 } else { u16::MAX };
            let z = node(&ops);
            ops.push(Op::Zero(src));
            if konst {
                let id = node(&ops);
                ops.push(Op::Inv(z));
                id
            } else {
                z
            }
        } else {
            let mut acc = terms[0];
            for &t in &terms[1..] {
                let id = node(&ops);
                ops.push(Op::Xor(acc, t));
                acc = id;
            }
            if konst {
                let id = node(&ops);
                ops.push(Op::Inv(acc));
                acc = id;
            }
            acc
        };
        outs.push(out);
    }
    Prog { ops, outs }
}

fn fprm(table: TruthTable) -> Prog {
    (0..1u32 << table.inputs)
        .map(|p| synth_polarity(table, p))
        .min_by_key(|p| p.ops.len())
        .expect("at least one polarity")
}

/// Rewrites `table` over the variables `y_i = XOR of inputs in rows[i]`,
/// synthesizes that, and prepends the XOR chains.
fn synth_linear(table: TruthTable, rows: &[u32]) -> Option<Prog> {
    let n = table.inputs as usize;
    let image = |x: u32| -> u32 {
        let mut y = 0;
        for (i, &r) in rows.iter().enumerate() {
            y |= ((x & r).count_ones() & 1) << i;
        }
        y
    };
    let mut seen = 0u32;
    for x in 0..1u32 << n {
        seen |= 1 << image(x);
    }
    if seen.count_ones() != 1 << n {
        return None;
    }
    let tt = TruthTable::from_fn(table.inputs, table.outputs, |y| {
        let x = (0..1u32 << n).find(|&x| image(x) == y).expect("bijective");
        (0..table.outputs).fold(0, |acc, j| acc | (table.output(j, x) as u32) << j)
    });
    let inner = fprm(tt);
    let mut ops: Vec<Op> = Vec::new();
    let mut var = [0u16; 3];
    for (i, &r) in rows.iter().enumerate() {
        let mut bits = (0..n).filter(|&k| r >> k & 1 == 1).map(|k| k as u16);
        let mut acc = bits.next().expect("nonzero row");
        for k in bits {
            ops.push(Op::Xor(acc, k));
            acc = (n + ops.len() - 1) as u16;
        }
        var[i] = acc;
    }
    let outs = append(&mut ops, n, n, &inner, &|x| var[x as usize]);
    Some(Prog { ops, outs })
}

/// Appends `p` (with `n` inputs, mapped through `var`) to a program over
/// `outer` inputs whose ops so far are `ops`.
fn append(ops: &mut Vec<Op>, n: usize, outer: usize, p: &Prog, var: &dyn Fn(u16) -> u16) -> Vec<u16> {
    let shift = (outer + ops.len() - n) as u16;
    let reloc = |x: u16| -> u16 {
        if x == u16::MAX {
            x
        } else if (x as usize) < n {
            var(x)
        } else {
            x + shift
        }
    };
    for op in &p.ops {
        ops.push(match *op {
            Op::And(a, b) => Op::And(reloc(a), reloc(b)),
            Op::Xor(a, b) => Op::Xor(reloc(a), reloc(b)),
            Op::Inv(a) => Op::Inv(reloc(a)),
            Op::Zero(a) => Op::Zero(reloc(a)),
        });
    }
    p.outs.iter().map(|&o| reloc(o)).collect()
}

/// `f = f0 ^ (x_v & (f0 ^ f1))` with both cofactor terms synthesized jointly.
fn synth_shannon(table: TruthTable, v: usize) -> Option<Prog> {
    let n = table.inputs as usize;
    let rest: Vec<usize> = (0..n).filter(|&k| k != v).collect();
    let spread = |r: u32, xv: u32| -> u32 {
        let mut x = xv << v;
        for (k, &i) in rest.iter().enumerate() {
            x |= (r >> k & 1) << i;
        }
        x
    };
    let f0 = |r: u32| table.output(0, spread(r, 0));
    let f1 = |r: u32| table.output(0, spread(r, 1));
    let sub = TruthTable::from_fn((n - 1) as u8, 2, |r| f0(r) as u32 | ((f0(r) ^ f1(r)) as u32) << 1);
    if sub.column(1) == 0 {
        return None;
    }
    let inner = synth(sub);
    let mut ops = Vec::new();
    let outs = append(&mut ops, n - 1, n, &inner, &|x| rest[x as usize] as u16);
    let node = |ops: &Vec<Op>| (n + ops.len() - 1) as u16;
    ops.push(Op::And(v as u16, outs[1]));
    let mut out = node(&ops);
    if sub.column(0) != 0 {
        ops.push(Op::Xor(outs[0], out));
        out = node(&ops);
    }
    Some(Prog { ops, outs: vec![out] })
}

/// Each output on its own, concatenated.
fn synth_split(table: TruthTable) -> Prog {
    let n = table.inputs as usize;
    let mut ops = Vec::new();
    let mut outs = Vec::new();
    for j in 0..table.outputs {
        let t = TruthTable::from_fn(table.inputs, 1, |r| table.output(j, r) as u32);
        let p = synth(t);
        outs.extend(append(&mut ops, n, n, &p, &|x| x));
    }
    Prog { ops, outs }
}

/// Cheapest program among fixed-polarity forms over every invertible
/// XOR-linear change of the input variables, Shannon splits and per-output
/// synthesis.
pub(crate) fn synth(table: TruthTable) -> Prog {
    let n = table.inputs as u32;
    let mut best = fprm(table);
    if n < 2 {
        return best;
    }
    if table.outputs == 1 {
        for v in 0..n as usize {
            if let Some(p) = synth_shannon(table, v) {
                if p.ops.len() < best.ops.len() {
                    best = p;
                }
            }
        }
    } else {
        let p = synth_split(table);
        if p.ops.len() < best.ops.len() {
            best = p;
        }
    }
    let masks: Vec<u32> = (1..1u32 << n).collect();
    let mut rows = vec![0u32; n as usize];
    let mut try_rows = |rows: &[u32]| {
        if rows.iter().all(|r| r.count_ones() == 1) {
            return;
        }
        if let Some(p) = synth_linear(table, rows) {
            if p.ops.len() < best.ops.len() {
                best = p;
            }
        }
    };
    for &a in &masks {
        rows[0] = a;
        for &b in &masks {
            rows[1] = b;
            if n == 2 {
                try_rows(&rows);
                continue;
            }
            for &c in &masks {
                rows[2] = c;
                try_rows(&rows);
            }
        }
    }
    best
}

fn global() -> &'static Mutex<HashMap<TruthTable, Arc<Prog>>> {
    static CACHE: OnceLock<Mutex<HashMap<TruthTable, Arc<Prog>>>> = OnceLock::new();
    CACHE.get_or_init(Default::default)
}

/// Synthesized programs, looked up locally first and then in a process-wide cache.
#[derive(Debug, Default)]
pub(crate) struct CostMemo {
    map: HashMap<TruthTable, Arc<Prog>>,
}

impl CostMemo {
    pub(crate) fn prog(&mut self, t: TruthTable) -> Arc<Prog> {
        if let Some(p) = self.map.get(&t) {
            return p.clone();
        }
        let cached = global().lock().expect("synthesis cache").get(&t).cloned();
        let p = cached.unwrap_or_else(|| {
            let p = Arc::new(synth(t));
            global().lock().expect("synthesis cache").insert(t, p.clone());
            p
        });
        self.map.insert(t, p.clone());
        p
    }

    pub(crate) fn cost(&mut self, t: TruthTable) -> u32 {
        self.prog(t).ops.len() as u32
    }
}

/// Number of AND/XOR/INV gates the lowering emits for one bool gate.
pub fn lowered_bool_cost(table: TruthTable) -> u32 {
    CostMemo::default().cost(table)
}

/// Expands every gate into AND/XOR/INV gates. The result computes the same
/// function and its gate count equals `circuit.stats().lowered_estimate`.
pub fn lower(c: &Circuit) -> Circuit {
    let mut b = Builder::new();
    let mut map = vec![u32::MAX; c.wire_count as usize];
    for ib in &c.inputs {
        let nb = b.input(ib.width());
        for (o, n) in ib.wires().iter().zip(nb.wires()) {
            map[o.index()] = n.0;
        }
    }
    let anchor = c.inputs.iter().find_map(|ib| ib.wires().first()).map(|w| map[w.index()]);
    let mut memo = CostMemo::default();
    let g1 = |b: &mut Builder, t: TruthTable, ins: &[u32]| -> u32 {
        let ws: Vec<WireId> = ins.iter().map(|&w| WireId(w)).collect();
        b.bool_gate(t, &ws)[0].0
    };
    let zero_from = |b: &mut Builder, src: Option<u32>| -> u32 {
        match src {
            Some(w) => g1(b, TruthTable::XOR, &[w, w]),
            None => b.constant(false).0,
        }
    };
    for g in &c.gates {
        match *g {
            RawGate::Const { out, value } => {
                let z = zero_from(&mut b, anchor);
                map[out as usize] = if value { g1(&mut b, TruthTable::INV, &[z]) } else { z };
            }
            RawGate::Bool { table, ins, out } => {
                let prog = memo.prog(table);
                let mut nodes: Vec<u32> = ins[..table.inputs as usize]
                    .iter()
                    .map(|&w| map[w as usize])
                    .collect();
                for op in &prog.ops {
                    let id = match *op {
                        Op::And(x, y) => {
                            g1(&mut b, TruthTable::AND, &[nodes[x as usize], nodes[y as usize]])
                        }
                        Op::Xor(x, y) => {
                            g1(&mut b, TruthTable::XOR, &[nodes[x as usize], nodes[y as usize]])
                        }
                        Op::Inv(x) => g1(&mut b, TruthTable::INV, &[nodes[x as usize]]),
                        Op::Zero(src) => {
                            let s = if src == u16::MAX { anchor } else { Some(nodes[src as usize]) };
                            zero_from(&mut b, s)
                        }
                    };
                    nodes.push(id);
                }
                for (j, &o) in prog.outs.iter().enumerate() {
                    map[out as usize + j] = nodes[o as usize];
                }
            }
            RawGate::Sel { c: ctl, a, b: bb, out, .. } => {
                let m = map[ctl as usize];
                let xs: Vec<u32> = c.span_wires(a).collect();
                let ys: Vec<u32> = c.span_wires(bb).collect();
                for (k, (x, y)) in xs.into_iter().zip(ys).enumerate() {
                    let (x, y) = (map[x as usize], map[y as usize]);
                    let t = g1(&mut b, TruthTable::XOR, &[x, y]);
                    let u = g1(&mut b, TruthTable::AND, &[m, t]);
                    map[out as usize + k] = g1(&mut b, TruthTable::XOR, &[x, u]);
                }
            }
            RawGate::Rsel {
                c: ctl,
                input,
                out,
                width,
            } => {
                let m = map[ctl as usize];
                let nm = g1(&mut b, TruthTable::INV, &[m]);
                let xs: Vec<u32> = c.span_wires(input).collect();
                for (k, x) in xs.into_iter().enumerate() {
                    let x = map[x as usize];
                    map[out as usize + k] = g1(&mut b, TruthTable::AND, &[nm, x]);
                    map[(out + width) as usize + k] = g1(&mut b, TruthTable::AND, &[m, x]);
                }
            }
        }
    }
    for (k, v) in &c.metadata {
        b.set_meta(k.clone(), v);
    }
    b.set_meta("lowered", "true");
    let outputs = c
        .outputs
        .iter()
        .map(|o| o.wires().iter().map(|w| WireId(map[w.index()])).collect::<Vec<_>>().into())
        .collect();
    b.finish(outputs).expect("lowering a sealed circuit cannot fail")
}
