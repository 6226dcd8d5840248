use std::collections::{BTreeMap, HashMap};

use super::lower::CostMemo;
use super::{Bundle, Circuit, GateStats, Probe, RawGate, Run, Span, TruthTable, WireId};
use crate::error::{Error, Result};

/// Single-owner circuit builder.
///
/// In counting mode gates are tallied but not stored, which keeps very large
/// instances measurable; such a builder cannot be sealed.
#[derive(Debug)]
pub struct Builder {
    record: bool,
    next: u64,
    inputs: Vec<Bundle>,
    gates: Vec<RawGate>,
    runs: Vec<Run>,
    payload: Vec<Run>,
    probes: Vec<Probe>,
    stats: GateStats,
    metadata: BTreeMap<String, String>,
    zero_pool: Vec<WireId>,
    one: Option<WireId>,
    consts: HashMap<u32, bool>,
    memo: CostMemo,
}

impl Default for Builder {
    fn default() -> Self {
        Self::new()
    }
}

pub(crate) fn tally(s: &mut GateStats, g: &RawGate, memo: &mut CostMemo) {
    match *g {
        RawGate::Const { value, .. } => {
            s.constants += 1;
            s.lowered_estimate += if value { 2 } else { 1 };
        }
        RawGate::Bool { table, .. } => {
            s.bool_gates += 1;
            s.lowered_estimate += memo.cost(table) as u64;
        }
        RawGate::Sel { width, .. } => {
            s.selector_gates += 1;
            s.selector_width_sum += width as u64;
            *s.width_histogram.entry(width).or_default() += 1;
            s.lowered_estimate += 3 * width as u64;
        }
        RawGate::Rsel { width, .. } => {
            s.selector_gates += 1;
            s.reverse_selector_gates += 1;
            s.selector_width_sum += width as u64;
            *s.width_histogram.entry(width).or_default() += 1;
            s.lowered_estimate += 2 * width as u64 + 1;
        }
    }
}

impl Builder {
    pub fn new() -> Self {
        Builder {
            record: true,
            next: 0,
            inputs: Vec::new(),
            gates: Vec::new(),
            runs: Vec::new(),
            payload: Vec::new(),
            probes: Vec::new(),
            stats: GateStats::default(),
            metadata: BTreeMap::new(),
            zero_pool: Vec::new(),
            one: None,
            consts: HashMap::new(),
            memo: CostMemo::default(),
        }
    }

    /// A builder that only tallies gates.
    pub fn counting() -> Self {
        let mut b = Self::new();
        b.record = false;
        b
    }

    pub fn is_recording(&self) -> bool {
        self.record
    }

    pub fn stats(&self) -> &GateStats {
        &self.stats
    }

    pub fn wire_count(&self) -> u64 {
        self.next
    }

    pub fn set_meta(&mut self, key: impl Into<String>, value: impl ToString) {
        self.metadata.insert(key.into(), value.to_string());
    }

    pub fn meta(&self, key: &str) -> Option<&str> {
        self.metadata.get(key).map(String::as_str)
    }

    fn alloc(&mut self, n: u32) -> u32 {
        let start = self.next;
        self.next += n as u64;
        assert!(self.next <= u32::MAX as u64, "wire id space exhausted");
        start as u32
    }

    fn check(&self, w: WireId) {
        debug_assert!((w.0 as u64) < self.next, "wire {} not yet produced", w.0);
    }

    fn push(&mut self, g: RawGate) {
        tally(&mut self.stats, &g, &mut self.memo);
        if self.record {
            self.gates.push(g);
        }
    }

    fn span(&mut self, b: &Bundle) -> Span {
        if !self.record {
            return Span { start: 0, runs: 0 };
        }
        let start = self.runs.len() as u32;
        let mut it = b.wires().iter();
        if let Some(&first) = it.next() {
            let mut cur = Run {
                start: first.0,
                len: 1,
            };
            for &w in it {
                if w.0 == cur.start + cur.len {
                    cur.len += 1;
                } else {
                    self.runs.push(cur);
                    cur = Run { start: w.0, len: 1 };
                }
            }
            self.runs.push(cur);
        }
        Span {
            start,
            runs: self.runs.len() as u32 - start,
        }
    }

    /// Declares a new input bundle.
    pub fn input(&mut self, width: usize) -> Bundle {
        let start = self.alloc(width as u32);
        let b = Bundle::range(start, width as u32);
        self.inputs.push(b.clone());
        b
    }

    /// Marks input wires as payload for the indivisibility scan.
    pub fn mark_payload(&mut self, wires: &[WireId]) {
        for &w in wires {
            match self.payload.last_mut() {
                Some(r) if r.start + r.len == w.0 => r.len += 1,
                _ => self.payload.push(Run { start: w.0, len: 1 }),
            }
        }
    }

    /// A fresh constant gate.
    pub fn constant(&mut self, value: bool) -> WireId {
        let out = self.alloc(1);
        self.push(RawGate::Const { out, value });
        self.consts.insert(out, value);
        WireId(out)
    }

    /// Shared constant-0 wire.
    pub fn zero(&mut self) -> WireId {
        self.zeros(1).get(0)
    }

    /// Shared constant-1 wire.
    pub fn one(&mut self) -> WireId {
        match self.one {
            Some(w) => w,
            None => {
                let w = self.constant(true);
                self.one = Some(w);
                w
            }
        }
    }

    pub fn bit(&mut self, v: bool) -> WireId {
        if v {
            self.one()
        } else {
            self.zero()
        }
    }

    /// A bundle of `width` distinct constant-0 wires, shared across callers.
    pub fn zeros(&mut self, width: usize) -> Bundle {
        while self.zero_pool.len() < width {
            let w = self.constant(false);
            self.zero_pool.push(w);
        }
        Bundle(self.zero_pool[..width].to_vec())
    }

    /// Big-endian constant of `width` bits.
    pub fn const_num(&mut self, value: u64, width: usize) -> Vec<WireId> {
        (0..width)
            .map(|i| {
                let bit = value >> (width - 1 - i) & 1 == 1;
                self.bit(bit)
            })
            .collect()
    }

    /// Appends a generalized boolean gate exactly as given.
    pub fn bool_gate(&mut self, table: TruthTable, ins: &[WireId]) -> Vec<WireId> {
        assert_eq!(ins.len(), table.inputs as usize, "truth table arity mismatch");
        let mut arr = [0u32; 3];
        for (k, &w) in ins.iter().enumerate() {
            self.check(w);
            arr[k] = w.0;
        }
        let out = self.alloc(table.outputs as u32);
        self.push(RawGate::Bool {
            table,
            ins: arr,
            out,
        });
        (out..out + table.outputs as u32).map(WireId).collect()
    }

    /// The value of `w` if it is the output of a constant gate.
    pub fn const_value(&self, w: WireId) -> Option<bool> {
        self.consts.get(&w.0).copied()
    }

    /// Builds the function `f` (input row bits to packed output bits) over at
    /// most three wires. Constant inputs are folded in, inputs that do not
    /// matter are dropped, outputs that are constant or equal to an input
    /// wire are returned without a gate, and the rest share one gate.
    pub fn func(&mut self, ins: &[WireId], nout: usize, f: impl Fn(u32) -> u32) -> Vec<WireId> {
        assert!(ins.len() <= 3 && (1..=3).contains(&nout));
        let mut uniq: Vec<WireId> = Vec::with_capacity(3);
        let mut pos = [0usize; 3];
        let mut fixed = 0u32;
        let mut fixed_mask = 0u32;
        for (k, &w) in ins.iter().enumerate() {
            if let Some(v) = self.const_value(w) {
                fixed_mask |= 1 << k;
                fixed |= (v as u32) << k;
                continue;
            }
            pos[k] = match uniq.iter().position(|&u| u == w) {
                Some(p) => p,
                None => {
                    uniq.push(w);
                    uniq.len() - 1
                }
            };
        }
        let expand = |row: u32| -> u32 {
            let mut r = fixed;
            for k in 0..ins.len() {
                if fixed_mask >> k & 1 == 0 {
                    r |= (row >> pos[k] & 1) << k;
                }
            }
            r
        };
        let nu = uniq.len();
        let outs_of = |row: u32| f(expand(row)) & ((1 << nout) - 1);
        // inputs that influence some output
        let mut keep: Vec<usize> = Vec::new();
        for i in 0..nu {
            if (0..1u32 << nu).any(|row| outs_of(row) != outs_of(row ^ (1 << i))) {
                keep.push(i);
            }
        }
        let nk = keep.len();
        let reduced = |row: u32| -> u32 {
            let mut r = 0;
            for (k, &i) in keep.iter().enumerate() {
                r |= (row >> k & 1) << i;
            }
            outs_of(r)
        };
        let column = |j: usize| -> u32 {
            let mut c = 0;
            for row in 0..1u32 << nk {
                c |= (reduced(row) >> j & 1) << row;
            }
            c
        };
        let full = (1u32 << (1 << nk)) - 1;
        let lit = |k: usize| -> u32 {
            let mut c = 0;
            for row in 0..1u32 << nk {
                c |= (row >> k & 1) << row;
            }
            c
        };
        enum Slot {
            Wire(WireId),
            Gate(usize),
        }
        let mut slots = Vec::with_capacity(nout);
        let mut gate_cols: Vec<u32> = Vec::new();
        for j in 0..nout {
            let c = column(j);
            if c == 0 {
                slots.push(Slot::Wire(self.zero()));
            } else if c == full {
                slots.push(Slot::Wire(self.one()));
            } else if let Some(k) = (0..nk).find(|&k| lit(k) == c) {
                slots.push(Slot::Wire(uniq[keep[k]]));
            } else if let Some(g) = gate_cols.iter().position(|&x| x == c) {
                slots.push(Slot::Gate(g));
            } else {
                gate_cols.push(c);
                slots.push(Slot::Gate(gate_cols.len() - 1));
            }
        }
        let gate_outs = if gate_cols.is_empty() {
            Vec::new()
        } else {
            let rows = 1u32 << nk;
            let mut bits = 0u32;
            for (j, c) in gate_cols.iter().enumerate() {
                bits |= c << (j as u32 * rows);
            }
            let table = TruthTable {
                inputs: nk as u8,
                outputs: gate_cols.len() as u8,
                bits,
            };
            let wires: Vec<WireId> = keep.iter().map(|&i| uniq[i]).collect();
            self.bool_gate(table, &wires)
        };
        slots
            .into_iter()
            .map(|s| match s {
                Slot::Wire(w) => w,
                Slot::Gate(g) => gate_outs[g],
            })
            .collect()
    }

    pub fn func1(&mut self, ins: &[WireId], f: impl Fn(u32) -> bool) -> WireId {
        self.func(ins, 1, |r| f(r) as u32)[0]
    }

    pub fn and(&mut self, x: WireId, y: WireId) -> WireId {
        self.func1(&[x, y], |r| r == 3)
    }

    pub fn or(&mut self, x: WireId, y: WireId) -> WireId {
        self.func1(&[x, y], |r| r != 0)
    }

    pub fn xor(&mut self, x: WireId, y: WireId) -> WireId {
        self.func1(&[x, y], |r| r == 1 || r == 2)
    }

    pub fn not(&mut self, x: WireId) -> WireId {
        self.func1(&[x], |r| r == 0)
    }

    /// x AND NOT y
    pub fn and_not(&mut self, x: WireId, y: WireId) -> WireId {
        self.func1(&[x, y], |r| r == 1)
    }

    /// Selector: `out = if c { b } else { a }`.
    pub fn select(&mut self, c: WireId, a: &Bundle, b: &Bundle) -> Bundle {
        assert!(
            a.width() == b.width() && a.width() >= 1,
            "selector widths {} / {}",
            a.width(),
            b.width()
        );
        self.check(c);
        let width = a.width() as u32;
        let sa = self.span(a);
        let sb = self.span(b);
        let out = self.alloc(width);
        self.push(RawGate::Sel {
            c: c.0,
            a: sa,
            b: sb,
            out,
            width,
        });
        Bundle::range(out, width)
    }

    /// Reverse selector: `(input, 0)` if `c` is 0, `(0, input)` otherwise.
    pub fn reverse_select(&mut self, c: WireId, input: &Bundle) -> (Bundle, Bundle) {
        assert!(input.width() >= 1);
        self.check(c);
        let width = input.width() as u32;
        let si = self.span(input);
        let out = self.alloc(2 * width);
        self.push(RawGate::Rsel {
            c: c.0,
            input: si,
            out,
            width,
        });
        (Bundle::range(out, width), Bundle::range(out + width, width))
    }

    pub fn probe(&mut self, p: Probe) {
        if self.record {
            self.probes.push(p);
        }
    }

    /// Seals the circuit with the given output bundles.
    pub fn finish(self, outputs: Vec<Bundle>) -> Result<Circuit> {
        if !self.record {
            return Err(Error::CountingOnly);
        }
        for (j, o) in outputs.iter().enumerate() {
            if let Some(w) = o.wires().iter().find(|w| w.0 as u64 >= self.next) {
                return Err(Error::Malformed(format!(
                    "output bundle {j} references unknown wire {}",
                    w.0
                )));
            }
        }
        Ok(Circuit {
            wire_count: self.next as u32,
            inputs: self.inputs,
            outputs,
            gates: self.gates,
            runs: self.runs,
            payload: self.payload,
            probes: self.probes,
            stats: self.stats,
            metadata: self.metadata,
        })
    }

    /// Consumes the builder, returning only its tallies.
    pub fn into_stats(self) -> GateStats {
        self.stats
    }
}
