//! Gate-level circuits in the selector model.
//!
//! A circuit is a straight-line program over single-assignment wires. Gates
//! are generalized boolean gates (truth tables with at most three inputs and
//! three outputs), selectors, reverse selectors and constants.

pub mod bristol;
mod builder;
mod eval;
mod lower;
pub mod opnet;
mod probe;

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use builder::Builder;
pub use eval::{pack_lanes, unpack_lane, DebugRun};
pub use lower::{lower, lowered_bool_cost};
pub use probe::{Probe, ProbeKind, ProbeViolation};

/// Index of a wire, unique within one circuit.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct WireId(pub u32);

impl WireId {
    #[inline]
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

/// An ordered group of wires. Numbers stored in bundles are big-endian.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Bundle(pub Vec<WireId>);

impl Bundle {
    pub fn new(wires: Vec<WireId>) -> Self {
        Bundle(wires)
    }

    /// `len` consecutive wires starting at `start`.
    pub fn range(start: u32, len: u32) -> Self {
        Bundle((start..start + len).map(WireId).collect())
    }

    pub fn width(&self) -> usize {
        self.0.len()
    }

    pub fn wires(&self) -> &[WireId] {
        &self.0
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn get(&self, i: usize) -> WireId {
        self.0[i]
    }

    pub fn slice(&self, r: std::ops::Range<usize>) -> Bundle {
        Bundle(self.0[r].to_vec())
    }

    pub fn concat(parts: &[&Bundle]) -> Bundle {
        Bundle(parts.iter().flat_map(|p| p.0.iter().copied()).collect())
    }

    pub fn has_duplicates(&self) -> bool {
        let mut v = self.0.clone();
        v.sort_unstable();
        v.windows(2).any(|w| w[0] == w[1])
    }
}

impl From<Vec<WireId>> for Bundle {
    fn from(v: Vec<WireId>) -> Self {
        Bundle(v)
    }
}

/// Truth table of a generalized boolean gate.
///
/// Bit `(j << inputs) | row` holds output `j` on input row `row`, where bit
/// `i` of `row` is the value of input `i`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct TruthTable {
    pub inputs: u8,
    pub outputs: u8,
    pub bits: u32,
}

impl TruthTable {
    pub const AND: TruthTable = TruthTable {
        inputs: 2,
        outputs: 1,
        bits: 0b1000,
    };
    pub const XOR: TruthTable = TruthTable {
        inputs: 2,
        outputs: 1,
        bits: 0b0110,
    };
    pub const INV: TruthTable = TruthTable {
        inputs: 1,
        outputs: 1,
        bits: 0b01,
    };

    pub fn new(inputs: u8, outputs: u8, bits: u32) -> Result<Self> {
        if inputs > 3 || outputs == 0 || outputs > 3 {
            return Err(Error::Malformed(format!(
                "bool gate must have fan-in <= 3 and 1..=3 outputs (got {inputs} in, {outputs} out)"
            )));
        }
        let used = (outputs as u32) << inputs;
        if used < 32 && bits >> used != 0 {
            return Err(Error::Malformed(format!(
                "truth table {bits:#x} has bits beyond {used} rows"
            )));
        }
        Ok(TruthTable {
            inputs,
            outputs,
            bits,
        })
    }

    /// Tabulates `f`, which maps an input row to packed output bits.
    pub fn from_fn(inputs: u8, outputs: u8, f: impl Fn(u32) -> u32) -> Self {
        assert!(inputs <= 3 && (1..=3).contains(&outputs));
        let rows = 1u32 << inputs;
        let mut bits = 0;
        for row in 0..rows {
            let o = f(row);
            for j in 0..outputs as u32 {
                if o >> j & 1 == 1 {
                    bits |= 1 << ((j << inputs) | row);
                }
            }
        }
        TruthTable {
            inputs,
            outputs,
            bits,
        }
    }

    pub fn rows(&self) -> u32 {
        1 << self.inputs
    }

    /// The column of output `j` as a `2^inputs`-bit mask.
    pub fn column(&self, j: u8) -> u8 {
        let rows = self.rows();
        ((self.bits >> (j as u32 * rows)) & ((1u32 << rows) - 1)) as u8
    }

    pub fn output(&self, j: u8, row: u32) -> bool {
        self.column(j) >> row & 1 == 1
    }

    pub fn is_lowered_basis(&self) -> bool {
        *self == Self::AND || *self == Self::XOR || *self == Self::INV
    }
}

/// Owned view of one gate.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Gate {
    Constant {
        value: bool,
        out: WireId,
    },
    Bool {
        table: TruthTable,
        inputs: Vec<WireId>,
        outputs: Vec<WireId>,
    },
    Selector {
        control: WireId,
        a: Bundle,
        b: Bundle,
        out: Bundle,
    },
    ReverseSelector {
        control: WireId,
        input: Bundle,
        out0: Bundle,
        out1: Bundle,
    },
}

/// Gate tallies. Reverse selectors are included in `selector_gates` and
/// broken out in `reverse_selector_gates`.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct GateStats {
    pub bool_gates: u64,
    pub selector_gates: u64,
    pub reverse_selector_gates: u64,
    pub selector_width_sum: u64,
    pub constants: u64,
    pub lowered_estimate: u64,
    pub width_histogram: BTreeMap<u32, u64>,
}

impl GateStats {
    pub fn total(&self) -> u64 {
        self.bool_gates + self.selector_gates
    }

    pub fn add(&mut self, other: &GateStats) {
        self.bool_gates += other.bool_gates;
        self.selector_gates += other.selector_gates;
        self.reverse_selector_gates += other.reverse_selector_gates;
        self.selector_width_sum += other.selector_width_sum;
        self.constants += other.constants;
        self.lowered_estimate += other.lowered_estimate;
        for (w, c) in &other.width_histogram {
            *self.width_histogram.entry(*w).or_default() += c;
        }
    }

    /// Component-wise difference `self - earlier` of two snapshots of one builder.
    pub fn since(&self, earlier: &GateStats) -> GateStats {
        let mut h = BTreeMap::new();
        for (w, c) in &self.width_histogram {
            let d = c - earlier.width_histogram.get(w).copied().unwrap_or(0);
            if d > 0 {
                h.insert(*w, d);
            }
        }
        GateStats {
            bool_gates: self.bool_gates - earlier.bool_gates,
            selector_gates: self.selector_gates - earlier.selector_gates,
            reverse_selector_gates: self.reverse_selector_gates - earlier.reverse_selector_gates,
            selector_width_sum: self.selector_width_sum - earlier.selector_width_sum,
            constants: self.constants - earlier.constants,
            lowered_estimate: self.lowered_estimate - earlier.lowered_estimate,
            width_histogram: h,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(crate) struct Run {
    pub start: u32,
    pub len: u32,
}

/// Reference into the run arena: `runs` consecutive entries from `start`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(crate) struct Span {
    pub start: u32,
    pub runs: u32,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(crate) enum RawGate {
    Const {
        out: u32,
        value: bool,
    },
    Bool {
        table: TruthTable,
        ins: [u32; 3],
        out: u32,
    },
    Sel {
        c: u32,
        a: Span,
        b: Span,
        out: u32,
        width: u32,
    },
    /// out0 occupies `out..out+width`, out1 the next `width` wires.
    Rsel {
        c: u32,
        input: Span,
        out: u32,
        width: u32,
    },
}

/// A sealed circuit. Immutable; evaluation allocates its own scratch space.
#[derive(Clone, Debug)]
pub struct Circuit {
    pub(crate) wire_count: u32,
    pub(crate) inputs: Vec<Bundle>,
    pub(crate) outputs: Vec<Bundle>,
    pub(crate) gates: Vec<RawGate>,
    pub(crate) runs: Vec<Run>,
    pub(crate) payload: Vec<Run>,
    pub(crate) probes: Vec<Probe>,
    pub(crate) stats: GateStats,
    pub(crate) metadata: BTreeMap<String, String>,
}

impl Circuit {
    pub fn inputs(&self) -> &[Bundle] {
        &self.inputs
    }

    pub fn outputs(&self) -> &[Bundle] {
        &self.outputs
    }

    pub fn input_widths(&self) -> Vec<usize> {
        self.inputs.iter().map(Bundle::width).collect()
    }

    pub fn output_widths(&self) -> Vec<usize> {
        self.outputs.iter().map(Bundle::width).collect()
    }

    pub fn wire_count(&self) -> usize {
        self.wire_count as usize
    }

    pub fn gate_count(&self) -> usize {
        self.gates.len()
    }

    pub fn stats(&self) -> &GateStats {
        &self.stats
    }

    pub fn metadata(&self) -> &BTreeMap<String, String> {
        &self.metadata
    }

    pub fn meta(&self, key: &str) -> Option<&str> {
        self.metadata.get(key).map(String::as_str)
    }

    pub fn set_meta(&mut self, key: impl Into<String>, value: impl ToString) {
        self.metadata.insert(key.into(), value.to_string());
    }

    pub fn probes(&self) -> &[Probe] {
        &self.probes
    }

    /// Input wires designated as payload (checked by [`Circuit::check_indivisible`]).
    pub fn payload_wires(&self) -> Vec<WireId> {
        self.payload
            .iter()
            .flat_map(|r| (r.start..r.start + r.len).map(WireId))
            .collect()
    }

    pub(crate) fn span_wires(&self, s: Span) -> impl Iterator<Item = u32> + '_ {
        self.runs[s.start as usize..(s.start + s.runs) as usize]
            .iter()
            .flat_map(|r| r.start..r.start + r.len)
    }

    fn span_bundle(&self, s: Span) -> Bundle {
        Bundle(self.span_wires(s).map(WireId).collect())
    }

    pub fn gate(&self, i: usize) -> Gate {
        match self.gates[i] {
            RawGate::Const { out, value } => Gate::Constant {
                value,
                out: WireId(out),
            },
            RawGate::Bool { table, ins, out } => Gate::Bool {
                table,
                inputs: ins[..table.inputs as usize].iter().map(|&w| WireId(w)).collect(),
                outputs: (out..out + table.outputs as u32).map(WireId).collect(),
            },
            RawGate::Sel { c, a, b, out, width } => Gate::Selector {
                control: WireId(c),
                a: self.span_bundle(a),
                b: self.span_bundle(b),
                out: Bundle::range(out, width),
            },
            RawGate::Rsel {
                c,
                input,
                out,
                width,
            } => Gate::ReverseSelector {
                control: WireId(c),
                input: self.span_bundle(input),
                out0: Bundle::range(out, width),
                out1: Bundle::range(out + width, width),
            },
        }
    }

    pub fn gates(&self) -> impl Iterator<Item = Gate> + '_ {
        (0..self.gates.len()).map(|i| self.gate(i))
    }

    /// Recomputes the tallies from the gate list.
    pub fn count(&self) -> GateStats {
        let mut s = GateStats::default();
        let mut memo = lower::CostMemo::default();
        for g in &self.gates {
            builder::tally(&mut s, g, &mut memo);
        }
        s
    }

    /// True when every gate is a two-input AND/XOR or a one-input INV.
    pub fn is_lowered(&self) -> bool {
        self.gates.iter().all(|g| match g {
            RawGate::Bool { table, .. } => table.is_lowered_basis(),
            _ => false,
        })
    }

    /// Asserts that every gate reads only wires produced at a smaller index.
    pub fn check_topological(&self) -> Result<()> {
        let mut defined = vec![false; self.wire_count as usize];
        for b in &self.inputs {
            for w in b.wires() {
                defined[w.index()] = true;
            }
        }
        let def = |defined: &mut Vec<bool>, w: u32, i: usize| -> Result<()> {
            if std::mem::replace(&mut defined[w as usize], true) {
                return Err(Error::Malformed(format!("gate {i} reassigns wire {w}")));
            }
            Ok(())
        };
        for (i, g) in self.gates.iter().enumerate() {
            let reads: Vec<u32> = match *g {
                RawGate::Const { .. } => vec![],
                RawGate::Bool { table, ins, .. } => ins[..table.inputs as usize].to_vec(),
                RawGate::Sel { c, a, b, .. } => std::iter::once(c)
                    .chain(self.span_wires(a))
                    .chain(self.span_wires(b))
                    .collect(),
                RawGate::Rsel { c, input, .. } => {
                    std::iter::once(c).chain(self.span_wires(input)).collect()
                }
            };
            for w in reads {
                if !defined[w as usize] {
                    return Err(Error::Malformed(format!(
                        "gate {i} reads wire {w} before it is produced"
                    )));
                }
            }
            match *g {
                RawGate::Const { out, .. } => def(&mut defined, out, i)?,
                RawGate::Bool { table, out, .. } => {
                    for w in out..out + table.outputs as u32 {
                        def(&mut defined, w, i)?
                    }
                }
                RawGate::Sel { out, width, .. } => {
                    for w in out..out + width {
                        def(&mut defined, w, i)?
                    }
                }
                RawGate::Rsel { out, width, .. } => {
                    for w in out..out + 2 * width {
                        def(&mut defined, w, i)?
                    }
                }
            }
        }
        for (j, b) in self.outputs.iter().enumerate() {
            for w in b.wires() {
                if !defined[w.index()] {
                    return Err(Error::Malformed(format!(
                        "output bundle {j} references undefined wire {}",
                        w.0
                    )));
                }
            }
        }
        Ok(())
    }

    /// Static scan of the indivisible model: payload-derived wires may only
    /// enter selector and reverse-selector gates. Payload taint follows
    /// selector data paths bit by bit. Returns the offending gate index.
    pub fn check_indivisible(&self) -> std::result::Result<(), usize> {
        let mut taint = vec![false; self.wire_count as usize];
        for r in &self.payload {
            for w in r.start..r.start + r.len {
                taint[w as usize] = true;
            }
        }
        for (i, g) in self.gates.iter().enumerate() {
            match *g {
                RawGate::Const { .. } => {}
                RawGate::Bool { table, ins, .. } => {
                    if ins[..table.inputs as usize].iter().any(|&w| taint[w as usize]) {
                        return Err(i);
                    }
                }
                RawGate::Sel { c, a, b, out, .. } => {
                    if taint[c as usize] {
                        return Err(i);
                    }
                    for (k, (x, y)) in self.span_wires(a).zip(self.span_wires(b)).enumerate() {
                        taint[out as usize + k] = taint[x as usize] || taint[y as usize];
                    }
                }
                RawGate::Rsel {
                    c,
                    input,
                    out,
                    width,
                } => {
                    if taint[c as usize] {
                        return Err(i);
                    }
                    for (k, x) in self.span_wires(input).enumerate() {
                        let t = taint[x as usize];
                        taint[out as usize + k] = t;
                        taint[(out + width) as usize + k] = t;
                    }
                }
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests;
