//! `opnet-json`: the operational netlist as one JSON document.
//!
//! ```text
//! {"version":1,"inputs":[widths],"outputs":[widths],"gates":[...],
//!  "output_wires":[[ids]], "payload":[ids], "meta":{...}, "probes":[...]}
//! ```
//! Gates are `{"t":"bool","tt":"hex","in":[..],"out":[..]}` (table bits as in
//! [`TruthTable`], arity taken from the id lists),
//! `{"t":"sel","c":id,"a":[..],"b":[..],"o":[..]}`,
//! `{"t":"rsel","c":id,"in":[..],"o0":[..],"o1":[..]}` and
//! `{"t":"const","v":0|1,"o":id}`. Input wires occupy ids `0..Σwidths`.

use std::collections::{BTreeMap, HashMap};
use std::io::Write;

use serde::{Deserialize, Serialize};

use super::{Builder, Bundle, Circuit, Gate, Probe, TruthTable, WireId};
use crate::error::{Error, Result};

#[derive(Serialize, Deserialize)]
#[serde(tag = "t")]
enum JGate {
    #[serde(rename = "bool")]
    Bool {
        tt: String,
        #[serde(rename = "in")]
        ins: Vec<u32>,
        out: Vec<u32>,
    },
    #[serde(rename = "sel")]
    Sel {
        c: u32,
        a: Vec<u32>,
        b: Vec<u32>,
        o: Vec<u32>,
    },
    #[serde(rename = "rsel")]
    Rsel {
        c: u32,
        #[serde(rename = "in")]
        input: Vec<u32>,
        o0: Vec<u32>,
        o1: Vec<u32>,
    },
    #[serde(rename = "const")]
    Const { v: u8, o: u32 },
}

#[derive(Serialize, Deserialize)]
struct JCircuit {
    version: u32,
    inputs: Vec<usize>,
    outputs: Vec<usize>,
    gates: Vec<JGate>,
    output_wires: Vec<Vec<u32>>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    payload: Vec<u32>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    meta: BTreeMap<String, String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    probes: Vec<Probe>,
}

/// Serializes with input wires renumbered to `0..Σwidths` in declaration
/// order and every other wire numbered in gate order.
pub fn to_writer<W: Write>(c: &Circuit, out: W) -> Result<()> {
    let mut map = vec![u32::MAX; c.wire_count()];
    let mut next = 0u32;
    for b in c.inputs() {
        for w in b.wires() {
            map[w.index()] = next;
            next += 1;
        }
    }
    let mut fresh = |w: WireId, map: &mut Vec<u32>| -> u32 {
        map[w.index()] = next;
        next += 1;
        next - 1
    };
    let m = |map: &Vec<u32>, b: &Bundle| -> Vec<u32> { b.wires().iter().map(|w| map[w.index()]).collect() };
    let mut gates = Vec::with_capacity(c.gate_count());
    for g in c.gates() {
        gates.push(match g {
            Gate::Constant { value, out } => JGate::Const {
                v: value as u8,
                o: fresh(out, &mut map),
            },
            Gate::Bool {
                table,
                inputs,
                outputs,
            } => {
                let ins = inputs.iter().map(|w| map[w.index()]).collect();
                let out = outputs.iter().map(|&w| fresh(w, &mut map)).collect();
                JGate::Bool {
                    tt: format!("{:x}", table.bits),
                    ins,
                    out,
                }
            }
            Gate::Selector {
                control,
                a,
                b,
                out,
            } => {
                let (cc, a, b) = (map[control.index()], m(&map, &a), m(&map, &b));
                let o = out.wires().iter().map(|&w| fresh(w, &mut map)).collect();
                JGate::Sel { c: cc, a, b, o }
            }
            Gate::ReverseSelector {
                control,
                input,
                out0,
                out1,
            } => {
                let (cc, input) = (map[control.index()], m(&map, &input));
                let o0 = out0.wires().iter().map(|&w| fresh(w, &mut map)).collect();
                let o1 = out1.wires().iter().map(|&w| fresh(w, &mut map)).collect();
                JGate::Rsel { c: cc, input, o0, o1 }
            }
        });
    }
    let probes = c
        .probes()
        .iter()
        .map(|p| {
            let mut p = p.clone();
            p.remap(&|w| Some(WireId(map[w.index()])));
            p
        })
        .collect();
    let doc = JCircuit {
        version: 1,
        inputs: c.input_widths(),
        outputs: c.output_widths(),
        gates,
        output_wires: c.outputs().iter().map(|b| m(&map, b)).collect(),
        payload: c.payload_wires().iter().map(|w| map[w.index()]).collect(),
        meta: c.metadata().clone(),
        probes,
    };
    serde_json::to_writer(out, &doc).map_err(|e| Error::Malformed(e.to_string()))
}

pub fn to_string(c: &Circuit) -> String {
    let mut v = Vec::new();
    to_writer(c, &mut v).expect("writing to memory");
    String::from_utf8(v).expect("json is utf-8")
}

fn parse_tt(s: &str, inputs: usize, outputs: usize) -> Result<TruthTable> {
    let bits = u32::from_str_radix(s, 16)
        .map_err(|_| Error::Malformed(format!("bad truth table `{s}`")))?;
    if inputs > 3 || outputs > 3 {
        return Err(Error::Malformed("bool gate exceeds fan-in/fan-out 3".into()));
    }
    TruthTable::new(inputs as u8, outputs as u8, bits)
}

pub fn from_str(s: &str) -> Result<Circuit> {
    let doc: JCircuit = serde_json::from_str(s).map_err(|e| Error::Parse {
        line: e.line(),
        msg: e.to_string(),
    })?;
    if doc.version != 1 {
        return Err(Error::Malformed(format!("unsupported version {}", doc.version)));
    }
    let mut b = Builder::new();
    let mut map: HashMap<u32, WireId> = HashMap::new();
    let mut next = 0u32;
    for &w in &doc.inputs {
        let nb = b.input(w);
        for &x in nb.wires() {
            map.insert(next, x);
            next += 1;
        }
    }
    let get = |map: &HashMap<u32, WireId>, i: u32| -> Result<WireId> {
        map.get(&i)
            .copied()
            .ok_or_else(|| Error::Malformed(format!("wire {i} read before definition")))
    };
    let bundle = |map: &HashMap<u32, WireId>, v: &[u32]| -> Result<Bundle> {
        v.iter().map(|&i| get(map, i)).collect::<Result<Vec<_>>>().map(Bundle)
    };
    let define = |map: &mut HashMap<u32, WireId>, old: &[u32], new: &[WireId]| -> Result<()> {
        if old.len() != new.len() {
            return Err(Error::Malformed("gate output arity mismatch".into()));
        }
        for (&o, &n) in old.iter().zip(new) {
            if map.insert(o, n).is_some() {
                return Err(Error::Malformed(format!("wire {o} assigned twice")));
            }
        }
        Ok(())
    };
    for g in &doc.gates {
        match g {
            JGate::Const { v, o } => {
                let w = b.constant(*v != 0);
                define(&mut map, &[*o], &[w])?;
            }
            JGate::Bool { tt, ins, out } => {
                let t = parse_tt(tt, ins.len(), out.len())?;
                let iw = bundle(&map, ins)?;
                let ow = b.bool_gate(t, iw.wires());
                define(&mut map, out, &ow)?;
            }
            JGate::Sel { c, a, b: bb, o } => {
                let (cw, a, bb) = (get(&map, *c)?, bundle(&map, a)?, bundle(&map, bb)?);
                if a.width() != bb.width() || a.width() == 0 {
                    return Err(Error::Malformed("selector width mismatch".into()));
                }
                let ow = b.select(cw, &a, &bb);
                define(&mut map, o, ow.wires())?;
            }
            JGate::Rsel { c, input, o0, o1 } => {
                let (cw, iw) = (get(&map, *c)?, bundle(&map, input)?);
                if iw.width() == 0 {
                    return Err(Error::Malformed("empty reverse selector".into()));
                }
                let (x, y) = b.reverse_select(cw, &iw);
                define(&mut map, o0, x.wires())?;
                define(&mut map, o1, y.wires())?;
            }
        }
    }
    let pw = bundle(&map, &doc.payload)?;
    b.mark_payload(pw.wires());
    for p in doc.probes {
        let mut p = p;
        p.remap(&|w| map.get(&w.0).copied())
            .ok_or_else(|| Error::Malformed(format!("probe `{}` references unknown wire", p.label)))?;
        b.probe(p);
    }
    for (k, v) in doc.meta {
        b.set_meta(k, v);
    }
    if doc.output_wires.len() != doc.outputs.len() {
        return Err(Error::Malformed("output widths and wires disagree".into()));
    }
    let mut outputs = Vec::new();
    for (w, ids) in doc.outputs.iter().zip(&doc.output_wires) {
        if *w != ids.len() {
            return Err(Error::Malformed("output widths and wires disagree".into()));
        }
        outputs.push(bundle(&map, ids)?);
    }
    b.finish(outputs)
}
