//! Bristol Fashion export and import for lowered circuits, plus an
//! interpreter and a format linter that work on the text alone.
//!
//! ```text
//! G W
//! niv s1 .. s_niv
//! nov o1 .. o_nov
//!
//! 2 1 a b c AND
//! 2 1 a b c XOR
//! 1 1 a b INV
//! ```
//! Inputs are wires `0..Σs`, outputs are the last `Σo` wires.

use std::fmt::Write as _;

use super::{Builder, Circuit, RawGate, TruthTable, WireId};
use crate::error::{Error, Result};

fn op_name(t: TruthTable) -> Option<&'static str> {
    if t == TruthTable::AND {
        Some("AND")
    } else if t == TruthTable::XOR {
        Some("XOR")
    } else if t == TruthTable::INV {
        Some("INV")
    } else {
        None
    }
}

/// Writes a lowered circuit. Output bits that are input wires or repeat an
/// earlier output bit are copied through `x XOR 0` so that the outputs can
/// occupy the last wire ids.
pub fn to_string(c: &Circuit) -> Result<String> {
    if !c.is_lowered() {
        return Err(Error::LoweringRequired);
    }
    let n_in: u32 = c.inputs().iter().map(|b| b.width() as u32).sum();
    let out_bits: Vec<WireId> = c.outputs().iter().flat_map(|b| b.wires().iter().copied()).collect();
    let mut produced = vec![false; c.wire_count()];
    for g in &c.gates {
        if let RawGate::Bool { out, .. } = *g {
            produced[out as usize] = true;
        }
    }
    // which output positions a gate output can serve directly
    let mut direct = vec![u32::MAX; c.wire_count()];
    let mut copies: Vec<(usize, WireId)> = Vec::new();
    for (k, &w) in out_bits.iter().enumerate() {
        if produced[w.index()] && direct[w.index()] == u32::MAX {
            direct[w.index()] = k as u32;
        } else {
            copies.push((k, w));
        }
    }
    if !copies.is_empty() && n_in == 0 {
        return Err(Error::Malformed(
            "bristol export of a constant output needs at least one input wire".into(),
        ));
    }
    let extra = if copies.is_empty() { 0 } else { copies.len() as u32 + 1 };
    let g_total = c.gate_count() as u32 + extra;
    let w_total = n_in + g_total;
    let n_out = out_bits.len() as u32;
    let out_base = w_total - n_out;
    let mut map = vec![u32::MAX; c.wire_count()];
    let mut next = 0u32;
    for b in c.inputs() {
        for w in b.wires() {
            map[w.index()] = next;
            next += 1;
        }
    }
    let mut s = String::new();
    let _ = writeln!(s, "{g_total} {w_total}");
    let sizes: Vec<String> = c.inputs().iter().map(|b| b.width().to_string()).collect();
    let _ = writeln!(s, "{}{}{}", c.inputs().len(), if sizes.is_empty() { "" } else { " " }, sizes.join(" "));
    let osz: Vec<String> = c.outputs().iter().map(|b| b.width().to_string()).collect();
    let _ = writeln!(s, "{}{}{}", c.outputs().len(), if osz.is_empty() { "" } else { " " }, osz.join(" "));
    s.push('\n');
    for g in &c.gates {
        let RawGate::Bool { table, ins, out } = *g else {
            unreachable!("checked by is_lowered")
        };
        let id = if direct[out as usize] != u32::MAX {
            out_base + direct[out as usize]
        } else {
            next += 1;
            next - 1
        };
        map[out as usize] = id;
        let name = op_name(table).expect("checked by is_lowered");
        if table.inputs == 2 {
            let _ = writeln!(s, "2 1 {} {} {id} {name}", map[ins[0] as usize], map[ins[1] as usize]);
        } else {
            let _ = writeln!(s, "1 1 {} {id} {name}", map[ins[0] as usize]);
        }
    }
    if !copies.is_empty() {
        let z = next;
        let _ = writeln!(s, "2 1 0 0 {z} XOR");
        for (k, w) in copies {
            let _ = writeln!(s, "2 1 {} {z} {} XOR", map[w.index()], out_base + k as u32);
        }
    }
    Ok(s)
}

struct Header {
    gates: usize,
    wires: usize,
    ins: Vec<usize>,
    outs: Vec<usize>,
}

fn nums(line: &str, lineno: usize) -> Result<Vec<usize>> {
    line.split(' ')
        .map(|t| {
            t.parse::<usize>().map_err(|_| Error::Parse {
                line: lineno,
                msg: format!("expected a number, found `{t}`"),
            })
        })
        .collect()
}

fn header(lines: &[&str]) -> Result<Header> {
    let err = |line: usize, msg: &str| Error::Parse {
        line,
        msg: msg.to_string(),
    };
    if lines.len() < 4 {
        return Err(err(lines.len() + 1, "truncated header"));
    }
    let gw = nums(lines[0], 1)?;
    if gw.len() != 2 {
        return Err(err(1, "expected `G W`"));
    }
    let iv = nums(lines[1], 2)?;
    if iv.is_empty() || iv.len() != iv[0] + 1 {
        return Err(err(2, "input count does not match the listed sizes"));
    }
    let ov = nums(lines[2], 3)?;
    if ov.is_empty() || ov.len() != ov[0] + 1 {
        return Err(err(3, "output count does not match the listed sizes"));
    }
    if !lines[3].is_empty() {
        return Err(err(4, "expected a blank line after the header"));
    }
    Ok(Header {
        gates: gw[0],
        wires: gw[1],
        ins: iv[1..].to_vec(),
        outs: ov[1..].to_vec(),
    })
}

#[derive(Clone, Copy)]
enum Op {
    And(usize, usize, usize),
    Xor(usize, usize, usize),
    Inv(usize, usize),
}

fn gate_line(line: &str, lineno: usize) -> Result<Op> {
    let t: Vec<&str> = line.split(' ').collect();
    let bad = |msg: &str| Error::Parse {
        line: lineno,
        msg: msg.to_string(),
    };
    let n = |s: &str| -> Result<usize> { s.parse().map_err(|_| bad(&format!("bad wire index `{s}`"))) };
    match t.as_slice() {
        ["2", "1", a, b, c, "AND"] => Ok(Op::And(n(a)?, n(b)?, n(c)?)),
        ["2", "1", a, b, c, "XOR"] => Ok(Op::Xor(n(a)?, n(b)?, n(c)?)),
        ["1", "1", a, b, "INV"] => Ok(Op::Inv(n(a)?, n(b)?)),
        _ => Err(bad(&format!("unrecognized gate line `{line}`"))),
    }
}

/// Splits on LF, dropping the terminator after the final line.
fn split_lines(text: &str) -> Vec<&str> {
    let body = text.strip_suffix('\n').unwrap_or(text);
    body.split('\n').collect()
}

/// Imports a Bristol Fashion file as a lowered circuit.
pub fn from_str(text: &str) -> Result<Circuit> {
    let lines = split_lines(text);
    let h = header(&lines)?;
    let mut b = Builder::new();
    let mut map: Vec<Option<WireId>> = vec![None; h.wires];
    let mut next = 0usize;
    for &s in &h.ins {
        let bw = b.input(s);
        for &w in bw.wires() {
            if next >= h.wires {
                return Err(Error::Parse {
                    line: 2,
                    msg: "inputs exceed the wire count".into(),
                });
            }
            map[next] = Some(w);
            next += 1;
        }
    }
    let body = &lines[4..];
    if body.len() != h.gates {
        return Err(Error::Parse {
            line: 1,
            msg: format!("header promises {} gates, file has {}", h.gates, body.len()),
        });
    }
    for (k, line) in body.iter().enumerate() {
        let lineno = k + 5;
        let op = gate_line(line, lineno)?;
        let get = |i: usize| -> Result<WireId> {
            map.get(i).copied().flatten().ok_or_else(|| Error::Parse {
                line: lineno,
                msg: format!("wire {i} used before definition"),
            })
        };
        let (t, ins, o) = match op {
            Op::And(a, x, c) => (TruthTable::AND, vec![get(a)?, get(x)?], c),
            Op::Xor(a, x, c) => (TruthTable::XOR, vec![get(a)?, get(x)?], c),
            Op::Inv(a, c) => (TruthTable::INV, vec![get(a)?], c),
        };
        if o >= h.wires || map[o].is_some() {
            return Err(Error::Parse {
                line: lineno,
                msg: format!("output wire {o} out of range or reassigned"),
            });
        }
        map[o] = Some(b.bool_gate(t, &ins)[0]);
    }
    let total_out: usize = h.outs.iter().sum();
    if total_out > h.wires {
        return Err(Error::Parse {
            line: 3,
            msg: "outputs exceed the wire count".into(),
        });
    }
    let mut id = h.wires - total_out;
    let mut outputs = Vec::new();
    for &s in &h.outs {
        let mut ws = Vec::with_capacity(s);
        for _ in 0..s {
            ws.push(map[id].ok_or_else(|| Error::Parse {
                line: 3,
                msg: format!("output wire {id} is never assigned"),
            })?);
            id += 1;
        }
        outputs.push(ws.into());
    }
    b.finish(outputs)
}

/// Checks the textual format strictly: LF endings, no trailing whitespace,
/// header consistency, single assignment, definition before use, and that
/// the last `Σo` wires are all assigned. Returns every problem found.
pub fn lint(text: &str) -> Vec<String> {
    let mut problems = Vec::new();
    if text.contains('\r') {
        problems.push("carriage return found; LF line endings required".to_string());
    }
    if !text.ends_with('\n') {
        problems.push("file does not end with LF".to_string());
    }
    let lines = split_lines(text);
    for (i, l) in lines.iter().enumerate() {
        if l.ends_with(' ') || l.ends_with('\t') || l.starts_with(' ') {
            problems.push(format!("line {}: stray whitespace", i + 1));
        }
        if l.contains("  ") {
            problems.push(format!("line {}: repeated separator", i + 1));
        }
    }
    let h = match header(&lines) {
        Ok(h) => h,
        Err(e) => {
            problems.push(e.to_string());
            return problems;
        }
    };
    let n_in: usize = h.ins.iter().sum();
    let n_out: usize = h.outs.iter().sum();
    let body = &lines[4..];
    if body.len() != h.gates {
        problems.push(format!("header says {} gates, found {}", h.gates, body.len()));
    }
    if h.wires != n_in + h.gates {
        problems.push(format!(
            "wire count {} != inputs {} + gates {}",
            h.wires, n_in, h.gates
        ));
    }
    let mut set = vec![false; h.wires.max(n_in)];
    for s in set.iter_mut().take(n_in) {
        *s = true;
    }
    for (k, line) in body.iter().enumerate() {
        let lineno = k + 5;
        match gate_line(line, lineno) {
            Err(e) => problems.push(e.to_string()),
            Ok(op) => {
                let (ins, o): (Vec<usize>, usize) = match op {
                    Op::And(a, b, c) | Op::Xor(a, b, c) => (vec![a, b], c),
                    Op::Inv(a, c) => (vec![a], c),
                };
                for i in ins {
                    if i >= set.len() || !set[i] {
                        problems.push(format!("line {lineno}: wire {i} read before assignment"));
                    }
                }
                if o >= set.len() {
                    problems.push(format!("line {lineno}: wire {o} beyond wire count"));
                } else if std::mem::replace(&mut set[o], true) {
                    problems.push(format!("line {lineno}: wire {o} assigned twice"));
                }
            }
        }
    }
    if n_out <= set.len() {
        for (i, s) in set.iter().enumerate().skip(set.len() - n_out) {
            if !s {
                problems.push(format!("output wire {i} never assigned"));
            }
        }
    } else {
        problems.push("more outputs than wires".to_string());
    }
    problems
}

/// Evaluates Bristol text directly on one assignment of input bits (one
/// vector per declared input).
pub fn interpret(text: &str, inputs: &[Vec<bool>]) -> Result<Vec<Vec<bool>>> {
    let lines = split_lines(text);
    let h = header(&lines)?;
    if inputs.len() != h.ins.len() {
        return Err(Error::InputCount {
            expected: h.ins.len(),
            got: inputs.len(),
        });
    }
    let mut v: Vec<Option<bool>> = vec![None; h.wires];
    let mut id = 0;
    for (index, (bits, &s)) in inputs.iter().zip(&h.ins).enumerate() {
        if bits.len() != s {
            return Err(Error::WidthMismatch {
                index,
                expected: s,
                got: bits.len(),
            });
        }
        for &x in bits {
            v[id] = Some(x);
            id += 1;
        }
    }
    for (k, line) in lines[4..].iter().enumerate() {
        let lineno = k + 5;
        let op = gate_line(line, lineno)?;
        let rd = |i: usize| -> Result<bool> {
            v.get(i).copied().flatten().ok_or_else(|| Error::Parse {
                line: lineno,
                msg: format!("wire {i} has no value"),
            })
        };
        let (o, val) = match op {
            Op::And(a, b, c) => (c, rd(a)? & rd(b)?),
            Op::Xor(a, b, c) => (c, rd(a)? ^ rd(b)?),
            Op::Inv(a, c) => (c, !rd(a)?),
        };
        if o >= v.len() {
            return Err(Error::Parse {
                line: lineno,
                msg: format!("wire {o} beyond wire count"),
            });
        }
        v[o] = Some(val);
    }
    let n_out: usize = h.outs.iter().sum();
    let mut id = h.wires - n_out;
    let mut out = Vec::new();
    for &s in &h.outs {
        let mut bits = Vec::with_capacity(s);
        for _ in 0..s {
            bits.push(v[id].ok_or_else(|| Error::Parse {
                line: 3,
                msg: format!("output wire {id} has no value"),
            })?);
            id += 1;
        }
        out.push(bits);
    }
    Ok(out)
}
