use super::{Circuit, ProbeViolation, RawGate, TruthTable};
use crate::error::{Error, Result};

/// Outputs of a bit-sliced run together with any probe violations.
#[derive(Clone, Debug)]
pub struct DebugRun {
    pub outputs: Vec<Vec<u64>>,
    pub violations: Vec<ProbeViolation>,
}

#[inline]
fn eval_table(table: TruthTable, x: &[u64; 3], j: u8) -> u64 {
    let col = table.column(j) as u32;
    let n = table.inputs as usize;
    let mut level = [0u64; 8];
    for (r, slot) in level.iter_mut().enumerate().take(1 << n) {
        *slot = if col >> r & 1 == 1 { !0 } else { 0 };
    }
    let mut len = 1usize << n;
    for xi in x.iter().take(n) {
        len /= 2;
        for k in 0..len {
            level[k] = (level[2 * k] & !xi) | (level[2 * k + 1] & xi);
        }
    }
    level[0]
}

impl Circuit {
    fn check_inputs<T>(&self, inputs: &[Vec<T>]) -> Result<()> {
        if inputs.len() != self.inputs.len() {
            return Err(Error::InputCount {
                expected: self.inputs.len(),
                got: inputs.len(),
            });
        }
        for (index, (b, v)) in self.inputs.iter().zip(inputs).enumerate() {
            if b.width() != v.len() {
                return Err(Error::WidthMismatch {
                    index,
                    expected: b.width(),
                    got: v.len(),
                });
            }
        }
        Ok(())
    }

    fn run(&self, inputs: &[Vec<u64>]) -> Result<Vec<u64>> {
        self.check_inputs(inputs)?;
        let mut v = vec![0u64; self.wire_count as usize];
        for (b, vals) in self.inputs.iter().zip(inputs) {
            for (w, &x) in b.wires().iter().zip(vals) {
                v[w.index()] = x;
            }
        }
        for g in &self.gates {
            match *g {
                RawGate::Const { out, value } => v[out as usize] = if value { !0 } else { 0 },
                RawGate::Bool { table, ins, out } => {
                    let mut x = [0u64; 3];
                    for k in 0..table.inputs as usize {
                        x[k] = v[ins[k] as usize];
                    }
                    for j in 0..table.outputs {
                        v[out as usize + j as usize] = eval_table(table, &x, j);
                    }
                }
                RawGate::Sel { c, a, b, out, .. } => {
                    let m = v[c as usize];
                    let mut o = out as usize;
                    for (x, y) in self.span_wires(a).zip(self.span_wires(b)) {
                        v[o] = (v[x as usize] & !m) | (v[y as usize] & m);
                        o += 1;
                    }
                }
                RawGate::Rsel {
                    c,
                    input,
                    out,
                    width,
                } => {
                    let m = v[c as usize];
                    let mut o = out as usize;
                    for x in self.span_wires(input) {
                        let val = v[x as usize];
                        v[o] = val & !m;
                        v[o + width as usize] = val & m;
                        o += 1;
                    }
                }
            }
        }
        Ok(v)
    }

    fn collect(&self, v: &[u64]) -> Vec<Vec<u64>> {
        self.outputs
            .iter()
            .map(|b| b.wires().iter().map(|w| v[w.index()]).collect())
            .collect()
    }

    /// Evaluates 64 independent assignments at once: bit `l` of every word
    /// belongs to lane `l`.
    pub fn eval_lanes(&self, inputs: &[Vec<u64>]) -> Result<Vec<Vec<u64>>> {
        let v = self.run(inputs)?;
        Ok(self.collect(&v))
    }

    /// Evaluates one assignment.
    pub fn eval(&self, inputs: &[Vec<bool>]) -> Result<Vec<Vec<bool>>> {
        let lanes: Vec<Vec<u64>> = inputs
            .iter()
            .map(|b| b.iter().map(|&x| x as u64).collect())
            .collect();
        let out = self.eval_lanes(&lanes)?;
        Ok(unpack_lane(&out, 0))
    }

    /// Bit-sliced evaluation that also checks every probe on the first `lanes` lanes.
    pub fn eval_debug(&self, inputs: &[Vec<u64>], lanes: u32) -> Result<DebugRun> {
        let v = self.run(inputs)?;
        let mut violations = Vec::new();
        for p in &self.probes {
            p.check(&v, lanes, &mut violations);
        }
        Ok(DebugRun {
            outputs: self.collect(&v),
            violations,
        })
    }
}

/// Packs up to 64 assignments (each a list of bundles) into lane words.
pub fn pack_lanes(trials: &[Vec<Vec<bool>>]) -> Vec<Vec<u64>> {
    assert!(!trials.is_empty() && trials.len() <= 64);
    let shape = &trials[0];
    let mut out: Vec<Vec<u64>> = shape.iter().map(|b| vec![0; b.len()]).collect();
    for (l, t) in trials.iter().enumerate() {
        for (ob, tb) in out.iter_mut().zip(t) {
            for (o, &bit) in ob.iter_mut().zip(tb) {
                *o |= (bit as u64) << l;
            }
        }
    }
    out
}

/// Extracts lane `lane` from bit-sliced bundles.
pub fn unpack_lane(words: &[Vec<u64>], lane: u32) -> Vec<Vec<bool>> {
    words
        .iter()
        .map(|b| b.iter().map(|&x| x >> lane & 1 == 1).collect())
        .collect()
}
