//! Encoding helpers and batched evaluation.

use crate::circuit::{pack_lanes, unpack_lane, Circuit, ProbeViolation};
use crate::error::Result;

/// `w` bits of `v`, most significant first.
pub fn to_bits(v: u64, w: usize) -> Vec<bool> {
    (0..w).rev().map(|i| i < 64 && v >> i & 1 == 1).collect()
}

pub fn from_bits(bits: &[bool]) -> u64 {
    bits.iter().fold(0, |a, &b| a << 1 | u64::from(b))
}

/// One bundle per element: flag, then payload.
pub fn elem_inputs(flags: &[bool], payloads: &[u64], w: usize) -> Vec<Vec<bool>> {
    flags
        .iter()
        .zip(payloads)
        .map(|(&f, &p)| {
            let mut v = vec![f];
            v.extend(to_bits(p, w));
            v
        })
        .collect()
}

/// Splits element bundles back into flags and payloads.
pub fn elem_outputs(out: &[Vec<bool>]) -> (Vec<bool>, Vec<u64>) {
    out.iter().map(|b| (b[0], from_bits(&b[1..]))).unzip()
}

/// Evaluates many assignments, 64 per pass. With `debug`, probes are
/// checked and violations returned (their lane is the index into `trials`).
pub fn run_many(c: &Circuit, trials: &[Vec<Vec<bool>>], debug: bool) -> Result<(Vec<Vec<Vec<bool>>>, Vec<ProbeViolation>)> {
    let mut outs = Vec::with_capacity(trials.len());
    let mut viol = Vec::new();
    for (k, batch) in trials.chunks(64).enumerate() {
        let packed = pack_lanes(batch);
        let words = if debug {
            let r = c.eval_debug(&packed, batch.len() as u32)?;
            viol.extend(r.violations.into_iter().map(|mut v| {
                v.lane += 64 * k as u32;
                v
            }));
            r.outputs
        } else {
            c.eval_lanes(&packed)?
        };
        for l in 0..batch.len() {
            outs.push(unpack_lane(&words, l as u32));
        }
    }
    Ok((outs, viol))
}
