use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use super::WireId;

/// A debug assertion over wire values. Probes add no gates; they are
/// checked by [`super::Circuit::eval_debug`].
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Probe {
    pub label: String,
    pub kind: ProbeKind,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum ProbeKind {
    /// Every listed wire must be 0.
    AllZero { wires: Vec<WireId> },
    /// Each group may hold at most `cap` ones.
    GroupCap { groups: Vec<Vec<WireId>>, cap: u32 },
    /// Big-endian number must not exceed `cap`.
    NumAtMost { bits: Vec<WireId>, cap: u64 },
    /// Among colored positions, as many have color 1 as color 0.
    Balanced {
        colored: Vec<WireId>,
        color: Vec<WireId>,
    },
    /// At most `cap` distinct keys among entries whose valid bit is set.
    DistinctAtMost {
        keys: Vec<Vec<WireId>>,
        valid: Vec<WireId>,
        cap: u32,
    },
    /// `psum[v]` equals the number of `values` that are at most `v`.
    PrefixCounts {
        values: Vec<Vec<WireId>>,
        psum: Vec<Vec<WireId>>,
    },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProbeViolation {
    pub label: String,
    pub lane: u32,
    pub detail: String,
}

fn num(v: &[u64], bits: &[WireId], lane: u32) -> u64 {
    bits.iter()
        .fold(0, |acc, w| acc << 1 | (v[w.index()] >> lane & 1))
}

fn bit(v: &[u64], w: WireId, lane: u32) -> bool {
    v[w.index()] >> lane & 1 == 1
}

impl Probe {
    pub fn new(label: impl Into<String>, kind: ProbeKind) -> Self {
        Probe {
            label: label.into(),
            kind,
        }
    }

    pub(crate) fn check(&self, v: &[u64], lanes: u32, out: &mut Vec<ProbeViolation>) {
        for lane in 0..lanes {
            if let Some(detail) = self.check_lane(v, lane) {
                out.push(ProbeViolation {
                    label: self.label.clone(),
                    lane,
                    detail,
                });
            }
        }
    }

    fn check_lane(&self, v: &[u64], lane: u32) -> Option<String> {
        match &self.kind {
            ProbeKind::AllZero { wires } => {
                let ones = wires.iter().filter(|&&w| bit(v, w, lane)).count();
                (ones > 0).then(|| format!("{ones} of {} flags set", wires.len()))
            }
            ProbeKind::GroupCap { groups, cap } => groups.iter().enumerate().find_map(|(g, ws)| {
                let c = ws.iter().filter(|&&w| bit(v, w, lane)).count() as u32;
                (c > *cap).then(|| format!("group {g} holds {c} > {cap}"))
            }),
            ProbeKind::NumAtMost { bits, cap } => {
                let x = num(v, bits, lane);
                (x > *cap).then(|| format!("value {x} > {cap}"))
            }
            ProbeKind::Balanced { colored, color } => {
                let (mut ones, mut zeros) = (0usize, 0usize);
                for (&c, &k) in colored.iter().zip(color) {
                    if bit(v, c, lane) {
                        if bit(v, k, lane) {
                            ones += 1
                        } else {
                            zeros += 1
                        }
                    }
                }
                (ones != zeros).then(|| format!("{ones} of one color vs {zeros} of the other"))
            }
            ProbeKind::DistinctAtMost { keys, valid, cap } => {
                let set: BTreeSet<u64> = keys
                    .iter()
                    .zip(valid)
                    .filter(|(_, &ok)| bit(v, ok, lane))
                    .map(|(k, _)| num(v, k, lane))
                    .collect();
                (set.len() as u32 > *cap).then(|| format!("{} distinct keys > {cap}", set.len()))
            }
            ProbeKind::PrefixCounts { values, psum } => {
                let vals: Vec<u64> = values.iter().map(|b| num(v, b, lane)).collect();
                psum.iter().enumerate().find_map(|(x, p)| {
                    let want = vals.iter().filter(|&&y| y <= x as u64).count() as u64;
                    let got = num(v, p, lane);
                    (got != want).then(|| format!("psum[{x}] = {got}, scan gives {want}"))
                })
            }
        }
    }
}

impl Probe {
    /// Rewrites every referenced wire through `f`.
    pub fn remap(&mut self, f: &dyn Fn(WireId) -> Option<WireId>) -> Option<()> {
        let m = |ws: &mut Vec<WireId>| -> Option<()> {
            for w in ws.iter_mut() {
                *w = f(*w)?;
            }
            Some(())
        };
        match &mut self.kind {
            ProbeKind::AllZero { wires } => m(wires),
            ProbeKind::GroupCap { groups, .. } => groups.iter_mut().try_for_each(m),
            ProbeKind::NumAtMost { bits, .. } => m(bits),
            ProbeKind::Balanced { colored, color } => {
                m(colored)?;
                m(color)
            }
            ProbeKind::DistinctAtMost { keys, valid, .. } => {
                keys.iter_mut().try_for_each(m)?;
                m(valid)
            }
            ProbeKind::PrefixCounts { values, psum } => {
                values.iter_mut().try_for_each(m)?;
                psum.iter_mut().try_for_each(m)
            }
        }
    }
}
