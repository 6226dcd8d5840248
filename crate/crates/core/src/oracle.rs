//! Reference checks written directly from the problem statements, sharing
//! nothing with the circuit builders.

use std::collections::{BTreeMap, HashMap};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Outcome of a batch of checked trials.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct OracleReport {
    pub trials: u64,
    pub failures: u64,
    pub counterexample: Option<Counterexample>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Counterexample {
    pub input: String,
    pub expected: String,
    pub got: String,
}

impl OracleReport {
    pub fn record(&mut self, verdict: std::result::Result<(), Counterexample>) {
        self.trials += 1;
        if let Err(c) = verdict {
            self.failures += 1;
            if self.counterexample.is_none() {
                self.counterexample = Some(c);
            }
        }
    }

    pub fn merge(&mut self, other: OracleReport) {
        self.trials += other.trials;
        self.failures += other.failures;
        if self.counterexample.is_none() {
            self.counterexample = other.counterexample;
        }
    }

    pub fn passed(&self) -> bool {
        self.failures == 0
    }
}

fn multiset<T: Ord + Clone>(xs: impl IntoIterator<Item = T>) -> BTreeMap<T, usize> {
    let mut m = BTreeMap::new();
    for x in xs {
        *m.entry(x).or_insert(0) += 1;
    }
    m
}

/// Two-pass scan: distinguished payloads in input order, then the rest.
pub fn oracle_compact(flags: &[bool], payloads: &[u64]) -> (Vec<u64>, Vec<u64>) {
    let mut front = Vec::new();
    let mut back = Vec::new();
    for (&f, &p) in flags.iter().zip(payloads) {
        if f {
            front.push(p);
        } else {
            back.push(p);
        }
    }
    (front, back)
}

fn show(flags: &[bool], payloads: &[u64]) -> String {
    flags
        .iter()
        .zip(payloads)
        .map(|(&f, p)| format!("{}:{p}", u8::from(f)))
        .collect::<Vec<_>>()
        .join(" ")
}

/// Tight compaction predicate: the output holds the distinguished
/// payloads (as a multiset, flagged) in its first `c` slots and the rest
/// after, for `c` the number of distinguished inputs.
pub fn check_compact(
    in_flags: &[bool],
    in_payloads: &[u64],
    out_flags: &[bool],
    out_payloads: &[u64],
) -> std::result::Result<(), Counterexample> {
    let (front, back) = oracle_compact(in_flags, in_payloads);
    let c = front.len();
    let fail = || Counterexample {
        input: show(in_flags, in_payloads),
        expected: format!("first {c} distinguished {front:?}, then {back:?}"),
        got: show(out_flags, out_payloads),
    };
    if out_flags.len() != in_flags.len() || out_payloads.len() != in_payloads.len() {
        return Err(fail());
    }
    let flags_ok = out_flags.iter().enumerate().all(|(i, &f)| f == (i < c));
    if !flags_ok
        || multiset(out_payloads[..c].iter().copied()) != multiset(front.iter().copied())
        || multiset(out_payloads[c..].iter().copied()) != multiset(back.iter().copied())
    {
        return Err(fail());
    }
    Ok(())
}

/// Loose compaction predicate: real payload multisets agree and the
/// output has the expected length.
pub fn check_loose(
    in_flags: &[bool],
    in_payloads: &[u64],
    out_flags: &[bool],
    out_payloads: &[u64],
    out_len: usize,
) -> std::result::Result<(), Counterexample> {
    let want = multiset(in_flags.iter().zip(in_payloads).filter(|p| *p.0).map(|p| *p.1));
    let got = multiset(out_flags.iter().zip(out_payloads).filter(|p| *p.0).map(|p| *p.1));
    if out_flags.len() != out_len || want != got {
        return Err(Counterexample {
            input: show(in_flags, in_payloads),
            expected: format!("length {out_len}, reals {want:?}"),
            got: show(out_flags, out_payloads),
        });
    }
    Ok(())
}

/// Value of rank `m` (1-based) by full sort.
pub fn oracle_select(xs: &[u64], m: usize) -> Result<u64> {
    if m == 0 || m > xs.len() {
        return Err(Error::Param(format!("rank {m} outside 1..={}", xs.len())));
    }
    let mut s = xs.to_vec();
    s.sort_unstable();
    Ok(s[m - 1])
}

/// Value of rank `m` by Hoare-style quickselect with a fixed pivot rule.
pub fn quickselect(xs: &[u64], m: usize) -> Result<u64> {
    if m == 0 || m > xs.len() {
        return Err(Error::Param(format!("rank {m} outside 1..={}", xs.len())));
    }
    let mut v = xs.to_vec();
    let mut k = m - 1;
    loop {
        let pivot = v[v.len() / 2];
        let lo: Vec<u64> = v.iter().copied().filter(|&x| x < pivot).collect();
        let eq = v.iter().filter(|&&x| x == pivot).count();
        if k < lo.len() {
            v = lo;
        } else if k < lo.len() + eq {
            return Ok(pivot);
        } else {
            k -= lo.len() + eq;
            v.retain(|&x| x > pivot);
        }
    }
}

/// Select-all predicate: `out` is exactly the multiset of the `m`
/// smallest values.
pub fn check_select_all(xs: &[u64], m: usize, out: &[u64]) -> std::result::Result<(), Counterexample> {
    let mut s = xs.to_vec();
    s.sort_unstable();
    s.truncate(m);
    if multiset(s.iter().copied()) != multiset(out.iter().copied()) {
        return Err(Counterexample {
            input: format!("{xs:?} m={m}"),
            expected: format!("{s:?}"),
            got: format!("{out:?}"),
        });
    }
    Ok(())
}

/// Key-sort predicate over `(key, payload)` pairs.
pub fn oracle_sort_keys(input: &[(u64, u64)], out: &[(u64, u64)]) -> std::result::Result<(), Counterexample> {
    let sorted = out.windows(2).all(|w| w[0].0 <= w[1].0);
    if !sorted || multiset(input.iter().copied()) != multiset(out.iter().copied()) {
        let mut want = input.to_vec();
        want.sort_unstable();
        return Err(Counterexample {
            input: format!("{input:?}"),
            expected: format!("keys non-decreasing, multiset of {want:?}"),
            got: format!("{out:?}"),
        });
    }
    Ok(())
}

/// An element of a swap instance.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Colored {
    pub colored: bool,
    pub color: bool,
    pub payload: u64,
}

/// Legal swap predicate: `out` arises from `input` by exchanging the
/// payloads of disjoint opposite-color colored pairs and uncoloring both.
/// Pairs are matched greedily by payload, which is exact for distinct tags.
pub fn oracle_legal_swap(input: &[Colored], out: &[Colored]) -> std::result::Result<(), Counterexample> {
    let fail = |why: String| Counterexample {
        input: format!("{input:?}"),
        expected: "legal swap".into(),
        got: format!("{why}: {out:?}"),
    };
    if input.len() != out.len() {
        return Err(fail("length differs".into()));
    }
    let same = |a: &Colored, b: &Colored| a.colored == b.colored && (!a.colored || a.color == b.color) && a.payload == b.payload;
    let mut by_payload: HashMap<u64, Vec<usize>> = HashMap::new();
    for (i, x) in input.iter().enumerate() {
        by_payload.entry(x.payload).or_default().push(i);
    }
    let mut partner = vec![usize::MAX; input.len()];
    for i in 0..input.len() {
        if same(&input[i], &out[i]) || partner[i] != usize::MAX {
            continue;
        }
        let (a, o) = (&input[i], &out[i]);
        if !a.colored || o.colored {
            return Err(fail(format!("slot {i} changed without a swap")));
        }
        let cand = by_payload.get(&o.payload).into_iter().flatten().copied().find(|&j| {
            j != i
                && partner[j] == usize::MAX
                && input[j].colored
                && input[j].color != a.color
                && !out[j].colored
                && out[j].payload == a.payload
        });
        match cand {
            Some(j) => {
                partner[i] = j;
                partner[j] = i;
            }
            None => return Err(fail(format!("slot {i} has no opposite-color partner"))),
        }
    }
    Ok(())
}
