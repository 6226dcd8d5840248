//! Circuit families by name: parameter checking, building, and checking a
//! built circuit against the oracles on seeded random inputs.

use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::circuit::{Circuit, ProbeViolation};
use crate::compact::{self, Strategy};
use crate::ctx::Config;
use crate::error::{Error, Result};
use crate::harness::{from_bits, run_many, to_bits};
use crate::keysort::{self, SortParams};
use crate::lc0::{self, LooseCompactParams};
use crate::oracle::{self, Colored, Counterexample, OracleReport};
use crate::selection::{self, SelectParams};
use crate::{swapper, tinyw};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Family {
    Compact,
    CompactTiny,
    Select,
    SelectAll,
    Sort,
    Lc0,
    Swap,
}

impl Family {
    pub const ALL: [Family; 7] = [
        Family::Compact,
        Family::CompactTiny,
        Family::Select,
        Family::SelectAll,
        Family::Sort,
        Family::Lc0,
        Family::Swap,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Family::Compact => "compact",
            Family::CompactTiny => "compact-tiny",
            Family::Select => "select",
            Family::SelectAll => "select-all",
            Family::Sort => "sort",
            Family::Lc0 => "lc0",
            Family::Swap => "swap",
        }
    }

    /// The family recorded in a circuit's metadata.
    fn from_meta(s: &str) -> Option<Family> {
        Some(match s {
            "compact" => Family::Compact,
            "tinyw" => Family::CompactTiny,
            "select" => Family::Select,
            "select_all" => Family::SelectAll,
            "sort" => Family::Sort,
            "lc0" => Family::Lc0,
            "swap" => Family::Swap,
            _ => return None,
        })
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Family::ALL
            .into_iter()
            .find(|f| f.name() == s)
            .ok_or_else(|| Error::Param(format!("unknown family {s:?}")))
    }
}

/// Everything needed to build one circuit.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Request {
    pub family: Family,
    pub n: usize,
    pub w: usize,
    /// Rank, for the selection families.
    pub m: Option<usize>,
    /// Key range, for sorting.
    #[serde(rename = "K")]
    pub k_values: Option<u64>,
    pub strategy: Strategy,
    pub cfg: Config,
}

impl Request {
    pub fn new(family: Family, n: usize, w: usize) -> Self {
        Request {
            family,
            n,
            w,
            m: None,
            k_values: None,
            strategy: Strategy::Ladder,
            cfg: Config::default(),
        }
    }

    fn rank(&self) -> Result<usize> {
        self.m
            .ok_or_else(|| Error::Param(format!("family {} needs --m", self.family)))
    }

    fn keys(&self) -> Result<u64> {
        self.k_values
            .ok_or_else(|| Error::Param(format!("family {} needs --K", self.family)))
    }

    fn select_params(&self) -> Result<SelectParams> {
        let tc = match self.strategy {
            Strategy::Auto => Strategy::Ladder,
            s => s,
        };
        Ok(SelectParams {
            n: self.n,
            w: self.w,
            m: self.rank()?,
            tc,
        })
    }

    fn sort_params(&self) -> Result<SortParams> {
        Ok(SortParams {
            eps: self.cfg.eps,
            ..SortParams::new(self.n, self.w, self.keys()?)
        })
    }

    fn lc0_params(&self) -> LooseCompactParams {
        LooseCompactParams::new(self.n, self.w, self.cfg.degree)
    }

    /// Checks that the family's parameters are present and consistent,
    /// without building anything.
    pub fn validate(&self) -> Result<()> {
        self.cfg.validate()?;
        if self.n == 0 || self.w == 0 {
            return Err(Error::Param(format!("n and w must be positive (n={}, w={})", self.n, self.w)));
        }
        match self.family {
            Family::Compact | Family::Swap => Ok(()),
            Family::CompactTiny => {
                if self.w > tinyw::MAX_W {
                    return Err(Error::Param(format!("compact-tiny supports w <= {}", tinyw::MAX_W)));
                }
                Ok(())
            }
            Family::Select | Family::SelectAll => self.select_params()?.validate(),
            Family::Sort => self.sort_params()?.validate(),
            Family::Lc0 => self.lc0_params().validate(),
        }
    }

    pub fn build(&self) -> Result<Circuit> {
        self.validate()?;
        let cfg = &self.cfg;
        match self.family {
            Family::Compact => compact::build_compact(self.n, self.w, self.strategy, cfg),
            Family::CompactTiny => tinyw::build_tinyw(self.n, self.w, cfg),
            Family::Select => selection::build_select(&self.select_params()?, cfg),
            Family::SelectAll => selection::build_select_all(&self.select_params()?, cfg),
            Family::Sort => keysort::build_sort(&self.sort_params()?, cfg),
            Family::Lc0 => lc0::build_lc0(&self.lc0_params(), cfg),
            Family::Swap => swapper::build_swap(self.n, self.w, cfg),
        }
    }

    /// Recovers the request from a built circuit's metadata.
    pub fn from_circuit(c: &Circuit) -> Result<Request> {
        let get = |k: &str| {
            c.meta(k)
                .ok_or_else(|| Error::Malformed(format!("circuit metadata lacks {k:?}")))
        };
        let num = |k: &str| -> Result<u64> {
            get(k)?
                .parse()
                .map_err(|_| Error::Malformed(format!("metadata {k:?} is not a number")))
        };
        let fam = get("family")?;
        let family = Family::from_meta(fam).ok_or_else(|| Error::Malformed(format!("unknown family {fam:?} in metadata")))?;
        let mut r = Request::new(family, num("n")? as usize, num("w")? as usize);
        if let Some(s) = c.meta("strategy").or(c.meta("tc")) {
            r.strategy = s.parse()?;
        }
        if matches!(family, Family::Select | Family::SelectAll) {
            r.m = Some(num("m")? as usize);
        }
        if family == Family::Sort {
            r.k_values = Some(num("K")?);
        }
        if family == Family::Lc0 {
            r.cfg.degree = num("d")? as usize;
        }
        Ok(r)
    }
}

fn random_flags(rng: &mut ChaCha8Rng, n: usize) -> Vec<bool> {
    match rng.random_range(0..5) {
        0 => vec![rng.random(); n],
        1 => {
            let len = rng.random_range(0..=n);
            let s = rng.random_range(0..=n - len);
            (0..n).map(|i| i >= s && i < s + len).collect()
        }
        2 => (0..n).map(|i| i >= n / 2).collect(),
        _ => {
            let p: f64 = rng.random();
            (0..n).map(|_| rng.random_bool(p)).collect()
        }
    }
}

fn random_values(rng: &mut ChaCha8Rng, n: usize, w: usize) -> Vec<u64> {
    let top = if w >= 64 { u64::MAX } else { (1u64 << w) - 1 };
    match rng.random_range(0..4) {
        // heavy ties
        0 => {
            let a = rng.random_range(0..=top);
            let b = rng.random_range(0..=top);
            (0..n).map(|_| if rng.random() { a } else { b }).collect()
        }
        1 => vec![rng.random_range(0..=top); n],
        _ => (0..n).map(|_| rng.random_range(0..=top)).collect(),
    }
}

fn elem_bundle(f: bool, p: u64, w: usize) -> Vec<bool> {
    let mut v = vec![f];
    v.extend(to_bits(p, w));
    v
}

fn probe_failure(v: &ProbeViolation, input: String) -> Counterexample {
    Counterexample {
        input,
        expected: "no probe violations".into(),
        got: format!("{}: {}", v.label, v.detail),
    }
}

/// Runs `inputs` through `c` and checks each with `judge`; probe
/// violations fail the trial they occur in.
fn judge_all<T>(
    c: &Circuit,
    cases: &[T],
    encode: impl Fn(&T) -> Vec<Vec<bool>>,
    show: impl Fn(&T) -> String,
    judge: impl Fn(&T, &[Vec<bool>]) -> std::result::Result<(), Counterexample>,
) -> Result<OracleReport> {
    let mut rep = OracleReport::default();
    for chunk in cases.chunks(1024) {
        let enc: Vec<Vec<Vec<bool>>> = chunk.iter().map(&encode).collect();
        let (outs, viol) = run_many(c, &enc, true)?;
        let mut bad: Vec<Option<&ProbeViolation>> = vec![None; chunk.len()];
        for v in &viol {
            bad[v.lane as usize].get_or_insert(v);
        }
        for ((case, out), b) in chunk.iter().zip(&outs).zip(bad) {
            rep.record(match b {
                Some(v) => Err(probe_failure(v, show(case))),
                None => judge(case, out),
            });
        }
    }
    Ok(rep)
}

fn expect_widths(c: &Circuit, ins: usize, in_w: usize, outs: usize, out_w: usize) -> Result<()> {
    let iw = c.input_widths();
    let ow = c.output_widths();
    if iw.len() != ins || iw.iter().any(|&x| x != in_w) || ow.len() != outs || ow.iter().any(|&x| x != out_w) {
        return Err(Error::Malformed(format!(
            "expected {ins} inputs of {in_w} bits and {outs} outputs of {out_w} bits"
        )));
    }
    Ok(())
}

/// Checks `c`, built for `req`, on `trials` seeded inputs, plus every flag
/// pattern when a compaction has at most 12 elements.
pub fn verify(c: &Circuit, req: &Request, trials: u64, seed: u64) -> Result<OracleReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (n, w) = (req.n, req.w);
    let mask = if w >= 64 { u64::MAX } else { (1u64 << w) - 1 };
    match req.family {
        Family::Compact | Family::CompactTiny => {
            expect_widths(c, n, 1 + w, n, 1 + w)?;
            let mut cases: Vec<(Vec<bool>, Vec<u64>)> = Vec::new();
            if n <= 12 {
                for pat in 0..1u32 << n {
                    let f = (0..n).map(|i| pat >> i & 1 == 1).collect();
                    cases.push((f, (0..n).map(|_| rng.random::<u64>() & mask).collect()));
                }
            }
            for _ in 0..trials {
                cases.push((random_flags(&mut rng, n), (0..n).map(|_| rng.random::<u64>() & mask).collect()));
            }
            judge_all(
                c,
                &cases,
                |(f, p)| f.iter().zip(p).map(|(&f, &p)| elem_bundle(f, p, w)).collect(),
                |(f, p)| format!("{f:?} {p:?}"),
                |(f, p), out| {
                    let (of, op): (Vec<bool>, Vec<u64>) = out.iter().map(|b| (b[0], from_bits(&b[1..]))).unzip();
                    oracle::check_compact(f, p, &of, &op)
                },
            )
        }
        Family::Select | Family::SelectAll => {
            let m = req.rank()?;
            let all = req.family == Family::SelectAll;
            expect_widths(c, n, w, if all { m } else { 1 }, w)?;
            let cases: Vec<Vec<u64>> = (0..trials).map(|_| random_values(&mut rng, n, w)).collect();
            judge_all(
                c,
                &cases,
                |xs| xs.iter().map(|&x| to_bits(x, w)).collect(),
                |xs| format!("{xs:?} m={m}"),
                |xs, out| {
                    let got: Vec<u64> = out.iter().map(|b| from_bits(b)).collect();
                    if all {
                        return oracle::check_select_all(xs, m, &got);
                    }
                    let want = oracle::oracle_select(xs, m).expect("rank checked");
                    if got[0] == want {
                        Ok(())
                    } else {
                        Err(Counterexample {
                            input: format!("{xs:?} m={m}"),
                            expected: want.to_string(),
                            got: got[0].to_string(),
                        })
                    }
                },
            )
        }
        Family::Sort => {
            let p = req.sort_params()?;
            let (kv, k) = (p.k_values, p.key_bits());
            expect_widths(c, n, k + w, n, k + w)?;
            let cases: Vec<Vec<(u64, u64)>> = (0..trials)
                .map(|t| {
                    let lo = rng.random_range(0..kv);
                    let hi = if t % 4 == 0 { lo } else { rng.random_range(lo..kv) };
                    (0..n)
                        .map(|_| (rng.random_range(lo..=hi), rng.random::<u64>() & mask))
                        .collect()
                })
                .collect();
            judge_all(
                c,
                &cases,
                |xs| {
                    xs.iter()
                        .map(|&(key, p)| {
                            let mut b = to_bits(key, k);
                            b.extend(to_bits(p, w));
                            b
                        })
                        .collect()
                },
                |xs| format!("{xs:?}"),
                |xs, out| {
                    let got: Vec<(u64, u64)> = out.iter().map(|b| (from_bits(&b[..k]), from_bits(&b[k..]))).collect();
                    oracle::oracle_sort_keys(xs, &got)
                },
            )
        }
        Family::Lc0 => {
            let p = req.lc0_params();
            let out_len = lc0::output_len(n, p.d);
            expect_widths(c, n, 1 + w, out_len, 1 + w)?;
            let max = p.max_real() as usize;
            let cases: Vec<(Vec<bool>, Vec<u64>)> = (0..trials)
                .map(|t| {
                    let r = if t % 2 == 0 { max } else { rng.random_range(0..=max) };
                    let mut f = vec![false; n];
                    if t % 5 == 4 {
                        let s = rng.random_range(0..=n - r);
                        f[s..s + r].iter_mut().for_each(|x| *x = true);
                    } else {
                        let mut placed = 0;
                        while placed < r {
                            let i = rng.random_range(0..n);
                            if !f[i] {
                                f[i] = true;
                                placed += 1;
                            }
                        }
                    }
                    (f, (0..n).map(|_| rng.random::<u64>() & mask).collect())
                })
                .collect();
            judge_all(
                c,
                &cases,
                |(f, p)| f.iter().zip(p).map(|(&f, &p)| elem_bundle(f, p, w)).collect(),
                |(f, p)| format!("{f:?} {p:?}"),
                |(f, p), out| {
                    let (of, op): (Vec<bool>, Vec<u64>) = out.iter().map(|b| (b[0], from_bits(&b[1..]))).unzip();
                    oracle::check_loose(f, p, &of, &op, out_len)
                },
            )
        }
        Family::Swap => {
            expect_widths(c, n, 2 + w, n, 2 + w)?;
            if w < 64 && (1u128 << w) < n as u128 {
                return Err(Error::Param(format!("swap checks tag payloads by position; need 2^w >= n (w={w}, n={n})")));
            }
            let cases: Vec<Vec<Colored>> = (0..trials)
                .map(|_| {
                    let k = rng.random_range(0..=n / 2);
                    let mut slots: Vec<usize> = (0..n).collect();
                    for i in (1..n).rev() {
                        slots.swap(i, rng.random_range(0..=i));
                    }
                    let mut v: Vec<Colored> = (0..n)
                        .map(|i| Colored {
                            colored: false,
                            color: rng.random(),
                            payload: i as u64 & mask,
                        })
                        .collect();
                    for (j, &s) in slots[..2 * k].iter().enumerate() {
                        v[s].colored = true;
                        v[s].color = j % 2 == 1;
                    }
                    v
                })
                .collect();
            judge_all(
                c,
                &cases,
                |xs| {
                    xs.iter()
                        .map(|x| {
                            let mut b = vec![x.colored, x.color];
                            b.extend(to_bits(x.payload, w));
                            b
                        })
                        .collect()
                },
                |xs| format!("{xs:?}"),
                |xs, out| {
                    let got: Vec<Colored> = out
                        .iter()
                        .map(|b| Colored {
                            colored: b[0],
                            color: b[1],
                            payload: from_bits(&b[2..]),
                        })
                        .collect();
                    if got.iter().any(|x| x.colored) {
                        return Err(Counterexample {
                            input: format!("{xs:?}"),
                            expected: "no colored element left".into(),
                            got: format!("{got:?}"),
                        });
                    }
                    oracle::oracle_legal_swap(xs, &got)
                },
            )
        }
    }
}
