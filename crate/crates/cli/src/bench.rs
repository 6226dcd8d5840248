//! Gate-count tables over doubling `n`.

use std::process::ExitCode;

use anyhow::Result;
use compaction_forge::compact;
use compaction_forge::family::{Family, Request};
use compaction_forge::keysort::measure_recurrence;
use compaction_forge::{tinyw, Strategy};
use serde::Serialize;

use crate::BenchArgs;

#[derive(Debug, Serialize)]
struct Row {
    n: usize,
    #[serde(rename = "K", skip_serializing_if = "Option::is_none")]
    k: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    strategy: Option<Strategy>,
    bool: u64,
    selector: u64,
    lowered: u64,
    /// Boolean gates relative to the previous row with the same `K`.
    ratio_to_prev: Option<f64>,
}

fn sizes(lo: usize, hi: usize) -> Vec<usize> {
    let mut v = Vec::new();
    let mut n = lo.max(1);
    while lo <= hi && n <= hi {
        v.push(n);
        n *= 2;
    }
    v
}

fn rows(a: &BenchArgs) -> Result<Vec<Row>> {
    let cfg = a.common.config();
    cfg.validate()?;
    let ns = sizes(a.n_min, a.n_max);
    let mut out = Vec::new();
    match a.family {
        Family::Compact | Family::CompactTiny => {
            for &n in &ns {
                let s = match (a.family, a.strategy) {
                    (Family::CompactTiny, _) => Strategy::Tiny,
                    (_, Strategy::Auto) => compact::resolve(n, a.w, &cfg)?,
                    (_, s) => s,
                };
                let st = compact::count(n, a.w, s, &cfg)?;
                out.push(Row {
                    n,
                    k: None,
                    strategy: Some(s),
                    bool: st.bool_gates,
                    selector: st.selector_gates,
                    lowered: st.lowered_estimate,
                    ratio_to_prev: None,
                });
            }
        }
        Family::Sort => {
            let ks = if a.k.is_empty() { vec![2] } else { a.k.clone() };
            for r in measure_recurrence(&ns, &ks, a.w, &cfg)? {
                out.push(Row {
                    n: r.n,
                    k: Some(r.k_values),
                    strategy: None,
                    bool: r.bool_gates,
                    selector: r.selector_gates,
                    lowered: r.lowered,
                    ratio_to_prev: None,
                });
            }
        }
        fam => {
            for &n in &ns {
                let req = Request {
                    m: matches!(fam, Family::Select | Family::SelectAll).then(|| a.m.unwrap_or(n.div_ceil(2)).min(n)),
                    strategy: a.strategy,
                    cfg: cfg.clone(),
                    ..Request::new(fam, n, a.w)
                };
                let st = req.build()?.stats().clone();
                out.push(Row {
                    n,
                    k: None,
                    strategy: None,
                    bool: st.bool_gates,
                    selector: st.selector_gates,
                    lowered: st.lowered_estimate,
                    ratio_to_prev: None,
                });
            }
        }
    }
    for i in 0..out.len() {
        let prev = (0..i).rev().find(|&j| out[j].k == out[i].k);
        out[i].ratio_to_prev = prev.map(|j| out[i].bool as f64 / out[j].bool as f64);
    }
    Ok(out)
}

pub fn run(a: &BenchArgs) -> Result<ExitCode> {
    if matches!(a.family, Family::CompactTiny) || a.strategy == Strategy::Tiny {
        if let Some(msg) = tinyw::width_warning(a.n_max.max(a.n_min), a.w) {
            eprintln!("warning: {msg}");
        }
    }
    let rows = rows(a)?;
    if a.json {
        println!("{}", serde_json::to_string_pretty(&rows)?);
        return Ok(ExitCode::SUCCESS);
    }
    let sort = a.family == Family::Sort;
    println!("{}", if sort { "n,K,bool,selector,lowered,ratio_to_prev" } else { "n,strategy,bool,selector,lowered,ratio_to_prev" });
    for r in &rows {
        let ratio = r.ratio_to_prev.map(|x| format!("{x:.4}")).unwrap_or_default();
        let second = if sort {
            r.k.map(|k| k.to_string()).unwrap_or_default()
        } else {
            r.strategy.map(|s| s.to_string()).unwrap_or_default()
        };
        println!("{},{second},{},{},{},{ratio}", r.n, r.bool, r.selector, r.lowered);
    }
    Ok(ExitCode::SUCCESS)
}
