use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use compaction_forge::circuit::{bristol, lower, opnet};
use compaction_forge::family::{self, Family, Request};
use compaction_forge::{tinyw, Circuit, GateStats, Strategy};
use serde_json::json;

use crate::{lines, BuildArgs, EvalArgs, Format, VerifyArgs};

/// The size bound of a family with the constant measured on `s`.
pub fn bound(req: &Request, s: &GateStats) -> String {
    let n = req.n as f64;
    let w = req.w as f64;
    let b = s.bool_gates as f64;
    let sel = s.selector_gates as f64;
    let strategy = req.strategy;
    match req.family {
        Family::Compact if strategy == Strategy::Base => {
            format!("O(n^2) selectors: selector = {:.3} n^2", sel / (n * n))
        }
        Family::CompactTiny => tiny_bound(n, w, b),
        Family::Compact if strategy == Strategy::Tiny => tiny_bound(n, w, b),
        Family::Compact | Family::Select | Family::SelectAll => {
            format!("O(n w): bool = {:.2} n w, selector = {:.2} n", b / (n * w), sel / n)
        }
        Family::Sort => {
            let k = req.k_values.unwrap_or(2).max(2);
            let kb = (64 - (k - 1).leading_zeros()) as f64;
            format!("O(n (w + log K) log K): bool = {:.2} n (w + k) k with k = {kb}", b / (n * (w + kb) * kb))
        }
        Family::Lc0 | Family::Swap => {
            format!("O(n log n) bool, O(n) selector: bool = {:.2} n log n, selector = {:.2} n", b / (n * n.log2()), sel / n)
        }
    }
}

fn tiny_bound(n: f64, w: f64, b: f64) -> String {
    format!("O(2^w n): bool = {:.2} 2^w n", b / (w.exp2() * n))
}

fn default_out(req: &Request, ext: &str) -> PathBuf {
    PathBuf::from(format!("{}_n{}_w{}.{ext}", req.family, req.n, req.w))
}

fn write(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).with_context(|| format!("writing {}", path.display()))
}

pub fn build(a: &BuildArgs) -> Result<ExitCode> {
    let mut req = a.shape.request(&a.common);
    req.validate()?;
    if req.family == Family::Compact && req.strategy == Strategy::Auto {
        req.strategy = compaction_forge::compact::resolve(req.n, req.w, &req.cfg)?;
    }
    let tiny = req.family == Family::CompactTiny || (req.family == Family::Compact && req.strategy == Strategy::Tiny);
    if tiny {
        if let Some(msg) = tinyw::width_warning(req.n, req.w) {
            eprintln!("warning: {msg}");
        }
    }
    let c = req.build()?;
    let s = c.stats().clone();
    let json_path = a.out.clone().unwrap_or_else(|| default_out(&req, "json"));
    write(&json_path, &opnet::to_string(&c))?;
    let mut files = vec![json_path.display().to_string()];
    let mut lowered = s.lowered_estimate;
    if a.format == Format::Bristol {
        let low = lower(&c);
        lowered = low.gate_count() as u64;
        let path = json_path.with_extension("bristol");
        write(&path, &bristol::to_string(&low)?)?;
        files.push(path.display().to_string());
    }
    let bound = bound(&req, &s);
    if a.json {
        let doc = json!({
            "files": files,
            "family": req.family,
            "n": req.n,
            "w": req.w,
            "strategy": req.strategy,
            "bool": s.bool_gates,
            "selector": s.selector_gates,
            "selector_width_sum": s.selector_width_sum,
            "lowered": lowered,
            "bound": bound,
        });
        println!("{doc}");
    } else {
        for f in &files {
            println!("wrote {f}");
        }
        println!(
            "bool {} selector {} selector_width_sum {} lowered {}",
            s.bool_gates, s.selector_gates, s.selector_width_sum, lowered
        );
        println!("bound {bound}");
    }
    Ok(ExitCode::SUCCESS)
}

/// Reads opnet JSON, or Bristol text when the file does not start with `{`.
pub fn load(path: &Path) -> Result<Circuit> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let c = if text.trim_start().starts_with('{') {
        opnet::from_str(&text)
    } else {
        bristol::from_str(&text)
    };
    c.with_context(|| format!("loading {}", path.display()))
}

pub fn eval(a: &EvalArgs) -> Result<ExitCode> {
    let c = load(&a.circuit)?;
    let text = fs::read_to_string(&a.input).with_context(|| format!("reading {}", a.input.display()))?;
    let ins = lines::parse(&text).with_context(|| format!("in {}", a.input.display()))?;
    let out = c.eval(&ins)?;
    let s = lines::render(&out);
    match &a.out {
        Some(p) => write(p, &s)?,
        None => std::io::stdout().write_all(s.as_bytes())?,
    }
    Ok(ExitCode::SUCCESS)
}

pub fn verify(a: &VerifyArgs) -> Result<ExitCode> {
    let (c, req) = match (&a.circuit, a.family) {
        (Some(p), _) => {
            let c = load(p)?;
            let mut req = Request::from_circuit(&c)?;
            req.cfg.seed = a.common.seed;
            (c, req)
        }
        (None, Some(f)) => {
            let req = Request {
                m: a.m,
                k_values: a.k,
                strategy: a.strategy,
                cfg: a.common.config(),
                ..Request::new(f, a.n.unwrap_or(0), a.w.unwrap_or(0))
            };
            let c = req.build()?;
            (c, req)
        }
        (None, None) => bail!("give --circuit or --family with --n and --w"),
    };
    let rep = family::verify(&c, &req, a.trials, a.common.seed)?;
    if a.json {
        println!("{}", serde_json::to_string(&rep)?);
    } else {
        println!("{} n={} w={}: {} trials, {} failures", req.family, req.n, req.w, rep.trials, rep.failures);
        if let Some(ce) = &rep.counterexample {
            println!("first counterexample");
            println!("  input    {}", ce.input);
            println!("  expected {}", ce.expected);
            println!("  got      {}", ce.got);
        }
    }
    Ok(if rep.passed() { ExitCode::SUCCESS } else { ExitCode::from(1) })
}
