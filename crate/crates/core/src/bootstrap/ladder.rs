use serde::{Deserialize, Serialize};

use super::base::base_tc;
use super::plan::{chunk_len, iter_log, BootstrapPlan, Role};
use crate::circuit::{Circuit, GateStats, Probe, ProbeKind};
use crate::ctx::{Config, Ctx, Eps};
use crate::elem::{self, Elem};
use crate::error::{Error, Result};
use crate::gadgets::{binary_to_unary, count_ones, le_const};
use crate::lc0;
use crate::swapper::{self, Cel};

/// Arrays shorter than this are compacted directly.
pub const BASE_BELOW: usize = 256;

/// Tight compaction from a loose compactor: count, color the misplaced
/// elements by the side they sit on, then swap.
pub fn tc_from_lc(ctx: &mut Ctx, xs: &[Elem], lc: &swapper::LcFn) -> Result<Vec<Elem>> {
    let n = xs.len();
    let f = elem::flags(xs);
    let c = count_ones(&mut ctx.b, &f);
    let u = binary_to_unary(&mut ctx.b, n, &c);
    let cels: Vec<Cel> = xs
        .iter()
        .zip(&u)
        .map(|(x, &ui)| Cel {
            colored: ctx.b.func1(&[ui, x.flag], |r| r == 0 || r == 3),
            color: ui,
            item: x.item.clone(),
        })
        .collect();
    let out = swapper::swap(ctx, &cels, lc)?;
    Ok(out
        .into_iter()
        .zip(&u)
        .map(|(c, &ui)| Elem {
            flag: ctx.b.not(ui),
            item: c.item,
        })
        .collect())
}

/// Loose compaction from a tight compactor over chunks of `f` elements.
/// Dense chunks (more than `floor(e3 f)` reals) move to the front; the first
/// `floor(e4 C)` chunks are kept whole and every later chunk is squeezed to
/// `floor(e3 f)` slots.
pub fn lc_from_tc(ctx: &mut Ctx, xs: &[Elem], f: usize, tc: &swapper::LcFn, squeeze: &swapper::LcFn) -> Result<Vec<Elem>> {
    let n = xs.len();
    if f < 2 || f > n.max(2) {
        return Err(Error::Param(format!("chunk length {f} outside 2..={n}")));
    }
    let eps = ctx.cfg.eps;
    let chunks = n.div_ceil(f);
    let mut xs = xs.to_vec();
    elem::pad(ctx, &mut xs, chunks * f);
    let t = Eps::floor(f, eps.e3);
    let keep = Eps::floor(chunks, eps.e4);
    let w = xs[0].width();
    let mut packed = Vec::with_capacity(chunks);
    for k in 0..chunks {
        let part = &xs[k * f..(k + 1) * f];
        let cnt = count_ones(&mut ctx.b, &elem::flags(part));
        let sparse = le_const(&mut ctx.b, &cnt, t as u64);
        let dense = ctx.b.not(sparse);
        let each: Vec<_> = part.iter().map(|e| ctx.prepend(&[e.flag], &e.item)).collect();
        let refs: Vec<_> = each.iter().collect();
        let item = ctx.concat(&refs);
        packed.push(Elem { flag: dense, item });
    }
    let sorted = tc(ctx, &packed)?;
    if keep < chunks {
        ctx.b.probe(Probe::new(
            "too many dense chunks",
            ProbeKind::AllZero {
                wires: vec![sorted[keep].flag],
            },
        ));
    }
    let mut out = Vec::with_capacity(keep * f + (chunks - keep) * t);
    for (k, ch) in sorted.iter().enumerate() {
        if k >= keep && t == 0 {
            break;
        }
        let parts = ctx.split(&ch.item, &vec![1 + w; f]);
        let mut inner = Vec::with_capacity(f);
        for p in parts {
            let (fl, item) = ctx.detach(&p, 1);
            inner.push(Elem { flag: fl[0], item });
        }
        if k < keep {
            out.extend(inner);
        } else {
            let mut s = squeeze(ctx, &inner)?;
            s.truncate(t);
            out.extend(s);
        }
    }
    Ok(out)
}

/// The compactor family of one plan: `TC_i` and `LC_i` at any length.
#[derive(Clone, Copy, Debug)]
pub struct Ladder {
    pub depth: u32,
}

impl Ladder {
    pub fn tc(&self, ctx: &mut Ctx, xs: &[Elem], i: u32) -> Result<Vec<Elem>> {
        let n = xs.len();
        if n < BASE_BELOW || i == 0 {
            return Ok(base_tc(ctx, xs, n));
        }
        tc_from_lc(ctx, xs, &|c, e| self.lc(c, e, i - 1))
    }

    /// The first `keep` slots of `TC_i`.
    fn tc_prefix(&self, ctx: &mut Ctx, xs: &[Elem], i: u32, keep: usize) -> Result<Vec<Elem>> {
        if xs.len() < BASE_BELOW {
            return Ok(base_tc(ctx, xs, keep));
        }
        let mut v = self.tc(ctx, xs, i)?;
        v.truncate(keep);
        Ok(v)
    }

    pub fn lc(&self, ctx: &mut Ctx, xs: &[Elem], i: u32) -> Result<Vec<Elem>> {
        let n = xs.len();
        if i == 0 || n < BASE_BELOW {
            return lc0::lc0(ctx, xs);
        }
        let f = chunk_len(n, i);
        let t = Eps::floor(f, ctx.cfg.eps.e3);
        lc_from_tc(ctx, xs, f, &|c, e| self.tc(c, e, i), &|c, e| self.tc_prefix(c, e, i, t))
    }
}

/// Measured size of one level at the plan's length.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LedgerRow {
    pub role: Role,
    pub index: u32,
    pub f: usize,
    pub bool_gates: u64,
    pub selector_gates: u64,
    /// Schedule bound with the constant fitted on the base level.
    pub bound: f64,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct SizeLedger {
    pub rows: Vec<LedgerRow>,
}

fn count_level(plan: &BootstrapPlan, cfg: &Config, role: Role, i: u32) -> Result<GateStats> {
    let mut ctx = Ctx::counting(cfg.clone());
    let xs = elem::inputs(&mut ctx, plan.n, plan.w);
    let lad = Ladder { depth: plan.depth };
    match role {
        Role::Lc => lad.lc(&mut ctx, &xs, i)?,
        Role::Tc => lad.tc(&mut ctx, &xs, i)?,
    };
    Ok(ctx.b.into_stats())
}

/// Builds `TC_d` for the plan and measures every level at length `n`.
pub fn build_ladder(plan: &BootstrapPlan, cfg: &Config) -> Result<(Circuit, SizeLedger)> {
    let c = build_tc(plan, cfg)?;
    let ledger = measure(plan, cfg)?;
    Ok((c, ledger))
}

/// Per-level sizes, counted without storing gates.
pub fn measure(plan: &BootstrapPlan, cfg: &Config) -> Result<SizeLedger> {
    let n = plan.n as f64;
    let mut rows = Vec::new();
    let mut c0 = 0.0;
    for lv in &plan.levels {
        let s = count_level(plan, cfg, lv.role, lv.index)?;
        if lv.role == Role::Lc && lv.index == 0 {
            c0 = s.bool_gates as f64 / (n * n.log2().max(1.0));
        }
        let i = lv.index as i32;
        let bound = match lv.role {
            Role::Lc => (2.1f64 * 4.1).powi(i) * c0 * n * iter_log(n, 1 << lv.index),
            Role::Tc => 2.1f64.powi(i - 1) * 4.1f64.powi(i) * c0 * n * lv.f as f64,
        };
        rows.push(LedgerRow {
            role: lv.role,
            index: lv.index,
            f: lv.f,
            bool_gates: s.bool_gates,
            selector_gates: s.selector_gates,
            bound,
        });
    }
    Ok(SizeLedger { rows })
}

/// `TC_d` as a circuit over `n` elements of `1 + w` bits.
pub fn build_tc(plan: &BootstrapPlan, cfg: &Config) -> Result<Circuit> {
    cfg.validate()?;
    let mut cfg = cfg.clone();
    cfg.eps = plan.eps;
    let mut ctx = Ctx::new(cfg);
    let xs = elem::inputs(&mut ctx, plan.n, plan.w);
    let out = Ladder { depth: plan.depth }.tc(&mut ctx, &xs, plan.depth)?;
    ctx.b.set_meta("family", "tc");
    ctx.b.set_meta("n", plan.n);
    ctx.b.set_meta("w", plan.w);
    ctx.b.set_meta("depth", plan.depth);
    ctx.b.set_meta("eps", serde_json::to_string(&plan.eps).expect("eps json"));
    let outs = elem::outputs(&out);
    ctx.finish(outs)
}
