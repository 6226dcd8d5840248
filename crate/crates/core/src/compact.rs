//! Tight compaction by strategy, and the standalone compaction family.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::bootstrap::{base_tc, plan, Ladder, BASE_BELOW};
use crate::circuit::{Circuit, GateStats};
use crate::ctx::{Config, Ctx};
use crate::elem::{self, Elem};
use crate::error::{Error, Result};
use crate::tinyw;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Strategy {
    /// Bootstrapped ladder of loose and tight compactors.
    Ladder,
    /// Per-slot search, quadratic size.
    Base,
    /// Counting sort of extended values, size growing as `2^w n`.
    Tiny,
    /// Whichever of ladder and tiny has fewer boolean gates.
    Auto,
}

impl fmt::Display for Strategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Strategy::Ladder => "ladder",
            Strategy::Base => "base",
            Strategy::Tiny => "tiny",
            Strategy::Auto => "auto",
        })
    }
}

impl FromStr for Strategy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "ladder" => Ok(Strategy::Ladder),
            "base" => Ok(Strategy::Base),
            "tiny" | "tinyw" => Ok(Strategy::Tiny),
            "auto" => Ok(Strategy::Auto),
            _ => Err(Error::Param(format!("unknown strategy {s:?} (ladder, base, tiny, auto)"))),
        }
    }
}

/// Tight compaction of `xs` (distinguished first). `Auto` is resolved per
/// call by counting both candidates.
pub fn tight(ctx: &mut Ctx, xs: &[Elem], s: Strategy) -> Result<Vec<Elem>> {
    let n = xs.len();
    if n == 0 {
        return Ok(Vec::new());
    }
    let w = xs[0].item.width();
    match s {
        Strategy::Base => Ok(base_tc(ctx, xs, n)),
        Strategy::Tiny => tinyw::tinyw_compact(ctx, xs),
        Strategy::Ladder => {
            if n < BASE_BELOW || n < 2 {
                return Ok(base_tc(ctx, xs, n));
            }
            let p = plan(n, w.max(1), &ctx.cfg.eps)?;
            Ladder { depth: p.depth }.tc(ctx, xs, p.depth)
        }
        Strategy::Auto => {
            let pick = resolve(n, w, &ctx.cfg)?;
            tight(ctx, xs, pick)
        }
    }
}

/// Gate counts of compacting `n` elements of `1 + w` bits, without storing
/// gates.
pub fn count(n: usize, w: usize, s: Strategy, cfg: &Config) -> Result<GateStats> {
    let mut ctx = Ctx::counting(cfg.clone());
    let xs = elem::inputs(&mut ctx, n, w);
    tight(&mut ctx, &xs, s)?;
    Ok(ctx.b.into_stats())
}

/// The concrete strategy `Auto` stands for at this size.
pub fn resolve(n: usize, w: usize, cfg: &Config) -> Result<Strategy> {
    if w > tinyw::MAX_W {
        return Ok(Strategy::Ladder);
    }
    let l = count(n, w, Strategy::Ladder, cfg)?;
    let t = count(n, w, Strategy::Tiny, cfg)?;
    Ok(if t.bool_gates < l.bool_gates {
        Strategy::Tiny
    } else {
        Strategy::Ladder
    })
}

/// Tight compaction of `n` elements of `1 + w` bits.
pub fn build_compact(n: usize, w: usize, s: Strategy, cfg: &Config) -> Result<Circuit> {
    cfg.validate()?;
    if n == 0 || w == 0 {
        return Err(Error::Param(format!("compaction needs n >= 1 and w >= 1 (n={n}, w={w})")));
    }
    let s = match s {
        Strategy::Auto => resolve(n, w, cfg)?,
        s => s,
    };
    if s == Strategy::Tiny {
        let mut c = tinyw::build_tinyw(n, w, cfg)?;
        c.set_meta("family", "compact");
        c.set_meta("strategy", s);
        return Ok(c);
    }
    let mut ctx = Ctx::new(cfg.clone());
    let xs = elem::inputs(&mut ctx, n, w);
    let out = tight(&mut ctx, &xs, s)?;
    ctx.b.set_meta("family", "compact");
    ctx.b.set_meta("strategy", s);
    ctx.b.set_meta("n", n);
    ctx.b.set_meta("w", w);
    if s == Strategy::Ladder && n >= BASE_BELOW {
        ctx.b.set_meta("depth", plan(n, w, &cfg.eps)?.depth);
    }
    let outs = elem::outputs(&out);
    ctx.finish(outs)
}
