use serde::{Deserialize, Serialize};

use crate::ctx::Eps;
use crate::error::{Error, Result};

/// `log2` applied `k` times. Values drop below zero only when the input
/// already is below one; callers stop well before that.
pub fn iter_log(n: f64, k: u32) -> f64 {
    let mut x = n;
    for _ in 0..k {
        if x <= 1.0 {
            return 0.0;
        }
        x = x.log2();
    }
    x
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Role {
    #[serde(rename = "LC")]
    Lc,
    #[serde(rename = "TC")]
    Tc,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Level {
    pub role: Role,
    /// Index `i` of `LC_i` or `TC_i`.
    pub index: u32,
    /// Chunk length of a loose level; for tight levels the metadata length
    /// term of its size bound.
    pub f: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BootstrapPlan {
    pub n: usize,
    pub w: usize,
    pub depth: u32,
    pub levels: Vec<Level>,
    pub eps: Eps,
}

/// Chunk length of `LC_i` (`i >= 1`) on an array of length `n`.
pub fn chunk_len(n: usize, i: u32) -> usize {
    let f = iter_log(n as f64, 1 << (i - 1)).ceil() as usize;
    let top = (n.max(2) as f64).log2().ceil() as usize;
    f.clamp(2, top.max(2))
}

/// Recursion depth: the smallest `d >= 1` with `log^(2^(d-1)) n <= w`.
pub fn depth(n: usize, w: usize) -> u32 {
    let mut d = 1;
    while iter_log(n as f64, 1 << (d - 1)) > w as f64 + 1e-9 {
        d += 1;
    }
    d
}

pub fn plan(n: usize, w: usize, eps: &Eps) -> Result<BootstrapPlan> {
    if n < 2 || w < 1 {
        return Err(Error::Param(format!("plan needs n >= 2 and w >= 1 (n={n}, w={w})")));
    }
    eps.validate()?;
    let d = depth(n, w);
    let mut levels = vec![Level {
        role: Role::Lc,
        index: 0,
        f: (n as f64).log2().ceil() as usize,
    }];
    for i in 1..=d {
        let mut f = chunk_len(n, i);
        if i == d {
            f = f.max(w);
        }
        levels.push(Level { role: Role::Tc, index: i, f });
        if i < d {
            levels.push(Level {
                role: Role::Lc,
                index: i,
                f: chunk_len(n, i),
            });
        }
    }
    Ok(BootstrapPlan {
        n,
        w,
        depth: d,
        levels,
        eps: *eps,
    })
}
