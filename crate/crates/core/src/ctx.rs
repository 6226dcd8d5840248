use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::circuit::{Builder, Bundle, Circuit, WireId};
use crate::error::{Error, Result};
use crate::route::{Capture, Item, Router};

/// Threshold parameters of the compaction ladder.
///
/// * `e1`: sparsity promised to loose compaction,
/// * `e2`: output length bound of loose compaction, as a fraction of `n`,
/// * `e3`: per-chunk density threshold,
/// * `e4`: fraction of chunks allowed to be dense.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Eps {
    pub e1: f64,
    pub e2: f64,
    pub e3: f64,
    pub e4: f64,
}

impl Default for Eps {
    fn default() -> Self {
        Eps {
            e1: 1.0 / 128.0,
            e2: 0.5,
            e3: 1.0 / 32.0,
            e4: 0.25,
        }
    }
}

impl Eps {
    /// Checks `0 < e_i < 1`, `e3 + e4 <= e2` and `e4 = e1 / e3`.
    pub fn validate(&self) -> Result<()> {
        for (name, v) in [("eps1", self.e1), ("eps2", self.e2), ("eps3", self.e3), ("eps4", self.e4)] {
            if !(v > 0.0 && v < 1.0) {
                return Err(Error::Eps(format!("{name} = {v} must lie in (0, 1)")));
            }
        }
        if self.e3 + self.e4 > self.e2 + 1e-12 {
            return Err(Error::Eps(format!(
                "eps3 + eps4 <= eps2 violated: {} + {} > {}",
                self.e3, self.e4, self.e2
            )));
        }
        if (self.e4 - self.e1 / self.e3).abs() > 1e-9 {
            return Err(Error::Eps(format!(
                "eps4 = eps1 / eps3 violated: {} != {} / {}",
                self.e4, self.e1, self.e3
            )));
        }
        Ok(())
    }

    /// `floor(x * e)` with a guard against rounding just below an integer.
    pub fn floor(x: usize, e: f64) -> usize {
        ((x as f64) * e + 1e-9).floor() as usize
    }
}

/// Build-wide settings.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Config {
    pub eps: Eps,
    /// Expander degree, a power of two and at least 8.
    pub degree: usize,
    /// First seed tried by expander searches.
    pub seed: u64,
}

impl Default for Config {
    fn default() -> Self {
        Config {
            eps: Eps::default(),
            degree: 16,
            seed: 0,
        }
    }
}

impl Config {
    pub fn validate(&self) -> Result<()> {
        self.eps.validate()?;
        if self.degree < 8 || !self.degree.is_power_of_two() {
            return Err(Error::Param(format!(
                "degree {} must be a power of two >= 8",
                self.degree
            )));
        }
        Ok(())
    }
}

/// A builder, its router and the build configuration.
#[derive(Debug)]
pub struct Ctx {
    pub b: Builder,
    pub r: Router,
    pub cfg: Config,
    /// Expanders wired into the circuit, as `kind:m:d:seed`.
    pub expanders: BTreeSet<String>,
}

impl Ctx {
    pub fn new(cfg: Config) -> Self {
        Ctx {
            b: Builder::new(),
            r: Router::default(),
            cfg,
            expanders: BTreeSet::new(),
        }
    }

    pub fn counting(cfg: Config) -> Self {
        Ctx {
            b: Builder::counting(),
            ..Self::new(cfg)
        }
    }

    pub fn leaf(&mut self, b: Bundle) -> Item {
        self.r.leaf(b)
    }

    pub fn zeros_item(&mut self, w: usize) -> Item {
        let z = self.b.zeros(w);
        self.r.leaf(z)
    }

    /// `if c { y } else { x }` on routed items.
    pub fn sel(&mut self, c: WireId, x: &Item, y: &Item) -> Item {
        self.r.sel(&mut self.b, c, x, y)
    }

    pub fn rsel(&mut self, c: WireId, x: &Item) -> (Item, Item) {
        self.r.rsel(&mut self.b, c, x)
    }

    pub fn concat(&mut self, parts: &[&Item]) -> Item {
        self.r.concat(parts)
    }

    pub fn split(&mut self, x: &Item, widths: &[usize]) -> Vec<Item> {
        self.r.split(x, widths)
    }

    /// Prepends single wires (metadata bits) to an item.
    pub fn prepend(&mut self, bits: &[WireId], x: &Item) -> Item {
        let head = self.r.leaf(bits.to_vec().into());
        self.r.concat(&[&head, x])
    }

    /// Splits off the first `k` wires; returns them and the rest as an item.
    pub fn detach(&mut self, x: &Item, k: usize) -> (Vec<WireId>, Item) {
        let mut p = self.r.split(x, &[k, x.width() - k]);
        let rest = p.pop().expect("two parts");
        (p[0].wires().to_vec(), rest)
    }

    pub fn begin(&mut self, sources: &[Item]) -> (usize, Vec<Item>) {
        self.r.begin(sources)
    }

    pub fn end(&mut self, lo: usize) -> Capture {
        self.r.end(lo)
    }

    pub fn reverse(&mut self, cap: Capture, entries: &[Item], sinks: &[Item], seeds: &[Item]) -> Vec<(Item, WireId)> {
        self.r.reverse(&mut self.b, cap, entries, sinks, seeds)
    }

    pub fn finish(mut self, outputs: Vec<Bundle>) -> Result<Circuit> {
        if !self.expanders.is_empty() {
            let list: Vec<&str> = self.expanders.iter().map(String::as_str).collect();
            self.b.set_meta("expanders", list.join(","));
        }
        self.b.finish(outputs)
    }
}
