//! Shared fixtures for the benches.

use compaction_forge::ctx::Config;
use compaction_forge::harness::{elem_inputs, run_many};
use compaction_forge::{Circuit, Strategy};

/// Sizes benched for the ladder; the expander cache is warm after the first.
pub const LADDER_SIZES: &[usize] = &[256, 1024, 4096];

pub fn compact(n: usize, w: usize, s: Strategy) -> Circuit {
    compaction_forge::compact::build_compact(n, w, s, &Config::default()).expect("valid size")
}

/// 64 flag patterns of alternating density with zero payloads.
pub fn batch(n: usize, w: usize) -> Vec<Vec<Vec<bool>>> {
    (0..64)
        .map(|t| {
            let flags: Vec<bool> = (0..n).map(|i| (i * 7 + t) % (t % 5 + 2) == 0).collect();
            elem_inputs(&flags, &vec![0; n], w)
        })
        .collect()
}

pub fn run(c: &Circuit, batch: &[Vec<Vec<bool>>]) -> usize {
    run_many(c, batch, false).expect("widths match").0.len()
}
