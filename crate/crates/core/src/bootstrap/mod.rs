//! Tight compaction from loose compaction and back, and the ladder of
//! alternating levels.

mod base;
mod ladder;
mod plan;

pub use base::base_tc;
pub use ladder::{build_ladder, build_tc, lc_from_tc, measure, tc_from_lc, Ladder, LedgerRow, SizeLedger, BASE_BELOW};
pub use plan::{chunk_len, depth, iter_log, plan, BootstrapPlan, Level, Role};
