pub mod circuit;
pub mod compact;
pub mod bootstrap;
pub mod ctx;
pub mod elem;
pub mod error;
pub mod expander;
pub mod family;
pub mod gadgets;
pub mod harness;
pub mod keysort;
pub mod lc0;
pub mod oracle;
pub mod route;
pub mod selection;
pub mod swapper;
pub mod tinyw;

pub use circuit::{Builder, Bundle, Circuit, Gate, GateStats, TruthTable, WireId};
pub use error::{Error, Result};
pub use compact::Strategy;
pub use ctx::{Config, Eps};
pub use family::{Family, Request};
pub use oracle::OracleReport;
