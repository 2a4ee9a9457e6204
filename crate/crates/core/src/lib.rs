//! Variability-aware change impact assessment for GSN safety cases.

pub mod cia;
pub mod exec;
pub mod model;
pub mod oracle;
pub mod pcalc;
pub mod slicer;
pub mod vset;
