//! Built-in sample data.

use crate::context::{parse_mv_csv, ManyValuedContext};

/// Pain degrees of four patients (`P1..P4`) for four symptoms (`S1..S4`).
pub const HEALTH_CENTER_CSV: &str = "\
,S1,S2,S3,S4
P1,1,0.1,0.3,0
P2,0.3,0.8,0.5,0
P3,0.3,1,0.7,0.5
P4,0.1,0.1,1,1
";

pub fn health_center() -> ManyValuedContext {
    parse_mv_csv(HEALTH_CENTER_CSV).expect("built-in sample parses")
}
