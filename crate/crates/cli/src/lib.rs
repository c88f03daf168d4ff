//! Scenario runner, report verification and monoid tables behind the
//! `tamedom` binary.

pub mod context;
pub mod monoid;
pub mod report;
pub mod scenario;
pub mod userfile;

pub use context::{hard_cap, Budgets, Context, Loaded};
pub use report::{verify_report, Bounded, Claim, Evidence, Report, VerifyOutcome};
pub use scenario::{run_scenario, SCENARIOS};
