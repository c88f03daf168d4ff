//! Global invariant types as finite rule schemas, their tensor products, and
//! domination checks reduced to finite consistency problems.

pub mod amalgam;
pub mod builtins;
pub mod domination;
pub mod error;
pub mod logic;
pub mod order;
pub mod schema;

pub use error::{Error, Result};
