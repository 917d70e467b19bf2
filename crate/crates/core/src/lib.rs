//! Measurement toolkit for evolving airport networks.
//!
//! Timetable snapshots become directed graphs ([`graph`]), which are
//! summarised per period ([`metrics`]), compared across periods
//! ([`evolution`]) and related to traffic volumes ([`traffic`]). The
//! [`fitting`] module holds every curve fit used along the way, and
//! [`report`] drives batch runs over files read by [`io`].

pub mod cli;
pub mod error;
pub mod evolution;
pub mod fitting;
pub mod graph;
pub mod io;
pub mod metrics;
mod par;
pub mod report;
pub mod traffic;

pub use error::{Error, Result};
pub use graph::{AirportId, GraphSnapshot, MergeMap, PeriodLabel};
pub use par::with_workers;
