use std::path::PathBuf;

use thiserror::Error;

use crate::fitting::ExponentialFit;
use crate::graph::PeriodLabel;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("unmapped airport code `{0}` (no merge-map entry)")]
    UnmappedCode(String),

    #[error("no arc records to build a snapshot from")]
    EmptyRecords,

    #[error("invalid snapshot: {0}")]
    InvalidSnapshot(String),

    #[error("{}:{line}: {message}", path.display())]
    Parse {
        path: PathBuf,
        line: u64,
        message: String,
    },

    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("invalid period label `{0}` (expected YYYYH1 or YYYYH2)")]
    InvalidPeriod(String),

    #[error("duplicate period {0}")]
    DuplicatePeriod(PeriodLabel),

    #[error("periods out of order: {from} is not before {to}")]
    PeriodOrder { from: PeriodLabel, to: PeriodLabel },

    #[error("degenerate input: {0}")]
    Degenerate(String),

    #[error("insufficient data: need at least {needed} points, got {got}")]
    InsufficientData { needed: usize, got: usize },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("fit did not converge after {iterations} iterations (best sse {:.6e})", best.sse)]
    FitFailed {
        iterations: usize,
        best: Box<ExponentialFit>,
    },

    #[error("traffic records reference airports missing from snapshot {period}: {}", codes.join(", "))]
    Join { period: PeriodLabel, codes: Vec<String> },

    #[error("traffic year {traffic_year} does not match snapshot period {period}")]
    YearMismatch { traffic_year: i32, period: PeriodLabel },

    #[error("series have no dates in common")]
    Alignment,

    #[error("no snapshot available for traffic date {0}")]
    MissingSnapshot(String),

    #[error("invalid series: {0}")]
    InvalidSeries(String),

    #[error("{period}: {source}")]
    InPeriod {
        period: PeriodLabel,
        #[source]
        source: Box<Error>,
    },

    #[error("configuration error: {0}")]
    Config(String),
}

impl Error {
    pub(crate) fn parse(path: impl Into<PathBuf>, line: u64, message: impl Into<String>) -> Self {
        Error::Parse {
            path: path.into(),
            line,
            message: message.into(),
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn in_period(self, period: PeriodLabel) -> Self {
        Error::InPeriod {
            period,
            source: Box::new(self),
        }
    }

    /// Process exit code for the command-line tool: 2 configuration,
    /// 3 parse/ingest, 4 computation.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Config(_) => 2,
            Error::UnmappedCode(_)
            | Error::EmptyRecords
            | Error::InvalidSnapshot(_)
            | Error::Parse { .. }
            | Error::Io { .. }
            | Error::InvalidPeriod(_)
            | Error::DuplicatePeriod(_)
            | Error::InvalidSeries(_) => 3,
            Error::InPeriod { source, .. } => source.exit_code(),
            _ => 4,
        }
    }
}
