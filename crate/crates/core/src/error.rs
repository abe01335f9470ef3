use std::fmt;

/// Where in a configuration an error was found.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Location {
    pub node: Option<String>,
    pub period: Option<usize>,
    pub community: Option<String>,
}

impl Location {
    pub fn node(id: impl Into<String>) -> Self {
        Location {
            node: Some(id.into()),
            ..Default::default()
        }
    }

    pub fn period(mut self, t: usize) -> Self {
        self.period = Some(t);
        self
    }

    pub fn community(mut self, id: impl Into<String>) -> Self {
        self.community = Some(id.into());
        self
    }
}

impl fmt::Display for Location {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts = Vec::new();
        if let Some(n) = &self.node {
            parts.push(format!("node {n}"));
        }
        if let Some(t) = self.period {
            parts.push(format!("period {t}"));
        }
        if let Some(c) = &self.community {
            parts.push(format!("community {c}"));
        }
        if parts.is_empty() {
            write!(f, "document")
        } else {
            write!(f, "{}", parts.join(", "))
        }
    }
}

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("schema error at {location}: {message}")]
    Schema { location: Location, message: String },

    #[error("invariant violated at {location}: {message}")]
    Invariant { location: Location, message: String },

    #[error("transition matrix is reducible: no unique stationary distribution")]
    ReducibleChain,

    #[error("arrangement has {count} distinct rectangles, limit is {limit}")]
    TooManyRects { count: usize, limit: usize },

    #[error("no hit is possible: the unit-time hitting probability is zero everywhere")]
    NoHitPossible,

    #[error("no meeting is possible: the cycle meeting probability is zero")]
    NoMeetingPossible,

    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("line {line}: timestamps for node {node} are not strictly increasing")]
    NonMonotoneTime { line: usize, node: String },

    #[error("step {step} is too coarse: halving it moved the final value by {relative_change:.3e}")]
    StepTooCoarse { step: f64, relative_change: f64 },

    #[error("nodes do not share a common schedule cycle: {0}")]
    ScheduleMismatch(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub fn schema(location: Location, message: impl Into<String>) -> Self {
        Error::Schema {
            location,
            message: message.into(),
        }
    }

    pub fn invariant(location: Location, message: impl Into<String>) -> Self {
        Error::Invariant {
            location,
            message: message.into(),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
