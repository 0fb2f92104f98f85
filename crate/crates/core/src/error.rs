use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("invalid instance: {0}")]
    InvalidInstance(String),

    #[error("infeasible plan: {0}")]
    InfeasiblePlan(String),

    #[error("plan support contains a cycle through source {source_index}")]
    CyclicSupport { source_index: usize },

    #[error("index {index} out of range (len {len})")]
    IndexOutOfRange { index: usize, len: usize },

    #[error("expected a square plan, got {m}x{n}")]
    NotSquare { m: usize, n: usize },

    #[error("lcm({m},{n}) = {lcm} exceeds guard {guard}")]
    GuardExceeded {
        m: usize,
        n: usize,
        lcm: u64,
        guard: u64,
    },

    #[error("enumeration cap of {0} plans exceeded")]
    CapExceeded(u64),

    #[error("instance has no geometry")]
    MissingGeometry,

    #[error("plotting needs 2D points, got dimension {0}")]
    UnsupportedDimension(usize),

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        if e.is_io() {
            Error::Io(e.into())
        } else {
            Error::Parse(e.to_string())
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
