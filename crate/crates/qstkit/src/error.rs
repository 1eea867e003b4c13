use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("unknown preset `{0}`")]
    UnknownPreset(String),
    #[error("inadmissible dimension {dim} for {preset}")]
    BadDimension { preset: String, dim: usize },
    #[error("invalid parameter: {0}")]
    BadParameter(String),
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimMismatch { expected: usize, got: usize },
    #[error("group mismatch: {0} vs {1}")]
    GroupMismatch(String, String),
    #[error("generator {0} is not defined for group {1}")]
    UndefinedGenerator(String, String),
    #[error("no solution: {0}")]
    NoSolution(String),
    #[error("singular jacobian at {0}")]
    SingularJacobian(String),
    #[error("unstable hessian estimate (spread {0:e})")]
    UnstableHessian(f64),
    #[error("quadrature did not converge (estimate {value:e}, error {error:e})")]
    Quadrature { value: f64, error: f64 },
    #[error("series is not invertible: {0}")]
    NotInvertible(String),
    #[error("index {index} outside truncation {n}")]
    OutsideTruncation { index: usize, n: usize },
    #[error("not unitary: residual {0:e}")]
    NotUnitary(f64),
    #[error("degree {degree} exceeds limit {limit}")]
    DegreeOverflow { degree: usize, limit: usize },
    #[error("state not normalized: norm {0}")]
    Unnormalized(f64),
    #[error("grid too coarse: {0}")]
    CoarseGrid(String),
    #[error("config error at {path}: {msg}")]
    Config { path: String, msg: String },
    #[error("overflow: {0}")]
    Overflow(String),
    #[error("io: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;

/// JSON pointer for a deserialization path.
pub fn json_pointer(path: &serde_path_to_error::Path) -> String {
    use serde_path_to_error::Segment;
    let esc = |s: &str| s.replace('~', "~0").replace('/', "~1");
    let mut out = String::new();
    for seg in path.iter() {
        match seg {
            Segment::Seq { index } => out.push_str(&format!("/{index}")),
            Segment::Map { key } => out.push_str(&format!("/{}", esc(key))),
            Segment::Enum { variant } => out.push_str(&format!("/{}", esc(variant))),
            Segment::Unknown => out.push_str("/?"),
        }
    }
    if out.is_empty() {
        "/".into()
    } else {
        out
    }
}
