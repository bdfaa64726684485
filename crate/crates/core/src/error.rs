use thiserror::Error;

/// Errors raised anywhere in the crate.
///
/// Every variant maps to a short machine-readable code (see [`Error::code`])
/// which the CLI prints as `ERR <code> <detail>`.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("unknown qubit id {0}")]
    UnknownQubit(u32),
    #[error("duplicate qubit id {0}")]
    DuplicateQubit(u32),
    #[error("qubits {0} and {1} share a position")]
    DuplicatePosition(u32, u32),
    #[error("edges cross: {0}")]
    NonPlanarEmbedding(String),
    #[error("qubit {qubit} has degree {degree}, expected 2, 3 or 4")]
    BadDegree { qubit: u32, degree: usize },
    #[error("two edges leave qubit {0} at the same angle")]
    AngleTie(u32),
    #[error("two edges of qubit {0} fall into the same compass slot")]
    SlotCollision(u32),
    #[error("graph is not connected")]
    Disconnected,
    #[error("embedding is not a sphere/disk (V - E + F = {0})")]
    EulerViolation(i64),
    #[error("link {0} is not present")]
    LinkAbsent(String),
    #[error("corner {0} is already paired")]
    CornersPaired(String),
    #[error("corners {0} and {1} are not on a common face")]
    NotAdjacent(String, String),
    #[error("no stabilizer plaquette contains both {0} and {1}")]
    NoSharedPlaquette(String, String),
    #[error("corner {0} is not unpaired")]
    NotUnpaired(String),
    #[error("path enters qubit {0} through an absent edge slot")]
    SlotMissing(u32),
    #[error("invalid path: {0}")]
    InvalidPath(String),
    #[error("segment does not lie on the face boundary")]
    SegmentNotOnFace,
    #[error("loop is not simple")]
    NonSimpleLoop,
    #[error("path is not a closed loop")]
    NotALoop,
    #[error("open 't Hooft path of odd length needs a terminating anyon")]
    OddOpenPath,
    #[error("rotation axis is not Hermitian")]
    NonHermitianAxis,
    #[error("observable is not Hermitian")]
    NonHermitianObservable,
    #[error("supplied strings do not commute: {0}")]
    NonCommuting(String),
    #[error("supplied strings have rank {rank} but {needed} are needed")]
    RankDeficient { rank: usize, needed: usize },
    #[error("supplied strings are inconsistent (a product equals -I)")]
    Inconsistent,
    #[error("qubit count mismatch: {0} vs {1}")]
    QubitCountMismatch(usize, usize),
    #[error("oracle supports at most {max} qubits, got {got}")]
    TooManyQubits { got: usize, max: usize },
    #[error("instruction {index} failed validation: {msg}")]
    ValidationFailed { index: usize, msg: String },
    #[error("unsupported geometry: {0}")]
    UnsupportedGeometry(String),
    #[error("tracked line does not end at the moved anyon: {0}")]
    EndpointMismatch(String),
    #[error("unknown anyon {0}")]
    UnknownAnyon(String),
    #[error("backends diverged: {0}")]
    BackendDivergence(String),
    #[error("io error: {0}")]
    Io(String),
}

impl Error {
    pub fn code(&self) -> &'static str {
        match self {
            Error::Parse { .. } => "Parse",
            Error::UnknownQubit(_) => "UnknownQubit",
            Error::DuplicateQubit(_) => "DuplicateQubit",
            Error::DuplicatePosition(..) => "DuplicatePosition",
            Error::NonPlanarEmbedding(_) => "NonPlanarEmbedding",
            Error::BadDegree { .. } => "BadDegree",
            Error::AngleTie(_) => "AngleTie",
            Error::SlotCollision(_) => "SlotCollision",
            Error::Disconnected => "Disconnected",
            Error::EulerViolation(_) => "EulerViolation",
            Error::LinkAbsent(_) => "LinkAbsent",
            Error::CornersPaired(_) => "CornersPaired",
            Error::NotAdjacent(..) => "NotAdjacent",
            Error::NoSharedPlaquette(..) => "NoSharedPlaquette",
            Error::NotUnpaired(_) => "NotUnpaired",
            Error::SlotMissing(_) => "SlotMissing",
            Error::InvalidPath(_) => "InvalidPath",
            Error::SegmentNotOnFace => "SegmentNotOnFace",
            Error::NonSimpleLoop => "NonSimpleLoop",
            Error::NotALoop => "NotALoop",
            Error::OddOpenPath => "OddOpenPath",
            Error::NonHermitianAxis => "NonHermitianAxis",
            Error::NonHermitianObservable => "NonHermitianObservable",
            Error::NonCommuting(_) => "NonCommuting",
            Error::RankDeficient { .. } => "RankDeficient",
            Error::Inconsistent => "Inconsistent",
            Error::QubitCountMismatch(..) => "QubitCountMismatch",
            Error::TooManyQubits { .. } => "TooManyQubits",
            Error::ValidationFailed { .. } => "ValidationFailed",
            Error::UnsupportedGeometry(_) => "UnsupportedGeometry",
            Error::EndpointMismatch(_) => "EndpointMismatch",
            Error::UnknownAnyon(_) => "UnknownAnyon",
            Error::BackendDivergence(_) => "BackendDivergence",
            Error::Io(_) => "Io",
        }
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
