use thiserror::Error;

use crate::treedec::ValidationReport;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("relations contain a cycle through element {0}")]
    CycleDetected(usize),
    #[error("id {id} out of range 1..={n}")]
    IdOutOfRange { id: usize, n: usize },
    #[error("generator needs n >= {min}, got {n}")]
    NTooSmall { n: usize, min: usize },

    #[error("syntax error on line {line}: {msg}")]
    Syntax { line: usize, msg: String },
    #[error("inconsistent header: {0}")]
    InconsistentHeader(String),
    #[error("invalid tree decomposition: {0}")]
    InvalidDecomposition(Box<ValidationReport>),

    #[error("permutations have overlapping domains (item {0})")]
    DomainsOverlap(usize),
    #[error("item {0} is not in the permutation's domain")]
    NotASubset(usize),
    #[error("duplicate item {0} in permutation")]
    DuplicateItem(usize),
    #[error("order bits {0:?} cannot come from the set-membership permutations")]
    ImpossiblePattern([bool; 3]),
    #[error("program reads bit {bit} but only {width} bits exist")]
    BitOutOfRange { bit: usize, width: usize },
    #[error("node {node} refers to child {child}, which is not an earlier node")]
    BadChild { node: usize, child: usize },

    #[error("vec({elem}, {node}) undefined: root of the element is not below the node")]
    PreconditionViolated { elem: usize, node: usize },
    #[error("D vertex {vertex} has witnesses with different out-neighbours towards tree node {child}")]
    LemmaViolation { vertex: usize, child: usize },
    #[error("vertices {0} and {1} are not joined by an edge of D")]
    NotAPath(usize, usize),
    #[error("colour {color} is used twice in the D bag of tree node {node}")]
    DuplicateColor { node: usize, color: u32 },
    #[error("colour increases along the edge {0} -> {1}")]
    ColorIncrease(usize, usize),
    #[error("vertex {vertex} has colour {actual}, not {expected}")]
    ColorMismatch {
        vertex: usize,
        expected: u32,
        actual: u32,
    },

    #[error("colour {lower} must be smaller than colour {upper}")]
    BadColorOrder { lower: u32, upper: u32 },
    #[error("intersection graph has an odd cycle through member {0}")]
    OddCycle(usize),
    #[error("malformed family key: {0}")]
    MalformedKey(String),

    #[error("construction invariant violated: {0}")]
    InvariantViolated(String),
    #[error("signature {0:?} is not realized in this instance")]
    UnrealizedSignature(Vec<u32>),
    #[error("expected {expected} order bits, got {actual}")]
    BitLengthMismatch { expected: usize, actual: usize },
    #[error("unsupported format version {found} (expected {expected})")]
    VersionMismatch { found: u32, expected: u32 },
    #[error("corrupt payload: {0}")]
    CorruptPayload(String),

    #[error("label has {actual} bits, scheme uses {expected}")]
    LengthMismatch { expected: usize, actual: usize },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
