use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("element index {index} out of range for a group of order {order}")]
    ElementOutOfRange { index: usize, order: usize },
    #[error("invalid group table: {0}")]
    InvalidTable(String),
    #[error("invalid class set: {0}")]
    InvalidClass(String),
    #[error("group of order {order} exceeds the subgroup-enumeration bound {bound}")]
    GroupTooLarge { order: usize, bound: usize },
    #[error("braid word on {strands} strands used with a tuple of length {length}")]
    StrandMismatch { strands: usize, length: usize },
    #[error("generator index {index} is not valid on {strands} strands")]
    GeneratorOutOfRange { index: usize, strands: usize },
    #[error("tuple entry {entry} left the class set")]
    LeftClass { entry: usize },
    #[error("stabiliser element {0} is not in the class set")]
    StabiliserNotInClass(usize),
    #[error("resource bound exceeded: {what} needs {needed}, limit is {limit}")]
    ResourceBound { what: String, needed: u128, limit: u128 },
    #[error("truncation degree {d_max} out of range for {strands} strands")]
    TruncationOutOfRange { d_max: usize, strands: usize },
    #[error("boundary composite D_{degree} D_{next} is nonzero", next = .degree + 1)]
    BoundarySquareNonzero { degree: usize },
    #[error("chain map does not commute with the boundary in degree {degree}")]
    NotAChainMap { degree: usize },
    #[error("homology in degree {degree} is not certified by a resolution truncated at {d_max}")]
    UntrustedDegree { degree: usize, d_max: usize },
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("structure map I_{k} is not injective")]
    NotInjective { k: usize },
    #[error("structure map I_{k} has a cokernel with torsion; degree undefined at this stage")]
    TorsionCokernel { k: usize },
    #[error("matrix is not invertible over the integers")]
    NotUnimodular,
    #[error("coefficient system range exhausted: {0}")]
    RangeExhausted(String),
    #[error("graded module input rejected: {0}")]
    InvalidGraded(String),
    #[error("invalid monodromy model: {0}")]
    InvalidModel(String),
    #[error("object mismatch in composition: {0}")]
    ObjectMismatch(String),
    #[error("invalid input: {0}")]
    Invalid(String),
}

pub type Result<T> = std::result::Result<T, Error>;
