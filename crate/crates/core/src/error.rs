use thiserror::Error;

use crate::lattice::ClassVector;

pub type Result<T> = std::result::Result<T, Error>;

/// Whether a failure comes from malformed input or from a mathematical
/// precondition that the (well-formed) input does not meet.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ErrorKind {
    Input,
    Domain,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("multiplicities {m1} and {m2} are not coprime")]
    NotCoprime { m1: u64, m2: u64 },

    #[error("multiplicities must be positive")]
    ZeroMultiplicity,

    #[error("vector of length {found} does not match lattice rank {rank}")]
    LengthMismatch { rank: usize, found: usize },

    #[error("gram matrix is not square")]
    NotSquare,

    #[error("gram matrix is not symmetric")]
    NotSymmetric,

    #[error("gram matrix is degenerate")]
    Degenerate,

    #[error("invariant violated: {0}")]
    Invariant(String),

    #[error("signature ({found_pos},{found_neg}) is not the required ({want_pos},{want_neg})")]
    Signature {
        want_pos: usize,
        want_neg: usize,
        found_pos: usize,
        found_neg: usize,
    },

    #[error("inconsistent Betti data b2={b2}, sigma={sigma}: {reason}")]
    InconsistentHomotopy { b2: i64, sigma: i64, reason: &'static str },

    #[error("model has no designated W block")]
    NoWBlock,

    #[error("tau is not an isometry of W")]
    NotIsometry,

    #[error("lattice has b+ = {0}; chambers need b+ = 1")]
    BPlusNotOne(usize),

    #[error("not a polarization: {0}")]
    BadPolarization(String),

    #[error("polarization lies on the wall {}", .0)]
    OnWall(ClassVector),

    #[error("Delta.kappa must be odd for suitability (walls orthogonal to the fiber exist otherwise)")]
    EvenFiberDegree,

    #[error("no sub-line-bundle class: l(Z) = {0} is negative")]
    NegativeColength(num_bigint::BigInt),

    #[error("leading coefficient formula needs exactly one even multiplicity")]
    ParityViolation,

    #[error("p = {p} is outside the stable range -p >= {bound}")]
    StableRange { p: i64, bound: i64 },

    #[error("n = (d - p_g)/2 is not an integer (d = {d}, p_g = {pg})")]
    NonIntegralIndex { d: i64, pg: u32 },

    #[error("negative index: {0}")]
    NegativeIndex(String),

    #[error("closed form only known for t in 0..=2, got t = {0}")]
    UnsupportedDegree(u32),

    #[error("Morgan-O'Grady coefficient is only stated for p_g = 1")]
    SourceNeedsPgOne,

    #[error("A = 0: some multiplicity is 1, the pair is ambiguous")]
    AmbiguousA,

    #[error("recovery failed: {0}")]
    Recovery(String),

    #[error("search limit of {0} states exceeded")]
    SearchLimit(usize),

    #[error("parse error: {0}")]
    Parse(String),
}

impl Error {
    pub fn kind(&self) -> ErrorKind {
        use Error::*;
        match self {
            NotCoprime { .. }
            | ZeroMultiplicity
            | LengthMismatch { .. }
            | NotSquare
            | NotSymmetric
            | Degenerate
            | Invariant(_)
            | Signature { .. }
            | InconsistentHomotopy { .. }
            | NoWBlock
            | NotIsometry
            | BadPolarization(_)
            | Parse(_) => ErrorKind::Input,
            BPlusNotOne(_)
            | OnWall(_)
            | EvenFiberDegree
            | NegativeColength(_)
            | ParityViolation
            | StableRange { .. }
            | NonIntegralIndex { .. }
            | NegativeIndex(_)
            | UnsupportedDegree(_)
            | SourceNeedsPgOne
            | AmbiguousA
            | Recovery(_)
            | SearchLimit(_) => ErrorKind::Domain,
        }
    }
}
