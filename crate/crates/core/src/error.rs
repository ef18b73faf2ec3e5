use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("vector does not lie in the ambient lattice")]
    VectorOutsideLattice,
    #[error("sublattice is not saturated")]
    NotSaturated,
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("ray {index} is not a primitive nonzero lattice vector")]
    NonPrimitiveRay { index: usize },
    #[error("rays {a} and {b} coincide")]
    DuplicateRay { a: usize, b: usize },
    #[error("cone {cone:?} is not strongly convex")]
    NotStronglyConvex { cone: Vec<usize> },
    #[error("generator {ray} of cone {cone:?} is not an extremal ray")]
    RedundantGenerator { cone: Vec<usize>, ray: usize },
    #[error("cones {a:?} and {b:?} do not intersect in a common face")]
    OverlappingCones { a: Vec<usize>, b: Vec<usize> },
    #[error("face {face:?} of cone {cone:?} is missing from the fan")]
    MissingFace { cone: Vec<usize>, face: Vec<usize> },
    #[error("ray index {0} out of range")]
    RayIndexOutOfRange(usize),
    #[error("cone {0:?} is not a cone of the fan")]
    ConeNotInFan(Vec<usize>),
    #[error("point lies outside the support of the fan")]
    PointOutsideSupport,
    #[error("fans have different supports")]
    SupportMismatch,
    #[error("fan is not pure dimensional")]
    NotPure,

    #[error("weights must be given for exactly the maximal cones")]
    WeightsMismatch,
    #[error("weight on cone {cone:?} must be positive")]
    NonPositiveWeight { cone: Vec<usize> },
    #[error("weighted fan is not balanced at cone {cone:?}")]
    Unbalanced { cone: Vec<usize> },
    #[error("image of cone {cone:?} is not a cone of the target fan")]
    ConeImageNotACone { cone: Vec<usize> },

    #[error("piecewise linear function disagrees on face {face:?}")]
    FaceMismatch { face: Vec<usize> },
    #[error("ray values do not interpolate integrally on cone {cone:?}")]
    NonIntegralInterpolation { cone: Vec<usize> },
    #[error("ray values need a simplicial fan; cone {cone:?} is not simplicial")]
    RayValuesOnNonSimplicial { cone: Vec<usize> },
    #[error("divisor has a negative weight on cone {cone:?}")]
    NegativeDivisorWeight { cone: Vec<usize> },

    #[error("fan is not simplicial")]
    NonSimplicialFan,
    #[error("fan is not unimodular")]
    NonUnimodular,

    #[error("matroid bases violate the exchange axiom")]
    ExchangeAxiomViolation,
    #[error("matroid has a loop at element {0}")]
    LoopPresent(usize),
    #[error("invalid matroid: {0}")]
    InvalidMatroid(String),

    #[error("malformed certificate: {0}")]
    MalformedCertificate(String),
    #[error("parse error at line {line}, column {column}: {message}")]
    Parse { line: usize, column: usize, message: String },
    #[error("invalid document: {0}")]
    InvalidDocument(String),
}
