use thiserror::Error;

use crate::dsl::ParseError;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("operands belong to different algebras")]
    MixedAlgebras,
    #[error("generator `{0}` must have degree at least 1")]
    NonPositiveDegree(String),
    #[error("duplicate name `{0}`")]
    DuplicateName(String),
    #[error("unknown symbol `{0}`")]
    UnknownSymbol(String),
    #[error("degree mismatch for {what}: expected {expected}, found {found}")]
    DegreeMismatch {
        what: String,
        expected: i64,
        found: String,
    },
    #[error("d^2 does not vanish on `{generator}`: d(d({generator})) = {residue}")]
    D2NotZero { generator: String, residue: String },
    #[error("element is not a cocycle: {0}")]
    NotCocycle(String),
    #[error("cohomology was computed through degree {computed}, need {needed}")]
    InsufficientDegree { needed: u32, computed: u32 },
    #[error("cannot truncate at the formal dimension: H^{degree} has dimension {betti}")]
    TruncationUnsound { degree: u32, betti: usize },
    #[error("degree-0 part must be spanned by a single unit")]
    NotConnected,
    #[error("product {i}*{j} violates the grading")]
    NotGraded { i: String, j: String },
    #[error("product is not associative on ({i}, {j}, {k})")]
    NotAssociative { i: String, j: String, k: String },
    #[error("product is not graded commutative on ({i}, {j})")]
    NotGradedCommutative { i: String, j: String },
    #[error("map is not a derivation: Leibniz fails on ({i}, {j})")]
    NotDerivation { i: String, j: String },
    #[error("derivation does not commute with the differential on `{0}`")]
    NotChainDerivation(String),
    #[error("cohomology was not computed from the Cartan model of this data")]
    NotCartanModel,
    #[error("model does not match the given cohomology ring: {0}")]
    ModelMismatch(String),
    #[error("coefficient map at torus index {index} is not a derivation; input is not multiplicative")]
    NonMultiplicative { index: usize },
    #[error("automorphism is not normalized: the t_0 coefficient is not the identity")]
    NotNormalized,
    #[error("map is not invertible in degree {0}")]
    NotInvertible(u32),
    #[error("invalid torus index {0}")]
    InvalidTorusIndex(usize),
    #[error("unknown catalog entry `{name}`; available: {}", available.join(", "))]
    UnknownCatalogEntry {
        name: String,
        available: Vec<String>,
    },
    #[error("{0}")]
    InvalidArgument(String),
    #[error(transparent)]
    Parse(#[from] ParseError),
}
