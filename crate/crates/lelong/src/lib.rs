//! Exact computation with positive closed currents of bidimension (1,1)
//! on complex projective space, in the case where the current is a
//! weighted sum of integration currents along algebraic curves plus a
//! nonnegative residual term.
//!
//! The crate computes masses, Lelong numbers, and upper level sets of
//! such currents in exact rational arithmetic over the field Q(i),
//! constructs entire pluricomplex Green functions with prescribed
//! logarithmic poles from polynomial data, and checks the structure
//! theorems that constrain how large level sets can be relative to the
//! mass of the current.
//!
//! Scalars are exact throughout. Points produced by polynomial root
//! finding that have no representation in Q(i) are carried as rational
//! approximations with an explicit error bound, and every predicate that
//! touches them reports whether it was decided exactly or within
//! tolerance.

pub mod current;
pub mod field;
pub mod fixtures;
pub mod geom;
pub mod green;
pub mod linalg;
pub mod poly;
pub mod theorems;
pub mod uni;

pub use current::{Component, Current, LelongEstimate, LelongInterval, LevelSet, Membership};
pub use field::{GaussianRational, Rational};
pub use geom::{
    ApproxPoint, Line, LocatedPoint, PlaneCurve, PointConfig, ProjPoint, ProjTransform,
};
pub use fixtures::{gen_example, random_current, ExampleData, ExampleParams, Fact, RandomSpec};
pub use green::{GreenFunction, Prop21Report, Prop24Outcome};
pub use theorems::{
    check_prop310, check_thm11, check_thm12, check_thm38, classify, classify_level_set,
    Classification, Prop310Report, Shape, TheoremReport, Thm38Report,
};

/// Default precision, in bits, for points that cannot be represented
/// exactly in Q(i). An approximation at `b` bits carries an error bound
/// of `2^(1-b)` per coordinate.
pub const DEFAULT_PRECISION_BITS: u32 = 256;

/// Errors shared across the crate.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// Malformed or inconsistent input data (parsing, validation).
    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// Operands have incompatible dimensions.
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    /// Division by zero in exact arithmetic.
    #[error("division by zero")]
    DivisionByZero,

    /// A mathematical precondition of the operation does not hold for
    /// the given arguments.
    #[error("precondition violated: {0}")]
    Precondition(String),

    /// Two curves share a component, so their intersection is not a
    /// finite set of points.
    #[error("common component: {0}")]
    CommonComponent(String),

    /// A search over candidate constructions exhausted its space
    /// without producing a certified result.
    #[error("construction failed: {0}")]
    ConstructionFailed(String),

    /// The operation is not implemented for the given shape of input.
    #[error("unsupported: {0}")]
    Unsupported(String),
}

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;
