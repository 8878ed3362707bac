use thiserror::Error;

/// Which of the two free-variable side conditions of an operation failed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BoundarySide {
    Source,
    Target,
}

impl std::fmt::Display for BoundarySide {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            BoundarySide::Source => write!(f, "source"),
            BoundarySide::Target => write!(f, "target"),
        }
    }
}

/// Which clause of a boundary condition failed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DeltaClause {
    Categorical,
    FreeVars,
    Linearity,
}

impl std::fmt::Display for DeltaClause {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            DeltaClause::Categorical => write!(f, "categorical"),
            DeltaClause::FreeVars => write!(f, "free-variable equation"),
            DeltaClause::Linearity => write!(f, "linearity"),
        }
    }
}

fn fmt_set(s: &[String]) -> String {
    if s.is_empty() {
        "{}".into()
    } else {
        format!("{{{}}}", s.join(", "))
    }
}

#[derive(Debug, Clone, Error)]
pub enum CheckError {
    #[error("variable #{pos} out of range (context has {len} entries)")]
    UnboundVariable { pos: usize, len: usize },

    #[error("duplicate identifier `{ident}` in context")]
    DuplicateIdent { ident: String },

    #[error("type of `{ident}` mentions variables declared after it")]
    IllScoped { ident: String },

    #[error("term `{term}` has type `{found}` but `{expected}` was required")]
    TypeMismatch {
        term: String,
        expected: String,
        found: String,
    },

    #[error("`{found}` is not an arrow type")]
    NotAnArrow { found: String },

    #[error("`{what}` has dimension 0 and no source or target")]
    DimensionZero { what: String },

    #[error("substitution has {found} terms but the target context has {expected} entries")]
    SubLengthMismatch { expected: usize, found: usize },

    #[error("substitution entry {index} is `{found_term}` of type `{found}`, expected `{expected}`")]
    SubEntryMismatch {
        index: usize,
        found_term: String,
        expected: String,
        found: String,
    },

    #[error("not a pasting context at entry {position}: {reason}")]
    NotPs { position: usize, reason: String },

    #[error("boundary of a 0-dimensional pasting context is undefined")]
    BoundaryDimZero,

    #[error("operations over a 0-dimensional pasting context are not derivable")]
    OpOverZeroDimPs,

    #[error(
        "{side} side condition violated: missing {} / extra {}",
        fmt_set(missing), fmt_set(extra)
    )]
    SideConditionViolated {
        side: BoundarySide,
        missing: Vec<String>,
        extra: Vec<String>,
    },

    #[error("composite is not gluable: `{upper}` and `{lower}` do not share a boundary at codimension {codim}")]
    NotComposable {
        upper: String,
        lower: String,
        codim: usize,
    },

    #[error("context is not of cone shape: {reason}")]
    ConeShapeMismatch { reason: String },

    #[error(
        "{which} condition on `{subject}` failed ({clause}): missing {} / extra {}",
        fmt_set(missing), fmt_set(extra)
    )]
    DeltaCondViolated {
        which: BoundarySide,
        subject: String,
        clause: DeltaClause,
        missing: Vec<String>,
        extra: Vec<String>,
    },

    #[error("context is not globular: `{offending}` is not a variable")]
    NotGlobular { offending: String },

    #[error("expected an odd number of at least {min} segments, found {found}")]
    SegmentCount { min: usize, found: usize },

    #[error("segment imbalance: segment {left} has {left_len} entries, segment {right} has {right_len}")]
    SegmentImbalance {
        left: usize,
        left_len: usize,
        right: usize,
        right_len: usize,
    },

    #[error("premature close: first segment has {first} entries, last segment has {last}")]
    PrematureClose { first: usize, last: usize },

    #[error("duplicate `{ident}` should repeat the type of its original across the column shift; found `{found}`, expected `{expected}`")]
    DuplicateTypeMismatch {
        ident: String,
        expected: String,
        found: String,
    },

    #[error("entry `{ident}` mentions variables not visible at its introduction step")]
    SegmentScope { ident: String },

    #[error("context does not extend the base: {reason}")]
    ExtensionMismatch { reason: String },

    #[error("`{var}` depends on a cone variable that is not tracked yet")]
    UntrackedDependency { var: String },

    #[error(
        "postcomposition condition violated at column {column}, row {row}: missing {} / extra {}",
        fmt_set(missing), fmt_set(extra)
    )]
    StarViolated {
        column: usize,
        row: usize,
        missing: Vec<String>,
        extra: Vec<String>,
    },

    #[error("whisk source context malformed: {reason}")]
    WhiskShape { reason: String },

    #[error("rule {rule} does not apply: `{var}` lies in the {zone} zone")]
    WrongZone {
        rule: String,
        var: String,
        zone: String,
    },

    #[error("focus cell has dimension {alpha_dim} but the transfor has level {level}")]
    FocusDimMismatch { alpha_dim: usize, level: usize },

    #[error("`{term}` is not marked invertible")]
    NotMarkedInvertible { term: String },

    #[error("no uncovered variable left in the whisk source")]
    NothingToCover,

    #[error("internal invariant broken: {0}")]
    Internal(String),
}

pub type Result<T> = std::result::Result<T, CheckError>;
