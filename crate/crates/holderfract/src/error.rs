//! Error type shared by every module.

use thiserror::Error;

/// Everything that can go wrong while building systems, cuts and curves.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("every map has Lipschitz constant 0; the attractor is a single point")]
    EmptyAfterNormalize,
    #[error("invalid map {index}: {reason}")]
    InvalidMap { index: usize, reason: String },
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("cut too fine: predicted {predicted:.3e} words exceeds budget {budget}")]
    CutTooFine { predicted: f64, budget: usize },
    #[error("word {word} has no ancestor in A*({delta}) because its weight is not below delta")]
    NoAncestor { word: String, delta: f64 },
    #[error("no chain of adjacent cylinders below {root} joins the two points")]
    NoChain { root: String },
    #[error("alpha = {alpha} must exceed the similarity dimension {s}")]
    AlphaTooSmall { alpha: f64, s: f64 },
    #[error("level-1 cylinder graph is a cycle but no branching witness was found")]
    CycleDetected,
    #[error("system has branching at level {level}; arc parameterization needs a non-branching system")]
    BranchingInput { level: usize },
    #[error("aperture {value} of segment {index} is not in (0, 1/2)")]
    ApertureTooLarge { index: usize, value: f64 },
    #[error("diamonds of segments {i} and {j} overlap")]
    DiamondOverlap { i: usize, j: usize },
    #[error("segment {index} escapes the open master diamond")]
    SegmentEscapes { index: usize },
    #[error("map {index} is not a similarity in the system metric")]
    NotSelfSimilar { index: usize },
    #[error("separation violated at level {level}: d(phi_{w}(v), phi_{u}(v)) = {dist:.6e} < {bound:.6e}")]
    SeparationViolated { w: String, u: String, level: usize, dist: f64, bound: f64 },
    #[error("no level-{level} vertex of valence >= 3; use arc parameterization instead")]
    NoBranching { level: usize },
    #[error("no adjacent descendant pair lifts tree edge {a} -- {b}")]
    LiftFailed { a: String, b: String },
    #[error("no untraced qualifying branch at stage {stage} for interval {interval}")]
    BranchExhausted { stage: usize, interval: usize },
    #[error("carpet is disconnected")]
    DisconnectedCarpet,
    #[error("need at least 3 curves of increasing depth, got {0}")]
    InsufficientDepths(usize),
    #[error("smallest scale {scale:.3e} is below 10 x cover resolution {eps:.3e}")]
    ScalesBelowResolution { scale: f64, eps: f64 },
    #[error("parse error: {0}")]
    Parse(String),
}

impl Error {
    /// True for errors that reject the input rather than a failed construction.
    pub fn is_validation(&self) -> bool {
        matches!(
            self,
            Error::EmptyAfterNormalize
                | Error::InvalidMap { .. }
                | Error::InvalidInput(_)
                | Error::AlphaTooSmall { .. }
                | Error::ApertureTooLarge { .. }
                | Error::DiamondOverlap { .. }
                | Error::SegmentEscapes { .. }
                | Error::NotSelfSimilar { .. }
                | Error::SeparationViolated { .. }
                | Error::BranchingInput { .. }
                | Error::NoBranching { .. }
                | Error::DisconnectedCarpet
                | Error::InsufficientDepths(_)
                | Error::ScalesBelowResolution { .. }
                | Error::Parse(_)
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
