use thiserror::Error;

/// Pipeline stage that produced an error.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Stage {
    Moments,
    Prony,
    ZeroNode,
    Geometry,
    Weights,
    ForwardCheck,
}

impl Stage {
    pub fn tag(self) -> &'static str {
        match self {
            Stage::Moments => "moments",
            Stage::Prony => "prony",
            Stage::ZeroNode => "zero-node",
            Stage::Geometry => "geometry",
            Stage::Weights => "weights",
            Stage::ForwardCheck => "forward-check",
        }
    }
}

impl std::fmt::Display for Stage {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.tag())
    }
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension: expected {expected}, got {got}")]
    Dimension { expected: usize, got: usize },
    #[error("invalid model: {0}")]
    InvalidModel(String),
    #[error("invalid distance form: {0}")]
    InvalidForm(String),
    #[error("unsupported form: {0}")]
    UnsupportedForm(&'static str),
    #[error("empty: need at least {needed} samples, got {got}")]
    Empty { needed: usize, got: usize },
    #[error("order: {0}")]
    Order(String),
    #[error("rank-deficient Hankel matrix (singular values {singular_values:?})")]
    RankDeficient { singular_values: Vec<f64> },
    #[error("nonreal-roots: root {re} {im:+}i")]
    NonrealRoots { re: f64, im: f64 },
    #[error("no-convergence: {0}")]
    NoConvergence(&'static str),
    #[error("vandermonde-singular: nodes {0} and {1} coincide")]
    VandermondeSingular(f64, f64),
    #[error("negative-weight {weight} at node {node}")]
    NegativeWeight { weight: f64, node: f64 },
    #[error("infeasible: no configuration reproduces the distance multiset")]
    Infeasible,
    #[error("budget: search exceeded {0} nodes")]
    Budget(u64),
    #[error("not-embeddable-in-d: {0}")]
    NotEmbeddable(String),
    #[error("shape: {0}")]
    Shape(String),
    #[error("inconsistent: {0}")]
    Inconsistent(String),
    #[error("domain: {0}")]
    Domain(String),
    #[error("zero-node-missing: nearest node {nearest} exceeds tolerance {tol}")]
    ZeroNodeMissing { nearest: f64, tol: f64 },
    #[error("repeated-distances: expected {expected} distinct nodes, recovered {got}")]
    RepeatedDistances { expected: usize, got: usize },
    #[error("forward check failed: discrepancy {discrepancy} > {tol}")]
    ForwardCheck { discrepancy: f64, tol: f64 },
    #[error("[{stage}] {source}")]
    Stage {
        stage: Stage,
        #[source]
        source: Box<Error>,
    },
    #[error("parse: {0}")]
    Parse(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub fn at(self, stage: Stage) -> Error {
        Error::Stage {
            stage,
            source: Box::new(self),
        }
    }

    /// The stage tag, if the error came out of the recovery pipeline.
    pub fn stage(&self) -> Option<Stage> {
        match self {
            Error::Stage { stage, .. } => Some(*stage),
            _ => None,
        }
    }

    /// True for failures of the numerical pipeline, as opposed to bad
    /// input files or arguments.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::Stage { .. }
                | Error::RankDeficient { .. }
                | Error::NonrealRoots { .. }
                | Error::NoConvergence(_)
                | Error::VandermondeSingular(..)
                | Error::NegativeWeight { .. }
                | Error::Infeasible
                | Error::Budget(_)
                | Error::NotEmbeddable(_)
                | Error::Inconsistent(_)
                | Error::ZeroNodeMissing { .. }
                | Error::RepeatedDistances { .. }
                | Error::ForwardCheck { .. }
        )
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
