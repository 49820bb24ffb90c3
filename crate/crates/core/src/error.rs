use thiserror::Error;

/// A single violated invariant of an [`EnvironmentSpec`](crate::EnvironmentSpec).
#[derive(Debug, Clone, PartialEq, Error)]
pub enum SpecViolation {
    #[error("empty environment: n_good + n_bad must be at least 1")]
    EmptyEnvironment,
    #[error("overlap out of range: {name} = {value} is not in [0, 1]")]
    OverlapOutOfRange { name: &'static str, value: f64 },
    #[error("probability out of range: p0 = {0} is not in [0, 1]")]
    ProbabilityOutOfRange(f64),
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid environment spec: {}", join(.0))]
    InvalidSpec(Vec<SpecViolation>),

    #[error("information deficit {0} is not in (0, 1]")]
    InvalidDeficit(f64),

    #[error("{name} = {value} is outside the domain [0, 1]")]
    Domain { name: &'static str, value: f64 },

    #[error("fragment size {fragment_size} exceeds the environment size {n_total}")]
    FragmentTooLarge { fragment_size: u64, n_total: u64 },

    #[error("fragment ({f_good} good, {f_bad} bad) does not fit the environment")]
    InvalidComposition { f_good: u64, f_bad: u64 },

    #[error("deficit unreachable: even the whole environment holds less than (1 - {delta}) H_S")]
    DeficitUnreachable { delta: f64 },

    #[error("{0}")]
    NotApplicable(&'static str),

    #[error("need at least 2 samples, got {0}")]
    TooFewSamples(u64),

    #[error("oracle limit exceeded: {what} is {got}, limit is {limit}")]
    OracleLimit {
        what: &'static str,
        got: usize,
        limit: usize,
    },

    #[error("invalid qubit selection: {0}")]
    InvalidSubset(String),

    #[error("state norm deviates from 1 by {0:e}")]
    Norm(f64),
}

fn join(v: &[SpecViolation]) -> String {
    v.iter()
        .map(|e| e.to_string())
        .collect::<Vec<_>>()
        .join("; ")
}

pub type Result<T> = std::result::Result<T, Error>;
