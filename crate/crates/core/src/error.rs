use std::fmt;

use crate::dist::Kind;

/// Quadruple `(j, k, r, s)` of 1-based indices naming a pair mixture.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PairIndex {
    pub j: usize,
    pub k: usize,
    pub r: usize,
    pub s: usize,
}

impl fmt::Display for PairIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(j,k,r,s)=({},{},{},{})", self.j, self.k, self.r, self.s)
    }
}

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("invalid distribution: {0}")]
    InvalidDistribution(String),

    #[error("distribution kinds differ: {left} vs {right}")]
    KindMismatch { left: Kind, right: Kind },

    #[error("{name} = {value} is outside its domain {domain}")]
    Domain {
        name: &'static str,
        value: f64,
        domain: &'static str,
    },

    #[error("{operation} needs a {required}-valued model, got {found}-valued")]
    KindRequired {
        operation: &'static str,
        required: Kind,
        found: Kind,
    },

    #[error("invalid model: {0}")]
    InvalidModel(String),

    #[error("invalid permutation: {0}")]
    InvalidPermutation(String),

    #[error("n = {n} exceeds the enumeration cap {cap}; use Monte Carlo sampling instead")]
    CapacityExceeded { n: usize, cap: usize },

    #[error("enumeration needs {count} terms, above the cap of {cap}")]
    EnumerationTooLarge { count: u128, cap: u128 },

    #[error("{quantity} = {value} exceeds epsilon = {epsilon} at {at}")]
    EpsilonViolated {
        quantity: &'static str,
        at: PairIndex,
        value: f64,
        epsilon: f64,
    },

    #[error("lower bound {lower} exceeds {quantity} = {actual} at {at}")]
    LowerBoundViolated {
        quantity: &'static str,
        at: PairIndex,
        lower: f64,
        actual: f64,
    },

    #[error("variance condition fails: second moment {second} - first^2 {first_sq} > epsilon {epsilon} * first {first}")]
    VarianceCondition {
        first: f64,
        first_sq: f64,
        second: f64,
        epsilon: f64,
    },

    #[error("invalid hafnian input: {0}")]
    InvalidTensor(String),

    #[error("precondition violated: {0}")]
    Precondition(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
