use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid measure: {0}")]
    InvalidMeasure(String),
    #[error("point {0} is outside the admissible domain")]
    Domain(String),
    #[error("quadrature did not reach tolerance (estimate {estimate:e})")]
    Quadrature { estimate: f64 },
    #[error("1 + psi vanishes at {0}")]
    Pole(String),
    #[error("eta vanishes at {0}")]
    ZeroEta(String),
    #[error("local inversion failed: {0}")]
    Inversion(String),
    #[error("winding number not resolved after refinement: {0}")]
    WindingAmbiguity(String),
    #[error("branch tracking failed: {0}")]
    Branch(String),
    #[error("extrapolation did not contract at {0}")]
    Extrapolation(String),
    #[error("root isolation failed: {0}")]
    RootIsolation(String),
    #[error("bisection bracket invalid: {0}")]
    Bracket(String),
    #[error("phase residual too large: {0}")]
    Phase(String),
    #[error("modulus residual too large: {0}")]
    Modulus(String),
    #[error("atom image could not be located: {0}")]
    Locate(String),
    #[error("continuation stalled: {0}")]
    Continuation(String),
    #[error("{stage}: {source}")]
    Stage {
        stage: &'static str,
        #[source]
        source: Box<Error>,
    },
}

impl Error {
    pub fn at(self, stage: &'static str) -> Error {
        Error::Stage { stage, source: Box::new(self) }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
