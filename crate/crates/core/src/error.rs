use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("sheet {sheet} out of range 1..={sheets}")]
    SheetOutOfRange { sheet: usize, sheets: usize },

    #[error("negative propagation time {0}")]
    NegativeTime(f64),

    #[error("state is at rest at the focus-focus equilibrium")]
    RestAtOrigin,

    #[error("state is not on the boundary circle (|r^2 - 1| = {0:e})")]
    NotOnBoundary(f64),

    #[error("velocity points inward (v.n = {0:e}); nothing to reflect")]
    InwardVelocity(f64),

    #[error("trajectory never reaches the boundary (asymptotic to the equilibrium)")]
    NoBoundaryHit,

    #[error("momentum value (h={h}, f={f}) lies outside the image of the momentum map")]
    OutsideImage { h: f64, f: f64 },

    #[error("momentum value (h={h}, f={f}) is singular")]
    SingularValue { h: f64, f: f64 },

    #[error("degenerate pencil: lambda = mu = 0")]
    DegeneratePencil,

    #[error("quadrature did not converge (estimated error {achieved:e})")]
    Quadrature { achieved: f64 },

    #[error("loop does not enclose the focus-focus value: {0}")]
    LoopNotEnclosing(String),

    #[error("phase unwrapping ambiguous near (h={h}, f={f}) after refinement depth {depth}")]
    Unwrap { h: f64, f: f64, depth: usize },

    #[error("malformed input: {0}")]
    Parse(String),
}

impl Error {
    /// Validation problems (bad user input) as opposed to numerical failures.
    pub fn is_validation(&self) -> bool {
        matches!(
            self,
            Error::InvalidParameter(_)
                | Error::SheetOutOfRange { .. }
                | Error::NegativeTime(_)
                | Error::RestAtOrigin
                | Error::NotOnBoundary(_)
                | Error::InwardVelocity(_)
                | Error::OutsideImage { .. }
                | Error::SingularValue { .. }
                | Error::DegeneratePencil
                | Error::LoopNotEnclosing(_)
                | Error::Parse(_)
        )
    }
}
