use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("matrix is not Hermitian (max deviation {deviation:.3e})")]
    NotHermitian { deviation: f64 },

    #[error("{what} is not unitary (max deviation {deviation:.3e})")]
    NotUnitary { what: &'static str, deviation: f64 },

    #[error("control has no segments")]
    EmptyControl,

    #[error("sample time {t} outside [0, {t_final}]")]
    SampleOutOfRange { t: f64, t_final: f64 },

    #[error("invalid {name} = {value}: {reason}")]
    InvalidParameter {
        name: &'static str,
        value: f64,
        reason: &'static str,
    },

    #[error("H0 and V commute; the special control is undefined")]
    CommutingHamiltonians,

    #[error("special control denominator vanishes")]
    ZeroDenominator,

    #[error("traceless part of H0 + f0 V vanishes")]
    ZeroTracelessPart,

    #[error("need at least 2 quadrature nodes, got {0}")]
    TooFewNodes(usize),

    #[error("matrix is not symmetric (max deviation {0:.3e})")]
    NotSymmetric(f64),

    #[error("Jacobi eigensolver did not converge in {sweeps} sweeps (off-diagonal norm {off_norm:.3e})")]
    NotConverged { sweeps: usize, off_norm: f64 },

    #[error("({phi_w}, {t}) lies outside the parameter rectangle (0, pi] x (0, pi/2]")]
    OutOfRectangle { phi_w: f64, t: f64 },

    #[error("parameter point is classified {label}; no Hessian spectrum theory applies")]
    ExcludedPoint { label: String },

    #[error("equation {equation} degenerates: {reason}")]
    DegenerateEquation {
        equation: &'static str,
        reason: &'static str,
    },

    #[error("closed-form roots are not available for label {0}")]
    NoClosedForm(String),

    #[error("characteristic system is numerically full rank (sigma_min/sigma_max = {0:.3e}); not an eigenvalue")]
    FullRankSystem(f64),

    #[error("bracket ({lo}, {hi}) straddles a = 1 with the root above 1")]
    BracketStraddlesOne { lo: f64, hi: f64 },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub(crate) fn invalid(name: &'static str, value: f64, reason: &'static str) -> Error {
    Error::InvalidParameter {
        name,
        value,
        reason,
    }
}
