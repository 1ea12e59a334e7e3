use thiserror::Error;

pub type Result<T> = core::result::Result<T, Error>;

#[derive(Debug, Clone, Copy, PartialEq, Error)]
pub enum Error {
    /// `omega_hat^2 - 1 - K^2` is negative: no field satisfies the energy constraint.
    #[error("insufficient energy: omega_k^2 = {omega_k_sq} < 0")]
    InsufficientEnergy { omega_k_sq: f64 },
    #[error("invalid energy: omega_hat^2 = {omega_hat_sq} must exceed 1")]
    InvalidEnergy { omega_hat_sq: f64 },
    #[error("coupling ratio K = {k_ratio} outside the validity window of the optimal-time formula")]
    OutOfRange { k_ratio: f64 },
    #[error("optimal time diverges at K = {k_ratio}")]
    DivergentTime { k_ratio: f64 },
    #[error("optimal B_z^2 is negative (radicand = {radicand})")]
    NegativeBzSquared { radicand: f64 },
    #[error("2-tangle evaluated to {value} < 0")]
    NegativeTangle { value: f64 },
    #[error("integration step {step} exceeds the bound {limit}")]
    StepTooLarge { step: f64, limit: f64 },
    #[error("search bounds are empty")]
    EmptyBounds,
    #[error("state is not normalized (norm^2 = {norm_sqr})")]
    NotNormalized { norm_sqr: f64 },
    #[error("no optimal plan is defined for this initial-state class")]
    UnsupportedClass,
}

impl Error {
    /// Short stable identifier, used in diagnostics and report lines.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::InsufficientEnergy { .. } => "InsufficientEnergy",
            Error::InvalidEnergy { .. } => "InvalidEnergy",
            Error::OutOfRange { .. } => "OutOfRange",
            Error::DivergentTime { .. } => "DivergentTime",
            Error::NegativeBzSquared { .. } => "NegativeBzSquared",
            Error::NegativeTangle { .. } => "NegativeTangle",
            Error::StepTooLarge { .. } => "StepTooLarge",
            Error::EmptyBounds => "EmptyBounds",
            Error::NotNormalized { .. } => "NotNormalized",
            Error::UnsupportedClass => "UnsupportedClass",
        }
    }
}
