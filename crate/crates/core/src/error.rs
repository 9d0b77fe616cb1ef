use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    Input(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("parameter error: {0}")]
    Parameter(String),

    #[error("no admissible trajectory from node {from} to node {to} within the horizon")]
    Unreachable { from: usize, to: usize },

    #[error("infeasible: {0}")]
    Infeasible(String),

    #[error(
        "no-arbitrage violated: psi_minus({export}) - psi_plus({import}) exceeds c by {excess:.3e}"
    )]
    NoArbitrage {
        import: usize,
        export: usize,
        excess: f64,
    },

    #[error("candidate infeasible: {0}")]
    CandidateInfeasible(String),

    #[error("unsupported configuration: {0}")]
    Unsupported(String),

    #[error("Hamiltonian kink crossed at layer {layer} (t = {time:.6})")]
    KinkCrossing { layer: usize, time: f64 },

    #[error("invariant violated: {0}")]
    Invariant(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}
