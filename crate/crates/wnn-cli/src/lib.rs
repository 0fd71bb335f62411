//! Library side of the `wnn` binary: configuration resolution,
//! subcommand implementations, and output emission with round-trip
//! readers. The binary in main.rs is a thin argument-parsing shell
//! around these modules.

pub mod commands;
pub mod config;
pub mod output;

/// User-facing failure carrying the process exit code: 1 usage error,
/// 2 data error, 3 infeasible configuration.
#[derive(Debug)]
pub struct CliError {
    pub message: String,
    pub code: i32,
}

impl CliError {
    pub fn usage(message: String) -> Self {
        CliError { message, code: 1 }
    }

    pub fn data(message: String) -> Self {
        CliError { message, code: 2 }
    }

    pub fn infeasible(message: String) -> Self {
        CliError { message, code: 3 }
    }
}

impl From<wnn_forecast::Error> for CliError {
    fn from(e: wnn_forecast::Error) -> Self {
        use wnn_forecast::Error as E;
        let code = match &e {
            E::InvalidArgument(_) => 1,
            E::FileNotFound(_)
            | E::Io(_)
            | E::Csv(_)
            | E::ParseError { .. }
            | E::ColumnNotFound(_)
            | E::EmptySeries
            | E::NonFinite { .. }
            | E::LabelLengthMismatch { .. }
            | E::LengthMismatch { .. }
            | E::ZeroActualValue { .. }
            | E::NonPositiveValue { .. }
            | E::DomainError { .. } => 2,
            E::InsufficientData { .. }
            | E::TooShort { .. }
            | E::Infeasible(_)
            | E::IndexOutOfRange
            | E::NoFeasibleCell
            | E::OptimizationFailure => 3,
        };
        CliError {
            message: e.to_string(),
            code,
        }
    }
}
