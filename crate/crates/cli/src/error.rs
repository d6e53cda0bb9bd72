use std::process::ExitCode;

use credit_calib::Error;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),

    #[error(transparent)]
    Core(#[from] Error),

    /// Some calibration entries failed; the others were written.
    #[error("{0} calibration entr{suffix} failed", suffix = if *.0 == 1 { "y" } else { "ies" })]
    PartialFailure(usize),
}

impl CliError {
    /// 1 for computation failures, 2 for usage and input/output problems.
    pub fn exit_code(&self) -> ExitCode {
        let code = match self {
            CliError::Usage(_) => 2,
            CliError::PartialFailure(_) => 1,
            CliError::Core(e) => match e {
                Error::Io { .. }
                | Error::Csv(_)
                | Error::Json(_)
                | Error::Schema(_)
                | Error::Row { .. }
                | Error::Dimension { .. }
                | Error::Parameter(_) => 2,
                _ => 1,
            },
        };
        ExitCode::from(code)
    }
}
