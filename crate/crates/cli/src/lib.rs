//! Library side of the `hamel` command: argument handling, definition
//! files, certificate envelopes, reports and the independent verifier.

pub mod args;
pub mod commands;
pub mod definition;
pub mod envelope;
pub mod report;
pub mod verify;

use hamel_core::Error;

pub const EXIT_OK: i32 = 0;
pub const EXIT_UNDECIDABLE: i32 = 2;
pub const EXIT_INVALID_INPUT: i32 = 3;
pub const EXIT_CHECK_FAILED: i32 = 4;

#[derive(Debug)]
pub enum CliError {
    Core(Error),
    Input(String),
    /// A probe verdict or a verifier re-check failed.
    CheckFailed(String),
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Core(e)
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Core(e) => write!(f, "{e}"),
            CliError::Input(msg) => write!(f, "invalid input: {msg}"),
            CliError::CheckFailed(msg) => write!(f, "check failed: {msg}"),
        }
    }
}

impl std::error::Error for CliError {}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Core(Error::Undecidable { .. } | Error::EvalDepthExceeded { .. }) => EXIT_UNDECIDABLE,
            CliError::Core(_) | CliError::Input(_) => EXIT_INVALID_INPUT,
            CliError::CheckFailed(_) => EXIT_CHECK_FAILED,
        }
    }

    /// Machine-readable error payload for stderr.
    pub fn payload(&self) -> serde_json::Value {
        let mut v = serde_json::json!({
            "exit_code": self.exit_code(),
            "message": self.to_string(),
        });
        if let CliError::Core(Error::Undecidable { left, right, max_bits }) = self {
            v["kind"] = "undecidable".into();
            v["left"] = left.clone().into();
            v["right"] = right.clone().into();
            v["max_bits"] = (*max_bits).into();
        }
        v
    }
}

/// Parses `args` (program name first), runs the command, and returns the
/// process exit code. Output goes to `out`; diagnostics to stderr.
pub fn run_from_args<I, T>(args: I, out: &mut dyn std::io::Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    use clap::Parser;
    let cli = match args::Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INVALID_INPUT } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    match commands::run(&cli, out) {
        Ok(()) => EXIT_OK,
        Err(e) => {
            eprintln!("{}", e.payload());
            e.exit_code()
        }
    }
}
