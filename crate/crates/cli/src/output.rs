use std::fmt;
use std::fs;
use std::path::Path;
use std::time::{SystemTime, UNIX_EPOCH};

use serde::Serialize;

use nonlocal_core::Error;

use crate::Global;

/// Errors with their process exit codes: 2 for budget refusals, 3 for
/// invalid input, 1 for everything else.
#[derive(Debug)]
pub enum CliError {
    Core(Error),
    Input(String),
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Core(Error::Budget { .. }) => 2,
            CliError::Core(Error::Shape(_) | Error::Invalid(_) | Error::Infeasible(_) | Error::Json(_)) => 3,
            CliError::Input(_) => 3,
            CliError::Core(Error::Numerical(_)) | CliError::Io(_) => 1,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Core(e) => write!(f, "{e}"),
            CliError::Input(s) | CliError::Io(s) => f.write_str(s),
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Core(e)
    }
}

pub type CliResult<T = ()> = Result<T, CliError>;

pub fn read_input(path: &Path) -> CliResult<String> {
    fs::read_to_string(path).map_err(|e| CliError::Input(format!("cannot read {}: {e}", path.display())))
}

#[derive(Serialize)]
struct Meta {
    tool: &'static str,
    version: &'static str,
    created_unix: u64,
}

#[derive(Serialize)]
struct Envelope<'a, P: Serialize, R: Serialize> {
    command: &'a str,
    params: P,
    result: R,
    #[serde(skip_serializing_if = "Option::is_none")]
    meta: Option<Meta>,
}

#[derive(Serialize)]
struct Params<'a, A: Serialize> {
    global: &'a Global,
    #[serde(flatten)]
    args: &'a A,
}

/// Serializes `{command, params, result, meta}` and writes it to `--out` or
/// standard output. `summary` goes to standard output when `--out` is set.
pub fn emit<A: Serialize, R: Serialize>(global: &Global, command: &str, args: &A, result: &R, summary: &str) -> CliResult {
    let meta = (!global.no_meta).then(|| Meta {
        tool: "nonlocal",
        version: env!("CARGO_PKG_VERSION"),
        created_unix: SystemTime::now().duration_since(UNIX_EPOCH).map_or(0, |d| d.as_secs()),
    });
    let doc = Envelope {
        command,
        params: Params { global, args },
        result,
        meta,
    };
    let text = serde_json::to_string_pretty(&doc).map_err(|e| CliError::Io(format!("serializing report: {e}")))?;
    write_text(global, &text, summary)
}

/// Writes a bare document (tensor files are read back by other commands).
pub fn emit_raw(global: &Global, text: &str, summary: &str) -> CliResult {
    write_text(global, text, summary)
}

fn write_text(global: &Global, text: &str, summary: &str) -> CliResult {
    match &global.out {
        Some(path) => {
            fs::write(path, format!("{text}\n")).map_err(|e| CliError::Io(format!("cannot write {}: {e}", path.display())))?;
            println!("{summary}");
        }
        None => println!("{text}"),
    }
    Ok(())
}
