use serde_json::{json, Value};
use subsys_core::Error;
use thiserror::Error as ThisError;

/// Exit status for bad input: unparsable files, keys, symbols or parameters.
pub const EXIT_PARSE: i32 = 2;
/// Exit status when a result could not be certified; the report is still printed.
pub const EXIT_UNCERTIFIED: i32 = 3;
/// Exit status when an internal invariant check failed.
pub const EXIT_INVARIANT: i32 = 4;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Status {
    Ok,
    Uncertified,
    Invariant,
}

impl Status {
    pub fn code(self) -> i32 {
        match self {
            Status::Ok => 0,
            Status::Uncertified => EXIT_UNCERTIFIED,
            Status::Invariant => EXIT_INVARIANT,
        }
    }

    fn name(self) -> &'static str {
        match self {
            Status::Ok => "ok",
            Status::Uncertified => "uncertified",
            Status::Invariant => "invariant-violation",
        }
    }

    /// The worse of two statuses.
    pub fn and(self, o: Status) -> Status {
        if self.code() >= o.code() { self } else { o }
    }
}

#[derive(Debug, ThisError)]
pub enum CliError {
    #[error(transparent)]
    Core(#[from] Error),
    #[error("{path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("{0}")]
    Usage(String),
}

impl CliError {
    pub fn code(&self) -> i32 {
        match self {
            CliError::Core(e) => match e {
                Error::Uncertified(_) | Error::RootFinding(_) | Error::DegreeBound(..) | Error::Singular => {
                    EXIT_UNCERTIFIED
                }
                Error::Invariant(_) => EXIT_INVARIANT,
                _ => EXIT_PARSE,
            },
            CliError::Io { .. } | CliError::Usage(_) => EXIT_PARSE,
        }
    }
}

impl From<subsys_core::ParseError> for CliError {
    fn from(e: subsys_core::ParseError) -> Self {
        CliError::Core(e.into())
    }
}

/// One command's outcome in both renderings. Nondeterministic commands
/// record their seed and numeric verdicts their tolerance.
#[derive(Clone, Debug)]
pub struct Report {
    pub command: String,
    pub seed: Option<u64>,
    pub tolerance: Option<f64>,
    pub status: Status,
    pub result: Value,
    pub text: String,
}

impl Report {
    pub fn new(command: &str, result: Value, text: String) -> Self {
        Report { command: command.to_string(), seed: None, tolerance: None, status: Status::Ok, result, text }
    }

    pub fn seed(mut self, seed: u64) -> Self {
        self.seed = Some(seed);
        self
    }

    pub fn tolerance(mut self, tol: Option<f64>) -> Self {
        self.tolerance = tol;
        self
    }

    pub fn status(mut self, status: Status) -> Self {
        self.status = status;
        self
    }

    pub fn to_json(&self) -> Value {
        json!({
            "command": self.command,
            "seed": self.seed,
            "tolerance": self.tolerance,
            "status": self.status.name(),
            "result": self.result,
        })
    }

    /// Header lines start with `#`, so a report whose body is a system file
    /// is itself a readable system file.
    pub fn to_text(&self) -> String {
        let mut out = format!("# subsys {}\n", self.command);
        if let Some(s) = self.seed {
            out += &format!("# seed {s}\n");
        }
        if let Some(t) = self.tolerance {
            out += &format!("# tolerance {t:e}\n");
        }
        if self.status != Status::Ok {
            out += &format!("# status {}\n", self.status.name());
        }
        out += &self.text;
        if !out.ends_with('\n') {
            out.push('\n');
        }
        out
    }

    pub fn render(&self, json: bool) -> String {
        if json {
            serde_json::to_string_pretty(&self.to_json()).expect("values serialise") + "\n"
        } else {
            self.to_text()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn error_codes() {
        assert_eq!(CliError::from(Error::Invariant("x".into())).code(), EXIT_INVARIANT);
        assert_eq!(CliError::from(Error::Uncertified("x".into())).code(), EXIT_UNCERTIFIED);
        assert_eq!(CliError::from(Error::ExactOnly).code(), EXIT_PARSE);
        assert_eq!(Status::Uncertified.and(Status::Invariant), Status::Invariant);
        assert_eq!(Status::Ok.and(Status::Uncertified).code(), EXIT_UNCERTIFIED);
    }

    #[test]
    fn text_header_is_commented() {
        let r = Report::new("defect -", Value::Null, "defect 0".into()).seed(4).tolerance(Some(1e-6));
        assert_eq!(r.to_text(), "# subsys defect -\n# seed 4\n# tolerance 1e-6\ndefect 0\n");
    }
}
