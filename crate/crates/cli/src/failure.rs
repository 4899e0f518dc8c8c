use std::fmt;
use std::path::Path;

/// A failed invocation, classified by exit code.
#[derive(Debug)]
pub enum Failure {
    /// Bad flags or flag combinations. Exit code 2.
    Usage(String),
    /// A library precondition rejected the inputs. Exit code 3.
    Precondition(String),
    /// Reading or writing a file failed. Exit code 4.
    Io(String),
}

impl Failure {
    pub fn code(&self) -> i32 {
        match self {
            Failure::Usage(_) => 2,
            Failure::Precondition(_) => 3,
            Failure::Io(_) => 4,
        }
    }

    pub fn usage(msg: impl Into<String>) -> Self {
        Failure::Usage(msg.into())
    }

    /// A library error raised while handling the file at `path`.
    pub fn at(path: &Path, e: semivalue::Error) -> Self {
        match Failure::from(e) {
            Failure::Io(m) => Failure::Io(format!("{}: {m}", path.display())),
            Failure::Precondition(m) => Failure::Precondition(format!("{}: {m}", path.display())),
            usage => usage,
        }
    }
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Failure::Usage(m) | Failure::Precondition(m) | Failure::Io(m) => f.write_str(m),
        }
    }
}

impl From<semivalue::Error> for Failure {
    fn from(e: semivalue::Error) -> Self {
        if e.is_io() {
            Failure::Io(e.to_string())
        } else {
            Failure::Precondition(e.to_string())
        }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Io(e.to_string())
    }
}

pub type CliResult<T> = Result<T, Failure>;
