use serde_json::{json, Map, Value};

/// Process exit codes.
pub mod exit {
    pub const OK: i32 = 0;
    pub const USAGE: i32 = 1;
    pub const INPUT: i32 = 2;
    pub const PRECONDITION: i32 = 3;
    pub const VERIFICATION: i32 = 4;
    pub const SIZE_GUARD: i32 = 5;
}

/// A failure with its exit code and a machine-readable description, printed
/// as one JSON object on standard error.
#[derive(Debug, Clone)]
pub struct CliError {
    pub code: i32,
    pub kind: &'static str,
    pub message: String,
    pub detail: Map<String, Value>,
}

impl CliError {
    pub fn new(code: i32, kind: &'static str, message: impl Into<String>) -> Self {
        Self {
            code,
            kind,
            message: message.into(),
            detail: Map::new(),
        }
    }

    pub fn with(mut self, key: &str, value: impl Into<Value>) -> Self {
        self.detail.insert(key.to_string(), value.into());
        self
    }

    pub fn usage(message: impl Into<String>) -> Self {
        Self::new(exit::USAGE, "usage", message)
    }

    pub fn input(kind: &'static str, message: impl Into<String>) -> Self {
        Self::new(exit::INPUT, kind, message)
    }

    pub fn io(path: &str, err: std::io::Error) -> Self {
        Self::input("io", format!("{path}: {err}")).with("path", path)
    }

    pub fn json(path: &str, err: &serde_json::Error) -> Self {
        Self::input("parse", format!("{path}: {err}"))
            .with("path", path)
            .with("line", err.line())
            .with("column", err.column())
    }

    pub fn to_json(&self) -> Value {
        let mut obj = Map::new();
        obj.insert("error".into(), json!(self.kind));
        obj.insert("message".into(), json!(self.message));
        obj.insert("exit_code".into(), json!(self.code));
        obj.extend(self.detail.clone());
        Value::Object(obj)
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.message)
    }
}

impl std::error::Error for CliError {}

impl From<bmfni::Error> for CliError {
    fn from(err: bmfni::Error) -> Self {
        use bmfni::Error as E;
        let message = err.to_string();
        match err {
            E::Invalid(violations) => {
                let list: Vec<Value> = violations
                    .iter()
                    .map(|v| json!({ "arc": v.arc, "reason": v.reason }))
                    .collect();
                CliError::input("validation", message).with("violations", list)
            }
            E::Sp(sp) => {
                let e = CliError::input("graph", message);
                match sp {
                    bmfni::sp::SpError::Syntax { pos, .. } | bmfni::sp::SpError::UnaryComposition { pos } => {
                        e.with("position", pos)
                    }
                    _ => e,
                }
            }
            E::MissingTerminal(_) | E::Overflow(_) => CliError::input("validation", message),
            E::NonUnitCosts { .. } | E::NotParallelGraph => CliError::new(exit::PRECONDITION, "precondition", message),
            E::TooLarge { .. } => CliError::new(exit::SIZE_GUARD, "too_large", message),
            E::InvalidParameter(_) => CliError::usage(message),
        }
    }
}

pub type CliResult<T> = Result<T, CliError>;
