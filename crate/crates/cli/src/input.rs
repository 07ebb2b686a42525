use std::fs;
use std::path::Path;

use serde::de::DeserializeOwned;
use serde_json::{Map, Value};

use crate::CliError;

/// Load the JSON object in `path` (if any) and apply inline overrides on top.
///
/// Each override that replaces a different file value is returned as a note so the caller
/// can report it.
pub fn merged_params(
    path: Option<&Path>,
    inline: &[(String, String)],
) -> Result<(Map<String, Value>, Vec<String>), CliError> {
    let mut map = match path {
        Some(p) => {
            let text = fs::read_to_string(p)
                .map_err(|e| CliError::Input(format!("cannot read {}: {e}", p.display())))?;
            match serde_json::from_str::<Value>(&text) {
                Ok(Value::Object(m)) => m,
                Ok(_) => {
                    return Err(CliError::Input(format!(
                        "{}: top level must be a JSON object",
                        p.display()
                    )))
                }
                Err(e) => return Err(CliError::Input(format!("{}: {e}", p.display()))),
            }
        }
        None => Map::new(),
    };

    let mut notes = Vec::new();
    for (key, raw) in inline {
        let value = parse_inline(raw);
        if let Some(old) = map.get(key) {
            if *old != value {
                notes.push(format!(
                    "inline --{key} {value} overrides input file value {old}"
                ));
            }
        }
        map.insert(key.clone(), value);
    }
    Ok((map, notes))
}

/// Inline values are JSON when they parse as JSON and plain strings otherwise, so
/// `--alpha 0.5`, `--L [1,-2]` and `--objective MaxLambda` all work.
fn parse_inline(raw: &str) -> Value {
    serde_json::from_str(raw).unwrap_or_else(|_| Value::String(raw.to_string()))
}

/// Deserialize the command schema. Errors name the offending field.
pub fn decode<T: DeserializeOwned>(map: Map<String, Value>) -> Result<T, CliError> {
    serde_json::from_value(Value::Object(map)).map_err(|e| CliError::Input(e.to_string()))
}
