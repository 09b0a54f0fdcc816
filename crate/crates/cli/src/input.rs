use std::fs;
use std::io::{self, Read};
use std::path::Path;

use serde::de::DeserializeOwned;

use crate::CliError;

pub(crate) fn read_text(path: &Path) -> Result<String, CliError> {
    if path == Path::new("-") {
        let mut s = String::new();
        io::stdin()
            .read_to_string(&mut s)
            .map_err(|e| CliError::input(format!("stdin: {e}")))?;
        return Ok(s);
    }
    fs::read_to_string(path).map_err(|e| CliError::input(format!("{}: {e}", path.display())))
}

/// Parses `text` reporting the failing field path and position.
pub(crate) fn parse_doc<T: DeserializeOwned>(origin: &str, text: &str) -> Result<T, CliError> {
    let de = &mut serde_json::Deserializer::from_str(text);
    serde_path_to_error::deserialize(de).map_err(|e| {
        let path = e.path().to_string();
        let inner = e.into_inner();
        if path == "." {
            CliError::input(format!("{origin}: {inner}"))
        } else {
            CliError::input(format!("{origin}: field `{path}`: {inner}"))
        }
    })
}

pub(crate) fn load_doc<T: DeserializeOwned>(path: &Path) -> Result<T, CliError> {
    let origin = if path == Path::new("-") {
        "stdin".to_string()
    } else {
        path.display().to_string()
    };
    parse_doc(&origin, &read_text(path)?)
}
