use std::io::Write;

use clap::ValueEnum;
use serde::Serialize;

use crate::CliError;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, ValueEnum)]
pub enum Format {
    #[default]
    Human,
    /// Line-delimited JSON.
    Machine,
}

pub(crate) struct Sink<'a> {
    format: Format,
    out: &'a mut dyn Write,
}

impl<'a> Sink<'a> {
    pub fn new(format: Format, out: &'a mut dyn Write) -> Self {
        Sink { format, out }
    }

    /// One record: `human` text in human mode, `doc` as a single JSON line
    /// otherwise.
    pub fn record<T: Serialize>(&mut self, doc: &T, human: impl FnOnce() -> String) -> Result<(), CliError> {
        match self.format {
            Format::Human => writeln!(self.out, "{}", human())?,
            Format::Machine => {
                let line = serde_json::to_string(doc).map_err(|e| CliError::input(e.to_string()))?;
                writeln!(self.out, "{line}")?;
            }
        }
        Ok(())
    }

    /// Text shown only in human mode.
    pub fn note(&mut self, text: impl AsRef<str>) -> Result<(), CliError> {
        if self.format == Format::Human {
            writeln!(self.out, "{}", text.as_ref())?;
        }
        Ok(())
    }
}
