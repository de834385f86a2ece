//! Versioned JSON envelope shared by every command.

use std::cell::{Cell, RefCell};
use std::io::Write;

use serde::ser::{Serialize, Serializer};

use crate::config::RunConfig;
use crate::error::CliError;

pub const SCHEMA_VERSION: u32 = 1;
pub const TOOL: &str = "flute";

#[derive(serde::Serialize)]
pub struct Envelope<'a, R: Serialize> {
    pub schema_version: u32,
    pub tool: &'static str,
    pub version: &'static str,
    pub command: &'a str,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub generated_at: Option<String>,
    pub config: &'a RunConfig,
    pub result: R,
}

impl<'a, R: Serialize> Envelope<'a, R> {
    pub fn new(command: &'a str, config: &'a RunConfig, result: R, timestamp: bool) -> Self {
        Envelope {
            schema_version: SCHEMA_VERSION,
            tool: TOOL,
            version: env!("CARGO_PKG_VERSION"),
            command,
            generated_at: timestamp.then(|| {
                chrono::Utc::now().to_rfc3339_opts(chrono::SecondsFormat::Secs, true)
            }),
            config,
            result,
        }
    }

    /// Pretty JSON with a trailing newline.
    pub fn write_to(&self, out: &mut dyn Write) -> Result<(), CliError> {
        serde_json::to_writer_pretty(&mut *out, self)
            .map_err(|e| CliError::Io(e.to_string()))?;
        out.write_all(b"\n")?;
        out.flush()?;
        Ok(())
    }
}

/// Serializes an iterator as a JSON array as it is consumed, counting items.
pub struct Streamed<I> {
    items: RefCell<Option<I>>,
    count: Cell<usize>,
}

impl<I> Streamed<I> {
    pub fn new(items: I) -> Self {
        Streamed {
            items: RefCell::new(Some(items)),
            count: Cell::new(0),
        }
    }

    pub fn count(&self) -> usize {
        self.count.get()
    }
}

impl<I, T> Serialize for Streamed<I>
where
    I: Iterator<Item = T>,
    T: Serialize,
{
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let items = self.items.borrow_mut().take();
        let counter = &self.count;
        s.collect_seq(items.into_iter().flatten().inspect(|_| counter.set(counter.get() + 1)))
    }
}

/// Serializes as the item count of a [`Streamed`] array written before it.
pub struct CountOf<'a, I>(pub &'a Streamed<I>);

impl<I> Serialize for CountOf<'_, I> {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_u64(self.0.count() as u64)
    }
}
