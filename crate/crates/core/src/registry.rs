//! Name-keyed registry of interchangeable strategy implementations.

use crate::error::{Error, Result};

/// Anything that can be registered and looked up by name.
pub trait Named {
    fn name(&self) -> &'static str;
}

pub struct Registry<T: ?Sized + Named> {
    what: &'static str,
    entries: Vec<Box<T>>,
}

impl<T: ?Sized + Named> Registry<T> {
    /// `what` names the strategy family in lookup errors, e.g. `"EER method"`.
    pub fn new(what: &'static str) -> Self {
        Self {
            what,
            entries: Vec::new(),
        }
    }

    /// Adds `entry`, replacing any existing entry with the same name.
    pub fn register(&mut self, entry: Box<T>) {
        self.entries.retain(|e| e.name() != entry.name());
        self.entries.push(entry);
    }

    /// Case-insensitive lookup.
    pub fn get(&self, name: &str) -> Result<&T> {
        self.entries
            .iter()
            .find(|e| e.name().eq_ignore_ascii_case(name))
            .map(|e| e.as_ref())
            .ok_or_else(|| Error::UnknownStrategy {
                registry: self.what,
                name: name.to_owned(),
                available: self.names().join(", "),
            })
    }

    pub fn names(&self) -> Vec<&'static str> {
        self.entries.iter().map(|e| e.name()).collect()
    }

    pub fn iter(&self) -> impl Iterator<Item = &T> {
        self.entries.iter().map(|e| e.as_ref())
    }
}
