use std::collections::BTreeMap;

use crate::error::{Error, Result};

/// Name → factory table for one family of interchangeable strategies.
pub struct Registry<F> {
    kind: &'static str,
    factories: BTreeMap<&'static str, F>,
}

impl<F> Registry<F> {
    pub fn new(kind: &'static str) -> Self {
        Registry {
            kind,
            factories: BTreeMap::new(),
        }
    }

    /// Adds or replaces the factory registered under `name`.
    pub fn register(&mut self, name: &'static str, factory: F) -> &mut Self {
        self.factories.insert(name, factory);
        self
    }

    pub fn get(&self, name: &str) -> Result<&F> {
        self.factories
            .get(name)
            .ok_or_else(|| Error::UnknownStrategy {
                kind: self.kind,
                name: name.to_owned(),
                available: self.names().collect::<Vec<_>>().join(", "),
            })
    }

    pub fn names(&self) -> impl Iterator<Item = &'static str> + '_ {
        self.factories.keys().copied()
    }

    pub fn contains(&self, name: &str) -> bool {
        self.factories.contains_key(name)
    }
}
