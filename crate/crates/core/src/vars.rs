//! Variable registry: a fixed, ordered list of variable names.
//!
//! Every polynomial carries a shared handle to its registry; exponent
//! vectors are positional against it. Mixing registries is a usage
//! error surfaced by [`crate::poly`], not silently reconciled.

use std::collections::HashMap;
use std::sync::Arc;

#[derive(Debug)]
pub struct VarRegistry {
    names: Vec<String>,
    index: HashMap<String, usize>,
}

impl VarRegistry {
    /// Builds a registry. Panics on duplicate or empty names: registries
    /// are constructed from code or validated input, never raw text.
    pub fn new<S: Into<String>>(names: Vec<S>) -> Arc<Self> {
        let names: Vec<String> = names.into_iter().map(Into::into).collect();
        let mut index = HashMap::new();
        for (i, n) in names.iter().enumerate() {
            assert!(!n.is_empty(), "empty variable name");
            assert!(index.insert(n.clone(), i).is_none(), "duplicate variable `{n}`");
        }
        Arc::new(VarRegistry { names, index })
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn name(&self, i: usize) -> &str {
        &self.names[i]
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.index.get(name).copied()
    }

    /// Same variables in the same order.
    pub fn same_as(&self, other: &VarRegistry) -> bool {
        std::ptr::eq(self, other) || self.names == other.names
    }
}
