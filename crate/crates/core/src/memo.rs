use std::collections::HashMap;
use std::hash::Hash;
use std::sync::{Arc, RwLock};

use crate::error::Result;

/// Thread-safe memo table. Two threads racing on the same key may both
/// compute the value; the first insert wins.
#[derive(Debug)]
pub(crate) struct Memo<K, V> {
    table: RwLock<HashMap<K, Arc<V>>>,
}

impl<K: Eq + Hash + Clone, V> Memo<K, V> {
    pub(crate) fn new() -> Self {
        Memo {
            table: RwLock::new(HashMap::new()),
        }
    }

    pub(crate) fn get_or_try(&self, key: &K, make: impl FnOnce() -> Result<V>) -> Result<Arc<V>> {
        if let Some(v) = self.table.read().expect("memo poisoned").get(key) {
            return Ok(Arc::clone(v));
        }
        let v = Arc::new(make()?);
        let mut w = self.table.write().expect("memo poisoned");
        Ok(Arc::clone(w.entry(key.clone()).or_insert(v)))
    }
}

impl<K: Eq + Hash + Clone, V> Default for Memo<K, V> {
    fn default() -> Self {
        Self::new()
    }
}
