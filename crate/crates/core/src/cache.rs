use std::collections::HashMap;
use std::hash::Hash;
use std::sync::{Arc, Mutex, OnceLock};

/// Map whose values are computed at most once per key, even under concurrent access.
pub(crate) struct OnceMap<K, V> {
    cells: Mutex<HashMap<K, Arc<OnceLock<V>>>>,
}

impl<K, V> Default for OnceMap<K, V> {
    fn default() -> Self {
        OnceMap { cells: Mutex::new(HashMap::new()) }
    }
}

impl<K: Eq + Hash + Clone, V: Clone> OnceMap<K, V> {
    pub fn get_or_init(&self, key: &K, init: impl FnOnce() -> V) -> V {
        let cell = {
            let mut cells = self.cells.lock().unwrap();
            match cells.get(key) {
                Some(c) => c.clone(),
                None => {
                    let c = Arc::new(OnceLock::new());
                    cells.insert(key.clone(), c.clone());
                    c
                }
            }
        };
        cell.get_or_init(init).clone()
    }
}
