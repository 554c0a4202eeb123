use alloc::vec::Vec;
use core::hash::BuildHasher;

use hashbrown::{DefaultHashBuilder, HashTable};

use super::Key;

/// Keys stored once in insertion order, with a hash index into them.
#[derive(Clone, Default)]
pub(crate) struct KeyIndex {
    keys: Vec<Key>,
    table: HashTable<u32>,
    hasher: DefaultHashBuilder,
}

impl KeyIndex {
    /// Inserts `key` if absent; returns its index and whether it was new.
    pub(crate) fn insert(&mut self, key: Key) -> (usize, bool) {
        if let Some(i) = self.find(&key) {
            return (i, false);
        }
        let idx = self.keys.len() as u32;
        let h = self.hasher.hash_one(key.as_slice());
        let (keys, hasher) = (&self.keys, &self.hasher);
        self.table
            .insert_unique(h, idx, |&j| hasher.hash_one(keys[j as usize].as_slice()));
        self.keys.push(key);
        (idx as usize, true)
    }

    pub(crate) fn find(&self, key: &[u8]) -> Option<usize> {
        let h = self.hasher.hash_one(key);
        self.table
            .find(h, |&j| self.keys[j as usize].as_slice() == key)
            .map(|&j| j as usize)
    }

    pub(crate) fn key(&self, i: usize) -> &Key {
        &self.keys[i]
    }

    pub(crate) fn len(&self) -> usize {
        self.keys.len()
    }
}
