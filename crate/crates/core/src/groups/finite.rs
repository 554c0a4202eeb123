use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use crate::error::{Error, Result};

/// A finite group given by its multiplication table.
///
/// Entry `table[i * order + j]` is the index of `names[i] * names[j]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FiniteTable {
    names: Vec<String>,
    table: Vec<u32>,
    identity: u32,
    inverse: Vec<u32>,
}

impl FiniteTable {
    /// Validates a Cayley table: square, Latin, with a two-sided identity and
    /// associative (checked exhaustively up to order 96, on a fixed sample of
    /// triples above that).
    pub fn new(names: Vec<String>, rows: Vec<Vec<u32>>) -> Result<Self> {
        let n = names.len();
        if n == 0 {
            return Err(Error::usage("finite group table is empty"));
        }
        if rows.len() != n || rows.iter().any(|r| r.len() != n) {
            return Err(Error::usage(format!(
                "multiplication table must be {n}x{n}"
            )));
        }
        for (i, a) in names.iter().enumerate() {
            if names[..i].contains(a) {
                return Err(Error::usage(format!("duplicate element name {a:?}")));
            }
        }
        let table: Vec<u32> = rows.into_iter().flatten().collect();
        if table.iter().any(|&v| v as usize >= n) {
            return Err(Error::usage("table entry out of range"));
        }
        let mut seen = alloc::vec![false; n];
        for i in 0..n {
            for (what, line) in [("row", true), ("column", false)] {
                seen.iter_mut().for_each(|s| *s = false);
                for j in 0..n {
                    let v = if line { table[i * n + j] } else { table[j * n + i] };
                    if core::mem::replace(&mut seen[v as usize], true) {
                        return Err(Error::usage(format!(
                            "{what} {} of the table is not a permutation",
                            names[i]
                        )));
                    }
                }
            }
        }
        let identity = (0..n)
            .find(|&e| (0..n).all(|j| table[e * n + j] as usize == j && table[j * n + e] as usize == j))
            .ok_or_else(|| Error::usage("table has no identity element"))? as u32;
        let mul = |a: usize, b: usize| table[a * n + b] as usize;
        let check = |a: usize, b: usize, c: usize| mul(mul(a, b), c) == mul(a, mul(b, c));
        let associative = if n <= 96 {
            (0..n).all(|a| (0..n).all(|b| (0..n).all(|c| check(a, b, c))))
        } else {
            let mut state = 0x9e37_79b9_7f4a_7c15u64;
            (0..200_000).all(|_| {
                let mut next = || {
                    state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
                    (state >> 33) as usize % n
                };
                let (a, b, c) = (next(), next(), next());
                check(a, b, c)
            })
        };
        if !associative {
            return Err(Error::usage("multiplication table is not associative"));
        }
        let inverse = (0..n)
            .map(|a| (0..n).find(|&b| mul(a, b) == identity as usize).unwrap() as u32)
            .collect();
        Ok(FiniteTable {
            names,
            table,
            identity,
            inverse,
        })
    }

    /// The cyclic group Z/n with elements named `0..n`.
    pub fn cyclic(n: usize) -> Result<Self> {
        let names = (0..n).map(|i| i.to_string()).collect();
        let rows = (0..n)
            .map(|i| (0..n).map(|j| ((i + j) % n) as u32).collect())
            .collect();
        FiniteTable::new(names, rows)
    }

    pub fn order(&self) -> usize {
        self.names.len()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn identity(&self) -> u32 {
        self.identity
    }

    pub fn mul(&self, a: u32, b: u32) -> u32 {
        self.table[a as usize * self.order() + b as usize]
    }

    pub fn inv(&self, a: u32) -> u32 {
        self.inverse[a as usize]
    }

    pub fn index_of(&self, name: &str) -> Option<u32> {
        self.names.iter().position(|n| n == name).map(|i| i as u32)
    }

    pub(crate) fn fingerprint(&self) -> u64 {
        let mut h = super::Fnv::default();
        for name in &self.names {
            h.write(name.as_bytes());
            h.write(&[0]);
        }
        for v in &self.table {
            h.write(&v.to_le_bytes());
        }
        h.finish()
    }
}
