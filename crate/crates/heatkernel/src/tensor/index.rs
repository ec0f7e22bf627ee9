//! Abstract tensor indices.
//!
//! An index is either free (an open output slot, named a, b, c, ... in the
//! term grammar) or a dummy (a contracted pair, named i, j, p, q, ...).
//! Variance is not tracked: the metric is explicit in the term algebra, and
//! raising/lowering is free, so an index's identity is (free, id) only.
//! The derived ordering deliberately sorts dummies before frees — canonical
//! forms prefer contracted slots leftmost.

use std::fmt;

pub const FREE_NAMES: [&str; 6] = ["a", "b", "c", "d", "e", "f"];
pub const DUMMY_NAMES: [&str; 7] = ["i", "j", "p", "q", "u", "v", "w"];

#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct Index {
    /// False: contracted dummy; true: free output index.
    pub free: bool,
    pub id: u32,
}

impl Index {
    pub fn free(id: u32) -> Self {
        Index { free: true, id }
    }

    pub fn dummy(id: u32) -> Self {
        Index { free: false, id }
    }

    pub fn display_name(&self) -> String {
        let (pool, overflow_prefix): (&[&str], &str) = if self.free {
            (&FREE_NAMES, "x")
        } else {
            (&DUMMY_NAMES, "i")
        };
        match pool.get(self.id as usize) {
            Some(name) => (*name).to_string(),
            None => format!("{overflow_prefix}{}", self.id),
        }
    }

    /// Inverse of display_name over both pools.
    pub fn parse_name(name: &str) -> Option<Index> {
        if let Some(pos) = FREE_NAMES.iter().position(|n| *n == name) {
            return Some(Index::free(pos as u32));
        }
        if let Some(pos) = DUMMY_NAMES.iter().position(|n| *n == name) {
            return Some(Index::dummy(pos as u32));
        }
        if let Some(rest) = name.strip_prefix('x') {
            if let Ok(id) = rest.parse::<u32>() {
                if id >= FREE_NAMES.len() as u32 {
                    return Some(Index::free(id));
                }
            }
        }
        if let Some(rest) = name.strip_prefix('i') {
            if let Ok(id) = rest.parse::<u32>() {
                if id >= DUMMY_NAMES.len() as u32 {
                    return Some(Index::dummy(id));
                }
            }
        }
        None
    }
}

impl fmt::Display for Index {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.display_name())
    }
}
