//! Cycle types: the common shape of permutation cycle structures and
//! polynomial factorization types.

use serde::Serialize;
use std::collections::BTreeMap;
use std::fmt;

/// Multiset {length -> multiplicity} with positive multiplicities. Encodes a
/// permutation's cycle lengths or the degrees (with multiplicity) of a monic
/// polynomial's irreducible factors.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug, Serialize, Default)]
pub struct CycleType {
    parts: BTreeMap<usize, usize>,
}

impl CycleType {
    pub fn new() -> CycleType {
        CycleType::default()
    }

    pub fn from_parts(parts: impl IntoIterator<Item = (usize, usize)>) -> CycleType {
        let mut ct = CycleType::new();
        for (len, mult) in parts {
            ct.add(len, mult);
        }
        ct
    }

    pub fn add(&mut self, len: usize, mult: usize) {
        assert!(len >= 1, "cycle length must be positive");
        if mult > 0 {
            *self.parts.entry(len).or_insert(0) += mult;
        }
    }

    /// Multiplicity of `len` (0 when absent).
    pub fn mult(&self, len: usize) -> usize {
        self.parts.get(&len).copied().unwrap_or(0)
    }

    pub fn parts(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.parts.iter().map(|(&l, &m)| (l, m))
    }

    /// Total size n = sum of i * m_i.
    pub fn n(&self) -> usize {
        self.parts.iter().map(|(&l, &m)| l * m).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.parts.is_empty()
    }

    /// Drops all parts of length < r (the push-forward to sequences indexed
    /// from r on).
    pub fn restrict(&self, r: usize) -> CycleType {
        CycleType {
            parts: self
                .parts
                .iter()
                .filter(|(&l, _)| l >= r)
                .map(|(&l, &m)| (l, m))
                .collect(),
        }
    }
}

impl fmt::Display for CycleType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, (l, m)) in self.parts().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{l}:{m}")?;
        }
        write!(f, "}}")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn basics() {
        let ct = CycleType::from_parts([(1, 2), (3, 1)]);
        assert_eq!(ct.n(), 5);
        assert_eq!(ct.restrict(2), CycleType::from_parts([(3, 1)]));
        assert_eq!(ct.restrict(1), ct);
        assert_eq!(ct.to_string(), "{1:2, 3:1}");
    }
}
