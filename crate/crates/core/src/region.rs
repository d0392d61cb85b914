use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A set of qubits (equivalently, connectivity-graph vertices), kept sorted and
/// duplicate-free.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Region(Vec<usize>);

impl Region {
    pub fn new<I: IntoIterator<Item = usize>>(members: I) -> Self {
        let mut v: Vec<usize> = members.into_iter().collect();
        v.sort_unstable();
        v.dedup();
        Region(v)
    }

    pub fn empty() -> Self {
        Region(Vec::new())
    }

    pub fn all(n: usize) -> Self {
        Region((0..n).collect())
    }

    /// Builds a region from a bitmask over the first 64 vertices.
    pub fn from_mask(mask: u64) -> Self {
        Region((0..64).filter(|i| mask >> i & 1 == 1).collect())
    }

    pub fn members(&self) -> &[usize] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn contains(&self, v: usize) -> bool {
        self.0.binary_search(&v).is_ok()
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.0.iter().copied()
    }

    /// Errors if any member is `>= n`.
    pub fn check_within(&self, n: usize) -> Result<()> {
        match self.0.last() {
            Some(&max) if max >= n => {
                Err(Error::Input(format!("region member {max} out of range for n={n}")))
            }
            _ => Ok(()),
        }
    }

    pub fn complement(&self, n: usize) -> Region {
        let mut inside = vec![false; n];
        for &v in &self.0 {
            if v < n {
                inside[v] = true;
            }
        }
        Region((0..n).filter(|&v| !inside[v]).collect())
    }

    pub fn union(&self, other: &Region) -> Region {
        Region::new(self.iter().chain(other.iter()))
    }

    pub fn intersection(&self, other: &Region) -> Region {
        Region(self.iter().filter(|&v| other.contains(v)).collect())
    }

    pub fn difference(&self, other: &Region) -> Region {
        Region(self.iter().filter(|&v| !other.contains(v)).collect())
    }

    pub fn is_subset(&self, other: &Region) -> bool {
        self.iter().all(|v| other.contains(v))
    }

    pub fn is_disjoint(&self, other: &Region) -> bool {
        self.iter().all(|v| !other.contains(v))
    }

    pub fn into_vec(self) -> Vec<usize> {
        self.0
    }
}

impl FromIterator<usize> for Region {
    fn from_iter<I: IntoIterator<Item = usize>>(iter: I) -> Self {
        Region::new(iter)
    }
}

impl From<Vec<usize>> for Region {
    fn from(v: Vec<usize>) -> Self {
        Region::new(v)
    }
}

impl<const N: usize> From<[usize; N]> for Region {
    fn from(v: [usize; N]) -> Self {
        Region::new(v)
    }
}
