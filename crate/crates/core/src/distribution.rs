use std::collections::BTreeMap;
use std::fmt;
use std::io::{self, Write};

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive, Zero};

/// Sparse map from degree to number of vertices with that degree.
///
/// Zero counts are never stored. Degree 0 is allowed so that measured
/// distributions can report isolated vertices.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct DegreeDistribution {
    entries: BTreeMap<BigUint, BigUint>,
}

impl DegreeDistribution {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_counts<I>(counts: I) -> Self
    where
        I: IntoIterator<Item = (u64, u64)>,
    {
        let mut dist = Self::new();
        for (d, c) in counts {
            dist.add(BigUint::from(d), BigUint::from(c));
        }
        dist
    }

    pub fn add(&mut self, degree: BigUint, count: BigUint) {
        if count.is_zero() {
            return;
        }
        *self.entries.entry(degree).or_default() += count;
    }

    /// Removes one vertex from `degree`. Returns false if no vertex has it.
    pub fn remove_one(&mut self, degree: &BigUint) -> bool {
        match self.entries.get_mut(degree) {
            Some(c) => {
                *c -= 1u32;
                if c.is_zero() {
                    self.entries.remove(degree);
                }
                true
            }
            None => false,
        }
    }

    /// Moves one vertex from `degree` to `degree - 1`.
    pub fn shift_one_down(&mut self, degree: &BigUint) -> bool {
        if degree.is_zero() || !self.remove_one(degree) {
            return false;
        }
        self.add(degree - 1u32, BigUint::one());
        true
    }

    pub fn count(&self, degree: &BigUint) -> BigUint {
        self.entries.get(degree).cloned().unwrap_or_default()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&BigUint, &BigUint)> {
        self.entries.iter()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Σ count, the number of vertices.
    pub fn total_vertices(&self) -> BigUint {
        self.entries.values().sum()
    }

    /// Σ degree·count, the number of stored adjacency entries.
    pub fn total_entries(&self) -> BigUint {
        self.entries.iter().map(|(d, c)| d * c).sum()
    }

    pub fn max_degree(&self) -> Option<&BigUint> {
        self.entries.keys().next_back()
    }

    /// Distribution of the Kronecker product: counts multiply at the product
    /// of the degrees, colliding products accumulate.
    pub fn kron(&self, other: &DegreeDistribution) -> DegreeDistribution {
        let mut out = DegreeDistribution::new();
        for (d1, c1) in &self.entries {
            for (d2, c2) in &other.entries {
                out.add(d1 * d2, c1 * c2);
            }
        }
        out
    }

    /// Entries that fit in `u64`, or `None` if any does not.
    pub fn to_u64_pairs(&self) -> Vec<(u64, u64)> {
        self.try_u64_pairs()
            .expect("distribution entries exceed u64")
    }

    pub fn try_u64_pairs(&self) -> Option<Vec<(u64, u64)>> {
        self.entries
            .iter()
            .map(|(d, c)| Some((d.to_u64()?, c.to_u64()?)))
            .collect()
    }

    /// Tab-separated `degree\tcount` lines sorted by degree.
    pub fn write_tsv<W: Write>(&self, mut w: W) -> io::Result<()> {
        for (d, c) in &self.entries {
            writeln!(w, "{d}\t{c}")?;
        }
        w.flush()
    }
}

impl fmt::Display for DegreeDistribution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, (d, c)) in self.entries.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{d}:{c}")?;
        }
        write!(f, "}}")
    }
}

impl FromIterator<(BigUint, BigUint)> for DegreeDistribution {
    fn from_iter<T: IntoIterator<Item = (BigUint, BigUint)>>(iter: T) -> Self {
        let mut dist = DegreeDistribution::new();
        for (d, c) in iter {
            dist.add(d, c);
        }
        dist
    }
}
