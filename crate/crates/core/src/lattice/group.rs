use std::fmt;

use super::intmat::{self, IntMatrix};
use crate::error::{Error, Result};

/// A finitely generated abelian group `Zᵖ ⊕ Z/m₁ ⊕ … ⊕ Z/m_k`, used as the
/// character group of a compact abelian Lie group.
///
/// Elements are integer coordinate vectors of length `p + k`; the
/// torsion coordinates are kept in `[0, m_i)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct DualGroup {
    free_rank: usize,
    torsion: Vec<i64>,
}

impl DualGroup {
    pub fn new(free_rank: usize, torsion: Vec<i64>) -> Result<Self> {
        if let Some(m) = torsion.iter().find(|&&m| m < 2) {
            return Err(Error::InvalidGroup(format!(
                "torsion orders must be at least 2, found {m}"
            )));
        }
        Ok(Self { free_rank, torsion })
    }

    /// The free group `Zᵖ`, character group of the torus `Tᵖ`.
    pub fn free(p: usize) -> Self {
        Self {
            free_rank: p,
            torsion: Vec::new(),
        }
    }

    /// `Z/n`, character group of the cyclic group of order `n`.
    pub fn cyclic(n: i64) -> Result<Self> {
        Self::new(0, vec![n])
    }

    pub fn free_rank(&self) -> usize {
        self.free_rank
    }

    pub fn torsion(&self) -> &[i64] {
        &self.torsion
    }

    /// Number of presentation generators.
    pub fn dim(&self) -> usize {
        self.free_rank + self.torsion.len()
    }

    /// Order of the `i`-th generator, or `None` for free generators.
    pub fn generator_order(&self, i: usize) -> Option<i64> {
        i.checked_sub(self.free_rank).map(|k| self.torsion[k])
    }

    pub fn relations(&self) -> IntMatrix {
        let n = self.dim();
        self.torsion
            .iter()
            .enumerate()
            .map(|(k, &m)| {
                let mut row = vec![0; n];
                row[self.free_rank + k] = m;
                row
            })
            .collect()
    }

    pub fn check_element(&self, v: &[i64]) -> Result<()> {
        if v.len() != self.dim() {
            return Err(Error::Dimension {
                expected: self.dim(),
                found: v.len(),
            });
        }
        Ok(())
    }

    /// Reduce torsion coordinates into `[0, m_i)`.
    pub fn reduce(&self, v: &[i64]) -> Vec<i64> {
        v.iter()
            .enumerate()
            .map(|(i, &x)| match self.generator_order(i) {
                Some(m) => x.rem_euclid(m),
                None => x,
            })
            .collect()
    }

    pub fn add(&self, a: &[i64], b: &[i64]) -> Vec<i64> {
        let s: Vec<i64> = a.iter().zip(b).map(|(x, y)| x + y).collect();
        self.reduce(&s)
    }

    pub fn neg(&self, a: &[i64]) -> Vec<i64> {
        let s: Vec<i64> = a.iter().map(|x| -x).collect();
        self.reduce(&s)
    }

    pub fn scale(&self, k: i64, a: &[i64]) -> Vec<i64> {
        let s: Vec<i64> = a.iter().map(|x| k * x).collect();
        self.reduce(&s)
    }

    pub fn zero(&self) -> Vec<i64> {
        vec![0; self.dim()]
    }

    /// Free part of an element, i.e. the linear form it induces on the Lie
    /// algebra.
    pub fn free_part<'a>(&self, v: &'a [i64]) -> &'a [i64] {
        &v[..self.free_rank]
    }

    pub fn has_infinite_order(&self, v: &[i64]) -> bool {
        self.free_part(v).iter().any(|&x| x != 0)
    }

    /// Direct sum, with coordinates ordered as `(free₁, free₂, tors₁, tors₂)`.
    pub fn direct_sum(&self, other: &DualGroup) -> DualGroup {
        let mut torsion = self.torsion.clone();
        torsion.extend_from_slice(&other.torsion);
        DualGroup {
            free_rank: self.free_rank + other.free_rank,
            torsion,
        }
    }

    /// Embed the pair `(a, b)` of elements of `self` and `other` into the
    /// direct sum.
    pub fn direct_sum_element(&self, other: &DualGroup, a: &[i64], b: &[i64]) -> Vec<i64> {
        let mut v = Vec::with_capacity(self.dim() + other.dim());
        v.extend_from_slice(&a[..self.free_rank]);
        v.extend_from_slice(&b[..other.free_rank]);
        v.extend_from_slice(&a[self.free_rank..]);
        v.extend_from_slice(&b[other.free_rank..]);
        v
    }
}

impl fmt::Display for DualGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts = Vec::new();
        if self.free_rank > 0 || self.torsion.is_empty() {
            parts.push(format!("Z^{}", self.free_rank));
        }
        parts.extend(self.torsion.iter().map(|m| format!("Z/{m}")));
        write!(f, "{}", parts.join(" + "))
    }
}

/// Invariant-factor description of a finitely generated abelian group.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GroupShape {
    pub free_rank: usize,
    pub torsion: Vec<i64>,
}

impl GroupShape {
    pub fn order(&self) -> Option<i64> {
        (self.free_rank == 0).then(|| self.torsion.iter().product())
    }

    pub fn is_trivial(&self) -> bool {
        self.free_rank == 0 && self.torsion.is_empty()
    }
}

/// A subgroup `M ⊆ T̂`, stored as the Hermite form of its preimage in the
/// presentation lattice `Zⁿ` (which always contains the relations).
///
/// Closed subgroups of `T` are represented through their annihilators:
/// `M_H = {λ : λ|_H = 1}`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Subgroup {
    ambient: DualGroup,
    basis: IntMatrix,
}

impl Subgroup {
    /// Canonical form of the subgroup generated by `raw_generators`
    /// (each an element coordinate vector).
    pub fn canonical(ambient: &DualGroup, raw_generators: &[Vec<i64>]) -> Result<Self> {
        for g in raw_generators {
            ambient.check_element(g)?;
        }
        let mut rows = raw_generators.to_vec();
        rows.extend(ambient.relations());
        Ok(Self {
            ambient: ambient.clone(),
            basis: intmat::hermite_rows(&rows, ambient.dim()),
        })
    }

    /// The trivial subgroup `{0}` (annihilator of `H = T`).
    pub fn zero(ambient: &DualGroup) -> Self {
        Self::canonical(ambient, &[]).expect("no generators")
    }

    /// The whole character group (annihilator of the trivial subgroup).
    pub fn full(ambient: &DualGroup) -> Self {
        Self::canonical(ambient, &intmat::identity(ambient.dim())).expect("identity rows")
    }

    pub fn ambient(&self) -> &DualGroup {
        &self.ambient
    }

    /// Hermite basis of the preimage lattice (relations included).
    pub fn basis(&self) -> &IntMatrix {
        &self.basis
    }

    /// Nonzero generators with torsion coordinates reduced, suitable for
    /// serialization. Re-canonicalizing them gives back `self`.
    pub fn generators(&self) -> Vec<Vec<i64>> {
        self.basis
            .iter()
            .map(|r| self.ambient.reduce(r))
            .filter(|r| r.iter().any(|&x| x != 0))
            .collect()
    }

    pub fn contains(&self, v: &[i64]) -> bool {
        if v.len() != self.ambient.dim() {
            return false;
        }
        // reduce v against the echelon basis
        let mut r = v.to_vec();
        for row in &self.basis {
            let col = row.iter().position(|&x| x != 0).expect("nonzero row");
            if r[col] % row[col] != 0 {
                return false;
            }
            let q = r[col] / row[col];
            for (x, y) in r.iter_mut().zip(row) {
                *x -= q * y;
            }
        }
        r.iter().all(|&x| x == 0)
    }

    /// Representative of the coset `v + M`, canonical whenever `M` has
    /// finite index (each pivot coordinate reduced into `[0, pivot)`).
    pub fn reduce_mod(&self, v: &[i64]) -> Vec<i64> {
        let mut r = v.to_vec();
        for row in &self.basis {
            let col = row.iter().position(|&x| x != 0).expect("nonzero row");
            let q = r[col].div_euclid(row[col]);
            for (x, y) in r.iter_mut().zip(row) {
                *x -= q * y;
            }
        }
        self.ambient.reduce(&r)
    }

    fn same_ambient(&self, other: &Subgroup) -> Result<()> {
        if self.ambient != other.ambient {
            return Err(Error::AmbientMismatch);
        }
        Ok(())
    }

    pub fn is_subgroup_of(&self, other: &Subgroup) -> Result<bool> {
        self.same_ambient(other)?;
        Ok(self.basis.iter().all(|g| other.contains(g)))
    }

    pub fn sum(&self, other: &Subgroup) -> Result<Subgroup> {
        self.same_ambient(other)?;
        let mut rows = self.basis.clone();
        rows.extend(other.basis.iter().cloned());
        Subgroup::canonical(&self.ambient, &rows)
    }

    /// Free rank of `M` itself; for `M = M_H` this is `dim T/H`.
    pub fn rank(&self) -> usize {
        self.basis.len() - self.ambient.torsion().len()
    }

    /// Invariant factors of the quotient `T̂ / M` (the character group of `H`).
    pub fn quotient_shape(&self) -> GroupShape {
        let n = self.ambient.dim();
        if self.basis.is_empty() {
            return GroupShape {
                free_rank: n,
                torsion: Vec::new(),
            };
        }
        let s = intmat::smith(&self.basis, self.basis.len(), n);
        GroupShape {
            free_rank: n - s.rank,
            torsion: s.diagonal().into_iter().filter(|&d| d > 1).collect(),
        }
    }

    /// Saturation of `M`; it annihilates exactly the identity component `H⁰`.
    pub fn saturation(&self) -> Subgroup {
        let n = self.ambient.dim();
        Subgroup {
            ambient: self.ambient.clone(),
            basis: intmat::saturation(&self.basis, n),
        }
    }

    pub fn is_saturated(&self) -> bool {
        self.saturation() == *self
    }
}

impl fmt::Display for Subgroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let gens: Vec<String> = self
            .generators()
            .iter()
            .map(|g| {
                let s: Vec<String> = g.iter().map(i64::to_string).collect();
                format!("({})", s.join(","))
            })
            .collect();
        write!(f, "<{}>", gens.join(", "))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn index_six_sublattice() {
        let z2 = DualGroup::free(2);
        let m = Subgroup::canonical(&z2, &[vec![2, 0], vec![0, 3]]).unwrap();
        assert_eq!(
            m.quotient_shape(),
            GroupShape {
                free_rank: 0,
                torsion: vec![6]
            }
        );
        assert_eq!(m.quotient_shape().order(), Some(6));
    }

    #[test]
    fn rank_one_and_identity_cases() {
        let z = DualGroup::free(1);
        let nz = Subgroup::canonical(&z, &[vec![5]]).unwrap();
        assert_eq!(nz.quotient_shape().torsion, vec![5]);
        let z2 = DualGroup::free(2);
        let all = Subgroup::canonical(&z2, &[vec![1, 0], vec![0, 1]]).unwrap();
        assert!(all.quotient_shape().is_trivial());
        assert_eq!(all, Subgroup::full(&z2));
    }

    #[test]
    fn dimension_mismatch_is_rejected() {
        let z2 = DualGroup::free(2);
        assert!(matches!(
            Subgroup::canonical(&z2, &[vec![1, 2, 3]]),
            Err(Error::Dimension { .. })
        ));
    }

    #[test]
    fn torsion_relations_are_absorbed() {
        let g = DualGroup::new(1, vec![4]).unwrap();
        let a = Subgroup::canonical(&g, &[vec![0, 2]]).unwrap();
        let b = Subgroup::canonical(&g, &[vec![0, 6]]).unwrap();
        assert_eq!(a, b);
        assert!(a.contains(&[0, 10]));
        assert!(!a.contains(&[0, 1]));
        assert_eq!(Subgroup::zero(&g).rank(), 0);
        assert_eq!(Subgroup::full(&g).rank(), 1);
        // Z ⊕ Z/4 modulo <(0,2)> is Z ⊕ Z/2
        assert_eq!(
            a.quotient_shape(),
            GroupShape {
                free_rank: 1,
                torsion: vec![2]
            }
        );
    }

    #[test]
    fn saturation_clears_multiplicities() {
        let z = DualGroup::free(1);
        let two = Subgroup::canonical(&z, &[vec![2]]).unwrap();
        assert_eq!(two.saturation(), Subgroup::full(&z));
        let z2 = DualGroup::free(2);
        let diag = Subgroup::canonical(&z2, &[vec![2, -2]]).unwrap();
        let sat = diag.saturation();
        assert!(sat.contains(&[1, -1]));
        assert!(!sat.contains(&[1, 0]));
        // torsion characters vanish on the identity component
        let g = DualGroup::new(1, vec![3]).unwrap();
        assert!(Subgroup::zero(&g).saturation().contains(&[0, 1]));
    }
}
