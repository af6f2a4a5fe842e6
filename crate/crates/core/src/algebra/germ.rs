//! Exponential-polynomial germs `Σ_χ e^{ℓ_χ(u)}·P_χ(u)`.
//!
//! The exponential factors are kept symbolic, keyed by the character
//! `χ ∈ T̂` whose free part is the linear form `ℓ_χ`. Translation by a
//! rational vector `a` acts on the factor `e^{ℓ_χ}` by the root of unity
//! `e^{2πi χ(a)}` and on `P_χ` by the shift `u ↦ u + a`; jets are produced
//! only when comparing at a finite cutoff.

use std::collections::BTreeMap;
use std::fmt;

use num::BigRational;

use super::cyclo::CycloScalar;
use super::poly::{exp_poly, translate_poly, GradedJet, Poly};
use crate::error::{Error, Result};
use crate::lattice::DualGroup;

#[derive(Clone, Debug, PartialEq)]
pub struct Germ {
    ambient: DualGroup,
    terms: BTreeMap<Vec<i64>, Poly<CycloScalar>>,
}

impl Germ {
    pub fn zero(ambient: &DualGroup) -> Self {
        Germ {
            ambient: ambient.clone(),
            terms: BTreeMap::new(),
        }
    }

    /// The germ of a polynomial (trivial exponential factor).
    pub fn polynomial(ambient: &DualGroup, p: Poly<CycloScalar>) -> Self {
        let mut g = Self::zero(ambient);
        g.add_term(&ambient.zero(), p);
        g
    }

    pub fn constant(ambient: &DualGroup, c: CycloScalar) -> Self {
        Self::polynomial(ambient, Poly::constant(ambient.free_rank(), c))
    }

    /// `c·e^{ℓ_χ}`: the Chern character of the line `V_χ`, scaled.
    pub fn character(ambient: &DualGroup, chi: &[i64], c: CycloScalar) -> Self {
        let mut g = Self::zero(ambient);
        g.add_term(chi, Poly::constant(ambient.free_rank(), c));
        g
    }

    pub fn ambient(&self) -> &DualGroup {
        &self.ambient
    }

    pub fn terms(&self) -> &BTreeMap<Vec<i64>, Poly<CycloScalar>> {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add_term(&mut self, chi: &[i64], p: Poly<CycloScalar>) {
        let key = self.ambient.reduce(chi);
        let entry = self
            .terms
            .remove(&key)
            .map_or(p.clone(), |q| q.add(&p));
        if !entry.is_zero() {
            self.terms.insert(key, entry);
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (chi, p) in &other.terms {
            out.add_term(chi, p.clone());
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scale(&CycloScalar::int(-1)))
    }

    pub fn scale(&self, c: &CycloScalar) -> Self {
        let mut out = Self::zero(&self.ambient);
        for (chi, p) in &self.terms {
            out.add_term(chi, p.scale(c));
        }
        out
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut out = Self::zero(&self.ambient);
        for (a, p) in &self.terms {
            for (b, q) in &other.terms {
                out.add_term(&self.ambient.add(a, b), p.mul(q));
            }
        }
        out
    }

    /// `t_a^*` for a rational vector `a` (one entry per presentation
    /// generator; torsion entries only affect the roots of unity).
    pub fn translate(&self, a: &[BigRational]) -> Result<Self> {
        if a.len() != self.ambient.dim() {
            return Err(Error::Dimension {
                expected: self.ambient.dim(),
                found: a.len(),
            });
        }
        let free = &a[..self.ambient.free_rank()];
        let mut out = Self::zero(&self.ambient);
        for (chi, p) in &self.terms {
            let phase: BigRational = chi
                .iter()
                .zip(a)
                .map(|(&c, x)| BigRational::from_integer(c.into()) * x)
                .sum();
            let root = CycloScalar::exp_2pi_i(&phase);
            out.add_term(chi, translate_poly(p, free).scale(&root));
        }
        Ok(out)
    }

    /// Expand to a jet at the given cutoff.
    pub fn to_jet(&self, cutoff: u32) -> GradedJet {
        let p = self.ambient.free_rank();
        let mut acc = Poly::zero(p);
        for (chi, poly) in &self.terms {
            let l = Poly::<CycloScalar>::linear_form(self.ambient.free_part(chi));
            let e = exp_poly(&l, cutoff).expect("linear exponent");
            acc = acc.add(&e.mul_truncated(poly, cutoff));
        }
        GradedJet::new(cutoff, acc)
    }
}

impl fmt::Display for Germ {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self
            .terms
            .iter()
            .map(|(chi, p)| {
                if chi.iter().all(|&x| x == 0) {
                    format!("{p}")
                } else {
                    let chi_s = chi.iter().map(i64::to_string).collect::<Vec<_>>().join(",");
                    if *p == Poly::one(p.nvars()) {
                        format!("e[{chi_s}]")
                    } else {
                        format!("({p})*e[{chi_s}]")
                    }
                }
            })
            .collect();
        write!(f, "{}", parts.join(" + "))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::point::rat;

    #[test]
    fn translation_multiplies_by_root_of_unity() {
        let g = DualGroup::free(1);
        let e = Germ::character(&g, &[1], CycloScalar::int(1));
        let t = e.translate(&[rat(1, 2)]).unwrap();
        assert_eq!(t, e.scale(&CycloScalar::int(-1)));
        let j = t.to_jet(2);
        assert_eq!(j.poly().coeff(&[2]), CycloScalar::rational(rat(-1, 2)));
    }

    #[test]
    fn translation_is_additive_in_the_shift() {
        let g = DualGroup::new(2, vec![3]).unwrap();
        let x = Poly::<CycloScalar>::var(2, 0);
        let germ = Germ::character(&g, &[1, -2, 1], CycloScalar::int(1))
            .add(&Germ::polynomial(&g, x.mul(&x)));
        let a = [rat(1, 4), rat(2, 3), rat(1, 3)];
        let b = [rat(-1, 6), rat(1, 2), rat(2, 3)];
        let ab: Vec<BigRational> = a.iter().zip(&b).map(|(x, y)| x + y).collect();
        let two_step = germ.translate(&a).unwrap().translate(&b).unwrap();
        assert_eq!(two_step, germ.translate(&ab).unwrap());
    }

    #[test]
    fn jet_of_product_is_product_of_jets() {
        let g = DualGroup::free(2);
        let a = Germ::character(&g, &[1, 0], CycloScalar::int(2));
        let b = Germ::character(&g, &[0, -1], CycloScalar::int(1));
        assert_eq!(a.mul(&b).to_jet(4), a.to_jet(4).mul(&b.to_jet(4)));
    }
}
