//! Sparse multivariate polynomials and degree-truncated jets.

use std::collections::BTreeMap;
use std::fmt;

use num::BigRational;

use super::cyclo::CycloScalar;
use super::field::Field;
use crate::error::{Error, Result};
use crate::lattice::intmat;

pub type Exponent = Vec<u32>;

/// A polynomial in `u_1, …, u_p` with coefficients in `F`. Zero
/// coefficients are never stored.
#[derive(Clone, Debug, PartialEq)]
pub struct Poly<F> {
    nvars: usize,
    terms: BTreeMap<Exponent, F>,
}

pub fn total_degree(e: &[u32]) -> u32 {
    e.iter().sum()
}

/// All exponent vectors in `nvars` variables of total degree `d`, in
/// lexicographically decreasing order (`u1^d` first).
pub fn monomials_of_degree(nvars: usize, d: u32) -> Vec<Exponent> {
    fn go(nvars: usize, d: u32, prefix: &mut Exponent, out: &mut Vec<Exponent>) {
        if prefix.len() + 1 == nvars {
            prefix.push(d);
            out.push(prefix.clone());
            prefix.pop();
            return;
        }
        for k in (0..=d).rev() {
            prefix.push(k);
            go(nvars, d - k, prefix, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    if nvars == 0 {
        if d == 0 {
            out.push(Vec::new());
        }
        return out;
    }
    go(nvars, d, &mut Vec::new(), &mut out);
    out
}

impl<F: Field> Poly<F> {
    pub fn zero(nvars: usize) -> Self {
        Poly {
            nvars,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(nvars: usize, c: F) -> Self {
        Self::monomial(nvars, vec![0; nvars], c)
    }

    pub fn one(nvars: usize) -> Self {
        Self::constant(nvars, F::one())
    }

    pub fn monomial(nvars: usize, exp: Exponent, c: F) -> Self {
        assert_eq!(exp.len(), nvars);
        let mut p = Self::zero(nvars);
        p.add_term(exp, c);
        p
    }

    pub fn var(nvars: usize, i: usize) -> Self {
        let mut e = vec![0; nvars];
        e[i] = 1;
        Self::monomial(nvars, e, F::one())
    }

    /// The linear form `Σ ℓ_i u_i`.
    pub fn linear_form(l: &[i64]) -> Self {
        let n = l.len();
        let mut p = Self::zero(n);
        for (i, &c) in l.iter().enumerate() {
            let mut e = vec![0; n];
            e[i] = 1;
            p.add_term(e, F::from_int(c));
        }
        p
    }

    pub fn from_terms(nvars: usize, terms: impl IntoIterator<Item = (Exponent, F)>) -> Result<Self> {
        let mut p = Self::zero(nvars);
        for (e, c) in terms {
            if e.len() != nvars {
                return Err(Error::Dimension {
                    expected: nvars,
                    found: e.len(),
                });
            }
            p.add_term(e, c);
        }
        Ok(p)
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn terms(&self) -> &BTreeMap<Exponent, F> {
        &self.terms
    }

    pub fn coeff(&self, e: &[u32]) -> F {
        self.terms.get(e).cloned().unwrap_or_else(F::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn degree(&self) -> Option<u32> {
        self.terms.keys().map(|e| total_degree(e)).max()
    }

    pub fn add_term(&mut self, e: Exponent, c: F) {
        if c.is_zero() {
            return;
        }
        match self.terms.get_mut(&e) {
            Some(x) => {
                *x = x.add(&c);
                if x.is_zero() {
                    self.terms.remove(&e);
                }
            }
            None => {
                self.terms.insert(e, c);
            }
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (e, c) in &other.terms {
            out.add_term(e.clone(), c.clone());
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (e, c) in &other.terms {
            out.add_term(e.clone(), c.neg());
        }
        out
    }

    pub fn neg(&self) -> Self {
        self.scale(&F::one().neg())
    }

    pub fn scale(&self, c: &F) -> Self {
        let mut out = Self::zero(self.nvars);
        for (e, x) in &self.terms {
            out.add_term(e.clone(), x.mul(c));
        }
        out
    }

    fn mul_impl(&self, other: &Self, cutoff: Option<u32>) -> Self {
        assert_eq!(self.nvars, other.nvars, "variable count mismatch");
        let mut out = Self::zero(self.nvars);
        for (ea, ca) in &self.terms {
            let da = total_degree(ea);
            for (eb, cb) in &other.terms {
                if cutoff.is_some_and(|d| da + total_degree(eb) > d) {
                    continue;
                }
                let e: Exponent = ea.iter().zip(eb).map(|(x, y)| x + y).collect();
                out.add_term(e, ca.mul(cb));
            }
        }
        out
    }

    pub fn mul(&self, other: &Self) -> Self {
        self.mul_impl(other, None)
    }

    /// Product with all terms of total degree above `cutoff` dropped.
    pub fn mul_truncated(&self, other: &Self, cutoff: u32) -> Self {
        self.mul_impl(other, Some(cutoff))
    }

    pub fn pow_truncated(&self, k: u32, cutoff: Option<u32>) -> Self {
        let mut out = Self::one(self.nvars);
        for _ in 0..k {
            out = out.mul_impl(self, cutoff);
        }
        if let Some(d) = cutoff {
            out = out.truncate(d);
        }
        out
    }

    pub fn truncate(&self, cutoff: u32) -> Self {
        Poly {
            nvars: self.nvars,
            terms: self
                .terms
                .iter()
                .filter(|(e, _)| total_degree(e) <= cutoff)
                .map(|(e, c)| (e.clone(), c.clone()))
                .collect(),
        }
    }

    pub fn homogeneous_part(&self, d: u32) -> Self {
        Poly {
            nvars: self.nvars,
            terms: self
                .terms
                .iter()
                .filter(|(e, _)| total_degree(e) == d)
                .map(|(e, c)| (e.clone(), c.clone()))
                .collect(),
        }
    }

    /// Substitute `u_i ↦ images[i]` (all images share a variable count),
    /// optionally truncating intermediate products.
    pub fn substitute(&self, images: &[Poly<F>], cutoff: Option<u32>) -> Self {
        assert_eq!(images.len(), self.nvars);
        let target = images.first().map_or(0, |p| p.nvars);
        let mut out = Poly::zero(target);
        // cache powers per variable
        let mut powers: Vec<Vec<Poly<F>>> = images.iter().map(|p| vec![Poly::one(p.nvars)]).collect();
        for (e, c) in &self.terms {
            let mut term = Poly::constant(target, c.clone());
            for (i, &k) in e.iter().enumerate() {
                while powers[i].len() <= k as usize {
                    let next = powers[i].last().unwrap().mul_impl(&images[i], cutoff);
                    powers[i].push(next);
                }
                term = term.mul_impl(&powers[i][k as usize], cutoff);
            }
            out = out.add(&term);
        }
        match cutoff {
            Some(d) => out.truncate(d),
            None => out,
        }
    }

    pub fn map_coeffs<G: Field>(&self, f: impl Fn(&F) -> G) -> Poly<G> {
        let mut out = Poly::zero(self.nvars);
        for (e, c) in &self.terms {
            out.add_term(e.clone(), f(c));
        }
        out
    }

    /// Coefficient vector over the given monomial list.
    pub fn coords(&self, monomials: &[Exponent]) -> Vec<F> {
        monomials.iter().map(|m| self.coeff(m)).collect()
    }

    pub fn from_coords(nvars: usize, monomials: &[Exponent], coords: &[F]) -> Self {
        let mut p = Self::zero(nvars);
        for (m, c) in monomials.iter().zip(coords) {
            p.add_term(m.clone(), c.clone());
        }
        p
    }

    /// Restriction to the hyperplane `ℓ = 0`, written in coordinates of an
    /// integer basis of `ker ℓ` (so the result has `p − 1` variables).
    pub fn restrict_to_kernel(&self, l: &[i64]) -> Self {
        let kernel = intmat::integer_kernel(&vec![l.to_vec()], l.len());
        self.restrict_along(&kernel)
    }

    /// Pull back along the linear map `v ↦ Σ_j v_j·basis[j]`.
    pub fn restrict_along(&self, basis: &[Vec<i64>]) -> Self {
        let k = basis.len();
        let images: Vec<Poly<F>> = (0..self.nvars)
            .map(|i| {
                let coeffs: Vec<i64> = basis.iter().map(|b| b[i]).collect();
                let mut p = Poly::zero(k);
                for (j, &c) in coeffs.iter().enumerate() {
                    let mut e = vec![0; k];
                    e[j] = 1;
                    p.add_term(e, F::from_int(c));
                }
                p
            })
            .collect();
        if self.nvars == 0 {
            return Poly {
                nvars: k,
                terms: self
                    .terms
                    .values()
                    .map(|c| (vec![0; k], c.clone()))
                    .collect(),
            };
        }
        self.substitute(&images, None)
    }
}

/// Outcome of dividing by a linear form or an Euler class.
#[derive(Clone, Debug, PartialEq)]
pub enum Division<Q, W> {
    Quotient(Q),
    NotDivisible(W),
}

impl<Q, W> Division<Q, W> {
    pub fn quotient(self) -> Option<Q> {
        match self {
            Division::Quotient(q) => Some(q),
            Division::NotDivisible(_) => None,
        }
    }

    pub fn is_divisible(&self) -> bool {
        matches!(self, Division::Quotient(_))
    }
}

/// Decide whether `ℓ | f` and return the quotient, or the (nonzero)
/// restriction of `f` to `ℓ = 0` as a witness.
pub fn divide_by_linear<F: Field>(f: &Poly<F>, l: &[i64]) -> Result<Division<Poly<F>, Poly<F>>> {
    if l.len() != f.nvars() {
        return Err(Error::Dimension {
            expected: f.nvars(),
            found: l.len(),
        });
    }
    let Some(j) = l.iter().position(|&x| x != 0) else {
        return Err(Error::Precondition("linear form is zero".into()));
    };
    let restriction = f.restrict_to_kernel(l);
    if !restriction.is_zero() {
        return Ok(Division::NotDivisible(restriction));
    }
    // eliminate u_j: each step trades a monomial for ones of lower u_j-degree
    let lj_inv = F::from_int(l[j]).inv().expect("nonzero");
    let lin = Poly::<F>::linear_form(l);
    let mut rem = f.clone();
    let mut q = Poly::zero(f.nvars());
    while let Some((e, c)) = rem
        .terms
        .iter()
        .filter(|(e, _)| e[j] > 0)
        .max_by_key(|(e, _)| e[j])
        .map(|(e, c)| (e.clone(), c.clone()))
    {
        let mut m = e.clone();
        m[j] -= 1;
        let t = Poly::monomial(f.nvars(), m, c.mul(&lj_inv));
        rem = rem.sub(&t.mul(&lin));
        q = q.add(&t);
    }
    debug_assert!(rem.is_zero());
    Ok(Division::Quotient(q))
}

impl<F: Field> fmt::Display for Poly<F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut keys: Vec<&Exponent> = self.terms.keys().collect();
        keys.sort_by(|a, b| total_degree(a).cmp(&total_degree(b)).then(b.cmp(a)));
        let var = |i: usize| {
            if self.nvars == 1 {
                "u".to_string()
            } else {
                format!("u{}", i + 1)
            }
        };
        for (n, e) in keys.into_iter().enumerate() {
            let c = &self.terms[e];
            let mono: Vec<String> = e
                .iter()
                .enumerate()
                .filter(|(_, &k)| k > 0)
                .map(|(i, &k)| if k == 1 { var(i) } else { format!("{}^{k}", var(i)) })
                .collect();
            let cs = c.to_string();
            let simple = !cs.contains([' ', '+']) && !cs.chars().skip(1).any(|ch| ch == '-');
            let (neg, body) = match cs.strip_prefix('-') {
                Some(rest) if simple => (true, rest.to_string()),
                _ => (false, cs.clone()),
            };
            let body = if simple { body } else { format!("({body})") };
            if n > 0 {
                write!(f, "{}", if neg { " - " } else { " + " })?;
            } else if neg {
                write!(f, "-")?;
            }
            if mono.is_empty() {
                write!(f, "{body}")?;
            } else if body == "1" {
                write!(f, "{}", mono.join("*"))?;
            } else {
                write!(f, "{body}*{}", mono.join("*"))?;
            }
        }
        Ok(())
    }
}

/// A polynomial jet: all terms of total degree `≤ cutoff`, coefficients in
/// a cyclotomic field.
#[derive(Clone, Debug, PartialEq)]
pub struct GradedJet {
    cutoff: u32,
    poly: Poly<CycloScalar>,
}

impl GradedJet {
    pub fn new(cutoff: u32, poly: Poly<CycloScalar>) -> Self {
        GradedJet {
            cutoff,
            poly: poly.truncate(cutoff),
        }
    }

    pub fn zero(nvars: usize, cutoff: u32) -> Self {
        Self::new(cutoff, Poly::zero(nvars))
    }

    pub fn one(nvars: usize, cutoff: u32) -> Self {
        Self::new(cutoff, Poly::one(nvars))
    }

    pub fn cutoff(&self) -> u32 {
        self.cutoff
    }

    pub fn nvars(&self) -> usize {
        self.poly.nvars()
    }

    pub fn poly(&self) -> &Poly<CycloScalar> {
        &self.poly
    }

    pub fn into_poly(self) -> Poly<CycloScalar> {
        self.poly
    }

    pub fn is_zero(&self) -> bool {
        self.poly.is_zero()
    }

    fn check(&self, other: &Self) {
        assert_eq!(self.cutoff, other.cutoff, "jet cutoff mismatch");
    }

    pub fn add(&self, other: &Self) -> Self {
        self.check(other);
        GradedJet {
            cutoff: self.cutoff,
            poly: self.poly.add(&other.poly),
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.check(other);
        GradedJet {
            cutoff: self.cutoff,
            poly: self.poly.sub(&other.poly),
        }
    }

    pub fn mul(&self, other: &Self) -> Self {
        self.check(other);
        GradedJet {
            cutoff: self.cutoff,
            poly: self.poly.mul_truncated(&other.poly, self.cutoff),
        }
    }

    pub fn scale(&self, c: &CycloScalar) -> Self {
        GradedJet {
            cutoff: self.cutoff,
            poly: self.poly.scale(c),
        }
    }
}

impl fmt::Display for GradedJet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} + O(|u|^{})", self.poly, self.cutoff + 1)
    }
}

fn shift_images(a: &[BigRational]) -> Vec<Poly<CycloScalar>> {
    let n = a.len();
    (0..n)
        .map(|i| Poly::var(n, i).add(&Poly::constant(n, CycloScalar::rational(a[i].clone()))))
        .collect()
}

/// `t_a^*`: substitute `u ↦ u + a` and truncate at the cutoff.
pub fn translate_jet(p: &GradedJet, a: &[BigRational]) -> Result<GradedJet> {
    if a.len() != p.nvars() {
        return Err(Error::Dimension {
            expected: p.nvars(),
            found: a.len(),
        });
    }
    Ok(GradedJet::new(p.cutoff, translate_poly(&p.poly, a)))
}

/// Exact (untruncated) polynomial shift `u ↦ u + a`.
pub fn translate_poly(p: &Poly<CycloScalar>, a: &[BigRational]) -> Poly<CycloScalar> {
    if p.nvars() == 0 {
        return p.clone();
    }
    p.substitute(&shift_images(a), None)
}

/// `Σ_{k ≤ D} ℓ^k / k!` for an affine `ℓ`.
pub fn exp_jet(l: &GradedJet, cutoff: u32) -> Result<GradedJet> {
    exp_poly(&l.poly, cutoff).map(|p| GradedJet::new(cutoff, p))
}

pub fn exp_poly(l: &Poly<CycloScalar>, cutoff: u32) -> Result<Poly<CycloScalar>> {
    if l.degree().is_some_and(|d| d > 1) {
        return Err(Error::Algebra(format!("exponent {l} is not affine")));
    }
    let n = l.nvars();
    let mut out = Poly::zero(n);
    let mut power = Poly::one(n);
    let mut fact = BigRational::from_integer(1.into());
    for k in 0..=cutoff {
        if k > 0 {
            power = power.mul_truncated(l, cutoff);
            fact *= BigRational::from_integer(k.into());
        }
        out = out.add(&power.scale(&CycloScalar::rational(fact.recip())));
    }
    Ok(out.truncate(cutoff))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cyclotomic_coefficients_display() {
        let z = Poly::constant(1, CycloScalar::root_of_unity(1, 4));
        assert_eq!(z.to_string(), "ζ4");
        assert_eq!(z.neg().mul(&Poly::var(1, 0)).to_string(), "-ζ4*u");
        let w = Poly::constant(1, CycloScalar::root_of_unity(2, 3));
        assert_eq!(w.to_string(), "(-1 - ζ3)");
    }
    use crate::lattice::point::rat;

    type QPoly = Poly<BigRational>;

    fn u(n: usize, i: usize) -> QPoly {
        Poly::var(n, i)
    }

    #[test]
    fn monomial_enumeration() {
        assert_eq!(monomials_of_degree(2, 2), vec![vec![2, 0], vec![1, 1], vec![0, 2]]);
        assert_eq!(monomials_of_degree(3, 2).len(), 6);
        assert_eq!(monomials_of_degree(0, 0), vec![Vec::<u32>::new()]);
        assert!(monomials_of_degree(0, 1).is_empty());
    }

    #[test]
    fn divide_difference_of_squares() {
        let f = u(2, 0).mul(&u(2, 0)).sub(&u(2, 1).mul(&u(2, 1)));
        let q = divide_by_linear(&f, &[1, -1]).unwrap().quotient().unwrap();
        assert_eq!(q, u(2, 0).add(&u(2, 1)));
        // multiply back
        assert_eq!(q.mul(&Poly::linear_form(&[1, -1])), f);
    }

    #[test]
    fn divide_form_by_itself_and_failure() {
        let l = [2, -3, 1];
        let f: QPoly = Poly::linear_form(&l);
        assert_eq!(divide_by_linear(&f, &l).unwrap().quotient().unwrap(), Poly::one(3));
        let g = u(2, 0).add(&Poly::one(2));
        match divide_by_linear(&g, &[1, 0]).unwrap() {
            Division::NotDivisible(w) => assert_eq!(w, Poly::one(1)),
            other => panic!("expected failure, got {other:?}"),
        }
        assert!(divide_by_linear(&g, &[0, 0]).is_err());
    }

    #[test]
    fn translation_examples() {
        let x = GradedJet::new(4, Poly::var(1, 0));
        let t = translate_jet(&x, &[rat(3, 2)]).unwrap();
        assert_eq!(t.to_string(), "3/2 + u + O(|u|^5)");
        let sq = x.mul(&x);
        let t = translate_jet(&sq, &[rat(1, 1)]).unwrap();
        let expect = sq.add(&x.scale(&CycloScalar::int(2))).add(&GradedJet::one(1, 4));
        assert_eq!(t, expect);
        assert_eq!(translate_jet(&sq, &[rat(0, 1)]).unwrap(), sq);
        assert!(translate_jet(&sq, &[]).is_err());
    }

    #[test]
    fn exponential_series() {
        let x = GradedJet::new(3, Poly::var(1, 0));
        let e = exp_jet(&x, 3).unwrap();
        let expect: Vec<BigRational> = vec![rat(1, 1), rat(1, 1), rat(1, 2), rat(1, 6)];
        for (k, c) in expect.into_iter().enumerate() {
            assert_eq!(e.poly().coeff(&[k as u32]), CycloScalar::rational(c));
        }
        assert_eq!(exp_jet(&GradedJet::zero(1, 3), 3).unwrap(), GradedJet::one(1, 3));
        assert!(exp_jet(&x.mul(&x), 3).is_err());
    }

    #[test]
    fn exponential_homomorphism() {
        let d = 5;
        let l1 = GradedJet::new(d, Poly::var(2, 0));
        let l2 = GradedJet::new(d, Poly::var(2, 1));
        let lhs = exp_jet(&l1, d).unwrap().mul(&exp_jet(&l2, d).unwrap());
        let rhs = exp_jet(&l1.add(&l2), d).unwrap();
        assert_eq!(lhs, rhs);
        // independent check of one coefficient: u1^2 u2^3 has 1/(2!·3!)
        assert_eq!(rhs.poly().coeff(&[2, 3]), CycloScalar::rational(rat(1, 12)));
    }

    #[test]
    fn display_format() {
        let p: QPoly = u(2, 0).mul(&u(2, 0)).scale(&rat(1, 2)).sub(&u(2, 1)).add(&Poly::one(2));
        assert_eq!(p.to_string(), "1 - u2 + 1/2*u1^2");
    }
}
