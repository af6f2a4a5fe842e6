//! The group ring `Q(ζ)[T̂]`, i.e. `K_T^*` with cyclotomic coefficients.

use std::collections::BTreeMap;
use std::fmt;

use super::cyclo::CycloScalar;
use super::poly::Division;
use crate::error::{Error, Result};
use crate::lattice::{DualGroup, TorsionPoint};

/// A finite sum `Σ c_g z^g` over reduced elements `g ∈ T̂`.
#[derive(Clone, Debug, PartialEq)]
pub struct LaurentElement {
    ambient: DualGroup,
    terms: BTreeMap<Vec<i64>, CycloScalar>,
}

impl LaurentElement {
    pub fn zero(ambient: &DualGroup) -> Self {
        LaurentElement {
            ambient: ambient.clone(),
            terms: BTreeMap::new(),
        }
    }

    pub fn one(ambient: &DualGroup) -> Self {
        Self::monomial(ambient, &ambient.zero(), CycloScalar::int(1))
    }

    /// `c·z^g`.
    pub fn monomial(ambient: &DualGroup, g: &[i64], c: CycloScalar) -> Self {
        let mut out = Self::zero(ambient);
        out.add_term(g, c);
        out
    }

    pub fn from_terms(
        ambient: &DualGroup,
        terms: impl IntoIterator<Item = (Vec<i64>, CycloScalar)>,
    ) -> Result<Self> {
        let mut out = Self::zero(ambient);
        for (g, c) in terms {
            ambient.check_element(&g)?;
            out.add_term(&g, c);
        }
        Ok(out)
    }

    /// The K-theoretic Euler class `1 − z^w`.
    pub fn euler_class(ambient: &DualGroup, w: &[i64]) -> Self {
        Self::one(ambient).sub(&Self::monomial(ambient, w, CycloScalar::int(1)))
    }

    pub fn ambient(&self) -> &DualGroup {
        &self.ambient
    }

    pub fn terms(&self) -> &BTreeMap<Vec<i64>, CycloScalar> {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add_term(&mut self, g: &[i64], c: CycloScalar) {
        if c.is_zero() {
            return;
        }
        let key = self.ambient.reduce(g);
        match self.terms.get_mut(&key) {
            Some(x) => {
                *x = &*x + &c;
                if x.is_zero() {
                    self.terms.remove(&key);
                }
            }
            None => {
                self.terms.insert(key, c);
            }
        }
    }

    fn same_ambient(&self, other: &Self) {
        assert_eq!(self.ambient, other.ambient, "Laurent elements over different groups");
    }

    pub fn add(&self, other: &Self) -> Self {
        self.same_ambient(other);
        let mut out = self.clone();
        for (g, c) in &other.terms {
            out.add_term(g, c.clone());
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Self {
        self.scale(&CycloScalar::int(-1))
    }

    pub fn scale(&self, c: &CycloScalar) -> Self {
        let mut out = Self::zero(&self.ambient);
        for (g, x) in &self.terms {
            out.add_term(g, x * c);
        }
        out
    }

    pub fn mul(&self, other: &Self) -> Self {
        self.same_ambient(other);
        let mut out = Self::zero(&self.ambient);
        for (g, a) in &self.terms {
            for (h, b) in &other.terms {
                out.add_term(&self.ambient.add(g, h), a * b);
            }
        }
        out
    }

    /// Multiply by the monomial `z^g`.
    pub fn shift(&self, g: &[i64]) -> Self {
        let mut out = Self::zero(&self.ambient);
        for (h, c) in &self.terms {
            out.add_term(&self.ambient.add(g, h), c.clone());
        }
        out
    }

    /// Largest absolute free exponent appearing (0 for the zero element).
    pub fn max_free_exponent(&self) -> i64 {
        self.terms
            .keys()
            .flat_map(|g| self.ambient.free_part(g).iter().map(|x| x.abs()))
            .max()
            .unwrap_or(0)
    }
}

/// Evaluate `f` at `α`, sending `z^g ↦ e^{2πi α(g)}`.
pub fn eval_at_point(f: &LaurentElement, alpha: &TorsionPoint) -> Result<CycloScalar> {
    if f.ambient() != alpha.ambient() {
        return Err(Error::AmbientMismatch);
    }
    let mut acc = CycloScalar::int(0);
    for (g, c) in f.terms() {
        acc = &acc + &(c * &CycloScalar::exp_2pi_i(&alpha.eval(g)));
    }
    Ok(acc)
}

/// The canonical representative of `g` modulo `⟨w⟩`, and the index `k` with
/// `g = rep + k·w`. `w` must have infinite order.
pub fn euler_coset(ambient: &DualGroup, g: &[i64], w: &[i64]) -> (Vec<i64>, i64) {
    let j = (0..ambient.free_rank())
        .find(|&i| w[i] != 0)
        .expect("weight of infinite order");
    let k = g[j].div_euclid(w[j]);
    (ambient.add(g, &ambient.scale(-k, w)), k)
}

/// Divide by `1 − z^w`. On failure the witness is the image of `f` in the
/// group ring of `T̂/⟨w⟩`, written on canonical coset representatives.
pub fn divide_by_euler(
    f: &LaurentElement,
    w: &[i64],
) -> Result<Division<LaurentElement, LaurentElement>> {
    let ambient = f.ambient();
    ambient.check_element(w)?;
    let free = ambient.free_rank();
    if !(0..free).any(|i| w[i] != 0) {
        return Err(Error::Precondition(format!(
            "weight {w:?} has finite order; 1 - z^w is a zero divisor"
        )));
    }
    let mut cosets: BTreeMap<Vec<i64>, BTreeMap<i64, CycloScalar>> = BTreeMap::new();
    for (g, c) in f.terms() {
        let (rep, k) = euler_coset(ambient, g, w);
        cosets.entry(rep).or_default().insert(k, c.clone());
    }
    let mut witness = LaurentElement::zero(ambient);
    for (rep, series) in &cosets {
        let total = series.values().fold(CycloScalar::int(0), |a, c| &a + c);
        witness.add_term(rep, total);
    }
    if !witness.is_zero() {
        return Ok(Division::NotDivisible(witness));
    }
    // coefficientwise: q_k = Σ_{i ≤ k} c_i
    let mut q = LaurentElement::zero(ambient);
    for (rep, series) in &cosets {
        let mut acc = CycloScalar::int(0);
        let (lo, hi) = (
            *series.keys().next().expect("nonempty"),
            *series.keys().last().expect("nonempty"),
        );
        for k in lo..hi {
            if let Some(c) = series.get(&k) {
                acc = &acc + c;
            }
            q.add_term(&ambient.add(rep, &ambient.scale(k, w)), acc.clone());
        }
    }
    Ok(Division::Quotient(q))
}

impl fmt::Display for LaurentElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let one_var = self.ambient.dim() == 1;
        for (n, (g, c)) in self.terms.iter().enumerate() {
            let mono = if g.iter().all(|&x| x == 0) {
                String::new()
            } else if one_var {
                if g[0] == 1 {
                    "z".into()
                } else {
                    format!("z^{}", g[0])
                }
            } else {
                format!(
                    "z^({})",
                    g.iter().map(i64::to_string).collect::<Vec<_>>().join(",")
                )
            };
            let cs = c.to_string();
            let simple = !cs.contains([' ', '+']) && !cs[1..].contains('-');
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
            match (mono.is_empty(), body == "1") {
                (true, _) => write!(f, "{body}")?,
                (false, true) => write!(f, "{mono}")?,
                (false, false) => write!(f, "{body}*{mono}")?,
            }
        }
        Ok(())
    }
}
