//! Arithmetic in the cyclotomic fields `Q(ζ_m)`.
//!
//! An element of `Q(ζ_m)` is stored as the coefficient vector of a
//! polynomial in `ζ_m` of degree `< φ(m)`, i.e. its residue modulo the
//! cyclotomic polynomial `Φ_m`. Elements of different orders are combined
//! in `Q(ζ_lcm)`.

use std::collections::HashMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::{Arc, Mutex, OnceLock};

use num::{BigInt, BigRational, One, Signed, Zero};

pub(crate) mod upoly {
    //! Dense univariate polynomials over `Q`, lowest degree first.
    use num::{BigRational, Zero};

    pub type UPoly = Vec<BigRational>;

    pub fn trim(mut p: UPoly) -> UPoly {
        while p.last().is_some_and(Zero::is_zero) {
            p.pop();
        }
        p
    }

    pub fn degree(p: &UPoly) -> Option<usize> {
        p.iter().rposition(|c| !c.is_zero())
    }

    pub fn sub(a: &UPoly, b: &UPoly) -> UPoly {
        let n = a.len().max(b.len());
        let z = BigRational::zero();
        trim(
            (0..n)
                .map(|i| a.get(i).unwrap_or(&z) - b.get(i).unwrap_or(&z))
                .collect(),
        )
    }

    pub fn mul(a: &UPoly, b: &UPoly) -> UPoly {
        if a.is_empty() || b.is_empty() {
            return Vec::new();
        }
        let mut out = vec![BigRational::zero(); a.len() + b.len() - 1];
        for (i, x) in a.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            for (j, y) in b.iter().enumerate() {
                out[i + j] += x * y;
            }
        }
        trim(out)
    }

    /// Division with remainder; `b` must be nonzero.
    pub fn divrem(a: &UPoly, b: &UPoly) -> (UPoly, UPoly) {
        let db = degree(b).expect("division by zero polynomial");
        let lead = b[db].clone();
        let mut r = trim(a.clone());
        let mut q = vec![BigRational::zero(); r.len().saturating_sub(db).max(1)];
        while let Some(dr) = degree(&r) {
            if dr < db {
                break;
            }
            let c = &r[dr] / &lead;
            let shift = dr - db;
            for (i, bi) in b.iter().enumerate().take(db + 1) {
                r[i + shift] -= &c * bi;
            }
            q[shift] = c;
            r = trim(r);
        }
        (trim(q), r)
    }

    /// Solve `s·a ≡ 1 (mod m)`; `a` must be coprime to `m`.
    pub fn inverse_mod(a: &UPoly, m: &UPoly) -> Option<UPoly> {
        // extended Euclid tracking only the coefficient of a
        let (mut r0, mut r1) = (m.clone(), divrem(a, m).1);
        let (mut s0, mut s1): (UPoly, UPoly) = (Vec::new(), vec![BigRational::from_integer(1.into())]);
        while degree(&r1).is_some() {
            let (q, r) = divrem(&r0, &r1);
            let s = sub(&s0, &mul(&q, &s1));
            r0 = std::mem::replace(&mut r1, r);
            s0 = std::mem::replace(&mut s1, s);
        }
        // r0 is the gcd; it must be a nonzero constant
        if degree(&r0) != Some(0) {
            return None;
        }
        let c = r0[0].clone();
        Some(trim(s0.into_iter().map(|x| x / &c).collect()))
    }
}

use upoly::UPoly;

fn cache() -> &'static Mutex<HashMap<u64, Arc<UPoly>>> {
    static CACHE: OnceLock<Mutex<HashMap<u64, Arc<UPoly>>>> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(HashMap::new()))
}

/// The `m`-th cyclotomic polynomial, by exact division of `xᵐ − 1` by
/// `Φ_d` for every proper divisor `d` of `m`.
pub fn cyclotomic_polynomial(m: u64) -> Arc<UPoly> {
    assert!(m >= 1, "cyclotomic order must be positive");
    if let Some(p) = cache().lock().expect("cache lock").get(&m) {
        return Arc::clone(p);
    }
    let mut p: UPoly = vec![BigRational::zero(); m as usize + 1];
    p[0] = -BigRational::one();
    p[m as usize] = BigRational::one();
    for d in (1..m).filter(|d| m.is_multiple_of(*d)) {
        let (q, r) = upoly::divrem(&p, &cyclotomic_polynomial(d));
        debug_assert!(r.is_empty());
        p = q;
    }
    let p = Arc::new(p);
    cache()
        .lock()
        .expect("cache lock")
        .insert(m, Arc::clone(&p));
    p
}

pub fn euler_phi(m: u64) -> usize {
    cyclotomic_polynomial(m).len() - 1
}

fn lcm(a: u64, b: u64) -> u64 {
    num::integer::lcm(a, b)
}

/// An element of `Q(ζ_m)`.
#[derive(Clone, Debug)]
pub struct CycloScalar {
    order: u64,
    coeffs: Vec<BigRational>,
}

impl CycloScalar {
    fn reduce(order: u64, p: UPoly) -> Self {
        let phi = cyclotomic_polynomial(order);
        let deg = phi.len() - 1;
        let (_, mut r) = upoly::divrem(&p, &phi);
        r.resize(deg, BigRational::zero());
        CycloScalar { order, coeffs: r }
    }

    /// Build from a polynomial in `ζ_m` (any length; reduced mod `Φ_m`).
    pub fn from_poly(order: u64, coeffs: Vec<BigRational>) -> Self {
        assert!(order >= 1);
        Self::reduce(order, upoly::trim(coeffs))
    }

    pub fn rational(q: BigRational) -> Self {
        CycloScalar {
            order: 1,
            coeffs: vec![q],
        }
    }

    pub fn int(n: i64) -> Self {
        Self::rational(BigRational::from_integer(n.into()))
    }

    /// `ζ_m^k`, i.e. `e^{2πik/m}`.
    pub fn root_of_unity(k: i64, m: u64) -> Self {
        assert!(m >= 1);
        let e = k.rem_euclid(m as i64) as usize;
        let mut p = vec![BigRational::zero(); e + 1];
        p[e] = BigRational::one();
        Self::reduce(m, p)
    }

    /// `e^{2πiq}` for a rational `q`.
    pub fn exp_2pi_i(q: &BigRational) -> Self {
        let m: u64 = q.denom().try_into().expect("denominator fits in u64");
        let k: i64 = (q.numer() % q.denom())
            .try_into()
            .expect("numerator fits in i64");
        Self::root_of_unity(k, m)
    }

    pub fn order(&self) -> u64 {
        self.order
    }

    pub fn coeffs(&self) -> &[BigRational] {
        &self.coeffs
    }

    /// Re-express in `Q(ζ_target)`; `target` must be a multiple of the order.
    pub fn coerce(&self, target: u64) -> Self {
        assert!(
            target.is_multiple_of(self.order),
            "cannot embed Q(ζ_{}) into Q(ζ_{target})",
            self.order
        );
        if target == self.order {
            return self.clone();
        }
        let k = (target / self.order) as usize;
        let mut p = vec![BigRational::zero(); (self.coeffs.len().max(1) - 1) * k + 1];
        for (i, c) in self.coeffs.iter().enumerate() {
            p[i * k] = c.clone();
        }
        Self::reduce(target, p)
    }

    fn common(&self, other: &Self) -> (Self, Self) {
        let m = lcm(self.order, other.order);
        (self.coerce(m), other.coerce(m))
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(Zero::is_zero)
    }

    pub fn inv(&self) -> Option<Self> {
        if self.is_zero() {
            return None;
        }
        let phi = cyclotomic_polynomial(self.order);
        let s = upoly::inverse_mod(&upoly::trim(self.coeffs.clone()), &phi)?;
        Some(Self::reduce(self.order, s))
    }

    /// The rational value, if the element lies in `Q`.
    pub fn as_rational(&self) -> Option<BigRational> {
        self.coeffs[1..]
            .iter()
            .all(Zero::is_zero)
            .then(|| self.coeffs[0].clone())
    }

    /// Smallest `m'` dividing the order such that the element lies in
    /// `Q(ζ_m')`, together with its representation there.
    pub fn minimal(&self) -> Self {
        let mut divisors: Vec<u64> = (1..=self.order).filter(|d| self.order.is_multiple_of(*d)).collect();
        divisors.sort_unstable();
        for d in divisors {
            // candidate: the subfield element with the same image
            if let Some(c) = self.try_descend(d) {
                return c;
            }
        }
        self.clone()
    }

    fn try_descend(&self, d: u64) -> Option<Self> {
        // an element of Q(ζ_d) has a representative whose ζ_m-exponents are
        // multiples of m/d; solve for it by linear algebra over Q
        let k = (self.order / d) as usize;
        let phi_d = euler_phi(d);
        let images: Vec<Self> = (0..phi_d)
            .map(|i| Self::root_of_unity((i * k) as i64, self.order))
            .collect();
        let n = self.coeffs.len();
        let mut rows: Vec<Vec<BigRational>> = (0..n)
            .map(|r| {
                let mut row: Vec<BigRational> = images.iter().map(|im| im.coeffs[r].clone()).collect();
                row.push(self.coeffs[r].clone());
                row
            })
            .collect();
        let pivots = super::linalg::rref(&mut rows, phi_d + 1);
        if pivots.contains(&phi_d) {
            return None;
        }
        let mut sol = vec![BigRational::zero(); phi_d];
        for (r, &c) in pivots.iter().enumerate() {
            sol[c] = rows[r][phi_d].clone();
        }
        Some(Self::reduce(d, sol))
    }

    /// If the element is a root of unity `ζ_m^k`, return `(k, m)` with `m`
    /// the exact order of the root.
    pub fn as_root_of_unity(&self) -> Option<(i64, u64)> {
        let m = self.order;
        let target = if m % 2 == 1 { 2 * m } else { m };
        let me = self.coerce(target);
        (0..target as i64)
            .find(|&k| Self::root_of_unity(k, target) == me)
            .map(|k| {
                let g = num::integer::gcd(k as u64, target).max(1);
                let g = if k == 0 { target } else { g };
                (k / g as i64, target / g)
            })
    }
}

impl PartialEq for CycloScalar {
    fn eq(&self, other: &Self) -> bool {
        let (a, b) = self.common(other);
        a.coeffs == b.coeffs
    }
}

impl Eq for CycloScalar {}

impl<'a> Add<&'a CycloScalar> for &'a CycloScalar {
    type Output = CycloScalar;
    fn add(self, rhs: &CycloScalar) -> CycloScalar {
        let (a, b) = self.common(rhs);
        CycloScalar {
            order: a.order,
            coeffs: a.coeffs.iter().zip(&b.coeffs).map(|(x, y)| x + y).collect(),
        }
    }
}

impl<'a> Sub<&'a CycloScalar> for &'a CycloScalar {
    type Output = CycloScalar;
    fn sub(self, rhs: &CycloScalar) -> CycloScalar {
        let (a, b) = self.common(rhs);
        CycloScalar {
            order: a.order,
            coeffs: a.coeffs.iter().zip(&b.coeffs).map(|(x, y)| x - y).collect(),
        }
    }
}

impl<'a> Mul<&'a CycloScalar> for &'a CycloScalar {
    type Output = CycloScalar;
    fn mul(self, rhs: &CycloScalar) -> CycloScalar {
        let (a, b) = self.common(rhs);
        CycloScalar::reduce(a.order, upoly::mul(&a.coeffs, &b.coeffs))
    }
}

impl Neg for &CycloScalar {
    type Output = CycloScalar;
    fn neg(self) -> CycloScalar {
        CycloScalar {
            order: self.order,
            coeffs: self.coeffs.iter().map(|x| -x).collect(),
        }
    }
}

impl super::field::Field for CycloScalar {
    fn zero() -> Self {
        Self::int(0)
    }
    fn one() -> Self {
        Self::int(1)
    }
    fn is_zero(&self) -> bool {
        CycloScalar::is_zero(self)
    }
    fn add(&self, other: &Self) -> Self {
        self + other
    }
    fn sub(&self, other: &Self) -> Self {
        self - other
    }
    fn mul(&self, other: &Self) -> Self {
        self * other
    }
    fn neg(&self) -> Self {
        -self
    }
    fn inv(&self) -> Option<Self> {
        CycloScalar::inv(self)
    }
    fn from_rational(q: BigRational) -> Self {
        Self::rational(q)
    }
}

impl fmt::Display for CycloScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let me = self.minimal();
        if let Some(q) = me.as_rational() {
            return write!(f, "{q}");
        }
        let mut out = String::new();
        for (i, c) in me.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let neg = c.is_negative();
            let a = c.abs();
            if out.is_empty() {
                if neg {
                    out.push('-');
                }
            } else {
                out.push_str(if neg { " - " } else { " + " });
            }
            let z = match i {
                0 => String::new(),
                1 => format!("ζ{}", me.order),
                _ => format!("ζ{}^{i}", me.order),
            };
            if z.is_empty() {
                out.push_str(&a.to_string());
            } else if a.is_one() {
                out.push_str(&z);
            } else {
                out.push_str(&format!("{a}*{z}"));
            }
        }
        write!(f, "{out}")
    }
}

impl From<i64> for CycloScalar {
    fn from(n: i64) -> Self {
        Self::int(n)
    }
}

impl From<BigRational> for CycloScalar {
    fn from(q: BigRational) -> Self {
        Self::rational(q)
    }
}

impl From<BigInt> for CycloScalar {
    fn from(n: BigInt) -> Self {
        Self::rational(BigRational::from_integer(n))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::point::rat;

    #[test]
    fn cyclotomic_polynomials() {
        let ints = |m| -> Vec<i64> {
            cyclotomic_polynomial(m)
                .iter()
                .map(|c| c.to_integer().try_into().unwrap())
                .collect()
        };
        assert_eq!(ints(1), vec![-1, 1]);
        assert_eq!(ints(2), vec![1, 1]);
        assert_eq!(ints(4), vec![1, 0, 1]);
        assert_eq!(ints(6), vec![1, -1, 1]);
        assert_eq!(ints(12), vec![1, 0, -1, 0, 1]);
        assert_eq!(euler_phi(15), 8);
    }

    #[test]
    fn roots_of_unity_multiply() {
        for m in 1..13u64 {
            let z = CycloScalar::root_of_unity(1, m);
            let mut p = CycloScalar::int(1);
            for _ in 0..m {
                p = &p * &z;
            }
            assert_eq!(p, CycloScalar::int(1), "ζ_{m}^{m}");
        }
        let i = CycloScalar::root_of_unity(1, 4);
        assert_eq!(&i * &i, CycloScalar::int(-1));
        // ζ_6 and ζ_3 live in the same field
        let z6 = CycloScalar::root_of_unity(1, 6);
        assert_eq!(&z6 * &z6, CycloScalar::root_of_unity(1, 3));
        assert_eq!(CycloScalar::root_of_unity(1, 2), CycloScalar::int(-1));
    }

    #[test]
    fn inverses() {
        let a = CycloScalar::from_poly(5, vec![rat(1, 1), rat(2, 1), rat(-1, 3)]);
        let b = a.inv().unwrap();
        assert_eq!(&a * &b, CycloScalar::int(1));
        assert!(CycloScalar::int(0).inv().is_none());
        // 1 - ζ is invertible for m ≥ 2
        let one_minus = &CycloScalar::int(1) - &CycloScalar::root_of_unity(1, 7);
        assert_eq!(&one_minus * &one_minus.inv().unwrap(), CycloScalar::int(1));
    }

    #[test]
    fn exp_and_root_detection() {
        let q = rat(3, 4);
        let e = CycloScalar::exp_2pi_i(&q);
        assert_eq!(e, CycloScalar::root_of_unity(3, 4));
        assert_eq!(e.as_root_of_unity(), Some((3, 4)));
        assert_eq!(CycloScalar::int(-1).as_root_of_unity(), Some((1, 2)));
        assert_eq!(CycloScalar::int(1).as_root_of_unity(), Some((0, 1)));
        assert_eq!(CycloScalar::int(2).as_root_of_unity(), None);
        assert_eq!(CycloScalar::root_of_unity(2, 6).as_root_of_unity(), Some((1, 3)));
        assert_eq!(CycloScalar::exp_2pi_i(&rat(-1, 3)), CycloScalar::root_of_unity(2, 3));
    }

    #[test]
    fn display() {
        assert_eq!(CycloScalar::root_of_unity(1, 4).to_string(), "ζ4");
        assert_eq!(CycloScalar::root_of_unity(3, 4).to_string(), "-ζ4");
        assert_eq!(CycloScalar::root_of_unity(2, 4).to_string(), "-1");
        assert_eq!(CycloScalar::rational(rat(3, 2)).to_string(), "3/2");
    }
}
