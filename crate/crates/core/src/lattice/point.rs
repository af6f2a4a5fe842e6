use std::fmt;

use num::{BigInt, BigRational, One, ToPrimitive, Zero};

use super::group::{DualGroup, Subgroup};
use super::intmat;
use crate::error::{Error, Result};

/// Reduce a rational into `[0, 1)`.
pub fn frac(x: &BigRational) -> BigRational {
    x - x.floor()
}

pub fn rat(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

/// Distance from `x` to the nearest integer.
pub fn circle_dist(x: &BigRational) -> BigRational {
    let f = frac(x);
    let g = BigRational::one() - &f;
    if f < g {
        f
    } else {
        g
    }
}

/// A finite-order point of `C_T`, i.e. a homomorphism `T̂ → Q/Z`, given by
/// its values on the presentation generators.
///
/// Under the exponential `x ↦ e^{2πix}` these coordinates are also the
/// canonical lift of the point into the fundamental domain `[0,1)ⁿ`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct TorsionPoint {
    ambient: DualGroup,
    coords: Vec<BigRational>,
}

impl TorsionPoint {
    pub fn new(ambient: &DualGroup, coords: Vec<BigRational>) -> Result<Self> {
        if coords.len() != ambient.dim() {
            return Err(Error::Dimension {
                expected: ambient.dim(),
                found: coords.len(),
            });
        }
        let coords: Vec<BigRational> = coords.iter().map(frac).collect();
        for (i, c) in coords.iter().enumerate() {
            if let Some(m) = ambient.generator_order(i) {
                if !(c * BigInt::from(m)).is_integer() {
                    return Err(Error::InvalidPoint(format!(
                        "coordinate {i} = {c} is not killed by the generator order {m}"
                    )));
                }
            }
        }
        Ok(Self {
            ambient: ambient.clone(),
            coords,
        })
    }

    /// Convenience constructor from `(numerator, denominator)` pairs.
    pub fn from_fractions(ambient: &DualGroup, coords: &[(i64, i64)]) -> Result<Self> {
        if let Some((_, d)) = coords.iter().find(|(_, d)| *d == 0) {
            return Err(Error::InvalidPoint(format!("zero denominator {d}")));
        }
        Self::new(ambient, coords.iter().map(|&(n, d)| rat(n, d)).collect())
    }

    pub fn zero(ambient: &DualGroup) -> Self {
        Self {
            ambient: ambient.clone(),
            coords: vec![BigRational::zero(); ambient.dim()],
        }
    }

    pub fn ambient(&self) -> &DualGroup {
        &self.ambient
    }

    pub fn coords(&self) -> &[BigRational] {
        &self.coords
    }

    /// Coordinates along the free generators (the torus directions).
    pub fn free_coords(&self) -> &[BigRational] {
        &self.coords[..self.ambient.free_rank()]
    }

    pub fn torsion_coords(&self) -> &[BigRational] {
        &self.coords[self.ambient.free_rank()..]
    }

    /// `α(λ) ∈ [0,1)`, the value of the point on a character.
    pub fn eval(&self, lambda: &[i64]) -> BigRational {
        let s = self
            .coords
            .iter()
            .zip(lambda)
            .fold(BigRational::zero(), |acc, (c, &l)| acc + c * BigInt::from(l));
        frac(&s)
    }

    pub fn kills(&self, lambda: &[i64]) -> bool {
        self.eval(lambda).is_zero()
    }

    /// Order of the point in `C_T` (lcm of coordinate denominators).
    pub fn order(&self) -> i64 {
        self.coords.iter().fold(1, |acc, c| {
            intmat::lcm(acc, c.denom().to_i64().expect("denominator fits in i64"))
        })
    }

    pub fn sub(&self, other: &TorsionPoint) -> Result<TorsionPoint> {
        if self.ambient != other.ambient {
            return Err(Error::AmbientMismatch);
        }
        Ok(TorsionPoint {
            ambient: self.ambient.clone(),
            coords: self
                .coords
                .iter()
                .zip(&other.coords)
                .map(|(a, b)| frac(&(a - b)))
                .collect(),
        })
    }

    pub fn add(&self, other: &TorsionPoint) -> Result<TorsionPoint> {
        if self.ambient != other.ambient {
            return Err(Error::AmbientMismatch);
        }
        Ok(TorsionPoint {
            ambient: self.ambient.clone(),
            coords: self
                .coords
                .iter()
                .zip(&other.coords)
                .map(|(a, b)| frac(&(a + b)))
                .collect(),
        })
    }

    /// Sup-angular distance; points in different components of `C_T`
    /// (different torsion coordinates) are at distance 1.
    pub fn distance(&self, other: &TorsionPoint) -> BigRational {
        if self.torsion_coords() != other.torsion_coords() {
            return BigRational::one();
        }
        self.free_coords()
            .iter()
            .zip(other.free_coords())
            .map(|(a, b)| circle_dist(&(a - b)))
            .max()
            .unwrap_or_else(BigRational::zero)
    }
}

impl fmt::Display for TorsionPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s: Vec<String> = self.coords.iter().map(|c| c.to_string()).collect();
        write!(f, "({})", s.join(", "))
    }
}

/// `M(α) = {λ : α(λ) = 0}`, the annihilator of the smallest closed subgroup
/// `H(α)` with `α ∈ C_{H(α)}`. The finite group `T̂/M(α)` is `Ĥ(α)`.
pub fn annihilator_of_point(alpha: &TorsionPoint) -> Subgroup {
    let ambient = alpha.ambient();
    let n = ambient.dim();
    let order = alpha.order();
    // λ ∈ M(α) ⟺ Σ λ_j·a_j ≡ 0 (mod N) with a_j = N·α_j
    let mut row: Vec<i64> = alpha
        .coords()
        .iter()
        .map(|c| {
            (c * BigInt::from(order))
                .to_integer()
                .to_i64()
                .expect("scaled coordinate fits in i64")
        })
        .collect();
    row.push(order);
    let kernel = intmat::integer_kernel(&vec![row], n + 1);
    let gens: Vec<Vec<i64>> = kernel.iter().map(|k| k[..n].to_vec()).collect();
    Subgroup::canonical(ambient, &gens).expect("generators have ambient dimension")
}

fn check_same(alpha: &TorsionPoint, m: &Subgroup) -> Result<()> {
    if alpha.ambient() != m.ambient() {
        return Err(Error::AmbientMismatch);
    }
    Ok(())
}

/// `α ∈ C_H` for the subgroup `H` with annihilator `m_h`; equivalently
/// `H(α) ⊆ H`.
pub fn in_subvariety(alpha: &TorsionPoint, m_h: &Subgroup) -> Result<bool> {
    check_same(alpha, m_h)?;
    Ok(m_h.basis().iter().all(|g| alpha.kills(g)))
}

/// `α ≺_A β`: every `C_H` (H ∈ A) containing `β` also contains `α`.
pub fn prec(alpha: &TorsionPoint, beta: &TorsionPoint, collection: &[Subgroup]) -> Result<bool> {
    if alpha.ambient() != beta.ambient() {
        return Err(Error::AmbientMismatch);
    }
    for m in collection {
        if in_subvariety(beta, m)? && !in_subvariety(alpha, m)? {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Whether two points of `C_H` lie on the same connected component, i.e.
/// `β − α ∈ C_{H⁰}`.
pub fn same_component(alpha: &TorsionPoint, beta: &TorsionPoint, m_h: &Subgroup) -> Result<bool> {
    if !in_subvariety(alpha, m_h)? || !in_subvariety(beta, m_h)? {
        return Err(Error::Precondition(format!(
            "same_component needs both {alpha} and {beta} in C_H for H with annihilator {m_h}"
        )));
    }
    let diff = beta.sub(alpha)?;
    Ok(m_h.saturation().basis().iter().all(|g| diff.kills(g)))
}

/// One torsion point on each connected component of `C_H`. Components are
/// indexed by the characters of `sat(M_H)/M_H`.
pub fn component_representatives(m_h: &Subgroup) -> Vec<TorsionPoint> {
    let ambient = m_h.ambient();
    let n = ambient.dim();
    let sat = m_h.saturation();
    let s = sat.basis().len();
    if s == 0 {
        return vec![TorsionPoint::zero(ambient)];
    }
    // W = V⁻¹ is unimodular and its first s rows span sat(M_H).
    let smith = intmat::smith(sat.basis(), s, n);
    debug_assert!(smith.diagonal().iter().all(|&d| d == 1));
    // coordinates of M_H's generators in the basis w_1..w_s
    let coeffs: Vec<Vec<i64>> = m_h
        .basis()
        .iter()
        .map(|m| {
            let c = intmat::mat_mul(&vec![m.clone()], &smith.v).remove(0);
            debug_assert!(c[s..].iter().all(|&x| x == 0));
            c[..s].to_vec()
        })
        .collect();
    let exponent = {
        let sm = intmat::smith(&coeffs, coeffs.len(), s);
        sm.diagonal().last().copied().unwrap_or(1)
    };
    let mut reps = Vec::new();
    let mut values = vec![0i64; s];
    loop {
        // character with values (values / exponent) on w_1..w_s, zero elsewhere
        let kills_m = coeffs
            .iter()
            .all(|c| c.iter().zip(&values).map(|(a, b)| a * b).sum::<i64>() % exponent == 0);
        if kills_m {
            let coords: Vec<BigRational> = (0..n)
                .map(|i| {
                    let num: i64 = (0..s).map(|k| smith.v[i][k] * values[k]).sum();
                    frac(&rat(num, exponent))
                })
                .collect();
            reps.push(TorsionPoint::new(ambient, coords).expect("character kills the relations"));
        }
        // odometer over (Z/exponent)^s
        let mut k = 0;
        while k < s {
            values[k] += 1;
            if values[k] < exponent {
                break;
            }
            values[k] = 0;
            k += 1;
        }
        if k == s {
            break;
        }
    }
    reps.sort();
    reps.dedup();
    reps
}

/// Whether `alpha` lies on the component of `C_H` through `rep`.
pub fn on_component(alpha: &TorsionPoint, m_h: &Subgroup, rep: &TorsionPoint) -> Result<bool> {
    if !in_subvariety(alpha, m_h)? {
        return Ok(false);
    }
    same_component(alpha, rep, m_h)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn z() -> DualGroup {
        DualGroup::free(1)
    }

    #[test]
    fn annihilator_of_order_n_point() {
        for n in 1..8 {
            let a = TorsionPoint::from_fractions(&z(), &[(1, n)]).unwrap();
            let m = annihilator_of_point(&a);
            assert_eq!(m, Subgroup::canonical(&z(), &[vec![n]]).unwrap());
        }
        let zero = TorsionPoint::zero(&z());
        assert_eq!(annihilator_of_point(&zero), Subgroup::full(&z()));
    }

    #[test]
    fn annihilator_half_third() {
        // brute-force oracle: λ with |λ_i| ≤ 6 and λ₁/2 + λ₂/3 ∈ Z
        let z2 = DualGroup::free(2);
        let a = TorsionPoint::from_fractions(&z2, &[(1, 2), (1, 3)]).unwrap();
        let m = annihilator_of_point(&a);
        for l1 in -6i64..=6 {
            for l2 in -6i64..=6 {
                let killed = (3 * l1 + 2 * l2) % 6 == 0;
                assert_eq!(m.contains(&[l1, l2]), killed, "({l1},{l2})");
            }
        }
        assert_eq!(m, Subgroup::canonical(&z2, &[vec![2, 0], vec![0, 3]]).unwrap());
        assert_eq!(m.quotient_shape().torsion, vec![6]);
    }

    #[test]
    fn membership_examples() {
        let two = Subgroup::canonical(&z(), &[vec![2]]).unwrap();
        let half = TorsionPoint::from_fractions(&z(), &[(1, 2)]).unwrap();
        let third = TorsionPoint::from_fractions(&z(), &[(1, 3)]).unwrap();
        assert!(in_subvariety(&half, &two).unwrap());
        assert!(!in_subvariety(&third, &two).unwrap());
        let z2 = DualGroup::free(2);
        let p = TorsionPoint::zero(&z2);
        assert_eq!(in_subvariety(&p, &two), Err(Error::AmbientMismatch));
    }

    #[test]
    fn prec_examples() {
        let a = vec![
            Subgroup::canonical(&z(), &[vec![2]]).unwrap(),
            Subgroup::canonical(&z(), &[vec![3]]).unwrap(),
        ];
        let half = TorsionPoint::from_fractions(&z(), &[(1, 2)]).unwrap();
        let sixth = TorsionPoint::from_fractions(&z(), &[(1, 6)]).unwrap();
        assert!(prec(&half, &sixth, &a).unwrap());
        assert!(!prec(&sixth, &half, &a).unwrap());
        assert!(prec(&half, &half, &a).unwrap());
        assert!(prec(&sixth, &half, &[]).unwrap());
    }

    #[test]
    fn components_of_cyclic_subgroup() {
        let two = Subgroup::canonical(&z(), &[vec![2]]).unwrap();
        let zero = TorsionPoint::zero(&z());
        let half = TorsionPoint::from_fractions(&z(), &[(1, 2)]).unwrap();
        assert!(!same_component(&zero, &half, &two).unwrap());
        assert!(same_component(&half, &half, &two).unwrap());
        assert!(same_component(&zero, &TorsionPoint::from_fractions(&z(), &[(1, 3)]).unwrap(), &two).is_err());
        assert_eq!(component_representatives(&two), vec![zero, half]);

        let z2 = DualGroup::free(2);
        let full = Subgroup::zero(&z2);
        let a = TorsionPoint::from_fractions(&z2, &[(1, 3), (1, 5)]).unwrap();
        let b = TorsionPoint::from_fractions(&z2, &[(2, 7), (0, 1)]).unwrap();
        assert!(same_component(&a, &b, &full).unwrap());
        assert_eq!(component_representatives(&full).len(), 1);
    }

    #[test]
    fn components_count_matches_torsion() {
        let z2 = DualGroup::free(2);
        let m = Subgroup::canonical(&z2, &[vec![2, 4]]).unwrap();
        // sat = <(1,2)>, sat/M = Z/2
        let reps = component_representatives(&m);
        assert_eq!(reps.len(), 2);
        for r in &reps {
            assert!(in_subvariety(r, &m).unwrap());
        }
        assert!(!same_component(&reps[0], &reps[1], &m).unwrap());
    }
}
