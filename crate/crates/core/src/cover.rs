//! Finite ball covers of `C_T` adapted to a collection of subgroups.
//!
//! Distances use the sup-angular metric on the unitary slice: each free
//! coordinate is a circle of circumference 1, and points whose torsion
//! coordinates differ lie on different components of `C_T` (distance 1).

use std::fmt;

use num::{BigRational, One, Signed, Zero};
use rayon::prelude::*;

use crate::algebra::linalg;
use crate::error::{Error, Result};
use crate::lattice::{
    component_representatives, in_subvariety, intmat, on_component, prec, same_component,
    DualGroup, Subgroup, TorsionPoint,
};

fn half() -> BigRational {
    BigRational::new(1.into(), 2.into())
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Ball {
    pub center: TorsionPoint,
    pub radius: BigRational,
}

impl Ball {
    /// A ball satisfying `0 < radius < 1/2`.
    pub fn new(center: TorsionPoint, radius: BigRational) -> Result<Self> {
        if radius <= BigRational::zero() || radius >= half() {
            return Err(Error::InvalidCover(format!(
                "radius {radius} at {center} must lie in (0, 1/2)"
            )));
        }
        Ok(Ball { center, radius })
    }

    /// Skip the smallness check (for building counterexamples).
    pub fn unchecked(center: TorsionPoint, radius: BigRational) -> Self {
        Ball { center, radius }
    }

    /// Exact open-ball overlap test.
    pub fn overlaps(&self, other: &Ball) -> bool {
        self.center.torsion_coords() == other.center.torsion_coords()
            && self.center.distance(&other.center) < &self.radius + &other.radius
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Cover {
    ambient: DualGroup,
    balls: Vec<Ball>,
    collection: Vec<Subgroup>,
}

impl Cover {
    pub fn new(ambient: &DualGroup, balls: Vec<Ball>, collection: Vec<Subgroup>) -> Result<Self> {
        for b in &balls {
            if b.center.ambient() != ambient {
                return Err(Error::AmbientMismatch);
            }
        }
        if collection.iter().any(|m| m.ambient() != ambient) {
            return Err(Error::AmbientMismatch);
        }
        for (i, a) in balls.iter().enumerate() {
            if balls[..i].iter().any(|b| b.center == a.center) {
                return Err(Error::InvalidCover(format!("center {} listed twice", a.center)));
            }
        }
        Ok(Cover {
            ambient: ambient.clone(),
            balls,
            collection,
        })
    }

    pub fn ambient(&self) -> &DualGroup {
        &self.ambient
    }

    pub fn balls(&self) -> &[Ball] {
        &self.balls
    }

    pub fn collection(&self) -> &[Subgroup] {
        &self.collection
    }

    pub fn centers(&self) -> Vec<&TorsionPoint> {
        self.balls.iter().map(|b| &b.center).collect()
    }

    pub fn ball(&self, center: &TorsionPoint) -> Option<&Ball> {
        self.balls.iter().find(|b| &b.center == center)
    }

    /// Every radius multiplied by `factor` (a refinement when `factor ≤ 1`).
    pub fn scaled(&self, factor: &BigRational) -> Cover {
        Cover {
            ambient: self.ambient.clone(),
            balls: self
                .balls
                .iter()
                .map(|b| Ball::unchecked(b.center.clone(), &b.radius * factor))
                .collect(),
            collection: self.collection.clone(),
        }
    }
}

/// `min_{y ∈ R^k} ‖r − Bᵀy‖_∞` by enumerating vertices of the LP in
/// `(y, t)`. The rows of `basis` must be linearly independent.
fn sup_distance_to_subspace(r: &[BigRational], basis: &[Vec<i64>]) -> BigRational {
    let p = r.len();
    let k = basis.len();
    if k == 0 {
        return r.iter().map(|x| x.abs()).max().unwrap_or_else(BigRational::zero);
    }
    // constraint (i, σ): σ·(r_i − Σ_j B_ji y_j) ≤ t
    let constraints: Vec<(usize, i64)> = (0..p).flat_map(|i| [(i, 1), (i, -1)]).collect();
    let q = |n: i64| BigRational::from_integer(n.into());
    let mut best: Option<BigRational> = None;
    let mut subset: Vec<usize> = (0..=k).collect();
    loop {
        // tight: σ Σ_j B_ji y_j + t = σ r_i
        let mut rows: Vec<Vec<BigRational>> = subset
            .iter()
            .map(|&c| {
                let (i, s) = constraints[c];
                let mut row: Vec<BigRational> = basis.iter().map(|b| q(s * b[i])).collect();
                row.push(BigRational::one());
                row.push(&r[i] * q(s));
                row
            })
            .collect();
        let pivots = linalg::rref(&mut rows, k + 2);
        if pivots.len() == k + 1 && pivots[k] == k {
            let sol: Vec<BigRational> = rows.iter().map(|row| row[k + 1].clone()).collect();
            let t = &sol[k];
            let feasible = (0..p).all(|i| {
                let v: BigRational = &r[i] - (0..k).map(|j| q(basis[j][i]) * &sol[j]).sum::<BigRational>();
                v.abs() <= *t
            });
            if feasible && best.as_ref().is_none_or(|b| t < b) {
                best = Some(t.clone());
            }
        }
        // next (k+1)-subset of the 2p constraints
        let n = constraints.len();
        let mut i = k + 1;
        loop {
            if i == 0 {
                return best.expect("the LP has a vertex");
            }
            i -= 1;
            if subset[i] < n - (k + 1 - i) {
                break;
            }
        }
        subset[i] += 1;
        for j in i + 1..=k {
            subset[j] = subset[j - 1] + 1;
        }
    }
}

/// Exact sup-angular distance from `α` to the component of `C_H` through
/// `component_rep`.
pub fn dist_to_component(
    alpha: &TorsionPoint,
    m_h: &Subgroup,
    component_rep: &TorsionPoint,
) -> Result<BigRational> {
    if !in_subvariety(component_rep, m_h)? {
        return Err(Error::Precondition(format!(
            "{component_rep} is not a point of C_H for annihilator {m_h}"
        )));
    }
    if alpha.ambient() != m_h.ambient() {
        return Err(Error::AmbientMismatch);
    }
    if alpha.torsion_coords() != component_rep.torsion_coords() {
        return Ok(BigRational::one());
    }
    let ambient = m_h.ambient();
    let p = ambient.free_rank();
    // the component is rep + (span_R B mod Zᵖ), B a basis of the free kernel of sat(M_H)
    let sat_free: Vec<Vec<i64>> = m_h
        .saturation()
        .basis()
        .iter()
        .map(|s| s[..p].to_vec())
        .filter(|s| s.iter().any(|&x| x != 0))
        .collect();
    let basis = if sat_free.is_empty() {
        intmat::identity(p)
    } else {
        intmat::integer_kernel(&sat_free, p)
    };
    let d: Vec<BigRational> = alpha
        .free_coords()
        .iter()
        .zip(component_rep.free_coords())
        .map(|(a, b)| a - b)
        .collect();
    // reducing y into [0,1)^k bounds the integer shift z
    let bound: Vec<i64> = (0..p)
        .map(|i| 2 + basis.iter().map(|b| b[i].abs()).sum::<i64>())
        .collect();
    let mut z: Vec<i64> = bound.iter().map(|b| -b).collect();
    let mut best = BigRational::one();
    loop {
        let r: Vec<BigRational> = d
            .iter()
            .zip(&z)
            .map(|(x, &zi)| x - BigRational::from_integer(zi.into()))
            .collect();
        let v = sup_distance_to_subspace(&r, &basis);
        if v < best {
            best = v;
        }
        let mut i = 0;
        while i < p {
            z[i] += 1;
            if z[i] <= bound[i] {
                break;
            }
            z[i] = -bound[i];
            i += 1;
        }
        if i == p {
            break;
        }
    }
    Ok(best)
}

/// `min dist(α, D)` over components `D` of the `C_H` (H ∈ A) missing `α`;
/// `None` if `α` lies on every component.
pub fn min_distance_to_foreign_components(
    alpha: &TorsionPoint,
    collection: &[Subgroup],
) -> Result<Option<BigRational>> {
    let mut best: Option<BigRational> = None;
    for m in collection {
        for rep in component_representatives(m) {
            if on_component(alpha, m, &rep)? {
                continue;
            }
            let d = dist_to_component(alpha, m, &rep)?;
            if best.as_ref().is_none_or(|b| &d < b) {
                best = Some(d);
            }
        }
    }
    Ok(best)
}

/// One ball per sample point, of radius half the admissible bound
/// `min(½·dist to foreign components, ½)`.
pub fn build_adapted(collection: &[Subgroup], sample: &[TorsionPoint]) -> Result<Cover> {
    let Some(first) = sample.first() else {
        return Err(Error::Precondition("sample is empty".into()));
    };
    let ambient = first.ambient().clone();
    if sample.iter().any(|a| a.ambient() != &ambient)
        || collection.iter().any(|m| m.ambient() != &ambient)
    {
        return Err(Error::AmbientMismatch);
    }
    let radii: Vec<Result<BigRational>> = sample
        .par_iter()
        .map(|alpha| {
            let bound = match min_distance_to_foreign_components(alpha, collection)? {
                Some(d) => (d * half()).min(half()),
                None => half(),
            };
            Ok(bound * half())
        })
        .collect();
    let mut balls = Vec::with_capacity(sample.len());
    for (alpha, r) in sample.iter().zip(radii) {
        balls.push(Ball::new(alpha.clone(), r?)?);
    }
    Cover::new(&ambient, balls, collection.to_vec())
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Violation {
    /// Which condition of the adapted-cover definition fails (1–4).
    pub condition: u8,
    pub alpha: TorsionPoint,
    pub beta: Option<TorsionPoint>,
    pub witness: Option<Subgroup>,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "condition {}: {}", self.condition, self.alpha)?;
        if let Some(b) = &self.beta {
            write!(f, " / {b}")?;
        }
        if let Some(w) = &self.witness {
            write!(f, " (witness subgroup {w})")?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct AdaptedReport {
    pub violations: Vec<Violation>,
}

impl AdaptedReport {
    pub fn is_adapted(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn condition(&self, c: u8) -> impl Iterator<Item = &Violation> {
        self.violations.iter().filter(move |v| v.condition == c)
    }
}

/// Check the four adapted-cover conditions over the listed centers.
pub fn verify_adapted(cover: &Cover, collection: &[Subgroup]) -> Result<AdaptedReport> {
    if collection.iter().any(|m| m.ambient() != cover.ambient()) {
        return Err(Error::AmbientMismatch);
    }
    let mut balls: Vec<&Ball> = cover.balls().iter().collect();
    balls.sort_by(|a, b| a.center.cmp(&b.center));

    let mut out: Vec<Violation> = balls
        .iter()
        .filter(|b| b.radius <= BigRational::zero() || b.radius >= half())
        .map(|b| Violation {
            condition: 1,
            alpha: b.center.clone(),
            beta: None,
            witness: None,
        })
        .collect();

    let pairs: Vec<(usize, usize)> = (0..balls.len())
        .flat_map(|i| (0..balls.len()).map(move |j| (i, j)))
        .filter(|(i, j)| i != j)
        .collect();
    let per_pair: Vec<Result<Vec<Violation>>> = pairs
        .par_iter()
        .map(|&(i, j)| {
            let (a, b) = (balls[i], balls[j]);
            let mut v = Vec::new();
            let overlap = a.overlaps(b);
            let a_prec_b = prec(&a.center, &b.center, collection)?;
            if i < j && overlap {
                let b_prec_a = prec(&b.center, &a.center, collection)?;
                if !a_prec_b && !b_prec_a {
                    v.push(Violation {
                        condition: 2,
                        alpha: a.center.clone(),
                        beta: Some(b.center.clone()),
                        witness: None,
                    });
                }
                for m in collection {
                    if in_subvariety(&a.center, m)?
                        && in_subvariety(&b.center, m)?
                        && !same_component(&a.center, &b.center, m)?
                    {
                        v.push(Violation {
                            condition: 4,
                            alpha: a.center.clone(),
                            beta: Some(b.center.clone()),
                            witness: Some(m.clone()),
                        });
                    }
                }
            }
            if a_prec_b {
                for m in collection {
                    if in_subvariety(&a.center, m)? && !in_subvariety(&b.center, m)? {
                        // U_β ∩ C_H = ∅ ⟺ radius ≤ dist(β, C_H) for an open ball
                        let d = min_distance_to_subvariety(&b.center, m)?;
                        if b.radius > d {
                            v.push(Violation {
                                condition: 3,
                                alpha: a.center.clone(),
                                beta: Some(b.center.clone()),
                                witness: Some(m.clone()),
                            });
                        }
                    }
                }
            }
            Ok(v)
        })
        .collect();
    for v in per_pair {
        out.extend(v?);
    }
    out.sort_by(|x, y| {
        x.condition
            .cmp(&y.condition)
            .then_with(|| x.alpha.cmp(&y.alpha))
            .then_with(|| x.beta.cmp(&y.beta))
    });
    out.dedup();
    Ok(AdaptedReport { violations: out })
}

/// `dist(α, C_H)`, the minimum over all components.
pub fn min_distance_to_subvariety(alpha: &TorsionPoint, m_h: &Subgroup) -> Result<BigRational> {
    let mut best = BigRational::one();
    for rep in component_representatives(m_h) {
        let d = dist_to_component(alpha, m_h, &rep)?;
        if d < best {
            best = d;
        }
    }
    Ok(best)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::point::{circle_dist, rat};

    fn pt(g: &DualGroup, c: &[(i64, i64)]) -> TorsionPoint {
        TorsionPoint::from_fractions(g, c).unwrap()
    }

    /// Dense oracle: minimize over points of the component on the grid
    /// `rep + (1/den)Zᵖ`.
    fn oracle(alpha: &TorsionPoint, m: &Subgroup, rep: &TorsionPoint, den: i64) -> BigRational {
        let g = alpha.ambient();
        let p = g.free_rank();
        let sat = m.saturation();
        let mut best = BigRational::one();
        let mut idx = vec![0i64; p];
        loop {
            let coords: Vec<BigRational> = (0..g.dim())
                .map(|i| if i < p { &rep.coords()[i] + rat(idx[i], den) } else { rep.coords()[i].clone() })
                .collect();
            let x = TorsionPoint::new(g, coords).unwrap();
            let diff = x.sub(rep).unwrap();
            if sat.basis().iter().all(|s| diff.kills(s)) {
                let d = x
                    .free_coords()
                    .iter()
                    .zip(alpha.free_coords())
                    .map(|(a, b)| circle_dist(&(a - b)))
                    .max()
                    .unwrap_or_else(BigRational::zero);
                if d < best {
                    best = d;
                }
            }
            let mut i = 0;
            while i < p {
                idx[i] += 1;
                if idx[i] < den {
                    break;
                }
                idx[i] = 0;
                i += 1;
            }
            if i == p {
                return best;
            }
        }
    }

    #[test]
    fn distances_on_the_circle() {
        let g = DualGroup::free(1);
        let m = Subgroup::canonical(&g, &[vec![2]]).unwrap();
        let zero = TorsionPoint::zero(&g);
        let a = pt(&g, &[(1, 4)]);
        assert_eq!(dist_to_component(&a, &m, &zero).unwrap(), rat(1, 4));
        assert_eq!(dist_to_component(&zero, &m, &zero).unwrap(), rat(0, 1));
        assert!(dist_to_component(&zero, &m, &a).is_err());
    }

    #[test]
    fn distance_to_the_diagonal() {
        let g = DualGroup::free(2);
        let m = Subgroup::canonical(&g, &[vec![1, -1]]).unwrap();
        let a = pt(&g, &[(1, 2), (0, 1)]);
        let zero = TorsionPoint::zero(&g);
        assert_eq!(dist_to_component(&a, &m, &zero).unwrap(), rat(1, 4));
    }

    #[test]
    fn distances_match_dense_enumeration() {
        let g = DualGroup::free(2);
        let subgroups = [vec![vec![1, -1]], vec![vec![2, 1]], vec![vec![2, 0], vec![0, 3]], vec![vec![1, 2]]];
        let points = [pt(&g, &[(1, 3), (1, 5)]), pt(&g, &[(3, 4), (1, 8)]), pt(&g, &[(0, 1), (1, 2)])];
        for gens in &subgroups {
            let m = Subgroup::canonical(&g, gens).unwrap();
            for rep in component_representatives(&m) {
                for a in &points {
                    let exact = dist_to_component(a, &m, &rep).unwrap();
                    let dense = oracle(a, &m, &rep, 30);
                    // the grid can only overshoot, by at most one grid step
                    assert!(exact <= dense, "{a} {m} {rep}: {exact} > {dense}");
                    assert!(&dense - &exact <= rat(1, 30), "{a} {m} {rep}: {exact} vs {dense}");
                }
            }
        }
    }

    #[test]
    fn build_on_the_circle() {
        let g = DualGroup::free(1);
        let a = vec![Subgroup::canonical(&g, &[vec![2]]).unwrap()];
        let sample = vec![pt(&g, &[(0, 1)]), pt(&g, &[(1, 2)]), pt(&g, &[(1, 4)])];
        let cover = build_adapted(&a, &sample).unwrap();
        let radius = |c: &TorsionPoint| cover.ball(c).unwrap().radius.clone();
        assert_eq!(radius(&sample[0]), rat(1, 8));
        assert_eq!(radius(&sample[1]), rat(1, 8));
        assert_eq!(radius(&sample[2]), rat(1, 16));
        assert!(verify_adapted(&cover, &a).unwrap().is_adapted());
        let shrunk = cover.scaled(&rat(1, 2));
        assert!(verify_adapted(&shrunk, &a).unwrap().is_adapted());

        let free = build_adapted(&[], &sample).unwrap();
        assert!(free.balls().iter().all(|b| b.radius == rat(1, 4)));
        assert!(build_adapted(&a, &[]).is_err());
    }

    #[test]
    fn each_condition_can_fail() {
        let g = DualGroup::free(1);
        let a = vec![Subgroup::canonical(&g, &[vec![2]]).unwrap()];
        let (zero, half_pt, quarter) = (pt(&g, &[(0, 1)]), pt(&g, &[(1, 2)]), pt(&g, &[(1, 4)]));

        let c1 = Cover::new(&g, vec![Ball::unchecked(zero.clone(), rat(1, 2))], a.clone()).unwrap();
        assert_eq!(verify_adapted(&c1, &a).unwrap().condition(1).count(), 1);

        // two points of different components of C_{Z/2} with overlapping balls
        let c4 = Cover::new(
            &g,
            vec![
                Ball::new(zero.clone(), rat(3, 8)).unwrap(),
                Ball::new(half_pt.clone(), rat(3, 8)).unwrap(),
            ],
            a.clone(),
        )
        .unwrap();
        let r4 = verify_adapted(&c4, &a).unwrap();
        assert_eq!(r4.condition(4).count(), 1);

        // the ball at 1/4 reaches C_{Z/2}
        let c3 = Cover::new(
            &g,
            vec![
                Ball::new(zero.clone(), rat(1, 16)).unwrap(),
                Ball::new(quarter.clone(), rat(3, 8)).unwrap(),
            ],
            a.clone(),
        )
        .unwrap();
        let r3 = verify_adapted(&c3, &a).unwrap();
        assert_eq!(r3.condition(3).count(), 1);
        assert_eq!(r3.condition(2).count(), 0);

        // incomparable points: 1/2 ∈ C_{Z/2} only, 1/3 ∈ C_{Z/3} only
        let b = vec![
            Subgroup::canonical(&g, &[vec![2]]).unwrap(),
            Subgroup::canonical(&g, &[vec![3]]).unwrap(),
        ];
        let c2 = Cover::new(
            &g,
            vec![
                Ball::new(half_pt, rat(1, 8)).unwrap(),
                Ball::new(pt(&g, &[(1, 3)]), rat(1, 8)).unwrap(),
            ],
            b.clone(),
        )
        .unwrap();
        assert_eq!(verify_adapted(&c2, &b).unwrap().condition(2).count(), 1);
    }
}
