//! Smooth complete fans and their moment graphs.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::gkm::{Edge, MomentGraph, Vertex};
use crate::lattice::intmat;
use crate::lattice::{DualGroup, Subgroup};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Fan {
    dim: usize,
    rays: Vec<Vec<i64>>,
    max_cones: Vec<Vec<usize>>,
}

/// Where a fan fails validation: a ray or a maximal cone.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FanPart {
    Ray(usize),
    Cone(usize),
}

fn det(m: &[Vec<i64>]) -> i128 {
    // Bareiss fraction-free elimination
    let n = m.len();
    let mut a: Vec<Vec<i128>> = m.iter().map(|r| r.iter().map(|&x| i128::from(x)).collect()).collect();
    let mut sign = 1;
    let mut prev = 1i128;
    for k in 0..n {
        if a[k][k] == 0 {
            let Some(p) = (k + 1..n).find(|&i| a[i][k] != 0) else {
                return 0;
            };
            a.swap(k, p);
            sign = -sign;
        }
        for i in k + 1..n {
            for j in k + 1..n {
                a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) / prev;
            }
        }
        prev = a[k][k];
    }
    if n == 0 {
        1
    } else {
        sign * a[n - 1][n - 1]
    }
}

impl Fan {
    /// Validate a smooth fan whose facets are each shared by exactly two
    /// maximal cones. Errors carry the offending part.
    pub fn new(dim: usize, rays: Vec<Vec<i64>>, max_cones: Vec<Vec<usize>>) -> std::result::Result<Self, (FanPart, Error)> {
        let bad = |part, msg: String| (part, Error::InvalidFan(msg));
        for (i, r) in rays.iter().enumerate() {
            if r.len() != dim {
                return Err(bad(FanPart::Ray(i), format!("ray {i} has {} entries, expected {dim}", r.len())));
            }
            if r.iter().fold(0, |g, &x| intmat::gcd(g, x)) != 1 {
                return Err(bad(FanPart::Ray(i), format!("ray {i} = {r:?} is not primitive")));
            }
        }
        if max_cones.is_empty() {
            return Err(bad(FanPart::Cone(0), "fan has no maximal cones".into()));
        }
        let mut facets: BTreeMap<Vec<usize>, Vec<usize>> = BTreeMap::new();
        for (c, cone) in max_cones.iter().enumerate() {
            let mut sorted = cone.clone();
            sorted.sort_unstable();
            sorted.dedup();
            if sorted.len() != dim || cone.len() != dim {
                return Err(bad(FanPart::Cone(c), format!("cone {c} needs {dim} distinct rays")));
            }
            if let Some(&r) = cone.iter().find(|&&r| r >= rays.len()) {
                return Err(bad(FanPart::Cone(c), format!("cone {c} references missing ray {r}")));
            }
            let m: Vec<Vec<i64>> = cone.iter().map(|&r| rays[r].clone()).collect();
            if det(&m).abs() != 1 {
                return Err(bad(FanPart::Cone(c), format!("cone {c} is not smooth (rays are not a lattice basis)")));
            }
            for skip in 0..dim {
                let facet: Vec<usize> = sorted.iter().enumerate().filter(|&(k, _)| k != skip).map(|(_, &r)| r).collect();
                facets.entry(facet).or_default().push(c);
            }
        }
        for (facet, cones) in &facets {
            if cones.len() != 2 {
                let c = cones[cones.len().min(2) - 1];
                return Err(bad(
                    FanPart::Cone(c),
                    format!(
                        "facet with rays {facet:?} lies in {} maximal cones {cones:?}; a complete fan needs exactly 2",
                        cones.len()
                    ),
                ));
            }
        }
        Ok(Fan { dim, rays, max_cones })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn rays(&self) -> &[Vec<i64>] {
        &self.rays
    }

    pub fn max_cones(&self) -> &[Vec<usize>] {
        &self.max_cones
    }

    /// The fan of `CPⁿ`: rays `e_1..e_n, −Σe_i`.
    pub fn projective(n: usize) -> Self {
        let mut rays: Vec<Vec<i64>> = intmat::identity(n);
        rays.push(vec![-1; n]);
        let cones = (0..=n).map(|skip| (0..=n).filter(|&r| r != skip).collect()).collect();
        Fan::new(n, rays, cones).expect("projective fan is smooth and complete")
    }

    /// The fan of `CP¹ × CP¹`.
    pub fn p1_times_p1() -> Self {
        Fan::new(
            2,
            vec![vec![1, 0], vec![-1, 0], vec![0, 1], vec![0, -1]],
            vec![vec![0, 2], vec![2, 1], vec![1, 3], vec![3, 0]],
        )
        .expect("valid fan")
    }

    /// The Hirzebruch surface `F_a`.
    pub fn hirzebruch(a: i64) -> Self {
        Fan::new(
            2,
            vec![vec![1, 0], vec![0, 1], vec![-1, a], vec![0, -1]],
            vec![vec![0, 1], vec![1, 2], vec![2, 3], vec![3, 0]],
        )
        .expect("valid fan")
    }
}

fn cone_label(cone: &[usize]) -> String {
    let parts: Vec<String> = cone.iter().map(usize::to_string).collect();
    format!("c{}", parts.join("_"))
}

/// One vertex per maximal cone; cones sharing a facet are joined by the
/// primitive character vanishing on the facet, positive on the first
/// listed cone.
pub fn fan_to_graph(f: &Fan) -> Result<MomentGraph> {
    let ambient = DualGroup::free(f.dim);
    let vertices: Vec<Vertex> = f
        .max_cones
        .iter()
        .map(|c| Vertex {
            label: cone_label(c),
            isotropy: Subgroup::zero(&ambient),
        })
        .collect();
    let mut edges = Vec::new();
    for i in 0..f.max_cones.len() {
        for j in i + 1..f.max_cones.len() {
            let shared: Vec<usize> = f.max_cones[i].iter().copied().filter(|r| f.max_cones[j].contains(r)).collect();
            if shared.len() + 1 != f.dim {
                continue;
            }
            let facet: Vec<Vec<i64>> = shared.iter().map(|&r| f.rays[r].clone()).collect();
            let kernel = intmat::integer_kernel(&facet, f.dim);
            let mut w = kernel.into_iter().next().expect("facet of a smooth cone has corank 1");
            let extra = f.max_cones[i].iter().find(|r| !shared.contains(r)).expect("cone has one more ray");
            let pairing: i64 = w.iter().zip(&f.rays[*extra]).map(|(a, b)| a * b).sum();
            if pairing < 0 {
                w.iter_mut().for_each(|x| *x = -*x);
            }
            edges.push(Edge { u: i, v: j, weight: w });
        }
    }
    MomentGraph::new(&ambient, vertices, edges)
}
