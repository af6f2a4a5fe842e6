//! Finite T-CW complexes as cell censuses `D^{n_i} × T/H_i`.

use crate::error::{Error, Result};
use crate::lattice::{in_subvariety, DualGroup, Subgroup, TorsionPoint};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Cell {
    pub dim: usize,
    /// Annihilator `M_{H_i}` of the isotropy group.
    pub isotropy: Subgroup,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TCWComplex {
    ambient: DualGroup,
    cells: Vec<Cell>,
}

/// Selects a fixed subcomplex: by a subgroup `K` (given by `M_K`) or by a
/// point `α`.
#[derive(Debug, Clone, Copy)]
pub enum Selector<'a> {
    Subgroup(&'a Subgroup),
    Point(&'a TorsionPoint),
}

impl TCWComplex {
    pub fn new(ambient: &DualGroup, cells: Vec<Cell>) -> Result<Self> {
        if cells.iter().any(|c| c.isotropy.ambient() != ambient) {
            return Err(Error::AmbientMismatch);
        }
        Ok(TCWComplex {
            ambient: ambient.clone(),
            cells,
        })
    }

    pub fn ambient(&self) -> &DualGroup {
        &self.ambient
    }

    pub fn cells(&self) -> &[Cell] {
        &self.cells
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    fn filtered(&self, keep: impl Fn(&Cell) -> Result<bool>) -> Result<Self> {
        let mut cells = Vec::new();
        for c in &self.cells {
            if keep(c)? {
                cells.push(c.clone());
            }
        }
        Ok(TCWComplex {
            ambient: self.ambient.clone(),
            cells,
        })
    }
}

/// `X^K` (cells with `K ⊆ H_i`, i.e. `M_{H_i} ⊆ M_K`) or `X^α` (cells with
/// `α ∈ C_{H_i}`).
pub fn fixed_subcomplex(x: &TCWComplex, selector: Selector<'_>) -> Result<TCWComplex> {
    match selector {
        Selector::Subgroup(m_k) => {
            if m_k.ambient() != x.ambient() {
                return Err(Error::AmbientMismatch);
            }
            x.filtered(|c| c.isotropy.is_subgroup_of(m_k))
        }
        Selector::Point(alpha) => {
            if alpha.ambient() != x.ambient() {
                return Err(Error::AmbientMismatch);
            }
            x.filtered(|c| in_subvariety(alpha, &c.isotropy))
        }
    }
}

/// Cells whose orbit `T/H_i` has dimension `≤ 1`; `dim T/H = rank M_H`.
pub fn one_skeleton(x: &TCWComplex) -> TCWComplex {
    x.filtered(|c| Ok(c.isotropy.rank() <= 1))
        .expect("rank filter cannot fail")
}

/// The deduplicated isotropy collection `A`, in canonical order.
pub fn isotropy_collection(x: &TCWComplex) -> Vec<Subgroup> {
    let mut out: Vec<Subgroup> = Vec::new();
    for c in &x.cells {
        if !out.contains(&c.isotropy) {
            out.push(c.isotropy.clone());
        }
    }
    out.sort_by(|a, b| a.basis().cmp(b.basis()));
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::{annihilator_of_point, point::rat};

    fn cp1() -> TCWComplex {
        let g = DualGroup::free(1);
        let fixed = Subgroup::zero(&g);
        let free = Subgroup::full(&g);
        TCWComplex::new(
            &g,
            vec![
                Cell { dim: 0, isotropy: fixed.clone() },
                Cell { dim: 0, isotropy: fixed },
                Cell { dim: 1, isotropy: free },
            ],
        )
        .unwrap()
    }

    fn orbit(n: i64) -> TCWComplex {
        let g = DualGroup::free(1);
        let m = Subgroup::canonical(&g, &[vec![n]]).unwrap();
        TCWComplex::new(&g, vec![Cell { dim: 0, isotropy: m }]).unwrap()
    }

    #[test]
    fn fixed_points_of_an_orbit() {
        let x = orbit(3);
        let g = x.ambient().clone();
        let third = TorsionPoint::new(&g, vec![rat(1, 3)]).unwrap();
        let half = TorsionPoint::new(&g, vec![rat(1, 2)]).unwrap();
        assert_eq!(fixed_subcomplex(&x, Selector::Point(&third)).unwrap(), x);
        assert!(fixed_subcomplex(&x, Selector::Point(&half)).unwrap().is_empty());
    }

    #[test]
    fn fully_fixed_cells() {
        let x = cp1();
        let t = Subgroup::zero(x.ambient());
        assert_eq!(fixed_subcomplex(&x, Selector::Subgroup(&t)).unwrap().cells().len(), 2);
        let trivial = Subgroup::full(x.ambient());
        assert_eq!(fixed_subcomplex(&x, Selector::Subgroup(&trivial)).unwrap(), x);
    }

    #[test]
    fn point_selector_matches_its_annihilator() {
        let x = cp1();
        for q in [rat(0, 1), rat(1, 2), rat(2, 5)] {
            let a = TorsionPoint::new(x.ambient(), vec![q]).unwrap();
            let m = annihilator_of_point(&a);
            assert_eq!(
                fixed_subcomplex(&x, Selector::Point(&a)).unwrap(),
                fixed_subcomplex(&x, Selector::Subgroup(&m)).unwrap()
            );
        }
    }

    #[test]
    fn skeleta() {
        let x = cp1();
        assert_eq!(one_skeleton(&x), x);
        let g = DualGroup::free(2);
        let y = TCWComplex::new(
            &g,
            vec![
                Cell { dim: 0, isotropy: Subgroup::zero(&g) },
                Cell { dim: 2, isotropy: Subgroup::full(&g) },
            ],
        )
        .unwrap();
        assert_eq!(one_skeleton(&y).cells().len(), 1);
    }

    #[test]
    fn isotropy_collections() {
        let x = cp1();
        let a = isotropy_collection(&x);
        assert_eq!(a.len(), 2);
        assert!(a.contains(&Subgroup::zero(x.ambient())));
        assert!(a.contains(&Subgroup::full(x.ambient())));
        let o = orbit(5);
        assert_eq!(
            isotropy_collection(&o),
            vec![Subgroup::canonical(o.ambient(), &[vec![5]]).unwrap()]
        );
    }
}
