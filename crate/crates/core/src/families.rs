//! Named example sets used by the CLI, the verify suite and the examples.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::group::{normalize_subset, subgroup_closure, Element, GroupSpec, Subgroup};

/// A set `E ⊆ G`, with the subgroup it multi-tiles by when that is part of
/// the construction.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Instance {
    pub group: GroupSpec,
    pub e: Vec<Element>,
    #[serde(skip)]
    pub subgroup: Option<Subgroup>,
}

fn el(v: &[u64]) -> Element {
    Element::new(v.to_vec())
}

fn is_prime(p: u64) -> bool {
    p >= 2 && (2..).take_while(|d| d * d <= p).all(|d| !p.is_multiple_of(d))
}

fn odd_prime(p: u64) -> Result<()> {
    if p < 3 || !is_prime(p) {
        return Err(Error::Precondition(format!("{p} is not an odd prime")));
    }
    Ok(())
}

fn instance(group: GroupSpec, e: Vec<Element>, gens: Option<&[Element]>) -> Result<Instance> {
    let subgroup = gens.map(|g| subgroup_closure(&group, g)).transpose()?;
    Ok(Instance { e: normalize_subset(e)?, group, subgroup })
}

/// `Z_m × {0}` in `Z_m²`.
fn horizontal(m: u64) -> Result<(GroupSpec, Vec<Element>)> {
    Ok((GroupSpec::new(vec![m, m])?, vec![el(&[1, 0])]))
}

/// `{(0,0),(0,1)}, {(0,0),(1,0)}, {(0,0),(1,1)}` in `Z2²`: no common basis partner.
pub fn nosimulbasis_triple() -> (GroupSpec, Vec<Vec<Element>>) {
    let g = GroupSpec::new(vec![2, 2]).expect("valid moduli");
    let sets = vec![
        vec![el(&[0, 0]), el(&[0, 1])],
        vec![el(&[0, 0]), el(&[1, 0])],
        vec![el(&[0, 0]), el(&[1, 1])],
    ];
    (g, sets)
}

/// `(Z_m × {0}) ∪ {(0,1)}` in `Z_m²`, `m ≥ 2`. Its Riesz ratio is at least `(m+1)/2`.
pub fn cond_to_infty(m: u64) -> Result<Instance> {
    if m < 2 {
        return Err(Error::Precondition("need m >= 2".into()));
    }
    let (g, gens) = horizontal(m)?;
    let mut e: Vec<Element> = (0..m).map(|x| el(&[x, 0])).collect();
    e.push(el(&[0, 1]));
    instance(g, e, Some(&gens))
}

/// `{0,1} ⊆ Z_p`.
pub fn size_two(p: u64) -> Result<Instance> {
    if p < 2 {
        return Err(Error::Precondition("need p >= 2".into()));
    }
    instance(GroupSpec::cyclic(p)?, vec![el(&[0]), el(&[1])], None)
}

/// `{0,1} × Z_p` in `Z_p²`.
pub fn cart_close_spec(p: u64) -> Result<Instance> {
    odd_prime(p)?;
    let (g, gens) = horizontal(p)?;
    let e = (0..2).flat_map(|x| (0..p).map(move |y| el(&[x, y]))).collect();
    instance(g, e, Some(&gens))
}

/// `({0,1} × (Z_p \ {0})) ∪ {(1,0),(2,0)}`, a level-2 multi-tile by `Z_p × {0}`
/// with a single section class.
pub fn multi_tile_nearly_spec(p: u64) -> Result<Instance> {
    odd_prime(p)?;
    let (g, gens) = horizontal(p)?;
    let mut e = vec![el(&[1, 0]), el(&[2, 0])];
    e.extend((1..p).flat_map(|y| [el(&[0, y]), el(&[1, y])]));
    instance(g, e, Some(&gens))
}

/// `({0,1} × (Z_m \ {0})) ∪ {(0,0),(2,0)}`, a level-2 multi-tile by
/// `Z_m × {0}`; the sections `{0,1}` and `{0,2}` differ by translation only when `m = 3`.
pub fn two_cross_sections(m: u64) -> Result<Instance> {
    if m < 3 {
        return Err(Error::Precondition("need m >= 3".into()));
    }
    let (g, gens) = horizontal(m)?;
    let mut e = vec![el(&[0, 0]), el(&[2, 0])];
    e.extend((1..m).flat_map(|y| [el(&[0, y]), el(&[1, y])]));
    instance(g, e, Some(&gens))
}

/// `({0} × Z_p) ∪ (1,1)Z_p ∪ {(1,0)}` in `Z_p²`: level 2, no known bound on `ρ`.
pub fn q3_family(p: u64) -> Result<Instance> {
    odd_prime(p)?;
    let (g, gens) = horizontal(p)?;
    let mut e: Vec<Element> = (0..p).map(|y| el(&[0, y])).collect();
    e.extend((1..p).map(|t| el(&[t, t])));
    e.push(el(&[1, 0]));
    instance(g, e, Some(&gens))
}

/// The `Z2²` triple placed over `Z_p`: sections `F1` at 0, `F2` at 1, `F3` elsewhere.
pub fn cross_sect_no_simul_basis(p: u64) -> Result<Instance> {
    odd_prime(p)?;
    let g = GroupSpec::new(vec![2, 2, p])?;
    let (_, f) = nosimulbasis_triple();
    let e = (0..p)
        .flat_map(|t| {
            let which = (t as usize).min(2);
            f[which].iter().map(move |x| el(&[x.coords()[0], x.coords()[1], t])).collect::<Vec<_>>()
        })
        .collect();
    instance(g, e, Some(&[el(&[1, 0, 0]), el(&[0, 1, 0])]))
}

/// `({0} × Z_p) ∪ {(1,0)} ∪ {(x,x) : 1 ≤ x < p}`: level 2 by `Z_p × {0}` with
/// `(p−1)/2` section classes.
pub fn cross_sect_bad_simul_basis(p: u64) -> Result<Instance> {
    odd_prime(p)?;
    let (g, gens) = horizontal(p)?;
    let mut e: Vec<Element> = (0..p).map(|y| el(&[0, y])).collect();
    e.push(el(&[1, 0]));
    e.extend((1..p).map(|x| el(&[x, x])));
    instance(g, e, Some(&gens))
}

/// `{0, m/3} ⊆ Z_m`, `3 | m`.
pub fn zm_size_two(m: u64) -> Result<Instance> {
    if m == 0 || !m.is_multiple_of(3) {
        return Err(Error::Precondition("need 3 | m".into()));
    }
    instance(GroupSpec::cyclic(m)?, vec![el(&[0]), el(&[m / 3])], None)
}

/// `{0,1,3} ⊆ Z_p`, `p ≥ 5`.
pub fn zp_size_three(p: u64) -> Result<Instance> {
    if p < 5 || !is_prime(p) {
        return Err(Error::Precondition("need a prime p >= 5".into()));
    }
    instance(GroupSpec::cyclic(p)?, vec![el(&[0]), el(&[1]), el(&[3])], None)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tiling::multi_tile_analysis;

    fn level_and_k(inst: &Instance) -> (Option<usize>, usize) {
        let a = multi_tile_analysis(&inst.group, &inst.e, inst.subgroup.as_ref().unwrap()).unwrap();
        (a.level, a.distinct_count)
    }

    #[test]
    fn sizes() {
        assert_eq!(cond_to_infty(4).unwrap().e.len(), 5);
        assert_eq!(cart_close_spec(5).unwrap().e.len(), 10);
        assert_eq!(multi_tile_nearly_spec(5).unwrap().e.len(), 10);
        assert_eq!(two_cross_sections(5).unwrap().e.len(), 10);
        assert_eq!(q3_family(5).unwrap().e.len(), 10);
        assert_eq!(cross_sect_no_simul_basis(5).unwrap().e.len(), 10);
        assert_eq!(cross_sect_bad_simul_basis(7).unwrap().e.len(), 14);
        assert!(cart_close_spec(9).is_err());
        assert!(zm_size_two(4).is_err());
    }

    #[test]
    fn tiling_structure() {
        assert_eq!(level_and_k(&multi_tile_nearly_spec(7).unwrap()), (Some(2), 1));
        assert_eq!(level_and_k(&cart_close_spec(5).unwrap()), (Some(2), 1));
        assert_eq!(level_and_k(&cross_sect_no_simul_basis(5).unwrap()), (Some(2), 3));
        for p in [3, 5, 7, 11] {
            assert_eq!(level_and_k(&cross_sect_bad_simul_basis(p).unwrap()), (Some(2), (p as usize - 1) / 2));
            assert_eq!(level_and_k(&q3_family(p).unwrap()).0, Some(2));
        }
        assert_eq!(level_and_k(&cond_to_infty(3).unwrap()).0, None);
    }
}
