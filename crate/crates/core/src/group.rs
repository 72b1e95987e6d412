//! Finite abelian groups in a fixed cyclic decomposition.
//!
//! A group is written as `Z_{n_1} x ... x Z_{n_k}` and its elements as
//! residue tuples. The dual group is identified with the same tuples: the
//! tuple `b` acts on `x` by `exp(2πi Σ x_i b_i / n_i)`. Every dual-side
//! operation here (annihilators, transposes, lifts) is relative to that one
//! identification.
//!
//! Phases are carried as exact integers over the minimal exponent `M` of the
//! group, so a character value is a single complex exponential of `2πk/M`.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Default cap on `|G|` for subgroup enumeration.
pub const DEFAULT_SUBGROUP_CAP: u64 = 64;

pub fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

pub fn lcm(a: u64, b: u64) -> u64 {
    if a == 0 || b == 0 {
        return 0;
    }
    a / gcd(a, b) * b
}

/// Euler's totient by direct count.
pub fn totient(m: u64) -> u64 {
    (1..=m).filter(|&j| gcd(j, m) == 1).count() as u64
}

/// Integers `1 <= k <= m` coprime to `m`, ascending.
pub fn units(m: u64) -> Vec<u64> {
    (1..=m).filter(|&k| gcd(k, m) == 1).collect()
}

/// A residue tuple, one coordinate per cyclic factor.
///
/// Ordering is lexicographic on the coordinates.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Element {
    coords: Vec<u64>,
}

impl Element {
    /// Wraps raw coordinates without range checks; use [`GroupSpec::element`]
    /// for validated construction.
    pub fn new(coords: Vec<u64>) -> Self {
        Element { coords }
    }

    pub fn coords(&self) -> &[u64] {
        &self.coords
    }

    pub fn len(&self) -> usize {
        self.coords.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coords.is_empty()
    }

    /// Concatenation, i.e. the element `(self, other)` of a direct sum.
    pub fn concat(&self, other: &Element) -> Element {
        let mut coords = self.coords.clone();
        coords.extend_from_slice(&other.coords);
        Element { coords }
    }
}

impl fmt::Display for Element {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, c) in self.coords.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, ")")
    }
}

/// Minimal exponent of a group and the totient of it.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct GroupArithmetic {
    pub minimal_exponent: u64,
    pub totient_of_exponent: u64,
}

/// A finite abelian group `Z_{n_1} x ... x Z_{n_k}`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct GroupSpec {
    moduli: Vec<u64>,
    order: u64,
    exponent: u64,
}

impl GroupSpec {
    pub fn new(moduli: Vec<u64>) -> Result<Self> {
        if moduli.is_empty() {
            return Err(Error::GroupSyntax(String::new()));
        }
        if let Some(&m) = moduli.iter().find(|&&m| m < 1) {
            return Err(Error::BadModulus(m));
        }
        let order = moduli
            .iter()
            .try_fold(1u64, |acc, &m| acc.checked_mul(m))
            .ok_or_else(|| Error::Precondition("group order overflows u64".into()))?;
        let exponent = moduli.iter().fold(1, |acc, &m| lcm(acc, m));
        Ok(GroupSpec { moduli, order, exponent })
    }

    pub fn cyclic(m: u64) -> Result<Self> {
        Self::new(vec![m])
    }

    /// Parses `Z<m>`, `Z<m>^<d>` and `x`-separated products of those.
    pub fn parse(text: &str) -> Result<Self> {
        let syntax = || Error::GroupSyntax(text.to_string());
        let trimmed = text.trim();
        if trimmed.is_empty() {
            return Err(syntax());
        }
        let mut moduli = Vec::new();
        for factor in trimmed.split(['x', 'X', '*', '×']) {
            let factor = factor.trim();
            let body = factor
                .strip_prefix('Z')
                .or_else(|| factor.strip_prefix('z'))
                .ok_or_else(syntax)?;
            let body = body.strip_prefix('_').unwrap_or(body);
            let (base, power) = match body.split_once('^') {
                Some((b, p)) => (b, p.trim().parse::<usize>().map_err(|_| syntax())?),
                None => (body, 1),
            };
            let m: u64 = base.trim().parse().map_err(|_| syntax())?;
            if m < 1 {
                return Err(Error::BadModulus(m));
            }
            if power < 1 {
                return Err(syntax());
            }
            moduli.extend(std::iter::repeat_n(m, power));
        }
        Self::new(moduli)
    }

    pub fn moduli(&self) -> &[u64] {
        &self.moduli
    }

    pub fn order(&self) -> u64 {
        self.order
    }

    pub fn rank(&self) -> usize {
        self.moduli.len()
    }

    /// `lcm` of the moduli.
    pub fn exponent(&self) -> u64 {
        self.exponent
    }

    pub fn arithmetic(&self) -> GroupArithmetic {
        GroupArithmetic {
            minimal_exponent: self.exponent,
            totient_of_exponent: totient(self.exponent),
        }
    }

    /// Direct sum `self ⊕ other`, coordinates concatenated.
    pub fn product(&self, other: &GroupSpec) -> GroupSpec {
        let mut moduli = self.moduli.clone();
        moduli.extend_from_slice(&other.moduli);
        GroupSpec::new(moduli).expect("product of valid groups is valid")
    }

    pub fn zero(&self) -> Element {
        Element::new(vec![0; self.rank()])
    }

    pub fn check(&self, x: &Element) -> Result<()> {
        if x.len() != self.rank() {
            return Err(Error::DimensionMismatch { expected: self.rank(), got: x.len() });
        }
        for (&c, &m) in x.coords().iter().zip(&self.moduli) {
            if c >= m {
                return Err(Error::CoordinateRange { value: c, modulus: m });
            }
        }
        Ok(())
    }

    /// Validated element from already-reduced coordinates.
    pub fn element(&self, coords: Vec<u64>) -> Result<Element> {
        let x = Element::new(coords);
        self.check(&x)?;
        Ok(x)
    }

    /// Element from arbitrary integers, reduced into range.
    pub fn reduce(&self, coords: &[i64]) -> Result<Element> {
        if coords.len() != self.rank() {
            return Err(Error::DimensionMismatch { expected: self.rank(), got: coords.len() });
        }
        Ok(Element::new(
            coords
                .iter()
                .zip(&self.moduli)
                .map(|(&c, &m)| c.rem_euclid(m as i64) as u64)
                .collect(),
        ))
    }

    /// Position of `x` in the lexicographic enumeration.
    pub fn index_of(&self, x: &Element) -> usize {
        let mut idx = 0u64;
        for (&c, &m) in x.coords().iter().zip(&self.moduli) {
            idx = idx * m + c;
        }
        idx as usize
    }

    pub fn element_at(&self, mut idx: usize) -> Element {
        let mut coords = vec![0; self.rank()];
        for (slot, &m) in coords.iter_mut().zip(&self.moduli).rev() {
            *slot = idx as u64 % m;
            idx /= m as usize;
        }
        Element::new(coords)
    }

    /// All elements in lexicographic order.
    pub fn elements(&self) -> Vec<Element> {
        (0..self.order as usize).map(|i| self.element_at(i)).collect()
    }

    pub fn add(&self, x: &Element, y: &Element) -> Element {
        Element::new(
            x.coords()
                .iter()
                .zip(y.coords())
                .zip(&self.moduli)
                .map(|((&a, &b), &m)| (a + b) % m)
                .collect(),
        )
    }

    pub fn neg(&self, x: &Element) -> Element {
        Element::new(
            x.coords()
                .iter()
                .zip(&self.moduli)
                .map(|(&a, &m)| (m - a) % m)
                .collect(),
        )
    }

    pub fn sub(&self, x: &Element, y: &Element) -> Element {
        self.add(x, &self.neg(y))
    }

    /// `k·x`.
    pub fn scale(&self, k: u64, x: &Element) -> Element {
        Element::new(
            x.coords()
                .iter()
                .zip(&self.moduli)
                .map(|(&a, &m)| ((a as u128 * k as u128) % m as u128) as u64)
                .collect(),
        )
    }

    /// Additive order of `x`.
    pub fn element_order(&self, x: &Element) -> u64 {
        x.coords()
            .iter()
            .zip(&self.moduli)
            .fold(1, |acc, (&a, &m)| lcm(acc, m / gcd(a, m)))
    }

    /// Numerator `k` of the phase `Σ x_i b_i / n_i ≡ k / M (mod 1)`.
    pub fn phase(&self, b: &Element, x: &Element) -> u64 {
        let big_m = self.exponent as u128;
        let mut acc: u128 = 0;
        for ((&xi, &bi), &n) in x.coords().iter().zip(b.coords()).zip(&self.moduli) {
            let weight = big_m / n as u128;
            acc = (acc + (xi as u128 * bi as u128 % n as u128) * weight) % big_m;
        }
        acc as u64
    }

    /// The character value `b(x)`.
    pub fn character(&self, b: &Element, x: &Element) -> Result<Complex64> {
        self.check(b)?;
        self.check(x)?;
        Ok(root_of_unity(self.phase(b, x), self.exponent))
    }

    /// Unchecked character value for hot loops.
    pub(crate) fn character_unchecked(&self, b: &Element, x: &Element) -> Complex64 {
        root_of_unity(self.phase(b, x), self.exponent)
    }
}

impl Serialize for GroupSpec {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl fmt::Display for GroupSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, m) in self.moduli.iter().enumerate() {
            if i > 0 {
                write!(f, "x")?;
            }
            write!(f, "Z{m}")?;
        }
        Ok(())
    }
}

impl FromStr for GroupSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        GroupSpec::parse(s)
    }
}

/// `exp(2πi k / m)`.
pub fn root_of_unity(k: u64, m: u64) -> Complex64 {
    let k = k % m;
    // Fold into [-1/2, 1/2] turns so the argument stays small.
    let turns = if 2 * k > m { k as f64 / m as f64 - 1.0 } else { k as f64 / m as f64 };
    Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI * turns)
}

/// Parses a subset literal such as `(0,0),(1,0)` or, for cyclic groups,
/// `0,1,3`. Newlines act as separators, so file contents work as well.
/// The result is sorted; duplicates are rejected.
pub fn parse_subset(group: &GroupSpec, text: &str) -> Result<Vec<Element>> {
    let err = |msg: &str| Error::SubsetSyntax(format!("{msg} in `{}`", text.trim()));
    let mut out = Vec::new();
    let cleaned: String = text
        .lines()
        .map(|l| l.split('#').next().unwrap_or(""))
        .collect::<Vec<_>>()
        .join(",");
    let chars: Vec<char> = cleaned.chars().collect();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        if c.is_whitespace() || c == ',' || c == ';' {
            i += 1;
        } else if c == '(' || c == '[' {
            let close = if c == '(' { ')' } else { ']' };
            let end = chars[i..]
                .iter()
                .position(|&ch| ch == close)
                .ok_or_else(|| err("unclosed tuple"))?
                + i;
            let inner: String = chars[i + 1..end].iter().collect();
            let coords = inner
                .split(',')
                .map(|t| t.trim().parse::<i64>().map_err(|_| err("bad coordinate")))
                .collect::<Result<Vec<_>>>()?;
            out.push(group.reduce(&coords)?);
            i = end + 1;
        } else if c.is_ascii_digit() || c == '-' {
            if group.rank() != 1 {
                return Err(err("bare integers are only accepted for cyclic groups"));
            }
            let start = i;
            i += 1;
            while i < chars.len() && chars[i].is_ascii_digit() {
                i += 1;
            }
            let token: String = chars[start..i].iter().collect();
            let v: i64 = token.parse().map_err(|_| err("bad integer"))?;
            out.push(group.reduce(&[v])?);
        } else {
            return Err(err(&format!("unexpected character `{c}`")));
        }
    }
    normalize_subset(out)
}

/// Sorts a subset and rejects duplicates.
pub fn normalize_subset(mut set: Vec<Element>) -> Result<Vec<Element>> {
    set.sort();
    if set.windows(2).any(|w| w[0] == w[1]) {
        return Err(Error::InvalidSubset("duplicate elements".into()));
    }
    Ok(set)
}

pub fn format_subset(set: &[Element]) -> String {
    set.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",")
}

/// A subgroup with its full sorted element list.
#[derive(Debug, Clone)]
pub struct Subgroup {
    parent: GroupSpec,
    elements: Vec<Element>,
    generators: Vec<Element>,
    mask: Vec<bool>,
}

impl PartialEq for Subgroup {
    fn eq(&self, other: &Self) -> bool {
        self.parent == other.parent && self.mask == other.mask
    }
}

impl Eq for Subgroup {}

impl Subgroup {
    /// Builds a subgroup from a mask over the parent's lexicographic
    /// enumeration. The caller guarantees closure.
    fn from_mask(parent: &GroupSpec, mask: Vec<bool>) -> Self {
        let elements: Vec<Element> = mask
            .iter()
            .enumerate()
            .filter(|(_, &m)| m)
            .map(|(i, _)| parent.element_at(i))
            .collect();
        // Greedy generating set: take elements in order until they span.
        let mut generators = Vec::new();
        let mut span = closure_mask(parent, &[]);
        for x in &elements {
            if !span[parent.index_of(x)] {
                generators.push(x.clone());
                span = closure_mask(parent, &generators);
            }
        }
        Subgroup { parent: parent.clone(), elements, generators, mask }
    }

    pub fn whole(parent: &GroupSpec) -> Self {
        Self::from_mask(parent, vec![true; parent.order() as usize])
    }

    pub fn trivial(parent: &GroupSpec) -> Self {
        subgroup_closure(parent, &[]).expect("empty generator list")
    }

    pub fn parent(&self) -> &GroupSpec {
        &self.parent
    }

    pub fn elements(&self) -> &[Element] {
        &self.elements
    }

    pub fn generators(&self) -> &[Element] {
        &self.generators
    }

    pub fn order(&self) -> u64 {
        self.elements.len() as u64
    }

    pub fn index(&self) -> u64 {
        self.parent.order() / self.order()
    }

    pub fn contains(&self, x: &Element) -> bool {
        self.parent.check(x).is_ok() && self.mask[self.parent.index_of(x)]
    }

    /// `lcm` of element orders.
    pub fn exponent(&self) -> u64 {
        self.elements
            .iter()
            .fold(1, |acc, x| lcm(acc, self.parent.element_order(x)))
    }

    /// A generator when the subgroup is cyclic.
    pub fn cyclic_generator(&self) -> Option<Element> {
        let order = self.order();
        self.elements
            .iter()
            .find(|x| self.parent.element_order(x) == order)
            .cloned()
    }

    /// Whether `x - y` lies in the subgroup.
    pub fn same_coset(&self, x: &Element, y: &Element) -> bool {
        self.mask[self.parent.index_of(&self.parent.sub(x, y))]
    }

    /// Lexicographically smallest element of `x + H`.
    pub fn coset_representative(&self, x: &Element) -> Element {
        self.elements
            .iter()
            .map(|h| self.parent.add(x, h))
            .min()
            .expect("subgroup contains zero")
    }
}

fn closure_mask(group: &GroupSpec, gens: &[Element]) -> Vec<bool> {
    let mut mask = vec![false; group.order() as usize];
    let zero = group.zero();
    mask[group.index_of(&zero)] = true;
    let mut frontier = vec![zero];
    while let Some(x) = frontier.pop() {
        for g in gens {
            let y = group.add(&x, g);
            let idx = group.index_of(&y);
            if !mask[idx] {
                mask[idx] = true;
                frontier.push(y);
            }
        }
    }
    mask
}

/// Smallest subgroup containing `gens`.
pub fn subgroup_closure(group: &GroupSpec, gens: &[Element]) -> Result<Subgroup> {
    for g in gens {
        group.check(g)?;
    }
    let mask = closure_mask(group, gens);
    let mut sub = Subgroup::from_mask(group, mask);
    if !gens.is_empty() {
        let mut given: Vec<Element> = gens.to_vec();
        given.sort();
        given.dedup();
        sub.generators = given;
    }
    Ok(sub)
}

/// All subgroups, ordered by size then by element list.
///
/// Breadth-first over joins, seeded by the cyclic subgroups.
pub fn enumerate_subgroups(group: &GroupSpec, cap: u64) -> Result<Vec<Subgroup>> {
    if group.order() > cap {
        return Err(Error::CapExceeded {
            what: "group order for subgroup enumeration",
            size: group.order() as u128,
            cap: cap as u128,
        });
    }
    let mut seen: BTreeSet<Vec<bool>> = BTreeSet::new();
    let mut cyclic: Vec<(Element, Vec<bool>)> = Vec::new();
    for x in group.elements() {
        let mask = closure_mask(group, std::slice::from_ref(&x));
        if seen.insert(mask.clone()) {
            cyclic.push((x, mask));
        }
    }
    let mut found: Vec<(Vec<Element>, Vec<bool>)> =
        cyclic.iter().map(|(x, m)| (vec![x.clone()], m.clone())).collect();
    let mut queue: std::collections::VecDeque<usize> = (0..found.len()).collect();
    while let Some(i) = queue.pop_front() {
        let (gens, mask) = found[i].clone();
        for (x, _) in &cyclic {
            if mask[group.index_of(x)] {
                continue;
            }
            let mut joined = gens.clone();
            joined.push(x.clone());
            let m = closure_mask(group, &joined);
            if seen.insert(m.clone()) {
                found.push((joined, m));
                queue.push_back(found.len() - 1);
            }
        }
    }
    let mut subs: Vec<Subgroup> = found
        .into_iter()
        .map(|(_, mask)| Subgroup::from_mask(group, mask))
        .collect();
    subs.sort_by(|a, b| a.order().cmp(&b.order()).then_with(|| a.elements.cmp(&b.elements)));
    Ok(subs)
}

/// One coset `g + H` with its lexicographically smallest element.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Coset {
    pub representative: Element,
    pub elements: Vec<Element>,
}

/// Partition of `G` into cosets of `H`, ordered by representative.
pub fn cosets(group: &GroupSpec, sub: &Subgroup) -> Vec<Coset> {
    let mut assigned = vec![false; group.order() as usize];
    let mut out = Vec::new();
    for g in group.elements() {
        if assigned[group.index_of(&g)] {
            continue;
        }
        let mut elements: Vec<Element> = sub.elements().iter().map(|h| group.add(&g, h)).collect();
        elements.sort();
        for x in &elements {
            assigned[group.index_of(x)] = true;
        }
        out.push(Coset { representative: g, elements });
    }
    out
}

/// `H^⊥ = { b : b(h) = 1 for all h in H }`, as a subgroup of the dual
/// (same coordinates). Membership is an exact integer test.
pub fn annihilator(group: &GroupSpec, sub: &Subgroup) -> Subgroup {
    let mask: Vec<bool> = group
        .elements()
        .iter()
        .map(|b| sub.generators().iter().all(|h| group.phase(b, h) == 0))
        .collect();
    Subgroup::from_mask(group, mask)
}

/// A subgroup `K` with `H ⊕ K = G`, if one exists.
pub fn direct_complement(group: &GroupSpec, sub: &Subgroup, cap: u64) -> Result<Option<Subgroup>> {
    let target = sub.index();
    Ok(enumerate_subgroups(group, cap)?.into_iter().find(|k| {
        k.order() == target && k.elements().iter().all(|x| !sub.contains(x) || x == &group.zero())
    }))
}

/// A homomorphism between two decomposed groups given by an integer matrix:
/// row `i` is target coordinate `i`, column `j` the image of the `j`-th
/// source generator.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ZLinearMap {
    source: GroupSpec,
    target: GroupSpec,
    matrix: Vec<Vec<i64>>,
}

impl ZLinearMap {
    pub fn new(source: GroupSpec, target: GroupSpec, matrix: Vec<Vec<i64>>) -> Result<Self> {
        if matrix.len() != target.rank() || matrix.iter().any(|r| r.len() != source.rank()) {
            return Err(Error::IllDefinedMap(format!(
                "matrix must be {}x{}",
                target.rank(),
                source.rank()
            )));
        }
        // Z_{n_j} -> Z_{m_i}, 1 -> a_ij is well defined iff m_i | n_j a_ij.
        for (i, row) in matrix.iter().enumerate() {
            let m_i = target.moduli()[i] as i64;
            for (j, &a) in row.iter().enumerate() {
                let n_j = source.moduli()[j] as i64;
                if (n_j as i128 * a as i128).rem_euclid(m_i as i128) != 0 {
                    return Err(Error::IllDefinedMap(format!(
                        "entry ({i},{j}) = {a}: {m_i} does not divide {n_j}*{a}"
                    )));
                }
            }
        }
        let matrix = matrix
            .into_iter()
            .enumerate()
            .map(|(i, row)| {
                let m = target.moduli()[i] as i64;
                row.into_iter().map(|a| a.rem_euclid(m)).collect()
            })
            .collect();
        Ok(ZLinearMap { source, target, matrix })
    }

    pub fn identity(group: &GroupSpec) -> Self {
        let k = group.rank();
        let matrix = (0..k).map(|i| (0..k).map(|j| i64::from(i == j)).collect()).collect();
        ZLinearMap { source: group.clone(), target: group.clone(), matrix }
    }

    /// Multiplication by `k` on every coordinate.
    pub fn scalar(group: &GroupSpec, k: i64) -> Self {
        let r = group.rank();
        let matrix = (0..r).map(|i| (0..r).map(|j| if i == j { k } else { 0 }).collect()).collect();
        Self::new(group.clone(), group.clone(), matrix).expect("scalar maps are well defined")
    }

    pub fn source(&self) -> &GroupSpec {
        &self.source
    }

    pub fn target(&self) -> &GroupSpec {
        &self.target
    }

    pub fn matrix(&self) -> &[Vec<i64>] {
        &self.matrix
    }

    pub fn apply(&self, x: &Element) -> Element {
        Element::new(
            self.matrix
                .iter()
                .zip(self.target.moduli())
                .map(|(row, &m)| {
                    let s: i128 = row
                        .iter()
                        .zip(x.coords())
                        .map(|(&a, &c)| a as i128 * c as i128)
                        .sum();
                    s.rem_euclid(m as i128) as u64
                })
                .collect(),
        )
    }

    pub fn is_invertible(&self) -> bool {
        if self.source.order() != self.target.order() {
            return false;
        }
        let zero = self.target.zero();
        self.source
            .elements()
            .iter()
            .skip(1)
            .all(|x| self.apply(x) != zero)
    }

    /// Two-sided inverse, built from the images of the target generators.
    pub fn inverse(&self) -> Result<ZLinearMap> {
        if !self.is_invertible() {
            return Err(Error::NotInvertible);
        }
        let mut preimage = vec![None; self.target.order() as usize];
        for x in self.source.elements() {
            let idx = self.target.index_of(&self.apply(&x));
            preimage[idx] = Some(x);
        }
        let k_src = self.source.rank();
        let k_tgt = self.target.rank();
        let mut matrix = vec![vec![0i64; k_tgt]; k_src];
        for j in 0..k_tgt {
            let mut e = vec![0u64; k_tgt];
            e[j] = 1 % self.target.moduli()[j];
            let y = Element::new(e);
            let x = preimage[self.target.index_of(&y)].clone().expect("bijective");
            for (i, &c) in x.coords().iter().enumerate() {
                matrix[i][j] = c as i64;
            }
        }
        ZLinearMap::new(self.target.clone(), self.source.clone(), matrix)
    }

    /// The transpose `b ↦ b ∘ A` from the target's dual to the source's dual.
    pub fn transpose_apply(&self, b: &Element) -> Element {
        // c_j = Σ_i b_i · (a_ij n_j / m_i)  mod n_j
        let src = self.source.moduli();
        let tgt = self.target.moduli();
        Element::new(
            (0..self.source.rank())
                .map(|j| {
                    let n_j = src[j] as i128;
                    let s: i128 = (0..self.target.rank())
                        .map(|i| {
                            let coeff = self.matrix[i][j] as i128 * n_j / tgt[i] as i128;
                            b.coords()[i] as i128 * coeff
                        })
                        .sum();
                    s.rem_euclid(n_j) as u64
                })
                .collect(),
        )
    }

    /// `A^{-t} b = b ∘ A^{-1}`.
    pub fn inverse_transpose_apply(&self, b: &Element) -> Result<Element> {
        Ok(self.inverse()?.transpose_apply(b))
    }
}

/// `(E, B) ↦ (A E + t, A^{-t} B)` for an automorphism `A` of `G`.
pub fn affine_transform_pair(
    group: &GroupSpec,
    e: &[Element],
    b: &[Element],
    map: &ZLinearMap,
    shift: &Element,
) -> Result<(Vec<Element>, Vec<Element>)> {
    if map.source() != group || map.target() != group {
        return Err(Error::Precondition("map must be an endomorphism of the group".into()));
    }
    group.check(shift)?;
    for x in e.iter().chain(b) {
        group.check(x)?;
    }
    let inv = map.inverse()?;
    let e2 = e.iter().map(|x| group.add(&map.apply(x), shift)).collect();
    let b2 = b.iter().map(|y| inv.transpose_apply(y)).collect();
    Ok((normalize_subset(e2)?, normalize_subset(b2)?))
}
