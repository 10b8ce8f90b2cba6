//! Finite groups given by explicit multiplication tables.
//!
//! Elements are dense indices `0..order` and index `0` is always the
//! identity. Every constructor funnels through [`FiniteGroup::from_table`],
//! which validates the group axioms by brute force.

use std::collections::{BTreeSet, VecDeque};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Largest order for which the automorphism/isomorphism searches run.
pub const MAX_SEARCH_ORDER: usize = 16;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GroupError {
    #[error("multiplication table is empty")]
    Empty,
    #[error("row {row} has length {len}, expected {order}")]
    NotSquare { row: usize, len: usize, order: usize },
    #[error("entry ({row}, {col}) = {value} is out of range for order {order}")]
    OutOfRange {
        row: usize,
        col: usize,
        value: usize,
        order: usize,
    },
    #[error("no two-sided identity element")]
    NoIdentity,
    #[error("associativity fails on ({0}, {1}, {2})")]
    NotAssociative(usize, usize, usize),
    #[error("row or column {0} of the table is not a permutation")]
    NotClosed(usize),
    #[error("unknown preset group {0:?}")]
    UnknownPreset(String),
    #[error("subset is not a subgroup (fails at {0})")]
    NotSubgroup(usize),
    #[error("subgroup is not normal (element {0} conjugates it out)")]
    NotNormal(usize),
    #[error("group of order {0} exceeds the search limit of {MAX_SEARCH_ORDER}")]
    GroupTooLarge(usize),
}

/// A validated finite group.
#[derive(Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FiniteGroup {
    name: String,
    order: usize,
    mult: Vec<usize>,
    inv: Vec<usize>,
    names: Vec<String>,
}

impl fmt::Debug for FiniteGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "FiniteGroup({}, order {})", self.name, self.order)
    }
}

impl FiniteGroup {
    /// Validates a multiplication table and builds the group.
    ///
    /// If the identity is not element `0` the table is relabelled by
    /// swapping the identity into slot `0`. Checks run in the order
    /// range, identity, associativity, closure, so a perturbed table that
    /// still has an identity reports the first non-associative triple.
    pub fn from_table(name: impl Into<String>, table: &[Vec<usize>]) -> Result<Self, GroupError> {
        let n = table.len();
        if n == 0 {
            return Err(GroupError::Empty);
        }
        for (row, r) in table.iter().enumerate() {
            if r.len() != n {
                return Err(GroupError::NotSquare {
                    row,
                    len: r.len(),
                    order: n,
                });
            }
            for (col, &value) in r.iter().enumerate() {
                if value >= n {
                    return Err(GroupError::OutOfRange {
                        row,
                        col,
                        value,
                        order: n,
                    });
                }
            }
        }
        let id = (0..n)
            .find(|&e| (0..n).all(|x| table[e][x] == x && table[x][e] == x))
            .ok_or(GroupError::NoIdentity)?;

        // relabel so that the identity is 0
        let relabel = |x: usize| {
            if x == id {
                0
            } else if x == 0 {
                id
            } else {
                x
            }
        };
        let mut mult = vec![0; n * n];
        for a in 0..n {
            for b in 0..n {
                mult[relabel(a) * n + relabel(b)] = relabel(table[a][b]);
            }
        }

        for a in 0..n {
            for b in 0..n {
                let ab = mult[a * n + b];
                for c in 0..n {
                    if mult[ab * n + c] != mult[a * n + mult[b * n + c]] {
                        return Err(GroupError::NotAssociative(
                            relabel(a),
                            relabel(b),
                            relabel(c),
                        ));
                    }
                }
            }
        }
        for a in 0..n {
            let mut row = vec![false; n];
            let mut col = vec![false; n];
            for b in 0..n {
                row[mult[a * n + b]] = true;
                col[mult[b * n + a]] = true;
            }
            if row.iter().chain(col.iter()).any(|seen| !seen) {
                return Err(GroupError::NotClosed(relabel(a)));
            }
        }
        let inv = (0..n)
            .map(|a| (0..n).find(|&b| mult[a * n + b] == 0).expect("latin square"))
            .collect();
        Ok(Self {
            name: name.into(),
            order: n,
            mult,
            inv,
            names: (0..n).map(|i| i.to_string()).collect(),
        })
    }

    /// Builds a group from a closure on element indices.
    pub fn from_fn(
        name: impl Into<String>,
        order: usize,
        op: impl Fn(usize, usize) -> usize,
    ) -> Result<Self, GroupError> {
        let table: Vec<Vec<usize>> = (0..order)
            .map(|a| (0..order).map(|b| op(a, b)).collect())
            .collect();
        Self::from_table(name, &table)
    }

    pub fn with_element_names(mut self, names: Vec<String>) -> Self {
        assert_eq!(names.len(), self.order);
        self.names = names;
        self
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn identity(&self) -> usize {
        0
    }

    #[inline]
    pub fn mul(&self, a: usize, b: usize) -> usize {
        self.mult[a * self.order + b]
    }

    #[inline]
    pub fn inv(&self, a: usize) -> usize {
        self.inv[a]
    }

    /// Product of a sequence of elements, left to right.
    pub fn product(&self, elems: impl IntoIterator<Item = usize>) -> usize {
        elems.into_iter().fold(0, |acc, x| self.mul(acc, x))
    }

    pub fn pow(&self, a: usize, k: usize) -> usize {
        (0..k).fold(0, |acc, _| self.mul(acc, a))
    }

    /// `a b a^-1`.
    pub fn conjugate(&self, a: usize, b: usize) -> usize {
        self.mul(self.mul(a, b), self.inv(a))
    }

    pub fn commutator(&self, a: usize, b: usize) -> usize {
        self.product([a, b, self.inv(a), self.inv(b)])
    }

    pub fn element_name(&self, a: usize) -> &str {
        &self.names[a]
    }

    pub fn element_names(&self) -> &[String] {
        &self.names
    }

    pub fn element_by_name(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }

    pub fn elements(&self) -> std::ops::Range<usize> {
        0..self.order
    }

    /// The table as nested rows, e.g. for serialization.
    pub fn table(&self) -> Vec<Vec<usize>> {
        self.mult.chunks(self.order).map(|r| r.to_vec()).collect()
    }

    pub fn element_order(&self, a: usize) -> usize {
        let mut x = a;
        let mut k = 1;
        while x != 0 {
            x = self.mul(x, a);
            k += 1;
        }
        k
    }

    /// Sorted multiset of element orders.
    pub fn order_profile(&self) -> Vec<usize> {
        let mut p: Vec<usize> = self.elements().map(|a| self.element_order(a)).collect();
        p.sort_unstable();
        p
    }

    pub fn exponent(&self) -> usize {
        self.elements()
            .map(|a| self.element_order(a))
            .fold(1, |acc, o| acc / gcd(acc, o) * o)
    }

    pub fn is_abelian(&self) -> bool {
        self.elements()
            .all(|a| self.elements().all(|b| self.mul(a, b) == self.mul(b, a)))
    }

    pub fn center(&self) -> Vec<usize> {
        self.elements()
            .filter(|&a| self.elements().all(|b| self.mul(a, b) == self.mul(b, a)))
            .collect()
    }

    /// Closure of a set of elements under multiplication.
    pub fn generated_subgroup(&self, gens: &[usize]) -> Vec<usize> {
        let mut seen = vec![false; self.order];
        seen[0] = true;
        let mut queue = VecDeque::from([0]);
        let mut out = vec![0];
        while let Some(x) = queue.pop_front() {
            for &s in gens {
                let y = self.mul(x, s);
                if !seen[y] {
                    seen[y] = true;
                    out.push(y);
                    queue.push_back(y);
                }
            }
        }
        out.sort_unstable();
        out
    }

    /// A small generating set, chosen greedily by decreasing element order.
    pub fn generators(&self) -> Vec<usize> {
        let mut by_order: Vec<usize> = self.elements().skip(1).collect();
        by_order.sort_by_key(|&a| (std::cmp::Reverse(self.element_order(a)), a));
        let mut gens = Vec::new();
        let mut span = self.generated_subgroup(&gens);
        for a in by_order {
            if span.len() == self.order {
                break;
            }
            if span.binary_search(&a).is_err() {
                gens.push(a);
                span = self.generated_subgroup(&gens);
            }
        }
        gens
    }

    pub fn is_subgroup(&self, subset: &[usize]) -> Result<(), GroupError> {
        let set: BTreeSet<usize> = subset.iter().copied().collect();
        if !set.contains(&0) {
            return Err(GroupError::NotSubgroup(0));
        }
        for &a in &set {
            for &b in &set {
                if !set.contains(&self.mul(a, self.inv(b))) {
                    return Err(GroupError::NotSubgroup(a));
                }
            }
        }
        Ok(())
    }

    /// Direct product with componentwise multiplication; `(a, b)` has index
    /// `a + |self| * b`.
    pub fn direct_product(&self, other: &FiniteGroup) -> FiniteGroup {
        let n = self.order;
        let op = |x: usize, y: usize| {
            let (a1, b1) = (x % n, x / n);
            let (a2, b2) = (y % n, y / n);
            self.mul(a1, a2) + n * other.mul(b1, b2)
        };
        let names = (0..n * other.order)
            .map(|x| format!("({},{})", self.names[x % n], other.names[x / n]))
            .collect();
        FiniteGroup::from_fn(format!("{}x{}", self.name, other.name), n * other.order, op)
            .expect("direct product of groups is a group")
            .with_element_names(names)
    }

    /// Quotient by a normal subgroup. Cosets are ordered by their smallest
    /// representative, so the identity coset stays at index 0.
    pub fn quotient(&self, normal: &[usize]) -> Result<FiniteGroup, GroupError> {
        self.is_subgroup(normal)?;
        let set: BTreeSet<usize> = normal.iter().copied().collect();
        for g in self.elements() {
            for &n in &set {
                if !set.contains(&self.conjugate(g, n)) {
                    return Err(GroupError::NotNormal(g));
                }
            }
        }
        let mut coset_of = vec![usize::MAX; self.order];
        let mut reps = Vec::new();
        for g in self.elements() {
            if coset_of[g] != usize::MAX {
                continue;
            }
            let idx = reps.len();
            reps.push(g);
            for &n in &set {
                coset_of[self.mul(g, n)] = idx;
            }
        }
        let names = reps.iter().map(|&r| format!("[{}]", self.names[r])).collect();
        let q = FiniteGroup::from_fn(
            format!("{}/N{}", self.name, set.len()),
            reps.len(),
            |a, b| coset_of[self.mul(reps[a], reps[b])],
        )?;
        Ok(q.with_element_names(names))
    }

    /// Checks full associativity, identity and inverse tables.
    pub fn check_axioms(&self) -> bool {
        let n = self.order;
        for a in 0..n {
            if self.mul(0, a) != a || self.mul(a, 0) != a {
                return false;
            }
            if self.mul(a, self.inv(a)) != 0 || self.inv(self.inv(a)) != a {
                return false;
            }
            for b in 0..n {
                for c in 0..n {
                    if self.mul(self.mul(a, b), c) != self.mul(a, self.mul(b, c)) {
                        return false;
                    }
                }
            }
        }
        true
    }
}

pub(crate) fn gcd(a: usize, b: usize) -> usize {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// A bijection of element indices preserving multiplication.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Automorphism(pub Vec<usize>);

impl Automorphism {
    pub fn identity(order: usize) -> Self {
        Automorphism((0..order).collect())
    }

    #[inline]
    pub fn apply(&self, g: usize) -> usize {
        self.0[g]
    }

    /// `self ∘ other`
    pub fn compose(&self, other: &Automorphism) -> Automorphism {
        Automorphism(other.0.iter().map(|&x| self.0[x]).collect())
    }

    pub fn inverse(&self) -> Automorphism {
        let mut inv = vec![0; self.0.len()];
        for (i, &x) in self.0.iter().enumerate() {
            inv[x] = i;
        }
        Automorphism(inv)
    }

    pub fn is_identity(&self) -> bool {
        self.0.iter().enumerate().all(|(i, &x)| i == x)
    }

    /// Inner automorphism `x ↦ g x g^-1`.
    pub fn inner(group: &FiniteGroup, g: usize) -> Self {
        Automorphism(group.elements().map(|x| group.conjugate(g, x)).collect())
    }

    pub fn is_automorphism_of(&self, group: &FiniteGroup) -> bool {
        if self.0.len() != group.order() {
            return false;
        }
        let mut seen = vec![false; group.order()];
        for &x in &self.0 {
            if x >= group.order() || seen[x] {
                return false;
            }
            seen[x] = true;
        }
        group.elements().all(|a| {
            group
                .elements()
                .all(|b| self.apply(group.mul(a, b)) == group.mul(self.apply(a), self.apply(b)))
        })
    }
}

/// Extends generator images to a homomorphism `source → target`, if one exists.
fn extend_homomorphism(
    source: &FiniteGroup,
    target: &FiniteGroup,
    gens: &[usize],
    images: &[usize],
) -> Option<Vec<usize>> {
    let mut map = vec![usize::MAX; source.order()];
    map[0] = 0;
    let mut queue = VecDeque::from([0]);
    while let Some(x) = queue.pop_front() {
        for (&s, &t) in gens.iter().zip(images) {
            let y = source.mul(x, s);
            let fy = target.mul(map[x], t);
            if map[y] == usize::MAX {
                map[y] = fy;
                queue.push_back(y);
            } else if map[y] != fy {
                return None;
            }
        }
    }
    if map.contains(&usize::MAX) {
        return None;
    }
    Some(map)
}

/// Backtracking over generator images; `visit` receives every bijective
/// homomorphism and returns `false` to stop the search early.
fn search_isomorphisms(
    source: &FiniteGroup,
    target: &FiniteGroup,
    mut visit: impl FnMut(Vec<usize>) -> bool,
) {
    let gens = source.generators();
    let gen_orders: Vec<usize> = gens.iter().map(|&g| source.element_order(g)).collect();
    let candidates: Vec<Vec<usize>> = gen_orders
        .iter()
        .map(|&o| {
            target
                .elements()
                .filter(|&t| target.element_order(t) == o)
                .collect()
        })
        .collect();
    let mut images = vec![0; gens.len()];

    fn rec(
        depth: usize,
        source: &FiniteGroup,
        target: &FiniteGroup,
        gens: &[usize],
        candidates: &[Vec<usize>],
        images: &mut Vec<usize>,
        visit: &mut dyn FnMut(Vec<usize>) -> bool,
    ) -> bool {
        if depth == gens.len() {
            if let Some(map) = extend_homomorphism(source, target, gens, images) {
                let mut seen = vec![false; target.order()];
                if map.iter().all(|&x| !std::mem::replace(&mut seen[x], true)) {
                    return visit(map);
                }
            }
            return true;
        }
        for &c in &candidates[depth] {
            images[depth] = c;
            if !rec(depth + 1, source, target, gens, candidates, images, visit) {
                return false;
            }
        }
        true
    }

    if source.order() != target.order() {
        return;
    }
    rec(
        0,
        source,
        target,
        &gens,
        &candidates,
        &mut images,
        &mut visit,
    );
}

/// All homomorphisms `source → target` as index maps, sorted.
pub fn homomorphisms(source: &FiniteGroup, target: &FiniteGroup) -> Vec<Vec<usize>> {
    let gens = source.generators();
    let candidates: Vec<Vec<usize>> = gens
        .iter()
        .map(|&g| {
            let o = source.element_order(g);
            target
                .elements()
                .filter(|&t| o.is_multiple_of(target.element_order(t)))
                .collect()
        })
        .collect();
    let mut out = Vec::new();
    let mut images = vec![0; gens.len()];
    fn rec(
        depth: usize,
        source: &FiniteGroup,
        target: &FiniteGroup,
        gens: &[usize],
        candidates: &[Vec<usize>],
        images: &mut Vec<usize>,
        out: &mut Vec<Vec<usize>>,
    ) {
        if depth == gens.len() {
            if let Some(map) = extend_homomorphism(source, target, gens, images) {
                out.push(map);
            }
            return;
        }
        for &c in &candidates[depth] {
            images[depth] = c;
            rec(depth + 1, source, target, gens, candidates, images, out);
        }
    }
    rec(0, source, target, &gens, &candidates, &mut images, &mut out);
    out.sort();
    out.dedup();
    out
}

/// The automorphisms of `group` as a group under composition, with the
/// element list in the same order as [`automorphisms`].
pub fn automorphism_group(group: &FiniteGroup) -> Result<(FiniteGroup, Vec<Automorphism>), GroupError> {
    let auts = automorphisms(group)?;
    let table: Vec<Vec<usize>> = auts
        .iter()
        .map(|a| {
            auts.iter()
                .map(|b| auts.binary_search(&a.compose(b)).expect("closed under composition"))
                .collect()
        })
        .collect();
    let g = FiniteGroup::from_table(format!("Aut({})", group.name()), &table)?;
    Ok((g, auts))
}

/// All automorphisms of `group`, sorted.
pub fn automorphisms(group: &FiniteGroup) -> Result<Vec<Automorphism>, GroupError> {
    if group.order() > MAX_SEARCH_ORDER {
        return Err(GroupError::GroupTooLarge(group.order()));
    }
    let mut out = Vec::new();
    search_isomorphisms(group, group, |m| {
        out.push(Automorphism(m));
        true
    });
    out.sort();
    out.dedup();
    Ok(out)
}

/// An explicit isomorphism `a → b` (as an index map), if one exists.
pub fn find_isomorphism(a: &FiniteGroup, b: &FiniteGroup) -> Result<Option<Vec<usize>>, GroupError> {
    for g in [a, b] {
        if g.order() > MAX_SEARCH_ORDER {
            return Err(GroupError::GroupTooLarge(g.order()));
        }
    }
    if a.order() != b.order()
        || a.order_profile() != b.order_profile()
        || a.center().len() != b.center().len()
    {
        return Ok(None);
    }
    let mut ca: Vec<usize> = crate::classes::ConjugacyClasses::new(a).sizes();
    let mut cb: Vec<usize> = crate::classes::ConjugacyClasses::new(b).sizes();
    ca.sort_unstable();
    cb.sort_unstable();
    if ca != cb {
        return Ok(None);
    }
    let mut found = None;
    search_isomorphisms(a, b, |m| {
        found = Some(m);
        false
    });
    Ok(found)
}

pub fn is_isomorphic(a: &FiniteGroup, b: &FiniteGroup) -> bool {
    matches!(find_isomorphism(a, b), Ok(Some(_)))
}

pub fn cyclic(n: usize) -> FiniteGroup {
    FiniteGroup::from_fn(format!("Z{n}"), n, |a, b| (a + b) % n).expect("cyclic group")
}

/// Dihedral group of order `2n`: `r^a s^b` has index `a + n b`.
pub fn dihedral(n: usize) -> FiniteGroup {
    let op = |x: usize, y: usize| {
        let (a1, b1) = (x % n, x / n);
        let (a2, b2) = (y % n, y / n);
        // r^a1 s^b1 r^a2 s^b2 = r^(a1 ± a2) s^(b1+b2)
        let a = if b1 == 0 {
            (a1 + a2) % n
        } else {
            (a1 + n - a2) % n
        };
        a + n * ((b1 + b2) % 2)
    };
    let names = (0..2 * n)
        .map(|x| match (x % n, x / n) {
            (0, 0) => "e".to_string(),
            (a, 0) => format!("r{a}"),
            (0, _) => "s".to_string(),
            (a, _) => format!("r{a}s"),
        })
        .collect();
    FiniteGroup::from_fn(format!("D{}", 2 * n), 2 * n, op)
        .expect("dihedral group")
        .with_element_names(names)
}

/// Quaternion group with index order `1, -1, i, -i, j, -j, k, -k`.
pub fn quaternion() -> FiniteGroup {
    // unit products among {1, i, j, k} as (sign, unit)
    const UNIT: [[(bool, usize); 4]; 4] = [
        [(false, 0), (false, 1), (false, 2), (false, 3)],
        [(false, 1), (true, 0), (false, 3), (true, 2)],
        [(false, 2), (true, 3), (true, 0), (false, 1)],
        [(false, 3), (false, 2), (true, 1), (true, 0)],
    ];
    let op = |x: usize, y: usize| {
        let (ux, sx) = (x / 2, x % 2 == 1);
        let (uy, sy) = (y / 2, y % 2 == 1);
        let (s, u) = UNIT[ux][uy];
        2 * u + usize::from(s ^ sx ^ sy)
    };
    let names = ["1", "-1", "i", "-i", "j", "-j", "k", "-k"]
        .iter()
        .map(|s| s.to_string())
        .collect();
    FiniteGroup::from_fn("Q8", 8, op)
        .expect("quaternion group")
        .with_element_names(names)
}

/// Names accepted by [`preset`].
pub const PRESET_NAMES: &[&str] = &[
    "Z1..Z16",
    "Z2xZ2",
    "Z2xZ2xZ2",
    "D6",
    "D8",
    "Q8",
    "Z4xZ2",
    "Z8",
    "Z2xQ8",
    "Z4xQ8_mod_Z2",
];

pub fn preset(name: &str) -> Result<FiniteGroup, GroupError> {
    if let Some(n) = name.strip_prefix('Z').and_then(|s| s.parse::<usize>().ok()) {
        if (1..=16).contains(&n) {
            return Ok(cyclic(n));
        }
    }
    let g = match name {
        "Z2xZ2" => cyclic(2).direct_product(&cyclic(2)),
        "Z2xZ2xZ2" => cyclic(2).direct_product(&cyclic(2)).direct_product(&cyclic(2)),
        "D6" => dihedral(3),
        "D8" => dihedral(4),
        "Q8" => quaternion(),
        "Z4xZ2" => cyclic(4).direct_product(&cyclic(2)),
        "Z2xQ8" => cyclic(2).direct_product(&quaternion()),
        "Z4xQ8_mod_Z2" => {
            let p = cyclic(4).direct_product(&quaternion());
            // {(0, 1), (2, -1)}: index a + 4 b with -1 at Q8 index 1
            p.quotient(&[0, 2 + 4])?
        }
        _ => return Err(GroupError::UnknownPreset(name.to_string())),
    };
    Ok(g.with_name(name))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn trivial_group() {
        let g = FiniteGroup::from_table("1", &[vec![0]]).unwrap();
        assert_eq!(g.order(), 1);
        assert_eq!(g.inv(0), 0);
    }

    #[test]
    fn z2_inverses() {
        let g = FiniteGroup::from_table("Z2", &[vec![0, 1], vec![1, 0]]).unwrap();
        assert_eq!((0..2).map(|a| g.inv(a)).collect::<Vec<_>>(), vec![0, 1]);
    }

    #[test]
    fn perturbed_z3_is_rejected_as_non_associative() {
        // Z3 with the entry 2*2 changed from 1 to 0
        let table = vec![vec![0, 1, 2], vec![1, 2, 0], vec![2, 0, 0]];
        let err = FiniteGroup::from_table("bad", &table).unwrap_err();
        let GroupError::NotAssociative(a, b, c) = err else {
            panic!("unexpected error {err:?}");
        };
        let m = |x: usize, y: usize| table[x][y];
        assert_ne!(m(m(a, b), c), m(a, m(b, c)));
    }

    #[test]
    fn malformed_tables() {
        assert_eq!(FiniteGroup::from_table("x", &[]), Err(GroupError::Empty));
        assert!(matches!(
            FiniteGroup::from_table("x", &[vec![0, 1], vec![1]]),
            Err(GroupError::NotSquare { row: 1, .. })
        ));
        assert!(matches!(
            FiniteGroup::from_table("x", &[vec![0, 2], vec![1, 0]]),
            Err(GroupError::OutOfRange { .. })
        ));
        assert_eq!(
            FiniteGroup::from_table("x", &[vec![1, 0], vec![0, 0]]),
            Err(GroupError::NoIdentity)
        );
    }

    #[test]
    fn identity_is_relabelled_to_zero() {
        // Z2 with the identity stored at index 1
        let g = FiniteGroup::from_table("Z2", &[vec![1, 0], vec![0, 1]]).unwrap();
        assert_eq!(g.mul(1, 1), 0);
        assert_eq!(g.mul(0, 1), 1);
    }

    #[test]
    fn quaternion_basics() {
        let q = preset("Q8").unwrap();
        assert_eq!(q.order(), 8);
        assert_eq!(q.center(), vec![0, 1]);
        let (i, j, k) = (2, 4, 6);
        assert_eq!(q.mul(i, j), k);
        assert_eq!(q.mul(j, i), 7);
        assert_eq!(q.mul(i, i), 1);
        assert_eq!(q.product([i, j, k]), 1);
    }

    #[test]
    fn pauli_like_group_of_order_sixteen() {
        let g = preset("Z4xQ8_mod_Z2").unwrap();
        assert_eq!(g.order(), 16);
        assert!(g.check_axioms());
        assert_eq!(g.center().len(), 4);
        assert!(!is_isomorphic(&g, &preset("Z2xQ8").unwrap()));
    }

    #[test]
    fn presets_are_groups() {
        for n in 1..=16 {
            assert_eq!(preset(&format!("Z{n}")).unwrap().order(), n);
        }
        for name in ["Z2xZ2", "Z2xZ2xZ2", "D6", "D8", "Q8", "Z4xZ2", "Z8", "Z2xQ8"] {
            assert!(preset(name).unwrap().check_axioms(), "{name}");
        }
        assert!(matches!(preset("Z17"), Err(GroupError::UnknownPreset(_))));
    }

    #[test]
    fn automorphism_counts() {
        let count = |n: &str| automorphisms(&preset(n).unwrap()).unwrap().len();
        assert_eq!(count("Z4"), 2);
        assert_eq!(count("Z2xZ2"), 6);
        assert_eq!(count("Z5"), 4);
        assert_eq!(count("D8"), 8);
        assert_eq!(count("Q8"), 24);
        assert_eq!(count("D6"), 6);
        assert_eq!(count("Z2xZ2xZ2"), 168);
    }

    #[test]
    fn search_size_limit() {
        let big = cyclic(4).direct_product(&cyclic(5));
        assert_eq!(automorphisms(&big), Err(GroupError::GroupTooLarge(20)));
    }

    #[test]
    fn isomorphism_classes_of_order_eight() {
        let names = ["Z8", "Z4xZ2", "Z2xZ2xZ2", "D8", "Q8"];
        for (i, a) in names.iter().enumerate() {
            for (j, b) in names.iter().enumerate() {
                let same = is_isomorphic(&preset(a).unwrap(), &preset(b).unwrap());
                assert_eq!(same, i == j, "{a} vs {b}");
            }
        }
    }

    #[test]
    fn quotient_checks() {
        let d8 = preset("D8").unwrap();
        // {e, s} is a subgroup but not normal
        assert!(matches!(d8.quotient(&[0, 4]), Err(GroupError::NotNormal(_))));
        assert!(matches!(d8.quotient(&[0, 1]), Err(GroupError::NotSubgroup(_))));
        let q = d8.quotient(&[0, 2]).unwrap();
        assert!(is_isomorphic(&q, &preset("Z2xZ2").unwrap()));
    }

    #[test]
    fn generators_generate() {
        for name in ["Z12", "Z2xZ2xZ2", "D8", "Q8", "Z4xQ8_mod_Z2"] {
            let g = preset(name).unwrap();
            assert_eq!(g.generated_subgroup(&g.generators()).len(), g.order());
        }
    }

    fn relabelled(g: &FiniteGroup, perm: &[usize]) -> FiniteGroup {
        // perm[old] = new, keeping 0 fixed
        let mut inv = vec![0; perm.len()];
        for (o, &n) in perm.iter().enumerate() {
            inv[n] = o;
        }
        FiniteGroup::from_fn("r", g.order(), |a, b| perm[g.mul(inv[a], inv[b])]).unwrap()
    }

    proptest! {
        #[test]
        fn relabelling_preserves_isomorphism_type(
            name in prop::sample::select(vec!["Z6", "Z4xZ2", "D8", "Q8", "D6"]),
            seed in any::<u64>(),
        ) {
            use rand::seq::SliceRandom;
            use rand::SeedableRng;
            let g = preset(name).unwrap();
            let mut rest: Vec<usize> = (1..g.order()).collect();
            rest.shuffle(&mut rand_chacha::ChaCha8Rng::seed_from_u64(seed));
            let perm: Vec<usize> = std::iter::once(0).chain(rest).collect();
            let h = relabelled(&g, &perm);
            let iso = find_isomorphism(&g, &h).unwrap().unwrap();
            for a in g.elements() {
                for b in g.elements() {
                    prop_assert_eq!(iso[g.mul(a, b)], h.mul(iso[a], iso[b]));
                }
            }
        }

        #[test]
        fn automorphisms_form_a_group(name in prop::sample::select(vec!["Z8", "Z2xZ2", "D8", "Q8"])) {
            let g = preset(name).unwrap();
            let auts = automorphisms(&g).unwrap();
            for a in &auts {
                prop_assert!(a.is_automorphism_of(&g));
                prop_assert!(auts.binary_search(&a.inverse()).is_ok());
                for b in &auts {
                    prop_assert!(auts.binary_search(&a.compose(b)).is_ok());
                }
            }
        }
    }
}
