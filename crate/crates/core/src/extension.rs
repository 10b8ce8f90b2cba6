//! Twisted 2-cocycles, group extensions and their gauge-invariant data.
//!
//! A symmetry group `Q` acting on a `G` gauge theory is described by a
//! twisting map `φ: Q → Aut(G)` together with a normalized cocycle
//! `ω: Q × Q → G`. Equivalently, by the extension `1 → G → E → Q → 1` whose
//! elements `(g, q)` multiply as `(g, q)(h, k) = (g φ_q(h) ω(q, k), qk)`.

use std::collections::{BTreeMap, BTreeSet};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::group::{
    automorphism_group, automorphisms, homomorphisms, Automorphism, FiniteGroup, GroupError,
};
use crate::rep::{max_abs, CMatrix, Representation};

/// Upper bound on backtracking nodes visited by the cocycle searches.
pub const SEARCH_NODE_LIMIT: u64 = 20_000_000;

/// Exhaustive gauge checks run when `|G|^|Q|` is at most this.
pub const EXHAUSTIVE_GAUGE_LIMIT: usize = 4096;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ExtensionError {
    #[error(transparent)]
    Group(#[from] GroupError),
    #[error("table shape does not match |G| = {g}, |Q| = {q}")]
    Shape { g: usize, q: usize },
    #[error("phi({0}) is not an automorphism of G")]
    NotAutomorphism(usize),
    #[error("phi at the identity of Q is not the identity automorphism")]
    TwistNotNormalized,
    #[error("omega({0}, {1}) is not the identity")]
    NotNormalized(usize, usize),
    #[error("cocycle condition fails on ({0}, {1}, {2})")]
    CocycleConditionViolated(usize, usize, usize),
    #[error("phi_{0} phi_{1} differs from Inn(omega({0}, {1})) phi_{0}{1} on {2}")]
    TwistedRelationViolated(usize, usize, usize),
    #[error("search space of about {bound:e} candidates exceeded {limit} nodes")]
    SearchTooLarge { bound: f64, limit: u64 },
    #[error("section is not a right inverse of the projection at {0}")]
    SectionInvalid(usize),
    #[error("not an extension of G by Q: {0}")]
    InvalidExtension(String),
    #[error("word does not project to the identity of Q")]
    WordNotInKernel,
    #[error("representation is not faithful: elements {0} and {1} share a matrix")]
    RepNotFaithful(usize, usize),
    #[error("no cocycle is compatible with the twisting map")]
    NoCompatibleCocycle,
}

/// `φ_q ∈ Aut(G)` for every `q ∈ Q`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct TwistingMap(pub Vec<Automorphism>);

impl TwistingMap {
    pub fn trivial(g: &FiniteGroup, q: &FiniteGroup) -> Self {
        TwistingMap(vec![Automorphism::identity(g.order()); q.order()])
    }

    #[inline]
    pub fn apply(&self, q: usize, g: usize) -> usize {
        self.0[q].apply(g)
    }

    pub fn automorphism(&self, q: usize) -> &Automorphism {
        &self.0[q]
    }

    pub fn is_trivial(&self) -> bool {
        self.0.iter().all(Automorphism::is_identity)
    }

    pub fn validate(&self, g: &FiniteGroup, q: &FiniteGroup) -> Result<(), ExtensionError> {
        if self.0.len() != q.order() {
            return Err(ExtensionError::Shape {
                g: g.order(),
                q: q.order(),
            });
        }
        for (k, a) in self.0.iter().enumerate() {
            if !a.is_automorphism_of(g) {
                return Err(ExtensionError::NotAutomorphism(k));
            }
        }
        if !self.0[0].is_identity() {
            return Err(ExtensionError::TwistNotNormalized);
        }
        Ok(())
    }

    pub fn is_homomorphism(&self, q: &FiniteGroup) -> bool {
        q.elements().all(|k| {
            q.elements()
                .all(|p| self.0[k].compose(&self.0[p]) == self.0[q.mul(k, p)])
        })
    }
}

/// A normalized twisted 2-cocycle together with its twisting map.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Cocycle {
    phi: TwistingMap,
    /// Row-major `|Q| × |Q|` table.
    omega: Vec<usize>,
    q_order: usize,
}

impl Cocycle {
    /// The all-identity cocycle for `φ` (valid only when `φ` is a homomorphism).
    pub fn trivial(phi: TwistingMap) -> Self {
        let n = phi.0.len();
        Cocycle {
            phi,
            omega: vec![0; n * n],
            q_order: n,
        }
    }

    /// Builds and validates a cocycle from a table `omega[k][q]`.
    pub fn new(
        g: &FiniteGroup,
        q: &FiniteGroup,
        phi: TwistingMap,
        omega: &[Vec<usize>],
    ) -> Result<Self, ExtensionError> {
        let shape = ExtensionError::Shape {
            g: g.order(),
            q: q.order(),
        };
        if omega.len() != q.order() || omega.iter().any(|r| r.len() != q.order()) {
            return Err(shape);
        }
        if omega.iter().flatten().any(|&x| x >= g.order()) {
            return Err(shape);
        }
        let c = Cocycle {
            phi,
            omega: omega.concat(),
            q_order: q.order(),
        };
        c.validate(g, q)?;
        Ok(c)
    }

    pub(crate) fn from_flat(phi: TwistingMap, omega: Vec<usize>) -> Self {
        let q_order = phi.0.len();
        Cocycle {
            phi,
            omega,
            q_order,
        }
    }

    #[inline]
    pub fn value(&self, k: usize, q: usize) -> usize {
        self.omega[k * self.q_order + q]
    }

    pub fn phi(&self) -> &TwistingMap {
        &self.phi
    }

    pub fn flat(&self) -> &[usize] {
        &self.omega
    }

    pub fn table(&self) -> Vec<Vec<usize>> {
        self.omega.chunks(self.q_order).map(<[usize]>::to_vec).collect()
    }

    pub fn is_trivial(&self) -> bool {
        self.omega.iter().all(|&x| x == 0)
    }

    /// Normalization, cocycle condition over all triples, and the twisted
    /// relation `φ_k φ_q = Inn(ω(k, q)) φ_{kq}` elementwise.
    pub fn validate(&self, g: &FiniteGroup, q: &FiniteGroup) -> Result<(), ExtensionError> {
        self.phi.validate(g, q)?;
        if self.omega.len() != q.order() * q.order() {
            return Err(ExtensionError::Shape {
                g: g.order(),
                q: q.order(),
            });
        }
        for k in q.elements() {
            if self.value(0, k) != 0 {
                return Err(ExtensionError::NotNormalized(0, k));
            }
            if self.value(k, 0) != 0 {
                return Err(ExtensionError::NotNormalized(k, 0));
            }
        }
        for k in q.elements() {
            for p in q.elements() {
                let w = self.value(k, p);
                let kp = q.mul(k, p);
                for x in g.elements() {
                    let lhs = self.phi.apply(k, self.phi.apply(p, x));
                    let rhs = g.conjugate(w, self.phi.apply(kp, x));
                    if lhs != rhs {
                        return Err(ExtensionError::TwistedRelationViolated(k, p, x));
                    }
                }
            }
        }
        for k in q.elements() {
            for p in q.elements() {
                for r in q.elements() {
                    if !cocycle_condition_holds(g, q, &self.phi, &self.omega, k, p, r) {
                        return Err(ExtensionError::CocycleConditionViolated(k, p, r));
                    }
                }
            }
        }
        Ok(())
    }

    /// Applies a gauge transformation, returning the transformed pair
    /// `φ'_k = Inn(l_k) φ_k`, `ω'(k,q) = l_k φ_k(l_q) ω(k,q) l_{kq}^{-1}`.
    pub fn gauge(&self, g: &FiniteGroup, q: &FiniteGroup, l: &GaugeTransform) -> Cocycle {
        let phi = TwistingMap(
            q.elements()
                .map(|k| Automorphism::inner(g, l.0[k]).compose(&self.phi.0[k]))
                .collect(),
        );
        let omega = q
            .elements()
            .flat_map(|k| {
                q.elements().map(move |p| {
                    g.product([
                        l.0[k],
                        self.phi.apply(k, l.0[p]),
                        self.value(k, p),
                        g.inv(l.0[q.mul(k, p)]),
                    ])
                })
            })
            .collect();
        Cocycle::from_flat(phi, omega)
    }

    /// `ω ∘ (α × α)` for an automorphism `α` of `Q`; the twisting map is
    /// pulled back the same way.
    pub fn relabel(&self, alpha: &Automorphism) -> Cocycle {
        let n = self.q_order;
        let phi = TwistingMap((0..n).map(|k| self.phi.0[alpha.apply(k)].clone()).collect());
        let omega = (0..n)
            .flat_map(|k| (0..n).map(move |p| self.value(alpha.apply(k), alpha.apply(p))))
            .collect();
        Cocycle::from_flat(phi, omega)
    }
}

#[inline]
fn cocycle_condition_holds(
    g: &FiniteGroup,
    q: &FiniteGroup,
    phi: &TwistingMap,
    omega: &[usize],
    k: usize,
    p: usize,
    r: usize,
) -> bool {
    let n = q.order();
    let w = |a: usize, b: usize| omega[a * n + b];
    let kp = q.mul(k, p);
    let pr = q.mul(p, r);
    g.mul(w(k, p), w(kp, r)) == g.mul(phi.apply(k, w(p, r)), w(k, pr))
}

/// `l: Q → G` with `l_e = e`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct GaugeTransform(pub Vec<usize>);

impl GaugeTransform {
    pub fn identity(q_order: usize) -> Self {
        GaugeTransform(vec![0; q_order])
    }

    pub fn random(g_values: &[usize], q_order: usize, rng: &mut impl Rng) -> Self {
        let mut l: Vec<usize> = (0..q_order)
            .map(|_| g_values[rng.gen_range(0..g_values.len())])
            .collect();
        l[0] = 0;
        GaugeTransform(l)
    }
}

/// Calls `f` on every normalized map `Q → values` (with `l_e = e`).
fn for_each_gauge(values: &[usize], q_order: usize, mut f: impl FnMut(&GaugeTransform) -> bool) {
    let mut l = GaugeTransform::identity(q_order);
    let free = q_order.saturating_sub(1);
    let mut digits = vec![0usize; free];
    loop {
        for (i, &d) in digits.iter().enumerate() {
            l.0[i + 1] = values[d];
        }
        if !f(&l) {
            return;
        }
        let mut i = 0;
        loop {
            if i == free {
                return;
            }
            digits[i] += 1;
            if digits[i] < values.len() {
                break;
            }
            digits[i] = 0;
            i += 1;
        }
    }
}

/// All twisting maps that admit at least one cocycle. For abelian `G` these
/// are the homomorphisms `Q → Aut(G)`.
pub fn twisting_maps(g: &FiniteGroup, q: &FiniteGroup) -> Result<Vec<TwistingMap>, ExtensionError> {
    if g.is_abelian() {
        let (aut_group, auts) = automorphism_group(g)?;
        let mut maps: Vec<TwistingMap> = homomorphisms(q, &aut_group)
            .into_iter()
            .map(|h| TwistingMap(h.into_iter().map(|i| auts[i].clone()).collect()))
            .collect();
        maps.sort();
        return Ok(maps);
    }
    let auts = automorphisms(g)?;
    let free = q.order().saturating_sub(1) as i32;
    let bound = (auts.len() as f64).powi(free);
    if bound > SEARCH_NODE_LIMIT as f64 {
        return Err(ExtensionError::SearchTooLarge {
            bound,
            limit: SEARCH_NODE_LIMIT,
        });
    }
    let mut maps = Vec::new();
    let mut err = None;
    let idx: Vec<usize> = (0..auts.len()).collect();
    for_each_gauge(&idx, q.order(), |choice| {
        let phi = TwistingMap(choice.0.iter().map(|&i| auts[i].clone()).collect());
        match first_cocycle(g, q, &phi) {
            Ok(Some(_)) => maps.push(phi),
            Ok(None) => {}
            Err(e) => {
                err = Some(e);
                return false;
            }
        }
        true
    });
    if let Some(e) = err {
        return Err(e);
    }
    maps.sort();
    Ok(maps)
}

/// Backtracking over the free entries `ω(k, q)`, `k, q ≠ e`, where each entry
/// ranges over `candidates(k, q)`. Triples are checked as soon as all of
/// their entries are assigned.
struct CocycleSearch<'a> {
    g: &'a FiniteGroup,
    q: &'a FiniteGroup,
    phi: &'a TwistingMap,
    positions: Vec<(usize, usize)>,
    candidates: Vec<Vec<usize>>,
    /// Triples whose last-assigned entry is the position at that index.
    checks: Vec<Vec<(usize, usize, usize)>>,
    nodes: u64,
}

impl<'a> CocycleSearch<'a> {
    fn new(
        g: &'a FiniteGroup,
        q: &'a FiniteGroup,
        phi: &'a TwistingMap,
        candidates: impl Fn(usize, usize) -> Vec<usize>,
    ) -> Self {
        let n = q.order();
        let positions: Vec<(usize, usize)> = (1..n).flat_map(|k| (1..n).map(move |p| (k, p))).collect();
        let pos_of = |a: usize, b: usize| -> Option<usize> {
            (a != 0 && b != 0).then(|| (a - 1) * (n - 1) + (b - 1))
        };
        let mut checks = vec![Vec::new(); positions.len()];
        for k in 0..n {
            for p in 0..n {
                for r in 0..n {
                    let kp = q.mul(k, p);
                    let pr = q.mul(p, r);
                    let last = [pos_of(k, p), pos_of(kp, r), pos_of(p, r), pos_of(k, pr)]
                        .into_iter()
                        .flatten()
                        .max();
                    if let Some(t) = last {
                        checks[t].push((k, p, r));
                    }
                }
            }
        }
        let candidates = positions.iter().map(|&(k, p)| candidates(k, p)).collect();
        CocycleSearch {
            g,
            q,
            phi,
            positions,
            candidates,
            checks,
            nodes: 0,
        }
    }

    fn bound(&self) -> f64 {
        self.candidates.iter().map(|c| c.len() as f64).product()
    }

    /// Visits every solution; `visit` returns `false` to stop.
    fn run(&mut self, visit: &mut dyn FnMut(&[usize]) -> bool) -> Result<(), ExtensionError> {
        let n = self.q.order();
        let mut omega = vec![0; n * n];
        self.rec(0, &mut omega, visit).map(|_| ())
    }

    fn rec(
        &mut self,
        t: usize,
        omega: &mut Vec<usize>,
        visit: &mut dyn FnMut(&[usize]) -> bool,
    ) -> Result<bool, ExtensionError> {
        if t == self.positions.len() {
            return Ok(visit(omega));
        }
        let n = self.q.order();
        let (k, p) = self.positions[t];
        for ci in 0..self.candidates[t].len() {
            self.nodes += 1;
            if self.nodes > SEARCH_NODE_LIMIT {
                return Err(ExtensionError::SearchTooLarge {
                    bound: self.bound(),
                    limit: SEARCH_NODE_LIMIT,
                });
            }
            omega[k * n + p] = self.candidates[t][ci];
            let ok = self.checks[t]
                .iter()
                .all(|&(a, b, c)| cocycle_condition_holds(self.g, self.q, self.phi, omega, a, b, c));
            if ok && !self.rec(t + 1, omega, visit)? {
                return Ok(false);
            }
        }
        omega[k * n + p] = 0;
        Ok(true)
    }
}

/// Elements `w` with `Inn(w) ∘ φ_{kq} = φ_k ∘ φ_q`.
fn twisted_candidates(g: &FiniteGroup, q: &FiniteGroup, phi: &TwistingMap, k: usize, p: usize) -> Vec<usize> {
    let target = phi.0[k].compose(&phi.0[p]);
    let kp = &phi.0[q.mul(k, p)];
    g.elements()
        .filter(|&w| Automorphism::inner(g, w).compose(kp) == target)
        .collect()
}

/// Some cocycle compatible with `φ`, preferring the trivial one.
pub fn first_cocycle(
    g: &FiniteGroup,
    q: &FiniteGroup,
    phi: &TwistingMap,
) -> Result<Option<Cocycle>, ExtensionError> {
    phi.validate(g, q)?;
    let trivial = Cocycle::trivial(phi.clone());
    if trivial.validate(g, q).is_ok() {
        return Ok(Some(trivial));
    }
    let mut search = CocycleSearch::new(g, q, phi, |k, p| twisted_candidates(g, q, phi, k, p));
    let mut found = None;
    search.run(&mut |w| {
        found = Some(w.to_vec());
        false
    })?;
    Ok(found.map(|w| Cocycle::from_flat(phi.clone(), w)))
}

/// Every normalized cocycle for `(G, Q, φ)`, sorted.
///
/// For abelian `G` the search runs over all `G`-valued tables. For
/// non-abelian `G` a reference cocycle is fixed and multiplied by every
/// `Z(G)`-valued cocycle, which reaches all cocycles sharing `φ`.
pub fn enumerate_cocycles(
    g: &FiniteGroup,
    q: &FiniteGroup,
    phi: &TwistingMap,
) -> Result<Vec<Cocycle>, ExtensionError> {
    phi.validate(g, q)?;
    let mut out = Vec::new();
    if g.is_abelian() {
        if !phi.is_homomorphism(q) {
            return Ok(out);
        }
        let all: Vec<usize> = g.elements().collect();
        let mut search = CocycleSearch::new(g, q, phi, |_, _| all.clone());
        search.run(&mut |w| {
            out.push(Cocycle::from_flat(phi.clone(), w.to_vec()));
            true
        })?;
    } else {
        let Some(base) = first_cocycle(g, q, phi)? else {
            return Ok(out);
        };
        let center = g.center();
        // φ restricted to the centre is a homomorphism, so ζ ranges over
        // ordinary Z(G)-valued cocycles
        let mut search = CocycleSearch::new(g, q, phi, |_, _| center.clone());
        search.run(&mut |zeta| {
            let omega = zeta
                .iter()
                .zip(&base.omega)
                .map(|(&z, &w)| g.mul(z, w))
                .collect();
            out.push(Cocycle::from_flat(phi.clone(), omega));
            true
        })?;
    }
    out.sort();
    Ok(out)
}

/// A `Z(G)`-valued `l` relating `ω` to `ω'` (both sharing `φ`), if any.
/// Preserving `φ` forces every `l_q` to be central.
pub fn are_cohomologous(
    g: &FiniteGroup,
    q: &FiniteGroup,
    a: &Cocycle,
    b: &Cocycle,
) -> Option<GaugeTransform> {
    if a.phi != b.phi {
        return None;
    }
    let center = g.center();
    let mut found = None;
    for_each_gauge(&center, q.order(), |l| {
        if a.gauge(g, q, l).omega == b.omega {
            found = Some(l.clone());
            return false;
        }
        true
    });
    found
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CohomologyClass {
    /// Lexicographically smallest member.
    pub representative: Cocycle,
    pub members: Vec<Cocycle>,
}

impl CohomologyClass {
    pub fn size(&self) -> usize {
        self.members.len()
    }
}

/// `H²_φ(Q, G)` as an explicit partition of the enumerated cocycles.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CohomologyClassSet {
    pub phi: TwistingMap,
    pub classes: Vec<CohomologyClass>,
}

impl CohomologyClassSet {
    pub fn len(&self) -> usize {
        self.classes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.classes.is_empty()
    }

    /// Index of the class containing `c`.
    pub fn class_of(&self, c: &Cocycle) -> Option<usize> {
        self.classes
            .iter()
            .position(|cl| cl.members.binary_search(c).is_ok())
    }
}

pub fn second_cohomology(
    g: &FiniteGroup,
    q: &FiniteGroup,
    phi: &TwistingMap,
) -> Result<CohomologyClassSet, ExtensionError> {
    let cocycles = enumerate_cocycles(g, q, phi)?;
    let center = g.center();
    let mut gauges = Vec::new();
    for_each_gauge(&center, q.order(), |l| {
        gauges.push(l.clone());
        true
    });
    let mut assigned = vec![false; cocycles.len()];
    let mut classes = Vec::new();
    for i in 0..cocycles.len() {
        if assigned[i] {
            continue;
        }
        let mut members: BTreeSet<Cocycle> = BTreeSet::new();
        for l in &gauges {
            let c = cocycles[i].gauge(g, q, l);
            let j = cocycles
                .binary_search(&c)
                .expect("gauge orbit stays inside the cocycle set");
            assigned[j] = true;
            members.insert(c);
        }
        let members: Vec<Cocycle> = members.into_iter().collect();
        classes.push(CohomologyClass {
            representative: members[0].clone(),
            members,
        });
    }
    Ok(CohomologyClassSet {
        phi: phi.clone(),
        classes,
    })
}

/// Orbits of classes under `ω ↦ ω ∘ (α × α)` for the automorphisms `α` of
/// `Q` that preserve `φ`. Orbits are lists of class indices, sorted.
pub fn relabelling_orbits(
    set: &CohomologyClassSet,
    q: &FiniteGroup,
) -> Result<Vec<Vec<usize>>, ExtensionError> {
    let auts: Vec<Automorphism> = automorphisms(q)?
        .into_iter()
        .filter(|a| q.elements().all(|k| set.phi.0[a.apply(k)] == set.phi.0[k]))
        .collect();
    let mut orbit_of = vec![usize::MAX; set.len()];
    let mut orbits: Vec<Vec<usize>> = Vec::new();
    for i in 0..set.len() {
        if orbit_of[i] != usize::MAX {
            continue;
        }
        let mut orbit = BTreeSet::new();
        for a in &auts {
            let image = set.classes[i].representative.relabel(a);
            if let Some(j) = set.class_of(&image) {
                orbit.insert(j);
            }
        }
        for &j in &orbit {
            orbit_of[j] = orbits.len();
        }
        orbits.push(orbit.into_iter().collect());
    }
    Ok(orbits)
}

/// A group `E` with an embedding `i: G → E` and projection `π: E → Q`
/// forming a short exact sequence, plus a chosen section `ε`.
#[derive(Debug, Clone)]
pub struct ExtensionGroup {
    g: FiniteGroup,
    q: FiniteGroup,
    e: FiniteGroup,
    embedding: Vec<usize>,
    projection: Vec<usize>,
    section: Vec<usize>,
    preimage: Vec<Option<usize>>,
}

impl ExtensionGroup {
    /// Validates exactness; the section defaults to the smallest preimage
    /// of each `q` (and `e` for the identity).
    pub fn new(
        g: FiniteGroup,
        q: FiniteGroup,
        e: FiniteGroup,
        embedding: Vec<usize>,
        projection: Vec<usize>,
    ) -> Result<Self, ExtensionError> {
        let bad = |m: &str| Err(ExtensionError::InvalidExtension(m.to_string()));
        if embedding.len() != g.order() || projection.len() != e.order() {
            return bad("map sizes");
        }
        if e.order() != g.order() * q.order() {
            return bad("|E| != |G||Q|");
        }
        if embedding.iter().any(|&x| x >= e.order()) || projection.iter().any(|&x| x >= q.order()) {
            return bad("map values out of range");
        }
        for a in g.elements() {
            for b in g.elements() {
                if embedding[g.mul(a, b)] != e.mul(embedding[a], embedding[b]) {
                    return bad("embedding is not a homomorphism");
                }
            }
        }
        for a in e.elements() {
            for b in e.elements() {
                if projection[e.mul(a, b)] != q.mul(projection[a], projection[b]) {
                    return bad("projection is not a homomorphism");
                }
            }
        }
        let mut preimage = vec![None; e.order()];
        for a in g.elements() {
            if preimage[embedding[a]].replace(a).is_some() {
                return bad("embedding is not injective");
            }
        }
        let kernel: Vec<usize> = e.elements().filter(|&x| projection[x] == 0).collect();
        if kernel.len() != g.order() || kernel.iter().any(|&x| preimage[x].is_none()) {
            return bad("kernel of the projection is not the image of G");
        }
        let section = q
            .elements()
            .map(|k| e.elements().find(|&x| projection[x] == k))
            .collect::<Option<Vec<usize>>>();
        let Some(section) = section else {
            return bad("projection is not surjective");
        };
        Ok(ExtensionGroup {
            g,
            q,
            e,
            embedding,
            projection,
            section,
            preimage,
        })
    }

    pub fn g(&self) -> &FiniteGroup {
        &self.g
    }

    pub fn q(&self) -> &FiniteGroup {
        &self.q
    }

    pub fn e(&self) -> &FiniteGroup {
        &self.e
    }

    #[inline]
    pub fn embed(&self, g: usize) -> usize {
        self.embedding[g]
    }

    #[inline]
    pub fn project(&self, x: usize) -> usize {
        self.projection[x]
    }

    /// `i^{-1}(x)` for `x` in the kernel of the projection.
    pub fn pull_back(&self, x: usize) -> Option<usize> {
        self.preimage[x]
    }

    pub fn section(&self) -> &[usize] {
        &self.section
    }

    /// Replaces the section after checking `π ∘ ε = id` and `ε_e = e`.
    pub fn with_section(mut self, section: Vec<usize>) -> Result<Self, ExtensionError> {
        self.check_section(&section)?;
        self.section = section;
        Ok(self)
    }

    pub fn check_section(&self, section: &[usize]) -> Result<(), ExtensionError> {
        if section.len() != self.q.order() {
            return Err(ExtensionError::SectionInvalid(section.len()));
        }
        if section[0] != 0 {
            return Err(ExtensionError::SectionInvalid(0));
        }
        for (k, &x) in section.iter().enumerate() {
            if x >= self.e.order() || self.projection[x] != k {
                return Err(ExtensionError::SectionInvalid(k));
            }
        }
        Ok(())
    }

    /// The section transformed by `ε_q → i(l_q) ε_q`.
    pub fn gauged_section(&self, l: &GaugeTransform) -> Vec<usize> {
        self.section
            .iter()
            .zip(&l.0)
            .map(|(&s, &x)| self.e.mul(self.embed(x), s))
            .collect()
    }
}

/// `E = G ×_{φ,ω} Q` with `(g, q)` at index `g + |G| q` and `ε_q = (e, q)`.
pub fn build_extension(
    g: &FiniteGroup,
    q: &FiniteGroup,
    cocycle: &Cocycle,
) -> Result<ExtensionGroup, ExtensionError> {
    cocycle.validate(g, q)?;
    let n = g.order();
    let op = |x: usize, y: usize| {
        let (a, k) = (x % n, x / n);
        let (b, p) = (y % n, y / n);
        g.product([a, cocycle.phi.apply(k, b), cocycle.value(k, p)]) + n * q.mul(k, p)
    };
    let names = (0..n * q.order())
        .map(|x| format!("({},{})", g.element_name(x % n), q.element_name(x / n)))
        .collect();
    let e = FiniteGroup::from_fn(format!("{}.{}", g.name(), q.name()), n * q.order(), op)
?
        .with_element_names(names);
    let embedding = g.elements().collect();
    let projection = e.elements().map(|x| x / n).collect();
    let ext = ExtensionGroup::new(g.clone(), q.clone(), e, embedding, projection)?;
    let section = q.elements().map(|k| n * k).collect();
    ext.with_section(section)
}

/// `φ_k(g) = ε_k g ε_k^{-1}` and `ω(k, q) = ε_k ε_q ε_{kq}^{-1}`, pulled back to `G`.
pub fn cocycle_from_extension(ext: &ExtensionGroup, section: &[usize]) -> Result<Cocycle, ExtensionError> {
    ext.check_section(section)?;
    let (g, q, e) = (ext.g(), ext.q(), ext.e());
    let phi = TwistingMap(
        q.elements()
            .map(|k| {
                Automorphism(
                    g.elements()
                        .map(|x| {
                            ext.pull_back(e.conjugate(section[k], ext.embed(x)))
                                .expect("G is normal in E")
                        })
                        .collect(),
                )
            })
            .collect(),
    );
    let omega = q
        .elements()
        .flat_map(|k| {
            q.elements().map(move |p| {
                let x = e.product([section[k], section[p], e.inv(section[q.mul(k, p)])]);
                ext.pull_back(x).expect("lands in the kernel")
            })
        })
        .collect();
    let c = Cocycle::from_flat(phi, omega);
    c.validate(g, q)?;
    Ok(c)
}

/// Whether an isomorphism `E → E'` exists that is the identity on `G` and
/// induces the identity on `Q`. Such a map is fixed by `σ(ε_q) = i'(l_q) ε'_q`.
pub fn extensions_equivalent(a: &ExtensionGroup, b: &ExtensionGroup) -> bool {
    if a.g() != b.g() || a.q().table() != b.q().table() {
        return false;
    }
    let (g, q) = (a.g(), a.q());
    // decompose every element of E as i(x) ε_k
    let decompose: Vec<(usize, usize)> = a
        .e()
        .elements()
        .map(|y| {
            let k = a.project(y);
            let x = a
                .pull_back(a.e().mul(y, a.e().inv(a.section()[k])))
                .expect("kernel element");
            (x, k)
        })
        .collect();
    let values: Vec<usize> = g.elements().collect();
    let mut found = false;
    for_each_gauge(&values, q.order(), |l| {
        let sigma: Vec<usize> = decompose
            .iter()
            .map(|&(x, k)| b.e().product([b.embed(x), b.embed(l.0[k]), b.section()[k]]))
            .collect();
        let hom = a.e().elements().all(|y| {
            a.e()
                .elements()
                .all(|z| sigma[a.e().mul(y, z)] == b.e().mul(sigma[y], sigma[z]))
        });
        if hom {
            found = true;
        }
        !hom
    });
    found
}

/// One letter of an invariant word.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Symbol {
    /// `v_q = ε_q`
    V(usize),
    /// `v_q^{-1}`
    VInv(usize),
    /// A fixed element `i(g)`.
    Elem(usize),
    /// An element summed over all of `G`; letters with the same index share
    /// the summation variable. Makes the word an algebra element.
    Avg(usize),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct InvariantWord(pub Vec<Symbol>);

impl InvariantWord {
    /// `v_q^n`
    pub fn power(q: usize, n: usize) -> Self {
        InvariantWord(vec![Symbol::V(q); n])
    }

    /// `Σ_g (v_q g)^2`
    pub fn averaged_square(q: usize) -> Self {
        InvariantWord(vec![Symbol::V(q), Symbol::Avg(0), Symbol::V(q), Symbol::Avg(0)])
    }

    pub fn is_averaged(&self) -> bool {
        self.0.iter().any(|s| matches!(s, Symbol::Avg(_)))
    }
}

/// The value of an invariant word: a group element, or for averaged words
/// the multiplicity of each element of `G` in the sum.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum InvariantValue {
    Element(usize),
    Multiplicities(BTreeMap<usize, usize>),
}

pub fn evaluate_invariant(
    word: &InvariantWord,
    ext: &ExtensionGroup,
    section: &[usize],
) -> Result<InvariantValue, ExtensionError> {
    ext.check_section(section)?;
    let (g, q, e) = (ext.g(), ext.q(), ext.e());
    let image = q.product(word.0.iter().map(|s| match *s {
        Symbol::V(k) => k,
        Symbol::VInv(k) => q.inv(k),
        Symbol::Elem(_) | Symbol::Avg(_) => 0,
    }));
    if image != 0 {
        return Err(ExtensionError::WordNotInKernel);
    }
    let n_avg = word
        .0
        .iter()
        .filter_map(|s| match s {
            Symbol::Avg(i) => Some(i + 1),
            _ => None,
        })
        .max()
        .unwrap_or(0);
    let mut counts = BTreeMap::new();
    let mut assignment = vec![0usize; n_avg];
    loop {
        let x = e.product(word.0.iter().map(|s| match *s {
            Symbol::V(k) => section[k],
            Symbol::VInv(k) => e.inv(section[k]),
            Symbol::Elem(h) => ext.embed(h),
            Symbol::Avg(i) => ext.embed(assignment[i]),
        }));
        *counts.entry(ext.pull_back(x).expect("word lies in the kernel")).or_insert(0) += 1;
        // odometer over the averaged slots
        let mut i = 0;
        while i < n_avg {
            assignment[i] += 1;
            if assignment[i] < g.order() {
                break;
            }
            assignment[i] = 0;
            i += 1;
        }
        if i == n_avg {
            break;
        }
    }
    if n_avg == 0 {
        let (&x, _) = counts.iter().next().expect("one evaluation");
        return Ok(InvariantValue::Element(x));
    }
    Ok(InvariantValue::Multiplicities(counts))
}

/// Compares the word's value under `trials` random gauges `ε_q → i(l_q) ε_q`
/// (seeded), and under all gauges when `|G|^|Q| ≤ 4096`.
pub fn verify_gauge_invariance(
    word: &InvariantWord,
    ext: &ExtensionGroup,
    section: &[usize],
    trials: usize,
    seed: u64,
) -> Result<bool, ExtensionError> {
    let reference = evaluate_invariant(word, ext, section)?;
    let base = ext.clone().with_section(section.to_vec())?;
    let values: Vec<usize> = ext.g().elements().collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..trials {
        let l = GaugeTransform::random(&values, ext.q().order(), &mut rng);
        if evaluate_invariant(word, ext, &base.gauged_section(&l))? != reference {
            return Ok(false);
        }
    }
    let exhaustive = (ext.g().order() as f64).powi(ext.q().order() as i32);
    if exhaustive <= EXHAUSTIVE_GAUGE_LIMIT as f64 {
        let mut ok = true;
        for_each_gauge(&values, ext.q().order(), |l| {
            ok = evaluate_invariant(word, ext, &base.gauged_section(l)).as_ref() == Ok(&reference);
            ok
        });
        return Ok(ok);
    }
    Ok(true)
}

/// `v_k v_q v_k^{-1} v_q^{-1}` pulled back to `G`.
pub fn spt_compactification_quantity(ext: &ExtensionGroup, section: &[usize], k: usize, q: usize) -> usize {
    let x = ext.e().commutator(section[k], section[q]);
    ext.pull_back(x).expect("commutator of lifts lies in G")
}

/// `V_q = W(ε_q)` together with the factor matrices `W(i(g))`.
#[derive(Debug, Clone)]
pub struct ProjectiveRep {
    pub v: Vec<CMatrix>,
    pub w_of_g: Vec<CMatrix>,
}

impl ProjectiveRep {
    /// Largest entry of `V_k V_q - W(ω(k,q)) V_{kq}` over all pairs.
    pub fn factor_residual(&self, q: &FiniteGroup, cocycle: &Cocycle) -> f64 {
        let mut worst: f64 = 0.0;
        for k in q.elements() {
            for p in q.elements() {
                let lhs = &self.v[k] * &self.v[p];
                let rhs = &self.w_of_g[cocycle.value(k, p)] * &self.v[q.mul(k, p)];
                worst = worst.max(max_abs(&(lhs - rhs)));
            }
        }
        worst
    }
}

pub fn projective_rep_from_extension(
    ext: &ExtensionGroup,
    rep: &Representation,
    section: &[usize],
) -> Result<ProjectiveRep, ExtensionError> {
    ext.check_section(section)?;
    let e = ext.e();
    for x in e.elements() {
        for y in 0..x {
            if max_abs(&(rep.matrix(x) - rep.matrix(y))) < 1e-12 {
                return Err(ExtensionError::RepNotFaithful(y, x));
            }
        }
    }
    let out = ProjectiveRep {
        v: section.iter().map(|&s| rep.matrix(s).clone()).collect(),
        w_of_g: ext.g().elements().map(|x| rep.matrix(ext.embed(x)).clone()).collect(),
    };
    let c = cocycle_from_extension(ext, section)?;
    debug_assert!(out.factor_residual(ext.q(), &c) < 1e-12);
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::{is_isomorphic, preset};
    use num_complex::Complex64;
    use proptest::prelude::*;

    fn grp(name: &str) -> FiniteGroup {
        preset(name).unwrap()
    }

    fn inversion(n: usize) -> Automorphism {
        Automorphism((0..n).map(|a| (n - a) % n).collect())
    }

    /// Z4 by Z2 with `φ_q` = inversion when `invert`.
    fn z4_twist(invert: bool) -> TwistingMap {
        let second = if invert { inversion(4) } else { Automorphism::identity(4) };
        TwistingMap(vec![Automorphism::identity(4), second])
    }

    fn single_entry(g: &FiniteGroup, q: &FiniteGroup, phi: TwistingMap, w: usize) -> Cocycle {
        Cocycle::new(g, q, phi, &[vec![0, 0], vec![0, w]]).unwrap()
    }

    /// `ω(q^a, q^b) = α^{⌊(a+b)/p⌋}` on `Z_p`.
    fn carry(p: usize, alpha: usize) -> Cocycle {
        let (g, q) = (grp(&format!("Z{p}")), grp(&format!("Z{p}")));
        let omega: Vec<Vec<usize>> = (0..p)
            .map(|a| (0..p).map(|b| if a + b >= p { alpha } else { 0 }).collect())
            .collect();
        Cocycle::new(&g, &q, TwistingMap::trivial(&g, &q), &omega).unwrap()
    }

    /// Direct check of every normalized `Z2`-valued table on `Z2 × Z2`.
    fn brute_force_z2_by_klein() -> usize {
        let q = grp("Z2xZ2");
        let mut count = 0;
        for bits in 0..512u32 {
            let w = |k: usize, p: usize| -> usize {
                if k == 0 || p == 0 {
                    0
                } else {
                    ((bits >> ((k - 1) * 3 + (p - 1))) & 1) as usize
                }
            };
            let ok = (0..4).all(|k| {
                (0..4).all(|p| {
                    (0..4).all(|r| (w(k, p) + w(q.mul(k, p), r)) % 2 == (w(p, r) + w(k, q.mul(p, r))) % 2)
                })
            });
            count += usize::from(ok);
        }
        count
    }

    #[test]
    fn twisting_map_counts() {
        for p in [2, 3, 5] {
            let g = grp(&format!("Z{p}"));
            assert_eq!(twisting_maps(&g, &g).unwrap().len(), 1);
        }
        let maps = twisting_maps(&grp("Z4"), &grp("Z2")).unwrap();
        assert_eq!(maps, vec![z4_twist(false), z4_twist(true)]);
        assert_eq!(twisting_maps(&grp("Z2"), &grp("Z2xZ2")).unwrap().len(), 1);
    }

    #[test]
    fn non_abelian_twisting_maps_admit_cocycles() {
        let (g, q) = (grp("Q8"), grp("Z2"));
        let maps = twisting_maps(&g, &q).unwrap();
        assert!(maps.contains(&TwistingMap::trivial(&g, &q)));
        // φ_q must square to an inner automorphism: 4 inner + 12 outer of order two
        assert_eq!(maps.len(), 16);
        for phi in &maps {
            first_cocycle(&g, &q, phi).unwrap().unwrap().validate(&g, &q).unwrap();
        }
    }

    #[test]
    fn cocycle_counts() {
        let (z2, klein) = (grp("Z2"), grp("Z2xZ2"));
        let c = enumerate_cocycles(&z2, &z2, &TwistingMap::trivial(&z2, &z2)).unwrap();
        assert_eq!(c.len(), 2);
        let c = enumerate_cocycles(&z2, &klein, &TwistingMap::trivial(&z2, &klein)).unwrap();
        assert_eq!(c.len(), brute_force_z2_by_klein());
        assert_eq!(c.len(), 16);
        assert!(c[0].is_trivial());
        for x in &c {
            x.validate(&z2, &klein).unwrap();
        }
    }

    #[test]
    fn cohomology_class_counts() {
        let count = |g: &str, q: &str, phi: Option<TwistingMap>| {
            let (g, q) = (grp(g), grp(q));
            let phi = phi.unwrap_or_else(|| TwistingMap::trivial(&g, &q));
            second_cohomology(&g, &q, &phi).unwrap().len()
        };
        assert_eq!(count("Z2", "Z2", None), 2);
        assert_eq!(count("Z2", "Z2xZ2", None), 8);
        assert_eq!(count("Z3", "Z3", None), 3);
        assert_eq!(count("Z5", "Z5", None), 5);
        assert_eq!(count("Z4", "Z2", Some(z4_twist(true))), 2);
        assert_eq!(count("Z4", "Z2", Some(z4_twist(false))), 2);
        assert_eq!(count("Q8", "Z2", None), 2);
    }

    #[test]
    fn class_sizes_match_coboundary_count() {
        let (g, q) = (grp("Z2"), grp("Z2xZ2"));
        let set = second_cohomology(&g, &q, &TwistingMap::trivial(&g, &q)).unwrap();
        assert!(set.classes.iter().all(|c| c.size() == 2));
        assert!(set.classes[0].representative.is_trivial());
    }

    #[test]
    fn non_abelian_routes_agree() {
        // full G-valued search against the centre-valued base-point route
        let (g, q) = (grp("Q8"), grp("Z2"));
        for phi in twisting_maps(&g, &q).unwrap() {
            let mut direct = Vec::new();
            CocycleSearch::new(&g, &q, &phi, |k, p| twisted_candidates(&g, &q, &phi, k, p))
                .run(&mut |w| {
                    direct.push(Cocycle::from_flat(phi.clone(), w.to_vec()));
                    true
                })
                .unwrap();
            direct.sort();
            assert_eq!(direct, enumerate_cocycles(&g, &q, &phi).unwrap());
        }
    }

    #[test]
    fn cohomologous_checks() {
        let z2 = grp("Z2");
        let phi = TwistingMap::trivial(&z2, &z2);
        let c = enumerate_cocycles(&z2, &z2, &phi).unwrap();
        assert_eq!(are_cohomologous(&z2, &z2, &c[1], &c[1]), Some(GaugeTransform::identity(2)));
        assert_eq!(are_cohomologous(&z2, &z2, &c[0], &c[1]), None);
    }

    #[test]
    fn extension_isomorphism_types() {
        let (z2, z4, q8) = (grp("Z2"), grp("Z4"), grp("Q8"));
        let triv = TwistingMap::trivial(&z2, &z2);
        let iso = |g: &FiniteGroup, q: &FiniteGroup, c: &Cocycle, name: &str| {
            let e = build_extension(g, q, c).unwrap();
            assert!(is_isomorphic(e.e(), &grp(name)), "expected {name}");
        };
        iso(&z2, &z2, &Cocycle::trivial(triv.clone()), "Z2xZ2");
        iso(&z2, &z2, &single_entry(&z2, &z2, triv, 1), "Z4");
        iso(&z4, &z2, &single_entry(&z4, &z2, z4_twist(true), 2), "Q8");
        iso(&z4, &z2, &single_entry(&z4, &z2, z4_twist(true), 0), "D8");
        iso(&z4, &z2, &single_entry(&z4, &z2, z4_twist(false), 1), "Z8");
        iso(&z4, &z2, &single_entry(&z4, &z2, z4_twist(false), 0), "Z4xZ2");
        let tq = TwistingMap::trivial(&q8, &z2);
        iso(&q8, &z2, &single_entry(&q8, &z2, tq.clone(), 1), "Z4xQ8_mod_Z2");
        iso(&q8, &z2, &single_entry(&q8, &z2, tq, 0), "Z2xQ8");
    }

    #[test]
    fn klein_classes_give_four_isomorphism_types() {
        let (g, q) = (grp("Z2"), grp("Z2xZ2"));
        let set = second_cohomology(&g, &q, &TwistingMap::trivial(&g, &q)).unwrap();
        let mut counts = BTreeMap::new();
        for class in &set.classes {
            let e = build_extension(&g, &q, &class.representative).unwrap();
            let name = ["Z2xZ2xZ2", "Z4xZ2", "D8", "Q8"]
                .into_iter()
                .find(|n| is_isomorphic(e.e(), &grp(n)))
                .unwrap();
            *counts.entry(name).or_insert(0) += 1;
        }
        let expected: BTreeMap<&str, usize> =
            [("Z2xZ2xZ2", 1), ("Z4xZ2", 3), ("D8", 3), ("Q8", 1)].into();
        assert_eq!(counts, expected);
    }

    #[test]
    fn z4_as_extension_of_z2_by_z2() {
        let (z2, z4) = (grp("Z2"), grp("Z4"));
        let ext = ExtensionGroup::new(z2.clone(), z2.clone(), z4, vec![0, 2], vec![0, 1, 0, 1]).unwrap();
        let c = cocycle_from_extension(&ext, &[0, 1]).unwrap();
        assert_eq!(c.value(1, 1), 1);
        assert!(matches!(
            cocycle_from_extension(&ext, &[0, 2]),
            Err(ExtensionError::SectionInvalid(1))
        ));
        assert!(matches!(
            cocycle_from_extension(&ext, &[2, 1]),
            Err(ExtensionError::SectionInvalid(0))
        ));
    }

    #[test]
    fn extraction_round_trip() {
        let cases: Vec<(FiniteGroup, FiniteGroup, Vec<TwistingMap>)> = vec![
            (grp("Z2"), grp("Z2xZ2"), vec![]),
            (grp("Z3"), grp("Z3"), vec![]),
            (grp("Z4"), grp("Z2"), vec![z4_twist(false), z4_twist(true)]),
            (grp("Q8"), grp("Z2"), vec![]),
        ];
        for (g, q, mut phis) in cases {
            if phis.is_empty() {
                phis.push(TwistingMap::trivial(&g, &q));
            }
            for phi in phis {
                for c in enumerate_cocycles(&g, &q, &phi).unwrap() {
                    let ext = build_extension(&g, &q, &c).unwrap();
                    let back = cocycle_from_extension(&ext, ext.section()).unwrap();
                    assert!(are_cohomologous(&g, &q, &c, &back).is_some());
                    assert_eq!(back, c);
                }
            }
        }
    }

    #[test]
    fn direct_product_has_trivial_cocycle() {
        let (g, q) = (grp("Z3"), grp("Z2"));
        let ext = build_extension(&g, &q, &Cocycle::trivial(TwistingMap::trivial(&g, &q))).unwrap();
        assert!(cocycle_from_extension(&ext, ext.section()).unwrap().is_trivial());
    }

    #[test]
    fn equivalence_of_extensions() {
        let (z4, z2) = (grp("Z4"), grp("Z2"));
        let d8 = build_extension(&z4, &z2, &single_entry(&z4, &z2, z4_twist(true), 0)).unwrap();
        let q8 = build_extension(&z4, &z2, &single_entry(&z4, &z2, z4_twist(true), 2)).unwrap();
        assert!(extensions_equivalent(&d8, &d8));
        assert!(!extensions_equivalent(&d8, &q8));

        // equivalence matches cohomology classes for Z2 by Z2 x Z2
        let (g, q) = (grp("Z2"), grp("Z2xZ2"));
        let set = second_cohomology(&g, &q, &TwistingMap::trivial(&g, &q)).unwrap();
        let all: Vec<(usize, ExtensionGroup)> = set
            .classes
            .iter()
            .enumerate()
            .flat_map(|(i, cl)| cl.members.iter().map(move |c| (i, c.clone())))
            .map(|(i, c)| (i, build_extension(&g, &q, &c).unwrap()))
            .collect();
        for (i, a) in &all {
            for (j, b) in &all {
                assert_eq!(extensions_equivalent(a, b), i == j);
            }
        }
    }

    #[test]
    fn invariant_words() {
        let z2 = grp("Z2");
        let c = single_entry(&z2, &z2, TwistingMap::trivial(&z2, &z2), 1);
        let ext = build_extension(&z2, &z2, &c).unwrap();
        assert_eq!(
            evaluate_invariant(&InvariantWord::power(1, 2), &ext, ext.section()),
            Ok(InvariantValue::Element(1))
        );
        assert_eq!(
            evaluate_invariant(&InvariantWord::power(1, 1), &ext, ext.section()),
            Err(ExtensionError::WordNotInKernel)
        );
        for (p, alpha) in [(3, 2), (5, 3)] {
            let ext = build_extension(&grp(&format!("Z{p}")), &grp(&format!("Z{p}")), &carry(p, alpha)).unwrap();
            assert_eq!(
                evaluate_invariant(&InvariantWord::power(1, p), &ext, ext.section()),
                Ok(InvariantValue::Element(alpha))
            );
        }
    }

    #[test]
    fn averaged_quaternion_words() {
        let (q8, z2) = (grp("Q8"), grp("Z2"));
        let tq = TwistingMap::trivial(&q8, &z2);
        let word = InvariantWord::averaged_square(1);
        for (w, plus, minus) in [(0, 2, 6), (1, 6, 2)] {
            let ext = build_extension(&q8, &z2, &single_entry(&q8, &z2, tq.clone(), w)).unwrap();
            let expected = InvariantValue::Multiplicities([(0, plus), (1, minus)].into());
            assert_eq!(evaluate_invariant(&word, &ext, ext.section()), Ok(expected));
            assert!(verify_gauge_invariance(&word, &ext, ext.section(), 200, 7).unwrap());
            // the bare square is not gauge invariant once G is non-abelian
            assert!(!verify_gauge_invariance(&InvariantWord::power(1, 2), &ext, ext.section(), 200, 7).unwrap());
        }
    }

    #[test]
    fn klein_squares_are_gauge_invariant() {
        let (g, q) = (grp("Z2"), grp("Z2xZ2"));
        let set = second_cohomology(&g, &q, &TwistingMap::trivial(&g, &q)).unwrap();
        for class in &set.classes {
            let ext = build_extension(&g, &q, &class.representative).unwrap();
            for k in 1..4 {
                assert!(verify_gauge_invariance(&InvariantWord::power(k, 2), &ext, ext.section(), 1000, 0).unwrap());
            }
            // and constant across the class
            for m in &class.members {
                let other = build_extension(&g, &q, m).unwrap();
                for k in 1..4 {
                    assert_eq!(
                        evaluate_invariant(&InvariantWord::power(k, 2), &ext, ext.section()),
                        evaluate_invariant(&InvariantWord::power(k, 2), &other, other.section())
                    );
                }
            }
        }
    }

    #[test]
    fn relabelling() {
        let (g, q) = (grp("Z2"), grp("Z2xZ2"));
        let set = second_cohomology(&g, &q, &TwistingMap::trivial(&g, &q)).unwrap();
        let orbits = relabelling_orbits(&set, &q).unwrap();
        let mut sizes: Vec<usize> = orbits.iter().map(Vec::len).collect();
        sizes.sort_unstable();
        assert_eq!(sizes, vec![1, 1, 3, 3]);
        assert_eq!(orbits[0], vec![0]);

        let z3 = grp("Z3");
        let set = second_cohomology(&z3, &z3, &TwistingMap::trivial(&z3, &z3)).unwrap();
        assert_eq!(relabelling_orbits(&set, &z3).unwrap(), vec![vec![0], vec![1, 2]]);
    }

    #[test]
    fn commutator_quantity() {
        let (g, q) = (grp("Z2"), grp("Z2xZ2"));
        let set = second_cohomology(&g, &q, &TwistingMap::trivial(&g, &q)).unwrap();
        let ext_of = |name: &str| {
            set.classes
                .iter()
                .map(|c| build_extension(&g, &q, &c.representative).unwrap())
                .find(|e| is_isomorphic(e.e(), &grp(name)))
                .unwrap()
        };
        let (x, z) = (1, 3);
        let abelian = ext_of("Z2xZ2xZ2");
        assert_eq!(spt_compactification_quantity(&abelian, abelian.section(), x, z), 0);
        let quat = ext_of("Q8");
        assert_eq!(spt_compactification_quantity(&quat, quat.section(), x, z), 1);
        for k in 0..4 {
            assert_eq!(spt_compactification_quantity(&quat, quat.section(), k, k), 0);
        }
    }

    fn real(rows: usize, data: &[f64]) -> CMatrix {
        CMatrix::from_row_slice(rows, rows, &data.iter().map(|&x| Complex64::new(x, 0.0)).collect::<Vec<_>>())
    }

    #[test]
    fn cyclic_projective_rep() {
        let z2 = grp("Z2");
        let ext = build_extension(&z2, &z2, &single_entry(&z2, &z2, TwistingMap::trivial(&z2, &z2), 1)).unwrap();
        let v = real(4, &[0., 1., 0., 0., 0., 0., 1., 0., 0., 0., 0., 1., 1., 0., 0., 0.]);
        let w = real(4, &[0., 0., 1., 0., 0., 0., 0., 1., 1., 0., 0., 0., 0., 1., 0., 0.]);
        // (g, q) at index g + 2q equals i(g) ε_q, i.e. W^g V^q
        let mats = vec![CMatrix::identity(4, 4), w.clone(), v.clone(), &w * &v];
        let rep = Representation::from_matrices(ext.e(), mats, 0.0).unwrap();
        let proj = projective_rep_from_extension(&ext, &rep, ext.section()).unwrap();
        assert_eq!(proj.v[1], v);
        assert_eq!(proj.w_of_g[1], w);
        assert_eq!(&proj.v[1] * &proj.v[1], w);
        let c = cocycle_from_extension(&ext, ext.section()).unwrap();
        assert_eq!(proj.factor_residual(ext.q(), &c), 0.0);
    }

    #[test]
    fn trivial_extension_gives_linear_rep() {
        let (g, q) = (grp("Z2"), grp("Z2xZ2"));
        let ext = build_extension(&g, &q, &Cocycle::trivial(TwistingMap::trivial(&g, &q))).unwrap();
        let rep = Representation::left_regular(ext.e());
        let proj = projective_rep_from_extension(&ext, &rep, ext.section()).unwrap();
        for k in 0..4 {
            for p in 0..4 {
                assert_eq!(&proj.v[k] * &proj.v[p], proj.v[q.mul(k, p)]);
            }
        }
    }

    #[test]
    fn pauli_projective_rep() {
        let (z2, klein, q8) = (grp("Z2"), grp("Z2xZ2"), grp("Q8"));
        // ±1 → e, ±i → x, ±j → y, ±k → z
        let ext = ExtensionGroup::new(z2, klein.clone(), q8.clone(), vec![0, 1], vec![0, 0, 1, 1, 2, 2, 3, 3])
            .unwrap()
            .with_section(vec![0, 2, 4, 6])
            .unwrap();
        let i = Complex64::new(0.0, 1.0);
        let one = Complex64::new(1.0, 0.0);
        let zero = Complex64::new(0.0, 0.0);
        let ui = CMatrix::from_row_slice(2, 2, &[i, zero, zero, -i]);
        let uj = CMatrix::from_row_slice(2, 2, &[zero, -one, one, zero]);
        let uk = CMatrix::from_row_slice(2, 2, &[zero, -i, -i, zero]);
        let id = CMatrix::identity(2, 2);
        let mats = vec![id.clone(), -id, ui.clone(), -ui, uj.clone(), -uj, uk.clone(), -uk];
        let rep = Representation::from_matrices(&q8, mats, 1e-14).unwrap();
        let proj = projective_rep_from_extension(&ext, &rep, ext.section()).unwrap();
        let c = cocycle_from_extension(&ext, ext.section()).unwrap();
        assert!(proj.factor_residual(&klein, &c) < 1e-14);
        for a in 1..4 {
            for b in 1..4 {
                if a != b {
                    let anti = &proj.v[a] * &proj.v[b] + &proj.v[b] * &proj.v[a];
                    assert!(max_abs(&anti) < 1e-14);
                }
            }
        }
        let lossy = Representation::from_matrices(&q8, vec![CMatrix::identity(1, 1); 8], 0.0).unwrap();
        assert!(matches!(
            projective_rep_from_extension(&ext, &lossy, ext.section()),
            Err(ExtensionError::RepNotFaithful(0, 1))
        ));
    }

    proptest! {
        #[test]
        fn gauge_orbits_stay_in_class(seed in any::<u64>(), which in 0usize..16) {
            let (g, q) = (grp("Z2"), grp("Z2xZ2"));
            let set = second_cohomology(&g, &q, &TwistingMap::trivial(&g, &q)).unwrap();
            let all: Vec<&Cocycle> = set.classes.iter().flat_map(|c| &c.members).collect();
            let c = all[which % all.len()];
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let l = GaugeTransform::random(&[0, 1], 4, &mut rng);
            let d = c.gauge(&g, &q, &l);
            prop_assert!(d.validate(&g, &q).is_ok());
            prop_assert_eq!(set.class_of(&d), set.class_of(c));
            let l2 = are_cohomologous(&g, &q, c, &d).unwrap();
            prop_assert_eq!(c.gauge(&g, &q, &l2), d);
        }

        #[test]
        fn coboundaries_of_z5_round_trip(seed in any::<u64>()) {
            let z5 = grp("Z5");
            let phi = TwistingMap::trivial(&z5, &z5);
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let l = GaugeTransform::random(&[0, 1, 2, 3, 4], 5, &mut rng);
            let b = Cocycle::trivial(phi).gauge(&z5, &z5, &l);
            prop_assert!(b.validate(&z5, &z5).is_ok());
            let found = are_cohomologous(&z5, &z5, &carry(5, 0), &b).unwrap();
            prop_assert_eq!(carry(5, 0).gauge(&z5, &z5, &found), b);
        }

        #[test]
        fn equivalent_when_cohomologous(seed in any::<u64>(), alpha in 0usize..3) {
            let z3 = grp("Z3");
            let c = carry(3, alpha);
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let l = GaugeTransform::random(&[0, 1, 2], 3, &mut rng);
            let a = build_extension(&z3, &z3, &c).unwrap();
            let b = build_extension(&z3, &z3, &c.gauge(&z3, &z3, &l)).unwrap();
            prop_assert!(extensions_equivalent(&a, &b));
            prop_assert!(extensions_equivalent(&b, &a));
        }
    }
}
