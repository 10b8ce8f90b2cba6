//! Fixed-point loop reduction of order-parameter networks.
//!
//! At the fixed point every site pair (ket `s`, bra `π(s)`) contributes
//! `(1/|G|) Σ_g Π_legs (v_{q_s} u_g)[β, α]`, so the double-layer network is a
//! graph in which every bond index meets exactly two matrices. Its value is a
//! product of traces around the closed loops of that graph, summed over one
//! group label per independent site cluster.
//!
//! Sites that carry no symmetry operator and are not permuted are merged into
//! clusters along bonds without insertions: on such a bond the loop
//! `Tr[u_a^{-1} u_b] = |E| δ_{a,b}` identifies the two labels.

use std::collections::BTreeSet;
use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::charge::ChargeOperator;
use super::lattice::{End, Site, LEGS};
use super::mono::Mono;
use super::protocol::{BondOp, Denominator, ProtocolSpec};
use super::realization::SymmetryRealization;
use super::PepsError;
use crate::character::CharacterTable;
use crate::extension::{build_extension, Cocycle, TwistingMap};
use crate::group::{cyclic, FiniteGroup};

/// A matrix symbol in a trace word.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Sym {
    /// `u_s` for summation label `s`.
    Label(usize),
    LabelInv(usize),
    /// `u_g` for a fixed `g ∈ G`.
    Fixed(usize),
    FixedInv(usize),
    V(usize),
    VInv(usize),
    /// `C_h` of the ket charge pair.
    KetFirst,
    /// `C̄_h` of the ket charge pair.
    KetSecond,
    /// `C_{h'}^*` of the bra charge pair.
    BraFirst,
    /// `C̄_{h'}^*` of the bra charge pair.
    BraSecond,
}

impl Sym {
    /// All symbols are permutations (transpose = inverse) or diagonal.
    fn transpose(self) -> Sym {
        match self {
            Sym::Label(l) => Sym::LabelInv(l),
            Sym::LabelInv(l) => Sym::Label(l),
            Sym::Fixed(g) => Sym::FixedInv(g),
            Sym::FixedInv(g) => Sym::Fixed(g),
            Sym::V(q) => Sym::VInv(q),
            Sym::VInv(q) => Sym::V(q),
            diag => diag,
        }
    }

    fn cancels(self, next: Sym) -> bool {
        matches!(
            (self, next),
            (Sym::Label(a), Sym::LabelInv(b)) | (Sym::LabelInv(a), Sym::Label(b))
                | (Sym::Fixed(a), Sym::FixedInv(b)) | (Sym::FixedInv(a), Sym::Fixed(b))
                | (Sym::V(a), Sym::VInv(b)) | (Sym::VInv(a), Sym::V(b))
            if a == b
        )
    }
}

/// A normalized sum over label assignments of products of traces.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LoopExpression {
    labels: Vec<String>,
    /// Each word is a matrix product read left to right, traced.
    words: Vec<Vec<Sym>>,
    /// Loops whose word reduced to the identity; each contributes `|E|`.
    constant_loops: usize,
    /// Number of site pairs, each contributing `1/|G|`.
    sites: usize,
    denominator: Option<Box<LoopExpression>>,
}

impl LoopExpression {
    pub fn new(labels: Vec<String>, words: Vec<Vec<Sym>>) -> Self {
        LoopExpression {
            labels,
            words,
            constant_loops: 0,
            sites: 0,
            denominator: None,
        }
    }

    pub fn with_denominator(mut self, d: LoopExpression) -> Self {
        self.denominator = Some(Box::new(d));
        self
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn words(&self) -> &[Vec<Sym>] {
        &self.words
    }

    pub fn constant_loops(&self) -> usize {
        self.constant_loops
    }

    pub fn denominator(&self) -> Option<&LoopExpression> {
        self.denominator.as_deref()
    }

    fn uses(&self, f: impl Fn(Sym) -> bool) -> bool {
        self.words.iter().flatten().any(|&s| f(s))
    }

    /// The value divided by the value of its denominator, if any.
    pub fn evaluate(
        &self,
        real: &SymmetryRealization,
        charge: Option<&ChargeOperator>,
    ) -> Result<Complex64, PepsError> {
        let num = self.evaluate_raw(real, charge)?;
        match &self.denominator {
            None => Ok(num),
            Some(d) => {
                let den = d.evaluate_raw(real, charge)?;
                if den.norm() < 1e-300 {
                    return Err(PepsError::ZeroNorm);
                }
                Ok(num / den)
            }
        }
    }

    /// `|E|^{constant loops} / |G|^{sites} · Σ_{labels, pieces} Π Tr[word]`.
    pub fn evaluate_raw(
        &self,
        real: &SymmetryRealization,
        charge: Option<&ChargeOperator>,
    ) -> Result<Complex64, PepsError> {
        let ket = self.uses(|s| matches!(s, Sym::KetFirst | Sym::KetSecond));
        let bra = self.uses(|s| matches!(s, Sym::BraFirst | Sym::BraSecond));
        if (ket || bra) && charge.is_none() {
            return Err(PepsError::MissingCharge);
        }
        let g_order = real.g_order();
        let q_order = real.extension().q().order();
        let u: Vec<Mono> = (0..g_order).map(|g| real.u(g)).collect();
        let u_inv: Vec<Mono> = (0..g_order).map(|g| real.u_inv(g)).collect();
        let v: Vec<Mono> = (0..q_order).map(|q| real.v(q)).collect();
        let v_inv: Vec<Mono> = (0..q_order).map(|q| real.v_inv(q)).collect();
        let pieces = charge.map_or(1, ChargeOperator::num_pieces);
        let (first, second): (Vec<Mono>, Vec<Mono>) = match charge {
            Some(c) => (0..pieces).map(|h| (c.first(h), c.second(h))).unzip(),
            None => (Vec::new(), Vec::new()),
        };
        let first_conj: Vec<Mono> = first.iter().map(Mono::conj).collect();
        let second_conj: Vec<Mono> = second.iter().map(Mono::conj).collect();
        let ket_range = if ket { pieces } else { 1 };
        let bra_range = if bra { pieces } else { 1 };

        let n_labels = self.labels.len();
        let mut assignment = vec![0usize; n_labels];
        let mut total = Complex64::new(0.0, 0.0);
        let dim = real.dim();
        loop {
            for h in 0..ket_range {
                for hb in 0..bra_range {
                    let mut term = Complex64::new(1.0, 0.0);
                    for word in &self.words {
                        let mut acc = Mono::identity(dim);
                        for &s in word.iter().rev() {
                            let m = match s {
                                Sym::Label(l) => &u[assignment[l]],
                                Sym::LabelInv(l) => &u_inv[assignment[l]],
                                Sym::Fixed(g) => &u[g],
                                Sym::FixedInv(g) => &u_inv[g],
                                Sym::V(q) => &v[q],
                                Sym::VInv(q) => &v_inv[q],
                                Sym::KetFirst => &first[h],
                                Sym::KetSecond => &second[h],
                                Sym::BraFirst => &first_conj[hb],
                                Sym::BraSecond => &second_conj[hb],
                            };
                            m.left_mul_into(&mut acc);
                        }
                        term *= acc.trace();
                        if term.norm() == 0.0 {
                            break;
                        }
                    }
                    total += term;
                }
            }
            if !advance(&mut assignment, g_order) {
                break;
            }
        }
        let log_pref = self.constant_loops as f64 * (dim as f64).ln()
            - self.sites as f64 * (g_order as f64).ln();
        Ok(total * log_pref.exp())
    }
}

fn advance(a: &mut [usize], base: usize) -> bool {
    for x in a.iter_mut() {
        *x += 1;
        if *x < base {
            return true;
        }
        *x = 0;
    }
    false
}

impl fmt::Display for LoopExpression {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = |s: Sym| match s {
            Sym::Label(l) => self.labels[l].clone(),
            Sym::LabelInv(l) => format!("{}^-1", self.labels[l]),
            Sym::Fixed(g) => format!("u[{g}]"),
            Sym::FixedInv(g) => format!("u[{g}]^-1"),
            Sym::V(q) => format!("v[{q}]"),
            Sym::VInv(q) => format!("v[{q}]^-1"),
            Sym::KetFirst => "C".into(),
            Sym::KetSecond => "Cbar".into(),
            Sym::BraFirst => "C*".into(),
            Sym::BraSecond => "Cbar*".into(),
        };
        write!(
            f,
            "sum over {{{}}} of |E|^{} / |G|^{}",
            self.labels.join(","),
            self.constant_loops,
            self.sites
        )?;
        for w in &self.words {
            let inner: Vec<String> = w.iter().map(|&s| name(s)).collect();
            write!(f, " Tr[{}]", inner.join(" "))?;
        }
        Ok(())
    }
}

/// Compiles a protocol together with its normalizing network.
pub fn compile_protocol(
    spec: &ProtocolSpec,
    real: &SymmetryRealization,
    denominator: Denominator,
) -> Result<LoopExpression, PepsError> {
    let q_order = real.extension().q().order();
    spec.validate(q_order, real.g_order())?;
    let num = compile_raw(spec)?;
    let den = compile_raw(&spec.denominator(denominator))?;
    Ok(num.with_denominator(den))
}

struct Factor {
    row: usize,
    col: usize,
    word: Vec<Sym>,
}

/// The unnormalized loop expression of a validated protocol.
pub fn compile_raw(spec: &ProtocolSpec) -> Result<LoopExpression, PepsError> {
    let lat = spec.lattice;
    let active = spec.active_sites();
    check_family(spec, &active)?;

    let ket_ops = spec.ket_ops();
    let bra_ops = spec.bra_ops();

    // Labels: one per active site, then one per cluster of plain sites.
    let mut labels = Vec::new();
    let mut label_of = vec![usize::MAX; lat.num_sites()];
    for (j, s) in active.iter().enumerate() {
        label_of[lat.site_index(*s)] = labels.len();
        labels.push(format!("s{}", j + 1));
    }
    let mut clusters = 0;
    for start in lat.sites() {
        if label_of[lat.site_index(start)] != usize::MAX {
            continue;
        }
        let l = labels.len();
        labels.push(if clusters == 0 { "b".into() } else { format!("b{}", clusters + 1) });
        clusters += 1;
        let mut stack = vec![start];
        label_of[lat.site_index(start)] = l;
        while let Some(s) = stack.pop() {
            for leg in LEGS {
                let (b, end) = lat.leg_bond(s, leg);
                if ket_ops.contains_key(&b) || bra_ops.contains_key(&b) {
                    continue;
                }
                let other = lat.end_site(b, other_end(end));
                if active.contains(&other) || label_of[lat.site_index(other)] != usize::MAX {
                    continue;
                }
                label_of[lat.site_index(other)] = l;
                stack.push(other);
            }
        }
    }

    // Variables: each layer's bond index, split in two when an operator sits on it.
    let mut n_vars = 0;
    let mut alloc = |split: bool| {
        let first = n_vars;
        n_vars += if split { 2 } else { 1 };
        (first, if split { first + 1 } else { first })
    };
    let ket_vars: Vec<(usize, usize)> = (0..lat.num_bonds())
        .map(|i| alloc(ket_ops.contains_key(&lat.bond(i))))
        .collect();
    let bra_vars: Vec<(usize, usize)> = (0..lat.num_bonds())
        .map(|i| alloc(bra_ops.contains_key(&lat.bond(i))))
        .collect();
    let pick = |pair: (usize, usize), end: End| match end {
        End::First => pair.0,
        End::Second => pair.1,
    };

    let mut factors = Vec::new();
    for s in lat.sites() {
        let t = spec.pi(s);
        let q = spec.q_at(s);
        let mut word = Vec::new();
        if q != 0 {
            word.push(Sym::V(q));
        }
        word.push(Sym::Label(label_of[lat.site_index(s)]));
        for leg in LEGS {
            let (kb, kend) = lat.leg_bond(s, leg);
            let (bb, bend) = lat.leg_bond(t, leg);
            factors.push(Factor {
                row: pick(bra_vars[lat.bond_index(bb)], bend),
                col: pick(ket_vars[lat.bond_index(kb)], kend),
                word: word.clone(),
            });
        }
    }
    for (b, ops) in &ket_ops {
        let (first, second) = ket_vars[lat.bond_index(*b)];
        let word = ops
            .iter()
            .map(|op| match *op {
                BondOp::ChargeFirst => Sym::KetFirst,
                BondOp::ChargeSecond => Sym::KetSecond,
                BondOp::Flux { g, power } if power > 0 => Sym::Fixed(g),
                BondOp::Flux { g, .. } => Sym::FixedInv(g),
            })
            .collect();
        factors.push(Factor { row: first, col: second, word });
    }
    for (b, ops) in &bra_ops {
        let (first, second) = bra_vars[lat.bond_index(*b)];
        let word = ops
            .iter()
            .map(|op| match *op {
                BondOp::ChargeFirst => Sym::BraFirst,
                BondOp::ChargeSecond => Sym::BraSecond,
                BondOp::Flux { .. } => unreachable!("bra layer carries no flux strings"),
            })
            .collect();
        factors.push(Factor { row: first, col: second, word });
    }

    let (words, constant_loops) = trace_loops(&factors, n_vars);
    Ok(LoopExpression {
        labels,
        words,
        constant_loops,
        sites: lat.num_sites(),
        denominator: None,
    })
}

fn other_end(end: End) -> End {
    match end {
        End::First => End::Second,
        End::Second => End::First,
    }
}

/// Active sites must form one contiguous run in a row, share their symmetry
/// element, and be permuted by a single cycle (or not at all).
fn check_family(spec: &ProtocolSpec, active: &BTreeSet<Site>) -> Result<(), PepsError> {
    let unsupported = |m: &str| Err(PepsError::UnsupportedProtocolGeometry(m.into()));
    let Some(first) = active.iter().next() else {
        return Ok(());
    };
    if active.iter().any(|s| s.y != first.y) {
        return unsupported("active sites span several rows");
    }
    let xs: Vec<usize> = active.iter().map(|s| s.x).collect();
    if xs.windows(2).any(|w| w[1] != w[0] + 1) {
        return unsupported("active sites are not contiguous");
    }
    let q = spec.q_at(*first);
    if active.iter().any(|&s| spec.q_at(s) != q) {
        return unsupported("active sites carry different symmetry elements");
    }
    let moved: BTreeSet<Site> = active.iter().copied().filter(|&s| spec.pi(s) != s).collect();
    if !moved.is_empty() {
        if moved.len() != active.len() {
            return unsupported("permutation does not cover the symmetry sites");
        }
        let mut s = *first;
        let mut len = 0;
        loop {
            s = spec.pi(s);
            len += 1;
            if s == *first {
                break;
            }
        }
        if len != moved.len() {
            return unsupported("permutation is not a single cycle");
        }
    }
    Ok(())
}

/// Follows every closed loop of the two-regular factor graph and returns the
/// simplified trace words plus the number of loops that reduced to `Tr[1]`.
fn trace_loops(factors: &[Factor], n_vars: usize) -> (Vec<Vec<Sym>>, usize) {
    let mut incid: Vec<Vec<(usize, bool)>> = vec![Vec::new(); n_vars];
    for (i, f) in factors.iter().enumerate() {
        incid[f.row].push((i, true));
        incid[f.col].push((i, false));
    }
    debug_assert!(incid.iter().all(|v| v.len() == 2));
    let mut visited = vec![false; factors.len()];
    let mut words = Vec::new();
    let mut constant = 0;
    for f0 in 0..factors.len() {
        if visited[f0] {
            continue;
        }
        let start = factors[f0].col;
        let mut seq = Vec::new();
        let (mut f, mut transposed) = (f0, false);
        loop {
            visited[f] = true;
            seq.push((f, transposed));
            let (out, exit_row) = if transposed {
                (factors[f].col, false)
            } else {
                (factors[f].row, true)
            };
            if out == start {
                break;
            }
            let &(nf, enter_row) = incid[out]
                .iter()
                .find(|&&(g, r)| !(g == f && r == exit_row))
                .expect("every index meets two matrices");
            f = nf;
            transposed = enter_row;
        }
        let mut word = Vec::new();
        for &(f, t) in seq.iter().rev() {
            if t {
                word.extend(factors[f].word.iter().rev().map(|s| s.transpose()));
            } else {
                word.extend(factors[f].word.iter().copied());
            }
        }
        let word = simplify(word);
        if word.is_empty() {
            constant += 1;
        } else {
            words.push(word);
        }
    }
    (words, constant)
}

/// Cancels adjacent inverse pairs, cyclically.
fn simplify(word: Vec<Sym>) -> Vec<Sym> {
    let mut out: Vec<Sym> = Vec::with_capacity(word.len());
    for s in word {
        match out.last() {
            Some(&last) if last.cancels(s) => {
                out.pop();
            }
            _ => out.push(s),
        }
    }
    while out.len() >= 2 && out[out.len() - 1].cancels(out[0]) {
        out.pop();
        out.remove(0);
    }
    out
}

/// Transports the flux `g` around one charge of a `σ` pair:
/// `Σ_b Σ_{h,h'} Tr[u_b^{-1} C*_{h'} u_b u_g^{-1} C_h u_g] Tr[u_b^{-1} C̄*_{h'} u_b C̄_h]`,
/// normalized by the same diagram at `g = e`.
pub fn braid_flux_around_charge(
    group: &FiniteGroup,
    table: &CharacterTable,
    sigma: usize,
    g: usize,
) -> Result<Complex64, PepsError> {
    let one = cyclic(1);
    let ext = build_extension(group, &one, &Cocycle::trivial(TwistingMap::trivial(group, &one)))?;
    let real = SymmetryRealization::new(&ext)?;
    let charge = ChargeOperator::new(table, sigma, &real);
    let diagram = |g: usize| {
        LoopExpression::new(
            vec!["b".into()],
            vec![
                vec![
                    Sym::LabelInv(0),
                    Sym::BraFirst,
                    Sym::Label(0),
                    Sym::FixedInv(g),
                    Sym::KetFirst,
                    Sym::Fixed(g),
                ],
                vec![Sym::LabelInv(0), Sym::BraSecond, Sym::Label(0), Sym::KetSecond],
            ],
        )
    };
    diagram(g)
        .with_denominator(diagram(group.identity()))
        .evaluate(&real, Some(&charge))
}
