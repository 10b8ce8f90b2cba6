//! Ready-made (G, Q, φ, ω, σ, word, protocol) bundles for the worked
//! examples, and the order-parameter report that evaluates them.

use std::collections::BTreeMap;
use std::fmt;
use std::time::Instant;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::character::{CharacterError, CharacterTable};
use crate::extension::{
    build_extension, evaluate_invariant, relabelling_orbits, second_cohomology, twisting_maps, verify_gauge_invariance,
    Cocycle, CohomologyClassSet, ExtensionError, ExtensionGroup, InvariantValue, InvariantWord, TwistingMap,
};
use crate::group::{cyclic, is_isomorphic, preset, FiniteGroup, GroupError};
use crate::peps::{
    compile_protocol, dense_contract, ChargeOperator, Cycle, Denominator, Lattice, PepsError, ProtocolSpec,
    SymmetryRealization,
};

/// Normalization used by every scenario.
pub const DENOMINATOR: Denominator = Denominator::KeepPermutationBraAtKet;

/// Gauge trials run when a scenario is built.
const CONSTRUCTION_TRIALS: usize = 100;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ScenarioError {
    #[error("unknown scenario {0:?}")]
    UnknownScenario(String),
    #[error("unknown class {class:?} for {scenario}; expected one of {options:?}")]
    UnknownClass {
        scenario: String,
        class: String,
        options: Vec<String>,
    },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("word {0} is not gauge invariant")]
    WordNotInvariant(String),
    #[error(transparent)]
    Group(#[from] GroupError),
    #[error(transparent)]
    Extension(#[from] ExtensionError),
    #[error(transparent)]
    Character(#[from] CharacterError),
    #[error(transparent)]
    Peps(#[from] PepsError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Family {
    TcZ2,
    TcZ2Z2,
    Zp,
    Z4Perm,
    Z4Triv,
    Q8,
}

impl Family {
    pub const ALL: [Family; 6] = [
        Family::TcZ2,
        Family::TcZ2Z2,
        Family::Zp,
        Family::Z4Perm,
        Family::Z4Triv,
        Family::Q8,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Family::TcZ2 => "tc-z2",
            Family::TcZ2Z2 => "tc-z2z2",
            Family::Zp => "zp",
            Family::Z4Perm => "z4-perm",
            Family::Z4Triv => "z4-triv",
            Family::Q8 => "q8",
        }
    }

    pub fn parse(s: &str) -> Result<Family, ScenarioError> {
        Family::ALL
            .into_iter()
            .find(|f| f.name() == s)
            .ok_or_else(|| ScenarioError::UnknownScenario(s.to_string()))
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone)]
pub struct Scenario {
    pub family: Family,
    /// Class selector as accepted on the command line.
    pub class: String,
    pub extension_name: String,
    /// The symmetry element the protocol applies.
    pub q_element: usize,
    pub sigma: usize,
    pub word: InvariantWord,
    pub lambda: InvariantValue,
    /// `χ_σ(λ)/d_σ`, averaged over the multiplicity map for averaged words.
    pub expected: Complex64,
    pub protocol: ProtocolSpec,
    cocycle: Cocycle,
    ext: ExtensionGroup,
    table: CharacterTable,
}

impl Scenario {
    #[allow(clippy::too_many_arguments)]
    fn build(
        family: Family,
        class: String,
        g: &FiniteGroup,
        q: &FiniteGroup,
        cocycle: Cocycle,
        q_element: usize,
        sigma: usize,
        word: InvariantWord,
        protocol: ProtocolSpec,
    ) -> Result<Self, ScenarioError> {
        let ext = build_extension(g, q, &cocycle)?;
        let table = CharacterTable::new(g)?;
        if sigma >= table.len() {
            return Err(ScenarioError::InvalidParameter(format!(
                "irrep {sigma} out of range for {}",
                g.name()
            )));
        }
        let lambda = evaluate_invariant(&word, &ext, ext.section())?;
        if !verify_gauge_invariance(&word, &ext, ext.section(), CONSTRUCTION_TRIALS, 0)? {
            return Err(ScenarioError::WordNotInvariant(format!("{word:?}")));
        }
        let expected = analytic_value(&table, sigma, &lambda);
        Ok(Scenario {
            family,
            class,
            extension_name: identify(ext.e()),
            q_element,
            sigma,
            word,
            lambda,
            expected,
            protocol,
            cocycle,
            ext,
            table,
        })
    }

    pub fn id(&self) -> String {
        let q = self.ext.q().element_name(self.q_element);
        format!(
            "{}/{}/q={}/{}",
            self.family,
            self.class,
            q,
            self.table.irrep(self.sigma).label
        )
    }

    pub fn extension(&self) -> &ExtensionGroup {
        &self.ext
    }

    pub fn cocycle(&self) -> &Cocycle {
        &self.cocycle
    }

    pub fn table(&self) -> &CharacterTable {
        &self.table
    }

    /// λ with elements written by name; averaged words as `{name: count}`.
    pub fn lambda_display(&self) -> String {
        NamedValue::new(self.ext.g(), &self.lambda).to_string()
    }

    /// `Σ_λ mult(λ) χ_σ(λ) / Σ mult`, without the `1/d_σ`.
    pub fn character_sum(&self) -> Complex64 {
        self.expected * self.table.dim(self.sigma) as f64
    }

    pub fn realization(&self) -> Result<SymmetryRealization, ScenarioError> {
        Ok(SymmetryRealization::new(&self.ext)?)
    }

    pub fn loop_value(&self) -> Result<Complex64, ScenarioError> {
        let real = self.realization()?;
        let charge = ChargeOperator::new(&self.table, self.sigma, &real);
        let expr = compile_protocol(&self.protocol, &real, DENOMINATOR)?;
        Ok(expr.evaluate(&real, Some(&charge))?)
    }

    pub fn oracle_value(&self) -> Result<Complex64, ScenarioError> {
        let real = self.realization()?;
        let charge = ChargeOperator::new(&self.table, self.sigma, &real);
        Ok(dense_contract(&self.protocol, &real, Some(&charge), DENOMINATOR)?.lambda_hat)
    }
}

/// `χ_σ(λ)/d_σ`; for a multiplicity map, its weighted average.
pub fn analytic_value(table: &CharacterTable, sigma: usize, lambda: &InvariantValue) -> Complex64 {
    let d = table.dim(sigma) as f64;
    match lambda {
        InvariantValue::Element(x) => table.chi(sigma, *x) / d,
        InvariantValue::Multiplicities(m) => {
            let total: usize = m.values().sum();
            let s: Complex64 = m.iter().map(|(&x, &n)| table.chi(sigma, x) * n as f64).sum();
            s / (total as f64 * d)
        }
    }
}

/// A short name for a small group: a matching preset, or an abelian
/// description from the element orders.
pub fn identify(e: &FiniteGroup) -> String {
    let n = e.order();
    if e.is_abelian() && e.exponent() == n {
        return format!("Z{n}");
    }
    const CANDIDATES: [&str; 9] = [
        "Z2xZ2", "Z2xZ2xZ2", "Z4xZ2", "D6", "D8", "Q8", "Z2xQ8", "Z4xQ8_mod_Z2", "Z8",
    ];
    for name in CANDIDATES {
        let p = preset(name).expect("preset");
        if p.order() == n && is_isomorphic(&p, e) {
            return name.to_string();
        }
    }
    if e.is_abelian() {
        let x = e.exponent();
        if x * x == n {
            return format!("Z{x}xZ{x}");
        }
    }
    format!("E{n}")
}

fn z2_signs() -> FiniteGroup {
    cyclic(2).with_element_names(vec!["+1".into(), "-1".into()])
}

fn z4_units() -> FiniteGroup {
    cyclic(4).with_element_names(["1", "i", "-1", "-i"].map(String::from).to_vec())
}

fn klein() -> FiniteGroup {
    preset("Z2xZ2")
        .expect("preset")
        .with_element_names(["e", "x", "y", "z"].map(String::from).to_vec())
}

/// `ω(a, b) = α` when `a + b` wraps around `p`.
pub fn carry_cocycle(g: &FiniteGroup, alpha: usize) -> Result<Cocycle, ScenarioError> {
    let p = g.order();
    let omega: Vec<Vec<usize>> = (0..p)
        .map(|a| (0..p).map(|b| if a + b >= p { alpha } else { 0 }).collect())
        .collect();
    Ok(Cocycle::new(g, g, TwistingMap::trivial(g, g), &omega)?)
}

fn row(m: usize, q: usize, cycle: Cycle) -> Result<ProtocolSpec, ScenarioError> {
    Ok(ProtocolSpec::row(Lattice::new(m + 2, 3), m, q, cycle, true)?)
}

fn unknown_class(family: Family, class: &str, options: &[String]) -> ScenarioError {
    ScenarioError::UnknownClass {
        scenario: family.to_string(),
        class: class.to_string(),
        options: options.to_vec(),
    }
}

/// Cohomology classes labelled by the isomorphism type of their extension.
fn named_classes(
    g: &FiniteGroup,
    q: &FiniteGroup,
    phi: &TwistingMap,
) -> Result<(CohomologyClassSet, Vec<String>), ScenarioError> {
    let set = second_cohomology(g, q, phi)?;
    let names = set
        .classes
        .iter()
        .map(|c| Ok(identify(build_extension(g, q, &c.representative)?.e())))
        .collect::<Result<Vec<_>, ScenarioError>>()?;
    Ok((set, names))
}

fn pick_named(
    family: Family,
    class: &str,
    set: &CohomologyClassSet,
    names: &[String],
) -> Result<(String, Cocycle), ScenarioError> {
    let i = names
        .iter()
        .position(|n| n.eq_ignore_ascii_case(class))
        .ok_or_else(|| unknown_class(family, class, names))?;
    Ok((names[i].clone(), set.classes[i].representative.clone()))
}

/// Toric code with `Z2` symmetry: `λ = v_q²`, probed by the sign charge.
pub fn tc_z2(class: &str, sigma: usize) -> Result<Scenario, ScenarioError> {
    let g = z2_signs();
    let alpha = match class {
        "trivial" => 0,
        "nontrivial" => 1,
        _ => return Err(unknown_class(Family::TcZ2, class, &["trivial".into(), "nontrivial".into()])),
    };
    let c = carry_cocycle(&g, alpha)?;
    Scenario::build(
        Family::TcZ2,
        class.into(),
        &g,
        &g.clone().with_element_names(vec!["e".into(), "q".into()]),
        c,
        1,
        sigma,
        InvariantWord::power(1, 2),
        row(2, 1, Cycle::Forward)?,
    )
}

/// Order `(x, z, y)` in which the Klein-group squares are reported.
pub const SQUARES_ORDER: [usize; 3] = [1, 3, 2];

/// One representative class per relabelling orbit of `H²(Z2×Z2, Z2)`,
/// keyed by the extension type. Within an orbit the class whose
/// `(v_x², v_z², v_y²)` triple is lexicographically smallest (`+1` first)
/// is chosen.
pub fn z2z2_orbit_representatives() -> Result<Vec<(String, usize, CohomologyClassSet)>, ScenarioError> {
    let (g, q) = (z2_signs(), klein());
    let (set, names) = named_classes(&g, &q, &TwistingMap::trivial(&g, &q))?;
    let orbits = relabelling_orbits(&set, &q)?;
    let mut out = Vec::new();
    for orbit in orbits {
        let best = *orbit
            .iter()
            .min_by_key(|&&i| {
                let c = &set.classes[i].representative;
                SQUARES_ORDER.map(|k| c.value(k, k))
            })
            .expect("non-empty orbit");
        out.push((names[best].clone(), best, set.clone()));
    }
    out.sort_by_key(|(n, _, _)| extension_rank(n));
    Ok(out)
}

fn extension_rank(name: &str) -> usize {
    ["Z2xZ2xZ2", "Z4xZ2", "D8", "Q8"]
        .iter()
        .position(|n| *n == name)
        .unwrap_or(usize::MAX)
}

/// Toric code with `Z2×Z2`: three scenarios, one per `q ∈ {x, z, y}`.
pub fn tc_z2z2(class: &str) -> Result<Vec<Scenario>, ScenarioError> {
    let (g, q) = (z2_signs(), klein());
    let reps = z2z2_orbit_representatives()?;
    let names: Vec<String> = reps.iter().map(|r| r.0.clone()).collect();
    let (name, idx, set) = reps
        .into_iter()
        .find(|r| r.0.eq_ignore_ascii_case(class))
        .ok_or_else(|| unknown_class(Family::TcZ2Z2, class, &names))?;
    let c = set.classes[idx].representative.clone();
    SQUARES_ORDER
        .iter()
        .map(|&k| {
            Scenario::build(
                Family::TcZ2Z2,
                name.clone(),
                &g,
                &q,
                c.clone(),
                k,
                1,
                InvariantWord::power(k, 2),
                row(2, k, Cycle::Forward)?,
            )
        })
        .collect()
}

fn is_prime(p: usize) -> bool {
    p >= 2 && (2..p).take_while(|d| d * d <= p).all(|d| !p.is_multiple_of(d))
}

/// `Z_p` gauge group with `Z_p` symmetry, class `α`: `λ = v_q^p`.
pub fn zp(p: usize, alpha: usize, sigma: usize) -> Result<Scenario, ScenarioError> {
    if !is_prime(p) || p > 7 {
        return Err(ScenarioError::InvalidParameter(format!("p = {p} must be a prime ≤ 7")));
    }
    if alpha >= p {
        return Err(unknown_class(
            Family::Zp,
            &alpha.to_string(),
            &(0..p).map(|a| a.to_string()).collect::<Vec<_>>(),
        ));
    }
    let g = cyclic(p);
    Scenario::build(
        Family::Zp,
        alpha.to_string(),
        &g,
        &g,
        carry_cocycle(&g, alpha)?,
        1,
        sigma,
        InvariantWord::power(1, p),
        row(p, 1, Cycle::Forward)?,
    )
}

fn z4_sigma(sigma: usize) -> Result<(), ScenarioError> {
    if sigma == 1 || sigma == 3 {
        Ok(())
    } else {
        Err(ScenarioError::InvalidParameter(format!(
            "Z4 probes need χ_σ(-1) ≠ 1, i.e. σ ∈ {{1, 3}}; got {sigma}"
        )))
    }
}

/// `Z4` gauge group, `Z2` symmetry acting by inversion (permutes the `±i`
/// fluxes). Classes `D8` and `Q8`; `λ = v_q²`.
pub fn z4_perm(class: &str, sigma: usize) -> Result<Scenario, ScenarioError> {
    z4_sigma(sigma)?;
    let (g, q) = (z4_units(), cyclic(2));
    let phi = twisting_maps(&g, &q)?
        .into_iter()
        .find(|p| p.apply(1, 1) == 3)
        .expect("inversion is an automorphism of Z4");
    let (set, names) = named_classes(&g, &q, &phi)?;
    let (name, c) = pick_named(Family::Z4Perm, class, &set, &names)?;
    Scenario::build(
        Family::Z4Perm,
        name,
        &g,
        &q,
        c,
        1,
        sigma,
        InvariantWord::power(1, 2),
        row(2, 1, Cycle::Forward)?,
    )
}

/// `Z4` gauge group, `Z2` symmetry that leaves the fluxes alone. Classes
/// `Z4xZ2` and `Z8`; `λ = v_q⁴`, read out by a four-site cyclic permutation.
pub fn z4_triv(class: &str, sigma: usize) -> Result<Scenario, ScenarioError> {
    z4_sigma(sigma)?;
    let (g, q) = (z4_units(), cyclic(2));
    let (set, names) = named_classes(&g, &q, &TwistingMap::trivial(&g, &q))?;
    let (name, c) = pick_named(Family::Z4Triv, class, &set, &names)?;
    Scenario::build(
        Family::Z4Triv,
        name,
        &g,
        &q,
        c,
        1,
        sigma,
        InvariantWord::power(1, 4),
        row(4, 1, Cycle::Forward)?,
    )
}

/// `Q8` gauge group with `Z2` symmetry; the averaged word
/// `Σ_g (v_q g)²` probed by the two-dimensional charge.
pub fn q8(class: &str, sigma: Option<usize>) -> Result<Scenario, ScenarioError> {
    let (g, q) = (preset("Q8")?, cyclic(2));
    let (set, names) = named_classes(&g, &q, &TwistingMap::trivial(&g, &q))?;
    let (name, c) = pick_named(Family::Q8, class, &set, &names)?;
    let sigma = match sigma {
        Some(s) => s,
        None => {
            let t = CharacterTable::new(&g)?;
            (0..t.len()).find(|&s| t.dim(s) == 2).expect("Q8 has a 2-dim irrep")
        }
    };
    Scenario::build(
        Family::Q8,
        name,
        &g,
        &q,
        c,
        1,
        sigma,
        InvariantWord::averaged_square(1),
        row(2, 1, Cycle::Forward)?,
    )
}

/// Class selectors accepted by each family.
pub fn class_options(family: Family, p: usize) -> Vec<String> {
    let s = |v: &[&str]| v.iter().map(|x| x.to_string()).collect();
    match family {
        Family::TcZ2 => s(&["trivial", "nontrivial"]),
        Family::TcZ2Z2 => s(&["Z2xZ2xZ2", "Z4xZ2", "D8", "Q8"]),
        Family::Zp => (0..p).map(|a| a.to_string()).collect(),
        Family::Z4Perm => s(&["D8", "Q8"]),
        Family::Z4Triv => s(&["Z4xZ2", "Z8"]),
        Family::Q8 => s(&["Z2xQ8", "Z4xQ8_mod_Z2"]),
    }
}

/// The default probe charges of a family.
fn default_sigmas(family: Family, p: usize) -> Vec<usize> {
    match family {
        Family::TcZ2 | Family::TcZ2Z2 => vec![1],
        Family::Zp => (1..p).collect(),
        Family::Z4Perm | Family::Z4Triv => vec![1, 3],
        Family::Q8 => vec![4],
    }
}

/// Every scenario of a family for one class (all classes when `None`),
/// over the default probe charges unless `sigma` is given.
pub fn family_scenarios(
    family: Family,
    class: Option<&str>,
    p: usize,
    sigma: Option<usize>,
) -> Result<Vec<Scenario>, ScenarioError> {
    let classes = match class {
        Some(c) => vec![c.to_string()],
        None => class_options(family, p),
    };
    let sigmas = sigma.map_or_else(|| default_sigmas(family, p), |s| vec![s]);
    let mut out = Vec::new();
    for c in &classes {
        match family {
            Family::TcZ2Z2 => out.extend(tc_z2z2(c)?),
            Family::Q8 => out.push(q8(c, sigma)?),
            _ => {
                for &s in &sigmas {
                    out.push(match family {
                        Family::TcZ2 => tc_z2(c, s)?,
                        Family::Zp => {
                            let alpha = c.parse().map_err(|_| unknown_class(family, c, &class_options(family, p)))?;
                            zp(p, alpha, s)?
                        }
                        Family::Z4Perm => z4_perm(c, s)?,
                        Family::Z4Triv => z4_triv(c, s)?,
                        Family::TcZ2Z2 | Family::Q8 => unreachable!(),
                    });
                }
            }
        }
    }
    Ok(out)
}

/// All worked examples: every class of every family, `Z_p` for p = 2, 3, 5.
pub fn all_scenarios() -> Result<Vec<Scenario>, ScenarioError> {
    let mut out = Vec::new();
    for family in Family::ALL {
        if family == Family::Zp {
            for p in [2, 3, 5] {
                out.extend(family_scenarios(family, None, p, None)?);
            }
        } else {
            out.extend(family_scenarios(family, None, 0, None)?);
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Backends {
    pub analytic: bool,
    pub loops: bool,
    pub oracle: bool,
}

impl Backends {
    pub const DEFAULT: Backends = Backends {
        analytic: true,
        loops: true,
        oracle: false,
    };
    pub const ALL: Backends = Backends {
        analytic: true,
        loops: true,
        oracle: true,
    };
}

/// An invariant value with elements written by name.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum NamedValue {
    Element(String),
    Multiplicities(BTreeMap<String, usize>),
}

impl NamedValue {
    pub fn new(g: &FiniteGroup, v: &InvariantValue) -> Self {
        match v {
            InvariantValue::Element(x) => NamedValue::Element(g.element_name(*x).to_string()),
            InvariantValue::Multiplicities(m) => NamedValue::Multiplicities(
                m.iter().map(|(&x, &n)| (g.element_name(x).to_string(), n)).collect(),
            ),
        }
    }
}

impl fmt::Display for NamedValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            NamedValue::Element(x) => f.write_str(x),
            NamedValue::Multiplicities(m) => {
                let parts: Vec<String> = m.iter().map(|(x, n)| format!("{x}:{n}")).collect();
                write!(f, "{{{}}}", parts.join(","))
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub scenario: String,
    pub extension: String,
    pub lambda: NamedValue,
    pub analytic: Option<Complex64>,
    #[serde(rename = "loop")]
    pub loop_value: Option<Complex64>,
    pub oracle: Option<Complex64>,
    /// Why the oracle value is missing, when it was requested.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub oracle_note: Option<String>,
    pub agree: bool,
    pub wall_time: f64,
}

/// Evaluates the requested backends and compares every pair within `tol`.
/// An oracle that refuses the lattice size is reported, not treated as
/// disagreement.
pub fn order_parameter(s: &Scenario, backends: Backends, tol: f64) -> Result<Report, ScenarioError> {
    let start = Instant::now();
    let analytic = backends.analytic.then_some(s.expected);
    let loop_value = if backends.loops { Some(s.loop_value()?) } else { None };
    let (oracle, oracle_note) = if backends.oracle {
        match s.oracle_value() {
            Ok(v) => (Some(v), None),
            Err(ScenarioError::Peps(e @ PepsError::LatticeTooLarge { .. })) => (None, Some(e.to_string())),
            Err(e) => return Err(e),
        }
    } else {
        (None, None)
    };
    // drop signed zeros so printed values read the same in every format
    let clean = |v: Option<Complex64>| v.map(|z| Complex64::new(z.re + 0.0, z.im + 0.0));
    let (analytic, loop_value, oracle) = (clean(analytic), clean(loop_value), clean(oracle));
    let values: Vec<Complex64> = [analytic, loop_value, oracle].into_iter().flatten().collect();
    let agree = values
        .iter()
        .all(|a| values.iter().all(|b| (a - b).norm() <= tol));
    Ok(Report {
        scenario: s.id(),
        extension: s.extension_name.clone(),
        lambda: NamedValue::new(s.extension().g(), &s.lambda),
        analytic,
        loop_value,
        oracle,
        oracle_note,
        agree,
        wall_time: start.elapsed().as_secs_f64(),
    })
}

/// Sign of an element of `Z2` under the nontrivial character.
fn sign(x: usize) -> i8 {
    if x == 0 {
        1
    } else {
        -1
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct KleinColumn {
    pub extension: String,
    /// `(v_x², v_z², v_y²)` as signs.
    pub triple: [i8; 3],
    /// `v_x v_y v_x^{-1} v_y^{-1}` as a sign.
    pub commutator: i8,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct KleinTable {
    pub columns: Vec<KleinColumn>,
    /// The commutator agrees within `{Z2³, Z4×Z2}` and within `{D8, Q8}`
    /// and differs between the two pairs.
    pub commutator_identifies_pairs: bool,
    pub triples_separate_all: bool,
}

pub fn reproduce_table1() -> Result<KleinTable, ScenarioError> {
    let (g, q) = (z2_signs(), klein());
    let mut columns = Vec::new();
    for (name, idx, set) in z2z2_orbit_representatives()? {
        let ext = build_extension(&g, &q, &set.classes[idx].representative)?;
        let square = |k: usize| -> Result<i8, ScenarioError> {
            match evaluate_invariant(&InvariantWord::power(k, 2), &ext, ext.section())? {
                InvariantValue::Element(x) => Ok(sign(x)),
                InvariantValue::Multiplicities(_) => unreachable!("plain word"),
            }
        };
        let triple = [square(SQUARES_ORDER[0])?, square(SQUARES_ORDER[1])?, square(SQUARES_ORDER[2])?];
        let commutator = sign(crate::extension::spt_compactification_quantity(&ext, ext.section(), 1, 2));
        columns.push(KleinColumn {
            extension: name,
            triple,
            commutator,
        });
    }
    let c: Vec<i8> = columns.iter().map(|c| c.commutator).collect();
    let commutator_identifies_pairs = c.len() == 4 && c[0] == c[1] && c[2] == c[3] && c[0] != c[2];
    let triples_separate_all = (0..columns.len())
        .all(|i| (0..i).all(|j| columns[i].triple != columns[j].triple));
    Ok(KleinTable {
        columns,
        commutator_identifies_pairs,
        triples_separate_all,
    })
}

/// `ω(q, k)` for `q, k ∈ {x, y, z}` as signs.
pub type SignMatrix = [[i8; 3]; 3];

fn sign_matrix(c: &Cocycle) -> SignMatrix {
    let mut m = [[0; 3]; 3];
    for (i, row) in m.iter_mut().enumerate() {
        for (j, x) in row.iter_mut().enumerate() {
            *x = sign(c.value(i + 1, j + 1));
        }
    }
    m
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct KleinPanel {
    pub extension: String,
    /// Lexicographically smallest cocycle of the chosen class.
    pub matrix: SignMatrix,
    /// Diagonal `(ω(x,x), ω(y,y), ω(z,z))`.
    pub diagonal: [i8; 3],
    /// `ω(q,k) ω(k,q)^{-1}` for `(x,y), (x,z), (y,z)`.
    pub spt_pairs: [i8; 3],
}

pub fn reproduce_fig2() -> Result<Vec<KleinPanel>, ScenarioError> {
    let g = z2_signs();
    let mut panels = Vec::new();
    for (name, idx, set) in z2z2_orbit_representatives()? {
        let rep = &set.classes[idx].members[0];
        let m = sign_matrix(rep);
        let pair = |a: usize, b: usize| sign(g.mul(rep.value(a, b), g.inv(rep.value(b, a))));
        panels.push(KleinPanel {
            extension: name,
            matrix: m,
            diagonal: [m[0][0], m[1][1], m[2][2]],
            spt_pairs: [pair(1, 2), pair(1, 3), pair(2, 3)],
        });
    }
    Ok(panels)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct KleinClass {
    pub representative: SignMatrix,
    pub extension: String,
    /// `ω(q,q)` for `q = x, y, z`.
    pub lambda: [i8; 3],
    /// `ω(q,k) ω(k,q)^{-1}` for `(x,y), (x,z), (y,z)`.
    pub lambda_prime: [i8; 3],
    pub orbit: usize,
    pub size: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct KleinClassReport {
    pub classes: Vec<KleinClass>,
    /// Distinct normalized coboundaries `δl`.
    pub coboundaries: Vec<SignMatrix>,
    pub orbits: Vec<Vec<usize>>,
    /// `λ` and `λ'` agree on every member of every class.
    pub invariants_constant_on_classes: bool,
    /// Every orbit representative satisfies the cocycle condition.
    pub representatives_valid: bool,
}

pub fn reproduce_appendix_c() -> Result<KleinClassReport, ScenarioError> {
    let (g, q) = (z2_signs(), klein());
    let (set, names) = named_classes(&g, &q, &TwistingMap::trivial(&g, &q))?;
    let orbits = relabelling_orbits(&set, &q)?;
    let invariants = |c: &Cocycle| {
        let lambda = [1, 2, 3].map(|k| sign(c.value(k, k)));
        let pair = |a: usize, b: usize| sign(g.mul(c.value(a, b), g.inv(c.value(b, a))));
        (lambda, [pair(1, 2), pair(1, 3), pair(2, 3)])
    };
    let mut classes = Vec::new();
    let mut constant = true;
    let mut valid = true;
    for (i, cl) in set.classes.iter().enumerate() {
        let inv = invariants(&cl.representative);
        constant &= cl.members.iter().all(|m| invariants(m) == inv);
        valid &= cl.representative.validate(&g, &q).is_ok();
        classes.push(KleinClass {
            representative: sign_matrix(&cl.representative),
            extension: names[i].clone(),
            lambda: inv.0,
            lambda_prime: inv.1,
            orbit: orbits.iter().position(|o| o.contains(&i)).expect("every class has an orbit"),
            size: cl.size(),
        });
    }
    let mut coboundaries: Vec<SignMatrix> = Vec::new();
    for bits in 0..8usize {
        let l = |k: usize| if k == 0 { 0 } else { (bits >> (k - 1)) & 1 };
        let mut m = [[0; 3]; 3];
        for (i, row) in m.iter_mut().enumerate() {
            for (j, x) in row.iter_mut().enumerate() {
                let (a, b) = (i + 1, j + 1);
                *x = sign((l(a) + l(b) + l(q.mul(a, b))) % 2);
            }
        }
        if !coboundaries.contains(&m) {
            coboundaries.push(m);
        }
    }
    Ok(KleinClassReport {
        classes,
        coboundaries,
        orbits,
        invariants_constant_on_classes: constant,
        representatives_valid: valid,
    })
}
