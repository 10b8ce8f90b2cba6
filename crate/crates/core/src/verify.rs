//! The invariant suite behind `sfrac verify`: structural checks on groups,
//! cohomology, extensions and realizations, plus every worked example.

use serde::{Deserialize, Serialize};

use crate::character::CharacterTable;
use crate::extension::{
    are_cohomologous, build_extension, cocycle_from_extension, relabelling_orbits, second_cohomology, twisting_maps,
    verify_gauge_invariance, Cocycle, TwistingMap,
};
use crate::group::{cyclic, preset, FiniteGroup, PRESET_NAMES};
use crate::peps::braid_flux_around_charge;
use crate::scenarios::{
    all_scenarios, reproduce_appendix_c, reproduce_table1, tc_z2, zp, Scenario, ScenarioError,
};
use crate::trs::{tc_time_reversal, trs_classify_tc, trs_power_orbit, tc_space, TrsClass, TrsData};

/// Gauge trials per scenario word.
pub const GAUGE_TRIALS: usize = 1000;
const EXACT: f64 = 1e-12;
const ORACLE_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, Default)]
pub struct VerifyOptions {
    pub seed: u64,
    /// Adds a table that breaks the cocycle condition, for fault injection.
    pub inject_bad_cocycle: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerifyReport {
    pub seed: u64,
    pub checks: Vec<Check>,
}

impl VerifyReport {
    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }
}

type Outcome = Result<String, String>;

fn err<E: std::fmt::Display>(e: E) -> String {
    e.to_string()
}

/// Every preset, with `Z1..Z16` expanded.
pub fn all_presets() -> Vec<FiniteGroup> {
    let mut out: Vec<FiniteGroup> = (1..=16).map(cyclic).collect();
    for name in PRESET_NAMES.iter().filter(|n| !n.contains("..")) {
        out.push(preset(name).expect("listed preset"));
    }
    out
}

/// The (G, Q, φ) instances of the worked examples with their class counts.
pub fn example_instances() -> Vec<(String, FiniteGroup, FiniteGroup, TwistingMap, usize)> {
    let mut out = Vec::new();
    let mut plain = |label: &str, g: FiniteGroup, q: FiniteGroup, n: usize| {
        let phi = TwistingMap::trivial(&g, &q);
        out.push((label.to_string(), g, q, phi, n));
    };
    plain("(Z2, Z2)", cyclic(2), cyclic(2), 2);
    plain("(Z2, Z2xZ2)", cyclic(2), preset("Z2xZ2").expect("preset"), 8);
    for p in [2, 3, 5] {
        plain(&format!("(Z{p}, Z{p})"), cyclic(p), cyclic(p), p);
    }
    plain("(Z4, Z2) trivial φ", cyclic(4), cyclic(2), 2);
    plain("(Q8, Z2)", preset("Q8").expect("preset"), cyclic(2), 2);
    let (g, q) = (cyclic(4), cyclic(2));
    let inversion = twisting_maps(&g, &q)
        .expect("small groups")
        .into_iter()
        .find(|p| !p.is_trivial())
        .expect("Z4 has the inversion automorphism");
    out.push(("(Z4, Z2) inversion φ".into(), g, q, inversion, 2));
    out
}

fn group_axioms() -> Outcome {
    let groups = all_presets();
    match groups.iter().find(|g| !g.check_axioms()) {
        Some(g) => Err(format!("{} fails the group axioms", g.name())),
        None => Ok(format!("{} presets", groups.len())),
    }
}

fn character_orthogonality() -> Outcome {
    let mut worst: f64 = 0.0;
    for g in all_presets() {
        let t = CharacterTable::new(&g).map_err(err)?;
        let r = t.orthogonality_residual(&g);
        if r >= 1e-10 {
            return Err(format!("{}: residual {r:.1e}", g.name()));
        }
        worst = worst.max(r);
    }
    Ok(format!("worst residual {worst:.0e}"))
}

fn cohomology_counts() -> Outcome {
    let mut parts = Vec::new();
    for (label, g, q, phi, want) in example_instances() {
        let n = second_cohomology(&g, &q, &phi).map_err(err)?.len();
        if n != want {
            return Err(format!("{label}: {n} classes, expected {want}"));
        }
        parts.push(format!("{label}→{n}"));
    }
    Ok(parts.join(" "))
}

fn cocycle_condition(inject: bool) -> Outcome {
    let mut count = 0;
    for (label, g, q, phi, _) in example_instances() {
        for c in second_cohomology(&g, &q, &phi).map_err(err)?.classes {
            c.representative
                .validate(&g, &q)
                .map_err(|e| format!("{label}: {e}"))?;
            count += 1;
        }
    }
    if inject {
        // ω(x, y) = 1 alone on Z2×Z2 breaks (x, y, y)
        let (g, q) = (cyclic(2), preset("Z2xZ2").expect("preset"));
        let mut flat = vec![0; 16];
        flat[4 + 2] = 1;
        let bad = Cocycle::from_flat(TwistingMap::trivial(&g, &q), flat);
        bad.validate(&g, &q).map_err(|e| format!("injected cocycle: {e}"))?;
        count += 1;
    }
    Ok(format!("{count} representatives"))
}

fn extension_round_trip() -> Outcome {
    let mut count = 0;
    for (label, g, q, phi, _) in example_instances() {
        for c in second_cohomology(&g, &q, &phi).map_err(err)?.classes {
            let ext = build_extension(&g, &q, &c.representative).map_err(err)?;
            let back = cocycle_from_extension(&ext, ext.section()).map_err(err)?;
            if are_cohomologous(&g, &q, &c.representative, &back).is_none() {
                return Err(format!("{label}: extracted cocycle left its class"));
            }
            count += 1;
        }
    }
    Ok(format!("{count} extensions"))
}

fn gauge_invariance(scenarios: &[Scenario], seed: u64) -> Outcome {
    for s in scenarios {
        let ext = s.extension();
        if !verify_gauge_invariance(&s.word, ext, ext.section(), GAUGE_TRIALS, seed).map_err(err)? {
            return Err(format!("{}: word value moved under a gauge", s.id()));
        }
    }
    Ok(format!("{} words × {GAUGE_TRIALS} gauges", scenarios.len()))
}

fn realization_exactness(scenarios: &[Scenario]) -> Outcome {
    for s in scenarios {
        s.realization().map_err(|e| format!("{}: {e}", s.id()))?;
    }
    Ok(format!("{} realizations", scenarios.len()))
}

fn loop_vs_analytic(scenarios: &[Scenario]) -> Outcome {
    let mut worst: f64 = 0.0;
    for s in scenarios {
        let d = (s.loop_value().map_err(err)? - s.expected).norm();
        if d > EXACT {
            return Err(format!("{}: |loop - analytic| = {d:.1e}", s.id()));
        }
        worst = worst.max(d);
    }
    Ok(format!("{} scenarios, worst {worst:.0e}", scenarios.len()))
}

fn loop_vs_oracle() -> Outcome {
    let mut list = vec![tc_z2("trivial", 1), tc_z2("nontrivial", 1)];
    list.extend((0..3).map(|a| zp(3, a, 1)));
    let mut worst: f64 = 0.0;
    for s in list {
        let s = s.map_err(err)?;
        let d = (s.loop_value().map_err(err)? - s.oracle_value().map_err(err)?).norm();
        if d > ORACLE_TOL {
            return Err(format!("{}: |loop - oracle| = {d:.1e}", s.id()));
        }
        worst = worst.max(d);
    }
    Ok(format!("TC and Z3, worst {worst:.0e}"))
}

fn table1() -> Outcome {
    let t = reproduce_table1().map_err(err)?;
    let want = [
        ("Z2xZ2xZ2", [1, 1, 1], 1),
        ("Z4xZ2", [1, -1, -1], 1),
        ("D8", [1, 1, -1], -1),
        ("Q8", [-1, -1, -1], -1),
    ];
    for (col, (name, triple, comm)) in t.columns.iter().zip(want) {
        if col.extension != name || col.triple != triple || col.commutator != comm {
            return Err(format!("column {name}: got {col:?}"));
        }
    }
    if t.columns.len() != 4 || !t.commutator_identifies_pairs || !t.triples_separate_all {
        return Err("pairing flags".into());
    }
    Ok("4 columns".into())
}

fn appendix_c() -> Outcome {
    let a = reproduce_appendix_c().map_err(err)?;
    let mut sizes: Vec<usize> = a.orbits.iter().map(Vec::len).collect();
    sizes.sort();
    if a.classes.len() != 8 || a.coboundaries.len() != 2 || sizes != [1, 1, 3, 3] {
        return Err(format!("{} classes, {} coboundaries, orbits {sizes:?}", a.classes.len(), a.coboundaries.len()));
    }
    if !a.invariants_constant_on_classes || !a.representatives_valid {
        return Err("invariants or representatives".into());
    }
    Ok("8 classes, 4 orbits".into())
}

fn zp_orbits() -> Outcome {
    for p in [3, 5] {
        let g = cyclic(p);
        let set = second_cohomology(&g, &g, &TwistingMap::trivial(&g, &g)).map_err(err)?;
        let orbits = relabelling_orbits(&set, &g).map_err(err)?;
        if orbits.len() != 2 {
            return Err(format!("Z{p}: {} orbits", orbits.len()));
        }
    }
    Ok("nontrivial classes form one orbit for p = 3, 5".into())
}

fn braiding() -> Outcome {
    let mut count = 0;
    for name in ["Z2", "Z3", "Z4", "Q8"] {
        let g = preset(name).map_err(err)?;
        let t = CharacterTable::new(&g).map_err(err)?;
        for sigma in 0..t.len() {
            for x in g.elements() {
                let got = braid_flux_around_charge(&g, &t, sigma, x).map_err(err)?;
                let want = t.chi(sigma, x) / t.dim(sigma) as f64;
                if (got - want).norm() > EXACT {
                    return Err(format!("{name} σ={sigma} g={x}: {got} vs {want}"));
                }
                count += 1;
            }
        }
    }
    Ok(format!("{count} (irrep, element) pairs"))
}

fn time_reversal(seed: u64) -> Outcome {
    let (g, rep) = tc_space();
    let mut classes = Vec::new();
    for class in [TrsClass::Trivial, TrsClass::Nontrivial] {
        let v = tc_time_reversal(class);
        let c = trs_classify_tc(&v, GAUGE_TRIALS, seed).map_err(err)?;
        if c.class != class {
            return Err(format!("{class:?} classified as {:?}", c.class));
        }
        let d = TrsData::new(&g, &rep, v, 1e-10).map_err(err)?;
        for x in g.elements() {
            if trs_power_orbit(&g, d.omega, &d.phi, x, 1).closes_at != Some(1) {
                return Err(format!("{class:?}: h_1 ≠ e for g = {x}"));
            }
        }
        classes.push(c.omega);
    }
    Ok(format!("ω_T = {classes:?}, h_1 = e"))
}

/// Each character sum is a phase: the probes resolve λ to a root of unity.
fn scenario_values(scenarios: &[Scenario]) -> Outcome {
    for s in scenarios {
        let v = s.character_sum();
        if (v.norm() - 1.0).abs() > EXACT {
            return Err(format!("{}: character sum {v} is not a phase", s.id()));
        }
    }
    Ok(format!("{} scenarios", scenarios.len()))
}

pub fn run_suite(opts: VerifyOptions) -> VerifyReport {
    let scenarios: Result<Vec<Scenario>, ScenarioError> = all_scenarios();
    let mut checks = Vec::new();
    let mut push = |name: &str, outcome: Outcome| {
        let (passed, detail) = match outcome {
            Ok(d) => (true, d),
            Err(d) => (false, d),
        };
        checks.push(Check {
            name: name.into(),
            passed,
            detail,
        });
    };
    push("group axioms", group_axioms());
    push("character orthogonality", character_orthogonality());
    push("cohomology counts", cohomology_counts());
    push("cocycle condition", cocycle_condition(opts.inject_bad_cocycle));
    push("extension round trip", extension_round_trip());
    match &scenarios {
        Ok(list) => {
            push("scenario gauge invariance", gauge_invariance(list, opts.seed));
            push("realization exactness", realization_exactness(list));
            push("scenario values", scenario_values(list));
            push("loop vs analytic", loop_vs_analytic(list));
        }
        Err(e) => push("scenario construction", Err(e.to_string())),
    }
    push("loop vs oracle", loop_vs_oracle());
    push("klein squares and commutators", table1());
    push("klein orbits", appendix_c());
    push("Zp orbits", zp_orbits());
    push("braiding", braiding());
    push("time reversal", time_reversal(opts.seed));
    VerifyReport {
        seed: opts.seed,
        checks,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn injected_cocycle_fails_only_its_check() {
        let r = run_suite(VerifyOptions {
            seed: 0,
            inject_bad_cocycle: true,
        });
        let failed: Vec<&str> = r.checks.iter().filter(|c| !c.passed).map(|c| c.name.as_str()).collect();
        assert_eq!(failed, vec!["cocycle condition"]);
    }

    #[test]
    fn clean_suite_passes() {
        let r = run_suite(VerifyOptions::default());
        for c in &r.checks {
            assert!(c.passed, "{}: {}", c.name, c.detail);
        }
    }
}
