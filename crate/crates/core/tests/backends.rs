use num_complex::Complex64;
use proptest::prelude::*;
use sfrac_core::extension::{evaluate_invariant, InvariantValue};
use sfrac_core::peps::PepsError;
use sfrac_core::scenarios::{
    family_scenarios, order_parameter, q8, tc_z2z2, z4_perm, z4_triv, zp, Backends, Family, ScenarioError,
};

const ORACLE_TOL: f64 = 1e-10;

fn assert_backends_agree(s: &sfrac_core::scenarios::Scenario) {
    let l = s.loop_value().unwrap();
    let o = s.oracle_value().unwrap();
    assert!((l - o).norm() < ORACLE_TOL, "{}: loop {l} oracle {o}", s.id());
    assert!((l - s.expected).norm() < 1e-12, "{}: loop {l} analytic {}", s.id(), s.expected);
}

#[test]
fn klein_oracle() {
    for class in ["Z2xZ2xZ2", "Z4xZ2", "D8", "Q8"] {
        for s in tc_z2z2(class).unwrap() {
            assert_backends_agree(&s);
        }
    }
}

#[test]
fn z4_oracle() {
    for class in ["D8", "Q8"] {
        assert_backends_agree(&z4_perm(class, 1).unwrap());
    }
    for class in ["Z8", "Z4xZ2"] {
        assert_backends_agree(&z4_triv(class, 3).unwrap());
    }
}

#[test]
fn q8_oracle() {
    for class in ["Z2xQ8", "Z4xQ8_mod_Z2"] {
        assert_backends_agree(&q8(class, None).unwrap());
    }
}

#[test]
fn z5_oracle_declines() {
    let s = zp(5, 1, 1).unwrap();
    match s.oracle_value() {
        Err(ScenarioError::Peps(PepsError::LatticeTooLarge { entries, limit })) => assert!(entries > limit),
        other => panic!("expected LatticeTooLarge, got {other:?}"),
    }
    let r = order_parameter(&s, Backends::ALL, ORACLE_TOL).unwrap();
    assert!(r.oracle.is_none() && r.agree);
}

#[test]
fn z2_family_matches_the_toric_code() {
    // Z_p with p = 2 is the toric code in another guise
    for alpha in 0..2 {
        let s = zp(2, alpha, 1).unwrap();
        let want = if alpha == 0 { 1.0 } else { -1.0 };
        assert!((s.loop_value().unwrap() - Complex64::new(want, 0.0)).norm() < 1e-12);
    }
}

fn families() -> impl Strategy<Value = (Family, usize)> {
    prop_oneof![
        Just((Family::TcZ2, 0)),
        Just((Family::TcZ2Z2, 0)),
        Just((Family::Zp, 3)),
        Just((Family::Zp, 5)),
        Just((Family::Z4Perm, 0)),
        Just((Family::Z4Triv, 0)),
        Just((Family::Q8, 0)),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    /// The stored expectation is χ_σ(λ)/d_σ, recomputed from a fresh evaluation.
    #[test]
    fn expected_values_are_recomputed((family, p) in families(), pick in any::<prop::sample::Index>()) {
        let all = family_scenarios(family, None, p, None).unwrap();
        let s = &all[pick.index(all.len())];
        let ext = s.extension();
        let lambda = evaluate_invariant(&s.word, ext, ext.section()).unwrap();
        let t = s.table();
        let d = t.dim(s.sigma) as f64;
        let want = match &lambda {
            InvariantValue::Element(x) => t.chi(s.sigma, *x) / d,
            InvariantValue::Multiplicities(m) => {
                let n: usize = m.values().sum();
                m.iter().map(|(&x, &k)| t.chi(s.sigma, x) * k as f64).sum::<Complex64>() / (n as f64 * d)
            }
        };
        prop_assert!((s.expected - want).norm() < 1e-12);
        prop_assert!((s.loop_value().unwrap() - want).norm() < 1e-12);
    }
}
