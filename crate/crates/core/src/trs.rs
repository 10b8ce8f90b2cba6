//! Anti-unitary (time-reversal) virtual symmetry data.
//!
//! A time-reversal symmetry acts on the virtual space as `V_T K` with `K`
//! complex conjugation. Writing `u_g` for the `G` action, the data is
//! `ω_T` with `V_T V_T^* = u_{ω_T}` and `φ_T` with
//! `V_T u_g^* V_T^{-1} = u_{φ_T(g)}`; consistency forces
//! `φ_T ∘ φ_T = τ_{ω_T}` (conjugation by `ω_T`).

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::group::{cyclic, Automorphism, FiniteGroup};
use crate::rep::{CMatrix, Representation};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum TrsError {
    #[error("not a valid time-reversal datum: {0}")]
    NotAValidTRSDatum(String),
}

#[derive(Debug, Clone)]
pub struct TrsData {
    pub v: CMatrix,
    /// `V_T V_T^* = sign · u_{ω_T}`.
    pub omega: usize,
    pub sign: i8,
    pub phi: Automorphism,
}

impl TrsData {
    pub fn new(group: &FiniteGroup, rep: &Representation, v: CMatrix, tol: f64) -> Result<Self, TrsError> {
        let bad = |m: String| TrsError::NotAValidTRSDatum(m);
        if v.nrows() != rep.dim() || v.ncols() != rep.dim() {
            return Err(bad(format!("V_T must be {0}×{0}", rep.dim())));
        }
        let id = CMatrix::identity(rep.dim(), rep.dim());
        if (v.adjoint() * &v - &id).norm() > tol {
            return Err(bad("V_T is not unitary".into()));
        }
        let vv = &v * v.conjugate();
        let (omega, c) = find(group, rep, &vv, tol).ok_or_else(|| bad("V_T V_T^* is not ±u_g".into()))?;
        let sign = if (c - 1.0).norm() < tol {
            1
        } else if (c + 1.0).norm() < tol {
            -1
        } else {
            return Err(bad(format!("V_T V_T^* has phase {c}, expected ±1")));
        };
        let v_inv = v.adjoint();
        let mut images = Vec::with_capacity(group.order());
        for g in group.elements() {
            let m = &v * rep.matrix(g).conjugate() * &v_inv;
            match find(group, rep, &m, tol) {
                Some((h, c)) if (c - 1.0).norm() < tol => images.push(h),
                _ => return Err(bad(format!("V_T u_{g}^* V_T^-1 is not some u_h"))),
            }
        }
        let phi = Automorphism(images);
        if !phi.is_automorphism_of(group) {
            return Err(bad("φ_T is not an automorphism".into()));
        }
        let tau = Automorphism::inner(group, omega);
        if phi.compose(&phi) != tau {
            return Err(bad("φ_T ∘ φ_T differs from conjugation by ω_T".into()));
        }
        Ok(TrsData { v, omega, sign, phi })
    }

    /// The datum after `V_T → e^{iθ} u_h V_T`.
    pub fn gauged(
        &self,
        group: &FiniteGroup,
        rep: &Representation,
        h: usize,
        theta: f64,
        tol: f64,
    ) -> Result<Self, TrsError> {
        let v = rep.matrix(h) * &self.v * Complex64::from_polar(1.0, theta);
        TrsData::new(group, rep, v, tol)
    }
}

/// Finds `h` with `m ≈ c·u_h` for a phase `c`.
fn find(group: &FiniteGroup, rep: &Representation, m: &CMatrix, tol: f64) -> Option<(usize, Complex64)> {
    group.elements().find_map(|h| {
        let u = rep.matrix(h);
        let c = (u.adjoint() * m).trace() / rep.dim() as f64;
        ((c.norm() - 1.0).abs() < tol && (m - u * c).norm() < tol).then_some((h, c))
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum TrsClass {
    Trivial,
    Nontrivial,
}

/// The toric-code virtual space `C[Z2] ⊗ C²`: `u_g = L_g ⊗ I`. The extra
/// qubit leaves room for `V_T V_T^* = L_1`, which no `V_T` commuting with
/// `L_1` on `C[Z2]` alone can produce.
pub fn tc_space() -> (FiniteGroup, Representation) {
    let g = cyclic(2);
    let reg = Representation::left_regular(&g);
    let id2 = CMatrix::identity(2, 2);
    let mats = g.elements().map(|x| reg.matrix(x).kronecker(&id2)).collect();
    let rep = Representation::from_matrices(&g, mats, 1e-12).expect("tensor product of a representation");
    (g, rep)
}

/// Representative `V_T` for each toric-code class: the identity, and
/// `P_+ ⊗ I + P_- ⊗ iσ_y` with `P_±` the `L_1` eigenprojectors.
pub fn tc_time_reversal(class: TrsClass) -> CMatrix {
    match class {
        TrsClass::Trivial => CMatrix::identity(4, 4),
        TrsClass::Nontrivial => {
            let r = |x: f64| Complex64::new(x, 0.0);
            let p_plus = DMatrix::from_row_slice(2, 2, &[r(0.5), r(0.5), r(0.5), r(0.5)]);
            let p_minus = DMatrix::from_row_slice(2, 2, &[r(0.5), r(-0.5), r(-0.5), r(0.5)]);
            let isy = DMatrix::from_row_slice(2, 2, &[r(0.0), r(1.0), r(-1.0), r(0.0)]);
            p_plus.kronecker(&CMatrix::identity(2, 2)) + p_minus.kronecker(&isy)
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrsClassification {
    pub class: TrsClass,
    pub omega: usize,
    pub sign: i8,
    pub gauges_checked: usize,
}

/// Classifies a toric-code `V_T` by `ω_T ∈ {e, g}` and checks that the
/// class survives `trials` seeded gauges `V_T → e^{iθ} u_h V_T`.
pub fn trs_classify_tc(v: &CMatrix, trials: usize, seed: u64) -> Result<TrsClassification, TrsError> {
    const TOL: f64 = 1e-10;
    let (g, rep) = tc_space();
    let data = TrsData::new(&g, &rep, v.clone(), TOL)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..trials {
        let h = rng.gen_range(0..g.order());
        let theta = rng.gen_range(0.0..std::f64::consts::TAU);
        let gauged = data.gauged(&g, &rep, h, theta, TOL)?;
        if gauged.omega != data.omega || gauged.sign != data.sign {
            return Err(TrsError::NotAValidTRSDatum(format!(
                "ω_T changed under gauge u_{h}, θ = {theta}"
            )));
        }
    }
    Ok(TrsClassification {
        class: if data.omega == g.identity() {
            TrsClass::Trivial
        } else {
            TrsClass::Nontrivial
        },
        omega: data.omega,
        sign: data.sign,
        gauges_checked: trials,
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PowerOrbit {
    /// `h_1, h_2, …` up to the first identity or `m_max`.
    pub h: Vec<usize>,
    /// Least `m` with `h_m = e`.
    pub closes_at: Option<usize>,
}

/// `h_1 = g φ_T(g)`, `h_m = h_1 τ_{ω_T}(h_{m-1})`, stopping at the first
/// identity. `φ_T` here already includes the conjugation of `g`.
pub fn trs_power_orbit(group: &FiniteGroup, omega: usize, phi: &Automorphism, g: usize, m_max: usize) -> PowerOrbit {
    let h1 = group.mul(g, phi.apply(g));
    let mut h = Vec::new();
    let mut cur = h1;
    for m in 1..=m_max {
        if m > 1 {
            cur = group.mul(h1, group.conjugate(omega, cur));
        }
        h.push(cur);
        if cur == group.identity() {
            return PowerOrbit { h, closes_at: Some(m) };
        }
    }
    PowerOrbit { h, closes_at: None }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::preset;
    use proptest::prelude::*;

    #[test]
    fn tc_classes() {
        let t = trs_classify_tc(&tc_time_reversal(TrsClass::Trivial), 1000, 0).unwrap();
        assert_eq!(t.class, TrsClass::Trivial);
        let n = trs_classify_tc(&tc_time_reversal(TrsClass::Nontrivial), 1000, 0).unwrap();
        assert_eq!((n.class, n.omega, n.sign), (TrsClass::Nontrivial, 1, 1));
    }

    #[test]
    fn rejects_non_datum() {
        let r = |x: f64| Complex64::new(x, 0.0);
        let mut v = CMatrix::identity(4, 4);
        v[(0, 0)] = Complex64::new(0.0, 1.0);
        assert!(trs_classify_tc(&v, 10, 0).is_err());
        let not_unitary = CMatrix::identity(4, 4) * r(2.0);
        assert!(trs_classify_tc(&not_unitary, 10, 0).is_err());
    }

    #[test]
    fn tc_orbit_closes_immediately() {
        let (g, rep) = tc_space();
        for class in [TrsClass::Trivial, TrsClass::Nontrivial] {
            let d = TrsData::new(&g, &rep, tc_time_reversal(class), 1e-10).unwrap();
            for x in g.elements() {
                let o = trs_power_orbit(&g, d.omega, &d.phi, x, 4);
                assert_eq!(o.h[0], 0);
                assert_eq!(o.closes_at, Some(1));
            }
        }
    }

    #[test]
    fn orbit_may_not_close() {
        let z3 = cyclic(3);
        let id = Automorphism::identity(3);
        let o = trs_power_orbit(&z3, 0, &id, 1, 2);
        // h_1 = 2, h_2 = 2 + 2 = 1
        assert_eq!(o.h, vec![2, 1]);
        assert_eq!(o.closes_at, None);
        assert_eq!(trs_power_orbit(&z3, 0, &id, 1, 3).closes_at, Some(3));
    }

    #[test]
    fn identity_gauge_is_trivial() {
        let q8 = preset("Q8").unwrap();
        let id = Automorphism::identity(8);
        assert_eq!(trs_power_orbit(&q8, 0, &id, 0, 5).closes_at, Some(1));
    }

    proptest! {
        #[test]
        fn gauge_preserves_class(h in 0usize..2, theta in 0.0..std::f64::consts::TAU, nontrivial: bool) {
            let (g, rep) = tc_space();
            let class = if nontrivial { TrsClass::Nontrivial } else { TrsClass::Trivial };
            let d = TrsData::new(&g, &rep, tc_time_reversal(class), 1e-10).unwrap();
            let e = d.gauged(&g, &rep, h, theta, 1e-10).unwrap();
            prop_assert_eq!(e.omega, d.omega);
            prop_assert_eq!(e.phi, d.phi);
        }
    }
}
