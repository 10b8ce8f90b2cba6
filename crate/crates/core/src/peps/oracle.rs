//! Brute-force contraction of the double-layer network.
//!
//! Every site pair is written as four leg tensors `[g_s, β, α] ↦ (v_q u_g)[β, α]`
//! sharing the summation index `g_s`, which is the exact factorization of
//! `A^† U A` for the fixed-point tensor `A = (1/|G|) Σ_g u_g^{⊗4}`. Bond
//! operators become further small tensors and the resulting hyper-graph is
//! contracted by greedy variable elimination, without using any trace
//! identity of the loop calculus.

use num_complex::Complex64;

use super::charge::ChargeOperator;
use super::lattice::{End, LEGS};
use super::mono::Mono;
use super::protocol::{BondOp, Denominator, ProtocolSpec};
use super::realization::SymmetryRealization;
use super::PepsError;

/// Largest intermediate tensor, in entries.
pub const MAX_ENTRIES: f64 = (1u64 << 26) as f64;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DenseResult {
    /// The unnormalized network value.
    pub lambda: Complex64,
    /// `lambda` divided by the normalizing network.
    pub lambda_hat: Complex64,
    /// Value of the normalizing network.
    pub denominator: Complex64,
}

#[derive(Debug, Clone)]
struct Tensor {
    vars: Vec<usize>,
    data: Vec<Complex64>,
}

pub fn dense_contract(
    spec: &ProtocolSpec,
    real: &SymmetryRealization,
    charge: Option<&ChargeOperator>,
    denominator: Denominator,
) -> Result<DenseResult, PepsError> {
    spec.validate(real.extension().q().order(), real.g_order())?;
    let lambda = contract_network(spec, real, charge)?;
    let den = contract_network(&spec.denominator(denominator), real, charge)?;
    if den.norm() < 1e-300 {
        return Err(PepsError::ZeroNorm);
    }
    Ok(DenseResult {
        lambda,
        lambda_hat: lambda / den,
        denominator: den,
    })
}

/// Value of one network, including the `1/|G|` per site pair.
pub fn contract_network(
    spec: &ProtocolSpec,
    real: &SymmetryRealization,
    charge: Option<&ChargeOperator>,
) -> Result<Complex64, PepsError> {
    let lat = spec.lattice;
    let ket_ops = spec.ket_ops();
    let bra_ops = spec.bra_ops();
    if spec.charges.is_some() && charge.is_none() {
        return Err(PepsError::MissingCharge);
    }
    let d = real.dim();
    let n_g = real.g_order();
    let pieces = charge.map_or(1, ChargeOperator::num_pieces);

    let mut dims = Vec::new();
    let mut new_var = |size: usize| {
        dims.push(size);
        dims.len() - 1
    };
    let ket_piece = new_var(pieces);
    let bra_piece = new_var(pieces);
    let g_vars: Vec<usize> = lat.sites().map(|_| new_var(n_g)).collect();
    let mut split = |has_op: bool| {
        let a = new_var(d);
        (a, if has_op { new_var(d) } else { a })
    };
    let ket_vars: Vec<(usize, usize)> = (0..lat.num_bonds())
        .map(|i| split(ket_ops.contains_key(&lat.bond(i))))
        .collect();
    let bra_vars: Vec<(usize, usize)> = (0..lat.num_bonds())
        .map(|i| split(bra_ops.contains_key(&lat.bond(i))))
        .collect();
    let pick = |pair: (usize, usize), end: End| match end {
        End::First => pair.0,
        End::Second => pair.1,
    };

    let mut tensors = Vec::new();
    for s in lat.sites() {
        let t = spec.pi(s);
        let v = real.v(spec.q_at(s));
        let leg_tensor: Vec<Complex64> = (0..n_g)
            .flat_map(|g| v.mul(&real.u(g)).to_dense().transpose().iter().copied().collect::<Vec<_>>())
            .collect();
        for leg in LEGS {
            let (kb, kend) = lat.leg_bond(s, leg);
            let (bb, bend) = lat.leg_bond(t, leg);
            tensors.push(Tensor {
                vars: vec![
                    g_vars[lat.site_index(s)],
                    pick(bra_vars[lat.bond_index(bb)], bend),
                    pick(ket_vars[lat.bond_index(kb)], kend),
                ],
                data: leg_tensor.clone(),
            });
        }
    }
    let dense = |m: &Mono| -> Vec<Complex64> { m.to_dense().transpose().iter().copied().collect() };
    for (layer, ops, vars, piece) in [
        (false, &ket_ops, &ket_vars, ket_piece),
        (true, &bra_ops, &bra_vars, bra_piece),
    ] {
        for (b, list) in ops {
            if list.len() > 1 {
                return Err(PepsError::InvalidProtocol(
                    "several operators on one bond".into(),
                ));
            }
            let (first, second) = vars[lat.bond_index(*b)];
            for op in list {
                let t = match *op {
                    BondOp::ChargeFirst | BondOp::ChargeSecond => {
                        let c = charge.expect("checked above");
                        let data = (0..pieces)
                            .flat_map(|h| {
                                let m = if *op == BondOp::ChargeFirst { c.first(h) } else { c.second(h) };
                                dense(&if layer { m.conj() } else { m })
                            })
                            .collect();
                        Tensor {
                            vars: vec![piece, first, second],
                            data,
                        }
                    }
                    BondOp::Flux { g, power } => {
                        let m = if power > 0 { real.u(g) } else { real.u_inv(g) };
                        Tensor {
                            vars: vec![first, second],
                            data: dense(&m),
                        }
                    }
                };
                tensors.push(t);
            }
        }
    }

    let value = eliminate_all(tensors, &dims)?;
    Ok(value / (n_g as f64).powi(lat.num_sites() as i32))
}

/// Greedy elimination: always sum out the variable whose merged tensor is
/// smallest.
fn eliminate_all(mut tensors: Vec<Tensor>, dims: &[usize]) -> Result<Complex64, PepsError> {
    let mut alive: Vec<bool> = vec![false; dims.len()];
    for t in &tensors {
        for &v in &t.vars {
            alive[v] = true;
        }
    }
    loop {
        let mut best: Option<(f64, usize)> = None;
        for v in (0..dims.len()).filter(|&v| alive[v]) {
            let mut union: Vec<usize> = tensors
                .iter()
                .filter(|t| t.vars.contains(&v))
                .flat_map(|t| t.vars.iter().copied())
                .collect();
            union.sort_unstable();
            union.dedup();
            let cost: f64 = union.iter().map(|&u| dims[u] as f64).product();
            if best.is_none_or(|(c, _)| cost < c) {
                best = Some((cost, v));
            }
        }
        let Some((cost, v)) = best else { break };
        if cost > MAX_ENTRIES {
            return Err(PepsError::LatticeTooLarge {
                entries: cost,
                limit: MAX_ENTRIES,
            });
        }
        let (involved, rest): (Vec<Tensor>, Vec<Tensor>) =
            tensors.into_iter().partition(|t| t.vars.contains(&v));
        tensors = rest;
        tensors.push(contract(&involved, v, dims));
        alive[v] = false;
    }
    Ok(tensors
        .iter()
        .map(|t| t.data[0])
        .product())
}

/// Multiplies `involved` and sums over `elim`. Tensors store their last
/// variable fastest.
fn contract(involved: &[Tensor], elim: usize, dims: &[usize]) -> Tensor {
    let mut out_vars: Vec<usize> = involved
        .iter()
        .flat_map(|t| t.vars.iter().copied())
        .filter(|&u| u != elim)
        .collect();
    out_vars.sort_unstable();
    out_vars.dedup();
    let mut full = out_vars.clone();
    full.push(elim);
    let full_dims: Vec<usize> = full.iter().map(|&u| dims[u]).collect();

    let strides: Vec<Vec<usize>> = involved
        .iter()
        .map(|t| {
            let mut own = vec![0; t.vars.len()];
            let mut acc = 1;
            for i in (0..t.vars.len()).rev() {
                own[i] = acc;
                acc *= dims[t.vars[i]];
            }
            full.iter()
                .map(|u| t.vars.iter().position(|w| w == u).map_or(0, |i| own[i]))
                .collect()
        })
        .collect();

    let de = dims[elim];
    let out_len: usize = out_vars.iter().map(|&u| dims[u]).product();
    let mut out = vec![Complex64::new(0.0, 0.0); out_len];
    let mut digits = vec![0usize; full.len()];
    let mut offsets = vec![0usize; involved.len()];
    for linear in 0..out_len * de {
        let mut p = Complex64::new(1.0, 0.0);
        for (t, &o) in involved.iter().zip(&offsets) {
            p *= t.data[o];
        }
        out[linear / de] += p;
        for pos in (0..full.len()).rev() {
            digits[pos] += 1;
            if digits[pos] < full_dims[pos] {
                for (o, s) in offsets.iter_mut().zip(&strides) {
                    *o += s[pos];
                }
                break;
            }
            digits[pos] = 0;
            for (o, s) in offsets.iter_mut().zip(&strides) {
                *o -= s[pos] * (full_dims[pos] - 1);
            }
        }
    }
    Tensor {
        vars: out_vars,
        data: out,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::character::CharacterTable;
    use crate::extension::{build_extension, Cocycle, TwistingMap};
    use crate::group::cyclic;
    use crate::peps::lattice::Lattice;
    use crate::peps::protocol::Cycle;
    use crate::peps::loops::compile_protocol;
    use crate::peps::realization::{four_legs, site_tensor};
    use crate::rep::{max_abs, CMatrix};
    use proptest::prelude::*;

    fn zp(p: usize, alpha: usize) -> (CharacterTable, SymmetryRealization) {
        let g = cyclic(p);
        let omega: Vec<Vec<usize>> = (0..p)
            .map(|a| (0..p).map(|b| if a + b >= p { alpha } else { 0 }).collect())
            .collect();
        let c = Cocycle::new(&g, &g, TwistingMap::trivial(&g, &g), &omega).unwrap();
        let real = SymmetryRealization::new(&build_extension(&g, &g, &c).unwrap()).unwrap();
        (CharacterTable::new(&g).unwrap(), real)
    }

    /// The leg factorization used above equals `A^† U A` built from the
    /// dense projector.
    #[test]
    fn factorized_double_tensor_matches_dense() {
        for alpha in 0..2 {
            let (_, real) = zp(2, alpha);
            let u: Vec<CMatrix> = (0..2).map(|g| real.u(g).to_dense()).collect();
            let a = site_tensor(&u);
            let v = real.v(1).to_dense();
            let dense = a.adjoint() * four_legs(&v) * &a;
            let mut factored = CMatrix::zeros(256, 256);
            for g in 0..2 {
                factored += four_legs(&real.v(1).mul(&real.u(g)).to_dense());
            }
            factored /= Complex64::new(2.0, 0.0);
            assert!(max_abs(&(dense - factored)) < 1e-12);
        }
    }

    #[test]
    fn toric_code_matches_loops() {
        for alpha in 0..2 {
            let (t, real) = zp(2, alpha);
            let p = ProtocolSpec::row(Lattice::new(4, 3), 2, 1, Cycle::Forward, true).unwrap();
            for sigma in 0..2 {
                let charge = ChargeOperator::new(&t, sigma, &real);
                let d = dense_contract(&p, &real, Some(&charge), Denominator::KeepPermutationBraAtKet).unwrap();
                let l = compile_protocol(&p, &real, Denominator::KeepPermutationBraAtKet)
                    .unwrap()
                    .evaluate(&real, Some(&charge))
                    .unwrap();
                assert!((d.lambda_hat - l).norm() < 1e-10);
                assert!(d.denominator.re > 0.0);
            }
        }
    }

    /// `‖Uψ − ψ‖² = 2⟨ψ|ψ⟩ − 2 Re⟨ψ|U|ψ⟩` for the global symmetry.
    #[test]
    fn global_symmetry_leaves_the_state_invariant() {
        let lat = Lattice::new(3, 3);
        for alpha in 0..2 {
            let (_, real) = zp(2, alpha);
            let plain = ProtocolSpec::empty(lat);
            let mut global = plain.clone();
            global.symmetry = lat.sites().map(|s| (s, 1)).collect();
            let norm = contract_network(&plain, &real, None).unwrap();
            let overlap = contract_network(&global, &real, None).unwrap();
            assert!(norm.re > 0.0);
            let dist = 2.0 * norm.re - 2.0 * overlap.re;
            assert!(dist.abs() < 1e-10 * norm.re, "α = {alpha}: {dist}");
        }
    }

    #[test]
    fn refuses_oversized_networks() {
        let (t, real) = zp(5, 1);
        let p = ProtocolSpec::row(Lattice::new(7, 3), 5, 1, Cycle::Forward, true).unwrap();
        let charge = ChargeOperator::new(&t, 1, &real);
        assert!(matches!(
            dense_contract(&p, &real, Some(&charge), Denominator::KeepPermutationBraAtKet),
            Err(PepsError::LatticeTooLarge { .. })
        ));
    }

    proptest! {
        #[test]
        fn elimination_is_matrix_product(a in proptest::collection::vec(-1.0f64..1.0, 6), b in proptest::collection::vec(-1.0f64..1.0, 12)) {
            // A is 2x3 on vars (0, 1), B is 3x4 on vars (1, 2)
            let dims = [2, 3, 4];
            let c = |x: &[f64]| x.iter().map(|&r| Complex64::new(r, 0.5 * r)).collect::<Vec<_>>();
            let ta = Tensor { vars: vec![0, 1], data: c(&a) };
            let tb = Tensor { vars: vec![1, 2], data: c(&b) };
            let out = contract(&[ta, tb], 1, &dims);
            let ma = CMatrix::from_row_slice(2, 3, &c(&a));
            let mb = CMatrix::from_row_slice(3, 4, &c(&b));
            let prod = ma * mb;
            prop_assert_eq!(out.vars.clone(), vec![0, 2]);
            for i in 0..2 {
                for k in 0..4 {
                    prop_assert!((out.data[i * 4 + k] - prod[(i, k)]).norm() < 1e-12);
                }
            }
        }
    }
}
