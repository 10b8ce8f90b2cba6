//! The virtual space `C[E]` and the operators acting on it.
//!
//! The gauge group acts as `u_g = L_{i(g)}` and the symmetry as
//! `v_q = L_{ε_q}`, both left multiplications on the extension group `E`.
//! Then `v_q u_g v_q^{-1} = u_{φ_q(g)}` and `v_k v_q = u_{ω(k,q)} v_{kq}` hold
//! as identities of permutations, and `Tr[u_g] = |E| δ_{g,e}`.

use num_complex::Complex64;

use super::mono::Mono;
use super::PepsError;
use crate::extension::{cocycle_from_extension, Cocycle, ExtensionGroup};
use crate::rep::CMatrix;

#[derive(Debug, Clone)]
pub struct SymmetryRealization {
    ext: ExtensionGroup,
    cocycle: Cocycle,
    /// `G`-part of every basis element: `a = i(g) ε_r` gives `g`.
    g_part: Vec<usize>,
}

impl SymmetryRealization {
    /// Realizes the extension's section on `C[E]` and checks both defining
    /// relations exactly.
    pub fn new(ext: &ExtensionGroup) -> Result<Self, PepsError> {
        let cocycle = cocycle_from_extension(ext, ext.section())?;
        let e = ext.e();
        let g_part = e
            .elements()
            .map(|a| {
                let r = ext.project(a);
                ext.pull_back(e.mul(a, e.inv(ext.section()[r])))
                    .expect("a ε_r^-1 lies in G")
            })
            .collect();
        let real = SymmetryRealization {
            ext: ext.clone(),
            cocycle,
            g_part,
        };
        real.check()?;
        Ok(real)
    }

    fn check(&self) -> Result<(), PepsError> {
        let (g, q) = (self.ext.g(), self.ext.q());
        for k in q.elements() {
            let vk = self.v(k);
            for x in g.elements() {
                let lhs = vk.mul(&self.u(x)).mul(&self.v_inv(k));
                if lhs != self.u(self.cocycle.phi().apply(k, x)) {
                    return Err(PepsError::RealizationCheckFailed(format!(
                        "v_{k} u_{x} v_{k}^-1 != u_phi"
                    )));
                }
            }
            for p in q.elements() {
                let lhs = vk.mul(&self.v(p));
                let rhs = self.u(self.cocycle.value(k, p)).mul(&self.v(q.mul(k, p)));
                if lhs != rhs {
                    return Err(PepsError::RealizationCheckFailed(format!(
                        "v_{k} v_{p} != u_omega v_{k}{p}"
                    )));
                }
            }
        }
        Ok(())
    }

    pub fn extension(&self) -> &ExtensionGroup {
        &self.ext
    }

    pub fn cocycle(&self) -> &Cocycle {
        &self.cocycle
    }

    /// Dimension `|E|` of the virtual space.
    pub fn dim(&self) -> usize {
        self.ext.e().order()
    }

    pub fn g_order(&self) -> usize {
        self.ext.g().order()
    }

    /// `G`-part of a basis label.
    pub fn g_part(&self, a: usize) -> usize {
        self.g_part[a]
    }

    /// Left multiplication by an element of `E`.
    pub fn left(&self, x: usize) -> Mono {
        let e = self.ext.e();
        Mono::permutation(e.elements().map(|a| e.mul(x, a)).collect())
    }

    pub fn u(&self, g: usize) -> Mono {
        self.left(self.ext.embed(g))
    }

    pub fn u_inv(&self, g: usize) -> Mono {
        self.u(self.ext.g().inv(g))
    }

    pub fn v(&self, q: usize) -> Mono {
        self.left(self.ext.section()[q])
    }

    pub fn v_inv(&self, q: usize) -> Mono {
        self.left(self.ext.e().inv(self.ext.section()[q]))
    }
}

/// Dense 4-leg site projector `(1/|G|) Σ_g u_g^{⊗4}` on legs (left, right,
/// down, up), as a `D^4 × D^4` matrix with leg 0 the most significant digit.
///
/// The tensor is `A^i_α = P_{iα}` with physical space equal to the virtual
/// product. For permutation matrices `(u_g^{-1})^T = u_g`, so this is the same
/// operator as the pattern `u_g ⊗ u_g ⊗ ū_g ⊗ ū_g` with the last two legs
/// read in the opposite orientation.
pub fn site_tensor(u: &[CMatrix]) -> CMatrix {
    let d = u[0].nrows();
    let n = d.pow(4);
    let mut p = CMatrix::zeros(n, n);
    for ug in u {
        let k = ug.kronecker(ug);
        p += k.kronecker(&k);
    }
    p / Complex64::new(u.len() as f64, 0.0)
}

/// `X^{⊗4}` for a single-leg operator.
pub fn four_legs(x: &CMatrix) -> CMatrix {
    let k = x.kronecker(x);
    k.kronecker(&k)
}
