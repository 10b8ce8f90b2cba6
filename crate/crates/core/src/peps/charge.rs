//! Charge-pair operators on the virtual space.
//!
//! The pair operator is `Π_σ = Σ_{a,b} χ_σ(g_a g_b^{-1}) |a⟩⟨a| ⊗ |b⟩⟨b|`,
//! where `g_a` is the `G`-part of the basis label `a = i(g_a) ε_r`. It is
//! split into pieces `Σ_h C_h ⊗ C̄_h` with `C_h = diag χ_σ(g_a h^{-1})` on the
//! first edge and `C̄_h = diag δ_{g_a, h}` on the second. One-dimensional
//! irreps factorize into a single piece `diag χ(g_a) ⊗ diag χ(g_b^{-1})`.

use num_complex::Complex64;

use super::mono::Mono;
use super::realization::SymmetryRealization;
use crate::character::CharacterTable;

#[derive(Debug, Clone)]
pub struct ChargeOperator {
    pub sigma: usize,
    pub dim: usize,
    /// `(C_h, C̄_h)` as diagonals.
    pub pieces: Vec<(Vec<Complex64>, Vec<Complex64>)>,
}

impl ChargeOperator {
    pub fn new(table: &CharacterTable, sigma: usize, real: &SymmetryRealization) -> Self {
        let g = real.extension().g();
        let d = real.dim();
        let dim = table.dim(sigma);
        let one = Complex64::new(1.0, 0.0);
        let zero = Complex64::new(0.0, 0.0);
        let pieces = if dim == 1 {
            let first = (0..d).map(|a| table.chi(sigma, real.g_part(a))).collect();
            let second = (0..d)
                .map(|a| table.chi(sigma, g.inv(real.g_part(a))))
                .collect();
            vec![(first, second)]
        } else {
            g.elements()
                .map(|h| {
                    let first = (0..d)
                        .map(|a| table.chi(sigma, g.mul(real.g_part(a), g.inv(h))))
                        .collect();
                    let second = (0..d)
                        .map(|a| if real.g_part(a) == h { one } else { zero })
                        .collect();
                    (first, second)
                })
                .collect()
        };
        ChargeOperator { sigma, dim, pieces }
    }

    pub fn num_pieces(&self) -> usize {
        self.pieces.len()
    }

    pub fn first(&self, h: usize) -> Mono {
        Mono::diagonal(self.pieces[h].0.clone())
    }

    pub fn second(&self, h: usize) -> Mono {
        Mono::diagonal(self.pieces[h].1.clone())
    }

    /// Weight of the pair `(a, b)` after reassembling all pieces.
    pub fn pair_weight(&self, a: usize, b: usize) -> Complex64 {
        self.pieces.iter().map(|(c, cb)| c[a] * cb[b]).sum()
    }
}
