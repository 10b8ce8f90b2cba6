//! Matrix representations of finite groups.

use nalgebra::DMatrix;
use num_complex::Complex64;
use thiserror::Error;

use crate::group::FiniteGroup;

pub type CMatrix = DMatrix<Complex64>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum RepError {
    #[error("expected {expected} matrices, got {got}")]
    WrongCount { expected: usize, got: usize },
    #[error("matrix for element {0} is not square of the common dimension")]
    BadShape(usize),
    #[error("u({0}) u({1}) != u({0}{1}) (deviation {2:e})")]
    NotMultiplicative(usize, usize, f64),
}

#[derive(Debug, Clone)]
pub struct Representation {
    dim: usize,
    matrices: Vec<CMatrix>,
    is_permutation: bool,
}

impl Representation {
    /// `L_g |h⟩ = |gh⟩` on `C[G]`.
    pub fn left_regular(group: &FiniteGroup) -> Self {
        let n = group.order();
        let matrices = group
            .elements()
            .map(|g| {
                let mut m = CMatrix::zeros(n, n);
                for h in group.elements() {
                    m[(group.mul(g, h), h)] = Complex64::new(1.0, 0.0);
                }
                m
            })
            .collect();
        Self {
            dim: n,
            matrices,
            is_permutation: true,
        }
    }

    /// Validates `u_g u_h = u_{gh}` to `tol` before accepting the matrices.
    pub fn from_matrices(
        group: &FiniteGroup,
        matrices: Vec<CMatrix>,
        tol: f64,
    ) -> Result<Self, RepError> {
        if matrices.len() != group.order() {
            return Err(RepError::WrongCount {
                expected: group.order(),
                got: matrices.len(),
            });
        }
        let dim = matrices[0].nrows();
        for (g, m) in matrices.iter().enumerate() {
            if m.nrows() != dim || m.ncols() != dim {
                return Err(RepError::BadShape(g));
            }
        }
        for g in group.elements() {
            for h in group.elements() {
                let dev = (&matrices[g] * &matrices[h] - &matrices[group.mul(g, h)]).norm();
                if dev > tol {
                    return Err(RepError::NotMultiplicative(g, h, dev));
                }
            }
        }
        let is_permutation = matrices.iter().all(is_permutation_matrix);
        Ok(Self {
            dim,
            matrices,
            is_permutation,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn is_permutation(&self) -> bool {
        self.is_permutation
    }

    pub fn matrix(&self, g: usize) -> &CMatrix {
        &self.matrices[g]
    }

    pub fn trace(&self, g: usize) -> Complex64 {
        self.matrices[g].trace()
    }
}

/// Largest entry modulus.
pub fn max_abs(m: &CMatrix) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

fn is_permutation_matrix(m: &CMatrix) -> bool {
    let one = Complex64::new(1.0, 0.0);
    let zero = Complex64::new(0.0, 0.0);
    m.iter().all(|&x| x == one || x == zero)
        && m.row_iter().all(|r| r.iter().filter(|&&x| x == one).count() == 1)
        && m.column_iter().all(|c| c.iter().filter(|&&x| x == one).count() == 1)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::preset;

    #[test]
    fn regular_rep_of_z2_is_swap() {
        let r = Representation::left_regular(&preset("Z2").unwrap());
        assert_eq!(r.matrix(0), &CMatrix::identity(2, 2));
        let swap = CMatrix::from_row_slice(
            2,
            2,
            &[0.0, 1.0, 1.0, 0.0].map(|x| Complex64::new(x, 0.0)),
        );
        assert_eq!(r.matrix(1), &swap);
        assert!(r.is_permutation());
    }

    #[test]
    fn regular_traces() {
        let g = preset("Q8").unwrap();
        let r = Representation::left_regular(&g);
        assert_eq!(r.trace(0).re, 8.0);
        for x in 1..8 {
            assert_eq!(r.trace(x), Complex64::new(0.0, 0.0));
        }
        let checked = Representation::from_matrices(&g, (0..8).map(|x| r.matrix(x).clone()).collect(), 0.0);
        assert!(checked.unwrap().is_permutation());
    }

    #[test]
    fn rejects_non_homomorphism() {
        let g = preset("Z2").unwrap();
        let id = CMatrix::identity(1, 1);
        let bad = vec![id.clone(), id * Complex64::new(0.0, 1.0)];
        assert!(matches!(
            Representation::from_matrices(&g, bad, 1e-12),
            Err(RepError::NotMultiplicative(1, 1, _))
        ));
    }
}
