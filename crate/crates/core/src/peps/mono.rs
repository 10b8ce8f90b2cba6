//! Monomial matrices: a permutation with one weight per column.
//!
//! Every operator in the fixed-point loop calculus (left multiplications on
//! `C[E]`, diagonal charge pieces, and their products) is monomial, so
//! traces cost `O(D)` instead of `O(D^3)`.

use num_complex::Complex64;

use crate::rep::CMatrix;

/// `M[perm[a], a] = weight[a]`, all other entries zero.
#[derive(Debug, Clone, PartialEq)]
pub struct Mono {
    pub perm: Vec<usize>,
    pub weight: Vec<Complex64>,
}

impl Mono {
    pub fn identity(dim: usize) -> Self {
        Mono {
            perm: (0..dim).collect(),
            weight: vec![Complex64::new(1.0, 0.0); dim],
        }
    }

    pub fn permutation(perm: Vec<usize>) -> Self {
        let n = perm.len();
        Mono {
            perm,
            weight: vec![Complex64::new(1.0, 0.0); n],
        }
    }

    pub fn diagonal(weight: Vec<Complex64>) -> Self {
        Mono {
            perm: (0..weight.len()).collect(),
            weight,
        }
    }

    pub fn dim(&self) -> usize {
        self.perm.len()
    }

    /// `self · other`
    pub fn mul(&self, other: &Mono) -> Mono {
        Mono {
            perm: other.perm.iter().map(|&p| self.perm[p]).collect(),
            weight: other
                .perm
                .iter()
                .zip(&other.weight)
                .map(|(&p, &w)| self.weight[p] * w)
                .collect(),
        }
    }

    /// `self · other` without materializing, applied in place to `acc`,
    /// i.e. `acc ← self · acc`.
    pub fn left_mul_into(&self, acc: &mut Mono) {
        for a in 0..acc.perm.len() {
            let p = acc.perm[a];
            acc.weight[a] *= self.weight[p];
            acc.perm[a] = self.perm[p];
        }
    }

    pub fn transpose(&self) -> Mono {
        let n = self.dim();
        let mut perm = vec![0; n];
        let mut weight = vec![Complex64::new(0.0, 0.0); n];
        for a in 0..n {
            perm[self.perm[a]] = a;
            weight[self.perm[a]] = self.weight[a];
        }
        Mono { perm, weight }
    }

    pub fn conj(&self) -> Mono {
        Mono {
            perm: self.perm.clone(),
            weight: self.weight.iter().map(|w| w.conj()).collect(),
        }
    }

    pub fn trace(&self) -> Complex64 {
        self.perm
            .iter()
            .enumerate()
            .filter(|(a, &p)| *a == p)
            .map(|(a, _)| self.weight[a])
            .sum()
    }

    pub fn to_dense(&self) -> CMatrix {
        let n = self.dim();
        let mut m = CMatrix::zeros(n, n);
        for a in 0..n {
            m[(self.perm[a], a)] = self.weight[a];
        }
        m
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::seq::SliceRandom;
    use rand::{Rng, SeedableRng};

    fn random_mono(n: usize, seed: u64) -> Mono {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let mut perm: Vec<usize> = (0..n).collect();
        perm.shuffle(&mut rng);
        let weight = (0..n)
            .map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
            .collect();
        Mono { perm, weight }
    }

    proptest! {
        #[test]
        fn agrees_with_dense(n in 1usize..7, s1 in any::<u64>(), s2 in any::<u64>()) {
            let (a, b) = (random_mono(n, s1), random_mono(n, s2));
            let dense = a.to_dense() * b.to_dense();
            prop_assert!((a.mul(&b).to_dense() - &dense).norm() < 1e-12);
            let mut acc = b.clone();
            a.left_mul_into(&mut acc);
            prop_assert_eq!(&acc, &a.mul(&b));
            prop_assert!((a.trace() - a.to_dense().trace()).norm() < 1e-12);
            prop_assert!((a.transpose().to_dense() - a.to_dense().transpose()).norm() < 1e-12);
        }
    }
}
