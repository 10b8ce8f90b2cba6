//! Character tables by the class-sum (Burnside) method.
//!
//! The class sums `K_j` span the centre of the group algebra and multiply as
//! `K_j K_l = Σ_m c_{jlm} K_m`. Every irrep σ gives a common eigenvector
//! `w_m = |C_m| χ_σ(g_m) / d_σ` of the matrices `(M_j)_{lm} = c_{jlm}`, so
//! diagonalizing one generic combination of the `M_j` recovers all rows.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::classes::ConjugacyClasses;
use crate::group::{FiniteGroup, MAX_SEARCH_ORDER};

const SNAP_TOL: f64 = 1e-8;
const SEPARATION_TOL: f64 = 1e-6;
const ATTEMPTS: usize = 16;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CharacterError {
    #[error("group of order {0} exceeds the supported order {MAX_SEARCH_ORDER}")]
    GroupTooLarge(usize),
    #[error("class-sum eigenspaces could not be separated after {0} attempts")]
    NumericalDegeneracy(usize),
}

#[derive(Debug, Clone)]
pub struct Irrep {
    pub label: String,
    pub dim: usize,
    /// One value per conjugacy class, in class order.
    pub values: Vec<Complex64>,
}

#[derive(Debug, Clone)]
pub struct CharacterTable {
    classes: ConjugacyClasses,
    irreps: Vec<Irrep>,
}

impl CharacterTable {
    pub fn new(group: &FiniteGroup) -> Result<Self, CharacterError> {
        Self::with_seed(group, 0)
    }

    pub fn with_seed(group: &FiniteGroup, seed: u64) -> Result<Self, CharacterError> {
        if group.order() > MAX_SEARCH_ORDER {
            return Err(CharacterError::GroupTooLarge(group.order()));
        }
        let classes = ConjugacyClasses::new(group);
        let r = classes.len();
        let sizes = classes.sizes();
        let consts = structure_constants(group, &classes);
        let exponent = group.exponent();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);

        for _ in 0..ATTEMPTS {
            let weights: Vec<f64> = (0..r).map(|_| rng.gen_range(0.5..1.5)).collect();
            let a = DMatrix::from_fn(r, r, |l, m| {
                (0..r).map(|j| weights[j] * consts[(j * r + l) * r + m] as f64).sum::<f64>()
            });
            let eigs = a.complex_eigenvalues();
            let separated = (0..r).all(|i| {
                (0..i).all(|k| (eigs[i] - eigs[k]).norm() > SEPARATION_TOL)
            });
            if !separated {
                continue;
            }
            let ac = a.map(|x| Complex64::new(x, 0.0));
            let mut irreps = Vec::with_capacity(r);
            for &lambda in eigs.iter() {
                let shifted = &ac - DMatrix::identity(r, r) * lambda;
                let w = null_vector(shifted);
                if w[0].norm() < SEPARATION_TOL {
                    break;
                }
                let w: Vec<Complex64> = w.iter().map(|x| x / w[0]).collect();
                let norm: f64 = (0..r).map(|j| w[j].norm_sqr() / sizes[j] as f64).sum();
                let d = (group.order() as f64 / norm).sqrt();
                let dim = d.round() as usize;
                if (d - dim as f64).abs() > 1e-6 || dim == 0 {
                    break;
                }
                let values = (0..r)
                    .map(|j| snap(w[j] * (dim as f64) / sizes[j] as f64, dim, exponent))
                    .collect();
                irreps.push(Irrep {
                    label: String::new(),
                    dim,
                    values,
                });
            }
            if irreps.len() != r {
                continue;
            }
            irreps.sort_by(|x, y| sort_key(x).partial_cmp(&sort_key(y)).unwrap());
            for (i, irrep) in irreps.iter_mut().enumerate() {
                irrep.label = format!("chi{i}");
            }
            let table = CharacterTable { classes, irreps };
            if table.orthogonality_residual(group) < 1e-10
                && table.irreps.iter().map(|s| s.dim * s.dim).sum::<usize>() == group.order()
            {
                return Ok(table);
            }
            return Err(CharacterError::NumericalDegeneracy(ATTEMPTS));
        }
        Err(CharacterError::NumericalDegeneracy(ATTEMPTS))
    }

    pub fn classes(&self) -> &ConjugacyClasses {
        &self.classes
    }

    pub fn irreps(&self) -> &[Irrep] {
        &self.irreps
    }

    pub fn irrep(&self, i: usize) -> &Irrep {
        &self.irreps[i]
    }

    pub fn len(&self) -> usize {
        self.irreps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.irreps.is_empty()
    }

    /// `χ_σ(g)` for an element `g`.
    pub fn chi(&self, sigma: usize, g: usize) -> Complex64 {
        self.irreps[sigma].values[self.classes.class_of(g)]
    }

    pub fn dim(&self, sigma: usize) -> usize {
        self.irreps[sigma].dim
    }

    pub fn trivial(&self) -> usize {
        0
    }

    /// Index of the irrep whose character values match `values` per element.
    pub fn find(&self, chi: impl Fn(usize) -> Complex64) -> Option<usize> {
        (0..self.len()).find(|&s| {
            self.classes
                .classes()
                .iter()
                .all(|c| (self.chi(s, c[0]) - chi(c[0])).norm() < 1e-9)
        })
    }

    /// Largest deviation of `⟨χ_i, χ_j⟩` from `δ_ij`.
    pub fn orthogonality_residual(&self, group: &FiniteGroup) -> f64 {
        let sizes = self.classes.sizes();
        let mut worst: f64 = 0.0;
        for (i, a) in self.irreps.iter().enumerate() {
            for (j, b) in self.irreps.iter().enumerate() {
                let ip: Complex64 = (0..sizes.len())
                    .map(|c| a.values[c].conj() * b.values[c] * sizes[c] as f64)
                    .sum::<Complex64>()
                    / group.order() as f64;
                let target = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((ip - target).norm());
            }
        }
        worst
    }
}

/// `c[(j * r + l) * r + m]`: number of `(x, y) ∈ C_j × C_l` with `x y = g_m`.
fn structure_constants(group: &FiniteGroup, classes: &ConjugacyClasses) -> Vec<usize> {
    let r = classes.len();
    let mut c = vec![0; r * r * r];
    for j in 0..r {
        for l in 0..r {
            for &x in classes.class(j) {
                for &y in classes.class(l) {
                    let xy = group.mul(x, y);
                    let m = classes.class_of(xy);
                    if xy == classes.representative(m) {
                        c[(j * r + l) * r + m] += 1;
                    }
                }
            }
        }
    }
    c
}

/// Right singular vector for the smallest singular value.
fn null_vector(m: DMatrix<Complex64>) -> Vec<Complex64> {
    let svd = m.svd(false, true);
    let v_t = svd.v_t.expect("requested V^T");
    let (idx, _) = svd
        .singular_values
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.partial_cmp(b.1).unwrap())
        .expect("non-empty");
    v_t.row(idx).iter().map(|x| x.conj()).collect()
}

fn snap(z: Complex64, dim: usize, exponent: usize) -> Complex64 {
    if dim == 1 {
        let k = (z.arg() / std::f64::consts::TAU * exponent as f64).round();
        let root = Complex64::from_polar(1.0, std::f64::consts::TAU * k / exponent as f64);
        if (root - z).norm() < SNAP_TOL.sqrt() {
            let clean = |x: f64| if (x - x.round()).abs() < 1e-12 { x.round() } else { x };
            return Complex64::new(clean(root.re), clean(root.im));
        }
        return z;
    }
    let re = z.re.round();
    let im = z.im.round();
    Complex64::new(
        if (z.re - re).abs() < SNAP_TOL { re } else { z.re },
        if (z.im - im).abs() < SNAP_TOL { im } else { z.im },
    )
}

fn sort_key(irrep: &Irrep) -> Vec<f64> {
    let mut key = vec![irrep.dim as f64];
    for v in &irrep.values {
        if v.norm() < 1e-9 {
            key.push(-1.0);
        } else {
            let a = v.arg().rem_euclid(std::f64::consts::TAU);
            key.push(if a > std::f64::consts::TAU - 1e-9 { 0.0 } else { a });
        }
    }
    key
}
