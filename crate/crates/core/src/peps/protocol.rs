//! Placement of excitations, symmetry operators and the site permutation
//! for one order-parameter measurement.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use super::lattice::{Bond, Lattice, Site};
use super::PepsError;

/// Ket charges on `x` and `y`; the bra charge pair sits on `x_bra` and `y`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChargePlacement {
    pub x: Bond,
    pub y: Bond,
    pub x_bra: Bond,
}

/// `⊗_i (L_g)^{m_i}` on the ket layer. On each edge, `m = +1` places `u_g`
/// acting from the first end of the bond and `m = -1` places `u_g^{-1}`;
/// a closed string around a region therefore uses `+1` on edges whose
/// first end lies inside the region.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FluxString {
    pub g: usize,
    pub edges: Vec<(Bond, i8)>,
}

impl FluxString {
    /// Closed string around the two-site region `{s, s + x̂}`, which braids
    /// the flux `g` around the bond between the two sites.
    pub fn around_horizontal_pair(lat: &Lattice, s: Site, g: usize) -> Self {
        let t = Site::new((s.x + 1) % lat.lx, s.y);
        let below = (s.y + lat.ly - 1) % lat.ly;
        let left = (s.x + lat.lx - 1) % lat.lx;
        FluxString {
            g,
            edges: vec![
                (Bond::right(left, s.y), -1),
                (Bond::right(t.x, t.y), 1),
                (Bond::up(s.x, s.y), 1),
                (Bond::up(t.x, t.y), 1),
                (Bond::up(s.x, below), -1),
                (Bond::up(t.x, below), -1),
            ],
        }
    }
}

/// Symbolic operator inserted on a bond, as a matrix indexed
/// `[first end, second end]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum BondOp {
    /// `C_h` (ket) or its conjugate (bra).
    ChargeFirst,
    /// `C̄_h` (ket) or its conjugate (bra).
    ChargeSecond,
    /// `u_g^m`
    Flux { g: usize, power: i8 },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProtocolSpec {
    pub lattice: Lattice,
    pub charges: Option<ChargePlacement>,
    /// `U_q` on ket sites.
    pub symmetry: Vec<(Site, usize)>,
    /// Ket site `s` is read by bra site `π(s)`; unlisted sites are fixed.
    pub permutation: Vec<(Site, Site)>,
    pub flux_strings: Vec<FluxString>,
}

/// Site permutation of a row protocol.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Cycle {
    Identity,
    /// Ket site `j` is read by bra site `j + 1 (mod m)`.
    Forward,
    Backward,
}

/// How the normalizing network is derived from a protocol.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Denominator {
    /// Symmetry operators and permutation removed, bra charges on the ket
    /// positions: `⟨O†(x,y) O(x,y)⟩`.
    ChargeNorm,
    /// Symmetry operators removed, permutation and bra positions kept.
    KeepPermutation,
    /// Symmetry operators removed, permutation kept, bra charges moved to
    /// the ket positions.
    KeepPermutationBraAtKet,
}

impl ProtocolSpec {
    pub fn empty(lattice: Lattice) -> Self {
        ProtocolSpec {
            lattice,
            charges: None,
            symmetry: Vec::new(),
            permutation: Vec::new(),
            flux_strings: Vec::new(),
        }
    }

    /// `m` sites `(0..m, row)` carrying `U_q`, permuted according to `cycle`,
    /// with ket charges on the two bonds right of the run and the bra charge
    /// on the bond left of it.
    pub fn row(lattice: Lattice, m: usize, q: usize, cycle: Cycle, charged: bool) -> Result<Self, PepsError> {
        if lattice.lx < m + 2 || lattice.ly < 2 {
            return Err(PepsError::InvalidProtocol(format!(
                "a run of {m} sites needs a row of at least {} sites and two rows",
                m + 2
            )));
        }
        let row = lattice.ly / 2;
        let symmetry = (0..m).map(|j| (Site::new(j, row), q)).collect();
        let permutation = match cycle {
            Cycle::Identity => Vec::new(),
            _ if m < 2 => Vec::new(),
            _ => (0..m)
                .map(|j| {
                    let t = if cycle == Cycle::Forward { (j + 1) % m } else { (j + m - 1) % m };
                    (Site::new(j, row), Site::new(t, row))
                })
                .collect(),
        };
        let last = m.max(1) - 1;
        let charges = charged.then(|| ChargePlacement {
            x: Bond::right(last, row),
            y: Bond::right(last + 1, row),
            x_bra: Bond::right(lattice.lx - 1, row),
        });
        Ok(ProtocolSpec {
            lattice,
            charges,
            symmetry,
            permutation,
            flux_strings: Vec::new(),
        })
    }

    pub fn pi(&self, s: Site) -> Site {
        self.permutation
            .iter()
            .find(|(a, _)| *a == s)
            .map_or(s, |&(_, b)| b)
    }

    pub fn q_at(&self, s: Site) -> usize {
        self.symmetry
            .iter()
            .find(|(a, _)| *a == s)
            .map_or(0, |&(_, q)| q)
    }

    /// Sites carrying a symmetry operator or moved by the permutation.
    pub fn active_sites(&self) -> BTreeSet<Site> {
        let mut s: BTreeSet<Site> = self
            .symmetry
            .iter()
            .filter(|(_, q)| *q != 0)
            .map(|(s, _)| *s)
            .collect();
        s.extend(self.permutation.iter().filter(|(a, b)| a != b).map(|(a, _)| *a));
        s
    }

    pub fn ket_ops(&self) -> BTreeMap<Bond, Vec<BondOp>> {
        let mut ops: BTreeMap<Bond, Vec<BondOp>> = BTreeMap::new();
        if let Some(c) = self.charges {
            ops.entry(c.x).or_default().push(BondOp::ChargeFirst);
            ops.entry(c.y).or_default().push(BondOp::ChargeSecond);
        }
        for f in &self.flux_strings {
            for &(b, m) in &f.edges {
                ops.entry(b).or_default().push(BondOp::Flux { g: f.g, power: m });
            }
        }
        ops
    }

    pub fn bra_ops(&self) -> BTreeMap<Bond, Vec<BondOp>> {
        let mut ops: BTreeMap<Bond, Vec<BondOp>> = BTreeMap::new();
        if let Some(c) = self.charges {
            ops.entry(c.x_bra).or_default().push(BondOp::ChargeFirst);
            ops.entry(c.y).or_default().push(BondOp::ChargeSecond);
        }
        ops
    }

    pub fn validate(&self, q_order: usize, g_order: usize) -> Result<(), PepsError> {
        let lat = self.lattice;
        let bad = |m: String| Err(PepsError::InvalidProtocol(m));
        for &(s, q) in &self.symmetry {
            if !lat.contains(s) || q >= q_order {
                return bad(format!("symmetry operator at {s:?} with q = {q}"));
            }
        }
        let mut targets = BTreeSet::new();
        let mut sources = BTreeSet::new();
        for &(a, b) in &self.permutation {
            if !lat.contains(a) || !lat.contains(b) {
                return bad(format!("permutation entry {a:?} -> {b:?} is off the lattice"));
            }
            if !sources.insert(a) {
                return bad(format!("site {a:?} is permuted twice"));
            }
            targets.insert(b);
        }
        if sources != targets {
            return bad("permutation does not map its support onto itself".into());
        }
        let in_lattice = |b: Bond| lat.contains(b.site);
        if let Some(c) = self.charges {
            if !(in_lattice(c.x) && in_lattice(c.y) && in_lattice(c.x_bra)) {
                return bad("charge bond off the lattice".into());
            }
            if c.x == c.y || c.x_bra == c.y {
                return bad("both charges of a pair on one bond".into());
            }
        }
        let ket = self.ket_ops();
        for f in &self.flux_strings {
            if f.g >= g_order || f.edges.iter().any(|&(b, m)| !in_lattice(b) || m.abs() != 1) {
                return bad("malformed flux string".into());
            }
        }
        for ops in ket.values() {
            let charge = ops.iter().any(|o| !matches!(o, BondOp::Flux { .. }));
            let flux = ops.iter().any(|o| matches!(o, BondOp::Flux { .. }));
            if charge && flux {
                return bad("flux string crosses a charged bond".into());
            }
        }
        Ok(())
    }

    /// The network that normalizes this protocol.
    pub fn denominator(&self, kind: Denominator) -> ProtocolSpec {
        let mut d = self.clone();
        d.symmetry.clear();
        d.flux_strings.clear();
        match kind {
            Denominator::ChargeNorm => {
                d.permutation.clear();
                if let Some(c) = d.charges.as_mut() {
                    c.x_bra = c.x;
                }
            }
            Denominator::KeepPermutation => {}
            Denominator::KeepPermutationBraAtKet => {
                if let Some(c) = d.charges.as_mut() {
                    c.x_bra = c.x;
                }
            }
        }
        d
    }
}
