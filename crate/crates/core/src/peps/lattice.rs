//! Square-lattice torus geometry.
//!
//! Sites are `(x, y)` with `x` along rows. Every site owns the bond to its
//! right neighbour and the bond to its upper neighbour; on a bond the owning
//! site is the *first* end and the neighbour the *second* end.

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Site {
    pub x: usize,
    pub y: usize,
}

impl Site {
    pub fn new(x: usize, y: usize) -> Self {
        Site { x, y }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Dir {
    Right,
    Up,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Bond {
    pub site: Site,
    pub dir: Dir,
}

impl Bond {
    pub fn right(x: usize, y: usize) -> Self {
        Bond {
            site: Site::new(x, y),
            dir: Dir::Right,
        }
    }

    pub fn up(x: usize, y: usize) -> Self {
        Bond {
            site: Site::new(x, y),
            dir: Dir::Up,
        }
    }
}

/// Legs in the order left, right, down, up.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Leg {
    Left,
    Right,
    Down,
    Up,
}

pub const LEGS: [Leg; 4] = [Leg::Left, Leg::Right, Leg::Down, Leg::Up];

/// Which end of a bond.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum End {
    First,
    Second,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Lattice {
    pub lx: usize,
    pub ly: usize,
}

impl Lattice {
    pub fn new(lx: usize, ly: usize) -> Self {
        assert!(lx > 0 && ly > 0);
        Lattice { lx, ly }
    }

    pub fn num_sites(&self) -> usize {
        self.lx * self.ly
    }

    pub fn num_bonds(&self) -> usize {
        2 * self.num_sites()
    }

    pub fn site_index(&self, s: Site) -> usize {
        s.x + self.lx * s.y
    }

    pub fn site(&self, i: usize) -> Site {
        Site::new(i % self.lx, i / self.lx)
    }

    pub fn sites(&self) -> impl Iterator<Item = Site> + '_ {
        (0..self.num_sites()).map(|i| self.site(i))
    }

    pub fn contains(&self, s: Site) -> bool {
        s.x < self.lx && s.y < self.ly
    }

    pub fn bond_index(&self, b: Bond) -> usize {
        2 * self.site_index(b.site) + usize::from(b.dir == Dir::Up)
    }

    pub fn bond(&self, i: usize) -> Bond {
        let site = self.site(i / 2);
        let dir = if i.is_multiple_of(2) { Dir::Right } else { Dir::Up };
        Bond { site, dir }
    }

    /// The site at the second end of a bond.
    pub fn neighbour(&self, b: Bond) -> Site {
        match b.dir {
            Dir::Right => Site::new((b.site.x + 1) % self.lx, b.site.y),
            Dir::Up => Site::new(b.site.x, (b.site.y + 1) % self.ly),
        }
    }

    pub fn end_site(&self, b: Bond, end: End) -> Site {
        match end {
            End::First => b.site,
            End::Second => self.neighbour(b),
        }
    }

    /// The bond a leg sits on and which end of it the site is.
    pub fn leg_bond(&self, s: Site, leg: Leg) -> (Bond, End) {
        match leg {
            Leg::Right => (Bond::right(s.x, s.y), End::First),
            Leg::Up => (Bond::up(s.x, s.y), End::First),
            Leg::Left => (Bond::right((s.x + self.lx - 1) % self.lx, s.y), End::Second),
            Leg::Down => (Bond::up(s.x, (s.y + self.ly - 1) % self.ly), End::Second),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn legs_and_bonds_are_consistent() {
        let lat = Lattice::new(4, 3);
        let mut seen = vec![0; lat.num_bonds()];
        for s in lat.sites() {
            for leg in LEGS {
                let (b, end) = lat.leg_bond(s, leg);
                assert_eq!(lat.end_site(b, end), s);
                seen[lat.bond_index(b)] += 1;
            }
        }
        assert!(seen.iter().all(|&c| c == 2));
        for i in 0..lat.num_bonds() {
            assert_eq!(lat.bond_index(lat.bond(i)), i);
        }
    }
}
