//! Torus fixed points of the relative Hilbert scheme of points on the
//! universal plane over the Grassmannian of planes in P³.
//!
//! A fixed point is a coordinate plane `V_k = {x_k = 0}` together with one
//! monomial ideal at each of the three coordinate points of that plane.
//! The three slots are ordered by coordinate index: slot `s` sits at the
//! point `e_m` where `m` is the `s`-th element of `{0,1,2,3} \ {k}`.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Integer partition, parts weakly decreasing and positive.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "Vec<u32>", into = "Vec<u32>")]
pub struct Partition {
    parts: Vec<u32>,
}

impl Partition {
    pub fn new(parts: Vec<u32>) -> Result<Self> {
        if parts.contains(&0) || parts.windows(2).any(|w| w[0] < w[1]) {
            return Err(Error::InvalidPartition(parts));
        }
        Ok(Partition { parts })
    }

    pub fn empty() -> Self {
        Partition { parts: Vec::new() }
    }

    pub fn parts(&self) -> &[u32] {
        &self.parts
    }

    pub fn size(&self) -> u32 {
        self.parts.iter().sum()
    }

    pub fn is_empty(&self) -> bool {
        self.parts.is_empty()
    }

    pub fn conjugate(&self) -> Partition {
        let width = self.parts.first().copied().unwrap_or(0);
        let parts = (0..width)
            .map(|a| self.parts.iter().filter(|&&p| p > a).count() as u32)
            .collect();
        Partition { parts }
    }

    /// Cells `(a, b)` of the Young diagram; `(a, b)` stands for the monomial
    /// `u^a v^b` outside the ideal, and `b` indexes the parts.
    pub fn cells(&self) -> Vec<(u32, u32)> {
        self.parts
            .iter()
            .enumerate()
            .flat_map(|(b, &row)| (0..row).map(move |a| (a, b as u32)))
            .collect()
    }

    pub fn contains(&self, (a, b): (u32, u32)) -> bool {
        self.parts.get(b as usize).is_some_and(|&row| a < row)
    }

    /// Arm (cells to the right, along `u`) and leg (cells above, along `v`).
    pub fn arm_leg(&self, cell: (u32, u32)) -> Result<(u32, u32)> {
        if !self.contains(cell) {
            return Err(Error::CellOutsideDiagram(cell.0, cell.1, self.to_string()));
        }
        let (a, b) = cell;
        let arm = self.parts[b as usize] - a - 1;
        let column = self.parts.iter().filter(|&&p| p > a).count() as u32;
        Ok((arm, column - b - 1))
    }

    /// All partitions of `n`, in reverse lexicographic order.
    pub fn all(n: u32) -> Vec<Partition> {
        fn rec(n: u32, max: u32, prefix: &mut Vec<u32>, out: &mut Vec<Partition>) {
            if n == 0 {
                out.push(Partition {
                    parts: prefix.clone(),
                });
                return;
            }
            for p in (1..=n.min(max)).rev() {
                prefix.push(p);
                rec(n - p, p, prefix, out);
                prefix.pop();
            }
        }
        let mut out = Vec::new();
        rec(n, n, &mut Vec::new(), &mut out);
        out
    }
}

impl TryFrom<Vec<u32>> for Partition {
    type Error = Error;
    fn try_from(parts: Vec<u32>) -> Result<Self> {
        Partition::new(parts)
    }
}

impl From<Partition> for Vec<u32> {
    fn from(p: Partition) -> Vec<u32> {
        p.parts
    }
}

impl fmt::Display for Partition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for (k, p) in self.parts.iter().enumerate() {
            if k > 0 {
                write!(f, ",")?;
            }
            write!(f, "{p}")?;
        }
        write!(f, "]")
    }
}

/// Number of partitions of `n`.
pub fn partition_count(n: u32) -> u64 {
    let n = n as usize;
    let mut ways = vec![0u64; n + 1];
    ways[0] = 1;
    for part in 1..=n {
        for total in part..=n {
            ways[total] += ways[total - part];
        }
    }
    ways[n]
}

/// Three partitions, one per torus-fixed point of a coordinate plane.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Tripartition(pub [Partition; 3]);

impl Tripartition {
    pub fn size(&self) -> u32 {
        self.0.iter().map(Partition::size).sum()
    }

    pub fn slots(&self) -> &[Partition; 3] {
        &self.0
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct FixedPoint {
    pub plane_index: u8,
    pub tri: Tripartition,
}

impl FixedPoint {
    pub fn new(plane_index: u8, tri: Tripartition) -> Result<Self> {
        if plane_index > 3 {
            return Err(Error::InvalidSpec(format!("plane index {plane_index} out of range")));
        }
        Ok(FixedPoint { plane_index, tri })
    }

    /// Number of points of the subscheme.
    pub fn length(&self) -> u32 {
        self.tri.size()
    }

    /// Coordinate indices of the three fixed points of the plane, in slot order.
    pub fn plane_points(&self) -> [usize; 3] {
        plane_points(self.plane_index as usize)
    }

    /// Canonical text form, e.g. `V0:[2,1]|[1]|[]`.
    pub fn encode(&self) -> String {
        self.to_string()
    }
}

pub fn plane_points(k: usize) -> [usize; 3] {
    let mut out = [0; 3];
    let mut s = 0;
    for m in 0..4 {
        if m != k {
            out[s] = m;
            s += 1;
        }
    }
    out
}

impl fmt::Display for FixedPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let [a, b, c] = &self.tri.0;
        write!(f, "V{}:{a}|{b}|{c}", self.plane_index)
    }
}

/// Every fixed point of length `i`, plane-major, each exactly once.
pub fn enumerate_fixed_points(i: u32) -> Vec<FixedPoint> {
    let by_size: Vec<Vec<Partition>> = (0..=i).map(Partition::all).collect();
    let mut out = Vec::new();
    for k in 0..4u8 {
        for a in 0..=i {
            for b in 0..=i - a {
                let c = i - a - b;
                for p1 in &by_size[a as usize] {
                    for p2 in &by_size[b as usize] {
                        for p3 in &by_size[c as usize] {
                            out.push(FixedPoint {
                                plane_index: k,
                                tri: Tripartition([p1.clone(), p2.clone(), p3.clone()]),
                            });
                        }
                    }
                }
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use std::collections::HashSet;

    fn p(parts: &[u32]) -> Partition {
        Partition::new(parts.to_vec()).unwrap()
    }

    #[test]
    fn small_counts() {
        assert_eq!(enumerate_fixed_points(0).len(), 4);
        assert_eq!(enumerate_fixed_points(1).len(), 12);
        assert_eq!(enumerate_fixed_points(2).len(), 36);
    }

    #[test]
    fn counts_match_convolution() {
        for i in 0..=12u32 {
            let conv: u64 = (0..=i)
                .flat_map(|a| (0..=i - a).map(move |b| (a, b)))
                .map(|(a, b)| partition_count(a) * partition_count(b) * partition_count(i - a - b))
                .sum();
            assert_eq!(enumerate_fixed_points(i).len() as u64, 4 * conv, "i = {i}");
        }
    }

    #[test]
    fn fixed_points_are_distinct_and_sized() {
        for i in 0..=6 {
            let fps = enumerate_fixed_points(i);
            let codes: HashSet<String> = fps.iter().map(FixedPoint::encode).collect();
            assert_eq!(codes.len(), fps.len());
            assert!(fps.iter().all(|f| f.length() == i));
        }
    }

    #[test]
    fn encoding() {
        let f = FixedPoint::new(0, Tripartition([p(&[2, 1]), p(&[1]), Partition::empty()])).unwrap();
        assert_eq!(f.encode(), "V0:[2,1]|[1]|[]");
        assert_eq!(f.plane_points(), [1, 2, 3]);
        assert_eq!(plane_points(2), [0, 1, 3]);
    }

    #[test]
    fn partition_validation() {
        assert!(Partition::new(vec![1, 2]).is_err());
        assert!(Partition::new(vec![2, 0]).is_err());
        assert_eq!(Partition::all(4).len(), 5);
        assert_eq!(partition_count(12), 77);
    }

    #[test]
    fn cells_and_arm_leg() {
        assert_eq!(p(&[1]).cells(), vec![(0, 0)]);
        assert_eq!(p(&[2, 1]).cells(), vec![(0, 0), (1, 0), (0, 1)]);
        assert_eq!(p(&[3]).cells(), vec![(0, 0), (1, 0), (2, 0)]);
        assert_eq!(p(&[1]).arm_leg((0, 0)).unwrap(), (0, 0));
        assert_eq!(p(&[2]).arm_leg((0, 0)).unwrap(), (1, 0));
        assert_eq!(p(&[2, 2]).arm_leg((0, 0)).unwrap(), (1, 1));
        assert!(matches!(
            p(&[2]).arm_leg((0, 1)),
            Err(Error::CellOutsideDiagram(0, 1, _))
        ));
    }

    proptest! {
        #[test]
        fn arm_leg_reconstructs_partition(n in 0u32..12, pick in any::<prop::sample::Index>()) {
            let all = Partition::all(n);
            let mu = &all[pick.index(all.len())];
            prop_assert_eq!(mu.cells().len() as u32, mu.size());
            let conj = mu.conjugate();
            for (a, b) in mu.cells() {
                let (arm, leg) = mu.arm_leg((a, b)).unwrap();
                prop_assert_eq!(a + arm + 1, mu.parts()[b as usize]);
                prop_assert_eq!(b + leg + 1, conj.parts()[a as usize]);
            }
            // Row lengths are recovered from the arms in the first column.
            let rows: Vec<u32> = (0..mu.parts().len() as u32)
                .map(|b| mu.arm_leg((0, b)).unwrap().0 + 1)
                .collect();
            prop_assert_eq!(rows, mu.parts().to_vec());
        }
    }
}
