//! Drainage-basin labelling of a sampled height landscape and
//! threshold merging of basins.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::height::HeightField;
use crate::error::{Error, Result};
use crate::unionfind::UnionFind;

/// The local minimum a basin drains to.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Sink {
    pub direction: usize,
    pub height: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct BasinLabeling {
    /// Basin id of every sampled direction.
    pub basin_of: Vec<u32>,
    /// Sink of every basin, indexed by basin id (ids follow direction order).
    pub sinks: Vec<Sink>,
    /// Basin pairs `(a, b)`, `a < b`, joined by at least one graph edge.
    pub adjacency: BTreeSet<(u32, u32)>,
}

impl BasinLabeling {
    pub fn basin_count(&self) -> usize {
        self.sinks.len()
    }

    /// Sink heights in ascending order.
    pub fn sorted_sink_heights(&self) -> Vec<f64> {
        let mut h: Vec<f64> = self.sinks.iter().map(|s| s.height).collect();
        h.sort_by(f64::total_cmp);
        h
    }
}

/// Greedy steepest descent on the kNN graph.
///
/// Every sample steps to its lowest strictly-lower neighbour (lowest index
/// on ties) until none is lower; the end point is its sink. A flat
/// landscape yields [`Error::DegenerateFlat`].
pub fn label_basins(field: &HeightField<'_>) -> Result<BasinLabeling> {
    if field.is_flat() {
        return Err(Error::DegenerateFlat { range: field.h_range() });
    }
    let h = &field.h;
    let nbrs = &field.dirs.neighbors;
    let n = h.len();
    if n <= field.dirs.k {
        return Err(Error::InsufficientData { needed: field.dirs.k + 1, got: n });
    }

    let next: Vec<usize> = (0..n)
        .map(|i| {
            let mut best = i;
            for &j in &nbrs[i] {
                let j = j as usize;
                if h[j] < h[best] {
                    best = j;
                }
            }
            best
        })
        .collect();

    const UNSET: u32 = u32::MAX;
    let mut basin_of = vec![UNSET; n];
    let mut sinks = Vec::new();
    for i in 0..n {
        if next[i] == i {
            basin_of[i] = sinks.len() as u32;
            sinks.push(Sink { direction: i, height: h[i] });
        }
    }
    let mut path = Vec::new();
    for i in 0..n {
        let mut x = i;
        while basin_of[x] == UNSET {
            path.push(x);
            x = next[x];
        }
        let b = basin_of[x];
        for p in path.drain(..) {
            basin_of[p] = b;
        }
    }

    let mut adjacency = BTreeSet::new();
    for (i, nb) in nbrs.iter().enumerate() {
        for &j in nb {
            let (a, b) = (basin_of[i], basin_of[j as usize]);
            if a != b {
                adjacency.insert((a.min(b), a.max(b)));
            }
        }
    }
    Ok(BasinLabeling { basin_of, sinks, adjacency })
}

/// How basins whose sinks are close in height are combined.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MergeRule {
    /// Union-find over adjacent basin pairs whose sink heights differ by
    /// less than the tolerance, closed transitively.
    #[default]
    Fixpoint,
    /// One pass over all sinks in ascending height; a sink joins the current
    /// class if it is within tolerance of that class's lowest sink,
    /// otherwise it opens a new class. Ignores adjacency.
    SinglePass,
}

impl fmt::Display for MergeRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            MergeRule::Fixpoint => "fixpoint",
            MergeRule::SinglePass => "single-pass",
        })
    }
}

impl FromStr for MergeRule {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "fixpoint" => Ok(MergeRule::Fixpoint),
            "single-pass" | "single_pass" => Ok(MergeRule::SinglePass),
            _ => Err(Error::Parse(format!("unknown merge rule `{s}`"))),
        }
    }
}

/// Result of merging at one threshold.
#[derive(Clone, Debug, PartialEq)]
pub struct MergedBasins {
    /// Class id of every basin.
    pub class_of: Vec<u32>,
    /// Lowest sink of every class, ascending by height.
    pub representatives: Vec<Sink>,
}

impl MergedBasins {
    pub fn count(&self) -> usize {
        self.representatives.len()
    }

    /// Height difference between the two lowest classes (0 for one class).
    pub fn lowest_gap(&self) -> f64 {
        match self.representatives.as_slice() {
            [a, b, ..] => b.height - a.height,
            _ => 0.0,
        }
    }
}

/// Merges basins whose sink heights differ by less than
/// `threshold_fraction * h_range`. Requires `0 < threshold_fraction <= 0.5`.
pub fn merge_basins(
    labeling: &BasinLabeling,
    h_range: f64,
    threshold_fraction: f64,
    rule: MergeRule,
) -> Result<MergedBasins> {
    if !(threshold_fraction > 0.0 && threshold_fraction <= 0.5) {
        return Err(Error::Domain { what: "threshold_fraction", value: threshold_fraction });
    }
    let tol = threshold_fraction * h_range;
    let sinks = &labeling.sinks;
    let n = sinks.len();
    let lower = |a: &Sink, b: &Sink| a.height.total_cmp(&b.height).then(a.direction.cmp(&b.direction));

    let mut class_of = vec![0u32; n];
    let mut representatives: Vec<Sink> = Vec::new();
    match rule {
        MergeRule::Fixpoint => {
            let mut uf = UnionFind::new(n);
            for &(a, b) in &labeling.adjacency {
                let (a, b) = (a as usize, b as usize);
                if (sinks[a].height - sinks[b].height).abs() < tol {
                    uf.union(a, b);
                }
            }
            let mut best: Vec<Option<usize>> = vec![None; n];
            for i in 0..n {
                let r = uf.find(i);
                match best[r] {
                    Some(j) if lower(&sinks[j], &sinks[i]).is_le() => {}
                    _ => best[r] = Some(i),
                }
            }
            let mut roots: Vec<usize> = (0..n).filter(|&i| uf.find(i) == i).collect();
            roots.sort_by(|&a, &b| lower(&sinks[best[a].unwrap()], &sinks[best[b].unwrap()]));
            let mut id_of_root = vec![0u32; n];
            for (id, &r) in roots.iter().enumerate() {
                id_of_root[r] = id as u32;
                representatives.push(sinks[best[r].unwrap()]);
            }
            for i in 0..n {
                class_of[i] = id_of_root[uf.find(i)];
            }
        }
        MergeRule::SinglePass => {
            let mut order: Vec<usize> = (0..n).collect();
            order.sort_by(|&a, &b| lower(&sinks[a], &sinks[b]));
            for i in order {
                match representatives.last() {
                    Some(rep) if sinks[i].height - rep.height < tol => {}
                    _ => representatives.push(sinks[i]),
                }
                class_of[i] = (representatives.len() - 1) as u32;
            }
        }
    }
    Ok(MergedBasins { class_of, representatives })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::{fibonacci_sphere, DirectionSet};

    fn two_basins(h0: f64, h1: f64) -> BasinLabeling {
        BasinLabeling {
            basin_of: vec![0, 0, 1, 1],
            sinks: vec![Sink { direction: 0, height: h0 }, Sink { direction: 2, height: h1 }],
            adjacency: [(0, 1)].into_iter().collect(),
        }
    }

    #[test]
    fn merge_threshold_examples() {
        let l = two_basins(0.100, 0.1005);
        for rule in [MergeRule::Fixpoint, MergeRule::SinglePass] {
            assert_eq!(merge_basins(&l, 0.1, 0.01, rule).unwrap().count(), 1);
            assert_eq!(merge_basins(&l, 0.1, 0.001, rule).unwrap().count(), 2);
        }
        assert!(merge_basins(&l, 0.1, 0.0, MergeRule::Fixpoint).is_err());
        assert!(merge_basins(&l, 0.1, 0.6, MergeRule::Fixpoint).is_err());
    }

    #[test]
    fn fixpoint_chains_but_single_pass_does_not() {
        // three adjacent sinks 0.0, 0.008, 0.016 with tolerance 0.01
        let l = BasinLabeling {
            basin_of: vec![0, 1, 2],
            sinks: vec![
                Sink { direction: 0, height: 0.0 },
                Sink { direction: 1, height: 0.008 },
                Sink { direction: 2, height: 0.016 },
            ],
            adjacency: [(0, 1), (1, 2)].into_iter().collect(),
        };
        let fix = merge_basins(&l, 1.0, 0.01, MergeRule::Fixpoint).unwrap();
        assert_eq!(fix.count(), 1);
        assert_eq!(fix.representatives[0].direction, 0);
        let sp = merge_basins(&l, 1.0, 0.01, MergeRule::SinglePass).unwrap();
        assert_eq!(sp.count(), 2);
        assert!((sp.lowest_gap() - 0.016).abs() < 1e-15);
    }

    #[test]
    fn non_adjacent_equal_sinks_stay_apart_under_fixpoint() {
        let mut l = two_basins(0.5, 0.5);
        l.adjacency.clear();
        assert_eq!(merge_basins(&l, 1.0, 0.01, MergeRule::Fixpoint).unwrap().count(), 2);
        assert_eq!(merge_basins(&l, 1.0, 0.01, MergeRule::SinglePass).unwrap().count(), 1);
    }

    #[test]
    fn linear_field_has_single_sink_at_south() {
        let dirs = fibonacci_sphere(2000, 12).unwrap();
        let h = dirs.directions.iter().map(|d| d.z).collect();
        let f = HeightField::from_values(&dirs, h).unwrap();
        let l = label_basins(&f).unwrap();
        assert_eq!(l.basin_count(), 1);
        assert_eq!(l.sinks[0].direction, 1999);
    }

    /// Brute-force scan: a direction is a local minimum iff no neighbour is strictly lower.
    fn brute_force_minima(dirs: &DirectionSet, h: &[f64]) -> Vec<usize> {
        (0..h.len()).filter(|&i| dirs.neighbors[i].iter().all(|&j| h[j as usize] >= h[i])).collect()
    }

    #[test]
    fn z_squared_field_has_two_polar_sinks() {
        let dirs = fibonacci_sphere(2000, 12).unwrap();
        let h: Vec<f64> = dirs.directions.iter().map(|d| d.z * d.z).collect();
        let f = HeightField::from_values(&dirs, h.clone()).unwrap();
        let l = label_basins(&f).unwrap();
        let sinks: Vec<usize> = l.sinks.iter().map(|s| s.direction).collect();
        assert_eq!(sinks, brute_force_minima(&dirs, &h));
        // z^2 is minimal on the whole equator; the sampled graph resolves it
        // into the basins the scan finds, all with heights near zero
        assert!(l.sinks.iter().all(|s| s.height < 1e-3));
    }

    #[test]
    fn two_pole_field() {
        let dirs = fibonacci_sphere(2000, 12).unwrap();
        // minima at both poles: h = 1 - z^2
        let h: Vec<f64> = dirs.directions.iter().map(|d| 1.0 - d.z * d.z).collect();
        let f = HeightField::from_values(&dirs, h.clone()).unwrap();
        let l = label_basins(&f).unwrap();
        assert_eq!(l.basin_count(), 2);
        let sinks: Vec<usize> = l.sinks.iter().map(|s| s.direction).collect();
        assert_eq!(sinks, brute_force_minima(&dirs, &h));
        assert_eq!(sinks, vec![0, 1999]);
    }

    #[test]
    fn flat_field_is_degenerate() {
        let dirs = fibonacci_sphere(200, 12).unwrap();
        let f = HeightField::from_values(&dirs, vec![1.0; 200]).unwrap();
        assert!(matches!(label_basins(&f), Err(Error::DegenerateFlat { .. })));
    }

    #[test]
    fn sinks_are_local_minima_and_paths_end_there() {
        let dirs = fibonacci_sphere(1500, 12).unwrap();
        let h: Vec<f64> =
            dirs.directions.iter().map(|d| (3.0 * d.x).sin() * (2.0 * d.y).cos() + d.z * d.z * d.x).collect();
        let f = HeightField::from_values(&dirs, h.clone()).unwrap();
        let l = label_basins(&f).unwrap();
        for s in &l.sinks {
            for &j in &dirs.neighbors[s.direction] {
                assert!(h[j as usize] >= s.height);
            }
        }
        for (b, s) in l.sinks.iter().enumerate() {
            assert_eq!(l.basin_of[s.direction], b as u32);
        }
        assert!(l.basin_count() > 1);
    }
}
