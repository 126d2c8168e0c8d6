use std::f64::consts::PI;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::vec3::Vec3;

pub const DEFAULT_DIRECTIONS: usize = 5000;
pub const DEFAULT_KNN: usize = 12;
pub const MIN_DIRECTIONS: usize = 100;

/// Sampled gravity directions on the unit sphere plus a symmetric
/// k-nearest-neighbour graph over them.
#[derive(Clone, Debug)]
pub struct DirectionSet {
    pub directions: Vec<Vec3>,
    /// Sorted neighbour indices; `j` in `neighbors[i]` iff `i` in `neighbors[j]`.
    pub neighbors: Vec<Vec<u32>>,
    pub k: usize,
    pub azimuth_offset: f64,
}

impl DirectionSet {
    pub fn len(&self) -> usize {
        self.directions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.directions.is_empty()
    }

    /// Builds the graph for an arbitrary set of unit vectors.
    pub fn from_directions(directions: Vec<Vec3>, k: usize) -> Result<Self> {
        if k == 0 || k >= directions.len() {
            return Err(Error::Domain { what: "knn", value: k as f64 });
        }
        let neighbors = symmetric_knn(&directions, k);
        Ok(DirectionSet { directions, neighbors, k, azimuth_offset: 0.0 })
    }

    /// Unique undirected graph edges `(i, j)` with `i < j`.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.neighbors
            .iter()
            .enumerate()
            .flat_map(|(i, nb)| nb.iter().map(|&j| j as usize).filter(move |&j| j > i).map(move |j| (i, j)))
    }
}

/// Fibonacci spiral: `z_i = 1 - 2(i + 1/2)/n`, azimuth `2 pi i / golden`.
pub fn fibonacci_sphere(n: usize, k: usize) -> Result<DirectionSet> {
    fibonacci_sphere_rotated(n, k, 0.0)
}

/// Fibonacci spiral with every azimuth shifted by `azimuth_offset`; a
/// different offset gives an independent but equally uniform sample.
pub fn fibonacci_sphere_rotated(n: usize, k: usize, azimuth_offset: f64) -> Result<DirectionSet> {
    if n < MIN_DIRECTIONS {
        return Err(Error::Domain { what: "directions", value: n as f64 });
    }
    let golden = (1.0 + 5f64.sqrt()) / 2.0;
    let directions = (0..n)
        .map(|i| {
            let z = 1.0 - 2.0 * (i as f64 + 0.5) / n as f64;
            let rho = (1.0 - z * z).max(0.0).sqrt();
            let (s, c) = (2.0 * PI * i as f64 / golden + azimuth_offset).sin_cos();
            Vec3::new(rho * c, rho * s, z)
        })
        .collect();
    let mut set = DirectionSet::from_directions(directions, k)?;
    set.azimuth_offset = azimuth_offset;
    Ok(set)
}

/// Brute-force kNN by largest dot product (ties to the lower index),
/// followed by symmetric closure.
fn symmetric_knn(dirs: &[Vec3], k: usize) -> Vec<Vec<u32>> {
    let nearest: Vec<Vec<u32>> = dirs
        .par_iter()
        .enumerate()
        .map(|(i, &d)| {
            // (dot, index), kept sorted best-first
            let mut best: Vec<(f64, u32)> = Vec::with_capacity(k + 1);
            for (j, &e) in dirs.iter().enumerate() {
                if j == i {
                    continue;
                }
                let s = d.dot(e);
                if best.len() == k && s <= best[k - 1].0 {
                    continue;
                }
                let pos = best.partition_point(|&(t, _)| t >= s);
                best.insert(pos, (s, j as u32));
                best.truncate(k);
            }
            best.into_iter().map(|(_, j)| j).collect()
        })
        .collect();

    let mut sym: Vec<Vec<u32>> = nearest.clone();
    for (i, nb) in nearest.iter().enumerate() {
        for &j in nb {
            sym[j as usize].push(i as u32);
        }
    }
    for nb in &mut sym {
        nb.sort_unstable();
        nb.dedup();
    }
    sym
}
