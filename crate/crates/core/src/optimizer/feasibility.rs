use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::objective::{evaluate_body, OracleSettings};
use crate::error::{Error, Result};
use crate::surfaces::SurfaceSpec;
use crate::unionfind::UnionFind;

pub const MIN_MAP_CELLS: usize = 5;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MapCell {
    pub i: usize,
    pub j: usize,
    pub beta: f64,
    pub coeff: f64,
    pub ecs: Option<usize>,
    /// Fixpoint count 1 at every threshold.
    pub mono_monostatic: bool,
    pub convexity_ratio: Option<f64>,
    pub com_violation: Option<f64>,
    /// Mono-monostatic and convex.
    pub feasible: bool,
    pub degenerate: bool,
    /// Connected component id of a feasible cell.
    pub component: Option<usize>,
    pub error: Option<String>,
}

/// Axis-aligned extent of one connected feasible region.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Component {
    pub id: usize,
    pub cells: usize,
    pub beta_min: f64,
    pub beta_max: f64,
    pub coeff_min: f64,
    pub coeff_max: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FeasibilityMap {
    pub template: SurfaceSpec,
    pub betas: Vec<f64>,
    pub coeffs: Vec<f64>,
    /// Row-major over `(beta, coeff)`.
    pub cells: Vec<MapCell>,
    pub components: Vec<Component>,
}

impl FeasibilityMap {
    pub fn component_count(&self) -> usize {
        self.components.len()
    }
}

/// Evaluates every `(beta, coeff)` cell and labels 4-connected regions of
/// feasible cells.
pub fn feasibility_map(
    template: &SurfaceSpec,
    betas: &[f64],
    coeffs: &[f64],
    oracle: &OracleSettings,
) -> Result<FeasibilityMap> {
    let total = betas.len() * coeffs.len();
    if total < MIN_MAP_CELLS {
        return Err(Error::InsufficientData { needed: MIN_MAP_CELLS, got: total });
    }
    let nc = coeffs.len();
    let mut cells: Vec<MapCell> = (0..total)
        .into_par_iter()
        .map(|k| {
            let (i, j) = (k / nc, k % nc);
            let spec = SurfaceSpec { beta: betas[i], coeff: coeffs[j], ..*template };
            let e = evaluate_body(&spec, oracle);
            let mono = e.is_mono_monostatic();
            MapCell {
                i,
                j,
                beta: betas[i],
                coeff: coeffs[j],
                ecs: e.ecs.as_ref().map(|r| r.default_ecs),
                mono_monostatic: mono,
                convexity_ratio: e.convexity_ratio,
                com_violation: e.com_violation,
                feasible: mono && e.is_convex(),
                degenerate: e.is_degenerate(),
                component: None,
                error: e.error.clone(),
            }
        })
        .collect();
    let components = label_components(&mut cells, betas.len(), nc);
    Ok(FeasibilityMap { template: *template, betas: betas.to_vec(), coeffs: coeffs.to_vec(), cells, components })
}

/// 4-neighbourhood labelling; ids are assigned in row-major order of each
/// component's first cell.
fn label_components(cells: &mut [MapCell], nb: usize, nc: usize) -> Vec<Component> {
    let mut uf = UnionFind::new(nb * nc);
    for i in 0..nb {
        for j in 0..nc {
            let k = i * nc + j;
            if !cells[k].feasible {
                continue;
            }
            if j + 1 < nc && cells[k + 1].feasible {
                uf.union(k, k + 1);
            }
            if i + 1 < nb && cells[k + nc].feasible {
                uf.union(k, k + nc);
            }
        }
    }
    let mut id_of_root: Vec<Option<usize>> = vec![None; nb * nc];
    let mut components: Vec<Component> = Vec::new();
    for (k, cell) in cells.iter_mut().enumerate() {
        if !cell.feasible {
            continue;
        }
        let r = uf.find(k);
        let id = *id_of_root[r].get_or_insert_with(|| {
            components.push(Component {
                id: components.len(),
                cells: 0,
                beta_min: f64::INFINITY,
                beta_max: f64::NEG_INFINITY,
                coeff_min: f64::INFINITY,
                coeff_max: f64::NEG_INFINITY,
            });
            components.len() - 1
        });
        let c = &mut components[id];
        c.cells += 1;
        c.beta_min = c.beta_min.min(cell.beta);
        c.beta_max = c.beta_max.max(cell.beta);
        c.coeff_min = c.coeff_min.min(cell.coeff);
        c.coeff_max = c.coeff_max.max(cell.coeff);
        cell.component = Some(id);
    }
    components
}

/// Parses `A:B:STEP` (inclusive of `B` up to rounding) or a single value.
pub fn parse_grid(s: &str) -> Result<Vec<f64>> {
    let parts: Vec<&str> = s.split(':').collect();
    let num = |p: &str| -> Result<f64> {
        p.trim()
            .parse::<f64>()
            .ok()
            .filter(|v| v.is_finite())
            .ok_or_else(|| Error::Parse(format!("bad number `{p}` in grid `{s}`")))
    };
    match parts.as_slice() {
        [v] => Ok(vec![num(v)?]),
        [a, b, step] => {
            let (a, b, step) = (num(a)?, num(b)?, num(step)?);
            if step <= 0.0 || b < a {
                return Err(Error::Parse(format!("grid `{s}` needs A <= B and STEP > 0")));
            }
            let n = ((b - a) / step + 1e-9).floor() as usize + 1;
            if n > 100_000 {
                return Err(Error::Parse(format!("grid `{s}` has too many points")));
            }
            // round to suppress accumulation noise like 0.30000000000000004
            Ok((0..n).map(|k| round12(a + k as f64 * step)).collect())
        }
        _ => Err(Error::Parse(format!("grid `{s}` is not A:B:STEP"))),
    }
}

fn round12(v: f64) -> f64 {
    (v * 1e12).round() / 1e12
}
