//! Geometric set cover with axis-aligned squares, and its reduction to CAPsac.
//!
//! A GSCP instance asks whether `k` placements of an `s x s` square cover all
//! points. The reduction makes one photo per point and `k` capable drones,
//! and prices every rectangle of the catalog at 1 if its member set is
//! covered by some square placement, `k + 2` otherwise. The answer is yes iff
//! the CAPsac optimum is 1.

use std::collections::HashSet;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{enumerate_rectangles, CoordinateAxes};
use crate::instance::{random_tree, Deadline, Drone, GeoPoint, Instance, NetworkLink, Photo};
use crate::milp::{MilpBackend, SolveStatus};
use crate::oracle::{optimum_over_catalog, OracleLimits};
use crate::par::Execution;
use crate::rcapsac::{build_rcapsac, RcapsacConfig, SubsetCatalog};

/// Link capacity standing in for "infinite".
pub const UNLIMITED_CAPACITY: f64 = 1e12;
/// Slack on the `T* = 1` test.
pub const ANSWER_TOL: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GscpInstance {
    pub points: Vec<[f64; 2]>,
    pub side: f64,
    pub k: usize,
}

impl GscpInstance {
    pub fn validate(&self) -> Result<()> {
        if self.points.is_empty() {
            return Err(Error::Gscp("no points".into()));
        }
        if self.points.iter().flatten().any(|c| !c.is_finite()) {
            return Err(Error::Gscp("non-finite coordinate".into()));
        }
        if !(self.side > 0.0 && self.side.is_finite()) {
            return Err(Error::Gscp(format!("side must be positive, got {}", self.side)));
        }
        if self.k == 0 {
            return Err(Error::Gscp("k must be at least 1".into()));
        }
        Ok(())
    }

    /// Big cost standing in for infinity.
    pub fn big(&self) -> f64 {
        (self.k + 2) as f64
    }
}

pub fn parse_gscp(text: &str) -> Result<GscpInstance> {
    let g: GscpInstance = serde_json::from_str(text)?;
    g.validate()?;
    Ok(g)
}

pub fn write_gscp(g: &GscpInstance) -> String {
    let mut s = serde_json::to_string_pretty(g).expect("serialisation is infallible");
    s.push('\n');
    s
}

/// Distinct point subsets covered by a square whose lower-left corner sits on
/// a point x-coordinate and a point y-coordinate. Subsets are sorted index
/// lists, in order of first appearance.
pub fn induced_collection(points: &[[f64; 2]], side: f64) -> Vec<Vec<usize>> {
    let distinct = |axis: usize| {
        let mut v: Vec<f64> = points.iter().map(|p| p[axis]).collect();
        v.sort_by(f64::total_cmp);
        v.dedup();
        v
    };
    let (xs, ys) = (distinct(0), distinct(1));
    let mut seen = HashSet::new();
    let mut out = Vec::new();
    for &x in &xs {
        for &y in &ys {
            let inside: Vec<usize> = (0..points.len())
                .filter(|&i| {
                    let [px, py] = points[i];
                    x <= px && px <= x + side && y <= py && py <= y + side
                })
                .collect();
            if !inside.is_empty() && seen.insert(inside.clone()) {
                out.push(inside);
            }
        }
    }
    out
}

#[derive(Debug, Clone, PartialEq)]
pub struct Reduction {
    pub instance: Instance,
    /// Rectangle catalog priced 1 / BIG, plus the empty subset at 0.
    pub catalog: SubsetCatalog,
    pub induced: Vec<Vec<usize>>,
}

pub fn reduce_to_capsac(g: &GscpInstance, seed: u64) -> Result<Reduction> {
    g.validate()?;
    let photos: Vec<Photo> = g
        .points
        .iter()
        .enumerate()
        .map(|(i, &[lng, lat])| Photo {
            id: format!("p{}", i + 1),
            location: GeoPoint { lng, lat },
            lambda: 1.0,
            mu: 1.0,
            stored_on: "d1".into(),
        })
        .collect();
    let drones: Vec<Drone> = (0..g.k).map(|i| Drone { id: format!("d{}", i + 1), capable: true }).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let links = random_tree(g.k, &mut rng)
        .into_iter()
        .map(|(a, b)| NetworkLink { a: drones[a].id.clone(), b: drones[b].id.clone(), capacity: UNLIMITED_CAPACITY })
        .collect();
    let instance = Instance { name: Some("gscp".into()), photos, drones, links, sigma: 1, t_hat: Deadline::Unbounded };
    instance.validate()?;

    let induced = induced_collection(&g.points, g.side);
    let induced_set: HashSet<&Vec<usize>> = induced.iter().collect();
    let axes = CoordinateAxes::build(&instance.photos)?;
    let rects = enumerate_rectangles(&instance.photos, &axes, true)?;
    let mut catalog = SubsetCatalog::from_rectangles(&instance, &rects, true);
    for e in &mut catalog.entries {
        if !e.members.is_empty() {
            e.t = if induced_set.contains(&e.members) { 1.0 } else { g.big() };
        }
    }
    Ok(Reduction { instance, catalog, induced })
}

/// How the reduced instance is solved.
pub enum GscpMethod<'a> {
    Oracle(OracleLimits),
    Milp { backend: &'a dyn MilpBackend, time_limit: Option<f64> },
}

/// Optimal makespan of the reduced instance.
pub fn reduced_optimum(red: &Reduction, method: &GscpMethod<'_>) -> Result<f64> {
    match method {
        GscpMethod::Oracle(limits) => optimum_over_catalog(&red.instance, &red.catalog, limits, Execution::default())?
            .map(|s| s.objective)
            .ok_or_else(|| Error::Gscp("reduced instance has no covering".into())),
        GscpMethod::Milp { backend, time_limit } => {
            let (model, _) = build_rcapsac(&red.instance, &red.catalog, &RcapsacConfig::for_instance(&red.instance))?;
            let sol = backend.solve(&model, *time_limit)?;
            match (sol.status, sol.objective) {
                (SolveStatus::Optimal, Some(obj)) => Ok(obj),
                (status, _) => Err(Error::Gscp(format!("reduced model not solved to optimality (status {status})"))),
            }
        }
    }
}

/// Decides the GSCP instance through the CAPsac optimum.
///
/// With `k` at least the number of induced subsets the answer is trivially
/// yes (every point lies in the square anchored at itself); the region-based
/// model could not select that many distinct subsets, so this case is
/// answered before solving.
pub fn answer_gscp(g: &GscpInstance, method: &GscpMethod<'_>) -> Result<bool> {
    let red = reduce_to_capsac(g, 0)?;
    if g.k >= red.induced.len() {
        return Ok(true);
    }
    Ok(reduced_optimum(&red, method)? <= 1.0 + ANSWER_TOL)
}

/// Independent decision: tries every subfamily of at most `k` induced subsets.
pub fn exhaustive_set_cover(g: &GscpInstance) -> bool {
    let sets = induced_collection(&g.points, g.side);
    fn rec(sets: &[Vec<usize>], start: usize, left: usize, covered: &mut Vec<u32>) -> bool {
        if covered.iter().all(|&c| c > 0) {
            return true;
        }
        if left == 0 {
            return false;
        }
        for i in start..sets.len() {
            for &p in &sets[i] {
                covered[p] += 1;
            }
            let ok = rec(sets, i + 1, left - 1, covered);
            for &p in &sets[i] {
                covered[p] -= 1;
            }
            if ok {
                return true;
            }
        }
        false
    }
    rec(&sets, 0, g.k, &mut vec![0; g.points.len()])
}

#[cfg(test)]
mod tests {
    use super::*;

    fn far(k: usize) -> GscpInstance {
        GscpInstance { points: vec![[0.0, 0.0], [2.0, 0.0]], side: 1.0, k }
    }

    #[test]
    fn collections() {
        assert_eq!(induced_collection(&far(1).points, 1.0), vec![vec![0], vec![1]]);
        assert!(induced_collection(&[[0.0, 0.0], [0.5, 0.0]], 1.0).contains(&vec![0, 1]));
        assert_eq!(induced_collection(&[[3.0, 4.0]], 1.0), vec![vec![0]]);
    }

    #[test]
    fn far_points() {
        let red = reduce_to_capsac(&far(2), 0).unwrap();
        assert_eq!(red.instance.photos.len(), 2);
        assert_eq!(red.instance.m(), 2);
        assert!(red.instance.links.iter().all(|l| l.capacity == UNLIMITED_CAPACITY));
        let singles: Vec<f64> = red.catalog.entries.iter().filter(|e| e.members.len() == 1).map(|e| e.t).collect();
        assert_eq!(singles, vec![1.0, 1.0]);
        let pair = red.catalog.entries.iter().find(|e| e.members.len() == 2).unwrap();
        assert_eq!(pair.t, 4.0);

        let oracle = GscpMethod::Oracle(OracleLimits::default());
        assert!(!answer_gscp(&far(1), &oracle).unwrap());
        assert!(answer_gscp(&far(2), &oracle).unwrap());
        assert!(!exhaustive_set_cover(&far(1)));
        assert!(exhaustive_set_cover(&far(2)));
    }

    #[test]
    fn reduced_optimum_is_big_when_no() {
        let red = reduce_to_capsac(&far(1), 0).unwrap();
        let t = reduced_optimum(&red, &GscpMethod::Oracle(OracleLimits::default())).unwrap();
        assert_eq!(t, 3.0);
    }

    #[test]
    fn document_round_trip() {
        let g = far(2);
        assert_eq!(parse_gscp(&write_gscp(&g)).unwrap(), g);
        assert!(parse_gscp(r#"{"points": [], "side": 1, "k": 1}"#).is_err());
        assert!(parse_gscp(r#"{"points": [[0,0]], "side": 0, "k": 1}"#).is_err());
    }
}
