//! Feasibility checks and makespan evaluation.
//!
//! Accounting follows the formulations literally: a photo covered by two
//! regions assigned to the same drone is processed (and transferred) twice.

use std::collections::{BTreeMap, BTreeSet};

use crate::error::Result;
use crate::geometry::{photos_in_rectangle, CoordinateAxes};
use crate::instance::{Deadline, Instance};
use crate::network::{mmf_allocate, transmission_times, Demand, DroneTree};
use crate::solution::CapsacSolution;

/// Relative slack when comparing transmission times against the deadline.
pub const DEADLINE_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub struct FeasibilityReport {
    pub coverage_ok: bool,
    pub sigma_ok: bool,
    pub convexity_ok: bool,
    pub transmission_ok: bool,
    pub violations: Vec<String>,
    /// Seconds per active demand, keyed by `(storing drone id, processing drone id)`.
    pub per_demand_times: BTreeMap<(String, String), f64>,
}

impl FeasibilityReport {
    pub fn is_feasible(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn max_transmission_time(&self) -> f64 {
        self.per_demand_times.values().copied().fold(0.0, f64::max)
    }
}

/// True when `seconds` meets the deadline `limit` up to [`DEADLINE_TOL`].
pub fn within_deadline(seconds: f64, limit: f64) -> bool {
    seconds <= limit * (1.0 + DEADLINE_TOL) + DEADLINE_TOL
}

/// Checks coverage, reliability, region/boundary coupling and (for a bounded
/// deadline) MMF transmission times.
pub fn validate(inst: &Instance, sol: &CapsacSolution) -> Result<FeasibilityReport> {
    let mut violations = Vec::new();
    let m = inst.m();
    if sol.regions.len() != m {
        violations.push(format!("expected {m} regions, found {}", sol.regions.len()));
    }

    let mut covered = vec![false; inst.photos.len()];
    for r in &sol.regions {
        for &k in &r.members {
            if k < covered.len() {
                covered[k] = true;
            }
        }
    }
    let uncovered: Vec<&str> = covered
        .iter()
        .enumerate()
        .filter(|(_, c)| !**c)
        .map(|(k, _)| inst.photos[k].id.as_str())
        .collect();
    let coverage_ok = uncovered.is_empty();
    if !coverage_ok {
        violations.push(format!("photos not covered: {}", uncovered.join(", ")));
    }

    let mut sigma_ok = true;
    for (i, r) in sol.regions.iter().enumerate() {
        let capable: BTreeSet<usize> = r
            .drones
            .iter()
            .copied()
            .filter(|&d| inst.drones.get(d).is_some_and(|x| x.capable))
            .collect();
        if capable.len() != r.drones.len() {
            sigma_ok = false;
            violations.push(format!("region {i} is assigned to a non-capable or unknown drone"));
        }
        if capable.len() < inst.sigma {
            sigma_ok = false;
            violations.push(format!("region {i} has {} capable drones, sigma is {}", capable.len(), inst.sigma));
        }
    }

    let axes = CoordinateAxes::build(&inst.photos)?;
    let mut convexity_ok = true;
    for (i, r) in sol.regions.iter().enumerate() {
        match r.boundary {
            Some(b) => match photos_in_rectangle(&b, &inst.photos, &axes) {
                Ok(inside) if inside == r.members => {}
                Ok(_) => {
                    convexity_ok = false;
                    violations.push(format!("region {i}: members differ from the photos inside its boundary"));
                }
                Err(e) => {
                    convexity_ok = false;
                    violations.push(format!("region {i}: {e}"));
                }
            },
            None if r.members.is_empty() => {}
            None => {
                convexity_ok = false;
                violations.push(format!("region {i} has members but no boundary"));
            }
        }
    }

    let demands = active_demands(inst, sol);
    let mut per_demand_times = BTreeMap::new();
    let mut transmission_ok = true;
    if !demands.is_empty() {
        let tree = DroneTree::from_instance(inst)?;
        let alloc = mmf_allocate(&tree, &demands)?;
        let times = transmission_times(&alloc, &demands)?;
        for (d, t) in demands.iter().zip(times) {
            let key = (inst.drones[d.source].id.clone(), inst.drones[d.target].id.clone());
            if let Deadline::Seconds(limit) = inst.t_hat {
                if !within_deadline(t, limit) {
                    transmission_ok = false;
                    violations.push(format!("demand {} -> {} needs {t} s > {limit} s", key.0, key.1));
                }
            }
            per_demand_times.insert(key, t);
        }
    }

    Ok(FeasibilityReport { coverage_ok, sigma_ok, convexity_ok, transmission_ok, violations, per_demand_times })
}

/// Per-drone processing load, indexed by drone.
pub fn drone_loads(inst: &Instance, sol: &CapsacSolution) -> Vec<f64> {
    let mut load = vec![0.0; inst.drones.len()];
    for r in &sol.regions {
        let t: f64 = r.members.iter().map(|&k| inst.photos[k].lambda).sum();
        for &d in &r.drones {
            load[d] += t;
        }
    }
    load
}

/// Largest per-drone load, counting a photo once per (region, photo) pair.
pub fn makespan(inst: &Instance, sol: &CapsacSolution) -> f64 {
    drone_loads(inst, sol).into_iter().fold(0.0, f64::max)
}

/// Largest per-drone load when every drone processes each photo at most once.
pub fn physical_makespan(inst: &Instance, sol: &CapsacSolution) -> f64 {
    let mut per_drone: BTreeMap<usize, BTreeSet<usize>> = BTreeMap::new();
    for r in &sol.regions {
        for &d in &r.drones {
            per_drone.entry(d).or_default().extend(r.members.iter().copied());
        }
    }
    per_drone
        .values()
        .map(|photos| photos.iter().map(|&k| inst.photos[k].lambda).sum::<f64>())
        .fold(0.0, f64::max)
}

/// Demands with positive volume, ordered by (processing drone, storing drone).
pub fn active_demands(inst: &Instance, sol: &CapsacSolution) -> Vec<Demand> {
    let storage = inst.storage();
    let mut volume: BTreeMap<(usize, usize), f64> = BTreeMap::new();
    for r in &sol.regions {
        for &d in &r.drones {
            for &k in &r.members {
                let h = storage[k];
                if h != d {
                    *volume.entry((d, h)).or_insert(0.0) += inst.photos[k].mu;
                }
            }
        }
    }
    volume
        .into_iter()
        .filter(|(_, v)| *v > 0.0)
        .map(|((target, source), volume)| Demand { source, target, volume })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::t4;
    use crate::geometry::Boundary;
    use crate::solution::Region;

    fn columns() -> CapsacSolution {
        CapsacSolution {
            regions: vec![
                Region { boundary: Some(Boundary { left: 0, right: 0, bottom: 0, top: 1 }), members: vec![0, 1], drones: vec![0] },
                Region { boundary: Some(Boundary { left: 1, right: 1, bottom: 0, top: 1 }), members: vec![2, 3], drones: vec![1] },
            ],
            objective: 2.0,
        }
    }

    fn all_on_d1() -> CapsacSolution {
        CapsacSolution {
            regions: vec![
                Region { boundary: Some(Boundary { left: 0, right: 1, bottom: 0, top: 1 }), members: vec![0, 1, 2, 3], drones: vec![0] },
                Region { boundary: None, members: vec![], drones: vec![1] },
            ],
            objective: 4.0,
        }
    }

    #[test]
    fn two_column_split_is_feasible() {
        let r = validate(&t4(), &columns()).unwrap();
        assert!(r.is_feasible(), "{:?}", r.violations);
        assert!(r.per_demand_times.is_empty());
        assert_eq!(makespan(&t4(), &columns()), 2.0);
        assert!(active_demands(&t4(), &columns()).is_empty());
    }

    #[test]
    fn single_region_takes_everything() {
        assert_eq!(makespan(&t4(), &all_on_d1()), 4.0);
        let d = active_demands(&t4(), &all_on_d1());
        assert_eq!(d, vec![Demand { source: 1, target: 0, volume: 2.0 }]);
    }

    #[test]
    fn dropped_photo_is_named() {
        let mut sol = columns();
        sol.regions[1].members = vec![3];
        let r = validate(&t4(), &sol).unwrap();
        assert!(!r.coverage_ok);
        assert!(r.violations.iter().any(|v| v.contains("p3")), "{:?}", r.violations);
        assert!(!r.convexity_ok);
    }

    #[test]
    fn corners_inside_full_boundary_violate_convexity() {
        let inst = crate::instance::generate_grid_instance(&crate::instance::GridSpec {
            rows: 4,
            cols: 4,
            drones: 1,
            capable_count: 1,
            ..Default::default()
        })
        .unwrap();
        let corners = vec![0, 3, 12, 15];
        let sol = CapsacSolution {
            regions: vec![Region { boundary: Some(Boundary { left: 0, right: 3, bottom: 0, top: 3 }), members: corners, drones: vec![0] }],
            objective: 0.0,
        };
        let r = validate(&inst, &sol).unwrap();
        assert!(!r.convexity_ok);
        assert!(!r.coverage_ok);
    }

    #[test]
    fn duplicates_count_twice() {
        let mut sol = all_on_d1();
        sol.regions[1] = Region { boundary: Some(Boundary { left: 1, right: 1, bottom: 0, top: 0 }), members: vec![2], drones: vec![0] };
        assert_eq!(makespan(&t4(), &sol), 5.0);
        assert_eq!(physical_makespan(&t4(), &sol), 4.0);
        let d = active_demands(&t4(), &sol);
        assert_eq!(d[0].volume, 3.0);
    }

    #[test]
    fn deadline_violation_is_reported() {
        let inst = t4().with_t_hat(Deadline::Seconds(1.5));
        let r = validate(&inst, &all_on_d1()).unwrap();
        // 2 MB over a 1 MB/s link
        assert_eq!(r.per_demand_times[&("d2".to_string(), "d1".to_string())], 2.0);
        assert!(!r.transmission_ok);
        assert!(validate(&t4().with_t_hat(Deadline::Seconds(2.0)), &all_on_d1()).unwrap().transmission_ok);
    }
}
