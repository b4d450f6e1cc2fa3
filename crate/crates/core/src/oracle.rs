//! Exact optimum by enumeration, for desk-scale instances.
//!
//! Candidate coverings are `m`-multisets of catalog entries whose union is the
//! whole photo set. Each covering is tried with every assignment of its
//! regions to `sigma`-subsets of capable drones; with a bounded deadline the
//! MMF transfer times of the implied demands are checked too. Accounting is
//! formulation-literal (see [`crate::eval::makespan`]).
//!
//! With `sigma = 1` and no deadline the assignment part collapses: giving
//! every region its own drone is optimal, so the optimum is the smallest
//! threshold `t` such that `m` entries of time at most `t` cover the photos.
//! That case is solved by a cover search per threshold instead.

use std::collections::BTreeMap;

use fixedbitset::FixedBitSet;

use crate::error::{Error, Result};
use crate::eval::within_deadline;
use crate::instance::{Deadline, Instance};
use crate::network::{DroneTree, MmfCache};
use crate::par::{self, Execution};
use crate::rcapsac::SubsetCatalog;
use crate::solution::{CapsacSolution, Region};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct OracleLimits {
    pub max_catalog: usize,
    /// Bound on (multisets x assignments) for the exhaustive path.
    pub max_combinations: u128,
}

impl Default for OracleLimits {
    fn default() -> Self {
        OracleLimits { max_catalog: 2_000, max_combinations: 200_000_000 }
    }
}

/// Optimum over the deduplicated rectangle catalog plus the empty subset.
///
/// `Ok(None)` means no covering meets the deadline.
pub fn brute_force_optimum(inst: &Instance, limits: &OracleLimits) -> Result<Option<CapsacSolution>> {
    brute_force_optimum_with(inst, limits, Execution::default())
}

pub fn brute_force_optimum_with(inst: &Instance, limits: &OracleLimits, exec: Execution) -> Result<Option<CapsacSolution>> {
    inst.validate()?;
    let catalog = SubsetCatalog::build_with(inst, true, exec)?;
    optimum_over_catalog(inst, &catalog, limits, exec)
}

/// Optimum over an explicit catalog, whose entry times need not be photo sums.
pub fn optimum_over_catalog(
    inst: &Instance,
    catalog: &SubsetCatalog,
    limits: &OracleLimits,
    exec: Execution,
) -> Result<Option<CapsacSolution>> {
    if catalog.len() > limits.max_catalog {
        return Err(Error::OracleLimit {
            what: "catalog entries",
            bound: catalog.len() as u128,
            limit: limits.max_catalog as u128,
        });
    }
    if inst.sigma == 1 && !inst.t_hat.is_bounded() {
        Ok(threshold_cover(inst, catalog))
    } else {
        exhaustive(inst, catalog, limits, exec)
    }
}

fn binomial(n: u128, k: u128) -> u128 {
    let mut r: u128 = 1;
    for i in 0..k {
        r = r.saturating_mul(n - i) / (i + 1);
    }
    r
}

/// Upper bound on the exhaustive enumeration size.
pub fn combination_bound(catalog_len: usize, m: usize, sigma: usize) -> u128 {
    let multisets = binomial((catalog_len + m).saturating_sub(1) as u128, m as u128);
    let per_region = binomial(m as u128, sigma as u128);
    (0..m).fold(multisets, |acc, _| acc.saturating_mul(per_region))
}

fn k_subsets(items: &[usize], k: usize) -> Vec<Vec<usize>> {
    fn rec(items: &[usize], k: usize, start: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..items.len() {
            cur.push(items[i]);
            rec(items, k, i + 1, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(items, k, 0, &mut Vec::new(), &mut out);
    out
}

fn to_solution(catalog: &SubsetCatalog, picks: &[usize], drones: &[Vec<usize>], objective: f64) -> CapsacSolution {
    let regions = picks
        .iter()
        .zip(drones)
        .map(|(&s, ds)| {
            let e = &catalog.entries[s];
            Region { boundary: e.boundary, members: e.members.clone(), drones: ds.clone() }
        })
        .collect();
    CapsacSolution { regions, objective }
}

fn threshold_cover(inst: &Instance, catalog: &SubsetCatalog) -> Option<CapsacSolution> {
    let m = inst.m();
    let mut thresholds: Vec<f64> = catalog.entries.iter().filter(|e| !e.members.is_empty()).map(|e| e.t).collect();
    thresholds.sort_by(f64::total_cmp);
    thresholds.dedup();
    let pad = (0..catalog.len()).min_by(|&a, &b| catalog.entries[a].t.total_cmp(&catalog.entries[b].t))?;
    for theta in thresholds {
        let usable: Vec<usize> =
            (0..catalog.len()).filter(|&s| !catalog.entries[s].members.is_empty() && catalog.entries[s].t <= theta).collect();
        let mut covered = FixedBitSet::with_capacity(catalog.num_photos);
        let mut picks = Vec::new();
        if cover_dfs(catalog, &usable, m, &mut covered, &mut picks) {
            while picks.len() < m {
                picks.push(pad);
            }
            let capable = inst.capable_drones();
            let drones: Vec<Vec<usize>> = capable.iter().map(|&d| vec![d]).collect();
            let objective = picks.iter().map(|&s| catalog.entries[s].t).fold(0.0, f64::max);
            return Some(to_solution(catalog, &picks, &drones, objective));
        }
    }
    None
}

fn cover_dfs(catalog: &SubsetCatalog, usable: &[usize], budget: usize, covered: &mut FixedBitSet, picks: &mut Vec<usize>) -> bool {
    let first = (0..catalog.num_photos).find(|&p| !covered.contains(p));
    let Some(p) = first else { return true };
    if picks.len() == budget {
        return false;
    }
    for &s in usable {
        if !catalog.cover[s].contains(p) {
            continue;
        }
        let before = covered.clone();
        covered.union_with(&catalog.cover[s]);
        picks.push(s);
        if cover_dfs(catalog, usable, budget, covered, picks) {
            return true;
        }
        picks.pop();
        *covered = before;
    }
    false
}

type Candidate = (f64, Vec<usize>, Vec<usize>);

fn better(a: &Candidate, b: &Option<Candidate>) -> bool {
    match b {
        None => true,
        Some(b) => a.0 < b.0 || (a.0 == b.0 && (&a.1, &a.2) < (&b.1, &b.2)),
    }
}

struct Search<'a> {
    inst: &'a Instance,
    catalog: &'a SubsetCatalog,
    tree: Option<DroneTree>,
    combos: Vec<Vec<usize>>,
    m: usize,
}

impl Search<'_> {
    fn multisets(&self, picks: &mut Vec<usize>, covered: &FixedBitSet, best: &mut Option<Candidate>, cache: &mut MmfCache) -> Result<()> {
        if picks.len() == self.m {
            if covered.count_ones(..) == self.catalog.num_photos {
                self.assignments(picks, best, cache)?;
            }
            return Ok(());
        }
        let start = *picks.last().expect("outermost pick is fixed by the caller");
        for s in start..self.catalog.len() {
            if let Some(b) = best {
                if self.catalog.entries[s].t > b.0 {
                    continue;
                }
            }
            let mut next = covered.clone();
            next.union_with(&self.catalog.cover[s]);
            picks.push(s);
            self.multisets(picks, &next, best, cache)?;
            picks.pop();
        }
        Ok(())
    }

    fn assignments(&self, picks: &[usize], best: &mut Option<Candidate>, cache: &mut MmfCache) -> Result<()> {
        let nd = self.inst.drones.len();
        let radix = self.combos.len();
        let mut choice = vec![0usize; self.m];
        loop {
            let mut load = vec![0.0; nd];
            for (r, &s) in picks.iter().enumerate() {
                for &d in &self.combos[choice[r]] {
                    load[d] += self.catalog.entries[s].t;
                }
            }
            let makespan = load.into_iter().fold(0.0, f64::max);
            let candidate = (makespan, picks.to_vec(), choice.clone());
            if better(&candidate, best) && self.meets_deadline(picks, &choice, cache)? {
                *best = Some(candidate);
            }
            // mixed-radix increment, last digit fastest
            let mut i = self.m;
            loop {
                if i == 0 {
                    return Ok(());
                }
                i -= 1;
                choice[i] += 1;
                if choice[i] < radix {
                    break;
                }
                choice[i] = 0;
            }
        }
    }

    fn meets_deadline(&self, picks: &[usize], choice: &[usize], cache: &mut MmfCache) -> Result<bool> {
        let (Deadline::Seconds(limit), Some(tree)) = (self.inst.t_hat, &self.tree) else {
            return Ok(true);
        };
        let mut volume: BTreeMap<(usize, usize), f64> = BTreeMap::new();
        for (r, &s) in picks.iter().enumerate() {
            for &d in &self.combos[choice[r]] {
                for h in 0..self.inst.drones.len() {
                    let mu = self.catalog.mu(s, h, d);
                    if mu > 0.0 {
                        *volume.entry((h, d)).or_insert(0.0) += mu;
                    }
                }
            }
        }
        if volume.is_empty() {
            return Ok(true);
        }
        let pairs: Vec<(usize, usize)> = volume.keys().copied().collect();
        let rates = cache.rates(tree, &pairs)?;
        Ok(volume.values().zip(rates).all(|(v, r)| within_deadline(v / r, limit)))
    }
}

pub(crate) fn exhaustive(
    inst: &Instance,
    catalog: &SubsetCatalog,
    limits: &OracleLimits,
    exec: Execution,
) -> Result<Option<CapsacSolution>> {
    let capable = inst.capable_drones();
    let m = capable.len();
    let bound = combination_bound(catalog.len(), m, inst.sigma);
    if bound > limits.max_combinations {
        return Err(Error::OracleLimit { what: "combinations", bound, limit: limits.max_combinations });
    }
    let tree = if inst.t_hat.is_bounded() { Some(DroneTree::from_instance(inst)?) } else { None };
    let search = Search { inst, catalog, tree, combos: k_subsets(&capable, inst.sigma), m };
    let per_first = par::map_range(exec, catalog.len(), |s| -> Result<Option<Candidate>> {
        let mut best = None;
        let mut cache = MmfCache::new();
        search.multisets(&mut vec![s], &catalog.cover[s], &mut best, &mut cache)?;
        Ok(best)
    });
    let mut best: Option<Candidate> = None;
    for r in per_first {
        if let Some(c) = r? {
            if better(&c, &best) {
                best = Some(c);
            }
        }
    }
    Ok(best.map(|(obj, picks, choice)| {
        let drones: Vec<Vec<usize>> = choice.iter().map(|&c| search.combos[c].clone()).collect();
        to_solution(catalog, &picks, &drones, obj)
    }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::eval::{makespan, validate};
    use crate::fixtures::t4;
    use crate::instance::{generate_grid_instance, GridSpec};

    fn limits() -> OracleLimits {
        OracleLimits::default()
    }

    #[test]
    fn t4_optimum() {
        let sol = brute_force_optimum(&t4(), &limits()).unwrap().unwrap();
        assert_eq!(sol.objective, 2.0);
        assert!(validate(&t4(), &sol).unwrap().is_feasible());
        assert_eq!(makespan(&t4(), &sol), 2.0);
    }

    #[test]
    fn t4_sigma_two() {
        let inst = t4().with_sigma(2);
        let sol = brute_force_optimum(&inst, &limits()).unwrap().unwrap();
        assert_eq!(sol.objective, 4.0);
        assert!(sol.regions.iter().all(|r| r.drones == vec![0, 1]));
    }

    #[test]
    fn single_photo_two_drones() {
        let mut inst = generate_grid_instance(&GridSpec { rows: 1, cols: 1, drones: 2, capable_count: 2, ..Default::default() }).unwrap();
        inst.photos[0].lambda = 5.0;
        assert_eq!(brute_force_optimum(&inst, &limits()).unwrap().unwrap().objective, 5.0);
    }

    #[test]
    fn fast_path_matches_exhaustive() {
        for seed in 0..6 {
            let mut inst = generate_grid_instance(&GridSpec { rows: 2, cols: 3, drones: 3, capable_count: 2 + seed as usize % 2, seed, ..Default::default() }).unwrap();
            for (k, p) in inst.photos.iter_mut().enumerate() {
                p.lambda = 1.0 + ((k as u64 * 7 + seed) % 5) as f64;
            }
            let cat = SubsetCatalog::build(&inst, true).unwrap();
            let fast = optimum_over_catalog(&inst, &cat, &limits(), Execution::Sequential).unwrap().unwrap();
            let full = exhaustive(&inst, &cat, &limits(), Execution::Parallel).unwrap().unwrap();
            assert_eq!(fast.objective, full.objective, "seed {seed}");
            assert_eq!(makespan(&inst, &fast), fast.objective);
        }
    }

    #[test]
    fn parallel_and_sequential_agree() {
        let inst = t4().with_t_hat(Deadline::Seconds(2.5)).with_sigma(1);
        let cat = SubsetCatalog::build(&inst, true).unwrap();
        let a = exhaustive(&inst, &cat, &limits(), Execution::Sequential).unwrap();
        let b = exhaustive(&inst, &cat, &limits(), Execution::Parallel).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn deadline_infeasible_and_monotone() {
        // all photos of T4 on d1 forces a transfer of p3, p4 from d2
        let mut inst = t4();
        inst.drones[1].capable = false;
        let loose = brute_force_optimum(&inst.with_t_hat(Deadline::Seconds(2.0)), &limits()).unwrap().unwrap();
        assert_eq!(loose.objective, 4.0);
        assert!(brute_force_optimum(&inst.with_t_hat(Deadline::Seconds(1.9)), &limits()).unwrap().is_none());
    }

    #[test]
    fn limits_are_reported() {
        let err = brute_force_optimum(&t4(), &OracleLimits { max_catalog: 3, max_combinations: 10 }).unwrap_err();
        assert!(matches!(err, Error::OracleLimit { what: "catalog entries", bound: 10, .. }));
        let err = brute_force_optimum(&t4().with_sigma(2), &OracleLimits { max_catalog: 100, max_combinations: 10 }).unwrap_err();
        assert!(matches!(err, Error::OracleLimit { what: "combinations", .. }));
    }

    #[test]
    fn bound_formula() {
        assert_eq!(combination_bound(10, 2, 1), 55 * 4);
        assert_eq!(k_subsets(&[0, 1, 2], 2), vec![vec![0, 1], vec![0, 2], vec![1, 2]]);
    }
}
