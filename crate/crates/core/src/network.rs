//! Routing on the drone tree and max-min-fair rate allocation.
//!
//! Every pair of drones is joined by exactly one simple path. Link capacity
//! is shared by both directions. Given a set of active demands, the MMF
//! allocation is computed by progressive filling: all unfrozen rates rise
//! together until some link saturates, the demands crossing it freeze with
//! that link as their bottleneck, and the process repeats.

use std::collections::{HashMap, VecDeque};

use crate::error::{Error, Result};
use crate::instance::Instance;

/// Relative slack used to decide that a link is saturated.
pub const SATURATION_TOL: f64 = 1e-9;

#[derive(Debug, Clone)]
pub struct DroneTree {
    n: usize,
    /// `(a, b, capacity)` per link, endpoints as drone indices.
    links: Vec<(usize, usize, f64)>,
    /// `(neighbour, link index)` per drone.
    adjacency: Vec<Vec<(usize, usize)>>,
}

impl DroneTree {
    pub fn new(n: usize, links: Vec<(usize, usize, f64)>) -> Result<Self> {
        let mut adjacency = vec![Vec::new(); n];
        for (i, &(a, b, c)) in links.iter().enumerate() {
            if a >= n || b >= n || a == b {
                return Err(Error::Network(format!("bad link {i}: ({a}, {b})")));
            }
            if !(c > 0.0) {
                return Err(Error::Network(format!("link {i} has non-positive capacity")));
            }
            adjacency[a].push((b, i));
            adjacency[b].push((a, i));
        }
        if links.len() + 1 != n.max(1) {
            return Err(Error::Network("network is not a tree".into()));
        }
        let tree = DroneTree { n, links, adjacency };
        if n > 0 && tree.reachable_from(0).iter().any(|r| !r) {
            return Err(Error::Network("network is not a tree".into()));
        }
        Ok(tree)
    }

    pub fn from_instance(inst: &Instance) -> Result<Self> {
        let idx = |id: &str| {
            inst.drone_index(id)
                .ok_or_else(|| Error::Network(format!("unknown drone `{id}`")))
        };
        let links = inst
            .links
            .iter()
            .map(|l| Ok((idx(&l.a)?, idx(&l.b)?, l.capacity)))
            .collect::<Result<Vec<_>>>()?;
        DroneTree::new(inst.drones.len(), links)
    }

    pub fn num_drones(&self) -> usize {
        self.n
    }

    pub fn num_links(&self) -> usize {
        self.links.len()
    }

    pub fn link(&self, i: usize) -> (usize, usize, f64) {
        self.links[i]
    }

    pub fn capacity(&self, link: usize) -> f64 {
        self.links[link].2
    }

    fn reachable_from(&self, s: usize) -> Vec<bool> {
        let mut seen = vec![false; self.n];
        let mut queue = VecDeque::from([s]);
        seen[s] = true;
        while let Some(u) = queue.pop_front() {
            for &(v, _) in &self.adjacency[u] {
                if !seen[v] {
                    seen[v] = true;
                    queue.push_back(v);
                }
            }
        }
        seen
    }

    /// Link indices of the unique simple path from `h` to `d`, in travel order.
    pub fn unique_path(&self, h: usize, d: usize) -> Result<Vec<usize>> {
        if h >= self.n || d >= self.n {
            return Err(Error::Network(format!("drone index out of range ({h}, {d})")));
        }
        if h == d {
            return Ok(Vec::new());
        }
        let mut via: Vec<Option<(usize, usize)>> = vec![None; self.n];
        let mut queue = VecDeque::from([h]);
        let mut seen = vec![false; self.n];
        seen[h] = true;
        while let Some(u) = queue.pop_front() {
            if u == d {
                break;
            }
            for &(v, l) in &self.adjacency[u] {
                if !seen[v] {
                    seen[v] = true;
                    via[v] = Some((u, l));
                    queue.push_back(v);
                }
            }
        }
        let mut path = Vec::new();
        let mut cur = d;
        while cur != h {
            let (prev, l) = via[cur].ok_or_else(|| Error::Network(format!("no path {h} -> {d}")))?;
            path.push(l);
            cur = prev;
        }
        path.reverse();
        Ok(path)
    }

    /// Smallest capacity on the path from `h` to `d`; undefined for `h == d`.
    pub fn bottleneck_capacity(&self, h: usize, d: usize) -> Result<f64> {
        if h == d {
            return Err(Error::Network("bottleneck capacity of a self demand is undefined".into()));
        }
        Ok(self
            .unique_path(h, d)?
            .into_iter()
            .map(|l| self.capacity(l))
            .fold(f64::INFINITY, f64::min))
    }
}

/// Traffic from storing drone `source` to processing drone `target`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Demand {
    pub source: usize,
    pub target: usize,
    /// Megabytes to transfer.
    pub volume: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RateAllocation {
    /// Megabytes per second, aligned with the input demands.
    pub rates: Vec<f64>,
    /// Witness bottleneck link per demand.
    pub bottlenecks: Vec<usize>,
    /// Path (link indices) per demand.
    pub paths: Vec<Vec<usize>>,
}

/// Max-min-fair rates by progressive filling.
///
/// Every demand must be active (`volume > 0`, `source != target`).
pub fn mmf_allocate(tree: &DroneTree, demands: &[Demand]) -> Result<RateAllocation> {
    let paths = demands
        .iter()
        .map(|d| {
            if d.source == d.target || !(d.volume > 0.0) {
                return Err(Error::Network(format!(
                    "inactive demand {} -> {} (volume {})",
                    d.source, d.target, d.volume
                )));
            }
            tree.unique_path(d.source, d.target)
        })
        .collect::<Result<Vec<_>>>()?;

    let nl = tree.num_links();
    let mut residual: Vec<f64> = (0..nl).map(|l| tree.capacity(l)).collect();
    let mut crossing: Vec<Vec<usize>> = vec![Vec::new(); nl];
    for (k, path) in paths.iter().enumerate() {
        for &l in path {
            crossing[l].push(k);
        }
    }
    let mut rates = vec![0.0; demands.len()];
    let mut bottlenecks = vec![usize::MAX; demands.len()];
    let mut frozen = vec![false; demands.len()];
    let mut saturated = vec![false; nl];
    let mut remaining = demands.len();

    while remaining > 0 {
        let unfrozen_on = |l: usize| crossing[l].iter().filter(|&&k| !frozen[k]).count();
        let mut delta = f64::INFINITY;
        for l in 0..nl {
            let n = unfrozen_on(l);
            if n > 0 && !saturated[l] {
                delta = delta.min(residual[l] / n as f64);
            }
        }
        debug_assert!(delta.is_finite());
        let counts: Vec<usize> = (0..nl).map(unfrozen_on).collect();
        for k in 0..demands.len() {
            if !frozen[k] {
                rates[k] += delta;
            }
        }
        for l in 0..nl {
            if counts[l] > 0 && !saturated[l] {
                residual[l] -= delta * counts[l] as f64;
                if residual[l] <= SATURATION_TOL * tree.capacity(l) {
                    residual[l] = 0.0;
                    saturated[l] = true;
                }
            }
        }
        // links are visited in index order, so the witness is the lowest saturated index
        for l in 0..nl {
            if !saturated[l] {
                continue;
            }
            for &k in &crossing[l] {
                if !frozen[k] {
                    frozen[k] = true;
                    bottlenecks[k] = l;
                    remaining -= 1;
                }
            }
        }
    }
    Ok(RateAllocation { rates, bottlenecks, paths })
}

/// Seconds needed per demand at the allocated rates (`volume / rate`).
pub fn transmission_times(alloc: &RateAllocation, demands: &[Demand]) -> Result<Vec<f64>> {
    demands
        .iter()
        .zip(&alloc.rates)
        .map(|(d, &r)| {
            if r > 0.0 {
                Ok(d.volume / r)
            } else {
                Err(Error::Network(format!("zero rate for demand {} -> {}", d.source, d.target)))
            }
        })
        .collect()
}

/// Memoised MMF rates keyed by the sorted set of active `(source, target)` pairs.
///
/// Rates depend only on the active set and the topology, never on volumes.
#[derive(Debug, Default)]
pub struct MmfCache {
    rates: HashMap<Vec<(usize, usize)>, Vec<f64>>,
}

impl MmfCache {
    pub fn new() -> Self {
        Self::default()
    }

    /// Rates for `pairs`, which must be sorted and distinct.
    pub fn rates(&mut self, tree: &DroneTree, pairs: &[(usize, usize)]) -> Result<&[f64]> {
        if !self.rates.contains_key(pairs) {
            let demands: Vec<Demand> = pairs
                .iter()
                .map(|&(source, target)| Demand { source, target, volume: 1.0 })
                .collect();
            let alloc = mmf_allocate(tree, &demands)?;
            self.rates.insert(pairs.to_vec(), alloc.rates);
        }
        Ok(&self.rates[pairs])
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn chain(c12: f64, c23: f64) -> DroneTree {
        DroneTree::new(3, vec![(0, 1, c12), (1, 2, c23)]).unwrap()
    }

    fn demand(source: usize, target: usize) -> Demand {
        Demand { source, target, volume: 1.0 }
    }

    #[test]
    fn paths() {
        let t = chain(4.0, 2.0);
        assert_eq!(t.unique_path(0, 2).unwrap(), vec![0, 1]);
        assert_eq!(t.unique_path(2, 0).unwrap(), vec![1, 0]);
        assert!(t.unique_path(1, 1).unwrap().is_empty());
        let star = DroneTree::new(3, vec![(0, 1, 1.0), (0, 2, 1.0)]).unwrap();
        assert_eq!(star.unique_path(1, 2).unwrap(), vec![0, 1]);
        assert!(t.unique_path(0, 7).is_err());
    }

    #[test]
    fn non_trees_are_rejected() {
        assert!(DroneTree::new(2, vec![(0, 1, 1.0), (1, 0, 1.0)]).is_err());
        assert!(DroneTree::new(4, vec![(0, 1, 1.0), (1, 0, 1.0), (2, 3, 1.0)]).is_err());
    }

    #[test]
    fn bottlenecks() {
        let t = chain(4.0, 2.0);
        assert_eq!(t.bottleneck_capacity(0, 2).unwrap(), 2.0);
        assert_eq!(t.bottleneck_capacity(0, 1).unwrap(), 4.0);
        assert!(t.bottleneck_capacity(1, 1).is_err());
        let single = DroneTree::new(2, vec![(0, 1, 10.0)]).unwrap();
        assert_eq!(single.bottleneck_capacity(1, 0).unwrap(), 10.0);
    }

    #[test]
    fn shared_bottleneck() {
        let a = mmf_allocate(&chain(4.0, 2.0), &[demand(0, 2), demand(1, 2)]).unwrap();
        assert_eq!(a.rates, vec![1.0, 1.0]);
        assert_eq!(a.bottlenecks, vec![1, 1]);
    }

    #[test]
    fn both_limited() {
        let a = mmf_allocate(&chain(4.0, 2.0), &[demand(0, 1), demand(0, 2)]).unwrap();
        assert_eq!(a.rates, vec![2.0, 2.0]);
    }

    #[test]
    fn two_level_filling() {
        let a = mmf_allocate(&chain(4.0, 1.0), &[demand(0, 1), demand(0, 2)]).unwrap();
        assert_eq!(a.rates, vec![3.0, 1.0]);
        assert_eq!(a.bottlenecks, vec![0, 1]);
    }

    #[test]
    fn times() {
        let a = mmf_allocate(&chain(4.0, 1.0), &[demand(0, 1), demand(0, 2)]).unwrap();
        let ds = [Demand { volume: 6.0, ..demand(0, 1) }, Demand { volume: 6.0, ..demand(0, 2) }];
        assert_eq!(transmission_times(&a, &ds).unwrap(), vec![2.0, 6.0]);
        let single = DroneTree::new(2, vec![(0, 1, 2.0)]).unwrap();
        let d = [Demand { source: 0, target: 1, volume: 10.0 }];
        let a = mmf_allocate(&single, &d).unwrap();
        assert_eq!(transmission_times(&a, &d).unwrap(), vec![5.0]);
    }

    #[test]
    fn inactive_demands_are_rejected() {
        assert!(mmf_allocate(&chain(1.0, 1.0), &[demand(1, 1)]).is_err());
        assert!(mmf_allocate(&chain(1.0, 1.0), &[Demand { volume: 0.0, ..demand(0, 1) }]).is_err());
    }

    #[test]
    fn cache_matches_direct_allocation() {
        let t = chain(4.0, 1.0);
        let mut cache = MmfCache::new();
        assert_eq!(cache.rates(&t, &[(0, 1), (0, 2)]).unwrap(), &[3.0, 1.0]);
        assert_eq!(cache.rates(&t, &[(0, 1), (0, 2)]).unwrap(), &[3.0, 1.0]);
    }
}
