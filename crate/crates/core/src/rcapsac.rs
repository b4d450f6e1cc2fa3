//! Region-based formulation over an explicit catalog of rectangular subsets.
//!
//! Variables: `o_s{s}` (subset selected), `q_s{s}_d{d}` (subset on capable
//! drone `d`), `tmax`, plus the transfer variables when the deadline is bounded.

use fixedbitset::FixedBitSet;

use crate::error::{Error, Result};
use crate::geometry::{enumerate_rectangles_with, Boundary, CoordinateAxes, Rectangle};
use crate::instance::{Deadline, Instance};
use crate::milp::{LinearModel, ModelSolution, Sense, VarId};
use crate::par::Execution;
use crate::pcapsac::{binary, solution_values};
use crate::solution::{CapsacSolution, Region};
use crate::transfer::{add_transfer_block, TransferIndex};

#[derive(Debug, Clone, PartialEq)]
pub struct CatalogEntry {
    /// `None` for the empty subset.
    pub boundary: Option<Boundary>,
    pub members: Vec<usize>,
    /// Processing time of the subset.
    pub t: f64,
    /// Megabytes of the subset stored on each drone, indexed by drone.
    pub stored: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SubsetCatalog {
    pub entries: Vec<CatalogEntry>,
    /// Membership bitsets aligned with `entries`.
    pub cover: Vec<FixedBitSet>,
    pub num_photos: usize,
}

impl SubsetCatalog {
    /// Catalog over the deduplicated rectangles, with the empty subset appended if asked.
    pub fn build(inst: &Instance, empty_subset: bool) -> Result<Self> {
        Self::build_with(inst, empty_subset, Execution::default())
    }

    pub fn build_with(inst: &Instance, empty_subset: bool, exec: Execution) -> Result<Self> {
        let axes = CoordinateAxes::build(&inst.photos)?;
        let rects = enumerate_rectangles_with(&inst.photos, &axes, true, exec)?;
        Ok(Self::from_rectangles(inst, &rects, empty_subset))
    }

    pub fn from_rectangles(inst: &Instance, rects: &[Rectangle], empty_subset: bool) -> Self {
        let storage = inst.storage();
        let mut entries: Vec<CatalogEntry> = rects
            .iter()
            .map(|r| {
                let mut stored = vec![0.0; inst.drones.len()];
                for &p in &r.members {
                    stored[storage[p]] += inst.photos[p].mu;
                }
                CatalogEntry {
                    boundary: Some(r.boundary),
                    members: r.members.clone(),
                    t: r.members.iter().map(|&p| inst.photos[p].lambda).sum(),
                    stored,
                }
            })
            .collect();
        if empty_subset {
            entries.push(CatalogEntry { boundary: None, members: vec![], t: 0.0, stored: vec![0.0; inst.drones.len()] });
        }
        Self::from_entries(entries, inst.photos.len())
    }

    pub fn from_entries(entries: Vec<CatalogEntry>, num_photos: usize) -> Self {
        let cover = entries
            .iter()
            .map(|e| {
                let mut b = FixedBitSet::with_capacity(num_photos);
                for &p in &e.members {
                    b.insert(p);
                }
                b
            })
            .collect();
        SubsetCatalog { entries, cover, num_photos }
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn has_empty_subset(&self) -> bool {
        self.entries.iter().any(|e| e.members.is_empty())
    }

    /// Megabytes moved from `h` to `d` when subset `s` runs on `d`.
    pub fn mu(&self, s: usize, h: usize, d: usize) -> f64 {
        if h == d {
            0.0
        } else {
            self.entries[s].stored[h]
        }
    }

    /// Entries containing photo `p`.
    pub fn covering(&self, p: usize) -> Vec<usize> {
        (0..self.len()).filter(|&s| self.cover[s].contains(p)).collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RcapsacConfig {
    pub sigma: usize,
    pub t_hat: Deadline,
}

impl RcapsacConfig {
    pub fn for_instance(inst: &Instance) -> Self {
        RcapsacConfig { sigma: inst.sigma, t_hat: inst.t_hat }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RcapsacIndex {
    pub capable: Vec<usize>,
    pub o: Vec<VarId>,
    /// `q[s][j]` for drone `capable[j]`.
    pub q: Vec<Vec<VarId>>,
    pub tmax: VarId,
    pub transfer: Option<TransferIndex>,
}

pub fn build_rcapsac(inst: &Instance, catalog: &SubsetCatalog, cfg: &RcapsacConfig) -> Result<(LinearModel, RcapsacIndex)> {
    inst.validate()?;
    let capable = inst.capable_drones();
    let m = capable.len();
    if cfg.sigma == 0 || cfg.sigma > m {
        return Err(Error::Model(format!("sigma {} outside 1..={m}", cfg.sigma)));
    }
    if m > catalog.len() {
        return Err(Error::Model(format!(
            "cannot select {m} distinct subsets from a catalog of {}",
            catalog.len()
        )));
    }
    let ns = catalog.len();
    let mut model = LinearModel::new();
    let o = (0..ns).map(|s| model.add_binary(format!("o_s{s}"))).collect::<Result<Vec<_>>>()?;
    let q = (0..ns)
        .map(|s| capable.iter().map(|&d| model.add_binary(format!("q_s{s}_d{d}"))).collect())
        .collect::<Result<Vec<Vec<_>>>>()?;
    let tmax = model.add_continuous("tmax", 0.0, f64::INFINITY)?;

    for (j, &d) in capable.iter().enumerate() {
        let mut terms = vec![(tmax, 1.0)];
        terms.extend((0..ns).filter(|&s| catalog.entries[s].t != 0.0).map(|s| (q[s][j], -catalog.entries[s].t)));
        model.add_constraint(format!("mk_d{d}"), terms, Sense::Ge, 0.0)?;
    }
    for s in 0..ns {
        let mut terms: Vec<(VarId, f64)> = q[s].iter().map(|&v| (v, 1.0)).collect();
        terms.push((o[s], -(cfg.sigma as f64)));
        model.add_constraint(format!("rel_s{s}"), terms, Sense::Ge, 0.0)?;
    }
    for p in 0..inst.photos.len() {
        let terms = catalog.covering(p).into_iter().map(|s| (o[s], 1.0)).collect();
        model.add_constraint(format!("cov_p{p}"), terms, Sense::Ge, 1.0)?;
    }
    model.add_constraint("card", o.iter().map(|&v| (v, 1.0)).collect(), Sense::Eq, m as f64)?;

    let transfer = match cfg.t_hat {
        Deadline::Unbounded => None,
        Deadline::Seconds(t_hat) => {
            // activation is weighted by megabytes too, so subsets moving under
            // 1 MB in total cannot switch a demand on
            let moved = |h: usize, d: usize| {
                let j = capable.iter().position(|&c| c == d).expect("target is capable");
                let data: Vec<(VarId, f64)> = (0..ns)
                    .filter_map(|s| {
                        let mu = catalog.mu(s, h, d);
                        (mu > 0.0).then(|| (q[s][j], mu))
                    })
                    .collect();
                (data.clone(), data)
            };
            Some(add_transfer_block(&mut model, inst, t_hat, moved)?)
        }
    };
    model.set_objective(vec![(tmax, 1.0)]);
    Ok((model, RcapsacIndex { capable, o, q, tmax, transfer }))
}

pub fn decode_rcapsac(sol: &ModelSolution, idx: &RcapsacIndex, catalog: &SubsetCatalog) -> Result<CapsacSolution> {
    let values = solution_values(sol)?;
    let mut regions = Vec::new();
    for (s, &ov) in idx.o.iter().enumerate() {
        if !binary(values, ov, &|| format!("o_s{s}"))? {
            continue;
        }
        let mut drones = Vec::new();
        for (j, &qv) in idx.q[s].iter().enumerate() {
            if binary(values, qv, &|| format!("q_s{s}_d{}", idx.capable[j]))? {
                drones.push(idx.capable[j]);
            }
        }
        let e = &catalog.entries[s];
        regions.push(Region { boundary: e.boundary, members: e.members.clone(), drones });
    }
    if regions.len() != idx.capable.len() {
        return Err(Error::Decode(format!(
            "{} subsets selected, expected {}",
            regions.len(),
            idx.capable.len()
        )));
    }
    let objective = sol.objective.unwrap_or(values[idx.tmax.0]);
    Ok(CapsacSolution { regions, objective })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::t4;
    use crate::milp::{SolveStats, SolveStatus};

    #[test]
    fn t4_catalog() {
        let c = SubsetCatalog::build(&t4(), false).unwrap();
        assert_eq!(c.len(), 9);
        let full = c.entries.iter().find(|e| e.members.len() == 4).unwrap();
        assert_eq!(full.t, 4.0);
        let left = c.entries.iter().position(|e| e.members == vec![0, 1]).unwrap();
        assert_eq!(c.entries[left].t, 2.0);
        assert_eq!(c.mu(left, 0, 1), 2.0);
        assert_eq!(c.mu(left, 1, 1), 0.0);
        let with_empty = SubsetCatalog::build(&t4(), true).unwrap();
        assert_eq!(with_empty.len(), 10);
        assert!(with_empty.has_empty_subset());
    }

    #[test]
    fn three_by_three_has_36() {
        let inst = crate::instance::generate_grid_instance(&crate::instance::GridSpec {
            rows: 3,
            cols: 3,
            ..Default::default()
        })
        .unwrap();
        assert_eq!(SubsetCatalog::build(&inst, false).unwrap().len(), 36);
        assert_eq!(SubsetCatalog::build(&inst, true).unwrap().len(), 37);
    }

    #[test]
    fn t4_model_shape() {
        let inst = t4();
        let c = SubsetCatalog::build(&inst, true).unwrap();
        let (m, idx) = build_rcapsac(&inst, &c, &RcapsacConfig::for_instance(&inst)).unwrap();
        assert_eq!(m.count_vars("o_"), 10);
        assert_eq!(m.count_vars("q_"), 20);
        assert_eq!(m.count_rows("rel_"), 10);
        assert_eq!(m.count_rows("cov_"), 4);
        assert!(idx.transfer.is_none());
        let bounded = RcapsacConfig { sigma: 1, t_hat: Deadline::Seconds(3.0) };
        let (m, _) = build_rcapsac(&inst, &c, &bounded).unwrap();
        assert_eq!(m.count_rows("lat_"), 2);
        assert_eq!(m.count_rows("act_"), 2);
    }

    #[test]
    fn too_many_drones_for_catalog() {
        let inst = crate::instance::generate_grid_instance(&crate::instance::GridSpec {
            rows: 1,
            cols: 1,
            drones: 3,
            capable_count: 3,
            ..Default::default()
        })
        .unwrap();
        let c = SubsetCatalog::build(&inst, true).unwrap();
        assert!(build_rcapsac(&inst, &c, &RcapsacConfig::for_instance(&inst)).is_err());
    }

    #[test]
    fn decode_selection() {
        let inst = t4();
        let c = SubsetCatalog::build(&inst, true).unwrap();
        let (m, idx) = build_rcapsac(&inst, &c, &RcapsacConfig::for_instance(&inst)).unwrap();
        let full = c.entries.iter().position(|e| e.members.len() == 4).unwrap();
        let empty = c.len() - 1;
        let mut v = vec![0.0; m.vars().len()];
        for id in [idx.o[full], idx.q[full][0], idx.o[empty], idx.q[empty][1]] {
            v[id.0] = 1.0;
        }
        v[idx.tmax.0] = 4.0;
        assert!(m.max_violation(&v) < 1e-9);
        let sol = ModelSolution { status: SolveStatus::Optimal, objective: Some(4.0), values: Some(v), stats: SolveStats::default() };
        let dec = decode_rcapsac(&sol, &idx, &c).unwrap();
        assert_eq!(dec.regions.len(), 2);
        assert!(dec.regions[1].members.is_empty() && dec.regions[1].boundary.is_none());
        let none = ModelSolution { values: None, status: SolveStatus::Infeasible, ..sol };
        assert!(decode_rcapsac(&none, &idx, &c).is_err());
    }
}
