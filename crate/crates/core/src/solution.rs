//! Covering-assignment solutions and their JSON document form.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{Boundary, CoordinateAxes};
use crate::instance::Instance;

/// One sub-region: its borders, the photos it holds and the drones processing it.
#[derive(Debug, Clone, PartialEq)]
pub struct Region {
    /// `None` for an empty region.
    pub boundary: Option<Boundary>,
    /// Photo indices, ascending.
    pub members: Vec<usize>,
    /// Drone indices (capable drones), ascending.
    pub drones: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CapsacSolution {
    pub regions: Vec<Region>,
    /// Makespan in seconds as reported by whoever produced the solution.
    pub objective: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundaryDoc {
    pub left: f64,
    pub right: f64,
    pub bottom: f64,
    pub top: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegionDoc {
    pub boundary: Option<BoundaryDoc>,
    pub photos: Vec<String>,
    pub drones: Vec<String>,
}

/// Solution document: regions with boundary coordinates, member ids and drone ids.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolutionDoc {
    pub objective: f64,
    pub regions: Vec<RegionDoc>,
}

impl CapsacSolution {
    pub fn to_doc(&self, inst: &Instance) -> Result<SolutionDoc> {
        let axes = CoordinateAxes::build(&inst.photos)?;
        let regions = self
            .regions
            .iter()
            .map(|r| RegionDoc {
                boundary: r.boundary.map(|b| BoundaryDoc {
                    left: axes.lngs[b.left],
                    right: axes.lngs[b.right],
                    bottom: axes.lats[b.bottom],
                    top: axes.lats[b.top],
                }),
                photos: r.members.iter().map(|&k| inst.photos[k].id.clone()).collect(),
                drones: r.drones.iter().map(|&d| inst.drones[d].id.clone()).collect(),
            })
            .collect();
        Ok(SolutionDoc { objective: self.objective, regions })
    }

    pub fn from_doc(doc: &SolutionDoc, inst: &Instance) -> Result<Self> {
        let axes = CoordinateAxes::build(&inst.photos)?;
        let regions = doc
            .regions
            .iter()
            .enumerate()
            .map(|(i, r)| {
                let boundary = r
                    .boundary
                    .as_ref()
                    .map(|b| -> Result<Boundary> {
                        Ok(Boundary {
                            left: axes.lng_index(b.left)?,
                            right: axes.lng_index(b.right)?,
                            bottom: axes.lat_index(b.bottom)?,
                            top: axes.lat_index(b.top)?,
                        })
                    })
                    .transpose()?;
                let mut members = r
                    .photos
                    .iter()
                    .map(|id| {
                        inst.photo_index(id)
                            .ok_or_else(|| Error::Decode(format!("regions[{i}]: unknown photo `{id}`")))
                    })
                    .collect::<Result<Vec<_>>>()?;
                let mut drones = r
                    .drones
                    .iter()
                    .map(|id| {
                        inst.drone_index(id)
                            .ok_or_else(|| Error::Decode(format!("regions[{i}]: unknown drone `{id}`")))
                    })
                    .collect::<Result<Vec<_>>>()?;
                members.sort_unstable();
                drones.sort_unstable();
                Ok(Region { boundary, members, drones })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(CapsacSolution { regions, objective: doc.objective })
    }

    pub fn to_json(&self, inst: &Instance) -> Result<String> {
        let mut s = serde_json::to_string_pretty(&self.to_doc(inst)?)?;
        s.push('\n');
        Ok(s)
    }

    pub fn from_json(text: &str, inst: &Instance) -> Result<Self> {
        let doc: SolutionDoc = serde_json::from_str(text)?;
        Self::from_doc(&doc, inst)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::t4;

    #[test]
    fn document_round_trip() {
        let inst = t4();
        let sol = CapsacSolution {
            regions: vec![
                Region {
                    boundary: Some(Boundary { left: 0, right: 0, bottom: 0, top: 1 }),
                    members: vec![0, 1],
                    drones: vec![0],
                },
                Region { boundary: None, members: vec![], drones: vec![1] },
            ],
            objective: 2.0,
        };
        let json = sol.to_json(&inst).unwrap();
        assert!(json.contains("\"p1\""));
        assert_eq!(CapsacSolution::from_json(&json, &inst).unwrap(), sol);
    }
}
