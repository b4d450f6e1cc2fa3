//! Photo-transfer rows shared by both formulations: demand activation, rate
//! bound, deadline and the max-min-fair block.
//!
//! For every demand `(h, d)` with `h` any drone, `d` capable and `h != d`:
//!
//! ```text
//! act   z <= (photos moved from h to d)
//! rate  phi <= cbar * z
//! lat   T * phi >= (megabytes moved from h to d)
//! ```
//!
//! and the MMF block over the tree links `l` on the demand's path:
//!
//! ```text
//! cap    sum phi over demands crossing l <= c_l
//! umax   u_l >= phi
//! bneck  sum_l w_l >= z
//! wz     w_l <= z
//! sat    sum phi over demands crossing l >= c_l * w_l
//! fair   phi >= u_l - c_l * (1 - w_l)
//! ```

use crate::error::Result;
use crate::instance::Instance;
use crate::milp::{LinearModel, Sense, VarId};
use crate::network::DroneTree;

#[derive(Debug, Clone, PartialEq)]
pub struct DemandVars {
    /// Storing drone index.
    pub source: usize,
    /// Processing (capable) drone index.
    pub target: usize,
    pub z: VarId,
    pub phi: VarId,
    /// `(link index, w variable)` for every link on the path.
    pub w: Vec<(usize, VarId)>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TransferIndex {
    pub demands: Vec<DemandVars>,
    /// One `u` per tree link.
    pub u: Vec<VarId>,
}

/// Demand pairs `(h, d)` in model order: by capable drone, then storing drone.
pub fn demand_pairs(inst: &Instance) -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    for d in inst.capable_drones() {
        for h in 0..inst.drones.len() {
            if h != d {
                out.push((h, d));
            }
        }
    }
    out
}

/// Adds the transfer rows. `moved(h, d)` returns `(count terms, megabyte terms)`.
pub(crate) fn add_transfer_block<F>(
    model: &mut LinearModel,
    inst: &Instance,
    t_hat: f64,
    moved: F,
) -> Result<TransferIndex>
where
    F: Fn(usize, usize) -> (Vec<(VarId, f64)>, Vec<(VarId, f64)>),
{
    let tree = DroneTree::from_instance(inst)?;
    let mut demands = Vec::new();
    for (h, d) in demand_pairs(inst) {
        let z = model.add_binary(format!("z_h{h}_d{d}"))?;
        let phi = model.add_continuous(format!("phi_h{h}_d{d}"), 0.0, f64::INFINITY)?;
        let (count, data) = moved(h, d);

        let mut act = vec![(z, 1.0)];
        act.extend(count.into_iter().map(|(v, c)| (v, -c)));
        model.add_constraint(format!("act_h{h}_d{d}"), act, Sense::Le, 0.0)?;

        let cbar = tree.bottleneck_capacity(h, d)?;
        model.add_constraint(format!("rate_h{h}_d{d}"), vec![(phi, 1.0), (z, -cbar)], Sense::Le, 0.0)?;

        let mut lat = vec![(phi, t_hat)];
        lat.extend(data.into_iter().map(|(v, c)| (v, -c)));
        model.add_constraint(format!("lat_h{h}_d{d}"), lat, Sense::Ge, 0.0)?;

        let mut w = Vec::new();
        for l in tree.unique_path(h, d)? {
            w.push((l, model.add_binary(format!("w_h{h}_d{d}_l{l}"))?));
        }
        demands.push(DemandVars { source: h, target: d, z, phi, w });
    }

    let nl = tree.num_links();
    let u = (0..nl)
        .map(|l| model.add_continuous(format!("u_l{l}"), 0.0, f64::INFINITY))
        .collect::<Result<Vec<_>>>()?;
    let mut crossing: Vec<Vec<VarId>> = vec![Vec::new(); nl];
    for dv in &demands {
        for &(l, _) in &dv.w {
            crossing[l].push(dv.phi);
        }
    }
    for l in 0..nl {
        let terms = crossing[l].iter().map(|&v| (v, 1.0)).collect();
        model.add_constraint(format!("cap_l{l}"), terms, Sense::Le, tree.capacity(l))?;
    }
    for dv in &demands {
        let (h, d) = (dv.source, dv.target);
        let mut bneck: Vec<(VarId, f64)> = dv.w.iter().map(|&(_, w)| (w, 1.0)).collect();
        bneck.push((dv.z, -1.0));
        model.add_constraint(format!("bneck_h{h}_d{d}"), bneck, Sense::Ge, 0.0)?;
        for &(l, w) in &dv.w {
            let c = tree.capacity(l);
            model.add_constraint(format!("umax_h{h}_d{d}_l{l}"), vec![(u[l], 1.0), (dv.phi, -1.0)], Sense::Ge, 0.0)?;
            model.add_constraint(format!("wz_h{h}_d{d}_l{l}"), vec![(w, 1.0), (dv.z, -1.0)], Sense::Le, 0.0)?;
            let mut sat: Vec<(VarId, f64)> = crossing[l].iter().map(|&v| (v, 1.0)).collect();
            sat.push((w, -c));
            model.add_constraint(format!("sat_h{h}_d{d}_l{l}"), sat, Sense::Ge, 0.0)?;
            model.add_constraint(
                format!("fair_h{h}_d{d}_l{l}"),
                vec![(dv.phi, 1.0), (u[l], -1.0), (w, -c)],
                Sense::Ge,
                -c,
            )?;
        }
    }
    Ok(TransferIndex { demands, u })
}
