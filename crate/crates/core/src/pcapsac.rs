//! Photo-based formulation.
//!
//! Variable names (indices, not ids; `d` indexes all drones):
//!
//! | name | meaning |
//! |------|---------|
//! | `y_r{r}_p{p}` | photo `p` belongs to region `r` |
//! | `x_r{r}_d{d}` | region `r` runs on capable drone `d` |
//! | `g_r{r}_d{d}_p{p}` | product `x * y` |
//! | `al_r{r}_c{c}`, `be_r{r}_c{c}` | left / right border on longitude `c` |
//! | `ga_r{r}_l{l}`, `om_r{r}_l{l}` | bottom / top border on latitude `l` |
//! | `tmax` | makespan |
//!
//! plus the transfer variables from [`crate::transfer`] when the deadline is bounded.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::geometry::{border_index_sets, Boundary, CoordinateAxes};
use crate::instance::{Deadline, Instance};
use crate::milp::{LinearModel, ModelSolution, Sense, VarId, INTEGRALITY_TOL};
use crate::solution::{CapsacSolution, Region};
use crate::transfer::{add_transfer_block, TransferIndex};

/// Which family keeps unassigned photos outside a region.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum BcVariant {
    /// At most three of the four "inside" border sums may hold.
    Bc0,
    /// At least one "outside" border sum must hold.
    #[default]
    Bc0Bar,
}

impl FromStr for BcVariant {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "bc0" => Ok(BcVariant::Bc0),
            "bc0bar" => Ok(BcVariant::Bc0Bar),
            other => Err(Error::Model(format!("unknown BC variant `{other}` (bc0|bc0bar)"))),
        }
    }
}

impl fmt::Display for BcVariant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            BcVariant::Bc0 => "bc0",
            BcVariant::Bc0Bar => "bc0bar",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum BranchPriority {
    #[default]
    Default,
    /// Border variables first.
    BordersOverY,
    /// Photo assignment variables first.
    YOverBorders,
}

impl FromStr for BranchPriority {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "default" => Ok(BranchPriority::Default),
            "by" => Ok(BranchPriority::BordersOverY),
            "yb" => Ok(BranchPriority::YOverBorders),
            other => Err(Error::Model(format!("unknown branch priority `{other}` (default|by|yb)"))),
        }
    }
}

impl fmt::Display for BranchPriority {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            BranchPriority::Default => "default",
            BranchPriority::BordersOverY => "by",
            BranchPriority::YOverBorders => "yb",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PcapsacConfig {
    pub bc_variant: BcVariant,
    /// Every region gets a left/right and bottom/top border pair, so no
    /// region can be empty. Exact without a deadline; under one an empty
    /// region can be what keeps transfers short, and the cuts may remove
    /// the optimum.
    pub ordering_cuts: bool,
    /// Fixes drone `r` into region `r`. Only applied without a deadline:
    /// under one, which drone handles which region changes the transfers.
    pub symmetry_breaking: bool,
    pub branch_priority: BranchPriority,
    pub sigma: usize,
    pub t_hat: Deadline,
}

impl PcapsacConfig {
    /// Defaults (BC0bar, no cuts, symmetry breaking on) with the instance's sigma and deadline.
    pub fn for_instance(inst: &Instance) -> Self {
        PcapsacConfig {
            bc_variant: BcVariant::default(),
            ordering_cuts: false,
            symmetry_breaking: true,
            branch_priority: BranchPriority::default(),
            sigma: inst.sigma,
            t_hat: inst.t_hat,
        }
    }

    /// Short tag such as `pb-bc0bar+ord` used in benchmark records.
    pub fn tag(&self) -> String {
        let mut s = format!("pb-{}", self.bc_variant);
        if self.ordering_cuts {
            s.push_str("+ord");
        }
        if !self.symmetry_breaking {
            s.push_str("-nosym");
        }
        if self.branch_priority != BranchPriority::Default {
            s.push_str(&format!("+{}", self.branch_priority));
        }
        s
    }
}

/// Variable handles of a built pCAPsac model.
#[derive(Debug, Clone, PartialEq)]
pub struct PcapsacIndex {
    /// Capable drone indices; `x[r][j]` refers to drone `capable[j]`.
    pub capable: Vec<usize>,
    pub y: Vec<Vec<VarId>>,
    pub x: Vec<Vec<VarId>>,
    /// `g[r][j][p]`
    pub g: Vec<Vec<Vec<VarId>>>,
    pub alpha: Vec<Vec<VarId>>,
    pub beta: Vec<Vec<VarId>>,
    pub gamma: Vec<Vec<VarId>>,
    pub omega: Vec<Vec<VarId>>,
    pub tmax: VarId,
    /// Present iff the deadline is bounded.
    pub transfer: Option<TransferIndex>,
}

fn sum(vars: &[VarId], range: impl Iterator<Item = usize>) -> Vec<(VarId, f64)> {
    range.map(|i| (vars[i], 1.0)).collect()
}

pub fn build_pcapsac(inst: &Instance, cfg: &PcapsacConfig) -> Result<(LinearModel, PcapsacIndex)> {
    inst.validate()?;
    let sigma = cfg.sigma;
    let capable = inst.capable_drones();
    let m = capable.len();
    if sigma == 0 || sigma > m {
        return Err(Error::Model(format!("sigma {sigma} outside 1..={m}")));
    }
    let axes = CoordinateAxes::build(&inst.photos)?;
    let (nc, nl, np) = (axes.lngs.len(), axes.lats.len(), inst.photos.len());
    let borders = inst
        .photos
        .iter()
        .map(|p| border_index_sets(p, &axes))
        .collect::<Result<Vec<_>>>()?;
    let mut model = LinearModel::new();

    let mut y = Vec::with_capacity(m);
    let mut x = Vec::with_capacity(m);
    let mut g = Vec::with_capacity(m);
    for r in 0..m {
        y.push((0..np).map(|p| model.add_binary(format!("y_r{r}_p{p}"))).collect::<Result<Vec<_>>>()?);
    }
    for r in 0..m {
        x.push(capable.iter().map(|&d| model.add_binary(format!("x_r{r}_d{d}"))).collect::<Result<Vec<_>>>()?);
    }
    for r in 0..m {
        let mut per_drone = Vec::with_capacity(m);
        for &d in &capable {
            per_drone.push((0..np).map(|p| model.add_binary(format!("g_r{r}_d{d}_p{p}"))).collect::<Result<Vec<_>>>()?);
        }
        g.push(per_drone);
    }
    let mut border_vars = |prefix: &str, axis: &str, n: usize| -> Result<Vec<Vec<VarId>>> {
        (0..m)
            .map(|r| (0..n).map(|c| model.add_binary(format!("{prefix}_r{r}_{axis}{c}"))).collect())
            .collect()
    };
    let alpha = border_vars("al", "c", nc)?;
    let beta = border_vars("be", "c", nc)?;
    let gamma = border_vars("ga", "l", nl)?;
    let omega = border_vars("om", "l", nl)?;
    let tmax = model.add_continuous("tmax", 0.0, f64::INFINITY)?;

    for p in 0..np {
        model.add_constraint(format!("cov_p{p}"), (0..m).map(|r| (y[r][p], 1.0)).collect(), Sense::Ge, 1.0)?;
    }
    for r in 0..m {
        model.add_constraint(format!("rel_r{r}"), sum(&x[r], 0..m), Sense::Ge, sigma as f64)?;
    }
    for r in 0..m {
        for (j, &d) in capable.iter().enumerate() {
            for p in 0..np {
                let (gv, xv, yv) = (g[r][j][p], x[r][j], y[r][p]);
                model.add_constraint(format!("mca_r{r}_d{d}_p{p}"), vec![(gv, 1.0), (xv, -1.0)], Sense::Le, 0.0)?;
                model.add_constraint(format!("mcb_r{r}_d{d}_p{p}"), vec![(gv, 1.0), (yv, -1.0)], Sense::Le, 0.0)?;
                model.add_constraint(
                    format!("mcc_r{r}_d{d}_p{p}"),
                    vec![(gv, 1.0), (yv, -1.0), (xv, -1.0)],
                    Sense::Ge,
                    -1.0,
                )?;
            }
        }
    }
    for r in 0..m {
        model.add_constraint(format!("bal_r{r}"), sum(&alpha[r], 0..nc), Sense::Eq, 1.0)?;
        model.add_constraint(format!("bbe_r{r}"), sum(&beta[r], 0..nc), Sense::Eq, 1.0)?;
        model.add_constraint(format!("bga_r{r}"), sum(&gamma[r], 0..nl), Sense::Eq, 1.0)?;
        model.add_constraint(format!("bom_r{r}"), sum(&omega[r], 0..nl), Sense::Eq, 1.0)?;
    }
    for r in 0..m {
        for (p, bs) in borders.iter().enumerate() {
            let yv = (y[r][p], 1.0);
            for (tag, vars, range) in [
                ("a", &alpha[r], &bs.left),
                ("b", &beta[r], &bs.right),
                ("g", &gamma[r], &bs.bottom),
                ("o", &omega[r], &bs.top),
            ] {
                let mut terms = vec![yv];
                terms.extend(range.clone().map(|i| (vars[i], -1.0)));
                model.add_constraint(format!("bc1{tag}_r{r}_p{p}"), terms, Sense::Le, 0.0)?;
            }
        }
    }
    for r in 0..m {
        for (p, bs) in borders.iter().enumerate() {
            match cfg.bc_variant {
                BcVariant::Bc0Bar => {
                    let mut terms = vec![(y[r][p], 1.0)];
                    terms.extend((0..nc).filter(|c| !bs.left.contains(c)).map(|c| (alpha[r][c], 1.0)));
                    terms.extend((0..nc).filter(|c| !bs.right.contains(c)).map(|c| (beta[r][c], 1.0)));
                    terms.extend((0..nl).filter(|l| !bs.bottom.contains(l)).map(|l| (gamma[r][l], 1.0)));
                    terms.extend((0..nl).filter(|l| !bs.top.contains(l)).map(|l| (omega[r][l], 1.0)));
                    model.add_constraint(format!("bc0bar_r{r}_p{p}"), terms, Sense::Ge, 1.0)?;
                }
                BcVariant::Bc0 => {
                    let mut terms = vec![(y[r][p], -1.0)];
                    terms.extend(sum(&alpha[r], bs.left.clone()));
                    terms.extend(sum(&beta[r], bs.right.clone()));
                    terms.extend(sum(&gamma[r], bs.bottom.clone()));
                    terms.extend(sum(&omega[r], bs.top.clone()));
                    model.add_constraint(format!("bc0_r{r}_p{p}"), terms, Sense::Le, 3.0)?;
                }
            }
        }
    }
    if cfg.ordering_cuts {
        // a left border at c needs a right border at c or beyond, and so on
        for r in 0..m {
            for c in 0..nc {
                let mut t = vec![(alpha[r][c], 1.0)];
                t.extend((c..nc).map(|j| (beta[r][j], -1.0)));
                model.add_constraint(format!("orda_r{r}_c{c}"), t, Sense::Le, 0.0)?;
                let mut t = vec![(beta[r][c], 1.0)];
                t.extend((0..=c).map(|j| (alpha[r][j], -1.0)));
                model.add_constraint(format!("ordb_r{r}_c{c}"), t, Sense::Le, 0.0)?;
            }
            for l in 0..nl {
                let mut t = vec![(gamma[r][l], 1.0)];
                t.extend((l..nl).map(|j| (omega[r][j], -1.0)));
                model.add_constraint(format!("ordg_r{r}_l{l}"), t, Sense::Le, 0.0)?;
                let mut t = vec![(omega[r][l], 1.0)];
                t.extend((0..=l).map(|j| (gamma[r][j], -1.0)));
                model.add_constraint(format!("ordo_r{r}_l{l}"), t, Sense::Le, 0.0)?;
            }
        }
    }

    let transfer = match cfg.t_hat {
        Deadline::Unbounded => None,
        Deadline::Seconds(t_hat) => {
            let storage = inst.storage();
            let moved = |h: usize, d: usize| {
                let j = capable.iter().position(|&c| c == d).expect("target is capable");
                let mut count = Vec::new();
                let mut data = Vec::new();
                for r in 0..m {
                    for p in (0..np).filter(|&p| storage[p] == h) {
                        count.push((g[r][j][p], 1.0));
                        data.push((g[r][j][p], inst.photos[p].mu));
                    }
                }
                (count, data)
            };
            Some(add_transfer_block(&mut model, inst, t_hat, moved)?)
        }
    };

    for (j, &d) in capable.iter().enumerate() {
        let mut terms = vec![(tmax, 1.0)];
        for r in 0..m {
            terms.extend((0..np).map(|p| (g[r][j][p], -inst.photos[p].lambda)));
        }
        model.add_constraint(format!("mk_d{d}"), terms, Sense::Ge, 0.0)?;
    }
    model.set_objective(vec![(tmax, 1.0)]);

    if cfg.symmetry_breaking && !cfg.t_hat.is_bounded() {
        for (r, xr) in x.iter().enumerate() {
            model.fix(xr[r], 1.0);
        }
    }
    let (border_p, y_p) = match cfg.branch_priority {
        BranchPriority::Default => (0, 0),
        BranchPriority::BordersOverY => (2, 1),
        BranchPriority::YOverBorders => (1, 2),
    };
    if border_p > 0 {
        for set in [&alpha, &beta, &gamma, &omega] {
            for v in set.iter().flatten() {
                model.set_priority(*v, border_p);
            }
        }
        for v in y.iter().flatten() {
            model.set_priority(*v, y_p);
        }
    }

    let index = PcapsacIndex { capable, y, x, g, alpha, beta, gamma, omega, tmax, transfer };
    Ok((model, index))
}

/// Reads a binary, rejecting values that are not within tolerance of 0 or 1.
pub(crate) fn binary(values: &[f64], v: VarId, name: &dyn Fn() -> String) -> Result<bool> {
    let x = values[v.0];
    if (x - x.round()).abs() > INTEGRALITY_TOL || !(-INTEGRALITY_TOL..=1.0 + INTEGRALITY_TOL).contains(&x) {
        return Err(Error::Decode(format!("binary `{}` has value {x}", name())));
    }
    Ok(x > 0.5)
}

pub(crate) fn solution_values(sol: &ModelSolution) -> Result<&[f64]> {
    match (&sol.values, sol.status) {
        (Some(v), _) => Ok(v),
        (None, status) => Err(Error::Decode(format!("no solution to decode (status {status})"))),
    }
}

pub fn decode_pcapsac(sol: &ModelSolution, idx: &PcapsacIndex, inst: &Instance) -> Result<CapsacSolution> {
    let values = solution_values(sol)?;
    let np = inst.photos.len();
    let on = |v: VarId| binary(values, v, &|| format!("#{}", v.0));
    let pick = |vars: &[VarId]| -> Result<Vec<usize>> {
        let mut out = Vec::new();
        for (i, &v) in vars.iter().enumerate() {
            if on(v)? {
                out.push(i);
            }
        }
        Ok(out)
    };
    let mut regions = Vec::with_capacity(idx.y.len());
    for r in 0..idx.y.len() {
        let members = pick(&idx.y[r])?;
        let drones = pick(&idx.x[r])?.into_iter().map(|j| idx.capable[j]).collect();
        let boundary = if members.is_empty() {
            None
        } else {
            let one = |vars: &[VarId], what: &str| -> Result<usize> {
                match pick(vars)?.as_slice() {
                    [i] => Ok(*i),
                    other => Err(Error::Decode(format!("region {r}: {} {what} borders set", other.len()))),
                }
            };
            Some(Boundary {
                left: one(&idx.alpha[r], "left")?,
                right: one(&idx.beta[r], "right")?,
                bottom: one(&idx.gamma[r], "bottom")?,
                top: one(&idx.omega[r], "top")?,
            })
        };
        debug_assert!(members.iter().all(|&p| p < np));
        regions.push(Region { boundary, members, drones });
    }
    let objective = sol.objective.unwrap_or(values[idx.tmax.0]);
    Ok(CapsacSolution { regions, objective })
}
