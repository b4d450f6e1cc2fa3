//! Dolan-Moré performance profiles.

use std::collections::{BTreeMap, BTreeSet};

use super::RunRecord;
use crate::error::{Error, Result};

/// `cpu / min(cpu)` for one instance across formulations.
pub fn profile_ratios(times: &[f64]) -> Vec<f64> {
    let best = times.iter().copied().fold(f64::INFINITY, f64::min);
    times.iter().map(|t| t / best).collect()
}

/// `rho[f][i]` is the fraction of instances whose ratio for formulation `f` is at most `taus[i]`.
#[derive(Debug, Clone, PartialEq)]
pub struct ProfileTable {
    pub formulations: Vec<String>,
    pub instances: Vec<String>,
    /// `ratios[f][i]` for formulation `f`, instance `i`.
    pub ratios: Vec<Vec<f64>>,
    /// Sorted distinct ratios; the sample grid.
    pub taus: Vec<f64>,
    pub rho: Vec<Vec<f64>>,
}

impl ProfileTable {
    /// rho of formulation `f` at an arbitrary `tau`.
    pub fn rho_at(&self, f: usize, tau: f64) -> f64 {
        let n = self.instances.len();
        if n == 0 {
            return 0.0;
        }
        self.ratios[f].iter().filter(|&&r| r <= tau).count() as f64 / n as f64
    }

    pub const SCHEMA: &'static str = "capsac-profile v1";

    /// CSV: `tau` then one column per formulation.
    pub fn to_csv(&self) -> Result<String> {
        let mut buf = Vec::new();
        {
            use std::io::Write;
            writeln!(buf, "# {}", Self::SCHEMA).map_err(|e| Error::io("<csv>", e))?;
            let mut w = csv::Writer::from_writer(&mut buf);
            let mut header = vec!["tau".to_string()];
            header.extend(self.formulations.iter().cloned());
            w.write_record(&header)?;
            for (i, tau) in self.taus.iter().enumerate() {
                let mut row = vec![tau.to_string()];
                row.extend(self.rho.iter().map(|r| r[i].to_string()));
                w.write_record(&row)?;
            }
            w.flush().map_err(|e| Error::io("<csv>", e))?;
        }
        Ok(String::from_utf8(buf).expect("csv output is UTF-8"))
    }

    /// Reads the sampled curves back (`ratios` and `instances` are left empty).
    pub fn from_csv(text: &str) -> Result<Self> {
        let mut r = csv::ReaderBuilder::new().comment(Some(b'#')).from_reader(text.as_bytes());
        let header = r.headers()?.clone();
        if header.get(0) != Some("tau") {
            return Err(Error::Bench("profile CSV must start with a `tau` column".into()));
        }
        let formulations: Vec<String> = header.iter().skip(1).map(str::to_string).collect();
        let mut taus = Vec::new();
        let mut rho = vec![Vec::new(); formulations.len()];
        for rec in r.records() {
            let rec = rec?;
            let num = |s: &str| s.parse::<f64>().map_err(|e| Error::Bench(format!("bad number `{s}`: {e}")));
            taus.push(num(&rec[0])?);
            for (f, col) in rho.iter_mut().enumerate() {
                col.push(num(&rec[f + 1])?);
            }
        }
        Ok(ProfileTable { formulations, instances: vec![], ratios: vec![], taus, rho })
    }
}

/// Profile over `records`. Runs that did not finish optimally count with
/// `time_limit` seconds. Every (instance, formulation) pair must be present.
pub fn performance_profile(records: &[RunRecord], time_limit: f64) -> Result<ProfileTable> {
    let formulations: Vec<String> =
        records.iter().map(|r| r.formulation.clone()).collect::<BTreeSet<_>>().into_iter().collect();
    let instances: Vec<String> =
        records.iter().map(|r| r.instance.clone()).collect::<BTreeSet<_>>().into_iter().collect();
    let mut cpu: BTreeMap<(&str, &str), f64> = BTreeMap::new();
    for r in records {
        let t = if r.solved() { r.total_seconds } else { time_limit };
        if cpu.insert((&r.instance, &r.formulation), t).is_some() {
            return Err(Error::Bench(format!("duplicate run for ({}, {})", r.instance, r.formulation)));
        }
    }
    let mut ratios = vec![vec![0.0; instances.len()]; formulations.len()];
    for (i, inst) in instances.iter().enumerate() {
        let times = formulations
            .iter()
            .map(|f| {
                cpu.get(&(inst.as_str(), f.as_str()))
                    .copied()
                    .ok_or_else(|| Error::Bench(format!("missing run for ({inst}, {f})")))
            })
            .collect::<Result<Vec<_>>>()?;
        for (f, r) in profile_ratios(&times).into_iter().enumerate() {
            ratios[f][i] = r;
        }
    }
    let mut taus: Vec<f64> = ratios.iter().flatten().copied().filter(|r| r.is_finite()).collect();
    taus.sort_by(f64::total_cmp);
    taus.dedup();
    let mut table = ProfileTable { formulations, instances, ratios, taus, rho: vec![] };
    table.rho = (0..table.formulations.len())
        .map(|f| table.taus.iter().map(|&t| table.rho_at(f, t)).collect())
        .collect();
    Ok(table)
}
