//! Standalone SVG renderings of profiles and sweeps.

use std::fmt::Write as _;

use super::{ProfileTable, SweepKind, SweepTable};
use crate::error::{Error, Result};

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 400.0;
const MARGIN: f64 = 50.0;
const COLORS: [&str; 6] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf"];

/// Anything `capsac plot` can draw.
#[derive(Debug, Clone, PartialEq)]
pub enum PlotData {
    Profile(ProfileTable),
    Sweep(SweepTable),
}

/// Recognises a profile or sweep CSV by its schema line and renders it.
pub fn plot_document(csv_text: &str) -> Result<String> {
    match super::csv_schema(csv_text) {
        Some(ProfileTable::SCHEMA) => Ok(profile_svg(&ProfileTable::from_csv(csv_text)?)),
        Some(s) if s.starts_with("capsac-sweep-") => Ok(sweep_svg(&SweepTable::from_csv(csv_text)?)),
        other => Err(Error::Bench(format!("cannot plot CSV with schema {other:?}"))),
    }
}

struct Frame {
    x0: f64,
    x1: f64,
    y0: f64,
    y1: f64,
}

impl Frame {
    fn new(x0: f64, x1: f64, y0: f64, y1: f64) -> Self {
        let widen = |a: f64, b: f64| if b > a { (a, b) } else { (a - 0.5, a + 0.5) };
        let (x0, x1) = widen(x0, x1);
        let (y0, y1) = widen(y0, y1);
        Frame { x0, x1, y0, y1 }
    }

    fn x(&self, v: f64) -> f64 {
        MARGIN + (v - self.x0) / (self.x1 - self.x0) * (WIDTH - 2.0 * MARGIN)
    }

    fn y(&self, v: f64) -> f64 {
        HEIGHT - MARGIN - (v - self.y0) / (self.y1 - self.y0) * (HEIGHT - 2.0 * MARGIN)
    }
}

fn header(title: &str, xlabel: &str, ylabel: &str) -> String {
    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(s, r#"<title>{title}</title>"#);
    let _ = writeln!(s, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let _ = writeln!(
        s,
        r#"<path d="M{MARGIN} {t} V{b} H{r}" fill="none" stroke="black"/>"#,
        t = MARGIN,
        b = HEIGHT - MARGIN,
        r = WIDTH - MARGIN
    );
    let _ = writeln!(s, r#"<text x="{}" y="{}" text-anchor="middle">{xlabel}</text>"#, WIDTH / 2.0, HEIGHT - 12.0);
    let _ = writeln!(
        s,
        r#"<text x="14" y="{}" text-anchor="middle" transform="rotate(-90 14 {})">{ylabel}</text>"#,
        HEIGHT / 2.0,
        HEIGHT / 2.0
    );
    s
}

fn ticks(s: &mut String, f: &Frame) {
    let _ = writeln!(s, r#"<text x="{:.1}" y="{:.1}" text-anchor="middle">{}</text>"#, f.x(f.x0), HEIGHT - MARGIN + 16.0, fmt(f.x0));
    let _ = writeln!(s, r#"<text x="{:.1}" y="{:.1}" text-anchor="middle">{}</text>"#, f.x(f.x1), HEIGHT - MARGIN + 16.0, fmt(f.x1));
    let _ = writeln!(s, r#"<text x="{:.1}" y="{:.1}" text-anchor="end">{}</text>"#, MARGIN - 4.0, f.y(f.y0) + 4.0, fmt(f.y0));
    let _ = writeln!(s, r#"<text x="{:.1}" y="{:.1}" text-anchor="end">{}</text>"#, MARGIN - 4.0, f.y(f.y1) + 4.0, fmt(f.y1));
}

fn fmt(v: f64) -> String {
    let s = format!("{v:.3}");
    s.trim_end_matches('0').trim_end_matches('.').to_string()
}

/// Step curves of rho against tau, one per formulation.
pub fn profile_svg(p: &ProfileTable) -> String {
    let mut s = header("performance profile", "tau", "rho");
    if !p.taus.is_empty() {
        let f = Frame::new(1.0, p.taus.last().copied().unwrap_or(1.0).max(1.0), 0.0, 1.0);
        ticks(&mut s, &f);
        for (k, name) in p.formulations.iter().enumerate() {
            let color = COLORS[k % COLORS.len()];
            let mut d = format!("M{:.2} {:.2}", f.x(f.x0), f.y(0.0));
            for (i, &tau) in p.taus.iter().enumerate() {
                let _ = write!(d, " H{:.2} V{:.2}", f.x(tau), f.y(p.rho[k][i]));
            }
            let _ = write!(d, " H{:.2}", f.x(f.x1));
            let _ = writeln!(s, r#"<path d="{d}" fill="none" stroke="{color}" stroke-width="2"/>"#);
            let _ = writeln!(
                s,
                r#"<text x="{:.1}" y="{:.1}" fill="{color}">{name}</text>"#,
                WIDTH - MARGIN + 4.0 - 120.0,
                MARGIN + 14.0 * k as f64
            );
        }
    }
    s.push_str("</svg>\n");
    s
}

/// Objective staircase over the swept parameter; infeasible rows shaded.
pub fn sweep_svg(t: &SweepTable) -> String {
    let (title, xlabel) = match t.kind {
        SweepKind::Sigma => ("sigma sweep", "sigma"),
        SweepKind::THat => ("deadline sweep", "t_hat (s)"),
    };
    let mut s = header(title, xlabel, "makespan (s)");
    let pts: Vec<(f64, Option<f64>)> = t.rows.iter().filter(|r| r.param.is_finite()).map(|r| (r.param, r.objective)).collect();
    if !pts.is_empty() {
        let xs = pts.iter().map(|p| p.0);
        let x0 = xs.clone().fold(f64::INFINITY, f64::min);
        let x1 = xs.fold(f64::NEG_INFINITY, f64::max);
        let ys: Vec<f64> = pts.iter().filter_map(|p| p.1).collect();
        let y1 = ys.iter().copied().fold(0.0, f64::max);
        let f = Frame::new(x0, x1, 0.0, y1);
        ticks(&mut s, &f);
        let mut sorted = pts.clone();
        sorted.sort_by(|a, b| a.0.total_cmp(&b.0));
        for &(x, obj) in &sorted {
            if obj.is_none() {
                let _ = writeln!(
                    s,
                    r##"<rect x="{:.2}" y="{MARGIN}" width="6" height="{}" fill="#cccccc"><title>infeasible at {}</title></rect>"##,
                    f.x(x) - 3.0,
                    HEIGHT - 2.0 * MARGIN,
                    fmt(x)
                );
            }
        }
        let feasible: Vec<(f64, f64)> = sorted.iter().filter_map(|&(x, o)| o.map(|o| (x, o))).collect();
        if let Some(&(fx, fy)) = feasible.first() {
            let mut d = format!("M{:.2} {:.2}", f.x(fx), f.y(fy));
            for &(x, y) in &feasible[1..] {
                let _ = write!(d, " H{:.2} V{:.2}", f.x(x), f.y(y));
            }
            let _ = writeln!(s, r#"<path d="{d}" fill="none" stroke="{}" stroke-width="2"/>"#, COLORS[0]);
            for &(x, y) in &feasible {
                let _ = writeln!(s, r#"<circle cx="{:.2}" cy="{:.2}" r="3" fill="{}"/>"#, f.x(x), f.y(y), COLORS[0]);
            }
        }
    }
    s.push_str("</svg>\n");
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bench::SweepRow;
    use crate::milp::SolveStatus;

    #[test]
    fn empty_documents_have_a_header() {
        let p = ProfileTable { formulations: vec![], instances: vec![], ratios: vec![], taus: vec![], rho: vec![] };
        let svg = profile_svg(&p);
        assert!(svg.starts_with("<svg") && svg.ends_with("</svg>\n"));
        assert!(!svg.contains("stroke-width=\"2\""));
        let t = SweepTable { kind: SweepKind::THat, rows: vec![], warnings: vec![] };
        assert!(sweep_svg(&t).contains("<title>deadline sweep</title>"));
    }

    #[test]
    fn sweep_marks_infeasible() {
        let rows = vec![
            SweepRow { param: 3.0, status: SolveStatus::Optimal, objective: Some(2.0), bound: None },
            SweepRow { param: 2.5, status: SolveStatus::Optimal, objective: Some(3.0), bound: None },
            SweepRow { param: 2.0, status: SolveStatus::Infeasible, objective: None, bound: None },
        ];
        let t = SweepTable { kind: SweepKind::THat, rows, warnings: vec![] };
        let svg = sweep_svg(&t);
        assert!(svg.contains("infeasible at 2"));
        assert_eq!(svg.matches("<circle").count(), 2);
        assert_eq!(plot_document(&t.to_csv().unwrap()).unwrap(), svg);
    }

    #[test]
    fn profile_has_one_curve_per_formulation() {
        let p = ProfileTable {
            formulations: vec!["a".into(), "b".into()],
            instances: vec!["i".into()],
            ratios: vec![vec![1.0], vec![2.0]],
            taus: vec![1.0, 2.0],
            rho: vec![vec![1.0, 1.0], vec![0.0, 1.0]],
        };
        let svg = profile_svg(&p);
        assert_eq!(svg.matches("stroke-width=\"2\"").count(), 2);
        assert_eq!(plot_document(&p.to_csv().unwrap()).unwrap(), svg);
    }
}
