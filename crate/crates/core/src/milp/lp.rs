//! CPLEX LP text format (the Minimize / Subject To / Bounds / Binary subset).

use std::fmt::Write as _;

use super::{LinearModel, VarId, VarKind};

const TERMS_PER_LINE: usize = 8;

fn push_terms(out: &mut String, model: &LinearModel, terms: &[(VarId, f64)]) {
    if terms.is_empty() {
        if let Some(first) = model.vars().first() {
            let _ = write!(out, " 0 {}", first.name);
        }
        return;
    }
    for (i, (v, c)) in terms.iter().enumerate() {
        if i > 0 && i % TERMS_PER_LINE == 0 {
            out.push_str("\n  ");
        }
        let name = &model.var(*v).name;
        match (i, *c < 0.0) {
            (0, false) => write!(out, " {c} {name}"),
            (0, true) => write!(out, " - {} {name}", -c),
            (_, false) => write!(out, " + {c} {name}"),
            (_, true) => write!(out, " - {} {name}", -c),
        }
        .expect("writing to a String cannot fail");
    }
}

/// Writes `model` in CPLEX LP format. Output is deterministic: rows and
/// variables keep insertion order.
pub fn write_lp(model: &LinearModel) -> String {
    let mut out = String::new();
    out.push_str("\\ capsac model\n");
    out.push_str("Minimize\n obj:");
    push_terms(&mut out, model, model.objective());
    out.push_str("\nSubject To\n");
    for c in model.constraints() {
        let _ = write!(out, " {}:", c.name);
        push_terms(&mut out, model, &c.terms);
        let _ = writeln!(out, " {} {}", c.sense, c.rhs);
    }
    out.push_str("Bounds\n");
    for v in model.vars() {
        let default = match v.kind {
            VarKind::Binary => v.lower == 0.0 && v.upper == 1.0,
            VarKind::Continuous => v.lower == 0.0 && v.upper == f64::INFINITY,
        };
        if default {
            continue;
        }
        let line = if v.lower == v.upper {
            format!(" {} = {}", v.name, v.lower)
        } else {
            match (v.lower.is_finite(), v.upper.is_finite()) {
                (false, false) => format!(" {} free", v.name),
                (true, false) => format!(" {} >= {}", v.name, v.lower),
                (false, true) => format!(" -inf <= {} <= {}", v.name, v.upper),
                (true, true) => format!(" {} <= {} <= {}", v.lower, v.name, v.upper),
            }
        };
        out.push_str(&line);
        out.push('\n');
    }
    let binaries: Vec<&str> = model
        .vars()
        .iter()
        .filter(|v| v.kind == VarKind::Binary)
        .map(|v| v.name.as_str())
        .collect();
    if !binaries.is_empty() {
        out.push_str("Binary\n");
        for chunk in binaries.chunks(TERMS_PER_LINE) {
            let _ = writeln!(out, " {}", chunk.join(" "));
        }
    }
    out.push_str("End\n");
    out
}

/// Branching priorities as `name priority` lines, in variable order.
/// Empty when the model carries no priorities.
pub fn write_priorities(model: &LinearModel) -> String {
    let mut out = String::new();
    for (v, p) in model.priorities() {
        let _ = writeln!(out, "{} {}", model.var(*v).name, p);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::milp::Sense;

    fn tiny() -> LinearModel {
        let mut m = LinearModel::new();
        let x = m.add_binary("x").unwrap();
        m.add_constraint("c1", vec![(x, 1.0)], Sense::Ge, 1.0).unwrap();
        m.set_objective(vec![(x, 1.0)]);
        m
    }

    #[test]
    fn skeleton() {
        let text = write_lp(&tiny());
        for section in ["Minimize", "Subject To", "Binary", "End"] {
            assert!(text.contains(section), "{section} missing in\n{text}");
        }
        assert!(text.contains(" c1: 1 x >= 1\n"));
        assert_eq!(write_lp(&tiny()), text);
    }

    #[test]
    fn empty_objective_is_zero() {
        let mut m = tiny();
        m.set_objective(vec![]);
        assert!(write_lp(&m).contains(" obj: 0 x\n"));
    }

    #[test]
    fn bounds_and_signs() {
        let mut m = LinearModel::new();
        let a = m.add_continuous("a", 0.0, f64::INFINITY).unwrap();
        let b = m.add_continuous("b", -1.0, 2.5).unwrap();
        let f = m.add_continuous("f", f64::NEG_INFINITY, f64::INFINITY).unwrap();
        let x = m.add_binary("x").unwrap();
        m.fix(x, 1.0);
        m.add_constraint("r", vec![(a, 1.0), (b, -2.0), (f, 0.5)], Sense::Le, -3.0).unwrap();
        let text = write_lp(&m);
        assert!(text.contains(" r: 1 a - 2 b + 0.5 f <= -3\n"), "{text}");
        assert!(text.contains(" -1 <= b <= 2.5\n"));
        assert!(text.contains(" f free\n"));
        assert!(text.contains(" x = 1\n"));
        assert!(!text.contains(" a >="));
    }

    #[test]
    fn priorities() {
        let mut m = tiny();
        assert_eq!(write_priorities(&m), "");
        m.set_priority(VarId(0), 2);
        assert_eq!(write_priorities(&m), "x 2\n");
    }
}
