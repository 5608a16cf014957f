//! Mixed-integer model of the discrete OWA problem with nonincreasing
//! weights (LP duality form), written in CPLEX-LP text, plus a strict reader
//! for the same dialect.
//!
//! ```text
//! min  Σ_k (a_k + b_k)
//! s.t. a_k + b_j >= w'_k Σ_i c^j_i x_i    for all j, k
//!      Σ_i x_i = p
//!      x binary, a and b free
//! ```

use crate::discrete::ScenarioSample;
use crate::error::{check_len, OwaError, Result};
use crate::instance::FeasibleSet;
use crate::scalar::Scalar;
use std::collections::BTreeSet;
use std::fmt::Write as _;

const TERMS_PER_LINE: usize = 8;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sense {
    Le,
    Ge,
    Eq,
}

impl Sense {
    fn as_str(self) -> &'static str {
        match self {
            Sense::Le => "<=",
            Sense::Ge => ">=",
            Sense::Eq => "=",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Term {
    pub coef: f64,
    pub var: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Constraint {
    pub name: String,
    pub terms: Vec<Term>,
    pub sense: Sense,
    pub rhs: f64,
}

/// A minimization model with free and binary variable declarations.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct LpModel {
    pub objective_name: String,
    pub objective: Vec<Term>,
    pub constraints: Vec<Constraint>,
    pub free: Vec<String>,
    pub binaries: Vec<String>,
}

fn x_var(i: usize) -> String {
    format!("x{}", i + 1)
}

fn alpha_var(k: usize) -> String {
    format!("a{}", k + 1)
}

fn beta_var(k: usize) -> String {
    format!("b{}", k + 1)
}

/// Builds the dual model. Requires nonincreasing weights and a cardinality
/// feasible set (selection or uniform matroid).
pub fn build_owa_milp<F: Scalar>(sample: &ScenarioSample<F>, feasibility: &FeasibleSet) -> Result<LpModel> {
    check_len(sample.n(), feasibility.n())?;
    let p = match feasibility {
        FeasibleSet::Selection { p, .. } => *p,
        FeasibleSet::Matroid(o) => o.uniform_rank().ok_or_else(|| {
            OwaError::Capability("MILP export supports selection feasibility only".into())
        })?,
        FeasibleSet::Explicit { .. } => {
            return Err(OwaError::Capability(
                "MILP export supports selection feasibility only".into(),
            ))
        }
    };
    if !sample.weights().is_nonincreasing() {
        return Err(OwaError::Validation(
            "the duality-based MILP requires nonincreasing scenario weights".into(),
        ));
    }
    let k = sample.k();
    let n = sample.n();
    let w: Vec<f64> = sample.weights().values().iter().map(|v| v.as_f64()).collect();
    let mut model = LpModel {
        objective_name: "obj".into(),
        ..Default::default()
    };
    for j in 0..k {
        model.objective.push(Term { coef: 1.0, var: alpha_var(j) });
        model.objective.push(Term { coef: 1.0, var: beta_var(j) });
    }
    for (kk, wk) in w.iter().enumerate() {
        for j in 0..k {
            let mut terms = vec![
                Term { coef: 1.0, var: alpha_var(kk) },
                Term { coef: 1.0, var: beta_var(j) },
            ];
            let row = sample.scenario(j);
            for (i, c) in row.iter().enumerate() {
                let coef = -(wk * c.as_f64());
                if coef != 0.0 {
                    terms.push(Term { coef, var: x_var(i) });
                }
            }
            model.constraints.push(Constraint {
                name: format!("d{}_{}", kk + 1, j + 1),
                terms,
                sense: Sense::Ge,
                rhs: 0.0,
            });
        }
    }
    model.constraints.push(Constraint {
        name: "card".into(),
        terms: (0..n).map(|i| Term { coef: 1.0, var: x_var(i) }).collect(),
        sense: Sense::Eq,
        rhs: p as f64,
    });
    for j in 0..k {
        model.free.push(alpha_var(j));
        model.free.push(beta_var(j));
    }
    model.binaries = (0..n).map(x_var).collect();
    Ok(model)
}

/// LP text of [`build_owa_milp`].
pub fn export_milp<F: Scalar>(sample: &ScenarioSample<F>, feasibility: &FeasibleSet) -> Result<String> {
    let model = build_owa_milp(sample, feasibility)?;
    let mut out = format!(
        "\\ Discrete OWA, {} scenarios, {} items\n",
        sample.k(),
        sample.n()
    );
    out.push_str(&write_lp(&model));
    Ok(out)
}

fn fmt_num(v: f64) -> String {
    // shortest round-trip decimal, never in exponent form
    format!("{v}")
}

fn write_terms(out: &mut String, terms: &[Term]) {
    for (idx, t) in terms.iter().enumerate() {
        if idx > 0 && idx % TERMS_PER_LINE == 0 {
            out.push_str("\n   ");
        }
        let sign = if t.coef < 0.0 { "-" } else { "+" };
        let mag = t.coef.abs();
        if idx == 0 {
            if t.coef < 0.0 {
                out.push_str(" -");
            }
        } else {
            let _ = write!(out, " {sign}");
        }
        if mag == 1.0 {
            let _ = write!(out, " {}", t.var);
        } else {
            let _ = write!(out, " {} {}", fmt_num(mag), t.var);
        }
    }
}

pub fn write_lp(model: &LpModel) -> String {
    let mut out = String::new();
    out.push_str("Minimize\n ");
    out.push_str(&model.objective_name);
    out.push(':');
    write_terms(&mut out, &model.objective);
    out.push_str("\nSubject To\n");
    for c in &model.constraints {
        let _ = write!(out, " {}:", c.name);
        write_terms(&mut out, &c.terms);
        let _ = writeln!(out, " {} {}", c.sense.as_str(), fmt_num(c.rhs));
    }
    if !model.free.is_empty() {
        out.push_str("Bounds\n");
        for v in &model.free {
            let _ = writeln!(out, " {v} free");
        }
    }
    if !model.binaries.is_empty() {
        out.push_str("Binaries\n");
        for chunk in model.binaries.chunks(TERMS_PER_LINE * 2) {
            let _ = writeln!(out, " {}", chunk.join(" "));
        }
    }
    out.push_str("End\n");
    out
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(f64),
    Ident(String),
    Plus,
    Minus,
    Colon,
    Sense(Sense),
}

fn lp_err(line: usize, message: impl Into<String>) -> OwaError {
    OwaError::Parse {
        line,
        column: 0,
        message: message.into(),
    }
}

fn is_ident_start(c: char) -> bool {
    c.is_ascii_alphabetic() || c == '_'
}

fn is_ident_char(c: char) -> bool {
    c.is_ascii_alphanumeric() || c == '_' || c == '.'
}

fn tokenize(line: &str, line_no: usize) -> Result<Vec<Tok>> {
    let chars: Vec<char> = line.chars().collect();
    let mut toks = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        match c {
            ' ' | '\t' => i += 1,
            '+' => {
                toks.push(Tok::Plus);
                i += 1;
            }
            '-' => {
                toks.push(Tok::Minus);
                i += 1;
            }
            ':' => {
                toks.push(Tok::Colon);
                i += 1;
            }
            '<' | '>' => {
                if chars.get(i + 1) != Some(&'=') {
                    return Err(lp_err(line_no, format!("expected `{c}=`")));
                }
                toks.push(Tok::Sense(if c == '<' { Sense::Le } else { Sense::Ge }));
                i += 2;
            }
            '=' => {
                toks.push(Tok::Sense(Sense::Eq));
                i += 1;
            }
            d if d.is_ascii_digit() || d == '.' => {
                let start = i;
                while i < chars.len() && (chars[i].is_ascii_digit() || chars[i] == '.') {
                    i += 1;
                }
                let text: String = chars[start..i].iter().collect();
                let v = text
                    .parse::<f64>()
                    .map_err(|_| lp_err(line_no, format!("bad number `{text}`")))?;
                toks.push(Tok::Num(v));
            }
            a if is_ident_start(a) => {
                let start = i;
                while i < chars.len() && is_ident_char(chars[i]) {
                    i += 1;
                }
                toks.push(Tok::Ident(chars[start..i].iter().collect()));
            }
            other => return Err(lp_err(line_no, format!("unexpected character `{other}`"))),
        }
    }
    Ok(toks)
}

/// Parses `[name:] term (± term)*` where term is `[coef] var`.
fn parse_expression(toks: &[Tok], line: usize) -> Result<(Option<String>, Vec<Term>, usize)> {
    let mut pos = 0;
    let mut name = None;
    if let (Some(Tok::Ident(n)), Some(Tok::Colon)) = (toks.first(), toks.get(1)) {
        name = Some(n.clone());
        pos = 2;
    }
    let mut terms = Vec::new();
    loop {
        let mut sign = 1.0;
        match toks.get(pos) {
            Some(Tok::Plus) if !terms.is_empty() => pos += 1,
            Some(Tok::Minus) => {
                sign = -1.0;
                pos += 1;
            }
            _ if terms.is_empty() => {}
            _ => break,
        }
        let coef = match toks.get(pos) {
            Some(Tok::Num(v)) => {
                pos += 1;
                *v
            }
            _ => 1.0,
        };
        match toks.get(pos) {
            Some(Tok::Ident(v)) => {
                terms.push(Term {
                    coef: sign * coef,
                    var: v.clone(),
                });
                pos += 1;
            }
            other => return Err(lp_err(line, format!("expected variable, found {other:?}"))),
        }
    }
    if terms.is_empty() {
        return Err(lp_err(line, "empty linear expression"));
    }
    Ok((name, terms, pos))
}

fn finish_objective(model: &mut LpModel, toks: &[Tok], line: usize) -> Result<()> {
    let (name, terms, used) = parse_expression(toks, line)?;
    if used != toks.len() {
        return Err(lp_err(line, "trailing tokens in objective"));
    }
    model.objective_name = name.ok_or_else(|| lp_err(line, "objective needs a name"))?;
    model.objective = terms;
    Ok(())
}

#[derive(PartialEq, Eq, PartialOrd, Ord, Clone, Copy, Debug)]
enum Section {
    Start,
    Objective,
    Constraints,
    Bounds,
    Binaries,
    End,
}

/// Strict reader for the dialect produced by [`write_lp`]: sections in
/// order, every constraint named, bounds limited to `var free`, each
/// variable declared at most once, and every declared variable used.
pub fn parse_lp(text: &str) -> Result<LpModel> {
    let mut model = LpModel::default();
    let mut section = Section::Start;
    let mut pending: Vec<Tok> = Vec::new();
    let mut pending_line = 0;
    let mut seen_free = BTreeSet::new();
    let mut seen_bin = BTreeSet::new();
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.split('\\').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let header = match line.to_ascii_lowercase().as_str() {
            "minimize" => Some(Section::Objective),
            "subject to" => Some(Section::Constraints),
            "bounds" => Some(Section::Bounds),
            "binaries" => Some(Section::Binaries),
            "end" => Some(Section::End),
            _ => None,
        };
        if let Some(next) = header {
            if next <= section {
                return Err(lp_err(line_no, format!("section `{line}` out of order")));
            }
            if section == Section::Objective {
                finish_objective(&mut model, &pending, pending_line)?;
                pending.clear();
            }
            if !pending.is_empty() {
                return Err(lp_err(pending_line, "unterminated expression"));
            }
            if section == Section::Start && next != Section::Objective {
                return Err(lp_err(line_no, "model must start with `Minimize`"));
            }
            section = next;
            continue;
        }
        let toks = tokenize(line, line_no)?;
        match section {
            Section::Start => return Err(lp_err(line_no, "content before `Minimize`")),
            Section::End => return Err(lp_err(line_no, "content after `End`")),
            Section::Objective => {
                if pending.is_empty() {
                    pending_line = line_no;
                }
                pending.extend(toks);
            }
            Section::Constraints => {
                if pending.is_empty() {
                    pending_line = line_no;
                }
                pending.extend(toks);
                if !pending.iter().any(|t| matches!(t, Tok::Sense(_))) {
                    continue;
                }
                let (name, terms, used) = parse_expression(&pending, pending_line)?;
                let name = name.ok_or_else(|| lp_err(pending_line, "constraint needs a name"))?;
                let sense = match pending.get(used) {
                    Some(Tok::Sense(s)) => *s,
                    other => return Err(lp_err(line_no, format!("expected sense, found {other:?}"))),
                };
                let (neg, at) = match pending.get(used + 1) {
                    Some(Tok::Minus) => (true, used + 2),
                    _ => (false, used + 1),
                };
                let rhs = match pending.get(at) {
                    Some(Tok::Num(v)) => if neg { -*v } else { *v },
                    other => return Err(lp_err(line_no, format!("expected right-hand side, found {other:?}"))),
                };
                if at + 1 != pending.len() {
                    return Err(lp_err(line_no, "trailing tokens after right-hand side"));
                }
                if model.constraints.iter().any(|c| c.name == name) {
                    return Err(lp_err(pending_line, format!("duplicate constraint `{name}`")));
                }
                model.constraints.push(Constraint { name, terms, sense, rhs });
                pending.clear();
            }
            Section::Bounds => match toks.as_slice() {
                [Tok::Ident(v), Tok::Ident(kw)] if kw.eq_ignore_ascii_case("free") => {
                    if !seen_free.insert(v.clone()) {
                        return Err(lp_err(line_no, format!("`{v}` bounded twice")));
                    }
                    model.free.push(v.clone());
                }
                _ => return Err(lp_err(line_no, "only `<var> free` bounds are accepted")),
            },
            Section::Binaries => {
                for t in toks {
                    match t {
                        Tok::Ident(v) => {
                            if !seen_bin.insert(v.clone()) {
                                return Err(lp_err(line_no, format!("`{v}` declared binary twice")));
                            }
                            model.binaries.push(v);
                        }
                        other => return Err(lp_err(line_no, format!("expected variable, found {other:?}"))),
                    }
                }
            }
        }
    }
    if section != Section::End {
        return Err(lp_err(text.lines().count(), "missing `End`"));
    }
    if !pending.is_empty() {
        return Err(lp_err(pending_line, "unterminated expression"));
    }
    if model.constraints.is_empty() {
        return Err(lp_err(0, "model has no `Subject To` constraints"));
    }
    let used: BTreeSet<&str> = model
        .objective
        .iter()
        .chain(model.constraints.iter().flat_map(|c| c.terms.iter()))
        .map(|t| t.var.as_str())
        .collect();
    for v in seen_free.iter().chain(seen_bin.iter()) {
        if !used.contains(v.as_str()) {
            return Err(lp_err(0, format!("declared variable `{v}` never used")));
        }
        if seen_free.contains(v) && seen_bin.contains(v) {
            return Err(lp_err(0, format!("`{v}` is both free and binary")));
        }
    }
    Ok(model)
}

impl LpModel {
    /// Variables not declared binary.
    pub fn continuous_variables(&self) -> Vec<&str> {
        let bins: BTreeSet<&str> = self.binaries.iter().map(String::as_str).collect();
        let mut vars: Vec<&str> = self
            .objective
            .iter()
            .chain(self.constraints.iter().flat_map(|c| c.terms.iter()))
            .map(|t| t.var.as_str())
            .filter(|v| !bins.contains(v))
            .collect();
        vars.sort_unstable();
        vars.dedup();
        vars
    }
}
