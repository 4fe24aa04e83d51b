//! CPLEX LP and free MPS writers, plus a token-level LP reader used to audit
//! emitted files.

use std::collections::{BTreeSet, HashSet};
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use super::model::{MilpModel, Sense};
use crate::error::{Error, Result};
use crate::scalar::Scalar;

const TERMS_PER_LINE: usize = 6;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ModelFormat {
    Lp,
    Mps,
}

impl ModelFormat {
    pub fn extension(self) -> &'static str {
        match self {
            ModelFormat::Lp => "lp",
            ModelFormat::Mps => "mps",
        }
    }
}

impl FromStr for ModelFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "lp" => Ok(ModelFormat::Lp),
            "mps" => Ok(ModelFormat::Mps),
            other => Err(Error::Config(format!("unknown model format `{other}` (lp or mps)"))),
        }
    }
}

fn num<T: Scalar>(v: T) -> String {
    let x = v.as_f64();
    let a = x.abs();
    if a == 0.0 || (1e-4..1e12).contains(&a) {
        format!("{x}")
    } else {
        format!("{x:e}")
    }
}

fn write_terms<T: Scalar>(out: &mut String, model: &MilpModel<T>, terms: &[(usize, T)]) {
    for (k, &(var, coef)) in terms.iter().enumerate() {
        if k > 0 && k % TERMS_PER_LINE == 0 {
            out.push_str("\n   ");
        }
        let (sign, mag) = if coef < T::zero() { ("-", -coef) } else { ("+", coef) };
        if k == 0 && sign == "+" {
            let _ = write!(out, " {} {}", num(mag), model.vars[var]);
        } else {
            let _ = write!(out, " {sign} {} {}", num(mag), model.vars[var]);
        }
    }
}

/// Renders the model in CPLEX LP format.
pub fn emit_lp<T: Scalar>(model: &MilpModel<T>) -> String {
    let mut out = String::new();
    let counts = model.counts();
    let _ = writeln!(
        out,
        "\\ VM and cloudlet placement: {} variables ({} binary), {} rows",
        model.vars.len(),
        counts.binaries,
        counts.rows
    );
    out.push_str("Minimize\n obj:");
    write_terms(&mut out, model, &model.objective);
    out.push_str("\nSubject To\n");
    for row in &model.rows {
        let _ = write!(out, " {}:", row.name());
        write_terms(&mut out, model, &row.terms);
        let _ = writeln!(out, " {} {}", row.sense.symbol(), num(row.rhs));
    }
    out.push_str("Binary\n");
    let mut line = 0;
    for v in model.vars.iter().filter(|v| v.is_binary()) {
        let _ = write!(out, " {v}");
        line += 1;
        if line % 10 == 0 {
            out.push('\n');
        }
    }
    if line % 10 != 0 {
        out.push('\n');
    }
    out.push_str("End\n");
    out
}

/// Renders the model in free MPS format.
pub fn emit_mps<T: Scalar>(model: &MilpModel<T>) -> String {
    let mut columns: Vec<Vec<(String, T)>> = vec![Vec::new(); model.vars.len()];
    for &(var, coef) in &model.objective {
        columns[var].push(("obj".to_string(), coef));
    }
    for row in &model.rows {
        let name = row.name();
        for &(var, coef) in &row.terms {
            columns[var].push((name.clone(), coef));
        }
    }

    let mut out = String::from("NAME ponvm\nROWS\n N obj\n");
    for row in &model.rows {
        let kind = match row.sense {
            Sense::Le => "L",
            Sense::Ge => "G",
            Sense::Eq => "E",
        };
        let _ = writeln!(out, " {kind} {}", row.name());
    }
    out.push_str("COLUMNS\n");
    let mut in_marker = false;
    for (var, entries) in model.vars.iter().zip(&columns) {
        if var.is_binary() != in_marker {
            let tag = if in_marker { "INTEND" } else { "INTORG" };
            let _ = writeln!(out, "    MARKER 'MARKER' '{tag}'");
            in_marker = !in_marker;
        }
        for (row, coef) in entries {
            let _ = writeln!(out, "    {var} {row} {}", num(*coef));
        }
    }
    if in_marker {
        out.push_str("    MARKER 'MARKER' 'INTEND'\n");
    }
    out.push_str("RHS\n");
    for row in model.rows.iter().filter(|r| r.rhs != T::zero()) {
        let _ = writeln!(out, "    rhs {} {}", row.name(), num(row.rhs));
    }
    out.push_str("BOUNDS\n");
    for v in model.vars.iter().filter(|v| v.is_binary()) {
        let _ = writeln!(out, " BV bnd {v}");
    }
    out.push_str("ENDATA\n");
    out
}

/// Writes `model.<ext>` and the companion `names.csv` into `dir`.
pub fn write_model_files<T: Scalar>(model: &MilpModel<T>, dir: &Path, format: ModelFormat) -> Result<(PathBuf, PathBuf)> {
    fs::create_dir_all(dir)?;
    let path = dir.join(format!("model.{}", format.extension()));
    let text = match format {
        ModelFormat::Lp => emit_lp(model),
        ModelFormat::Mps => emit_mps(model),
    };
    fs::write(&path, text)?;
    let names = dir.join("names.csv");
    fs::write(&names, model.name_map())?;
    Ok((path, names))
}

/// Counts recovered from an LP file.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LpSummary {
    pub variables: usize,
    pub constraints: usize,
    pub binaries: usize,
    pub objective_terms: usize,
}

#[derive(Clone, Copy, PartialEq)]
enum Section {
    Preamble,
    Objective,
    Constraints,
    Bounds,
    Binary,
    General,
    End,
}

fn section_of(line: &str) -> Option<Section> {
    let l = line.trim().to_ascii_lowercase();
    match l.as_str() {
        "minimize" | "minimise" | "minimum" | "min" | "maximize" | "maximise" | "maximum" | "max" => {
            Some(Section::Objective)
        }
        "subject to" | "such that" | "st" | "s.t." => Some(Section::Constraints),
        "bounds" | "bound" => Some(Section::Bounds),
        "binary" | "binaries" | "bin" => Some(Section::Binary),
        "general" | "generals" | "gen" => Some(Section::General),
        "end" => Some(Section::End),
        _ => None,
    }
}

fn is_sense(tok: &str) -> bool {
    matches!(tok, "<=" | ">=" | "=" | "<" | ">" | "=<" | "=>")
}

fn is_identifier(tok: &str) -> bool {
    let first = tok.chars().next();
    first.is_some_and(|c| c.is_ascii_alphabetic() || c == '_')
        && !tok.ends_with(':')
        && !matches!(tok.to_ascii_lowercase().as_str(), "free" | "inf" | "infinity")
}

/// Reads an LP file token by token and counts variables, rows and binaries.
pub fn parse_lp_summary(text: &str) -> Result<LpSummary> {
    let mut section = Section::Preamble;
    let mut vars: BTreeSet<String> = BTreeSet::new();
    let mut binaries: HashSet<String> = HashSet::new();
    let mut constraints = 0;
    let mut objective_terms = 0;
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('\\').next().unwrap_or("");
        if line.trim().is_empty() {
            continue;
        }
        if let Some(s) = section_of(line) {
            section = s;
            continue;
        }
        let loc = || format!("line {}", lineno + 1);
        for tok in line.split_whitespace() {
            match section {
                Section::Preamble => return Err(Error::parse(loc(), "content before the objective section")),
                Section::End => return Err(Error::parse(loc(), "content after End")),
                Section::Objective | Section::Constraints => {
                    if is_sense(tok) {
                        if section == Section::Objective {
                            return Err(Error::parse(loc(), "comparison in the objective"));
                        }
                        constraints += 1;
                    } else if is_identifier(tok) {
                        vars.insert(tok.to_string());
                        if section == Section::Objective {
                            objective_terms += 1;
                        }
                    } else if !tok.ends_with(':') && !matches!(tok, "+" | "-") && tok.parse::<f64>().is_err() {
                        return Err(Error::parse(loc(), format!("unexpected token `{tok}`")));
                    }
                }
                Section::Bounds => {
                    if is_identifier(tok) {
                        vars.insert(tok.to_string());
                    }
                }
                Section::Binary | Section::General => {
                    if !is_identifier(tok) {
                        return Err(Error::parse(loc(), format!("`{tok}` is not a variable name")));
                    }
                    vars.insert(tok.to_string());
                    if section == Section::Binary {
                        binaries.insert(tok.to_string());
                    }
                }
            }
        }
    }
    if section != Section::End {
        return Err(Error::parse("end of file", "missing End"));
    }
    Ok(LpSummary { variables: vars.len(), constraints, binaries: binaries.len(), objective_terms })
}
