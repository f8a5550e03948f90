//! Run reports: per-block verification, solving, character and defect-one
//! results, rendered either as text (matrices with `.` for zero) or as JSON.
//! Everything here is ordered deterministically so repeated runs produce
//! byte-identical output.

use std::collections::BTreeSet;
use std::fmt::Write as _;
use std::path::Path;

use num_rational::BigRational;
use num_traits::{Signed, Zero};
use serde::Serialize;

use crate::cato::{character_from_row, classify_character, DecompMatrix, EntryState};
use crate::defect1::{chart_matrix, defect1_support, lead_character, simple_count_check, Defect1Block};
use crate::error::{Error, Result};
use crate::rational::format_rational;
use crate::repdata::{load_block, BlockSpec, DataSet, SupportAnnotation};
use crate::solver::{solve, ConstraintConfig, SolverContext, Verdict};

/// Overall outcome, ordered by severity.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Pass,
    Ambiguous,
    Mismatch,
    DataError,
}

impl Status {
    /// Process exit code: 0 success, 1 mismatch, 2 data error, 3 ambiguous.
    pub fn exit_code(self) -> i32 {
        match self {
            Status::Pass => 0,
            Status::Mismatch => 1,
            Status::DataError => 2,
            Status::Ambiguous => 3,
        }
    }

    /// Status for a failed computation. A search that hit its cap has not
    /// certified anything, so it counts as undetermined rather than broken input.
    pub fn of_error(e: &Error) -> Status {
        match e {
            Error::SearchCapExceeded { .. } | Error::SearchLimitReached { .. } => Status::Ambiguous,
            _ => Status::DataError,
        }
    }

    fn label(self) -> &'static str {
        match self {
            Status::Pass => "pass",
            Status::Ambiguous => "ambiguous",
            Status::Mismatch => "MISMATCH",
            Status::DataError => "DATA ERROR",
        }
    }
}

/// A named yes/no check with a human-readable detail line.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Check {
    pub name: String,
    pub ok: bool,
    pub detail: String,
}

/// A matrix in block order; entries are integers or unresolved domains.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct MatrixView {
    pub labels: Vec<String>,
    /// Margin annotation per row: `★`, `(k)` or empty.
    pub annotations: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

/// Character, support and dimension of one simple module.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SimpleView {
    pub label: String,
    pub support_dim: u32,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub dim: Option<String>,
    pub character: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub laurent: Option<String>,
}

/// One entry of a trace: the cell, the value or domain, the rule and its witness.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TraceLine {
    pub row: String,
    pub col: String,
    pub value: String,
    pub rule: String,
    pub witness: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SolveView {
    pub verdict: String,
    pub completions: usize,
    pub nodes: usize,
    pub constraints: Vec<String>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub undetermined: Vec<(String, String)>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub matches_expected: Option<bool>,
    pub trace: Vec<TraceLine>,
    /// Every value in `0..=cap` rejected for an initially open cell, with its reason.
    pub eliminated: Vec<TraceLine>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub contradictions: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Defect1View {
    pub labels: Vec<String>,
    pub weights: Vec<String>,
    pub support: u32,
    pub codim_plus_one: u32,
    pub count: u32,
    pub equal: bool,
}

/// Results for one block (or one stand-alone computation).
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Section {
    pub title: String,
    pub status: Status,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub checks: Vec<Check>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub matrix: Option<MatrixView>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub simples: Vec<SimpleView>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub solve: Option<SolveView>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub defect1: Option<Defect1View>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
}

impl Section {
    pub fn new(title: impl Into<String>) -> Self {
        Section {
            title: title.into(),
            status: Status::Pass,
            checks: Vec::new(),
            matrix: None,
            simples: Vec::new(),
            solve: None,
            defect1: None,
            notes: Vec::new(),
        }
    }

    /// A section that only records an error.
    pub fn from_error(title: impl Into<String>, e: &Error) -> Self {
        let mut s = Section::new(title);
        s.status = Status::of_error(e);
        s.notes.push(format!("error: {e}"));
        s
    }

    fn check(&mut self, name: &str, ok: bool, detail: String) {
        if !ok {
            self.status = self.status.max(Status::Mismatch);
        }
        self.checks.push(Check {
            name: name.to_string(),
            ok,
            detail,
        });
    }
}

/// The output of one CLI invocation.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RunReport {
    pub command: String,
    pub sections: Vec<Section>,
    pub status: Status,
}

impl RunReport {
    pub fn new(command: impl Into<String>) -> Self {
        RunReport {
            command: command.into(),
            sections: Vec::new(),
            status: Status::Pass,
        }
    }

    pub fn push(&mut self, s: Section) {
        self.status = self.status.max(s.status);
        self.sections.push(s);
    }

    pub fn exit_code(&self) -> i32 {
        self.status.exit_code()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("reports serialize")
    }

    pub fn render_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "$ {}", self.command);
        for s in &self.sections {
            render_section(&mut out, s);
        }
        let _ = writeln!(out, "status: {} (exit {})", self.status.label(), self.exit_code());
        out
    }
}

fn render_section(out: &mut String, s: &Section) {
    let _ = writeln!(out, "\n== {}: {}", s.title, s.status.label());
    if let Some(m) = &s.matrix {
        out.push_str(&render_matrix(m));
    }
    if let Some(d) = &s.defect1 {
        let _ = writeln!(out, "  weights: {}", d.weights.join(", "));
        let _ = writeln!(
            out,
            "  support of L({}): {}; simples {}; codim + 1 = {}{}",
            d.labels[0],
            d.support,
            d.count,
            d.codim_plus_one,
            if d.equal { " (equal)" } else { " (differ)" }
        );
    }
    for c in &s.checks {
        let _ = writeln!(out, "  [{}] {}: {}", if c.ok { "ok" } else { "FAIL" }, c.name, c.detail);
    }
    for v in &s.simples {
        let dim = v.dim.as_ref().map(|d| format!(", dim {d}")).unwrap_or_default();
        let _ = writeln!(out, "  L({}): support {}{dim}", v.label, v.support_dim);
        let _ = writeln!(out, "    χ = {}", v.character);
        if let Some(l) = &v.laurent {
            let _ = writeln!(out, "    χ = {l}");
        }
    }
    if let Some(v) = &s.solve {
        let _ = writeln!(
            out,
            "  verdict: {} ({} completion(s), {} node(s); constraints {})",
            v.verdict,
            v.completions,
            v.nodes,
            v.constraints.join(",")
        );
        if let Some(m) = v.matches_expected {
            let _ = writeln!(out, "  equals bundled matrix: {}", if m { "yes" } else { "NO" });
        }
        for (r, c) in &v.undetermined {
            let _ = writeln!(out, "  undetermined: [M({r}):L({c})]");
        }
        for c in &v.contradictions {
            let _ = writeln!(out, "  contradiction: {c}");
        }
        if !v.trace.is_empty() {
            let _ = writeln!(out, "  trace:");
            for t in &v.trace {
                let _ = writeln!(
                    out,
                    "    [M({}):L({})] ∈ {}  by {}: {}",
                    t.row, t.col, t.value, t.rule, t.witness
                );
            }
        }
        if !v.eliminated.is_empty() {
            let _ = writeln!(out, "  eliminated:");
            for t in &v.eliminated {
                let _ = writeln!(
                    out,
                    "    [M({}):L({})] ≠ {}  by {}: {}",
                    t.row, t.col, t.value, t.rule, t.witness
                );
            }
        }
    }
    for n in &s.notes {
        let _ = writeln!(out, "  {n}");
    }
}

/// Text layout: a header of column labels, then one row per Verma with its
/// margin annotation; zeros print as `.`.
pub fn render_matrix(m: &MatrixView) -> String {
    let n = m.labels.len();
    let label_w = m.labels.iter().map(|l| l.chars().count()).max().unwrap_or(0);
    let ann_w = m.annotations.iter().map(|a| a.chars().count()).max().unwrap_or(0);
    let col_w: Vec<usize> = (0..n)
        .map(|j| {
            m.rows
                .iter()
                .map(|r| r[j].chars().count())
                .max()
                .unwrap_or(1)
                .max(m.labels[j].chars().count())
        })
        .collect();
    let pad = |s: &str, w: usize| format!("{}{s}", " ".repeat(w.saturating_sub(s.chars().count())));
    let mut out = String::new();
    out.push_str(&" ".repeat(ann_w + label_w + 3));
    for j in 0..n {
        out.push(' ');
        out.push_str(&pad(&m.labels[j], col_w[j]));
    }
    out.push('\n');
    for (i, row) in m.rows.iter().enumerate() {
        out.push_str(&format!(
            "  {} {} ",
            pad(&m.annotations[i], ann_w),
            pad(&m.labels[i], label_w)
        ));
        for j in 0..n {
            out.push(' ');
            out.push_str(&pad(&row[j], col_w[j]));
        }
        out.push('\n');
    }
    out
}

fn annotation(b: &BlockSpec, label: &str) -> String {
    match b.support.get(label) {
        Some(SupportAnnotation::Finite) => "★".into(),
        Some(SupportAnnotation::Dim(k)) => format!("({k})"),
        None => String::new(),
    }
}

fn cell_text(e: EntryState) -> String {
    match e.known() {
        Some(0) => ".".into(),
        Some(v) => v.to_string(),
        None => e.to_string(),
    }
}

pub fn matrix_view(m: &DecompMatrix) -> MatrixView {
    let b = &m.block;
    MatrixView {
        labels: b.irreps.clone(),
        annotations: b.irreps.iter().map(|l| annotation(b, l)).collect(),
        rows: m
            .entries
            .iter()
            .map(|r| r.iter().map(|&e| cell_text(e)).collect())
            .collect(),
    }
}

fn integer_view(b: &BlockSpec, m: &[Vec<i64>]) -> MatrixView {
    MatrixView {
        labels: b.irreps.clone(),
        annotations: b.irreps.iter().map(|l| annotation(b, l)).collect(),
        rows: m
            .iter()
            .map(|r| {
                r.iter()
                    .map(|&v| if v == 0 { ".".into() } else { v.to_string() })
                    .collect()
            })
            .collect(),
    }
}

/// Resolves a block given as a file path or as `GROUP/c_P_Q/name`.
pub fn load_block_id(data: &DataSet, id: &str) -> Result<BlockSpec> {
    let path = Path::new(id);
    if path.is_file() {
        return load_block(path, data);
    }
    let parts: Vec<&str> = id.trim_end_matches(".json").split('/').collect();
    if let [group, cdir, name] = parts[..] {
        if let Some((p, q)) = cdir.strip_prefix("c_").and_then(|r| r.split_once('_')) {
            return data.block(group, &format!("{p}/{q}"), name);
        }
    }
    Err(Error::MissingData(format!(
        "`{id}` is neither a block file nor of the form GROUP/c_P_Q/name"
    )))
}

/// The decomposition matrix a block carries: its bundled matrix, or the
/// bidiagonal chart for defect-one blocks.
pub fn block_matrix(b: &BlockSpec) -> Result<Option<DecompMatrix>> {
    if b.expected_matrix.is_some() {
        DecompMatrix::expected(b).map(Some)
    } else if b.defect == Some(1) {
        chart_matrix(b).map(Some)
    } else {
        Ok(None)
    }
}

/// Character, support and dimension of the simple with inverse row `row`.
pub fn simple_view(b: &BlockSpec, label: &str, row: &[i64]) -> Result<SimpleView> {
    let chi = character_from_row(b, row)?;
    let class = classify_character(&chi)?;
    let reduced = chi.pole_order_at_one()?.reduced;
    Ok(SimpleView {
        label: label.to_string(),
        support_dim: class.support_dim,
        dim: class.dim.map(|d| d.to_string()),
        character: chi.to_string(),
        laurent: reduced.laurent_form(),
    })
}

/// Checks a block's bundled matrix: inverse, annotations, characters,
/// finite dimensions and non-negative graded dimensions through `cfg.series_depth`.
pub fn verify_block(b: &BlockSpec, cfg: &ConstraintConfig) -> Section {
    let mut s = Section::new(b.title());
    if let Err(e) = verify_into(&mut s, b, cfg) {
        s.status = s.status.max(Status::of_error(&e));
        s.notes.push(format!("error: {e}"));
    }
    s
}

fn verify_into(s: &mut Section, b: &BlockSpec, cfg: &ConstraintConfig) -> Result<()> {
    let Some(m) = block_matrix(b)? else {
        s.notes
            .push("no decomposition matrix bundled; nothing to verify".into());
        return Ok(());
    };
    s.matrix = Some(matrix_view(&m));
    let a = m.invert()?;

    if let Some(printed) = &b.expected_inverse {
        let diffs: Vec<String> = cells_differing(&a, printed)
            .into_iter()
            .map(|(i, j)| {
                format!(
                    "[{}, {}] computed {} but bundled {}",
                    b.irreps[i],
                    b.irreps[j],
                    a[i][j],
                    printed
                        .get(i)
                        .and_then(|r| r.get(j))
                        .map_or("-".into(), |v| v.to_string())
                )
            })
            .collect();
        let detail = if diffs.is_empty() {
            format!("{n}×{n} inverse matches the bundled inverse", n = b.len())
        } else {
            diffs.join("; ")
        };
        s.check("inverse", diffs.is_empty(), detail);
    }

    let report = m.check_annotations()?;
    let detail = if report.all_match() {
        format!("{} rows match their support annotations", report.checked)
    } else {
        report
            .mismatches
            .iter()
            .map(|x| {
                format!(
                    "L({}) has support {} but the margin says {}",
                    x.label, x.computed, x.expected
                )
            })
            .collect::<Vec<_>>()
            .join("; ")
    };
    s.check("annotations", report.all_match(), detail);

    let mut negative = Vec::new();
    let mut asymmetric = Vec::new();
    let mut flagged_infinite = Vec::new();
    for (i, label) in b.irreps.iter().enumerate() {
        let view = simple_view(b, label, &a[i])?;
        let chi = character_from_row(b, &a[i])?;
        if let Some((deg, d)) = chi
            .graded_dims(cfg.series_depth)
            .into_iter()
            .find(|(_, d)| d.is_negative())
        {
            negative.push(format!(
                "L({label}) has dimension {d} in degree {}",
                format_rational(&deg)
            ));
        }
        if view.support_dim == 0 {
            let reduced = chi.pole_order_at_one()?.reduced;
            let coeffs = reduced.coefficients();
            let centred = reduced.offset() + BigRational::new((coeffs.len() as i64 - 1).into(), 2.into());
            if coeffs.iter().ne(coeffs.iter().rev()) || !centred.is_zero() {
                asymmetric.push(label.clone());
            }
        } else if b.finite_dim_flags.contains(label) {
            flagged_infinite.push(label.clone());
        }
        s.simples.push(view);
    }
    s.check(
        "graded dimensions",
        negative.is_empty(),
        if negative.is_empty() {
            format!("all non-negative through depth {}", cfg.series_depth)
        } else {
            negative.join("; ")
        },
    );
    let finite: Vec<&SimpleView> = s.simples.iter().filter(|v| v.support_dim == 0).collect();
    if !finite.is_empty() || !flagged_infinite.is_empty() {
        let ok = asymmetric.is_empty() && flagged_infinite.is_empty();
        let detail = if ok {
            finite
                .iter()
                .map(|v| format!("dim L({}) = {}", v.label, v.dim.as_deref().unwrap_or("?")))
                .collect::<Vec<_>>()
                .join(", ")
        } else {
            let mut parts: Vec<String> = asymmetric
                .iter()
                .map(|l| format!("χ of L({l}) is not symmetric about degree 0"))
                .collect();
            parts.extend(
                flagged_infinite
                    .iter()
                    .map(|l| format!("L({l}) is flagged finite but has positive support")),
            );
            parts.join("; ")
        };
        s.check("finite dimensions", ok, detail);
    }
    Ok(())
}

fn cells_differing(a: &[Vec<i64>], b: &[Vec<i64>]) -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    for (i, row) in a.iter().enumerate() {
        for (j, &v) in row.iter().enumerate() {
            if b.get(i).and_then(|r| r.get(j)) != Some(&v) {
                out.push((i, j));
            }
        }
    }
    out
}

/// Joins a block with the bundled block of its sign duals, when there is one.
pub fn with_dual(data: &DataSet, b: &BlockSpec) -> Result<BlockSpec> {
    match data.dual_block(b)? {
        Some(d) => BlockSpec::join(&[b.clone(), d]),
        None => Ok(b.clone()),
    }
}

/// Propagation, search and certification on `b`, compared with the bundled matrix when present.
pub fn solve_block(b: &BlockSpec, ctx: Option<SolverContext<'_>>, cfg: &ConstraintConfig) -> Section {
    let mut s = Section::new(b.title());
    if let Some(c) = ctx {
        s.notes.push(format!(
            "context: {} at c={}",
            c.parabolic.group,
            format_rational(&c.parabolic.c)
        ));
    }
    let (verdict, r) = match solve(b, ctx, cfg) {
        Ok(x) => x,
        Err(e) => {
            s.status = Status::of_error(&e);
            s.notes.push(format!("error: {e}"));
            return s;
        }
    };
    let survivors = |i: usize, j: usize| -> BTreeSet<i64> { r.completions.iter().map(|m| m[i][j]).collect() };
    let mut eliminated = Vec::new();
    for (i, j) in r.initial.unknown_cells() {
        let keep = survivors(i, j);
        for v in 0..=cfg.search_cap {
            if keep.contains(&(v as i64)) {
                continue;
            }
            let (rule, witness) = r
                .explanation(&b.irreps[i], &b.irreps[j], v)
                .map(|(rule, w)| (rule.to_string(), w))
                .unwrap_or_else(|| ("-".into(), "no recorded reason".into()));
            eliminated.push(TraceLine {
                row: b.irreps[i].clone(),
                col: b.irreps[j].clone(),
                value: v.to_string(),
                rule,
                witness,
            });
        }
    }
    let trace = r
        .trace
        .iter()
        .map(|t| TraceLine {
            row: t.row.clone(),
            col: t.col.clone(),
            value: t.value.clone(),
            rule: t.rule.to_string(),
            witness: t.witness.clone(),
        })
        .collect();
    let mut view = SolveView {
        verdict: String::new(),
        completions: r.completions.len(),
        nodes: r.nodes,
        constraints: cfg.rules.iter().map(|r| r.to_string()).collect(),
        undetermined: Vec::new(),
        matches_expected: None,
        trace,
        eliminated,
        contradictions: r
            .contradictions
            .iter()
            .map(|(rule, w)| format!("{rule}: {w}"))
            .collect(),
    };
    match verdict {
        Verdict::Unique(m) => {
            view.verdict = "unique".into();
            if let Some(e) = &b.expected_matrix {
                let same = e == &m;
                view.matches_expected = Some(same);
                if !same {
                    s.status = Status::Mismatch;
                    for (i, j) in cells_differing(&m, e) {
                        s.notes.push(format!(
                            "[M({}):L({})] solved as {} but bundled as {}",
                            b.irreps[i], b.irreps[j], m[i][j], e[i][j]
                        ));
                    }
                }
            }
            s.matrix = Some(integer_view(b, &m));
        }
        Verdict::Ambiguous { count, cells } => {
            view.verdict = if r.exhaustive {
                format!("ambiguous ({count} completions)")
            } else {
                format!("ambiguous (at least {count} completions; search stopped at its limit)")
            };
            view.undetermined = cells;
            s.status = Status::Ambiguous;
            s.matrix = Some(matrix_view(&r.propagated));
            if let Some(e) = &b.expected_matrix {
                view.matches_expected = Some(r.completions.contains(e));
            }
        }
        Verdict::Infeasible => {
            view.verdict = "infeasible".into();
            s.status = Status::Mismatch;
            s.matrix = Some(matrix_view(&r.propagated));
        }
    }
    s.solve = Some(view);
    s
}

/// Character of one simple of a block.
pub fn char_section(b: &BlockSpec, label: &str) -> Section {
    let mut s = Section::new(format!("{} L({label})", b.title()));
    let run = || -> Result<SimpleView> {
        let m = block_matrix(b)?.ok_or_else(|| Error::MissingData(format!("{} has no matrix", b.title())))?;
        let i = b.position(label)?;
        simple_view(b, label, &m.invert()?[i])
    };
    match run() {
        Ok(v) => s.simples.push(v),
        Err(e) => return Section::from_error(s.title, &e),
    }
    s
}

/// Supports of every simple of a block.
pub fn support_section(b: &BlockSpec) -> Section {
    let mut s = Section::new(b.title());
    let run = |s: &mut Section| -> Result<()> {
        let m = block_matrix(b)?.ok_or_else(|| Error::MissingData(format!("{} has no matrix", b.title())))?;
        s.matrix = Some(matrix_view(&m));
        let a = m.invert()?;
        for (i, label) in b.irreps.iter().enumerate() {
            let chi = character_from_row(b, &a[i])?;
            let class = classify_character(&chi)?;
            s.simples.push(SimpleView {
                label: label.clone(),
                support_dim: class.support_dim,
                dim: class.dim.map(|d| d.to_string()),
                character: chi.to_string(),
                laurent: None,
            });
        }
        let report = m.check_annotations()?;
        s.check(
            "annotations",
            report.all_match(),
            format!(
                "{} of {} rows match",
                report.checked - report.mismatches.len(),
                report.checked
            ),
        );
        Ok(())
    };
    if let Err(e) = run(&mut s) {
        return Section::from_error(s.title, &e);
    }
    s
}

/// Generated matrix, support of the lowest simple and the count check for a defect-one block.
pub fn defect1_section(title: impl Into<String>, d: &Defect1Block, printed_support: Option<u32>) -> Section {
    let mut s = Section::new(title);
    let run = |s: &mut Section| -> Result<()> {
        let spec = d.to_block_spec("W", &BigRational::zero());
        s.matrix = Some(integer_view(&spec, &crate::defect1::bidiagonal(d.len())));
        let support = defect1_support(d)?;
        let check = simple_count_check(d)?;
        s.defect1 = Some(Defect1View {
            labels: d.labels.clone(),
            weights: d.weights.iter().map(format_rational).collect(),
            support,
            codim_plus_one: check.codim_plus_one,
            count: check.count,
            equal: check.equal,
        });
        let chi = lead_character(d)?;
        s.simples.push(SimpleView {
            label: d.labels[0].clone(),
            support_dim: support,
            dim: classify_character(&chi)?.dim.map(|x| x.to_string()),
            character: chi.to_string(),
            laurent: None,
        });
        if let Some(p) = printed_support {
            s.check("support", p == support, format!("computed {support}, listed {p}"));
        }
        s.check(
            "count",
            check.equal,
            format!(
                "{} simples, codimension of support plus one is {}",
                check.count, check.codim_plus_one
            ),
        );
        Ok(())
    };
    if let Err(e) = run(&mut s) {
        return Section::from_error(s.title, &e);
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn severity_order_picks_worst() {
        assert_eq!(Status::Pass.max(Status::Ambiguous), Status::Ambiguous);
        assert_eq!(Status::Ambiguous.max(Status::Mismatch), Status::Mismatch);
        assert_eq!(Status::Mismatch.max(Status::DataError), Status::DataError);
        let codes: Vec<i32> = [Status::Pass, Status::Mismatch, Status::DataError, Status::Ambiguous]
            .iter()
            .map(|s| s.exit_code())
            .collect();
        assert_eq!(codes, vec![0, 1, 2, 3]);
    }

    #[test]
    fn zeros_render_as_dots() {
        let m = MatrixView {
            labels: vec!["a".into(), "bb".into()],
            annotations: vec!["★".into(), String::new()],
            rows: vec![vec!["1".into(), ".".into()], vec![".".into(), "1".into()]],
        };
        let text = render_matrix(&m);
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines.len(), 3);
        assert!(lines[1].contains('★') && lines[1].trim_end().ends_with('.'));
        assert!(lines[2].trim_end().ends_with('1'));
    }

    #[test]
    fn failed_check_marks_mismatch() {
        let mut s = Section::new("x");
        s.check("a", true, String::new());
        assert_eq!(s.status, Status::Pass);
        s.check("b", false, String::new());
        assert_eq!(s.status, Status::Mismatch);
        let mut r = RunReport::new("test");
        r.push(s);
        assert_eq!(r.exit_code(), 1);
    }

    #[test]
    fn cap_errors_are_undetermined() {
        let e = Error::SearchCapExceeded {
            row: "a".into(),
            col: "b".into(),
            cap: 4,
        };
        assert_eq!(Status::of_error(&e), Status::Ambiguous);
        assert_eq!(Status::of_error(&Error::MissingData("x".into())), Status::DataError);
    }
}
