//! Completion of partially known decomposition matrices: interval domains,
//! monotone propagation of the structural rules, exhaustive search over the
//! remaining cells, and a uniqueness verdict with per-value elimination traces.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use num_traits::ToPrimitive;
use serde::Serialize;

use crate::cato::{character_from_row, classify_character, Basis, DecompMatrix, EntryState, GrothendieckVector};
use crate::error::{Error, Result};
use crate::functors::{
    context_for, peel_to_simples, res_vector, support_bound_from_induction, ParabolicContext, PeelOutcome,
};
use crate::repdata::{BlockSpec, BranchingTable, DataSet};

/// The constraint families used by propagation and search.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum Rule {
    /// Unit diagonal and block-order zeros.
    C1,
    /// Columns of simples with full support, read from the Hecke algebra.
    C2,
    /// `dim Hom(M(σ), M(τ)) ≤ [M(τ):L(σ)]`.
    C3a,
    /// `dim Hom(M(σ), M(τ)) = dim Hom(M(τ'), M(σ'))`.
    C3b,
    /// Without an intermediate chain, multiplicity equals the Hom dimension.
    C3c,
    /// `[M(τ):L(σ)] ≤ dim Hom(M(σ), M(τ)) + Σ_{τ<ν<σ} [M(τ):L(ν)]·[M(ν):L(σ)]`.
    C3d,
    /// Verma expansions of finite-dimensional simples are sign-symmetric.
    C4,
    /// Graded dimensions of every simple are non-negative.
    C5,
    /// Support dimensions: full support exactly for Hecke columns, and bounds from induction.
    C6,
    /// Restrictions of simples to a parabolic category must be classes of modules.
    C7,
    /// `dim L[n] ≥ dim L[-n]` for `n > 0`.
    C8,
}

impl Rule {
    pub const ALL: [Rule; 11] = [
        Rule::C1,
        Rule::C2,
        Rule::C3a,
        Rule::C3b,
        Rule::C3c,
        Rule::C3d,
        Rule::C4,
        Rule::C5,
        Rule::C6,
        Rule::C7,
        Rule::C8,
    ];

    pub fn describe(self) -> &'static str {
        match self {
            Rule::C1 => "unitriangularity",
            Rule::C2 => "Hecke column",
            Rule::C3a => "Hom bounded by multiplicity",
            Rule::C3b => "sign-dual Hom symmetry",
            Rule::C3c => "no intermediate chain: multiplicity = Hom",
            Rule::C3d => "multiplicity bounded by Hom plus intermediate chains",
            Rule::C4 => "sign-symmetric expansion of a finite-dimensional simple",
            Rule::C5 => "non-negative graded dimensions",
            Rule::C6 => "support dimension",
            Rule::C7 => "restriction is not a module",
            Rule::C8 => "dim L[n] ≥ dim L[-n]",
        }
    }
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self:?}")
    }
}

impl FromStr for Rule {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Rule::ALL
            .into_iter()
            .find(|r| format!("{r:?}").eq_ignore_ascii_case(s.trim()))
            .ok_or_else(|| Error::schema("constraints", format!("unknown constraint `{s}`")))
    }
}

/// Parses a list such as `C1,C2,C3` (`C3` expands to `C3a` through `C3d`; `all` enables everything).
pub fn parse_rules(s: &str) -> Result<BTreeSet<Rule>> {
    let mut out = BTreeSet::new();
    for part in s.split(',').map(str::trim).filter(|p| !p.is_empty()) {
        if part.eq_ignore_ascii_case("C3") {
            out.extend([Rule::C3a, Rule::C3b, Rule::C3c, Rule::C3d]);
        } else if part.eq_ignore_ascii_case("all") {
            out.extend(Rule::ALL);
        } else {
            out.insert(part.parse()?);
        }
    }
    Ok(out)
}

/// Which constraints run, the largest entry value searched, and the expansion depth.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConstraintConfig {
    pub rules: BTreeSet<Rule>,
    pub search_cap: u32,
    pub series_depth: u32,
    /// The search stops after visiting this many nodes.
    pub node_limit: usize,
    /// The search stops after finding this many completions.
    pub completion_limit: usize,
}

impl Default for ConstraintConfig {
    fn default() -> Self {
        ConstraintConfig {
            rules: Rule::ALL.into_iter().collect(),
            search_cap: 4,
            series_depth: 40,
            node_limit: 20_000,
            completion_limit: 100,
        }
    }
}

impl ConstraintConfig {
    pub fn with_rules(rules: BTreeSet<Rule>) -> Self {
        ConstraintConfig {
            rules,
            ..Self::default()
        }
    }

    pub fn without(mut self, rules: &[Rule]) -> Self {
        for r in rules {
            self.rules.remove(r);
        }
        self
    }

    pub fn on(&self, r: Rule) -> bool {
        self.rules.contains(&r)
    }

    pub fn validate(&self) -> Result<()> {
        if self.search_cap == 0 || self.series_depth == 0 || self.node_limit == 0 || self.completion_limit < 2 {
            return Err(Error::schema("constraint config", "caps must be positive"));
        }
        Ok(())
    }
}

/// Interval bounds on `dim Hom(M(σ), M(τ))`, indexed `[σ][τ]` in block order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HomBoundTable {
    pub cells: Vec<Vec<EntryState>>,
}

impl HomBoundTable {
    /// `[0, ∞)` where a map can exist (`σ` not earlier than `τ`), 1 on the diagonal, 0 elsewhere.
    pub fn new(block: &BlockSpec) -> Result<Self> {
        let n = block.len();
        let mut cells = vec![vec![EntryState::Known(0); n]; n];
        for (s, row) in cells.iter_mut().enumerate() {
            for (t, cell) in row.iter_mut().enumerate() {
                *cell = if s == t {
                    EntryState::Known(1)
                } else if block.entry_allowed(t, s) {
                    EntryState::FREE
                } else {
                    EntryState::Known(0)
                };
            }
        }
        let mut table = HomBoundTable { cells };
        for h in &block.hom_hints {
            let (s, t) = (block.position(&h.from)?, block.position(&h.to)?);
            table.cells[s][t] = table.cells[s][t]
                .meet(h.value, Some(h.value))
                .ok_or_else(|| Error::EmptyDomain {
                    row: h.to.clone(),
                    col: h.from.clone(),
                    reason: format!("Hom hint {} contradicts block order", h.value),
                })?;
        }
        Ok(table)
    }

    /// Whether the symmetry of sign-dual Hom spaces holds for every pair of known cells.
    pub fn respects_symmetry(&self, block: &BlockSpec) -> bool {
        let n = block.len();
        (0..n).all(|s| {
            (0..n).all(|t| match (block.dual_index(t), block.dual_index(s)) {
                (Some(td), Some(sd)) => match (self.cells[s][t].known(), self.cells[td][sd].known()) {
                    (Some(a), Some(b)) => a == b,
                    _ => true,
                },
                _ => true,
            })
        })
    }
}

/// One narrowing or elimination with the rule responsible.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TraceEvent {
    pub row: String,
    pub col: String,
    /// The domain after narrowing, rendered.
    pub value: String,
    #[serde(skip)]
    pub domain: EntryState,
    pub rule: Rule,
    pub witness: String,
}

/// Functor data available to the search.
#[derive(Clone, Copy, Debug)]
pub struct SolverContext<'a> {
    pub parabolic: &'a ParabolicContext,
    pub branching: Option<&'a BranchingTable>,
}

impl<'a> SolverContext<'a> {
    /// The bundled context matching a block's group and parameter, with the
    /// branching table from that group to the context's group when bundled.
    pub fn for_block(contexts: &'a [ParabolicContext], data: &'a DataSet, b: &BlockSpec) -> Option<Self> {
        let parabolic = context_for(contexts, b)?;
        Some(SolverContext {
            parabolic,
            branching: data.branching(&parabolic.parent, &parabolic.group).ok(),
        })
    }
}

/// A contradiction found while checking constraints.
#[derive(Clone, Debug, PartialEq, Eq)]
struct Violation {
    rule: Rule,
    witness: String,
}

/// State carried through propagation and search.
#[derive(Clone, Debug)]
pub struct SolverState {
    pub matrix: DecompMatrix,
    pub hom: HomBoundTable,
}

impl SolverState {
    /// Initial domains for a block under the given configuration.
    pub fn initial(block: &BlockSpec, cfg: &ConstraintConfig) -> Result<Self> {
        let mut b = block.clone();
        if !cfg.on(Rule::C2) {
            b.hecke_columns.clear();
        }
        Ok(SolverState {
            matrix: DecompMatrix::with_unknowns(&b)?,
            hom: HomBoundTable::new(block)?,
        })
    }
}

fn label(b: &BlockSpec, i: usize) -> &str {
    &b.irreps[i]
}

#[allow(clippy::too_many_arguments)]
fn narrow(
    state: &mut SolverState,
    i: usize,
    j: usize,
    lo: u32,
    hi: Option<u32>,
    rule: Rule,
    witness: impl FnOnce() -> String,
    trace: &mut Vec<TraceEvent>,
) -> Result<bool> {
    let cur = state.matrix.entries[i][j];
    let new = cur.meet(lo, hi).ok_or_else(|| Error::EmptyDomain {
        row: label(&state.matrix.block, i).to_string(),
        col: label(&state.matrix.block, j).to_string(),
        reason: format!("{rule} ({}) conflicts with domain {cur}", rule.describe()),
    })?;
    if new == cur {
        return Ok(false);
    }
    state.matrix.entries[i][j] = new;
    trace.push(TraceEvent {
        row: label(&state.matrix.block, i).to_string(),
        col: label(&state.matrix.block, j).to_string(),
        value: new.to_string(),
        domain: new,
        rule,
        witness: witness(),
    });
    Ok(true)
}

fn narrow_hom(state: &mut SolverState, s: usize, t: usize, lo: u32, hi: Option<u32>, rule: Rule) -> Result<bool> {
    let cur = state.hom.cells[s][t];
    let new = cur.meet(lo, hi).ok_or_else(|| Error::EmptyDomain {
        row: label(&state.matrix.block, t).to_string(),
        col: label(&state.matrix.block, s).to_string(),
        reason: format!("{rule} Hom bound conflicts with {cur}"),
    })?;
    if new == cur {
        return Ok(false);
    }
    state.hom.cells[s][t] = new;
    Ok(true)
}

/// Whether `τ = ν_{k+1} < ν_k < … < ν_0 = σ` with `k > 0` could exist with every link possibly positive.
fn chain_possible(m: &DecompMatrix, i: usize, j: usize) -> bool {
    let possible = |a: usize, b: usize| m.entries[a][b].hi() != Some(0);
    // reach[v]: a path of length ≥ 1 from v to j through possibly positive links.
    let n = m.n();
    let mut reach = vec![false; n];
    for v in (i + 1..j).rev() {
        reach[v] = possible(v, j) || (v + 1..j).any(|w| reach[w] && possible(v, w));
    }
    (i + 1..j).any(|v| possible(i, v) && reach[v])
}

/// Runs the enabled structural rules to a fixed point, then the row checks.
pub fn propagate(state: &mut SolverState, cfg: &ConstraintConfig, trace: &mut Vec<TraceEvent>) -> Result<()> {
    if cfg.on(Rule::C5) {
        dimension_bounds(state, trace)?;
    }
    loop {
        let mut changed = false;
        changed |= propagate_hom(state, cfg, trace)?;
        changed |= shave(state, cfg, trace)?;
        if !changed {
            break;
        }
    }
    row_checks(state, cfg)
}

/// The cheaper propagation used inside the search: the Hom rules and the row checks, without shaving.
fn propagate_light(state: &mut SolverState, cfg: &ConstraintConfig, trace: &mut Vec<TraceEvent>) -> Result<()> {
    propagate_hom(state, cfg, trace)?;
    row_checks(state, cfg)
}

/// `[M(τ):L(σ)]·dim σ ≤ dim M(τ)[h_σ] = dim τ · C(k+r−1, r−1)` with `k = h_σ − h_τ`.
fn dimension_bounds(state: &mut SolverState, trace: &mut Vec<TraceEvent>) -> Result<()> {
    let b = state.matrix.block.clone();
    let r = i64::from(b.rank);
    for (i, j) in state.matrix.unknown_cells() {
        let (tl, sl) = (&b.irreps[i], &b.irreps[j]);
        let k = (&b.h_weights[sl] - &b.h_weights[tl])
            .to_integer()
            .to_i64()
            .unwrap_or(i64::MAX);
        let space = i128::from(b.dims[tl])
            * if r == 0 {
                i128::from(k == 0)
            } else {
                binom(k + r - 1, r - 1)
            };
        let bound = space / i128::from(b.dims[sl]);
        let bound = u32::try_from(bound).unwrap_or(u32::MAX);
        narrow(
            state,
            i,
            j,
            0,
            Some(bound),
            Rule::C5,
            || format!("dim M({tl}) in the lowest degree of L({sl}) allows at most {bound} copies"),
            trace,
        )?;
    }
    Ok(())
}

fn row_checks(state: &SolverState, cfg: &ConstraintConfig) -> Result<()> {
    if let Some(v) = check_rows(&state.matrix, cfg)? {
        return Err(Error::EmptyDomain {
            row: state.matrix.block.irreps[0].clone(),
            col: String::new(),
            reason: format!("{} ({}) fails: {}", v.rule, v.rule.describe(), v.witness),
        });
    }
    Ok(())
}

fn propagate_hom(state: &mut SolverState, cfg: &ConstraintConfig, trace: &mut Vec<TraceEvent>) -> Result<bool> {
    let n = state.matrix.n();
    let block = state.matrix.block.clone();
    let mut any = false;
    loop {
        let mut changed = false;
        for t in 0..n {
            for s in t + 1..n {
                if !block.entry_allowed(t, s) {
                    continue;
                }
                // C3a: Hom(M(s), M(t)) ≤ [M(t):L(s)].
                if cfg.on(Rule::C3a) {
                    let hi = state.matrix.entries[t][s].hi();
                    changed |= narrow_hom(state, s, t, 0, hi, Rule::C3a)?;
                }
                // C3b: Hom(M(s), M(t)) = Hom(M(t'), M(s')).
                if cfg.on(Rule::C3b) {
                    if let (Some(td), Some(sd)) = (block.dual_index(t), block.dual_index(s)) {
                        let other = state.hom.cells[td][sd];
                        changed |= narrow_hom(state, s, t, other.lo(), other.hi(), Rule::C3b)?;
                        let mine = state.hom.cells[s][t];
                        changed |= narrow_hom(state, td, sd, mine.lo(), mine.hi(), Rule::C3b)?;
                    }
                }
                // C3c: without a chain, [M(t):L(s)] = Hom(M(s), M(t)).
                if cfg.on(Rule::C3c) && !chain_possible(&state.matrix, t, s) {
                    let h = state.hom.cells[s][t];
                    let (tl, sl) = (block.irreps[t].clone(), block.irreps[s].clone());
                    changed |= narrow(
                        state,
                        t,
                        s,
                        h.lo(),
                        h.hi(),
                        Rule::C3c,
                        || format!("no chain from {tl} to {sl}; dim Hom(M({sl}),M({tl})) ∈ {h}"),
                        trace,
                    )?;
                    let m = state.matrix.entries[t][s];
                    changed |= narrow_hom(state, s, t, m.lo(), m.hi(), Rule::C3c)?;
                }
                // C3d: a copy of L(s) in M(t) either comes from a Hom M(s) → M(t)
                // or sits inside some L(ν) factor of M(t) through [M(ν):L(s)].
                if cfg.on(Rule::C3d) {
                    let through = (t + 1..s)
                        .map(|v| Some(state.matrix.entries[t][v].hi()? * state.matrix.entries[v][s].hi()?))
                        .sum::<Option<u32>>();
                    let bound = through.and_then(|x| Some(x + state.hom.cells[s][t].hi()?));
                    if let Some(bound) = bound {
                        let (tl, sl) = (block.irreps[t].clone(), block.irreps[s].clone());
                        changed |= narrow(
                            state,
                            t,
                            s,
                            0,
                            Some(bound),
                            Rule::C3d,
                            || format!("dim Hom(M({sl}),M({tl})) + Σ_ν [M({tl}):L(ν)]·[M(ν):L({sl})] ≤ {bound}"),
                            trace,
                        )?;
                    }
                }
            }
        }
        any |= changed;
        if !changed {
            return Ok(any);
        }
    }
}

/// Removes end values of finite domains whose assignment immediately violates a row check.
fn shave(state: &mut SolverState, cfg: &ConstraintConfig, trace: &mut Vec<TraceEvent>) -> Result<bool> {
    let mut changed = false;
    for (i, j) in state.matrix.unknown_cells() {
        loop {
            let cur = state.matrix.entries[i][j];
            let Some(hi) = cur.hi() else { break };
            let lo = cur.lo();
            if hi - lo > cfg.search_cap {
                break;
            }
            let mut trial = state.matrix.clone();
            trial.entries[i][j] = EntryState::Known(lo);
            let low_bad = check_rows_touching(&trial, i, cfg)?;
            trial.entries[i][j] = EntryState::Known(hi);
            let high_bad = if hi != lo {
                check_rows_touching(&trial, i, cfg)?
            } else {
                None
            };
            let (tl, sl) = (
                state.matrix.block.irreps[i].clone(),
                state.matrix.block.irreps[j].clone(),
            );
            if let Some(v) = low_bad {
                let w = format!("[M({tl}):L({sl})]={lo}: {}", v.witness);
                narrow(state, i, j, lo + 1, Some(hi), v.rule, || w, trace)?;
                changed = true;
            } else if let Some(v) = high_bad {
                let w = format!("[M({tl}):L({sl})]={hi}: {}", v.witness);
                narrow(state, i, j, lo, Some(hi - 1), v.rule, || w, trace)?;
                changed = true;
            } else {
                break;
            }
        }
    }
    Ok(changed)
}

/// Row `i` of the inverse, if the known entries determine it.
pub fn inverse_row(m: &DecompMatrix, i: usize) -> Option<Vec<i64>> {
    let n = m.n();
    let mut a = vec![0i64; n];
    a[i] = 1;
    for j in i + 1..n {
        let mut s = 0i64;
        for (k, &ak) in a.iter().enumerate().take(j).skip(i) {
            if ak == 0 {
                continue;
            }
            let d = m.entries[k][j].known()?;
            s += ak * i64::from(d);
        }
        a[j] = -s;
    }
    Some(a)
}

/// Row checks (C4, C5, C8) on rows `0..=i` that the current entries determine.
fn check_rows_touching(m: &DecompMatrix, i: usize, cfg: &ConstraintConfig) -> Result<Option<Violation>> {
    for r in (0..=i).rev() {
        if let Some(row) = inverse_row(m, r) {
            if let Some(v) = check_row(m, r, &row, cfg)? {
                return Ok(Some(v));
            }
        }
    }
    Ok(None)
}

fn check_rows(m: &DecompMatrix, cfg: &ConstraintConfig) -> Result<Option<Violation>> {
    for r in 0..m.n() {
        if let Some(row) = inverse_row(m, r) {
            if let Some(v) = check_row(m, r, &row, cfg)? {
                return Ok(Some(v));
            }
        }
    }
    Ok(None)
}

/// Integer exponents (relative to `h0`) and coefficients of a simple's numerator.
fn numerator_terms(b: &BlockSpec, row: &[i64], h0: &num_rational::BigRational) -> Vec<(i64, i128)> {
    b.irreps
        .iter()
        .zip(row)
        .filter(|(_, &c)| c != 0)
        .map(|(l, &c)| {
            let gap = (&b.h_weights[l] - h0)
                .to_integer()
                .to_i64()
                .expect("integral block gaps");
            (gap, i128::from(c) * i128::from(b.dims[l]))
        })
        .collect()
}

fn binom(n: i64, k: i64) -> i128 {
    if k < 0 || n < k {
        return 0;
    }
    let mut r: i128 = 1;
    for i in 0..k {
        r = r * i128::from(n - i) / i128::from(i + 1);
    }
    r
}

/// Coefficient of `t^(h0 + e)` in the series of `Σ c t^g / (1-t)^r`.
fn series_at(terms: &[(i64, i128)], r: i64, e: i64) -> i128 {
    terms
        .iter()
        .filter(|(g, _)| *g <= e)
        .map(|(g, c)| {
            c * if r == 0 {
                i128::from(e == *g)
            } else {
                binom(e - g + r - 1, r - 1)
            }
        })
        .sum()
}

fn check_row(m: &DecompMatrix, r: usize, row: &[i64], cfg: &ConstraintConfig) -> Result<Option<Violation>> {
    let b = &m.block;
    let name = &b.irreps[r];
    if cfg.on(Rule::C4) && b.finite_dim_flags.contains(name) {
        for (j, &c) in row.iter().enumerate() {
            let dual = b.dual_index(j).map(|d| row[d]).unwrap_or(0);
            if c != dual {
                return Ok(Some(Violation {
                    rule: Rule::C4,
                    witness: format!(
                        "L({name}) has coefficient {c} on M({}) but {dual} on its sign dual",
                        b.irreps[j]
                    ),
                }));
            }
        }
    }
    if !(cfg.on(Rule::C5) || cfg.on(Rule::C8)) {
        return Ok(None);
    }
    let h0 = &b.h_weights[name];
    let terms = numerator_terms(b, row, h0);
    let rank = i64::from(b.rank);
    let start = terms.iter().map(|t| t.0).min().unwrap_or(0);
    let depth = i64::from(cfg.series_depth);
    if cfg.on(Rule::C5) {
        for e in start..=start + depth {
            let v = series_at(&terms, rank, e);
            if v < 0 {
                let deg = h0 + num_rational::BigRational::from_integer(e.into());
                return Ok(Some(Violation {
                    rule: Rule::C5,
                    witness: format!("dim L({name})[{}] = {v}", crate::rational::format_rational(&deg)),
                }));
            }
        }
    }
    if cfg.on(Rule::C8) {
        // Degree h0 + e mirrors to -(h0 + e) = h0 + (-2h0 - e).
        let twice = h0 * num_rational::BigRational::from_integer(2.into());
        if twice.is_integer() {
            let s = twice.to_integer().to_i64().expect("small weights");
            for e in start..=start + depth {
                let mirror = -s - e;
                if mirror >= e {
                    continue;
                }
                let high = series_at(&terms, rank, e);
                let low = series_at(&terms, rank, mirror);
                if high < low {
                    let deg = h0 + num_rational::BigRational::from_integer(e.into());
                    return Ok(Some(Violation {
                        rule: Rule::C8,
                        witness: format!(
                            "dim L({name})[{d}] = {high} < dim L({name})[-{d}] = {low}",
                            d = crate::rational::format_rational(&deg)
                        ),
                    }));
                }
            }
        }
    }
    Ok(None)
}

/// Checks on a complete candidate that need the whole matrix (C6, C7).
fn check_complete(
    m: &DecompMatrix,
    ctx: Option<SolverContext<'_>>,
    cfg: &ConstraintConfig,
) -> Result<Option<Violation>> {
    let b = &m.block;
    let a = m.invert()?;
    if cfg.on(Rule::C6) {
        let hecke = b.hecke_labels();
        let mut supports = Vec::with_capacity(b.len());
        for (i, name) in b.irreps.iter().enumerate() {
            let s = classify_character(&character_from_row(b, &a[i])?)?.support_dim;
            supports.push(s);
            let full = s == b.rank;
            if !b.hecke_columns.is_empty() {
                if hecke.contains(name) && !full {
                    return Ok(Some(Violation {
                        rule: Rule::C6,
                        witness: format!("L({name}) is a Hecke column but has support {s}"),
                    }));
                }
                if !hecke.contains(name) && full {
                    return Ok(Some(Violation {
                        rule: Rule::C6,
                        witness: format!("L({name}) is killed by KZ but would have full support"),
                    }));
                }
            }
        }
        if let Some(ctx) = ctx {
            for fact in &ctx.parabolic.induction {
                let Ok(i) = b.position(&fact.parent) else { continue };
                let child = &ctx.parabolic.simples[&fact.child];
                let bound = if fact.asserted {
                    child.support + 1
                } else {
                    let t = ctx.branching.ok_or_else(|| {
                        Error::MissingData(format!("branching table needed for Ind L({})", fact.child))
                    })?;
                    support_bound_from_induction(&fact.parent, m, child, t)?
                };
                if supports[i] > bound {
                    return Ok(Some(Violation {
                        rule: Rule::C6,
                        witness: format!(
                            "dim Supp L({}) = {} but L({}) lies in Ind L({}), so it is at most {bound}",
                            fact.parent, supports[i], fact.parent, fact.child
                        ),
                    }));
                }
            }
        }
    }
    if cfg.on(Rule::C7) {
        if let Some(ctx) = ctx {
            let p = ctx.parabolic;
            for ex in &p.exclusions {
                let (Ok(i), Ok(j)) = (b.position(&ex.row), b.position(&ex.col)) else {
                    continue;
                };
                if m.entries[i][j].known() == Some(ex.value) {
                    return Ok(Some(Violation {
                        rule: Rule::C7,
                        witness: format!("[M({}):L({})] = {} is excluded: {}", ex.row, ex.col, ex.value, ex.note),
                    }));
                }
            }
            for fact in &p.coefficients {
                let Ok(i) = b.position(&fact.label) else { continue };
                for (tau, want) in &fact.coefficients {
                    let Ok(j) = b.position(tau) else { continue };
                    if a[i][j] != *want {
                        return Ok(Some(Violation {
                            rule: Rule::C7,
                            witness: format!(
                                "[L({}):M({tau})] = {} but restriction forces {want}: {}",
                                fact.label, a[i][j], fact.note
                            ),
                        }));
                    }
                }
            }
            for (i, name) in b.irreps.iter().enumerate() {
                let v = GrothendieckVector::from_terms(
                    Basis::Verma,
                    &b.group,
                    &b.c,
                    b.irreps.iter().map(String::as_str).zip(a[i].iter().copied()),
                );
                let mut outcomes = Vec::new();
                let mut keep = |o: Result<PeelOutcome>| -> Result<()> {
                    match o {
                        Ok(o) => outcomes.push(o),
                        Err(Error::Coverage(_) | Error::MissingData(_)) => {}
                        Err(e) => return Err(e),
                    }
                    Ok(())
                };
                if let Some(t) = ctx.branching {
                    if v.coords.keys().all(|l| t.rows.contains_key(l)) {
                        keep(res_vector(&v, t).and_then(|r| peel_to_simples(&r, &p.category)))?;
                    }
                }
                for img in p.images_of(&v) {
                    keep(p.peel_image(img))?;
                }
                for img in p.span_images(&v) {
                    keep(p.peel_image(&img))?;
                }
                for o in outcomes {
                    if let PeelOutcome::Virtual(w) = o {
                        return Ok(Some(Violation {
                            rule: Rule::C7,
                            witness: format!(
                                "Res L({name}) minus {} leaves {}·M({}) as its lowest term",
                                crate::cato::format_in_order(&w.peeled, &[]),
                                w.coefficient,
                                w.label
                            ),
                        }));
                    }
                }
            }
        }
    }
    Ok(None)
}

/// Surviving completions plus the reasons each rejected value was eliminated.
#[derive(Clone, Debug)]
pub struct SearchResult {
    pub initial: DecompMatrix,
    pub propagated: DecompMatrix,
    pub completions: Vec<Vec<Vec<i64>>>,
    pub trace: Vec<TraceEvent>,
    /// `(row, col, value)` → rules that killed every branch with that value.
    pub eliminations: BTreeMap<(String, String, u32), BTreeSet<(Rule, String)>>,
    pub nodes: usize,
    /// Contradictions reached before any search decision.
    pub contradictions: Vec<(Rule, String)>,
    /// Cells whose domain was cut at the search cap.
    pub truncated: Vec<(String, String)>,
    /// Truncated cells where a surviving completion uses the cap value itself.
    pub cap_hits: Vec<(String, String)>,
    /// False when the node or completion limit stopped the search early.
    pub exhaustive: bool,
}

impl SearchResult {
    /// The rule and witness that rule out `[M(row):L(col)] = v`: the first
    /// propagation step excluding it, else a search elimination.
    pub fn explanation(&self, row: &str, col: &str, v: u32) -> Option<(Rule, String)> {
        if let Some(e) = self
            .trace
            .iter()
            .find(|e| e.row == row && e.col == col && !e.domain.contains(v))
        {
            return Some((e.rule, e.witness.clone()));
        }
        self.eliminations
            .get(&(row.to_string(), col.to_string(), v))
            .and_then(|set| set.iter().next().cloned())
    }
}

/// Propagation followed by exhaustive search over the remaining unknowns.
pub fn search(block: &BlockSpec, ctx: Option<SolverContext<'_>>, cfg: &ConstraintConfig) -> Result<SearchResult> {
    cfg.validate()?;
    let mut state = SolverState::initial(block, cfg)?;
    let initial = state.matrix.clone();
    let mut trace = Vec::new();
    let root = propagate(&mut state, cfg, &mut trace);
    let propagated = state.matrix.clone();
    let mut result = SearchResult {
        initial,
        propagated,
        completions: Vec::new(),
        trace,
        eliminations: BTreeMap::new(),
        nodes: 0,
        contradictions: Vec::new(),
        truncated: Vec::new(),
        cap_hits: Vec::new(),
        exhaustive: true,
    };
    match root {
        Ok(()) => {}
        Err(Error::EmptyDomain { reason, .. }) => {
            result.contradictions.push((rule_of(&reason), reason));
            return Ok(result);
        }
        Err(e) => return Err(e),
    }
    // Lower rows first, so each assigned row determines another row of the inverse.
    let mut cells = state.matrix.unknown_cells();
    cells.sort_by_key(|&(i, j)| (std::cmp::Reverse(i), j));
    for &(i, j) in &cells {
        let e = state.matrix.entries[i][j];
        if e.hi().is_none_or(|h| h > cfg.search_cap) {
            result
                .truncated
                .push((block.irreps[i].clone(), block.irreps[j].clone()));
        }
    }
    // Values on the path to each node, for attributing eliminations.
    let mut path: Vec<(usize, usize, u32)> = Vec::new();
    dfs(&state, &cells, 0, ctx, cfg, &mut path, &mut result)?;
    result.completions.sort();
    result.completions.dedup();
    if !result.exhaustive {
        // Eliminations from a partial search are not conclusive.
        result.eliminations.clear();
        return Ok(result);
    }
    // A value is eliminated when no completion uses it.
    let used: BTreeSet<(String, String, u32)> = result
        .completions
        .iter()
        .flat_map(|m| {
            cells
                .iter()
                .map(|&(i, j)| (block.irreps[i].clone(), block.irreps[j].clone(), m[i][j] as u32))
                .collect::<Vec<_>>()
        })
        .collect();
    result.eliminations.retain(|k, _| !used.contains(k));
    // Values never tried because an earlier choice already excluded them get
    // their own explanation, found by fixing the value at the root.
    for &(i, j) in &cells {
        let e = state.matrix.entries[i][j];
        let hi = e.hi().map_or(cfg.search_cap, |h| h.min(cfg.search_cap));
        for v in e.lo()..=hi {
            let key = (block.irreps[i].clone(), block.irreps[j].clone(), v);
            if used.contains(&key) || result.eliminations.contains_key(&key) {
                continue;
            }
            let reasons = explain(&state, &cells, (i, j, v), ctx, cfg)?;
            if !reasons.is_empty() {
                result.eliminations.insert(key, reasons);
            }
        }
    }
    for (tl, sl) in &result.truncated {
        let (i, j) = (block.position(tl)?, block.position(sl)?);
        if result.completions.iter().any(|m| m[i][j] as u32 == cfg.search_cap) {
            result.cap_hits.push((tl.clone(), sl.clone()));
        }
    }
    Ok(result)
}

/// Reasons why fixing one cell to `v` leads to no completion.
fn explain(
    state: &SolverState,
    cells: &[(usize, usize)],
    (i, j, v): (usize, usize, u32),
    ctx: Option<SolverContext<'_>>,
    cfg: &ConstraintConfig,
) -> Result<BTreeSet<(Rule, String)>> {
    let mut s = state.clone();
    s.matrix.entries[i][j] = EntryState::Known(v);
    let mut scratch = Vec::new();
    match propagate(&mut s, cfg, &mut scratch) {
        Ok(()) => {}
        Err(Error::EmptyDomain { reason, .. }) => return Ok(BTreeSet::from([(rule_of(&reason), reason)])),
        Err(e) => return Err(e),
    }
    let mut sub = SearchResult {
        initial: s.matrix.clone(),
        propagated: s.matrix.clone(),
        completions: Vec::new(),
        trace: Vec::new(),
        eliminations: BTreeMap::new(),
        nodes: 0,
        contradictions: Vec::new(),
        truncated: Vec::new(),
        cap_hits: Vec::new(),
        exhaustive: true,
    };
    let mut path = vec![(i, j, v)];
    dfs(&s, cells, 0, ctx, cfg, &mut path, &mut sub)?;
    if !sub.completions.is_empty() || !sub.exhaustive {
        return Ok(BTreeSet::new());
    }
    let b = &state.matrix.block;
    Ok(sub
        .eliminations
        .remove(&(b.irreps[i].clone(), b.irreps[j].clone(), v))
        .unwrap_or_default())
}

fn record(result: &mut SearchResult, block: &BlockSpec, path: &[(usize, usize, u32)], v: &Violation) {
    if path.is_empty() {
        result.contradictions.push((v.rule, v.witness.clone()));
    }
    for &(i, j, val) in path {
        result
            .eliminations
            .entry((block.irreps[i].clone(), block.irreps[j].clone(), val))
            .or_default()
            .insert((v.rule, v.witness.clone()));
    }
}

fn dfs(
    state: &SolverState,
    cells: &[(usize, usize)],
    k: usize,
    ctx: Option<SolverContext<'_>>,
    cfg: &ConstraintConfig,
    path: &mut Vec<(usize, usize, u32)>,
    result: &mut SearchResult,
) -> Result<()> {
    if result.nodes >= cfg.node_limit || result.completions.len() >= cfg.completion_limit {
        result.exhaustive = false;
        return Ok(());
    }
    result.nodes += 1;
    let block = state.matrix.block.clone();
    // Skip cells fixed by propagation along this branch.
    let mut k = k;
    while k < cells.len() && state.matrix.entries[cells[k].0][cells[k].1].known().is_some() {
        k += 1;
    }
    if k == cells.len() {
        if let Some(v) = check_complete(&state.matrix, ctx, cfg)? {
            record(result, &block, path, &v);
        } else {
            result.completions.push(state.matrix.to_integers()?);
        }
        return Ok(());
    }
    let (i, j) = cells[k];
    let e = state.matrix.entries[i][j];
    let hi = e.hi().map_or(cfg.search_cap, |h| h.min(cfg.search_cap));
    for val in e.lo()..=hi {
        let mut next = state.clone();
        next.matrix.entries[i][j] = EntryState::Known(val);
        path.push((i, j, val));
        let mut scratch = Vec::new();
        match propagate_light(&mut next, cfg, &mut scratch) {
            Ok(()) => dfs(&next, cells, k + 1, ctx, cfg, path, result)?,
            Err(Error::EmptyDomain { reason, .. }) => {
                let rule = rule_of(&reason);
                record(result, &block, path, &Violation { rule, witness: reason });
            }
            Err(e) => return Err(e),
        }
        path.pop();
    }
    Ok(())
}

/// The rule named at the start of a contradiction message.
fn rule_of(reason: &str) -> Rule {
    reason
        .split_whitespace()
        .next()
        .and_then(|w| w.parse().ok())
        .unwrap_or(Rule::C1)
}

/// Outcome of a search.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Verdict {
    Unique(Vec<Vec<i64>>),
    Ambiguous { count: usize, cells: Vec<(String, String)> },
    Infeasible,
}

impl Verdict {
    pub fn is_unique(&self) -> bool {
        matches!(self, Verdict::Unique(_))
    }
}

pub fn certify_unique(block: &BlockSpec, results: &[Vec<Vec<i64>>]) -> Verdict {
    match results {
        [] => Verdict::Infeasible,
        [one] => Verdict::Unique(one.clone()),
        many => {
            let n = block.len();
            let mut cells = Vec::new();
            for i in 0..n {
                for j in 0..n {
                    if many.iter().any(|m| m[i][j] != many[0][i][j]) {
                        cells.push((block.irreps[i].clone(), block.irreps[j].clone()));
                    }
                }
            }
            Verdict::Ambiguous {
                count: many.len(),
                cells,
            }
        }
    }
}

/// Convenience: search and certify in one call.
pub fn solve(
    block: &BlockSpec,
    ctx: Option<SolverContext<'_>>,
    cfg: &ConstraintConfig,
) -> Result<(Verdict, SearchResult)> {
    let r = search(block, ctx, cfg)?;
    if !r.exhaustive && r.completions.len() < 2 {
        return Err(Error::SearchLimitReached {
            nodes: r.nodes,
            completions: r.completions.len(),
        });
    }
    if let Some((row, col)) = r.cap_hits.first() {
        return Err(Error::SearchCapExceeded {
            row: row.clone(),
            col: col.clone(),
            cap: cfg.search_cap,
        });
    }
    Ok((certify_unique(block, &r.completions), r))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::ratio;
    use std::collections::BTreeMap;

    fn toy(weights: &[(&str, i64, u64, &str)], rank: u32) -> BlockSpec {
        BlockSpec {
            group: "T".into(),
            rank,
            c: ratio(1, 2),
            name: "toy".into(),
            provenance: Default::default(),
            irreps: weights.iter().map(|w| w.0.to_string()).collect(),
            h_weights: weights.iter().map(|w| (w.0.to_string(), ratio(w.1, 1))).collect(),
            dims: weights.iter().map(|w| (w.0.to_string(), w.2)).collect(),
            sign_duals: weights.iter().map(|w| (w.0.to_string(), w.3.to_string())).collect(),
            support: BTreeMap::new(),
            hecke_columns: BTreeMap::new(),
            known_entries: vec![],
            hom_hints: vec![],
            expected_matrix: None,
            expected_inverse: None,
            finite_dim_flags: Default::default(),
            defect: None,
        }
    }

    #[test]
    fn rules_parse() {
        let r = parse_rules("C1, c3 ,C8").unwrap();
        assert_eq!(r.len(), 6);
        assert!(parse_rules("C9").is_err());
    }

    #[test]
    fn chain_detection() {
        let b = toy(&[("a", 0, 1, "c"), ("b", 1, 1, "b"), ("c", 2, 1, "a")], 1);
        let mut m = DecompMatrix::with_unknowns(&b).unwrap();
        assert!(chain_possible(&m, 0, 2));
        m.entries[0][1] = EntryState::Known(0);
        assert!(!chain_possible(&m, 0, 2));
    }

    #[test]
    fn missing_chain_fixes_an_isolated_entry() {
        // Two members: no intermediate, so the entry equals the Hom dimension;
        // with a Hom hint the entry is determined.
        let mut b = toy(&[("a", 0, 1, "b"), ("b", 1, 1, "a")], 1);
        b.hom_hints.push(crate::repdata::HomHint {
            from: "b".into(),
            to: "a".into(),
            value: 1,
            note: String::new(),
        });
        let cfg = ConstraintConfig::default();
        let mut s = SolverState::initial(&b, &cfg).unwrap();
        let mut trace = vec![];
        propagate(&mut s, &cfg, &mut trace).unwrap();
        assert_eq!(s.matrix.entries[0][1], EntryState::Known(1));
        assert!(trace.iter().any(|t| t.rule == Rule::C3c));
    }

    #[test]
    fn positivity_rejects_negative_series() {
        // L(a) = M(a) - 2M(b) has a negative coefficient in rank 1 beyond degree 1.
        let b = toy(&[("a", 0, 1, "a"), ("b", 1, 1, "b")], 1);
        let m = DecompMatrix::from_integers(&b, &[vec![1, 1], vec![0, 1]]).unwrap();
        let row = inverse_row(&m, 0).unwrap();
        assert!(check_row(&m, 0, &row, &ConstraintConfig::default()).unwrap().is_none());
        let bad = DecompMatrix::from_integers(&b, &[vec![1, 2], vec![0, 1]]).unwrap();
        let row = inverse_row(&bad, 0).unwrap();
        let v = check_row(&bad, 0, &row, &ConstraintConfig::default()).unwrap().unwrap();
        assert_eq!(v.rule, Rule::C5);
    }

    #[test]
    fn complete_matrix_is_its_own_unique_completion() {
        let mut b = toy(&[("a", 0, 1, "a"), ("b", 1, 1, "b")], 1);
        b.hecke_columns.insert("a".into(), vec![1, 0]);
        b.hecke_columns.insert("b".into(), vec![0, 1]);
        let (v, _) = solve(&b, None, &ConstraintConfig::default()).unwrap();
        assert_eq!(v, Verdict::Unique(vec![vec![1, 0], vec![0, 1]]));
    }

    #[test]
    fn binomials_match() {
        assert_eq!(binom(10, 3), 120);
        assert_eq!(binom(3, 5), 0);
    }
}
