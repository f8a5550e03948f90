//! Induction and restriction on Grothendieck groups, block projection,
//! peeling a Verma-basis class into simples, and support bounds obtained by
//! inducing a simple module from a maximal parabolic subgroup.

use std::collections::{BTreeMap, BTreeSet};
use std::path::Path;

use num_rational::BigRational;
use serde::Deserialize;

use crate::cato::{invert_unitriangular, Basis, DecompMatrix, GrothendieckVector};
use crate::error::{Error, Result};
use crate::rational::parse_rational;
use crate::repdata::{read_json, BlockSpec, BranchingTable, DataSet, Provenance};

/// `[Res M(τ)] = Σ [M(σ_i)]`, extended linearly.
pub fn res_vector(v: &GrothendieckVector, t: &BranchingTable) -> Result<GrothendieckVector> {
    if v.basis != Basis::Verma {
        return Err(Error::Precondition("restriction acts on Verma-basis classes".into()));
    }
    if v.group != t.parent {
        return Err(Error::Incompatible(format!(
            "vector of {} restricted along {}→{}",
            v.group, t.parent, t.child
        )));
    }
    let mut out = GrothendieckVector::zero(Basis::Verma, &t.child, &v.c);
    for (label, k) in &v.coords {
        for child in t.restrict_irrep(label)? {
            out.add_term(child, *k);
        }
    }
    Ok(out)
}

/// `[Ind M(σ)] = Σ_τ mult(σ in Res τ) [M(τ)]` — the transpose of restriction.
pub fn ind_vector(v: &GrothendieckVector, t: &BranchingTable) -> Result<GrothendieckVector> {
    if v.basis != Basis::Verma {
        return Err(Error::Precondition("induction acts on Verma-basis classes".into()));
    }
    if v.group != t.child {
        return Err(Error::Incompatible(format!(
            "vector of {} induced along {}→{}",
            v.group, t.child, t.parent
        )));
    }
    let known_children: BTreeSet<&String> = t.rows.values().flatten().collect();
    for label in v.coords.keys() {
        if !known_children.contains(label) {
            return Err(Error::unknown_label(
                label,
                format!("branching {}→{}", t.parent, t.child),
            ));
        }
    }
    let mut out = GrothendieckVector::zero(Basis::Verma, &t.parent, &v.c);
    for (parent, row) in &t.rows {
        let k: i64 = row.iter().map(|c| v.get(c)).sum();
        out.add_term(parent, k);
    }
    Ok(out)
}

/// Coefficient of `M(parent)` in `Ind` of `v`, using only the row of `parent`.
pub fn ind_coefficient(v: &GrothendieckVector, parent: &str, t: &BranchingTable) -> Result<i64> {
    Ok(t.restrict_irrep(parent)?.iter().map(|c| v.get(c)).sum())
}

/// Keeps only the coordinates labelled by `labels`.
pub fn project_block<'a>(v: &GrothendieckVector, labels: impl IntoIterator<Item = &'a String>) -> GrothendieckVector {
    let keep: BTreeSet<&String> = labels.into_iter().collect();
    let mut out = GrothendieckVector::zero(v.basis, &v.group, &v.c);
    for (l, k) in &v.coords {
        if keep.contains(l) {
            out.add_term(l, *k);
        }
    }
    out
}

/// One block of a category context: members in h_c order and the Verma
/// expansions of whichever simples are known.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ContextBlock {
    pub name: String,
    pub labels: Vec<String>,
    pub simples: BTreeMap<String, GrothendieckVector>,
}

impl ContextBlock {
    /// A block with a fully known decomposition matrix.
    pub fn from_matrix(d: &DecompMatrix) -> Result<Self> {
        let a = d.invert()?;
        let b = &d.block;
        let simples = b
            .irreps
            .iter()
            .enumerate()
            .map(|(i, l)| {
                let v = GrothendieckVector::from_terms(
                    Basis::Verma,
                    &b.group,
                    &b.c,
                    b.irreps.iter().map(String::as_str).zip(a[i].iter().copied()),
                );
                (l.clone(), v)
            })
            .collect();
        Ok(ContextBlock {
            name: b.name.clone(),
            labels: b.irreps.clone(),
            simples,
        })
    }

    pub fn is_complete(&self) -> bool {
        self.labels.iter().all(|l| self.simples.contains_key(l))
    }
}

/// Category `O_c(W)` as a collection of blocks with a global h_c order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CategoryContext {
    pub group: String,
    pub c: BigRational,
    pub blocks: Vec<ContextBlock>,
    /// Sort key of every label (h_c weight, or position in a transcribed order).
    pub keys: BTreeMap<String, BigRational>,
}

impl CategoryContext {
    /// Context made of fully known blocks, ordered by their h_c weights.
    pub fn from_matrices(ms: &[DecompMatrix]) -> Result<Self> {
        let first = ms.first().ok_or_else(|| Error::Precondition("empty context".into()))?;
        let mut keys = BTreeMap::new();
        let mut blocks = Vec::new();
        for m in ms {
            if m.block.group != first.block.group || m.block.c != first.block.c {
                return Err(Error::Incompatible(
                    "context blocks must share group and parameter".into(),
                ));
            }
            for l in &m.block.irreps {
                if keys.insert(l.clone(), m.block.h_weights[l].clone()).is_some() {
                    return Err(Error::consistency(
                        "category context",
                        format!("{l} lies in two blocks"),
                    ));
                }
            }
            blocks.push(ContextBlock::from_matrix(m)?);
        }
        Ok(CategoryContext {
            group: first.block.group.clone(),
            c: first.block.c.clone(),
            blocks,
            keys,
        })
    }

    pub fn block_of(&self, label: &str) -> Option<&ContextBlock> {
        self.blocks.iter().find(|b| b.labels.iter().any(|l| l == label))
    }

    fn key(&self, label: &str) -> Result<&BigRational> {
        self.keys.get(label).ok_or_else(|| Error::Coverage(label.to_string()))
    }

    /// Labels sorted by the global order (ties broken by block position, then label).
    fn sorted<'a>(&self, labels: impl IntoIterator<Item = &'a String>) -> Result<Vec<&'a String>> {
        let mut v: Vec<&String> = labels.into_iter().collect();
        for l in &v {
            self.key(l)?;
        }
        v.sort_by(|a, b| self.keys[*a].cmp(&self.keys[*b]).then_with(|| a.cmp(b)));
        Ok(v)
    }
}

/// Proof that a class is virtual: after peeling, the lowest remaining Verma has a negative coefficient.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VirtualWitness {
    pub label: String,
    pub coefficient: i64,
    /// Simples removed before the negative term was reached.
    pub peeled: GrothendieckVector,
    /// What was left (Verma basis) when the negative term appeared.
    pub remainder: GrothendieckVector,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum PeelOutcome {
    /// Non-negative combination of simples (simple basis).
    Module(GrothendieckVector),
    Virtual(VirtualWitness),
}

impl PeelOutcome {
    pub fn is_module(&self) -> bool {
        matches!(self, PeelOutcome::Module(_))
    }
}

/// Greedy peeling: in global h_c order, remove `k·[L(σ)]` for the lowest remaining `M(σ)`.
pub fn peel_to_simples(v: &GrothendieckVector, ctx: &CategoryContext) -> Result<PeelOutcome> {
    peel_greedy(v, ctx)
}

pub fn peel_greedy(v: &GrothendieckVector, ctx: &CategoryContext) -> Result<PeelOutcome> {
    check_category(v, ctx)?;
    let mut rest = v.clone();
    let mut peeled = GrothendieckVector::zero(Basis::Simple, &ctx.group, &ctx.c);
    loop {
        let order = ctx.sorted(rest.coords.keys())?;
        let Some(lowest) = order.first().map(|s| (*s).clone()) else {
            return Ok(PeelOutcome::Module(peeled));
        };
        let k = rest.get(&lowest);
        if k < 0 {
            return Ok(PeelOutcome::Virtual(VirtualWitness {
                label: lowest,
                coefficient: k,
                peeled,
                remainder: rest,
            }));
        }
        let block = ctx.block_of(&lowest).ok_or_else(|| Error::Coverage(lowest.clone()))?;
        let simple = block.simples.get(&lowest).ok_or_else(|| {
            Error::MissingData(format!("Verma expansion of L({lowest}) in {} c={}", ctx.group, ctx.c))
        })?;
        rest = rest.sub(&simple.scale(k))?;
        peeled.add_term(&lowest, k);
    }
}

/// Basis change `n_σ = Σ_τ x_τ [M(τ):L(σ)]`; the witness is the lowest negative coefficient.
pub fn peel_basis_change(v: &GrothendieckVector, ctx: &CategoryContext) -> Result<PeelOutcome> {
    check_category(v, ctx)?;
    let mut coords = GrothendieckVector::zero(Basis::Simple, &ctx.group, &ctx.c);
    for block in &ctx.blocks {
        if !block.is_complete() {
            return Err(Error::MissingData(format!("block {} is not fully known", block.name)));
        }
        let a: Vec<Vec<i64>> = block
            .labels
            .iter()
            .map(|l| block.labels.iter().map(|m| block.simples[l].get(m)).collect())
            .collect();
        let d = invert_unitriangular(&a);
        for (j, sigma) in block.labels.iter().enumerate() {
            let n: i64 = block
                .labels
                .iter()
                .enumerate()
                .map(|(i, tau)| v.get(tau) * d[i][j])
                .sum();
            coords.add_term(sigma, n);
        }
    }
    for l in v.coords.keys() {
        if ctx.block_of(l).is_none() {
            return Err(Error::Coverage(l.clone()));
        }
    }
    let negatives: Vec<&String> = coords.coords.iter().filter(|(_, k)| **k < 0).map(|(l, _)| l).collect();
    let Some(first) = ctx.sorted(negatives)?.first().map(|s| (*s).clone()) else {
        return Ok(PeelOutcome::Module(coords));
    };
    // Rebuild the partial peel up to the witness so both methods report the same state.
    let mut peeled = GrothendieckVector::zero(Basis::Simple, &ctx.group, &ctx.c);
    let mut rest = v.clone();
    let first_key = ctx.keys[&first].clone();
    for l in ctx.sorted(coords.coords.keys())? {
        let k = coords.get(l);
        if ctx.keys[l] > first_key || (ctx.keys[l] == first_key && *l >= first) {
            continue;
        }
        let simple = &ctx.block_of(l).expect("covered").simples[l];
        rest = rest.sub(&simple.scale(k))?;
        peeled.add_term(l, k);
    }
    Ok(PeelOutcome::Virtual(VirtualWitness {
        coefficient: coords.get(&first),
        label: first,
        peeled,
        remainder: rest,
    }))
}

fn check_category(v: &GrothendieckVector, ctx: &CategoryContext) -> Result<()> {
    if v.basis != Basis::Verma || v.group != ctx.group || v.c != ctx.c {
        return Err(Error::Incompatible(format!(
            "cannot peel a {:?}-basis vector of {} in a context for {}",
            v.basis, v.group, ctx.group
        )));
    }
    Ok(())
}

/// A simple module of the parabolic category whose Verma expansion is known
/// at least on `domain` (all labels when `domain` is `None`).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ChildSimple {
    pub label: String,
    pub expansion: GrothendieckVector,
    pub domain: Option<BTreeSet<String>>,
    pub support: u32,
}

impl ChildSimple {
    fn covers(&self, label: &str) -> bool {
        self.domain.as_ref().is_none_or(|d| d.contains(label))
    }
}

/// Bound `dim Supp L(parent) ≤ d + 1` from `L(parent)` being a constituent of `Ind L(child)`.
///
/// The multiplicity of `L(parent)` in `Ind L(child)` projected to the parent's block is
/// `Σ_τ x_τ [M(τ):L(parent)]`, where `x_τ` is the coefficient of `M(τ)` in the induced
/// class; only rows `τ` with a non-zero entry in the parent's column contribute. The
/// test needs the branching rows of exactly those `τ`, and requires the multiplicity to
/// be positive. When `parent` is leftmost in its block this reduces to the coefficient
/// of `M(parent)` itself.
pub fn support_bound_from_induction(
    parent: &str,
    d: &DecompMatrix,
    child: &ChildSimple,
    t: &BranchingTable,
) -> Result<u32> {
    let m = d.to_integers()?;
    let j = d.block.position(parent)?;
    let mut mult = 0i64;
    for (i, row) in m.iter().enumerate() {
        if row[j] == 0 {
            continue;
        }
        let tau = &d.block.irreps[i];
        let res = t.restrict_irrep(tau).map_err(|_| {
            Error::Precondition(format!(
                "restriction of {tau} is needed to locate L({parent}) in Ind L({})",
                child.label
            ))
        })?;
        for sigma in res {
            if !child.covers(sigma) {
                return Err(Error::Precondition(format!(
                    "coefficient of M({sigma}) in L({}) is not known",
                    child.label
                )));
            }
        }
        mult += row[j] * res.iter().map(|s| child.expansion.get(s)).sum::<i64>();
    }
    if mult <= 0 {
        return Err(Error::Precondition(format!(
            "L({parent}) is not shown to be a constituent of Ind L({}) (multiplicity {mult})",
            child.label
        )));
    }
    Ok(child.support + 1)
}

/// Parabolic data at one parameter: known simples, block membership, a
/// transcribed h_c order, and facts used by the solver's functor constraints.
#[derive(Clone, Debug)]
pub struct ParabolicContext {
    pub group: String,
    pub parent: String,
    pub c: BigRational,
    pub provenance: Option<Provenance>,
    pub category: CategoryContext,
    pub simples: BTreeMap<String, ChildSimple>,
    pub induction: Vec<InductionFact>,
    pub restrictions: Vec<RestrictionImage>,
    pub exclusions: Vec<Exclusion>,
    pub coefficients: Vec<CoefficientFact>,
}

/// A decomposition number value ruled out by an argument whose data is not bundled.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Exclusion {
    pub row: String,
    pub col: String,
    pub value: u32,
    pub note: String,
}

/// Known Verma coefficients `[L(label):M(τ)]` of a parent-category simple.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CoefficientFact {
    pub label: String,
    pub coefficients: BTreeMap<String, i64>,
    pub note: String,
}

/// `dim Supp L(parent) ≤ d + 1` because `L(parent)` is a constituent of `Ind L(child)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InductionFact {
    pub parent: String,
    pub child: String,
    /// Set when the constituent property is input data rather than computed.
    pub asserted: bool,
    pub note: String,
}

/// The restriction of a specific parent-category class, projected to some blocks,
/// as printed in the source; used when the full branching rows are unavailable.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RestrictionImage {
    pub source: GrothendieckVector,
    /// Block names the image is projected to; `None` for the full restriction.
    pub blocks: Option<Vec<String>>,
    pub image: GrothendieckVector,
    /// Sum of simples removed before the printed remainder, when individual
    /// expansions of those simples are not known.
    pub peeled: Option<(GrothendieckVector, GrothendieckVector)>,
    pub note: String,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ContextFile {
    group: String,
    parent: String,
    c: String,
    #[serde(default)]
    provenance: Option<Provenance>,
    order: Vec<OrderEntry>,
    blocks: BTreeMap<String, Vec<String>>,
    #[serde(default)]
    simples: Vec<SimpleRecord>,
    #[serde(default)]
    induction: Vec<InductionRecord>,
    #[serde(default)]
    restrictions: Vec<RestrictionRecord>,
    #[serde(default)]
    exclusions: Vec<ExclusionRecord>,
    #[serde(default)]
    simple_coefficients: Vec<CoefficientRecord>,
}

/// One position of the order: a label, or several labels of equal weight.
#[derive(Deserialize)]
#[serde(untagged)]
enum OrderEntry {
    One(String),
    Tied(Vec<String>),
}

impl OrderEntry {
    fn labels(&self) -> &[String] {
        match self {
            OrderEntry::One(l) => std::slice::from_ref(l),
            OrderEntry::Tied(v) => v,
        }
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ExclusionRecord {
    row: String,
    col: String,
    value: u32,
    #[serde(default)]
    note: String,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct CoefficientRecord {
    label: String,
    coefficients: BTreeMap<String, i64>,
    #[serde(default)]
    note: String,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct SimpleRecord {
    label: String,
    expansion: BTreeMap<String, i64>,
    #[serde(default)]
    domain: Option<Vec<String>>,
    #[serde(default)]
    support: Option<u32>,
    #[serde(default)]
    #[allow(dead_code)]
    note: String,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct InductionRecord {
    parent: String,
    child: String,
    #[serde(default)]
    asserted: bool,
    #[serde(default)]
    note: String,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RestrictionRecord {
    source: BTreeMap<String, i64>,
    #[serde(default)]
    blocks: Option<Vec<String>>,
    image: BTreeMap<String, i64>,
    #[serde(default)]
    peeled: Option<BTreeMap<String, i64>>,
    #[serde(default)]
    peeled_total: Option<BTreeMap<String, i64>>,
    #[serde(default)]
    note: String,
}

impl ParabolicContext {
    pub fn load(path: &Path, data: &DataSet) -> Result<Self> {
        let file: ContextFile = read_json(path)?;
        let ctx = path.display().to_string();
        let child = data.irreps(&file.group)?;
        let parent = data.irreps(&file.parent)?;
        let c = parse_rational(&file.c)?;
        let vec = |group: &str, basis: Basis, m: &BTreeMap<String, i64>| {
            GrothendieckVector::from_terms(basis, group, &c, m.iter().map(|(l, k)| (l.as_str(), *k)))
        };
        let check = |reg: &crate::repdata::IrrepRegistry, labels: &mut dyn Iterator<Item = &String>| -> Result<()> {
            for l in labels {
                reg.get(l)?;
            }
            Ok(())
        };
        check(child, &mut file.order.iter().flat_map(OrderEntry::labels))?;
        let mut keys = BTreeMap::new();
        for (i, entry) in file.order.iter().enumerate() {
            if entry.labels().is_empty() {
                return Err(Error::schema(&ctx, "empty tie group in order"));
            }
            for l in entry.labels() {
                if keys
                    .insert(l.clone(), BigRational::from_integer((i as i64).into()))
                    .is_some()
                {
                    return Err(Error::schema(&ctx, format!("{l} repeated in order")));
                }
            }
        }
        let mut blocks = Vec::new();
        let mut seen = BTreeSet::new();
        for (name, members) in &file.blocks {
            let mut labels = members.clone();
            for l in &labels {
                if !keys.contains_key(l) {
                    return Err(Error::schema(&ctx, format!("{l} of {name} is missing from order")));
                }
                if !seen.insert(l.clone()) {
                    return Err(Error::consistency(&ctx, format!("{l} lies in two blocks")));
                }
            }
            labels.sort_by(|a, b| keys[a].cmp(&keys[b]));
            blocks.push(ContextBlock {
                name: name.clone(),
                labels,
                simples: BTreeMap::new(),
            });
        }
        let mut simples = BTreeMap::new();
        for s in &file.simples {
            check(child, &mut s.expansion.keys())?;
            let expansion = vec(&file.group, Basis::Verma, &s.expansion);
            if expansion.get(&s.label) != 1 {
                return Err(Error::consistency(
                    &ctx,
                    format!("L({}) must contain M({}) once", s.label, s.label),
                ));
            }
            if s.domain.is_none() {
                if let Some(b) = blocks.iter_mut().find(|b| b.labels.contains(&s.label)) {
                    for l in s.expansion.keys() {
                        if !b.labels.contains(l) {
                            return Err(Error::consistency(
                                &ctx,
                                format!("L({}) involves M({l}) from another block", s.label),
                            ));
                        }
                    }
                    b.simples.insert(s.label.clone(), expansion.clone());
                }
            }
            if let Some(support) = s.support {
                simples.insert(
                    s.label.clone(),
                    ChildSimple {
                        label: s.label.clone(),
                        expansion,
                        domain: s.domain.as_ref().map(|d| d.iter().cloned().collect()),
                        support,
                    },
                );
            }
        }
        let induction = file
            .induction
            .iter()
            .map(|r| {
                parent.get(&r.parent)?;
                child.get(&r.child)?;
                if !simples.contains_key(&r.child) {
                    return Err(Error::schema(&ctx, format!("support of L({}) is not given", r.child)));
                }
                Ok(InductionFact {
                    parent: r.parent.clone(),
                    child: r.child.clone(),
                    asserted: r.asserted,
                    note: r.note.clone(),
                })
            })
            .collect::<Result<Vec<_>>>()?;
        let mut restrictions = Vec::new();
        for r in &file.restrictions {
            check(parent, &mut r.source.keys())?;
            check(child, &mut r.image.keys())?;
            let peeled = match (&r.peeled, &r.peeled_total) {
                (Some(p), Some(t)) => Some((vec(&file.group, Basis::Simple, p), vec(&file.group, Basis::Verma, t))),
                (None, None) => None,
                _ => return Err(Error::schema(&ctx, "peeled and peeled_total go together")),
            };
            restrictions.push(RestrictionImage {
                source: vec(&file.parent, Basis::Verma, &r.source),
                blocks: r.blocks.clone(),
                image: vec(&file.group, Basis::Verma, &r.image),
                peeled,
                note: r.note.clone(),
            });
        }
        let exclusions = file
            .exclusions
            .iter()
            .map(|r| {
                parent.get(&r.row)?;
                parent.get(&r.col)?;
                Ok(Exclusion {
                    row: r.row.clone(),
                    col: r.col.clone(),
                    value: r.value,
                    note: r.note.clone(),
                })
            })
            .collect::<Result<Vec<_>>>()?;
        let coefficients = file
            .simple_coefficients
            .iter()
            .map(|r| {
                parent.get(&r.label)?;
                check(parent, &mut r.coefficients.keys())?;
                Ok(CoefficientFact {
                    label: r.label.clone(),
                    coefficients: r.coefficients.clone(),
                    note: r.note.clone(),
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(ParabolicContext {
            group: file.group.clone(),
            parent: file.parent,
            c: c.clone(),
            provenance: file.provenance,
            category: CategoryContext {
                group: file.group,
                c,
                blocks,
                keys,
            },
            simples,
            induction,
            restrictions,
            exclusions,
            coefficients,
        })
    }

    /// Peels a restricted class, first removing an aggregated peel when one is recorded.
    pub fn peel_image(&self, r: &RestrictionImage) -> Result<PeelOutcome> {
        let Some((peeled, total)) = &r.peeled else {
            return peel_to_simples(&r.image, &self.category);
        };
        // Each aggregated simple must lead the image: no other term may have a
        // lower weight, and its coefficient must be matched by the aggregate.
        for (l, k) in &peeled.coords {
            if *k <= 0 {
                return Err(Error::consistency(
                    "restriction image",
                    format!("peeled L({l}) with multiplicity {k}"),
                ));
            }
            let key = self.category.key(l)?;
            for m in r.image.coords.keys() {
                if !peeled.coords.contains_key(m) && self.category.key(m)? < key {
                    return Err(Error::consistency(
                        "restriction image",
                        format!("M({m}) lies below the peeled L({l})"),
                    ));
                }
            }
            if r.image.get(l) < *k || total.get(l) != *k {
                return Err(Error::consistency(
                    "restriction image",
                    format!("aggregate does not lead with M({l})"),
                ));
            }
        }
        let rest = r.image.sub(total)?;
        match peel_to_simples(&rest, &self.category)? {
            PeelOutcome::Module(m) => {
                let mut all = peeled.clone();
                for (l, k) in &m.coords {
                    all.add_term(l, *k);
                }
                Ok(PeelOutcome::Module(all))
            }
            PeelOutcome::Virtual(mut w) => {
                for (l, k) in &peeled.coords {
                    w.peeled.add_term(l, *k);
                }
                Ok(PeelOutcome::Virtual(w))
            }
        }
    }

    /// Restriction images recorded for exactly this parent-category class.
    pub fn images_of<'a>(&'a self, v: &'a GrothendieckVector) -> impl Iterator<Item = &'a RestrictionImage> + 'a {
        self.restrictions.iter().filter(move |r| r.source.coords == v.coords)
    }

    /// Images of `v` obtained by linearity: for each projection, writes `v` as an
    /// integer combination of the recorded sources (those without an aggregated
    /// peel) and combines their images the same way.
    pub fn span_images(&self, v: &GrothendieckVector) -> Vec<RestrictionImage> {
        let mut groups: BTreeMap<Option<Vec<String>>, Vec<&RestrictionImage>> = BTreeMap::new();
        for r in self.restrictions.iter().filter(|r| r.peeled.is_none()) {
            groups.entry(r.blocks.clone()).or_default().push(r);
        }
        let mut out = Vec::new();
        for (blocks, recs) in groups {
            let sources: Vec<&GrothendieckVector> = recs.iter().map(|r| &r.source).collect();
            let Some(x) = integer_combination(&sources, v) else {
                continue;
            };
            let mut image = GrothendieckVector::zero(Basis::Verma, &self.group, &self.c);
            for (r, k) in recs.iter().zip(&x) {
                image = image.add(&r.image.scale(*k)).expect("images share one category");
            }
            out.push(RestrictionImage {
                source: v.clone(),
                blocks,
                image,
                peeled: None,
                note: "combined from recorded images".into(),
            });
        }
        out
    }
}

/// Integer `x` with `Σ x_k s_k = v`, when one exists (exact rational elimination).
fn integer_combination(sources: &[&GrothendieckVector], v: &GrothendieckVector) -> Option<Vec<i64>> {
    use num_traits::{One, Zero};
    let labels: BTreeSet<&String> = sources
        .iter()
        .flat_map(|s| s.coords.keys())
        .chain(v.coords.keys())
        .collect();
    let n = sources.len();
    let big = |k: i64| BigRational::from_integer(k.into());
    // Augmented rows, one per label.
    let mut rows: Vec<Vec<BigRational>> = labels
        .iter()
        .map(|l| {
            sources
                .iter()
                .map(|s| big(s.get(l)))
                .chain(std::iter::once(big(v.get(l))))
                .collect()
        })
        .collect();
    let mut pivots = Vec::new();
    let mut r = 0;
    for col in 0..n {
        let Some(p) = (r..rows.len()).find(|&i| !rows[i][col].is_zero()) else {
            continue;
        };
        rows.swap(r, p);
        let inv = BigRational::one() / rows[r][col].clone();
        for x in rows[r].iter_mut() {
            *x = &*x * &inv;
        }
        for i in 0..rows.len() {
            if i != r && !rows[i][col].is_zero() {
                let f = rows[i][col].clone();
                for k in 0..=n {
                    let d = &f * &rows[r][k];
                    rows[i][k] -= d;
                }
            }
        }
        pivots.push(col);
        r += 1;
    }
    if rows[r..].iter().any(|row| !row[n].is_zero()) {
        return None;
    }
    let mut x = vec![0i64; n];
    for (i, &col) in pivots.iter().enumerate() {
        let val = &rows[i][n];
        if !val.is_integer() {
            return None;
        }
        x[col] = i64::try_from(val.to_integer()).ok()?;
    }
    Some(x)
}

/// Loads every `<root>/contexts/*.json`.
pub fn load_contexts(data: &DataSet) -> Result<Vec<ParabolicContext>> {
    let dir = data.root.join("contexts");
    if !dir.is_dir() {
        return Ok(Vec::new());
    }
    let mut files: Vec<_> = std::fs::read_dir(&dir)
        .map_err(|source| Error::Io {
            path: dir.clone(),
            source,
        })?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|x| x == "json"))
        .collect();
    files.sort();
    files.iter().map(|p| ParabolicContext::load(p, data)).collect()
}

/// Convenience: the parabolic context for a block's group and parameter, if bundled.
pub fn context_for<'a>(contexts: &'a [ParabolicContext], b: &BlockSpec) -> Option<&'a ParabolicContext> {
    contexts.iter().find(|x| x.parent == b.group && x.c == b.c)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::ratio;

    fn table() -> BranchingTable {
        BranchingTable {
            parent: "P".into(),
            child: "C".into(),
            rows: BTreeMap::from([
                ("x".to_string(), vec!["a".to_string(), "b".to_string()]),
                ("y".to_string(), vec!["b".to_string(), "b".to_string(), "c".to_string()]),
            ]),
            provenance: None,
        }
    }

    fn v(group: &str, terms: &[(&str, i64)]) -> GrothendieckVector {
        GrothendieckVector::from_terms(Basis::Verma, group, &ratio(1, 4), terms.iter().copied())
    }

    #[test]
    fn restriction_and_induction_are_transpose() {
        let t = table();
        let r = res_vector(&v("P", &[("x", 1), ("y", -1)]), &t).unwrap();
        assert_eq!(
            r.coords,
            BTreeMap::from([("a".into(), 1), ("b".into(), -1), ("c".into(), -1)])
        );
        let i = ind_vector(&v("C", &[("b", 1)]), &t).unwrap();
        assert_eq!(i.coords, BTreeMap::from([("x".into(), 1), ("y".into(), 2)]));
        assert!(res_vector(&v("P", &[]), &t).unwrap().is_zero());
        assert_eq!(ind_coefficient(&v("C", &[("b", 1), ("c", 3)]), "y", &t).unwrap(), 5);
    }

    #[test]
    fn unknown_labels_are_reported() {
        assert!(res_vector(&v("P", &[("z", 1)]), &table()).is_err());
        assert!(ind_vector(&v("C", &[("q", 1)]), &table()).is_err());
    }

    fn toy_context() -> CategoryContext {
        let simple = |terms: &[(&str, i64)]| v("C", terms);
        CategoryContext {
            group: "C".into(),
            c: ratio(1, 4),
            blocks: vec![ContextBlock {
                name: "B".into(),
                labels: vec!["a".into(), "b".into(), "c".into()],
                simples: BTreeMap::from([
                    ("a".to_string(), simple(&[("a", 1), ("b", -1), ("c", 1)])),
                    ("b".to_string(), simple(&[("b", 1), ("c", -1)])),
                    ("c".to_string(), simple(&[("c", 1)])),
                ]),
            }],
            keys: BTreeMap::from([
                ("a".into(), ratio(0, 1)),
                ("b".into(), ratio(1, 1)),
                ("c".into(), ratio(2, 1)),
            ]),
        }
    }

    #[test]
    fn greedy_and_basis_change_agree() {
        let ctx = toy_context();
        for x in [[1, 0, 0], [1, 1, 0], [0, 1, -1], [2, -3, 1], [0, 0, 0]] {
            let vec = v("C", &[("a", x[0]), ("b", x[1]), ("c", x[2])]);
            assert_eq!(peel_greedy(&vec, &ctx).unwrap(), peel_basis_change(&vec, &ctx).unwrap());
        }
    }

    #[test]
    fn verma_peels_to_its_column() {
        // M(a) = L(a) + L(b): from the inverse above.
        let out = peel_to_simples(&v("C", &[("a", 1)]), &toy_context()).unwrap();
        let PeelOutcome::Module(m) = out else {
            panic!("expected a module")
        };
        assert_eq!(m.coords, BTreeMap::from([("a".into(), 1), ("b".into(), 1)]));
    }

    #[test]
    fn negative_lowest_term_is_a_witness() {
        let out = peel_to_simples(&v("C", &[("a", 1), ("b", -2)]), &toy_context()).unwrap();
        let PeelOutcome::Virtual(w) = out else {
            panic!("expected a witness")
        };
        assert_eq!(w.label, "b");
        assert_eq!(w.coefficient, -1);
    }

    #[test]
    fn uncovered_label_is_a_coverage_error() {
        assert!(matches!(
            peel_to_simples(&v("C", &[("z", 1)]), &toy_context()),
            Err(Error::Coverage(_))
        ));
    }
}
