//! Static mathematical data: groups, irreducible representations, branching
//! rules and block definitions, loaded from JSON and validated on load.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fs;
use std::path::{Path, PathBuf};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rational::{format_rational, parse_rational};

/// Where a data file came from; carried verbatim for traceability.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Provenance {
    pub source: String,
    pub transcriber: String,
}

/// A conjugacy class of reflections.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReflectionClass {
    pub label: String,
    pub size: u32,
}

/// A finite Coxeter group, seen only through its rank and reflection classes.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GroupDescriptor {
    pub name: String,
    pub rank: u32,
    pub reflection_classes: Vec<ReflectionClass>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub provenance: Option<Provenance>,
}

/// Number of reflections of the exceptional groups this toolkit knows by name.
pub fn reflection_count(name: &str) -> Option<u32> {
    match name {
        "E6" => Some(36),
        "E7" => Some(63),
        "E8" => Some(120),
        "F4" => Some(24),
        "G2" => Some(6),
        "H3" => Some(15),
        "H4" => Some(60),
        _ => None,
    }
}

impl GroupDescriptor {
    pub fn validate(&self) -> Result<()> {
        let ctx = format!("group {}", self.name);
        if self.rank == 0 {
            return Err(Error::schema(ctx, "rank must be at least 1"));
        }
        if self.reflection_classes.is_empty() {
            return Err(Error::schema(ctx, "at least one reflection class is required"));
        }
        let mut seen = BTreeSet::new();
        for class in &self.reflection_classes {
            if class.size == 0 {
                return Err(Error::schema(&ctx, format!("class {} has size 0", class.label)));
            }
            if !seen.insert(class.label.as_str()) {
                return Err(Error::schema(&ctx, format!("duplicate class {}", class.label)));
            }
        }
        let total: u32 = self.reflection_classes.iter().map(|c| c.size).sum();
        if let Some(expected) = reflection_count(&self.name) {
            if total != expected {
                return Err(Error::consistency(
                    ctx,
                    format!("reflection classes sum to {total}, expected {expected}"),
                ));
            }
        }
        Ok(())
    }

    pub fn number_of_reflections(&self) -> u32 {
        self.reflection_classes.iter().map(|c| c.size).sum()
    }
}

/// Loads and validates a group descriptor.
pub fn load_group(path: &Path) -> Result<GroupDescriptor> {
    let g: GroupDescriptor = read_json(path)?;
    g.validate()?;
    Ok(g)
}

/// A labelled irreducible representation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IrrepInfo {
    pub label: String,
    pub dim: u64,
    /// Class label → Σ_{s in class} χ(s).
    pub reflection_sums: Option<BTreeMap<String, i64>>,
    pub sign_dual: String,
}

/// Dimension encoded in a Carter-style label such as `4096_z` or `1400_zz'`.
pub fn dim_from_label(label: &str) -> Option<u64> {
    let digits: String = label.chars().take_while(|c| c.is_ascii_digit()).collect();
    if digits.is_empty() || !label[digits.len()..].starts_with('_') && digits.len() != label.len() {
        return None;
    }
    digits.parse().ok()
}

/// Exceptional groups of type E use labels whose numeric prefix is the dimension.
fn is_e_type(group: &str) -> bool {
    group.starts_with('E')
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct IrrepFile {
    group: String,
    #[serde(default)]
    #[allow(dead_code)]
    provenance: Option<Provenance>,
    irreps: Vec<IrrepRecord>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct IrrepRecord {
    label: String,
    #[serde(default)]
    dim: Option<u64>,
    #[serde(default)]
    reflection_sums: Option<BTreeMap<String, i64>>,
    sign_dual: String,
}

/// All irreducible representations of one group that the data mentions.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IrrepRegistry {
    pub group: String,
    irreps: Vec<IrrepInfo>,
    index: HashMap<String, usize>,
}

impl IrrepRegistry {
    pub fn new(group: &GroupDescriptor, irreps: Vec<IrrepInfo>) -> Result<Self> {
        let ctx = format!("irreps of {}", group.name);
        let mut index = HashMap::new();
        for (i, irrep) in irreps.iter().enumerate() {
            if index.insert(irrep.label.clone(), i).is_some() {
                return Err(Error::schema(&ctx, format!("duplicate label {}", irrep.label)));
            }
            if irrep.dim == 0 {
                return Err(Error::schema(&ctx, format!("{} has dimension 0", irrep.label)));
            }
            if let Some(sums) = &irrep.reflection_sums {
                let classes: BTreeSet<&str> = group.reflection_classes.iter().map(|c| c.label.as_str()).collect();
                let keys: BTreeSet<&str> = sums.keys().map(String::as_str).collect();
                if classes != keys {
                    return Err(Error::schema(
                        &ctx,
                        format!("{} reflection sums do not cover the reflection classes", irrep.label),
                    ));
                }
                for class in &group.reflection_classes {
                    let bound = irrep.dim as i64 * class.size as i64;
                    if sums[&class.label].abs() > bound {
                        return Err(Error::consistency(
                            &ctx,
                            format!("{} has a reflection sum exceeding dim × class size", irrep.label),
                        ));
                    }
                }
            }
        }
        let reg = IrrepRegistry {
            group: group.name.clone(),
            irreps,
            index,
        };
        for irrep in &reg.irreps {
            let dual = reg.get(&irrep.sign_dual).map_err(|_| {
                Error::consistency(
                    &ctx,
                    format!("sign dual {} of {} is missing", irrep.sign_dual, irrep.label),
                )
            })?;
            if dual.sign_dual != irrep.label {
                return Err(Error::consistency(
                    &ctx,
                    format!("sign duality is not an involution at {}", irrep.label),
                ));
            }
            if dual.dim != irrep.dim {
                return Err(Error::consistency(
                    &ctx,
                    format!("{} and its sign dual have different dimensions", irrep.label),
                ));
            }
            if let (Some(a), Some(b)) = (&irrep.reflection_sums, &dual.reflection_sums) {
                if a.iter().any(|(k, v)| b.get(k) != Some(&-v)) {
                    return Err(Error::consistency(
                        &ctx,
                        format!("reflection sums of {} and its sign dual are not opposite", irrep.label),
                    ));
                }
            }
        }
        Ok(reg)
    }

    pub fn get(&self, label: &str) -> Result<&IrrepInfo> {
        self.index
            .get(label)
            .map(|&i| &self.irreps[i])
            .ok_or_else(|| Error::unknown_label(label, format!("irreps of {}", self.group)))
    }

    pub fn contains(&self, label: &str) -> bool {
        self.index.contains_key(label)
    }

    pub fn iter(&self) -> impl Iterator<Item = &IrrepInfo> {
        self.irreps.iter()
    }

    pub fn len(&self) -> usize {
        self.irreps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.irreps.is_empty()
    }

    pub fn dim(&self, label: &str) -> Result<u64> {
        Ok(self.get(label)?.dim)
    }

    pub fn sign_dual(&self, label: &str) -> Result<&str> {
        Ok(self.get(label)?.sign_dual.as_str())
    }
}

/// Loads an irrep registry for `group`.
pub fn load_irreps(path: &Path, group: &GroupDescriptor) -> Result<IrrepRegistry> {
    let file: IrrepFile = read_json(path)?;
    let ctx = path.display().to_string();
    if file.group != group.name {
        return Err(Error::schema(
            ctx,
            format!("registry is for {}, expected {}", file.group, group.name),
        ));
    }
    let mut irreps = Vec::with_capacity(file.irreps.len());
    for r in file.irreps {
        let from_label = if is_e_type(&group.name) {
            dim_from_label(&r.label)
        } else {
            None
        };
        let dim = match (r.dim, from_label) {
            (Some(d), Some(l)) if d != l => {
                return Err(Error::consistency(
                    &ctx,
                    format!("{} declares dimension {d} but its label says {l}", r.label),
                ))
            }
            (Some(d), _) => d,
            (None, Some(l)) => l,
            (None, None) => return Err(Error::schema(&ctx, format!("{} needs an explicit dimension", r.label))),
        };
        irreps.push(IrrepInfo {
            label: r.label,
            dim,
            reflection_sums: r.reflection_sums,
            sign_dual: r.sign_dual,
        });
    }
    IrrepRegistry::new(group, irreps)
}

/// `h_c(τ) = rank/2 − c · Σ_s χ_τ(s) / dim τ`.
pub fn compute_h_weight(g: &GroupDescriptor, irrep: &IrrepInfo, c: &BigRational) -> Result<BigRational> {
    let sums = irrep
        .reflection_sums
        .as_ref()
        .ok_or_else(|| Error::MissingData(format!("{} has no reflection character sums", irrep.label)))?;
    let mut total = BigInt::zero();
    for class in &g.reflection_classes {
        let v = sums
            .get(&class.label)
            .ok_or_else(|| Error::MissingData(format!("{} lacks the sum over class {}", irrep.label, class.label)))?;
        total += BigInt::from(*v);
    }
    let half_rank = BigRational::new(BigInt::from(g.rank), BigInt::from(2));
    Ok(half_rank - c * BigRational::new(total, BigInt::from(irrep.dim)))
}

/// Restriction of irreducible representations from a group to a parabolic subgroup.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BranchingTable {
    pub parent: String,
    pub child: String,
    pub rows: BTreeMap<String, Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub provenance: Option<Provenance>,
}

impl BranchingTable {
    /// Checks every row against the dimension identity.
    pub fn validate(&self, parent: &IrrepRegistry, child: &IrrepRegistry) -> Result<()> {
        let ctx = format!("branching {}→{}", self.parent, self.child);
        for (label, row) in &self.rows {
            let d = parent.dim(label)?;
            let mut total = 0u64;
            for c in row {
                total += child.dim(c)?;
            }
            if total != d {
                return Err(Error::consistency(
                    &ctx,
                    format!("restriction of {label} has dimension {total}, expected {d}"),
                ));
            }
        }
        Ok(())
    }

    /// The multiset of child labels in the restriction of `label`.
    pub fn restrict_irrep(&self, label: &str) -> Result<&[String]> {
        self.rows
            .get(label)
            .map(Vec::as_slice)
            .ok_or_else(|| Error::unknown_label(label, format!("branching {}→{}", self.parent, self.child)))
    }

    /// Multiplicity of `child` in the restriction of `parent`.
    pub fn multiplicity(&self, parent: &str, child: &str) -> Result<i64> {
        Ok(self.restrict_irrep(parent)?.iter().filter(|c| *c == child).count() as i64)
    }
}

/// Margin annotation of a row: finite-dimensional, or a support dimension.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum SupportAnnotation {
    Dim(u32),
    #[serde(with = "finite_tag")]
    Finite,
}

mod finite_tag {
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str("finite")
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<(), D::Error> {
        let s = String::deserialize(d)?;
        if s == "finite" {
            Ok(())
        } else {
            Err(serde::de::Error::custom(format!("expected \"finite\", got {s:?}")))
        }
    }
}

impl SupportAnnotation {
    /// Support dimension the annotation asserts.
    pub fn support_dim(self) -> u32 {
        match self {
            SupportAnnotation::Dim(k) => k,
            SupportAnnotation::Finite => 0,
        }
    }
}

/// A single decomposition number supplied as input.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct KnownEntry {
    pub row: String,
    pub col: String,
    pub value: u32,
}

/// A Hom-dimension fact `dim Hom(M(from), M(to)) = value` supplied as input.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HomHint {
    pub from: String,
    pub to: String,
    pub value: u32,
    #[serde(default)]
    pub note: String,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct BlockFile {
    group: String,
    c: String,
    #[serde(default)]
    name: Option<String>,
    #[serde(default)]
    provenance: Option<Provenance>,
    irreps: Vec<String>,
    h_weights: BTreeMap<String, String>,
    #[serde(default)]
    support: BTreeMap<String, SupportAnnotation>,
    #[serde(default)]
    hecke_columns: BTreeMap<String, Vec<i64>>,
    #[serde(default)]
    known_entries: Vec<KnownEntry>,
    #[serde(default)]
    hom_hints: Vec<HomHint>,
    #[serde(default)]
    expected_matrix: Option<Vec<Vec<i64>>>,
    #[serde(default)]
    expected_inverse: Option<Vec<Vec<i64>>>,
    #[serde(default)]
    finite_dim_flags: Vec<String>,
    #[serde(default)]
    defect: Option<u32>,
}

/// An h_c-ordered block of Category O at a fixed parameter.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BlockSpec {
    pub group: String,
    pub rank: u32,
    pub c: BigRational,
    pub name: String,
    pub provenance: Provenance,
    pub irreps: Vec<String>,
    pub h_weights: BTreeMap<String, BigRational>,
    pub dims: BTreeMap<String, u64>,
    pub sign_duals: BTreeMap<String, String>,
    pub support: BTreeMap<String, SupportAnnotation>,
    pub hecke_columns: BTreeMap<String, Vec<i64>>,
    pub known_entries: Vec<KnownEntry>,
    pub hom_hints: Vec<HomHint>,
    pub expected_matrix: Option<Vec<Vec<i64>>>,
    pub expected_inverse: Option<Vec<Vec<i64>>>,
    pub finite_dim_flags: BTreeSet<String>,
    pub defect: Option<u32>,
}

impl BlockSpec {
    pub fn len(&self) -> usize {
        self.irreps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.irreps.is_empty()
    }

    pub fn position(&self, label: &str) -> Result<usize> {
        self.irreps
            .iter()
            .position(|l| l == label)
            .ok_or_else(|| Error::unknown_label(label, self.title()))
    }

    pub fn contains(&self, label: &str) -> bool {
        self.irreps.iter().any(|l| l == label)
    }

    pub fn weight(&self, label: &str) -> Result<&BigRational> {
        self.h_weights
            .get(label)
            .ok_or_else(|| Error::unknown_label(label, self.title()))
    }

    /// Human-readable identifier such as `E8 c=1/4 block_84_x`.
    pub fn title(&self) -> String {
        format!("{} c={} {}", self.group, format_rational(&self.c), self.name)
    }

    /// True on the diagonal, and off it when `h(col) − h(row)` is a positive integer
    /// and `col` is later in block order.
    pub fn entry_allowed(&self, row: usize, col: usize) -> bool {
        if col == row {
            return true;
        }
        if col < row {
            return false;
        }
        let gap = &self.h_weights[&self.irreps[col]] - &self.h_weights[&self.irreps[row]];
        gap.is_integer() && gap.is_positive()
    }

    /// Sign dual of a block member, if it lies in the same block.
    pub fn dual_index(&self, i: usize) -> Option<usize> {
        let d = self.sign_duals.get(&self.irreps[i])?;
        self.irreps.iter().position(|l| l == d)
    }

    /// Several blocks at the same parameter viewed as one, with every entry between
    /// different parts fixed to zero. Lets sign-dual blocks share Hom information.
    pub fn join(parts: &[BlockSpec]) -> Result<BlockSpec> {
        let first = parts
            .first()
            .ok_or_else(|| Error::schema("block join", "no blocks given"))?;
        if parts
            .iter()
            .any(|p| p.group != first.group || p.c != first.c || p.rank != first.rank)
        {
            return Err(Error::consistency(
                "block join",
                "blocks must share group and parameter",
            ));
        }
        let mut members: Vec<(usize, usize)> = parts
            .iter()
            .enumerate()
            .flat_map(|(k, p)| (0..p.len()).map(move |i| (k, i)))
            .collect();
        members.sort_by(|a, b| {
            let wa = &parts[a.0].h_weights[&parts[a.0].irreps[a.1]];
            let wb = &parts[b.0].h_weights[&parts[b.0].irreps[b.1]];
            wa.cmp(wb).then(a.cmp(b))
        });
        let irreps: Vec<String> = members.iter().map(|&(k, i)| parts[k].irreps[i].clone()).collect();
        let index: BTreeMap<&str, usize> = irreps.iter().enumerate().map(|(i, l)| (l.as_str(), i)).collect();
        if index.len() != irreps.len() {
            return Err(Error::consistency("block join", "blocks overlap"));
        }
        let part_of = |l: &str| parts.iter().position(|p| p.contains(l)).expect("member of some part");
        let n = irreps.len();
        let mut out = BlockSpec {
            group: first.group.clone(),
            rank: first.rank,
            c: first.c.clone(),
            name: parts.iter().map(|p| p.name.as_str()).collect::<Vec<_>>().join("+"),
            provenance: first.provenance.clone(),
            irreps: irreps.clone(),
            h_weights: BTreeMap::new(),
            dims: BTreeMap::new(),
            sign_duals: BTreeMap::new(),
            support: BTreeMap::new(),
            hecke_columns: BTreeMap::new(),
            known_entries: Vec::new(),
            hom_hints: Vec::new(),
            expected_matrix: None,
            expected_inverse: None,
            finite_dim_flags: BTreeSet::new(),
            defect: None,
        };
        for p in parts {
            out.h_weights.extend(p.h_weights.clone());
            out.dims.extend(p.dims.clone());
            out.sign_duals.extend(p.sign_duals.clone());
            out.support.extend(p.support.clone());
            out.known_entries.extend(p.known_entries.iter().cloned());
            out.hom_hints.extend(p.hom_hints.iter().cloned());
            out.finite_dim_flags.extend(p.finite_dim_flags.iter().cloned());
            for (col, values) in &p.hecke_columns {
                let mut v = vec![0; n];
                for (i, &x) in values.iter().enumerate() {
                    v[index[p.irreps[i].as_str()]] = x;
                }
                out.hecke_columns.insert(col.clone(), v);
            }
        }
        for (i, a) in irreps.iter().enumerate() {
            for b in &irreps[i + 1..] {
                if part_of(a) != part_of(b) && out.entry_allowed(i, index[b.as_str()]) {
                    out.known_entries.push(KnownEntry {
                        row: a.clone(),
                        col: b.clone(),
                        value: 0,
                    });
                }
            }
        }
        let merge = |get: &dyn Fn(&BlockSpec) -> Option<&Vec<Vec<i64>>>| -> Option<Vec<Vec<i64>>> {
            let mut m = vec![vec![0; n]; n];
            for p in parts {
                let src = get(p)?;
                for (i, row) in src.iter().enumerate() {
                    for (j, &x) in row.iter().enumerate() {
                        m[index[p.irreps[i].as_str()]][index[p.irreps[j].as_str()]] = x;
                    }
                }
            }
            Some(m)
        };
        out.expected_matrix = merge(&|p| p.expected_matrix.as_ref());
        out.expected_inverse = merge(&|p| p.expected_inverse.as_ref());
        Ok(out)
    }

    /// The rows and columns of `part` cut out of a matrix over this (joined) block.
    pub fn restrict_matrix(&self, part: &BlockSpec, m: &[Vec<i64>]) -> Result<Vec<Vec<i64>>> {
        let idx = part
            .irreps
            .iter()
            .map(|l| self.position(l))
            .collect::<Result<Vec<_>>>()?;
        Ok(idx.iter().map(|&i| idx.iter().map(|&j| m[i][j]).collect()).collect())
    }

    /// Labels whose simple modules have full support (their columns come from the Hecke algebra).
    pub fn hecke_labels(&self) -> BTreeSet<String> {
        self.hecke_columns.keys().cloned().collect()
    }
}

/// Loads a block file, resolving its group and irreps and validating every invariant.
pub fn load_block(path: &Path, data: &DataSet) -> Result<BlockSpec> {
    let file: BlockFile = read_json(path)?;
    let name = file.name.clone().unwrap_or_else(|| {
        path.file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_default()
    });
    block_from_file(file, name, &path.display().to_string(), data)
}

/// Parses a block from a JSON string (used by tests and the C ABI).
pub fn block_from_json(json: &str, data: &DataSet) -> Result<BlockSpec> {
    let file: BlockFile = serde_json::from_str(json).map_err(|e| Error::schema("block json", e.to_string()))?;
    let name = file.name.clone().unwrap_or_else(|| "block".into());
    block_from_file(file, name, "block json", data)
}

fn block_from_file(file: BlockFile, name: String, ctx: &str, data: &DataSet) -> Result<BlockSpec> {
    let group = data.group(&file.group)?;
    let registry = data.irreps(&file.group)?;
    let c = parse_rational(&file.c)?;
    if file.irreps.is_empty() {
        return Err(Error::schema(ctx, "a block needs at least one irrep"));
    }
    let mut seen = BTreeSet::new();
    for l in &file.irreps {
        if !seen.insert(l) {
            return Err(Error::schema(ctx, format!("{l} listed twice")));
        }
    }
    let mut h_weights = BTreeMap::new();
    let mut dims = BTreeMap::new();
    let mut sign_duals = BTreeMap::new();
    for l in &file.irreps {
        let info = registry.get(l)?;
        dims.insert(l.clone(), info.dim);
        sign_duals.insert(l.clone(), info.sign_dual.clone());
        let given = file.h_weights.get(l).map(|s| parse_rational(s)).transpose()?;
        let computed = match &info.reflection_sums {
            Some(_) => Some(compute_h_weight(group, info, &c)?),
            None => None,
        };
        let w = match (given, computed) {
            (Some(g), Some(k)) if g != k => {
                return Err(Error::consistency(
                    ctx,
                    format!(
                        "h-weight of {l} is {} but reflection data gives {}",
                        format_rational(&g),
                        format_rational(&k)
                    ),
                ))
            }
            (Some(g), _) => g,
            (None, Some(k)) => k,
            (None, None) => {
                return Err(Error::MissingData(format!("{ctx}: no h-weight for {l}")));
            }
        };
        h_weights.insert(l.clone(), w);
    }
    for l in file.h_weights.keys() {
        if !seen.contains(l) {
            return Err(Error::schema(
                ctx,
                format!("h-weight given for {l}, which is not in the block"),
            ));
        }
    }
    for pair in file.irreps.windows(2) {
        let (a, b) = (&h_weights[&pair[0]], &h_weights[&pair[1]]);
        if b < a {
            return Err(Error::consistency(
                ctx,
                format!("weights decrease from {} to {}", pair[0], pair[1]),
            ));
        }
    }
    let first = &h_weights[&file.irreps[0]];
    for l in &file.irreps {
        if !(&h_weights[l] - first).is_integer() {
            return Err(Error::consistency(ctx, format!("weight gap to {l} is not an integer")));
        }
    }
    let n = file.irreps.len();
    for (col, v) in &file.hecke_columns {
        if !seen.contains(col) {
            return Err(Error::schema(ctx, format!("Hecke column {col} is not in the block")));
        }
        if v.len() != n {
            return Err(Error::schema(ctx, format!("Hecke column {col} has length {}", v.len())));
        }
    }
    for l in file.support.keys().chain(file.finite_dim_flags.iter()) {
        if !seen.contains(l) {
            return Err(Error::schema(
                ctx,
                format!("annotation for {l}, which is not in the block"),
            ));
        }
    }
    for e in &file.known_entries {
        if !seen.contains(&e.row) || !seen.contains(&e.col) {
            return Err(Error::schema(
                ctx,
                format!("known entry ({}, {}) outside the block", e.row, e.col),
            ));
        }
    }
    for h in &file.hom_hints {
        if !seen.contains(&h.from) || !seen.contains(&h.to) {
            return Err(Error::schema(
                ctx,
                format!("Hom hint ({}, {}) outside the block", h.from, h.to),
            ));
        }
    }
    let spec = BlockSpec {
        group: file.group.clone(),
        rank: group.rank,
        c,
        name,
        provenance: file.provenance.unwrap_or_default(),
        irreps: file.irreps,
        h_weights,
        dims,
        sign_duals,
        support: file.support,
        hecke_columns: file.hecke_columns,
        known_entries: file.known_entries,
        hom_hints: file.hom_hints,
        expected_matrix: file.expected_matrix,
        expected_inverse: file.expected_inverse,
        finite_dim_flags: file.finite_dim_flags.into_iter().collect(),
        defect: file.defect,
    };
    for (what, m) in [
        ("expected_matrix", &spec.expected_matrix),
        ("expected_inverse", &spec.expected_inverse),
    ] {
        if let Some(m) = m {
            check_unitriangular(&spec, m, what, what == "expected_matrix")?;
        }
    }
    Ok(spec)
}

fn check_unitriangular(spec: &BlockSpec, m: &[Vec<i64>], what: &str, nonneg: bool) -> Result<()> {
    let ctx = format!("{} {what}", spec.title());
    let n = spec.len();
    if m.len() != n || m.iter().any(|r| r.len() != n) {
        return Err(Error::schema(ctx, format!("must be {n}×{n}")));
    }
    for i in 0..n {
        for j in 0..n {
            let v = m[i][j];
            if i == j && v != 1 {
                return Err(Error::consistency(
                    &ctx,
                    format!("diagonal entry at {} is {v}", spec.irreps[i]),
                ));
            }
            if i != j && v != 0 && !spec.entry_allowed(i, j) {
                return Err(Error::consistency(
                    &ctx,
                    format!(
                        "entry ({}, {}) violates the block order",
                        spec.irreps[i], spec.irreps[j]
                    ),
                ));
            }
            if nonneg && v < 0 {
                return Err(Error::consistency(
                    &ctx,
                    format!("negative multiplicity at ({}, {})", spec.irreps[i], spec.irreps[j]),
                ));
            }
        }
    }
    Ok(())
}

pub(crate) fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T> {
    let text = fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    serde_json::from_str(&text).map_err(|e| Error::schema(path.display().to_string(), e.to_string()))
}

/// Environment variable overriding the bundled data location.
pub const DATA_DIR_ENV: &str = "CHEREDNIK_DATA_DIR";

/// Bundled data directory shipped with the workspace.
pub fn bundled_data_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../data")
}

/// Resolves the data directory: explicit path, then the environment, then the bundled copy.
pub fn resolve_data_dir(explicit: Option<&Path>) -> PathBuf {
    if let Some(p) = explicit {
        return p.to_path_buf();
    }
    match std::env::var_os(DATA_DIR_ENV) {
        Some(p) if !p.is_empty() => PathBuf::from(p),
        _ => bundled_data_dir(),
    }
}

/// Every group, registry and branching table under a data directory.
#[derive(Clone, Debug)]
pub struct DataSet {
    pub root: PathBuf,
    groups: BTreeMap<String, GroupDescriptor>,
    irreps: BTreeMap<String, IrrepRegistry>,
    branching: Vec<BranchingTable>,
}

impl DataSet {
    /// Loads `<root>/<G>/group.json`, `<root>/<G>/irreps.json` and `<root>/branching/*.json`.
    pub fn load(root: &Path) -> Result<Self> {
        let mut groups = BTreeMap::new();
        let mut irreps = BTreeMap::new();
        let entries = fs::read_dir(root).map_err(|source| Error::Io {
            path: root.to_path_buf(),
            source,
        })?;
        let mut dirs: Vec<PathBuf> = entries.filter_map(|e| e.ok().map(|e| e.path())).collect();
        dirs.sort();
        for dir in dirs {
            let gpath = dir.join("group.json");
            if !gpath.is_file() {
                continue;
            }
            let g = load_group(&gpath)?;
            let ipath = dir.join("irreps.json");
            if ipath.is_file() {
                irreps.insert(g.name.clone(), load_irreps(&ipath, &g)?);
            }
            groups.insert(g.name.clone(), g);
        }
        let mut data = DataSet {
            root: root.to_path_buf(),
            groups,
            irreps,
            branching: Vec::new(),
        };
        let bdir = root.join("branching");
        if bdir.is_dir() {
            for path in sorted_json_files(&bdir)? {
                let t: BranchingTable = read_json(&path)?;
                t.validate(data.irreps(&t.parent)?, data.irreps(&t.child)?)?;
                data.branching.push(t);
            }
        }
        Ok(data)
    }

    /// Loads the data directory chosen by [`resolve_data_dir`].
    pub fn load_default(explicit: Option<&Path>) -> Result<Self> {
        Self::load(&resolve_data_dir(explicit))
    }

    pub fn group(&self, name: &str) -> Result<&GroupDescriptor> {
        self.groups
            .get(name)
            .ok_or_else(|| Error::unknown_label(name, "groups"))
    }

    pub fn irreps(&self, group: &str) -> Result<&IrrepRegistry> {
        self.irreps
            .get(group)
            .ok_or_else(|| Error::MissingData(format!("no irrep registry for {group}")))
    }

    pub fn branching(&self, parent: &str, child: &str) -> Result<&BranchingTable> {
        self.branching
            .iter()
            .find(|t| t.parent == parent && t.child == child)
            .ok_or_else(|| Error::MissingData(format!("no branching table {parent}→{child}")))
    }

    pub fn branching_tables(&self) -> &[BranchingTable] {
        &self.branching
    }

    /// Path of a block file `<root>/<group>/c_<p>_<q>/<name>.json`.
    pub fn block_path(&self, group: &str, c: &BigRational, name: &str) -> PathBuf {
        self.root
            .join(group)
            .join(format!("c_{}_{}", c.numer(), c.denom()))
            .join(format!("{name}.json"))
    }

    /// Loads one bundled block.
    pub fn block(&self, group: &str, c: &str, name: &str) -> Result<BlockSpec> {
        let c = parse_rational(c)?;
        load_block(&self.block_path(group, &c, name), self)
    }

    /// Paths of every block file, sorted by group, parameter and name.
    pub fn block_paths(&self) -> Result<Vec<PathBuf>> {
        let mut out = Vec::new();
        for g in self.groups.keys() {
            let gdir = self.root.join(g);
            let Ok(entries) = fs::read_dir(&gdir) else { continue };
            let mut cdirs: Vec<(BigRational, PathBuf)> = Vec::new();
            for e in entries.flatten() {
                let p = e.path();
                let Some(name) = p.file_name().and_then(|n| n.to_str()) else {
                    continue;
                };
                if let Some(rest) = name.strip_prefix("c_") {
                    if let Some((a, b)) = rest.split_once('_') {
                        if let Ok(c) = parse_rational(&format!("{a}/{b}")) {
                            cdirs.push((c, p));
                        }
                    }
                }
            }
            cdirs.sort();
            for (_, dir) in cdirs {
                out.extend(sorted_json_files(&dir)?);
            }
        }
        Ok(out)
    }

    /// Loads every bundled block.
    pub fn all_blocks(&self) -> Result<Vec<BlockSpec>> {
        self.block_paths()?.iter().map(|p| load_block(p, self)).collect()
    }

    /// The bundled block holding the sign duals of `block`'s members, when that is a different block.
    pub fn dual_block(&self, block: &BlockSpec) -> Result<Option<BlockSpec>> {
        let Some(dual) = block
            .irreps
            .iter()
            .map(|l| &block.sign_duals[l])
            .find(|d| !block.contains(d))
        else {
            return Ok(None);
        };
        Ok(self
            .all_blocks()?
            .into_iter()
            .find(|b| b.group == block.group && b.c == block.c && b.contains(dual)))
    }
}

fn sorted_json_files(dir: &Path) -> Result<Vec<PathBuf>> {
    let entries = fs::read_dir(dir).map_err(|source| Error::Io {
        path: dir.to_path_buf(),
        source,
    })?;
    let mut files: Vec<PathBuf> = entries
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|x| x == "json"))
        .collect();
    files.sort();
    Ok(files)
}
