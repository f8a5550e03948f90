//! Decomposition matrices over a block: inversion, simple characters and
//! support classification.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use serde::{Deserialize, Serialize};

use crate::charpoly::GradedCharacter;
use crate::error::{Error, Result};
use crate::rational::format_rational;
use crate::repdata::{BlockSpec, SupportAnnotation};

/// State of one decomposition number `[M(row) : L(col)]`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum EntryState {
    Known(u32),
    /// `lo ..= hi`, with `hi = None` meaning unbounded.
    Unknown {
        lo: u32,
        hi: Option<u32>,
    },
}

impl EntryState {
    pub const FREE: EntryState = EntryState::Unknown { lo: 0, hi: None };

    /// Builds an interval, collapsing `lo == hi` to `Known`.
    pub fn interval(lo: u32, hi: Option<u32>) -> Self {
        match hi {
            Some(h) if h == lo => EntryState::Known(lo),
            _ => EntryState::Unknown { lo, hi },
        }
    }

    pub fn lo(self) -> u32 {
        match self {
            EntryState::Known(v) => v,
            EntryState::Unknown { lo, .. } => lo,
        }
    }

    pub fn hi(self) -> Option<u32> {
        match self {
            EntryState::Known(v) => Some(v),
            EntryState::Unknown { hi, .. } => hi,
        }
    }

    pub fn known(self) -> Option<u32> {
        match self {
            EntryState::Known(v) => Some(v),
            EntryState::Unknown { .. } => None,
        }
    }

    pub fn contains(self, v: u32) -> bool {
        v >= self.lo() && self.hi().is_none_or(|h| v <= h)
    }

    /// Intersection; `None` when empty.
    pub fn meet(self, lo: u32, hi: Option<u32>) -> Option<Self> {
        let new_lo = self.lo().max(lo);
        let new_hi = match (self.hi(), hi) {
            (Some(a), Some(b)) => Some(a.min(b)),
            (a, None) => a,
            (None, b) => b,
        };
        if new_hi.is_some_and(|h| h < new_lo) {
            None
        } else {
            Some(Self::interval(new_lo, new_hi))
        }
    }
}

impl fmt::Display for EntryState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EntryState::Known(v) => write!(f, "{v}"),
            EntryState::Unknown { lo, hi: Some(h) } => write!(f, "[{lo}..{h}]"),
            EntryState::Unknown { lo, hi: None } => write!(f, "[{lo}..]"),
        }
    }
}

/// A square matrix of decomposition numbers in block order (rows: Vermas, columns: simples).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DecompMatrix {
    pub block: BlockSpec,
    pub entries: Vec<Vec<EntryState>>,
}

impl DecompMatrix {
    /// The fully known matrix stored in the block file.
    pub fn expected(block: &BlockSpec) -> Result<Self> {
        let m = block
            .expected_matrix
            .as_ref()
            .ok_or_else(|| Error::MissingData(format!("{} has no expected matrix", block.title())))?;
        Self::from_integers(block, m)
    }

    /// Wraps an integer matrix, checking shape and unitriangularity.
    pub fn from_integers(block: &BlockSpec, m: &[Vec<i64>]) -> Result<Self> {
        let n = block.len();
        if m.len() != n || m.iter().any(|r| r.len() != n) {
            return Err(Error::schema(block.title(), format!("matrix must be {n}×{n}")));
        }
        let mut entries = Vec::with_capacity(n);
        for (i, row) in m.iter().enumerate() {
            let mut out = Vec::with_capacity(n);
            for (j, &v) in row.iter().enumerate() {
                let ok = if i == j {
                    v == 1
                } else {
                    v == 0 || (v > 0 && block.entry_allowed(i, j))
                };
                if !ok {
                    return Err(Error::consistency(
                        block.title(),
                        format!("entry ({}, {}) = {v} is not allowed", block.irreps[i], block.irreps[j]),
                    ));
                }
                out.push(EntryState::Known(v as u32));
            }
            entries.push(out);
        }
        Ok(DecompMatrix {
            block: block.clone(),
            entries,
        })
    }

    /// Starting domains for completion: structural zeros, unit diagonal, Hecke
    /// columns and known entries fixed; everything else unbounded.
    pub fn with_unknowns(block: &BlockSpec) -> Result<Self> {
        let n = block.len();
        let mut entries = vec![vec![EntryState::Known(0); n]; n];
        for (i, row) in entries.iter_mut().enumerate() {
            for (j, e) in row.iter_mut().enumerate() {
                *e = if i == j {
                    EntryState::Known(1)
                } else if block.entry_allowed(i, j) {
                    EntryState::FREE
                } else {
                    EntryState::Known(0)
                };
            }
        }
        let mut m = DecompMatrix {
            block: block.clone(),
            entries,
        };
        for (col, values) in &block.hecke_columns {
            let j = block.position(col)?;
            for (i, &v) in values.iter().enumerate() {
                m.fix(i, j, v, "Hecke column")?;
            }
        }
        for e in &block.known_entries {
            let (i, j) = (block.position(&e.row)?, block.position(&e.col)?);
            m.fix(i, j, e.value as i64, "known entry")?;
        }
        Ok(m)
    }

    fn fix(&mut self, i: usize, j: usize, v: i64, why: &str) -> Result<()> {
        let cur = self.entries[i][j];
        if v < 0 || !cur.contains(v as u32) {
            return Err(Error::EmptyDomain {
                row: self.block.irreps[i].clone(),
                col: self.block.irreps[j].clone(),
                reason: format!("{why} gives {v}, domain is {cur}"),
            });
        }
        self.entries[i][j] = EntryState::Known(v as u32);
        Ok(())
    }

    pub fn n(&self) -> usize {
        self.entries.len()
    }

    pub fn get(&self, row: &str, col: &str) -> Result<EntryState> {
        Ok(self.entries[self.block.position(row)?][self.block.position(col)?])
    }

    /// Cells that are not yet known, in row-major block order.
    pub fn unknown_cells(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for (i, row) in self.entries.iter().enumerate() {
            for (j, e) in row.iter().enumerate() {
                if e.known().is_none() {
                    out.push((i, j));
                }
            }
        }
        out
    }

    pub fn is_complete(&self) -> bool {
        self.entries.iter().flatten().all(|e| e.known().is_some())
    }

    /// The integer matrix, or `UnknownEntries` naming the first open cell.
    pub fn to_integers(&self) -> Result<Vec<Vec<i64>>> {
        self.entries
            .iter()
            .enumerate()
            .map(|(i, row)| {
                row.iter()
                    .enumerate()
                    .map(|(j, e)| {
                        e.known().map(i64::from).ok_or_else(|| {
                            Error::UnknownEntries(format!(
                                "[M({}):L({})] is {e}",
                                self.block.irreps[i], self.block.irreps[j]
                            ))
                        })
                    })
                    .collect()
            })
            .collect()
    }

    /// Exact inverse `A` with `A·D = I`.
    pub fn invert(&self) -> Result<Vec<Vec<i64>>> {
        Ok(invert_unitriangular(&self.to_integers()?))
    }

    /// `[L(label)]` in the Verma basis: row `label` of the inverse.
    pub fn simple_in_vermas(&self, label: &str) -> Result<GrothendieckVector> {
        let i = self.block.position(label)?;
        let a = self.invert()?;
        Ok(GrothendieckVector::from_row(&self.block, Basis::Verma, &a[i]))
    }

    /// Graded character of `L(label)`.
    pub fn character_of_simple(&self, label: &str) -> Result<GradedCharacter> {
        let i = self.block.position(label)?;
        let a = self.invert()?;
        character_from_row(&self.block, &a[i])
    }

    /// Support dimension (pole order) and, when finite, the dimension.
    pub fn classify_support(&self, label: &str) -> Result<SupportClass> {
        classify_character(&self.character_of_simple(label)?)
    }

    /// Compares every computed support with the block's margin annotations.
    pub fn check_annotations(&self) -> Result<AnnotationReport> {
        let a = self.invert()?;
        let mut report = AnnotationReport::default();
        for (i, label) in self.block.irreps.iter().enumerate() {
            let class = classify_character(&character_from_row(&self.block, &a[i])?)?;
            let expected = self
                .block
                .support
                .get(label)
                .map(|s| s.support_dim())
                .unwrap_or(self.block.rank);
            report.checked += 1;
            if class.support_dim != expected {
                report.mismatches.push(AnnotationMismatch {
                    label: label.clone(),
                    annotation: self.block.support.get(label).copied(),
                    expected,
                    computed: class.support_dim,
                });
            }
        }
        Ok(report)
    }
}

/// Inverse of an upper unitriangular integer matrix by back-substitution.
pub fn invert_unitriangular(d: &[Vec<i64>]) -> Vec<Vec<i64>> {
    let n = d.len();
    let mut a = vec![vec![0i64; n]; n];
    for i in 0..n {
        a[i][i] = 1;
        for j in i + 1..n {
            let mut s = 0i64;
            for k in i..j {
                if a[i][k] != 0 && d[k][j] != 0 {
                    s += a[i][k] * d[k][j];
                }
            }
            a[i][j] = -s;
        }
    }
    a
}

/// `Σ_σ row[σ] · dim σ · t^{h(σ)} / (1-t)^rank`.
pub fn character_from_row(block: &BlockSpec, row: &[i64]) -> Result<GradedCharacter> {
    let terms = block.irreps.iter().zip(row).filter(|(_, &c)| c != 0).map(|(l, &c)| {
        (
            block.h_weights[l].clone(),
            BigInt::from(c) * BigInt::from(block.dims[l]),
        )
    });
    GradedCharacter::from_terms(block.rank, terms)
}

/// Support dimension and, for finite-dimensional modules, the dimension.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SupportClass {
    pub support_dim: u32,
    pub dim: Option<BigInt>,
}

pub fn classify_character(x: &GradedCharacter) -> Result<SupportClass> {
    let p = x.pole_order_at_one()?;
    let dim = (p.order == 0).then(|| p.reduced.numerator_at_one());
    Ok(SupportClass {
        support_dim: p.order,
        dim,
    })
}

/// One row whose computed support disagrees with its annotation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AnnotationMismatch {
    pub label: String,
    /// `None` means the row carried no annotation (full support expected).
    pub annotation: Option<SupportAnnotation>,
    pub expected: u32,
    pub computed: u32,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct AnnotationReport {
    pub checked: usize,
    pub mismatches: Vec<AnnotationMismatch>,
}

impl AnnotationReport {
    pub fn all_match(&self) -> bool {
        self.mismatches.is_empty()
    }
}

/// Basis of a Grothendieck-group vector.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Basis {
    Verma,
    Simple,
}

/// An integer combination of Verma or simple classes in one category `O_c(W)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GrothendieckVector {
    pub basis: Basis,
    pub group: String,
    pub c: BigRational,
    pub coords: BTreeMap<String, i64>,
}

impl GrothendieckVector {
    pub fn zero(basis: Basis, group: &str, c: &BigRational) -> Self {
        GrothendieckVector {
            basis,
            group: group.to_string(),
            c: c.clone(),
            coords: BTreeMap::new(),
        }
    }

    /// A single basis class.
    pub fn unit(basis: Basis, group: &str, c: &BigRational, label: &str) -> Self {
        let mut v = Self::zero(basis, group, c);
        v.coords.insert(label.to_string(), 1);
        v
    }

    /// Builds from `(label, coefficient)` pairs, dropping zeros.
    pub fn from_terms<'a>(
        basis: Basis,
        group: &str,
        c: &BigRational,
        terms: impl IntoIterator<Item = (&'a str, i64)>,
    ) -> Self {
        let mut v = Self::zero(basis, group, c);
        for (l, k) in terms {
            v.add_term(l, k);
        }
        v
    }

    fn from_row(block: &BlockSpec, basis: Basis, row: &[i64]) -> Self {
        Self::from_terms(
            basis,
            &block.group,
            &block.c,
            block.irreps.iter().map(String::as_str).zip(row.iter().copied()),
        )
    }

    pub fn add_term(&mut self, label: &str, k: i64) {
        if k == 0 {
            return;
        }
        let e = self.coords.entry(label.to_string()).or_insert(0);
        *e += k;
        if *e == 0 {
            self.coords.remove(label);
        }
    }

    pub fn get(&self, label: &str) -> i64 {
        self.coords.get(label).copied().unwrap_or(0)
    }

    pub fn is_zero(&self) -> bool {
        self.coords.is_empty()
    }

    fn compatible(&self, other: &Self) -> Result<()> {
        if self.basis != other.basis || self.group != other.group || self.c != other.c {
            return Err(Error::Incompatible(format!(
                "cannot combine vectors of {} c={} ({:?}) and {} c={} ({:?})",
                self.group,
                format_rational(&self.c),
                self.basis,
                other.group,
                format_rational(&other.c),
                other.basis
            )));
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.compatible(other)?;
        let mut out = self.clone();
        for (l, k) in &other.coords {
            out.add_term(l, *k);
        }
        Ok(out)
    }

    pub fn scale(&self, k: i64) -> Self {
        let mut out = Self::zero(self.basis, &self.group, &self.c);
        for (l, v) in &self.coords {
            out.add_term(l, v * k);
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.scale(-1))
    }
}

impl fmt::Display for GrothendieckVector {
    /// Renders like `M(1_x) - 2M(112_z) + M(210_x)`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sym = match self.basis {
            Basis::Verma => "M",
            Basis::Simple => "L",
        };
        if self.coords.is_empty() {
            return write!(f, "0");
        }
        for (i, (l, k)) in self.coords.iter().enumerate() {
            let sign = if *k < 0 {
                "-"
            } else if i > 0 {
                "+"
            } else {
                ""
            };
            let sep = if i > 0 { " " } else { "" };
            let mag = k.abs();
            let coef = if mag == 1 { String::new() } else { mag.to_string() };
            if i > 0 {
                write!(f, "{sep}{sign} {coef}{sym}({l})")?;
            } else {
                write!(f, "{sign}{coef}{sym}({l})")?;
            }
        }
        Ok(())
    }
}

/// Renders `v` with terms in the order of `order` (block order).
pub fn format_in_order(v: &GrothendieckVector, order: &[String]) -> String {
    let sym = match v.basis {
        Basis::Verma => "M",
        Basis::Simple => "L",
    };
    let mut out = String::new();
    let mut rest: Vec<&String> = v.coords.keys().filter(|l| !order.contains(l)).collect();
    rest.sort();
    for l in order.iter().chain(rest) {
        let k = v.get(l);
        if k == 0 {
            continue;
        }
        let mag = k.abs();
        let coef = if mag == 1 { String::new() } else { mag.to_string() };
        if out.is_empty() {
            if k < 0 {
                out.push('-');
            }
        } else {
            out.push_str(if k < 0 { " - " } else { " + " });
        }
        out.push_str(&format!("{coef}{sym}({l})"));
    }
    if out.is_empty() {
        out.push('0');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::ratio;
    use std::collections::BTreeSet;

    pub(crate) fn toy_block(weights: &[(&str, i64, u64)], rank: u32) -> BlockSpec {
        BlockSpec {
            group: "T".into(),
            rank,
            c: ratio(1, 2),
            name: "toy".into(),
            provenance: Default::default(),
            irreps: weights.iter().map(|w| w.0.to_string()).collect(),
            h_weights: weights.iter().map(|w| (w.0.to_string(), ratio(w.1, 1))).collect(),
            dims: weights.iter().map(|w| (w.0.to_string(), w.2)).collect(),
            sign_duals: weights.iter().map(|w| (w.0.to_string(), w.0.to_string())).collect(),
            support: BTreeMap::new(),
            hecke_columns: BTreeMap::new(),
            known_entries: vec![],
            hom_hints: vec![],
            expected_matrix: None,
            expected_inverse: None,
            finite_dim_flags: BTreeSet::new(),
            defect: None,
        }
    }

    #[test]
    fn identity_inverts_to_identity() {
        let id: Vec<Vec<i64>> = (0..5).map(|i| (0..5).map(|j| (i == j) as i64).collect()).collect();
        assert_eq!(invert_unitriangular(&id), id);
    }

    #[test]
    fn bidiagonal_inverse_alternates() {
        let d = vec![vec![1, 1, 0], vec![0, 1, 1], vec![0, 0, 1]];
        assert_eq!(
            invert_unitriangular(&d),
            vec![vec![1, -1, 1], vec![0, 1, -1], vec![0, 0, 1]]
        );
    }

    #[test]
    fn defect_zero_block_simple_is_verma() {
        let b = toy_block(&[("a", 3, 5)], 2);
        let m = DecompMatrix::from_integers(&b, &[vec![1]]).unwrap();
        let v = m.simple_in_vermas("a").unwrap();
        assert_eq!(v.coords, BTreeMap::from([("a".to_string(), 1)]));
        let ch = m.character_of_simple("a").unwrap();
        assert_eq!(ch, GradedCharacter::monomial(ratio(3, 1), 5, 2));
        assert_eq!(m.classify_support("a").unwrap().support_dim, 2);
    }

    #[test]
    fn finite_simple_in_rank_one() {
        // L(a) = M(a) - M(b) with h(b) = h(a) + 2: character 1 + t, dimension 2.
        let b = toy_block(&[("a", 0, 1), ("b", 2, 1)], 1);
        let m = DecompMatrix::from_integers(&b, &[vec![1, 1], vec![0, 1]]).unwrap();
        let s = m.classify_support("a").unwrap();
        assert_eq!(
            s,
            SupportClass {
                support_dim: 0,
                dim: Some(BigInt::from(2))
            }
        );
    }

    #[test]
    fn annotation_mismatch_is_reported() {
        let mut b = toy_block(&[("a", 0, 1), ("b", 2, 1)], 1);
        b.support.insert("a".into(), SupportAnnotation::Finite);
        let m = DecompMatrix::from_integers(&b, &[vec![1, 1], vec![0, 1]]).unwrap();
        assert!(m.check_annotations().unwrap().all_match());
        b.support.insert("a".into(), SupportAnnotation::Dim(1));
        let m = DecompMatrix::from_integers(&b, &[vec![1, 1], vec![0, 1]]).unwrap();
        let r = m.check_annotations().unwrap();
        assert_eq!(r.mismatches.len(), 1);
        assert_eq!(r.mismatches[0].computed, 0);
    }

    #[test]
    fn order_violations_are_rejected() {
        let b = toy_block(&[("a", 0, 1), ("b", 2, 1)], 1);
        assert!(DecompMatrix::from_integers(&b, &[vec![1, 0], vec![1, 1]]).is_err());
        assert!(DecompMatrix::from_integers(&b, &[vec![1, -1], vec![0, 1]]).is_err());
    }

    #[test]
    fn unknown_entries_block_inversion() {
        let b = toy_block(&[("a", 0, 1), ("b", 2, 1)], 1);
        let m = DecompMatrix::with_unknowns(&b).unwrap();
        assert_eq!(m.unknown_cells(), vec![(0, 1)]);
        assert!(matches!(m.invert(), Err(Error::UnknownEntries(_))));
    }

    #[test]
    fn entry_state_meet() {
        let e = EntryState::FREE;
        assert_eq!(e.meet(1, Some(1)), Some(EntryState::Known(1)));
        assert_eq!(EntryState::Known(2).meet(0, Some(1)), None);
        assert_eq!(e.meet(0, Some(3)), Some(EntryState::Unknown { lo: 0, hi: Some(3) }));
    }

    #[test]
    fn vector_arithmetic_and_rendering() {
        let c = ratio(1, 4);
        let a = GrothendieckVector::from_terms(Basis::Verma, "E7", &c, [("35_b", 1), ("210_b", -1)]);
        let b = GrothendieckVector::from_terms(Basis::Verma, "E7", &c, [("210_b", 1), ("105_a", -2)]);
        let s = a.add(&b).unwrap();
        assert_eq!(s.get("210_b"), 0);
        assert_eq!(
            format_in_order(&s, &["35_b".into(), "105_a".into()]),
            "M(35_b) - 2M(105_a)"
        );
        let other = GrothendieckVector::zero(Basis::Simple, "E7", &c);
        assert!(a.add(&other).is_err());
    }
}
