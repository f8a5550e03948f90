//! Defect-one blocks: bidiagonal decomposition matrices generated from the
//! weight list alone, the support of the lowest simple, and the count check
//! comparing the number of simples with the codimension of that support.

use std::collections::{BTreeMap, BTreeSet};
use std::path::Path;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, Zero};
use serde::Deserialize;

use crate::cato::DecompMatrix;
use crate::charpoly::GradedCharacter;
use crate::error::{Error, Result};
use crate::rational::{format_rational, parse_rational};
use crate::repdata::{read_json, BlockSpec, DataSet, Provenance};

/// A defect-one block given by shifted weights (first = 0) and dimensions.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Defect1Block {
    pub labels: Vec<String>,
    pub weights: Vec<BigRational>,
    pub dims: Vec<u64>,
    pub rank: u32,
}

impl Defect1Block {
    /// Validates and shifts `weights` so the first is 0; labels default to `τ1, τ2, …`.
    pub fn new(weights: Vec<BigRational>, dims: Vec<u64>, rank: u32) -> Result<Self> {
        let labels = (1..=weights.len()).map(|k| format!("τ{k}")).collect();
        Self::with_labels(labels, weights, dims, rank)
    }

    pub fn with_labels(labels: Vec<String>, weights: Vec<BigRational>, dims: Vec<u64>, rank: u32) -> Result<Self> {
        let ctx = "defect-one block";
        if weights.len() < 2 {
            return Err(Error::schema(ctx, "needs at least two members"));
        }
        if dims.len() != weights.len() || labels.len() != weights.len() {
            return Err(Error::schema(ctx, "labels, weights and dims must have equal length"));
        }
        if dims.contains(&0) {
            return Err(Error::schema(ctx, "dimensions must be positive"));
        }
        let base = weights[0].clone();
        let weights: Vec<BigRational> = weights.into_iter().map(|w| w - &base).collect();
        for w in weights.windows(2) {
            if w[1] <= w[0] {
                return Err(Error::consistency(ctx, "weights must be strictly increasing"));
            }
            if !(&w[1] - &w[0]).is_integer() {
                return Err(Error::consistency(ctx, "weight gaps must be integers"));
            }
        }
        Ok(Defect1Block {
            labels,
            weights,
            dims,
            rank,
        })
    }

    /// Reads the members of a bundled defect-one chart block.
    pub fn from_block(b: &BlockSpec) -> Result<Self> {
        let weights = b.irreps.iter().map(|l| b.h_weights[l].clone()).collect();
        let dims = b.irreps.iter().map(|l| b.dims[l]).collect();
        Self::with_labels(b.irreps.clone(), weights, dims, b.rank)
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    /// A block description carrying these weights, usable by the matrix code.
    pub fn to_block_spec(&self, group: &str, c: &BigRational) -> BlockSpec {
        BlockSpec {
            group: group.to_string(),
            rank: self.rank,
            c: c.clone(),
            name: format!("defect1_{}", self.labels[0]),
            provenance: Provenance::default(),
            irreps: self.labels.clone(),
            h_weights: self.labels.iter().cloned().zip(self.weights.iter().cloned()).collect(),
            dims: self.labels.iter().cloned().zip(self.dims.iter().copied()).collect(),
            sign_duals: self.labels.iter().map(|l| (l.clone(), l.clone())).collect(),
            support: BTreeMap::new(),
            hecke_columns: BTreeMap::new(),
            known_entries: Vec::new(),
            hom_hints: Vec::new(),
            expected_matrix: None,
            expected_inverse: None,
            finite_dim_flags: BTreeSet::new(),
            defect: Some(1),
        }
    }
}

/// The bidiagonal matrix: ones on and just above the diagonal.
pub fn bidiagonal(m: usize) -> Vec<Vec<i64>> {
    (0..m)
        .map(|i| (0..m).map(|j| i64::from(j == i || j == i + 1)).collect())
        .collect()
}

/// Decomposition matrix of a defect-one block.
pub fn defect1_matrix(b: &Defect1Block) -> Result<DecompMatrix> {
    let spec = b.to_block_spec("W", &BigRational::zero());
    DecompMatrix::from_integers(&spec, &bidiagonal(b.len()))
}

/// Decomposition matrix of a bundled defect-one chart block, over its own labels.
pub fn chart_matrix(spec: &BlockSpec) -> Result<DecompMatrix> {
    DecompMatrix::from_integers(spec, &bidiagonal(spec.len()))
}

/// Character of `L(τ_1)`: `Σ_k (−1)^(k−1) dim τ_k t^(h'_k) / (1−t)^rank`.
pub fn lead_character(b: &Defect1Block) -> Result<GradedCharacter> {
    let terms = b.weights.iter().zip(&b.dims).enumerate().map(|(k, (w, &d))| {
        let sign = if k % 2 == 0 { 1 } else { -1 };
        (w.clone(), BigInt::from(sign) * BigInt::from(d))
    });
    GradedCharacter::from_terms(b.rank, terms)
}

/// Support dimension of `L(τ_1)`: the pole order of its character at `t = 1`.
pub fn defect1_support(b: &Defect1Block) -> Result<u32> {
    Ok(lead_character(b)?.pole_order_at_one()?.order)
}

/// Outcome of comparing the number of simples with `codim Supp L(τ_1) + 1`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct CountCheck {
    pub codim_plus_one: u32,
    pub count: u32,
    pub equal: bool,
}

pub fn simple_count_check(b: &Defect1Block) -> Result<CountCheck> {
    let support = defect1_support(b)?;
    let codim_plus_one = b.rank - support + 1;
    let count = b.len() as u32;
    Ok(CountCheck {
        codim_plus_one,
        count,
        equal: codim_plus_one == count,
    })
}

/// One defect-one block listed by shifted weights, with the printed support.
#[derive(Clone, Debug, PartialEq, Eq, Deserialize)]
pub struct ShiftedListEntry {
    pub c: String,
    pub lead: String,
    pub shifted_weights: Vec<i64>,
    pub support: u32,
    /// Member labels in weight order; absent when the source omits them.
    #[serde(default)]
    pub members: Option<Vec<String>>,
}

#[derive(Clone, Debug, Deserialize)]
pub struct ShiftedListFile {
    pub group: String,
    #[serde(default)]
    pub provenance: Option<Provenance>,
    pub blocks: Vec<ShiftedListEntry>,
}

impl ShiftedListEntry {
    pub fn title(&self) -> String {
        format!("c={} block of {}", self.c, self.lead)
    }

    /// Builds the block, looking member dimensions up in the irrep registry.
    pub fn to_block(&self, group: &str, data: &DataSet) -> Result<Defect1Block> {
        let members = self.members.as_ref().ok_or_else(|| {
            Error::MissingData(format!("{} {}: member labels are not available", group, self.title()))
        })?;
        if members.len() != self.shifted_weights.len() {
            return Err(Error::schema(
                self.title(),
                "members and shifted_weights differ in length",
            ));
        }
        let registry = data.irreps(group)?;
        let c = parse_rational(&self.c)?;
        let dims = members.iter().map(|l| registry.dim(l)).collect::<Result<Vec<_>>>()?;
        // The listed shifts must agree with the registry's reflection data.
        let g = data.group(group)?;
        let h0 = crate::repdata::compute_h_weight(g, registry.get(&members[0])?, &c).ok();
        for (l, s) in members.iter().zip(&self.shifted_weights) {
            if let (Some(h0), Ok(h)) = (&h0, crate::repdata::compute_h_weight(g, registry.get(l)?, &c)) {
                if &h - h0 != BigRational::from_integer((*s).into()) {
                    return Err(Error::consistency(
                        self.title(),
                        format!("shift of {l} is {} but the list says {s}", format_rational(&(&h - h0))),
                    ));
                }
            }
        }
        Defect1Block::with_labels(
            members.clone(),
            self.shifted_weights
                .iter()
                .map(|&w| BigRational::from_integer(w.into()))
                .collect(),
            dims,
            g.rank,
        )
    }
}

/// Loads `<root>/<group>/defect1_shifted_lists.json`.
pub fn load_shifted_lists(data: &DataSet, group: &str) -> Result<ShiftedListFile> {
    let path = data.root.join(group).join("defect1_shifted_lists.json");
    load_shifted_lists_from(&path)
}

pub fn load_shifted_lists_from(path: &Path) -> Result<ShiftedListFile> {
    let file: ShiftedListFile = read_json(path)?;
    for b in &file.blocks {
        if b.shifted_weights.first() != Some(&0) || b.shifted_weights.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::consistency(
                b.title(),
                "shifted weights must start at 0 and increase",
            ));
        }
        if b.shifted_weights.iter().any(|w| w.is_negative()) {
            return Err(Error::consistency(b.title(), "negative shift"));
        }
    }
    Ok(file)
}
