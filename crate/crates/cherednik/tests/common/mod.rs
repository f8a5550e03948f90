//! Fixtures, oracles and property checks shared by the integration tests and
//! the acceptance harness.

#![allow(dead_code, clippy::needless_range_loop)]

use std::collections::BTreeMap;

use cherednik::cato::{character_from_row, invert_unitriangular, Basis, DecompMatrix, EntryState, GrothendieckVector};
use cherednik::functors::{
    ind_vector, load_contexts, peel_basis_change, peel_greedy, res_vector, CategoryContext, ParabolicContext,
};
use cherednik::repdata::{BlockSpec, BranchingTable, DataSet};
use cherednik::report::{block_matrix, with_dual};
use cherednik::solver::{propagate, search, ConstraintConfig, SearchResult, SolverContext, SolverState};
use proptest::prelude::*;

pub fn data() -> DataSet {
    DataSet::load_default(None).expect("bundled data loads")
}

pub fn contexts(data: &DataSet) -> Vec<ParabolicContext> {
    load_contexts(data).expect("bundled contexts load")
}

/// Blocks whose printed matrix the solver must reproduce uniquely.
pub const SOLVED_BLOCKS: &[(&str, &str, &str)] = &[
    ("E8", "1/6", "block_112_z"),
    ("E8", "1/4", "block_28_x"),
    ("E8", "1/4", "block_84_x"),
    ("E8", "1/4", "block_8_z"),
    ("E8", "1/4", "block_1400_z"),
    ("F4", "1/6", "principal"),
    ("F4", "1/4", "principal"),
    ("F4", "1/3", "principal"),
    ("F4", "1/3", "block_4_2"),
];

/// Blocks carrying margin annotations on a printed matrix or defect-one chart.
pub const ANNOTATED_BLOCKS: &[(&str, &str, &str)] = &[
    ("E8", "1/12", "principal"),
    ("E8", "1/10", "principal"),
    ("E8", "1/8", "principal"),
    ("E8", "1/6", "block_112_z"),
    ("E8", "1/5", "principal"),
    ("E8", "1/5", "block_8_z"),
    ("E8", "1/4", "block_28_x"),
    ("E8", "1/4", "block_84_x"),
    ("E8", "1/4", "block_8_z"),
    ("E8", "1/4", "block_1400_z"),
    ("F4", "1/6", "principal"),
    ("F4", "1/4", "principal"),
    ("F4", "1/4", "block_2_1"),
    ("F4", "1/4", "block_2_3"),
    ("F4", "1/3", "principal"),
    ("F4", "1/3", "block_4_2"),
];

/// A block joined with its sign-dual block, solved with the bundled context.
pub fn solve_joint(
    data: &DataSet,
    ctxs: &[ParabolicContext],
    (group, c, name): (&str, &str, &str),
    cfg: &ConstraintConfig,
) -> (BlockSpec, SearchResult) {
    let b = data.block(group, c, name).expect("block loads");
    let joint = with_dual(data, &b).expect("dual block loads");
    let ctx = SolverContext::for_block(ctxs, data, &joint);
    let r = search(&joint, ctx, cfg).expect("search runs");
    (joint, r)
}

/// Inverse of an upper unitriangular matrix by solving `D x = e_k` column by
/// column from the bottom up: independent of the row-wise library routine.
pub fn inverse_by_columns(d: &[Vec<i64>]) -> Vec<Vec<i64>> {
    let n = d.len();
    let mut inv = vec![vec![0i64; n]; n];
    for k in 0..n {
        let mut x = vec![0i64; n];
        for i in (0..n).rev() {
            let rhs = i64::from(i == k);
            let s: i64 = (i + 1..n).map(|j| d[i][j] * x[j]).sum();
            x[i] = rhs - s;
        }
        for i in 0..n {
            inv[i][k] = x[i];
        }
    }
    inv
}

/// Random upper unitriangular matrices of size 1..=max_n with small entries.
pub fn unitriangular(max_n: usize) -> impl Strategy<Value = Vec<Vec<i64>>> {
    (1..=max_n).prop_flat_map(|n| {
        prop::collection::vec(prop_oneof![3 => Just(0i64), 2 => -2i64..=2], n * (n - 1) / 2).prop_map(move |upper| {
            let mut m = vec![vec![0i64; n]; n];
            let mut it = upper.into_iter();
            for i in 0..n {
                m[i][i] = 1;
                for j in i + 1..n {
                    m[i][j] = it.next().unwrap();
                }
            }
            m
        })
    })
}

pub fn check_inverse(d: &[Vec<i64>]) -> Result<(), String> {
    let a = invert_unitriangular(d);
    let oracle = inverse_by_columns(d);
    if a != oracle {
        return Err(format!("inverse disagrees with column back-substitution for {d:?}"));
    }
    let n = d.len();
    for i in 0..n {
        for j in 0..n {
            let s: i128 = (0..n).map(|k| a[i][k] as i128 * d[k][j] as i128).sum();
            if s != i128::from(i == j) {
                return Err(format!("A·D differs from the identity at ({i}, {j})"));
            }
        }
    }
    Ok(())
}

/// Every bundled category context made of fully known blocks, grouped by group and parameter.
pub fn peel_contexts(data: &DataSet) -> Vec<CategoryContext> {
    let mut groups: BTreeMap<(String, String), Vec<DecompMatrix>> = BTreeMap::new();
    for b in data.all_blocks().unwrap() {
        if let Some(m) = block_matrix(&b).unwrap() {
            groups.entry((b.group.clone(), b.c.to_string())).or_default().push(m);
        }
    }
    groups
        .values()
        .map(|ms| CategoryContext::from_matrices(ms).unwrap())
        .collect()
}

/// A random Verma-basis class on the labels of one context.
pub fn class_in(ctx: &CategoryContext) -> impl Strategy<Value = GrothendieckVector> {
    let labels: Vec<String> = ctx.keys.keys().cloned().collect();
    let (group, c) = (ctx.group.clone(), ctx.c.clone());
    prop::collection::vec(prop_oneof![4 => Just(0i64), 3 => 0i64..=3, 1 => -2i64..0], labels.len()).prop_map(
        move |coeffs| {
            GrothendieckVector::from_terms(
                Basis::Verma,
                &group,
                &c,
                labels.iter().map(String::as_str).zip(coeffs.iter().copied()),
            )
        },
    )
}

pub fn check_peel_agreement(v: &GrothendieckVector, ctx: &CategoryContext) -> Result<(), String> {
    let g = peel_greedy(v, ctx).map_err(|e| e.to_string())?;
    let b = peel_basis_change(v, ctx).map_err(|e| e.to_string())?;
    if g != b {
        return Err(format!("greedy {g:?} but basis change {b:?} for {v}"));
    }
    Ok(())
}

/// Random child and parent classes for one branching table.
pub fn frobenius_pair(t: &BranchingTable) -> impl Strategy<Value = (GrothendieckVector, GrothendieckVector)> {
    let mut children: Vec<String> = t.rows.values().flatten().cloned().collect();
    children.sort();
    children.dedup();
    let parents: Vec<String> = t.rows.keys().cloned().collect();
    let (pg, cg) = (t.parent.clone(), t.child.clone());
    let c = num_rational::BigRational::from_integer(0.into());
    (
        prop::collection::vec(-3i64..=3, children.len()),
        prop::collection::vec(-3i64..=3, parents.len()),
    )
        .prop_map(move |(x, y)| {
            let v = GrothendieckVector::from_terms(Basis::Verma, &cg, &c, children.iter().map(String::as_str).zip(x));
            let w = GrothendieckVector::from_terms(Basis::Verma, &pg, &c, parents.iter().map(String::as_str).zip(y));
            (v, w)
        })
}

fn pairing(a: &GrothendieckVector, b: &GrothendieckVector) -> i64 {
    a.coords.iter().map(|(l, k)| k * b.get(l)).sum()
}

/// `⟨Ind v, w⟩ = ⟨v, Res w⟩`.
pub fn check_frobenius(t: &BranchingTable, v: &GrothendieckVector, w: &GrothendieckVector) -> Result<(), String> {
    let lhs = pairing(&ind_vector(v, t).map_err(|e| e.to_string())?, w);
    let rhs = pairing(v, &res_vector(w, t).map_err(|e| e.to_string())?);
    if lhs != rhs {
        return Err(format!("⟨Ind v, w⟩ = {lhs} but ⟨v, Res w⟩ = {rhs}"));
    }
    Ok(())
}

/// Blocks with Hecke columns that propagate quickly enough for randomized runs.
pub fn propagation_blocks(data: &DataSet) -> Vec<BlockSpec> {
    data.all_blocks()
        .unwrap()
        .into_iter()
        .filter(|b| !b.hecke_columns.is_empty() && b.expected_matrix.is_some() && b.len() <= 26)
        .collect()
}

fn within(inner: EntryState, outer: EntryState) -> bool {
    inner.lo() >= outer.lo() && outer.hi().is_none_or(|h| inner.hi().is_some_and(|x| x <= h))
}

/// Fixes the printed value of every cell selected by `mask`, then checks that
/// propagation only narrows domains, never narrows a fixed-input state less
/// than the unfixed one, keeps the printed matrix feasible, and is idempotent.
pub fn check_propagation(b: &BlockSpec, mask: &[bool]) -> Result<(), String> {
    let cfg = ConstraintConfig::default();
    let expected = b.expected_matrix.as_ref().unwrap();
    let base = SolverState::initial(b, &cfg).map_err(|e| e.to_string())?;
    let mut coarse = base.clone();
    propagate(&mut coarse, &cfg, &mut Vec::new()).map_err(|e| e.to_string())?;
    let mut fine = base.clone();
    let cells = base.matrix.unknown_cells();
    for (&(i, j), &pick) in cells.iter().zip(mask.iter().cycle()) {
        if pick {
            fine.matrix.entries[i][j] = EntryState::Known(expected[i][j] as u32);
        }
    }
    let before = fine.matrix.entries.clone();
    propagate(&mut fine, &cfg, &mut Vec::new()).map_err(|e| format!("printed values rejected: {e}"))?;
    let n = b.len();
    for i in 0..n {
        for j in 0..n {
            let (f, c, s) = (fine.matrix.entries[i][j], coarse.matrix.entries[i][j], before[i][j]);
            if !within(f, s) || !within(c, base.matrix.entries[i][j]) {
                return Err(format!("cell ({i}, {j}) widened by propagation"));
            }
            if !within(f, c) {
                return Err(format!("cell ({i}, {j}): more input gave a wider domain {f} than {c}"));
            }
            if !f.contains(expected[i][j] as u32) {
                return Err(format!("cell ({i}, {j}) lost the printed value"));
            }
        }
    }
    let once = fine.matrix.entries.clone();
    let mut trace = Vec::new();
    propagate(&mut fine, &cfg, &mut trace).map_err(|e| e.to_string())?;
    if fine.matrix.entries != once || !trace.is_empty() {
        return Err("a second propagation changed domains".into());
    }
    Ok(())
}

/// Graded dimensions of every simple of every bundled matrix through `depth`.
pub fn negative_graded_dims(data: &DataSet, depth: u32) -> Vec<String> {
    let mut bad = Vec::new();
    for b in data.all_blocks().unwrap() {
        let Some(m) = block_matrix(&b).unwrap() else { continue };
        let a = m.invert().unwrap();
        for (i, l) in b.irreps.iter().enumerate() {
            let chi = character_from_row(&b, &a[i]).unwrap();
            if chi.graded_dims(depth).iter().any(|(_, d)| d < &0.into()) {
                bad.push(format!("{} L({l})", b.title()));
            }
        }
    }
    bad
}
