//! Deterministic generators for the concrete systems the test suite and
//! the command line expose: integer windows, finite groups, free-monoid
//! words, Temperley-Lieb paths, and double-coset bicategories.

use std::collections::BTreeSet;
use std::f64::consts::PI;

use crate::compose::Bicategory3;
use crate::error::{Error, Result};
use crate::fusion::{Completeness, FusionSystem, Multiplicity, SystemBuilder};
use crate::graph::PrincipalGraphPair;
use crate::perturb::{Constituent, DimensionData};

/// Parameters selecting one generated example system.
#[derive(Debug, Clone)]
pub enum ExampleDescriptor {
    IntegerFusion { range: u32 },
    CyclicGroup { order: usize },
    FiniteGroup { table: GroupTable },
    FreeMonoid { max_len: u32 },
    TlPath { n: usize },
    DoubleCoset { table: GroupTable, h: Vec<usize>, k: Vec<usize> },
}

/// Multiplication table of a finite group, `mul[i][j] = index of g_i g_j`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GroupTable {
    pub names: Vec<String>,
    pub mul: Vec<Vec<usize>>,
}

impl GroupTable {
    pub fn order(&self) -> usize {
        self.names.len()
    }

    /// The cyclic group of the given order with elements `a^k`.
    pub fn cyclic(n: usize) -> GroupTable {
        assert!(n >= 1, "cyclic group needs positive order");
        GroupTable {
            names: (0..n).map(|k| format!("a^{k}")).collect(),
            mul: (0..n).map(|i| (0..n).map(|j| (i + j) % n).collect()).collect(),
        }
    }

    /// The symmetric group on three points in cycle notation.
    pub fn symmetric3() -> GroupTable {
        let perms: [[usize; 3]; 6] = [
            [0, 1, 2], // e
            [1, 0, 2], // (12)
            [2, 1, 0], // (13)
            [0, 2, 1], // (23)
            [1, 2, 0], // (123)
            [2, 0, 1], // (132)
        ];
        let names = ["e", "(12)", "(13)", "(23)", "(123)", "(132)"];
        let mul = perms
            .iter()
            .map(|p| {
                perms
                    .iter()
                    .map(|q| {
                        // p after q, as functions on points
                        let composed = [p[q[0]], p[q[1]], p[q[2]]];
                        perms.iter().position(|r| *r == composed).unwrap()
                    })
                    .collect()
            })
            .collect();
        GroupTable {
            names: names.iter().map(|s| s.to_string()).collect(),
            mul,
        }
    }
}

fn check_table_shape(table: &GroupTable) -> Result<()> {
    let n = table.order();
    if n == 0 {
        return Err(Error::NotAGroup("empty element set".into()));
    }
    if table.mul.len() != n || table.mul.iter().any(|r| r.len() != n) {
        return Err(Error::NotAGroup("multiplication table is not square".into()));
    }
    if table.mul.iter().flatten().any(|&v| v >= n) {
        return Err(Error::NotAGroup("product index out of range".into()));
    }
    let names: BTreeSet<_> = table.names.iter().collect();
    if names.len() != n {
        return Err(Error::NotAGroup("duplicate element names".into()));
    }
    Ok(())
}

fn identity_of(table: &GroupTable) -> Result<usize> {
    let n = table.order();
    (0..n)
        .find(|&e| (0..n).all(|x| table.mul[e][x] == x && table.mul[x][e] == x))
        .ok_or_else(|| Error::NotAGroup("no identity element".into()))
}

fn inverses_of(table: &GroupTable, e: usize) -> Result<Vec<usize>> {
    let n = table.order();
    (0..n)
        .map(|x| {
            (0..n)
                .find(|&y| table.mul[x][y] == e && table.mul[y][x] == e)
                .ok_or_else(|| {
                    Error::NotAGroup(format!("element {} has no inverse", table.names[x]))
                })
        })
        .collect()
}

fn check_associativity(table: &GroupTable) -> Result<()> {
    let n = table.order();
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                if table.mul[table.mul[i][j]][k] != table.mul[i][table.mul[j][k]] {
                    return Err(Error::NotAGroup(format!(
                        "associativity fails at ({}, {}, {})",
                        table.names[i], table.names[j], table.names[k]
                    )));
                }
            }
        }
    }
    Ok(())
}

/// The subgroup generated by one element, as sorted element indices.
pub fn cyclic_subgroup(table: &GroupTable, g: usize) -> Result<Vec<usize>> {
    check_table_shape(table)?;
    if g >= table.order() {
        return Err(Error::NotAGroup("generator index out of range".into()));
    }
    let e = identity_of(table)?;
    let mut set = BTreeSet::from([e]);
    let mut cur = g;
    for _ in 0..table.order() {
        if !set.insert(cur) {
            break;
        }
        cur = table.mul[cur][g];
    }
    Ok(set.into_iter().collect())
}

/// Integers in a symmetric window: objects `a^n` for |n| ≤ range.
pub fn make_integer_fusion(range: u32) -> Result<FusionSystem> {
    if range == 0 {
        return Err(Error::InvalidSystem("range must be at least 1".into()));
    }
    let r = range as i64;
    let mut b = SystemBuilder::new();
    for n in -r..=r {
        b.object(&format!("a^{n}"), "A", "A", &format!("a^{}", -n), n == 0);
    }
    for m in -r..=r {
        for n in -r..=r {
            let s = m + n;
            let (contains, truncated) = if s.abs() <= r {
                (vec![(format!("a^{s}"), Multiplicity::Known(1))], false)
            } else {
                (vec![], true)
            };
            b.entry(&format!("a^{m}"), &format!("a^{n}"), contains, truncated);
        }
    }
    b.generator("a^1");
    b.completeness(Completeness::Truncated(range));
    b.finish()
}

/// One self-dual-by-inversion object per group element, complete table.
pub fn make_group_fusion(table: &GroupTable) -> Result<FusionSystem> {
    check_table_shape(table)?;
    let e = identity_of(table)?;
    let inv = inverses_of(table, e)?;
    check_associativity(table)?;
    let n = table.order();
    let mut b = SystemBuilder::new();
    for x in 0..n {
        b.object(&table.names[x], "A", "A", &table.names[inv[x]], x == e);
    }
    for x in 0..n {
        for y in 0..n {
            b.entry(
                &table.names[x],
                &table.names[y],
                vec![(table.names[table.mul[x][y]].clone(), Multiplicity::Known(1))],
                false,
            );
        }
    }
    // A generator is only recorded when a single element spans the group.
    let gen = (0..n)
        .filter(|&g| g != e)
        .find(|&g| cyclic_subgroup(table, g).map(|s| s.len()).unwrap_or(0) == n);
    if let Some(g) = gen {
        b.generator(&table.names[g]);
    }
    b.completeness(Completeness::Complete);
    b.finish()
}

fn swap_letters(w: &str) -> String {
    w.chars()
        .map(|c| if c == 'a' { 'b' } else { 'a' })
        .collect()
}

fn word_dual(w: &str) -> String {
    swap_letters(&w.chars().rev().collect::<String>())
}

fn word_id(w: &str) -> String {
    if w.is_empty() {
        "e".to_string()
    } else {
        w.chars()
            .map(|c| if c == 'a' { 'α' } else { 'β' })
            .collect()
    }
}

/// Words of length ≤ L in two dual letters, with split-and-cancel fusion.
pub fn make_free_monoid_fusion(max_len: u32) -> Result<FusionSystem> {
    if max_len == 0 {
        return Err(Error::InvalidSystem("max word length must be at least 1".into()));
    }
    let l = max_len as usize;
    let mut words: Vec<String> = vec![String::new()];
    let mut level = vec![String::new()];
    for _ in 0..l {
        let mut next = Vec::new();
        for w in &level {
            for c in ['a', 'b'] {
                let mut v = w.clone();
                v.push(c);
                next.push(v);
            }
        }
        words.extend(next.iter().cloned());
        level = next;
    }
    let mut b = SystemBuilder::new();
    for w in &words {
        b.object(&word_id(w), "A", "A", &word_id(&word_dual(w)), w.is_empty());
    }
    for w1 in &words {
        for w2 in &words {
            let mut contains = Vec::new();
            let mut truncated = false;
            // c is a constituent of w1 ⊗ w2 exactly when w1 = x·d and
            // w2 = dual(d)·y with c = x·y.
            for cut in 0..=w1.len() {
                let (x, d) = w1.split_at(cut);
                if !w2.starts_with(&word_dual(d)) {
                    continue;
                }
                let y = &w2[d.len()..];
                let c = format!("{x}{y}");
                if c.len() <= l {
                    contains.push((word_id(&c), Multiplicity::Known(1)));
                } else {
                    truncated = true;
                }
            }
            b.entry(&word_id(w1), &word_id(w2), contains, truncated);
        }
    }
    b.generator("α");
    b.completeness(Completeness::Truncated(max_len));
    b.finish()
}

fn chebyshev_fusion(n: usize) -> Vec<Vec<Vec<i64>>> {
    let adj: Vec<Vec<i64>> = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| i64::from(i.abs_diff(j) == 1))
                .collect()
        })
        .collect();
    let eye: Vec<Vec<i64>> = (0..n)
        .map(|i| (0..n).map(|j| i64::from(i == j)).collect())
        .collect();
    let mut mats = vec![eye, adj.clone()];
    for j in 2..n {
        let prev = &mats[j - 1];
        let prev2 = &mats[j - 2];
        let mut m = vec![vec![0i64; n]; n];
        for (i, row) in m.iter_mut().enumerate() {
            for (k, cell) in row.iter_mut().enumerate() {
                let mut acc = -prev2[i][k];
                for (t, a_row) in adj.iter().enumerate() {
                    acc += prev[i][t] * a_row[k];
                }
                *cell = acc;
            }
        }
        debug_assert!(m.iter().flatten().all(|&v| v >= 0));
        mats.push(m);
    }
    mats.truncate(n);
    mats
}

/// The A_n path fixture: principal graph pair, fusion system, and the
/// generator's dimension data with δ = 2cos(π/(n+1)).
pub fn make_tl_path(n: usize) -> Result<(PrincipalGraphPair, FusionSystem, DimensionData<f64>)> {
    if n < 2 {
        return Err(Error::InvalidSystem("path length must be at least 2".into()));
    }
    let mats = chebyshev_fusion(n);
    let mut b = SystemBuilder::new();
    for i in 0..n {
        b.object(&format!("v{i}"), "A", "A", &format!("v{i}"), i == 0);
    }
    for i in 0..n {
        for j in 0..n {
            let contains = (0..n)
                .filter(|&k| mats[j][i][k] > 0)
                .map(|k| (format!("v{k}"), Multiplicity::Known(mats[j][i][k] as u32)))
                .collect();
            b.entry(&format!("v{i}"), &format!("v{j}"), contains, false);
        }
    }
    b.generator("v1");
    b.completeness(Completeness::Complete);
    let system = b.finish()?;

    let evens: Vec<String> = (0..n).step_by(2).map(|i| format!("v{i}")).collect();
    let odds: Vec<String> = (1..n).step_by(2).map(|i| format!("v{i}")).collect();
    let mut edges = Vec::new();
    for i in 0..n - 1 {
        let (e, o) = if i % 2 == 0 {
            (i / 2, i / 2)
        } else {
            ((i + 1) / 2, (i - 1) / 2)
        };
        edges.push((e, o, 1));
    }
    // Self-dual one-label system: the dual graph is the same path.
    let graph = PrincipalGraphPair {
        even_plus: evens.clone(),
        odd: odds,
        even_minus: evens,
        edges_plus: edges.clone(),
        edges_minus: edges,
        base: 0,
        base_minus: Some(0),
    };
    let delta = 2.0 * (PI / (n as f64 + 1.0)).cos();
    let dims = DimensionData::new(vec![Constituent {
        id: "v1".to_string(),
        dim_left: delta,
        dim_right: delta,
        mult: 1,
    }])?;
    Ok((graph, system, dims))
}

/// The shaded A_n system over two labels, with the same structure
/// constants refined by sector parity.
pub fn make_tl_bicategory(n: usize) -> Result<FusionSystem> {
    if n < 2 {
        return Err(Error::InvalidSystem("path length must be at least 2".into()));
    }
    let mats = chebyshev_fusion(n);
    // Sector of index i viewed from the A side: even i sits in (A,A) as
    // e{i} and in (B,B) as m{i}; odd i sits in (A,B) as f{i} with dual
    // fb{i} in (B,A).
    let name = |left: &str, right: &str, i: usize| -> String {
        match (left, right) {
            ("A", "A") => format!("e{i}"),
            ("B", "B") => format!("m{i}"),
            ("A", "B") => format!("f{i}"),
            _ => format!("fb{i}"),
        }
    };
    let mut b = SystemBuilder::new();
    for i in 0..n {
        if i % 2 == 0 {
            b.object(&format!("e{i}"), "A", "A", &format!("e{i}"), i == 0);
            b.object(&format!("m{i}"), "B", "B", &format!("m{i}"), i == 0);
        } else {
            b.object(&format!("f{i}"), "A", "B", &format!("fb{i}"), false);
            b.object(&format!("fb{i}"), "B", "A", &format!("f{i}"), false);
        }
    }
    let sectors: [(&str, &str); 4] = [("A", "A"), ("A", "B"), ("B", "A"), ("B", "B")];
    for (l1, r1) in sectors {
        for (l2, r2) in sectors {
            if r1 != l2 {
                continue;
            }
            for i in 0..n {
                if (i % 2 == 0) != (l1 == r1) {
                    continue;
                }
                for j in 0..n {
                    if (j % 2 == 0) != (l2 == r2) {
                        continue;
                    }
                    let contains = (0..n)
                        .filter(|&k| mats[j][i][k] > 0)
                        .map(|k| {
                            (name(l1, r2, k), Multiplicity::Known(mats[j][i][k] as u32))
                        })
                        .collect();
                    b.entry(&name(l1, r1, i), &name(l2, r2, j), contains, false);
                }
            }
        }
    }
    b.generator("f1");
    b.completeness(Completeness::Complete);
    b.finish()
}

fn check_subgroup(table: &GroupTable, h: &[usize], label: &str, e: usize) -> Result<BTreeSet<usize>> {
    let n = table.order();
    if h.is_empty() {
        return Err(Error::NotASubgroup(format!("{label} is empty")));
    }
    if h.iter().any(|&x| x >= n) {
        return Err(Error::NotASubgroup(format!("{label} has an element out of range")));
    }
    let set: BTreeSet<usize> = h.iter().copied().collect();
    if !set.contains(&e) {
        return Err(Error::NotASubgroup(format!("{label} misses the identity")));
    }
    for &x in &set {
        for &y in &set {
            if !set.contains(&table.mul[x][y]) {
                return Err(Error::NotASubgroup(format!(
                    "{label} is not closed: {}·{} escapes",
                    table.names[x], table.names[y]
                )));
            }
        }
    }
    Ok(set)
}

/// Double cosets of two subgroups as a three-label bicategory with
/// support-only multiplicities.
pub fn make_double_coset(table: &GroupTable, h: &[usize], k: &[usize]) -> Result<Bicategory3> {
    check_table_shape(table)?;
    let e = identity_of(table)?;
    inverses_of(table, e)?;
    check_associativity(table)?;
    let hset = check_subgroup(table, h, "H", e)?;
    let kset = check_subgroup(table, k, "K", e)?;
    let inv = inverses_of(table, e)?;
    let n = table.order();
    let labels = ["A", "B", "C"];
    let subs: [&BTreeSet<usize>; 3] = [&hset, &kset, &hset];

    // cosets[i][j]: the S(i)\G/S(j) partition, each class sorted, classes
    // ordered by least element.
    let mut cosets = vec![vec![Vec::<BTreeSet<usize>>::new(); 3]; 3];
    let mut class_of = vec![vec![vec![0usize; n]; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            let mut assigned = vec![false; n];
            for g in 0..n {
                if assigned[g] {
                    continue;
                }
                let mut class = BTreeSet::new();
                for &x in subs[i] {
                    for &y in subs[j] {
                        class.insert(table.mul[table.mul[x][g]][y]);
                    }
                }
                let idx = cosets[i][j].len();
                for &m in &class {
                    assigned[m] = true;
                    class_of[i][j][m] = idx;
                }
                cosets[i][j].push(class);
            }
        }
    }

    let id_of = |i: usize, j: usize, c: usize| -> String {
        let least = cosets[i][j][c].iter().next().unwrap();
        format!("{}{}:{}", labels[i], labels[j], table.names[*least])
    };

    let mut b = SystemBuilder::new();
    for i in 0..3 {
        for j in 0..3 {
            for c in 0..cosets[i][j].len() {
                let least = *cosets[i][j][c].iter().next().unwrap();
                let dual = class_of[j][i][inv[least]];
                b.object(
                    &id_of(i, j, c),
                    labels[i],
                    labels[j],
                    &id_of(j, i, dual),
                    i == j && cosets[i][j][c].contains(&e),
                );
            }
        }
    }
    for i in 0..3 {
        for j in 0..3 {
            for l in 0..3 {
                for (cx, xs) in cosets[i][j].iter().enumerate() {
                    for (cy, ys) in cosets[j][l].iter().enumerate() {
                        let mut support = BTreeSet::new();
                        for &x in xs {
                            for &y in ys {
                                support.insert(class_of[i][l][table.mul[x][y]]);
                            }
                        }
                        let contains = support
                            .into_iter()
                            .map(|c| (id_of(i, l, c), Multiplicity::Unknown))
                            .collect();
                        b.entry(&id_of(i, j, cx), &id_of(j, l, cy), contains, false);
                    }
                }
            }
        }
    }
    b.completeness(Completeness::Complete);
    let system = b.finish()?;
    Ok(Bicategory3 {
        system,
        gen_ab: id_of(0, 1, class_of[0][1][e]),
        gen_bc: id_of(1, 2, class_of[1][2][e]),
    })
}
