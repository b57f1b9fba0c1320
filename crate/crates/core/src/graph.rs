//! Principal graph pairs, Perron–Frobenius dimensions, and the two
//! translations between graphs and fusion systems.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use num_traits::Float;

use crate::error::{Error, Result};
use crate::fusion::{
    Completeness, FusionSystem, Multiplicity, ObjectIdx, SystemBuilder,
};

/// Which bipartite half of a graph pair to use.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Plus,
    Minus,
}

/// Bipartite multigraph pair recording tensoring by the generator.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PrincipalGraphPair {
    pub even_plus: Vec<String>,
    pub odd: Vec<String>,
    pub even_minus: Vec<String>,
    /// Edges (even_plus index, odd index, multiplicity).
    pub edges_plus: Vec<(usize, usize, u32)>,
    /// Edges (even_minus index, odd index, multiplicity).
    pub edges_minus: Vec<(usize, usize, u32)>,
    /// Unit vertex within `even_plus`.
    pub base: usize,
    /// Unit vertex within `even_minus`, when that half is populated.
    pub base_minus: Option<usize>,
}

/// Positive eigenvector data for one side of a graph pair.
#[derive(Debug, Clone)]
pub struct DimensionVector<F> {
    /// Vertex name with its dimension; even vertices first, then odd.
    pub values: Vec<(String, F)>,
    /// Graph norm δ; the planar-algebra index is δ².
    pub norm: F,
}

impl<F: Copy> DimensionVector<F> {
    pub fn value(&self, name: &str) -> Option<F> {
        self.values.iter().find(|(n, _)| n == name).map(|&(_, v)| v)
    }
}

/// Iteration cap for the power method.
pub const PF_ITERATION_CAP: usize = 1_000_000;

fn matvec<F: Float>(adj: &[Vec<(usize, F)>], v: &[F]) -> Vec<F> {
    let mut out = vec![F::zero(); v.len()];
    for (i, row) in adj.iter().enumerate() {
        for &(j, w) in row {
            out[i] = out[i] + w * v[j];
        }
    }
    out
}

fn dot<F: Float>(a: &[F], b: &[F]) -> F {
    a.iter().zip(b).fold(F::zero(), |acc, (x, y)| acc + *x * *y)
}

/// Perron–Frobenius dimension vector of one side, normalized to 1 at the base.
pub fn pf_dimensions<F: Float>(
    graphs: &PrincipalGraphPair,
    side: Side,
    tolerance: F,
) -> Result<DimensionVector<F>> {
    if !(tolerance > F::zero()) {
        return Err(Error::InvalidSystem("tolerance must be positive".into()));
    }
    let (evens, edges, base) = match side {
        Side::Plus => (&graphs.even_plus, &graphs.edges_plus, Some(graphs.base)),
        Side::Minus => (&graphs.even_minus, &graphs.edges_minus, graphs.base_minus),
    };
    let base = base
        .filter(|&b| b < evens.len())
        .ok_or_else(|| Error::NoConvergence("graph side has no base vertex".into()))?;
    let ne = evens.len();
    let n = ne + graphs.odd.len();
    let mut adj: Vec<Vec<(usize, F)>> = vec![Vec::new(); n];
    for &(e, o, m) in edges {
        if e >= ne || o >= graphs.odd.len() || m == 0 {
            return Err(Error::InvalidSystem(format!("bad edge ({e}, {o}, {m})")));
        }
        let w = F::from(m).expect("small multiplicity fits any float");
        adj[e].push((ne + o, w));
        adj[ne + o].push((e, w));
    }
    let mut seen = vec![false; n];
    seen[base] = true;
    let mut queue = VecDeque::from([base]);
    while let Some(i) = queue.pop_front() {
        for &(j, _) in &adj[i] {
            if !seen[j] {
                seen[j] = true;
                queue.push_back(j);
            }
        }
    }
    if seen.iter().any(|s| !*s) {
        return Err(Error::NoConvergence("graph is not connected through the base".into()));
    }

    // On bipartite graphs the spectrum is symmetric, so iterate A + I: the
    // shift makes 1 + δ strictly dominant and keeps the vector positive.
    let mut v = vec![F::one(); n];
    for _ in 0..PF_ITERATION_CAP {
        let av = matvec(&adj, &v);
        let mut w: Vec<F> = av.iter().zip(&v).map(|(a, x)| *a + *x).collect();
        let top = w.iter().cloned().fold(F::zero(), F::max);
        for x in &mut w {
            *x = *x / top;
        }
        let aw = matvec(&adj, &w);
        let delta = dot(&aw, &w) / dot(&w, &w);
        let scale = w[base];
        let resid = aw
            .iter()
            .zip(&w)
            .map(|(a, x)| (*a - delta * *x).abs())
            .fold(F::zero(), F::max)
            / scale;
        if resid <= tolerance {
            let name = |i: usize| {
                if i < ne { evens[i].clone() } else { graphs.odd[i - ne].clone() }
            };
            let values = (0..n).map(|i| (name(i), w[i] / scale)).collect();
            return Ok(DimensionVector { values, norm: delta });
        }
        v = w;
    }
    Err(Error::NoConvergence(format!(
        "residual still above tolerance after {PF_ITERATION_CAP} iterations"
    )))
}

/// Read a truncated one-label fusion system off the plus graph: vertices up to
/// `depth` become self-dual objects, edge counts become multiplicities.
pub fn generate_from_graph(graphs: &PrincipalGraphPair, depth: u32) -> Result<FusionSystem> {
    if depth == 0 {
        return Err(Error::DepthZero);
    }
    let ne = graphs.even_plus.len();
    let n = ne + graphs.odd.len();
    if graphs.base >= ne {
        return Err(Error::InvalidSystem("base vertex out of range".into()));
    }
    let mut adj: Vec<BTreeMap<usize, u32>> = vec![BTreeMap::new(); n];
    for &(e, o, m) in &graphs.edges_plus {
        if e >= ne || o >= graphs.odd.len() || m == 0 {
            return Err(Error::InvalidSystem(format!("bad edge ({e}, {o}, {m})")));
        }
        *adj[e].entry(ne + o).or_insert(0) += m;
        *adj[ne + o].entry(e).or_insert(0) += m;
    }
    let name = |i: usize| -> &str {
        if i < ne { &graphs.even_plus[i] } else { &graphs.odd[i - ne] }
    };

    let mut dist = vec![u32::MAX; n];
    dist[graphs.base] = 0;
    let mut queue = VecDeque::from([graphs.base]);
    while let Some(i) = queue.pop_front() {
        for &j in adj[i].keys() {
            if dist[j] == u32::MAX {
                dist[j] = dist[i] + 1;
                queue.push_back(j);
            }
        }
    }
    let kept: Vec<usize> = (0..n).filter(|&i| dist[i] <= depth).collect();

    let base_neighbors: Vec<usize> = adj[graphs.base].keys().copied().collect();
    if base_neighbors.len() != 1 {
        return Err(Error::InvalidSystem(format!(
            "base has {} neighbors, need exactly 1 to name the generator",
            base_neighbors.len()
        )));
    }
    let gen = base_neighbors[0];

    let mut b = SystemBuilder::new();
    for &i in &kept {
        b.object(name(i), "A", "A", name(i), i == graphs.base);
    }
    let mut have: BTreeSet<(String, String)> = BTreeSet::new();
    for &i in &kept {
        let mut contains = Vec::new();
        let mut truncated = false;
        for (&j, &m) in &adj[i] {
            if dist[j] <= depth {
                contains.push((name(j).to_string(), Multiplicity::Known(m)));
            } else {
                truncated = true;
            }
        }
        b.entry(name(i), name(gen), contains, truncated);
        have.insert((name(i).to_string(), name(gen).to_string()));
    }
    // Unit absorption entries, except where adjacency already recorded the key.
    let unit = name(graphs.base).to_string();
    for &i in &kept {
        let v = name(i).to_string();
        for (a, c) in [(unit.clone(), v.clone()), (v.clone(), unit.clone())] {
            if have.insert((a.clone(), c.clone())) {
                b.entry(&a, &c, vec![(v.clone(), Multiplicity::Known(1))], false);
            }
        }
    }
    b.generator(name(gen))
        .completeness(Completeness::Truncated(depth));
    b.finish()
}

/// Derive the principal graph pair of a system with a generator.
pub fn graph_from_system(sys: &FusionSystem) -> Result<PrincipalGraphPair> {
    let g = sys.generator().ok_or(Error::MissingGenerator)?;
    match sys.algebras().len() {
        1 => one_label_graph(sys, g),
        2 => two_label_graph(sys, g),
        _ => Err(Error::InvalidSystem(
            "principal graphs need one or two algebra labels".into(),
        )),
    }
}

fn known_mult(sys: &FusionSystem, a: ObjectIdx, b: ObjectIdx, c: ObjectIdx, m: Multiplicity) -> Result<u32> {
    match m {
        Multiplicity::Known(m) => Ok(m),
        Multiplicity::Unknown => Err(Error::InvalidSystem(format!(
            "multiplicity of `{}` in (`{}`, `{}`) is unknown, cannot build a multigraph",
            sys.object(c).id,
            sys.object(a).id,
            sys.object(b).id
        ))),
    }
}

/// Parity BFS by the generator letters; fails on odd cycles.
fn one_label_graph(sys: &FusionSystem, g: ObjectIdx) -> Result<PrincipalGraphPair> {
    let letters: Vec<ObjectIdx> = if sys.object(g).dual == g {
        vec![g]
    } else {
        vec![g, sys.object(g).dual]
    };
    let unit = sys
        .unit_of(0)
        .ok_or_else(|| Error::InvalidSystem("system has no unit".into()))?;
    let n = sys.objects().len();
    let mut parity: Vec<Option<u8>> = vec![None; n];
    parity[unit] = Some(0);
    let mut queue = VecDeque::from([unit]);
    while let Some(v) = queue.pop_front() {
        let next = 1 - parity[v].unwrap();
        for &l in &letters {
            if let Some(e) = sys.entry(v, l) {
                for &(c, _) in &e.constituents {
                    match parity[c] {
                        None => {
                            parity[c] = Some(next);
                            queue.push_back(c);
                        }
                        Some(p) if p != next => {
                            return Err(Error::InvalidSystem(format!(
                                "fusion graph is not bipartite at `{}`",
                                sys.object(c).id
                            )));
                        }
                        Some(_) => {}
                    }
                }
            }
        }
    }
    let evens: Vec<ObjectIdx> = (0..n).filter(|&i| parity[i] == Some(0)).collect();
    let odds: Vec<ObjectIdx> = (0..n).filter(|&i| parity[i] == Some(1)).collect();
    let odd_pos: BTreeMap<ObjectIdx, usize> =
        odds.iter().enumerate().map(|(k, &i)| (i, k)).collect();
    let mut edges = Vec::new();
    for (k, &v) in evens.iter().enumerate() {
        let mut mults: BTreeMap<usize, u32> = BTreeMap::new();
        for &l in &letters {
            if let Some(e) = sys.entry(v, l) {
                for &(c, m) in &e.constituents {
                    *mults.entry(odd_pos[&c]).or_insert(0) += known_mult(sys, v, l, c, m)?;
                }
            }
        }
        for (o, m) in mults {
            edges.push((k, o, m));
        }
    }
    let base = evens.iter().position(|&i| i == unit).expect("unit has parity 0");
    Ok(PrincipalGraphPair {
        even_plus: evens.iter().map(|&i| sys.object(i).id.clone()).collect(),
        odd: odds.iter().map(|&i| sys.object(i).id.clone()).collect(),
        even_minus: Vec::new(),
        edges_plus: edges,
        edges_minus: Vec::new(),
        base,
        base_minus: None,
    })
}

fn two_label_graph(sys: &FusionSystem, g: ObjectIdx) -> Result<PrincipalGraphPair> {
    let la = sys.object(g).left;
    let lb = sys.object(g).right;
    if la == lb {
        return Err(Error::InvalidSystem(
            "generator must join the two algebra labels".into(),
        ));
    }
    let gd = sys.object(g).dual;
    let n = sys.objects().len();
    let sector = |i: ObjectIdx| (sys.object(i).left, sys.object(i).right);
    let evens_a: Vec<ObjectIdx> = (0..n).filter(|&i| sector(i) == (la, la)).collect();
    let odds: Vec<ObjectIdx> = (0..n).filter(|&i| sector(i) == (la, lb)).collect();
    let evens_b: Vec<ObjectIdx> = (0..n).filter(|&i| sector(i) == (lb, lb)).collect();
    let odd_pos: BTreeMap<ObjectIdx, usize> =
        odds.iter().enumerate().map(|(k, &i)| (i, k)).collect();

    let mut edges_plus = Vec::new();
    for (k, &v) in evens_a.iter().enumerate() {
        if let Some(e) = sys.entry(v, g) {
            for &(c, m) in &e.constituents {
                edges_plus.push((k, odd_pos[&c], known_mult(sys, v, g, c, m)?));
            }
        }
    }
    // Minus-side constituents live in the (B, A) sector; fold through duals so
    // the shared odd vertex set can be reused.
    let mut edges_minus = Vec::new();
    for (k, &w) in evens_b.iter().enumerate() {
        if let Some(e) = sys.entry(w, gd) {
            for &(c, m) in &e.constituents {
                let u = sys.object(c).dual;
                edges_minus.push((k, odd_pos[&u], known_mult(sys, w, gd, c, m)?));
            }
        }
    }
    let unit_a = sys
        .unit_of(la)
        .ok_or_else(|| Error::InvalidSystem("missing unit for the left label".into()))?;
    let unit_b = sys
        .unit_of(lb)
        .ok_or_else(|| Error::InvalidSystem("missing unit for the right label".into()))?;
    Ok(PrincipalGraphPair {
        even_plus: evens_a.iter().map(|&i| sys.object(i).id.clone()).collect(),
        odd: odds.iter().map(|&i| sys.object(i).id.clone()).collect(),
        even_minus: evens_b.iter().map(|&i| sys.object(i).id.clone()).collect(),
        edges_plus,
        edges_minus,
        base: evens_a.iter().position(|&i| i == unit_a).expect("unit is even"),
        base_minus: Some(evens_b.iter().position(|&i| i == unit_b).expect("unit is even")),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fusion::validate;
    use approx::assert_abs_diff_eq;

    /// A_n path: vertices v0..v{n-1}, unit edges between neighbors.
    pub(crate) fn path_graph(n: usize) -> PrincipalGraphPair {
        assert!(n >= 1);
        let evens: Vec<String> = (0..n).step_by(2).map(|i| format!("v{i}")).collect();
        let odds: Vec<String> = (1..n).step_by(2).map(|i| format!("v{i}")).collect();
        let mut edges = Vec::new();
        for i in 0..n - 1 {
            // vertices i and i+1; the even one is i or i+1 depending on parity
            let (e, o) = if i % 2 == 0 { (i / 2, i / 2) } else { ((i + 1) / 2, (i - 1) / 2) };
            edges.push((e, o, 1));
        }
        PrincipalGraphPair {
            even_plus: evens,
            odd: odds,
            even_minus: Vec::new(),
            edges_plus: edges,
            edges_minus: Vec::new(),
            base: 0,
            base_minus: None,
        }
    }

    #[test]
    fn a2_norm_is_one() {
        let d = pf_dimensions::<f64>(&path_graph(2), Side::Plus, 1e-12).unwrap();
        assert_abs_diff_eq!(d.norm, 1.0, epsilon = 1e-10);
        assert_abs_diff_eq!(d.value("v0").unwrap(), 1.0, epsilon = 1e-10);
        assert_abs_diff_eq!(d.value("v1").unwrap(), 1.0, epsilon = 1e-10);
    }

    #[test]
    fn path_norms_match_the_closed_form() {
        for n in 2..=8usize {
            let d = pf_dimensions::<f64>(&path_graph(n), Side::Plus, 1e-12).unwrap();
            let expect = 2.0 * (std::f64::consts::PI / (n as f64 + 1.0)).cos();
            assert_abs_diff_eq!(d.norm, expect, epsilon = 1e-10);
        }
    }

    #[test]
    fn a3_dimension_vector() {
        let d = pf_dimensions::<f64>(&path_graph(3), Side::Plus, 1e-12).unwrap();
        assert_abs_diff_eq!(d.norm, 2f64.sqrt(), epsilon = 1e-10);
        assert_abs_diff_eq!(d.value("v1").unwrap(), 2f64.sqrt(), epsilon = 1e-10);
        assert_abs_diff_eq!(d.value("v2").unwrap(), 1.0, epsilon = 1e-10);
    }

    #[test]
    fn eigen_residual_within_ten_tolerances() {
        for n in 2..=8usize {
            let g = path_graph(n);
            let tol = 1e-12;
            let d = pf_dimensions::<f64>(&g, Side::Plus, tol).unwrap();
            let dim = |name: &str| d.value(name).unwrap();
            for i in 0..n {
                let mut acc = 0.0;
                if i > 0 {
                    acc += dim(&format!("v{}", i - 1));
                }
                if i + 1 < n {
                    acc += dim(&format!("v{}", i + 1));
                }
                let lhs = acc;
                let rhs = d.norm * dim(&format!("v{i}"));
                assert!((lhs - rhs).abs() <= 10.0 * tol, "n={n} i={i}: {lhs} vs {rhs}");
                assert!(dim(&format!("v{i}")) > 0.0);
            }
        }
    }

    #[test]
    fn disconnected_graph_fails() {
        let g = PrincipalGraphPair {
            even_plus: vec!["v0".into(), "v2".into()],
            odd: vec!["v1".into()],
            even_minus: Vec::new(),
            edges_plus: vec![(0, 0, 1)],
            edges_minus: Vec::new(),
            base: 0,
            base_minus: None,
        };
        assert!(matches!(
            pf_dimensions::<f64>(&g, Side::Plus, 1e-12),
            Err(Error::NoConvergence(_))
        ));
    }

    #[test]
    fn generate_a3_at_depth_two() {
        let sys = generate_from_graph(&path_graph(3), 2).unwrap();
        assert_eq!(sys.objects().len(), 3);
        let rep = validate(&sys);
        assert!(rep.is_valid(), "{:?}", rep.violations);
        let v0 = sys.index_of("v0").unwrap();
        let v1 = sys.index_of("v1").unwrap();
        let v2 = sys.index_of("v2").unwrap();
        assert_eq!(sys.generator(), Some(v1));
        let e = sys.entry(v1, v1).unwrap();
        assert!(e.constituents.contains(&(v0, Multiplicity::Known(1))));
        assert!(e.constituents.contains(&(v2, Multiplicity::Known(1))));
        assert!(!e.truncated);
    }

    #[test]
    fn generation_truncates_at_the_boundary() {
        let sys = generate_from_graph(&path_graph(4), 2).unwrap();
        assert_eq!(sys.objects().len(), 3);
        let v2 = sys.index_of("v2").unwrap();
        let v1 = sys.index_of("v1").unwrap();
        assert!(sys.entry(v2, v1).unwrap().truncated);
        assert_eq!(sys.completeness(), Completeness::Truncated(2));
    }

    #[test]
    fn double_edge_multiplicity_is_recorded() {
        let g = PrincipalGraphPair {
            even_plus: vec!["v0".into()],
            odd: vec!["v1".into()],
            even_minus: Vec::new(),
            edges_plus: vec![(0, 0, 2)],
            edges_minus: Vec::new(),
            base: 0,
            base_minus: None,
        };
        let sys = generate_from_graph(&g, 1).unwrap();
        let v0 = sys.index_of("v0").unwrap();
        let v1 = sys.index_of("v1").unwrap();
        assert_eq!(
            sys.entry(v0, v1).unwrap().constituents,
            vec![(v1, Multiplicity::Known(2))]
        );
        // A double edge at the base cannot come from a fusion system, and
        // validation says so.
        assert!(validate(&sys).violations.iter().any(|v| v.code == "unit-absorption"));
    }

    #[test]
    fn graph_round_trip_is_identity() {
        for n in 2..=6usize {
            let g = path_graph(n);
            let sys = generate_from_graph(&g, (n - 1) as u32).unwrap();
            let back = graph_from_system(&sys).unwrap();
            assert_eq!(back.even_plus, g.even_plus);
            assert_eq!(back.odd, g.odd);
            let norm = |mut e: Vec<(usize, usize, u32)>| {
                e.sort();
                e
            };
            assert_eq!(norm(back.edges_plus), norm(g.edges_plus));
            assert_eq!(back.base, g.base);
        }
    }

    #[test]
    fn odd_cycle_is_rejected() {
        // ℤ/3 fusion: the generator walk closes an odd cycle.
        let mut b = SystemBuilder::new();
        b.object("e", "A", "A", "e", true)
            .object("a", "A", "A", "a2", false)
            .object("a2", "A", "A", "a", false);
        for (x, y, z) in [
            ("e", "e", "e"),
            ("e", "a", "a"),
            ("e", "a2", "a2"),
            ("a", "e", "a"),
            ("a2", "e", "a2"),
            ("a", "a", "a2"),
            ("a", "a2", "e"),
            ("a2", "a", "e"),
            ("a2", "a2", "a"),
        ] {
            b.entry(x, y, vec![(z.to_string(), Multiplicity::Known(1))], false);
        }
        b.generator("a");
        let sys = b.finish().unwrap();
        assert!(matches!(graph_from_system(&sys), Err(Error::InvalidSystem(_))));
    }

    #[test]
    fn two_label_graph_has_both_sides() {
        let mut b = SystemBuilder::new();
        b.object("1a", "A", "A", "1a", true)
            .object("1b", "B", "B", "1b", true)
            .object("u", "A", "B", "ud", false)
            .object("ud", "B", "A", "u", false)
            .entry("1a", "u", vec![("u".into(), Multiplicity::Known(1))], false)
            .entry("1b", "ud", vec![("ud".into(), Multiplicity::Known(1))], false)
            .entry("u", "ud", vec![("1a".into(), Multiplicity::Known(1))], false)
            .entry("ud", "u", vec![("1b".into(), Multiplicity::Known(1))], false)
            .generator("u");
        let sys = b.finish().unwrap();
        let g = graph_from_system(&sys).unwrap();
        assert_eq!(g.even_plus, vec!["1a".to_string()]);
        assert_eq!(g.even_minus, vec!["1b".to_string()]);
        assert_eq!(g.odd, vec!["u".to_string()]);
        assert_eq!(g.edges_plus, vec![(0, 0, 1)]);
        assert_eq!(g.edges_minus, vec![(0, 0, 1)]);
        let dm = pf_dimensions::<f64>(&g, Side::Minus, 1e-12).unwrap();
        assert_abs_diff_eq!(dm.norm, 1.0, epsilon = 1e-10);
    }
}
