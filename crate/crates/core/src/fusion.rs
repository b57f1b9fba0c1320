//! Fusion systems: finite sets of simple bimodule classes together with a
//! partially known tensor decomposition table.
//!
//! Objects are indexed internally; string ids are the stable public handle and
//! survive into subsystems, witnesses, and serialized documents.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use crate::error::{Error, Result};

/// Index of an algebra label within a [`FusionSystem`].
pub type AlgebraIdx = usize;
/// Index of an object within a [`FusionSystem`].
pub type ObjectIdx = usize;

/// Hard cap on the object count; exceeding it is a clean error, not a hang.
pub const MAX_OBJECTS: usize = 10_000;

/// Multiplicity of a constituent in a tensor decomposition.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Multiplicity {
    /// Exact count, at least one.
    Known(u32),
    /// Positive but unrecorded (support-only tables).
    Unknown,
}

/// One simple object: an isomorphism class of irreducible bimodules.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FusionObject {
    pub id: String,
    pub left: AlgebraIdx,
    pub right: AlgebraIdx,
    pub dual: ObjectIdx,
    pub unit: bool,
}

/// Recorded decomposition of `a ⊗ b`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TensorEntry {
    pub constituents: Vec<(ObjectIdx, Multiplicity)>,
    /// True when constituents outside the object set were dropped.
    pub truncated: bool,
}

/// Whether the object set is known to be tensor-closed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Completeness {
    Complete,
    Truncated(u32),
}

/// A finite window onto the simple objects of a bimodule bicategory.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FusionSystem {
    algebras: Vec<String>,
    objects: Vec<FusionObject>,
    by_id: BTreeMap<String, ObjectIdx>,
    tensor: BTreeMap<(ObjectIdx, ObjectIdx), TensorEntry>,
    generator: Option<ObjectIdx>,
    completeness: Completeness,
}

impl FusionSystem {
    pub fn algebras(&self) -> &[String] {
        &self.algebras
    }

    pub fn objects(&self) -> &[FusionObject] {
        &self.objects
    }

    pub fn object(&self, i: ObjectIdx) -> &FusionObject {
        &self.objects[i]
    }

    pub fn index_of(&self, id: &str) -> Option<ObjectIdx> {
        self.by_id.get(id).copied()
    }

    pub fn require(&self, id: &str) -> Result<ObjectIdx> {
        self.index_of(id)
            .ok_or_else(|| Error::UnknownObject(id.to_string()))
    }

    pub fn algebra_index(&self, label: &str) -> Option<AlgebraIdx> {
        self.algebras.iter().position(|a| a == label)
    }

    pub fn entry(&self, a: ObjectIdx, b: ObjectIdx) -> Option<&TensorEntry> {
        self.tensor.get(&(a, b))
    }

    pub fn entries(&self) -> impl Iterator<Item = (&(ObjectIdx, ObjectIdx), &TensorEntry)> {
        self.tensor.iter()
    }

    pub fn generator(&self) -> Option<ObjectIdx> {
        self.generator
    }

    pub fn completeness(&self) -> Completeness {
        self.completeness
    }

    /// Left label equals right label.
    pub fn is_even(&self, i: ObjectIdx) -> bool {
        self.objects[i].left == self.objects[i].right
    }

    pub fn unit_of(&self, alg: AlgebraIdx) -> Option<ObjectIdx> {
        self.objects
            .iter()
            .position(|o| o.unit && o.left == alg && o.right == alg)
    }

    pub fn units(&self) -> Vec<ObjectIdx> {
        (0..self.objects.len()).filter(|&i| self.objects[i].unit).collect()
    }
}

/// Incremental construction; ids are resolved once in [`SystemBuilder::finish`].
#[derive(Debug, Default)]
pub struct SystemBuilder {
    algebras: Vec<String>,
    objects: Vec<(String, String, String, String, bool)>,
    entries: Vec<(String, String, Vec<(String, Multiplicity)>, bool)>,
    generator: Option<String>,
    completeness: Option<Completeness>,
}

impl SystemBuilder {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn algebra(&mut self, label: &str) -> &mut Self {
        if !self.algebras.iter().any(|a| a == label) {
            self.algebras.push(label.to_string());
        }
        self
    }

    pub fn object(&mut self, id: &str, left: &str, right: &str, dual: &str, unit: bool) -> &mut Self {
        self.algebra(left).algebra(right);
        self.objects
            .push((id.to_string(), left.to_string(), right.to_string(), dual.to_string(), unit));
        self
    }

    pub fn entry(
        &mut self,
        a: &str,
        b: &str,
        contains: Vec<(String, Multiplicity)>,
        truncated: bool,
    ) -> &mut Self {
        self.entries.push((a.to_string(), b.to_string(), contains, truncated));
        self
    }

    pub fn generator(&mut self, id: &str) -> &mut Self {
        self.generator = Some(id.to_string());
        self
    }

    pub fn completeness(&mut self, c: Completeness) -> &mut Self {
        self.completeness = Some(c);
        self
    }

    /// Resolve ids to indices. Fails on duplicates, dangling ids, and the
    /// object-count guard; semantic soundness is [`validate`]'s job.
    pub fn finish(self) -> Result<FusionSystem> {
        if self.objects.len() > MAX_OBJECTS {
            return Err(Error::LimitExceeded(format!(
                "{} objects, limit {MAX_OBJECTS}",
                self.objects.len()
            )));
        }
        let mut by_id = BTreeMap::new();
        for (i, (id, ..)) in self.objects.iter().enumerate() {
            if by_id.insert(id.clone(), i).is_some() {
                return Err(Error::InvalidSystem(format!("duplicate object id `{id}`")));
            }
        }
        let mut seen_alg = BTreeSet::new();
        for a in &self.algebras {
            if !seen_alg.insert(a.clone()) {
                return Err(Error::InvalidSystem(format!("duplicate algebra label `{a}`")));
            }
        }
        let alg_index = |label: &str| -> Result<AlgebraIdx> {
            self.algebras
                .iter()
                .position(|a| a == label)
                .ok_or_else(|| Error::InvalidSystem(format!("unknown algebra label `{label}`")))
        };
        let obj_index = |id: &str| -> Result<ObjectIdx> {
            by_id
                .get(id)
                .copied()
                .ok_or_else(|| Error::UnknownObject(id.to_string()))
        };
        let mut objects = Vec::with_capacity(self.objects.len());
        for (id, left, right, dual, unit) in &self.objects {
            objects.push(FusionObject {
                id: id.clone(),
                left: alg_index(left)?,
                right: alg_index(right)?,
                dual: obj_index(dual)?,
                unit: *unit,
            });
        }
        let mut tensor = BTreeMap::new();
        for (a, b, contains, truncated) in &self.entries {
            let key = (obj_index(a)?, obj_index(b)?);
            let mut constituents = Vec::with_capacity(contains.len());
            for (c, m) in contains {
                constituents.push((obj_index(c)?, *m));
            }
            if tensor
                .insert(key, TensorEntry { constituents, truncated: *truncated })
                .is_some()
            {
                return Err(Error::InvalidSystem(format!("duplicate tensor entry ({a}, {b})")));
            }
        }
        let generator = match &self.generator {
            Some(id) => Some(obj_index(id)?),
            None => None,
        };
        Ok(FusionSystem {
            algebras: self.algebras,
            objects,
            by_id,
            tensor,
            generator,
            completeness: self.completeness.unwrap_or(Completeness::Complete),
        })
    }
}

/// One failed structural check.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Violation {
    pub code: &'static str,
    pub message: String,
}

/// Result of [`validate`]; empty means the system is well formed.
#[derive(Debug, Clone, Default)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }

    fn push(&mut self, code: &'static str, message: String) {
        self.violations.push(Violation { code, message });
    }
}

/// Check every structural invariant that can be decided from the data alone.
pub fn validate(sys: &FusionSystem) -> ValidationReport {
    let mut rep = ValidationReport::default();
    let objs = sys.objects();

    for (i, o) in objs.iter().enumerate() {
        let d = &objs[o.dual];
        if d.dual != i {
            rep.push("dual-involution", format!("dual of `{}` is `{}`, whose dual is `{}`", o.id, d.id, objs[d.dual].id));
        }
        if d.left != o.right || d.right != o.left {
            rep.push("dual-labels", format!("dual of `{}` must swap its algebra labels", o.id));
        }
        if o.unit {
            if o.left != o.right {
                rep.push("unit-shape", format!("unit `{}` must have equal left and right labels", o.id));
            }
            if o.dual != i {
                rep.push("unit-shape", format!("unit `{}` must be self-dual", o.id));
            }
        }
    }

    for (a, label) in sys.algebras().iter().enumerate() {
        let count = objs.iter().filter(|o| o.unit && o.left == a && o.right == a).count();
        if count != 1 {
            rep.push("unit-count", format!("algebra `{label}` has {count} units, expected exactly 1"));
        }
    }

    for (&(a, b), e) in sys.entries() {
        if objs[a].right != objs[b].left {
            rep.push("sector-mismatch", format!("entry (`{}`, `{}`) joins incompatible sectors", objs[a].id, objs[b].id));
            continue;
        }
        for &(c, m) in &e.constituents {
            if objs[c].left != objs[a].left || objs[c].right != objs[b].right {
                rep.push("constituent-sector", format!("`{}` in (`{}`, `{}`) lies in the wrong sector", objs[c].id, objs[a].id, objs[b].id));
            }
            if m == Multiplicity::Known(0) {
                rep.push("zero-multiplicity", format!("`{}` in (`{}`, `{}`) listed with multiplicity 0", objs[c].id, objs[a].id, objs[b].id));
            }
        }
        // Unit absorption: whenever recorded, the product with a unit is the
        // other factor with multiplicity one, never truncated.
        let absorbed = if objs[a].unit {
            Some(b)
        } else if objs[b].unit {
            Some(a)
        } else {
            None
        };
        if let Some(other) = absorbed {
            let exact = e.constituents.len() == 1
                && e.constituents[0].0 == other
                && matches!(e.constituents[0].1, Multiplicity::Known(1) | Multiplicity::Unknown)
                && !e.truncated;
            if !exact {
                rep.push("unit-absorption", format!("entry (`{}`, `{}`) must be exactly the non-unit factor", objs[a].id, objs[b].id));
            }
        }
        // Duality witness: a ⊗ dual(a) contains the left unit. The unit sits at
        // depth zero, so truncation never excuses its absence.
        if objs[a].dual == b {
            let unit = sys.unit_of(objs[a].left);
            let found = unit
                .map(|u| e.constituents.iter().any(|&(c, _)| c == u))
                .unwrap_or(false);
            if !found && !objs[a].unit {
                rep.push("duality-witness", format!("entry (`{}`, `{}`) does not contain the unit", objs[a].id, objs[b].id));
            }
        }
    }

    if let Completeness::Complete = sys.completeness() {
        for (&(a, b), e) in sys.entries() {
            if e.truncated {
                rep.push("completeness-flag", format!("system marked complete but entry (`{}`, `{}`) is truncated", objs[a].id, objs[b].id));
            }
        }
    }

    if let Some(g) = sys.generator() {
        if objs[g].unit {
            rep.push("generator-unit", format!("generator `{}` is a unit", objs[g].id));
        }
        let reachable = generator_reachable(sys, g);
        for (i, o) in objs.iter().enumerate() {
            if !reachable.contains(&i) {
                rep.push("unreachable-object", format!("`{}` is not reachable from the units via the generator", o.id));
            }
        }
    }

    associativity(sys, &mut rep);
    rep
}

/// Objects reachable from the units by right-tensoring with the generator and
/// its dual, following recorded constituents (including the known part of
/// truncated entries).
fn generator_reachable(sys: &FusionSystem, g: ObjectIdx) -> BTreeSet<ObjectIdx> {
    let letters = {
        let d = sys.object(g).dual;
        if d == g {
            vec![g]
        } else {
            vec![g, d]
        }
    };
    let mut seen: BTreeSet<ObjectIdx> = sys.units().into_iter().collect();
    for &l in &letters {
        seen.insert(l);
    }
    let mut queue: VecDeque<ObjectIdx> = seen.iter().copied().collect();
    while let Some(v) = queue.pop_front() {
        for &l in &letters {
            if sys.object(v).right != sys.object(l).left {
                continue;
            }
            if let Some(e) = sys.entry(v, l) {
                for &(c, _) in &e.constituents {
                    if seen.insert(c) {
                        queue.push_back(c);
                    }
                }
            }
        }
    }
    seen
}

/// Associativity of the structure constants, checked only on triples whose
/// required entries are all present, numeric, and not truncated.
fn associativity(sys: &FusionSystem, rep: &mut ValidationReport) {
    let objs = sys.objects();
    let numeric = |a: ObjectIdx, b: ObjectIdx| -> Option<Vec<(ObjectIdx, u64)>> {
        let e = sys.entry(a, b)?;
        if e.truncated {
            return None;
        }
        let mut out = Vec::with_capacity(e.constituents.len());
        for &(c, m) in &e.constituents {
            match m {
                Multiplicity::Known(m) => out.push((c, u64::from(m))),
                Multiplicity::Unknown => return None,
            }
        }
        Some(out)
    };
    for (&(a, b), _) in sys.entries() {
        let Some(ab) = numeric(a, b) else { continue };
        'triple: for c in 0..objs.len() {
            if objs[c].left != objs[b].right {
                continue;
            }
            let Some(bc) = numeric(b, c) else { continue };
            let mut lhs: BTreeMap<ObjectIdx, u64> = BTreeMap::new();
            for &(e, m1) in &ab {
                let Some(ec) = numeric(e, c) else { continue 'triple };
                for (d, m2) in ec {
                    *lhs.entry(d).or_insert(0) += m1 * m2;
                }
            }
            let mut rhs: BTreeMap<ObjectIdx, u64> = BTreeMap::new();
            for &(f, m1) in &bc {
                let Some(af) = numeric(a, f) else { continue 'triple };
                for (d, m2) in af {
                    *rhs.entry(d).or_insert(0) += m1 * m2;
                }
            }
            lhs.retain(|_, m| *m > 0);
            rhs.retain(|_, m| *m > 0);
            if lhs != rhs {
                rep.push(
                    "associativity",
                    format!(
                        "(`{}` ⊗ `{}`) ⊗ `{}` disagrees with `{}` ⊗ (`{}` ⊗ `{}`)",
                        objs[a].id, objs[b].id, objs[c].id, objs[a].id, objs[b].id, objs[c].id
                    ),
                );
            }
        }
    }
}

/// Three-valued answer for questions decided on possibly truncated data.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Ternary {
    Yes,
    No,
    Unknown,
}

/// Support of a word expansion plus whether it is exhaustive.
#[derive(Debug, Clone)]
pub struct Expansion {
    pub support: BTreeSet<ObjectIdx>,
    pub complete: bool,
}

/// Constituent support of `word[0] ⊗ word[1] ⊗ …`, folded left to right.
/// Missing and truncated entries make the result incomplete, never wrong.
pub fn expand_word(sys: &FusionSystem, word: &[ObjectIdx]) -> Result<Expansion> {
    if word.is_empty() {
        return Err(Error::IncomposableWord("empty word".into()));
    }
    for pair in word.windows(2) {
        let (x, y) = (pair[0], pair[1]);
        if sys.object(x).right != sys.object(y).left {
            return Err(Error::IncomposableWord(format!(
                "`{}` cannot be followed by `{}`",
                sys.object(x).id,
                sys.object(y).id
            )));
        }
    }
    let mut support: BTreeSet<ObjectIdx> = BTreeSet::new();
    support.insert(word[0]);
    let mut complete = true;
    for &letter in &word[1..] {
        let mut next = BTreeSet::new();
        for &v in &support {
            match sys.entry(v, letter) {
                None => complete = false,
                Some(e) => {
                    if e.truncated {
                        complete = false;
                    }
                    next.extend(e.constituents.iter().map(|&(c, _)| c));
                }
            }
        }
        support = next;
    }
    Ok(Expansion { support, complete })
}

/// Does the intertwiner space between two tensor words vanish? Decided by
/// intersecting constituent supports; `Unknown` on truncated data.
pub fn hom_nonzero(sys: &FusionSystem, word1: &[ObjectIdx], word2: &[ObjectIdx]) -> Result<Ternary> {
    if word1.is_empty() || word2.is_empty() {
        return Err(Error::IncomposableWord("empty word".into()));
    }
    let (l1, r1) = (sys.object(word1[0]).left, sys.object(*word1.last().unwrap()).right);
    let (l2, r2) = (sys.object(word2[0]).left, sys.object(*word2.last().unwrap()).right);
    if (l1, r1) != (l2, r2) {
        return Err(Error::IncomposableWord(
            "words have different outer algebra labels".into(),
        ));
    }
    let e1 = expand_word(sys, word1)?;
    let e2 = expand_word(sys, word2)?;
    if e1.support.intersection(&e2.support).next().is_some() {
        // A shared constituent is definitive even when the supports are partial.
        Ok(Ternary::Yes)
    } else if e1.complete && e2.complete {
        Ok(Ternary::No)
    } else {
        Ok(Ternary::Unknown)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    /// ℤ/2 fusion: 1, g with g ⊗ g = 1.
    fn z2() -> FusionSystem {
        let mut b = SystemBuilder::new();
        b.object("1", "A", "A", "1", true)
            .object("g", "A", "A", "g", false)
            .entry("1", "1", vec![("1".into(), Multiplicity::Known(1))], false)
            .entry("1", "g", vec![("g".into(), Multiplicity::Known(1))], false)
            .entry("g", "1", vec![("g".into(), Multiplicity::Known(1))], false)
            .entry("g", "g", vec![("1".into(), Multiplicity::Known(1))], false)
            .generator("g")
            .completeness(Completeness::Complete);
        b.finish().unwrap()
    }

    #[test]
    fn z2_validates_clean() {
        let rep = validate(&z2());
        assert!(rep.is_valid(), "{:?}", rep.violations);
    }

    #[test]
    fn broken_dual_is_reported() {
        let mut b = SystemBuilder::new();
        // g and h claim each other as duals but h's labels do not swap.
        b.object("1", "A", "A", "1", true)
            .object("g", "A", "B", "h", false)
            .object("h", "A", "B", "g", false)
            .object("1b", "B", "B", "1b", true);
        let sys = b.finish().unwrap();
        let rep = validate(&sys);
        assert!(rep.violations.iter().any(|v| v.code == "dual-labels"));
    }

    #[test]
    fn missing_duality_witness_is_reported() {
        let mut b = SystemBuilder::new();
        b.object("1", "A", "A", "1", true)
            .object("g", "A", "A", "g", false)
            .entry("g", "g", vec![("g".into(), Multiplicity::Known(1))], false);
        let sys = b.finish().unwrap();
        let rep = validate(&sys);
        assert!(rep.violations.iter().any(|v| v.code == "duality-witness"));
    }

    #[test]
    fn unit_absorption_must_be_exact() {
        let mut b = SystemBuilder::new();
        b.object("1", "A", "A", "1", true)
            .object("g", "A", "A", "g", false)
            .entry("1", "g", vec![("g".into(), Multiplicity::Known(2))], false);
        let sys = b.finish().unwrap();
        let rep = validate(&sys);
        assert!(rep.violations.iter().any(|v| v.code == "unit-absorption"));
    }

    #[test]
    fn associativity_violation_is_caught() {
        // g ⊗ g = 1 but (g ⊗ g) ⊗ g ≠ g ⊗ (g ⊗ g) because (1, g) is doctored.
        let mut b = SystemBuilder::new();
        b.object("1", "A", "A", "1", true)
            .object("g", "A", "A", "g", false)
            .object("h", "A", "A", "h", false)
            .entry("g", "g", vec![("1".into(), Multiplicity::Known(1))], false)
            .entry("1", "g", vec![("g".into(), Multiplicity::Known(1))], false)
            .entry("g", "1", vec![("h".into(), Multiplicity::Known(1))], false);
        let sys = b.finish().unwrap();
        let rep = validate(&sys);
        assert!(rep.violations.iter().any(|v| v.code == "associativity"), "{:?}", rep.violations);
    }

    #[test]
    fn dangling_dual_id_fails_resolution() {
        let mut b = SystemBuilder::new();
        b.object("1", "A", "A", "nope", true);
        match b.finish() {
            Err(Error::UnknownObject(id)) => assert_eq!(id, "nope"),
            other => panic!("expected UnknownObject, got {other:?}"),
        }
    }

    #[test]
    fn hom_nonzero_on_shared_constituent() {
        let sys = z2();
        let g = sys.index_of("g").unwrap();
        let one = sys.index_of("1").unwrap();
        // g ⊗ g and the unit word both contain 1.
        assert_eq!(hom_nonzero(&sys, &[g, g], &[one]).unwrap(), Ternary::Yes);
        assert_eq!(hom_nonzero(&sys, &[g, g], &[g]).unwrap(), Ternary::No);
    }

    #[test]
    fn expansion_becomes_incomplete_on_truncation() {
        let mut b = SystemBuilder::new();
        b.object("1", "A", "A", "1", true)
            .object("g", "A", "A", "g", false)
            .entry("g", "g", vec![("1".into(), Multiplicity::Known(1))], true)
            .completeness(Completeness::Truncated(1));
        let sys = b.finish().unwrap();
        let g = sys.index_of("g").unwrap();
        let e = expand_word(&sys, &[g, g]).unwrap();
        assert!(!e.complete);
        assert_eq!(e.support.len(), 1);
    }

    #[test]
    fn incomposable_words_error() {
        let mut b = SystemBuilder::new();
        b.object("1a", "A", "A", "1a", true)
            .object("1b", "B", "B", "1b", true)
            .object("u", "A", "B", "ud", false)
            .object("ud", "B", "A", "u", false);
        let sys = b.finish().unwrap();
        let u = sys.index_of("u").unwrap();
        assert!(matches!(
            expand_word(&sys, &[u, u]),
            Err(Error::IncomposableWord(_))
        ));
    }
}
