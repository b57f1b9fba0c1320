//! Connes fusion of bimodule systems: generated subsystems, composites
//! over a shared middle algebra, and cabled systems.

use std::collections::BTreeSet;

use crate::error::{Error, Result};
use crate::fusion::{
    expand_word, Completeness, FusionSystem, ObjectIdx, SystemBuilder,
};
use crate::weights::{is_tpc, TpcVerdict};

/// A fusion system over three algebra labels with chosen bridge generators.
#[derive(Debug, Clone)]
pub struct Bicategory3 {
    pub system: FusionSystem,
    /// Object id in the (A, B) sector.
    pub gen_ab: String,
    /// Object id in the (B, C) sector.
    pub gen_bc: String,
}

/// Checks the three-label shape and full pair coverage of a bicategory.
pub fn validate_bicategory3(b: &Bicategory3) -> Result<()> {
    let sys = &b.system;
    if sys.algebras().len() != 3 {
        return Err(Error::InvalidSystem(format!(
            "expected 3 algebra labels, found {}",
            sys.algebras().len()
        )));
    }
    let gab = sys.require(&b.gen_ab)?;
    let gbc = sys.require(&b.gen_bc)?;
    let (oab, obc) = (sys.object(gab), sys.object(gbc));
    if oab.unit || obc.unit {
        return Err(Error::InvalidSystem(
            "bridge generators must not be units".into(),
        ));
    }
    if oab.left == oab.right || obc.left == obc.right {
        return Err(Error::InvalidSystem(
            "bridge generators must lie in off-diagonal sectors".into(),
        ));
    }
    if oab.right != obc.left {
        return Err(Error::InvalidSystem(format!(
            "generator sectors do not meet: right({}) != left({})",
            b.gen_ab, b.gen_bc
        )));
    }
    let labels: BTreeSet<_> = [oab.left, oab.right, obc.right].into();
    if labels.len() != 3 {
        return Err(Error::InvalidSystem(
            "bridge generators must span three distinct labels".into(),
        ));
    }
    // Every sector-compatible pair needs a recorded entry; truncation is
    // declared per entry, never by omission.
    for (i, x) in sys.objects().iter().enumerate() {
        for (j, y) in sys.objects().iter().enumerate() {
            if x.right == y.left && sys.entry(i, j).is_none() {
                return Err(Error::InvalidSystem(format!(
                    "missing tensor entry ({}, {})",
                    x.id, y.id
                )));
            }
        }
    }
    Ok(())
}

/// Collects all constituents of words in the block and its dual, up to
/// `depth` block applications, starting from the outer units.
fn word_closure(
    sys: &FusionSystem,
    block: &[ObjectIdx],
    depth: u32,
    strict: bool,
) -> Result<BTreeSet<ObjectIdx>> {
    let dual_block: Vec<ObjectIdx> =
        block.iter().rev().map(|&i| sys.object(i).dual).collect();
    let la = sys.object(block[0]).left;
    let lc = sys.object(*block.last().unwrap()).right;
    let mut kept = BTreeSet::new();
    let mut frontier = Vec::new();
    for l in [la, lc] {
        if let Some(u) = sys.unit_of(l) {
            if kept.insert(u) {
                frontier.push(u);
            }
        }
    }
    if frontier.is_empty() {
        return Err(Error::InvalidSystem(
            "no unit object to seed the closure".into(),
        ));
    }
    for _ in 0..depth {
        let mut next = BTreeSet::new();
        for &v in &frontier {
            for letters in [&block, &dual_block.as_slice()] {
                if sys.object(v).right != sys.object(letters[0]).left {
                    continue;
                }
                let mut cur = BTreeSet::from([v]);
                for &l in *letters {
                    let mut out = BTreeSet::new();
                    for &x in &cur {
                        match sys.entry(x, l) {
                            Some(e) => {
                                if strict && e.truncated {
                                    return Err(Error::TruncationExhausted(format!(
                                        "truncated entry ({}, {}) inside the closure window",
                                        sys.object(x).id,
                                        sys.object(l).id
                                    )));
                                }
                                out.extend(e.constituents.iter().map(|&(c, _)| c));
                            }
                            None => {
                                if strict {
                                    return Err(Error::TruncationExhausted(format!(
                                        "no entry ({}, {}) inside the closure window",
                                        sys.object(x).id,
                                        sys.object(l).id
                                    )));
                                }
                            }
                        }
                    }
                    cur = out;
                }
                next.extend(cur);
            }
        }
        frontier = next.into_iter().filter(|&c| kept.insert(c)).collect();
        if frontier.is_empty() {
            break;
        }
    }
    let duals: Vec<ObjectIdx> = kept.iter().map(|&i| sys.object(i).dual).collect();
    kept.extend(duals);
    Ok(kept)
}

/// Restricts the tensor table to `kept`, certifying completeness when no
/// composable pair escapes the restriction.
fn induce(
    sys: &FusionSystem,
    kept: &BTreeSet<ObjectIdx>,
    depth: u32,
    generator: Option<ObjectIdx>,
) -> Result<FusionSystem> {
    let mut b = SystemBuilder::new();
    for &i in kept {
        let o = sys.object(i);
        b.object(
            &o.id,
            &sys.algebras()[o.left],
            &sys.algebras()[o.right],
            &sys.object(o.dual).id,
            o.unit,
        );
    }
    let mut gaps = false;
    for &x in kept {
        for &y in kept {
            if sys.object(x).right != sys.object(y).left {
                continue;
            }
            match sys.entry(x, y) {
                None => gaps = true,
                Some(e) => {
                    let mut truncated = e.truncated;
                    let mut contains = Vec::new();
                    for &(c, m) in &e.constituents {
                        if kept.contains(&c) {
                            contains.push((sys.object(c).id.clone(), m));
                        } else {
                            truncated = true;
                        }
                    }
                    gaps |= truncated;
                    b.entry(&sys.object(x).id, &sys.object(y).id, contains, truncated);
                }
            }
        }
    }
    if let Some(g) = generator {
        b.generator(&sys.object(g).id);
    }
    b.completeness(if gaps {
        Completeness::Truncated(depth)
    } else {
        Completeness::Complete
    });
    b.finish()
}

/// Returns the subsystem generated by one object: all constituents of
/// words in it and its dual, of length at most `depth`.
pub fn generated_subsystem(
    sys: &FusionSystem,
    gen: ObjectIdx,
    depth: u32,
) -> Result<FusionSystem> {
    let kept = word_closure(sys, &[gen], depth, false)?;
    let generator = if sys.object(gen).unit { None } else { Some(gen) };
    induce(sys, &kept, depth, generator)
}

/// Fuses the two bridge sectors of a three-label bicategory into a
/// two-label system over the outer algebras.
pub fn compose(b: &Bicategory3, depth: u32) -> Result<FusionSystem> {
    validate_bicategory3(b)?;
    let sys = &b.system;
    let gab = sys.require(&b.gen_ab)?;
    let gbc = sys.require(&b.gen_bc)?;
    let block = [gab, gbc];
    let kept = word_closure(sys, &block, depth, true)?;
    let generator = match expand_word(sys, &block) {
        Ok(exp) if exp.complete && exp.support.len() == 1 => {
            let g = *exp.support.iter().next().unwrap();
            if sys.object(g).unit { None } else { Some(g) }
        }
        _ => None,
    };
    induce(sys, &kept, depth, generator)
}

/// Outcome of checking trivial-perturbation-class closure under fusion.
#[derive(Debug, Clone)]
pub struct TheoremReport {
    pub factor_ab: TpcVerdict,
    pub factor_bc: TpcVerdict,
    pub composite: TpcVerdict,
    /// Both factor systems are in the trivial perturbation class.
    pub hypothesis: bool,
    /// The check passed only because the hypothesis failed.
    pub vacuous: bool,
    /// Some verdict rests on a truncated table.
    pub provisional: bool,
    pub pass: bool,
}

/// Checks that fusing two trivial-class factors yields a trivial-class
/// composite; a definitive counterexample is an error.
pub fn verify_tpc_closure(b: &Bicategory3, depth: u32) -> Result<TheoremReport> {
    let sys = &b.system;
    let gab = sys.require(&b.gen_ab)?;
    let gbc = sys.require(&b.gen_bc)?;
    let factor_ab = is_tpc(&generated_subsystem(sys, gab, depth)?)?;
    let factor_bc = is_tpc(&generated_subsystem(sys, gbc, depth)?)?;
    let composite = is_tpc(&compose(b, depth)?)?;
    let hypothesis = factor_ab.tpc && factor_bc.tpc;
    let provisional =
        factor_ab.provisional || factor_bc.provisional || composite.provisional;
    let pass = !hypothesis || composite.tpc;
    if !pass && !composite.provisional {
        return Err(Error::TheoremViolation(
            "both factors are trivial-class but the composite is not".into(),
        ));
    }
    Ok(TheoremReport {
        factor_ab,
        factor_bc,
        composite,
        hypothesis,
        vacuous: !hypothesis,
        provisional,
        pass,
    })
}

/// Replaces the generator by its k-fold composable power word and returns
/// the system that word generates.
pub fn cable(sys: &FusionSystem, k: u32, depth: u32) -> Result<FusionSystem> {
    if k == 0 {
        return Err(Error::DepthZero);
    }
    let g = sys.generator().ok_or(Error::MissingGenerator)?;
    let mut block = vec![g];
    for _ in 1..k {
        let prev = *block.last().unwrap();
        let next = if sys.object(prev).right == sys.object(g).left {
            g
        } else {
            sys.object(g).dual
        };
        block.push(next);
    }
    let kept = word_closure(sys, &block, depth, true)?;
    let generator = match expand_word(sys, &block) {
        Ok(exp) if exp.complete && exp.support.len() == 1 => {
            let c = *exp.support.iter().next().unwrap();
            if sys.object(c).unit { None } else { Some(c) }
        }
        _ => None,
    };
    induce(sys, &kept, depth, generator)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fusion::{validate, Multiplicity};

    fn known(ids: &[&str]) -> Vec<(String, Multiplicity)> {
        ids.iter().map(|s| (s.to_string(), Multiplicity::Known(1))).collect()
    }

    // Integers in a radius-1 window: a^-1, a^0, a^1 with a^1 generating.
    fn z_range1() -> FusionSystem {
        let mut b = SystemBuilder::new();
        b.object("a^-1", "A", "A", "a^1", false)
            .object("a^0", "A", "A", "a^0", true)
            .object("a^1", "A", "A", "a^-1", false)
            .generator("a^1")
            .completeness(Completeness::Truncated(1));
        let names = ["a^-1", "a^0", "a^1"];
        for (i, x) in names.iter().enumerate() {
            for (j, y) in names.iter().enumerate() {
                let n = (i as i64 - 1) + (j as i64 - 1);
                if n.abs() <= 1 {
                    b.entry(x, y, known(&[&format!("a^{n}")]), false);
                } else {
                    b.entry(x, y, vec![], true);
                }
            }
        }
        b.finish().unwrap()
    }

    // Cyclic group of order three, complete and self-generated.
    fn z3() -> FusionSystem {
        let names = ["e", "a", "b"]; // b = a^2 = a^-1
        let mut bld = SystemBuilder::new();
        bld.object("e", "A", "A", "e", true)
            .object("a", "A", "A", "b", false)
            .object("b", "A", "A", "a", false)
            .generator("a")
            .completeness(Completeness::Complete);
        for i in 0..3usize {
            for j in 0..3usize {
                bld.entry(names[i], names[j], known(&[names[(i + j) % 3]]), false);
            }
        }
        bld.finish().unwrap()
    }

    // Three labels bridged by invertible generators u: (A,B), v: (B,C).
    fn invertible_bridge() -> Bicategory3 {
        let objs: [(&str, &str, &str, &str, bool); 9] = [
            ("1a", "A", "A", "1a", true),
            ("1b", "B", "B", "1b", true),
            ("1c", "C", "C", "1c", true),
            ("u", "A", "B", "ub", false),
            ("ub", "B", "A", "u", false),
            ("v", "B", "C", "vb", false),
            ("vb", "C", "B", "v", false),
            ("w", "A", "C", "wb", false),
            ("wb", "C", "A", "w", false),
        ];
        let mut b = SystemBuilder::new();
        for (id, l, r, d, unit) in objs {
            b.object(id, l, r, d, unit);
        }
        // Each object is invertible, so every composable product is the
        // unique "concatenation" object.
        let table = [
            ("u", "ub", "1a"),
            ("ub", "u", "1b"),
            ("v", "vb", "1b"),
            ("vb", "v", "1c"),
            ("u", "v", "w"),
            ("vb", "ub", "wb"),
            ("w", "wb", "1a"),
            ("wb", "w", "1c"),
            ("w", "vb", "u"),
            ("v", "wb", "ub"),
            ("ub", "w", "v"),
            ("wb", "u", "vb"),
        ];
        for (x, y, z) in table {
            b.entry(x, y, known(&[z]), false);
        }
        for o in ["u", "ub", "v", "vb", "w", "wb", "1a", "1b", "1c"] {
            let (l, r) = match o {
                "1a" => ("A", "A"),
                "1b" => ("B", "B"),
                "1c" => ("C", "C"),
                "u" => ("A", "B"),
                "ub" => ("B", "A"),
                "v" => ("B", "C"),
                "vb" => ("C", "B"),
                "w" => ("A", "C"),
                _ => ("C", "A"),
            };
            let unit_of = |lbl: &str| match lbl {
                "A" => "1a",
                "B" => "1b",
                _ => "1c",
            };
            b.entry(unit_of(l), o, known(&[o]), false);
            if !matches!(o, "1a" | "1b" | "1c") {
                b.entry(o, unit_of(r), known(&[o]), false);
            }
        }
        b.completeness(Completeness::Complete);
        let system = b.finish().unwrap();
        assert!(validate(&system).is_valid(), "{:?}", validate(&system));
        Bicategory3 {
            system,
            gen_ab: "u".into(),
            gen_bc: "v".into(),
        }
    }

    #[test]
    fn generated_by_unit_is_unit_only() {
        let sys = z_range1();
        let unit = sys.require("a^0").unwrap();
        let sub = generated_subsystem(&sys, unit, 3).unwrap();
        assert_eq!(sub.objects().len(), 1);
        assert!(sub.objects()[0].unit);
        assert!(matches!(sub.completeness(), Completeness::Complete));
        assert!(sub.generator().is_none());
    }

    #[test]
    fn generated_covers_whole_truncation_window() {
        let sys = z_range1();
        let g = sys.require("a^1").unwrap();
        let sub = generated_subsystem(&sys, g, 4).unwrap();
        assert_eq!(sub.objects().len(), 3);
        assert!(matches!(sub.completeness(), Completeness::Truncated(4)));
        assert_eq!(sub.generator().map(|i| sub.object(i).id.as_str()), Some("a^1"));
        assert!(validate(&sub).is_valid());
    }

    #[test]
    fn generated_subsystem_is_idempotent() {
        let sys = z3();
        let g = sys.require("a").unwrap();
        let sub = generated_subsystem(&sys, g, 6).unwrap();
        assert!(matches!(sub.completeness(), Completeness::Complete));
        let again = generated_subsystem(&sub, sub.require("a").unwrap(), 6).unwrap();
        assert_eq!(sub, again);
    }

    #[test]
    fn compose_invertible_bridge_gives_two_label_system() {
        let b = invertible_bridge();
        let comp = compose(&b, 4).unwrap();
        assert_eq!(comp.algebras(), &["A".to_string(), "C".to_string()]);
        let ids: Vec<&str> = comp.objects().iter().map(|o| o.id.as_str()).collect();
        assert_eq!(ids, vec!["1a", "1c", "w", "wb"]);
        assert!(matches!(comp.completeness(), Completeness::Complete));
        assert_eq!(comp.generator().map(|i| comp.object(i).id.as_str()), Some("w"));
        assert!(validate(&comp).is_valid(), "{:?}", validate(&comp));
    }

    #[test]
    fn closure_theorem_passes_on_invertible_bridge() {
        let b = invertible_bridge();
        let rep = verify_tpc_closure(&b, 4).unwrap();
        assert!(rep.hypothesis);
        assert!(!rep.vacuous);
        assert!(!rep.provisional);
        assert!(rep.pass);
        assert!(rep.composite.tpc);
    }

    #[test]
    fn compose_errors_on_truncated_walk() {
        // Bridge whose (A,C) products are missing from the window.
        let b3 = invertible_bridge();
        let sys = &b3.system;
        let mut bld = SystemBuilder::new();
        for o in sys.objects() {
            bld.object(
                &o.id,
                &sys.algebras()[o.left],
                &sys.algebras()[o.right],
                &sys.object(o.dual).id,
                o.unit,
            );
        }
        for ((x, y), e) in sys.entries() {
            let xid = &sys.object(*x).id;
            let yid = &sys.object(*y).id;
            if xid == "u" && yid == "v" {
                bld.entry(xid, yid, vec![], true);
            } else {
                let cs = e
                    .constituents
                    .iter()
                    .map(|&(c, m)| (sys.object(c).id.clone(), m))
                    .collect();
                bld.entry(xid, yid, cs, e.truncated);
            }
        }
        bld.completeness(Completeness::Truncated(1));
        let system = bld.finish().unwrap();
        let b = Bicategory3 {
            system,
            gen_ab: "u".into(),
            gen_bc: "v".into(),
        };
        match compose(&b, 2) {
            Err(Error::TruncationExhausted(_)) => {}
            other => panic!("expected TruncationExhausted, got {other:?}"),
        }
    }

    #[test]
    fn validate_bicategory3_rejects_bad_shapes() {
        let good = invertible_bridge();
        assert!(validate_bicategory3(&good).is_ok());
        let swapped = Bicategory3 {
            system: good.system.clone(),
            gen_ab: "v".into(),
            gen_bc: "u".into(),
        };
        assert!(matches!(
            validate_bicategory3(&swapped),
            Err(Error::InvalidSystem(_))
        ));
        let unit_gen = Bicategory3 {
            system: good.system.clone(),
            gen_ab: "1a".into(),
            gen_bc: "v".into(),
        };
        assert!(matches!(
            validate_bicategory3(&unit_gen),
            Err(Error::InvalidSystem(_))
        ));
    }

    #[test]
    fn cable_k1_is_generated_subsystem() {
        let sys = z3();
        let g = sys.generator().unwrap();
        let cabled = cable(&sys, 1, 6).unwrap();
        let sub = generated_subsystem(&sys, g, 6).unwrap();
        assert_eq!(cabled, sub);
    }

    #[test]
    fn cable_z3_by_3_collapses_to_unit() {
        // a^3 = e, so the cubed generator generates the unit system.
        let sys = z3();
        let cabled = cable(&sys, 3, 6).unwrap();
        assert_eq!(cabled.objects().len(), 1);
        assert!(cabled.objects()[0].unit);
        assert!(cabled.generator().is_none());
    }

    #[test]
    fn cable_strictness_on_short_window() {
        // Radius-1 integers cannot host a squared generator walk.
        let sys = z_range1();
        match cable(&sys, 2, 2) {
            Err(Error::TruncationExhausted(_)) => {}
            other => panic!("expected TruncationExhausted, got {other:?}"),
        }
    }

    #[test]
    fn cable_rejects_k_zero() {
        let sys = z3();
        assert!(matches!(cable(&sys, 0, 4), Err(Error::DepthZero)));
    }
}
