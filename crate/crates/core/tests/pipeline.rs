//! Cross-module flows through the public API only: build, validate, solve,
//! decide, perturb, fuse, cable.

use bmpa_core::examples::{
    cyclic_subgroup, make_double_coset, make_free_monoid_fusion, make_group_fusion,
    make_integer_fusion, make_tl_path, GroupTable,
};
use bmpa_core::perturb::{is_spherical, perturb_dims, Constituent, DimensionData};
use bmpa_core::weights::SectorScope;
use bmpa_core::{
    cable, compose, generated_subsystem, graph_from_system, is_tpc, modulus_of, pf_dimensions,
    solve_weight_space, spherical_report, validate, verify_tpc_closure, Completeness, Multiplicity,
    Side, SystemBuilder, WeightFunction, DEFAULT_TOLERANCE, PF_TOLERANCE,
};

/// A hand-built two-object system exercises the builder and the validator.
#[test]
fn builder_to_validator_to_solver() {
    let mut b = SystemBuilder::new();
    b.object("1", "M", "M", "1", true)
        .object("g", "M", "M", "g", false)
        .entry("1", "1", vec![("1".into(), Multiplicity::Known(1))], false)
        .entry("1", "g", vec![("g".into(), Multiplicity::Known(1))], false)
        .entry("g", "1", vec![("g".into(), Multiplicity::Known(1))], false)
        .entry("g", "g", vec![("1".into(), Multiplicity::Known(1))], false)
        .generator("g")
        .completeness(Completeness::Complete);
    let sys = b.finish().expect("well-formed system");

    let report = validate(&sys);
    assert!(report.is_valid(), "{:?}", report.violations);

    let basis = solve_weight_space(&sys, &SectorScope::Full).unwrap();
    assert_eq!(basis.dimension, 0);
    assert!(is_tpc(&sys).unwrap().tpc);
}

/// Example generators feed every downstream consumer without adjustment.
#[test]
fn examples_feed_the_whole_pipeline() {
    let (graph, sys, dims) = make_tl_path(4).unwrap();
    assert!(validate(&sys).is_valid());

    let pf = pf_dimensions(&graph, Side::Plus, PF_TOLERANCE).unwrap();
    let golden = (1.0 + 5.0f64.sqrt()) / 2.0;
    assert!((pf.norm - golden).abs() < 1e-9);

    let derived = graph_from_system(&sys).unwrap();
    let pf2 = pf_dimensions(&derived, Side::Plus, PF_TOLERANCE).unwrap();
    assert!((pf2.norm - pf.norm).abs() < 1e-9);

    let rep = spherical_report(&dims, Some(&sys), DEFAULT_TOLERANCE).unwrap();
    assert!(rep.spherical);
    assert!((rep.index - rep.min_index).abs() < 1e-9);
}

/// Non-trivial weight spaces perturb dimension data away from sphericality.
#[test]
fn witness_weights_break_sphericality() {
    let sys = make_integer_fusion(3).unwrap();
    let verdict = is_tpc(&sys).unwrap();
    assert!(!verdict.tpc && verdict.provisional);

    let basis = solve_weight_space(&sys, &SectorScope::Full).unwrap();
    let w = WeightFunction::from_basis_vector(&sys, &basis, 0, 2.0).unwrap();
    let dims = DimensionData::<f64>::new(
        w.values
            .keys()
            .map(|id| Constituent { id: id.clone(), dim_left: 1.0, dim_right: 1.0, mult: 1 })
            .collect(),
    )
    .unwrap();
    let perturbed = perturb_dims(&dims, &w).unwrap();
    assert!(!is_spherical(&perturbed, DEFAULT_TOLERANCE));
    // The witness is dual-antisymmetric, so the modulus itself stays balanced.
    let m = modulus_of(&perturbed);
    assert!((m.minus - m.plus).abs() < 1e-9);
}

/// Double cosets validate, fuse, and satisfy the closure theorem end to end.
#[test]
fn double_coset_fusion_closure() {
    let s3 = GroupTable::symmetric3();
    let h = cyclic_subgroup(&s3, 1).unwrap();
    let k = cyclic_subgroup(&s3, 4).unwrap();
    let b3 = make_double_coset(&s3, &h, &k).unwrap();
    assert!(validate(&b3.system).is_valid());

    let rep = verify_tpc_closure(&b3, 6).unwrap();
    assert!(rep.pass && rep.hypothesis && !rep.vacuous);

    let composite = compose(&b3, 6).unwrap();
    assert!(validate(&composite).is_valid());
    assert_eq!(composite.algebras().len(), 2);
    assert!(is_tpc(&composite).unwrap().tpc);
}

/// Cabling a truncated window errors strictly; a generated subsystem does not.
#[test]
fn truncation_strictness_split() {
    let sys = make_integer_fusion(3).unwrap();
    assert!(cable(&sys, 2, 6).is_err());

    let g = sys.require("a^1").unwrap();
    let sub = generated_subsystem(&sys, g, 6).unwrap();
    assert!(matches!(sub.completeness(), Completeness::Truncated(_)));
    assert!(!is_tpc(&sub).unwrap().tpc);
}

/// The free monoid window stays non-TPC while the group quotient is TPC.
#[test]
fn free_monoid_vs_group_quotient() {
    let free = make_free_monoid_fusion(3).unwrap();
    let free_verdict = is_tpc(&free).unwrap();
    assert!(!free_verdict.tpc && free_verdict.provisional);
    assert!(free_verdict.witness.is_some());

    let z2 = make_group_fusion(&GroupTable::cyclic(2)).unwrap();
    let group_verdict = is_tpc(&z2).unwrap();
    assert!(group_verdict.tpc && !group_verdict.provisional);
    assert!(group_verdict.witness.is_none());
}
