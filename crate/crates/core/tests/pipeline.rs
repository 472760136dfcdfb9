use orbit_designs::construct::{classify_orbit, construct_global_design, UnitarySource};
use orbit_designs::dalg::AlgebraTag;
use orbit_designs::design::{check_design, project_design};
use orbit_designs::fixtures::fixture_group;
use orbit_designs::group::OrthogonalAction;
use orbit_designs::repdec::decompose;
use orbit_designs::schur::{component_table, verify_schur_d, verify_schur_real};

/// Regular representation of A5: irreducibles of dimension 3, 3, 4, 5, each
/// with multiplicity equal to its dimension.
#[test]
fn icosahedral_regular_representation() {
    let g = fixture_group("icosahedral").unwrap().regular_representation();
    assert_eq!(g.dim(), 60);
    let dec = decompose(&g, 0).unwrap();
    assert_eq!(dec.trivial_multiplicity(), 1);
    let mut kinds: Vec<(AlgebraTag, usize, usize)> =
        dec.components().iter().map(|c| (c.fs_tag(), c.n(), c.m())).collect();
    kinds.sort();
    assert_eq!(
        kinds,
        vec![
            (AlgebraTag::Real, 3, 3),
            (AlgebraTag::Real, 3, 3),
            (AlgebraTag::Real, 4, 4),
            (AlgebraTag::Real, 5, 5)
        ]
    );
    for c in dec.components() {
        let t = component_table(c);
        assert!(verify_schur_real(&t, 1e-9).pass);
        assert!(verify_schur_d(&t, 1e-9).pass);
    }

    // the whole augmentation ideal, every component at full multiplicity
    let targets = dec.nontrivial_indices();
    let sel: Vec<_> = targets
        .iter()
        .map(|&i| (i, UnitarySource::Seed(i as u64 + 1)))
        .collect();
    let gd = construct_global_design(&dec, &sel).unwrap();
    assert_eq!(gd.target_basis.ncols(), 59);
    let cls = classify_orbit(&dec, &targets, &gd.vector, 1e-9).unwrap();
    assert!(cls.overall_pass);
    let rep = orbit_designs::design::check_design_in(&g, &gd.target_basis, &gd.vector, 1e-9).unwrap();
    assert!(rep.is_2_design);
    for &i in &targets {
        let b = dec.subspace_basis(&[i]).unwrap();
        let p = project_design(&g, &gd.vector, &b, 59, 1e-9).unwrap();
        assert!(p.norm_ok && p.sub_report.is_2_design);
    }
}

/// Dicyclic group of order 12 in its regular representation contains all
/// three types: two real characters, a complex pair, a real plane and the
/// quaternionic plane.
#[test]
fn dicyclic_regular_representation_has_every_type() {
    let g = fixture_group("dic3").unwrap().regular_representation();
    let dec = decompose(&g, 3).unwrap();
    let tags: Vec<AlgebraTag> = dec.components().iter().map(|c| c.fs_tag()).collect();
    for t in [AlgebraTag::Real, AlgebraTag::Complex, AlgebraTag::Quaternion] {
        assert!(tags.contains(&t), "{t} missing from {tags:?}");
    }
    let total: usize = dec.components().iter().map(|c| c.dim_real()).sum::<usize>() + dec.trivial_multiplicity();
    assert_eq!(total, 12);
    let targets = dec.nontrivial_indices();
    let feasible: Vec<usize> = targets
        .iter()
        .copied()
        .filter(|&i| dec.components()[i].m() <= dec.components()[i].n())
        .collect();
    let sel: Vec<_> = feasible.iter().map(|&i| (i, UnitarySource::Seed(i as u64))).collect();
    let gd = construct_global_design(&dec, &sel).unwrap();
    assert!(classify_orbit(&dec, &feasible, &gd.vector, 1e-9).unwrap().overall_pass);
    assert!(
        orbit_designs::design::check_design_in(&g, &gd.target_basis, &gd.vector, 1e-9)
            .unwrap()
            .is_2_design
    );
    // the ambient space has a fixed vector, so no vector is a 2-design there
    assert!(!check_design(&g, &gd.vector, 1e-9).unwrap().is_2_design);
}
