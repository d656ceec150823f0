use std::sync::Arc;

use hurstab_core::braid::{orbits, TupleSpace, DEFAULT_TUPLE_LIMIT};
use hurstab_core::group::{ClassSet, FiniteGroup};
use hurstab_core::homology::{homology, Coefficient, HomologyEngine, HomologyGroup};
use hurstab_core::resolution::{fox_complex, salvetti_truncated, specialize, Coefficients};
use hurstab_core::Integer;

fn classes(g: FiniteGroup) -> Vec<ClassSet> {
    Arc::new(g).conjugacy_classes()
}

fn test_matrix() -> Vec<ClassSet> {
    let mut out = Vec::new();
    out.extend(classes(FiniteGroup::symmetric(3).unwrap()));
    out.extend(classes(FiniteGroup::dihedral(4).unwrap()));
    out.extend(classes(FiniteGroup::cyclic(6).unwrap()));
    out
}

#[test]
fn braid_group_integral_homology() {
    let expect = |k: usize, i: usize| -> HomologyGroup {
        match (k, i) {
            (_, 0) => HomologyGroup::free(1),
            (k, 1) if k >= 2 => HomologyGroup::free(1),
            (k, 2) if k >= 4 => HomologyGroup {
                free_rank: 0,
                torsion: vec![Integer::from(2)],
            },
            _ => HomologyGroup::zero(),
        }
    };
    for k in 1..=7 {
        let c = specialize(&salvetti_truncated(k, 3), Coefficients::Trivial(1)).unwrap();
        for i in 0..=2.min(c.trusted_top()) {
            assert_eq!(homology(&c, i, Coefficient::Z).unwrap(), expect(k, i), "H_{i}(B_{k})");
        }
    }
    // complete complexes: Euler characteristic 0 and rational ranks 1, 1, 0, …
    for k in 2..=6 {
        let c = specialize(&salvetti_truncated(k, k), Coefficients::Trivial(1)).unwrap();
        let e = HomologyEngine::new(&c, Coefficient::Q);
        let ranks: Vec<usize> = (0..k).map(|i| e.group(i).unwrap().free_rank).collect();
        let mut expected = vec![1, 1];
        expected.resize(k, 0);
        assert_eq!(ranks, expected);
        let chi: i64 = c
            .dims()
            .iter()
            .enumerate()
            .map(|(j, &d)| if j % 2 == 0 { d as i64 } else { -(d as i64) })
            .sum();
        assert_eq!(chi, 0);
    }
    let b3 = specialize(&salvetti_truncated(3, 2), Coefficients::Trivial(1)).unwrap();
    assert!(homology(&b3, 2, Coefficient::Z).unwrap().is_zero());
    let b4 = specialize(&salvetti_truncated(4, 3), Coefficients::Trivial(1)).unwrap();
    assert!(homology(&b4, 3, Coefficient::Z).unwrap().is_zero());
}

#[test]
fn truncation_degree_is_refused() {
    let c = specialize(&salvetti_truncated(5, 2), Coefficients::Trivial(1)).unwrap();
    assert!(homology(&c, 2, Coefficient::Z).is_err());
    let fox = specialize(&fox_complex(4).unwrap(), Coefficients::Trivial(1)).unwrap();
    assert!(homology(&fox, 2, Coefficient::Z).is_err());
}

#[test]
fn fox_and_salvetti_agree_in_low_degrees() {
    for class in test_matrix() {
        for k in 2..=6 {
            let space = TupleSpace::new(&class, k, DEFAULT_TUPLE_LIMIT).unwrap();
            for module in [Coefficients::Trivial(1), Coefficients::Hurwitz(&space)] {
                let s = specialize(&salvetti_truncated(k, 2), module).unwrap();
                let f = specialize(&fox_complex(k).unwrap(), module).unwrap();
                let (es, ef) = (
                    HomologyEngine::new(&s, Coefficient::Z),
                    HomologyEngine::new(&f, Coefficient::Z),
                );
                for i in 0..=1 {
                    assert_eq!(es.group(i).unwrap(), ef.group(i).unwrap(), "k={k} i={i}");
                }
            }
        }
    }
}

#[test]
fn two_strand_closed_forms() {
    // B₂ = ℤ acting by a permutation: H₀ = coinvariants, H₁ = invariants,
    // both free of rank the number of orbits.
    for class in test_matrix() {
        let space = TupleSpace::new(&class, 2, DEFAULT_TUPLE_LIMIT).unwrap();
        let n = orbits(&class, 2, DEFAULT_TUPLE_LIMIT).unwrap().count();
        let c = specialize(&salvetti_truncated(2, 1), Coefficients::Hurwitz(&space)).unwrap();
        assert_eq!(homology(&c, 0, Coefficient::Z).unwrap(), HomologyGroup::free(n));
        assert_eq!(homology(&c, 1, Coefficient::Z).unwrap(), HomologyGroup::free(n));
    }
}

#[test]
fn degree_zero_homology_counts_orbits() {
    let fixture: serde_json::Value =
        serde_json::from_str(include_str!("fixtures/orbit_counts.json")).unwrap();
    let g = Arc::new(FiniteGroup::symmetric(3).unwrap());
    let t = g.find_element("transposition").unwrap();
    let class = ClassSet::conjugacy_closure(&g, &[t]).unwrap();
    for (k, count) in fixture["orbit_counts"].as_object().unwrap() {
        let k: usize = k.parse().unwrap();
        let count = count.as_u64().unwrap() as usize;
        assert_eq!(orbits(&class, k, DEFAULT_TUPLE_LIMIT).unwrap().count(), count);
        let space = TupleSpace::new(&class, k, DEFAULT_TUPLE_LIMIT).unwrap();
        let c = specialize(&salvetti_truncated(k, 1), Coefficients::Hurwitz(&space)).unwrap();
        assert_eq!(homology(&c, 0, Coefficient::Z).unwrap(), HomologyGroup::free(count));
    }
}

#[test]
fn universal_coefficients_on_hurwitz_complexes() {
    use hurstab_core::homology::universal_coefficient_dimension;
    for class in test_matrix() {
        for k in 1..=5 {
            let space = TupleSpace::new(&class, k, DEFAULT_TUPLE_LIMIT).unwrap();
            let c = specialize(&salvetti_truncated(k, k), Coefficients::Hurwitz(&space)).unwrap();
            let ez = HomologyEngine::new(&c, Coefficient::Z);
            let top = c.top();
            let integral: Vec<HomologyGroup> = (0..=top).map(|i| ez.group(i).unwrap()).collect();
            for p in [2, 3, 5] {
                let ep = HomologyEngine::new(&c, Coefficient::Fp(p));
                for i in 0..=top {
                    assert_eq!(
                        ep.group(i).unwrap().free_rank,
                        universal_coefficient_dimension(&integral, i, p)
                    );
                }
            }
        }
    }
}
