use std::sync::Arc;

use hurstab_core::experiments::{split_audit, stability_table, StabilityOptions, StabilityReport};
use hurstab_core::group::{ClassSet, FiniteGroup};
use hurstab_core::homology::{universal_coefficient_dimension, Coefficient, HomologyGroup};
use hurstab_core::Integer;

fn central() -> ClassSet {
    let g = Arc::new(FiniteGroup::cyclic(2).unwrap());
    ClassSet::conjugacy_closure(&g, &[1]).unwrap()
}

fn run(c: &ClassSet, ghat: usize, i_max: i64, k_max: usize, coefficient: Coefficient) -> StabilityReport {
    let opts = StabilityOptions {
        i_max,
        k_max,
        coefficient,
        max_entries: 1 << 32,
    };
    stability_table(c, ghat, &opts, None).unwrap()
}

#[test]
fn central_grid_matches_braid_group_homology() {
    let r = run(&central(), 1, 2, 9, Coefficient::Z);
    assert!(r.passed(), "{:?}", r.assertions);
    for k in 0..=9 {
        assert_eq!(r.group(k, 0), Some(&HomologyGroup::free(1)));
        let h1 = if k >= 2 { HomologyGroup::free(1) } else { HomologyGroup::zero() };
        assert_eq!(r.group(k, 1), Some(&h1));
        let h2 = if k >= 4 {
            HomologyGroup {
                free_rank: 0,
                torsion: vec![Integer::from(2)],
            }
        } else {
            HomologyGroup::zero()
        };
        assert_eq!(r.group(k, 2), Some(&h2));
    }
    assert!(split_audit(&r).unwrap().passed());
    for coefficient in [Coefficient::Q, Coefficient::Fp(2), Coefficient::Fp(3)] {
        assert!(run(&central(), 1, 2, 9, coefficient).passed());
    }
}

#[test]
fn field_grids_follow_universal_coefficients() {
    let g = Arc::new(FiniteGroup::symmetric(3).unwrap());
    let t = g.find_element("transposition").unwrap();
    let s3 = ClassSet::conjugacy_closure(&g, &[t]).unwrap();
    for (c, ghat, k_max) in [(central(), 1, 8), (s3, t, 5)] {
        let z = run(&c, ghat, 1, k_max, Coefficient::Z);
        let q = run(&c, ghat, 1, k_max, Coefficient::Q);
        for p in [2, 3] {
            let fp = run(&c, ghat, 1, k_max, Coefficient::Fp(p));
            for k in 0..=k_max {
                let integral: Vec<HomologyGroup> = (0..=1).map(|i| z.group(k, i).unwrap().clone()).collect();
                for i in 0..=1 {
                    assert_eq!(
                        fp.group(k, i).unwrap().free_rank,
                        universal_coefficient_dimension(&integral, i, p),
                        "k={k} i={i} p={p}"
                    );
                    assert_eq!(q.group(k, i).unwrap().free_rank, integral[i].free_rank);
                }
            }
        }
    }
}

#[test]
fn reports_are_deterministic() {
    let a = serde_json::to_string(&run(&central(), 1, 2, 7, Coefficient::Z)).unwrap();
    let b = serde_json::to_string(&run(&central(), 1, 2, 7, Coefficient::Z)).unwrap();
    assert_eq!(a, b);
}
