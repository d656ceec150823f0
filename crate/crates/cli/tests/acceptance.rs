//! The ten acceptance criteria, one pass/fail line each.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::Command;
use std::sync::Arc;
use std::time::{Duration, Instant};

use hurstab_core::braid::{hurwitz_act, orbits, total_product, BraidWord, TupleSpace, DEFAULT_TUPLE_LIMIT};
use hurstab_core::coeffsys::{
    build_hurwitz_system, build_kunneth_system, check_extension, degree, extension_mutants,
    CoeffSystem, DegreeValue, GradedModule,
};
use hurstab_core::experiments::{split_audit, stability_table, StabilityOptions, StabilityReport};
use hurstab_core::group::{ClassSet, FiniteGroup};
use hurstab_core::homology::{homology, Coefficient, HomologyEngine, HomologyGroup};
use hurstab_core::monodromy::{check_functoriality, LabeledInjection, MonodromySpec};
use hurstab_core::resolution::{fox_complex, salvetti_truncated, specialize, Coefficients};

type Check = Result<String, String>;

fn ensure(cond: bool, msg: impl Into<String>) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn within(start: Instant, limit: Duration) -> Result<(), String> {
    let t = start.elapsed();
    ensure(t < limit, format!("took {t:.1?}, limit {limit:?}"))
}

fn matrix_classes() -> Vec<ClassSet> {
    [
        FiniteGroup::symmetric(3).unwrap(),
        FiniteGroup::dihedral(4).unwrap(),
        FiniteGroup::cyclic(6).unwrap(),
    ]
    .into_iter()
    .flat_map(|g| Arc::new(g).conjugacy_classes())
    .collect()
}

fn s3_transpositions() -> (ClassSet, usize) {
    let g = Arc::new(FiniteGroup::symmetric(3).unwrap());
    let t = g.find_element("transposition").unwrap();
    (ClassSet::conjugacy_closure(&g, &[t]).unwrap(), t)
}

fn central() -> ClassSet {
    let g = Arc::new(FiniteGroup::cyclic(2).unwrap());
    ClassSet::conjugacy_closure(&g, &[1]).unwrap()
}

fn word(k: usize, letters: &[i32]) -> BraidWord {
    BraidWord::new(k, letters.to_vec()).unwrap()
}

fn criterion_1() -> Check {
    let start = Instant::now();
    let mut tuples_checked = 0;
    for c in matrix_classes() {
        let g = c.group().clone();
        for k in 1..=5 {
            let space = TupleSpace::new(&c, k, DEFAULT_TUPLE_LIMIT).unwrap();
            for idx in 0..space.size() {
                let t = space.decode(idx);
                let act = |w: &BraidWord| hurwitz_act(&c, w, &t).unwrap();
                for i in 1..k as i32 {
                    ensure(act(&word(k, &[i, -i])) == t, "σσ⁻¹ ≠ id")?;
                    ensure(act(&word(k, &[-i, i])) == t, "σ⁻¹σ ≠ id")?;
                    let moved = act(&word(k, &[i]));
                    ensure(total_product(&g, &moved) == total_product(&g, &t), "product changed")?;
                    if i + 1 < k as i32 {
                        ensure(
                            act(&word(k, &[i, i + 1, i])) == act(&word(k, &[i + 1, i, i + 1])),
                            "braid relation fails",
                        )?;
                    }
                    for j in i + 2..k as i32 {
                        ensure(act(&word(k, &[i, j])) == act(&word(k, &[j, i])), "far commutation fails")?;
                    }
                }
                tuples_checked += 1;
            }
        }
    }
    within(start, Duration::from_secs(10))?;
    Ok(format!("{tuples_checked} tuples"))
}

fn criterion_2() -> Check {
    let fixture: serde_json::Value =
        serde_json::from_str(include_str!("../../core/tests/fixtures/orbit_counts.json")).unwrap();
    let (c, _) = s3_transpositions();
    let counts = fixture["orbit_counts"].as_object().unwrap();
    ensure(counts["1"] == 3 && counts["2"] == 5, "fixture does not pin k = 1, 2")?;
    for (k, expect) in counts {
        let k: usize = k.parse().unwrap();
        let n = orbits(&c, k, DEFAULT_TUPLE_LIMIT).unwrap().count();
        ensure(n as u64 == expect.as_u64().unwrap(), format!("k={k}: {n} orbits"))?;
    }
    Ok(format!("{} fixture rows", counts.len()))
}

fn criterion_3() -> Check {
    let start = Instant::now();
    let mut compared = 0;
    for c in matrix_classes() {
        for k in 2..=6 {
            let space = TupleSpace::new(&c, k, DEFAULT_TUPLE_LIMIT).unwrap();
            for module in [Coefficients::Trivial(1), Coefficients::Hurwitz(&space)] {
                let s = specialize(&salvetti_truncated(k, 2), module).unwrap();
                let f = specialize(&fox_complex(k).unwrap(), module).unwrap();
                let (es, ef) = (HomologyEngine::new(&s, Coefficient::Z), HomologyEngine::new(&f, Coefficient::Z));
                for i in 0..=1 {
                    let (a, b) = (es.group(i).unwrap(), ef.group(i).unwrap());
                    ensure(a == b, format!("k={k} i={i}: {a} vs {b}"))?;
                    compared += 1;
                }
            }
        }
        let space = TupleSpace::new(&c, 2, DEFAULT_TUPLE_LIMIT).unwrap();
        let n = orbits(&c, 2, DEFAULT_TUPLE_LIMIT).unwrap().count();
        let two = specialize(&salvetti_truncated(2, 1), Coefficients::Hurwitz(&space)).unwrap();
        for i in 0..=1 {
            ensure(
                homology(&two, i, Coefficient::Z).unwrap() == HomologyGroup::free(n),
                "k = 2 closed form",
            )?;
        }
    }
    let b3 = specialize(&salvetti_truncated(3, 2), Coefficients::Trivial(1)).unwrap();
    ensure(homology(&b3, 2, Coefficient::Z).unwrap().is_zero(), "H₂(B₃) ≠ 0")?;
    within(start, Duration::from_secs(120))?;
    Ok(format!("{compared} homology groups compared"))
}

fn central_report(coefficient: Coefficient) -> StabilityReport {
    let opts = StabilityOptions {
        i_max: 2,
        k_max: 9,
        coefficient,
        max_entries: 1 << 32,
    };
    stability_table(&central(), 1, &opts, None).unwrap()
}

fn criterion_4() -> Check {
    let start = Instant::now();
    let mut maps = 0;
    for coefficient in [Coefficient::Z, Coefficient::Q, Coefficient::Fp(2), Coefficient::Fp(3)] {
        let r = central_report(coefficient);
        ensure(r.assertions.len() == 2, "stable-range assertions missing")?;
        ensure(r.passed(), format!("{coefficient}: {:?}", r.assertions))?;
        ensure(r.maps.len() == 27, "grid incomplete")?;
        maps += r.maps.len();
    }
    within(start, Duration::from_secs(300))?;
    Ok(format!("{maps} stabilisation maps"))
}

fn criterion_5() -> Check {
    let audit = split_audit(&central_report(Coefficient::Z)).unwrap();
    ensure(audit.cells.iter().all(|c| c.asserted), "splitting not asserted")?;
    ensure(audit.passed(), "a map is not split-injective")?;
    Ok(format!("{} maps split-injective", audit.cells.len()))
}

fn criterion_6() -> Check {
    let t = build_hurwitz_system(&central(), 1, 6).unwrap();
    ensure(degree(&t, 4).unwrap().degree == DegreeValue::Finite(0), "|c| = 1 degree")?;
    let (c, g) = s3_transpositions();
    let r = degree(&build_hurwitz_system(&c, g, 6).unwrap(), 4).unwrap();
    ensure(r.degree == DegreeValue::AboveCutoff(4), format!("S3 degree {}", r.degree))?;
    let trace: Vec<usize> = (0..6).map(|k| 2 * 3usize.pow(k)).collect();
    ensure(r.rank_trace[1] == trace, format!("Δ ranks {:?}", r.rank_trace[1]))?;
    let binomial = |n: usize, r: usize| -> usize {
        if r > n {
            0
        } else {
            (0..r).fold(1, |acc, i| acc * (n - i) / (i + 1))
        }
    };
    for i in 0..=3 {
        let f = build_kunneth_system(&GradedModule::free(&[1]), &GradedModule::circle(), i, 10, None).unwrap();
        let ranks: Vec<usize> = (0..=10).map(|k| binomial(k, i)).collect();
        ensure(f.ranks() == ranks, format!("rank F_{i}"))?;
        let d = degree(&f, 5).unwrap();
        ensure(d.degree == DegreeValue::Finite(i as i64), format!("degree F_{i} = {}", d.degree))?;
        for k in 0..10 {
            ensure(d.rank_trace[1][k] == binomial(k, i.saturating_sub(1)) * usize::from(i > 0), "ΔF_i rank")?;
        }
    }
    Ok("degrees 0, >4, 0..3".into())
}

fn criterion_7() -> Check {
    let mut systems = 0;
    for c in matrix_classes() {
        for &ghat in c.elements() {
            let t = build_hurwitz_system(&c, ghat, 5).unwrap();
            let r = check_extension(&t, 3, 200, 2024);
            ensure(r.passed, format!("{}: {:?}", t.name, r.witness))?;
            systems += 1;
        }
    }
    let (c, g) = s3_transpositions();
    let mutants = extension_mutants(&build_hurwitz_system(&c, g, 5).unwrap());
    ensure(mutants.len() == 5, "five mutants expected")?;
    for (name, m) in &mutants {
        let r = check_extension(m, 3, 200, 2024);
        ensure(!r.passed && r.witness.is_some(), format!("mutant {name} survived"))?;
    }
    Ok(format!("{systems} systems pass, {} mutants caught", mutants.len()))
}

fn criterion_8() -> Check {
    let start = Instant::now();
    let spec: MonodromySpec = serde_json::from_str(
        r#"{"q_table": [[0, 1], [1, 0]], "sign": [1, -1],
            "action": [[0, 1, 2], [0, 1, 2]], "rho": [0, 2, 1]}"#,
    )
    .unwrap();
    let model = spec.build().unwrap();
    let report = check_functoriality(&model, 3, 1000, 8);
    ensure(report.passed(), format!("{:?}", report.failures))?;
    let mut blanks = 0;
    for m in 0..=3 {
        for n in 0..=3 {
            let empty = LabeledInjection::new(m, n, vec![None; m]).unwrap();
            let states = 3usize.pow(n as u32);
            for s in 0..states {
                let state: Vec<usize> = (0..n).map(|j| s / 3usize.pow(j as u32) % 3).collect();
                ensure(model.act(&empty, &state).unwrap() == vec![0; m], "blank fill")?;
                blanks += 1;
            }
        }
    }
    within(start, Duration::from_secs(30))?;
    Ok(format!(
        "{} compositions, {} triples, {blanks} blank fills",
        report.associativity_checks, report.functoriality_checks
    ))
}

fn generated(seed: usize) -> CoeffSystem {
    let k_max = 7;
    match seed % 4 {
        0 => CoeffSystem::zero(k_max),
        1 => CoeffSystem::constant(1 + seed % 3, k_max),
        _ => {
            let rz = [1, 1 + seed % 2, seed % 3 % 2];
            let ry = [1 + seed % 2, seed % 2];
            build_kunneth_system(&GradedModule::free(&ry), &GradedModule::free(&rz), seed % 3, k_max, None).unwrap()
        }
    }
}

fn criterion_9() -> Check {
    let finite = |t: &CoeffSystem| -> Result<i64, String> {
        match degree(t, 6).unwrap().degree {
            DegreeValue::Finite(d) => Ok(d),
            other => Err(format!("{} has degree {other}", t.name)),
        }
    };
    let mut products = 0;
    for n in 0..20 {
        let (a, b) = (generated(n), generated(3 * n + 2));
        let (da, db) = (finite(&a)?, finite(&b)?);
        ensure(finite(&a.direct_sum(&b))? == da.max(db), format!("pair {n}: ⊕"))?;
        ensure(finite(&a.tensor(&CoeffSystem::constant(2, 7)))? <= da, format!("pair {n}: ⊗ A"))?;
        if da >= 0 && db >= 0 {
            ensure(finite(&a.tensor(&b))? <= da + db, format!("pair {n}: ⊗"))?;
            products += 1;
        }
    }
    Ok(format!("20 pairs, {products} products"))
}

fn criterion_10() -> Check {
    let cache = tempfile::tempdir().unwrap();
    let run = |extra: &[&str]| -> Result<Vec<u8>, String> {
        let out = Command::new(env!("CARGO_BIN_EXE_hurstab"))
            .args([
                "stability", "--group", "cyclic:2", "--class", "elems:[1]", "--imax", "2", "--kmax", "9",
                "--coeff", "Z", "--format", "json",
            ])
            .args(extra)
            .env("HURSTAB_CACHE", cache.path())
            .output()
            .map_err(|e| e.to_string())?;
        ensure(out.status.success(), format!("exit {:?}", out.status.code()))?;
        Ok(out.stdout)
    };
    let first = run(&[])?;
    let entries = std::fs::read_dir(cache.path()).unwrap().count();
    ensure(entries > 0, "cache not populated")?;
    let second = run(&[])?;
    let third = run(&["--no-cache"])?;
    let fourth = run(&["--no-cache", "--workers", "1"])?;
    ensure(first == second, "cached rerun differs")?;
    ensure(first == third && third == fourth, "uncached run differs")?;
    Ok(format!("{} bytes identical across 4 runs, {entries} cache entries", first.len()))
}

fn main() {
    let criteria: [(&str, fn() -> Check); 10] = [
        ("braid-action soundness", criterion_1),
        ("orbit ground truth", criterion_2),
        ("Salvetti and Fox agree", criterion_3),
        ("stable range over Z, Q, F2, F3", criterion_4),
        ("split-injectivity", criterion_5),
        ("degree machinery", criterion_6),
        ("extension criterion and mutants", criterion_7),
        ("monodromy model", criterion_8),
        ("degree laws", criterion_9),
        ("determinism and cache", criterion_10),
    ];
    let mut failed = 0;
    for (n, (name, f)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|_| Err("panicked".into()));
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("criterion {:>2} PASS  {name} ({detail}; {secs:.2}s)", n + 1),
            Err(why) => {
                failed += 1;
                println!("criterion {:>2} FAIL  {name}: {why} ({secs:.2}s)", n + 1);
            }
        }
    }
    if failed > 0 {
        println!("{failed} of 10 criteria failed");
        std::process::exit(1);
    }
    println!("all 10 criteria passed");
}
