//! Stability experiments: homology grids over `k` and `i`, the maps induced
//! by stabilisation, onset verdicts and split-injectivity audits.

use std::fmt::Write as _;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::braid::{orbits_in, TupleSpace, DEFAULT_TUPLE_LIMIT};
use crate::error::{Error, Result};
use crate::group::{ClassDescription, ClassSet};
use crate::homology::{
    induced_map, AbelianHom, Coefficient, HomologyEngine, HomologyGroup, MapFlags,
};
use crate::resolution::{salvetti_truncated, specialize, stabilisation_chain_map, Coefficients, IntegerComplex};

/// Key-value store for finished grid columns. Keys and values are JSON text.
pub trait ResultCache: Sync {
    fn get(&self, key: &str) -> Option<String>;
    fn put(&self, key: &str, value: &str);
}

/// Bumped whenever a cached value could change.
pub const MODEL_VERSION: &str = concat!("hurstab-", env!("CARGO_PKG_VERSION"), "/1");

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Hypotheses {
    pub is_central: bool,
    pub singleton: bool,
    pub generates: bool,
    /// `None` when the group is too large for the subgroup search
    pub non_splitting: Option<bool>,
}

impl Hypotheses {
    pub fn of(c: &ClassSet) -> Hypotheses {
        Hypotheses {
            is_central: c.is_central(),
            singleton: c.len() == 1,
            generates: c.generates(),
            non_splitting: c.is_non_splitting().ok(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HomologyCell {
    pub k: usize,
    pub i: usize,
    pub homology: HomologyGroup,
}

/// `H_i(k) → H_i(k+1)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MapCell {
    pub k: usize,
    pub i: usize,
    pub flags: MapFlags,
    /// present over ℤ
    pub hom: Option<AbelianHom>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Onset {
    pub i: usize,
    /// least `k` from which every tested map is an isomorphism
    pub iso_from: Option<usize>,
    pub surj_from: Option<usize>,
    pub range_iso_from: usize,
    pub range_surj_from: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Assertion {
    pub name: String,
    pub checked: usize,
    pub failures: Vec<(usize, usize)>,
}

impl Assertion {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct StabilityReport {
    pub class: ClassDescription,
    pub stabiliser: String,
    pub coefficient: Coefficient,
    pub i_max: i64,
    pub k_max: usize,
    pub hypotheses: Hypotheses,
    pub homology: Vec<HomologyCell>,
    pub maps: Vec<MapCell>,
    pub onsets: Vec<Onset>,
    /// empty unless the stable-range hypothesis holds
    pub assertions: Vec<Assertion>,
}

impl StabilityReport {
    pub fn passed(&self) -> bool {
        self.assertions.iter().all(Assertion::passed)
    }

    pub fn group(&self, k: usize, i: usize) -> Option<&HomologyGroup> {
        self.homology.iter().find(|c| c.k == k && c.i == i).map(|c| &c.homology)
    }

    pub fn map(&self, k: usize, i: usize) -> Option<&MapCell> {
        self.maps.iter().find(|c| c.k == k && c.i == i)
    }

    /// One row per `(k, i)`.
    pub fn to_tsv(&self) -> String {
        let mut out = String::from("k\ti\thomology\tiso\tsurj\tinj\tsplit\n");
        for cell in &self.homology {
            let flags = self.map(cell.k, cell.i).map(|m| m.flags);
            let show = |f: fn(&MapFlags) -> bool| flags.map_or("-".to_string(), |m| f(&m).to_string());
            writeln!(
                out,
                "{}\t{}\t{}\t{}\t{}\t{}\t{}",
                cell.k,
                cell.i,
                cell.homology,
                show(|m| m.iso),
                show(|m| m.surj),
                show(|m| m.inj),
                show(|m| m.split),
            )
            .unwrap();
        }
        out
    }
}

/// Stable ranges `(iso_from, surj_from)` for the maps out of `H_i(k)`.
pub fn stable_range(coefficient: Coefficient, i: usize) -> (usize, usize) {
    if coefficient.is_field() {
        (2 * i + 2, 2 * i)
    } else {
        (2 * i + 4, 2 * i + 2)
    }
}

#[derive(Clone, Debug)]
pub struct StabilityOptions {
    pub i_max: i64,
    pub k_max: usize,
    pub coefficient: Coefficient,
    /// bound on `|c|^k · #cells` for the largest complex
    pub max_entries: u128,
}

fn binomial(n: usize, r: usize) -> u128 {
    if r > n {
        return 0;
    }
    (0..r).fold(1u128, |acc, i| acc * (n - i) as u128 / (i + 1) as u128)
}

/// Size of the specialised Salvetti complex for `k` strands, truncated at `d`.
pub fn complex_size(class_size: usize, k: usize, d: usize) -> u128 {
    let cells: u128 = (0..=d.min(k.saturating_sub(1))).map(|j| binomial(k.saturating_sub(1), j)).sum();
    (class_size as u128).saturating_pow(k as u32).saturating_mul(cells)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
struct Column {
    groups: Vec<HomologyGroup>,
    maps: Vec<(MapFlags, Option<AbelianHom>)>,
}

fn column_key(c: &ClassSet, ghat: usize, k: usize, opts: &StabilityOptions, with_map: bool) -> String {
    serde_json::json!({
        "version": MODEL_VERSION,
        "table": c.group().table_rows(),
        "class": c.elements(),
        "stabiliser": ghat,
        "k": k,
        "i_max": opts.i_max,
        "coefficient": opts.coefficient.to_string(),
        "with_map": with_map,
    })
    .to_string()
}

struct Stage {
    space: TupleSpace,
    complex: IntegerComplex,
    engine: HomologyEngine,
}

fn stage(c: &ClassSet, k: usize, d: usize, coefficient: Coefficient) -> Result<Stage> {
    let space = TupleSpace::new(c, k, DEFAULT_TUPLE_LIMIT)?;
    let complex = specialize(&salvetti_truncated(k, d), Coefficients::Hurwitz(&space))?;
    let engine = HomologyEngine::new(&complex, coefficient);
    Ok(Stage {
        space,
        complex,
        engine,
    })
}

pub fn stability_table(
    c: &ClassSet,
    ghat: usize,
    opts: &StabilityOptions,
    cache: Option<&dyn ResultCache>,
) -> Result<StabilityReport> {
    if !c.contains(ghat) {
        return Err(Error::StabiliserNotInClass(ghat));
    }
    let hypotheses = Hypotheses::of(c);
    let mut report = StabilityReport {
        class: c.describe(),
        stabiliser: c.group().label(ghat).to_string(),
        coefficient: opts.coefficient,
        i_max: opts.i_max,
        k_max: opts.k_max,
        hypotheses,
        homology: Vec::new(),
        maps: Vec::new(),
        onsets: Vec::new(),
        assertions: Vec::new(),
    };
    if opts.i_max < 0 {
        return Ok(report);
    }
    let i_max = opts.i_max as usize;
    let d = i_max + 1;
    let needed = complex_size(c.len(), opts.k_max, d);
    if needed > opts.max_entries {
        return Err(Error::ResourceBound {
            what: format!("specialised complex for k = {}", opts.k_max),
            needed,
            limit: opts.max_entries,
        });
    }

    let ks: Vec<usize> = (0..=opts.k_max).collect();
    let keys: Vec<String> = ks
        .iter()
        .map(|&k| column_key(c, ghat, k, opts, k < opts.k_max))
        .collect();
    let cached: Vec<Option<Column>> = keys
        .iter()
        .map(|key| {
            cache
                .and_then(|cache| cache.get(key))
                .and_then(|text| serde_json::from_str(&text).ok())
        })
        .collect();
    let mut wanted = vec![false; ks.len()];
    for (k, col) in cached.iter().enumerate() {
        if col.is_none() {
            wanted[k] = true;
            if k < opts.k_max {
                wanted[k + 1] = true;
            }
        }
    }
    let stages: Vec<Option<Stage>> = ks
        .par_iter()
        .map(|&k| wanted[k].then(|| stage(c, k, d, opts.coefficient)).transpose())
        .collect::<Result<_>>()?;

    let columns: Vec<Column> = ks
        .par_iter()
        .map(|&k| -> Result<Column> {
            if let Some(col) = &cached[k] {
                return Ok(col.clone());
            }
            let s = stages[k].as_ref().unwrap();
            let groups = (0..=i_max).map(|i| s.engine.group(i)).collect::<Result<Vec<_>>>()?;
            let mut maps = Vec::new();
            if k < opts.k_max {
                let t = stages[k + 1].as_ref().unwrap();
                let f = stabilisation_chain_map(
                    &s.complex,
                    &t.complex,
                    Coefficients::Hurwitz(&s.space),
                    Coefficients::Hurwitz(&t.space),
                    Some(ghat),
                )?;
                for i in 0..=i_max {
                    let m = induced_map(&f, &s.engine, &t.engine, i)?;
                    maps.push((m.flags, m.hom));
                }
            }
            let col = Column { groups, maps };
            if let Some(cache) = cache {
                cache.put(&keys[k], &serde_json::to_string(&col).expect("serialisable"));
            }
            Ok(col)
        })
        .collect::<Result<_>>()?;

    for (k, col) in columns.into_iter().enumerate() {
        for (i, g) in col.groups.into_iter().enumerate() {
            report.homology.push(HomologyCell { k, i, homology: g });
        }
        for (i, (flags, hom)) in col.maps.into_iter().enumerate() {
            report.maps.push(MapCell { k, i, flags, hom });
        }
    }
    report.homology.sort_by_key(|c| (c.i, c.k));
    report.maps.sort_by_key(|c| (c.i, c.k));

    for i in 0..=i_max {
        let (range_iso_from, range_surj_from) = stable_range(opts.coefficient, i);
        let row: Vec<&MapCell> = report.maps.iter().filter(|m| m.i == i).collect();
        let onset = |pred: fn(&MapFlags) -> bool| -> Option<usize> {
            let mut from = None;
            for m in row.iter().rev() {
                if pred(&m.flags) {
                    from = Some(m.k);
                } else {
                    break;
                }
            }
            from
        };
        report.onsets.push(Onset {
            i,
            iso_from: onset(|f| f.iso),
            surj_from: onset(|f| f.surj),
            range_iso_from,
            range_surj_from,
        });
    }

    if hypotheses.singleton {
        let mut iso = Assertion {
            name: "isomorphism in the stable range".into(),
            checked: 0,
            failures: Vec::new(),
        };
        let mut surj = Assertion {
            name: "surjection in the stable range".into(),
            checked: 0,
            failures: Vec::new(),
        };
        for m in &report.maps {
            let (iso_from, surj_from) = stable_range(opts.coefficient, m.i);
            if m.k >= iso_from {
                iso.checked += 1;
                if !m.flags.iso {
                    iso.failures.push((m.k, m.i));
                }
            }
            if m.k >= surj_from {
                surj.checked += 1;
                if !m.flags.surj {
                    surj.failures.push((m.k, m.i));
                }
            }
        }
        report.assertions = vec![iso, surj];
    }
    Ok(report)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SplitCell {
    pub k: usize,
    pub i: usize,
    pub split: bool,
    /// splitting is required here, not just reported
    pub asserted: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SplitAudit {
    pub cells: Vec<SplitCell>,
}

impl SplitAudit {
    pub fn passed(&self) -> bool {
        self.cells.iter().all(|c| c.split || !c.asserted)
    }
}

pub fn split_audit(report: &StabilityReport) -> Result<SplitAudit> {
    if report.coefficient != Coefficient::Z {
        return Err(Error::Invalid("split audit needs an integral report".into()));
    }
    let cells = report
        .maps
        .iter()
        .map(|m| {
            let hom = m
                .hom
                .as_ref()
                .ok_or_else(|| Error::Invalid("integral map without its matrix".into()))?;
            Ok(SplitCell {
                k: m.k,
                i: m.i,
                split: hom.is_injective() && hom.is_split_injective(),
                asserted: report.hypotheses.singleton,
            })
        })
        .collect::<Result<_>>()?;
    Ok(SplitAudit { cells })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct H0Row {
    pub k: usize,
    pub orbits: usize,
    /// for the map into `k + 1`
    pub surjective: Option<bool>,
    pub injective: Option<bool>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct H0Table {
    pub class: ClassDescription,
    pub stabiliser: String,
    pub rows: Vec<H0Row>,
}

impl H0Table {
    pub fn to_tsv(&self) -> String {
        let mut out = String::from("k\torbits\tsurjective\tinjective\n");
        for r in &self.rows {
            let show = |b: Option<bool>| b.map_or("-".to_string(), |b| b.to_string());
            writeln!(out, "{}\t{}\t{}\t{}", r.k, r.orbits, show(r.surjective), show(r.injective)).unwrap();
        }
        out
    }
}

/// Orbit counts with the map on `π₀` induced by appending `ĝ`.
pub fn h0_table(c: &ClassSet, ghat: usize, k_range: std::ops::RangeInclusive<usize>) -> Result<H0Table> {
    if !c.contains(ghat) {
        return Err(Error::StabiliserNotInClass(ghat));
    }
    let ks: Vec<usize> = k_range.collect();
    let last = ks.last().copied();
    let spaces: Vec<TupleSpace> = ks
        .iter()
        .map(|&k| TupleSpace::new(c, k, DEFAULT_TUPLE_LIMIT))
        .collect::<Result<_>>()?;
    let orbits: Vec<_> = spaces.par_iter().map(orbits_in).collect();
    let mut rows = Vec::new();
    for (n, &k) in ks.iter().enumerate() {
        let (mut surjective, mut injective) = (None, None);
        if Some(k) != last {
            let (src, tgt) = (&orbits[n], &orbits[n + 1]);
            let mut hit = vec![0usize; tgt.count()];
            for &rep in &src.representatives {
                let image = spaces[n].stabilize_index(rep, ghat)?;
                hit[tgt.labels[image] as usize] += 1;
            }
            surjective = Some(hit.iter().all(|&h| h > 0));
            injective = Some(hit.iter().all(|&h| h <= 1));
        }
        rows.push(H0Row {
            k,
            orbits: orbits[n].count(),
            surjective,
            injective,
        });
    }
    Ok(H0Table {
        class: c.describe(),
        stabiliser: c.group().label(ghat).to_string(),
        rows,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::FiniteGroup;
    use crate::Integer;
    use std::sync::Arc;

    fn central() -> ClassSet {
        let g = Arc::new(FiniteGroup::cyclic(2).unwrap());
        ClassSet::conjugacy_closure(&g, &[1]).unwrap()
    }

    fn s3() -> (ClassSet, usize) {
        let g = Arc::new(FiniteGroup::symmetric(3).unwrap());
        let t = g.find_element("transposition").unwrap();
        (ClassSet::conjugacy_closure(&g, &[t]).unwrap(), t)
    }

    fn opts(i_max: i64, k_max: usize, coefficient: Coefficient) -> StabilityOptions {
        StabilityOptions {
            i_max,
            k_max,
            coefficient,
            max_entries: 1 << 30,
        }
    }

    #[test]
    fn empty_grid_has_flags_only() {
        let r = stability_table(&central(), 1, &opts(-1, 5, Coefficient::Z), None).unwrap();
        assert!(r.homology.is_empty() && r.maps.is_empty() && r.assertions.is_empty());
        assert!(r.hypotheses.singleton && r.hypotheses.is_central);
    }

    #[test]
    fn central_class_small_grid() {
        let r = stability_table(&central(), 1, &opts(1, 7, Coefficient::Z), None).unwrap();
        assert!(r.passed());
        assert_eq!(r.onsets[0].iso_from, Some(0));
        assert!(r.onsets[1].iso_from.unwrap() <= 6);
        assert_eq!(r.group(3, 1), Some(&HomologyGroup::free(1)));
        assert!(split_audit(&r).unwrap().passed());
    }

    #[test]
    fn s3_degree_zero_ranks() {
        let (c, t) = s3();
        let r = stability_table(&c, t, &opts(0, 3, Coefficient::Z), None).unwrap();
        assert_eq!(r.group(1, 0), Some(&HomologyGroup::free(3)));
        assert_eq!(r.group(2, 0), Some(&HomologyGroup::free(5)));
        assert!(r.assertions.is_empty());
        let audit = split_audit(&r).unwrap();
        assert!(audit.cells.iter().all(|c| !c.asserted));
    }

    #[test]
    fn resource_refusal() {
        let (c, t) = s3();
        let o = StabilityOptions {
            max_entries: 100,
            ..opts(1, 6, Coefficient::Z)
        };
        assert!(matches!(stability_table(&c, t, &o, None), Err(Error::ResourceBound { .. })));
    }

    #[test]
    fn doubling_is_not_split() {
        let hom = AbelianHom::new(vec![Integer::ZERO], vec![Integer::ZERO], vec![vec![Integer::from(2)]]).unwrap();
        let mut report = stability_table(&central(), 1, &opts(-1, 1, Coefficient::Z), None).unwrap();
        report.maps.push(MapCell {
            k: 0,
            i: 0,
            flags: MapFlags {
                iso: false,
                surj: false,
                inj: true,
                split: false,
            },
            hom: Some(hom),
        });
        let audit = split_audit(&report).unwrap();
        assert!(!audit.cells[0].split);
        assert!(!audit.passed());
    }

    #[test]
    fn h0_examples() {
        let (c, t) = s3();
        let table = h0_table(&c, t, 1..=4).unwrap();
        let counts: Vec<usize> = table.rows.iter().map(|r| r.orbits).collect();
        assert_eq!(counts, vec![3, 5, 6, 6]);
        let table = h0_table(&central(), 1, 0..=6).unwrap();
        assert!(table.rows.iter().all(|r| r.orbits == 1));
        assert!(table.rows[..6].iter().all(|r| r.surjective == Some(true) && r.injective == Some(true)));
    }
}
