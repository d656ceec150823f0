mod cache;

use std::fmt::Write as _;
use std::io::Write as _;
use std::path::PathBuf;
use std::process::ExitCode;
use std::sync::Arc;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use hurstab_core::braid::{TupleSpace, DEFAULT_TUPLE_LIMIT};
use hurstab_core::coeffsys::{
    build_hurwitz_system, check_extension, degree, delta, CoeffSystem, DegreeValue, KunnethSpec,
};
use hurstab_core::experiments::{
    complex_size, h0_table, split_audit, stability_table, ResultCache, StabilityOptions,
    MODEL_VERSION,
};
use hurstab_core::group::{ClassSet, FiniteGroup};
use hurstab_core::homology::{Coefficient, HomologyEngine};
use hurstab_core::monodromy::{
    check_functoriality, LabelOrder, LabeledInjection, MonodromySpec,
};
use hurstab_core::resolution::{salvetti_truncated, specialize, Coefficients};
use hurstab_core::Error;

use cache::DiskCache;

const VERSION: &str = env!("CARGO_PKG_VERSION");
/// rough footprint of one stored matrix entry, for `--mem-limit`
const BYTES_PER_ENTRY: u128 = 256;

#[derive(Parser)]
#[command(name = "hurstab", version, about = "Homology of Hurwitz spaces and homological stability experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    settings: Settings,
    #[command(flatten)]
    runtime: Runtime,
}

#[derive(Subcommand, Clone, Copy, PartialEq, Eq)]
enum Command {
    /// Braid orbit counts on c^k and the stabilisation map on them
    Orbits,
    /// H_i(B_k; Z[c^k]) over a grid of k and i
    Homology,
    /// Stabilisation maps and verdicts against the stable range
    Stability,
    /// Degree of a Hurwitz or synthetic Künneth coefficient system
    Degree,
    /// Functoriality of a labelled-braid monodromy model
    MonodromyCheck,
    /// Quick structural checks with known answers
    Selftest,
}

impl Command {
    fn name(self) -> &'static str {
        match self {
            Command::Orbits => "orbits",
            Command::Homology => "homology",
            Command::Stability => "stability",
            Command::Degree => "degree",
            Command::MonodromyCheck => "monodromy-check",
            Command::Selftest => "selftest",
        }
    }
}

/// Inputs that determine results; these go into every report.
#[derive(Args, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct Settings {
    /// sym:N, cyclic:N, dihedral:N, q8 or table:PATH
    #[arg(long, global = true)]
    group: Option<String>,
    /// rep:ELEMENT, elems:[A,B,..] or class:INDEX
    #[arg(long, global = true)]
    class: Option<String>,
    /// element appended by the stabilisation map
    #[arg(long, global = true)]
    stabiliser: Option<String>,
    /// N or A..B
    #[arg(long, global = true)]
    k: Option<String>,
    #[arg(long, global = true)]
    kmax: Option<usize>,
    /// N or A..B
    #[arg(long, global = true)]
    i: Option<String>,
    #[arg(long, global = true, allow_negative_numbers = true)]
    imax: Option<i64>,
    /// Z, Q or Fp:P
    #[arg(long, global = true)]
    coeff: Option<String>,
    #[arg(long, global = true)]
    cutoff: Option<usize>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// JSON description of a synthetic Künneth system
    #[arg(long, global = true)]
    kunneth: Option<PathBuf>,
    /// JSON description of a monodromy model
    #[arg(long, global = true)]
    model: Option<PathBuf>,
    /// longest braid block checked by the extension criterion
    #[arg(long, global = true)]
    lmax: Option<usize>,
    /// random words per extension-criterion cell
    #[arg(long, global = true)]
    samples: Option<usize>,
    #[arg(long, global = true)]
    mem_limit: Option<String>,
}

/// Settings that never change a result byte.
#[derive(Args, Clone)]
struct Runtime {
    #[arg(long, global = true)]
    workers: Option<usize>,
    #[arg(long, global = true, overrides_with = "no_cache")]
    cache: bool,
    #[arg(long, global = true)]
    no_cache: bool,
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Tsv)]
    format: Format,
    /// JSON file of settings; flags win
    #[arg(long, global = true)]
    config: Option<PathBuf>,
}

#[derive(ValueEnum, Clone, Copy, PartialEq, Eq)]
enum Format {
    Tsv,
    Json,
}

enum Failure {
    Usage(String),
    Validation(String),
    Resource(String),
    Io(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Usage(_) => 64,
            Failure::Validation(_) => 65,
            Failure::Resource(_) => 3,
            Failure::Io(_) => 74,
        }
    }

    fn message(&self) -> &str {
        match self {
            Failure::Usage(m) | Failure::Validation(m) | Failure::Resource(m) | Failure::Io(m) => m,
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Failure {
        match e {
            Error::ResourceBound { .. } => Failure::Resource(e.to_string()),
            e => Failure::Validation(e.to_string()),
        }
    }
}

type Outcome<T> = std::result::Result<T, Failure>;

/// What a subcommand produced: a document and whether its checks held.
struct Output {
    config: Value,
    result: Value,
    tsv: String,
    passed: bool,
}

fn usage(msg: impl Into<String>) -> Failure {
    Failure::Usage(msg.into())
}

fn invalid(msg: impl Into<String>) -> Failure {
    Failure::Validation(msg.into())
}

fn read_json<T: serde::de::DeserializeOwned>(path: &PathBuf) -> Outcome<T> {
    let text = std::fs::read_to_string(path).map_err(|e| Failure::Io(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| invalid(format!("{}: {e}", path.display())))
}

/// `flags` over `file`, field by field.
fn merge(flags: &Settings, file: Option<Settings>) -> Settings {
    let Some(file) = file else { return flags.clone() };
    let mut base = serde_json::to_value(file).unwrap();
    let over = serde_json::to_value(flags).unwrap();
    for (k, v) in over.as_object().unwrap() {
        if !v.is_null() {
            base[k] = v.clone();
        }
    }
    serde_json::from_value(base).unwrap()
}

fn parse_group(spec: &str) -> Outcome<Arc<FiniteGroup>> {
    let (kind, arg) = spec.split_once(':').unwrap_or((spec, ""));
    let n = || arg.parse::<usize>().map_err(|_| usage(format!("bad group size in {spec:?}")));
    let g = match kind {
        "sym" | "S" => FiniteGroup::symmetric(n()?)?,
        "cyclic" | "Z" => FiniteGroup::cyclic(n()?)?,
        "dihedral" | "D" => FiniteGroup::dihedral(n()?)?,
        "q8" | "Q8" => FiniteGroup::quaternion()?,
        "table" => {
            let rows: Vec<Vec<usize>> = read_json(&PathBuf::from(arg))?;
            FiniteGroup::from_table(rows)?
        }
        _ => return Err(usage(format!("unknown group {spec:?}"))),
    };
    Ok(Arc::new(g))
}

fn parse_element(g: &FiniteGroup, s: &str) -> Outcome<usize> {
    let s = s.trim();
    if let Some(x) = g.find_element(s) {
        return Ok(x);
    }
    match s.parse::<usize>() {
        Ok(x) if x < g.order() => Ok(x),
        _ => Err(invalid(format!("no element {s:?} in {}", g.name()))),
    }
}

/// The class and its default stabiliser.
fn parse_class(g: &Arc<FiniteGroup>, spec: &str) -> Outcome<(ClassSet, usize)> {
    let (kind, arg) = spec
        .split_once(':')
        .ok_or_else(|| usage(format!("class spec {spec:?} needs a kind")))?;
    match kind {
        "rep" => {
            let x = parse_element(g, arg)?;
            Ok((ClassSet::conjugacy_closure(g, &[x])?, x))
        }
        "elems" => {
            let inner = arg.trim().trim_start_matches('[').trim_end_matches(']');
            let elems = inner
                .split(',')
                .filter(|s| !s.trim().is_empty())
                .map(|s| parse_element(g, s))
                .collect::<Outcome<Vec<_>>>()?;
            let c = ClassSet::from_elements(g, &elems)?;
            let first = c.elements()[0];
            Ok((c, first))
        }
        "class" => {
            let n: usize = arg.parse().map_err(|_| usage(format!("bad class index {arg:?}")))?;
            let classes = g.conjugacy_classes();
            let c = classes
                .get(n)
                .cloned()
                .ok_or_else(|| invalid(format!("{} has {} classes", g.name(), classes.len())))?;
            let first = c.elements()[0];
            Ok((c, first))
        }
        _ => Err(usage(format!("unknown class kind {kind:?}"))),
    }
}

fn parse_range(s: &str) -> Outcome<std::ops::RangeInclusive<usize>> {
    let bad = || usage(format!("bad range {s:?}"));
    match s.split_once("..") {
        Some((a, b)) => {
            let (a, b) = (a.trim().parse().map_err(|_| bad())?, b.trim().parse().map_err(|_| bad())?);
            if a > b {
                return Err(bad());
            }
            Ok(a..=b)
        }
        None => {
            let n = s.trim().parse().map_err(|_| bad())?;
            Ok(n..=n)
        }
    }
}

fn parse_mem(s: &str) -> Outcome<u128> {
    let s = s.trim();
    let (digits, scale) = match s.chars().last() {
        Some('K' | 'k') => (&s[..s.len() - 1], 1u128 << 10),
        Some('M' | 'm') => (&s[..s.len() - 1], 1 << 20),
        Some('G' | 'g') => (&s[..s.len() - 1], 1 << 30),
        Some('T' | 't') => (&s[..s.len() - 1], 1 << 40),
        _ => (s, 1),
    };
    digits
        .parse::<u128>()
        .map(|n| n * scale)
        .map_err(|_| usage(format!("bad memory limit {s:?}")))
}

struct Context {
    settings: Settings,
    cache: Option<DiskCache>,
}

impl Context {
    fn group_and_class(&self) -> Outcome<(ClassSet, usize, Value)> {
        let gs = self.settings.group.as_deref().ok_or_else(|| usage("--group is required"))?;
        let cs = self.settings.class.as_deref().ok_or_else(|| usage("--class is required"))?;
        let g = parse_group(gs)?;
        let (c, default) = parse_class(&g, cs)?;
        let ghat = match &self.settings.stabiliser {
            Some(s) => parse_element(&g, s)?,
            None => default,
        };
        if !c.contains(ghat) {
            return Err(invalid(format!("stabiliser {} is not in the class", g.label(ghat))));
        }
        let config = json!({
            "group": gs,
            "class": cs,
            "class_elements": c.describe().labels,
            "stabiliser": g.label(ghat),
        });
        Ok((c, ghat, config))
    }

    fn coefficient(&self) -> Outcome<Coefficient> {
        Ok(self.settings.coeff.as_deref().unwrap_or("Z").parse::<Coefficient>()?)
    }

    fn max_entries(&self) -> Outcome<u128> {
        let mem = parse_mem(self.settings.mem_limit.as_deref().unwrap_or("4G"))?;
        Ok(mem / BYTES_PER_ENTRY)
    }

    fn seed(&self) -> u64 {
        self.settings.seed.unwrap_or(0)
    }
}

fn extend(config: &mut Value, extra: Value) {
    for (k, v) in extra.as_object().unwrap() {
        config[k] = v.clone();
    }
}

fn run_orbits(ctx: &Context) -> Outcome<Output> {
    let (c, ghat, mut config) = ctx.group_and_class()?;
    let ks = parse_range(ctx.settings.k.as_deref().ok_or_else(|| usage("--k is required"))?)?;
    let largest = (c.len() as u128).saturating_pow(*ks.end() as u32);
    if largest > DEFAULT_TUPLE_LIMIT {
        return Err(Failure::Resource(format!("{largest} tuples exceed the limit {DEFAULT_TUPLE_LIMIT}")));
    }
    extend(&mut config, json!({ "k": format!("{}..{}", ks.start(), ks.end()) }));
    let table = h0_table(&c, ghat, ks)?;
    Ok(Output {
        config,
        tsv: table.to_tsv(),
        result: serde_json::to_value(&table).unwrap(),
        passed: true,
    })
}

fn run_homology(ctx: &Context) -> Outcome<Output> {
    let (c, _, mut config) = ctx.group_and_class()?;
    let ks = parse_range(ctx.settings.k.as_deref().ok_or_else(|| usage("--k is required"))?)?;
    let is = parse_range(ctx.settings.i.as_deref().unwrap_or("0..1"))?;
    let coefficient = ctx.coefficient()?;
    let d = is.end() + 1;
    let needed = complex_size(c.len(), *ks.end(), d);
    let limit = ctx.max_entries()?;
    if needed > limit {
        return Err(Failure::Resource(format!("complex of size {needed} exceeds the limit {limit}")));
    }
    extend(
        &mut config,
        json!({
            "k": format!("{}..{}", ks.start(), ks.end()),
            "i": format!("{}..{}", is.start(), is.end()),
            "coeff": coefficient.to_string(),
        }),
    );
    use rayon::prelude::*;
    let ks: Vec<usize> = ks.collect();
    let rows: Vec<Vec<Value>> = ks
        .par_iter()
        .map(|&k| -> Outcome<Vec<Value>> {
            let space = TupleSpace::new(&c, k, DEFAULT_TUPLE_LIMIT)?;
            let complex = specialize(&salvetti_truncated(k, d), Coefficients::Hurwitz(&space))?;
            let engine = HomologyEngine::new(&complex, coefficient);
            is.clone()
                .map(|i| Ok(json!({ "k": k, "i": i, "homology": engine.group(i)? })))
                .collect()
        })
        .collect::<Outcome<_>>()?;
    let cells: Vec<Value> = rows.into_iter().flatten().collect();
    let mut tsv = String::from("k\ti\thomology\n");
    for cell in &cells {
        let h: hurstab_core::homology::HomologyGroup = serde_json::from_value(cell["homology"].clone()).unwrap();
        writeln!(tsv, "{}\t{}\t{}", cell["k"], cell["i"], h).unwrap();
    }
    Ok(Output {
        config,
        tsv,
        result: Value::Array(cells),
        passed: true,
    })
}

fn run_stability(ctx: &Context) -> Outcome<Output> {
    let (c, ghat, mut config) = ctx.group_and_class()?;
    let coefficient = ctx.coefficient()?;
    let singleton = c.len() == 1;
    let opts = StabilityOptions {
        i_max: ctx.settings.imax.unwrap_or(if singleton { 2 } else { 1 }),
        k_max: ctx.settings.kmax.unwrap_or(if singleton { 9 } else { 6 }),
        coefficient,
        max_entries: ctx.max_entries()?,
    };
    extend(
        &mut config,
        json!({ "imax": opts.i_max, "kmax": opts.k_max, "coeff": coefficient.to_string() }),
    );
    let cache = ctx.cache.as_ref().map(|c| c as &dyn ResultCache);
    let report = stability_table(&c, ghat, &opts, cache)?;
    if let Some(e) = ctx.cache.as_ref().and_then(DiskCache::take_error) {
        return Err(Failure::Io(format!("cache: {e}")));
    }
    let audit = if coefficient == Coefficient::Z {
        Some(split_audit(&report)?)
    } else {
        None
    };
    let passed = report.passed() && audit.as_ref().is_none_or(|a| a.passed());
    let mut tsv = report.to_tsv();
    for o in &report.onsets {
        let show = |x: Option<usize>| x.map_or("none".to_string(), |k| k.to_string());
        writeln!(
            tsv,
            "# onset i={} iso_from={} surj_from={} range_iso_from={} range_surj_from={}",
            o.i,
            show(o.iso_from),
            show(o.surj_from),
            o.range_iso_from,
            o.range_surj_from
        )
        .unwrap();
    }
    for a in &report.assertions {
        writeln!(
            tsv,
            "# assertion {}: {} ({} maps checked)",
            a.name,
            if a.passed() { "pass" } else { "FAIL" },
            a.checked
        )
        .unwrap();
    }
    if let Some(a) = &audit {
        let split = a.cells.iter().filter(|c| c.split).count();
        writeln!(
            tsv,
            "# split-injective {split}/{} maps{}",
            a.cells.len(),
            if a.cells.iter().any(|c| c.asserted) { " (asserted)" } else { "" }
        )
        .unwrap();
    }
    Ok(Output {
        config,
        tsv,
        result: json!({ "report": report, "split_audit": audit }),
        passed,
    })
}

fn run_degree(ctx: &Context) -> Outcome<Output> {
    let cutoff = ctx.settings.cutoff.unwrap_or(4);
    let (system, mut config): (CoeffSystem, Value) = match &ctx.settings.kunneth {
        Some(path) => {
            let spec: KunnethSpec = read_json(path)?;
            let config = json!({ "kunneth": spec });
            (spec.build()?, config)
        }
        None => {
            let (c, ghat, config) = ctx.group_and_class()?;
            let k_max = ctx.settings.kmax.unwrap_or(cutoff + 2);
            let size = (c.len() as u128).saturating_pow(k_max as u32);
            let limit = ctx.max_entries()?;
            if size > limit.min(DEFAULT_TUPLE_LIMIT) {
                return Err(Failure::Resource(format!("F({k_max}) has rank {size}")));
            }
            let mut config = config;
            extend(&mut config, json!({ "kmax": k_max }));
            (build_hurwitz_system(&c, ghat, k_max)?, config)
        }
    };
    let (l_max, samples, seed) = (
        ctx.settings.lmax.unwrap_or(3),
        ctx.settings.samples.unwrap_or(200),
        ctx.seed(),
    );
    extend(
        &mut config,
        json!({ "cutoff": cutoff, "lmax": l_max, "samples": samples, "seed": seed }),
    );
    let extension = check_extension(&system, l_max, samples, seed);
    let report = degree(&system, cutoff)?;
    let mut tsv = format!("# system {}\n# degree {}\n", report.system, report.degree);
    writeln!(
        tsv,
        "# extension criterion {} ({} checks)",
        if extension.passed { "pass" } else { "FAIL" },
        extension.checks
    )
    .unwrap();
    tsv.push_str("delta\tk\trank\n");
    for (d, ranks) in report.rank_trace.iter().enumerate() {
        for (k, r) in ranks.iter().enumerate() {
            writeln!(tsv, "{d}\t{k}\t{r}").unwrap();
        }
    }
    Ok(Output {
        config,
        tsv,
        result: json!({ "degree": report, "extension": extension }),
        passed: extension.passed,
    })
}

/// `Q = ℤ/2` with the sign character, `Z = {∗, a, b}`, ρ swapping `a, b`.
fn default_model() -> MonodromySpec {
    MonodromySpec {
        q_table: vec![vec![0, 1], vec![1, 0]],
        sign: vec![1, -1],
        action: vec![vec![0, 1, 2], vec![0, 1, 2]],
        rho: vec![0, 2, 1],
        label_order: LabelOrder::OuterFirst,
    }
}

fn run_monodromy(ctx: &Context) -> Outcome<Output> {
    let spec = match &ctx.settings.model {
        Some(path) => read_json(path)?,
        None => default_model(),
    };
    let model = spec.build()?;
    let seed = ctx.seed();
    let k_max = ctx.settings.kmax.unwrap_or(4);
    let cutoff = ctx.settings.cutoff.unwrap_or(2);
    let config = json!({ "model": spec, "seed": seed, "kmax": k_max, "cutoff": cutoff });
    let functoriality = check_functoriality(&model, 3, 1000, seed);
    let system = model.linearize(k_max)?;
    let extension = check_extension(&system, 3, ctx.settings.samples.unwrap_or(50), seed);
    let deg = degree(&system, cutoff)?;
    let passed = functoriality.passed() && extension.passed;
    let mut tsv = String::new();
    writeln!(
        tsv,
        "associativity\t{}\t{}",
        functoriality.associativity_checks,
        functoriality.failures.get("associativity").copied().unwrap_or(0)
    )
    .unwrap();
    writeln!(
        tsv,
        "functoriality\t{}\t{}",
        functoriality.functoriality_checks,
        functoriality.failures.get("functoriality").copied().unwrap_or(0)
    )
    .unwrap();
    writeln!(tsv, "extension\t{}\t{}", extension.checks, u8::from(!extension.passed)).unwrap();
    writeln!(tsv, "# strictly compatible ρ: {}", model.is_strictly_compatible()).unwrap();
    writeln!(tsv, "# linearised degree {}", deg.degree).unwrap();
    Ok(Output {
        config,
        tsv,
        result: json!({
            "functoriality": functoriality,
            "extension": extension,
            "degree": deg,
            "strictly_compatible": model.is_strictly_compatible(),
        }),
        passed,
    })
}

fn selftest_checks() -> Vec<(&'static str, bool)> {
    let mut out = Vec::new();
    let z2 = Arc::new(FiniteGroup::cyclic(2).unwrap());
    let central = ClassSet::conjugacy_closure(&z2, &[1]).unwrap();
    let t = build_hurwitz_system(&central, 1, 4).unwrap();
    out.push((
        "central Hurwitz system is constant",
        t.ranks().iter().all(|&r| r == 1)
            && (0..4).all(|k| t.structure_map(k) == &hurstab_core::matrix::SparseMatrix::identity(1)),
    ));
    out.push((
        "Δ of a constant system vanishes",
        delta(&CoeffSystem::constant(1, 4)).is_ok_and(|(d, _)| d.is_zero()),
    ));
    out.push((
        "zero system has degree −1",
        degree(&CoeffSystem::zero(3), 2).is_ok_and(|r| r.degree == DegreeValue::Finite(-1)),
    ));
    out.push((
        "central Hurwitz system has degree 0",
        degree(&t, 2).is_ok_and(|r| r.degree == DegreeValue::Finite(0)),
    ));
    out.push(("central system satisfies the extension criterion", check_extension(&t, 3, 10, 0).passed));
    let s3 = Arc::new(FiniteGroup::symmetric(3).unwrap());
    let tr = s3.find_element("transposition").unwrap();
    let transpositions = ClassSet::conjugacy_closure(&s3, &[tr]).unwrap();
    out.push((
        "dim F(k) = 3^k for transpositions in S3",
        build_hurwitz_system(&transpositions, tr, 4).is_ok_and(|s| s.ranks() == [1, 3, 9, 27, 81]),
    ));
    out.push((
        "one orbit on c^k for a central class",
        h0_table(&central, 1, 0..=6).is_ok_and(|h| h.rows.iter().all(|r| r.orbits == 1)),
    ));
    out.push((
        "orbits of transpositions on c^1",
        h0_table(&transpositions, tr, 1..=1).is_ok_and(|h| h.rows[0].orbits == 3),
    ));
    let model = default_model().build().unwrap();
    out.push((
        "identity morphism acts trivially",
        model.act(&LabeledInjection::identity(3), &[1, 2, 0]).is_ok_and(|s| s == [1, 2, 0]),
    ));
    let blank = LabeledInjection::new(1, 2, vec![None]).unwrap();
    out.push(("blank strands take the basepoint", model.act(&blank, &[1, 2]).is_ok_and(|s| s == [0])));
    let phi = LabeledInjection::new(1, 2, vec![Some((1, 1))]).unwrap();
    out.push((
        "identity is a unit for composition",
        model.compose(&LabeledInjection::identity(2), &phi).is_ok_and(|c| c == phi),
    ));
    let empty = stability_table(
        &central,
        1,
        &StabilityOptions {
            i_max: -1,
            k_max: 3,
            coefficient: Coefficient::Z,
            max_entries: 1 << 20,
        },
        None,
    );
    out.push((
        "empty grid carries only hypothesis flags",
        empty.is_ok_and(|r| r.homology.is_empty() && r.hypotheses.singleton),
    ));
    out
}

fn run_selftest(_ctx: &Context) -> Outcome<Output> {
    let checks = selftest_checks();
    let mut tsv = String::new();
    for (name, ok) in &checks {
        writeln!(tsv, "{}\t{name}", if *ok { "ok" } else { "FAIL" }).unwrap();
    }
    let passed = checks.iter().all(|(_, ok)| *ok);
    let result = checks
        .iter()
        .map(|(name, ok)| json!({ "check": name, "passed": ok }))
        .collect();
    Ok(Output {
        config: json!({}),
        tsv,
        result: Value::Array(result),
        passed,
    })
}

fn render(command: Command, out: &Output, format: Format) -> String {
    match format {
        Format::Json => {
            let doc = json!({
                "tool": "hurstab",
                "version": VERSION,
                "model_version": MODEL_VERSION,
                "command": command.name(),
                "config": out.config,
                "passed": out.passed,
                "result": out.result,
            });
            let mut s = serde_json::to_string_pretty(&doc).unwrap();
            s.push('\n');
            s
        }
        Format::Tsv => format!(
            "# hurstab {VERSION} {}\n# config {}\n{}",
            command.name(),
            out.config,
            out.tsv
        ),
    }
}

fn run(cli: Cli) -> Outcome<bool> {
    let file = cli.runtime.config.as_ref().map(read_json::<Settings>).transpose()?;
    let settings = merge(&cli.settings, file);
    if let Some(w) = cli.runtime.workers {
        if w == 0 {
            return Err(usage("--workers must be positive"));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(w)
            .build_global()
            .map_err(|e| invalid(e.to_string()))?;
    }
    let cache = if cli.runtime.no_cache || cli.command != Command::Stability {
        None
    } else {
        let root = DiskCache::default_root();
        Some(DiskCache::open(&root).map_err(|e| Failure::Io(format!("cache {}: {e}", root.display())))?)
    };
    let ctx = Context { settings, cache };
    let out = match cli.command {
        Command::Orbits => run_orbits(&ctx)?,
        Command::Homology => run_homology(&ctx)?,
        Command::Stability => run_stability(&ctx)?,
        Command::Degree => run_degree(&ctx)?,
        Command::MonodromyCheck => run_monodromy(&ctx)?,
        Command::Selftest => run_selftest(&ctx)?,
    };
    let text = render(cli.command, &out, cli.runtime.format);
    match &cli.runtime.out {
        Some(path) => std::fs::write(path, text).map_err(|e| Failure::Io(format!("{}: {e}", path.display())))?,
        None => std::io::stdout()
            .write_all(text.as_bytes())
            .map_err(|e| Failure::Io(e.to_string()))?,
    }
    Ok(out.passed)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 64 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(2),
        Err(f) => {
            eprintln!("hurstab: {}", f.message());
            ExitCode::from(f.code())
        }
    }
}
