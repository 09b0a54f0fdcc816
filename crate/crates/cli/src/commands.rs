use std::fs;
use std::path::Path;
use std::sync::Arc;

use conductor_core::character::character_table;
use conductor_core::corpus::Corpus;
use conductor_core::global::{self, FactoredInteger, GlobalDatum, PrimeRecord};
use conductor_core::group::build_group;
use conductor_core::rational::{self, Rational};
use conductor_core::schema::{AbVarDoc, FiltrationDoc, LocalPairDoc};
use conductor_core::sharpness::{self, SharpnessReport};
use conductor_core::suite::{self, Counterexample, Outcome, Relation, Suite, Verdict};
use rayon::ThreadPool;
use conductor_core::wd::{AbVarDatum, InertiaModel, PairQuantities};
use serde::Serialize;

use crate::input::{load_doc, read_text};
use crate::output::Sink;
use crate::{groups, CliError, Command, SharpnessArgs, Status, VerifyArgs};

type Result<T> = std::result::Result<T, CliError>;

pub(crate) fn dispatch(cmd: &Command, sink: &mut Sink, pool: &ThreadPool) -> Result<Status> {
    match cmd {
        Command::Verify(args) => verify(args, sink, pool),
        Command::Replay { path } => replay(path, sink),
        Command::Bound { path } => bound(path, sink),
        Command::Global { path } => global_cmd(path, sink),
        Command::Sharpness(args) => sharpness_cmd(args, sink, pool),
        Command::Table { group } => table(group, sink),
    }
}

fn status(ok: bool) -> Status {
    if ok {
        Status::Pass
    } else {
        Status::Violation
    }
}

/// Human form: integers without a denominator.
fn text(q: &Rational) -> String {
    q.to_string()
}

fn relation(r: Relation) -> &'static str {
    match r {
        Relation::Equal => "=",
        Relation::AtMost => "<=",
        Relation::AtLeast => ">=",
        Relation::ZeroOrAtLeast => "= 0 or >=",
    }
}

fn verdict_word(v: &Verdict) -> &'static str {
    match v {
        Verdict::Pass => "pass",
        Verdict::Fail => "FAIL",
        Verdict::Error { .. } => "ERROR",
    }
}

fn load_corpus(path: Option<&Path>) -> Result<Corpus> {
    match path {
        None => Ok(Corpus::shipped()),
        Some(p) => {
            let text = read_text(p)?;
            Corpus::from_json(&text).map_err(|e| CliError::input(format!("{}: {e}", p.display())))
        }
    }
}

#[derive(Serialize)]
struct SuiteSummary {
    record: &'static str,
    suite: Suite,
    base_seed: u64,
    requested: usize,
    evaluated: usize,
    skipped: usize,
    passed: usize,
    checks: usize,
}

#[derive(Serialize)]
struct Tagged<'a, T: Serialize> {
    record: &'static str,
    #[serde(flatten)]
    body: &'a T,
}

fn describe_failure(o: &Outcome) -> String {
    let who = match (&o.name, o.seed) {
        (Some(n), _) => format!("`{n}`"),
        (None, Some(s)) => format!("item {} (seed {s})", o.index),
        (None, None) => format!("item {}", o.index),
    };
    let mut lines = vec![format!("  {} {} {who}", verdict_word(&o.verdict), o.case.suite())];
    if let Verdict::Error { message } = &o.verdict {
        lines.push(format!("    error: {message}"));
    }
    for c in o.checks.iter().filter(|c| !c.holds) {
        lines.push(format!("    {}: {} {} {} does not hold", c.label, text(&c.lhs), relation(c.relation), text(&c.rhs)));
    }
    lines.push(format!(
        "    counterexample: {}",
        serde_json::to_string(&o.counterexample()).expect("outcomes serialize")
    ));
    lines.join("\n")
}

fn dump(dir: &Path, stem: &str, o: &Outcome) -> Result<()> {
    fs::create_dir_all(dir)?;
    let body = serde_json::to_string_pretty(&o.counterexample()).expect("outcomes serialize");
    fs::write(dir.join(format!("{stem}.json")), body + "\n")?;
    Ok(())
}

fn report_failures<'o>(
    sink: &mut Sink,
    dir: Option<&Path>,
    prefix: &str,
    outcomes: impl Iterator<Item = &'o Outcome>,
) -> Result<usize> {
    let mut n = 0;
    for o in outcomes.filter(|o| !o.passed()) {
        n += 1;
        let ce = o.counterexample();
        sink.record(&Tagged { record: "counterexample", body: &ce }, || describe_failure(o))?;
        if let Some(d) = dir {
            dump(d, &format!("{prefix}-{}-{}", o.case.suite(), o.index), o)?;
        }
    }
    Ok(n)
}

fn verify(args: &VerifyArgs, sink: &mut Sink, pool: &ThreadPool) -> Result<Status> {
    let corpus = load_corpus(args.corpus.as_deref())?;
    let suites: Vec<Suite> = if args.suites.is_empty() {
        Suite::ALL.to_vec()
    } else {
        args.suites.clone()
    };
    let mut failures = 0;
    for &s in &suites {
        let run = pool.install(|| suite::run_suite(s, &corpus, args.seeds, args.seed));
        let summary = SuiteSummary {
            record: "suite",
            suite: s,
            base_seed: run.base_seed,
            requested: run.requested,
            evaluated: run.outcomes.len(),
            skipped: run.skipped,
            passed: run.passed(),
            checks: run.checks(),
        };
        sink.record(&summary, || {
            format!(
                "{:<20} {:>6} items {:>5} skipped {:>6} passed {:>8} checks",
                s.name(),
                summary.evaluated,
                summary.skipped,
                summary.passed,
                summary.checks
            )
        })?;
        failures += report_failures(sink, args.dump.as_deref(), "seeded", run.outcomes.iter())?;
    }
    if !args.no_pinned {
        let mut pinned: Vec<Outcome> = Vec::new();
        for &s in &suites {
            pinned.extend(pool.install(|| suite::run_pinned(&corpus, Some(s))));
        }
        pinned.sort_by_key(|o| o.index);
        let passed = pinned.iter().filter(|o| o.passed()).count();
        #[derive(Serialize)]
        struct PinnedSummary {
            record: &'static str,
            cases: usize,
            passed: usize,
        }
        sink.record(&PinnedSummary { record: "pinned", cases: pinned.len(), passed }, || {
            format!("{:<20} {:>6} cases {:>19} passed", "pinned", pinned.len(), passed)
        })?;
        failures += report_failures(sink, args.dump.as_deref(), "pinned", pinned.iter())?;
    }
    sink.note(if failures == 0 {
        "all checks hold".to_string()
    } else {
        format!("{failures} failing case(s)")
    })?;
    Ok(status(failures == 0))
}

fn replay(path: &Path, sink: &mut Sink) -> Result<Status> {
    let doc: Counterexample = load_doc(path)?;
    let o = suite::replay(&doc).map_err(CliError::input)?;
    let same = o.verdict == doc.outcome.verdict && o.checks == doc.outcome.checks;
    #[derive(Serialize)]
    struct Replayed<'a> {
        record: &'static str,
        reproduced: bool,
        #[serde(flatten)]
        outcome: &'a Outcome,
    }
    sink.record(&Replayed { record: "replay", reproduced: same, outcome: &o }, || {
        let mut lines = vec![format!(
            "{} {}: {}{}",
            o.case.suite(),
            o.name.clone().unwrap_or_else(|| format!("item {}", o.index)),
            verdict_word(&o.verdict),
            if same { " (reproduced)" } else { " (differs from the recorded outcome)" }
        )];
        if let Verdict::Error { message } = &o.verdict {
            lines.push(format!("  error: {message}"));
        }
        for c in &o.checks {
            lines.push(format!(
                "  [{}] {}: {} {} {}",
                if c.holds { "ok" } else { "FAIL" },
                c.label,
                text(&c.lhs),
                relation(c.relation),
                text(&c.rhs)
            ));
        }
        lines.join("\n")
    })?;
    Ok(status(o.passed()))
}

fn model_of(doc: &FiltrationDoc, field: &str) -> Result<Arc<InertiaModel>> {
    doc.model().map_err(|e| CliError::input(format!("{field}: {e}")))
}

fn datum(model: &Arc<InertiaModel>, doc: &AbVarDoc, field: &str) -> Result<AbVarDatum> {
    let n = model.table().len();
    for (name, v) in [("tau", &doc.tau), ("sigma", &doc.sigma)] {
        if v.len() != n {
            return Err(CliError::input(format!(
                "{field}.{name}: expected {n} multiplicities (one per irreducible character), got {}",
                v.len()
            )));
        }
    }
    doc.datum(model).map_err(|e| CliError::input(format!("{field}: {e}")))
}

#[derive(Serialize)]
struct DegreeTerms {
    #[serde(rename = "deg_A")]
    deg_a: u64,
    #[serde(rename = "deg_B")]
    deg_b: u64,
    #[serde(rename = "deg_AB")]
    deg_ab: u64,
    /// `deg(A x B) - deg(A) deg(B)`.
    excess: u64,
    /// `dim - deg` of each side.
    #[serde(rename = "tame_A")]
    tame_a: u64,
    #[serde(rename = "tame_B")]
    tame_b: u64,
}

#[derive(Serialize)]
struct BoundReport {
    #[serde(rename = "a_A", with = "rational::serde_text")]
    a_a: Rational,
    #[serde(rename = "a_B", with = "rational::serde_text")]
    a_b: Rational,
    #[serde(rename = "sw_A", with = "rational::serde_text")]
    sw_a: Rational,
    #[serde(rename = "sw_B", with = "rational::serde_text")]
    sw_b: Rational,
    #[serde(rename = "dim_A")]
    dim_a: u64,
    #[serde(rename = "dim_B")]
    dim_b: u64,
    #[serde(rename = "sw_AB", with = "rational::serde_text")]
    sw_ab: Rational,
    #[serde(with = "rational::serde_text")]
    swan_rhs: Rational,
    /// `a(rho_A x rho_B)`.
    #[serde(with = "rational::serde_text")]
    lhs: Rational,
    #[serde(with = "rational::serde_text")]
    rhs_main: Rational,
    #[serde(with = "rational::serde_text")]
    rhs_uniform: Rational,
    #[serde(with = "rational::serde_text_opt", skip_serializing_if = "Option::is_none")]
    rhs_exact: Option<Rational>,
    #[serde(rename = "C_p")]
    c_p: u64,
    deg_terms: DegreeTerms,
    holds: bool,
}

fn bound(path: &Path, sink: &mut Sink) -> Result<Status> {
    let doc: LocalPairDoc = load_doc(path)?;
    let model = model_of(&doc.model, "model")?;
    let a = datum(&model, &doc.a, "A")?;
    let b = datum(&model, &doc.b, "B")?;
    let werr = |e: conductor_core::wd::WdError| CliError::input(e.to_string());
    let q = PairQuantities::new(&a, &b).map_err(werr)?;
    let main = q.main_bound().map_err(werr)?;
    let uniform = q.simplified_bound().map_err(werr)?;
    let swan = q.swan_bound();
    let holds = swan.lhs <= swan.rhs
        && main.lhs <= main.rhs
        && uniform.lhs <= uniform.rhs
        && main.exact_rhs.as_ref().is_none_or(|x| *x == main.lhs);
    let report = BoundReport {
        a_a: q.a_a.clone(),
        a_b: q.a_b.clone(),
        sw_a: q.sw_a.clone(),
        sw_b: q.sw_b.clone(),
        dim_a: q.dim_a,
        dim_b: q.dim_b,
        sw_ab: q.sw_ab.clone(),
        swan_rhs: swan.rhs,
        lhs: main.lhs.clone(),
        rhs_main: main.rhs.clone(),
        rhs_uniform: uniform.rhs.clone(),
        rhs_exact: main.exact_rhs.clone(),
        c_p: main.c_p,
        deg_terms: DegreeTerms {
            deg_a: q.deg_a,
            deg_b: q.deg_b,
            deg_ab: q.deg_ab,
            excess: q.degree_excess().map_err(werr)?,
            tame_a: q.dim_a - q.deg_a,
            tame_b: q.dim_b - q.deg_b,
        },
        holds,
    };
    sink.record(&report, || {
        let r = &report;
        let mut lines = vec![
            format!("p = {}   dim A = {}   dim B = {}", q.p, r.dim_a, r.dim_b),
            format!("a(A) = {}   a(B) = {}", text(&r.a_a), text(&r.a_b)),
            format!("Sw(A) = {}   Sw(B) = {}", text(&r.sw_a), text(&r.sw_b)),
            format!("Sw(A x B) = {} <= {}", text(&r.sw_ab), text(&r.swan_rhs)),
            format!("a(A x B) = {}", text(&r.lhs)),
            format!("  main bound      {}   (C_p = {})", text(&r.rhs_main), r.c_p),
            format!("  uniform bound   {}", text(&r.rhs_uniform)),
        ];
        if let Some(x) = &r.rhs_exact {
            lines.push(format!("  exact value     {}", text(x)));
        }
        let d = &r.deg_terms;
        lines.push(format!(
            "deg(A) = {}   deg(B) = {}   deg(A x B) = {}   excess = {}",
            d.deg_a, d.deg_b, d.deg_ab, d.excess
        ));
        lines.push(if r.holds { "all bounds hold".into() } else { "BOUND VIOLATED".into() });
        lines.join("\n")
    })?;
    Ok(status(holds))
}

#[derive(Serialize)]
struct PrimeLine {
    p: u64,
    bound_exponent: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    local_exponent: Option<u64>,
    self_bound_exponent: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    self_local_exponent: Option<u64>,
    verdict: &'static str,
}

#[derive(Serialize)]
struct GlobalOut {
    #[serde(rename = "conductor_A")]
    conductor_a: FactoredInteger,
    #[serde(rename = "conductor_B")]
    conductor_b: FactoredInteger,
    bound: FactoredInteger,
    /// `bound` as a decimal integer.
    bound_value: String,
    d_term: FactoredInteger,
    self_bound: FactoredInteger,
    per_prime_check: Vec<PrimeLine>,
    all_pass: bool,
}

fn global_cmd(path: &Path, sink: &mut Sink) -> Result<Status> {
    let doc: GlobalDatum = load_doc(path)?;
    // full-mode records first, so that their errors name the record
    for (k, rec) in doc.primes.iter().enumerate() {
        if let PrimeRecord::Full { p, model, a, b } = rec {
            let mut model = model.clone();
            if model.p.is_some_and(|q| q != *p) {
                return Err(CliError::input(format!("primes[{k}].model.p: differs from primes[{k}].p = {p}")));
            }
            model.p = Some(*p);
            let m = model_of(&model, &format!("primes[{k}].model"))?;
            datum(&m, a, &format!("primes[{k}].A"))?;
            datum(&m, b, &format!("primes[{k}].B"))?;
        }
    }
    let report = global::evaluate(&doc).map_err(|e| CliError::input(e.to_string()))?;
    let out = GlobalOut {
        conductor_a: report.conductor_a.clone(),
        conductor_b: report.conductor_b.clone(),
        bound_value: report.bound.value().to_string(),
        bound: report.bound.clone(),
        d_term: report.d_term.clone(),
        self_bound: report.self_bound.clone(),
        per_prime_check: report
            .per_prime
            .iter()
            .map(|c| PrimeLine {
                p: c.p,
                bound_exponent: c.bound_exponent,
                local_exponent: c.local_exponent,
                self_bound_exponent: c.self_bound_exponent,
                self_local_exponent: c.self_local_exponent,
                verdict: if c.pass { "pass" } else { "fail" },
            })
            .collect(),
        all_pass: report.all_pass,
    };
    sink.record(&out, || {
        let mut lines = vec![
            format!("N(A) = {}   N(B) = {}", out.conductor_a, out.conductor_b),
            format!("bound = {} = {}", out.bound, out.bound_value),
            format!("d term = {}   self bound = {}", out.d_term, out.self_bound),
        ];
        for c in &out.per_prime_check {
            let local = |x: Option<u64>| x.map_or("-".to_string(), |v| v.to_string());
            lines.push(format!(
                "  p = {:<5} a(A x B) {:>4} <= {:<4}  a(A x A) {:>4} <= {:<4}  {}",
                c.p,
                local(c.local_exponent),
                c.bound_exponent,
                local(c.self_local_exponent),
                c.self_bound_exponent,
                c.verdict
            ));
        }
        lines.join("\n")
    })?;
    Ok(status(report.all_pass))
}

fn sharpness_line(r: &SharpnessReport) -> String {
    format!(
        "{:>4} {:>4} {:>6} {:>6} {:>10} {:>10} {:>10} {:>10}  {}",
        r.p,
        r.a,
        r.sw_a,
        r.sw_p,
        text(&r.sw_tensor),
        text(&r.a_tensor),
        text(&r.swan_bound_rhs),
        text(&r.artin_bound_rhs),
        r.equal
    )
}

fn sharpness_cmd(args: &SharpnessArgs, sink: &mut Sink, pool: &ThreadPool) -> Result<Status> {
    let serr = |e: sharpness::SharpnessError| CliError::input(e.to_string());
    let reports = match (args.p, args.max_p) {
        (Some(p), _) => {
            let a = match args.a {
                Some(a) => a,
                None => sharpness::smallest_valid_a(p).map_err(serr)?,
            };
            let params = sharpness::validate_params(p, a).map_err(serr)?;
            vec![sharpness::verify_sharpness(&params).map_err(serr)?]
        }
        (None, Some(max)) => pool.install(|| sharpness::sweep(max)).map_err(serr)?,
        (None, None) => return Err(CliError::input("one of --p or --max-p is required")),
    };
    sink.note(format!(
        "{:>4} {:>4} {:>6} {:>6} {:>10} {:>10} {:>10} {:>10}  {}",
        "p", "a", "Sw_a", "Sw_p", "Sw_tensor", "a_tensor", "swan_rhs", "artin_rhs", "equal"
    ))?;
    for r in &reports {
        sink.record(r, || sharpness_line(r))?;
    }
    Ok(status(reports.iter().all(|r| r.equal)))
}

#[derive(Serialize)]
struct ClassInfo {
    representative: String,
    size: usize,
    element_order: usize,
}

#[derive(Serialize)]
struct RowInfo {
    index: usize,
    degree: u64,
    indicator: i8,
    values: Vec<conductor_core::cyclo::CycloNum>,
}

#[derive(Serialize)]
struct TableOut {
    group: conductor_core::group::GroupSpec,
    order: usize,
    classes: Vec<ClassInfo>,
    characters: Vec<RowInfo>,
}

fn table(group: &str, sink: &mut Sink) -> Result<Status> {
    let spec = groups::parse_group(group).map_err(CliError::input)?;
    let g = build_group(&spec).map_err(|e| CliError::input(format!("group {spec}: {e}")))?;
    let t = character_table(&g).map_err(|e| CliError::input(format!("group {spec}: {e}")))?;
    let classes: Vec<ClassInfo> = (0..g.num_classes())
        .map(|c| ClassInfo {
            representative: g.label(g.class_rep(c)).to_string(),
            size: g.class_size(c),
            element_order: g.element_order(g.class_rep(c)),
        })
        .collect();
    let characters: Vec<RowInfo> = t
        .irreducibles()
        .into_iter()
        .enumerate()
        .map(|(i, chi)| RowInfo {
            index: i,
            degree: chi.dim(),
            indicator: t.indicator(i),
            values: chi.class_function().values().to_vec(),
        })
        .collect();
    let out = TableOut {
        group: spec.clone(),
        order: g.order(),
        classes,
        characters,
    };
    sink.record(&out, || {
        let cells: Vec<Vec<String>> = out
            .characters
            .iter()
            .map(|r| r.values.iter().map(|v| v.to_string()).collect())
            .collect();
        let mut widths: Vec<usize> = out.classes.iter().map(|c| c.representative.len()).collect();
        for row in &cells {
            for (w, c) in widths.iter_mut().zip(row) {
                *w = (*w).max(c.len());
            }
        }
        let line = |head: String, items: Vec<String>| {
            let body: Vec<String> = items.iter().zip(&widths).map(|(s, w)| format!("{s:>w$}")).collect();
            format!("{head:<14}{}", body.join("  "))
        };
        let mut lines = vec![format!("{spec}, order {}, {} classes", out.order, out.classes.len())];
        lines.push(line("class".into(), out.classes.iter().map(|c| c.representative.clone()).collect()));
        lines.push(line("size".into(), out.classes.iter().map(|c| c.size.to_string()).collect()));
        lines.push(line("order".into(), out.classes.iter().map(|c| c.element_order.to_string()).collect()));
        for (r, row) in out.characters.iter().zip(cells) {
            let ind = match r.indicator {
                1 => "+",
                -1 => "-",
                _ => "0",
            };
            lines.push(line(format!("X{} ({}{})", r.index, r.degree, ind), row));
        }
        lines.join("\n")
    })?;
    Ok(Status::Pass)
}
