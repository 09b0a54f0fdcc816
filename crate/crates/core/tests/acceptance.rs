//! Acceptance report: one PASS/FAIL line per criterion. All comparisons are
//! exact; the only tolerances are the wall-clock limits below.

mod common;

use std::collections::BTreeSet;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use conductor_core::corpus::Corpus;
use conductor_core::filtration;
use conductor_core::global;
use conductor_core::group::{GroupSpec, Subgroup};
use conductor_core::rational::{self, Rational};
use conductor_core::sharpness;
use conductor_core::suite::{self, Case, Outcome, Suite, SuiteRun};
use conductor_core::wd::{self, AbVarDatum, PairQuantities, WdRep};

const SEED: u64 = 20_240_601;
const STEP_IDENTITY_LIMIT: Duration = Duration::from_secs(60);
const SHARPNESS_LIMIT: Duration = Duration::from_secs(5);

type Verdict = Result<String, String>;
type Criterion<'a> = (&'static str, Box<dyn Fn() -> Verdict + 'a>);

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        if !$cond {
            return Err(format!($($msg)+));
        }
    };
}

fn int(n: u64) -> Rational {
    rational::int(n as i64)
}

fn clean(run: &SuiteRun, at_least: usize) -> Result<(), String> {
    if let Some(bad) = run.failures().next() {
        return Err(format!(
            "{}: item {} (seed {:?}) failed: {}",
            run.suite,
            bad.index,
            bad.seed,
            serde_json::to_string(&bad.counterexample()).unwrap()
        ));
    }
    ensure!(
        run.outcomes.len() >= at_least,
        "{}: only {} evaluated items ({} skipped), need {at_least}",
        run.suite,
        run.outcomes.len(),
        run.skipped
    );
    Ok(())
}

fn pinned(corpus: &Corpus, name: &str) -> Result<Outcome, String> {
    let p = corpus.pinned.iter().find(|p| p.name == name).ok_or(format!("no pinned case `{name}`"))?;
    Ok(suite::run_case(0, None, Some(p.name.clone()), p.case.clone(), p.expect.clone()))
}

fn tight(o: &Outcome, value: u64) -> Result<(), String> {
    ensure!(o.passed(), "{:?} failed: {:?}", o.name, o.checks);
    let first = &o.checks[0];
    ensure!(
        first.lhs == int(value) && first.rhs == int(value),
        "{:?}: lhs {} rhs {}, expected {value}",
        o.name,
        first.lhs,
        first.rhs
    );
    Ok(())
}

fn step_identity(corpus: &Corpus) -> Verdict {
    let start = Instant::now();
    let run = suite::run_suite(Suite::Lemma25, corpus, 1000, SEED);
    let elapsed = start.elapsed();
    clean(&run, 1000)?;
    let groups: BTreeSet<String> = run
        .outcomes
        .iter()
        .filter_map(|o| match &o.case {
            Case::Lemma25 { model, .. } => Some(model.group.to_string()),
            _ => None,
        })
        .collect();
    for g in ["C4", "C8", "C9", "Q8", "D4", "Heis(3)", "Aff(5)", "C3^2"] {
        ensure!(groups.contains(g), "no step-identity case on {g}");
    }
    tight(&pinned(corpus, "q8 step identity at the center")?, 8)?;
    ensure!(elapsed <= STEP_IDENTITY_LIMIT, "took {elapsed:.1?}");
    Ok(format!("{} tuples over {} groups, {elapsed:.2?}", run.outcomes.len(), groups.len()))
}

fn symplectic_bound(corpus: &Corpus) -> Verdict {
    let run = suite::run_suite(Suite::Prop27, corpus, 500, SEED);
    clean(&run, 500)?;
    tight(&pinned(corpus, "q8 symplectic bound is tight")?, 3)?;
    // the same instance built from scratch: the 2-dimensional character twice
    let e = corpus.entry("q8-center").ok_or("no q8-center")?;
    let t = e.model.table();
    let two = t.degrees().iter().position(|&d| d == 2).ok_or("no degree-2 character")?;
    let mut mults = vec![0; t.len()];
    mults[two] = 1;
    let chi = conductor_core::character::Character::from_multiplicities(t, &mults).map_err(|e| e.to_string())?;
    let s = filtration::bound_symplectic(&chi, &chi, e.model.filtration(), t).map_err(|e| e.to_string())?;
    ensure!(s.lhs == int(3) && s.rhs == int(3), "Q8 instance gives {} <= {}", s.lhs, s.rhs);
    Ok(format!("{} pairs; Q8 instance 3 = 3", run.outcomes.len()))
}

fn pgroup_bound(corpus: &Corpus) -> Verdict {
    let run = suite::run_suite(Suite::Prop210, corpus, 500, SEED);
    clean(&run, 500)?;
    let mut primes = BTreeSet::new();
    for o in &run.outcomes {
        if let Case::Prop210 { model, .. } = &o.case {
            primes.insert(model.group().map_err(|e| e.to_string())?.prime_power_order().map(|(q, _)| q));
        }
    }
    ensure!(primes == [Some(2), Some(3), Some(5)].into_iter().collect(), "primes seen: {primes:?}");
    tight(&pinned(corpus, "c3 rational bound is tight")?, 2)?;
    Ok(format!("{} pairs over p in {{2, 3, 5}}; C3 instance 2 = 2", run.outcomes.len()))
}

fn codimension_gaps(corpus: &Corpus) -> Verdict {
    let parity = suite::run_suite(Suite::Lemma28, corpus, 500, SEED);
    clean(&parity, 1)?;
    let gap = suite::run_suite(Suite::Lemma211, corpus, 500, SEED);
    clean(&gap, 1)?;
    Ok(format!(
        "{} parity checks over {} characters, {} gap checks over {} characters, no violations",
        parity.checks(),
        parity.outcomes.len(),
        gap.checks(),
        gap.outcomes.len()
    ))
}

fn block_conductors(corpus: &Corpus) -> Verdict {
    let mut sigmas = 0;
    let mut closed = 0;
    for e in &corpus.entries {
        let t = e.model.table();
        let f = e.model.filtration();
        let whole = Subgroup::whole(e.group());
        let irr = t.irreducibles();
        for chi in &irr {
            let one = WdRep::block(&e.model, chi.clone(), 1).map_err(|e| e.to_string())?;
            let a = filtration::artin(chi, f).map_err(|e| e.to_string())?;
            ensure!(one.artin_conductor().map_err(|e| e.to_string())? == a, "{}: a(sigma x sp(1))", e.name);
            sigmas += 1;
        }
        // sum of all irreducibles, so every block sees every constituent
        let sigma = irr
            .iter()
            .skip(1)
            .try_fold(irr[0].clone(), |acc, c| acc.dsum(c))
            .map_err(|e| e.to_string())?;
        let a = filtration::artin(&sigma, f).map_err(|e| e.to_string())?;
        let fixed = sigma.fixed_dim(&whole).map_err(|e| e.to_string())?;
        for n in 1..=12u32 {
            let rn = WdRep::block(&e.model, sigma.clone(), n).map_err(|e| e.to_string())?;
            for m in 1..=12u32 {
                let rm = WdRep::block(&e.model, conductor_core::character::Character::trivial(e.group()), m)
                    .map_err(|e| e.to_string())?;
                let lhs = rn.tensor(&rm).map_err(|e| e.to_string())?.artin_conductor().map_err(|e| e.to_string())?;
                let nm = u64::from(n * m);
                let expected = int(nm) * &a + int(fixed * (nm - u64::from(n.min(m))));
                ensure!(lhs == expected, "{}: n={n} m={m}: {lhs} != {expected}", e.name);
                let sides = wd::special_tensor_sides(&e.model, &sigma, n, m).map_err(|e| e.to_string())?;
                ensure!(sides.lhs == sides.rhs && sides.rhs == expected, "{}: n={n} m={m} closed form", e.name);
                closed += 1;
            }
        }
    }
    for n in 1..=12u32 {
        for m in 1..=12u32 {
            let k = wd::clebsch_gordan(n, m);
            ensure!(k.iter().sum::<u32>() == n * m, "sum of blocks for ({n}, {m})");
            ensure!(k.len() as u32 == n.min(m), "block count for ({n}, {m})");
        }
    }
    Ok(format!("{sigmas} irreducible sigma, {closed} closed-form pairs, 144 block decompositions"))
}

fn semistable(corpus: &Corpus) -> Verdict {
    let run = suite::run_suite(Suite::SemistableEquality, corpus, 250, SEED);
    clean(&run, 200)?;
    let mut good = 0;
    for o in &run.outcomes {
        let Case::SemistableEquality { model, b, .. } = &o.case else {
            continue;
        };
        let m = model.model().map_err(|e| e.to_string())?;
        let da = AbVarDatum::semistable(&m, 2, 0).map_err(|e| e.to_string())?;
        let db = b.datum(&m).map_err(|e| e.to_string())?;
        let q = PairQuantities::new(&da, &db).map_err(|e| e.to_string())?;
        let a_b = db.rho().artin_conductor().map_err(|e| e.to_string())?;
        ensure!(q.a_ab == int(2) * &a_b, "good reduction on {:?}: {} != 2 * {}", m.group().spec(), q.a_ab, a_b);
        good += 1;
    }
    tight(&pinned(corpus, "semistable square")?, 2)?;
    Ok(format!("{} pairs, {good} good-reduction pairs", run.outcomes.len()))
}

fn pair_bounds(corpus: &Corpus) -> Verdict {
    let mut parts = Vec::new();
    for s in [Suite::SwanBound, Suite::TameIdentity, Suite::MainBound, Suite::SimplifiedBound, Suite::DegreeGap] {
        let run = suite::run_suite(s, corpus, 600, SEED);
        clean(&run, 500)?;
        parts.push(format!("{s} {}", run.outcomes.len()));
    }
    Ok(parts.join(", "))
}

fn sharpness_family() -> Verdict {
    let start = Instant::now();
    let reports = sharpness::sweep(13).map_err(|e| e.to_string())?;
    let elapsed = start.elapsed();
    let primes: Vec<u64> = reports.iter().map(|r| r.p).collect();
    ensure!(primes == vec![3, 5, 7, 11, 13], "primes {primes:?}");
    for r in &reports {
        let p = r.p;
        ensure!(r.a == sharpness::smallest_valid_a(p).map_err(|e| e.to_string())?, "p={p}: a={}", r.a);
        ensure!(r.sw_a == 1 && r.sw_p == p, "p={p}: Sw {} {}", r.sw_a, r.sw_p);
        ensure!(r.sw_tensor == int(p * (p - 1)), "p={p}: Sw(tensor) {}", r.sw_tensor);
        ensure!(r.a_tensor == int((2 * p - 1) * (p - 1)), "p={p}: a(tensor) {}", r.a_tensor);
        ensure!(r.sw_tensor == r.swan_bound_rhs, "p={p}: Swan bound not attained");
        ensure!(r.a_tensor == r.artin_bound_rhs, "p={p}: conductor bound not attained");
        ensure!(r.equal, "p={p}: report not flagged sharp");
    }
    ensure!(reports[0].a_tensor == int(10), "p=3 conductor {}", reports[0].a_tensor);
    ensure!(elapsed <= SHARPNESS_LIMIT, "took {elapsed:.1?}");
    Ok(format!("p in {primes:?}, {elapsed:.2?}"))
}

fn discriminants() -> Verdict {
    let mut tested = 0;
    for p in [3u64, 5, 7, 11, 13] {
        let pi = p as i64;
        let mut alphas: Vec<i64> = (1..=30).filter(|a| a % pi != 0).collect();
        alphas.extend([pi, 2 * pi, pi * pi, -pi, 3 * pi * pi * pi]);
        for alpha in alphas {
            let v = sharpness::disc_valuation(p, alpha).map_err(|e| e.to_string())?;
            let mut rest = alpha.unsigned_abs();
            let mut vp = 0;
            while rest % p == 0 {
                rest /= p;
                vp += 1;
            }
            ensure!(u64::from(v) == p + (p - 1) * vp, "p={p} alpha={alpha}: v={v}");
            tested += 1;
        }
        // elimination oracle on a few small instances
        if p <= 7 {
            for alpha in [2i64, pi, 3 * pi] {
                ensure!(
                    sharpness::disc_valuation(p, alpha).map_err(|e| e.to_string())? == common::disc_valuation_oracle(p, alpha),
                    "p={p} alpha={alpha}: elimination oracle disagrees"
                );
            }
        }
        let a = sharpness::smallest_valid_a(p).map_err(|e| e.to_string())?;
        let params = sharpness::validate_params(p, a).map_err(|e| e.to_string())?;
        for alpha in [a, pi] {
            let (model, chi) = sharpness::filtration_model_single(&params, alpha).map_err(|e| e.to_string())?;
            let by_filtration = filtration::swan(&chi, model.filtration()).map_err(|e| e.to_string())?;
            let by_disc = sharpness::swan_jacobian(&params, alpha).map_err(|e| e.to_string())?;
            ensure!(by_filtration == int(by_disc), "p={p} alpha={alpha}: {by_filtration} != {by_disc}");
        }
    }
    Ok(format!("{tested} (p, alpha) pairs; both Swan paths agree for all five primes"))
}

fn tables() -> Verdict {
    for n in 1..=12u64 {
        let spec = GroupSpec::Cyclic { n };
        common::orthogonality(&spec)?;
        ensure!(common::degree_multiset(&spec) == vec![1; n as usize], "C{n} degrees");
    }
    for (spec, degrees) in [
        (GroupSpec::Affine { p: 3 }, vec![1, 1, 2]),
        (GroupSpec::Quaternion8, vec![1, 1, 1, 1, 2]),
        (GroupSpec::Dihedral { n: 4 }, vec![1, 1, 1, 1, 2]),
    ] {
        common::orthogonality(&spec)?;
        ensure!(common::degree_multiset(&spec) == degrees, "{spec} degrees");
    }
    common::s3_matrix_oracle()?;
    common::q8_matrix_oracle()?;
    Ok("S3, Q8, D4, C1..C12 orthogonal; S3 and Q8 match explicit matrices".into())
}

fn global_bounds(corpus: &Corpus) -> Verdict {
    let run = suite::run_suite(Suite::Global, corpus, 120, SEED);
    clean(&run, 100)?;
    let mut ramified = 0;
    for o in &run.outcomes {
        let Case::Global { datum } = &o.case else {
            continue;
        };
        let report = global::evaluate(datum).map_err(|e| e.to_string())?;
        ensure!(report.all_pass, "item {} reports a failing prime", o.index);
        if !report.conductor_a.is_one() || !report.conductor_b.is_one() {
            ramified += 1;
        }
    }
    ensure!(ramified >= 100, "only {ramified} data sets with ramification");
    Ok(format!("{} data sets, {ramified} ramified, {} checks", run.outcomes.len(), run.checks()))
}

fn main() -> ExitCode {
    let corpus = Corpus::shipped();
    let criteria: Vec<Criterion> = vec![
        ("step identity", Box::new(|| step_identity(&corpus))),
        ("symplectic tensor bound", Box::new(|| symplectic_bound(&corpus))),
        ("p-group tensor bound", Box::new(|| pgroup_bound(&corpus))),
        ("codimension parity and gap", Box::new(|| codimension_gaps(&corpus))),
        ("block conductors", Box::new(|| block_conductors(&corpus))),
        ("semistable equality", Box::new(|| semistable(&corpus))),
        ("pair bounds", Box::new(|| pair_bounds(&corpus))),
        ("sharpness family", Box::new(sharpness_family)),
        ("discriminant valuations", Box::new(discriminants)),
        ("character tables", Box::new(tables)),
        ("global bounds", Box::new(|| global_bounds(&corpus))),
    ];
    let mut failed = 0;
    for (k, (name, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let result = check();
        let t = start.elapsed();
        match result {
            Ok(detail) => println!("[{:>2}] PASS {name}: {detail} ({t:.2?})", k + 1),
            Err(why) => {
                failed += 1;
                println!("[{:>2}] FAIL {name}: {why} ({t:.2?})", k + 1);
            }
        }
    }
    println!("acceptance: {} of {} criteria pass", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
