//! Seeded verification suites, their self-contained cases, and replay.
//!
//! A [`Case`] carries everything needed to recompute it (group descriptor,
//! chain generators, multiplicity vectors), so a failing case serialized as
//! a [`Counterexample`] replays without the corpus.

use std::fmt;
use std::str::FromStr;

use num_traits::Zero;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::arith;
use crate::character::{Character, CharacterTable};
use crate::corpus::{Corpus, Entry};
use crate::filtration;
use crate::generate;
use crate::global::{self, GlobalDatum, PrimeRecord};
use crate::group::{subgroup_generated, Subgroup};
use crate::rational::{self, Rational};
use crate::schema::{AbVarDoc, ElementRef, FiltrationDoc};
use crate::sharpness;
use crate::wd::{self, AbVarDatum, PairQuantities, WdRep};

pub const COUNTEREXAMPLE_VERSION: u64 = 1;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Suite {
    Lemma25,
    Lemma26,
    Prop27,
    Prop210,
    Lemma28,
    Lemma211,
    BlockConductor,
    SpecialTensor,
    SemistableEquality,
    SwanBound,
    TameIdentity,
    MainBound,
    SimplifiedBound,
    DegreeGap,
    Global,
    Sharpness,
}

impl Suite {
    pub const ALL: [Suite; 16] = [
        Suite::Lemma25,
        Suite::Lemma26,
        Suite::Prop27,
        Suite::Prop210,
        Suite::Lemma28,
        Suite::Lemma211,
        Suite::BlockConductor,
        Suite::SpecialTensor,
        Suite::SemistableEquality,
        Suite::SwanBound,
        Suite::TameIdentity,
        Suite::MainBound,
        Suite::SimplifiedBound,
        Suite::DegreeGap,
        Suite::Global,
        Suite::Sharpness,
    ];

    pub fn name(self) -> String {
        serde_json::to_value(self)
            .ok()
            .and_then(|v| v.as_str().map(str::to_string))
            .expect("suite names serialize as strings")
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name())
    }
}

impl FromStr for Suite {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        serde_json::from_value(serde_json::Value::String(s.to_string())).map_err(|_| {
            let names: Vec<String> = Suite::ALL.iter().map(|s| s.name()).collect();
            format!("unknown suite `{s}` (expected one of {})", names.join(", "))
        })
    }
}

/// One input of one suite.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "suite", rename_all = "kebab-case")]
pub enum Case {
    Lemma25 {
        model: FiltrationDoc,
        tau1: Vec<u64>,
        tau2: Vec<u64>,
        i: usize,
    },
    Lemma26 {
        #[serde(with = "rational::serde_text")]
        m: Rational,
        #[serde(with = "rational::serde_text_vec")]
        a: Vec<Rational>,
        #[serde(with = "rational::serde_text_vec")]
        b: Vec<Rational>,
        #[serde(with = "rational::serde_text_vec")]
        d: Vec<Rational>,
    },
    Prop27 {
        model: FiltrationDoc,
        tau1: Vec<u64>,
        tau2: Vec<u64>,
    },
    Prop210 {
        model: FiltrationDoc,
        tau1: Vec<u64>,
        tau2: Vec<u64>,
    },
    Lemma28 {
        model: FiltrationDoc,
        tau: Vec<u64>,
        subgroups: Vec<Vec<ElementRef>>,
    },
    Lemma211 {
        model: FiltrationDoc,
        tau: Vec<u64>,
        subgroups: Vec<Vec<ElementRef>>,
    },
    BlockConductor {
        model: FiltrationDoc,
        sigma: Vec<u64>,
    },
    SpecialTensor {
        model: FiltrationDoc,
        sigma: Vec<u64>,
        n: u32,
        m: u32,
    },
    SemistableEquality {
        model: FiltrationDoc,
        #[serde(rename = "A")]
        a: AbVarDoc,
        #[serde(rename = "B")]
        b: AbVarDoc,
    },
    SwanBound {
        model: FiltrationDoc,
        #[serde(rename = "A")]
        a: AbVarDoc,
        #[serde(rename = "B")]
        b: AbVarDoc,
    },
    TameIdentity {
        model: FiltrationDoc,
        #[serde(rename = "A")]
        a: AbVarDoc,
        #[serde(rename = "B")]
        b: AbVarDoc,
    },
    MainBound {
        model: FiltrationDoc,
        #[serde(rename = "A")]
        a: AbVarDoc,
        #[serde(rename = "B")]
        b: AbVarDoc,
    },
    SimplifiedBound {
        model: FiltrationDoc,
        #[serde(rename = "A")]
        a: AbVarDoc,
        #[serde(rename = "B")]
        b: AbVarDoc,
    },
    DegreeGap {
        model: FiltrationDoc,
        #[serde(rename = "A")]
        a: AbVarDoc,
    },
    Global {
        datum: GlobalDatum,
    },
    Sharpness {
        p: u64,
        a: i64,
    },
}

impl Case {
    pub fn suite(&self) -> Suite {
        match self {
            Case::Lemma25 { .. } => Suite::Lemma25,
            Case::Lemma26 { .. } => Suite::Lemma26,
            Case::Prop27 { .. } => Suite::Prop27,
            Case::Prop210 { .. } => Suite::Prop210,
            Case::Lemma28 { .. } => Suite::Lemma28,
            Case::Lemma211 { .. } => Suite::Lemma211,
            Case::BlockConductor { .. } => Suite::BlockConductor,
            Case::SpecialTensor { .. } => Suite::SpecialTensor,
            Case::SemistableEquality { .. } => Suite::SemistableEquality,
            Case::SwanBound { .. } => Suite::SwanBound,
            Case::TameIdentity { .. } => Suite::TameIdentity,
            Case::MainBound { .. } => Suite::MainBound,
            Case::SimplifiedBound { .. } => Suite::SimplifiedBound,
            Case::DegreeGap { .. } => Suite::DegreeGap,
            Case::Global { .. } => Suite::Global,
            Case::Sharpness { .. } => Suite::Sharpness,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Relation {
    Equal,
    AtMost,
    AtLeast,
    /// `lhs = 0` or `lhs >= rhs`.
    ZeroOrAtLeast,
}

impl Relation {
    pub fn holds(self, lhs: &Rational, rhs: &Rational) -> bool {
        match self {
            Relation::Equal => lhs == rhs,
            Relation::AtMost => lhs <= rhs,
            Relation::AtLeast => lhs >= rhs,
            Relation::ZeroOrAtLeast => lhs.is_zero() || lhs >= rhs,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Check {
    pub label: String,
    pub relation: Relation,
    #[serde(with = "rational::serde_text")]
    pub lhs: Rational,
    #[serde(with = "rational::serde_text")]
    pub rhs: Rational,
    pub holds: bool,
}

impl Check {
    pub fn new(label: impl Into<String>, relation: Relation, lhs: Rational, rhs: Rational) -> Check {
        let holds = relation.holds(&lhs, &rhs);
        Check {
            label: label.into(),
            relation,
            lhs,
            rhs,
            holds,
        }
    }

    fn sides(label: impl Into<String>, relation: Relation, s: filtration::Sides) -> Check {
        Check::new(label, relation, s.lhs, s.rhs)
    }
}

/// Pinned values for the first check of a case.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Expectation {
    #[serde(with = "rational::serde_text")]
    pub lhs: Rational,
    #[serde(with = "rational::serde_text")]
    pub rhs: Rational,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum Verdict {
    Pass,
    Fail,
    Error { message: String },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Outcome {
    pub index: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    pub case: Case,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub expect: Option<Expectation>,
    pub checks: Vec<Check>,
    #[serde(flatten)]
    pub verdict: Verdict,
}

impl Outcome {
    pub fn passed(&self) -> bool {
        self.verdict == Verdict::Pass
    }

    pub fn counterexample(&self) -> Counterexample {
        Counterexample {
            version: COUNTEREXAMPLE_VERSION,
            outcome: self.clone(),
        }
    }
}

/// Replayable record of a failed case.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Counterexample {
    pub version: u64,
    #[serde(flatten)]
    pub outcome: Outcome,
}

/// Recomputes a counterexample from its case alone.
pub fn replay(doc: &Counterexample) -> Result<Outcome, String> {
    if doc.version != COUNTEREXAMPLE_VERSION {
        return Err(format!("counterexample version {} is not supported", doc.version));
    }
    let o = &doc.outcome;
    Ok(run_case(o.index, o.seed, o.name.clone(), o.case.clone(), o.expect.clone()))
}

pub fn run_case(
    index: usize,
    seed: Option<u64>,
    name: Option<String>,
    case: Case,
    expect: Option<Expectation>,
) -> Outcome {
    let (checks, verdict) = match evaluate(&case, expect.as_ref()) {
        Ok(checks) if checks.iter().all(|c| c.holds) => (checks, Verdict::Pass),
        Ok(checks) => (checks, Verdict::Fail),
        Err(message) => (Vec::new(), Verdict::Error { message }),
    };
    Outcome {
        index,
        seed,
        name,
        case,
        expect,
        checks,
        verdict,
    }
}

fn int(n: i64) -> Rational {
    rational::int(n)
}

fn uint(n: u64) -> Rational {
    rational::int(n as i64)
}

fn chars(table: &CharacterTable, mult: &[u64]) -> Result<Character, String> {
    Character::from_multiplicities(table, mult).map_err(|e| e.to_string())
}

fn subgroups_of(model: &FiltrationDoc, gens: &[Vec<ElementRef>]) -> Result<Vec<Subgroup>, String> {
    let g = model.group().map_err(|e| e.to_string())?;
    gens.iter()
        .map(|refs| {
            let idx = refs
                .iter()
                .map(|r| r.resolve(&g))
                .collect::<Result<Vec<_>, _>>()
                .map_err(|e| e.to_string())?;
            subgroup_generated(&g, &idx).map_err(|e| e.to_string())
        })
        .collect()
}

fn pair(model: &FiltrationDoc, a: &AbVarDoc, b: &AbVarDoc) -> Result<(AbVarDatum, AbVarDatum), String> {
    let m = model.model().map_err(|e| e.to_string())?;
    Ok((a.datum(&m).map_err(|e| e.to_string())?, b.datum(&m).map_err(|e| e.to_string())?))
}

fn pair_quantities(model: &FiltrationDoc, a: &AbVarDoc, b: &AbVarDoc) -> Result<PairQuantities, String> {
    let (da, db) = pair(model, a, b)?;
    PairQuantities::new(&da, &db).map_err(|e| e.to_string())
}

/// Tensor-bound checks shared by the two filtration bounds.
fn tensor_bound_checks(
    label: &str,
    sides: filtration::Sides,
    t1: &Character,
    t2: &Character,
    f: &crate::group::Filtration,
) -> Result<Vec<Check>, String> {
    let e = |e: filtration::FiltrationError| e.to_string();
    let d_total = filtration::delta(t1, t2, f).map_err(e)?;
    let d0 = filtration::delta_i(t1, t2, f, 0).map_err(e)?;
    let sum = t1.dsum(t2).map_err(|e| e.to_string())?;
    Ok(vec![
        Check::sides(label, Relation::AtMost, sides),
        Check::new("Delta >= Delta_0", Relation::AtLeast, d_total, uint(d0)),
        Check::new(
            "a(t1 + t2) = a(t1) + a(t2)",
            Relation::Equal,
            filtration::artin(&sum, f).map_err(e)?,
            filtration::artin(t1, f).map_err(e)? + filtration::artin(t2, f).map_err(e)?,
        ),
    ])
}

/// All checks of a case, followed by the pinned comparisons when given.
pub fn evaluate(case: &Case, expect: Option<&Expectation>) -> Result<Vec<Check>, String> {
    let mut checks = evaluate_case(case)?;
    if let Some(x) = expect {
        let first = checks.first().cloned().ok_or("case produced no checks")?;
        checks.push(Check::new("pinned lhs", Relation::Equal, first.lhs, x.lhs.clone()));
        checks.push(Check::new("pinned rhs", Relation::Equal, first.rhs, x.rhs.clone()));
    }
    Ok(checks)
}

fn evaluate_case(case: &Case) -> Result<Vec<Check>, String> {
    let fe = |e: filtration::FiltrationError| e.to_string();
    let we = |e: wd::WdError| e.to_string();
    let se = |e: crate::schema::SchemaError| e.to_string();
    match case {
        Case::Lemma25 { model, tau1, tau2, i } => {
            let m = model.model().map_err(se)?;
            let (t1, t2) = (chars(m.table(), tau1)?, chars(m.table(), tau2)?);
            let s = filtration::product_identity_sides(&t1, &t2, m.filtration(), *i).map_err(fe)?;
            Ok(vec![Check::sides("step identity", Relation::Equal, s)])
        }
        Case::Lemma26 { m, a, b, d } => {
            let s = filtration::decreasing_sequence_sides(m, a, b, d).map_err(fe)?;
            Ok(vec![Check::sides("sequence bound", Relation::AtLeast, s)])
        }
        Case::Prop27 { model, tau1, tau2 } => {
            let m = model.model().map_err(se)?;
            let (t1, t2) = (chars(m.table(), tau1)?, chars(m.table(), tau2)?);
            let s = filtration::bound_symplectic(&t1, &t2, m.filtration(), m.table()).map_err(fe)?;
            tensor_bound_checks("symplectic tensor bound", s, &t1, &t2, m.filtration())
        }
        Case::Prop210 { model, tau1, tau2 } => {
            let m = model.model().map_err(se)?;
            let (t1, t2) = (chars(m.table(), tau1)?, chars(m.table(), tau2)?);
            let p = m
                .group()
                .prime_power_order()
                .map(|(q, _)| q)
                .ok_or("group is not a nontrivial p-group")?;
            let s = filtration::bound_pgroup(&t1, &t2, m.filtration(), p).map_err(fe)?;
            tensor_bound_checks("p-group tensor bound", s, &t1, &t2, m.filtration())
        }
        Case::Lemma28 { model, tau, subgroups } => {
            let m = model.model().map_err(se)?;
            let t = chars(m.table(), tau)?;
            if !crate::character::is_symplectic(&t, m.table()).map_err(|e| e.to_string())? {
                return Err("tau is not symplectic".into());
            }
            subgroups_of(model, subgroups)?
                .iter()
                .enumerate()
                .map(|(k, h)| {
                    let codim = t.dim() - t.fixed_dim(h).map_err(|e| e.to_string())?;
                    Ok(Check::new(
                        format!("codim parity on subgroup {k} (order {})", h.order()),
                        Relation::Equal,
                        uint(codim % 2),
                        int(0),
                    ))
                })
                .collect()
        }
        Case::Lemma211 { model, tau, subgroups } => {
            let m = model.model().map_err(se)?;
            let t = chars(m.table(), tau)?;
            if !crate::character::is_rational_charpoly(&t) {
                return Err("tau does not have rational characteristic polynomials".into());
            }
            let mut out = Vec::new();
            for (k, h) in subgroups_of(model, subgroups)?.iter().enumerate() {
                let Some((p, _)) = h.prime_power_order() else {
                    continue;
                };
                let codim = t.dim() - t.fixed_dim(h).map_err(|e| e.to_string())?;
                out.push(Check::new(
                    format!("codim gap on subgroup {k} (order {})", h.order()),
                    Relation::ZeroOrAtLeast,
                    uint(codim),
                    uint(p - 1),
                ));
            }
            Ok(out)
        }
        Case::BlockConductor { model, sigma } => {
            let m = model.model().map_err(se)?;
            let s = chars(m.table(), sigma)?;
            let f = m.filtration();
            let one = WdRep::block(&m, s.clone(), 1).map_err(we)?;
            let two = WdRep::block(&m, s.clone(), 2).map_err(we)?;
            let a0 = filtration::a_i(&s, f, 0).map_err(fe)?;
            let fixed = s.fixed_dim(&Subgroup::whole(m.group())).map_err(|e| e.to_string())?;
            Ok(vec![
                Check::new(
                    "a(sigma x sp(1)) = a(sigma)",
                    Relation::Equal,
                    one.artin_conductor().map_err(we)?,
                    filtration::artin(&s, f).map_err(fe)?,
                ),
                Check::new(
                    "Sw(sigma x sp(1)) = Sw(sigma)",
                    Relation::Equal,
                    one.swan_conductor().map_err(we)?,
                    filtration::swan(&s, f).map_err(fe)?,
                ),
                Check::new(
                    "a - Sw of sigma x sp(2)",
                    Relation::Equal,
                    two.artin_conductor().map_err(we)? - two.swan_conductor().map_err(we)?,
                    uint(2 * a0 + fixed),
                ),
            ])
        }
        Case::SpecialTensor { model, sigma, n, m: k } => {
            let m = model.model().map_err(se)?;
            let s = chars(m.table(), sigma)?;
            let sides = wd::special_tensor_sides(&m, &s, *n, *k).map_err(we)?;
            Ok(vec![Check::sides("special tensor closed form", Relation::Equal, sides)])
        }
        Case::SemistableEquality { model, a, b } => {
            let (da, db) = pair(model, a, b)?;
            let s = wd::semistable_equality(&da, &db).map_err(we)?;
            let mut out = vec![Check::sides("semistable equality", Relation::Equal, s)];
            if da.sigma().dim() == 0 {
                let q = PairQuantities::new(&da, &db).map_err(we)?;
                out.push(Check::new(
                    "good reduction",
                    Relation::Equal,
                    q.a_ab.clone(),
                    uint(q.dim_a) * &q.a_b,
                ));
            }
            Ok(out)
        }
        Case::SwanBound { model, a, b } => {
            let q = pair_quantities(model, a, b)?;
            Ok(vec![Check::sides("Swan bound", Relation::AtMost, q.swan_bound())])
        }
        Case::TameIdentity { model, a, b } => {
            let q = pair_quantities(model, a, b)?;
            Ok(vec![Check::sides("tame identity", Relation::Equal, q.tame_identity().map_err(we)?)])
        }
        Case::MainBound { model, a, b } => {
            let q = pair_quantities(model, a, b)?;
            let main = q.main_bound().map_err(we)?;
            let mut out = vec![Check::new("conductor bound", Relation::AtMost, main.lhs.clone(), main.rhs.clone())];
            if let Some(exact) = &main.exact_rhs {
                out.push(Check::new("exact when a <= 1", Relation::Equal, main.lhs.clone(), exact.clone()));
            }
            if main.c_p >= 2 {
                let simple = q.simplified_bound().map_err(we)?;
                out.push(Check::new("refined rhs <= uniform rhs", Relation::AtMost, main.rhs, simple.rhs));
            }
            Ok(out)
        }
        Case::SimplifiedBound { model, a, b } => {
            let q = pair_quantities(model, a, b)?;
            let s = q.simplified_bound().map_err(we)?;
            Ok(vec![Check::new("uniform bound", Relation::AtMost, s.lhs, s.rhs)])
        }
        Case::DegreeGap { model, a } => {
            let m = model.model().map_err(se)?;
            let da = a.datum(&m).map_err(se)?;
            let gap = int(wd::degree_gap(&da).map_err(we)?);
            let cond = da.rho().artin_conductor().map_err(we)?;
            let floor = if cond.is_zero() { 0 } else { 1 };
            Ok(vec![Check::new("degree gap", Relation::AtLeast, gap, int(floor))])
        }
        Case::Global { datum } => global_checks(datum),
        Case::Sharpness { p, a } => {
            let params = sharpness::validate_params(*p, *a).map_err(|e| e.to_string())?;
            let r = sharpness::verify_sharpness(&params).map_err(|e| e.to_string())?;
            let vp_a = arith::valuation(&(*a).into(), *p).unwrap_or(0) as u64;
            let pp = *p;
            Ok(vec![
                Check::new("Sw(J_a)", Relation::Equal, uint(r.sw_a), int(1)),
                Check::new("Sw(J_p)", Relation::Equal, uint(r.sw_p), uint(pp)),
                Check::new("filtration Sw(J_a)", Relation::Equal, r.sw_a_filtration.clone(), uint(r.sw_a)),
                Check::new("filtration Sw(J_p)", Relation::Equal, r.sw_p_filtration.clone(), uint(r.sw_p)),
                Check::new(
                    "v(disc) closed form, alpha = a",
                    Relation::Equal,
                    uint(u64::from(r.disc_valuation_a)),
                    uint(pp + (pp - 1) * vp_a),
                ),
                Check::new(
                    "v(disc) closed form, alpha = p",
                    Relation::Equal,
                    uint(u64::from(r.disc_valuation_p)),
                    uint(2 * pp - 1),
                ),
                Check::new("Sw(tensor)", Relation::Equal, r.sw_tensor.clone(), uint(pp * (pp - 1))),
                Check::new("a(tensor)", Relation::Equal, r.a_tensor.clone(), uint((2 * pp - 1) * (pp - 1))),
                Check::new("Swan bound is sharp", Relation::Equal, r.sw_tensor.clone(), r.swan_bound_rhs.clone()),
                Check::new("conductor bound is sharp", Relation::Equal, r.a_tensor.clone(), r.artin_bound_rhs.clone()),
                Check::new(
                    "degree terms vanish",
                    Relation::Equal,
                    uint(r.deg_a + r.deg_p + r.deg_tensor),
                    int(0),
                ),
            ])
        }
    }
}

fn global_checks(datum: &GlobalDatum) -> Result<Vec<Check>, String> {
    let report = global::evaluate(datum).map_err(|e| e.to_string())?;
    let mut out = Vec::new();
    for (rec, pc) in datum.primes.iter().zip(&report.per_prime) {
        let p = pc.p;
        if let Some(local) = pc.local_exponent {
            out.push(Check::new(
                format!("p={p}: a(A x B) <= v_p(bound)"),
                Relation::AtMost,
                uint(local),
                uint(pc.bound_exponent),
            ));
        }
        if let Some(local) = pc.self_local_exponent {
            out.push(Check::new(
                format!("p={p}: a(A x A) <= v_p(self bound)"),
                Relation::AtMost,
                uint(local),
                uint(pc.self_bound_exponent),
            ));
        }
        let v = report.conductor_a.exponent(p);
        let expected_self = (4 * datum.dim_a - 2) * v - u64::from(v >= 2);
        out.push(Check::new(
            format!("p={p}: self bound exponent"),
            Relation::Equal,
            uint(pc.self_bound_exponent),
            uint(expected_self),
        ));
        if let PrimeRecord::Full { model, a, b, .. } = rec {
            let mut doc = model.clone();
            doc.p = Some(p);
            let ab = pair_quantities(&doc, a, b)?;
            let aa = pair_quantities(&doc, a, a)?;
            let local = ab.simplified_bound().map_err(|e| e.to_string())?;
            out.push(Check::new(
                format!("p={p}: v_p(bound) = local uniform rhs"),
                Relation::Equal,
                uint(pc.bound_exponent),
                local.rhs,
            ));
            out.push(Check::new(
                format!("p={p}: local uniform rhs for A x A <= v_p(self bound)"),
                Relation::AtMost,
                aa.simplified_bound().map_err(|e| e.to_string())?.rhs,
                uint(pc.self_bound_exponent),
            ));
        }
    }
    Ok(out)
}

/// Deterministic per-item seed.
pub fn item_seed(base: u64, suite: Suite, index: usize) -> u64 {
    fn splitmix(mut z: u64) -> u64 {
        z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
        z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
        z ^ (z >> 31)
    }
    let tag = Suite::ALL.iter().position(|s| *s == suite).expect("suite is listed") as u64;
    splitmix(base ^ splitmix((tag << 40) ^ index as u64))
}

const SHARPNESS_PRIMES: [u64; 5] = [3, 5, 7, 11, 13];
const RETRIES: usize = 64;

fn pick<'a>(entries: &[&'a Entry], rng: &mut ChaCha8Rng) -> Option<&'a Entry> {
    entries.choose(rng).copied()
}

fn random_abvar(table: &CharacterTable, rng: &mut ChaCha8Rng) -> AbVarDoc {
    AbVarDoc {
        tau: generate::gen_rational_symplectic_mults(table, rng.gen(), 8),
        sigma: generate::gen_rational_mults(table, rng.gen(), 4),
    }
}

fn trivial_mult(table: &CharacterTable, k: u64) -> Vec<u64> {
    let mut v = vec![0; table.len()];
    v[0] = k;
    v
}

fn a_sequence(t: &Character, f: &crate::group::Filtration) -> Vec<Rational> {
    (0..f.len())
        .map(|i| uint(filtration::a_i(t, f, i).expect("index in range")))
        .collect()
}

/// The case at `index` of `suite`, or `None` when no eligible input was found.
pub fn generate_case(suite: Suite, corpus: &Corpus, seed: u64) -> Option<Case> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let all: Vec<&Entry> = corpus.entries.iter().collect();
    let pgroups = corpus.p_group_entries();
    let case = match suite {
        Suite::Lemma25 => {
            let e = pick(&all, &mut rng)?;
            let t = e.model.table();
            Case::Lemma25 {
                model: e.doc.clone(),
                tau1: generate::gen_character_mults(t, rng.gen(), 10),
                tau2: generate::gen_character_mults(t, rng.gen(), 10),
                i: rng.gen_range(0..e.model.filtration().len()),
            }
        }
        Suite::Lemma26 => {
            let rational_side = rng.gen_bool(0.5);
            let e = if rational_side { pick(&pgroups, &mut rng)? } else { pick(&all, &mut rng)? };
            let t = e.model.table();
            let f = e.model.filtration();
            let (t1, t2, m) = if rational_side {
                let p = e.p_group_prime()?;
                (
                    generate::gen_rational(t, rng.gen(), 12),
                    generate::gen_rational(t, rng.gen(), 12),
                    uint((p - 1).max(1)),
                )
            } else {
                (generate::gen_symplectic(t, rng.gen(), 8), generate::gen_symplectic(t, rng.gen(), 8), int(2))
            };
            Case::Lemma26 {
                m,
                a: a_sequence(&t1, f),
                b: a_sequence(&t2, f),
                d: f.indices().into_iter().map(uint).collect(),
            }
        }
        Suite::Prop27 => {
            let e = pick(&all, &mut rng)?;
            let t = e.model.table();
            Case::Prop27 {
                model: e.doc.clone(),
                tau1: generate::gen_symplectic_mults(t, rng.gen(), 8),
                tau2: generate::gen_symplectic_mults(t, rng.gen(), 8),
            }
        }
        Suite::Prop210 => {
            let e = pick(&pgroups, &mut rng)?;
            let t = e.model.table();
            Case::Prop210 {
                model: e.doc.clone(),
                tau1: generate::gen_rational_mults(t, rng.gen(), 12),
                tau2: generate::gen_rational_mults(t, rng.gen(), 12),
            }
        }
        Suite::Lemma28 | Suite::Lemma211 => {
            let pool = if suite == Suite::Lemma28 { &all } else { &pgroups };
            let e = pick(pool, &mut rng)?;
            let t = e.model.table();
            let subgroups = corpus.subgroups(&e.doc.group).into_iter().map(|(g, _)| g).collect();
            if suite == Suite::Lemma28 {
                Case::Lemma28 {
                    model: e.doc.clone(),
                    tau: generate::gen_symplectic_mults(t, rng.gen(), 10),
                    subgroups,
                }
            } else {
                Case::Lemma211 {
                    model: e.doc.clone(),
                    tau: generate::gen_rational_mults(t, rng.gen(), 12),
                    subgroups,
                }
            }
        }
        Suite::BlockConductor => {
            let e = pick(&all, &mut rng)?;
            Case::BlockConductor {
                model: e.doc.clone(),
                sigma: generate::gen_character_mults(e.model.table(), rng.gen(), 8),
            }
        }
        Suite::SpecialTensor => {
            let e = pick(&all, &mut rng)?;
            Case::SpecialTensor {
                model: e.doc.clone(),
                sigma: generate::gen_character_mults(e.model.table(), rng.gen(), 6),
                n: rng.gen_range(1..=12),
                m: rng.gen_range(1..=12),
            }
        }
        Suite::SemistableEquality => {
            let e = pick(&all, &mut rng)?;
            let t = e.model.table();
            // the trivial part of a symplectic tau has even multiplicity
            let a = AbVarDoc {
                tau: trivial_mult(t, 2 * rng.gen_range(0..=2)),
                sigma: trivial_mult(t, rng.gen_range(0..=3)),
            };
            Case::SemistableEquality {
                model: e.doc.clone(),
                a,
                b: random_abvar(t, &mut rng),
            }
        }
        Suite::SwanBound | Suite::MainBound | Suite::SimplifiedBound => {
            let e = pick(&all, &mut rng)?;
            let t = e.model.table();
            let (a, b) = (random_abvar(t, &mut rng), random_abvar(t, &mut rng));
            let model = e.doc.clone();
            match suite {
                Suite::SwanBound => Case::SwanBound { model, a, b },
                Suite::MainBound => Case::MainBound { model, a, b },
                _ => Case::SimplifiedBound { model, a, b },
            }
        }
        Suite::TameIdentity => {
            let e = pick(&all, &mut rng)?;
            let t = e.model.table();
            let one = int(1);
            (0..RETRIES).find_map(|_| {
                let (a, b) = (random_abvar(t, &mut rng), random_abvar(t, &mut rng));
                let q = pair_quantities(&e.doc, &a, &b).ok()?;
                (q.a_a > one && q.a_b > one).then(|| Case::TameIdentity {
                    model: e.doc.clone(),
                    a,
                    b,
                })
            })?
        }
        Suite::DegreeGap => {
            let e = pick(&all, &mut rng)?;
            Case::DegreeGap {
                model: e.doc.clone(),
                a: random_abvar(e.model.table(), &mut rng),
            }
        }
        Suite::Global => Case::Global {
            datum: random_global(corpus, &mut rng)?,
        },
        Suite::Sharpness => {
            let p = SHARPNESS_PRIMES[rng.gen_range(0..SHARPNESS_PRIMES.len())];
            let nth = rng.gen_range(0..3);
            let a = (2..).filter(|&a| sharpness::validate_params(p, a).is_ok()).nth(nth)?;
            Case::Sharpness { p, a }
        }
    };
    Some(case)
}

fn integral_locals(doc: &FiltrationDoc, a: &AbVarDoc, b: &AbVarDoc) -> bool {
    let (Ok(ab), Ok(aa)) = (pair_quantities(doc, a, b), pair_quantities(doc, a, a)) else {
        return false;
    };
    [&ab.a_a, &ab.a_b, &ab.a_ab, &aa.a_ab].iter().all(|q| q.is_integer())
}

/// Full-mode data at one to three primes, padded by trivial summands to a
/// common dimension and restricted to integral local conductors.
fn random_global(corpus: &Corpus, rng: &mut ChaCha8Rng) -> Option<GlobalDatum> {
    let mut primes: Vec<u64> = corpus
        .entries
        .iter()
        .filter_map(|e| e.doc.p)
        .collect::<std::collections::BTreeSet<_>>()
        .into_iter()
        .collect();
    primes.shuffle(rng);
    primes.truncate(rng.gen_range(1..=3.min(primes.len())));
    primes.sort_unstable();
    let mut picked = Vec::new();
    for &p in &primes {
        let pool: Vec<&Entry> = corpus.entries.iter().filter(|e| e.doc.p == Some(p)).collect();
        let e = pick(&pool, rng)?;
        let t = e.model.table();
        let found = (0..RETRIES).find_map(|_| {
            let (a, b) = (random_abvar(t, rng), random_abvar(t, rng));
            integral_locals(&e.doc, &a, &b).then_some((a, b))
        });
        let (a, b) = found.unwrap_or_else(|| {
            let good = AbVarDoc {
                tau: trivial_mult(t, 2),
                sigma: trivial_mult(t, 0),
            };
            (good.clone(), good)
        });
        picked.push((p, e, a, b));
    }
    let dim = |d: &AbVarDoc, t: &CharacterTable| -> u64 {
        let deg = t.degrees();
        d.tau.iter().zip(&deg).map(|(m, k)| m * k).sum::<u64>()
            + 2 * d.sigma.iter().zip(&deg).map(|(m, k)| m * k).sum::<u64>()
    };
    let target_a = picked.iter().map(|(_, e, a, _)| dim(a, e.model.table())).max()?.max(2);
    let target_b = picked.iter().map(|(_, e, _, b)| dim(b, e.model.table())).max()?.max(2);
    let records = picked
        .into_iter()
        .map(|(p, e, mut a, mut b)| {
            let t = e.model.table();
            a.tau[0] += target_a - dim(&a, t);
            b.tau[0] += target_b - dim(&b, t);
            PrimeRecord::Full {
                p,
                model: e.doc.clone(),
                a,
                b,
            }
        })
        .collect();
    Some(GlobalDatum {
        dim_a: target_a / 2,
        dim_b: target_b / 2,
        primes: records,
    })
}

/// Outcomes of one suite in item order; `skipped` counts items without an
/// eligible input.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SuiteRun {
    pub suite: Suite,
    pub base_seed: u64,
    pub requested: usize,
    pub skipped: usize,
    pub outcomes: Vec<Outcome>,
}

impl SuiteRun {
    pub fn passed(&self) -> usize {
        self.outcomes.iter().filter(|o| o.passed()).count()
    }

    pub fn failures(&self) -> impl Iterator<Item = &Outcome> {
        self.outcomes.iter().filter(|o| !o.passed())
    }

    pub fn checks(&self) -> usize {
        self.outcomes.iter().map(|o| o.checks.len()).sum()
    }

    pub fn all_pass(&self) -> bool {
        self.failures().next().is_none()
    }
}

/// Runs `count` seeded items of `suite` on the current rayon pool.
pub fn run_suite(suite: Suite, corpus: &Corpus, count: usize, base_seed: u64) -> SuiteRun {
    let items: Vec<Option<Outcome>> = (0..count)
        .into_par_iter()
        .map(|index| {
            let seed = item_seed(base_seed, suite, index);
            let case = generate_case(suite, corpus, seed)?;
            Some(run_case(index, Some(seed), None, case, None))
        })
        .collect();
    let skipped = items.iter().filter(|o| o.is_none()).count();
    SuiteRun {
        suite,
        base_seed,
        requested: count,
        skipped,
        outcomes: items.into_iter().flatten().collect(),
    }
}

/// Pinned corpus cases, optionally restricted to one suite.
pub fn run_pinned(corpus: &Corpus, only: Option<Suite>) -> Vec<Outcome> {
    corpus
        .pinned
        .par_iter()
        .enumerate()
        .filter(|(_, p)| only.is_none_or(|s| p.case.suite() == s))
        .map(|(i, p)| run_case(i, None, Some(p.name.clone()), p.case.clone(), p.expect.clone()))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn suite_names_round_trip() {
        for s in Suite::ALL {
            assert_eq!(s.name().parse::<Suite>().unwrap(), s);
        }
        assert_eq!(Suite::Prop210.name(), "prop210");
        assert_eq!(Suite::SemistableEquality.name(), "semistable-equality");
        assert!("lemma99".parse::<Suite>().is_err());
    }

    #[test]
    fn pinned_cases_pass() {
        let c = Corpus::shipped();
        let out = run_pinned(&c, None);
        assert_eq!(out.len(), c.pinned.len());
        for o in &out {
            assert!(o.passed(), "{o:?}");
        }
    }

    #[test]
    fn every_suite_generates_and_passes() {
        let c = Corpus::shipped();
        for s in Suite::ALL {
            let run = run_suite(s, &c, 6, 11);
            assert!(run.outcomes.len() + run.skipped == 6);
            assert!(!run.outcomes.is_empty(), "{s}");
            for o in &run.outcomes {
                assert!(o.passed(), "{s}: {o:?}");
                assert!(!o.checks.is_empty(), "{s}");
            }
        }
    }

    #[test]
    fn runs_are_deterministic() {
        let c = Corpus::shipped();
        let a = run_suite(Suite::Prop27, &c, 10, 5);
        let b = run_suite(Suite::Prop27, &c, 10, 5);
        assert_eq!(serde_json::to_string(&a).unwrap(), serde_json::to_string(&b).unwrap());
        assert_ne!(item_seed(5, Suite::Prop27, 0), item_seed(5, Suite::Prop210, 0));
    }

    #[test]
    fn corrupted_pin_fails_and_replays() {
        let c = Corpus::shipped();
        let mut pin = c.pinned.iter().find(|p| p.case.suite() == Suite::Prop27).unwrap().clone();
        pin.expect = Some(Expectation {
            lhs: int(3),
            rhs: int(4),
        });
        let o = run_case(0, None, Some(pin.name), pin.case, pin.expect);
        assert_eq!(o.verdict, Verdict::Fail);
        let doc = o.counterexample();
        let text = serde_json::to_string(&doc).unwrap();
        let back: Counterexample = serde_json::from_str(&text).unwrap();
        assert_eq!(back, doc);
        assert_eq!(replay(&back).unwrap(), o);
    }

    #[test]
    fn invalid_case_is_an_error_verdict() {
        let case = Case::Prop27 {
            model: serde_json::from_str(r#"{"group": {"kind": "quaternion8"}, "chain": [["i", "j"], ["-1"]], "p": 2}"#)
                .unwrap(),
            tau1: vec![1, 0, 0, 0, 0],
            tau2: vec![0, 0, 0, 0, 1],
        };
        let o = run_case(0, None, None, case, None);
        assert!(matches!(o.verdict, Verdict::Error { .. }));
    }
}
