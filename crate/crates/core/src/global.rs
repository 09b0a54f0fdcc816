//! Global conductors as factored integers assembled from local data.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num_bigint::BigUint;
use num_traits::One;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::arith;
use crate::rational::{self, Rational};
use crate::schema::{AbVarDoc, FiltrationDoc, SchemaError};
use crate::wd::{PairQuantities, WdError};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GlobalError {
    #[error("negative exponent {exponent} at p = {p}: degree data are inconsistent")]
    NegativeExponent { p: u64, exponent: i64 },
    #[error("inconsistent input at p = {p}: {reason}")]
    InconsistentInput { p: u64, reason: String },
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("prime {0} listed twice")]
    DuplicatePrime(u64),
    #[error("quotient is not integral at p = {0}")]
    NotDivisible(u64),
    #[error(transparent)]
    Schema(#[from] SchemaError),
    #[error(transparent)]
    Wd(#[from] WdError),
}

type Result<T> = std::result::Result<T, GlobalError>;

/// A positive integer held as `{prime: exponent}` with no zero exponents.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct FactoredInteger {
    factors: BTreeMap<u64, u64>,
}

impl FactoredInteger {
    pub fn one() -> Self {
        Self::default()
    }

    pub fn prime_power(p: u64, e: u64) -> Self {
        let mut f = Self::one();
        if e > 0 {
            f.factors.insert(p, e);
        }
        f
    }

    pub fn from_u64(n: u64) -> Self {
        assert!(n > 0, "only positive integers factor");
        FactoredInteger {
            factors: arith::factorize(n).into_iter().map(|(p, e)| (p, u64::from(e))).collect(),
        }
    }

    pub fn from_exponents(pairs: impl IntoIterator<Item = (u64, u64)>) -> Self {
        let mut f = Self::one();
        for (p, e) in pairs {
            f = f.mul(&Self::prime_power(p, e));
        }
        f
    }

    pub fn exponent(&self, p: u64) -> u64 {
        self.factors.get(&p).copied().unwrap_or(0)
    }

    pub fn factors(&self) -> &BTreeMap<u64, u64> {
        &self.factors
    }

    pub fn is_one(&self) -> bool {
        self.factors.is_empty()
    }

    fn merge(&self, other: &Self, f: impl Fn(u64, u64) -> u64) -> Self {
        let primes: BTreeSet<u64> = self.factors.keys().chain(other.factors.keys()).copied().collect();
        FactoredInteger {
            factors: primes
                .into_iter()
                .map(|p| (p, f(self.exponent(p), other.exponent(p))))
                .filter(|&(_, e)| e > 0)
                .collect(),
        }
    }

    pub fn mul(&self, other: &Self) -> Self {
        self.merge(other, |a, b| a + b)
    }

    pub fn gcd(&self, other: &Self) -> Self {
        self.merge(other, u64::min)
    }

    pub fn lcm(&self, other: &Self) -> Self {
        self.merge(other, u64::max)
    }

    pub fn pow(&self, k: u64) -> Self {
        FactoredInteger {
            factors: if k == 0 {
                BTreeMap::new()
            } else {
                self.factors.iter().map(|(&p, &e)| (p, e * k)).collect()
            },
        }
    }

    /// True when `self | other`.
    pub fn divides(&self, other: &Self) -> bool {
        self.factors.iter().all(|(&p, &e)| e <= other.exponent(p))
    }

    /// `self / other`, defined when `other | self`.
    pub fn div(&self, other: &Self) -> Result<Self> {
        if let Some((&p, _)) = other.factors.iter().find(|(&p, &e)| e > self.exponent(p)) {
            return Err(GlobalError::NotDivisible(p));
        }
        Ok(self.merge(other, |a, b| a - b))
    }

    pub fn value(&self) -> BigUint {
        self.factors
            .iter()
            .fold(BigUint::one(), |acc, (&p, &e)| acc * BigUint::from(p).pow(e as u32))
    }
}

impl fmt::Display for FactoredInteger {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.factors.is_empty() {
            return write!(f, "1");
        }
        let parts: Vec<String> = self
            .factors
            .iter()
            .map(|(p, e)| if *e == 1 { p.to_string() } else { format!("{p}^{e}") })
            .collect();
        write!(f, "{}", parts.join(" * "))
    }
}

/// Local data at one prime, either quoted or computed from a full model.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "snake_case", deny_unknown_fields)]
pub enum PrimeRecord {
    Summary {
        p: u64,
        #[serde(rename = "vA")]
        v_a: u64,
        #[serde(rename = "vB")]
        v_b: u64,
        #[serde(rename = "degA")]
        deg_a: u64,
        #[serde(rename = "degB")]
        deg_b: u64,
        #[serde(rename = "degAB")]
        deg_ab: u64,
    },
    Full {
        p: u64,
        model: FiltrationDoc,
        #[serde(rename = "A")]
        a: AbVarDoc,
        #[serde(rename = "B")]
        b: AbVarDoc,
    },
}

impl PrimeRecord {
    pub fn p(&self) -> u64 {
        match self {
            PrimeRecord::Summary { p, .. } | PrimeRecord::Full { p, .. } => *p,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GlobalDatum {
    #[serde(rename = "dimA")]
    pub dim_a: u64,
    #[serde(rename = "dimB")]
    pub dim_b: u64,
    pub primes: Vec<PrimeRecord>,
}

/// Exponents at one prime after local computation.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LocalExponents {
    pub p: u64,
    pub v_a: u64,
    pub v_b: u64,
    pub deg_a: u64,
    pub deg_b: u64,
    pub deg_ab: u64,
    /// `a(rho_A x rho_B)`, known only in full mode.
    pub a_ab: Option<u64>,
    /// `a(rho_A x rho_A)`, known only in full mode.
    pub a_aa: Option<u64>,
    /// `deg(A x A)`, known only in full mode.
    pub deg_aa: Option<u64>,
}

fn integral(p: u64, what: &str, q: &Rational) -> Result<u64> {
    rational::as_integer(q)
        .and_then(|n| u64::try_from(n).ok())
        .ok_or_else(|| GlobalError::InconsistentInput {
            p,
            reason: format!("{what} = {} is not a nonnegative integer", rational::to_text(q)),
        })
}

fn local_exponents(rec: &PrimeRecord, dim_a: u64, dim_b: u64) -> Result<LocalExponents> {
    let p = rec.p();
    if !arith::is_prime(p) {
        return Err(GlobalError::NotPrime(p));
    }
    let inconsistent = |reason: String| GlobalError::InconsistentInput { p, reason };
    match rec {
        PrimeRecord::Summary {
            v_a,
            v_b,
            deg_a,
            deg_b,
            deg_ab,
            ..
        } => {
            if *deg_a > 2 * dim_a || *deg_b > 2 * dim_b || *deg_ab > 4 * dim_a * dim_b {
                return Err(inconsistent("degree exceeds the dimension of the representation".into()));
            }
            Ok(LocalExponents {
                p,
                v_a: *v_a,
                v_b: *v_b,
                deg_a: *deg_a,
                deg_b: *deg_b,
                deg_ab: *deg_ab,
                a_ab: None,
                a_aa: None,
                deg_aa: None,
            })
        }
        PrimeRecord::Full { model, a, b, .. } => {
            if model.p.is_some_and(|mp| mp != p) {
                return Err(inconsistent("model residue characteristic differs from p".into()));
            }
            let mut doc = model.clone();
            doc.p = Some(p);
            let m = doc.model()?;
            let (da, db) = (a.datum(&m)?, b.datum(&m)?);
            let ab = PairQuantities::new(&da, &db)?;
            let aa = PairQuantities::new(&da, &da)?;
            if ab.dim_a != 2 * dim_a || ab.dim_b != 2 * dim_b {
                return Err(inconsistent(format!(
                    "local dimensions ({}, {}) do not match 2 dimA, 2 dimB",
                    ab.dim_a, ab.dim_b
                )));
            }
            Ok(LocalExponents {
                p,
                v_a: integral(p, "a(rho_A)", &ab.a_a)?,
                v_b: integral(p, "a(rho_B)", &ab.a_b)?,
                deg_a: ab.deg_a,
                deg_b: ab.deg_b,
                deg_ab: ab.deg_ab,
                a_ab: Some(integral(p, "a(rho_A x rho_B)", &ab.a_ab)?),
                a_aa: Some(integral(p, "a(rho_A x rho_A)", &aa.a_ab)?),
                deg_aa: Some(aa.deg_ab),
            })
        }
    }
}

/// Per-prime verdict of the divisibility statement.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PrimeCheck {
    pub p: u64,
    pub bound_exponent: u64,
    pub local_exponent: Option<u64>,
    pub self_bound_exponent: u64,
    pub self_local_exponent: Option<u64>,
    pub pass: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct GlobalReport {
    pub conductor_a: FactoredInteger,
    pub conductor_b: FactoredInteger,
    pub d_term: FactoredInteger,
    pub bound: FactoredInteger,
    pub self_bound: FactoredInteger,
    pub per_prime: Vec<PrimeCheck>,
    pub all_pass: bool,
}

impl GlobalDatum {
    pub fn local_exponents(&self) -> Result<Vec<LocalExponents>> {
        let mut seen = BTreeSet::new();
        for rec in &self.primes {
            if !seen.insert(rec.p()) {
                return Err(GlobalError::DuplicatePrime(rec.p()));
            }
        }
        self.primes
            .iter()
            .map(|r| local_exponents(r, self.dim_a, self.dim_b))
            .collect()
    }
}

fn conductors(locals: &[LocalExponents]) -> (FactoredInteger, FactoredInteger) {
    (
        FactoredInteger::from_exponents(locals.iter().map(|l| (l.p, l.v_a))),
        FactoredInteger::from_exponents(locals.iter().map(|l| (l.p, l.v_b))),
    )
}

/// `prod_{v_p(N_A) v_p(N_B) > 1} p^{deg_p(A x B) - deg_p(A) deg_p(B)}`.
pub fn d_term(locals: &[LocalExponents]) -> Result<FactoredInteger> {
    let mut out = FactoredInteger::one();
    for l in locals.iter().filter(|l| l.v_a * l.v_b > 1) {
        let e = l.deg_ab as i64 - (l.deg_a * l.deg_b) as i64;
        if e < 0 {
            return Err(GlobalError::NegativeExponent { p: l.p, exponent: e });
        }
        out = out.mul(&FactoredInteger::prime_power(l.p, e as u64));
    }
    Ok(out)
}

/// `N_A^{2 dim B} N_B^{2 dim A} / (d(A, B) gcd(N_A, N_B)^2)`.
pub fn rankin_selberg_bound(dim_a: u64, dim_b: u64, locals: &[LocalExponents]) -> Result<FactoredInteger> {
    let (na, nb) = conductors(locals);
    let num = na.pow(2 * dim_b).mul(&nb.pow(2 * dim_a));
    let den = d_term(locals)?.mul(&na.gcd(&nb).pow(2));
    num.div(&den).map_err(|e| match e {
        GlobalError::NotDivisible(p) => GlobalError::InconsistentInput {
            p,
            reason: "denominator exceeds numerator".into(),
        },
        other => other,
    })
}

/// `N_A^{4 dim A - 2} / N_{A,2}` with `N_{A,2} = prod_{v_p(N_A) >= 2} p`.
pub fn self_tensor_bound(dim_a: u64, conductor_a: &FactoredInteger) -> Result<FactoredInteger> {
    if dim_a == 0 {
        return Ok(FactoredInteger::one());
    }
    let n2 = FactoredInteger::from_exponents(
        conductor_a.factors().iter().filter(|(_, &e)| e >= 2).map(|(&p, _)| (p, 1)),
    );
    conductor_a.pow(4 * dim_a - 2).div(&n2)
}

pub fn evaluate(datum: &GlobalDatum) -> Result<GlobalReport> {
    let locals = datum.local_exponents()?;
    let (na, nb) = conductors(&locals);
    let d = d_term(&locals)?;
    let bound = rankin_selberg_bound(datum.dim_a, datum.dim_b, &locals)?;
    let self_bound = self_tensor_bound(datum.dim_a, &na)?;
    let per_prime: Vec<PrimeCheck> = locals
        .iter()
        .map(|l| {
            let be = bound.exponent(l.p);
            let se = self_bound.exponent(l.p);
            let pass = l.a_ab.is_none_or(|x| x <= be) && l.a_aa.is_none_or(|x| x <= se);
            PrimeCheck {
                p: l.p,
                bound_exponent: be,
                local_exponent: l.a_ab,
                self_bound_exponent: se,
                self_local_exponent: l.a_aa,
                pass,
            }
        })
        .collect();
    let all_pass = per_prime.iter().all(|c| c.pass);
    Ok(GlobalReport {
        conductor_a: na,
        conductor_b: nb,
        d_term: d,
        bound,
        self_bound,
        per_prime,
        all_pass,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn summary(p: u64, v_a: u64, v_b: u64, deg_a: u64, deg_b: u64, deg_ab: u64) -> PrimeRecord {
        PrimeRecord::Summary {
            p,
            v_a,
            v_b,
            deg_a,
            deg_b,
            deg_ab,
        }
    }

    #[test]
    fn factored_arithmetic() {
        let a = FactoredInteger::from_u64(360);
        let b = FactoredInteger::from_u64(84);
        assert_eq!(a.gcd(&b), FactoredInteger::from_u64(12));
        assert_eq!(a.lcm(&b), FactoredInteger::from_u64(2520));
        assert_eq!(a.mul(&b).value(), BigUint::from(360u64 * 84));
        assert!(b.gcd(&a).divides(&a));
        assert!(!a.mul(&b).divides(&a));
        assert_eq!(a.div(&FactoredInteger::from_u64(8)).unwrap(), FactoredInteger::from_u64(45));
        assert_eq!(a.div(&FactoredInteger::from_u64(16)).unwrap_err(), GlobalError::NotDivisible(2));
        assert_eq!(a.to_string(), "2^3 * 3^2 * 5");
        assert_eq!(serde_json::to_string(&b).unwrap(), r#"{"2":2,"3":1,"7":1}"#);
    }

    #[test]
    fn d_term_cases() {
        let none: Vec<LocalExponents> = vec![];
        assert!(d_term(&none).unwrap().is_one());
        let datum = GlobalDatum {
            dim_a: 1,
            dim_b: 1,
            primes: vec![summary(3, 2, 2, 1, 1, 2), summary(5, 1, 1, 1, 1, 1)],
        };
        let locals = datum.local_exponents().unwrap();
        assert_eq!(d_term(&locals).unwrap(), FactoredInteger::prime_power(3, 1));
        let bad = GlobalDatum {
            dim_a: 1,
            dim_b: 1,
            primes: vec![summary(3, 2, 2, 1, 1, 0)],
        };
        assert!(matches!(d_term(&bad.local_exponents().unwrap()), Err(GlobalError::NegativeExponent { p: 3, .. })));
    }

    #[test]
    fn bounds_for_elliptic_curves() {
        // A = B semistable at 7 and 11: v = 1, deg 1, deg(A x A) = 2
        let datum = GlobalDatum {
            dim_a: 1,
            dim_b: 1,
            primes: vec![summary(7, 1, 1, 1, 1, 2), summary(11, 1, 1, 1, 1, 2)],
        };
        let r = evaluate(&datum).unwrap();
        assert_eq!(r.bound, FactoredInteger::from_u64(77 * 77));
        assert_eq!(r.self_bound, FactoredInteger::from_u64(77 * 77));
        assert!(r.all_pass);
        let good = GlobalDatum {
            dim_a: 2,
            dim_b: 1,
            primes: vec![],
        };
        let r = evaluate(&good).unwrap();
        assert!(r.bound.is_one() && r.self_bound.is_one());
    }

    #[test]
    fn input_errors() {
        let dup = GlobalDatum {
            dim_a: 1,
            dim_b: 1,
            primes: vec![summary(3, 1, 1, 1, 1, 1), summary(3, 1, 1, 1, 1, 1)],
        };
        assert_eq!(evaluate(&dup).unwrap_err(), GlobalError::DuplicatePrime(3));
        let np = GlobalDatum {
            dim_a: 1,
            dim_b: 1,
            primes: vec![summary(4, 1, 1, 1, 1, 1)],
        };
        assert_eq!(evaluate(&np).unwrap_err(), GlobalError::NotPrime(4));
        let json = r#"{"dimA": 1, "dimB": 1, "primes": [{"p": 5, "mode": "summary", "vA": 2, "vB": 2, "degA": 0, "degB": 0, "degAB": 1}]}"#;
        let d: GlobalDatum = serde_json::from_str(json).unwrap();
        assert_eq!(evaluate(&d).unwrap().d_term, FactoredInteger::prime_power(5, 1));
        assert!(serde_json::from_str::<GlobalDatum>(r#"{"dimA": 1, "dimB": 1, "primes": [{"p": 5, "mode": "other"}]}"#).is_err());
    }

    #[test]
    fn full_mode_prime() {
        let json = r#"{"dimA": 1, "dimB": 2, "primes": [{"p": 2, "mode": "full",
            "model": {"group": {"kind": "quaternion8"}, "chain": [["i", "j"], ["-1"]]},
            "A": {"tau": [0, 0, 0, 0, 1], "sigma": [0, 0, 0, 0, 0]},
            "B": {"tau": [0, 0, 0, 0, 1], "sigma": [1, 0, 0, 0, 0]}}]}"#;
        let d: GlobalDatum = serde_json::from_str(json).unwrap();
        let err = evaluate(&d).unwrap_err();
        // a(chi2) = 5/2 on this chain
        assert!(matches!(err, GlobalError::InconsistentInput { p: 2, .. }), "{err}");
        let json = json.replace(r#"[["i", "j"], ["-1"]]"#, r#"[["i", "j"], ["i", "j"], ["-1"], ["-1"]]"#);
        let d: GlobalDatum = serde_json::from_str(&json).unwrap();
        let r = evaluate(&d).unwrap();
        assert!(r.all_pass, "{r:?}");
        assert_eq!(r.conductor_a, FactoredInteger::prime_power(2, 5));
    }
}
