//! Conductor exponents attached to a descending chain of subgroups.
//!
//! For a filtration `G_0 >= G_1 >= ... >= G_k = 1` and characters `tau`,
//! `sigma` of `G_0`:
//!
//! ```text
//! a_i(tau)            = |tau| - dim tau^{G_i}
//! Delta_i(tau, sigma) = dim (tau x sigma)^{G_i} - dim tau^{G_i} * dim sigma^{G_i}
//! a(tau)              = sum_i a_i(tau) / [G_0 : G_i]
//! ```

use num_traits::Zero;
use serde::Serialize;
use thiserror::Error;

use crate::character::{self, CharError, Character, CharacterTable};
use crate::group::Filtration;
use crate::rational::{self, Rational};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FiltrationError {
    #[error("filtration step {i} out of range (chain has {len} steps)")]
    IndexOutOfRange { i: usize, len: usize },
    #[error("character {0} is not symplectic")]
    NotSymplectic(usize),
    #[error("character {0} does not have rational characteristic polynomials")]
    NotRational(usize),
    #[error("G_0 has order {order}, not a power of {p}")]
    NotPGroup { order: usize, p: u64 },
    #[error("characters and filtration live on different groups")]
    GroupMismatch,
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error(transparent)]
    Char(#[from] CharError),
}

type Result<T> = std::result::Result<T, FiltrationError>;

/// Two sides of an identity or inequality, as exact rationals.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Sides {
    #[serde(with = "rational::serde_text")]
    pub lhs: Rational,
    #[serde(with = "rational::serde_text")]
    pub rhs: Rational,
}

impl Sides {
    pub fn new(lhs: Rational, rhs: Rational) -> Self {
        Sides { lhs, rhs }
    }

    pub fn from_ints(lhs: i64, rhs: i64) -> Self {
        Sides::new(rational::int(lhs), rational::int(rhs))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ConductorReport {
    pub a_i: Vec<u64>,
    /// `[G_0 : G_i]` per step.
    pub indices: Vec<u64>,
    #[serde(with = "rational::serde_text")]
    pub total: Rational,
    pub delta_i: Option<Vec<u64>>,
    #[serde(with = "rational::serde_text_opt")]
    pub delta_total: Option<Rational>,
}

fn check_group(tau: &Character, f: &Filtration) -> Result<()> {
    if tau.group() == f.group() {
        Ok(())
    } else {
        Err(FiltrationError::GroupMismatch)
    }
}

fn step(f: &Filtration, i: usize) -> Result<&crate::group::Subgroup> {
    f.step(i).ok_or(FiltrationError::IndexOutOfRange { i, len: f.len() })
}

pub fn a_i(tau: &Character, f: &Filtration, i: usize) -> Result<u64> {
    check_group(tau, f)?;
    Ok(tau.dim() - tau.fixed_dim(step(f, i)?)?)
}

pub fn delta_i(tau: &Character, sigma: &Character, f: &Filtration, i: usize) -> Result<u64> {
    check_group(tau, f)?;
    check_group(sigma, f)?;
    let h = step(f, i)?;
    let joint = tau.tensor(sigma)?.fixed_dim(h)?;
    let separate = tau.fixed_dim(h)? * sigma.fixed_dim(h)?;
    joint.checked_sub(separate).ok_or_else(|| {
        FiltrationError::Precondition(format!("negative fixed-space excess at step {i}"))
    })
}

fn weighted_total(values: &[u64], indices: &[u64], from: usize) -> Rational {
    values
        .iter()
        .zip(indices)
        .skip(from)
        .fold(Rational::zero(), |acc, (&v, &d)| acc + rational::frac(v as i64, d as i64))
}

pub fn conductor(tau: &Character, f: &Filtration) -> Result<ConductorReport> {
    let a: Vec<u64> = (0..f.len()).map(|i| a_i(tau, f, i)).collect::<Result<_>>()?;
    let indices = f.indices();
    Ok(ConductorReport {
        total: weighted_total(&a, &indices, 0),
        a_i: a,
        indices,
        delta_i: None,
        delta_total: None,
    })
}

/// Report for `tau` together with the `Delta` terms against `sigma`.
pub fn conductor_pair(tau: &Character, sigma: &Character, f: &Filtration) -> Result<ConductorReport> {
    let mut report = conductor(tau, f)?;
    let d: Vec<u64> = (0..f.len()).map(|i| delta_i(tau, sigma, f, i)).collect::<Result<_>>()?;
    report.delta_total = Some(weighted_total(&d, &report.indices, 0));
    report.delta_i = Some(d);
    Ok(report)
}

/// `a(tau)`.
pub fn artin(tau: &Character, f: &Filtration) -> Result<Rational> {
    Ok(conductor(tau, f)?.total)
}

/// The wild part: the steps `i >= 1`, still weighted by `[G_0 : G_i]`.
pub fn swan(tau: &Character, f: &Filtration) -> Result<Rational> {
    let report = conductor(tau, f)?;
    Ok(weighted_total(&report.a_i, &report.indices, 1))
}

/// `Delta(tau, sigma)`.
pub fn delta(tau: &Character, sigma: &Character, f: &Filtration) -> Result<Rational> {
    let d: Vec<u64> = (0..f.len()).map(|i| delta_i(tau, sigma, f, i)).collect::<Result<_>>()?;
    Ok(weighted_total(&d, &f.indices(), 0))
}

/// Both sides of the step-`i` identity
/// `|t1| a_i(t2) + |t2| a_i(t1) - a_i(t1 x t2) = a_i(t1) a_i(t2) + Delta_i(t1, t2)`.
pub fn product_identity_sides(t1: &Character, t2: &Character, f: &Filtration, i: usize) -> Result<Sides> {
    let a1 = a_i(t1, f, i)? as i64;
    let a2 = a_i(t2, f, i)? as i64;
    let a12 = a_i(&t1.tensor(t2)?, f, i)? as i64;
    let d = delta_i(t1, t2, f, i)? as i64;
    let (n1, n2) = (t1.dim() as i64, t2.dim() as i64);
    Ok(Sides::from_ints(n1 * a2 + n2 * a1 - a12, a1 * a2 + d))
}

fn check_sequence(name: &str, s: &[Rational], m: &Rational) -> Result<()> {
    if s.windows(2).any(|w| w[1] > w[0]) {
        return Err(FiltrationError::Precondition(format!("{name} is not decreasing")));
    }
    if let Some(x) = s.iter().find(|x| !x.is_zero() && *x < m) {
        return Err(FiltrationError::Precondition(format!(
            "{name} has value {} strictly between 0 and M",
            rational::to_text(x)
        )));
    }
    Ok(())
}

/// `lhs = sum a_i b_i / d_i`, `rhs = M min(sum a_i/d_i, sum b_i/d_i)`, with
/// `lhs >= rhs` for decreasing sequences valued in `{0} u [M, oo)`.
pub fn decreasing_sequence_sides(m: &Rational, a: &[Rational], b: &[Rational], d: &[Rational]) -> Result<Sides> {
    if *m <= Rational::zero() {
        return Err(FiltrationError::Precondition("M must be positive".into()));
    }
    if a.len() != b.len() || a.len() != d.len() {
        return Err(FiltrationError::Precondition("sequences have different lengths".into()));
    }
    if d.iter().any(|x| *x <= Rational::zero()) {
        return Err(FiltrationError::Precondition("weights must be positive".into()));
    }
    check_sequence("a", a, m)?;
    check_sequence("b", b, m)?;
    let lhs = a.iter().zip(b).zip(d).fold(Rational::zero(), |acc, ((x, y), w)| acc + x * y / w);
    let sa = a.iter().zip(d).fold(Rational::zero(), |acc, (x, w)| acc + x / w);
    let sb = b.iter().zip(d).fold(Rational::zero(), |acc, (x, w)| acc + x / w);
    Ok(Sides::new(lhs, m * rational::min(&sa, &sb)))
}

/// `lhs = a(t1 x t2)` and
/// `rhs = |t1| a(t2) + |t2| a(t1) - c min(a(t1), a(t2)) - Delta(t1, t2)`.
fn tensor_bound_sides(t1: &Character, t2: &Character, f: &Filtration, c: i64) -> Result<Sides> {
    let a1 = artin(t1, f)?;
    let a2 = artin(t2, f)?;
    let lhs = artin(&t1.tensor(t2)?, f)?;
    let rhs = rational::int(t1.dim() as i64) * &a2 + rational::int(t2.dim() as i64) * &a1
        - rational::int(c) * rational::min(&a1, &a2)
        - delta(t1, t2, f)?;
    Ok(Sides::new(lhs, rhs))
}

/// Tensor bound for symplectic characters (coefficient 2).
pub fn bound_symplectic(t1: &Character, t2: &Character, f: &Filtration, table: &CharacterTable) -> Result<Sides> {
    for (k, t) in [t1, t2].into_iter().enumerate() {
        check_group(t, f)?;
        if !character::is_symplectic(t, table)? {
            return Err(FiltrationError::NotSymplectic(k + 1));
        }
    }
    tensor_bound_sides(t1, t2, f, 2)
}

/// Tensor bound on a `p`-group for characters with rational characteristic
/// polynomials (coefficient `p - 1`).
pub fn bound_pgroup(t1: &Character, t2: &Character, f: &Filtration, p: u64) -> Result<Sides> {
    let order = f.group().order();
    if order > 1 && crate::arith::prime_power(order as u64).map(|(q, _)| q) != Some(p) {
        return Err(FiltrationError::NotPGroup { order, p });
    }
    for (k, t) in [t1, t2].into_iter().enumerate() {
        check_group(t, f)?;
        if !character::is_rational_charpoly(t) {
            return Err(FiltrationError::NotRational(k + 1));
        }
    }
    tensor_bound_sides(t1, t2, f, p as i64 - 1)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::character::character_table;
    use crate::cyclo::CycloNum;
    use crate::group::{build_group, make_filtration, subgroup_generated, GroupSpec, Subgroup};
    use std::sync::Arc;

    fn q8_setup() -> (CharacterTable, Filtration, Character) {
        let g = build_group(&GroupSpec::Quaternion8).unwrap();
        let t = character_table(&g).unwrap();
        let center = subgroup_generated(&g, &[g.element_by_label("-1").unwrap()]).unwrap();
        let f = make_filtration(&g, vec![Subgroup::whole(&g), center]).unwrap();
        let chi2 = t.irreducible(4);
        (t, f, chi2)
    }

    fn q(n: i64, d: i64) -> Rational {
        rational::frac(n, d)
    }

    #[test]
    fn steps_and_totals() {
        let (_, f, chi2) = q8_setup();
        assert_eq!(a_i(&chi2, &f, 1).unwrap(), 2);
        assert_eq!(delta_i(&chi2, &chi2, &f, 1).unwrap(), 4);
        assert_eq!(delta_i(&chi2, &chi2, &f, 0).unwrap(), 1);
        let rep = conductor_pair(&chi2, &chi2, &f).unwrap();
        assert_eq!(rep.a_i, vec![2, 2, 0]);
        assert_eq!(rep.indices, vec![1, 4, 8]);
        assert_eq!(rep.total, q(5, 2));
        assert_eq!(rep.delta_i, Some(vec![1, 4, 0]));
        assert_eq!(swan(&chi2, &f).unwrap(), q(1, 2));
        assert!(matches!(a_i(&chi2, &f, 3), Err(FiltrationError::IndexOutOfRange { i: 3, len: 3 })));
        let one = Character::trivial(f.group());
        assert_eq!(artin(&one, &f).unwrap(), q(0, 1));
        assert_eq!(delta_i(&one, &chi2, &f, 0).unwrap(), 0);
    }

    #[test]
    fn cyclic_prime_conductor() {
        let g = build_group(&GroupSpec::Cyclic { n: 5 }).unwrap();
        let t = character_table(&g).unwrap();
        let f = make_filtration(&g, vec![Subgroup::whole(&g)]).unwrap();
        assert_eq!(a_i(&t.irreducible(1), &f, 0).unwrap(), 1);
        assert_eq!(artin(&t.irreducible(1), &f).unwrap(), q(1, 1));
    }

    #[test]
    fn product_identity_instances() {
        let (_, f, chi2) = q8_setup();
        assert_eq!(product_identity_sides(&chi2, &chi2, &f, 1).unwrap(), Sides::from_ints(8, 8));
        let one = Character::trivial(f.group());
        assert_eq!(product_identity_sides(&one, &one, &f, 0).unwrap(), Sides::from_ints(0, 0));
    }

    #[test]
    fn sequence_sides() {
        let v = |xs: &[i64]| xs.iter().map(|&x| q(x, 1)).collect::<Vec<_>>();
        let s = decreasing_sequence_sides(&q(2, 1), &v(&[2, 0]), &v(&[4, 2]), &v(&[1, 2])).unwrap();
        assert_eq!(s, Sides::from_ints(8, 4));
        let s = decreasing_sequence_sides(&q(2, 1), &v(&[2, 2]), &v(&[2, 2]), &v(&[1, 1])).unwrap();
        assert_eq!(s, Sides::from_ints(8, 8));
        let s = decreasing_sequence_sides(&q(2, 1), &v(&[0, 0]), &v(&[0, 0]), &v(&[1, 1])).unwrap();
        assert_eq!(s, Sides::from_ints(0, 0));
        assert!(decreasing_sequence_sides(&q(2, 1), &v(&[1, 0]), &v(&[2, 2]), &v(&[1, 1])).is_err());
        assert!(decreasing_sequence_sides(&q(2, 1), &v(&[2, 4]), &v(&[2, 2]), &v(&[1, 1])).is_err());
    }

    #[test]
    fn symplectic_bound_is_tight_on_q8() {
        let (t, f, chi2) = q8_setup();
        assert_eq!(bound_symplectic(&chi2, &chi2, &f, &t).unwrap(), Sides::from_ints(3, 3));
        let two = Character::trivial(f.group()).times(2);
        assert_eq!(bound_symplectic(&two, &two, &f, &t).unwrap(), Sides::from_ints(0, 0));
        let one = Character::trivial(f.group());
        assert_eq!(bound_symplectic(&one, &chi2, &f, &t).unwrap_err(), FiltrationError::NotSymplectic(1));
    }

    #[test]
    fn pgroup_bound_is_tight_on_c3() {
        let g = build_group(&GroupSpec::Cyclic { n: 3 }).unwrap();
        let t = character_table(&g).unwrap();
        let f = make_filtration(&g, vec![Subgroup::whole(&g)]).unwrap();
        let pair = t.irreducible(1).dsum(&t.irreducible(2)).unwrap();
        assert_eq!(pair.tensor(&pair).unwrap().values()[1], CycloNum::from_int(1));
        assert_eq!(bound_pgroup(&pair, &pair, &f, 3).unwrap(), Sides::from_ints(2, 2));
        assert_eq!(bound_pgroup(&t.irreducible(1), &pair, &f, 3).unwrap_err(), FiltrationError::NotRational(1));
        let g2: Arc<_> = build_group(&GroupSpec::Affine { p: 3 }).unwrap();
        let f2 = make_filtration(&g2, vec![Subgroup::whole(&g2)]).unwrap();
        let one = Character::trivial(&g2);
        assert!(matches!(bound_pgroup(&one, &one, &f2, 3), Err(FiltrationError::NotPGroup { .. })));
    }
}
