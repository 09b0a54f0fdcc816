//! The Jacobians `J_alpha` of `y^2 = x^p - alpha` over `Q_p`, for which the
//! Swan and Artin tensor bounds are equalities when `A = J_a` (a unit with
//! `a^(p-1) != 1 mod p^2`) and `B = J_p`.

use std::sync::Arc;

use num_bigint::BigInt;
use num_traits::{One, Zero};
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::arith;
use crate::character::{CharError, Character};
use crate::filtration::{self, FiltrationError};
use crate::group::{make_filtration, subgroup_generated, GroupError, GroupSpec, Subgroup};
use crate::rational::{self, Rational};
use crate::schema::shared_group;
use crate::wd::{InertiaModel, WdError};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SharpnessError {
    #[error("p = {0} must be an odd prime")]
    NotOddPrime(u64),
    #[error("a = {a} is not a valid unit for p = {p}: {reason}")]
    InvalidUnit { p: u64, a: i64, reason: String },
    #[error("alpha must be nonzero")]
    ZeroAlpha,
    #[error("alpha must be the unit a or the prime p")]
    BadAlpha,
    #[error("characters {0:?} and {1:?} share the break {2} so their product break is undetermined")]
    AmbiguousBreak(Vec<u64>, Vec<u64>, String),
    #[error("break representations have different wild groups")]
    RankMismatch,
    #[error(transparent)]
    Group(#[from] GroupError),
    #[error(transparent)]
    Char(#[from] CharError),
    #[error(transparent)]
    Filtration(#[from] FiltrationError),
    #[error(transparent)]
    Wd(#[from] WdError),
}

type Result<T> = std::result::Result<T, SharpnessError>;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct FamilyParams {
    pub p: u64,
    pub a: i64,
}

fn check_odd_prime(p: u64) -> Result<()> {
    if p == 2 || !arith::is_prime(p) {
        return Err(SharpnessError::NotOddPrime(p));
    }
    Ok(())
}

pub fn validate_params(p: u64, a: i64) -> Result<FamilyParams> {
    check_odd_prime(p)?;
    let invalid = |reason: &str| SharpnessError::InvalidUnit {
        p,
        a,
        reason: reason.to_string(),
    };
    let p2 = p * p;
    let residue = a.rem_euclid(p2 as i64) as u64;
    if residue.is_multiple_of(p) {
        return Err(invalid("not a unit"));
    }
    if arith::pow_mod(residue, p - 1, p2) == 1 {
        return Err(invalid("a^(p-1) = 1 mod p^2"));
    }
    Ok(FamilyParams { p, a })
}

/// Smallest `a >= 2` passing [`validate_params`].
pub fn smallest_valid_a(p: u64) -> Result<i64> {
    check_odd_prime(p)?;
    Ok((2..).find(|&a| validate_params(p, a).is_ok()).expect("valid units exist"))
}

/// Determinant by fraction-free Gaussian elimination.
pub fn bareiss_determinant(mut m: Vec<Vec<BigInt>>) -> BigInt {
    let n = m.len();
    let mut sign = BigInt::one();
    let mut prev = BigInt::one();
    for k in 0..n {
        if m[k][k].is_zero() {
            match (k + 1..n).find(|&i| !m[i][k].is_zero()) {
                Some(i) => {
                    m.swap(i, k);
                    sign = -sign;
                }
                None => return BigInt::zero(),
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let v = (&m[i][j] * &m[k][k] - &m[i][k] * &m[k][j]) / &prev;
                m[i][j] = v;
            }
        }
        prev = m[k][k].clone();
    }
    sign * &m[n - 1][n - 1]
}

/// Sylvester matrix of two polynomials given with the leading coefficient first.
pub fn sylvester_matrix(f: &[BigInt], g: &[BigInt]) -> Vec<Vec<BigInt>> {
    let (m, n) = (f.len() - 1, g.len() - 1);
    let size = m + n;
    let mut rows = Vec::with_capacity(size);
    for i in 0..n {
        let mut row = vec![BigInt::zero(); size];
        row[i..i + f.len()].clone_from_slice(f);
        rows.push(row);
    }
    for i in 0..m {
        let mut row = vec![BigInt::zero(); size];
        row[i..i + g.len()].clone_from_slice(g);
        rows.push(row);
    }
    rows
}

/// `disc(x^p - alpha)` as `(-1)^(p(p-1)/2) Res(f, f')`.
pub fn discriminant(p: u64, alpha: &BigInt) -> BigInt {
    let n = p as usize;
    let mut f = vec![BigInt::zero(); n + 1];
    f[0] = BigInt::one();
    f[n] = -alpha.clone();
    let mut df = vec![BigInt::zero(); n];
    df[0] = BigInt::from(p);
    let res = bareiss_determinant(sylvester_matrix(&f, &df));
    if (p * (p - 1) / 2) % 2 == 1 {
        -res
    } else {
        res
    }
}

/// `v_p(disc(x^p - alpha))`, from the exact Sylvester resultant.
pub fn disc_valuation(p: u64, alpha: i64) -> Result<u32> {
    if alpha == 0 {
        return Err(SharpnessError::ZeroAlpha);
    }
    check_odd_prime(p)?;
    Ok(arith::valuation(&discriminant(p, &BigInt::from(alpha)), p).expect("discriminant is nonzero"))
}

/// `Sw(rho_{J_alpha}) = v(disc) - p + 1` for the totally ramified degree-`p` extension.
pub fn swan_jacobian(params: &FamilyParams, alpha: i64) -> Result<u64> {
    if alpha != params.a && alpha != params.p as i64 {
        return Err(SharpnessError::BadAlpha);
    }
    let v = u64::from(disc_valuation(params.p, alpha)?);
    Ok(v + 1 - params.p)
}

// elements x -> ax + b are stored at index (a - 1) p + b, so x -> x + 1 is index 1
const TRANSLATION: usize = 1;

/// Fixed points of `x -> ax + b` on `F_p`, for the element at `idx`.
fn affine_fixed_points(p: u64, idx: usize) -> usize {
    let (a, b) = (idx as u64 / p + 1, idx as u64 % p);
    match (a, b) {
        (1, 0) => p as usize,
        (1, _) => 0,
        _ => 1,
    }
}

/// Inertia model `affine(p)` with `G_1 = ... = G_u = C_p` for `u = Sw(rho_{J_alpha})`,
/// together with the `(p-1)`-dimensional character (permutation character minus 1).
pub fn filtration_model_single(params: &FamilyParams, alpha: i64) -> Result<(Arc<InertiaModel>, Character)> {
    let p = params.p;
    let u = swan_jacobian(params, alpha)?;
    let g = shared_group(&GroupSpec::Affine { p })?;
    let translations = subgroup_generated(&g, &[TRANSLATION])?;
    let mut chain = vec![Subgroup::whole(&g)];
    chain.extend(std::iter::repeat_n(translations, u as usize));
    let model = InertiaModel::new(make_filtration(&g, chain)?, p)?;
    let perm = Character::permutation(&g, |x| affine_fixed_points(p, x));
    let chi = Character::try_from_class_function(
        perm.class_function().dsum(&Character::trivial(&g).class_function().scaled(-1))?,
        model.table(),
    )?;
    Ok((model, chi))
}

/// Characters of an elementary abelian wild group `C_p^rank`, each with its
/// Swan slope (break). Trivial characters are not stored.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BreakRep {
    pub p: u64,
    pub rank: usize,
    pub characters: Vec<(Vec<u64>, BreakValue)>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(transparent)]
pub struct BreakValue(#[serde(with = "rational::serde_text")] pub Rational);

impl BreakRep {
    pub fn empty(p: u64, rank: usize) -> Self {
        BreakRep {
            p,
            rank,
            characters: Vec::new(),
        }
    }

    /// Pointwise products of characters; the break of a product of two
    /// characters with different breaks is the larger one.
    pub fn tensor(&self, other: &BreakRep) -> Result<BreakRep> {
        if self.rank != other.rank || self.p != other.p {
            return Err(SharpnessError::RankMismatch);
        }
        let mut out = BreakRep::empty(self.p, self.rank);
        for (x, bx) in &self.characters {
            for (y, by) in &other.characters {
                let prod: Vec<u64> = x.iter().zip(y).map(|(a, b)| (a + b) % self.p).collect();
                if prod.iter().all(|&e| e == 0) {
                    continue;
                }
                if bx.0 == by.0 {
                    return Err(SharpnessError::AmbiguousBreak(x.clone(), y.clone(), rational::to_text(&bx.0)));
                }
                let b = if bx.0 > by.0 { bx.clone() } else { by.clone() };
                out.characters.push((prod, b));
            }
        }
        Ok(out)
    }

    pub fn dim(&self) -> u64 {
        self.characters.len() as u64
    }

    /// Sum of the breaks.
    pub fn swan(&self) -> Rational {
        self.characters.iter().fold(Rational::zero(), |acc, (_, b)| acc + &b.0)
    }
}

pub fn swan_break(rep: &BreakRep) -> Rational {
    rep.swan()
}

/// Wild inertia `C_p x C_p` of the compositum: `rho_{J_a}` restricts to the
/// characters `(i, 0)` with slope `1/(p-1)`, `rho_{J_p}` to `(0, j)` with
/// slope `p/(p-1)`.
pub fn joint_break_model(params: &FamilyParams) -> (BreakRep, BreakRep) {
    let p = params.p;
    let slope_a = BreakValue(rational::frac(1, p as i64 - 1));
    let slope_p = BreakValue(rational::frac(p as i64, p as i64 - 1));
    let ja = BreakRep {
        p,
        rank: 2,
        characters: (1..p).map(|i| (vec![i, 0], slope_a.clone())).collect(),
    };
    let jp = BreakRep {
        p,
        rank: 2,
        characters: (1..p).map(|j| (vec![0, j], slope_p.clone())).collect(),
    };
    (ja, jp)
}

/// Every intermediate value of the sharpness verification.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SharpnessReport {
    pub p: u64,
    pub a: i64,
    pub disc_valuation_a: u32,
    pub disc_valuation_p: u32,
    pub sw_a: u64,
    pub sw_p: u64,
    #[serde(with = "rational::serde_text")]
    pub sw_a_filtration: Rational,
    #[serde(with = "rational::serde_text")]
    pub sw_p_filtration: Rational,
    #[serde(with = "rational::serde_text")]
    pub a_a: Rational,
    #[serde(with = "rational::serde_text")]
    pub a_p: Rational,
    pub dim: u64,
    pub deg_a: u64,
    pub deg_p: u64,
    pub deg_tensor: u64,
    #[serde(with = "rational::serde_text")]
    pub sw_tensor: Rational,
    #[serde(with = "rational::serde_text")]
    pub a_tensor: Rational,
    #[serde(with = "rational::serde_text")]
    pub swan_bound_rhs: Rational,
    pub c_p: u64,
    #[serde(with = "rational::serde_text")]
    pub artin_bound_rhs: Rational,
    pub equal: bool,
}

pub fn verify_sharpness(params: &FamilyParams) -> Result<SharpnessReport> {
    let p = params.p;
    let pa = p as i64;
    let (model_a, chi_a) = filtration_model_single(params, params.a)?;
    let (model_p, chi_p) = filtration_model_single(params, pa)?;
    let sw_a_filtration = filtration::swan(&chi_a, model_a.filtration())?;
    let sw_p_filtration = filtration::swan(&chi_p, model_p.filtration())?;
    let a_a = filtration::artin(&chi_a, model_a.filtration())?;
    let a_p = filtration::artin(&chi_p, model_p.filtration())?;
    let g0 = Subgroup::whole(model_a.group());
    let deg_a = chi_a.fixed_dim(&g0)?;
    let deg_p = chi_p.fixed_dim(&g0)?;
    let dim = chi_a.dim();

    let (ja, jp) = joint_break_model(params);
    let tensor = ja.tensor(&jp)?;
    let sw_tensor = tensor.swan();
    // inertia invariants of the tensor lie in its wild invariants: the trivial characters
    let deg_tensor = dim * dim - tensor.dim();
    let a_tensor = rational::int((dim * dim - deg_tensor) as i64) + &sw_tensor;

    let sw_a = swan_jacobian(params, params.a)?;
    let sw_p = swan_jacobian(params, pa)?;
    let n = |x: u64| rational::int(x as i64);
    let wild_c = 2.max(p - 1);
    let swan_bound_rhs = n(dim) * n(sw_p) + n(dim) * n(sw_a) - n(wild_c) * n(sw_a.min(sw_p));
    let c_p = wild_c.min(dim - deg_a).min(dim - deg_p);
    let deg_terms = n(deg_tensor) - n(deg_a * deg_p);
    let artin_bound_rhs = n(dim) * &a_p + n(dim) * &a_a - n(c_p) * rational::min(&a_a, &a_p) - deg_terms;

    let equal = sw_a == 1
        && sw_p == p
        && sw_a_filtration == n(sw_a)
        && sw_p_filtration == n(sw_p)
        && ja.swan() == n(sw_a)
        && jp.swan() == n(sw_p)
        && a_a == n(dim) + n(sw_a)
        && a_p == n(dim) + n(sw_p)
        && sw_tensor == n(p * (p - 1))
        && a_tensor == n((2 * p - 1) * (p - 1))
        && sw_tensor == swan_bound_rhs
        && a_tensor == artin_bound_rhs;
    Ok(SharpnessReport {
        p,
        a: params.a,
        disc_valuation_a: disc_valuation(p, params.a)?,
        disc_valuation_p: disc_valuation(p, pa)?,
        sw_a,
        sw_p,
        sw_a_filtration,
        sw_p_filtration,
        a_a,
        a_p,
        dim,
        deg_a,
        deg_p,
        deg_tensor,
        sw_tensor,
        a_tensor,
        swan_bound_rhs,
        c_p,
        artin_bound_rhs,
        equal,
    })
}

/// Reports for every odd prime `p <= max_p`, each with its smallest valid `a`.
pub fn sweep(max_p: u64) -> Result<Vec<SharpnessReport>> {
    (3..=max_p)
        .filter(|&p| arith::is_prime(p))
        .collect::<Vec<_>>()
        .into_par_iter()
        .map(|p| verify_sharpness(&validate_params(p, smallest_valid_a(p)?)?))
        .collect()
}
