//! Class functions, characters and character tables.
//!
//! Representations are modelled by their characters only. Every quantity the
//! conductor calculus needs (dimensions of fixed spaces, multiplicities,
//! indicators) is an exact average of character values over a subgroup.

use std::fmt;
use std::ops::Deref;
use std::sync::Arc;

use num_traits::Signed;
use thiserror::Error;

use crate::arith;
use crate::cyclo::{CycloError, CycloNum};
use crate::dixon;
use crate::group::{FiniteGroup, Subgroup};
use crate::rational::{self, Rational};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CharError {
    #[error("class functions live on different groups")]
    GroupMismatch,
    #[error("not a character: {0}")]
    NonCharacter(String),
    #[error("class function is not irreducible (<psi, psi> = {0})")]
    NotIrreducible(String),
    #[error("value is not rational: {0}")]
    NotRational(String),
    #[error("expected {expected} values, got {got}")]
    WrongLength { expected: usize, got: usize },
    #[error("character table: {0}")]
    Table(String),
    #[error(transparent)]
    Cyclo(#[from] CycloError),
}

/// A function on a group that is constant on conjugacy classes.
#[derive(Clone)]
pub struct ClassFunction {
    group: Arc<FiniteGroup>,
    values: Vec<CycloNum>,
}

impl fmt::Debug for ClassFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let vals: Vec<String> = self.values.iter().map(|v| v.to_string()).collect();
        write!(f, "ClassFunction[{}]", vals.join(", "))
    }
}

impl PartialEq for ClassFunction {
    fn eq(&self, other: &Self) -> bool {
        self.group == other.group && self.values == other.values
    }
}

impl Eq for ClassFunction {}

/// `sum_C weights[C] * values[C]`.
fn weighted_sum(values: &[CycloNum], weights: &[usize]) -> CycloNum {
    let n = values.first().map_or(1, CycloNum::conductor);
    values
        .iter()
        .zip(weights)
        .filter(|(_, &w)| w > 0)
        .fold(CycloNum::zero(n), |acc, (v, &w)| {
            &acc + &v.scale(&rational::int(w as i64))
        })
}

impl ClassFunction {
    pub fn new(group: Arc<FiniteGroup>, values: Vec<CycloNum>) -> Result<Self, CharError> {
        if values.len() != group.num_classes() {
            return Err(CharError::WrongLength {
                expected: group.num_classes(),
                got: values.len(),
            });
        }
        Ok(ClassFunction { group, values })
    }

    /// Builds values from a function of the class representative.
    pub fn from_fn(group: &Arc<FiniteGroup>, f: impl Fn(usize) -> CycloNum) -> Self {
        let values = (0..group.num_classes()).map(|c| f(group.class_rep(c))).collect();
        ClassFunction {
            group: group.clone(),
            values,
        }
    }

    pub fn constant(group: &Arc<FiniteGroup>, v: i64) -> Self {
        Self::from_fn(group, |_| CycloNum::from_int(v))
    }

    pub fn group(&self) -> &Arc<FiniteGroup> {
        &self.group
    }

    pub fn values(&self) -> &[CycloNum] {
        &self.values
    }

    pub fn value_at_class(&self, c: usize) -> &CycloNum {
        &self.values[c]
    }

    pub fn value_at(&self, g: usize) -> &CycloNum {
        &self.values[self.group.class_of(g)]
    }

    fn same_group(&self, other: &Self) -> Result<(), CharError> {
        if Arc::ptr_eq(&self.group, &other.group) || self.group == other.group {
            Ok(())
        } else {
            Err(CharError::GroupMismatch)
        }
    }

    fn zip_with(
        &self,
        other: &Self,
        f: impl Fn(&CycloNum, &CycloNum) -> CycloNum,
    ) -> Result<Self, CharError> {
        self.same_group(other)?;
        Ok(ClassFunction {
            group: self.group.clone(),
            values: self.values.iter().zip(&other.values).map(|(a, b)| f(a, b)).collect(),
        })
    }

    /// Pointwise product.
    pub fn tensor(&self, other: &Self) -> Result<Self, CharError> {
        self.zip_with(other, |a, b| a * b)
    }

    /// Pointwise sum.
    pub fn dsum(&self, other: &Self) -> Result<Self, CharError> {
        self.zip_with(other, |a, b| a + b)
    }

    pub fn scaled(&self, k: i64) -> Self {
        let k = rational::int(k);
        ClassFunction {
            group: self.group.clone(),
            values: self.values.iter().map(|v| v.scale(&k)).collect(),
        }
    }

    /// `g -> f(g^-1)`.
    pub fn dual(&self) -> Self {
        let g = &self.group;
        let values = (0..g.num_classes())
            .map(|c| self.values[g.power_class(c, -1)].clone())
            .collect();
        ClassFunction {
            group: g.clone(),
            values,
        }
    }

    /// Restriction to `h`, re-indexed by the classes of `h` as a group.
    pub fn restrict(&self, h: &Subgroup) -> Result<ClassFunction, CharError> {
        if h.parent() != &self.group {
            return Err(CharError::GroupMismatch);
        }
        let (sub, embed) = h.as_group();
        let sub = Arc::new(sub);
        let values = (0..sub.num_classes())
            .map(|c| self.value_at(embed[sub.class_rep(c)]).clone())
            .collect();
        Ok(ClassFunction { group: sub, values })
    }

    /// `(1/|H|) sum_{h in H} f(h) conj(g(h))` as a cyclotomic number.
    pub fn inner_product_value(&self, other: &Self, h: &Subgroup) -> Result<CycloNum, CharError> {
        self.same_group(other)?;
        if h.parent() != &self.group {
            return Err(CharError::GroupMismatch);
        }
        let products: Vec<CycloNum> = self
            .values
            .iter()
            .zip(&other.values)
            .zip(h.class_counts())
            .map(|((a, b), &w)| if w == 0 { CycloNum::zero(1) } else { a * &b.conj() })
            .collect();
        let sum = weighted_sum(&products, h.class_counts());
        Ok(sum.scale(&rational::frac(1, h.order() as i64)))
    }

    /// The inner product over `h`, which must come out rational.
    pub fn inner_product(&self, other: &Self, h: &Subgroup) -> Result<Rational, CharError> {
        let v = self.inner_product_value(other, h)?;
        v.to_rational().ok_or_else(|| CharError::NotRational(v.to_string()))
    }

    /// `<Res_H f, 1>_H`, required to be a nonnegative integer.
    pub fn fixed_dim(&self, h: &Subgroup) -> Result<u64, CharError> {
        if h.parent() != &self.group {
            return Err(CharError::GroupMismatch);
        }
        let sum = weighted_sum(&self.values, h.class_counts());
        let avg = sum.scale(&rational::frac(1, h.order() as i64));
        match avg.to_rational().and_then(|q| rational::as_integer(&q)) {
            Some(n) if !n.is_negative() => Ok(u64::try_from(n).expect("fixed dimension fits u64")),
            _ => Err(CharError::NonCharacter(format!("fixed-space average {avg}"))),
        }
    }

    /// Value at the identity as a rational.
    pub fn degree_value(&self) -> Rational {
        self.values[0].to_rational().expect("value at identity is rational for characters")
    }

    pub fn is_zero(&self) -> bool {
        self.values.iter().all(CycloNum::is_zero)
    }
}

/// A class function known to be the character of a representation.
#[derive(Clone, PartialEq, Eq)]
pub struct Character(ClassFunction);

impl fmt::Debug for Character {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Character{:?}", self.0.values.iter().map(|v| v.to_string()).collect::<Vec<_>>())
    }
}

impl Deref for Character {
    type Target = ClassFunction;
    fn deref(&self) -> &ClassFunction {
        &self.0
    }
}

impl Character {
    #[cfg(test)]
    pub(crate) fn trusted(cf: ClassFunction) -> Self {
        Character(cf)
    }

    pub fn trivial(group: &Arc<FiniteGroup>) -> Self {
        Character(ClassFunction::constant(group, 1))
    }

    pub fn zero(group: &Arc<FiniteGroup>) -> Self {
        Character(ClassFunction::constant(group, 0))
    }

    pub fn regular(group: &Arc<FiniteGroup>) -> Self {
        let n = group.order() as i64;
        Character(ClassFunction::from_fn(group, |g| CycloNum::from_int(if g == 0 { n } else { 0 })))
    }

    /// Permutation character of an action given as `g -> number of fixed points`.
    pub fn permutation(group: &Arc<FiniteGroup>, fixed_points: impl Fn(usize) -> usize) -> Self {
        Character(ClassFunction::from_fn(group, |g| CycloNum::from_int(fixed_points(g) as i64)))
    }

    /// `sum_i m_i psi_i` over the irreducibles of `table`, in table order.
    pub fn from_multiplicities(table: &CharacterTable, mult: &[u64]) -> Result<Self, CharError> {
        let irr = table.len();
        if mult.len() != irr {
            return Err(CharError::WrongLength {
                expected: irr,
                got: mult.len(),
            });
        }
        let g = table.group();
        let n = g.exponent();
        let mut values = vec![CycloNum::zero(n); g.num_classes()];
        for (i, &m) in mult.iter().enumerate() {
            if m == 0 {
                continue;
            }
            let m = rational::int(m as i64);
            for (acc, v) in values.iter_mut().zip(&table.data.rows[i]) {
                *acc = &*acc + &v.scale(&m);
            }
        }
        Ok(Character(ClassFunction {
            group: g.clone(),
            values,
        }))
    }

    /// Accepts `cf` if its decomposition has nonnegative integer multiplicities.
    pub fn try_from_class_function(cf: ClassFunction, table: &CharacterTable) -> Result<Self, CharError> {
        table.decompose(&cf)?;
        Ok(Character(cf))
    }

    pub fn class_function(&self) -> &ClassFunction {
        &self.0
    }

    pub fn into_class_function(self) -> ClassFunction {
        self.0
    }

    /// `|tau|`.
    pub fn dim(&self) -> u64 {
        let d = self.0.degree_value();
        u64::try_from(d.to_integer()).expect("character degree is a nonnegative integer")
    }

    pub fn tensor(&self, other: &Character) -> Result<Character, CharError> {
        self.0.tensor(&other.0).map(Character)
    }

    pub fn dsum(&self, other: &Character) -> Result<Character, CharError> {
        self.0.dsum(&other.0).map(Character)
    }

    pub fn dual(&self) -> Character {
        Character(self.0.dual())
    }

    pub fn times(&self, k: u64) -> Character {
        Character(self.0.scaled(k as i64))
    }

    pub fn restrict(&self, h: &Subgroup) -> Result<Character, CharError> {
        self.0.restrict(h).map(Character)
    }
}

/// Cached per-group table data; rows follow the sorted irreducible order.
#[derive(Debug)]
pub struct TableData {
    pub(crate) rows: Vec<Vec<CycloNum>>,
    pub(crate) prime: u64,
    indicators: Vec<i8>,
    duals: Vec<usize>,
    orbits: Vec<Vec<usize>>,
}

/// The complete list of irreducible characters of a group.
#[derive(Clone)]
pub struct CharacterTable {
    group: Arc<FiniteGroup>,
    data: Arc<TableData>,
}

impl fmt::Debug for CharacterTable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("CharacterTable")
            .field("group", &self.group)
            .field("irreducibles", &self.data.rows.len())
            .finish()
    }
}

/// Computes (once per group) and returns the character table.
pub fn character_table(group: &Arc<FiniteGroup>) -> Result<CharacterTable, CharError> {
    let data = group
        .raw_table
        .get_or_init(|| build_table_data(group).map(Arc::new))
        .clone()
        .map_err(CharError::Table)?;
    Ok(CharacterTable {
        group: group.clone(),
        data,
    })
}

fn build_table_data(g: &Arc<FiniteGroup>) -> Result<TableData, String> {
    let raw = dixon::compute(g)?;
    let rows = raw.rows;
    let r = rows.len();
    let find_row = |vals: &[CycloNum]| rows.iter().position(|row| row.as_slice() == vals);

    let mut duals = Vec::with_capacity(r);
    let mut indicators = Vec::with_capacity(r);
    for row in &rows {
        let dual: Vec<CycloNum> = (0..g.num_classes()).map(|c| row[g.power_class(c, -1)].clone()).collect();
        duals.push(find_row(&dual).ok_or("dual of an irreducible is missing from the table")?);
        let squares: Vec<CycloNum> = (0..g.num_classes()).map(|c| row[g.power_class(c, 2)].clone()).collect();
        let sizes: Vec<usize> = (0..g.num_classes()).map(|c| g.class_size(c)).collect();
        let nu = weighted_sum(&squares, &sizes)
            .scale(&rational::frac(1, g.order() as i64))
            .to_rational()
            .and_then(|q| rational::as_integer(&q))
            .ok_or("indicator is not an integer")?;
        indicators.push(i8::try_from(nu).map_err(|_| "indicator out of range")?);
    }

    let e = g.exponent();
    let mut orbit_of = vec![usize::MAX; r];
    let mut orbits = Vec::new();
    for i in 0..r {
        if orbit_of[i] != usize::MAX {
            continue;
        }
        let mut orbit = Vec::new();
        for k in 1..=e {
            if arith::gcd(k, e) != 1 {
                continue;
            }
            let conj: Vec<CycloNum> = (0..g.num_classes())
                .map(|c| rows[i][g.power_class(c, k as i64)].clone())
                .collect();
            let j = find_row(&conj).ok_or("galois conjugate missing from the table")?;
            if orbit_of[j] == usize::MAX {
                orbit_of[j] = orbits.len();
                orbit.push(j);
            }
        }
        orbit.sort_unstable();
        orbits.push(orbit);
    }
    Ok(TableData {
        rows,
        prime: raw.prime,
        indicators,
        duals,
        orbits,
    })
}

impl CharacterTable {
    pub fn group(&self) -> &Arc<FiniteGroup> {
        &self.group
    }

    pub fn len(&self) -> usize {
        self.data.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.data.rows.is_empty()
    }

    /// The prime field used to compute the table.
    pub fn prime(&self) -> u64 {
        self.data.prime
    }

    pub fn irreducible(&self, i: usize) -> Character {
        Character(ClassFunction {
            group: self.group.clone(),
            values: self.data.rows[i].clone(),
        })
    }

    pub fn irreducibles(&self) -> Vec<Character> {
        (0..self.len()).map(|i| self.irreducible(i)).collect()
    }

    pub fn degrees(&self) -> Vec<u64> {
        (0..self.len()).map(|i| self.irreducible(i).dim()).collect()
    }

    /// Frobenius-Schur indicator of irreducible `i`.
    pub fn indicator(&self, i: usize) -> i8 {
        self.data.indicators[i]
    }

    /// Index of the dual of irreducible `i`.
    pub fn dual_index(&self, i: usize) -> usize {
        self.data.duals[i]
    }

    /// Orbits of the irreducibles under `Gal(Q(zeta_e)/Q)`.
    pub fn galois_orbits(&self) -> &[Vec<usize>] {
        &self.data.orbits
    }

    /// Multiplicities `<f, psi_i>_G`, required to be nonnegative integers.
    pub fn decompose(&self, f: &ClassFunction) -> Result<Vec<u64>, CharError> {
        if f.group() != &self.group {
            return Err(CharError::GroupMismatch);
        }
        let whole = Subgroup::whole(&self.group);
        (0..self.len())
            .map(|i| {
                let ip = f.inner_product_value(&self.irreducible(i), &whole)?;
                ip.to_rational()
                    .and_then(|q| rational::as_integer(&q))
                    .filter(|n| !n.is_negative())
                    .map(|n| u64::try_from(n).expect("multiplicity fits u64"))
                    .ok_or_else(|| CharError::NonCharacter(format!("multiplicity {ip} of irreducible {i}")))
            })
            .collect()
    }
}

/// `(1/|G|) sum_g psi(g^2)` for an irreducible `psi`.
pub fn frobenius_schur(psi: &ClassFunction) -> Result<i8, CharError> {
    let g = psi.group();
    let whole = Subgroup::whole(g);
    let norm = psi.inner_product_value(psi, &whole)?;
    if norm != CycloNum::from_int(1) {
        return Err(CharError::NotIrreducible(norm.to_string()));
    }
    let squares: Vec<CycloNum> = (0..g.num_classes()).map(|c| psi.values()[g.power_class(c, 2)].clone()).collect();
    let nu = weighted_sum(&squares, whole.class_counts()).scale(&rational::frac(1, g.order() as i64));
    nu.to_rational()
        .and_then(|q| rational::as_integer(&q))
        .and_then(|n| i8::try_from(n).ok())
        .filter(|n| (-1..=1).contains(n))
        .ok_or_else(|| CharError::NotRational(nu.to_string()))
}

/// Existence of an invariant non-degenerate alternating form, by the
/// multiplicity criterion: indicator `+1` constituents occur with even
/// multiplicity and indicator `0` constituents as often as their duals.
pub fn is_symplectic(chi: &ClassFunction, table: &CharacterTable) -> Result<bool, CharError> {
    let mult = table.decompose(chi)?;
    Ok(mult.iter().enumerate().all(|(i, &m)| match table.indicator(i) {
        1 => m % 2 == 0,
        0 => m == mult[table.dual_index(i)],
        _ => true,
    }))
}

/// True iff `chi(g^k) = chi(g)` for all `g` and all `k` prime to the order of `g`.
///
/// The values `chi(g^j)` are the power sums of the eigenvalues of `tau(g)`;
/// by Newton's identities in characteristic zero their rationality is
/// equivalent to rationality of the characteristic polynomial.
pub fn is_rational_charpoly(chi: &ClassFunction) -> bool {
    let g = chi.group();
    (0..g.num_classes()).all(|c| {
        let o = g.element_order(g.class_rep(c)) as u64;
        (1..o.max(1))
            .filter(|&k| arith::gcd(k, o) == 1)
            .all(|k| chi.values()[g.power_class(c, k as i64)] == chi.values()[c])
    })
}

/// Convenience: `|tau| - dim tau^H`.
pub fn codim_fixed(chi: &Character, h: &Subgroup) -> Result<u64, CharError> {
    Ok(chi.dim() - chi.fixed_dim(h)?)
}
