//! Weil-Deligne data as blocks `sigma_n (x) sp(n)` over a finite inertia model.
//!
//! Unramified twists are invisible on inertia and are dropped, so a
//! representation is stored as one inertia character per block size `n`.

use std::collections::BTreeMap;
use std::sync::Arc;

use num_traits::Zero;
use serde::Serialize;
use thiserror::Error;

use crate::arith;
use crate::character::{self, CharError, Character, CharacterTable};
use crate::filtration::{self, FiltrationError, Sides};
use crate::group::{Filtration, FiniteGroup, Subgroup};
use crate::rational::{self, Rational};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum WdError {
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("G_1 has order {order}, which is not a power of {p}")]
    WildNotPGroup { order: usize, p: u64 },
    #[error("representations use different inertia models")]
    ModelMismatch,
    #[error("invalid block: {0}")]
    BadBlock(String),
    #[error("tau is not symplectic on inertia")]
    NotSymplectic,
    #[error("sigma is not self-dual")]
    NotSelfDual,
    #[error("tau + 2 sigma does not have rational characteristic polynomials")]
    NotRational,
    #[error("A is not semistable (tau or sigma moves under G_0)")]
    NotSemistable,
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error(transparent)]
    Filtration(#[from] FiltrationError),
    #[error(transparent)]
    Char(#[from] CharError),
}

type Result<T> = std::result::Result<T, WdError>;

/// A finite model of inertia: lower-numbering ramification groups with
/// `G_0` the whole group, together with the residue characteristic.
#[derive(Debug)]
pub struct InertiaModel {
    filtration: Filtration,
    p: u64,
    table: CharacterTable,
}

impl InertiaModel {
    pub fn new(filtration: Filtration, p: u64) -> Result<Arc<Self>> {
        if !arith::is_prime(p) {
            return Err(WdError::NotPrime(p));
        }
        let wild = filtration.step(1).map_or(1, Subgroup::order);
        if wild > 1 && arith::prime_power(wild as u64).map(|(q, _)| q) != Some(p) {
            return Err(WdError::WildNotPGroup { order: wild, p });
        }
        let table = character::character_table(filtration.group())?;
        Ok(Arc::new(InertiaModel { filtration, p, table }))
    }

    pub fn group(&self) -> &Arc<FiniteGroup> {
        self.filtration.group()
    }

    pub fn filtration(&self) -> &Filtration {
        &self.filtration
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn table(&self) -> &CharacterTable {
        &self.table
    }

    fn inertia(&self) -> &Subgroup {
        &self.filtration.steps()[0]
    }

    fn same(self: &Arc<Self>, other: &Arc<Self>) -> bool {
        Arc::ptr_eq(self, other)
            || (self.p == other.p
                && self.group() == other.group()
                && self.filtration.steps() == other.filtration.steps())
    }
}

/// `[n + m + 1 - 2i for i in 1..=min(n, m)]`: block sizes of `sp(n) (x) sp(m)`.
pub fn clebsch_gordan(n: u32, m: u32) -> Vec<u32> {
    (1..=n.min(m)).map(|i| n + m + 1 - 2 * i).collect()
}

/// `(+)_n sigma_n (x) sp(n)`, one inertia character per block size.
#[derive(Clone, Debug)]
pub struct WdRep {
    model: Arc<InertiaModel>,
    blocks: BTreeMap<u32, Character>,
}

impl PartialEq for WdRep {
    fn eq(&self, other: &Self) -> bool {
        self.model.same(&other.model) && self.blocks == other.blocks
    }
}

impl WdRep {
    pub fn zero(model: &Arc<InertiaModel>) -> Self {
        WdRep {
            model: model.clone(),
            blocks: BTreeMap::new(),
        }
    }

    /// The single block `sigma (x) sp(n)`.
    pub fn block(model: &Arc<InertiaModel>, sigma: Character, n: u32) -> Result<Self> {
        let mut rep = WdRep::zero(model);
        rep.add_block(sigma, n)?;
        Ok(rep)
    }

    fn add_block(&mut self, sigma: Character, n: u32) -> Result<()> {
        if n == 0 {
            return Err(WdError::BadBlock("sp(0) is not a representation".into()));
        }
        if sigma.group() != self.model.group() {
            return Err(WdError::ModelMismatch);
        }
        if sigma.dim() == 0 {
            return Ok(());
        }
        let merged = match self.blocks.remove(&n) {
            Some(old) => old.dsum(&sigma)?,
            None => sigma,
        };
        self.blocks.insert(n, merged);
        Ok(())
    }

    pub fn model(&self) -> &Arc<InertiaModel> {
        &self.model
    }

    pub fn blocks(&self) -> impl Iterator<Item = (u32, &Character)> {
        self.blocks.iter().map(|(&n, s)| (n, s))
    }

    fn check_model(&self, other: &WdRep) -> Result<()> {
        if self.model.same(&other.model) {
            Ok(())
        } else {
            Err(WdError::ModelMismatch)
        }
    }

    pub fn dsum(&self, other: &WdRep) -> Result<WdRep> {
        self.check_model(other)?;
        let mut out = self.clone();
        for (n, s) in other.blocks() {
            out.add_block(s.clone(), n)?;
        }
        Ok(out)
    }

    /// Bilinear over blocks, splitting `sp(n) (x) sp(m)` by [`clebsch_gordan`].
    pub fn tensor(&self, other: &WdRep) -> Result<WdRep> {
        self.check_model(other)?;
        let mut out = WdRep::zero(&self.model);
        for (n, s) in self.blocks() {
            for (m, t) in other.blocks() {
                let st = s.tensor(t)?;
                for k in clebsch_gordan(n, m) {
                    out.add_block(st.clone(), k)?;
                }
            }
        }
        Ok(out)
    }

    pub fn dim(&self) -> u64 {
        self.blocks().map(|(n, s)| u64::from(n) * s.dim()).sum()
    }

    /// `sum_n n a(sigma_n) + (n - 1) dim sigma_n^{G_0}`.
    pub fn artin_conductor(&self) -> Result<Rational> {
        let f = self.model.filtration();
        let mut total = Rational::zero();
        for (n, s) in self.blocks() {
            let fixed = s.fixed_dim(self.model.inertia())?;
            total += rational::int(i64::from(n)) * filtration::artin(s, f)?
                + rational::int((i64::from(n) - 1) * fixed as i64);
        }
        Ok(total)
    }

    /// `sum_n n Sw(sigma_n)`.
    pub fn swan_conductor(&self) -> Result<Rational> {
        let f = self.model.filtration();
        let mut total = Rational::zero();
        for (n, s) in self.blocks() {
            total += rational::int(i64::from(n)) * filtration::swan(s, f)?;
        }
        Ok(total)
    }

    /// `sum_n dim sigma_n^{G_0}`: one inertia-invariant line per block.
    pub fn degree(&self) -> Result<u64> {
        let mut total = 0;
        for (_, s) in self.blocks() {
            total += s.fixed_dim(self.model.inertia())?;
        }
        Ok(total)
    }

    /// `sum_n n sigma_n`, the restriction to inertia forgetting monodromy.
    pub fn inertia_character(&self) -> Result<Character> {
        let mut out = Character::zero(self.model.group());
        for (n, s) in self.blocks() {
            out = out.dsum(&s.times(u64::from(n)))?;
        }
        Ok(out)
    }
}

/// `rho = tau (+) sigma (x) sp(2)` with `tau` symplectic on inertia, `sigma`
/// self-dual, and `tau + 2 sigma` with rational characteristic polynomials.
#[derive(Clone, Debug)]
pub struct AbVarDatum {
    model: Arc<InertiaModel>,
    tau: Character,
    sigma: Character,
}

impl AbVarDatum {
    pub fn new(model: &Arc<InertiaModel>, tau: Character, sigma: Character) -> Result<Self> {
        if tau.group() != model.group() || sigma.group() != model.group() {
            return Err(WdError::ModelMismatch);
        }
        if !character::is_symplectic(&tau, model.table())? {
            return Err(WdError::NotSymplectic);
        }
        if sigma.dual() != sigma {
            return Err(WdError::NotSelfDual);
        }
        if !character::is_rational_charpoly(tau.dsum(&sigma.times(2))?.class_function()) {
            return Err(WdError::NotRational);
        }
        Ok(AbVarDatum {
            model: model.clone(),
            tau,
            sigma,
        })
    }

    /// From multiplicity vectors in the order of the model's character table.
    pub fn from_multiplicities(model: &Arc<InertiaModel>, tau: &[u64], sigma: &[u64]) -> Result<Self> {
        let t = Character::from_multiplicities(model.table(), tau)?;
        let s = Character::from_multiplicities(model.table(), sigma)?;
        Self::new(model, t, s)
    }

    /// Semistable shape: `tau = m 1`, `sigma = n 1` on inertia.
    pub fn semistable(model: &Arc<InertiaModel>, m: u64, n: u64) -> Result<Self> {
        let one = Character::trivial(model.group());
        Self::new(model, one.times(m), one.times(n))
    }

    pub fn model(&self) -> &Arc<InertiaModel> {
        &self.model
    }

    pub fn tau(&self) -> &Character {
        &self.tau
    }

    pub fn sigma(&self) -> &Character {
        &self.sigma
    }

    pub fn rho(&self) -> WdRep {
        let mut rep = WdRep::zero(&self.model);
        rep.add_block(self.tau.clone(), 1).expect("tau lives on the model group");
        rep.add_block(self.sigma.clone(), 2).expect("sigma lives on the model group");
        rep
    }

    pub fn is_semistable(&self) -> Result<bool> {
        let g0 = self.model.inertia();
        Ok(self.tau.fixed_dim(g0)? == self.tau.dim() && self.sigma.fixed_dim(g0)? == self.sigma.dim())
    }
}

/// Every local quantity entering the tensor-product bounds for a pair.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PairQuantities {
    pub p: u64,
    pub dim_a: u64,
    pub dim_b: u64,
    #[serde(with = "rational::serde_text")]
    pub a_a: Rational,
    #[serde(with = "rational::serde_text")]
    pub a_b: Rational,
    #[serde(with = "rational::serde_text")]
    pub sw_a: Rational,
    #[serde(with = "rational::serde_text")]
    pub sw_b: Rational,
    pub deg_a: u64,
    pub deg_b: u64,
    #[serde(with = "rational::serde_text")]
    pub a_ab: Rational,
    #[serde(with = "rational::serde_text")]
    pub sw_ab: Rational,
    pub deg_ab: u64,
    pub dim_ab: u64,
}

fn q(n: u64) -> Rational {
    rational::int(n as i64)
}

/// Output of the general bound.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct MainBound {
    #[serde(with = "rational::serde_text")]
    pub lhs: Rational,
    #[serde(with = "rational::serde_text")]
    pub rhs: Rational,
    pub c_p: u64,
    /// Right side of the exact formula, present when one conductor is at most 1.
    #[serde(with = "rational::serde_text_opt")]
    pub exact_rhs: Option<Rational>,
}

/// Output of the uniform bound with coefficient 2.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SimplifiedBound {
    #[serde(with = "rational::serde_text")]
    pub lhs: Rational,
    #[serde(with = "rational::serde_text")]
    pub rhs: Rational,
    pub delta: u64,
}

impl PairQuantities {
    pub fn new(a: &AbVarDatum, b: &AbVarDatum) -> Result<Self> {
        let (ra, rb) = (a.rho(), b.rho());
        let rab = ra.tensor(&rb)?;
        Ok(PairQuantities {
            p: a.model.p(),
            dim_a: ra.dim(),
            dim_b: rb.dim(),
            a_a: ra.artin_conductor()?,
            a_b: rb.artin_conductor()?,
            sw_a: ra.swan_conductor()?,
            sw_b: rb.swan_conductor()?,
            deg_a: ra.degree()?,
            deg_b: rb.degree()?,
            a_ab: rab.artin_conductor()?,
            sw_ab: rab.swan_conductor()?,
            deg_ab: rab.degree()?,
            dim_ab: rab.dim(),
        })
    }

    /// `deg(A x B) - deg(A) deg(B)`.
    pub fn degree_excess(&self) -> Result<u64> {
        self.deg_ab
            .checked_sub(self.deg_a * self.deg_b)
            .ok_or_else(|| WdError::Precondition("degree of the tensor product below the product of degrees".into()))
    }

    fn wild_coefficient(&self) -> u64 {
        2.max(self.p - 1)
    }

    /// `|rho_A| a(rho_B) + deg(B) a(rho_A) - (deg(A x B) - deg(A) deg(B))`.
    fn exact_formula(&self) -> Result<Rational> {
        Ok(q(self.dim_a) * &self.a_b + q(self.deg_b) * &self.a_a - q(self.degree_excess()?))
    }

    pub fn semistable_equality(&self) -> Result<Sides> {
        Ok(Sides::new(self.a_ab.clone(), self.exact_formula()?))
    }

    /// `Sw(rho_A x rho_B) <= |rho_A| Sw(rho_B) + |rho_B| Sw(rho_A) - max{2, p-1} min Sw`.
    pub fn swan_bound(&self) -> Sides {
        let rhs = q(self.dim_a) * &self.sw_b + q(self.dim_b) * &self.sw_a
            - q(self.wild_coefficient()) * rational::min(&self.sw_a, &self.sw_b);
        Sides::new(self.sw_ab.clone(), rhs)
    }

    /// Codimension of inertia invariants in the tensor product against its
    /// four-term expansion. Requires both conductors above 1.
    pub fn tame_identity(&self) -> Result<Sides> {
        let one = rational::int(1);
        if self.a_a <= one || self.a_b <= one {
            return Err(WdError::Precondition("both conductors must exceed 1".into()));
        }
        let lhs = q(self.dim_ab) - q(self.deg_ab);
        let ta = q(self.dim_a - self.deg_a);
        let tb = q(self.dim_b - self.deg_b);
        let rhs = q(self.dim_a) * &tb + q(self.dim_b) * &ta - &ta * &tb - q(self.degree_excess()?);
        Ok(Sides::new(lhs, rhs))
    }

    pub fn c_p(&self) -> u64 {
        self.wild_coefficient()
            .min(self.dim_a - self.deg_a)
            .min(self.dim_b - self.deg_b)
    }

    pub fn main_bound(&self) -> Result<MainBound> {
        let c_p = self.c_p();
        let rhs = q(self.dim_a) * &self.a_b + q(self.dim_b) * &self.a_a
            - q(c_p) * rational::min(&self.a_a, &self.a_b)
            - q(self.degree_excess()?);
        let one = rational::int(1);
        let exact_rhs = if self.a_a <= one {
            Some(self.exact_formula()?)
        } else if self.a_b <= one {
            Some(self.swapped().exact_formula()?)
        } else {
            None
        };
        Ok(MainBound {
            lhs: self.a_ab.clone(),
            rhs,
            c_p,
            exact_rhs,
        })
    }

    pub fn simplified_bound(&self) -> Result<SimplifiedBound> {
        let delta = if &self.a_a * &self.a_b > rational::int(1) {
            self.degree_excess()?
        } else {
            0
        };
        let rhs = q(self.dim_a) * &self.a_b + q(self.dim_b) * &self.a_a
            - rational::int(2) * rational::min(&self.a_a, &self.a_b)
            - q(delta);
        Ok(SimplifiedBound {
            lhs: self.a_ab.clone(),
            rhs,
            delta,
        })
    }

    fn swapped(&self) -> PairQuantities {
        PairQuantities {
            dim_a: self.dim_b,
            dim_b: self.dim_a,
            a_a: self.a_b.clone(),
            a_b: self.a_a.clone(),
            sw_a: self.sw_b.clone(),
            sw_b: self.sw_a.clone(),
            deg_a: self.deg_b,
            deg_b: self.deg_a,
            ..self.clone()
        }
    }
}

fn check_pair(a: &AbVarDatum, b: &AbVarDatum) -> Result<()> {
    if a.model.same(&b.model) {
        Ok(())
    } else {
        Err(WdError::ModelMismatch)
    }
}

/// Exact conductor of `rho_A x rho_B` for semistable `A`.
pub fn semistable_equality(a: &AbVarDatum, b: &AbVarDatum) -> Result<Sides> {
    check_pair(a, b)?;
    if !a.is_semistable()? {
        return Err(WdError::NotSemistable);
    }
    PairQuantities::new(a, b)?.semistable_equality()
}

pub fn swan_bound(a: &AbVarDatum, b: &AbVarDatum) -> Result<Sides> {
    check_pair(a, b)?;
    Ok(PairQuantities::new(a, b)?.swan_bound())
}

pub fn tame_identity(a: &AbVarDatum, b: &AbVarDatum) -> Result<Sides> {
    check_pair(a, b)?;
    PairQuantities::new(a, b)?.tame_identity()
}

pub fn main_bound(a: &AbVarDatum, b: &AbVarDatum) -> Result<MainBound> {
    check_pair(a, b)?;
    PairQuantities::new(a, b)?.main_bound()
}

pub fn simplified_bound(a: &AbVarDatum, b: &AbVarDatum) -> Result<SimplifiedBound> {
    check_pair(a, b)?;
    PairQuantities::new(a, b)?.simplified_bound()
}

/// `deg(rho_A x rho_A) - deg(rho_A)^2`.
pub fn degree_gap(a: &AbVarDatum) -> Result<i64> {
    let rho = a.rho();
    let d = rho.degree()? as i64;
    Ok(rho.tensor(&rho)?.degree()? as i64 - d * d)
}

/// Conductor of `(sigma (x) sp(n)) (x) sp(m)` computed through the block
/// expansion, against `nm a(sigma) + dim sigma^{G_0} (nm - min(n, m))`.
pub fn special_tensor_sides(model: &Arc<InertiaModel>, sigma: &Character, n: u32, m: u32) -> Result<Sides> {
    let one = Character::trivial(model.group());
    let expanded = WdRep::block(model, sigma.clone(), n)?.tensor(&WdRep::block(model, one, m)?)?;
    let nm = i64::from(n * m);
    let fixed = sigma.fixed_dim(model.inertia())? as i64;
    let closed = rational::int(nm) * filtration::artin(sigma, model.filtration())?
        + rational::int(fixed * (nm - i64::from(n.min(m))));
    Ok(Sides::new(expanded.artin_conductor()?, closed))
}
