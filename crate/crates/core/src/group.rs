//! Finite groups as dense multiplication tables, their subgroups, and
//! descending subgroup chains (filtrations).
//!
//! Every named construction is produced from a concrete model (integers mod
//! `n`, signed quaternion units, unitriangular matrices, affine maps of `F_p`)
//! and then converted to a validated table. The identity is always element 0
//! and conjugacy classes are ordered by their smallest element, so the
//! identity class is class 0.

use std::collections::{BTreeSet, HashMap};
use std::fmt;
use std::hash::Hash;
use std::sync::{Arc, OnceLock};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::arith;
use crate::character::TableData;

pub const DEFAULT_ORDER_CAP: usize = 2048;

/// Orders up to this bound get an exhaustive associativity check.
const EXHAUSTIVE_ASSOC_LIMIT: usize = 256;
const SAMPLED_ASSOC_TRIPLES: usize = 200_000;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GroupError {
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("group order {order} exceeds the configured cap {cap}")]
    OrderCap { order: u128, cap: usize },
    #[error("invalid parameter: {0}")]
    BadParameter(String),
    #[error("multiplication table is not a group: {0}")]
    InvalidTable(String),
    #[error("element {0} out of range")]
    ElementOutOfRange(usize),
    #[error("unknown element label {0:?}")]
    UnknownLabel(String),
    #[error("filtration must start at the whole group")]
    NotStartingAtGroup,
    #[error("filtration is not descending at step {0}")]
    NotDescending(usize),
    #[error("filtration chain is empty")]
    EmptyChain,
    #[error("subgroups belong to different groups")]
    GroupMismatch,
}

/// Construction descriptor, also the wire form `{"kind": "affine", "p": 5}`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum GroupSpec {
    Cyclic { n: u64 },
    ElementaryAbelian { p: u64, k: u32 },
    Dihedral { n: u64 },
    Quaternion8,
    Heisenberg { p: u64 },
    /// `F_p` semidirect `F_p^*` acting faithfully, i.e. the maps `x -> ax + b`.
    Affine { p: u64 },
    DirectProduct { factors: Vec<GroupSpec> },
}

impl GroupSpec {
    /// Group order implied by the descriptor, without building anything.
    pub fn order(&self) -> Result<u128, GroupError> {
        Ok(match self {
            GroupSpec::Cyclic { n } => *n as u128,
            GroupSpec::ElementaryAbelian { p, k } => (*p as u128).saturating_pow(*k),
            GroupSpec::Dihedral { n } => 2 * *n as u128,
            GroupSpec::Quaternion8 => 8,
            GroupSpec::Heisenberg { p } => (*p as u128).pow(3),
            GroupSpec::Affine { p } => *p as u128 * (p.saturating_sub(1)) as u128,
            GroupSpec::DirectProduct { factors } => {
                let mut acc = 1u128;
                for f in factors {
                    acc = acc.saturating_mul(f.order()?);
                }
                acc
            }
        })
    }

    fn check(&self, cap: usize) -> Result<(), GroupError> {
        match self {
            GroupSpec::Cyclic { n } | GroupSpec::Dihedral { n } if *n == 0 => {
                return Err(GroupError::BadParameter("n must be positive".into()))
            }
            GroupSpec::ElementaryAbelian { p, .. }
            | GroupSpec::Heisenberg { p }
            | GroupSpec::Affine { p }
                if !arith::is_prime(*p) =>
            {
                return Err(GroupError::NotPrime(*p))
            }
            GroupSpec::DirectProduct { factors } => {
                for f in factors {
                    f.check(cap)?;
                }
            }
            _ => {}
        }
        let order = self.order()?;
        if order > cap as u128 {
            return Err(GroupError::OrderCap { order, cap });
        }
        Ok(())
    }
}

impl fmt::Display for GroupSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GroupSpec::Cyclic { n } => write!(f, "C{n}"),
            GroupSpec::ElementaryAbelian { p, k } => write!(f, "C{p}^{k}"),
            GroupSpec::Dihedral { n } => write!(f, "D{n}"),
            GroupSpec::Quaternion8 => write!(f, "Q8"),
            GroupSpec::Heisenberg { p } => write!(f, "Heis({p})"),
            GroupSpec::Affine { p } => write!(f, "Aff({p})"),
            GroupSpec::DirectProduct { factors } => {
                let parts: Vec<String> = factors.iter().map(|g| g.to_string()).collect();
                write!(f, "{}", parts.join(" x "))
            }
        }
    }
}

/// A validated finite group given by its multiplication table.
pub struct FiniteGroup {
    order: usize,
    table: Vec<u32>,
    inverse: Vec<usize>,
    classes: Vec<Vec<usize>>,
    class_of: Vec<usize>,
    element_order: Vec<usize>,
    exponent: u64,
    labels: Vec<String>,
    spec: Option<GroupSpec>,
    pub(crate) raw_table: OnceLock<Result<Arc<TableData>, String>>,
}

impl fmt::Debug for FiniteGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FiniteGroup")
            .field("spec", &self.spec)
            .field("order", &self.order)
            .field("classes", &self.classes.len())
            .finish()
    }
}

impl PartialEq for FiniteGroup {
    fn eq(&self, other: &Self) -> bool {
        std::ptr::eq(self, other) || (self.order == other.order && self.table == other.table)
    }
}

impl Eq for FiniteGroup {}

pub fn build_group(spec: &GroupSpec) -> Result<Arc<FiniteGroup>, GroupError> {
    build_group_with_cap(spec, DEFAULT_ORDER_CAP)
}

pub fn build_group_with_cap(spec: &GroupSpec, cap: usize) -> Result<Arc<FiniteGroup>, GroupError> {
    spec.check(cap)?;
    let (table, labels) = model_table(spec);
    let mut g = FiniteGroup::from_table(table, labels)?;
    g.spec = Some(spec.clone());
    Ok(Arc::new(g))
}

type TableWithLabels = (Vec<u32>, Vec<String>);

fn model_table(spec: &GroupSpec) -> TableWithLabels {
    match spec {
        GroupSpec::Cyclic { n } => {
            let n = *n;
            let elems: Vec<u64> = (0..n).collect();
            from_model(&elems, |a, b| (a + b) % n, |&k| power_label("g", k))
        }
        GroupSpec::ElementaryAbelian { p, k } => {
            let (p, k) = (*p, *k as usize);
            let elems: Vec<Vec<u64>> = (0..p.pow(k as u32))
                .map(|mut x| {
                    let mut v = vec![0u64; k];
                    for slot in v.iter_mut() {
                        *slot = x % p;
                        x /= p;
                    }
                    v
                })
                .collect();
            from_model(
                &elems,
                |a, b| a.iter().zip(b).map(|(x, y)| (x + y) % p).collect(),
                |v| {
                    let parts: Vec<String> = v.iter().map(|x| x.to_string()).collect();
                    format!("({})", parts.join(","))
                },
            )
        }
        GroupSpec::Dihedral { n } => {
            let n = *n;
            // (a, b) = r^a s^b with s r s = r^-1
            let elems: Vec<(u64, u64)> = (0..2).flat_map(|b| (0..n).map(move |a| (a, b))).collect();
            from_model(
                &elems,
                |&(a, b), &(c, d)| {
                    let c = if b == 1 { (n - c) % n } else { c };
                    ((a + c) % n, (b + d) % 2)
                },
                |&(a, b)| match (a, b) {
                    (0, 0) => "1".to_string(),
                    (0, 1) => "s".to_string(),
                    (a, 0) => power_label("r", a),
                    (a, _) => format!("{}s", power_label("r", a)),
                },
            )
        }
        GroupSpec::Quaternion8 => {
            // (unit, sign): unit 0..4 = 1, i, j, k
            let elems: Vec<(u8, u8)> = (0..4).flat_map(|u| (0..2).map(move |s| (u, s))).collect();
            from_model(
                &elems,
                |&(u, s), &(v, t)| {
                    let (w, sign) = quaternion_unit_product(u, v);
                    (w, (s + t + sign) % 2)
                },
                |&(u, s)| {
                    let name = ["1", "i", "j", "k"][u as usize];
                    if s == 0 {
                        name.to_string()
                    } else {
                        format!("-{name}")
                    }
                },
            )
        }
        GroupSpec::Heisenberg { p } => {
            let p = *p;
            let elems: Vec<(u64, u64, u64)> = (0..p)
                .flat_map(|a| (0..p).flat_map(move |b| (0..p).map(move |c| (a, b, c))))
                .collect();
            from_model(
                &elems,
                |&(a, b, c), &(x, y, z)| ((a + x) % p, (b + y) % p, (c + z + a * y) % p),
                |&(a, b, c)| format!("[{a},{b},{c}]"),
            )
        }
        GroupSpec::Affine { p } => {
            let p = *p;
            // (a, b) is x -> ax + b; product is composition (g * h)(x) = g(h(x))
            let elems: Vec<(u64, u64)> = (1..p).flat_map(|a| (0..p).map(move |b| (a, b))).collect();
            from_model(
                &elems,
                |&(a, b), &(c, d)| (a * c % p, (a * d + b) % p),
                |&(a, b)| format!("x->{a}x+{b}"),
            )
        }
        GroupSpec::DirectProduct { factors } => {
            let mut acc: TableWithLabels = (vec![0], vec!["1".to_string()]);
            for f in factors {
                let next = model_table(f);
                acc = product_tables(&acc, &next);
            }
            acc
        }
    }
}

fn power_label(base: &str, k: u64) -> String {
    match k {
        0 => "1".to_string(),
        1 => base.to_string(),
        k => format!("{base}^{k}"),
    }
}

/// Product of quaternion units, returning `(unit, sign bit)`.
fn quaternion_unit_product(u: u8, v: u8) -> (u8, u8) {
    match (u, v) {
        (0, w) | (w, 0) => (w, 0),
        (a, b) if a == b => (0, 1),
        (1, 2) => (3, 0),
        (2, 3) => (1, 0),
        (3, 1) => (2, 0),
        (2, 1) => (3, 1),
        (3, 2) => (1, 1),
        (1, 3) => (2, 1),
        _ => unreachable!(),
    }
}

fn from_model<T, M, L>(elems: &[T], mul: M, label: L) -> TableWithLabels
where
    T: Clone + Eq + Hash,
    M: Fn(&T, &T) -> T,
    L: Fn(&T) -> String,
{
    let index: HashMap<&T, usize> = elems.iter().enumerate().map(|(i, e)| (e, i)).collect();
    let n = elems.len();
    let mut table = vec![0u32; n * n];
    for (i, a) in elems.iter().enumerate() {
        for (j, b) in elems.iter().enumerate() {
            let c = mul(a, b);
            table[i * n + j] = *index.get(&c).expect("model is closed under multiplication") as u32;
        }
    }
    (table, elems.iter().map(label).collect())
}

fn product_tables(a: &TableWithLabels, b: &TableWithLabels) -> TableWithLabels {
    let (na, nb) = (a.1.len(), b.1.len());
    let n = na * nb;
    let mut table = vec![0u32; n * n];
    for x in 0..n {
        let (x1, x2) = (x / nb, x % nb);
        for y in 0..n {
            let (y1, y2) = (y / nb, y % nb);
            let z1 = a.0[x1 * na + y1] as usize;
            let z2 = b.0[x2 * nb + y2] as usize;
            table[x * n + y] = (z1 * nb + z2) as u32;
        }
    }
    let labels = (0..n)
        .map(|x| {
            let (l1, l2) = (&a.1[x / nb], &b.1[x % nb]);
            if na == 1 {
                l2.clone()
            } else {
                format!("({l1},{l2})")
            }
        })
        .collect();
    (table, labels)
}

impl FiniteGroup {
    /// Validates a multiplication table with identity at index 0.
    pub fn from_table(table: Vec<u32>, labels: Vec<String>) -> Result<Self, GroupError> {
        let n = labels.len();
        if n == 0 || table.len() != n * n {
            return Err(GroupError::InvalidTable("table size does not match labels".into()));
        }
        if table.iter().any(|&x| x as usize >= n) {
            return Err(GroupError::InvalidTable("entry out of range".into()));
        }
        let mul = |a: usize, b: usize| table[a * n + b] as usize;
        for a in 0..n {
            if mul(0, a) != a || mul(a, 0) != a {
                return Err(GroupError::InvalidTable("element 0 is not an identity".into()));
            }
        }
        let mut inverse = vec![usize::MAX; n];
        for a in 0..n {
            let inv = (0..n).find(|&b| mul(a, b) == 0);
            match inv {
                Some(b) if mul(b, a) == 0 => inverse[a] = b,
                _ => return Err(GroupError::InvalidTable(format!("element {a} has no inverse"))),
            }
        }
        check_associative(n, &table)?;

        let mut element_order = vec![0usize; n];
        for (a, slot) in element_order.iter_mut().enumerate() {
            let (mut x, mut k) = (a, 1);
            while x != 0 {
                x = mul(x, a);
                k += 1;
            }
            *slot = k;
        }
        let exponent = element_order.iter().fold(1u64, |acc, &o| arith::lcm(acc, o as u64));

        let mut class_of = vec![usize::MAX; n];
        let mut classes = Vec::new();
        for g in 0..n {
            if class_of[g] != usize::MAX {
                continue;
            }
            let members: BTreeSet<usize> = (0..n).map(|x| mul(mul(x, g), inverse[x])).collect();
            for &m in &members {
                class_of[m] = classes.len();
            }
            classes.push(members.into_iter().collect::<Vec<_>>());
        }

        Ok(FiniteGroup {
            order: n,
            table,
            inverse,
            classes,
            class_of,
            element_order,
            exponent,
            labels,
            spec: None,
            raw_table: OnceLock::new(),
        })
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn identity(&self) -> usize {
        0
    }

    pub fn mul(&self, a: usize, b: usize) -> usize {
        self.table[a * self.order + b] as usize
    }

    pub fn inverse(&self, a: usize) -> usize {
        self.inverse[a]
    }

    pub fn classes(&self) -> &[Vec<usize>] {
        &self.classes
    }

    pub fn num_classes(&self) -> usize {
        self.classes.len()
    }

    pub fn class_of(&self, g: usize) -> usize {
        self.class_of[g]
    }

    pub fn class_size(&self, c: usize) -> usize {
        self.classes[c].len()
    }

    /// Smallest element of the class.
    pub fn class_rep(&self, c: usize) -> usize {
        self.classes[c][0]
    }

    pub fn element_order(&self, g: usize) -> usize {
        self.element_order[g]
    }

    pub fn exponent(&self) -> u64 {
        self.exponent
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn label(&self, g: usize) -> &str {
        &self.labels[g]
    }

    pub fn spec(&self) -> Option<&GroupSpec> {
        self.spec.as_ref()
    }

    pub fn element_by_label(&self, label: &str) -> Result<usize, GroupError> {
        self.labels
            .iter()
            .position(|l| l == label)
            .ok_or_else(|| GroupError::UnknownLabel(label.to_string()))
    }

    /// `g^k` by square-and-multiply; negative `k` uses the inverse.
    pub fn power(&self, g: usize, k: i64) -> usize {
        let mut base = if k < 0 { self.inverse(g) } else { g };
        let mut e = k.unsigned_abs();
        let mut acc = 0;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            e >>= 1;
        }
        acc
    }

    /// Class containing `g^k` for `g` in class `c`.
    pub fn power_class(&self, c: usize, k: i64) -> usize {
        self.class_of(self.power(self.class_rep(c), k))
    }

    pub fn is_abelian(&self) -> bool {
        self.classes.len() == self.order
    }

    /// `(p, k)` when the order is `p^k`, `k >= 1`.
    pub fn prime_power_order(&self) -> Option<(u64, u32)> {
        arith::prime_power(self.order as u64)
    }

    pub fn conjugate(&self, x: usize, g: usize) -> usize {
        self.mul(self.mul(x, g), self.inverse(x))
    }
}

fn check_associative(n: usize, table: &[u32]) -> Result<(), GroupError> {
    let mul = |a: usize, b: usize| table[a * n + b] as usize;
    let fail = |a, b, c| GroupError::InvalidTable(format!("not associative at ({a},{b},{c})"));
    if n <= EXHAUSTIVE_ASSOC_LIMIT {
        for a in 0..n {
            for b in 0..n {
                let ab = mul(a, b);
                for c in 0..n {
                    if mul(ab, c) != mul(a, mul(b, c)) {
                        return Err(fail(a, b, c));
                    }
                }
            }
        }
    } else {
        let mut rng = ChaCha8Rng::seed_from_u64(n as u64);
        for _ in 0..SAMPLED_ASSOC_TRIPLES {
            let (a, b, c) = (rng.gen_range(0..n), rng.gen_range(0..n), rng.gen_range(0..n));
            if mul(mul(a, b), c) != mul(a, mul(b, c)) {
                return Err(fail(a, b, c));
            }
        }
    }
    Ok(())
}

/// A subgroup, stored as a sorted element set of its parent.
#[derive(Clone)]
pub struct Subgroup {
    parent: Arc<FiniteGroup>,
    elements: Vec<usize>,
    /// `|H ∩ C|` for each conjugacy class `C` of the parent.
    class_counts: Vec<usize>,
}

impl fmt::Debug for Subgroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let labels: Vec<&str> = self.elements.iter().map(|&g| self.parent.label(g)).collect();
        f.debug_struct("Subgroup").field("elements", &labels).finish()
    }
}

impl PartialEq for Subgroup {
    fn eq(&self, other: &Self) -> bool {
        self.parent == other.parent && self.elements == other.elements
    }
}

impl Eq for Subgroup {}

/// Smallest subgroup containing `gens`.
pub fn subgroup_generated(g: &Arc<FiniteGroup>, gens: &[usize]) -> Result<Subgroup, GroupError> {
    if let Some(&bad) = gens.iter().find(|&&x| x >= g.order()) {
        return Err(GroupError::ElementOutOfRange(bad));
    }
    let mut members: BTreeSet<usize> = BTreeSet::from([0]);
    let mut frontier: Vec<usize> = vec![0];
    while let Some(x) = frontier.pop() {
        for &s in gens {
            let y = g.mul(x, s);
            if members.insert(y) {
                frontier.push(y);
            }
        }
    }
    Ok(Subgroup::from_sorted(g.clone(), members.into_iter().collect()))
}

impl Subgroup {
    fn from_sorted(parent: Arc<FiniteGroup>, elements: Vec<usize>) -> Self {
        let mut class_counts = vec![0usize; parent.num_classes()];
        for &e in &elements {
            class_counts[parent.class_of(e)] += 1;
        }
        Subgroup {
            parent,
            elements,
            class_counts,
        }
    }

    pub fn whole(g: &Arc<FiniteGroup>) -> Self {
        Subgroup::from_sorted(g.clone(), (0..g.order()).collect())
    }

    pub fn trivial(g: &Arc<FiniteGroup>) -> Self {
        Subgroup::from_sorted(g.clone(), vec![0])
    }

    /// Validates closure of an explicit element set.
    pub fn from_elements(g: &Arc<FiniteGroup>, elems: &[usize]) -> Result<Self, GroupError> {
        let set: BTreeSet<usize> = elems.iter().copied().collect();
        if let Some(&bad) = set.iter().find(|&&x| x >= g.order()) {
            return Err(GroupError::ElementOutOfRange(bad));
        }
        let closed = set.contains(&0)
            && set
                .iter()
                .all(|&a| set.contains(&g.inverse(a)) && set.iter().all(|&b| set.contains(&g.mul(a, b))));
        if !closed {
            return Err(GroupError::InvalidTable("element set is not a subgroup".into()));
        }
        Ok(Subgroup::from_sorted(g.clone(), set.into_iter().collect()))
    }

    pub fn parent(&self) -> &Arc<FiniteGroup> {
        &self.parent
    }

    pub fn elements(&self) -> &[usize] {
        &self.elements
    }

    pub fn order(&self) -> usize {
        self.elements.len()
    }

    pub fn class_counts(&self) -> &[usize] {
        &self.class_counts
    }

    pub fn contains(&self, g: usize) -> bool {
        self.elements.binary_search(&g).is_ok()
    }

    pub fn is_subgroup_of(&self, other: &Subgroup) -> bool {
        self.parent == other.parent && self.elements.iter().all(|&e| other.contains(e))
    }

    pub fn is_trivial(&self) -> bool {
        self.elements.len() == 1
    }

    pub fn is_whole(&self) -> bool {
        self.elements.len() == self.parent.order()
    }

    pub fn is_normal(&self) -> bool {
        (0..self.parent.order())
            .all(|x| self.elements.iter().all(|&h| self.contains(self.parent.conjugate(x, h))))
    }

    pub fn prime_power_order(&self) -> Option<(u64, u32)> {
        arith::prime_power(self.order() as u64)
    }

    /// The subgroup as a group in its own right, plus the embedding into the parent.
    pub fn as_group(&self) -> (FiniteGroup, Vec<usize>) {
        let n = self.order();
        let pos: HashMap<usize, usize> = self.elements.iter().enumerate().map(|(i, &e)| (e, i)).collect();
        let mut table = vec![0u32; n * n];
        for (i, &a) in self.elements.iter().enumerate() {
            for (j, &b) in self.elements.iter().enumerate() {
                table[i * n + j] = pos[&self.parent.mul(a, b)] as u32;
            }
        }
        let labels = self.elements.iter().map(|&e| self.parent.label(e).to_string()).collect();
        let g = FiniteGroup::from_table(table, labels).expect("subgroup of a valid group is a group");
        (g, self.elements.clone())
    }
}

/// A descending chain `G = G_0 >= G_1 >= ... >= G_k = 1`.
#[derive(Clone, Debug)]
pub struct Filtration {
    group: Arc<FiniteGroup>,
    chain: Vec<Subgroup>,
}

/// Validates the chain and appends the trivial subgroup when it is missing.
/// Normality of the steps is not required.
pub fn make_filtration(g: &Arc<FiniteGroup>, chain: Vec<Subgroup>) -> Result<Filtration, GroupError> {
    let first = chain.first().ok_or(GroupError::EmptyChain)?;
    if first.parent() != g || !first.is_whole() {
        return Err(GroupError::NotStartingAtGroup);
    }
    for (i, w) in chain.windows(2).enumerate() {
        if w[1].parent() != g {
            return Err(GroupError::GroupMismatch);
        }
        if !w[1].is_subgroup_of(&w[0]) {
            return Err(GroupError::NotDescending(i + 1));
        }
    }
    let mut chain = chain;
    if !chain.last().is_some_and(Subgroup::is_trivial) {
        chain.push(Subgroup::trivial(g));
    }
    Ok(Filtration {
        group: g.clone(),
        chain,
    })
}

impl Filtration {
    pub fn group(&self) -> &Arc<FiniteGroup> {
        &self.group
    }

    pub fn steps(&self) -> &[Subgroup] {
        &self.chain
    }

    pub fn len(&self) -> usize {
        self.chain.len()
    }

    pub fn is_empty(&self) -> bool {
        self.chain.is_empty()
    }

    pub fn step(&self, i: usize) -> Option<&Subgroup> {
        self.chain.get(i)
    }

    /// `[G_0 : G_i]` for every step.
    pub fn indices(&self) -> Vec<u64> {
        self.chain
            .iter()
            .map(|h| (self.group.order() / h.order()) as u64)
            .collect()
    }
}
