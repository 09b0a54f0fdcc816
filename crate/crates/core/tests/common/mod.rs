//! Independent oracles for the integration tests: explicit matrix
//! representations, averaging projectors, and a resultant computed by
//! rational Gaussian elimination.

#![allow(dead_code)]

use std::sync::Arc;

use conductor_core::character::{character_table, CharacterTable};
use conductor_core::cyclo::CycloNum;
use conductor_core::group::{build_group, FiniteGroup, GroupSpec, Subgroup};
use conductor_core::rational::{self, Rational};
use num_bigint::BigInt;
use num_traits::{One, Zero};

pub fn group(spec: GroupSpec) -> Arc<FiniteGroup> {
    build_group(&spec).unwrap()
}

pub fn table(spec: GroupSpec) -> CharacterTable {
    character_table(&group(spec)).unwrap()
}

/// Dense square matrix over `Q`.
#[derive(Clone, Debug, PartialEq)]
pub struct QMat(pub Vec<Vec<Rational>>);

impl QMat {
    pub fn zero(n: usize) -> QMat {
        QMat(vec![vec![Rational::zero(); n]; n])
    }

    pub fn identity(n: usize) -> QMat {
        let mut m = QMat::zero(n);
        for i in 0..n {
            m.0[i][i] = Rational::one();
        }
        m
    }

    pub fn permutation(perm: &[usize]) -> QMat {
        let mut m = QMat::zero(perm.len());
        for (src, &dst) in perm.iter().enumerate() {
            m.0[dst][src] = Rational::one();
        }
        m
    }

    pub fn n(&self) -> usize {
        self.0.len()
    }

    pub fn mul(&self, o: &QMat) -> QMat {
        let n = self.n();
        let mut out = QMat::zero(n);
        for i in 0..n {
            for k in 0..n {
                if self.0[i][k].is_zero() {
                    continue;
                }
                for j in 0..n {
                    out.0[i][j] += &self.0[i][k] * &o.0[k][j];
                }
            }
        }
        out
    }

    pub fn add_scaled(&mut self, o: &QMat, s: &Rational) {
        for (r, ro) in self.0.iter_mut().zip(&o.0) {
            for (x, y) in r.iter_mut().zip(ro) {
                *x += y * s;
            }
        }
    }

    pub fn trace(&self) -> Rational {
        (0..self.n()).fold(Rational::zero(), |acc, i| acc + &self.0[i][i])
    }
}

/// 2x2 matrices over the Gaussian integers, entries as `(re, im)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct GMat([[(i64, i64); 2]; 2]);

impl GMat {
    pub const ONE: GMat = GMat([[(1, 0), (0, 0)], [(0, 0), (1, 0)]]);

    pub fn mul(&self, o: &GMat) -> GMat {
        let m = |a: (i64, i64), b: (i64, i64)| (a.0 * b.0 - a.1 * b.1, a.0 * b.1 + a.1 * b.0);
        let mut out = [[(0, 0); 2]; 2];
        for (i, row) in out.iter_mut().enumerate() {
            for (j, slot) in row.iter_mut().enumerate() {
                let x = m(self.0[i][0], o.0[0][j]);
                let y = m(self.0[i][1], o.0[1][j]);
                *slot = (x.0 + y.0, x.1 + y.1);
            }
        }
        GMat(out)
    }

    pub fn neg(&self) -> GMat {
        let mut out = self.0;
        for row in out.iter_mut() {
            for e in row.iter_mut() {
                *e = (-e.0, -e.1);
            }
        }
        GMat(out)
    }

    pub fn trace(&self) -> (i64, i64) {
        (self.0[0][0].0 + self.0[1][1].0, self.0[0][0].1 + self.0[1][1].1)
    }
}

/// Quaternion label `[-]{1,i,j,k}` as (unit index, negated).
fn quaternion(label: &str) -> (usize, bool) {
    let (neg, u) = match label.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, label),
    };
    (["1", "i", "j", "k"].iter().position(|x| *x == u).expect("quaternion label"), neg)
}

/// The faithful 2-dimensional representation of `Q8` over `Z[i]`.
pub fn q8_faithful(label: &str) -> GMat {
    let i = GMat([[(0, 1), (0, 0)], [(0, 0), (0, -1)]]);
    let j = GMat([[(0, 0), (1, 0)], [(-1, 0), (0, 0)]]);
    let (u, neg) = quaternion(label);
    let m = [GMat::ONE, i, j, i.mul(&j)][u];
    if neg {
        m.neg()
    } else {
        m
    }
}

/// The four linear characters of `Q8`, indexed by the signs of `i` and `j`.
pub fn q8_linear(label: &str, si: i64, sj: i64) -> i64 {
    let (u, _) = quaternion(label);
    [1, si, sj, si * sj][u]
}

/// `x -> ax + b` on `F_p`, parsed from the affine group label.
pub fn affine_map(label: &str) -> (u64, u64) {
    let rest = label.strip_prefix("x->").expect("affine label");
    let (a, b) = rest.split_once("x+").expect("affine label");
    (a.parse().unwrap(), b.parse().unwrap())
}

pub fn affine_permutation(label: &str, p: u64) -> Vec<usize> {
    let (a, b) = affine_map(label);
    (0..p).map(|x| ((a * x + b) % p) as usize).collect()
}

/// Sign of a permutation by counting inversions.
pub fn sign(perm: &[usize]) -> i64 {
    let mut s = 1;
    for i in 0..perm.len() {
        for j in i + 1..perm.len() {
            if perm[i] > perm[j] {
                s = -s;
            }
        }
    }
    s
}

/// Class-value vector of a character given on elements.
pub fn class_values(g: &FiniteGroup, f: impl Fn(usize) -> CycloNum) -> Vec<CycloNum> {
    (0..g.num_classes()).map(|c| f(g.class_rep(c))).collect()
}

pub fn gaussian(z: (i64, i64)) -> CycloNum {
    &CycloNum::from_int(z.0) + &(&CycloNum::zeta(4, 1) * &CycloNum::from_int(z.1))
}

/// Averaging projector `(d/|G|) sum_g conj(chi(g)) rho(g)` for rational `chi`.
pub fn projector(g: &FiniteGroup, chi: &[CycloNum], degree: u64, rho: &[QMat]) -> QMat {
    let n = rho[0].n();
    let mut p = QMat::zero(n);
    for (x, m) in rho.iter().enumerate() {
        let v = chi[g.class_of(x)].conj().to_rational().expect("rational character");
        p.add_scaled(m, &v);
    }
    let scale = rational::frac(degree as i64, g.order() as i64);
    for row in p.0.iter_mut() {
        for e in row.iter_mut() {
            *e *= &scale;
        }
    }
    p
}

/// Determinant by Gaussian elimination over `Q`.
pub fn rational_determinant(mut m: Vec<Vec<Rational>>) -> Rational {
    let n = m.len();
    let mut det = Rational::one();
    for c in 0..n {
        let Some(piv) = (c..n).find(|&r| !m[r][c].is_zero()) else {
            return Rational::zero();
        };
        if piv != c {
            m.swap(piv, c);
            det = -det;
        }
        det *= &m[c][c];
        for r in c + 1..n {
            let f = &m[r][c] / &m[c][c];
            for k in c..n {
                let v = &f * &m[c][k];
                m[r][k] -= v;
            }
        }
    }
    det
}

/// `v_p(disc(x^p - alpha))` through a rational-elimination resultant of
/// `f = x^p - alpha` and `f' = p x^(p-1)`.
pub fn disc_valuation_oracle(p: u64, alpha: i64) -> u32 {
    let n = p as usize;
    let size = 2 * n - 1;
    let mut rows = vec![vec![Rational::zero(); size]; size];
    // n - 1 shifted copies of f, n shifted copies of f'
    for (r, row) in rows.iter_mut().enumerate().take(n - 1) {
        row[r] = Rational::one();
        row[r + n] = rational::int(-alpha);
    }
    for r in 0..n {
        rows[n - 1 + r][r] = rational::int(p as i64);
    }
    let res = rational_determinant(rows);
    assert!(res.is_integer());
    let mut v = res.numer().clone();
    let pb = BigInt::from(p);
    let mut k = 0;
    while (&v % &pb).is_zero() {
        v /= &pb;
        k += 1;
    }
    k
}

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        if !$cond {
            return Err(format!($($msg)+));
        }
    };
}

fn rows(t: &CharacterTable) -> Vec<Vec<CycloNum>> {
    t.irreducibles().iter().map(|c| c.values().to_vec()).collect()
}

fn sorted_degrees(t: &CharacterTable) -> Vec<u64> {
    let mut d = t.degrees();
    d.sort();
    d
}

/// `S3` (as `Aff(3)`) against its permutation matrices on `F_3`: the sign
/// character, and averaging projectors built from the computed rows.
pub fn s3_matrix_oracle() -> Result<(), String> {
    let g = group(GroupSpec::Affine { p: 3 });
    let t = table(GroupSpec::Affine { p: 3 });
    ensure!(sorted_degrees(&t) == vec![1, 1, 2], "S3 degrees {:?}", t.degrees());
    let perms: Vec<Vec<usize>> = (0..g.order()).map(|x| affine_permutation(g.label(x), 3)).collect();
    let rho: Vec<QMat> = perms.iter().map(|p| QMat::permutation(p)).collect();
    for x in 0..g.order() {
        for y in 0..g.order() {
            ensure!(rho[x].mul(&rho[y]) == rho[g.mul(x, y)], "permutation action is not a homomorphism");
        }
    }
    let table_rows = rows(&t);
    let sign_row = class_values(&g, |x| CycloNum::from_int(sign(&perms[x])));
    ensure!(table_rows.contains(&sign_row), "sign character missing");
    let projectors: Vec<QMat> = (0..t.len())
        .map(|i| projector(&g, &table_rows[i], t.degrees()[i], &rho))
        .collect();
    let mut total = QMat::zero(3);
    for (i, p) in projectors.iter().enumerate() {
        ensure!(p.mul(p) == *p, "projector {i} is not idempotent");
        for (j, q) in projectors.iter().enumerate() {
            ensure!(i == j || p.mul(q) == QMat::zero(3), "projectors {i}, {j} not orthogonal");
        }
        total.add_scaled(p, &Rational::one());
    }
    ensure!(total == QMat::identity(3), "projectors do not sum to the identity");
    // permutation module = trivial + standard; the standard summand's trace
    // reproduces the 2-dimensional row
    let std = t.degrees().iter().position(|&d| d == 2).unwrap();
    ensure!(projectors[std].trace() == rational::int(2), "standard summand has wrong rank");
    let from_matrices = class_values(&g, |x| CycloNum::from_rational(&projectors[std].mul(&rho[x]).trace()));
    ensure!(from_matrices == table_rows[std], "standard character differs from the table");
    Ok(())
}

/// `Q8` against its linear characters, the faithful representation over
/// `Z[i]`, and averaging projectors on the regular representation.
pub fn q8_matrix_oracle() -> Result<(), String> {
    let g = group(GroupSpec::Quaternion8);
    let t = table(GroupSpec::Quaternion8);
    ensure!(sorted_degrees(&t) == vec![1, 1, 1, 1, 2], "Q8 degrees {:?}", t.degrees());
    let table_rows = rows(&t);
    for x in 0..g.order() {
        for y in 0..g.order() {
            let lhs = q8_faithful(g.label(x)).mul(&q8_faithful(g.label(y)));
            ensure!(lhs == q8_faithful(g.label(g.mul(x, y))), "faithful matrices are not a homomorphism");
        }
    }
    let faithful = class_values(&g, |x| gaussian(q8_faithful(g.label(x)).trace()));
    ensure!(table_rows.contains(&faithful), "faithful character missing");
    for si in [1, -1] {
        for sj in [1, -1] {
            let lin = class_values(&g, |x| CycloNum::from_int(q8_linear(g.label(x), si, sj)));
            ensure!(table_rows.contains(&lin), "linear character ({si}, {sj}) missing");
        }
    }
    let rho: Vec<QMat> = (0..g.order())
        .map(|x| QMat::permutation(&(0..g.order()).map(|y| g.mul(x, y)).collect::<Vec<_>>()))
        .collect();
    let mut total = QMat::zero(8);
    for (i, row) in table_rows.iter().enumerate() {
        let d = t.degrees()[i];
        let p = projector(&g, row, d, &rho);
        ensure!(p.mul(&p) == p, "projector {i} is not idempotent");
        ensure!(p.trace() == rational::int((d * d) as i64), "isotypic component {i} has wrong rank");
        total.add_scaled(&p, &Rational::one());
    }
    ensure!(total == QMat::identity(8), "projectors do not sum to the identity");
    Ok(())
}

/// Row and column orthogonality, class count and degree sum of squares.
pub fn orthogonality(spec: &GroupSpec) -> Result<(), String> {
    let g = group(spec.clone());
    let t = table(spec.clone());
    let whole = Subgroup::whole(&g);
    let irr = t.irreducibles();
    ensure!(irr.len() == g.num_classes(), "{spec}: {} rows for {} classes", irr.len(), g.num_classes());
    ensure!(
        t.degrees().iter().map(|d| d * d).sum::<u64>() == g.order() as u64,
        "{spec}: degrees do not square-sum to the order"
    );
    for (i, a) in irr.iter().enumerate() {
        for (j, b) in irr.iter().enumerate() {
            let expected = if i == j { Rational::one() } else { Rational::zero() };
            ensure!(a.inner_product(b, &whole).map_err(|e| e.to_string())? == expected, "{spec}: rows {i}, {j}");
        }
    }
    for c in 0..g.num_classes() {
        for d in 0..g.num_classes() {
            let sum = irr
                .iter()
                .fold(CycloNum::zero(1), |acc, x| &acc + &(x.value_at_class(c) * &x.value_at_class(d).conj()));
            let centralizer = (g.order() / g.class_size(c)) as i64;
            let expected = if c == d { centralizer } else { 0 };
            ensure!(sum == CycloNum::from_int(expected), "{spec}: columns {c}, {d}");
        }
    }
    Ok(())
}

pub fn degree_multiset(spec: &GroupSpec) -> Vec<u64> {
    sorted_degrees(&table(spec.clone()))
}
