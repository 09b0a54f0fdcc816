//! Exact arithmetic in cyclotomic fields `Q(zeta_N)`.
//!
//! An element is stored in the power basis `1, z, ..., z^(phi(N)-1)` modulo
//! the `N`-th cyclotomic polynomial, as integer numerators over one common
//! positive denominator. After every operation the representation is reduced
//! (gcd of all numerators and the denominator is one), so equality at a fixed
//! conductor is coefficient-wise. Operands with different conductors are first
//! promoted to the lcm.

use std::collections::HashMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::{Arc, Mutex, OnceLock};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

use crate::arith;
use crate::rational::{self, Rational};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CycloError {
    #[error("galois exponent {k} is not coprime to conductor {n}")]
    NotCoprime { k: i64, n: u64 },
    #[error("conductor must be positive")]
    ZeroConductor,
    #[error("expected {expected} coefficients for conductor {n}, got {got}")]
    BadLength { n: u64, expected: usize, got: usize },
}

/// Power-basis data for one conductor: `powers[k]` is `z^k` reduced mod `Phi_N`.
struct Basis {
    phi: usize,
    powers: Vec<Vec<i64>>,
}

fn basis(n: u64) -> Arc<Basis> {
    static CACHE: OnceLock<Mutex<HashMap<u64, Arc<Basis>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    let mut guard = cache.lock().expect("basis cache poisoned");
    guard
        .entry(n)
        .or_insert_with(|| Arc::new(build_basis(n)))
        .clone()
}

/// Coefficients (low degree first) of the `n`-th cyclotomic polynomial.
pub fn cyclotomic_polynomial(n: u64) -> Vec<i64> {
    // Phi_n = prod_{d | n} (x^d - 1)^{mu(n/d)}
    let mut num = vec![1i64];
    let mut den = Vec::new();
    for d in arith::divisors(n) {
        match arith::mobius(n / d) {
            1 => num = poly_mul(&num, &x_pow_minus_one(d)),
            -1 => den.push(d),
            _ => {}
        }
    }
    for d in den {
        num = poly_div_exact(&num, &x_pow_minus_one(d));
    }
    num
}

fn x_pow_minus_one(d: u64) -> Vec<i64> {
    let mut p = vec![0i64; d as usize + 1];
    p[0] = -1;
    p[d as usize] = 1;
    p
}

fn poly_mul(a: &[i64], b: &[i64]) -> Vec<i64> {
    let mut out = vec![0i64; a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        if x == 0 {
            continue;
        }
        for (j, &y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    out
}

/// Exact division by a monic polynomial.
fn poly_div_exact(a: &[i64], b: &[i64]) -> Vec<i64> {
    let mut rem = a.to_vec();
    let db = b.len() - 1;
    let dq = rem.len() - 1 - db;
    let mut q = vec![0i64; dq + 1];
    for k in (0..=dq).rev() {
        let c = rem[k + db];
        q[k] = c;
        if c != 0 {
            for (j, &bj) in b.iter().enumerate() {
                rem[k + j] -= c * bj;
            }
        }
    }
    debug_assert!(rem.iter().all(|&r| r == 0), "inexact polynomial division");
    q
}

fn build_basis(n: u64) -> Basis {
    let phi_poly = cyclotomic_polynomial(n);
    let phi = phi_poly.len() - 1;
    let mut powers = Vec::with_capacity(n as usize);
    let mut cur = vec![0i64; phi];
    cur[0] = 1;
    for _ in 0..n {
        powers.push(cur.clone());
        // multiply by z and reduce the x^phi term
        let top = cur[phi - 1];
        let mut next = vec![0i64; phi];
        for i in 0..phi {
            let shifted = if i > 0 { cur[i - 1] } else { 0 };
            next[i] = shifted
                .checked_sub(top.checked_mul(phi_poly[i]).expect("power-basis overflow"))
                .expect("power-basis overflow");
        }
        cur = next;
    }
    Basis { phi, powers }
}

/// An exact element of `Q(zeta_N)`.
#[derive(Clone, Debug)]
pub struct CycloNum {
    n: u64,
    num: Vec<BigInt>,
    den: BigInt,
}

impl CycloNum {
    pub fn zero(n: u64) -> Self {
        let phi = basis(n.max(1)).phi;
        CycloNum {
            n: n.max(1),
            num: vec![BigInt::zero(); phi],
            den: BigInt::one(),
        }
    }

    pub fn from_int(v: i64) -> Self {
        CycloNum {
            n: 1,
            num: vec![BigInt::from(v)],
            den: BigInt::one(),
        }
    }

    pub fn from_rational(q: &Rational) -> Self {
        CycloNum {
            n: 1,
            num: vec![q.numer().clone()],
            den: q.denom().clone(),
        }
    }

    /// `zeta_n^k`.
    pub fn zeta(n: u64, k: i64) -> Self {
        let b = basis(n);
        let idx = k.rem_euclid(n as i64) as usize;
        CycloNum {
            n,
            num: b.powers[idx].iter().map(|&c| BigInt::from(c)).collect(),
            den: BigInt::one(),
        }
    }

    /// `sum_k c_k zeta_n^k` for integer coefficients indexed by exponent.
    pub fn from_exponent_counts(n: u64, counts: &[(u64, i64)]) -> Self {
        let b = basis(n);
        let mut acc = vec![0i64; b.phi];
        for &(k, c) in counts {
            if c == 0 {
                continue;
            }
            for (a, &p) in acc.iter_mut().zip(&b.powers[(k % n) as usize]) {
                *a += c * p;
            }
        }
        CycloNum {
            n,
            num: acc.into_iter().map(BigInt::from).collect(),
            den: BigInt::one(),
        }
    }

    /// Builds from power-basis rational coordinates; the length must be `phi(n)`.
    pub fn from_coeffs(n: u64, coeffs: &[Rational]) -> Result<Self, CycloError> {
        if n == 0 {
            return Err(CycloError::ZeroConductor);
        }
        let phi = basis(n).phi;
        if coeffs.len() != phi {
            return Err(CycloError::BadLength {
                n,
                expected: phi,
                got: coeffs.len(),
            });
        }
        let den = coeffs
            .iter()
            .fold(BigInt::one(), |acc, q| acc.lcm(q.denom()));
        let num = coeffs
            .iter()
            .map(|q| q.numer() * (&den / q.denom()))
            .collect();
        Ok(CycloNum { n, num, den }.normalized())
    }

    pub fn conductor(&self) -> u64 {
        self.n
    }

    /// Power-basis coordinates as rationals.
    pub fn coeffs(&self) -> Vec<Rational> {
        self.num
            .iter()
            .map(|c| Rational::new(c.clone(), self.den.clone()))
            .collect()
    }

    pub fn is_zero(&self) -> bool {
        self.num.iter().all(Zero::is_zero)
    }

    /// True iff the element lies in `Q`.
    pub fn is_rational(&self) -> bool {
        self.num.iter().skip(1).all(Zero::is_zero)
    }

    pub fn to_rational(&self) -> Option<Rational> {
        self.is_rational()
            .then(|| Rational::new(self.num[0].clone(), self.den.clone()))
    }

    fn normalized(mut self) -> Self {
        if self.is_zero() {
            self.den = BigInt::one();
            return self;
        }
        if self.den.is_negative() {
            self.den = -self.den;
            for c in &mut self.num {
                *c = -std::mem::take(c);
            }
        }
        if !self.den.is_one() {
            let g = self
                .num
                .iter()
                .fold(self.den.clone(), |acc, c| acc.gcd(c));
            if !g.is_one() {
                self.den /= &g;
                for c in &mut self.num {
                    *c /= &g;
                }
            }
        }
        self
    }

    /// Re-expresses the element in `Q(zeta_m)`; `m` must be a multiple of the conductor.
    pub fn promote(&self, m: u64) -> Self {
        if m == self.n {
            return self.clone();
        }
        assert!(m.is_multiple_of(self.n), "promotion target must be a multiple");
        let step = m / self.n;
        let b = basis(m);
        let mut acc = vec![BigInt::zero(); b.phi];
        for (i, c) in self.num.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let row = &b.powers[(i as u64 * step % m) as usize];
            for (a, &p) in acc.iter_mut().zip(row) {
                if p != 0 {
                    *a += c * p;
                }
            }
        }
        CycloNum {
            n: m,
            num: acc,
            den: self.den.clone(),
        }
    }

    fn align(&self, other: &Self) -> (std::borrow::Cow<'_, Self>, CycloNum, u64) {
        use std::borrow::Cow;
        if self.n == other.n {
            return (Cow::Borrowed(self), other.clone(), self.n);
        }
        let l = arith::lcm(self.n, other.n);
        (Cow::Owned(self.promote(l)), other.promote(l), l)
    }

    /// Applies `zeta -> zeta^k`.
    pub fn galois_act(&self, k: i64) -> Result<Self, CycloError> {
        let n = self.n;
        let kk = k.rem_euclid(n as i64) as u64;
        if arith::gcd(kk, n) != 1 && n > 1 {
            return Err(CycloError::NotCoprime { k, n });
        }
        if n <= 2 || kk == 1 {
            return Ok(self.clone());
        }
        let b = basis(n);
        let mut acc = vec![BigInt::zero(); b.phi];
        for (i, c) in self.num.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let row = &b.powers[(i as u64 * kk % n) as usize];
            for (a, &p) in acc.iter_mut().zip(row) {
                if p != 0 {
                    *a += c * p;
                }
            }
        }
        Ok(CycloNum {
            n,
            num: acc,
            den: self.den.clone(),
        }
        .normalized())
    }

    /// Complex conjugation.
    pub fn conj(&self) -> Self {
        self.galois_act(-1).expect("-1 is a unit modulo every conductor")
    }

    /// Trace down to `Q`: the sum of all Galois conjugates.
    pub fn trace(&self) -> Rational {
        let n = self.n;
        let mut acc = CycloNum::zero(n);
        for k in 1..=n.max(1) {
            if arith::gcd(k, n) == 1 {
                acc = &acc + &self.galois_act(k as i64).expect("unit exponent");
            }
        }
        acc.to_rational().expect("trace is rational")
    }

    pub fn scale(&self, q: &Rational) -> Self {
        CycloNum {
            n: self.n,
            num: self.num.iter().map(|c| c * q.numer()).collect(),
            den: &self.den * q.denom(),
        }
        .normalized()
    }

    fn add_same(a: &Self, b: &Self) -> Self {
        debug_assert_eq!(a.n, b.n);
        if a.den == b.den {
            return CycloNum {
                n: a.n,
                num: a.num.iter().zip(&b.num).map(|(x, y)| x + y).collect(),
                den: a.den.clone(),
            }
            .normalized();
        }
        CycloNum {
            n: a.n,
            num: a
                .num
                .iter()
                .zip(&b.num)
                .map(|(x, y)| x * &b.den + y * &a.den)
                .collect(),
            den: &a.den * &b.den,
        }
        .normalized()
    }

    fn mul_same(a: &Self, b: &Self) -> Self {
        debug_assert_eq!(a.n, b.n);
        let bs = basis(a.n);
        let phi = bs.phi;
        let mut conv = vec![BigInt::zero(); 2 * phi - 1];
        for (i, x) in a.num.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            for (j, y) in b.num.iter().enumerate() {
                if !y.is_zero() {
                    conv[i + j] += x * y;
                }
            }
        }
        let mut out: Vec<BigInt> = conv[..phi].to_vec();
        for (t, c) in conv.iter().enumerate().skip(phi) {
            if c.is_zero() {
                continue;
            }
            let row = &bs.powers[t % a.n as usize];
            for (o, &p) in out.iter_mut().zip(row) {
                if p != 0 {
                    *o += c * p;
                }
            }
        }
        CycloNum {
            n: a.n,
            num: out,
            den: &a.den * &b.den,
        }
        .normalized()
    }

    fn text(&self) -> String {
        if let Some(q) = self.to_rational() {
            return q.to_string();
        }
        let mut out = String::new();
        for (i, q) in self.coeffs().iter().enumerate() {
            if q.is_zero() {
                continue;
            }
            let mag = q.abs();
            let sign = if q.is_negative() { "-" } else { "+" };
            if out.is_empty() {
                if q.is_negative() {
                    out.push('-');
                }
            } else {
                out.push_str(&format!(" {sign} "));
            }
            let monomial = match i {
                0 => String::new(),
                1 => format!("z{}", self.n),
                _ => format!("z{}^{}", self.n, i),
            };
            if monomial.is_empty() {
                out.push_str(&mag.to_string());
            } else if mag.is_one() {
                out.push_str(&monomial);
            } else {
                out.push_str(&format!("{mag}*{monomial}"));
            }
        }
        out
    }
}

impl PartialEq for CycloNum {
    fn eq(&self, other: &Self) -> bool {
        if self.n == other.n {
            return self.den == other.den && self.num == other.num;
        }
        let (a, b, _) = self.align(other);
        a.den == b.den && a.num == b.num
    }
}

impl Eq for CycloNum {}

impl fmt::Display for CycloNum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.text())
    }
}

impl Add for &CycloNum {
    type Output = CycloNum;
    fn add(self, rhs: &CycloNum) -> CycloNum {
        if self.n == rhs.n {
            return CycloNum::add_same(self, rhs);
        }
        let (a, b, _) = self.align(rhs);
        CycloNum::add_same(&a, &b)
    }
}

impl Add for CycloNum {
    type Output = CycloNum;
    fn add(self, rhs: CycloNum) -> CycloNum {
        &self + &rhs
    }
}

impl Neg for &CycloNum {
    type Output = CycloNum;
    fn neg(self) -> CycloNum {
        CycloNum {
            n: self.n,
            num: self.num.iter().map(|c| -c).collect(),
            den: self.den.clone(),
        }
    }
}

impl Neg for CycloNum {
    type Output = CycloNum;
    fn neg(self) -> CycloNum {
        -&self
    }
}

impl Sub for &CycloNum {
    type Output = CycloNum;
    fn sub(self, rhs: &CycloNum) -> CycloNum {
        self + &(-rhs)
    }
}

impl Sub for CycloNum {
    type Output = CycloNum;
    fn sub(self, rhs: CycloNum) -> CycloNum {
        &self - &rhs
    }
}

impl Mul for &CycloNum {
    type Output = CycloNum;
    fn mul(self, rhs: &CycloNum) -> CycloNum {
        if self.n == rhs.n {
            return CycloNum::mul_same(self, rhs);
        }
        let (a, b, _) = self.align(rhs);
        CycloNum::mul_same(&a, &b)
    }
}

impl Mul for CycloNum {
    type Output = CycloNum;
    fn mul(self, rhs: CycloNum) -> CycloNum {
        &self * &rhs
    }
}

#[derive(Serialize, Deserialize)]
struct Wire {
    #[serde(rename = "N")]
    n: u64,
    #[serde(with = "rational::serde_text_vec")]
    coeffs: Vec<Rational>,
}

impl Serialize for CycloNum {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        Wire {
            n: self.n,
            coeffs: self.coeffs(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for CycloNum {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let w = Wire::deserialize(d)?;
        CycloNum::from_coeffs(w.n, &w.coeffs).map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{frac, int};

    fn z(n: u64, k: i64) -> CycloNum {
        CycloNum::zeta(n, k)
    }

    #[test]
    fn cyclotomic_polynomials() {
        assert_eq!(cyclotomic_polynomial(1), vec![-1, 1]);
        assert_eq!(cyclotomic_polynomial(4), vec![1, 0, 1]);
        assert_eq!(cyclotomic_polynomial(6), vec![1, -1, 1]);
        assert_eq!(cyclotomic_polynomial(12), vec![1, 0, -1, 0, 1]);
        // Phi_105 is the first with a coefficient of absolute value 2
        assert!(cyclotomic_polynomial(105).contains(&-2));
    }

    #[test]
    fn minimal_polynomial_identities() {
        assert_eq!(&z(3, 1) + &z(3, 2), CycloNum::from_int(-1));
        assert_eq!(&z(4, 1) * &z(4, 1), CycloNum::from_int(-1));
        let sum = (1..5).fold(CycloNum::zero(5), |acc, k| &acc + &z(5, k));
        assert!(sum.is_rational());
        assert_eq!(sum.to_rational(), Some(int(-1)));
        assert!(!z(8, 1).is_rational());
    }

    #[test]
    fn product_in_q_zeta5() {
        // (1 + z)(1 + z^4) = 2 + z + z^4 ; expanded by hand then reduced
        let one = CycloNum::from_int(1);
        let lhs = &(&one + &z(5, 1)) * &(&one + &z(5, 4));
        let expected = CycloNum::from_exponent_counts(5, &[(0, 2), (1, 1), (4, 1)]);
        assert_eq!(lhs, expected);
        // z^4 = -1 - z - z^2 - z^3, so the canonical coordinates are (1, 0, -1, -1)
        assert_eq!(lhs.coeffs(), vec![int(1), int(0), int(-1), int(-1)]);
    }

    #[test]
    fn galois_action() {
        assert_eq!(z(5, 1).galois_act(2).unwrap(), z(5, 2));
        let q = CycloNum::from_rational(&frac(3, 7));
        assert_eq!(q.galois_act(5).unwrap(), q);
        let s = &z(3, 1) + &z(3, 2);
        assert_eq!(s.galois_act(2).unwrap(), CycloNum::from_int(-1));
        assert!(matches!(
            z(6, 1).galois_act(3),
            Err(CycloError::NotCoprime { .. })
        ));
    }

    #[test]
    fn mixed_conductors_promote() {
        // zeta_4 * zeta_6 = zeta_12^5
        assert_eq!(&z(4, 1) * &z(6, 1), z(12, 5));
        assert_eq!(z(3, 1), z(6, 2));
        assert_eq!(z(2, 1), CycloNum::from_int(-1));
        assert_eq!(z(12, 3), z(4, 1));
    }

    #[test]
    fn trace_of_prime_root() {
        for p in [3u64, 5, 7, 11, 13] {
            assert_eq!(z(p, 1).trace(), int(-1));
        }
    }

    #[test]
    fn serde_roundtrip_and_text() {
        let x = &z(5, 1).scale(&frac(1, 2)) - &CycloNum::from_int(3);
        let json = serde_json::to_string(&x).unwrap();
        assert_eq!(json, r#"{"N":5,"coeffs":["-3/1","1/2","0/1","0/1"]}"#);
        let back: CycloNum = serde_json::from_str(&json).unwrap();
        assert_eq!(back, x);
        assert_eq!(x.to_string(), "-3 + 1/2*z5");
        assert!(serde_json::from_str::<CycloNum>(r#"{"N":5,"coeffs":["1"]}"#).is_err());
    }
}
