//! Irreducible characters from class-multiplication coefficients.
//!
//! The class sums `K_j` span the centre of the group algebra, and every
//! irreducible character `chi` gives a common eigenvector `w` of the
//! matrices `(A_j)_{l,k} = c_{jlk}` with `w_k = |C_k| chi(g_k) / chi(1)`.
//! We split `F_q^r` into common one-dimensional eigenspaces for a prime
//! `q = 1 mod exponent(G)`, recover `chi(1)` from the norm relation, and lift
//! each value to `Q(zeta_e)` through the eigenvalue multiplicities of `g_k`.

use crate::arith;
use crate::cyclo::CycloNum;
use crate::group::FiniteGroup;
use crate::modp::{Field, Matrix};

/// Character values before they are wrapped as class functions.
#[derive(Debug)]
pub struct RawTable {
    /// One row per irreducible, one value per conjugacy class.
    pub rows: Vec<Vec<CycloNum>>,
    /// The prime used for the computation.
    pub prime: u64,
}

const MAX_PRIME_ATTEMPTS: usize = 8;

/// Smallest prime `q = 1 mod e` with `q > 2 sqrt(order)`, strictly after `after`.
fn next_valid_prime(exponent: u64, order: usize, after: u64) -> u64 {
    let mut q = after + 1;
    loop {
        if q % exponent == 1 % exponent && arith::is_prime(q) && (q * q) > 4 * order as u64 {
            return q;
        }
        q += 1;
    }
}

pub fn compute(g: &FiniteGroup) -> Result<RawTable, String> {
    let mut q = 1;
    let mut last_err = String::new();
    for _ in 0..MAX_PRIME_ATTEMPTS {
        q = next_valid_prime(g.exponent(), g.order(), q);
        match compute_with_prime(g, q) {
            Ok(rows) => return Ok(RawTable { rows, prime: q }),
            Err(e) => last_err = format!("prime {q}: {e}"),
        }
    }
    Err(format!("character table lifting failed: {last_err}"))
}

fn class_matrices(g: &FiniteGroup) -> Vec<Vec<Vec<u64>>> {
    let r = g.num_classes();
    // m[j][l][k] = #{x in C_j : x^-1 g_k in C_l}
    let mut m = vec![vec![vec![0u64; r]; r]; r];
    for k in 0..r {
        let gk = g.class_rep(k);
        for x in 0..g.order() {
            let j = g.class_of(x);
            let l = g.class_of(g.mul(g.inverse(x), gk));
            m[j][l][k] += 1;
        }
    }
    m
}

fn compute_with_prime(g: &FiniteGroup, q: u64) -> Result<Vec<Vec<CycloNum>>, String> {
    let f = Field::new(q);
    let r = g.num_classes();
    let order = g.order();
    let e = g.exponent();
    let mats: Vec<Matrix> = class_matrices(g)
        .into_iter()
        .map(|m| m.into_iter().map(|row| row.into_iter().map(|c| c % q).collect()).collect())
        .collect();

    // Common eigenspaces, each stored as an RREF basis with its pivot columns.
    let mut spaces: Vec<(Matrix, Vec<usize>)> = {
        let mut id: Matrix = (0..r).map(|i| (0..r).map(|j| u64::from(i == j)).collect()).collect();
        let piv = f.rref(&mut id);
        vec![(id, piv)]
    };
    for a in mats.iter().skip(1) {
        if spaces.iter().all(|(b, _)| b.len() == 1) {
            break;
        }
        let mut next = Vec::new();
        for (basis, pivots) in spaces {
            if basis.len() == 1 {
                next.push((basis, pivots));
                continue;
            }
            next.extend(split_space(&f, a, &basis, &pivots)?);
        }
        spaces = next;
    }
    if spaces.len() != r || spaces.iter().any(|(b, _)| b.len() != 1) {
        return Err("class matrices did not split into one-dimensional eigenspaces".into());
    }

    let inv_class: Vec<usize> = (0..r).map(|k| g.class_of(g.inverse(g.class_rep(k)))).collect();
    let z = f.pow(arith::primitive_root(q), (q - 1) / e);

    let mut rows: Vec<(u64, Vec<u64>, Vec<CycloNum>)> = Vec::with_capacity(r);
    for (basis, _) in spaces {
        let v = &basis[0];
        if v[0] == 0 {
            return Err("eigenvector vanishes at the identity class".into());
        }
        let s = f.inv(v[0]);
        let w: Vec<u64> = v.iter().map(|&x| f.mul(x, s)).collect();
        // sum_k w_k w_{k*} / |C_k| = |G| / chi(1)^2
        let norm = (0..r).fold(0, |acc, k| {
            let t = f.mul(f.mul(w[k], w[inv_class[k]]), f.inv(g.class_size(k) as u64));
            f.add(acc, t)
        });
        if norm == 0 {
            return Err("degenerate norm".into());
        }
        let d2 = f.mul(order as u64 % q, f.inv(norm));
        let degree = (1..=order as u64)
            .take_while(|d| d * d <= order as u64)
            .find(|d| (d * d) % q == d2)
            .ok_or("no integral degree lifts the norm")?;
        let modq: Vec<u64> = (0..r)
            .map(|k| f.mul(f.mul(w[k], degree), f.inv(g.class_size(k) as u64)))
            .collect();
        let lifted = (0..r)
            .map(|k| lift_value(g, &f, z, &modq, k, degree))
            .collect::<Result<Vec<_>, _>>()?;
        rows.push((degree, modq, lifted));
    }
    rows.sort_by(|a, b| (a.0, &a.1).cmp(&(b.0, &b.1)));

    let total: u64 = rows.iter().map(|(d, _, _)| d * d).sum();
    if total != order as u64 {
        return Err(format!("degrees squared sum to {total}, not {order}"));
    }
    Ok(rows.into_iter().map(|(_, _, v)| v).collect())
}

/// Splits an invariant subspace into the eigenspaces of `a` restricted to it.
fn split_space(
    f: &Field,
    a: &Matrix,
    basis: &Matrix,
    pivots: &[usize],
) -> Result<Vec<(Matrix, Vec<usize>)>, String> {
    let d = basis.len();
    let r = a.len();
    let images: Vec<Vec<u64>> = basis
        .iter()
        .map(|v| {
            (0..r)
                .map(|l| (0..r).fold(0, |acc, k| f.add(acc, f.mul(a[l][k], v[k]))))
                .collect()
        })
        .collect();
    // coordinates in an RREF basis are read off at the pivot columns
    let restricted: Matrix = (0..d)
        .map(|b| (0..d).map(|c| images[c][pivots[b]]).collect())
        .collect();
    let mut out = Vec::new();
    let mut found = 0;
    for lambda in f.roots(&f.charpoly(&restricted)) {
        let mut shifted = restricted.clone();
        for (i, row) in shifted.iter_mut().enumerate() {
            row[i] = f.sub(row[i], lambda);
        }
        let null = f.nullspace(&shifted, d);
        found += null.len();
        let mut vecs: Matrix = null
            .iter()
            .map(|x| {
                (0..r)
                    .map(|i| (0..d).fold(0, |acc, c| f.add(acc, f.mul(x[c], basis[c][i]))))
                    .collect()
            })
            .collect();
        let piv = f.rref(&mut vecs);
        out.push((vecs, piv));
    }
    if found != d {
        return Err("class matrix is not diagonalizable on an eigenspace".into());
    }
    Ok(out)
}

/// Lifts `chi(g_k)` from its residues on the powers of `g_k`.
fn lift_value(
    g: &FiniteGroup,
    f: &Field,
    z: u64,
    modq: &[u64],
    k: usize,
    degree: u64,
) -> Result<CycloNum, String> {
    let e = g.exponent();
    let o = g.element_order(g.class_rep(k)) as u64;
    let zo = f.pow(z, e / o);
    let o_inv = f.inv(o % f.q);
    let powers: Vec<u64> = (0..o).map(|l| modq[g.power_class(k, l as i64)]).collect();
    let mut counts = Vec::new();
    let mut total = 0u64;
    for j in 0..o {
        // multiplicity of eigenvalue zeta_o^j on g_k
        let mut acc = 0u64;
        for (l, &val) in powers.iter().enumerate() {
            let root = f.pow(zo, (o - (j * l as u64) % o) % o);
            acc = f.add(acc, f.mul(val, root));
        }
        let m = f.mul(acc, o_inv);
        if m > degree {
            return Err(format!("eigenvalue multiplicity {m} exceeds degree {degree}"));
        }
        total += m;
        if m > 0 {
            counts.push((j * (e / o), m as i64));
        }
    }
    if total != degree {
        return Err("eigenvalue multiplicities do not sum to the degree".into());
    }
    Ok(CycloNum::from_exponent_counts(e, &counts))
}
