//! Dense linear algebra over a prime field `F_q`.

use crate::arith::{inv_mod, pow_mod};

pub type Matrix = Vec<Vec<u64>>;

#[derive(Clone, Copy, Debug)]
pub struct Field {
    pub q: u64,
}

impl Field {
    pub fn new(q: u64) -> Self {
        Field { q }
    }

    #[inline]
    pub fn add(&self, a: u64, b: u64) -> u64 {
        (a + b) % self.q
    }

    #[inline]
    pub fn sub(&self, a: u64, b: u64) -> u64 {
        (a + self.q - b % self.q) % self.q
    }

    #[inline]
    pub fn mul(&self, a: u64, b: u64) -> u64 {
        ((a as u128 * b as u128) % self.q as u128) as u64
    }

    pub fn inv(&self, a: u64) -> u64 {
        inv_mod(a % self.q, self.q)
    }

    pub fn pow(&self, a: u64, e: u64) -> u64 {
        pow_mod(a, e, self.q)
    }

    #[cfg(test)]
    pub fn reduce(&self, a: i64) -> u64 {
        a.rem_euclid(self.q as i64) as u64
    }

    /// In-place reduced row echelon form; returns the pivot columns.
    pub fn rref(&self, m: &mut Matrix) -> Vec<usize> {
        let rows = m.len();
        let cols = m.first().map_or(0, Vec::len);
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..cols {
            if r == rows {
                break;
            }
            let Some(p) = (r..rows).find(|&i| m[i][c] != 0) else {
                continue;
            };
            m.swap(r, p);
            let inv = self.inv(m[r][c]);
            for x in m[r].iter_mut() {
                *x = self.mul(*x, inv);
            }
            for i in 0..rows {
                if i != r && m[i][c] != 0 {
                    let f = m[i][c];
                    for j in 0..cols {
                        let v = self.mul(f, m[r][j]);
                        m[i][j] = self.sub(m[i][j], v);
                    }
                }
            }
            pivots.push(c);
            r += 1;
        }
        m.truncate(r);
        pivots
    }

    /// Basis of `{x : m x = 0}`.
    pub fn nullspace(&self, m: &Matrix, cols: usize) -> Vec<Vec<u64>> {
        let mut a = m.clone();
        let pivots = self.rref(&mut a);
        let free: Vec<usize> = (0..cols).filter(|c| !pivots.contains(c)).collect();
        free.iter()
            .map(|&f| {
                let mut v = vec![0u64; cols];
                v[f] = 1;
                for (row, &pc) in a.iter().zip(&pivots) {
                    v[pc] = self.sub(0, row[f]);
                }
                v
            })
            .collect()
    }

    /// Characteristic polynomial `det(xI - m)`, low degree first, via
    /// reduction to upper Hessenberg form.
    pub fn charpoly(&self, m: &Matrix) -> Vec<u64> {
        let n = m.len();
        let mut h = m.clone();
        for col in 0..n.saturating_sub(2) {
            let m_row = col + 1;
            let Some(piv) = (m_row..n).find(|&i| h[i][col] != 0) else {
                continue;
            };
            if piv != m_row {
                h.swap(piv, m_row);
                for row in h.iter_mut() {
                    row.swap(piv, m_row);
                }
            }
            let t_inv = self.inv(h[m_row][col]);
            for i in (m_row + 1)..n {
                let u = self.mul(h[i][col], t_inv);
                if u == 0 {
                    continue;
                }
                for j in 0..n {
                    let v = self.mul(u, h[m_row][j]);
                    h[i][j] = self.sub(h[i][j], v);
                }
                for row in h.iter_mut() {
                    let v = self.mul(u, row[i]);
                    row[m_row] = self.add(row[m_row], v);
                }
            }
        }
        // p_{k+1} = (x - h_kk) p_k - sum_{i=1}^{k} (prod_{j} h_{j,j-1}) h_{k-i,k} p_{k-i}
        let mut polys: Vec<Vec<u64>> = vec![vec![1]];
        for k in 0..n {
            let pk = &polys[k];
            let mut next = vec![0u64; k + 2];
            for (d, &c) in pk.iter().enumerate() {
                next[d + 1] = self.add(next[d + 1], c);
                next[d] = self.sub(next[d], self.mul(h[k][k], c));
            }
            let mut t = 1u64;
            for i in 1..=k {
                t = self.mul(t, h[k - i + 1][k - i]);
                let coef = self.mul(t, h[k - i][k]);
                if coef == 0 {
                    continue;
                }
                for (d, &c) in polys[k - i].iter().enumerate() {
                    next[d] = self.sub(next[d], self.mul(coef, c));
                }
            }
            polys.push(next);
        }
        polys.pop().unwrap_or_else(|| vec![1])
    }

    pub fn eval(&self, poly: &[u64], x: u64) -> u64 {
        poly.iter().rev().fold(0, |acc, &c| self.add(self.mul(acc, x), c))
    }

    /// All roots of `poly` in `F_q`, by exhaustive evaluation.
    pub fn roots(&self, poly: &[u64]) -> Vec<u64> {
        (0..self.q).filter(|&x| self.eval(poly, x) == 0).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn charpoly_matches_hand_expansion() {
        let f = Field::new(13);
        // [[2,1],[1,2]] has charpoly x^2 - 4x + 3
        let m = vec![vec![2, 1], vec![1, 2]];
        assert_eq!(f.charpoly(&m), vec![3, f.reduce(-4), 1]);
        assert_eq!(f.roots(&f.charpoly(&m)), vec![1, 3]);
        // companion of x^3 - 2 (columns), permuted so Hessenberg pivoting is exercised
        let c = vec![vec![0, 0, 2], vec![1, 0, 0], vec![0, 1, 0]];
        assert_eq!(f.charpoly(&c), vec![f.reduce(-2), 0, 0, 1]);
        let p = vec![vec![0, 0, 1], vec![0, 1, 0], vec![1, 0, 0]];
        // eigenvalues 1, 1, -1: (x-1)^2 (x+1) = x^3 - x^2 - x + 1
        assert_eq!(f.charpoly(&p), vec![1, f.reduce(-1), f.reduce(-1), 1]);
    }

    #[test]
    fn nullspace_dimension() {
        let f = Field::new(7);
        let m = vec![vec![1, 2, 3], vec![2, 4, 6]];
        let ns = f.nullspace(&m, 3);
        assert_eq!(ns.len(), 2);
        for v in ns {
            let dot: u64 = m[0].iter().zip(&v).fold(0, |acc, (a, b)| f.add(acc, f.mul(*a, *b)));
            assert_eq!(dot, 0);
        }
    }
}
