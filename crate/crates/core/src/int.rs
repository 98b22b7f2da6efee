//! Exact integer linear algebra: dense matrices over arbitrary-precision
//! integers, Smith normal form with unimodular transforms on both sides,
//! integer linear solving, kernel bases, and fraction-free determinants.
//!
//! The Smith normal form here is the workhorse for every homology
//! computation in the crate: `U * A * V = D` with `|det U| = |det V| = 1`
//! and a non-negative diagonal `d_1 | d_2 | ... | d_r` followed by zeros.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use std::fmt;

use crate::{Error, Result};

/// Shorthand for building a `BigInt` from machine integers.
pub fn bi(x: i64) -> BigInt {
    BigInt::from(x)
}

/// Dense row-major matrix over `BigInt`.
#[derive(Clone, PartialEq, Eq)]
pub struct IntegerMatrix {
    rows: usize,
    cols: usize,
    data: Vec<BigInt>,
}

impl IntegerMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        IntegerMatrix {
            rows,
            cols,
            data: vec![BigInt::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, BigInt::one());
        }
        m
    }

    pub fn from_rows(rows: &[Vec<i64>]) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |row| row.len());
        assert!(
            rows.iter().all(|row| row.len() == c),
            "ragged rows in matrix literal"
        );
        let data = rows.iter().flatten().map(|&x| bi(x)).collect();
        IntegerMatrix { rows: r, cols: c, data }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn at(&self, i: usize, j: usize) -> &BigInt {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, value: BigInt) {
        self.data[i * self.cols + j] = value;
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|x| x.is_zero())
    }

    pub fn column(&self, j: usize) -> Vec<BigInt> {
        (0..self.rows).map(|i| self.at(i, j).clone()).collect()
    }

    pub fn transpose(&self) -> Self {
        let mut out = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out.set(j, i, self.at(i, j).clone());
            }
        }
        out
    }

    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(
            self.cols, other.rows,
            "matrix product shape mismatch: {}x{} * {}x{}",
            self.rows, self.cols, other.rows, other.cols
        );
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.at(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let b = other.at(k, j);
                    if !b.is_zero() {
                        let cur = out.at(i, j) + a * b;
                        out.set(i, j, cur);
                    }
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, x: &[BigInt]) -> Vec<BigInt> {
        assert_eq!(self.cols, x.len(), "matrix-vector shape mismatch");
        (0..self.rows)
            .map(|i| {
                (0..self.cols)
                    .map(|j| self.at(i, j) * &x[j])
                    .sum::<BigInt>()
            })
            .collect()
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        let data = self
            .data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| a + b)
            .collect();
        IntegerMatrix { rows: self.rows, cols: self.cols, data }
    }

    pub fn neg(&self) -> Self {
        let data = self.data.iter().map(|a| -a).collect();
        IntegerMatrix { rows: self.rows, cols: self.cols, data }
    }

    pub fn scale(&self, c: &BigInt) -> Self {
        let data = self.data.iter().map(|a| a * c).collect();
        IntegerMatrix { rows: self.rows, cols: self.cols, data }
    }

    /// Horizontal concatenation `[self | other]`.
    pub fn hstack(&self, other: &Self) -> Self {
        assert_eq!(self.rows, other.rows, "hstack row mismatch");
        let mut out = Self::zeros(self.rows, self.cols + other.cols);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out.set(i, j, self.at(i, j).clone());
            }
            for j in 0..other.cols {
                out.set(i, self.cols + j, other.at(i, j).clone());
            }
        }
        out
    }

    /// Vertical concatenation (self on top of other).
    pub fn vstack(&self, other: &Self) -> Self {
        assert_eq!(self.cols, other.cols, "vstack column mismatch");
        let mut data = self.data.clone();
        data.extend(other.data.iter().cloned());
        IntegerMatrix {
            rows: self.rows + other.rows,
            cols: self.cols,
            data,
        }
    }

    /// Matrix whose columns are the given vectors.
    pub fn from_columns(rows: usize, columns: &[Vec<BigInt>]) -> Self {
        let mut out = Self::zeros(rows, columns.len());
        for (j, col) in columns.iter().enumerate() {
            assert_eq!(col.len(), rows, "column length mismatch");
            for i in 0..rows {
                out.set(i, j, col[i].clone());
            }
        }
        out
    }

    /// Entry-wise reduction into the symmetric-free range `[0, m)`.
    pub fn mod_m(&self, m: &BigInt) -> Self {
        let data = self.data.iter().map(|a| a.mod_floor(m)).collect();
        IntegerMatrix { rows: self.rows, cols: self.cols, data }
    }

    fn swap_rows(&mut self, i: usize, j: usize) {
        if i == j {
            return;
        }
        for k in 0..self.cols {
            self.data.swap(i * self.cols + k, j * self.cols + k);
        }
    }

    fn swap_cols(&mut self, i: usize, j: usize) {
        if i == j {
            return;
        }
        for r in 0..self.rows {
            self.data.swap(r * self.cols + i, r * self.cols + j);
        }
    }

    fn negate_row(&mut self, i: usize) {
        for k in 0..self.cols {
            let idx = i * self.cols + k;
            let v = -&self.data[idx];
            self.data[idx] = v;
        }
    }

    fn negate_col(&mut self, j: usize) {
        for r in 0..self.rows {
            let idx = r * self.cols + j;
            let v = -&self.data[idx];
            self.data[idx] = v;
        }
    }

    /// row[dst] += c * row[src]
    fn row_addmul(&mut self, dst: usize, src: usize, c: &BigInt) {
        if c.is_zero() {
            return;
        }
        for k in 0..self.cols {
            let add = c * &self.data[src * self.cols + k];
            let idx = dst * self.cols + k;
            let v = &self.data[idx] + add;
            self.data[idx] = v;
        }
    }

    /// col[dst] += c * col[src]
    fn col_addmul(&mut self, dst: usize, src: usize, c: &BigInt) {
        if c.is_zero() {
            return;
        }
        for r in 0..self.rows {
            let add = c * &self.data[r * self.cols + src];
            let idx = r * self.cols + dst;
            let v = &self.data[idx] + add;
            self.data[idx] = v;
        }
    }

    /// Exact determinant of a square matrix by fraction-free (Bareiss)
    /// elimination. Every division below is exact.
    pub fn determinant(&self) -> Result<BigInt> {
        if self.rows != self.cols {
            return Err(Error::Shape(format!(
                "determinant of non-square {}x{}",
                self.rows, self.cols
            )));
        }
        let n = self.rows;
        if n == 0 {
            return Ok(BigInt::one());
        }
        let mut w = self.clone();
        let mut sign = BigInt::one();
        let mut prev = BigInt::one();
        for k in 0..n - 1 {
            if w.at(k, k).is_zero() {
                let swap = (k + 1..n).find(|&i| !w.at(i, k).is_zero());
                match swap {
                    Some(i) => {
                        w.swap_rows(i, k);
                        sign = -sign;
                    }
                    None => return Ok(BigInt::zero()),
                }
            }
            for i in k + 1..n {
                for j in k + 1..n {
                    let num = w.at(i, j) * w.at(k, k) - w.at(i, k) * w.at(k, j);
                    w.set(i, j, num / &prev);
                }
                w.set(i, k, BigInt::zero());
            }
            prev = w.at(k, k).clone();
        }
        Ok(sign * w.at(n - 1, n - 1))
    }

    /// Rank over the rationals by fraction-free row elimination. This is an
    /// independent route from the Smith normal form (used to cross-check
    /// rational-coefficient computations against integer ones).
    pub fn rank_rational(&self) -> usize {
        let mut w = self.clone();
        let mut rank = 0;
        for col in 0..w.cols {
            let pivot = (rank..w.rows).find(|&i| !w.at(i, col).is_zero());
            let Some(p) = pivot else { continue };
            w.swap_rows(rank, p);
            for i in rank + 1..w.rows {
                if w.at(i, col).is_zero() {
                    continue;
                }
                let a = w.at(rank, col).clone();
                let b = w.at(i, col).clone();
                for j in col..w.cols {
                    let v = w.at(i, j) * &a - w.at(rank, j) * &b;
                    w.set(i, j, v);
                }
                // Tame coefficient growth; scaling a row does not change rank.
                let g = (col..w.cols)
                    .map(|j| w.at(i, j).abs())
                    .fold(BigInt::zero(), |acc, x| acc.gcd(&x));
                if g > BigInt::one() {
                    for j in col..w.cols {
                        let v = w.at(i, j) / &g;
                        w.set(i, j, v);
                    }
                }
            }
            rank += 1;
            if rank == w.rows {
                break;
            }
        }
        rank
    }
}

impl fmt::Debug for IntegerMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "IntegerMatrix {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            let row: Vec<String> = (0..self.cols).map(|j| self.at(i, j).to_string()).collect();
            writeln!(f, "  [{}]", row.join(", "))?;
        }
        write!(f, "]")
    }
}

impl fmt::Display for IntegerMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

/// Result of a Smith normal form computation: `u * a * v = d` with both
/// transforms unimodular (inverses carried along exactly), `d` diagonal with
/// non-negative entries satisfying the divisibility chain.
#[derive(Clone, Debug)]
pub struct SmithDecomposition {
    pub u: IntegerMatrix,
    pub d: IntegerMatrix,
    pub v: IntegerMatrix,
    pub u_inv: IntegerMatrix,
    pub v_inv: IntegerMatrix,
    pub rank: usize,
}

impl SmithDecomposition {
    /// Diagonal entries `d_1, ..., d_min(r,c)` (zeros included).
    pub fn diagonal(&self) -> Vec<BigInt> {
        let n = self.d.rows().min(self.d.cols());
        (0..n).map(|i| self.d.at(i, i).clone()).collect()
    }

    /// Nontrivial invariant factors (entries >= 2).
    pub fn invariant_factors(&self) -> Vec<BigInt> {
        self.diagonal()
            .into_iter()
            .filter(|x| x > &BigInt::one())
            .collect()
    }
}

struct SnfWork {
    m: IntegerMatrix,
    u: IntegerMatrix,
    u_inv: IntegerMatrix,
    v: IntegerMatrix,
    v_inv: IntegerMatrix,
}

impl SnfWork {
    fn new(a: &IntegerMatrix) -> Self {
        SnfWork {
            m: a.clone(),
            u: IntegerMatrix::identity(a.rows()),
            u_inv: IntegerMatrix::identity(a.rows()),
            v: IntegerMatrix::identity(a.cols()),
            v_inv: IntegerMatrix::identity(a.cols()),
        }
    }

    fn swap_rows(&mut self, i: usize, j: usize) {
        self.m.swap_rows(i, j);
        self.u.swap_rows(i, j);
        self.u_inv.swap_cols(i, j);
    }

    fn swap_cols(&mut self, i: usize, j: usize) {
        self.m.swap_cols(i, j);
        self.v.swap_cols(i, j);
        self.v_inv.swap_rows(i, j);
    }

    fn negate_row(&mut self, i: usize) {
        self.m.negate_row(i);
        self.u.negate_row(i);
        self.u_inv.negate_col(i);
    }

    /// row[dst] += c * row[src], with the inverse transform tracked.
    fn row_addmul(&mut self, dst: usize, src: usize, c: &BigInt) {
        self.m.row_addmul(dst, src, c);
        self.u.row_addmul(dst, src, c);
        let neg = -c;
        self.u_inv.col_addmul(src, dst, &neg);
    }

    /// col[dst] += c * col[src], with the inverse transform tracked.
    fn col_addmul(&mut self, dst: usize, src: usize, c: &BigInt) {
        self.m.col_addmul(dst, src, c);
        self.v.col_addmul(dst, src, c);
        let neg = -c;
        self.v_inv.row_addmul(src, dst, &neg);
    }

    /// Left-multiply rows (i, j) by the 2x2 unimodular `t` (inverse `t_inv`).
    fn left2(&mut self, i: usize, j: usize, t: &[[BigInt; 2]; 2], t_inv: &[[BigInt; 2]; 2]) {
        for target in [&mut self.m, &mut self.u] {
            for col in 0..target.cols() {
                let a = target.at(i, col).clone();
                let b = target.at(j, col).clone();
                target.set(i, col, &t[0][0] * &a + &t[0][1] * &b);
                target.set(j, col, &t[1][0] * &a + &t[1][1] * &b);
            }
        }
        // u_inv := u_inv * t_inv
        for row in 0..self.u_inv.rows() {
            let a = self.u_inv.at(row, i).clone();
            let b = self.u_inv.at(row, j).clone();
            self.u_inv.set(row, i, &a * &t_inv[0][0] + &b * &t_inv[1][0]);
            self.u_inv.set(row, j, &a * &t_inv[0][1] + &b * &t_inv[1][1]);
        }
    }

    /// Right-multiply cols (i, j) by the 2x2 unimodular `t` (inverse `t_inv`).
    fn right2(&mut self, i: usize, j: usize, t: &[[BigInt; 2]; 2], t_inv: &[[BigInt; 2]; 2]) {
        for target in [&mut self.m, &mut self.v] {
            for row in 0..target.rows() {
                let a = target.at(row, i).clone();
                let b = target.at(row, j).clone();
                target.set(row, i, &a * &t[0][0] + &b * &t[1][0]);
                target.set(row, j, &a * &t[0][1] + &b * &t[1][1]);
            }
        }
        // v_inv := t_inv * v_inv
        for col in 0..self.v_inv.cols() {
            let a = self.v_inv.at(i, col).clone();
            let b = self.v_inv.at(j, col).clone();
            self.v_inv.set(i, col, &t_inv[0][0] * &a + &t_inv[0][1] * &b);
            self.v_inv.set(j, col, &t_inv[1][0] * &a + &t_inv[1][1] * &b);
        }
    }

    /// Locate the entry of minimal nonzero absolute value in the submatrix
    /// at (t, t) and beyond. Deterministic: row-major first among ties.
    fn find_pivot(&self, t: usize) -> Option<(usize, usize)> {
        let mut best: Option<(usize, usize)> = None;
        for i in t..self.m.rows() {
            for j in t..self.m.cols() {
                let x = self.m.at(i, j);
                if x.is_zero() {
                    continue;
                }
                match best {
                    None => best = Some((i, j)),
                    Some((bi_, bj)) => {
                        if x.abs() < self.m.at(bi_, bj).abs() {
                            best = Some((i, j));
                        }
                    }
                }
            }
        }
        best
    }
}

/// Compute the Smith normal form of `a`.
///
/// Pivoting is by minimal nonzero absolute value; row/column reductions are
/// Euclidean steps; the divisibility chain is repaired with explicit 2x2
/// unimodular transforms. Deterministic for a given input.
pub fn smith_normal_form(a: &IntegerMatrix) -> SmithDecomposition {
    let mut w = SnfWork::new(a);
    let (rows, cols) = (a.rows(), a.cols());
    let limit = rows.min(cols);
    let mut rank = 0;

    for t in 0..limit {
        let Some((pi, pj)) = w.find_pivot(t) else { break };
        w.swap_rows(t, pi);
        w.swap_cols(t, pj);
        loop {
            // Euclidean reduction of column t below the pivot.
            for i in t + 1..rows {
                if !w.m.at(i, t).is_zero() {
                    let q = w.m.at(i, t) / w.m.at(t, t);
                    let nq = -q;
                    w.row_addmul(i, t, &nq);
                }
            }
            // ... and of row t to the right of the pivot.
            for j in t + 1..cols {
                if !w.m.at(t, j).is_zero() {
                    let q = w.m.at(t, j) / w.m.at(t, t);
                    let nq = -q;
                    w.col_addmul(j, t, &nq);
                }
            }
            let col_clear = (t + 1..rows).all(|i| w.m.at(i, t).is_zero());
            let row_clear = (t + 1..cols).all(|j| w.m.at(t, j).is_zero());
            if col_clear && row_clear {
                break;
            }
            // A nonzero remainder is strictly smaller than the old pivot;
            // promote the new minimum and repeat.
            let (pi, pj) = w.find_pivot(t).expect("pivot vanished mid-reduction");
            w.swap_rows(t, pi);
            w.swap_cols(t, pj);
        }
        rank = t + 1;
    }

    // Non-negative diagonal.
    for i in 0..rank {
        if w.m.at(i, i).is_negative() {
            w.negate_row(i);
        }
    }

    // Repair the divisibility chain d_i | d_{i+1} with gcd/lcm 2x2 blocks.
    loop {
        let mut changed = false;
        for i in 0..rank.saturating_sub(1) {
            let a_i = w.m.at(i, i).clone();
            let b_i = w.m.at(i + 1, i + 1).clone();
            if (&b_i % &a_i).is_zero() {
                continue;
            }
            let ext = a_i.extended_gcd(&b_i);
            let (g, s, t) = (ext.gcd, ext.x, ext.y);
            let a_g = &a_i / &g;
            let b_g = &b_i / &g;
            // L = [[s, t], [-b/g, a/g]], L^-1 = [[a/g, -t], [b/g, s]]
            let l = [[s.clone(), t.clone()], [-&b_g, a_g.clone()]];
            let l_inv = [[a_g.clone(), -&t], [b_g.clone(), s.clone()]];
            // R = [[1, -t*b/g], [1, s*a/g]], R^-1 = [[s*a/g, t*b/g], [-1, 1]]
            let r = [
                [BigInt::one(), -(&t * &b_g)],
                [BigInt::one(), &s * &a_g],
            ];
            let r_inv = [
                [&s * &a_g, &t * &b_g],
                [-BigInt::one(), BigInt::one()],
            ];
            w.left2(i, i + 1, &l, &l_inv);
            w.right2(i, i + 1, &r, &r_inv);
            changed = true;
        }
        if !changed {
            break;
        }
    }

    SmithDecomposition {
        u: w.u,
        d: w.m,
        v: w.v,
        u_inv: w.u_inv,
        v_inv: w.v_inv,
        rank,
    }
}

/// Solve `a x = b` over the integers; `None` when no integer solution exists.
pub fn solve(snf: &SmithDecomposition, b: &[BigInt]) -> Option<Vec<BigInt>> {
    let y = snf.u.mul_vec(b);
    let (rows, cols) = (snf.d.rows(), snf.d.cols());
    let mut z = vec![BigInt::zero(); cols];
    for i in 0..rows {
        if i < cols {
            let d = snf.d.at(i, i);
            if d.is_zero() {
                if !y[i].is_zero() {
                    return None;
                }
            } else {
                let (q, r) = y[i].div_rem(d);
                if !r.is_zero() {
                    return None;
                }
                z[i] = q;
            }
        } else if !y[i].is_zero() {
            return None;
        }
    }
    Some(snf.v.mul_vec(&z))
}

/// Basis of the integer kernel of the decomposed matrix, as columns.
pub fn kernel_basis(snf: &SmithDecomposition) -> IntegerMatrix {
    let cols = snf.d.cols();
    let free = cols - snf.rank;
    let mut out = IntegerMatrix::zeros(cols, free);
    for (k, j) in (snf.rank..cols).enumerate() {
        for i in 0..cols {
            out.set(i, k, snf.v.at(i, j).clone());
        }
    }
    out
}

/// Does `b` lie in the column span (over Z) of the decomposed matrix?
pub fn in_image(snf: &SmithDecomposition, b: &[BigInt]) -> bool {
    solve(snf, b).is_some()
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn check_decomposition(a: &IntegerMatrix, snf: &SmithDecomposition) {
        // u * a * v == d
        let lhs = snf.u.mul(a).mul(&snf.v);
        assert_eq!(lhs, snf.d, "U*A*V != D");
        // transforms are exact inverses, hence unimodular
        assert_eq!(
            snf.u.mul(&snf.u_inv),
            IntegerMatrix::identity(a.rows()),
            "u * u_inv != I"
        );
        assert_eq!(
            snf.v.mul(&snf.v_inv),
            IntegerMatrix::identity(a.cols()),
            "v * v_inv != I"
        );
        // determinants are exactly +-1
        let du = snf.u.determinant().unwrap();
        let dv = snf.v.determinant().unwrap();
        assert_eq!(du.abs(), BigInt::one(), "det U = {du}");
        assert_eq!(dv.abs(), BigInt::one(), "det V = {dv}");
        // diagonal, non-negative, divisibility chain, zeros trailing
        let n = snf.d.rows().min(snf.d.cols());
        for i in 0..snf.d.rows() {
            for j in 0..snf.d.cols() {
                if i != j {
                    assert!(snf.d.at(i, j).is_zero(), "off-diagonal entry at ({i},{j})");
                }
            }
        }
        let diag = snf.diagonal();
        for i in 0..n {
            assert!(!diag[i].is_negative(), "negative diagonal entry");
        }
        for i in 0..snf.rank {
            assert!(!diag[i].is_zero(), "zero inside the rank block");
        }
        for i in snf.rank..n {
            assert!(diag[i].is_zero(), "nonzero past the rank block");
        }
        for i in 0..snf.rank.saturating_sub(1) {
            assert!(
                (&diag[i + 1] % &diag[i]).is_zero(),
                "divisibility broken: {} does not divide {}",
                diag[i],
                diag[i + 1]
            );
        }
    }

    /// gcd of all k x k minors; the k-th determinantal divisor.
    fn minor_gcd(a: &IntegerMatrix, k: usize) -> BigInt {
        fn combos(n: usize, k: usize) -> Vec<Vec<usize>> {
            let mut out = Vec::new();
            let mut cur = Vec::new();
            fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
                if cur.len() == k {
                    out.push(cur.clone());
                    return;
                }
                for i in start..n {
                    cur.push(i);
                    rec(i + 1, n, k, cur, out);
                    cur.pop();
                }
            }
            rec(0, n, k, &mut cur, &mut out);
            out
        }
        let mut g = BigInt::zero();
        for rs in combos(a.rows(), k) {
            for cs in combos(a.cols(), k) {
                let mut sub = IntegerMatrix::zeros(k, k);
                for (i, &r) in rs.iter().enumerate() {
                    for (j, &c) in cs.iter().enumerate() {
                        sub.set(i, j, a.at(r, c).clone());
                    }
                }
                g = g.gcd(&sub.determinant().unwrap());
            }
        }
        g
    }

    #[test]
    fn identity_is_its_own_normal_form() {
        let a = IntegerMatrix::identity(2);
        let snf = smith_normal_form(&a);
        check_decomposition(&a, &snf);
        assert_eq!(snf.diagonal(), vec![bi(1), bi(1)]);
        assert_eq!(snf.rank, 2);
    }

    #[test]
    fn one_by_one_doubling() {
        let a = IntegerMatrix::from_rows(&[vec![2]]);
        let snf = smith_normal_form(&a);
        check_decomposition(&a, &snf);
        assert_eq!(snf.diagonal(), vec![bi(2)]);
    }

    #[test]
    fn two_by_two_with_gcd_two() {
        let a = IntegerMatrix::from_rows(&[vec![2, 4], vec![6, 8]]);
        let snf = smith_normal_form(&a);
        check_decomposition(&a, &snf);
        // d1 = gcd of all entries, d1*d2 = |det|.
        assert_eq!(snf.diagonal(), vec![bi(2), bi(4)]);
        assert_eq!(minor_gcd(&a, 1), bi(2));
        assert_eq!(a.determinant().unwrap().abs(), bi(8));
    }

    #[test]
    fn zero_matrix_has_rank_zero() {
        let a = IntegerMatrix::zeros(3, 2);
        let snf = smith_normal_form(&a);
        check_decomposition(&a, &snf);
        assert_eq!(snf.rank, 0);
        assert!(kernel_basis(&snf).cols() == 2);
    }

    #[test]
    fn random_matrices_satisfy_all_invariants_and_determinant_divisors() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for trial in 0..40 {
            let rows = rng.gen_range(1..=5);
            let cols = rng.gen_range(1..=5);
            let mut a = IntegerMatrix::zeros(rows, cols);
            for i in 0..rows {
                for j in 0..cols {
                    a.set(i, j, bi(rng.gen_range(-9..=9)));
                }
            }
            let snf = smith_normal_form(&a);
            check_decomposition(&a, &snf);
            // Determinantal-divisor oracle: product of the first k diagonal
            // entries equals the gcd of all k x k minors.
            let diag = snf.diagonal();
            let mut prod = BigInt::one();
            for k in 1..=rows.min(cols) {
                prod *= &diag[k - 1];
                let g = minor_gcd(&a, k);
                assert_eq!(prod, g, "determinant divisor mismatch at k={k}, trial {trial}");
            }
        }
    }

    #[test]
    fn solve_finds_integer_solutions_and_rejects_non_solutions() {
        let a = IntegerMatrix::from_rows(&[vec![2, 0], vec![0, 3]]);
        let snf = smith_normal_form(&a);
        let x = solve(&snf, &[bi(4), bi(9)]).expect("solvable");
        assert_eq!(a.mul_vec(&x), vec![bi(4), bi(9)]);
        assert!(solve(&snf, &[bi(1), bi(0)]).is_none(), "2x = 1 has no integer solution");

        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..25 {
            let rows = rng.gen_range(1..=4);
            let cols = rng.gen_range(1..=4);
            let mut a = IntegerMatrix::zeros(rows, cols);
            for i in 0..rows {
                for j in 0..cols {
                    a.set(i, j, bi(rng.gen_range(-5..=5)));
                }
            }
            let x0: Vec<BigInt> = (0..cols).map(|_| bi(rng.gen_range(-3..=3))).collect();
            let b = a.mul_vec(&x0);
            let snf = smith_normal_form(&a);
            let x = solve(&snf, &b).expect("constructed to be solvable");
            assert_eq!(a.mul_vec(&x), b);
        }
    }

    #[test]
    fn kernel_basis_spans_the_kernel() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..25 {
            let rows = rng.gen_range(1..=4);
            let cols = rng.gen_range(1..=5);
            let mut a = IntegerMatrix::zeros(rows, cols);
            for i in 0..rows {
                for j in 0..cols {
                    a.set(i, j, bi(rng.gen_range(-4..=4)));
                }
            }
            let snf = smith_normal_form(&a);
            let k = kernel_basis(&snf);
            assert_eq!(k.cols(), cols - snf.rank);
            if k.cols() > 0 {
                assert!(a.mul(&k).is_zero(), "kernel columns must be annihilated");
            }
        }
    }

    #[test]
    fn bareiss_determinant_matches_cofactor_expansion() {
        let a = IntegerMatrix::from_rows(&[vec![2, -1, 0], vec![3, 5, 1], vec![0, 4, -2]]);
        // cofactor by hand: 2*(5*-2 - 1*4) - (-1)*(3*-2 - 0) + 0 = 2*(-14) + (-6) = -34
        assert_eq!(a.determinant().unwrap(), bi(-34));
    }

    #[test]
    fn rational_rank_agrees_with_smith_rank() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        for _ in 0..30 {
            let rows = rng.gen_range(1..=6);
            let cols = rng.gen_range(1..=6);
            let mut a = IntegerMatrix::zeros(rows, cols);
            for i in 0..rows {
                for j in 0..cols {
                    a.set(i, j, bi(rng.gen_range(-6..=6)));
                }
            }
            assert_eq!(a.rank_rational(), smith_normal_form(&a).rank);
        }
    }
}
