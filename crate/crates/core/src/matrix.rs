//! Exact integer matrices: multiplication, Bareiss determinants, Smith and
//! Hermite normal forms. No floating point anywhere.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

/// A dense matrix of arbitrary-precision integers, row major.
#[derive(Clone, PartialEq, Eq)]
pub struct IntMatrix {
    rows: usize,
    cols: usize,
    data: Vec<BigInt>,
}

impl IntMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        IntMatrix {
            rows,
            cols,
            data: vec![BigInt::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = IntMatrix::zeros(n, n);
        for i in 0..n {
            m.set(i, i, BigInt::one());
        }
        m
    }

    pub fn from_rows<T: Into<BigInt> + Clone>(rows: &[Vec<T>]) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |row| row.len());
        let mut data = Vec::with_capacity(r * c);
        for row in rows {
            assert_eq!(row.len(), c, "ragged rows");
            for x in row {
                data.push(x.clone().into());
            }
        }
        IntMatrix { rows: r, cols: c, data }
    }

    pub fn from_columns(cols: &[Vec<BigInt>]) -> Self {
        let c = cols.len();
        let r = cols.first().map_or(0, |col| col.len());
        let mut m = IntMatrix::zeros(r, c);
        for (j, col) in cols.iter().enumerate() {
            assert_eq!(col.len(), r, "ragged columns");
            for (i, x) in col.iter().enumerate() {
                m.set(i, j, x.clone());
            }
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &BigInt {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, value: BigInt) {
        self.data[i * self.cols + j] = value;
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn is_identity(&self) -> bool {
        if !self.is_square() {
            return false;
        }
        for i in 0..self.rows {
            for j in 0..self.cols {
                let expect = if i == j { BigInt::one() } else { BigInt::zero() };
                if *self.get(i, j) != expect {
                    return false;
                }
            }
        }
        true
    }

    pub fn transpose(&self) -> IntMatrix {
        let mut m = IntMatrix::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                m.set(j, i, self.get(i, j).clone());
            }
        }
        m
    }

    pub fn mul(&self, other: &IntMatrix) -> Result<IntMatrix> {
        if self.cols != other.rows {
            return Err(Error::Dimension(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut out = IntMatrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let b = other.get(k, j);
                    if b.is_zero() {
                        continue;
                    }
                    let cur = out.get(i, j) + a * b;
                    out.set(i, j, cur);
                }
            }
        }
        Ok(out)
    }

    pub fn mul_vector(&self, v: &[BigInt]) -> Result<Vec<BigInt>> {
        if self.cols != v.len() {
            return Err(Error::Dimension(format!(
                "cannot multiply {}x{} by vector of length {}",
                self.rows,
                self.cols,
                v.len()
            )));
        }
        let mut out = vec![BigInt::zero(); self.rows];
        for i in 0..self.rows {
            let mut acc = BigInt::zero();
            for j in 0..self.cols {
                acc += self.get(i, j) * &v[j];
            }
            out[i] = acc;
        }
        Ok(out)
    }

    pub fn column(&self, j: usize) -> Vec<BigInt> {
        (0..self.rows).map(|i| self.get(i, j).clone()).collect()
    }

    /// Exact determinant by fraction-free (Bareiss) elimination.
    pub fn determinant(&self) -> Result<BigInt> {
        if !self.is_square() {
            return Err(Error::NotSquare {
                rows: self.rows,
                cols: self.cols,
            });
        }
        let n = self.rows;
        if n == 0 {
            return Ok(BigInt::one());
        }
        let mut a = self.data.clone();
        let idx = |i: usize, j: usize| i * n + j;
        let mut sign = 1i32;
        let mut prev = BigInt::one();
        for k in 0..n - 1 {
            if a[idx(k, k)].is_zero() {
                let pivot = (k + 1..n).find(|&i| !a[idx(i, k)].is_zero());
                match pivot {
                    Some(i) => {
                        for j in 0..n {
                            a.swap(idx(k, j), idx(i, j));
                        }
                        sign = -sign;
                    }
                    None => return Ok(BigInt::zero()),
                }
            }
            for i in k + 1..n {
                for j in k + 1..n {
                    let num = &a[idx(i, j)] * &a[idx(k, k)] - &a[idx(i, k)] * &a[idx(k, j)];
                    a[idx(i, j)] = &num / &prev;
                }
                a[idx(i, k)] = BigInt::zero();
            }
            prev = a[idx(k, k)].clone();
        }
        let det = a[idx(n - 1, n - 1)].clone();
        Ok(if sign < 0 { -det } else { det })
    }

    pub fn trace(&self) -> BigInt {
        (0..self.rows.min(self.cols))
            .map(|i| self.get(i, i).clone())
            .sum()
    }

    /// Entries as decimal strings, for exact serialization.
    pub fn to_string_rows(&self) -> Vec<Vec<String>> {
        (0..self.rows)
            .map(|i| (0..self.cols).map(|j| self.get(i, j).to_string()).collect())
            .collect()
    }
}

impl fmt::Debug for IntMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "IntMatrix {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            let row: Vec<String> = (0..self.cols).map(|j| self.get(i, j).to_string()).collect();
            writeln!(f, "  [{}]", row.join(", "))?;
        }
        write!(f, "]")
    }
}

/// Result of a Smith normal form computation: `u * m * v = d` with `d`
/// diagonal, nonnegative, each entry dividing the next, and `u`, `v`
/// unimodular.
#[derive(Clone, Debug)]
pub struct SmithNormalForm {
    pub d: IntMatrix,
    pub u: IntMatrix,
    pub v: IntMatrix,
}

impl SmithNormalForm {
    pub fn diagonal(&self) -> Vec<BigInt> {
        let n = self.d.rows().min(self.d.cols());
        (0..n).map(|i| self.d.get(i, i).clone()).collect()
    }
}

struct SnfWork {
    a: IntMatrix,
    u: IntMatrix,
    v: IntMatrix,
}

impl SnfWork {
    fn swap_rows(&mut self, i: usize, j: usize) {
        if i == j {
            return;
        }
        for c in 0..self.a.cols {
            let x = self.a.get(i, c).clone();
            let y = self.a.get(j, c).clone();
            self.a.set(i, c, y);
            self.a.set(j, c, x);
        }
        for c in 0..self.u.cols {
            let x = self.u.get(i, c).clone();
            let y = self.u.get(j, c).clone();
            self.u.set(i, c, y);
            self.u.set(j, c, x);
        }
    }

    fn swap_cols(&mut self, i: usize, j: usize) {
        if i == j {
            return;
        }
        for r in 0..self.a.rows {
            let x = self.a.get(r, i).clone();
            let y = self.a.get(r, j).clone();
            self.a.set(r, i, y);
            self.a.set(r, j, x);
        }
        for r in 0..self.v.rows {
            let x = self.v.get(r, i).clone();
            let y = self.v.get(r, j).clone();
            self.v.set(r, i, y);
            self.v.set(r, j, x);
        }
    }

    /// row_i += q * row_j
    fn add_row(&mut self, i: usize, j: usize, q: &BigInt) {
        if q.is_zero() {
            return;
        }
        for c in 0..self.a.cols {
            let x = self.a.get(i, c) + q * self.a.get(j, c);
            self.a.set(i, c, x);
        }
        for c in 0..self.u.cols {
            let x = self.u.get(i, c) + q * self.u.get(j, c);
            self.u.set(i, c, x);
        }
    }

    /// col_i += q * col_j
    fn add_col(&mut self, i: usize, j: usize, q: &BigInt) {
        if q.is_zero() {
            return;
        }
        for r in 0..self.a.rows {
            let x = self.a.get(r, i) + q * self.a.get(r, j);
            self.a.set(r, i, x);
        }
        for r in 0..self.v.rows {
            let x = self.v.get(r, i) + q * self.v.get(r, j);
            self.v.set(r, i, x);
        }
    }

    fn negate_row(&mut self, i: usize) {
        for c in 0..self.a.cols {
            let x = -self.a.get(i, c).clone();
            self.a.set(i, c, x);
        }
        for c in 0..self.u.cols {
            let x = -self.u.get(i, c).clone();
            self.u.set(i, c, x);
        }
    }

    /// Smallest nonzero entry (by absolute value) in the submatrix at (t, t).
    fn find_pivot(&self, t: usize) -> Option<(usize, usize)> {
        let mut best: Option<(usize, usize)> = None;
        for i in t..self.a.rows {
            for j in t..self.a.cols {
                let x = self.a.get(i, j);
                if x.is_zero() {
                    continue;
                }
                match best {
                    None => best = Some((i, j)),
                    Some((bi, bj)) => {
                        if x.abs() < self.a.get(bi, bj).abs() {
                            best = Some((i, j));
                        }
                    }
                }
            }
        }
        best
    }

    /// Clears row and column `t` outside the pivot by Euclidean steps.
    fn eliminate(&mut self, t: usize) {
        loop {
            // column below/above pivot
            let mut progressed = false;
            for i in (t + 1)..self.a.rows {
                if self.a.get(i, t).is_zero() {
                    continue;
                }
                let q = -(self.a.get(i, t) / self.a.get(t, t));
                self.add_row(i, t, &q);
                if !self.a.get(i, t).is_zero() {
                    // remainder became the smaller entry; promote it
                    self.swap_rows(i, t);
                }
                progressed = true;
            }
            for j in (t + 1)..self.a.cols {
                if self.a.get(t, j).is_zero() {
                    continue;
                }
                let q = -(self.a.get(t, j) / self.a.get(t, t));
                self.add_col(j, t, &q);
                if !self.a.get(t, j).is_zero() {
                    self.swap_cols(j, t);
                }
                progressed = true;
            }
            let col_clear = ((t + 1)..self.a.rows).all(|i| self.a.get(i, t).is_zero());
            let row_clear = ((t + 1)..self.a.cols).all(|j| self.a.get(t, j).is_zero());
            if col_clear && row_clear {
                return;
            }
            if !progressed {
                unreachable!("smith elimination stalled");
            }
        }
    }
}

/// Smith normal form with unimodular transforms: `u * m * v = d`.
pub fn smith_normal_form(m: &IntMatrix) -> SmithNormalForm {
    let mut work = SnfWork {
        a: m.clone(),
        u: IntMatrix::identity(m.rows()),
        v: IntMatrix::identity(m.cols()),
    };
    let steps = m.rows().min(m.cols());
    for t in 0..steps {
        let Some((pi, pj)) = work.find_pivot(t) else {
            break;
        };
        work.swap_rows(t, pi);
        work.swap_cols(t, pj);
        work.eliminate(t);
    }
    // nonnegative diagonal
    for t in 0..steps {
        if work.a.get(t, t).is_negative() {
            work.negate_row(t);
        }
    }
    // divisibility chain d_i | d_{i+1}
    loop {
        let mut fixed = true;
        for t in 0..steps.saturating_sub(1) {
            let x = work.a.get(t, t).clone();
            let y = work.a.get(t + 1, t + 1).clone();
            if x.is_zero() || y.is_zero() || (&y % &x).is_zero() {
                continue;
            }
            // fold the pair into a 2x2 block and re-eliminate; the pivot
            // search stays inside the block so entries beyond t+1 are
            // untouched
            work.add_col(t, t + 1, &BigInt::one());
            let pivot = [(t, t), (t + 1, t), (t + 1, t + 1)]
                .into_iter()
                .filter(|&(i, j)| !work.a.get(i, j).is_zero())
                .min_by_key(|&(i, j)| work.a.get(i, j).abs());
            let (pi, pj) = pivot.expect("block cannot vanish");
            work.swap_rows(t, pi);
            work.swap_cols(t, pj);
            work.eliminate(t);
            if work.a.get(t, t).is_negative() {
                work.negate_row(t);
            }
            if work.a.get(t + 1, t + 1).is_negative() {
                work.negate_row(t + 1);
            }
            fixed = false;
        }
        if fixed {
            break;
        }
    }
    SmithNormalForm {
        d: work.a,
        u: work.u,
        v: work.v,
    }
}

/// Exact inverse of a unimodular matrix, via its Smith decomposition:
/// `u * m * v = I` gives `m^-1 = v * u`.
pub fn invert_unimodular(m: &IntMatrix) -> Result<IntMatrix> {
    if !m.is_square() {
        return Err(Error::NotSquare {
            rows: m.rows(),
            cols: m.cols(),
        });
    }
    let snf = smith_normal_form(m);
    if !snf.d.is_identity() {
        return Err(Error::Dimension("matrix is not unimodular".into()));
    }
    snf.v.mul(&snf.u)
}

/// Row-style Hermite normal form of the lattice spanned by `generators`.
///
/// Returns a canonical basis: echelon rows with positive pivots and the
/// entries above each pivot reduced into `[0, pivot)`. Zero rows are
/// dropped, so the result has one row per lattice rank.
pub fn hermite_basis(generators: &[Vec<BigInt>]) -> Vec<Vec<BigInt>> {
    if generators.is_empty() {
        return Vec::new();
    }
    let cols = generators[0].len();
    let mut rows: Vec<Vec<BigInt>> = generators.to_vec();
    let mut pivot_row = 0usize;
    for col in 0..cols {
        // Euclid on the entries of this column at / below pivot_row
        loop {
            let mut best: Option<usize> = None;
            for (i, row) in rows.iter().enumerate().skip(pivot_row) {
                if row[col].is_zero() {
                    continue;
                }
                match best {
                    None => best = Some(i),
                    Some(b) => {
                        if row[col].abs() < rows[b][col].abs() {
                            best = Some(i);
                        }
                    }
                }
            }
            let Some(b) = best else {
                break;
            };
            rows.swap(pivot_row, b);
            let mut any_left = false;
            for i in (pivot_row + 1)..rows.len() {
                if rows[i][col].is_zero() {
                    continue;
                }
                let q = (&rows[i][col]).div_floor(&rows[pivot_row][col]);
                for c in 0..cols {
                    let x = &rows[i][c] - &q * &rows[pivot_row][c];
                    rows[i][c] = x;
                }
                if !rows[i][col].is_zero() {
                    any_left = true;
                }
            }
            if !any_left {
                break;
            }
        }
        if pivot_row < rows.len() && !rows[pivot_row][col].is_zero() {
            if rows[pivot_row][col].is_negative() {
                for c in 0..cols {
                    rows[pivot_row][c] = -rows[pivot_row][c].clone();
                }
            }
            // reduce entries above the pivot
            for i in 0..pivot_row {
                let q = (&rows[i][col]).div_floor(&rows[pivot_row][col]);
                if q.is_zero() {
                    continue;
                }
                for c in 0..cols {
                    let x = &rows[i][c] - &q * &rows[pivot_row][c];
                    rows[i][c] = x;
                }
            }
            pivot_row += 1;
        }
    }
    rows.truncate(pivot_row);
    rows
}

/// Whether `v` lies in the lattice spanned by a Hermite basis.
pub fn lattice_contains(basis: &[Vec<BigInt>], v: &[BigInt]) -> bool {
    let mut v = v.to_vec();
    for row in basis {
        let col = match row.iter().position(|x| !x.is_zero()) {
            Some(c) => c,
            None => continue,
        };
        if !v[col].is_zero() {
            let (q, r) = (&v[col]).div_rem(&row[col]);
            if !r.is_zero() {
                return false;
            }
            for c in 0..v.len() {
                let x = &v[c] - &q * &row[c];
                v[c] = x;
            }
        }
    }
    v.iter().all(|x| x.is_zero())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(rows: &[Vec<i64>]) -> IntMatrix {
        IntMatrix::from_rows(rows)
    }

    fn check_snf(a: &IntMatrix) -> SmithNormalForm {
        let snf = smith_normal_form(a);
        // u * a * v = d, re-multiplied exactly
        let prod = snf.u.mul(a).unwrap().mul(&snf.v).unwrap();
        assert_eq!(prod, snf.d);
        // unimodular transforms
        assert_eq!(snf.u.determinant().unwrap().abs(), BigInt::one());
        assert_eq!(snf.v.determinant().unwrap().abs(), BigInt::one());
        // diagonal, nonnegative, divisibility chain
        for i in 0..snf.d.rows() {
            for j in 0..snf.d.cols() {
                if i != j {
                    assert!(snf.d.get(i, j).is_zero());
                }
            }
        }
        let diag = snf.diagonal();
        for w in diag.windows(2) {
            assert!(!w[0].is_negative());
            if !w[0].is_zero() {
                assert!((&w[1] % &w[0]).is_zero());
            } else {
                assert!(w[1].is_zero());
            }
        }
        snf
    }

    #[test]
    fn snf_identity() {
        let snf = check_snf(&IntMatrix::identity(3));
        assert_eq!(snf.d, IntMatrix::identity(3));
    }

    #[test]
    fn snf_diag_1_2() {
        let snf = check_snf(&m(&[vec![1, 0], vec![0, 2]]));
        assert_eq!(snf.diagonal(), vec![BigInt::from(1), BigInt::from(2)]);
    }

    #[test]
    fn snf_2_4_6_8() {
        let snf = check_snf(&m(&[vec![2, 4], vec![6, 8]]));
        assert_eq!(snf.diagonal(), vec![BigInt::from(2), BigInt::from(4)]);
    }

    #[test]
    fn snf_rectangular_and_zero() {
        let snf = check_snf(&m(&[vec![0, 0], vec![0, 0], vec![0, 0]]));
        assert!(snf.diagonal().iter().all(|d| d.is_zero()));
        check_snf(&m(&[vec![2, 6, 4], vec![4, 8, 10]]));
    }

    #[test]
    fn determinant_matches_diagonal_product() {
        let a = m(&[vec![-20, -7, -27], vec![17, 8, 14], vec![13, 8, 10]]);
        let det = a.determinant().unwrap();
        let snf = check_snf(&a);
        let prod: BigInt = snf.diagonal().iter().product();
        assert_eq!(det.abs(), prod.abs());
    }

    #[test]
    fn determinant_examples() {
        assert_eq!(
            m(&[vec![2, 4], vec![6, 8]]).determinant().unwrap(),
            BigInt::from(-8)
        );
        assert_eq!(
            m(&[vec![1, 2], vec![2, 4]]).determinant().unwrap(),
            BigInt::zero()
        );
        assert_eq!(IntMatrix::identity(4).determinant().unwrap(), BigInt::one());
        assert!(m(&[vec![1, 2]]).determinant().is_err());
    }

    #[test]
    fn invert_unimodular_round_trips() {
        let u = m(&[vec![1, 2, 0], vec![0, 1, 3], vec![0, 0, -1]]);
        let inv = invert_unimodular(&u).unwrap();
        assert!(u.mul(&inv).unwrap().is_identity());
        assert!(inv.mul(&u).unwrap().is_identity());
        assert!(invert_unimodular(&m(&[vec![2, 0], vec![0, 1]])).is_err());
    }

    #[test]
    fn hermite_basis_canonical() {
        let gens = vec![
            vec![BigInt::from(2), BigInt::from(0)],
            vec![BigInt::from(0), BigInt::from(3)],
            vec![BigInt::from(2), BigInt::from(3)],
        ];
        let basis = hermite_basis(&gens);
        assert_eq!(basis.len(), 2);
        assert!(lattice_contains(&basis, &[BigInt::from(4), BigInt::from(3)]));
        assert!(!lattice_contains(&basis, &[BigInt::from(1), BigInt::from(0)]));
    }

    #[test]
    fn hermite_of_permuted_generators_is_equal() {
        let a = vec![
            vec![BigInt::from(3), BigInt::from(1), BigInt::from(-2)],
            vec![BigInt::from(1), BigInt::from(4), BigInt::from(5)],
        ];
        let mut b = a.clone();
        b.reverse();
        b.push(a[0].iter().zip(&a[1]).map(|(x, y)| x + y).collect());
        assert_eq!(hermite_basis(&a), hermite_basis(&b));
    }

    #[test]
    fn mul_and_vector() {
        let a = m(&[vec![1, 2], vec![3, 4]]);
        let b = m(&[vec![0, 1], vec![1, 0]]);
        assert_eq!(a.mul(&b).unwrap(), m(&[vec![2, 1], vec![4, 3]]));
        let v = vec![BigInt::from(1), BigInt::from(-1)];
        assert_eq!(
            a.mul_vector(&v).unwrap(),
            vec![BigInt::from(-1), BigInt::from(-1)]
        );
    }
}
