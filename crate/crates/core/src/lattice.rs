//! Exact integer and rational linear algebra.
//!
//! Everything here works over arbitrary-precision integers. Ranks are taken
//! over the rationals with fraction-free (Bareiss) elimination, and lattice
//! quotients go through the Smith normal form.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LatticeError {
    #[error("cokernel has torsion (invariant factors {0:?})")]
    TorsionPresent(Vec<BigInt>),
    #[error("expected {expected} entries for a {rows}x{cols} matrix, got {got}")]
    Shape {
        rows: usize,
        cols: usize,
        expected: usize,
        got: usize,
    },
}

/// Dense integer matrix stored row-major.
#[derive(Clone, PartialEq, Eq)]
pub struct IntMatrix {
    rows: usize,
    cols: usize,
    data: Vec<BigInt>,
}

impl IntMatrix {
    pub fn new(rows: usize, cols: usize, data: Vec<BigInt>) -> Result<Self, LatticeError> {
        if data.len() != rows * cols {
            return Err(LatticeError::Shape {
                rows,
                cols,
                expected: rows * cols,
                got: data.len(),
            });
        }
        Ok(Self { rows, cols, data })
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![BigInt::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = BigInt::one();
        }
        m
    }

    /// Builds a matrix from machine-integer rows. All rows must have equal length.
    pub fn from_rows<R: AsRef<[i64]>>(rows: &[R]) -> Self {
        let cols = rows.first().map_or(0, |r| r.as_ref().len());
        let mut data = Vec::with_capacity(rows.len() * cols);
        for r in rows {
            let r = r.as_ref();
            assert_eq!(r.len(), cols, "ragged rows");
            data.extend(r.iter().map(|&x| BigInt::from(x)));
        }
        Self {
            rows: rows.len(),
            cols,
            data,
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, r: usize, c: usize) -> &BigInt {
        &self.data[r * self.cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, v: BigInt) {
        self.data[r * self.cols + c] = v;
    }

    pub fn row(&self, r: usize) -> &[BigInt] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for r in 0..self.rows {
            for c in 0..self.cols {
                t.set(c, r, self.get(r, c).clone());
            }
        }
        t
    }

    pub fn mul(&self, other: &IntMatrix) -> IntMatrix {
        assert_eq!(self.cols, other.rows, "dimension mismatch");
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let v = out.get(i, j) + a * other.get(k, j);
                    out.set(i, j, v);
                }
            }
        }
        out
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Zero::is_zero)
    }

    fn to_rows(&self) -> Vec<Vec<BigInt>> {
        (0..self.rows).map(|r| self.row(r).to_vec()).collect()
    }

    /// Entries as `i64`, if they all fit.
    pub fn to_i64_rows(&self) -> Option<Vec<Vec<i64>>> {
        use num_traits::ToPrimitive;
        (0..self.rows)
            .map(|r| self.row(r).iter().map(ToPrimitive::to_i64).collect())
            .collect()
    }
}

impl fmt::Debug for IntMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "IntMatrix{:?}", self.to_rows())
    }
}

/// Rank over the rationals, by fraction-free elimination.
pub fn rational_rank(m: &IntMatrix) -> usize {
    let mut a = m.to_rows();
    let (rows, cols) = (m.rows, m.cols);
    let mut rank = 0;
    let mut prev = BigInt::one();
    for col in 0..cols {
        if rank == rows {
            break;
        }
        let Some(p) = (rank..rows).find(|&r| !a[r][col].is_zero()) else {
            continue;
        };
        a.swap(p, rank);
        for r in rank + 1..rows {
            for c in col + 1..cols {
                let v = &a[rank][col] * &a[r][c] - &a[r][col] * &a[rank][c];
                a[r][c] = v / &prev;
            }
            a[r][col] = BigInt::zero();
        }
        prev = a[rank][col].clone();
        rank += 1;
    }
    rank
}

/// Determinant of a square matrix (Bareiss).
pub fn determinant(m: &IntMatrix) -> BigInt {
    assert_eq!(m.rows, m.cols, "determinant of a non-square matrix");
    let n = m.rows;
    if n == 0 {
        return BigInt::one();
    }
    let mut a = m.to_rows();
    let mut sign = BigInt::one();
    let mut prev = BigInt::one();
    for k in 0..n {
        let Some(p) = (k..n).find(|&r| !a[r][k].is_zero()) else {
            return BigInt::zero();
        };
        if p != k {
            a.swap(p, k);
            sign = -sign;
        }
        for r in k + 1..n {
            for c in k + 1..n {
                let v = &a[k][k] * &a[r][c] - &a[r][k] * &a[k][c];
                a[r][c] = v / &prev;
            }
            a[r][k] = BigInt::zero();
        }
        prev = a[k][k].clone();
    }
    sign * &a[n - 1][n - 1]
}

/// Solves `m x = b` over the rationals for an invertible square `m`.
/// Returns `None` when `m` is singular.
pub fn solve_rational(m: &IntMatrix, b: &[BigInt]) -> Option<Vec<BigRational>> {
    assert_eq!(m.rows, m.cols);
    assert_eq!(b.len(), m.rows);
    let n = m.rows;
    let mut a: Vec<Vec<BigRational>> = (0..n)
        .map(|r| {
            let mut row: Vec<BigRational> = m
                .row(r)
                .iter()
                .map(|x| BigRational::from_integer(x.clone()))
                .collect();
            row.push(BigRational::from_integer(b[r].clone()));
            row
        })
        .collect();
    for k in 0..n {
        let p = (k..n).find(|&r| !a[r][k].is_zero())?;
        a.swap(p, k);
        let piv = a[k][k].clone();
        for c in k..=n {
            a[k][c] = &a[k][c] / &piv;
        }
        for r in 0..n {
            if r == k || a[r][k].is_zero() {
                continue;
            }
            let f = a[r][k].clone();
            for c in k..=n {
                let v = &a[r][c] - &f * &a[k][c];
                a[r][c] = v;
            }
        }
    }
    Some(a.into_iter().map(|row| row[n].clone()).collect())
}

/// Smith normal form `left * m * right = diag`.
#[derive(Debug, Clone)]
pub struct SmithForm {
    /// Nonzero invariant factors, each dividing the next, all positive.
    pub invariants: Vec<BigInt>,
    pub left: IntMatrix,
    pub right: IntMatrix,
}

impl SmithForm {
    pub fn rank(&self) -> usize {
        self.invariants.len()
    }
}

pub fn smith_normal_form(m: &IntMatrix) -> SmithForm {
    let (rows, cols) = (m.rows, m.cols);
    let mut a = m.to_rows();
    let mut u = IntMatrix::identity(rows).to_rows();
    let mut v = IntMatrix::identity(cols).to_rows();

    fn row_axpy(a: &mut [Vec<BigInt>], dst: usize, src: usize, q: &BigInt) {
        // row_dst -= q * row_src
        let (s, d) = if src < dst {
            let (lo, hi) = a.split_at_mut(dst);
            (&lo[src], &mut hi[0])
        } else {
            let (lo, hi) = a.split_at_mut(src);
            (&hi[0], &mut lo[dst])
        };
        for (x, y) in d.iter_mut().zip(s.iter()) {
            *x -= q * y;
        }
    }
    fn col_axpy(a: &mut [Vec<BigInt>], dst: usize, src: usize, q: &BigInt) {
        for row in a.iter_mut() {
            let s = row[src].clone();
            row[dst] -= q * s;
        }
    }
    fn col_swap(a: &mut [Vec<BigInt>], i: usize, j: usize) {
        for row in a.iter_mut() {
            row.swap(i, j);
        }
    }

    let mut t = 0;
    let mut invariants = Vec::new();
    while t < rows.min(cols) {
        // smallest nonzero entry of the trailing block
        let mut best: Option<(usize, usize)> = None;
        for i in t..rows {
            for j in t..cols {
                if !a[i][j].is_zero() && best.is_none_or(|(bi, bj)| a[i][j].abs() < a[bi][bj].abs())
                {
                    best = Some((i, j));
                }
            }
        }
        let Some((pi, pj)) = best else { break };
        a.swap(t, pi);
        u.swap(t, pi);
        col_swap(&mut a, t, pj);
        col_swap(&mut v, t, pj);

        loop {
            let mut dirty = false;
            for i in t + 1..rows {
                if a[i][t].is_zero() {
                    continue;
                }
                let q = a[i][t].div_floor(&a[t][t]);
                row_axpy(&mut a, i, t, &q);
                row_axpy(&mut u, i, t, &q);
                if !a[i][t].is_zero() {
                    dirty = true;
                }
            }
            for j in t + 1..cols {
                if a[t][j].is_zero() {
                    continue;
                }
                let q = a[t][j].div_floor(&a[t][t]);
                col_axpy(&mut a, j, t, &q);
                col_axpy(&mut v, j, t, &q);
                if !a[t][j].is_zero() {
                    dirty = true;
                }
            }
            if dirty {
                // move the smallest remainder in row/column t onto the pivot
                let mut best = (t, t);
                for i in t + 1..rows {
                    if !a[i][t].is_zero() && a[i][t].abs() < a[best.0][best.1].abs() {
                        best = (i, t);
                    }
                }
                for j in t + 1..cols {
                    if !a[t][j].is_zero() && a[t][j].abs() < a[best.0][best.1].abs() {
                        best = (t, j);
                    }
                }
                if best.0 != t {
                    a.swap(t, best.0);
                    u.swap(t, best.0);
                } else if best.1 != t {
                    col_swap(&mut a, t, best.1);
                    col_swap(&mut v, t, best.1);
                }
                continue;
            }
            // divisibility of the trailing block by the pivot
            let bad =
                (t + 1..rows).find(|&i| (t + 1..cols).any(|j| !a[i][j].is_multiple_of(&a[t][t])));
            match bad {
                Some(i) => {
                    let minus_one = -BigInt::one();
                    row_axpy(&mut a, t, i, &minus_one);
                    row_axpy(&mut u, t, i, &minus_one);
                }
                None => break,
            }
        }
        if a[t][t].is_negative() {
            for x in a[t].iter_mut() {
                *x = -x.clone();
            }
            for x in u[t].iter_mut() {
                *x = -x.clone();
            }
        }
        invariants.push(a[t][t].clone());
        t += 1;
    }

    let flatten = |rows: Vec<Vec<BigInt>>, r: usize, c: usize| IntMatrix {
        rows: r,
        cols: c,
        data: rows.into_iter().flatten().collect(),
    };
    SmithForm {
        invariants,
        left: flatten(u, rows, rows),
        right: flatten(v, cols, cols),
    }
}

/// Free quotient `Z^cols / image(m^T)` together with a projection onto it.
#[derive(Debug, Clone)]
pub struct Cokernel {
    pub free_rank: usize,
    /// `free_rank x cols` matrix; its kernel is exactly the image of `m^T`.
    pub projection: IntMatrix,
}

/// Cokernel of the transpose action of `m` (rows = lattice dimension,
/// columns = generators). For a ray matrix this is the Picard group.
pub fn cokernel_basis(m: &IntMatrix) -> Result<Cokernel, LatticeError> {
    let snf = smith_normal_form(&m.transpose());
    let torsion: Vec<BigInt> = snf
        .invariants
        .iter()
        .filter(|d| !d.is_one())
        .cloned()
        .collect();
    if !torsion.is_empty() {
        return Err(LatticeError::TorsionPresent(torsion));
    }
    let n = m.cols;
    let r = snf.rank();
    let mut projection = IntMatrix::zeros(n - r, n);
    for i in r..n {
        for j in 0..n {
            projection.set(i - r, j, snf.left.get(i, j).clone());
        }
    }
    Ok(Cokernel {
        free_rank: n - r,
        projection,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn rank_over_q(rows: &[Vec<i64>]) -> usize {
        // independent oracle: plain Gaussian elimination over BigRational
        let mut a: Vec<Vec<BigRational>> = rows
            .iter()
            .map(|r| {
                r.iter()
                    .map(|&x| BigRational::from_integer(x.into()))
                    .collect()
            })
            .collect();
        let cols = rows.first().map_or(0, Vec::len);
        let mut rank = 0;
        for c in 0..cols {
            let Some(p) = (rank..a.len()).find(|&r| !a[r][c].is_zero()) else {
                continue;
            };
            a.swap(p, rank);
            for r in 0..a.len() {
                if r != rank && !a[r][c].is_zero() {
                    let f = &a[r][c] / &a[rank][c];
                    for k in 0..cols {
                        let v = &a[r][k] - &f * &a[rank][k];
                        a[r][k] = v;
                    }
                }
            }
            rank += 1;
        }
        rank
    }

    #[test]
    fn rank_examples() {
        assert_eq!(rational_rank(&IntMatrix::identity(2)), 2);
        assert_eq!(rational_rank(&IntMatrix::zeros(3, 3)), 0);
        assert_eq!(
            rational_rank(&IntMatrix::from_rows(&[[1, 2], [2, 4], [3, 6]])),
            1
        );
    }

    #[test]
    fn determinant_examples() {
        let m = IntMatrix::from_rows(&[[2, 1, 0], [1, 3, 1], [0, 1, 4]]);
        assert_eq!(determinant(&m), BigInt::from(18));
        let m = IntMatrix::from_rows(&[[0, 1], [1, 0]]);
        assert_eq!(determinant(&m), BigInt::from(-1));
    }

    #[test]
    fn cokernel_of_projective_line() {
        let m = IntMatrix::from_rows(&[[1, -1]]);
        let ck = cokernel_basis(&m).unwrap();
        assert_eq!(ck.free_rank, 1);
        assert!(ck.projection.mul(&m.transpose()).is_zero());
    }

    #[test]
    fn cokernel_of_p1_times_p1() {
        let m = IntMatrix::from_rows(&[[1, -1, 0, 0], [0, 0, 1, -1]]);
        let ck = cokernel_basis(&m).unwrap();
        assert_eq!(ck.free_rank, 2);
    }

    #[test]
    fn torsion_is_reported() {
        // rays (2,0),(0,1) and their negatives: Z^4 / <(2,-2,0,0),(0,0,1,-1)>
        let m = IntMatrix::from_rows(&[[2, -2, 0, 0], [0, 0, 1, -1]]);
        match cokernel_basis(&m) {
            Err(LatticeError::TorsionPresent(t)) => assert_eq!(t, vec![BigInt::from(2)]),
            other => panic!("expected torsion, got {other:?}"),
        }
    }

    #[test]
    fn solve_small_system() {
        let m = IntMatrix::from_rows(&[[2, 1], [1, 3]]);
        let x = solve_rational(&m, &[BigInt::from(3), BigInt::from(5)]).unwrap();
        assert_eq!(x[0], BigRational::new(4.into(), 5.into()));
        assert_eq!(x[1], BigRational::new(7.into(), 5.into()));
        assert!(solve_rational(
            &IntMatrix::from_rows(&[[1, 2], [2, 4]]),
            &[1.into(), 1.into()]
        )
        .is_none());
    }

    fn small_matrix() -> impl Strategy<Value = Vec<Vec<i64>>> {
        (1usize..6, 1usize..6).prop_flat_map(|(r, c)| {
            proptest::collection::vec(proptest::collection::vec(-4i64..=4, c), r)
        })
    }

    proptest! {
        #[test]
        fn rank_matches_rational_elimination(rows in small_matrix()) {
            let m = IntMatrix::from_rows(&rows);
            prop_assert_eq!(rational_rank(&m), rank_over_q(&rows));
        }

        #[test]
        fn rank_is_transpose_invariant(rows in small_matrix()) {
            let m = IntMatrix::from_rows(&rows);
            prop_assert_eq!(rational_rank(&m), rational_rank(&m.transpose()));
        }

        #[test]
        fn smith_form_reconstructs(rows in small_matrix()) {
            let m = IntMatrix::from_rows(&rows);
            let snf = smith_normal_form(&m);
            let d = snf.left.mul(&m).mul(&snf.right);
            for i in 0..d.rows() {
                for j in 0..d.cols() {
                    let expected = if i == j && i < snf.rank() {
                        snf.invariants[i].clone()
                    } else {
                        BigInt::zero()
                    };
                    prop_assert_eq!(d.get(i, j), &expected);
                }
            }
            for w in snf.invariants.windows(2) {
                prop_assert!(w[1].is_multiple_of(&w[0]));
            }
            prop_assert_eq!(determinant(&snf.left).abs(), BigInt::one());
            prop_assert_eq!(determinant(&snf.right).abs(), BigInt::one());
            prop_assert_eq!(snf.rank(), rational_rank(&m));
        }

        #[test]
        fn cokernel_free_rank(rows in small_matrix()) {
            let m = IntMatrix::from_rows(&rows);
            if let Ok(ck) = cokernel_basis(&m) {
                prop_assert_eq!(ck.free_rank, m.cols() - rational_rank(&m));
                prop_assert!(ck.projection.mul(&m.transpose()).is_zero());
            }
        }
    }
}
