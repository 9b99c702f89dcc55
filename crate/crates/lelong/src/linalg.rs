//! Dense exact matrices over Q(i).
//!
//! Everything here is deterministic: pivoting always picks the first
//! nonzero entry, so reduced forms, ranks and nullspace bases are
//! canonical for a given input. Matrices are tiny (interpolation
//! systems on plane curves top out in the tens of columns), so clarity
//! wins over asymptotics.

use crate::field::GaussianRational;

/// Row-major dense matrix over Q(i).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<GaussianRational>,
}

impl Matrix {
    pub fn zero(rows: usize, cols: usize) -> Matrix {
        Matrix { rows, cols, data: vec![GaussianRational::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Matrix {
        let mut m = Matrix::zero(n, n);
        for i in 0..n {
            *m.at_mut(i, i) = GaussianRational::one();
        }
        m
    }

    /// Builds a matrix from rows, which must all have the same length.
    pub fn from_rows(rows: Vec<Vec<GaussianRational>>) -> Matrix {
        let height = rows.len();
        let width = rows.first().map_or(0, Vec::len);
        assert!(rows.iter().all(|r| r.len() == width), "ragged rows");
        Matrix { rows: height, cols: width, data: rows.into_iter().flatten().collect() }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn at(&self, r: usize, c: usize) -> &GaussianRational {
        &self.data[r * self.cols + c]
    }

    pub fn at_mut(&mut self, r: usize, c: usize) -> &mut GaussianRational {
        &mut self.data[r * self.cols + c]
    }

    pub fn row(&self, r: usize) -> &[GaussianRational] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn transpose(&self) -> Matrix {
        let mut t = Matrix::zero(self.cols, self.rows);
        for r in 0..self.rows {
            for c in 0..self.cols {
                *t.at_mut(c, r) = self.at(r, c).clone();
            }
        }
        t
    }

    pub fn mul_vec(&self, v: &[GaussianRational]) -> Vec<GaussianRational> {
        assert_eq!(v.len(), self.cols, "vector length mismatch");
        (0..self.rows)
            .map(|r| {
                let mut acc = GaussianRational::zero();
                for (c, entry) in v.iter().enumerate() {
                    acc = acc + self.at(r, c) * entry;
                }
                acc
            })
            .collect()
    }

    /// Reduces in place to reduced row echelon form and returns the
    /// pivot columns in order. Pivoting picks the first row with a
    /// nonzero entry, so the result is canonical.
    pub fn row_reduce(&mut self) -> Vec<usize> {
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..self.cols {
            if r == self.rows {
                break;
            }
            let Some(pr) = (r..self.rows).find(|&i| !self.at(i, c).is_zero()) else {
                continue;
            };
            self.swap_rows(r, pr);
            let inv = self.at(r, c).inv().expect("pivot is nonzero");
            for j in c..self.cols {
                let v = self.at(r, j) * &inv;
                *self.at_mut(r, j) = v;
            }
            for i in 0..self.rows {
                if i == r || self.at(i, c).is_zero() {
                    continue;
                }
                let f = self.at(i, c).clone();
                for j in c..self.cols {
                    let v = self.at(i, j) - &f * self.at(r, j);
                    *self.at_mut(i, j) = v;
                }
            }
            pivots.push(c);
            r += 1;
        }
        pivots
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for c in 0..self.cols {
            self.data.swap(a * self.cols + c, b * self.cols + c);
        }
    }

    pub fn rank(&self) -> usize {
        self.clone().row_reduce().len()
    }

    /// Canonical basis of the right nullspace: one vector per free
    /// column, carrying 1 in that column.
    pub fn nullspace(&self) -> Vec<Vec<GaussianRational>> {
        let mut m = self.clone();
        let pivots = m.row_reduce();
        let mut basis = Vec::new();
        for free in 0..self.cols {
            if pivots.contains(&free) {
                continue;
            }
            let mut v = vec![GaussianRational::zero(); self.cols];
            v[free] = GaussianRational::one();
            for (i, &p) in pivots.iter().enumerate() {
                v[p] = -m.at(i, free);
            }
            basis.push(v);
        }
        basis
    }

    /// Determinant by fraction-producing Gaussian elimination. Panics
    /// on a non-square matrix.
    pub fn det(&self) -> GaussianRational {
        assert_eq!(self.rows, self.cols, "determinant of a non-square matrix");
        let n = self.rows;
        let mut m = self.clone();
        let mut det = GaussianRational::one();
        for c in 0..n {
            let Some(pr) = (c..n).find(|&i| !m.at(i, c).is_zero()) else {
                return GaussianRational::zero();
            };
            if pr != c {
                m.swap_rows(c, pr);
                det = -det;
            }
            det = det * m.at(c, c);
            let inv = m.at(c, c).inv().expect("pivot is nonzero");
            for i in c + 1..n {
                if m.at(i, c).is_zero() {
                    continue;
                }
                let f = m.at(i, c) * &inv;
                for j in c..n {
                    let v = m.at(i, j) - &f * m.at(c, j);
                    *m.at_mut(i, j) = v;
                }
            }
        }
        det
    }

    /// Inverse, if the matrix is square and nonsingular.
    pub fn inverse(&self) -> Option<Matrix> {
        if self.rows != self.cols {
            return None;
        }
        let n = self.rows;
        let mut aug = Matrix::zero(n, 2 * n);
        for r in 0..n {
            for c in 0..n {
                *aug.at_mut(r, c) = self.at(r, c).clone();
            }
            *aug.at_mut(r, n + r) = GaussianRational::one();
        }
        let pivots = aug.row_reduce();
        if pivots != (0..n).collect::<Vec<_>>() {
            return None;
        }
        let mut inv = Matrix::zero(n, n);
        for r in 0..n {
            for c in 0..n {
                *inv.at_mut(r, c) = aug.at(r, n + c).clone();
            }
        }
        Some(inv)
    }

    /// One solution of `A x = b` (free variables set to zero), or
    /// `None` if the system is inconsistent.
    pub fn solve(&self, b: &[GaussianRational]) -> Option<Vec<GaussianRational>> {
        assert_eq!(b.len(), self.rows, "right-hand side length mismatch");
        let mut aug = Matrix::zero(self.rows, self.cols + 1);
        for (r, rhs) in b.iter().enumerate() {
            for c in 0..self.cols {
                *aug.at_mut(r, c) = self.at(r, c).clone();
            }
            *aug.at_mut(r, self.cols) = rhs.clone();
        }
        let pivots = aug.row_reduce();
        if pivots.contains(&self.cols) {
            return None;
        }
        let mut x = vec![GaussianRational::zero(); self.cols];
        for (i, &p) in pivots.iter().enumerate() {
            x[p] = aug.at(i, self.cols).clone();
        }
        Some(x)
    }
}

impl std::ops::Mul for &Matrix {
    type Output = Matrix;

    fn mul(self, rhs: &Matrix) -> Matrix {
        assert_eq!(self.cols, rhs.rows, "matrix product dimension mismatch");
        let mut out = Matrix::zero(self.rows, rhs.cols);
        for r in 0..self.rows {
            for c in 0..rhs.cols {
                let mut acc = GaussianRational::zero();
                for k in 0..self.cols {
                    acc = acc + self.at(r, k) * rhs.at(k, c);
                }
                *out.at_mut(r, c) = acc;
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::rat;
    use rand::Rng;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn gi(n: i64) -> GaussianRational {
        GaussianRational::from_int(n)
    }

    fn mat(rows: &[&[i64]]) -> Matrix {
        Matrix::from_rows(rows.iter().map(|r| r.iter().map(|&n| gi(n)).collect()).collect())
    }

    fn random_matrix(rng: &mut ChaCha8Rng, rows: usize, cols: usize) -> Matrix {
        Matrix::from_rows(
            (0..rows)
                .map(|_| {
                    (0..cols)
                        .map(|_| {
                            GaussianRational::new(
                                rat(rng.random_range(-5..=5), 1),
                                rat(rng.random_range(-2..=2), 1),
                            )
                        })
                        .collect()
                })
                .collect(),
        )
    }

    /// Independent determinant: cofactor expansion along the first row.
    fn det_cofactor(m: &Matrix) -> GaussianRational {
        let n = m.rows();
        if n == 0 {
            return GaussianRational::one();
        }
        if n == 1 {
            return m.at(0, 0).clone();
        }
        let mut acc = GaussianRational::zero();
        for c in 0..n {
            if m.at(0, c).is_zero() {
                continue;
            }
            let minor = Matrix::from_rows(
                (1..n)
                    .map(|r| (0..n).filter(|&j| j != c).map(|j| m.at(r, j).clone()).collect())
                    .collect(),
            );
            let term = m.at(0, c) * &det_cofactor(&minor);
            acc = if c % 2 == 0 { acc + term } else { acc - term };
        }
        acc
    }

    #[test]
    fn rank_and_rref_of_known_matrices() {
        let mut m = mat(&[&[1, 2, 3], &[2, 4, 6], &[1, 1, 1]]);
        let pivots = m.row_reduce();
        assert_eq!(pivots, vec![0, 1]);
        assert_eq!(m, mat(&[&[1, 0, -1], &[0, 1, 2], &[0, 0, 0]]));
        assert_eq!(Matrix::identity(4).rank(), 4);
        assert_eq!(Matrix::zero(3, 5).rank(), 0);
        assert_eq!(mat(&[&[0, 1], &[1, 0]]).rank(), 2);
    }

    #[test]
    fn row_reduce_is_idempotent() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        for _ in 0..50 {
            let mut m = random_matrix(&mut rng, 4, 6);
            m.row_reduce();
            let again = {
                let mut c = m.clone();
                c.row_reduce();
                c
            };
            assert_eq!(m, again);
        }
    }

    #[test]
    fn nullspace_vectors_are_killed_and_count_matches_rank() {
        let mut rng = ChaCha8Rng::seed_from_u64(22);
        for _ in 0..100 {
            let rows = rng.random_range(1..=5);
            let cols = rng.random_range(1..=6);
            let m = random_matrix(&mut rng, rows, cols);
            let ns = m.nullspace();
            assert_eq!(m.rank() + ns.len(), cols);
            for v in &ns {
                assert!(m.mul_vec(v).iter().all(GaussianRational::is_zero));
            }
        }
    }

    #[test]
    fn determinant_matches_cofactor_expansion() {
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        for n in 1..=4 {
            for _ in 0..40 {
                let m = random_matrix(&mut rng, n, n);
                assert_eq!(m.det(), det_cofactor(&m));
            }
        }
    }

    #[test]
    fn determinant_is_multiplicative() {
        let mut rng = ChaCha8Rng::seed_from_u64(24);
        for _ in 0..40 {
            let a = random_matrix(&mut rng, 3, 3);
            let b = random_matrix(&mut rng, 3, 3);
            assert_eq!((&a * &b).det(), a.det() * b.det());
        }
    }

    #[test]
    fn inverse_multiplies_to_identity() {
        let mut rng = ChaCha8Rng::seed_from_u64(25);
        let mut seen_invertible = 0;
        for _ in 0..60 {
            let a = random_matrix(&mut rng, 3, 3);
            match a.inverse() {
                Some(inv) => {
                    seen_invertible += 1;
                    assert_eq!(&a * &inv, Matrix::identity(3));
                    assert_eq!(&inv * &a, Matrix::identity(3));
                }
                None => assert!(a.det().is_zero()),
            }
        }
        assert!(seen_invertible > 30);
    }

    #[test]
    fn solve_finds_solutions_and_detects_inconsistency() {
        let a = mat(&[&[1, 1], &[1, -1]]);
        let x = a.solve(&[gi(3), gi(1)]).unwrap();
        assert_eq!(x, vec![gi(2), gi(1)]);
        // Inconsistent: second equation contradicts twice the first.
        let b = mat(&[&[1, 1], &[2, 2]]);
        assert!(b.solve(&[gi(1), gi(3)]).is_none());
        assert!(b.solve(&[gi(1), gi(2)]).is_some());
        // Underdetermined systems still produce one valid solution.
        let c = mat(&[&[1, 2, 3]]);
        let x = c.solve(&[gi(6)]).unwrap();
        assert_eq!(c.mul_vec(&x), vec![gi(6)]);
    }
}
