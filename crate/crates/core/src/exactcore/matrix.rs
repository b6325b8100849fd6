use std::fmt;

use num_traits::Zero;

use super::{Domain, Field, Poly, Rational};

/// Dense row-major matrix over an exact field.
#[derive(Clone, PartialEq)]
pub struct ExactMatrix<F: Field> {
    rows: usize,
    cols: usize,
    data: Vec<F>,
}

impl<F: Field> ExactMatrix<F> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        ExactMatrix {
            rows,
            cols,
            data: vec![F::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, F::one());
        }
        m
    }

    /// Panics if the rows are ragged.
    pub fn from_rows(rows: Vec<Vec<F>>) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        assert!(rows.iter().all(|row| row.len() == c), "ragged matrix rows");
        ExactMatrix {
            rows: r,
            cols: c,
            data: rows.into_iter().flatten().collect(),
        }
    }

    /// Matrix whose columns are the given vectors.
    pub fn from_cols(cols: &[Vec<F>]) -> Self {
        let c = cols.len();
        let r = cols.first().map_or(0, Vec::len);
        let mut m = Self::zeros(r, c);
        for (j, col) in cols.iter().enumerate() {
            assert_eq!(col.len(), r, "ragged matrix columns");
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

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &F {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: F) {
        self.data[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> &[F] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn col(&self, j: usize) -> Vec<F> {
        (0..self.rows).map(|i| self.get(i, j).clone()).collect()
    }

    pub fn to_rows(&self) -> Vec<Vec<F>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn map<G: Field>(&self, f: impl Fn(&F) -> G) -> ExactMatrix<G> {
        ExactMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(f).collect(),
        }
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.set(j, i, self.get(i, j).clone());
            }
        }
        t
    }

    pub fn mul(&self, o: &Self) -> Self {
        assert_eq!(self.cols, o.rows, "matrix shape mismatch");
        let mut out = Self::zeros(self.rows, o.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..o.cols {
                    let b = o.get(k, j);
                    if b.is_zero() {
                        continue;
                    }
                    let idx = i * out.cols + j;
                    out.data[idx] = out.data[idx].clone() + a.clone() * b.clone();
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &[F]) -> Vec<F> {
        assert_eq!(self.cols, v.len(), "matrix-vector shape mismatch");
        (0..self.rows)
            .map(|i| {
                self.row(i)
                    .iter()
                    .zip(v)
                    .filter(|(a, b)| !a.is_zero() && !b.is_zero())
                    .fold(F::zero(), |acc, (a, b)| acc + a.clone() * b.clone())
            })
            .collect()
    }

    pub fn add(&self, o: &Self) -> Self {
        assert!(self.rows == o.rows && self.cols == o.cols, "matrix shape mismatch");
        ExactMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&o.data).map(|(a, b)| a.clone() + b.clone()).collect(),
        }
    }

    pub fn sub(&self, o: &Self) -> Self {
        self.add(&o.scale(&-F::one()))
    }

    pub fn scale(&self, c: &F) -> Self {
        self.map(|a| a.clone() * c.clone())
    }

    pub fn pow(&self, k: u32) -> Self {
        (0..k).fold(Self::identity(self.rows), |acc, _| acc.mul(self))
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Zero::is_zero)
    }

    pub fn rank(&self) -> usize {
        bareiss_rank(&self.to_rows())
    }

    /// Exact solution of `self·x = v`, or `None` when `self` is singular.
    pub fn solve_linear(&self, v: &[F]) -> Option<Vec<F>> {
        assert!(self.is_square(), "solve_linear needs a square matrix");
        assert_eq!(v.len(), self.rows, "right-hand side length mismatch");
        let n = self.rows;
        let mut aug: Vec<Vec<F::Ring>> = (0..n)
            .map(|i| {
                let mut row = self.row(i).to_vec();
                row.push(v[i].clone());
                F::clear_denominators(&row)
            })
            .collect();
        let pivots = bareiss_forward(&mut aug, n);
        if pivots.len() < n {
            return None;
        }
        // The last Bareiss pivot is ±det, so y = det·x lies in the ring and
        // back-substitution divides exactly.
        let det = aug[n - 1][n - 1].clone();
        let mut y: Vec<F::Ring> = vec![F::Ring::zero(); n];
        for i in (0..n).rev() {
            let mut s = det.mul_ref(&aug[i][n]);
            for j in i + 1..n {
                if !aug[i][j].is_zero() {
                    s = s.sub_ref(&aug[i][j].mul_ref(&y[j]));
                }
            }
            y[i] = s.exact_div(&aug[i][i]);
        }
        let d = F::from_ring(det);
        Some(y.into_iter().map(|v| F::from_ring(v) / d.clone()).collect())
    }

    /// Basis of `{x : self·x = 0}` from the reduced row echelon form.
    pub fn nullspace(&self) -> Vec<Vec<F>> {
        let (r, pivots) = self.rref();
        let free: Vec<usize> = (0..self.cols).filter(|c| !pivots.contains(c)).collect();
        free.iter()
            .map(|&f| {
                let mut x = vec![F::zero(); self.cols];
                x[f] = F::one();
                for (row, &pc) in pivots.iter().enumerate() {
                    x[pc] = -r.get(row, f).clone();
                }
                x
            })
            .collect()
    }

    /// Reduced row echelon form and pivot columns.
    pub fn rref(&self) -> (Self, Vec<usize>) {
        let mut m = self.clone();
        let mut pivots = Vec::new();
        let mut row = 0;
        for c in 0..m.cols {
            if row == m.rows {
                break;
            }
            let Some(p) = (row..m.rows).find(|&i| !m.get(i, c).is_zero()) else {
                continue;
            };
            m.swap_rows(row, p);
            let inv = F::one() / m.get(row, c).clone();
            for j in 0..m.cols {
                let v = m.get(row, j).clone() * inv.clone();
                m.set(row, j, v);
            }
            for i in 0..m.rows {
                if i == row || m.get(i, c).is_zero() {
                    continue;
                }
                let f = m.get(i, c).clone();
                for j in 0..m.cols {
                    let v = m.get(i, j).clone() - f.clone() * m.get(row, j).clone();
                    m.set(i, j, v);
                }
            }
            pivots.push(c);
            row += 1;
        }
        (m, pivots)
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a != b {
            for j in 0..self.cols {
                self.data.swap(a * self.cols + j, b * self.cols + j);
            }
        }
    }

    /// Characteristic polynomial `det(λ − M)` by Faddeev–LeVerrier,
    /// coefficients lowest degree first (monic, length `n + 1`).
    pub fn charpoly_coeffs(&self) -> Vec<F> {
        assert!(self.is_square(), "characteristic polynomial needs a square matrix");
        let n = self.rows;
        let mut c = vec![F::zero(); n + 1];
        c[n] = F::one();
        let mut m_k = Self::zeros(n, n);
        for k in 1..=n {
            // M_k = A·M_{k−1} + c_{n−k+1}·I,  c_{n−k} = −tr(A·M_k)/k
            let mut next = self.mul(&m_k);
            for i in 0..n {
                let v = next.get(i, i).clone() + c[n - k + 1].clone();
                next.set(i, i, v);
            }
            m_k = next;
            let am = self.mul(&m_k);
            let tr = (0..n).fold(F::zero(), |acc, i| acc + am.get(i, i).clone());
            let kk = F::from_rational(&Rational::from_integer((k as i64).into()));
            c[n - k] = -(tr / kk);
        }
        c
    }
}

impl ExactMatrix<Rational> {
    pub fn charpoly(&self) -> Poly {
        Poly::new(self.charpoly_coeffs())
    }

    /// Rational eigenvalues with algebraic multiplicity.
    pub fn rational_eigenvalues(&self) -> Vec<(Rational, usize)> {
        self.charpoly().rational_roots()
    }
}

/// Fraction-free forward elimination on the first `ncols_pivot` columns.
/// Returns the pivot columns; rows past the pivot count end up zero there.
fn bareiss_forward<R: Domain>(a: &mut [Vec<R>], ncols_pivot: usize) -> Vec<usize> {
    let nrows = a.len();
    let ncols = a.first().map_or(0, Vec::len);
    let mut prev = R::one();
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..ncols_pivot {
        if r == nrows {
            break;
        }
        let Some(p) = (r..nrows).find(|&i| !a[i][c].is_zero()) else {
            continue;
        };
        a.swap(r, p);
        for i in r + 1..nrows {
            for j in c + 1..ncols {
                let v = a[r][c].mul_ref(&a[i][j]).sub_ref(&a[i][c].mul_ref(&a[r][j]));
                a[i][j] = v.exact_div(&prev);
            }
            a[i][c] = R::zero();
        }
        prev = a[r][c].clone();
        pivots.push(c);
        r += 1;
    }
    pivots
}

/// Exact rank of a matrix given by rows, using fraction-free elimination over
/// the field's integral domain.
pub fn bareiss_rank<F: Field>(rows: &[Vec<F>]) -> usize {
    let ncols = rows.first().map_or(0, Vec::len);
    let mut a: Vec<Vec<F::Ring>> = rows.iter().map(|r| F::clear_denominators(r)).collect();
    bareiss_forward(&mut a, ncols).len()
}

impl<F: Field + fmt::Display> fmt::Display for ExactMatrix<F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.rows {
            let cells: Vec<String> = self.row(i).iter().map(|x| x.to_string()).collect();
            writeln!(f, "[{}]", cells.join(", "))?;
        }
        Ok(())
    }
}

impl<F: Field> fmt::Debug for ExactMatrix<F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(self.to_rows()).finish()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::One;
    use crate::exactcore::{int, rat, RationalFunction};

    fn qm(rows: &[&[i64]]) -> ExactMatrix<Rational> {
        ExactMatrix::from_rows(rows.iter().map(|r| r.iter().map(|&x| int(x)).collect()).collect())
    }

    fn u_pow(k: usize) -> RationalFunction {
        RationalFunction::from_poly(Poly::monomial(k, int(1)))
    }

    #[test]
    fn solve_identity_and_diagonal() {
        let id = ExactMatrix::<Rational>::identity(2);
        assert_eq!(id.solve_linear(&[int(3), int(-1)]), Some(vec![int(3), int(-1)]));
        let m = ExactMatrix::from_rows(vec![
            vec![u_pow(1), RationalFunction::zero()],
            vec![RationalFunction::zero(), RationalFunction::one()],
        ]);
        let five = RationalFunction::constant(int(5));
        assert_eq!(m.solve_linear(&[u_pow(2), five.clone()]), Some(vec![u_pow(1), five]));
        assert_eq!(qm(&[&[1, 1], &[1, 1]]).solve_linear(&[int(1), int(2)]), None);
    }

    #[test]
    fn ranks() {
        assert_eq!(ExactMatrix::<Rational>::identity(3).rank(), 3);
        let m = ExactMatrix::from_rows(vec![vec![u_pow(0), u_pow(1)], vec![u_pow(1), u_pow(2)]]);
        assert_eq!(m.rank(), 1);
        let m = ExactMatrix::from_rows(vec![
            vec![u_pow(0), RationalFunction::zero()],
            vec![RationalFunction::zero(), u_pow(1)],
        ]);
        assert_eq!(m.rank(), 2);
        assert_eq!(qm(&[&[1, 2, 3], &[2, 4, 6], &[1, 0, 1]]).rank(), 2);
        assert_eq!(qm(&[&[0, 0], &[0, 0]]).rank(), 0);
    }

    #[test]
    fn charpoly_and_eigenvalues() {
        let y = qm(&[&[0, 4, 0, 0], &[1, 0, 0, 0], &[0, 1, 0, 4], &[0, 0, 1, 0]]);
        assert_eq!(y.charpoly(), Poly::new(vec![int(16), int(0), int(-8), int(0), int(1)]));
        assert_eq!(y.rational_eigenvalues(), vec![(int(-2), 2), (int(2), 2)]);
    }

    #[test]
    fn nullspace_basis() {
        let m = qm(&[&[1, 2, 3], &[2, 4, 6]]);
        let ns = m.nullspace();
        assert_eq!(ns.len(), 2);
        for v in &ns {
            assert!(m.mul_vec(v).iter().all(Zero::is_zero));
        }
        let m = ExactMatrix::from_rows(vec![vec![rat(1, 2), rat(1, 3)]]);
        assert_eq!(m.nullspace(), vec![vec![rat(-2, 3), int(1)]]);
    }
}
