//! Exact linear algebra over `Q` and `Q(sqrt(-d))`: dense echelon forms,
//! kernels, inverses, determinants, a sparse LU solver over `Q`, and exact
//! inertia of symmetric rational forms.

use crate::error::{Error, Result};
use crate::scalars::{Rat, Scalar};
use std::collections::BTreeMap;

/// A dense row-major matrix.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Matrix<T: Scalar> {
    pub rows: usize,
    pub cols: usize,
    pub ctx: T::Ctx,
    pub data: Vec<T>,
}

impl<T: Scalar> Matrix<T> {
    pub fn zeros(rows: usize, cols: usize, ctx: T::Ctx) -> Self {
        Matrix { rows, cols, ctx, data: vec![T::zero(ctx); rows * cols] }
    }
    pub fn identity(n: usize, ctx: T::Ctx) -> Self {
        let mut m = Self::zeros(n, n, ctx);
        for i in 0..n {
            m.set(i, i, T::one(ctx));
        }
        m
    }
    pub fn from_rows(rows: &[Vec<T>], ctx: T::Ctx) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |x| x.len());
        let mut data = Vec::with_capacity(r * c);
        for row in rows {
            assert_eq!(row.len(), c, "ragged matrix rows");
            data.extend(row.iter().cloned());
        }
        Matrix { rows: r, cols: c, ctx, data }
    }
    pub fn from_cols(cols: &[Vec<T>], rows: usize, ctx: T::Ctx) -> Self {
        let mut m = Self::zeros(rows, cols.len(), ctx);
        for (j, col) in cols.iter().enumerate() {
            assert_eq!(col.len(), rows, "column length mismatch");
            for (i, v) in col.iter().enumerate() {
                m.set(i, j, v.clone());
            }
        }
        m
    }
    pub fn get(&self, i: usize, j: usize) -> &T {
        &self.data[i * self.cols + j]
    }
    pub fn set(&mut self, i: usize, j: usize, v: T) {
        self.data[i * self.cols + j] = v;
    }
    pub fn row(&self, i: usize) -> Vec<T> {
        self.data[i * self.cols..(i + 1) * self.cols].to_vec()
    }
    pub fn col(&self, j: usize) -> Vec<T> {
        (0..self.rows).map(|i| self.get(i, j).clone()).collect()
    }
    pub fn to_rows(&self) -> Vec<Vec<T>> {
        (0..self.rows).map(|i| self.row(i)).collect()
    }
    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows, self.ctx);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.set(j, i, self.get(i, j).clone());
            }
        }
        t
    }
    pub fn mul(&self, o: &Self) -> Result<Self> {
        if self.cols != o.rows {
            return Err(Error::DimensionMismatch { expected: self.cols, got: o.rows });
        }
        let mut r = Self::zeros(self.rows, o.cols, self.ctx);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..o.cols {
                    let b = o.get(k, j);
                    if !b.is_zero() {
                        let v = r.get(i, j).plus(&a.times(b));
                        r.set(i, j, v);
                    }
                }
            }
        }
        Ok(r)
    }
    pub fn mul_vec(&self, v: &[T]) -> Result<Vec<T>> {
        if self.cols != v.len() {
            return Err(Error::DimensionMismatch { expected: self.cols, got: v.len() });
        }
        Ok((0..self.rows)
            .map(|i| {
                let mut acc = T::zero(self.ctx);
                for (j, x) in v.iter().enumerate() {
                    let a = self.get(i, j);
                    if !a.is_zero() && !x.is_zero() {
                        acc = acc.plus(&a.times(x));
                    }
                }
                acc
            })
            .collect())
    }
    pub fn add(&self, o: &Self) -> Result<Self> {
        if self.rows != o.rows || self.cols != o.cols {
            return Err(Error::DimensionMismatch { expected: self.rows * self.cols, got: o.rows * o.cols });
        }
        let data = self.data.iter().zip(&o.data).map(|(a, b)| a.plus(b)).collect();
        Ok(Matrix { rows: self.rows, cols: self.cols, ctx: self.ctx, data })
    }
    pub fn sub(&self, o: &Self) -> Result<Self> {
        self.add(&o.scale(&T::from_i64(self.ctx, -1)))
    }
    pub fn scale(&self, s: &T) -> Self {
        Matrix { rows: self.rows, cols: self.cols, ctx: self.ctx, data: self.data.iter().map(|a| a.times(s)).collect() }
    }
    pub fn map<U: Scalar>(&self, ctx: U::Ctx, f: impl Fn(&T) -> U) -> Matrix<U> {
        Matrix { rows: self.rows, cols: self.cols, ctx, data: self.data.iter().map(f).collect() }
    }
    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|a| a.is_zero())
    }
    /// Stacks `o` below `self`.
    pub fn vstack(&self, o: &Self) -> Result<Self> {
        if self.cols != o.cols && self.rows != 0 && o.rows != 0 {
            return Err(Error::DimensionMismatch { expected: self.cols, got: o.cols });
        }
        let cols = if self.rows == 0 { o.cols } else { self.cols };
        let mut data = self.data.clone();
        data.extend(o.data.iter().cloned());
        Ok(Matrix { rows: self.rows + o.rows, cols, ctx: self.ctx, data })
    }

    /// Reduces in place to reduced row echelon form; returns the pivot columns.
    pub fn rref_in_place(&mut self) -> Vec<usize> {
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..self.cols {
            if r == self.rows {
                break;
            }
            let Some(p) = (r..self.rows).find(|&i| !self.get(i, c).is_zero()) else {
                continue;
            };
            if p != r {
                for j in 0..self.cols {
                    self.data.swap(p * self.cols + j, r * self.cols + j);
                }
            }
            let inv = self.get(r, c).inverse().expect("nonzero pivot");
            for j in c..self.cols {
                let v = self.get(r, j).times(&inv);
                self.set(r, j, v);
            }
            for i in 0..self.rows {
                if i == r {
                    continue;
                }
                let f = self.get(i, c).clone();
                if f.is_zero() {
                    continue;
                }
                for j in c..self.cols {
                    let b = self.get(r, j);
                    if !b.is_zero() {
                        let v = self.get(i, j).minus(&f.times(b));
                        self.set(i, j, v);
                    }
                }
            }
            pivots.push(c);
            r += 1;
        }
        pivots
    }
    /// Reduced row echelon form with zero rows removed, plus pivot columns.
    pub fn rref(&self) -> (Self, Vec<usize>) {
        let mut m = self.clone();
        let p = m.rref_in_place();
        m.data.truncate(p.len() * m.cols);
        m.rows = p.len();
        (m, p)
    }
    pub fn rank(&self) -> usize {
        self.rref().1.len()
    }
    /// A basis of the right kernel `{x : A x = 0}`, in echelon form.
    pub fn kernel(&self) -> Vec<Vec<T>> {
        let (r, pivots) = self.rref();
        let free: Vec<usize> = (0..self.cols).filter(|c| !pivots.contains(c)).collect();
        let mut basis = Vec::with_capacity(free.len());
        for &f in &free {
            let mut v = vec![T::zero(self.ctx); self.cols];
            v[f] = T::one(self.ctx);
            for (i, &p) in pivots.iter().enumerate() {
                v[p] = r.get(i, f).negated();
            }
            basis.push(v);
        }
        if basis.is_empty() {
            return basis;
        }
        let (k, _) = Matrix::from_rows(&basis, self.ctx).rref();
        k.to_rows()
    }
    pub fn inverse(&self) -> Result<Self> {
        if self.rows != self.cols {
            return Err(Error::DimensionMismatch { expected: self.rows, got: self.cols });
        }
        let n = self.rows;
        let mut aug = Self::zeros(n, 2 * n, self.ctx);
        for i in 0..n {
            for j in 0..n {
                aug.set(i, j, self.get(i, j).clone());
            }
            aug.set(i, n + i, T::one(self.ctx));
        }
        let piv = aug.rref_in_place();
        if piv.len() < n || piv[n - 1] != n - 1 {
            return Err(Error::Singular);
        }
        let mut inv = Self::zeros(n, n, self.ctx);
        for i in 0..n {
            for j in 0..n {
                inv.set(i, j, aug.get(i, n + j).clone());
            }
        }
        Ok(inv)
    }
    pub fn det(&self) -> Result<T> {
        if self.rows != self.cols {
            return Err(Error::DimensionMismatch { expected: self.rows, got: self.cols });
        }
        let n = self.rows;
        let mut m = self.clone();
        let mut det = T::one(self.ctx);
        for c in 0..n {
            let Some(p) = (c..n).find(|&i| !m.get(i, c).is_zero()) else {
                return Ok(T::zero(self.ctx));
            };
            if p != c {
                for j in 0..n {
                    m.data.swap(p * n + j, c * n + j);
                }
                det = det.negated();
            }
            let piv = m.get(c, c).clone();
            det = det.times(&piv);
            let inv = piv.inverse().expect("nonzero pivot");
            for i in c + 1..n {
                let f = m.get(i, c).times(&inv);
                if f.is_zero() {
                    continue;
                }
                for j in c..n {
                    let v = m.get(i, j).minus(&f.times(m.get(c, j)));
                    m.set(i, j, v);
                }
            }
        }
        Ok(det)
    }
    /// Solves `A x = b`, returning one solution.
    pub fn solve(&self, b: &[T]) -> Result<Vec<T>> {
        if b.len() != self.rows {
            return Err(Error::DimensionMismatch { expected: self.rows, got: b.len() });
        }
        let mut aug = Self::zeros(self.rows, self.cols + 1, self.ctx);
        for i in 0..self.rows {
            for j in 0..self.cols {
                aug.set(i, j, self.get(i, j).clone());
            }
            aug.set(i, self.cols, b[i].clone());
        }
        let piv = aug.rref_in_place();
        if piv.last() == Some(&self.cols) {
            return Err(Error::Inconsistent);
        }
        let mut x = vec![T::zero(self.ctx); self.cols];
        for (i, &p) in piv.iter().enumerate() {
            x[p] = aug.get(i, self.cols).clone();
        }
        Ok(x)
    }
}

/// Rank of a list of row vectors.
pub fn rank_of_rows<T: Scalar>(rows: &[Vec<T>], ctx: T::Ctx) -> usize {
    if rows.is_empty() {
        return 0;
    }
    Matrix::from_rows(rows, ctx).rank()
}

/// Whether `v` lies in the span of `rows`.
pub fn in_span<T: Scalar>(rows: &[Vec<T>], v: &[T], ctx: T::Ctx) -> bool {
    let r0 = rank_of_rows(rows, ctx);
    let mut all = rows.to_vec();
    all.push(v.to_vec());
    rank_of_rows(&all, ctx) == r0
}

/// Exact inertia `(p, q, z)` of a symmetric rational matrix: the number of
/// positive, negative and zero eigenvalues, computed by symmetric reduction.
pub fn inertia(a: &Matrix<Rat>) -> Result<(usize, usize, usize)> {
    if a.rows != a.cols {
        return Err(Error::DimensionMismatch { expected: a.rows, got: a.cols });
    }
    for i in 0..a.rows {
        for j in 0..i {
            if a.get(i, j) != a.get(j, i) {
                return Err(Error::Invalid("matrix is not symmetric".into()));
            }
        }
    }
    let mut m = a.clone();
    let mut n = m.rows;
    let (mut p, mut q) = (0usize, 0usize);
    let mut zero = 0usize;
    // Repeatedly split off a 1x1 or 2x2 block by congruence.
    while n > 0 {
        if let Some(k) = (0..n).find(|&k| !m.get(k, k).is_zero()) {
            let piv = m.get(k, k).clone();
            if piv.signum() > 0 {
                p += 1
            } else {
                q += 1
            }
            let inv = piv.recip()?;
            let mut next = Matrix::<Rat>::zeros(n - 1, n - 1, ());
            let others: Vec<usize> = (0..n).filter(|&i| i != k).collect();
            for (ii, &i) in others.iter().enumerate() {
                for (jj, &j) in others.iter().enumerate() {
                    let v = m.get(i, j) - &(&(m.get(i, k) * m.get(k, j)) * &inv);
                    next.set(ii, jj, v);
                }
            }
            m = next;
            n -= 1;
            continue;
        }
        // Zero diagonal: find an off-diagonal entry to form a hyperbolic block.
        let found = (0..n).flat_map(|i| (0..n).map(move |j| (i, j))).find(|&(i, j)| i < j && !m.get(i, j).is_zero());
        let Some((i, j)) = found else {
            zero += n;
            break;
        };
        // Replace basis vector i by e_i + e_j, which has self-pairing 2 a_ij != 0.
        let mut t = Matrix::<Rat>::identity(n, ());
        t.set(j, i, Rat::one());
        m = t.transpose().mul(&m)?.mul(&t)?;
    }
    Ok((p, q, zero))
}

/// Signature `(p, q)` of a nondegenerate symmetric rational form.
pub fn gram_signature(a: &Matrix<Rat>) -> Result<(usize, usize)> {
    let (p, q, z) = inertia(a)?;
    if z != 0 {
        return Err(Error::Degenerate);
    }
    Ok((p, q))
}

/// A sparse square matrix over `Q` with an LU factorization for repeated solves.
#[derive(Clone, Debug)]
pub struct SparseLu {
    n: usize,
    /// Row operations recorded during elimination: (pivot row, target row, factor).
    ops: Vec<(usize, usize, Rat)>,
    /// Upper-triangular rows keyed by pivot column, in elimination order.
    upper: Vec<(usize, usize, BTreeMap<usize, Rat>)>,
}

impl SparseLu {
    /// Factors the matrix given by its columns as sparse maps `row -> value`.
    pub fn factor_columns(n: usize, cols: &[BTreeMap<usize, Rat>]) -> Result<SparseLu> {
        if cols.len() != n {
            return Err(Error::DimensionMismatch { expected: n, got: cols.len() });
        }
        let mut rows: Vec<BTreeMap<usize, Rat>> = vec![BTreeMap::new(); n];
        for (j, col) in cols.iter().enumerate() {
            for (&i, v) in col {
                if i >= n {
                    return Err(Error::DimensionMismatch { expected: n, got: i + 1 });
                }
                if !v.is_zero() {
                    rows[i].insert(j, v.clone());
                }
            }
        }
        Self::factor_rows(n, rows)
    }

    fn factor_rows(n: usize, mut rows: Vec<BTreeMap<usize, Rat>>) -> Result<SparseLu> {
        let mut active: Vec<bool> = vec![true; n];
        let mut col_rows: Vec<std::collections::BTreeSet<usize>> = vec![Default::default(); n];
        for (i, r) in rows.iter().enumerate() {
            for &j in r.keys() {
                col_rows[j].insert(i);
            }
        }
        let mut ops = Vec::new();
        let mut upper = Vec::with_capacity(n);
        for c in 0..n {
            // Pivot: the active row with a nonzero in column c and fewest entries.
            let piv = col_rows[c]
                .iter()
                .copied()
                .filter(|&i| active[i])
                .min_by_key(|&i| (rows[i].len(), i))
                .ok_or(Error::Singular)?;
            active[piv] = false;
            let prow = rows[piv].clone();
            let pval = prow[&c].clone();
            let targets: Vec<usize> = col_rows[c].iter().copied().filter(|&i| active[i]).collect();
            for t in targets {
                let f = &rows[t][&c] / &pval;
                for (&j, v) in &prow {
                    let nv = rows[t].get(&j).cloned().unwrap_or_default() - &(&f * v);
                    if nv.is_zero() {
                        rows[t].remove(&j);
                        col_rows[j].remove(&t);
                    } else {
                        if !rows[t].contains_key(&j) {
                            col_rows[j].insert(t);
                        }
                        rows[t].insert(j, nv);
                    }
                }
                ops.push((piv, t, f));
            }
            upper.push((c, piv, prow));
        }
        Ok(SparseLu { n, ops, upper })
    }

    /// Solves `A x = b` for sparse `b`.
    pub fn solve(&self, b: &BTreeMap<usize, Rat>) -> BTreeMap<usize, Rat> {
        let mut y: Vec<Rat> = vec![Rat::zero(); self.n];
        for (&i, v) in b {
            y[i] = v.clone();
        }
        for (p, t, f) in &self.ops {
            if !y[*p].is_zero() {
                let v = &y[*t] - &(f * &y[*p]);
                y[*t] = v;
            }
        }
        let mut x: Vec<Rat> = vec![Rat::zero(); self.n];
        for (c, piv, prow) in self.upper.iter().rev() {
            let mut acc = y[*piv].clone();
            for (&j, v) in prow {
                if j != *c && !x[j].is_zero() {
                    acc = acc - &(v * &x[j]);
                }
            }
            x[*c] = &acc / &prow[c];
        }
        x.into_iter().enumerate().filter(|(_, v)| !v.is_zero()).collect()
    }
}
