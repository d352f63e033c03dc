//! The lattice `V = H^1(X) + H^1(X^)` with its hyperbolic pairing, and exact
//! subspaces of `V` over `Q` or `Q(sqrt(-d))`.
//!
//! Vectors are coordinate lists of length `4n` in the order
//! `e1..e2n, f1..f2n` with `(e_i, f_j) = delta_ij`.

use crate::error::{Error, Result};
use crate::exterior::{GradedElement, MultiIndex};
use crate::linalg::Matrix;
use crate::scalars::{Rat, Scalar};
use serde::{Deserialize, Serialize};

/// The lattice `V` for an abelian `n`-fold.
#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct LatticeV {
    pub n: usize,
}

impl LatticeV {
    pub fn new(n: usize) -> LatticeV {
        LatticeV { n }
    }
    pub fn dim(&self) -> usize {
        4 * self.n
    }
    /// Coordinate position of `e_i` (1-based `i`).
    pub fn e(&self, i: usize) -> usize {
        i - 1
    }
    /// Coordinate position of `f_i` (1-based `i`).
    pub fn f(&self, i: usize) -> usize {
        2 * self.n + i - 1
    }
    pub fn basis_vector<T: Scalar>(&self, pos: usize, ctx: T::Ctx) -> Vec<T> {
        let mut v = vec![T::zero(ctx); self.dim()];
        v[pos] = T::one(ctx);
        v
    }
    /// Name of the basis vector at a coordinate position.
    pub fn label(&self, pos: usize) -> String {
        if pos < 2 * self.n {
            format!("e{}", pos + 1)
        } else {
            format!("f{}", pos - 2 * self.n + 1)
        }
    }
    /// Gram matrix of the pairing in the standard basis.
    pub fn gram(&self) -> Matrix<Rat> {
        let m = 2 * self.n;
        let mut g = Matrix::zeros(2 * m, 2 * m, ());
        for i in 0..m {
            g.set(i, m + i, Rat::one());
            g.set(m + i, i, Rat::one());
        }
        g
    }
    /// The isotropic block spanned by `e1..e2n`.
    pub fn e_block<T: Scalar>(&self, ctx: T::Ctx) -> Subspace<T> {
        let rows = (1..=2 * self.n).map(|i| self.basis_vector(self.e(i), ctx)).collect::<Vec<_>>();
        Subspace::span(*self, ctx, &rows)
    }
    /// The isotropic block spanned by `f1..f2n`.
    pub fn f_block<T: Scalar>(&self, ctx: T::Ctx) -> Subspace<T> {
        let rows = (1..=2 * self.n).map(|i| self.basis_vector(self.f(i), ctx)).collect::<Vec<_>>();
        Subspace::span(*self, ctx, &rows)
    }
}

/// The pairing `(x, y)_V = sum_i x_{e_i} y_{f_i} + x_{f_i} y_{e_i}`.
pub fn pair_v<T: Scalar>(lat: LatticeV, x: &[T], y: &[T]) -> Result<T> {
    let dim = lat.dim();
    if x.len() != dim || y.len() != dim {
        return Err(Error::DimensionMismatch { expected: dim, got: x.len().min(y.len()) });
    }
    let m = 2 * lat.n;
    let ctx = x.first().map(|v| v.ctx()).ok_or(Error::Invalid("empty vector".into()))?;
    let mut acc = T::zero(ctx);
    for i in 0..m {
        for (a, b) in [(&x[i], &y[m + i]), (&x[m + i], &y[i])] {
            if !a.is_zero() && !b.is_zero() {
                acc = acc.plus(&a.times(b));
            }
        }
    }
    Ok(acc)
}

/// A subspace of `V` (or of any coordinate space) stored by a reduced row
/// echelon generator matrix.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Subspace<T: Scalar> {
    pub ambient: LatticeV,
    pub ctx: T::Ctx,
    /// Generators in reduced row echelon form, one per row.
    pub rows: Vec<Vec<T>>,
}

impl<T: Scalar> Subspace<T> {
    /// The span of the given vectors.
    pub fn span(ambient: LatticeV, ctx: T::Ctx, vectors: &[Vec<T>]) -> Self {
        if vectors.is_empty() {
            return Subspace { ambient, ctx, rows: vec![] };
        }
        let (r, _) = Matrix::from_rows(vectors, ctx).rref();
        Subspace { ambient, ctx, rows: r.to_rows() }
    }
    pub fn zero(ambient: LatticeV, ctx: T::Ctx) -> Self {
        Subspace { ambient, ctx, rows: vec![] }
    }
    pub fn dim(&self) -> usize {
        self.rows.len()
    }
    pub fn contains(&self, v: &[T]) -> bool {
        crate::linalg::in_span(&self.rows, v, self.ctx)
    }
    pub fn contains_subspace(&self, o: &Self) -> bool {
        o.rows.iter().all(|v| self.contains(v))
    }
    /// The subspace spanned by both.
    pub fn sum(&self, o: &Self) -> Result<Self> {
        self.check(o)?;
        let mut all = self.rows.clone();
        all.extend(o.rows.iter().cloned());
        Ok(Self::span(self.ambient, self.ctx, &all))
    }
    fn check(&self, o: &Self) -> Result<()> {
        if self.ambient != o.ambient {
            return Err(Error::Invalid("subspaces live in different lattices".into()));
        }
        if self.ctx != o.ctx {
            return Err(Error::Invalid("subspaces have different scalar fields".into()));
        }
        Ok(())
    }
    /// Coefficientwise Galois conjugate.
    pub fn conjugate(&self) -> Self {
        let rows: Vec<Vec<T>> = self.rows.iter().map(|r| r.iter().map(|c| c.conjugate()).collect()).collect();
        Self::span(self.ambient, self.ctx, &rows)
    }
    /// The orthogonal complement with respect to the pairing on `V`.
    pub fn annihilator(&self) -> Self {
        let dim = self.ambient.dim();
        if self.rows.is_empty() {
            let all: Vec<Vec<T>> = (0..dim).map(|p| self.ambient.basis_vector(p, self.ctx)).collect();
            return Self::span(self.ambient, self.ctx, &all);
        }
        // (x, v) = sum x_e v_f + x_f v_e, so pairing with x is the row x swapped.
        let m = 2 * self.ambient.n;
        let swapped: Vec<Vec<T>> =
            self.rows.iter().map(|r| r[m..].iter().chain(r[..m].iter()).cloned().collect()).collect();
        let k = Matrix::from_rows(&swapped, self.ctx).kernel();
        Self::span(self.ambient, self.ctx, &k)
    }
}

/// The kernel of a linear map given by a matrix whose columns are indexed by
/// the coordinates of `V`.
pub fn kernel_of<T: Scalar>(ambient: LatticeV, map: &Matrix<T>) -> Result<Subspace<T>> {
    if map.cols != ambient.dim() {
        return Err(Error::DimensionMismatch { expected: ambient.dim(), got: map.cols });
    }
    let k = map.kernel();
    Ok(Subspace::span(ambient, map.ctx, &k))
}

/// Whether the pairing vanishes on all pairs of generators.
pub fn is_isotropic<T: Scalar>(w: &Subspace<T>) -> bool {
    w.rows.iter().all(|a| w.rows.iter().all(|b| pair_v(w.ambient, a, b).map(|v| v.is_zero()).unwrap_or(false)))
}

/// Exact intersection of two subspaces.
pub fn intersect<T: Scalar>(a: &Subspace<T>, b: &Subspace<T>) -> Result<Subspace<T>> {
    a.check(b)?;
    if a.rows.is_empty() || b.rows.is_empty() {
        return Ok(Subspace::zero(a.ambient, a.ctx));
    }
    // Solve sum x_i a_i = sum y_j b_j through the kernel of [A^T | -B^T].
    let dim = a.ambient.dim();
    let (ka, kb) = (a.rows.len(), b.rows.len());
    let mut m = Matrix::zeros(dim, ka + kb, a.ctx);
    for (i, r) in a.rows.iter().enumerate() {
        for (p, v) in r.iter().enumerate() {
            m.set(p, i, v.clone());
        }
    }
    for (j, r) in b.rows.iter().enumerate() {
        for (p, v) in r.iter().enumerate() {
            m.set(p, ka + j, v.negated());
        }
    }
    let vecs: Vec<Vec<T>> = m
        .kernel()
        .into_iter()
        .map(|k| {
            let mut v = vec![T::zero(a.ctx); dim];
            for (i, r) in a.rows.iter().enumerate() {
                if k[i].is_zero() {
                    continue;
                }
                for p in 0..dim {
                    v[p] = v[p].plus(&k[i].times(&r[p]));
                }
            }
            v
        })
        .collect();
    Ok(Subspace::span(a.ambient, a.ctx, &vecs))
}

/// The matrix of `theta(y) = y contracted into Theta`, mapping f-coordinates
/// to e-coordinates, for a 2-form `Theta` on `H^1(X)`.
pub fn theta_matrix<T: Scalar>(theta: &GradedElement<T>) -> Result<Matrix<T>> {
    let m = theta.rank();
    if theta.homogeneous_degree().is_some_and(|d| d != 2) {
        return Err(Error::NotHomogeneous);
    }
    let mut t: Matrix<T> = Matrix::zeros(m, m, theta.ctx);
    for (idx, c) in &theta.terms {
        let ij = idx.indices();
        let (i, j) = (ij[0] - 1, ij[1] - 1);
        // f_i contracts e_i ^ e_j to e_j, f_j contracts it to -e_i.
        t.set(j, i, t.get(j, i).plus(c));
        t.set(i, j, t.get(i, j).minus(c));
    }
    Ok(t)
}

/// The principal polarization `Theta = sum_{i<=n} e_i ^ e_{i+n}` on `H^1(X)`.
pub fn standard_theta<T: Scalar>(n: usize, ctx: T::Ctx) -> GradedElement<T> {
    let b = crate::exterior::GradedBasis::h_x(n);
    GradedElement::from_terms(&b, ctx, (1..=n).map(|i| (MultiIndex::from_indices(&[i, i + n]), T::one(ctx))))
}
