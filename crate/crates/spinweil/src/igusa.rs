//! The Spin-invariant quartic `J` on the even half-spin space of an abelian
//! threefold, and an exact Pfaffian.

use crate::error::{Error, Result};
use crate::exterior::{parity_sign, GradedElement, MultiIndex};
use crate::linalg::Matrix;
use crate::scalars::{Rat, Scalar};
use std::collections::HashMap;

/// Coordinates `x = x0 + sum x_ij e_i^e_j + sum y_ij e*_ij + y0 [pt]` of an
/// even class on an abelian threefold, where
/// `e*_ij = (-1)^{i+j-1} e_1 ^ .. (omit i, j) .. ^ e_6`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct IgusaCoords<T: Scalar> {
    pub x0: T,
    /// Alternating 6x6 matrix of the degree-two coordinates.
    pub x: Matrix<T>,
    /// Alternating 6x6 matrix of the degree-four coordinates.
    pub y: Matrix<T>,
    pub y0: T,
}

fn check_alternating<T: Scalar>(a: &Matrix<T>) -> Result<()> {
    if a.rows != a.cols {
        return Err(Error::DimensionMismatch { expected: a.rows, got: a.cols });
    }
    for i in 0..a.rows {
        if !a.get(i, i).is_zero() {
            return Err(Error::NotAlternating);
        }
        for j in 0..i {
            if *a.get(i, j) != a.get(j, i).negated() {
                return Err(Error::NotAlternating);
            }
        }
    }
    Ok(())
}

/// Pfaffian by expansion along the first remaining row, memoized on the set
/// of remaining indices.
fn pf_std<T: Scalar>(a: &Matrix<T>, rest: u32, memo: &mut HashMap<u32, T>) -> T {
    if rest == 0 {
        return T::one(a.ctx);
    }
    if let Some(v) = memo.get(&rest) {
        return v.clone();
    }
    let i = rest.trailing_zeros();
    let others = rest & !(1 << i);
    let mut acc = T::zero(a.ctx);
    let mut bits = others;
    let mut pos = 0usize;
    while bits != 0 {
        let j = bits.trailing_zeros();
        bits &= bits - 1;
        let aij = a.get(i as usize, j as usize);
        if !aij.is_zero() {
            let sub = pf_std(a, others & !(1 << j), memo);
            acc = acc.plus(&aij.times(&sub).scale_int(parity_sign(pos)));
        }
        pos += 1;
    }
    memo.insert(rest, acc.clone());
    acc
}

/// The Pfaffian normalized so that the block matrix `(0 I_r; -I_r 0)` has
/// Pfaffian `1`. The empty matrix has Pfaffian `1`.
pub fn pfaffian<T: Scalar>(a: &Matrix<T>) -> Result<T> {
    check_alternating(a)?;
    if a.rows % 2 == 1 {
        return Err(Error::OddSize(a.rows));
    }
    if a.rows > 30 {
        return Err(Error::UnsupportedRank(a.rows));
    }
    let r = a.rows / 2;
    let full = if a.rows == 0 { 0 } else { (1u32 << a.rows) - 1 };
    let p = pf_std(a, full, &mut HashMap::new());
    Ok(p.scale_int(parity_sign(r * r.saturating_sub(1) / 2)))
}

/// The matrix with rows and columns `i` and `j` removed.
fn cross_out<T: Scalar>(a: &Matrix<T>, i: usize, j: usize) -> Matrix<T> {
    let keep: Vec<usize> = (0..a.rows).filter(|&k| k != i && k != j).collect();
    let mut m = Matrix::zeros(keep.len(), keep.len(), a.ctx);
    for (r, &p) in keep.iter().enumerate() {
        for (c, &q) in keep.iter().enumerate() {
            m.set(r, c, a.get(p, q).clone());
        }
    }
    m
}

/// The sign relating `e*_ij` to the monomial on the complement of `{i, j}`.
fn dual_sign(i: usize, j: usize) -> i64 {
    parity_sign(i + j - 1)
}

/// Reads off the coordinates of an even class on an abelian threefold.
pub fn igusa_coords<T: Scalar>(w: &GradedElement<T>) -> Result<IgusaCoords<T>> {
    if w.rank() != 6 {
        return Err(Error::DimensionMismatch { expected: 6, got: w.rank() });
    }
    if !w.is_even() {
        return Err(Error::NotParityHomogeneous);
    }
    let ctx = w.ctx;
    let mut x = Matrix::zeros(6, 6, ctx);
    let mut y = Matrix::zeros(6, 6, ctx);
    let top = MultiIndex::top(6);
    for i in 1..=6 {
        for j in i + 1..=6 {
            let pair = MultiIndex::from_indices(&[i, j]);
            let c = w.coeff(pair);
            x.set(i - 1, j - 1, c.clone());
            x.set(j - 1, i - 1, c.negated());
            let d = w.coeff(pair.complement(6)).scale_int(dual_sign(i, j));
            y.set(i - 1, j - 1, d.clone());
            y.set(j - 1, i - 1, d.negated());
        }
    }
    Ok(IgusaCoords { x0: w.coeff(MultiIndex::EMPTY), x, y, y0: w.coeff(top) })
}

/// The class with the given coordinates.
pub fn from_igusa_coords<T: Scalar>(c: &IgusaCoords<T>) -> Result<GradedElement<T>> {
    check_alternating(&c.x)?;
    check_alternating(&c.y)?;
    let b = crate::exterior::GradedBasis::h_x(3);
    let ctx = c.x0.ctx();
    let mut terms = vec![(MultiIndex::EMPTY, c.x0.clone()), (MultiIndex::top(6), c.y0.clone())];
    for i in 1..=6 {
        for j in i + 1..=6 {
            let pair = MultiIndex::from_indices(&[i, j]);
            terms.push((pair, c.x.get(i - 1, j - 1).clone()));
            terms.push((pair.complement(6), c.y.get(i - 1, j - 1).scale_int(dual_sign(i, j))));
        }
    }
    Ok(GradedElement::from_terms(&b, ctx, terms))
}

/// The fifteen terms `Pf(X_ij) Pf(Y_ij)`, indexed by `i < j`.
pub fn igusa_minor_terms<T: Scalar>(c: &IgusaCoords<T>) -> Result<Vec<((usize, usize), T)>> {
    let mut out = Vec::with_capacity(15);
    for i in 0..6 {
        for j in i + 1..6 {
            let px = pfaffian(&cross_out(&c.x, i, j))?;
            let py = pfaffian(&cross_out(&c.y, i, j))?;
            out.push(((i + 1, j + 1), px.times(&py)));
        }
    }
    Ok(out)
}

/// `J = x0 Pf(y) + y0 Pf(x) + sum_{i<j} Pf(X_ij) Pf(Y_ij) - (1/4)(x0 y0 - sum x_ij y_ij)^2`.
pub fn igusa_j_coords<T: Scalar>(c: &IgusaCoords<T>) -> Result<T> {
    let mut acc = c.x0.times(&pfaffian(&c.y)?).plus(&c.y0.times(&pfaffian(&c.x)?));
    for (_, t) in igusa_minor_terms(c)? {
        acc = acc.plus(&t);
    }
    let mut s = c.x0.times(&c.y0);
    for i in 0..6 {
        for j in i + 1..6 {
            s = s.minus(&c.x.get(i, j).times(c.y.get(i, j)));
        }
    }
    Ok(acc.minus(&s.times(&s).scale_rat(&Rat::new(1, 4))))
}

/// The Igusa quartic of an even class on an abelian threefold.
pub fn igusa_j<T: Scalar>(w: &GradedElement<T>) -> Result<T> {
    igusa_j_coords(&igusa_coords(w)?)
}
