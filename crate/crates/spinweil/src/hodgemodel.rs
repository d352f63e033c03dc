//! A bigraded model of `H*(X, C)` for a split principally polarized abelian
//! variety, the polyvector space `HT^2 = H^2(O) + H^1(T) + H^0(wedge^2 T)`, and
//! the contraction of `HT^2` against Chern characters.
//!
//! `H*(X, C)` is the exterior algebra on `w_1..w_n` of type `(1,0)` and
//! `wb_1..wb_n` of type `(0,1)`, with `Theta = sum_i w_i ^ wb_i`.

use crate::error::{Error, Result};
use crate::exterior::{multi_indices, wedge, GradedBasis, GradedElement, MultiIndex};
use crate::linalg::{rank_of_rows, Matrix};
use crate::scalars::Rat;
use crate::thetaring::ThetaPoly;
use serde::{Deserialize, Serialize};
use std::sync::Arc;

/// The Dolbeault model of an abelian `n`-fold.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DolbeaultModel {
    pub n: usize,
    pub basis: Arc<GradedBasis>,
}

impl DolbeaultModel {
    pub fn new(n: usize) -> Result<DolbeaultModel> {
        if n == 0 || 2 * n > crate::exterior::MAX_RANK {
            return Err(Error::UnsupportedRank(n));
        }
        let mut labels: Vec<String> = (1..=n).map(|i| format!("w{i}")).collect();
        labels.extend((1..=n).map(|i| format!("wb{i}")));
        Ok(DolbeaultModel { n, basis: GradedBasis::new(format!("Dolbeault[n={n}]"), labels)? })
    }
    /// Generator number (1-based) of `w_i`.
    pub fn w(&self, i: usize) -> usize {
        i
    }
    /// Generator number (1-based) of `wb_i`.
    pub fn wb(&self, i: usize) -> usize {
        self.n + i
    }
    /// The Hodge type `(p, q)` of a monomial.
    pub fn hodge_type(&self, k: MultiIndex) -> (usize, usize) {
        let low = (1u32 << self.n) - 1;
        ((k.0 & low).count_ones() as usize, (k.0 >> self.n).count_ones() as usize)
    }
    /// Monomials of type `(p, q)`.
    pub fn monomials_of_type(&self, p: usize, q: usize) -> Vec<MultiIndex> {
        multi_indices(2 * self.n, |d| d == p + q).into_iter().filter(|k| self.hodge_type(*k) == (p, q)).collect()
    }
    pub fn h_pq_dim(&self, p: usize, q: usize) -> usize {
        self.monomials_of_type(p, q).len()
    }
    pub fn one(&self) -> GradedElement<Rat> {
        GradedElement::one(&self.basis, ())
    }
    /// `Theta_I = sum_{i in I} w_i ^ wb_i` for a range of indices.
    pub fn partial_theta(&self, range: std::ops::RangeInclusive<usize>) -> GradedElement<Rat> {
        GradedElement::from_terms(
            &self.basis,
            (),
            range.map(|i| (MultiIndex((1 << (self.w(i) - 1)) | (1 << (self.wb(i) - 1))), Rat::one())),
        )
    }
    pub fn theta(&self) -> GradedElement<Rat> {
        self.partial_theta(1..=self.n)
    }
    /// Evaluates a theta-ring polynomial at a given degree-two class.
    pub fn eval_poly(&self, p: &ThetaPoly<Rat>, theta: &GradedElement<Rat>) -> Result<GradedElement<Rat>> {
        let mut power = self.one();
        let mut out = GradedElement::zero(&self.basis, ());
        for (k, c) in p.coeffs.iter().enumerate() {
            if k > 0 {
                power = wedge(&power, theta)?;
            }
            out.add_assign(&power.scale(c));
        }
        Ok(out)
    }
}

/// A class of `HT^2(X)`: `c` in `wedge^2 span(wb)`, `xi` in `span(dw) (x) span(wb)`,
/// `pi` in `wedge^2 span(dw)`. Pair components are indexed by `i < j` in
/// lexicographic order and `xi[i * n + j]` is the coefficient of `dw_{i+1} (x) wb_{j+1}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HTClass {
    pub n: usize,
    pub c: Vec<Rat>,
    pub xi: Vec<Rat>,
    pub pi: Vec<Rat>,
}

fn pairs(n: usize) -> Vec<(usize, usize)> {
    (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).collect()
}

impl HTClass {
    pub fn zero(n: usize) -> HTClass {
        let p = n * (n.saturating_sub(1)) / 2;
        HTClass { n, c: vec![Rat::zero(); p], xi: vec![Rat::zero(); n * n], pi: vec![Rat::zero(); p] }
    }
    /// `(C(n,2), n^2, C(n,2))`.
    pub fn component_dims(n: usize) -> (usize, usize, usize) {
        let p = n * (n.saturating_sub(1)) / 2;
        (p, n * n, p)
    }
    pub fn dim(n: usize) -> usize {
        let (a, b, c) = Self::component_dims(n);
        a + b + c
    }
    /// Coordinates in the order `c`, `xi`, `pi`.
    pub fn to_vector(&self) -> Vec<Rat> {
        self.c.iter().chain(&self.xi).chain(&self.pi).cloned().collect()
    }
    pub fn from_vector(n: usize, v: &[Rat]) -> Result<HTClass> {
        let (a, b, _) = Self::component_dims(n);
        if v.len() != Self::dim(n) {
            return Err(Error::DimensionMismatch { expected: Self::dim(n), got: v.len() });
        }
        Ok(HTClass { n, c: v[..a].to_vec(), xi: v[a..a + b].to_vec(), pi: v[a + b..].to_vec() })
    }
    /// The standard basis of `HT^2`.
    pub fn basis(n: usize) -> Vec<HTClass> {
        let d = Self::dim(n);
        (0..d)
            .map(|k| {
                let mut v = vec![Rat::zero(); d];
                v[k] = Rat::one();
                Self::from_vector(n, &v).expect("length matches")
            })
            .collect()
    }
    /// Pushes a class forward along an injection of index sets `{1..n} -> {1..m}`.
    pub fn relabel(&self, m: usize, map: impl Fn(usize) -> usize) -> HTClass {
        let mut out = HTClass::zero(m);
        let tp = pairs(m);
        let pos = |a: usize, b: usize| -> (usize, Rat) {
            let (lo, hi, s) = if a < b { (a, b, 1) } else { (b, a, -1) };
            (tp.iter().position(|p| *p == (lo, hi)).expect("pair in range"), Rat::from_int(s))
        };
        for (k, (i, j)) in pairs(self.n).into_iter().enumerate() {
            let (p, s) = pos(map(i), map(j));
            out.c[p] += &(&self.c[k] * &s);
            out.pi[p] += &(&self.pi[k] * &s);
        }
        for i in 0..self.n {
            for j in 0..self.n {
                out.xi[map(i) * m + map(j)] += &self.xi[i * self.n + j];
            }
        }
        out
    }
}

/// `Theta`-polynomial substituted into the Dolbeault model.
pub fn hodge_of_theta(model: &DolbeaultModel, p: &ThetaPoly<Rat>) -> Result<GradedElement<Rat>> {
    if p.n != model.n {
        return Err(Error::DimensionMismatch { expected: model.n, got: p.n });
    }
    model.eval_poly(p, &model.theta())
}

/// Contraction `h _| a = c ^ a + sum xi_ij wb_j ^ (dw_i _| a) + sum pi_ij dw_i _| dw_j _| a`,
/// with `dw_i _| w_j = delta_ij` acting from the left.
pub fn ht_contract(model: &DolbeaultModel, h: &HTClass, a: &GradedElement<Rat>) -> Result<GradedElement<Rat>> {
    if h.n != model.n {
        return Err(Error::DimensionMismatch { expected: model.n, got: h.n });
    }
    a.same_basis(&model.one())?;
    let n = model.n;
    let mut out = GradedElement::zero(&model.basis, ());
    for (k, (i, j)) in pairs(n).into_iter().enumerate() {
        if !h.c[k].is_zero() {
            out.add_assign(&a.wedge_gen(model.wb(j + 1)).wedge_gen(model.wb(i + 1)).scale(&h.c[k]));
        }
        if !h.pi[k].is_zero() {
            out.add_assign(&a.contract_gen(model.w(j + 1)).contract_gen(model.w(i + 1)).scale(&h.pi[k]));
        }
    }
    for i in 0..n {
        for j in 0..n {
            let x = &h.xi[i * n + j];
            if !x.is_zero() {
                out.add_assign(&a.contract_gen(model.w(i + 1)).wedge_gen(model.wb(j + 1)).scale(x));
            }
        }
    }
    Ok(out)
}

/// The matrix of `h -> h _| ch` from `HT^2` (columns) to `H*(X)` (rows, all monomials).
pub fn contraction_matrix(model: &DolbeaultModel, ch: &GradedElement<Rat>) -> Result<Matrix<Rat>> {
    let mons = multi_indices(2 * model.n, |_| true);
    let cols: Vec<Vec<Rat>> =
        HTClass::basis(model.n).iter().map(|h| Ok(ht_contract(model, h, ch)?.to_vector(&mons))).collect::<Result<_>>()?;
    Ok(Matrix::from_cols(&cols, mons.len(), ()))
}

/// Rank and kernel of the contraction `HT^2 -> H*` against a class.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AnnihilatorReport {
    pub n: usize,
    pub ht_dim: usize,
    pub rank: usize,
    pub kernel_dim: usize,
    pub kernel: Vec<HTClass>,
}

fn annihilator_of(model: &DolbeaultModel, ch: &GradedElement<Rat>) -> Result<AnnihilatorReport> {
    let m = contraction_matrix(model, ch)?;
    let kernel: Vec<HTClass> =
        m.kernel().iter().map(|v| HTClass::from_vector(model.n, v)).collect::<Result<_>>()?;
    let rank = m.rank();
    Ok(AnnihilatorReport { n: model.n, ht_dim: m.cols, rank, kernel_dim: kernel.len(), kernel })
}

/// The annihilator of `hodge_of_theta(ch)` in `HT^2(X)`.
pub fn annihilator_kernel(ch: &ThetaPoly<Rat>) -> Result<AnnihilatorReport> {
    if ch.n == 0 || ch.n > 4 {
        return Err(Error::UnsupportedRank(ch.n));
    }
    let model = DolbeaultModel::new(ch.n)?;
    annihilator_of(&model, &hodge_of_theta(&model, ch)?)
}

/// The part of the contraction landing in `H^{0,2} + H^{1,3}`, in row blocks
/// `(H^{0,2}, H^{1,3})` and column blocks `(c, xi, pi)`.
pub fn obstruction_block_matrix(ch: &ThetaPoly<Rat>) -> Result<Matrix<Rat>> {
    let model = DolbeaultModel::new(ch.n)?;
    let a = hodge_of_theta(&model, ch)?;
    let mut targets = model.monomials_of_type(0, 2);
    targets.extend(model.monomials_of_type(1, 3));
    let cols: Vec<Vec<Rat>> =
        HTClass::basis(model.n).iter().map(|h| Ok(ht_contract(&model, h, &a)?.to_vector(&targets))).collect::<Result<_>>()?;
    Ok(Matrix::from_cols(&cols, targets.len(), ()))
}

/// The annihilator of `ch_1 [x] ch_2` in `HT^2(X x X)` compared with
/// `ker_1 (x) H^0(O) + H^0(O) (x) ker_2`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProductAnnihilator {
    pub ht_dim: usize,
    pub kernel_dim: usize,
    pub factor_kernel_dims: (usize, usize),
    /// The annihilator equals the sum of the two pulled-back factor annihilators.
    pub decomposition_holds: bool,
    /// One of the classes is zero, so the annihilator is everything.
    pub degenerate: bool,
}

pub fn product_annihilator(ch1: &ThetaPoly<Rat>, ch2: &ThetaPoly<Rat>) -> Result<ProductAnnihilator> {
    let n = ch1.n;
    if ch2.n != n {
        return Err(Error::DimensionMismatch { expected: n, got: ch2.n });
    }
    let prod = DolbeaultModel::new(2 * n)?;
    // first factor: w_1..w_n, second factor: w_{n+1}..w_{2n}
    let a = prod.eval_poly(ch1, &prod.partial_theta(1..=n))?;
    let b = prod.eval_poly(ch2, &prod.partial_theta(n + 1..=2 * n))?;
    let box_product = wedge(&a, &b)?;
    let report = annihilator_of(&prod, &box_product)?;
    let k1 = annihilator_kernel(ch1)?;
    let k2 = annihilator_kernel(ch2)?;
    let mut pulled: Vec<Vec<Rat>> = k1.kernel.iter().map(|h| h.relabel(2 * n, |i| i).to_vector()).collect();
    pulled.extend(k2.kernel.iter().map(|h| h.relabel(2 * n, |i| i + n).to_vector()));
    let rows: Vec<Vec<Rat>> = report.kernel.iter().map(|h| h.to_vector()).collect();
    let r_sum = rank_of_rows(&pulled, ());
    let mut both = rows.clone();
    both.extend(pulled.iter().cloned());
    let decomposition_holds = r_sum == rows.len() && rank_of_rows(&both, ()) == rows.len();
    Ok(ProductAnnihilator {
        ht_dim: report.ht_dim,
        kernel_dim: report.kernel_dim,
        factor_kernel_dims: (k1.kernel_dim, k2.kernel_dim),
        decomposition_holds,
        degenerate: box_product.is_zero(),
    })
}
