//! Weil-type structures on `V_Q` coming from an oriented secant: the action
//! `f` of `sqrt(-d)`, the alternating form `Xi(x, y) = (f x, y)`, the hermitian
//! form `H = d (x, y) + sqrt(-d) (f x, y)`, its discriminant, complex
//! structures on `V` and the symmetric form `g(x, y) = (f I x, y)`.

use crate::error::{Error, Result};
use crate::lattice::{pair_v, LatticeV};
use crate::linalg::{inertia, rank_of_rows, Matrix};
use crate::scalars::{QuadExt, Rat, Scalar};
use crate::spinors::{bivector_basis, bivector_matrix, SecantData};
use serde::{Deserialize, Serialize};

/// The action of `K = Q(sqrt(-d))` on `V_Q` for which `sqrt(-d)` acts by
/// `sqrt(-d)` on `W_1` and by `-sqrt(-d)` on `W_2`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CMStructure {
    pub secant: SecantData,
    pub d: u64,
    /// The matrix of `eta(sqrt(-d))` on the rational basis of `V`.
    pub f: Matrix<Rat>,
}

/// A complex structure on `V_R` given by a rational matrix.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ComplexStructureI {
    pub n: usize,
    /// Row-major `4n x 4n` matrix.
    pub matrix: Vec<Vec<Rat>>,
}

impl ComplexStructureI {
    /// Wraps a matrix after checking `I^2 = -1` and that `I` is an isometry.
    pub fn new(n: usize, m: &Matrix<Rat>) -> Result<ComplexStructureI> {
        let lat = LatticeV::new(n);
        let dim = lat.dim();
        if m.rows != dim || m.cols != dim {
            return Err(Error::DimensionMismatch { expected: dim, got: m.rows });
        }
        if m.mul(m)? != Matrix::identity(dim, ()).scale(&-Rat::one()) {
            return Err(Error::Invalid("I^2 != -1".into()));
        }
        let g = lat.gram();
        if m.transpose().mul(&g)?.mul(m)? != g {
            return Err(Error::Invalid("I is not an isometry of the pairing".into()));
        }
        Ok(ComplexStructureI { n, matrix: m.to_rows() })
    }
    /// The matrix of `I`.
    pub fn as_matrix(&self) -> Matrix<Rat> {
        Matrix::from_rows(&self.matrix, ())
    }
    /// The complex structure `-I`.
    pub fn negated(&self) -> ComplexStructureI {
        let m = self.as_matrix().scale(&-Rat::one());
        ComplexStructureI { n: self.n, matrix: m.to_rows() }
    }
}

/// Builds the CM structure of a secant with `d > 0` by diagonalizing over `K`.
pub fn cm_from_secant(s: &SecantData) -> Result<CMStructure> {
    if s.is_split() || s.d <= 0 {
        return Err(Error::NoCmField);
    }
    let d = s.field_ctx();
    let lat = LatticeV::new(s.n);
    let dim = lat.dim();
    let [w1, w2] = &s.isotropic;
    if w1.dim() + w2.dim() != dim {
        return Err(Error::Degenerate);
    }
    let cols: Vec<Vec<QuadExt>> = w1.rows.iter().chain(&w2.rows).cloned().collect();
    let b = Matrix::from_cols(&cols, dim, d);
    let binv = b.inverse()?;
    let om = QuadExt::omega(d);
    let mut diag = Matrix::zeros(dim, dim, d);
    for i in 0..dim {
        diag.set(i, i, if i < w1.dim() { om.clone() } else { -&om });
    }
    let fk = b.mul(&diag)?.mul(&binv)?;
    let mut f = Matrix::zeros(dim, dim, ());
    for i in 0..dim {
        for j in 0..dim {
            let c = fk.get(i, j);
            if !c.is_real() {
                return Err(Error::NotRational);
            }
            f.set(i, j, c.re.clone());
        }
    }
    let c = CMStructure { secant: s.clone(), d, f };
    c.validate()?;
    Ok(c)
}

impl CMStructure {
    /// The lattice `V`.
    pub fn lattice(&self) -> LatticeV {
        LatticeV::new(self.secant.n)
    }
    /// `f(x)`.
    pub fn apply_f(&self, x: &[Rat]) -> Result<Vec<Rat>> {
        self.f.mul_vec(x)
    }
    /// `eta(a + b sqrt(-d))` applied to `x`.
    pub fn apply_eta(&self, lambda: &QuadExt, x: &[Rat]) -> Result<Vec<Rat>> {
        let fx = self.apply_f(x)?;
        Ok(x.iter().zip(&fx).map(|(u, v)| &(&lambda.re * u) + &(&lambda.im * v)).collect())
    }
    /// Checks `f^2 = -d`, `(f x, f y) = d (x, y)` and `(f x, y) = -(x, f y)`.
    pub fn validate(&self) -> Result<()> {
        let dim = self.f.rows;
        let d = Rat::from_int(self.d as i64);
        if self.f.mul(&self.f)? != Matrix::identity(dim, ()).scale(&-&d) {
            return Err(Error::Invalid("f^2 != -d".into()));
        }
        let g = self.lattice().gram();
        if self.f.transpose().mul(&g)?.mul(&self.f)? != g.scale(&d) {
            return Err(Error::Invalid("f is not a d-similarity".into()));
        }
        if self.f.transpose().mul(&g)? != g.mul(&self.f)?.scale(&-Rat::one()) {
            return Err(Error::Invalid("f is not anti-self-dual".into()));
        }
        Ok(())
    }
}

/// `Xi(x, y) = (f x, y)`.
pub fn xi_form(c: &CMStructure, x: &[Rat], y: &[Rat]) -> Result<Rat> {
    pair_v(c.lattice(), &c.apply_f(x)?, y)
}

/// `H(x, y) = d (x, y) + sqrt(-d) (f x, y)`, sesquilinear and conjugate
/// linear in the first slot.
pub fn hermitian_h(c: &CMStructure, x: &[Rat], y: &[Rat]) -> Result<QuadExt> {
    let re = &Rat::from_int(c.d as i64) * &pair_v(c.lattice(), x, y)?;
    Ok(QuadExt::new(c.d, re, xi_form(c, x, y)?))
}

/// The Gram matrix `H(b_i, b_j)` over `K`.
pub fn hermitian_gram(c: &CMStructure, basis: &[Vec<Rat>]) -> Result<Matrix<QuadExt>> {
    let mut g = Matrix::zeros(basis.len(), basis.len(), c.d);
    for (i, x) in basis.iter().enumerate() {
        for (j, y) in basis.iter().enumerate() {
            g.set(i, j, hermitian_h(c, x, y)?);
        }
    }
    Ok(g)
}

/// Whether `2n` rational vectors form a `K`-basis of `V_Q`.
pub fn is_k_basis(c: &CMStructure, basis: &[Vec<Rat>]) -> Result<bool> {
    let n = c.secant.n;
    if basis.len() != 2 * n {
        return Ok(false);
    }
    let mut rows = basis.to_vec();
    for b in basis {
        rows.push(c.apply_f(b)?);
    }
    Ok(rank_of_rows(&rows, ()) == 4 * n)
}

/// The determinant of the hermitian Gram matrix on a `K`-basis, a rational number.
pub fn discriminant_h(c: &CMStructure, basis: &[Vec<Rat>]) -> Result<Rat> {
    if !is_k_basis(c, basis)? {
        return Err(Error::NotABasis(format!("{} vectors do not form a K-basis", basis.len())));
    }
    let det = hermitian_gram(c, basis)?.det()?;
    if !det.is_real() {
        return Err(Error::Inconsistent);
    }
    Ok(det.re)
}

/// The Gram matrix of the real part `d (x, y)` of `H` on the rational basis of `V`.
pub fn real_part_gram(c: &CMStructure) -> Matrix<Rat> {
    c.lattice().gram().scale(&Rat::from_int(c.d as i64))
}

/// The `K`-basis `f_1, ..., f_{2n}` of `V_Q` (the vectors `(0, y_i)`).
pub fn standard_k_basis(n: usize) -> Vec<Vec<Rat>> {
    let lat = LatticeV::new(n);
    (1..=2 * n).map(|i| lat.basis_vector(lat.f(i), ())).collect()
}

/// The complex structure of `E^n x E^n-dual` for the square torus `E`:
/// `e_i -> e_{i+n}`, `e_{i+n} -> -e_i`, and the same on the `f` block.
pub fn standard_complex_structure(n: usize) -> ComplexStructureI {
    let lat = LatticeV::new(n);
    let mut m = Matrix::zeros(lat.dim(), lat.dim(), ());
    for block in [0, 2 * n] {
        for i in 0..n {
            m.set(block + i + n, block + i, Rat::one());
            m.set(block + i, block + i + n, -Rat::one());
        }
    }
    ComplexStructureI::new(n, &m).expect("standard complex structure")
}

/// Sign-definiteness of a symmetric form.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Definiteness {
    Positive,
    Negative,
    Indefinite,
    Degenerate,
}

/// The Gram matrix of a symmetric form with its exact inertia.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FormReport {
    pub gram: Matrix<Rat>,
    pub inertia: (usize, usize, usize),
    pub definiteness: Definiteness,
}

/// Classifies a symmetric rational matrix by exact inertia.
pub fn form_report(gram: Matrix<Rat>) -> Result<FormReport> {
    let (p, q, z) = inertia(&gram)?;
    let definiteness = if z > 0 {
        Definiteness::Degenerate
    } else if q == 0 {
        Definiteness::Positive
    } else if p == 0 {
        Definiteness::Negative
    } else {
        Definiteness::Indefinite
    };
    Ok(FormReport { gram, inertia: (p, q, z), definiteness })
}

/// The symmetric form `g(x, y) = (f I x, y)` on the rational basis of `V`.
pub fn g_form(c: &CMStructure, i: &ComplexStructureI) -> Result<FormReport> {
    let im = i.as_matrix();
    if im.rows != c.f.rows {
        return Err(Error::DimensionMismatch { expected: c.f.rows, got: im.rows });
    }
    if im.mul(&c.f)? != c.f.mul(&im)? {
        return Err(Error::NotCommuting("I and f".into()));
    }
    let g = c.lattice().gram();
    // entry (a, b) = (f I e_a, e_b)
    let gram = c.f.mul(&im)?.transpose().mul(&g)?;
    form_report(gram)
}

/// Matrices of a basis of the special unitary algebra
/// `{xi in so(V) : xi f = f xi, tr(f xi) = 0}`.
pub fn special_unitary_basis(c: &CMStructure) -> Result<Vec<Matrix<Rat>>> {
    let lat = c.lattice();
    let vb = crate::exterior::GradedBasis::wedge_v(lat.n);
    let gens: Vec<Matrix<Rat>> = bivector_basis(lat.n)
        .into_iter()
        .map(|k| bivector_matrix(lat, &crate::exterior::GradedElement::monomial(&vb, (), k, Rat::one())))
        .collect::<Result<_>>()?;
    let mut conds: Vec<Vec<Rat>> = Vec::new();
    let comms: Vec<Matrix<Rat>> = gens.iter().map(|x| Ok(x.mul(&c.f)?.sub(&c.f.mul(x)?)?)).collect::<Result<_>>()?;
    let dim = lat.dim();
    for a in 0..dim {
        for b in 0..dim {
            conds.push(comms.iter().map(|m| m.get(a, b).clone()).collect());
        }
    }
    conds.push(gens.iter().map(|x| trace(&c.f.mul(x).expect("square"))).collect());
    kernel_combinations(&conds, &gens)
}

fn trace(m: &Matrix<Rat>) -> Rat {
    let mut t = Rat::zero();
    for i in 0..m.rows {
        t += m.get(i, i);
    }
    t
}

/// Basis of the combinations of `gens` satisfying the linear conditions.
fn kernel_combinations(conds: &[Vec<Rat>], gens: &[Matrix<Rat>]) -> Result<Vec<Matrix<Rat>>> {
    let m = Matrix::from_rows(conds, ());
    let ker = if conds.is_empty() {
        (0..gens.len()).map(|j| (0..gens.len()).map(|i| if i == j { Rat::one() } else { Rat::zero() }).collect()).collect()
    } else {
        m.kernel()
    };
    ker.iter()
        .map(|v| {
            let mut acc = Matrix::zeros(gens[0].rows, gens[0].cols, ());
            for (c, g) in v.iter().zip(gens) {
                if !c.is_zero() {
                    acc = acc.add(&g.scale(c))?;
                }
            }
            Ok(acc)
        })
        .collect()
}

/// Dimensions of the special unitary algebra of `(V, f)` and of its
/// subalgebra commuting with `I`.
pub fn centralizer_dims(c: &CMStructure, i: &ComplexStructureI) -> Result<(usize, usize)> {
    let su = special_unitary_basis(c)?;
    let im = i.as_matrix();
    let comms: Vec<Matrix<Rat>> = su.iter().map(|x| Ok(x.mul(&im)?.sub(&im.mul(x)?)?)).collect::<Result<_>>()?;
    let dim = im.rows;
    let mut conds = Vec::new();
    for a in 0..dim {
        for b in 0..dim {
            conds.push(comms.iter().map(|m| m.get(a, b).clone()).collect::<Vec<Rat>>());
        }
    }
    let inner = if su.is_empty() { 0 } else { kernel_combinations(&conds, &su)?.len() };
    Ok((su.len(), inner))
}

/// Dimensions `(p, q)` of the `+i` and `-i` eigenspaces of `I` on `W_1`,
/// computed from the trace of `I` on `W_1` (defined when `I` preserves `W_1`).
pub fn w1_hodge_dims(c: &CMStructure, i: &ComplexStructureI) -> Result<(usize, usize)> {
    let w1 = &c.secant.isotropic[0];
    let ik = i.as_matrix().map(c.d, |x| QuadExt::rational(c.d, x.clone()));
    let mut tr = QuadExt::zero(c.d);
    for row in &w1.rows {
        let iv = ik.mul_vec(row)?;
        if !w1.contains(&iv) {
            return Err(Error::EigenspaceCondition("I does not preserve W1".into()));
        }
        let p = row.iter().position(|x| !x.is_zero()).expect("nonzero row");
        tr = tr.plus(&iv[p]);
    }
    let m = w1.dim() as i64;
    // tr = i (p - q); i lies in K only for d = 1
    let diff = if tr.is_zero() {
        0
    } else if c.d == 1 && tr.re.is_zero() && tr.im.is_integer() {
        tr.im.to_i64().ok_or(Error::Inconsistent)?
    } else {
        return Err(Error::EigenspaceCondition("trace of I on W1 is not in i Z".into()));
    };
    if (m + diff) % 2 != 0 || diff.abs() > m {
        return Err(Error::Inconsistent);
    }
    Ok((((m + diff) / 2) as usize, ((m - diff) / 2) as usize))
}
