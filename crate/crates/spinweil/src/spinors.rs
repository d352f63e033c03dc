//! Pure spinors and maximal isotropic subspaces, infinitesimal stabilizers,
//! secant planes through a class, and the plane of Hodge-Weil classes.
//!
//! Bivectors `x ^ y` in `wedge^2 V` are stored as degree-two elements of the
//! `WedgeV` basis. Such a bivector acts on `S` by `(1/2)(m_x m_y - m_y m_x)`
//! and on `V` by `v -> (y, v) x - (x, v) y`; both are Lie algebra actions of
//! the same element of `spin(V)`.

use crate::error::{Error, Result};
use crate::exterior::{derivation_map, multi_indices, wedge, wedge_power_map, GradedBasis, GradedElement, MultiIndex};
use crate::clifford::{lie_action_on_v, m_generator, m_vector};
use crate::igusa::igusa_j;
use crate::lattice::{intersect, is_isotropic, pair_v, LatticeV, Subspace};
use crate::linalg::Matrix;
use crate::scalars::{square_free_part, QuadExt, Rat, Scalar};
use std::collections::BTreeMap;

/// Half the number of generators of a spinor.
fn spinor_n<T: Scalar>(w: &GradedElement<T>) -> Result<usize> {
    if w.rank() % 2 == 1 || w.rank() == 0 {
        return Err(Error::DimensionMismatch { expected: 2, got: w.rank() });
    }
    Ok(w.rank() / 2)
}

/// Matrix whose column `j` is the coefficient vector of `f(j)` in the order of `rows`.
fn columns_matrix<T: Scalar>(
    rows: &[MultiIndex],
    cols: usize,
    ctx: T::Ctx,
    f: impl Fn(usize) -> Result<GradedElement<T>>,
) -> Result<Matrix<T>> {
    let pos: BTreeMap<MultiIndex, usize> = rows.iter().enumerate().map(|(i, m)| (*m, i)).collect();
    let mut m = Matrix::zeros(rows.len(), cols, ctx);
    for j in 0..cols {
        for (k, c) in &f(j)?.terms {
            let i = *pos.get(k).ok_or_else(|| Error::Invalid("image leaves the target space".into()))?;
            m.set(i, j, c.clone());
        }
    }
    Ok(m)
}

/// The kernel of `v -> m_v(w)` on `V`.
pub fn isotropic_of_spinor<T: Scalar>(w: &GradedElement<T>) -> Result<Subspace<T>> {
    let n = spinor_n(w)?;
    let lat = LatticeV::new(n);
    let rows = multi_indices(2 * n, |_| true);
    let m = columns_matrix(&rows, lat.dim(), w.ctx, |p| Ok(m_generator(lat, p, w)))?;
    crate::lattice::kernel_of(lat, &m)
}

/// Whether a parity-homogeneous spinor is pure.
pub fn is_pure<T: Scalar>(w: &GradedElement<T>) -> Result<bool> {
    if !w.is_even() && !w.is_odd() {
        return Err(Error::NotParityHomogeneous);
    }
    if w.is_zero() {
        return Ok(false);
    }
    Ok(isotropic_of_spinor(w)?.dim() == w.rank())
}

/// Scales a nonzero element so that its first coefficient in degree-sorted
/// order is `1`.
pub fn normalize_line<T: Scalar>(w: &GradedElement<T>) -> GradedElement<T> {
    let first = w.terms.iter().min_by_key(|(k, _)| (k.degree(), k.0)).map(|(_, c)| c.clone());
    match first.and_then(|c| c.inverse()) {
        Some(inv) => w.scale(&inv),
        None => w.clone(),
    }
}

/// Whether two nonzero elements span the same line.
pub fn same_line<T: Scalar>(a: &GradedElement<T>, b: &GradedElement<T>) -> bool {
    !a.is_zero() && !b.is_zero() && normalize_line(a) == normalize_line(b)
}

/// The pure spinor line `{s : m_v(s) = 0 for all v in W}` of a maximal
/// isotropic subspace, normalized by [`normalize_line`].
pub fn spinor_of_isotropic<T: Scalar>(w: &Subspace<T>) -> Result<GradedElement<T>> {
    let lat = w.ambient;
    if w.dim() != 2 * lat.n || !is_isotropic(w) {
        return Err(Error::NotMaximalIsotropic);
    }
    let basis = GradedBasis::h_x(lat.n);
    let mons = multi_indices(2 * lat.n, |_| true);
    let mut stacked: Option<Matrix<T>> = None;
    for v in &w.rows {
        let m = columns_matrix(&mons, mons.len(), w.ctx, |j| {
            m_vector(lat, v, &GradedElement::monomial(&basis, w.ctx, mons[j], T::one(w.ctx)))
        })?;
        stacked = Some(match stacked {
            None => m,
            Some(s) => s.vstack(&m)?,
        });
    }
    let k = stacked.ok_or(Error::NotMaximalIsotropic)?.kernel();
    if k.len() != 1 {
        return Err(Error::NotMaximalIsotropic);
    }
    Ok(normalize_line(&GradedElement::from_vector(&basis, w.ctx, &mons, &k[0])))
}

/// The basis monomials `e_p ^ e_q` (`p < q`) of `wedge^2 V`.
pub fn bivector_basis(n: usize) -> Vec<MultiIndex> {
    multi_indices(4 * n, |k| k == 2)
}

/// Action of a bivector of `wedge^2 V` on a spinor.
pub fn bivector_on_spinor<T: Scalar>(lat: LatticeV, xi: &GradedElement<T>, s: &GradedElement<T>) -> Result<GradedElement<T>> {
    let mut out = GradedElement::zero(&s.basis, s.ctx);
    for (k, c) in &xi.terms {
        let ij = k.indices();
        if ij.len() != 2 {
            return Err(Error::NotHomogeneous);
        }
        let (p, q) = (ij[0] - 1, ij[1] - 1);
        let pq = m_generator(lat, p, &m_generator(lat, q, s));
        let qp = m_generator(lat, q, &m_generator(lat, p, s));
        out.add_assign(&pq.sub(&qp).scale(&c.scale_rat(&Rat::new(1, 2))));
    }
    Ok(out)
}

/// Matrix of the action of a bivector on `V` (columns are images of basis vectors).
pub fn bivector_matrix<T: Scalar>(lat: LatticeV, xi: &GradedElement<T>) -> Result<Matrix<T>> {
    let dim = lat.dim();
    let mut m: Matrix<T> = Matrix::zeros(dim, dim, xi.ctx);
    for (k, c) in &xi.terms {
        let ij = k.indices();
        if ij.len() != 2 {
            return Err(Error::NotHomogeneous);
        }
        let x = lat.basis_vector::<T>(ij[0] - 1, xi.ctx);
        let y = lat.basis_vector::<T>(ij[1] - 1, xi.ctx);
        for j in 0..dim {
            let img = lie_action_on_v(lat, &x, &y, &lat.basis_vector(j, xi.ctx))?;
            for (i, v) in img.iter().enumerate() {
                if !v.is_zero() {
                    m.set(i, j, m.get(i, j).plus(&v.times(c)));
                }
            }
        }
    }
    Ok(m)
}

/// Action of a bivector on `wedge^* V` as the derivation extending its action on `V`.
pub fn bivector_on_wedge<T: Scalar>(lat: LatticeV, xi: &GradedElement<T>, x: &GradedElement<T>) -> Result<GradedElement<T>> {
    let m = bivector_matrix(lat, xi)?;
    let cols: Vec<Vec<T>> = (0..lat.dim()).map(|j| m.col(j)).collect();
    derivation_map(&cols, x)
}

/// Basis of the bivectors annihilating every given spinor.
pub fn joint_stabilizer_lie<T: Scalar>(ws: &[GradedElement<T>]) -> Result<Vec<GradedElement<T>>> {
    let first = ws.first().ok_or_else(|| Error::Invalid("no spinors given".into()))?;
    let n = spinor_n(first)?;
    let lat = LatticeV::new(n);
    let vb = GradedBasis::wedge_v(n);
    let bivs = bivector_basis(n);
    let rows = multi_indices(2 * n, |_| true);
    let mut stacked: Option<Matrix<T>> = None;
    for w in ws {
        let m = columns_matrix(&rows, bivs.len(), w.ctx, |j| {
            bivector_on_spinor(lat, &GradedElement::monomial(&vb, w.ctx, bivs[j], T::one(w.ctx)), w)
        })?;
        stacked = Some(match stacked {
            None => m,
            Some(s) => s.vstack(&m)?,
        });
    }
    let k = stacked.expect("nonempty").kernel();
    Ok(k.iter().map(|v| GradedElement::from_vector(&vb, first.ctx, &bivs, v)).collect())
}

/// Basis of `{xi in wedge^2 V : xi . w = 0}`.
pub fn stabilizer_lie<T: Scalar>(w: &GradedElement<T>) -> Result<Vec<GradedElement<T>>> {
    joint_stabilizer_lie(std::slice::from_ref(w))
}

/// The common kernel of the given bivectors acting on the spinors of the
/// given parity (`even = true` for `S^+`).
pub fn joint_kernel_on_spinors<T: Scalar>(n: usize, ctx: T::Ctx, bivs: &[GradedElement<T>], even: bool) -> Result<Vec<GradedElement<T>>> {
    let lat = LatticeV::new(n);
    let basis = GradedBasis::h_x(n);
    let half = multi_indices(2 * n, |k| (k % 2 == 0) == even);
    let all = multi_indices(2 * n, |_| true);
    let mut m: Matrix<T> = Matrix::zeros(0, half.len(), ctx);
    for xi in bivs {
        let block = columns_matrix(&all, half.len(), ctx, |j| {
            bivector_on_spinor(lat, xi, &GradedElement::monomial(&basis, ctx, half[j], T::one(ctx)))
        })?;
        m = m.vstack(&block)?;
        m.rref_in_place();
        let r = m.rank();
        m = Matrix::from_rows(&m.to_rows()[..r], ctx);
        if m.rows == 0 {
            m = Matrix::zeros(0, half.len(), ctx);
        }
    }
    let k = if m.rows == 0 {
        (0..half.len()).map(|j| (0..half.len()).map(|i| if i == j { T::one(ctx) } else { T::zero(ctx) }).collect()).collect()
    } else {
        m.kernel()
    };
    Ok(k.iter().map(|v| GradedElement::from_vector(&basis, ctx, &half, v)).collect())
}

/// A rational plane in `S^+` through two conjugate pure spinors.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct SecantData {
    pub n: usize,
    /// Two rational generators of the plane.
    pub plane: [GradedElement<Rat>; 2],
    /// `d > 0` with the pure spinors defined over `K = Q(sqrt(-d))`, or `-1`
    /// when both pure spinors are rational.
    pub d: i64,
    /// The pure spinor lines, conjugate to each other.
    pub lines: [GradedElement<QuadExt>; 2],
    /// The maximal isotropic subspaces of the two lines.
    pub isotropic: [Subspace<QuadExt>; 2],
}

impl SecantData {
    /// The parameter of the scalar field holding the lines.
    pub fn field_ctx(&self) -> u64 {
        if self.d > 0 {
            self.d as u64
        } else {
            1
        }
    }
    /// Whether both pure spinors are rational (no imaginary quadratic field).
    pub fn is_split(&self) -> bool {
        self.d < 0
    }
    /// The same secant with the two pure spinors exchanged.
    pub fn swapped(&self) -> SecantData {
        let mut s = self.clone();
        s.lines.swap(0, 1);
        s.isotropic.swap(0, 1);
        s
    }
    /// Assembles the data from the plane and one pure spinor over `K`.
    pub fn from_line(n: usize, plane: [GradedElement<Rat>; 2], d: i64, l1: GradedElement<QuadExt>) -> Result<SecantData> {
        let l1 = normalize_line(&l1);
        let l2 = normalize_line(&l1.conjugate());
        let w1 = isotropic_of_spinor(&l1)?;
        let w2 = isotropic_of_spinor(&l2)?;
        let s = SecantData { n, plane, d, lines: [l1, l2], isotropic: [w1, w2] };
        s.validate()?;
        Ok(s)
    }
    /// Checks the structural invariants.
    pub fn validate(&self) -> Result<()> {
        let n = self.n;
        let [w1, w2] = &self.isotropic;
        for (l, w) in self.lines.iter().zip(&self.isotropic) {
            if !is_isotropic(w) || w.dim() != 2 * n || !l.is_even() {
                return Err(Error::NotMaximalIsotropic);
            }
        }
        if !same_line(&self.lines[0].conjugate(), &self.lines[1]) || w1.conjugate() != *w2 {
            return Err(Error::Inconsistent);
        }
        if intersect(w1, w2)?.dim() != 0 {
            return Err(Error::Degenerate);
        }
        let ctx = self.field_ctx();
        let p: Vec<GradedElement<QuadExt>> = self.plane.iter().map(|x| x.convert(ctx, |c| QuadExt::rational(ctx, c.clone()))).collect();
        let idx = multi_indices(2 * n, |_| true);
        let rows: Vec<Vec<QuadExt>> = p.iter().map(|x| x.to_vector(&idx)).collect();
        for l in &self.lines {
            if !crate::linalg::in_span(&rows, &l.to_vector(&idx), ctx) {
                return Err(Error::Inconsistent);
            }
        }
        if crate::linalg::rank_of_rows(&rows, ctx) != 2 {
            return Err(Error::Degenerate);
        }
        Ok(())
    }
}

/// `exp(c Theta)` for the principal polarization, as a spinor over `Q(sqrt(-d))`.
pub fn exp_theta(n: usize, c: &QuadExt) -> Result<GradedElement<QuadExt>> {
    let th = crate::lattice::standard_theta::<QuadExt>(n, c.d);
    th.scale(c).wedge_exp()
}

/// The secant through `exp(sqrt(-d) Theta)` and its conjugate: its rational
/// plane is spanned by the real and imaginary parts.
pub fn standard_secant(n: usize, d: u64) -> Result<SecantData> {
    if d == 0 {
        return Err(Error::Invalid("d must be positive".into()));
    }
    let l1 = exp_theta(n, &QuadExt::omega(d))?;
    let re = l1.convert((), |c| c.re.clone());
    let im = l1.convert((), |c| c.im.clone());
    SecantData::from_line(n, [re, im], d as i64, l1)
}

/// Coefficients `a0..a4` of the quartic `t -> J(w + t u)`.
fn quartic_along(w: &GradedElement<Rat>, u: &GradedElement<Rat>) -> Result<Vec<Rat>> {
    let ts: Vec<Rat> = (0..5).map(Rat::from_int).collect();
    let vals: Vec<Rat> = ts.iter().map(|t| igusa_j(&w.add(&u.scale_rat(t)))).collect::<Result<_>>()?;
    let rows: Vec<Vec<Rat>> = ts.iter().map(|t| (0..5).map(|k| t.pow(k)).collect()).collect();
    Matrix::from_rows(&rows, ()).solve(&vals)
}

/// The unique plane through `w` meeting the spinor variety in two points,
/// for an even class on an abelian threefold off the quartic `J = 0`.
pub fn secant_plane(w: &GradedElement<Rat>) -> Result<SecantData> {
    let n = spinor_n(w)?;
    if n != 3 {
        return Err(Error::UnsupportedRank(n));
    }
    if igusa_j(w)?.is_zero() {
        return Err(Error::TangentialCase);
    }
    let stab = stabilizer_lie(w)?;
    let plane = joint_kernel_on_spinors(n, (), &stab, true)?;
    if plane.len() != 2 {
        return Err(Error::Inconsistent);
    }
    let idx = multi_indices(2 * n, |_| true);
    let wv = w.to_vector(&idx);
    // a second generator of the plane, shifted by w until J does not vanish on it
    let mut u = plane.iter().find(|p| !crate::linalg::in_span(&[wv.clone()], &p.to_vector(&idx), ())).cloned().ok_or(Error::Inconsistent)?;
    let mut k = 0i64;
    while igusa_j(&u)?.is_zero() {
        k += 1;
        u = u.add(w);
        if k > 8 {
            return Err(Error::Inconsistent);
        }
    }
    let a = quartic_along(w, &u)?;
    let lead = a[4].recip()?;
    let monic: Vec<Rat> = a.iter().map(|c| c * &lead).collect();
    // monic quartic = (t^2 + b t + c)^2 along a secant line
    let b = &monic[3] / &Rat::from_int(2);
    let c = &(&monic[2] - &(&b * &b)) / &Rat::from_int(2);
    if &(&b * &c) * &Rat::from_int(2) != monic[1] || &c * &c != monic[0] {
        return Err(Error::Inconsistent);
    }
    let disc = &(&b * &b) - &(&c * &Rat::from_int(4));
    let wq = |x: &GradedElement<Rat>, ctx: u64| x.convert(ctx, |v| QuadExt::rational(ctx, v.clone()));
    let plane_gens = [w.clone(), u.clone()];
    match disc.signum() {
        0 => Err(Error::TangentialCase),
        -1 => {
            let (r, s) = rational_sqrt_split(&-&disc)?;
            // t = (-b + s sqrt(-r)) / 2
            let t = QuadExt::new(r, -&b / &Rat::from_int(2), &s / &Rat::from_int(2));
            let l1 = wq(w, r).add(&wq(&u, r).scale(&t));
            SecantData::from_line(n, plane_gens, r as i64, l1)
        }
        _ => {
            let s = disc.sqrt_exact().ok_or(Error::NoCmField)?;
            let t = &(-&b + &s) / &Rat::from_int(2);
            let l1 = wq(&w.add(&u.scale_rat(&t)), 1);
            let t2 = &(-&b - &s) / &Rat::from_int(2);
            let l2 = wq(&w.add(&u.scale_rat(&t2)), 1);
            let (l1, l2) = (normalize_line(&l1), normalize_line(&l2));
            let data = SecantData {
                n,
                plane: plane_gens,
                d: -1,
                isotropic: [isotropic_of_spinor(&l1)?, isotropic_of_spinor(&l2)?],
                lines: [l1, l2],
            };
            if data.isotropic.iter().any(|x| x.dim() != 2 * n) {
                return Err(Error::Inconsistent);
            }
            Ok(data)
        }
    }
}

/// Writes a positive rational `m` as `s^2 r` with `r` a square-free integer
/// and `s` a positive rational.
pub fn rational_sqrt_split(m: &Rat) -> Result<(u64, Rat)> {
    if m.signum() <= 0 {
        return Err(Error::Invalid("expected a positive rational".into()));
    }
    // m = p/q = (p q) / q^2
    let pq = m.numer() * m.denom();
    let pq: u64 = pq.try_into().map_err(|_| Error::Invalid("discriminant too large".into()))?;
    let (r, s) = square_free_part(pq);
    Ok((r, &Rat::from_int(s as i64) / &Rat::from_bigint(m.denom().clone())))
}

/// The Gram matrix of the Mukai pairing on the two plane generators.
pub fn plane_mukai_gram(plane: &[GradedElement<Rat>; 2]) -> Result<Matrix<Rat>> {
    let mut g = Matrix::zeros(2, 2, ());
    for i in 0..2 {
        for j in 0..2 {
            g.set(i, j, crate::exterior::mukai_pairing(&plane[i], &plane[j])?);
        }
    }
    Ok(g)
}

/// The rational plane underlying `wedge^{2n} W_1 + wedge^{2n} W_2` inside
/// `wedge^{2n} V`, after checking that a complex structure `I` on `V`
/// preserves `W_1` with trace zero there (equivalently, `W_1` meets `V^{1,0}`
/// in dimension `n`) and that both generators are fixed by `wedge^{2n} I`.
pub fn hodge_weil_plane(s: &SecantData, i: &Matrix<Rat>) -> Result<[GradedElement<Rat>; 2]> {
    if s.is_split() {
        return Err(Error::NoCmField);
    }
    let n = s.n;
    let lat = LatticeV::new(n);
    let dim = lat.dim();
    if i.rows != dim || i.cols != dim {
        return Err(Error::DimensionMismatch { expected: dim, got: i.rows });
    }
    if i.mul(i)? != Matrix::identity(dim, ()).scale(&-Rat::one()) {
        return Err(Error::Invalid("I^2 != -1".into()));
    }
    let ctx = s.field_ctx();
    let ik = i.map(ctx, |c| QuadExt::rational(ctx, c.clone()));
    let w1 = &s.isotropic[0];
    let pivots: Vec<usize> = w1.rows.iter().map(|r| r.iter().position(|c| !c.is_zero()).expect("nonzero row")).collect();
    let mut trace = QuadExt::zero(ctx);
    for (j, v) in w1.rows.iter().enumerate() {
        let iv = ik.mul_vec(v)?;
        if !w1.contains(&iv) {
            return Err(Error::EigenspaceCondition("I does not preserve W1".into()));
        }
        // coordinates in a reduced echelon basis are the pivot entries
        trace = trace.plus(&iv[pivots[j]]);
    }
    if !trace.is_zero() {
        return Err(Error::EigenspaceCondition("W1 does not meet V^{1,0} in dimension n".into()));
    }
    let top = normalize_line(&top_exterior_power(w1)?);
    let a = top.convert((), |c| c.re.clone());
    let b = top.convert((), |c| c.im.clone());
    let cols: Vec<Vec<Rat>> = (0..dim).map(|j| i.col(j)).collect();
    for x in [&a, &b] {
        if wedge_power_map(&cols, x)? != *x {
            return Err(Error::EigenspaceCondition("class not fixed by the complex structure".into()));
        }
    }
    Ok([a, b])
}

/// The wedge of an echelon basis of a subspace, an element of `wedge^{dim} V`.
pub fn top_exterior_power<T: Scalar>(w: &Subspace<T>) -> Result<GradedElement<T>> {
    let vb = GradedBasis::wedge_v(w.ambient.n);
    let mut top = GradedElement::one(&vb, w.ctx);
    for v in &w.rows {
        let vec = GradedElement::from_terms(&vb, w.ctx, v.iter().enumerate().map(|(p, c)| (MultiIndex(1 << p), c.clone())));
        top = wedge(&top, &vec)?;
    }
    Ok(top)
}

/// Basis of the degree-`k` classes in `wedge^* V` annihilated by every given bivector.
pub fn invariant_classes<T: Scalar>(n: usize, ctx: T::Ctx, bivs: &[GradedElement<T>], k: usize) -> Result<Vec<GradedElement<T>>> {
    let lat = LatticeV::new(n);
    let vb = GradedBasis::wedge_v(n);
    let idx = multi_indices(4 * n, |j| j == k);
    let mut m: Matrix<T> = Matrix::zeros(0, idx.len(), ctx);
    for xi in bivs {
        let block = columns_matrix(&idx, idx.len(), ctx, |j| {
            bivector_on_wedge(lat, xi, &GradedElement::monomial(&vb, ctx, idx[j], T::one(ctx)))
        })?;
        m = m.vstack(&block)?;
        m.rref_in_place();
        let r = m.rank();
        m = if r == 0 { Matrix::zeros(0, idx.len(), ctx) } else { Matrix::from_rows(&m.to_rows()[..r], ctx) };
    }
    let ker: Vec<Vec<T>> = if m.rows == 0 {
        (0..idx.len()).map(|j| (0..idx.len()).map(|i| if i == j { T::one(ctx) } else { T::zero(ctx) }).collect()).collect()
    } else {
        m.kernel()
    };
    Ok(ker.iter().map(|v| GradedElement::from_vector(&vb, ctx, &idx, v)).collect())
}

/// `(v, w)` for two vectors of `V`; a convenience re-export for callers of this module.
pub fn pairing<T: Scalar>(lat: LatticeV, v: &[T], w: &[T]) -> Result<T> {
    pair_v(lat, v, w)
}
