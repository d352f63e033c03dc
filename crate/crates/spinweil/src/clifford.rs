//! The Clifford algebra `C(V)` stored as normal-ordered words, the spin action
//! `m` on `S = H*(X)`, the antiautomorphism `tau`, the standard representation
//! `rho`, and certified spin elements.
//!
//! A word is a bitset over the `4n` coordinate positions of `V` (`e1..e2n`
//! then `f1..f2n`); the normal order lists its generators by increasing
//! position. The defining relation is `v w + w v = (v, w)_V`, so `v^2 = (v,v)/2`.

use crate::error::{Error, Result};
use crate::exterior::{add_signed, add_term, count_above, parity_sign, tau_involution, GradedBasis, GradedElement, MultiIndex};
use crate::lattice::{pair_v, LatticeV};
use crate::linalg::Matrix;
use crate::scalars::{Rat, Scalar};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::fmt;

/// An element of `C(V)` as a sparse sum of normal-ordered words.
#[derive(Clone, PartialEq, Eq)]
pub struct CliffordElement<T: Scalar> {
    pub lat: LatticeV,
    pub ctx: T::Ctx,
    pub terms: BTreeMap<MultiIndex, T>,
}

impl<T: Scalar> fmt::Debug for CliffordElement<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self)
    }
}

impl<T: Scalar> fmt::Display for CliffordElement<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self
            .terms
            .iter()
            .map(|(w, c)| {
                let word: Vec<String> = w.indices().iter().map(|&p| self.lat.label(p - 1)).collect();
                if word.is_empty() {
                    format!("({c})")
                } else {
                    format!("({c})*{}", word.join("."))
                }
            })
            .collect();
        write!(f, "{}", parts.join(" + "))
    }
}

/// Position of the generator paired with `pos` (`e_i <-> f_i`).
fn partner(lat: LatticeV, pos: u32) -> u32 {
    let m = 2 * lat.n as u32;
    if pos < m {
        pos + m
    } else {
        pos - m
    }
}

/// Right multiplication of a normal-ordered word by one generator, written
/// into `out` with coefficient `c`.
fn right_mul_word_gen<T: Scalar>(lat: LatticeV, out: &mut BTreeMap<MultiIndex, T>, word: u32, pos: u32, c: &T) {
    let m = 2 * lat.n as u32;
    if pos >= m {
        // f_i only anticommutes with the later f's, which pair trivially with it.
        if word >> pos & 1 == 0 {
            let s = parity_sign(count_above(word, pos) as usize);
            add_signed(out, MultiIndex(word | 1 << pos), s, c);
        }
    } else {
        if word >> pos & 1 == 0 {
            let s = parity_sign(count_above(word, pos) as usize);
            add_signed(out, MultiIndex(word | 1 << pos), s, c);
        }
        let fp = partner(lat, pos);
        if word >> fp & 1 == 1 {
            let s = parity_sign(count_above(word, fp) as usize);
            add_signed(out, MultiIndex(word & !(1 << fp)), s, c);
        }
    }
}

impl<T: Scalar> CliffordElement<T> {
    pub fn zero(lat: LatticeV, ctx: T::Ctx) -> Self {
        CliffordElement { lat, ctx, terms: BTreeMap::new() }
    }
    pub fn scalar(lat: LatticeV, c: T) -> Self {
        let ctx = c.ctx();
        let mut e = Self::zero(lat, ctx);
        add_term(&mut e.terms, MultiIndex::EMPTY, c);
        e
    }
    pub fn one(lat: LatticeV, ctx: T::Ctx) -> Self {
        Self::scalar(lat, T::one(ctx))
    }
    /// The generator at coordinate position `pos` (0-based).
    pub fn generator(lat: LatticeV, ctx: T::Ctx, pos: usize) -> Self {
        let mut e = Self::zero(lat, ctx);
        e.terms.insert(MultiIndex(1 << pos), T::one(ctx));
        e
    }
    /// A normal-ordered word given by coordinate positions (any order, signs applied).
    pub fn word(lat: LatticeV, ctx: T::Ctx, positions: &[usize]) -> Self {
        let mut r = Self::one(lat, ctx);
        for &p in positions {
            r = r.mul_gen(p as u32);
        }
        r
    }
    /// The degree-one element of a vector in `V`.
    pub fn from_vector(lat: LatticeV, v: &[T]) -> Result<Self> {
        if v.len() != lat.dim() {
            return Err(Error::DimensionMismatch { expected: lat.dim(), got: v.len() });
        }
        let ctx = v[0].ctx();
        let mut e = Self::zero(lat, ctx);
        for (p, c) in v.iter().enumerate() {
            add_term(&mut e.terms, MultiIndex(1 << p), c.clone());
        }
        Ok(e)
    }
    /// Embeds an element of `H*(X)` (the e-block exterior algebra) as the
    /// corresponding product of e-generators.
    pub fn from_e_form(lat: LatticeV, s: &GradedElement<T>) -> Result<Self> {
        if s.rank() != 2 * lat.n {
            return Err(Error::DimensionMismatch { expected: 2 * lat.n, got: s.rank() });
        }
        Ok(CliffordElement { lat, ctx: s.ctx, terms: s.terms.clone() })
    }
    /// Embeds an element of `H*(X^)` (the f-block exterior algebra).
    pub fn from_f_form(lat: LatticeV, s: &GradedElement<T>) -> Result<Self> {
        if s.rank() != 2 * lat.n {
            return Err(Error::DimensionMismatch { expected: 2 * lat.n, got: s.rank() });
        }
        let sh = 2 * lat.n;
        Ok(CliffordElement { lat, ctx: s.ctx, terms: s.terms.iter().map(|(k, c)| (MultiIndex(k.0 << sh), c.clone())).collect() })
    }
    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }
    pub fn check(&self, o: &Self) -> Result<()> {
        if self.lat != o.lat {
            return Err(Error::Invalid("Clifford elements over different lattices".into()));
        }
        Ok(())
    }
    pub fn add(&self, o: &Self) -> Self {
        self.check(o).expect("Clifford ambient mismatch");
        let mut r = self.clone();
        for (w, c) in &o.terms {
            add_term(&mut r.terms, *w, c.clone());
        }
        r
    }
    pub fn sub(&self, o: &Self) -> Self {
        self.add(&o.scale(&T::from_i64(self.ctx, -1)))
    }
    pub fn scale(&self, s: &T) -> Self {
        let mut r = Self::zero(self.lat, self.ctx);
        for (w, c) in &self.terms {
            add_term(&mut r.terms, *w, c.times(s));
        }
        r
    }
    /// Right multiplication by the generator at position `pos`.
    pub fn mul_gen(&self, pos: u32) -> Self {
        let mut out = BTreeMap::new();
        for (w, c) in &self.terms {
            right_mul_word_gen(self.lat, &mut out, w.0, pos, c);
        }
        CliffordElement { lat: self.lat, ctx: self.ctx, terms: out }
    }
    pub fn is_even(&self) -> bool {
        self.terms.keys().all(|w| w.degree() % 2 == 0)
    }
    pub fn is_odd(&self) -> bool {
        self.terms.keys().all(|w| w.degree() % 2 == 1)
    }
    /// The scalar value when the element is a multiple of `1`.
    pub fn as_scalar(&self) -> Option<T> {
        match self.terms.len() {
            0 => Some(T::zero(self.ctx)),
            1 => self.terms.get(&MultiIndex::EMPTY).cloned(),
            _ => None,
        }
    }
    /// The vector when the element lies in `V` (degree one only).
    pub fn as_vector(&self) -> Option<Vec<T>> {
        let mut v = vec![T::zero(self.ctx); self.lat.dim()];
        for (w, c) in &self.terms {
            if w.degree() != 1 {
                return None;
            }
            v[w.0.trailing_zeros() as usize] = c.clone();
        }
        Some(v)
    }
    pub fn conjugate_coeffs(&self) -> Self {
        let mut r = Self::zero(self.lat, self.ctx);
        for (w, c) in &self.terms {
            r.terms.insert(*w, c.conjugate());
        }
        r
    }
}

/// Normal-ordered product.
pub fn cl_mul<T: Scalar>(a: &CliffordElement<T>, b: &CliffordElement<T>) -> Result<CliffordElement<T>> {
    a.check(b)?;
    let mut out = CliffordElement::zero(a.lat, a.ctx);
    for (wb, cb) in &b.terms {
        let mut cur = a.scale(cb);
        let mut rest = wb.0;
        while rest != 0 {
            let p = rest.trailing_zeros();
            cur = cur.mul_gen(p);
            rest &= rest - 1;
            if cur.is_zero() {
                break;
            }
        }
        for (w, c) in cur.terms {
            add_term(&mut out.terms, w, c);
        }
    }
    Ok(out)
}

/// The main antiautomorphism reversing every word.
pub fn cl_tau<T: Scalar>(a: &CliffordElement<T>) -> CliffordElement<T> {
    let mut out = CliffordElement::zero(a.lat, a.ctx);
    for (w, c) in &a.terms {
        let mut cur = CliffordElement::scalar(a.lat, c.clone());
        let mut rest = w.0;
        // Reversed order: highest position first.
        while rest != 0 {
            let p = 31 - rest.leading_zeros();
            cur = cur.mul_gen(p);
            rest &= !(1 << p);
        }
        for (w2, c2) in cur.terms {
            add_term(&mut out.terms, w2, c2);
        }
    }
    out
}

/// The main involution: identity on even words, minus one on odd words.
pub fn cl_alpha<T: Scalar>(a: &CliffordElement<T>) -> CliffordElement<T> {
    let mut r = CliffordElement::zero(a.lat, a.ctx);
    for (w, c) in &a.terms {
        r.terms.insert(*w, if w.degree() % 2 == 0 { c.clone() } else { c.negated() });
    }
    r
}

/// Conjugation `x* = alpha(tau(x))`.
pub fn cl_star<T: Scalar>(a: &CliffordElement<T>) -> CliffordElement<T> {
    cl_alpha(&cl_tau(a))
}

/// Action of the generator at position `pos` on `S = H*(X)`: wedge for
/// e-generators, contraction for f-generators.
pub fn m_generator<T: Scalar>(lat: LatticeV, pos: usize, s: &GradedElement<T>) -> GradedElement<T> {
    let m = 2 * lat.n;
    if pos < m {
        s.wedge_gen(pos + 1)
    } else {
        s.contract_gen(pos - m + 1)
    }
}

fn check_spinor<T: Scalar>(lat: LatticeV, s: &GradedElement<T>) -> Result<()> {
    if s.rank() != 2 * lat.n {
        return Err(Error::DimensionMismatch { expected: 2 * lat.n, got: s.rank() });
    }
    Ok(())
}

/// The spin action `m_a` of a Clifford element on `S`.
pub fn m_action<T: Scalar>(a: &CliffordElement<T>, s: &GradedElement<T>) -> Result<GradedElement<T>> {
    check_spinor(a.lat, s)?;
    let mut out = GradedElement::zero(&s.basis, s.ctx);
    for (w, c) in &a.terms {
        let mut cur = s.scale(c);
        let mut rest = w.0;
        // The rightmost generator acts first.
        while rest != 0 && !cur.is_zero() {
            let p = 31 - rest.leading_zeros();
            cur = m_generator(a.lat, p as usize, &cur);
            rest &= !(1 << p);
        }
        out.add_assign(&cur);
    }
    Ok(out)
}

/// `m_v` for a vector `v` in `V`.
pub fn m_vector<T: Scalar>(lat: LatticeV, v: &[T], s: &GradedElement<T>) -> Result<GradedElement<T>> {
    check_spinor(lat, s)?;
    let mut out = GradedElement::zero(&s.basis, s.ctx);
    for (p, c) in v.iter().enumerate() {
        if !c.is_zero() {
            out.add_assign(&m_generator(lat, p, s).scale(c));
        }
    }
    Ok(out)
}

/// The infinitesimal spin action `(1/2)(m_x m_y - m_y m_x)(s)`.
pub fn lie_action<T: Scalar>(lat: LatticeV, x: &[T], y: &[T], s: &GradedElement<T>) -> Result<GradedElement<T>> {
    let xy = m_vector(lat, x, &m_vector(lat, y, s)?)?;
    let yx = m_vector(lat, y, &m_vector(lat, x, s)?)?;
    Ok(xy.sub(&yx).scale_rat(&Rat::new(1, 2)))
}

/// Infinitesimal action of the bivector `x ^ y` on `V`:
/// `v -> (y, v) x - (x, v) y`, the derivative of conjugation by `exp`.
pub fn lie_action_on_v<T: Scalar>(lat: LatticeV, x: &[T], y: &[T], v: &[T]) -> Result<Vec<T>> {
    let a = pair_v(lat, y, v)?;
    let b = pair_v(lat, x, v)?;
    Ok(x.iter().zip(y).map(|(xi, yi)| xi.times(&a).minus(&yi.times(&b))).collect())
}

/// The norm character `g tau(g)`, which must be a scalar.
pub fn norm_char<T: Scalar>(g: &CliffordElement<T>) -> Result<T> {
    let p = cl_mul(g, &cl_tau(g))?;
    p.as_scalar().ok_or_else(|| Error::NotCliffordGroup("g tau(g) is not a scalar".into()))
}

/// The standard representation `rho(g)(v) = g v g^{-1}` for an element of
/// the Clifford group, with `g^{-1} = tau(g) / N(g)`.
pub fn rho<T: Scalar>(g: &CliffordElement<T>, v: &[T]) -> Result<Vec<T>> {
    let nm = norm_char(g)?;
    let inv_n = nm.inverse().ok_or(Error::NotCliffordGroup("zero norm".into()))?;
    let ginv = cl_tau(g).scale(&inv_n);
    let x = CliffordElement::from_vector(g.lat, v)?;
    let r = cl_mul(&cl_mul(g, &x)?, &ginv)?;
    r.as_vector().ok_or_else(|| Error::NotCliffordGroup("g v g^-1 is not a vector".into()))
}

/// A certified element of `Spin(V)` over the scalar kind `T`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct SpinElement<T: Scalar> {
    pub g: CliffordElement<T>,
    /// The inverse `g* = tau(g)`.
    pub inv: CliffordElement<T>,
}

impl<T: Scalar> SpinElement<T> {
    /// Verifies evenness, `g g* = 1`, and `g V g* in V`.
    pub fn certify(g: CliffordElement<T>) -> Result<Self> {
        if !g.is_even() {
            return Err(Error::NotSpin("element is not even".into()));
        }
        let star = cl_star(&g);
        let prod = cl_mul(&g, &star)?;
        if prod != CliffordElement::one(g.lat, g.ctx) {
            return Err(Error::NotSpin("g g* != 1".into()));
        }
        for p in 0..g.lat.dim() {
            let x = CliffordElement::generator(g.lat, g.ctx, p);
            let r = cl_mul(&cl_mul(&g, &x)?, &star)?;
            if r.as_vector().is_none() {
                return Err(Error::NotSpin(format!("g {} g* is not in V", g.lat.label(p))));
            }
        }
        Ok(SpinElement { g, inv: star })
    }
    pub fn identity(lat: LatticeV, ctx: T::Ctx) -> Self {
        let one = CliffordElement::one(lat, ctx);
        SpinElement { g: one.clone(), inv: one }
    }
    pub fn lat(&self) -> LatticeV {
        self.g.lat
    }
    pub fn mul(&self, o: &Self) -> Result<Self> {
        Ok(SpinElement { g: cl_mul(&self.g, &o.g)?, inv: cl_mul(&o.inv, &self.inv)? })
    }
    pub fn inverse(&self) -> Self {
        SpinElement { g: self.inv.clone(), inv: self.g.clone() }
    }
    /// `rho_g(v) = g v g^{-1}`.
    pub fn rho(&self, v: &[T]) -> Result<Vec<T>> {
        let x = CliffordElement::from_vector(self.g.lat, v)?;
        let r = cl_mul(&cl_mul(&self.g, &x)?, &self.inv)?;
        r.as_vector().ok_or_else(|| Error::NotSpin("rho_g(v) left V".into()))
    }
    /// Matrix of `rho_g` on `V`; column `j` is the image of basis vector `j`.
    pub fn rho_matrix(&self) -> Result<Matrix<T>> {
        let lat = self.g.lat;
        let cols: Vec<Vec<T>> =
            (0..lat.dim()).map(|p| self.rho(&lat.basis_vector(p, self.g.ctx))).collect::<Result<_>>()?;
        Ok(Matrix::from_cols(&cols, lat.dim(), self.g.ctx))
    }
    /// `m_g` on `S`.
    pub fn m(&self, s: &GradedElement<T>) -> Result<GradedElement<T>> {
        m_action(&self.g, s)
    }
    /// `m_g^dagger = tau m_g tau` on `S`, with `tau` the Mukai sign involution.
    pub fn m_dagger(&self, s: &GradedElement<T>) -> Result<GradedElement<T>> {
        Ok(tau_involution(&m_action(&self.g, &tau_involution(s))?))
    }
}

/// `v1 v2` for vectors of equal norm `+-2`.
pub fn spin_from_pair<T: Scalar>(lat: LatticeV, v1: &[T], v2: &[T]) -> Result<SpinElement<T>> {
    let n1 = pair_v(lat, v1, v1)?;
    let n2 = pair_v(lat, v2, v2)?;
    let ctx = n1.ctx();
    let two = T::from_i64(ctx, 2);
    if n1 != n2 || (n1 != two && n1 != two.negated()) {
        return Err(Error::NormCondition(format!("(v1,v1)={n1}, (v2,v2)={n2}")));
    }
    let g = cl_mul(&CliffordElement::from_vector(lat, v1)?, &CliffordElement::from_vector(lat, v2)?)?;
    SpinElement::certify(g)
}

/// `exp(u)` for an even nilpotent Clifford element.
pub fn spin_exp_even_nilpotent<T: Scalar>(u: &CliffordElement<T>) -> Result<SpinElement<T>> {
    if !u.is_even() {
        return Err(Error::Invalid("exponent must be even".into()));
    }
    let mut result = CliffordElement::one(u.lat, u.ctx);
    let mut power = CliffordElement::one(u.lat, u.ctx);
    let max_steps = 4 * u.lat.n + 2;
    for k in 1..=max_steps + 1 {
        power = cl_mul(&power, u)?.scale(&T::from_rat(u.ctx, Rat::new(1, k as i64)));
        if power.is_zero() {
            return SpinElement::certify(result);
        }
        result = result.add(&power);
    }
    Err(Error::NotNilpotent)
}

/// Clifford element `sum_{i<=n} c e_i e_{i+n}` of a multiple of the principal polarization.
pub fn theta_clifford<T: Scalar>(lat: LatticeV, c: &T) -> CliffordElement<T> {
    let mut u = CliffordElement::zero(lat, c.ctx());
    for i in 1..=lat.n {
        add_term(&mut u.terms, MultiIndex((1 << lat.e(i)) | (1 << lat.e(i + lat.n))), c.clone());
    }
    u
}

/// Matrix of `m_a` on a list of spinor basis monomials (columns are images).
pub fn m_matrix<T: Scalar>(a: &CliffordElement<T>, basis: &[MultiIndex]) -> Result<Matrix<T>> {
    let hb = GradedBasis::h_x(a.lat.n);
    let pos: BTreeMap<MultiIndex, usize> = basis.iter().enumerate().map(|(i, m)| (*m, i)).collect();
    let mut mat = Matrix::zeros(basis.len(), basis.len(), a.ctx);
    for (j, b) in basis.iter().enumerate() {
        let img = m_action(a, &GradedElement::monomial(&hb, a.ctx, *b, T::one(a.ctx)))?;
        for (k, c) in &img.terms {
            let i = *pos.get(k).ok_or(Error::Invalid("image leaves the chosen spinor basis".into()))?;
            mat.set(i, j, c.clone());
        }
    }
    Ok(mat)
}

/// JSON form of one Clifford word.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WordJson<C> {
    pub word: Vec<String>,
    pub coeff: C,
}

impl<T: Scalar + Serialize> CliffordElement<T> {
    pub fn to_json_words(&self) -> Vec<WordJson<T>> {
        self.terms
            .iter()
            .map(|(w, c)| WordJson { word: w.indices().iter().map(|&p| self.lat.label(p - 1)).collect(), coeff: c.clone() })
            .collect()
    }
}

impl<T: Scalar> CliffordElement<T> {
    /// Parses JSON words such as `["e1","f3"]`; words need not be normal-ordered.
    pub fn from_json_words(lat: LatticeV, ctx: T::Ctx, words: &[WordJson<T>]) -> Result<Self> {
        let mut r = Self::zero(lat, ctx);
        for w in words {
            let mut positions = Vec::new();
            for g in &w.word {
                let (kind, num) = g.split_at(1);
                let i: usize = num.parse().map_err(|_| Error::Invalid(format!("bad generator {g}")))?;
                if i == 0 || i > 2 * lat.n {
                    return Err(Error::Invalid(format!("generator {g} out of range")));
                }
                positions.push(match kind {
                    "e" => lat.e(i),
                    "f" => lat.f(i),
                    _ => return Err(Error::Invalid(format!("bad generator {g}"))),
                });
            }
            r = r.add(&Self::word(lat, ctx, &positions).scale(&w.coeff));
        }
        Ok(r)
    }
}
