//! Sparse graded exterior algebras over labeled bases.
//!
//! A basis monomial is a subset of the generators stored as a bitset, so the
//! monomial `e_{i1} ^ ... ^ e_{ik}` with `i1 < ... < ik` is the bitset with
//! bits `i1-1, ..., ik-1` set.

use crate::error::{Error, Result};
use crate::scalars::{Rat, Scalar};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

/// Largest supported number of generators.
pub const MAX_RANK: usize = 24;

/// A strictly increasing subset of `{1..r}` encoded as a bitset.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default, Serialize, Deserialize)]
pub struct MultiIndex(pub u32);

impl MultiIndex {
    pub const EMPTY: MultiIndex = MultiIndex(0);

    /// Builds the index from 1-based generator positions, in any order.
    pub fn from_indices(idx: &[usize]) -> MultiIndex {
        let mut bits = 0u32;
        for &i in idx {
            assert!((1..=MAX_RANK).contains(&i), "generator index {i} out of range");
            bits |= 1 << (i - 1);
        }
        MultiIndex(bits)
    }
    /// The full set `{1..r}`.
    pub fn top(r: usize) -> MultiIndex {
        MultiIndex(if r == 32 { u32::MAX } else { (1u32 << r) - 1 })
    }
    pub fn degree(self) -> usize {
        self.0.count_ones() as usize
    }
    pub fn contains(self, i: usize) -> bool {
        self.0 >> (i - 1) & 1 == 1
    }
    /// 1-based positions in increasing order.
    pub fn indices(self) -> Vec<usize> {
        (0..32).filter(|b| self.0 >> b & 1 == 1).map(|b| b + 1).collect()
    }
    /// Sum of the 1-based positions.
    pub fn index_sum(self) -> usize {
        self.indices().iter().sum()
    }
    pub fn complement(self, r: usize) -> MultiIndex {
        MultiIndex(!self.0 & MultiIndex::top(r).0)
    }
    pub fn union(self, o: MultiIndex) -> MultiIndex {
        MultiIndex(self.0 | o.0)
    }
    pub fn is_disjoint(self, o: MultiIndex) -> bool {
        self.0 & o.0 == 0
    }
}

impl fmt::Debug for MultiIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.indices())
    }
}

/// `(-1)^k` as an integer.
pub fn parity_sign(k: usize) -> i64 {
    if k % 2 == 0 {
        1
    } else {
        -1
    }
}

/// Number of generators of `k` strictly above bit `b`.
pub fn count_above(k: u32, b: u32) -> u32 {
    if b >= 31 {
        0
    } else {
        (k >> (b + 1)).count_ones()
    }
}

/// Number of generators of `k` strictly below bit `b`.
pub fn count_below(k: u32, b: u32) -> u32 {
    (k & ((1u32 << b) - 1)).count_ones()
}

/// The sign `eps_{K,L}` defined by `e_K ^ e_L = eps_{K,L} e_{K u L}`.
pub fn sign_eps(k: MultiIndex, l: MultiIndex) -> i64 {
    if !k.is_disjoint(l) {
        return 0;
    }
    let mut inversions = 0u32;
    let mut rest = l.0;
    while rest != 0 {
        let b = rest.trailing_zeros();
        inversions += count_above(k.0, b);
        rest &= rest - 1;
    }
    parity_sign(inversions as usize)
}

/// The sign `(-1)^{i(i-1)/2}` of the main antiautomorphism on degree `i`.
pub fn tau_sign(i: usize) -> i64 {
    parity_sign(i * i.saturating_sub(1) / 2)
}

/// Generator labels of an exterior algebra plus the name of the ambient space.
#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct GradedBasis {
    pub name: String,
    pub labels: Vec<String>,
}

impl GradedBasis {
    pub fn new(name: impl Into<String>, labels: Vec<String>) -> Result<Arc<GradedBasis>> {
        if labels.len() > MAX_RANK {
            return Err(Error::Invalid(format!("rank {} exceeds {}", labels.len(), MAX_RANK)));
        }
        let mut seen = std::collections::BTreeSet::new();
        for l in &labels {
            if !seen.insert(l.clone()) {
                return Err(Error::Invalid(format!("duplicate generator label {l}")));
            }
        }
        Ok(Arc::new(GradedBasis { name: name.into(), labels }))
    }
    pub fn rank(&self) -> usize {
        self.labels.len()
    }
    fn numbered(prefix: &str, count: usize) -> Vec<String> {
        (1..=count).map(|i| format!("{prefix}{i}")).collect()
    }
    /// `H*(X)` of an abelian `n`-fold: generators `e1..e2n`.
    pub fn h_x(n: usize) -> Arc<GradedBasis> {
        Arc::new(GradedBasis { name: format!("S_X[n={n}]"), labels: Self::numbered("e", 2 * n) })
    }
    /// `H*(X^)` of the dual abelian variety: generators `f1..f2n`.
    pub fn h_xhat(n: usize) -> Arc<GradedBasis> {
        Arc::new(GradedBasis { name: format!("S_Xhat[n={n}]"), labels: Self::numbered("f", 2 * n) })
    }
    /// `wedge^* V` with generators `e1..e2n, f1..f2n`.
    pub fn wedge_v(n: usize) -> Arc<GradedBasis> {
        let mut labels = Self::numbered("e", 2 * n);
        labels.extend(Self::numbered("f", 2 * n));
        Arc::new(GradedBasis { name: format!("WedgeV[n={n}]"), labels })
    }
    /// `S (x) S = H*(X x X)` with generators `e1..e2n, e'1..e'2n`.
    pub fn doubled_x(n: usize) -> Arc<GradedBasis> {
        let mut labels = Self::numbered("e", 2 * n);
        labels.extend(Self::numbered("e'", 2 * n));
        Arc::new(GradedBasis { name: format!("S_X(x)S_X[n={n}]"), labels })
    }
    /// Looks up a basis by the name produced by one of the constructors.
    pub fn by_name(name: &str) -> Result<Arc<GradedBasis>> {
        let parse = |prefix: &str| -> Option<usize> {
            name.strip_prefix(prefix)?.strip_prefix("[n=")?.strip_suffix(']')?.parse().ok()
        };
        if let Some(n) = parse("S_X") {
            return Ok(Self::h_x(n));
        }
        if let Some(n) = parse("S_Xhat") {
            return Ok(Self::h_xhat(n));
        }
        if let Some(n) = parse("WedgeV") {
            return Ok(Self::wedge_v(n));
        }
        if let Some(n) = parse("S_X(x)S_X") {
            return Ok(Self::doubled_x(n));
        }
        Err(Error::Unknown(format!("basis {name}")))
    }
}

/// Adds `c` to the coefficient of `idx`, dropping the entry when it cancels.
pub fn add_term<T: Scalar>(terms: &mut BTreeMap<MultiIndex, T>, idx: MultiIndex, c: T) {
    if c.is_zero() {
        return;
    }
    match terms.entry(idx) {
        std::collections::btree_map::Entry::Vacant(v) => {
            v.insert(c);
        }
        std::collections::btree_map::Entry::Occupied(mut o) => {
            let s = o.get().plus(&c);
            if s.is_zero() {
                o.remove();
            } else {
                *o.get_mut() = s;
            }
        }
    }
}

/// Adds `sign * c` to the coefficient of `idx`.
pub fn add_signed<T: Scalar>(terms: &mut BTreeMap<MultiIndex, T>, idx: MultiIndex, sign: i64, c: &T) {
    match sign {
        0 => {}
        1 => add_term(terms, idx, c.clone()),
        -1 => add_term(terms, idx, c.negated()),
        s => add_term(terms, idx, c.scale_int(s)),
    }
}

/// A sparse element of an exterior algebra.
#[derive(Clone, PartialEq, Eq)]
pub struct GradedElement<T: Scalar> {
    pub basis: Arc<GradedBasis>,
    pub ctx: T::Ctx,
    pub terms: BTreeMap<MultiIndex, T>,
}

impl<T: Scalar> fmt::Debug for GradedElement<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self)
    }
}

impl<T: Scalar> fmt::Display for GradedElement<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (idx, c) in &self.terms {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            let word: Vec<&str> = idx.indices().iter().map(|&i| self.basis.labels[i - 1].as_str()).collect();
            if word.is_empty() {
                write!(f, "({c})")?;
            } else {
                write!(f, "({c})*{}", word.join("^"))?;
            }
        }
        Ok(())
    }
}

impl<T: Scalar> GradedElement<T> {
    pub fn zero(basis: &Arc<GradedBasis>, ctx: T::Ctx) -> Self {
        GradedElement { basis: basis.clone(), ctx, terms: BTreeMap::new() }
    }
    pub fn one(basis: &Arc<GradedBasis>, ctx: T::Ctx) -> Self {
        Self::monomial(basis, ctx, MultiIndex::EMPTY, T::one(ctx))
    }
    pub fn monomial(basis: &Arc<GradedBasis>, ctx: T::Ctx, idx: MultiIndex, c: T) -> Self {
        let mut e = Self::zero(basis, ctx);
        add_term(&mut e.terms, idx, c);
        e
    }
    /// The basis monomial with the given 1-based generator positions.
    pub fn basis_elem(basis: &Arc<GradedBasis>, ctx: T::Ctx, idx: &[usize]) -> Self {
        let mut sorted = idx.to_vec();
        sorted.sort_unstable();
        let mi = MultiIndex::from_indices(idx);
        let mut sign = 1;
        // sign of the permutation sorting `idx`
        for i in 0..idx.len() {
            for j in i + 1..idx.len() {
                if idx[i] > idx[j] {
                    sign = -sign;
                }
                if idx[i] == idx[j] {
                    return Self::zero(basis, ctx);
                }
            }
        }
        Self::monomial(basis, ctx, mi, T::from_i64(ctx, sign))
    }
    /// The top monomial `[pt]` of the algebra.
    pub fn top(basis: &Arc<GradedBasis>, ctx: T::Ctx) -> Self {
        Self::monomial(basis, ctx, MultiIndex::top(basis.rank()), T::one(ctx))
    }
    pub fn from_terms(basis: &Arc<GradedBasis>, ctx: T::Ctx, terms: impl IntoIterator<Item = (MultiIndex, T)>) -> Self {
        let mut e = Self::zero(basis, ctx);
        for (i, c) in terms {
            add_term(&mut e.terms, i, c);
        }
        e
    }
    pub fn rank(&self) -> usize {
        self.basis.rank()
    }
    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }
    pub fn coeff(&self, idx: MultiIndex) -> T {
        self.terms.get(&idx).cloned().unwrap_or_else(|| T::zero(self.ctx))
    }
    pub fn same_basis(&self, o: &Self) -> Result<()> {
        if Arc::ptr_eq(&self.basis, &o.basis) || self.basis == o.basis {
            Ok(())
        } else {
            Err(Error::BasisMismatch(self.basis.name.clone(), o.basis.name.clone()))
        }
    }
    pub fn try_add(&self, o: &Self) -> Result<Self> {
        self.same_basis(o)?;
        let mut r = self.clone();
        for (i, c) in &o.terms {
            add_term(&mut r.terms, *i, c.clone());
        }
        Ok(r)
    }
    pub fn try_sub(&self, o: &Self) -> Result<Self> {
        self.same_basis(o)?;
        let mut r = self.clone();
        for (i, c) in &o.terms {
            add_term(&mut r.terms, *i, c.negated());
        }
        Ok(r)
    }
    /// Sum, panicking on basis mismatch.
    pub fn add(&self, o: &Self) -> Self {
        self.try_add(o).expect("graded element basis mismatch")
    }
    /// Difference, panicking on basis mismatch.
    pub fn sub(&self, o: &Self) -> Self {
        self.try_sub(o).expect("graded element basis mismatch")
    }
    pub fn add_assign(&mut self, o: &Self) {
        self.same_basis(o).expect("graded element basis mismatch");
        for (i, c) in &o.terms {
            add_term(&mut self.terms, *i, c.clone());
        }
    }
    pub fn neg(&self) -> Self {
        self.map_coeffs(|c| c.negated())
    }
    pub fn scale(&self, s: &T) -> Self {
        if s.is_zero() {
            return Self::zero(&self.basis, self.ctx);
        }
        self.map_coeffs(|c| c.times(s))
    }
    pub fn scale_rat(&self, r: &Rat) -> Self {
        self.scale(&T::from_rat(self.ctx, r.clone()))
    }
    /// Applies `f` to every coefficient, dropping zeros.
    pub fn map_coeffs(&self, f: impl Fn(&T) -> T) -> Self {
        let mut r = Self::zero(&self.basis, self.ctx);
        for (i, c) in &self.terms {
            let v = f(c);
            if !v.is_zero() {
                r.terms.insert(*i, v);
            }
        }
        r
    }
    /// Changes the scalar kind coefficientwise.
    pub fn convert<U: Scalar>(&self, ctx: U::Ctx, f: impl Fn(&T) -> U) -> GradedElement<U> {
        let mut r = GradedElement::<U>::zero(&self.basis, ctx);
        for (i, c) in &self.terms {
            add_term(&mut r.terms, *i, f(c));
        }
        r
    }
    /// Galois conjugation of the coefficients.
    pub fn conjugate(&self) -> Self {
        self.map_coeffs(|c| c.conjugate())
    }
    /// Moves the element to another basis of the same rank.
    pub fn rebase(&self, basis: &Arc<GradedBasis>) -> Result<Self> {
        if basis.rank() != self.rank() {
            return Err(Error::DimensionMismatch { expected: self.rank(), got: basis.rank() });
        }
        Ok(GradedElement { basis: basis.clone(), ctx: self.ctx, terms: self.terms.clone() })
    }
    pub fn degree_part(&self, k: usize) -> Self {
        let mut r = Self::zero(&self.basis, self.ctx);
        for (i, c) in &self.terms {
            if i.degree() == k {
                r.terms.insert(*i, c.clone());
            }
        }
        r
    }
    /// The homogeneous degree when the element is nonzero and homogeneous.
    pub fn homogeneous_degree(&self) -> Option<usize> {
        let mut it = self.terms.keys().map(|i| i.degree());
        let first = it.next()?;
        it.all(|d| d == first).then_some(first)
    }
    pub fn min_degree(&self) -> Option<usize> {
        self.terms.keys().map(|i| i.degree()).min()
    }
    pub fn max_degree(&self) -> Option<usize> {
        self.terms.keys().map(|i| i.degree()).max()
    }
    /// Whether all terms have degree at least `k` (the decreasing filtration `F^k`).
    pub fn in_filtration_at_least(&self, k: usize) -> bool {
        self.terms.keys().all(|i| i.degree() >= k)
    }
    /// Whether all terms have degree at most `k`.
    pub fn in_filtration_at_most(&self, k: usize) -> bool {
        self.terms.keys().all(|i| i.degree() <= k)
    }
    pub fn is_even(&self) -> bool {
        self.terms.keys().all(|i| i.degree() % 2 == 0)
    }
    pub fn is_odd(&self) -> bool {
        self.terms.keys().all(|i| i.degree() % 2 == 1)
    }
    pub fn try_wedge(&self, o: &Self) -> Result<Self> {
        self.same_basis(o)?;
        let mut r = Self::zero(&self.basis, self.ctx);
        for (a, ca) in &self.terms {
            for (b, cb) in &o.terms {
                let s = sign_eps(*a, *b);
                if s != 0 {
                    add_signed(&mut r.terms, a.union(*b), s, &ca.times(cb));
                }
            }
        }
        Ok(r)
    }
    /// Exponential in the exterior algebra of an even element with no constant term.
    pub fn wedge_exp(&self) -> Result<Self> {
        if !self.is_even() || !self.coeff(MultiIndex::EMPTY).is_zero() {
            return Err(Error::Invalid("wedge_exp needs an even element without constant term".into()));
        }
        let mut result = Self::one(&self.basis, self.ctx);
        let mut power = Self::one(&self.basis, self.ctx);
        let mut k = 1i64;
        loop {
            power = power.try_wedge(self)?.scale_rat(&Rat::new(1, k));
            if power.is_zero() {
                break;
            }
            result.add_assign(&power);
            k += 1;
        }
        Ok(result)
    }
    /// Left interior derivation by the dual of generator `g` (1-based):
    /// `e_J -> (-1)^{#(J below g)} e_{J \ g}` when `g` is in `J`.
    pub fn contract_gen(&self, g: usize) -> Self {
        let b = (g - 1) as u32;
        let mut r = Self::zero(&self.basis, self.ctx);
        for (i, c) in &self.terms {
            if i.0 >> b & 1 == 1 {
                let s = parity_sign(count_below(i.0, b) as usize);
                add_signed(&mut r.terms, MultiIndex(i.0 & !(1 << b)), s, c);
            }
        }
        r
    }
    /// Left wedge by generator `g` (1-based).
    pub fn wedge_gen(&self, g: usize) -> Self {
        let b = (g - 1) as u32;
        let mut r = Self::zero(&self.basis, self.ctx);
        for (i, c) in &self.terms {
            if i.0 >> b & 1 == 0 {
                let s = parity_sign(count_below(i.0, b) as usize);
                add_signed(&mut r.terms, MultiIndex(i.0 | 1 << b), s, c);
            }
        }
        r
    }
    /// Coefficient vector in the order of `indices`.
    pub fn to_vector(&self, indices: &[MultiIndex]) -> Vec<T> {
        indices.iter().map(|i| self.coeff(*i)).collect()
    }
    pub fn from_vector(basis: &Arc<GradedBasis>, ctx: T::Ctx, indices: &[MultiIndex], v: &[T]) -> Self {
        Self::from_terms(basis, ctx, indices.iter().copied().zip(v.iter().cloned()))
    }
}

/// All multi-indices of rank `r` with the given degree filter, ordered by
/// degree and then by bit value.
pub fn multi_indices(r: usize, filter: impl Fn(usize) -> bool) -> Vec<MultiIndex> {
    let mut v: Vec<MultiIndex> = (0u32..(1u32 << r)).map(MultiIndex).filter(|m| filter(m.degree())).collect();
    v.sort_by_key(|m| (m.degree(), m.0));
    v
}

/// Exterior product.
pub fn wedge<T: Scalar>(a: &GradedElement<T>, b: &GradedElement<T>) -> Result<GradedElement<T>> {
    a.try_wedge(b)
}

/// Scales the degree-`i` part by `(-1)^{i(i-1)/2}`.
pub fn tau_involution<T: Scalar>(s: &GradedElement<T>) -> GradedElement<T> {
    let mut r = GradedElement::zero(&s.basis, s.ctx);
    for (i, c) in &s.terms {
        r.terms.insert(*i, if tau_sign(i.degree()) == 1 { c.clone() } else { c.negated() });
    }
    r
}

/// Coefficient of the top monomial.
pub fn integral_x<T: Scalar>(s: &GradedElement<T>) -> T {
    s.coeff(MultiIndex::top(s.rank()))
}

/// The pairing `(s, t)_S = integral of tau(s) ^ t`.
pub fn mukai_pairing<T: Scalar>(s: &GradedElement<T>, t: &GradedElement<T>) -> Result<T> {
    s.same_basis(t)?;
    let r = s.rank();
    let mut acc = T::zero(s.ctx);
    for (a, ca) in &s.terms {
        let b = a.complement(r);
        if let Some(cb) = t.terms.get(&b) {
            let sign = tau_sign(a.degree()) * sign_eps(*a, b);
            acc = acc.plus(&ca.times(cb).scale_int(sign));
        }
    }
    Ok(acc)
}

/// `eps_{K,K^c}` for a multi-index of rank `r`.
pub fn eps_complement(k: MultiIndex, r: usize) -> i64 {
    sign_eps(k, k.complement(r))
}

/// Poincaré duality `e_K -> eps_{K,K^c} f_{K^c}` into `dual_basis`.
pub fn poincare_dual<T: Scalar>(
    k: usize,
    s: &GradedElement<T>,
    dual_basis: &Arc<GradedBasis>,
) -> Result<GradedElement<T>> {
    let r = s.rank();
    if dual_basis.rank() != r {
        return Err(Error::DimensionMismatch { expected: r, got: dual_basis.rank() });
    }
    let mut out = GradedElement::zero(dual_basis, s.ctx);
    for (i, c) in &s.terms {
        if i.degree() != k {
            return Err(Error::NotHomogeneous);
        }
        add_signed(&mut out.terms, i.complement(r), eps_complement(*i, r), c);
    }
    Ok(out)
}

/// The Künneth embedding `s (x) t -> s ^ t'` into the doubled basis, with the
/// second factor's generators shifted past the first block.
pub fn tensor_element<T: Scalar>(
    s: &GradedElement<T>,
    t: &GradedElement<T>,
    doubled: &Arc<GradedBasis>,
) -> Result<GradedElement<T>> {
    s.same_basis(t)?;
    let r = s.rank();
    if doubled.rank() != 2 * r {
        return Err(Error::DimensionMismatch { expected: 2 * r, got: doubled.rank() });
    }
    let mut out = GradedElement::zero(doubled, s.ctx);
    for (a, ca) in &s.terms {
        for (b, cb) in &t.terms {
            add_term(&mut out.terms, MultiIndex(a.0 | b.0 << r), ca.times(cb));
        }
    }
    Ok(out)
}

/// The induced algebra automorphism `wedge^* A` of a linear map `A` on the
/// generators, where `cols[p]` lists the image of generator `p + 1`.
pub fn wedge_power_map<T: Scalar>(cols: &[Vec<T>], x: &GradedElement<T>) -> Result<GradedElement<T>> {
    let r = x.rank();
    if cols.len() != r || cols.iter().any(|c| c.len() != r) {
        return Err(Error::DimensionMismatch { expected: r, got: cols.len() });
    }
    let images: Vec<GradedElement<T>> = cols
        .iter()
        .map(|c| {
            GradedElement::from_terms(&x.basis, x.ctx, c.iter().enumerate().map(|(q, v)| (MultiIndex(1 << q), v.clone())))
        })
        .collect();
    let mut memo: BTreeMap<MultiIndex, GradedElement<T>> = BTreeMap::new();
    memo.insert(MultiIndex::EMPTY, GradedElement::one(&x.basis, x.ctx));
    let mut out = GradedElement::zero(&x.basis, x.ctx);
    for (k, c) in &x.terms {
        let img = image_of_monomial(&images, *k, &mut memo)?;
        out.add_assign(&img.scale(c));
    }
    Ok(out)
}

/// Images under `wedge^* A` of the given monomials, sharing intermediate products.
pub fn wedge_power_images<T: Scalar>(
    cols: &[Vec<T>],
    basis: &Arc<GradedBasis>,
    ctx: T::Ctx,
    monomials: &[MultiIndex],
) -> Result<Vec<GradedElement<T>>> {
    let r = basis.rank();
    if cols.len() != r || cols.iter().any(|c| c.len() != r) {
        return Err(Error::DimensionMismatch { expected: r, got: cols.len() });
    }
    let images: Vec<GradedElement<T>> = cols
        .iter()
        .map(|c| GradedElement::from_terms(basis, ctx, c.iter().enumerate().map(|(q, v)| (MultiIndex(1 << q), v.clone()))))
        .collect();
    let mut memo: BTreeMap<MultiIndex, GradedElement<T>> = BTreeMap::new();
    memo.insert(MultiIndex::EMPTY, GradedElement::one(basis, ctx));
    monomials.iter().map(|k| image_of_monomial(&images, *k, &mut memo)).collect()
}

fn image_of_monomial<T: Scalar>(
    images: &[GradedElement<T>],
    k: MultiIndex,
    memo: &mut BTreeMap<MultiIndex, GradedElement<T>>,
) -> Result<GradedElement<T>> {
    if let Some(v) = memo.get(&k) {
        return Ok(v.clone());
    }
    let top = 31 - k.0.leading_zeros();
    let rest = MultiIndex(k.0 & !(1 << top));
    let v = image_of_monomial(images, rest, memo)?.try_wedge(&images[top as usize])?;
    memo.insert(k, v.clone());
    Ok(v)
}

/// The derivation of the exterior algebra extending a linear map `A` on the
/// generators, where `cols[p]` lists the image of generator `p + 1`.
pub fn derivation_map<T: Scalar>(cols: &[Vec<T>], x: &GradedElement<T>) -> Result<GradedElement<T>> {
    let r = x.rank();
    if cols.len() != r || cols.iter().any(|c| c.len() != r) {
        return Err(Error::DimensionMismatch { expected: r, got: cols.len() });
    }
    let mut out = GradedElement::zero(&x.basis, x.ctx);
    for (k, c) in &x.terms {
        let mut bits = k.0;
        while bits != 0 {
            let b = bits.trailing_zeros();
            bits &= bits - 1;
            // e_K = (-1)^{#below b} e_b ^ e_{K \ b}
            let rest = MultiIndex(k.0 & !(1 << b));
            let s = parity_sign(count_below(k.0, b) as usize);
            for (q, a) in cols[b as usize].iter().enumerate() {
                if a.is_zero() || rest.0 >> q & 1 == 1 {
                    continue;
                }
                let sq = parity_sign(count_below(rest.0, q as u32) as usize);
                add_signed(&mut out.terms, MultiIndex(rest.0 | 1 << q), s * sq, &a.times(c));
            }
        }
    }
    Ok(out)
}

/// Splits a doubled-basis monomial into its two factors.
pub fn split_doubled(idx: MultiIndex, r: usize) -> (MultiIndex, MultiIndex) {
    let mask = MultiIndex::top(r).0;
    (MultiIndex(idx.0 & mask), MultiIndex(idx.0 >> r & mask))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalars::Rat;

    fn hx(n: usize) -> Arc<GradedBasis> {
        GradedBasis::h_x(n)
    }
    fn e(n: usize, idx: &[usize]) -> GradedElement<Rat> {
        GradedElement::basis_elem(&hx(n), (), idx)
    }
    fn mi(idx: &[usize]) -> MultiIndex {
        MultiIndex::from_indices(idx)
    }

    #[test]
    fn sign_eps_examples() {
        assert_eq!(sign_eps(mi(&[1, 2]), mi(&[3])), 1);
        assert_eq!(sign_eps(mi(&[2]), mi(&[1])), -1);
        assert_eq!(sign_eps(mi(&[1]), mi(&[1])), 0);
    }

    #[test]
    fn sign_eps_associativity_exhaustive() {
        let r = 6;
        for k in 0u32..64 {
            for l in 0u32..64 {
                if k & l != 0 {
                    continue;
                }
                for m in 0u32..64 {
                    if (k | l) & m != 0 {
                        continue;
                    }
                    let (k, l, m) = (MultiIndex(k), MultiIndex(l), MultiIndex(m));
                    assert_eq!(
                        sign_eps(k, l) * sign_eps(k.union(l), m),
                        sign_eps(l, m) * sign_eps(k, l.union(m)),
                        "r={r} {k:?} {l:?} {m:?}"
                    );
                }
            }
        }
    }

    #[test]
    fn wedge_examples() {
        assert_eq!(wedge(&e(1, &[1]), &e(1, &[2])).unwrap(), e(1, &[1, 2]));
        assert_eq!(wedge(&e(1, &[2]), &e(1, &[1])).unwrap(), e(1, &[1, 2]).neg());
        let s = e(1, &[1]).add(&e(1, &[2]));
        assert!(wedge(&s, &s).unwrap().is_zero());
    }

    #[test]
    fn wedge_graded_commutative_and_associative() {
        let n = 2;
        for a in 0u32..16 {
            for b in 0u32..16 {
                let x = GradedElement::<Rat>::monomial(&hx(n), (), MultiIndex(a), Rat::one());
                let y = GradedElement::<Rat>::monomial(&hx(n), (), MultiIndex(b), Rat::one());
                let s = parity_sign(x.homogeneous_degree().unwrap() * y.homogeneous_degree().unwrap());
                assert_eq!(wedge(&x, &y).unwrap(), wedge(&y, &x).unwrap().scale_rat(&Rat::from_int(s)));
                for c in 0u32..16 {
                    let z = GradedElement::<Rat>::monomial(&hx(n), (), MultiIndex(c), Rat::one());
                    assert_eq!(
                        wedge(&wedge(&x, &y).unwrap(), &z).unwrap(),
                        wedge(&x, &wedge(&y, &z).unwrap()).unwrap()
                    );
                }
            }
        }
    }

    #[test]
    fn basis_mismatch_is_error() {
        let a = e(1, &[1]);
        let b = GradedElement::<Rat>::basis_elem(&GradedBasis::h_xhat(1), (), &[1]);
        assert!(matches!(wedge(&a, &b), Err(Error::BasisMismatch(_, _))));
    }

    #[test]
    fn tau_examples() {
        assert_eq!(tau_involution(&e(2, &[])), e(2, &[]));
        assert_eq!(tau_involution(&e(2, &[1, 2])), e(2, &[1, 2]).neg());
        assert_eq!(tau_involution(&e(2, &[1, 2, 3, 4])), e(2, &[1, 2, 3, 4]));
    }

    #[test]
    fn integral_examples() {
        assert_eq!(integral_x(&e(3, &[1, 2, 3, 4, 5, 6])), Rat::one());
        assert_eq!(integral_x(&e(3, &[])), Rat::zero());
        let s = e(3, &[1, 2, 3, 4, 5, 6]).scale_rat(&Rat::from_int(5)).add(&e(3, &[1, 2]));
        assert_eq!(integral_x(&s), Rat::from_int(5));
    }

    fn theta(n: usize) -> GradedElement<Rat> {
        let mut t = GradedElement::zero(&hx(n), ());
        for i in 1..=n {
            t.add_assign(&e(n, &[i, i + n]));
        }
        t
    }

    #[test]
    fn mukai_examples() {
        let pt = e(3, &[1, 2, 3, 4, 5, 6]);
        assert_eq!(mukai_pairing(&e(3, &[]), &pt).unwrap(), Rat::one());
        assert_eq!(mukai_pairing(&e(3, &[1]), &e(3, &[1])).unwrap(), Rat::zero());
        for d in 1..5i64 {
            let dd = Rat::from_int(d);
            let t = theta(3);
            let t2 = wedge(&t, &t).unwrap();
            let alpha = e(3, &[]).sub(&t2.scale_rat(&(&dd / &Rat::from_int(2))));
            // [pt] as Theta^3/6, which is -e_top in this orientation
            let t3 = wedge(&t2, &t).unwrap();
            assert_eq!(t3, pt.scale_rat(&Rat::from_int(-6)));
            let beta = t.sub(&t3.scale_rat(&(&dd / &Rat::from_int(6))));
            let orientation = Rat::from_int(parity_sign(3));
            assert_eq!(mukai_pairing(&alpha, &beta).unwrap(), &orientation * &Rat::from_int(-4 * d));
        }
    }

    #[test]
    fn mukai_symmetry_exhaustive() {
        for n in 1..=2usize {
            let r = 2 * n;
            for a in 0u32..(1 << r) {
                for b in 0u32..(1 << r) {
                    let x = GradedElement::<Rat>::monomial(&hx(n), (), MultiIndex(a), Rat::one());
                    let y = GradedElement::<Rat>::monomial(&hx(n), (), MultiIndex(b), Rat::one());
                    let xy = mukai_pairing(&x, &y).unwrap();
                    let yx = mukai_pairing(&y, &x).unwrap();
                    if x.is_even() && y.is_even() {
                        let s = Rat::from_int(parity_sign(n));
                        assert_eq!(xy, &s * &yx);
                    }
                }
            }
        }
    }

    #[test]
    fn poincare_dual_examples() {
        let xh = GradedBasis::h_xhat(1);
        let top = e(1, &[1, 2]);
        assert_eq!(poincare_dual(2, &top, &xh).unwrap(), GradedElement::one(&xh, ()));
        assert_eq!(poincare_dual(0, &e(1, &[]), &xh).unwrap(), GradedElement::basis_elem(&xh, (), &[1, 2]));
        assert_eq!(poincare_dual(1, &e(1, &[2]), &xh).unwrap(), GradedElement::basis_elem(&xh, (), &[1]).neg());
        assert!(poincare_dual(1, &e(1, &[]).add(&e(1, &[1])), &xh).is_err());
    }

    #[test]
    fn eps_complement_formula() {
        for r in 0..=8usize {
            for k in 0u32..(1 << r) {
                let k = MultiIndex(k);
                let deg = k.degree();
                let expected = parity_sign(k.index_sum() + deg * (deg + 1) / 2);
                assert_eq!(eps_complement(k, r), expected);
            }
        }
    }

    #[test]
    fn poincare_dual_involution_exhaustive() {
        for n in 1..=2usize {
            let r = 2 * n;
            let xh = GradedBasis::h_xhat(n);
            for a in 0u32..(1 << r) {
                let x = GradedElement::<Rat>::monomial(&hx(n), (), MultiIndex(a), Rat::one());
                let k = x.homogeneous_degree().unwrap();
                let y = poincare_dual(k, &x, &xh).unwrap();
                let back = poincare_dual(r - k, &y, &hx(n)).unwrap();
                assert_eq!(back, x.scale_rat(&Rat::from_int(parity_sign(k * (r - k)))));
            }
        }
    }

    #[test]
    fn tensor_examples() {
        let dbl = GradedBasis::doubled_x(1);
        let one = e(1, &[]);
        assert_eq!(tensor_element(&one, &one, &dbl).unwrap(), GradedElement::one(&dbl, ()));
        assert_eq!(
            tensor_element(&e(1, &[1]), &e(1, &[2]), &dbl).unwrap(),
            GradedElement::basis_elem(&dbl, (), &[1, 4])
        );
        let s = tensor_element(&e(1, &[1]), &one, &dbl).unwrap().add(&tensor_element(&one, &e(1, &[1]), &dbl).unwrap());
        assert_eq!(s, GradedElement::basis_elem(&dbl, (), &[1]).add(&GradedElement::basis_elem(&dbl, (), &[3])));
    }

    #[test]
    fn wedge_exp_of_theta() {
        let t = theta(2);
        let ex = t.wedge_exp().unwrap();
        let t2 = wedge(&t, &t).unwrap();
        assert_eq!(ex, e(2, &[]).add(&t).add(&t2.scale_rat(&Rat::new(1, 2))));
        // int Theta^n/n! = (-1)^{n(n-1)/2} for Theta = sum e_i ^ e_{i+n}
        assert_eq!(integral_x(&ex), Rat::from_int(-1));
        assert_eq!(integral_x(&theta(3).wedge_exp().unwrap()), Rat::from_int(-1));
        assert_eq!(integral_x(&theta(1).wedge_exp().unwrap()), Rat::one());
    }

    #[test]
    fn by_name_round_trip() {
        for b in [GradedBasis::h_x(2), GradedBasis::h_xhat(3), GradedBasis::wedge_v(1), GradedBasis::doubled_x(2)] {
            assert_eq!(*GradedBasis::by_name(&b.name).unwrap(), *b);
        }
    }

    fn random_element(rng: &mut impl rand::Rng, r: usize) -> GradedElement<Rat> {
        let b = hx(r / 2);
        GradedElement::from_terms(&b, (), (0..8).map(|_| (MultiIndex(rng.gen_range(0..1u32 << r)), Rat::from_int(rng.gen_range(-3..4)))))
    }

    #[test]
    fn induced_maps_respect_products() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(21);
        let r = 4;
        for _ in 0..20 {
            let cols: Vec<Vec<Rat>> = (0..r).map(|_| (0..r).map(|_| Rat::from_int(rng.gen_range(-2..3))).collect()).collect();
            let x = random_element(&mut rng, r);
            let y = random_element(&mut rng, r);
            let xy = wedge(&x, &y).unwrap();
            let a = |z: &GradedElement<Rat>| wedge_power_map(&cols, z).unwrap();
            assert_eq!(a(&xy), wedge(&a(&x), &a(&y)).unwrap());
            let dd = |z: &GradedElement<Rat>| derivation_map(&cols, z).unwrap();
            assert_eq!(dd(&xy), wedge(&dd(&x), &y).unwrap().add(&wedge(&x, &dd(&y)).unwrap()));
        }
        let id: Vec<Vec<Rat>> = (0..r).map(|p| (0..r).map(|q| if p == q { Rat::one() } else { Rat::zero() }).collect()).collect();
        let x = e(2, &[1, 3, 4]);
        assert_eq!(derivation_map(&id, &x).unwrap(), x.scale_rat(&Rat::from_int(3)));
        assert_eq!(wedge_power_map(&id, &x).unwrap(), x);
    }
}
