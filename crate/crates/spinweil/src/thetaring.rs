//! The truncated ring `Q[Theta]/(Theta^{n+1})` of a principally polarized
//! abelian variety, with coefficients in `Q` or `Q(sqrt(-d))`.
//!
//! The integral is `int Theta^n = n!`, so `[pt] = Theta^n / n!` has integral one.

use crate::error::{Error, Result};
use crate::exterior::{wedge, GradedBasis, GradedElement};
use crate::lattice::standard_theta;
use crate::scalars::{QuadExt, Rat, Scalar};
use serde::{Deserialize, Serialize};

/// `sum_k coeffs[k] Theta^k` truncated above `Theta^n`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ThetaPoly<T: Scalar> {
    pub n: usize,
    pub coeffs: Vec<T>,
}

fn factorial(k: usize) -> Rat {
    (1..=k as i64).fold(Rat::one(), |acc, i| &acc * &Rat::from_int(i))
}

fn binomial2(a: i64) -> i64 {
    a * (a - 1) / 2
}

impl<T: Scalar> ThetaPoly<T> {
    /// Builds a polynomial from its coefficients, padding with zeros.
    pub fn new(n: usize, ctx: T::Ctx, coeffs: Vec<T>) -> Result<Self> {
        if coeffs.len() > n + 1 {
            return Err(Error::DimensionMismatch { expected: n + 1, got: coeffs.len() });
        }
        let mut c = coeffs;
        c.resize(n + 1, T::zero(ctx));
        Ok(ThetaPoly { n, coeffs: c })
    }
    pub fn zero(n: usize, ctx: T::Ctx) -> Self {
        ThetaPoly { n, coeffs: vec![T::zero(ctx); n + 1] }
    }
    pub fn one(n: usize, ctx: T::Ctx) -> Self {
        Self::monomial(n, ctx, 0, T::one(ctx))
    }
    /// `c Theta^k`, or zero when `k > n`.
    pub fn monomial(n: usize, ctx: T::Ctx, k: usize, c: T) -> Self {
        let mut p = Self::zero(n, ctx);
        if k <= n {
            p.coeffs[k] = c;
        }
        p
    }
    pub fn theta(n: usize, ctx: T::Ctx) -> Self {
        Self::monomial(n, ctx, 1, T::one(ctx))
    }
    /// The point class `Theta^n / n!`.
    pub fn pt(n: usize, ctx: T::Ctx) -> Self {
        Self::monomial(n, ctx, n, T::from_rat(ctx, factorial(n).recip().expect("nonzero factorial")))
    }
    pub fn ctx(&self) -> T::Ctx {
        self.coeffs[0].ctx()
    }
    fn check(&self, o: &Self) -> Result<()> {
        if self.n != o.n {
            return Err(Error::DimensionMismatch { expected: self.n, got: o.n });
        }
        Ok(())
    }
    pub fn add(&self, o: &Self) -> Result<Self> {
        self.check(o)?;
        Ok(ThetaPoly { n: self.n, coeffs: self.coeffs.iter().zip(&o.coeffs).map(|(a, b)| a.plus(b)).collect() })
    }
    pub fn sub(&self, o: &Self) -> Result<Self> {
        self.add(&o.scale(&T::from_i64(self.ctx(), -1)))
    }
    pub fn scale(&self, s: &T) -> Self {
        ThetaPoly { n: self.n, coeffs: self.coeffs.iter().map(|a| a.times(s)).collect() }
    }
    /// Truncated product.
    pub fn mul(&self, o: &Self) -> Result<Self> {
        self.check(o)?;
        let mut out = Self::zero(self.n, self.ctx());
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in o.coeffs.iter().enumerate().take(self.n + 1 - i) {
                out.coeffs[i + j] = out.coeffs[i + j].plus(&a.times(b));
            }
        }
        Ok(out)
    }
    /// `int p = n! c_n`.
    pub fn tintegral(&self) -> T {
        self.coeffs[self.n].scale_rat(&factorial(self.n))
    }
    /// The Mukai sign involution: `Theta^k` (degree `2k`) is scaled by `(-1)^k`.
    pub fn tau(&self) -> Self {
        ThetaPoly {
            n: self.n,
            coeffs: self.coeffs.iter().enumerate().map(|(k, c)| if k % 2 == 1 { c.negated() } else { c.clone() }).collect(),
        }
    }
    /// Coefficient of `[pt]`, i.e. `n! c_n`.
    pub fn pt_coeff(&self) -> T {
        self.tintegral()
    }
}

impl ThetaPoly<Rat> {
    /// The same polynomial over `Q(sqrt(-d))`.
    pub fn to_quad(&self, d: u64) -> ThetaPoly<QuadExt> {
        ThetaPoly { n: self.n, coeffs: self.coeffs.iter().map(|c| QuadExt::rational(d, c.clone())).collect() }
    }
}

impl ThetaPoly<QuadExt> {
    /// Splits `p = re + sqrt(-d) im` into rational parts.
    pub fn split(&self) -> (ThetaPoly<Rat>, ThetaPoly<Rat>) {
        (
            ThetaPoly { n: self.n, coeffs: self.coeffs.iter().map(|c| c.re.clone()).collect() },
            ThetaPoly { n: self.n, coeffs: self.coeffs.iter().map(|c| c.im.clone()).collect() },
        )
    }
}

/// `exp(c Theta) = sum_k c^k Theta^k / k!`, truncated.
pub fn texp<T: Scalar>(c: &T, n: usize) -> ThetaPoly<T> {
    let ctx = c.ctx();
    let mut coeffs = Vec::with_capacity(n + 1);
    let mut cur = T::one(ctx);
    for k in 0..=n {
        if k > 0 {
            cur = cur.times(c).scale_rat(&Rat::new(1, k as i64));
        }
        coeffs.push(cur.clone());
    }
    ThetaPoly { n, coeffs }
}

/// `ch` of the ideal sheaf of `m` points, twisted along a curve class:
/// `1 - m (Theta^2/2 - 2[pt])` on a threefold.
pub fn ch_ideal_class(m: i64) -> ThetaPoly<Rat> {
    let n = 3;
    let curve_minus_points = ThetaPoly::monomial(n, (), 2, Rat::new(1, 2))
        .sub(&ThetaPoly::pt(n, ()).scale(&Rat::from_int(2)))
        .expect("same n");
    ThetaPoly::one(n, ()).sub(&curve_minus_points.scale(&Rat::from_int(m))).expect("same n")
}

/// `ch` of the secant ideal sheaf on a threefold, `(1 - (d+1)(Theta^2/2 - 2[pt])) exp(Theta)`.
pub fn ch_secant_ideal_threefold(d: i64) -> ThetaPoly<Rat> {
    ch_ideal_class(d + 1).mul(&texp(&Rat::one(), 3)).expect("same n")
}

/// The integral classes `(alpha, beta)` with `q^n exp(k Theta) = alpha + tau sqrt(-d) beta`
/// for `k = (rho + tau sqrt(-d)) / q`.
pub fn alpha_beta(n: usize, d: i64, rho: i64, tau: i64, q: i64) -> Result<(ThetaPoly<Rat>, ThetaPoly<Rat>)> {
    if q <= 0 {
        return Err(Error::Invalid("q must be positive".into()));
    }
    if tau == 0 {
        return Err(Error::Invalid("tau must be nonzero".into()));
    }
    let e = texp(&Rat::new(rho, q), n);
    let t2d = Rat::from_int(tau * tau * d);
    let qr = Rat::from_int(q);
    let mut a = ThetaPoly::zero(n, ());
    let mut b = ThetaPoly::zero(n, ());
    for j in 0..=n / 2 {
        let sign = Rat::from_int(if j % 2 == 0 { 1 } else { -1 });
        let base = &sign * &t2d.pow(j as u32);
        a.coeffs[2 * j] = &(&base * &qr.pow((n - 2 * j) as u32)) * &factorial(2 * j).recip()?;
        if 2 * j < n {
            b.coeffs[2 * j + 1] = &(&base * &qr.pow((n - 1 - 2 * j) as u32)) * &factorial(2 * j + 1).recip()?;
        }
    }
    Ok((e.mul(&a)?, e.mul(&b)?))
}

/// `chi(v, w) = int tau(v) w`.
pub fn euler_pairing<T: Scalar>(v: &ThetaPoly<T>, w: &ThetaPoly<T>) -> Result<T> {
    Ok(v.tau().mul(w)?.tintegral())
}

/// The closed form of `chi(F^v (x) F)` for `ch(F) = a alpha + b beta` with
/// `alpha, beta` from [`alpha_beta`]: zero for odd `n`, and
/// `(-1)^{n/2} 2^{n-1} d^{n/2-1} q^n tau^{n-2} (a^2 tau^2 d + b^2)` for even `n`.
pub fn chi_closed_form(n: usize, d: i64, tau: i64, q: i64, a: i64, b: i64) -> Rat {
    if n % 2 == 1 {
        return Rat::zero();
    }
    let h = n / 2;
    let sign = if h % 2 == 0 { 1 } else { -1 };
    let base = Rat::from_int(sign) * Rat::from_int(2).pow((n - 1) as u32) * Rat::from_int(q).pow(n as u32);
    let dpart = Rat::from_int(d).pow((h - 1) as u32);
    let tpart = Rat::from_int(tau).pow((n - 2) as u32);
    base * dpart * tpart * Rat::from_int(a * a * tau * tau * d + b * b)
}

/// The smallest nonzero `|chi(F^v (x) F)|` over `rho, a, b in [-r, r]`,
/// `tau in [-r, r] \ {0}`, `q in [1, r]`, computed from the classes themselves.
pub fn min_abs_chi_sampled(n: usize, d: i64, r: i64) -> Result<Option<Rat>> {
    let mut best: Option<Rat> = None;
    for q in 1..=r {
        for tau in (-r..=r).filter(|t| *t != 0) {
            for rho in -r..=r {
                let (al, be) = alpha_beta(n, d, rho, tau, q)?;
                for a in -r..=r {
                    for b in -r..=r {
                        let v = al.scale(&Rat::from_int(a)).add(&be.scale(&Rat::from_int(b)))?;
                        let c = euler_pairing(&v, &v)?.abs();
                        if !c.is_zero() && best.as_ref().is_none_or(|x| c < *x) {
                            best = Some(c);
                        }
                    }
                }
            }
        }
    }
    Ok(best)
}

/// Coefficients `(a_0, a_1, a_2)` of the Brill-Noether union `Z` on a genus-4
/// Jacobian with `ch(I_Z(a_3 Theta)) = alpha + a_3 beta`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Genus4Coeffs {
    pub a0: Rat,
    pub a1: Rat,
    pub a2: Rat,
    pub a3: i64,
}

/// `ch(O_{W_k})` for `k = 0, 1, 2` on a genus-4 Jacobian.
pub fn ch_o_w(k: usize) -> Result<ThetaPoly<Rat>> {
    let n = 4;
    let pt = ThetaPoly::pt(n, ());
    let th = |j: usize, c: Rat| ThetaPoly::monomial(n, (), j, c);
    match k {
        0 => Ok(pt),
        1 => th(3, Rat::new(1, 6)).sub(&pt.scale(&Rat::from_int(3))),
        2 => th(2, Rat::new(1, 2)).sub(&th(3, Rat::new(1, 3)))?.add(&pt.scale(&Rat::from_int(3))),
        _ => Err(Error::Invalid(format!("no W_{k} fixture"))),
    }
}

/// `ch(I_Z(a_3 Theta))` for `Z` a union of `a_k` translates of `W_k`, where
/// each pair of `W_2` translates meets in six points.
pub fn ch_genus4_twisted_ideal(a0: &Rat, a1: &Rat, a2: &Rat, a3: i64) -> Result<ThetaPoly<Rat>> {
    let n = 4;
    let a2_int = a2.to_i64().ok_or(Error::NotRational)?;
    let oz = ch_o_w(0)?
        .scale(a0)
        .add(&ch_o_w(1)?.scale(a1))?
        .add(&ch_o_w(2)?.scale(a2))?
        .sub(&ThetaPoly::pt(n, ()).scale(&Rat::from_int(6 * binomial2(a2_int))))?;
    ThetaPoly::one(n, ()).sub(&oz)?.mul(&texp(&Rat::from_int(a3), n))
}

/// Solves `ch(I_Z(a_3 Theta)) = alpha + a_3 beta` for `(a_0, a_1, a_2)` on a
/// genus-4 Jacobian, one coefficient at a time (`Theta^2`, then `Theta^3`, then `[pt]`).
pub fn solve_genus4_coeffs(d: i64, a3: i64) -> Result<Genus4Coeffs> {
    let (al, be) = alpha_beta(4, d, 0, 1, 1)?;
    let target = al.add(&be.scale(&Rat::from_int(a3)))?;
    let z = Rat::zero();
    let one = Rat::one();
    // each coefficient is affine in the unknown it determines once the earlier ones are fixed
    let solve_affine = |f: &dyn Fn(&Rat) -> Result<Rat>, want: &Rat| -> Result<Rat> {
        let f0 = f(&z)?;
        let slope = &f(&one)? - &f0;
        if slope.is_zero() {
            return Err(Error::Inconsistent);
        }
        Ok(&(want - &f0) / &slope)
    };
    let a2 = solve_affine(&|x| Ok(ch_genus4_twisted_ideal(&z, &z, x, a3)?.coeffs[2].clone()), &target.coeffs[2])?;
    if !a2.is_integer() {
        return Err(Error::Inconsistent);
    }
    let a1 = solve_affine(&|x| Ok(ch_genus4_twisted_ideal(&z, x, &a2, a3)?.coeffs[3].clone()), &target.coeffs[3])?;
    let a0 = solve_affine(&|x| Ok(ch_genus4_twisted_ideal(x, &a1, &a2, a3)?.coeffs[4].clone()), &target.coeffs[4])?;
    if ch_genus4_twisted_ideal(&a0, &a1, &a2, a3)? != target {
        return Err(Error::Inconsistent);
    }
    Ok(Genus4Coeffs { a0, a1, a2, a3 })
}

/// The closed forms `a_2 = d + a_3^2`, `a_1 = 2(d + a_3^2)(1 - a_3)`,
/// `a_0 = (a_3^2 + d)(6a_3^2 - 6a_3 + 2d)`.
pub fn genus4_closed_form(d: i64, a3: i64) -> Genus4Coeffs {
    let s = d + a3 * a3;
    Genus4Coeffs {
        a2: Rat::from_int(s),
        a1: Rat::from_int(2 * s * (1 - a3)),
        a0: Rat::from_int(s * (6 * a3 * a3 - 6 * a3 + 2 * d)),
        a3,
    }
}

/// Substitutes the principal `Theta = sum_i e_i ^ e_{i+n}` into `p`, giving an
/// even class of `H*(X)`.
pub fn embed_theta_into_spinor<T: Scalar>(p: &ThetaPoly<T>) -> Result<GradedElement<T>> {
    let n = p.n;
    if n == 0 || n > 3 {
        return Err(Error::UnsupportedRank(n));
    }
    let ctx = p.ctx();
    let th = standard_theta::<T>(n, ctx);
    let mut power = GradedElement::one(&GradedBasis::h_x(n), ctx);
    let mut out = GradedElement::zero(&power.basis, ctx);
    for (k, c) in p.coeffs.iter().enumerate() {
        if k > 0 {
            power = wedge(&power, &th)?;
        }
        out.add_assign(&power.scale(c));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exterior::{integral_x, mukai_pairing, MultiIndex};
    use crate::igusa::igusa_j;

    fn r(a: i64, b: i64) -> Rat {
        Rat::new(a, b)
    }
    fn tp(n: usize, c: &[Rat]) -> ThetaPoly<Rat> {
        ThetaPoly::new(n, (), c.to_vec()).unwrap()
    }

    #[test]
    fn texp_examples() {
        assert_eq!(texp(&Rat::zero(), 3), ThetaPoly::one(3, ()));
        for d in [1u64, 2, 7] {
            let w = QuadExt::omega(d);
            let e = texp(&w, 3);
            let di = d as i64;
            let expect = ThetaPoly::new(
                3,
                d,
                vec![
                    QuadExt::rational(d, Rat::one()),
                    w.clone(),
                    QuadExt::rational(d, r(-di, 2)),
                    QuadExt::new(d, Rat::zero(), r(-di, 6)),
                ],
            )
            .unwrap();
            assert_eq!(e, expect);
            // the [pt] coefficient is -d sqrt(-d)
            assert_eq!(e.pt_coeff(), QuadExt::new(d, Rat::zero(), Rat::from_int(-di)));
        }
        for (a, b) in [(r(1, 2), r(-3, 1)), (r(2, 3), r(5, 7))] {
            assert_eq!(texp(&a, 5).mul(&texp(&b, 5)).unwrap(), texp(&(&a + &b), 5));
        }
    }

    #[test]
    fn integral_of_exp_is_power() {
        for n in 1..=8 {
            for c in [r(1, 1), r(-2, 1), r(3, 2)] {
                assert_eq!(texp(&c, n).tintegral(), c.pow(n as u32));
            }
        }
    }

    #[test]
    fn secant_ideal_threefold() {
        assert_eq!(ch_secant_ideal_threefold(1), tp(3, &[r(1, 1), r(1, 1), r(-1, 2), r(-1, 6)]));
        let c4 = ch_secant_ideal_threefold(4);
        assert_eq!(c4, tp(3, &[r(1, 1), r(1, 1), r(-2, 1), r(-4, 6)]));
        assert_eq!(c4.pt_coeff(), Rat::from_int(-4));
        for d in 1..6 {
            let (al, be) = alpha_beta(3, d, 0, 1, 1).unwrap();
            assert_eq!(ch_secant_ideal_threefold(d), al.add(&be).unwrap());
            // real and imaginary parts of exp(sqrt(-d) Theta)
            let (re, im) = texp(&QuadExt::omega(d as u64), 3).split();
            assert_eq!((re, im), (al, be));
        }
    }

    #[test]
    fn alpha_beta_examples() {
        let d = 5;
        let (al, be) = alpha_beta(3, d, 0, 1, 1).unwrap();
        assert_eq!(al, tp(3, &[r(1, 1), r(0, 1), r(-d, 2)]));
        assert_eq!(be, ThetaPoly::theta(3, ()).sub(&ThetaPoly::pt(3, ()).scale(&Rat::from_int(d))).unwrap());
        for (n, d, rho, tau, q) in [(4usize, 3i64, 1i64, 1i64, 2i64), (3, 2, -1, 2, 3), (5, 7, 2, -1, 1), (2, 1, 3, 1, 2)] {
            let (al, be) = alpha_beta(n, d, rho, tau, q).unwrap();
            let du = d as u64;
            let k = QuadExt::new(du, r(rho, q), r(tau, q));
            let lhs = texp(&k, n).scale(&QuadExt::rational(du, Rat::from_int(q).pow(n as u32)));
            let rhs = al.to_quad(du).add(&be.to_quad(du).scale(&QuadExt::new(du, Rat::zero(), Rat::from_int(tau)))).unwrap();
            assert_eq!(lhs, rhs, "n={n} d={d} rho={rho} tau={tau} q={q}");
            // integrality of alpha, beta as classes: Theta^k/k! has integral coefficient
            for p in [&al, &be] {
                for (j, c) in p.coeffs.iter().enumerate() {
                    assert!((c * &factorial(j)).is_integer());
                }
            }
        }
        let (al, be) = alpha_beta(6, 3, 0, 2, 1).unwrap();
        assert!(al.coeffs.iter().skip(1).step_by(2).all(|c| c.is_zero()));
        assert!(be.coeffs.iter().step_by(2).all(|c| c.is_zero()));
        assert!(alpha_beta(3, 1, 0, 0, 1).is_err());
        assert!(alpha_beta(3, 1, 0, 1, 0).is_err());
    }

    #[test]
    fn chi_table() {
        let (al, be) = alpha_beta(2, 2, 0, 1, 1).unwrap();
        let v = al.add(&be).unwrap();
        assert_eq!(euler_pairing(&v, &v).unwrap(), Rat::from_int(-6));
        for d in [1, 2, 3] {
            let (_, be4) = alpha_beta(4, d, 0, 1, 1).unwrap();
            assert_eq!(euler_pairing(&be4, &be4).unwrap(), Rat::from_int(8 * d));
        }
        for n in 1..=7 {
            for (d, rho, tau, q, a, b) in [(1, 0, 1, 1, 1, 1), (2, 1, -1, 2, 2, -3), (3, -2, 2, 1, 0, 1), (5, 1, 1, 3, 1, 0)] {
                let (al, be) = alpha_beta(n, d, rho, tau, q).unwrap();
                let v = al.scale(&Rat::from_int(a)).add(&be.scale(&Rat::from_int(b))).unwrap();
                assert_eq!(euler_pairing(&v, &v).unwrap(), chi_closed_form(n, d, tau, q, a, b), "n={n}");
            }
        }
        assert_eq!(chi_closed_form(2, 2, 1, 1, 1, 1), Rat::from_int(-6));
        assert_eq!(chi_closed_form(4, 3, 1, 1, 0, 1), Rat::from_int(24));
    }

    #[test]
    fn chi_minimum_on_small_parameters() {
        for (n, d) in [(2usize, 1i64), (2, 2), (4, 1), (4, 2), (4, 3)] {
            let m = min_abs_chi_sampled(n, d, 2).unwrap().unwrap();
            let expect = Rat::from_int(2).pow((n - 1) as u32) * Rat::from_int(d).pow((n / 2 - 1) as u32);
            assert_eq!(m, expect, "n={n} d={d}");
        }
        assert_eq!(min_abs_chi_sampled(3, 2, 1).unwrap(), None);
    }

    #[test]
    fn genus4_coefficients() {
        for d in 1..=10 {
            for a3 in -3..=1 {
                assert_eq!(solve_genus4_coeffs(d, a3).unwrap(), genus4_closed_form(d, a3), "d={d} a3={a3}");
            }
            let g = solve_genus4_coeffs(d, 1).unwrap();
            assert_eq!((g.a2, g.a1, g.a0), (Rat::from_int(d + 1), Rat::zero(), Rat::from_int(2 * d * (d + 1))));
        }
        let g = solve_genus4_coeffs(1, 0).unwrap();
        assert_eq!((g.a2, g.a1, g.a0), (Rat::one(), Rat::from_int(2), Rat::from_int(2)));
        // closed form of ch(I_Z(a_3 Theta)) in terms of a0, a1, a2
        let (a0, a1, a2, a3) = (r(5, 1), r(-2, 1), r(3, 1), 2i64);
        let c = ch_genus4_twisted_ideal(&a0, &a1, &a2, a3).unwrap();
        let a3r = Rat::from_int(a3);
        assert_eq!(c.coeffs[2], &(&a3r.pow(2) - &a2) / &r(2, 1));
        assert_eq!(c.coeffs[3], &(&(&(&a3r.pow(3) - &(&r(3, 1) * &(&a3r * &a2))) + &(&r(2, 1) * &a2)) - &a1) / &r(6, 1));
        let pt = &(&(&(&(&(&a3r.pow(4) - &(&r(6, 1) * &(&a2 * &a3r.pow(2)))) + &(&r(8, 1) * &(&a2 * &a3r))) - &(&r(4, 1) * &(&a1 * &a3r)))
            + &r(18, 1))
            - &(&(&r(3, 1) * &a2) - &(&r(3, 1) * &a1)))
            - &a0;
        assert_eq!(c.pt_coeff(), pt);
    }

    #[test]
    fn embedding_examples() {
        let n = 3;
        let hb = GradedBasis::h_x(n);
        let th2 = embed_theta_into_spinor(&ThetaPoly::<Rat>::monomial(n, (), 2, Rat::one())).unwrap();
        // Theta^2 = 2 (e14 ^ e25 + e14 ^ e36 + e25 ^ e36)
        let pair = |a: &[usize]| GradedElement::basis_elem(&hb, (), a);
        let expect = wedge(&pair(&[1, 4]), &pair(&[2, 5]))
            .unwrap()
            .add(&wedge(&pair(&[1, 4]), &pair(&[3, 6])).unwrap())
            .add(&wedge(&pair(&[2, 5]), &pair(&[3, 6])).unwrap())
            .scale_rat(&Rat::from_int(2));
        assert_eq!(th2, expect);
        assert_eq!(th2.coeff(MultiIndex::from_indices(&[1, 2, 4, 5])), Rat::from_int(-2));
        // [pt] embeds as (-1)^{n(n-1)/2} e_top under the literal substitution
        for n in 1..=3 {
            let p = embed_theta_into_spinor(&ThetaPoly::<Rat>::pt(n, ())).unwrap();
            let sign = if (n * (n - 1) / 2) % 2 == 0 { 1 } else { -1 };
            assert_eq!(p, GradedElement::top(&GradedBasis::h_x(n), ()).scale_rat(&Rat::from_int(sign)));
        }
        for d in 1..=5i64 {
            let p = tp(3, &[r(2, 1), r(0, 1), r(-d, 1)]);
            assert_eq!(igusa_j(&embed_theta_into_spinor(&p).unwrap()).unwrap(), Rat::from_int(16 * d * d * d));
        }
        assert!(embed_theta_into_spinor(&ThetaPoly::<Rat>::one(4, ())).is_err());
    }

    #[test]
    fn embedding_is_compatible_with_integrals_and_pairings() {
        for n in 1..=3usize {
            let sign = Rat::from_int(if (n * (n - 1) / 2) % 2 == 0 { 1 } else { -1 });
            for (d, rho, tau, q) in [(1, 0, 1, 1), (2, 1, -1, 2), (3, 2, 1, 1)] {
                let (al, be) = alpha_beta(n, d, rho, tau, q).unwrap();
                for (v, w) in [(&al, &be), (&al, &al), (&be, &be), (&be, &al)] {
                    let ev = embed_theta_into_spinor(v).unwrap();
                    let ew = embed_theta_into_spinor(w).unwrap();
                    assert_eq!(integral_x(&ev), &sign * &v.tintegral());
                    assert_eq!(mukai_pairing(&ev, &ew).unwrap(), &sign * &euler_pairing(v, w).unwrap());
                }
            }
        }
    }

    #[test]
    fn secant_class_lies_on_the_exponential_plane() {
        for d in 1..=4u64 {
            let ch = embed_theta_into_spinor(&ch_secant_ideal_threefold(d as i64).to_quad(d)).unwrap();
            let lp = embed_theta_into_spinor(&texp(&QuadExt::omega(d), 3)).unwrap();
            let lm = embed_theta_into_spinor(&texp(&QuadExt::omega(d).negated(), 3)).unwrap();
            let idx = crate::exterior::multi_indices(6, |k| k % 2 == 0);
            let rows = vec![ch.to_vector(&idx), lp.to_vector(&idx), lm.to_vector(&idx)];
            assert_eq!(crate::linalg::rank_of_rows(&rows, d), 2);
        }
    }

    #[test]
    fn mismatched_sizes_are_rejected() {
        assert!(ThetaPoly::<Rat>::one(2, ()).add(&ThetaPoly::one(3, ())).is_err());
        assert!(euler_pairing(&ThetaPoly::<Rat>::one(2, ()), &ThetaPoly::one(3, ())).is_err());
        assert!(ThetaPoly::<Rat>::new(1, (), vec![Rat::one(); 3]).is_err());
        assert!(ch_o_w(3).is_err());
    }
}
