//! The identity battery behind `verify` and `chevalley-check`.
//!
//! Each check owns its data and its own seeded generator, so the report does
//! not depend on how the checks are scheduled.

use crate::{Level, Outcome};
use anyhow::{bail, Result};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};
use spinweil::chevalley::{
    hodge_weil_projection, kappa_independence, kappa_is_infinitesimally_invariant, orlov_phi_tensor, pd_sign_check,
    tilde_varphi, tilde_varphi_closed, twist_identity_check, upper_square_check, OrlovMap,
};
use spinweil::clifford::{m_action, m_vector, spin_exp_even_nilpotent, spin_from_pair, theta_clifford, CliffordElement, SpinElement};
use spinweil::exterior::{mukai_pairing, multi_indices, parity_sign, wedge, GradedBasis, GradedElement, MultiIndex};
use spinweil::hodgemodel::{annihilator_kernel, product_annihilator};
use spinweil::igusa::igusa_j;
use spinweil::lattice::{pair_v, standard_theta, LatticeV};
use spinweil::linalg::{gram_signature, rank_of_rows};
use spinweil::spinors::{exp_theta, same_line, secant_plane, stabilizer_lie, standard_secant};
use spinweil::thetaring::{alpha_beta, chi_closed_form, ch_secant_ideal_threefold, euler_pairing, genus4_closed_form, solve_genus4_coeffs, texp};
use spinweil::weil::{centralizer_dims, cm_from_secant, discriminant_h, g_form, real_part_gram, standard_complex_structure, standard_k_basis, Definiteness};
use spinweil::{QuadExt, Rat};

#[derive(Clone, Debug, Serialize)]
pub struct CheckResult {
    pub name: String,
    pub passed: bool,
    pub detail: Value,
}

type Check = (&'static str, Box<dyn Fn(u64) -> Result<(bool, Value)> + Send + Sync>);

fn r(k: i64) -> Rat {
    Rat::from_int(k)
}

fn hx(n: usize) -> std::sync::Arc<GradedBasis> {
    GradedBasis::h_x(n)
}

/// A generator seeded by the user seed and the check name.
fn rng_for(seed: u64, name: &str) -> ChaCha8Rng {
    let salt = name.bytes().fold(0xcbf2_9ce4_8422_2325u64, |h, b| (h ^ b as u64).wrapping_mul(0x100_0000_01b3));
    ChaCha8Rng::seed_from_u64(seed ^ salt)
}

fn random_norm_vector(rng: &mut ChaCha8Rng, lat: LatticeV, norm: i64) -> Vec<Rat> {
    loop {
        let v: Vec<Rat> = (0..lat.dim()).map(|_| r(rng.gen_range(-1..2))).collect();
        if pair_v(lat, &v, &v).unwrap_or_else(|_| Rat::zero()) == r(norm) {
            return v;
        }
    }
}

fn reflection_pair(rng: &mut ChaCha8Rng, lat: LatticeV) -> Result<SpinElement<Rat>> {
    let norm = if rng.gen_bool(0.5) { 2 } else { -2 };
    let (v1, v2) = (random_norm_vector(rng, lat, norm), random_norm_vector(rng, lat, norm));
    Ok(spin_from_pair(lat, &v1, &v2)?)
}

fn random_spin(rng: &mut ChaCha8Rng, lat: LatticeV) -> Result<SpinElement<Rat>> {
    let g = reflection_pair(rng, lat)?.mul(&reflection_pair(rng, lat)?)?;
    let c = r(rng.gen_range(-2..3));
    Ok(g.mul(&spin_exp_even_nilpotent(&theta_clifford(lat, &c))?)?)
}

/// All `n = 1` reflection pairs with coordinates in `{-1, 0, 1}`.
fn all_reflection_pairs_n1() -> Result<Vec<SpinElement<Rat>>> {
    let lat = LatticeV::new(1);
    let vecs: Vec<Vec<Rat>> = (0..81usize)
        .map(|mut c| {
            (0..4)
                .map(|_| {
                    let v = c % 3;
                    c /= 3;
                    r(v as i64 - 1)
                })
                .collect()
        })
        .collect();
    let mut out = Vec::new();
    for norm in [2, -2] {
        let vs: Vec<&Vec<Rat>> = vecs.iter().filter(|v| pair_v(lat, v, v).map(|p| p == r(norm)).unwrap_or(false)).collect();
        for v1 in &vs {
            for v2 in &vs {
                out.push(spin_from_pair(lat, v1, v2)?);
            }
        }
    }
    Ok(out)
}

fn two_path(n: usize, samples: usize, rng: &mut ChaCha8Rng) -> Result<(bool, Value)> {
    let mut pairs = Vec::new();
    if n <= 2 {
        for k in multi_indices(2 * n, |_| true) {
            for l in multi_indices(2 * n, |_| true) {
                pairs.push((k, l));
            }
        }
    } else {
        let top = 1u32 << (2 * n);
        for _ in 0..samples {
            pairs.push((MultiIndex(rng.gen_range(0..top)), MultiIndex(rng.gen_range(0..top))));
        }
    }
    for (k, l) in &pairs {
        let s = GradedElement::monomial(&hx(n), (), *k, Rat::one());
        let t = GradedElement::monomial(&hx(n), (), *l, Rat::one());
        if tilde_varphi(&s, &t)? != tilde_varphi_closed(&s, &t)? {
            return Ok((false, json!({"n": n, "counterexample": [k.indices(), l.indices()]})));
        }
    }
    Ok((true, json!({"n": n, "pairs": pairs.len()})))
}

fn filtration(n: usize) -> Result<bool> {
    let one = GradedElement::<Rat>::one(&hx(n), ());
    let pt = GradedElement::<Rat>::top(&hx(n), ());
    let a = tilde_varphi_closed(&pt, &one)?;
    let b = tilde_varphi_closed(&one, &pt)?.scale_rat(&r(parity_sign(n)));
    let minus = a.sub(&b);
    Ok(minus.in_filtration_at_most(4 * n - 2) && !minus.in_filtration_at_most(4 * n - 3) && !a.add(&b).in_filtration_at_most(4 * n - 1))
}

fn pd_detail(n: usize) -> (bool, Value) {
    let rep = pd_sign_check(n);
    let failing: Vec<usize> = rep.per_degree.iter().filter(|(_, ok)| !ok).map(|(d, _)| *d).collect();
    (rep.holds(), json!({"n": n, "failing_degrees": failing, "observed_ratio": rep.uniform_ratio}))
}

fn twist(n: usize, gens: &[SpinElement<Rat>]) -> Result<(bool, Value)> {
    let o = OrlovMap::new(n)?;
    for (k, g) in gens.iter().enumerate() {
        let rep = twist_identity_check(&o, g)?;
        if !(rep.holds && rep.preserves_filtration && rep.graded_matches) {
            return Ok((false, json!({"n": n, "generator": k, "counterexample": rep.counterexample.map(|m| m.indices())})));
        }
    }
    Ok((true, json!({"n": n, "generators": gens.len()})))
}

fn n2_generators(rng: &mut ChaCha8Rng, count: usize) -> Result<Vec<SpinElement<Rat>>> {
    let lat = LatticeV::new(2);
    let mut gens = Vec::new();
    for c in [r(-1), Rat::new(1, 2), r(2)] {
        gens.push(spin_exp_even_nilpotent(&theta_clifford(lat, &c))?);
    }
    while gens.len() < count {
        gens.push(reflection_pair(rng, lat)?);
    }
    Ok(gens)
}

fn battery(level: Level) -> Vec<Check> {
    let full = level == Level::Full;
    vec![
        (
            "igusa-fixtures",
            Box::new(move |seed| {
                let one = GradedElement::<Rat>::one(&hx(3), ());
                let pt = GradedElement::<Rat>::top(&hx(3), ());
                let th = standard_theta::<Rat>(3, ());
                let th2 = wedge(&th, &th)?;
                let mut ok = true;
                for d in 1..=10i64 {
                    ok &= igusa_j(&one.add(&pt.scale_rat(&r(d))))? == Rat::new(-d * d, 4);
                    ok &= igusa_j(&one.scale_rat(&r(2)).sub(&th2.scale_rat(&r(d))))? == r(16 * d * d * d);
                }
                let mut rng = rng_for(seed, "igusa-fixtures");
                let w = one.scale_rat(&r(2)).sub(&th2);
                let j = igusa_j(&w)?;
                let samples = if full { 100 } else { 10 };
                for _ in 0..samples {
                    ok &= igusa_j(&random_spin(&mut rng, LatticeV::new(3))?.m(&w)?)? == j;
                }
                Ok((ok, json!({"invariance_samples": samples})))
            }),
        ),
        (
            "clifford-relation",
            Box::new(|_| {
                let mut ok = true;
                for n in 1..=3 {
                    let l = LatticeV::new(n);
                    for a in 0..l.dim() {
                        for b in 0..l.dim() {
                            let (va, vb) = (l.basis_vector::<Rat>(a, ()), l.basis_vector::<Rat>(b, ()));
                            let p = pair_v(l, &va, &vb)?;
                            for k in multi_indices(2 * n, |_| true) {
                                let s = GradedElement::monomial(&hx(n), (), k, Rat::one());
                                let lhs = m_vector(l, &va, &m_vector(l, &vb, &s)?)?.add(&m_vector(l, &vb, &m_vector(l, &va, &s)?)?);
                                ok &= lhs == s.scale(&p);
                            }
                        }
                    }
                }
                Ok((ok, json!({"ranks": [1, 2, 3]})))
            }),
        ),
        (
            "clifford-bijective",
            Box::new(|_| {
                let mut ranks = Vec::new();
                for n in 1..=2 {
                    let l = LatticeV::new(n);
                    let sb = multi_indices(2 * n, |_| true);
                    let mut rows = Vec::new();
                    for w in multi_indices(4 * n, |_| true) {
                        let a = CliffordElement::word(l, (), &w.indices().iter().map(|p| p - 1).collect::<Vec<_>>());
                        let mut row = Vec::new();
                        for &k in &sb {
                            row.extend(m_action(&a, &GradedElement::monomial(&hx(n), (), k, Rat::one()))?.to_vector(&sb));
                        }
                        rows.push(row);
                    }
                    ranks.push(rank_of_rows(&rows, ()));
                }
                Ok((ranks == vec![16, 256], json!({"ranks": ranks})))
            }),
        ),
        (
            "mukai-adjoint",
            Box::new(move |seed| {
                let mut rng = rng_for(seed, "mukai-adjoint");
                let samples = if full { 1000 } else { 200 };
                let mut ok = true;
                for k in 0..samples {
                    let n = 2 + k % 2;
                    let l = LatticeV::new(n);
                    let v: Vec<Rat> = (0..l.dim()).map(|_| r(rng.gen_range(-2..3))).collect();
                    let mut rs = || {
                        GradedElement::from_terms(&hx(n), (), (0..3).map(|_| (MultiIndex(rng.gen_range(0..1u32 << (2 * n))), r(rng.gen_range(-3..4)))))
                    };
                    let (s, t) = (rs(), rs());
                    ok &= mukai_pairing(&m_vector(l, &v, &s)?, &t)? == mukai_pairing(&s, &m_vector(l, &v, &t)?)?;
                }
                Ok((ok, json!({"samples": samples})))
            }),
        ),
        (
            "chevalley-two-path",
            Box::new(move |seed| {
                let mut rng = rng_for(seed, "chevalley-two-path");
                let mut details = Vec::new();
                let mut ok = true;
                for n in 1..=3 {
                    let (p, d) = two_path(n, if full { 500 } else { 100 }, &mut rng)?;
                    ok &= p;
                    details.push(d);
                }
                Ok((ok, Value::Array(details)))
            }),
        ),
        ("chevalley-filtration", Box::new(|_| Ok(((1..=3).map(filtration).collect::<Result<Vec<_>>>()?.iter().all(|b| *b), json!({"ranks": [1, 2, 3]}))))),
        (
            "pd-sign-lemma",
            Box::new(|_| {
                let (a, da) = pd_detail(1);
                let (b, db) = pd_detail(2);
                Ok((a && b, json!([da, db])))
            }),
        ),
        (
            "twist-identity",
            Box::new(move |seed| {
                let mut rng = rng_for(seed, "twist-identity");
                let all = all_reflection_pairs_n1()?;
                let n1: Vec<SpinElement<Rat>> = if full { all } else { all.into_iter().step_by(8).collect() };
                let (a, da) = twist(1, &n1)?;
                let (b, db) = twist(2, &n2_generators(&mut rng, if full { 50 } else { 10 })?)?;
                Ok((a && b, json!([da, db])))
            }),
        ),
        (
            "orlov-upper-square",
            Box::new(|_| {
                let o = OrlovMap::new(1)?;
                let gens = all_reflection_pairs_n1()?;
                for g in gens.iter().step_by(23) {
                    if let Some(k) = upper_square_check(&o, g)? {
                        return Ok((false, json!({"counterexample": k.indices()})));
                    }
                }
                Ok((true, json!({"generators": gens.len().div_ceil(23)})))
            }),
        ),
        (
            "orlov-invertible",
            Box::new(move |seed| {
                let mut rng = rng_for(seed, "orlov-invertible");
                let mut ok = true;
                for n in 1..=2 {
                    let o = OrlovMap::new(n)?;
                    let d = GradedBasis::doubled_x(n);
                    for _ in 0..5 {
                        let x = GradedElement::from_terms(&d, (), (0..6).map(|_| (MultiIndex(rng.gen_range(0..1u32 << (4 * n))), r(rng.gen_range(-3..4)))));
                        ok &= o.inverse(&orlov_phi_tensor(&x)?)? == x;
                    }
                }
                Ok((ok, json!({"samples_per_rank": 5})))
            }),
        ),
        (
            "hodge-weil-projection",
            Box::new(|_| {
                let mut failures = Vec::new();
                for n in 2..=3 {
                    for d in 1..=3u64 {
                        let rep = hodge_weil_projection(&standard_secant(n, d)?)?;
                        if !(rep.in_weight_2n && rep.spans_top_w1) {
                            failures.push([n as u64, d]);
                        }
                    }
                }
                Ok((failures.is_empty(), json!({"failures": failures})))
            }),
        ),
        (
            "weil-structure",
            Box::new(|_| {
                let mut failures = Vec::new();
                for n in 1..=3usize {
                    for d in [1u64, 2, 3, 5] {
                        let c = cm_from_secant(&standard_secant(n, d)?)?;
                        let i = standard_complex_structure(n);
                        let ok = c.validate().is_ok()
                            && gram_signature(&real_part_gram(&c))? == (2 * n, 2 * n)
                            && discriminant_h(&c, &standard_k_basis(n))? == r(parity_sign(n) * (d as i64).pow(3 * n as u32))
                            && (n < 2 || g_form(&c, &i)?.definiteness == Definiteness::Negative)
                            && centralizer_dims(&c, &i)? == (4 * n * n - 1, 2 * n * n - 1);
                        if !ok {
                            failures.push([n as u64, d]);
                        }
                    }
                }
                Ok((failures.is_empty(), json!({"failures": failures})))
            }),
        ),
        (
            "theta-chi-table",
            Box::new(|_| {
                let mut count = 0;
                for n in 2..=4usize {
                    for d in 1..=3i64 {
                        for q in 1..=2i64 {
                            for tau in 1..=2i64 {
                                for a in 0..=2i64 {
                                    for b in 0..=2i64 {
                                        let (al, be) = alpha_beta(n, d, 0, tau, q)?;
                                        let v = al.scale(&r(a)).add(&be.scale(&r(b)))?;
                                        if euler_pairing(&v, &v)? != chi_closed_form(n, d, tau, q, a, b) {
                                            return Ok((false, json!({"n": n, "d": d, "q": q, "tau": tau, "a": a, "b": b})));
                                        }
                                        count += 1;
                                    }
                                }
                            }
                        }
                    }
                }
                Ok((true, json!({"values": count})))
            }),
        ),
        (
            "theta-exponential",
            Box::new(move |seed| {
                let mut rng = rng_for(seed, "theta-exponential");
                for _ in 0..20 {
                    let (n, d, rho, q) = (rng.gen_range(2..=6usize), rng.gen_range(1..=7i64), rng.gen_range(-3..=3i64), rng.gen_range(1..=3i64));
                    let tau = [-2i64, -1, 1, 2, 3][rng.gen_range(0..5)];
                    let (al, be) = alpha_beta(n, d, rho, tau, q)?;
                    let du = d as u64;
                    let lhs = texp(&QuadExt::new(du, Rat::new(rho, q), Rat::new(tau, q)), n).scale(&QuadExt::rational(du, r(q).pow(n as u32)));
                    let rhs = al.to_quad(du).add(&be.to_quad(du).scale(&QuadExt::new(du, Rat::zero(), r(tau))))?;
                    if lhs != rhs {
                        return Ok((false, json!({"n": n, "d": d, "rho": rho, "tau": tau, "q": q})));
                    }
                }
                Ok((true, json!({"tuples": 20})))
            }),
        ),
        (
            "genus4-coefficients",
            Box::new(|_| {
                for d in 1..=10 {
                    for a3 in -3..=1 {
                        if solve_genus4_coeffs(d, a3)? != genus4_closed_form(d, a3) {
                            return Ok((false, json!({"d": d, "a3": a3})));
                        }
                    }
                }
                Ok((true, json!({"solves": 50})))
            }),
        ),
        (
            "contraction-kernel",
            Box::new(|_| {
                let mut seen = Vec::new();
                for d in 1..=5 {
                    let rep = annihilator_kernel(&ch_secant_ideal_threefold(d))?;
                    seen.push([rep.ht_dim, rep.rank, rep.kernel_dim]);
                }
                Ok((seen.iter().all(|s| *s == [15, 6, 9]), json!({"dim_rank_kernel": seen})))
            }),
        ),
        (
            "product-annihilator",
            Box::new(|_| {
                let ch = ch_secant_ideal_threefold(1);
                let p = product_annihilator(&ch, &ch)?;
                Ok((p.ht_dim == 66 && p.kernel_dim == 18 && p.decomposition_holds && !p.degenerate, serde_json::to_value(&p)?))
            }),
        ),
        (
            "secant-extraction",
            Box::new(|_| {
                let one = GradedElement::<Rat>::one(&hx(3), ());
                let th = standard_theta::<Rat>(3, ());
                let th2 = wedge(&th, &th)?;
                let mut dims = Vec::new();
                let mut ok = true;
                for d in [1i64, 2] {
                    let w = one.scale_rat(&r(2)).sub(&th2.scale_rat(&r(d)));
                    let s = secant_plane(&w)?;
                    let root = QuadExt::omega(d as u64);
                    let (plus, minus) = (exp_theta(3, &root)?, exp_theta(3, &-&root)?);
                    let [a, b] = &s.lines;
                    ok &= s.d == d && ((same_line(a, &plus) && same_line(b, &minus)) || (same_line(a, &minus) && same_line(b, &plus)));
                    let dim = stabilizer_lie(&w)?.len();
                    ok &= dim == 35;
                    dims.push(dim);
                }
                Ok((ok, json!({"stabilizer_dims": dims})))
            }),
        ),
        (
            "kappa-invariance",
            Box::new(|_| {
                let mut ok = true;
                for d in [1u64, 2] {
                    ok &= kappa_is_infinitesimally_invariant(&standard_secant(2, d)?)?;
                }
                Ok((ok, json!({"n": 2, "d": [1, 2]})))
            }),
        ),
        (
            "kappa3-independence",
            Box::new(|_| {
                let mut ok = true;
                for d in [1u64, 2, 3] {
                    let rep = kappa_independence(&standard_secant(3, d)?)?;
                    ok &= !rep.rank.is_zero() && rep.independent;
                }
                Ok((ok, json!({"n": 3, "d": [1, 2, 3]})))
            }),
        ),
    ]
}

fn run_checks(checks: Vec<Check>, seed: u64) -> Vec<CheckResult> {
    checks
        .into_par_iter()
        .map(|(name, f)| match f(seed) {
            Ok((passed, detail)) => CheckResult { name: name.to_string(), passed, detail },
            Err(e) => CheckResult { name: name.to_string(), passed: false, detail: json!({"error": format!("{e:#}")}) },
        })
        .collect()
}

fn summarize(mut header: Value, results: Vec<CheckResult>) -> Result<Outcome> {
    let failed: Vec<&str> = results.iter().filter(|c| !c.passed).map(|c| c.name.as_str()).collect();
    let passed = failed.is_empty();
    header["passed"] = json!(results.len() - failed.len());
    header["failed"] = json!(failed);
    header["checks"] = serde_json::to_value(&results)?;
    Ok(Outcome { report: header, passed })
}

pub fn verify(level: Level, seed: u64) -> Result<Outcome> {
    let results = run_checks(battery(level), seed);
    summarize(json!({"level": format!("{level:?}").to_lowercase(), "seed": seed}), results)
}

pub fn chevalley_check(n: usize, seed: u64, level: Level) -> Result<Outcome> {
    if n == 0 || n > 3 {
        bail!("chevalley-check supports n in 1..=3");
    }
    let full = level == Level::Full;
    let mut checks: Vec<Check> = vec![
        ("two-path", Box::new(move |s| two_path(n, if full { 500 } else { 100 }, &mut rng_for(s, "two-path")))),
        ("filtration", Box::new(move |_| Ok((filtration(n)?, json!({}))))),
        ("pd-sign-lemma", Box::new(move |_| Ok(pd_detail(n)))),
    ];
    if n <= 2 {
        checks.push((
            "twist-identity",
            Box::new(move |s| {
                let mut rng = rng_for(s, "twist-identity");
                let gens = if n == 1 {
                    let all = all_reflection_pairs_n1()?;
                    if full { all } else { all.into_iter().step_by(8).collect() }
                } else {
                    n2_generators(&mut rng, if full { 50 } else { 10 })?
                };
                twist(n, &gens)
            }),
        ));
        checks.push((
            "upper-square",
            Box::new(move |s| {
                let mut rng = rng_for(s, "upper-square");
                let o = OrlovMap::new(n)?;
                for _ in 0..if full { 20 } else { 5 } {
                    if let Some(k) = upper_square_check(&o, &reflection_pair(&mut rng, LatticeV::new(n))?)? {
                        return Ok((false, json!({"counterexample": k.indices()})));
                    }
                }
                Ok((true, json!({})))
            }),
        ));
    }
    let results = run_checks(checks, seed);
    summarize(json!({"n": n, "seed": seed, "level": format!("{level:?}").to_lowercase()}), results)
}
