//! The computational subcommands.

use crate::Outcome;
use anyhow::{bail, Context, Result};
use serde_json::{json, Value};
use spinweil::exterior::GradedElement;
use spinweil::hodgemodel::{annihilator_kernel, product_annihilator};
use spinweil::igusa::{igusa_coords, igusa_j};
use spinweil::json::{parse, GradedJson, SecantJson, ThetaPolyJson};
use spinweil::linalg::gram_signature;
use spinweil::spinors::{secant_plane, stabilizer_lie, standard_secant, SecantData};
use spinweil::thetaring::{
    alpha_beta, ch_ideal_class, ch_o_w, ch_secant_ideal_threefold, genus4_closed_form, solve_genus4_coeffs, ThetaPoly,
};
use spinweil::weil::{cm_from_secant, discriminant_h, hermitian_gram, is_k_basis, real_part_gram, standard_k_basis};
use spinweil::Rat;

fn to_value<V: serde::Serialize>(v: &V) -> Result<Value> {
    serde_json::to_value(v).context("serializing the report")
}

fn read_graded(n: usize, text: &str) -> Result<GradedElement<Rat>> {
    let j: GradedJson<Rat> = parse(text)?;
    let w = GradedElement::from_json(&j, ())?;
    if w.basis.name != spinweil::exterior::GradedBasis::h_x(n).name {
        bail!("expected an element of {}, got basis {}", spinweil::exterior::GradedBasis::h_x(n).name, w.basis.name);
    }
    Ok(w)
}

pub fn igusa(n: usize, text: &str) -> Result<Outcome> {
    let w = read_graded(n, text)?;
    let j = igusa_j(&w)?;
    let c = igusa_coords(&w)?;
    Ok(Outcome::ok(json!({
        "J": to_value(&j)?,
        "J_text": j.to_string(),
        "coords": {"x0": to_value(&c.x0)?, "x": to_value(&c.x.to_json())?, "y": to_value(&c.y.to_json())?, "y0": to_value(&c.y0)?},
    })))
}

pub fn secant(n: usize, text: &str) -> Result<Outcome> {
    let w = read_graded(n, text)?;
    let s = secant_plane(&w)?;
    let stab = stabilizer_lie(&w)?.len();
    Ok(Outcome::ok(json!({
        "secant": to_value(&s.to_json())?,
        "split": s.is_split(),
        "stabilizer_dim": stab,
    })))
}

pub fn hermitian(n: Option<usize>, d: Option<u64>, text: Option<&str>) -> Result<Outcome> {
    let s = match (text, n, d) {
        (Some(t), _, _) => SecantData::from_json(&parse::<SecantJson>(t)?)?,
        (None, Some(n), Some(d)) => standard_secant(n, d)?,
        _ => bail!("pass either --input or both --n and --d"),
    };
    let c = cm_from_secant(&s)?;
    let basis = standard_k_basis(s.n);
    if !is_k_basis(&c, &basis)? {
        bail!("the f-block does not give a K-basis for this secant");
    }
    let (p, q) = gram_signature(&real_part_gram(&c))?;
    let gram = hermitian_gram(&c, &basis)?;
    let det = discriminant_h(&c, &basis)?;
    Ok(Outcome::ok(json!({
        "n": s.n,
        "d": c.d,
        // the real part of H has twice the signature of H
        "signature": [p / 2, q / 2],
        "det": to_value(&det)?,
        "det_text": det.to_string(),
        "gram": to_value(&gram.to_json())?,
    })))
}

pub struct ThetaParams {
    pub n: usize,
    pub d: Option<i64>,
    pub m: Option<i64>,
    pub rho: i64,
    pub tau: i64,
    pub q: i64,
    pub k: Option<usize>,
    pub a3: Option<i64>,
}

fn need<T: Copy>(v: Option<T>, name: &str, formula: &str) -> Result<T> {
    v.with_context(|| format!("formula {formula} needs --{name}"))
}

pub fn theta_poly(formula: &str, p: &ThetaParams) -> Result<ThetaPoly<Rat>> {
    Ok(match formula {
        "ch-secant-ideal" => ch_secant_ideal_threefold(need(p.d, "d", formula)?),
        "ideal-class" => ch_ideal_class(need(p.m, "m", formula)?),
        "alpha" => alpha_beta(p.n, need(p.d, "d", formula)?, p.rho, p.tau, p.q)?.0,
        "beta" => alpha_beta(p.n, need(p.d, "d", formula)?, p.rho, p.tau, p.q)?.1,
        "o-w" => ch_o_w(need(p.k, "k", formula)?)?,
        "one" => ThetaPoly::one(p.n, ()),
        "theta" => ThetaPoly::theta(p.n, ()),
        "pt" => ThetaPoly::pt(p.n, ()),
        other => bail!("unknown formula {other}"),
    })
}

pub fn theta(formula: &str, p: &ThetaParams) -> Result<Outcome> {
    if formula == "genus4" {
        let (d, a3) = (need(p.d, "d", formula)?, need(p.a3, "a3", formula)?);
        let solved = solve_genus4_coeffs(d, a3)?;
        let closed = genus4_closed_form(d, a3);
        let passed = solved == closed;
        return Ok(Outcome { report: json!({"solved": to_value(&solved)?, "closed_form": to_value(&closed)?, "agree": passed}), passed });
    }
    let poly = theta_poly(formula, p)?;
    Ok(Outcome::ok(to_value(&poly.to_json())?))
}

pub fn contraction_kernel(text: Option<&str>, d: Option<i64>, product: bool) -> Result<Outcome> {
    let ch = match (text, d) {
        (Some(t), _) => ThetaPoly::from_json(&parse::<ThetaPolyJson<Rat>>(t)?, ())?,
        (None, Some(d)) => ch_secant_ideal_threefold(d),
        (None, None) => bail!("pass --input or --d"),
    };
    let rep = annihilator_kernel(&ch)?;
    let mut out = json!({"n": rep.n, "ht_dim": rep.ht_dim, "rank": rep.rank, "kernel_dim": rep.kernel_dim});
    if product {
        out["product"] = to_value(&product_annihilator(&ch, &ch)?)?;
    }
    Ok(Outcome::ok(out))
}
