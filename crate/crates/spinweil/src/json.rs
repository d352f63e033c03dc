//! JSON encodings of the public value types.
//!
//! Scalars serialize themselves (`{"num","den"}` for rationals, `{"d","re","im"}`
//! for quadratic elements). Graded elements use
//! `{"basis": name, "terms": [{"idx": [1, 4], "coeff": scalar}]}` with 1-based
//! generator indices, matrices are row-major, and subspaces carry their ambient
//! rank parameter.

use crate::error::{Error, Result};
use crate::exterior::{GradedBasis, GradedElement, MultiIndex};
use crate::lattice::{LatticeV, Subspace};
use crate::linalg::Matrix;
use crate::scalars::{QuadExt, Rat, Scalar};
use crate::spinors::SecantData;
use crate::thetaring::ThetaPoly;
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TermJson<C> {
    pub idx: Vec<usize>,
    pub coeff: C,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GradedJson<C> {
    pub basis: String,
    /// Generator labels, required only for bases that cannot be looked up by name.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub labels: Option<Vec<String>>,
    pub terms: Vec<TermJson<C>>,
}

impl<T: Scalar> GradedElement<T> {
    pub fn to_json(&self) -> GradedJson<T> {
        let labels = match GradedBasis::by_name(&self.basis.name) {
            Ok(b) if *b == *self.basis => None,
            _ => Some(self.basis.labels.clone()),
        };
        GradedJson {
            basis: self.basis.name.clone(),
            labels,
            terms: self.terms.iter().map(|(k, c)| TermJson { idx: k.indices(), coeff: c.clone() }).collect(),
        }
    }
    /// Rebuilds an element, with `ctx` used only when there are no terms.
    pub fn from_json(j: &GradedJson<T>, ctx: T::Ctx) -> Result<Self> {
        let basis = match &j.labels {
            Some(labels) => GradedBasis::new(j.basis.clone(), labels.clone())?,
            None => GradedBasis::by_name(&j.basis)?,
        };
        let ctx = j.terms.first().map_or(ctx, |t| t.coeff.ctx());
        let r = basis.rank();
        let mut terms = Vec::with_capacity(j.terms.len());
        for t in &j.terms {
            if t.coeff.ctx() != ctx {
                return Err(Error::Invalid("mixed scalar fields in one element".into()));
            }
            let mut sorted = t.idx.clone();
            sorted.sort_unstable();
            sorted.dedup();
            if sorted.len() != t.idx.len() || sorted.iter().any(|&i| i == 0 || i > r) {
                return Err(Error::Invalid(format!("bad multi-index {:?} for rank {r}", t.idx)));
            }
            // unsorted input is an exterior product of generators in the given order
            let sign = inversion_sign(&t.idx);
            let c = if sign < 0 { t.coeff.negated() } else { t.coeff.clone() };
            terms.push((MultiIndex::from_indices(&sorted), c));
        }
        Ok(GradedElement::from_terms(&basis, ctx, terms))
    }
}

fn inversion_sign(idx: &[usize]) -> i64 {
    let inv = (0..idx.len()).flat_map(|a| (a + 1..idx.len()).map(move |b| (a, b))).filter(|&(a, b)| idx[a] > idx[b]).count();
    if inv % 2 == 0 {
        1
    } else {
        -1
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MatrixJson<C> {
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<Vec<C>>,
}

impl<T: Scalar> Matrix<T> {
    pub fn to_json(&self) -> MatrixJson<T> {
        MatrixJson { rows: self.rows, cols: self.cols, data: self.to_rows() }
    }
    pub fn from_json(j: &MatrixJson<T>, ctx: T::Ctx) -> Result<Self> {
        if j.data.len() != j.rows || j.data.iter().any(|r| r.len() != j.cols) {
            return Err(Error::Invalid(format!("matrix data does not have shape {}x{}", j.rows, j.cols)));
        }
        let ctx = j.data.iter().flatten().next().map_or(ctx, |c| c.ctx());
        let mut m = Matrix::zeros(j.rows, j.cols, ctx);
        for (i, row) in j.data.iter().enumerate() {
            for (k, c) in row.iter().enumerate() {
                m.set(i, k, c.clone());
            }
        }
        Ok(m)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SubspaceJson<C> {
    /// `V` of rank `4n`.
    pub ambient_n: usize,
    pub rows: Vec<Vec<C>>,
}

impl<T: Scalar> Subspace<T> {
    pub fn to_json(&self) -> SubspaceJson<T> {
        SubspaceJson { ambient_n: self.ambient.n, rows: self.rows.clone() }
    }
    pub fn from_json(j: &SubspaceJson<T>, ctx: T::Ctx) -> Result<Self> {
        let lat = LatticeV::new(j.ambient_n);
        if j.rows.iter().any(|r| r.len() != lat.dim()) {
            return Err(Error::DimensionMismatch { expected: lat.dim(), got: j.rows.iter().map(Vec::len).find(|&l| l != lat.dim()).unwrap_or(0) });
        }
        let ctx = j.rows.iter().flatten().next().map_or(ctx, |c| c.ctx());
        Ok(Subspace::span(lat, ctx, &j.rows))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ThetaPolyJson<C> {
    pub n: usize,
    pub coeffs: Vec<C>,
}

impl<T: Scalar> ThetaPoly<T> {
    pub fn to_json(&self) -> ThetaPolyJson<T> {
        ThetaPolyJson { n: self.n, coeffs: self.coeffs.clone() }
    }
    pub fn from_json(j: &ThetaPolyJson<T>, ctx: T::Ctx) -> Result<Self> {
        let ctx = j.coeffs.first().map_or(ctx, |c| c.ctx());
        ThetaPoly::new(j.n, ctx, j.coeffs.clone())
    }
}

/// The secant bundle: plane generators, `d`, and the two pure spinor lines with
/// their isotropic subspaces.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SecantJson {
    pub n: usize,
    pub d: i64,
    pub plane: [GradedJson<Rat>; 2],
    pub lines: [GradedJson<QuadExt>; 2],
    pub isotropic: [SubspaceJson<QuadExt>; 2],
}

impl SecantData {
    pub fn to_json(&self) -> SecantJson {
        SecantJson {
            n: self.n,
            d: self.d,
            plane: [self.plane[0].to_json(), self.plane[1].to_json()],
            lines: [self.lines[0].to_json(), self.lines[1].to_json()],
            isotropic: [self.isotropic[0].to_json(), self.isotropic[1].to_json()],
        }
    }
    /// Rebuilds and validates the bundle. The isotropic subspaces are recomputed
    /// from the lines and must agree with the stored ones.
    pub fn from_json(j: &SecantJson) -> Result<SecantData> {
        let plane = [GradedElement::from_json(&j.plane[0], ())?, GradedElement::from_json(&j.plane[1], ())?];
        let ctx = if j.d > 0 { j.d as u64 } else { 1 };
        let l1 = GradedElement::from_json(&j.lines[0], ctx)?;
        let s = SecantData::from_line(j.n, plane, j.d, l1)?;
        let stored = [Subspace::from_json(&j.isotropic[0], ctx)?, Subspace::from_json(&j.isotropic[1], ctx)?];
        let l2 = GradedElement::from_json(&j.lines[1], ctx)?;
        if stored != s.isotropic || l2 != s.lines[1] {
            return Err(Error::Invalid("secant lines and isotropic subspaces are inconsistent".into()));
        }
        Ok(s)
    }
}

/// Serializes any value to pretty JSON with a trailing newline.
pub fn to_pretty<V: Serialize>(v: &V) -> Result<String> {
    let mut s = serde_json::to_string_pretty(v).map_err(|e| Error::Invalid(e.to_string()))?;
    s.push('\n');
    Ok(s)
}

pub fn parse<V: DeserializeOwned>(text: &str) -> Result<V> {
    serde_json::from_str(text).map_err(|e| Error::Invalid(format!("malformed JSON: {e}")))
}
