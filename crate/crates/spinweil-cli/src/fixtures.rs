//! Canonical JSON for named objects.
//!
//! Names: `theta-n<N>`, `c1-n<N>`, `alpha-n<N>-d<D>`, `beta-n<N>-d<D>`,
//! `w1-n<N>-d<D>`, `secant-n<N>-d<D>`.

use anyhow::{bail, Context, Result};
use serde_json::Value;
use spinweil::chevalley::c1_poincare;
use spinweil::lattice::standard_theta;
use spinweil::spinors::standard_secant;
use spinweil::thetaring::alpha_beta;
use spinweil::Rat;

fn param(part: &str, prefix: &str, name: &str) -> Result<u64> {
    part.strip_prefix(prefix)
        .and_then(|v| v.parse().ok())
        .with_context(|| format!("fixture {name}: expected {prefix}<integer>, got {part}"))
}

pub fn emit_fixture(name: &str) -> Result<Value> {
    let parts: Vec<&str> = name.split('-').collect();
    let (n, d) = match parts.as_slice() {
        [_, n] => (param(n, "n", name)? as usize, None),
        [_, n, d] => (param(n, "n", name)? as usize, Some(param(d, "d", name)?)),
        _ => bail!("unknown fixture {name}"),
    };
    if n == 0 || n > 6 {
        bail!("fixture {name}: n must be in 1..=6");
    }
    let value = match (parts[0], d) {
        ("theta", None) => serde_json::to_value(standard_theta::<Rat>(n, ()).to_json())?,
        ("c1", None) => serde_json::to_value(c1_poincare(n).to_json())?,
        ("alpha", Some(d)) => serde_json::to_value(alpha_beta(n, d as i64, 0, 1, 1)?.0.to_json())?,
        ("beta", Some(d)) => serde_json::to_value(alpha_beta(n, d as i64, 0, 1, 1)?.1.to_json())?,
        ("w1", Some(d)) => serde_json::to_value(standard_secant(n, d)?.isotropic[0].to_json())?,
        ("secant", Some(d)) => serde_json::to_value(standard_secant(n, d)?.to_json())?,
        _ => bail!("unknown fixture {name}"),
    };
    Ok(value)
}
