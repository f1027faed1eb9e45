//! The density and functional mini-languages shared by flags and config
//! files.
//!
//! ```text
//! gaussian:alpha=1.0,n=1.0
//! gaussian-mix:[w,alpha,cx,cy,cz;w,alpha,cx,cy,cz]
//! slater:zeta=1.0,n=1.0
//! aniso:ax=1.0,ay=2.0,az=0.5,w=1.0
//!
//! ne | ext(z=1) | ext | hartree | tf | vw
//! ```
//!
//! Omitted keyword parameters default to 1.

use scalelab_core::{DensityModel, FunctionalKind, FunctionalSpec, GaussianTerm};

#[derive(Debug, thiserror::Error, PartialEq)]
#[error("cannot parse {what} `{input}`: {reason}")]
pub struct ParseError {
    pub what: &'static str,
    pub input: String,
    pub reason: String,
}

fn fail(what: &'static str, input: &str, reason: impl Into<String>) -> ParseError {
    ParseError { what, input: input.to_string(), reason: reason.into() }
}

fn number(what: &'static str, input: &str, s: &str) -> Result<f64, ParseError> {
    s.trim().parse::<f64>().map_err(|_| fail(what, input, format!("`{}` is not a number", s.trim())))
}

/// `key=value` pairs for the given keys, each defaulting to 1.
fn keywords<const K: usize>(input: &str, body: &str, keys: [&str; K]) -> Result<[f64; K], ParseError> {
    let mut out = [1.0; K];
    let mut seen = [false; K];
    for item in body.split(',').map(str::trim).filter(|s| !s.is_empty()) {
        let (key, value) =
            item.split_once('=').ok_or_else(|| fail("density", input, format!("expected key=value, got `{item}`")))?;
        let key = key.trim();
        let slot = keys
            .iter()
            .position(|k| *k == key)
            .ok_or_else(|| fail("density", input, format!("unknown parameter `{key}`")))?;
        if seen[slot] {
            return Err(fail("density", input, format!("parameter `{key}` given twice")));
        }
        seen[slot] = true;
        out[slot] = number("density", input, value)?;
    }
    Ok(out)
}

fn mixture(input: &str, body: &str) -> Result<Vec<GaussianTerm>, ParseError> {
    let inner = body
        .trim()
        .strip_prefix('[')
        .and_then(|s| s.strip_suffix(']'))
        .ok_or_else(|| fail("density", input, "mixture terms must be enclosed in [...]"))?;
    inner
        .split(';')
        .map(|term| {
            let v = term.split(',').map(|x| number("density", input, x)).collect::<Result<Vec<_>, _>>()?;
            match v[..] {
                [weight, alpha, cx, cy, cz] => Ok(GaussianTerm { weight, alpha, center: [cx, cy, cz] }),
                _ => Err(fail("density", input, format!("term `{term}` needs 5 numbers: w,alpha,cx,cy,cz"))),
            }
        })
        .collect()
}

pub fn parse_density(input: &str) -> Result<DensityModel, ParseError> {
    let s = input.trim();
    let (kind, body) = s.split_once(':').unwrap_or((s, ""));
    let model = match kind.trim() {
        "gaussian" => {
            let [alpha, n] = keywords(input, body, ["alpha", "n"])?;
            DensityModel::gaussian(n, alpha)
        }
        "gaussian-mix" => DensityModel::gaussian_mix(mixture(input, body)?),
        "slater" => {
            let [zeta, n] = keywords(input, body, ["zeta", "n"])?;
            DensityModel::slater(n, zeta)
        }
        "aniso" => {
            let [ax, ay, az, w] = keywords(input, body, ["ax", "ay", "az", "w"])?;
            DensityModel::anisotropic(w, [ax, ay, az])
        }
        other => return Err(fail("density", input, format!("unknown density kind `{other}`"))),
    };
    model.map_err(|e| fail("density", input, e.to_string()))
}

/// Canonical text for a density; [`parse_density`] reads it back exactly.
pub fn format_density(d: &DensityModel) -> String {
    match d {
        DensityModel::GaussianMix(terms) if terms.len() == 1 && terms[0].center == [0.0; 3] => {
            format!("gaussian:alpha={},n={}", terms[0].alpha, terms[0].weight)
        }
        DensityModel::GaussianMix(terms) => {
            let body: Vec<String> = terms
                .iter()
                .map(|t| format!("{},{},{},{},{}", t.weight, t.alpha, t.center[0], t.center[1], t.center[2]))
                .collect();
            format!("gaussian-mix:[{}]", body.join(";"))
        }
        DensityModel::Slater { electrons, zeta } => format!("slater:zeta={zeta},n={electrons}"),
        DensityModel::AnisotropicGaussian { weight, exponents: [ax, ay, az] } => {
            format!("aniso:ax={ax},ay={ay},az={az},w={weight}")
        }
    }
}

pub fn parse_functional(input: &str) -> Result<FunctionalSpec, ParseError> {
    let s = input.trim();
    let kind = match s {
        "ne" => FunctionalKind::NumberOfElectrons,
        "ext" => FunctionalKind::ExternalCoulomb { z: 1.0 },
        "hartree" => FunctionalKind::Hartree,
        "tf" => FunctionalKind::ThomasFermi,
        "vw" => FunctionalKind::VonWeizsaecker,
        _ => {
            let z = s
                .strip_prefix("ext(")
                .and_then(|r| r.strip_suffix(')'))
                .and_then(|r| r.trim().strip_prefix("z="))
                .ok_or_else(|| fail("functional", input, "expected one of ne, ext(z=..), hartree, tf, vw"))?;
            FunctionalKind::ExternalCoulomb { z: number("functional", input, z)? }
        }
    };
    FunctionalSpec::new(kind).map_err(|e| fail("functional", input, e.to_string()))
}

/// Splits on commas outside parentheses and brackets.
pub fn split_list(s: &str) -> Vec<&str> {
    let mut out = Vec::new();
    let mut depth = 0i32;
    let mut start = 0;
    for (i, c) in s.char_indices() {
        match c {
            '(' | '[' => depth += 1,
            ')' | ']' => depth -= 1,
            ',' if depth == 0 => {
                out.push(s[start..i].trim());
                start = i + 1;
            }
            _ => {}
        }
    }
    out.push(s[start..].trim());
    out.retain(|x| !x.is_empty());
    out
}

pub fn parse_reals(s: &str) -> Result<Vec<f64>, ParseError> {
    split_list(s).into_iter().map(|x| number("number list", s, x)).collect()
}
