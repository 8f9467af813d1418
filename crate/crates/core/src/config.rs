//! Plain-text `key = value` configuration.
//!
//! ```text
//! # copper plane, two-term dielectric sphere
//! material.plane.model = drude
//! material.plane.lambda_p_nm = 136
//! material.plane.gamma_ratio = 0.0033
//! material.sphere.model = sellmeier
//! material.sphere.terms = 4.91,106; 0.2,50
//! numerics.xi_nodes = 60
//! ```
//!
//! Blank lines and `#` comments are ignored. Unknown keys are errors so a typo
//! never silently falls back to a default.

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::energy::NumericsSpec;
use crate::error::{Error, Result};
use crate::material::{DrudeParams, MaterialModel, SellmeierParams, SellmeierTerm};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Settings {
    pub plane: MaterialModel,
    pub sphere: MaterialModel,
    pub numerics: NumericsSpec,
}

impl Default for Settings {
    fn default() -> Self {
        Settings {
            plane: MaterialModel::copper(),
            sphere: MaterialModel::diamond(),
            numerics: NumericsSpec::default(),
        }
    }
}

impl Settings {
    pub fn from_file(path: &Path) -> Result<Self> {
        let text =
            std::fs::read_to_string(path).map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        Settings::parse(&text)
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut body: [BTreeMap<&str, (usize, &str)>; 2] = Default::default();
        let mut num = NumericsSpec::default();
        for (i, raw) in text.lines().enumerate() {
            let lineno = i + 1;
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| Error::Config(format!("line {lineno}: expected key = value")))?;
            let (key, value) = (key.trim(), value.trim());
            if let Some(rest) = key.strip_prefix("material.") {
                let (which, field) = rest
                    .split_once('.')
                    .ok_or_else(|| Error::Config(format!("line {lineno}: incomplete key {key}")))?;
                let slot = match which {
                    "plane" => 0,
                    "sphere" => 1,
                    _ => return Err(Error::Config(format!("line {lineno}: unknown body {which:?}"))),
                };
                match field {
                    "model" | "lambda_p_nm" | "gamma_ratio" | "terms" => {
                        body[slot].insert(field, (lineno, value));
                    }
                    _ => return Err(Error::Config(format!("line {lineno}: unknown key {key}"))),
                }
            } else if let Some(field) = key.strip_prefix("numerics.") {
                set_numeric(&mut num, field, value).map_err(|m| Error::Config(format!("line {lineno}: {m}")))?;
            } else {
                return Err(Error::Config(format!("line {lineno}: unknown key {key}")));
            }
        }
        let [plane, sphere] = body;
        let s = Settings {
            plane: build_model(&plane, MaterialModel::copper())?,
            sphere: build_model(&sphere, MaterialModel::diamond())?,
            numerics: num,
        };
        s.plane.validate().map_err(|e| Error::Config(format!("plane: {e}")))?;
        s.sphere.validate().map_err(|e| Error::Config(format!("sphere: {e}")))?;
        s.numerics
            .validate()
            .map_err(|e| Error::Config(format!("numerics: {e}")))?;
        Ok(s)
    }
}

fn parse_f64(lineno: usize, key: &str, v: &str) -> Result<f64> {
    v.parse::<f64>()
        .map_err(|_| Error::Config(format!("line {lineno}: {key} = {v:?} is not a number")))
}

fn build_model(fields: &BTreeMap<&str, (usize, &str)>, default: MaterialModel) -> Result<MaterialModel> {
    let kind = match fields.get("model") {
        Some(&(_, m)) => m.to_ascii_lowercase(),
        None => match &default {
            MaterialModel::Drude(_) => "drude".into(),
            MaterialModel::Sellmeier(_) => "sellmeier".into(),
            MaterialModel::Vacuum => "vacuum".into(),
        },
    };
    let allowed: &[&str] = match kind.as_str() {
        "drude" => &["model", "lambda_p_nm", "gamma_ratio"],
        "sellmeier" => &["model", "terms"],
        "vacuum" => &["model"],
        other => {
            let line = fields.get("model").map_or(0, |f| f.0);
            return Err(Error::Config(format!("line {line}: unknown material model {other:?}")));
        }
    };
    if let Some((k, (line, _))) = fields.iter().find(|(k, _)| !allowed.contains(k)) {
        return Err(Error::Config(format!(
            "line {line}: {k} does not apply to a {kind} material"
        )));
    }
    Ok(match kind.as_str() {
        "drude" => {
            let mut p = match default {
                MaterialModel::Drude(p) => p,
                _ => DrudeParams::COPPER,
            };
            if let Some(&(l, v)) = fields.get("lambda_p_nm") {
                p.lambda_p_nm = parse_f64(l, "lambda_p_nm", v)?;
            }
            if let Some(&(l, v)) = fields.get("gamma_ratio") {
                p.gamma_ratio = parse_f64(l, "gamma_ratio", v)?;
            }
            MaterialModel::Drude(p)
        }
        "sellmeier" => match fields.get("terms") {
            Some(&(l, v)) => MaterialModel::Sellmeier(parse_terms(l, v)?),
            None => match default {
                MaterialModel::Sellmeier(p) => MaterialModel::Sellmeier(p),
                _ => MaterialModel::Sellmeier(SellmeierParams::diamond()),
            },
        },
        _ => MaterialModel::Vacuum,
    })
}

/// `B,λ; B,λ; ...`
fn parse_terms(lineno: usize, v: &str) -> Result<SellmeierParams> {
    let mut terms = Vec::new();
    for pair in v.split(';').map(str::trim).filter(|p| !p.is_empty()) {
        let (b, l) = pair
            .split_once(',')
            .ok_or_else(|| Error::Config(format!("line {lineno}: Sellmeier term {pair:?} is not B,lambda_nm")))?;
        terms.push(SellmeierTerm {
            strength: parse_f64(lineno, "terms", b.trim())?,
            lambda_nm: parse_f64(lineno, "terms", l.trim())?,
        });
    }
    SellmeierParams::new(terms).map_err(|e| Error::Config(format!("line {lineno}: {e}")))
}

fn set_numeric(num: &mut NumericsSpec, field: &str, v: &str) -> std::result::Result<(), String> {
    fn p<T: std::str::FromStr>(field: &str, v: &str) -> std::result::Result<T, String> {
        v.parse().map_err(|_| format!("numerics.{field} = {v:?} is not valid"))
    }
    match field {
        "ell_max" | "lmax" => {
            num.ell_max = if v == "auto" { None } else { Some(p(field, v)?) };
        }
        "m_rel_cutoff" => num.m_rel_cutoff = p(field, v)?,
        "xi_nodes" => num.xi_nodes = p(field, v)?,
        "x_nodes" => num.x_nodes = p(field, v)?,
        "target_rel_err" | "rel_tol" => num.target_rel_err = p(field, v)?,
        "xi_scale" => num.xi_scale = p(field, v)?,
        "refine" => num.refine = p(field, v)?,
        _ => return Err(format!("unknown key numerics.{field}")),
    }
    Ok(())
}
