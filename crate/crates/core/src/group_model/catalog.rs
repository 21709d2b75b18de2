use std::collections::BTreeMap;

use super::{ExprGroup, LieGroup};
use crate::error::{Error, Result};
use crate::grouplang::parse_group_file;

/// A built-in group: its GDF source and the parameters a caller must bind.
#[derive(Debug, Clone, Copy)]
pub struct CatalogEntry {
    pub key: &'static str,
    pub description: &'static str,
    pub required_params: &'static [&'static str],
    pub source: &'static str,
}

const GALILEI_1P1: &str = "\
group galilei_ext_1p1
params m=1 hbar=1
coords t x v phi
central phi
identity 0 0 0 0
time t
law:
t'' = t' + t
x'' = x' + x + v'*t
v'' = v' + v
phi'' = phi' + phi + (m/hbar)*(x'*v + t*(v'*v + 0.5*v'^2))
";

const GALILEI_EM_3P1: &str = "\
group galilei_em_3p1
params m=1 q=1 hbar=1
coords t x1 x2 x3 v1 v2 v3 A1 A2 A3 At phi
central phi
identity 0 0 0 0 0 0 0 0 0 0 0 0
time t
law:
t'' = t' + t
x1'' = x1' + x1 + v1'*t
x2'' = x2' + x2 + v2'*t
x3'' = x3' + x3 + v3'*t
v1'' = v1' + v1
v2'' = v2' + v2
v3'' = v3' + v3
A1'' = A1' + A1
A2'' = A2' + A2
A3'' = A3' + A3
At'' = At' + At + v1'*A1 + v2'*A2 + v3'*A3
phi'' = phi' + phi + (m/hbar)*(x1'*v1 + x2'*v2 + x3'*v3 + t*(v1'*v1 + v2'*v2 + v3'*v3 + 0.5*(v1'^2 + v2'^2 + v3'^2))) + (q/hbar)*(x1'*A1 + x2'*A2 + x3'*A3 + t*(v1'*A1 + v2'*A2 + v3'*A3) + t*At')
";

pub const CATALOG: &[CatalogEntry] = &[
    CatalogEntry {
        key: "galilei_ext_1p1",
        description: "U(1)-extended Galilei group in 1+1 dimensions, coordinates (t, x, v, phi); \
                      cocycle (m/hbar)[x'v + t(v'v + v'^2/2)]",
        required_params: &["m", "hbar"],
        source: GALILEI_1P1,
    },
    CatalogEntry {
        key: "galilei_em_3p1",
        description:
            "Galilei group with local U(1) zero modes (A, A_t) in 3+1 dimensions, rotations \
                      disregarded; the q-cocycle uses the left-factor A_t' in its t*A_t' term, the \
                      variant that is associative",
        required_params: &["m", "q", "hbar"],
        source: GALILEI_EM_3P1,
    },
];

pub fn catalog_keys() -> Vec<&'static str> {
    CATALOG.iter().map(|e| e.key).collect()
}

/// Builds the catalog group `key`; every required parameter must be given.
pub fn catalog(key: &str, params: &BTreeMap<String, f64>) -> Result<LieGroup> {
    let entry = CATALOG.iter().find(|e| e.key == key).ok_or_else(|| {
        Error::Argument(format!(
            "unknown catalog key '{key}' (known: {})",
            catalog_keys().join(", ")
        ))
    })?;
    if let Some(missing) = entry
        .required_params
        .iter()
        .find(|p| !params.contains_key(**p))
    {
        return Err(Error::Argument(format!(
            "catalog group '{key}' needs parameter '{missing}'"
        )));
    }
    let def = parse_group_file(entry.source)?;
    Ok(LieGroup::new(ExprGroup::bind(
        def,
        params,
        entry.description.to_string(),
    )?))
}
