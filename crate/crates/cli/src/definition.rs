//! JSON definition files: symbols, an enumeration, and optionally a map.

use std::collections::BTreeMap;
use std::path::Path;

use hamel_core::qspace::{bundled, Enumeration, FormalVector, Space};
use hamel_core::ValueExpr;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::CliError;

/// A vector as symbol name to rational string, e.g. `{"one": "3/2"}`.
pub type VectorDef = BTreeMap<String, String>;

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SymbolDef {
    pub name: String,
    pub value: String,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MapDefinition {
    /// Images of the greedy basis of `enumeration`, in order.
    pub images: Vec<VectorDef>,
    /// Defaults to the unit vectors of the space.
    #[serde(default)]
    pub codomain_enumeration: Option<Vec<VectorDef>>,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpaceDefinition {
    #[serde(default)]
    pub symbols: Vec<SymbolDef>,
    #[serde(default)]
    pub enumeration: Vec<VectorDef>,
    #[serde(default)]
    pub map: Option<MapDefinition>,
}

/// A validated definition ready for the core library.
#[derive(Clone, Debug)]
pub struct Loaded {
    pub space: Space,
    pub enumeration: Enumeration,
    pub map_images: Option<Vec<FormalVector>>,
    pub codomain: Option<Enumeration>,
    /// Hex SHA-256 of the definition file, or of a label for the bundled space.
    pub digest: String,
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

fn vector(space: &Space, def: &VectorDef) -> Result<FormalVector, CliError> {
    Ok(space.parse_vector(def.iter().map(|(k, v)| (k.as_str(), v.as_str())))?)
}

fn vectors(space: &Space, defs: &[VectorDef]) -> Result<Vec<FormalVector>, CliError> {
    defs.iter().map(|d| vector(space, d)).collect()
}

impl SpaceDefinition {
    pub fn into_loaded(self, digest: String) -> Result<Loaded, CliError> {
        let mut space = Space::new();
        for sym in &self.symbols {
            let value: ValueExpr = sym.value.parse()?;
            if sym.name == hamel_core::qspace::ONE {
                if value != ValueExpr::Lit(1.into()) {
                    return Err(hamel_core::Error::BadOne.into());
                }
                continue;
            }
            space.add_symbol(&sym.name, value)?;
        }
        let enumeration = Enumeration::new(vectors(&space, &self.enumeration)?);
        let (map_images, codomain) = match &self.map {
            Some(m) => (
                Some(vectors(&space, &m.images)?),
                m.codomain_enumeration
                    .as_ref()
                    .map(|c| vectors(&space, c).map(Enumeration::new))
                    .transpose()?,
            ),
            None => (None, None),
        };
        Ok(Loaded {
            space,
            enumeration,
            map_images,
            codomain,
            digest,
        })
    }
}

pub fn load_file(path: &Path) -> Result<Loaded, CliError> {
    let bytes = std::fs::read(path).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
    let def: SpaceDefinition =
        serde_json::from_slice(&bytes).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
    def.into_loaded(sha256_hex(&bytes))
}

/// The bundled space `one, sqrt2, sqrt3, sqrt5, ...` with its units as the
/// enumeration.
pub fn bundled(symbols: usize) -> Loaded {
    let space = bundled::prime_root_space(symbols);
    Loaded {
        enumeration: space.units(),
        map_images: None,
        codomain: None,
        digest: sha256_hex(format!("bundled-prime-roots:{symbols}").as_bytes()),
        space,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(json: &str) -> Result<Loaded, CliError> {
        serde_json::from_str::<SpaceDefinition>(json)
            .map_err(|e| CliError::Input(e.to_string()))?
            .into_loaded(String::new())
    }

    #[test]
    fn empty_definition_has_only_one() {
        let l = parse("{}").unwrap();
        assert_eq!(l.space.len(), 1);
        assert!(l.enumeration.is_empty());
    }

    #[test]
    fn symbols_and_vectors() {
        let l = parse(
            r#"{"symbols": [{"name": "one", "value": "1"}, {"name": "r2", "value": "sqrt(2)"}],
                "enumeration": [{"one": "1/2", "r2": "-3"}]}"#,
        )
        .unwrap();
        assert_eq!(l.space.display(&l.enumeration[0]), "1/2*one - 3*r2");
    }

    #[test]
    fn bad_inputs_are_rejected() {
        for bad in [
            r#"{"enumeration": [{"one": "3/0"}]}"#,
            r#"{"enumeration": [{"nope": "1"}]}"#,
            r#"{"symbols": [{"name": "one", "value": "2"}]}"#,
            r#"{"symbols": [{"name": "x", "value": "sqrt(-1)"}]}"#,
            r#"{"symbols": [{"name": "x", "value": "1"}, {"name": "x", "value": "2"}]}"#,
            r#"{"extra": 1}"#,
        ] {
            assert!(parse(bad).is_err(), "{bad}");
        }
    }
}
