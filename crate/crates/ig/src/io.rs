//! JSON file formats. A biorder file lists elements and the defined partial
//! products; a Cayley file carries a full multiplication table as element
//! indices. The order of `elements` fixes all tie-breaking downstream.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::biorder::{BiorderedSet, BuildError, CayleyTable};

#[derive(Debug, Error)]
pub enum IoError {
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Build(#[from] BuildError),
    #[error("input is neither a biorder file (products) nor a cayley file (table)")]
    UnknownFormat,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct BiorderFile {
    pub elements: Vec<String>,
    pub products: Vec<(String, String, String)>,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct CayleyFile {
    pub elements: Vec<String>,
    pub table: Vec<Vec<usize>>,
}

impl From<&CayleyTable> for CayleyFile {
    fn from(t: &CayleyTable) -> Self {
        let n = t.len();
        CayleyFile {
            elements: t.names.clone(),
            table: (0..n)
                .map(|a| (0..n).map(|b| t.mul(a, b)).collect())
                .collect(),
        }
    }
}

impl CayleyFile {
    pub fn into_table(self) -> CayleyTable {
        CayleyTable {
            names: self.elements,
            table: self.table.into_iter().flatten().collect(),
        }
    }
}

impl BiorderFile {
    pub fn from_set(b: &BiorderedSet) -> Self {
        let mut products = Vec::new();
        for e in 0..b.len() {
            for f in 0..b.len() {
                if let Some(g) = b.product(e, f) {
                    products.push((
                        b.name(e).to_string(),
                        b.name(f).to_string(),
                        b.name(g).to_string(),
                    ));
                }
            }
        }
        BiorderFile {
            elements: b.names().to_vec(),
            products,
        }
    }
}

/// Load a biordered set from either file format, detected by key.
pub fn load_biorder(json: &str) -> Result<BiorderedSet, IoError> {
    let value: serde_json::Value = serde_json::from_str(json)?;
    let obj = value.as_object().ok_or(IoError::UnknownFormat)?;
    if obj.contains_key("table") {
        let file: CayleyFile = serde_json::from_value(value)?;
        Ok(BiorderedSet::from_cayley_table(&file.into_table())?)
    } else if obj.contains_key("products") {
        let file: BiorderFile = serde_json::from_value(value)?;
        Ok(BiorderedSet::validate_and_build(
            &file.elements,
            &file.products,
        )?)
    } else {
        Err(IoError::UnknownFormat)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gen;

    #[test]
    fn biorder_file_round_trip() {
        let b = gen::free_pair();
        let json = serde_json::to_string(&BiorderFile::from_set(&b)).unwrap();
        let back = load_biorder(&json).unwrap();
        assert_eq!(back.names(), b.names());
        assert_eq!(back.product(0, 1), None);
    }

    #[test]
    fn cayley_file_round_trip() {
        let t = gen::rect_band_table(2, 3).unwrap();
        let json = serde_json::to_string(&CayleyFile::from(&t)).unwrap();
        let b = load_biorder(&json).unwrap();
        assert_eq!(b.len(), 6);
    }

    #[test]
    fn unknown_format_is_rejected() {
        assert!(matches!(
            load_biorder(r#"{"elements": []}"#),
            Err(IoError::UnknownFormat)
        ));
    }
}
