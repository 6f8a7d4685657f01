//! JSON file format for frame systems.
//!
//! Numbers are written with shortest round-trip formatting, so a write/read
//! cycle reproduces every entry bit for bit.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::frame::{biorthogonals, FrameSystem};
use crate::norm::{NormKind, NormedSpace};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FrameSystemFile {
    pub dim: usize,
    pub norm: NormKind,
    pub vectors: Vec<Vec<f64>>,
    /// Absent: biorthogonals of `vectors`, which must then be a basis.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub functionals: Option<Vec<Vec<f64>>>,
    #[serde(default)]
    pub label: String,
}

fn check_rows(field: &str, rows: &[Vec<f64>], dim: usize) -> Result<()> {
    if rows.is_empty() {
        return Err(Error::Input(format!("{field}: array is empty")));
    }
    for (i, r) in rows.iter().enumerate() {
        if r.len() != dim {
            return Err(Error::Input(format!("{field}[{i}]: has {} entries but dim is {dim}", r.len())));
        }
        if let Some(j) = r.iter().position(|x| !x.is_finite()) {
            return Err(Error::Input(format!("{field}[{i}][{j}]: entry is not finite")));
        }
    }
    Ok(())
}

impl FrameSystemFile {
    pub fn from_system(f: &FrameSystem) -> Self {
        FrameSystemFile {
            dim: f.dim(),
            norm: f.norm(),
            vectors: f.vector_rows(),
            functionals: Some(f.functional_rows()),
            label: f.label().to_string(),
        }
    }

    /// A file without functionals, for plain vector families.
    pub fn from_vectors(dim: usize, norm: NormKind, vectors: Vec<Vec<f64>>, label: impl Into<String>) -> Self {
        FrameSystemFile { dim, norm, vectors, functionals: None, label: label.into() }
    }

    /// Shape and finiteness checks with diagnostics naming the offending row.
    pub fn validate(&self) -> Result<()> {
        if self.dim == 0 {
            return Err(Error::Input("dim: must be positive".into()));
        }
        check_rows("vectors", &self.vectors, self.dim)?;
        if let Some(f) = &self.functionals {
            check_rows("functionals", f, self.dim)?;
            if f.len() != self.vectors.len() {
                return Err(Error::Input(format!(
                    "functionals: {} rows but vectors has {}",
                    f.len(),
                    self.vectors.len()
                )));
            }
        }
        Ok(())
    }

    /// The system, optionally read with a different norm.
    pub fn to_system(&self, norm_override: Option<NormKind>) -> Result<FrameSystem> {
        self.validate()?;
        let space = NormedSpace::new(self.dim, norm_override.unwrap_or(self.norm))?;
        let functionals = match &self.functionals {
            Some(f) => f.clone(),
            None => biorthogonals(&self.vectors).map_err(|e| {
                Error::Input(format!("functionals: absent and the vectors admit no biorthogonals ({e})"))
            })?,
        };
        FrameSystem::new(space, self.vectors.clone(), functionals, self.label.clone())
    }

    pub fn parse(text: &str) -> Result<Self> {
        let file: FrameSystemFile =
            serde_json::from_str(text).map_err(|e| Error::Input(format!("line {} column {}: {e}", e.line(), e.column())))?;
        file.validate()?;
        Ok(file)
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("plain data serializes");
        s.push('\n');
        s
    }

    pub fn read(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| Error::Input(format!("{}: {e}", path.display())))?;
        Self::parse(&text).map_err(|e| match e {
            Error::Input(m) => Error::Input(format!("{}: {m}", path.display())),
            other => other,
        })
    }

    pub fn write(&self, path: &Path) -> std::io::Result<()> {
        fs::write(path, self.to_json())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip_is_exact() {
        let f = FrameSystemFile {
            dim: 2,
            norm: NormKind::lp(3.5).unwrap(),
            vectors: vec![vec![0.1, 1.0 / 3.0], vec![-2e-300, 7.0]],
            functionals: Some(vec![vec![1.0, std::f64::consts::PI], vec![0.0, -0.0]]),
            label: "x".into(),
        };
        let back = FrameSystemFile::parse(&f.to_json()).unwrap();
        assert_eq!(back, f);
        assert_eq!(back.functionals.as_ref().unwrap()[1][1].to_bits(), (-0.0f64).to_bits());
    }

    #[test]
    fn diagnostics_name_the_row() {
        let err = FrameSystemFile::parse(r#"{"dim":2,"norm":"l1","vectors":[[1,0],[0,1,5]]}"#).unwrap_err();
        assert!(err.to_string().contains("vectors[1]"), "{err}");
        let err = FrameSystemFile::parse(r#"{"dim":2,"norm":"l7","vectors":[[1,0]]}"#).unwrap_err();
        assert!(err.to_string().contains("line 1"), "{err}");
    }

    #[test]
    fn missing_functionals_are_biorthogonals() {
        let f = FrameSystemFile::parse(r#"{"dim":2,"norm":"linf","vectors":[[1,0],[1,1]]}"#).unwrap();
        let s = f.to_system(None).unwrap();
        assert_eq!(s.functional_rows(), vec![vec![1.0, -1.0], vec![0.0, 1.0]]);
        let bad = FrameSystemFile::parse(r#"{"dim":2,"norm":"l1","vectors":[[1,0],[2,0]]}"#).unwrap();
        assert!(bad.to_system(None).unwrap_err().to_string().contains("functionals"));
    }
}
