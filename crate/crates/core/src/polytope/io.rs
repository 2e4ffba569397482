//! Polytope JSON files:
//! `{"d", "vertices": [matrix...], "facets": [{"F": matrix, "b": real}...]?, "r"?, "provenance", "kind"?}`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::polytope::{Facet, PolytopeKind, StatePolytope};
use crate::quantum::io::{MatrixJson, F17};

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct FacetJson {
    #[serde(rename = "F")]
    pub normal: MatrixJson,
    pub b: F17,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PolytopeFile {
    pub d: usize,
    pub vertices: Vec<MatrixJson>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub facets: Option<Vec<FacetJson>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub r: Option<F17>,
    pub provenance: String,
    /// `inner` when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub kind: Option<PolytopeKind>,
}

impl PolytopeFile {
    pub fn from_polytope(p: &StatePolytope) -> Self {
        Self {
            d: p.dim(),
            vertices: p.vertices().iter().map(MatrixJson::from_operator).collect(),
            facets: p.facets().map(|fs| {
                fs.iter().map(|f| FacetJson { normal: MatrixJson::from_operator(&f.normal), b: F17(f.offset) }).collect()
            }),
            r: p.shrinking_factor().map(F17),
            provenance: p.provenance().to_string(),
            kind: Some(p.kind()),
        }
    }

    /// Decodes and validates: vertex dimension and trace, positivity for inner
    /// sets, facet validity and the range of `r`.
    pub fn to_polytope(&self) -> Result<StatePolytope> {
        let mut vertices = Vec::with_capacity(self.vertices.len());
        for (i, v) in self.vertices.iter().enumerate() {
            if v.dim != self.d {
                return Err(Error::InvalidPolytope(format!("vertex {i} has dimension {}, expected {}", v.dim, self.d)));
            }
            vertices.push(v.to_operator().map_err(|e| Error::InvalidPolytope(format!("vertex {i}: {e}")))?);
        }
        let kind = self.kind.unwrap_or(PolytopeKind::Inner);
        let mut p = StatePolytope::new(vertices, kind, self.provenance.clone())?;
        if let Some(fs) = &self.facets {
            let facets = fs
                .iter()
                .enumerate()
                .map(|(i, f)| {
                    let op = f.normal.to_operator().map_err(|e| Error::InvalidPolytope(format!("facet {i}: {e}")))?;
                    Ok(Facet { normal: op, offset: f.b.0 })
                })
                .collect::<Result<Vec<_>>>()?;
            p = p.with_facets(facets)?;
        }
        if let Some(r) = self.r {
            p = p.with_shrinking_factor(r.0).map_err(|e| Error::InvalidPolytope(e.to_string()))?;
        }
        Ok(p)
    }
}

pub fn read_polytope(path: &std::path::Path) -> Result<StatePolytope> {
    let text = std::fs::read_to_string(path)?;
    let file: PolytopeFile = serde_json::from_str(&text).map_err(|e| Error::Format(format!("{}: {e}", path.display())))?;
    file.to_polytope()
}

pub fn write_polytope(path: &std::path::Path, p: &StatePolytope) -> Result<()> {
    let text = serde_json::to_string_pretty(&PolytopeFile::from_polytope(p))?;
    std::fs::write(path, text + "\n")?;
    Ok(())
}
