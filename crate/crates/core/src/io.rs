//! JSON input schema for orbifold descriptions and the report types emitted
//! by computations. Serialization sticks to plain vectors and strings so the
//! byte output of a given report is always identical.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::groups::FiniteGroup;
use crate::linalg::QMatrix;
use crate::orbifold::{GlobalQuotientOrbifold, StabilisationSpec};
use crate::simplicial::SimplicialComplex;

/// `{"vertices": N, "facets": [[v, ...], ...]}` with 0-based vertex ids;
/// faces are closed up, so facets need not be maximal.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ComplexInput {
    pub vertices: usize,
    pub facets: Vec<Vec<u32>>,
}

/// `{"generators": [[image list], ...]}` acting on the vertex ids of the
/// accompanying complex.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct GroupInput {
    pub generators: Vec<Vec<u32>>,
}

/// Stabilisation data in model coordinates. The optional `iso` records the
/// simplicial isomorphism onto the nested copy as a vertex image list; the
/// engine validates it when present but realizes the insertion through the
/// inclusion of the nested copy, so the explicit map is informative only.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct StabInput {
    pub nested_copy_vertices: Vec<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub iso: Option<Vec<u32>>,
    pub base_cell: u32,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct OrbifoldInput {
    pub complex: ComplexInput,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub group: Option<GroupInput>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub subdiv: Option<usize>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub boundary_vertices: Vec<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub stab: Option<StabInput>,
}

impl OrbifoldInput {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text)
            .map_err(|e| Error::InvalidInput(format!("orbifold description does not parse: {e}")))
    }

    /// Construct the orbifold, subdividing to the requested level. The
    /// default level is 2 unless the input or the caller overrides it.
    pub fn build(&self, subdiv_override: Option<usize>) -> Result<GlobalQuotientOrbifold> {
        let complex =
            SimplicialComplex::from_facets(self.complex.vertices, &self.complex.facets)?;
        let group = match &self.group {
            Some(g) => FiniteGroup::from_generators(self.complex.vertices, &g.generators)?,
            None => FiniteGroup::trivial(self.complex.vertices),
        };
        let subdiv = subdiv_override.or(self.subdiv).unwrap_or(2);
        let stab = self.stab.as_ref().map(|s| StabilisationSpec {
            nested_copy_vertices: s.nested_copy_vertices.clone(),
            base_cell: s.base_cell,
        });
        let orb = GlobalQuotientOrbifold::new(
            complex,
            group,
            subdiv,
            self.boundary_vertices.clone(),
            stab,
        )?;
        if let Some(stab) = &self.stab {
            if let Some(iso) = &stab.iso {
                validate_iso(&orb, &stab.nested_copy_vertices, iso)?;
            }
        }
        Ok(orb)
    }
}

/// The recorded isomorphism onto the nested copy must be an injective,
/// equivariant simplicial map of the model landing in the copy.
fn validate_iso(orb: &GlobalQuotientOrbifold, nested: &[u32], iso: &[u32]) -> Result<()> {
    let nv = orb.model.n_vertices();
    if iso.len() != nv {
        return Err(Error::InvalidInput(format!(
            "nested copy isomorphism lists {} vertices, the model has {}",
            iso.len(),
            nv
        )));
    }
    let mut seen = vec![false; nv];
    for &img in iso {
        if img as usize >= nv || seen[img as usize] {
            return Err(Error::InvalidInput(
                "nested copy isomorphism is not injective into the model".into(),
            ));
        }
        seen[img as usize] = true;
    }
    let copy: std::collections::BTreeSet<u32> = nested.iter().cloned().collect();
    if iso.iter().any(|img| !copy.contains(img)) {
        return Err(Error::InvalidInput(
            "nested copy isomorphism leaves the nested copy".into(),
        ));
    }
    for g in orb.group.ids() {
        for v in 0..nv as u32 {
            if iso[orb.group.apply(g, v) as usize] != orb.group.apply(g, iso[v as usize]) {
                return Err(Error::InvalidInput(
                    "nested copy isomorphism is not equivariant".into(),
                ));
            }
        }
    }
    for d in 0..=orb.model.dim().unwrap_or(0) {
        for s in orb.model.simplices(d) {
            let mut img: Vec<u32> = s.iter().map(|&v| iso[v as usize]).collect();
            img.sort_unstable();
            if !orb.model.contains(&img) {
                return Err(Error::InvalidInput(
                    "nested copy isomorphism is not simplicial".into(),
                ));
            }
        }
    }
    Ok(())
}

/// Homology of one configuration space: Betti numbers per degree and, for
/// integral runs, the torsion coefficients per degree as decimal strings.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct HomologyReport {
    pub n: usize,
    pub coefficients: String,
    pub betti: Vec<usize>,
    pub torsion: Vec<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub stratum: Option<usize>,
}

/// One verified identity: the relation name, the point count and degree it
/// was evaluated in, and both sides as exact rational matrices.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct Verdict {
    pub relation: String,
    pub n: usize,
    pub degree: usize,
    pub pass: bool,
    pub lhs: Vec<Vec<String>>,
    pub rhs: Vec<Vec<String>>,
}

pub fn matrix_strings(m: &QMatrix) -> Vec<Vec<String>> {
    (0..m.rows)
        .map(|r| (0..m.cols).map(|c| m.get(r, c).to_string()).collect())
        .collect()
}

pub fn verdict(relation: &str, n: usize, degree: usize, lhs: &QMatrix, rhs: &QMatrix) -> Verdict {
    Verdict {
        relation: relation.to_string(),
        n,
        degree,
        pass: lhs == rhs,
        lhs: matrix_strings(lhs),
        rhs: matrix_strings(rhs),
    }
}
