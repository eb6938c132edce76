//! JSON files for states and density operators.
//!
//! ```json
//! {
//!   "statistics": "boson",
//!   "locations": ["s1", "s2"],
//!   "dofs": [{"name": "path", "eigenvalues": ["L", "D", "R", "U"]},
//!            {"name": "spin", "eigenvalues": ["down", "up"]}],
//!   "terms": [{"amp": [0.5, 0.0],
//!              "particles": [{"loc": "s1", "dofs": {"1": "L", "2": "down"}},
//!                            {"loc": "s2", "dofs": {"1": "R", "2": "down"}}]}]
//! }
//! ```
//!
//! Density files replace `terms` with `entries` of `{"ket", "bra", "val"}`,
//! where `ket` and `bra` list one or two particles. An optional `overlap`
//! holds Gram rows of `[re, im]` pairs. DoF keys may be 1-based indices or
//! DoF names; output always uses indices.

use std::collections::BTreeMap;
use std::path::Path;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::density::{outer_product, DensityOperator, OneParticleDensity};
use crate::state::{DofDomain, Label, Space, StateVector, Statistics};
use crate::{Error, Result, C64};

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ParticleJson {
    pub loc: String,
    #[serde(default)]
    pub dofs: BTreeMap<String, String>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TermJson {
    pub amp: [f64; 2],
    pub particles: Vec<ParticleJson>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EntryJson {
    pub ket: Vec<ParticleJson>,
    pub bra: Vec<ParticleJson>,
    pub val: [f64; 2],
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DofJson {
    pub name: String,
    pub eigenvalues: Vec<String>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileJson {
    pub statistics: String,
    pub locations: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub overlap: Option<Vec<Vec<[f64; 2]>>>,
    pub dofs: Vec<DofJson>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub terms: Option<Vec<TermJson>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub entries: Option<Vec<EntryJson>>,
}

/// Parsed file contents.
#[derive(Clone, Debug, PartialEq)]
pub enum Document {
    State(StateVector),
    Density(DensityOperator),
    OneParticle(OneParticleDensity),
}

impl Document {
    pub fn space(&self) -> &Arc<Space> {
        match self {
            Document::State(s) => s.space(),
            Document::Density(d) => d.space(),
            Document::OneParticle(o) => o.space(),
        }
    }

    /// Two-particle density (`|Psi><Psi|` for states).
    pub fn into_density(self) -> Result<DensityOperator> {
        match self {
            Document::State(s) => Ok(outer_product(&s)),
            Document::Density(d) => Ok(d),
            Document::OneParticle(_) => Err(Error::Shape(
                "expected a two-particle state or density".into(),
            )),
        }
    }
}

fn c(v: [f64; 2]) -> C64 {
    C64::new(v[0], v[1])
}

fn pair(z: C64) -> [f64; 2] {
    [z.re, z.im]
}

fn parse_statistics(s: &str) -> Result<Statistics> {
    match s {
        "boson" => Ok(Statistics::Boson),
        "fermion" => Ok(Statistics::Fermion),
        other => Err(Error::Format(format!(
            "statistics must be boson or fermion, got {other:?}"
        ))),
    }
}

fn build_space(file: &FileJson) -> Result<Arc<Space>> {
    let dofs = file
        .dofs
        .iter()
        .map(|d| DofDomain::new(d.name.clone(), d.eigenvalues.iter().cloned()))
        .collect::<Result<Vec<_>>>()?;
    let mut space = Space::new(file.locations.iter().cloned(), dofs)?;
    if let Some(rows) = &file.overlap {
        let rows: Vec<Vec<C64>> = rows
            .iter()
            .map(|r| r.iter().copied().map(c).collect())
            .collect();
        space = space.with_overlap(&rows)?;
    }
    Ok(Arc::new(space))
}

fn parse_label(space: &Space, p: &ParticleJson) -> Result<Label> {
    let pairs: Vec<(&str, &str)> = p
        .dofs
        .iter()
        .map(|(k, v)| (k.as_str(), v.as_str()))
        .collect();
    space.label(&p.loc, &pairs)
}

fn label_json(space: &Space, l: &Label) -> ParticleJson {
    ParticleJson {
        loc: space.locations()[l.location()].clone(),
        dofs: l
            .dofs()
            .iter()
            .map(|&(d, e)| {
                let name = space
                    .dof(d)
                    .map(|dom| dom.eigenvalues()[e].clone())
                    .unwrap_or_default();
                (d.to_string(), name)
            })
            .collect(),
    }
}

fn two(space: &Space, ps: &[ParticleJson]) -> Result<(Label, Label)> {
    match ps {
        [a, b] => Ok((parse_label(space, a)?, parse_label(space, b)?)),
        _ => Err(Error::Format(format!(
            "expected 2 particles, got {}",
            ps.len()
        ))),
    }
}

/// Parses a state or density document.
pub fn parse_document(text: &str) -> Result<Document> {
    let file: FileJson = serde_json::from_str(text)?;
    let statistics = parse_statistics(&file.statistics)?;
    let space = build_space(&file)?;
    match (&file.terms, &file.entries) {
        (Some(terms), None) => {
            let mut s = StateVector::new(statistics, space.clone());
            for t in terms {
                let (a, b) = two(&space, &t.particles)?;
                s.add_term(a, b, c(t.amp))?;
            }
            Ok(Document::State(s))
        }
        (None, Some(entries)) => {
            let one = entries.first().is_some_and(|e| e.ket.len() == 1);
            if one {
                let mut d = OneParticleDensity::new(space.clone());
                for e in entries {
                    if e.ket.len() != 1 || e.bra.len() != 1 {
                        return Err(Error::Format(
                            "entries mix one- and two-particle kets".into(),
                        ));
                    }
                    d.add(
                        parse_label(&space, &e.ket[0])?,
                        parse_label(&space, &e.bra[0])?,
                        c(e.val),
                    );
                }
                Ok(Document::OneParticle(d))
            } else {
                let mut d = DensityOperator::new(statistics, space.clone());
                for e in entries {
                    d.add_entry(two(&space, &e.ket)?, two(&space, &e.bra)?, c(e.val))?;
                }
                Ok(Document::Density(d))
            }
        }
        (Some(_), Some(_)) => Err(Error::Format("file has both terms and entries".into())),
        (None, None) => Err(Error::Format("file has neither terms nor entries".into())),
    }
}

pub fn read_document(path: &Path) -> Result<Document> {
    parse_document(&std::fs::read_to_string(path)?)
}

fn header(space: &Space, statistics: Statistics) -> FileJson {
    FileJson {
        statistics: statistics.name().into(),
        locations: space.locations().to_vec(),
        overlap: space.overlap_rows().map(|rows| {
            rows.iter()
                .map(|r| r.iter().copied().map(pair).collect())
                .collect()
        }),
        dofs: space
            .dofs()
            .iter()
            .map(|d| DofJson {
                name: d.name().into(),
                eigenvalues: d.eigenvalues().to_vec(),
            })
            .collect(),
        terms: None,
        entries: None,
    }
}

pub fn state_to_json(s: &StateVector) -> FileJson {
    let sp = s.space();
    let mut f = header(sp, s.statistics());
    f.terms = Some(
        s.iter()
            .map(|(k, a)| TermJson {
                amp: pair(*a),
                particles: vec![label_json(sp, k.first()), label_json(sp, k.second())],
            })
            .collect(),
    );
    f
}

pub fn density_to_json(d: &DensityOperator) -> FileJson {
    let sp = d.space();
    let mut f = header(sp, d.statistics());
    f.entries = Some(
        d.iter()
            .map(|((k, b), v)| EntryJson {
                ket: vec![label_json(sp, k.first()), label_json(sp, k.second())],
                bra: vec![label_json(sp, b.first()), label_json(sp, b.second())],
                val: pair(*v),
            })
            .collect(),
    );
    f
}

/// One-particle densities carry no exchange sign; `statistics` is recorded
/// for round trips only.
pub fn one_particle_to_json(d: &OneParticleDensity, statistics: Statistics) -> FileJson {
    let sp = d.space();
    let mut f = header(sp, statistics);
    f.entries = Some(
        d.iter()
            .map(|((x, y), v)| EntryJson {
                ket: vec![label_json(sp, x)],
                bra: vec![label_json(sp, y)],
                val: pair(*v),
            })
            .collect(),
    );
    f
}

pub fn to_pretty(f: &FileJson) -> Result<String> {
    Ok(serde_json::to_string_pretty(f)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::{build_li_state, PhaseConfig};

    const PRODUCT: &str = r#"{
        "statistics": "boson",
        "locations": ["s1", "s2"],
        "dofs": [{"name": "path", "eigenvalues": ["L", "D", "R", "U"]},
                 {"name": "spin", "eigenvalues": ["down", "up"]}],
        "terms": [{"amp": [1, 0], "particles": [{"loc": "s2", "dofs": {"1": "R", "spin": "down"}},
                                                 {"loc": "s1", "dofs": {"1": "L", "2": "down"}}]}]
    }"#;

    #[test]
    fn parses_state_with_names_and_indices() {
        let Document::State(s) = parse_document(PRODUCT).unwrap() else {
            panic!("expected a state")
        };
        assert_eq!(s.len(), 1);
        assert_eq!(
            s.space().describe_ket(s.iter().next().unwrap().0),
            "|s1 L down, s2 R down>"
        );
    }

    #[test]
    fn state_round_trip() {
        let s = build_li_state(&PhaseConfig::new(0.1, 0.2, 0.3, 0.4)).unwrap();
        let text = to_pretty(&state_to_json(&s)).unwrap();
        let Document::State(back) = parse_document(&text).unwrap() else {
            panic!("expected a state")
        };
        assert_eq!(back, s);
    }

    #[test]
    fn density_round_trip() {
        let s = build_li_state(&PhaseConfig::new(0.5, 0.0, 1.0, 0.0)).unwrap();
        let rho = outer_product(&s);
        let text = to_pretty(&density_to_json(&rho)).unwrap();
        let back = parse_document(&text).unwrap().into_density().unwrap();
        assert!(back.max_abs_diff(&rho) < 1e-15);
    }

    #[test]
    fn malformed_files() {
        assert!(matches!(parse_document("{"), Err(Error::Json(_))));
        let bad_stats = PRODUCT.replace("boson", "anyon");
        assert!(matches!(parse_document(&bad_stats), Err(Error::Format(_))));
        let bad_loc = PRODUCT.replace("\"s2\", \"dofs\"", "\"s9\", \"dofs\"");
        assert!(matches!(parse_document(&bad_loc), Err(Error::Domain(_))));
        let partial = PRODUCT.replace(", \"spin\": \"down\"", "");
        assert!(matches!(parse_document(&partial), Err(Error::Shape(_))));
    }
}
