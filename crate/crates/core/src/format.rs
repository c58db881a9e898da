//! Structured-text (JSON) file formats.
//!
//! Every file carries a `format` tag: `wonder-diagram/1`, `wonder-ring/1` or
//! `wonder-oracle/1`. Rationals are written as `"p/q"` strings (or `"p"`).
//! Algebras are written as `degrees` (dimension vector), `basis_labels`
//! (per-degree lists) and `mult` (triples `[i, j, k, c]` meaning that the product
//! of global basis elements `i <= j` has coefficient `c` on `k`; the unit is
//! basis 0 and its products are implicit). Maps are written as triples
//! `[row, col, c]` over the global bases, row indexing the target.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::algebra::{Element, GradedAlgebra, GradedMap};
use crate::diagram::{BuildingElement, BurrowDiagram, BurrowEdge, BurrowNode, ChernPolynomial, NestRule};
use crate::error::{Error, Result};
use crate::linalg::{format_rat, parse_rat, SparseMat};

pub const DIAGRAM_FORMAT: &str = "wonder-diagram/1";
pub const RING_FORMAT: &str = "wonder-ring/1";
pub const ORACLE_FORMAT: &str = "wonder-oracle/1";

pub type Triple = (usize, usize, String);
pub type Term = (usize, String);

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct AlgebraFile {
    pub degrees: Vec<usize>,
    pub basis_labels: Vec<Vec<String>>,
    pub mult: Vec<(usize, usize, usize, String)>,
}

impl AlgebraFile {
    pub fn from_algebra(alg: &GradedAlgebra) -> Self {
        let mut mult = Vec::new();
        for (i, j, e) in alg.product_table() {
            for (k, c) in e.terms() {
                mult.push((i, j, k, format_rat(c)));
            }
        }
        AlgebraFile { degrees: alg.dims(), basis_labels: alg.labels_by_degree(), mult }
    }

    pub fn to_algebra(&self) -> Result<GradedAlgebra> {
        if self.degrees.len() != self.basis_labels.len()
            || self.degrees.iter().zip(&self.basis_labels).any(|(d, l)| *d != l.len())
        {
            return Err(Error::Parse("`degrees` disagrees with `basis_labels`".into()));
        }
        let mut products: BTreeMap<(usize, usize), Element> = BTreeMap::new();
        for (i, j, k, c) in &self.mult {
            products.entry((*i, *j)).or_default().add_term(*k, parse_rat(c)?);
        }
        GradedAlgebra::new(self.basis_labels.clone(), products.into_iter().map(|((i, j), e)| (i, j, e)))
    }
}

pub fn element_to_terms(e: &Element) -> Vec<Term> {
    e.terms().map(|(i, c)| (i, format_rat(c))).collect()
}

pub fn terms_to_element(t: &[Term]) -> Result<Element> {
    let mut e = Element::zero();
    for (i, c) in t {
        e.add_term(*i, parse_rat(c)?);
    }
    Ok(e)
}

pub fn map_to_triples(m: &GradedMap) -> Vec<Triple> {
    m.matrix().entries().iter().map(|(r, c, v)| (*r, *c, format_rat(v))).collect()
}

pub fn triples_to_map(
    t: &[Triple],
    source: &GradedAlgebra,
    target: &GradedAlgebra,
    shift: i32,
) -> Result<GradedMap> {
    let trip = t.iter().map(|(r, c, v)| Ok((*r, *c, parse_rat(v)?))).collect::<Result<Vec<_>>>()?;
    let m = SparseMat::from_triplets(target.total_dim(), source.total_dim(), trip)?;
    GradedMap::new(source, target, shift, m)
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct ElementFile {
    pub id: String,
    pub codim: usize,
    pub burrow: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub indices: Option<Vec<u32>>,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct BurrowFile {
    pub id: String,
    pub defining_set: Vec<String>,
    pub codim: usize,
    #[serde(flatten)]
    pub algebra: AlgebraFile,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct EdgeFile {
    pub small: String,
    pub big: String,
    pub pullback: Vec<Triple>,
    pub pushforward: Vec<Triple>,
    /// `chern[i-1]` is `c_i` as sparse terms over the big burrow's basis
    pub chern: Vec<Vec<Term>>,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
#[serde(untagged)]
pub enum NestsFile {
    Rule(String),
    List(Vec<Vec<String>>),
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct DiagramFile {
    pub format: String,
    pub socle_degree: usize,
    pub elements: Vec<ElementFile>,
    pub burrows: Vec<BurrowFile>,
    pub edges: Vec<EdgeFile>,
    pub intersections: Vec<(String, String, Option<String>)>,
    pub nests: NestsFile,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub named_classes: BTreeMap<String, Vec<Term>>,
}

impl DiagramFile {
    pub fn from_diagram(d: &BurrowDiagram) -> Self {
        DiagramFile {
            format: DIAGRAM_FORMAT.into(),
            socle_degree: d.socle_degree,
            elements: d
                .elements
                .iter()
                .map(|e| ElementFile {
                    id: e.id.clone(),
                    codim: e.codim,
                    burrow: e.burrow.clone(),
                    indices: e.indices.as_ref().map(|s| s.iter().copied().collect()),
                })
                .collect(),
            burrows: d
                .burrows
                .iter()
                .map(|b| BurrowFile {
                    id: b.id.clone(),
                    defining_set: b.defining_set.clone(),
                    codim: b.codim,
                    algebra: AlgebraFile::from_algebra(&b.algebra),
                })
                .collect(),
            edges: d
                .edges
                .iter()
                .map(|e| EdgeFile {
                    small: e.small.clone(),
                    big: e.big.clone(),
                    pullback: map_to_triples(&e.pullback),
                    pushforward: map_to_triples(&e.pushforward),
                    chern: e.chern.coeffs().iter().map(element_to_terms).collect(),
                })
                .collect(),
            intersections: d.intersections.iter().map(|((a, b), m)| (a.clone(), b.clone(), m.clone())).collect(),
            nests: match &d.nests {
                NestRule::NestedOrDisjoint => NestsFile::Rule("nested-or-disjoint".into()),
                NestRule::Explicit(f) => NestsFile::List(f.iter().map(|n| n.iter().cloned().collect()).collect()),
            },
            named_classes: d.named_classes.iter().map(|(k, v)| (k.clone(), element_to_terms(v))).collect(),
        }
    }

    pub fn to_diagram(&self) -> Result<BurrowDiagram> {
        if self.format != DIAGRAM_FORMAT {
            return Err(Error::Parse(format!("expected format `{DIAGRAM_FORMAT}`, got `{}`", self.format)));
        }
        let burrows = self
            .burrows
            .iter()
            .map(|b| {
                Ok(BurrowNode {
                    id: b.id.clone(),
                    defining_set: b.defining_set.clone(),
                    codim: b.codim,
                    algebra: b.algebra.to_algebra().map_err(|e| Error::Parse(format!("burrow `{}`: {e}", b.id)))?,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        let find = |id: &str| -> Result<&BurrowNode> {
            burrows.iter().find(|b| b.id == id).ok_or_else(|| Error::UnknownBurrow(id.into()))
        };
        let mut edges = Vec::new();
        for e in &self.edges {
            let (s, b) = (find(&e.small)?, find(&e.big)?);
            let shift = s.codim as i32 - b.codim as i32;
            let ctx = |err: Error| Error::Parse(format!("edge {} -> {}: {err}", e.small, e.big));
            edges.push(BurrowEdge {
                small: e.small.clone(),
                big: e.big.clone(),
                pullback: triples_to_map(&e.pullback, &b.algebra, &s.algebra, 0).map_err(ctx)?,
                pushforward: triples_to_map(&e.pushforward, &s.algebra, &b.algebra, shift).map_err(ctx)?,
                chern: ChernPolynomial::new(
                    e.chern.iter().map(|t| terms_to_element(t)).collect::<Result<Vec<_>>>().map_err(ctx)?,
                ),
            });
        }
        let elements = self
            .elements
            .iter()
            .map(|e| BuildingElement {
                id: e.id.clone(),
                codim: e.codim,
                burrow: e.burrow.clone(),
                indices: e.indices.as_ref().map(|v| v.iter().copied().collect()),
            })
            .collect();
        let intersections = self.intersections.iter().map(|(a, b, m)| ((a.clone(), b.clone()), m.clone())).collect();
        let nests = match &self.nests {
            NestsFile::Rule(r) if r == "nested-or-disjoint" => NestRule::NestedOrDisjoint,
            NestsFile::Rule(r) => return Err(Error::Parse(format!("unknown nest rule `{r}`"))),
            NestsFile::List(l) => {
                NestRule::Explicit(l.iter().map(|n| n.iter().cloned().collect::<BTreeSet<_>>()).collect())
            }
        };
        let named = self
            .named_classes
            .iter()
            .map(|(k, v)| Ok((k.clone(), terms_to_element(v)?)))
            .collect::<Result<BTreeMap<_, _>>>()?;
        BurrowDiagram::new(self.socle_degree, elements, burrows, edges, intersections, nests, named)
    }
}

/// One Li summand as recorded in a ring file.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct SummandFile {
    pub nest: Vec<String>,
    pub mu: Vec<usize>,
    /// standard bound `codim X - codim W_X` per nest element
    pub bounds: Vec<usize>,
    pub burrow: String,
    pub shift: usize,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct RingFile {
    pub format: String,
    pub socle_degree: usize,
    #[serde(flatten)]
    pub algebra: AlgebraFile,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub summands: Vec<SummandFile>,
    /// summand index of each global basis element (when summands are present)
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub basis_summand: Vec<usize>,
}

/// A graded ring together with its optional Li summand structure.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RingData {
    pub socle_degree: usize,
    pub algebra: GradedAlgebra,
    pub summands: Vec<SummandFile>,
    pub basis_summand: Vec<usize>,
}

impl RingData {
    pub fn to_file(&self) -> RingFile {
        RingFile {
            format: RING_FORMAT.into(),
            socle_degree: self.socle_degree,
            algebra: AlgebraFile::from_algebra(&self.algebra),
            summands: self.summands.clone(),
            basis_summand: self.basis_summand.clone(),
        }
    }

    pub fn from_file(f: &RingFile) -> Result<Self> {
        if f.format != RING_FORMAT {
            return Err(Error::Parse(format!("expected format `{RING_FORMAT}`, got `{}`", f.format)));
        }
        let algebra = f.algebra.to_algebra()?;
        if !f.basis_summand.is_empty() {
            if f.basis_summand.len() != algebra.total_dim() {
                return Err(Error::Parse("`basis_summand` must cover every basis element".into()));
            }
            if f.basis_summand.iter().any(|&s| s >= f.summands.len()) {
                return Err(Error::Parse("`basis_summand` refers to a missing summand".into()));
            }
        }
        Ok(RingData {
            socle_degree: f.socle_degree,
            algebra,
            summands: f.summands.clone(),
            basis_summand: f.basis_summand.clone(),
        })
    }
}

/// Any of the three file kinds, detected from the `format` tag.
pub enum AnyFile {
    Diagram(Box<BurrowDiagram>),
    Ring(Box<RingData>),
    Oracle(Box<crate::oracle::OracleScript>),
}

pub fn parse_any(text: &str) -> Result<AnyFile> {
    let value: serde_json::Value =
        serde_json::from_str(text).map_err(|e| Error::Parse(format!("malformed input: {e}")))?;
    let tag = value.get("format").and_then(|v| v.as_str()).unwrap_or_default().to_string();
    match tag.as_str() {
        DIAGRAM_FORMAT => {
            let f: DiagramFile = serde_json::from_value(value).map_err(|e| Error::Parse(e.to_string()))?;
            Ok(AnyFile::Diagram(Box::new(f.to_diagram()?)))
        }
        RING_FORMAT => {
            let f: RingFile = serde_json::from_value(value).map_err(|e| Error::Parse(e.to_string()))?;
            Ok(AnyFile::Ring(Box::new(RingData::from_file(&f)?)))
        }
        ORACLE_FORMAT => {
            let f: crate::oracle::OracleFile =
                serde_json::from_value(value).map_err(|e| Error::Parse(e.to_string()))?;
            Ok(AnyFile::Oracle(Box::new(f.to_script()?)))
        }
        other => Err(Error::Parse(format!("unknown or missing format tag `{other}`"))),
    }
}

pub fn diagram_to_string(d: &BurrowDiagram) -> String {
    let mut s = serde_json::to_string(&DiagramFile::from_diagram(d)).expect("serializable diagram");
    s.push('\n');
    s
}

pub fn diagram_from_str(text: &str) -> Result<BurrowDiagram> {
    let f: DiagramFile = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
    f.to_diagram()
}

pub fn ring_to_string(r: &RingData) -> String {
    let mut s = serde_json::to_string(&r.to_file()).expect("serializable ring");
    s.push('\n');
    s
}

pub fn ring_from_str(text: &str) -> Result<RingData> {
    let f: RingFile = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
    RingData::from_file(&f)
}
