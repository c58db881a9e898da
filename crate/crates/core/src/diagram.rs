//! Burrow diagrams: a building set together with the rings of all burrows,
//! the maps between them, Chern polynomials and the nest predicate.
//!
//! The diagram asserts the building-set axioms; [`BurrowDiagram::validate`] only
//! checks the consequences the engine relies on. Results derived from the
//! diagram are meaningful for genuine building sets.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use crate::algebra::{socle_check, Element, GradedAlgebra, GradedMap};
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BuildingElement {
    pub id: String,
    pub codim: usize,
    /// Burrow equal to this element as a subvariety.
    pub burrow: String,
    /// Index set used by the nested-or-disjoint rule (diagonal-type building sets).
    pub indices: Option<BTreeSet<u32>>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BurrowNode {
    pub id: String,
    pub defining_set: Vec<String>,
    pub codim: usize,
    pub algebra: GradedAlgebra,
}

/// Monic polynomial `t^c + c_1 t^{c-1} + ... + c_c` with `c_i` in the big burrow's ring.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ChernPolynomial {
    coeffs: Vec<Element>,
}

impl ChernPolynomial {
    /// `coeffs[i-1]` is `c_i`.
    pub fn new(coeffs: Vec<Element>) -> Self {
        ChernPolynomial { coeffs }
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len()
    }

    /// `c_i` for `1 <= i <= degree`; `c_0 = 1` is not stored.
    pub fn coeff(&self, i: usize) -> &Element {
        &self.coeffs[i - 1]
    }

    pub fn coeffs(&self) -> &[Element] {
        &self.coeffs
    }

    pub fn top(&self) -> &Element {
        self.coeffs.last().expect("Chern polynomial of degree >= 1")
    }

    /// Shape check: degree >= 1 and `c_i` homogeneous of degree i (or zero).
    pub fn check_shape(&self, ambient: &GradedAlgebra) -> std::result::Result<(), String> {
        if self.coeffs.is_empty() {
            return Err("Chern polynomial has degree 0".into());
        }
        for (i, c) in self.coeffs.iter().enumerate() {
            if !ambient.contains(c) {
                return Err(format!("c_{} is not an element of the ambient ring", i + 1));
            }
            if let Some(d) = ambient.degree_of_element(c) {
                if d != i + 1 {
                    return Err(format!("c_{} has degree {d}", i + 1));
                }
            } else if !c.is_zero() {
                return Err(format!("c_{} is not homogeneous", i + 1));
            }
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BurrowEdge {
    pub small: String,
    pub big: String,
    pub pullback: GradedMap,
    pub pushforward: GradedMap,
    pub chern: ChernPolynomial,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum NestRule {
    /// Index sets pairwise nested or disjoint.
    NestedOrDisjoint,
    /// Explicit family of nests by element id (the empty nest is implicit).
    Explicit(BTreeSet<BTreeSet<String>>),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BurrowDiagram {
    pub socle_degree: usize,
    pub elements: Vec<BuildingElement>,
    pub burrows: Vec<BurrowNode>,
    pub edges: Vec<BurrowEdge>,
    /// Meets of distinct burrow pairs; `None` means empty intersection.
    pub intersections: BTreeMap<(String, String), Option<String>>,
    pub nests: NestRule,
    /// Named ambient classes (e.g. `K_1`, `D_12`) used by presentation reports.
    pub named_classes: BTreeMap<String, Element>,
    index: DiagramIndex,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
struct DiagramIndex {
    burrow: HashMap<String, usize>,
    element: HashMap<String, usize>,
    element_burrow: Vec<usize>,
    edge: HashMap<(usize, usize), usize>,
    meet: HashMap<(usize, usize), Option<usize>>,
    ambient: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CheckEntry {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ValidationReport {
    pub entries: Vec<CheckEntry>,
}

impl ValidationReport {
    fn push(&mut self, name: impl Into<String>, result: std::result::Result<(), String>) {
        let (passed, detail) = match result {
            Ok(()) => (true, String::new()),
            Err(e) => (false, e),
        };
        self.entries.push(CheckEntry { name: name.into(), passed, detail });
    }

    pub fn passed(&self) -> bool {
        self.entries.iter().all(|e| e.passed)
    }

    pub fn failures(&self) -> impl Iterator<Item = &CheckEntry> {
        self.entries.iter().filter(|e| !e.passed)
    }

    /// One line per failure, or `ok (<n> checks)`.
    pub fn summary(&self) -> String {
        if self.passed() {
            return format!("ok ({} checks)", self.entries.len());
        }
        self.failures().map(|e| format!("FAIL {}: {}", e.name, e.detail)).collect::<Vec<_>>().join("\n")
    }
}

impl BurrowDiagram {
    /// Assembles a diagram and builds its lookup tables. Structural lookups
    /// (unknown ids, missing ambient) fail here; everything else is left to `validate`.
    pub fn new(
        socle_degree: usize,
        elements: Vec<BuildingElement>,
        burrows: Vec<BurrowNode>,
        edges: Vec<BurrowEdge>,
        intersections: BTreeMap<(String, String), Option<String>>,
        nests: NestRule,
        named_classes: BTreeMap<String, Element>,
    ) -> Result<Self> {
        let mut index = DiagramIndex::default();
        for (i, b) in burrows.iter().enumerate() {
            if index.burrow.insert(b.id.clone(), i).is_some() {
                return Err(Error::Invalid(format!("duplicate burrow id `{}`", b.id)));
            }
        }
        let ambients: Vec<usize> = burrows
            .iter()
            .enumerate()
            .filter(|(_, b)| b.defining_set.is_empty())
            .map(|(i, _)| i)
            .collect();
        if ambients.len() != 1 {
            return Err(Error::Invalid(format!(
                "exactly one burrow must have an empty defining set, found {}",
                ambients.len()
            )));
        }
        index.ambient = ambients[0];
        for (i, e) in elements.iter().enumerate() {
            if index.element.insert(e.id.clone(), i).is_some() {
                return Err(Error::Invalid(format!("duplicate element id `{}`", e.id)));
            }
            let b = *index.burrow.get(&e.burrow).ok_or_else(|| Error::UnknownBurrow(e.burrow.clone()))?;
            index.element_burrow.push(b);
        }
        for b in &burrows {
            for x in &b.defining_set {
                if !index.element.contains_key(x) {
                    return Err(Error::UnknownElement(x.clone()));
                }
            }
        }
        for (i, e) in edges.iter().enumerate() {
            let s = *index.burrow.get(&e.small).ok_or_else(|| Error::UnknownBurrow(e.small.clone()))?;
            let b = *index.burrow.get(&e.big).ok_or_else(|| Error::UnknownBurrow(e.big.clone()))?;
            if index.edge.insert((s, b), i).is_some() {
                return Err(Error::Invalid(format!("duplicate edge {} -> {}", e.small, e.big)));
            }
        }
        for ((a, b), m) in &intersections {
            let ia = *index.burrow.get(a).ok_or_else(|| Error::UnknownBurrow(a.clone()))?;
            let ib = *index.burrow.get(b).ok_or_else(|| Error::UnknownBurrow(b.clone()))?;
            let im = match m {
                Some(m) => Some(*index.burrow.get(m).ok_or_else(|| Error::UnknownBurrow(m.clone()))?),
                None => None,
            };
            index.meet.insert((ia, ib), im);
            index.meet.insert((ib, ia), im);
        }
        for i in 0..burrows.len() {
            index.meet.insert((i, i), Some(i));
            index.meet.entry((i, index.ambient)).or_insert(Some(i));
            index.meet.entry((index.ambient, i)).or_insert(Some(i));
        }
        if let NestRule::Explicit(family) = &nests {
            for x in family.iter().flatten() {
                if !index.element.contains_key(x) {
                    return Err(Error::UnknownElement(x.clone()));
                }
            }
        }
        let ambient_alg = &burrows[index.ambient].algebra;
        for (name, c) in &named_classes {
            if !ambient_alg.contains(c) {
                return Err(Error::Invalid(format!("named class `{name}` outside the ambient ring")));
            }
        }
        Ok(BurrowDiagram { socle_degree, elements, burrows, edges, intersections, nests, named_classes, index })
    }

    pub fn ambient(&self) -> usize {
        self.index.ambient
    }

    pub fn ambient_algebra(&self) -> &GradedAlgebra {
        &self.burrows[self.index.ambient].algebra
    }

    pub fn burrow_index(&self, id: &str) -> Result<usize> {
        self.index.burrow.get(id).copied().ok_or_else(|| Error::UnknownBurrow(id.into()))
    }

    pub fn element_index(&self, id: &str) -> Result<usize> {
        self.index.element.get(id).copied().ok_or_else(|| Error::UnknownElement(id.into()))
    }

    /// Burrow index of a building element.
    pub fn element_burrow(&self, x: usize) -> usize {
        self.index.element_burrow[x]
    }

    pub fn algebra(&self, burrow: usize) -> &GradedAlgebra {
        &self.burrows[burrow].algebra
    }

    pub fn codim(&self, burrow: usize) -> usize {
        self.burrows[burrow].codim
    }

    /// Meet of two burrows; a missing table entry counts as empty.
    pub fn meet(&self, a: usize, b: usize) -> Option<usize> {
        self.index.meet.get(&(a, b)).copied().flatten()
    }

    /// `a ⊆ b` as subvarieties.
    pub fn burrow_contained(&self, a: usize, b: usize) -> bool {
        self.meet(a, b) == Some(a)
    }

    /// `x ⊊ z` for building elements.
    pub fn element_strictly_contained(&self, x: usize, z: usize) -> bool {
        let (bx, bz) = (self.element_burrow(x), self.element_burrow(z));
        bx != bz && self.burrow_contained(bx, bz)
    }

    /// Burrow of the intersection of the given elements (indices); `None` when empty.
    pub fn burrow_of_indices(&self, set: &[usize]) -> Option<usize> {
        let mut acc = self.index.ambient;
        for &x in set {
            acc = self.meet(acc, self.element_burrow(x))?;
        }
        Some(acc)
    }

    /// Burrow id of the intersection of the named elements, or `None` when empty.
    pub fn burrow_of(&self, ids: &[&str]) -> Result<Option<String>> {
        let idx = ids.iter().map(|id| self.element_index(id)).collect::<Result<Vec<_>>>()?;
        Ok(self.burrow_of_indices(&idx).map(|b| self.burrows[b].id.clone()))
    }

    pub fn edge(&self, small: usize, big: usize) -> Option<&BurrowEdge> {
        self.index.edge.get(&(small, big)).map(|&i| &self.edges[i])
    }

    pub fn edge_or_err(&self, small: usize, big: usize) -> Result<&BurrowEdge> {
        self.edge(small, big).ok_or_else(|| {
            Error::Invalid(format!("missing edge {} -> {}", self.burrows[small].id, self.burrows[big].id))
        })
    }

    /// Restriction from the ambient ring to a burrow (identity for the ambient itself).
    pub fn restrict_from_ambient(&self, burrow: usize, a: &Element) -> Result<Element> {
        if burrow == self.index.ambient {
            return Ok(a.clone());
        }
        Ok(self.edge_or_err(burrow, self.index.ambient)?.pullback.apply(a))
    }

    pub fn is_nest(&self, set: &[usize]) -> bool {
        if set.is_empty() {
            return true;
        }
        match &self.nests {
            NestRule::NestedOrDisjoint => {
                let idx: Option<Vec<&BTreeSet<u32>>> =
                    set.iter().map(|&x| self.elements[x].indices.as_ref()).collect();
                let Some(idx) = idx else { return false };
                for (i, a) in idx.iter().enumerate() {
                    for b in &idx[i + 1..] {
                        let nested = a.is_subset(b) || b.is_subset(a);
                        if !nested && !a.is_disjoint(b) {
                            return false;
                        }
                    }
                }
                true
            }
            NestRule::Explicit(family) => {
                let ids: BTreeSet<String> = set.iter().map(|&x| self.elements[x].id.clone()).collect();
                family.contains(&ids)
            }
        }
    }

    /// All elements contained (as subvarieties, non-strictly) in `x`.
    pub fn elements_below(&self, x: usize) -> Vec<usize> {
        (0..self.elements.len())
            .filter(|&s| s == x || self.burrow_contained(self.element_burrow(s), self.element_burrow(x)))
            .collect()
    }

    pub fn validate(&self) -> ValidationReport {
        let mut report = ValidationReport::default();
        let d = self.socle_degree;
        let y = self.index.ambient;

        report.push("ambient", {
            let b = &self.burrows[y];
            if b.codim != 0 {
                Err(format!("ambient burrow `{}` has codim {}", b.id, b.codim))
            } else {
                Ok(())
            }
        });

        for b in &self.burrows {
            let name = format!("socle {}", b.id);
            let res = if b.codim > d {
                Err(format!("codim {} exceeds socle degree {d}", b.codim))
            } else {
                socle_check(&b.algebra, d - b.codim).map(|_| ()).map_err(|f| f.to_string())
            };
            report.push(name, res);
        }

        for (i, e) in self.elements.iter().enumerate() {
            let b = &self.burrows[self.element_burrow(i)];
            report.push(format!("element {}", e.id), {
                if e.codim == 0 {
                    Err("building elements need codim >= 1".into())
                } else if e.codim != b.codim {
                    Err(format!("codim {} but burrow `{}` has codim {}", e.codim, b.id, b.codim))
                } else if self.elements.iter().enumerate().any(|(j, f)| j < i && f.burrow == e.burrow) {
                    Err(format!("shares burrow `{}` with another element", e.burrow))
                } else {
                    Ok(())
                }
            });
        }

        report.push("intersection table", self.check_table());

        for b in 0..self.burrows.len() {
            let node = &self.burrows[b];
            let idx: Vec<usize> = node.defining_set.iter().map(|x| self.index.element[x]).collect();
            report.push(format!("defining set {}", node.id), {
                match self.burrow_of_indices(&idx) {
                    Some(m) if m == b => Ok(()),
                    Some(m) => Err(format!("intersection of defining set is `{}`", self.burrows[m].id)),
                    None => Err("defining set has empty intersection".into()),
                }
            });
        }

        for small in 0..self.burrows.len() {
            for big in 0..self.burrows.len() {
                if small != big && self.burrow_contained(small, big) && self.edge(small, big).is_none() {
                    report.push(
                        format!("edge {} -> {}", self.burrows[small].id, self.burrows[big].id),
                        Err("missing edge for comparable burrows".into()),
                    );
                }
            }
        }

        for e in &self.edges {
            let (s, b) = (self.index.burrow[&e.small], self.index.burrow[&e.big]);
            let name = format!("edge {} -> {}", e.small, e.big);
            report.push(name.clone(), self.check_edge(s, b, e));
            if b == y && s != y {
                report.push(format!("nonvanishing [{}]", e.small), {
                    if e.chern.coeffs.last().is_some_and(|c| c.is_zero()) {
                        Err(format!("[Z] = 0 violates nonvanishing hypothesis for `{}`", e.small))
                    } else {
                        Ok(())
                    }
                });
            }
        }

        report.push("functoriality", self.check_functoriality());
        report.push("nest predicate", self.check_nests());
        report
    }

    fn check_table(&self) -> std::result::Result<(), String> {
        let n = self.burrows.len();
        for a in 0..n {
            for b in 0..n {
                if a != b && !self.index.meet.contains_key(&(a, b)) {
                    return Err(format!(
                        "no entry for ({}, {})",
                        self.burrows[a].id, self.burrows[b].id
                    ));
                }
                if let Some(m) = self.meet(a, b) {
                    if !self.burrow_contained(m, a) || !self.burrow_contained(m, b) {
                        return Err(format!(
                            "meet of ({}, {}) is not below both",
                            self.burrows[a].id, self.burrows[b].id
                        ));
                    }
                    if self.burrow_contained(a, b) && a != b && self.burrows[a].codim <= self.burrows[b].codim {
                        return Err(format!(
                            "{} ⊊ {} but codimensions do not increase",
                            self.burrows[a].id, self.burrows[b].id
                        ));
                    }
                }
                for c in 0..n {
                    let left = self.meet(a, b).and_then(|m| self.meet(m, c));
                    let right = self.meet(b, c).and_then(|m| self.meet(a, m));
                    if left != right {
                        return Err(format!(
                            "meets not associative on ({}, {}, {})",
                            self.burrows[a].id, self.burrows[b].id, self.burrows[c].id
                        ));
                    }
                }
            }
        }
        Ok(())
    }

    fn check_edge(&self, s: usize, b: usize, e: &BurrowEdge) -> std::result::Result<(), String> {
        if !self.burrow_contained(s, b) || s == b {
            return Err("edge between burrows that are not strictly contained".into());
        }
        let (small, big) = (self.algebra(s), self.algebra(b));
        let c = self.burrows[s].codim - self.burrows[b].codim;
        if e.pullback.shift() != 0 {
            return Err("pullback must have shift 0".into());
        }
        if e.pushforward.shift() != c as i32 {
            return Err(format!("pushforward shift {} != codim difference {c}", e.pushforward.shift()));
        }
        if e.pullback.source_dims() != big.dims() || e.pullback.target_dims() != small.dims() {
            return Err("pullback dimensions do not match the burrow rings".into());
        }
        if e.pushforward.source_dims() != small.dims() || e.pushforward.target_dims() != big.dims() {
            return Err("pushforward dimensions do not match the burrow rings".into());
        }
        if let Some(&k) = e.pullback.surjectivity_failures().first() {
            return Err(format!("surjectivity failed at degree {k}"));
        }
        e.pullback.check_homomorphism(big, small)?;
        e.pushforward.check_projection_formula(&e.pullback, small, big)?;
        if e.chern.degree() != c {
            return Err(format!("Chern polynomial degree {} != codim difference {c}", e.chern.degree()));
        }
        e.chern.check_shape(big)?;
        if *e.chern.top() != e.pushforward.apply(&small.unit()) {
            return Err("top Chern coefficient differs from the class [small] = push(1)".into());
        }
        Ok(())
    }

    fn check_functoriality(&self) -> std::result::Result<(), String> {
        for e1 in &self.edges {
            // e1: a -> b ; e2: b -> c ; direct: a -> c
            for e2 in self.edges.iter().filter(|e2| e2.small == e1.big) {
                let (a, c) = (self.index.burrow[&e1.small], self.index.burrow[&e2.big]);
                let Some(direct) = self.edge(a, c) else { continue };
                let composite = e2.pullback.compose(&e1.pullback).map_err(|e| e.to_string())?;
                if composite.matrix() != direct.pullback.matrix() {
                    return Err(format!(
                        "pullback {} -> {} -> {} differs from the direct edge",
                        e2.big, e1.big, e1.small
                    ));
                }
            }
        }
        Ok(())
    }

    fn check_nests(&self) -> std::result::Result<(), String> {
        for x in 0..self.elements.len() {
            if !self.is_nest(&[x]) {
                return Err(format!("singleton {{{}}} is not a nest", self.elements[x].id));
            }
        }
        if let NestRule::Explicit(family) = &self.nests {
            for nest in family {
                let idx: Vec<usize> = nest.iter().map(|x| self.index.element[x]).collect();
                for drop in 0..idx.len() {
                    let mut sub = idx.clone();
                    sub.remove(drop);
                    if !self.is_nest(&sub) {
                        return Err("nest family is not closed under subsets".into());
                    }
                }
            }
        }
        Ok(())
    }
}
