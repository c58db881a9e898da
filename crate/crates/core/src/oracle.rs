//! Independent reference: the same rings built by iterated single blow-ups.
//!
//! A script starts from the ambient ring and applies blow-ups along smooth centers
//! (or projectivizations) one at a time, each step validated on its own. The result
//! is compared with the engine through the map
//! `(N, μ, α) ↦ π*(lift α)·∏ Ẽ_X^{μ(X)}`, which must be a graded ring isomorphism.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::algebra::{pd_of, Element, GradedAlgebra, GradedMap, PdVerdict};
use crate::blowup::{blow_up_named, blowup_propagation, bundle_propagation, projective_bundle, PropagationReport};
use crate::diagram::ChernPolynomial;
use crate::engine::WonderRing;
use crate::error::{Error, Result};
use crate::format::{element_to_terms, terms_to_element, AlgebraFile, Term, ORACLE_FORMAT};
use crate::linalg::{int, rank, SparseMat};
use crate::models::{ambient_ring, Fiber, MonomialRing, KEEL_POINTS};

#[derive(Clone, Debug, PartialEq)]
pub enum OracleStep {
    BlowUp {
        name: String,
        center: GradedAlgebra,
        /// image in the center of each basis element of the current ring
        pullback: Vec<Element>,
        /// image in the current ring of each basis element of the center
        pushforward: Vec<Element>,
        chern: Vec<Element>,
    },
    ProjectiveBundle {
        chern: Vec<Element>,
    },
}

#[derive(Clone, Debug, PartialEq)]
pub struct OracleScript {
    pub name: String,
    pub socle_degree: usize,
    pub ambient: GradedAlgebra,
    pub steps: Vec<OracleStep>,
    /// class of `Ẽ_X` in the final ring, keyed by building-element id
    pub exceptional_classes: BTreeMap<String, Element>,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum StepFile {
    BlowUp {
        name: String,
        center: AlgebraFile,
        pullback: Vec<Vec<Term>>,
        pushforward: Vec<Vec<Term>>,
        chern: Vec<Vec<Term>>,
    },
    ProjectiveBundle {
        chern: Vec<Vec<Term>>,
    },
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct OracleFile {
    pub format: String,
    pub name: String,
    pub socle_degree: usize,
    pub ambient: AlgebraFile,
    pub steps: Vec<StepFile>,
    pub exceptional_classes: BTreeMap<String, Vec<Term>>,
}

fn elements_to_file(v: &[Element]) -> Vec<Vec<Term>> {
    v.iter().map(element_to_terms).collect()
}

fn elements_from_file(v: &[Vec<Term>]) -> Result<Vec<Element>> {
    v.iter().map(|t| terms_to_element(t)).collect()
}

impl OracleFile {
    pub fn from_script(s: &OracleScript) -> Self {
        let steps = s
            .steps
            .iter()
            .map(|st| match st {
                OracleStep::BlowUp { name, center, pullback, pushforward, chern } => StepFile::BlowUp {
                    name: name.clone(),
                    center: AlgebraFile::from_algebra(center),
                    pullback: elements_to_file(pullback),
                    pushforward: elements_to_file(pushforward),
                    chern: elements_to_file(chern),
                },
                OracleStep::ProjectiveBundle { chern } => StepFile::ProjectiveBundle { chern: elements_to_file(chern) },
            })
            .collect();
        OracleFile {
            format: ORACLE_FORMAT.into(),
            name: s.name.clone(),
            socle_degree: s.socle_degree,
            ambient: AlgebraFile::from_algebra(&s.ambient),
            steps,
            exceptional_classes: s.exceptional_classes.iter().map(|(k, v)| (k.clone(), element_to_terms(v))).collect(),
        }
    }

    pub fn to_script(&self) -> Result<OracleScript> {
        if self.format != ORACLE_FORMAT {
            return Err(Error::Parse(format!("expected format `{ORACLE_FORMAT}`")));
        }
        let steps = self
            .steps
            .iter()
            .map(|st| {
                Ok(match st {
                    StepFile::BlowUp { name, center, pullback, pushforward, chern } => OracleStep::BlowUp {
                        name: name.clone(),
                        center: center.to_algebra()?,
                        pullback: elements_from_file(pullback)?,
                        pushforward: elements_from_file(pushforward)?,
                        chern: elements_from_file(chern)?,
                    },
                    StepFile::ProjectiveBundle { chern } => {
                        OracleStep::ProjectiveBundle { chern: elements_from_file(chern)? }
                    }
                })
            })
            .collect::<Result<Vec<_>>>()?;
        let mut classes = BTreeMap::new();
        for (k, v) in &self.exceptional_classes {
            classes.insert(k.clone(), terms_to_element(v)?);
        }
        Ok(OracleScript {
            name: self.name.clone(),
            socle_degree: self.socle_degree,
            ambient: self.ambient.to_algebra()?,
            steps,
            exceptional_classes: classes,
        })
    }
}

pub fn script_to_string(s: &OracleScript) -> String {
    let mut out = serde_json::to_string(&OracleFile::from_script(s)).expect("serializable oracle script");
    out.push('\n');
    out
}

#[derive(Clone, Debug)]
pub struct OracleRun {
    pub algebra: GradedAlgebra,
    pub socle_degree: usize,
    /// `π*` from the ambient ring to the final ring
    pub pullback: GradedMap,
    pub verdict: Option<PdVerdict>,
    pub reports: Vec<(String, PropagationReport)>,
    pub exceptional_classes: BTreeMap<String, Element>,
}

impl OracleRun {
    pub fn dims(&self) -> Vec<usize> {
        self.algebra.dims()
    }

    pub fn is_pd(&self) -> bool {
        self.verdict.as_ref().is_some_and(|v| v.is_pd)
    }
}

struct Applied {
    algebra: GradedAlgebra,
    embedding: GradedMap,
    exceptional: Option<Element>,
    report: PropagationReport,
    socle: usize,
}

fn apply_step(current: &GradedAlgebra, socle: usize, step: &OracleStep, index: usize) -> Result<Applied> {
    match step {
        OracleStep::BlowUp { name, center, pullback, pushforward, chern } => {
            let c = chern.len();
            let what = |e: String| Error::Invalid(format!("step {index} ({name}): {e}"));
            let pull = GradedMap::from_images(current, center, 0, pullback).map_err(|e| what(e.to_string()))?;
            let push =
                GradedMap::from_images(center, current, c as i32, pushforward).map_err(|e| what(e.to_string()))?;
            pull.check_homomorphism(current, center).map_err(what)?;
            push.check_projection_formula(&pull, center, current).map_err(what)?;
            let chern = ChernPolynomial::new(chern.clone());
            let result = blow_up_named(current, center, &pull, &push, &chern, name)?;
            let report = blowup_propagation(current, center, &push, &result, socle);
            Ok(Applied {
                exceptional: result.exceptional.clone(),
                embedding: result.ambient_embedding.clone(),
                algebra: result.algebra,
                report,
                socle,
            })
        }
        OracleStep::ProjectiveBundle { chern } => {
            let bundle = projective_bundle(current, chern)?;
            let r = chern.len();
            let images: Vec<Element> = (0..current.total_dim())
                .map(|i| {
                    let k = current.degree_of(i);
                    Element::basis(bundle.range(k).start + (i - current.range(k).start))
                })
                .collect();
            let embedding = GradedMap::from_images(current, &bundle, 0, &images)?;
            let report = bundle_propagation(current, &bundle, r, socle);
            Ok(Applied { algebra: bundle, embedding, exceptional: None, report, socle: socle + r - 1 })
        }
    }
}

/// Runs the script, validating every step.
pub fn run(script: &OracleScript) -> Result<OracleRun> {
    let mut current = script.ambient.clone();
    let mut pi = GradedMap::from_images(
        &current,
        &current,
        0,
        &(0..current.total_dim()).map(Element::basis).collect::<Vec<_>>(),
    )?;
    let mut socle = script.socle_degree;
    let mut reports = Vec::new();
    for (i, step) in script.steps.iter().enumerate() {
        let applied = apply_step(&current, socle, step, i)?;
        let label = match step {
            OracleStep::BlowUp { name, .. } => format!("blow-up {name}"),
            OracleStep::ProjectiveBundle { chern } => format!("bundle of rank {}", chern.len()),
        };
        reports.push((label, applied.report));
        pi = pi.compose(&applied.embedding)?;
        current = applied.algebra;
        socle = applied.socle;
    }
    for (id, e) in &script.exceptional_classes {
        if !current.contains(e) {
            return Err(Error::Invalid(format!("class of {id} is not an element of the final ring")));
        }
    }
    Ok(OracleRun {
        verdict: pd_of(&current, socle).ok(),
        algebra: current,
        socle_degree: socle,
        pullback: pi,
        reports,
        exceptional_classes: script.exceptional_classes.clone(),
    })
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct OracleComparison {
    pub engine_dims: Vec<usize>,
    pub oracle_dims: Vec<usize>,
    pub ambient_matches: bool,
    pub missing_classes: Vec<String>,
    /// degrees where the correspondence is not bijective
    pub singular_degrees: Vec<usize>,
    /// basis-label pairs whose product is not preserved
    pub product_mismatches: Vec<(String, String)>,
}

impl OracleComparison {
    pub fn agrees(&self) -> bool {
        self.engine_dims == self.oracle_dims
            && self.ambient_matches
            && self.missing_classes.is_empty()
            && self.singular_degrees.is_empty()
            && self.product_mismatches.is_empty()
    }

    pub fn summary(&self) -> String {
        if self.agrees() {
            return format!("agree: dims {:?}", self.engine_dims);
        }
        let mut out = Vec::new();
        if self.engine_dims != self.oracle_dims {
            out.push(format!("dims differ: engine {:?}, oracle {:?}", self.engine_dims, self.oracle_dims));
        }
        if !self.ambient_matches {
            out.push("ambient rings differ".into());
        }
        if !self.missing_classes.is_empty() {
            out.push(format!("no oracle class for {}", self.missing_classes.join(", ")));
        }
        if !self.singular_degrees.is_empty() {
            out.push(format!("correspondence not bijective in degrees {:?}", self.singular_degrees));
        }
        if let Some((a, b)) = self.product_mismatches.first() {
            out.push(format!("{} products differ, first {a} * {b}", self.product_mismatches.len()));
        }
        out.join("; ")
    }
}

/// Compares the engine ring with an oracle run through the basis correspondence.
pub fn compare_with_oracle(ring: &WonderRing, oracle: &OracleRun) -> Result<OracleComparison> {
    let d = ring.diagram();
    let eng = ring.algebra();
    let ora = &oracle.algebra;
    let mut cmp = OracleComparison {
        engine_dims: eng.dims(),
        oracle_dims: ora.dims(),
        ambient_matches: oracle.pullback.source_dims() == d.ambient_algebra().dims().as_slice(),
        ..Default::default()
    };
    let li = ring.decomposition();
    let mut images = Vec::with_capacity(ring.basis_len());
    for i in 0..ring.basis_len() {
        let key = ring.basis_key(i);
        let s = &li.summands[key.summand];
        let mut img = oracle.pullback.apply(&ring.lift(s.burrow, &Element::basis(key.alpha)));
        for (&x, &m) in s.nest.iter().zip(&s.mu) {
            let id = &d.elements[x].id;
            match oracle.exceptional_classes.get(id) {
                Some(e) => img = ora.mul_unchecked(&img, &ora.power(e, m)),
                None => {
                    if !cmp.missing_classes.contains(id) {
                        cmp.missing_classes.push(id.clone());
                    }
                }
            }
        }
        images.push(img);
    }
    if cmp.engine_dims != cmp.oracle_dims || !cmp.missing_classes.is_empty() {
        return Ok(cmp);
    }
    for k in 0..eng.dims().len() {
        let cols: Vec<Vec<_>> = eng.range(k).map(|i| images[i].window(ora.range(k))).collect();
        let rows: Vec<Vec<_>> = (0..ora.dim(k)).map(|r| cols.iter().map(|c| c[r].clone()).collect()).collect();
        if !cols.is_empty() && rank(&SparseMat::from_dense(&rows)) != cols.len() {
            cmp.singular_degrees.push(k);
        }
    }
    let map = |a: &Element| {
        let mut out = Element::zero();
        for (i, c) in a.terms() {
            out.add_scaled(&images[i], c);
        }
        out
    };
    for i in 0..eng.total_dim() {
        for j in i..eng.total_dim() {
            if eng.degree_of(i) + eng.degree_of(j) > eng.top_degree() {
                continue;
            }
            let lhs = map(&eng.mul_basis(i, j));
            let rhs = ora.mul_unchecked(&images[i], &images[j]);
            if lhs != rhs {
                cmp.product_mismatches.push((eng.label(i).to_string(), eng.label(j).to_string()));
            }
        }
    }
    Ok(cmp)
}

struct Builder {
    script: OracleScript,
    ambient: MonomialRing,
    current: GradedAlgebra,
    pi: GradedMap,
    /// exceptional classes in the current ring
    classes: Vec<(String, Element)>,
}

impl Builder {
    fn new(name: &str, n: usize) -> Result<Self> {
        let ambient = ambient_ring(Fiber::P1, n);
        let y = ambient.algebra.clone();
        let id: Vec<Element> = (0..y.total_dim()).map(Element::basis).collect();
        Ok(Builder {
            pi: GradedMap::from_images(&y, &y, 0, &id)?,
            script: OracleScript {
                name: name.into(),
                socle_degree: n,
                ambient: y.clone(),
                steps: Vec::new(),
                exceptional_classes: BTreeMap::new(),
            },
            current: y,
            ambient,
            classes: Vec::new(),
        })
    }

    /// `π*` of the ambient monomial with the given exponents.
    fn up(&self, e: &[u32]) -> Element {
        self.pi.apply(&self.ambient.monomial(e))
    }

    fn h(&self, i: usize) -> Element {
        let mut e = vec![0; self.ambient.vars.len()];
        e[i] = 1;
        self.up(&e)
    }

    fn class(&self, id: &str) -> Element {
        self.classes.iter().find(|(k, _)| k == id).map(|(_, e)| e.clone()).expect("known class")
    }

    fn point_class(&self) -> Element {
        self.up(&vec![1; self.ambient.vars.len()])
    }

    fn blow_up(&mut self, id: &str, step: OracleStep) -> Result<()> {
        let applied = apply_step(&self.current, self.script.socle_degree, &step, self.script.steps.len())?;
        for (_, e) in &mut self.classes {
            *e = applied.embedding.apply(e);
        }
        if let Some(e) = applied.exceptional {
            self.classes.push((id.to_string(), e));
        }
        self.pi = self.pi.compose(&applied.embedding)?;
        self.current = applied.algebra;
        self.script.steps.push(step);
        Ok(())
    }

    /// Blows up a reduced point not lying on earlier centers.
    fn blow_up_point(&mut self, id: &str, label: &str) -> Result<()> {
        let n = self.ambient.vars.len();
        let mut pullback = vec![Element::zero(); self.current.total_dim()];
        pullback[0] = Element::basis(0);
        let mut chern = vec![Element::zero(); n - 1];
        chern.push(self.point_class());
        let step = OracleStep::BlowUp {
            name: label.into(),
            center: GradedAlgebra::trivial(),
            pullback,
            pushforward: vec![self.point_class()],
            chern,
        };
        self.blow_up(id, step)
    }

    /// Blows up a rational curve in a threefold, given the degree of every
    /// degree-one basis class on it, its class and its normal degree lift.
    fn blow_up_curve(
        &mut self,
        id: &str,
        label: &str,
        degrees: &[(Element, i64)],
        class: Element,
        c1: Element,
    ) -> Result<()> {
        let curve = GradedAlgebra::truncated_polynomial("q", 1);
        let mut pullback = vec![Element::zero(); self.current.total_dim()];
        pullback[0] = Element::basis(0);
        for j in self.current.range(1) {
            let v = degrees
                .iter()
                .find(|(e, _)| *e == Element::basis(j))
                .map(|(_, v)| *v)
                .ok_or_else(|| Error::Invalid(format!("no degree given for {}", self.current.label(j))))?;
            pullback[j] = Element::basis(1).scaled(&int(v));
        }
        let step = OracleStep::BlowUp {
            name: label.into(),
            center: curve,
            pullback,
            pushforward: vec![class.clone(), self.point_class()],
            chern: vec![c1, class],
        };
        self.blow_up(id, step)
    }

    fn finish(mut self, ids: &[(&str, &str)]) -> OracleScript {
        for (engine_id, class_id) in ids {
            self.script.exceptional_classes.insert(engine_id.to_string(), self.class(class_id));
        }
        self.script
    }
}

/// `(P^1)^3` blown up along the small diagonal.
pub fn fm_p1_three_script() -> Result<OracleScript> {
    let mut b = Builder::new("fm-p1-3", 3)?;
    let hs: Vec<Element> = (0..3).map(|i| b.h(i)).collect();
    let mut diag = Element::zero();
    for e in [[1, 1, 0], [1, 0, 1], [0, 1, 1]] {
        diag = diag.plus(&b.up(&e));
    }
    let mut c1 = Element::zero();
    for h in &hs {
        c1.add_scaled(h, &crate::linalg::rat(4, 3));
    }
    let degrees: Vec<(Element, i64)> = hs.iter().map(|h| (h.clone(), 1)).collect();
    b.blow_up_curve("D123", "E", &degrees, diag, c1)?;
    Ok(b.finish(&[("D123", "D123")]))
}

/// `(P^1)^2` blown up at the three points `(p, p)`.
pub fn keel_two_script() -> Result<OracleScript> {
    let mut b = Builder::new("keel-2", 2)?;
    for p in KEEL_POINTS {
        b.blow_up_point(&format!("D12@{p}"), &format!("E{p}"))?;
    }
    let ids: Vec<String> = KEEL_POINTS.iter().map(|p| format!("D12@{p}")).collect();
    let pairs: Vec<(&str, &str)> = ids.iter().map(|s| (s.as_str(), s.as_str())).collect();
    Ok(b.finish(&pairs))
}

/// `(P^1)^3` blown up at the points `(p, p, p)`, then along the strict transforms
/// of the ten curves `x_i = x_j = p` and the small diagonal.
pub fn keel_three_script() -> Result<OracleScript> {
    let mut b = Builder::new("keel-3", 3)?;
    for p in KEEL_POINTS {
        b.blow_up_point(&format!("D123@{p}"), &format!("E{p}"))?;
    }
    let points: Vec<String> = KEEL_POINTS.iter().map(|p| format!("D123@{p}")).collect();
    let mut curves: Vec<(String, Vec<usize>, Option<&str>)> = Vec::new();
    for p in KEEL_POINTS {
        for (i, j) in [(0, 1), (0, 2), (1, 2)] {
            curves.push((format!("D{}{}@{p}", i + 1, j + 1), vec![i, j], Some(p)));
        }
    }
    curves.push(("D123".into(), vec![0, 1, 2], None));
    for (id, fixed, point) in &curves {
        let through: Vec<&String> = match point {
            Some(p) => points.iter().filter(|s| s.ends_with(&format!("@{p}"))).collect(),
            None => points.iter().collect(),
        };
        let mut degrees = Vec::new();
        let (class, free) = if point.is_some() {
            let free = (0..3).find(|k| !fixed.contains(k)).expect("one free coordinate");
            for k in 0..3 {
                degrees.push((b.h(k), i64::from(k == free)));
            }
            let mut e = vec![0; 3];
            for &k in fixed {
                e[k] = 1;
            }
            (b.up(&e), free)
        } else {
            for k in 0..3 {
                degrees.push((b.h(k), 1));
            }
            (b.up(&[1, 1, 0]).plus(&b.up(&[1, 0, 1])).plus(&b.up(&[0, 1, 1])), 0)
        };
        let mut strict = class;
        for (cid, e) in &b.classes {
            let on = through.iter().any(|s| *s == cid);
            degrees.push((e.clone(), i64::from(on)));
            if on {
                strict = strict.plus(&b.current.power(e, 2));
            }
        }
        let c1 = b.h(free).scaled(&int(-2));
        b.blow_up_curve(id, &format!("E{}", id.trim_start_matches('D').replace('@', "_")), &degrees, strict, c1)?;
    }
    let ids: Vec<String> = points.iter().cloned().chain(curves.iter().map(|c| c.0.clone())).collect();
    let pairs: Vec<(&str, &str)> = ids.iter().map(|s| (s.as_str(), s.as_str())).collect();
    Ok(b.finish(&pairs))
}

/// The named reference scripts.
pub fn named_script(name: &str) -> Result<OracleScript> {
    match name {
        "fm-p1-3" => fm_p1_three_script(),
        "keel-2" => keel_two_script(),
        "keel-3" => keel_three_script(),
        other => Err(Error::Invalid(format!("unknown oracle script `{other}` (fm-p1-3, keel-2, keel-3)"))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::engine::{build_ring, EngineOptions};
    use crate::models::{fm_power, keel_model, DiagonalFlag};

    fn check(script: &OracleScript, diagram: &crate::diagram::BurrowDiagram, dims: &[usize]) {
        let r = run(script).unwrap();
        assert_eq!(r.dims(), dims);
        assert!(r.is_pd());
        assert!(r.reports.iter().all(|(_, p)| p.ok()), "{:?}", r.reports);
        assert_eq!(&script.ambient, diagram.ambient_algebra());
        let ring = build_ring(diagram, EngineOptions::default()).unwrap();
        let cmp = compare_with_oracle(&ring, &r).unwrap();
        assert!(cmp.agrees(), "{}", cmp.summary());
    }

    #[test]
    fn fm_three_agrees() {
        let d = fm_power(Fiber::P1, 3, DiagonalFlag::AtLeastTwo).unwrap();
        check(&fm_p1_three_script().unwrap(), &d, &[1, 4, 4, 1]);
    }

    #[test]
    fn keel_two_agrees() {
        check(&keel_two_script().unwrap(), &keel_model(2).unwrap(), &[1, 5, 1]);
    }

    #[test]
    fn keel_three_agrees() {
        check(&keel_three_script().unwrap(), &keel_model(3).unwrap(), &[1, 16, 16, 1]);
    }

    #[test]
    fn corrupted_chern_class_is_detected() {
        let mut s = fm_p1_three_script().unwrap();
        let h1 = Element::basis(1);
        if let OracleStep::BlowUp { chern, .. } = &mut s.steps[0] {
            chern[0] = chern[0].plus(&h1);
        }
        let r = run(&s).unwrap();
        let d = fm_power(Fiber::P1, 3, DiagonalFlag::AtLeastTwo).unwrap();
        let ring = build_ring(&d, EngineOptions::default()).unwrap();
        let cmp = compare_with_oracle(&ring, &r).unwrap();
        assert!(!cmp.agrees());
        assert!(!cmp.product_mismatches.is_empty());
    }

    #[test]
    fn round_trip() {
        let s = keel_two_script().unwrap();
        let text = script_to_string(&s);
        match crate::format::parse_any(&text).unwrap() {
            crate::format::AnyFile::Oracle(back) => assert_eq!(*back, s),
            _ => panic!("wrong kind"),
        }
    }

    #[test]
    fn bad_step_is_rejected() {
        let mut s = fm_p1_three_script().unwrap();
        if let OracleStep::BlowUp { pullback, .. } = &mut s.steps[0] {
            pullback[1] = pullback[1].scaled(&int(2));
        }
        assert!(run(&s).is_err());
    }
}
