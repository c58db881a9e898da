//! Evaluates the relation families of the presentation inside a built ring.

use serde::Serialize;

use crate::algebra::Element;
use crate::engine::WonderRing;
use crate::error::Result;
use crate::linalg::nullspace_basis;

#[derive(Clone, Debug, Default, Serialize, PartialEq, Eq)]
pub struct RelationFamily {
    pub name: String,
    pub instances: usize,
    pub failures: Vec<String>,
}

impl RelationFamily {
    fn new(name: &str) -> Self {
        RelationFamily { name: name.into(), ..Default::default() }
    }

    fn record(&mut self, what: impl FnOnce() -> String, value: &Element) {
        self.instances += 1;
        if !value.is_zero() {
            self.failures.push(what());
        }
    }
}

/// Which reading of `Σ_{S ⊇ ij} E_S = 0` holds, per diagonal divisor.
#[derive(Clone, Debug, Serialize, PartialEq, Eq)]
pub struct DivisorNormalization {
    pub pairs: usize,
    /// `D_ij - Σ_{S ⊇ ij} E_S = 0`: `E_ij` is the strict transform
    pub total_transform_vanishes: bool,
    /// `D_ij + Σ_{S ⊋ ij} E_S = 0`: `E_ij` read as `D_ij` itself
    pub literal_vanishes: bool,
}

#[derive(Clone, Debug, Serialize, PartialEq, Eq)]
pub struct PresentationReport {
    pub families: Vec<RelationFamily>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub divisor_normalization: Option<DivisorNormalization>,
}

impl PresentationReport {
    pub fn all_vanish(&self) -> bool {
        self.families.iter().all(|f| f.failures.is_empty())
    }

    pub fn render(&self) -> String {
        let mut out = String::new();
        for f in &self.families {
            out.push_str(&format!(
                "{}: {} instances, {}\n",
                f.name,
                f.instances,
                if f.failures.is_empty() { "all zero".to_string() } else { format!("{} nonzero", f.failures.len()) }
            ));
            for x in &f.failures {
                out.push_str(&format!("  nonzero: {x}\n"));
            }
        }
        if let Some(n) = &self.divisor_normalization {
            out.push_str(&format!(
                "diagonal divisors ({}): D_ij - sum E_S = 0 {}; D_ij + sum_(S > ij) E_S = 0 {}\n",
                n.pairs,
                if n.total_transform_vanishes { "holds" } else { "fails" },
                if n.literal_vanishes { "holds" } else { "fails" }
            ));
        }
        out
    }
}

fn pair_name(i: usize, j: usize, n: usize) -> String {
    let (a, b) = (i.min(j), i.max(j));
    if n >= 10 {
        format!("D{a}.{b}")
    } else {
        format!("D{a}{b}")
    }
}

pub fn presentation_report(ring: &WonderRing) -> Result<PresentationReport> {
    let d = ring.diagram();
    let alg = ring.algebra();
    let y = d.ambient_algebra();
    let ambient = d.ambient();
    let n_el = d.elements.len();
    let ex: Vec<Element> = (0..n_el).map(|x| ring.exceptional(x)).collect::<Result<_>>()?;
    let id = |x: usize| d.elements[x].id.as_str();

    let mut non_nest = RelationFamily::new("non-nest products");
    for s in 0..n_el {
        for t in (s + 1)..n_el {
            if !d.is_nest(&[s, t]) || d.burrow_of_indices(&[s, t]).is_none() {
                let v = alg.multiply(&ex[s], &ex[t])?;
                non_nest.record(|| format!("E({})*E({})", id(s), id(t)), &v);
            }
        }
    }

    let mut kernel = RelationFamily::new("J_S*E_S");
    let mut named = RelationFamily::new("named generators of J_S");
    let n = d.elements.iter().filter_map(|e| e.indices.as_ref()).flatten().max().copied().unwrap_or(0) as usize;
    for s in 0..n_el {
        let b = d.element_burrow(s);
        if b == ambient {
            continue;
        }
        let pull = &d.edge_or_err(b, ambient)?.pullback;
        for k in 1..=y.top_degree() {
            let m = pull.degree_matrix(k);
            for v in nullspace_basis(&m) {
                let start = y.range(k).start;
                let j = Element::from_terms(v.into_iter().enumerate().map(|(i, c)| (start + i, c)));
                let prod = alg.multiply(&ring.ambient_class(&j)?, &ex[s])?;
                kernel.record(|| format!("degree-{k} kernel class times E({})", id(s)), &prod);
            }
        }
        let Some(idx) = &d.elements[s].indices else { continue };
        if d.named_classes.is_empty() {
            continue;
        }
        let members: Vec<usize> = idx.iter().map(|&i| i as usize).collect();
        let all: Vec<usize> = (1..=n).collect();
        let mut gens: Vec<(String, Element)> = Vec::new();
        let get = |name: &str| d.named_classes.get(name).cloned();
        for &i in &members {
            for &j in &members {
                if i == j {
                    continue;
                }
                if let (Some(ki), Some(kj)) = (get(&format!("K{i}")), get(&format!("K{j}"))) {
                    if i < j {
                        gens.push((format!("K{i}-K{j}"), ki.minus(&kj)));
                    }
                }
                if let (Some(dij), Some(kj)) = (get(&pair_name(i, j, n)), get(&format!("K{j}"))) {
                    gens.push((format!("{}+K{j}", pair_name(i, j, n)), dij.plus(&kj)));
                }
                if i < j {
                    for &k in all.iter().filter(|&&k| k != i && k != j) {
                        if let (Some(a), Some(b)) = (get(&pair_name(i, k, n)), get(&pair_name(j, k, n))) {
                            gens.push((
                                format!("{}-{}", pair_name(i, k, n), pair_name(j, k, n)),
                                a.minus(&b),
                            ));
                        }
                    }
                }
            }
        }
        for (name, g) in gens {
            let restricted = pull.apply(&g);
            named.record(|| format!("{name} does not restrict to zero on {}", id(s)), &restricted);
            let prod = alg.multiply(&ring.ambient_class(&g)?, &ex[s])?;
            named.record(|| format!("({name})*E({})", id(s)), &prod);
        }
    }

    let mut chern = RelationFamily::new("P_X(-sum E_S)");
    for x in 0..n_el {
        let b = d.element_burrow(x);
        if b == ambient {
            continue;
        }
        let poly = &d.edge_or_err(b, ambient)?.chern;
        let c = poly.degree();
        let mut sigma = Element::zero();
        for s in d.elements_below(x) {
            sigma = sigma.minus(&ex[s]);
        }
        let mut total = alg.power(&sigma, c);
        for i in 1..=c {
            let ci = ring.ambient_class(poly.coeff(i))?;
            total = total.plus(&alg.multiply(&ci, &alg.power(&sigma, c - i))?);
        }
        chern.record(|| format!("P_{}(-sum E_S)", id(x)), &total);
    }

    let divisor_normalization = if d.named_classes.is_empty() {
        None
    } else {
        let mut pairs = 0;
        let (mut total_ok, mut literal_ok) = (true, true);
        for x in 0..n_el {
            let Some(idx) = &d.elements[x].indices else { continue };
            let v: Vec<usize> = idx.iter().map(|&i| i as usize).collect();
            if v.len() != 2 || d.codim(d.element_burrow(x)) != 1 {
                continue;
            }
            let Some(dij) = d.named_classes.get(&pair_name(v[0], v[1], n)) else { continue };
            pairs += 1;
            let dij = ring.ambient_class(dij)?;
            let mut above = Element::zero();
            for s in d.elements_below(x) {
                if s != x {
                    above = above.plus(&ex[s]);
                }
            }
            total_ok &= dij.minus(&ex[x]).minus(&above).is_zero();
            literal_ok &= dij.plus(&above).is_zero();
        }
        (pairs > 0).then_some(DivisorNormalization {
            pairs,
            total_transform_vanishes: total_ok,
            literal_vanishes: literal_ok,
        })
    };
    Ok(PresentationReport { families: vec![non_nest, kernel, named, chern], divisor_normalization })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::engine::{build_ring, EngineOptions};
    use crate::models::{fm_power, keel_model, DiagonalFlag, Fiber};

    #[test]
    fn fm_families_vanish() {
        for fiber in [Fiber::P1, Fiber::Curve] {
            let d = fm_power(fiber, 3, DiagonalFlag::AtLeastTwo).unwrap();
            let r = build_ring(&d, EngineOptions::default()).unwrap();
            let rep = presentation_report(&r).unwrap();
            assert!(rep.all_vanish(), "{}", rep.render());
            assert!(rep.families.iter().all(|f| f.instances > 0), "{}", rep.render());
            let norm = rep.divisor_normalization.unwrap();
            assert_eq!(norm.pairs, 3);
            assert!(norm.total_transform_vanishes && !norm.literal_vanishes);
        }
    }

    #[test]
    fn two_points_have_no_triple_generators() {
        let d = fm_power(Fiber::P1, 2, DiagonalFlag::AtLeastTwo).unwrap();
        let r = build_ring(&d, EngineOptions::default()).unwrap();
        let rep = presentation_report(&r).unwrap();
        assert!(rep.all_vanish());
        assert_eq!(rep.families[0].instances, 0);
    }

    #[test]
    fn keel_families_vanish() {
        let r = build_ring(&keel_model(3).unwrap(), EngineOptions::default()).unwrap();
        let rep = presentation_report(&r).unwrap();
        assert!(rep.all_vanish(), "{}", rep.render());
        assert!(rep.divisor_normalization.is_none());
    }
}
