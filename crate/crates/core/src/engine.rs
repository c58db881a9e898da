//! The ring of the wonderful compactification on the Li basis.
//!
//! A basis element is `(N, μ, α)`: a nest, a standard function and a basis class of
//! the burrow `∩N`, standing for `lift(α)·∏ E_X^{μ(X)}`. A general monomial is
//! `(e, γ)` with `e` an exponent vector supported on a nest `U` and `γ` a class on
//! `∩U`. Products merge supports, multiply coefficients through the ambient ring and
//! reduce with the Chern relation of the violating element `X ⊂ W`:
//!
//! ```text
//! E_X^b·M = (-1)^{b+1} [ (-σ)^b - (-E_X)^b + Σ_i c_i (-σ)^{b-i} ]·M,   σ = Σ_{S⊆X} E_S
//! ```
//!
//! Every rewrite strictly lowers the exponent vector read in (codim ascending, index)
//! order, since only `X` loses exponent and new factors sit strictly below `X`.

use std::collections::{BTreeMap, HashMap};

use num_traits::One;

use crate::algebra::{Element, GradedAlgebra};
use crate::blowup::{lift_with, section};
use crate::diagram::BurrowDiagram;
use crate::error::{Error, Result};
use crate::format::{RingData, SummandFile};
use crate::linalg::{int, Rat};
use crate::nest::{li_decomposition, nest_bounds, LiDecomposition};

pub const DEFAULT_MAX_REWRITES: usize = 10_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct EngineOptions {
    /// rewrite steps allowed per product
    pub max_rewrites: usize,
}

impl Default for EngineOptions {
    fn default() -> Self {
        EngineOptions { max_rewrites: DEFAULT_MAX_REWRITES }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct RewriteStats {
    pub products: usize,
    pub rewrites: usize,
    pub max_rewrites_per_product: usize,
    /// strict-decrease checks of the termination measure (one per child monomial)
    pub measure_checks: usize,
}

impl RewriteStats {
    fn absorb(&mut self, other: &RewriteStats) {
        self.products += other.products;
        self.rewrites += other.rewrites;
        self.measure_checks += other.measure_checks;
        self.max_rewrites_per_product = self.max_rewrites_per_product.max(other.max_rewrites_per_product);
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct BasisKey {
    pub summand: usize,
    /// basis index inside the summand's burrow algebra
    pub alpha: usize,
}

/// Exponent vector indexed by measure position.
type Measure = Vec<u32>;

#[derive(Clone, Debug)]
pub struct WonderRing {
    diagram: BurrowDiagram,
    li: LiDecomposition,
    basis: Vec<BasisKey>,
    position: HashMap<(usize, usize), usize>,
    summand_of: HashMap<(Vec<usize>, Vec<usize>), usize>,
    algebra: GradedAlgebra,
    lifts: Vec<Vec<Element>>,
    /// element index -> position in the (codim ascending, index) order
    rank: Vec<usize>,
    by_rank: Vec<usize>,
    options: EngineOptions,
    stats: RewriteStats,
}

struct Reducer<'a> {
    d: &'a BurrowDiagram,
    lifts: &'a [Vec<Element>],
    rank: &'a [usize],
    by_rank: &'a [usize],
    cap: usize,
}

impl Reducer<'_> {
    fn support(&self, m: &Measure) -> Vec<usize> {
        let mut s: Vec<usize> = m.iter().enumerate().filter(|(_, &e)| e > 0).map(|(r, _)| self.by_rank[r]).collect();
        s.sort_unstable();
        s
    }

    fn lift(&self, burrow: usize, a: &Element) -> Element {
        lift_with(&self.lifts[burrow], a)
    }

    fn restrict(&self, burrow: usize, a: &Element) -> Result<Element> {
        self.d.restrict_from_ambient(burrow, a)
    }

    fn describe(&self, m: &Measure) -> String {
        let parts: Vec<String> = m
            .iter()
            .enumerate()
            .filter(|(_, &e)| e > 0)
            .map(|(r, &e)| {
                let id = &self.d.elements[self.by_rank[r]].id;
                if e == 1 {
                    format!("E({id})")
                } else {
                    format!("E({id})^{e}")
                }
            })
            .collect();
        if parts.is_empty() {
            "1".into()
        } else {
            parts.join("*")
        }
    }

    /// Reduces `Σ γ·∏E^e` to standard monomials, returned with their exponents.
    fn reduce(
        &self,
        start: Vec<(Measure, Element)>,
        stats: &mut RewriteStats,
    ) -> Result<Vec<(Vec<usize>, Vec<usize>, Element)>> {
        let mut work: BTreeMap<Measure, Element> = BTreeMap::new();
        for (m, c) in start {
            work.entry(m).or_default().add_scaled(&c, &Rat::one());
        }
        let mut out = Vec::new();
        let mut steps = 0usize;
        let ambient = self.d.ambient();
        while let Some((m, gamma)) = work.pop_last() {
            if gamma.is_zero() {
                continue;
            }
            let support = self.support(&m);
            if !self.d.is_nest(&support) {
                continue;
            }
            let Some(burrow) = self.d.burrow_of_indices(&support) else { continue };
            let bounds = nest_bounds(self.d, &support);
            let exps: Vec<usize> = support.iter().map(|&x| m[self.rank[x]] as usize).collect();
            let violating = support
                .iter()
                .zip(&bounds)
                .zip(&exps)
                .filter(|((_, &b), &e)| e >= b)
                .map(|((&x, &b), _)| (x, b))
                .max_by_key(|&(x, _)| (self.d.codim(self.d.element_burrow(x)), std::cmp::Reverse(x)));
            let Some((x, b)) = violating else {
                out.push((support, exps, gamma));
                continue;
            };
            steps += 1;
            stats.rewrites += 1;
            if steps > self.cap {
                return Err(Error::RewriteCap { cap: self.cap, monomial: self.describe(&m) });
            }
            if b == 0 {
                continue;
            }
            let above: Vec<usize> =
                support.iter().copied().filter(|&z| self.d.element_strictly_contained(x, z)).collect();
            let w = self.d.burrow_of_indices(&above).ok_or_else(|| Error::Invariant("empty W".into()))?;
            let bx = self.d.element_burrow(x);
            let edge = self.d.edge_or_err(bx, w)?;
            if edge.chern.degree() != b {
                return Err(Error::Invariant(format!(
                    "Chern polynomial of {} in {} has degree {}, expected {b}",
                    self.d.burrows[bx].id,
                    self.d.burrows[w].id,
                    edge.chern.degree()
                )));
            }
            let gamma_y = self.lift(burrow, &gamma);
            let ambient_alg = self.d.ambient_algebra();
            // coefficient classes γ·c_i in A(Y), c_0 = 1
            let mut coeff_y = vec![gamma_y.clone()];
            for i in 1..=b {
                let ci = if w == ambient { edge.chern.coeff(i).clone() } else { self.lift(w, edge.chern.coeff(i)) };
                coeff_y.push(ambient_alg.mul_unchecked(&gamma_y, &ci));
            }
            let mut base = m.clone();
            base[self.rank[x]] -= b as u32;
            let sigma: Vec<usize> = self.d.elements_below(x);
            let sign_b1 = if (b + 1) % 2 == 0 { int(1) } else { int(-1) };
            for (i, cy) in coeff_y.iter().enumerate() {
                if cy.is_zero() {
                    continue;
                }
                let j = b - i;
                let sign_j = if j % 2 == 0 { int(1) } else { int(-1) };
                for (k, multinom) in multi_indices(sigma.len(), j) {
                    if i == 0 && k.iter().zip(&sigma).all(|(&kk, &s)| if s == x { kk as usize == b } else { kk == 0 }) {
                        continue;
                    }
                    let mut child = base.clone();
                    for (&kk, &s) in k.iter().zip(&sigma) {
                        child[self.rank[s]] += kk;
                    }
                    stats.measure_checks += 1;
                    if child >= m {
                        return Err(Error::Invariant(format!(
                            "termination measure did not decrease: {} -> {}",
                            self.describe(&m),
                            self.describe(&child)
                        )));
                    }
                    let csupp = self.support(&child);
                    if !self.d.is_nest(&csupp) {
                        continue;
                    }
                    let Some(cb) = self.d.burrow_of_indices(&csupp) else { continue };
                    let coef = &sign_b1 * &sign_j * Rat::from_integer(multinom.into());
                    let restricted = self.restrict(cb, cy)?.scaled(&coef);
                    if !restricted.is_zero() {
                        work.entry(child).or_default().add_scaled(&restricted, &Rat::one());
                    }
                }
            }
        }
        stats.max_rewrites_per_product = stats.max_rewrites_per_product.max(steps);
        Ok(out)
    }
}

/// All `k ∈ N^len` with `|k| = total`, each with its multinomial coefficient.
fn multi_indices(len: usize, total: usize) -> Vec<(Vec<u32>, u64)> {
    fn rec(len: usize, total: usize, prefix: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if prefix.len() + 1 == len {
            prefix.push(total as u32);
            out.push(prefix.clone());
            prefix.pop();
            return;
        }
        for v in 0..=total {
            prefix.push(v as u32);
            rec(len, total - v, prefix, out);
            prefix.pop();
        }
    }
    if len == 0 {
        return if total == 0 { vec![(Vec::new(), 1)] } else { Vec::new() };
    }
    let mut out = Vec::new();
    rec(len, total, &mut Vec::new(), &mut out);
    let fact = |n: u64| (1..=n).product::<u64>();
    out.into_iter()
        .map(|k| {
            let denom: u64 = k.iter().map(|&v| fact(u64::from(v))).product();
            let m = fact(total as u64) / denom;
            (k, m)
        })
        .collect()
}

/// Builds the ring of `Y_G` from a validated diagram.
pub fn build_ring(diagram: &BurrowDiagram, options: EngineOptions) -> Result<WonderRing> {
    let d = diagram.clone();
    let li = li_decomposition(&d);
    let ambient = d.ambient();
    let y = d.ambient_algebra();
    let mut lifts = Vec::with_capacity(d.burrows.len());
    for b in 0..d.burrows.len() {
        if b == ambient {
            lifts.push((0..y.total_dim()).map(Element::basis).collect());
        } else if let Some(edge) = d.edge(b, ambient) {
            lifts.push(section(&edge.pullback, y, d.algebra(b))?);
        } else {
            return Err(Error::Invalid(format!("missing edge {} -> {}", d.burrows[b].id, d.burrows[ambient].id)));
        }
    }
    let mut order: Vec<usize> = (0..d.elements.len()).collect();
    order.sort_by_key(|&x| (d.codim(d.element_burrow(x)), x));
    let mut rank = vec![0; d.elements.len()];
    for (r, &x) in order.iter().enumerate() {
        rank[x] = r;
    }

    let mut keyed: Vec<(usize, usize, usize)> = Vec::new();
    let mut summand_of = HashMap::new();
    for (si, s) in li.summands.iter().enumerate() {
        summand_of.insert((s.nest.clone(), s.mu.clone()), si);
        let alg = d.algebra(s.burrow);
        for a in 0..alg.total_dim() {
            keyed.push((s.shift + alg.degree_of(a), si, a));
        }
    }
    keyed.sort_unstable();
    let top = keyed.last().map_or(0, |k| k.0);
    let mut labels: Vec<Vec<String>> = vec![Vec::new(); top + 1];
    let mut basis = Vec::with_capacity(keyed.len());
    let mut position = HashMap::new();
    for (g, &(deg, si, a)) in keyed.iter().enumerate() {
        let s = &li.summands[si];
        let mono: Vec<String> = s
            .nest
            .iter()
            .zip(&s.mu)
            .map(|(&x, &m)| {
                let id = &d.elements[x].id;
                if m == 1 {
                    format!("E({id})")
                } else {
                    format!("E({id})^{m}")
                }
            })
            .collect();
        let alpha = d.algebra(s.burrow).label(a);
        let label = match (alpha == "1", mono.is_empty()) {
            (_, true) => alpha.to_string(),
            (true, false) => mono.join("*"),
            (false, false) => format!("{alpha}*{}", mono.join("*")),
        };
        labels[deg].push(label);
        basis.push(BasisKey { summand: si, alpha: a });
        position.insert((si, a), g);
    }
    if basis.is_empty() || d.algebra(li.summands[basis[0].summand].burrow).degree_of(basis[0].alpha) != 0 {
        return Err(Error::Invariant("ring has no unit".into()));
    }

    let mut ring = WonderRing {
        algebra: GradedAlgebra::trivial(),
        diagram: d,
        li,
        basis,
        position,
        summand_of,
        lifts,
        rank,
        by_rank: order,
        options,
        stats: RewriteStats::default(),
    };
    let n = ring.basis.len();
    let socle = ring.diagram.socle_degree;
    let degrees: Vec<usize> = keyed.iter().map(|k| k.0).collect();
    let mut products = Vec::new();
    let mut stats = RewriteStats::default();
    for p in 1..n {
        for q in p..n {
            if degrees[p] + degrees[q] > socle.max(top) {
                continue;
            }
            let (prod, st) = ring.basis_product(p, q, options.max_rewrites)?;
            stats.absorb(&st);
            products.push((p, q, prod));
        }
    }
    ring.algebra = GradedAlgebra::new(labels, products)?;
    ring.stats = stats;
    Ok(ring)
}

impl WonderRing {
    fn reducer(&self, cap: usize) -> Reducer<'_> {
        Reducer { d: &self.diagram, lifts: &self.lifts, rank: &self.rank, by_rank: &self.by_rank, cap }
    }

    fn collect(&self, terms: Vec<(Vec<usize>, Vec<usize>, Element)>) -> Result<Element> {
        let mut out = Element::zero();
        for (nest, mu, gamma) in terms {
            let si = *self.summand_of.get(&(nest.clone(), mu.clone())).ok_or_else(|| {
                Error::Invariant(format!("reduced monomial on nest {nest:?} with exponents {mu:?} is not standard"))
            })?;
            for (a, c) in gamma.terms() {
                out.add_term(self.position[&(si, a)], c.clone());
            }
        }
        Ok(out)
    }

    fn measure_of(&self, nest: &[usize], exps: &[usize]) -> Measure {
        let mut m = vec![0u32; self.diagram.elements.len()];
        for (&x, &e) in nest.iter().zip(exps) {
            m[self.rank[x]] += e as u32;
        }
        m
    }

    /// Product of two basis elements, recomputed from scratch, with its rewrite statistics.
    pub fn basis_product(&self, p: usize, q: usize, cap: usize) -> Result<(Element, RewriteStats)> {
        let (kp, kq) = (self.basis[p], self.basis[q]);
        let (sp, sq) = (&self.li.summands[kp.summand], &self.li.summands[kq.summand]);
        let mut stats = RewriteStats { products: 1, ..Default::default() };
        let mut m = self.measure_of(&sp.nest, &sp.mu);
        for (a, b) in m.iter_mut().zip(self.measure_of(&sq.nest, &sq.mu)) {
            *a += b;
        }
        let r = self.reducer(cap);
        let support = r.support(&m);
        if !self.diagram.is_nest(&support) {
            return Ok((Element::zero(), stats));
        }
        let Some(burrow) = self.diagram.burrow_of_indices(&support) else {
            return Ok((Element::zero(), stats));
        };
        let y = self.diagram.ambient_algebra();
        let prod_y = y.mul_unchecked(&self.lifts[sp.burrow][kp.alpha], &self.lifts[sq.burrow][kq.alpha]);
        let gamma = self.diagram.restrict_from_ambient(burrow, &prod_y)?;
        let terms = r.reduce(vec![(m, gamma)], &mut stats)?;
        Ok((self.collect(terms)?, stats))
    }

    /// The ring element `y·∏ E_X^{e_X}` for an ambient class `y`.
    pub fn monomial(&self, y: &Element, exps: &[(usize, usize)]) -> Result<Element> {
        let mut m = vec![0u32; self.diagram.elements.len()];
        for &(x, e) in exps {
            if x >= m.len() {
                return Err(Error::UnknownElement(format!("#{x}")));
            }
            m[self.rank[x]] += e as u32;
        }
        let r = self.reducer(self.options.max_rewrites);
        let support = r.support(&m);
        if !self.diagram.is_nest(&support) {
            return Ok(Element::zero());
        }
        let Some(burrow) = self.diagram.burrow_of_indices(&support) else { return Ok(Element::zero()) };
        let gamma = self.diagram.restrict_from_ambient(burrow, y)?;
        let mut stats = RewriteStats::default();
        let terms = r.reduce(vec![(m, gamma)], &mut stats)?;
        self.collect(terms)
    }

    /// Image of an ambient class.
    pub fn ambient_class(&self, y: &Element) -> Result<Element> {
        self.monomial(y, &[])
    }

    /// The exceptional class `E_X`.
    pub fn exceptional(&self, x: usize) -> Result<Element> {
        self.monomial(&self.diagram.ambient_algebra().unit(), &[(x, 1)])
    }

    pub fn multiply(&self, a: &Element, b: &Element) -> Result<Element> {
        self.algebra.multiply(a, b)
    }

    pub fn algebra(&self) -> &GradedAlgebra {
        &self.algebra
    }

    pub fn diagram(&self) -> &BurrowDiagram {
        &self.diagram
    }

    pub fn decomposition(&self) -> &LiDecomposition {
        &self.li
    }

    pub fn dims(&self) -> Vec<usize> {
        self.algebra.dims()
    }

    pub fn basis_key(&self, i: usize) -> BasisKey {
        self.basis[i]
    }

    pub fn basis_len(&self) -> usize {
        self.basis.len()
    }

    /// Lift of a burrow class to the ambient ring (the section used by the engine).
    pub fn lift(&self, burrow: usize, a: &Element) -> Element {
        lift_with(&self.lifts[burrow], a)
    }

    pub fn stats(&self) -> &RewriteStats {
        &self.stats
    }

    pub fn options(&self) -> EngineOptions {
        self.options
    }

    pub fn to_ring_data(&self) -> RingData {
        let d = &self.diagram;
        RingData {
            socle_degree: d.socle_degree,
            algebra: self.algebra.clone(),
            summands: self
                .li
                .summands
                .iter()
                .map(|s| SummandFile {
                    nest: s.nest.iter().map(|&x| d.elements[x].id.clone()).collect(),
                    mu: s.mu.clone(),
                    bounds: s.bounds.clone(),
                    burrow: d.burrows[s.burrow].id.clone(),
                    shift: s.shift,
                })
                .collect(),
            basis_summand: self.basis.iter().map(|k| k.summand).collect(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::pd_of;
    use crate::models::{fm_power, keel_model, p2_point_fixture, DiagonalFlag, Fiber};

    #[test]
    fn multinomials() {
        let m = multi_indices(2, 2);
        assert_eq!(m, vec![(vec![0, 2], 1), (vec![1, 1], 2), (vec![2, 0], 1)]);
        assert_eq!(multi_indices(0, 0).len(), 1);
        assert!(multi_indices(0, 1).is_empty());
    }

    #[test]
    fn point_in_plane() {
        let d = p2_point_fixture();
        let r = build_ring(&d, EngineOptions::default()).unwrap();
        assert_eq!(r.dims(), vec![1, 2, 1]);
        let e = r.exceptional(0).unwrap();
        let pt = r.ambient_class(&Element::basis(2)).unwrap();
        assert_eq!(r.multiply(&e, &e).unwrap(), pt.scaled(&int(-1)));
        assert!(pd_of(r.algebra(), 2).unwrap().is_pd);
    }

    #[test]
    fn fm_rings() {
        for n in 2..=3 {
            let d = fm_power(Fiber::P1, n, DiagonalFlag::AtLeastTwo).unwrap();
            let r = build_ring(&d, EngineOptions::default()).unwrap();
            assert_eq!(r.dims(), r.decomposition().poincare);
            r.algebra().check_associativity().unwrap();
            assert!(pd_of(r.algebra(), d.socle_degree).unwrap().is_pd);
        }
        let d = fm_power(Fiber::P1, 3, DiagonalFlag::AtLeastTwo).unwrap();
        assert_eq!(build_ring(&d, EngineOptions::default()).unwrap().dims(), vec![1, 4, 4, 1]);
    }

    #[test]
    fn keel_two() {
        let d = keel_model(2).unwrap();
        let r = build_ring(&d, EngineOptions::default()).unwrap();
        assert_eq!(r.dims(), vec![1, 5, 1]);
        r.algebra().check_associativity().unwrap();
        assert!(pd_of(r.algebra(), 2).unwrap().is_pd);
    }

    #[test]
    fn divisor_classes_are_total_transforms() {
        // D12 pulled back equals E(D12) + E(D123) in the FM ring of (P^1)^3
        let d = fm_power(Fiber::P1, 3, DiagonalFlag::AtLeastTwo).unwrap();
        let r = build_ring(&d, EngineOptions::default()).unwrap();
        let x12 = d.element_index("D12").unwrap();
        let x123 = d.element_index("D123").unwrap();
        let lhs = r.ambient_class(&d.named_classes["D12"]).unwrap();
        let rhs = r.exceptional(x12).unwrap().plus(&r.exceptional(x123).unwrap());
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn tiny_cap_is_reported() {
        let d = fm_power(Fiber::P1, 3, DiagonalFlag::AtLeastTwo).unwrap();
        let err = build_ring(&d, EngineOptions { max_rewrites: 0 }).unwrap_err();
        assert!(matches!(err, Error::RewriteCap { cap: 0, .. }), "{err}");
        assert_eq!(err.exit_code(), 2);
    }
}

#[cfg(test)]
mod larger {
    use super::*;
    use crate::algebra::pd_of;
    use crate::models::{fm_power, keel_model, DiagonalFlag, Fiber};

    #[test]
    fn larger_models_are_gorenstein() {
        let r = build_ring(&keel_model(3).unwrap(), EngineOptions::default()).unwrap();
        assert_eq!(r.dims(), vec![1, 16, 16, 1]);
        assert!(pd_of(r.algebra(), 3).unwrap().is_pd);
        for (f, n) in [(Fiber::P1, 4), (Fiber::P2, 3), (Fiber::Curve, 3)] {
            let d = fm_power(f, n, DiagonalFlag::AtLeastTwo).unwrap();
            let r = build_ring(&d, EngineOptions::default()).unwrap();
            assert_eq!(r.dims(), r.decomposition().poincare, "{f:?} {n}");
            assert!(pd_of(r.algebra(), d.socle_degree).unwrap().is_pd, "{f:?} {n}");
            assert!(r.stats().max_rewrites_per_product < DEFAULT_MAX_REWRITES);
        }
    }
}
