//! Poincaré-duality accounting over the Li summands of a built ring.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use num_traits::Zero;
use serde::Serialize;

use crate::algebra::{pd_of, socle_check, socle_kernel_elements, Element, GradedAlgebra, GradedMap};
use crate::diagram::BurrowDiagram;
use crate::error::Result;
use crate::format::RingData;
use crate::linalg::{rank, SparseMat};

#[derive(Clone, Debug, Serialize, PartialEq, Eq)]
pub struct BurrowVerdict {
    pub burrow: String,
    pub socle_degree: usize,
    pub is_pd: bool,
    pub discrepancies: Vec<usize>,
    /// socle failure, when the burrow ring has no one-dimensional top
    #[serde(skip_serializing_if = "Option::is_none")]
    pub failure: Option<String>,
}

#[derive(Clone, Debug, Serialize, PartialEq, Eq)]
pub struct PdEquivalenceReport {
    pub ring_pd: bool,
    pub ring_discrepancies: Vec<usize>,
    pub burrows: Vec<BurrowVerdict>,
    pub failing_burrows: Vec<String>,
    /// ring PD iff every burrow PD
    pub holds: bool,
    pub hypothesis_failures: Vec<String>,
}

impl PdEquivalenceReport {
    pub fn render(&self) -> String {
        let mut out = format!(
            "ring: PD {}; discrepancies: {}\n",
            yes_no(self.ring_pd),
            join(&self.ring_discrepancies)
        );
        for b in &self.burrows {
            match &b.failure {
                Some(f) => out.push_str(&format!("burrow {}: not PD ({f})\n", b.burrow)),
                None => out.push_str(&format!(
                    "burrow {}: PD {}; discrepancies: {}\n",
                    b.burrow,
                    yes_no(b.is_pd),
                    join(&b.discrepancies)
                )),
            }
        }
        for h in &self.hypothesis_failures {
            out.push_str(&format!("hypothesis failure: {h}\n"));
        }
        out.push_str(&format!("equivalence: {}\n", if self.holds { "holds" } else { "VIOLATED" }));
        out
    }
}

fn yes_no(b: bool) -> &'static str {
    if b {
        "yes"
    } else {
        "no"
    }
}

fn join(v: &[usize]) -> String {
    v.iter().map(usize::to_string).collect::<Vec<_>>().join(" ")
}

/// Left discrepancies `dim A^k - rank` of a ring at its socle degree.
pub fn ring_discrepancies(ring: &RingData) -> std::result::Result<Vec<usize>, String> {
    pd_of(&ring.algebra, ring.socle_degree).map(|v| v.discrepancy_vector()).map_err(|f| f.to_string())
}

/// Compares the ring's PD verdict with those of the burrows carrying Li summands.
pub fn pd_equivalence_report(diagram: &BurrowDiagram, ring: &RingData) -> PdEquivalenceReport {
    let mut hyp = Vec::new();
    let (ring_pd, ring_disc) = match ring_discrepancies(ring) {
        Ok(v) => (v.iter().all(|&x| x == 0), v),
        Err(f) => {
            hyp.push(format!("ring: {f}"));
            (false, Vec::new())
        }
    };
    let mut ids: Vec<String> = vec![diagram.burrows[diagram.ambient()].id.clone()];
    for s in &ring.summands {
        if !ids.contains(&s.burrow) {
            ids.push(s.burrow.clone());
        }
    }
    let mut burrows = Vec::new();
    for id in ids {
        let Ok(b) = diagram.burrow_index(&id) else {
            hyp.push(format!("ring refers to unknown burrow {id}"));
            continue;
        };
        let d = diagram.socle_degree.saturating_sub(diagram.codim(b));
        let v = match pd_of(diagram.algebra(b), d) {
            Ok(v) => BurrowVerdict {
                burrow: id,
                socle_degree: d,
                is_pd: v.is_pd,
                discrepancies: v.discrepancy_vector(),
                failure: None,
            },
            Err(f) => BurrowVerdict {
                burrow: id,
                socle_degree: d,
                is_pd: false,
                discrepancies: Vec::new(),
                failure: Some(f.to_string()),
            },
        };
        burrows.push(v);
    }
    let failing: Vec<String> = burrows.iter().filter(|b| !b.is_pd).map(|b| b.burrow.clone()).collect();
    PdEquivalenceReport {
        holds: ring_pd == failing.is_empty(),
        ring_pd,
        ring_discrepancies: ring_disc,
        burrows,
        failing_burrows: failing,
        hypothesis_failures: hyp,
    }
}

#[derive(Clone, Debug, Serialize, PartialEq, Eq)]
pub struct BlockReport {
    pub hypothesis_failures: Vec<String>,
    /// summand pairs `(s, t)` with a nonzero Gram block, `deg s <= deg t`
    pub nonzero_blocks: Vec<(usize, usize)>,
    pub violations: Vec<String>,
    /// triangularizing order of the summands
    pub order: Vec<usize>,
}

impl BlockReport {
    pub fn certified(&self) -> bool {
        self.hypothesis_failures.is_empty() && self.violations.is_empty()
    }

    pub fn render(&self, ring: &RingData) -> String {
        let mut out = String::new();
        for &(s, t) in &self.nonzero_blocks {
            out.push_str(&format!("block {} x {}\n", summand_name(ring, s), summand_name(ring, t)));
        }
        for h in &self.hypothesis_failures {
            out.push_str(&format!("hypothesis failure: {h}\n"));
        }
        for v in &self.violations {
            out.push_str(&format!("violation: {v}\n"));
        }
        let order: Vec<String> = self.order.iter().map(|&s| summand_name(ring, s)).collect();
        out.push_str(&format!("order: {}\n", order.join(" ")));
        out.push_str(&format!("block structure: {}\n", if self.certified() { "ok" } else { "FAILED" }));
        out
    }
}

pub fn summand_name(ring: &RingData, s: usize) -> String {
    let sm = &ring.summands[s];
    let mu: Vec<String> = sm.nest.iter().zip(&sm.mu).map(|(n, m)| format!("{n}:{m}")).collect();
    format!("[{{{}}} {{{}}}]", sm.nest.join(","), mu.join(","))
}

fn summand_check(ring: &RingData) -> Option<String> {
    if ring.summands.is_empty() || ring.basis_summand.len() != ring.algebra.total_dim() {
        Some("ring carries no summand data".into())
    } else {
        None
    }
}

/// The order sorting summands by nest, then by `|μ|` descending.
pub fn triangular_order(ring: &RingData) -> Vec<usize> {
    let mut order: Vec<usize> = (0..ring.summands.len()).collect();
    order.sort_by(|&a, &b| {
        let (sa, sb) = (&ring.summands[a], &ring.summands[b]);
        let na: BTreeSet<&String> = sa.nest.iter().collect();
        let nb: BTreeSet<&String> = sb.nest.iter().collect();
        (sa.nest.len(), na)
            .cmp(&(sb.nest.len(), nb))
            .then_with(|| sb.shift.cmp(&sa.shift))
            .then_with(|| a.cmp(&b))
    });
    order
}

/// Checks that nonzero top-degree pairings only occur between summands on the same
/// nest whose exponents add up to at least the bounds.
pub fn block_structure_check(ring: &RingData) -> BlockReport {
    let mut report =
        BlockReport { hypothesis_failures: Vec::new(), nonzero_blocks: Vec::new(), violations: Vec::new(), order: Vec::new() };
    if let Some(h) = summand_check(ring) {
        report.hypothesis_failures.push(h);
        return report;
    }
    report.order = triangular_order(ring);
    let sp = match socle_check(&ring.algebra, ring.socle_degree) {
        Ok(sp) => sp,
        Err(f) => {
            report.hypothesis_failures.push(format!("ring: {f}"));
            return report;
        }
    };
    let alg = &ring.algebra;
    let mut seen = BTreeSet::new();
    for k in 0..=sp.top() {
        let (rows, cols) = (alg.range(k).start, alg.range(sp.top() - k).start);
        for (r, c, _) in sp.gram(k).entries() {
            let (s, t) = (ring.basis_summand[rows + r], ring.basis_summand[cols + c]);
            let key = if alg.degree_of(rows + r) <= alg.degree_of(cols + c) { (s, t) } else { (t, s) };
            if !seen.insert(key) {
                continue;
            }
            let (a, b) = (&ring.summands[s], &ring.summands[t]);
            let same: bool = {
                let na: BTreeSet<&String> = a.nest.iter().collect();
                let nb: BTreeSet<&String> = b.nest.iter().collect();
                na == nb
            };
            if !same {
                report.violations.push(format!(
                    "{} pairs with {} across distinct nests",
                    summand_name(ring, s),
                    summand_name(ring, t)
                ));
            } else {
                let mb: HashMap<&String, usize> = b.nest.iter().zip(&b.mu).map(|(x, &m)| (x, m)).collect();
                for ((x, &m), &bound) in a.nest.iter().zip(&a.mu).zip(&a.bounds) {
                    if m + mb[x] < bound {
                        report.violations.push(format!(
                            "{} pairs with {} but exponents of {x} sum below {bound}",
                            summand_name(ring, s),
                            summand_name(ring, t)
                        ));
                    }
                }
            }
        }
    }
    report.nonzero_blocks = seen.into_iter().collect();
    report
}

#[derive(Clone, Debug, Serialize, PartialEq, Eq)]
pub struct BlockDiscrepancy {
    pub summand: usize,
    pub partner: Option<usize>,
    /// `rows - rank` of the diagonal block, per ring degree
    pub per_degree: Vec<usize>,
}

#[derive(Clone, Debug, Serialize, PartialEq, Eq)]
pub struct DiscrepancyTable {
    pub ring: Vec<usize>,
    pub blocks: Vec<BlockDiscrepancy>,
    pub block_sums: Vec<usize>,
    pub sums_match: bool,
    pub certified: bool,
    pub hypothesis_failures: Vec<String>,
}

impl DiscrepancyTable {
    pub fn render(&self, ring: &RingData) -> String {
        let mut out = format!("ring: {}\n", join(&self.ring));
        for b in &self.blocks {
            if b.per_degree.iter().any(|&x| x != 0) {
                out.push_str(&format!("summand {}: {}\n", summand_name(ring, b.summand), join(&b.per_degree)));
            }
        }
        out.push_str(&format!("blocks: {}\n", join(&self.block_sums)));
        for h in &self.hypothesis_failures {
            out.push_str(&format!("hypothesis failure: {h}\n"));
        }
        out.push_str(&format!("sums match: {}\n", yes_no(self.sums_match)));
        out
    }
}

/// Per-degree ring discrepancies against the sum of diagonal-block discrepancies,
/// where the diagonal block pairs `(N, μ)` with `(N, b - μ)`.
pub fn discrepancy_table(ring: &RingData) -> DiscrepancyTable {
    let block = block_structure_check(ring);
    let mut table = DiscrepancyTable {
        ring: Vec::new(),
        blocks: Vec::new(),
        block_sums: Vec::new(),
        sums_match: false,
        certified: block.certified(),
        hypothesis_failures: block.hypothesis_failures.clone(),
    };
    let sp = match socle_check(&ring.algebra, ring.socle_degree) {
        Ok(sp) => sp,
        Err(_) => return table,
    };
    table.ring = crate::algebra::pd_verdict(&sp).discrepancy_vector();
    if summand_check(ring).is_some() {
        return table;
    }
    let alg = &ring.algebra;
    let top = sp.top();
    let mut partner_of: BTreeMap<(BTreeSet<&String>, Vec<(&String, usize)>), usize> = BTreeMap::new();
    let canon = |s: usize| {
        let sm = &ring.summands[s];
        let mut mu: Vec<(&String, usize)> = sm.nest.iter().zip(&sm.mu).map(|(x, &m)| (x, m)).collect();
        mu.sort();
        (sm.nest.iter().collect::<BTreeSet<_>>(), mu)
    };
    for s in 0..ring.summands.len() {
        partner_of.insert(canon(s), s);
    }
    let mut members: Vec<Vec<Vec<usize>>> = vec![vec![Vec::new(); top + 1]; ring.summands.len()];
    for i in 0..alg.total_dim() {
        members[ring.basis_summand[i]][alg.degree_of(i)].push(i);
    }
    table.block_sums = vec![0; top + 1];
    for s in 0..ring.summands.len() {
        let sm = &ring.summands[s];
        let (nest, mut mu) = canon(s);
        let bounds: HashMap<&String, usize> = sm.nest.iter().zip(&sm.bounds).map(|(x, &b)| (x, b)).collect();
        for (x, m) in &mut mu {
            *m = bounds[x] - *m;
        }
        let partner = partner_of.get(&(nest, mu)).copied();
        let mut per_degree = vec![0; top + 1];
        for (k, slot) in per_degree.iter_mut().enumerate() {
            let rows = &members[s][k];
            if rows.is_empty() {
                continue;
            }
            let cols: &[usize] = match partner {
                Some(p) => &members[p][top - k],
                None => &[],
            };
            let dense: Vec<Vec<_>> = rows
                .iter()
                .map(|&i| cols.iter().map(|&j| alg.mul_basis(i, j).coeff(sp.socle_index())).collect())
                .collect();
            let r = if cols.is_empty() { 0 } else { rank(&SparseMat::from_dense(&dense)) };
            *slot = rows.len() - r;
            table.block_sums[k] += *slot;
        }
        table.blocks.push(BlockDiscrepancy { summand: s, partner, per_degree });
    }
    table.sums_match = table.block_sums == table.ring;
    table
}

#[derive(Clone, Debug, Serialize, PartialEq, Eq)]
pub struct TransferReport {
    pub hypothesis_failures: Vec<String>,
    pub conclusion_failures: Vec<String>,
    /// socle-kernel elements of the small ring examined, per degree
    pub checked: Vec<usize>,
}

impl TransferReport {
    pub fn ok(&self) -> bool {
        self.hypothesis_failures.is_empty() && self.conclusion_failures.is_empty()
    }
}

/// For each class of the small ring pairing to zero with its complement, checks
/// that its pullback is nonzero and pairs to zero in the big ring.
pub fn pullback_transfer_check(
    small: &GradedAlgebra,
    big: &GradedAlgebra,
    pullback: &GradedMap,
    pushforward: &GradedMap,
    small_socle: usize,
    big_socle: usize,
) -> Result<TransferReport> {
    let mut report = TransferReport { hypothesis_failures: Vec::new(), conclusion_failures: Vec::new(), checked: Vec::new() };
    if let Err(e) = pullback.check_homomorphism(small, big) {
        report.hypothesis_failures.push(format!("pullback: {e}"));
    }
    let inj = pullback.injectivity_failures();
    if !inj.is_empty() {
        report.hypothesis_failures.push(format!("pullback is not injective in degrees {inj:?}"));
    }
    if let Err(e) = pushforward.check_projection_formula(pullback, big, small) {
        report.hypothesis_failures.push(format!("projection formula: {e}"));
    }
    if !(0..big.total_dim()).any(|j| !pushforward.image_of_basis(j).coeff(0).is_zero()) {
        report.hypothesis_failures.push("pushforward does not reach the unit".into());
    }
    let small_sp = match socle_check(small, small_socle) {
        Ok(sp) => sp,
        Err(f) => {
            report.hypothesis_failures.push(format!("small ring: {f}"));
            return Ok(report);
        }
    };
    let big_sp = match socle_check(big, big_socle) {
        Ok(sp) => sp,
        Err(f) => {
            report.hypothesis_failures.push(format!("big ring: {f}"));
            return Ok(report);
        }
    };
    for k in 0..=small_socle {
        let kernel = socle_kernel_elements(&small_sp, small, k)?;
        report.checked.push(kernel.len());
        for a in kernel {
            let up = pullback.apply(&a);
            if up.is_zero() {
                report.conclusion_failures.push(format!("a degree-{k} kernel class pulls back to zero"));
                continue;
            }
            let Some(d) = big.degree_of_element(&up) else { continue };
            if d > big_socle {
                continue;
            }
            let pairs = big.range(big_socle - d).any(|j| !big_sp.socle_coordinate(&big.mul_unchecked(&up, &Element::basis(j))).is_zero());
            if pairs {
                report.conclusion_failures.push(format!("a degree-{k} kernel class pulls back to a class pairing nontrivially"));
            }
        }
    }
    Ok(report)
}

/// `big = small ⊗ Q[t]/t²` with `π*(s) = s ⊗ 1` and `π_*(s ⊗ t) = s`; optionally with
/// the pushforward zeroed out.
pub fn product_transfer_fixture(small: &GradedAlgebra, zero_push: bool) -> Result<(GradedAlgebra, GradedMap, GradedMap)> {
    let line = GradedAlgebra::truncated_polynomial("t", 1);
    let (big, index) = small.tensor_with_index(&line);
    let pull: Vec<Element> = (0..small.total_dim()).map(|i| Element::basis(index[&(i, 0)])).collect();
    let mut push = vec![Element::zero(); big.total_dim()];
    if !zero_push {
        for i in 0..small.total_dim() {
            push[index[&(i, 1)]] = Element::basis(i);
        }
    }
    let pull = GradedMap::from_images(small, &big, 0, &pull)?;
    let push = GradedMap::from_images(&big, small, -1, &push)?;
    Ok((big, pull, push))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::engine::{build_ring, EngineOptions};
    use crate::models::{broken_burrow_fixture, fm_power, keel_model, synthetic_broken, DiagonalFlag, Fiber};

    fn ring_of(d: &BurrowDiagram) -> RingData {
        build_ring(d, EngineOptions::default()).unwrap().to_ring_data()
    }

    #[test]
    fn fm_three_blocks() {
        let d = fm_power(Fiber::P1, 3, DiagonalFlag::AtLeastTwo).unwrap();
        let r = ring_of(&d);
        let b = block_structure_check(&r);
        assert!(b.certified(), "{}", b.render(&r));
        assert_eq!(b.nonzero_blocks, vec![(0, 0), (1, 1)]);
        let t = discrepancy_table(&r);
        assert!(t.sums_match);
        assert_eq!(t.ring, vec![0, 0, 0, 0]);
        let e = pd_equivalence_report(&d, &r);
        assert!(e.holds && e.ring_pd);
    }

    #[test]
    fn broken_burrows_add_up() {
        for (count, dims, disc) in [(1, vec![1, 3, 4, 3, 1], 2), (2, vec![1, 4, 6, 4, 1], 4)] {
            let d = broken_burrow_fixture(count).unwrap();
            let r = ring_of(&d);
            assert_eq!(r.algebra.dims(), dims);
            let e = pd_equivalence_report(&d, &r);
            assert!(e.holds && !e.ring_pd);
            assert_eq!(e.failing_burrows.len(), count);
            let t = discrepancy_table(&r);
            assert!(t.certified && t.sums_match, "{}", t.render(&r));
            assert_eq!(t.ring, vec![0, 0, disc, 0, 0]);
        }
    }

    #[test]
    fn keel_blocks() {
        let d = keel_model(3).unwrap();
        let r = ring_of(&d);
        assert!(block_structure_check(&r).certified());
        assert!(discrepancy_table(&r).sums_match);
    }

    #[test]
    fn transfer() {
        let small = synthetic_broken(&[1, 2, 1], 1, 3).unwrap();
        let (big, pull, push) = product_transfer_fixture(&small, false).unwrap();
        let rep = pullback_transfer_check(&small, &big, &pull, &push, 2, 3).unwrap();
        assert!(rep.ok(), "{rep:?}");
        assert!(rep.checked[1] >= 1);
        let pd = GradedAlgebra::truncated_polynomial("h", 2);
        let (big, pull, push) = product_transfer_fixture(&pd, false).unwrap();
        let rep = pullback_transfer_check(&pd, &big, &pull, &push, 2, 3).unwrap();
        assert!(rep.ok());
        assert!(rep.checked.iter().all(|&n| n == 0));
        let (big, pull, push) = product_transfer_fixture(&small, true).unwrap();
        let rep = pullback_transfer_check(&small, &big, &pull, &push, 2, 3).unwrap();
        assert!(!rep.hypothesis_failures.is_empty());
    }

    #[test]
    fn trivial_diagram_reduces_to_ambient() {
        let d = keel_model(1).unwrap();
        let r = ring_of(&d);
        let e = pd_equivalence_report(&d, &r);
        assert!(e.holds && e.ring_pd);
        assert_eq!(e.burrows[0].burrow, "Y");
    }
}
