//! Diagonal building sets on powers `F^n` (optionally over a base), and the
//! Keel building set on `(P^1)^n` with frozen coordinates.
//!
//! A burrow is a set partition of `{1..n}` whose blocks are either free (the
//! coordinates in the block coincide) or frozen at one of the marked points.
//! Its ring is `A(base) ⊗ A(F)^{⊗ free blocks}`.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use super::monomial::MonomialRing;
use crate::algebra::{Element, GradedMap};
use crate::diagram::{BuildingElement, BurrowDiagram, BurrowEdge, BurrowNode, ChernPolynomial, NestRule};
use crate::error::{Error, Result};
use crate::linalg::{int, rat};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Fiber {
    P1,
    P2,
    /// Toy curve model: a trivial `P^1`-family over a base with ring `Q[s]/(s^2)`,
    /// with `K_i = -2 h_i` and diagonals `D_ij = h_i + h_j`.
    Curve,
}

impl Fiber {
    pub fn dim(self) -> u32 {
        match self {
            Fiber::P1 | Fiber::Curve => 1,
            Fiber::P2 => 2,
        }
    }

    /// Coefficients of `c(T_F)` in the hyperplane class.
    fn tangent(self) -> Vec<i64> {
        match self {
            Fiber::P1 | Fiber::Curve => vec![1, 2],
            Fiber::P2 => vec![1, 3, 3],
        }
    }

    fn base_vars(self) -> Vec<(String, u32)> {
        match self {
            Fiber::Curve => vec![("s".into(), 1)],
            _ => Vec::new(),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Fiber::P1 => "p1",
            Fiber::P2 => "p2",
            Fiber::Curve => "curve",
        }
    }
}

/// Which diagonals enter an FM building set.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DiagonalFlag {
    /// all `D_I` with `|I| >= 2`
    AtLeastTwo,
    /// only `|I| >= 3`; the pair diagonals are already divisors
    AtLeastThree,
}

impl DiagonalFlag {
    fn min_block(self) -> usize {
        match self {
            DiagonalFlag::AtLeastTwo => 2,
            DiagonalFlag::AtLeastThree => 3,
        }
    }
}

pub const KEEL_POINTS: [&str; 3] = ["0", "1", "inf"];

type Block = (Vec<usize>, Option<usize>);

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
struct Key(Vec<Block>);

struct Model {
    n: usize,
    fiber: Fiber,
    min_block: usize,
    points: Vec<String>,
}

fn block_label(n: usize, members: &[usize]) -> String {
    let sep = if n >= 10 { "." } else { "" };
    members.iter().map(|m| m.to_string()).collect::<Vec<_>>().join(sep)
}

pub fn set_partitions(n: usize) -> Vec<Vec<Vec<usize>>> {
    let mut out = vec![Vec::<Vec<usize>>::new()];
    for i in 1..=n {
        let mut next = Vec::new();
        for p in out {
            for b in 0..p.len() {
                let mut q = p.clone();
                q[b].push(i);
                next.push(q);
            }
            let mut q = p;
            q.push(vec![i]);
            next.push(q);
        }
        out = next;
    }
    out
}

impl Model {
    fn element_id(&self, members: &[usize], point: Option<usize>) -> String {
        let base = format!("D{}", block_label(self.n, members));
        match point {
            Some(p) => format!("{base}@{}", self.points[p]),
            None => base,
        }
    }

    fn structural(&self, b: &Block) -> bool {
        b.1.is_some() || b.0.len() >= 2
    }

    fn burrow_id(&self, k: &Key) -> String {
        let ids: Vec<String> =
            k.0.iter().filter(|b| self.structural(b)).map(|b| self.element_id(&b.0, b.1)).collect();
        if ids.is_empty() {
            "Y".into()
        } else {
            ids.join("+")
        }
    }

    fn canonical(mut blocks: Vec<Block>) -> Key {
        for b in &mut blocks {
            b.0.sort_unstable();
        }
        blocks.sort();
        Key(blocks)
    }

    fn keys(&self) -> Vec<Key> {
        let mut out = Vec::new();
        for part in set_partitions(self.n) {
            // injective partial assignments of points to blocks
            let mut assigns: Vec<Vec<Option<usize>>> = vec![Vec::new()];
            for _ in &part {
                let mut next = Vec::new();
                for a in &assigns {
                    let mut none = a.clone();
                    none.push(None);
                    next.push(none);
                    for p in 0..self.points.len() {
                        if !a.contains(&Some(p)) {
                            let mut s = a.clone();
                            s.push(Some(p));
                            next.push(s);
                        }
                    }
                }
                assigns = next;
            }
            for a in assigns {
                let blocks: Vec<Block> = part.iter().cloned().zip(a).collect();
                if blocks.iter().any(|(m, p)| p.is_none() && m.len() >= 2 && m.len() < self.min_block) {
                    continue;
                }
                out.push(Model::canonical(blocks));
            }
        }
        out.sort_by_key(|k| (self.n - k.0.iter().filter(|b| b.1.is_none()).count(), k.clone()));
        out
    }

    fn join(&self, a: &Key, b: &Key) -> Option<Key> {
        let mut parent: Vec<usize> = (0..=self.n).collect();
        fn find(p: &mut Vec<usize>, x: usize) -> usize {
            let mut r = x;
            while p[r] != r {
                r = p[r];
            }
            p[x] = r;
            r
        }
        for key in [a, b] {
            for (m, _) in &key.0 {
                for w in m.windows(2) {
                    let (x, y) = (find(&mut parent, w[0]), find(&mut parent, w[1]));
                    parent[x] = y;
                }
            }
        }
        // coordinates frozen at the same point coincide
        let mut anchor: HashMap<usize, usize> = HashMap::new();
        for key in [a, b] {
            for (m, p) in &key.0 {
                if let Some(p) = p {
                    let first = *anchor.entry(*p).or_insert(m[0]);
                    let (x, y) = (find(&mut parent, m[0]), find(&mut parent, first));
                    parent[x] = y;
                }
            }
        }
        let mut groups: BTreeMap<usize, (Vec<usize>, BTreeSet<usize>)> = BTreeMap::new();
        for i in 1..=self.n {
            let r = find(&mut parent, i);
            groups.entry(r).or_default().0.push(i);
        }
        for key in [a, b] {
            for (m, p) in &key.0 {
                if let Some(p) = p {
                    let r = find(&mut parent, m[0]);
                    groups.get_mut(&r).expect("root").1.insert(*p);
                }
            }
        }
        let mut blocks = Vec::new();
        for (_, (m, ps)) in groups {
            if ps.len() > 1 {
                return None;
            }
            blocks.push((m, ps.into_iter().next()));
        }
        Some(Model::canonical(blocks))
    }

    fn ring(&self, k: &Key) -> (MonomialRing, HashMap<usize, usize>) {
        let mut vars = self.fiber.base_vars();
        let mut var_of = HashMap::new();
        for (bi, (m, p)) in k.0.iter().enumerate() {
            if p.is_none() {
                var_of.insert(bi, vars.len());
                vars.push((format!("h{}", block_label(self.n, m)), self.fiber.dim()));
            }
        }
        (MonomialRing::new(vars), var_of)
    }

    fn codim(&self, k: &Key) -> usize {
        self.fiber.dim() as usize * (self.n - k.0.iter().filter(|b| b.1.is_none()).count())
    }

    fn diag_class(&self, r: &MonomialRing, x: usize, y: usize) -> Element {
        let m = self.fiber.dim();
        let mut out = Element::zero();
        for e in 0..=m {
            out = out.plus(&r.algebra.mul_unchecked(&r.var_power(x, e), &r.var_power(y, m - e)));
        }
        out
    }

    fn build(&self, with_named: bool) -> Result<BurrowDiagram> {
        let fdim = self.fiber.dim() as usize;
        let nbase = self.fiber.base_vars().len();
        let keys = self.keys();
        let rings: Vec<(MonomialRing, HashMap<usize, usize>)> = keys.iter().map(|k| self.ring(k)).collect();
        let ids: Vec<String> = keys.iter().map(|k| self.burrow_id(k)).collect();
        let pos: HashMap<&Key, usize> = keys.iter().enumerate().map(|(i, k)| (k, i)).collect();
        let socle_degree = rings[0].0.algebra.top_degree();

        let burrows: Vec<BurrowNode> = keys
            .iter()
            .enumerate()
            .map(|(i, k)| BurrowNode {
                id: ids[i].clone(),
                defining_set: k.0.iter().filter(|b| self.structural(b)).map(|b| self.element_id(&b.0, b.1)).collect(),
                codim: self.codim(k),
                algebra: rings[i].0.algebra.clone(),
            })
            .collect();

        // building elements
        let mut subsets: Vec<Vec<usize>> = Vec::new();
        for mask in 1u32..(1 << self.n) {
            subsets.push((1..=self.n).filter(|i| mask & (1 << (i - 1)) != 0).collect());
        }
        subsets.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
        let mut elements = Vec::new();
        let single = |members: &[usize], point: Option<usize>| {
            let mut blocks: Vec<Block> = vec![(members.to_vec(), point)];
            for i in 1..=self.n {
                if !members.contains(&i) {
                    blocks.push((vec![i], None));
                }
            }
            Model::canonical(blocks)
        };
        for s in subsets.iter().filter(|s| s.len() >= self.min_block) {
            let id = self.element_id(s, None);
            elements.push(BuildingElement {
                burrow: ids[pos[&single(s, None)]].clone(),
                id,
                codim: fdim * (s.len() - 1),
                indices: Some(s.iter().map(|&i| i as u32).collect()),
            });
        }
        for s in &subsets {
            for p in 0..self.points.len() {
                let mut idx: BTreeSet<u32> = s.iter().map(|&i| i as u32).collect();
                idx.insert((self.n + 1 + p) as u32);
                elements.push(BuildingElement {
                    id: self.element_id(s, Some(p)),
                    codim: fdim * s.len(),
                    burrow: ids[pos[&single(s, Some(p))]].clone(),
                    indices: Some(idx),
                });
            }
        }

        // meets and edges
        let mut intersections = BTreeMap::new();
        let mut edges = Vec::new();
        for i in 0..keys.len() {
            for j in 0..keys.len() {
                if i == j {
                    continue;
                }
                let meet = self.join(&keys[i], &keys[j]);
                if i < j && i != 0 {
                    intersections.insert((ids[i].clone(), ids[j].clone()), meet.as_ref().map(|m| ids[pos[m]].clone()));
                }
                if meet.as_ref() == Some(&keys[i]) {
                    edges.push(self.edge(&keys[i], &rings[i], &ids[i], &keys[j], &rings[j], &ids[j], nbase)?);
                }
            }
        }

        let mut named = BTreeMap::new();
        if with_named {
            let amb = &rings[0].0;
            let kcoef = -int(i64::from(self.fiber.dim()) + 1);
            for i in 1..=self.n {
                named.insert(format!("K{i}"), amb.var(nbase + i - 1).scaled(&kcoef));
                for j in (i + 1)..=self.n {
                    named.insert(
                        format!("D{}", block_label(self.n, &[i, j])),
                        self.diag_class(amb, nbase + i - 1, nbase + j - 1),
                    );
                }
            }
        }
        BurrowDiagram::new(socle_degree, elements, burrows, edges, intersections, NestRule::NestedOrDisjoint, named)
    }

    #[allow(clippy::too_many_arguments)]
    fn edge(
        &self,
        small: &Key,
        (sr, svar): &(MonomialRing, HashMap<usize, usize>),
        sid: &str,
        big: &Key,
        (br, bvar): &(MonomialRing, HashMap<usize, usize>),
        bid: &str,
        nbase: usize,
    ) -> Result<BurrowEdge> {
        let m = self.fiber.dim();
        let container = |members: &[usize]| -> usize {
            small.0.iter().position(|(sm, _)| sm.contains(&members[0])).expect("coarser partition")
        };
        // pullback: big variables to small ones, frozen blocks evaluate to zero
        let mut images: Vec<Element> = (0..nbase).map(|v| sr.var(v)).collect();
        images.resize(br.vars.len(), Element::zero());
        for (bi, (members, _)) in big.0.iter().enumerate() {
            if let Some(&v) = bvar.get(&bi) {
                let si = container(members);
                images[v] = match svar.get(&si) {
                    Some(&w) => sr.var(w),
                    None => Element::zero(),
                };
            }
        }
        let pull_images = br.substitute(&sr.algebra, &images);
        let pullback = GradedMap::from_images(&br.algebra, &sr.algebra, 0, &pull_images)?;

        // class of small in big, and a section of the pullback
        let mut class = br.algebra.unit();
        let mut section: Vec<Element> = (0..nbase).map(|v| br.var(v)).collect();
        section.resize(sr.vars.len(), Element::zero());
        let mut chern_total = br.algebra.unit();
        for (si, (_, p)) in small.0.iter().enumerate() {
            let inside: Vec<usize> = big
                .0
                .iter()
                .enumerate()
                .filter(|(_, (bm, _))| container(bm) == si)
                .filter_map(|(bi, _)| bvar.get(&bi).copied())
                .collect();
            if p.is_some() {
                for &v in &inside {
                    class = br.algebra.mul_unchecked(&class, &br.var_power(v, m));
                }
                continue;
            }
            let first = inside[0];
            section[svar[&si]] = br.var(first);
            for &v in &inside[1..] {
                class = br.algebra.mul_unchecked(&class, &self.diag_class(br, first, v));
            }
            let k = inside.len();
            if k >= 2 {
                let avg = br.linear(&inside.iter().map(|&v| (v, rat(1, k as i64))).collect::<Vec<_>>());
                let mut ct = Element::zero();
                let mut pw = br.algebra.unit();
                for (j, t) in self.fiber.tangent().into_iter().enumerate() {
                    if j > 0 {
                        pw = br.algebra.mul_unchecked(&pw, &avg);
                    }
                    ct.add_scaled(&pw, &int(t));
                }
                for _ in 1..k {
                    chern_total = br.algebra.mul_unchecked(&chern_total, &ct);
                }
            }
        }
        let lifts = sr.substitute(&br.algebra, &section);
        let push_images: Vec<Element> = lifts.iter().map(|l| br.algebra.mul_unchecked(l, &class)).collect();
        let codim = self.codim(small) - self.codim(big);
        let pushforward = GradedMap::from_images(&sr.algebra, &br.algebra, codim as i32, &push_images)?;
        let mut coeffs: Vec<Element> = (1..codim).map(|i| br.algebra.component(&chern_total, i)).collect();
        coeffs.push(class);
        Ok(BurrowEdge {
            small: sid.into(),
            big: bid.into(),
            pullback,
            pushforward,
            chern: ChernPolynomial::new(coeffs),
        })
    }
}

/// Fulton–MacPherson-type diagram on `F^n` built from the diagonals `D_I`.
pub fn fm_power(fiber: Fiber, n: usize, flag: DiagonalFlag) -> Result<BurrowDiagram> {
    if n < 2 {
        return Err(Error::Invalid("fm_power needs n >= 2".into()));
    }
    if n > 6 {
        return Err(Error::Invalid("fm_power is limited to n <= 6".into()));
    }
    Model { n, fiber, min_block: flag.min_block(), points: Vec::new() }.build(true)
}

/// Keel's building set on `(P^1)^n`: all `D_I` (|I| >= 2) and `D_{I,p}`, p in {0, 1, inf}.
pub fn keel_model(n: usize) -> Result<BurrowDiagram> {
    if n == 0 {
        return Err(Error::Invalid("keel_model needs n >= 1".into()));
    }
    if n > 4 {
        return Err(Error::Invalid("keel_model is limited to n <= 4".into()));
    }
    Model { n, fiber: Fiber::P1, min_block: 2, points: KEEL_POINTS.iter().map(|s| s.to_string()).collect() }
        .build(false)
}

/// The ring `A(F)^{⊗n}` (over the base, if any) with the labels used by the models.
pub fn ambient_ring(fiber: Fiber, n: usize) -> MonomialRing {
    let mut vars = fiber.base_vars();
    for i in 1..=n {
        vars.push((format!("h{}", block_label(n, &[i])), fiber.dim()));
    }
    MonomialRing::new(vars)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bell(n: usize) -> usize {
        // Bell numbers via the triangle
        let mut row = vec![1usize];
        for _ in 1..=n {
            let mut next = vec![*row.last().unwrap()];
            for x in &row {
                next.push(next.last().unwrap() + x);
            }
            row = next;
        }
        row[0]
    }

    #[test]
    fn partitions_match_bell_numbers() {
        for n in 1..=6 {
            assert_eq!(set_partitions(n).len(), bell(n), "n = {n}");
        }
    }

    #[test]
    fn fm_p1_diagrams_validate() {
        for n in 2..=4 {
            let d = fm_power(Fiber::P1, n, DiagonalFlag::AtLeastTwo).unwrap();
            assert_eq!(d.burrows.len(), bell(n));
            let r = d.validate();
            assert!(r.passed(), "n = {n}: {}", r.summary());
        }
        let d = fm_power(Fiber::P1, 2, DiagonalFlag::AtLeastTwo).unwrap();
        assert_eq!(d.elements.len(), 1);
        assert_eq!(d.burrows.iter().map(|b| b.id.as_str()).collect::<Vec<_>>(), vec!["Y", "D12"]);
    }

    #[test]
    fn fm_small_diagonal_is_the_meet() {
        let d = fm_power(Fiber::P1, 3, DiagonalFlag::AtLeastTwo).unwrap();
        assert_eq!(d.elements.len(), 4);
        assert_eq!(d.burrow_of(&["D12", "D13"]).unwrap().as_deref(), Some("D123"));
        assert_eq!(d.burrow_of(&[]).unwrap().as_deref(), Some("Y"));
        let e = d.edge(d.burrow_index("D123").unwrap(), d.ambient()).unwrap();
        assert_eq!(e.chern.degree(), 2);
    }

    #[test]
    fn other_fibers_validate() {
        for (fiber, flag) in [
            (Fiber::P2, DiagonalFlag::AtLeastTwo),
            (Fiber::Curve, DiagonalFlag::AtLeastTwo),
            (Fiber::P1, DiagonalFlag::AtLeastThree),
        ] {
            let d = fm_power(fiber, 3, flag).unwrap();
            let r = d.validate();
            assert!(r.passed(), "{fiber:?}: {}", r.summary());
        }
    }

    #[test]
    fn keel_diagrams() {
        let k3 = keel_model(3).unwrap();
        assert_eq!(k3.burrows.len(), 77);
        assert_eq!(k3.elements.len(), 4 + 21);
        for n in 1..=3 {
            let r = keel_model(n).unwrap().validate();
            assert!(r.passed(), "n = {n}: {}", r.summary());
        }
        let k2 = keel_model(2).unwrap();
        assert_eq!(k2.burrow_of(&["D1@0", "D2@1"]).unwrap().as_deref(), Some("D1@0+D2@1"));
        assert_eq!(k2.burrow_of(&["D1@0", "D1@1"]).unwrap(), None);
        assert_eq!(k2.burrow_of(&["D12", "D1@inf"]).unwrap().as_deref(), Some("D12@inf"));
    }
}
