//! Single-step constructions: the blow-up of `Y` along a smooth center `Z`, and
//! projective bundles.
//!
//! The blow-up ring is built on the additive basis
//! `A(Y) ⊕ A(Z)·E ⊕ ... ⊕ A(Z)·E^{c-1}` and multiplies with
//! `y·(zE^k) = (i*y · z)E^k` and the reduction coming from `P(-E) = 0`:
//!
//! ```text
//! z·E^c = (-1)^{c+1} i_*(z) + Σ_{i=1}^{c-1} (-1)^{i+1} (z·i*c_i) E^{c-i}
//! ```
//!
//! so `E^2 = -[pt]` for a point on a surface. The summand `A(Z)·E^k` is identified
//! with `lift(z)·E^k` for any lift of `z` to `A(Y)`.

use num_traits::{One, Zero};

use crate::algebra::{pd_of, socle_check, Element, GradedAlgebra, GradedMap, SoclePairing};
use crate::diagram::ChernPolynomial;
use crate::error::{Error, Result};
use crate::linalg::{self, int, Rat};

/// Section of a surjective graded pullback: lifts of each target basis element.
pub(crate) fn section(pull: &GradedMap, source: &GradedAlgebra, target: &GradedAlgebra) -> Result<Vec<Element>> {
    let mut lifts = vec![Element::zero(); target.total_dim()];
    for k in 0..=target.top_degree() {
        let tr = target.range(k);
        if tr.is_empty() {
            continue;
        }
        let m = pull.degree_matrix(k);
        let rhs: Vec<Vec<Rat>> = tr
            .clone()
            .map(|t| {
                let mut v = vec![Rat::zero(); tr.len()];
                v[t - tr.start] = Rat::one();
                v
            })
            .collect();
        let sols = linalg::solve_many(&m, &rhs)?;
        let s0 = source.range(k).start;
        for (t, sol) in tr.clone().zip(sols) {
            let sol = sol.ok_or_else(|| Error::Invalid(format!("pullback is not surjective in degree {k}")))?;
            lifts[t] = Element::from_terms(sol.into_iter().enumerate().map(|(i, c)| (s0 + i, c)));
        }
    }
    Ok(lifts)
}

pub(crate) fn lift_with(lifts: &[Element], a: &Element) -> Element {
    let mut out = Element::zero();
    for (i, c) in a.terms() {
        out.add_scaled(&lifts[i], c);
    }
    out
}

/// Which additive summand a blow-up basis element belongs to.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BlowupPart {
    Ambient(usize),
    /// `(k, z)`: the class `z·E^k`
    Exceptional(usize, usize),
}

#[derive(Clone, Debug)]
pub struct BlowupResult {
    pub algebra: GradedAlgebra,
    /// `E`, absent when the center is a divisor (`c = 1`)
    pub exceptional: Option<Element>,
    pub codim: usize,
    /// `π*: A(Y) -> A(Bl)`
    pub ambient_embedding: GradedMap,
    /// `z -> z·E^k` for k = 1..c-1, shift k
    pub summand_embeddings: Vec<GradedMap>,
    pub parts: Vec<BlowupPart>,
}

impl BlowupResult {
    /// Block index of a basis element: 0 for `A(Y)`, k for `A(Z)·E^k`.
    pub fn block_of(&self, i: usize) -> usize {
        match self.parts[i] {
            BlowupPart::Ambient(_) => 0,
            BlowupPart::Exceptional(k, _) => k,
        }
    }
}

struct BlowupTable<'a> {
    z: &'a GradedAlgebra,
    pull: &'a GradedMap,
    push: &'a GradedMap,
    c: usize,
    /// `i* c_i` in A(Z), index i-1
    restricted_chern: Vec<Element>,
    /// global index of `z·E^k`: ex_index[k-1][z]
    ex_index: Vec<Vec<usize>>,
    y_index: Vec<usize>,
    n: usize,
}

impl BlowupTable<'_> {
    /// Adds `coef · a·E^m` (a in A(Z), m >= 1) to `out` in normal form.
    fn add_reduced(&self, out: &mut Element, a: &Element, m: usize, coef: &Rat) {
        if a.is_zero() || coef.is_zero() {
            return;
        }
        if m < self.c {
            for (zi, x) in a.terms() {
                out.add_term(self.ex_index[m - 1][zi], x * coef);
            }
            return;
        }
        let c = self.c;
        let sign = |p: usize| if p % 2 == 0 { int(1) } else { int(-1) };
        // (-1)^{c+1} i_*(a) · E^{m-c}
        let pushed = self.push.apply(a);
        let s = coef * sign(c + 1);
        if m == c {
            for (yi, x) in pushed.terms() {
                out.add_term(self.y_index[yi], x * &s);
            }
        } else {
            let back = self.pull.apply(&pushed);
            self.add_reduced(out, &back, m - c, &s);
        }
        for i in 1..c {
            let t = self.z.mul_unchecked(a, &self.restricted_chern[i - 1]);
            self.add_reduced(out, &t, m - i, &(coef * sign(i + 1)));
        }
    }
}

/// Builds the ring of `Bl_Z Y` from the edge data of `Z ⊂ Y`.
pub fn blow_up(
    y: &GradedAlgebra,
    z: &GradedAlgebra,
    pullback: &GradedMap,
    pushforward: &GradedMap,
    chern: &ChernPolynomial,
) -> Result<BlowupResult> {
    blow_up_named(y, z, pullback, pushforward, chern, "E")
}

/// [`blow_up`] with a chosen label for the exceptional class.
pub fn blow_up_named(
    y: &GradedAlgebra,
    z: &GradedAlgebra,
    pullback: &GradedMap,
    pushforward: &GradedMap,
    chern: &ChernPolynomial,
    name: &str,
) -> Result<BlowupResult> {
    let c = chern.degree();
    if c == 0 {
        return Err(Error::Invalid("blow-up center needs codimension >= 1".into()));
    }
    chern.check_shape(y).map_err(Error::Invalid)?;
    if pullback.shift() != 0 || pushforward.shift() != c as i32 {
        return Err(Error::Invalid("map shifts do not match the codimension".into()));
    }
    if pullback.source_dims() != y.dims() || pullback.target_dims() != z.dims() {
        return Err(Error::Dimension("pullback does not go from A(Y) to A(Z)".into()));
    }
    if pushforward.source_dims() != z.dims() || pushforward.target_dims() != y.dims() {
        return Err(Error::Dimension("pushforward does not go from A(Z) to A(Y)".into()));
    }
    if let Some(k) = pullback.surjectivity_failures().first() {
        return Err(Error::Invalid(format!("pullback not surjective in degree {k}")));
    }

    // c_c must be the class of Z: compare i_*(a) with lift(a)·c_c for every basis a
    let lifts = section(pullback, y, z)?;
    for a in 0..z.total_dim() {
        let by_push = pushforward.apply(&Element::basis(a));
        let by_chern = y.mul_unchecked(&lifts[a], chern.top());
        if by_push != by_chern {
            return Err(Error::Relation(format!(
                "pushforward of {} is {:?} but lift·c_{c} gives {:?}",
                z.label(a),
                by_push,
                by_chern
            )));
        }
    }

    let top = y.top_degree().max(z.top_degree() + c - 1);
    let mut basis: Vec<Vec<String>> = vec![Vec::new(); top + 1];
    let mut parts_by_degree: Vec<Vec<BlowupPart>> = vec![Vec::new(); top + 1];
    for i in 0..=y.top_degree() {
        for yi in y.range(i) {
            basis[i].push(y.label(yi).to_string());
            parts_by_degree[i].push(BlowupPart::Ambient(yi));
        }
    }
    for k in 1..c {
        for zi in 0..z.total_dim() {
            let deg = z.degree_of(zi) + k;
            let e = if k == 1 { name.to_string() } else { format!("{name}^{k}") };
            let label = if zi == 0 { e } else { format!("{}*{e}", z.label(zi)) };
            basis[deg].push(label);
            parts_by_degree[deg].push(BlowupPart::Exceptional(k, zi));
        }
    }
    // remove trailing empty degrees (only possible when nothing lives there)
    while basis.len() > 1 && basis.last().is_some_and(Vec::is_empty) {
        basis.pop();
        parts_by_degree.pop();
    }
    let parts: Vec<BlowupPart> = parts_by_degree.concat();
    let n = parts.len();
    let mut y_index = vec![0; y.total_dim()];
    let mut ex_index = vec![vec![0; z.total_dim()]; c.saturating_sub(1)];
    for (g, p) in parts.iter().enumerate() {
        match *p {
            BlowupPart::Ambient(yi) => y_index[yi] = g,
            BlowupPart::Exceptional(k, zi) => ex_index[k - 1][zi] = g,
        }
    }
    let restricted_chern: Vec<Element> = chern.coeffs().iter().map(|ci| pullback.apply(ci)).collect();
    let table = BlowupTable { z, pull: pullback, push: pushforward, c, restricted_chern, ex_index, y_index, n };

    let mut products = Vec::new();
    for p in 1..n {
        for q in p..n {
            let mut out = Element::zero();
            match (parts[p], parts[q]) {
                (BlowupPart::Ambient(a), BlowupPart::Ambient(b)) => {
                    for (yi, x) in y.mul_basis(a, b).terms() {
                        out.add_term(table.y_index[yi], x.clone());
                    }
                }
                (BlowupPart::Ambient(a), BlowupPart::Exceptional(k, w))
                | (BlowupPart::Exceptional(k, w), BlowupPart::Ambient(a)) => {
                    let t = z.mul_unchecked(&pullback.image_of_basis(a), &Element::basis(w));
                    table.add_reduced(&mut out, &t, k, &Rat::one());
                }
                (BlowupPart::Exceptional(j, u), BlowupPart::Exceptional(k, w)) => {
                    let t = z.mul_basis(u, w);
                    table.add_reduced(&mut out, &t, j + k, &Rat::one());
                }
            }
            products.push((p, q, out));
        }
    }
    let algebra = GradedAlgebra::new(basis, products)?;
    debug_assert_eq!(algebra.total_dim(), table.n);

    let ambient_embedding = GradedMap::from_images(
        y,
        &algebra,
        0,
        &(0..y.total_dim()).map(|yi| Element::basis(table.y_index[yi])).collect::<Vec<_>>(),
    )?;
    let summand_embeddings = (1..c)
        .map(|k| {
            GradedMap::from_images(
                z,
                &algebra,
                k as i32,
                &(0..z.total_dim()).map(|zi| Element::basis(table.ex_index[k - 1][zi])).collect::<Vec<_>>(),
            )
        })
        .collect::<Result<Vec<_>>>()?;
    let exceptional = (c >= 2).then(|| Element::basis(table.ex_index[0][0]));

    let result = BlowupResult { algebra, exceptional, codim: c, ambient_embedding, summand_embeddings, parts };
    verify_presentation(&result, y, pullback, chern)?;
    Ok(result)
}

/// Asserts `P(-E) = 0` and `J·E = 0` in a blow-up result.
pub fn verify_presentation(
    r: &BlowupResult,
    y: &GradedAlgebra,
    pullback: &GradedMap,
    chern: &ChernPolynomial,
) -> Result<()> {
    let bl = &r.algebra;
    let Some(e) = &r.exceptional else {
        // divisorial center: E = [Z], which is already the ambient class c_1
        return Ok(());
    };
    let minus_e = e.scaled(&int(-1));
    let c = r.codim;
    let mut total = bl.power(&minus_e, c);
    for i in 1..=c {
        let ci = r.ambient_embedding.apply(chern.coeff(i));
        total = total.plus(&bl.mul_unchecked(&ci, &bl.power(&minus_e, c - i)));
    }
    if !total.is_zero() {
        return Err(Error::Relation(format!("P(-E) evaluates to {total:?}, not zero")));
    }
    for k in 0..=y.top_degree() {
        for v in linalg::nullspace_basis(&pullback.degree_matrix(k)) {
            let start = y.range(k).start;
            let j = Element::from_terms(v.into_iter().enumerate().map(|(i, c)| (start + i, c)));
            let prod = bl.mul_unchecked(&r.ambient_embedding.apply(&j), e);
            if !prod.is_zero() {
                return Err(Error::Relation(format!("J·E is nonzero for a kernel class in degree {k}")));
            }
        }
    }
    Ok(())
}

/// Ring of the projectivization of a rank-r bundle with Chern classes `c_1..c_r`
/// in `A(Z)`: basis `z·ξ^j`, j < r, with `ξ^r = -(c_1 ξ^{r-1} + ... + c_r)`.
pub fn projective_bundle(z: &GradedAlgebra, chern: &[Element]) -> Result<GradedAlgebra> {
    let r = chern.len();
    if r == 0 {
        return Err(Error::Invalid("bundle rank must be >= 1".into()));
    }
    for (i, ci) in chern.iter().enumerate() {
        if !z.contains(ci) || (!ci.is_zero() && z.degree_of_element(ci) != Some(i + 1)) {
            return Err(Error::Invalid(format!("c_{} must be homogeneous of degree {}", i + 1, i + 1)));
        }
    }
    let top = z.top_degree() + r - 1;
    let mut basis: Vec<Vec<String>> = vec![Vec::new(); top + 1];
    let mut slots: Vec<Vec<(usize, usize)>> = vec![Vec::new(); top + 1];
    for j in 0..r {
        for zi in 0..z.total_dim() {
            let deg = z.degree_of(zi) + j;
            let x = match j {
                0 => String::new(),
                1 => "xi".into(),
                _ => format!("xi^{j}"),
            };
            let label = match (zi == 0, j == 0) {
                (_, true) => z.label(zi).to_string(),
                (true, false) => x,
                (false, false) => format!("{}*{x}", z.label(zi)),
            };
            basis[deg].push(label);
            slots[deg].push((j, zi));
        }
    }
    let flat: Vec<(usize, usize)> = slots.concat();
    let mut index = vec![vec![0; z.total_dim()]; r];
    for (g, &(j, zi)) in flat.iter().enumerate() {
        index[j][zi] = g;
    }
    fn add(
        out: &mut Element,
        z: &GradedAlgebra,
        chern: &[Element],
        index: &[Vec<usize>],
        a: &Element,
        m: usize,
        coef: &Rat,
    ) {
        if a.is_zero() {
            return;
        }
        let r = chern.len();
        if m < r {
            for (zi, x) in a.terms() {
                out.add_term(index[m][zi], x * coef);
            }
            return;
        }
        for i in 1..=r {
            let t = z.mul_unchecked(a, &chern[i - 1]);
            add(out, z, chern, index, &t, m - i, &-coef.clone());
        }
    }
    let mut products = Vec::new();
    for p in 1..flat.len() {
        for q in p..flat.len() {
            let ((j, u), (k, w)) = (flat[p], flat[q]);
            let mut out = Element::zero();
            add(&mut out, z, chern, &index, &z.mul_basis(u, w), j + k, &Rat::one());
            products.push((p, q, out));
        }
    }
    GradedAlgebra::new(basis, products)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PropagationReport {
    /// failed hypotheses (socle shape, nonvanishing class); empty when all hold
    pub hypothesis_failures: Vec<String>,
    pub inputs_pd: Vec<(String, bool)>,
    pub output_pd: bool,
    pub equivalence_holds: bool,
    pub block_violations: Vec<String>,
}

impl PropagationReport {
    pub fn ok(&self) -> bool {
        self.hypothesis_failures.is_empty() && self.equivalence_holds && self.block_violations.is_empty()
    }

    /// Turns a violated equivalence or block shape into an invariant error.
    pub fn check(&self) -> Result<()> {
        if !self.hypothesis_failures.is_empty() {
            return Ok(());
        }
        if !self.equivalence_holds {
            return Err(Error::Invariant(format!(
                "PD equivalence violated: inputs {:?}, output {}",
                self.inputs_pd, self.output_pd
            )));
        }
        if let Some(v) = self.block_violations.first() {
            return Err(Error::Invariant(v.clone()));
        }
        Ok(())
    }
}

/// Nonzero gram entries of the blow-up pairing outside the allowed blocks
/// (`j + k >= c` or `j = k = 0`).
pub fn blowup_block_violations(r: &BlowupResult, sp: &SoclePairing) -> Vec<String> {
    let bl = &r.algebra;
    let mut out = Vec::new();
    for i in 0..=sp.top() {
        let g = sp.gram(i);
        let (rows, cols) = (bl.range(i), bl.range(sp.top() - i));
        for (ri, ci, _) in g.entries() {
            let (a, b) = (rows.start + ri, cols.start + ci);
            let (j, k) = (r.block_of(a), r.block_of(b));
            if (j, k) != (0, 0) && j + k < r.codim {
                out.push(format!(
                    "degree {i}: {} x {} pairs nontrivially across blocks ({j}, {k})",
                    bl.label(a),
                    bl.label(b)
                ));
            }
        }
    }
    out
}

/// Checks the blow-up PD equivalence on one instance.
pub fn blowup_propagation(
    y: &GradedAlgebra,
    z: &GradedAlgebra,
    pushforward: &GradedMap,
    result: &BlowupResult,
    socle_degree: usize,
) -> PropagationReport {
    let c = result.codim;
    let mut hyp = Vec::new();
    let y_pd = match pd_of(y, socle_degree) {
        Ok(v) => v.is_pd,
        Err(f) => {
            hyp.push(format!("A(Y): {f}"));
            false
        }
    };
    let z_pd = match socle_degree.checked_sub(c).map(|dz| pd_of(z, dz)) {
        Some(Ok(v)) => v.is_pd,
        Some(Err(f)) => {
            hyp.push(format!("A(Z): {f}"));
            false
        }
        None => {
            hyp.push("codimension exceeds socle degree".into());
            false
        }
    };
    if pushforward.apply(&z.unit()).is_zero() {
        hyp.push("[Z] = 0 in A(Y)".into());
    }
    let (out_pd, blocks) = match socle_check(&result.algebra, socle_degree) {
        Ok(sp) => (crate::algebra::pd_verdict(&sp).is_pd, blowup_block_violations(result, &sp)),
        Err(f) => {
            hyp.push(format!("A(Bl): {f}"));
            (false, Vec::new())
        }
    };
    PropagationReport {
        equivalence_holds: out_pd == (y_pd && z_pd),
        hypothesis_failures: hyp,
        inputs_pd: vec![("Y".into(), y_pd), ("Z".into(), z_pd)],
        output_pd: out_pd,
        block_violations: blocks,
    }
}

/// Checks the projective-bundle PD equivalence; the socle moves up by `rank - 1`.
pub fn bundle_propagation(z: &GradedAlgebra, bundle: &GradedAlgebra, rank: usize, socle_degree: usize) -> PropagationReport {
    let mut hyp = Vec::new();
    let z_pd = match pd_of(z, socle_degree) {
        Ok(v) => v.is_pd,
        Err(f) => {
            hyp.push(format!("A(Z): {f}"));
            false
        }
    };
    let out_pd = match pd_of(bundle, socle_degree + rank - 1) {
        Ok(v) => v.is_pd,
        Err(f) => {
            hyp.push(format!("A(P(E)): {f}"));
            false
        }
    };
    PropagationReport {
        equivalence_holds: out_pd == z_pd,
        hypothesis_failures: hyp,
        inputs_pd: vec![("Z".into(), z_pd)],
        output_pd: out_pd,
        block_violations: Vec::new(),
    }
}

/// Eq.-(*) dimension count: `dim A^i(Y) + Σ_{k=1}^{c-1} dim A^{i-k}(Z)`.
pub fn expected_blowup_dims(y: &[usize], z: &[usize], c: usize) -> Vec<usize> {
    let top = (y.len().max(z.len() + c.saturating_sub(1))).max(1) - 1;
    let mut out = vec![0; top + 1];
    for (i, d) in y.iter().enumerate() {
        out[i] += d;
    }
    for k in 1..c {
        for (j, d) in z.iter().enumerate() {
            out[j + k] += d;
        }
    }
    while out.len() > 1 && *out.last().unwrap() == 0 {
        out.pop();
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::pd_verdict;

    fn p2_point() -> (GradedAlgebra, GradedAlgebra, GradedMap, GradedMap, ChernPolynomial) {
        let y = GradedAlgebra::truncated_polynomial("h", 2);
        let z = GradedAlgebra::trivial();
        let pull = GradedMap::from_images(&y, &z, 0, &[Element::basis(0), Element::zero(), Element::zero()]).unwrap();
        let push = GradedMap::from_images(&z, &y, 2, &[Element::basis(2)]).unwrap();
        let chern = ChernPolynomial::new(vec![Element::zero(), Element::basis(2)]);
        (y, z, pull, push, chern)
    }

    #[test]
    fn blow_up_point_in_plane() {
        let (y, z, pull, push, chern) = p2_point();
        let r = blow_up(&y, &z, &pull, &push, &chern).unwrap();
        assert_eq!(r.algebra.dims(), vec![1, 2, 1]);
        let e = r.exceptional.clone().unwrap();
        let pt = r.ambient_embedding.apply(&Element::basis(2));
        // E^2 = -[pt] from P(-E) = E^2 + h^2 = 0
        assert_eq!(r.algebra.multiply(&e, &e).unwrap(), pt.scaled(&int(-1)));
        let h = r.ambient_embedding.apply(&Element::basis(1));
        assert!(r.algebra.multiply(&h, &e).unwrap().is_zero());
        r.algebra.check_associativity().unwrap();
        let sp = socle_check(&r.algebra, 2).unwrap();
        assert!(pd_verdict(&sp).is_pd);
        let rep = blowup_propagation(&y, &z, &push, &r, 2);
        assert!(rep.ok(), "{rep:?}");
    }

    #[test]
    fn divisor_center_is_identity() {
        // line in P^2: c = 1
        let y = GradedAlgebra::truncated_polynomial("h", 2);
        let z = GradedAlgebra::truncated_polynomial("h", 1);
        let pull = GradedMap::from_images(&y, &z, 0, &[Element::basis(0), Element::basis(1), Element::zero()]).unwrap();
        let push = GradedMap::from_images(&z, &y, 1, &[Element::basis(1), Element::basis(2)]).unwrap();
        let chern = ChernPolynomial::new(vec![Element::basis(1)]);
        let r = blow_up(&y, &z, &pull, &push, &chern).unwrap();
        assert_eq!(r.algebra, y);
        assert!(r.exceptional.is_none());
    }

    #[test]
    fn inconsistent_top_chern_is_rejected() {
        let (y, z, pull, push, _) = p2_point();
        let bad = ChernPolynomial::new(vec![Element::zero(), Element::basis(2).scaled(&int(2))]);
        assert!(matches!(blow_up(&y, &z, &pull, &push, &bad), Err(Error::Relation(_))));
    }

    #[test]
    fn projective_bundles() {
        let pt = GradedAlgebra::trivial();
        let z = projective_bundle(&pt, &[Element::basis(0).scaled(&int(0))]).unwrap();
        assert_eq!(z, pt);
        let p1 = projective_bundle(&pt, &[Element::zero(), Element::zero()]).unwrap();
        assert_eq!(p1.dims(), vec![1, 1]);
        let xi = Element::basis(1);
        assert!(p1.multiply(&xi, &xi).unwrap().is_zero());

        let base = GradedAlgebra::truncated_polynomial("h", 1);
        let surf = projective_bundle(&base, &[Element::zero(), Element::zero()]).unwrap();
        assert_eq!(surf.dims(), vec![1, 2, 1]);
        surf.check_associativity().unwrap();
        let rep = bundle_propagation(&base, &surf, 2, 1);
        assert!(rep.ok() && rep.output_pd, "{rep:?}");

        // Hirzebruch-type twist: c_1 = h, xi^2 = -h xi
        let f1 = projective_bundle(&base, &[Element::basis(1), Element::zero()]).unwrap();
        f1.check_associativity().unwrap();
        assert!(pd_of(&f1, 2).unwrap().is_pd);
    }

    #[test]
    fn dimension_formula() {
        assert_eq!(expected_blowup_dims(&[1, 1, 1], &[1], 2), vec![1, 2, 1]);
        assert_eq!(expected_blowup_dims(&[1, 3, 3, 1], &[1, 1], 2), vec![1, 4, 4, 1]);
        assert_eq!(expected_blowup_dims(&[1, 3, 3, 1], &[1], 3), vec![1, 4, 4, 1]);
    }
}
