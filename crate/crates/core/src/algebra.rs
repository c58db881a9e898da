//! Finite-dimensional graded commutative algebras over the rationals.
//!
//! An algebra is stored on a degree-ordered basis; basis index 0 is the unit and
//! the only element of degree 0. Products of basis pairs live in a sparse table
//! keyed by `(i, j)` with `i <= j`, so commutativity holds by construction.

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::linalg::{self, format_rat, Rat, SparseMat};

/// Sparse coefficient vector over the global basis of some algebra.
#[derive(Clone, Default, PartialEq, Eq, Hash)]
pub struct Element(BTreeMap<usize, Rat>);

impl fmt::Debug for Element {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self.0.iter().map(|(i, c)| format!("{}*e{i}", format_rat(c))).collect();
        write!(f, "{}", parts.join(" + "))
    }
}

impl Element {
    pub fn zero() -> Self {
        Element(BTreeMap::new())
    }

    pub fn basis(i: usize) -> Self {
        Element(BTreeMap::from([(i, Rat::one())]))
    }

    pub fn from_terms(terms: impl IntoIterator<Item = (usize, Rat)>) -> Self {
        let mut e = Element::zero();
        for (i, c) in terms {
            e.add_term(i, c);
        }
        e
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    pub fn coeff(&self, i: usize) -> Rat {
        self.0.get(&i).cloned().unwrap_or_else(Rat::zero)
    }

    pub fn terms(&self) -> impl Iterator<Item = (usize, &Rat)> {
        self.0.iter().map(|(i, c)| (*i, c))
    }

    pub fn support(&self) -> impl Iterator<Item = usize> + '_ {
        self.0.keys().copied()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn add_term(&mut self, i: usize, c: Rat) {
        if c.is_zero() {
            return;
        }
        let slot = self.0.entry(i).or_insert_with(Rat::zero);
        *slot += c;
        if slot.is_zero() {
            self.0.remove(&i);
        }
    }

    pub fn add_scaled(&mut self, other: &Element, s: &Rat) {
        if s.is_zero() {
            return;
        }
        for (i, c) in &other.0 {
            self.add_term(*i, c * s);
        }
    }

    pub fn scaled(&self, s: &Rat) -> Element {
        if s.is_zero() {
            return Element::zero();
        }
        Element(self.0.iter().map(|(i, c)| (*i, c * s)).collect())
    }

    pub fn plus(&self, other: &Element) -> Element {
        let mut out = self.clone();
        out.add_scaled(other, &Rat::one());
        out
    }

    pub fn minus(&self, other: &Element) -> Element {
        let mut out = self.clone();
        out.add_scaled(other, &-Rat::one());
        out
    }

    pub fn to_dense(&self, len: usize) -> Vec<Rat> {
        let mut v = vec![Rat::zero(); len];
        for (i, c) in &self.0 {
            v[*i] = c.clone();
        }
        v
    }

    pub fn from_dense(v: &[Rat]) -> Element {
        Element::from_terms(v.iter().enumerate().map(|(i, c)| (i, c.clone())))
    }

    /// Restriction to the index window `range`, reindexed from zero.
    pub fn window(&self, range: std::ops::Range<usize>) -> Vec<Rat> {
        let mut v = vec![Rat::zero(); range.len()];
        for (i, c) in self.0.range(range.clone()) {
            v[i - range.start] = c.clone();
        }
        v
    }
}

#[derive(Clone, PartialEq, Eq)]
pub struct GradedAlgebra {
    top_degree: usize,
    labels: Vec<String>,
    offsets: Vec<usize>,
    degrees: Vec<usize>,
    table: HashMap<(usize, usize), Element>,
}

impl fmt::Debug for GradedAlgebra {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "GradedAlgebra(dims={:?})", self.dims())
    }
}

impl GradedAlgebra {
    /// Builds an algebra from per-degree basis labels and basis products.
    ///
    /// Products involving the unit (index 0) are implicit; if given they must agree.
    /// A pair given twice in either order must carry the same product.
    pub fn new(
        basis: Vec<Vec<String>>,
        products: impl IntoIterator<Item = (usize, usize, Element)>,
    ) -> Result<Self> {
        if basis.is_empty() {
            return Err(Error::Invalid("algebra needs a degree-0 piece".into()));
        }
        if basis[0].len() != 1 {
            return Err(Error::Invalid(format!(
                "degree 0 must be spanned by the unit alone, got dimension {}",
                basis[0].len()
            )));
        }
        let top_degree = basis.len() - 1;
        let mut offsets = vec![0];
        let mut labels = Vec::new();
        let mut degrees = Vec::new();
        for (k, piece) in basis.into_iter().enumerate() {
            for l in piece {
                labels.push(l);
                degrees.push(k);
            }
            offsets.push(labels.len());
        }
        let mut alg = GradedAlgebra { top_degree, labels, offsets, degrees, table: HashMap::new() };
        let n = alg.total_dim();
        for (i, j, prod) in products {
            if i >= n || j >= n {
                return Err(Error::Dimension(format!("product ({i},{j}) outside basis of size {n}")));
            }
            let target = alg.degrees[i] + alg.degrees[j];
            for k in prod.support() {
                if k >= n || alg.degrees[k] != target {
                    return Err(Error::Invalid(format!(
                        "product e{i}*e{j} has a term e{k} outside degree {target}"
                    )));
                }
            }
            if i == 0 || j == 0 {
                let other = if i == 0 { j } else { i };
                if prod != Element::basis(other) {
                    return Err(Error::Invalid(format!("unit law fails on e{other}")));
                }
                continue;
            }
            let key = (i.min(j), i.max(j));
            match alg.table.get(&key) {
                Some(existing) if *existing != prod => {
                    return Err(Error::Invalid(format!("non-commutative products for ({i},{j})")));
                }
                _ => {
                    if !prod.is_zero() {
                        alg.table.insert(key, prod);
                    }
                }
            }
        }
        Ok(alg)
    }

    /// The one-dimensional algebra `Q` concentrated in degree 0.
    pub fn trivial() -> Self {
        GradedAlgebra::new(vec![vec!["1".into()]], []).expect("trivial algebra")
    }

    /// `Q[h]/(h^{n+1})`, the ring of projective n-space.
    pub fn truncated_polynomial(var: &str, n: usize) -> Self {
        let basis: Vec<Vec<String>> = (0..=n)
            .map(|k| vec![match k {
                0 => "1".to_string(),
                1 => var.to_string(),
                _ => format!("{var}^{k}"),
            }])
            .collect();
        let mut products = Vec::new();
        for i in 1..=n {
            for j in i..=n {
                if i + j <= n {
                    products.push((i, j, Element::basis(i + j)));
                }
            }
        }
        GradedAlgebra::new(basis, products).expect("truncated polynomial ring")
    }

    pub fn top_degree(&self) -> usize {
        self.top_degree
    }

    pub fn total_dim(&self) -> usize {
        self.labels.len()
    }

    pub fn dims(&self) -> Vec<usize> {
        (0..=self.top_degree).map(|k| self.dim(k)).collect()
    }

    pub fn dim(&self, k: usize) -> usize {
        if k > self.top_degree {
            0
        } else {
            self.offsets[k + 1] - self.offsets[k]
        }
    }

    pub fn range(&self, k: usize) -> std::ops::Range<usize> {
        if k > self.top_degree {
            let n = self.total_dim();
            n..n
        } else {
            self.offsets[k]..self.offsets[k + 1]
        }
    }

    pub fn degree_of(&self, i: usize) -> usize {
        self.degrees[i]
    }

    pub fn label(&self, i: usize) -> &str {
        &self.labels[i]
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn labels_by_degree(&self) -> Vec<Vec<String>> {
        (0..=self.top_degree).map(|k| self.labels[self.range(k)].to_vec()).collect()
    }

    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.labels.iter().position(|l| l == label)
    }

    pub fn unit(&self) -> Element {
        Element::basis(0)
    }

    /// Nonzero products of non-unit basis pairs, `i <= j`, in index order.
    pub fn product_table(&self) -> Vec<(usize, usize, &Element)> {
        let mut v: Vec<_> = self.table.iter().map(|((i, j), e)| (*i, *j, e)).collect();
        v.sort_by_key(|(i, j, _)| (*i, *j));
        v
    }

    pub fn mul_basis(&self, i: usize, j: usize) -> Element {
        if i == 0 {
            return Element::basis(j);
        }
        if j == 0 {
            return Element::basis(i);
        }
        self.table.get(&(i.min(j), i.max(j))).cloned().unwrap_or_default()
    }

    pub fn contains(&self, a: &Element) -> bool {
        a.support().all(|i| i < self.total_dim())
    }

    pub fn multiply(&self, a: &Element, b: &Element) -> Result<Element> {
        if !self.contains(a) || !self.contains(b) {
            return Err(Error::Dimension("element does not belong to this algebra".into()));
        }
        Ok(self.mul_unchecked(a, b))
    }

    pub(crate) fn mul_unchecked(&self, a: &Element, b: &Element) -> Element {
        let mut out = Element::zero();
        for (i, x) in a.terms() {
            for (j, y) in b.terms() {
                if self.degrees[i] + self.degrees[j] > self.top_degree {
                    continue;
                }
                out.add_scaled(&self.mul_basis(i, j), &(x * y));
            }
        }
        out
    }

    pub fn power(&self, a: &Element, n: usize) -> Element {
        let mut out = self.unit();
        for _ in 0..n {
            out = self.mul_unchecked(&out, a);
        }
        out
    }

    /// Degree of a homogeneous element; `None` for zero or mixed elements.
    pub fn degree_of_element(&self, a: &Element) -> Option<usize> {
        let mut degs = a.support().map(|i| self.degrees[i]);
        let d = degs.next()?;
        degs.all(|e| e == d).then_some(d)
    }

    /// Degree-`k` component of an element.
    pub fn component(&self, a: &Element, k: usize) -> Element {
        let r = self.range(k);
        Element::from_terms(a.terms().filter(|(i, _)| r.contains(i)).map(|(i, c)| (i, c.clone())))
    }

    /// Exhaustive associativity check on all basis triples. Returns the first failure.
    pub fn check_associativity(&self) -> std::result::Result<(), String> {
        let n = self.total_dim();
        for i in 1..n {
            for j in i..n {
                let ij = self.mul_basis(i, j);
                for k in j..n {
                    if self.degrees[i] + self.degrees[j] + self.degrees[k] > self.top_degree {
                        continue;
                    }
                    let left = self.mul_unchecked(&ij, &Element::basis(k));
                    let jk = self.mul_basis(j, k);
                    let right = self.mul_unchecked(&Element::basis(i), &jk);
                    if left != right {
                        return Err(format!(
                            "associativity fails on ({}, {}, {})",
                            self.labels[i], self.labels[j], self.labels[k]
                        ));
                    }
                    let ik = self.mul_basis(i, k);
                    let middle = self.mul_unchecked(&ik, &Element::basis(j));
                    if middle != left {
                        return Err(format!(
                            "associativity fails on ({}, {}, {})",
                            self.labels[i], self.labels[k], self.labels[j]
                        ));
                    }
                }
            }
        }
        Ok(())
    }

    /// Tensor product `self ⊗ other` with labels joined by `*` (units dropped).
    pub fn tensor(&self, other: &GradedAlgebra) -> GradedAlgebra {
        self.tensor_with_index(other).0
    }

    /// Tensor product together with the position of each `e_i ⊗ f_j`.
    pub fn tensor_with_index(&self, other: &GradedAlgebra) -> (GradedAlgebra, HashMap<(usize, usize), usize>) {
        let top = self.top_degree + other.top_degree;
        let mut pairs: Vec<Vec<(usize, usize)>> = vec![Vec::new(); top + 1];
        for i in 0..self.total_dim() {
            for j in 0..other.total_dim() {
                pairs[self.degrees[i] + other.degrees[j]].push((i, j));
            }
        }
        let mut index = HashMap::new();
        let mut basis = Vec::new();
        let mut next = 0;
        for piece in &pairs {
            let mut labels = Vec::new();
            for &(i, j) in piece {
                index.insert((i, j), next);
                next += 1;
                labels.push(join_labels(&self.labels[i], &other.labels[j]));
            }
            basis.push(labels);
        }
        let flat: Vec<(usize, usize)> = pairs.concat();
        let mut products = Vec::new();
        for (p, &(a1, b1)) in flat.iter().enumerate() {
            for (q, &(a2, b2)) in flat.iter().enumerate().skip(p) {
                if p == 0 {
                    continue;
                }
                let x = self.mul_basis(a1, a2);
                let y = other.mul_basis(b1, b2);
                let mut prod = Element::zero();
                for (i, c) in x.terms() {
                    for (j, d) in y.terms() {
                        prod.add_term(index[&(i, j)], c * d);
                    }
                }
                products.push((p, q, prod));
            }
        }
        (GradedAlgebra::new(basis, products).expect("tensor product of valid algebras"), index)
    }
}

fn join_labels(a: &str, b: &str) -> String {
    match (a == "1", b == "1") {
        (true, true) => "1".into(),
        (true, false) => b.into(),
        (false, true) => a.into(),
        (false, false) => format!("{a}*{b}"),
    }
}

/// Linear map between graded algebras shifting degree by `shift`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GradedMap {
    source_dims: Vec<usize>,
    target_dims: Vec<usize>,
    shift: i32,
    /// target_total x source_total
    matrix: SparseMat,
}

impl GradedMap {
    pub fn new(
        source: &GradedAlgebra,
        target: &GradedAlgebra,
        shift: i32,
        matrix: SparseMat,
    ) -> Result<Self> {
        if matrix.rows() != target.total_dim() || matrix.cols() != source.total_dim() {
            return Err(Error::Dimension(format!(
                "map matrix is {}x{}, expected {}x{}",
                matrix.rows(),
                matrix.cols(),
                target.total_dim(),
                source.total_dim()
            )));
        }
        for (r, c, _) in matrix.entries() {
            if target.degree_of(*r) as i64 != source.degree_of(*c) as i64 + shift as i64 {
                return Err(Error::Invalid(format!(
                    "map sends e{c} (degree {}) to e{r} (degree {}) but shift is {shift}",
                    source.degree_of(*c),
                    target.degree_of(*r)
                )));
            }
        }
        Ok(GradedMap { source_dims: source.dims(), target_dims: target.dims(), shift, matrix })
    }

    /// Map given by the images of the source basis elements.
    pub fn from_images(
        source: &GradedAlgebra,
        target: &GradedAlgebra,
        shift: i32,
        images: &[Element],
    ) -> Result<Self> {
        if images.len() != source.total_dim() {
            return Err(Error::Dimension("one image per source basis element required".into()));
        }
        let trip = images
            .iter()
            .enumerate()
            .flat_map(|(c, img)| img.terms().map(move |(r, v)| (r, c, v.clone())).collect::<Vec<_>>());
        let m = SparseMat::from_triplets(target.total_dim(), source.total_dim(), trip)?;
        GradedMap::new(source, target, shift, m)
    }

    pub fn zero(source: &GradedAlgebra, target: &GradedAlgebra, shift: i32) -> Self {
        GradedMap {
            source_dims: source.dims(),
            target_dims: target.dims(),
            shift,
            matrix: SparseMat::zeros(target.total_dim(), source.total_dim()),
        }
    }

    pub fn shift(&self) -> i32 {
        self.shift
    }

    pub fn matrix(&self) -> &SparseMat {
        &self.matrix
    }

    pub fn source_dims(&self) -> &[usize] {
        &self.source_dims
    }

    pub fn target_dims(&self) -> &[usize] {
        &self.target_dims
    }

    pub fn apply(&self, a: &Element) -> Element {
        let mut out = Element::zero();
        for (r, c, v) in self.matrix.entries() {
            let x = a.coeff(*c);
            if !x.is_zero() {
                out.add_term(*r, v * x);
            }
        }
        out
    }

    pub fn image_of_basis(&self, i: usize) -> Element {
        Element::from_terms(self.matrix.entries().iter().filter(|(_, c, _)| *c == i).map(|(r, _, v)| (*r, v.clone())))
    }

    fn offsets(dims: &[usize]) -> Vec<usize> {
        let mut o = vec![0];
        for d in dims {
            o.push(o.last().unwrap() + d);
        }
        o
    }

    /// The block from source degree `k` to target degree `k + shift`.
    pub fn degree_matrix(&self, k: usize) -> SparseMat {
        let so = Self::offsets(&self.source_dims);
        let to = Self::offsets(&self.target_dims);
        let scols = self.source_dims.get(k).copied().unwrap_or(0);
        let tk = k as i64 + self.shift as i64;
        if tk < 0 || tk as usize >= self.target_dims.len() || scols == 0 {
            return SparseMat::zeros(
                if tk >= 0 { self.target_dims.get(tk as usize).copied().unwrap_or(0) } else { 0 },
                scols,
            );
        }
        let tk = tk as usize;
        let (s0, t0) = (so[k], to[tk]);
        let trip = self
            .matrix
            .entries()
            .iter()
            .filter(|(r, c, _)| *c >= s0 && *c < s0 + scols && *r >= t0 && *r < t0 + self.target_dims[tk])
            .map(|(r, c, v)| (r - t0, c - s0, v.clone()));
        SparseMat::from_triplets(self.target_dims[tk], scols, trip).expect("in-range block")
    }

    /// Target degrees (as source degree k) where the map fails to be onto.
    pub fn surjectivity_failures(&self) -> Vec<usize> {
        (0..self.target_dims.len())
            .filter_map(|t| {
                let k = t as i64 - self.shift as i64;
                let tdim = self.target_dims[t];
                if tdim == 0 {
                    return None;
                }
                if k < 0 || k as usize >= self.source_dims.len() {
                    return Some(t);
                }
                (linalg::rank(&self.degree_matrix(k as usize)) < tdim).then_some(t)
            })
            .collect()
    }

    pub fn injectivity_failures(&self) -> Vec<usize> {
        (0..self.source_dims.len())
            .filter(|&k| linalg::rank(&self.degree_matrix(k)) < self.source_dims[k])
            .collect()
    }

    /// Ring homomorphism check on all basis pairs, plus `f(1) = 1`.
    pub fn check_homomorphism(&self, source: &GradedAlgebra, target: &GradedAlgebra) -> std::result::Result<(), String> {
        if self.shift != 0 {
            return Err("homomorphisms must preserve degree".into());
        }
        if self.apply(&source.unit()) != target.unit() {
            return Err("unit is not preserved".into());
        }
        let images: Vec<Element> = (0..source.total_dim()).map(|i| self.image_of_basis(i)).collect();
        for i in 1..source.total_dim() {
            for j in i..source.total_dim() {
                if source.degree_of(i) + source.degree_of(j) > target.top_degree() {
                    continue;
                }
                let lhs = self.apply(&source.mul_basis(i, j));
                let rhs = target.mul_unchecked(&images[i], &images[j]);
                if lhs != rhs {
                    return Err(format!("f({}*{}) != f({})*f({})", source.label(i), source.label(j), source.label(i), source.label(j)));
                }
            }
        }
        Ok(())
    }

    /// Projection formula `push(pull(a) * b) = a * push(b)` on all basis pairs,
    /// where `self` is the pushforward from `small` to `big` and `pull` goes back.
    pub fn check_projection_formula(
        &self,
        pull: &GradedMap,
        small: &GradedAlgebra,
        big: &GradedAlgebra,
    ) -> std::result::Result<(), String> {
        for a in 0..big.total_dim() {
            let pa = pull.image_of_basis(a);
            for b in 0..small.total_dim() {
                let lhs = self.apply(&small.mul_unchecked(&pa, &Element::basis(b)));
                let rhs = big.mul_unchecked(&Element::basis(a), &self.image_of_basis(b));
                if lhs != rhs {
                    return Err(format!(
                        "projection formula fails for a = {}, b = {}",
                        big.label(a),
                        small.label(b)
                    ));
                }
            }
        }
        Ok(())
    }

    pub fn compose(&self, after: &GradedMap) -> Result<GradedMap> {
        // (after ∘ self)
        if after.source_dims != self.target_dims {
            return Err(Error::Dimension("composition of incompatible maps".into()));
        }
        let a = after.matrix.to_dense();
        let b = self.matrix.to_dense();
        let rows = after.matrix.rows();
        let cols = self.matrix.cols();
        let mut trip = Vec::new();
        for r in 0..rows {
            for c in 0..cols {
                let mut s = Rat::zero();
                for (m, arm) in a[r].iter().enumerate() {
                    if !arm.is_zero() && !b[m][c].is_zero() {
                        s += arm * &b[m][c];
                    }
                }
                if !s.is_zero() {
                    trip.push((r, c, s));
                }
            }
        }
        Ok(GradedMap {
            source_dims: self.source_dims.clone(),
            target_dims: after.target_dims.clone(),
            shift: self.shift + after.shift,
            matrix: SparseMat::from_triplets(rows, cols, trip)?,
        })
    }
}

/// Pairing data of an algebra with one-dimensional top piece.
#[derive(Clone, Debug)]
pub struct SoclePairing {
    top: usize,
    socle_index: usize,
    /// the socle generator is `socle_scale * e[socle_index]`
    socle_scale: Rat,
    grams: Vec<SparseMat>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SocleFailure {
    SocleDimension { degree: usize, dim: usize },
    NonzeroAbove { degree: usize, dim: usize },
}

impl fmt::Display for SocleFailure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SocleFailure::SocleDimension { degree, dim } => {
                write!(f, "socle dimension {dim} in degree {degree}")
            }
            SocleFailure::NonzeroAbove { degree, dim } => {
                write!(f, "nonzero classes above the socle: dimension {dim} in degree {degree}")
            }
        }
    }
}

pub fn socle_check(alg: &GradedAlgebra, expected: usize) -> std::result::Result<SoclePairing, SocleFailure> {
    for k in (expected + 1)..=alg.top_degree() {
        if alg.dim(k) != 0 {
            return Err(SocleFailure::NonzeroAbove { degree: k, dim: alg.dim(k) });
        }
    }
    if alg.dim(expected) != 1 {
        return Err(SocleFailure::SocleDimension { degree: expected, dim: alg.dim(expected) });
    }
    Ok(SoclePairing::build(alg, expected, alg.range(expected).start, Rat::one()))
}

impl SoclePairing {
    fn build(alg: &GradedAlgebra, top: usize, socle_index: usize, socle_scale: Rat) -> Self {
        let grams = (0..=top)
            .map(|k| {
                let rows = alg.range(k);
                let cols = alg.range(top - k);
                let mut trip = Vec::new();
                for (r, i) in rows.clone().enumerate() {
                    for (c, j) in cols.clone().enumerate() {
                        let v = alg.mul_basis(i, j).coeff(socle_index);
                        if !v.is_zero() {
                            trip.push((r, c, v / &socle_scale));
                        }
                    }
                }
                SparseMat::from_triplets(rows.len(), cols.len(), trip).expect("gram in range")
            })
            .collect();
        SoclePairing { top, socle_index, socle_scale, grams }
    }

    /// Same pairing with socle generator `scale * e_socle`.
    pub fn rescaled(&self, alg: &GradedAlgebra, scale: Rat) -> Self {
        SoclePairing::build(alg, self.top, self.socle_index, &self.socle_scale * scale)
    }

    pub fn top(&self) -> usize {
        self.top
    }

    pub fn socle_index(&self) -> usize {
        self.socle_index
    }

    pub fn gram(&self, k: usize) -> &SparseMat {
        &self.grams[k]
    }

    /// Socle coordinate of an element.
    pub fn socle_coordinate(&self, a: &Element) -> Rat {
        a.coeff(self.socle_index) / &self.socle_scale
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PdVerdict {
    pub is_pd: bool,
    /// per degree k: (dim A^k - rank, dim A^{d-k} - rank)
    pub discrepancies: Vec<(usize, usize)>,
}

impl PdVerdict {
    pub fn discrepancy_vector(&self) -> Vec<usize> {
        self.discrepancies.iter().map(|d| d.0).collect()
    }
}

pub fn pd_verdict(sp: &SoclePairing) -> PdVerdict {
    let discrepancies: Vec<(usize, usize)> = sp
        .grams
        .iter()
        .map(|g| {
            let r = linalg::rank(g);
            (g.rows() - r, g.cols() - r)
        })
        .collect();
    let is_pd = discrepancies.iter().all(|&(l, r)| l == 0 && r == 0);
    PdVerdict { is_pd, discrepancies }
}

/// Basis of the degree-`k` classes pairing to zero with everything in degree `d - k`.
pub fn socle_kernel_elements(sp: &SoclePairing, alg: &GradedAlgebra, k: usize) -> Result<Vec<Element>> {
    if k > sp.top {
        return Err(Error::Dimension(format!("degree {k} above socle degree {}", sp.top)));
    }
    let start = alg.range(k).start;
    Ok(linalg::left_nullspace_basis(&sp.grams[k])
        .into_iter()
        .map(|v| Element::from_terms(v.into_iter().enumerate().map(|(i, c)| (start + i, c))))
        .collect())
}

/// Convenience: socle check plus verdict, with the failure rendered as text.
pub fn pd_of(alg: &GradedAlgebra, expected: usize) -> std::result::Result<PdVerdict, SocleFailure> {
    socle_check(alg, expected).map(|sp| pd_verdict(&sp))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::int;

    /// Q ⊕ Q^2 ⊕ Q with x*x = s, everything else zero: degree-1 gram [[1,0],[0,0]].
    pub(crate) fn degenerate_121() -> GradedAlgebra {
        let basis = vec![vec!["1".into()], vec!["x".into(), "y".into()], vec!["s".into()]];
        GradedAlgebra::new(basis, [(1, 1, Element::basis(3))]).unwrap()
    }

    #[test]
    fn projective_plane_products() {
        let p2 = GradedAlgebra::truncated_polynomial("h", 2);
        assert_eq!(p2.dims(), vec![1, 1, 1]);
        let h = Element::basis(1);
        let h2 = Element::basis(2);
        assert_eq!(p2.multiply(&h, &h).unwrap(), h2);
        assert_eq!(p2.multiply(&p2.unit(), &h).unwrap(), h);
        assert!(p2.multiply(&h2, &h).unwrap().is_zero());
        assert!(p2.multiply(&Element::basis(7), &h).is_err());
        p2.check_associativity().unwrap();
    }

    #[test]
    fn socle_and_verdicts() {
        let p2 = GradedAlgebra::truncated_polynomial("h", 2);
        let sp = socle_check(&p2, 2).unwrap();
        assert_eq!(sp.gram(1), &SparseMat::identity(1));
        let v = pd_verdict(&sp);
        assert!(v.is_pd);
        assert_eq!(v.discrepancy_vector(), vec![0, 0, 0]);

        let q = GradedAlgebra::trivial();
        let sp = socle_check(&q, 0).unwrap();
        assert!(pd_verdict(&sp).is_pd);

        let two = GradedAlgebra::new(vec![vec!["1".into()], vec!["a".into(), "b".into()]], []).unwrap();
        assert_eq!(
            socle_check(&two, 1).unwrap_err(),
            SocleFailure::SocleDimension { degree: 1, dim: 2 }
        );
        assert_eq!(socle_check(&p2, 1).unwrap_err(), SocleFailure::NonzeroAbove { degree: 2, dim: 1 });
    }

    #[test]
    fn degenerate_algebra_has_discrepancy() {
        let a = degenerate_121();
        let sp = socle_check(&a, 2).unwrap();
        let v = pd_verdict(&sp);
        assert!(!v.is_pd);
        assert_eq!(v.discrepancies[1], (1, 1));
        let ker = socle_kernel_elements(&sp, &a, 1).unwrap();
        assert_eq!(ker.len(), 1);
        assert_eq!(ker[0], Element::basis(2));
        // pairs to zero with all of degree 1
        for j in a.range(1) {
            assert!(a.mul_basis(2, j).is_zero());
        }
        let p2 = GradedAlgebra::truncated_polynomial("h", 2);
        let sp2 = socle_check(&p2, 2).unwrap();
        for k in 0..=2 {
            assert!(socle_kernel_elements(&sp2, &p2, k).unwrap().is_empty());
        }
        assert!(socle_kernel_elements(&sp2, &p2, 3).is_err());
    }

    #[test]
    fn grams_are_transposes_and_rescaling_is_harmless() {
        let a = degenerate_121();
        let sp = socle_check(&a, 2).unwrap();
        for k in 0..=2 {
            assert_eq!(sp.gram(k), &sp.gram(2 - k).transpose());
        }
        let scaled = sp.rescaled(&a, int(-5));
        assert_eq!(pd_verdict(&scaled), pd_verdict(&sp));
        assert_eq!(scaled.gram(1).get(0, 0), crate::linalg::rat(-1, 5));
    }

    #[test]
    fn constructor_rejects_bad_tables() {
        let basis = || vec![vec!["1".to_string()], vec!["h".to_string()], vec!["s".to_string()]];
        assert!(GradedAlgebra::new(basis(), [(1, 1, Element::basis(1))]).is_err());
        assert!(GradedAlgebra::new(basis(), [(0, 1, Element::basis(2))]).is_err());
        let twice = [(1, 2, Element::zero()), (2, 1, Element::basis(2))];
        assert!(GradedAlgebra::new(basis(), twice).is_err());
    }

    #[test]
    fn tensor_of_projective_lines() {
        let p1 = GradedAlgebra::truncated_polynomial("h", 1);
        let t = p1.tensor(&p1);
        assert_eq!(t.dims(), vec![1, 2, 1]);
        t.check_associativity().unwrap();
        assert!(pd_of(&t, 2).unwrap().is_pd);
    }

    #[test]
    fn graded_map_checks() {
        let p2 = GradedAlgebra::truncated_polynomial("h", 2);
        let pt = GradedAlgebra::trivial();
        let pull = GradedMap::from_images(&p2, &pt, 0, &[Element::basis(0), Element::zero(), Element::zero()]).unwrap();
        pull.check_homomorphism(&p2, &pt).unwrap();
        assert!(pull.surjectivity_failures().is_empty());
        let push = GradedMap::from_images(&pt, &p2, 2, &[Element::basis(2)]).unwrap();
        push.check_projection_formula(&pull, &pt, &p2).unwrap();
        assert_eq!(push.injectivity_failures(), Vec::<usize>::new());
        let bad = GradedMap::from_images(&pt, &p2, 2, &[Element::basis(1)]);
        assert!(bad.is_err());
        let zero = GradedMap::zero(&p2, &pt, 0);
        assert_eq!(zero.surjectivity_failures(), vec![0]);
    }
}
