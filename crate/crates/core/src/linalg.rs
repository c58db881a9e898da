//! Exact rational linear algebra on sparse triplet matrices.
//!
//! Everything here works over `BigRational`; there is no floating point path.
//! Elimination is plain Gauss-Jordan on sparse rows with normalized fractions.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

/// Exact rational number, always in lowest terms with positive denominator.
pub type Rat = BigRational;

pub fn rat(num: i64, den: i64) -> Rat {
    Rat::new(BigInt::from(num), BigInt::from(den))
}

pub fn int(n: i64) -> Rat {
    Rat::from_integer(BigInt::from(n))
}

/// Parses `"p/q"` or `"p"`.
pub fn parse_rat(s: &str) -> Result<Rat> {
    let s = s.trim();
    let bad = || Error::Parse(format!("invalid rational `{s}`"));
    match s.split_once('/') {
        Some((p, q)) => {
            let p: BigInt = p.trim().parse().map_err(|_| bad())?;
            let q: BigInt = q.trim().parse().map_err(|_| bad())?;
            if q.is_zero() {
                return Err(bad());
            }
            Ok(Rat::new(p, q))
        }
        None => Ok(Rat::from_integer(s.parse().map_err(|_| bad())?)),
    }
}

/// Formats as `"p/q"`, or `"p"` for integers.
pub fn format_rat(r: &Rat) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// Sparse matrix in triplet form. Entries are sorted by (row, col), unique and nonzero.
#[derive(Clone, PartialEq, Eq)]
pub struct SparseMat {
    rows: usize,
    cols: usize,
    entries: Vec<(usize, usize, Rat)>,
}

impl fmt::Debug for SparseMat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "SparseMat({}x{}) [", self.rows, self.cols)?;
        for (r, c, v) in &self.entries {
            write!(f, " ({r},{c})={}", format_rat(v))?;
        }
        write!(f, " ]")
    }
}

impl SparseMat {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        SparseMat { rows, cols, entries: Vec::new() }
    }

    pub fn identity(n: usize) -> Self {
        SparseMat { rows: n, cols: n, entries: (0..n).map(|i| (i, i, Rat::one())).collect() }
    }

    /// Builds from triplets; duplicate positions are summed and zeros dropped.
    pub fn from_triplets(
        rows: usize,
        cols: usize,
        triplets: impl IntoIterator<Item = (usize, usize, Rat)>,
    ) -> Result<Self> {
        let mut acc: BTreeMap<(usize, usize), Rat> = BTreeMap::new();
        for (r, c, v) in triplets {
            if r >= rows || c >= cols {
                return Err(Error::Dimension(format!(
                    "entry ({r},{c}) outside {rows}x{cols} matrix"
                )));
            }
            *acc.entry((r, c)).or_insert_with(Rat::zero) += v;
        }
        let entries = acc.into_iter().filter(|(_, v)| !v.is_zero()).map(|((r, c), v)| (r, c, v)).collect();
        Ok(SparseMat { rows, cols, entries })
    }

    pub fn from_dense(dense: &[Vec<Rat>]) -> Self {
        let rows = dense.len();
        let cols = dense.first().map_or(0, Vec::len);
        let mut entries = Vec::new();
        for (r, row) in dense.iter().enumerate() {
            assert_eq!(row.len(), cols, "ragged dense matrix");
            for (c, v) in row.iter().enumerate() {
                if !v.is_zero() {
                    entries.push((r, c, v.clone()));
                }
            }
        }
        SparseMat { rows, cols, entries }
    }

    pub fn from_i64(dense: &[&[i64]]) -> Self {
        let d: Vec<Vec<Rat>> = dense.iter().map(|r| r.iter().map(|&x| int(x)).collect()).collect();
        Self::from_dense(&d)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn entries(&self) -> &[(usize, usize, Rat)] {
        &self.entries
    }

    pub fn nnz(&self) -> usize {
        self.entries.len()
    }

    pub fn get(&self, r: usize, c: usize) -> Rat {
        self.entries
            .binary_search_by(|(er, ec, _)| (*er, *ec).cmp(&(r, c)))
            .map(|i| self.entries[i].2.clone())
            .unwrap_or_else(|_| Rat::zero())
    }

    pub fn transpose(&self) -> Self {
        let mut entries: Vec<_> = self.entries.iter().map(|(r, c, v)| (*c, *r, v.clone())).collect();
        entries.sort_by(|a, b| (a.0, a.1).cmp(&(b.0, b.1)));
        SparseMat { rows: self.cols, cols: self.rows, entries }
    }

    pub fn to_dense(&self) -> Vec<Vec<Rat>> {
        let mut d = vec![vec![Rat::zero(); self.cols]; self.rows];
        for (r, c, v) in &self.entries {
            d[*r][*c] = v.clone();
        }
        d
    }

    pub fn mul_vec(&self, v: &[Rat]) -> Result<Vec<Rat>> {
        if v.len() != self.cols {
            return Err(Error::Dimension(format!(
                "vector of length {} against {} columns",
                v.len(),
                self.cols
            )));
        }
        let mut out = vec![Rat::zero(); self.rows];
        for (r, c, x) in &self.entries {
            if !v[*c].is_zero() {
                out[*r] += x * &v[*c];
            }
        }
        Ok(out)
    }

    pub fn is_zero(&self) -> bool {
        self.entries.is_empty()
    }

    fn sparse_rows(&self) -> Vec<BTreeMap<usize, Rat>> {
        let mut rows = vec![BTreeMap::new(); self.rows];
        for (r, c, v) in &self.entries {
            rows[*r].insert(*c, v.clone());
        }
        rows
    }
}

/// Reduced row echelon form: nonzero rows with leading 1 at `pivots[i]`.
struct Rref {
    rows: Vec<BTreeMap<usize, Rat>>,
    pivots: Vec<usize>,
}

fn rref(mut rows: Vec<BTreeMap<usize, Rat>>, ncols: usize) -> Rref {
    let mut pivots = Vec::new();
    let mut done: Vec<BTreeMap<usize, Rat>> = Vec::new();
    for col in 0..ncols {
        // pick the sparsest row with a nonzero in this column
        let Some(idx) = rows
            .iter()
            .enumerate()
            .filter(|(_, r)| r.contains_key(&col))
            .min_by_key(|(_, r)| r.len())
            .map(|(i, _)| i)
        else {
            continue;
        };
        let mut prow = rows.swap_remove(idx);
        let inv = prow[&col].recip();
        for v in prow.values_mut() {
            *v *= &inv;
        }
        for r in rows.iter_mut().chain(done.iter_mut()) {
            if let Some(f) = r.get(&col).cloned() {
                for (c, v) in &prow {
                    let e = r.entry(*c).or_insert_with(Rat::zero);
                    *e -= &f * v;
                    if e.is_zero() {
                        r.remove(c);
                    }
                }
            }
        }
        rows.retain(|r| !r.is_empty());
        done.push(prow);
        pivots.push(col);
    }
    Rref { rows: done, pivots }
}

/// Rank over the rationals.
pub fn rank(m: &SparseMat) -> usize {
    if m.rows() == 0 || m.cols() == 0 {
        return 0;
    }
    rref(m.sparse_rows(), m.cols).pivots.len()
}

/// Exact basis of the right kernel `{v : m v = 0}`.
pub fn nullspace_basis(m: &SparseMat) -> Vec<Vec<Rat>> {
    let r = rref(m.sparse_rows(), m.cols);
    let pivot_set: std::collections::BTreeSet<usize> = r.pivots.iter().copied().collect();
    let mut basis = Vec::new();
    for free in (0..m.cols).filter(|c| !pivot_set.contains(c)) {
        let mut v = vec![Rat::zero(); m.cols];
        v[free] = Rat::one();
        for (row, &p) in r.rows.iter().zip(&r.pivots) {
            if let Some(x) = row.get(&free) {
                v[p] = -x.clone();
            }
        }
        basis.push(v);
    }
    basis
}

/// Basis of the left kernel `{v : v^T m = 0}`.
pub fn left_nullspace_basis(m: &SparseMat) -> Vec<Vec<Rat>> {
    nullspace_basis(&m.transpose())
}

/// Finds one exact solution of `m x = rhs`, or `None` when the system is inconsistent.
pub fn solve(m: &SparseMat, rhs: &[Rat]) -> Result<Option<Vec<Rat>>> {
    if rhs.len() != m.rows() {
        return Err(Error::Dimension(format!(
            "rhs of length {} against {} rows",
            rhs.len(),
            m.rows()
        )));
    }
    let mut rows = m.sparse_rows();
    for (row, b) in rows.iter_mut().zip(rhs) {
        if !b.is_zero() {
            row.insert(m.cols, b.clone());
        }
    }
    let r = rref(rows, m.cols + 1);
    if r.pivots.last() == Some(&m.cols) {
        return Ok(None);
    }
    let mut x = vec![Rat::zero(); m.cols];
    for (row, &p) in r.rows.iter().zip(&r.pivots) {
        if let Some(b) = row.get(&m.cols) {
            x[p] = b.clone();
        }
    }
    Ok(Some(x))
}

/// Solves `m X = B` column by column against one elimination; `None` where inconsistent.
pub fn solve_many(m: &SparseMat, rhs: &[Vec<Rat>]) -> Result<Vec<Option<Vec<Rat>>>> {
    let k = rhs.len();
    let mut rows = m.sparse_rows();
    for (j, b) in rhs.iter().enumerate() {
        if b.len() != m.rows() {
            return Err(Error::Dimension(format!(
                "rhs of length {} against {} rows",
                b.len(),
                m.rows()
            )));
        }
        for (i, x) in b.iter().enumerate() {
            if !x.is_zero() {
                rows[i].insert(m.cols + j, x.clone());
            }
        }
    }
    // eliminate on the coefficient columns only
    let r = rref_limited(rows, m.cols);
    let mut out = Vec::with_capacity(k);
    for j in 0..k {
        let col = m.cols + j;
        let inconsistent = r.leftover.iter().any(|row| row.contains_key(&col));
        if inconsistent {
            out.push(None);
            continue;
        }
        let mut x = vec![Rat::zero(); m.cols];
        for (row, &p) in r.rows.iter().zip(&r.pivots) {
            if let Some(b) = row.get(&col) {
                x[p] = b.clone();
            }
        }
        out.push(Some(x));
    }
    Ok(out)
}

struct RrefLimited {
    rows: Vec<BTreeMap<usize, Rat>>,
    pivots: Vec<usize>,
    leftover: Vec<BTreeMap<usize, Rat>>,
}

fn rref_limited(mut rows: Vec<BTreeMap<usize, Rat>>, ncols: usize) -> RrefLimited {
    let mut pivots = Vec::new();
    let mut done: Vec<BTreeMap<usize, Rat>> = Vec::new();
    for col in 0..ncols {
        let Some(idx) = rows.iter().position(|r| r.contains_key(&col)) else {
            continue;
        };
        let mut prow = rows.swap_remove(idx);
        let inv = prow[&col].recip();
        for v in prow.values_mut() {
            *v *= &inv;
        }
        for r in rows.iter_mut().chain(done.iter_mut()) {
            if let Some(f) = r.get(&col).cloned() {
                for (c, v) in &prow {
                    let e = r.entry(*c).or_insert_with(Rat::zero);
                    *e -= &f * v;
                    if e.is_zero() {
                        r.remove(c);
                    }
                }
            }
        }
        done.push(prow);
        pivots.push(col);
    }
    rows.retain(|r| !r.is_empty());
    RrefLimited { rows: done, pivots, leftover: rows }
}

pub fn is_zero_vec(v: &[Rat]) -> bool {
    v.iter().all(Zero::is_zero)
}

/// Largest absolute numerator or denominator, as a rough size measure for reports.
pub fn height(v: &[Rat]) -> BigInt {
    v.iter()
        .flat_map(|x| [x.numer().abs(), x.denom().clone()])
        .max()
        .unwrap_or_else(BigInt::zero)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn rank_examples() {
        assert_eq!(rank(&SparseMat::zeros(0, 0)), 0);
        assert_eq!(rank(&SparseMat::identity(2)), 2);
        assert_eq!(rank(&SparseMat::from_i64(&[&[1, 2], &[2, 4]])), 1);
    }

    #[test]
    fn nullspace_examples() {
        assert!(nullspace_basis(&SparseMat::identity(3)).is_empty());
        assert_eq!(nullspace_basis(&SparseMat::zeros(2, 3)).len(), 3);
        let ns = nullspace_basis(&SparseMat::from_i64(&[&[1, 1]]));
        assert_eq!(ns.len(), 1);
        assert_eq!(ns[0][0], -ns[0][1].clone());
        assert!(!ns[0][0].is_zero());
    }

    #[test]
    fn solve_examples() {
        let x = solve(&SparseMat::identity(2), &[int(1), int(2)]).unwrap().unwrap();
        assert_eq!(x, vec![int(1), int(2)]);
        let m = SparseMat::from_i64(&[&[1, 1]]);
        let x = solve(&m, &[int(3)]).unwrap().unwrap();
        assert_eq!(&x[0] + &x[1], int(3));
        assert_eq!(solve(&SparseMat::from_i64(&[&[0]]), &[int(1)]).unwrap(), None);
        assert!(matches!(solve(&SparseMat::identity(2), &[int(1)]), Err(Error::Dimension(_))));
    }

    #[test]
    fn solve_many_flags_inconsistent_columns() {
        let m = SparseMat::from_i64(&[&[1, 0], &[0, 0]]);
        let out = solve_many(&m, &[vec![int(2), int(0)], vec![int(0), int(1)]]).unwrap();
        assert_eq!(out[0].as_ref().unwrap()[0], int(2));
        assert!(out[1].is_none());
    }

    #[test]
    fn rational_text_round_trip() {
        for s in ["0", "-3", "7/2", "-1/3"] {
            assert_eq!(format_rat(&parse_rat(s).unwrap()), s);
        }
        assert_eq!(parse_rat("4/6").unwrap(), rat(2, 3));
        assert!(parse_rat("1/0").is_err());
        assert!(parse_rat("x").is_err());
    }

    fn small_matrix() -> impl Strategy<Value = SparseMat> {
        (0usize..6, 0usize..6).prop_flat_map(|(r, c)| {
            proptest::collection::vec(-3i64..=3, r * c).prop_map(move |v| {
                let d: Vec<Vec<Rat>> = (0..r).map(|i| (0..c).map(|j| int(v[i * c + j])).collect()).collect();
                if r == 0 { SparseMat::zeros(0, c) } else { SparseMat::from_dense(&d) }
            })
        })
    }

    proptest! {
        #[test]
        fn rank_nullity(m in small_matrix()) {
            let ns = nullspace_basis(&m);
            prop_assert_eq!(rank(&m) + ns.len(), m.cols());
            for v in &ns {
                prop_assert!(is_zero_vec(&m.mul_vec(v).unwrap()));
            }
            prop_assert_eq!(rank(&m), rank(&m.transpose()));
        }

        #[test]
        fn solve_finds_solutions_of_consistent_systems(m in small_matrix(), seed in proptest::collection::vec(-2i64..=2, 6)) {
            let x0: Vec<Rat> = (0..m.cols()).map(|i| int(seed[i % seed.len()])).collect();
            let b = m.mul_vec(&x0).unwrap();
            let x = solve(&m, &b).unwrap().expect("consistent by construction");
            prop_assert_eq!(m.mul_vec(&x).unwrap(), b);
        }
    }
}
