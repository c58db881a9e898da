//! Random graded algebras for property tests.
//!
//! Gorenstein algebras come from a Macaulay inverse system `Q[x]/Ann(F)` when a
//! random form `F` hits the requested Hilbert function, and otherwise from a
//! trivial extension: positive-degree products land only in the socle, through
//! random nondegenerate forms `A^i x A^{d-i} -> Q`. Broken algebras are trivial
//! extensions with one rank-deficient form.

use std::collections::BTreeMap;

use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::algebra::{Element, GradedAlgebra};
use crate::error::{Error, Result};
use crate::linalg::{self, int, Rat, SparseMat};

fn check_shape(dims: &[usize]) -> Result<usize> {
    if dims.is_empty() || dims[0] != 1 || *dims.last().unwrap() != 1 {
        return Err(Error::Invalid("dimension vector must start and end with 1".into()));
    }
    let d = dims.len() - 1;
    if (0..=d).any(|k| dims[k] != dims[d - k]) {
        return Err(Error::Invalid(format!("dimension vector {dims:?} is not symmetric")));
    }
    Ok(d)
}

fn random_matrix(rng: &mut ChaCha8Rng, rows: usize, cols: usize) -> Vec<Vec<Rat>> {
    (0..rows).map(|_| (0..cols).map(|_| int(rng.gen_range(-3..=3))).collect()).collect()
}

fn random_invertible(rng: &mut ChaCha8Rng, n: usize) -> Vec<Vec<Rat>> {
    loop {
        let m = random_matrix(rng, n, n);
        if linalg::rank(&SparseMat::from_dense(&m)) == n {
            return m;
        }
    }
}

fn matmul(a: &[Vec<Rat>], b: &[Vec<Rat>]) -> Vec<Vec<Rat>> {
    let inner = b.len();
    let cols = b.first().map_or(0, Vec::len);
    a.iter()
        .map(|row| {
            (0..cols)
                .map(|j| (0..inner).fold(Rat::zero(), |acc, k| acc + &row[k] * &b[k][j]))
                .collect()
        })
        .collect()
}

fn transpose(a: &[Vec<Rat>]) -> Vec<Vec<Rat>> {
    let cols = a.first().map_or(0, Vec::len);
    (0..cols).map(|j| a.iter().map(|r| r[j].clone()).collect()).collect()
}

/// `P · diag(1,..,1,0,..,0) · Q` with `rank` ones; symmetric when `Q = P^T`.
fn form_of_rank(rng: &mut ChaCha8Rng, n: usize, rank: usize, symmetric: bool) -> Vec<Vec<Rat>> {
    let p = random_invertible(rng, n);
    let q = if symmetric { transpose(&p) } else { random_invertible(rng, n) };
    let diag: Vec<Vec<Rat>> =
        (0..n).map(|i| (0..n).map(|j| if i == j && i < rank { Rat::one() } else { Rat::zero() }).collect()).collect();
    matmul(&matmul(&p, &diag), &q)
}

/// Trivial extension with the given forms; `forms[i]` pairs degree i with d - i.
fn trivial_extension(dims: &[usize], forms: &BTreeMap<usize, Vec<Vec<Rat>>>) -> Result<GradedAlgebra> {
    let d = dims.len() - 1;
    let basis: Vec<Vec<String>> = dims
        .iter()
        .enumerate()
        .map(|(k, &n)| match k {
            0 => vec!["1".to_string()],
            k if k == d => vec!["s".to_string()],
            k => (1..=n).map(|j| format!("a{k}_{j}")).collect(),
        })
        .collect();
    let offsets: Vec<usize> = dims.iter().scan(0, |acc, &n| {
        let o = *acc;
        *acc += n;
        Some(o)
    }).collect();
    let socle = offsets[d];
    let mut products = Vec::new();
    for i in 1..d {
        let j = d - i;
        if i > j {
            continue;
        }
        let f = &forms[&i];
        for a in 0..dims[i] {
            for b in 0..dims[j] {
                if !f[a][b].is_zero() {
                    products.push((offsets[i] + a, offsets[j] + b, Element::from_terms([(socle, f[a][b].clone())])));
                }
            }
        }
    }
    GradedAlgebra::new(basis, products)
}

fn trivial_extension_forms(
    rng: &mut ChaCha8Rng,
    dims: &[usize],
    broken: Option<usize>,
) -> BTreeMap<usize, Vec<Vec<Rat>>> {
    let d = dims.len() - 1;
    let mut forms = BTreeMap::new();
    for i in 1..d {
        let j = d - i;
        if i > j {
            continue;
        }
        let n = dims[i];
        let rank = if broken == Some(i) || broken == Some(j) { n - 1 } else { n };
        forms.insert(i, form_of_rank(rng, n, rank, i == j));
    }
    forms
}

type Poly = BTreeMap<Vec<u32>, Rat>;

fn monomials(m: usize, deg: u32) -> Vec<Vec<u32>> {
    if m == 0 {
        return if deg == 0 { vec![Vec::new()] } else { Vec::new() };
    }
    let mut out = Vec::new();
    for first in (0..=deg).rev() {
        for mut rest in monomials(m - 1, deg - first) {
            rest.insert(0, first);
            out.push(rest);
        }
    }
    out
}

fn differentiate(f: &Poly, alpha: &[u32]) -> Poly {
    let mut out = Poly::new();
    for (beta, c) in f {
        if beta.iter().zip(alpha).any(|(b, a)| b < a) {
            continue;
        }
        let mut coef = c.clone();
        let mut gamma = beta.clone();
        for (k, (&b, &a)) in beta.iter().zip(alpha).enumerate() {
            for t in 0..a {
                coef *= int(i64::from(b - t));
            }
            gamma[k] = b - a;
        }
        *out.entry(gamma).or_insert_with(Rat::zero) += coef;
    }
    out.retain(|_, c| !c.is_zero());
    out
}

fn poly_vector(p: &Poly, basis: &[Vec<u32>]) -> Vec<Rat> {
    basis.iter().map(|m| p.get(m).cloned().unwrap_or_else(Rat::zero)).collect()
}

/// `Q[x_1..x_m]/Ann(F)` if its Hilbert function equals `dims`.
fn inverse_system(rng: &mut ChaCha8Rng, dims: &[usize]) -> Option<GradedAlgebra> {
    let d = dims.len() - 1;
    let m = dims[1];
    let mut f = Poly::new();
    for mono in monomials(m, d as u32) {
        let c = rng.gen_range(-3..=3);
        if c != 0 {
            f.insert(mono, int(c));
        }
    }
    // pick, per degree, monomials alpha whose derivatives are independent
    let mut chosen: Vec<Vec<Vec<u32>>> = Vec::new();
    let mut derivs: Vec<Vec<Vec<Rat>>> = Vec::new();
    for k in 0..=d {
        let target_basis = monomials(m, (d - k) as u32);
        let mut picked = Vec::new();
        let mut rows: Vec<Vec<Rat>> = Vec::new();
        for alpha in monomials(m, k as u32) {
            let v = poly_vector(&differentiate(&f, &alpha), &target_basis);
            let mut trial = rows.clone();
            trial.push(v.clone());
            if linalg::rank(&SparseMat::from_dense(&trial)) > rows.len() {
                rows = trial;
                picked.push(alpha);
            }
        }
        if picked.len() != dims[k] {
            return None;
        }
        chosen.push(picked);
        derivs.push(rows);
    }
    let var_names: Vec<String> = (1..=m).map(|i| format!("x{i}")).collect();
    let label = |e: &[u32]| -> String {
        let parts: Vec<String> = var_names
            .iter()
            .zip(e)
            .filter(|(_, &k)| k > 0)
            .map(|(v, &k)| if k == 1 { v.clone() } else { format!("{v}^{k}") })
            .collect();
        if parts.is_empty() {
            "1".into()
        } else {
            parts.join("*")
        }
    };
    let basis: Vec<Vec<String>> = chosen.iter().map(|c| c.iter().map(|e| label(e)).collect()).collect();
    let offsets: Vec<usize> = chosen.iter().scan(0, |acc, c| {
        let o = *acc;
        *acc += c.len();
        Some(o)
    }).collect();
    let flat: Vec<(usize, usize)> =
        chosen.iter().enumerate().flat_map(|(k, c)| (0..c.len()).map(move |i| (k, i))).collect();
    let mut products = Vec::new();
    for p in 1..flat.len() {
        for q in p..flat.len() {
            let ((k1, i1), (k2, i2)) = (flat[p], flat[q]);
            let k = k1 + k2;
            if k > d {
                continue;
            }
            let sum: Vec<u32> = chosen[k1][i1].iter().zip(&chosen[k2][i2]).map(|(a, b)| a + b).collect();
            let target_basis = monomials(m, (d - k) as u32);
            let v = poly_vector(&differentiate(&f, &sum), &target_basis);
            // express v in the rows of derivs[k]
            let mat = SparseMat::from_dense(&transpose(&derivs[k]));
            let coeffs = linalg::solve(&mat, &v).ok()??;
            let prod = Element::from_terms(coeffs.into_iter().enumerate().map(|(j, c)| (offsets[k] + j, c)));
            products.push((p, q, prod));
        }
    }
    GradedAlgebra::new(basis, products).ok()
}

/// A random Poincaré-duality algebra with the given (symmetric) dimension vector.
pub fn synthetic_gorenstein(dims: &[usize], seed: u64) -> Result<GradedAlgebra> {
    let d = check_shape(dims)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    if d >= 2 && dims[1] <= 4 {
        for _ in 0..8 {
            if let Some(a) = inverse_system(&mut rng, dims) {
                return Ok(a);
            }
        }
    }
    let forms = trivial_extension_forms(&mut rng, dims, None);
    trivial_extension(dims, &forms)
}

/// A random algebra with one-dimensional socle whose pairing loses rank 1 in degree `k`
/// (and in `d - k`).
pub fn synthetic_broken(dims: &[usize], k: usize, seed: u64) -> Result<GradedAlgebra> {
    let d = check_shape(dims)?;
    if k == 0 || k >= d || dims[k] == 0 {
        return Err(Error::Invalid(format!("cannot break degree {k} of {dims:?}")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let forms = trivial_extension_forms(&mut rng, dims, Some(k));
    trivial_extension(dims, &forms)
}

/// Random symmetric dimension vector `(1, .., 1)` of top degree `d`.
pub fn random_dims(rng: &mut ChaCha8Rng, d: usize, max_middle: usize) -> Vec<usize> {
    let mut dims = vec![1; d + 1];
    for k in 1..d {
        if k <= d - k {
            let v = rng.gen_range(1..=max_middle);
            dims[k] = v;
            dims[d - k] = v;
        }
    }
    dims
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::pd_of;
    use proptest::prelude::*;

    #[test]
    fn line_shape_is_a_truncated_polynomial() {
        let a = synthetic_gorenstein(&[1, 1, 1], 3).unwrap();
        assert_eq!(a.dims(), vec![1, 1, 1]);
        let h = Element::basis(1);
        assert!(!a.multiply(&h, &h).unwrap().is_zero());
        assert!(pd_of(&a, 2).unwrap().is_pd);
    }

    #[test]
    fn broken_121() {
        let a = synthetic_broken(&[1, 2, 1], 1, 7).unwrap();
        let v = pd_of(&a, 2).unwrap();
        assert!(!v.is_pd);
        assert_eq!(v.discrepancy_vector(), vec![0, 1, 0]);
    }

    #[test]
    fn shape_errors() {
        assert!(synthetic_gorenstein(&[1, 2, 3, 1], 0).is_err());
        assert!(synthetic_gorenstein(&[2, 1], 0).is_err());
        assert!(synthetic_broken(&[1, 1], 1, 0).is_err());
    }

    #[test]
    fn inverse_system_is_used_when_possible() {
        let a = synthetic_gorenstein(&[1, 3, 3, 1], 11).unwrap();
        assert!(a.labels()[1].starts_with('x'));
        a.check_associativity().unwrap();
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]
        #[test]
        fn generated_algebras_have_the_requested_shape(seed in 0u64..10_000, d in 1usize..5) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let dims = random_dims(&mut rng, d, 3);
            let g = synthetic_gorenstein(&dims, seed).unwrap();
            prop_assert_eq!(g.dims(), dims.clone());
            prop_assert!(g.check_associativity().is_ok());
            prop_assert!(pd_of(&g, d).unwrap().is_pd);
            if d >= 2 {
                let k = 1 + (seed as usize) % (d - 1);
                let b = synthetic_broken(&dims, k, seed).unwrap();
                prop_assert!(b.check_associativity().is_ok());
                let v = pd_of(&b, d).unwrap();
                prop_assert!(!v.is_pd);
                prop_assert_eq!(v.discrepancies[k].0, 1);
            }
        }
    }
}
