use std::collections::HashMap;

use num_traits::Zero;

use crate::algebra::{Element, GradedAlgebra};
use crate::linalg::Rat;

/// `Q[x_1..x_m]/(x_i^{b_i + 1})` with every variable in degree 1.
#[derive(Clone, Debug)]
pub struct MonomialRing {
    pub vars: Vec<String>,
    pub bounds: Vec<u32>,
    pub algebra: GradedAlgebra,
    exps: Vec<Vec<u32>>,
    index: HashMap<Vec<u32>, usize>,
}

fn monomial_label(vars: &[String], e: &[u32]) -> String {
    let parts: Vec<String> = vars
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
}

impl MonomialRing {
    pub fn new(vars: Vec<(String, u32)>) -> Self {
        let (names, bounds): (Vec<String>, Vec<u32>) = vars.into_iter().unzip();
        let mut exps: Vec<Vec<u32>> = vec![Vec::new()];
        for &b in &bounds {
            exps = exps
                .into_iter()
                .flat_map(|e| {
                    (0..=b).map(move |k| {
                        let mut e = e.clone();
                        e.push(k);
                        e
                    })
                })
                .collect();
        }
        // degree first, then descending lex so that x_1 precedes x_2
        exps.sort_by(|a, b| {
            let (da, db): (u32, u32) = (a.iter().sum(), b.iter().sum());
            da.cmp(&db).then_with(|| b.cmp(a))
        });
        let top = exps.last().map(|e| e.iter().sum::<u32>() as usize).unwrap_or(0);
        let mut basis = vec![Vec::new(); top + 1];
        for e in &exps {
            basis[e.iter().sum::<u32>() as usize].push(monomial_label(&names, e));
        }
        let index: HashMap<Vec<u32>, usize> = exps.iter().enumerate().map(|(i, e)| (e.clone(), i)).collect();
        let mut products = Vec::new();
        for i in 1..exps.len() {
            for j in i..exps.len() {
                let s: Vec<u32> = exps[i].iter().zip(&exps[j]).map(|(a, b)| a + b).collect();
                if let Some(&k) = index.get(&s) {
                    products.push((i, j, Element::basis(k)));
                }
            }
        }
        let algebra = GradedAlgebra::new(basis, products).expect("monomial ring");
        MonomialRing { vars: names, bounds, algebra, exps, index }
    }

    pub fn exponents(&self, i: usize) -> &[u32] {
        &self.exps[i]
    }

    /// Basis element for an exponent vector; zero when a bound is exceeded.
    pub fn monomial(&self, e: &[u32]) -> Element {
        match self.index.get(e) {
            Some(&i) => Element::basis(i),
            None => Element::zero(),
        }
    }

    pub fn var(&self, v: usize) -> Element {
        let mut e = vec![0; self.vars.len()];
        e[v] = 1;
        self.monomial(&e)
    }

    pub fn var_power(&self, v: usize, k: u32) -> Element {
        let mut e = vec![0; self.vars.len()];
        e[v] = k;
        self.monomial(&e)
    }

    pub fn var_index(&self, name: &str) -> Option<usize> {
        self.vars.iter().position(|v| v == name)
    }

    /// Image of every basis monomial under the substitution `x_v -> images[v]`.
    pub fn substitute(&self, target: &GradedAlgebra, images: &[Element]) -> Vec<Element> {
        (0..self.exps.len())
            .map(|i| {
                let mut acc = target.unit();
                for (v, &k) in self.exps[i].iter().enumerate() {
                    for _ in 0..k {
                        acc = target.mul_unchecked(&acc, &images[v]);
                    }
                }
                acc
            })
            .collect()
    }

    /// `Σ_v coef·x_v`, a convenience for linear classes.
    pub fn linear(&self, coefs: &[(usize, Rat)]) -> Element {
        let mut out = Element::zero();
        for (v, c) in coefs {
            if !c.is_zero() {
                out.add_scaled(&self.var(*v), c);
            }
        }
        out
    }
}
