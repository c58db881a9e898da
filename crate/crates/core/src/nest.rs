//! Nests, standard functions and the additive Li decomposition.

use crate::diagram::BurrowDiagram;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LiSummand {
    /// element indices, ascending
    pub nest: Vec<usize>,
    /// `mu[i]` is the exponent of `nest[i]`
    pub mu: Vec<usize>,
    /// standard bound `codim X - codim W_X` per nest element
    pub bounds: Vec<usize>,
    pub burrow: usize,
    pub shift: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LiDecomposition {
    pub summands: Vec<LiSummand>,
    pub poincare: Vec<usize>,
}

/// All nests with nonempty intersection, including the empty nest, sorted by size
/// and then lexicographically by element id.
pub fn enumerate_nests(d: &BurrowDiagram) -> Vec<Vec<usize>> {
    let n = d.elements.len();
    let mut out = vec![Vec::new()];
    let mut frontier = vec![Vec::new()];
    while !frontier.is_empty() {
        let mut next = Vec::new();
        for nest in &frontier {
            let start = nest.last().map_or(0, |&x| x + 1);
            for x in start..n {
                let mut cand = nest.clone();
                cand.push(x);
                if d.is_nest(&cand) && d.burrow_of_indices(&cand).is_some() {
                    next.push(cand);
                }
            }
        }
        out.extend(next.iter().cloned());
        frontier = next;
    }
    sort_nests(d, &mut out);
    out
}

pub(crate) fn sort_nests(d: &BurrowDiagram, nests: &mut [Vec<usize>]) {
    nests.sort_by(|a, b| {
        let ids = |n: &Vec<usize>| {
            let mut v: Vec<&str> = n.iter().map(|&x| d.elements[x].id.as_str()).collect();
            v.sort_unstable();
            v
        };
        a.len().cmp(&b.len()).then_with(|| ids(a).cmp(&ids(b)))
    });
}

/// `codim X - codim W_X` for each element of the nest, with `W_X` the intersection
/// of the nest elements strictly containing `X` (the ambient when there are none).
pub fn nest_bounds(d: &BurrowDiagram, nest: &[usize]) -> Vec<usize> {
    nest.iter()
        .map(|&x| {
            let above: Vec<usize> = nest.iter().copied().filter(|&z| d.element_strictly_contained(x, z)).collect();
            let w = d.burrow_of_indices(&above).expect("sub-intersection of a nest is nonempty");
            d.codim(d.element_burrow(x)).saturating_sub(d.codim(w))
        })
        .collect()
}

/// All standard functions on a nest: `1 <= mu(X) < bound(X)`.
pub fn enumerate_standard(d: &BurrowDiagram, nest: &[usize]) -> Vec<Vec<usize>> {
    let bounds = nest_bounds(d, nest);
    let mut out = vec![Vec::new()];
    for &b in &bounds {
        out = out
            .into_iter()
            .flat_map(|mu: Vec<usize>| {
                (1..b).map(move |v| {
                    let mut m = mu.clone();
                    m.push(v);
                    m
                })
            })
            .collect();
    }
    out
}

pub fn li_decomposition(d: &BurrowDiagram) -> LiDecomposition {
    let mut summands = Vec::new();
    let mut poincare = vec![0; d.socle_degree + 1];
    for nest in enumerate_nests(d) {
        let bounds = nest_bounds(d, &nest);
        let burrow = d.burrow_of_indices(&nest).expect("nests have nonempty burrows");
        let dims = d.algebra(burrow).dims();
        for mu in enumerate_standard(d, &nest) {
            let shift: usize = mu.iter().sum();
            for (k, n) in dims.iter().enumerate() {
                if poincare.len() <= k + shift {
                    poincare.resize(k + shift + 1, 0);
                }
                poincare[k + shift] += n;
            }
            summands.push(LiSummand { nest: nest.clone(), mu, bounds: bounds.clone(), burrow, shift });
        }
    }
    while poincare.len() > 1 && *poincare.last().unwrap() == 0 {
        poincare.pop();
    }
    LiDecomposition { summands, poincare }
}

/// `nest={..} mu={..} burrow=<id> shift=<k> dims=<vector>` lines and the total.
pub fn render_decomposition(d: &BurrowDiagram, li: &LiDecomposition) -> String {
    let mut out = String::new();
    for s in &li.summands {
        let names: Vec<&str> = s.nest.iter().map(|&x| d.elements[x].id.as_str()).collect();
        let mu: Vec<String> = names.iter().zip(&s.mu).map(|(n, m)| format!("{n}:{m}")).collect();
        let dims: Vec<String> = d.algebra(s.burrow).dims().iter().map(usize::to_string).collect();
        out.push_str(&format!(
            "nest={{{}}} mu={{{}}} burrow={} shift={} dims={}\n",
            names.join(","),
            mu.join(","),
            d.burrows[s.burrow].id,
            s.shift,
            dims.join(",")
        ));
    }
    let total: Vec<String> = li.poincare.iter().map(usize::to_string).collect();
    out.push_str(&format!("total {}\n", total.join(" ")));
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::{fm_power, keel_model, DiagonalFlag, Fiber};

    fn ids(d: &BurrowDiagram, nest: &[usize]) -> Vec<String> {
        nest.iter().map(|&x| d.elements[x].id.clone()).collect()
    }

    #[test]
    fn fm_nests() {
        let d2 = fm_power(Fiber::P1, 2, DiagonalFlag::AtLeastTwo).unwrap();
        assert_eq!(enumerate_nests(&d2).len(), 2);
        let d = fm_power(Fiber::P1, 3, DiagonalFlag::AtLeastTwo).unwrap();
        let nests: Vec<Vec<String>> = enumerate_nests(&d).iter().map(|n| ids(&d, n)).collect();
        assert_eq!(nests.len(), 1 + 4 + 3);
        assert!(nests.contains(&vec!["D12".to_string(), "D123".to_string()]));
        assert!(!nests.contains(&vec!["D12".to_string(), "D13".to_string()]));
    }

    #[test]
    fn fm_standard_functions() {
        let d = fm_power(Fiber::P1, 3, DiagonalFlag::AtLeastTwo).unwrap();
        let x = |id: &str| d.element_index(id).unwrap();
        assert_eq!(enumerate_standard(&d, &[x("D123")]), vec![vec![1]]);
        assert!(enumerate_standard(&d, &[x("D12")]).is_empty());
        assert!(enumerate_standard(&d, &[x("D12"), x("D123")]).is_empty());
        assert_eq!(enumerate_standard(&d, &[]), vec![Vec::<usize>::new()]);
    }

    #[test]
    fn poincare_polynomials() {
        let fm2 = fm_power(Fiber::P1, 2, DiagonalFlag::AtLeastTwo).unwrap();
        assert_eq!(li_decomposition(&fm2).poincare, vec![1, 2, 1]);
        let fm3 = fm_power(Fiber::P1, 3, DiagonalFlag::AtLeastTwo).unwrap();
        let li = li_decomposition(&fm3);
        assert_eq!(li.poincare, vec![1, 4, 4, 1]);
        assert_eq!(li.summands.len(), 2);
        assert_eq!(li_decomposition(&keel_model(1).unwrap()).poincare, vec![1, 1]);
        assert_eq!(li_decomposition(&keel_model(2).unwrap()).poincare, vec![1, 5, 1]);
        assert_eq!(li_decomposition(&keel_model(3).unwrap()).poincare, vec![1, 16, 16, 1]);
    }

    #[test]
    fn rendering() {
        let fm3 = fm_power(Fiber::P1, 3, DiagonalFlag::AtLeastTwo).unwrap();
        let text = render_decomposition(&fm3, &li_decomposition(&fm3));
        assert_eq!(
            text,
            "nest={} mu={} burrow=Y shift=0 dims=1,3,3,1\nnest={D123} mu={D123:1} burrow=D123 shift=1 dims=1,1\ntotal 1 4 4 1\n"
        );
    }

    #[test]
    fn enumeration_order_does_not_matter() {
        for d in [keel_model(2).unwrap(), fm_power(Fiber::P1, 4, DiagonalFlag::AtLeastTwo).unwrap()] {
            check_against_brute_force(&d);
        }
    }

    fn check_against_brute_force(d: &BurrowDiagram) {
        let d = d.clone();
        let mut forward: Vec<(usize, usize)> = li_decomposition(&d).summands.iter().map(|s| (s.burrow, s.shift)).collect();
        // brute force over all subsets in reverse order
        let n = d.elements.len();
        let mut nests = Vec::new();
        for mask in (0u64..(1 << n)).rev() {
            let set: Vec<usize> = (0..n).filter(|i| mask & (1 << i) != 0).collect();
            if d.is_nest(&set) && d.burrow_of_indices(&set).is_some() {
                nests.push(set);
            }
        }
        let mut reverse: Vec<(usize, usize)> = Vec::new();
        for nest in nests {
            let b = d.burrow_of_indices(&nest).unwrap();
            for mu in enumerate_standard(&d, &nest) {
                reverse.push((b, mu.iter().sum()));
            }
        }
        forward.sort_unstable();
        reverse.sort_unstable();
        assert_eq!(forward, reverse);
    }
}
