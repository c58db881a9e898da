//! Small hand-built diagrams and random single-step blow-up inputs.

use std::collections::{BTreeMap, BTreeSet};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::synthetic::{random_dims, synthetic_broken, synthetic_gorenstein};
use crate::algebra::{Element, GradedAlgebra, GradedMap};
use crate::diagram::{BuildingElement, BurrowDiagram, BurrowEdge, BurrowNode, ChernPolynomial, NestRule};
use crate::error::Result;
use crate::linalg::int;

fn explicit_singletons(ids: &[&str]) -> NestRule {
    NestRule::Explicit(ids.iter().map(|id| BTreeSet::from([id.to_string()])).collect())
}

/// A point in `P^2`: the single building element `pt` of codimension 2.
pub fn p2_point_fixture() -> BurrowDiagram {
    let y = GradedAlgebra::truncated_polynomial("h", 2);
    let z = GradedAlgebra::trivial();
    let edge = BurrowEdge {
        small: "pt".into(),
        big: "Y".into(),
        pullback: GradedMap::from_images(&y, &z, 0, &[Element::basis(0), Element::zero(), Element::zero()])
            .expect("pullback"),
        pushforward: GradedMap::from_images(&z, &y, 2, &[Element::basis(2)]).expect("pushforward"),
        chern: ChernPolynomial::new(vec![Element::zero(), Element::basis(2)]),
    };
    BurrowDiagram::new(
        2,
        vec![BuildingElement { id: "pt".into(), codim: 2, burrow: "pt".into(), indices: None }],
        vec![
            BurrowNode { id: "Y".into(), defining_set: vec![], codim: 0, algebra: y },
            BurrowNode { id: "pt".into(), defining_set: vec!["pt".into()], codim: 2, algebra: z },
        ],
        vec![edge],
        BTreeMap::new(),
        explicit_singletons(&["pt"]),
        BTreeMap::new(),
    )
    .expect("point fixture")
}

/// Diagram with `count` (1 or 2) disjoint codimension-2 centers whose rings fail
/// Poincaré duality.
///
/// `Y` has dimensions (1,2,2,2,1) with all positive-degree products landing in the
/// socle (`a_i c_j = δ_ij s`, `b_i b_j = δ_ij s`). The center `X_k` has class `b_k`
/// and ring `Y/J_k` with `J_k = (b_other) + Y^{>=3}`: dimensions (1,2,1) and a zero
/// pairing in degree 1.
pub fn broken_burrow_fixture(count: usize) -> Result<BurrowDiagram> {
    assert!((1..=2).contains(&count), "one or two broken burrows");
    let basis = vec![
        vec!["1".to_string()],
        vec!["a1".into(), "a2".into()],
        vec!["b1".into(), "b2".into()],
        vec!["c1".into(), "c2".into()],
        vec!["s".into()],
    ];
    let (a, b, c, s) = ([1, 2], [3, 4], [5, 6], 7);
    let mut products = Vec::new();
    for i in 0..2 {
        products.push((a[i], c[i], Element::basis(s)));
        products.push((b[i], b[i], Element::basis(s)));
    }
    let y = GradedAlgebra::new(basis, products)?;
    let mut burrows = vec![BurrowNode { id: "Y".into(), defining_set: vec![], codim: 0, algebra: y.clone() }];
    let mut elements = Vec::new();
    let mut edges = Vec::new();
    for k in 0..count {
        let x = format!("X{}", k + 1);
        let zid = format!("Z{}", k + 1);
        let z = GradedAlgebra::new(
            vec![vec!["1".into()], vec!["a1".into(), "a2".into()], vec![format!("b{}", k + 1)]],
            [],
        )?;
        let mut pull = vec![Element::zero(); y.total_dim()];
        pull[0] = Element::basis(0);
        pull[a[0]] = Element::basis(1);
        pull[a[1]] = Element::basis(2);
        pull[b[k]] = Element::basis(3);
        let push = vec![Element::basis(b[k]), Element::zero(), Element::zero(), Element::basis(s)];
        edges.push(BurrowEdge {
            small: zid.clone(),
            big: "Y".into(),
            pullback: GradedMap::from_images(&y, &z, 0, &pull)?,
            pushforward: GradedMap::from_images(&z, &y, 2, &push)?,
            chern: ChernPolynomial::new(vec![Element::zero(), Element::basis(b[k])]),
        });
        elements.push(BuildingElement { id: x.clone(), codim: 2, burrow: zid.clone(), indices: None });
        burrows.push(BurrowNode { id: zid, defining_set: vec![x], codim: 2, algebra: z });
    }
    let mut intersections = BTreeMap::new();
    if count == 2 {
        intersections.insert(("Z1".to_string(), "Z2".to_string()), None);
    }
    let ids: Vec<String> = elements.iter().map(|e| e.id.clone()).collect();
    let refs: Vec<&str> = ids.iter().map(String::as_str).collect();
    BurrowDiagram::new(4, elements, burrows, edges, intersections, explicit_singletons(&refs), BTreeMap::new())
}

/// One codimension-2 center `X` with synthetic burrow ring `Z` inside
/// `Y = Z ⊗ A(P^2)`, embedded as `Z × point`. With `broken = Some(k)` the ring of `Z`
/// has a degenerate pairing in degree `k`.
pub fn synthetic_diagram(dims: &[usize], broken: Option<usize>, seed: u64) -> Result<BurrowDiagram> {
    let z = match broken {
        Some(k) => synthetic_broken(dims, k, seed)?,
        None => synthetic_gorenstein(dims, seed)?,
    };
    let plane = GradedAlgebra::truncated_polynomial("w", 2);
    let (y, index) = z.tensor_with_index(&plane);
    let mut pull = vec![Element::zero(); y.total_dim()];
    for (&(i, j), &g) in &index {
        if j == 0 {
            pull[g] = Element::basis(i);
        }
    }
    let push: Vec<Element> = (0..z.total_dim()).map(|i| Element::basis(index[&(i, 2)])).collect();
    let edge = BurrowEdge {
        small: "Z".into(),
        big: "Y".into(),
        pullback: GradedMap::from_images(&y, &z, 0, &pull)?,
        pushforward: GradedMap::from_images(&z, &y, 2, &push)?,
        chern: ChernPolynomial::new(vec![Element::zero(), Element::basis(index[&(0, 2)])]),
    };
    BurrowDiagram::new(
        z.top_degree() + 2,
        vec![BuildingElement { id: "X".into(), codim: 2, burrow: "Z".into(), indices: None }],
        vec![
            BurrowNode { id: "Y".into(), defining_set: vec![], codim: 0, algebra: y },
            BurrowNode { id: "Z".into(), defining_set: vec!["X".into()], codim: 2, algebra: z },
        ],
        vec![edge],
        BTreeMap::new(),
        explicit_singletons(&["X"]),
        BTreeMap::new(),
    )
}

/// Inputs of a single blow-up: `Y = Z ⊗ W` with center `Z ⊗ s_W`.
#[derive(Clone, Debug)]
pub struct BlowupInstance {
    pub y: GradedAlgebra,
    pub z: GradedAlgebra,
    pub pullback: GradedMap,
    pub pushforward: GradedMap,
    pub chern: ChernPolynomial,
    pub socle_degree: usize,
    /// whether `Z` and `W` were generated with Poincaré duality
    pub z_gorenstein: bool,
    pub w_gorenstein: bool,
}

fn random_element(rng: &mut ChaCha8Rng, alg: &GradedAlgebra, k: usize) -> Element {
    if k > alg.top_degree() {
        return Element::zero();
    }
    Element::from_terms(alg.range(k).map(|i| (i, int(rng.gen_range(-2..=2)))))
}

/// Random `(Y, Z, chern)` triple; with `broken`, at least one factor fails PD.
pub fn random_blowup_instance(seed: u64, broken: bool) -> Result<BlowupInstance> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let c = rng.gen_range(1..=3usize);
    let mut dz = rng.gen_range(0..=3usize);
    let (mut break_z, mut break_w) = (false, false);
    if broken {
        match rng.gen_range(0..3) {
            0 => break_z = true,
            1 => break_w = true,
            _ => (break_z, break_w) = (true, true),
        }
        if c < 2 {
            break_w = false;
            break_z = true;
        }
        if break_z && dz < 2 {
            dz = 2;
        }
    }
    let z_dims = random_dims(&mut rng, dz, 3);
    let w_dims = random_dims(&mut rng, c, 2);
    let z = if break_z {
        let k = rng.gen_range(1..dz);
        synthetic_broken(&z_dims, k, rng.gen())?
    } else {
        synthetic_gorenstein(&z_dims, rng.gen())?
    };
    let w = if break_w {
        let k = rng.gen_range(1..c);
        synthetic_broken(&w_dims, k, rng.gen())?
    } else {
        synthetic_gorenstein(&w_dims, rng.gen())?
    };
    let (y, index) = z.tensor_with_index(&w);
    let socle_w = w.range(c).start;
    let mut pull = vec![Element::zero(); y.total_dim()];
    for (&(i, j), &g) in &index {
        if j == 0 {
            pull[g] = Element::basis(i);
        }
    }
    let push: Vec<Element> = (0..z.total_dim()).map(|i| Element::basis(index[&(i, socle_w)])).collect();
    let mut coeffs: Vec<Element> = (1..c).map(|k| random_element(&mut rng, &y, k)).collect();
    coeffs.push(Element::basis(index[&(0, socle_w)]));
    Ok(BlowupInstance {
        pullback: GradedMap::from_images(&y, &z, 0, &pull)?,
        pushforward: GradedMap::from_images(&z, &y, c as i32, &push)?,
        chern: ChernPolynomial::new(coeffs),
        socle_degree: dz + c,
        z_gorenstein: !break_z,
        w_gorenstein: !break_w,
        y,
        z,
    })
}

/// Random projective-bundle input: base ring, its socle degree and Chern classes.
pub fn random_bundle_instance(seed: u64, broken: bool) -> Result<(GradedAlgebra, usize, Vec<Element>)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let d = rng.gen_range(if broken { 2 } else { 0 }..=4usize);
    let dims = random_dims(&mut rng, d, 3);
    let z = if broken {
        let k = rng.gen_range(1..d);
        synthetic_broken(&dims, k, rng.gen())?
    } else {
        synthetic_gorenstein(&dims, rng.gen())?
    };
    let r = rng.gen_range(1..=3usize);
    let chern = (1..=r).map(|i| random_element(&mut rng, &z, i)).collect();
    Ok((z, d, chern))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::pd_of;

    #[test]
    fn fixtures_validate() {
        let p = p2_point_fixture();
        assert!(p.validate().passed(), "{}", p.validate().summary());
        for count in 1..=2 {
            let d = broken_burrow_fixture(count).unwrap();
            assert!(d.validate().passed(), "{}", d.validate().summary());
            let z = d.algebra(d.burrow_index("Z1").unwrap());
            assert_eq!(pd_of(z, 2).unwrap().discrepancy_vector(), vec![0, 2, 0]);
        }
        assert!(pd_of(broken_burrow_fixture(1).unwrap().ambient_algebra(), 4).unwrap().is_pd);
    }

    #[test]
    fn synthetic_diagrams_validate() {
        for broken in [None, Some(1)] {
            let d = synthetic_diagram(&[1, 2, 1], broken, 7).unwrap();
            assert!(d.validate().passed(), "{}", d.validate().summary());
            assert_eq!(d.socle_degree, 4);
            let z = d.algebra(d.burrow_index("Z").unwrap());
            assert_eq!(pd_of(z, 2).unwrap().is_pd, broken.is_none());
        }
    }

    #[test]
    fn random_instances_are_consistent() {
        for seed in 0..10 {
            for broken in [false, true] {
                let inst = random_blowup_instance(seed, broken).unwrap();
                inst.pullback.check_homomorphism(&inst.y, &inst.z).unwrap();
                inst.pushforward.check_projection_formula(&inst.pullback, &inst.z, &inst.y).unwrap();
                assert_eq!(inst.z_gorenstein && inst.w_gorenstein, !broken);
            }
        }
    }
}
