use proptest::prelude::*;

use wonder_core::algebra::pd_of;
use wonder_core::blowup::{blow_up, expected_blowup_dims, projective_bundle};
use wonder_core::duality::{discrepancy_table, pd_equivalence_report};
use wonder_core::engine::{build_ring, EngineOptions};
use wonder_core::format::{diagram_from_str, diagram_to_string, ring_from_str, ring_to_string};
use wonder_core::models::{random_blowup_instance, random_bundle_instance, synthetic_diagram};
use wonder_core::nest::li_decomposition;

/// Symmetric dimension vectors `(1, .., 1)` of top degree 1 to 3.
fn dims_strategy() -> impl Strategy<Value = Vec<usize>> {
    (1usize..=3).prop_flat_map(|d| proptest::collection::vec(1usize..=3, d - 1)).prop_map(|mid| {
        let mut v = vec![1];
        v.extend(mid);
        v.push(1);
        let n = v.len();
        for i in 0..n / 2 {
            v[n - 1 - i] = v[i];
        }
        v
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn synthetic_rings_follow_the_decomposition(dims in dims_strategy(), seed in 0u64..1000, brk in any::<bool>()) {
        let d_top = dims.len() - 1;
        let broken = (brk && d_top >= 2).then_some(1);
        let d = synthetic_diagram(&dims, broken, seed).unwrap();
        prop_assert!(d.validate().passed());
        let ring = build_ring(&d, EngineOptions::default()).unwrap();
        prop_assert_eq!(ring.dims(), li_decomposition(&d).poincare);
        prop_assert!(ring.algebra().check_associativity().is_ok());
        let data = ring.to_ring_data();
        let eq = pd_equivalence_report(&d, &data);
        prop_assert!(eq.holds);
        prop_assert_eq!(eq.ring_pd, broken.is_none());
        prop_assert!(discrepancy_table(&data).sums_match);
    }

    #[test]
    fn files_round_trip(dims in dims_strategy(), seed in 0u64..1000) {
        let d = synthetic_diagram(&dims, None, seed).unwrap();
        let text = diagram_to_string(&d);
        prop_assert_eq!(diagram_to_string(&diagram_from_str(&text).unwrap()), text.clone());
        let r = build_ring(&d, EngineOptions::default()).unwrap().to_ring_data();
        let rt = ring_to_string(&r);
        prop_assert_eq!(ring_to_string(&ring_from_str(&rt).unwrap()), rt);
    }

    #[test]
    fn blow_up_dimensions(seed in 0u64..5000, broken in any::<bool>()) {
        let inst = random_blowup_instance(seed, broken).unwrap();
        let r = blow_up(&inst.y, &inst.z, &inst.pullback, &inst.pushforward, &inst.chern).unwrap();
        prop_assert_eq!(r.algebra.dims(), expected_blowup_dims(&inst.y.dims(), &inst.z.dims(), inst.chern.degree()));
        prop_assert!(r.algebra.check_associativity().is_ok());
    }

    #[test]
    fn bundle_duality(seed in 0u64..5000, broken in any::<bool>()) {
        let (z, d, chern) = random_bundle_instance(seed, broken).unwrap();
        let b = projective_bundle(&z, &chern).unwrap();
        prop_assert_eq!(b.total_dim(), z.total_dim() * chern.len());
        let pd = pd_of(&b, d + chern.len() - 1).map(|v| v.is_pd).unwrap_or(false);
        prop_assert_eq!(pd, !broken);
    }
}
