//! Built-in diagram constructors and synthetic algebras.

mod fixtures;
mod monomial;
mod product;
mod synthetic;

pub use fixtures::{
    broken_burrow_fixture, p2_point_fixture, random_blowup_instance, random_bundle_instance, synthetic_diagram,
    BlowupInstance,
};
pub use monomial::MonomialRing;
pub use product::{ambient_ring, fm_power, keel_model, set_partitions, DiagonalFlag, Fiber, KEEL_POINTS};
pub use synthetic::{random_dims, synthetic_broken, synthetic_gorenstein};
