//! Worked families, topology of `N`, and the construction of `Ñ` from a
//! pair of quadric systems.

mod catalog;
mod double;
mod projective;
mod topology;

pub use catalog::{lookup, Instance, CATALOG_NAMES};
pub use double::{
    check_double, horizontal_frame, horizontal_lagrangian_residual, intersection_control_residual,
    ntilde_chart, ntilde_lagrangian_residual, stack_double, DoubleConfiguration, DoubleVerdict,
    DoubleWitness, Part,
};
pub use projective::{cp_chart_verify, CpGeometry, CpNtildeChart, CpVerifyOptions};
pub use topology::{classify_n, classify_one, classify_two, BundleFact, TopologyDescriptor, TopologyParams};
