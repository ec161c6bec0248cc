pub mod certifier;
pub mod error;
pub mod json;
mod hull;
pub mod linalg;
mod lp;
pub mod polytope;
pub mod subdivision;
pub mod tropical;
pub mod volume;

pub use error::{Error, Result};
pub use polytope::{Caps, Face, Facet, LatticePolytope};
pub use subdivision::{
    choose_generic_lift, lower_faces, subdivide_conv, subdivide_sum, verify_subdivision, Cell,
    CellKind, Lift, Operation, RationalPolytope, Subdivision, SubdivisionAudit,
};
pub use tropical::{
    compile, compile_with_trees, eval_network, eval_pair, sample_pk, synthesize_network,
    tree_to_polytope, ConstructionTree, IntegralNetwork, PolytopePair,
};
