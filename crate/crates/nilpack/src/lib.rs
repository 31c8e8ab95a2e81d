//! Nil geometry in the projective (linearized) model: isometry
//! arithmetic, geodesics and geodesic spheres, a two-point distance
//! solver, geodesic ball volumes, the regular prism tilings of the
//! discrete groups pq2_1, and geodesic ball packing optimization on top
//! of them.

pub mod error;
pub mod geodesics;
pub mod mesh;
pub mod nil;
pub mod numeric;
pub mod packing;
pub mod reference;
pub mod tilings;

pub use error::NilError;
pub use geodesics::{
    ball_convexity_bound, ball_volume, distance, geodesic_point, sphere_exists, sphere_point,
    DistanceSolution, GeodesicParams, SphereProfile, MAX_SPHERE_RADIUS,
};
pub use mesh::{arrangement_mesh, prism_mesh, sphere_mesh, write_obj, TriangleMesh};
pub use nil::{FibreTranslation, NilIsometry, NilPoint, NilTranslation};
pub use packing::{
    kissing_number, match_table_row, packing_density, radius_terms, solve_balanced, sweep,
    BalancedSolution, PackingResult, RadiusTerms, SweepPoint,
};
pub use reference::{reference_rows, ReferenceRow, BALANCED_ROW_INDEX};
pub use tilings::{tiling_exists, OrbitPoint, PrismTiling, RelationReport};
