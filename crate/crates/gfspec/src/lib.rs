//! Spectral invariants and barcodes for grid-sampled generating functions.
//!
//! The crate models functions `S(x; xi) = Q(xi) + P(x; xi)` on a periodic
//! base grid (a torus of dimension ≤ 2, or a point) times a non-periodic
//! fiber box, where `Q` is a diagonal ±1 quadratic form in the fiber
//! variables and `P` is a bounded perturbation supported away from the fiber
//! boundary.  Sublevel-set persistent homology of the pair (field, deep
//! sublevel) yields a barcode; the births of the infinite bars in the extreme
//! degrees define the spectral invariants `c_minus ≤ c_plus`, their gap
//! `gamma = c_plus - c_minus`, and the longest finite bar defines the
//! boundary depth `beta`.
//!
//! On top of the invariants the crate provides checkers for a family of
//! inequalities relating global invariants to slice invariants (direct and
//! inverse reduction), to covers (a Mayer–Vietoris style gluing bound), to
//! pullbacks under torus maps, and to shifted copies of the same field along
//! a circle action.  A separate exact-arithmetic module implements finite
//! persistence modules with compatible products and verifies the inequality
//! `beta ≤ gamma` there.
//!
//! Everything is deterministic: random instances are generated from explicit
//! seeds, and all tie-breaking in the persistence reduction is fixed by
//! `(filtration value, dimension, cell id)`.

pub mod algebra;
pub mod barcode;
pub mod complex;
pub mod error;
pub mod generator;
pub mod gf2;
pub mod gfqi;
pub mod grid;
pub mod rank;
pub mod reduce;
pub mod reduction;
pub mod region;
pub mod spectral;

pub use algebra::{
    exact_bottleneck, from_json, ks_check, mutate_system, random_system, to_json,
    unit_interleaving, FinitePersistenceModule, ProductSystem, RationalBar, SystemSize,
};
pub use barcode::{Bar, Barcode};
pub use complex::{Cell, FilteredComplex};
pub use error::{Error, Result};
pub use gfqi::{
    fiberwise_sum, gf_difference, graph_gf, pullback_gf, shift_gf, GfqiField, MapSpec,
};
pub use reduction::{
    check_direct_reduction, check_inverse_reduction, circle_shift_test, glued_upper_bound,
    mv_bound, mv_bound_product, pullback_check, triangulation_cover, Cover, ProductGfqi,
};
pub use region::Region;
pub use spectral::{
    spectral_report, stability_gap, verify_duality, verify_ks, SpectralReport,
};
pub use grid::{Axis, GridDomain, GridField};
