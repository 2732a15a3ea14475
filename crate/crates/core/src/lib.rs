//! Certified hyperbolic-volume computations.
//!
//! * [`hypgeo`]: closed-form volumes of balls, caps, lenses, cones and
//!   clipped ice-cream cones in H³.
//! * [`density`]: Böröczky's simplex packing density and the derived b(r).
//! * [`certify`]: endpoint-substitution lower bounds for
//!   Φ(D) = φ(R − D, ε/2, D), the published 47-cell partition and an
//!   adaptive certifier.
//! * [`bounds`]: valence, rank and homology bounds from a certified constant.
//! * [`mc`]: an independent Monte-Carlo oracle in the hyperboloid model.

pub mod bounds;
pub mod certify;
pub mod density;
pub mod error;
pub mod format;
pub mod hypgeo;
pub mod mc;
pub mod quadrature;
pub mod special;

pub use bounds::{
    homology_bound, lambda0, lambda1, lambda1_compact_p2, lambda1_noncompact, rank_bound, HomologyBound,
    HomologyBoundQuery, Lambdas, RankBoundReport,
};
pub use certify::{
    certify_lower_bound, optimize_r, phi_lower, verify_published_partition, BoundPair, CertifyParams, GridSpec,
    OptimizeReport, PartitionCertificate, SubintervalCertificate,
};
pub use density::{b_ratio, circumradius_h3, dihedral_beta, packing_density, simplex_volume_tau};
pub use error::{Error, RankCondition, Result};
pub use hypgeo::{
    ball_volume, cap_volume, cone_volume, eta, kappa, lens_volume, omega, phi, psi, sigma, theta, CapSpec,
    TriplePoint,
};
pub use mc::{estimate_volume, hdist, sample_ball, HPoint, McEstimate, Region};
pub use quadrature::{QuadratureConfig, QuadratureMethod, QuadratureResult};
