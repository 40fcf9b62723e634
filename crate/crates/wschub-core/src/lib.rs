//! Exact equivariant Schubert calculus on weighted Grassmannians wGr(d,n).
//!
//! The equivariant cohomology of wGr(d,n) is modelled GKM-style: a class is a
//! tuple of polynomials, one per d-subset of {1..n}, subject to a divisibility
//! condition along every edge of the moment graph (pairs of subsets sharing
//! d-1 elements).  Everything is computed over arbitrary-precision rationals;
//! there is no floating point anywhere in this crate.
//!
//! Module map:
//! * [`combinat`] — the index poset: Bruhat order, inversions, lengths, covers.
//! * [`poly`] — exact multivariate polynomials, linear forms, exact division,
//!   linear substitution and re-expansion in a new linear basis.
//! * [`gkm`] — moment graphs, restriction vectors, the GKM membership check,
//!   pointwise products and upper-triangular expansion in a Schubert basis.
//! * [`schubert`] — the ordinary (unweighted) Schubert basis, its structure
//!   constants and their canonical u-monomial expansions.
//! * [`weighted`] — everything weight-dependent: weighted restriction tables by
//!   two independent routes, the weighted Pieri rule, Kostka coefficients,
//!   wu-forms, the structure-constant formula, positivity certificates, the
//!   non-equivariant specialization, weighted projective space and Kawasaki
//!   factors.

pub mod combinat;
pub mod gkm;
pub mod poly;
pub mod schubert;
pub mod weighted;

/// Errors shared across the crate.  `NOT_DIVISIBLE` is deliberately *not* here:
/// division by a linear form returns `Option`, since indivisibility is a value
/// (the GKM condition fails), not a fault.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("invalid parameters: {0}")]
    Domain(String),
    #[error("resource cap exceeded: C({n},{d}) = {size} vertices > cap {cap}")]
    ResourceCap { n: u32, d: u32, size: u64, cap: u64 },
    #[error("variable context mismatch")]
    ContextMismatch,
    #[error("inexact division while {0}; this signals an upstream bug")]
    InexactDivision(String),
    #[error("nonzero residual after Schubert-basis expansion")]
    NonzeroResidual,
    #[error("given forms are not a linear basis (singular change of variables)")]
    SingularBasis,
    #[error("polynomial does not lie in the subring generated by the given forms")]
    NotInSubring,
    #[error("route mismatch: {0}")]
    RouteMismatch(String),
}

pub type Result<T> = std::result::Result<T, Error>;
