//! Gaussian-kernel functional summaries of persistence diagrams.
//!
//! A persistence diagram is a finite multiset of `(birth, death)` points
//! strictly above the diagonal. This crate turns diagrams into smooth
//! one-dimensional summaries by placing an isotropic Gaussian at every
//! point (the *persistence surface*) and integrating the surface over the
//! sliding box `{x < t, y > t}` (the *Gaussian persistence curve*, GPC).
//!
//! The crate provides:
//!
//! * [`diagram`] — diagram ingestion (CSV), canonical multiset semantics,
//!   and lifespan statistics.
//! * [`gaussian`] — high-accuracy standard-normal primitives and the
//!   closed-form Gaussian integrals the curve formulas reduce to.
//! * [`quad`] — adaptive Gauss–Kronrod quadrature used as an independent
//!   verification twin for every closed form.
//! * [`weights`] — the catalogue of per-point weighting functions (life,
//!   midlife, entropy, ...) resolved against a concrete diagram.
//! * [`curves`] — surface and curve evaluation, sampling, and L1 norms
//!   (closed form and quadrature).
//! * [`matching`] — exact 1-Wasserstein distance between diagrams via
//!   minimum-cost assignment over diagonal-augmented point sets.
//! * [`stability`] — the Lipschitz-style constants tying the L1 distance
//!   between two curves to the Wasserstein distance between their
//!   diagrams, with numerical verification of each bound.
//! * [`injectivity`] — moment fingerprints that distinguish distinct
//!   diagrams through their unweighted surfaces, plus tail-dominance
//!   witnesses for curves with different extreme births/deaths.
//!
//! # Example
//!
//! ```
//! use gpc_core::{GpcModel, PersistenceDiagram, QuadratureSpec, WeightSpec};
//! use gpc_core::matching::wasserstein1;
//!
//! let c = PersistenceDiagram::from_pairs(&[(0.0, 1.0), (0.5, 2.0)])?;
//! let d = PersistenceDiagram::from_pairs(&[(0.1, 1.2), (0.5, 2.0)])?;
//!
//! // curve evaluation and its L1 norm, closed form vs quadrature
//! let model = GpcModel::new(c.clone(), &WeightSpec::life(), 1.0)?;
//! let norm = model.l1_norm_closed();
//! let check = model.l1_norm_quadrature(&QuadratureSpec::default())?;
//! assert!((norm.value - check).abs() < 1e-6 * norm.value);
//!
//! // exact 1-Wasserstein distance: (0,1) matches (0.1,1.2) at L-inf cost 0.2
//! let (w1, _matching) = wasserstein1(&c, &d);
//! assert!((w1 - 0.2).abs() < 1e-12);
//! # Ok::<(), Box<dyn std::error::Error>>(())
//! ```

pub mod curves;
pub mod diagram;
pub mod gaussian;
pub mod injectivity;
pub mod matching;
pub mod numfmt;
pub mod quad;
pub mod stability;
pub mod weights;

mod util;

pub use curves::{CurveError, CurveSamples, GpcModel, L1Closed};
pub use diagram::{DiagramError, DiagramFormat, DiagramPoint, PersistenceDiagram};
pub use injectivity::{Axis, InjectivityError, MomentTable, ProbeResult, TailProbe, TailSide};
pub use matching::{MatchError, MatchPartition, Matching};
pub use quad::{QuadError, QuadratureSpec};
pub use stability::{StabilityError, StabilityReport, Theorem, VerifyConfig};
pub use weights::{ResolvedWeights, WeightError, WeightKind, WeightSpec};

#[cfg(test)]
mod concurrency {
    use super::*;

    fn assert_shareable<T: Send + Sync>() {}

    // everything is immutable after construction; batch evaluation over
    // many models/diagrams may fan out across threads
    #[test]
    fn core_types_are_send_sync() {
        assert_shareable::<PersistenceDiagram>();
        assert_shareable::<GpcModel>();
        assert_shareable::<WeightSpec>();
        assert_shareable::<ResolvedWeights>();
        assert_shareable::<Matching>();
        assert_shareable::<StabilityReport>();
        assert_shareable::<QuadratureSpec>();
    }
}
