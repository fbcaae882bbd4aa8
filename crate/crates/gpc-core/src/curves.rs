//! Persistence surfaces and Gaussian persistence curves.
//!
//! A [`GpcModel`] bundles a diagram, resolved per-point weights and a
//! bandwidth. The surface is the weighted sum of isotropic Gaussians at
//! the diagram points; the curve is its integral over the sliding box
//! `{x < t, y > t}`, evaluated through the cdf product form
//! `sum_i kappa_i * Phi((t-b_i)/sigma) * Phi((d_i-t)/sigma)`.
//! The L1 norm of the curve has a closed form (exact for same-sign
//! weights); quadrature backs it as an independent check and evaluates
//! curve-to-curve L1 distances, which have no closed form.

use thiserror::Error;

use crate::diagram::PersistenceDiagram;
use crate::gaussian::{std_normal_cdf, std_normal_pdf};
use crate::numfmt::g10;
use crate::quad::{integrate_l1, QuadError, QuadratureSpec};
use crate::util::neumaier_sum;
use crate::weights::{resolve, ResolvedWeights, WeightError, WeightKind, WeightSpec};

#[derive(Debug, Error)]
pub enum CurveError {
    #[error("sigma must be positive, got {0}")]
    InvalidSigma(f64),
    #[error("bandwidths differ: {left} vs {right}")]
    SigmaMismatch { left: f64, right: f64 },
    #[error("weights not aligned with diagram: {weights} values for {points} points")]
    Misaligned { weights: usize, points: usize },
    #[error(transparent)]
    Weight(#[from] WeightError),
    #[error(transparent)]
    Quad(#[from] QuadError),
}

/// Closed-form L1 norm of a curve. `exact` is false when the weights mix
/// signs, in which case the value is an upper bound and quadrature should
/// be preferred.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct L1Closed {
    pub value: f64,
    pub exact: bool,
}

/// A diagram with resolved weights and a fixed isotropic bandwidth,
/// evaluable as a surface or a curve. Immutable; evaluation is pure.
#[derive(Debug, Clone)]
pub struct GpcModel {
    diagram: PersistenceDiagram,
    weights: ResolvedWeights,
    sigma: f64,
}

impl GpcModel {
    /// Resolve `spec` against `diagram` and fix the bandwidth.
    pub fn new(
        diagram: PersistenceDiagram,
        spec: &WeightSpec,
        sigma: f64,
    ) -> Result<Self, CurveError> {
        if !sigma.is_finite() || sigma <= 0.0 {
            return Err(CurveError::InvalidSigma(sigma));
        }
        let weights = resolve(&diagram, spec)?;
        Ok(GpcModel {
            diagram,
            weights,
            sigma,
        })
    }

    /// Build from pre-resolved weights (they must be aligned with the
    /// diagram's canonical order).
    pub fn from_resolved(
        diagram: PersistenceDiagram,
        weights: ResolvedWeights,
        sigma: f64,
    ) -> Result<Self, CurveError> {
        if !sigma.is_finite() || sigma <= 0.0 {
            return Err(CurveError::InvalidSigma(sigma));
        }
        if weights.len() != diagram.len() {
            return Err(CurveError::Misaligned {
                weights: weights.len(),
                points: diagram.len(),
            });
        }
        Ok(GpcModel {
            diagram,
            weights,
            sigma,
        })
    }

    pub fn diagram(&self) -> &PersistenceDiagram {
        &self.diagram
    }

    pub fn weights(&self) -> &ResolvedWeights {
        &self.weights
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    /// The persistence surface at `(x, y)`:
    /// `sum_i kappa_i / (2 pi sigma^2) * exp(-((x-b_i)^2 + (y-d_i)^2) / (2 sigma^2))`.
    pub fn surface_eval(&self, x: f64, y: f64) -> f64 {
        let inv_two_sigma_sq = 0.5 / (self.sigma * self.sigma);
        let scale = inv_two_sigma_sq / std::f64::consts::PI;
        neumaier_sum(
            self.diagram
                .points()
                .iter()
                .zip(self.weights.values())
                .map(|(p, &w)| {
                    let dx = x - p.birth();
                    let dy = y - p.death();
                    w * scale * (-(dx * dx + dy * dy) * inv_two_sigma_sq).exp()
                }),
        )
    }

    /// The Gaussian persistence curve at `t` via the cdf product form.
    pub fn gpc_eval(&self, t: f64) -> f64 {
        let sigma = self.sigma;
        neumaier_sum(
            self.diagram
                .points()
                .iter()
                .zip(self.weights.values())
                .map(|(p, &w)| {
                    w * std_normal_cdf((t - p.birth()) / sigma)
                        * std_normal_cdf((p.death() - t) / sigma)
                }),
        )
    }

    /// `n >= 2` uniform samples of the curve on `[t_min, t_max]`,
    /// endpoints included. Panics if the range is empty or `n < 2`.
    pub fn sample(&self, t_min: f64, t_max: f64, n: usize) -> CurveSamples {
        assert!(t_min < t_max, "sample range must be nonempty");
        assert!(n >= 2, "need at least the two endpoint samples");
        let step = (t_max - t_min) / (n - 1) as f64;
        let mut t_values = Vec::with_capacity(n);
        let mut values = Vec::with_capacity(n);
        for i in 0..n {
            let t = if i + 1 == n {
                t_max
            } else {
                t_min + i as f64 * step
            };
            t_values.push(t);
            values.push(self.gpc_eval(t));
        }
        CurveSamples {
            t_values,
            values,
            sigma: self.sigma,
            weight_kind: self.weights.kind(),
            diagram_digest: self.diagram.digest(),
        }
    }

    /// `[b_min, d_max]` of the underlying diagram; `None` when empty.
    pub fn support(&self) -> Option<(f64, f64)> {
        Some((self.diagram.min_birth()?, self.diagram.max_death()?))
    }

    fn padded_support(&self, padding: f64) -> Option<(f64, f64)> {
        let (lo, hi) = self.support()?;
        Some((lo - padding * self.sigma, hi + padding * self.sigma))
    }

    /// Closed-form L1 norm:
    /// `sum_i |kappa_i| * [(d_i-b_i) Phi(l_i/(sqrt2 sigma)) + sqrt2 sigma phi(l_i/(sqrt2 sigma))]`
    /// with `l_i = d_i - b_i`. Exact for same-sign weights, an upper bound
    /// otherwise (the `exact` flag records which).
    pub fn l1_norm_closed(&self) -> L1Closed {
        let sigma = self.sigma;
        let value = neumaier_sum(self.diagram.points().iter().zip(self.weights.values()).map(
            |(p, &w)| {
                let l = p.lifespan();
                let x = l / (std::f64::consts::SQRT_2 * sigma);
                w.abs()
                    * (l * std_normal_cdf(x) + std::f64::consts::SQRT_2 * sigma * std_normal_pdf(x))
            },
        ));
        L1Closed {
            value,
            exact: !self.weights.mixed_sign(),
        }
    }

    /// L1 norm by adaptive quadrature of `|G(t)|` over the padded support.
    pub fn l1_norm_quadrature(&self, spec: &QuadratureSpec) -> Result<f64, CurveError> {
        match self.padded_support(spec.support_padding()) {
            None => Ok(0.0),
            Some((lo, hi)) => Ok(integrate_l1(|t| self.gpc_eval(t), lo, hi, spec)?),
        }
    }
}

/// `∫ |G_1(t) - G_2(t)| dt` over the union of the padded supports.
/// The models must share one bandwidth.
pub fn l1_distance(m1: &GpcModel, m2: &GpcModel, spec: &QuadratureSpec) -> Result<f64, CurveError> {
    if m1.sigma != m2.sigma {
        return Err(CurveError::SigmaMismatch {
            left: m1.sigma,
            right: m2.sigma,
        });
    }
    let padding = spec.support_padding();
    let support = match (m1.padded_support(padding), m2.padded_support(padding)) {
        (None, None) => return Ok(0.0),
        (Some(s), None) | (None, Some(s)) => s,
        (Some((a1, b1)), Some((a2, b2))) => (a1.min(a2), b1.max(b2)),
    };
    Ok(integrate_l1(
        |t| m1.gpc_eval(t) - m2.gpc_eval(t),
        support.0,
        support.1,
        spec,
    )?)
}

/// Uniform samples of one curve, ready for CSV emission.
#[derive(Debug, Clone, PartialEq)]
pub struct CurveSamples {
    t_values: Vec<f64>,
    values: Vec<f64>,
    sigma: f64,
    weight_kind: WeightKind,
    diagram_digest: u64,
}

impl CurveSamples {
    pub fn t_values(&self) -> &[f64] {
        &self.t_values
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    pub fn weight_kind(&self) -> WeightKind {
        self.weight_kind
    }

    /// CSV rows `t,value` under a comment header recording the bandwidth,
    /// weight kind and the digest of the source diagram.
    pub fn to_csv(&self) -> String {
        let mut out = format!(
            "# sigma={} weight={} diagram={:#018x}\nt,value\n",
            g10(self.sigma),
            self.weight_kind,
            self.diagram_digest
        );
        for (t, v) in self.t_values.iter().zip(&self.values) {
            out.push_str(&g10(*t));
            out.push(',');
            out.push_str(&g10(*v));
            out.push('\n');
        }
        out
    }
}
