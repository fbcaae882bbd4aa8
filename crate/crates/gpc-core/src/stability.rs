//! Stability constants and their numerical verification.
//!
//! Each theorem bounds the L1 distance between two weighted curves by a
//! constant times the 1-Wasserstein distance between their diagrams (plus,
//! for arbitrary weights, an additive matching-dependent term):
//!
//! * `A` — unweighted curves: `A = max{2, 2(1 + sigma/(sqrt(pi) delta_CD))}`.
//! * `B` — arbitrary weights: `B = max{2 M_C, 2 M_E (1 + sigma/(sqrt(pi) delta_E))}`
//!   plus the additive term `M_gamma * ||G_D'||_1`.
//! * `J` — cross-Lipschitz weights: `J = B + K ||G_D'||_1`.
//! * `G` — raw lifespan weight:
//!   `G = max{2 M_C + 2 ||G_D'||_1, 2(M_E + sigma/sqrt(pi)), 2 + 2 sigma/sqrt(pi)}`.
//! * `P` — normalized lifespan weight (total lifespans at least 1):
//!   `P = max{2, 2(M_E + sigma/sqrt(pi)), 2 + 2 sigma/sqrt(pi), 4 + 4 sigma/(sqrt(pi) delta_D)}`.
//!
//! All matching-dependent quantities come from the deterministic optimal
//! matching returned by the assignment solver, so a report is reproducible
//! bit for bit. [`verify`] computes the constant, the Wasserstein
//! distance, the measured L1 curve distance (by quadrature), and the
//! verdict at a tolerance relative to the bound.

use thiserror::Error;

use crate::curves::{l1_distance, CurveError, GpcModel};
use crate::diagram::{joint_min_lifespan, PersistenceDiagram};
use crate::gaussian::FRAC_1_SQRT_PI;
use crate::matching::{partition, wasserstein1, MatchError, Matching};
use crate::numfmt::g10;
use crate::quad::{QuadError, QuadratureSpec};
use crate::weights::{cross_lipschitz_bound, resolve, ResolvedWeights, WeightError, WeightSpec};

/// Verdict tolerance: relative to the bound (not the distance) so that
/// quadrature noise on near-zero distances cannot produce false alarms.
const VERDICT_REL_TOL: f64 = 1e-6;
const VERDICT_ABS_TOL: f64 = 1e-9;

#[derive(Debug, Error)]
pub enum StabilityError {
    #[error("theorem hypothesis violated: {0}")]
    HypothesisViolated(String),
    #[error("weights do not match the weighting function the theorem is stated for")]
    WeightKindMismatch,
    #[error(transparent)]
    Weight(#[from] WeightError),
    #[error(transparent)]
    Curve(#[from] CurveError),
    #[error(transparent)]
    Quad(#[from] QuadError),
    #[error(transparent)]
    Match(#[from] MatchError),
}

/// Which stability bound to compute.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Theorem {
    /// Unweighted curves with constant `A`.
    UnweightedA,
    /// Arbitrary weights: constant `B` plus additive term.
    GeneralWeightsB,
    /// Cross-Lipschitz weights with constant `J`.
    LipschitzJ,
    /// Raw lifespan weight with constant `G`.
    LifespanG,
    /// Normalized lifespan weight with constant `P`.
    NormalizedLifespanP,
}

impl Theorem {
    pub fn token(&self) -> &'static str {
        match self {
            Theorem::UnweightedA => "A",
            Theorem::GeneralWeightsB => "B",
            Theorem::LipschitzJ => "J",
            Theorem::LifespanG => "G",
            Theorem::NormalizedLifespanP => "P",
        }
    }
}

impl std::fmt::Display for Theorem {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.token())
    }
}

impl std::str::FromStr for Theorem {
    type Err = StabilityError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "A" => Ok(Theorem::UnweightedA),
            "B" => Ok(Theorem::GeneralWeightsB),
            "J" => Ok(Theorem::LipschitzJ),
            "G" => Ok(Theorem::LifespanG),
            "P" => Ok(Theorem::NormalizedLifespanP),
            other => Err(StabilityError::HypothesisViolated(format!(
                "unknown theorem `{other}` (expected A|B|J|G|P)"
            ))),
        }
    }
}

/// Everything [`verify`] needs besides the diagrams.
#[derive(Debug, Clone)]
pub struct VerifyConfig {
    pub sigma: f64,
    /// Weights on the first diagram (theorems `A`, `G`, `P` override this).
    pub weight_c: WeightSpec,
    /// Weights on the second diagram.
    pub weight_d: WeightSpec,
    /// Cross-Lipschitz constant for theorem `J`; when absent a statically
    /// known constant for the weight pair is used if one exists.
    pub lipschitz_k: Option<f64>,
    pub quad: QuadratureSpec,
}

impl VerifyConfig {
    /// Unweighted configuration at the given bandwidth.
    pub fn new(sigma: f64) -> Self {
        VerifyConfig {
            sigma,
            weight_c: WeightSpec::unweighted(),
            weight_d: WeightSpec::unweighted(),
            lipschitz_k: None,
            quad: QuadratureSpec::default(),
        }
    }

    /// Same weight spec on both diagrams.
    pub fn with_weights(mut self, spec: WeightSpec) -> Self {
        self.weight_c = spec.clone();
        self.weight_d = spec;
        self
    }
}

/// Outcome of checking one theorem on one diagram pair.
#[derive(Debug, Clone)]
pub struct StabilityReport {
    pub theorem: Theorem,
    /// The multiplicative constant.
    pub constant: f64,
    /// Matching-dependent additive term (0 except for theorem `B`).
    pub additive_term: f64,
    /// Exact 1-Wasserstein distance between the diagrams.
    pub w1: f64,
    /// Measured `||G_C - G_D||_1` by adaptive quadrature.
    pub l1_dist: f64,
    /// `constant * w1 + additive_term`.
    pub bound_value: f64,
    /// Whether the bound holds at the verdict tolerance.
    pub holds: bool,
    /// `bound_value - l1_dist`.
    pub slack: f64,
    /// Provenance of sigma, weights, and the matching tie-break.
    pub inputs_digest: String,
}

/// Matching-dependent quantities shared by the weighted constants.
struct PartitionQuantities {
    m_e: f64,
    delta_e: f64,
    m_gamma: f64,
    /// Unweighted closed-form L1 norm of the curve on `D'`.
    g_dprime_l1: f64,
}

fn partition_quantities(
    c: &PersistenceDiagram,
    d: &PersistenceDiagram,
    weights_c: &ResolvedWeights,
    weights_d: &ResolvedWeights,
    matching: &Matching,
    sigma: f64,
) -> Result<PartitionQuantities, StabilityError> {
    let parts = partition(c, d, matching)?;
    let m_e = matching
        .c_to_diagonal
        .iter()
        .map(|&i| weights_c.values()[i].abs())
        .chain(
            matching
                .d_to_diagonal
                .iter()
                .map(|&j| weights_d.values()[j].abs()),
        )
        .fold(0.0f64, f64::max);
    let delta_e = parts.e.min_lifespan();
    let m_gamma = matching
        .pairs
        .iter()
        .map(|&(i, j)| (weights_c.values()[i] - weights_d.values()[j]).abs())
        .fold(0.0f64, f64::max);
    let g_dprime_l1 = GpcModel::new(parts.d_prime, &WeightSpec::unweighted(), sigma)?
        .l1_norm_closed()
        .value;
    Ok(PartitionQuantities {
        m_e,
        delta_e,
        m_gamma,
        g_dprime_l1,
    })
}

/// `A = max{2, 2(1 + sigma/(sqrt(pi) delta_CD))}` for unweighted curves.
pub fn constant_unweighted(c: &PersistenceDiagram, d: &PersistenceDiagram, sigma: f64) -> f64 {
    assert!(sigma > 0.0, "sigma must be positive");
    let delta = joint_min_lifespan(c, d);
    2.0f64.max(2.0 * (1.0 + sigma * FRAC_1_SQRT_PI / delta))
}

/// `(B, M_gamma * ||G_D'||_1)` for arbitrary weights.
pub fn constants_general(
    c: &PersistenceDiagram,
    d: &PersistenceDiagram,
    sigma: f64,
    weights_c: &ResolvedWeights,
    weights_d: &ResolvedWeights,
    matching: &Matching,
) -> Result<(f64, f64), StabilityError> {
    assert!(sigma > 0.0, "sigma must be positive");
    let q = partition_quantities(c, d, weights_c, weights_d, matching, sigma)?;
    // delta_E = +inf when E is empty, so the second argument collapses to 0
    let b =
        (2.0 * weights_c.max_abs()).max(2.0 * q.m_e * (1.0 + sigma * FRAC_1_SQRT_PI / q.delta_e));
    Ok((b, q.m_gamma * q.g_dprime_l1))
}

/// `J = max{2 M_C, 2 M_E (1 + sigma/(sqrt(pi) delta_E))} + K ||G_D'||_1`.
///
/// The additive `K ||G_D'||_1` follows from replacing `M_gamma` by
/// `K * W_1` in the general-weights bound: matched pairs cost at most
/// `(2 M_C + K ||G_D'||_1)` per unit of transport. Folding the term into
/// a max instead of the sum is not a valid bound (pairs that move
/// anti-diagonally while their weights drift realize both contributions
/// at once), so the sum is what gets verified.
pub fn constant_lipschitz(
    c: &PersistenceDiagram,
    d: &PersistenceDiagram,
    sigma: f64,
    k: f64,
    weights_c: &ResolvedWeights,
    weights_d: &ResolvedWeights,
    matching: &Matching,
) -> Result<f64, StabilityError> {
    assert!(sigma > 0.0, "sigma must be positive");
    if k < 0.0 {
        return Err(StabilityError::HypothesisViolated(format!(
            "Lipschitz constant must be nonnegative, got {k}"
        )));
    }
    let q = partition_quantities(c, d, weights_c, weights_d, matching, sigma)?;
    let b =
        (2.0 * weights_c.max_abs()).max(2.0 * q.m_e * (1.0 + sigma * FRAC_1_SQRT_PI / q.delta_e));
    Ok(b + k * q.g_dprime_l1)
}

fn require_raw_lifespan(
    diagram: &PersistenceDiagram,
    weights: &ResolvedWeights,
) -> Result<(), StabilityError> {
    let ok = diagram
        .points()
        .iter()
        .zip(weights.values())
        .all(|(p, &w)| (w - p.lifespan()).abs() <= 1e-12 * p.lifespan().max(1.0));
    if ok {
        Ok(())
    } else {
        Err(StabilityError::WeightKindMismatch)
    }
}

/// `G = max{2 M_C + 2 ||G_D'||_1, 2(M_E + sigma/sqrt(pi)), 2 + 2 sigma/sqrt(pi)}`
/// for the raw lifespan weight `kappa(b, d) = d - b` on both diagrams.
///
/// The lifespan weight is 2-Lipschitz in the `L_inf` ground metric
/// (`|l(p) - l(q)| = 2 ||p - q||_inf` when a point moves anti-diagonally),
/// so the matched-pair coefficient is `2 M_C + 2 ||G_D'||_1` by the same
/// argument as the Lipschitz bound; the two diagonal-escape coefficients
/// are unchanged.
pub fn constant_lifespan(
    c: &PersistenceDiagram,
    d: &PersistenceDiagram,
    sigma: f64,
    weights_c: &ResolvedWeights,
    weights_d: &ResolvedWeights,
    matching: &Matching,
) -> Result<f64, StabilityError> {
    assert!(sigma > 0.0, "sigma must be positive");
    require_raw_lifespan(c, weights_c)?;
    require_raw_lifespan(d, weights_d)?;
    let q = partition_quantities(c, d, weights_c, weights_d, matching, sigma)?;
    let s = sigma * FRAC_1_SQRT_PI;
    Ok((2.0 * weights_c.max_abs() + 2.0 * q.g_dprime_l1)
        .max(2.0 * (q.m_e + s))
        .max(2.0 + 2.0 * s))
}

/// `P = max{2, 2(M_E + sigma/sqrt(pi)), 2 + 2 sigma/sqrt(pi), 4 + 4 sigma/(sqrt(pi) delta_D)}`
/// for normalized lifespan weights; both total lifespans must be >= 1.
pub fn constant_normalized(
    c: &PersistenceDiagram,
    d: &PersistenceDiagram,
    sigma: f64,
    weights_c: &ResolvedWeights,
    weights_d: &ResolvedWeights,
    matching: &Matching,
) -> Result<f64, StabilityError> {
    assert!(sigma > 0.0, "sigma must be positive");
    let l_c = c.total_lifespan();
    let l_d = d.total_lifespan();
    if l_c < 1.0 || l_d < 1.0 {
        return Err(StabilityError::HypothesisViolated(format!(
            "normalized-lifespan bound needs total lifespans >= 1, got L_C = {l_c}, L_D = {l_d}"
        )));
    }
    let normalized = |diagram: &PersistenceDiagram, weights: &ResolvedWeights, total: f64| {
        diagram
            .points()
            .iter()
            .zip(weights.values())
            .all(|(p, &w)| (w - p.lifespan() / total).abs() <= 1e-12)
    };
    if !normalized(c, weights_c, l_c) || !normalized(d, weights_d, l_d) {
        return Err(StabilityError::WeightKindMismatch);
    }
    let q = partition_quantities(c, d, weights_c, weights_d, matching, sigma)?;
    let s = sigma * FRAC_1_SQRT_PI;
    Ok(2.0f64
        .max(2.0 * (q.m_e + s))
        .max(2.0 + 2.0 * s)
        .max(4.0 + 4.0 * sigma * FRAC_1_SQRT_PI / d.min_lifespan()))
}

/// Compute the requested theorem's constant, the Wasserstein distance, the
/// measured curve distance, and the verdict.
///
/// Theorem `A` forces unweighted curves, `G` the raw lifespan weight and
/// `P` the normalized lifespan weight; `B` and `J` use the configured
/// weight specs. Weights that do not vanish on the diagonal (midlife,
/// multiplicative life) are rejected: the bounds are stated for genuine
/// weighting functions.
pub fn verify(
    c: &PersistenceDiagram,
    d: &PersistenceDiagram,
    theorem: Theorem,
    cfg: &VerifyConfig,
) -> Result<StabilityReport, StabilityError> {
    if !cfg.sigma.is_finite() || cfg.sigma <= 0.0 {
        return Err(StabilityError::HypothesisViolated(format!(
            "sigma must be positive, got {}",
            cfg.sigma
        )));
    }
    let sigma = cfg.sigma;
    let mut k_used: Option<f64> = None;
    let (weights_c, weights_d) = match theorem {
        Theorem::UnweightedA => (
            resolve(c, &WeightSpec::unweighted())?,
            resolve(d, &WeightSpec::unweighted())?,
        ),
        Theorem::GeneralWeightsB => (resolve(c, &cfg.weight_c)?, resolve(d, &cfg.weight_d)?),
        Theorem::LipschitzJ => {
            let k = cfg
                .lipschitz_k
                .or_else(|| cross_lipschitz_bound(&cfg.weight_c, c, &cfg.weight_d, d))
                .ok_or_else(|| {
                    StabilityError::HypothesisViolated(
                        "no cross-Lipschitz constant known for this weight pair; supply K"
                            .to_string(),
                    )
                })?;
            if k < 0.0 {
                return Err(StabilityError::HypothesisViolated(format!(
                    "Lipschitz constant must be nonnegative, got {k}"
                )));
            }
            k_used = Some(k);
            (resolve(c, &cfg.weight_c)?, resolve(d, &cfg.weight_d)?)
        }
        Theorem::LifespanG => (
            ResolvedWeights::raw_lifespan(c),
            ResolvedWeights::raw_lifespan(d),
        ),
        Theorem::NormalizedLifespanP => (
            resolve(c, &WeightSpec::normalized_life())?,
            resolve(d, &WeightSpec::normalized_life())?,
        ),
    };
    if weights_c.non_vanishing_on_diagonal() || weights_d.non_vanishing_on_diagonal() {
        return Err(StabilityError::HypothesisViolated(
            "weights must vanish on the diagonal (midlife and multiplicative life are excluded)"
                .to_string(),
        ));
    }

    let (w1, matching) = wasserstein1(c, d);
    let (constant, additive_term) = match theorem {
        Theorem::UnweightedA => (constant_unweighted(c, d, sigma), 0.0),
        Theorem::GeneralWeightsB => {
            constants_general(c, d, sigma, &weights_c, &weights_d, &matching)?
        }
        Theorem::LipschitzJ => (
            constant_lipschitz(
                c,
                d,
                sigma,
                k_used.expect("set above"),
                &weights_c,
                &weights_d,
                &matching,
            )?,
            0.0,
        ),
        Theorem::LifespanG => (
            constant_lifespan(c, d, sigma, &weights_c, &weights_d, &matching)?,
            0.0,
        ),
        Theorem::NormalizedLifespanP => (
            constant_normalized(c, d, sigma, &weights_c, &weights_d, &matching)?,
            0.0,
        ),
    };

    let inputs_digest = format!(
        "theorem={};sigma={};weight_c={};weight_d={};k={};c={:#018x};d={:#018x};tiebreak=row-major-lowest-index",
        theorem.token(),
        g10(sigma),
        weights_c.kind(),
        weights_d.kind(),
        k_used.map_or_else(|| "-".to_string(), g10),
        c.digest(),
        d.digest(),
    );

    let model_c = GpcModel::from_resolved(c.clone(), weights_c, sigma)?;
    let model_d = GpcModel::from_resolved(d.clone(), weights_d, sigma)?;
    let l1_dist = l1_distance(&model_c, &model_d, &cfg.quad)?;

    let bound_value = constant * w1 + additive_term;
    let holds = l1_dist <= bound_value + VERDICT_REL_TOL * bound_value + VERDICT_ABS_TOL;
    Ok(StabilityReport {
        theorem,
        constant,
        additive_term,
        w1,
        l1_dist,
        bound_value,
        holds,
        slack: bound_value - l1_dist,
        inputs_digest,
    })
}
