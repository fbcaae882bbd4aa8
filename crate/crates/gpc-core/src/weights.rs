//! Weighting functions and their per-diagram resolution.
//!
//! A weighting function scales the Gaussian kernel each diagram point
//! contributes to the surface. The built-in catalogue covers the constant
//! weight and the life, midlife, life-entropy, multiplicative-life and
//! normalized-life weights; arbitrary functions enter through
//! [`WeightSpec::custom`]. Resolving a spec against a diagram produces the
//! aligned per-point values together with the normalizer and the maximum
//! magnitude that the stability constants consume.
//!
//! Midlife and multiplicative life do not vanish on the diagonal, which
//! the formal definition of a weighting function requires; they are still
//! exposed (flagged `non_vanishing_on_diagonal`) but are rejected by the
//! stability presets.

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use thiserror::Error;

use crate::diagram::PersistenceDiagram;
use crate::util::neumaier_sum;

/// Signature of a user-supplied weighting function `kappa(birth, death)`.
pub type CustomWeightFn = Arc<dyn Fn(f64, f64) -> f64 + Send + Sync>;

/// Births probed when validating that a custom weight vanishes on the
/// diagonal.
const DIAGONAL_PROBE: [f64; 9] = [-8.0, -3.5, -1.0, 0.0, 0.25, 0.7, 2.0, 5.25, 10.0];
const DIAGONAL_PROBE_TOL: f64 = 1e-9;

#[derive(Debug, Error)]
pub enum WeightError {
    #[error("degenerate normalizer: {reason}")]
    DegenerateNormalizer { reason: String },
    #[error("custom weight does not vanish on the diagonal: kappa({birth}, {birth}) = {value}")]
    CustomNotVanishing { birth: f64, value: f64 },
    #[error("unknown weight kind `{0}` (expected none|life|midlife|entropy|mullife|normlife)")]
    UnknownKind(String),
}

/// The catalogue of weighting functions.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WeightKind {
    /// `kappa = 1`: the curve is a smoothed Betti curve.
    Unweighted,
    /// `kappa = (d-b) / L_D`: smoothed life curve.
    Life,
    /// `kappa = (b+d) / m_sum`: smoothed midlife curve.
    Midlife,
    /// `kappa = -p log p` with `p = (d-b)/L_D`: smoothed life entropy.
    LifeEntropy,
    /// `kappa = d / b`: smoothed multiplicative life (births must be > 0).
    MultiplicativeLife,
    /// Same values as `Life`; kept distinct because the normalized-lifespan
    /// stability theorem attaches its own constant.
    NormalizedLife,
    /// User-supplied function.
    Custom,
}

impl WeightKind {
    /// The CLI token for this kind.
    pub fn token(&self) -> &'static str {
        match self {
            WeightKind::Unweighted => "none",
            WeightKind::Life => "life",
            WeightKind::Midlife => "midlife",
            WeightKind::LifeEntropy => "entropy",
            WeightKind::MultiplicativeLife => "mullife",
            WeightKind::NormalizedLife => "normlife",
            WeightKind::Custom => "custom",
        }
    }
}

impl fmt::Display for WeightKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.token())
    }
}

impl FromStr for WeightKind {
    type Err = WeightError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "none" => Ok(WeightKind::Unweighted),
            "life" => Ok(WeightKind::Life),
            "midlife" => Ok(WeightKind::Midlife),
            "entropy" => Ok(WeightKind::LifeEntropy),
            "mullife" => Ok(WeightKind::MultiplicativeLife),
            "normlife" => Ok(WeightKind::NormalizedLife),
            other => Err(WeightError::UnknownKind(other.to_string())),
        }
    }
}

/// Declarative choice of weighting function, prior to seeing a diagram.
#[derive(Clone)]
pub struct WeightSpec {
    kind: WeightKind,
    custom: Option<CustomPayload>,
}

#[derive(Clone)]
struct CustomPayload {
    func: CustomWeightFn,
    lipschitz: Option<f64>,
}

impl fmt::Debug for WeightSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut s = f.debug_struct("WeightSpec");
        s.field("kind", &self.kind);
        if let Some(c) = &self.custom {
            s.field("custom_lipschitz", &c.lipschitz);
        }
        s.finish()
    }
}

impl WeightSpec {
    fn builtin(kind: WeightKind) -> Self {
        WeightSpec { kind, custom: None }
    }

    pub fn unweighted() -> Self {
        Self::builtin(WeightKind::Unweighted)
    }

    pub fn life() -> Self {
        Self::builtin(WeightKind::Life)
    }

    pub fn midlife() -> Self {
        Self::builtin(WeightKind::Midlife)
    }

    pub fn life_entropy() -> Self {
        Self::builtin(WeightKind::LifeEntropy)
    }

    pub fn multiplicative_life() -> Self {
        Self::builtin(WeightKind::MultiplicativeLife)
    }

    pub fn normalized_life() -> Self {
        Self::builtin(WeightKind::NormalizedLife)
    }

    /// Build a custom weight. The function is probed on a grid of diagonal
    /// points and rejected unless `kappa(b, b) = 0` everywhere on the grid.
    /// `lipschitz` is the constant `K` with
    /// `|kappa(x,y) - kappa(w,z)| <= K * max(|x-w|, |y-z|)`, when known.
    pub fn custom(func: CustomWeightFn, lipschitz: Option<f64>) -> Result<Self, WeightError> {
        for &b in &DIAGONAL_PROBE {
            let value = func(b, b);
            if value.is_nan() || value.abs() > DIAGONAL_PROBE_TOL {
                return Err(WeightError::CustomNotVanishing { birth: b, value });
            }
        }
        Ok(WeightSpec {
            kind: WeightKind::Custom,
            custom: Some(CustomPayload { func, lipschitz }),
        })
    }

    /// Built-in spec from a CLI token.
    pub fn from_token(token: &str) -> Result<Self, WeightError> {
        Ok(Self::builtin(token.parse()?))
    }

    pub fn kind(&self) -> WeightKind {
        self.kind
    }

    /// The user-declared Lipschitz constant of a custom weight.
    pub fn custom_lipschitz(&self) -> Option<f64> {
        self.custom.as_ref().and_then(|c| c.lipschitz)
    }
}

/// Per-point weights of a spec resolved against one diagram, aligned with
/// the diagram's canonical point order.
#[derive(Debug, Clone, PartialEq)]
pub struct ResolvedWeights {
    kind: WeightKind,
    values: Vec<f64>,
    max_abs: f64,
    normalizer: f64,
    non_vanishing_on_diagonal: bool,
}

impl ResolvedWeights {
    fn from_values(kind: WeightKind, values: Vec<f64>, normalizer: f64, flagged: bool) -> Self {
        let max_abs = values.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        ResolvedWeights {
            kind,
            values,
            max_abs,
            normalizer,
            non_vanishing_on_diagonal: flagged,
        }
    }

    /// The raw lifespan weight `kappa(b, d) = d - b`, the weight the
    /// lifespan stability theorem is stated for.
    pub fn raw_lifespan(diagram: &PersistenceDiagram) -> Self {
        let values: Vec<f64> = diagram.points().iter().map(|p| p.lifespan()).collect();
        Self::from_values(WeightKind::Custom, values, 1.0, false)
    }

    pub fn kind(&self) -> WeightKind {
        self.kind
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// `max |kappa|` over the diagram (`M_D`); 0 for the empty diagram.
    pub fn max_abs(&self) -> f64 {
        self.max_abs
    }

    /// The normalizer used: `L_D`, `m_sum`, or 1.
    pub fn normalizer(&self) -> f64 {
        self.normalizer
    }

    /// True for weights (midlife, multiplicative life) that violate
    /// `kappa(b, b) = 0`; such weights are excluded from stability runs.
    pub fn non_vanishing_on_diagonal(&self) -> bool {
        self.non_vanishing_on_diagonal
    }

    /// True if some weights are positive and some negative, in which case
    /// the closed-form L1 norm is only an upper bound.
    pub fn mixed_sign(&self) -> bool {
        let any_pos = self.values.iter().any(|&v| v > 0.0);
        let any_neg = self.values.iter().any(|&v| v < 0.0);
        any_pos && any_neg
    }
}

/// Resolve a weight spec against a diagram.
pub fn resolve(
    diagram: &PersistenceDiagram,
    spec: &WeightSpec,
) -> Result<ResolvedWeights, WeightError> {
    let points = diagram.points();
    match spec.kind {
        WeightKind::Unweighted => Ok(ResolvedWeights::from_values(
            spec.kind,
            vec![1.0; points.len()],
            1.0,
            false,
        )),
        WeightKind::Life | WeightKind::NormalizedLife => {
            let total = diagram.total_lifespan();
            let values = points.iter().map(|p| p.lifespan() / total).collect();
            Ok(ResolvedWeights::from_values(
                spec.kind,
                if points.is_empty() {
                    Vec::new()
                } else {
                    values
                },
                if points.is_empty() { 1.0 } else { total },
                false,
            ))
        }
        WeightKind::LifeEntropy => {
            let total = diagram.total_lifespan();
            let values = points
                .iter()
                .map(|p| {
                    let p_i = p.lifespan() / total;
                    // continuous extension: p log p -> 0 as p -> 0
                    (-p_i * p_i.ln()).max(0.0)
                })
                .collect();
            Ok(ResolvedWeights::from_values(
                spec.kind,
                if points.is_empty() {
                    Vec::new()
                } else {
                    values
                },
                if points.is_empty() { 1.0 } else { total },
                false,
            ))
        }
        WeightKind::Midlife => {
            let m_sum = neumaier_sum(points.iter().map(|p| p.midlife_sum()));
            if !points.is_empty() && m_sum == 0.0 {
                return Err(WeightError::DegenerateNormalizer {
                    reason: "midlife normalizer m_sum is zero".to_string(),
                });
            }
            let values = points.iter().map(|p| p.midlife_sum() / m_sum).collect();
            Ok(ResolvedWeights::from_values(
                spec.kind,
                if points.is_empty() {
                    Vec::new()
                } else {
                    values
                },
                if points.is_empty() { 1.0 } else { m_sum },
                true,
            ))
        }
        WeightKind::MultiplicativeLife => {
            if let Some(p) = points.iter().find(|p| p.birth() <= 0.0) {
                return Err(WeightError::DegenerateNormalizer {
                    reason: format!(
                        "multiplicative life requires strictly positive births, found {}",
                        p.birth()
                    ),
                });
            }
            let values = points.iter().map(|p| p.death() / p.birth()).collect();
            Ok(ResolvedWeights::from_values(spec.kind, values, 1.0, true))
        }
        WeightKind::Custom => {
            let payload = spec
                .custom
                .as_ref()
                .expect("custom spec always carries its function");
            let values = points
                .iter()
                .map(|p| (payload.func)(p.birth(), p.death()))
                .collect();
            Ok(ResolvedWeights::from_values(spec.kind, values, 1.0, false))
        }
    }
}

/// A constant `K` with `|kappa_C(x,y) - kappa_D(w,z)| <= K ||(x,y)-(w,z)||_inf`
/// when one is statically known for the pair of specs:
/// matching unweighted specs give 0, life weights with equal totals give
/// `2 / L`, and a shared custom function passes through its declared
/// constant. `None` means callers must fall back to the matching-dependent
/// general-weights bound.
pub fn cross_lipschitz_bound(
    spec_c: &WeightSpec,
    c: &PersistenceDiagram,
    spec_d: &WeightSpec,
    d: &PersistenceDiagram,
) -> Option<f64> {
    use WeightKind::*;
    match (spec_c.kind, spec_d.kind) {
        (Unweighted, Unweighted) => Some(0.0),
        (Life | NormalizedLife, Life | NormalizedLife) => {
            let l_c = c.total_lifespan();
            let l_d = d.total_lifespan();
            if l_c > 0.0 && l_c == l_d {
                Some(2.0 / l_c)
            } else {
                None
            }
        }
        (Custom, Custom) => {
            let pc = spec_c.custom.as_ref()?;
            let pd = spec_d.custom.as_ref()?;
            if Arc::ptr_eq(&pc.func, &pd.func) {
                pc.lipschitz.or(pd.lipschitz)
            } else {
                None
            }
        }
        _ => None,
    }
}
