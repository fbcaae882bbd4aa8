//! Persistence diagrams as canonical finite multisets.
//!
//! A diagram point is a `(birth, death)` pair strictly above the diagonal;
//! a diagram is a multiset of points kept in lexicographic order so that
//! multiset equality is plain list equality. CSV ingestion and the lifespan
//! statistics consumed by the stability constants live here.

use std::io::{BufRead, BufReader, Read};

use thiserror::Error;

use crate::util::{fnv1a64, neumaier_sum};

#[derive(Debug, Error)]
pub enum DiagramError {
    #[error("line {line}: malformed row (expected `birth,death`)")]
    Parse { line: usize },
    #[error("line {line}: invalid point (death must exceed birth, coordinates finite)")]
    InvalidPoint { line: usize },
    #[error("invalid point ({birth}, {death}): death must exceed birth and both must be finite")]
    Point { birth: f64, death: f64 },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// Supported on-disk encodings for diagrams.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DiagramFormat {
    /// One `birth,death` pair per line; `#` comments; optional
    /// `birth,death` header; LF or CRLF endings.
    Csv,
}

/// A single off-diagonal point of a persistence diagram.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DiagramPoint {
    birth: f64,
    death: f64,
}

impl DiagramPoint {
    /// Rejects non-finite coordinates and points on or below the diagonal.
    /// Diagrams live strictly above the diagonal and every downstream
    /// constant divides by lifespans, so failing here beats propagating
    /// NaN later.
    pub fn new(birth: f64, death: f64) -> Result<Self, DiagramError> {
        if !birth.is_finite() || !death.is_finite() || death <= birth {
            return Err(DiagramError::Point { birth, death });
        }
        Ok(DiagramPoint { birth, death })
    }

    pub fn birth(&self) -> f64 {
        self.birth
    }

    pub fn death(&self) -> f64 {
        self.death
    }

    /// `death - birth`; positive by construction.
    pub fn lifespan(&self) -> f64 {
        self.death - self.birth
    }

    /// `birth + death`.
    pub fn midlife_sum(&self) -> f64 {
        self.birth + self.death
    }
}

/// A finite multiset of diagram points in canonical (lexicographic) order.
///
/// Immutable after construction; two diagrams are equal as multisets iff
/// their point lists are equal element by element.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct PersistenceDiagram {
    points: Vec<DiagramPoint>,
}

impl PersistenceDiagram {
    /// Empty diagram.
    pub fn empty() -> Self {
        PersistenceDiagram { points: Vec::new() }
    }

    /// Build from points in any order; the list is sorted into canonical
    /// order and duplicates are preserved.
    pub fn new(mut points: Vec<DiagramPoint>) -> Self {
        points.sort_by(|p, q| {
            p.birth
                .total_cmp(&q.birth)
                .then_with(|| p.death.total_cmp(&q.death))
        });
        PersistenceDiagram { points }
    }

    /// Convenience constructor from raw pairs.
    pub fn from_pairs(pairs: &[(f64, f64)]) -> Result<Self, DiagramError> {
        let points = pairs
            .iter()
            .map(|&(b, d)| DiagramPoint::new(b, d))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Self::new(points))
    }

    pub fn points(&self) -> &[DiagramPoint] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Total lifespan: sum of `death - birth` over all points, 0 if empty.
    pub fn total_lifespan(&self) -> f64 {
        neumaier_sum(self.points.iter().map(|p| p.lifespan()))
    }

    /// Minimum lifespan over all points; `+inf` for the empty diagram
    /// (so its reciprocal contributes 0 downstream).
    pub fn min_lifespan(&self) -> f64 {
        self.points
            .iter()
            .map(|p| p.lifespan())
            .fold(f64::INFINITY, f64::min)
    }

    /// Smallest birth; `None` for the empty diagram.
    pub fn min_birth(&self) -> Option<f64> {
        // canonical order puts the smallest birth first
        self.points.first().map(|p| p.birth)
    }

    /// Largest death; `None` for the empty diagram.
    pub fn max_death(&self) -> Option<f64> {
        self.points
            .iter()
            .map(|p| p.death)
            .fold(None, |acc: Option<f64>, d| {
                Some(acc.map_or(d, |m| m.max(d)))
            })
    }

    /// Multiset union.
    pub fn union(&self, other: &PersistenceDiagram) -> PersistenceDiagram {
        let mut points = self.points.clone();
        points.extend_from_slice(&other.points);
        PersistenceDiagram::new(points)
    }

    /// Stable 64-bit digest of the canonical point list; used to tag
    /// emitted files with the exact input they came from.
    pub fn digest(&self) -> u64 {
        fnv1a64(self.points.iter().flat_map(|p| {
            p.birth
                .to_bits()
                .to_le_bytes()
                .into_iter()
                .chain(p.death.to_bits().to_le_bytes())
        }))
    }

    /// Canonical CSV serialization; `load_diagram` of the output
    /// reproduces the same multiset.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("birth,death\n");
        for p in &self.points {
            out.push_str(&format!("{},{}\n", p.birth, p.death));
        }
        out
    }
}

/// `min{delta_C, delta_D, 1}`: the joint minimum lifespan entering the
/// unweighted stability constant. Always in `(0, 1]`.
pub fn joint_min_lifespan(c: &PersistenceDiagram, d: &PersistenceDiagram) -> f64 {
    c.min_lifespan().min(d.min_lifespan()).min(1.0)
}

/// Parse a diagram from a byte stream.
///
/// CSV rules: one `birth,death` pair per line with `.` decimals, an
/// optional verbatim `birth,death` header, `#` comment lines, blank lines
/// ignored, LF or CRLF endings. Points on or below the diagonal and
/// non-finite coordinates (including infinite deaths from raw persistence
/// output) are rejected with the offending line number.
pub fn load_diagram<R: Read>(
    source: R,
    format: DiagramFormat,
) -> Result<PersistenceDiagram, DiagramError> {
    match format {
        DiagramFormat::Csv => parse_csv(source),
    }
}

fn parse_csv<R: Read>(source: R) -> Result<PersistenceDiagram, DiagramError> {
    let reader = BufReader::new(source);
    let mut points = Vec::new();
    let mut seen_data = false;
    for (idx, line) in reader.lines().enumerate() {
        let line_no = idx + 1;
        let raw = line?;
        let line = raw.strip_suffix('\r').unwrap_or(&raw);
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        if trimmed == "birth,death" && !seen_data {
            seen_data = true; // a second header would be a parse error
            continue;
        }
        seen_data = true;
        let mut fields = trimmed.split(',');
        let (b, d) = match (fields.next(), fields.next(), fields.next()) {
            (Some(b), Some(d), None) => (b.trim(), d.trim()),
            _ => return Err(DiagramError::Parse { line: line_no }),
        };
        let birth: f64 = b
            .parse()
            .map_err(|_| DiagramError::Parse { line: line_no })?;
        let death: f64 = d
            .parse()
            .map_err(|_| DiagramError::Parse { line: line_no })?;
        let point = DiagramPoint::new(birth, death)
            .map_err(|_| DiagramError::InvalidPoint { line: line_no })?;
        points.push(point);
    }
    Ok(PersistenceDiagram::new(points))
}
