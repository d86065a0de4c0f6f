//! The face scaffold: three superimposed line grids over a unit square.
//!
//! The square's sides are split into 16 equal intervals and boundary points
//! are joined by every line of slope ±1, ±1/8, and ±8 whose crossings of the
//! square lie on those interval boundaries. Finer detail comes from
//! bisection rounds that insert, between selected neighboring parallel
//! lines, a new line equidistant to both. Finally all y coordinates shrink
//! by 15/16. Which neighbor pairs get bisected is left open by the source
//! construction; the default here is every adjacent pair in every family,
//! and [`face_grid_with`] exposes the choice.

use serde::{Deserialize, Serialize};

use super::{Drawing, Generator, Point, Primitive, Provenance, Trace};

/// Interval count along each square side.
const INTERVALS: i32 = 16;
/// Final vertical compression factor, 1 - 2^-4.
const VERTICAL_COMPRESSION: f64 = 15.0 / 16.0;

/// One of the six line directions in the scaffold.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SlopeFamily {
    DiagonalUp,
    DiagonalDown,
    ShallowUp,
    ShallowDown,
    SteepUp,
    SteepDown,
}

impl SlopeFamily {
    pub const ALL: [SlopeFamily; 6] = [
        SlopeFamily::DiagonalUp,
        SlopeFamily::DiagonalDown,
        SlopeFamily::ShallowUp,
        SlopeFamily::ShallowDown,
        SlopeFamily::SteepUp,
        SlopeFamily::SteepDown,
    ];

    pub fn slope(self) -> f64 {
        match self {
            SlopeFamily::DiagonalUp => 1.0,
            SlopeFamily::DiagonalDown => -1.0,
            SlopeFamily::ShallowUp => 0.125,
            SlopeFamily::ShallowDown => -0.125,
            SlopeFamily::SteepUp => 8.0,
            SlopeFamily::SteepDown => -8.0,
        }
    }

    /// Steep lines are handled as shallow lines with x and y swapped.
    fn is_steep(self) -> bool {
        matches!(self, SlopeFamily::SteepUp | SlopeFamily::SteepDown)
    }

    /// Slope in clip space: the line's own slope, or its reciprocal for the
    /// steep families (x = y/8 + c).
    fn clip_slope(self) -> f64 {
        match self {
            SlopeFamily::SteepUp => 0.125,
            SlopeFamily::SteepDown => -0.125,
            other => other.slope(),
        }
    }

    /// Intercepts (in sixteenths) whose lines cross the square's interior
    /// with every boundary crossing on an interval boundary. The excluded
    /// extremes only touch a corner.
    fn intercept_range(self) -> std::ops::RangeInclusive<i32> {
        match self {
            SlopeFamily::DiagonalUp => -(INTERVALS - 1)..=(INTERVALS - 1),
            SlopeFamily::DiagonalDown => 1..=(2 * INTERVALS - 1),
            SlopeFamily::ShallowUp | SlopeFamily::SteepUp => -1..=(INTERVALS - 1),
            SlopeFamily::ShallowDown | SlopeFamily::SteepDown => 1..=(INTERVALS + 1),
        }
    }
}

/// Clips y = slope x + intercept to the unit square. `None` if the line
/// meets the square in fewer than two points.
fn clip_unit_square(slope: f64, intercept: f64) -> Option<(Point, Point)> {
    const EDGE: f64 = 1e-12;
    let mut points: Vec<Point> = Vec::with_capacity(2);
    let mut consider = |x: f64, y: f64| {
        if (-EDGE..=1.0 + EDGE).contains(&x) && (-EDGE..=1.0 + EDGE).contains(&y) {
            let p = Point { x: x.clamp(0.0, 1.0), y: y.clamp(0.0, 1.0) };
            if !points.iter().any(|q| q.distance(p) < 1e-9) {
                points.push(p);
            }
        }
    };
    consider(0.0, intercept);
    consider(1.0, slope + intercept);
    if slope != 0.0 {
        consider(-intercept / slope, 0.0);
        consider((1.0 - intercept) / slope, 1.0);
    }
    if points.len() < 2 {
        return None;
    }
    points.sort_by(|a, b| a.x.total_cmp(&b.x).then(a.y.total_cmp(&b.y)));
    Some((points[0], points[points.len() - 1]))
}

/// The family line with the given intercept, clipped to the unit square.
fn family_line(family: SlopeFamily, intercept: f64) -> Option<(Point, Point)> {
    let (a, b) = clip_unit_square(family.clip_slope(), intercept)?;
    if family.is_steep() {
        // Undo the transposition; reorder so endpoint order stays canonical.
        let (mut a, mut b) = (Point { x: a.y, y: a.x }, Point { x: b.y, y: b.x });
        if (b.x, b.y) < (a.x, a.y) {
            std::mem::swap(&mut a, &mut b);
        }
        Some((a, b))
    } else {
        Some((a, b))
    }
}

/// A neighboring parallel pair offered for bisection.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BisectionCandidate {
    /// Bisection round, starting at 1.
    pub round: u32,
    pub family: SlopeFamily,
    pub lower_intercept: f64,
    pub upper_intercept: f64,
}

/// Full scaffold with the default selection: every adjacent parallel pair in
/// every family is bisected each round.
pub fn face_grid(bisection_depth: u32) -> Drawing {
    face_grid_with(bisection_depth, |_| true)
}

/// Scaffold with an explicit say over which neighbor pairs get a midline.
pub fn face_grid_with<F>(bisection_depth: u32, mut select: F) -> Drawing
where
    F: FnMut(&BisectionCandidate) -> bool,
{
    let mut primitives: Vec<Primitive> = Vec::new();
    let mut traces: Vec<Trace> = Vec::new();
    // Per family: (intercept, primitive index), kept sorted by intercept.
    let mut families: Vec<(SlopeFamily, Vec<(f64, usize)>)> = Vec::new();

    for family in SlopeFamily::ALL {
        let mut lines = Vec::new();
        for sixteenths in family.intercept_range() {
            let intercept = f64::from(sixteenths) / f64::from(INTERVALS);
            if let Some((a, b)) = family_line(family, intercept) {
                lines.push((intercept, primitives.len()));
                primitives.push(Primitive::Segment { a, b });
                traces.push(Trace::GridLine { family, sixteenths });
            }
        }
        families.push((family, lines));
    }

    let mut decisions: u64 = 0;
    let mut all_accepted = true;
    for round in 1..=bisection_depth {
        for (family, lines) in &mut families {
            let mut inserted = Vec::new();
            for pair in lines.windows(2) {
                let (lower, parent_a) = pair[0];
                let (upper, parent_b) = pair[1];
                decisions += 1;
                let candidate = BisectionCandidate {
                    round,
                    family: *family,
                    lower_intercept: lower,
                    upper_intercept: upper,
                };
                if !select(&candidate) {
                    all_accepted = false;
                    continue;
                }
                let mid = 0.5 * (lower + upper);
                if let Some((a, b)) = family_line(*family, mid) {
                    inserted.push((mid, primitives.len()));
                    primitives.push(Primitive::Segment { a, b });
                    traces.push(Trace::MidLine { family: *family, round, parent_a, parent_b });
                }
            }
            lines.extend(inserted);
            lines.sort_by(|p, q| p.0.total_cmp(&q.0));
        }
    }

    for prim in &mut primitives {
        if let Primitive::Segment { a, b } = prim {
            a.y *= VERTICAL_COMPRESSION;
            b.y *= VERTICAL_COMPRESSION;
        }
    }

    let generator = if all_accepted {
        Generator::FaceGrid { bisection_depth }
    } else {
        Generator::FaceGridSelected { bisection_depth, decisions }
    };
    Drawing { primitives, provenance: Some(Provenance { generator, traces }) }
}
