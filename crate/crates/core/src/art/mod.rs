//! Low-complexity drawings: generative scaffolds scored by description length.
//!
//! Two procedures produce drawings whose whole point is that they are cheap
//! to describe: a face scaffold built from three superimposed line grids
//! ([`face_grid`]) and a fractal arrangement of circles ([`fractal_circles`]).
//! [`encoding_report`] prices a drawing two ways: naively, coordinate by
//! coordinate at a fixed grid resolution, and programmatically, as the few
//! bits needed to name the generating procedure and its depth. The gap
//! between the two is the compressibility a patient observer can discover.
//!
//! Every generated primitive carries a construction trace, so the geometric
//! claims (midlines really are equidistant from their parents, circle
//! centers really sit on intersection points) are checkable after the fact.

mod circles;
mod face;

pub use circles::fractal_circles;
pub use face::{face_grid, face_grid_with, BisectionCandidate, SlopeFamily};

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Naive encodings quantize every coordinate to a 2^10 grid per axis.
pub const NAIVE_COORDINATE_BITS: u64 = 10;
/// Three primitive kinds fit in a two-bit tag.
pub const PRIMITIVE_TAG_BITS: u64 = 2;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ArtError {
    #[error("selection mask has {got} entries, drawing has {expected} primitives")]
    MaskLength { expected: usize, got: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub fn distance(self, other: Point) -> f64 {
        (self.x - other.x).hypot(self.y - other.y)
    }
}

/// A drawable element. Arcs carry their geometry inline; the circle they
/// were cut from is named in the construction trace, so masking a drawing
/// never leaves a dangling reference.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Primitive {
    Segment { a: Point, b: Point },
    Circle { center: Point, radius: f64 },
    /// Counterclockwise from `start_angle` to `end_angle`, with
    /// `start_angle < end_angle <= start_angle + 2π`.
    Arc { center: Point, radius: f64, start_angle: f64, end_angle: f64 },
}

impl Primitive {
    /// Endpoints of an arc; `None` for other primitives.
    pub fn arc_endpoints(&self) -> Option<(Point, Point)> {
        match *self {
            Primitive::Arc { center, radius, start_angle, end_angle } => {
                let at = |angle: f64| Point {
                    x: center.x + radius * angle.cos(),
                    y: center.y + radius * angle.sin(),
                };
                Some((at(start_angle), at(end_angle)))
            }
            _ => None,
        }
    }
}

/// The program that produced a drawing, priced by [`encoding_report`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "procedure", rename_all = "snake_case")]
pub enum Generator {
    FaceGrid { bisection_depth: u32 },
    /// Face scaffold with a non-default bisection selection: one accept or
    /// reject decision per offered neighbor pair.
    FaceGridSelected { bisection_depth: u32, decisions: u64 },
    FractalCircles { depth: u32 },
    /// A per-primitive keep mask applied over a base drawing's scaffold.
    /// Trace indices inside refer to the unmasked scaffold.
    Masked { base: Box<Generator>, scaffold_size: u64 },
}

/// Which construction rule produced one primitive. Indices refer to earlier
/// primitives of the same (unmasked) drawing.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "rule", rename_all = "snake_case")]
pub enum Trace {
    /// Grid line of the initial scaffold; intercept is `sixteenths / 16`.
    GridLine { family: SlopeFamily, sixteenths: i32 },
    /// Line inserted equidistant between two parallel parents.
    MidLine { family: SlopeFamily, round: u32, parent_a: usize, parent_b: usize },
    /// The outer frame circle.
    FrameCircle,
    /// Circle of frame size centered on the frame's leftmost point.
    LeftmostCircle { parent: usize },
    /// Equal-size circle centered where two equal parents meet.
    EqualCircle { parent_a: usize, parent_b: usize, level: u32 },
    /// Half-size circle centered where two equal parents meet.
    HalfCircle { parent_a: usize, parent_b: usize, level: u32 },
    /// Piece of `circle` between two consecutive intersection points.
    CircleArc { circle: usize },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    pub generator: Generator,
    /// One trace per primitive, same order.
    pub traces: Vec<Trace>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Drawing {
    pub primitives: Vec<Primitive>,
    /// Present on everything this module generates; absent on hand-built
    /// drawings, which can then only be priced naively.
    pub provenance: Option<Provenance>,
}

impl Drawing {
    pub fn empty() -> Drawing {
        Drawing { primitives: Vec::new(), provenance: None }
    }

    pub fn segment_count(&self) -> usize {
        self.primitives.iter().filter(|p| matches!(p, Primitive::Segment { .. })).count()
    }

    pub fn circle_count(&self) -> usize {
        self.primitives.iter().filter(|p| matches!(p, Primitive::Circle { .. })).count()
    }

    pub fn arc_count(&self) -> usize {
        self.primitives.iter().filter(|p| matches!(p, Primitive::Arc { .. })).count()
    }

    /// Axis-aligned bounds over all primitives; `None` when empty.
    pub fn bounding_box(&self) -> Option<(Point, Point)> {
        let mut lo = Point { x: f64::INFINITY, y: f64::INFINITY };
        let mut hi = Point { x: f64::NEG_INFINITY, y: f64::NEG_INFINITY };
        let mut cover = |p: Point| {
            lo.x = lo.x.min(p.x);
            lo.y = lo.y.min(p.y);
            hi.x = hi.x.max(p.x);
            hi.y = hi.y.max(p.y);
        };
        for prim in &self.primitives {
            match *prim {
                Primitive::Segment { a, b } => {
                    cover(a);
                    cover(b);
                }
                Primitive::Circle { center, radius }
                | Primitive::Arc { center, radius, .. } => {
                    cover(Point { x: center.x - radius, y: center.y - radius });
                    cover(Point { x: center.x + radius, y: center.y + radius });
                }
            }
        }
        if self.primitives.is_empty() {
            None
        } else {
            Some((lo, hi))
        }
    }
}

/// Keeps the primitives where `keep` is true. The result's generator wraps
/// the original, charging one decision bit per scaffold primitive.
pub fn apply_mask(drawing: &Drawing, keep: &[bool]) -> Result<Drawing, ArtError> {
    if keep.len() != drawing.primitives.len() {
        return Err(ArtError::MaskLength { expected: drawing.primitives.len(), got: keep.len() });
    }
    let primitives: Vec<Primitive> = drawing
        .primitives
        .iter()
        .zip(keep)
        .filter(|(_, &k)| k)
        .map(|(p, _)| *p)
        .collect();
    let provenance = drawing.provenance.as_ref().map(|prov| Provenance {
        generator: Generator::Masked {
            base: Box::new(prov.generator.clone()),
            scaffold_size: drawing.primitives.len() as u64,
        },
        traces: prov.traces.iter().zip(keep).filter(|(_, &k)| k).map(|(t, _)| *t).collect(),
    });
    Ok(Drawing { primitives, provenance })
}

/// Two prices for one drawing, in bits.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EncodingReport {
    /// Tag plus quantized coordinates for every primitive.
    pub naive_bits: u64,
    /// Procedure choice, unary-coded depth, and any selection decisions.
    /// Absent when the drawing has no provenance.
    pub programmatic_bits: Option<u64>,
    pub segments: usize,
    pub circles: usize,
    pub arcs: usize,
    /// True when provenance was missing and only the naive price applies.
    pub naive_only: bool,
}

impl EncodingReport {
    pub fn ratio(&self) -> Option<f64> {
        match (self.programmatic_bits, self.naive_bits) {
            (Some(p), n) if n > 0 => Some(p as f64 / n as f64),
            _ => None,
        }
    }
}

fn naive_primitive_bits(p: &Primitive) -> u64 {
    let coordinates = match p {
        Primitive::Segment { .. } => 4, // two endpoints
        Primitive::Circle { .. } => 3,  // center and radius
        Primitive::Arc { .. } => 5,     // center, radius, two angles
    };
    PRIMITIVE_TAG_BITS + coordinates * NAIVE_COORDINATE_BITS
}

fn generator_bits(g: &Generator) -> u64 {
    match g {
        // One bit picks the procedure, depth is coded in unary (depth + 1).
        Generator::FaceGrid { bisection_depth } => 1 + u64::from(*bisection_depth) + 1,
        Generator::FaceGridSelected { bisection_depth, decisions } => {
            1 + u64::from(*bisection_depth) + 1 + decisions
        }
        Generator::FractalCircles { depth } => 1 + u64::from(*depth) + 1,
        Generator::Masked { base, scaffold_size } => generator_bits(base) + scaffold_size,
    }
}

/// Prices a drawing naively and, when provenance is present, as its
/// generating program. An empty drawing costs nothing either way.
pub fn encoding_report(drawing: &Drawing) -> EncodingReport {
    if drawing.primitives.is_empty() {
        return EncodingReport {
            naive_bits: 0,
            programmatic_bits: Some(0),
            segments: 0,
            circles: 0,
            arcs: 0,
            naive_only: false,
        };
    }
    let naive_bits = drawing.primitives.iter().map(naive_primitive_bits).sum();
    let programmatic_bits = drawing.provenance.as_ref().map(|p| generator_bits(&p.generator));
    EncodingReport {
        naive_bits,
        programmatic_bits,
        segments: drawing.segment_count(),
        circles: drawing.circle_count(),
        arcs: drawing.arc_count(),
        naive_only: drawing.provenance.is_none(),
    }
}

/// Renders the drawing as standalone vector graphics text. Output is a
/// deterministic function of the drawing.
pub fn to_svg(drawing: &Drawing) -> String {
    use std::fmt::Write;

    let (lo, hi) = match drawing.bounding_box() {
        Some(b) => b,
        None => {
            return "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"0 0 1 1\"/>\n".into()
        }
    };
    let width = (hi.x - lo.x).max(1e-9);
    let height = (hi.y - lo.y).max(1e-9);
    let margin = 0.05 * width.max(height);
    let stroke = 0.004 * width.max(height);
    let mut out = String::new();
    // The drawing's y axis points up; flip it so the picture is not mirrored.
    writeln!(
        out,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"{} {} {} {}\">",
        lo.x - margin,
        -hi.y - margin,
        width + 2.0 * margin,
        height + 2.0 * margin
    )
    .unwrap();
    writeln!(
        out,
        "<g fill=\"none\" stroke=\"black\" stroke-width=\"{stroke}\" transform=\"scale(1,-1)\">"
    )
    .unwrap();
    for prim in &drawing.primitives {
        match *prim {
            Primitive::Segment { a, b } => {
                writeln!(
                    out,
                    "<line x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\"/>",
                    a.x, a.y, b.x, b.y
                )
                .unwrap();
            }
            Primitive::Circle { center, radius } => {
                writeln!(out, "<circle cx=\"{}\" cy=\"{}\" r=\"{}\"/>", center.x, center.y, radius)
                    .unwrap();
            }
            Primitive::Arc { radius, start_angle, end_angle, .. } => {
                let (start, end) = prim.arc_endpoints().expect("arc has endpoints");
                let large = if end_angle - start_angle > std::f64::consts::PI { 1 } else { 0 };
                writeln!(
                    out,
                    "<path d=\"M {} {} A {} {} 0 {} 1 {} {}\"/>",
                    start.x, start.y, radius, radius, large, end.x, end.y
                )
                .unwrap();
            }
        }
    }
    writeln!(out, "</g>").unwrap();
    writeln!(out, "</svg>").unwrap();
    out
}
