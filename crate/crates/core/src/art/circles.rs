//! The fractal-circle scaffold.
//!
//! A frame circle's leftmost point is the center of a second circle of the
//! same size. Wherever two equal circles touch or intersect, that point
//! becomes the center of two more circles, one equal and one half the size,
//! recursively to the requested depth. Coincident circles are merged. After
//! the circles are fixed, every circle is cut into arcs at the points where
//! other circles touch or intersect it; circles met by fewer than two such
//! points stay whole and contribute no arcs.

use std::collections::BTreeSet;

use super::{Drawing, Generator, Point, Primitive, Provenance, Trace};

/// Coincidence tolerance for points, radii, and tangency decisions.
const MERGE_TOLERANCE: f64 = 1e-9;

const FRAME_CENTER: Point = Point { x: 0.0, y: 0.0 };
const FRAME_RADIUS: f64 = 1.0;

#[derive(Debug, Clone, Copy)]
struct CircleRec {
    center: Point,
    radius: f64,
}

fn quantize(value: f64) -> i64 {
    (value / MERGE_TOLERANCE).round() as i64
}

fn circle_key(c: &CircleRec) -> (i64, i64, i64) {
    (quantize(c.center.x), quantize(c.center.y), quantize(c.radius))
}

/// Intersection or touch points of two circles, in a deterministic order.
/// Concentric circles yield none.
fn intersections(a: &CircleRec, b: &CircleRec) -> Vec<Point> {
    let d = a.center.distance(b.center);
    if d < MERGE_TOLERANCE {
        return Vec::new();
    }
    let sum = a.radius + b.radius;
    let gap = (a.radius - b.radius).abs();
    if d > sum + MERGE_TOLERANCE || d < gap - MERGE_TOLERANCE {
        return Vec::new();
    }
    let ux = (b.center.x - a.center.x) / d;
    let uy = (b.center.y - a.center.y) / d;
    // Externally or internally tangent: a single touch point.
    if (d - sum).abs() <= MERGE_TOLERANCE || (d - gap).abs() <= MERGE_TOLERANCE {
        let sign = if (d - sum).abs() <= MERGE_TOLERANCE { 1.0 } else {
            // Internal touch lies past the smaller center, on the far side
            // of whichever circle is bigger.
            if a.radius >= b.radius { 1.0 } else { -1.0 }
        };
        return vec![Point {
            x: a.center.x + sign * a.radius * ux,
            y: a.center.y + sign * a.radius * uy,
        }];
    }
    let along = (d * d + a.radius * a.radius - b.radius * b.radius) / (2.0 * d);
    let off_sq = a.radius * a.radius - along * along;
    let off = off_sq.max(0.0).sqrt();
    let base = Point { x: a.center.x + along * ux, y: a.center.y + along * uy };
    vec![
        Point { x: base.x - off * uy, y: base.y + off * ux },
        Point { x: base.x + off * uy, y: base.y - off * ux },
    ]
}

/// Builds the scaffold to `depth` generations past the initial pair.
pub fn fractal_circles(depth: u32) -> Drawing {
    let mut circles: Vec<CircleRec> = Vec::new();
    let mut circle_traces: Vec<Trace> = Vec::new();
    let mut seen: BTreeSet<(i64, i64, i64)> = BTreeSet::new();

    let push = |circles: &mut Vec<CircleRec>,
                    traces: &mut Vec<Trace>,
                    seen: &mut BTreeSet<(i64, i64, i64)>,
                    rec: CircleRec,
                    trace: Trace| {
        if seen.insert(circle_key(&rec)) {
            circles.push(rec);
            traces.push(trace);
        }
    };

    let frame = CircleRec { center: FRAME_CENTER, radius: FRAME_RADIUS };
    push(&mut circles, &mut circle_traces, &mut seen, frame, Trace::FrameCircle);
    let leftmost =
        CircleRec { center: Point { x: FRAME_CENTER.x - FRAME_RADIUS, y: FRAME_CENTER.y }, radius: FRAME_RADIUS };
    push(&mut circles, &mut circle_traces, &mut seen, leftmost, Trace::LeftmostCircle { parent: 0 });

    for level in 1..=depth {
        let known = circles.len();
        let mut spawned: Vec<(Point, f64, usize, usize)> = Vec::new();
        for i in 0..known {
            for j in (i + 1)..known {
                if (circles[i].radius - circles[j].radius).abs() > MERGE_TOLERANCE {
                    continue;
                }
                for p in intersections(&circles[i], &circles[j]) {
                    spawned.push((p, circles[i].radius, i, j));
                }
            }
        }
        for (center, radius, parent_a, parent_b) in spawned {
            push(
                &mut circles,
                &mut circle_traces,
                &mut seen,
                CircleRec { center, radius },
                Trace::EqualCircle { parent_a, parent_b, level },
            );
            push(
                &mut circles,
                &mut circle_traces,
                &mut seen,
                CircleRec { center, radius: radius / 2.0 },
                Trace::HalfCircle { parent_a, parent_b, level },
            );
        }
    }

    let mut primitives: Vec<Primitive> = circles
        .iter()
        .map(|c| Primitive::Circle { center: c.center, radius: c.radius })
        .collect();
    let mut traces = circle_traces;

    // Cut every circle at the points where other circles meet it.
    for (ci, circle) in circles.iter().enumerate() {
        let mut cut_keys: BTreeSet<(i64, i64)> = BTreeSet::new();
        let mut angles: Vec<f64> = Vec::new();
        for (cj, other) in circles.iter().enumerate() {
            if ci == cj {
                continue;
            }
            for p in intersections(circle, other) {
                if cut_keys.insert((quantize(p.x), quantize(p.y))) {
                    angles.push((p.y - circle.center.y).atan2(p.x - circle.center.x));
                }
            }
        }
        angles.sort_by(f64::total_cmp);
        if angles.len() < 2 {
            continue;
        }
        for (k, &start) in angles.iter().enumerate() {
            let end = if k + 1 < angles.len() {
                angles[k + 1]
            } else {
                angles[0] + 2.0 * std::f64::consts::PI
            };
            primitives.push(Primitive::Arc {
                center: circle.center,
                radius: circle.radius,
                start_angle: start,
                end_angle: end,
            });
            traces.push(Trace::CircleArc { circle: ci });
        }
    }

    Drawing {
        primitives,
        provenance: Some(Provenance { generator: Generator::FractalCircles { depth }, traces }),
    }
}
