//! Convex polygons in the xy plane, counter-clockwise.

pub type P2 = [f64; 2];

fn sub(a: P2, b: P2) -> P2 {
    [a[0] - b[0], a[1] - b[1]]
}

fn cross(a: P2, b: P2) -> f64 {
    a[0] * b[1] - a[1] * b[0]
}

fn norm(a: P2) -> f64 {
    a[0].hypot(a[1])
}

pub fn area(poly: &[P2]) -> f64 {
    let n = poly.len();
    (0..n).map(|i| cross(poly[i], poly[(i + 1) % n])).sum::<f64>() / 2.0
}

/// Intersection of two convex CCW polygons (Sutherland-Hodgman).
pub fn clip(subject: &[P2], clipper: &[P2]) -> Vec<P2> {
    let mut out = subject.to_vec();
    let n = clipper.len();
    for i in 0..n {
        if out.is_empty() {
            break;
        }
        let (a, b) = (clipper[i], clipper[(i + 1) % n]);
        let side = |p: P2| cross(sub(b, a), sub(p, a));
        let input = std::mem::take(&mut out);
        for k in 0..input.len() {
            let (p, q) = (input[k], input[(k + 1) % input.len()]);
            let (sp, sq) = (side(p), side(q));
            if sp >= 0.0 {
                out.push(p);
            }
            if (sp >= 0.0) != (sq >= 0.0) {
                let t = sp / (sp - sq);
                out.push([p[0] + t * (q[0] - p[0]), p[1] + t * (q[1] - p[1])]);
            }
        }
    }
    out
}

/// Convex hull (Andrew's monotone chain), CCW, collinear points dropped.
pub fn convex_hull(points: &[P2]) -> Vec<P2> {
    let mut pts = points.to_vec();
    pts.sort_by(|a, b| a[0].total_cmp(&b[0]).then(a[1].total_cmp(&b[1])));
    pts.dedup();
    if pts.len() < 3 {
        return pts;
    }
    let mut hull: Vec<P2> = Vec::with_capacity(2 * pts.len());
    for pass in 0..2 {
        let start = hull.len();
        let iter: Box<dyn Iterator<Item = &P2>> = if pass == 0 { Box::new(pts.iter()) } else { Box::new(pts.iter().rev()) };
        for &p in iter {
            while hull.len() >= start + 2 && cross(sub(hull[hull.len() - 1], hull[hull.len() - 2]), sub(p, hull[hull.len() - 2])) <= 0.0 {
                hull.pop();
            }
            hull.push(p);
        }
        hull.pop();
    }
    hull
}

/// Signed distance from `p` to the polygon boundary, positive inside.
pub fn inside_margin(poly: &[P2], p: P2) -> f64 {
    let n = poly.len();
    if n < 3 {
        return -boundary_distance(poly, p);
    }
    let mut margin = f64::INFINITY;
    for i in 0..n {
        let (a, b) = (poly[i], poly[(i + 1) % n]);
        let e = sub(b, a);
        margin = margin.min(cross(e, sub(p, a)) / norm(e));
    }
    if margin >= 0.0 {
        margin
    } else {
        -boundary_distance(poly, p)
    }
}

pub fn segment_distance(p: P2, a: P2, b: P2) -> f64 {
    norm(sub(p, closest_on_segment(p, a, b)))
}

fn closest_on_segment(p: P2, a: P2, b: P2) -> P2 {
    let e = sub(b, a);
    let l2 = e[0] * e[0] + e[1] * e[1];
    let t = if l2 > 0.0 { ((p[0] - a[0]) * e[0] + (p[1] - a[1]) * e[1]) / l2 } else { 0.0 };
    let t = t.clamp(0.0, 1.0);
    [a[0] + t * e[0], a[1] + t * e[1]]
}

/// Closest point on the polygon boundary to `p`.
pub fn closest_boundary_point(poly: &[P2], p: P2) -> P2 {
    let n = poly.len();
    (0..n)
        .map(|i| closest_on_segment(p, poly[i], poly[(i + 1) % n]))
        .min_by(|a, b| norm(sub(p, *a)).total_cmp(&norm(sub(p, *b))))
        .unwrap_or(p)
}

pub fn boundary_distance(poly: &[P2], p: P2) -> f64 {
    norm(sub(p, closest_boundary_point(poly, p)))
}

/// True when a separating axis exists with a strictly positive gap.
fn separated(a: &[P2], b: &[P2]) -> bool {
    for (poly, _) in [(a, b), (b, a)] {
        let n = poly.len();
        for i in 0..n {
            let e = sub(poly[(i + 1) % n], poly[i]);
            let axis = [-e[1], e[0]];
            let proj = |q: &[P2]| {
                q.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), p| {
                    let v = axis[0] * p[0] + axis[1] * p[1];
                    (lo.min(v), hi.max(v))
                })
            };
            let ((alo, ahi), (blo, bhi)) = (proj(a), proj(b));
            if ahi < blo || bhi < alo {
                return true;
            }
        }
    }
    false
}

/// Euclidean distance between two convex polygons; zero when they overlap or touch.
pub fn polygon_distance(a: &[P2], b: &[P2]) -> f64 {
    if !separated(a, b) {
        return 0.0;
    }
    let one_way = |p: &[P2], q: &[P2]| p.iter().map(|v| boundary_distance(q, *v)).fold(f64::INFINITY, f64::min);
    one_way(a, b).min(one_way(b, a))
}
