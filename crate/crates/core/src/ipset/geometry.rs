//! Planar helpers for two-component profile sets.

/// Convex hull in counter-clockwise order, collinear points removed.
pub fn convex_hull(points: &[[f64; 2]], tol: f64) -> Vec<[f64; 2]> {
    let mut sorted: Vec<[f64; 2]> = points.to_vec();
    sorted.sort_by(|a, b| a[0].total_cmp(&b[0]).then(a[1].total_cmp(&b[1])));
    // Near-duplicates need not be adjacent after sorting (x = ±1e-17 around
    // a point at x = 0), and leaving them in lets the tolerant turn test pop
    // genuine vertices.
    let mut pts: Vec<[f64; 2]> = Vec::with_capacity(sorted.len());
    for p in sorted {
        if !pts
            .iter()
            .any(|q| (p[0] - q[0]).abs() <= tol && (p[1] - q[1]).abs() <= tol)
        {
            pts.push(p);
        }
    }
    if pts.len() <= 2 {
        return pts;
    }
    let cross = |o: [f64; 2], a: [f64; 2], b: [f64; 2]| (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0]);
    let mut hull: Vec<[f64; 2]> = Vec::with_capacity(2 * pts.len());
    for pass in 0..2 {
        let start = hull.len();
        let iter: Box<dyn Iterator<Item = &[f64; 2]>> = if pass == 0 {
            Box::new(pts.iter())
        } else {
            Box::new(pts.iter().rev())
        };
        for &p in iter {
            while hull.len() >= start + 2 && cross(hull[hull.len() - 2], hull[hull.len() - 1], p) <= tol {
                hull.pop();
            }
            hull.push(p);
        }
        hull.pop();
    }
    if hull.len() == 2 && (hull[0][0] - hull[1][0]).abs() <= tol && (hull[0][1] - hull[1][1]).abs() <= tol {
        hull.truncate(1);
    }
    hull
}

fn dist(a: [f64; 2], b: [f64; 2]) -> f64 {
    ((a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2)).sqrt()
}

fn point_segment(p: [f64; 2], a: [f64; 2], b: [f64; 2]) -> f64 {
    let d = [b[0] - a[0], b[1] - a[1]];
    let len2 = d[0] * d[0] + d[1] * d[1];
    if len2 == 0.0 {
        return dist(p, a);
    }
    let t = (((p[0] - a[0]) * d[0] + (p[1] - a[1]) * d[1]) / len2).clamp(0.0, 1.0);
    dist(p, [a[0] + t * d[0], a[1] + t * d[1]])
}

fn inside(p: [f64; 2], poly: &[[f64; 2]]) -> bool {
    if poly.len() < 3 {
        return false;
    }
    (0..poly.len()).all(|i| {
        let a = poly[i];
        let b = poly[(i + 1) % poly.len()];
        (b[0] - a[0]) * (p[1] - a[1]) - (b[1] - a[1]) * (p[0] - a[0]) >= -1e-12
    })
}

/// Distance from a point to a convex polygon (zero inside).
pub fn point_polygon_distance(p: [f64; 2], poly: &[[f64; 2]]) -> f64 {
    match poly.len() {
        0 => f64::INFINITY,
        1 => dist(p, poly[0]),
        _ => {
            if inside(p, poly) {
                return 0.0;
            }
            (0..poly.len())
                .map(|i| point_segment(p, poly[i], poly[(i + 1) % poly.len()]))
                .fold(f64::INFINITY, f64::min)
        }
    }
}

/// Hausdorff distance between two convex polygons given by their vertices.
pub fn hausdorff(a: &[[f64; 2]], b: &[[f64; 2]]) -> f64 {
    // For convex sets the extreme deviation is attained at a vertex.
    let ab = a.iter().map(|&p| point_polygon_distance(p, b)).fold(0.0, f64::max);
    let ba = b.iter().map(|&p| point_polygon_distance(p, a)).fold(0.0, f64::max);
    ab.max(ba)
}

/// Largest pairwise Euclidean distance.
pub fn diameter(points: &[Vec<f64>]) -> f64 {
    let mut best: f64 = 0.0;
    for (i, a) in points.iter().enumerate() {
        for b in &points[i + 1..] {
            let d = a.iter().zip(b).map(|(x, y)| (x - y).powi(2)).sum::<f64>().sqrt();
            best = best.max(d);
        }
    }
    best
}
