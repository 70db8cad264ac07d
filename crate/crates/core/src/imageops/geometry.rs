use super::ConnectedComponent;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Point {
    pub row: f64,
    pub col: f64,
}

impl Point {
    pub fn new(row: f64, col: f64) -> Self {
        Point { row, col }
    }
}

/// Simple polygon with at least three vertices.
#[derive(Debug, Clone, PartialEq)]
pub struct Polygon {
    vertices: Vec<Point>,
}

impl Polygon {
    pub fn new(vertices: Vec<Point>) -> Option<Self> {
        (vertices.len() >= 3).then_some(Polygon { vertices })
    }

    pub fn vertices(&self) -> &[Point] {
        &self.vertices
    }

    /// `(min_row, min_col, max_row, max_col)` of the vertices.
    pub fn bounds(&self) -> (f64, f64, f64, f64) {
        self.vertices.iter().fold(
            (
                f64::INFINITY,
                f64::INFINITY,
                f64::NEG_INFINITY,
                f64::NEG_INFINITY,
            ),
            |(r0, c0, r1, c1), p| (r0.min(p.row), c0.min(p.col), r1.max(p.row), c1.max(p.col)),
        )
    }

    /// Twice the signed area; positive for counter-clockwise order in the (row, col) plane.
    pub fn signed_area2(&self) -> f64 {
        let n = self.vertices.len();
        (0..n)
            .map(|i| {
                let (a, b) = (self.vertices[i], self.vertices[(i + 1) % n]);
                a.row * b.col - b.row * a.col
            })
            .sum()
    }
}

fn cross(o: (i64, i64), a: (i64, i64), b: (i64, i64)) -> i64 {
    (a.0 - o.0) * (b.1 - o.1) - (a.1 - o.1) * (b.0 - o.0)
}

/// Convex hull of the component's pixel centres, counter-clockwise in the (row, col) plane
/// with collinear points dropped. `None` when the pixels are collinear or fewer than three.
pub fn convex_hull(component: &ConnectedComponent) -> Option<Polygon> {
    let mut pts: Vec<(i64, i64)> = component
        .pixels
        .iter()
        .map(|&(r, c)| (r as i64, c as i64))
        .collect();
    pts.sort_unstable();
    pts.dedup();
    if pts.len() < 3 {
        return None;
    }
    let mut hull: Vec<(i64, i64)> = Vec::with_capacity(2 * pts.len());
    for &p in &pts {
        while hull.len() >= 2 && cross(hull[hull.len() - 2], hull[hull.len() - 1], p) <= 0 {
            hull.pop();
        }
        hull.push(p);
    }
    let lower_len = hull.len() + 1;
    for &p in pts.iter().rev().skip(1) {
        while hull.len() >= lower_len && cross(hull[hull.len() - 2], hull[hull.len() - 1], p) <= 0 {
            hull.pop();
        }
        hull.push(p);
    }
    hull.pop();
    Polygon::new(
        hull.into_iter()
            .map(|(r, c)| Point::new(r as f64, c as f64))
            .collect(),
    )
}

const EDGE_TOLERANCE: f64 = 1e-9;

fn on_segment(p: Point, a: Point, b: Point) -> bool {
    let cross = (b.row - a.row) * (p.col - a.col) - (b.col - a.col) * (p.row - a.row);
    let scale = (b.row - a.row).abs().max((b.col - a.col).abs()).max(1.0);
    if cross.abs() > EDGE_TOLERANCE * scale {
        return false;
    }
    p.row >= a.row.min(b.row) - EDGE_TOLERANCE
        && p.row <= a.row.max(b.row) + EDGE_TOLERANCE
        && p.col >= a.col.min(b.col) - EDGE_TOLERANCE
        && p.col <= a.col.max(b.col) + EDGE_TOLERANCE
}

/// Even-odd containment test; points on the boundary count as inside.
pub fn point_in_polygon(p: Point, poly: &Polygon) -> bool {
    let v = poly.vertices();
    let n = v.len();
    let mut inside = false;
    let mut j = n - 1;
    for i in 0..n {
        let (a, b) = (v[i], v[j]);
        if on_segment(p, a, b) {
            return true;
        }
        if (a.row > p.row) != (b.row > p.row) {
            let col_at = a.col + (p.row - a.row) * (b.col - a.col) / (b.row - a.row);
            if p.col < col_at {
                inside = !inside;
            }
        }
        j = i;
    }
    inside
}
