use crate::model::Point2;

/// Corner-cutting subdivision with fixed endpoints. Each pass replaces every
/// segment by its 1/4 and 3/4 points, except that the first and last vertex
/// stand in for the outer cut points, giving `2 * (n - 1)` vertices.
/// Polylines with fewer than three vertices come back unchanged.
pub fn smooth_polyline(points: &[Point2], iterations: u8) -> Vec<Point2> {
    let mut current = points.to_vec();
    for _ in 0..iterations {
        let n = current.len();
        if n < 3 {
            break;
        }
        let mut next = Vec::with_capacity(2 * (n - 1));
        next.push(current[0]);
        for (i, seg) in current.windows(2).enumerate() {
            let (a, b) = (seg[0], seg[1]);
            let quarter = Point2::new(0.75 * a.x + 0.25 * b.x, 0.75 * a.y + 0.25 * b.y);
            let three_quarter = Point2::new(0.25 * a.x + 0.75 * b.x, 0.25 * a.y + 0.75 * b.y);
            if i > 0 {
                next.push(quarter);
            }
            if i < n - 2 {
                next.push(three_quarter);
            }
        }
        next.push(current[n - 1]);
        current = next;
    }
    current
}
