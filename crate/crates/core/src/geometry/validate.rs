use super::LandmarkMatrix;

/// Full-rank threshold on `σ₂ / σ₁` of the centered landmarks.
pub const RANK_TOL: f64 = 1e-10;

/// Result of [`validate_shape`]. Diagnostics only; nothing here is an error.
#[derive(Debug, Clone, PartialEq)]
pub struct ShapeDiagnostics {
    /// `σ₂ / σ₁` of the centered landmark matrix.
    pub rank_ratio: f64,
    pub full_rank: bool,
    /// First pair of crossing or touching segments of the closed polyline,
    /// as indices into the deduplicated point list.
    pub crossing: Option<(usize, usize)>,
    pub simple: bool,
    /// Number of local minima of the first coordinate around the closed
    /// boundary. A well-ordered airfoil has exactly one (the leading edge).
    pub leading_edge_extrema: usize,
    /// Shoelace area; positive for the upper-surface-first traversal.
    pub signed_area: f64,
    pub ordering_ok: bool,
}

impl ShapeDiagnostics {
    pub fn is_valid(&self) -> bool {
        self.full_rank && self.simple && self.ordering_ok
    }
}

pub fn validate_shape(x: &LandmarkMatrix) -> ShapeDiagnostics {
    let rank_ratio = x.rank_ratio();
    let pts = closed_ring(x);
    let crossing = if pts.len() < 3 {
        Some((0, 0))
    } else {
        first_crossing(&pts)
    };
    let leading_edge_extrema = count_x_minima(&pts);
    let signed_area = shoelace(&pts);
    ShapeDiagnostics {
        rank_ratio,
        full_rank: rank_ratio > RANK_TOL,
        crossing,
        simple: crossing.is_none(),
        leading_edge_extrema,
        signed_area,
        ordering_ok: leading_edge_extrema == 1 && signed_area > 0.0,
    }
}

/// Points closer than this fraction of the bounding-box diagonal are
/// treated as repeats.
const DUPLICATE_REL_TOL: f64 = 1e-12;

/// Landmarks with cyclically repeated points removed, so a trailing edge
/// listed at both ends closes the ring once even when the two copies differ
/// by roundoff.
fn closed_ring(x: &LandmarkMatrix) -> Vec<[f64; 2]> {
    let (mut lo, mut hi) = ([f64::INFINITY; 2], [f64::NEG_INFINITY; 2]);
    for p in x.rows() {
        for k in 0..2 {
            lo[k] = lo[k].min(p[k]);
            hi[k] = hi[k].max(p[k]);
        }
    }
    let tol = DUPLICATE_REL_TOL * (hi[0] - lo[0]).hypot(hi[1] - lo[1]);
    let same = |a: &[f64; 2], b: &[f64; 2]| (a[0] - b[0]).hypot(a[1] - b[1]) <= tol;
    let mut pts: Vec<[f64; 2]> = Vec::with_capacity(x.n());
    for p in x.rows() {
        if !pts.last().is_some_and(|q| same(q, &p)) {
            pts.push(p);
        }
    }
    while pts.len() > 1 && same(&pts[0], &pts[pts.len() - 1]) {
        pts.pop();
    }
    pts
}

fn orient(a: [f64; 2], b: [f64; 2], c: [f64; 2]) -> f64 {
    (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0])
}

fn on_segment(a: [f64; 2], b: [f64; 2], p: [f64; 2]) -> bool {
    p[0] >= a[0].min(b[0]) && p[0] <= a[0].max(b[0]) && p[1] >= a[1].min(b[1]) && p[1] <= a[1].max(b[1])
}

fn segments_touch(a: [f64; 2], b: [f64; 2], c: [f64; 2], d: [f64; 2]) -> bool {
    let d1 = orient(c, d, a);
    let d2 = orient(c, d, b);
    let d3 = orient(a, b, c);
    let d4 = orient(a, b, d);
    if ((d1 > 0.0 && d2 < 0.0) || (d1 < 0.0 && d2 > 0.0)) && ((d3 > 0.0 && d4 < 0.0) || (d3 < 0.0 && d4 > 0.0)) {
        return true;
    }
    (d1 == 0.0 && on_segment(c, d, a))
        || (d2 == 0.0 && on_segment(c, d, b))
        || (d3 == 0.0 && on_segment(a, b, c))
        || (d4 == 0.0 && on_segment(a, b, d))
}

/// O(m²) scan of the closed polyline. Adjacent segments only count when
/// they fold back onto each other.
fn first_crossing(pts: &[[f64; 2]]) -> Option<(usize, usize)> {
    let m = pts.len();
    let seg = |i: usize| (pts[i], pts[(i + 1) % m]);
    for i in 0..m {
        let (a, b) = seg(i);
        // the segment after i shares its end point
        let (_, c) = seg((i + 1) % m);
        if orient(a, b, c) == 0.0 {
            let dot = (b[0] - a[0]) * (c[0] - b[0]) + (b[1] - a[1]) * (c[1] - b[1]);
            if dot < 0.0 {
                return Some((i, (i + 1) % m));
            }
        }
        for j in (i + 2)..m {
            if i == 0 && j == m - 1 {
                continue;
            }
            let (c, d) = seg(j);
            if segments_touch(a, b, c, d) {
                return Some((i, j));
            }
        }
    }
    None
}

fn count_x_minima(pts: &[[f64; 2]]) -> usize {
    let signs: Vec<bool> = (0..pts.len())
        .filter_map(|i| {
            let dx = pts[(i + 1) % pts.len()][0] - pts[i][0];
            (dx != 0.0).then_some(dx > 0.0)
        })
        .collect();
    if signs.is_empty() {
        return 0;
    }
    (0..signs.len())
        .filter(|&i| !signs[i] && signs[(i + 1) % signs.len()])
        .count()
}

fn shoelace(pts: &[[f64; 2]]) -> f64 {
    let m = pts.len();
    0.5 * (0..m)
        .map(|i| {
            let (p, q) = (pts[i], pts[(i + 1) % m]);
            p[0] * q[1] - q[0] * p[1]
        })
        .sum::<f64>()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn trailing_edge_roundoff_is_not_a_crossing() {
        let mut x = crate::geometry::cst_evaluate(&crate::geometry::synthetic_baselines()[1], 41)
            .unwrap()
            .into_inner();
        x[(40, 0)] += 3e-16;
        x[(40, 1)] -= 2e-16;
        let d = validate_shape(&LandmarkMatrix::new(x).unwrap());
        assert!(d.is_valid(), "{d:?}");
    }

    #[test]
    fn collinear_points_flag_rank() {
        let x = LandmarkMatrix::from_rows(&[[0.0, 1.0], [1.0, 1.0], [2.0, 1.0], [3.0, 1.0]]).unwrap();
        let d = validate_shape(&x);
        assert!(!d.full_rank);
        assert!(!d.is_valid());
    }

    #[test]
    fn figure_eight_flags_simplicity() {
        let x = LandmarkMatrix::from_rows(&[[0.0, 0.0], [1.0, 1.0], [1.0, 0.0], [0.0, 1.0]]).unwrap();
        let d = validate_shape(&x);
        assert!(d.full_rank);
        assert!(!d.simple);
    }

    #[test]
    fn convex_ccw_polygon_is_valid() {
        let x = LandmarkMatrix::from_rows(&[[1.0, 0.0], [0.5, 0.2], [0.0, 0.0], [0.5, -0.1], [1.0, 0.0]]).unwrap();
        let d = validate_shape(&x);
        assert!(d.is_valid(), "{d:?}");
        assert_eq!(d.leading_edge_extrema, 1);
    }

    #[test]
    fn reversed_ordering_is_flagged() {
        let rows = [[1.0, 0.0], [0.5, 0.2], [0.0, 0.0], [0.5, -0.1]];
        let rev: Vec<[f64; 2]> = rows.iter().rev().copied().collect();
        let d = validate_shape(&LandmarkMatrix::from_rows(&rev).unwrap());
        assert!(d.simple && d.full_rank);
        assert!(!d.ordering_ok);
        assert!(d.signed_area < 0.0);
    }

    #[test]
    fn fold_back_is_not_simple() {
        let x = LandmarkMatrix::from_rows(&[[0.0, 0.0], [2.0, 0.0], [1.0, 0.0], [1.0, 1.0]]).unwrap();
        assert!(!validate_shape(&x).simple);
    }

    #[test]
    fn wavy_leading_edge_counts_extra_minima() {
        let x = LandmarkMatrix::from_rows(&[[1.0, 0.0], [0.5, 0.3], [0.0, 0.2], [0.2, 0.1], [0.0, 0.0], [0.5, -0.2]])
            .unwrap();
        assert_eq!(validate_shape(&x).leading_edge_extrema, 2);
    }
}
