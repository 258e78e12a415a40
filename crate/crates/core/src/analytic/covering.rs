//! Boundary coverings behind the recursion constant.
//!
//! Two finite point sets are constructed: K on the boundary of the square
//! D_10 covering the annulus D_10 \ D_9 by unit squares, and L on the
//! boundary of D_80 covering D_81 \ D_80. Points are placed greedily every
//! 2 units along the boundary with corners always included; minimality is
//! not claimed, only validity, which is checked on a 10^4-point grid.

use serde::Serialize;

use crate::error::Error;
use crate::geom::Point2;
use crate::Result;

/// Geometric constants entering the sub-critical machinery: c1 bounds the
/// path event by an expected count, c2 the radius event by a union bound,
/// c3 is the covering product |K| * |L|, and c is their maximum.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Constants {
    pub c1: f64,
    pub c2: f64,
    pub c3: f64,
    pub c: f64,
    pub k_count: usize,
    pub l_count: usize,
}

/// Points spaced `spacing` apart along the boundary of the square of the
/// given half-width, corners included.
fn boundary_points(half: f64, spacing: f64) -> Vec<Point2> {
    let mut pts = Vec::new();
    let steps = (2.0 * half / spacing).round() as i64;
    debug_assert!((steps as f64 * spacing - 2.0 * half).abs() < 1e-9);
    // Walk each side excluding its end corner; the next side supplies it.
    for k in 0..steps {
        let t = -half + k as f64 * spacing;
        pts.push(Point2::new(t, -half));
    }
    for k in 0..steps {
        let t = -half + k as f64 * spacing;
        pts.push(Point2::new(half, t));
    }
    for k in 0..steps {
        let t = half - k as f64 * spacing;
        pts.push(Point2::new(t, half));
    }
    for k in 0..steps {
        let t = half - k as f64 * spacing;
        pts.push(Point2::new(-half, t));
    }
    pts
}

/// Point on the boundary of the square of half-width `half` at arclength
/// fraction `frac` of the perimeter, starting from (-half, -half).
fn walk_square(half: f64, frac: f64) -> Point2 {
    let perimeter = 8.0 * half;
    let mut t = frac * perimeter;
    let side = 2.0 * half;
    if t < side {
        return Point2::new(-half + t, -half);
    }
    t -= side;
    if t < side {
        return Point2::new(half, -half + t);
    }
    t -= side;
    if t < side {
        return Point2::new(half - t, half);
    }
    t -= side;
    Point2::new(-half, half - t)
}

fn covered(p: Point2, cover: &[Point2]) -> bool {
    cover
        .iter()
        .any(|k| (p.x - k.x).abs() <= 1.0 && (p.y - k.y).abs() <= 1.0)
}

/// Validate that `cover + D_1` contains the annulus between sup-norm radii
/// `inner` and `outer`, on a grid of `n_depth * n_around` sample points.
pub(crate) fn validate_annulus_covering(
    cover: &[Point2],
    inner: f64,
    outer: f64,
    n_around: usize,
    n_depth: usize,
) -> Result<()> {
    for di in 0..n_depth {
        let depth = inner + (di as f64 + 0.5) / n_depth as f64 * (outer - inner);
        for ai in 0..n_around {
            let frac = (ai as f64 + 0.5) / n_around as f64;
            let p = walk_square(depth, frac);
            if !covered(p, cover) {
                return Err(Error::internal(format!(
                    "covering miss at ({}, {}) for annulus [{inner}, {outer}]",
                    p.x, p.y
                )));
            }
        }
    }
    Ok(())
}

/// Construct and validate both coverings; returns the constants
/// c1 = c2 = area(D_10) = 400 and c3 = |K| * |L|.
pub fn covering_constants() -> Result<Constants> {
    let k = boundary_points(10.0, 2.0);
    let l = boundary_points(80.0, 2.0);
    validate_annulus_covering(&k, 9.0, 10.0, 400, 25)?;
    validate_annulus_covering(&l, 80.0, 81.0, 1000, 10)?;
    let c1 = 400.0;
    let c2 = 400.0;
    let c3 = (k.len() * l.len()) as f64;
    Ok(Constants {
        c1,
        c2,
        c3,
        c: c1.max(c2).max(c3),
        k_count: k.len(),
        l_count: l.len(),
    })
}

/// The covering point sets themselves, for inspection and scale tests.
pub fn covering_sets() -> (Vec<Point2>, Vec<Point2>) {
    (boundary_points(10.0, 2.0), boundary_points(80.0, 2.0))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn inner_covering_has_forty_points() {
        let (k, l) = covering_sets();
        assert_eq!(k.len(), 40);
        assert!(k.len() <= 44);
        assert_eq!(l.len(), 320);
        // All K points on the boundary of D_10.
        for p in &k {
            assert!((p.cheb() - 10.0).abs() < 1e-12);
        }
    }

    #[test]
    fn constants_are_consistent() {
        let c = covering_constants().unwrap();
        assert_eq!(c.c1, 400.0);
        assert_eq!(c.c2, 400.0);
        assert_eq!(c.c3, (c.k_count * c.l_count) as f64);
        assert_eq!(c.c, c.c1.max(c.c2).max(c.c3));
    }

    #[test]
    fn grid_validation_passes() {
        assert!(covering_constants().is_ok());
    }

    #[test]
    fn annulus_points_all_covered_inner() {
        // Spot-check corners and edges of the annulus directly.
        let (k, _) = covering_sets();
        for p in [
            Point2::new(9.5, 9.5),
            Point2::new(10.0, 10.0),
            Point2::new(-9.2, 3.3),
            Point2::new(0.0, -9.9),
        ] {
            assert!(covered(p, &k), "({}, {}) uncovered", p.x, p.y);
        }
    }

    #[test]
    fn scaled_covering_still_covers() {
        // The construction is scale-free: r*K with r*D_1 covers the scaled
        // annulus. Check the inf-norm criterion at a non-dyadic scale.
        let (k, _) = covering_sets();
        let r = 3.7;
        let scaled: Vec<Point2> = k.iter().map(|p| Point2::new(p.x * r, p.y * r)).collect();
        for di in 0..20 {
            let depth = r * (9.0 + (di as f64 + 0.5) / 20.0);
            for ai in 0..200 {
                let p = walk_square(depth, (ai as f64 + 0.5) / 200.0);
                let hit = scaled
                    .iter()
                    .any(|q| (p.x - q.x).abs() <= r && (p.y - q.y).abs() <= r);
                assert!(hit, "miss at ({}, {})", p.x, p.y);
            }
        }
    }

    #[test]
    fn broken_covering_is_detected() {
        let (mut k, _) = covering_sets();
        k.truncate(10);
        assert!(validate_annulus_covering(&k, 9.0, 10.0, 400, 25).is_err());
    }
}
