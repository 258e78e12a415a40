//! Point-pattern primitives: observation windows, homogeneous Poisson
//! sampling, and the padding rule that bounds boundary truncation error.

use rand_distr::{Distribution, Poisson};
use serde::Serialize;

use crate::error::Error;
use crate::rng::RngStream;
use crate::Result;

mod grid;
pub use grid::{nearest_distance, GridIndex};

/// A point of the plane in dimensionless simulation units.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Point2 {
    pub x: f64,
    pub y: f64,
}

impl Point2 {
    pub fn new(x: f64, y: f64) -> Self {
        Point2 { x, y }
    }

    #[inline]
    pub fn dist_sq(&self, other: Point2) -> f64 {
        let dx = self.x - other.x;
        let dy = self.y - other.y;
        dx * dx + dy * dy
    }

    #[inline]
    pub fn dist(&self, other: Point2) -> f64 {
        self.dist_sq(other).sqrt()
    }

    /// Chebyshev (sup-norm) distance from the origin; squares D_m are
    /// sup-norm balls, so annulus membership tests use this.
    #[inline]
    pub fn cheb(&self) -> f64 {
        self.x.abs().max(self.y.abs())
    }
}

/// Observation window: a square about the origin or an axis-aligned
/// rectangle. Positive area is enforced at construction.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum Window {
    Square {
        half_width: f64,
    },
    Rect {
        x_lo: f64,
        x_hi: f64,
        y_lo: f64,
        y_hi: f64,
    },
}

impl Window {
    pub fn square(half_width: f64) -> Result<Self> {
        if !(half_width > 0.0) || !half_width.is_finite() {
            return Err(Error::parameter(format!(
                "window half-width must be positive and finite, got {half_width}"
            )));
        }
        Ok(Window::Square { half_width })
    }

    pub fn rect(x_lo: f64, x_hi: f64, y_lo: f64, y_hi: f64) -> Result<Self> {
        let ok = x_lo.is_finite() && x_hi.is_finite() && y_lo.is_finite() && y_hi.is_finite();
        if !ok || !(x_hi > x_lo) || !(y_hi > y_lo) {
            return Err(Error::parameter(format!(
                "degenerate window [{x_lo}, {x_hi}] x [{y_lo}, {y_hi}]"
            )));
        }
        Ok(Window::Rect { x_lo, x_hi, y_lo, y_hi })
    }

    /// Bounds as (x_lo, x_hi, y_lo, y_hi).
    pub fn bounds(&self) -> (f64, f64, f64, f64) {
        match *self {
            Window::Square { half_width } => (-half_width, half_width, -half_width, half_width),
            Window::Rect { x_lo, x_hi, y_lo, y_hi } => (x_lo, x_hi, y_lo, y_hi),
        }
    }

    pub fn area(&self) -> f64 {
        let (x_lo, x_hi, y_lo, y_hi) = self.bounds();
        (x_hi - x_lo) * (y_hi - y_lo)
    }

    pub fn contains(&self, p: Point2) -> bool {
        let (x_lo, x_hi, y_lo, y_hi) = self.bounds();
        p.x >= x_lo && p.x <= x_hi && p.y >= y_lo && p.y <= y_hi
    }

    /// Window grown by `pad` on every side.
    pub fn padded(&self, pad: f64) -> Window {
        let (x_lo, x_hi, y_lo, y_hi) = self.bounds();
        match *self {
            Window::Square { half_width } => Window::Square { half_width: half_width + pad },
            Window::Rect { .. } => Window::Rect {
                x_lo: x_lo - pad,
                x_hi: x_hi + pad,
                y_lo: y_lo - pad,
                y_hi: y_hi + pad,
            },
        }
    }

    pub fn contains_window(&self, inner: &Window) -> bool {
        let (ox_lo, ox_hi, oy_lo, oy_hi) = self.bounds();
        let (ix_lo, ix_hi, iy_lo, iy_hi) = inner.bounds();
        ox_lo <= ix_lo && ox_hi >= ix_hi && oy_lo <= iy_lo && oy_hi >= iy_hi
    }
}

/// A realized Poisson point pattern together with the parameters that
/// produced it. Identical `(intensity, window, stream)` inputs reproduce
/// the identical sample, bit for bit.
#[derive(Debug, Clone, PartialEq)]
pub struct PppSample {
    pub points: Vec<Point2>,
    pub intensity: f64,
    pub window: Window,
    pub seed: u64,
}

/// Sample a homogeneous Poisson point process on `window`.
///
/// The count is Poisson(intensity x area); positions are i.i.d. uniform by
/// inverse CDF on each axis.
pub fn sample_ppp(intensity: f64, window: Window, stream: &RngStream) -> Result<PppSample> {
    if !(intensity >= 0.0) || !intensity.is_finite() {
        return Err(Error::parameter(format!(
            "intensity must be nonnegative and finite, got {intensity}"
        )));
    }
    let mut rng = stream.rng();
    let mean = intensity * window.area();
    let count = sample_poisson_count(mean, &mut rng)?;
    let (x_lo, x_hi, y_lo, y_hi) = window.bounds();
    let w = x_hi - x_lo;
    let h = y_hi - y_lo;
    let mut points = Vec::with_capacity(count);
    for _ in 0..count {
        let x = x_lo + w * rng.next_f64();
        let y = y_lo + h * rng.next_f64();
        points.push(Point2::new(x, y));
    }
    Ok(PppSample { points, intensity, window, seed: stream.key() })
}

fn sample_poisson_count(mean: f64, rng: &mut crate::rng::StreamRng) -> Result<usize> {
    if mean <= 0.0 {
        return Ok(0);
    }
    let dist = Poisson::new(mean)
        .map_err(|e| Error::parameter(format!("invalid Poisson mean {mean}: {e}")))?;
    Ok(dist.sample(rng) as usize)
}

/// A sample drawn at `max_intensity` where every point carries an
/// independent uniform mark. Thinning by mark threshold yields samples
/// that are nested across intensities, which is the coupling used for
/// monotonicity comparisons.
#[derive(Debug, Clone)]
pub struct MarkedSample {
    pub points: Vec<Point2>,
    pub marks: Vec<f64>,
    pub max_intensity: f64,
    pub window: Window,
    pub seed: u64,
}

impl MarkedSample {
    /// Points retained at `intensity <= max_intensity`: keep each point
    /// whose mark falls below `intensity / max_intensity`. Lower
    /// intensities select subsets of higher ones.
    pub fn thin(&self, intensity: f64) -> Vec<Point2> {
        let keep = if self.max_intensity > 0.0 { intensity / self.max_intensity } else { 0.0 };
        self.points
            .iter()
            .zip(&self.marks)
            .filter(|(_, &m)| m < keep)
            .map(|(&p, _)| p)
            .collect()
    }
}

pub fn sample_ppp_marked(
    max_intensity: f64,
    window: Window,
    stream: &RngStream,
) -> Result<MarkedSample> {
    let base = sample_ppp(max_intensity, window, stream)?;
    let mut rng = stream.substream(u64::MAX).rng();
    let marks = (0..base.points.len()).map(|_| rng.next_f64()).collect();
    Ok(MarkedSample {
        points: base.points,
        marks,
        max_intensity,
        window,
        seed: stream.key(),
    })
}

/// Padding width such that, for `expected_nodes` observation points, the
/// probability that any point's nearest eavesdropper lies beyond the pad
/// is at most `tol` (union bound over the void probability
/// exp(-intensity_e x pi x p²)).
pub fn pad_width(intensity_e: f64, tol: f64, expected_nodes: f64) -> Result<f64> {
    if !(tol > 0.0 && tol < 1.0) {
        return Err(Error::parameter(format!("tol must lie in (0, 1), got {tol}")));
    }
    if !(intensity_e > 0.0) {
        return Err(Error::parameter(format!(
            "eavesdropper intensity must be positive, got {intensity_e}"
        )));
    }
    if !(expected_nodes >= 0.0) {
        return Err(Error::parameter(format!(
            "expected node count must be nonnegative, got {expected_nodes}"
        )));
    }
    let ratio = (expected_nodes / tol).ln().max(0.0);
    Ok((ratio / (std::f64::consts::PI * intensity_e)).sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn zero_intensity_gives_empty_sample() {
        let w = Window::square(3.0).unwrap();
        let s = sample_ppp(0.0, w, &RngStream::new(1)).unwrap();
        assert!(s.points.is_empty());
    }

    #[test]
    fn negative_intensity_rejected() {
        let w = Window::square(1.0).unwrap();
        assert!(sample_ppp(-1.0, w, &RngStream::new(1)).is_err());
    }

    #[test]
    fn degenerate_window_rejected() {
        assert!(Window::square(0.0).is_err());
        assert!(Window::square(-2.0).is_err());
        assert!(Window::rect(0.0, 0.0, 0.0, 1.0).is_err());
        assert!(Window::rect(1.0, 0.0, 0.0, 1.0).is_err());
    }

    #[test]
    fn identical_inputs_reproduce_identical_samples() {
        let w = Window::rect(-1.0, 4.0, 2.0, 3.0).unwrap();
        let a = sample_ppp(50.0, w, &RngStream::new(99)).unwrap();
        let b = sample_ppp(50.0, w, &RngStream::new(99)).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn count_in_three_sigma_band_at_mean_1000() {
        // Poisson(1000): [905, 1095] is the +-3 sigma band.
        let w = Window::rect(0.0, 1.0, 0.0, 1.0).unwrap();
        let mut in_band = 0;
        for seed in 0..20 {
            let s = sample_ppp(1000.0, w, &RngStream::new(seed)).unwrap();
            if (905..=1095).contains(&s.points.len()) {
                in_band += 1;
            }
        }
        // P(out of band) ~ 0.003 per draw; 20 draws all landing inside is
        // itself a 94% event, so require at least 19.
        assert!(in_band >= 19, "only {in_band}/20 draws in the 3-sigma band");
    }

    #[test]
    fn empirical_count_matches_poisson_mean() {
        // Mean over 10^4 draws within 3 standard errors of lambda*area.
        let lambda = 2.0;
        let r = 1.0;
        let w = Window::square(10.0 * r).unwrap();
        let mean_expected = lambda * (20.0 * r) * (20.0 * r); // 800
        let root = RngStream::new(2024);
        let n = 10_000u64;
        let total: u64 = (0..n)
            .map(|t| sample_ppp(lambda, w, &root.substream(t)).unwrap().points.len() as u64)
            .sum();
        let mean = total as f64 / n as f64;
        let se = (mean_expected / n as f64).sqrt();
        assert!(
            (mean - mean_expected).abs() <= 3.0 * se,
            "mean {mean} vs {mean_expected} (se {se})"
        );
    }

    #[test]
    fn thinned_samples_are_nested() {
        let w = Window::square(5.0).unwrap();
        let marked = sample_ppp_marked(8.0, w, &RngStream::new(5)).unwrap();
        let lo = marked.thin(2.0);
        let hi = marked.thin(6.0);
        assert!(lo.len() <= hi.len());
        for p in &lo {
            assert!(hi.iter().any(|q| q == p));
        }
        assert_eq!(marked.thin(8.0).len(), marked.points.len());
    }

    #[test]
    fn pad_width_unit_case() {
        // intensity_e = 1/pi, tol = e^-1, one node: p solves exp(-p^2) = e^-1.
        let p = pad_width(1.0 / std::f64::consts::PI, (-1.0f64).exp(), 1.0).unwrap();
        assert!((p - 1.0).abs() < 1e-12, "p = {p}");
    }

    #[test]
    fn pad_width_vanishes_as_tol_approaches_one() {
        let p = pad_width(1.0, 1.0 - 1e-12, 1.0).unwrap();
        assert!(p < 1e-5, "p = {p}");
    }

    #[test]
    fn pad_width_monotone_in_expected_nodes() {
        let p1 = pad_width(1.0, 0.01, 10.0).unwrap();
        let p2 = pad_width(1.0, 0.01, 20.0).unwrap();
        assert!(p2 > p1);
    }

    #[test]
    fn pad_width_rejects_bad_tol() {
        assert!(pad_width(1.0, 0.0, 1.0).is_err());
        assert!(pad_width(1.0, 1.0, 1.0).is_err());
        assert!(pad_width(1.0, -0.5, 1.0).is_err());
        assert!(pad_width(0.0, 0.5, 1.0).is_err());
    }

    #[test]
    fn pad_guarantee_holds_empirically() {
        // Frequency of "true nearest eavesdropper (sampled on a much larger
        // window) lies beyond the pad" stays below 2*tol.
        let lambda_e = 1.0;
        let tol = 0.01;
        let pad = pad_width(lambda_e, tol, 1.0).unwrap();
        let big = Window::square(pad + 4.0).unwrap();
        let root = RngStream::new(77);
        let trials = 10_000u64;
        let mut beyond = 0u64;
        for t in 0..trials {
            let s = sample_ppp(lambda_e, big, &root.substream(t)).unwrap();
            let origin = Point2::new(0.0, 0.0);
            let nearest = s
                .points
                .iter()
                .map(|&p| p.dist(origin))
                .fold(f64::INFINITY, f64::min);
            if nearest > pad {
                beyond += 1;
            }
        }
        let freq = beyond as f64 / trials as f64;
        assert!(freq <= 2.0 * tol, "freq {freq} vs tol {tol}");
    }

    proptest! {
        #[test]
        fn sampled_points_lie_in_window(seed in any::<u64>(), hw in 0.1f64..20.0) {
            let w = Window::square(hw).unwrap();
            let s = sample_ppp(2.0, w, &RngStream::new(seed)).unwrap();
            for p in &s.points {
                prop_assert!(w.contains(*p));
                prop_assert!(p.x.is_finite() && p.y.is_finite());
            }
        }
    }
}
