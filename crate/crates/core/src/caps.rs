//! Spherical caps meeting the unit sphere at a fixed contact angle.
//!
//! In the half-space model a cap is a round sphere of radius `R` centred on
//! the axis at height `-R cos θ`, giving the radial profile
//! `ψ(β) = -R cos θ cos β + R sqrt(1 - cos²θ sin²β)`. Its image in the ball
//! is recovered by fitting a sphere through mapped profile points.

use std::sync::Arc;

use crate::conformal::{half_to_ball, HalfSpacePoint};
use crate::diagnostics::enclosed_volume;
use crate::error::{FlowError, Result};
use crate::flow::rhs_coefficient_form;
use crate::graph::{check_theta, contact_cos, RadialGraph};
use crate::grid::{ball_volume, AxisymmetricGrid};
use crate::scalar::Real;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SphericalCap<T> {
    radius: T,
    theta: T,
    ball_radius: T,
    center_height: T,
}

/// Circle through three points of the meridian plane, as `(lateral, axis, radius)`.
/// `None` when the points are collinear to working precision.
fn circumcircle<T: Real>(p: [(T, T); 3]) -> Option<(T, T, T)> {
    let [(ax, ay), (bx, by), (cx, cy)] = p;
    let two = T::lit(2.0);
    let d = two * (ax * (by - cy) + bx * (cy - ay) + cx * (ay - by));
    let scale = [(bx - ax, by - ay), (cx - ax, cy - ay)]
        .iter()
        .map(|&(x, y)| x * x + y * y)
        .fold(T::zero(), T::max);
    if d.abs() <= T::tol(1e-12) * scale {
        return None;
    }
    let a2 = ax * ax + ay * ay;
    let b2 = bx * bx + by * by;
    let c2 = cx * cx + cy * cy;
    let ux = (a2 * (by - cy) + b2 * (cy - ay) + c2 * (ay - by)) / d;
    let uy = (a2 * (cx - bx) + b2 * (ax - cx) + c2 * (bx - ax)) / d;
    let r = ((ax - ux).powi(2) + (ay - uy).powi(2)).sqrt();
    Some((ux, uy, r))
}

impl<T: Real> SphericalCap<T> {
    /// Cap of half-space radius `radius` and contact angle `theta`.
    pub fn new(radius: T, theta: T) -> Result<Self> {
        check_theta(theta)?;
        if !(radius > T::zero() && radius.is_finite()) {
            return Err(FlowError::config("radius", format!("must be positive, got {radius}")));
        }
        let mut cap = Self { radius, theta, ball_radius: T::infinity(), center_height: -T::infinity() };
        for k in 0..=4 {
            let beta = T::FRAC_PI_2() * T::from_index(k) / T::lit(4.0);
            if !(cap.profile(beta) > T::zero()) {
                return Err(FlowError::NonPositiveProfile { beta: beta.to_f64_lossy() });
            }
        }
        let pts = [T::zero(), T::FRAC_PI_4(), T::FRAC_PI_2()].map(|b| cap.meridian_point(b));
        if let Some((lateral, axis, r)) = circumcircle(pts) {
            if lateral.abs() > T::tol(1e-10) * (T::one() + r) {
                return Err(FlowError::OffAxis { offset: lateral.to_f64_lossy() });
            }
            cap.ball_radius = r;
            cap.center_height = axis;
        }
        Ok(cap)
    }

    /// Half-space radius `R`.
    pub fn radius(&self) -> T {
        self.radius
    }

    pub fn theta(&self) -> T {
        self.theta
    }

    /// Radius `r` of the cap in the ball; infinite for the flat disk.
    pub fn ball_radius(&self) -> T {
        self.ball_radius
    }

    /// Signed height of the ball-model centre on the axis.
    pub fn center_height(&self) -> T {
        self.center_height
    }

    pub fn is_flat(&self) -> bool {
        !self.ball_radius.is_finite()
    }

    /// Principal curvature in the ball with respect to the normal pointing out
    /// of the enclosed region; positive when that region lies inside the cap sphere.
    pub fn ball_curvature(&self) -> T {
        if self.is_flat() {
            return T::zero();
        }
        let axis_point = self.meridian_point(T::zero()).1;
        if self.center_height < axis_point {
            T::one() / self.ball_radius
        } else {
            -T::one() / self.ball_radius
        }
    }

    /// `ψ(β)`.
    pub fn profile(&self, beta: T) -> T {
        let c = contact_cos(self.theta);
        let s = beta.sin();
        self.radius * (-c * beta.cos() + (T::one() - c * c * s * s).sqrt())
    }

    /// `log ψ(β)`.
    pub fn log_profile(&self, beta: T) -> T {
        self.profile(beta).ln()
    }

    /// Analytic `d/dβ log ψ`.
    pub fn log_profile_slope(&self, beta: T) -> T {
        let c = contact_cos(self.theta);
        let (s, co) = beta.sin_cos();
        let root = (T::one() - c * c * s * s).sqrt();
        let dpsi = self.radius * (c * s - c * c * s * co / root);
        dpsi / self.profile(beta)
    }

    /// Profile point mapped into the ball, as `(lateral, axis)`.
    pub fn meridian_point(&self, beta: T) -> (T, T) {
        let x = half_to_ball(&HalfSpacePoint::from_polar(self.profile(beta), beta, 2));
        (x.0[0], x.0[1])
    }

    /// Graph of the cap on `grid` with ghosts taken from the analytic profile.
    pub fn graph(&self, grid: Arc<AxisymmetricGrid<T>>) -> Result<RadialGraph<T>> {
        RadialGraph::from_fn(grid, self.theta, |b| self.log_profile(b))
    }
}

/// Equivalent name for [`SphericalCap::new`].
pub fn cap_profile<T: Real>(radius: T, theta: T) -> Result<SphericalCap<T>> {
    SphericalCap::new(radius, theta)
}

/// Sup norm of the right-hand side on the sampled cap.
pub fn is_static<T: Real>(cap: &SphericalCap<T>, grid: Arc<AxisymmetricGrid<T>>) -> Result<T> {
    let f = rhs_coefficient_form(&cap.graph(grid)?)?;
    Ok(f.iter().fold(T::zero(), |a, x| a.max(x.abs())))
}

/// Resolution used for cap volumes.
pub const CAP_VOLUME_RESOLUTION: usize = 1024;

/// Enclosed volume of a cap, Richardson-extrapolated from two fine grids.
pub fn cap_volume<T: Real>(cap: &SphericalCap<T>, n: usize) -> Result<T> {
    let fine = Arc::new(AxisymmetricGrid::new(n, CAP_VOLUME_RESOLUTION)?);
    let coarse = Arc::new(AxisymmetricGrid::new(n, CAP_VOLUME_RESOLUTION / 2)?);
    let vf = enclosed_volume(&cap.graph(fine)?)?;
    let vc = enclosed_volume(&cap.graph(coarse)?)?;
    Ok((T::lit(4.0) * vf - vc) / T::lit(3.0))
}

/// The cap with contact angle `theta` enclosing volume `volume`, found by bisection on `log R`.
pub fn cap_matching_volume<T: Real>(volume: T, theta: T, n: usize) -> Result<SphericalCap<T>> {
    check_theta(theta)?;
    let max = ball_volume::<T>(n);
    if !(volume > T::zero() && volume < max) {
        return Err(FlowError::VolumeOutOfRange {
            volume: volume.to_f64_lossy(),
            max: max.to_f64_lossy(),
        });
    }
    let vol = |log_r: T| -> Result<T> { cap_volume(&SphericalCap::new(log_r.exp(), theta)?, n) };
    let (mut lo, mut hi) = (T::lit(-2.0), T::lit(2.0));
    let (mut v_lo, mut v_hi) = (vol(lo)?, vol(hi)?);
    while v_lo >= volume {
        hi = lo;
        v_hi = v_lo;
        lo = lo - T::lit(2.0);
        if lo < T::lit(-30.0) {
            return Err(FlowError::VolumeOutOfRange { volume: volume.to_f64_lossy(), max: max.to_f64_lossy() });
        }
        v_lo = vol(lo)?;
    }
    while v_hi <= volume {
        lo = hi;
        v_lo = v_hi;
        hi = hi + T::lit(2.0);
        if hi > T::lit(30.0) {
            return Err(FlowError::VolumeOutOfRange { volume: volume.to_f64_lossy(), max: max.to_f64_lossy() });
        }
        v_hi = vol(hi)?;
    }
    let target = T::tol(1e-9) * volume;
    for _ in 0..200 {
        let mid = (lo + hi) / T::lit(2.0);
        let v_mid = vol(mid)?;
        if !(v_lo <= v_mid && v_mid <= v_hi) {
            return Err(FlowError::NonMonotone { radius: mid.exp().to_f64_lossy() });
        }
        if (v_mid - volume).abs() <= target || hi - lo <= T::epsilon() * T::lit(4.0) {
            return SphericalCap::new(mid.exp(), theta);
        }
        if v_mid < volume {
            lo = mid;
            v_lo = v_mid;
        } else {
            hi = mid;
            v_hi = v_mid;
        }
    }
    SphericalCap::new(((lo + hi) / T::lit(2.0)).exp(), theta)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn right_angle_profile_is_constant() {
        let cap = SphericalCap::new(0.7, PI / 2.0).unwrap();
        for k in 0..=10 {
            let b = PI / 2.0 * k as f64 / 10.0;
            assert!((cap.profile(b) - 0.7).abs() < 1e-15);
        }
    }

    #[test]
    fn axis_value() {
        for theta in [0.3f64, 1.0, 2.5] {
            let cap = SphericalCap::new(1.3, theta).unwrap();
            assert!((cap.profile(0.0) - 1.3 * (1.0 - theta.cos())).abs() < 1e-14);
        }
    }

    #[test]
    fn contact_slope_is_cot_theta() {
        for theta in [PI / 6.0, PI / 3.0, PI / 2.0, 2.0 * PI / 3.0, 2.9] {
            for r in [0.5, 1.0, 2.0] {
                let cap = SphericalCap::new(r, theta).unwrap();
                let s = cap.log_profile_slope(PI / 2.0);
                assert!((s - 1.0 / theta.tan()).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn fitted_center_obeys_contact_relation() {
        // R = 1, θ = π/3: the enclosed region lies outside the cap sphere.
        let cap = SphericalCap::new(1.0, PI / 3.0).unwrap();
        let r = cap.ball_radius();
        assert!(r.is_finite() && cap.ball_curvature() < 0.0);
        assert!((cap.center_height() - (r * r - r + 1.0).sqrt()).abs() < 1e-8);
        for theta in [PI / 6.0, PI / 3.0, 2.0 * PI / 3.0, 2.8] {
            for radius in [0.2, 0.5, 0.9, 1.1, 2.0, 5.0] {
                let cap = SphericalCap::new(radius, theta).unwrap();
                let r = cap.ball_radius();
                if r > 1e6 {
                    continue;
                }
                let sigma = cap.ball_curvature().signum();
                let expect = (r * r + 2.0 * sigma * r * theta.cos() + 1.0).sqrt();
                assert!((cap.center_height().abs() - expect).abs() < 1e-8 * (1.0 + r));
                assert_eq!(cap.center_height() < 0.0, sigma > 0.0);
            }
        }
    }

    #[test]
    fn flat_disk() {
        let cap = SphericalCap::new(1.0, PI / 2.0).unwrap();
        assert!(cap.is_flat());
        assert_eq!(cap.ball_curvature(), 0.0);
    }

    #[test]
    fn rejects_bad_parameters() {
        assert!(SphericalCap::new(-1.0, 1.0).is_err());
        assert!(SphericalCap::new(1.0, 0.0).is_err());
        assert!(SphericalCap::new(1.0, PI).is_err());
    }

    #[test]
    fn flat_disk_is_exactly_static() {
        let grid = Arc::new(AxisymmetricGrid::new(2, 64).unwrap());
        let cap = SphericalCap::new(1.0, PI / 2.0).unwrap();
        assert_eq!(is_static(&cap, grid).unwrap(), 0.0);
    }

    #[test]
    fn static_residual_is_small() {
        let grid = Arc::new(AxisymmetricGrid::new(2, 64).unwrap());
        let cap = SphericalCap::new(1.3, PI / 2.0).unwrap();
        assert!(is_static(&cap, grid).unwrap() <= 1e-3);
    }

    #[test]
    fn static_residual_order() {
        let res = |m| {
            let grid = Arc::new(AxisymmetricGrid::new(2, m).unwrap());
            is_static(&SphericalCap::new(1.0, PI / 3.0).unwrap(), grid).unwrap()
        };
        let ratio = res(128) / res(64);
        assert!((0.2..=0.3).contains(&ratio), "ratio {ratio}");
    }

    #[test]
    fn volume_matching() {
        let half = ball_volume::<f64>(2) / 2.0;
        let cap = cap_matching_volume(half, PI / 2.0, 2).unwrap();
        assert!((cap.radius() - 1.0).abs() < 1e-6);
        let cap = cap_matching_volume(half, PI / 3.0, 2).unwrap();
        let v = cap_volume(&cap, 2).unwrap();
        assert!((v / half - 1.0).abs() < 1e-6);
        let small = cap_matching_volume(1e-3, PI / 3.0, 2).unwrap();
        let tiny = cap_matching_volume(1e-5, PI / 3.0, 2).unwrap();
        assert!(tiny.radius() < small.radius() && small.radius() < cap.radius());
        assert!(cap_matching_volume(0.0, 1.0, 2).is_err());
        assert!(cap_matching_volume(ball_volume::<f64>(2), 1.0, 2).is_err());
    }
}
