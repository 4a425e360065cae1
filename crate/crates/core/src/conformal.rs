//! The conformal map between the unit ball and the upper half-space.
//!
//! Points carry `n + 1` coordinates with the axis coordinate last. The map
//! sends the south pole of the ball to the half-space origin and the boundary
//! sphere to the hyperplane `y_{n+1} = 0`.

use crate::error::{FlowError, Result};
use crate::scalar::Real;

#[derive(Debug, Clone, PartialEq)]
pub struct BallPoint<T>(pub Vec<T>);

#[derive(Debug, Clone, PartialEq)]
pub struct HalfSpacePoint<T>(pub Vec<T>);

fn norm_sq<T: Real>(v: &[T]) -> T {
    v.iter().map(|c| *c * *c).sum()
}

pub(crate) fn dot<T: Real>(a: &[T], b: &[T]) -> T {
    a.iter().zip(b).map(|(x, y)| *x * *y).sum()
}

pub(crate) fn norm<T: Real>(v: &[T]) -> T {
    norm_sq(v).sqrt()
}

impl<T: Real> BallPoint<T> {
    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn axis(&self) -> T {
        *self.0.last().expect("empty point")
    }

    pub fn norm(&self) -> T {
        norm(&self.0)
    }
}

impl<T: Real> HalfSpacePoint<T> {
    /// Point `ρ(sin β e_1 + cos β e_{n+1})` in the meridian plane of `R^{dim}`.
    pub fn from_polar(rho: T, beta: T, dim: usize) -> Self {
        let mut y = vec![T::zero(); dim];
        y[0] = rho * beta.sin();
        y[dim - 1] = rho * beta.cos();
        Self(y)
    }

    /// `(ρ, β)` with `y_{n+1} = ρ cos β` and `|y| = ρ sin β`.
    pub fn polar(&self) -> (T, T) {
        let k = self.0.len() - 1;
        let lateral = norm(&self.0[..k]);
        let rho = norm(&self.0);
        (rho, lateral.atan2(self.0[k]))
    }

    pub fn axis(&self) -> T {
        *self.0.last().expect("empty point")
    }
}

fn singular_distance_sq<T: Real>(x: &[T]) -> T {
    let k = x.len() - 1;
    norm_sq(&x[..k]) + (x[k] - T::one()).powi(2)
}

fn guard<T: Real>(x: &[T]) -> Result<T> {
    let d = singular_distance_sq(x);
    if d.sqrt() < T::lit(1e-14) || d == T::zero() {
        return Err(FlowError::SingularPoint(x.iter().map(|c| c.to_f64_lossy()).collect()));
    }
    Ok(d)
}

pub fn ball_to_half<T: Real>(x: &BallPoint<T>) -> Result<HalfSpacePoint<T>> {
    let d = guard(&x.0)?;
    let k = x.0.len() - 1;
    let mut y: Vec<T> = x.0.iter().map(|c| T::lit(2.0) * *c / d).collect();
    y[k] = (T::one() - norm_sq(&x.0)) / d;
    Ok(HalfSpacePoint(y))
}

pub fn half_to_ball<T: Real>(y: &HalfSpacePoint<T>) -> BallPoint<T> {
    let k = y.0.len() - 1;
    let lateral = norm_sq(&y.0[..k]);
    let d = lateral + (y.0[k] + T::one()).powi(2);
    let mut x: Vec<T> = y.0.iter().map(|c| T::lit(2.0) * *c / d).collect();
    x[k] = (lateral + y.0[k] * y.0[k] - T::one()) / d;
    BallPoint(x)
}

/// Factor `λ` with `φ*(δ_half) = λ δ_ball`.
pub fn conformal_factor<T: Real>(x: &BallPoint<T>) -> Result<T> {
    let d = guard(&x.0)?;
    Ok(T::lit(4.0) / (d * d))
}

/// `w = log(2 / (ρ² + 2ρ cos β + 1))`, so that `δ_ball = e^{2w} δ_half` at `(ρ, β)`.
pub fn w_scalar<T: Real>(rho: T, beta: T) -> T {
    T::LN_2() - (rho * rho + T::lit(2.0) * rho * beta.cos() + T::one()).ln()
}

/// `e^w` without the logarithm.
pub fn exp_w<T: Real>(rho: T, beta: T) -> T {
    T::lit(2.0) / (rho * rho + T::lit(2.0) * rho * beta.cos() + T::one())
}

/// Conformal Killing field `X_a = <x,a>x - (|x|²+1)a/2` for `a = -e_{n+1}`.
pub fn x_a_field<T: Real>(x: &BallPoint<T>) -> Vec<T> {
    let k = x.0.len() - 1;
    let xa = -x.0[k];
    let half = (norm_sq(&x.0) + T::one()) / T::lit(2.0);
    let mut out: Vec<T> = x.0.iter().map(|c| xa * *c).collect();
    out[k] = out[k] + half;
    out
}

/// Central finite-difference image of the tangent vector `v` at `y` under `φ⁻¹`.
pub fn push_half_to_ball<T: Real>(y: &HalfSpacePoint<T>, v: &[T], step: T) -> Vec<T> {
    let shifted = |s: T| {
        HalfSpacePoint(y.0.iter().zip(v).map(|(a, b)| *a + s * *b).collect::<Vec<T>>())
    };
    let plus = half_to_ball(&shifted(step));
    let minus = half_to_ball(&shifted(-step));
    plus.0
        .iter()
        .zip(&minus.0)
        .map(|(p, m)| (*p - *m) / (T::lit(2.0) * step))
        .collect()
}
