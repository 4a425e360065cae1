//! Uniform node-centered grid on the polar angle of the upper hemisphere.

use crate::error::{FlowError, Result};
use crate::scalar::Real;

/// Measure of the unit `k`-sphere in R^{k+1}.
pub fn sphere_measure<T: Real>(k: usize) -> T {
    let two_pi = T::lit(2.0) * T::PI();
    match k {
        0 => T::lit(2.0),
        1 => two_pi,
        _ => two_pi / T::from_index(k - 1) * sphere_measure::<T>(k - 2),
    }
}

/// Volume of the unit ball in R^{k+1}.
pub fn ball_volume<T: Real>(k: usize) -> T {
    sphere_measure::<T>(k) / T::from_index(k + 1)
}

/// `∫_a^b sin^k(s) ds` by the reduction formula.
pub fn sin_power_integral<T: Real>(k: usize, a: T, b: T) -> T {
    match k {
        0 => b - a,
        1 => a.cos() - b.cos(),
        _ => {
            let kk = T::from_index(k);
            let edge = |s: T| -s.sin().powi(k as i32 - 1) * s.cos();
            (edge(b) - edge(a)) / kk
                + T::from_index(k - 1) / kk * sin_power_integral(k - 2, a, b)
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AxisymmetricGrid<T> {
    n: usize,
    m: usize,
    spacing: T,
    nodes: Vec<T>,
    quad_weights: Vec<T>,
    fiber_measure: T,
    cell_sin_pow: Vec<T>,
    sin: Vec<T>,
    cos: Vec<T>,
}

impl<T: Real> AxisymmetricGrid<T> {
    pub fn new(n: usize, m: usize) -> Result<Self> {
        if n < 2 {
            return Err(FlowError::config("n", format!("must be at least 2, got {n}")));
        }
        if m < 8 {
            return Err(FlowError::config("M", format!("must be at least 8, got {m}")));
        }
        Ok(Self::build(n, m))
    }

    /// Builds without the resolution guard; used for small illustrative grids.
    pub fn new_unchecked(n: usize, m: usize) -> Self {
        Self::build(n, m)
    }

    fn build(n: usize, m: usize) -> Self {
        let half_pi = T::FRAC_PI_2();
        let spacing = half_pi / T::from_index(m);
        let nodes: Vec<T> = (0..=m)
            .map(|j| if j == m { half_pi } else { T::from_index(j) * spacing })
            .collect();
        let sin_pow: Vec<T> = nodes.iter().map(|b| b.sin().powi(n as i32 - 1)).collect();
        let quad_weights = sin_pow
            .iter()
            .enumerate()
            .map(|(j, s)| {
                let w = spacing * *s;
                if j == 0 || j == m {
                    w / T::lit(2.0)
                } else {
                    w
                }
            })
            .collect();
        let half = spacing / T::lit(2.0);
        let cell_sin_pow = nodes
            .iter()
            .map(|b| sin_power_integral(n - 1, *b - half, *b + half) / spacing)
            .collect();
        let sin = nodes.iter().map(|b| b.sin()).collect();
        let cos = nodes.iter().map(|b| b.cos()).collect();
        Self {
            n,
            m,
            spacing,
            nodes,
            quad_weights,
            fiber_measure: sphere_measure(n - 1),
            cell_sin_pow,
            sin,
            cos,
        }
    }

    /// Hypersurface dimension.
    pub fn n(&self) -> usize {
        self.n
    }

    /// Number of intervals; nodes are `0..=m`.
    pub fn m(&self) -> usize {
        self.m
    }

    pub fn len(&self) -> usize {
        self.m + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn spacing(&self) -> T {
        self.spacing
    }

    pub fn nodes(&self) -> &[T] {
        &self.nodes
    }

    pub fn beta(&self, j: usize) -> T {
        self.nodes[j]
    }

    /// Trapezoid weights for `∫_0^{π/2} f sin^{n-1}β dβ`.
    pub fn quad_weights(&self) -> &[T] {
        &self.quad_weights
    }

    pub(crate) fn sin(&self) -> &[T] {
        &self.sin
    }

    pub(crate) fn cos(&self) -> &[T] {
        &self.cos
    }

    /// Mean of `sin^{n-1}` over `[β_j - Δβ/2, β_j + Δβ/2]`.
    pub(crate) fn cell_sin_pow(&self) -> &[T] {
        &self.cell_sin_pow
    }

    /// Measure of the unit (n-1)-sphere.
    pub fn fiber_measure(&self) -> T {
        self.fiber_measure
    }

    /// Exact measure of the upper hemisphere of S^n.
    pub fn hemisphere_measure(&self) -> T {
        self.fiber_measure * sin_power_integral(self.n - 1, T::zero(), T::FRAC_PI_2())
    }

    /// Quadrature of an axisymmetric function over S^n_+.
    pub fn integrate_hemisphere(&self, values: &[T]) -> Result<T> {
        self.check_len(values.len())?;
        if let Some(j) = values.iter().position(|v| !v.is_finite()) {
            return Err(FlowError::NonFinite { node: j, t: f64::NAN });
        }
        let s: T = values
            .iter()
            .zip(&self.quad_weights)
            .map(|(f, w)| *f * *w)
            .sum();
        Ok(self.fiber_measure * s)
    }

    pub(crate) fn check_len(&self, got: usize) -> Result<()> {
        if got != self.len() {
            return Err(FlowError::Length { expected: self.len(), got });
        }
        Ok(())
    }

    /// Second-order central first derivative at every node.
    pub fn d1(&self, values: &GhostedValues<T>) -> Result<Vec<T>> {
        self.check_len(values.interior.len())?;
        let (lo, hi) = values.ghosts()?;
        let two_h = T::lit(2.0) * self.spacing;
        let u = &values.interior;
        let m = self.m;
        Ok((0..=m)
            .map(|j| {
                let left = if j == 0 { lo } else { u[j - 1] };
                let right = if j == m { hi } else { u[j + 1] };
                (right - left) / two_h
            })
            .collect())
    }

    /// Second-order central second derivative at every node.
    pub fn d2(&self, values: &GhostedValues<T>) -> Result<Vec<T>> {
        self.check_len(values.interior.len())?;
        let (lo, hi) = values.ghosts()?;
        let h2 = self.spacing * self.spacing;
        let u = &values.interior;
        let m = self.m;
        Ok((0..=m)
            .map(|j| {
                let left = if j == 0 { lo } else { u[j - 1] };
                let right = if j == m { hi } else { u[j + 1] };
                (right - T::lit(2.0) * u[j] + left) / h2
            })
            .collect())
    }
}

/// Nodal values on `0..=M` plus the ghost slots at `-1` and `M+1`.
#[derive(Debug, Clone, PartialEq)]
pub struct GhostedValues<T> {
    interior: Vec<T>,
    pole_ghost: Option<T>,
    boundary_ghost: Option<T>,
}

impl<T: Real> GhostedValues<T> {
    pub fn new(interior: Vec<T>) -> Self {
        Self { interior, pole_ghost: None, boundary_ghost: None }
    }

    pub fn with_ghosts(interior: Vec<T>, pole_ghost: T, boundary_ghost: T) -> Self {
        Self { interior, pole_ghost: Some(pole_ghost), boundary_ghost: Some(boundary_ghost) }
    }

    pub fn interior(&self) -> &[T] {
        &self.interior
    }

    pub fn interior_mut(&mut self) -> &mut [T] {
        self.pole_ghost = None;
        self.boundary_ghost = None;
        &mut self.interior
    }

    pub fn pole_ghost(&self) -> Option<T> {
        self.pole_ghost
    }

    pub fn boundary_ghost(&self) -> Option<T> {
        self.boundary_ghost
    }

    pub fn set_pole_ghost(&mut self, value: T) {
        self.pole_ghost = Some(value);
    }

    pub fn set_boundary_ghost(&mut self, value: T) {
        self.boundary_ghost = Some(value);
    }

    pub fn ghosts(&self) -> Result<(T, T)> {
        match (self.pole_ghost, self.boundary_ghost) {
            (Some(a), Some(b)) => Ok((a, b)),
            (None, _) => Err(FlowError::GhostsUnpopulated("pole")),
            (_, None) => Err(FlowError::GhostsUnpopulated("boundary")),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn sampled(grid: &AxisymmetricGrid<f64>, f: impl Fn(f64) -> f64) -> GhostedValues<f64> {
        let h = grid.spacing();
        let vals = grid.nodes().iter().map(|&b| f(b)).collect();
        GhostedValues::with_ghosts(vals, f(-h), f(PI / 2.0 + h))
    }

    #[test]
    fn rejects_small_inputs() {
        assert!(matches!(AxisymmetricGrid::<f64>::new(1, 64), Err(FlowError::Config { .. })));
        assert!(matches!(AxisymmetricGrid::<f64>::new(2, 7), Err(FlowError::Config { .. })));
    }

    #[test]
    fn coarse_nodes_are_uniform() {
        let g = AxisymmetricGrid::<f64>::new_unchecked(2, 4);
        let expect = [0.0, PI / 8.0, PI / 4.0, 3.0 * PI / 8.0, PI / 2.0];
        for (a, b) in g.nodes().iter().zip(expect) {
            assert!((a - b).abs() < 1e-15);
        }
        assert_eq!(g.nodes()[4], PI / 2.0);
    }

    #[test]
    fn sphere_measures() {
        assert!((sphere_measure::<f64>(2) - 4.0 * PI).abs() < 1e-13);
        assert!((sphere_measure::<f64>(3) - 2.0 * PI * PI).abs() < 1e-13);
        assert!((ball_volume::<f64>(2) - 4.0 * PI / 3.0).abs() < 1e-13);
    }

    #[test]
    fn hemisphere_quadrature() {
        let g2 = AxisymmetricGrid::<f64>::new(2, 64).unwrap();
        let one = vec![1.0; g2.len()];
        assert!((g2.integrate_hemisphere(&one).unwrap() / (2.0 * PI) - 1.0).abs() < 1e-3);
        let g3 = AxisymmetricGrid::<f64>::new(3, 64).unwrap();
        let one = vec![1.0; g3.len()];
        assert!((g3.integrate_hemisphere(&one).unwrap() / (PI * PI) - 1.0).abs() < 1e-3);
        assert!((g3.hemisphere_measure() - PI * PI).abs() < 1e-12);
        let zero = vec![0.0; g3.len()];
        assert_eq!(g3.integrate_hemisphere(&zero).unwrap(), 0.0);
    }

    #[test]
    fn quadrature_of_cosine_converges() {
        let err = |m| {
            let g = AxisymmetricGrid::<f64>::new(2, m).unwrap();
            let f: Vec<f64> = g.nodes().iter().map(|b| b.cos()).collect();
            (g.integrate_hemisphere(&f).unwrap() - PI).abs()
        };
        assert!(err(64) < 1e-3);
        assert!(err(32) / err(64) >= 4.0 - 1e-6);
    }

    #[test]
    fn non_finite_input_rejected() {
        let g = AxisymmetricGrid::<f64>::new(2, 8).unwrap();
        let mut f = vec![1.0; g.len()];
        f[3] = f64::NAN;
        assert!(g.integrate_hemisphere(&f).is_err());
    }

    #[test]
    fn derivatives() {
        let g = AxisymmetricGrid::<f64>::new(2, 64).unwrap();
        let c = sampled(&g, |_| 3.0);
        assert!(g.d1(&c).unwrap().iter().all(|d| d.abs() < 1e-12));
        let q = sampled(&g, |b| b * b);
        assert!(g.d2(&q).unwrap().iter().all(|d| (d - 2.0).abs() < 1e-9));
        assert!(g.d1(&q).unwrap().iter().zip(g.nodes()).all(|(d, b)| (d - 2.0 * b).abs() < 1e-10));
        let s = sampled(&g, f64::sin);
        let d = g.d1(&s).unwrap()[32];
        let h = g.spacing();
        assert!((d - (PI / 4.0).cos()).abs() < h * h);
    }

    #[test]
    fn missing_ghosts_are_an_error() {
        let g = AxisymmetricGrid::<f64>::new(2, 8).unwrap();
        let mut v = GhostedValues::new(vec![0.0; g.len()]);
        assert_eq!(g.d1(&v), Err(FlowError::GhostsUnpopulated("pole")));
        v.set_pole_ghost(0.0);
        assert_eq!(g.d2(&v), Err(FlowError::GhostsUnpopulated("boundary")));
        v.set_boundary_ghost(0.0);
        assert!(g.d2(&v).is_ok());
        v.interior_mut()[0] = 1.0;
        assert!(g.d1(&v).is_err());
    }
}
