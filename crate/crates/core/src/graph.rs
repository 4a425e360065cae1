//! Radial graphs `ρ = e^u` over the upper hemisphere and their pointwise geometry.

use std::sync::Arc;

use crate::conformal::exp_w;
use crate::error::{FlowError, Result};
use crate::flow::{apply_boundary, pole_symmetry};
use crate::grid::{AxisymmetricGrid, GhostedValues};
use crate::scalar::Real;

#[derive(Debug, Clone, PartialEq)]
pub struct RadialGraph<T> {
    grid: Arc<AxisymmetricGrid<T>>,
    u: GhostedValues<T>,
    t: T,
    theta: T,
    boundary_sign: T,
}

pub(crate) fn check_theta<T: Real>(theta: T) -> Result<()> {
    if !(theta > T::zero() && theta < T::PI()) {
        return Err(FlowError::config("theta", format!("must lie in (0, pi), got {theta}")));
    }
    Ok(())
}

/// `cos θ`, snapped to zero within a few ulps so that the right angle is represented exactly.
pub fn contact_cos<T: Real>(theta: T) -> T {
    let c = theta.cos();
    if c.abs() <= T::lit(4.0) * T::epsilon() {
        T::zero()
    } else {
        c
    }
}

/// `cot θ` consistent with [`contact_cos`].
pub fn contact_cot<T: Real>(theta: T) -> T {
    contact_cos(theta) / theta.sin()
}

impl<T: Real> RadialGraph<T> {
    /// Graph with unpopulated ghosts.
    pub fn new(grid: Arc<AxisymmetricGrid<T>>, u: Vec<T>, theta: T) -> Result<Self> {
        check_theta(theta)?;
        grid.check_len(u.len())?;
        if let Some(node) = u.iter().position(|x| !x.is_finite()) {
            return Err(FlowError::NonFinite { node, t: 0.0 });
        }
        Ok(Self {
            grid,
            u: GhostedValues::new(u),
            t: T::zero(),
            theta,
            boundary_sign: T::one(),
        })
    }

    /// Samples `f` at the nodes and fills both ghosts from `f` itself.
    pub fn from_fn(
        grid: Arc<AxisymmetricGrid<T>>,
        theta: T,
        f: impl Fn(T) -> T,
    ) -> Result<Self> {
        let u = grid.nodes().iter().map(|b| f(*b)).collect();
        let h = grid.spacing();
        let mut g = Self::new(grid, u, theta)?;
        g.u.set_pole_ghost(f(-h));
        g.u.set_boundary_ghost(f(T::FRAC_PI_2() + h));
        Ok(g)
    }

    /// Samples `f` at the nodes and imposes the discrete pole and boundary conditions.
    pub fn from_fn_with_bc(
        grid: Arc<AxisymmetricGrid<T>>,
        theta: T,
        f: impl Fn(T) -> T,
    ) -> Result<Self> {
        let u = grid.nodes().iter().map(|b| f(*b)).collect();
        let mut g = Self::new(grid, u, theta)?;
        g.impose_ghosts();
        Ok(g)
    }

    /// Sign multiplying the prescribed boundary slope; `+1` is the physical convention.
    pub fn with_boundary_sign(mut self, sign: T) -> Self {
        self.boundary_sign = sign;
        self
    }

    pub fn with_time(mut self, t: T) -> Self {
        self.t = t;
        self
    }

    /// Re-imposes pole symmetry and the capillary condition on the ghosts.
    pub fn impose_ghosts(&mut self) {
        pole_symmetry(self);
        apply_boundary(self);
    }

    pub fn grid(&self) -> &AxisymmetricGrid<T> {
        &self.grid
    }

    pub fn grid_arc(&self) -> &Arc<AxisymmetricGrid<T>> {
        &self.grid
    }

    pub fn u(&self) -> &[T] {
        self.u.interior()
    }

    pub fn values(&self) -> &GhostedValues<T> {
        &self.u
    }

    pub fn values_mut(&mut self) -> &mut GhostedValues<T> {
        &mut self.u
    }

    pub fn t(&self) -> T {
        self.t
    }

    pub fn set_t(&mut self, t: T) {
        self.t = t;
    }

    pub fn theta(&self) -> T {
        self.theta
    }

    pub fn boundary_sign(&self) -> T {
        self.boundary_sign
    }

    pub fn n(&self) -> usize {
        self.grid.n()
    }

    pub fn rho(&self) -> Vec<T> {
        self.u().iter().map(|u| u.exp()).collect()
    }
}

/// First and second β-derivatives plus the pole-regularised `cot β · u_β`.
pub(crate) struct Derivatives<T> {
    pub u_b: Vec<T>,
    pub u_bb: Vec<T>,
    pub cot_ub: Vec<T>,
}

pub(crate) fn derivatives<T: Real>(graph: &RadialGraph<T>) -> Result<Derivatives<T>> {
    let grid = graph.grid();
    let u_b = grid.d1(graph.values())?;
    let u_bb = grid.d2(graph.values())?;
    let cot_ub = grid
        .nodes()
        .iter()
        .enumerate()
        .map(|(j, b)| if j == 0 { u_bb[0] } else { b.cos() / b.sin() * u_b[j] })
        .collect();
    Ok(Derivatives { u_b, u_bb, cot_ub })
}

#[derive(Debug, Clone, PartialEq)]
pub struct Curvatures<T> {
    pub mean: Vec<T>,
    pub kappa_beta: Vec<T>,
    /// Multiplicity `n - 1`.
    pub kappa_tan: Vec<T>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SpeedTerms<T> {
    /// `<x, a>`
    pub x_dot_a: Vec<T>,
    /// `<ν, a>`
    pub nu_dot_a: Vec<T>,
    /// `<X_a, ν>`
    pub support: Vec<T>,
}

/// Per-node geometry of a radial graph in both models.
#[derive(Debug, Clone, PartialEq)]
pub struct GeometryFields<T> {
    pub rho: Vec<T>,
    pub u_beta: Vec<T>,
    pub u_betabeta: Vec<T>,
    pub v: Vec<T>,
    pub w: Vec<T>,
    pub exp_w: Vec<T>,
    pub half: Curvatures<T>,
    pub ball: Curvatures<T>,
    pub speed: SpeedTerms<T>,
}

impl<T: Real> GeometryFields<T> {
    pub fn support_xa(&self) -> &[T] {
        &self.speed.support
    }
}

fn half_from<T: Real>(n: usize, u: &[T], d: &Derivatives<T>) -> Curvatures<T> {
    let nm1 = T::from_index(n - 1);
    let len = u.len();
    let mut out = Curvatures {
        mean: Vec::with_capacity(len),
        kappa_beta: Vec::with_capacity(len),
        kappa_tan: Vec::with_capacity(len),
    };
    for j in 0..len {
        let p = d.u_b[j];
        let v2 = T::one() + p * p;
        let v = v2.sqrt();
        let e = (-u[j]).exp();
        let kb = e * (v2 - d.u_bb[j]) / (v2 * v);
        let kt = e * (T::one() - d.cot_ub[j]) / v;
        out.kappa_beta.push(kb);
        out.kappa_tan.push(kt);
        out.mean.push(kb + nm1 * kt);
    }
    out
}

pub fn half_space_curvatures<T: Real>(graph: &RadialGraph<T>) -> Result<Curvatures<T>> {
    let d = derivatives(graph)?;
    Ok(half_from(graph.n(), graph.u(), &d))
}

pub fn ball_curvatures<T: Real>(graph: &RadialGraph<T>) -> Result<Curvatures<T>> {
    Ok(geometry_fields(graph)?.ball)
}

pub fn support_and_speed_terms<T: Real>(graph: &RadialGraph<T>) -> Result<SpeedTerms<T>> {
    Ok(geometry_fields(graph)?.speed)
}

pub fn geometry_fields<T: Real>(graph: &RadialGraph<T>) -> Result<GeometryFields<T>> {
    let d = derivatives(graph)?;
    let n = graph.n();
    let nm1 = T::from_index(n - 1);
    let half = half_from(n, graph.u(), &d);
    let nodes = graph.grid().nodes();
    let len = nodes.len();
    let two = T::lit(2.0);

    let mut f = GeometryFields {
        rho: Vec::with_capacity(len),
        u_beta: d.u_b.clone(),
        u_betabeta: d.u_bb.clone(),
        v: Vec::with_capacity(len),
        w: Vec::with_capacity(len),
        exp_w: Vec::with_capacity(len),
        ball: Curvatures {
            mean: Vec::with_capacity(len),
            kappa_beta: Vec::with_capacity(len),
            kappa_tan: Vec::with_capacity(len),
        },
        speed: SpeedTerms {
            x_dot_a: Vec::with_capacity(len),
            nu_dot_a: Vec::with_capacity(len),
            support: Vec::with_capacity(len),
        },
        half,
    };

    for (j, &beta) in nodes.iter().enumerate() {
        let rho = graph.u()[j].exp();
        let p = d.u_b[j];
        let v = (T::one() + p * p).sqrt();
        let ew = exp_w(rho, beta);
        let (s, c) = beta.sin_cos();
        // D_ν e^{-w}
        let dd = (rho + c + s * p) / v;
        let kb = f.half.kappa_beta[j] / ew - dd;
        let kt = f.half.kappa_tan[j] / ew - dd;
        let support = ew * rho / v;
        if !(support.is_finite() && support > T::zero()) {
            return Err(FlowError::StarShapedness {
                node: j,
                t: graph.t().to_f64_lossy(),
                support: support.to_f64_lossy(),
            });
        }
        let r2m1 = rho * rho - T::one();
        f.rho.push(rho);
        f.v.push(v);
        f.w.push(ew.ln());
        f.exp_w.push(ew);
        f.ball.kappa_beta.push(kb);
        f.ball.kappa_tan.push(kt);
        f.ball.mean.push(kb + nm1 * kt);
        f.speed.x_dot_a.push(-r2m1 * ew / two);
        f.speed.nu_dot_a.push(
            -(ew / (two * v)) * (rho * rho * c + two * rho + c) + ew * r2m1 * s * p / (two * v),
        );
        f.speed.support.push(support);
    }
    Ok(f)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn grid(n: usize, m: usize) -> Arc<AxisymmetricGrid<f64>> {
        Arc::new(AxisymmetricGrid::new(n, m).unwrap())
    }

    #[test]
    fn unit_hemisphere() {
        let g = RadialGraph::from_fn(grid(3, 16), PI / 3.0, |_| 0.0).unwrap();
        let c = half_space_curvatures(&g).unwrap();
        for j in 0..=16 {
            assert!((c.mean[j] - 3.0).abs() < 1e-14);
            assert!((c.kappa_beta[j] - 1.0).abs() < 1e-14);
            assert!((c.kappa_tan[j] - 1.0).abs() < 1e-14);
        }
        let f = geometry_fields(&g).unwrap();
        for j in 0..=16 {
            assert!(f.ball.kappa_beta[j].abs() < 1e-14);
            assert!(f.ball.kappa_tan[j].abs() < 1e-14);
            assert!(f.ball.mean[j].abs() < 1e-14);
            assert!(f.speed.x_dot_a[j].abs() < 1e-15);
            assert!(f.speed.support[j] >= 0.5);
        }
        assert!((f.speed.nu_dot_a[16] + 1.0).abs() < 1e-14);
    }

    #[test]
    fn constant_profile_scales_curvature() {
        let c0 = 0.4;
        let g = RadialGraph::from_fn(grid(2, 16), PI / 2.0, |_| c0).unwrap();
        let c = half_space_curvatures(&g).unwrap();
        let e = (-c0).exp();
        assert!(c.kappa_beta.iter().all(|k| (k - e).abs() < 1e-14));
        assert!(c.mean.iter().all(|k| (k - 2.0 * e).abs() < 1e-14));
    }

    #[test]
    fn pole_needs_ghost() {
        let g = RadialGraph::new(grid(2, 16), vec![0.0; 17], 1.0).unwrap();
        assert!(matches!(half_space_curvatures(&g), Err(FlowError::GhostsUnpopulated(_))));
    }

    #[test]
    fn traces_hold() {
        let g = RadialGraph::from_fn(grid(3, 32), 1.1, |b| 0.2 * (2.0 * b).cos() - 0.1).unwrap();
        let f = geometry_fields(&g).unwrap();
        for j in 0..=32 {
            let h = f.half.kappa_beta[j] + 2.0 * f.half.kappa_tan[j];
            assert!((h - f.half.mean[j]).abs() < 1e-12);
            let hb = f.ball.kappa_beta[j] + 2.0 * f.ball.kappa_tan[j];
            assert!((hb - f.ball.mean[j]).abs() < 1e-12);
        }
    }

    #[test]
    fn rejects_bad_input() {
        assert!(RadialGraph::new(grid(2, 8), vec![0.0; 9], 0.0).is_err());
        assert!(RadialGraph::new(grid(2, 8), vec![0.0; 8], 1.0).is_err());
        let mut u = vec![0.0; 9];
        u[2] = f64::INFINITY;
        assert!(RadialGraph::new(grid(2, 8), u, 1.0).is_err());
    }
}
