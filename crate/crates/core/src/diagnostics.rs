//! Ball-metric functionals and identity residuals of a radial graph.

use serde::{Deserialize, Serialize};

use crate::conformal::{dot, half_to_ball, norm, push_half_to_ball, BallPoint, HalfSpacePoint};
use crate::error::{FlowError, Result};
use crate::flow::{flow_velocity, stable_time_step, step_by, FlowConfig, FlowState};
use crate::graph::{contact_cos, contact_cot, geometry_fields, GeometryFields, RadialGraph};
use crate::grid::{ball_volume, sin_power_integral, sphere_measure};
use crate::scalar::{pairs, Real};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiagnosticsRecord<T> {
    pub t: T,
    pub volume: T,
    pub area: T,
    pub wetting: T,
    pub energy: T,
    pub umbilicity: T,
    pub bc_residual: T,
    pub sup_v: T,
    pub minkowski_residual: T,
    pub prop21_residual: T,
    pub prop22_residual: T,
}

impl<T: Real> DiagnosticsRecord<T> {
    pub const COLUMNS: [&'static str; 11] = [
        "t",
        "volume",
        "area",
        "wetting",
        "energy",
        "umbilicity",
        "bc_residual",
        "sup_v",
        "minkowski_residual",
        "prop21_residual",
        "prop22_residual",
    ];

    pub fn values(&self) -> [T; 11] {
        [
            self.t,
            self.volume,
            self.area,
            self.wetting,
            self.energy,
            self.umbilicity,
            self.bc_residual,
            self.sup_v,
            self.minkowski_residual,
            self.prop21_residual,
            self.prop22_residual,
        ]
    }
}

/// Step for finite-difference pushforwards: `1e-6` in double precision, `ε^{1/3}` otherwise.
fn fd_step<T: Real>() -> T {
    if T::epsilon() < T::lit(1e-10) {
        T::lit(1e-6)
    } else {
        T::epsilon().cbrt()
    }
}

fn half_point<T: Real>(rho: T, beta: T, dim: usize) -> HalfSpacePoint<T> {
    HalfSpacePoint::from_polar(rho, beta, dim)
}

/// Unit normal of the graph in the half-space, `(∂_ρ - ρ⁻¹∇u)/v`.
fn half_normal<T: Real>(beta: T, u_beta: T, dim: usize) -> Vec<T> {
    let (s, c) = beta.sin_cos();
    let v = (T::one() + u_beta * u_beta).sqrt();
    let mut nu = vec![T::zero(); dim];
    nu[0] = (s - u_beta * c) / v;
    nu[dim - 1] = (c + u_beta * s) / v;
    nu
}

/// Unit normal in the ball obtained by pushing the half-space normal through `φ⁻¹`.
fn ball_normal<T: Real>(rho: T, beta: T, u_beta: T, dim: usize) -> Vec<T> {
    let y = half_point(rho, beta, dim);
    let pushed = push_half_to_ball(&y, &half_normal(beta, u_beta, dim), fd_step());
    let len = norm(&pushed);
    pushed.into_iter().map(|c| c / len).collect()
}

/// Geometry of the boundary sphere `∂Σ ⊂ S^n`.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundaryGeometry<T> {
    pub point: BallPoint<T>,
    /// Polar angle of `∂Σ` on `S^n` measured from the north pole.
    pub polar_angle: T,
    /// Unit normal of `Σ` along `∂Σ`.
    pub normal: Vec<T>,
    /// Unit conormal of `∂Σ` inside `S^n`.
    pub conormal: Vec<T>,
    /// `(n-1)`-measure of `∂Σ`.
    pub length: T,
    /// `<ν̄, a>`.
    pub conormal_dot_a: T,
}

struct Evaluation<T> {
    fields: GeometryFields<T>,
    /// Ball area element at the nodes (without quadrature weights).
    area_density: Vec<T>,
    n: usize,
    theta: T,
}

impl<T: Real> Evaluation<T> {
    fn new(graph: &RadialGraph<T>) -> Result<Self> {
        let fields = geometry_fields(graph)?;
        let n = graph.n();
        let area_density = fields
            .exp_w
            .iter()
            .zip(&fields.rho)
            .zip(&fields.v)
            .map(|((ew, rho), v)| (*ew * *rho).powi(n as i32) * *v)
            .collect();
        Ok(Self { fields, area_density, n, theta: graph.theta() })
    }

    fn integrate(&self, graph: &RadialGraph<T>, f: impl Fn(usize) -> T) -> Result<T> {
        let vals: Vec<T> = (0..self.area_density.len()).map(|j| f(j) * self.area_density[j]).collect();
        graph.grid().integrate_hemisphere(&vals)
    }

    fn ball_h(&self, j: usize) -> T {
        self.fields.ball.mean[j]
    }
}

pub fn boundary_geometry<T: Real>(graph: &RadialGraph<T>) -> Result<BoundaryGeometry<T>> {
    let grid = graph.grid();
    let m = grid.m();
    let n = graph.n();
    let dim = n + 1;
    let u_b = grid.d1(graph.values())?[m];
    let rho = graph.u()[m].exp();
    let beta = grid.beta(m);
    let point = half_to_ball(&half_point(rho, beta, dim));
    let normal = ball_normal(rho, beta, u_b, dim);
    let lateral = point.0[0];
    let polar_angle = lateral.atan2(point.axis());
    let nn = dot(&normal, &point.0) / dot(&point.0, &point.0);
    let raw: Vec<T> = normal.iter().zip(&point.0).map(|(a, b)| *a - nn * *b).collect();
    let len = norm(&raw);
    let conormal: Vec<T> = raw.into_iter().map(|c| c / len).collect();
    let radius = polar_angle.sin();
    Ok(BoundaryGeometry {
        length: sphere_measure::<T>(n - 1) * radius.powi(n as i32 - 1),
        conormal_dot_a: -conormal[n],
        point,
        polar_angle,
        normal,
        conormal,
    })
}

fn wetting_from_angle<T: Real>(n: usize, alpha: T) -> T {
    sphere_measure::<T>(n - 1) * sin_power_integral(n - 1, alpha, T::PI())
}

/// Ball-metric area of `Σ` and the area of the wetted region of `S^n`.
pub fn area_and_wetting<T: Real>(graph: &RadialGraph<T>) -> Result<(T, T)> {
    let ev = Evaluation::new(graph)?;
    let bg = boundary_geometry(graph)?;
    Ok((ev.integrate(graph, |_| T::one())?, wetting_from_angle(graph.n(), bg.polar_angle)))
}

fn support_terms<T: Real>(graph: &RadialGraph<T>, ev: &Evaluation<T>) -> Vec<T> {
    let dim = graph.n() + 1;
    graph
        .grid()
        .nodes()
        .iter()
        .enumerate()
        .map(|(j, &beta)| {
            let rho = ev.fields.rho[j];
            let x = half_to_ball(&half_point(rho, beta, dim));
            dot(&x.0, &ball_normal(rho, beta, ev.fields.u_beta[j], dim))
        })
        .collect()
}

fn volume_from<T: Real>(
    graph: &RadialGraph<T>,
    ev: &Evaluation<T>,
    bg: &BoundaryGeometry<T>,
    flipped: bool,
) -> Result<T> {
    let n = graph.n();
    let xnu = support_terms(graph, ev);
    let sign = if flipped { -T::one() } else { T::one() };
    let mut wet = wetting_from_angle(n, bg.polar_angle);
    if flipped {
        wet = sphere_measure::<T>(n) - wet;
    }
    let flux = ev.integrate(graph, |j| sign * xnu[j])?;
    let vol = (flux + wet) / T::from_index(n + 1);
    let max = ball_volume::<T>(n);
    if !(vol > T::zero() && vol < max) {
        return Err(FlowError::Orientation { volume: vol.to_f64_lossy(), max: max.to_f64_lossy() });
    }
    Ok(vol)
}

/// Ball volume of the region `Ω` bounded by `Σ` and the wetted part of `S^n`.
pub fn enclosed_volume<T: Real>(graph: &RadialGraph<T>) -> Result<T> {
    enclosed_volume_oriented(graph, false)
}

/// As [`enclosed_volume`]; with `flipped` the normal is reversed and the complement is measured.
pub fn enclosed_volume_oriented<T: Real>(graph: &RadialGraph<T>, flipped: bool) -> Result<T> {
    let ev = Evaluation::new(graph)?;
    let bg = boundary_geometry(graph)?;
    volume_from(graph, &ev, &bg, flipped)
}

fn minkowski_from<T: Real>(graph: &RadialGraph<T>, ev: &Evaluation<T>) -> Result<T> {
    let n = T::from_index(ev.n);
    let ct = contact_cos(ev.theta);
    let s = &ev.fields.speed;
    ev.integrate(graph, |j| {
        n * s.x_dot_a[j] + n * ct * s.nu_dot_a[j] - ev.ball_h(j) * s.support[j]
    })
}

fn prop21_from<T: Real>(
    graph: &RadialGraph<T>,
    ev: &Evaluation<T>,
    bg: &BoundaryGeometry<T>,
) -> Result<T> {
    let nm1 = ev.n - 1;
    let k = &ev.fields.ball;
    let s = &ev.fields.speed;
    let lhs = ev.integrate(graph, |j| ev.ball_h(j) * s.x_dot_a[j])?;
    let sigma2 = ev.integrate(graph, |j| {
        let (kb, kt) = (k.kappa_beta[j], k.kappa_tan[j]);
        (kb * T::from_index(nm1) * kt + pairs::<T>(nm1) * kt * kt) * s.support[j]
    })?;
    let m = graph.grid().m();
    let boundary = -contact_cos(ev.theta) * bg.conormal_dot_a * k.kappa_tan[m] * bg.length;
    Ok(lhs - (T::lit(2.0) / T::from_index(nm1) * sigma2 + boundary))
}

fn prop22_from<T: Real>(
    graph: &RadialGraph<T>,
    ev: &Evaluation<T>,
    bg: &BoundaryGeometry<T>,
) -> Result<T> {
    let nm1 = T::from_index(ev.n - 1);
    let s = &ev.fields.speed;
    let lhs = nm1 * ev.integrate(graph, |j| ev.ball_h(j) * s.nu_dot_a[j])?;
    let m = graph.grid().m();
    let rhs = nm1 * ev.fields.ball.kappa_tan[m] * bg.conormal_dot_a * bg.length;
    Ok(lhs - rhs)
}

fn check_dimension<T: Real>(graph: &RadialGraph<T>) -> Result<()> {
    if graph.n() < 2 {
        return Err(FlowError::config("n", "identity needs n >= 2"));
    }
    Ok(())
}

/// `∫ (n<x,a> + n cos θ <ν,a> - H <X_a,ν>) dA`.
pub fn minkowski_residual<T: Real>(graph: &RadialGraph<T>) -> Result<T> {
    minkowski_from(graph, &Evaluation::new(graph)?)
}

/// Left minus right side of the `σ₂` Minkowski-type identity with its capillary boundary term.
pub fn prop21_residual<T: Real>(graph: &RadialGraph<T>) -> Result<T> {
    check_dimension(graph)?;
    prop21_from(graph, &Evaluation::new(graph)?, &boundary_geometry(graph)?)
}

/// Left minus right side of `(n-1)∫H<ν,a> dA = ∫_{∂Σ}(H - h(μ,μ))<ν̄,a>`.
pub fn prop22_residual<T: Real>(graph: &RadialGraph<T>) -> Result<T> {
    check_dimension(graph)?;
    prop22_from(graph, &Evaluation::new(graph)?, &boundary_geometry(graph)?)
}

fn deficit_from<T: Real>(ev: &Evaluation<T>) -> T {
    let k = &ev.fields.ball;
    let worst = k
        .kappa_beta
        .iter()
        .zip(&k.kappa_tan)
        .map(|(a, b)| (*a - *b) * (*a - *b))
        .fold(T::zero(), T::max);
    T::from_index(ev.n - 1) * worst
}

/// `(n-1) max_j (κ̃_β - κ̃_tan)²`.
pub fn umbilicity_deficit<T: Real>(graph: &RadialGraph<T>) -> Result<T> {
    Ok(deficit_from(&Evaluation::new(graph)?))
}

/// `|u_β(π/2) - cot θ|` from the discrete derivative.
pub fn bc_residual<T: Real>(graph: &RadialGraph<T>) -> Result<T> {
    let m = graph.grid().m();
    let d = graph.grid().d1(graph.values())?[m];
    Ok((d - contact_cot(graph.theta())).abs())
}

/// `max_j sqrt(1 + u_β²)`.
pub fn sup_v<T: Real>(graph: &RadialGraph<T>) -> Result<T> {
    let d = graph.grid().d1(graph.values())?;
    Ok(d.iter().map(|p| (T::one() + *p * *p).sqrt()).fold(T::zero(), T::max))
}

fn energy_parts<T: Real>(graph: &RadialGraph<T>) -> Result<(T, T, T)> {
    let ev = Evaluation::new(graph)?;
    let bg = boundary_geometry(graph)?;
    let area = ev.integrate(graph, |_| T::one())?;
    let wet = wetting_from_angle(graph.n(), bg.polar_angle);
    let vol = volume_from(graph, &ev, &bg, false)?;
    Ok((vol, area, area - contact_cos(graph.theta()) * wet))
}

/// Energy `Area - cos θ · W`.
pub fn energy<T: Real>(graph: &RadialGraph<T>) -> Result<T> {
    Ok(energy_parts(graph)?.2)
}

/// All diagnostics of one snapshot.
pub fn record<T: Real>(graph: &RadialGraph<T>) -> Result<DiagnosticsRecord<T>> {
    let ev = Evaluation::new(graph)?;
    let bg = boundary_geometry(graph)?;
    let area = ev.integrate(graph, |_| T::one())?;
    let wetting = wetting_from_angle(graph.n(), bg.polar_angle);
    Ok(DiagnosticsRecord {
        t: graph.t(),
        volume: volume_from(graph, &ev, &bg, false)?,
        area,
        wetting,
        energy: area - contact_cos(graph.theta()) * wetting,
        umbilicity: deficit_from(&ev),
        bc_residual: bc_residual(graph)?,
        sup_v: ev.fields.v.iter().copied().fold(T::zero(), T::max),
        minkowski_residual: minkowski_from(graph, &ev)?,
        prop21_residual: prop21_from(graph, &ev, &bg)?,
        prop22_residual: prop22_from(graph, &ev, &bg)?,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FirstVariation<T> {
    pub step: T,
    pub dvol_fd: T,
    pub de_fd: T,
    pub de_formula: T,
}

/// `∫ H̃ f̃ dA` with `f̃ = e^w ρ ∂_t u / v`, the ball normal speed of the discrete flow.
pub fn energy_rate<T: Real>(graph: &RadialGraph<T>) -> Result<T> {
    let ev = Evaluation::new(graph)?;
    let ut = flow_velocity(graph)?;
    ev.integrate(graph, |j| ev.ball_h(j) * ev.fields.speed.support[j] * ut[j])
}

/// Finite-difference rates of volume and energy over one flow step, with the formula rate.
pub fn first_variation_check<T: Real>(
    graph: &RadialGraph<T>,
    config: &FlowConfig<T>,
) -> Result<FirstVariation<T>> {
    let dt = stable_time_step(graph, config.cfl)?;
    let (v0, _, e0) = energy_parts(graph)?;
    let next = step_by(&FlowState::new(graph.clone()), dt)?;
    let (v1, _, e1) = energy_parts(&next.graph)?;
    Ok(FirstVariation {
        step: dt,
        dvol_fd: (v1 - v0) / dt,
        de_fd: (e1 - e0) / dt,
        de_formula: energy_rate(graph)?,
    })
}
