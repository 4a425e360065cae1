//! The scalar parabolic problem for `u(β, t)`: right-hand sides, ghost
//! conditions and explicit Runge-Kutta time stepping.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::caps::SphericalCap;
use crate::conformal::exp_w;
use crate::diagnostics::{self, DiagnosticsRecord};
use crate::error::{FlowError, Result};
use crate::graph::{check_theta, contact_cos, contact_cot, derivatives, RadialGraph};
use crate::grid::AxisymmetricGrid;
use crate::scalar::Real;

/// Smallest admissible time step.
pub const DT_FLOOR: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum InitialProfile<T> {
    Cap {
        radius: T,
    },
    /// `log ψ_R + amplitude · cos(2 · mode · β)`.
    PerturbedCap {
        radius: T,
        amplitude: T,
        mode: usize,
    },
    /// Piecewise-linear `u(β)` through the given samples, which must span `[0, π/2]`.
    Table {
        beta: Vec<T>,
        u: Vec<T>,
    },
}

fn default_cfl<T: Real>() -> T {
    T::lit(0.2)
}

fn default_stop_deficit<T: Real>() -> T {
    T::lit(1e-6)
}

fn default_sample_every() -> usize {
    100
}

fn default_sign<T: Real>() -> T {
    T::one()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, bound(deserialize = "T: Real + Deserialize<'de>"))]
pub struct FlowConfig<T> {
    pub n: usize,
    pub theta: T,
    #[serde(alias = "M")]
    pub resolution: usize,
    #[serde(default = "default_cfl")]
    pub cfl: T,
    pub t_final: T,
    /// Runs stop once the umbilicity deficit drops below this; zero disables the test.
    #[serde(default = "default_stop_deficit")]
    pub stop_deficit: T,
    pub initial: InitialProfile<T>,
    #[serde(default = "default_sample_every")]
    pub sample_every: usize,
    /// Multiplies the prescribed boundary slope; anything but `+1` is a deliberate fault.
    #[serde(default = "default_sign")]
    pub boundary_sign: T,
}

/// `(3n+1)/(5n-1)`: below this `|cos θ|` the gradient of `u` stays bounded.
pub fn gradient_regime_threshold<T: Real>(n: usize) -> T {
    T::from_index(3 * n + 1) / T::from_index(5 * n - 1)
}

impl<T: Real> FlowConfig<T> {
    pub fn new(n: usize, theta: T, resolution: usize, t_final: T, initial: InitialProfile<T>) -> Self {
        Self {
            n,
            theta,
            resolution,
            cfl: default_cfl(),
            t_final,
            stop_deficit: default_stop_deficit(),
            initial,
            sample_every: default_sample_every(),
            boundary_sign: T::one(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n < 2 {
            return Err(FlowError::config("n", format!("must be at least 2, got {}", self.n)));
        }
        if self.resolution < 8 {
            return Err(FlowError::config(
                "resolution",
                format!("must be at least 8, got {}", self.resolution),
            ));
        }
        check_theta(self.theta)?;
        if !(self.cfl > T::zero() && self.cfl <= T::lit(0.5)) {
            return Err(FlowError::config("cfl", format!("must lie in (0, 0.5], got {}", self.cfl)));
        }
        if !(self.t_final > T::zero() && self.t_final.is_finite()) {
            return Err(FlowError::config("t_final", format!("must be positive, got {}", self.t_final)));
        }
        if !(self.stop_deficit >= T::zero()) {
            return Err(FlowError::config("stop_deficit", "must be non-negative"));
        }
        if self.sample_every == 0 {
            return Err(FlowError::config("sample_every", "must be at least 1"));
        }
        if (self.boundary_sign.abs() - T::one()).abs() > T::zero() {
            return Err(FlowError::config("boundary_sign", "must be +1 or -1"));
        }
        match &self.initial {
            InitialProfile::Cap { radius } | InitialProfile::PerturbedCap { radius, .. }
                if !(*radius > T::zero() && radius.is_finite()) =>
            {
                Err(FlowError::config("initial.radius", format!("must be positive, got {radius}")))
            }
            InitialProfile::PerturbedCap { amplitude, .. } if !amplitude.is_finite() => {
                Err(FlowError::config("initial.amplitude", "must be finite"))
            }
            InitialProfile::Table { beta, u } => {
                if beta.len() != u.len() || beta.len() < 2 {
                    return Err(FlowError::config(
                        "initial.u",
                        "table needs matching beta and u columns with at least two rows",
                    ));
                }
                if beta.windows(2).any(|p| !(p[1] > p[0])) {
                    return Err(FlowError::config("initial.beta", "must be strictly increasing"));
                }
                let tol = T::lit(1e-9);
                if beta[0].abs() > tol || (beta[beta.len() - 1] - T::FRAC_PI_2()).abs() > tol {
                    return Err(FlowError::config("initial.beta", "must span [0, pi/2]"));
                }
                if u.iter().any(|x| !x.is_finite()) {
                    return Err(FlowError::config("initial.u", "must be finite"));
                }
                Ok(())
            }
            _ => Ok(()),
        }
    }

    /// Whether `|cos θ|` lies inside the gradient-bound regime.
    pub fn in_gradient_regime(&self) -> bool {
        contact_cos(self.theta).abs() < gradient_regime_threshold(self.n)
    }

    pub fn grid(&self) -> Result<AxisymmetricGrid<T>> {
        AxisymmetricGrid::new(self.n, self.resolution)
    }

    /// The initial graph with discrete ghosts imposed.
    pub fn initial_graph(&self) -> Result<RadialGraph<T>> {
        self.validate()?;
        let grid = Arc::new(self.grid()?);
        let theta = self.theta;
        let sign = self.boundary_sign;
        let build = |f: &dyn Fn(T) -> T| -> Result<RadialGraph<T>> {
            let u = grid.nodes().iter().map(|b| f(*b)).collect();
            let mut g = RadialGraph::new(grid.clone(), u, theta)?.with_boundary_sign(sign);
            g.impose_ghosts();
            Ok(g)
        };
        match &self.initial {
            InitialProfile::Cap { radius } => {
                let cap = SphericalCap::new(*radius, theta)?;
                build(&|b| cap.log_profile(b))
            }
            InitialProfile::PerturbedCap { radius, amplitude, mode } => {
                let cap = SphericalCap::new(*radius, theta)?;
                let k = T::from_index(2 * mode);
                build(&|b| cap.log_profile(b) + *amplitude * (k * b).cos())
            }
            InitialProfile::Table { beta, u } => build(&|b| interpolate(beta, u, b)),
        }
    }
}

fn interpolate<T: Real>(xs: &[T], ys: &[T], x: T) -> T {
    let k = xs.partition_point(|p| *p <= x).clamp(1, xs.len() - 1);
    let (x0, x1) = (xs[k - 1], xs[k]);
    let s = (x - x0) / (x1 - x0);
    ys[k - 1] + s * (ys[k] - ys[k - 1])
}

fn pole_ghost<T: Real>(u: &[T]) -> T {
    u[1]
}

/// Cubic through `u_{M-2}, u_{M-1}, u_M` with slope `slope` at `π/2`, evaluated at `β_{M+1}`.
fn boundary_ghost<T: Real>(u: &[T], h: T, slope: T) -> T {
    let m = u.len() - 1;
    T::lit(3.0) * u[m - 1] - T::lit(1.5) * u[m] - T::lit(0.5) * u[m - 2] + T::lit(3.0) * h * slope
}

/// Mirrors node 1 into the pole ghost so that `u_β(0) = 0`.
pub fn pole_symmetry<T: Real>(graph: &mut RadialGraph<T>) {
    let g = pole_ghost(graph.u());
    graph.values_mut().set_pole_ghost(g);
}

/// Fills the boundary ghost so that `u_β(π/2) = cot θ`.
///
/// The ghost is the cubic through `u_{M-2}, u_{M-1}, u_M` with slope `cot θ`
/// at `π/2`, evaluated one spacing beyond the boundary. This keeps both
/// difference quotients at the boundary node second order.
pub fn apply_boundary<T: Real>(graph: &mut RadialGraph<T>) {
    let slope = graph.boundary_sign() * contact_cot(graph.theta());
    let g = boundary_ghost(graph.u(), graph.grid().spacing(), slope);
    graph.values_mut().set_boundary_ghost(g);
}

/// Result of one sweep of the coefficient form over the nodes.
struct Sweep<T> {
    /// `min_j ρ v e^w`
    min_scale: T,
    /// Numerator and denominator of the volume multiplier.
    num: T,
    den: T,
}

/// The coefficient form of `F` bound to a grid and contact angle.
struct Operator<'a, T> {
    grid: &'a AxisymmetricGrid<T>,
    n: usize,
    ct: T,
    slope: T,
}

impl<'a, T: Real> Operator<'a, T> {
    fn new(graph: &'a RadialGraph<T>) -> Self {
        Self {
            grid: graph.grid(),
            n: graph.n(),
            ct: contact_cos(graph.theta()),
            slope: graph.boundary_sign() * contact_cot(graph.theta()),
        }
    }

    /// Writes `F(u)` for the given ghosts into `out`.
    fn coefficient(&self, u: &[T], lo: T, hi: T, t: T, out: &mut [T]) -> Result<Sweep<T>> {
        let m = self.grid.m();
        let h = self.grid.spacing();
        let (two, half) = (T::lit(2.0), T::lit(0.5));
        let inv_2h = half / h;
        let inv_h2 = T::one() / (h * h);
        let n = T::from_index(self.n);
        let nm1 = n - T::one();
        let power = self.n as i32 + 1;
        let (sin, cos, w) = (self.grid.sin(), self.grid.cos(), self.grid.quad_weights());
        let ct = self.ct;
        let mut sweep = Sweep { min_scale: T::infinity(), num: T::zero(), den: T::zero() };
        for j in 0..=m {
            let left = if j == 0 { lo } else { u[j - 1] };
            let right = if j == m { hi } else { u[j + 1] };
            let p = (right - left) * inv_2h;
            let q = (right - two * u[j] + left) * inv_h2;
            let (s, c) = (sin[j], cos[j]);
            let cot_p = if j == 0 { q } else { c / s * p };
            let rho = u[j].exp();
            let v2 = T::one() + p * p;
            let v = v2.sqrt();
            let ew = two / (rho * rho + two * rho * c + T::one());
            let scale = rho * v * ew;
            let r2m1 = (rho * rho - T::one()) * half / rho;
            let f = (q / v2 + nm1 * cot_p) / scale + n * s * p / v - n * r2m1 * p * p / v
                - n * ct * half / rho * (rho * rho * c + two * rho + c)
                + r2m1 * n * ct * s * p;
            if !f.is_finite() {
                return Err(FlowError::NonFinite { node: j, t: t.to_f64_lossy() });
            }
            let support = ew * rho / v;
            if !(support > T::zero() && support.is_finite()) {
                return Err(FlowError::StarShapedness {
                    node: j,
                    t: t.to_f64_lossy(),
                    support: support.to_f64_lossy(),
                });
            }
            out[j] = f;
            sweep.min_scale = sweep.min_scale.min(scale);
            let weight = w[j] * (rho * ew).powi(power);
            sweep.num = sweep.num + weight * f;
            sweep.den = sweep.den + weight;
        }
        Ok(sweep)
    }

    /// Writes `F(u) - λ(u)` with the discrete ghosts of `u` into `out`.
    fn velocity(&self, u: &[T], t: T, out: &mut [T]) -> Result<T> {
        let lo = pole_ghost(u);
        let hi = boundary_ghost(u, self.grid.spacing(), self.slope);
        let sweep = self.coefficient(u, lo, hi, t, out)?;
        let lambda = sweep.num / sweep.den;
        out.iter_mut().for_each(|x| *x = *x - lambda);
        Ok(sweep.min_scale)
    }
}

fn guard_finite<T: Real>(graph: &RadialGraph<T>, f: &[T]) -> Result<()> {
    match f.iter().position(|x| !x.is_finite()) {
        Some(node) => Err(FlowError::NonFinite { node, t: graph.t().to_f64_lossy() }),
        None => Ok(()),
    }
}

/// `∂_t u = F(u)` expanded into coefficient form, using the graph's ghosts.
pub fn rhs_coefficient_form<T: Real>(graph: &RadialGraph<T>) -> Result<Vec<T>> {
    let (lo, hi) = graph.values().ghosts()?;
    let mut out = vec![T::zero(); graph.grid().len()];
    Operator::new(graph).coefficient(graph.u(), lo, hi, graph.t(), &mut out)?;
    Ok(out)
}

/// `∂_t u = F(u)` written with the divergence of the flux `u_β / (ρ v e^w)`.
///
/// The divergence is a finite-volume difference of `sin^{n-1} q` across each
/// cell, divided by the cell mean of `sin^{n-1}`; dividing by the nodal value
/// instead leaves an O(1) error next to the pole when `n > 2`.
pub fn rhs_divergence_form<T: Real>(graph: &RadialGraph<T>) -> Result<Vec<T>> {
    let grid = graph.grid();
    let (lo, hi) = graph.values().ghosts()?;
    let nn = graph.n();
    let n = T::from_index(nn);
    let m = grid.m();
    let h = grid.spacing();
    let two = T::lit(2.0);
    let half = T::lit(0.5);
    let ct = contact_cos(graph.theta());
    let u = graph.u();
    let at = |k: isize| -> T {
        if k < 0 {
            lo
        } else if k as usize > m {
            hi
        } else {
            u[k as usize]
        }
    };
    // flux at β_{k-1/2} for k = 0..=M+1, weighted by |sin|^{n-1}
    let flux: Vec<(T, T)> = (0..=(m + 1) as isize)
        .map(|k| {
            let beta = (T::from_index(k as usize) - half) * h;
            let (a, b) = (at(k - 1), at(k));
            let uh = (a + b) * half;
            let g = (b - a) / h;
            let rho = uh.exp();
            let v = (T::one() + g * g).sqrt();
            let q = g / (rho * v * exp_w(rho, beta));
            (q, beta.sin().abs().powi(nn as i32 - 1))
        })
        .collect();
    let d = derivatives(graph)?;
    let cell = grid.cell_sin_pow();
    let out: Vec<T> = grid
        .nodes()
        .iter()
        .enumerate()
        .map(|(j, &beta)| {
            let div = if j == 0 {
                n * (flux[1].0 - flux[0].0) / h
            } else {
                (flux[j + 1].0 * flux[j + 1].1 - flux[j].0 * flux[j].1) / (h * cell[j])
            };
            let rho = u[j].exp();
            let p = d.u_b[j];
            let v = (T::one() + p * p).sqrt();
            let (s, c) = beta.sin_cos();
            // ∂_β (1 / (ρ e^w))
            let dinv = (rho - T::one() / rho) * p * half - s;
            div - (n + T::one()) / v * p * dinv
                + n * ct * half * (rho * rho - T::one()) / rho * s * p
                - n * ct * half * (rho * rho * c + two * rho + c) / rho
        })
        .collect();
    guard_finite(graph, &out)?;
    Ok(out)
}

/// Weighted mean of `f` against the variation density of the enclosed volume.
///
/// Subtracting it from `F` makes the discrete volume `Σ w_j Φ(ρ_j, β_j)` an
/// exact invariant of the semi-discrete system; the continuum value is zero.
pub fn volume_multiplier<T: Real>(graph: &RadialGraph<T>, f: &[T]) -> T {
    let grid = graph.grid();
    let p = graph.n() as i32 + 1;
    let (mut num, mut den) = (T::zero(), T::zero());
    for ((&w, &beta), (&u, &fj)) in grid
        .quad_weights()
        .iter()
        .zip(grid.nodes())
        .zip(graph.u().iter().zip(f))
    {
        let rho = u.exp();
        let m = (rho * exp_w(rho, beta)).powi(p);
        num = num + w * m * fj;
        den = den + w * m;
    }
    num / den
}

/// Velocity `∂_t u` actually integrated in time: `F` minus the volume multiplier,
/// with the discrete pole and boundary ghosts.
pub fn flow_velocity<T: Real>(graph: &RadialGraph<T>) -> Result<Vec<T>> {
    let mut out = vec![T::zero(); graph.grid().len()];
    Operator::new(graph).velocity(graph.u(), graph.t(), &mut out)?;
    Ok(out)
}

/// `cfl · Δβ² · min_j (ρ v e^w)_j`.
pub fn stable_time_step<T: Real>(graph: &RadialGraph<T>, cfl: T) -> Result<T> {
    let mut out = vec![T::zero(); graph.grid().len()];
    let scale = Operator::new(graph).velocity(graph.u(), graph.t(), &mut out)?;
    let h = graph.grid().spacing();
    Ok(cfl * h * h * scale)
}

#[derive(Debug, Clone, PartialEq)]
pub struct FlowState<T> {
    pub graph: RadialGraph<T>,
    pub step_count: usize,
    pub dt_last: T,
}

impl<T: Real> FlowState<T> {
    pub fn new(graph: RadialGraph<T>) -> Self {
        Self { graph, step_count: 0, dt_last: T::zero() }
    }
}

enum StepSize<T> {
    Fixed(T),
    Cfl { cfl: T, max: T },
}

/// RK4 work buffers.
struct Stepper<T> {
    k: [Vec<T>; 4],
    stage: Vec<T>,
}

impl<T: Real> Stepper<T> {
    fn new(len: usize) -> Self {
        let z = vec![T::zero(); len];
        Self { k: [z.clone(), z.clone(), z.clone(), z.clone()], stage: z }
    }

    /// Advances `u` from time `t` in place and returns the step taken.
    fn advance(&mut self, op: &Operator<T>, u: &mut [T], t: T, size: StepSize<T>) -> Result<T> {
        let [k1, k2, k3, k4] = &mut self.k;
        let scale = op.velocity(u, t, k1)?;
        let dt = match size {
            StepSize::Fixed(dt) => dt,
            StepSize::Cfl { cfl, max } => {
                let h = op.grid.spacing();
                let dt = cfl * h * h * scale;
                if !(dt >= T::lit(DT_FLOOR)) {
                    return Err(FlowError::TimeStepFloor {
                        dt: dt.to_f64_lossy(),
                        floor: DT_FLOOR,
                        t: t.to_f64_lossy(),
                    });
                }
                dt.min(max)
            }
        };
        let half = dt * T::lit(0.5);
        let stage = &mut self.stage;
        let fill = |stage: &mut Vec<T>, k: &[T], a: T| {
            for ((s, x), kk) in stage.iter_mut().zip(u.iter()).zip(k) {
                *s = *x + a * *kk;
            }
        };
        fill(stage, k1, half);
        op.velocity(stage, t + half, k2)?;
        fill(stage, k2, half);
        op.velocity(stage, t + half, k3)?;
        fill(stage, k3, dt);
        op.velocity(stage, t + dt, k4)?;
        let sixth = dt / T::lit(6.0);
        let two = T::lit(2.0);
        for (j, x) in u.iter_mut().enumerate() {
            *x = *x + sixth * (k1[j] + two * (k2[j] + k3[j]) + k4[j]);
            if !x.is_finite() {
                return Err(FlowError::NonFinite { node: j, t: (t + dt).to_f64_lossy() });
            }
        }
        Ok(dt)
    }
}

fn advanced<T: Real>(state: &FlowState<T>, size: StepSize<T>) -> Result<FlowState<T>> {
    let g0 = &state.graph;
    let mut u = g0.u().to_vec();
    let dt = Stepper::new(u.len()).advance(&Operator::new(g0), &mut u, g0.t(), size)?;
    let mut g = g0.clone();
    g.values_mut().interior_mut().copy_from_slice(&u);
    g.impose_ghosts();
    g.set_t(g0.t() + dt);
    Ok(FlowState { graph: g, step_count: state.step_count + 1, dt_last: dt })
}

/// One classical RK4 step of the given size.
pub fn step_by<T: Real>(state: &FlowState<T>, dt: T) -> Result<FlowState<T>> {
    advanced(state, StepSize::Fixed(dt))
}

/// One RK4 step with the parabolic time step, clipped so as not to pass `t_final`.
pub fn step<T: Real>(state: &FlowState<T>, config: &FlowConfig<T>) -> Result<FlowState<T>> {
    let max = config.t_final - state.graph.t();
    advanced(state, StepSize::Cfl { cfl: config.cfl, max })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "status", content = "reason", rename_all = "snake_case")]
pub enum Termination {
    Converged,
    TimeExhausted,
    Aborted(String),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Sample<T> {
    pub step: usize,
    pub profile: Vec<T>,
    pub record: DiagnosticsRecord<T>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunOutput<T> {
    pub samples: Vec<Sample<T>>,
    pub termination: Termination,
    pub final_state: FlowState<T>,
}

impl<T: Real> RunOutput<T> {
    pub fn records(&self) -> impl Iterator<Item = &DiagnosticsRecord<T>> {
        self.samples.iter().map(|s| &s.record)
    }

    pub fn final_record(&self) -> &DiagnosticsRecord<T> {
        &self.samples.last().expect("runs always record t = 0").record
    }
}

fn sample<T: Real>(state: &FlowState<T>) -> Result<Sample<T>> {
    Ok(Sample {
        step: state.step_count,
        profile: state.graph.u().to_vec(),
        record: diagnostics::record(&state.graph)?,
    })
}

/// Integrates until `t_final` or until the umbilicity deficit drops below `stop_deficit`.
///
/// Configuration problems are returned as errors; failures during stepping end
/// the run with [`Termination::Aborted`] and keep the samples taken so far.
pub fn run<T: Real>(config: &FlowConfig<T>) -> Result<RunOutput<T>> {
    let graph = config.initial_graph()?;
    let mut state = FlowState::new(graph);
    let first = sample(&state).map_err(|e| {
        FlowError::config("initial", format!("inadmissible initial profile: {e}"))
    })?;
    let mut samples = vec![first];
    let converged = |s: &Sample<T>| s.record.umbilicity < config.stop_deficit;
    if converged(&samples[0]) {
        return Ok(RunOutput { samples, termination: Termination::Converged, final_state: state });
    }
    let mut u = state.graph.u().to_vec();
    let mut stepper = Stepper::new(u.len());
    let mut t = state.graph.t();
    let sync = |state: &mut FlowState<T>, u: &[T], t: T| {
        state.graph.values_mut().interior_mut().copy_from_slice(u);
        state.graph.impose_ghosts();
        state.graph.set_t(t);
    };
    let termination = loop {
        if t >= config.t_final {
            break Termination::TimeExhausted;
        }
        let size = StepSize::Cfl { cfl: config.cfl, max: config.t_final - t };
        let taken = stepper.advance(&Operator::new(&state.graph), &mut u, t, size);
        let dt = match taken {
            Ok(dt) => dt,
            Err(e) => break Termination::Aborted(e.to_string()),
        };
        t = t + dt;
        state.step_count += 1;
        state.dt_last = dt;
        let done = t >= config.t_final;
        if state.step_count % config.sample_every == 0 || done {
            sync(&mut state, &u, t);
            match sample(&state) {
                Ok(s) => samples.push(s),
                Err(e) => break Termination::Aborted(e.to_string()),
            }
            if converged(samples.last().unwrap()) {
                break Termination::Converged;
            }
        }
    };
    if matches!(termination, Termination::Aborted(_)) {
        // report the last sampled state
        let last = samples.last().expect("t = 0 is always sampled");
        sync(&mut state, &last.profile, last.record.t);
        state.step_count = last.step;
    } else if samples.last().map(|s| s.step) != Some(state.step_count) {
        sync(&mut state, &u, t);
        if let Ok(s) = sample(&state) {
            samples.push(s);
        }
    }
    Ok(RunOutput { samples, termination, final_state: state })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn grid(n: usize, m: usize) -> Arc<AxisymmetricGrid<f64>> {
        Arc::new(AxisymmetricGrid::new(n, m).unwrap())
    }

    #[test]
    fn flat_disk_is_static_for_right_angle() {
        for n in [2, 3] {
            let g = RadialGraph::from_fn_with_bc(grid(n, 32), PI / 2.0, |_| 0.0).unwrap();
            assert!(rhs_coefficient_form(&g).unwrap().iter().all(|f| *f == 0.0));
            assert!(rhs_divergence_form(&g).unwrap().iter().all(|f| *f == 0.0));
        }
    }

    #[test]
    fn constant_profile_static_for_right_angle() {
        let g = RadialGraph::from_fn_with_bc(grid(2, 32), PI / 2.0, |_| 0.3).unwrap();
        assert!(rhs_divergence_form(&g).unwrap().iter().all(|f| f.abs() < 1e-10));
        assert!(rhs_coefficient_form(&g).unwrap().iter().all(|f| f.abs() < 1e-10));
    }

    #[test]
    fn boundary_value_of_flat_disk() {
        // Analytic ghosts: the flat disk with a non-right angle is not a capillary surface,
        // and only the zeroth-order term survives.
        for n in [2usize, 3] {
            for theta in [PI / 3.0, 2.0 * PI / 3.0] {
                let g = RadialGraph::from_fn(grid(n, 32), theta, |_| 0.0).unwrap();
                let expect = -(n as f64) * theta.cos();
                let fc = rhs_coefficient_form(&g).unwrap()[32];
                let fd = rhs_divergence_form(&g).unwrap()[32];
                assert!((fc - expect).abs() < 1e-14, "{fc} vs {expect}");
                assert!((fd - expect).abs() < 1e-14, "{fd} vs {expect}");
            }
        }
        let g = RadialGraph::from_fn(grid(2, 32), PI / 3.0, |_| 0.0).unwrap();
        assert!((rhs_divergence_form(&g).unwrap()[32] + 1.0).abs() < 1e-14);
    }

    #[test]
    fn boundary_ghosts() {
        let mut g = RadialGraph::new(grid(2, 16), vec![0.0; 17], PI / 2.0).unwrap();
        g.impose_ghosts();
        assert_eq!(g.values().boundary_ghost(), Some(0.0));
        let f = |b: f64| 0.2 * (2.0 * b).cos();
        let mut g = RadialGraph::from_fn_with_bc(grid(2, 16), PI / 2.0, f).unwrap();
        g.impose_ghosts();
        assert!((g.values().boundary_ghost().unwrap() - g.u()[15]).abs() < 1e-3);
        let cap = crate::caps::SphericalCap::new(0.8, PI / 3.0).unwrap();
        let g = RadialGraph::from_fn_with_bc(grid(2, 64), PI / 3.0, |b| cap.log_profile(b)).unwrap();
        let d1 = g.grid().d1(g.values()).unwrap();
        let cot = 1.0 / 3f64.sqrt();
        assert!((d1[64] - cot).abs() < g.grid().spacing().powi(2));
    }

    #[test]
    fn pole_ghost_mirrors() {
        let g = RadialGraph::from_fn_with_bc(grid(2, 16), 1.0, f64::cos).unwrap();
        let h = g.grid().spacing();
        assert_eq!(g.values().pole_ghost(), Some(h.cos()));
        assert_eq!(g.grid().d1(g.values()).unwrap()[0], 0.0);
        let d2 = g.grid().d2(g.values()).unwrap()[0];
        assert!((2.0 * d2 + 2.0).abs() < 2.0 * h * h);
    }

    #[test]
    fn config_validation() {
        let ok = FlowConfig::new(2, 1.0, 32, 1.0, InitialProfile::Cap { radius: 1.0 });
        assert!(ok.validate().is_ok());
        let mut bad = ok.clone();
        bad.theta = 0.0;
        assert!(matches!(bad.validate(), Err(FlowError::Config { ref field, .. }) if field == "theta"));
        bad.theta = PI;
        assert!(bad.validate().is_err());
        let mut bad = ok.clone();
        bad.cfl = 0.6;
        assert!(bad.validate().is_err());
        let mut bad = ok.clone();
        bad.t_final = 0.0;
        assert!(bad.validate().is_err());
        let mut bad = ok.clone();
        bad.initial = InitialProfile::Table { beta: vec![0.0, 1.0], u: vec![0.0, 0.0] };
        assert!(bad.validate().is_err());
    }

    #[test]
    fn regime_threshold() {
        assert!((gradient_regime_threshold::<f64>(2) - 7.0 / 9.0).abs() < 1e-15);
        let c = FlowConfig::new(5, PI / 2.0, 32, 1.0, InitialProfile::Cap { radius: 1.0 });
        assert!(c.in_gradient_regime());
        let c = FlowConfig::new(2, 0.5, 32, 1.0, InitialProfile::Cap { radius: 1.0 });
        assert!(!c.in_gradient_regime());
    }

    #[test]
    fn table_profile_interpolates() {
        let beta = vec![0.0, PI / 4.0, PI / 2.0];
        let cfg = FlowConfig::new(
            2,
            PI / 2.0,
            16,
            1.0,
            InitialProfile::Table { beta, u: vec![0.1, 0.1, 0.1] },
        );
        let g = cfg.initial_graph().unwrap();
        assert!(g.u().iter().all(|u| (u - 0.1).abs() < 1e-15));
    }

    #[test]
    fn flat_disk_step_is_exact() {
        let cfg = FlowConfig::new(2, PI / 2.0, 32, 0.01, InitialProfile::Cap { radius: 1.0 });
        let s0 = FlowState::new(cfg.initial_graph().unwrap());
        let s1 = step(&s0, &cfg).unwrap();
        assert_eq!(s1.graph.u(), s0.graph.u());
        assert!(s1.dt_last > 0.0 && s1.step_count == 1);
    }

    #[test]
    fn cap_run_converges_immediately() {
        let mut cfg = FlowConfig::new(2, PI / 3.0, 64, 1.0, InitialProfile::Cap { radius: 1.0 });
        cfg.stop_deficit = 1e-5;
        cfg.sample_every = 20;
        let out = run(&cfg).unwrap();
        assert_eq!(out.termination, Termination::Converged);
        assert!(out.samples.len() <= 3);
    }

    #[test]
    fn invalid_config_rejected_before_stepping() {
        let cfg = FlowConfig::new(2, 0.0, 64, 1.0, InitialProfile::Cap { radius: 1.0 });
        assert!(run(&cfg).is_err());
    }
}
