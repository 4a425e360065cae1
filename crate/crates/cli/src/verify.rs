use std::fmt;
use std::sync::Arc;

use capflow::{
    ball_to_half, half_to_ball, is_static, minkowski_residual, prop21_residual, prop22_residual,
    rhs_coefficient_form, rhs_divergence_form, BallPoint, Cap, Config, Graph, Grid,
    HalfSpacePoint, InitialProfile, Result,
};

/// Below this resolution order estimates are not attempted.
pub const MIN_ORDER_RESOLUTION: usize = 16;
/// Residuals at or below this are treated as exact zeros.
const EXACT: f64 = 1e-12;
const ROUND_TRIP_POINTS: usize = 1000;

#[derive(Debug, Clone, PartialEq)]
pub enum Status {
    Pass,
    Fail,
    Skipped(String),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: String,
    pub value: Option<f64>,
    /// Human-readable acceptance condition.
    pub bound: String,
    pub status: Status,
}

impl Check {
    fn at_most(name: impl Into<String>, value: f64, tol: f64) -> Self {
        let status = if value <= tol { Status::Pass } else { Status::Fail };
        Self { name: name.into(), value: Some(value), bound: format!("<= {tol:.3e}"), status }
    }

    fn at_least(name: impl Into<String>, value: f64, min: f64) -> Self {
        let status = if value >= min { Status::Pass } else { Status::Fail };
        Self { name: name.into(), value: Some(value), bound: format!(">= {min}"), status }
    }

    fn within(name: impl Into<String>, value: f64, lo: f64, hi: f64) -> Self {
        let status = if (lo..=hi).contains(&value) { Status::Pass } else { Status::Fail };
        Self { name: name.into(), value: Some(value), bound: format!("in [{lo}, {hi}]"), status }
    }

    fn skipped(name: impl Into<String>, why: impl Into<String>) -> Self {
        Self { name: name.into(), value: None, bound: String::new(), status: Status::Skipped(why.into()) }
    }

    fn error(name: impl Into<String>, e: impl fmt::Display) -> Self {
        Self { name: name.into(), value: None, bound: format!("error: {e}"), status: Status::Fail }
    }

    pub fn failed(&self) -> bool {
        self.status == Status::Fail
    }
}

#[derive(Debug, Clone)]
pub struct Report {
    pub checks: Vec<Check>,
}

impl Report {
    pub fn passed(&self) -> bool {
        !self.checks.iter().any(Check::failed)
    }

    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| c.failed())
    }
}

impl fmt::Display for Report {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let width = self.checks.iter().map(|c| c.name.len()).max().unwrap_or(0);
        writeln!(f, "{:<width$}  {:>12}  {:<18}  status", "check", "value", "bound")?;
        for c in &self.checks {
            let value = c.value.map(|v| format!("{v:.4e}")).unwrap_or_else(|| "-".into());
            let status = match &c.status {
                Status::Pass => "PASS".to_string(),
                Status::Fail => "FAIL".to_string(),
                Status::Skipped(why) => format!("SKIP ({why})"),
            };
            writeln!(f, "{:<width$}  {:>12}  {:<18}  {status}", c.name, value, c.bound)?;
        }
        Ok(())
    }
}

/// Residual bound at resolution `m`: `1e-2` at `M = 64`, scaled like `Δβ²`.
fn second_order_bound(m: usize) -> f64 {
    1e-2 * (64.0 / m as f64).powi(2)
}

/// Kronecker sequence in `[-1, 1]^d`, deterministic.
fn lattice(d: usize, count: usize) -> impl Iterator<Item = Vec<f64>> {
    const ROOTS: [f64; 8] = [2.0, 3.0, 5.0, 7.0, 11.0, 13.0, 17.0, 19.0];
    (1..=count).map(move |k| {
        (0..d)
            .map(|i| {
                let alpha = ROOTS[i % ROOTS.len()].sqrt() + i as f64 / ROOTS.len() as f64;
                2.0 * (k as f64 * alpha).fract() - 1.0
            })
            .collect()
    })
}

fn sup_dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).fold(0.0, |m, (x, y)| m.max((x - y).abs()))
}

fn round_trips(n: usize) -> Result<Vec<Check>> {
    let d = n + 1;
    let mut ball = 0.0f64;
    for p in lattice(d, ROUND_TRIP_POINTS) {
        let x = BallPoint(p.iter().map(|c| 0.95 * c / (d as f64).sqrt()).collect());
        let back = half_to_ball(&ball_to_half(&x)?);
        ball = ball.max(sup_dist(&x.0, &back.0));
    }
    let mut half = 0.0f64;
    let mut conformal = 0.0f64;
    for p in lattice(d, ROUND_TRIP_POINTS) {
        let mut y = p.iter().map(|c| 2.0 * c).collect::<Vec<_>>();
        y[n] = 0.05 + p[n].abs() * 2.0;
        let y = HalfSpacePoint(y);
        let back = ball_to_half(&half_to_ball(&y))?;
        let scale = y.0.iter().map(|c| c.abs()).fold(1.0, f64::max);
        half = half.max(sup_dist(&y.0, &back.0) / scale);
        conformal = conformal.max(conformality_defect(&y));
    }
    Ok(vec![
        Check::at_most("ball -> half -> ball round trip", ball, EXACT),
        Check::at_most("half -> ball -> half round trip", half, EXACT),
        Check::at_most("conformality of the map (FD Jacobian)", conformal, 1e-6),
    ])
}

/// Largest relative deviation of `JᵀJ` from a multiple of the identity.
fn conformality_defect(y: &HalfSpacePoint<f64>) -> f64 {
    let d = y.0.len();
    let h = 1e-5;
    let cols: Vec<Vec<f64>> = (0..d)
        .map(|i| {
            let mut p = y.0.clone();
            let mut q = y.0.clone();
            p[i] += h;
            q[i] -= h;
            let (a, b) = (half_to_ball(&HalfSpacePoint(p)), half_to_ball(&HalfSpacePoint(q)));
            a.0.iter().zip(&b.0).map(|(x, z)| (x - z) / (2.0 * h)).collect()
        })
        .collect();
    let dot = |a: &[f64], b: &[f64]| a.iter().zip(b).map(|(x, z)| x * z).sum::<f64>();
    let scale = (0..d).map(|i| dot(&cols[i], &cols[i])).sum::<f64>() / d as f64;
    let mut worst = 0.0f64;
    for i in 0..d {
        for j in 0..d {
            let target = if i == j { scale } else { 0.0 };
            worst = worst.max((dot(&cols[i], &cols[j]) - target).abs() / scale);
        }
    }
    worst
}

fn discrete_graph(config: &Config, m: usize, f: impl Fn(f64) -> f64) -> Result<Graph> {
    let grid = Arc::new(Grid::new(config.n, m)?);
    let u = grid.nodes().iter().map(|b| f(*b)).collect();
    let mut g = Graph::new(grid, u, config.theta)?.with_boundary_sign(config.boundary_sign);
    g.impose_ghosts();
    Ok(g)
}

fn cap_radius(config: &Config) -> f64 {
    match config.initial {
        InitialProfile::Cap { radius } | InitialProfile::PerturbedCap { radius, .. } => radius,
        InitialProfile::Table { .. } => 1.0,
    }
}

fn order(coarse: f64, fine: f64) -> f64 {
    (coarse / fine).log2()
}

/// Order check between `M` and `2M`, skipped when resolution is too low or both values are exact.
fn order_check(name: &str, m: usize, coarse: f64, fine: f64, min: f64) -> Check {
    if m < MIN_ORDER_RESOLUTION {
        Check::skipped(name, format!("M = {m} < {MIN_ORDER_RESOLUTION}"))
    } else if coarse <= EXACT && fine <= EXACT {
        Check::skipped(name, "exact at both resolutions")
    } else {
        Check::at_least(name, order(coarse, fine), min)
    }
}

fn sup_diff(a: &[f64], b: &[f64]) -> f64 {
    sup_dist(a, b)
}

fn two_forms(config: &Config, cap: &Cap, m: usize) -> Result<Vec<Check>> {
    let diff = |m: usize| -> Result<f64> {
        let g = discrete_graph(config, m, |b| cap.log_profile(b) + 0.1 * (2.0 * b).cos())?;
        Ok(sup_diff(&rhs_coefficient_form(&g)?, &rhs_divergence_form(&g)?))
    };
    let (coarse, fine) = (diff(m)?, diff(2 * m)?);
    let name = "two-form difference ratio M -> 2M";
    let ratio = if m < MIN_ORDER_RESOLUTION {
        Check::skipped(name, format!("M = {m} < {MIN_ORDER_RESOLUTION}"))
    } else {
        Check::within(name, coarse / fine, 3.5, 4.5)
    };
    Ok(vec![
        Check::at_most(format!("two-form difference at M = {m}"), coarse, 10.0 * second_order_bound(m)),
        ratio,
    ])
}

fn cap_fixed_point(config: &Config, cap: &Cap, m: usize) -> Result<Vec<Check>> {
    let res = |m: usize| -> Result<f64> { is_static(cap, Arc::new(Grid::new(config.n, m)?)) };
    let (coarse, fine) = (res(m)?, res(2 * m)?);
    Ok(vec![
        Check::at_most(format!("cap |F| at M = {m}"), coarse, second_order_bound(m)),
        Check::at_most(format!("cap |F| at M = {}", 2 * m), fine, second_order_bound(2 * m)),
        order_check("cap |F| order", m, coarse, fine, 1.9),
    ])
}

fn identities(config: &Config, cap: &Cap, m: usize) -> Result<Vec<Check>> {
    type Residual = fn(&Graph) -> Result<f64>;
    let list: [(&str, Residual); 3] = [
        ("Minkowski", minkowski_residual),
        ("prop21", prop21_residual),
        ("prop22", prop22_residual),
    ];
    let coarse = discrete_graph(config, m, |b| cap.log_profile(b))?;
    let fine = discrete_graph(config, 2 * m, |b| cap.log_profile(b))?;
    let mut out = Vec::new();
    for (name, f) in list {
        let (a, b) = (f(&coarse)?.abs(), f(&fine)?.abs());
        out.push(Check::at_most(format!("{name} residual at M = {m}"), a, second_order_bound(m)));
        out.push(order_check(&format!("{name} residual order"), m, a, b, 1.9));
    }
    Ok(out)
}

/// Runs every check at the configuration's dimension, angle, resolution and boundary sign.
pub fn verify(config: &Config) -> Report {
    let m = config.resolution;
    let mut checks = Vec::new();
    let mut push = |name: &str, r: Result<Vec<Check>>| match r {
        Ok(c) => checks.extend(c),
        Err(e) => checks.push(Check::error(name, e)),
    };
    push("conformal round trips", round_trips(config.n));
    match Cap::new(cap_radius(config), config.theta) {
        Ok(cap) => {
            push("two-form equivalence", two_forms(config, &cap, m));
            push("cap fixed point", cap_fixed_point(config, &cap, m));
            push("identity residuals", identities(config, &cap, m));
        }
        Err(e) => checks.push(Check::error("cap construction", e)),
    }
    Report { checks }
}
