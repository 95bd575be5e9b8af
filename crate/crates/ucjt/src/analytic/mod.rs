//! Quadrature engine: evaluates the network's mean throughput from the
//! Laplace transforms of the signal and interference fields instead of
//! sampling them.
//!
//! The chain of quantities, each built on the previous one:
//!
//! 1. `laplace_s` — transform of the served signal power S for a cell of
//!    Poisson access points with exponential fading (maximum ratio
//!    transmission combines coherently, so S is a shot-noise sum over the
//!    cell disc).
//! 2. `weight_moment` — mean power weight W(r) an access point at distance
//!    r devotes to its user; the first-order handle on how much energy a
//!    foreign cell leaks. Cached in a [`WeightMomentTable`].
//! 3. `laplace_i_rho` — transform of the interference created by one
//!    co-channel user's cell at distance rho, integrating the leaked power
//!    over that cell's disc (exact up to the first-order weight
//!    approximation). `laplace_i_rho_far` is the cheap far-field form that
//!    treats the whole cell as a single transmitter.
//! 4. `laplace_j` — transform of the total interference: co-channel users
//!    form a Poisson field of intensity `lambda_u * p_r(D)` outside the
//!    exclusion disc; the field is split at `near_far_split_m` into an
//!    exact near region and a far region using the single-transmitter form.
//! 5. `tau_analytic` — mean throughput `B E[log2(1 + SINR)]` via the
//!    identity that expresses E[ln(1 + S/(J + nu))] through the transforms
//!    of S and J; `eta_analytic` scales by the density of scheduled users.
//!
//! All semi-infinite integrals are mapped to finite intervals (`u/(1-u)`
//! for the weight moment, `ln t` for the throughput integral) and the
//! integrands' kink at the path-loss clamp radius is used as an explicit
//! panel boundary.

pub mod quad;
mod table;

pub use quad::QuadratureSpec;
pub use table::WeightMomentTable;

use crate::config::NetworkConfig;
use crate::error::{Error, Result};
use crate::geometry::scheduling_probability;
use quad::{integrate, integrate_with_breakpoints};
use std::f64::consts::PI;

/// Default node count of the weight-moment table (refined automatically if
/// the interpolation check fails).
pub const DEFAULT_WEIGHT_GRID: usize = 48;

/// Inputs of the quadrature engine: the network model plus the near/far
/// split distance.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AnalyticParams {
    pub net: NetworkConfig,
    /// Interfering cells closer than this are integrated exactly; farther
    /// ones use the single-transmitter approximation.
    pub near_far_split_m: f64,
}

impl AnalyticParams {
    /// Uses the default split `max(5 D, 10 C)`.
    pub fn new(net: NetworkConfig) -> Self {
        AnalyticParams { near_far_split_m: net.default_near_far_split_m(), net }
    }

    /// Uses an explicit split distance (must be >= D).
    pub fn with_split(net: NetworkConfig, near_far_split_m: f64) -> Self {
        AnalyticParams { net, near_far_split_m }
    }

    pub fn validate(&self) -> Result<()> {
        self.net.validate()?;
        if !(self.near_far_split_m >= self.net.min_separation_m) {
            return Err(Error::Config(format!(
                "near/far split ({} m) must be >= the minimum separation ({} m)",
                self.near_far_split_m, self.net.min_separation_m
            )));
        }
        Ok(())
    }

    /// Mean number of access points in a cell, `lambda_r * pi * C^2`.
    fn mean_cell_size(&self) -> f64 {
        self.net.lambda_r_per_m2 * PI * self.net.cell_radius_m * self.net.cell_radius_m
    }

    /// Intensity of scheduled co-channel users, `lambda_u * p_r(D)`.
    fn scheduled_intensity(&self) -> f64 {
        self.net.lambda_u_per_m2
            * scheduling_probability(self.net.lambda_u_per_m2, self.net.min_separation_m)
    }
}

/// Captures the first error raised inside a quadrature integrand (closures
/// handed to the integrator return plain f64), so the caller can surface
/// the root cause instead of a generic "not finite" report.
struct ErrCapture(Option<Error>);

impl ErrCapture {
    fn new() -> Self {
        ErrCapture(None)
    }

    fn unwrap_or_nan(&mut self, r: Result<f64>) -> f64 {
        match r {
            Ok(v) => v,
            Err(e) => {
                if self.0.is_none() {
                    self.0 = Some(e);
                }
                f64::NAN
            }
        }
    }

    fn resolve(self, r: Result<f64>) -> Result<f64> {
        match self.0 {
            Some(inner) if r.is_err() => Err(inner),
            _ => r,
        }
    }
}

/// Mean received signal power E[S] over cell geometry and fading, by
/// Campbell's formula: `2 pi lambda_r * integral_0^C l(r) r dr`, in closed
/// form thanks to the piecewise power-law loss.
pub fn mean_signal_power(net: &NetworkConfig) -> f64 {
    let a = net.path_loss.alpha;
    let d0 = net.path_loss.d0_m;
    let c = net.cell_radius_m;
    let l0 = d0.powf(-a);
    let inner = if c <= d0 {
        // Entire cell inside the clamp: constant loss.
        l0 * c * c / 2.0
    } else {
        l0 * d0 * d0 / 2.0 + (d0.powf(2.0 - a) - c.powf(2.0 - a)) / (a - 2.0)
    };
    2.0 * PI * net.lambda_r_per_m2 * inner
}

/// Exponent X(t) of the signal transform: `L_S(t) = exp(-X(t))` with
/// `X(t) = 2 pi lambda_r * integral_0^C [t l(r) / (1 + t l(r))] r dr`.
///
/// The clamped region [0, d0] integrates in closed form; the power-law
/// region uses adaptive quadrature (the integrand is smooth there).
fn laplace_s_exponent(t: f64, net: &NetworkConfig, q: &QuadratureSpec) -> Result<f64> {
    if t == 0.0 {
        return Ok(0.0);
    }
    let a = net.path_loss.alpha;
    let d0 = net.path_loss.d0_m;
    let c = net.cell_radius_m;
    if c == 0.0 {
        return Ok(0.0);
    }
    let l0 = d0.powf(-a);
    let clamp_extent = c.min(d0);
    let clamped_part = (t * l0 / (1.0 + t * l0)) * clamp_extent * clamp_extent / 2.0;
    let tail_part = if c > d0 {
        integrate(
            |r: f64| {
                let x = t * r.powf(-a);
                x / (1.0 + x) * r
            },
            d0,
            c,
            q,
        )?
    } else {
        0.0
    };
    Ok(2.0 * PI * net.lambda_r_per_m2 * (clamped_part + tail_part))
}

/// Laplace transform of the served signal power, `E[e^{-tS}]`.
pub fn laplace_s(t: f64, p: &AnalyticParams, q: &QuadratureSpec) -> Result<f64> {
    Ok((-laplace_s_exponent(t, &p.net, q)?).exp())
}

/// `1 - L_S(t)` without cancellation at small `t` (where `L_S` is within
/// rounding of 1 but the difference still carries the signal information).
pub fn one_minus_laplace_s(t: f64, p: &AnalyticParams, q: &QuadratureSpec) -> Result<f64> {
    Ok(-(-laplace_s_exponent(t, &p.net, q)?).exp_m1())
}

/// First-order moment W(r) of the power weight of an access point at
/// distance `r` from its user:
/// `W(r) = integral_0^inf (1+t)^{-2} L_S(t / l(r)) dt`, evaluated on [0, 1)
/// through `t = u/(1-u)` (the Jacobian exactly cancels the `(1+t)^{-2}`
/// kernel).
pub fn weight_moment(r: f64, p: &AnalyticParams, q: &QuadratureSpec) -> Result<f64> {
    if !(0.0..=p.net.cell_radius_m).contains(&r) {
        return Err(Error::Config(format!(
            "weight moment distance {r} m outside the cell radius {} m",
            p.net.cell_radius_m
        )));
    }
    let gain = p.net.path_loss.gain(r);
    let mut cap = ErrCapture::new();
    // The transition of L_S from 1 to its floor crowds toward u = 1 when
    // l(r) is large; geometric breakpoints in 1-u seed the refinement.
    let bp = [0.0, 0.5, 0.9, 0.99, 0.999, 0.999_9, 0.999_99, 1.0];
    let value = integrate_with_breakpoints(
        |u: f64| {
            let t = u / (1.0 - u) / gain;
            cap.unwrap_or_nan(laplace_s(t, p, q))
        },
        &bp,
        q,
    );
    cap.resolve(value)
}

/// Tabulates W on a log-spaced grid over [d0, C], refining until monotone
/// cubic interpolation reproduces direct quadrature at panel midpoints.
///
/// The interpolation target is `max(rtol, 1e-5)` relative / `max(atol,
/// 1e-7)` absolute: W feeds a first-order approximation of the interference
/// exponent whose own model error dominates far below that level, and the
/// throughput's insensitivity to the table is verified separately by
/// doubling the grid.
pub fn build_weight_table(
    p: &AnalyticParams,
    q: &QuadratureSpec,
    n_grid: usize,
) -> Result<WeightMomentTable> {
    if n_grid < 8 {
        return Err(Error::Config(format!(
            "weight table needs at least 8 grid points, got {n_grid}"
        )));
    }
    let c = p.net.cell_radius_m;
    let d0 = p.net.path_loss.d0_m;
    if c <= d0 {
        // The loss (hence W) is constant across the whole cell.
        let w = weight_moment(c, p, q)?;
        return Ok(WeightMomentTable::from_samples(vec![c], vec![w], c));
    }
    let rtol = q.rtol.max(1e-5);
    let atol = q.atol.max(1e-7);

    let mut n = n_grid;
    let max_nodes = n_grid * 8;
    loop {
        let ratio = c / d0;
        let nodes: Vec<f64> =
            (0..n).map(|i| d0 * ratio.powf(i as f64 / (n - 1) as f64)).collect();
        let mut values = Vec::with_capacity(n);
        for &r in &nodes {
            values.push(weight_moment(r.min(c), p, q)?);
        }
        // W is strictly decreasing; remove any quadrature-noise ripple so
        // the interpolant keeps the invariant bit-exactly.
        for i in 1..values.len() {
            values[i] = values[i].min(values[i - 1]);
        }
        let table = WeightMomentTable::from_samples(nodes.clone(), values, c);

        let mut worst = 0.0f64;
        let mut ok = true;
        for w in nodes.windows(2) {
            let mid = (w[0] * w[1]).sqrt();
            let direct = weight_moment(mid, p, q)?;
            let err = (table.eval(mid) - direct).abs();
            worst = worst.max(err);
            if err > atol.max(rtol * direct) {
                ok = false;
            }
        }
        if ok {
            return Ok(table);
        }
        if n * 2 > max_nodes {
            return Err(Error::Numerical(format!(
                "weight table did not reach interpolation tolerance at {n} nodes \
                 (worst midpoint error {worst:.3e})"
            )));
        }
        n *= 2;
    }
}

/// Exponent of `laplace_i_rho`: `lambda_r * integral_0^{2pi} integral_0^C
/// [t l'(rho,r,theta) W(r) / (1 + t l' W)] r dr dtheta` with `l'` evaluated
/// at the distance between the typical user and a point of the interfering
/// cell's disc. Half-range in theta by symmetry.
fn cell_interference_exponent(
    t: f64,
    rho: f64,
    p: &AnalyticParams,
    q: &QuadratureSpec,
    table: &WeightMomentTable,
) -> Result<f64> {
    let net = &p.net;
    let c = net.cell_radius_m;
    if t == 0.0 || c == 0.0 || net.lambda_r_per_m2 == 0.0 {
        return Ok(0.0);
    }
    let alpha = net.path_loss.alpha;
    let d0 = net.path_loss.d0_m;
    let r_breaks = if c > d0 { vec![0.0, d0, c] } else { vec![0.0, c] };

    let mut cap = ErrCapture::new();
    let outer = integrate_with_breakpoints(
        |theta: f64| {
            // Distance from the typical user to the point (r, theta) of the
            // disc around the interferer at distance rho:
            // v^2 = (rho - r)^2 + 4 rho r sin^2(theta/2), stable for v << rho.
            let s = (theta / 2.0).sin();
            let cross = 4.0 * rho * s * s;
            let inner = integrate_with_breakpoints(
                |r: f64| {
                    let v2 = (rho - r) * (rho - r) + cross * r;
                    let gain = v2.sqrt().max(d0).powf(-alpha);
                    let x = t * gain * table.eval(r);
                    x / (1.0 + x) * r
                },
                &r_breaks,
                q,
            );
            cap.unwrap_or_nan(inner)
        },
        &[0.0, PI / 3.0, PI],
        q,
    );
    let outer = cap.resolve(outer)?;
    Ok(net.lambda_r_per_m2 * 2.0 * outer)
}

/// Laplace transform of the interference from a single co-channel user's
/// cell at distance `rho`, under the first-order weight approximation.
pub fn laplace_i_rho(
    t: f64,
    rho: f64,
    p: &AnalyticParams,
    q: &QuadratureSpec,
    table: &WeightMomentTable,
) -> Result<f64> {
    Ok((-cell_interference_exponent(t, rho, p, q, table)?).exp())
}

/// Far-field form: the cell is one transmitter at distance `rho` radiating
/// unit total power through a unit-mean exponential channel, except when
/// empty: `e^{-mu} + (1 - e^{-mu}) / (1 + t rho^-alpha)` with
/// `mu = lambda_r pi C^2`.
pub fn laplace_i_rho_far(t: f64, rho: f64, p: &AnalyticParams) -> f64 {
    let empty = (-p.mean_cell_size()).exp();
    let x = t * p.net.path_loss.gain(rho);
    empty + (1.0 - empty) / (1.0 + x)
}

/// Near-field part of the interference exponent:
/// `integral_D^d (1 - L_I(rho, t)) rho drho`.
fn near_field_integral(
    t: f64,
    p: &AnalyticParams,
    q: &QuadratureSpec,
    table: &WeightMomentTable,
) -> Result<f64> {
    let d_sep = p.net.min_separation_m;
    let split = p.near_far_split_m;
    if split <= d_sep {
        return Ok(0.0);
    }
    // Geometric breakpoints: the integrand decays like a power of rho.
    let mid = (d_sep * split).sqrt();
    let mut cap = ErrCapture::new();
    let value = integrate_with_breakpoints(
        |rho: f64| {
            let e = cap.unwrap_or_nan(cell_interference_exponent(t, rho, p, q, table));
            -(-e).exp_m1() * rho
        },
        &[d_sep, mid, split],
        q,
    );
    cap.resolve(value)
}

/// Far-field tail `integral_d^inf t rho / (rho^alpha + t) drho`, evaluated
/// in log space on [d, R] plus the analytic first-order tail beyond R, with
/// R grown until the neglected second-order tail is below tolerance.
fn far_field_integral(t: f64, p: &AnalyticParams, q: &QuadratureSpec) -> Result<f64> {
    if t == 0.0 {
        return Ok(0.0);
    }
    let alpha = p.net.path_loss.alpha;
    let d = p.near_far_split_m;
    let mut r_cut = 100.0 * d.max(t.powf(1.0 / alpha));
    for _ in 0..8 {
        let numeric = integrate(
            |v: f64| {
                let rho = v.exp();
                t * rho * rho / (rho.powf(alpha) + t)
            },
            d.ln(),
            r_cut.ln(),
            q,
        )?;
        let first_order = t * r_cut.powf(2.0 - alpha) / (alpha - 2.0);
        let second_order_bound = t * t * r_cut.powf(2.0 - 2.0 * alpha) / (2.0 * alpha - 2.0);
        let total = numeric + first_order;
        if second_order_bound <= q.atol.max(q.rtol * total.abs()) {
            return Ok(total);
        }
        r_cut *= 10.0;
    }
    Err(Error::Numerical(format!(
        "far-field tail did not meet tolerance (t = {t}, cut radius {r_cut} m)"
    )))
}

/// Exponent of the total-interference transform; `L_J(t) = exp(-this)`.
///
/// `table` may be `None` only when the near region is empty (split == D),
/// i.e. the pure far-field approximation.
fn total_interference_exponent(
    t: f64,
    p: &AnalyticParams,
    q: &QuadratureSpec,
    table: Option<&WeightMomentTable>,
) -> Result<f64> {
    let scheduled = p.scheduled_intensity();
    if scheduled == 0.0 || t == 0.0 {
        return Ok(0.0);
    }
    let near = if p.near_far_split_m > p.net.min_separation_m {
        let table = table.ok_or_else(|| {
            Error::Config(
                "near-field interference evaluation requires a weight-moment table".into(),
            )
        })?;
        near_field_integral(t, p, q, table)?
    } else {
        0.0
    };
    let nonempty = -(-p.mean_cell_size()).exp_m1();
    let far = if nonempty > 0.0 { nonempty * far_field_integral(t, p, q)? } else { 0.0 };
    Ok(2.0 * PI * scheduled * (near + far))
}

/// Laplace transform of the aggregate interference at the typical user.
pub fn laplace_j(
    t: f64,
    p: &AnalyticParams,
    q: &QuadratureSpec,
    table: Option<&WeightMomentTable>,
) -> Result<f64> {
    Ok((-total_interference_exponent(t, p, q, table)?).exp())
}

/// Closed form of `integral_0^inf s / (s^alpha + 1) ds = (pi/alpha) /
/// sin(2 pi / alpha)` for `alpha > 2`; scale factor of the far-field
/// exponent's growth `~ t^{2/alpha}`.
fn interference_growth_constant(alpha: f64) -> f64 {
    (PI / alpha) / (2.0 * PI / alpha).sin()
}

/// Mean throughput in bit/s from the signal and interference transforms:
///
/// `tau = (B / ln 2) * integral_0^inf e^{-t nu} L_J(t) (1 - L_S(t)) dt / t`.
///
/// The integral runs over `y = ln t`: below `t_min` the integrand is
/// `mean_s * t` to first order and contributes the explicit series term
/// `mean_s * t_min`; above, unit-ish panels in `y` are refined adaptively.
/// Truncation at `t_max` requires a guaranteed decay exponent >= 45
/// (giving a tail below `e^-45 * range`), built from the noise term and the
/// optional `decay_floor` (a lower bound on the interference exponent).
pub fn throughput_from_laplace(
    mut one_minus_ls: impl FnMut(f64) -> Result<f64>,
    mut lj: impl FnMut(f64) -> Result<f64>,
    noise_over_p: f64,
    bandwidth_hz: f64,
    mean_s: f64,
    decay_floor: Option<&dyn Fn(f64) -> f64>,
    q: &QuadratureSpec,
) -> Result<f64> {
    const DECAY_TARGET: f64 = 45.0;
    if mean_s == 0.0 {
        return Ok(0.0);
    }
    if !(mean_s > 0.0) {
        return Err(Error::Numerical(format!("mean signal power must be >= 0, got {mean_s}")));
    }

    let t_min = 1e-3 * q.rtol.sqrt() / mean_s;
    let total_decay = |t: f64| noise_over_p * t + decay_floor.map_or(0.0, |f| f(t));
    let t_max = if total_decay(f64::MAX.sqrt()) < DECAY_TARGET {
        return Err(Error::Numerical(
            "throughput integral does not decay: no noise and no interference \
             (the mean rate is unbounded)"
                .into(),
        ));
    } else {
        // Monotone bisection in log t for the smallest t with enough decay.
        let mut lo = t_min.ln();
        let mut hi = f64::MAX.sqrt().ln();
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if total_decay(mid.exp()) >= DECAY_TARGET {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        hi.exp().max(t_min * std::f64::consts::E)
    };

    // Panels of width <= 2 in y = ln t seed the adaptive refinement.
    let y_min = t_min.ln();
    let y_max = t_max.ln();
    let n_panels = ((y_max - y_min) / 2.0).ceil() as usize;
    let breakpoints: Vec<f64> = (0..=n_panels)
        .map(|i| y_min + (y_max - y_min) * i as f64 / n_panels as f64)
        .collect();

    let mut cap = ErrCapture::new();
    let integral = integrate_with_breakpoints(
        |y: f64| {
            let t = y.exp();
            let noise_factor = (-noise_over_p * t).exp();
            if noise_factor == 0.0 {
                return 0.0;
            }
            let signal = cap.unwrap_or_nan(one_minus_ls(t));
            if signal == 0.0 {
                return 0.0;
            }
            let interference = cap.unwrap_or_nan(lj(t));
            noise_factor * interference * signal
        },
        &breakpoints,
        q,
    );
    let integral = cap.resolve(integral)?;

    // First-order contribution of (0, t_min]: the integrand approaches
    // mean_s * t, so the missing piece is mean_s * t_min + O(t_min^2).
    let series = mean_s * t_min;
    Ok(bandwidth_hz / std::f64::consts::LN_2 * (integral + series))
}

/// Lower bound on the interference exponent used to pick the truncation
/// point of the throughput integral: drop the near field entirely and keep
/// the closed-form growth of the far field beyond the split distance.
fn interference_decay_floor(p: &AnalyticParams) -> impl Fn(f64) -> f64 {
    let scheduled = p.scheduled_intensity();
    let nonempty = -(-p.mean_cell_size()).exp_m1();
    let alpha = p.net.path_loss.alpha;
    let k = interference_growth_constant(alpha);
    let d = p.near_far_split_m;
    move |t: f64| {
        let full_plane = k * t.powf(2.0 / alpha);
        2.0 * PI * scheduled * nonempty * (full_plane - d * d / 2.0).max(0.0)
    }
}

/// Mean throughput of the typical user using a caller-provided weight table
/// (needed when comparing tables of different resolutions).
pub fn tau_analytic_with_table(
    p: &AnalyticParams,
    q: &QuadratureSpec,
    table: Option<&WeightMomentTable>,
) -> Result<f64> {
    p.validate()?;
    let mean_s = mean_signal_power(&p.net);
    if mean_s == 0.0 {
        return Ok(0.0);
    }
    // Inner transforms run tighter than the outer integral so their
    // quadrature noise stays below the outer error target.
    let qi = q.scaled(0.1);
    let decay = interference_decay_floor(p);
    throughput_from_laplace(
        |t| one_minus_laplace_s(t, p, &qi),
        |t| laplace_j(t, p, &qi, table),
        p.net.noise_over_p(),
        p.net.bandwidth_hz,
        mean_s,
        Some(&decay),
        q,
    )
}

/// Mean throughput of the typical user in bit/s, with an explicit
/// weight-table resolution.
pub fn tau_analytic_with_grid(
    p: &AnalyticParams,
    q: &QuadratureSpec,
    n_grid: usize,
) -> Result<f64> {
    p.validate()?;
    let needs_table = p.scheduled_intensity() > 0.0
        && p.near_far_split_m > p.net.min_separation_m
        && mean_signal_power(&p.net) > 0.0;
    let table = if needs_table {
        Some(build_weight_table(p, &q.scaled(0.1), n_grid)?)
    } else {
        None
    };
    tau_analytic_with_table(p, q, table.as_ref())
}

/// Mean throughput of the typical user in bit/s.
pub fn tau_analytic(p: &AnalyticParams, q: &QuadratureSpec) -> Result<f64> {
    tau_analytic_with_grid(p, q, DEFAULT_WEIGHT_GRID)
}

/// Mean throughput with the far-field (single-transmitter) interference
/// form applied to the whole field beyond D. Upper-bounds `tau_analytic`
/// because the far-field form underestimates interference diversity.
pub fn tau_farfield_only(p: &AnalyticParams, q: &QuadratureSpec) -> Result<f64> {
    let far = AnalyticParams::with_split(p.net, p.net.min_separation_m);
    tau_analytic_with_table(&far, q, None)
}

/// Spatial throughput `eta = lambda_u * p_r(D) * tau` in bit/s per m^2.
pub fn eta_analytic(p: &AnalyticParams, q: &QuadratureSpec) -> Result<f64> {
    Ok(p.scheduled_intensity() * tau_analytic(p, q)?)
}

/// Spatial throughput with an explicit weight-table resolution.
pub fn eta_analytic_with_grid(
    p: &AnalyticParams,
    q: &QuadratureSpec,
    n_grid: usize,
) -> Result<f64> {
    Ok(p.scheduled_intensity() * tau_analytic_with_grid(p, q, n_grid)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn baseline() -> AnalyticParams {
        AnalyticParams::new(NetworkConfig::baseline())
    }

    fn q() -> QuadratureSpec {
        QuadratureSpec::default()
    }

    #[test]
    fn mean_signal_power_matches_campbell_closed_form() {
        // 2 pi 5e-5 [10^-1.6 * 50 + (10^-1.6 - 200^-1.6)/1.6] at baseline.
        assert_relative_eq!(
            mean_signal_power(&NetworkConfig::baseline()),
            8.836_871_594_866_17e-6,
            max_relative = 1e-12
        );
        // Against direct quadrature of the definition.
        let net = NetworkConfig::baseline();
        let direct = integrate_with_breakpoints(
            |r: f64| net.path_loss.gain(r) * r,
            &[0.0, 10.0, 200.0],
            &QuadratureSpec { rtol: 1e-12, atol: 1e-20, max_subdivisions: 2000 },
        )
        .unwrap()
            * 2.0
            * PI
            * net.lambda_r_per_m2;
        assert_relative_eq!(mean_signal_power(&net), direct, max_relative = 1e-11);
    }

    #[test]
    fn laplace_s_matches_reference_values() {
        // High-precision reference values for the baseline cell.
        let p = baseline();
        for (t, expect) in [
            (1e5, 0.850_085_839_850_012_75),
            (1e6, 0.571_826_529_535_192_58),
            (1e7, 0.173_236_031_649_126_12),
            (1e8, 0.015_517_782_585_943_284),
        ] {
            let v = laplace_s(t, &p, &q()).unwrap();
            assert_relative_eq!(v, expect, max_relative = 1e-8);
        }
    }

    #[test]
    fn laplace_s_boundary_cases() {
        let p = baseline();
        assert_eq!(laplace_s(0.0, &p, &q()).unwrap(), 1.0);
        let empty_cell = AnalyticParams::new(NetworkConfig {
            cell_radius_m: 0.0,
            ..NetworkConfig::baseline()
        });
        for t in [0.0, 1e3, 1e9] {
            assert_eq!(laplace_s(t, &empty_cell, &q()).unwrap(), 1.0);
        }
    }

    #[test]
    fn laplace_s_is_a_transform_in_range_and_decreasing() {
        let p = baseline();
        let mut prev = 1.0;
        for i in 0..40 {
            let t = 10f64.powf(i as f64 / 4.0);
            let v = laplace_s(t, &p, &q()).unwrap();
            assert!((0.0..=1.0).contains(&v));
            assert!(v <= prev + 1e-12, "not non-increasing at t = {t}");
            prev = v;
        }
    }

    #[test]
    fn one_minus_laplace_s_is_first_order_at_small_t() {
        let p = baseline();
        let mean_s = mean_signal_power(&p.net);
        for t in [1e-3, 1e-1, 1.0] {
            let v = one_minus_laplace_s(t, &p, &q()).unwrap();
            assert_relative_eq!(v, mean_s * t, max_relative = 1e-3);
        }
    }

    #[test]
    fn weight_moment_matches_reference_values() {
        // Reference values computed from the definition at high precision.
        let p = baseline();
        for (r, expect) in [
            (0.0, 0.959_949_015_485_525_54),
            (25.0, 0.796_603_815_057_873_84),
            (100.0, 0.185_032_104_049_813_32),
            (190.0, 0.040_953_781_085_717_69),
            (200.0, 0.035_699_682_247_706_82),
        ] {
            let v = weight_moment(r, &p, &q()).unwrap();
            assert_relative_eq!(v, expect, max_relative = 1e-5);
        }
    }

    #[test]
    fn weight_moment_is_one_for_a_lone_access_point() {
        // lambda_r -> 0: the conditioned access point is alone, weight 1.
        let p = AnalyticParams::new(NetworkConfig {
            lambda_r_per_m2: 0.0,
            ..NetworkConfig::baseline()
        });
        for r in [0.0, 50.0, 200.0] {
            assert_relative_eq!(weight_moment(r, &p, &q()).unwrap(), 1.0, max_relative = 1e-9);
        }
    }

    #[test]
    fn weight_moment_rejects_out_of_cell_distances() {
        let err = weight_moment(201.0, &baseline(), &q()).unwrap_err();
        assert_eq!(err.exit_code(), 2);
    }

    #[test]
    fn weight_sum_identity_holds() {
        // 2 pi lambda_r integral_0^C W(r) r dr = 1 - e^{-lambda_r pi C^2}:
        // the cell's weights sum to 1 whenever it is non-empty.
        let p = baseline();
        let lhs = integrate_with_breakpoints(
            |r: f64| weight_moment(r, &p, &q()).unwrap() * r,
            &[0.0, 10.0, 200.0],
            &QuadratureSpec { rtol: 1e-7, atol: 1e-12, max_subdivisions: 2000 },
        )
        .unwrap()
            * 2.0
            * PI
            * p.net.lambda_r_per_m2;
        assert_relative_eq!(lhs, 0.998_132_557_268_292, max_relative = 1e-5);
    }

    #[test]
    fn weight_table_agrees_with_direct_evaluation() {
        let p = baseline();
        let table = build_weight_table(&p, &q(), DEFAULT_WEIGHT_GRID).unwrap();
        // Node endpoints match direct calls exactly (same quadrature).
        assert_relative_eq!(
            table.eval(10.0),
            weight_moment(10.0, &p, &q()).unwrap(),
            max_relative = 1e-12
        );
        // Off-grid points within the interpolation tolerance.
        for r in [13.0, 37.0, 80.0, 140.0, 195.0] {
            assert_relative_eq!(
                table.eval(r),
                weight_moment(r, &p, &q()).unwrap(),
                max_relative = 3e-5
            );
        }
        // Monotone non-increasing across the whole range.
        let mut prev = f64::INFINITY;
        for k in 0..=400 {
            let v = table.eval(0.5 * k as f64);
            assert!(v <= prev + 1e-15);
            prev = v;
        }
    }

    #[test]
    fn weight_table_decreases_pointwise_when_cell_grows() {
        // More access points in a larger cell each get less power.
        let p_small = baseline();
        let p_large = AnalyticParams::new(NetworkConfig {
            cell_radius_m: 300.0,
            ..NetworkConfig::baseline()
        });
        let t_small = build_weight_table(&p_small, &q(), DEFAULT_WEIGHT_GRID).unwrap();
        let t_large = build_weight_table(&p_large, &q(), DEFAULT_WEIGHT_GRID).unwrap();
        for r in [0.0, 25.0, 60.0, 120.0, 200.0] {
            assert!(
                t_large.eval(r) < t_small.eval(r),
                "W did not decrease at r = {r} when C grew"
            );
        }
    }

    #[test]
    fn far_field_form_has_the_right_empty_cell_mass() {
        let p = baseline();
        // e^{-lambda_r pi C^2} = e^{-2 pi} at baseline.
        let empty = (-p.mean_cell_size()).exp();
        assert_relative_eq!(empty, 1.867_442_731_707_99e-3, max_relative = 1e-12);
        assert_eq!(laplace_i_rho_far(0.0, 1_000.0, &p), 1.0);
        // t -> inf: only the empty-cell mass survives.
        assert_relative_eq!(
            laplace_i_rho_far(1e30, 1_000.0, &p),
            empty,
            max_relative = 1e-9
        );
    }

    #[test]
    fn near_field_transform_approaches_far_field_at_large_distance() {
        let p = baseline();
        let table = build_weight_table(&p, &q(), DEFAULT_WEIGHT_GRID).unwrap();
        let rho = 100.0 * p.net.cell_radius_m;
        for t in [1e8, 1e10, 1e12] {
            let exact = laplace_i_rho(t, rho, &p, &q(), &table).unwrap();
            let far = laplace_i_rho_far(t, rho, &p);
            assert!(
                (exact - far).abs() / far < 1e-3,
                "gap at t = {t}: exact {exact} vs far {far}"
            );
        }
    }

    #[test]
    fn interference_transforms_are_trivial_without_users_or_at_t_zero() {
        let p = baseline();
        let table = build_weight_table(&p, &q(), DEFAULT_WEIGHT_GRID).unwrap();
        assert_eq!(laplace_j(0.0, &p, &q(), Some(&table)).unwrap(), 1.0);
        let no_users = AnalyticParams::new(NetworkConfig {
            lambda_u_per_m2: 0.0,
            ..NetworkConfig::baseline()
        });
        assert_eq!(laplace_j(1e8, &no_users, &q(), None).unwrap(), 1.0);
    }

    #[test]
    fn laplace_j_is_in_range_and_decreasing() {
        let p = baseline();
        let table = build_weight_table(&p, &q(), DEFAULT_WEIGHT_GRID).unwrap();
        let mut prev = 1.0;
        for i in 0..12 {
            let t = 10f64.powf(4.0 + i as f64 * 0.75);
            let v = laplace_j(t, &p, &q(), Some(&table)).unwrap();
            assert!((0.0..=1.0).contains(&v), "out of range at t = {t}: {v}");
            assert!(v <= prev + 1e-12, "not non-increasing at t = {t}");
            prev = v;
        }
    }

    #[test]
    fn throughput_integral_reproduces_single_exponential_closed_form() {
        // S exponential with unit mean, no interference, noise c = 0.5:
        // E[ln(1 + S/c)] = e^c E1(c) = 0.9229106324837305. With B = ln 2
        // the bit/s prefactor cancels.
        let v = throughput_from_laplace(
            |t| Ok(t / (1.0 + t)),
            |_| Ok(1.0),
            0.5,
            std::f64::consts::LN_2,
            1.0,
            None,
            &QuadratureSpec { rtol: 1e-9, atol: 1e-12, max_subdivisions: 4000 },
        )
        .unwrap();
        assert_relative_eq!(v, 0.922_910_632_483_730_5, max_relative = 1e-8);
    }

    #[test]
    fn throughput_without_any_decay_is_rejected() {
        let err = throughput_from_laplace(
            |t| Ok(t / (1.0 + t)),
            |_| Ok(1.0),
            0.0,
            1e7,
            1.0,
            None,
            &q(),
        )
        .unwrap_err();
        assert!(err.to_string().contains("does not decay"), "{err}");
    }

    #[test]
    fn tau_is_zero_for_an_empty_cell() {
        let p = AnalyticParams::new(NetworkConfig {
            cell_radius_m: 0.0,
            ..NetworkConfig::baseline()
        });
        assert_eq!(tau_analytic(&p, &q()).unwrap(), 0.0);
        assert_eq!(tau_farfield_only(&p, &q()).unwrap(), 0.0);
    }

    #[test]
    fn growth_constant_matches_arctan_closed_form() {
        // alpha = 4: integral_0^inf s/(s^4+1) ds = pi/4.
        assert_relative_eq!(interference_growth_constant(4.0), PI / 4.0, max_relative = 1e-14);
    }
}
