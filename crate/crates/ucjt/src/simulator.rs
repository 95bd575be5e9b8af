//! Seeded Monte Carlo engine: samples network realizations ("drops") and
//! channel fadings, applies the transmission schemes, and averages Shannon
//! rates.
//!
//! Sampling is two-level. A drop fixes the geometry: the access-point
//! field, the co-channel users that won scheduling, and every virtual
//! cell. Within a drop, `fadings_per_drop` independent fading rounds
//! redraw all small-scale channels. Confidence intervals treat drops as
//! the independent unit (fading rounds within a drop share geometry and
//! are correlated), so the 95% half-width is `1.96 * sd(drop means) /
//! sqrt(n_drops)`.
//!
//! Reproducibility contract: drop `d` of a run with seed `s` uses
//! `drop_rng(s, d)`, a dedicated ChaCha stream, so results are
//! bit-identical regardless of thread count or scheduling, and all schemes
//! evaluated in one run see the same realizations (common random
//! numbers — scheme comparisons are paired).
//!
//! Interference model: every access point serving a co-channel user
//! radiates that user's stream with the power weight its cell's scheme
//! assigns. Streams from different transmitters are independent, so their
//! powers add at the probe; an access point serving several users has one
//! physical channel to the probe, so one cross-fading draw is shared by
//! all of its streams.

use crate::channel::sample_link_fadings;
use crate::config::NetworkConfig;
use crate::error::{Error, Result};
use crate::geometry::{
    form_virtual_cell, form_virtual_cells, scheduling_probability, typical_user_scenario, Point,
};
use crate::schemes::{argmax, signal_power, CellChannelState, Scheme};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp1, Poisson};
use rayon::prelude::*;
use std::f64::consts::PI;

/// One SINR observation, all powers normalized by the per-user transmit
/// power.
#[derive(Debug, Clone, Copy)]
pub struct SinrSample {
    pub signal: f64,
    pub interference: f64,
    pub noise_over_p: f64,
}

impl SinrSample {
    pub fn sinr(&self) -> f64 {
        self.signal / (self.interference + self.noise_over_p)
    }

    /// Shannon efficiency `log2(1 + SINR)` in bit/s/Hz.
    pub fn spectral_efficiency(&self) -> f64 {
        (1.0 + self.sinr()).log2()
    }
}

/// Sample mean with a drop-clustered 95% confidence half-width.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThroughputEstimate {
    pub mean: f64,
    pub ci95_halfwidth: f64,
    pub n_drops: usize,
    pub fadings_per_drop: usize,
}

/// Per-drop averages over the fading rounds, one entry per requested
/// scheme.
#[derive(Debug, Clone)]
pub struct DropOutcome {
    /// Mean rate in bit/s.
    pub mean_rate_bps: Vec<f64>,
    /// Mean received signal power (normalized by transmit power).
    pub mean_signal: Vec<f64>,
    /// Mean interference power (normalized by transmit power).
    pub mean_interference: Vec<f64>,
    /// Number of access points serving the probe.
    pub cell_size: usize,
    /// Number of scheduled co-channel users in the window.
    pub n_interferers: usize,
}

/// The dedicated random stream of one drop: same seed, one ChaCha stream
/// per drop index (stream 0 is left for non-drop sampling).
pub fn drop_rng(seed: u64, drop_index: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(drop_index as u64 + 1);
    rng
}

/// Interference a foreign cell creates at the probe: `sum_i w_i * cross_i`
/// where `w` are the power weights the scheme computes from the cell's own
/// serving strengths `s_i = l_i g_i`, and `cross_i` is the power the probe
/// receives from member `i` at full weight. Matches
/// `assignment(scheme, state).weights · cross` without the allocations.
fn weighted_interference(
    scheme: Scheme,
    serving_strengths: &[f64],
    nearest_index: usize,
    cross_powers: &[f64],
) -> f64 {
    let n = serving_strengths.len();
    if n == 0 {
        return 0.0;
    }
    match scheme {
        Scheme::Mrt => {
            let total: f64 = serving_strengths.iter().sum();
            if total > 0.0 {
                serving_strengths
                    .iter()
                    .zip(cross_powers)
                    .map(|(&s, &x)| s * x)
                    .sum::<f64>()
                    / total
            } else {
                cross_powers.iter().sum::<f64>() / n as f64
            }
        }
        Scheme::Ncjt => cross_powers.iter().sum::<f64>() / n as f64,
        Scheme::MaxSnr => {
            let i = argmax(serving_strengths.iter().copied()).expect("non-empty");
            cross_powers[i]
        }
        Scheme::Nearest => cross_powers[nearest_index],
    }
}

/// Runs one drop: samples the geometry once, then averages each scheme's
/// rate over `fadings_per_drop` fading rounds.
///
/// Random draws per round, in order: the probe cell's link fadings (power
/// and phase per member), each foreign cell's serving fading powers (cells
/// in co-channel user order), then one cross-channel power per active
/// foreign transmitter in ascending access-point index. The order is fixed
/// so a (seed, stream) pair fully determines the outcome.
pub fn run_drop<R: Rng + ?Sized>(
    cfg: &NetworkConfig,
    schemes: &[Scheme],
    fadings_per_drop: usize,
    rng: &mut R,
) -> Result<DropOutcome> {
    if schemes.is_empty() {
        return Err(Error::Config("no transmission scheme requested".into()));
    }
    if fadings_per_drop == 0 {
        return Err(Error::Config("at least one fading round per drop is required".into()));
    }

    let scenario = typical_user_scenario(cfg, rng)?;
    let radius = cfg.cell_radius_m;
    let typical_cell = form_virtual_cell(Point::ORIGIN, &scenario.raps, radius);
    let typical_gains: Vec<f64> =
        typical_cell.member_distances_m.iter().map(|&d| cfg.path_loss.gain(d)).collect();

    let interferers = &scenario.cochannel_users.retained;
    let foreign_cells = form_virtual_cells(&interferers.points, &scenario.raps, radius);

    // Foreign transmitters with a channel to the probe, deduplicated: an
    // access point serving several users still fades as one physical link.
    let mut active: Vec<usize> =
        foreign_cells.iter().flat_map(|c| c.member_indices.iter().copied()).collect();
    active.sort_unstable();
    active.dedup();

    struct ForeignCell {
        serving_gains: Vec<f64>,
        cross_powers_base: Vec<f64>, // path gain member -> probe
        slots: Vec<usize>,           // member -> shared cross-fading slot
        nearest_index: usize,
    }
    impl ForeignCell {
        fn len(&self) -> usize {
            self.serving_gains.len()
        }
    }
    let foreign: Vec<ForeignCell> = foreign_cells
        .iter()
        .filter(|cell| !cell.is_empty())
        .map(|cell| ForeignCell {
            serving_gains: cell
                .member_distances_m
                .iter()
                .map(|&d| cfg.path_loss.gain(d))
                .collect(),
            cross_powers_base: cell
                .member_indices
                .iter()
                .map(|&i| {
                    let d = cfg.window.distance(Point::ORIGIN, scenario.raps.points[i]);
                    cfg.path_loss.gain(d)
                })
                .collect(),
            slots: cell
                .member_indices
                .iter()
                .map(|&i| active.binary_search(&i).expect("member is active"))
                .collect(),
            nearest_index: argmax(cell.member_distances_m.iter().map(|&d| -d))
                .expect("non-empty"),
        })
        .collect();

    let nu = cfg.noise_over_p();
    let bandwidth = cfg.bandwidth_hz;
    let n_schemes = schemes.len();
    let mut rate_acc = vec![0.0; n_schemes];
    let mut signal_acc = vec![0.0; n_schemes];
    let mut interference_acc = vec![0.0; n_schemes];

    let mut probe_state = CellChannelState {
        distances_m: typical_cell.member_distances_m.clone(),
        path_gains: typical_gains,
        fadings: Vec::new(),
    };
    let mut strengths: Vec<Vec<f64>> = foreign.iter().map(|c| vec![0.0; c.len()]).collect();
    let mut cross: Vec<Vec<f64>> = foreign.iter().map(|c| vec![0.0; c.len()]).collect();
    let mut g0 = vec![0.0f64; active.len()];

    for _ in 0..fadings_per_drop {
        probe_state.fadings = sample_link_fadings(probe_state.len(), rng);
        for (cell, s) in foreign.iter().zip(strengths.iter_mut()) {
            for (si, &gain) in s.iter_mut().zip(&cell.serving_gains) {
                let g: f64 = rng.sample(Exp1);
                *si = gain * g;
            }
        }
        for slot in g0.iter_mut() {
            *slot = rng.sample(Exp1);
        }
        for (cell, x) in foreign.iter().zip(cross.iter_mut()) {
            for ((xi, &base), &slot) in x.iter_mut().zip(&cell.cross_powers_base).zip(&cell.slots)
            {
                *xi = base * g0[slot];
            }
        }

        for (k, &scheme) in schemes.iter().enumerate() {
            let s = signal_power(scheme, &probe_state);
            let j: f64 = foreign
                .iter()
                .zip(&strengths)
                .zip(&cross)
                .map(|((cell, s), x)| {
                    weighted_interference(scheme, s, cell.nearest_index, x)
                })
                .sum();
            let sample = SinrSample { signal: s, interference: j, noise_over_p: nu };
            rate_acc[k] += bandwidth * sample.spectral_efficiency();
            signal_acc[k] += s;
            interference_acc[k] += j;
        }
    }

    let norm = fadings_per_drop as f64;
    Ok(DropOutcome {
        mean_rate_bps: rate_acc.iter().map(|v| v / norm).collect(),
        mean_signal: signal_acc.iter().map(|v| v / norm).collect(),
        mean_interference: interference_acc.iter().map(|v| v / norm).collect(),
        cell_size: probe_state.len(),
        n_interferers: interferers.len(),
    })
}

fn summarize(drop_means: &[f64], fadings_per_drop: usize) -> ThroughputEstimate {
    let n = drop_means.len();
    let mean = drop_means.iter().sum::<f64>() / n as f64;
    let var = if n > 1 {
        drop_means.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (n - 1) as f64
    } else {
        0.0
    };
    ThroughputEstimate {
        mean,
        ci95_halfwidth: 1.96 * (var / n as f64).sqrt(),
        n_drops: n,
        fadings_per_drop,
    }
}

/// Estimates the mean throughput of every requested scheme on shared
/// realizations. Drops run in parallel; results are ordered by drop index,
/// so the outcome is independent of thread scheduling.
pub fn simulate_throughput(
    cfg: &NetworkConfig,
    schemes: &[Scheme],
    n_drops: usize,
    fadings_per_drop: usize,
    seed: u64,
) -> Result<Vec<ThroughputEstimate>> {
    cfg.validate()?;
    if n_drops == 0 {
        return Err(Error::Config("at least one drop is required".into()));
    }
    let outcomes: Result<Vec<DropOutcome>> = (0..n_drops)
        .into_par_iter()
        .map(|d| {
            let mut rng = drop_rng(seed, d);
            run_drop(cfg, schemes, fadings_per_drop, &mut rng)
        })
        .collect();
    let outcomes = outcomes?;
    Ok((0..schemes.len())
        .map(|k| {
            let xs: Vec<f64> = outcomes.iter().map(|o| o.mean_rate_bps[k]).collect();
            summarize(&xs, fadings_per_drop)
        })
        .collect())
}

/// Mean throughput of the typical user for one scheme, in bit/s.
pub fn estimate_tau(
    cfg: &NetworkConfig,
    scheme: Scheme,
    n_drops: usize,
    fadings_per_drop: usize,
    seed: u64,
) -> Result<ThroughputEstimate> {
    Ok(simulate_throughput(cfg, &[scheme], n_drops, fadings_per_drop, seed)?
        .pop()
        .expect("one scheme in, one estimate out"))
}

/// Spatial throughput `eta = lambda_u * p_r(D) * tau` in bit/s per m^2.
/// The scheduling probability is the exact hard-core retention closed
/// form, so the confidence interval scales with it.
pub fn estimate_eta(
    cfg: &NetworkConfig,
    scheme: Scheme,
    n_drops: usize,
    fadings_per_drop: usize,
    seed: u64,
) -> Result<ThroughputEstimate> {
    let tau = estimate_tau(cfg, scheme, n_drops, fadings_per_drop, seed)?;
    let density = cfg.lambda_u_per_m2
        * scheduling_probability(cfg.lambda_u_per_m2, cfg.min_separation_m);
    Ok(ThroughputEstimate {
        mean: tau.mean * density,
        ci95_halfwidth: tau.ci95_halfwidth * density,
        ..tau
    })
}

/// Draws independent samples of the served signal power S (normalized by
/// transmit power): fresh cell geometry and fading for every sample.
///
/// Member positions use the exact in-cell law directly — a Poisson count
/// on the disc with uniform positions — which matches sampling a full
/// window and keeping the points within the cell radius, at a fraction of
/// the cost.
pub fn sample_signal_powers(
    cfg: &NetworkConfig,
    scheme: Scheme,
    n: usize,
    seed: u64,
) -> Result<Vec<f64>> {
    cfg.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let radius = cfg.cell_radius_m;
    let mean_members = cfg.lambda_r_per_m2 * PI * radius * radius;
    let count_law = if mean_members > 0.0 {
        Some(Poisson::new(mean_members).map_err(|e| {
            Error::Config(format!("invalid cell-size mean {mean_members}: {e}"))
        })?)
    } else {
        None
    };
    let mut out = Vec::with_capacity(n);
    for _ in 0..n {
        let k = count_law.as_ref().map_or(0, |law| law.sample(&mut rng) as usize);
        let distances: Vec<f64> =
            (0..k).map(|_| radius * rng.random::<f64>().sqrt()).collect();
        let path_gains = distances.iter().map(|&d| cfg.path_loss.gain(d)).collect();
        let state = CellChannelState {
            distances_m: distances,
            path_gains,
            fadings: sample_link_fadings(k, &mut rng),
        };
        out.push(signal_power(scheme, &state));
    }
    Ok(out)
}

/// Empirical Laplace transform `mean(e^{-t x})` of a sample set.
pub fn empirical_laplace(samples: &[f64], t: f64) -> f64 {
    samples.iter().map(|&x| (-t * x).exp()).sum::<f64>() / samples.len() as f64
}

/// Monte Carlo estimate `(mean, standard error)` of the power weight an
/// access point at distance `r` from its user gets under maximum ratio
/// transmission, averaging over the rest of the cell and all fadings.
pub fn empirical_weight_moment(
    cfg: &NetworkConfig,
    r: f64,
    n: usize,
    seed: u64,
) -> Result<(f64, f64)> {
    cfg.validate()?;
    let radius = cfg.cell_radius_m;
    if !(0.0..=radius).contains(&r) {
        return Err(Error::Config(format!(
            "conditioned distance {r} m outside the cell radius {radius} m"
        )));
    }
    if n < 2 {
        return Err(Error::Config("need at least two realizations".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mean_members = cfg.lambda_r_per_m2 * PI * radius * radius;
    let count_law = if mean_members > 0.0 {
        Some(Poisson::new(mean_members).map_err(|e| {
            Error::Config(format!("invalid cell-size mean {mean_members}: {e}"))
        })?)
    } else {
        None
    };
    let conditioned_gain = cfg.path_loss.gain(r);
    let mut sum = 0.0;
    let mut sum_sq = 0.0;
    for _ in 0..n {
        let own: f64 = rng.sample(Exp1);
        let own_strength = conditioned_gain * own;
        let k = count_law.as_ref().map_or(0, |law| law.sample(&mut rng) as usize);
        let mut total = own_strength;
        for _ in 0..k {
            let d = radius * rng.random::<f64>().sqrt();
            let g: f64 = rng.sample(Exp1);
            total += cfg.path_loss.gain(d) * g;
        }
        let w = if total > 0.0 { own_strength / total } else { 0.0 };
        sum += w;
        sum_sq += w * w;
    }
    let mean = sum / n as f64;
    let var = (sum_sq - sum * sum / n as f64) / (n - 1) as f64;
    Ok((mean, (var.max(0.0) / n as f64).sqrt()))
}
