//! Propagation and small-scale fading primitives.
//!
//! Links use a bounded power-law path loss together with independent
//! Rayleigh fading: each link carries an exponential power gain with unit
//! mean and a phase drawn uniformly from `[0, 2*pi)`.

use rand::Rng;
use rand_distr::{Distribution, Exp1};
use std::f64::consts::TAU;

/// Bounded power-law path loss `l(d) = max(d, d0)^(-alpha)`.
///
/// Distances below the reference distance `d0` saturate, which keeps the
/// received power finite for transmitters arbitrarily close to the receiver.
/// All lengths are in meters; the returned gain is dimensionless.
#[inline]
pub fn path_loss(distance_m: f64, alpha: f64, d0_m: f64) -> f64 {
    distance_m.max(d0_m).powf(-alpha)
}

/// Parameters of the bounded power-law path loss.
///
/// `alpha > 2` is required for the aggregate interference of a planar field
/// to stay finite; that constraint is enforced at configuration validation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PathLossModel {
    /// Reference distance in meters below which the loss saturates.
    pub d0_m: f64,
    /// Path-loss exponent (dimensionless).
    pub alpha: f64,
}

impl PathLossModel {
    /// Evaluates the path-loss gain at distance `d` meters.
    #[inline]
    pub fn gain(&self, distance_m: f64) -> f64 {
        path_loss(distance_m, self.alpha, self.d0_m)
    }
}

/// One Rayleigh fading draw for a single link.
///
/// `power` is the squared envelope (exponential with unit mean) and `phase`
/// the carrier phase in radians, uniform on `[0, 2*pi)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Fading {
    /// Power gain `g = |h|^2`, exponential with unit mean.
    pub power: f64,
    /// Carrier phase in radians, uniform on `[0, 2*pi)`.
    pub phase: f64,
}

impl Fading {
    /// Draws an independent fading state from `rng`.
    pub fn sample<R: Rng + ?Sized>(rng: &mut R) -> Self {
        Fading {
            power: Exp1.sample(rng),
            phase: rng.random_range(0.0..TAU),
        }
    }
}

/// Draws `n` independent link fading states.
pub fn sample_link_fadings<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Vec<Fading> {
    (0..n).map(|_| Fading::sample(rng)).collect()
}

/// Thermal noise power in watts for a given bandwidth and noise power
/// spectral density in dBm/Hz.
pub fn noise_power(bandwidth_hz: f64, noise_psd_dbm_hz: f64) -> f64 {
    dbm_to_watts(noise_psd_dbm_hz + 10.0 * bandwidth_hz.log10())
}

/// Converts a power level from dBm to watts.
#[inline]
pub fn dbm_to_watts(dbm: f64) -> f64 {
    10f64.powf((dbm - 30.0) / 10.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn path_loss_matches_power_law_beyond_reference_distance() {
        // 100 m at exponent 3.6: 100^-3.6 = 10^-7.2.
        assert_relative_eq!(
            path_loss(100.0, 3.6, 10.0),
            6.309_573_444_801_93e-8,
            max_relative = 1e-14
        );
        assert_relative_eq!(path_loss(200.0, 4.0, 1.0), 6.25e-10, max_relative = 1e-14);
    }

    #[test]
    fn path_loss_saturates_below_reference_distance() {
        let at_ref = path_loss(10.0, 3.6, 10.0);
        assert_eq!(path_loss(0.0, 3.6, 10.0), at_ref);
        assert_eq!(path_loss(5.0, 3.6, 10.0), at_ref);
        assert_eq!(path_loss(9.999, 3.6, 10.0), at_ref);
        assert!(path_loss(10.001, 3.6, 10.0) < at_ref);
    }

    #[test]
    fn path_loss_is_monotone_non_increasing() {
        let model = PathLossModel { d0_m: 10.0, alpha: 3.6 };
        let mut prev = f64::INFINITY;
        for i in 0..2000 {
            let d = 0.05 * i as f64;
            let l = model.gain(d);
            assert!(l <= prev, "path loss increased at d = {d}");
            assert!(l.is_finite() && l > 0.0);
            prev = l;
        }
    }

    #[test]
    fn noise_power_matches_dbm_arithmetic() {
        // -174 dBm/Hz over 10 MHz: -174 + 70 = -104 dBm = 10^-13.4 W.
        assert_relative_eq!(
            noise_power(1e7, -174.0),
            3.981_071_705_534_97e-14,
            max_relative = 1e-12
        );
        // Identity bandwidth: 1 Hz leaves the PSD unchanged.
        assert_relative_eq!(noise_power(1.0, -174.0), dbm_to_watts(-174.0), max_relative = 1e-14);
        // 24 dBm transmit power in watts.
        assert_relative_eq!(dbm_to_watts(24.0), 0.251_188_643_150_958, max_relative = 1e-14);
        // Normalized noise at 24 dBm / 10 MHz: -104 - 24 = -128 dB.
        assert_relative_eq!(
            noise_power(1e7, -174.0) / dbm_to_watts(24.0),
            1.584_893_192_461_11e-13,
            max_relative = 1e-12
        );
    }

    #[test]
    fn fading_has_unit_mean_power_and_uniform_phase() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let n = 200_000;
        let mut mean_power = 0.0;
        let mut tail = 0usize;
        let mut mean_phase = 0.0;
        for _ in 0..n {
            let f = Fading::sample(&mut rng);
            assert!(f.power >= 0.0);
            assert!((0.0..TAU).contains(&f.phase));
            mean_power += f.power;
            mean_phase += f.phase;
            if f.power > 1.0 {
                tail += 1;
            }
        }
        mean_power /= n as f64;
        mean_phase /= n as f64;
        // Exponential(1): mean 1, P(g > 1) = 1/e = 0.36788. With n = 2e5 the
        // standard errors are ~2.2e-3 and ~1.1e-3; allow four sigma.
        assert_relative_eq!(mean_power, 1.0, epsilon = 9e-3);
        assert_relative_eq!(tail as f64 / n as f64, 0.367_879_441_171_442, epsilon = 5e-3);
        // Uniform phase: mean pi with sd TAU/sqrt(12n) ~ 4e-3.
        assert_relative_eq!(mean_phase, std::f64::consts::PI, epsilon = 2e-2);
    }

    #[test]
    fn sample_link_fadings_returns_requested_count() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        assert!(sample_link_fadings(0, &mut rng).is_empty());
        let fadings = sample_link_fadings(1000, &mut rng);
        assert_eq!(fadings.len(), 1000);
        let mean: f64 = fadings.iter().map(|f| f.power).sum::<f64>() / 1000.0;
        assert!((mean - 1.0).abs() < 0.12, "mean power {mean} far from 1");
    }

    #[test]
    fn fading_goodness_of_fit_against_unit_exponential() {
        // Chi-square test on 10^5 samples against Exp(1) using deciles.
        // Critical value for 9 degrees of freedom at significance 0.01 is
        // 21.666; the seed is fixed so this is deterministic.
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        let n = 100_000usize;
        let bins = 10usize;
        let mut counts = vec![0usize; bins];
        for _ in 0..n {
            let g = Fading::sample(&mut rng).power;
            // Probability-integral transform: 1 - e^-g is uniform on [0,1).
            let u = -(-g).exp_m1();
            let idx = ((u * bins as f64) as usize).min(bins - 1);
            counts[idx] += 1;
        }
        let expected = n as f64 / bins as f64;
        let chi2: f64 = counts
            .iter()
            .map(|&c| {
                let diff = c as f64 - expected;
                diff * diff / expected
            })
            .sum();
        assert!(chi2 < 21.666, "chi-square statistic {chi2} exceeds the 1% critical value");
    }
}
