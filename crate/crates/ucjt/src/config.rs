//! Run configuration in two layers: [`ExperimentConfig`] carries the
//! human-facing units used by the CLI and TOML files (km, km^-2, dBm, MHz),
//! and [`NetworkConfig`] carries the resolved SI values (m, m^-2, W, Hz)
//! used by both evaluation engines. Conversion happens in exactly one place
//! so unit mistakes cannot creep into the math.

use crate::channel::{dbm_to_watts, noise_power, PathLossModel};
use crate::error::{Error, Result};
use crate::geometry::{Metric, Window};
use crate::schemes::Scheme;
use serde::{Deserialize, Serialize};

/// Fully resolved network model in SI units.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NetworkConfig {
    /// Access-point density in m^-2.
    pub lambda_r_per_m2: f64,
    /// Contending-user density in m^-2.
    pub lambda_u_per_m2: f64,
    /// Virtual-cell radius C in meters.
    pub cell_radius_m: f64,
    /// Hard-core separation D between co-channel users, in meters.
    pub min_separation_m: f64,
    /// Bounded power-law path loss.
    pub path_loss: PathLossModel,
    /// Per-user transmit power P in watts.
    pub tx_power_w: f64,
    /// System bandwidth B in Hz.
    pub bandwidth_hz: f64,
    /// Thermal noise power in watts over the full bandwidth.
    pub noise_w: f64,
    /// Simulation window (Monte Carlo engine only).
    pub window: Window,
}

impl NetworkConfig {
    /// The default operating point: access points at 50 km^-2, users at
    /// 20 km^-2, C = 200 m, D = 400 m, alpha = 3.6 with a 10 m reference
    /// distance, 24 dBm transmit power, 10 MHz bandwidth with -174 dBm/Hz
    /// noise, on a toroidal 10 km square window.
    pub fn baseline() -> Self {
        NetworkConfig {
            lambda_r_per_m2: 5e-5,
            lambda_u_per_m2: 2e-5,
            cell_radius_m: 200.0,
            min_separation_m: 400.0,
            path_loss: PathLossModel { d0_m: 10.0, alpha: 3.6 },
            tx_power_w: dbm_to_watts(24.0),
            bandwidth_hz: 1e7,
            noise_w: noise_power(1e7, -174.0),
            window: Window::square(10_000.0),
        }
    }

    /// Noise power normalized by transmit power (the `sigma_n^2 / P` term of
    /// the SINR denominator).
    pub fn noise_over_p(&self) -> f64 {
        self.noise_w / self.tx_power_w
    }

    /// Default near/far interference split distance: far enough that a
    /// virtual cell looks like a point transmitter (10 C) and well outside
    /// the exclusion region (5 D).
    pub fn default_near_far_split_m(&self) -> f64 {
        (5.0 * self.min_separation_m).max(10.0 * self.cell_radius_m)
    }

    /// Checks physical and numerical preconditions.
    pub fn validate(&self) -> Result<()> {
        if !(self.lambda_r_per_m2 >= 0.0) || !(self.lambda_u_per_m2 >= 0.0) {
            return Err(Error::Config(format!(
                "densities must be nonnegative, got lambda_r = {} m^-2, lambda_u = {} m^-2",
                self.lambda_r_per_m2, self.lambda_u_per_m2
            )));
        }
        if !(self.cell_radius_m >= 0.0) {
            return Err(Error::Config(format!(
                "cell radius must be nonnegative, got {} m",
                self.cell_radius_m
            )));
        }
        if !(self.min_separation_m >= 0.0) {
            return Err(Error::Config(format!(
                "minimum separation must be nonnegative, got {} m",
                self.min_separation_m
            )));
        }
        if !(self.path_loss.alpha > 2.0) {
            return Err(Error::Config(format!(
                "path-loss exponent must exceed 2 (got {}): with alpha <= 2 the \
                 aggregated interference from an infinite plane diverges",
                self.path_loss.alpha
            )));
        }
        if !(self.path_loss.d0_m > 0.0) {
            return Err(Error::Config(format!(
                "path-loss reference distance must be positive, got {} m",
                self.path_loss.d0_m
            )));
        }
        if !(self.tx_power_w > 0.0) || !(self.bandwidth_hz > 0.0) || !(self.noise_w >= 0.0) {
            return Err(Error::Config(format!(
                "need tx power > 0 W (got {}), bandwidth > 0 Hz (got {}), noise >= 0 W (got {})",
                self.tx_power_w, self.bandwidth_hz, self.noise_w
            )));
        }
        if !(self.window.width_m > 0.0) || !(self.window.height_m > 0.0) {
            return Err(Error::Config("window sides must be positive".into()));
        }
        let half_min = self.window.width_m.min(self.window.height_m) / 2.0;
        if self.cell_radius_m > half_min || self.min_separation_m > half_min {
            return Err(Error::Config(format!(
                "cell radius ({} m) and minimum separation ({} m) must not exceed half the \
                 window side ({half_min} m)",
                self.cell_radius_m, self.min_separation_m
            )));
        }
        Ok(())
    }
}

/// Evaluation engine selection.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    /// Quadrature engine only.
    Analytic,
    /// Monte Carlo engine only.
    Montecarlo,
    /// Both engines side by side.
    Compare,
}

/// Which length parameter the sweep grid applies to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
pub enum SweepVar {
    /// Sweep the virtual-cell radius C; D stays fixed; rows carry throughput.
    #[serde(rename = "c")]
    #[value(alias = "C")]
    C,
    /// Sweep the user separation D with C = D/2; rows carry spatial
    /// throughput.
    #[serde(rename = "d")]
    #[value(alias = "D")]
    D,
}

/// One experiment: a parameter sweep evaluated by one or both engines.
///
/// All fields have baseline defaults, so an empty TOML file (or no flags) is
/// a valid single-point run at the default operating point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ExperimentConfig {
    /// Engine(s) to run.
    pub mode: Mode,
    /// Transmission schemes to evaluate (one CSV row per grid point per
    /// scheme). The analytic engine models MRT; other schemes are Monte
    /// Carlo only.
    pub schemes: Vec<Scheme>,
    /// Swept parameter.
    pub sweep: SweepVar,
    /// Sweep grid in km, strictly increasing.
    pub grid_km: Vec<f64>,
    /// Access-point density in km^-2.
    pub lambda_r_km2: f64,
    /// Contending-user density in km^-2.
    pub lambda_u_km2: f64,
    /// Virtual-cell radius C in km (fixed value when sweeping D).
    pub c_km: f64,
    /// User separation D in km (fixed value when sweeping C).
    pub d_km: f64,
    /// Path-loss exponent.
    pub alpha: f64,
    /// Path-loss reference distance in meters.
    pub d0_m: f64,
    /// Per-user transmit power in dBm.
    pub tx_power_dbm: f64,
    /// Bandwidth in MHz.
    pub bandwidth_mhz: f64,
    /// Noise power spectral density in dBm/Hz.
    pub noise_psd_dbm_hz: f64,
    /// Simulation window side in km.
    pub window_km: f64,
    /// Toroidal wrap-around distances (false = plain Euclidean).
    pub toroidal: bool,
    /// Root seed for the Monte Carlo engine.
    pub seed: u64,
    /// Geometry realizations per Monte Carlo estimate.
    pub drops: u32,
    /// Fading draws per geometry realization.
    pub fadings: u32,
    /// Relative quadrature tolerance.
    pub rtol: f64,
    /// Absolute quadrature tolerance (on transform values in [0, 1]).
    pub atol: f64,
    /// Near/far interference split distance in km; default max(5D, 10C).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub split_d_km: Option<f64>,
    /// Grid size of the cached first-order weight-moment table.
    pub weight_grid: usize,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            mode: Mode::Compare,
            schemes: vec![Scheme::Mrt],
            sweep: SweepVar::C,
            grid_km: vec![0.2],
            lambda_r_km2: 50.0,
            lambda_u_km2: 20.0,
            c_km: 0.2,
            d_km: 0.4,
            alpha: 3.6,
            d0_m: 10.0,
            tx_power_dbm: 24.0,
            bandwidth_mhz: 10.0,
            noise_psd_dbm_hz: -174.0,
            window_km: 10.0,
            toroidal: true,
            seed: 12345,
            drops: 400,
            fadings: 50,
            rtol: 1e-6,
            atol: 1e-10,
            split_d_km: None,
            weight_grid: 48,
        }
    }
}

impl ExperimentConfig {
    /// Parses a TOML document; unknown keys and non-physical values are
    /// rejected with descriptive errors.
    pub fn from_toml(text: &str) -> Result<Self> {
        let cfg: ExperimentConfig =
            toml::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    /// Serializes the resolved configuration as TOML.
    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("experiment config is always serializable")
    }

    /// Named experiment presets reproducing the three standard sweeps at
    /// desk scale.
    pub fn preset(name: &str) -> Result<Self> {
        let base = ExperimentConfig::default();
        match name {
            // Throughput vs cell radius, both engines, MRT.
            "fig2" => Ok(ExperimentConfig {
                mode: Mode::Compare,
                schemes: vec![Scheme::Mrt],
                sweep: SweepVar::C,
                grid_km: vec![0.05, 0.10, 0.15, 0.20, 0.25, 0.30],
                drops: 500,
                fadings: 50,
                ..base
            }),
            // Scheme comparison at the same grid, Monte Carlo only.
            "fig3" => Ok(ExperimentConfig {
                mode: Mode::Montecarlo,
                schemes: vec![Scheme::Mrt, Scheme::MaxSnr, Scheme::Nearest, Scheme::Ncjt],
                sweep: SweepVar::C,
                grid_km: vec![0.05, 0.10, 0.15, 0.20, 0.25, 0.30],
                drops: 500,
                fadings: 50,
                ..base
            }),
            // Spatial throughput vs separation with C = D/2.
            "fig4" => Ok(ExperimentConfig {
                mode: Mode::Compare,
                schemes: vec![Scheme::Mrt],
                sweep: SweepVar::D,
                grid_km: (1..=10).map(|i| i as f64 / 10.0).collect(),
                drops: 300,
                fadings: 30,
                ..base
            }),
            other => Err(Error::Config(format!(
                "unknown preset '{other}' (available: fig2, fig3, fig4)"
            ))),
        }
    }

    /// Resolves the SI-unit network model at one sweep grid point. Sweeping
    /// C keeps D fixed; sweeping D couples C = D/2.
    pub fn network_at(&self, grid_value_km: f64) -> NetworkConfig {
        let (c_km, d_km) = match self.sweep {
            SweepVar::C => (grid_value_km, self.d_km),
            SweepVar::D => (grid_value_km / 2.0, grid_value_km),
        };
        self.network_with(c_km, d_km)
    }

    /// Resolves the SI-unit network model at the fixed (non-swept) operating
    /// point.
    pub fn network(&self) -> NetworkConfig {
        self.network_with(self.c_km, self.d_km)
    }

    fn network_with(&self, c_km: f64, d_km: f64) -> NetworkConfig {
        let metric = if self.toroidal { Metric::Toroidal } else { Metric::EuclideanWithGuard };
        NetworkConfig {
            // Dividing by the exactly representable 1e6 keeps round decimal
            // densities exact (50 km^-2 -> 5e-5 m^-2 to the last bit).
            lambda_r_per_m2: self.lambda_r_km2 / 1e6,
            lambda_u_per_m2: self.lambda_u_km2 / 1e6,
            cell_radius_m: c_km * 1e3,
            min_separation_m: d_km * 1e3,
            path_loss: PathLossModel { d0_m: self.d0_m, alpha: self.alpha },
            tx_power_w: dbm_to_watts(self.tx_power_dbm),
            bandwidth_hz: self.bandwidth_mhz * 1e6,
            noise_w: noise_power(self.bandwidth_mhz * 1e6, self.noise_psd_dbm_hz),
            window: Window {
                width_m: self.window_km * 1e3,
                height_m: self.window_km * 1e3,
                metric,
            },
        }
    }

    /// Near/far split distance in meters for a given network resolution.
    pub fn near_far_split_m(&self, net: &NetworkConfig) -> f64 {
        match self.split_d_km {
            Some(km) => km * 1e3,
            None => net.default_near_far_split_m(),
        }
    }

    /// Validates the experiment description and every grid point.
    pub fn validate(&self) -> Result<()> {
        if self.grid_km.is_empty() {
            return Err(Error::Config("sweep grid must be non-empty".into()));
        }
        if !self.grid_km.windows(2).all(|w| w[0] < w[1]) {
            return Err(Error::Config(format!(
                "sweep grid must be strictly increasing, got {:?}",
                self.grid_km
            )));
        }
        if self.grid_km.iter().any(|&g| !(g > 0.0) || !g.is_finite()) {
            return Err(Error::Config(format!(
                "sweep grid values must be positive and finite, got {:?}",
                self.grid_km
            )));
        }
        if self.schemes.is_empty() {
            return Err(Error::Config("at least one scheme is required".into()));
        }
        for (i, s) in self.schemes.iter().enumerate() {
            if self.schemes[..i].contains(s) {
                return Err(Error::Config(format!("duplicate scheme {s}")));
            }
        }
        if self.drops < 1 {
            return Err(Error::Config("drops must be >= 1".into()));
        }
        if self.fadings < 1 {
            return Err(Error::Config("fadings must be >= 1".into()));
        }
        if !(self.rtol > 0.0) || !(self.atol > 0.0) {
            return Err(Error::Config(format!(
                "quadrature tolerances must be positive, got rtol = {}, atol = {}",
                self.rtol, self.atol
            )));
        }
        if self.weight_grid < 8 {
            return Err(Error::Config(format!(
                "weight table needs at least 8 grid points, got {}",
                self.weight_grid
            )));
        }
        if let Some(km) = self.split_d_km {
            if !(km > 0.0) {
                return Err(Error::Config(format!(
                    "near/far split distance must be positive, got {km} km"
                )));
            }
        }
        // Check the fixed operating point and every grid point.
        self.network().validate()?;
        for &g in &self.grid_km {
            let net = self.network_at(g);
            net.validate()?;
            if self.near_far_split_m(&net) < net.min_separation_m {
                return Err(Error::Config(format!(
                    "near/far split ({} m) must be >= the minimum separation ({} m)",
                    self.near_far_split_m(&net),
                    net.min_separation_m
                )));
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn baseline_resolves_published_operating_point() {
        let net = NetworkConfig::baseline();
        net.validate().unwrap();
        assert_relative_eq!(net.lambda_r_per_m2, 5e-5);
        assert_relative_eq!(net.lambda_u_per_m2, 2e-5);
        assert_relative_eq!(net.cell_radius_m, 200.0);
        assert_relative_eq!(net.min_separation_m, 400.0);
        assert_relative_eq!(net.tx_power_w, 0.251_188_643_150_958, max_relative = 1e-14);
        assert_relative_eq!(net.noise_w, 3.981_071_705_534_97e-14, max_relative = 1e-12);
        assert_relative_eq!(net.noise_over_p(), 1.584_893_192_461_11e-13, max_relative = 1e-12);
        assert_relative_eq!(net.default_near_far_split_m(), 2_000.0);
    }

    #[test]
    fn empty_toml_is_the_baseline() {
        let cfg = ExperimentConfig::from_toml("").unwrap();
        assert_eq!(cfg, ExperimentConfig::default());
        let net = cfg.network();
        assert_eq!(net, NetworkConfig::baseline());
    }

    #[test]
    fn unit_conversion_is_exact() {
        let cfg = ExperimentConfig { c_km: 0.2, d_km: 0.4, ..ExperimentConfig::default() };
        let net = cfg.network();
        assert_relative_eq!(net.cell_radius_m, 200.0);
        assert_relative_eq!(net.min_separation_m, 400.0);
    }

    #[test]
    fn alpha_at_most_two_is_rejected_with_divergence_explanation() {
        let cfg = ExperimentConfig { alpha: 2.0, ..ExperimentConfig::default() };
        let err = cfg.validate().unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("diverges"), "message should explain divergence: {msg}");
        assert_eq!(err.exit_code(), 2);
    }

    #[test]
    fn unknown_keys_are_rejected() {
        let err = ExperimentConfig::from_toml("lambda_typo_km2 = 3.0").unwrap_err();
        assert!(err.to_string().contains("lambda_typo"), "{err}");
    }

    #[test]
    fn grids_must_be_strictly_increasing() {
        let mut cfg = ExperimentConfig::default();
        cfg.grid_km = vec![0.1, 0.1];
        assert!(cfg.validate().is_err());
        cfg.grid_km = vec![0.2, 0.1];
        assert!(cfg.validate().is_err());
        cfg.grid_km = vec![];
        assert!(cfg.validate().is_err());
        cfg.grid_km = vec![0.1, 0.2];
        cfg.validate().unwrap();
    }

    #[test]
    fn sweep_d_couples_half_cell_radius() {
        let cfg = ExperimentConfig { sweep: SweepVar::D, ..ExperimentConfig::default() };
        let net = cfg.network_at(0.6);
        assert_relative_eq!(net.min_separation_m, 600.0);
        assert_relative_eq!(net.cell_radius_m, 300.0);
    }

    #[test]
    fn toml_round_trip_is_identity() {
        for name in ["fig2", "fig3", "fig4"] {
            let cfg = ExperimentConfig::preset(name).unwrap();
            cfg.validate().unwrap();
            let text = cfg.to_toml();
            let back = ExperimentConfig::from_toml(&text).unwrap();
            assert_eq!(cfg, back, "preset {name} did not round-trip");
        }
        assert!(ExperimentConfig::preset("fig9").is_err());
    }

    #[test]
    fn split_override_is_honored_and_validated() {
        let mut cfg = ExperimentConfig { split_d_km: Some(3.0), ..ExperimentConfig::default() };
        let net = cfg.network();
        assert_relative_eq!(cfg.near_far_split_m(&net), 3_000.0);
        cfg.validate().unwrap();
        // A split inside the exclusion region is rejected.
        cfg.split_d_km = Some(0.2);
        assert!(cfg.validate().is_err());
    }
}
