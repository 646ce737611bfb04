//! Flat `key = value` scenario files with `#` comments and namespaced keys.
//!
//! Units in files: powers in dBm, gains in dBi, distances in meters,
//! frequencies in Hz.  Values are validated and converted into library
//! configuration exactly once, at load.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use rislink::cascade::{DirectLink, ElementConfig, Mobility, SNRConfig};
use rislink::fading::{DGGParams, GenKParams, KappaMuParams, PhaseNoise, RWPTopology};
use rislink::mc::{link_budget, MCConfig, ScenarioConfig, REFERENCE_DIRECT_CAL_DB, REFERENCE_RIS_CAL_DB};

/// A configuration problem: carries the offending line/field for diagnostics.
#[derive(Debug)]
pub struct ConfigError(pub String);

impl std::fmt::Display for ConfigError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "configuration error: {}", self.0)
    }
}

impl std::error::Error for ConfigError {}

/// All scenario knobs, populated with reference-scenario defaults.
#[derive(Debug, Clone)]
pub struct Settings {
    pub n: usize,
    pub phase_bits: u32, // 0 = perfect compensation
    pub f_c_hz: f64,
    pub p_t_dbm: f64,
    pub noise_dbm: f64,
    pub g_t_dbi: f64,
    pub g_r_dbi: f64,
    pub d1_m: f64,
    pub d2_m: f64,
    pub path_exponent: f64,
    pub kappa: f64,
    pub mu: f64,
    pub alpha1: f64,
    pub beta1: f64,
    pub alpha2: f64,
    pub beta2: f64,
    pub topology: String, // 1d | 2d | 3d | static
    pub static_distance_m: f64,
    pub direct_enabled: bool,
    pub direct_m: f64,
    pub direct_big_m: f64,
    pub direct_sigma_db: f64,
    pub direct_m0: f64,
    pub ris_cal_db: f64,
    pub direct_cal_db: f64,
    pub gamma_th_db: f64,
    pub modulation: String, // bpsk | dbpsk | custom
    pub mod_p: f64,
    pub mod_q: f64,
    pub sweep_from_dbm: f64,
    pub sweep_to_dbm: f64,
    pub sweep_step_db: f64,
    pub grid_from: f64,
    pub grid_to: f64,
    pub grid_points: usize,
    pub trials: usize,
    pub seed: u64,
    pub streams: usize,
    /// Canonical text the settings were loaded from (hashed into manifests).
    pub source_text: String,
}

impl Default for Settings {
    fn default() -> Self {
        let mut s = Self {
            n: 10,
            phase_bits: 1,
            f_c_hz: 6.0e9,
            p_t_dbm: 30.0,
            noise_dbm: -74.0,
            g_t_dbi: 10.0,
            g_r_dbi: 10.0,
            d1_m: 50.0,
            d2_m: 100.0,
            path_exponent: 2.0,
            kappa: 4.0,
            mu: 2.0,
            alpha1: 2.0,
            beta1: 1.0,
            alpha2: 2.0,
            beta2: 2.0,
            topology: "1d".into(),
            static_distance_m: 50.0,
            direct_enabled: false,
            direct_m: 1.0,
            direct_big_m: 2.5454,
            direct_sigma_db: 4.0,
            direct_m0: 1.0,
            ris_cal_db: REFERENCE_RIS_CAL_DB,
            direct_cal_db: REFERENCE_DIRECT_CAL_DB,
            gamma_th_db: 10.0,
            modulation: "bpsk".into(),
            mod_p: 0.5,
            mod_q: 1.0,
            sweep_from_dbm: 0.0,
            sweep_to_dbm: 40.0,
            sweep_step_db: 1.0,
            grid_from: 1e-2,
            grid_to: 1e6,
            grid_points: 41,
            trials: 100_000,
            seed: 42,
            streams: 64,
            source_text: String::new(),
        };
        s.source_text = s.render();
        s
    }
}

impl Settings {
    /// Parse a scenario file; unknown keys and malformed values are errors
    /// with line diagnostics.
    pub fn parse(text: &str) -> Result<Self, ConfigError> {
        let mut s = Settings::default();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                ConfigError(format!("line {}: expected `key = value`, got `{raw}`", lineno + 1))
            })?;
            let (key, value) = (key.trim(), value.trim());
            s.apply(key, value)
                .map_err(|e| ConfigError(format!("line {}: key `{key}`: {e}", lineno + 1)))?;
        }
        s.source_text = s.render();
        s.check()?;
        Ok(s)
    }

    fn apply(&mut self, key: &str, value: &str) -> Result<(), String> {
        fn f(v: &str) -> Result<f64, String> {
            v.parse::<f64>().map_err(|_| format!("`{v}` is not a number"))
        }
        fn u(v: &str) -> Result<usize, String> {
            v.parse::<usize>().map_err(|_| format!("`{v}` is not a non-negative integer"))
        }
        match key {
            "ris.n" => self.n = u(value)?,
            "phase.L" => self.phase_bits = u(value)? as u32,
            "radio.f_c_hz" => self.f_c_hz = f(value)?,
            "radio.p_t_dbm" => self.p_t_dbm = f(value)?,
            "radio.noise_dbm" => self.noise_dbm = f(value)?,
            "radio.g_t_dbi" => self.g_t_dbi = f(value)?,
            "radio.g_r_dbi" => self.g_r_dbi = f(value)?,
            "geometry.d1_m" => self.d1_m = f(value)?,
            "geometry.d2_m" => self.d2_m = f(value)?,
            "geometry.path_exponent" => self.path_exponent = f(value)?,
            "fading.kappa" => self.kappa = f(value)?,
            "fading.mu" => self.mu = f(value)?,
            "fading.alpha1" => self.alpha1 = f(value)?,
            "fading.beta1" => self.beta1 = f(value)?,
            "fading.alpha2" => self.alpha2 = f(value)?,
            "fading.beta2" => self.beta2 = f(value)?,
            "mobility.topology" => match value {
                "1d" | "2d" | "3d" | "static" => self.topology = value.into(),
                other => return Err(format!("unknown topology `{other}` (want 1d|2d|3d|static)")),
            },
            "mobility.static_distance_m" => self.static_distance_m = f(value)?,
            "direct.enabled" => {
                self.direct_enabled = value
                    .parse::<bool>()
                    .map_err(|_| format!("`{value}` is not true/false"))?
            }
            "direct.m" => self.direct_m = f(value)?,
            "direct.M" => self.direct_big_m = f(value)?,
            "direct.sigma_db" => self.direct_sigma_db = f(value)?,
            "direct.m0" => self.direct_m0 = f(value)?,
            "budget.ris_cal_db" => self.ris_cal_db = f(value)?,
            "budget.direct_cal_db" => self.direct_cal_db = f(value)?,
            "metric.gamma_th_db" => self.gamma_th_db = f(value)?,
            "metric.modulation" => match value {
                "bpsk" => {
                    self.modulation = value.into();
                    self.mod_p = 0.5;
                    self.mod_q = 1.0;
                }
                "dbpsk" => {
                    self.modulation = value.into();
                    self.mod_p = 1.0;
                    self.mod_q = 1.0;
                }
                "custom" => self.modulation = value.into(),
                other => return Err(format!("unknown modulation `{other}` (want bpsk|dbpsk|custom)")),
            },
            "metric.mod_p" => self.mod_p = f(value)?,
            "metric.mod_q" => self.mod_q = f(value)?,
            "sweep.from_dbm" => self.sweep_from_dbm = f(value)?,
            "sweep.to_dbm" => self.sweep_to_dbm = f(value)?,
            "sweep.step_db" => self.sweep_step_db = f(value)?,
            "grid.from" => self.grid_from = f(value)?,
            "grid.to" => self.grid_to = f(value)?,
            "grid.points" => self.grid_points = u(value)?,
            "mc.trials" => self.trials = u(value)?,
            "mc.seed" => {
                self.seed = value.parse::<u64>().map_err(|_| format!("`{value}` is not a u64"))?
            }
            "mc.streams" => self.streams = u(value)?,
            other => return Err(format!("unknown key `{other}`")),
        }
        Ok(())
    }

    fn check(&self) -> Result<(), ConfigError> {
        if self.n == 0 {
            return Err(ConfigError("ris.n must be >= 1".into()));
        }
        if !(self.sweep_step_db > 0.0) || self.sweep_to_dbm < self.sweep_from_dbm {
            return Err(ConfigError("sweep grid must be non-empty and ascending".into()));
        }
        if self.grid_points < 2 || !(self.grid_to > self.grid_from) || !(self.grid_from > 0.0) {
            return Err(ConfigError("grid must be positive, ascending, with >= 2 points".into()));
        }
        if self.trials == 0 || self.streams == 0 {
            return Err(ConfigError("mc.trials and mc.streams must be >= 1".into()));
        }
        Ok(())
    }

    /// Canonical rendering: every key, fixed order.  Parsing this text
    /// reproduces the settings; its hash identifies the scenario.
    pub fn render(&self) -> String {
        let mut t = String::from("# rislink scenario (canonical rendering)\n");
        let mut kv: BTreeMap<&str, String> = BTreeMap::new();
        kv.insert("ris.n", self.n.to_string());
        kv.insert("phase.L", self.phase_bits.to_string());
        kv.insert("radio.f_c_hz", self.f_c_hz.to_string());
        kv.insert("radio.p_t_dbm", self.p_t_dbm.to_string());
        kv.insert("radio.noise_dbm", self.noise_dbm.to_string());
        kv.insert("radio.g_t_dbi", self.g_t_dbi.to_string());
        kv.insert("radio.g_r_dbi", self.g_r_dbi.to_string());
        kv.insert("geometry.d1_m", self.d1_m.to_string());
        kv.insert("geometry.d2_m", self.d2_m.to_string());
        kv.insert("geometry.path_exponent", self.path_exponent.to_string());
        kv.insert("fading.kappa", self.kappa.to_string());
        kv.insert("fading.mu", self.mu.to_string());
        kv.insert("fading.alpha1", self.alpha1.to_string());
        kv.insert("fading.beta1", self.beta1.to_string());
        kv.insert("fading.alpha2", self.alpha2.to_string());
        kv.insert("fading.beta2", self.beta2.to_string());
        kv.insert("mobility.topology", self.topology.clone());
        kv.insert("mobility.static_distance_m", self.static_distance_m.to_string());
        kv.insert("direct.enabled", self.direct_enabled.to_string());
        kv.insert("direct.m", self.direct_m.to_string());
        kv.insert("direct.M", self.direct_big_m.to_string());
        kv.insert("direct.sigma_db", self.direct_sigma_db.to_string());
        kv.insert("direct.m0", self.direct_m0.to_string());
        kv.insert("budget.ris_cal_db", self.ris_cal_db.to_string());
        kv.insert("budget.direct_cal_db", self.direct_cal_db.to_string());
        kv.insert("metric.gamma_th_db", self.gamma_th_db.to_string());
        kv.insert("metric.modulation", self.modulation.clone());
        kv.insert("metric.mod_p", self.mod_p.to_string());
        kv.insert("metric.mod_q", self.mod_q.to_string());
        kv.insert("sweep.from_dbm", self.sweep_from_dbm.to_string());
        kv.insert("sweep.to_dbm", self.sweep_to_dbm.to_string());
        kv.insert("sweep.step_db", self.sweep_step_db.to_string());
        kv.insert("grid.from", self.grid_from.to_string());
        kv.insert("grid.to", self.grid_to.to_string());
        kv.insert("grid.points", self.grid_points.to_string());
        kv.insert("mc.trials", self.trials.to_string());
        kv.insert("mc.seed", self.seed.to_string());
        kv.insert("mc.streams", self.streams.to_string());
        for (k, v) in kv {
            writeln!(t, "{k} = {v}").unwrap();
        }
        t
    }

    /// FNV-1a hash of the canonical rendering.
    pub fn hash(&self) -> String {
        let mut h: u64 = 0xcbf29ce484222325;
        for b in self.render().bytes() {
            h ^= b as u64;
            h = h.wrapping_mul(0x100000001b3);
        }
        format!("{h:016x}")
    }

    pub fn phase(&self) -> PhaseNoise {
        if self.phase_bits == 0 {
            PhaseNoise::Perfect
        } else {
            PhaseNoise::Bits(self.phase_bits)
        }
    }

    fn topology_for(&self, dmax: f64) -> Result<Mobility, ConfigError> {
        Ok(match self.topology.as_str() {
            "1d" => Mobility::Waypoint(RWPTopology::one_d(dmax)),
            "2d" => Mobility::Waypoint(RWPTopology::two_d(dmax)),
            "3d" => Mobility::Waypoint(RWPTopology::three_d(dmax)),
            "static" => Mobility::Static { distance: self.static_distance_m },
            other => return Err(ConfigError(format!("unknown topology `{other}`"))),
        })
    }

    pub fn element(&self) -> Result<ElementConfig, ConfigError> {
        let first = KappaMuParams::new(self.kappa, self.mu)
            .map_err(|e| ConfigError(e.to_string()))?;
        let second = DGGParams::unit(self.alpha1, self.beta1, self.alpha2, self.beta2)
            .map_err(|e| ConfigError(e.to_string()))?;
        ElementConfig::new(
            first,
            second,
            self.topology_for(self.d2_m)?,
            self.phase(),
            self.path_exponent,
        )
        .map_err(|e| ConfigError(e.to_string()))
    }

    pub fn direct_link(&self) -> Result<DirectLink, ConfigError> {
        let d = (self.d1_m * self.d1_m + self.d2_m * self.d2_m).sqrt();
        Ok(DirectLink {
            fading: GenKParams::new(self.direct_m, self.direct_big_m, self.direct_m0)
                .map_err(|e| ConfigError(e.to_string()))?,
            mobility: match self.topology.as_str() {
                "2d" => RWPTopology::two_d(d),
                "3d" => RWPTopology::three_d(d),
                _ => RWPTopology::one_d(d),
            },
            path_exponent: self.path_exponent,
        })
    }

    pub fn scenario(&self) -> Result<ScenarioConfig, ConfigError> {
        Ok(ScenarioConfig {
            n: self.n,
            d1: self.d1_m,
            d2: self.d2_m,
            path_exponent: self.path_exponent,
            f_c: self.f_c_hz,
            p_t_dbm: self.p_t_dbm,
            noise_dbm: self.noise_dbm,
            g_t_dbi: self.g_t_dbi,
            g_r_dbi: self.g_r_dbi,
            omega: self.direct_enabled,
            element: self.element()?,
            direct: Some(self.direct_link()?),
            ris_cal_db: self.ris_cal_db,
            direct_cal_db: self.direct_cal_db,
        })
    }

    /// Analytic SNR configuration at a given transmit power (dBm).
    pub fn snr_config(&self, p_t_dbm: f64) -> Result<SNRConfig, ConfigError> {
        let mut sc = self.scenario()?;
        sc.p_t_dbm = p_t_dbm;
        let (gr, gd) = link_budget(&sc);
        SNRConfig::new(
            gr,
            gd,
            self.direct_enabled,
            self.n,
            if self.direct_enabled { Some(self.direct_link()?) } else { None },
        )
        .map_err(|e| ConfigError(e.to_string()))
    }

    pub fn mc_config(&self) -> MCConfig {
        MCConfig { trials: self.trials, seed: self.seed, streams: self.streams }
    }

    pub fn modulation_params(&self) -> Result<rislink::metrics::Modulation, ConfigError> {
        rislink::metrics::Modulation::new(self.mod_p, self.mod_q)
            .map_err(|e| ConfigError(e.to_string()))
    }

    /// Linear outage threshold.
    pub fn gamma_th(&self) -> f64 {
        10f64.powf(self.gamma_th_db / 10.0)
    }

    pub fn sweep_powers(&self) -> Vec<f64> {
        let count = ((self.sweep_to_dbm - self.sweep_from_dbm) / self.sweep_step_db).round() as usize + 1;
        (0..count).map(|i| self.sweep_from_dbm + i as f64 * self.sweep_step_db).collect()
    }

    pub fn snr_grid(&self) -> Vec<f64> {
        let (a, b, n) = (self.grid_from.ln(), self.grid_to.ln(), self.grid_points);
        (0..n).map(|i| (a + (b - a) * i as f64 / (n - 1) as f64).exp()).collect()
    }
}
