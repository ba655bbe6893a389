//! Config-driven sweeps producing CSV tables.
//!
//! Three sweeps are provided: effective DoF over (frequency, distance),
//! spectral efficiency over (distance, SNR), and spectral efficiency over
//! distance at a fixed SNR. Points are evaluated independently (in parallel
//! when enabled) and rows are always returned in sweep order.
//!
//! Config files are flat `key = value` lines; `#` starts a comment and lists
//! are comma separated. Every key is an [`ExperimentConfig`] field name.

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use crate::beamspace::{
    channel_dof, decompose, enumerate_candidates, BeamspaceDecomposition, CandidateSet,
    DEFAULT_CANDIDATE_CAP, DEFAULT_DOF_THRESHOLD,
};
use crate::capacity::{
    activation_probabilities, ActivationDistribution, CandidateStats, CapacityReport, SnrSpec,
};
use crate::channel::{wavelength, ArraySpec, SceneConfig};
use crate::exec::{map_indexed, Execution};
use crate::montecarlo::{estimate_se, MixtureModel, SeEstimate, DEFAULT_SAMPLES, MIN_SAMPLES};
use crate::{Error, Result, C64};

/// How the SNR axis relates to the channel's absolute gain.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SnrMode {
    /// Channel rescaled to `‖H‖_F² = N_t N_r` before applying `SNR = 1 / σ_n²`.
    #[default]
    Normalized,
    /// Raw channel including free-space path loss.
    Physical,
}

impl FromStr for SnrMode {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "normalized" => Ok(SnrMode::Normalized),
            "physical" => Ok(SnrMode::Physical),
            other => Err(format!("expected `normalized` or `physical`, got `{other}`")),
        }
    }
}

impl fmt::Display for SnrMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SnrMode::Normalized => "normalized",
            SnrMode::Physical => "physical",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub carrier_frequency: f64,
    pub tx_num_elements: usize,
    /// `None` means half a wavelength at `carrier_frequency`.
    pub tx_element_spacing: Option<f64>,
    pub tx_element_gain: f64,
    pub rx_num_elements: usize,
    pub rx_element_spacing: Option<f64>,
    pub rx_element_gain: f64,
    /// Link distance for single-point analysis.
    pub distance: f64,
    /// Absolute scatterer offsets; `None` scales with the link distance.
    pub scatterer_offset_axial: Option<f64>,
    pub scatterer_offset_lateral: Option<f64>,
    pub reflection_coefficient: C64,
    pub n_rf: usize,
    pub dof_threshold: f64,
    pub candidate_cap: usize,
    /// SNR for single-point analysis and the distance sweep.
    pub snr_db: f64,
    pub snr_points: Vec<f64>,
    /// Distances visited by the SNR sweep.
    pub snr_distance_points: Vec<f64>,
    /// Distances visited by the distance and DoF sweeps.
    pub distance_points: Vec<f64>,
    /// Carrier frequencies visited by the DoF sweep.
    pub frequency_points: Vec<f64>,
    pub mc_samples: usize,
    pub seed: u64,
    pub snr_mode: SnrMode,
    pub output_path: Option<String>,
}

/// `n` points spaced evenly on a log scale from `start` to `stop` inclusive.
pub fn log_grid(start: f64, stop: f64, n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![start];
    }
    let ratio = stop / start;
    (0..n)
        .map(|k| {
            if k == n - 1 {
                stop
            } else {
                start * ratio.powf(k as f64 / (n - 1) as f64)
            }
        })
        .collect()
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            carrier_frequency: 30e9,
            tx_num_elements: 256,
            tx_element_spacing: None,
            tx_element_gain: 1.0,
            rx_num_elements: 256,
            rx_element_spacing: None,
            rx_element_gain: 1.0,
            distance: 2.0,
            scatterer_offset_axial: None,
            scatterer_offset_lateral: None,
            reflection_coefficient: C64::new(SceneConfig::DEFAULT_REFLECTION, 0.0),
            n_rf: 1,
            dof_threshold: DEFAULT_DOF_THRESHOLD,
            candidate_cap: DEFAULT_CANDIDATE_CAP,
            snr_db: 30.0,
            snr_points: (0..26).map(|k| -20.0 + 2.0 * k as f64).collect(),
            snr_distance_points: vec![2.0, 4.0, 8.0],
            distance_points: log_grid(2.0, 300.0, 50),
            frequency_points: vec![5e9, 30e9, 100e9],
            mc_samples: DEFAULT_SAMPLES,
            seed: 1,
            snr_mode: SnrMode::Normalized,
            output_path: None,
        }
    }
}

/// Every accepted config key, in canonical order.
pub const CONFIG_KEYS: &[&str] = &[
    "carrier_frequency",
    "tx_num_elements",
    "tx_element_spacing",
    "tx_element_gain",
    "rx_num_elements",
    "rx_element_spacing",
    "rx_element_gain",
    "distance",
    "scatterer_offset_axial",
    "scatterer_offset_lateral",
    "reflection_coefficient",
    "n_rf",
    "dof_threshold",
    "candidate_cap",
    "snr_db",
    "snr_points",
    "snr_distance_points",
    "distance_points",
    "frequency_points",
    "mc_samples",
    "seed",
    "snr_mode",
    "output_path",
];

fn parse_value<T: FromStr>(key: &str, value: &str) -> Result<T>
where
    T::Err: fmt::Display,
{
    value
        .parse::<T>()
        .map_err(|e| Error::config(key, format!("cannot parse `{value}`: {e}")))
}

fn parse_list(key: &str, value: &str) -> Result<Vec<f64>> {
    value
        .split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| parse_value(key, s))
        .collect()
}

/// `auto` (or empty) selects the distance-scaled default.
fn parse_optional(key: &str, value: &str) -> Result<Option<f64>> {
    match value {
        "" | "auto" => Ok(None),
        v => parse_value(key, v).map(Some),
    }
}

fn format_list(values: &[f64]) -> String {
    values
        .iter()
        .map(|v| v.to_string())
        .collect::<Vec<_>>()
        .join(", ")
}

fn format_optional(value: Option<f64>) -> String {
    value.map_or_else(|| "auto".to_string(), |v| v.to_string())
}

impl ExperimentConfig {
    /// Sets one field from its textual form.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let value = value.trim();
        match key {
            "carrier_frequency" => self.carrier_frequency = parse_value(key, value)?,
            "tx_num_elements" => self.tx_num_elements = parse_value(key, value)?,
            "tx_element_spacing" => self.tx_element_spacing = parse_optional(key, value)?,
            "tx_element_gain" => self.tx_element_gain = parse_value(key, value)?,
            "rx_num_elements" => self.rx_num_elements = parse_value(key, value)?,
            "rx_element_spacing" => self.rx_element_spacing = parse_optional(key, value)?,
            "rx_element_gain" => self.rx_element_gain = parse_value(key, value)?,
            "distance" => self.distance = parse_value(key, value)?,
            "scatterer_offset_axial" => self.scatterer_offset_axial = parse_optional(key, value)?,
            "scatterer_offset_lateral" => {
                self.scatterer_offset_lateral = parse_optional(key, value)?
            }
            "reflection_coefficient" => self.reflection_coefficient = parse_value(key, value)?,
            "n_rf" => self.n_rf = parse_value(key, value)?,
            "dof_threshold" => self.dof_threshold = parse_value(key, value)?,
            "candidate_cap" => self.candidate_cap = parse_value(key, value)?,
            "snr_db" => self.snr_db = parse_value(key, value)?,
            "snr_points" => self.snr_points = parse_list(key, value)?,
            "snr_distance_points" => self.snr_distance_points = parse_list(key, value)?,
            "distance_points" => self.distance_points = parse_list(key, value)?,
            "frequency_points" => self.frequency_points = parse_list(key, value)?,
            "mc_samples" => self.mc_samples = parse_value(key, value)?,
            "seed" => self.seed = parse_value(key, value)?,
            "snr_mode" => self.snr_mode = parse_value(key, value)?,
            "output_path" => {
                self.output_path = (!value.is_empty()).then(|| value.to_string());
            }
            _ => return Err(Error::config(key, "unknown key")),
        }
        Ok(())
    }

    /// Applies `key=value` (or `key = value`) assignments in order.
    pub fn apply_overrides<'a>(&mut self, overrides: impl IntoIterator<Item = &'a str>) -> Result<()> {
        for assignment in overrides {
            let (key, value) = assignment.split_once('=').ok_or_else(|| {
                Error::config(assignment.trim(), "expected KEY=VALUE")
            })?;
            self.set(key.trim(), value)?;
        }
        Ok(())
    }

    /// Parses config text on top of the defaults, then validates it.
    pub fn parse(text: &str) -> Result<Self> {
        let mut config = ExperimentConfig::default();
        for raw in text.lines() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            config.apply_overrides([line])?;
        }
        config.validate()?;
        Ok(config)
    }

    pub fn from_file(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
            path: path.to_path_buf(),
            source,
        })?;
        Self::parse(&text)
    }

    pub fn validate(&self) -> Result<()> {
        let positive = |key: &str, v: f64| {
            if v > 0.0 && v.is_finite() {
                Ok(())
            } else {
                Err(Error::config(key, format!("must be positive, got {v}")))
            }
        };
        positive("carrier_frequency", self.carrier_frequency)?;
        positive("distance", self.distance)?;
        positive("tx_element_gain", self.tx_element_gain)?;
        positive("rx_element_gain", self.rx_element_gain)?;
        if let Some(s) = self.tx_element_spacing {
            positive("tx_element_spacing", s)?;
        }
        if let Some(s) = self.rx_element_spacing {
            positive("rx_element_spacing", s)?;
        }
        if self.tx_num_elements == 0 {
            return Err(Error::config("tx_num_elements", "must be at least 1"));
        }
        if self.rx_num_elements == 0 {
            return Err(Error::config("rx_num_elements", "must be at least 1"));
        }
        if self.n_rf == 0 {
            return Err(Error::config("n_rf", "must be at least 1"));
        }
        if self.candidate_cap == 0 {
            return Err(Error::config("candidate_cap", "must be at least 1"));
        }
        if !(self.dof_threshold > 0.0 && self.dof_threshold < 1.0) {
            return Err(Error::config("dof_threshold", "must lie in (0, 1)"));
        }
        if self.mc_samples < MIN_SAMPLES {
            return Err(Error::config(
                "mc_samples",
                format!("must be at least {MIN_SAMPLES}"),
            ));
        }
        if self.reflection_coefficient.norm() > 1.0 {
            return Err(Error::config("reflection_coefficient", "magnitude must be <= 1"));
        }
        for (key, list) in [
            ("distance_points", &self.distance_points),
            ("snr_distance_points", &self.snr_distance_points),
            ("frequency_points", &self.frequency_points),
        ] {
            if let Some(v) = list.iter().find(|v| !(**v > 0.0 && v.is_finite())) {
                return Err(Error::config(key, format!("values must be positive, got {v}")));
            }
        }
        if self.snr_points.iter().any(|v| !v.is_finite()) {
            return Err(Error::config("snr_points", "values must be finite"));
        }
        Ok(())
    }

    /// Renders the config in the file format accepted by [`ExperimentConfig::parse`].
    pub fn to_config_string(&self) -> String {
        let c = self.reflection_coefficient;
        let lines = [
            ("carrier_frequency", self.carrier_frequency.to_string()),
            ("tx_num_elements", self.tx_num_elements.to_string()),
            ("tx_element_spacing", format_optional(self.tx_element_spacing)),
            ("tx_element_gain", self.tx_element_gain.to_string()),
            ("rx_num_elements", self.rx_num_elements.to_string()),
            ("rx_element_spacing", format_optional(self.rx_element_spacing)),
            ("rx_element_gain", self.rx_element_gain.to_string()),
            ("distance", self.distance.to_string()),
            ("scatterer_offset_axial", format_optional(self.scatterer_offset_axial)),
            ("scatterer_offset_lateral", format_optional(self.scatterer_offset_lateral)),
            ("reflection_coefficient", format!("{}{:+}i", c.re, c.im)),
            ("n_rf", self.n_rf.to_string()),
            ("dof_threshold", self.dof_threshold.to_string()),
            ("candidate_cap", self.candidate_cap.to_string()),
            ("snr_db", self.snr_db.to_string()),
            ("snr_points", format_list(&self.snr_points)),
            ("snr_distance_points", format_list(&self.snr_distance_points)),
            ("distance_points", format_list(&self.distance_points)),
            ("frequency_points", format_list(&self.frequency_points)),
            ("mc_samples", self.mc_samples.to_string()),
            ("seed", self.seed.to_string()),
            ("snr_mode", self.snr_mode.to_string()),
            ("output_path", self.output_path.clone().unwrap_or_default()),
        ];
        lines
            .iter()
            .map(|(k, v)| format!("{k} = {v}\n"))
            .collect()
    }

    fn array(&self, n: usize, spacing: Option<f64>, gain: f64) -> ArraySpec {
        ArraySpec {
            num_elements: n,
            element_spacing: spacing.unwrap_or_else(|| wavelength(self.carrier_frequency) / 2.0),
            element_gain: gain,
        }
    }

    pub fn tx_array(&self) -> ArraySpec {
        self.array(self.tx_num_elements, self.tx_element_spacing, self.tx_element_gain)
    }

    pub fn rx_array(&self) -> ArraySpec {
        self.array(self.rx_num_elements, self.rx_element_spacing, self.rx_element_gain)
    }

    /// Scene at `distance` operated at `frequency`.
    ///
    /// The arrays are physical objects: their element spacing is resolved
    /// once against `carrier_frequency` and kept when `frequency` differs.
    pub fn scene(&self, frequency: f64, distance: f64) -> SceneConfig {
        let (axial, lateral) = SceneConfig::DEFAULT_SCATTERER;
        SceneConfig {
            carrier_frequency: frequency,
            tx_array: self.tx_array(),
            rx_array: self.rx_array(),
            distance,
            scatterer_offset_axial: self.scatterer_offset_axial.unwrap_or(axial * distance),
            scatterer_offset_lateral: self.scatterer_offset_lateral.unwrap_or(lateral * distance),
            reflection_coefficient: self.reflection_coefficient,
        }
    }

    /// Scene at `distance` on the configured carrier.
    pub fn scene_at(&self, distance: f64) -> SceneConfig {
        self.scene(self.carrier_frequency, distance)
    }
}

/// One output row. Coordinates not used by a sweep are `None`.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub frequency_hz: Option<f64>,
    pub distance_m: Option<f64>,
    pub snr_db: Option<f64>,
    pub dof: usize,
    pub k: Option<usize>,
    pub c_bm_asymptotic: Option<f64>,
    pub c_bbs: Option<f64>,
    pub gap: Option<f64>,
    pub se_mc_mean: Option<f64>,
    pub se_mc_stderr: Option<f64>,
}

/// Full closed-form (and optionally Monte-Carlo) analysis of one operating point.
#[derive(Debug, Clone)]
pub struct PointAnalysis {
    pub scene: SceneConfig,
    pub decomposition: BeamspaceDecomposition,
    pub candidates: CandidateSet,
    pub stats: CandidateStats,
    pub activation: ActivationDistribution,
    pub report: CapacityReport,
    pub monte_carlo: Option<SeEstimate>,
}

impl PointAnalysis {
    pub fn row(&self) -> SweepRow {
        SweepRow {
            frequency_hz: None,
            distance_m: Some(self.scene.distance),
            snr_db: Some(self.stats.snr.snr_db),
            dof: self.decomposition.dof,
            k: Some(self.candidates.len()),
            c_bm_asymptotic: Some(self.report.c_bm_asymptotic),
            c_bbs: Some(self.report.c_bbs),
            gap: Some(self.report.gap),
            se_mc_mean: self.monte_carlo.map(|e| e.mean),
            se_mc_stderr: self.monte_carlo.map(|e| e.std_error),
        }
    }
}

/// Decomposition of the scene's channel under the configured SNR convention.
pub fn beamspace_for(config: &ExperimentConfig, scene: &SceneConfig) -> Result<BeamspaceDecomposition> {
    let h = scene.two_ray_channel()?;
    let h = match config.snr_mode {
        SnrMode::Normalized => h.normalized(),
        SnrMode::Physical => h,
    };
    decompose(&h, config.dof_threshold)
}

fn analyze_decomposition(
    config: &ExperimentConfig,
    scene: SceneConfig,
    decomposition: BeamspaceDecomposition,
    snr_db: f64,
    mc_seed: Option<u64>,
) -> Result<PointAnalysis> {
    let snr = SnrSpec::from_db(snr_db);
    let candidates = enumerate_candidates(&decomposition, config.n_rf, config.candidate_cap);
    let stats = CandidateStats::new(&decomposition, &candidates, snr);
    let activation = activation_probabilities(&stats);
    let report = CapacityReport::from_stats(&stats);
    let monte_carlo = match mc_seed {
        Some(seed) => {
            let model = MixtureModel::new(&decomposition, &candidates, snr, activation.clone())?;
            Some(estimate_se(&model, config.mc_samples, seed)?)
        }
        None => None,
    };
    Ok(PointAnalysis {
        scene,
        decomposition,
        candidates,
        stats,
        activation,
        report,
        monte_carlo,
    })
}

/// Analysis at the config's single operating point (`distance`, `snr_db`).
pub fn analyze_point(config: &ExperimentConfig, with_monte_carlo: bool) -> Result<PointAnalysis> {
    config.validate()?;
    let scene = config.scene_at(config.distance);
    let decomposition = beamspace_for(config, &scene)?;
    let seed = with_monte_carlo.then_some(config.seed);
    analyze_decomposition(config, scene, decomposition, config.snr_db, seed)
}

/// Seed of the `index`-th point of a sweep.
fn point_seed(seed: u64, index: usize) -> u64 {
    seed ^ (index as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15)
}

fn at_point<T>(coordinate: impl FnOnce() -> String, result: Result<T>) -> Result<T> {
    result.map_err(|source| Error::SweepPoint {
        coordinate: coordinate(),
        source: Box::new(source),
    })
}

fn require_points(key: &str, points: &[f64]) -> Result<()> {
    if points.is_empty() {
        Err(Error::config(key, "must not be empty for this sweep"))
    } else {
        Ok(())
    }
}

/// Effective DoF for every (frequency, distance), ordered by frequency then distance.
pub fn run_dof_sweep(config: &ExperimentConfig) -> Result<Vec<SweepRow>> {
    config.validate()?;
    require_points("frequency_points", &config.frequency_points)?;
    require_points("distance_points", &config.distance_points)?;
    let nd = config.distance_points.len();
    let n = config.frequency_points.len() * nd;
    map_indexed(n, Execution::default(), |idx| {
        let f = config.frequency_points[idx / nd];
        let d = config.distance_points[idx % nd];
        let dof = at_point(
            || format!("frequency_hz={f}, distance_m={d}"),
            config
                .scene(f, d)
                .two_ray_channel()
                .and_then(|h| channel_dof(&h, config.dof_threshold)),
        )?;
        Ok(SweepRow {
            frequency_hz: Some(f),
            distance_m: Some(d),
            snr_db: None,
            dof,
            k: None,
            c_bm_asymptotic: None,
            c_bbs: None,
            gap: None,
            se_mc_mean: None,
            se_mc_stderr: None,
        })
    })
    .into_iter()
    .collect()
}

fn decompositions(config: &ExperimentConfig, distances: &[f64]) -> Result<Vec<(SceneConfig, BeamspaceDecomposition)>> {
    map_indexed(distances.len(), Execution::default(), |i| {
        let d = distances[i];
        let scene = config.scene_at(d);
        let decomp = at_point(|| format!("distance_m={d}"), beamspace_for(config, &scene))?;
        Ok((scene, decomp))
    })
    .into_iter()
    .collect()
}

/// Closed-form capacities and Monte-Carlo SE for every (distance, SNR),
/// ordered by distance then SNR.
pub fn run_snr_sweep(config: &ExperimentConfig) -> Result<Vec<SweepRow>> {
    config.validate()?;
    require_points("snr_distance_points", &config.snr_distance_points)?;
    require_points("snr_points", &config.snr_points)?;
    let decomps = decompositions(config, &config.snr_distance_points)?;
    let ns = config.snr_points.len();
    map_indexed(decomps.len() * ns, Execution::default(), |idx| {
        let (scene, decomp) = &decomps[idx / ns];
        let snr_db = config.snr_points[idx % ns];
        let analysis = at_point(
            || format!("distance_m={}, snr_db={snr_db}", scene.distance),
            analyze_decomposition(
                config,
                scene.clone(),
                decomp.clone(),
                snr_db,
                Some(point_seed(config.seed, idx)),
            ),
        )?;
        Ok(analysis.row())
    })
    .into_iter()
    .collect()
}

/// Closed-form capacities and Monte-Carlo SE at `snr_db` for every distance.
pub fn run_distance_sweep(config: &ExperimentConfig) -> Result<Vec<SweepRow>> {
    config.validate()?;
    require_points("distance_points", &config.distance_points)?;
    let decomps = decompositions(config, &config.distance_points)?;
    map_indexed(decomps.len(), Execution::default(), |idx| {
        let (scene, decomp) = &decomps[idx];
        let analysis = at_point(
            || format!("distance_m={}, snr_db={}", scene.distance, config.snr_db),
            analyze_decomposition(
                config,
                scene.clone(),
                decomp.clone(),
                config.snr_db,
                Some(point_seed(config.seed, idx)),
            ),
        )?;
        Ok(analysis.row())
    })
    .into_iter()
    .collect()
}

/// Formats `value` like C's `%.9g`.
pub fn format_sig9(value: f64) -> String {
    const DIGITS: i32 = 9;
    if value == 0.0 {
        return "0".to_string();
    }
    if !value.is_finite() {
        return value.to_string();
    }
    let sci = format!("{:.*e}", (DIGITS - 1) as usize, value);
    let (mantissa, exp) = sci.split_once('e').expect("exponent in scientific format");
    let exp: i32 = exp.parse().expect("integer exponent");
    let trim = |s: &str| -> String {
        if s.contains('.') {
            s.trim_end_matches('0').trim_end_matches('.').to_string()
        } else {
            s.to_string()
        }
    };
    if (-5..DIGITS).contains(&exp) {
        trim(&format!("{:.*}", (DIGITS - 1 - exp) as usize, value))
    } else {
        format!("{}e{}", trim(mantissa), exp)
    }
}

const VALUE_COLUMNS: [&str; 7] = [
    "dof",
    "k",
    "c_bm_asymptotic",
    "c_bbs",
    "gap",
    "se_mc_mean",
    "se_mc_stderr",
];

/// Column names for `rows`: the coordinates used by any row, then the value columns.
pub fn csv_header(rows: &[SweepRow]) -> Vec<&'static str> {
    let mut header = Vec::new();
    if rows.iter().any(|r| r.frequency_hz.is_some()) {
        header.push("frequency_hz");
    }
    if rows.iter().any(|r| r.distance_m.is_some()) {
        header.push("distance_m");
    }
    if rows.iter().any(|r| r.snr_db.is_some()) {
        header.push("snr_db");
    }
    header.extend(VALUE_COLUMNS);
    header
}

fn cell(value: Option<f64>) -> String {
    value.map(format_sig9).unwrap_or_default()
}

fn row_cells(row: &SweepRow, header: &[&str]) -> Vec<String> {
    header
        .iter()
        .map(|&column| match column {
            "frequency_hz" => cell(row.frequency_hz),
            "distance_m" => cell(row.distance_m),
            "snr_db" => cell(row.snr_db),
            "dof" => row.dof.to_string(),
            "k" => row.k.map(|k| k.to_string()).unwrap_or_default(),
            "c_bm_asymptotic" => cell(row.c_bm_asymptotic),
            "c_bbs" => cell(row.c_bbs),
            "gap" => cell(row.gap),
            "se_mc_mean" => cell(row.se_mc_mean),
            "se_mc_stderr" => cell(row.se_mc_stderr),
            _ => unreachable!("unknown column {column}"),
        })
        .collect()
}

fn csv_error(path: &Path, e: impl fmt::Display) -> Error {
    Error::Csv {
        path: path.to_path_buf(),
        message: e.to_string(),
    }
}

/// Writes `rows` as UTF-8 CSV.
pub fn write_csv(rows: &[SweepRow], path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    if rows.is_empty() {
        return Err(Error::InvalidArgument(format!(
            "no rows to write to {}",
            path.display()
        )));
    }
    let file = std::fs::File::create(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    let mut writer = csv::Writer::from_writer(file);
    let header = csv_header(rows);
    writer.write_record(&header).map_err(|e| csv_error(path, e))?;
    for row in rows {
        writer
            .write_record(row_cells(row, &header))
            .map_err(|e| csv_error(path, e))?;
    }
    writer.flush().map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })
}

/// Reads a CSV produced by [`write_csv`].
pub fn read_csv(path: impl AsRef<Path>) -> Result<Vec<SweepRow>> {
    let path = path.as_ref();
    let mut reader = csv::Reader::from_path(path).map_err(|e| csv_error(path, e))?;
    let header: Vec<String> = reader
        .headers()
        .map_err(|e| csv_error(path, e))?
        .iter()
        .map(str::to_string)
        .collect();
    let position = |name: &str| header.iter().position(|h| h == name);
    let dof_col = position("dof").ok_or_else(|| csv_error(path, "missing column `dof`"))?;
    let mut rows = Vec::new();
    for record in reader.records() {
        let record = record.map_err(|e| csv_error(path, e))?;
        let float = |name: &str| -> Result<Option<f64>> {
            match position(name).and_then(|i| record.get(i)) {
                None | Some("") => Ok(None),
                Some(s) => s
                    .parse()
                    .map(Some)
                    .map_err(|e| csv_error(path, format!("column `{name}`: {e}"))),
            }
        };
        let dof = record
            .get(dof_col)
            .unwrap_or("")
            .parse()
            .map_err(|e| csv_error(path, format!("column `dof`: {e}")))?;
        let k = match position("k").and_then(|i| record.get(i)) {
            None | Some("") => None,
            Some(s) => Some(s.parse().map_err(|e| csv_error(path, format!("column `k`: {e}")))?),
        };
        rows.push(SweepRow {
            frequency_hz: float("frequency_hz")?,
            distance_m: float("distance_m")?,
            snr_db: float("snr_db")?,
            dof,
            k,
            c_bm_asymptotic: float("c_bm_asymptotic")?,
            c_bbs: float("c_bbs")?,
            gap: float("gap")?,
            se_mc_mean: float("se_mc_mean")?,
            se_mc_stderr: float("se_mc_stderr")?,
        });
    }
    Ok(rows)
}

/// Default output file for a sweep when neither the config nor the caller names one.
pub fn default_output(config: &ExperimentConfig, fallback: &str) -> PathBuf {
    PathBuf::from(config.output_path.as_deref().unwrap_or(fallback))
}
