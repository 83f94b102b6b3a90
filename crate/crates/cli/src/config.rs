//! Flag and file configuration, merged into a fully resolved [`RunConfig`].

use std::f64::consts::PI;
use std::path::{Path, PathBuf};

use clap::{Args, ValueEnum};
use serde::{Deserialize, Serialize};
use tfmetro_core::metrology::Regime;

use crate::error::{CliError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Command {
    Spectrum,
    Fig1,
    Lambda0,
    Superres,
    Basis,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Spectrum => "spectrum",
            Command::Fig1 => "fig1",
            Command::Lambda0 => "lambda0",
            Command::Superres => "superres",
            Command::Basis => "basis",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Csv,
    Json,
}

/// Every setting, each optional. Used both for command-line flags and for
/// config files (TOML, JSON, or a manifest with a `config` key).
#[derive(Debug, Clone, Default, Args, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Settings {
    /// Slepian frequencies, comma separated.
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    pub c: Option<Vec<f64>>,

    /// Grid of c values as start:stop:step.
    #[arg(long = "c-grid")]
    #[serde(alias = "c-grid")]
    pub c_grid: Option<String>,

    /// Half-width of the time window.
    #[arg(long = "T")]
    #[serde(rename = "T")]
    pub t: Option<f64>,

    #[arg(long = "n-max")]
    #[serde(alias = "n-max")]
    pub n_max: Option<usize>,

    #[arg(long = "quad-order")]
    #[serde(alias = "quad-order")]
    pub quad_order: Option<usize>,

    /// Pulse separations, comma separated; default one PSF width.
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    pub tau: Option<Vec<f64>>,

    #[arg(long, allow_negative_numbers = true)]
    pub tau0: Option<f64>,

    /// Relative intensity of the first pulse.
    #[arg(long)]
    pub nu: Option<f64>,

    /// Gaussian PSF width; default T/√(2cκ).
    #[arg(long)]
    pub sigma: Option<f64>,

    #[arg(long)]
    pub kappa: Option<f64>,

    /// Sphere design r1,phi1,r2,phi2.
    #[arg(long, value_delimiter = ',', num_args = 4, allow_negative_numbers = true)]
    pub design: Option<Vec<f64>>,

    /// Third row of the design, C20,C21,C22,C23.
    #[arg(long = "design-c2", value_delimiter = ',', num_args = 4, allow_negative_numbers = true)]
    #[serde(alias = "design-c2")]
    pub design_c2: Option<Vec<f64>>,

    #[arg(long = "design-c03", allow_negative_numbers = true)]
    #[serde(alias = "design-c03")]
    pub design_c03: Option<f64>,

    #[arg(long = "design-c13", allow_negative_numbers = true)]
    #[serde(alias = "design-c13")]
    pub design_c13: Option<f64>,

    /// Probability regimes, comma separated.
    #[arg(long, value_delimiter = ',', value_parser = parse_regime)]
    pub regime: Option<Vec<Regime>>,

    /// Samples on the fig1 time grid.
    #[arg(long)]
    pub points: Option<usize>,

    /// The fig1 grid spans [−t_max, t_max].
    #[arg(long = "t-max")]
    #[serde(alias = "t-max")]
    pub t_max: Option<f64>,

    /// Relative finite-difference step for Fisher information.
    #[arg(long = "fisher-step")]
    #[serde(alias = "fisher-step")]
    pub fisher_step: Option<f64>,

    #[arg(long = "p-floor")]
    #[serde(alias = "p-floor")]
    pub p_floor: Option<f64>,

    /// Smallest separation, in PSF widths.
    #[arg(long = "tau-floor")]
    #[serde(alias = "tau-floor")]
    pub tau_floor: Option<f64>,

    #[arg(long)]
    pub out: Option<PathBuf>,

    #[arg(long, value_enum)]
    pub format: Option<Format>,

    /// Also write a gnuplot script next to a CSV output.
    #[arg(long = "plot-script")]
    #[serde(alias = "plot-script")]
    pub plot_script: Option<bool>,

    /// Config file; flags take precedence over its values.
    #[arg(long)]
    #[serde(skip)]
    pub config: Option<PathBuf>,

    #[arg(skip)]
    pub command: Option<Command>,
}

fn parse_regime(s: &str) -> std::result::Result<Regime, String> {
    s.parse().map_err(|e: tfmetro_core::Error| e.to_string())
}

/// Fully resolved configuration, recorded in every manifest.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub command: Command,
    pub c: Vec<f64>,
    #[serde(rename = "T")]
    pub t: f64,
    pub n_max: Option<usize>,
    pub quad_order: Option<usize>,
    pub tau: Option<Vec<f64>>,
    pub tau0: f64,
    pub nu: f64,
    pub sigma: Option<f64>,
    pub kappa: f64,
    pub design: [f64; 4],
    pub design_c2: [f64; 4],
    pub design_c03: f64,
    pub design_c13: f64,
    pub regime: Vec<Regime>,
    pub points: usize,
    pub t_max: f64,
    pub fisher_step: Option<f64>,
    pub p_floor: f64,
    pub tau_floor: f64,
    pub out: Option<PathBuf>,
    pub format: Format,
    pub plot_script: bool,
}

pub const DEFAULT_DESIGN: [f64; 4] = [0.6, PI / 3.0, 0.8, 5.0 * PI / 6.0];
pub const DEFAULT_DESIGN_C2: [f64; 4] = [1.0, 0.0, 0.0, 0.0];

impl Settings {
    /// Values from `self` win; missing ones come from `file`.
    fn or(self, file: Settings) -> Settings {
        let (c, c_grid) = if self.c.is_some() || self.c_grid.is_some() {
            (self.c, self.c_grid)
        } else {
            (file.c, file.c_grid)
        };
        Settings {
            c,
            c_grid,
            t: self.t.or(file.t),
            n_max: self.n_max.or(file.n_max),
            quad_order: self.quad_order.or(file.quad_order),
            tau: self.tau.or(file.tau),
            tau0: self.tau0.or(file.tau0),
            nu: self.nu.or(file.nu),
            sigma: self.sigma.or(file.sigma),
            kappa: self.kappa.or(file.kappa),
            design: self.design.or(file.design),
            design_c2: self.design_c2.or(file.design_c2),
            design_c03: self.design_c03.or(file.design_c03),
            design_c13: self.design_c13.or(file.design_c13),
            regime: self.regime.or(file.regime),
            points: self.points.or(file.points),
            t_max: self.t_max.or(file.t_max),
            fisher_step: self.fisher_step.or(file.fisher_step),
            p_floor: self.p_floor.or(file.p_floor),
            tau_floor: self.tau_floor.or(file.tau_floor),
            out: self.out.or(file.out),
            format: self.format.or(file.format),
            plot_script: self.plot_script.or(file.plot_script),
            config: None,
            command: self.command.or(file.command),
        }
    }
}

/// Reads a TOML or JSON config; a JSON manifest contributes its `config` object.
pub fn read_settings(path: &Path) -> Result<Settings> {
    let text = std::fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    let bad = |e: String| CliError::Config(format!("{}: {e}", path.display()));
    if let Ok(mut value) = serde_json::from_str::<serde_json::Value>(&text) {
        if let Some(inner) = value.get_mut("config") {
            value = inner.take();
        }
        return serde_json::from_value(value).map_err(|e| bad(e.to_string()));
    }
    toml::from_str(&text).map_err(|e| bad(e.to_string()))
}

/// `start:stop:step`, inclusive of `stop` up to rounding.
pub fn parse_grid(text: &str) -> Result<Vec<f64>> {
    let parts: Vec<&str> = text.split(':').collect();
    let bad = || CliError::Config(format!("c grid {text:?} is not start:stop:step"));
    if parts.len() != 3 {
        return Err(bad());
    }
    let v: Vec<f64> = parts
        .iter()
        .map(|p| p.trim().parse::<f64>())
        .collect::<std::result::Result<_, _>>()
        .map_err(|_| bad())?;
    let (start, stop, step) = (v[0], v[1], v[2]);
    if !(step > 0.0) || !start.is_finite() || !stop.is_finite() {
        return Err(CliError::Config(format!("c grid {text:?} needs finite bounds and a positive step")));
    }
    let mut out = Vec::new();
    let mut k = 0usize;
    loop {
        let x = start + k as f64 * step;
        if x > stop + 1e-9 * step {
            break;
        }
        out.push(x);
        k += 1;
        if k > 1_000_000 {
            return Err(CliError::Config(format!("c grid {text:?} has too many points")));
        }
    }
    Ok(out)
}

fn default_c(command: Command) -> Vec<f64> {
    match command {
        Command::Spectrum => vec![2.5 * PI, 5.0 * PI, 10.0 * PI],
        Command::Fig1 => vec![1.0, 5.0, 10.0, 20.0],
        Command::Lambda0 => (1..=100).map(|k| k as f64 / 10.0).collect(),
        Command::Superres => vec![1.0, 2.0, 5.0, 10.0],
        Command::Basis => vec![5.0],
    }
}

fn array4(name: &str, v: Option<Vec<f64>>, default: [f64; 4]) -> Result<[f64; 4]> {
    match v {
        None => Ok(default),
        Some(v) => v
            .try_into()
            .map_err(|v: Vec<f64>| CliError::Config(format!("{name} needs 4 values, got {}", v.len()))),
    }
}

/// Merges flags over the optional config file and fills defaults.
pub fn resolve(command: Command, flags: Settings) -> Result<RunConfig> {
    let file = match &flags.config {
        Some(path) => read_settings(path)?,
        None => Settings::default(),
    };
    if let Some(fc) = file.command {
        if fc != command {
            return Err(CliError::Config(format!(
                "config file is for {}, not {}",
                fc.name(),
                command.name()
            )));
        }
    }
    let s = flags.or(file);
    let c = match (s.c, s.c_grid) {
        (Some(_), Some(_)) => return Err(CliError::Config("give either c or c_grid, not both".into())),
        (Some(c), None) => c,
        (None, Some(g)) => parse_grid(&g)?,
        (None, None) => default_c(command),
    };
    if c.is_empty() {
        return Err(CliError::Config("the c grid is empty".into()));
    }
    if let Some(bad) = c.iter().find(|x| !(x.is_finite() && **x > 0.0)) {
        return Err(CliError::Config(format!("c values must be positive, got {bad}")));
    }
    if command == Command::Basis && c.len() != 1 {
        return Err(CliError::Config("basis takes exactly one c".into()));
    }
    let cfg = RunConfig {
        command,
        c,
        t: s.t.unwrap_or(1.0),
        n_max: s.n_max,
        quad_order: s.quad_order,
        tau: s.tau,
        tau0: s.tau0.unwrap_or(0.0),
        nu: s.nu.unwrap_or(0.5),
        sigma: s.sigma,
        kappa: s.kappa.unwrap_or(0.5),
        design: array4("design", s.design, DEFAULT_DESIGN)?,
        design_c2: array4("design_c2", s.design_c2, DEFAULT_DESIGN_C2)?,
        design_c03: s.design_c03.unwrap_or(0.0),
        design_c13: s.design_c13.unwrap_or(0.0),
        regime: s.regime.unwrap_or_else(|| vec![Regime::Ideal, Regime::Limited, Regime::Truncated]),
        points: s.points.unwrap_or(601),
        t_max: s.t_max.unwrap_or(3.0),
        fisher_step: s.fisher_step,
        p_floor: s.p_floor.unwrap_or(1e-12),
        tau_floor: s.tau_floor.unwrap_or(1e-4),
        out: s.out,
        format: s.format.unwrap_or_default(),
        plot_script: s.plot_script.unwrap_or(false),
    };
    validate(&cfg)?;
    Ok(cfg)
}

fn validate(cfg: &RunConfig) -> Result<()> {
    let bad = |m: String| Err(CliError::Config(m));
    if !(cfg.t.is_finite() && cfg.t > 0.0) {
        return bad(format!("T must be positive, got {}", cfg.t));
    }
    if cfg.regime.is_empty() {
        return bad("at least one regime is required".into());
    }
    if cfg.points < 2 {
        return bad("points must be at least 2".into());
    }
    if !(cfg.t_max > 0.0) {
        return bad("t_max must be positive".into());
    }
    if let Some(tau) = &cfg.tau {
        if tau.is_empty() || tau.iter().any(|x| !x.is_finite()) {
            return bad("tau values must be finite and non-empty".into());
        }
    }
    if cfg.plot_script && cfg.format != Format::Csv {
        return bad("plot scripts accompany CSV output only".into());
    }
    if cfg.plot_script && cfg.out.is_none() {
        return bad("plot scripts need --out".into());
    }
    Ok(())
}
