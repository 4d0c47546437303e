//! Flat `key = value` run configuration.

use std::collections::BTreeMap;
use std::fmt;
use std::path::Path;

use sha2::{Digest, Sha256};
use wsladder::discretize::BoxSpec;
use wsladder::resonances::SolveOptions;
use wsladder::units::{self, DimensionlessParams, PhysicalParams};
use wsladder::{Backend, PotentialModel, Scheme};

#[derive(Debug)]
pub struct ConfigError(pub String);

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for ConfigError {}

type Result<T> = std::result::Result<T, ConfigError>;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scenario {
    Infinite,
    SurfaceBelow,
    BarrierAbove,
    Yukawa,
}

impl Scenario {
    fn parse(s: &str) -> Result<Self> {
        match s {
            "infinite" => Ok(Scenario::Infinite),
            "surface_below" => Ok(Scenario::SurfaceBelow),
            "barrier_above" => Ok(Scenario::BarrierAbove),
            "yukawa" => Ok(Scenario::Yukawa),
            _ => Err(ConfigError(format!(
                "unknown scenario '{s}' (expected infinite, surface_below, barrier_above or yukawa)"
            ))),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Scenario::Infinite => "infinite",
            Scenario::SurfaceBelow => "surface_below",
            Scenario::BarrierAbove => "barrier_above",
            Scenario::Yukawa => "yukawa",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
}

/// Surface model for the below-surface scenarios.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum WallKind {
    Dirichlet,
    Step,
}

#[derive(Debug, Clone)]
pub struct RunConfig {
    pub physical: PhysicalParams,
    pub scenario: Scenario,
    pub u: f64,
    pub u_list: Vec<f64>,
    pub v0: f64,
    pub v0_list: Vec<f64>,
    pub wall: WallKind,
    pub alpha_y: f64,
    /// Metres.
    pub lambda_y: f64,
    /// `(λ_Y in μm, α_Y)` pairs for the Yukawa table.
    pub yukawa_pairs: Vec<(f64, f64)>,
    pub thetas: Vec<f64>,
    pub theta_ref: usize,
    pub box_spec: Option<BoxOverrides>,
    pub scheme: Scheme,
    pub backend: Backend,
    pub bound_tol: f64,
    pub cont_tol: Option<f64>,
    pub match_tol: f64,
    pub n_bands: usize,
    pub n_q: usize,
    pub n_planewaves: Option<usize>,
    pub dump_matrix: bool,
    pub out_dir: String,
    pub format: Format,
    /// Every key as given, after defaults, for the metadata hash.
    pub raw: BTreeMap<String, String>,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct BoxOverrides {
    pub lattice_periods: Option<f64>,
    pub upper_periods: Option<f64>,
    pub taper_periods: Option<f64>,
    pub exterior_periods: Option<f64>,
    pub mirror_periods: Option<f64>,
    pub ramp_periods: Option<f64>,
    pub points_per_period: Option<usize>,
}

pub const DEFAULT_YUKAWA_PAIRS: &[(f64, f64)] = &[
    (0.70000, 1.95007e12),
    (0.80835, 2.08378e11),
    (0.93347, 2.87073e10),
    (1.07795, 4.92177e9),
    (1.24480, 1.02282e9),
    (1.43747, 2.51801e8),
    (1.65996, 7.15759e7),
    (1.91689, 2.30712e7),
    (2.21359, 8.33762e6),
    (2.55622, 3.31836e6),
];

const KEYS: &[&str] = &[
    "scenario",
    "u",
    "u_list",
    "v0",
    "v0_list",
    "wall",
    "alpha_y",
    "lambda_y",
    "yukawa_pairs",
    "thetas",
    "theta_ref",
    "m_a",
    "g",
    "lambda_l",
    "hbar",
    "G",
    "rho_s",
    "points_per_period",
    "lattice_periods",
    "upper_periods",
    "taper_periods",
    "exterior_periods",
    "mirror_periods",
    "ramp_periods",
    "scheme",
    "backend",
    "bound_tol",
    "cont_tol",
    "match_tol",
    "n_bands",
    "n_q",
    "n_planewaves",
    "dump_matrix",
    "out",
    "format",
];

/// Parse `key = value` lines; `#` starts a comment.
pub fn parse_text(text: &str) -> Result<Vec<(String, String)>> {
    let mut out = Vec::new();
    for (no, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| ConfigError(format!("line {}: expected key = value, got '{line}'", no + 1)))?;
        out.push((k.trim().to_string(), v.trim().to_string()));
    }
    Ok(out)
}

pub fn parse_override(s: &str) -> Result<(String, String)> {
    let (k, v) = s.split_once('=').ok_or_else(|| ConfigError(format!("--set expects KEY=VALUE, got '{s}'")))?;
    Ok((k.trim().to_string(), v.trim().to_string()))
}

fn num(key: &str, v: &str) -> Result<f64> {
    v.parse::<f64>().map_err(|_| ConfigError(format!("{key}: '{v}' is not a number")))
}

fn count(key: &str, v: &str) -> Result<usize> {
    v.parse::<usize>().map_err(|_| ConfigError(format!("{key}: '{v}' is not a non-negative integer")))
}

fn list(key: &str, v: &str) -> Result<Vec<f64>> {
    v.split(',').filter(|s| !s.trim().is_empty()).map(|s| num(key, s.trim())).collect()
}

impl RunConfig {
    /// Build from a config file (optional) and `--set` overrides, later keys winning.
    pub fn load(path: Option<&Path>, overrides: &[(String, String)]) -> Result<Self> {
        let mut pairs = Vec::new();
        if let Some(p) = path {
            let text = std::fs::read_to_string(p).map_err(|e| ConfigError(format!("{}: {e}", p.display())))?;
            pairs.extend(parse_text(&text)?);
        }
        pairs.extend(overrides.iter().cloned());
        Self::from_pairs(&pairs)
    }

    pub fn from_pairs(pairs: &[(String, String)]) -> Result<Self> {
        let mut raw = BTreeMap::new();
        for (k, v) in pairs {
            if !KEYS.contains(&k.as_str()) {
                return Err(ConfigError(format!("unknown key '{k}'")));
            }
            raw.insert(k.clone(), v.clone());
        }
        let get = |k: &str| raw.get(k).map(String::as_str);
        let d = PhysicalParams::default();
        let physical = PhysicalParams::new(
            get("m_a").map(|v| num("m_a", v)).transpose()?.unwrap_or(d.m_a),
            get("g").map(|v| num("g", v)).transpose()?.unwrap_or(d.g),
            get("lambda_l").map(|v| num("lambda_l", v)).transpose()?.unwrap_or(d.lambda_l),
            get("hbar").map(|v| num("hbar", v)).transpose()?.unwrap_or(d.hbar),
            get("G").map(|v| num("G", v)).transpose()?.unwrap_or(d.big_g),
            get("rho_s").map(|v| num("rho_s", v)).transpose()?.unwrap_or(d.rho_s),
        )
        .map_err(|e| ConfigError(e.to_string()))?;
        let scenario = Scenario::parse(get("scenario").unwrap_or("surface_below"))?;
        let u = get("u").map(|v| num("u", v)).transpose()?.unwrap_or(match scenario {
            Scenario::Infinite => 3.0,
            Scenario::Yukawa => 2.0,
            _ => 1.0,
        });
        let u_list = get("u_list").map(|v| list("u_list", v)).transpose()?.unwrap_or_else(|| vec![u]);
        let v0 = get("v0").map(|v| num("v0", v)).transpose()?.unwrap_or(5.0);
        let v0_list = get("v0_list").map(|v| list("v0_list", v)).transpose()?.unwrap_or_else(|| vec![0.1, 1.0, 2.0, 5.0]);
        let wall = match get("wall").unwrap_or("dirichlet") {
            "dirichlet" => WallKind::Dirichlet,
            "step" => WallKind::Step,
            w => return Err(ConfigError(format!("wall: '{w}' is not dirichlet or step"))),
        };
        let alpha_y = get("alpha_y").map(|v| num("alpha_y", v)).transpose()?;
        let lambda_y = get("lambda_y").map(|v| num("lambda_y", v)).transpose()?;
        if scenario == Scenario::Yukawa && (alpha_y.is_none() || lambda_y.is_none()) {
            return Err(ConfigError("scenario yukawa needs alpha_y and lambda_y".into()));
        }
        let yukawa_pairs = match get("yukawa_pairs") {
            None => DEFAULT_YUKAWA_PAIRS.to_vec(),
            Some(v) => v
                .split(';')
                .filter(|s| !s.trim().is_empty())
                .map(|p| {
                    let (l, a) = p
                        .split_once(':')
                        .ok_or_else(|| ConfigError(format!("yukawa_pairs: '{p}' is not lambda_um:alpha")))?;
                    Ok((num("yukawa_pairs", l.trim())?, num("yukawa_pairs", a.trim())?))
                })
                .collect::<Result<Vec<_>>>()?,
        };
        let thetas = get("thetas").map(|v| list("thetas", v)).transpose()?.unwrap_or_else(|| vec![0.10, 0.15, 0.20]);
        if thetas.is_empty() || thetas.iter().any(|t| !(*t > 0.0 && *t < std::f64::consts::FRAC_PI_4)) {
            return Err(ConfigError("thetas must be in (0, π/4)".into()));
        }
        let theta_ref = get("theta_ref").map(|v| count("theta_ref", v)).transpose()?.unwrap_or(thetas.len() / 2);
        if theta_ref >= thetas.len() {
            return Err(ConfigError(format!("theta_ref {theta_ref} outside the θ list")));
        }
        let opt_f = |k: &str| get(k).map(|v| num(k, v)).transpose();
        let box_o = BoxOverrides {
            lattice_periods: opt_f("lattice_periods")?,
            upper_periods: opt_f("upper_periods")?,
            taper_periods: opt_f("taper_periods")?,
            exterior_periods: opt_f("exterior_periods")?,
            mirror_periods: opt_f("mirror_periods")?,
            ramp_periods: opt_f("ramp_periods")?,
            points_per_period: get("points_per_period").map(|v| count("points_per_period", v)).transpose()?,
        };
        let scheme = match get("scheme").unwrap_or("dvr") {
            "dvr" => Scheme::Dvr,
            "sinc" => Scheme::SincDvr,
            "fd2" => Scheme::FiniteDifference(2),
            "fd4" => Scheme::FiniteDifference(4),
            s => return Err(ConfigError(format!("scheme: '{s}' is not dvr, sinc, fd2 or fd4"))),
        };
        let backend = match get("backend").unwrap_or("lapack") {
            "lapack" => Backend::Lapack,
            "native" => Backend::Native,
            s => return Err(ConfigError(format!("backend: '{s}' is not lapack or native"))),
        };
        let format = match get("format").unwrap_or("csv") {
            "csv" => Format::Csv,
            "json" => Format::Json,
            s => return Err(ConfigError(format!("format: '{s}' is not csv or json"))),
        };
        let dump_matrix = match get("dump_matrix").unwrap_or("false") {
            "true" | "1" | "yes" => true,
            "false" | "0" | "no" => false,
            s => return Err(ConfigError(format!("dump_matrix: '{s}' is not a boolean"))),
        };
        let cfg = Self {
            physical,
            scenario,
            u,
            u_list,
            v0,
            v0_list,
            wall,
            alpha_y: alpha_y.unwrap_or(0.0),
            lambda_y: lambda_y.unwrap_or(1e-6),
            yukawa_pairs,
            thetas,
            theta_ref,
            box_spec: if box_o == BoxOverrides::default() { None } else { Some(box_o) },
            scheme,
            backend,
            bound_tol: opt_f("bound_tol")?.unwrap_or(1e-12),
            cont_tol: opt_f("cont_tol")?,
            match_tol: opt_f("match_tol")?.unwrap_or(1e-6),
            n_bands: get("n_bands").map(|v| count("n_bands", v)).transpose()?.unwrap_or(4),
            n_q: get("n_q").map(|v| count("n_q", v)).transpose()?.unwrap_or(wsladder::bands::DEFAULT_NQ),
            n_planewaves: get("n_planewaves").map(|v| count("n_planewaves", v)).transpose()?,
            dump_matrix,
            out_dir: get("out").unwrap_or(".").to_string(),
            format,
            raw,
        };
        for &x in cfg.u_list.iter().chain([cfg.u].iter()) {
            if !(x >= 0.0) {
                return Err(ConfigError(format!("lattice depth {x} < 0")));
            }
        }
        if cfg.v0_list.iter().chain([cfg.v0].iter()).any(|v| !(*v >= 0.0)) {
            return Err(ConfigError("barrier heights must be >= 0".into()));
        }
        if cfg.n_bands == 0 {
            return Err(ConfigError("n_bands must be >= 1".into()));
        }
        Ok(cfg)
    }

    /// Hex SHA-256 of the effective `key=value` lines, sorted.
    pub fn hash(&self) -> String {
        let mut h = Sha256::new();
        for (k, v) in &self.raw {
            if k == "out" || k == "format" {
                continue;
            }
            h.update(format!("{k}={v}\n").as_bytes());
        }
        h.finalize().iter().map(|b| format!("{b:02x}")).collect()
    }

    pub fn reduced(&self, u: f64, v0: f64, alpha_y: f64, lambda_y: f64) -> Result<DimensionlessParams> {
        units::reduced(&self.physical, u, v0, alpha_y, lambda_y).map_err(|e| ConfigError(e.to_string()))
    }

    pub fn e_r(&self) -> f64 {
        units::recoil_energy(&self.physical)
    }

    pub fn box_for(&self, model: &PotentialModel) -> BoxSpec {
        let mut b = BoxSpec::for_model(model);
        if let Some(o) = &self.box_spec {
            b.lattice_periods = o.lattice_periods.unwrap_or(b.lattice_periods);
            b.upper_periods = o.upper_periods.unwrap_or(b.upper_periods);
            b.taper_periods = o.taper_periods.unwrap_or(b.taper_periods);
            b.exterior_periods = o.exterior_periods.unwrap_or(b.exterior_periods);
            b.mirror_periods = o.mirror_periods.unwrap_or(b.mirror_periods);
            b.ramp_periods = o.ramp_periods.unwrap_or(b.ramp_periods);
            b.points_per_period = o.points_per_period.unwrap_or(b.points_per_period);
        }
        b
    }

    pub fn solve_options(&self, model: &PotentialModel) -> SolveOptions {
        SolveOptions {
            thetas: self.thetas.clone(),
            reference: self.theta_ref,
            scheme: self.scheme,
            backend: self.backend,
            bound_tol: self.bound_tol,
            cont_tol: self.cont_tol,
            match_tol: self.match_tol,
            box_spec: self.box_for(model),
            n_bands: self.n_bands,
        }
    }
}
