//! The subcommands. Each builds tables and writes them to the output directory.

use std::fs;
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;

use wsladder::resonances::{self, Analysis, BULK_START};
use wsladder::units::width_to_lifetime_with;
use wsladder::{analytic, bands, discretize, PotentialModel, ResonanceSet};

use crate::config::{RunConfig, Scenario, WallKind};
use crate::output::{Cell, Table};

#[derive(Debug)]
pub enum CliError {
    Config(String),
    Io(PathBuf, std::io::Error),
    Numerical(wsladder::Error),
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Config(s) => write!(f, "configuration error: {s}"),
            CliError::Io(p, e) => write!(f, "{}: {e}", p.display()),
            CliError::Numerical(e) => write!(f, "numerical failure: {e}"),
        }
    }
}

impl From<wsladder::Error> for CliError {
    fn from(e: wsladder::Error) -> Self {
        match e {
            wsladder::Error::InvalidParameter(s) | wsladder::Error::IncompatibleGrid(s) => CliError::Config(s),
            e => CliError::Numerical(e),
        }
    }
}

impl From<crate::config::ConfigError> for CliError {
    fn from(e: crate::config::ConfigError) -> Self {
        CliError::Config(e.0)
    }
}

type Result<T> = std::result::Result<T, CliError>;

/// Run `job` on every item, several at a time, and return results in input order.
fn par_map<T: Sync, R: Send>(items: &[T], job: impl Fn(&T) -> Result<R> + Sync) -> Result<Vec<R>> {
    let workers = std::thread::available_parallelism().map_or(1, |n| n.get()).min(items.len()).max(1);
    if workers == 1 {
        return items.iter().map(job).collect();
    }
    let next = AtomicUsize::new(0);
    let slots: Mutex<Vec<Option<Result<R>>>> = Mutex::new((0..items.len()).map(|_| None).collect());
    std::thread::scope(|s| {
        for _ in 0..workers {
            s.spawn(|| loop {
                let i = next.fetch_add(1, Ordering::SeqCst);
                if i >= items.len() {
                    break;
                }
                let r = job(&items[i]);
                slots.lock().expect("worker panicked")[i] = Some(r);
            });
        }
    });
    slots.into_inner().expect("worker panicked").into_iter().map(|r| r.expect("every item run")).collect()
}

fn out_dir(cfg: &RunConfig) -> Result<PathBuf> {
    let dir = PathBuf::from(&cfg.out_dir);
    fs::create_dir_all(&dir).map_err(|e| CliError::Io(dir.clone(), e))?;
    Ok(dir)
}

fn write(t: &Table, dir: &Path, stem: &str, cfg: &RunConfig) -> Result<PathBuf> {
    t.write(dir, stem, cfg.format).map_err(|e| CliError::Io(dir.join(stem), e))
}

fn header(t: &mut Table, cfg: &RunConfig, command: &str) {
    t.meta("program", concat!("wsladder ", env!("CARGO_PKG_VERSION")));
    t.meta("command", command);
    t.meta("config_hash", cfg.hash());
    t.meta("scenario", cfg.scenario.name());
    t.meta("e_r_J", crate::output::fmt_num(cfg.e_r()));
    t.meta("f", crate::output::fmt_num(wsladder::units::tilt(&cfg.physical)));
}

fn solver_header(t: &mut Table, cfg: &RunConfig, a: &Analysis) {
    let list: Vec<String> = cfg.thetas.iter().map(|x| x.to_string()).collect();
    t.meta("thetas", list.join(","));
    t.meta("theta_ref", cfg.thetas[cfg.theta_ref]);
    let tol = a.set.tolerances;
    t.meta("tolerances", format!("cont_tol={:e} bound_tol={:e} match_tol={:e}", tol.cont_tol, tol.bound_tol, tol.match_tol));
    let g = a.layout.grid;
    t.meta("grid", format!("z_min={} z_max={} n_points={} dim={}", g.z_min, g.z_max, g.n_points, a.dim));
    t.meta("scheme", format!("{:?}", cfg.scheme));
    t.meta("backend", format!("{:?}", cfg.backend));
    t.meta("matrix_norm", crate::output::fmt_num(a.matrix_norm));
    if !a.set.warnings.is_empty() {
        t.meta("warnings", a.set.warnings.join("; "));
    }
}

/// The model a scenario describes at depth `u` and barrier `v0`.
pub fn model_for(cfg: &RunConfig, scenario: Scenario, u: f64, v0: f64) -> Result<PotentialModel> {
    let p = cfg.reduced(u, v0, if scenario == Scenario::Yukawa { cfg.alpha_y } else { 0.0 }, cfg.lambda_y)?;
    let m = match scenario {
        Scenario::Infinite => PotentialModel::infinite(p.u, p.f),
        Scenario::SurfaceBelow => match cfg.wall {
            WallKind::Dirichlet => PotentialModel::surface_below(p.u, p.f),
            WallKind::Step => PotentialModel::surface_below(p.u, p.f).with_step(p.v0),
        },
        Scenario::BarrierAbove => PotentialModel::above_surface(p.u, p.f, p.v0),
        Scenario::Yukawa => PotentialModel::surface_below(p.u, p.f).with_yukawa(p.a_y, p.l_y),
    };
    m.validate()?;
    Ok(m)
}

fn analyze(cfg: &RunConfig, model: &PotentialModel) -> Result<Analysis> {
    Ok(resonances::analyze(model, &cfg.solve_options(model), Some(cfg.e_r()))?)
}

fn lifetime(cfg: &RunConfig, gamma: f64) -> Option<f64> {
    width_to_lifetime_with(gamma, cfg.e_r(), cfg.physical.hbar).ok()
}

fn spectrum_table(cfg: &RunConfig, a: &Analysis, command: &str) -> Table {
    let mut t = Table::new(&["class", "re_E_Er", "im_E_Er", "gamma_Er", "lifetime_s", "well_n", "band", "theta"]);
    header(&mut t, cfg, command);
    solver_header(&mut t, cfg, a);
    let theta = cfg.thetas[cfg.theta_ref];
    let set = &a.set;
    let mut states: Vec<(&str, &wsladder::Resonance)> =
        set.bound.iter().map(|r| ("bound", r)).chain(set.resonances.iter().map(|r| ("resonance", r))).collect();
    states.sort_by(|(_, a), (_, b)| (a.band, a.well_n).cmp(&(b.band, b.well_n)).then(a.energy.re.total_cmp(&b.energy.re)));
    for (class, r) in states {
        t.push(vec![
            Cell::Text(class.into()),
            Cell::Num(r.energy.re),
            Cell::Num(r.energy.im),
            Cell::Num(r.gamma),
            Cell::opt_num(lifetime(cfg, r.gamma)),
            Cell::opt_int(r.well_n),
            Cell::opt_int(r.band.map(|b| b as i64)),
            Cell::Num(theta),
        ]);
    }
    for z in &set.continuum {
        t.push(vec![
            Cell::Text("continuum".into()),
            Cell::Num(z.re),
            Cell::Num(z.im),
            Cell::Num(-2.0 * z.im),
            Cell::Empty,
            Cell::Empty,
            Cell::Empty,
            Cell::Num(theta),
        ]);
    }
    t
}

fn dump_matrix(cfg: &RunConfig, a: &Analysis, dir: &Path, stem: &str) -> Result<()> {
    if !cfg.dump_matrix {
        return Ok(());
    }
    let h = a.layout.assemble(cfg.thetas[cfg.theta_ref], cfg.scheme)?;
    let path = dir.join(format!("{stem}.bin"));
    let file = fs::File::create(&path).map_err(|e| CliError::Io(path.clone(), e))?;
    discretize::write_matrix(std::io::BufWriter::new(file), &h).map_err(|e| CliError::Io(path, e))
}

/// Band-1 widths of the bulk, see [`Analysis::bulk`].
pub fn bulk_widths(a: &Analysis) -> Vec<f64> {
    a.bulk().iter().map(|r| r.gamma).collect()
}

/// `"6..N-m"` with the far-end margin of every run.
fn bulk_note(runs: &[Analysis]) -> String {
    let m: Vec<String> = runs.iter().map(|a| a.edge_margin.to_string()).collect();
    let mut note = format!("{BULK_START}..N-m, m = {}", m.join(","));
    if runs.iter().any(|a| a.bulk().is_empty()) {
        note.push_str(" (empty for some runs: lattice too short)");
    }
    note
}

fn median(mut v: Vec<f64>) -> Option<f64> {
    if v.is_empty() {
        return None;
    }
    v.sort_by(f64::total_cmp);
    Some(v[v.len() / 2])
}

pub fn cmd_bands(cfg: &RunConfig) -> Result<Vec<PathBuf>> {
    let dir = out_dir(cfg)?;
    let mut paths = Vec::new();
    let mut summary = Table::new(&["u", "band", "mean_Er", "min_Er", "max_Er", "gap_halfwidth_Er"]);
    header(&mut summary, cfg, "bands");
    let solved = par_map(&cfg.u_list, |&u| {
        let n_pw = cfg.n_planewaves.unwrap_or_else(|| bands::default_planewaves(u, cfg.n_bands + 1));
        Ok(bands::solve_bands(u, cfg.n_bands + 1, n_pw, cfg.n_q)?)
    })?;
    for (&u, bs) in cfg.u_list.iter().zip(&solved) {
        let mut t = Table::new(&["q", "band", "energy_Er"]);
        header(&mut t, cfg, "bands");
        t.meta("u", u);
        t.meta("n_planewaves", cfg.n_planewaves.unwrap_or_else(|| bands::default_planewaves(u, cfg.n_bands + 1)));
        t.meta("n_q", bs.quasimomenta.len());
        for alpha in 1..=cfg.n_bands {
            for (k, &q) in bs.quasimomenta.iter().enumerate() {
                t.push(vec![Cell::Num(q), Cell::Int(alpha as i64), Cell::Num(bs.energies[[k, alpha - 1]])]);
            }
            summary.push(vec![
                Cell::Num(u),
                Cell::Int(alpha as i64),
                Cell::Num(bands::band_mean(bs, alpha)?),
                Cell::Num(bs.band_min(alpha)?),
                Cell::Num(bs.band_max(alpha)?),
                // with u = 0 neighbouring bands touch
                Cell::opt_num(bands::gap_halfwidth(bs, alpha).ok()),
            ]);
        }
        let stem = if cfg.u_list.len() == 1 { "bands".to_string() } else { format!("bands_u{u}") };
        paths.push(write(&t, &dir, &stem, cfg)?);
    }
    paths.push(write(&summary, &dir, "band_summary", cfg)?);
    Ok(paths)
}

pub fn cmd_spectrum(cfg: &RunConfig) -> Result<Vec<PathBuf>> {
    let dir = out_dir(cfg)?;
    let model = model_for(cfg, cfg.scenario, cfg.u, cfg.v0)?;
    let a = analyze(cfg, &model)?;
    let mut t = spectrum_table(cfg, &a, "spectrum");
    t.meta("u", cfg.u);
    match cfg.scenario {
        Scenario::BarrierAbove => t.meta("v0", cfg.v0),
        Scenario::SurfaceBelow if cfg.wall == WallKind::Step => t.meta("v0", cfg.v0),
        Scenario::Yukawa => {
            t.meta("alpha_y", cfg.alpha_y);
            t.meta("lambda_y_m", cfg.lambda_y);
        }
        _ => {}
    }
    dump_matrix(cfg, &a, &dir, "spectrum_matrix")?;
    Ok(vec![write(&t, &dir, "spectrum", cfg)?])
}

pub fn cmd_lifetimes(cfg: &RunConfig) -> Result<Vec<PathBuf>> {
    if cfg.scenario != Scenario::SurfaceBelow {
        return Err(CliError::Config("lifetimes needs scenario = surface_below".into()));
    }
    let dir = out_dir(cfg)?;
    let runs = par_map(&cfg.u_list, |&u| analyze(cfg, &model_for(cfg, Scenario::SurfaceBelow, u, cfg.v0)?))?;
    let mut t = Table::new(&["u", "well_n", "re_E_Er", "gamma_Er", "lifetime_s"]);
    header(&mut t, cfg, "lifetimes");
    solver_header(&mut t, cfg, &runs[0]);
    let list: Vec<String> = cfg.u_list.iter().map(|x| x.to_string()).collect();
    t.meta("u_list", list.join(","));
    t.meta("bulk_wells", bulk_note(&runs));
    for (&u, a) in cfg.u_list.iter().zip(&runs) {
        for r in a.set.states(1) {
            t.push(vec![
                Cell::Num(u),
                Cell::opt_int(r.well_n),
                Cell::Num(r.energy.re),
                Cell::Num(r.gamma),
                Cell::opt_num(lifetime(cfg, r.gamma)),
            ]);
        }
    }
    Ok(vec![write(&t, &dir, "lifetimes", cfg)?])
}

pub fn cmd_lz_compare(cfg: &RunConfig) -> Result<Vec<PathBuf>> {
    let dir = out_dir(cfg)?;
    let f = wsladder::units::tilt(&cfg.physical);
    let runs = par_map(&cfg.u_list, |&u| analyze(cfg, &model_for(cfg, Scenario::SurfaceBelow, u, cfg.v0)?))?;
    let lz = analytic::lz_lifetime_curve_with(&cfg.u_list, f, cfg.e_r(), cfg.physical.hbar)?;
    let mut t = Table::new(&["u", "tau_cs_s", "tau_lz_s", "ratio"]);
    header(&mut t, cfg, "lz-compare");
    solver_header(&mut t, cfg, &runs[0]);
    t.meta("tau_cs", format!("median bulk lifetime, band 1, wells {}", bulk_note(&runs)));
    for ((&u, a), (_, tau_lz)) in cfg.u_list.iter().zip(&runs).zip(&lz) {
        let tau_cs = median(bulk_widths(a)).and_then(|g| lifetime(cfg, g));
        t.push(vec![Cell::Num(u), Cell::opt_num(tau_cs), Cell::Num(*tau_lz), Cell::opt_num(tau_cs.map(|c| c / tau_lz))]);
    }
    Ok(vec![write(&t, &dir, "lz_compare", cfg)?])
}

/// The first-band state in well 1.
pub fn first_well(set: &ResonanceSet) -> Option<&wsladder::Resonance> {
    set.states(1).into_iter().find(|r| r.well_n == Some(1))
}

pub fn cmd_yukawa_table(cfg: &RunConfig) -> Result<Vec<PathBuf>> {
    let dir = out_dir(cfg)?;
    let u = if cfg.raw.contains_key("u") { cfg.u } else { 2.0 };
    let mut cases: Vec<(f64, f64)> = vec![(0.0, 0.0)];
    cases.extend(cfg.yukawa_pairs.iter().cloned());
    let runs = par_map(&cases, |&(l_um, a_y)| {
        let mut c = cfg.clone();
        c.alpha_y = a_y;
        c.lambda_y = if l_um > 0.0 { l_um * 1e-6 } else { 1e-6 };
        let model = model_for(&c, Scenario::Yukawa, u, 0.0)?;
        analyze(&c, &model)
    })?;
    let mut t = Table::new(&["lambda_um", "alpha_y", "im_E_1e-10_Er", "lifetime_s"]);
    header(&mut t, cfg, "yukawa-table");
    solver_header(&mut t, cfg, &runs[0]);
    t.meta("u", u);
    t.meta("well", "band 1, n = 1");
    t.meta("baseline", "first row, alpha_y = 0");
    if !cfg.raw.contains_key("u") {
        t.meta("u_note", "depth not given; u = 2 assumed");
    }
    for (&(l_um, a_y), a) in cases.iter().zip(&runs) {
        let r = first_well(&a.set);
        t.push(vec![
            if a_y == 0.0 { Cell::Empty } else { Cell::Num(l_um) },
            Cell::Num(a_y),
            Cell::opt_num(r.map(|r| r.energy.im * 1e10)),
            Cell::opt_num(r.and_then(|r| lifetime(cfg, r.gamma))),
        ]);
    }
    Ok(vec![write(&t, &dir, "yukawa_table", cfg)?])
}

pub fn cmd_barrier_scan(cfg: &RunConfig) -> Result<Vec<PathBuf>> {
    let dir = out_dir(cfg)?;
    let runs = par_map(&cfg.v0_list, |&v0| analyze(cfg, &model_for(cfg, Scenario::BarrierAbove, cfg.u, v0)?))?;
    let mut paths = Vec::new();
    let mut t = Table::new(&["v0_Er", "onset_Er", "n_bound", "n_resonances", "gamma_well1_Er", "gamma_bulk_Er"]);
    header(&mut t, cfg, "barrier-scan");
    solver_header(&mut t, cfg, &runs[0]);
    t.meta("u", cfg.u);
    t.meta("bulk_wells", bulk_note(&runs));
    for (&v0, a) in cfg.v0_list.iter().zip(&runs) {
        t.push(vec![
            Cell::Num(v0),
            Cell::opt_num(a.set.continuum_onset()),
            Cell::Int(a.set.bound.len() as i64),
            Cell::Int(a.set.resonances.len() as i64),
            Cell::opt_num(first_well(&a.set).map(|r| r.gamma)),
            Cell::opt_num(median(bulk_widths(a))),
        ]);
        let mut s = spectrum_table(cfg, a, "barrier-scan");
        s.meta("u", cfg.u);
        s.meta("v0", v0);
        paths.push(write(&s, &dir, &format!("spectrum_v0_{v0}"), cfg)?);
        dump_matrix(cfg, a, &dir, &format!("matrix_v0_{v0}"))?;
    }
    paths.insert(0, write(&t, &dir, "barrier_scan", cfg)?);
    Ok(paths)
}
