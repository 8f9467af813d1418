//! Command-line front end.
//!
//! Every command builds a [`Report`] (a provenance map plus a table) which is
//! then written as CSV or JSON. Point evaluations fan out over the worker pool
//! but rows are always emitted in grid order, so output bytes depend only on
//! the inputs.

use std::collections::BTreeMap;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::analysis::{self, Curve, CurvePoint, MU_LOG_STEP};
use crate::asymptotic::{self, Coefficients};
use crate::cache::{CacheKey, EnergyCache};
use crate::config::Settings;
use crate::energy::{self, EnergyResult, Geometry};
use crate::error::{Error, Result};
use crate::material::MaterialModel;
use crate::parallel::{self, Execution};
use crate::roundtrip::{self, QuadratureSpec};

pub const SCHEMA: &str = "casimir-scatter.v1";

pub const EXIT_OK: i32 = 0;
pub const EXIT_BAD_CONFIG: i32 = 1;
pub const EXIT_NOT_CONVERGED: i32 = 2;
pub const EXIT_IO: i32 = 3;

const FIG_RADII: [f64; 4] = [2.0, 5.0, 10.0, 20.0];

#[derive(Debug, Parser)]
#[command(
    name = "casimir-scatter",
    version,
    about = "Casimir energy between a dielectric nanosphere and a metallic plane"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub common: CommonArgs,
}

#[derive(Debug, Clone, Default, Args)]
pub struct CommonArgs {
    /// key = value file with material.* and numerics.* settings
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Multipole cutoff (default: the R/L policy)
    #[arg(long, global = true)]
    pub lmax: Option<u32>,
    #[arg(long, global = true)]
    pub xi_nodes: Option<usize>,
    #[arg(long, global = true)]
    pub x_nodes: Option<usize>,
    /// Target relative error for the convergence flag
    #[arg(long, global = true)]
    pub rel_tol: Option<f64>,
    /// Output file (default: stdout)
    #[arg(long, global = true)]
    pub output: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    /// Cache directory (default: $CASIMIR_CACHE_DIR or ./cache)
    #[arg(long, global = true)]
    pub cache_dir: Option<PathBuf>,
    #[arg(long, global = true)]
    pub no_cache: bool,
    /// Worker threads, 0 = all cores
    #[arg(long, global = true, default_value_t = 0)]
    pub threads: usize,
    /// Disable data parallelism entirely
    #[arg(long, global = true)]
    pub sequential: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Exact energy at one geometry
    Energy(EnergyArgs),
    /// E, F and ν over a log grid in L
    Curve(SweepArgs),
    /// ν and μ over a log grid in L
    Slopes(SweepArgs),
    /// E over the Hamaker and power-law references
    Ratios(SweepArgs),
    /// c₃, c₄, L* and the proximity-force c′₃
    Asymptotics,
    /// Figure data: fig1 permittivities, fig2 energies, fig3/fig4 slopes, fig5 ratios
    Figures(FigureArgs),
    /// Delete every cached energy
    CacheClear,
}

#[derive(Debug, Clone, Args)]
pub struct EnergyArgs {
    #[arg(long, default_value_t = 10.0)]
    pub radius_nm: f64,
    #[arg(long, default_value_t = 100.0)]
    pub distance_nm: f64,
    /// Also write one round-trip block as (row, col, value) CSV
    #[arg(long)]
    pub dump_block: Option<PathBuf>,
    #[arg(long, default_value_t = 0)]
    pub dump_m: u32,
    /// Frequency of the dumped block in nm⁻¹ (default 1/(L+R))
    #[arg(long)]
    pub dump_xi_hat: Option<f64>,
}

#[derive(Debug, Clone, Args)]
pub struct SweepArgs {
    #[arg(long, default_value_t = 10.0)]
    pub radius_nm: f64,
    #[arg(long, default_value_t = 1.0)]
    pub l_min_nm: f64,
    #[arg(long, default_value_t = 500.0)]
    pub l_max_nm: f64,
    #[arg(long, default_value_t = 30)]
    pub points: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Figure {
    Fig1,
    Fig2,
    Fig3,
    Fig4,
    Fig5,
}

#[derive(Debug, Clone, Args)]
pub struct FigureArgs {
    #[arg(value_enum)]
    pub figure: Figure,
    /// Comma-separated radii (fig2-fig4 default 2,5,10,20; fig5 default 10)
    #[arg(long, value_delimiter = ',')]
    pub radii_nm: Option<Vec<f64>>,
    #[arg(long, default_value_t = 1.0)]
    pub l_min_nm: f64,
    #[arg(long, default_value_t = 500.0)]
    pub l_max_nm: f64,
    /// Grid size (default 30, or 61 frequencies for fig1)
    #[arg(long)]
    pub points: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Cell {
    Num(f64),
    Int(u64),
    Bool(bool),
}

impl Cell {
    fn csv(&self) -> String {
        match *self {
            Cell::Num(v) if v == 0.0 || (1e-3..1e6).contains(&v.abs()) => format!("{v}"),
            Cell::Num(v) if v.is_finite() => format!("{v:e}"),
            Cell::Num(v) => format!("{v}"),
            Cell::Int(v) => v.to_string(),
            Cell::Bool(v) => v.to_string(),
        }
    }

    fn json(&self) -> serde_json::Value {
        match *self {
            Cell::Num(v) => serde_json::Number::from_f64(v).map_or(serde_json::Value::Null, Into::into),
            Cell::Int(v) => v.into(),
            Cell::Bool(v) => v.into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Report {
    pub provenance: BTreeMap<String, String>,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
    pub converged: bool,
}

impl Report {
    fn new(columns: &[&str]) -> Self {
        Report {
            provenance: BTreeMap::new(),
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
            converged: true,
        }
    }

    fn note(&mut self, key: &str, value: impl ToString) {
        self.provenance.insert(key.to_string(), value.to_string());
    }

    pub fn to_csv(&self) -> String {
        let mut out = format!("# schema={SCHEMA}");
        for (k, v) in &self.provenance {
            out.push_str(&format!("; {k}={v}"));
        }
        out.push('\n');
        out.push_str(&self.columns.join(","));
        out.push('\n');
        for row in &self.rows {
            let cells: Vec<String> = row.iter().map(Cell::csv).collect();
            out.push_str(&cells.join(","));
            out.push('\n');
        }
        out
    }

    pub fn to_json(&self) -> String {
        let rows: Vec<serde_json::Value> = self
            .rows
            .iter()
            .map(|row| {
                let obj: serde_json::Map<String, serde_json::Value> =
                    self.columns.iter().cloned().zip(row.iter().map(Cell::json)).collect();
                obj.into()
            })
            .collect();
        let doc = serde_json::json!({
            "schema": SCHEMA,
            "provenance": self.provenance,
            "columns": self.columns,
            "rows": rows,
        });
        let mut s = serde_json::to_string_pretty(&doc).expect("report serializes");
        s.push('\n');
        s
    }
}

/// Exit status for an error.
pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::InvalidInput(_) | Error::Config(_) | Error::StabilityBudget { .. } | Error::PermittivityDiverges => {
            EXIT_BAD_CONFIG
        }
        Error::Io(_) | Error::Json(_) => EXIT_IO,
        Error::NonFinite(_) | Error::Quadrature { .. } | Error::SpectralRadius { .. } | Error::NonMonotonic(_) => {
            EXIT_NOT_CONVERGED
        }
    }
}

struct Runner {
    settings: Settings,
    exec: Execution,
    cache: Option<EnergyCache>,
}

impl Runner {
    fn from_args(common: &CommonArgs) -> Result<Self> {
        let mut settings = match &common.config {
            Some(p) => Settings::from_file(p)?,
            None => Settings::default(),
        };
        let num = &mut settings.numerics;
        if let Some(l) = common.lmax {
            num.ell_max = Some(l);
        }
        if let Some(n) = common.xi_nodes {
            num.xi_nodes = n;
        }
        if let Some(n) = common.x_nodes {
            num.x_nodes = n;
        }
        if let Some(t) = common.rel_tol {
            num.target_rel_err = t;
        }
        num.validate()?;
        let cache = (!common.no_cache)
            .then(|| EnergyCache::new(common.cache_dir.clone().unwrap_or_else(EnergyCache::default_dir)));
        Ok(Runner {
            settings,
            exec: if common.sequential {
                Execution::Sequential
            } else {
                Execution::Parallel
            },
            cache,
        })
    }

    fn plane(&self) -> &MaterialModel {
        &self.settings.plane
    }

    fn sphere(&self) -> &MaterialModel {
        &self.settings.sphere
    }

    fn energy(&self, radius_nm: f64, distance_nm: f64) -> Result<EnergyResult> {
        let geometry = Geometry::new(radius_nm, distance_nm)?;
        let compute = || {
            energy::casimir_energy_exact_with(
                &geometry,
                self.plane(),
                self.sphere(),
                &self.settings.numerics,
                self.exec,
            )
        };
        match &self.cache {
            Some(cache) => {
                let key = CacheKey {
                    geometry,
                    plane: self.plane().clone(),
                    sphere: self.sphere().clone(),
                    numerics: self.settings.numerics.clone(),
                };
                cache.get_or_compute(&key, compute)
            }
            None => compute(),
        }
    }

    /// Energies for `(R, L)` pairs, in input order.
    fn energies(&self, pairs: &[(f64, f64)]) -> Result<Vec<EnergyResult>> {
        parallel::map_ordered(self.exec, pairs, |&(r, l)| self.energy(r, l))
            .into_iter()
            .collect()
    }

    fn coefficients(&self) -> Result<Coefficients> {
        match (self.plane(), self.sphere()) {
            (MaterialModel::Drude(p), MaterialModel::Sellmeier(s)) => asymptotic::coefficients(p, s),
            _ => Err(Error::invalid(
                "asymptotic coefficients need a Drude plane and a Sellmeier sphere",
            )),
        }
    }

    fn provenance(&self, report: &mut Report, command: &str) {
        report.note("version", crate::VERSION);
        report.note("command", command);
        report.note("plane", self.plane().label());
        report.note("sphere", self.sphere().label());
        report.note(
            "numerics",
            serde_json::to_string(&self.settings.numerics).expect("numerics serialize"),
        );
    }

    fn finish(&self, report: &mut Report) {
        let (hits, misses) = self.cache.as_ref().map_or((0, 0), |c| (c.hits(), c.misses()));
        report.note("cache_hits", hits);
        report.note("cache_misses", misses);
    }
}

fn grid(lo: f64, hi: f64, n: usize) -> Result<Vec<f64>> {
    analysis::log_grid(lo, hi, n)
}

fn energy_curve(grid: &[f64], energies: &[EnergyResult]) -> Result<Curve> {
    Curve::new(
        grid.iter()
            .zip(energies)
            .map(|(&l, e)| CurvePoint {
                abscissa: l,
                energy_ev: e.energy_ev,
            })
            .collect(),
    )
}

fn radius_tag(r: f64) -> String {
    format!("R{r}nm")
}

fn cmd_energy(run: &Runner, a: &EnergyArgs) -> Result<Report> {
    let e = run.energy(a.radius_nm, a.distance_nm)?;
    let mut rep = Report::new(&[
        "L_nm",
        "R_nm",
        "E_eV",
        "E_hbar_c_per_nm",
        "lmax_used",
        "m_used",
        "nodes_used",
        "x_nodes_used",
        "rel_err_estimate",
        "converged",
    ]);
    rep.rows.push(vec![
        Cell::Num(a.distance_nm),
        Cell::Num(a.radius_nm),
        Cell::Num(e.energy_ev),
        Cell::Num(e.energy_natural),
        Cell::Int(e.lmax_used.into()),
        Cell::Int(e.m_used.into()),
        Cell::Int(e.nodes_used as u64),
        Cell::Int(e.x_nodes_used as u64),
        Cell::Num(e.rel_err_estimate),
        Cell::Bool(e.converged),
    ]);
    rep.converged = e.converged;
    if let Some(path) = &a.dump_block {
        let geom = Geometry::new(a.radius_nm, a.distance_nm)?;
        let xi = a.dump_xi_hat.unwrap_or(1.0 / geom.script_l());
        let quad = QuadratureSpec {
            x_nodes: run.settings.numerics.x_nodes,
        };
        let ell_max = run.settings.numerics.resolved_ell_max(&geom);
        let block = roundtrip::roundtrip_block(&geom, run.plane(), run.sphere(), xi, a.dump_m, ell_max, &quad)?;
        let file = std::fs::File::create(path)?;
        block.write_csv(std::io::BufWriter::new(file))?;
        rep.note(
            "block_dump",
            format!("m={} xi_hat={xi:e} path={}", a.dump_m, path.display()),
        );
    }
    Ok(rep)
}

fn cmd_curve(run: &Runner, a: &SweepArgs) -> Result<Report> {
    let ls = grid(a.l_min_nm, a.l_max_nm, a.points)?;
    let pairs: Vec<_> = ls.iter().map(|&l| (a.radius_nm, l)).collect();
    let es = run.energies(&pairs)?;
    let curve = energy_curve(&ls, &es)?;
    let nu = analysis::slope_nu(&curve)?;
    let force = analysis::force(&curve, &nu);
    let mut rep = Report::new(&["L_nm", "R_nm", "E_eV", "F_eV_per_nm", "nu", "converged"]);
    for (i, e) in es.iter().enumerate() {
        rep.rows.push(vec![
            Cell::Num(ls[i]),
            Cell::Num(a.radius_nm),
            Cell::Num(e.energy_ev),
            Cell::Num(force[i]),
            Cell::Num(nu[i].1),
            Cell::Bool(e.converged),
        ]);
        rep.converged &= e.converged;
    }
    rep.note("radius_nm", a.radius_nm);
    Ok(rep)
}

/// ν along the grid and μ at every grid point for each radius.
fn slopes_for(run: &Runner, radii: &[f64], ls: &[f64], with_mu: bool) -> Result<Vec<SlopeRow>> {
    let mut pairs = Vec::new();
    for &r in radii {
        for &l in ls {
            pairs.push((r, l));
            if with_mu {
                pairs.push((r * (-MU_LOG_STEP).exp(), l));
                pairs.push((r * MU_LOG_STEP.exp(), l));
            }
        }
    }
    let es = run.energies(&pairs)?;
    let stride = if with_mu { 3 } else { 1 };
    let mut out = Vec::new();
    for (ri, &r) in radii.iter().enumerate() {
        let block = &es[ri * ls.len() * stride..(ri + 1) * ls.len() * stride];
        let centre: Vec<EnergyResult> = block.iter().step_by(stride).cloned().collect();
        let nu = analysis::slope_nu(&energy_curve(ls, &centre)?)?;
        for (i, &l) in ls.iter().enumerate() {
            let (mu, conv) = if with_mu {
                let (lo, hi) = (&block[i * 3 + 1], &block[i * 3 + 2]);
                let mu = ((-hi.energy_ev).ln() - (-lo.energy_ev).ln()) / (2.0 * MU_LOG_STEP);
                (mu, centre[i].converged && lo.converged && hi.converged)
            } else {
                (f64::NAN, centre[i].converged)
            };
            out.push(SlopeRow {
                radius_nm: r,
                distance_nm: l,
                energy_ev: centre[i].energy_ev,
                nu: nu[i].1,
                mu,
                converged: conv,
            });
        }
    }
    Ok(out)
}

struct SlopeRow {
    radius_nm: f64,
    distance_nm: f64,
    energy_ev: f64,
    nu: f64,
    mu: f64,
    converged: bool,
}

fn cmd_slopes(run: &Runner, a: &SweepArgs) -> Result<Report> {
    let ls = grid(a.l_min_nm, a.l_max_nm, a.points)?;
    let rows = slopes_for(run, &[a.radius_nm], &ls, true)?;
    let mut rep = Report::new(&["L_nm", "R_nm", "E_eV", "nu", "mu", "converged"]);
    for s in rows {
        rep.rows.push(vec![
            Cell::Num(s.distance_nm),
            Cell::Num(s.radius_nm),
            Cell::Num(s.energy_ev),
            Cell::Num(s.nu),
            Cell::Num(s.mu),
            Cell::Bool(s.converged),
        ]);
        rep.converged &= s.converged;
    }
    rep.note("radius_nm", a.radius_nm);
    rep.note("mu_log_step", MU_LOG_STEP);
    Ok(rep)
}

fn ratio_report(run: &Runner, radius_nm: f64, ls: &[f64]) -> Result<Report> {
    let coeff = run.coefficients()?;
    let pairs: Vec<_> = ls.iter().map(|&l| (radius_nm, l)).collect();
    let es = run.energies(&pairs)?;
    let pts: Vec<_> = ls
        .iter()
        .zip(&es)
        .map(|(&l, e)| (l, e.energy_ev, e.converged))
        .collect();
    let ratios = analysis::ratios_from_energies(&coeff, radius_nm, &pts);
    let mut rep = Report::new(&[
        "L_nm",
        "R_nm",
        "E_eV",
        "E_over_Ecp_hamaker",
        "E_over_Evdw_hamaker",
        "E_over_Ecp",
        "E_over_Evdw",
        "converged",
    ]);
    for r in ratios {
        let (cp, vdw) = asymptotic::power_laws(&coeff, radius_nm, r.distance_nm);
        rep.rows.push(vec![
            Cell::Num(r.distance_nm),
            Cell::Num(radius_nm),
            Cell::Num(r.energy_ev),
            Cell::Num(r.ratio_cp),
            Cell::Num(r.ratio_vdw),
            Cell::Num(r.energy_ev / cp),
            Cell::Num(r.energy_ev / vdw),
            Cell::Bool(r.converged),
        ]);
        rep.converged &= r.converged;
    }
    rep.note("radius_nm", radius_nm);
    rep.note("c3_prime_over_c3", coeff.c3_prime / coeff.c3);
    Ok(rep)
}

fn cmd_asymptotics(run: &Runner) -> Result<Report> {
    let c = run.coefficients()?;
    let mut rep = Report::new(&[
        "alpha0",
        "c3_eV",
        "c4_eV_nm",
        "L_star_nm",
        "c3_prime_eV",
        "c3_prime_over_c3",
    ]);
    rep.rows.push(vec![
        Cell::Num(c.alpha0),
        Cell::Num(c.c3),
        Cell::Num(c.c4),
        Cell::Num(c.l_star),
        Cell::Num(c.c3_prime),
        Cell::Num(c.c3_prime / c.c3),
    ]);
    Ok(rep)
}

fn cmd_figure(run: &Runner, a: &FigureArgs) -> Result<Report> {
    let radii = |default: &[f64]| -> Result<Vec<f64>> {
        let r = a.radii_nm.clone().unwrap_or_else(|| default.to_vec());
        if r.is_empty() || r.iter().any(|&x| !(x > 0.0 && x.is_finite())) {
            return Err(Error::invalid("radii must be positive"));
        }
        Ok(r)
    };
    let points = a.points.unwrap_or(if a.figure == Figure::Fig1 { 61 } else { 30 });
    let mut rep = match a.figure {
        Figure::Fig1 => {
            let omega_p = match run.plane() {
                MaterialModel::Drude(p) => p.plasma_xi_hat(),
                _ => crate::material::DrudeParams::COPPER.plasma_xi_hat(),
            };
            let mut rep = Report::new(&["xi_over_omega_p", "xi_hat_per_nm", "eps_plane", "eps_sphere"]);
            for u in grid(1e-3, 1e2, points)? {
                let xi = u * omega_p;
                rep.rows.push(vec![
                    Cell::Num(u),
                    Cell::Num(xi),
                    Cell::Num(run.plane().permittivity(xi)?),
                    Cell::Num(run.sphere().permittivity(xi)?),
                ]);
            }
            rep
        }
        Figure::Fig2 | Figure::Fig3 | Figure::Fig4 => {
            let radii = radii(&FIG_RADII)?;
            let ls = grid(a.l_min_nm, a.l_max_nm, points)?;
            let with_mu = a.figure == Figure::Fig4;
            let rows = slopes_for(run, &radii, &ls, with_mu)?;
            let (prefix, pick): (&str, fn(&SlopeRow) -> f64) = match a.figure {
                Figure::Fig2 => ("absE_eV_", |s| s.energy_ev.abs()),
                Figure::Fig3 => ("nu_", |s| s.nu),
                _ => ("mu_", |s| s.mu),
            };
            let mut cols = vec!["L_nm".to_string()];
            cols.extend(radii.iter().map(|&r| format!("{prefix}{}", radius_tag(r))));
            let atom = if a.figure == Figure::Fig3 {
                cols.push("nu_atom".into());
                let e1: Vec<f64> = parallel::map_ordered(run.exec, &ls, |&l| {
                    asymptotic::casimir_polder_integral_at(l, 1.0, run.plane(), run.sphere(), &run.settings.numerics)
                })
                .into_iter()
                .collect::<Result<_>>()?;
                let curve = Curve::from_fn(&ls, |l| e1[ls.iter().position(|&x| x == l).unwrap()])?;
                Some(analysis::slope_nu(&curve)?)
            } else {
                None
            };
            cols.push("converged".into());
            let mut rep = Report::new(&cols.iter().map(String::as_str).collect::<Vec<_>>());
            for (i, &l) in ls.iter().enumerate() {
                let mut row = vec![Cell::Num(l)];
                let mut conv = true;
                for ri in 0..radii.len() {
                    let s = &rows[ri * ls.len() + i];
                    row.push(Cell::Num(pick(s)));
                    conv &= s.converged;
                }
                if let Some(nu) = &atom {
                    row.push(Cell::Num(nu[i].1));
                }
                row.push(Cell::Bool(conv));
                rep.converged &= conv;
                rep.rows.push(row);
            }
            rep.note(
                "radii_nm",
                radii.iter().map(|r| r.to_string()).collect::<Vec<_>>().join(","),
            );
            if with_mu {
                rep.note("mu_log_step", MU_LOG_STEP);
            }
            rep
        }
        Figure::Fig5 => {
            let r = radii(&[10.0])?;
            if r.len() != 1 {
                return Err(Error::invalid("fig5 takes a single radius"));
            }
            ratio_report(run, r[0], &grid(a.l_min_nm, a.l_max_nm, points)?)?
        }
    };
    rep.note("figure", format!("{:?}", a.figure).to_lowercase());
    Ok(rep)
}

/// Runs one parsed command and writes its output; returns the exit status.
pub fn run(cli: &Cli) -> Result<i32> {
    let runner = Runner::from_args(&cli.common)?;
    let (name, mut report) = match &cli.command {
        Command::CacheClear => {
            let dir = cli.common.cache_dir.clone().unwrap_or_else(EnergyCache::default_dir);
            let n = EnergyCache::new(&dir).clear()?;
            eprintln!("removed {n} cached records from {}", dir.display());
            return Ok(EXIT_OK);
        }
        Command::Energy(a) => ("energy", cmd_energy(&runner, a)?),
        Command::Curve(a) => ("curve", cmd_curve(&runner, a)?),
        Command::Slopes(a) => ("slopes", cmd_slopes(&runner, a)?),
        Command::Ratios(a) => {
            let ls = grid(a.l_min_nm, a.l_max_nm, a.points)?;
            ("ratios", ratio_report(&runner, a.radius_nm, &ls)?)
        }
        Command::Asymptotics => ("asymptotics", cmd_asymptotics(&runner)?),
        Command::Figures(a) => ("figures", cmd_figure(&runner, a)?),
    };
    runner.provenance(&mut report, name);
    runner.finish(&mut report);

    let default_format = if name == "energy" { Format::Json } else { Format::Csv };
    let text = match cli.common.format.unwrap_or(default_format) {
        Format::Csv => report.to_csv(),
        Format::Json => report.to_json(),
    };
    match &cli.common.output {
        Some(path) => std::fs::write(path, text)?,
        None => std::io::stdout().lock().write_all(text.as_bytes())?,
    }
    Ok(if report.converged { EXIT_OK } else { EXIT_NOT_CONVERGED })
}

/// Parses `args`, runs, and maps every outcome to an exit status.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_BAD_CONFIG } else { EXIT_OK };
        }
    };
    let threads = cli.common.threads;
    match parallel::with_threads(threads, || run(&cli)) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}
