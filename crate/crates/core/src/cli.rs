//! The `vgamma` command line: density tables, characteristic functions,
//! residual reports, samples and convergence studies as CSV or JSON.
//!
//! Exit codes: 0 success, 1 numeric tolerance failure, 2 invalid input,
//! 3 convergence failure.

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::ser::{SerializeMap, Serializer};
use serde::Serialize;
use serde_json::value::RawValue;

use crate::diagnostics::run_convergence_study;
use crate::error::{Error, Result};
use crate::model::{vg_char, vg_density, vg_density_quadrature, Density, GammaParams, VgParams};
use crate::operators::{phillips_symbol, weyl_minus_symbol, weyl_plus_symbol};
use crate::quadrature::QuadConfig;
use crate::residuals::{
    check_beghin_shift, check_drifted_nonlocal, check_phillips_eq, check_space_ode,
    check_time_nonlocal, EquationId, Grid2D, ResidualReport,
};
use crate::sampling::{sample, Construction, RngHandle};

pub const EXIT_OK: i32 = 0;
pub const EXIT_TOLERANCE: i32 = 1;
pub const EXIT_INVALID: i32 = 2;
pub const EXIT_CONVERGENCE: i32 = 3;

/// Largest `|p_closed_form - p_quadrature|` accepted by `density`.
pub const DENSITY_AGREEMENT: f64 = 1e-8;

#[derive(Debug, Parser)]
#[command(name = "vgamma", version, about = "Variance Gamma process numerics")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,

    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    pub format: Format,

    /// Write to this file instead of standard output.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Closed-form and quadrature densities on an x grid.
    Density(DensityArgs),
    /// Characteristic function and operator symbols on a frequency grid.
    Charfn(CharfnArgs),
    /// Pointwise residual report for one of the evolution or space equations.
    Residual(ResidualArgs),
    /// Terminal values from one of the three samplers.
    Sample(SampleArgs),
    /// KS distance of compound Poisson samples along a truncation ladder.
    Converge(ConvergeArgs),
}

#[derive(Debug, Clone, Copy, Args)]
pub struct ModelArgs {
    #[arg(long, default_value_t = 1.0, allow_hyphen_values = true)]
    pub a: f64,
    #[arg(long, default_value_t = 1.0, allow_hyphen_values = true)]
    pub b: f64,
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    pub theta: f64,
}

impl ModelArgs {
    fn params(&self) -> Result<VgParams> {
        VgParams::new(self.a, self.b, self.theta)
    }
}

#[derive(Debug, Clone, Args)]
pub struct DensityArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    #[arg(long, default_value_t = 1.0)]
    pub t: f64,
    /// Several times at once; overrides --t.
    #[arg(long, value_delimiter = ',')]
    pub t_values: Vec<f64>,
    #[arg(long, default_value_t = -3.0, allow_hyphen_values = true)]
    pub x_min: f64,
    #[arg(long, default_value_t = 3.0, allow_hyphen_values = true)]
    pub x_max: f64,
    #[arg(long, default_value_t = 13)]
    pub x_steps: usize,
}

#[derive(Debug, Clone, Args)]
pub struct CharfnArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    #[arg(long, default_value_t = 1.0)]
    pub t: f64,
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    pub xi_min: f64,
    #[arg(long, default_value_t = 5.0, allow_hyphen_values = true)]
    pub xi_max: f64,
    #[arg(long, default_value_t = 11)]
    pub xi_steps: usize,
}

#[derive(Debug, Clone, Args)]
pub struct ResidualArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    /// time_nonlocal, drifted_nonlocal, space_ode, phillips or beghin_shift.
    #[arg(long)]
    pub equation: EquationId,
    /// Single time; shorthand for --t-values with one entry.
    #[arg(long)]
    pub t: Option<f64>,
    #[arg(long, value_delimiter = ',')]
    pub t_values: Vec<f64>,
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub x_values: Vec<f64>,
}

#[derive(Debug, Clone, Args)]
pub struct SampleArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    #[arg(long, default_value_t = 1.0)]
    pub t: f64,
    /// time_change, gamma_difference or compound_poisson.
    #[arg(long, default_value = "time_change")]
    pub construction: Construction,
    /// Jump truncation level for compound_poisson.
    #[arg(long, default_value_t = 0.01)]
    pub gamma_trunc: f64,
    #[arg(long, default_value_t = 1000)]
    pub n: usize,
    #[arg(long, default_value_t = 42)]
    pub seed: u64,
    #[arg(long, default_value_t = 0)]
    pub stream: u64,
}

#[derive(Debug, Clone, Args)]
pub struct ConvergeArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    #[arg(long, default_value_t = 1.0)]
    pub t: f64,
    #[arg(long, value_delimiter = ',', default_value = "0.5,0.1,0.02,0.004")]
    pub gamma_ladder: Vec<f64>,
    #[arg(long, default_value_t = 10_000)]
    pub n: usize,
    #[arg(long, default_value_t = 42)]
    pub seed: u64,
}

/// One output value.
#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Num(f64),
    Int(u64),
    Text(String),
    Bool(bool),
}

impl Cell {
    fn csv(&self) -> String {
        match self {
            Cell::Num(x) => format_number(*x),
            Cell::Int(i) => i.to_string(),
            Cell::Text(s) => s.clone(),
            Cell::Bool(b) => b.to_string(),
        }
    }
}

/// 17 significant digits; `NaN`, `inf` and `-inf` for non-finite values.
pub fn format_number(x: f64) -> String {
    if x.is_nan() {
        "NaN".into()
    } else if x.is_infinite() {
        if x > 0.0 { "inf" } else { "-inf" }.into()
    } else if x == 0.0 {
        format!("{:.16e}", 0.0)
    } else {
        format!("{x:.16e}")
    }
}

impl Serialize for Cell {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Cell::Num(x) if x.is_finite() => {
                let raw = RawValue::from_string(format_number(*x)).map_err(serde::ser::Error::custom)?;
                raw.serialize(s)
            }
            Cell::Num(_) => s.serialize_none(),
            Cell::Int(i) => s.serialize_u64(*i),
            Cell::Text(t) => s.serialize_str(t),
            Cell::Bool(b) => s.serialize_bool(*b),
        }
    }
}

impl From<f64> for Cell {
    fn from(x: f64) -> Self {
        Cell::Num(x)
    }
}

impl From<bool> for Cell {
    fn from(b: bool) -> Self {
        Cell::Bool(b)
    }
}

impl From<&str> for Cell {
    fn from(s: &str) -> Self {
        Cell::Text(s.to_string())
    }
}

impl From<usize> for Cell {
    fn from(i: usize) -> Self {
        Cell::Int(i as u64)
    }
}

impl From<u64> for Cell {
    fn from(i: u64) -> Self {
        Cell::Int(i)
    }
}

/// Ordered key/value pairs, serialized as a JSON object.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Record(pub Vec<(String, Cell)>);

impl Record {
    fn push(&mut self, key: &str, value: impl Into<Cell>) {
        self.0.push((key.to_string(), value.into()));
    }
}

impl Serialize for Record {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut map = s.serialize_map(Some(self.0.len()))?;
        for (k, v) in &self.0 {
            map.serialize_entry(k, v)?;
        }
        map.end()
    }
}

/// Metadata plus a table of rows, the common shape of every command's output.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub meta: Record,
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<Cell>>,
    /// Emit `data` as a flat JSON array (single-column tables only).
    pub flat: bool,
}

impl Table {
    fn new(meta: Record, columns: Vec<&'static str>) -> Self {
        Self {
            meta,
            columns,
            rows: Vec::new(),
            flat: false,
        }
    }

    pub fn to_csv(&self) -> Result<String> {
        let mut out = String::new();
        for (k, v) in &self.meta.0 {
            out.push_str(&format!("# {k}: {}\n", v.csv()));
        }
        let mut w = csv::Writer::from_writer(Vec::new());
        let write_err = |e: csv::Error| Error::Data(e.to_string());
        w.write_record(&self.columns).map_err(write_err)?;
        for row in &self.rows {
            w.write_record(row.iter().map(Cell::csv)).map_err(write_err)?;
        }
        let body = w.into_inner().map_err(|e| Error::Data(e.to_string()))?;
        out.push_str(&String::from_utf8_lossy(&body));
        Ok(out)
    }

    pub fn to_json(&self) -> Result<String> {
        #[derive(Serialize)]
        struct Doc<'a, D: Serialize> {
            meta: &'a Record,
            data: D,
        }
        let text = if self.flat {
            let data: Vec<&Cell> = self.rows.iter().map(|r| &r[0]).collect();
            serde_json::to_string_pretty(&Doc { meta: &self.meta, data })
        } else {
            let data: Vec<Record> = self
                .rows
                .iter()
                .map(|r| {
                    Record(self.columns.iter().map(|c| c.to_string()).zip(r.iter().cloned()).collect())
                })
                .collect();
            serde_json::to_string_pretty(&Doc { meta: &self.meta, data })
        };
        text.map(|s| s + "\n").map_err(|e| Error::Data(e.to_string()))
    }

    pub fn render(&self, format: Format) -> Result<String> {
        match format {
            Format::Csv => self.to_csv(),
            Format::Json => self.to_json(),
        }
    }
}

/// A command's table and whether its numeric gate passed.
#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub table: Table,
    pub pass: bool,
}

fn linspace(lo: f64, hi: f64, steps: usize, name: &str) -> Result<Vec<f64>> {
    if steps == 0 || !(lo <= hi) || !lo.is_finite() || !hi.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "{name} range needs finite min <= max and at least one step"
        )));
    }
    if steps == 1 {
        return Ok(vec![lo]);
    }
    Ok((0..steps)
        .map(|i| lo + (hi - lo) * i as f64 / (steps - 1) as f64)
        .collect())
}

fn model_meta(meta: &mut Record, p: &VgParams) {
    meta.push("a", p.a());
    meta.push("b", p.b());
    meta.push("theta", p.theta());
}

pub fn cmd_density(args: &DensityArgs) -> Result<Outcome> {
    let p = args.model.params()?;
    let times = if args.t_values.is_empty() {
        vec![args.t]
    } else {
        args.t_values.clone()
    };
    if times.iter().any(|t| !(*t > 0.0 && t.is_finite())) {
        return Err(Error::InvalidParameter("times must be finite and > 0".into()));
    }
    let xs = linspace(args.x_min, args.x_max, args.x_steps, "x")?;
    let q = QuadConfig::precise();
    let driftless = p.theta() == 0.0;
    let mut meta = Record::default();
    meta.push("command", "density");
    model_meta(&mut meta, &p);
    let columns = if driftless {
        vec!["t", "x", "p_closed_form", "p_quadrature", "abs_diff"]
    } else {
        vec!["t", "x", "p_quadrature"]
    };
    let mut table = Table::new(meta, columns);
    let mut worst = 0.0f64;
    for &t in &times {
        for &x in &xs {
            let quad = vg_density_quadrature(&p, t, x, &q)?;
            if driftless {
                let closed = match vg_density(&p, t, x)? {
                    Density::Finite(v) => v,
                    Density::Infinite => f64::INFINITY,
                };
                let diff = (closed - quad).abs();
                worst = worst.max(diff);
                table.rows.push(vec![t.into(), x.into(), closed.into(), quad.into(), diff.into()]);
            } else {
                table.rows.push(vec![t.into(), x.into(), quad.into()]);
            }
        }
    }
    let pass = !driftless || worst <= DENSITY_AGREEMENT;
    if driftless {
        table.meta.push("max_abs_diff", worst);
        table.meta.push("tolerance", DENSITY_AGREEMENT);
        table.meta.push("pass", pass);
    }
    Ok(Outcome { table, pass })
}

pub fn cmd_charfn(args: &CharfnArgs) -> Result<Outcome> {
    let p = args.model.params()?;
    if !(args.t >= 0.0 && args.t.is_finite()) {
        return Err(Error::InvalidParameter("t must be finite and >= 0".into()));
    }
    let xis = linspace(args.xi_min, args.xi_max, args.xi_steps, "xi")?;
    let weyl_rate = GammaParams::new(p.a(), p.b().sqrt())?;
    let mut meta = Record::default();
    meta.push("command", "charfn");
    model_meta(&mut meta, &p);
    meta.push("t", args.t);
    let mut table = Table::new(meta, vec!["xi", "re", "im", "phillips_symbol", "weyl_symbol_sum"]);
    for &xi in &xis {
        let c = vg_char(&p, args.t, xi);
        let weyl = (weyl_plus_symbol(&weyl_rate, xi) + weyl_minus_symbol(&weyl_rate, xi)).re;
        let phillips = phillips_symbol(&p.clock(), xi);
        table.rows.push(vec![xi.into(), c.re.into(), c.im.into(), phillips.into(), weyl.into()]);
    }
    Ok(Outcome { table, pass: true })
}

fn default_grid(eq: EquationId) -> (Vec<f64>, Vec<f64>) {
    let symmetric = vec![-2.0, -1.0, -0.5, 0.5, 1.0, 2.0];
    match eq {
        EquationId::TimeNonlocal | EquationId::Phillips => (vec![1.0, 2.0], symmetric),
        EquationId::DriftedNonlocal => (vec![1.5], vec![-1.0, -0.5, 0.5, 1.0]),
        EquationId::SpaceOde => (
            vec![0.5, 1.1, 2.0],
            vec![-3.0, -2.0, -1.0, -0.5, 0.5, 1.0, 2.0, 3.0],
        ),
        EquationId::BeghinShift => (vec![2.0], vec![0.5, 1.0, 2.0]),
    }
}

/// Runs the requested check. Uses the per-equation default grid for any
/// axis left empty.
pub fn run_residual(args: &ResidualArgs) -> Result<ResidualReport> {
    let p = args.model.params()?;
    let (default_t, default_x) = default_grid(args.equation);
    let t_values = match (args.t, args.t_values.is_empty()) {
        (_, false) => args.t_values.clone(),
        (Some(t), true) => vec![t],
        (None, true) => default_t,
    };
    let x_values = if args.x_values.is_empty() {
        default_x
    } else {
        args.x_values.clone()
    };
    let q = QuadConfig::default();
    match args.equation {
        EquationId::BeghinShift => {
            if t_values.len() != 1 {
                return Err(Error::InvalidParameter("beghin_shift takes a single time".into()));
            }
            check_beghin_shift(&p, t_values[0], &x_values)
        }
        eq => {
            let g = Grid2D::new(t_values, x_values)?;
            match eq {
                EquationId::TimeNonlocal => check_time_nonlocal(&p, &g, &q),
                EquationId::DriftedNonlocal => check_drifted_nonlocal(&p, &g, &q),
                EquationId::SpaceOde => check_space_ode(&p, &g),
                _ => check_phillips_eq(&p, &g, &q),
            }
        }
    }
}

pub fn cmd_residual(args: &ResidualArgs) -> Result<Outcome> {
    let report = run_residual(args)?;
    let tol = report.equation_id.tolerance();
    let pass = report.passes(tol);
    let mut meta = Record::default();
    meta.push("command", "residual");
    meta.push("equation", report.equation_id.name());
    model_meta(&mut meta, &report.params);
    meta.push("puncture", report.grid.puncture());
    if let Some(h) = report.time_step {
        meta.push("time_step_scale", h);
    }
    meta.push("quad_abs_tol", report.tolerances_used.abs_tol);
    meta.push("quad_rel_tol", report.tolerances_used.rel_tol);
    meta.push("max_abs", report.max_abs);
    meta.push("max_rel", report.max_rel);
    meta.push("failed_points", report.failed_points);
    meta.push("tolerance", tol);
    meta.push("pass", pass);
    let mut table = Table::new(
        meta,
        vec!["t", "x", "lhs", "rhs", "abs_residual", "rel_residual", "error"],
    );
    for pt in &report.points {
        table.rows.push(vec![
            pt.t.into(),
            pt.x.into(),
            pt.lhs.into(),
            pt.rhs.into(),
            pt.abs_residual.into(),
            pt.rel_residual.into(),
            pt.error.as_deref().unwrap_or("").into(),
        ]);
    }
    Ok(Outcome { table, pass })
}

pub fn cmd_sample(args: &SampleArgs) -> Result<Outcome> {
    let p = args.model.params()?;
    let gamma = (args.construction == Construction::CompoundPoisson).then_some(args.gamma_trunc);
    let out = sample(
        args.construction,
        &p,
        args.t,
        gamma,
        args.n,
        RngHandle::new(args.seed, args.stream),
    )?;
    let mut meta = Record::default();
    meta.push("command", "sample");
    meta.push("construction", out.construction.name());
    model_meta(&mut meta, &p);
    meta.push("t", out.t);
    meta.push("law_time", out.law_time);
    if let Some(g) = out.gamma_trunc {
        meta.push("gamma_trunc", g);
    }
    meta.push("n", out.values.len());
    meta.push("seed", out.seed);
    meta.push("stream", out.stream);
    let mut table = Table::new(meta, vec!["value"]);
    table.flat = true;
    table.rows = out.values.into_iter().map(|v| vec![v.into()]).collect();
    Ok(Outcome { table, pass: true })
}

pub fn cmd_converge(args: &ConvergeArgs) -> Result<Outcome> {
    let p = args.model.params()?;
    let study = run_convergence_study(&p, args.t, &args.gamma_ladder, args.n, RngHandle::new(args.seed, 0))?;
    let last = study.ks.last().is_some_and(|r| r.pass);
    let mut meta = Record::default();
    meta.push("command", "converge");
    model_meta(&mut meta, &p);
    meta.push("t", study.t);
    meta.push("law_time", 0.5 * study.t);
    meta.push("n", study.n);
    meta.push("seed", study.seed);
    meta.push("noise_band", study.noise_band());
    meta.push("non_increasing_within_noise", study.is_non_increasing_within(study.noise_band()));
    meta.push("final_rung_pass", last);
    let mut table = Table::new(meta, vec!["gamma", "rate", "ks_statistic", "threshold", "pass"]);
    for ((g, rate), ks) in study.gamma_ladder.iter().zip(&study.rates).zip(&study.ks) {
        table.rows.push(vec![
            (*g).into(),
            (*rate).into(),
            ks.statistic.into(),
            ks.threshold.into(),
            ks.pass.into(),
        ]);
    }
    Ok(Outcome { table, pass: last })
}

pub fn execute(command: &Command) -> Result<Outcome> {
    match command {
        Command::Density(a) => cmd_density(a),
        Command::Charfn(a) => cmd_charfn(a),
        Command::Residual(a) => cmd_residual(a),
        Command::Sample(a) => cmd_sample(a),
        Command::Converge(a) => cmd_converge(a),
    }
}

pub fn exit_code(err: &Error) -> i32 {
    match err {
        Error::Convergence { .. } | Error::Integrability(_) | Error::Range { .. } => EXIT_CONVERGENCE,
        _ => EXIT_INVALID,
    }
}

fn error_kind(err: &Error) -> &'static str {
    match err {
        Error::Domain { .. } => "domain",
        Error::InvalidParameter(_) => "invalid_parameter",
        Error::Range { .. } => "range",
        Error::Singular { .. } => "singular",
        Error::Precondition(_) => "precondition",
        Error::Convergence { .. } => "convergence",
        Error::Integrability(_) => "integrability",
        Error::Data(_) => "data",
    }
}

fn report_error(kind: &str, message: &str) {
    let line = serde_json::json!({ "error": { "kind": kind, "message": message } });
    eprintln!("{line}");
}

/// Parses `args`, runs the command, writes its output and returns the exit
/// code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = e.exit_code();
            let _ = e.print();
            return code;
        }
    };
    let outcome = match execute(&cli.command) {
        Ok(o) => o,
        Err(e) => {
            report_error(error_kind(&e), &e.to_string());
            return exit_code(&e);
        }
    };
    let text = match outcome.table.render(cli.format) {
        Ok(t) => t,
        Err(e) => {
            report_error("output", &e.to_string());
            return EXIT_INVALID;
        }
    };
    let written = match &cli.out {
        Some(path) => std::fs::write(path, text),
        None => std::io::stdout().lock().write_all(text.as_bytes()),
    };
    if let Err(e) = written {
        report_error("io", &e.to_string());
        return EXIT_INVALID;
    }
    if outcome.pass {
        EXIT_OK
    } else {
        EXIT_TOLERANCE
    }
}
