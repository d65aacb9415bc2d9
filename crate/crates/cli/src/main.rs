use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use udw_eur::lindblad::{self, KossakowskiParams};
use udw_eur::pipeline::{evaluate_point, run_sweep, SweepConfig, DEFAULT_T_MIN};
use udw_eur::qstate::{DensityOperator, C64};
use udw_eur::report::{self, DynamicsRow};
use udw_eur::stationary::{stationary_xstate, temperature_from_acceleration};
use udw_eur::verify::{self, VerifyOptions};
use udw_eur::{Error, InitialCorrelation, SweepRow, TwoQubitOperator};

#[derive(Parser, Debug)]
#[command(name = "udw-eur", version, about = "Entropic uncertainty and discord of two accelerated detectors")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Evaluate every quantity at one (omega, T, Delta0) point.
    Point(PointArgs),
    /// Sweep the temperature for one or more Delta0 values.
    Sweep(SweepArgs),
    /// Integrate the master equation from an initial state.
    Dynamics(DynamicsArgs),
    /// Run the invariant suite.
    Verify(VerifyArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
    Both,
}

impl Format {
    fn csv(self) -> bool {
        matches!(self, Format::Csv | Format::Both)
    }
    fn json(self) -> bool {
        matches!(self, Format::Json | Format::Both)
    }
}

#[derive(Args, Debug)]
struct TemperatureArgs {
    #[arg(long, conflicts_with_all = ["acceleration", "t_zero_limit"])]
    temperature: Option<f64>,
    /// Proper acceleration a; T = a / (2 pi).
    #[arg(long, conflicts_with = "t_zero_limit")]
    acceleration: Option<f64>,
    /// Evaluate at T = 0.
    #[arg(long)]
    t_zero_limit: bool,
}

impl TemperatureArgs {
    fn resolve(&self) -> Result<f64, Failure> {
        if self.t_zero_limit {
            return Ok(0.0);
        }
        match (self.temperature, self.acceleration) {
            (Some(t), None) => Ok(t),
            (None, Some(a)) => Ok(temperature_from_acceleration(a)?),
            _ => Err(Failure::usage(
                "one of --temperature, --acceleration or --t-zero-limit is required",
            )),
        }
    }
}

#[derive(Args, Debug)]
struct PointArgs {
    #[arg(long, default_value_t = 1.0)]
    omega: f64,
    #[command(flatten)]
    temperature: TemperatureArgs,
    #[arg(long, allow_hyphen_values = true)]
    delta0: f64,
    /// Also write the row to point.csv / point.json in this directory.
    #[arg(long)]
    out_dir: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
}

#[derive(Args, Debug)]
struct SweepArgs {
    #[arg(long, default_value_t = 1.0)]
    omega: f64,
    /// Repeatable; defaults to -1, 0.5 and 1.
    #[arg(long, allow_hyphen_values = true)]
    delta0: Vec<f64>,
    /// Defaults to 0.01, or 0 with --t-zero-limit.
    #[arg(long)]
    t_min: Option<f64>,
    #[arg(long, default_value_t = 4.0)]
    t_max: f64,
    #[arg(long, default_value_t = 200)]
    t_count: usize,
    /// Permit T = 0 on the grid.
    #[arg(long)]
    t_zero_limit: bool,
    #[arg(long, default_value = "out")]
    out_dir: PathBuf,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
    /// Write SVG plots next to the data files.
    #[arg(long)]
    svg: bool,
    /// Worker threads (default: all cores).
    #[arg(long)]
    jobs: Option<usize>,
}

#[derive(Args, Debug)]
struct DynamicsArgs {
    #[arg(long, default_value_t = 1.0)]
    omega: f64,
    #[command(flatten)]
    temperature: TemperatureArgs,
    /// singlet, triplet-zz, product-00, maximally-mixed, or 16 comma-separated
    /// row-major entries, each `re` or `re:im`.
    #[arg(long, default_value = "product-00", allow_hyphen_values = true)]
    initial: String,
    /// Defaults to 100 / gamma_plus.
    #[arg(long)]
    tau_max: Option<f64>,
    /// Defaults to 0.01 / gamma_plus, the largest accepted step.
    #[arg(long)]
    dtau: Option<f64>,
    /// Record every n-th step.
    #[arg(long, default_value_t = 100)]
    stride: usize,
    #[arg(long, default_value = "out")]
    out_dir: PathBuf,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
}

#[derive(Args, Debug)]
struct VerifyArgs {
    /// Negate the stationary coherence d inside the suite (mutation check).
    #[arg(long, hide = true)]
    inject_sign_flip: bool,
}

#[derive(Debug)]
struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn usage(message: impl Into<String>) -> Self {
        Self {
            code: 2,
            message: message.into(),
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::Domain { .. } | Error::InvalidState(_) | Error::InvalidBasis(_) => 2,
            _ => 3,
        };
        Self {
            code,
            message: e.to_string(),
        }
    }
}

fn write_file(path: &Path, contents: &str) -> Result<(), Failure> {
    fs::write(path, contents).map_err(|e| Failure::usage(format!("cannot write {}: {e}", path.display())))
}

fn prepare_dir(dir: &Path) -> Result<(), Failure> {
    fs::create_dir_all(dir).map_err(|e| Failure::usage(format!("cannot create {}: {e}", dir.display())))
}

fn emit(text: &str) {
    // a closed pipe downstream is not an error for us
    let _ = io::stdout().lock().write_all(text.as_bytes());
}

fn print_row(row: &SweepRow) {
    let mut out = String::new();
    for (name, v) in SweepRow::HEADER.iter().zip(row.values()) {
        out.push_str(&format!("{name:<12} {}\n", report::fmt_sig(v)));
    }
    emit(&out);
}

fn cmd_point(args: &PointArgs) -> Result<(), Failure> {
    let t = args.temperature.resolve()?;
    let row = evaluate_point(args.omega, t, args.delta0)?;
    print_row(&row);
    if let Some(dir) = &args.out_dir {
        prepare_dir(dir)?;
        let config = SweepConfig {
            omega: args.omega,
            delta0_list: vec![args.delta0],
            t_min: t,
            t_max: t,
            t_count: 1,
            t_zero_limit: args.temperature.t_zero_limit,
        };
        let series = udw_eur::pipeline::SweepSeries {
            delta0: args.delta0,
            rows: vec![row],
        };
        if args.format.csv() {
            write_file(&dir.join("point.csv"), &report::sweep_csv(&config, &series))?;
        }
        if args.format.json() {
            write_file(&dir.join("point.json"), &report::sweep_json(&config, &series))?;
        }
    }
    Ok(())
}

fn cmd_sweep(args: &SweepArgs) -> Result<(), Failure> {
    let defaults = SweepConfig::default();
    let config = SweepConfig {
        omega: args.omega,
        delta0_list: if args.delta0.is_empty() {
            defaults.delta0_list
        } else {
            args.delta0.clone()
        },
        t_min: args
            .t_min
            .unwrap_or(if args.t_zero_limit { 0.0 } else { DEFAULT_T_MIN }),
        t_max: args.t_max,
        t_count: args.t_count,
        t_zero_limit: args.t_zero_limit,
    };
    config.validate()?;
    if args.jobs == Some(0) {
        return Err(Failure::usage("--jobs must be at least 1"));
    }
    let all = run_sweep(&config, args.jobs)?;

    prepare_dir(&args.out_dir)?;
    for series in &all {
        for row in &series.rows {
            row.check()?;
        }
        let stem = format!("sweep_delta0_{}", report::delta_tag(series.delta0));
        if args.format.csv() {
            write_file(&args.out_dir.join(format!("{stem}.csv")), &report::sweep_csv(&config, series))?;
        }
        if args.format.json() {
            write_file(&args.out_dir.join(format!("{stem}.json")), &report::sweep_json(&config, series))?;
        }
        if args.svg {
            let tag = report::delta_tag(series.delta0);
            write_file(&args.out_dir.join(format!("eur_delta0_{tag}.svg")), &report::eur_svg(series))?;
            write_file(
                &args.out_dir.join(format!("correlations_delta0_{tag}.svg")),
                &report::correlations_svg(series),
            )?;
        }
        eprintln!(
            "Delta0 = {}: {} rows written to {}",
            report::fmt_sig(series.delta0),
            series.rows.len(),
            args.out_dir.display()
        );
    }
    Ok(())
}

fn parse_entry(s: &str) -> Option<C64> {
    let s = s.trim();
    match s.split_once(':') {
        Some((re, im)) => Some(C64::new(re.trim().parse().ok()?, im.trim().parse().ok()?)),
        None => Some(C64::new(s.parse().ok()?, 0.0)),
    }
}

fn parse_initial(spec: &str) -> Result<TwoQubitOperator, Failure> {
    if let Some(rho) = lindblad::named_state(spec) {
        return Ok(rho);
    }
    let entries: Option<Vec<C64>> = spec.split(',').map(parse_entry).collect();
    let entries = match entries {
        Some(e) if e.len() == 16 => e,
        _ => {
            return Err(Failure::usage(format!(
                "--initial {spec:?}: expected a state name or 16 comma-separated entries"
            )))
        }
    };
    let rho = TwoQubitOperator::new(nalgebra::Matrix4::from_row_slice(&entries));
    rho.check_state()?;
    Ok(rho)
}

fn cmd_dynamics(args: &DynamicsArgs) -> Result<(), Failure> {
    let rho0 = parse_initial(&args.initial)?;
    let t = args.temperature.resolve()?;
    if t.is_nan() || t < 0.0 {
        return Err(Error::Domain {
            what: "temperature",
            value: t,
            expected: "T >= 0",
        }
        .into());
    }
    let beta = if t == 0.0 { f64::INFINITY } else { 1.0 / t };
    let params = KossakowskiParams::thermal(args.omega, beta)?;
    let l = lindblad::generator_for(&params)?;
    let dtau = args.dtau.unwrap_or(lindblad::MAX_STEP / params.gamma_plus);
    let tau_max = args.tau_max.unwrap_or(100.0 / params.gamma_plus);
    if args.stride == 0 {
        return Err(Failure::usage("--stride must be at least 1"));
    }

    let delta0 = lindblad::delta_of_state(&rho0);
    let predicted = stationary_xstate(InitialCorrelation::new(delta0.clamp(-3.0, 1.0))?, params.ratio())?;
    let predicted = predicted.to_density();
    let traj = lindblad::integrate_strided(&l, &rho0, tau_max, dtau, args.stride)?;

    let rows = traj
        .samples
        .iter()
        .map(|(tau, rho)| {
            let e = udw_eur::eur::evaluate_state(rho)?;
            Ok(DynamicsRow {
                tau: *tau,
                fidelity: lindblad::fidelity(rho, &predicted),
                delta: lindblad::delta_of_state(rho),
                uncertainty: e.uncertainty,
                bound: e.bound,
            })
        })
        .collect::<Result<Vec<_>, Error>>()?;

    let comments = [
        ("omega", report::fmt_sig(args.omega)),
        ("temperature", report::fmt_sig(t)),
        ("initial", args.initial.clone()),
        ("gamma_plus", report::fmt_sig(params.gamma_plus)),
        ("gamma_minus", report::fmt_sig(params.gamma_minus)),
        ("gamma_zero", report::fmt_sig(params.gamma_zero)),
        ("tau_max", report::fmt_sig(tau_max)),
        ("dtau", report::fmt_sig(dtau)),
        ("stride", args.stride.to_string()),
        ("max_trace_drift", report::fmt_sig(traj.max_trace_drift)),
    ];
    prepare_dir(&args.out_dir)?;
    if args.format.csv() {
        write_file(&args.out_dir.join("dynamics.csv"), &report::dynamics_csv(&comments, &rows))?;
    }
    if args.format.json() {
        write_file(&args.out_dir.join("dynamics.json"), &report::dynamics_json(&comments, &rows))?;
    }
    let last = rows.last().expect("initial sample");
    eprintln!(
        "{} samples; final fidelity {}, Tr[rho S] {} (initial {})",
        rows.len(),
        report::fmt_sig(last.fidelity),
        report::fmt_sig(last.delta),
        report::fmt_sig(delta0)
    );
    Ok(())
}

fn cmd_verify(args: &VerifyArgs) -> Result<(), Failure> {
    let report = verify::run(&VerifyOptions {
        flip_d_sign: args.inject_sign_flip,
        ..VerifyOptions::desk()
    });
    emit(&format!("{report}\n"));
    if report.all_passed() {
        Ok(())
    } else {
        let names: Vec<&str> = report.failures().map(|c| c.name).collect();
        Err(Failure {
            code: 1,
            message: format!("failed: {}", names.join(", ")),
        })
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match &cli.command {
        Command::Point(a) => cmd_point(a),
        Command::Sweep(a) => cmd_sweep(a),
        Command::Dynamics(a) => cmd_dynamics(a),
        Command::Verify(a) => cmd_verify(a),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("udw-eur: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
