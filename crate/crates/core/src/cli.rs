//! The `qtr` command-line interface.
//!
//! Exit codes: 0 on success, 1 for domain or runtime failures, 2 for usage
//! and parse errors.

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{Map, Value};

use crate::bounds::{advantage_region_search, AdvantageGrid, AdvantageSearch, CNParams, ScenarioParams};
use crate::cn_sim::{simulate_cn, simulate_qtr_cn, CnSimConfig, CnSimResult};
use crate::error::Error;
use crate::grid::{parse_bins_grid, parse_count_grid, parse_real_grid, parse_sweep_spec};
use crate::scenario::{compare_all, format_f64, sweep, write_csv};

#[derive(Debug, Parser)]
#[command(name = "qtr", version, about = "Error bounds for quantum and classical target ranging")]
struct Cli {
    /// Worker threads for simulations and sweeps; 0 uses every core.
    /// Results do not depend on this.
    #[arg(long, global = true, default_value_t = 0)]
    threads: usize,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Every bound for one scenario.
    Bounds(BoundsArgs),
    /// Monte Carlo estimate of the conditional-nulling receiver error.
    SimulateCn(SimulateArgs),
    /// Bounds over a Cartesian grid of scenarios.
    Sweep(SweepArgs),
    /// Grid search for parameters where the quantum receiver can win.
    Advantage(AdvantageArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Debug, Args)]
struct OutputArgs {
    #[arg(long, value_enum)]
    format: Option<Format>,
    /// Write to this file instead of stdout.
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Debug, Args)]
#[command(allow_negative_numbers = true)]
struct BoundsArgs {
    /// Number of range bins.
    #[arg(short = 'm', long = "bins")]
    m: u32,
    /// Modes per bin.
    #[arg(short = 'M', long = "modes")]
    big_m: u64,
    /// Mean signal photons per mode.
    #[arg(long)]
    signal_photons: f64,
    /// Round-trip transmissivity.
    #[arg(long)]
    eta: f64,
    /// Mean background photons per mode.
    #[arg(long)]
    background_photons: f64,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Debug, Args)]
#[command(allow_negative_numbers = true)]
struct SimulateArgs {
    /// False-alarm probability of the target test.
    #[arg(long)]
    zeta1: Option<f64>,
    /// Miss probability of the target test.
    #[arg(long)]
    zeta2: Option<f64>,
    /// Number of hypotheses.
    #[arg(long)]
    hypotheses: Option<u32>,
    #[arg(short = 'm', long = "bins")]
    m: Option<u32>,
    #[arg(short = 'M', long = "modes")]
    big_m: Option<u64>,
    #[arg(long)]
    signal_photons: Option<f64>,
    #[arg(long)]
    eta: Option<f64>,
    #[arg(long)]
    background_photons: Option<f64>,
    #[arg(long, default_value_t = 1_000_000)]
    trials: u64,
    #[arg(long, default_value_t = 42)]
    seed: u64,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Debug, Args)]
struct SweepArgs {
    /// Spec file of `key = values` lines.
    #[arg(long)]
    spec: Option<PathBuf>,
    /// Extra `key=values` assignment, applied after the spec file.
    #[arg(long = "grid", value_name = "KEY=VALUES")]
    grid: Vec<String>,
    /// Maximum number of rows.
    #[arg(long)]
    cap: Option<usize>,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Debug, Args)]
#[command(allow_negative_numbers = true)]
struct AdvantageArgs {
    #[arg(short = 'm', long = "bins", default_value = "2..64")]
    m: String,
    #[arg(short = 'M', long = "modes", default_value = "log(1, 1e6, 7)")]
    big_m: String,
    #[arg(long, default_value = "log(1e-3, 10, 9)")]
    gamma: String,
    #[arg(long = "background-photons", default_value = "log(0.1, 100, 13)")]
    n_b: String,
    #[command(flatten)]
    output: OutputArgs,
}

enum Failure {
    Usage(String),
    Runtime(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Parse(_) => Failure::Usage(e.to_string()),
            _ => Failure::Runtime(e.to_string()),
        }
    }
}

type Outcome<T> = std::result::Result<T, Failure>;

/// Runs the CLI on `args` (including the program name) and returns the
/// process exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let rendered = e.render().to_string();
            return if e.use_stderr() {
                let _ = write!(err, "{rendered}");
                2
            } else {
                let _ = write!(out, "{rendered}");
                0
            };
        }
    };
    let pool = match rayon::ThreadPoolBuilder::new().num_threads(cli.threads).build() {
        Ok(pool) => pool,
        Err(e) => {
            let _ = writeln!(err, "error: cannot start thread pool: {e}");
            return 1;
        }
    };
    let mut notes = Vec::new();
    let outcome = pool.install(|| dispatch(&cli.command, &mut notes));
    for note in notes {
        let _ = writeln!(err, "{note}");
    }
    match outcome {
        Ok((bytes, dest)) => match dest {
            Some(path) => match fs::write(path, &bytes) {
                Ok(()) => 0,
                Err(e) => {
                    let _ = writeln!(err, "error: cannot write {}: {e}", path.display());
                    1
                }
            },
            None => match out.write_all(&bytes).and_then(|_| out.flush()) {
                Ok(()) => 0,
                Err(e) => {
                    let _ = writeln!(err, "error: {e}");
                    1
                }
            },
        },
        Err(Failure::Usage(msg)) => {
            let _ = writeln!(err, "error: {msg}");
            2
        }
        Err(Failure::Runtime(msg)) => {
            let _ = writeln!(err, "error: {msg}");
            1
        }
    }
}

fn dispatch<'a>(command: &'a Command, notes: &mut Vec<String>) -> Outcome<(Vec<u8>, Option<&'a PathBuf>)> {
    match command {
        Command::Bounds(a) => Ok((bounds(a)?, a.output.output.as_ref())),
        Command::SimulateCn(a) => Ok((simulate(a)?, a.output.output.as_ref())),
        Command::Sweep(a) => Ok((sweep_cmd(a)?, a.output.output.as_ref())),
        Command::Advantage(a) => Ok((advantage(a, notes)?, a.output.output.as_ref())),
    }
}

fn pretty_json<T: serde::Serialize>(value: &T) -> Outcome<Vec<u8>> {
    let mut bytes = serde_json::to_vec_pretty(value).map_err(|e| Failure::Runtime(e.to_string()))?;
    bytes.push(b'\n');
    Ok(bytes)
}

fn bounds(a: &BoundsArgs) -> Outcome<Vec<u8>> {
    let s = ScenarioParams::new(a.m, a.big_m, a.signal_photons, a.eta, a.background_photons)?;
    let report = compare_all(&s)?;
    match a.output.format.unwrap_or(Format::Json) {
        Format::Json => pretty_json(&report),
        Format::Csv => csv_bytes(&[report]),
    }
}

fn csv_bytes(rows: &[crate::bounds::BoundsReport]) -> Outcome<Vec<u8>> {
    let mut bytes = Vec::new();
    write_csv(rows, &mut bytes).map_err(|e| Failure::Runtime(e.to_string()))?;
    Ok(bytes)
}

/// Flat record rendered either as a JSON object or as a one-row CSV.
struct Record(Vec<(&'static str, Value)>);

impl Record {
    fn real(&mut self, key: &'static str, x: f64) {
        let v = serde_json::Number::from_f64(x).map(Value::Number).unwrap_or(Value::Null);
        self.0.push((key, v));
    }

    fn push(&mut self, key: &'static str, v: impl Into<Value>) {
        self.0.push((key, v.into()));
    }

    fn render(self, format: Format) -> Outcome<Vec<u8>> {
        match format {
            Format::Json => pretty_json(&Value::Object(self.0.into_iter().map(|(k, v)| (k.to_string(), v)).collect::<Map<_, _>>())),
            Format::Csv => {
                let header: Vec<&str> = self.0.iter().map(|(k, _)| *k).collect();
                let cells: Vec<String> = self.0.iter().map(|(_, v)| csv_cell(v)).collect();
                Ok(format!("{}\n{}\n", header.join(","), cells.join(",")).into_bytes())
            }
        }
    }
}

fn csv_cell(v: &Value) -> String {
    match v {
        Value::Null => String::new(),
        Value::Number(n) if n.is_f64() => format_f64(n.as_f64().unwrap_or(f64::NAN)),
        Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}

fn push_result(rec: &mut Record, r: Option<&CnSimResult>) {
    rec.push("error_count", r.map(|r| r.error_count));
    for (key, x) in [
        ("error_rate", r.map(|r| r.error_rate)),
        ("std_error", r.map(|r| r.std_error)),
        ("wilson_lo", r.map(|r| r.wilson_95.0)),
        ("wilson_hi", r.map(|r| r.wilson_95.1)),
    ] {
        match x {
            Some(x) => rec.real(key, x),
            None => rec.push(key, Value::Null),
        }
    }
}

fn simulate(a: &SimulateArgs) -> Outcome<Vec<u8>> {
    let zeta_flags = [a.zeta1.is_some(), a.zeta2.is_some(), a.hypotheses.is_some()];
    let scenario_flags = [
        a.m.is_some(),
        a.big_m.is_some(),
        a.signal_photons.is_some(),
        a.eta.is_some(),
        a.background_photons.is_some(),
    ];
    let any_zeta = zeta_flags.iter().any(|&b| b);
    let any_scenario = scenario_flags.iter().any(|&b| b);
    let format = a.output.format.unwrap_or(Format::Json);
    match (any_zeta, any_scenario) {
        (true, true) => Err(Failure::Usage(
            "give either --zeta1/--zeta2/--hypotheses or the scenario flags, not both".into(),
        )),
        (false, false) => Err(Failure::Usage(
            "give --zeta1, --zeta2 and --hypotheses, or a full scenario".into(),
        )),
        (true, false) => {
            let (Some(z1), Some(z2), Some(n)) = (a.zeta1, a.zeta2, a.hypotheses) else {
                return Err(Failure::Usage("--zeta1, --zeta2 and --hypotheses go together".into()));
            };
            let cn = CNParams::new(z1, z2, n)?;
            let r = simulate_cn(&CnSimConfig { cn, trials: a.trials, master_seed: a.seed })?;
            let mut rec = Record(Vec::new());
            rec.real("zeta1", z1);
            rec.real("zeta2", z2);
            rec.push("hypotheses", n);
            rec.push("trials", a.trials);
            rec.push("seed", a.seed);
            push_result(&mut rec, Some(&r));
            rec.real("analytic", crate::bounds::cn_error_probability(&cn));
            rec.render(format)
        }
        (false, true) => {
            let (Some(m), Some(big_m), Some(n_s), Some(eta), Some(n_b)) =
                (a.m, a.big_m, a.signal_photons, a.eta, a.background_photons)
            else {
                return Err(Failure::Usage(
                    "a scenario needs --bins, --modes, --signal-photons, --eta and --background-photons".into(),
                ));
            };
            let s = ScenarioParams::new(m, big_m, n_s, eta, n_b)?;
            let sim = simulate_qtr_cn(&s, a.trials, a.seed)?;
            let mut rec = Record(Vec::new());
            rec.push("m", m);
            rec.push("M", big_m);
            rec.real("n_s", n_s);
            rec.real("eta", eta);
            rec.real("n_b", n_b);
            rec.real("zeta", sim.zeta);
            rec.push("trials", a.trials);
            rec.push("seed", a.seed);
            push_result(&mut rec, sim.result.as_ref());
            rec.real("analytic", sim.analytic);
            rec.real("asymptotic", sim.asymptotic);
            rec.push("zero_variance", sim.zero_variance);
            rec.render(format)
        }
    }
}

fn sweep_cmd(a: &SweepArgs) -> Outcome<Vec<u8>> {
    let file_text = match &a.spec {
        Some(path) => fs::read_to_string(path)
            .map_err(|e| Failure::Usage(format!("cannot read spec file {}: {e}", path.display())))?,
        None => String::new(),
    };
    if a.spec.is_none() && a.grid.is_empty() {
        return Err(Failure::Usage("sweep needs --spec FILE or --grid KEY=VALUES".into()));
    }
    let mut spec = parse_sweep_spec(file_text.lines().chain(a.grid.iter().map(String::as_str)))?;
    if let Some(cap) = a.cap {
        spec.cap = cap;
    }
    let rows = sweep(&spec)?;
    match a.output.format.unwrap_or(Format::Csv) {
        Format::Csv => csv_bytes(&rows),
        Format::Json => pretty_json(&rows),
    }
}

fn advantage(a: &AdvantageArgs, notes: &mut Vec<String>) -> Outcome<Vec<u8>> {
    let grid = AdvantageGrid {
        m: parse_bins_grid(&a.m)?,
        n_b: parse_real_grid(&a.n_b)?,
        big_m: parse_count_grid(&a.big_m)?,
        gamma: parse_real_grid(&a.gamma)?,
    };
    if grid.gamma.iter().any(|&g| g <= 0.0) {
        return Err(Failure::Usage("every gamma must be positive".into()));
    }
    if grid.n_b.iter().any(|&n| n <= 0.0) {
        return Err(Failure::Usage("every background photon number must be positive".into()));
    }
    if grid.m.iter().any(|&m| m < 2) {
        return Err(Failure::Usage("every bin count must be at least 2".into()));
    }
    if grid.big_m.contains(&0) {
        return Err(Failure::Usage("every mode count must be at least 1".into()));
    }
    let search = advantage_region_search(&grid)?;
    match a.output.format.unwrap_or(Format::Json) {
        Format::Json => pretty_json(&advantage_json(&search)),
        Format::Csv => {
            notes.push(witness_line(&search));
            let mut text = String::from("m,M,gamma,n_b,ln_m,rhs\n");
            for p in &search.satisfying {
                text.push_str(&format!(
                    "{},{},{},{},{},{}\n",
                    p.m,
                    p.big_m,
                    format_f64(p.gamma),
                    format_f64(p.n_b),
                    format_f64(p.ln_m),
                    format_f64(p.rhs)
                ));
            }
            Ok(text.into_bytes())
        }
    }
}

fn summary(search: &AdvantageSearch) -> String {
    if search.satisfying.is_empty() {
        "no satisfying tuples".to_string()
    } else {
        format!("{} of {} grid points satisfy the condition", search.satisfying.len(), search.grid_size)
    }
}

fn witness_line(search: &AdvantageSearch) -> String {
    let w = &search.witness;
    format!(
        "{}; witness: {} ({} pairs with m > 2 checked, {} excluded, {})",
        summary(search),
        w.statement,
        w.pairs_checked,
        w.pairs_excluded,
        if w.holds { "holds" } else { "VIOLATED" }
    )
}

fn advantage_json(search: &AdvantageSearch) -> Value {
    let mut map = Map::new();
    map.insert("grid_size".into(), search.grid_size.into());
    map.insert("satisfying_count".into(), search.satisfying.len().into());
    map.insert("message".into(), summary(search).into());
    map.insert(
        "satisfying".into(),
        serde_json::to_value(&search.satisfying).unwrap_or(Value::Null),
    );
    map.insert("witness".into(), serde_json::to_value(&search.witness).unwrap_or(Value::Null));
    Value::Object(map)
}
