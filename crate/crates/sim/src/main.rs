use std::fs::{self, File};
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use fle_core::model::Resonance;
use fle_core::swt::{min_energy_gap, sw_closed_form, sw_generic, Variant};
use fle_sim::output::{self, write_dressed, write_sweep_header, write_tomography};
use fle_sim::sweep::tomography;
use fle_sim::{run_sweep, Mode, RawConfig, SimError, SweepConfig};

#[derive(Parser)]
#[command(name = "simulate", version, about = "Two-photon entanglement of a driven emitter in a two-mode cavity")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// Configuration file with `key = value` lines
    #[arg(long)]
    config: Option<PathBuf>,
    /// Override a configuration key, e.g. `--set n_max=4` (repeatable)
    #[arg(long = "set", value_name = "KEY=VALUE")]
    overrides: Vec<String>,
    /// Output file (default: standard output)
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum SweepMode {
    Omega,
    Delta,
}

#[derive(Clone, Copy, ValueEnum)]
enum Form {
    Full,
    Leading,
}

#[derive(Subcommand)]
enum Command {
    /// Concurrence sweep over Ω (resonance tracked) or over Δ (Ω fixed)
    Sweep {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_enum)]
        mode: Option<SweepMode>,
        #[arg(long)]
        threads: Option<usize>,
    },
    /// Two-photon density matrix at a single point
    Tomography {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        omega: Option<String>,
        /// Resonance the cavity is tuned to, or `none` to use `delta`
        #[arg(long)]
        resonance: Option<String>,
    },
    /// Dressed-state energies as a function of Ω
    Dressed {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = 50.0)]
        omega_max: f64,
        #[arg(long, default_value_t = 101)]
        points: usize,
    },
    /// Effective Hamiltonian coefficients of a two-photon resonance
    Swt {
        #[arg(long)]
        resonance: Resonance,
        #[arg(long)]
        omega: f64,
        #[arg(long, default_value_t = 20.0)]
        delta0: f64,
        #[arg(long, value_enum, default_value = "full")]
        form: Form,
    },
}

fn load(common: &Common, extra: &[(&str, Option<String>)]) -> Result<SweepConfig, SimError> {
    let mut raw = match &common.config {
        Some(path) => {
            let text = fs::read_to_string(path)
                .map_err(|e| SimError::Config(format!("cannot read {}: {e}", path.display())))?;
            RawConfig::parse(&text)?
        }
        None => RawConfig::default(),
    };
    let mut cli = RawConfig::default();
    for (k, v) in extra {
        if let Some(v) = v {
            cli.set(k, v)?;
        }
    }
    for pair in &common.overrides {
        cli.set_pair(pair)?;
    }
    if let Some(out) = &common.out {
        cli.set("output", &out.to_string_lossy())?;
    }
    raw.merge(&cli);
    raw.resolve()
}

fn open_output(path: Option<&Path>) -> io::Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => {
            if let Some(dir) = p.parent().filter(|d| !d.as_os_str().is_empty()) {
                fs::create_dir_all(dir)?;
            }
            Box::new(BufWriter::new(File::create(p)?))
        }
        None => Box::new(BufWriter::new(io::stdout())),
    })
}

fn run(cli: Cli) -> Result<ExitCode, SimError> {
    match cli.command {
        Command::Sweep { common, mode, threads } => {
            let mode = mode.map(|m| match m {
                SweepMode::Omega => "omega".to_string(),
                SweepMode::Delta => "delta".to_string(),
            });
            let cfg = load(&common, &[("mode", mode), ("threads", threads.map(|t| t.to_string()))])?;
            if !matches!(cfg.mode, Mode::OmegaSweep | Mode::DeltaSweep) {
                return Err(SimError::Config(format!("sweep needs mode omega or delta, got {}", cfg.mode.name())));
            }
            let mut w = open_output(cfg.output.as_deref())?;
            write_sweep_header(&mut w, &cfg)?;
            w.flush()?;
            let recs = run_sweep(&cfg, |rec| {
                if let Err((_, msg)) = &rec.status {
                    eprintln!("point omega = {} delta = {} failed: {msg}", rec.omega, rec.delta);
                }
                writeln!(w, "{}", output::sweep_row(rec))?;
                w.flush()
            })?;
            let failed = recs.iter().filter(|r| !r.is_ok()).count();
            if failed > 0 {
                eprintln!("{failed} of {} points failed", recs.len());
                return Ok(ExitCode::from(2));
            }
        }
        Command::Tomography { common, omega, resonance } => {
            let cfg = load(&common, &[("mode", Some("tomography".into())), ("omega", omega), ("resonance", resonance)])?;
            let point = tomography(&cfg)?;
            let mut w = open_output(cfg.output.as_deref())?;
            write_tomography(&mut w, &cfg, &point)?;
            w.flush()?;
        }
        Command::Dressed { common, omega_max, points } => {
            let cfg = load(
                &common,
                &[
                    ("mode", Some("dressed".into())),
                    ("start", Some("0".into())),
                    ("stop", Some(omega_max.to_string())),
                    ("n_points", Some(points.to_string())),
                ],
            )?;
            let rows = output::dressed_rows(cfg.params.delta0, cfg.start, cfg.stop, cfg.n_points);
            let mut w = open_output(cfg.output.as_deref())?;
            write_dressed(&mut w, &cfg, &rows)?;
            w.flush()?;
        }
        Command::Swt { resonance, omega, delta0, form } => {
            let variant = match form {
                Form::Full => Variant::Full,
                Form::Leading => Variant::LeadingOrder,
            };
            let h = sw_closed_form(resonance, delta0, omega, variant)?;
            let (gap, state) = min_energy_gap(resonance, delta0, omega);
            println!("# resonance {resonance}, omega = {omega} g, delta0 = {delta0} g (coefficients in units of g)");
            for (name, v) in &h.coefficients {
                println!("{name} = {v:.12e}");
            }
            println!("# effective Hamiltonian in the basis |1,0,0>, |2,1,1>, |2,Phi+>, |2,Phi->");
            for i in 0..4 {
                let row: Vec<String> = (0..4).map(|j| format!("{:>16.9e}", h.matrix[(i, j)])).collect();
                println!("{}", row.join(" "));
            }
            println!("# smallest energy denominator {gap:.6e} g ({state})");
            match sw_generic(resonance, delta0, omega) {
                Ok(g) => println!("# max deviation from generic second order {:.3e}", (g.matrix - h.matrix).amax()),
                Err(e) => println!("# generic second order unavailable: {e}"),
            }
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(e @ SimError::Config(_)) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
        Err(SimError::Core(e @ (fle_core::Error::InvalidParams(_) | fle_core::Error::InvalidCutoff { .. }))) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
