use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};

use qkdsim::experiment::{run_experiment, write_csv, ExperimentKind, ExperimentOutput, ExperimentSpec};
use qkdsim::{EveKind, EveStrategy, ProtocolConfig};

#[derive(Parser)]
#[command(name = "qkdsim", version, about = "Entanglement-based QKD simulator")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one key-generation session and print the result as JSON.
    Run {
        #[command(flatten)]
        protocol: ProtocolArgs,
        /// Write the public transcript as JSON lines.
        #[arg(long)]
        transcript: Option<PathBuf>,
    },
    /// Sweep one parameter and write a CSV table.
    Sweep {
        /// qber-vs-eve, keyrate-vs-noise or keylen-vs-eps.
        #[arg(long)]
        kind: String,
        /// Comma-separated parameter values.
        #[arg(long, value_delimiter = ',', num_args = 1.., required = true)]
        grid: Vec<f64>,
        #[arg(long, default_value_t = 10)]
        reps: usize,
        /// Output file; stdout if omitted.
        #[arg(long)]
        out: Option<PathBuf>,
        #[command(flatten)]
        protocol: ProtocolArgs,
    },
    /// Teleport random qubits and report outcome counts and fidelity.
    TeleportDemo {
        #[arg(long, default_value_t = 1000)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Show what a perfect cloner would let Bob learn about Alice's basis.
    CloningDemo {
        #[arg(long, default_value_t = 1000)]
        copies: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Generate a key, then encrypt and decrypt a message with it.
    OtpDemo {
        #[arg(long)]
        message: String,
        #[command(flatten)]
        protocol: ProtocolArgs,
    },
}

#[derive(Args)]
struct ProtocolArgs {
    /// JSON file with protocol parameters; flags override it.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    rounds: Option<usize>,
    /// passive, intercept:<random|Z|X|<deg>deg>:<fraction>, or guessall:<seed>.
    #[arg(long, default_value = "passive", value_parser = parse_eve)]
    eve: EveKind,
    #[arg(long)]
    px: Option<f64>,
    #[arg(long)]
    py: Option<f64>,
    #[arg(long)]
    pz: Option<f64>,
    #[arg(long)]
    ploss: Option<f64>,
    /// Abort threshold on the error-rate upper bound.
    #[arg(long)]
    qmax: Option<f64>,
    #[arg(long)]
    eps_sec: Option<f64>,
    #[arg(long)]
    eps_cor: Option<f64>,
    #[arg(long)]
    eps_pe: Option<f64>,
    #[arg(long)]
    sample_fraction: Option<f64>,
    #[arg(long)]
    tag_bits: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    /// Prepare-and-measure instead of the entangled source.
    #[arg(long)]
    pm: bool,
}

impl ProtocolArgs {
    fn config(&self) -> Result<ProtocolConfig> {
        let mut c = match &self.config {
            Some(path) => {
                let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
                serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))?
            }
            None => ProtocolConfig::default(),
        };
        fn set<T: Copy>(dst: &mut T, v: Option<T>) {
            if let Some(v) = v {
                *dst = v;
            }
        }
        set(&mut c.n_rounds, self.rounds);
        set(&mut c.noise.p_x, self.px);
        set(&mut c.noise.p_y, self.py);
        set(&mut c.noise.p_z, self.pz);
        set(&mut c.noise.p_loss, self.ploss);
        set(&mut c.qber_threshold, self.qmax);
        set(&mut c.eps_sec, self.eps_sec);
        set(&mut c.eps_cor, self.eps_cor);
        set(&mut c.eps_pe, self.eps_pe);
        set(&mut c.sample_fraction, self.sample_fraction);
        set(&mut c.tag_bits, self.tag_bits);
        set(&mut c.seed, self.seed);
        c.validate()?;
        Ok(c)
    }

    fn spec(&self, kind: ExperimentKind, grid: Vec<f64>, reps: usize) -> Result<ExperimentSpec> {
        let mut spec = ExperimentSpec::new(kind, grid, reps, self.config()?);
        spec.eve = self.eve;
        spec.prepare_measure = self.pm;
        Ok(spec)
    }
}

fn parse_eve(s: &str) -> Result<EveKind, String> {
    s.parse::<EveStrategy>().map(|e| e.kind()).map_err(|e| e.to_string())
}

fn print_json(value: &serde_json::Value) -> Result<()> {
    let mut out = io::stdout().lock();
    serde_json::to_writer_pretty(&mut out, value)?;
    writeln!(out)?;
    Ok(())
}

fn demo(kind: ExperimentKind, count: usize, seed: u64) -> Result<()> {
    let config = ProtocolConfig { seed, ..ProtocolConfig::default() };
    match run_experiment(&ExperimentSpec::new(kind, vec![count as f64], 1, config))? {
        ExperimentOutput::Json(v) => print_json(&v),
        ExperimentOutput::Table(_) => unreachable!("demos produce JSON"),
    }
}

fn main() -> Result<()> {
    match Cli::parse().command {
        Command::Run { protocol, transcript } => {
            let config = protocol.config()?;
            let mut eve = EveStrategy::new(protocol.eve)?;
            let result = if protocol.pm {
                qkdsim::run_bb84_pm(&config, &mut eve)?
            } else {
                qkdsim::run_protocol(&config, &mut eve)?
            };
            if let Some(path) = transcript {
                let file = File::create(&path).with_context(|| format!("creating {}", path.display()))?;
                let mut w = BufWriter::new(file);
                result.transcript.write_jsonl(&mut w)?;
                w.flush()?;
            }
            print_json(&result.to_json())
        }
        Command::Sweep { kind, grid, reps, out, protocol } => {
            let kind: ExperimentKind = kind.parse()?;
            if !kind.is_sweep() {
                bail!("`{}` is not a sweep; use its own subcommand", kind.name());
            }
            let rows = match run_experiment(&protocol.spec(kind, grid, reps)?)? {
                ExperimentOutput::Table(rows) => rows,
                ExperimentOutput::Json(_) => unreachable!("sweeps produce tables"),
            };
            match out {
                Some(path) => {
                    let file = File::create(&path).with_context(|| format!("creating {}", path.display()))?;
                    write_csv(&rows, BufWriter::new(file))?;
                }
                None => write_csv(&rows, io::stdout().lock())?,
            }
            Ok(())
        }
        Command::TeleportDemo { trials, seed } => demo(ExperimentKind::TeleportDemo, trials, seed),
        Command::CloningDemo { copies, seed } => demo(ExperimentKind::CloningDemo, copies, seed),
        Command::OtpDemo { message, protocol } => {
            let mut spec = protocol.spec(ExperimentKind::OtpDemo, vec![], 1)?;
            spec.message_hex = Some(message);
            match run_experiment(&spec)? {
                ExperimentOutput::Json(v) => print_json(&v),
                ExperimentOutput::Table(_) => unreachable!("demos produce JSON"),
            }
        }
    }
}
