//! `beamtrain` command-line driver.
//!
//! Exit codes: 0 success, 1 configuration error, 2 I/O error.

mod settings;

use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use beamtrain::simulate::{emit_json, format_summary, write_csv};
use beamtrain::{
    emit_csv, emit_timing_table, run_sweep, sample_channel_with, score_trial, ArrayConfig, Error, QuantizerSpec,
    Resolution, SweepResult, Trainer,
};
use clap::{Parser, Subcommand};

use settings::{AxisPair, Gains, Precision, SweepArgs};

#[derive(Debug, Parser)]
#[command(
    name = "beamtrain",
    version,
    about = "Two-phase mmWave beam training simulator with low-resolution ADCs"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Monte Carlo success-rate sweep written as CSV.
    Sweep(SweepArgs),
    /// Training-time comparison in slots.
    Timing {
        /// Path counts L for the proposed method. Repeatable.
        #[arg(long, default_values_t = [2usize])]
        paths: Vec<usize>,
        /// Sectors per stage K of the adaptive baseline.
        #[arg(long, default_value_t = 2)]
        sectors: u64,
        /// Transmit grid size G_t searched by the baseline.
        #[arg(long, default_value_t = 32)]
        gt: u64,
    },
    /// One verbose training run.
    Demo {
        #[arg(long, default_value_t = 2)]
        paths: usize,
        #[arg(long, default_value = "1", value_parser = |s: &str| s.parse::<Resolution>().map_err(|e| e.to_string()))]
        bits: Resolution,
        #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
        snr: f64,
        #[arg(long, default_value = "16")]
        grid: AxisPair,
        #[arg(long, default_value = "16")]
        array: AxisPair,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, value_enum, default_value_t = Gains::UnitModulus)]
        gains: Gains,
    },
}

fn exit_code(err: &Error) -> u8 {
    match err {
        Error::Io { .. } => 2,
        _ => 1,
    }
}

fn json_path(csv: &std::path::Path) -> PathBuf {
    csv.with_extension("json")
}

fn sweep(args: SweepArgs) -> beamtrain::Result<()> {
    let plan = args.resolve()?;
    let result: SweepResult = match plan.precision {
        Precision::F64 => run_sweep::<f64>(&plan.config)?,
        Precision::F32 => run_sweep::<f32>(&plan.config)?,
    };
    match &plan.out {
        Some(path) => {
            emit_csv(&result, path)?;
            if plan.json {
                emit_json(&result, json_path(path))?;
            }
            eprint!("{}", format_summary(&result));
        }
        None => {
            let stdout = io::stdout();
            write_csv(&result, stdout.lock()).map_err(|e| Error::io("<stdout>", e))?;
        }
    }
    Ok(())
}

fn demo(
    paths: usize,
    bits: Resolution,
    snr: f64,
    grid: AxisPair,
    array: AxisPair,
    seed: u64,
    gains: Gains,
) -> beamtrain::Result<()> {
    let cfg = ArrayConfig::new(array.0, array.1, grid.0, grid.1)?;
    let ch = sample_channel_with::<f64>(paths, &cfg, &cfg, gains.into(), seed)?;
    let trainer = Trainer::<f64>::new(&cfg, &cfg)?;
    let out = trainer.run(&ch, QuantizerSpec::new(bits), snr, seed)?;

    let mut s = String::new();
    use std::fmt::Write as _;
    let _ = writeln!(
        s,
        "array {array}, grid {grid}, L={paths}, bits={bits}, snr={snr} dB, seed={seed}"
    );
    let _ = writeln!(s, "channel paths (aoa -> aod, |gain|):");
    for p in ch.paths() {
        let _ = writeln!(s, "  {} -> {}  {:.3}", p.aoa, p.aod, p.gain.norm());
    }
    let join = |v: &[beamtrain::GridPoint]| v.iter().map(ToString::to_string).collect::<Vec<_>>().join(" ");
    let _ = writeln!(s, "S_AoA: {}", join(&out.s_aoa));
    let _ = writeln!(s, "S_AoD: {}", join(&out.s_aod));
    let _ = writeln!(s, "pairs:");
    for p in &out.pairs {
        let (az, el) = trainer.rx_dictionary().angles(p.aoa);
        let _ = writeln!(s, "  rx {} ({az:.4}, {el:.4} rad) <-> tx {}", p.aoa, p.aod);
    }
    let _ = writeln!(s, "slots used: {}", out.slots_used);
    if out.diagnostics.zero_rails > 0 || out.diagnostics.rank_deficient {
        let _ = writeln!(s, "diagnostics: {:?}", out.diagnostics);
    }
    let _ = writeln!(s, "all pairs recovered: {}", score_trial(&out, &ch));
    io::stdout()
        .write_all(s.as_bytes())
        .map_err(|e| Error::io("<stdout>", e))
}

fn run(cli: Cli) -> beamtrain::Result<()> {
    match cli.command {
        Command::Sweep(args) => sweep(args),
        Command::Timing { paths, sectors, gt } => {
            let table = emit_timing_table(&paths, sectors, gt)?;
            io::stdout()
                .write_all(table.as_bytes())
                .map_err(|e| Error::io("<stdout>", e))
        }
        Command::Demo {
            paths,
            bits,
            snr,
            grid,
            array,
            seed,
            gains,
        } => demo(paths, bits, snr, grid, array, seed, gains),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
