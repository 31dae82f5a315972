use std::ops::ControlFlow;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use qser_core::data::SynthConfig;
use qser_core::embed::{Axis, EmbeddingKind};
use qser_core::measure::MeasurementKind;
use qser_core::qcircuit::{render, CircuitKind, DEFAULT_IMPRIMITIVE_RATIO, DEFAULT_RANDOM_SEED};
use qser_core::qgrad::QuantumLayer;
use qser_core::train::PointStatus;

use qser::config::RunConfig;
use qser::corpus::generate_synthetic;
use qser::pipeline::{collect_wavs, extract_features, load_datasets, run_grid_search, train_and_report};
use qser::Error;

#[derive(Parser)]
#[command(name = "qser", version, about = "Hybrid quantum-classical speech emotion recognition")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Turn WAV files into log-Mel feature files
    Features {
        /// Directory of .wav files or a CSV whose first column lists them
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        mels: Option<usize>,
        /// Run config whose `features` section is used
        #[arg(long)]
        config: Option<PathBuf>,
    },
    /// Write a synthetic corpus and its manifest
    Synth {
        #[arg(long, value_parser = ["2", "4"])]
        classes: String,
        #[arg(long)]
        per_class: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
        /// Signal-to-noise ratio in dB; `inf` for no noise
        #[arg(long, default_value_t = 10.0)]
        snr: f64,
        #[arg(long, default_value_t = 128)]
        mels: usize,
    },
    /// Train one model and evaluate it on the test split
    Train {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        manifest: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Run the hyperparameter grid
    Grid {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        manifest: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = 1)]
        workers: usize,
    },
    /// Print the gates of a trainable circuit
    Inspect {
        #[arg(long, value_enum, default_value_t = EmbeddingArg::Angle)]
        embedding: EmbeddingArg,
        #[arg(long, value_enum)]
        circuit: CircuitArg,
        #[arg(long, default_value_t = 1)]
        layers: usize,
        #[arg(long, default_value_t = 4)]
        qubits: usize,
        /// CNOT probability per slot (random layers)
        #[arg(long, default_value_t = DEFAULT_IMPRIMITIVE_RATIO)]
        ratio: f64,
        /// Construction seed (random layers)
        #[arg(long, default_value_t = DEFAULT_RANDOM_SEED)]
        seed: u64,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum EmbeddingArg {
    Angle,
    Amplitude,
    Iqp,
}

#[derive(Clone, Copy, ValueEnum)]
enum CircuitArg {
    StronglyEntangling,
    RandomLayers,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

fn config_error(field: &str, message: impl Into<String>) -> Error {
    Error::Config { field: field.into(), message: message.into() }
}

fn run(command: Command) -> qser::Result<u8> {
    match command {
        Command::Features { input, out, mels, config } => {
            let mut mel = match config {
                Some(path) => RunConfig::load(&path)?.features,
                None => Default::default(),
            };
            if let Some(n) = mels {
                mel.n_mels = n;
            }
            let inputs = collect_wavs(&input)?;
            let report = extract_features(&inputs, &out, &mel)?;
            for (path, err) in &report.failures {
                eprintln!("failed: {}: {err}", path.display());
            }
            println!("{} file(s) written, {} failed", report.written.len(), report.failures.len());
            Ok(if report.failures.is_empty() { 0 } else { 1 })
        }
        Command::Synth { classes, per_class, seed, out, snr, mels } => {
            let config = SynthConfig {
                n_per_class: per_class,
                n_classes: classes.parse().expect("validated by clap"),
                seed,
                snr_db: snr,
                n_mels: mels,
                ..SynthConfig::default()
            };
            config.validate()?;
            let manifest = generate_synthetic(&config, &out)?;
            println!("{} example(s) written; manifest {}", per_class * config.n_classes, manifest.display());
            Ok(0)
        }
        Command::Train { config, manifest, out } => {
            let config = RunConfig::load(&config)?;
            let data = load_datasets(&config, &manifest)?;
            let (_, report) = train_and_report(&config.train, &config, &data, &out, |r| {
                let val = r.val_uar.map(|u| format!("{u:.4}")).unwrap_or_else(|| "-".into());
                eprintln!("epoch {:>3}  loss {:.6}  val_uar {val}", r.epoch, r.train_loss);
                ControlFlow::Continue(())
            })?;
            match &report.test {
                Some(t) => println!("test UAR {:.4}", t.uar),
                None => println!("test UAR n/a (empty test split)"),
            }
            println!("trainable_params {}", report.trainable_params);
            Ok(0)
        }
        Command::Grid { config, manifest, out, workers } => {
            if workers == 0 {
                return Err(config_error("--workers", "must be >= 1"));
            }
            let config = RunConfig::load(&config)?;
            let data = load_datasets(&config, &manifest)?;
            let total = config.grid.space.len();
            let (results, best) = run_grid_search(&config, &data, &out, workers, |r| {
                let uar = r.val_uar.map(|u| format!("{u:.4}")).unwrap_or_else(|| "failed".into());
                eprintln!("point {}/{total}: {uar}", r.point.index + 1);
            })?;
            let failed = results.iter().filter(|r| r.status != PointStatus::Ok).count();
            if let Some(top) = results.first().filter(|r| r.val_uar.is_some()) {
                println!("best point {} val UAR {:.4} ({} params)", top.point.index, top.val_uar.unwrap(), top.params);
            }
            if let Some(report) = best {
                if let Some(t) = report.test {
                    println!("best retrained: test UAR {:.4}", t.uar);
                }
            }
            println!("{} point(s), {failed} failed", results.len());
            Ok(0)
        }
        Command::Inspect { embedding, circuit, layers, qubits, ratio, seed } => {
            let embedding = match embedding {
                EmbeddingArg::Angle => EmbeddingKind::Angle { axis: Axis::X },
                EmbeddingArg::Amplitude => EmbeddingKind::Amplitude,
                EmbeddingArg::Iqp => EmbeddingKind::iqp(),
            };
            let circuit = match circuit {
                CircuitArg::StronglyEntangling => CircuitKind::StronglyEntangling { layers },
                CircuitArg::RandomLayers => {
                    CircuitKind::RandomLayers { layers, rots_per_layer: None, seed, imprimitive_ratio: ratio }
                }
            };
            let invalid = |e: qser_core::Error| config_error("inspect", e.to_string());
            let spec = circuit.build(qubits).map_err(invalid)?;
            let layer = QuantumLayer::with_circuit(embedding, spec, MeasurementKind::PauliZ).map_err(invalid)?;
            println!("# {} embedding, {} input(s)", embedding.name(), layer.input_width());
            print!("{}", render(layer.circuit()));
            Ok(0)
        }
    }
}
