use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Parser, Subcommand};
use pqc_core::harness::{heatmap_from_means, heatmap_on_grid, read_records_csv, write_outputs, Metadata};
use pqc_core::metrics::expressibility::{DEFAULT_BINS, DEFAULT_PAIRS};
use pqc_core::metrics::trainability::DEFAULT_GRAD_SAMPLES;
use pqc_core::{
    build_ansatz, expressibility_kl, gradient_variance, heavy_hex_map, load_target, run_sweep,
    transpile, AnsatzFamily, Circuit, ExpressibilityConfig, HeatmapMetric, SweepConfig, Target,
    TrainabilityConfig, TranspileOptions,
};
use serde::Serialize;

#[derive(Parser)]
#[command(name = "pqc", version, about = "Ansatz construction, transpilation and expressibility/trainability analysis")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write an ansatz circuit as JSON.
    Build {
        #[arg(long)]
        family: AnsatzFamily,
        #[arg(long, short)]
        n: usize,
        /// Repetitions L.
        #[arg(long, short = 'l')]
        reps: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Write a heavy-hex target as JSON.
    Target {
        #[arg(long, default_value_t = 5)]
        distance: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Transpile a circuit; writes the circuit to `--out` and its wire
    /// bookkeeping to a `.layout.json` sidecar next to it.
    Transpile {
        #[arg(long)]
        circuit: PathBuf,
        /// Target JSON; the bundled 65-qubit heavy-hex map when omitted.
        #[arg(long)]
        target: Option<PathBuf>,
        #[arg(long, default_value_t = 1)]
        opt_level: u8,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Fidelity-histogram KL divergence from Haar.
    Expressibility {
        #[arg(long)]
        circuit: PathBuf,
        #[arg(long, default_value_t = DEFAULT_PAIRS)]
        pairs: usize,
        #[arg(long, default_value_t = DEFAULT_BINS)]
        bins: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Haar reference width; the circuit width when omitted.
        #[arg(long)]
        haar_qubits: Option<usize>,
    },
    /// Mean parameter-shift gradient variance of ⟨Z_wire⟩.
    Trainability {
        #[arg(long)]
        circuit: PathBuf,
        #[arg(long, default_value_t = DEFAULT_GRAD_SAMPLES)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 0)]
        wire: usize,
    },
    /// Run a sweep grid from a JSON config.
    Sweep {
        #[arg(long)]
        config: PathBuf,
        /// Output directory; overrides the config's `output_dir`.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Print one heatmap of per-cell means as CSV.
    Report {
        /// Sweep output directory or records CSV.
        #[arg(long)]
        results: PathBuf,
        #[arg(long)]
        metric: HeatmapMetric,
        #[arg(long)]
        family: AnsatzFamily,
        #[arg(long)]
        opt_level: u8,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Serialize)]
struct LayoutSidecar {
    target: String,
    opt_level: u8,
    seed: u64,
    trial: usize,
    initial_layout: Vec<usize>,
    output_permutation: Vec<usize>,
    compaction_map: Vec<(usize, usize)>,
    active_qubits: usize,
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}

fn run(cli: Cli) -> Result<ExitCode> {
    match cli.command {
        Command::Build { family, n, reps, out } => {
            emit(&build_ansatz(family, n, reps)?.to_json(), out.as_deref())?;
        }
        Command::Target { distance, out } => {
            let t = Target::new(format!("heavy_hex_d{distance}"), heavy_hex_map(distance)?);
            emit(t.to_json().trim_end(), out.as_deref())?;
        }
        Command::Transpile {
            circuit,
            target,
            opt_level,
            seed,
            out,
        } => {
            let c = read_circuit(&circuit)?;
            let target = match target {
                Some(p) => load_target(&p).with_context(|| format!("loading {}", p.display()))?,
                None => Target::default_heavy_hex(),
            };
            let t = transpile(&c, &target, &TranspileOptions::new(opt_level, seed)?)?;
            let sidecar = LayoutSidecar {
                target: target.name().to_string(),
                opt_level,
                seed,
                trial: t.trial,
                initial_layout: t.initial_layout.logical_to_physical().to_vec(),
                output_permutation: t.output_permutation.clone(),
                compaction_map: t.compaction.pairs(),
                active_qubits: t.active_qubit_count(),
            };
            emit(&t.circuit.to_json(), Some(&out))?;
            emit(&serde_json::to_string_pretty(&sidecar)?, Some(&sidecar_path(&out)))?;
        }
        Command::Expressibility {
            circuit,
            pairs,
            bins,
            seed,
            haar_qubits,
        } => {
            let c = read_circuit(&circuit)?;
            let cfg = ExpressibilityConfig {
                n_pairs: pairs,
                bins,
                ..ExpressibilityConfig::new(haar_qubits.unwrap_or(c.num_qubits()), seed)
            };
            let value = expressibility_kl(&c, &cfg)?;
            let report = serde_json::json!({
                "metric": "e_kl",
                "value": value,
                "num_qubits": c.num_qubits(),
                "param_count": c.param_count(),
                "n_pairs": cfg.n_pairs,
                "bins": cfg.bins,
                "epsilon": cfg.epsilon,
                "seed": cfg.seed,
                "haar_dimension_qubits": cfg.haar_dimension_qubits,
                "kl_log_base": "e",
            });
            println!("{}", serde_json::to_string_pretty(&report)?);
        }
        Command::Trainability {
            circuit,
            samples,
            seed,
            wire,
        } => {
            let c = read_circuit(&circuit)?;
            let cfg = TrainabilityConfig {
                n_grad: samples,
                ..TrainabilityConfig::new(seed)
            };
            let value = gradient_variance(&c, &cfg, wire)?;
            let report = serde_json::json!({
                "metric": "gradvar",
                "value": value,
                "num_qubits": c.num_qubits(),
                "param_count": c.param_count(),
                "n_grad": cfg.n_grad,
                "seed": cfg.seed,
                "observable": format!("Z{wire}"),
            });
            println!("{}", serde_json::to_string_pretty(&report)?);
        }
        Command::Sweep { config, out } => return sweep(&config, out),
        Command::Report {
            results,
            metric,
            family,
            opt_level,
            out,
        } => {
            let (csv_path, meta_path) = if results.is_dir() {
                (results.join("records.csv"), Some(results.join("metadata.json")))
            } else {
                (results.clone(), results.parent().map(|d| d.join("metadata.json")))
            };
            let file = std::fs::File::open(&csv_path).with_context(|| format!("opening {}", csv_path.display()))?;
            let (_, means) = read_records_csv(file)?;
            let meta: Option<Metadata> = match meta_path.filter(|p| p.is_file()) {
                Some(p) => Some(serde_json::from_str(&std::fs::read_to_string(&p)?)?),
                None => None,
            };
            let heatmap = match meta {
                Some(m) => heatmap_on_grid(&means, family, opt_level, metric, &m.config.n_values, &m.config.l_values)?,
                None => heatmap_from_means(&means, family, opt_level, metric)?,
            };
            emit(heatmap.to_csv().trim_end(), out.as_deref())?;
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn sweep(config: &Path, out: Option<PathBuf>) -> Result<ExitCode> {
    let mut cfg = SweepConfig::load(config).with_context(|| format!("loading {}", config.display()))?;
    // Paths inside the config are relative to the config file.
    let base = config.parent().unwrap_or(Path::new("."));
    cfg.target = cfg.target.map(|p| base.join(p));
    let dir = match (out, &cfg.output_dir) {
        (Some(dir), _) => dir,
        (None, Some(dir)) => base.join(dir),
        (None, None) => PathBuf::from("results"),
    };
    let result = run_sweep(&cfg)?;
    write_outputs(&result, &dir)?;
    eprintln!(
        "{} records in {} cells written to {} ({:.1}s)",
        result.records.len(),
        result.means.len(),
        dir.display(),
        result.wall_clock_seconds
    );
    if result.is_complete() {
        return Ok(ExitCode::SUCCESS);
    }
    for f in &result.failures {
        eprintln!(
            "failed: {} n={} L={} opt={}: {}",
            f.key.family, f.key.n, f.key.reps, f.key.opt_level, f.reason
        );
    }
    Ok(ExitCode::from(2))
}

fn read_circuit(path: &Path) -> Result<Circuit> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    Circuit::from_json(&text).with_context(|| format!("parsing {}", path.display()))
}

fn sidecar_path(out: &Path) -> PathBuf {
    let stem = out.file_stem().map_or("transpiled".into(), |s| s.to_string_lossy());
    out.with_file_name(format!("{stem}.layout.json"))
}

fn emit(text: &str, out: Option<&Path>) -> Result<()> {
    match out {
        Some(path) => {
            if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
                std::fs::create_dir_all(dir)?;
            }
            std::fs::write(path, format!("{text}\n")).with_context(|| format!("writing {}", path.display()))
        }
        None => {
            println!("{text}");
            Ok(())
        }
    }
}
