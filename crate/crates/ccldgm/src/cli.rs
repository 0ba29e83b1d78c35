//! Command-line front end over the library: sampling, encoding, experiments,
//! beta sweeps, profiles, the rate-distortion bound and enumeration checks.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use crate::bp::BPParams;
use crate::bpgd::{encode, DecimationPolicy};
use crate::codec::SourceWord;
use crate::ensemble::{EnsembleSpec, FactorGraph};
use crate::error::{Error, Result};
use crate::harness::{
    derive_seed, run_experiment, sweep_beta, ExperimentConfig, ExperimentReport, SeedStream,
};
use crate::metrics::{rd_bound, DistortionProfile};
use crate::oracle::brute_force;

#[derive(Debug, Parser)]
#[command(
    name = "ccldgm",
    version,
    about = "Lossy source coding with (coupled) LDGM ensembles and BP guided decimation"
)]
pub struct Cli {
    #[command(subcommand)]
    command: Command,
}

/// Ensemble parameters shared by most subcommands. Defaults give the
/// coupled (3,6) chain at rate 1/2.
#[derive(Debug, Args)]
struct EnsembleArgs {
    /// Generator node degree
    #[arg(long = "l", default_value_t = 3)]
    gen_degree: usize,
    /// Code-bit node degree
    #[arg(long = "r", default_value_t = 6)]
    bit_degree: usize,
    /// Generators per chain position
    #[arg(long = "n", default_value_t = 2000)]
    gens_per_position: usize,
    /// Chain length (1 = uncoupled)
    #[arg(long = "L", default_value_t = 1)]
    positions: usize,
    /// Coupling window width
    #[arg(long = "w", default_value_t = 1)]
    width: usize,
}

impl EnsembleArgs {
    fn spec(&self) -> Result<EnsembleSpec> {
        EnsembleSpec::new(
            self.gen_degree,
            self.bit_degree,
            self.gens_per_position,
            self.positions,
            self.width,
        )
    }
}

/// Message-passing parameters shared by the encoding subcommands.
#[derive(Debug, Args)]
struct BpArgs {
    /// Inverse temperature
    #[arg(long, default_value_t = 2.0)]
    beta: f64,
    /// Convergence threshold on the message change
    #[arg(long, default_value_t = 0.01)]
    epsilon: f64,
    /// Bias cap triggering decimation
    #[arg(long, default_value_t = 4.25)]
    alpha: f64,
    /// Sweep budget per decimation round
    #[arg(long = "t-max", default_value_t = 10)]
    t_max: u32,
}

impl BpArgs {
    fn params(&self) -> BPParams {
        BPParams {
            beta: self.beta,
            epsilon: self.epsilon,
            alpha: self.alpha,
            t_max: self.t_max,
        }
    }
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Sample a factor graph and write its edge list
    Sample {
        #[command(flatten)]
        ensemble: EnsembleArgs,
        /// Graph seed
        #[arg(long)]
        seed: u64,
        /// Output path (stdout when omitted)
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Encode one random source word and report the distortion
    Encode {
        #[command(flatten)]
        ensemble: EnsembleArgs,
        #[command(flatten)]
        bp: BpArgs,
        /// Base seed; graph, source and algorithm streams are derived from it
        #[arg(long)]
        seed: u64,
        /// Write the index word (ASCII bits) here
        #[arg(long)]
        out: Option<PathBuf>,
        /// Write a per-round CSV trace here
        #[arg(long)]
        trace: Option<PathBuf>,
    },
    /// Encode many instances and aggregate distortion statistics
    Experiment {
        /// TOML config file; command-line flags are ignored when given
        #[arg(long, conflicts_with_all = ["seed"])]
        config: Option<PathBuf>,
        #[command(flatten)]
        ensemble: EnsembleArgs,
        #[command(flatten)]
        bp: BpArgs,
        #[arg(long, default_value_t = 20)]
        instances: usize,
        /// Base seed (required unless --config is given)
        #[arg(long)]
        seed: Option<u64>,
        /// Thread count (all cores when omitted)
        #[arg(long)]
        workers: Option<usize>,
        /// Write the full JSON report here
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run the experiment across a beta grid with paired instances
    SweepBeta {
        #[command(flatten)]
        ensemble: EnsembleArgs,
        #[command(flatten)]
        bp: BpArgs,
        /// Comma-separated beta grid
        #[arg(long, default_value = "1.0,1.5,2.0,2.5,3.0,3.5,4.0")]
        betas: String,
        #[arg(long, default_value_t = 20)]
        instances: usize,
        #[arg(long)]
        seed: u64,
        #[arg(long)]
        workers: Option<usize>,
        /// Write the summary CSV here as well as to stdout
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Mean per-position distortion profile of a coupled chain
    Profile {
        #[command(flatten)]
        ensemble: EnsembleArgs,
        #[command(flatten)]
        bp: BpArgs,
        #[arg(long, default_value_t = 10)]
        instances: usize,
        #[arg(long)]
        seed: u64,
        #[arg(long)]
        workers: Option<usize>,
        /// Write the profile CSV here as well as to stdout
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Shannon distortion bound D(R) for the symmetric binary source
    RdBound {
        #[arg(long)]
        rate: f64,
    },
    /// Compare the encoder against exhaustive enumeration on tiny instances
    OracleCheck {
        #[command(flatten)]
        ensemble: EnsembleArgs,
        #[command(flatten)]
        bp: BpArgs,
        #[arg(long, default_value_t = 20)]
        instances: usize,
        #[arg(long)]
        seed: u64,
    },
}

fn open_out(path: &PathBuf) -> Result<BufWriter<File>> {
    Ok(BufWriter::new(File::create(path)?))
}

fn emit(out: &Option<PathBuf>, text: &str) -> Result<()> {
    if let Some(path) = out {
        open_out(path)?.write_all(text.as_bytes())?;
    }
    print!("{text}");
    Ok(())
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Sample { ensemble, seed, out } => {
            let graph = FactorGraph::sample(ensemble.spec()?, seed)?;
            match out {
                Some(path) => graph.write_edge_list(&mut open_out(&path)?)?,
                None => graph.write_edge_list(&mut std::io::stdout().lock())?,
            }
            Ok(())
        }
        Command::Encode {
            ensemble,
            bp,
            seed,
            out,
            trace,
        } => {
            let spec = ensemble.spec()?;
            let graph = FactorGraph::sample(spec, derive_seed(seed, 0, SeedStream::Graph))?;
            let x = SourceWord::sample(
                graph.num_gens(),
                derive_seed(seed, 0, SeedStream::Source),
            )?;
            let policy = DecimationPolicy::for_spec(&spec);
            let mut trace_file = match &trace {
                Some(path) => Some(open_out(path)?),
                None => None,
            };
            let res = encode(
                &graph,
                &x,
                &bp.params(),
                &policy,
                derive_seed(seed, 0, SeedStream::Algo),
                trace_file.as_mut().map(|f| f as &mut dyn Write),
            )?;
            if let Some(path) = out {
                writeln!(open_out(&path)?, "{}", res.index_word.to_ascii())?;
            }
            println!("distortion {:.6}", res.total_distortion);
            println!("rounds {}", res.rounds);
            println!("sweeps {}", res.total_sweeps);
            println!(
                "conditions i={} ii={} iii={}",
                res.conditions.converged,
                res.conditions.bias_exceeded,
                res.conditions.budget_exhausted
            );
            Ok(())
        }
        Command::Experiment {
            config,
            ensemble,
            bp,
            instances,
            seed,
            workers,
            out,
        } => {
            let cfg = match config {
                Some(path) => ExperimentConfig::from_toml_str(&std::fs::read_to_string(path)?)?,
                None => ExperimentConfig {
                    spec: ensemble.spec()?,
                    params: bp.params(),
                    instances,
                    base_seed: seed.ok_or_else(|| {
                        Error::Usage("--seed is required without --config".into())
                    })?,
                    workers,
                },
            };
            let report = run_experiment(&cfg)?;
            println!("{}", ExperimentReport::SUMMARY_HEADER);
            println!("{}", report.summary_csv_row());
            if let Some(path) = out {
                write!(open_out(&path)?, "{}", report.to_json()?)?;
            }
            Ok(())
        }
        Command::SweepBeta {
            ensemble,
            bp,
            betas,
            instances,
            seed,
            workers,
            out,
        } => {
            let grid = parse_betas(&betas)?;
            let cfg = ExperimentConfig {
                spec: ensemble.spec()?,
                params: bp.params(),
                instances,
                base_seed: seed,
                workers,
            };
            let reports = sweep_beta(&cfg, &grid)?;
            let mut text = format!("{}\n", ExperimentReport::SUMMARY_HEADER);
            for r in &reports {
                text.push_str(&r.summary_csv_row());
                text.push('\n');
            }
            emit(&out, &text)
        }
        Command::Profile {
            ensemble,
            bp,
            instances,
            seed,
            workers,
            out,
        } => {
            let spec = ensemble.spec()?;
            let cfg = ExperimentConfig {
                spec,
                params: bp.params(),
                instances,
                base_seed: seed,
                workers,
            };
            let report = run_experiment(&cfg)?;
            let profile = DistortionProfile::new(report.mean_profile.clone(), spec.width)?;
            emit(&out, &profile.to_csv())
        }
        Command::RdBound { rate } => {
            println!("{:.4}", rd_bound(rate)?);
            Ok(())
        }
        Command::OracleCheck {
            ensemble,
            bp,
            instances,
            seed,
        } => {
            let spec = ensemble.spec()?;
            let params = bp.params();
            let policy = DecimationPolicy::for_spec(&spec);
            println!("instance,d_min,d_bpgd,gap");
            let mut worst = 0.0f64;
            let mut ties = 0usize;
            for k in 0..instances as u64 {
                let graph =
                    FactorGraph::sample(spec, derive_seed(seed, k, SeedStream::Graph))?;
                let x = SourceWord::sample(
                    graph.num_gens(),
                    derive_seed(seed, k, SeedStream::Source),
                )?;
                let exact = brute_force(&graph, &x, params.beta)?;
                let res = encode(
                    &graph,
                    &x,
                    &params,
                    &policy,
                    derive_seed(seed, k, SeedStream::Algo),
                    None,
                )?;
                let gap = res.total_distortion - exact.d_min;
                if gap < -1e-12 {
                    return Err(Error::Usage(format!(
                        "instance {k}: encoder beat the exhaustive minimum ({} < {})",
                        res.total_distortion, exact.d_min
                    )));
                }
                if gap.abs() <= 1e-12 {
                    ties += 1;
                }
                worst = worst.max(gap);
                println!(
                    "{k},{:.6},{:.6},{:.6}",
                    exact.d_min, res.total_distortion, gap
                );
            }
            println!("optimal {ties}/{instances}, worst gap {worst:.6}");
            Ok(())
        }
    }
}

fn parse_betas(text: &str) -> Result<Vec<f64>> {
    text.split(',')
        .map(|s| {
            s.trim()
                .parse::<f64>()
                .map_err(|_| Error::Usage(format!("invalid beta value {s:?}")))
        })
        .collect()
}

/// Parse the process arguments, run, and return the process exit code:
/// 0 on success, 1 for validation/usage problems, 2 for runtime failures.
pub fn main() -> i32 {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // help and version requests print to stdout and succeed
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match run(cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn beta_grid_parsing() {
        assert_eq!(parse_betas("1.0, 2.5,4").unwrap(), vec![1.0, 2.5, 4.0]);
        assert!(parse_betas("1.0,x").is_err());
    }

    #[test]
    fn cli_structure_is_valid() {
        use clap::CommandFactory;
        Cli::command().debug_assert();
    }

    #[test]
    fn ensemble_args_build_spec() {
        let cli = Cli::try_parse_from([
            "ccldgm", "sample", "--l", "3", "--r", "6", "--n", "10", "--L", "4", "--w", "2",
            "--seed", "1",
        ])
        .unwrap();
        match cli.command {
            Command::Sample { ensemble, seed, .. } => {
                let spec = ensemble.spec().unwrap();
                assert_eq!(spec.positions, 4);
                assert_eq!(spec.width, 2);
                assert_eq!(seed, 1);
            }
            _ => panic!("wrong subcommand"),
        }
    }

    #[test]
    fn seed_is_required_for_sampling() {
        assert!(Cli::try_parse_from(["ccldgm", "sample"]).is_err());
        assert!(Cli::try_parse_from(["ccldgm", "rd-bound", "--rate", "0.5"]).is_ok());
    }
}
