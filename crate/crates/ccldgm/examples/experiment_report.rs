//! Drive a multi-instance experiment from a TOML config and emit the
//! aggregated report as CSV and JSON, as the CLI does.
//!
//! Run with: cargo run --release --example experiment_report

use ccldgm::harness::{run_experiment, ExperimentConfig, ExperimentReport};

const CONFIG: &str = r#"
instances = 6
base_seed = 1234
workers = 1

[spec]
gen_degree = 3
bit_degree = 6
gens_per_position = 200
positions = 6
width = 2

[params]
beta = 2.0
epsilon = 0.01
alpha = 4.25
t_max = 10
"#;

fn main() {
    let config = ExperimentConfig::from_toml_str(CONFIG).unwrap();
    let report = run_experiment(&config).unwrap();

    println!("{}", ExperimentReport::SUMMARY_HEADER);
    println!("{}", report.summary_csv_row());
    println!();
    println!(
        "mean {:.4} +- {:.4} (standard error), saturated {:?}",
        report.mean_distortion, report.std_error, report.saturated_distortion
    );
    println!("per-instance distortions:");
    for record in &report.records {
        println!(
            "  instance {}: D={:.4}, {} rounds, {} sweeps, {:.2}s",
            record.instance,
            record.distortion,
            record.rounds,
            record.total_sweeps,
            record.wall_time_secs
        );
    }

    // the JSON form feeds plotting scripts
    let json = report.to_json().unwrap();
    println!("\nJSON report: {} bytes (first line: {})", json.len(), json.lines().next().unwrap());
}
