//! Sweep the inverse temperature for a small coupled chain and its uncoupled
//! counterpart of the same total size, with paired instances per grid point.
//!
//! Run with: cargo run --release --example beta_sweep

use ccldgm::bp::BPParams;
use ccldgm::ensemble::EnsembleSpec;
use ccldgm::harness::{sweep_beta, ExperimentConfig};

fn main() {
    let betas = [1.0, 1.5, 2.0, 2.5, 3.0];
    let instances = 4;

    let coupled = ExperimentConfig {
        spec: EnsembleSpec::new(3, 6, 250, 8, 2).unwrap(),
        params: BPParams::default(),
        instances,
        base_seed: 31,
        workers: None,
    };
    let uncoupled = ExperimentConfig {
        spec: EnsembleSpec::new(3, 6, 2000, 1, 1).unwrap(),
        ..coupled.clone()
    };

    let coupled_reports = sweep_beta(&coupled, &betas).unwrap();
    let uncoupled_reports = sweep_beta(&uncoupled, &betas).unwrap();

    println!("beta,coupled_D,uncoupled_D");
    for (c, u) in coupled_reports.iter().zip(&uncoupled_reports) {
        println!(
            "{},{:.4},{:.4}",
            c.params.beta, c.mean_distortion, u.mean_distortion
        );
    }

    let best = uncoupled_reports
        .iter()
        .min_by(|a, b| a.mean_distortion.total_cmp(&b.mean_distortion))
        .unwrap();
    println!(
        "uncoupled optimum: beta={} with D={:.4}",
        best.params.beta, best.mean_distortion
    );
}
