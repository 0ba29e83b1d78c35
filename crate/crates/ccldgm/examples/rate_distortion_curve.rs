//! Tabulate the Shannon rate-distortion bound for the symmetric Bernoulli
//! source, together with the matching test-channel inverse temperature.
//!
//! Run with: cargo run --example rate_distortion_curve

use ccldgm::metrics::{beta_from_bsc, binary_entropy, rd_bound};

fn main() {
    println!("rate,D_sh,beta_of_D");
    for k in 1..20 {
        let rate = k as f64 / 20.0;
        let d = rd_bound(rate).unwrap();
        let beta = beta_from_bsc(d).unwrap();
        println!("{rate:.2},{d:.6},{beta:.4}");
        // h(D_sh) = 1 - R by construction
        assert!((binary_entropy(d) - (1.0 - rate)).abs() < 1e-8);
    }
}
