//! Exhaustive-enumeration ground truth for tiny instances: exact minimum
//! distortion, partition function and Gibbs marginals. Serves as the
//! independent oracle for BP (tree exactness) and as the lower bound for the
//! guided-decimation encoder.

use crate::codec::SourceWord;
use crate::ensemble::FactorGraph;
use crate::error::{Error, Result};

/// Hard cap on the number of code-bits we are willing to enumerate (2^24
/// index words).
pub const ENUMERATION_CAP: usize = 24;

/// Exact quantities of the Gibbs measure `mu(u) ∝ exp(-beta * d_H(x, x̂(u)))`
/// over all index words of one instance.
#[derive(Debug, Clone)]
pub struct GibbsSummary {
    /// Natural log of the partition function at the given beta.
    pub log_z: f64,
    /// Exact probability of value 1 for each code-bit.
    pub marginals: Vec<f64>,
    /// Minimum distortion fraction over all index words.
    pub d_min: f64,
    /// Minimum Hamming distance as an integer count.
    pub min_distance: u64,
    /// Number of index words attaining the minimum.
    pub argmin_count: u64,
}

/// Enumerate all `2^m` index words of a small instance.
///
/// The reconstruction of each generator is folded into a parity mask over
/// the code-bits, so parallel edges cancel exactly as in
/// [`crate::codec::reconstruct`].
// `!(beta >= 0.0)` rather than `beta < 0.0` so that NaN is rejected too.
#[allow(clippy::neg_cmp_op_on_partial_ord)]
pub fn brute_force(graph: &FactorGraph, x: &SourceWord, beta: f64) -> Result<GibbsSummary> {
    let bits = graph.num_bits();
    if bits > ENUMERATION_CAP {
        return Err(Error::Capacity {
            bits,
            cap: ENUMERATION_CAP,
        });
    }
    if x.len() != graph.num_gens() {
        return Err(Error::Usage("source length mismatch".into()));
    }
    if !(beta >= 0.0) {
        return Err(Error::InvalidParameter("beta must be >= 0".into()));
    }

    let masks: Vec<u32> = (0..graph.num_gens())
        .map(|a| {
            let mut mask = 0u32;
            for &e in graph.gen_edges(a) {
                mask ^= 1 << graph.edge_endpoints(e).1;
            }
            mask
        })
        .collect();
    let x_bits: Vec<u8> = (0..graph.num_gens()).map(|a| x.bit(a)).collect();

    let words = 1u64 << bits;
    let mut distances: Vec<u16> = Vec::with_capacity(words as usize);
    let mut min_distance = u64::MAX;
    let mut argmin_count = 0u64;
    for u in 0..words {
        let mut d = 0u16;
        for (mask, &xa) in masks.iter().zip(&x_bits) {
            let parity = ((u as u32 & mask).count_ones() & 1) as u8;
            d += (parity != xa) as u16;
        }
        distances.push(d);
        match (d as u64).cmp(&min_distance) {
            std::cmp::Ordering::Less => {
                min_distance = d as u64;
                argmin_count = 1;
            }
            std::cmp::Ordering::Equal => argmin_count += 1,
            std::cmp::Ordering::Greater => {}
        }
    }

    // log-domain accumulation relative to the ground state
    let mut z_scaled = 0.0f64;
    let mut one_mass = vec![0.0f64; bits];
    for (u, &d) in distances.iter().enumerate() {
        let w = (-beta * (d as u64 - min_distance) as f64).exp();
        z_scaled += w;
        let mut rem = u;
        while rem != 0 {
            let i = rem.trailing_zeros() as usize;
            one_mass[i] += w;
            rem &= rem - 1;
        }
    }
    let log_z = -beta * min_distance as f64 + z_scaled.ln();
    let marginals = one_mass.iter().map(|m| m / z_scaled).collect();

    Ok(GibbsSummary {
        log_z,
        marginals,
        d_min: min_distance as f64 / graph.num_gens() as f64,
        min_distance,
        argmin_count,
    })
}

/// Exact per-bit marginals of a tree instance, by enumeration (not BP), so
/// it can serve as BP's independent oracle.
pub fn exact_marginals_tree(graph: &FactorGraph, x: &SourceWord, beta: f64) -> Result<Vec<f64>> {
    Ok(brute_force(graph, x, beta)?.marginals)
}
