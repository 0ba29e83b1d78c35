//! The BP guided-decimation encoder: BP rounds interleaved with hard fixing
//! of the most biased code-bit, with seeded random decimation when no bias
//! exists yet.
//!
//! Sign convention: the check-to-bit message parametrizes the expectation of
//! `(-1)^{u}`, so a positive bias means the incoming fields favor `u_i = 0`
//! and a negative bias favors `u_i = 1`. Fixing follows the favored value.

use std::io::Write;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::bp::{BPParams, MessageState, StopCondition};
use crate::codec::{IndexWord, SourceWord};
use crate::ensemble::{EnsembleSpec, FactorGraph};
use crate::error::{Error, Result};

/// How a decimation target is chosen when no bias separates the code-bits.
#[derive(Debug, Clone, Copy, serde::Serialize, serde::Deserialize)]
pub struct DecimationPolicy {
    /// Inclusive position interval for zero-bias random decimation: the
    /// integers inside `[(L-w)/2, (L+w)/2]`.
    pub seed_lo: usize,
    pub seed_hi: usize,
    /// Biases below this magnitude are treated as zero.
    pub zero_threshold: f64,
}

impl DecimationPolicy {
    /// Seed window centered on the ring, as used for coupled chains. For
    /// `L = 1` the window is the single position, so zero-bias decimation
    /// draws from the whole graph.
    pub fn for_spec(spec: &EnsembleSpec) -> Self {
        Self::centered(spec.positions, spec.width)
    }

    /// Window for a graph, using its sampled width or the whole ring for
    /// hand-built graphs.
    pub fn for_graph(graph: &FactorGraph) -> Self {
        let w = graph.spec().map_or(1, |s| s.width);
        Self::centered(graph.num_positions(), w)
    }

    fn centered(positions: usize, width: usize) -> Self {
        DecimationPolicy {
            seed_lo: (positions - width).div_ceil(2),
            seed_hi: ((positions + width) / 2).min(positions - 1),
            zero_threshold: 1e-9,
        }
    }

    pub fn contains(&self, position: usize) -> bool {
        position >= self.seed_lo && position <= self.seed_hi
    }
}

/// Condition histogram over decimation rounds.
#[derive(Debug, Clone, Copy, Default, serde::Serialize, serde::Deserialize)]
pub struct ConditionCounts {
    pub converged: u64,
    pub bias_exceeded: u64,
    pub budget_exhausted: u64,
}

impl ConditionCounts {
    fn record(&mut self, cond: StopCondition) {
        match cond {
            StopCondition::MessagesConverged => self.converged += 1,
            StopCondition::BiasExceeded => self.bias_exceeded += 1,
            StopCondition::BudgetExhausted => self.budget_exhausted += 1,
        }
    }
}

/// Output of one encoding run.
#[derive(Debug, Clone)]
pub struct EncodingResult {
    /// The complete index word.
    pub index_word: IndexWord,
    /// Ledger distortion, equal to `distortion(x, reconstruct(u))` exactly.
    pub total_distortion: f64,
    /// Per-position distortion `D_z`.
    pub profile: Vec<f64>,
    pub rounds: u64,
    pub conditions: ConditionCounts,
    pub total_sweeps: u64,
    pub wall_time: std::time::Duration,
}

/// Outcome of removing one code-bit from the working graph.
#[derive(Debug)]
pub struct DecimationEffect {
    /// Generators whose degree changed.
    pub touched: Vec<u32>,
    /// Generators that reached degree 0, with their frozen residual bit.
    pub exhausted: Vec<(u32, u8)>,
}

/// Fold `u_i` into the residuals of the neighbors of `i` (one XOR per edge,
/// parallel edges cancelling) and remove `i` from the graph. Generators that
/// reach degree 0 have their residual frozen into the returned effect.
pub fn apply_decimation(graph: &mut FactorGraph, i: usize, u_i: u8) -> Result<DecimationEffect> {
    if u_i > 1 {
        return Err(Error::Usage("decimation value must be 0 or 1".into()));
    }
    if !graph.bit_is_alive(i) {
        return Err(Error::Usage(format!("code-bit {i} is already decimated")));
    }
    if u_i == 1 {
        let edges: Vec<u32> = graph.bit_edges(i).to_vec();
        for e in edges {
            let (a, _) = graph.edge_endpoints(e);
            graph.flip_residual(a as usize);
        }
    }
    let touched = graph.remove_code_bit(i)?;
    let exhausted = touched
        .iter()
        .filter(|&&a| graph.gen_is_exhausted(a as usize))
        .map(|&a| (a, graph.residual(a as usize)))
        .collect();
    Ok(DecimationEffect { touched, exhausted })
}

/// Pick the code-bit to fix and its value from the biases at the current
/// messages. With all biases at zero, a uniform code-bit from the seed
/// window is fixed to a fair coin; otherwise a uniform member of the argmax
/// set is fixed to the value its own bias favors.
pub fn select_and_fix(
    graph: &FactorGraph,
    state: &MessageState,
    policy: &DecimationPolicy,
    rng: &mut ChaCha8Rng,
) -> Result<(usize, u8)> {
    let alive = graph.alive_bits();
    if alive.is_empty() {
        return Err(Error::Usage("no alive code-bits left".into()));
    }
    let max_bias = state.max_abs_bias(graph);
    if max_bias <= policy.zero_threshold {
        let mut in_window: Vec<u32> = alive
            .iter()
            .copied()
            .filter(|&i| policy.contains(graph.bit_position(i as usize)))
            .collect();
        if in_window.is_empty() {
            // seed window fully decimated; fall back to the whole graph
            in_window = alive.to_vec();
        }
        let i = in_window[rng.random_range(0..in_window.len())] as usize;
        let value = rng.random_range(0..2u8);
        Ok((i, value))
    } else {
        let ties: Vec<u32> = alive
            .iter()
            .copied()
            .filter(|&i| state.bias_of(i as usize).abs() == max_bias)
            .collect();
        let i = ties[rng.random_range(0..ties.len())] as usize;
        let value = if state.bias_of(i) > 0.0 { 0 } else { 1 };
        Ok((i, value))
    }
}

/// Run the full guided-decimation encoder on a fresh graph and source word.
///
/// Messages are carried over between decimation rounds; only the iteration
/// budget resets. The optional trace receives one CSV line
/// `round,t1,condition,delta,max_bias` per round.
pub fn encode(
    graph: &FactorGraph,
    x: &SourceWord,
    params: &BPParams,
    policy: &DecimationPolicy,
    algo_seed: u64,
    mut trace: Option<&mut dyn Write>,
) -> Result<EncodingResult> {
    params.validate()?;
    if x.len() != graph.num_gens() {
        return Err(Error::Usage(format!(
            "source length {} does not match generator count {}",
            x.len(),
            graph.num_gens()
        )));
    }
    if graph.alive_bits().len() != graph.num_bits() {
        return Err(Error::Usage("encode requires a fresh (undecimated) graph".into()));
    }
    let start = Instant::now();
    let mut work = graph.clone();
    work.set_residuals(x.bits())?;
    let mut rng = ChaCha8Rng::seed_from_u64(algo_seed);
    let mut state = MessageState::new(&work, params.beta);
    let mut u = IndexWord::unset(work.num_bits());
    let mut frozen = vec![0u64; work.num_positions()];
    let mut conditions = ConditionCounts::default();
    let mut rounds = 0u64;

    if let Some(t) = trace.as_deref_mut() {
        writeln!(t, "round,t1,condition,delta,max_bias")?;
    }

    while !work.alive_bits().is_empty() {
        let (t1, cond) = state.run_until_decimation_condition(&work, params);
        conditions.record(cond);
        let (i, value) = select_and_fix(&work, &state, policy, &mut rng)?;
        if let Some(t) = trace.as_deref_mut() {
            writeln!(
                t,
                "{},{},{},{:.6e},{:.6e}",
                rounds,
                t1,
                cond.label(),
                state.last_delta(),
                state.max_abs_bias(&work)
            )?;
        }
        let effect = apply_decimation(&mut work, i, value)?;
        u.set(i, value)?;
        for &a in &effect.touched {
            state.mark_gen_dirty(a as usize);
        }
        for &(a, residual) in &effect.exhausted {
            frozen[work.gen_position(a as usize)] += residual as u64;
        }
        rounds += 1;
    }

    let n = work.gens_per_position() as f64;
    let profile: Vec<f64> = frozen.iter().map(|&c| c as f64 / n).collect();
    let total = frozen.iter().sum::<u64>() as f64 / work.num_gens() as f64;
    Ok(EncodingResult {
        index_word: u,
        total_distortion: total,
        profile,
        rounds,
        conditions,
        total_sweeps: state.total_sweeps(),
        wall_time: start.elapsed(),
    })
}
