//! Belief-propagation message passing on the (possibly decimated) factor
//! graph.
//!
//! Messages live on edges: `eta` flows code-bit -> generator, `eta_hat`
//! generator -> code-bit. A sweep is one synchronous flooding iteration: all
//! `eta_hat` are recomputed from the previous iteration's `eta`, then all
//! `eta` from the new `eta_hat`. The sweep skips nodes whose inputs changed
//! by at most a small truncation tolerance since the previous iteration
//! (see [`DEFAULT_DIRTY_TOL`]); at tolerance zero it is an exact flooding
//! sweep.

use crate::ensemble::{FactorGraph, MAX_GEN_DEGREE};
use crate::error::{Error, Result};

/// Knobs of the message-passing stage of the encoder.
#[derive(Debug, Clone, Copy, serde::Serialize, serde::Deserialize)]
pub struct BPParams {
    /// Inverse temperature `beta > 0`.
    pub beta: f64,
    /// Convergence threshold on the normalized message change.
    pub epsilon: f64,
    /// Bias cap triggering decimation.
    pub alpha: f64,
    /// Iteration budget per decimation round.
    pub t_max: u32,
}

impl Default for BPParams {
    fn default() -> Self {
        BPParams {
            beta: 2.0,
            epsilon: 0.01,
            alpha: 4.25,
            t_max: 10,
        }
    }
}

impl BPParams {
    // `!(x > 0)` rather than `x <= 0` so that NaN parameters are rejected
    #[allow(clippy::neg_cmp_op_on_partial_ord)]
    pub fn validate(&self) -> Result<()> {
        if !(self.beta > 0.0) {
            return Err(Error::InvalidParameter("beta must be > 0".into()));
        }
        if !(self.epsilon > 0.0) {
            return Err(Error::InvalidParameter("epsilon must be > 0".into()));
        }
        if !(self.alpha > 0.0) {
            return Err(Error::InvalidParameter("alpha must be > 0".into()));
        }
        if self.t_max < 1 {
            return Err(Error::InvalidParameter("t_max must be >= 1".into()));
        }
        Ok(())
    }
}

/// Why a decimation round stopped iterating.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
pub enum StopCondition {
    /// Normalized L1 message change fell below epsilon.
    MessagesConverged,
    /// Some code-bit bias exceeded alpha in magnitude.
    BiasExceeded,
    /// Neither happened within the iteration budget.
    BudgetExhausted,
}

impl StopCondition {
    /// Roman-numeral label used in trace output.
    pub fn label(self) -> &'static str {
        match self {
            StopCondition::MessagesConverged => "i",
            StopCondition::BiasExceeded => "ii",
            StopCondition::BudgetExhausted => "iii",
        }
    }
}

const ATANH_CLAMP: f64 = 1.0 - 1e-12;

fn atanh_clamped(x: f64) -> f64 {
    x.clamp(-ATANH_CLAMP, ATANH_CLAMP).atanh()
}

/// `atanh(tanh(a) * tanh(b))` evaluated without forming the saturating
/// product, so it stays exact for arbitrarily large arguments.
fn boxplus(a: f64, b: f64) -> f64 {
    let sign = if (a < 0.0) != (b < 0.0) { -1.0 } else { 1.0 };
    let m = a.abs().min(b.abs());
    sign * m + 0.5 * (((-2.0 * (a + b).abs()).exp()).ln_1p() - ((-2.0 * (a - b).abs()).exp()).ln_1p())
}

/// Generator-to-bit update:
/// `eta_hat = (1/beta) * atanh( (-1)^x_a * tanh(beta/2) * prod_j tanh(beta*eta_j) )`,
/// with the empty product equal to 1.
pub fn check_update(x_a: u8, beta: f64, incoming: &[f64]) -> f64 {
    let mut acc = if x_a & 1 == 1 { -beta / 2.0 } else { beta / 2.0 };
    for &eta in incoming {
        acc = boxplus(acc, beta * eta);
    }
    acc / beta
}

/// Bit-to-generator update: plain sum of the incoming `eta_hat`.
pub fn var_update(incoming: &[f64]) -> f64 {
    incoming.iter().sum()
}

/// Bias of a code-bit: `beta` times the sum over its full neighborhood.
pub fn bias(beta: f64, incoming: &[f64]) -> f64 {
    beta * incoming.iter().sum::<f64>()
}

/// Message changes at or below this magnitude are treated as converged: the
/// old value is kept and no dirtiness propagates. Decimation decisions
/// compare biases at the O(1) scale, so the truncation is far below anything
/// observable; setting it to zero recovers the exact flooding sweep.
pub const DEFAULT_DIRTY_TOL: f64 = 1e-7;

/// Uniform lookup table with linear interpolation for an odd function on
/// `[-range, range]`; beyond the range the endpoint value is returned. Used
/// for the two transcendentals in the sweep inner loop, where a few 1e-9 of
/// absolute error sit far below the dirty tolerance.
struct OddTable {
    values: Vec<f64>,
    range: f64,
    inv_step: f64,
}

impl OddTable {
    const SIZE: usize = 1 << 17;

    fn build(range: f64, f: impl Fn(f64) -> f64) -> Self {
        let step = range / Self::SIZE as f64;
        let values = (0..=Self::SIZE).map(|k| f(k as f64 * step)).collect();
        OddTable {
            values,
            range,
            inv_step: 1.0 / step,
        }
    }

    #[inline]
    fn eval(&self, x: f64) -> f64 {
        let a = x.abs();
        if a >= self.range {
            return self.values[Self::SIZE].copysign(x);
        }
        let pos = a * self.inv_step;
        let k = pos as usize;
        let frac = pos - k as f64;
        let v = self.values[k] + frac * (self.values[k + 1] - self.values[k]);
        v.copysign(x)
    }
}

/// `tanh` on [-14, 14]; saturated to the endpoint beyond, where tanh is 1 to
/// within 2e-13.
fn tanh_table() -> &'static OddTable {
    static TABLE: std::sync::OnceLock<OddTable> = std::sync::OnceLock::new();
    TABLE.get_or_init(|| OddTable::build(14.0, f64::tanh))
}

/// `atanh` on [-0.99, 0.99]; callers fall back to the exact function outside.
fn atanh_table() -> &'static OddTable {
    static TABLE: std::sync::OnceLock<OddTable> = std::sync::OnceLock::new();
    TABLE.get_or_init(|| OddTable::build(0.99, f64::atanh))
}

/// Per-edge message state for one encoding run.
#[derive(Debug, Clone)]
pub struct MessageState {
    beta: f64,
    tanh_half_beta: f64,
    dirty_tol: f64,
    /// Original `n*L`, the fixed normalizer of the convergence sum.
    normalizer: f64,
    eta: Vec<f64>,
    /// Cache of `tanh(beta * eta)` kept in lockstep with `eta`.
    tanh_eta: Vec<f64>,
    eta_hat: Vec<f64>,
    /// Per code-bit sum of incoming `eta_hat`; the bias is `beta` times this.
    field: Vec<f64>,
    dirty_gen: Vec<bool>,
    dirty_gens: Vec<u32>,
    dirty_bit: Vec<bool>,
    dirty_bits: Vec<u32>,
    /// Recycled list buffer so the dirty queues never reallocate per sweep.
    spare: Vec<u32>,
    /// Sweeps performed in the current decimation round.
    round_t: u32,
    total_sweeps: u64,
    last_delta: f64,
}

impl MessageState {
    /// Zero-initialized messages; the first sweep recomputes every node.
    pub fn new(graph: &FactorGraph, beta: f64) -> Self {
        let e = graph.num_edges();
        MessageState {
            beta,
            tanh_half_beta: (beta / 2.0).tanh(),
            dirty_tol: DEFAULT_DIRTY_TOL,
            normalizer: graph.num_gens() as f64,
            eta: vec![0.0; e],
            tanh_eta: vec![0.0; e],
            eta_hat: vec![0.0; e],
            field: vec![0.0; graph.num_bits()],
            dirty_gen: vec![true; graph.num_gens()],
            dirty_gens: (0..graph.num_gens() as u32).collect(),
            dirty_bit: vec![false; graph.num_bits()],
            dirty_bits: Vec::new(),
            spare: Vec::new(),
            round_t: 0,
            total_sweeps: 0,
            last_delta: f64::INFINITY,
        }
    }

    pub fn eta(&self, e: u32) -> f64 {
        self.eta[e as usize]
    }

    pub fn eta_hat(&self, e: u32) -> f64 {
        self.eta_hat[e as usize]
    }

    pub fn bias_of(&self, i: usize) -> f64 {
        self.beta * self.field[i]
    }

    /// BP belief that code-bit `i` takes value 1, from the converged incoming
    /// messages.
    pub fn belief_one(&self, i: usize) -> f64 {
        1.0 / (1.0 + (2.0 * self.beta * self.field[i]).exp())
    }

    pub fn total_sweeps(&self) -> u64 {
        self.total_sweeps
    }

    pub fn round_t(&self) -> u32 {
        self.round_t
    }

    /// Change the sub-tolerance truncation; zero makes every sweep an exact
    /// flooding sweep.
    pub fn set_dirty_tol(&mut self, tol: f64) {
        self.dirty_tol = tol;
    }

    #[cfg(test)]
    pub(crate) fn force_field(&mut self, i: usize, value: f64) {
        self.field[i] = value;
    }

    /// Flag a generator whose residual or adjacency changed; its outgoing
    /// messages are recomputed on the next sweep.
    pub fn mark_gen_dirty(&mut self, a: usize) {
        if !self.dirty_gen[a] {
            self.dirty_gen[a] = true;
            self.dirty_gens.push(a as u32);
        }
    }

    /// One flooding iteration. Returns the normalized message change
    /// `(1/nL) * sum_edges |eta_hat_new - eta_hat_old|` with `nL` fixed at the
    /// original generator count.
    pub fn sweep(&mut self, graph: &FactorGraph) -> f64 {
        self.total_sweeps += 1;
        let mut delta = 0.0;
        let exact = self.dirty_tol == 0.0;
        let g = graph.raw_parts();
        let atab = atanh_table();
        let ttab = tanh_table();

        // Safety throughout: edge ids in the adjacency arrays index the
        // per-edge vectors, and node ids index the per-node vectors; both
        // invariants are established at graph construction and preserved by
        // decimation (`check_consistency` verifies them).

        // generator half: new eta_hat from the previous iteration's eta
        let mut gens = std::mem::replace(&mut self.dirty_gens, std::mem::take(&mut self.spare));
        let mut tanhs = [0.0f64; MAX_GEN_DEGREE];
        let mut suff = [0.0f64; MAX_GEN_DEGREE + 1];
        let inv_beta = 1.0 / self.beta;
        for &a in &gens {
            let a = a as usize;
            self.dirty_gen[a] = false;
            let s = g.gen_start[a] as usize;
            let d = g.gen_len[a] as usize;
            if d == 0 {
                continue;
            }
            // graph construction rejects generator degrees above the cap
            assert!(d <= MAX_GEN_DEGREE, "generator degree {d} above cap");
            let base = if graph.residual(a) == 1 {
                -self.tanh_half_beta
            } else {
                self.tanh_half_beta
            };
            let adj = &g.gen_adj[s..s + d];
            // cavity products as one suffix pass plus a running prefix
            unsafe {
                *suff.get_unchecked_mut(d) = 1.0;
                for k in (0..d).rev() {
                    let t = *self.tanh_eta.get_unchecked(*adj.get_unchecked(k) as usize);
                    *tanhs.get_unchecked_mut(k) = t;
                    *suff.get_unchecked_mut(k) = *suff.get_unchecked(k + 1) * t;
                }
            }
            let mut pref = 1.0f64;
            for k in 0..d {
                let e = unsafe { *adj.get_unchecked(k) } as usize;
                let cavity = pref * unsafe { *suff.get_unchecked(k + 1) };
                pref *= unsafe { *tanhs.get_unchecked(k) };
                let y = base * cavity;
                let new = if !exact && y.abs() < 0.99 {
                    atab.eval(y) * inv_beta
                } else {
                    atanh_clamped(y) * inv_beta
                };
                let old = unsafe { *self.eta_hat.get_unchecked(e) };
                let diff = (new - old).abs();
                if diff > self.dirty_tol {
                    delta += diff;
                    unsafe { *self.eta_hat.get_unchecked_mut(e) = new };
                    let i = unsafe { *g.edge_bit.get_unchecked(e) } as usize;
                    let flag = unsafe { self.dirty_bit.get_unchecked_mut(i) };
                    if !*flag {
                        *flag = true;
                        self.dirty_bits.push(i as u32);
                    }
                }
            }
        }
        gens.clear();

        // bit half: new eta (and fields) from the new eta_hat
        let bits = std::mem::replace(&mut self.dirty_bits, gens);
        for &i in &bits {
            let i = i as usize;
            self.dirty_bit[i] = false;
            if !graph.bit_is_alive(i) {
                continue;
            }
            let adj = &g.bit_adj[g.bit_start[i] as usize..g.bit_start[i + 1] as usize];
            let mut sum = 0.0f64;
            for &e in adj {
                sum += unsafe { *self.eta_hat.get_unchecked(e as usize) };
            }
            self.field[i] = sum;
            for &e in adj {
                let e = e as usize;
                let new = sum - unsafe { *self.eta_hat.get_unchecked(e) };
                let old = unsafe { *self.eta.get_unchecked(e) };
                if (new - old).abs() > self.dirty_tol {
                    unsafe { *self.eta.get_unchecked_mut(e) = new };
                    let t = if exact {
                        (self.beta * new).tanh()
                    } else {
                        ttab.eval(self.beta * new)
                    };
                    unsafe { *self.tanh_eta.get_unchecked_mut(e) = t };
                    let a = unsafe { *g.edge_gen.get_unchecked(e) } as usize;
                    let flag = unsafe { self.dirty_gen.get_unchecked_mut(a) };
                    if !*flag {
                        *flag = true;
                        self.dirty_gens.push(a as u32);
                    }
                }
            }
        }
        let mut bits = bits;
        bits.clear();
        self.spare = bits;

        self.last_delta = delta / self.normalizer;
        self.last_delta
    }

    /// Normalized message change of the most recent sweep.
    pub fn last_delta(&self) -> f64 {
        self.last_delta
    }

    /// Largest `|bias|` over the alive code-bits.
    pub fn max_abs_bias(&self, graph: &FactorGraph) -> f64 {
        let mut m = 0.0f64;
        for &i in graph.alive_bits() {
            m = m.max(self.field[i as usize].abs());
        }
        self.beta * m
    }

    /// Iterate sweeps from the current state (no reset) until the first `t`
    /// where the messages converge (condition i) or some bias exceeds alpha
    /// (condition ii); both only fire for `t < t_max`. Otherwise stop at
    /// `t = t_max` with condition iii.
    pub fn run_until_decimation_condition(
        &mut self,
        graph: &FactorGraph,
        params: &BPParams,
    ) -> (u32, StopCondition) {
        for t in 1..=params.t_max {
            let delta = self.sweep(graph);
            if t < params.t_max {
                if delta < params.epsilon {
                    self.round_t = t;
                    return (t, StopCondition::MessagesConverged);
                }
                if self.max_abs_bias(graph) > params.alpha {
                    self.round_t = t;
                    return (t, StopCondition::BiasExceeded);
                }
            }
        }
        self.round_t = params.t_max;
        (params.t_max, StopCondition::BudgetExhausted)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ensemble::EnsembleSpec;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn check_update_zero_kills_product() {
        assert_eq!(check_update(0, 2.0, &[0.0, 0.4]), 0.0);
    }

    #[test]
    fn check_update_empty_product() {
        for beta in [0.5, 2.0, 7.0] {
            assert!((check_update(0, beta, &[]) - 0.5).abs() < 1e-12);
            assert!((check_update(1, beta, &[]) + 0.5).abs() < 1e-12);
        }
    }

    #[test]
    fn check_update_closed_form_value() {
        // frozen from a 40-digit evaluation of the closed form
        let v = check_update(0, 2.0, &[0.3, 0.5]);
        assert!((v - 0.161_104_270_493_002_6).abs() < 1e-12, "{v}");
        // and against a direct f64 evaluation of the same expression
        let direct = (f64::tanh(1.0) * f64::tanh(0.6) * f64::tanh(1.0)).atanh() / 2.0;
        assert!((v - direct).abs() < 1e-12);
    }

    #[test]
    fn check_update_sign_covariance() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..200 {
            let inc: Vec<f64> = (0..rng.random_range(0..5))
                .map(|_| rng.random_range(-2.0..2.0))
                .collect();
            let beta = rng.random_range(0.2..5.0);
            let a = check_update(0, beta, &inc);
            let b = check_update(1, beta, &inc);
            assert!((a + b).abs() < 1e-12);
        }
    }

    #[test]
    fn check_update_bounded_by_half() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for _ in 0..10_000 {
            let inc: Vec<f64> = (0..rng.random_range(0..8))
                .map(|_| rng.random_range(-10.0..10.0))
                .collect();
            let beta = rng.random_range(0.01..100.0);
            let v = check_update(rng.random_range(0..2u8), beta, &inc);
            assert!(v.abs() <= 0.5 + 1e-12, "beta={beta} v={v}");
        }
    }

    #[test]
    fn var_update_examples() {
        assert_eq!(var_update(&[]), 0.0);
        assert_eq!(var_update(&[0.5, -0.5]), 0.0);
        let v = var_update(&[0.1612, 0.5, -0.25]);
        assert!((v - 0.4112).abs() < 1e-12);
    }

    #[test]
    fn bias_examples() {
        assert_eq!(bias(2.0, &[0.0, 0.0]), 0.0);
        assert!((bias(2.0, &[0.5, 0.5, 0.5]) - 3.0).abs() < 1e-12);
        let inc = [0.3, -0.2, 0.15];
        let neg: Vec<f64> = inc.iter().map(|x| -x).collect();
        assert!((bias(1.7, &inc) + bias(1.7, &neg)).abs() < 1e-12);
    }

    #[test]
    fn min_sum_limit() {
        let beta = 1e3;
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..10_000 {
            let inc: Vec<f64> = (0..rng.random_range(1..6))
                .map(|_| rng.random_range(-1.0..1.0))
                .collect();
            let x_a = rng.random_range(0..2u8);
            let v = check_update(x_a, beta, &inc);
            let sign_prod: f64 = inc.iter().map(|e| e.signum()).product::<f64>()
                * if x_a == 1 { -1.0 } else { 1.0 };
            let mag = inc
                .iter()
                .map(|e| e.abs())
                .fold(0.5f64, f64::min);
            assert!(
                (v - sign_prod * mag).abs() < 1e-3,
                "v={v} expected={}",
                sign_prod * mag
            );
        }
    }

    /// Full-graph recomputation of one flooding sweep using only the pure
    /// update rules; the incremental sweep must match it.
    fn reference_sweep(
        graph: &FactorGraph,
        eta: &[f64],
        eta_hat: &[f64],
        beta: f64,
    ) -> (Vec<f64>, Vec<f64>, f64) {
        let mut new_hat = eta_hat.to_vec();
        let mut delta = 0.0;
        for a in 0..graph.num_gens() {
            let adj = graph.gen_edges(a);
            for &e in adj {
                let incoming: Vec<f64> = adj
                    .iter()
                    .filter(|&&f| f != e)
                    .map(|&f| eta[f as usize])
                    .collect();
                let v = check_update(graph.residual(a), beta, &incoming);
                delta += (v - eta_hat[e as usize]).abs();
                new_hat[e as usize] = v;
            }
        }
        let mut new_eta = eta.to_vec();
        for &i in graph.alive_bits() {
            let adj = graph.bit_edges(i as usize);
            for &e in adj {
                let incoming: Vec<f64> = adj
                    .iter()
                    .filter(|&&f| f != e)
                    .map(|&f| new_hat[f as usize])
                    .collect();
                new_eta[e as usize] = var_update(&incoming);
            }
        }
        (new_eta, new_hat, delta / graph.num_gens() as f64)
    }

    fn random_graph(seed: u64) -> FactorGraph {
        let spec = EnsembleSpec::new(3, 6, 40, 4, 2).unwrap();
        let mut g = FactorGraph::sample_coupled(spec, seed).unwrap();
        let src = crate::codec::SourceWord::sample(g.num_gens(), seed ^ 0xabc).unwrap();
        g.set_residuals(src.bits()).unwrap();
        g
    }

    #[test]
    fn incremental_sweep_matches_reference() {
        let mut g = random_graph(5);
        let mut state = MessageState::new(&g, 2.0);
        state.set_dirty_tol(0.0);
        let mut rng = ChaCha8Rng::seed_from_u64(77);
        for step in 0..30 {
            let (exp_eta, exp_hat, exp_delta) =
                reference_sweep(&g, &state.eta, &state.eta_hat, 2.0);
            let delta = state.sweep(&g);
            assert!((delta - exp_delta).abs() < 1e-12, "step {step}");
            for e in 0..g.num_edges() {
                if !g.bit_is_alive(g.edge_endpoints(e as u32).1 as usize) {
                    continue;
                }
                assert!(
                    (state.eta[e] - exp_eta[e]).abs() < 1e-12
                        && (state.eta_hat[e] - exp_hat[e]).abs() < 1e-12,
                    "edge {e} at step {step}"
                );
            }
            // interleave a decimation every few sweeps
            if step % 4 == 3 && !g.alive_bits().is_empty() {
                let i = g.alive_bits()[rng.random_range(0..g.alive_bits().len())] as usize;
                let u: u8 = rng.random_range(0..2);
                let neighbors: Vec<usize> = g
                    .bit_edges(i)
                    .iter()
                    .map(|&e| g.edge_endpoints(e).0 as usize)
                    .collect();
                for a in neighbors {
                    if u == 1 {
                        g.flip_residual(a);
                    }
                }
                for a in g.remove_code_bit(i).unwrap() {
                    state.mark_gen_dirty(a as usize);
                }
            }
        }
    }

    #[test]
    fn lookup_tables_match_exact_functions() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for _ in 0..100_000 {
            let x = rng.random_range(-20.0..20.0);
            assert!((tanh_table().eval(x) - x.tanh()).abs() < 5e-9, "tanh at {x}");
            let y = rng.random_range(-0.99..0.99);
            assert!(
                (atanh_table().eval(y) - y.atanh()).abs() < 1e-7,
                "atanh at {y}"
            );
        }
        // odd symmetry and saturation
        assert_eq!(tanh_table().eval(0.0), 0.0);
        assert_eq!(tanh_table().eval(100.0), 14.0f64.tanh());
        assert_eq!(tanh_table().eval(-3.0), -tanh_table().eval(3.0));
    }

    #[test]
    fn truncated_sweep_tracks_exact_sweep() {
        let g = random_graph(13);
        let mut exact = MessageState::new(&g, 2.0);
        exact.set_dirty_tol(0.0);
        let mut truncated = MessageState::new(&g, 2.0);
        for _ in 0..40 {
            exact.sweep(&g);
            truncated.sweep(&g);
        }
        for i in 0..g.num_bits() {
            assert!(
                (exact.bias_of(i) - truncated.bias_of(i)).abs() < 1e-6,
                "bit {i}: {} vs {}",
                exact.bias_of(i),
                truncated.bias_of(i)
            );
        }
    }

    #[test]
    fn sweep_fixed_point_is_idempotent() {
        let g = random_graph(9);
        let mut state = MessageState::new(&g, 2.0);
        for _ in 0..200 {
            state.sweep(&g);
        }
        let delta = state.sweep(&g);
        assert!(delta <= 1e-12, "delta={delta}");
    }

    /// A path instance evaluated by hand: bits b0, b1; generators g0-(b0),
    /// g1-(b0,b1), all x = 0. The degree-1 generator g0 sends 1/2 to b0 on
    /// the first sweep; on the second sweep g1 forwards a damped copy to b1.
    #[test]
    fn path_graph_two_sweeps_by_hand() {
        let beta = 2.0;
        // sweep 1 from zero messages
        let g0_to_b0 = check_update(0, beta, &[]);
        assert!((g0_to_b0 - 0.5).abs() < 1e-12);
        assert_eq!(check_update(0, beta, &[0.0]), 0.0); // g1 both directions
        // bit half: eta(b0 -> g1) = g0_to_b0
        let b0_to_g1 = var_update(&[g0_to_b0]);
        // sweep 2: (1/beta) atanh(tanh(beta/2) * tanh(beta * 1/2))
        let g1_to_b1 = check_update(0, beta, &[b0_to_g1]);
        let direct = (f64::tanh(1.0) * f64::tanh(1.0)).atanh() / beta;
        assert!((g1_to_b1 - direct).abs() < 1e-12);
        assert!(g1_to_b1 > 0.0);
    }

    #[test]
    fn tree_converges_within_diameter() {
        // w=1 coupled spec with tiny blocks gives small graphs; instead use a
        // small uncoupled instance and just check convergence to a fixed point
        // within the iteration bound implied by its size.
        let spec = EnsembleSpec::new(2, 4, 8, 1, 1).unwrap();
        let mut g = FactorGraph::sample_uncoupled(spec, 3).unwrap();
        let src = crate::codec::SourceWord::sample(g.num_gens(), 4).unwrap();
        g.set_residuals(src.bits()).unwrap();
        let mut state = MessageState::new(&g, 2.0);
        let mut last = f64::INFINITY;
        for _ in 0..100 {
            last = state.sweep(&g);
        }
        assert!(last < 1e-9, "cycle-free-ish instance should settle, delta={last}");
    }

    #[test]
    fn run_until_budget_exhaustion() {
        let g = random_graph(11);
        let mut state = MessageState::new(&g, 2.0);
        // warm up so messages are nonzero, then demand the impossible
        state.sweep(&g);
        let params = BPParams {
            beta: 2.0,
            epsilon: 1e-300,
            alpha: 1e300,
            t_max: 1,
        };
        let (t, cond) = state.run_until_decimation_condition(&g, &params);
        assert_eq!((t, cond), (1, StopCondition::BudgetExhausted));
    }

    #[test]
    fn run_until_converges_on_fresh_graph() {
        // from all-zero messages with every generator degree >= 2, the first
        // sweep leaves everything at zero: condition i at t = 1
        let spec = EnsembleSpec::new(3, 6, 100, 1, 1).unwrap();
        let mut g = FactorGraph::sample_uncoupled(spec, 21).unwrap();
        let src = crate::codec::SourceWord::sample(g.num_gens(), 22).unwrap();
        g.set_residuals(src.bits()).unwrap();
        let mut state = MessageState::new(&g, 2.0);
        let params = BPParams::default();
        let (t, cond) = state.run_until_decimation_condition(&g, &params);
        assert_eq!(cond, StopCondition::MessagesConverged);
        assert_eq!(t, 1);
        assert_eq!(state.max_abs_bias(&g), 0.0);
    }

    #[test]
    fn tiny_alpha_triggers_condition_two() {
        // degree-1 generators produce nonzero messages on the first sweep
        let spec = EnsembleSpec::new(1, 2, 16, 1, 1).unwrap();
        let mut g = FactorGraph::sample_uncoupled(spec, 2).unwrap();
        let src = crate::codec::SourceWord::sample(g.num_gens(), 5).unwrap();
        g.set_residuals(src.bits()).unwrap();
        let mut state = MessageState::new(&g, 2.0);
        let params = BPParams {
            alpha: 1e-12,
            epsilon: 1e-300,
            ..Default::default()
        };
        let (t, cond) = state.run_until_decimation_condition(&g, &params);
        assert_eq!(cond, StopCondition::BiasExceeded);
        assert_eq!(t, 1);
    }
}
