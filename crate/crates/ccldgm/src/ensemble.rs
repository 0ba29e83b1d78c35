//! Sampling and mutation of LDGM / CCLDGM bipartite factor graphs.
//!
//! A factor graph couples `m·L` code-bit nodes to `n·L` generator nodes.
//! Uncoupled graphs (`L = 1`) are drawn from the configuration model with
//! exactly regular degrees on both sides. Coupled graphs place the `L`
//! positions on a ring; every generator at position `z` sends its `l` edges
//! into positions `[z, z+w-1]` mod `L`.

use std::io::{BufRead, Write};

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

/// Parameters of an LDGM(l,r,n) or CCLDGM(l,r,L,w,n) ensemble.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub struct EnsembleSpec {
    /// Degree of every generator node (`l`).
    pub gen_degree: usize,
    /// Target degree of code-bit nodes (`r`).
    pub bit_degree: usize,
    /// Generator nodes per position (`n`).
    pub gens_per_position: usize,
    /// Number of positions on the ring (`L`); 1 for the uncoupled ensemble.
    pub positions: usize,
    /// Coupling width (`w`), `1 <= w <= L`.
    pub width: usize,
}

impl EnsembleSpec {
    pub fn new(
        gen_degree: usize,
        bit_degree: usize,
        gens_per_position: usize,
        positions: usize,
        width: usize,
    ) -> Result<Self> {
        let spec = EnsembleSpec {
            gen_degree,
            bit_degree,
            gens_per_position,
            positions,
            width,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        if self.gen_degree < 1 || self.bit_degree < 1 || self.gens_per_position < 1 {
            return Err(Error::InvalidParameter(
                "l, r and n must all be at least 1".into(),
            ));
        }
        if self.positions < 1 {
            return Err(Error::InvalidParameter("L must be at least 1".into()));
        }
        if self.gen_degree > MAX_GEN_DEGREE {
            return Err(Error::InvalidParameter(format!(
                "l must be at most {MAX_GEN_DEGREE}"
            )));
        }
        if self.width < 1 || self.width > self.positions {
            return Err(Error::InvalidParameter(format!(
                "w must satisfy 1 <= w <= L, got w={} L={}",
                self.width, self.positions
            )));
        }
        if !(self.gens_per_position * self.gen_degree).is_multiple_of(self.bit_degree) {
            return Err(Error::InvalidParameter(format!(
                "n*l = {} is not divisible by r = {}; per-position code-bit count must be an integer",
                self.gens_per_position * self.gen_degree,
                self.bit_degree
            )));
        }
        Ok(())
    }

    /// Code-bit nodes per position, `m = n*l/r`.
    pub fn bits_per_position(&self) -> usize {
        self.gens_per_position * self.gen_degree / self.bit_degree
    }

    pub fn total_bits(&self) -> usize {
        self.bits_per_position() * self.positions
    }

    pub fn total_gens(&self) -> usize {
        self.gens_per_position * self.positions
    }

    pub fn total_edges(&self) -> usize {
        self.total_gens() * self.gen_degree
    }

    /// Compression rate `R = m/n = l/r`.
    pub fn rate(&self) -> f64 {
        self.gen_degree as f64 / self.bit_degree as f64
    }

    pub fn is_coupled(&self) -> bool {
        self.positions > 1
    }
}

/// Mutable bipartite factor graph with per-generator source residuals.
///
/// Edges are identified by dense indices. Generator adjacency shrinks under
/// decimation; code-bit adjacency is kept as sampled and the per-bit alive
/// flag marks decimated bits. Parallel edges are allowed and tracked
/// individually.
#[derive(Debug, Clone)]
pub struct FactorGraph {
    /// Ensemble metadata when the graph was sampled; absent for hand-built
    /// bipartite graphs.
    spec: Option<EnsembleSpec>,
    positions: usize,
    gens_per_position: usize,
    bits_per_position: usize,
    seed: u64,
    edge_gen: Vec<u32>,
    edge_bit: Vec<u32>,
    /// Alive edges of each generator, flat: segment `a` spans
    /// `gen_start[a] .. gen_start[a] + gen_len[a]`, with capacity up to
    /// `gen_start[a+1]` (the as-sampled degree). Removal swap-shrinks the
    /// segment in place.
    gen_adj: Vec<u32>,
    gen_start: Vec<u32>,
    gen_len: Vec<u32>,
    /// All edges of each code-bit, flat and never mutated: segment `i` spans
    /// `bit_start[i] .. bit_start[i+1]`.
    bit_adj: Vec<u32>,
    bit_start: Vec<u32>,
    bit_alive: Vec<bool>,
    /// Alive code-bit ids, order unspecified; `bit_slot[i]` is i's index here.
    alive_bits: Vec<u32>,
    bit_slot: Vec<u32>,
    /// Current source residual bit of each generator.
    residual: Vec<u8>,
}

/// Largest generator degree the message-passing kernel supports; its cavity
/// products live in fixed stack buffers of this size.
pub const MAX_GEN_DEGREE: usize = 32;

/// Borrowed flat-adjacency views consumed by the sweep inner loop.
pub(crate) struct RawParts<'a> {
    pub gen_adj: &'a [u32],
    pub gen_start: &'a [u32],
    pub gen_len: &'a [u32],
    pub bit_adj: &'a [u32],
    pub bit_start: &'a [u32],
    pub edge_gen: &'a [u32],
    pub edge_bit: &'a [u32],
}

/// Counting-sort construction of one side of the flat adjacency: returns
/// `(flat, start)` with `start.len() == nodes + 1`.
fn csr(nodes: usize, endpoints: &[u32]) -> (Vec<u32>, Vec<u32>) {
    let mut start = vec![0u32; nodes + 1];
    for &v in endpoints {
        start[v as usize + 1] += 1;
    }
    for k in 0..nodes {
        start[k + 1] += start[k];
    }
    let mut cursor = start.clone();
    let mut flat = vec![0u32; endpoints.len()];
    for (e, &v) in endpoints.iter().enumerate() {
        flat[cursor[v as usize] as usize] = e as u32;
        cursor[v as usize] += 1;
    }
    (flat, start)
}

impl FactorGraph {
    fn from_edges(spec: EnsembleSpec, seed: u64, edge_gen: Vec<u32>, edge_bit: Vec<u32>) -> Self {
        let n_gens = spec.total_gens();
        let n_bits = spec.total_bits();
        let (gen_adj, gen_start) = csr(n_gens, &edge_gen);
        let (bit_adj, bit_start) = csr(n_bits, &edge_bit);
        let gen_len = (0..n_gens)
            .map(|a| gen_start[a + 1] - gen_start[a])
            .collect();
        FactorGraph {
            spec: Some(spec),
            positions: spec.positions,
            gens_per_position: spec.gens_per_position,
            bits_per_position: spec.bits_per_position(),
            seed,
            edge_gen,
            edge_bit,
            gen_adj,
            gen_start,
            gen_len,
            bit_adj,
            bit_start,
            bit_alive: vec![true; n_bits],
            alive_bits: (0..n_bits as u32).collect(),
            bit_slot: (0..n_bits as u32).collect(),
            residual: vec![0; n_gens],
        }
    }

    /// Sample an uncoupled LDGM(l,r,n) graph via socket matching: the `n*l`
    /// generator sockets are paired with a random permutation of the `m*r`
    /// code-bit sockets, so degrees are exactly regular on both sides.
    pub fn sample_uncoupled(spec: EnsembleSpec, seed: u64) -> Result<Self> {
        spec.validate()?;
        if spec.positions != 1 {
            return Err(Error::InvalidParameter(
                "uncoupled sampling requires L = 1".into(),
            ));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (edge_gen, edge_bit) = matched_block_edges(&spec, 0, &mut rng);
        Ok(Self::from_edges(spec, seed, edge_gen, edge_bit))
    }

    /// Sample a coupled CCLDGM(l,r,L,w,n) graph via a windowed configuration
    /// model. At every position the `n*l` generator sockets are spread as
    /// evenly as possible over the `w` window offsets (remainders rotate with
    /// the position), and each position's incoming sockets are matched
    /// against a random permutation of its `m*r` code-bit sockets. Generator
    /// degrees are exactly `l`; code-bit degrees are exactly `r` whenever the
    /// per-offset split is exact (in particular for `w = 1`, which degenerates
    /// to `L` disjoint blocks identical in law to
    /// [`FactorGraph::sample_uncoupled`] per position, and whenever `w` is
    /// odd or divides `n*l`).
    pub fn sample_coupled(spec: EnsembleSpec, seed: u64) -> Result<Self> {
        spec.validate()?;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let n = spec.gens_per_position;
        let m = spec.bits_per_position();
        let (l, big_l, w) = (spec.gen_degree, spec.positions, spec.width);

        // route generator sockets to target positions, balanced per offset
        let q = (n * l) / w;
        let rem = (n * l) % w;
        let mut incoming: Vec<Vec<u32>> = vec![Vec::with_capacity(n * l + w); big_l];
        for z in 0..big_l {
            let mut sockets: Vec<u32> = (0..n * l).map(|s| (z * n + s / l) as u32).collect();
            sockets.shuffle(&mut rng);
            let mut next = sockets.into_iter();
            for o in 0..w {
                let extra = usize::from((o + w - z % w) % w < rem);
                let dst = &mut incoming[(z + o) % big_l];
                for _ in 0..q + extra {
                    dst.push(next.next().expect("socket count"));
                }
            }
        }

        // pair each position's incoming sockets with its shuffled bit sockets
        let mut edge_gen = Vec::with_capacity(spec.total_edges());
        let mut edge_bit = Vec::with_capacity(spec.total_edges());
        for (zp, gens) in incoming.into_iter().enumerate() {
            let mut bit_sockets: Vec<u32> = (0..m * spec.bit_degree)
                .map(|s| (zp * m + s / spec.bit_degree) as u32)
                .collect();
            bit_sockets.shuffle(&mut rng);
            for (k, a) in gens.into_iter().enumerate() {
                edge_gen.push(a);
                edge_bit.push(bit_sockets[k % bit_sockets.len()]);
            }
        }
        Ok(Self::from_edges(spec, seed, edge_gen, edge_bit))
    }

    /// Sample from the spec, dispatching on `L`.
    pub fn sample(spec: EnsembleSpec, seed: u64) -> Result<Self> {
        if spec.positions == 1 {
            Self::sample_uncoupled(spec, seed)
        } else {
            Self::sample_coupled(spec, seed)
        }
    }

    /// Build an arbitrary bipartite graph (single position) from explicit
    /// `(generator, code_bit)` pairs. Used for hand-crafted and tree
    /// instances; no ensemble metadata is attached.
    pub fn from_bipartite_edges(
        num_gens: usize,
        num_bits: usize,
        edges: &[(u32, u32)],
    ) -> Result<Self> {
        if num_gens == 0 || num_bits == 0 {
            return Err(Error::InvalidParameter(
                "graph needs at least one generator and one code-bit".into(),
            ));
        }
        let mut edge_gen = Vec::with_capacity(edges.len());
        let mut edge_bit = Vec::with_capacity(edges.len());
        for &(a, i) in edges {
            if a as usize >= num_gens || i as usize >= num_bits {
                return Err(Error::InvalidParameter(format!(
                    "edge ({a}, {i}) out of range"
                )));
            }
            edge_gen.push(a);
            edge_bit.push(i);
        }
        let (gen_adj, gen_start) = csr(num_gens, &edge_gen);
        let (bit_adj, bit_start) = csr(num_bits, &edge_bit);
        let gen_len: Vec<u32> = (0..num_gens)
            .map(|a| gen_start[a + 1] - gen_start[a])
            .collect();
        if gen_len.iter().any(|&d| d as usize > MAX_GEN_DEGREE) {
            return Err(Error::InvalidParameter(format!(
                "generator degree above the supported maximum of {MAX_GEN_DEGREE}"
            )));
        }
        Ok(FactorGraph {
            spec: None,
            positions: 1,
            gens_per_position: num_gens,
            bits_per_position: num_bits,
            seed: 0,
            edge_gen,
            edge_bit,
            gen_adj,
            gen_start,
            gen_len,
            bit_adj,
            bit_start,
            bit_alive: vec![true; num_bits],
            alive_bits: (0..num_bits as u32).collect(),
            bit_slot: (0..num_bits as u32).collect(),
            residual: vec![0; num_gens],
        })
    }

    /// Ensemble metadata, when the graph came from a sampler.
    pub fn spec(&self) -> Option<&EnsembleSpec> {
        self.spec.as_ref()
    }

    pub fn num_positions(&self) -> usize {
        self.positions
    }

    pub fn gens_per_position(&self) -> usize {
        self.gens_per_position
    }

    pub fn bits_per_position(&self) -> usize {
        self.bits_per_position
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn num_bits(&self) -> usize {
        self.bit_start.len() - 1
    }

    pub fn num_gens(&self) -> usize {
        self.gen_len.len()
    }

    pub fn num_edges(&self) -> usize {
        self.edge_gen.len()
    }

    pub fn edge_endpoints(&self, e: u32) -> (u32, u32) {
        (self.edge_gen[e as usize], self.edge_bit[e as usize])
    }

    pub fn bit_position(&self, i: usize) -> usize {
        i / self.bits_per_position
    }

    pub fn gen_position(&self, a: usize) -> usize {
        a / self.gens_per_position
    }

    pub fn bit_is_alive(&self, i: usize) -> bool {
        self.bit_alive[i]
    }

    /// Alive code-bit ids in unspecified order.
    pub fn alive_bits(&self) -> &[u32] {
        &self.alive_bits
    }

    /// All edges ever incident to code-bit `i`, including dead ones.
    pub fn bit_edges(&self, i: usize) -> &[u32] {
        &self.bit_adj[self.bit_start[i] as usize..self.bit_start[i + 1] as usize]
    }

    /// Alive edges incident to generator `a`; empty once `a` is exhausted.
    pub fn gen_edges(&self, a: usize) -> &[u32] {
        let s = self.gen_start[a] as usize;
        &self.gen_adj[s..s + self.gen_len[a] as usize]
    }

    pub fn gen_is_exhausted(&self, a: usize) -> bool {
        self.gen_len[a] == 0
    }

    /// Raw pieces for the message-passing inner loop: flat generator
    /// adjacency with `(start, len)` segments, plus both edge endpoint maps.
    pub(crate) fn raw_parts(&self) -> RawParts<'_> {
        RawParts {
            gen_adj: &self.gen_adj,
            gen_start: &self.gen_start,
            gen_len: &self.gen_len,
            bit_adj: &self.bit_adj,
            bit_start: &self.bit_start,
            edge_gen: &self.edge_gen,
            edge_bit: &self.edge_bit,
        }
    }

    pub fn residual(&self, a: usize) -> u8 {
        self.residual[a]
    }

    pub fn residuals(&self) -> &[u8] {
        &self.residual
    }

    /// Load per-generator source bits as the initial residuals.
    pub fn set_residuals(&mut self, bits: &[u8]) -> Result<()> {
        if bits.len() != self.num_gens() {
            return Err(Error::Usage(format!(
                "source length {} does not match generator count {}",
                bits.len(),
                self.num_gens()
            )));
        }
        self.residual.copy_from_slice(bits);
        Ok(())
    }

    pub fn flip_residual(&mut self, a: usize) {
        self.residual[a] ^= 1;
    }

    /// Remove code-bit `i`: mark it dead and detach all of its edges from the
    /// generator side. Returns the distinct generators whose degree changed;
    /// any of them may now be exhausted (degree 0).
    pub fn remove_code_bit(&mut self, i: usize) -> Result<Vec<u32>> {
        if i >= self.num_bits() {
            return Err(Error::Usage(format!("code-bit {i} out of range")));
        }
        if !self.bit_alive[i] {
            return Err(Error::Usage(format!("code-bit {i} is already dead")));
        }
        self.bit_alive[i] = false;

        // swap-remove i from the alive list
        let slot = self.bit_slot[i] as usize;
        let last = *self.alive_bits.last().unwrap();
        self.alive_bits.swap_remove(slot);
        if slot < self.alive_bits.len() {
            self.bit_slot[last as usize] = slot as u32;
        }

        let span = self.bit_start[i] as usize..self.bit_start[i + 1] as usize;
        let mut affected: Vec<u32> = Vec::with_capacity(span.len());
        for k in span {
            let e = self.bit_adj[k];
            let a = self.edge_gen[e as usize] as usize;
            let s = self.gen_start[a] as usize;
            let len = self.gen_len[a] as usize;
            let seg = &mut self.gen_adj[s..s + len];
            let pos = seg.iter().position(|&x| x == e).expect("adjacency symmetry");
            seg.swap(pos, len - 1);
            self.gen_len[a] -= 1;
            if !affected.contains(&(a as u32)) {
                affected.push(a as u32);
            }
        }
        Ok(affected)
    }

    /// Full-scan structural check: bipartite adjacency symmetry, window
    /// containment of every edge, and regular generator degrees at sampling
    /// time. Intended for tests; cost is linear in the graph size.
    pub fn check_consistency(&self) -> Result<()> {
        for a in 0..self.num_gens() {
            for &e in self.gen_edges(a) {
                if self.edge_gen[e as usize] as usize != a {
                    return Err(Error::Usage(format!("edge {e} not owned by generator {a}")));
                }
                let i = self.edge_bit[e as usize] as usize;
                if !self.bit_alive[i] {
                    return Err(Error::Usage(format!("edge {e} alive but code-bit {i} dead")));
                }
                if !self.bit_edges(i).contains(&e) {
                    return Err(Error::Usage(format!("edge {e} missing from bit {i}")));
                }
            }
        }
        for e in 0..self.num_edges() {
            let a = self.edge_gen[e] as usize;
            let i = self.edge_bit[e] as usize;
            if let Some(spec) = &self.spec {
                let (za, zi) = (self.gen_position(a), self.bit_position(i));
                let offset = (zi + spec.positions - za) % spec.positions;
                if offset >= spec.width {
                    return Err(Error::Usage(format!(
                        "edge {e} leaves the coupling window: gen pos {za}, bit pos {zi}"
                    )));
                }
            }
            if self.bit_alive[i] && !self.gen_edges(a).contains(&(e as u32)) {
                return Err(Error::Usage(format!("alive edge {e} missing from generator {a}")));
            }
        }
        Ok(())
    }

    /// Plain-text edge list: header `l r n L w seed`, then one
    /// `generator_id code_bit_id` pair per line.
    pub fn write_edge_list<W: Write>(&self, out: &mut W) -> Result<()> {
        let spec = self.spec.ok_or_else(|| {
            Error::Usage("edge-list dump requires an ensemble-sampled graph".into())
        })?;
        writeln!(
            out,
            "{} {} {} {} {} {}",
            spec.gen_degree,
            spec.bit_degree,
            spec.gens_per_position,
            spec.positions,
            spec.width,
            self.seed
        )?;
        for e in 0..self.num_edges() {
            writeln!(out, "{} {}", self.edge_gen[e], self.edge_bit[e])?;
        }
        Ok(())
    }

    /// Parse the edge-list format written by [`FactorGraph::write_edge_list`].
    pub fn read_edge_list<R: BufRead>(input: R) -> Result<Self> {
        let mut lines = input.lines();
        let header = lines
            .next()
            .ok_or_else(|| Error::Config("empty edge list".into()))??;
        let fields: Vec<u64> = header
            .split_whitespace()
            .map(|t| t.parse::<u64>().map_err(|_| Error::Config(format!("bad header: {header}"))))
            .collect::<Result<_>>()?;
        if fields.len() != 6 {
            return Err(Error::Config("edge-list header must be `l r n L w seed`".into()));
        }
        let spec = EnsembleSpec::new(
            fields[0] as usize,
            fields[1] as usize,
            fields[2] as usize,
            fields[3] as usize,
            fields[4] as usize,
        )?;
        let mut edge_gen = Vec::with_capacity(spec.total_edges());
        let mut edge_bit = Vec::with_capacity(spec.total_edges());
        for line in lines {
            let line = line?;
            if line.trim().is_empty() {
                continue;
            }
            let mut it = line.split_whitespace();
            let a: u32 = it
                .next()
                .and_then(|t| t.parse().ok())
                .ok_or_else(|| Error::Config(format!("bad edge line: {line}")))?;
            let i: u32 = it
                .next()
                .and_then(|t| t.parse().ok())
                .ok_or_else(|| Error::Config(format!("bad edge line: {line}")))?;
            edge_gen.push(a);
            edge_bit.push(i);
        }
        if edge_gen.len() != spec.total_edges() {
            return Err(Error::Config(format!(
                "expected {} edges, found {}",
                spec.total_edges(),
                edge_gen.len()
            )));
        }
        Ok(Self::from_edges(spec, fields[5], edge_gen, edge_bit))
    }
}

/// Configuration-model edge set for one position block: generator sockets of
/// the block matched against a shuffled copy of its code-bit sockets.
fn matched_block_edges(
    spec: &EnsembleSpec,
    position: usize,
    rng: &mut ChaCha8Rng,
) -> (Vec<u32>, Vec<u32>) {
    let n = spec.gens_per_position;
    let m = spec.bits_per_position();
    let gen_base = position * n;
    let bit_base = position * m;
    let mut bit_sockets: Vec<u32> = (0..m * spec.bit_degree)
        .map(|s| (bit_base + s / spec.bit_degree) as u32)
        .collect();
    bit_sockets.shuffle(rng);
    let edge_gen: Vec<u32> = (0..n * spec.gen_degree)
        .map(|s| (gen_base + s / spec.gen_degree) as u32)
        .collect();
    (edge_gen, bit_sockets)
}
