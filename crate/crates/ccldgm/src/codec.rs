//! Source words, index words, the mod-2 reconstruction map and Hamming
//! distortion. Everything here is pure and shared by the encoder, the
//! enumeration oracle and the metrics.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::ensemble::FactorGraph;
use crate::error::{Error, Result};

/// One bit per generator node.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SourceWord {
    bits: Vec<u8>,
}

impl SourceWord {
    pub fn from_bits(bits: Vec<u8>) -> Result<Self> {
        if bits.iter().any(|&b| b > 1) {
            return Err(Error::Usage("source bits must be 0 or 1".into()));
        }
        Ok(SourceWord { bits })
    }

    /// i.i.d. uniform bits, deterministic in the seed.
    pub fn sample(length: usize, seed: u64) -> Result<Self> {
        if length == 0 {
            return Err(Error::InvalidParameter("source length must be >= 1".into()));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        Ok(SourceWord {
            bits: (0..length).map(|_| rng.random_range(0..2u8)).collect(),
        })
    }

    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }

    pub fn bit(&self, a: usize) -> u8 {
        self.bits[a]
    }

    pub fn bits(&self) -> &[u8] {
        &self.bits
    }

    pub fn xor(&self, other: &SourceWord) -> Result<SourceWord> {
        if self.len() != other.len() {
            return Err(Error::Usage("length mismatch in xor".into()));
        }
        Ok(SourceWord {
            bits: self
                .bits
                .iter()
                .zip(&other.bits)
                .map(|(a, b)| a ^ b)
                .collect(),
        })
    }

    pub fn to_ascii(&self) -> String {
        bits_to_ascii(&self.bits)
    }

    pub fn from_ascii(s: &str) -> Result<Self> {
        Self::from_bits(ascii_to_bits(s)?)
    }

    pub fn to_packed(&self) -> Vec<u8> {
        pack_bits(&self.bits)
    }

    pub fn from_packed(bytes: &[u8], length: usize) -> Result<Self> {
        Self::from_bits(unpack_bits(bytes, length)?)
    }
}

const UNSET: u8 = 0xff;

/// One bit per code-bit node; entries start unset and are filled by
/// decimation. A complete word has no unset entries.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IndexWord {
    bits: Vec<u8>,
}

impl IndexWord {
    pub fn unset(length: usize) -> Self {
        IndexWord {
            bits: vec![UNSET; length],
        }
    }

    pub fn from_bits(bits: Vec<u8>) -> Result<Self> {
        if bits.iter().any(|&b| b > 1) {
            return Err(Error::Usage("index bits must be 0 or 1".into()));
        }
        Ok(IndexWord { bits })
    }

    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }

    pub fn get(&self, i: usize) -> Option<u8> {
        match self.bits[i] {
            UNSET => None,
            b => Some(b),
        }
    }

    pub fn set(&mut self, i: usize, value: u8) -> Result<()> {
        if value > 1 {
            return Err(Error::Usage("index bit must be 0 or 1".into()));
        }
        if self.bits[i] != UNSET {
            return Err(Error::Usage(format!("index bit {i} already set")));
        }
        self.bits[i] = value;
        Ok(())
    }

    pub fn is_complete(&self) -> bool {
        self.bits.iter().all(|&b| b != UNSET)
    }

    /// Bits of a complete word.
    pub fn bits(&self) -> Result<&[u8]> {
        if !self.is_complete() {
            return Err(Error::Usage("index word is incomplete".into()));
        }
        Ok(&self.bits)
    }

    pub fn xor(&self, other: &IndexWord) -> Result<IndexWord> {
        let (a, b) = (self.bits()?, other.bits()?);
        if a.len() != b.len() {
            return Err(Error::Usage("length mismatch in xor".into()));
        }
        Ok(IndexWord {
            bits: a.iter().zip(b).map(|(x, y)| x ^ y).collect(),
        })
    }

    pub fn to_ascii(&self) -> String {
        bits_to_ascii(&self.bits)
    }

    pub fn from_ascii(s: &str) -> Result<Self> {
        Self::from_bits(ascii_to_bits(s)?)
    }

    pub fn to_packed(&self) -> Result<Vec<u8>> {
        Ok(pack_bits(self.bits()?))
    }

    pub fn from_packed(bytes: &[u8], length: usize) -> Result<Self> {
        Self::from_bits(unpack_bits(bytes, length)?)
    }
}

/// Reconstruction map: `x̂_a` is the XOR of the index word over the edges at
/// generator `a`, parallel edges cancelling in pairs. The graph must be in
/// its as-sampled topology.
pub fn reconstruct(graph: &FactorGraph, u: &IndexWord) -> Result<SourceWord> {
    if u.len() != graph.num_bits() {
        return Err(Error::Usage(format!(
            "index word length {} does not match code-bit count {}",
            u.len(),
            graph.num_bits()
        )));
    }
    let bits = u.bits()?;
    if graph.alive_bits().len() != graph.num_bits() {
        return Err(Error::Usage(
            "reconstruct requires the original (undecimated) graph".into(),
        ));
    }
    let mut out = vec![0u8; graph.num_gens()];
    for (a, slot) in out.iter_mut().enumerate() {
        let mut acc = 0u8;
        for &e in graph.gen_edges(a) {
            let (_, i) = graph.edge_endpoints(e);
            acc ^= bits[i as usize];
        }
        *slot = acc;
    }
    SourceWord::from_bits(out)
}

/// Normalized Hamming distortion `d_H(x, x̂) / (n·L)`.
pub fn distortion(x: &SourceWord, x_hat: &SourceWord) -> Result<f64> {
    if x.len() != x_hat.len() {
        return Err(Error::Usage(format!(
            "length mismatch: {} vs {}",
            x.len(),
            x_hat.len()
        )));
    }
    let diff = x
        .bits()
        .iter()
        .zip(x_hat.bits())
        .filter(|(a, b)| a != b)
        .count();
    Ok(diff as f64 / x.len() as f64)
}

fn bits_to_ascii(bits: &[u8]) -> String {
    bits.iter()
        .map(|&b| match b {
            0 => '0',
            1 => '1',
            _ => '?',
        })
        .collect()
}

fn ascii_to_bits(s: &str) -> Result<Vec<u8>> {
    s.trim()
        .chars()
        .map(|c| match c {
            '0' => Ok(0),
            '1' => Ok(1),
            _ => Err(Error::Usage(format!("invalid bit character {c:?}"))),
        })
        .collect()
}

/// Little-endian packing: bit `k` goes to byte `k/8`, position `k%8`.
fn pack_bits(bits: &[u8]) -> Vec<u8> {
    let mut out = vec![0u8; bits.len().div_ceil(8)];
    for (k, &b) in bits.iter().enumerate() {
        out[k / 8] |= b << (k % 8);
    }
    out
}

fn unpack_bits(bytes: &[u8], length: usize) -> Result<Vec<u8>> {
    if bytes.len() != length.div_ceil(8) {
        return Err(Error::Usage("packed length mismatch".into()));
    }
    Ok((0..length).map(|k| (bytes[k / 8] >> (k % 8)) & 1).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ensemble::EnsembleSpec;

    fn small_graph(seed: u64) -> FactorGraph {
        let spec = EnsembleSpec::new(3, 6, 20, 1, 1).unwrap();
        FactorGraph::sample_uncoupled(spec, seed).unwrap()
    }

    #[test]
    fn all_zero_reconstructs_to_zero() {
        let g = small_graph(1);
        let u = IndexWord::from_bits(vec![0; g.num_bits()]).unwrap();
        let x_hat = reconstruct(&g, &u).unwrap();
        assert!(x_hat.bits().iter().all(|&b| b == 0));
    }

    #[test]
    fn reconstruct_is_linear() {
        let g = small_graph(2);
        let u = IndexWord::from_bits(
            SourceWord::sample(g.num_bits(), 10).unwrap().bits().to_vec(),
        )
        .unwrap();
        let v = IndexWord::from_bits(
            SourceWord::sample(g.num_bits(), 11).unwrap().bits().to_vec(),
        )
        .unwrap();
        let lhs = reconstruct(&g, &u.xor(&v).unwrap()).unwrap();
        let rhs = reconstruct(&g, &u)
            .unwrap()
            .xor(&reconstruct(&g, &v).unwrap())
            .unwrap();
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn single_generator_parity() {
        // generator with edges to bits 1 and 3 (0-based: 0 and 2), u = 1,0,1,0
        let u = [1u8, 0, 1, 0];
        let x_hat = u[0] ^ u[2];
        assert_eq!(x_hat, 0);
    }

    #[test]
    fn distortion_extremes() {
        let x = SourceWord::from_bits(vec![0, 1, 1, 0, 1, 0, 0, 1]).unwrap();
        assert_eq!(distortion(&x, &x).unwrap(), 0.0);
        let comp = SourceWord::from_bits(x.bits().iter().map(|b| b ^ 1).collect()).unwrap();
        assert_eq!(distortion(&x, &comp).unwrap(), 1.0);
        let mut two_off = x.bits().to_vec();
        two_off[0] ^= 1;
        two_off[5] ^= 1;
        let y = SourceWord::from_bits(two_off).unwrap();
        assert_eq!(distortion(&x, &y).unwrap(), 0.25);
    }

    #[test]
    fn distortion_rejects_length_mismatch() {
        let x = SourceWord::from_bits(vec![0, 1]).unwrap();
        let y = SourceWord::from_bits(vec![0]).unwrap();
        assert!(distortion(&x, &y).is_err());
    }

    #[test]
    fn source_sampling_deterministic() {
        let a = SourceWord::sample(1000, 5).unwrap();
        let b = SourceWord::sample(1000, 5).unwrap();
        assert_eq!(a, b);
        assert!(SourceWord::sample(0, 5).is_err());
    }

    #[test]
    fn source_mean_concentrates() {
        let x = SourceWord::sample(1_000_000, 123).unwrap();
        let mean = x.bits().iter().map(|&b| b as f64).sum::<f64>() / x.len() as f64;
        assert!((mean - 0.5).abs() < 0.002, "mean {mean}");
    }

    #[test]
    fn incomplete_word_rejected() {
        let g = small_graph(3);
        let mut u = IndexWord::unset(g.num_bits());
        u.set(0, 1).unwrap();
        assert!(reconstruct(&g, &u).is_err());
        assert!(u.set(0, 0).is_err()); // double set
    }

    #[test]
    fn gauge_symmetry() {
        // d_H(x ⊕ x̂(v), x̂(u)) = d_H(x, x̂(u ⊕ v))
        let g = small_graph(4);
        let bits = |seed| SourceWord::sample(g.num_bits(), seed).unwrap().bits().to_vec();
        let u = IndexWord::from_bits(bits(20)).unwrap();
        let v = IndexWord::from_bits(bits(21)).unwrap();
        let x = SourceWord::sample(g.num_gens(), 22).unwrap();
        let lhs = distortion(
            &x.xor(&reconstruct(&g, &v).unwrap()).unwrap(),
            &reconstruct(&g, &u).unwrap(),
        )
        .unwrap();
        let rhs = distortion(&x, &reconstruct(&g, &u.xor(&v).unwrap()).unwrap()).unwrap();
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn ascii_and_packed_round_trip() {
        let x = SourceWord::sample(37, 9).unwrap();
        assert_eq!(SourceWord::from_ascii(&x.to_ascii()).unwrap(), x);
        assert_eq!(SourceWord::from_packed(&x.to_packed(), 37).unwrap(), x);
    }
}
