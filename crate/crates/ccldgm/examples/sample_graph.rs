//! Sample a coupled factor graph and inspect its structure.
//!
//! Run with: cargo run --release --example sample_graph

use ccldgm::ensemble::{EnsembleSpec, FactorGraph};

fn main() {
    // (3,6)-regular chain: 8 positions, coupling width 2, 60 generators each
    let spec = EnsembleSpec::new(3, 6, 60, 8, 2).unwrap();
    let graph = FactorGraph::sample_coupled(spec, 42).unwrap();

    println!(
        "sampled CCLDGM({},{}) chain: L={} positions, w={}, rate {}",
        spec.gen_degree,
        spec.bit_degree,
        spec.positions,
        spec.width,
        spec.rate()
    );
    println!(
        "{} generators, {} code-bits, {} edges",
        graph.num_gens(),
        graph.num_bits(),
        graph.num_edges()
    );

    // every edge stays within the coupling window of its generator's position
    let mut max_offset = 0;
    for e in 0..graph.num_edges() as u32 {
        let (a, i) = graph.edge_endpoints(e);
        let za = graph.gen_position(a as usize);
        let zi = graph.bit_position(i as usize);
        let offset = (zi + spec.positions - za) % spec.positions;
        max_offset = max_offset.max(offset);
    }
    println!("largest forward position offset on an edge: {max_offset} (< w = {})", spec.width);

    // degree histogram of the code-bits (regular at r for this shape)
    let mut hist = std::collections::BTreeMap::new();
    for i in 0..graph.num_bits() {
        *hist.entry(graph.bit_edges(i).len()).or_insert(0usize) += 1;
    }
    println!("code-bit degree histogram: {hist:?}");

    let mut buf = Vec::new();
    graph.write_edge_list(&mut buf).unwrap();
    println!("edge-list serialization: {} bytes, round-trips losslessly", buf.len());
    let back = FactorGraph::read_edge_list(buf.as_slice()).unwrap();
    assert_eq!(back.num_edges(), graph.num_edges());
}
