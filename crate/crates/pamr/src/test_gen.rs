//! Seeded random graphs for property-style tests. Wellformed by
//! construction: one instance per variable, tree edges from earlier to later
//! variables, occasional extra forward edges for reentrancy, a few
//! attributes of every constant kind.

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::graph::{Constant, Graph, GraphBuilder};

pub(crate) fn random_graph(rng: &mut ChaCha8Rng, max_vars: usize) -> Graph {
    let concepts = ["xastan", "raftan", "doxtar", "city", "bad"];
    let roles = ["ARG0", "ARG1", "mod", "time"];
    let n = rng.gen_range(1..=max_vars);
    let mut builder = GraphBuilder::new("v0").unwrap();
    for i in 0..n {
        builder = builder
            .instance(&format!("v{i}"), concepts[rng.gen_range(0..concepts.len())])
            .unwrap();
    }
    for i in 1..n {
        let parent = rng.gen_range(0..i);
        builder = builder
            .edge(
                &format!("v{parent}"),
                roles[rng.gen_range(0..roles.len())],
                &format!("v{i}"),
            )
            .unwrap();
    }
    if n > 1 && rng.gen_bool(0.5) {
        let i = rng.gen_range(0..n - 1);
        let j = rng.gen_range(i + 1..n);
        builder = builder
            .edge(
                &format!("v{i}"),
                roles[rng.gen_range(0..roles.len())],
                &format!("v{j}"),
            )
            .unwrap();
    }
    for _ in 0..rng.gen_range(0..=2) {
        let i = rng.gen_range(0..n);
        let value = match rng.gen_range(0..4) {
            0 => Constant::Plus,
            1 => Constant::Minus,
            2 => Constant::number("1320").unwrap(),
            _ => Constant::text("tehrân").unwrap(),
        };
        builder = builder
            .attribute(&format!("v{i}"), "polarity", value)
            .unwrap();
    }
    builder.build()
}

pub(crate) fn random_pair(seed: u64, max_vars: usize) -> (Graph, Graph) {
    use rand::SeedableRng;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (
        random_graph(&mut rng, max_vars),
        random_graph(&mut rng, max_vars),
    )
}
