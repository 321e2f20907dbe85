use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::relcore::{BinRel, Carrier};
use crate::uord::{Basis, NamedRel, UniformPreorder};

pub fn leq_chain(n: usize) -> BinRel {
    BinRel::from_pairs(n, n, (0..n).flat_map(|a| (a..n).map(move |b| (a, b)))).unwrap()
}

pub fn chain(n: usize) -> UniformPreorder {
    UniformPreorder::from_order(Carrier::indexed(n), leq_chain(n)).unwrap()
}

pub fn diamond() -> UniformPreorder {
    let leq = BinRel::from_pairs(
        4,
        4,
        [(0, 0), (0, 1), (0, 2), (0, 3), (1, 1), (1, 3), (2, 2), (2, 3), (3, 3)],
    )
    .unwrap();
    UniformPreorder::from_order(Carrier::new(["bot", "a", "b", "top"]).unwrap(), leq).unwrap()
}

pub fn id_swap() -> UniformPreorder {
    let b = Basis::new(
        Carrier::new(["x", "y"]).unwrap(),
        vec![
            NamedRel::new("id", BinRel::identity(2)),
            NamedRel::new("swap", BinRel::from_pairs(2, 2, [(0, 1), (1, 0)]).unwrap()),
        ],
    )
    .unwrap();
    UniformPreorder::from_basis(b, false).unwrap()
}

/// Identity plus `k` random relations on `n` points, saturated.
pub fn random_uord(n: usize, k: usize, seed: u64) -> UniformPreorder {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut rels = vec![NamedRel::new("id", BinRel::identity(n))];
    for j in 0..k {
        let rows = (0..n).map(|_| rng.gen_range(0..1u64 << n)).collect();
        rels.push(NamedRel::new(format!("r{j}"), BinRel::from_rows(n, rows).unwrap()));
    }
    UniformPreorder::from_basis(Basis::new(Carrier::indexed(n), rels).unwrap(), false).unwrap()
}
