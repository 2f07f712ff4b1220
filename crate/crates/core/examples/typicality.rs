//! Markov types of a sampled input/output pair and the gaps to the reference laws.

use markov_coord::prob::{Dist, Kernel};
use markov_coord::sample::{rng_from, sample_input_driven};
use markov_coord::typicality::{triplet_type, TypicalityReference};

fn main() -> markov_coord::Result<()> {
    let px = Dist::new(vec![0.5, 0.5])?;
    let w = Kernel::new(
        &[2, 2],
        2,
        vec![vec![0.78, 0.22], vec![0.7, 0.3], vec![0.3, 0.7], vec![0.22, 0.78]],
    )?;
    let reference = TypicalityReference::new(&px, &w)?;
    let eps = 0.05;
    for n in [100, 1_000, 10_000, 100_000] {
        let (x, y) = sample_input_driven(&px, &w, 0, n, &mut rng_from(n as u64));
        let t = triplet_type(&x, &y, 0, 2, 2)?;
        let g = reference.gaps(&t)?;
        println!(
            "n={n:>6} joint={:.4} x={:.4} pair={:.4} cond={:.4} typical={}",
            g.joint,
            g.x_marginal,
            g.pair_marginal,
            g.conditional,
            g.joint <= eps
        );
    }
    Ok(())
}
