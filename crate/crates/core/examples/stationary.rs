//! Output chain of an input-driven Markov channel: structure, equilibrium and
//! the lifted triplet chain.

use markov_coord::prob::{
    chain_structure, induced_transition, lifted_transition, stationary_dist, triplet_law, Dist,
    Kernel,
};

fn main() -> markov_coord::Result<()> {
    let px = Dist::new(vec![0.3, 0.7])?;
    // rows keyed by (x, y')
    let w = Kernel::new(
        &[2, 2],
        2,
        vec![vec![0.8, 0.2], vec![0.4, 0.6], vec![0.25, 0.75], vec![0.1, 0.9]],
    )?;
    let t = induced_transition(&px, &w)?;
    let s = chain_structure(&t);
    println!("recurrent classes: {:?}", s.recurrent_classes);
    println!("unichain: {}, aperiodic: {}", s.is_unichain, s.is_aperiodic);

    let pi = stationary_dist(&t)?;
    println!("pi = {:?}", pi.pmf());

    let lifted = lifted_transition(&px, &w)?;
    let pi3 = stationary_dist(&lifted)?;
    let law = triplet_law(&pi, &px, &w)?;
    let diff: f64 = pi3.pmf().iter().zip(law.pmf()).map(|(a, b)| (a - b).abs()).sum();
    println!("lifted chain has {} states; |pi3 - pi*Px*W|_1 = {diff:.2e}", lifted.size());
    Ok(())
}
