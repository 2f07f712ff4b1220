//! Inner-bound slack of a candidate and a search over the auxiliary variable.

use markov_coord::prob::{Dist, Kernel};
use markov_coord::region::{
    assemble_inner, coordination_marginal, inner_feasibility, optimize_auxiliary,
    outer_feasibility, AuxSearch, InnerCandidate,
};

fn main() -> markov_coord::Result<()> {
    let channel = Kernel::new(
        &[2, 2],
        2,
        vec![vec![0.78, 0.22], vec![0.7, 0.3], vec![0.3, 0.7], vec![0.22, 0.78]],
    )?;
    let candidate = InnerCandidate {
        p_u: Dist::uniform(2)?,
        p_x: Dist::uniform(2)?,
        p_w_given_ux: Kernel::new(
            &[2, 2],
            2,
            vec![vec![0.9, 0.1], vec![0.9, 0.1], vec![0.2, 0.8], vec![0.2, 0.8]],
        )?,
        channel: channel.clone(),
        p_v_given_yxw: Kernel::deterministic(&[2, 2, 2], 2, |c| c[2])?,
    };
    let target = coordination_marginal(&assemble_inner(&candidate)?)?;
    let own = inner_feasibility(&candidate, &target)?;
    let outer = outer_feasibility(&candidate.to_outer()?, &target)?;
    println!(
        "candidate: I(X;Y|Y')={:.4} I(U;W|X)={:.4} slack={:.4} feasible={}",
        own.channel_info, own.source_info, own.slack, own.feasible
    );
    println!("same joint through the outer factorization: slack={:.4}", outer.slack);

    let mut opts = AuxSearch::new(2);
    opts.starts = 8;
    let best = optimize_auxiliary(&target, &channel, &opts)?;
    println!(
        "search: slack={:.4} gap={:.1e} from start {}",
        best.report.slack, best.report.marginal_gap, best.start
    );
    println!("P(W|U,X) rows: {:?}", best.candidate.p_w_given_ux.rows());
    Ok(())
}
