//! Exhaustive check of the probability sandwich and the typical-set size.

use markov_coord::prob::{Dist, Kernel};
use markov_coord::typicality::{aep_audit, AepAuditSpec};

fn main() -> markov_coord::Result<()> {
    let px = Dist::new(vec![0.3, 0.7])?;
    let w = Kernel::new(
        &[2, 2],
        2,
        vec![vec![0.8, 0.2], vec![0.4, 0.6], vec![0.25, 0.75], vec![0.1, 0.9]],
    )?;
    for eps in [0.3, 0.45] {
        let r = aep_audit(&AepAuditSpec::new(8, eps, px.clone(), w.clone()))?;
        println!(
            "eps={eps}: {} typical of {} pairs, bound {:.1}, rates [{:.3}, {:.3}] around H={:.3} +- {:.3}, passed={}",
            r.typical_count,
            r.pairs_total,
            r.cardinality_bound,
            r.min_rate,
            r.max_rate,
            r.entropy_rate,
            r.delta,
            r.passed
        );
    }
    Ok(())
}
