//! One run of the block-Markov scheme and its error events.

use markov_coord::codec::{run_scheme, SchemeConfig};
use markov_coord::prob::{Dist, Kernel};
use markov_coord::region::InnerCandidate;

fn main() -> markov_coord::Result<()> {
    let q = 0.44;
    let candidate = InnerCandidate {
        p_u: Dist::uniform(2)?,
        p_x: Dist::uniform(2)?,
        p_w_given_ux: Kernel::new(
            &[2, 2],
            2,
            vec![vec![1.0 - q, q], vec![1.0 - q, q], vec![q, 1.0 - q], vec![q, 1.0 - q]],
        )?,
        channel: Kernel::new(
            &[2, 2],
            2,
            vec![vec![0.78, 0.22], vec![0.7, 0.3], vec![0.3, 0.7], vec![0.22, 0.78]],
        )?,
        p_v_given_yxw: Kernel::deterministic(&[2, 2, 2], 2, |c| c[2])?,
    };
    for n in [100, 300] {
        let cfg = SchemeConfig::new(candidate.clone(), n, 30, 0.03, 0.25).with_seed(7);
        for w in cfg.rate_warnings()? {
            println!("warning: {w}");
        }
        let r = run_scheme(&cfg)?;
        println!(
            "n={n} m_count={} covering failures={} atypical={} decode errors={}/{} tv={:.4} tv(first B-1)={:.4}",
            r.m_count,
            r.covering_failures(),
            r.channel_atypical(),
            r.decode_errors(),
            r.decoded_blocks(),
            r.tv,
            r.tv_tilde
        );
    }
    Ok(())
}
