//! Frequency of a spurious index passing both decoder tests, at n and 2n,
//! for a rate below and a rate above the channel information.

use markov_coord::harness::{packing_probe, ExperimentConfig, Kind};

fn main() -> markov_coord::Result<()> {
    let mut cfg = ExperimentConfig::defaults(Kind::PackingProbe);
    cfg.trials = 40;
    // below and above I(X;Y|Y'); blocks stay short so the exhaustive scan is cheap
    cfg.sweep.n = vec![30, 60];
    cfg.sweep.rate = vec![0.05, 0.3];
    let rs = packing_probe(&cfg)?;
    for s in &rs.summaries {
        let freq = rs.summary(s.point, "event").map_or(f64::NAN, |m| m.mean);
        let thr = rs.summary(s.point, "threshold").map_or(f64::NAN, |m| m.mean);
        println!(
            "n={} R={} eps={}: frequency {freq:.3} (I(X;Y|Y') = {thr:.3})",
            s.params[0], s.params[1], s.params[2]
        );
    }
    Ok(())
}
