//! Acceptance checks. Prints one PASS/FAIL line per criterion and exits
//! non-zero if a criterion outside `KNOWN_FAILING` fails.

mod common;

use std::time::Instant;

use common::*;
use markov_coord::codec::*;
use markov_coord::harness::*;
use markov_coord::prob::*;
use markov_coord::region::*;
use markov_coord::sample::{rng_from, sample_input_driven};
use markov_coord::typicality::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Criteria whose literal statement does not hold; see the README.
const KNOWN_FAILING: &[usize] = &[10];

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        pass,
        detail: detail.into(),
    }
}

fn median(v: &mut [f64]) -> f64 {
    v.sort_by(f64::total_cmp);
    let k = v.len();
    if k % 2 == 1 {
        v[k / 2]
    } else {
        0.5 * (v[k / 2 - 1] + v[k / 2])
    }
}

fn random_instances() -> Vec<(Dist, Kernel)> {
    let mut rng = ChaCha8Rng::seed_from_u64(101);
    (0..100)
        .map(|_| {
            let nx = rng.gen_range(1..=4);
            let ny = rng.gen_range(1..=4);
            (random_dist(nx, &mut rng), random_channel(nx, ny, &mut rng))
        })
        .collect()
}

fn stationarity() -> Outcome {
    let mut worst_fix = 0.0f64;
    let mut worst_entry = 0.0f64;
    for (px, w) in random_instances() {
        let t = induced_transition(&px, &w).unwrap();
        let s = chain_structure(&t);
        assert!(s.is_unichain && s.is_aperiodic);
        let pi = stationary_dist(&t).unwrap();
        let step = t.step(pi.pmf());
        worst_fix = worst_fix.max(step.iter().zip(pi.pmf()).map(|(a, b)| (a - b).abs()).sum());
        let (nx, ny) = (px.size(), pi.size());
        for j in 0..ny {
            let mut rhs = 0.0;
            for i in 0..ny {
                for x in 0..nx {
                    rhs += pi.p(i) * px.p(x) * w.p(j, &[x, i]);
                }
            }
            worst_entry = worst_entry.max((rhs - pi.p(j)).abs());
        }
    }
    outcome(
        worst_fix <= 1e-10 && worst_entry <= 1e-10,
        format!("max ‖πT−π‖₁ = {worst_fix:.2e}, max entry error = {worst_entry:.2e}"),
    )
}

fn lifted_chain() -> Outcome {
    let mut worst = 0.0f64;
    for (px, w) in random_instances() {
        let pi = stationary_dist(&induced_transition(&px, &w).unwrap()).unwrap();
        let lifted = stationary_dist(&lifted_transition(&px, &w).unwrap()).unwrap();
        let direct = triplet_law(&pi, &px, &w).unwrap();
        let d: f64 = lifted.pmf().iter().zip(direct.pmf()).map(|(a, b)| (a - b).abs()).sum();
        worst = worst.max(d);
    }
    outcome(worst <= 1e-9, format!("max ℓ₁ = {worst:.2e} over 100 instances"))
}

fn exhaustive_aep() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(303);
    let mut instances = vec![(
        Dist::uniform(2).unwrap(),
        binary_kernel(&[2, 2], &[0.22, 0.3, 0.7, 0.78]),
    )];
    for _ in 0..3 {
        instances.push((random_dist(2, &mut rng), random_channel(2, 2, &mut rng)));
    }
    let mut audits = 0;
    let mut failures = Vec::new();
    let mut typical = 0.0;
    for (k, (px, w)) in instances.iter().enumerate() {
        let consts = AepConstants::new(px, w);
        for eps in [0.3, 0.5, 0.8] {
            let mut spec = AepAuditSpec::new(8, eps, px.clone(), w.clone());
            spec.mode = AuditMode::Exhaustive;
            spec.delta = Some(eps * (consts.l_x + consts.l_w));
            let r = aep_audit(&spec).unwrap();
            audits += 1;
            typical += r.typical_count;
            let ok = !r.statistical
                && r.sandwich_violations == 0.0
                && r.typical_count < r.cardinality_bound
                && r.passed;
            if !ok {
                failures.push(format!("instance {k} eps {eps}"));
            }
        }
    }
    outcome(
        failures.is_empty(),
        format!("{audits} exhaustive audits, {typical} typical pairs in total, failures: {failures:?}"),
    )
}

fn ergodicity() -> Outcome {
    let px = Dist::uniform(2).unwrap();
    let w = binary_kernel(&[2, 2], &[0.22, 0.3, 0.7, 0.78]);
    let r = TypicalityReference::new(&px, &w).unwrap();
    let gaps = |n: usize| -> Vec<f64> {
        (0..100u64)
            .map(|s| {
                let (x, y) = sample_input_driven(&px, &w, 0, n, &mut rng_from(s * 7919 + n as u64));
                type_gap(&triplet_type(&x, &y, 0, 2, 2).unwrap(), &r.triplet).unwrap()
            })
            .collect()
    };
    let mut big = gaps(10_000);
    let mut small = gaps(1_000);
    let within = big.iter().filter(|&&g| g <= 0.05).count();
    let (mb, ms) = (median(&mut big), median(&mut small));
    outcome(
        within >= 95 && mb < ms,
        format!("{within}/100 runs within 0.05 at n=1e4; median {mb:.4} (n=1e4) vs {ms:.4} (n=1e3)"),
    )
}

fn typicality_closure() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(505);
    let (mut hyp, mut violations, mut general_misses) = (0, 0, 0);
    for inst in 0..10 {
        let nx = 2 + inst % 2;
        let ny = 2 + (inst / 2) % 2;
        let px = random_dist(nx, &mut rng);
        let w = random_channel(nx, ny, &mut rng);
        let reference = TypicalityReference::new(&px, &w).unwrap();
        for k in 0..1000 {
            let n = [50, 200, 1000][k % 3];
            // a third of the pairs use a skewed input law
            let gen_px = if k % 3 == 1 { random_dist(nx, &mut rng) } else { px.clone() };
            let (x, y) = sample_input_driven(&gen_px, &w, 0, n, &mut rng_from(rng.gen()));
            let g = reference.gaps(&triplet_type(&x, &y, 0, nx, ny).unwrap()).unwrap();
            for eps in [0.1, 0.2, 0.4] {
                if !g.joint_composition_holds(eps) {
                    general_misses += 1;
                }
                if g.joint > eps {
                    continue;
                }
                hyp += 1;
                let item1 = g.x_marginal <= eps && g.pair_marginal <= eps && g.conditional <= 2.0 * eps;
                let item2 = g.joint <= 2.0 * eps;
                if !(item1 && item2 && g.marginal_closure_holds(eps)) {
                    violations += 1;
                }
            }
        }
    }
    outcome(
        violations == 0 && hyp > 0,
        format!(
            "{hyp} (pair, ε) cases meet the joint hypothesis, {violations} violations; \
             {general_misses} cases break composition without it"
        ),
    )
}

fn region_oracle() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let inst = Binary::new([0.5, 0.5], [0.5, 0.5], [[0.2, 0.35], [0.7, 0.85]]);
    let mut worst = f64::NEG_INFINITY;
    for _ in 0..6 {
        let mut r = || (rng.gen_range(0..=20) as f64) * 0.05;
        let k1 = [[r(), r()], [r(), r()]];
        let v1 = [[[0.0, 1.0], [0.0, 1.0]], [[rng.gen(), rng.gen()], [rng.gen(), rng.gen()]]];
        let t = target_of(&binary_candidate(&inst, k1, v1));
        let (grid, _) = grid_oracle(&inst, &t, 0.05).expect("generating kernel is on the grid");
        let found = optimize_auxiliary(&t, &inst.channel(), &AuxSearch::new(2)).unwrap();
        assert!(found.report.marginal_gap <= MARGINAL_TOL);
        worst = worst.max(grid - found.report.slack);
    }
    // nested-loop assembly
    let mut assembly = 0.0f64;
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    for _ in 0..20 {
        let c = InnerCandidate {
            p_u: random_dist(2, &mut rng),
            p_x: random_dist(2, &mut rng),
            p_w_given_ux: random_kernel(&[2, 2], 2, &mut rng),
            channel: random_channel(2, 2, &mut rng),
            p_v_given_yxw: random_kernel(&[2, 2, 2], 2, &mut rng),
        };
        let pi = c.equilibrium().unwrap();
        let oracle = nested_inner(&c, pi.pmf());
        let j = assemble_inner(&c).unwrap();
        for (a, b) in j.pmf().iter().zip(&oracle) {
            assembly = assembly.max((a - b).abs());
        }
        // the outer joint of the embedded candidate is the same table
        let o = assemble_outer(&c.to_outer().unwrap()).unwrap();
        for (a, b) in o.pmf().iter().zip(&oracle) {
            assembly = assembly.max((a - b).abs());
        }
    }
    outcome(
        worst <= 1e-3 && assembly <= 1e-12,
        format!("grid minus search slack ≤ {worst:.2e} over 6 targets; assembly error {assembly:.2e}"),
    )
}

fn tuned() -> (InnerCandidate, FeasibilityReport) {
    let c = InstanceSpec::default().candidate().unwrap();
    let r = inner_feasibility(&c, &target_of(&c)).unwrap();
    (c, r)
}

fn covering() -> Outcome {
    let (c, r) = tuned();
    let rate = r.source_info + 0.15;
    let (mut fails, mut total, mut first) = (0, 0, 0);
    for seed in 0..20 {
        let cfg = SchemeConfig::new(c.clone(), 300, 201, rate, 0.25).with_seed(seed);
        let sources = draw_sources(&cfg).unwrap();
        let cb = gen_codebook(&cfg).unwrap();
        let laws = SchemeLaws::new(&c).unwrap();
        let (idx, failed) = encoder_chain(&sources, &cb, &laws, cfg.eps, cfg.scan_limit).unwrap();
        fails += failed[..200].iter().filter(|&&f| f).count();
        first += idx[1..].iter().zip(&failed[..200]).filter(|&(&m, &f)| m == 0 && !f).count();
        total += 200;
    }
    let rate_obs = fails as f64 / total as f64;
    outcome(
        rate_obs < 0.05,
        format!(
            "R = {rate:.4}: {fails}/{total} covering failures ({:.2}%); index 0 was typical in {first}/{total}",
            100.0 * rate_obs
        ),
    )
}

fn packing() -> Outcome {
    let (c, r) = tuned();
    let rate = r.channel_info - 0.15;
    let (mut errors, mut decoded) = (0, 0);
    for seed in 0..10 {
        let res = run_scheme(&SchemeConfig::new(c.clone(), 300, 21, rate, 0.25).with_seed(seed)).unwrap();
        errors += res.decode_errors();
        decoded += res.decoded_blocks();
    }
    let err_rate = errors as f64 / decoded as f64;
    let mut cfg = ExperimentConfig::defaults(Kind::PackingProbe);
    cfg.sweep.n = vec![300, 600];
    cfg.sweep.rate = vec![rate];
    cfg.sweep.eps = vec![0.25];
    cfg.trials = 100;
    let rs = packing_probe(&cfg).unwrap();
    let freq = |n: f64| {
        let p = rs.summaries.iter().find(|s| s.params[0] == n).unwrap().point;
        rs.summary(p, "event").unwrap().mean
    };
    let (f1, f2) = (freq(300.0), freq(600.0));
    outcome(
        err_rate < 0.05 && f2 <= f1 + 0.02,
        format!(
            "R = {rate:.4}: {errors}/{decoded} wrong or ambiguous ({:.2}%); packing frequency {f1:.3} (n=300) → {f2:.3} (n=600)",
            100.0 * err_rate
        ),
    )
}

fn coordination() -> Outcome {
    let (c, r) = tuned();
    let rate = 0.03;
    let mut identity_ok = true;
    let (mut first, mut encodings) = (0, 0);
    let mut run = |n: usize| -> Vec<f64> {
        (0..50u64)
            .map(|seed| {
                let cfg = SchemeConfig::new(c.clone(), n, 30, rate, 0.25).with_seed(seed);
                let (res, last) = run_scheme_with_sources(&cfg, &draw_sources(&cfg).unwrap()).unwrap();
                identity_ok &= res.mixing_identity(&last);
                first += res.true_indices[1..].iter().filter(|&&m| m == 0).count();
                encodings += res.blocks - 1;
                res.tv
            })
            .collect()
    };
    let mut long = run(300);
    let mut short = run(100);
    let (m300, m100) = (median(&mut long), median(&mut short));
    outcome(
        r.slack >= 0.1 && m300 <= 0.15 && m300 <= m100 && identity_ok,
        format!(
            "slack {:.4}; median ℓ₁ {m300:.4} (n=300) vs {m100:.4} (n=100); block identity {}; \
             index 0 sent in {first}/{encodings} blocks",
            r.slack,
            if identity_ok { "exact in all runs" } else { "violated" }
        ),
    )
}

fn separation() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(1010);
    let (mut mismatches, mut copy_ok, mut tight_ok) = (0, 0, 0);
    for _ in 0..50 {
        let px = random_dist(2, &mut rng);
        let channel = random_channel(2, 2, &mut rng);
        let p_uv = JointDist::new(vec![2, 2], random_row(4, &mut rng)).unwrap();
        let pu = p_uv.marginal_dist(0).unwrap();
        let v_given_u: Vec<Vec<f64>> = (0..2)
            .map(|u| (0..2).map(|v| p_uv.get(&[u, v]) / pu.p(u)).collect())
            .collect();
        // W = U; the decoder draws V from P_{V|U} applied to W
        let copy = InnerCandidate {
            p_u: pu.clone(),
            p_x: px.clone(),
            p_w_given_ux: Kernel::deterministic(&[2, 2], 2, |c| c[0]).unwrap(),
            channel: channel.clone(),
            p_v_given_yxw: Kernel::new(&[2, 2, 2], 2, (0..8).map(|r| v_given_u[r % 2].clone()).collect()).unwrap(),
        };
        let target = target_of(&copy);
        let xyy = target.marginal(&[1, 2, 3]).unwrap();
        let sep = separation_slack(&p_uv, &xyy).unwrap();
        let report = inner_feasibility(&copy, &target).unwrap();
        if report.feasible != (sep >= -1e-9) {
            mismatches += 1;
        }
        if !report.feasible || sep >= 0.0 {
            copy_ok += 1;
        }
        // W drawn from P_{V|U} and copied to V
        let tight = InnerCandidate {
            p_w_given_ux: Kernel::new(&[2, 2], 2, (0..4).map(|r| v_given_u[r / 2].clone()).collect()).unwrap(),
            p_v_given_yxw: Kernel::deterministic(&[2, 2, 2], 2, |c| c[2]).unwrap(),
            ..copy
        };
        let rt = inner_feasibility(&tight, &target).unwrap();
        if rt.marginal_gap <= 1e-12 && rt.feasible == (sep >= -1e-9) {
            tight_ok += 1;
        }
    }
    outcome(
        mismatches == 0,
        format!(
            "W = U disagrees with the separation test on {mismatches}/50 targets; \
             W = U feasible ⇒ separation holds on {copy_ok}/50; \
             W ~ P(V|U), V = W agrees on {tight_ok}/50"
        ),
    )
}

fn determinism_and_causality() -> Outcome {
    let mut cfg = ExperimentConfig::defaults(Kind::Simulate);
    cfg.trials = 4;
    cfg.sweep.n = vec![60, 120];
    cfg.sweep.blocks = vec![6];
    cfg.sweep.eps = vec![0.25];
    let tmp = tempfile::tempdir().unwrap();
    let read = |d: &std::path::Path| -> Vec<String> {
        ["records.csv", "long.csv", "summary.json"]
            .iter()
            .map(|f| {
                std::fs::read_to_string(d.join(f))
                    .unwrap()
                    .lines()
                    .filter(|l| !l.contains("\"timestamp\""))
                    .collect::<Vec<_>>()
                    .join("\n")
            })
            .collect()
    };
    let mut runs = Vec::new();
    let mut causal = true;
    let mut rows = 0;
    for k in 0..2 {
        let rs = run_experiment(&cfg).unwrap();
        let ci = rs.metric_index("causality").unwrap();
        causal &= rs.rows.iter().all(|r| r.metrics[ci] == 1.0);
        rows += rs.rows.len();
        let dir = tmp.path().join(k.to_string());
        emit_report(&rs, &dir).unwrap();
        runs.push(read(&dir));
    }
    // every block of one run, not only the sampled one
    let (c, _) = tuned();
    let sc = SchemeConfig::new(c, 60, 6, 0.03, 0.25).with_seed(17);
    for b in 0..sc.blocks {
        causal &= causality_check(&sc, b).unwrap();
    }
    let identical = runs[0] == runs[1];
    outcome(
        identical && causal,
        format!(
            "reports identical: {identical}; causality held on {rows} simulate rows and all blocks of a full run: {causal}"
        ),
    )
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 11] = [
        ("stationary law", stationarity),
        ("lifted chain", lifted_chain),
        ("exhaustive AEP", exhaustive_aep),
        ("ergodicity of triplet types", ergodicity),
        ("typicality closure", typicality_closure),
        ("region oracle", region_oracle),
        ("covering regime", covering),
        ("packing regime", packing),
        ("end-to-end coordination", coordination),
        ("separation consistency", separation),
        ("determinism and causality", determinism_and_causality),
    ];
    let mut unexpected = Vec::new();
    for (i, (name, f)) in criteria.iter().enumerate() {
        let k = i + 1;
        let t0 = Instant::now();
        let o = f();
        let tag = if o.pass { "PASS" } else { "FAIL" };
        let known = !o.pass && KNOWN_FAILING.contains(&k);
        println!(
            "{tag} {k:>2} {name}: {} [{:.1}s]{}",
            o.detail,
            t0.elapsed().as_secs_f64(),
            if known { " (known)" } else { "" }
        );
        if !o.pass && !known {
            unexpected.push(k);
        }
    }
    if !unexpected.is_empty() {
        eprintln!("unexpected failures: {unexpected:?}");
        std::process::exit(1);
    }
}
