use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::config::{ExperimentConfig, Kind};
use crate::codec::{
    causality_check, draw_sources, m_count, packing_trial, run_scheme_with_sources, SchemeConfig,
    SchemeLaws,
};
use crate::error::{Error, Result};
use crate::prob::{l1, Dist, JointDist, Kernel};
use crate::region::{
    assemble_inner, coordination_marginal, inner_feasibility, optimize_auxiliary, outer_feasibility,
    separation_slack, AuxSearch, InnerCandidate,
};
use crate::sample::{rng_from, sample_input_driven};
use crate::typicality::{
    aep_audit, sequence_log_prob, triplet_type, AepAuditSpec, EmpiricalType, TypicalityReference,
};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Metadata {
    pub kind: Kind,
    pub config_hash: String,
    pub tool_version: String,
    /// Seconds since the Unix epoch.
    pub timestamp: u64,
    pub master_seed: u64,
    pub trials: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Record {
    pub point: usize,
    pub params: Vec<f64>,
    pub trial: usize,
    pub seed: u64,
    /// `NaN` everywhere when `error` is set.
    pub metrics: Vec<f64>,
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricSummary {
    pub name: String,
    pub count: usize,
    pub mean: f64,
    pub median: f64,
    pub q05: f64,
    pub q95: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PointSummary {
    pub point: usize,
    pub params: Vec<f64>,
    pub trials: usize,
    pub errors: usize,
    pub metrics: Vec<MetricSummary>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RecordSet {
    pub metadata: Metadata,
    pub param_names: Vec<String>,
    pub metric_names: Vec<String>,
    pub rows: Vec<Record>,
    pub summaries: Vec<PointSummary>,
}

impl RecordSet {
    pub fn error_rows(&self) -> usize {
        self.rows.iter().filter(|r| r.error.is_some()).count()
    }

    pub fn metric_index(&self, name: &str) -> Option<usize> {
        self.metric_names.iter().position(|m| m == name)
    }

    pub fn summary(&self, point: usize, metric: &str) -> Option<&MetricSummary> {
        let i = self.metric_index(metric)?;
        self.summaries.get(point).map(|s| &s.metrics[i])
    }
}

pub fn param_names(kind: Kind) -> &'static [&'static str] {
    match kind {
        Kind::Region => &["w_size"],
        Kind::Simulate => &["n", "blocks", "rate", "eps"],
        Kind::PackingProbe => &["n", "rate", "eps"],
        Kind::TypicalityAudit | Kind::AepAudit => &["n", "eps"],
    }
}

pub fn metric_names(kind: Kind) -> &'static [&'static str] {
    match kind {
        Kind::Region => &[
            "slack",
            "marginal_gap",
            "feasible",
            "channel_info",
            "source_info",
            "best_start",
            "candidate_slack",
            "candidate_gap",
            "outer_slack",
            "separation_slack",
        ],
        Kind::Simulate => &[
            "tv",
            "tv_tilde",
            "m_count",
            "covering_rate",
            "atypical_rate",
            "decode_error_rate",
            "mixing_identity",
            "causality",
        ],
        Kind::PackingProbe => &["event", "m_count", "threshold"],
        Kind::TypicalityAudit => &[
            "joint_gap",
            "typical",
            "x_marginal_gap",
            "pair_marginal_gap",
            "conditional_gap",
            "closure",
            "composition",
            "log_prob_rate",
            "entropy_rate",
        ],
        Kind::AepAudit => &[
            "typical_count",
            "cardinality_bound",
            "typical_probability",
            "min_rate",
            "max_rate",
            "entropy_rate",
            "delta",
            "delta_required",
            "sandwich_violations",
            "statistical",
            "passed",
        ],
    }
}

fn sorted(mut v: Vec<f64>) -> Vec<f64> {
    v.sort_by(|a, b| a.total_cmp(b));
    v.dedup();
    v
}

fn as_f64<T: Copy + Into<f64>>(v: &[T]) -> Vec<f64> {
    v.iter().map(|&x| x.into()).collect()
}

fn usizes(v: &[usize]) -> Vec<f64> {
    v.iter().map(|&x| x as f64).collect()
}

/// Sweep points in canonical (lexicographically sorted) order.
pub fn sweep_points(cfg: &ExperimentConfig) -> Vec<Vec<f64>> {
    let sw = &cfg.sweep;
    let axes: Vec<Vec<f64>> = match cfg.kind {
        Kind::Region => vec![usizes(&cfg.w_sizes())],
        Kind::Simulate => vec![
            usizes(&sw.n),
            usizes(&sw.blocks),
            as_f64(&sw.rate),
            as_f64(&sw.eps),
        ],
        Kind::PackingProbe => vec![usizes(&sw.n), as_f64(&sw.rate), as_f64(&sw.eps)],
        Kind::TypicalityAudit | Kind::AepAudit => vec![usizes(&sw.n), as_f64(&sw.eps)],
    };
    let axes: Vec<Vec<f64>> = axes.into_iter().map(sorted).collect();
    let mut points: Vec<Vec<f64>> = vec![vec![]];
    for axis in &axes {
        points = points
            .into_iter()
            .flat_map(|p| {
                axis.iter().map(move |&v| {
                    let mut q = p.clone();
                    q.push(v);
                    q
                })
            })
            .collect();
    }
    points
}

/// Seed of one trial, from a hash of the master seed, the point and the trial.
pub fn trial_seed(master_seed: u64, kind: Kind, params: &[f64], trial: usize) -> u64 {
    let mut h = Sha256::new();
    h.update(master_seed.to_le_bytes());
    h.update(kind.name().as_bytes());
    for p in params {
        h.update(p.to_bits().to_le_bytes());
    }
    h.update((trial as u64).to_le_bytes());
    let d = h.finalize();
    u64::from_le_bytes(d[..8].try_into().expect("digest has 32 bytes"))
}

/// Instance objects shared by all trials.
struct Context {
    candidate: InnerCandidate,
    target: JointDist,
    laws: SchemeLaws,
    reference: TypicalityReference,
    px: Dist,
    channel: Kernel,
    channel_info: f64,
}

impl Context {
    fn new(cfg: &ExperimentConfig) -> Result<Self> {
        let candidate = cfg.instance.candidate()?;
        let target = match cfg.instance.target_joint()? {
            Some(t) => t,
            None => coordination_marginal(&assemble_inner(&candidate)?)?,
        };
        let laws = SchemeLaws::new(&candidate)?;
        let reference = TypicalityReference::new(&candidate.p_x, &candidate.channel)?;
        let channel_info = inner_feasibility(&candidate, &laws.target)?.channel_info;
        Ok(Context {
            px: candidate.p_x.clone(),
            channel: candidate.channel.clone(),
            candidate,
            target,
            laws,
            reference,
            channel_info,
        })
    }
}

fn flag(b: bool) -> f64 {
    if b {
        1.0
    } else {
        0.0
    }
}

fn run_trial(cfg: &ExperimentConfig, ctx: &Context, p: &[f64], seed: u64) -> Result<Vec<f64>> {
    let y0 = cfg.instance.y0;
    match cfg.kind {
        Kind::Region => {
            let opts = AuxSearch {
                w_size: p[0] as usize,
                budget: cfg.region.budget,
                starts: cfg.region.starts,
                seed,
            };
            let out = optimize_auxiliary(&ctx.target, &ctx.channel, &opts)?;
            let own = inner_feasibility(&ctx.candidate, &ctx.target)?;
            let outer = outer_feasibility(&ctx.candidate.to_outer()?, &ctx.target)?;
            let uv = ctx.target.marginal(&[0, 4])?;
            let xyy = ctx.target.marginal(&[1, 2, 3])?;
            let product = ctx.target.independence_gap(&[0, 4], &[1, 2, 3])? <= 1e-9;
            let sep = if product {
                separation_slack(&uv, &xyy)?
            } else {
                f64::NAN
            };
            let r = out.report;
            Ok(vec![
                r.slack,
                r.marginal_gap,
                flag(r.feasible),
                r.channel_info,
                r.source_info,
                out.start as f64,
                own.slack,
                own.marginal_gap,
                outer.slack,
                sep,
            ])
        }
        Kind::Simulate => {
            let mut sc = SchemeConfig::new(
                ctx.candidate.clone(),
                p[0] as usize,
                p[1] as usize,
                p[2],
                p[3],
            )
            .with_seed(seed);
            sc.y0 = y0;
            sc.scan_limit = cfg.scheme.scan_limit;
            let sources = draw_sources(&sc)?;
            let (r, last) = run_scheme_with_sources(&sc, &sources)?;
            let tv = if cfg.instance.target.is_some() {
                l1(&r.q.frequencies(), ctx.target.pmf())
            } else {
                r.tv
            };
            let tv_tilde = if cfg.instance.target.is_some() {
                l1(&r.q_tilde.frequencies(), ctx.target.pmf())
            } else {
                r.tv_tilde
            };
            let coded = r.decoded_blocks() as f64;
            let causal = if cfg.scheme.causality_check {
                flag(causality_check(&sc, (seed % sc.blocks as u64) as usize)?)
            } else {
                f64::NAN
            };
            Ok(vec![
                tv,
                tv_tilde,
                r.m_count as f64,
                r.covering_failures() as f64 / coded,
                r.channel_atypical() as f64 / coded,
                r.decode_errors() as f64 / coded,
                flag(r.mixing_identity(&last)),
                causal,
            ])
        }
        Kind::PackingProbe => {
            let (n, rate, eps) = (p[0] as usize, p[1], p[2]);
            let hit = packing_trial(&ctx.candidate, &ctx.laws, n, rate, eps, y0, seed)?;
            Ok(vec![flag(hit), m_count(n, rate) as f64, ctx.channel_info])
        }
        Kind::TypicalityAudit => {
            let (n, eps) = (p[0] as usize, p[1]);
            let mut rng = rng_from(seed);
            let (x, y) = sample_input_driven(&ctx.px, &ctx.channel, y0, n, &mut rng);
            let t = triplet_type(&x, &y, y0, ctx.px.size(), ctx.channel.output_size())?;
            let g = ctx.reference.gaps(&t)?;
            let rate = -sequence_log_prob(&x, &y, y0, &ctx.px, &ctx.channel)? / n as f64;
            let h = crate::typicality::entropy_rate(&ctx.reference.pi, &ctx.px, &ctx.channel);
            debug_assert_eq!(t.len(), n as u64);
            Ok(vec![
                g.joint,
                flag(g.joint <= eps),
                g.x_marginal,
                g.pair_marginal,
                g.conditional,
                flag(g.marginal_closure_holds(eps)),
                flag(g.joint_composition_holds(eps)),
                rate,
                h,
            ])
        }
        Kind::AepAudit => {
            let (n, eps) = (p[0] as usize, p[1]);
            let mut spec = AepAuditSpec::new(n, eps, ctx.px.clone(), ctx.channel.clone());
            spec.y0 = y0;
            spec.mode = cfg.audit.mode;
            spec.samples = cfg.audit.samples;
            spec.delta = cfg.audit.delta;
            spec.seed = seed;
            let r = aep_audit(&spec)?;
            Ok(vec![
                r.typical_count,
                r.cardinality_bound,
                r.typical_probability,
                r.min_rate,
                r.max_rate,
                r.entropy_rate,
                r.delta,
                r.delta_required,
                r.sandwich_violations,
                flag(r.statistical),
                flag(r.passed),
            ])
        }
    }
}

fn quantile(sorted: &[f64], q: f64) -> f64 {
    if sorted.is_empty() {
        return f64::NAN;
    }
    let pos = q * (sorted.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    sorted[lo] + (sorted[hi] - sorted[lo]) * (pos - lo as f64)
}

pub fn summarize(name: &str, values: &[f64]) -> MetricSummary {
    let mut v: Vec<f64> = values.iter().copied().filter(|x| !x.is_nan()).collect();
    v.sort_by(|a, b| a.total_cmp(b));
    let mean = if v.is_empty() {
        f64::NAN
    } else {
        v.iter().sum::<f64>() / v.len() as f64
    };
    MetricSummary {
        name: name.to_string(),
        count: v.len(),
        mean,
        median: quantile(&v, 0.5),
        q05: quantile(&v, 0.05),
        q95: quantile(&v, 0.95),
    }
}

fn now() -> u64 {
    std::time::SystemTime::now()
        .duration_since(std::time::UNIX_EPOCH)
        .map_or(0, |d| d.as_secs())
}

/// Runs every sweep point × trial on the rayon pool. Failures become error
/// rows and never abort the sweep.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<RecordSet> {
    cfg.validate()?;
    let points = sweep_points(cfg);
    let ctx = Context::new(cfg);
    let tasks: Vec<(usize, usize)> = (0..points.len())
        .flat_map(|p| (0..cfg.trials).map(move |t| (p, t)))
        .collect();
    let rows: Vec<Record> = tasks
        .par_iter()
        .map(|&(pi, trial)| {
            let params = points[pi].clone();
            let seed = trial_seed(cfg.master_seed, cfg.kind, &params, trial);
            let out = ctx
                .as_ref()
                .map_err(Error::clone)
                .and_then(|c| run_trial(cfg, c, &params, seed));
            let width = metric_names(cfg.kind).len();
            let (metrics, error) = match out {
                Ok(m) => (m, None),
                Err(e) => (vec![f64::NAN; width], Some(e.to_string())),
            };
            Record {
                point: pi,
                params,
                trial,
                seed,
                metrics,
                error,
            }
        })
        .collect();

    let names = metric_names(cfg.kind);
    let summaries = points
        .iter()
        .enumerate()
        .map(|(pi, params)| {
            let mine: Vec<&Record> = rows.iter().filter(|r| r.point == pi).collect();
            PointSummary {
                point: pi,
                params: params.clone(),
                trials: mine.len(),
                errors: mine.iter().filter(|r| r.error.is_some()).count(),
                metrics: names
                    .iter()
                    .enumerate()
                    .map(|(k, name)| {
                        let vals: Vec<f64> = mine.iter().map(|r| r.metrics[k]).collect();
                        summarize(name, &vals)
                    })
                    .collect(),
            }
        })
        .collect();

    Ok(RecordSet {
        metadata: Metadata {
            kind: cfg.kind,
            config_hash: cfg.hash(),
            tool_version: env!("CARGO_PKG_VERSION").to_string(),
            timestamp: now(),
            master_seed: cfg.master_seed,
            trials: cfg.trials,
        },
        param_names: param_names(cfg.kind).iter().map(|s| s.to_string()).collect(),
        metric_names: names.iter().map(|s| s.to_string()).collect(),
        rows,
        summaries,
    })
}

/// Monte-Carlo frequency of the joint packing event for every `(n, R, ε)`.
pub fn packing_probe(cfg: &ExperimentConfig) -> Result<RecordSet> {
    let mut cfg = cfg.clone();
    cfg.kind = Kind::PackingProbe;
    run_experiment(&cfg)
}
