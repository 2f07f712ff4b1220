//! Input-driven Markov types and typical sets.
//!
//! A pair `(x^n, y^n)` is summarized by its triplet type: the empirical law of
//! the adjacent triplets `(y_{t−1}, x_t, y_t)`, with `y_0` supplied by the
//! caller. Typicality is ℓ₁ closeness of that type to the triplet law
//! `π(y') P_X(x) W(y | x, y')`.
//!
//! The probability of a pair under the generation law depends on the pair only
//! through its triplet type, which is what makes the exhaustive AEP audit
//! tractable: it enumerates type classes with their multiplicities instead of
//! individual sequences.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::prob::{
    entropy, induced_transition, l1, stationary_dist, triplet_index, triplet_law, Dist,
    JointDist, Kernel, TransitionMatrix,
};
use crate::sample::{rng_from, sample_input_driven};

/// Guard on enumeration work (sequence pairs or type-class states).
pub const ENUMERATION_GUARD: u64 = 10_000_000;

/// An empirical distribution held as integer counts.
pub trait EmpiricalType {
    fn shape(&self) -> &[usize];
    fn counts(&self) -> &[u64];
    fn len(&self) -> u64;

    fn is_empty(&self) -> bool {
        self.len() == 0
    }

    fn frequencies(&self) -> Vec<f64> {
        let n = self.len() as f64;
        self.counts().iter().map(|&c| c as f64 / n).collect()
    }

    fn normalized(&self) -> Result<JointDist> {
        JointDist::new(self.shape().to_vec(), self.frequencies())
    }
}

fn check_symbols<S: Copy + Into<usize>>(seq: &[S], size: usize) -> Result<()> {
    for &s in seq {
        let s: usize = s.into();
        if s >= size {
            return Err(Error::SymbolOutOfRange { symbol: s, size });
        }
    }
    Ok(())
}

/// Counts of `(y', x, y)` triplets.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TripletType {
    shape: [usize; 3],
    counts: Vec<u64>,
    n: u64,
}

impl TripletType {
    pub fn empty(nx: usize, ny: usize) -> Self {
        TripletType {
            shape: [ny, nx, ny],
            counts: vec![0; ny * nx * ny],
            n: 0,
        }
    }

    pub fn nx(&self) -> usize {
        self.shape[1]
    }

    pub fn ny(&self) -> usize {
        self.shape[0]
    }

    pub fn count(&self, yp: usize, x: usize, y: usize) -> u64 {
        self.counts[triplet_index(yp, x, y, self.nx(), self.ny())]
    }

    /// Empirical input law `Q_X`.
    pub fn x_marginal(&self) -> Vec<f64> {
        let (nx, ny) = (self.nx(), self.ny());
        let n = self.n as f64;
        (0..nx)
            .map(|x| {
                let mut s = 0u64;
                for i in 0..ny {
                    for j in 0..ny {
                        s += self.count(i, x, j);
                    }
                }
                s as f64 / n
            })
            .collect()
    }
}

impl EmpiricalType for TripletType {
    fn shape(&self) -> &[usize] {
        &self.shape
    }
    fn counts(&self) -> &[u64] {
        &self.counts
    }
    fn len(&self) -> u64 {
        self.n
    }
}

/// Triplet type of `(x^n, y^n)` with `y0` in the role of `y_{0}`.
pub fn triplet_type<S: Copy + Into<usize>>(
    x: &[S],
    y: &[S],
    y0: usize,
    nx: usize,
    ny: usize,
) -> Result<TripletType> {
    if x.len() != y.len() {
        return Err(Error::LengthMismatch(format!(
            "x has {} symbols, y has {}",
            x.len(),
            y.len()
        )));
    }
    if x.is_empty() {
        return Err(Error::LengthMismatch("sequences must be non-empty".into()));
    }
    check_symbols(x, nx)?;
    check_symbols(y, ny)?;
    if y0 >= ny {
        return Err(Error::SymbolOutOfRange {
            symbol: y0,
            size: ny,
        });
    }
    let mut t = TripletType::empty(nx, ny);
    let mut prev = y0;
    for (&xt, &yt) in x.iter().zip(y) {
        let (xt, yt) = (xt.into(), yt.into());
        t.counts[triplet_index(prev, xt, yt, nx, ny)] += 1;
        prev = yt;
    }
    t.n = x.len() as u64;
    Ok(t)
}

/// Counts of `(u, x, y', y, v)` tuples.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FullType {
    shape: [usize; 5],
    counts: Vec<u64>,
    n: u64,
}

impl FullType {
    pub fn empty(nu: usize, nx: usize, ny: usize, nv: usize) -> Self {
        FullType {
            shape: [nu, nx, ny, ny, nv],
            counts: vec![0; nu * nx * ny * ny * nv],
            n: 0,
        }
    }

    #[inline]
    pub fn record(&mut self, u: usize, x: usize, yp: usize, y: usize, v: usize) {
        let [_, nx, ny, _, nv] = self.shape;
        self.counts[(((u * nx + x) * ny + yp) * ny + y) * nv + v] += 1;
        self.n += 1;
    }

    /// Adds the counts of another type of the same shape.
    pub fn absorb(&mut self, other: &FullType) -> Result<()> {
        if self.shape != other.shape {
            return Err(Error::ShapeMismatch(format!(
                "cannot add types of shapes {:?} and {:?}",
                self.shape, other.shape
            )));
        }
        for (a, b) in self.counts.iter_mut().zip(&other.counts) {
            *a += b;
        }
        self.n += other.n;
        Ok(())
    }

    /// Marginalizes out `(u, v)`, reordering to `(y', x, y)`.
    pub fn to_triplet(&self) -> TripletType {
        let [nu, nx, ny, _, nv] = self.shape;
        let mut t = TripletType::empty(nx, ny);
        for u in 0..nu {
            for x in 0..nx {
                for yp in 0..ny {
                    for y in 0..ny {
                        for v in 0..nv {
                            let c = self.counts[(((u * nx + x) * ny + yp) * ny + y) * nv + v];
                            t.counts[triplet_index(yp, x, y, nx, ny)] += c;
                        }
                    }
                }
            }
        }
        t.n = self.n;
        t
    }
}

impl EmpiricalType for FullType {
    fn shape(&self) -> &[usize] {
        &self.shape
    }
    fn counts(&self) -> &[u64] {
        &self.counts
    }
    fn len(&self) -> u64 {
        self.n
    }
}

/// Type of `(u^n, x^n, y^n, v^n)` over adjacent output pairs.
pub fn full_type<S: Copy + Into<usize>>(
    u: &[S],
    x: &[S],
    y: &[S],
    v: &[S],
    y0: usize,
    sizes: [usize; 4],
) -> Result<FullType> {
    let n = x.len();
    if n == 0 || u.len() != n || y.len() != n || v.len() != n {
        return Err(Error::LengthMismatch(format!(
            "sequence lengths u={} x={} y={} v={}",
            u.len(),
            x.len(),
            y.len(),
            v.len()
        )));
    }
    let [nu, nx, ny, nv] = sizes;
    check_symbols(u, nu)?;
    check_symbols(x, nx)?;
    check_symbols(y, ny)?;
    check_symbols(v, nv)?;
    if y0 >= ny {
        return Err(Error::SymbolOutOfRange {
            symbol: y0,
            size: ny,
        });
    }
    let mut t = FullType::empty(nu, nx, ny, nv);
    let mut prev = y0;
    for i in 0..n {
        let yt = y[i].into();
        t.record(u[i].into(), x[i].into(), prev, yt, v[i].into());
        prev = yt;
    }
    Ok(t)
}

/// ℓ₁ distance between a type and a target of the same shape.
pub fn type_gap<T: EmpiricalType + ?Sized>(t: &T, target: &JointDist) -> Result<f64> {
    if t.shape() != target.sizes() {
        return Err(Error::ShapeMismatch(format!(
            "type shape {:?} vs target shape {:?}",
            t.shape(),
            target.sizes()
        )));
    }
    Ok(counts_gap(t.counts(), t.len(), target.pmf()))
}

#[inline]
pub(crate) fn counts_gap(counts: &[u64], n: u64, target: &[f64]) -> f64 {
    let n = n as f64;
    counts
        .iter()
        .zip(target)
        .map(|(&c, &q)| (c as f64 / n - q).abs())
        .sum()
}

fn check_channel(w: &Kernel, nx: usize, ny: usize) -> Result<()> {
    if w.input_sizes() != [nx, ny] || w.output_size() != ny {
        return Err(Error::AlphabetMismatch(format!(
            "channel with inputs {:?} and {} outputs does not match |X|={nx}, |Y|={ny}",
            w.input_sizes(),
            w.output_size()
        )));
    }
    Ok(())
}

/// ℓ₁ distance from the triplet type to `π(y') Q_X(x) W(y|x,y')`, where
/// `Q_X` is the empirical input law of `x^n`.
pub fn conditional_gap<S: Copy + Into<usize>>(
    x: &[S],
    y: &[S],
    y0: usize,
    pi: &Dist,
    w: &Kernel,
) -> Result<f64> {
    let ny = pi.size();
    let nx = w.input_sizes().first().copied().unwrap_or(0);
    check_channel(w, nx, ny)?;
    let t = triplet_type(x, y, y0, nx, ny)?;
    Ok(conditional_gap_of(&t, pi, w))
}

pub(crate) fn conditional_gap_of(t: &TripletType, pi: &Dist, w: &Kernel) -> f64 {
    let (nx, ny) = (t.nx(), t.ny());
    let qx = t.x_marginal();
    let n = t.len() as f64;
    let mut gap = 0.0;
    for i in 0..ny {
        for x in 0..nx {
            for j in 0..ny {
                let r = pi.p(i) * qx[x] * w.p(j, &[x, i]);
                gap += (t.count(i, x, j) as f64 / n - r).abs();
            }
        }
    }
    gap
}

/// `log₂ Π_t px(x_t) w(y_t | x_t, y_{t−1})` with `y_0` fixed; `-∞` when a
/// factor on the path is zero.
pub fn sequence_log_prob<S: Copy + Into<usize>>(
    x: &[S],
    y: &[S],
    y0: usize,
    px: &Dist,
    w: &Kernel,
) -> Result<f64> {
    let (nx, ny) = (px.size(), w.output_size());
    check_channel(w, nx, ny)?;
    let t = triplet_type(x, y, y0, nx, ny)?;
    Ok(log_prob_of_counts(&t.counts, nx, ny, px, w))
}

fn log_prob_of_counts<C: Copy + Into<u64>>(
    counts: &[C],
    nx: usize,
    ny: usize,
    px: &Dist,
    w: &Kernel,
) -> f64 {
    let mut lp = 0.0;
    for i in 0..ny {
        for x in 0..nx {
            for j in 0..ny {
                let c: u64 = counts[triplet_index(i, x, j, nx, ny)].into();
                if c == 0 {
                    continue;
                }
                let p = px.p(x) * w.p(j, &[x, i]);
                if p == 0.0 {
                    return f64::NEG_INFINITY;
                }
                lp += c as f64 * (px.p(x).log2() + w.p(j, &[x, i]).log2());
            }
        }
    }
    lp
}

/// Constants of the AEP sandwich.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AepConstants {
    /// `max |log₂ P_X(x)|` over the support of `P_X`.
    pub l_x: f64,
    /// `max |log₂ W(j|x,i)|` over the support of `W`.
    pub l_w: f64,
    /// `(1/n)|log₂ c|` for the probability `c` of the initial condition.
    /// The initial state is fixed here, so `c = 1` and this is zero.
    pub boundary: f64,
}

impl AepConstants {
    pub fn new(px: &Dist, w: &Kernel) -> Self {
        let max_abs_log = |it: &mut dyn Iterator<Item = f64>| {
            it.filter(|&p| p > 0.0)
                .map(|p| p.log2().abs())
                .fold(0.0, f64::max)
        };
        let l_x = max_abs_log(&mut px.pmf().iter().copied());
        let l_w = max_abs_log(&mut w.rows().into_iter().flatten());
        AepConstants {
            l_x,
            l_w,
            boundary: 0.0,
        }
    }

    /// Smallest δ the sandwich argument supports at threshold `eps`.
    pub fn min_delta(&self, eps: f64) -> f64 {
        eps * (self.l_x + self.l_w) + self.boundary
    }
}

/// `H(X, Y | Y') = H(X) + H(Y | X, Y')` under the triplet law.
pub fn entropy_rate(pi: &Dist, px: &Dist, w: &Kernel) -> f64 {
    let nx = px.size();
    let ny = pi.size();
    let mut h_y = 0.0;
    for i in 0..ny {
        for x in 0..nx {
            let mass = pi.p(i) * px.p(x);
            if mass > 0.0 {
                h_y += mass * crate::prob::entropy_of(w.row(&[x, i]));
            }
        }
    }
    entropy(px) + h_y
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum AuditMode {
    /// Exhaustive when within the enumeration guard, sampled otherwise.
    Auto,
    /// Exhaustive or `EnumerationTooLarge`.
    Exhaustive,
    Sampled,
}

#[derive(Debug, Clone)]
pub struct AepAuditSpec {
    pub n: usize,
    pub eps: f64,
    pub px: Dist,
    pub w: Kernel,
    /// Defaults to the smallest admissible δ.
    pub delta: Option<f64>,
    pub y0: usize,
    pub mode: AuditMode,
    pub samples: usize,
    pub seed: u64,
}

impl AepAuditSpec {
    pub fn new(n: usize, eps: f64, px: Dist, w: Kernel) -> Self {
        AepAuditSpec {
            n,
            eps,
            px,
            w,
            delta: None,
            y0: 0,
            mode: AuditMode::Auto,
            samples: 200_000,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AepReport {
    pub n: usize,
    pub eps: f64,
    pub delta: f64,
    pub delta_required: f64,
    pub constants: AepConstants,
    /// `H(X, Y | Y')` in bits.
    pub entropy_rate: f64,
    /// Total number of sequence pairs `|X|^n |Y|^n`.
    pub pairs_total: f64,
    /// Number of ε-typical pairs (an estimate when `statistical`).
    pub typical_count: f64,
    /// `2^{n(H + δ)}`.
    pub cardinality_bound: f64,
    /// Probability of the typical set under the generation law.
    pub typical_probability: f64,
    /// Smallest and largest `−(1/n) log₂ P` over typical pairs.
    pub min_rate: f64,
    pub max_rate: f64,
    pub sandwich_violations: f64,
    pub zero_probability_typical: f64,
    pub delta_sufficient: bool,
    pub sandwich_ok: bool,
    pub cardinality_ok: bool,
    pub statistical: bool,
    pub passed: bool,
}

struct ClassTally {
    typical_count: f64,
    typical_probability: f64,
    min_rate: f64,
    max_rate: f64,
    violations: f64,
    zero_prob: f64,
}

impl ClassTally {
    fn new() -> Self {
        ClassTally {
            typical_count: 0.0,
            typical_probability: 0.0,
            min_rate: f64::INFINITY,
            max_rate: f64::NEG_INFINITY,
            violations: 0.0,
            zero_prob: 0.0,
        }
    }

    /// Accounts `weight` pairs (or importance weight) with the given log-probability.
    fn add_typical(&mut self, n: usize, log_p: f64, weight: f64, prob_weight: f64, h: f64, delta: f64) {
        self.typical_count += weight;
        self.typical_probability += prob_weight;
        let rate = -log_p / n as f64;
        self.min_rate = self.min_rate.min(rate);
        self.max_rate = self.max_rate.max(rate);
        if log_p == f64::NEG_INFINITY {
            self.zero_prob += weight;
            self.violations += weight;
        } else if !(rate > h - delta && rate < h + delta) {
            self.violations += weight;
        }
    }
}

/// Audits the AEP sandwich and the cardinality bound for the ε-typical set at
/// blocklength `n`, and reports the probability of that set.
pub fn aep_audit(spec: &AepAuditSpec) -> Result<AepReport> {
    let (nx, ny) = (spec.px.size(), spec.w.output_size());
    check_channel(&spec.w, nx, ny)?;
    if spec.n == 0 {
        return Err(Error::InvalidParameter("n must be >= 1".into()));
    }
    if spec.y0 >= ny {
        return Err(Error::SymbolOutOfRange {
            symbol: spec.y0,
            size: ny,
        });
    }
    let t = induced_transition(&spec.px, &spec.w)?;
    let pi = stationary_dist(&t)?;
    let target = triplet_law(&pi, &spec.px, &spec.w)?;
    let constants = AepConstants::new(&spec.px, &spec.w);
    let delta_required = constants.min_delta(spec.eps);
    let delta = spec.delta.unwrap_or(delta_required);
    let h = entropy_rate(&pi, &spec.px, &spec.w);

    let exhaustive = match spec.mode {
        AuditMode::Sampled => None,
        AuditMode::Auto => enumerate_classes(spec, target.pmf()).ok(),
        AuditMode::Exhaustive => Some(enumerate_classes(spec, target.pmf())?),
    };
    let statistical = exhaustive.is_none();
    let tally = match exhaustive {
        Some(classes) => {
            let mut tally = ClassTally::new();
            for (counts, mult) in classes {
                let gap = counts_gap_u32(&counts, spec.n as u64, target.pmf());
                if gap <= spec.eps {
                    let lp = log_prob_of_counts(&counts, nx, ny, &spec.px, &spec.w);
                    let m = mult as f64;
                    tally.add_typical(spec.n, lp, m, m * lp.exp2(), h, delta);
                }
            }
            tally
        }
        None => {
            let mut rng = rng_from(spec.seed);
            let mut tally = ClassTally::new();
            let s = spec.samples.max(1) as f64;
            for _ in 0..spec.samples.max(1) {
                let (x, y) = sample_input_driven(&spec.px, &spec.w, spec.y0, spec.n, &mut rng);
                let tt = triplet_type(&x, &y, spec.y0, nx, ny)?;
                if type_gap(&tt, &target)? <= spec.eps {
                    let lp = log_prob_of_counts(&tt.counts, nx, ny, &spec.px, &spec.w);
                    // importance weight 1/P estimates the count of typical pairs
                    tally.add_typical(spec.n, lp, (-lp).exp2() / s, 1.0 / s, h, delta);
                }
            }
            tally
        }
    };
    let cardinality_bound = (spec.n as f64 * (h + delta)).exp2();
    let delta_sufficient = delta >= delta_required;
    let sandwich_ok = tally.violations == 0.0;
    let cardinality_ok = tally.typical_count < cardinality_bound;
    Ok(AepReport {
        n: spec.n,
        eps: spec.eps,
        delta,
        delta_required,
        constants,
        entropy_rate: h,
        pairs_total: (nx as f64 * ny as f64).powi(spec.n as i32),
        typical_count: tally.typical_count,
        cardinality_bound,
        typical_probability: tally.typical_probability,
        min_rate: tally.min_rate,
        max_rate: tally.max_rate,
        sandwich_violations: tally.violations,
        zero_probability_typical: tally.zero_prob,
        delta_sufficient,
        sandwich_ok,
        cardinality_ok,
        statistical,
        passed: delta_sufficient && sandwich_ok && cardinality_ok,
    })
}

fn counts_gap_u32(counts: &[u32], n: u64, target: &[f64]) -> f64 {
    let n = n as f64;
    counts
        .iter()
        .zip(target)
        .map(|(&c, &q)| (c as f64 / n - q).abs())
        .sum()
}

/// Upper bound on (type, last state) pairs: compositions of `n` into `cells`
/// parts, times the number of final states.
fn class_state_bound(n: usize, cells: usize, ny: usize) -> f64 {
    let k = cells - 1;
    let comps = (1..=k).fold(1.0, |acc, i| acc * (n + i) as f64 / i as f64);
    comps * ny as f64
}

/// Every pair of length `n` grouped by triplet type, with multiplicities.
fn enumerate_classes(spec: &AepAuditSpec, _target: &[f64]) -> Result<HashMap<Vec<u32>, u128>> {
    let (nx, ny) = (spec.px.size(), spec.w.output_size());
    let cells = ny * nx * ny;
    let pairs = (nx as f64 * ny as f64).powi(spec.n as i32);
    let bound = class_state_bound(spec.n, cells, ny);
    if pairs.min(bound) > ENUMERATION_GUARD as f64 {
        return Err(Error::EnumerationTooLarge(format!(
            "{pairs:e} pairs and up to {bound:e} type-class states at n = {}",
            spec.n
        )));
    }
    let mut layer: HashMap<(Vec<u32>, usize), u128> = HashMap::new();
    layer.insert((vec![0; cells], spec.y0), 1);
    for _ in 0..spec.n {
        let mut next: HashMap<(Vec<u32>, usize), u128> = HashMap::with_capacity(layer.len() * 2);
        for ((counts, last), mult) in layer {
            for x in 0..nx {
                for y in 0..ny {
                    let mut c = counts.clone();
                    c[triplet_index(last, x, y, nx, ny)] += 1;
                    *next.entry((c, y)).or_insert(0) += mult;
                }
            }
        }
        layer = next;
    }
    let mut classes: HashMap<Vec<u32>, u128> = HashMap::with_capacity(layer.len());
    for ((counts, _), mult) in layer {
        *classes.entry(counts).or_insert(0) += mult;
    }
    Ok(classes)
}

/// `x`-marginal and `(y', y)`-marginal of a triplet type.
pub fn project_type(t: &TripletType) -> Result<(Dist, JointDist)> {
    let (nx, ny) = (t.nx(), t.ny());
    let n = t.len() as f64;
    let qx = Dist::new(t.x_marginal())?;
    let pair = JointDist::from_fn(vec![ny, ny], |c| {
        (0..nx).map(|x| t.count(c[0], x, c[1])).sum::<u64>() as f64 / n
    })?;
    Ok((qx, pair))
}

/// The pair law `π(i) T(j | i)` over `(Y', Y)`.
pub fn pair_law(pi: &Dist, t: &TransitionMatrix) -> Result<JointDist> {
    JointDist::from_fn(vec![t.size(), t.size()], |c| pi.p(c[0]) * t.get(c[0], c[1]))
}

/// Gaps entering the marginal / conditional typicality relations for one pair.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TypicalityGaps {
    /// `‖Q_{Y'XY} − π P_X W‖₁`.
    pub joint: f64,
    /// `‖Q_X − P_X‖₁`.
    pub x_marginal: f64,
    /// `‖Q_{Y'Y} − π T‖₁`.
    pub pair_marginal: f64,
    /// `‖Q_{Y'XY} − π Q_X W‖₁`.
    pub conditional: f64,
}

impl TypicalityGaps {
    /// Joint ε-typicality implies ε-typical marginals and 2ε conditional typicality.
    pub fn marginal_closure_holds(&self, eps: f64) -> bool {
        self.joint > eps
            || (self.x_marginal <= eps && self.pair_marginal <= eps && self.conditional <= 2.0 * eps)
    }

    /// ε-typical input plus 2ε conditional typicality implies 2ε joint typicality.
    pub fn joint_composition_holds(&self, eps: f64) -> bool {
        !(self.x_marginal <= eps && self.conditional <= 2.0 * eps) || self.joint <= 2.0 * eps
    }
}

/// Precomputed references for repeated gap evaluations on one instance.
#[derive(Debug, Clone)]
pub struct TypicalityReference {
    pub px: Dist,
    pub w: Kernel,
    pub pi: Dist,
    pub transition: TransitionMatrix,
    pub triplet: JointDist,
    pub pair: JointDist,
}

impl TypicalityReference {
    pub fn new(px: &Dist, w: &Kernel) -> Result<Self> {
        let transition = induced_transition(px, w)?;
        let pi = stationary_dist(&transition)?;
        let triplet = triplet_law(&pi, px, w)?;
        let pair = pair_law(&pi, &transition)?;
        Ok(TypicalityReference {
            px: px.clone(),
            w: w.clone(),
            pi,
            transition,
            triplet,
            pair,
        })
    }

    pub fn gaps(&self, t: &TripletType) -> Result<TypicalityGaps> {
        let (qx, pair) = project_type(t)?;
        Ok(TypicalityGaps {
            joint: type_gap(t, &self.triplet)?,
            x_marginal: l1(qx.pmf(), self.px.pmf()),
            pair_marginal: l1(pair.pmf(), self.pair.pmf()),
            conditional: conditional_gap_of(t, &self.pi, &self.w),
        })
    }
}
