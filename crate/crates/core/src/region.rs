//! Inner and outer bounds of the achievable coordination region.
//!
//! A target `P_{U,X,Y',Y,V}` is inner-feasible when some auxiliary `W` gives a
//! joint of the form `P_U P_X P_{W|U,X} π_{Y'} W_{Y|X,Y'} P_{V|Y,X,W}` with that
//! marginal and `I(X;Y|Y') − I(U;W|X) ≥ 0`. The outer bound keeps the same
//! constraint over the looser family
//! `P_U P_X P_{Y'|X} W_{Y|X,Y'} P_{W|U,X,Y,Y'} P_{V|Y,X,W}`.
//!
//! Assembled joints use the coordinate order `(U, X, W, Y', Y, V)`; targets use
//! `(U, X, Y', Y, V)`.

use rand::Rng;
use rand_distr::{Distribution, Gamma};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::prob::{
    cond_mutual_info, entropy_of, Alphabet, induced_transition, l1, mutual_info, stationary_dist, Dist,
    JointDist, Kernel,
};
use crate::sample::{derive_seed, rng_from};

/// Slack at or above `-FEASIBILITY_TOL` counts as feasible.
pub const FEASIBILITY_TOL: f64 = 1e-9;
/// Largest marginal gap accepted by the auxiliary search.
pub const MARGINAL_TOL: f64 = 1e-6;
/// Iteration cap of the inner least-squares fit of `P_{V|Y,X,W}`.
const FIT_ITERATIONS: usize = 1500;
/// Tolerance used when validating target structure.
pub const STRUCTURE_TOL: f64 = 1e-8;

pub const U: usize = 0;
pub const X: usize = 1;
pub const W: usize = 2;
pub const YP: usize = 3;
pub const Y: usize = 4;
pub const V: usize = 5;

#[derive(Debug, Clone, PartialEq)]
pub struct InnerCandidate {
    pub p_u: Dist,
    pub p_x: Dist,
    /// `P_{W|U,X}`, rows keyed by `(u, x)`.
    pub p_w_given_ux: Kernel,
    /// `W_{Y|X,Y'}`, rows keyed by `(x, y')`.
    pub channel: Kernel,
    /// `P_{V|Y,X,W}`, rows keyed by `(y, x, w)`.
    pub p_v_given_yxw: Kernel,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Sizes {
    pub u: usize,
    pub x: usize,
    pub w: usize,
    pub y: usize,
    pub v: usize,
}

fn expect_kernel(k: &Kernel, name: &str, inputs: &[usize], output: usize) -> Result<()> {
    if k.input_sizes() != inputs || k.output_size() != output {
        return Err(Error::AlphabetMismatch(format!(
            "{name}: expected inputs {inputs:?} -> {output}, got {:?} -> {}",
            k.input_sizes(),
            k.output_size()
        )));
    }
    Ok(())
}

impl InnerCandidate {
    pub fn sizes(&self) -> Sizes {
        Sizes {
            u: self.p_u.size(),
            x: self.p_x.size(),
            w: self.p_w_given_ux.output_size(),
            y: self.channel.output_size(),
            v: self.p_v_given_yxw.output_size(),
        }
    }

    pub fn w_size(&self) -> usize {
        self.p_w_given_ux.output_size()
    }

    pub fn w_alphabet(&self) -> &Alphabet {
        self.p_w_given_ux.output_alphabet()
    }

    pub fn validate(&self) -> Result<()> {
        let s = self.sizes();
        expect_kernel(&self.p_w_given_ux, "P_{W|U,X}", &[s.u, s.x], s.w)?;
        expect_kernel(&self.channel, "channel", &[s.x, s.y], s.y)?;
        expect_kernel(&self.p_v_given_yxw, "P_{V|Y,X,W}", &[s.y, s.x, s.w], s.v)
    }

    /// `π_{Y'}` of the output chain induced by `P_X`.
    pub fn equilibrium(&self) -> Result<Dist> {
        stationary_dist(&induced_transition(&self.p_x, &self.channel)?)
    }

    /// `P_{W|X}(w|x) = Σ_u P_U(u) P_{W|U,X}(w|u,x)`.
    pub fn p_w_given_x(&self) -> Result<Kernel> {
        let s = self.sizes();
        let rows = (0..s.x)
            .map(|x| {
                let mut row = vec![0.0; s.w];
                for u in 0..s.u {
                    for (r, p) in row.iter_mut().zip(self.p_w_given_ux.row(&[u, x])) {
                        *r += self.p_u.p(u) * p;
                    }
                }
                row
            })
            .collect();
        Kernel::new(&[s.x], s.w, rows)
    }

    /// The same joint viewed through the outer factorization.
    pub fn to_outer(&self) -> Result<OuterCandidate> {
        let s = self.sizes();
        let pi = self.equilibrium()?;
        let p_yprime_given_x = Kernel::constant(&[s.x], &pi)?;
        let mut rows = Vec::with_capacity(s.u * s.x * s.y * s.y);
        for u in 0..s.u {
            for x in 0..s.x {
                for _y in 0..s.y {
                    for _yp in 0..s.y {
                        rows.push(self.p_w_given_ux.row(&[u, x]).to_vec());
                    }
                }
            }
        }
        Ok(OuterCandidate {
            p_u: self.p_u.clone(),
            p_x: self.p_x.clone(),
            p_yprime_given_x,
            channel: self.channel.clone(),
            p_w_given_uxyy: Kernel::new(&[s.u, s.x, s.y, s.y], s.w, rows)?,
            p_v_given_yxw: self.p_v_given_yxw.clone(),
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct OuterCandidate {
    pub p_u: Dist,
    pub p_x: Dist,
    /// `P_{Y'|X}`, rows keyed by `x`.
    pub p_yprime_given_x: Kernel,
    pub channel: Kernel,
    /// `P_{W|U,X,Y,Y'}`, rows keyed by `(u, x, y, y')`.
    pub p_w_given_uxyy: Kernel,
    pub p_v_given_yxw: Kernel,
}

impl OuterCandidate {
    pub fn sizes(&self) -> Sizes {
        Sizes {
            u: self.p_u.size(),
            x: self.p_x.size(),
            w: self.p_w_given_uxyy.output_size(),
            y: self.channel.output_size(),
            v: self.p_v_given_yxw.output_size(),
        }
    }

    pub fn w_alphabet(&self) -> &Alphabet {
        self.p_w_given_uxyy.output_alphabet()
    }

    pub fn validate(&self) -> Result<()> {
        let s = self.sizes();
        expect_kernel(&self.p_yprime_given_x, "P_{Y'|X}", &[s.x], s.y)?;
        expect_kernel(&self.channel, "channel", &[s.x, s.y], s.y)?;
        expect_kernel(&self.p_w_given_uxyy, "P_{W|U,X,Y,Y'}", &[s.u, s.x, s.y, s.y], s.w)?;
        expect_kernel(&self.p_v_given_yxw, "P_{V|Y,X,W}", &[s.y, s.x, s.w], s.v)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FeasibilityReport {
    /// `I(X;Y|Y')` in bits.
    pub channel_info: f64,
    /// `I(U;W|X)` in bits.
    pub source_info: f64,
    pub slack: f64,
    pub feasible: bool,
    /// ℓ₁ distance between the assembled `(U,X,Y',Y,V)` marginal and the target.
    pub marginal_gap: f64,
}

fn joint_sizes(s: Sizes) -> Vec<usize> {
    vec![s.u, s.x, s.w, s.y, s.y, s.v]
}

/// Joint over `(U, X, W, Y', Y, V)` of an inner candidate.
pub fn assemble_inner(c: &InnerCandidate) -> Result<JointDist> {
    c.validate()?;
    let pi = c.equilibrium()?;
    let s = c.sizes();
    JointDist::from_fn(joint_sizes(s), |i| {
        c.p_u.p(i[U])
            * c.p_x.p(i[X])
            * c.p_w_given_ux.p(i[W], &[i[U], i[X]])
            * pi.p(i[YP])
            * c.channel.p(i[Y], &[i[X], i[YP]])
            * c.p_v_given_yxw.p(i[V], &[i[Y], i[X], i[W]])
    })
}

/// Joint over `(U, X, W, Y', Y, V)` of an outer candidate.
pub fn assemble_outer(c: &OuterCandidate) -> Result<JointDist> {
    c.validate()?;
    JointDist::from_fn(joint_sizes(c.sizes()), |i| {
        c.p_u.p(i[U])
            * c.p_x.p(i[X])
            * c.p_yprime_given_x.p(i[YP], &[i[X]])
            * c.channel.p(i[Y], &[i[X], i[YP]])
            * c.p_w_given_uxyy.p(i[W], &[i[U], i[X], i[Y], i[YP]])
            * c.p_v_given_yxw.p(i[V], &[i[Y], i[X], i[W]])
    })
}

/// The coordination marginal `(U, X, Y', Y, V)` of an assembled joint.
pub fn coordination_marginal(joint: &JointDist) -> Result<JointDist> {
    joint.marginal(&[U, X, YP, Y, V])
}

/// Evaluates the information constraint and marginal match of an assembled joint.
pub fn joint_feasibility(joint: &JointDist, target: &JointDist) -> Result<FeasibilityReport> {
    if joint.arity() != 6 {
        return Err(Error::ShapeMismatch(format!(
            "assembled joint must have 6 coordinates, got {}",
            joint.arity()
        )));
    }
    let channel_info = cond_mutual_info(&joint.marginal(&[X, Y, YP])?)?;
    let source_info = cond_mutual_info(&joint.marginal(&[U, W, X])?)?;
    let marginal = coordination_marginal(joint)?;
    if marginal.sizes() != target.sizes() {
        return Err(Error::ShapeMismatch(format!(
            "target shape {:?} does not match candidate marginal {:?}",
            target.sizes(),
            marginal.sizes()
        )));
    }
    let slack = channel_info - source_info;
    Ok(FeasibilityReport {
        channel_info,
        source_info,
        slack,
        feasible: slack >= -FEASIBILITY_TOL,
        marginal_gap: l1(marginal.pmf(), target.pmf()),
    })
}

pub fn inner_feasibility(c: &InnerCandidate, target: &JointDist) -> Result<FeasibilityReport> {
    joint_feasibility(&assemble_inner(c)?, target)
}

pub fn outer_feasibility(c: &OuterCandidate, target: &JointDist) -> Result<FeasibilityReport> {
    joint_feasibility(&assemble_outer(c)?, target)
}

/// `I(X;Y|Y') − I(U;V)` for a product-form target `P_{U,V} · P_{X,Y',Y}`.
pub fn separation_slack(p_uv: &JointDist, p_xyy: &JointDist) -> Result<f64> {
    if p_uv.arity() != 2 {
        return Err(Error::ShapeMismatch(format!(
            "source part must be over (U, V), got arity {}",
            p_uv.arity()
        )));
    }
    if p_xyy.arity() != 3 || p_xyy.sizes()[1] != p_xyy.sizes()[2] {
        return Err(Error::ShapeMismatch(format!(
            "channel part must be over (X, Y', Y), got shape {:?}",
            p_xyy.sizes()
        )));
    }
    let gap = p_xyy.independence_gap(&[0], &[1])?;
    if gap > STRUCTURE_TOL {
        return Err(Error::InconsistentTarget {
            cells: vec![format!("X and Y' are dependent (gap {gap:e})")],
        });
    }
    let channel_info = cond_mutual_info(&p_xyy.marginal(&[0, 2, 1])?)?;
    Ok(channel_info - mutual_info(p_uv)?)
}

/// Checks that a target factors through `channel` with `U ⟂ (X, Y', Y)`,
/// `X ⟂ Y'` and `P_{Y'} = π`. Returns `(P_U, P_X, π)`.
pub fn validate_target(target: &JointDist, channel: &Kernel) -> Result<(Dist, Dist, Dist)> {
    let sz = target.sizes();
    if sz.len() != 5 || sz[2] != sz[3] {
        return Err(Error::ShapeMismatch(format!(
            "target must be over (U, X, Y', Y, V), got shape {sz:?}"
        )));
    }
    let (nu, nx, ny) = (sz[0], sz[1], sz[2]);
    expect_kernel(channel, "channel", &[nx, ny], ny)?;
    let p_u = target.marginal_dist(0)?;
    let p_x = target.marginal_dist(1)?;
    let mut cells = Vec::new();

    let ug = target.independence_gap(&[0], &[1, 2, 3])?;
    if ug > STRUCTURE_TOL {
        cells.push(format!("U is not independent of (X, Y', Y): gap {ug:e}"));
    }
    let xg = target.independence_gap(&[1], &[2])?;
    if xg > STRUCTURE_TOL {
        cells.push(format!("X is not independent of Y': gap {xg:e}"));
    }
    let xyy = target.marginal(&[1, 2, 3])?;
    for x in 0..nx {
        for yp in 0..ny {
            let mass: f64 = (0..ny).map(|y| xyy.get(&[x, yp, y])).sum();
            if mass <= 0.0 {
                continue;
            }
            for y in 0..ny {
                let cond = xyy.get(&[x, yp, y]) / mass;
                let w = channel.p(y, &[x, yp]);
                if (cond - w).abs() > STRUCTURE_TOL {
                    cells.push(format!(
                        "P(y={y} | x={x}, y'={yp}) = {cond} but channel gives {w}"
                    ));
                }
            }
        }
    }
    let pi = match induced_transition(&p_x, channel).and_then(|t| stationary_dist(&t)) {
        Ok(pi) => pi,
        Err(e) => {
            cells.push(format!("output chain: {e}"));
            return Err(Error::InconsistentTarget { cells });
        }
    };
    let yp = target.marginal_dist(2)?;
    for i in 0..ny {
        if (yp.p(i) - pi.p(i)).abs() > STRUCTURE_TOL {
            cells.push(format!("P(y'={i}) = {} but equilibrium gives {}", yp.p(i), pi.p(i)));
        }
    }
    let _ = nu;
    if cells.is_empty() {
        Ok((p_u, p_x, pi))
    } else {
        Err(Error::InconsistentTarget { cells })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AuxSearch {
    pub w_size: usize,
    /// Improvement sweeps per start.
    pub budget: usize,
    pub starts: usize,
    pub seed: u64,
}

impl AuxSearch {
    /// Default search with `|W| = |U|·|X|`.
    pub fn for_alphabets(nu: usize, nx: usize) -> Self {
        AuxSearch::new(nu * nx)
    }

    pub fn new(w_size: usize) -> Self {
        AuxSearch {
            w_size,
            budget: 200,
            starts: 32,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone)]
pub struct AuxOutcome {
    pub candidate: InnerCandidate,
    pub report: FeasibilityReport,
    /// Index of the start that produced the best candidate.
    pub start: usize,
}

/// Flat state of the search: the `W` kernel and the fitted `V` kernel.
#[derive(Debug, Clone)]
struct Point {
    /// rows `(u, x)`, each of length `w`
    k: Vec<f64>,
    /// rows `(y, x, w)`, each of length `v`
    a: Vec<f64>,
}

/// Everything about the target the search needs, precomputed.
struct Problem {
    nu: usize,
    nx: usize,
    ny: usize,
    nv: usize,
    nw: usize,
    p_u: Dist,
    p_x: Dist,
    /// target mass of `(u, x, y', y)`
    mass: Vec<f64>,
    target: Vec<f64>,
    base: Vec<f64>,
    channel_info: f64,
}

impl Problem {
    fn idx4(&self, u: usize, x: usize, yp: usize, y: usize) -> usize {
        ((u * self.nx + x) * self.ny + yp) * self.ny + y
    }

    fn source_info(&self, k: &[f64]) -> f64 {
        let (nu, nx, nw) = (self.nu, self.nx, self.nw);
        let mut total = 0.0;
        for x in 0..nx {
            let px = self.p_x.p(x);
            if px == 0.0 {
                continue;
            }
            let mut pw = vec![0.0; nw];
            let mut h_w_given_u = 0.0;
            for u in 0..nu {
                let row = &k[(u * nx + x) * nw..(u * nx + x + 1) * nw];
                for (a, b) in pw.iter_mut().zip(row) {
                    *a += self.p_u.p(u) * b;
                }
                h_w_given_u += self.p_u.p(u) * entropy_of(row);
            }
            total += px * (entropy_of(&pw) - h_w_given_u);
        }
        total.max(0.0)
    }

    /// Least-squares fit of the `V` rows for fixed `W` rows, one `(x, y)` block
    /// at a time, by accelerated projected gradient.
    fn fit_v(&self, k: &[f64], a: &mut [f64]) {
        let (nu, nx, ny, nv, nw) = (self.nu, self.nx, self.ny, self.nv, self.nw);
        for x in 0..nx {
            for y in 0..ny {
                // data rows: (weight, k row, target conditional)
                let mut data: Vec<(f64, &[f64], Vec<f64>)> = Vec::new();
                for u in 0..nu {
                    for yp in 0..ny {
                        let m = self.mass[self.idx4(u, x, yp, y)];
                        if m <= 0.0 {
                            continue;
                        }
                        let t0 = self.idx4(u, x, yp, y) * nv;
                        let t: Vec<f64> = self.target[t0..t0 + nv].iter().map(|p| p / m).collect();
                        data.push((m, &k[(u * nx + x) * nw..(u * nx + x + 1) * nw], t));
                    }
                }
                if data.is_empty() {
                    continue;
                }
                let wsum: f64 = data.iter().map(|d| d.0).sum();
                let lip: f64 = 2.0
                    * data
                        .iter()
                        .map(|(m, kr, _)| m / wsum * kr.iter().map(|v| v * v).sum::<f64>())
                        .sum::<f64>();
                if lip <= 0.0 {
                    continue;
                }
                let step = 1.0 / lip;
                let off = (y * nx + x) * nw * nv;
                let block = &mut a[off..off + nw * nv];
                let mut prev = block.to_vec();
                let mut look = block.to_vec();
                let mut grad = vec![0.0; nw * nv];
                let mut tk = 1.0f64;
                for _ in 0..FIT_ITERATIONS {
                    grad.iter_mut().for_each(|g| *g = 0.0);
                    let mut err = 0.0;
                    for (m, kr, t) in &data {
                        let wgt = m / wsum;
                        for v in 0..nv {
                            let pred: f64 = (0..nw).map(|w| kr[w] * look[w * nv + v]).sum();
                            let r = pred - t[v];
                            err += wgt * r * r;
                            for w in 0..nw {
                                grad[w * nv + v] += 2.0 * wgt * kr[w] * r;
                            }
                        }
                    }
                    let mut next: Vec<f64> = look.iter().zip(&grad).map(|(l, g)| l - step * g).collect();
                    for w in 0..nw {
                        project_simplex(&mut next[w * nv..(w + 1) * nv]);
                    }
                    let moved = l1(&next, &prev);
                    let tn = (1.0 + (1.0 + 4.0 * tk * tk).sqrt()) / 2.0;
                    let beta = (tk - 1.0) / tn;
                    for i in 0..nw * nv {
                        look[i] = next[i] + beta * (next[i] - prev[i]);
                    }
                    for w in 0..nw {
                        project_simplex(&mut look[w * nv..(w + 1) * nv]);
                    }
                    prev = next;
                    tk = tn;
                    if err < 1e-22 || moved < 1e-14 {
                        break;
                    }
                }
                block.copy_from_slice(&prev);
            }
        }
    }

    fn gap(&self, p: &Point) -> f64 {
        let (nu, nx, ny, nv, nw) = (self.nu, self.nx, self.ny, self.nv, self.nw);
        let mut gap = 0.0;
        for u in 0..nu {
            for x in 0..nx {
                let kr = &p.k[(u * nx + x) * nw..(u * nx + x + 1) * nw];
                for yp in 0..ny {
                    for y in 0..ny {
                        let b = self.base[self.idx4(u, x, yp, y)];
                        for v in 0..nv {
                            let mix: f64 = (0..nw)
                                .map(|w| kr[w] * p.a[((y * nx + x) * nw + w) * nv + v])
                                .sum();
                            gap += (b * mix - self.target[self.idx4(u, x, yp, y) * nv + v]).abs();
                        }
                    }
                }
            }
        }
        gap
    }

    /// Refits `V` and returns `(slack, gap)`.
    fn evaluate(&self, p: &mut Point) -> (f64, f64) {
        let k = p.k.clone();
        self.fit_v(&k, &mut p.a);
        (self.channel_info - self.source_info(&p.k), self.gap(p))
    }
}

/// Euclidean projection onto the probability simplex.
fn project_simplex(v: &mut [f64]) {
    let mut s: Vec<f64> = v.to_vec();
    s.sort_by(|a, b| b.partial_cmp(a).unwrap());
    let mut cum = 0.0;
    let mut theta = 0.0;
    for (i, &si) in s.iter().enumerate() {
        cum += si;
        let t = (cum - 1.0) / (i + 1) as f64;
        if si - t > 0.0 {
            theta = t;
        }
    }
    for x in v.iter_mut() {
        *x = (*x - theta).max(0.0);
    }
}

fn dirichlet_row<R: Rng>(len: usize, rng: &mut R) -> Vec<f64> {
    let g = Gamma::new(1.0, 1.0).expect("valid gamma");
    let mut row: Vec<f64> = (0..len).map(|_| g.sample(rng)).collect();
    let s: f64 = row.iter().sum();
    row.iter_mut().for_each(|v| *v /= s);
    row
}

struct StartResult {
    point: Point,
    slack: f64,
    gap: f64,
}

fn run_start(prob: &Problem, start: usize, opts: &AuxSearch) -> Option<StartResult> {
    let (nu, nx, ny, nv, nw) = (prob.nu, prob.nx, prob.ny, prob.nv, prob.nw);
    let mut rng = rng_from(derive_seed(opts.seed, &[nw as u64, start as u64]));
    let mut a: Vec<f64> = Vec::with_capacity(ny * nx * nw * nv);
    for _ in 0..ny * nx * nw {
        a.extend(dirichlet_row(nv, &mut rng));
    }
    // W copies U (when it fits): feasible for every structurally valid target
    let copy: Option<Vec<f64>> = (nw >= nu).then(|| {
        let mut k = vec![0.0; nu * nx * nw];
        for u in 0..nu {
            for x in 0..nx {
                k[(u * nx + x) * nw + u] = 1.0;
            }
        }
        k
    });
    let k0: Vec<f64> = match start {
        0 => {
            let mut k = vec![0.0; nu * nx * nw];
            for r in 0..nu * nx {
                k[r * nw] = 1.0;
            }
            k
        }
        1 if copy.is_some() => copy.clone().unwrap(),
        _ => (0..nu * nx).flat_map(|_| dirichlet_row(nw, &mut rng)).collect(),
    };
    let mut p = Point { k: k0, a };
    let (mut slack, mut gap) = prob.evaluate(&mut p);

    if gap > MARGINAL_TOL {
        // restore feasibility along the segment towards the copy kernel
        let copy = copy?;
        let origin = p.k.clone();
        let mut lo = 0.0f64;
        let mut hi = 1.0f64;
        let mut best: Option<(Point, f64, f64)> = None;
        for _ in 0..40 {
            let lam = if best.is_none() { hi } else { 0.5 * (lo + hi) };
            let mut q = Point {
                k: origin.iter().zip(&copy).map(|(o, c)| (1.0 - lam) * o + lam * c).collect(),
                a: p.a.clone(),
            };
            let (s, g) = prob.evaluate(&mut q);
            if g <= MARGINAL_TOL {
                hi = lam;
                best = Some((q, s, g));
            } else if best.is_none() {
                return None;
            } else {
                lo = lam;
            }
        }
        let (q, s, g) = best?;
        p = q;
        slack = s;
        gap = g;
    }

    let rows = nu * nx;
    let mut step = 0.25;
    for _ in 0..opts.budget {
        let mut improved = false;
        // single-row moves of mass between two symbols, and paired moves on two
        // rows sharing the same x
        let mut moves: Vec<Vec<(usize, usize, usize, f64)>> = Vec::new();
        for r in 0..rows {
            for from in 0..nw {
                for to in 0..nw {
                    if from != to {
                        moves.push(vec![(r, from, to, 1.0)]);
                    }
                }
            }
        }
        for x in 0..nx {
            for u1 in 0..nu {
                for u2 in u1 + 1..nu {
                    let (r1, r2) = (u1 * nx + x, u2 * nx + x);
                    for f1 in 0..nw {
                        for t1 in 0..nw {
                            for f2 in 0..nw {
                                for t2 in 0..nw {
                                    if f1 != t1 && f2 != t2 {
                                        moves.push(vec![(r1, f1, t1, 1.0), (r2, f2, t2, 1.0)]);
                                        moves.push(vec![(r1, f1, t1, 1.0), (r2, f2, t2, 0.5)]);
                                        moves.push(vec![(r1, f1, t1, 0.5), (r2, f2, t2, 1.0)]);
                                    }
                                }
                            }
                        }
                    }
                }
            }
        }
        for mv in &moves {
            let mut q = p.clone();
            let mut changed = false;
            for &(r, from, to, scale) in mv {
                let avail = q.k[r * nw + from];
                let d = (step * scale).min(avail);
                if d > 0.0 {
                    q.k[r * nw + from] -= d;
                    q.k[r * nw + to] += d;
                    changed = true;
                }
            }
            if !changed {
                continue;
            }
            let (s, g) = prob.evaluate(&mut q);
            if g <= MARGINAL_TOL && s > slack + 1e-13 {
                p = q;
                slack = s;
                gap = g;
                improved = true;
            }
        }
        if !improved {
            step *= 0.5;
            if step < 1e-9 {
                break;
            }
        }
    }
    Some(StartResult {
        point: p,
        slack,
        gap,
    })
}

fn search_fixed_size(
    prob: &Problem,
    opts: &AuxSearch,
) -> Option<(usize, StartResult)> {
    let results: Vec<(usize, Option<StartResult>)> = (0..opts.starts.max(1))
        .into_par_iter()
        .map(|s| (s, run_start(prob, s, opts)))
        .collect();
    let mut best: Option<(usize, StartResult)> = None;
    for (s, r) in results {
        if let Some(r) = r {
            // ties keep the lowest start index
            if best.as_ref().map_or(true, |(_, b)| r.slack > b.slack) {
                best = Some((s, r));
            }
        }
    }
    best
}

/// Searches for the auxiliary kernels that maximize the slack of a target
/// subject to a marginal gap of at most [`MARGINAL_TOL`].
///
/// Every alphabet size up to `w_size` is searched and the best result is
/// embedded into the `w_size` alphabet, so the reported slack never decreases
/// in `w_size`. The result is a lower bound on the best achievable slack.
pub fn optimize_auxiliary(
    target: &JointDist,
    channel: &Kernel,
    opts: &AuxSearch,
) -> Result<AuxOutcome> {
    if opts.w_size == 0 {
        return Err(Error::InvalidParameter("w_size must be >= 1".into()));
    }
    let (p_u, p_x, pi) = validate_target(target, channel)?;
    let sz = target.sizes();
    let (nu, nx, ny, nv) = (sz[0], sz[1], sz[2], sz[4]);
    let xyy = target.marginal(&[1, 3, 2])?;
    let channel_info = cond_mutual_info(&xyy)?;
    let mut mass = vec![0.0; nu * nx * ny * ny];
    let mut base = vec![0.0; nu * nx * ny * ny];
    for u in 0..nu {
        for x in 0..nx {
            for yp in 0..ny {
                for y in 0..ny {
                    let i = ((u * nx + x) * ny + yp) * ny + y;
                    mass[i] = (0..nv).map(|v| target.get(&[u, x, yp, y, v])).sum();
                    base[i] = p_u.p(u) * p_x.p(x) * pi.p(yp) * channel.p(y, &[x, yp]);
                }
            }
        }
    }

    let mut best: Option<(usize, usize, StartResult)> = None;
    for nw in 1..=opts.w_size {
        let prob = Problem {
            nu,
            nx,
            ny,
            nv,
            nw,
            p_u: p_u.clone(),
            p_x: p_x.clone(),
            mass: mass.clone(),
            target: target.pmf().to_vec(),
            base: base.clone(),
            channel_info,
        };
        if let Some((s, r)) = search_fixed_size(&prob, opts) {
            if best.as_ref().map_or(true, |(_, _, b)| r.slack > b.slack) {
                best = Some((nw, s, r));
            }
        }
    }
    let (nw, start, r) = best.ok_or_else(|| Error::InconsistentTarget {
        cells: vec![format!(
            "no auxiliary with at most {} symbols reproduces the target marginal",
            opts.w_size
        )],
    })?;
    debug_assert!(r.gap <= MARGINAL_TOL);

    // embed into the full alphabet; unused symbols get zero mass
    let w_full = opts.w_size;
    let mut k_rows = Vec::with_capacity(nu * nx);
    for row in 0..nu * nx {
        let mut out = vec![0.0; w_full];
        out[..nw].copy_from_slice(&r.point.k[row * nw..(row + 1) * nw]);
        k_rows.push(out);
    }
    let mut a_rows = Vec::with_capacity(ny * nx * w_full);
    for y in 0..ny {
        for x in 0..nx {
            for w in 0..w_full {
                if w < nw {
                    let o = ((y * nx + x) * nw + w) * nv;
                    a_rows.push(r.point.a[o..o + nv].to_vec());
                } else {
                    a_rows.push(vec![1.0 / nv as f64; nv]);
                }
            }
        }
    }
    let candidate = InnerCandidate {
        p_u,
        p_x,
        p_w_given_ux: Kernel::new(&[nu, nx], w_full, normalize_rows(k_rows))?,
        channel: channel.clone(),
        p_v_given_yxw: Kernel::new(&[ny, nx, w_full], nv, normalize_rows(a_rows))?,
    };
    let report = inner_feasibility(&candidate, target)?;
    Ok(AuxOutcome {
        candidate,
        report,
        start,
    })
}

fn normalize_rows(rows: Vec<Vec<f64>>) -> Vec<Vec<f64>> {
    rows.into_iter()
        .map(|mut r| {
            r.iter_mut().for_each(|v| *v = v.max(0.0));
            let s: f64 = r.iter().sum();
            r.iter_mut().for_each(|v| *v /= s);
            r
        })
        .collect()
}
