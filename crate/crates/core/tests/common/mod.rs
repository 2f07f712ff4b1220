#![allow(dead_code)]

use markov_coord::prob::{Dist, JointDist, Kernel};
use markov_coord::region::{assemble_inner, coordination_marginal, InnerCandidate};
use rand::Rng;

pub fn random_row<R: Rng>(len: usize, rng: &mut R) -> Vec<f64> {
    let mut row: Vec<f64> = (0..len).map(|_| -rng.gen::<f64>().max(1e-300).ln()).collect();
    let s: f64 = row.iter().sum();
    row.iter_mut().for_each(|v| *v /= s);
    row
}

pub fn random_dist<R: Rng>(len: usize, rng: &mut R) -> Dist {
    Dist::new(random_row(len, rng)).unwrap()
}

pub fn random_kernel<R: Rng>(inputs: &[usize], out: usize, rng: &mut R) -> Kernel {
    let rows = inputs.iter().product::<usize>();
    Kernel::new(inputs, out, (0..rows).map(|_| random_row(out, rng)).collect()).unwrap()
}

/// Full-support channel, so the induced chain is always unichain and aperiodic.
pub fn random_channel<R: Rng>(nx: usize, ny: usize, rng: &mut R) -> Kernel {
    let rows = (0..nx * ny)
        .map(|_| {
            let mut r = random_row(ny, rng);
            r.iter_mut().for_each(|v| *v = 0.9 * *v + 0.1 / ny as f64);
            r
        })
        .collect();
    Kernel::new(&[nx, ny], ny, rows).unwrap()
}

pub fn binary_kernel(inputs: &[usize], ones: &[f64]) -> Kernel {
    Kernel::new(inputs, 2, ones.iter().map(|&p| vec![1.0 - p, p]).collect()).unwrap()
}

pub fn h2(p: f64) -> f64 {
    let f = |q: f64| if q <= 0.0 { 0.0 } else { -q * q.log2() };
    f(p) + f(1.0 - p)
}

/// `I(X;Y|Y')` for binary alphabets computed from scratch.
pub fn channel_info_binary(px: &[f64; 2], pi: &[f64; 2], w1: &[[f64; 2]; 2]) -> f64 {
    // w1[x][yp] = P(Y=1 | x, yp)
    let mut total = 0.0;
    for yp in 0..2 {
        let mix = px[0] * w1[0][yp] + px[1] * w1[1][yp];
        let cond: f64 = (0..2).map(|x| px[x] * h2(w1[x][yp])).sum();
        total += pi[yp] * (h2(mix) - cond);
    }
    total
}

/// `I(U;W|X)` for binary `U`, `W` with `k1[u][x] = P(W=1 | u, x)`.
pub fn source_info_binary(pu: &[f64; 2], px: &[f64; 2], k1: &[[f64; 2]; 2]) -> f64 {
    let mut total = 0.0;
    for x in 0..2 {
        let mix = pu[0] * k1[0][x] + pu[1] * k1[1][x];
        let cond: f64 = (0..2).map(|u| pu[u] * h2(k1[u][x])).sum();
        total += px[x] * (h2(mix) - cond);
    }
    total
}

/// Nested-loop evaluation of the inner factorization, independent of
/// `JointDist::from_fn`. Returns the flat pmf over `(U,X,W,Y',Y,V)`.
pub fn nested_inner(c: &InnerCandidate, pi: &[f64]) -> Vec<f64> {
    let s = c.sizes();
    let mut out = Vec::new();
    for u in 0..s.u {
        for x in 0..s.x {
            for w in 0..s.w {
                for yp in 0..s.y {
                    for y in 0..s.y {
                        for v in 0..s.v {
                            out.push(
                                c.p_u.pmf()[u]
                                    * c.p_x.pmf()[x]
                                    * c.p_w_given_ux.row_at(u * s.x + x)[w]
                                    * pi[yp]
                                    * c.channel.row_at(x * s.y + yp)[y]
                                    * c.p_v_given_yxw.row_at((y * s.x + x) * s.w + w)[v],
                            );
                        }
                    }
                }
            }
        }
    }
    out
}

/// Binary instance: everything of size 2.
pub struct Binary {
    pub pu: [f64; 2],
    pub px: [f64; 2],
    /// `P(Y=1 | x, y')`
    pub w1: [[f64; 2]; 2],
    pub pi: [f64; 2],
}

impl Binary {
    pub fn new(pu: [f64; 2], px: [f64; 2], w1: [[f64; 2]; 2]) -> Self {
        // two-state chain: P(1|0) = a, P(0|1) = b
        let a = px[0] * w1[0][0] + px[1] * w1[1][0];
        let b = 1.0 - (px[0] * w1[0][1] + px[1] * w1[1][1]);
        let pi = [b / (a + b), a / (a + b)];
        Binary { pu, px, w1, pi }
    }

    pub fn channel(&self) -> Kernel {
        binary_kernel(
            &[2, 2],
            &[self.w1[0][0], self.w1[0][1], self.w1[1][0], self.w1[1][1]],
        )
    }

    pub fn channel_info(&self) -> f64 {
        channel_info_binary(&self.px, &self.pi, &self.w1)
    }
}

/// Exhaustive grid over `P_{W|U,X}` at `step`, with `V` solved exactly for each
/// grid point. Target is over `(U,X,Y',Y,V)`, all binary. Returns the best slack
/// and its kernel `k1[u][x] = P(W=1|u,x)`, or `None` if no grid point reproduces
/// the target.
pub fn grid_oracle(inst: &Binary, target: &JointDist, step: f64) -> Option<(f64, [[f64; 2]; 2])> {
    let steps = (1.0 / step).round() as usize;
    let grid: Vec<f64> = (0..=steps).map(|i| i as f64 * step).collect();
    // t[u][x][yp][y] = P(V=1 | u,x,y',y), mass alongside
    let mut t = [[[[0.0f64; 2]; 2]; 2]; 2];
    let mut m = [[[[0.0f64; 2]; 2]; 2]; 2];
    for u in 0..2 {
        for x in 0..2 {
            for yp in 0..2 {
                for y in 0..2 {
                    let p0 = target.get(&[u, x, yp, y, 0]);
                    let p1 = target.get(&[u, x, yp, y, 1]);
                    m[u][x][yp][y] = p0 + p1;
                    t[u][x][yp][y] = if p0 + p1 > 0.0 { p1 / (p0 + p1) } else { 0.0 };
                }
            }
        }
    }
    let channel_info = inst.channel_info();
    let mut best: Option<(f64, [[f64; 2]; 2])> = None;
    for &k00 in &grid {
        for &k01 in &grid {
            for &k10 in &grid {
                for &k11 in &grid {
                    let k1 = [[k00, k01], [k10, k11]];
                    if !v_solvable(&k1, &t, &m) {
                        continue;
                    }
                    let slack = channel_info - source_info_binary(&inst.pu, &inst.px, &k1);
                    if best.map_or(true, |(b, _)| slack > b) {
                        best = Some((slack, k1));
                    }
                }
            }
        }
    }
    best
}

/// Whether `a_w = P(V=1 | y, x, w)` in `[0,1]` exist with
/// `(1−k) a_0 + k a_1 = t` for every `(u, y')` carrying mass.
fn v_solvable(k1: &[[f64; 2]; 2], t: &[[[[f64; 2]; 2]; 2]; 2], m: &[[[[f64; 2]; 2]; 2]; 2]) -> bool {
    const TOL: f64 = 1e-9;
    for x in 0..2 {
        for y in 0..2 {
            let mut eqs: Vec<(f64, f64)> = Vec::new();
            for u in 0..2 {
                for yp in 0..2 {
                    if m[u][x][yp][y] > 0.0 {
                        eqs.push((k1[u][x], t[u][x][yp][y]));
                    }
                }
            }
            if eqs.is_empty() {
                continue;
            }
            // distinct k values determine (a0, a1); equal k leave a line
            let (ka, ta) = eqs[0];
            let other = eqs.iter().find(|(k, _)| (k - ka).abs() > 1e-12);
            let (a0, a1) = match other {
                Some(&(kb, tb)) => {
                    // a0 + k (a1 − a0) = t
                    let d = (tb - ta) / (kb - ka);
                    let a0 = ta - ka * d;
                    (a0, a0 + d)
                }
                None => (ta, ta),
            };
            if [a0, a1].iter().any(|&a| a < -TOL || a > 1.0 + TOL) {
                return false;
            }
            if eqs
                .iter()
                .any(|&(k, tt)| (a0 + k * (a1 - a0) - tt).abs() > TOL)
            {
                return false;
            }
        }
    }
    true
}

/// Target of an inner candidate built from binary parameters.
pub fn binary_candidate(inst: &Binary, k1: [[f64; 2]; 2], v1: [[[f64; 2]; 2]; 2]) -> InnerCandidate {
    // v1[y][x][w] = P(V=1 | y, x, w)
    let mut vrows = Vec::new();
    for y in 0..2 {
        for x in 0..2 {
            for w in 0..2 {
                vrows.push(v1[y][x][w]);
            }
        }
    }
    InnerCandidate {
        p_u: Dist::new(inst.pu.to_vec()).unwrap(),
        p_x: Dist::new(inst.px.to_vec()).unwrap(),
        p_w_given_ux: binary_kernel(&[2, 2], &[k1[0][0], k1[0][1], k1[1][0], k1[1][1]]),
        channel: inst.channel(),
        p_v_given_yxw: binary_kernel(&[2, 2, 2], &vrows),
    }
}

pub fn target_of(c: &InnerCandidate) -> JointDist {
    coordination_marginal(&assemble_inner(c).unwrap()).unwrap()
}
