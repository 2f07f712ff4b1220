//! Finite-alphabet probability arithmetic.
//!
//! Everything here is exact table arithmetic over small alphabets: probability
//! mass functions, conditional kernels, flat joint tables, information measures
//! in bits, and the structure of the output chain a channel induces under an
//! i.i.d. input law.
//!
//! Kernel rows are stored row-major over the conditioning coordinates in the
//! order they are declared, so the channel `W(y | x, y')` has its row for
//! `(x, y')` at index `x * |Y| + y'`.

use petgraph::algo::tarjan_scc;
use petgraph::graph::DiGraph;
use std::collections::VecDeque;

use crate::error::{Error, Result};

/// Tolerance on probability sums.
pub const PROB_TOL: f64 = 1e-9;
/// Residual at which power iteration stops.
pub const STATIONARY_TOL: f64 = 1e-12;
/// Iteration cap for power iteration.
pub const MAX_POWER_ITERATIONS: usize = 1_000_000;
/// Information quantities in `(-CLAMP_TOL, 0)` are rounding noise and clamp to zero.
pub const CLAMP_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Alphabet {
    size: usize,
    labels: Option<Vec<String>>,
}

impl Alphabet {
    pub fn new(size: usize) -> Result<Self> {
        if size == 0 {
            return Err(Error::InvalidParameter("alphabet size must be >= 1".into()));
        }
        Ok(Alphabet { size, labels: None })
    }

    pub fn with_labels(labels: Vec<String>) -> Result<Self> {
        if labels.is_empty() {
            return Err(Error::InvalidParameter("alphabet needs at least one label".into()));
        }
        let mut sorted = labels.clone();
        sorted.sort();
        sorted.dedup();
        if sorted.len() != labels.len() {
            return Err(Error::InvalidParameter("alphabet labels must be distinct".into()));
        }
        Ok(Alphabet {
            size: labels.len(),
            labels: Some(labels),
        })
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn labels(&self) -> Option<&[String]> {
        self.labels.as_deref()
    }

    pub fn label(&self, i: usize) -> String {
        match &self.labels {
            Some(l) => l[i].clone(),
            None => i.to_string(),
        }
    }
}

fn check_pmf(pmf: &[f64], what: &str) -> Result<()> {
    if pmf.is_empty() {
        return Err(Error::InvalidDistribution(format!("{what}: empty pmf")));
    }
    for (i, &p) in pmf.iter().enumerate() {
        if !p.is_finite() || p < 0.0 {
            return Err(Error::InvalidDistribution(format!(
                "{what}: entry {i} = {p} is not a probability"
            )));
        }
    }
    let s: f64 = pmf.iter().sum();
    if (s - 1.0).abs() > PROB_TOL {
        return Err(Error::InvalidDistribution(format!("{what}: entries sum to {s}")));
    }
    Ok(())
}

/// A probability mass function over a finite alphabet.
#[derive(Debug, Clone, PartialEq)]
pub struct Dist {
    alphabet: Alphabet,
    pmf: Vec<f64>,
}

impl Dist {
    pub fn new(pmf: Vec<f64>) -> Result<Self> {
        check_pmf(&pmf, "dist")?;
        Ok(Dist {
            alphabet: Alphabet::new(pmf.len())?,
            pmf,
        })
    }

    pub fn with_alphabet(alphabet: Alphabet, pmf: Vec<f64>) -> Result<Self> {
        if alphabet.size() != pmf.len() {
            return Err(Error::AlphabetMismatch(format!(
                "alphabet has {} symbols, pmf has {}",
                alphabet.size(),
                pmf.len()
            )));
        }
        check_pmf(&pmf, "dist")?;
        Ok(Dist { alphabet, pmf })
    }

    pub fn uniform(size: usize) -> Result<Self> {
        Dist::new(vec![1.0 / size as f64; size])
    }

    pub fn point(size: usize, at: usize) -> Result<Self> {
        if at >= size {
            return Err(Error::SymbolOutOfRange { symbol: at, size });
        }
        let mut pmf = vec![0.0; size];
        pmf[at] = 1.0;
        Dist::new(pmf)
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    pub fn size(&self) -> usize {
        self.pmf.len()
    }

    pub fn pmf(&self) -> &[f64] {
        &self.pmf
    }

    pub fn p(&self, i: usize) -> f64 {
        self.pmf[i]
    }

    pub fn support(&self) -> impl Iterator<Item = usize> + '_ {
        self.pmf
            .iter()
            .enumerate()
            .filter(|(_, &p)| p > 0.0)
            .map(|(i, _)| i)
    }
}

/// Conditional distribution of one output coordinate given an ordered list of
/// conditioning coordinates.
#[derive(Debug, Clone, PartialEq)]
pub struct Kernel {
    inputs: Vec<Alphabet>,
    output: Alphabet,
    table: Vec<f64>,
}

impl Kernel {
    /// Builds a kernel from one row per joint conditioning index, row-major
    /// over `input_sizes`.
    pub fn new(input_sizes: &[usize], output_size: usize, rows: Vec<Vec<f64>>) -> Result<Self> {
        let inputs = input_sizes
            .iter()
            .map(|&s| Alphabet::new(s))
            .collect::<Result<Vec<_>>>()?;
        let output = Alphabet::new(output_size)?;
        let n_rows: usize = input_sizes.iter().product();
        if rows.len() != n_rows {
            return Err(Error::ShapeMismatch(format!(
                "kernel expects {n_rows} rows, got {}",
                rows.len()
            )));
        }
        let mut table = Vec::with_capacity(n_rows * output_size);
        for (r, row) in rows.into_iter().enumerate() {
            if row.len() != output_size {
                return Err(Error::ShapeMismatch(format!(
                    "kernel row {r} has {} entries, expected {output_size}",
                    row.len()
                )));
            }
            check_pmf(&row, &format!("kernel row {r}"))?;
            table.extend(row);
        }
        Ok(Kernel {
            inputs,
            output,
            table,
        })
    }

    /// A kernel whose every row is `d`.
    pub fn constant(input_sizes: &[usize], d: &Dist) -> Result<Self> {
        let n_rows: usize = input_sizes.iter().product();
        Kernel::new(input_sizes, d.size(), vec![d.pmf().to_vec(); n_rows])
    }

    /// Deterministic kernel `out = f(inputs)`.
    pub fn deterministic(
        input_sizes: &[usize],
        output_size: usize,
        f: impl Fn(&[usize]) -> usize,
    ) -> Result<Self> {
        let n_rows: usize = input_sizes.iter().product();
        let mut rows = Vec::with_capacity(n_rows);
        let mut idx = vec![0usize; input_sizes.len()];
        for r in 0..n_rows {
            unflatten(r, input_sizes, &mut idx);
            let o = f(&idx);
            if o >= output_size {
                return Err(Error::SymbolOutOfRange {
                    symbol: o,
                    size: output_size,
                });
            }
            let mut row = vec![0.0; output_size];
            row[o] = 1.0;
            rows.push(row);
        }
        Kernel::new(input_sizes, output_size, rows)
    }

    pub fn input_sizes(&self) -> Vec<usize> {
        self.inputs.iter().map(Alphabet::size).collect()
    }

    pub fn input_alphabets(&self) -> &[Alphabet] {
        &self.inputs
    }

    pub fn output_size(&self) -> usize {
        self.output.size()
    }

    pub fn output_alphabet(&self) -> &Alphabet {
        &self.output
    }

    pub fn n_rows(&self) -> usize {
        self.table.len() / self.output.size()
    }

    pub fn row_index(&self, cond: &[usize]) -> usize {
        debug_assert_eq!(cond.len(), self.inputs.len());
        let mut r = 0;
        for (c, a) in cond.iter().zip(&self.inputs) {
            debug_assert!(*c < a.size());
            r = r * a.size() + c;
        }
        r
    }

    pub fn row(&self, cond: &[usize]) -> &[f64] {
        self.row_at(self.row_index(cond))
    }

    pub fn row_at(&self, r: usize) -> &[f64] {
        let k = self.output.size();
        &self.table[r * k..(r + 1) * k]
    }

    pub fn rows(&self) -> Vec<Vec<f64>> {
        (0..self.n_rows()).map(|r| self.row_at(r).to_vec()).collect()
    }

    pub fn p(&self, out: usize, cond: &[usize]) -> f64 {
        self.row(cond)[out]
    }
}

/// Row-stochastic square matrix over a state alphabet.
#[derive(Debug, Clone, PartialEq)]
pub struct TransitionMatrix {
    states: Alphabet,
    entries: Vec<f64>,
}

impl TransitionMatrix {
    pub fn new(rows: Vec<Vec<f64>>) -> Result<Self> {
        let k = rows.len();
        let mut entries = Vec::with_capacity(k * k);
        for (i, row) in rows.into_iter().enumerate() {
            if row.len() != k {
                return Err(Error::ShapeMismatch(format!(
                    "transition row {i} has {} entries, expected {k}",
                    row.len()
                )));
            }
            check_pmf(&row, &format!("transition row {i}"))?;
            entries.extend(row);
        }
        Ok(TransitionMatrix {
            states: Alphabet::new(k)?,
            entries,
        })
    }

    pub fn size(&self) -> usize {
        self.states.size()
    }

    pub fn state_alphabet(&self) -> &Alphabet {
        &self.states
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.entries[i * self.size() + j]
    }

    pub fn row(&self, i: usize) -> &[f64] {
        let k = self.size();
        &self.entries[i * k..(i + 1) * k]
    }

    /// One step of the chain: `p ↦ pT`.
    pub fn step(&self, p: &[f64]) -> Vec<f64> {
        let k = self.size();
        let mut out = vec![0.0; k];
        for (i, &pi) in p.iter().enumerate() {
            if pi == 0.0 {
                continue;
            }
            for (o, t) in out.iter_mut().zip(self.row(i)) {
                *o += pi * t;
            }
        }
        debug_assert_eq!(out.len(), k);
        out
    }
}

/// Probability table over the product of several finite alphabets, row-major
/// with the last coordinate varying fastest.
#[derive(Debug, Clone, PartialEq)]
pub struct JointDist {
    sizes: Vec<usize>,
    pmf: Vec<f64>,
}

pub(crate) fn unflatten(mut flat: usize, sizes: &[usize], out: &mut [usize]) {
    for d in (0..sizes.len()).rev() {
        out[d] = flat % sizes[d];
        flat /= sizes[d];
    }
}

pub(crate) fn flatten(idx: &[usize], sizes: &[usize]) -> usize {
    idx.iter().zip(sizes).fold(0, |acc, (&i, &s)| acc * s + i)
}

impl JointDist {
    pub fn new(sizes: Vec<usize>, pmf: Vec<f64>) -> Result<Self> {
        if sizes.is_empty() || sizes.contains(&0) {
            return Err(Error::ShapeMismatch(format!("bad coordinate sizes {sizes:?}")));
        }
        let cells: usize = sizes.iter().product();
        if cells != pmf.len() {
            return Err(Error::ShapeMismatch(format!(
                "sizes {sizes:?} need {cells} cells, got {}",
                pmf.len()
            )));
        }
        check_pmf(&pmf, "joint")?;
        Ok(JointDist { sizes, pmf })
    }

    /// Builds a table by evaluating `f` at every cell.
    pub fn from_fn(sizes: Vec<usize>, f: impl Fn(&[usize]) -> f64) -> Result<Self> {
        let cells: usize = sizes.iter().product();
        let mut idx = vec![0usize; sizes.len()];
        let mut pmf = Vec::with_capacity(cells);
        for c in 0..cells {
            unflatten(c, &sizes, &mut idx);
            pmf.push(f(&idx));
        }
        JointDist::new(sizes, pmf)
    }

    pub fn from_dist(d: &Dist) -> Self {
        JointDist {
            sizes: vec![d.size()],
            pmf: d.pmf().to_vec(),
        }
    }

    pub fn sizes(&self) -> &[usize] {
        &self.sizes
    }

    pub fn arity(&self) -> usize {
        self.sizes.len()
    }

    pub fn n_cells(&self) -> usize {
        self.pmf.len()
    }

    pub fn pmf(&self) -> &[f64] {
        &self.pmf
    }

    pub fn get(&self, idx: &[usize]) -> f64 {
        self.pmf[flatten(idx, &self.sizes)]
    }

    pub fn index_of(&self, idx: &[usize]) -> usize {
        flatten(idx, &self.sizes)
    }

    /// Marginal over the listed coordinates, in the listed order.
    pub fn marginal(&self, coords: &[usize]) -> Result<JointDist> {
        for (k, &c) in coords.iter().enumerate() {
            if c >= self.arity() || coords[..k].contains(&c) {
                return Err(Error::ShapeMismatch(format!(
                    "bad marginal coordinates {coords:?} for arity {}",
                    self.arity()
                )));
            }
        }
        let out_sizes: Vec<usize> = coords.iter().map(|&c| self.sizes[c]).collect();
        let mut out = vec![0.0; out_sizes.iter().product()];
        let mut idx = vec![0usize; self.arity()];
        let mut sub = vec![0usize; coords.len()];
        for (flat, &p) in self.pmf.iter().enumerate() {
            if p == 0.0 {
                continue;
            }
            unflatten(flat, &self.sizes, &mut idx);
            for (s, &c) in sub.iter_mut().zip(coords) {
                *s = idx[c];
            }
            out[flatten(&sub, &out_sizes)] += p;
        }
        Ok(JointDist {
            sizes: out_sizes,
            pmf: out,
        })
    }

    /// The single-coordinate marginal as a `Dist`.
    pub fn marginal_dist(&self, coord: usize) -> Result<Dist> {
        let m = self.marginal(&[coord])?;
        Dist::new(m.pmf)
    }

    pub fn entropy(&self) -> f64 {
        entropy_of(&self.pmf)
    }

    /// ℓ₁ distance between this table and the product of the marginals over
    /// the two coordinate groups.
    pub fn independence_gap(&self, left: &[usize], right: &[usize]) -> Result<f64> {
        let mut all: Vec<usize> = left.iter().chain(right).copied().collect();
        let lm = self.marginal(left)?;
        let rm = self.marginal(right)?;
        let joint = self.marginal(&all)?;
        all.clear();
        let nr = rm.n_cells();
        Ok(joint
            .pmf
            .iter()
            .enumerate()
            .map(|(c, &p)| (p - lm.pmf[c / nr] * rm.pmf[c % nr]).abs())
            .sum())
    }
}

pub fn entropy_of(pmf: &[f64]) -> f64 {
    let h: f64 = pmf
        .iter()
        .filter(|&&p| p > 0.0)
        .map(|&p| -p * p.log2())
        .sum();
    h.max(0.0)
}

/// Shannon entropy in bits.
pub fn entropy(d: &Dist) -> f64 {
    entropy_of(d.pmf())
}

fn clamp_info(v: f64, what: &str) -> Result<f64> {
    if v >= 0.0 {
        Ok(v)
    } else if v > -CLAMP_TOL {
        Ok(0.0)
    } else {
        Err(Error::InternalConsistency(format!("{what} = {v:e} < 0")))
    }
}

/// `I(A;B|C)` in bits for a joint table over `(A, B, C)`.
pub fn cond_mutual_info(j: &JointDist) -> Result<f64> {
    if j.arity() != 3 {
        return Err(Error::ShapeMismatch(format!(
            "conditional mutual information needs 3 coordinates, got {}",
            j.arity()
        )));
    }
    let h_ac = j.marginal(&[0, 2])?.entropy();
    let h_bc = j.marginal(&[1, 2])?.entropy();
    let h_c = j.marginal(&[2])?.entropy();
    let h_abc = j.entropy();
    clamp_info(h_ac + h_bc - h_abc - h_c, "I(A;B|C)")
}

/// `I(A;B)` in bits for a joint table over `(A, B)`.
pub fn mutual_info(j: &JointDist) -> Result<f64> {
    if j.arity() != 2 {
        return Err(Error::ShapeMismatch(format!(
            "mutual information needs 2 coordinates, got {}",
            j.arity()
        )));
    }
    let h_a = j.marginal(&[0])?.entropy();
    let h_b = j.marginal(&[1])?.entropy();
    clamp_info(h_a + h_b - j.entropy(), "I(A;B)")
}

/// ℓ₁ distance `Σ |p − q|`.
pub fn tv_distance(p: &JointDist, q: &JointDist) -> Result<f64> {
    if p.sizes != q.sizes {
        return Err(Error::ShapeMismatch(format!(
            "cannot compare tables of shapes {:?} and {:?}",
            p.sizes, q.sizes
        )));
    }
    Ok(l1(&p.pmf, &q.pmf))
}

pub(crate) fn l1(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).sum()
}

fn check_channel(px: &Dist, w: &Kernel) -> Result<(usize, usize)> {
    let ins = w.input_sizes();
    if ins.len() != 2 {
        return Err(Error::AlphabetMismatch(format!(
            "channel must condition on (X, Y'), got {} inputs",
            ins.len()
        )));
    }
    let (nx, ny) = (ins[0], ins[1]);
    if nx != px.size() {
        return Err(Error::AlphabetMismatch(format!(
            "input law has {} symbols, channel expects {nx}",
            px.size()
        )));
    }
    if ny != w.output_size() {
        return Err(Error::AlphabetMismatch(format!(
            "channel state alphabet {ny} differs from output alphabet {}",
            w.output_size()
        )));
    }
    Ok((nx, ny))
}

/// Output chain induced by an i.i.d. input law: `T(j|i) = Σ_x px(x) w(j|x,i)`.
pub fn induced_transition(px: &Dist, w: &Kernel) -> Result<TransitionMatrix> {
    let (nx, ny) = check_channel(px, w)?;
    let rows = (0..ny)
        .map(|i| {
            let mut row = vec![0.0; ny];
            for x in 0..nx {
                let pxx = px.p(x);
                for (r, wj) in row.iter_mut().zip(w.row(&[x, i])) {
                    *r += pxx * wj;
                }
            }
            row
        })
        .collect();
    TransitionMatrix::new(rows)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ChainStructure {
    pub recurrent_classes: Vec<Vec<usize>>,
    pub is_unichain: bool,
    /// Aperiodicity of the unique recurrent class; false when not unichain.
    pub is_aperiodic: bool,
    /// The unique recurrent class when unichain, otherwise empty.
    pub recurrent_set: Vec<usize>,
    /// Period of the unique recurrent class (0 when not unichain).
    pub period: usize,
}

fn gcd(a: usize, b: usize) -> usize {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// Period of a strongly connected class, via breadth-first levels: the gcd of
/// `level(u) + 1 − level(v)` over all edges `u → v` inside the class.
fn class_period(t: &TransitionMatrix, class: &[usize]) -> usize {
    let k = t.size();
    let mut in_class = vec![false; k];
    for &s in class {
        in_class[s] = true;
    }
    let mut level = vec![usize::MAX; k];
    let root = class[0];
    level[root] = 0;
    let mut queue = VecDeque::from([root]);
    while let Some(u) = queue.pop_front() {
        for v in 0..k {
            if in_class[v] && t.get(u, v) > 0.0 && level[v] == usize::MAX {
                level[v] = level[u] + 1;
                queue.push_back(v);
            }
        }
    }
    let mut g = 0;
    for &u in class {
        for &v in class {
            if t.get(u, v) > 0.0 {
                let d = (level[u] + 1) as isize - level[v] as isize;
                g = gcd(g, d.unsigned_abs());
            }
        }
    }
    g
}

/// Recurrent classes (closed strongly connected components of the
/// positive-entry digraph) and aperiodicity of the recurrent class.
pub fn chain_structure(t: &TransitionMatrix) -> ChainStructure {
    let k = t.size();
    let mut g = DiGraph::<(), ()>::new();
    let nodes: Vec<_> = (0..k).map(|_| g.add_node(())).collect();
    for i in 0..k {
        for j in 0..k {
            if t.get(i, j) > 0.0 {
                g.add_edge(nodes[i], nodes[j], ());
            }
        }
    }
    let mut recurrent_classes: Vec<Vec<usize>> = tarjan_scc(&g)
        .into_iter()
        .map(|c| {
            let mut v: Vec<usize> = c.into_iter().map(|n| n.index()).collect();
            v.sort_unstable();
            v
        })
        .filter(|class| {
            class
                .iter()
                .all(|&i| (0..k).all(|j| t.get(i, j) == 0.0 || class.binary_search(&j).is_ok()))
        })
        .collect();
    recurrent_classes.sort();
    let is_unichain = recurrent_classes.len() == 1;
    let (recurrent_set, period) = if is_unichain {
        let class = recurrent_classes[0].clone();
        let p = class_period(t, &class);
        (class, p)
    } else {
        (Vec::new(), 0)
    };
    ChainStructure {
        is_unichain,
        is_aperiodic: is_unichain && period == 1,
        recurrent_classes,
        recurrent_set,
        period,
    }
}

/// Equilibrium distribution of a unichain-aperiodic chain by power iteration
/// from the uniform law. Transient states carry exactly zero mass.
pub fn stationary_dist(t: &TransitionMatrix) -> Result<Dist> {
    let cs = chain_structure(t);
    if !cs.is_unichain {
        return Err(Error::AssumptionViolated(format!(
            "chain has {} recurrent classes",
            cs.recurrent_classes.len()
        )));
    }
    if !cs.is_aperiodic {
        return Err(Error::AssumptionViolated(format!(
            "recurrent class has period {}",
            cs.period
        )));
    }
    let k = t.size();
    let mut transient = vec![true; k];
    for &s in &cs.recurrent_set {
        transient[s] = false;
    }
    let mut p = vec![1.0 / k as f64; k];
    let mut residual = f64::INFINITY;
    for _ in 0..MAX_POWER_ITERATIONS {
        let next = t.step(&p);
        residual = l1(&next, &p);
        p = next;
        if residual <= STATIONARY_TOL {
            for (pi, &tr) in p.iter_mut().zip(&transient) {
                if tr {
                    *pi = 0.0;
                }
            }
            let s: f64 = p.iter().sum();
            p.iter_mut().for_each(|v| *v /= s);
            return Dist::new(p);
        }
    }
    Err(Error::NoConvergence {
        iterations: MAX_POWER_ITERATIONS,
        residual,
    })
}

/// Index of the triplet state `(y', x, y)` in the lifted chain.
pub fn triplet_index(yp: usize, x: usize, y: usize, nx: usize, ny: usize) -> usize {
    (yp * nx + x) * ny + y
}

/// Chain on triplets `S_t = (Y_{t−1}, X_t, Y_t)` with
/// `P((j, x', k) | (i, x, j)) = px(x') w(k | x', j)` and zero elsewhere.
pub fn lifted_transition(px: &Dist, w: &Kernel) -> Result<TransitionMatrix> {
    let (nx, ny) = check_channel(px, w)?;
    let k = ny * nx * ny;
    let mut rows = vec![vec![0.0; k]; k];
    for i in 0..ny {
        for x in 0..nx {
            for j in 0..ny {
                let row = &mut rows[triplet_index(i, x, j, nx, ny)];
                for x2 in 0..nx {
                    for (kk, &wk) in w.row(&[x2, j]).iter().enumerate() {
                        row[triplet_index(j, x2, kk, nx, ny)] = px.p(x2) * wk;
                    }
                }
            }
        }
    }
    TransitionMatrix::new(rows)
}

/// The triplet law `π(y') px(x) w(y | x, y')` over `(Y', X, Y)`.
pub fn triplet_law(pi: &Dist, px: &Dist, w: &Kernel) -> Result<JointDist> {
    let (nx, ny) = check_channel(px, w)?;
    if pi.size() != ny {
        return Err(Error::AlphabetMismatch(format!(
            "state law has {} symbols, channel has {ny}",
            pi.size()
        )));
    }
    JointDist::from_fn(vec![ny, nx, ny], |c| {
        pi.p(c[0]) * px.p(c[1]) * w.p(c[2], &[c[1], c[0]])
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn bsc_joint(p: f64) -> JointDist {
        // A uniform, B = A xor Bern(p), C constant.
        JointDist::from_fn(vec![2, 2, 1], |c| {
            0.5 * if c[0] == c[1] { 1.0 - p } else { p }
        })
        .unwrap()
    }

    #[test]
    fn entropy_examples() {
        assert_abs_diff_eq!(entropy(&Dist::new(vec![0.5, 0.5]).unwrap()), 1.0, epsilon = 1e-15);
        assert_eq!(entropy(&Dist::new(vec![1.0, 0.0]).unwrap()), 0.0);
        assert_abs_diff_eq!(
            entropy(&Dist::new(vec![0.25, 0.75]).unwrap()),
            0.811278,
            epsilon = 1e-6
        );
    }

    #[test]
    fn invalid_dists_rejected() {
        assert!(Dist::new(vec![0.5, 0.4]).is_err());
        assert!(Dist::new(vec![1.2, -0.2]).is_err());
        assert!(Dist::new(vec![]).is_err());
        assert!(Alphabet::with_labels(vec!["a".into(), "a".into()]).is_err());
        assert!(Kernel::new(&[2], 2, vec![vec![1.0, 0.0]]).is_err());
    }

    #[test]
    fn cmi_examples() {
        let copy = JointDist::from_fn(vec![2, 2, 2], |c| {
            if c[0] == c[1] {
                0.25
            } else {
                0.0
            }
        })
        .unwrap();
        assert_abs_diff_eq!(cond_mutual_info(&copy).unwrap(), 1.0, epsilon = 1e-12);

        let indep = JointDist::from_fn(vec![2, 3, 2], |c| {
            let pc = [0.3, 0.7][c[2]];
            let pa = if c[2] == 0 { [0.2, 0.8] } else { [0.6, 0.4] }[c[0]];
            let pb = if c[2] == 0 { [0.1, 0.3, 0.6] } else { [0.5, 0.25, 0.25] }[c[1]];
            pc * pa * pb
        })
        .unwrap();
        assert_abs_diff_eq!(cond_mutual_info(&indep).unwrap(), 0.0, epsilon = 1e-12);

        // 1 - h2(0.1)
        assert_abs_diff_eq!(cond_mutual_info(&bsc_joint(0.1)).unwrap(), 0.531004, epsilon = 1e-6);

        assert!(cond_mutual_info(&JointDist::new(vec![2], vec![0.5, 0.5]).unwrap()).is_err());
    }

    #[test]
    fn tv_examples() {
        let p = JointDist::new(vec![2], vec![0.5, 0.5]).unwrap();
        let q = JointDist::new(vec![2], vec![0.25, 0.75]).unwrap();
        assert_eq!(tv_distance(&p, &p).unwrap(), 0.0);
        assert_abs_diff_eq!(tv_distance(&p, &q).unwrap(), 0.5, epsilon = 1e-15);
        let a = JointDist::new(vec![2], vec![1.0, 0.0]).unwrap();
        let b = JointDist::new(vec![2], vec![0.0, 1.0]).unwrap();
        assert_eq!(tv_distance(&a, &b).unwrap(), 2.0);
        let c = JointDist::new(vec![1, 2], vec![0.5, 0.5]).unwrap();
        assert!(tv_distance(&p, &c).is_err());
    }

    #[test]
    fn induced_transition_examples() {
        // w independent of x
        let w = Kernel::new(
            &[2, 2],
            2,
            vec![vec![0.9, 0.1], vec![0.3, 0.7], vec![0.9, 0.1], vec![0.3, 0.7]],
        )
        .unwrap();
        let t = induced_transition(&Dist::new(vec![0.4, 0.6]).unwrap(), &w).unwrap();
        assert_abs_diff_eq!(t.get(0, 0), 0.9, epsilon = 1e-15);
        assert_abs_diff_eq!(t.get(1, 1), 0.7, epsilon = 1e-15);

        // y = x xor y'
        let xor = Kernel::deterministic(&[2, 2], 2, |c| c[0] ^ c[1]).unwrap();
        let t = induced_transition(&Dist::uniform(2).unwrap(), &xor).unwrap();
        for i in 0..2 {
            for j in 0..2 {
                assert_eq!(t.get(i, j), 0.5);
            }
        }

        let t = induced_transition(&Dist::point(2, 0).unwrap(), &xor).unwrap();
        assert_eq!(t.row(0), xor.row(&[0, 0]));
        assert_eq!(t.row(1), xor.row(&[0, 1]));

        assert!(induced_transition(&Dist::uniform(3).unwrap(), &xor).is_err());
    }

    #[test]
    fn chain_structure_examples() {
        let id = TransitionMatrix::new(vec![vec![1.0, 0.0], vec![0.0, 1.0]]).unwrap();
        let cs = chain_structure(&id);
        assert_eq!(cs.recurrent_classes.len(), 2);
        assert!(!cs.is_unichain);
        assert!(!cs.is_aperiodic);

        let pos = TransitionMatrix::new(vec![vec![0.3, 0.7], vec![0.6, 0.4]]).unwrap();
        let cs = chain_structure(&pos);
        assert!(cs.is_unichain && cs.is_aperiodic);
        assert_eq!(cs.recurrent_set, vec![0, 1]);

        let swap = TransitionMatrix::new(vec![vec![0.0, 1.0], vec![1.0, 0.0]]).unwrap();
        let cs = chain_structure(&swap);
        assert!(cs.is_unichain);
        assert!(!cs.is_aperiodic);
        assert_eq!(cs.period, 2);

        // state 0 transient, {1, 2} recurrent aperiodic
        let tr = TransitionMatrix::new(vec![
            vec![0.5, 0.5, 0.0],
            vec![0.0, 0.5, 0.5],
            vec![0.0, 1.0, 0.0],
        ])
        .unwrap();
        let cs = chain_structure(&tr);
        assert!(cs.is_unichain && cs.is_aperiodic);
        assert_eq!(cs.recurrent_set, vec![1, 2]);

        // period-3 cycle
        let cyc = TransitionMatrix::new(vec![
            vec![0.0, 1.0, 0.0],
            vec![0.0, 0.0, 1.0],
            vec![1.0, 0.0, 0.0],
        ])
        .unwrap();
        assert_eq!(chain_structure(&cyc).period, 3);
    }

    #[test]
    fn stationary_examples() {
        let t = TransitionMatrix::new(vec![vec![0.9, 0.1], vec![0.2, 0.8]]).unwrap();
        let pi = stationary_dist(&t).unwrap();
        assert_abs_diff_eq!(pi.p(0), 2.0 / 3.0, epsilon = 1e-11);
        assert_abs_diff_eq!(pi.p(1), 1.0 / 3.0, epsilon = 1e-11);

        let ds = TransitionMatrix::new(vec![
            vec![0.5, 0.3, 0.2],
            vec![0.2, 0.5, 0.3],
            vec![0.3, 0.2, 0.5],
        ])
        .unwrap();
        let pi = stationary_dist(&ds).unwrap();
        for &p in pi.pmf() {
            assert_abs_diff_eq!(p, 1.0 / 3.0, epsilon = 1e-12);
        }

        let r1 = TransitionMatrix::new(vec![vec![0.1, 0.2, 0.7]; 3]).unwrap();
        let pi = stationary_dist(&r1).unwrap();
        assert_abs_diff_eq!(pi.p(2), 0.7, epsilon = 1e-15);

        let tr = TransitionMatrix::new(vec![
            vec![0.5, 0.5, 0.0],
            vec![0.0, 0.5, 0.5],
            vec![0.0, 1.0, 0.0],
        ])
        .unwrap();
        let pi = stationary_dist(&tr).unwrap();
        assert_eq!(pi.p(0), 0.0);

        let swap = TransitionMatrix::new(vec![vec![0.0, 1.0], vec![1.0, 0.0]]).unwrap();
        assert!(matches!(stationary_dist(&swap), Err(Error::AssumptionViolated(_))));
        let id = TransitionMatrix::new(vec![vec![1.0, 0.0], vec![0.0, 1.0]]).unwrap();
        assert!(matches!(stationary_dist(&id), Err(Error::AssumptionViolated(_))));
    }

    #[test]
    fn lifted_structural_zeros_and_equilibrium() {
        let px = Dist::uniform(2).unwrap();
        let w = Kernel::new(
            &[2, 2],
            2,
            vec![vec![0.8, 0.2], vec![0.65, 0.35], vec![0.3, 0.7], vec![0.15, 0.85]],
        )
        .unwrap();
        let lt = lifted_transition(&px, &w).unwrap();
        for i in 0..2 {
            for x in 0..2 {
                for j in 0..2 {
                    let s = triplet_index(i, x, j, 2, 2);
                    for j2 in 0..2 {
                        for x2 in 0..2 {
                            for k in 0..2 {
                                if j2 != j {
                                    assert_eq!(lt.get(s, triplet_index(j2, x2, k, 2, 2)), 0.0);
                                }
                            }
                        }
                    }
                }
            }
        }
        let pi = stationary_dist(&induced_transition(&px, &w).unwrap()).unwrap();
        let q = triplet_law(&pi, &px, &w).unwrap();
        let lifted_pi = stationary_dist(&lt).unwrap();
        assert!(l1(lifted_pi.pmf(), q.pmf()) <= 1e-10);
    }

    #[test]
    fn marginal_and_independence_gap() {
        let j = JointDist::from_fn(vec![2, 3], |c| [0.4, 0.6][c[0]] * [0.2, 0.3, 0.5][c[1]]).unwrap();
        let m = j.marginal(&[1]).unwrap();
        assert_abs_diff_eq!(m.pmf()[2], 0.5, epsilon = 1e-15);
        let sw = j.marginal(&[1, 0]).unwrap();
        assert_eq!(sw.sizes(), &[3, 2]);
        assert_abs_diff_eq!(sw.get(&[2, 1]), 0.3, epsilon = 1e-15);
        assert!(j.independence_gap(&[0], &[1]).unwrap() < 1e-15);
        assert!(j.marginal(&[0, 0]).is_err());
    }
}
