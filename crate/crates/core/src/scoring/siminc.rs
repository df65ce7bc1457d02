use std::collections::{BTreeMap, BTreeSet, HashMap};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::dist::{strides_of, JointDistribution, Odometer, Variable};
use crate::error::{Error, Result};
use crate::hypergraph::{noise_name, DirectedHypergraph};

use super::idef;

/// Noise values of a response-sized arc are labelled `g<k>`, where `k` reads the
/// function's outputs as digits, first source setting most significant.
pub const RESPONSE_LABEL_PREFIX: &str = "g";

const LN2: f64 = std::f64::consts::LN_2;
const DENSE_FLOOR: f64 = 1e-300;
const MAX_CELLS: usize = 1 << 24;
const MAX_CANDIDATE_ENTRIES: usize = 1 << 24;

/// How many values each arc's noise variable gets.
#[derive(Debug, Clone, PartialEq, Default)]
pub enum NoiseSizes {
    /// `|V(Tgt a)|^|V(Src a)|`: one value per function from source to target settings.
    #[default]
    Response,
    Uniform(usize),
    /// Sizes by arc label; unlisted arcs get the response size.
    PerArc(BTreeMap<String, usize>),
}

/// Which entries of the conditional table `ν(U | X)` the optimizer moves.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Parametrization {
    /// Dense when `|supp μ| · |V(U)|` fits the cell budget, otherwise consistent support.
    #[default]
    Auto,
    /// Every noise setting for every supported `x`.
    Dense,
    /// Only noise settings whose response functions reproduce `x`. Every point is
    /// a valid extension with zero arc terms, so the value is still an upper bound
    /// on the infimum and reaches zero exactly when a witness exists.
    ConsistentSupport,
}

/// Step-size control for the multiplicative updates. Steps that raise the
/// objective are retried with `step * shrink`; accepted steps grow by `grow` up to `max`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepSchedule {
    pub initial: f64,
    pub max: f64,
    pub grow: f64,
    pub shrink: f64,
}

impl Default for StepSchedule {
    fn default() -> Self {
        StepSchedule { initial: 1.0, max: 1.0, grow: 1.5, shrink: 0.5 }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimincOptions {
    pub noise: NoiseSizes,
    pub parametrization: Parametrization,
    pub restarts: usize,
    pub max_iters: usize,
    pub step: StepSchedule,
    /// Converged once the objective improves by less than this over `window` iterations.
    pub tol: f64,
    pub window: usize,
    pub seed: u64,
    /// A restart reaching this value stops, and no further restarts run.
    pub stop_below: f64,
    pub dense_cell_budget: usize,
    /// Consistent-support cells whose conditional weight drops below this are removed.
    pub prune_below: f64,
}

impl Default for SimincOptions {
    fn default() -> Self {
        SimincOptions {
            noise: NoiseSizes::Response,
            parametrization: Parametrization::Auto,
            restarts: 16,
            max_iters: 5000,
            step: StepSchedule::default(),
            tol: 1e-9,
            window: 50,
            seed: 0,
            stop_below: 1e-10,
            dense_cell_budget: 1 << 20,
            prune_below: 1e-14,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SimincBreakdown {
    /// `Σ_a H(U_a) − H(U)`.
    pub independence_gap: f64,
    /// `H(Tgt a | Src a, U_a)` by arc label.
    pub arc_conditional_entropy: BTreeMap<String, f64>,
}

impl SimincBreakdown {
    pub fn total(&self) -> f64 {
        self.independence_gap + self.arc_conditional_entropy.values().sum::<f64>()
    }
}

#[derive(Debug, Clone)]
pub struct SimincResult {
    pub value: f64,
    /// Extension of the input over its variables plus one `U__<label>` per arc.
    pub witness_candidate: JointDistribution,
    /// Arc label to noise variable name.
    pub arc_map: BTreeMap<String, String>,
    pub restarts_used: usize,
    pub converged: bool,
    pub iterations: usize,
    pub breakdown: SimincBreakdown,
    /// Final value of each restart that ran, in order.
    pub restart_values: Vec<f64>,
    pub parametrization: Parametrization,
    pub seed: u64,
}

struct ArcData {
    label: String,
    size: usize,
    response: bool,
    src_card: usize,
    tgt_card: usize,
    row_src: Vec<usize>,
    row_tgt: Vec<usize>,
}

#[derive(Clone)]
struct Cells {
    row_start: Vec<usize>,
    uid: Vec<u32>,
}

struct Marginals {
    p_u: Vec<f64>,
    q: Vec<Vec<f64>>,
    stu: Vec<Vec<f64>>,
    su: Vec<Vec<f64>>,
}

/// The SIMInc objective over a fixed cell layout of `ν(U | X)`.
///
/// A point is one weight per cell; rows are the supported settings of the base
/// distribution. [`SimincProblem::objective`] and [`SimincProblem::gradient`]
/// accept unnormalized weights, so finite differences can be taken per cell.
pub struct SimincProblem {
    base: JointDistribution,
    arcs: Vec<ArcData>,
    mode: Parametrization,
    rows: Vec<usize>,
    row_mass: Vec<f64>,
    cells: Cells,
    /// Noise value of each arc, `arcs.len()` entries per distinct noise setting.
    uid_u: Vec<u32>,
}

fn entropy_bits(table: &[f64]) -> f64 {
    -table.iter().filter(|&&p| p > 0.0).map(|&p| p * p.log2()).sum::<f64>()
}

fn setting_index(setting: &[usize], positions: &[usize], cards: &[usize]) -> usize {
    positions.iter().fold(0, |acc, &p| acc * cards[p] + setting[p])
}

impl SimincProblem {
    pub fn new(graph: &DirectedHypergraph, d: &JointDistribution, options: &SimincOptions) -> Result<Self> {
        let cards = d.cardinalities();
        let rows: Vec<usize> = (0..d.probs().len()).filter(|&i| d.probs()[i] > 0.0).collect();
        let row_mass: Vec<f64> = rows.iter().map(|&i| d.probs()[i]).collect();
        let settings: Vec<Vec<usize>> = rows.iter().map(|&i| d.decode(i)).collect();

        let mut arcs = Vec::with_capacity(graph.arcs().len());
        for a in graph.arcs() {
            let src: Vec<&String> = a.sources.iter().collect();
            let tgt: Vec<&String> = a.targets.iter().collect();
            let src_pos = d.set_positions(&src)?;
            let tgt_pos = d.set_positions(&tgt)?;
            let src_card: usize = src_pos.iter().map(|&p| cards[p]).product();
            let tgt_card: usize = tgt_pos.iter().map(|&p| cards[p]).product();
            let response_size = u32::try_from(src_card).ok().and_then(|s| tgt_card.checked_pow(s));
            let size = match &options.noise {
                NoiseSizes::Response => response_size,
                NoiseSizes::Uniform(k) => Some(*k),
                NoiseSizes::PerArc(m) => m.get(&a.label).copied().or(response_size),
            }
            .ok_or_else(|| {
                Error::InvalidOption(format!("response space of arc `{}` is too large; set a noise size", a.label))
            })?;
            if size < 1 {
                return Err(Error::InvalidOption(format!("noise size for arc `{}` must be at least 1", a.label)));
            }
            if size > u32::MAX as usize {
                return Err(Error::InvalidOption(format!("noise size for arc `{}` is too large", a.label)));
            }
            arcs.push(ArcData {
                label: a.label.clone(),
                size,
                response: Some(size) == response_size,
                src_card,
                tgt_card,
                row_src: settings.iter().map(|s| setting_index(s, &src_pos, &cards)).collect(),
                row_tgt: settings.iter().map(|s| setting_index(s, &tgt_pos, &cards)).collect(),
            });
        }

        let noise_total = arcs.iter().try_fold(1usize, |acc, a| acc.checked_mul(a.size));
        let dense_cells = noise_total.and_then(|m| m.checked_mul(rows.len()));
        let all_response = arcs.iter().all(|a| a.response);
        let mode = match options.parametrization {
            Parametrization::Auto => match dense_cells {
                Some(n) if n <= options.dense_cell_budget => Parametrization::Dense,
                _ if all_response => Parametrization::ConsistentSupport,
                _ => {
                    return Err(Error::InvalidOption(
                        "conditional table exceeds the cell budget; use smaller noise sizes".into(),
                    ))
                }
            },
            Parametrization::ConsistentSupport if !all_response => {
                return Err(Error::InvalidOption("consistent support needs response-sized noise on every arc".into()))
            }
            m => m,
        };

        let mut problem = SimincProblem {
            base: d.clone(),
            arcs,
            mode,
            rows,
            row_mass,
            cells: Cells { row_start: vec![0], uid: Vec::new() },
            uid_u: Vec::new(),
        };
        match mode {
            Parametrization::Dense => {
                let m = noise_total.filter(|_| dense_cells.is_some_and(|n| n <= MAX_CELLS)).ok_or_else(|| {
                    Error::InvalidOption("dense conditional table is too large; use smaller noise sizes".into())
                })?;
                problem.build_dense(m);
            }
            _ => problem.build_consistent()?,
        }
        Ok(problem)
    }

    fn build_dense(&mut self, m: usize) {
        let sizes: Vec<usize> = self.arcs.iter().map(|a| a.size).collect();
        let mut odo = Odometer::new(sizes);
        while let Some(u) = odo.next_setting() {
            self.uid_u.extend(u.iter().map(|&v| v as u32));
        }
        for r in 0..self.rows.len() {
            self.cells.uid.extend(0..m as u32);
            self.cells.row_start.push((r + 1) * m);
        }
    }

    fn build_consistent(&mut self) -> Result<()> {
        let k = self.arcs.len();
        let per_row: usize = self
            .arcs
            .iter()
            .map(|a| a.size / a.tgt_card)
            .try_fold(1usize, |acc, n| acc.checked_mul(n))
            .filter(|n| n.saturating_mul(self.rows.len()) <= MAX_CELLS)
            .ok_or_else(|| Error::InvalidOption("consistent support is too large; use smaller noise sizes".into()))?;
        let mut ids: HashMap<Vec<u32>, u32> = HashMap::new();
        let mut u = vec![0u32; k];
        for r in 0..self.rows.len() {
            // Functions agreeing with x on arc a: the digit of source setting s is fixed to t.
            let lists: Vec<Vec<u32>> = self
                .arcs
                .iter()
                .map(|a| {
                    let (s, t) = (a.row_src[r], a.row_tgt[r]);
                    let weight = a.tgt_card.pow((a.src_card - 1 - s) as u32);
                    (0..a.size).filter(|g| (g / weight) % a.tgt_card == t).map(|g| g as u32).collect()
                })
                .collect();
            let mut odo = Odometer::new(lists.iter().map(Vec::len).collect());
            while let Some(idx) = odo.next_setting() {
                for (a, &i) in idx.iter().enumerate() {
                    u[a] = lists[a][i];
                }
                let next = ids.len() as u32;
                let id = *ids.entry(u.clone()).or_insert_with(|| {
                    self.uid_u.extend_from_slice(&u);
                    next
                });
                self.cells.uid.push(id);
            }
            self.cells.row_start.push(self.cells.uid.len());
        }
        debug_assert_eq!(self.cells.uid.len(), per_row * self.rows.len());
        Ok(())
    }

    pub fn parametrization(&self) -> Parametrization {
        self.mode
    }

    pub fn num_cells(&self) -> usize {
        self.cells.uid.len()
    }

    pub fn num_rows(&self) -> usize {
        self.rows.len()
    }

    /// Row (index into the supported settings) of each cell.
    pub fn cell_rows(&self) -> Vec<usize> {
        let mut out = Vec::with_capacity(self.num_cells());
        for r in 0..self.rows.len() {
            out.extend(std::iter::repeat(r).take(self.cells.row_start[r + 1] - self.cells.row_start[r]));
        }
        out
    }

    /// Uniform conditional on each row.
    pub fn uniform_point(&self) -> Vec<f64> {
        let mut c = vec![0.0; self.num_cells()];
        for r in 0..self.rows.len() {
            let (lo, hi) = (self.cells.row_start[r], self.cells.row_start[r + 1]);
            c[lo..hi].fill(1.0 / (hi - lo) as f64);
        }
        c
    }

    /// A Dirichlet(1) draw on each row.
    pub fn random_point(&self, rng: &mut impl Rng) -> Vec<f64> {
        let mut c: Vec<f64> = (0..self.num_cells()).map(|_| -(1.0 - rng.gen::<f64>()).ln() + 1e-300).collect();
        normalize_rows(&self.cells, &mut c);
        c
    }

    fn marginals(&self) -> Marginals {
        let dense = self.mode == Parametrization::Dense;
        Marginals {
            p_u: vec![0.0; self.uid_u.len() / self.arcs.len().max(1)],
            q: self.arcs.iter().map(|a| vec![0.0; a.size]).collect(),
            stu: self
                .arcs
                .iter()
                .map(|a| vec![0.0; if dense { a.src_card * a.tgt_card * a.size } else { 0 }])
                .collect(),
            su: self.arcs.iter().map(|a| vec![0.0; if dense { a.src_card * a.size } else { 0 }]).collect(),
        }
    }

    fn n_uid(&self) -> usize {
        if self.arcs.is_empty() {
            1
        } else {
            self.uid_u.len() / self.arcs.len()
        }
    }

    fn accumulate(&self, cells: &Cells, c: &[f64], m: &mut Marginals) {
        let k = self.arcs.len();
        let dense = self.mode == Parametrization::Dense;
        m.p_u.clear();
        m.p_u.resize(self.n_uid(), 0.0);
        for t in m.q.iter_mut().chain(m.stu.iter_mut()).chain(m.su.iter_mut()) {
            t.fill(0.0);
        }
        for r in 0..self.rows.len() {
            let mu = self.row_mass[r];
            for i in cells.row_start[r]..cells.row_start[r + 1] {
                let nu = mu * c[i];
                if nu == 0.0 {
                    continue;
                }
                let uid = cells.uid[i] as usize;
                m.p_u[uid] += nu;
                let us = &self.uid_u[uid * k..uid * k + k];
                for (a, arc) in self.arcs.iter().enumerate() {
                    let u = us[a] as usize;
                    m.q[a][u] += nu;
                    if dense {
                        let s = arc.row_src[r];
                        m.su[a][s * arc.size + u] += nu;
                        m.stu[a][(s * arc.tgt_card + arc.row_tgt[r]) * arc.size + u] += nu;
                    }
                }
            }
        }
    }

    fn score(&self, m: &Marginals) -> SimincBreakdown {
        let gap = m.q.iter().map(|q| entropy_bits(q)).sum::<f64>() - entropy_bits(&m.p_u);
        let dense = self.mode == Parametrization::Dense;
        let arc_conditional_entropy = self
            .arcs
            .iter()
            .enumerate()
            .map(|(a, arc)| {
                let h = if dense { entropy_bits(&m.stu[a]) - entropy_bits(&m.su[a]) } else { 0.0 };
                (arc.label.clone(), h)
            })
            .collect();
        SimincBreakdown { independence_gap: gap, arc_conditional_entropy }
    }

    fn evaluate(&self, cells: &Cells, c: &[f64], m: &mut Marginals) -> (f64, SimincBreakdown) {
        self.accumulate(cells, c, m);
        let b = self.score(m);
        (b.total(), b)
    }

    /// Objective in bits at cell weights `c` (one per cell, not required to be normalized).
    pub fn objective(&self, c: &[f64]) -> f64 {
        let mut m = self.marginals();
        self.evaluate(&self.cells, c, &mut m).0
    }

    /// Partial derivatives of [`SimincProblem::objective`] with respect to each cell weight.
    pub fn gradient(&self, c: &[f64]) -> Vec<f64> {
        let mut m = self.marginals();
        self.accumulate(&self.cells, c, &mut m);
        let k = self.arcs.len();
        let dense = self.mode == Parametrization::Dense;
        let mut g = vec![0.0; c.len()];
        for r in 0..self.rows.len() {
            for i in self.cells.row_start[r]..self.cells.row_start[r + 1] {
                let uid = self.cells.uid[i] as usize;
                let mut d = m.p_u[uid].log2() + 1.0 / LN2;
                for (a, arc) in self.arcs.iter().enumerate() {
                    let u = self.uid_u[uid * k + a] as usize;
                    d -= m.q[a][u].log2() + 1.0 / LN2;
                    if dense {
                        let s = arc.row_src[r];
                        d += m.su[a][s * arc.size + u].log2();
                        d -= m.stu[a][(s * arc.tgt_card + arc.row_tgt[r]) * arc.size + u].log2();
                    }
                }
                g[i] = self.row_mass[r] * d;
            }
        }
        g
    }

    /// One exponentiated-gradient step: `c ← c · exp(−η ∂F/∂c / μ(x))` in nats, renormalized per row.
    fn step(&self, cells: &Cells, c: &[f64], m: &Marginals, eta: f64, out: &mut Vec<f64>, factor: &mut Vec<f64>) {
        let k = self.arcs.len();
        out.clear();
        out.resize(c.len(), 0.0);
        if self.mode == Parametrization::Dense {
            for r in 0..self.rows.len() {
                let (lo, hi) = (cells.row_start[r], cells.row_start[r + 1]);
                let mut top = f64::NEG_INFINITY;
                for i in lo..hi {
                    let uid = cells.uid[i] as usize;
                    let mut e = -m.p_u[uid].ln();
                    for (a, arc) in self.arcs.iter().enumerate() {
                        let u = self.uid_u[uid * k + a] as usize;
                        let s = arc.row_src[r];
                        e += m.q[a][u].ln() + m.stu[a][(s * arc.tgt_card + arc.row_tgt[r]) * arc.size + u].ln()
                            - m.su[a][s * arc.size + u].ln();
                    }
                    out[i] = eta * e;
                    top = top.max(out[i]);
                }
                for i in lo..hi {
                    out[i] = c[i] * (out[i] - top).exp();
                }
            }
            normalize_rows(cells, out);
            for v in out.iter_mut() {
                *v = v.max(DENSE_FLOOR);
            }
        } else {
            factor.clear();
            factor.resize(m.p_u.len(), 0.0);
            for (uid, f) in factor.iter_mut().enumerate() {
                let p = m.p_u[uid];
                if p > 0.0 {
                    let prod: f64 = (0..k).map(|a| m.q[a][self.uid_u[uid * k + a] as usize]).product();
                    let ratio = prod / p;
                    *f = if eta == 1.0 { ratio } else { ratio.powf(eta) };
                }
            }
            for (i, v) in out.iter_mut().enumerate() {
                *v = c[i] * factor[cells.uid[i] as usize];
            }
            normalize_rows(cells, out);
        }
    }

    fn prune(&self, cells: &mut Cells, c: &mut Vec<f64>, below: f64) {
        let mut uid = Vec::with_capacity(cells.uid.len());
        let mut kept = Vec::with_capacity(c.len());
        let mut starts = vec![0];
        for r in 0..self.rows.len() {
            let (lo, hi) = (cells.row_start[r], cells.row_start[r + 1]);
            let top = c[lo..hi].iter().cloned().fold(0.0, f64::max);
            for i in lo..hi {
                // Never empty a row: its largest cell always survives.
                if c[i] >= below || c[i] == top {
                    uid.push(cells.uid[i]);
                    kept.push(c[i]);
                }
            }
            starts.push(uid.len());
        }
        *cells = Cells { row_start: starts, uid };
        normalize_rows(cells, &mut kept);
        *c = kept;
    }

    /// Runs one restart from `c`; returns the final cells, weights, value, iterations, and convergence.
    fn descend(&self, options: &SimincOptions, mut c: Vec<f64>) -> (Cells, Vec<f64>, f64, usize, bool) {
        let sparse = self.mode == Parametrization::ConsistentSupport;
        let mut cells = self.cells.clone();
        let mut m = self.marginals();
        let mut trial_m = self.marginals();
        let mut trial = Vec::new();
        let mut factor = Vec::new();
        let (mut value, _) = self.evaluate(&cells, &c, &mut m);
        let mut history = vec![value];
        let mut eta = options.step.initial;
        let mut converged = false;
        let mut iters = 0;
        while iters < options.max_iters {
            if value < options.stop_below {
                converged = true;
                break;
            }
            let mut accepted = false;
            for _ in 0..60 {
                self.step(&cells, &c, &m, eta, &mut trial, &mut factor);
                let (v, _) = self.evaluate(&cells, &trial, &mut trial_m);
                if v <= value + 1e-15 {
                    std::mem::swap(&mut c, &mut trial);
                    std::mem::swap(&mut m, &mut trial_m);
                    value = v;
                    eta = (eta * options.step.grow).min(options.step.max);
                    accepted = true;
                    break;
                }
                eta *= options.step.shrink;
            }
            iters += 1;
            history.push(value);
            if !accepted {
                converged = true;
                break;
            }
            if sparse && iters % 10 == 0 {
                self.prune(&mut cells, &mut c, options.prune_below);
                value = self.evaluate(&cells, &c, &mut m).0;
            }
            let w = options.window.max(1);
            if history.len() > w && history[history.len() - 1 - w] - value < options.tol {
                converged = true;
                break;
            }
        }
        (cells, c, value, iters, converged)
    }

    fn candidate(&self, cells: &Cells, c: &[f64]) -> Result<JointDistribution> {
        let k = self.arcs.len();
        let mut support: Vec<BTreeSet<u32>> = vec![BTreeSet::new(); k];
        if self.mode == Parametrization::Dense {
            for (a, arc) in self.arcs.iter().enumerate() {
                support[a] = (0..arc.size as u32).collect();
            }
        } else {
            for (i, &uid) in cells.uid.iter().enumerate() {
                if c[i] > 0.0 {
                    for a in 0..k {
                        support[a].insert(self.uid_u[uid as usize * k + a]);
                    }
                }
            }
        }
        let entries = support
            .iter()
            .try_fold(self.base.probs().len(), |acc, s| acc.checked_mul(s.len()))
            .filter(|&n| n <= MAX_CANDIDATE_ENTRIES)
            .ok_or_else(|| Error::InvalidOption("witness candidate is too large; use smaller noise sizes".into()))?;
        let index: Vec<BTreeMap<u32, usize>> =
            support.iter().map(|s| s.iter().enumerate().map(|(i, &u)| (u, i)).collect()).collect();
        let mut variables = self.base.variables().to_vec();
        for (a, arc) in self.arcs.iter().enumerate() {
            let labels: Vec<String> = support[a]
                .iter()
                .map(|u| if arc.response { format!("{RESPONSE_LABEL_PREFIX}{u}") } else { u.to_string() })
                .collect();
            variables.push(Variable::new(noise_name(&arc.label), labels)?);
        }
        let noise_cards: Vec<usize> = support.iter().map(BTreeSet::len).collect();
        let strides = strides_of(&noise_cards);
        let noise_total: usize = noise_cards.iter().product();
        let mut probs = vec![0.0; entries];
        for r in 0..self.rows.len() {
            for i in cells.row_start[r]..cells.row_start[r + 1] {
                if c[i] == 0.0 {
                    continue;
                }
                let uid = cells.uid[i] as usize;
                let offset: usize = (0..k).map(|a| index[a][&self.uid_u[uid * k + a]] * strides[a]).sum();
                probs[self.rows[r] * noise_total + offset] += self.row_mass[r] * c[i];
            }
        }
        JointDistribution::new(variables, probs)
    }
}

fn normalize_rows(cells: &Cells, c: &mut [f64]) {
    for r in 0..cells.row_start.len() - 1 {
        let row = &mut c[cells.row_start[r]..cells.row_start[r + 1]];
        let total: f64 = row.iter().sum();
        if total > 0.0 {
            row.iter_mut().for_each(|v| *v /= total);
        } else {
            let n = row.len() as f64;
            row.iter_mut().for_each(|v| *v = 1.0 / n);
        }
    }
}

/// Searches extensions of `d` for the smallest SIMInc objective.
///
/// Restart 0 starts from uniform conditionals; later restarts draw Dirichlet(1)
/// rows from a ChaCha8 stream keyed by `options.seed` and the restart index.
pub fn siminc(graph: &DirectedHypergraph, d: &JointDistribution, options: &SimincOptions) -> Result<SimincResult> {
    if options.restarts == 0 {
        return Err(Error::InvalidOption("at least one restart is required".into()));
    }
    let lower = idef(graph, d)?;
    let problem = SimincProblem::new(graph, d, options)?;
    let mut best: Option<(Cells, Vec<f64>, f64, usize, bool)> = None;
    let mut restart_values = Vec::new();
    for r in 0..options.restarts {
        let start = if r == 0 {
            problem.uniform_point()
        } else {
            let mut rng = ChaCha8Rng::seed_from_u64(options.seed);
            rng.set_stream(r as u64);
            problem.random_point(&mut rng)
        };
        let run = problem.descend(options, start);
        restart_values.push(run.2);
        let done = run.2 < options.stop_below;
        if best.as_ref().is_none_or(|b| run.2 < b.2) {
            best = Some(run);
        }
        if done {
            break;
        }
    }
    let (mut cells, mut c, _, iterations, converged) = best.expect("at least one restart ran");

    // Drop dust so the candidate stays small; the reported value is recomputed on what remains.
    if problem.mode == Parametrization::ConsistentSupport {
        let mut threshold = 1e-12;
        loop {
            problem.prune(&mut cells, &mut c, threshold);
            match problem.candidate(&cells, &c) {
                Err(Error::InvalidOption(_)) if threshold < 1e-3 => threshold *= 100.0,
                _ => break,
            }
        }
    }
    let witness_candidate = problem.candidate(&cells, &c)?;
    let mut m = problem.marginals();
    let (value, breakdown) = problem.evaluate(&cells, &c, &mut m);
    if value < lower - 1e-6 {
        return Err(Error::BoundViolation(format!("SIMInc estimate {value} is below IDef {lower}")));
    }
    Ok(SimincResult {
        value,
        witness_candidate,
        arc_map: graph.arcs().iter().map(|a| (a.label.clone(), noise_name(&a.label))).collect(),
        restarts_used: restart_values.len(),
        converged,
        iterations,
        breakdown,
        restart_values,
        parametrization: problem.mode,
        seed: options.seed,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hypergraph::{from_graph, Hyperarc};
    use crate::scoring::siminc_upper_bound;

    fn coins() -> JointDistribution {
        JointDistribution::uniform(vec![Variable::binary("X"), Variable::binary("Y")]).unwrap()
    }

    fn two_roots() -> DirectedHypergraph {
        DirectedHypergraph::new(
            ["X", "Y"],
            vec![Hyperarc::new("x", &[] as &[&str], &["X"]), Hyperarc::new("y", &[] as &[&str], &["Y"])],
        )
        .unwrap()
    }

    #[test]
    fn independent_coins_reach_zero() {
        let r = siminc(&two_roots(), &coins(), &SimincOptions::default()).unwrap();
        assert!(r.value.abs() < 1e-6, "{}", r.value);
        assert_eq!(r.parametrization, Parametrization::Dense);
        let back = r.witness_candidate.marginal(&["X", "Y"]).unwrap();
        assert!(back.max_abs_diff(&coins()).unwrap() < 1e-9);
    }

    #[test]
    fn value_matches_breakdown_and_upper_bound() {
        let d = JointDistribution::new(vec![Variable::binary("X"), Variable::binary("Y")], vec![0.4, 0.1, 0.2, 0.3])
            .unwrap();
        let g = from_graph(&["X", "Y"], &[("X", "Y")], &[]).unwrap();
        let r = siminc(&g, &d, &SimincOptions { restarts: 3, ..Default::default() }).unwrap();
        assert!((r.value - r.breakdown.total()).abs() < 1e-12);
        let ub = siminc_upper_bound(&g, &d, &r.witness_candidate).unwrap();
        assert!((ub - r.value).abs() < 1e-6, "{ub} vs {}", r.value);
        assert!(r.value < 1e-6);
    }

    #[test]
    fn xor_on_three_cycle_stays_above_idef() {
        let vars = vec![Variable::binary("X"), Variable::binary("Y"), Variable::binary("Z")];
        let d = JointDistribution::from_fn(vars, |s| if s[2] == s[0] ^ s[1] { 1.0 } else { 0.0 }).unwrap();
        let g = from_graph(&["X", "Y", "Z"], &[("X", "Y"), ("Y", "Z"), ("Z", "X")], &[]).unwrap();
        let r = siminc(&g, &d, &SimincOptions { restarts: 2, ..Default::default() }).unwrap();
        assert!(r.value >= 1.0 - 1e-6);
    }

    #[test]
    fn zero_noise_size_is_rejected() {
        let opts = SimincOptions { noise: NoiseSizes::Uniform(0), ..Default::default() };
        assert!(matches!(siminc(&two_roots(), &coins(), &opts), Err(Error::InvalidOption(_))));
    }

    #[test]
    fn seeds_reproduce() {
        let d = JointDistribution::new(vec![Variable::binary("X"), Variable::binary("Y")], vec![0.1, 0.2, 0.3, 0.4])
            .unwrap();
        let g = from_graph(&["X", "Y"], &[("X", "Y"), ("Y", "X")], &[]).unwrap();
        let opts = SimincOptions { restarts: 3, seed: 7, stop_below: 0.0, max_iters: 200, ..Default::default() };
        let a = siminc(&g, &d, &opts).unwrap();
        let b = siminc(&g, &d, &opts).unwrap();
        assert_eq!(a.restart_values, b.restart_values);
    }

    #[test]
    fn consistent_support_has_zero_arc_terms() {
        let d = JointDistribution::new(vec![Variable::binary("X"), Variable::binary("Y")], vec![0.4, 0.1, 0.2, 0.3])
            .unwrap();
        let g = from_graph(&["X", "Y"], &[("X", "Y")], &[]).unwrap();
        let opts = SimincOptions { parametrization: Parametrization::ConsistentSupport, ..Default::default() };
        let r = siminc(&g, &d, &opts).unwrap();
        assert!(r.breakdown.arc_conditional_entropy.values().all(|&h| h == 0.0));
        let ub = siminc_upper_bound(&g, &d, &r.witness_candidate).unwrap();
        assert!((ub - r.value).abs() < 1e-9);
    }

    #[test]
    fn gradient_matches_finite_differences() {
        let d = JointDistribution::new(vec![Variable::binary("X"), Variable::binary("Y")], vec![0.4, 0.1, 0.2, 0.3])
            .unwrap();
        let g = from_graph(&["X", "Y"], &[("X", "Y"), ("Y", "X")], &[]).unwrap();
        let p = SimincProblem::new(&g, &d, &SimincOptions { noise: NoiseSizes::Uniform(3), ..Default::default() })
            .unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let c = p.random_point(&mut rng);
        let grad = p.gradient(&c);
        for i in 0..p.num_cells() {
            let h = 1e-6 * c[i];
            let mut up = c.clone();
            up[i] += h;
            let mut down = c.clone();
            down[i] -= h;
            let fd = (p.objective(&up) - p.objective(&down)) / (2.0 * h);
            assert!((fd - grad[i]).abs() <= 1e-5 * grad[i].abs().max(1e-3), "{i}: {fd} vs {}", grad[i]);
        }
    }
}
