//! Chains of cylinders, Hölder paths between attractor points, and the
//! whole-attractor parameterization for exponents above the similarity
//! dimension.

use std::collections::{HashMap, VecDeque};
use std::fmt::Write as _;

use serde::Serialize;

use crate::ifs::IfsSystem;
use crate::metric::Metric;
use crate::oracle::{Adjacency, AdjacencyOracle, ChainPoint};
use crate::word::{expand, relative_cut, Word};
use crate::{svg, Error, Result};

/// Piecewise-linear curve through `(t_i, x_i)`, `t` strictly increasing.
#[derive(Clone, Debug, PartialEq)]
pub struct SampledCurve {
    pub t: Vec<f64>,
    pub x: Vec<Vec<f64>>,
    pub metric: Metric,
}

impl SampledCurve {
    pub fn new(t: Vec<f64>, x: Vec<Vec<f64>>, metric: Metric) -> Result<Self> {
        if t.len() < 2 || t.len() != x.len() {
            return Err(Error::InvalidInput("a curve needs at least two breakpoints, one point each".into()));
        }
        if t.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::InvalidInput("breakpoint parameters must increase strictly".into()));
        }
        Ok(SampledCurve { t, x, metric })
    }

    /// Constant map on `[0,1]`.
    pub fn constant(p: Vec<f64>, metric: Metric) -> Self {
        SampledCurve { t: vec![0.0, 1.0], x: vec![p.clone(), p], metric }
    }

    pub fn len(&self) -> usize {
        self.t.len()
    }

    pub fn is_empty(&self) -> bool {
        self.t.is_empty()
    }

    pub fn domain(&self) -> (f64, f64) {
        (self.t[0], *self.t.last().unwrap())
    }

    pub fn start(&self) -> &[f64] {
        &self.x[0]
    }

    pub fn end(&self) -> &[f64] {
        self.x.last().unwrap()
    }

    /// Linear interpolation, clamped to the domain.
    pub fn eval(&self, t: f64) -> Vec<f64> {
        let n = self.t.len();
        if t <= self.t[0] {
            return self.x[0].clone();
        }
        if t >= self.t[n - 1] {
            return self.x[n - 1].clone();
        }
        let j = self.t.partition_point(|&s| s <= t);
        let (t0, t1) = (self.t[j - 1], self.t[j]);
        let lam = (t - t0) / (t1 - t0);
        self.x[j - 1].iter().zip(&self.x[j]).map(|(a, b)| a + lam * (b - a)).collect()
    }

    /// Same curve on `[0,1]`.
    pub fn normalized(&self) -> SampledCurve {
        let (a, b) = self.domain();
        let t = self.t.iter().map(|s| (s - a) / (b - a)).collect();
        SampledCurve { t, x: self.x.clone(), metric: self.metric.clone() }
    }

    /// CSV rows `t;x1;..;xn`.
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        for (t, p) in self.t.iter().zip(&self.x) {
            let _ = write!(out, "{t}");
            for c in p {
                let _ = write!(out, ";{c}");
            }
            out.push('\n');
        }
        out
    }

    /// Single-polyline SVG fitted to `lo..hi` (the curve's own box when absent).
    pub fn to_svg(&self, bbox: Option<(&[f64], &[f64])>, stroke_width: f64) -> String {
        let own = crate::spatial::bbox(&self.x);
        let (lo, hi) = bbox.unwrap_or((&own.0, &own.1));
        svg::polyline(&self.x, lo, hi, stroke_width)
    }
}

/// Parameters of the Hölder-limit bound for sequences of maps.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct HolderBoundParams {
    pub t: f64,
    pub s: f64,
    pub m: f64,
    pub xi1: f64,
    pub xi2: f64,
    pub alpha: f64,
    pub beta: f64,
}

impl HolderBoundParams {
    pub fn validate(&self) -> Result<()> {
        let ok = self.t >= 1.0
            && self.s > self.t
            && self.m > 0.0
            && self.xi1 > 0.0
            && self.xi1 <= self.xi2
            && self.xi2 < 1.0
            && self.alpha >= 0.0
            && self.beta >= 0.0;
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidInput(format!("holder bound parameters out of range: {self:?}")))
        }
    }
}

/// `H = (alpha/xi1) max(1, M) + 2 beta / (xi1 (1 - xi2)) max(1, 1/M)`.
pub fn holder_limit_bound(p: &HolderBoundParams) -> Result<f64> {
    p.validate()?;
    Ok(p.alpha / p.xi1 * p.m.max(1.0) + 2.0 * p.beta / (p.xi1 * (1.0 - p.xi2)) * (1.0 / p.m).max(1.0))
}

/// Shortest chain of pairwise adjacent cylinders of `A*_root(delta)` from
/// one containing `x` to one containing `y`, by breadth-first search.
pub fn chain(adj: &Adjacency, root: &Word, delta: f64, x: &ChainPoint, y: &ChainPoint) -> Result<Vec<Word>> {
    let system = adj.system;
    if !(delta > 0.0 && delta <= root.weight() * (1.0 + 1e-9)) || (root.is_empty() && delta >= 1.0) {
        return Err(Error::InvalidInput(format!("chain needs 0 < delta <= L_root = {}", root.weight())));
    }
    let words = expand(system, root, delta);
    let no_chain = || Error::NoChain { root: root.to_string() };
    let sources: Vec<usize> = (0..words.len()).filter(|&i| adj.contains(&words[i], x)).collect();
    if sources.is_empty() {
        return Err(no_chain());
    }
    let is_target: Vec<bool> = words.iter().map(|w| adj.contains(w, y)).collect();
    if let Some(&i) = sources.iter().find(|&&i| is_target[i]) {
        return Ok(vec![words[i].clone()]);
    }
    let graph = adj.graph(&words);
    let mut prev = vec![usize::MAX; words.len()];
    let mut seen = vec![false; words.len()];
    let mut queue = VecDeque::new();
    for &s in &sources {
        seen[s] = true;
        queue.push_back(s);
    }
    while let Some(v) = queue.pop_front() {
        for &u in &graph[v] {
            if seen[u] {
                continue;
            }
            seen[u] = true;
            prev[u] = v;
            if is_target[u] {
                let mut path = vec![u];
                let mut c = u;
                while prev[c] != usize::MAX {
                    c = prev[c];
                    path.push(c);
                }
                path.reverse();
                return Ok(path.into_iter().map(|i| words[i].clone()).collect());
            }
            queue.push_back(u);
        }
    }
    Err(no_chain())
}

/// One stage `f_m` of a Hölder path: interval endpoints, their images, and
/// the word attached to each interval.
#[derive(Clone, Debug)]
pub struct PathStage {
    pub breaks: Vec<f64>,
    pub points: Vec<ChainPoint>,
    pub words: Vec<Word>,
}

impl PathStage {
    pub fn curve(&self, metric: &Metric) -> SampledCurve {
        SampledCurve {
            t: self.breaks.clone(),
            x: self.points.iter().map(|p| p.x.clone()).collect(),
            metric: metric.clone(),
        }
    }
}

/// The maps `f_0, ..., f_{m_max}` joining two attractor points. Stage `m`
/// intervals carry words of `A*(r^m)` with `r = L_1`.
#[derive(Clone, Debug)]
pub struct HolderPath {
    pub r: f64,
    pub s: f64,
    pub stages: Vec<PathStage>,
    metric: Metric,
}

impl HolderPath {
    pub fn curve(&self) -> SampledCurve {
        self.stages.last().unwrap().curve(&self.metric)
    }

    pub fn stage_curve(&self, m: usize) -> SampledCurve {
        self.stages[m].curve(&self.metric)
    }

    /// `sup_p d(f_m(p), f_{m+1}(p))` over the stage `m+1` breakpoints.
    pub fn stage_displacement(&self, m: usize) -> f64 {
        let f = self.stage_curve(m);
        let next = &self.stages[m + 1];
        next.breaks
            .iter()
            .zip(&next.points)
            .map(|(&t, p)| self.metric.dist(&f.eval(t), &p.x))
            .fold(0.0, f64::max)
    }
}

/// Hölder path from `x` to `y` (both in the attractor) refined `m_max` times.
pub fn holder_path(system: &IfsSystem, x: &[f64], y: &[f64], m_max: usize, oracle: &AdjacencyOracle) -> Result<HolderPath> {
    for p in [x, y] {
        if p.len() != system.dim() {
            return Err(Error::InvalidInput(format!("point has dimension {}, system has {}", p.len(), system.dim())));
        }
    }
    let adj = Adjacency::new(system, oracle)?;
    holder_path_with(&adj, ChainPoint::locate(system, x), ChainPoint::locate(system, y), m_max)
}

pub fn holder_path_with(adj: &Adjacency, x: ChainPoint, y: ChainPoint, m_max: usize) -> Result<HolderPath> {
    let system = adj.system;
    let s = system.s();
    let r = system.min_lip();
    let mut stage = PathStage { breaks: vec![0.0, 1.0], points: vec![x, y], words: vec![Word::empty()] };
    let mut stages = vec![stage.clone()];
    for m in 0..m_max {
        let delta = r.powi(m as i32 + 1);
        let mut next = PathStage { breaks: vec![0.0], points: vec![stage.points[0].clone()], words: Vec::new() };
        for (i, u) in stage.words.iter().enumerate() {
            let (a, b) = (stage.breaks[i], stage.breaks[i + 1]);
            let (xa, xb) = (&stage.points[i], &stage.points[i + 1]);
            let words = chain(adj, u, delta, xa, xb)?;
            let need: f64 = words.iter().map(|w| w.weight().powf(s)).sum();
            assert!(need <= (b - a) * (1.0 + 1e-9), "interval budget {} < {need}", b - a);
            let mut t = a;
            for (j, w) in words.iter().enumerate() {
                let last = j + 1 == words.len();
                let p = if last {
                    xb.clone()
                } else {
                    adj.witness(w, &words[j + 1]).ok_or_else(|| Error::NoChain { root: u.to_string() })?
                };
                t = if last { b } else { t + w.weight().powf(s) };
                next.breaks.push(t);
                next.points.push(p);
                next.words.push(w.clone());
            }
        }
        stage = next;
        stages.push(stage.clone());
    }
    Ok(HolderPath { r, s, stages, metric: system.metric().clone() })
}

/// One constant piece of `F_N`.
#[derive(Clone, Debug, Serialize)]
pub struct Plateau {
    pub word: String,
    pub start: f64,
    pub end: f64,
    pub point: Vec<f64>,
}

/// The map `F_N : [0, M] -> K` for an exponent `alpha > s`.
#[derive(Clone, Debug)]
pub struct Parameterization {
    pub curve: SampledCurve,
    pub total_length: f64,
    pub alpha: f64,
    pub s: f64,
    pub r: f64,
    pub depth: usize,
    /// Plateaus of the last stage, one per word of `A*(r^N)`.
    pub plateaus: Vec<Plateau>,
    /// Edge intervals (each traversed forth and back).
    pub edges: usize,
}

/// Scale-free plateau weights: `M_w = L_w^alpha Phi(rho_w)` with
/// `rho_w = r^m / L_w` for `w ∈ A*(r^m)`, where
/// `Phi(rho) = sum_{v ∈ A*(rho r)} (2 + L_v^alpha Phi(rho r / L_v))`.
struct PlateauTable {
    phi: Vec<f64>,
    children: Vec<Vec<(Word, usize)>>,
}

const MAX_STATES: usize = 100_000;

impl PlateauTable {
    fn build(system: &IfsSystem, alpha: f64, r: f64) -> Result<Self> {
        let key = |rho: f64| (rho.ln() * 1e9).round() as i64;
        let mut index: HashMap<i64, usize> = HashMap::new();
        let mut rhos = vec![1.0];
        index.insert(key(1.0), 0);
        let mut children: Vec<Vec<(Word, usize)>> = Vec::new();
        let mut i = 0;
        while i < rhos.len() {
            let rho = rhos[i];
            let mut kids = Vec::new();
            for v in relative_cut(system, rho * r) {
                let next = rho * r / v.weight();
                let id = *index.entry(key(next)).or_insert_with(|| {
                    rhos.push(next);
                    rhos.len() - 1
                });
                kids.push((v, id));
            }
            children.push(kids);
            if rhos.len() > MAX_STATES {
                return Err(Error::CutTooFine { predicted: rhos.len() as f64, budget: MAX_STATES });
            }
            i += 1;
        }
        // Phi is the fixed point of a contraction with ratio <= max_rho (rho r)^(alpha - s) < 1
        let mut phi = vec![0.0; rhos.len()];
        for _ in 0..100_000 {
            let next: Vec<f64> = children
                .iter()
                .map(|kids| kids.iter().map(|(v, id)| 2.0 + v.weight().powf(alpha) * phi[*id]).sum())
                .collect();
            let change = next.iter().zip(&phi).map(|(a, b)| ((a - b) / a).abs()).fold(0.0, f64::max);
            phi = next;
            if change < 1e-15 {
                break;
            }
        }
        Ok(PlateauTable { phi, children })
    }
}

/// Number of dyadic samples per edge interval, endpoints included.
const EDGE_SAMPLES: usize = 33;

struct Layout<'a> {
    adj: &'a Adjacency<'a>,
    table: PlateauTable,
    alpha: f64,
    s: f64,
    depth: usize,
    paths: HashMap<(Vec<u16>, usize), SampledCurve>,
    t: Vec<f64>,
    x: Vec<Vec<f64>>,
    plateaus: Vec<Plateau>,
    edges: usize,
}

impl Layout<'_> {
    fn push(&mut self, t: f64, p: Vec<f64>) {
        if let Some(&last) = self.t.last() {
            if t <= last {
                // junction of two pieces: they agree there
                return;
            }
        }
        self.t.push(t);
        self.x.push(p);
    }

    fn path(&mut self, v: &Word, depth: usize) -> Result<SampledCurve> {
        let key = (v.letters().to_vec(), depth);
        if let Some(c) = self.paths.get(&key) {
            return Ok(c.clone());
        }
        let sys = self.adj.system;
        let q = ChainPoint::anchor(sys, &[]);
        let qv = ChainPoint::anchor(sys, v.letters());
        let c = holder_path_with(self.adj, q, qv, depth)?.curve();
        self.paths.insert(key, c.clone());
        Ok(c)
    }

    /// `f_{w,u} ∘ psi` on `[a, a + len]`, run backwards when `reverse`.
    fn edge(&mut self, w: &Word, g: &SampledCurve, a: f64, len: f64, reverse: bool) {
        let e = self.alpha / self.s;
        let mut us: Vec<f64> = g.t.clone();
        us.extend((0..EDGE_SAMPLES).map(|j| (j as f64 / (EDGE_SAMPLES - 1) as f64).powf(1.0 / e)));
        us.sort_by(|p, q| p.partial_cmp(q).unwrap());
        us.dedup();
        let phi = self.adj.system.compose_letters(w.letters());
        let pts: Vec<(f64, Vec<f64>)> = us.iter().map(|&u| (len * u.powf(e), phi.apply(&g.eval(u)))).collect();
        if reverse {
            for (dt, p) in pts.into_iter().rev() {
                self.push(a + len - dt, p);
            }
        } else {
            for (dt, p) in pts {
                self.push(a + dt, p);
            }
        }
    }

    fn lay(&mut self, w: &Word, state: usize, m: usize, a: f64, b: f64) -> Result<()> {
        let sys = self.adj.system;
        let qw = w.apply(sys, sys.base_point());
        if m == self.depth {
            self.push(a, qw.clone());
            self.push(b, qw.clone());
            self.plateaus.push(Plateau { word: w.to_string(), start: a, end: b, point: qw });
            return Ok(());
        }
        let edge_len = w.weight().powf(self.alpha);
        let kids = self.table.children[state].clone();
        let g_depth = (self.depth - m + 1).max(1);
        let mut t = a;
        for (j, (v, id)) in kids.iter().enumerate() {
            let u = w.concat(sys, v.letters());
            let g = self.path(v, g_depth)?;
            let plateau = if j + 1 == kids.len() {
                // absorb rounding so the children tile [a, b] exactly
                b - t - 2.0 * edge_len
            } else {
                u.weight().powf(self.alpha) * self.table.phi[*id]
            };
            self.edge(w, &g, t, edge_len, false);
            t += edge_len;
            self.lay(&u, *id, m + 1, t, t + plateau)?;
            t += plateau;
            self.edge(w, &g, t, edge_len, true);
            t = if j + 1 == kids.len() { b } else { t + edge_len };
            self.edges += 1;
        }
        Ok(())
    }
}

/// The `(1/alpha)`-Hölder tree-of-curves parameterization truncated at
/// stage `depth`.
pub fn parameterize(system: &IfsSystem, alpha: f64, depth: usize, oracle: &AdjacencyOracle) -> Result<Parameterization> {
    let s = system.s();
    if !(alpha > s) {
        return Err(Error::AlphaTooSmall { alpha, s });
    }
    if depth == 0 {
        return Err(Error::InvalidInput("depth must be at least 1".into()));
    }
    let r = system.min_lip();
    let adj = Adjacency::new(system, oracle)?;
    let table = PlateauTable::build(system, alpha, r)?;
    let total = table.phi[0];
    let mut layout = Layout {
        adj: &adj,
        table,
        alpha,
        s,
        depth,
        paths: HashMap::new(),
        t: Vec::new(),
        x: Vec::new(),
        plateaus: Vec::new(),
        edges: 0,
    };
    layout.lay(&Word::empty(), 0, 0, 0.0, total)?;
    let curve = SampledCurve::new(layout.t, layout.x, system.metric().clone())?;
    Ok(Parameterization {
        curve,
        total_length: total,
        alpha,
        s,
        r,
        depth,
        plateaus: layout.plateaus,
        edges: layout.edges,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gallery;
    use crate::geometry::{attractor_cover, hausdorff_distance};

    fn w(sys: &IfsSystem, s: &str) -> Word {
        Word::parse(sys, s).unwrap()
    }

    #[test]
    fn bound_examples() {
        let p = HolderBoundParams { t: 1.0, s: 2.0, m: 1.0, xi1: 0.5, xi2: 0.5, alpha: 1.0, beta: 1.0 };
        assert_eq!(holder_limit_bound(&p).unwrap(), 10.0);
        let p = HolderBoundParams { beta: 0.0, alpha: 3.0, xi1: 0.25, ..p };
        assert_eq!(holder_limit_bound(&p).unwrap(), 12.0);
        let p = HolderBoundParams { t: 1.0, s: 2.0, m: 2.0, xi1: 0.5, xi2: 0.5, alpha: 2.0, beta: 0.0 };
        assert_eq!(holder_limit_bound(&p).unwrap(), 8.0);
        assert!(holder_limit_bound(&HolderBoundParams { xi2: 1.0, ..p }).is_err());
    }

    #[test]
    fn gasket_chains() {
        let g = gallery::gasket();
        let adj = Adjacency::new(&g, &gallery::gasket_oracle()).unwrap();
        let x = ChainPoint::locate(&g, &[0.0, 0.0]);
        let y = ChainPoint::locate(&g, &[1.0, 0.0]);
        let c = chain(&adj, &Word::empty(), 0.6, &x, &y).unwrap();
        assert_eq!(c, vec![w(&g, "1"), w(&g, "2")]);
        let c = chain(&adj, &Word::empty(), 0.3, &x, &y).unwrap();
        let names: Vec<String> = c.iter().map(|w| w.to_string()).collect();
        assert_eq!(names, ["11", "12", "21", "22"]);
        let c = chain(&adj, &Word::empty(), 0.3, &x, &x).unwrap();
        assert_eq!(c.len(), 1);
    }

    #[test]
    fn cantor_has_no_chain() {
        let c = gallery::cantor_pair();
        let adj = Adjacency::new(&c, &AdjacencyOracle::approximate(3)).unwrap();
        let err = chain(&adj, &Word::empty(), 0.5, &ChainPoint::locate(&c, &[0.0]), &ChainPoint::locate(&c, &[1.0])).unwrap_err();
        assert!(matches!(err, Error::NoChain { .. }));
    }

    #[test]
    fn gasket_path_first_stage() {
        let g = gallery::gasket();
        let p = holder_path(&g, &[0.0, 0.0], &[1.0, 0.0], 1, &gallery::gasket_oracle()).unwrap();
        let c = p.curve();
        let xs: Vec<f64> = c.x.iter().map(|p| p[0]).collect();
        assert_eq!(xs, [0.0, 0.25, 0.5, 0.75, 1.0]);
        assert!(c.x.iter().all(|p| p[1] == 0.0));
        // each word gets L_w^s = 1/9 and the last absorbs the slack
        let s = g.s();
        assert!((c.t[1] - 0.25f64.powf(s)).abs() < 1e-15);
    }

    #[test]
    fn degenerate_path_is_constant() {
        let g = gallery::gasket();
        let p = holder_path(&g, &[0.0, 0.0], &[0.0, 0.0], 3, &gallery::gasket_oracle()).unwrap();
        let c = p.curve();
        assert_eq!(c.len(), 2);
        assert_eq!(c.x[0], c.x[1]);
    }

    #[test]
    fn gasket_path_telescopes() {
        let g = gallery::gasket();
        let p = holder_path(&g, &[0.0, 0.0], &[1.0, 0.0], 4, &gallery::gasket_oracle()).unwrap();
        for m in 0..4 {
            assert!(p.stage_displacement(m) < 3.0 * 0.5f64.powi(m as i32));
            let st = &p.stages[m + 1];
            assert_eq!(st.points[0].x, vec![0.0, 0.0]);
            assert_eq!(st.points.last().unwrap().x, vec![1.0, 0.0]);
            for (i, u) in st.words.iter().enumerate() {
                assert!(st.breaks[i + 1] - st.breaks[i] >= u.weight().powf(g.s()) * (1.0 - 1e-12));
            }
        }
        let cover = attractor_cover(&g, 0.5f64.powi(8)).unwrap();
        let c = p.curve();
        let bound = 3.0 * 0.5f64.powi(4) / 0.5 + cover.certified_eps;
        let far = c.x.iter().map(|x| cover.points.iter().map(|q| g.metric().dist(x, q)).fold(f64::INFINITY, f64::min)).fold(0.0, f64::max);
        assert!(far <= bound);
    }

    #[test]
    fn parameterize_rejects_small_alpha() {
        let g = gallery::gasket();
        assert!(matches!(parameterize(&g, 1.5, 2, &gallery::gasket_oracle()), Err(Error::AlphaTooSmall { .. })));
    }

    #[test]
    fn gasket_plateau_constant() {
        // Phi(2) = 6 / (1 - 3 2^-alpha) solves Phi = 3 (2 + 2^-alpha Phi)
        let g = gallery::gasket();
        let alpha = 1.7;
        let t = PlateauTable::build(&g, alpha, 0.5).unwrap();
        assert_eq!(t.children[0].len(), 9);
        let (_, id) = t.children[0][0];
        let want = 6.0 / (1.0 - 3.0 * 2f64.powf(-alpha));
        assert!((t.phi[id] - want).abs() < 1e-9 * want);
        assert!((t.phi[0] - 9.0 * (2.0 + 4f64.powf(-alpha) * want)).abs() < 1e-9 * t.phi[0]);
    }

    #[test]
    fn gasket_parameterization_visits_anchors() {
        let g = gallery::gasket();
        let p = parameterize(&g, 1.7, 2, &gallery::gasket_oracle()).unwrap();
        assert_eq!(p.plateaus.len(), 27);
        assert_eq!(*p.curve.t.last().unwrap(), p.total_length);
        for pl in &p.plateaus {
            let word = w(&g, &pl.word);
            assert_eq!(p.curve.eval(0.5 * (pl.start + pl.end)), word.apply(&g, g.base_point()));
        }
    }

    #[test]
    fn segment_parameterization_fills_the_segment() {
        let seg = gallery::segment();
        let p = parameterize(&seg, 1.1, 4, &AdjacencyOracle::exact(crate::oracle::ExactRule::ArcChain)).unwrap();
        let dense: Vec<Vec<f64>> = (0..=1000).map(|i| vec![i as f64 / 1000.0, 0.0]).collect();
        assert!(hausdorff_distance(&p.curve.x, &dense, seg.metric()) < 0.1);
    }

    #[test]
    fn curve_csv_and_eval() {
        let c = SampledCurve::new(vec![0.0, 2.0], vec![vec![0.0, 0.0], vec![2.0, 4.0]], Metric::Euclidean).unwrap();
        assert_eq!(c.eval(0.5), vec![0.5, 1.0]);
        assert_eq!(c.to_csv(), "0;0;0\n2;2;4\n");
        assert!(SampledCurve::new(vec![0.0, 0.0], vec![vec![0.0], vec![1.0]], Metric::Euclidean).is_err());
    }
}
