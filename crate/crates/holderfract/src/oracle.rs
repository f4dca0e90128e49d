//! The cylinder-intersection predicate `K_w ∩ K_u ≠ ∅`.
//!
//! Two modes: an approximate test on point clouds that never misses a true
//! intersection, and exact closed-form rules for the gallery families
//! (vertex-sharing triangles, arcs of consecutive pieces, grid carpets).

use std::collections::HashMap;

use crate::geometry::attractor_cover;
use crate::ifs::{affine_box, IfsSystem};
use crate::word::Word;
use crate::{Error, Result};

/// Closed-form intersection rules.
#[derive(Clone, Debug, PartialEq)]
pub enum ExactRule {
    /// `K_i ∩ K_j = {phi_i(p_j)} = {phi_j(p_i)}` with `p_i` the fixed point of
    /// `phi_i`, as for the Sierpiński gasket. Then `K_{c i x} ∩ K_{c j y}` is
    /// nonempty iff `x` only uses `j` and `y` only uses `i`.
    VertexSwap,
    /// Maps listed along an arc: `phi_i(end) = phi_{i+1}(start)` where start
    /// and end are the fixed points of the first and last map, and pieces
    /// that are not consecutive are disjoint (von Koch, segment, diamond
    /// snowflakes).
    ArcChain,
    /// Grid carpet: map `i` sends `[0,1]^n` onto the cell with 0-based digits
    /// `cells[i]` in a grid with `bases` subdivisions per axis.
    Carpet { bases: Vec<u32>, cells: Vec<Vec<u32>> },
}

impl ExactRule {
    /// Rule for the iterated system `{phi_w : |w| = m}` in lexicographic order.
    pub fn iterate(&self, k: usize, m: usize) -> Option<ExactRule> {
        match self {
            ExactRule::ArcChain => Some(ExactRule::ArcChain),
            ExactRule::VertexSwap => None,
            ExactRule::Carpet { bases, cells } => {
                let mut words: Vec<Vec<usize>> = vec![vec![]];
                for _ in 0..m {
                    words = words
                        .into_iter()
                        .flat_map(|w| (0..k).map(move |i| [w.clone(), vec![i]].concat()))
                        .collect();
                }
                let nb: Vec<u32> = bases.iter().map(|b| b.pow(m as u32)).collect();
                let nc = words
                    .iter()
                    .map(|w| {
                        (0..bases.len())
                            .map(|d| w.iter().fold(0u32, |acc, &i| acc * bases[d] + cells[i][d]))
                            .collect()
                    })
                    .collect();
                Some(ExactRule::Carpet { bases: nb, cells: nc })
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum OracleMode {
    Approximate,
    Exact(ExactRule),
}

#[derive(Clone, Debug, PartialEq)]
pub struct AdjacencyOracle {
    pub mode: OracleMode,
    /// Depth `q` of the cover `C_q` used for point clouds, counted in powers
    /// of the smallest ratio.
    pub refinement_depth: usize,
}

impl AdjacencyOracle {
    pub fn approximate(q: usize) -> Self {
        AdjacencyOracle { mode: OracleMode::Approximate, refinement_depth: q }
    }
    pub fn exact(rule: ExactRule) -> Self {
        AdjacencyOracle { mode: OracleMode::Exact(rule), refinement_depth: 4 }
    }
    pub fn is_exact(&self) -> bool {
        matches!(self.mode, OracleMode::Exact(_))
    }
}

/// Infinite word `prefix · period^∞`.
#[derive(Clone, Debug, PartialEq)]
pub struct Address {
    pub prefix: Vec<u16>,
    pub period: Vec<u16>,
}

impl Address {
    pub fn letter(&self, i: usize) -> u16 {
        if i < self.prefix.len() {
            self.prefix[i]
        } else {
            self.period[(i - self.prefix.len()) % self.period.len()]
        }
    }
    pub fn starts_with(&self, w: &[u16]) -> bool {
        w.iter().enumerate().all(|(i, &l)| self.letter(i) == l)
    }
    /// `phi_w(address)`.
    pub fn prepend(&self, w: &[u16]) -> Address {
        Address { prefix: [w, &self.prefix[..]].concat(), period: self.period.clone() }
    }
}

/// A point of the attractor as tracked by the chain constructions: its
/// coordinates, any symbolic addresses known for it, and a bound on its
/// distance to the attractor.
#[derive(Clone, Debug, PartialEq)]
pub struct ChainPoint {
    pub x: Vec<f64>,
    pub addrs: Vec<Address>,
    pub err: f64,
}

impl ChainPoint {
    pub fn numeric(x: Vec<f64>, err: f64) -> Self {
        ChainPoint { x, addrs: Vec::new(), err }
    }

    /// Recognizes fixed points of the maps, which have a periodic address.
    pub fn locate(system: &IfsSystem, x: &[f64]) -> Self {
        let mut addrs = Vec::new();
        for (i, m) in system.maps().iter().enumerate() {
            if let Some(p) = m.affine.fixed_point() {
                if system.metric().dist(&p, x) <= 1e-12 {
                    addrs.push(Address { prefix: vec![], period: vec![i as u16] });
                }
            }
        }
        ChainPoint { x: x.to_vec(), addrs, err: 0.0 }
    }

    /// `phi_w(q)` for `q` the fixed point of the first map.
    pub fn anchor(system: &IfsSystem, w: &[u16]) -> Self {
        ChainPoint {
            x: system.apply_letters(w, system.base_point()),
            addrs: vec![Address { prefix: w.to_vec(), period: vec![0] }],
            err: 0.0,
        }
    }
}

/// Adjacency oracle bound to one system, with its cached cover cloud.
pub struct Adjacency<'a> {
    pub system: &'a IfsSystem,
    pub oracle: AdjacencyOracle,
    cloud: Vec<Vec<f64>>,
    eps_q: f64,
    kbox: (Vec<f64>, Vec<f64>),
}

impl<'a> Adjacency<'a> {
    pub fn new(system: &'a IfsSystem, oracle: &AdjacencyOracle) -> Result<Self> {
        if let OracleMode::Exact(ExactRule::Carpet { bases, cells }) = &oracle.mode {
            if bases.len() != system.dim() || cells.len() != system.len() {
                return Err(Error::InvalidInput("carpet rule does not match the system".into()));
            }
        }
        // high-dimensional systems get a coarser cloud instead of a failure
        let mut q = oracle.refinement_depth.max(1);
        let mut delta = system.min_lip().powi(q as i32);
        while q > 1 && crate::word::predicted_cut_size(system, 1.0, delta) > 200_000.0 {
            q -= 1;
            delta = system.min_lip().powi(q as i32);
        }
        let cover = attractor_cover(system, delta)?;
        Ok(Adjacency {
            system,
            oracle: oracle.clone(),
            eps_q: cover.certified_eps,
            cloud: cover.points,
            kbox: system.bounding_box(),
        })
    }

    /// Certified resolution of the cloud `C_q`.
    pub fn eps_q(&self) -> f64 {
        self.eps_q
    }

    pub fn cloud_of(&self, w: &Word) -> Vec<Vec<f64>> {
        let a = self.system.compose_letters(w.letters());
        self.cloud.iter().map(|p| a.apply(p)).collect()
    }

    pub fn cylinder_box(&self, w: &Word) -> (Vec<f64>, Vec<f64>) {
        let a = self.system.compose_letters(w.letters());
        affine_box(&a, &self.kbox.0, &self.kbox.1)
    }

    /// `K_w ∩ K_u ≠ ∅` (one-sided in approximate mode).
    pub fn adjacent(&self, w: &Word, u: &Word) -> bool {
        if !w.incomparable(u) {
            return true;
        }
        match &self.oracle.mode {
            OracleMode::Approximate => self.cloud_gap(w, u) <= 0.0,
            OracleMode::Exact(ExactRule::VertexSwap) => vertex_swap(w.letters(), u.letters()),
            OracleMode::Exact(ExactRule::ArcChain) => {
                arc_chain(w.letters(), u.letters(), self.system.len() as u16)
            }
            OracleMode::Exact(ExactRule::Carpet { bases, cells }) => {
                carpet_meet(bases, cells, w.letters(), u.letters(), 2).is_some()
            }
        }
    }

    /// `min d(P_w, P_u) - (L_w + L_u) eps_q`: positive values certify that
    /// the cylinders are at least that far apart.
    pub fn cloud_gap(&self, w: &Word, u: &Word) -> f64 {
        let tol = (w.weight() + u.weight()) * self.eps_q;
        let (a_lo, a_hi) = self.cylinder_box(w);
        let (b_lo, b_hi) = self.cylinder_box(u);
        let metric = self.system.metric();
        // boxes contain the cylinders, so their gap is a lower bound too
        let mut box_gap = 0.0f64;
        for i in 0..a_lo.len() {
            let g = (b_lo[i] - a_hi[i]).max(a_lo[i] - b_hi[i]).max(0.0);
            box_gap = box_gap.max(metric.axis_lower_bound(g, i));
        }
        if box_gap > tol {
            return box_gap;
        }
        let pw = self.cloud_of(w);
        let pu = self.cloud_of(u);
        min_distance(&pw, &pu, metric).0 - tol
    }

    /// A point of `K_w ∩ K_u`, when the oracle says they meet.
    pub fn witness(&self, w: &Word, u: &Word) -> Option<ChainPoint> {
        let sys = self.system;
        if !w.incomparable(u) {
            let longer = if w.len() >= u.len() { w } else { u };
            return Some(ChainPoint::anchor(sys, longer.letters()));
        }
        let c = w.common_prefix_len(u);
        let (wl, ul) = (w.letters(), u.letters());
        match &self.oracle.mode {
            OracleMode::Exact(ExactRule::VertexSwap) => {
                if !vertex_swap(wl, ul) {
                    return None;
                }
                let (i, j) = (wl[c], ul[c]);
                let pj = sys.maps()[j as usize].affine.fixed_point()?;
                let x = sys.apply_letters(&wl[..=c], &pj);
                Some(ChainPoint {
                    x,
                    addrs: vec![
                        Address { prefix: wl[..=c].to_vec(), period: vec![j] },
                        Address { prefix: ul[..=c].to_vec(), period: vec![i] },
                    ],
                    err: 0.0,
                })
            }
            OracleMode::Exact(ExactRule::ArcChain) => {
                let k = sys.len() as u16;
                if !arc_chain(wl, ul, k) {
                    return None;
                }
                let (first, second) = if wl[c] < ul[c] { (wl, ul) } else { (ul, wl) };
                let end = sys.maps()[(k - 1) as usize].affine.fixed_point()?;
                let x = sys.apply_letters(&first[..=c], &end);
                Some(ChainPoint {
                    x,
                    addrs: vec![
                        Address { prefix: first[..=c].to_vec(), period: vec![k - 1] },
                        Address { prefix: second[..=c].to_vec(), period: vec![0] },
                    ],
                    err: 0.0,
                })
            }
            OracleMode::Exact(ExactRule::Carpet { bases, cells }) => {
                let (lo, hi) = carpet_meet(bases, cells, wl, ul, 2)?;
                let x: Vec<f64> = lo.iter().zip(&hi).map(|(a, b)| 0.5 * (a + b)).collect();
                let err = sys.metric().dist(&lo, &hi);
                Some(ChainPoint::numeric(x, err))
            }
            OracleMode::Approximate => {
                let pw = self.cloud_of(w);
                let pu = self.cloud_of(u);
                let (d, i, j) = min_distance(&pw, &pu, sys.metric());
                let tol = (w.weight() + u.weight()) * self.eps_q;
                if d > tol {
                    return None;
                }
                let x: Vec<f64> = pw[i].iter().zip(&pu[j]).map(|(a, b)| 0.5 * (a + b)).collect();
                Some(ChainPoint::numeric(x, d + tol))
            }
        }
    }

    /// Whether `p ∈ K_w`, one-sided: a `false` may be wrong only for points
    /// whose symbolic addresses are incomplete.
    pub fn contains(&self, w: &Word, p: &ChainPoint) -> bool {
        if w.is_empty() {
            return true;
        }
        let exact_symbolic = matches!(
            self.oracle.mode,
            OracleMode::Exact(ExactRule::VertexSwap) | OracleMode::Exact(ExactRule::ArcChain)
        );
        if !p.addrs.is_empty() && (exact_symbolic || p.err == 0.0) {
            if p.addrs.iter().any(|a| a.starts_with(w.letters())) {
                return true;
            }
            if exact_symbolic {
                return false;
            }
        }
        if let OracleMode::Exact(ExactRule::Carpet { bases, cells }) = &self.oracle.mode {
            return carpet_contains(self.system, bases, cells, w.letters(), &p.x, p.err);
        }
        let (lo, hi) = self.cylinder_box(w);
        let tol = w.weight() * self.eps_q + p.err;
        let metric = self.system.metric();
        for i in 0..lo.len() {
            let g = (lo[i] - p.x[i]).max(p.x[i] - hi[i]).max(0.0);
            if metric.axis_lower_bound(g, i) > tol {
                return false;
            }
        }
        self.cloud_of(w).iter().any(|q| metric.dist(q, &p.x) <= tol)
    }

    /// Adjacency lists (sorted) of the intersection graph on `words`.
    pub fn graph(&self, words: &[Word]) -> Vec<Vec<usize>> {
        let n = words.len();
        let mut adj = vec![Vec::new(); n];
        if n < 2 {
            return adj;
        }
        let metric = self.system.metric();
        let boxes: Vec<(Vec<f64>, Vec<f64>)> = words
            .iter()
            .map(|w| {
                let (mut lo, mut hi) = self.cylinder_box(w);
                let pad = match self.oracle.mode {
                    OracleMode::Approximate => w.weight() * self.eps_q,
                    OracleMode::Exact(_) => 0.0,
                };
                for i in 0..lo.len() {
                    let r = metric.coord_radius(pad, i) + 1e-12 * (1.0 + hi[i].abs().max(lo[i].abs()));
                    lo[i] -= r;
                    hi[i] += r;
                }
                (lo, hi)
            })
            .collect();
        for (i, j) in box_overlaps(&boxes) {
            if self.adjacent(&words[i], &words[j]) {
                adj[i].push(j);
                adj[j].push(i);
            }
        }
        for a in adj.iter_mut() {
            a.sort_unstable();
        }
        adj
    }
}

/// Pairs `i < j` whose closed boxes overlap, sorted.
pub fn box_overlaps(boxes: &[(Vec<f64>, Vec<f64>)]) -> Vec<(usize, usize)> {
    let n = boxes.len();
    if n < 2 {
        return Vec::new();
    }
    let dim = boxes[0].0.len();
    let mut glo = vec![f64::INFINITY; dim];
    let mut ghi = vec![f64::NEG_INFINITY; dim];
    let mut mean = vec![0.0; dim];
    for (lo, hi) in boxes {
        for i in 0..dim {
            glo[i] = glo[i].min(lo[i]);
            ghi[i] = ghi[i].max(hi[i]);
            mean[i] += (hi[i] - lo[i]) / n as f64;
        }
    }
    let cell: Vec<f64> = (0..dim).map(|i| mean[i].max((ghi[i] - glo[i]) / 1e6).max(1e-300)).collect();
    let mut buckets: HashMap<Vec<i64>, Vec<u32>> = HashMap::new();
    for (idx, (lo, hi)) in boxes.iter().enumerate() {
        let a: Vec<i64> = (0..dim).map(|i| ((lo[i] - glo[i]) / cell[i]).floor() as i64).collect();
        let b: Vec<i64> = (0..dim).map(|i| ((hi[i] - glo[i]) / cell[i]).floor() as i64).collect();
        let mut key = a.clone();
        loop {
            buckets.entry(key.clone()).or_default().push(idx as u32);
            let mut axis = 0;
            while axis < dim {
                key[axis] += 1;
                if key[axis] <= b[axis] {
                    break;
                }
                key[axis] = a[axis];
                axis += 1;
            }
            if axis == dim {
                break;
            }
        }
    }
    let mut pairs = Vec::new();
    for bucket in buckets.values() {
        for x in 0..bucket.len() {
            for y in x + 1..bucket.len() {
                let (i, j) = (bucket[x] as usize, bucket[y] as usize);
                let (i, j) = if i < j { (i, j) } else { (j, i) };
                let (a, b) = (&boxes[i], &boxes[j]);
                if (0..dim).all(|d| a.0[d] <= b.1[d] && b.0[d] <= a.1[d]) {
                    pairs.push((i, j));
                }
            }
        }
    }
    pairs.sort_unstable();
    pairs.dedup();
    pairs
}

/// Smallest distance between two finite sets and the indices attaining it.
pub fn min_distance(a: &[Vec<f64>], b: &[Vec<f64>], metric: &crate::metric::Metric) -> (f64, usize, usize) {
    let mut order: Vec<usize> = (0..b.len()).collect();
    order.sort_by(|&i, &j| b[i][0].total_cmp(&b[j][0]));
    let xs: Vec<f64> = order.iter().map(|&i| b[i][0]).collect();
    let mut best = (f64::INFINITY, 0, 0);
    for (ia, p) in a.iter().enumerate() {
        let reach = if best.0.is_finite() { metric.coord_radius(best.0, 0) } else { f64::INFINITY };
        let start = xs.partition_point(|&x| x < p[0] - reach);
        for k in start..order.len() {
            if xs[k] > p[0] + metric.coord_radius(best.0, 0) {
                break;
            }
            let ib = order[k];
            let d = metric.dist(p, &b[ib]);
            if d < best.0 || (d == best.0 && (ia, ib) < (best.1, best.2)) {
                best = (d, ia, ib);
            }
        }
    }
    best
}

fn split(w: &[u16], u: &[u16]) -> (usize, u16, u16) {
    let c = w.iter().zip(u).take_while(|(a, b)| a == b).count();
    (c, w[c], u[c])
}

fn vertex_swap(w: &[u16], u: &[u16]) -> bool {
    let (c, i, j) = split(w, u);
    w[c + 1..].iter().all(|&l| l == j) && u[c + 1..].iter().all(|&l| l == i)
}

fn arc_chain(w: &[u16], u: &[u16], k: u16) -> bool {
    let (c, i, j) = split(w, u);
    let (first, second) = if i < j { (w, u) } else { (u, w) };
    if i.abs_diff(j) != 1 {
        return false;
    }
    first[c + 1..].iter().all(|&l| l == k - 1) && second[c + 1..].iter().all(|&l| l == 0)
}

/// Integer box of a word at scale `bases^depth`: lower corner and side.
fn carpet_rect(bases: &[u32], cells: &[Vec<u32>], w: &[u16], depth: usize) -> (Vec<i128>, Vec<i128>) {
    let dim = bases.len();
    let mut lo = vec![0i128; dim];
    for &l in w {
        for d in 0..dim {
            lo[d] = lo[d] * bases[d] as i128 + cells[l as usize][d] as i128;
        }
    }
    let rest = depth - w.len();
    let mut side = vec![1i128; dim];
    for d in 0..dim {
        let f = (bases[d] as i128).pow(rest as u32);
        lo[d] *= f;
        side[d] = f;
    }
    (lo, side)
}

fn rects_meet(a: &(Vec<i128>, Vec<i128>), b: &(Vec<i128>, Vec<i128>)) -> bool {
    (0..a.0.len()).all(|d| a.0[d] <= b.0[d] + b.1[d] && b.0[d] <= a.0[d] + a.1[d])
}

/// Decides whether two carpet cylinders meet by requiring their grid boxes
/// to touch and to keep touching through `levels` further subdivisions.
/// Returns the float box of the deepest touching pair's intersection.
fn carpet_meet(bases: &[u32], cells: &[Vec<u32>], w: &[u16], u: &[u16], levels: usize) -> Option<(Vec<f64>, Vec<f64>)> {
    let c = w.iter().zip(u).take_while(|(a, b)| a == b).count();
    let (x, y) = (&w[c..], &u[c..]);
    let depth = x.len().max(y.len()) + levels;
    let found = meet_rec(bases, cells, x.to_vec(), y.to_vec(), depth, levels)?;
    // map the local box back through the common prefix
    let dim = bases.len();
    let mut lo = vec![0.0; dim];
    let mut hi = vec![0.0; dim];
    for d in 0..dim {
        let scale = (bases[d] as f64).powi(depth as i32);
        let mut a = found.0[d] as f64 / scale;
        let mut b = (found.0[d] + found.1[d]) as f64 / scale;
        for &l in w[..c].iter().rev() {
            let n = bases[d] as f64;
            a = (cells[l as usize][d] as f64 + a) / n;
            b = (cells[l as usize][d] as f64 + b) / n;
        }
        lo[d] = a;
        hi[d] = b;
    }
    Some((lo, hi))
}

fn meet_rec(
    bases: &[u32],
    cells: &[Vec<u32>],
    x: Vec<u16>,
    y: Vec<u16>,
    depth: usize,
    levels: usize,
) -> Option<(Vec<i128>, Vec<i128>)> {
    let rx = carpet_rect(bases, cells, &x, depth);
    let ry = carpet_rect(bases, cells, &y, depth);
    if !rects_meet(&rx, &ry) {
        return None;
    }
    if levels == 0 {
        let dim = bases.len();
        let lo: Vec<i128> = (0..dim).map(|d| rx.0[d].max(ry.0[d])).collect();
        let side: Vec<i128> = (0..dim).map(|d| (rx.0[d] + rx.1[d]).min(ry.0[d] + ry.1[d]) - lo[d]).collect();
        return Some((lo, side));
    }
    let k = cells.len() as u16;
    let xs: Vec<Vec<u16>> = (0..k)
        .map(|a| [&x[..], &[a]].concat())
        .filter(|cx| rects_meet(&carpet_rect(bases, cells, cx, depth), &ry))
        .collect();
    let ys: Vec<Vec<u16>> = (0..k)
        .map(|b| [&y[..], &[b]].concat())
        .filter(|cy| rects_meet(&carpet_rect(bases, cells, cy, depth), &rx))
        .collect();
    for cx in &xs {
        for cy in &ys {
            if let Some(r) = meet_rec(bases, cells, cx.clone(), cy.clone(), depth, levels - 1) {
                return Some(r);
            }
        }
    }
    None
}

/// Whether `x` lies (within `tol` per axis) in the carpet cylinder of `w`,
/// following grid boxes eight levels below `w`.
fn carpet_contains(system: &IfsSystem, bases: &[u32], cells: &[Vec<u32>], w: &[u16], x: &[f64], tol: f64) -> bool {
    let dim = bases.len();
    let metric = system.metric();
    // local coordinates inside the cylinder box, tracked as (box lo, box side)
    let mut lo = vec![0.0f64; dim];
    let mut side = vec![1.0f64; dim];
    for &l in w {
        for d in 0..dim {
            side[d] /= bases[d] as f64;
            lo[d] += cells[l as usize][d] as f64 * side[d];
        }
    }
    let inside = |lo: &[f64], side: &[f64]| {
        (0..dim).all(|d| {
            let r = metric.coord_radius(tol, d) + 1e-12;
            x[d] >= lo[d] - r && x[d] <= lo[d] + side[d] + r
        })
    };
    fn rec(
        lo: Vec<f64>,
        side: Vec<f64>,
        level: usize,
        bases: &[u32],
        cells: &[Vec<u32>],
        inside: &dyn Fn(&[f64], &[f64]) -> bool,
    ) -> bool {
        if !inside(&lo, &side) {
            return false;
        }
        if level == 0 {
            return true;
        }
        let dim = bases.len();
        cells.iter().any(|c| {
            let s: Vec<f64> = (0..dim).map(|d| side[d] / bases[d] as f64).collect();
            let l: Vec<f64> = (0..dim).map(|d| lo[d] + c[d] as f64 * s[d]).collect();
            rec(l, s, level - 1, bases, cells, inside)
        })
    }
    rec(lo, side, 8, bases, cells, &inside)
}
