//! Non-branching attractors: branching detection, arc parameterization,
//! bounded turning, and the diamond snowflake generator.

use serde::{Deserialize, Serialize};

use crate::geometry::{attractor_cover, components};
use crate::holder::{holder_path_with, SampledCurve};
use crate::ifs::{Affine, IfsSystem};
use crate::metric::Metric;
use crate::oracle::{Address, Adjacency, AdjacencyOracle, ChainPoint, OracleMode};
use crate::word::Word;
use crate::{Error, Result};

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Branching {
    NoBranching,
    Branching,
}

#[derive(Clone, Debug, Serialize)]
pub struct BranchingReport {
    pub verdict: Branching,
    pub depth_checked: usize,
    /// Level and a word followed by (at least) three neighbours, 1-based.
    pub witness: Option<(usize, Vec<String>)>,
    /// The two valence-1 letters of `G_1`, 1-based.
    pub end_letters: Option<(usize, usize)>,
}

/// All words of length `m` in lexicographic order.
pub fn level_words(system: &IfsSystem, m: usize) -> Vec<Word> {
    let mut words = vec![Word::empty()];
    for _ in 0..m {
        words = words
            .iter()
            .flat_map(|w| (0..system.len() as u16).map(move |i| w.child(system, i)))
            .collect();
    }
    words
}

/// Looks for a word of valence >= 3 in the level graphs `G_1..G_max_depth`.
pub fn detect_branching(system: &IfsSystem, max_depth: usize, oracle: &AdjacencyOracle) -> Result<BranchingReport> {
    let adj = Adjacency::new(system, oracle)?;
    detect_branching_with(&adj, max_depth)
}

pub fn detect_branching_with(adj: &Adjacency, max_depth: usize) -> Result<BranchingReport> {
    let system = adj.system;
    let mut ends = None;
    let mut cycle = false;
    for m in 1..=max_depth.max(1) {
        let words = level_words(system, m);
        let g = adj.graph(&words);
        if let Some(v) = (0..words.len()).find(|&v| g[v].len() >= 3) {
            let mut names = vec![words[v].to_string()];
            names.extend(g[v].iter().take(3).map(|&u| words[u].to_string()));
            return Ok(BranchingReport {
                verdict: Branching::Branching,
                depth_checked: m,
                witness: Some((m, names)),
                end_letters: None,
            });
        }
        if m == 1 {
            if components(&g).iter().any(|&c| c != 0) {
                return Err(Error::InvalidInput("level-1 cylinder graph is disconnected".into()));
            }
            let leaves: Vec<usize> = (0..words.len()).filter(|&v| g[v].len() <= 1).collect();
            match leaves.len() {
                2 => ends = Some((leaves[0] + 1, leaves[1] + 1)),
                0 => cycle = true,
                _ => return Err(Error::InvalidInput("diameter-zero attractor: a single map".into())),
            }
        }
    }
    if cycle {
        return Err(Error::CycleDetected);
    }
    Ok(BranchingReport { verdict: Branching::NoBranching, depth_checked: max_depth.max(1), witness: None, end_letters: ends })
}

/// Result of [`arc_parameterize`].
#[derive(Clone, Debug)]
pub struct ArcParameterization {
    pub curve: SampledCurve,
    /// System actually used (the square iterate when `k < 4`).
    pub system: IfsSystem,
    pub v0: Vec<f64>,
    pub v1: Vec<f64>,
    /// Truncated terminal words `w_0(n)`, `w_1(n)` (1-based display).
    pub end_words: (String, String),
    /// Words of the last stage, in curve order.
    pub words: Vec<Word>,
    /// Pairs of non-consecutive last-stage intervals whose cylinders meet,
    /// plus consecutive ones that do not.
    pub injectivity_violations: usize,
}

/// Follows the valence-1 word of `G_n` through its children. Returns the
/// truncated word and the endpoint it converges to.
fn terminal_point(adj: &Adjacency, start: u16, neighbour: u16, ends: [u16; 2]) -> (Word, ChainPoint) {
    let sys = adj.system;
    let mut w = Word::from_letters(sys, vec![start]);
    let mut avoid = Word::from_letters(sys, vec![neighbour]);
    while w.weight() >= 1e-9 && w.len() < 200 {
        let pick = ends
            .iter()
            .map(|&i| w.child(sys, i))
            .find(|c| !adj.adjacent(c, &avoid))
            .unwrap_or_else(|| w.child(sys, ends[0]));
        // the new neighbour is a sibling, or a child of the old neighbour
        let next_avoid = (0..sys.len() as u16)
            .map(|i| w.child(sys, i))
            .filter(|c| *c != pick)
            .chain((0..sys.len() as u16).map(|i| avoid.child(sys, i)))
            .find(|c| adj.adjacent(c, &pick))
            .unwrap_or(avoid);
        w = pick;
        avoid = next_avoid;
    }
    (w.clone(), eventual_fixed_point(sys, &w))
}

/// Exact limit point of a truncated word whose tail is periodic; otherwise
/// the numeric image of the base point with its error bound.
fn eventual_fixed_point(sys: &IfsSystem, w: &Word) -> ChainPoint {
    let l = w.letters();
    for p in 1..=4 {
        let tail = 3 * p;
        if l.len() < tail + 1 {
            break;
        }
        let n = l.len();
        if (n - tail..n).all(|i| l[i] == l[i - p]) {
            let mut start = n - tail;
            while start >= p && l[start - 1] == l[start - 1 + p] {
                start -= 1;
            }
            let period = l[start..start + p].to_vec();
            if let Some(fp) = sys.compose_letters(&period).fixed_point() {
                let x = sys.apply_letters(&l[..start], &fp);
                return ChainPoint { x, addrs: vec![Address { prefix: l[..start].to_vec(), period }], err: 0.0 };
            }
        }
    }
    ChainPoint::numeric(w.apply(sys, sys.base_point()), w.weight() * sys.diam_bound())
}

/// `(1/s)`-Hölder arc onto the attractor of a non-branching system, as the
/// Hölder path between its two terminal points.
pub fn arc_parameterize(system: &IfsSystem, depth: usize, oracle: &AdjacencyOracle) -> Result<ArcParameterization> {
    let (sys, oracle) = if system.len() < 4 {
        let rule = match &oracle.mode {
            OracleMode::Approximate => Some(oracle.clone()),
            OracleMode::Exact(r) => r.iterate(system.len(), 2).map(|r| AdjacencyOracle { mode: OracleMode::Exact(r), ..oracle.clone() }),
        };
        let o = rule.ok_or(Error::BranchingInput { level: 2 })?;
        (system.iterate(2), o)
    } else {
        (system.clone(), oracle.clone())
    };
    let adj = Adjacency::new(&sys, &oracle)?;
    let report = detect_branching_with(&adj, 3)?;
    if let Some((level, _)) = report.witness {
        return Err(Error::BranchingInput { level });
    }
    let (i0, j0) = report.end_letters.ok_or(Error::BranchingInput { level: 1 })?;
    let ends = [(i0 - 1) as u16, (j0 - 1) as u16];
    let level1 = level_words(&sys, 1);
    let g1 = adj.graph(&level1);
    let (w0, v0) = terminal_point(&adj, ends[0], g1[ends[0] as usize][0] as u16, ends);
    let (w1, v1) = terminal_point(&adj, ends[1], g1[ends[1] as usize][0] as u16, ends);
    let path = holder_path_with(&adj, v0.clone(), v1.clone(), depth)?;
    let stage = path.stages.last().unwrap();
    let words = stage.words.clone();
    let g = adj.graph(&words);
    let mut violations = 0;
    for (i, nb) in g.iter().enumerate() {
        violations += nb.iter().filter(|&&j| j > i + 1).count();
        if i + 1 < words.len() && !nb.contains(&(i + 1)) {
            violations += 1;
        }
    }
    Ok(ArcParameterization {
        curve: path.curve(),
        system: sys,
        v0: v0.x,
        v1: v1.x,
        end_words: (w0.to_string(), w1.to_string()),
        words,
        injectivity_violations: violations,
    })
}

/// Empirical lower bound for the bounded-turning constant: the maximum of
/// `max(d(x,z), d(y,z)) / d(x,y)` over cover points `x ∈ K_i`, `y ∈ K_j`
/// of adjacent first-level cylinders with `z` their common point.
pub fn bounded_turning_estimate(system: &IfsSystem, sample_depth: usize, oracle: &AdjacencyOracle) -> Result<f64> {
    let adj = Adjacency::new(system, oracle)?;
    let cover = attractor_cover(system, system.min_lip().powi(sample_depth as i32))?;
    let metric = system.metric();
    let level1 = level_words(system, 1);
    let g = adj.graph(&level1);
    let mut best: f64 = 1.0;
    for i in 0..level1.len() {
        for &j in g[i].iter().filter(|&&j| j > i) {
            let z = match adj.witness(&level1[i], &level1[j]) {
                Some(z) => z.x,
                None => continue,
            };
            let mut xs: Vec<Vec<f64>> = cover.points.iter().map(|p| system.maps()[i].apply(p)).collect();
            let mut ys: Vec<Vec<f64>> = cover.points.iter().map(|p| system.maps()[j].apply(p)).collect();
            xs.push(z.clone());
            ys.push(z.clone());
            for x in &xs {
                let dxz = metric.dist(x, &z);
                for y in &ys {
                    let dxy = metric.dist(x, y);
                    if dxy > 0.0 {
                        best = best.max(dxz.max(metric.dist(y, &z)) / dxy);
                    }
                }
            }
        }
    }
    Ok(best)
}

/// Estimates across several sample depths with a growth flag.
#[derive(Clone, Debug, Serialize)]
pub struct TurningScan {
    pub depths: Vec<usize>,
    pub estimates: Vec<f64>,
    /// Strictly increasing across all depths, by at least 5% per step.
    pub unbounded_suspect: bool,
}

pub fn turning_scan(system: &IfsSystem, depths: &[usize], oracle: &AdjacencyOracle) -> Result<TurningScan> {
    let estimates = depths.iter().map(|&d| bounded_turning_estimate(system, d, oracle)).collect::<Result<Vec<_>>>()?;
    let unbounded_suspect = estimates.len() >= 3 && estimates.windows(2).all(|w| w[1] > 1.05 * w[0]);
    Ok(TurningScan { depths: depths.to_vec(), estimates, unbounded_suspect })
}

/// A polygonal arc from `(0,0)` to `(1,0)` with one aperture per segment.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DiamondSpec {
    pub vertices: Vec<[f64; 2]>,
    pub apertures: Vec<f64>,
}

/// Apex height of the rhombus with axis length `len` and aperture `a`
/// (apex half-angle `asin a`).
pub fn apex_height(len: f64, a: f64) -> f64 {
    0.5 * len * a / (1.0 - a * a).sqrt()
}

/// Rhombus corners: start, left apex, end, right apex.
pub fn diamond(p: [f64; 2], q: [f64; 2], a: f64) -> [[f64; 2]; 4] {
    let (dx, dy) = (q[0] - p[0], q[1] - p[1]);
    let len = dx.hypot(dy);
    let h = apex_height(len, a);
    let (nx, ny) = (-dy / len, dx / len);
    let m = [(p[0] + q[0]) / 2.0, (p[1] + q[1]) / 2.0];
    [p, [m[0] + h * nx, m[1] + h * ny], q, [m[0] - h * nx, m[1] - h * ny]]
}

/// Strict separating-axis test for convex polygons: true when some edge
/// normal separates them with a positive gap.
fn strictly_separated(a: &[[f64; 2]], b: &[[f64; 2]]) -> bool {
    for poly in [a, b] {
        for i in 0..poly.len() {
            let p = poly[i];
            let q = poly[(i + 1) % poly.len()];
            let axis = [q[1] - p[1], p[0] - q[0]];
            let proj = |pts: &[[f64; 2]]| {
                pts.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| {
                    let d = v[0] * axis[0] + v[1] * axis[1];
                    (lo.min(d), hi.max(d))
                })
            };
            let (alo, ahi) = proj(a);
            let (blo, bhi) = proj(b);
            if ahi < blo || bhi < alo {
                return true;
            }
        }
    }
    false
}

fn angle_between(u: [f64; 2], v: [f64; 2]) -> f64 {
    let cross = u[0] * v[1] - u[1] * v[0];
    let dot = u[0] * v[0] + u[1] * v[1];
    cross.atan2(dot).abs()
}

impl DiamondSpec {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))
    }

    pub fn segments(&self) -> usize {
        self.vertices.len().saturating_sub(1)
    }

    pub fn validate(&self) -> Result<()> {
        let k = self.segments();
        if k == 0 || self.apertures.len() != k {
            return Err(Error::InvalidInput("need one aperture per segment and at least one segment".into()));
        }
        if self.vertices[0] != [0.0, 0.0] || self.vertices[k] != [1.0, 0.0] {
            return Err(Error::InvalidInput("the arc must run from (0,0) to (1,0)".into()));
        }
        for (i, &a) in self.apertures.iter().enumerate() {
            if !(a > 0.0 && a < 0.5) {
                return Err(Error::ApertureTooLarge { index: i + 1, value: a });
            }
        }
        let h0 = apex_height(1.0, 0.5);
        for i in 0..k {
            let (p, q) = (self.vertices[i], self.vertices[i + 1]);
            let len = (q[0] - p[0]).hypot(q[1] - p[1]);
            if !(len > 0.0 && len < 1.0) {
                return Err(Error::SegmentEscapes { index: i + 1 });
            }
        }
        // the open master rhombus is |y| < h0 (1 - |2x - 1|); the endpoints are its corners
        for (i, v) in self.vertices.iter().enumerate().take(k).skip(1) {
            if v[1].abs() >= h0 * (1.0 - (2.0 * v[0] - 1.0).abs()) {
                return Err(Error::SegmentEscapes { index: i });
            }
        }
        let rh: Vec<_> = (0..k).map(|i| diamond(self.vertices[i], self.vertices[i + 1], self.apertures[i])).collect();
        for i in 0..k {
            for j in i + 1..k {
                let ok = if j == i + 1 {
                    // near the shared vertex each rhombus is its apex cone
                    let v = self.vertices[j];
                    let back = [self.vertices[i][0] - v[0], self.vertices[i][1] - v[1]];
                    let fwd = [self.vertices[j + 1][0] - v[0], self.vertices[j + 1][1] - v[1]];
                    angle_between(back, fwd) > self.apertures[i].asin() + self.apertures[j].asin()
                } else {
                    strictly_separated(&rh[i], &rh[j])
                };
                if !ok {
                    return Err(Error::DiamondOverlap { i: i + 1, j: j + 1 });
                }
            }
        }
        Ok(())
    }
}

/// The affine maps sending the master rhombus `D_{1/2}(l_0)` onto
/// `D_{a_i}(l_i)`, preserving orientation, with lip `|l_i|`.
pub fn snowflake_ifs(spec: &DiamondSpec) -> Result<IfsSystem> {
    spec.validate()?;
    let h0 = apex_height(1.0, 0.5);
    let maps = (0..spec.segments())
        .map(|i| {
            let (p, q) = (spec.vertices[i], spec.vertices[i + 1]);
            let (dx, dy) = (q[0] - p[0], q[1] - p[1]);
            let len = dx.hypot(dy);
            let scale = apex_height(len, spec.apertures[i]) / h0;
            let (nx, ny) = (-dy / len, dx / len);
            let affine = Affine { linear: vec![dx, scale * nx, dy, scale * ny], offset: p.to_vec() };
            (affine, Some(len))
        })
        .collect();
    IfsSystem::new(2, maps, Metric::Euclidean)
}
