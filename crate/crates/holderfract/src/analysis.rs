//! Empirical estimators: s-variation, Hölder constants, exponent scans
//! and box-counting dimension.

use std::collections::HashSet;
use std::fmt::Write as _;

use serde::Serialize;

use crate::geometry::AttractorCover;
use crate::holder::SampledCurve;
use crate::{Error, Result};

/// Interval diameters are exact up to this many breakpoints, then taken
/// from a double sweep (a lower bound, exact for most curve pieces).
const EXACT_DIAMETER_POINTS: usize = 1024;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct VariationEstimate {
    pub exponent: f64,
    pub depth: usize,
    pub value: f64,
}

/// Diameter of the image of `[a, b]` under the curve.
fn image_diameter(curve: &SampledCurve, a: f64, b: f64) -> f64 {
    let lo = curve.t.partition_point(|&s| s <= a);
    let hi = curve.t.partition_point(|&s| s < b);
    let mut pts: Vec<Vec<f64>> = vec![curve.eval(a)];
    pts.extend(curve.x[lo..hi].iter().cloned());
    pts.push(curve.eval(b));
    point_diameter(&pts, curve)
}

fn point_diameter(pts: &[Vec<f64>], curve: &SampledCurve) -> f64 {
    let m = &curve.metric;
    if pts.len() <= EXACT_DIAMETER_POINTS {
        let mut best: f64 = 0.0;
        for i in 0..pts.len() {
            for j in i + 1..pts.len() {
                best = best.max(m.dist(&pts[i], &pts[j]));
            }
        }
        return best;
    }
    let mut best: f64 = 0.0;
    for start in [0, pts.len() / 2, pts.len() - 1] {
        let mut from = start;
        for _ in 0..3 {
            let (far, d) = pts
                .iter()
                .enumerate()
                .map(|(i, p)| (i, m.dist(&pts[from], p)))
                .fold((from, 0.0), |acc, x| if x.1 > acc.1 { x } else { acc });
            best = best.max(d);
            from = far;
        }
    }
    best
}

/// Lower bound for `‖f‖_{s-var}`: the largest `(∑ diam f(I)^s)^{1/s}` over
/// the dyadic partitions of levels `1..=depth` and the breakpoint partition.
pub fn s_variation_estimate(curve: &SampledCurve, s: f64, depth: usize) -> Result<VariationEstimate> {
    if !(s >= 1.0) || depth > 20 {
        return Err(Error::InvalidInput(format!("need s >= 1 and depth <= 20, got s = {s}, depth = {depth}")));
    }
    let mut best: f64 = curve.x.windows(2).map(|p| curve.metric.dist(&p[0], &p[1]).powf(s)).sum();
    let (a, b) = curve.domain();
    for level in 1..=depth {
        let k = 1usize << level;
        let h = (b - a) / k as f64;
        let sum: f64 = (0..k).map(|i| image_diameter(curve, a + i as f64 * h, a + (i + 1) as f64 * h).powf(s)).sum();
        best = best.max(sum);
    }
    Ok(VariationEstimate { exponent: s, depth, value: best.powf(1.0 / s) })
}

/// `max d(f(x), f(y)) / |x - y|^{1/s}` over breakpoint pairs: all pairs when
/// `n^2 <= pair_budget`, otherwise index gaps on a ×1.25 ladder with evenly
/// strided starts so that roughly `pair_budget` pairs are evaluated.
pub fn holder_constant_estimate(curve: &SampledCurve, s: f64, pair_budget: usize) -> f64 {
    holder_constant_estimate_threads(curve, s, pair_budget, 1)
}

/// Same as [`holder_constant_estimate`] spread over `threads` workers; the
/// result does not depend on the thread count.
pub fn holder_constant_estimate_threads(curve: &SampledCurve, s: f64, pair_budget: usize, threads: usize) -> f64 {
    let n = curve.len();
    let inv = 1.0 / s;
    let ratio = |i: usize, j: usize| {
        let d = curve.metric.dist(&curve.x[i], &curve.x[j]);
        if d == 0.0 { 0.0 } else { d / (curve.t[j] - curve.t[i]).powf(inv) }
    };
    // (gap, stride) jobs
    let jobs: Vec<(usize, usize)> = if n.saturating_mul(n) <= pair_budget {
        (1..n).map(|g| (g, 1)).collect()
    } else {
        let mut gaps = Vec::new();
        let mut g = 1.0f64;
        while (g as usize) < n {
            let gi = g as usize;
            if gaps.last() != Some(&gi) {
                gaps.push(gi);
            }
            g *= 1.25;
        }
        gaps.push(n - 1);
        gaps.dedup();
        let per = (pair_budget / gaps.len()).max(1);
        gaps.iter().map(|&g| (g, ((n - g) / per).max(1))).collect()
    };
    let run = |part: &[(usize, usize)]| {
        let mut best: f64 = 0.0;
        for &(g, stride) in part {
            let mut i = 0;
            while i + g < n {
                best = best.max(ratio(i, i + g));
                i += stride;
            }
            if stride > 1 {
                best = best.max(ratio(n - 1 - g, n - 1));
            }
        }
        best
    };
    let threads = threads.max(1).min(jobs.len().max(1));
    if threads == 1 {
        return run(&jobs);
    }
    let chunk = jobs.len().div_ceil(threads);
    std::thread::scope(|scope| {
        let handles: Vec<_> = jobs.chunks(chunk).map(|c| scope.spawn(move || run(c))).collect();
        handles.into_iter().map(|h| h.join().expect("worker panicked")).fold(0.0, f64::max)
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ScanVerdict {
    Bounded,
    Diverging,
    Inconclusive,
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct ScanThresholds {
    /// `max / min` at or below this is bounded.
    pub bounded_ratio: f64,
    /// Every step growing by at least this factor is diverging.
    pub diverging_step: f64,
}

impl Default for ScanThresholds {
    fn default() -> Self {
        ScanThresholds { bounded_ratio: 2.0, diverging_step: 1.5 }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct ScanRow {
    pub exponent: f64,
    pub values: Vec<f64>,
    pub verdict: ScanVerdict,
}

#[derive(Clone, Debug, Serialize)]
pub struct ScanTable {
    pub depths: usize,
    pub rows: Vec<ScanRow>,
    /// Least tested exponent with a bounded verdict.
    pub crossover: Option<f64>,
}

impl ScanTable {
    /// Exponent × depth matrix.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("exponent");
        for d in 0..self.depths {
            let _ = write!(out, ";depth{}", d + 1);
        }
        out.push_str(";verdict\n");
        for row in &self.rows {
            let _ = write!(out, "{}", row.exponent);
            for v in &row.values {
                let _ = write!(out, ";{v}");
            }
            let _ = writeln!(out, ";{:?}", row.verdict);
        }
        out
    }

    pub fn verdict(&self, exponent: f64) -> Option<ScanVerdict> {
        self.rows.iter().find(|r| (r.exponent - exponent).abs() < 1e-12).map(|r| r.verdict)
    }
}

pub fn classify(values: &[f64], th: ScanThresholds) -> ScanVerdict {
    let max = values.iter().copied().fold(f64::MIN, f64::max);
    let min = values.iter().copied().fold(f64::MAX, f64::min);
    if min > 0.0 && max / min <= th.bounded_ratio {
        ScanVerdict::Bounded
    } else if values.windows(2).all(|w| w[1] >= th.diverging_step * w[0]) {
        ScanVerdict::Diverging
    } else {
        ScanVerdict::Inconclusive
    }
}

/// Hölder-constant estimates of each curve (increasing construction depth)
/// at each exponent `s` (Hölder exponent `1/s`), with verdicts.
pub fn exponent_scan(curves: &[SampledCurve], exponents: &[f64], pair_budget: usize, th: ScanThresholds) -> Result<ScanTable> {
    if curves.len() < 3 {
        return Err(Error::InsufficientDepths(curves.len()));
    }
    let rows: Vec<ScanRow> = exponents
        .iter()
        .map(|&s| {
            let values: Vec<f64> = curves.iter().map(|c| holder_constant_estimate(c, s, pair_budget)).collect();
            let verdict = classify(&values, th);
            ScanRow { exponent: s, values, verdict }
        })
        .collect();
    let crossover = rows
        .iter()
        .filter(|r| r.verdict == ScanVerdict::Bounded)
        .map(|r| r.exponent)
        .reduce(f64::min);
    Ok(ScanTable { depths: curves.len(), rows, crossover })
}

/// Least-squares slope of `log N(eps)` against `log(1/eps)`, with `N(eps)`
/// the number of grid cubes of side `eps` met by the cover. Resolution is
/// measured by the cover's per-axis coordinate error.
pub fn box_counting_dimension(cover: &AttractorCover, scales: &[f64]) -> Result<f64> {
    if scales.len() < 4 {
        return Err(Error::InvalidInput(format!("need at least 4 scales, got {}", scales.len())));
    }
    let min = scales.iter().copied().fold(f64::INFINITY, f64::min);
    let eps = cover.coord_eps.iter().copied().fold(0.0, f64::max);
    if min < 10.0 * eps {
        return Err(Error::ScalesBelowResolution { scale: min, eps });
    }
    let samples: Vec<(f64, f64)> = scales
        .iter()
        .map(|&eps| {
            let cells: HashSet<Vec<i64>> =
                cover.points.iter().map(|p| p.iter().map(|c| (c / eps).floor() as i64).collect()).collect();
            ((1.0 / eps).ln(), (cells.len() as f64).ln())
        })
        .collect();
    let n = samples.len() as f64;
    let mx = samples.iter().map(|s| s.0).sum::<f64>() / n;
    let my = samples.iter().map(|s| s.1).sum::<f64>() / n;
    let sxy: f64 = samples.iter().map(|s| (s.0 - mx) * (s.1 - my)).sum();
    let sxx: f64 = samples.iter().map(|s| (s.0 - mx).powi(2)).sum();
    Ok(sxy / sxx)
}
